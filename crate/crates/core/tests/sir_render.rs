mod common;

use common::random_draft;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slidesynth::geom::Rect;
use slidesynth::ldl::Token;
use slidesynth::render::{layout_text, measure_text, render_svg, TextMetrics};
use slidesynth::sir::{canvas_rect, ContentPayload, SirError, SlideDraft, SlideElement, Style};

#[test]
fn random_drafts_round_trip_and_union_contains_all() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..300 {
        let d = random_draft(&mut rng);
        let bytes = d.to_json();
        let back = SlideDraft::from_json(&bytes).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json(), bytes);
        let u = d.bounding_union().unwrap();
        // Boxes are stored as origin plus size, so a recomputed far edge
        // can be off by one ulp.
        let eps = 1e-9;
        for e in d.elements() {
            let g = e.geometry;
            assert!(u.left() <= g.left() && u.top() <= g.top());
            assert!(u.right() >= g.right() - eps && u.bottom() >= g.bottom() - eps);
        }
    }
}

#[test]
fn reference_ids() {
    let d = SlideDraft::new(Token::lookup("SLIDE_BLANK").unwrap());
    assert_eq!(d.resolve_box("slide_bounds").unwrap(), canvas_rect());
    let c = d.resolve_box("slide_center").unwrap();
    assert_eq!((c.center_x(), c.center_y()), (640.0, 360.0));
    assert_eq!(d.resolve_box("nope"), Err(SirError::ElementNotFound("nope".into())));
    assert_eq!(d.bounding_union(), Err(SirError::EmptyDraft));
}

#[test]
fn svg_is_wellformed_and_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let d = random_draft(&mut rng);
        let svg = render_svg(&d);
        assert_eq!(svg, render_svg(&d.clone()));
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
    }
    // Markup in text is escaped, not interpreted.
    let mut d = SlideDraft::new(Token::lookup("SLIDE_BLANK").unwrap());
    d.push(
        SlideElement::new("t", Token::lookup("ELEM_TITLE").unwrap(), Rect::new(10.0, 10.0, 600.0, 60.0))
            .with_content(ContentPayload::Title { text: "<b>A & B</b>".into() }),
    )
    .unwrap();
    let doc_text = render_svg(&d);
    let doc = roxmltree::Document::parse(&doc_text).unwrap();
    assert!(doc.descendants().any(|n| n.text() == Some("<b>A & B</b>")));
}

proptest! {
    #[test]
    fn larger_font_never_needs_less_height(
        words in prop::collection::vec("[a-z]{1,12}", 0..60),
        fs in 6.0..48.0f64,
        width in 40.0..1200.0f64,
    ) {
        let text = words.join(" ");
        prop_assert!(measure_text(&text, 2.0 * fs, width) >= measure_text(&text, fs, width));
        let el = SlideElement::new("b", Token::lookup("ELEM_TEXT_BODY").unwrap(), Rect::new(0.0, 0.0, width, 100.0))
            .with_content(if words.is_empty() { ContentPayload::Empty } else { ContentPayload::TextBody { bullets: vec![text.clone()] } });
        let small = layout_text(&el.clone().with_style(Style { font_size: fs, ..Style::default() }), &TextMetrics::default());
        let big = layout_text(&el.with_style(Style { font_size: (2.0 * fs).min(96.0), ..Style::default() }), &TextMetrics::default());
        prop_assert!(big.required_height >= small.required_height);
    }
}
