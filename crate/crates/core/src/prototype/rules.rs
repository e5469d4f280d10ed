use super::concept::{AspectBucket, ConceptFeatures, FunctionalType, PointsBucket};
use crate::ldl::{lex, Token};

fn points_attr(p: PointsBucket) -> &'static str {
    match p {
        PointsBucket::Few => "ATTR_TEXT_POINTS_FEW",
        PointsBucket::Medium => "ATTR_TEXT_POINTS_MEDIUM",
        PointsBucket::Many => "ATTR_TEXT_POINTS_MANY",
    }
}

fn aspect_attr(a: AspectBucket) -> &'static str {
    match a {
        AspectBucket::Wide => " ATTR_IMAGE_ASPECT_WIDE",
        AspectBucket::Square => " ATTR_IMAGE_ASPECT_SQUARE",
        AspectBucket::Tall => " ATTR_IMAGE_ASPECT_TALL",
        AspectBucket::None => "",
    }
}

/// Text of the fixed template for `f`.
pub fn rule_prototype_text(f: &ConceptFeatures) -> String {
    let pts = points_attr(f.points_bucket);
    let asp = aspect_attr(f.aspect_bucket);
    let dense = if f.points_bucket == PointsBucket::Many {
        " ATTR_CONTENT_DENSE"
    } else {
        ""
    };
    let title = "<SEP> ELEM_TITLE POS_TOP POS_CENTER";
    match f.functional_type {
        FunctionalType::TitleMain => "<SOS> SLIDE_TITLE \
             <SEP> ELEM_TITLE ATTR_SIZE_PRIMARY POS_MIDDLE POS_CENTER \
             <SEP> ELEM_SUBTITLE ATTR_SIZE_SECONDARY POS_MIDDLE POS_CENTER <EOS>"
            .to_string(),
        FunctionalType::SectionHeader => {
            "<SOS> SLIDE_SECTION_HEADER <SEP> ELEM_TITLE ATTR_SIZE_PRIMARY POS_MIDDLE POS_CENTER <EOS>"
                .to_string()
        }
        FunctionalType::Agenda | FunctionalType::ContentTextOnly => format!(
            "<SOS> SLIDE_CONTENT_SINGLE_COL {title} <SEP> ELEM_TEXT_BODY {pts}{dense} POS_MIDDLE POS_FULL_WIDTH <EOS>"
        ),
        FunctionalType::KeyTakeaways => format!(
            "<SOS> SLIDE_CONTENT_SINGLE_COL {title} <SEP> ELEM_TEXT_BODY {pts}{dense} POS_MIDDLE POS_CENTER <EOS>"
        ),
        FunctionalType::ContentTextImageLeft => format!(
            "<SOS> SLIDE_CONTENT_TWO_COL {title} \
             <SEP> ELEM_IMAGE{asp} POS_HALF_WIDTH_LEFT \
             <SEP> ELEM_TEXT_BODY {pts}{dense} POS_HALF_WIDTH_RIGHT <EOS>"
        ),
        FunctionalType::ContentTextImageRight => format!(
            "<SOS> SLIDE_CONTENT_TWO_COL {title} \
             <SEP> ELEM_TEXT_BODY {pts}{dense} POS_HALF_WIDTH_LEFT \
             <SEP> ELEM_IMAGE{asp} POS_HALF_WIDTH_RIGHT <EOS>"
        ),
        FunctionalType::ContentImageOnly => format!(
            "<SOS> SLIDE_IMAGE_CAPTION {title} <SEP> ELEM_IMAGE{asp} ATTR_SIZE_PRIMARY POS_MIDDLE POS_CENTER <EOS>"
        ),
        FunctionalType::ComparisonTable => format!(
            "<SOS> SLIDE_CONTENT_TWO_COL {title} \
             <SEP> ELEM_TABLE POS_MIDDLE POS_HALF_WIDTH_LEFT \
             <SEP> ELEM_TEXT_BODY {pts}{dense} POS_MIDDLE POS_HALF_WIDTH_RIGHT <EOS>"
        ),
        FunctionalType::ThankYouContact => "<SOS> SLIDE_TITLE \
             <SEP> ELEM_TITLE ATTR_SIZE_PRIMARY POS_MIDDLE POS_CENTER \
             <SEP> ELEM_FOOTER POS_BOTTOM POS_CENTER <EOS>"
            .to_string(),
    }
}

/// Deterministic prototype for `f` from the fixed template table.
pub fn rule_prototype(f: &ConceptFeatures) -> Vec<Token> {
    lex(&rule_prototype_text(f)).expect("templates use only vocabulary tokens")
}
