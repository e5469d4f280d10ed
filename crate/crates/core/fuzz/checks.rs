// Per-target checks, shared by the fuzz targets and the seed replay test in
// the core crate. Every entry point must reject bad input with an error, and
// whatever it accepts must survive its own serializer.

use slidesynth::critic::CritiqueList;
use slidesynth::edit::{commands_from_jsonl, commands_to_jsonl, EditCommand};
use slidesynth::ingest::{parse_markdown, units_from_jsonl, units_to_jsonl};
use slidesynth::ldl::{lex, parse_text, serialize};
use slidesynth::preval::PrevalModel;
use slidesynth::prototype::{concepts_from_json, LpgModel};
use slidesynth::sir::SlideDraft;

#[allow(dead_code)]
pub const TARGETS: &[&str] = &[
    "ldl_text",
    "slide_draft",
    "edit_commands",
    "critique_list",
    "concepts",
    "markdown",
    "document_units",
    "lpg_model",
    "lpg_pairs",
    "preval_model",
    "preference_pairs",
];

pub fn run(target: &str, data: &[u8]) {
    match target {
        "slide_draft" => slide_draft(data),
        "concepts" => {
            let _ = concepts_from_json(data);
        }
        _ => {
            let Ok(text) = std::str::from_utf8(data) else { return };
            match target {
                "ldl_text" => ldl_text(text),
                "edit_commands" => edit_commands(text),
                "critique_list" => critique_list(text),
                "markdown" => markdown(text),
                "document_units" => {
                    let _ = units_from_jsonl(text);
                }
                "lpg_model" => lpg_model(text),
                "lpg_pairs" => lpg_pairs(text),
                "preval_model" => preval_model(text),
                "preference_pairs" => preference_pairs(text),
                other => panic!("unknown fuzz target {other}"),
            }
        }
    }
}

fn ldl_text(text: &str) {
    let _ = lex(text);
    if let Ok(layout) = parse_text(text) {
        let again = parse_text(&serialize(&layout)).expect("serialized layout parses");
        assert_eq!(again, layout);
    }
}

fn slide_draft(data: &[u8]) {
    if let Ok(d) = SlideDraft::from_json(data) {
        assert_eq!(SlideDraft::from_json(&d.to_json()).as_ref(), Ok(&d));
    }
}

fn edit_commands(text: &str) {
    if let Ok(cmd) = EditCommand::from_json(text) {
        assert_eq!(EditCommand::from_json(&cmd.to_json()).as_ref(), Ok(&cmd));
    }
    if let Ok(cmds) = commands_from_jsonl(text) {
        assert_eq!(commands_from_jsonl(&commands_to_jsonl(&cmds)).as_ref(), Ok(&cmds));
    }
}

fn critique_list(text: &str) {
    if let Ok(list) = CritiqueList::from_json(text) {
        assert_eq!(CritiqueList::from_json(&list.to_json()).map(|l| l.issues), Ok(list.issues));
    }
}

fn markdown(text: &str) {
    let (units, visuals) = parse_markdown(text);
    for (i, u) in units.iter().enumerate() {
        assert_eq!(u.unit_id, format!("doc_unit_{:03}", i + 1));
        if let Some(id) = &u.source_visual_id {
            assert!(visuals.contains_key(id));
        }
    }
    let back = units_from_jsonl(&units_to_jsonl(&units)).expect("units re-parse");
    assert_eq!(back, units);
}

fn lpg_model(text: &str) {
    if let Ok(m) = LpgModel::from_json(text) {
        let once = m.to_json();
        assert_eq!(LpgModel::from_json(&once).map(|m| m.to_json()).as_ref(), Ok(&once));
    }
}

fn lpg_pairs(text: &str) {
    use slidesynth::prototype::{pairs_from_jsonl, pairs_to_jsonl};
    if let Ok(pairs) = pairs_from_jsonl(text) {
        let once = pairs_to_jsonl(&pairs);
        assert_eq!(pairs_from_jsonl(&once).map(|p| pairs_to_jsonl(&p)).as_ref(), Ok(&once));
    }
}

fn preval_model(text: &str) {
    if let Ok(m) = PrevalModel::from_json(text) {
        let once = m.to_json();
        assert_eq!(PrevalModel::from_json(&once).map(|m| m.to_json()).as_ref(), Ok(&once));
    }
}

fn preference_pairs(text: &str) {
    use slidesynth::preval::{pairs_from_jsonl, pairs_to_jsonl};
    if let Ok(pairs) = pairs_from_jsonl(text) {
        let once = pairs_to_jsonl(&pairs);
        assert_eq!(pairs_from_jsonl(&once).map(|p| pairs_to_jsonl(&p)).as_ref(), Ok(&once));
    }
}
