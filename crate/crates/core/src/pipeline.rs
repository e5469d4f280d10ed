//! End-to-end run from slide concepts to rendered, refined and scored
//! slides, producing an in-memory output tree with stable file names.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::critic::{full_critique, CriticThresholds, CritiqueList};
use crate::edit::commands_to_jsonl;
use crate::ingest::{parse_markdown, units_to_jsonl, VisualMap};
use crate::instantiate::instantiate;
use crate::ldl::{parse, serialize, MAX_SEQUENCE_LEN};
use crate::preval::{evaluate, report_csv, PrevalError, PrevalModel};
use crate::prototype::{generate_prototype, rule_prototype, LpgModel, SlideConcept, DEFAULT_BEAM};
use crate::refine::{refine, RefinementConfig, TraceRecord};
use crate::render::{deck_html, render_svg};
use crate::sir::SlideDraft;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub refinement: RefinementConfig,
    pub thresholds: CriticThresholds,
    pub dim_weights: [f64; 3],
    pub seed: u64,
    pub beam_size: usize,
    pub max_len: usize,
    /// Write measured times into trace.csv instead of zeros.
    pub timings: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            refinement: RefinementConfig::default(),
            thresholds: CriticThresholds::default(),
            dim_weights: crate::preval::EQUAL_WEIGHTS,
            seed: 0,
            beam_size: DEFAULT_BEAM,
            max_len: MAX_SEQUENCE_LEN,
            timings: false,
        }
    }
}

impl PipelineConfig {
    pub fn check(&self) -> Result<(), String> {
        self.refinement.check()?;
        self.thresholds.check()?;
        crate::preval::aggregate(&[0.0; 3], &self.dim_weights).map_err(|e| e.to_string())?;
        if self.beam_size == 0 {
            return Err("beam_size must be positive".into());
        }
        Ok(())
    }
}

/// Everything produced for one slide.
#[derive(Debug, Clone)]
pub struct SlideRun {
    pub layout_text: String,
    pub initial: SlideDraft,
    pub final_draft: SlideDraft,
    pub critiques: Vec<CritiqueList>,
    pub trace: Vec<TraceRecord>,
    pub commands: Vec<crate::edit::EditCommand>,
    pub warnings: Vec<String>,
}

/// Prototype, instantiate and refine one concept.
pub fn run_slide(concept: &SlideConcept, model: Option<&LpgModel>, cfg: &PipelineConfig) -> SlideRun {
    let features = concept.features();
    let mut warnings = concept.warnings();
    let tokens = match model {
        Some(m) => {
            let (t, note) = generate_prototype(m, &features, cfg.beam_size, cfg.max_len);
            warnings.extend(note);
            t
        }
        None => rule_prototype(&features),
    };
    // Both sources only emit grammatical sequences.
    let layout = parse(&tokens).expect("prototype parses");
    let inst = instantiate(&layout, concept);
    warnings.extend(inst.warnings);
    let r = refine(&inst.draft, Some(concept), &cfg.refinement, &cfg.thresholds);
    warnings.extend(r.notes);
    SlideRun {
        layout_text: serialize(&layout),
        initial: inst.draft,
        final_draft: r.draft,
        critiques: r.critiques,
        trace: r.trace,
        commands: r.commands,
        warnings,
    }
}

#[derive(Debug, Clone, Serialize)]
struct Manifest<'a> {
    seed: u64,
    slides: usize,
    config: &'a PipelineConfig,
    warnings: BTreeMap<String, Vec<String>>,
}

/// Output files by relative name.
pub type OutputTree = BTreeMap<String, Vec<u8>>;

pub fn slide_file(i: usize, ext: &str) -> String {
    format!("slide_{:03}.{ext}", i + 1)
}

/// Trace rows of several slides, keyed by slide number.
pub fn deck_trace_csv(traces: &[Vec<TraceRecord>], timings: bool) -> String {
    let mut s = String::from("slide,t,aggregate_severity,issues,commands,ms\n");
    for (i, tr) in traces.iter().enumerate() {
        for r in tr {
            let ms = if timings { r.elapsed_ms } else { 0.0 };
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                i + 1,
                r.t,
                r.aggregate_severity,
                r.issues,
                r.commands,
                ms
            ));
        }
    }
    s
}

/// Markdown (optional) → units; concepts → prototypes → drafts → refined
/// drafts → SVG → deck profile.
pub fn run_pipeline(
    concepts: &[SlideConcept],
    markdown: Option<&str>,
    lpg: Option<&LpgModel>,
    scorer: &PrevalModel,
    cfg: &PipelineConfig,
) -> Result<OutputTree, PrevalError> {
    let mut out = OutputTree::new();
    let mut manifest_warnings = BTreeMap::new();

    let visuals: Option<VisualMap> = markdown.map(|doc| {
        let (units, visuals) = parse_markdown(doc);
        out.insert("units.jsonl".into(), units_to_jsonl(&units).into_bytes());
        out.insert("visuals.json".into(), json_bytes(&visuals));
        visuals
    });

    let runs: Vec<SlideRun> = concepts.par_iter().map(|c| run_slide(c, lpg, cfg)).collect();

    let mut svgs = Vec::new();
    for (i, (run, concept)) in runs.iter().zip(concepts).enumerate() {
        let mut warnings = run.warnings.clone();
        if let (Some(v), Some(id)) = (&visuals, &concept.primary_visual_id) {
            if !v.contains_key(id) {
                warnings.push(format!("visual {id} not found in the document"));
            }
        }
        out.insert(slide_file(i, "ldl"), (run.layout_text.clone() + "\n").into_bytes());
        out.insert(slide_file(i, "sir.json"), run.final_draft.to_json());
        let svg = slide_file(i, "svg");
        out.insert(svg.clone(), render_svg(&run.final_draft).into_bytes());
        svgs.push(svg);
        for (t, c) in run.critiques.iter().enumerate() {
            out.insert(format!("critique_{:03}_t{t}.json", i + 1), c.to_json().into_bytes());
        }
        out.insert(format!("commands_{:03}.jsonl", i + 1), commands_to_jsonl(&run.commands).into_bytes());
        if !warnings.is_empty() {
            manifest_warnings.insert(format!("slide_{:03}", i + 1), warnings);
        }
    }
    let traces: Vec<Vec<TraceRecord>> = runs.iter().map(|r| r.trace.clone()).collect();
    out.insert("trace.csv".into(), deck_trace_csv(&traces, cfg.timings).into_bytes());
    out.insert("deck.html".into(), deck_html(&svgs).into_bytes());

    if !runs.is_empty() {
        let deck: Vec<SlideDraft> = runs.iter().map(|r| r.final_draft.clone()).collect();
        let crits: Vec<CritiqueList> = runs.iter().map(|r| r.critiques.last().cloned().unwrap_or_default()).collect();
        let mut model = scorer.clone();
        model.dim_weights = cfg.dim_weights;
        let profile = evaluate(&deck, &crits, &model, &cfg.thresholds)?;
        out.insert("profile.csv".into(), report_csv(&[("deck".into(), profile)]).into_bytes());
    }

    let manifest = Manifest {
        seed: cfg.seed,
        slides: concepts.len(),
        config: cfg,
        warnings: manifest_warnings,
    };
    out.insert("manifest.json".into(), json_bytes(&manifest));
    Ok(out)
}

fn json_bytes<T: Serialize>(v: &T) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(v).expect("serialisable");
    b.push(b'\n');
    b
}

/// Critiques every slide afresh and scores the deck.
pub fn score_deck(
    deck: &[SlideDraft],
    model: &PrevalModel,
    thresholds: &CriticThresholds,
) -> Result<crate::preval::QualityProfile, PrevalError> {
    let crits: Vec<CritiqueList> = deck.iter().map(|d| full_critique(d, None, thresholds)).collect();
    evaluate(deck, &crits, model, thresholds)
}

/// Writes every file of the tree under `dir`.
pub fn write_tree(tree: &OutputTree, dir: &std::path::Path) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, bytes) in tree {
        std::fs::write(dir.join(name), bytes)?;
    }
    Ok(())
}

/// SHA-256 over names and contents, in name order.
pub fn tree_digest(tree: &OutputTree) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    for (name, bytes) in tree {
        h.update((name.len() as u64).to_le_bytes());
        h.update(name.as_bytes());
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub const DEMO_CONCEPTS: &str = include_str!("../demo/concepts.json");
pub const DEMO_MARKDOWN: &str = include_str!("../demo/report.md");

/// The bundled five-slide demo.
pub fn demo_concepts() -> Vec<SlideConcept> {
    crate::prototype::concepts_from_json(DEMO_CONCEPTS.as_bytes()).expect("bundled demo is valid")
}
