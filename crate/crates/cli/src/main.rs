use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slidesynth::critic::full_critique;
use slidesynth::edit::commands_to_jsonl;
use slidesynth::ingest::{dbscan_cluster, parse_markdown, units_to_jsonl, ClusterConfig};
use slidesynth::instantiate::instantiate;
use slidesynth::ldl;
use slidesynth::pipeline::{
    demo_concepts, run_pipeline, score_deck, slide_file, write_tree, PipelineConfig, DEMO_MARKDOWN,
};
use slidesynth::preval::{self, report_csv, PrevalModel, TrainConfig};
use slidesynth::prototype::{self, concepts_from_json, generate_prototype, rule_prototype, LpgModel, SlideConcept};
use slidesynth::refine::{corruption_corpus, quality_cost_csv, quality_cost_trace, refine, trace_csv, CorruptionConfig};
use slidesynth::render::render_svg;
use slidesynth::sir::SlideDraft;

#[derive(Parser)]
#[command(name = "slidesynth", version, about = "Layout-first slide synthesis")]
struct Cli {
    /// TOML pipeline configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print errors as JSON on stderr.
    #[arg(long, global = true)]
    json: bool,
    /// Refinement iteration limit.
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Severity threshold for stopping refinement.
    #[arg(long, global = true)]
    tau: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Layout description language tools.
    Ldl {
        #[command(subcommand)]
        cmd: LdlCmd,
    },
    /// Markdown document to units.jsonl and visuals.json.
    Parse { doc: PathBuf },
    /// Cluster embeddings (JSON array of vectors); prints labels.
    Cluster { vectors: PathBuf },
    /// Layout prototype per concept.
    Generate {
        #[arg(long)]
        concepts: PathBuf,
        #[arg(long)]
        lpg: Option<PathBuf>,
    },
    /// Place a layout for one concept.
    Instantiate {
        layout: PathBuf,
        #[arg(long)]
        concepts: PathBuf,
        /// 1-based concept number.
        #[arg(long, default_value_t = 1)]
        index: usize,
    },
    /// Critique one draft; prints the critique JSON.
    Critique { draft: PathBuf },
    /// Run the refinement loop on one draft.
    Refine { draft: PathBuf },
    /// Draft to SVG.
    Render { draft: PathBuf },
    /// Score a directory of slide_NNN.sir.json files.
    Score {
        #[arg(long)]
        deck: PathBuf,
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Train the prototype model; without pairs, on the rule corpus.
    TrainLpg {
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        /// The objective is a mean over pairs, so each condition's rows
        /// only see 1/N of the step; large rates are normal.
        #[arg(long, default_value_t = 100.0)]
        lr: f64,
    },
    /// Train the quality scorer from preference pairs (JSONL).
    TrainPreval {
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        lambda_tag: Option<f64>,
    },
    /// Quality/cost trace over a corrupted-draft corpus.
    Trace {
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// Full run; defaults to the bundled demo.
    Pipeline {
        #[arg(long)]
        concepts: Option<PathBuf>,
        #[arg(long)]
        doc: Option<PathBuf>,
        #[arg(long)]
        lpg: Option<PathBuf>,
        #[arg(long)]
        preval: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LdlCmd {
    /// Report grammar violations; exit 2 if any.
    Validate { file: PathBuf },
    /// Print the canonical form.
    Format { file: PathBuf },
}

enum Failure {
    Invalid(String, String),
    Runtime(String, String),
}

fn invalid(kind: &str, e: impl ToString) -> Failure {
    Failure::Invalid(kind.into(), e.to_string())
}

fn runtime(kind: &str, e: impl ToString) -> Failure {
    Failure::Runtime(kind.into(), e.to_string())
}

type Res<T> = Result<T, Failure>;

fn read(p: &Path) -> Res<Vec<u8>> {
    fs::read(p).map_err(|e| runtime("io", format!("{}: {e}", p.display())))
}

fn read_text(p: &Path) -> Res<String> {
    String::from_utf8(read(p)?).map_err(|e| invalid("encoding", format!("{}: {e}", p.display())))
}

fn write(dir: &Path, name: &str, bytes: impl AsRef<[u8]>) -> Res<()> {
    fs::create_dir_all(dir).map_err(|e| runtime("io", e))?;
    fs::write(dir.join(name), bytes).map_err(|e| runtime("io", e))
}

fn load_config(cli: &Cli) -> Res<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(p) => toml::from_str(&read_text(p)?).map_err(|e| invalid("config", e))?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(k) = cli.k {
        cfg.refinement.max_iterations = k;
    }
    if let Some(t) = cli.tau {
        cfg.refinement.severity_threshold = t;
    }
    cfg.check().map_err(|e| invalid("config", e))?;
    Ok(cfg)
}

fn load_concepts(p: &Path) -> Res<Vec<SlideConcept>> {
    concepts_from_json(&read(p)?).map_err(|e| invalid("concepts", e))
}

fn load_draft(p: &Path) -> Res<SlideDraft> {
    SlideDraft::from_json(&read(p)?).map_err(|e| invalid("sir", e))
}

fn load_lpg(p: &Path) -> Res<LpgModel> {
    LpgModel::from_json(&read_text(p)?).map_err(|e| invalid("lpg_model", e))
}

fn load_preval(p: Option<&PathBuf>) -> Res<PrevalModel> {
    match p {
        Some(p) => PrevalModel::from_json(&read_text(p)?).map_err(|e| invalid("preval_model", e)),
        None => Ok(PrevalModel::default()),
    }
}

fn run(cli: &Cli) -> Res<i32> {
    let cfg = load_config(cli)?;
    let out = &cli.out;
    match &cli.cmd {
        Cmd::Ldl { cmd: LdlCmd::Validate { file } } => {
            let tokens = ldl::lex(&read_text(file)?).map_err(|e| invalid("ldl", e))?;
            let violations = ldl::validate(&tokens);
            println!("{}", serde_json::to_string_pretty(&violations).expect("serializable"));
            return Ok(if violations.is_empty() { 0 } else { 2 });
        }
        Cmd::Ldl { cmd: LdlCmd::Format { file } } => {
            let layout = ldl::parse_text(&read_text(file)?).map_err(|e| invalid("ldl", e))?;
            println!("{}", ldl::serialize(&layout));
        }
        Cmd::Parse { doc } => {
            let (units, visuals) = parse_markdown(&read_text(doc)?);
            write(out, "units.jsonl", units_to_jsonl(&units))?;
            write(out, "visuals.json", serde_json::to_vec_pretty(&visuals).expect("serializable"))?;
        }
        Cmd::Cluster { vectors } => {
            let v: Vec<Vec<f64>> = serde_json::from_slice(&read(vectors)?).map_err(|e| invalid("vectors", e))?;
            let labels = dbscan_cluster(&v, &ClusterConfig::default()).map_err(|e| invalid("cluster", e))?;
            println!("{}", serde_json::to_string(&labels).expect("serializable"));
        }
        Cmd::Generate { concepts, lpg } => {
            let model = lpg.as_deref().map(load_lpg).transpose()?;
            for (i, c) in load_concepts(concepts)?.iter().enumerate() {
                let f = c.features();
                let tokens = match &model {
                    Some(m) => generate_prototype(m, &f, cfg.beam_size, cfg.max_len).0,
                    None => rule_prototype(&f),
                };
                let layout = ldl::parse(&tokens).map_err(|e| runtime("generate", e))?;
                write(out, &slide_file(i, "ldl"), ldl::serialize(&layout) + "\n")?;
            }
        }
        Cmd::Instantiate { layout, concepts, index } => {
            let layout = ldl::parse_text(&read_text(layout)?).map_err(|e| invalid("ldl", e))?;
            let all = load_concepts(concepts)?;
            let concept = index
                .checked_sub(1)
                .and_then(|i| all.get(i))
                .ok_or_else(|| invalid("concepts", format!("no concept number {index}")))?;
            let inst = instantiate(&layout, concept);
            for w in &inst.warnings {
                eprintln!("warning: {w}");
            }
            write(out, &slide_file(index - 1, "sir.json"), inst.draft.to_json())?;
        }
        Cmd::Critique { draft } => {
            print!("{}", full_critique(&load_draft(draft)?, None, &cfg.thresholds).to_json());
        }
        Cmd::Refine { draft } => {
            let r = refine(&load_draft(draft)?, None, &cfg.refinement, &cfg.thresholds);
            write(out, &slide_file(0, "sir.json"), r.draft.to_json())?;
            for (t, c) in r.critiques.iter().enumerate() {
                write(out, &format!("critique_001_t{t}.json"), c.to_json())?;
            }
            write(out, "commands_001.jsonl", commands_to_jsonl(&r.commands))?;
            write(out, "trace.csv", trace_csv(&r.trace, cfg.timings))?;
            println!("{:?}", r.stop);
        }
        Cmd::Render { draft } => {
            let name = draft.file_stem().and_then(|s| s.to_str()).unwrap_or("slide");
            let name = name.strip_suffix(".sir").unwrap_or(name);
            write(out, &format!("{name}.svg"), render_svg(&load_draft(draft)?))?;
        }
        Cmd::Score { deck, model } => {
            let mut model = load_preval(model.as_ref())?;
            model.dim_weights = cfg.dim_weights;
            let mut files: Vec<PathBuf> = fs::read_dir(deck)
                .map_err(|e| runtime("io", e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.to_str().is_some_and(|s| s.ends_with(".sir.json")))
                .collect();
            files.sort();
            let drafts = files.iter().map(|p| load_draft(p)).collect::<Res<Vec<_>>>()?;
            let profile = score_deck(&drafts, &model, &cfg.thresholds).map_err(|e| invalid("score", e))?;
            let name = deck.file_name().and_then(|s| s.to_str()).unwrap_or("deck").to_string();
            write(out, "profile.csv", report_csv(&[(name, profile)]))?;
        }
        Cmd::TrainLpg { pairs, steps, lr } => {
            let data = match pairs {
                Some(p) => prototype::pairs_from_jsonl(&read_text(p)?).map_err(|e| invalid("pairs", e))?,
                None => prototype::rule_corpus(),
            };
            let mut model = LpgModel::default();
            let losses = model.train(&data, *steps, *lr).map_err(|e| runtime("train", e))?;
            write(out, "lpg.json", model.to_json())?;
            println!("objective {} -> {}", losses[0], losses[losses.len() - 1]);
        }
        Cmd::TrainPreval { pairs, steps, lambda_tag } => {
            let data = preval::pairs_from_jsonl(&read_text(pairs)?).map_err(|e| invalid("pairs", e))?;
            let mut tc = TrainConfig::default();
            tc.steps = steps.unwrap_or(tc.steps);
            tc.lambda_tag = lambda_tag.unwrap_or(tc.lambda_tag);
            let mut model = PrevalModel::zeros();
            let losses = preval::train_preference(&mut model, &data, &tc).map_err(|e| runtime("train", e))?;
            let xs: Vec<_> = data.iter().flat_map(|p| [p.features_a, p.features_b]).collect();
            if let Err(e) = model.calibrate(&xs) {
                eprintln!("warning: calibration skipped: {e}");
            }
            write(out, "preval.json", model.to_json())?;
            if let (Some(a), Some(b)) = (losses.first(), losses.last()) {
                println!("objective {a} -> {b}");
            }
        }
        Cmd::Trace { n } => {
            let corpus = corruption_corpus(*n, cfg.seed, &CorruptionConfig::default());
            let rows = quality_cost_trace(&corpus, &cfg.refinement, &cfg.thresholds, cfg.refinement.max_iterations);
            write(out, "quality_cost.csv", quality_cost_csv(&rows, cfg.timings))?;
        }
        Cmd::Pipeline { concepts, doc, lpg, preval } => {
            let doc = match (doc, concepts) {
                (Some(p), _) => Some(read_text(p)?),
                (None, None) => Some(DEMO_MARKDOWN.to_string()),
                (None, Some(_)) => None,
            };
            let concepts = match concepts {
                Some(p) => load_concepts(p)?,
                None => demo_concepts(),
            };
            let lpg = lpg.as_deref().map(load_lpg).transpose()?;
            let scorer = load_preval(preval.as_ref())?;
            let tree = run_pipeline(&concepts, doc.as_deref(), lpg.as_ref(), &scorer, &cfg).map_err(|e| runtime("score", e))?;
            write_tree(&tree, out).map_err(|e| runtime("io", e))?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (code, kind, msg) = match run(&cli) {
        Ok(code) => return ExitCode::from(code as u8),
        Err(Failure::Invalid(k, m)) => (2, k, m),
        Err(Failure::Runtime(k, m)) => (3, k, m),
    };
    if cli.json {
        eprintln!("{}", serde_json::json!({ "error": kind, "message": msg, "exit_code": code }));
    } else {
        eprintln!("error ({kind}): {msg}");
    }
    ExitCode::from(code)
}
