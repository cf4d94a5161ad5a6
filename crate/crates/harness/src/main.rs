use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use quilts_core::interchange::GraphFile;
use quilts_core::record::read_records;
use quilts_core::schedule::{build_schedule_with, ScheduleOptions};
use quilts_core::summary::{summarize, to_csv};
use quilts_core::{render, Depiction, ElementId, Experiment, LayoutBundle, Markers, RenderOptions, TreatmentSpec};
use quilts_harness::replay::replay_record;
use quilts_harness::{api, stimuli, SystemClock, TrialService};

#[derive(Parser)]
#[command(name = "quilts", version, about = "Layered-graph stimuli, layouts and path-finding trials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Exp {
    Exp1,
    Exp2,
}

impl From<Exp> for Experiment {
    fn from(e: Exp) -> Self {
        match e {
            Exp::Exp1 => Experiment::Exp1,
            Exp::Exp2 => Experiment::Exp2,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate stimulus graphs for one treatment or a whole grid.
    Generate {
        #[arg(long, value_enum)]
        experiment: Exp,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory; one `<label>-s<seed>.json` per graph.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, requires_all = ["layers", "links", "skips"])]
        nodes: Option<usize>,
        #[arg(long)]
        layers: Option<usize>,
        /// Proper-link density, e.g. 0.25.
        #[arg(long)]
        links: Option<f64>,
        /// Skip-link density relative to proper links.
        #[arg(long)]
        skips: Option<f64>,
    },
    /// Lay out a graph file as a layout bundle.
    Layout {
        #[arg(long)]
        graph: PathBuf,
        /// quilt-color, quilt-mixed, quilt-text, matrix or node-link.
        #[arg(long)]
        depiction: Depiction,
        /// Display settings to use; defaults to the graph's own experiment, else exp2.
        #[arg(long, value_enum)]
        experiment: Option<Exp>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a layout bundle to SVG.
    Render {
        #[arg(long)]
        bundle: PathBuf,
        /// Comma-separated element ids to draw in red, e.g. n3,l3-7.
        #[arg(long, value_delimiter = ',')]
        highlight: Vec<ElementId>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a counterbalanced trial schedule.
    Schedule {
        #[arg(long, value_enum)]
        experiment: Exp,
        #[arg(long)]
        participants: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Practice trials before each depiction block.
        #[arg(long, default_value_t = 0)]
        practice: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP trial service.
    Serve {
        #[arg(long, value_enum)]
        experiment: Exp,
        #[arg(long)]
        participants: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        practice: usize,
        #[arg(long, env = "QUILTS_BIND", default_value = "127.0.0.1:8080")]
        bind: String,
        /// Directory for `trials.jsonl`.
        #[arg(long, env = "QUILTS_DATA_DIR", default_value = "data")]
        data_dir: PathBuf,
    },
    /// Re-run logged click scripts and compare verdicts.
    Replay {
        #[arg(long)]
        log: PathBuf,
    },
    /// Per-condition means and standard errors as CSV.
    Summarize {
        #[arg(long, required = true, num_args = 1..)]
        log: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_out(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_to_string(p: &Path) -> Result<String> {
    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))
}

fn generate(experiment: Experiment, seed: u64, out: &Path, single: Option<TreatmentSpec>) -> Result<()> {
    fs::create_dir_all(out)?;
    let specs = match single {
        Some(s) => vec![s],
        None => experiment.treatments(),
    };
    for spec in specs {
        let stim = stimuli::stimulus(&spec, seed).with_context(|| spec.label())?;
        let path = out.join(format!("{}-s{seed}.json", spec.label()));
        fs::write(&path, GraphFile::from_stimulus(&stim).to_json())?;
        println!("{}\tattempts={}\t{}", spec.label(), stim.attempts, path.display());
    }
    Ok(())
}

fn layout(graph: &Path, depiction: Depiction, experiment: Option<Exp>, out: Option<&Path>) -> Result<()> {
    let file = GraphFile::from_json(&read_to_string(graph)?)?;
    let g = file.to_graph()?;
    let experiment = experiment
        .map(Experiment::from)
        .or(file.spec.map(|s| s.experiment))
        .unwrap_or(Experiment::Exp2);
    let markers = match (file.source, file.destination) {
        (Some(source), Some(destination)) => Some(Markers { source, destination }),
        _ => None,
    };
    let bundle = stimuli::bundle_for(&g, depiction, experiment, markers)?;
    write_out(out, &bundle.to_json())
}

fn render_bundle(bundle: &Path, highlight: Vec<ElementId>, out: Option<&Path>) -> Result<()> {
    let bundle: LayoutBundle = serde_json::from_str(&read_to_string(bundle)?)?;
    let opts = RenderOptions {
        highlight: highlight.into_iter().collect::<BTreeSet<_>>(),
        ..RenderOptions::default()
    };
    write_out(out, &render(&bundle, &opts)?)
}

fn replay(log: &Path) -> Result<()> {
    let records = read_records(BufReader::new(fs::File::open(log)?))?;
    let mut bad = 0;
    for r in &records {
        let report = replay_record(r)?;
        let verdict = if report.ok() { "ok" } else { "MISMATCH" };
        if !report.ok() {
            bad += 1;
        }
        println!("{}\t{:?}\t{}\t{}", report.trial_id, report.outcome, serde_json::to_string(&report.replayed)?, verdict);
    }
    if bad > 0 {
        bail!("{bad} of {} trials did not replay to their logged verdicts", records.len());
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate {
            experiment,
            seed,
            out,
            nodes,
            layers,
            links,
            skips,
        } => {
            let experiment = Experiment::from(experiment);
            let single = match (nodes, layers, links, skips) {
                (Some(nodes), Some(layers), Some(link_density), Some(skip_density)) => Some(TreatmentSpec {
                    nodes,
                    layers,
                    link_density,
                    skip_density,
                    experiment,
                }),
                (None, None, None, None) => None,
                _ => bail!("--nodes, --layers, --links and --skips go together"),
            };
            generate(experiment, seed, &out, single)
        }
        Command::Layout {
            graph,
            depiction,
            experiment,
            out,
        } => layout(&graph, depiction, experiment, out.as_deref()),
        Command::Render { bundle, highlight, out } => render_bundle(&bundle, highlight, out.as_deref()),
        Command::Schedule {
            experiment,
            participants,
            seed,
            practice,
            out,
        } => {
            let opts = ScheduleOptions {
                practice_per_block: practice,
            };
            let s = build_schedule_with(experiment.into(), participants, seed, &opts)?;
            write_out(out.as_deref(), &(serde_json::to_string_pretty(&s)? + "\n"))
        }
        Command::Serve {
            experiment,
            participants,
            seed,
            practice,
            bind,
            data_dir,
        } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
                )
                .init();
            let opts = ScheduleOptions {
                practice_per_block: practice,
            };
            let schedule = build_schedule_with(experiment.into(), participants, seed, &opts)?;
            fs::create_dir_all(&data_dir)?;
            let log = data_dir.join("trials.jsonl");
            let service = TrialService::new(schedule, Arc::new(SystemClock::new())).with_log(&log)?;
            tracing::info!("logging to {}", log.display());
            tokio::runtime::Runtime::new()?.block_on(api::serve(Arc::new(service), &bind))
        }
        Command::Replay { log } => replay(&log),
        Command::Summarize { log, out } => {
            let mut records = Vec::new();
            for p in &log {
                records.extend(read_records(BufReader::new(fs::File::open(p)?))?);
            }
            let rows = summarize(&records)?;
            write_out(out.as_deref(), &to_csv(&rows))
        }
    }
}
