use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use symbreak_core::graphdemo::{self, c4_vector, compare, run_corpus, CorpusConfig, GraphRecord, SmallGraph};
use symbreak_core::groups::make_symmetric;
use symbreak_core::ising::{phase_diagram as tabulate, write_phase_csv, PhaseGrid};
use symbreak_core::toynet::{evaluate, test_grid, train, training_corpus, TrainConfig};
use symbreak_core::{rng, Error};

use crate::verify::{run_battery, VerifyOptions};
use crate::{Cli, Failure, GraphArgs, PhaseArgs, TrainArgs, VerifyArgs};

/// Echo of one invocation, written next to its outputs.
#[derive(Serialize)]
pub struct RunConfig<'a, P: Serialize> {
    pub command: &'a str,
    pub seed: u64,
    pub out: String,
    pub params: &'a P,
}

/// Side of the square evaluation grid over the training distribution's box.
pub const TEST_GRID: usize = 8;

fn write_config<P: Serialize>(cli: &Cli, command: &str, params: &P) -> Result<(), Failure> {
    let config = RunConfig { command, seed: cli.seed, out: cli.out.display().to_string(), params };
    let mut text = serde_json::to_string_pretty(&config).expect("configs serialize");
    text.push('\n');
    std::fs::write(cli.out.join(format!("{command}.config.json")), text)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path)?))
}

fn json_line(out: &mut impl Write, value: &impl Serialize) -> Result<(), Failure> {
    serde_json::to_writer(&mut *out, value).map_err(|e| Failure::Io(e.into()))?;
    out.write_all(b"\n")?;
    Ok(())
}

fn usage(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn verify(cli: &Cli, args: &VerifyArgs) -> Result<String, Failure> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(Failure::Usage(format!("--alpha must lie in (0, 1), got {}", args.alpha)));
    }
    if args.samples < 100 {
        return Err(Failure::Usage(format!("--samples must be at least 100, got {}", args.samples)));
    }
    let opts = VerifyOptions {
        seed: cli.seed,
        samples: args.samples,
        alpha: args.alpha,
        break_kernel: args.break_kernel,
        train: !args.no_train,
    };
    write_config(cli, "verify", args)?;
    let report = run_battery(&opts).map_err(|e| Failure::Check(e.to_string()))?;
    let mut out = create(&cli.out.join("verify.jsonl"))?;
    report.write_jsonl(&mut out)?;
    out.flush()?;
    let failed: Vec<&str> = report.records.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    let summary = format!("{} checks, {} failed", report.records.len(), failed.len());
    if failed.is_empty() {
        Ok(summary)
    } else {
        Err(Failure::Check(format!("{summary}: {}", failed.join(", "))))
    }
}

pub fn phase_diagram(cli: &Cli, args: &PhaseArgs) -> Result<String, Failure> {
    let grid = PhaseGrid {
        side: args.l,
        jx: args.jx,
        jy_range: (args.jy_range.lo, args.jy_range.hi),
        h_range: (args.h_range.lo, args.h_range.hi),
        jy_steps: args.resolution.jy,
        h_steps: args.resolution.h,
    };
    let records = tabulate(&grid).map_err(usage)?;
    write_config(cli, "phase-diagram", args)?;
    let mut out = create(&cli.out.join("phase_diagram.csv"))?;
    write_phase_csv(&records, &mut out)?;
    out.flush()?;
    Ok(format!("{} grid points", records.len()))
}

#[derive(Debug, Serialize)]
pub struct TrainResults {
    pub variant: String,
    pub id_energy: f64,
    pub id_stderr: f64,
    pub ood_energy: f64,
    pub ood_stderr: f64,
    pub final_loss: f64,
    pub epochs: usize,
    pub seed: u64,
}

pub fn ising_train(cli: &Cli, args: &TrainArgs) -> Result<String, Failure> {
    if args.count == 0 {
        return Err(Failure::Usage("--count must be positive".into()));
    }
    if args.samples == 0 {
        return Err(Failure::Usage("--samples must be positive".into()));
    }
    let corpus = training_corpus(args.l, args.count, cli.seed).map_err(usage)?;
    let grid = test_grid(args.l, TEST_GRID).map_err(usage)?;
    let config = TrainConfig { variant: args.variant, side: args.l, epochs: args.epochs, seed: cli.seed, ..TrainConfig::default() };
    write_config(cli, "ising-train", args)?;
    let state = train(&config, &corpus).map_err(|e| match e {
        Error::Diverged { .. } => Failure::Check(e.to_string()),
        other => usage(other),
    })?;
    let eval_seed = |k: u64| rng::stream(cli.seed, k);
    let id = evaluate(&state.model, &grid, false, args.samples, seed_of(eval_seed(1))).map_err(|e| Failure::Check(e.to_string()))?;
    let ood = evaluate(&state.model, &grid, true, args.samples, seed_of(eval_seed(2))).map_err(|e| Failure::Check(e.to_string()))?;

    let variant = args.variant.to_string();
    let mut curve = create(&cli.out.join(format!("curve_{variant}.csv")))?;
    writeln!(curve, "epoch,loss")?;
    for (epoch, loss) in state.loss_history.iter().enumerate() {
        writeln!(curve, "{epoch},{loss}")?;
    }
    curve.flush()?;

    let results = TrainResults {
        variant: variant.clone(),
        id_energy: id.mean,
        id_stderr: id.stderr,
        ood_energy: ood.mean,
        ood_stderr: ood.stderr,
        final_loss: state.loss_history.last().copied().unwrap_or(f64::NAN),
        epochs: args.epochs,
        seed: cli.seed,
    };
    let mut text = serde_json::to_string_pretty(&results).expect("results serialize");
    text.push('\n');
    std::fs::write(cli.out.join(format!("ising_{variant}.json")), text)?;
    Ok(format!("{variant}: ID {:.4}, OOD {:.4}", id.mean, ood.mean))
}

fn seed_of(mut rng: symbreak_core::Rng) -> u64 {
    use rand::Rng as _;
    rng.random()
}

#[derive(Serialize)]
struct GraphSummary {
    count: usize,
    mean_err_equivariant: f64,
    mean_err_sympe: f64,
}

pub fn graph_demo(cli: &Cli, args: &GraphArgs) -> Result<String, Failure> {
    if args.n == 0 || args.n > graphdemo::MAX_NODES {
        return Err(Failure::Usage(format!("--n must be in 1..={}, got {}", graphdemo::MAX_NODES, args.n)));
    }
    if !(0.0..=1.0).contains(&args.p) {
        return Err(Failure::Usage(format!("--p must lie in [0, 1], got {}", args.p)));
    }
    let records: Vec<GraphRecord> = match args.fixture.as_deref() {
        Some("c4") => {
            let sym = std::sync::Arc::new(make_symmetric(4).map_err(usage)?);
            vec![compare(&SmallGraph::cycle(4).map_err(usage)?, &sym, 2, &c4_vector(), &mut rng::seeded(cli.seed)).map_err(usage)?]
        }
        Some(other) => return Err(Failure::Usage(format!("unknown fixture {other:?} (c4)"))),
        None => run_corpus(&CorpusConfig { count: args.count, n: args.n, p: args.p, seed: cli.seed, ..CorpusConfig::default() })
            .map_err(usage)?,
    };
    write_config(cli, "graph-demo", args)?;
    let mut out = create(&cli.out.join("graph_demo.jsonl"))?;
    for r in &records {
        json_line(&mut out, r)?;
    }
    if !records.is_empty() {
        let n = records.len() as f64;
        let summary = GraphSummary {
            count: records.len(),
            mean_err_equivariant: records.iter().map(|r| r.err_equivariant).sum::<f64>() / n,
            mean_err_sympe: records.iter().map(|r| r.err_sympe).sum::<f64>() / n,
        };
        json_line(&mut out, &serde_json::json!({ "summary": summary }))?;
    }
    out.flush()?;
    Ok(format!("{} graphs", records.len()))
}
