use std::ops::Range;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use upir_core::par::{self, Strategy};
use upir_core::report::write_proxy_summary_csv;
use upir_core::sim::{init_community, proxy_summary, run as run_sim, Protocol, ProtocolKind, QueryModel, SimulationTrace};
use upir_core::Configuration;

use crate::io::{self, invalid, SelfSubmission};

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long)]
    pub cfg: PathBuf,
    #[arg(long)]
    pub protocol: ProtocolKind,
    /// `auto` (1/(r(k-1)+1)) or an explicit probability; upir2 only.
    #[arg(long)]
    pub self_submission: Option<SelfSubmission>,
    #[arg(long)]
    pub steps: u64,
    #[arg(long, conflicts_with = "seeds", required_unless_present = "seeds")]
    pub seed: Option<u64>,
    /// Seed range `a..b` or `a..=b`; one output per seed in --out-dir.
    #[arg(long, value_parser = io::parse_seed_range, requires = "out_dir")]
    pub seeds: Option<Range<u64>>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Query model as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub model: Option<String>,
    /// Emit per-owner proxy counts as CSV instead of the trace.
    #[arg(long)]
    pub summary: bool,
    #[arg(short, long, conflicts_with = "seeds")]
    pub output: Option<PathBuf>,
}

pub fn simulate(config: &Configuration, protocol: Protocol, model: &QueryModel, steps: u64, seed: u64) -> Result<SimulationTrace> {
    let community = init_community(config, model.clone(), seed)?;
    Ok(run_sim(community, protocol, steps)?)
}

pub fn summary_csv(trace: &SimulationTrace, seed: Option<u64>) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_proxy_summary_csv(&mut out, &proxy_summary(trace), seed)?;
    Ok(out)
}

pub fn trace_path(dir: &Path, seed: u64) -> PathBuf {
    dir.join(format!("trace-seed{seed}.jsonl"))
}

pub fn run(args: Args) -> Result<()> {
    let config = io::load_config(&args.cfg)?;
    let protocol = io::protocol(&config, args.protocol, args.self_submission)?;
    let model = io::load_model(args.model.as_deref())?;
    if args.steps == 0 {
        return Err(invalid("--steps must be at least 1"));
    }

    if let Some(seed) = args.seed {
        let trace = simulate(&config, protocol, &model, args.steps, seed)?;
        let bytes = if args.summary { summary_csv(&trace, None)? } else { trace.to_jsonl().into_bytes() };
        return io::emit(args.output.as_deref(), &bytes);
    }

    let (Some(seeds), Some(dir)) = (args.seeds, args.out_dir) else {
        return Err(invalid("either --seed or --seeds with --out-dir is required"));
    };
    let dir = io::create_dir(&dir)?;
    let seeds: Vec<u64> = seeds.collect();
    // trials run concurrently and write their own files; merging is sequential
    let results = par::map_slice(&seeds, Strategy::Parallel, |&seed| -> Result<Vec<u8>> {
        let trace = simulate(&config, protocol, &model, args.steps, seed)?;
        io::emit(Some(&trace_path(&dir, seed)), trace.to_jsonl().as_bytes())?;
        summary_csv(&trace, Some(seed))
    });
    let mut merged = Vec::new();
    for (i, (seed, csv)) in seeds.iter().zip(results).enumerate() {
        let csv = csv.with_context(|| format!("seed {seed}"))?;
        // keep the header of the first file only
        let body = if i == 0 { &csv[..] } else { &csv[csv.iter().position(|&b| b == b'\n').map_or(0, |n| n + 1)..] };
        merged.extend_from_slice(body);
    }
    if args.summary {
        io::emit(Some(&dir.join("summary.csv")), &merged)?;
    }
    Ok(())
}
