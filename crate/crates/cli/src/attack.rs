use std::collections::BTreeSet;
use std::fs;
use std::ops::Range;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;
use upir_core::adversary::{
    attack_campaign, attack_until_identified_with, intersection_attack_observed_by, mode_for,
    AttackReport, LiveAttack, LiveAttackOptions, Observer,
};
use upir_core::anonymity::Mode;
use upir_core::par::Strategy;
use upir_core::report::write_trajectory_csv;
use upir_core::sim::{ProtocolKind, QueryId, SimulationTrace};
use upir_core::VERSION;

use crate::io::{self, invalid, SelfSubmission};

#[derive(Debug, clap::Args)]
pub struct Args {
    #[arg(long)]
    pub cfg: PathBuf,
    /// Run the protocol and attack it as it goes, printing the shrink trajectory.
    #[arg(long)]
    pub live: bool,

    /// Recorded trace (JSON lines) to attack.
    #[arg(long, required_unless_present = "live", conflicts_with = "live")]
    pub trace: Option<PathBuf>,
    /// Query id to link.
    #[arg(long, required_unless_present = "live", conflicts_with = "live")]
    pub query: Option<u64>,
    /// Defaults to the mode matching the trace's protocol.
    #[arg(long)]
    pub mode: Option<Mode>,

    #[arg(long, required_if_eq("live", "true"))]
    pub protocol: Option<ProtocolKind>,
    #[arg(long)]
    pub self_submission: Option<SelfSubmission>,
    #[arg(long, required_if_eq("live", "true"))]
    pub owner: Option<usize>,
    #[arg(long, default_value_t = 500)]
    pub max_steps: u64,
    #[arg(long, conflicts_with = "seeds")]
    pub seed: Option<u64>,
    /// Seed range `a..b` or `a..=b` for a campaign; needs --out-dir.
    #[arg(long, value_parser = io::parse_seed_range, requires = "out_dir")]
    pub seeds: Option<Range<u64>>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Steps without progress before the attacker gives up.
    #[arg(long)]
    pub patience: Option<u64>,
    /// Background query probability of every other user.
    #[arg(long, default_value_t = 0.0)]
    pub background: f64,
    /// Restrict observations to forwards by these users (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub colluders: Option<Vec<usize>>,
    /// Also write the final report (JSON) of a single live attack here.
    #[arg(long)]
    pub report: Option<PathBuf>,

    #[arg(short, long, conflicts_with = "seeds")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct OfflineOutput<'a> {
    version: &'static str,
    seed: u64,
    report: &'a AttackReport,
}

#[derive(Debug, Serialize)]
struct LiveOutput<'a> {
    version: &'static str,
    seed: u64,
    steps_used: u64,
    full_neighborhood_observed: bool,
    report: &'a AttackReport,
}

fn live_json(live: &LiveAttack) -> Result<Vec<u8>> {
    let mut json = serde_json::to_vec_pretty(&LiveOutput {
        version: VERSION,
        seed: live.seed,
        steps_used: live.steps_used,
        full_neighborhood_observed: live.full_neighborhood_observed,
        report: &live.report,
    })?;
    json.push(b'\n');
    Ok(json)
}

pub fn trajectory_csv(live: &LiveAttack) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_trajectory_csv(&mut out, &live.trajectory)?;
    Ok(out)
}

fn observer(colluders: Option<Vec<usize>>) -> Observer {
    match colluders {
        Some(list) => Observer::Colluding(list.into_iter().collect::<BTreeSet<_>>()),
        None => Observer::Server,
    }
}

pub fn run(args: Args) -> Result<()> {
    let config = io::load_config(&args.cfg)?;
    if !args.live {
        let (Some(trace_path), Some(query)) = (args.trace, args.query) else {
            return Err(invalid("--trace and --query are required without --live"));
        };
        let text = fs::read_to_string(&trace_path).with_context(|| format!("reading {}", trace_path.display()))?;
        let trace = SimulationTrace::from_jsonl(&text).with_context(|| format!("{}", trace_path.display()))?;
        if trace.params.point_count != config.point_count() || trace.params.line_count != config.line_count() {
            return Err(invalid(format!(
                "trace was recorded on {} points and {} lines, configuration has {} and {}",
                trace.params.point_count,
                trace.params.line_count,
                config.point_count(),
                config.line_count()
            )));
        }
        let mode = match (args.mode, trace.params.protocol) {
            (Some(mode), _) => mode,
            (None, Some(kind)) => mode_for(kind),
            (None, None) => return Err(invalid("--mode is required for traces without a protocol")),
        };
        let report = intersection_attack_observed_by(&config, &trace, QueryId(query), mode, &observer(args.colluders))?;
        let mut json = serde_json::to_vec_pretty(&OfflineOutput { version: VERSION, seed: trace.params.seed, report: &report })?;
        json.push(b'\n');
        return io::emit(args.output.as_deref(), &json);
    }

    let (Some(kind), Some(owner)) = (args.protocol, args.owner) else {
        return Err(invalid("--live needs --protocol and --owner"));
    };
    let protocol = io::protocol(&config, kind, args.self_submission)?;
    if args.mode.is_some_and(|m| m != mode_for(kind)) {
        return Err(invalid("--mode must match the protocol for live attacks"));
    }
    if !(0.0..=1.0).contains(&args.background) {
        return Err(invalid("--background must lie in [0, 1]"));
    }
    let options = LiveAttackOptions { patience: args.patience, background: args.background, observer: observer(args.colluders) };

    if let Some(seeds) = args.seeds {
        let dir = io::create_dir(args.out_dir.as_deref().expect("clap requires --out-dir"))?;
        let seeds: Vec<u64> = seeds.collect();
        let runs = attack_campaign(&config, protocol, owner, args.max_steps, &seeds, &options, Strategy::Parallel)?;
        let mut summary = csv_header();
        for live in &runs {
            io::emit(Some(&dir.join(format!("trajectory-seed{}.csv", live.seed))), &trajectory_csv(live)?)?;
            io::emit(Some(&dir.join(format!("report-seed{}.json", live.seed))), &live_json(live)?)?;
            summary.push_str(&format!(
                "{},{},{},{}\n",
                live.seed,
                live.steps_used,
                live.terminal_confusion(),
                live.report.candidate_set == BTreeSet::from([owner])
            ));
        }
        return io::emit(Some(&dir.join("campaign.csv")), summary.as_bytes());
    }

    let seed = args.seed.unwrap_or(0);
    let live = attack_until_identified_with(&config, protocol, owner, args.max_steps, seed, &options)?;
    if let Some(path) = &args.report {
        io::emit(Some(path), &live_json(&live)?)?;
    }
    io::emit(args.output.as_deref(), &trajectory_csv(&live)?)
}

fn csv_header() -> String {
    "seed,steps_used,terminal_confusion,identified\n".to_owned()
}
