//! One JSON file describing a full run: construction, simulation over a seed
//! list, and live attacks against chosen owners.
//!
//! ```json
//! {
//!   "construction": { "name": "td", "params": [3, 3] },
//!   "protocol": "upir1",
//!   "steps": 500,
//!   "seeds": [1, 2, 3],
//!   "attack_targets": [4],
//!   "out_dir": "runs/td33"
//! }
//! ```

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use upir_core::adversary::{attack_campaign, confusion_certificate, LiveAttackOptions};
use upir_core::cfg_format;
use upir_core::par::Strategy;
use upir_core::sim::{ProtocolKind, QueryModel};
use upir_core::{Configuration, VERSION};

use crate::construct::{self, Name};
use crate::io::{self, invalid, SelfSubmission};
use crate::{analyze, attack, simulate};

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Experiment description (JSON).
    pub spec: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionSpec {
    pub name: String,
    #[serde(default)]
    pub params: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SelfSubmissionSpec {
    Fixed(f64),
    Named(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    /// Exactly one of `construction` and `cfg`.
    #[serde(default)]
    pub construction: Option<ConstructionSpec>,
    #[serde(default)]
    pub cfg: Option<PathBuf>,
    pub protocol: ProtocolKind,
    #[serde(default)]
    pub self_submission: Option<SelfSubmissionSpec>,
    #[serde(default)]
    pub model: Option<QueryModel>,
    pub steps: u64,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub attack_targets: Vec<usize>,
    #[serde(default = "default_attack_steps")]
    pub max_attack_steps: u64,
    pub out_dir: PathBuf,
}

fn default_attack_steps() -> u64 {
    500
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    version: &'static str,
    spec: &'a ExperimentSpec,
    self_submission: Option<f64>,
    confusion_certificate: usize,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| invalid(format!("experiment spec: {e}")))?;
        if spec.seeds.is_empty() {
            return Err(invalid("experiment spec: seed list is empty"));
        }
        if spec.steps == 0 {
            return Err(invalid("experiment spec: steps must be at least 1"));
        }
        Ok(spec)
    }

    fn configuration(&self) -> Result<Configuration> {
        match (&self.construction, &self.cfg) {
            (Some(c), None) => {
                let name = Name::from_str(&c.name, true).map_err(|_| invalid(format!("unknown construction {:?}", c.name)))?;
                Ok(construct::build(name, &c.params, io::limits_from_env()?)?.0)
            }
            (None, Some(path)) => io::load_config(path),
            _ => Err(invalid("experiment spec: give exactly one of `construction` and `cfg`")),
        }
    }

    fn self_submission(&self) -> Result<Option<SelfSubmission>> {
        Ok(match &self.self_submission {
            None => None,
            Some(SelfSubmissionSpec::Fixed(x)) => Some(SelfSubmission::Fixed(*x)),
            Some(SelfSubmissionSpec::Named(s)) => Some(s.parse().map_err(invalid)?),
        })
    }
}

pub fn run(args: Args) -> Result<()> {
    let text = fs::read_to_string(&args.spec).with_context(|| format!("reading {}", args.spec.display()))?;
    let spec = ExperimentSpec::from_json(&text)?;
    let config = spec.configuration()?;
    let protocol = io::protocol(&config, spec.protocol, spec.self_submission()?)?;
    let model = match &spec.model {
        Some(m) => {
            m.validate()?;
            m.clone()
        }
        None => io::default_model(),
    };
    for &owner in &spec.attack_targets {
        config.check_point(owner)?;
    }
    let dir = io::create_dir(&spec.out_dir)?;

    io::emit(Some(&dir.join("config.cfg")), cfg_format::emit(config.structure()).as_bytes())?;
    let mut analysis = serde_json::to_vec_pretty(&analyze::analyze(&config))?;
    analysis.push(b'\n');
    io::emit(Some(&dir.join("analysis.json")), &analysis)?;

    let mut summary: Option<Vec<u8>> = None;
    for &seed in &spec.seeds {
        let trace = simulate::simulate(&config, protocol, &model, spec.steps, seed)?;
        io::emit(Some(&simulate::trace_path(&dir, seed)), trace.to_jsonl().as_bytes())?;
        let csv = simulate::summary_csv(&trace, Some(seed))?;
        match &mut summary {
            None => summary = Some(csv),
            Some(acc) => {
                let body = csv.iter().position(|&b| b == b'\n').map_or(0, |n| n + 1);
                acc.extend_from_slice(&csv[body..]);
            }
        }
    }
    io::emit(Some(&dir.join("summary.csv")), &summary.unwrap_or_default())?;

    let mut attacks = String::from("owner,seed,steps_used,terminal_confusion,identified\n");
    for &owner in &spec.attack_targets {
        let runs = attack_campaign(
            &config,
            protocol,
            owner,
            spec.max_attack_steps,
            &spec.seeds,
            &LiveAttackOptions::default(),
            Strategy::Parallel,
        )?;
        for live in &runs {
            let name = format!("trajectory-owner{owner}-seed{}.csv", live.seed);
            io::emit(Some(&dir.join(name)), &attack::trajectory_csv(live)?)?;
            attacks.push_str(&format!(
                "{owner},{},{},{},{}\n",
                live.seed,
                live.steps_used,
                live.terminal_confusion(),
                live.report.candidate_set == BTreeSet::from([owner])
            ));
        }
    }
    if !spec.attack_targets.is_empty() {
        io::emit(Some(&dir.join("attacks.csv")), attacks.as_bytes())?;
    }

    let manifest = Manifest {
        version: VERSION,
        spec: &spec,
        self_submission: protocol.self_submission(),
        confusion_certificate: confusion_certificate(&config, spec.protocol),
    };
    let mut json = serde_json::to_vec_pretty(&manifest)?;
    json.push(b'\n');
    io::emit(Some(&dir.join("manifest.json")), &json)
}
