use std::path::PathBuf;

use anyhow::Result;
use serde::Serialize;
use upir_core::anonymity::{
    anonymity_partition, check_characterization, is_transversal_design, is_triangle_free,
    pentagonal_report, AnonymityPartition, CharacterizationReport, Mode, PentagonalReport,
};
use upir_core::{Configuration, VERSION};

use crate::io;

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Configuration in cfg format.
    pub cfg: PathBuf,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct PartitionView {
    pub level: usize,
    pub parts: Vec<Vec<usize>>,
}

impl From<AnonymityPartition> for PartitionView {
    fn from(p: AnonymityPartition) -> Self {
        Self { level: p.level, parts: p.parts }
    }
}

#[derive(Debug, Serialize)]
pub struct TransversalView {
    pub is_transversal_design: bool,
    pub groups: Option<Vec<Vec<usize>>>,
}

#[derive(Debug, Serialize)]
pub struct Analysis {
    pub version: &'static str,
    pub v: usize,
    pub b: usize,
    pub r: usize,
    pub k: usize,
    pub deficiency: usize,
    pub open: PartitionView,
    pub closed: PartitionView,
    pub triangle_free: bool,
    pub pentagonal: PentagonalReport,
    pub transversal: TransversalView,
    /// Present only when the open level is at least two.
    pub characterization: Option<CharacterizationReport>,
}

pub fn analyze(config: &Configuration) -> Analysis {
    let open = anonymity_partition(config, Mode::Open);
    let characterization = (open.level >= 2).then(|| check_characterization(config).ok()).flatten();
    let td = is_transversal_design(config);
    Analysis {
        version: VERSION,
        v: config.point_count(),
        b: config.line_count(),
        r: config.r(),
        k: config.k(),
        deficiency: config.deficiency(),
        open: open.into(),
        closed: anonymity_partition(config, Mode::Closed).into(),
        triangle_free: is_triangle_free(config),
        pentagonal: pentagonal_report(config),
        transversal: TransversalView {
            is_transversal_design: td.is_some(),
            groups: td.map(|gc| gc.groups().to_vec()),
        },
        characterization,
    }
}

pub fn run(args: Args) -> Result<()> {
    let config = io::load_config(&args.cfg)?;
    let mut json = serde_json::to_vec_pretty(&analyze(&config))?;
    json.push(b'\n');
    io::emit(args.output.as_deref(), &json)
}
