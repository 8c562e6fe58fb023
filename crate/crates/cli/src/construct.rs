use std::path::PathBuf;

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;
use upir_core::cfg_format;
use upir_core::constructions::{
    affine_plane_with_limits, cycle, example_36, extend_to_closed_anonymous, fano_plane, pappus,
    pentagon, transversal_design_with_limits, Limits,
};
use upir_core::Configuration;

use crate::io::{self, invalid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Name {
    /// AG(2, q) for prime q: `affine Q`
    Affine,
    /// Transversal design TD(k, n): `td K N`
    Td,
    Fano,
    Pappus,
    /// Cycle graph on v points: `cycle V`
    Cycle,
    Pentagon,
    Example36,
    /// TD(k, n) extended to closed-anonymous: `extend-closed K N`
    ExtendClosed,
}

#[derive(Debug, clap::Args)]
pub struct Args {
    pub name: Name,
    /// Numeric parameters of the construction.
    pub params: Vec<u64>,
    /// Write the cfg here instead of stdout.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Also write groups and parallel classes as JSON.
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Debug, Default, Serialize)]
pub struct Sidecar {
    pub groups: Option<Vec<Vec<usize>>>,
    pub parallel_classes: Option<Vec<Vec<usize>>>,
}

fn arity(name: Name, params: &[u64], expected: usize, usage: &str) -> Result<()> {
    if params.len() != expected {
        return Err(invalid(format!(
            "{} takes {expected} parameter(s): {usage}",
            name.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default()
        )));
    }
    Ok(())
}

fn as_usize(value: u64) -> Result<usize> {
    usize::try_from(value).map_err(|_| invalid(format!("parameter {value} too large")))
}

/// The configuration plus whatever labeling the construction knows about.
pub fn build(name: Name, params: &[u64], limits: Limits) -> Result<(Configuration, Sidecar)> {
    Ok(match name {
        Name::Affine => {
            arity(name, params, 1, "affine Q")?;
            let (config, labeling) = affine_plane_with_limits(params[0], &limits)?;
            (config, Sidecar { groups: None, parallel_classes: Some(labeling.classes) })
        }
        Name::Td => {
            arity(name, params, 2, "td K N")?;
            let td = transversal_design_with_limits(as_usize(params[0])?, params[1], &limits)?;
            let classes = parallel_classes(td.config(), params[1] as usize);
            let (config, groups) = td.into_parts();
            (config, Sidecar { groups: Some(groups), parallel_classes: classes })
        }
        Name::ExtendClosed => {
            arity(name, params, 2, "extend-closed K N")?;
            let td = transversal_design_with_limits(as_usize(params[0])?, params[1], &limits)?;
            let config = extend_to_closed_anonymous(&td)?;
            (config, Sidecar { groups: Some(td.groups().to_vec()), parallel_classes: None })
        }
        Name::Fano => {
            arity(name, params, 0, "fano")?;
            (fano_plane(), Sidecar::default())
        }
        Name::Pappus => {
            arity(name, params, 0, "pappus")?;
            let td = pappus()?;
            let classes = parallel_classes(td.config(), 3);
            let (config, groups) = td.into_parts();
            (config, Sidecar { groups: Some(groups), parallel_classes: classes })
        }
        Name::Cycle => {
            arity(name, params, 1, "cycle V")?;
            let v = as_usize(params[0])?;
            if v as u64 > limits.max_points {
                return Err(upir_core::Error::ResourceLimit { points: v as u64, limit: limits.max_points }.into());
            }
            (cycle(v)?, Sidecar::default())
        }
        Name::Pentagon => {
            arity(name, params, 0, "pentagon")?;
            (pentagon(), Sidecar::default())
        }
        Name::Example36 => {
            arity(name, params, 0, "example36")?;
            (example_36(), Sidecar::default())
        }
    })
}

/// Parallel classes of a transversal design cut from `AG(2, n)`: point
/// `x·n + y` is `(x, y)`, and every line is `y = ax + b` on `x < k`, so lines
/// are classed by their slope `a`, read off from the line's first two points.
fn parallel_classes(config: &Configuration, n: usize) -> Option<Vec<Vec<usize>>> {
    let mut classes = vec![Vec::new(); n];
    for (i, line) in config.lines().iter().enumerate() {
        let ((x1, y1), (x2, y2)) = ((line[0] / n, line[0] % n), (line[1] / n, line[1] % n));
        let a = (0..n).find(|a| (y1 + a * (x2 - x1)) % n == y2)?;
        classes[a].push(i);
    }
    classes.iter().all(|c| config.is_parallel_class(c)).then_some(classes)
}

pub fn run(args: Args) -> Result<()> {
    let limits = io::limits_from_env()?;
    let (config, sidecar) = build(args.name, &args.params, limits)?;
    io::emit(args.output.as_deref(), cfg_format::emit(config.structure()).as_bytes())?;
    if let Some(path) = args.sidecar {
        let mut json = serde_json::to_vec_pretty(&sidecar)?;
        json.push(b'\n');
        io::emit(Some(&path), &json)?;
    }
    Ok(())
}
