//! Shared plumbing: loading inputs, writing outputs, seed ranges, exit codes.

use std::fs;
use std::io::Write;
use std::ops::Range;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use upir_core::constructions::{Limits, DEFAULT_MAX_POINTS};
use upir_core::sim::{calibrated_self_submission, Protocol, ProtocolKind, QueryModel};
use upir_core::{as_configuration, cfg_format, Configuration};

/// Bad input detected by the CLI itself rather than by the library.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Invalid(pub String);

pub fn invalid(msg: impl Into<String>) -> anyhow::Error {
    Invalid(msg.into()).into()
}

pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Invalid>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<upir_core::Error>() {
            return if e.is_validation() { 2 } else { 3 };
        }
    }
    3
}

pub fn load_config(path: &Path) -> Result<Configuration> {
    let structure = cfg_format::read_file(path).with_context(|| format!("reading {}", path.display()))?;
    as_configuration(structure).with_context(|| format!("{} is not usable", path.display()))
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

pub fn create_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir.to_path_buf())
}

pub fn limits_from_env() -> Result<Limits> {
    match std::env::var("UPIR_LAB_MAX_POINTS") {
        Ok(raw) => {
            let max_points = raw
                .trim()
                .parse()
                .map_err(|_| invalid(format!("UPIR_LAB_MAX_POINTS must be a positive integer (got {raw:?})")))?;
            Ok(Limits { max_points })
        }
        Err(_) => Ok(Limits { max_points: DEFAULT_MAX_POINTS }),
    }
}

/// `a..b` (half-open) or `a..=b` (inclusive).
pub fn parse_seed_range(s: &str) -> Result<Range<u64>, String> {
    let (lo, hi, inclusive) = if let Some((lo, hi)) = s.split_once("..=") {
        (lo, hi, true)
    } else if let Some((lo, hi)) = s.split_once("..") {
        (lo, hi, false)
    } else {
        return Err(format!("expected a..b or a..=b, got {s:?}"));
    };
    let lo: u64 = lo.parse().map_err(|_| format!("bad range start {lo:?}"))?;
    let hi: u64 = hi.parse().map_err(|_| format!("bad range end {hi:?}"))?;
    let end = if inclusive { hi.checked_add(1).ok_or("range end too large")? } else { hi };
    if end <= lo {
        return Err(format!("empty seed range {s:?}"));
    }
    Ok(lo..end)
}

/// `auto` or an explicit probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SelfSubmission {
    Auto,
    Fixed(f64),
}

impl std::str::FromStr for SelfSubmission {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Self::Auto);
        }
        s.parse::<f64>()
            .map(Self::Fixed)
            .map_err(|_| format!("expected `auto` or a probability, got {s:?}"))
    }
}

pub fn protocol(config: &Configuration, kind: ProtocolKind, x: Option<SelfSubmission>) -> Result<Protocol> {
    let protocol = match (kind, x) {
        (ProtocolKind::Upir1, None) => Protocol::Upir1,
        (ProtocolKind::Upir1, Some(_)) => return Err(invalid("--self-submission only applies to upir2")),
        (ProtocolKind::Upir2, None | Some(SelfSubmission::Auto)) => {
            Protocol::Upir2 { self_submission: calibrated_self_submission(config) }
        }
        (ProtocolKind::Upir2, Some(SelfSubmission::Fixed(x))) => Protocol::Upir2 { self_submission: x },
    };
    protocol.validate()?;
    Ok(protocol)
}

/// Inline JSON (starting with `{`) or a path to a JSON file.
pub fn load_model(arg: Option<&str>) -> Result<QueryModel> {
    let model = match arg {
        None => return Ok(default_model()),
        Some(text) if text.trim_start().starts_with('{') => QueryModel::from_json(text)?,
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading model {path}"))?;
            QueryModel::from_json(&text).with_context(|| format!("model {path}"))?
        }
    };
    Ok(model)
}

/// Every user issues a fresh query with probability one half per activation.
pub fn default_model() -> QueryModel {
    QueryModel::uniform(upir_core::sim::UserStream { repeat: 0.0, background: 0.5 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_ranges() {
        assert_eq!(parse_seed_range("0..4"), Ok(0..4));
        assert_eq!(parse_seed_range("3..=5"), Ok(3..6));
        assert!(parse_seed_range("5..5").is_err());
        assert!(parse_seed_range("x..2").is_err());
        assert!(parse_seed_range("7").is_err());
    }

    #[test]
    fn self_submission_values() {
        assert_eq!("auto".parse(), Ok(SelfSubmission::Auto));
        assert_eq!("0.25".parse(), Ok(SelfSubmission::Fixed(0.25)));
        assert!("often".parse::<SelfSubmission>().is_err());
    }

    #[test]
    fn exit_codes_follow_error_kind() {
        let v: anyhow::Error = upir_core::Error::NotPrime(4).into();
        assert_eq!(exit_code(&v), 2);
        let r: anyhow::Error = upir_core::Error::NoData(3).into();
        assert_eq!(exit_code(&r.context("summarizing")), 3);
        assert_eq!(exit_code(&invalid("nope")), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("other")), 3);
    }
}
