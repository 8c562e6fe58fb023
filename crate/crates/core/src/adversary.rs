//! Curious-server attacks on linked (repeated) queries.
//!
//! The server links every copy of a query by its id and intersects the
//! neighborhoods (UPIR 1) or closed neighborhoods (UPIR 2) of the users who
//! forwarded it. What survives is the owner's candidate set.

use serde::{Deserialize, Serialize};

use crate::anonymity::{anonymity_partition, neighborhood_in_mode, structural_anonymity_set, Mode};
use crate::error::{Error, Result};
use crate::incidence::{Configuration, PointSet};
use crate::par::{self, Strategy};
use crate::sim::{Community, Protocol, ProtocolKind, QueryId, QueryModel, SimulationTrace};

/// The attack mode matching a protocol: proxies of UPIR 1 are neighbors of
/// the owner, proxies of UPIR 2 are closed neighbors.
pub fn mode_for(protocol: ProtocolKind) -> Mode {
    match protocol {
        ProtocolKind::Upir1 => Mode::Open,
        ProtocolKind::Upir2 => Mode::Closed,
    }
}

/// Whose view of the server log the adversary has.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Observer {
    /// Everything the server received.
    #[default]
    Server,
    /// Only forwards made by these colluding users.
    Colluding(PointSet),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackReport {
    pub mode: Mode,
    pub target_query_id: QueryId,
    pub observed_proxies: PointSet,
    pub candidate_set: PointSet,
    /// Ground truth from the trace, for evaluation only.
    pub true_owner: Option<usize>,
    pub owner_in_candidates: Option<bool>,
    /// The owner's structural anonymity set, the best the attack can do.
    pub structural_bound: PointSet,
    pub confusion_achieved: usize,
}

/// Intersection of the (closed) neighborhoods of `proxies`; every point when
/// nothing has been observed.
pub fn candidates_from_proxies<'p>(
    config: &Configuration,
    proxies: impl IntoIterator<Item = &'p usize>,
    mode: Mode,
) -> PointSet {
    let mut candidates: PointSet = (0..config.point_count()).collect();
    for &proxy in proxies {
        let nb = neighborhood_in_mode(config, proxy, mode);
        candidates.retain(|q| nb.binary_search(q).is_ok());
    }
    candidates
}

pub fn intersection_attack(
    config: &Configuration,
    trace: &SimulationTrace,
    query_id: QueryId,
    mode: Mode,
) -> Result<AttackReport> {
    intersection_attack_observed_by(config, trace, query_id, mode, &Observer::Server)
}

pub fn intersection_attack_observed_by(
    config: &Configuration,
    trace: &SimulationTrace,
    query_id: QueryId,
    mode: Mode,
    observer: &Observer,
) -> Result<AttackReport> {
    let forwards: Vec<usize> = trace
        .server_log
        .iter()
        .filter(|r| r.query_id == query_id)
        .map(|r| r.proxy)
        .collect();
    if forwards.is_empty() {
        return Err(Error::UnknownQuery(query_id.0));
    }
    for &p in &forwards {
        config.check_point(p)?;
    }
    let observed_proxies: PointSet = forwards
        .into_iter()
        .filter(|p| match observer {
            Observer::Server => true,
            Observer::Colluding(members) => members.contains(p),
        })
        .collect();
    let candidate_set = candidates_from_proxies(config, &observed_proxies, mode);
    let true_owner = trace.owner_of(query_id);
    let structural_bound = match true_owner {
        Some(owner) => structural_anonymity_set(config, owner, mode)?,
        None => PointSet::new(),
    };
    Ok(AttackReport {
        mode,
        target_query_id: query_id,
        owner_in_candidates: true_owner.map(|o| candidate_set.contains(&o)),
        confusion_achieved: candidate_set.len(),
        observed_proxies,
        candidate_set,
        true_owner,
        structural_bound,
    })
}

/// Owner's anonymity set for one unlinked query: the (closed) neighborhood
/// of its proxy.
pub fn single_query_anonymity(config: &Configuration, proxy: usize, mode: Mode) -> Result<PointSet> {
    match mode {
        Mode::Open => config.neighborhood(proxy),
        Mode::Closed => config.closed_neighborhood(proxy),
    }
}

/// Worst-case confusion guaranteed for linked query sequences: the open
/// anonymity level for UPIR 1, the closed one for UPIR 2. One means broken.
pub fn confusion_certificate(config: &Configuration, protocol: ProtocolKind) -> usize {
    anonymity_partition(config, mode_for(protocol)).level
}

fn harmonic(n: usize) -> f64 {
    (1..=n).map(|i| 1.0 / i as f64).sum()
}

/// Ten times the coupon-collector time for observing all `r(k-1)` neighbors.
pub fn default_patience(config: &Configuration) -> u64 {
    let m = config.r() * (config.k() - 1);
    (10.0 * m as f64 * harmonic(m)).ceil() as u64
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiveAttackOptions {
    /// Steps without the candidate set shrinking before giving up;
    /// [`default_patience`] when `None`.
    pub patience: Option<u64>,
    /// Background query probability of every other user.
    pub background: f64,
    pub observer: Observer,
}

impl Default for LiveAttackOptions {
    fn default() -> Self {
        Self { patience: None, background: 0.0, observer: Observer::Server }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    /// 1-based count of observed forwards of the target query.
    pub observation_index: usize,
    pub step: u64,
    pub proxy: usize,
    pub candidate_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiveAttack {
    pub seed: u64,
    pub steps_used: u64,
    pub trajectory: Vec<TrajectoryPoint>,
    pub report: AttackReport,
    /// Whether every possible proxy of the owner was seen.
    pub full_neighborhood_observed: bool,
}

impl LiveAttack {
    pub fn terminal_confusion(&self) -> usize {
        self.report.confusion_achieved
    }
}

pub fn attack_until_identified(
    config: &Configuration,
    protocol: Protocol,
    owner: usize,
    max_steps: u64,
    seed: u64,
) -> Result<LiveAttack> {
    attack_until_identified_with(config, protocol, owner, max_steps, seed, &LiveAttackOptions::default())
}

/// Simulates `owner` reissuing one rare query on every activation while the
/// server intersects after each new forward. Stops once the candidate set has
/// not shrunk for the patience window, or after `max_steps`.
pub fn attack_until_identified_with(
    config: &Configuration,
    protocol: Protocol,
    owner: usize,
    max_steps: u64,
    seed: u64,
    options: &LiveAttackOptions,
) -> Result<LiveAttack> {
    config.check_point(owner)?;
    protocol.validate()?;
    if max_steps == 0 {
        return Err(Error::Parameter("max_steps must be at least 1".into()));
    }
    let mode = mode_for(protocol.kind());
    let patience = options.patience.unwrap_or_else(|| default_patience(config));
    let target = Community::repeated_query_id(owner);
    let model = QueryModel::heavy_repeater(owner, options.background);
    let mut community = Community::new(config, model, seed)?;

    let mut candidates: PointSet = (0..config.point_count()).collect();
    let mut trajectory = Vec::new();
    let mut last_change = 0u64;
    let mut seen = 0usize;
    while community.current_step() < max_steps {
        community.advance_one(protocol);
        let log = &community.trace().server_log;
        for rec in &log[seen..] {
            if rec.query_id != target {
                continue;
            }
            if let Observer::Colluding(members) = &options.observer {
                if !members.contains(&rec.proxy) {
                    continue;
                }
            }
            let before = candidates.len();
            let nb = neighborhood_in_mode(config, rec.proxy, mode);
            candidates.retain(|q| nb.binary_search(q).is_ok());
            if candidates.len() < before {
                last_change = rec.step + 1;
            }
            trajectory.push(TrajectoryPoint {
                observation_index: trajectory.len() + 1,
                step: rec.step,
                proxy: rec.proxy,
                candidate_count: candidates.len(),
            });
        }
        seen = log.len();
        if community.current_step() - last_change >= patience {
            break;
        }
    }

    let steps_used = community.current_step();
    let trace = community.into_trace();
    let report = if trajectory.is_empty() {
        let structural_bound = structural_anonymity_set(config, owner, mode)?;
        AttackReport {
            mode,
            target_query_id: target,
            observed_proxies: PointSet::new(),
            confusion_achieved: candidates.len(),
            owner_in_candidates: Some(true),
            candidate_set: candidates,
            true_owner: Some(owner),
            structural_bound,
        }
    } else {
        intersection_attack_observed_by(config, &trace, target, mode, &options.observer)?
    };
    let possible = neighborhood_in_mode(config, owner, mode);
    let full_neighborhood_observed = possible.iter().all(|p| report.observed_proxies.contains(p));
    Ok(LiveAttack { seed, steps_used, trajectory, report, full_neighborhood_observed })
}

/// Independent live attacks, one per seed, returned in seed order.
pub fn attack_campaign(
    config: &Configuration,
    protocol: Protocol,
    owner: usize,
    max_steps: u64,
    seeds: &[u64],
    options: &LiveAttackOptions,
    strategy: Strategy,
) -> Result<Vec<LiveAttack>> {
    par::map_slice(seeds, strategy, |&seed| {
        attack_until_identified_with(config, protocol, owner, max_steps, seed, options)
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{cycle, example_36, fano_plane};

    #[test]
    fn single_query_sets() {
        let f = fano_plane();
        assert_eq!(single_query_anonymity(&f, 2, Mode::Open).unwrap().len(), 6);
        assert_eq!(single_query_anonymity(&example_36(), 0, Mode::Open).unwrap().len(), 12);
        assert_eq!(single_query_anonymity(&cycle(4).unwrap(), 1, Mode::Closed).unwrap().len(), 3);
        assert!(single_query_anonymity(&f, 7, Mode::Open).is_err());
    }

    #[test]
    fn certificates() {
        let f = fano_plane();
        assert_eq!(confusion_certificate(&f, ProtocolKind::Upir1), 1);
        assert_eq!(confusion_certificate(&f, ProtocolKind::Upir2), 7);
        assert_eq!(confusion_certificate(&example_36(), ProtocolKind::Upir1), 3);
    }

    #[test]
    fn patience_for_fano() {
        // 6 * H_6 = 14.7, times ten, rounded up
        assert_eq!(default_patience(&fano_plane()), 147);
    }

    #[test]
    fn candidates_without_observations_are_everyone() {
        let f = fano_plane();
        assert_eq!(candidates_from_proxies(&f, &[], Mode::Open).len(), 7);
    }

    #[test]
    fn live_attack_validates_arguments() {
        let f = fano_plane();
        assert!(attack_until_identified(&f, Protocol::Upir1, 9, 10, 0).is_err());
        assert!(attack_until_identified(&f, Protocol::Upir1, 0, 0, 0).is_err());
        assert!(attack_until_identified(&f, Protocol::Upir2 { self_submission: 1.5 }, 0, 10, 0).is_err());
    }
}
