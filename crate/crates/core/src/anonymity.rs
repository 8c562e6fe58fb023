//! Neighborhood anonymity: the partition of points by equal (closed)
//! neighborhoods, and the structural predicates that decide when that
//! partition is trivial.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::constructions::GroupedConfiguration;
use crate::error::{Error, Result};
use crate::incidence::{Configuration, PointSet};
use crate::par::{self, Strategy};

/// Which neighborhood is compared: `N(p)` or `CN(p) = N(p) ∪ {p}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Open,
    Closed,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Open => "open",
            Mode::Closed => "closed",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "open" => Ok(Mode::Open),
            "closed" => Ok(Mode::Closed),
            other => Err(Error::Parameter(format!("unknown mode {other:?} (open|closed)"))),
        }
    }
}

pub(crate) fn neighborhood_in_mode(config: &Configuration, p: usize, mode: Mode) -> Vec<usize> {
    match mode {
        Mode::Open => config.neighborhood_sorted(p),
        Mode::Closed => config.closed_neighborhood_sorted(p),
    }
}

/// Points grouped by identical (closed) neighborhood.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnonymityPartition {
    pub mode: Mode,
    /// Ascending within a part; parts ordered by smallest member.
    pub parts: Vec<Vec<usize>>,
    /// Size of the smallest part.
    pub level: usize,
}

impl AnonymityPartition {
    pub fn is_all_singletons(&self) -> bool {
        self.level == 1 && self.parts.iter().all(|p| p.len() == 1)
    }

    /// The part containing `p`.
    pub fn part_of(&self, p: usize) -> Option<&[usize]> {
        self.parts
            .iter()
            .find(|part| part.binary_search(&p).is_ok())
            .map(Vec::as_slice)
    }
}

pub fn anonymity_partition(config: &Configuration, mode: Mode) -> AnonymityPartition {
    anonymity_partition_with(config, mode, Strategy::default())
}

/// As [`anonymity_partition`], with explicit control over parallelism.
///
/// Points are first bucketed by a hash of their neighborhood; buckets are
/// then split by exact set equality, so hash collisions cannot merge parts.
pub fn anonymity_partition_with(
    config: &Configuration,
    mode: Mode,
    strategy: Strategy,
) -> AnonymityPartition {
    let fingerprints = par::map_range(config.point_count(), strategy, |p| {
        let mut h = DefaultHasher::new();
        neighborhood_in_mode(config, p, mode).hash(&mut h);
        h.finish()
    });

    let mut buckets: HashMap<u64, Vec<usize>> = HashMap::new();
    for (p, fp) in fingerprints.into_iter().enumerate() {
        buckets.entry(fp).or_default().push(p);
    }
    let buckets: Vec<Vec<usize>> = buckets.into_values().collect();

    let split = par::map_slice(&buckets, strategy, |bucket| {
        if bucket.len() == 1 {
            return vec![bucket.clone()];
        }
        let mut classes: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
        for &p in bucket {
            let nb = neighborhood_in_mode(config, p, mode);
            match classes.iter_mut().find(|(key, _)| *key == nb) {
                Some((_, members)) => members.push(p),
                None => classes.push((nb, vec![p])),
            }
        }
        classes.into_iter().map(|(_, m)| m).collect()
    });

    let mut parts: Vec<Vec<usize>> = split.into_iter().flatten().collect();
    for part in &mut parts {
        part.sort_unstable();
    }
    parts.sort_by_key(|part| part[0]);
    let level = parts.iter().map(Vec::len).min().unwrap_or(0);
    AnonymityPartition { mode, parts, level }
}

pub fn has_unique_neighborhoods(config: &Configuration, mode: Mode) -> bool {
    anonymity_partition(config, mode).is_all_singletons()
}

/// True iff no three points are pairwise collinear on three distinct lines.
pub fn is_triangle_free(config: &Configuration) -> bool {
    for p in 0..config.point_count() {
        let through = config.lines_through(p);
        for (i, &l1) in through.iter().enumerate() {
            for &l2 in &through[i + 1..] {
                for &a in config.line(l1).iter().filter(|&&a| a != p) {
                    for &b in config.line(l2).iter().filter(|&&b| b != p) {
                        if config.are_collinear(a, b) {
                            return false;
                        }
                    }
                }
            }
        }
    }
    true
}

/// Opposite-line structure of a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PentagonalReport {
    pub is_pentagonal: bool,
    /// For each point, the line whose points are exactly those outside `CN(p)`.
    pub opposite_line: Vec<Option<usize>>,
    /// Pairs of lines `(l, l')`, `l < l'`, where every point of each line has
    /// the other as its opposite line.
    pub opposite_line_pairs: Vec<(usize, usize)>,
}

pub fn pentagonal_report(config: &Configuration) -> PentagonalReport {
    let v = config.point_count();
    let opposite_line: Vec<Option<usize>> = (0..v)
        .map(|p| {
            let cn = config.closed_neighborhood_sorted(p);
            let outside: Vec<usize> = (0..v).filter(|q| cn.binary_search(q).is_err()).collect();
            let &first = outside.first()?;
            config
                .lines_through(first)
                .iter()
                .copied()
                .find(|&li| config.line(li) == outside.as_slice())
        })
        .collect();
    let is_pentagonal = v > 0 && opposite_line.iter().all(Option::is_some);

    let all_opposite = |line: usize, target: usize| {
        config.line(line).iter().all(|&p| opposite_line[p] == Some(target))
    };
    let mut opposite_line_pairs = Vec::new();
    for l in 0..config.line_count() {
        if let Some(other) = opposite_line[config.line(l)[0]] {
            if l < other && all_opposite(l, other) && all_opposite(other, l) {
                opposite_line_pairs.push((l, other));
            }
        }
    }
    PentagonalReport { is_pentagonal, opposite_line, opposite_line_pairs }
}

/// Checks of the necessary conditions for `n`-anonymous neighborhoods.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterizationReport {
    /// Open anonymity level.
    pub n: usize,
    pub r: usize,
    pub k: usize,
    /// Number of parts.
    pub m: usize,
    pub parts_non_collinear: bool,
    pub min_part_size: usize,
    pub r_at_least_n: bool,
    pub m_at_least_k: bool,
    pub r_equals_n: bool,
    pub m_equals_k: bool,
}

impl CharacterizationReport {
    pub fn holds(&self) -> bool {
        self.parts_non_collinear && self.min_part_size >= self.n && self.r_at_least_n && self.m_at_least_k
    }
}

/// Errors when the open anonymity level is below 2.
pub fn check_characterization(config: &Configuration) -> Result<CharacterizationReport> {
    let partition = anonymity_partition(config, Mode::Open);
    let n = partition.level;
    if n < 2 {
        return Err(Error::Precondition(format!(
            "open anonymity level is {n}, characterization needs at least 2"
        )));
    }
    let parts_non_collinear = partition.parts.iter().all(|part| {
        part.iter()
            .enumerate()
            .all(|(i, &p)| part[i + 1..].iter().all(|&q| !config.are_collinear(p, q)))
    });
    let (r, k, m) = (config.r(), config.k(), partition.parts.len());
    Ok(CharacterizationReport {
        n,
        r,
        k,
        m,
        parts_non_collinear,
        min_part_size: n,
        r_at_least_n: r >= n,
        m_at_least_k: m >= k,
        r_equals_n: r == n,
        m_equals_k: m == k,
    })
}

/// Recognizes `TD(k, n)`: open anonymity parts all of size `n >= 2`, exactly
/// `k` of them, `r = n`, and every pair from different parts on exactly one
/// line. Returns the parts as groups.
pub fn is_transversal_design(config: &Configuration) -> Option<GroupedConfiguration> {
    let partition = anonymity_partition(config, Mode::Open);
    let n = partition.level;
    if n < 2
        || partition.parts.iter().any(|p| p.len() != n)
        || partition.parts.len() != config.k()
        || config.r() != n
    {
        return None;
    }
    let v = config.point_count();
    let mut group_of = vec![0; v];
    for (gi, part) in partition.parts.iter().enumerate() {
        for &p in part {
            group_of[p] = gi;
        }
    }
    for p in 0..v {
        for q in p + 1..v {
            if config.are_collinear(p, q) != (group_of[p] != group_of[q]) {
                return None;
            }
        }
    }
    GroupedConfiguration::new(config.clone(), partition.parts).ok()
}

/// The intersection of the (closed) neighborhoods of the owner's (closed)
/// neighbors: what an adversary is left with after seeing every possible
/// proxy of a linked query sequence.
pub fn structural_anonymity_set(config: &Configuration, owner: usize, mode: Mode) -> Result<PointSet> {
    config.check_point(owner)?;
    let mut acc: Option<PointSet> = None;
    for proxy in neighborhood_in_mode(config, owner, mode) {
        let nb = neighborhood_in_mode(config, proxy, mode);
        acc = Some(match acc {
            None => nb.into_iter().collect(),
            Some(set) => set.into_iter().filter(|q| nb.binary_search(q).is_ok()).collect(),
        });
    }
    Ok(acc.unwrap_or_else(|| (0..config.point_count()).collect()))
}
