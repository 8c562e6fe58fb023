//! Concrete configurations: affine planes over prime fields, transversal
//! designs cut out of them, a few hardcoded exemplars, and the extension that
//! turns anonymous neighborhoods into anonymous closed neighborhoods.
//!
//! Every constructor returns its configuration in canonical line order, so
//! line indices in labelings refer to the canonical ordering.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::anonymity::{anonymity_partition, Mode};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::incidence::{as_configuration, Configuration, IncidenceStructure};

pub const DEFAULT_MAX_POINTS: u64 = 10_000;

/// Size bounds applied by the constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_points: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_points: DEFAULT_MAX_POINTS }
    }
}

impl Limits {
    fn check(&self, points: u64) -> Result<()> {
        if points > self.max_points {
            Err(Error::ResourceLimit { points, limit: self.max_points })
        } else {
            Ok(())
        }
    }
}

/// A configuration with a partition of its points into non-collinear parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupedConfiguration {
    config: Configuration,
    groups: Vec<Vec<usize>>,
}

impl GroupedConfiguration {
    /// Checks that `groups` partitions the points and that no line meets a
    /// part twice. Parts are sorted internally and ordered by smallest member.
    pub fn new(config: Configuration, mut groups: Vec<Vec<usize>>) -> Result<Self> {
        let v = config.point_count();
        let mut part_of = vec![usize::MAX; v];
        for g in &mut groups {
            g.sort_unstable();
        }
        groups.retain(|g| !g.is_empty());
        groups.sort_by_key(|g| g[0]);
        for (gi, g) in groups.iter().enumerate() {
            for &p in g {
                config.check_point(p)?;
                if part_of[p] != usize::MAX {
                    return Err(Error::Partition(format!("point {p} is in two parts")));
                }
                part_of[p] = gi;
            }
        }
        if let Some(p) = part_of.iter().position(|&g| g == usize::MAX) {
            return Err(Error::Partition(format!("point {p} is in no part")));
        }
        for (li, line) in config.lines().iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &p in line {
                if !seen.insert(part_of[p]) {
                    return Err(Error::Partition(format!(
                        "line {li} meets part {} twice",
                        part_of[p]
                    )));
                }
            }
        }
        Ok(Self { config, groups })
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn into_parts(self) -> (Configuration, Vec<Vec<usize>>) {
        (self.config, self.groups)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slope {
    Finite(usize),
    Vertical,
}

/// A resolution of an affine plane: its lines split into parallel classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelClassLabeling {
    /// Line indices of each class, ascending.
    pub classes: Vec<Vec<usize>>,
    /// Slope of each class, aligned with `classes`.
    pub slopes: Vec<Slope>,
}

/// Builds a structure from labeled lines and returns it canonical, with the
/// labels following their lines.
fn canonical_with_labels<L: Copy>(
    v: usize,
    mut labeled: Vec<(Vec<usize>, L)>,
) -> Result<(Configuration, Vec<L>)> {
    for (line, _) in &mut labeled {
        line.sort_unstable();
    }
    labeled.sort_by(|a, b| a.0.cmp(&b.0));
    let labels = labeled.iter().map(|(_, l)| *l).collect();
    let lines = labeled.into_iter().map(|(l, _)| l).collect();
    Ok((as_configuration(IncidenceStructure::new(v, lines)?)?, labels))
}

fn canonical(v: usize, lines: Vec<Vec<usize>>) -> Result<Configuration> {
    as_configuration(IncidenceStructure::new(v, lines)?.canonical())
}

/// The affine plane `AG(2, q)` for prime `q` with its `q + 1` parallel classes.
///
/// Point `(x, y)` has index `x·q + y`. Classes are ordered by slope
/// `0, 1, …, q-1` followed by the vertical class.
pub fn affine_plane(q: u64) -> Result<(Configuration, ParallelClassLabeling)> {
    affine_plane_with_limits(q, &Limits::default())
}

pub fn affine_plane_with_limits(
    q: u64,
    limits: &Limits,
) -> Result<(Configuration, ParallelClassLabeling)> {
    let field = PrimeField::new(q)?;
    limits.check(q.saturating_mul(q))?;
    let n = field.order();
    let idx = |x: usize, y: usize| x * n + y;

    let mut labeled = Vec::with_capacity(n * n + n);
    for a in field.elements() {
        for b in field.elements() {
            let line = field.elements().map(|x| idx(x, field.affine(a, x, b))).collect();
            labeled.push((line, Slope::Finite(a)));
        }
    }
    for c in field.elements() {
        labeled.push((field.elements().map(|y| idx(c, y)).collect(), Slope::Vertical));
    }

    let (config, labels) = canonical_with_labels(n * n, labeled)?;
    let slopes: Vec<Slope> = (0..n).map(Slope::Finite).chain([Slope::Vertical]).collect();
    let classes = slopes
        .iter()
        .map(|s| (0..labels.len()).filter(|&li| labels[li] == *s).collect())
        .collect();
    Ok((config, ParallelClassLabeling { classes, slopes }))
}

/// `TD(k, n)` from the affine plane of prime order `n`: keep the points on the
/// first `k` vertical lines, drop the vertical class, and restrict every other
/// line to the kept points. The groups are the kept vertical lines, so point
/// `x·n + y` lies in group `x`.
pub fn transversal_design(k: usize, n: u64) -> Result<GroupedConfiguration> {
    transversal_design_with_limits(k, n, &Limits::default())
}

pub fn transversal_design_with_limits(
    k: usize,
    n: u64,
    limits: &Limits,
) -> Result<GroupedConfiguration> {
    if k < 2 || k as u64 > n {
        return Err(Error::Parameter(format!(
            "transversal design needs 2 <= k <= n (got k = {k}, n = {n})"
        )));
    }
    let field = PrimeField::new(n)?;
    limits.check(k as u64 * n)?;
    let n = field.order();

    let mut lines = Vec::with_capacity(n * n);
    for a in field.elements() {
        for b in field.elements() {
            lines.push((0..k).map(|x| x * n + field.affine(a, x, b)).collect());
        }
    }
    let config = canonical(k * n, lines)?;
    let groups = (0..k).map(|x| (x * n..(x + 1) * n).collect()).collect();
    GroupedConfiguration::new(config, groups)
}

/// The Pappus configuration, obtained as `TD(3, 3)`.
pub fn pappus() -> Result<GroupedConfiguration> {
    transversal_design(3, 3)
}

const FANO_LINES: [[usize; 3]; 7] =
    [[0, 1, 2], [0, 3, 4], [0, 5, 6], [1, 3, 5], [1, 4, 6], [2, 3, 6], [2, 4, 5]];

/// The projective plane of order 2.
pub fn fano_plane() -> Configuration {
    canonical(7, FANO_LINES.iter().map(|l| l.to_vec()).collect())
        .expect("hardcoded Fano plane is a configuration")
}

/// A (36,72,6,3)-configuration with 3-anonymous neighborhoods that is not a
/// transversal design. Points are numbered from 1 here as in the source table.
#[rustfmt::skip]
const EXAMPLE_36_LINES: [[usize; 3]; 72] = [
    [1,4,7], [1,5,8], [1,6,9], [2,4,8], [2,5,9], [2,6,7], [3,4,9], [3,5,7], [3,6,8],
    [1,10,13], [1,11,14], [1,12,15], [2,10,14], [2,11,15], [2,12,13], [3,10,15], [3,11,13], [3,12,14],
    [4,16,19], [4,17,20], [4,18,21], [5,16,20], [5,17,21], [5,18,19], [6,16,21], [6,17,19], [6,18,20],
    [7,22,25], [7,23,26], [7,24,27], [8,22,26], [8,23,27], [8,24,25], [9,22,27], [9,23,25], [9,24,26],
    [10,28,31], [10,29,32], [10,30,33], [11,28,32], [11,29,33], [11,30,31], [12,28,33], [12,29,31], [12,30,32],
    [13,16,34], [13,17,35], [13,18,36], [14,16,35], [14,17,36], [14,18,34], [15,16,36], [15,17,34], [15,18,35],
    [19,22,31], [19,23,32], [19,24,33], [20,22,32], [20,23,33], [20,24,31], [21,22,33], [21,23,31], [21,24,32],
    [25,28,34], [25,29,35], [25,30,36], [26,28,35], [26,29,36], [26,30,34], [27,28,36], [27,29,34], [27,30,35],
];

pub fn example_36() -> Configuration {
    let lines = EXAMPLE_36_LINES
        .iter()
        .map(|l| l.iter().map(|p| p - 1).collect())
        .collect();
    canonical(36, lines).expect("hardcoded (36,72,6,3) table is a configuration")
}

/// The `v`-cycle as a `(v, v, 2, 2)`-configuration.
pub fn cycle(v: usize) -> Result<Configuration> {
    if v < 3 {
        return Err(Error::Parameter(format!("cycle needs at least 3 points (got {v})")));
    }
    Limits::default().check(v as u64)?;
    canonical(v, (0..v).map(|i| vec![i, (i + 1) % v]).collect())
}

pub fn pentagon() -> Configuration {
    cycle(5).expect("5-cycle")
}

/// Adds lines inside each part of the neighborhood anonymity partition so
/// that points sharing a neighborhood also share a closed neighborhood.
///
/// Each part is cut into consecutive runs of `k` points (in ascending order);
/// every run becomes a new line. The result has parameters
/// `(v, b + Σ|g|/k, r + 1, k)`.
pub fn extend_to_closed_anonymous(gc: &GroupedConfiguration) -> Result<Configuration> {
    let config = gc.config();
    let k = config.k();
    let partition = anonymity_partition(config, Mode::Open);
    let expected: BTreeSet<&[usize]> = partition.parts.iter().map(Vec::as_slice).collect();
    let given: BTreeSet<&[usize]> = gc.groups().iter().map(Vec::as_slice).collect();
    if expected != given {
        return Err(Error::Partition(format!(
            "expected {} parts of equal neighborhoods, got {} groups that differ",
            partition.parts.len(),
            gc.groups().len()
        )));
    }
    for (i, g) in gc.groups().iter().enumerate() {
        if g.len() % k != 0 {
            return Err(Error::Divisibility { part: i, size: g.len(), k });
        }
    }
    let mut lines = config.lines().to_vec();
    for g in gc.groups() {
        lines.extend(g.chunks(k).map(<[usize]>::to_vec));
    }
    canonical(config.point_count(), lines)
}
