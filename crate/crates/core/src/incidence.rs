//! Incidence structures, the partial-linear-space and configuration axioms,
//! and the neighborhood queries everything else is built on.
//!
//! Points are dense indices `0..v`. Every line is a strictly ascending list
//! of point indices; a structure's canonical form additionally sorts its
//! lines lexicographically.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type PointSet = BTreeSet<usize>;

/// Cap on the number of individual findings recorded per check.
const MAX_FINDINGS: usize = 32;

/// A point set `0..point_count` together with a family of lines.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IncidenceStructure {
    point_count: usize,
    lines: Vec<Vec<usize>>,
}

impl IncidenceStructure {
    /// Builds a structure, sorting the points of every line.
    ///
    /// Rejects lines with fewer than two points, repeated points inside a
    /// line, out-of-range indices and repeated lines.
    pub fn new(point_count: usize, lines: Vec<Vec<usize>>) -> Result<Self> {
        let mut sorted = Vec::with_capacity(lines.len());
        for (i, mut line) in lines.into_iter().enumerate() {
            line.sort_unstable();
            if line.len() < 2 {
                return Err(Error::Malformed(format!(
                    "line {i} has {} point(s), at least 2 required",
                    line.len()
                )));
            }
            if let Some(w) = line.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::Malformed(format!("line {i} repeats point {}", w[0])));
            }
            if let Some(&p) = line.last().filter(|&&p| p >= point_count) {
                return Err(Error::PointOutOfRange { point: p, point_count });
            }
            sorted.push(line);
        }
        let mut seen = std::collections::HashSet::with_capacity(sorted.len());
        for (i, line) in sorted.iter().enumerate() {
            if !seen.insert(line.as_slice()) {
                return Err(Error::Malformed(format!("line {i} duplicates an earlier line")));
            }
        }
        Ok(Self { point_count, lines: sorted })
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    /// Same structure with its lines in lexicographic order.
    pub fn canonical(&self) -> Self {
        let mut lines = self.lines.clone();
        lines.sort();
        Self { point_count: self.point_count, lines }
    }

    pub fn is_canonical(&self) -> bool {
        self.lines.windows(2).all(|w| w[0] < w[1])
    }

    /// Line indices incident with each point, ascending.
    pub fn lines_through(&self) -> Vec<Vec<usize>> {
        let mut through = vec![Vec::new(); self.point_count];
        for (i, line) in self.lines.iter().enumerate() {
            for &p in line {
                through[p].push(i);
            }
        }
        through
    }
}

/// Outcome of checking a structure against the configuration axioms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub point_count: usize,
    pub line_count: usize,
    pub is_partial_linear_space: bool,
    /// `Some(r)` when every point lies on exactly `r` lines.
    pub is_regular: Option<usize>,
    /// `Some(k)` when every line has exactly `k` points.
    pub is_uniform: Option<usize>,
    pub is_connected: bool,
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_configuration(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn summary(&self) -> String {
        if self.violations.is_empty() {
            "no violations".to_owned()
        } else {
            self.violations.join("; ")
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.summary())
    }
}

/// Checks the partial-linear-space, regularity, uniformity and connectivity
/// axioms. Never fails; every finding lands in the report.
pub fn validate(structure: &IncidenceStructure) -> ValidationReport {
    let v = structure.point_count();
    let lines = structure.lines();
    let through = structure.lines_through();
    let mut violations = Vec::new();

    // Pair check: for each point, mark every point reached through its lines.
    let mut pair_findings = 0usize;
    let mut marked_by = vec![usize::MAX; v];
    for (p, lines_of_p) in through.iter().enumerate() {
        for &li in lines_of_p {
            for &q in &lines[li] {
                if q <= p {
                    continue;
                }
                if marked_by[q] != usize::MAX && marked_by[q] != li {
                    if pair_findings < MAX_FINDINGS {
                        violations.push(format!(
                            "pair ({p},{q}) lies on lines {} and {li}",
                            marked_by[q]
                        ));
                    }
                    pair_findings += 1;
                } else {
                    marked_by[q] = li;
                }
            }
        }
        for &li in lines_of_p {
            for &q in &lines[li] {
                marked_by[q] = usize::MAX;
            }
        }
    }
    if pair_findings > MAX_FINDINGS {
        violations.push(format!("... and {} more pair collisions", pair_findings - MAX_FINDINGS));
    }
    let is_partial_linear_space = pair_findings == 0;

    let is_regular = match through.first() {
        None => {
            violations.push("empty point set".to_owned());
            None
        }
        Some(first) => {
            let r = first.len();
            match through.iter().position(|t| t.len() != r) {
                Some(p) => {
                    violations.push(format!(
                        "not regular: point 0 lies on {r} lines, point {p} on {}",
                        through[p].len()
                    ));
                    None
                }
                None if r == 0 => {
                    violations.push("points lie on no lines".to_owned());
                    None
                }
                None => Some(r),
            }
        }
    };

    let is_uniform = match lines.first() {
        None => {
            violations.push("no lines".to_owned());
            None
        }
        Some(first) => {
            let k = first.len();
            match lines.iter().position(|l| l.len() != k) {
                Some(i) => {
                    violations.push(format!(
                        "not uniform: line 0 has {k} points, line {i} has {}",
                        lines[i].len()
                    ));
                    None
                }
                None => Some(k),
            }
        }
    };

    let is_connected = v > 0 && component_count(v, lines) == 1;
    if v > 0 && !is_connected {
        violations.push(format!(
            "incidence graph has {} components",
            component_count(v, lines)
        ));
    }

    ValidationReport {
        point_count: v,
        line_count: lines.len(),
        is_partial_linear_space,
        is_regular,
        is_uniform,
        is_connected,
        violations,
    }
}

fn component_count(v: usize, lines: &[Vec<usize>]) -> usize {
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut parent: Vec<usize> = (0..v).collect();
    for line in lines {
        let a = find(&mut parent, line[0]);
        for &p in &line[1..] {
            let b = find(&mut parent, p);
            if a != b {
                parent[b] = a;
            }
        }
    }
    (0..v).filter(|&x| find(&mut parent, x) == x).count()
}

/// The `(v, b, r, k)` parameters of a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Parameters {
    pub v: usize,
    pub b: usize,
    pub r: usize,
    pub k: usize,
}

impl fmt::Display for Parameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.v, self.b, self.r, self.k)
    }
}

/// A connected, `r`-regular, `k`-uniform partial linear space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    structure: IncidenceStructure,
    r: usize,
    k: usize,
    lines_through: Vec<Vec<usize>>,
}

impl Configuration {
    pub fn new(structure: IncidenceStructure) -> Result<Self> {
        as_configuration(structure)
    }

    pub fn structure(&self) -> &IncidenceStructure {
        &self.structure
    }

    pub fn into_structure(self) -> IncidenceStructure {
        self.structure
    }

    pub fn point_count(&self) -> usize {
        self.structure.point_count
    }

    pub fn line_count(&self) -> usize {
        self.structure.lines.len()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn params(&self) -> Parameters {
        Parameters { v: self.point_count(), b: self.line_count(), r: self.r, k: self.k }
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.structure.lines
    }

    pub fn line(&self, index: usize) -> &[usize] {
        &self.structure.lines[index]
    }

    /// Indices of the `r` lines through `p`, ascending. Panics if `p >= v`.
    pub fn lines_through(&self, p: usize) -> &[usize] {
        &self.lines_through[p]
    }

    pub fn check_point(&self, p: usize) -> Result<()> {
        if p < self.point_count() {
            Ok(())
        } else {
            Err(Error::PointOutOfRange { point: p, point_count: self.point_count() })
        }
    }

    /// The unique line through two distinct points, if they are collinear.
    pub fn line_joining(&self, p: usize, q: usize) -> Option<usize> {
        if p == q {
            return None;
        }
        let (a, b) = (&self.lines_through[p], &self.lines_through[q]);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return Some(a[i]),
            }
        }
        None
    }

    pub fn are_collinear(&self, p: usize, q: usize) -> bool {
        self.line_joining(p, q).is_some()
    }

    /// `N(p)` as a sorted vector; `p` must be in range.
    pub(crate) fn neighborhood_sorted(&self, p: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.r * (self.k - 1));
        for &li in &self.lines_through[p] {
            out.extend(self.structure.lines[li].iter().copied().filter(|&q| q != p));
        }
        out.sort_unstable();
        out
    }

    /// `CN(p) = N(p) ∪ {p}` as a sorted vector; `p` must be in range.
    pub(crate) fn closed_neighborhood_sorted(&self, p: usize) -> Vec<usize> {
        let mut out = self.neighborhood_sorted(p);
        let at = out.partition_point(|&q| q < p);
        out.insert(at, p);
        out
    }

    /// Points collinear with `p`, excluding `p`.
    pub fn neighborhood(&self, p: usize) -> Result<PointSet> {
        self.check_point(p)?;
        Ok(self.neighborhood_sorted(p).into_iter().collect())
    }

    pub fn closed_neighborhood(&self, p: usize) -> Result<PointSet> {
        self.check_point(p)?;
        Ok(self.closed_neighborhood_sorted(p).into_iter().collect())
    }

    /// Number of points not collinear with a given point: `v - (r(k-1) + 1)`.
    pub fn deficiency(&self) -> usize {
        self.point_count() - (self.r * (self.k - 1) + 1)
    }

    /// True iff the given lines partition the point set.
    pub fn is_parallel_class(&self, line_subset: &[usize]) -> bool {
        let mut covered = vec![false; self.point_count()];
        let mut count = 0usize;
        for &li in line_subset {
            let Some(line) = self.structure.lines.get(li) else {
                return false;
            };
            for &p in line {
                if std::mem::replace(&mut covered[p], true) {
                    return false;
                }
                count += 1;
            }
        }
        count == self.point_count()
    }
}

/// Validates `structure` and wraps it as a configuration with cached indexes.
pub fn as_configuration(structure: IncidenceStructure) -> Result<Configuration> {
    let report = validate(&structure);
    match (report.is_configuration(), report.is_regular, report.is_uniform) {
        (true, Some(r), Some(k)) => {
            let lines_through = structure.lines_through();
            Ok(Configuration { structure, r, k, lines_through })
        }
        _ => Err(Error::Configuration(Box::new(report))),
    }
}

impl TryFrom<IncidenceStructure> for Configuration {
    type Error = Error;

    fn try_from(structure: IncidenceStructure) -> Result<Self> {
        as_configuration(structure)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn structure(v: usize, lines: &[&[usize]]) -> IncidenceStructure {
        IncidenceStructure::new(v, lines.iter().map(|l| l.to_vec()).collect()).unwrap()
    }

    fn fano() -> IncidenceStructure {
        structure(
            7,
            &[&[0, 1, 2], &[0, 3, 4], &[0, 5, 6], &[1, 3, 5], &[1, 4, 6], &[2, 3, 6], &[2, 4, 5]],
        )
    }

    fn c4() -> Configuration {
        as_configuration(structure(4, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]])).unwrap()
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(
            IncidenceStructure::new(3, vec![vec![0]]),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(
            IncidenceStructure::new(3, vec![vec![0, 0, 1]]),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(
            IncidenceStructure::new(3, vec![vec![0, 3]]),
            Err(Error::PointOutOfRange { point: 3, point_count: 3 })
        ));
        assert!(matches!(
            IncidenceStructure::new(3, vec![vec![0, 1], vec![1, 0]]),
            Err(Error::Malformed(_))
        ));
    }

    #[test]
    fn fano_validates() {
        let report = validate(&fano());
        assert!(report.is_partial_linear_space);
        assert_eq!(report.is_regular, Some(3));
        assert_eq!(report.is_uniform, Some(3));
        assert!(report.is_connected);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn pair_on_two_lines_is_reported() {
        let s = structure(4, &[&[0, 1, 2], &[0, 1, 3]]);
        let report = validate(&s);
        assert!(!report.is_partial_linear_space);
        assert!(report.violations.iter().any(|m| m.contains("pair (0,1)")), "{report:?}");
    }

    #[test]
    fn c4_parameters_and_neighborhoods() {
        let c = c4();
        assert_eq!(c.params(), Parameters { v: 4, b: 4, r: 2, k: 2 });
        assert_eq!(c.neighborhood(0).unwrap(), PointSet::from([1, 3]));
        assert_eq!(c.closed_neighborhood(0).unwrap(), PointSet::from([0, 1, 3]));
        assert_eq!(c.deficiency(), 1);
        // the single non-neighbor of 0 is 2
        let non: Vec<_> = (0..4).filter(|&q| q != 0 && !c.are_collinear(0, q)).collect();
        assert_eq!(non, vec![2]);
    }

    #[test]
    fn disconnected_triangles_rejected() {
        let s = structure(6, &[&[0, 1], &[1, 2], &[0, 2], &[3, 4], &[4, 5], &[3, 5]]);
        match as_configuration(s) {
            Err(Error::Configuration(report)) => {
                assert!(!report.is_connected);
                assert!(report.is_partial_linear_space);
            }
            other => panic!("expected configuration error, got {other:?}"),
        }
    }

    #[test]
    fn irregular_and_nonuniform_reported() {
        let s = structure(4, &[&[0, 1, 2], &[2, 3]]);
        let report = validate(&s);
        assert_eq!(report.is_regular, None);
        assert_eq!(report.is_uniform, None);
        assert!(report.is_connected);
        assert_eq!(report.violations.len(), 2);
    }

    #[test]
    fn out_of_range_point_queries() {
        let c = c4();
        assert!(matches!(c.neighborhood(4), Err(Error::PointOutOfRange { .. })));
        assert!(matches!(c.closed_neighborhood(9), Err(Error::PointOutOfRange { .. })));
    }

    #[test]
    fn fano_neighborhoods_cover_everything() {
        let c = as_configuration(fano()).unwrap();
        for p in 0..7 {
            let n = c.neighborhood(p).unwrap();
            assert_eq!(n.len(), 6);
            assert!(!n.contains(&p));
            assert_eq!(c.closed_neighborhood(p).unwrap().len(), 7);
        }
        assert_eq!(c.deficiency(), 0);
    }

    #[test]
    fn parallel_classes() {
        let c = c4();
        assert!(c.is_parallel_class(&[0, 2]));
        assert!(!c.is_parallel_class(&[0, 1]));
        assert!(!c.is_parallel_class(&[0]));
        assert!(!c.is_parallel_class(&[0, 2, 9]));
        let f = as_configuration(fano()).unwrap();
        for a in 0..7 {
            for b in 0..7 {
                assert!(!f.is_parallel_class(&[a, b]));
            }
        }
    }

    #[test]
    fn canonical_sorts_lines() {
        let s = structure(4, &[&[2, 3], &[0, 1], &[1, 2], &[0, 3]]);
        assert!(!s.is_canonical());
        let c = s.canonical();
        assert!(c.is_canonical());
        assert_eq!(c.lines()[0], vec![0, 1]);
    }
}
