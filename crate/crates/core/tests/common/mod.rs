//! Shared fixtures and brute-force oracles. The oracles only look at raw line
//! lists and never call the library's neighborhood or partition code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use upir_core::anonymity::Mode;
use upir_core::constructions::{
    affine_plane, cycle, example_36, extend_to_closed_anonymous, fano_plane, pappus, pentagon,
    transversal_design,
};
use upir_core::Configuration;

pub fn zoo() -> Vec<(String, Configuration)> {
    let mut out = vec![
        ("fano".to_owned(), fano_plane()),
        ("pentagon".to_owned(), pentagon()),
        ("example36".to_owned(), example_36()),
        ("pappus".to_owned(), pappus().unwrap().config().clone()),
    ];
    for q in [2u64, 3, 5, 7] {
        out.push((format!("affine{q}"), affine_plane(q).unwrap().0));
    }
    for n in [2u64, 3, 5] {
        for k in 2..=n as usize {
            out.push((format!("td{k}_{n}"), transversal_design(k, n).unwrap().config().clone()));
        }
    }
    for v in 3..=8 {
        out.push((format!("cycle{v}"), cycle(v).unwrap()));
    }
    for (k, n) in [(2usize, 2u64), (3, 3), (2, 5)] {
        if (n as usize).is_multiple_of(k) {
            let ext = extend_to_closed_anonymous(&transversal_design(k, n).unwrap()).unwrap();
            out.push((format!("ext_td{k}_{n}"), ext));
        }
    }
    out
}

/// Lines that contain both points, by scanning every line.
pub fn lines_containing(config: &Configuration, p: usize, q: usize) -> usize {
    config.lines().iter().filter(|l| l.contains(&p) && l.contains(&q)).count()
}

pub fn brute_neighborhood(config: &Configuration, p: usize, mode: Mode) -> BTreeSet<usize> {
    let mut set: BTreeSet<usize> = config
        .lines()
        .iter()
        .filter(|l| l.contains(&p))
        .flatten()
        .copied()
        .collect();
    if mode == Mode::Open {
        set.remove(&p);
    } else {
        set.insert(p);
    }
    set
}

/// Partition by pairwise comparison of brute-force neighborhoods.
pub fn brute_partition(config: &Configuration, mode: Mode) -> Vec<Vec<usize>> {
    let v = config.point_count();
    let nbs: Vec<_> = (0..v).map(|p| brute_neighborhood(config, p, mode)).collect();
    let mut assigned = vec![false; v];
    let mut parts = Vec::new();
    for p in 0..v {
        if assigned[p] {
            continue;
        }
        let part: Vec<usize> = (p..v).filter(|&q| nbs[q] == nbs[p]).collect();
        for &q in &part {
            assigned[q] = true;
        }
        parts.push(part);
    }
    parts
}

pub fn brute_structural_set(config: &Configuration, owner: usize, mode: Mode) -> BTreeSet<usize> {
    let mut acc: BTreeSet<usize> = (0..config.point_count()).collect();
    for proxy in brute_neighborhood(config, owner, mode) {
        let nb = brute_neighborhood(config, proxy, mode);
        acc = acc.intersection(&nb).copied().collect();
    }
    acc
}

pub fn brute_triangle_free(config: &Configuration) -> bool {
    let v = config.point_count();
    let line_of = |a: usize, b: usize| config.lines().iter().position(|l| l.contains(&a) && l.contains(&b));
    for a in 0..v {
        for b in a + 1..v {
            let Some(ab) = line_of(a, b) else { continue };
            for c in b + 1..v {
                if let (Some(ac), Some(bc)) = (line_of(a, c), line_of(b, c)) {
                    if ab != ac && ab != bc && ac != bc {
                        return false;
                    }
                }
            }
        }
    }
    true
}
