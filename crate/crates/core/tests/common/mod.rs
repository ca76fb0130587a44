//! Brute-force reference implementations, written directly from the
//! definitions over explicit cube containment (no flat ids, no subtree sums).

#![allow(dead_code)]

use carleson_core::{BoundaryFunction, DyadicCube, DyadicField, TreeConfig};

pub fn leaf_points(tree: &TreeConfig) -> Vec<Vec<f64>> {
    (0..tree.leaf_count()).map(|l| tree.leaf_center(l)).collect()
}

/// `max_{Q ∋ x} a_Q` by scanning every cube of the tree.
pub fn brute_nt(a: &DyadicField) -> Vec<f64> {
    let tree = a.tree();
    leaf_points(tree)
        .iter()
        .map(|x| {
            tree.cubes()
                .filter(|q| q.contains_point(x))
                .map(|q| a.get(&q).unwrap())
                .fold(0.0, f64::max)
        })
        .collect()
}

/// `max_{Q ∋ x} |Q|^{-1} Σ_{R ⊆ Q} b_R` by scanning all pairs of cubes.
pub fn brute_carleson(b: &DyadicField) -> Vec<f64> {
    let tree = b.tree();
    let cubes: Vec<DyadicCube> = tree.cubes().collect();
    leaf_points(tree)
        .iter()
        .map(|x| {
            cubes
                .iter()
                .filter(|q| q.contains_point(x))
                .map(|q| {
                    let mass: f64 = cubes
                        .iter()
                        .filter(|r| r.is_within(q))
                        .map(|r| b.get(r).unwrap())
                        .sum();
                    mass / q.measure()
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

/// `max_{Q ∋ x} |Q|^{-1} ∫_Q |h|` by scanning cubes and leaf centers.
pub fn brute_maximal(h: &BoundaryFunction) -> Vec<f64> {
    let tree = h.tree();
    let points = leaf_points(tree);
    points
        .iter()
        .map(|x| {
            tree.cubes()
                .filter(|q| q.contains_point(x))
                .map(|q| {
                    let inside: Vec<f64> = points
                        .iter()
                        .zip(h.values())
                        .filter(|(y, _)| q.contains_point(y))
                        .map(|(_, v)| v.abs())
                        .collect();
                    inside.iter().sum::<f64>() / inside.len() as f64
                })
                .fold(0.0, f64::max)
        })
        .collect()
}

pub fn lp(values: &[f64], weight: f64, p: f64) -> f64 {
    if p == f64::INFINITY {
        values.iter().fold(0.0, |m, &v| m.max(v))
    } else {
        (values.iter().map(|v| v.powf(p)).sum::<f64>() * weight).powf(1.0 / p)
    }
}

pub fn assert_close(a: &[f64], b: &[f64], rel: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        let scale = x.abs().max(y.abs()).max(1e-300);
        assert!((x - y).abs() <= rel * scale, "{x} vs {y}");
    }
}

pub fn leq(a: &[f64], b: &[f64], rel: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| *x <= y + rel * y.abs().max(x.abs()))
}
