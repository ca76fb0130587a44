//! Grid search for the same dual norms on very small trees, used to check
//! the barrier oracle independently.
//!
//! The ratio is scale invariant, so it is maximized over `[0,1]^k` by
//! scanning a uniform grid and then repeatedly rescanning a shrinking
//! neighborhood of the best point.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods are missing without std
use num_traits::Float;

use crate::geometry::TreeConfig;
use crate::{DyadicField, Error, Result};

/// Largest tree (in cubes) the grid oracle accepts.
pub const GRID_ORACLE_MAX_CUBES: usize = 7;

const ZOOM_STAGES: usize = 20;
const ZOOM_POINTS: u32 = 5;
const ZOOM_CYCLES: usize = 1;

fn check_size(tree: &TreeConfig) -> Result<()> {
    if tree.cube_count() > GRID_ORACLE_MAX_CUBES {
        Err(Error::OracleTooLarge {
            max: GRID_ORACLE_MAX_CUBES,
            got: tree.cube_count(),
        })
    } else {
        Ok(())
    }
}

fn lp(values: &[f64], weight: f64, p: f64) -> f64 {
    if p == f64::INFINITY {
        values.iter().fold(0.0, |m, &v| m.max(v))
    } else {
        (values.iter().map(|v| v.powf(p)).sum::<f64>() * weight).powf(p.recip())
    }
}

/// Coarse scan of `{0, 1/k, ..., 1}^dim`, then cycles of zoom stages
/// around the best point with halving radius.
fn grid_maximize(dim: usize, coarse: u32, mut eval: impl FnMut(&[f64]) -> f64) -> f64 {
    let mut digits = vec![0u32; dim];
    let mut point = vec![0.0; dim];
    let mut best = f64::NEG_INFINITY;
    let mut best_point = vec![0.0; dim];
    loop {
        for (x, &d) in point.iter_mut().zip(&digits) {
            *x = f64::from(d) / f64::from(coarse);
        }
        let v = eval(&point);
        if v > best {
            best = v;
            best_point.copy_from_slice(&point);
        }
        if !crate::geometry::advance(&mut digits, coarse + 1) {
            break;
        }
    }
    for stage in 0..ZOOM_CYCLES * ZOOM_STAGES {
        let radius = libm::ldexp(1.0 / f64::from(coarse), -((stage % ZOOM_STAGES) as i32));
        let center = best_point.clone();
        digits.iter_mut().for_each(|d| *d = 0);
        loop {
            for ((x, &d), &c) in point.iter_mut().zip(&digits).zip(&center) {
                let offset = f64::from(d) / f64::from(ZOOM_POINTS - 1) * 2.0 - 1.0;
                *x = (c + offset * radius).max(0.0);
            }
            let v = eval(&point);
            if v > best {
                best = v;
                best_point.copy_from_slice(&point);
            }
            if !crate::geometry::advance(&mut digits, ZOOM_POINTS) {
                break;
            }
        }
    }
    best.max(0.0)
}

/// Grid-search value of `sup { Σ a_Q b_Q : ‖N a‖_p <= 1 }`, searching over
/// majorants `u` of `N a` on the leaves (then `a_Q = min_{x ⊆ Q} u_x`).
pub fn grid_dual_norm_wrt_ntball(b: &DyadicField, p: f64) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Exponent { name: "p", value: p });
    }
    let tree = *b.tree();
    check_size(&tree)?;
    let leaves: Vec<_> = (0..tree.cube_count()).map(|q| tree.leaves_below(q)).collect();
    let weight = tree.leaf_measure();
    Ok(grid_maximize(tree.leaf_count(), 16, |u| {
        let norm = lp(u, weight, p);
        if norm == 0.0 {
            return 0.0;
        }
        let top: f64 = leaves
            .iter()
            .zip(b.values())
            .map(|(r, &bq)| bq * u[r.clone()].iter().fold(f64::INFINITY, |m, &v| m.min(v)))
            .sum();
        top / norm
    }))
}

/// Grid-search value of `sup { Σ a_Q b_Q : ‖C b‖_{p'} <= 1 }`.
pub fn grid_dual_norm_wrt_cball(a: &DyadicField, p_prime: f64) -> Result<f64> {
    if !(p_prime > 1.0) {
        return Err(Error::Exponent {
            name: "p'",
            value: p_prime,
        });
    }
    let tree = *a.tree();
    check_size(&tree)?;
    let nc = tree.cube_count();
    let weight = tree.leaf_measure();
    let inv_measure: Vec<f64> = (0..nc).map(|q| tree.cube(q).measure().recip()).collect();
    let chains: Vec<Vec<usize>> = (0..tree.leaf_count())
        .map(|x| (0..=tree.depth()).map(|l| tree.ancestor_of_leaf(x, l)).collect())
        .collect();
    let mut sums = vec![0.0; nc];
    let mut c = vec![0.0; tree.leaf_count()];
    Ok(grid_maximize(nc, 4, |b| {
        sums.copy_from_slice(b);
        for q in (0..nc).rev() {
            let below: f64 = tree.child_ids(q).map(|r| sums[r]).sum();
            sums[q] += below;
        }
        for (cx, chain) in c.iter_mut().zip(&chains) {
            *cx = chain
                .iter()
                .map(|&q| sums[q] * inv_measure[q])
                .fold(0.0, f64::max);
        }
        let norm = lp(&c, weight, p_prime);
        if norm == 0.0 {
            return 0.0;
        }
        a.values().iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / norm
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn analytic_values() {
        let t = TreeConfig::new(1, 1).unwrap();
        let left = DyadicField::new(t, vec![0.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(grid_dual_norm_wrt_ntball(&left, 1.0).unwrap(), 2.0, max_relative = 1e-9);
        assert_relative_eq!(
            grid_dual_norm_wrt_cball(&left, f64::INFINITY).unwrap(),
            0.5,
            max_relative = 1e-9
        );
        let root = DyadicField::new(t, vec![1.0, 0.0, 0.0]).unwrap();
        assert_relative_eq!(grid_dual_norm_wrt_ntball(&root, 2.0).unwrap(), 1.0, max_relative = 1e-9);
        assert_relative_eq!(grid_dual_norm_wrt_cball(&root, 2.0).unwrap(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn size_cap() {
        let t = TreeConfig::new(1, 3).unwrap();
        assert!(grid_dual_norm_wrt_ntball(&DyadicField::zeros(t), 2.0).is_err());
    }
}
