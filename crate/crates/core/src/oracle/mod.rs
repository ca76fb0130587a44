//! Dual norms on small trees by direct convex optimization.
//!
//! `dual_norm_wrt_ntball(b, p) = sup { Σ a_Q b_Q : a >= 0, ‖N a‖_p <= 1 }` and
//! `dual_norm_wrt_cball(a, p') = sup { Σ a_Q b_Q : b >= 0, ‖C b‖_{p'} <= 1 }`.
//!
//! Both balls become smooth convex programs after adding one variable per
//! leaf for the maximal function: `a_Q <= u_x` for leaves `x ⊆ Q` with
//! `Σ |x| u_x^p <= 1`, and `Σ_{R ⊆ Q} b_R <= |Q| v_x` with
//! `Σ |x| v_x^{p'} <= 1`. They are solved with a log-barrier method; the
//! reported value is the exact ratio attained by the returned field, never
//! below the value of the explicit extremizer, and the barrier gap gives an
//! upper bound.

mod barrier;
pub mod grid;

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods are missing without std
use num_traits::Float;

use crate::duality::{
    extremal_f_for_carleson, extremal_g_for_ntmax, extremal_g_for_ntmax_p1, pairing,
};
use crate::fields::conjugate;
use crate::functionals::{carleson_dyadic, nt_max_dyadic};
use crate::geometry::TreeConfig;
use crate::{DyadicField, Error, Result};

use barrier::{PowerConstraint, Problem};

/// Largest tree (in cubes) the oracle accepts.
pub const ORACLE_MAX_CUBES: usize = 31;

/// Relative accuracy the barrier method is run to.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    /// Best ratio attained, by the optimizer or by the explicit extremizer.
    pub value: f64,
    /// Upper bound on the dual norm from the barrier duality gap.
    pub upper_bound: f64,
    /// Field attaining `value`, scaled into the unit ball.
    pub argmax: DyadicField,
    pub newton_steps: usize,
}

fn check_size(tree: &TreeConfig) -> Result<()> {
    if tree.cube_count() > ORACLE_MAX_CUBES {
        Err(Error::OracleTooLarge {
            max: ORACLE_MAX_CUBES,
            got: tree.cube_count(),
        })
    } else {
        Ok(())
    }
}

fn zero_solution(tree: TreeConfig) -> OracleSolution {
    OracleSolution {
        value: 0.0,
        upper_bound: 0.0,
        argmax: DyadicField::zeros(tree),
        newton_steps: 0,
    }
}

fn normalized(field: &DyadicField) -> (DyadicField, f64) {
    let top = field.values().iter().fold(0.0f64, |m, &v| m.max(v));
    (field.scaled(top.recip()), top)
}

/// `Σ a b / ‖N a‖_p`, or `None` when the norm vanishes.
fn nt_ratio(a: &DyadicField, b: &DyadicField, p: f64) -> Result<Option<(f64, f64)>> {
    let norm = nt_max_dyadic(a).lp_norm(p)?;
    Ok((norm > 0.0).then(|| (pairing(a, b).unwrap_or(0.0) / norm, norm)))
}

fn c_ratio(a: &DyadicField, b: &DyadicField, p_prime: f64) -> Result<Option<(f64, f64)>> {
    let norm = carleson_dyadic(b).lp_norm(p_prime)?;
    Ok((norm > 0.0).then(|| (pairing(a, b).unwrap_or(0.0) / norm, norm)))
}

/// `sup { Σ a_Q b_Q : ‖N a‖_p <= 1 }` for `1 <= p < ∞`.
pub fn dual_norm_wrt_ntball(b: &DyadicField, p: f64) -> Result<f64> {
    Ok(solve_ntball(b, p)?.value)
}

/// `sup { Σ a_Q b_Q : ‖C b‖_{p'} <= 1 }` for `1 < p' <= ∞`.
pub fn dual_norm_wrt_cball(a: &DyadicField, p_prime: f64) -> Result<f64> {
    Ok(solve_cball(a, p_prime)?.value)
}

pub fn solve_ntball(b: &DyadicField, p: f64) -> Result<OracleSolution> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Exponent { name: "p", value: p });
    }
    let tree = *b.tree();
    check_size(&tree)?;
    if b.is_zero() {
        return Ok(zero_solution(tree));
    }
    let (unit, scale) = normalized(b);
    let nc = tree.cube_count();
    let nl = tree.leaf_count();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for q in 0..nc {
        rows.push(vec![(q, -1.0)]);
        rhs.push(0.0);
        for x in tree.leaves_below(q) {
            rows.push(vec![(q, 1.0), (nc + x, -1.0)]);
            rhs.push(0.0);
        }
    }
    // Variables: a_Q, then u_x >= a_Q for x in Q, then v_x >= u_x^p with
    // Σ |x| v_x < 1.
    rows.push((0..nl).map(|x| (nc + nl + x, tree.leaf_measure())).collect());
    rhs.push(1.0);
    let mut objective = unit.values().to_vec();
    objective.resize(nc + 2 * nl, 0.0);
    let problem = Problem {
        dim: nc + 2 * nl,
        objective,
        rows,
        rhs,
        power: Some(PowerConstraint {
            pairs: (0..nl).map(|x| (nc + x, nc + nl + x)).collect(),
            exponent: p,
        }),
    };
    let mut start = vec![0.25; nc];
    start.resize(nc + nl, 0.5);
    start.resize(nc + 2 * nl, 0.75f64.powf(p));
    let sol = barrier::solve(&problem, start)?;

    let candidate = DyadicField::new(tree, sol.z[..nc].iter().map(|v| v.max(0.0)).collect())?;
    let (warm, _) = if p > 1.0 {
        extremal_f_for_carleson(b, conjugate(p))?
    } else {
        extremal_f_for_carleson(b, f64::INFINITY)?
    };
    let mut best: Option<(f64, DyadicField)> = None;
    for a in [candidate, warm] {
        if let Some((value, norm)) = nt_ratio(&a, &unit, p)? {
            if best.as_ref().is_none_or(|(v, _)| value > *v) {
                best = Some((value, a.scaled(norm.recip())));
            }
        }
    }
    let (value, argmax) = best.ok_or(Error::Solver("no admissible point found"))?;
    Ok(OracleSolution {
        value: value * scale,
        upper_bound: (sol.value + sol.gap).max(value) * scale,
        argmax,
        newton_steps: sol.newton_steps,
    })
}

pub fn solve_cball(a: &DyadicField, p_prime: f64) -> Result<OracleSolution> {
    if !(p_prime > 1.0) {
        return Err(Error::Exponent {
            name: "p'",
            value: p_prime,
        });
    }
    let tree = *a.tree();
    check_size(&tree)?;
    if a.is_zero() {
        return Ok(zero_solution(tree));
    }
    let (unit, scale) = normalized(a);
    let nc = tree.cube_count();
    let nl = tree.leaf_count();
    let finite = p_prime.is_finite();
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for r in 0..nc {
        rows.push(vec![(r, -1.0)]);
        rhs.push(0.0);
    }
    for q in 0..nc {
        let measure = tree.cube(q).measure();
        let inside = subtree_members(&tree, q);
        if finite {
            for x in tree.leaves_below(q) {
                let mut row: Vec<(usize, f64)> = inside.iter().map(|&r| (r, 1.0)).collect();
                row.push((nc + x, -measure));
                rows.push(row);
                rhs.push(0.0);
            }
        } else {
            rows.push(inside.iter().map(|&r| (r, 1.0)).collect());
            rhs.push(measure);
        }
    }
    // Finite p': u_x bounds C b on the leaves, v_x >= u_x^{p'}, Σ |x| v_x < 1.
    let dim = if finite { nc + 2 * nl } else { nc };
    if finite {
        rows.push((0..nl).map(|x| (nc + nl + x, tree.leaf_measure())).collect());
        rhs.push(1.0);
    }
    let mut objective = unit.values().to_vec();
    objective.resize(dim, 0.0);
    let power = finite.then(|| PowerConstraint {
        pairs: (0..nl).map(|x| (nc + x, nc + nl + x)).collect(),
        exponent: p_prime,
    });
    let eps = 0.25 * tree.leaf_measure() / nc as f64;
    let mut start = vec![eps; nc];
    if finite {
        start.resize(nc + nl, 0.5);
        start.resize(dim, 0.75f64.powf(p_prime));
    }
    let problem = Problem {
        dim,
        objective,
        rows,
        rhs,
        power,
    };
    let sol = barrier::solve(&problem, start)?;

    let candidate = DyadicField::new(tree, sol.z[..nc].iter().map(|v| v.max(0.0)).collect())?;
    let p = conjugate(p_prime);
    // The level-set construction is not homogeneous, so it is built from
    // `a` itself; the ratio does not depend on the scaling of `b`.
    let (warm, _) = if p > 1.0 {
        extremal_g_for_ntmax(a, p)?
    } else {
        extremal_g_for_ntmax_p1(a)?
    };
    let mut best: Option<(f64, DyadicField)> = None;
    for b in [candidate, warm] {
        if let Some((value, norm)) = c_ratio(&unit, &b, p_prime)? {
            if best.as_ref().is_none_or(|(v, _)| value > *v) {
                best = Some((value, b.scaled(norm.recip())));
            }
        }
    }
    let (value, argmax) = best.ok_or(Error::Solver("no admissible point found"))?;
    Ok(OracleSolution {
        value: value * scale,
        upper_bound: (sol.value + sol.gap).max(value) * scale,
        argmax,
        newton_steps: sol.newton_steps,
    })
}

/// Ids of the cubes inside cube `q`, `q` included.
fn subtree_members(tree: &TreeConfig, q: usize) -> Vec<usize> {
    let mut out = vec![q];
    let mut i = 0;
    while i < out.len() {
        out.extend(tree.child_ids(out[i]));
        i += 1;
    }
    out
}

/// Which dual norm an extremizer is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// The field is `b`, the exponent `p'`; the explicit field `a` from
    /// [`extremal_f_for_carleson`] is compared with the `‖N a‖_p` ball oracle.
    NtBall,
    /// The field is `a`, the exponent `p`; the explicit `b` from
    /// [`extremal_g_for_ntmax`] (or its `p = 1` version) is compared with the
    /// `‖C b‖_{p'}` ball oracle.
    CarlesonBall,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    /// Ratio attained by the explicit construction.
    pub extremizer: Option<f64>,
    pub oracle: f64,
    pub oracle_upper_bound: f64,
    /// `extremizer / oracle`; `None` for zero fields.
    pub ratio: Option<f64>,
}

pub fn oracle_vs_extremizer(
    field: &DyadicField,
    exponent: f64,
    direction: Direction,
) -> Result<OracleComparison> {
    let (extremizer, sol) = match direction {
        Direction::NtBall => {
            let (_, report) = extremal_f_for_carleson(field, exponent)?;
            let attained = report.ratio.map(|r| r * report.carleson_norm);
            (attained, solve_ntball(field, conjugate(exponent))?)
        }
        Direction::CarlesonBall => {
            let (_, report) = if exponent > 1.0 {
                extremal_g_for_ntmax(field, exponent)?
            } else {
                extremal_g_for_ntmax_p1(field)?
            };
            let attained = report.ratio.map(|r| r * report.nt_norm);
            (attained, solve_cball(field, conjugate(exponent))?)
        }
    };
    let ratio = extremizer.filter(|_| sol.value > 0.0).map(|e| e / sol.value);
    Ok(OracleComparison {
        extremizer,
        oracle: sol.value,
        oracle_upper_bound: sol.upper_bound,
        ratio,
    })
}
