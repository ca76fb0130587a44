//! Log-barrier interior-point method for
//! `max c·z` subject to sparse linear rows `A z < h` and power epigraph
//! constraints `v > u^e` (`e >= 1`), the latter with the barrier
//! `-log(v^{1/e} - u) - log v`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)] // inherent float methods are missing without std
use num_traits::Float;

use crate::{Error, Result};

/// Epigraph constraints `v_i > u_i^e` (`u_i, v_i > 0`), one pair per entry.
pub(crate) struct PowerConstraint {
    pub pairs: Vec<(usize, usize)>,
    pub exponent: f64,
}

pub(crate) struct Problem {
    pub dim: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
    pub power: Option<PowerConstraint>,
}

pub(crate) struct Solution {
    pub z: Vec<f64>,
    pub value: f64,
    /// Bound on the distance to the optimum from the barrier duality gap.
    pub gap: f64,
    pub newton_steps: usize,
}

const GROWTH: f64 = 8.0;
const RELATIVE_GAP: f64 = 1e-9;
const MAX_OUTER: usize = 80;
const MAX_NEWTON: usize = 500;

impl Problem {
    fn barrier_terms(&self) -> f64 {
        let pairs = self.power.as_ref().map_or(0, |pc| pc.pairs.len());
        (self.rows.len() + 2 * pairs) as f64
    }

    fn slacks(&self, z: &[f64], out: &mut Vec<f64>) -> bool {
        out.clear();
        for (row, &h) in self.rows.iter().zip(&self.rhs) {
            let s = h - row.iter().map(|&(i, c)| c * z[i]).sum::<f64>();
            if !(s > 0.0) {
                return false;
            }
            out.push(s);
        }
        true
    }

    /// `Σ -log(v^{1/e} - u) - log v`, or `None` outside the domain.
    fn power_barrier(&self, z: &[f64]) -> Option<f64> {
        let Some(pc) = &self.power else {
            return Some(0.0);
        };
        let mut total = 0.0;
        for &(u, v) in &pc.pairs {
            if !(z[v] > 0.0) {
                return None;
            }
            let h = z[v].powf(pc.exponent.recip()) - z[u];
            if !(h > 0.0) {
                return None;
            }
            total -= h.ln() + z[v].ln();
        }
        Some(total)
    }

    /// Barrier objective `-t c·z - Σ log s + power barrier`.
    fn merit(&self, t: f64, z: &[f64], scratch: &mut Vec<f64>) -> Option<f64> {
        if !self.slacks(z, scratch) {
            return None;
        }
        let power = self.power_barrier(z)?;
        let lin: f64 = self.objective.iter().zip(z).map(|(c, x)| c * x).sum();
        let logs: f64 = scratch.iter().map(|s| s.ln()).sum();
        Some(-t * lin - logs + power)
    }

    fn value(&self, z: &[f64]) -> f64 {
        self.objective.iter().zip(z).map(|(c, x)| c * x).sum()
    }
}

/// Newton direction of the barrier objective at a strictly feasible `z`.
fn newton_direction(
    problem: &Problem,
    t: f64,
    z: &[f64],
    slacks: &[f64],
) -> Result<(DVector<f64>, DVector<f64>)> {
    let d = problem.dim;
    let mut grad = DVector::from_iterator(d, problem.objective.iter().map(|c| -t * c));
    let mut hess = DMatrix::<f64>::zeros(d, d);
    for (row, &s) in problem.rows.iter().zip(slacks) {
        let inv = s.recip();
        for &(i, ci) in row {
            grad[i] += ci * inv;
            for &(j, cj) in row {
                hess[(i, j)] += ci * cj * inv * inv;
            }
        }
    }
    if let Some(pc) = &problem.power {
        let k = pc.exponent.recip();
        for &(u, v) in &pc.pairs {
            let root = z[v].powf(k);
            let h = root - z[u];
            let inv = h.recip();
            // h = v^k - u: dh/du = -1, dh/dv = k v^{k-1}, d²h/dv² = k(k-1) v^{k-2}.
            let hv = k * root / z[v];
            let hvv = k * (k - 1.0) * root / (z[v] * z[v]);
            grad[u] += inv;
            grad[v] -= hv * inv + z[v].recip();
            hess[(u, u)] += inv * inv;
            hess[(u, v)] -= hv * inv * inv;
            hess[(v, u)] -= hv * inv * inv;
            hess[(v, v)] += hv * hv * inv * inv - hvv * inv + (z[v] * z[v]).recip();
        }
    }
    let scale = (0..d).map(|i| hess[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut shift = 0.0;
    loop {
        let mut h = hess.clone();
        for i in 0..d {
            h[(i, i)] += shift;
        }
        if let Some(chol) = h.cholesky() {
            let step = chol.solve(&(-&grad));
            return Ok((step, grad));
        }
        shift = if shift == 0.0 { 1e-14 * scale } else { shift * 100.0 };
        if shift > scale {
            return Err(Error::Solver("singular Newton system"));
        }
    }
}

pub(crate) fn solve(problem: &Problem, start: Vec<f64>) -> Result<Solution> {
    let mut z = start;
    let mut slacks = Vec::with_capacity(problem.rows.len());
    let mut scratch = Vec::with_capacity(problem.rows.len());
    if problem.merit(1.0, &z, &mut scratch).is_none() {
        return Err(Error::Solver("starting point is not strictly feasible"));
    }
    let m = problem.barrier_terms();
    // Callers normalize the objective and start at O(1) points.
    let mut t = 1.0;
    let mut trial = vec![0.0; problem.dim];
    let mut newton_steps = 0;
    for _ in 0..MAX_OUTER {
        let mut centered = false;
        for _ in 0..MAX_NEWTON {
            problem.slacks(&z, &mut slacks);
            let (step, grad) = newton_direction(problem, t, &z, &slacks)?;
            let slope = grad.dot(&step);
            if -slope / 2.0 <= 1e-9 {
                centered = true;
                break;
            }
            newton_steps += 1;
            let current = problem
                .merit(t, &z, &mut scratch)
                .ok_or(Error::Solver("iterate left the feasible region"))?;
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                for ((o, &x), &s) in trial.iter_mut().zip(&z).zip(step.iter()) {
                    *o = x + alpha * s;
                }
                if let Some(f) = problem.merit(t, &trial, &mut scratch) {
                    if f < current && f <= current + 0.25 * alpha * slope {
                        accepted = true;
                        break;
                    }
                }
                alpha *= 0.5;
            }
            // No representable decrease left: centered to working precision.
            if !accepted {
                centered = true;
                break;
            }
            z.copy_from_slice(&trial);
        }
        if !centered {
            return Err(Error::Solver("centering did not converge"));
        }
        let value = problem.value(&z);
        if m / t <= RELATIVE_GAP * value.abs().max(1e-300) {
            return Ok(Solution {
                value,
                gap: m / t,
                z,
                newton_steps,
            });
        }
        t *= GROWTH;
    }
    let value = problem.value(&z);
    Ok(Solution {
        value,
        gap: m / t * GROWTH,
        z,
        newton_steps,
    })
}
