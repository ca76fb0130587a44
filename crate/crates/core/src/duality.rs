//! The sequence pairing `Σ a_Q b_Q` between the non-tangential and Carleson
//! sides, its upper bound, and explicit near-extremizers in both directions.
//!
//! All constructions are exact single passes over the tree. Zero inputs give
//! zero extremizers and a report whose ratio is `None`.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods are missing without std
use num_traits::Float;

use crate::fields::{conjugate, region_power_mean, to_sequence};
use crate::functionals::{
    carleson_continuum, carleson_dyadic, carleson_r_dyadic, carleson_ratios, cube_averages,
    maximal_dyadic, modified_carleson_norm, nt_max_continuum, nt_max_dyadic,
};
use crate::geometry::{GeometryConfig, GridCube, TreeConfig};
use crate::random::FieldSpec;
use crate::{DyadicField, Error, ExponentConfig, GridFunction, Normalization, Result};

/// Default remainder-density threshold of the stopping forest.
pub const DEFAULT_STOPPING_THRESHOLD: f64 = 0.125;

/// `Σ_Q a_Q b_Q`.
pub fn pairing(a: &DyadicField, b: &DyadicField) -> Result<f64> {
    if a.tree() != b.tree() {
        return Err(Error::TreeMismatch);
    }
    Ok(a.values().iter().zip(b.values()).map(|(x, y)| x * y).sum())
}

/// `(∬ |f g|^r)^{1/r}`, summed cell by cell.
pub fn pairing_grid(f: &GridFunction, g: &GridFunction, r: f64) -> Result<f64> {
    f.same_grid(g)?;
    if !(r >= 1.0 && r.is_finite()) {
        return Err(Error::Exponent { name: "r", value: r });
    }
    let tree = f.tree();
    let mut total = 0.0;
    for id in 0..tree.cube_count() {
        let sum: f64 = f
            .region_cells(id)
            .iter()
            .zip(g.region_cells(id))
            .map(|(x, y)| (x * y).abs().powf(r))
            .sum();
        total += f.cell_volume(id) * sum;
    }
    Ok(total.powf(r.recip()))
}

/// Pairing and both norms for one pair of fields.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingReport {
    pub p: f64,
    pub p_prime: f64,
    pub pairing: f64,
    /// `‖N a‖_p`.
    pub nt_norm: f64,
    /// `‖C b‖_{p'}`.
    pub carleson_norm: f64,
    /// `pairing / (‖N a‖_p ‖C b‖_{p'})`; `None` when either norm vanishes.
    pub ratio: Option<f64>,
}

impl PairingReport {
    pub fn new(a: &DyadicField, b: &DyadicField, p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Exponent { name: "p", value: p });
        }
        let p_prime = conjugate(p);
        let pairing = pairing(a, b)?;
        let nt_norm = nt_max_dyadic(a).lp_norm(p)?;
        let carleson_norm = carleson_dyadic(b).lp_norm(p_prime)?;
        let denom = nt_norm * carleson_norm;
        Ok(Self {
            p,
            p_prime,
            pairing,
            nt_norm,
            carleson_norm,
            ratio: (denom > 0.0).then(|| pairing / denom),
        })
    }

    pub fn is_degenerate(&self) -> bool {
        self.ratio.is_none()
    }

    /// `pairing <= 2 ‖N a‖_p ‖C b‖_{p'}`, with a relative rounding allowance.
    pub fn within_upper_bound(&self) -> bool {
        self.pairing <= 2.0 * self.nt_norm * self.carleson_norm * (1.0 + 1e-12)
    }
}

/// Evaluates the pairing against `2 ‖N a‖_p ‖C b‖_{p'}`.
pub fn check_pairing_upper(a: &DyadicField, b: &DyadicField, p: f64) -> Result<PairingReport> {
    PairingReport::new(a, b, p)
}

/// A field `a` nearly attaining `‖C b‖_{p'} = sup Σ a_Q b_Q / ‖N a‖_p`.
///
/// For `p' = ∞` the cube `Q` with the largest Carleson ratio is found (first
/// in id order on ties) and `a = |Q|^{-1}` on the cubes inside `Q`, so
/// `‖N a‖_1 = 1` and the pairing equals `‖C b‖_∞`. For finite `p'`,
/// `a_R = (|R|^{-1} ∫_R C b)^{p'-1}`, which makes `N a = (M_D C b)^{p'-1}`.
pub fn extremal_f_for_carleson(b: &DyadicField, p_prime: f64) -> Result<(DyadicField, PairingReport)> {
    if !(p_prime > 1.0) {
        return Err(Error::Exponent {
            name: "p'",
            value: p_prime,
        });
    }
    let tree = *b.tree();
    let a = if b.is_zero() {
        DyadicField::zeros(tree)
    } else if p_prime == f64::INFINITY {
        let ratios = carleson_ratios(b);
        let (best, _) = ratios
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
        let below = tree.leaves_below(best);
        let height = tree.cube(best).measure().recip();
        let values = (0..tree.cube_count())
            .map(|id| {
                let leaves = tree.leaves_below(id);
                let inside = tree.level_of(id) >= tree.level_of(best)
                    && below.contains(&leaves.start);
                if inside {
                    height
                } else {
                    0.0
                }
            })
            .collect();
        DyadicField::new(tree, values)?
    } else {
        let means = cube_averages(&carleson_dyadic(b));
        DyadicField::new(tree, means.into_iter().map(|v| v.powf(p_prime - 1.0)).collect())?
    };
    let report = PairingReport::new(&a, b, conjugate(p_prime))?;
    Ok((a, report))
}

/// `Σ_{k = lo}^{hi} ρ^k` for `ρ = 2^{p-1} > 1`, `lo = None` meaning `-∞`.
fn geometric_dyadic_sum(lo: Option<i32>, hi: i32, p: f64) -> f64 {
    let rho = 2f64.powf(p - 1.0);
    let top = rho.powi(hi + 1);
    let bottom = lo.map_or(0.0, |lo| rho.powi(lo));
    (top - bottom) / (rho - 1.0)
}

/// Largest `k` with `2^k < v`, for `v > 0`.
fn largest_power_below(v: f64) -> i32 {
    let (mantissa, exp) = libm::frexp(v);
    if mantissa == 0.5 {
        exp - 2
    } else {
        exp - 1
    }
}

/// Smallest `k` with `2^k >= v`, for `v > 0`.
fn smallest_power_above(v: f64) -> i32 {
    let (mantissa, exp) = libm::frexp(v);
    if mantissa == 0.5 {
        exp - 1
    } else {
        exp
    }
}

/// A field `b` nearly attaining `‖N a‖_p = sup Σ a_Q b_Q / ‖C b‖_{p'}`
/// for `1 < p < ∞`.
///
/// A cube `Q` is selected at level `k` when `a_Q > 2^k` and no strict
/// ancestor exceeds `2^k`; then `b_Q = |Q| Σ_k 2^{k(p-1)}` over those `k`.
pub fn extremal_g_for_ntmax(a: &DyadicField, p: f64) -> Result<(DyadicField, PairingReport)> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Exponent { name: "p", value: p });
    }
    let tree = *a.tree();
    let mut ancestor_max = vec![0.0f64; tree.cube_count()];
    for id in 1..tree.cube_count() {
        let parent = tree.parent(id).unwrap_or(0);
        ancestor_max[id] = ancestor_max[parent].max(a.at(parent));
    }
    let values = (0..tree.cube_count())
        .map(|id| {
            let v = a.at(id);
            let above = ancestor_max[id];
            if !(v > above) {
                return 0.0;
            }
            let hi = largest_power_below(v);
            let lo = (above > 0.0).then(|| smallest_power_above(above));
            if lo.is_some_and(|lo| lo > hi) {
                return 0.0;
            }
            tree.cube(id).measure() * geometric_dyadic_sum(lo, hi, p)
        })
        .collect();
    let b = DyadicField::new(tree, values)?;
    let report = PairingReport::new(a, &b, p)?;
    Ok((b, report))
}

/// A cube chosen by the stopping-time construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectedCube {
    pub id: usize,
    pub generation: usize,
    /// Index (into [`StoppingForest::selected`]) of the selected cube this
    /// one was chosen under.
    pub parent: Option<usize>,
    /// Ids of the maximal subcubes `R` with `a_R > 2 a_Q`.
    pub children: Vec<usize>,
    /// `|E(Q)|`, the part of `Q` outside its selected children.
    pub remainder: f64,
    /// Whether `|E(Q)| > c |Q|`.
    pub large: bool,
}

/// Stopping-time forest of a field: starting from the root, the maximal
/// subcubes where the field more than doubles, recursively.
#[derive(Debug, Clone, PartialEq)]
pub struct StoppingForest {
    tree: TreeConfig,
    threshold: f64,
    selected: Vec<SelectedCube>,
}

impl StoppingForest {
    pub fn tree(&self) -> &TreeConfig {
        &self.tree
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Selected cubes in breadth-first order.
    pub fn selected(&self) -> &[SelectedCube] {
        &self.selected
    }

    /// Cube ids grouped by generation.
    pub fn generations(&self) -> Vec<Vec<usize>> {
        let depth = self.selected.iter().map(|s| s.generation).max().unwrap_or(0);
        let mut out = vec![Vec::new(); depth + 1];
        for s in &self.selected {
            out[s.generation].push(s.id);
        }
        out
    }

    /// Ids of selected cubes with a large remainder.
    pub fn large_class(&self) -> impl Iterator<Item = usize> + '_ {
        self.selected.iter().filter(|s| s.large).map(|s| s.id)
    }

    pub fn small_class(&self) -> impl Iterator<Item = usize> + '_ {
        self.selected.iter().filter(|s| !s.large).map(|s| s.id)
    }
}

/// Builds the stopping forest of `a` with remainder threshold `c`.
pub fn stopping_forest(a: &DyadicField, c: f64) -> Result<StoppingForest> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Parameter {
            name: "stopping threshold",
            value: c,
        });
    }
    let tree = *a.tree();
    let mut selected = vec![SelectedCube {
        id: 0,
        generation: 0,
        parent: None,
        children: Vec::new(),
        remainder: 0.0,
        large: false,
    }];
    let mut next = 0;
    let mut stack = Vec::new();
    while next < selected.len() {
        let id = selected[next].id;
        let bar = 2.0 * a.at(id);
        let mut children = Vec::new();
        stack.clear();
        stack.extend(tree.child_ids(id).rev());
        while let Some(r) = stack.pop() {
            if a.at(r) > bar {
                children.push(r);
            } else {
                stack.extend(tree.child_ids(r).rev());
            }
        }
        let measure = tree.cube(id).measure();
        let covered: f64 = children.iter().map(|&r| tree.cube(r).measure()).sum();
        let remainder = measure - covered;
        let generation = selected[next].generation + 1;
        for &r in &children {
            selected.push(SelectedCube {
                id: r,
                generation,
                parent: Some(next),
                children: Vec::new(),
                remainder: 0.0,
                large: false,
            });
        }
        let s = &mut selected[next];
        s.children = children;
        s.remainder = remainder;
        s.large = remainder > c * measure;
        next += 1;
    }
    Ok(StoppingForest {
        tree,
        threshold: c,
        selected,
    })
}

/// `p = 1` extremizer with the default threshold 1/8:
/// `b_Q = |Q|` on the large class of the stopping forest, zero elsewhere.
pub fn extremal_g_for_ntmax_p1(a: &DyadicField) -> Result<(DyadicField, PairingReport)> {
    extremal_g_for_ntmax_p1_with(a, DEFAULT_STOPPING_THRESHOLD)
}

/// As [`extremal_g_for_ntmax_p1`] with threshold `c`; then
/// `‖C b‖_∞ <= 1/c` and `pairing >= (1 - 2c)/2 ‖N a‖_1`.
pub fn extremal_g_for_ntmax_p1_with(a: &DyadicField, c: f64) -> Result<(DyadicField, PairingReport)> {
    let tree = *a.tree();
    let forest = stopping_forest(a, c)?;
    let mut b = DyadicField::zeros(tree);
    if !a.is_zero() {
        let mut values = b.values().to_vec();
        for id in forest.large_class() {
            values[id] = tree.cube(id).measure();
        }
        b = DyadicField::new(tree, values)?;
    }
    let report = PairingReport::new(a, &b, 1.0)?;
    Ok((b, report))
}

/// Lower estimate of the multiplier norm of `g` and how it compares with the
/// Carleson-side norms.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierReport {
    /// `max_f ‖f g‖_{L_r} / ‖N_*(W_q f)‖_p` over the candidates.
    pub estimate: f64,
    pub candidates: usize,
    /// `‖C^r(W_q̃ g)‖_p̃` over the test-cube family.
    pub carleson_norm: f64,
    /// `‖C^r_{L_q̃} g‖_p̃` on the dyadic tree.
    pub carleson_dyadic_norm: f64,
    /// `estimate / carleson_norm`.
    pub ratio: Option<f64>,
    /// The modified Carleson norm, reported when `p = q = r = 2`.
    pub modified_carleson: Option<f64>,
    pub modified_ratio: Option<f64>,
}

/// Structured candidates first, then seeded random grids.
fn multiplier_candidates(
    g: &GridFunction,
    exps: &ExponentConfig,
    budget: usize,
    seed: u64,
) -> Result<Vec<GridFunction>> {
    let tree = *g.tree();
    let m = g.subdivision();
    let r = exps.r;
    let mut out = Vec::with_capacity(budget);
    let push = |out: &mut Vec<GridFunction>, f: GridFunction| {
        if out.len() < budget {
            out.push(f);
        }
    };
    push(&mut out, GridFunction::constant(tree, m, 1.0)?);

    let shaped = holder_shape(g, exps)?;
    push(&mut out, shaped.clone());

    // Dyadic extremizer for the r-th powers, spread over each Whitney region
    // along the Hölder shape.
    let gr = g.abs_pow(r);
    let b = to_sequence(&gr, exps.q_tilde / r, Normalization::Mass)?;
    let (a, _) = extremal_f_for_carleson(&b, exps.p_tilde / r)?;
    let mut weighted = shaped;
    for id in 0..tree.cube_count() {
        let scale = a.at(id).powf(r.recip());
        weighted.region_cells_mut(id).iter_mut().for_each(|v| *v *= scale);
    }
    push(&mut out, weighted);

    let specs = [
        FieldSpec::Uniform { lo: 0.0, hi: 1.0 },
        FieldSpec::LogNormal { mu: 0.0, sigma: 1.0 },
        FieldSpec::Sparse {
            density: 0.2,
            sigma: 1.0,
        },
    ];
    let mut k = 0u64;
    while out.len() < budget {
        let spec = &specs[(k % specs.len() as u64) as usize];
        out.push(spec.grid_function(tree, m, seed.wrapping_add(k))?);
        k += 1;
    }
    Ok(out)
}

/// On each Whitney region, the `f` with unit `L_q` average that is Hölder-dual
/// to `g` for the pair `(q, q̃)` after raising both to the power `r`.
fn holder_shape(g: &GridFunction, exps: &ExponentConfig) -> Result<GridFunction> {
    let tree = *g.tree();
    let mut f = g.abs_pow(1.0);
    for id in 0..tree.cube_count() {
        let cells = f.region_cells_mut(id);
        let top = cells.iter().fold(0.0f64, |m, &v| m.max(v));
        if top == 0.0 || exps.q == f64::INFINITY {
            cells.iter_mut().for_each(|v| *v = 1.0);
        } else if exps.q_tilde == f64::INFINITY {
            cells.iter_mut().for_each(|v| *v = if *v == top { 1.0 } else { 0.0 });
        } else {
            let e = exps.q_tilde / exps.q;
            cells.iter_mut().for_each(|v| *v = (*v / top).powf(e));
        }
        let mean = region_power_mean(cells, exps.q);
        if mean > 0.0 {
            cells.iter_mut().for_each(|v| *v /= mean);
        }
    }
    Ok(f)
}

/// Lower estimate of the multiplier norm of `g` from `N_{p,q}` to `L_r`,
/// maximizing over `budget` candidate functions `f`.
pub fn multiplier_norm_estimate(
    g: &GridFunction,
    exps: ExponentConfig,
    budget: usize,
    geo: &GeometryConfig,
    family: &[GridCube],
    seed: u64,
) -> Result<MultiplierReport> {
    let candidates = multiplier_candidates(g, &exps, budget, seed)?;
    let mut estimate = 0.0f64;
    for f in &candidates {
        let top = pairing_grid(f, g, exps.r)?;
        if top == 0.0 {
            continue;
        }
        let nt = nt_max_continuum(f, exps.q, geo)?.value.lp_norm(exps.p)?;
        if nt > 0.0 {
            estimate = estimate.max(top / nt);
        }
    }
    let carleson_norm = carleson_continuum(g, exps.r, exps.q_tilde, family, geo)?
        .value
        .lp_norm(exps.p_tilde)?;
    let carleson_dyadic_norm = carleson_r_dyadic(g, exps.r, exps.q_tilde)?.lp_norm(exps.p_tilde)?;
    let modified_carleson = if exps.p == 2.0 && exps.q == 2.0 && exps.r == 2.0 {
        Some(modified_carleson_norm(g, geo)?.value)
    } else {
        None
    };
    let ratio_to = |d: f64| (d > 0.0).then(|| estimate / d);
    Ok(MultiplierReport {
        estimate,
        candidates: candidates.len(),
        carleson_norm,
        carleson_dyadic_norm,
        ratio: ratio_to(carleson_norm),
        modified_carleson,
        modified_ratio: modified_carleson.and_then(ratio_to),
    })
}

/// `‖C b‖_{p'}^{p'}` bound for the finite-`p'` extremizer:
/// `(2^{p'} - 1) / (1 - 2^{1-p'})`.
pub fn carleson_extremizer_constant(p_prime: f64) -> f64 {
    (2f64.powf(p_prime) - 1.0) / (1.0 - 2f64.powf(1.0 - p_prime))
}

/// Pointwise `M_D h` bound factor for the finite-`p` extremizer:
/// `(1 - 2^{1-p})^{-1}`.
pub fn ntmax_extremizer_constant(p: f64) -> f64 {
    (1.0 - 2f64.powf(1.0 - p)).recip()
}

/// `M_D((N a)^{p-1})`, the pointwise majorant of `C b` (up to
/// [`ntmax_extremizer_constant`]) for `b` from [`extremal_g_for_ntmax`].
pub fn ntmax_extremizer_majorant(a: &DyadicField, p: f64) -> crate::BoundaryFunction {
    maximal_dyadic(&nt_max_dyadic(a).powf(p - 1.0))
}
