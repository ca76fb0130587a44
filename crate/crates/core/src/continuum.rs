//! Dyadic versus continuum norms on the same data, the Carleson versus
//! area-integral comparison, and the big-mean covering property.
//!
//! None of these comparisons has a known constant at this scale; the
//! functions measure ratios so suites can record and regression-test them.

use alloc::vec::Vec;

use crate::fields::{conjugate, to_sequence, whitney_average};
use crate::functionals::{area_integral, carleson_continuum, carleson_dyadic, nt_max_continuum, nt_max_dyadic};
use crate::geometry::{test_cube_family, GeometryConfig, GridCube, Region};
use crate::random::FieldSpec;
use crate::{Error, GridFunction, Normalization, Result, TreeConfig};

/// A continuum norm, its dyadic counterpart and their ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct NormComparison {
    pub continuum: f64,
    pub dyadic: f64,
    /// `continuum / dyadic`; `None` when the dyadic norm vanishes.
    pub ratio: Option<f64>,
    /// Evaluation nodes (or test cubes) behind the continuum value.
    pub nodes: usize,
}

impl NormComparison {
    fn new(continuum: f64, dyadic: f64, nodes: usize) -> Self {
        Self {
            continuum,
            dyadic,
            ratio: (dyadic > 0.0).then(|| continuum / dyadic),
            nodes,
        }
    }
}

/// `‖N_*(W_q f)‖_p` against `‖N(a)‖_p` with `a_Q` the `L_q` average of `f`
/// over `W_Q`.
pub fn compare_nt_norms(f: &GridFunction, p: f64, q: f64, geo: &GeometryConfig) -> Result<NormComparison> {
    let sampled = nt_max_continuum(f, q, geo)?;
    let continuum = sampled.value.lp_norm(p)?;
    let dyadic = nt_max_dyadic(&to_sequence(f, q, Normalization::Average)?).lp_norm(p)?;
    Ok(NormComparison::new(continuum, dyadic, sampled.nodes))
}

/// `‖C(W_{q'} g)‖_{p'}` over `family` against `‖C(b)‖_{p'}` with
/// `b_R = |W_R|^{1-1/q'} ‖g‖_{L_{q'}(W_R)}`.
pub fn compare_carleson_norms(
    g: &GridFunction,
    p_prime: f64,
    q_prime: f64,
    geo: &GeometryConfig,
    family: &[GridCube],
) -> Result<NormComparison> {
    let sampled = carleson_continuum(g, 1.0, q_prime, family, geo)?;
    let continuum = sampled.value.lp_norm(p_prime)?;
    let dyadic = carleson_dyadic(&to_sequence(g, q_prime, Normalization::Mass)?).lp_norm(p_prime)?;
    Ok(NormComparison::new(continuum, dyadic, sampled.nodes))
}

/// `‖C²(W_2 g)‖_p` against `‖A² g‖_p`.
#[derive(Debug, Clone, PartialEq)]
pub struct TentReport {
    pub carleson: f64,
    pub area: f64,
    /// `carleson / area`; `None` when the area integral vanishes.
    pub ratio: Option<f64>,
}

/// Carleson functional versus area integral in `L_p`, `2 < p < ∞`.
pub fn tent_space_check(
    g: &GridFunction,
    p: f64,
    family: &[GridCube],
    geo: &GeometryConfig,
) -> Result<TentReport> {
    if !(p > 2.0 && p.is_finite()) {
        return Err(Error::Exponent { name: "p", value: p });
    }
    let carleson = carleson_continuum(g, 2.0, 2.0, family, geo)?.value.lp_norm(p)?;
    let area = area_integral(g).lp_norm(p)?;
    Ok(TentReport {
        carleson,
        area,
        ratio: (area > 0.0).then(|| carleson / area),
    })
}

/// Outcome of the big-mean covering check.
#[derive(Debug, Clone, PartialEq)]
pub struct BigMean {
    /// Index of the cover element with the largest mean.
    pub index: usize,
    pub best_mean: f64,
    /// Mean of `u` over the covered region.
    pub region_mean: f64,
    /// `region_mean / (C N)`.
    pub bound: f64,
    pub holds: bool,
}

/// Given `W ⊆ W_1 ∪ ... ∪ W_N` with `|W_j| <= C |W|`, finds a `W_j` with
/// `mean_{W_j} u >= mean_W u / (C N)`. All regions are clipped to the data
/// domain of `u`; covering is the caller's responsibility. The comparison
/// allows a relative rounding error of `1e-12`.
pub fn big_mean_witness(u: &GridFunction, region: &Region, cover: &[Region], c: f64) -> Result<BigMean> {
    if cover.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let domain = u.data_domain();
    let clipped_volume = |r: &Region| r.intersect(&domain).map_or(0.0, |r| r.volume());
    let base = clipped_volume(region);
    if base == 0.0 {
        return Err(Error::EmptyRegion);
    }
    for piece in cover {
        if clipped_volume(piece) > c * base * (1.0 + 1e-12) {
            return Err(Error::Parameter {
                name: "cover size constant",
                value: c,
            });
        }
    }
    let region_mean = whitney_average(u, 1.0, region)?;
    let mut index = 0;
    let mut best_mean = f64::NEG_INFINITY;
    for (j, piece) in cover.iter().enumerate() {
        let mean = match whitney_average(u, 1.0, piece) {
            Ok(v) => v,
            Err(Error::EmptyRegion) => continue,
            Err(e) => return Err(e),
        };
        if mean > best_mean {
            best_mean = mean;
            index = j;
        }
    }
    let bound = region_mean / (c * cover.len() as f64);
    Ok(BigMean {
        index,
        best_mean,
        region_mean,
        bound,
        holds: best_mean >= bound * (1.0 - 1e-12),
    })
}

/// Settings of one equivalence experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceSettings {
    pub dim: usize,
    pub m: usize,
    pub stride: u32,
    pub geometry: GeometryConfig,
}

impl Default for EquivalenceSettings {
    fn default() -> Self {
        Self {
            dim: 1,
            m: 2,
            stride: 2,
            geometry: GeometryConfig::default(),
        }
    }
}

/// Ratios of one seeded case at the base resolution and after refining the
/// grid (`m -> 2m`) or the test-cube family (`stride -> stride / 2`).
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceCase {
    pub seed: u64,
    pub depth: usize,
    pub p: f64,
    pub q: f64,
    pub nt: NormComparison,
    pub nt_refined: NormComparison,
    pub carleson: NormComparison,
    pub carleson_refined: NormComparison,
    pub carleson_dense: NormComparison,
}

/// Random input for seed `seed`: uniform, log-normal and sparse in turn.
pub fn suite_spec(seed: u64) -> FieldSpec {
    match seed % 3 {
        0 => FieldSpec::Uniform { lo: 0.0, hi: 1.0 },
        1 => FieldSpec::LogNormal { mu: 0.0, sigma: 1.0 },
        _ => FieldSpec::Sparse {
            density: 0.3,
            sigma: 1.0,
        },
    }
}

/// One case: the non-tangential comparison at `(p, q)` and the Carleson
/// comparison at the conjugate pair `(p', q')`, on the same random grid.
pub fn equivalence_case(
    seed: u64,
    depth: usize,
    p: f64,
    q: f64,
    settings: &EquivalenceSettings,
) -> Result<EquivalenceCase> {
    let tree = TreeConfig::new(settings.dim, depth)?;
    let f = suite_spec(seed).grid_function(tree, settings.m, seed)?;
    let fine = f.refine(2)?;
    let geo = &settings.geometry;
    let (pp, qp) = (conjugate(p), conjugate(q));
    let family = test_cube_family(&tree, settings.stride)?;
    let dense = test_cube_family(&tree, (settings.stride / 2).max(1))?;
    Ok(EquivalenceCase {
        seed,
        depth,
        p,
        q,
        nt: compare_nt_norms(&f, p, q, geo)?,
        nt_refined: compare_nt_norms(&fine, p, q, geo)?,
        carleson: compare_carleson_norms(&f, pp, qp, geo, &family)?,
        carleson_refined: compare_carleson_norms(&fine, pp, qp, geo, &family)?,
        carleson_dense: compare_carleson_norms(&f, pp, qp, geo, &dense)?,
    })
}

/// Relative change `|b/a - 1|` of a ratio under refinement.
pub fn relative_change(a: &NormComparison, b: &NormComparison) -> Option<f64> {
    match (a.ratio, b.ratio) {
        (Some(x), Some(y)) if x > 0.0 => Some((y / x - 1.0).abs()),
        _ => None,
    }
}

/// Smallest and largest ratio of a collection.
pub fn envelope<'a>(items: impl IntoIterator<Item = &'a NormComparison>) -> Option<(f64, f64)> {
    let ratios: Vec<f64> = items.into_iter().filter_map(|c| c.ratio).collect();
    if ratios.is_empty() {
        return None;
    }
    Some(ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn line(depth: usize) -> TreeConfig {
        TreeConfig::new(1, depth).unwrap()
    }

    #[test]
    fn constants_compare_equally() {
        let tree = line(3);
        let geo = GeometryConfig::default();
        let f = GridFunction::constant(tree, 2, 1.7).unwrap();
        let c = compare_nt_norms(&f, 2.0, 2.0, &geo).unwrap();
        assert_relative_eq!(c.continuum, 1.7, max_relative = 1e-14);
        assert_relative_eq!(c.dyadic, 1.7, max_relative = 1e-14);
        assert_relative_eq!(c.ratio.unwrap(), 1.0, max_relative = 1e-14);

        let family = test_cube_family(&tree, 2).unwrap();
        let a = compare_carleson_norms(&f, 2.0, 2.0, &geo, &family).unwrap();
        let b = compare_carleson_norms(&f.scaled(3.0), 2.0, 2.0, &geo, &family).unwrap();
        assert_relative_eq!(a.ratio.unwrap(), b.ratio.unwrap(), max_relative = 1e-14);

        let zero = GridFunction::zeros(tree, 2).unwrap();
        assert!(compare_carleson_norms(&zero, 2.0, 2.0, &geo, &family).unwrap().ratio.is_none());
    }

    #[test]
    fn indicator_is_seen_on_both_sides() {
        let tree = line(2);
        let geo = GeometryConfig::default();
        let q = crate::DyadicCube::new(1, alloc::vec![0]);
        let f = GridFunction::indicator(tree, 2, &q, 1.0).unwrap();
        let c = compare_nt_norms(&f, 2.0, 2.0, &geo).unwrap();
        assert!(c.continuum > 0.0 && c.dyadic > 0.0);
        let fine = compare_nt_norms(&f.refine(2).unwrap(), 2.0, 2.0, &geo).unwrap();
        assert!(relative_change(&c, &fine).unwrap() < 0.2);
    }

    #[test]
    fn tent_requires_large_p() {
        let tree = line(3);
        let g = GridFunction::constant(tree, 2, 1.0).unwrap();
        let family = test_cube_family(&tree, 2).unwrap();
        let geo = GeometryConfig::default();
        assert!(tent_space_check(&g, 2.0, &family, &geo).is_err());
        let a = tent_space_check(&g, 4.0, &family, &geo).unwrap();
        let b = tent_space_check(&g.scaled(0.5), 4.0, &family, &geo).unwrap();
        assert_relative_eq!(a.ratio.unwrap(), b.ratio.unwrap(), max_relative = 1e-13);
        let zero = GridFunction::zeros(tree, 2).unwrap();
        let z = tent_space_check(&zero, 4.0, &family, &geo).unwrap();
        assert_eq!((z.carleson, z.area, z.ratio), (0.0, 0.0, None));
    }

    #[test]
    fn big_mean_on_a_split_region() {
        let tree = line(3);
        let u = GridFunction::from_cells(tree, 2, |id, it, _| (id % 3 + it) as f64).unwrap();
        let w = Region::new((0.3, 0.9), alloc::vec![(0.1, 0.7)]).unwrap();
        let cover = [
            Region::new((0.3, 0.6), alloc::vec![(0.1, 0.7)]).unwrap(),
            Region::new((0.55, 0.9), alloc::vec![(0.05, 0.7)]).unwrap(),
        ];
        let r = big_mean_witness(&u, &w, &cover, 1.0).unwrap();
        assert!(r.holds);
        assert!(big_mean_witness(&u, &w, &cover, 0.1).is_err());
    }

    #[test]
    fn suite_case_runs() {
        let case = equivalence_case(3, 3, 2.0, 2.0, &EquivalenceSettings::default()).unwrap();
        assert!(case.nt.ratio.is_some() && case.carleson.ratio.is_some());
        assert_eq!(case.nt.dyadic, case.nt_refined.dyadic);
        assert!(case.carleson_dense.continuum >= case.carleson.continuum);
    }
}
