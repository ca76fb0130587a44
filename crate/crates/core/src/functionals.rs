//! Maximal functions, Carleson functionals, the area integral and the
//! modified Carleson norm.
//!
//! The dyadic versions are exact. The continuum versions take suprema over a
//! finite set of evaluation nodes or test cubes, so they approximate from
//! below; they report how many candidates were examined.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods are missing without std
use num_traits::Float;

use crate::fields::{advance_mixed, check_exponent, overlaps, region_power_mean, ColumnTable};
use crate::geometry::{exp2i, GeometryConfig, GridCube, Region, TreeConfig};
use crate::{BoundaryFunction, DyadicField, Error, GridFunction, Result};

/// Midpoint sub-steps per cell row in the `t` quadrature of the area integral.
pub const AREA_T_STEPS: usize = 8;

/// A sampled supremum together with the number of candidates examined.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampled<T> {
    pub value: T,
    pub nodes: usize,
}

/// `Σ_{R ⊆ Q} v_R` for every cube `Q`, accumulated bottom-up in id order.
pub fn subtree_sums(tree: &TreeConfig, values: &[f64]) -> Vec<f64> {
    let mut sums = values.to_vec();
    for id in (0..tree.cube_count()).rev() {
        let children = tree.child_ids(id);
        if !children.is_empty() {
            let below: f64 = children.map(|c| sums[c]).sum();
            sums[id] += below;
        }
    }
    sums
}

/// On each leaf, the maximum of `values` over its ancestor chain.
fn ancestor_max(tree: &TreeConfig, mut values: Vec<f64>) -> BoundaryFunction {
    for id in 1..values.len() {
        let parent = tree.parent(id).unwrap_or(0);
        values[id] = values[id].max(values[parent]);
    }
    let leaves = values.split_off(tree.level_offset(tree.depth()));
    BoundaryFunction::from_raw(*tree, leaves)
}

/// `N a(x) = max_{Q ∋ x} a_Q`.
pub fn nt_max_dyadic(a: &DyadicField) -> BoundaryFunction {
    ancestor_max(a.tree(), a.values().to_vec())
}

/// `|Q|^{-1} Σ_{R ⊆ Q} b_R` for every cube `Q`.
pub fn carleson_ratios(b: &DyadicField) -> Vec<f64> {
    let tree = b.tree();
    let mut sums = subtree_sums(tree, b.values());
    for level in 0..=tree.depth() {
        let scale = exp2i((level * tree.dim()) as i32);
        for id in tree.level_ids(level) {
            sums[id] *= scale;
        }
    }
    sums
}

/// `C b(x) = max_{Q ∋ x} |Q|^{-1} Σ_{R ⊆ Q} b_R`.
pub fn carleson_dyadic(b: &DyadicField) -> BoundaryFunction {
    ancestor_max(b.tree(), carleson_ratios(b))
}

fn check_r(r: f64) -> Result<()> {
    if r >= 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Exponent { name: "r", value: r })
    }
}

/// `C^r_{L_q̃} g(x) = max_{Q ∋ x} (|Q|^{-1} Σ_{R ⊆ Q} |W_R| ‖g‖_{avg L_q̃(W_R)}^r)^{1/r}`.
pub fn carleson_r_dyadic(g: &GridFunction, r: f64, q_tilde: f64) -> Result<BoundaryFunction> {
    check_r(r)?;
    if !(q_tilde >= r) {
        return Err(Error::ExponentRelation("need r <= q̃"));
    }
    let tree = *g.tree();
    let masses = (0..tree.cube_count())
        .map(|id| {
            let w = tree.cube(id).whitney_region().volume();
            w * region_power_mean(g.region_cells(id), q_tilde).powf(r)
        })
        .collect();
    let b = DyadicField::new(tree, masses)?;
    Ok(carleson_dyadic(&b).powf(r.recip()))
}

/// Cube averages of `h` for every cube of the tree.
pub fn cube_averages(h: &BoundaryFunction) -> Vec<f64> {
    let tree = h.tree();
    let mut values = vec![0.0; tree.cube_count()];
    let offset = tree.level_offset(tree.depth());
    for (v, &x) in values[offset..].iter_mut().zip(h.values()) {
        *v = x.abs();
    }
    let mut sums = subtree_sums(tree, &values);
    for (id, s) in sums.iter_mut().enumerate() {
        *s /= tree.leaves_below(id).len() as f64;
    }
    sums
}

/// `M_D h(x) = max_{Q ∋ x} |Q|^{-1} ∫_Q |h|`.
pub fn maximal_dyadic(h: &BoundaryFunction) -> BoundaryFunction {
    ancestor_max(h.tree(), cube_averages(h))
}

/// `W_q f` sampled at the cell centers of `f`'s grid.
pub fn whitney_averaged(f: &GridFunction, q: f64, geo: &GeometryConfig) -> Result<GridFunction> {
    check_exponent("q", q)?;
    let tree = *f.tree();
    let dim = tree.dim();
    let m = f.subdivision();
    let bottom = exp2i(-(tree.depth() as i32) - 1);
    let x_cells = f.cells_per_region() / m;
    let mut tables: Vec<Option<ColumnTable>> = (0..(tree.depth() + 1) * m).map(|_| None).collect();
    let mut centre = vec![0.0; dim];
    let mut x = vec![(0.0, 0.0); dim];
    let mut spans: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
    let mut cursor = vec![0usize; dim];
    let mut values = Vec::with_capacity(f.values().len());
    for id in 0..tree.cube_count() {
        let level = tree.level_of(id);
        for cell in 0..f.cells_per_region() {
            let t = f.cell_center(id, cell, &mut centre);
            let table = tables[level * m + cell / x_cells].get_or_insert_with(|| {
                let window = ((t / geo.c0).max(bottom), (t * geo.c0).min(1.0));
                ColumnTable::new(f, window, finest_level(&tree, t, geo), q)
            });
            let radius = geo.c1 * t;
            for (xi, &c) in x.iter_mut().zip(&centre) {
                *xi = (c - radius, c + radius);
            }
            values.push(table.average(&x, &mut spans, &mut cursor));
        }
    }
    GridFunction::new(tree, m, values)
}

/// Heights at which the cone is scanned: edges and midpoints of every cell
/// row, plus the heights where the `t`-window `(t/c0, c0 t)` starts or ends
/// on a row edge.
fn cone_heights(tree: &TreeConfig, m: usize, geo: &GeometryConfig) -> Vec<f64> {
    let bottom = exp2i(-(tree.depth() as i32) - 1);
    let mut edges = Vec::with_capacity((tree.depth() + 1) * m + 1);
    for level in 0..=tree.depth() {
        let t0 = exp2i(-(level as i32) - 1);
        edges.extend((0..m).map(|k| t0 + k as f64 * t0 / m as f64));
    }
    edges.push(1.0);
    let mut out: Vec<f64> = Vec::with_capacity(4 * edges.len());
    for &e in &edges {
        out.push(e);
        out.push(e * geo.c0);
        out.push(e / geo.c0);
    }
    for level in 0..=tree.depth() {
        let t0 = exp2i(-(level as i32) - 1);
        out.extend((0..m).map(|k| t0 + (k as f64 + 0.5) * t0 / m as f64));
    }
    out.retain(|&t| t >= bottom && t <= 1.0);
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * *b);
    out
}

/// Finest level met by the `t`-window at height `t`.
fn finest_level(tree: &TreeConfig, t: f64, geo: &GeometryConfig) -> usize {
    let lo = t / geo.c0;
    let mut level = 0;
    while level < tree.depth() && exp2i(-(level as i32) - 1) > lo {
        level += 1;
    }
    level
}

/// `N_*(W_q f)` at each leaf center `z`: the maximum of `W_q f(t, x)` over
/// `|x - z|_∞ <= a t`.
///
/// For fixed `t` the window average is a ratio of functions linear in each
/// coordinate between the points where a window edge crosses a grid line, so
/// along each axis only those points, the cone edges and `z` itself are
/// candidates; the maximum over `x` is exact. Heights are sampled by
/// [`cone_heights`].
pub fn nt_max_continuum(
    f: &GridFunction,
    q: f64,
    geo: &GeometryConfig,
) -> Result<Sampled<BoundaryFunction>> {
    check_exponent("q", q)?;
    let tree = *f.tree();
    let dim = tree.dim();
    let m = f.subdivision();
    let a = geo.aperture;
    let heights = cone_heights(&tree, m, geo);
    let bottom = exp2i(-(tree.depth() as i32) - 1);
    let mut nodes = 0;
    let mut best = vec![0.0f64; tree.leaf_count()];
    let mut candidates: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
    let mut cursor = vec![0usize; dim];
    let mut inner = vec![0usize; dim];
    let mut spans: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
    let mut x = vec![(0.0, 0.0); dim];
    for &t in &heights {
        let level = finest_level(&tree, t, geo);
        let window = ((t / geo.c0).max(bottom), (t * geo.c0).min(1.0));
        if !(window.1 > window.0) {
            continue;
        }
        let table = ColumnTable::new(f, window, level, q);
        let h = exp2i(-(level as i32)) / m as f64;
        let radius = geo.c1 * t;
        let reach = a * t;
        for (leaf, out) in best.iter_mut().enumerate() {
            let z = tree.leaf_center(leaf);
            for (c, &zi) in candidates.iter_mut().zip(&z) {
                let lo = (zi - reach).max(0.0);
                let hi = (zi + reach).min(1.0);
                c.clear();
                c.extend([(0, zi), (0, lo), (0, hi)]);
                let first = ((lo - radius) / h).floor().max(0.0) as usize;
                let last = ((hi + radius) / h).ceil().min(1.0 / h) as usize;
                for g in first..=last {
                    let line = g as f64 * h;
                    c.extend(
                        [line - radius, line + radius]
                            .into_iter()
                            .filter(|&v| v > lo && v < hi)
                            .map(|v| (0, v)),
                    );
                }
                c.sort_by(|u, v| u.1.total_cmp(&v.1));
                c.dedup_by(|u, v| u.1 == v.1);
            }
            cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                for ((xi, c), cand) in x.iter_mut().zip(&cursor).zip(&candidates) {
                    let centre = cand[*c].1;
                    *xi = (centre - radius, centre + radius);
                }
                *out = out.max(table.average(&x, &mut spans, &mut inner));
                nodes += 1;
                if !advance_mixed(&mut cursor, &candidates) {
                    break;
                }
            }
        }
    }
    Ok(Sampled {
        value: BoundaryFunction::from_raw(tree, best),
        nodes,
    })
}

fn check_family(tree: &TreeConfig, family: &[GridCube]) -> Result<()> {
    let grid = tree.grid_len();
    for cube in family {
        if cube.corner.len() != tree.dim() {
            return Err(Error::Dimension {
                expected: tree.dim(),
                got: cube.corner.len(),
            });
        }
        if cube.side == 0 || cube.corner.iter().any(|&c| c + cube.side > grid) {
            return Err(Error::CubeOutsideGrid);
        }
    }
    Ok(())
}

/// `C^r(W_{q'} g)` over a finite family of test cubes:
/// `max_{Q ∋ z} (|Q|^{-1} ∬_{(0, ℓ(Q)] × Q} (W_{q'} g)^r)^{1/r}`, with the
/// integrand sampled at cell centers and integrated exactly.
pub fn carleson_continuum(
    g: &GridFunction,
    r: f64,
    q_prime: f64,
    family: &[GridCube],
    geo: &GeometryConfig,
) -> Result<Sampled<BoundaryFunction>> {
    check_r(r)?;
    let tree = *g.tree();
    check_family(&tree, family)?;
    let integrand = whitney_averaged(g, q_prime, geo)?.abs_pow(r);
    let mut out = vec![0.0f64; tree.leaf_count()];
    for cube in family {
        let side = cube.side_length(&tree);
        let bx = Region {
            t: (0.0, side),
            x: cube.bounds(&tree),
        };
        let mut integral = 0.0;
        integrand.for_each_overlap(&bx, |v, w| integral += v * w);
        let value = (integral / cube.measure(&tree)).powf(r.recip());
        for leaf in cube.leaves(&tree) {
            out[leaf] = out[leaf].max(value);
        }
    }
    Ok(Sampled {
        value: BoundaryFunction::from_raw(tree, out),
        nodes: family.len(),
    })
}

/// `M h(z) = max_{Q ∋ z} |Q|^{-1} ∫_Q |h|` over a finite family of test cubes.
pub fn maximal_continuum(
    h: &BoundaryFunction,
    family: &[GridCube],
) -> Result<Sampled<BoundaryFunction>> {
    let tree = *h.tree();
    check_family(&tree, family)?;
    let mut out = vec![0.0f64; tree.leaf_count()];
    for cube in family {
        let leaves = cube.leaves(&tree);
        let avg = leaves.iter().map(|&l| h.values()[l].abs()).sum::<f64>() / leaves.len() as f64;
        for leaf in leaves {
            out[leaf] = out[leaf].max(avg);
        }
    }
    Ok(Sampled {
        value: BoundaryFunction::from_raw(tree, out),
        nodes: family.len(),
    })
}

/// `A²(g)(x) = (∬_{|y-x|_∞ < t} |g(t,y)|² dy dt / t^n)^{1/2}` at each leaf
/// center, with [`AREA_T_STEPS`] midpoint steps per cell row.
pub fn area_integral(g: &GridFunction) -> BoundaryFunction {
    area_integral_with(g, AREA_T_STEPS)
}

pub fn area_integral_with(g: &GridFunction, t_steps: usize) -> BoundaryFunction {
    let tree = *g.tree();
    let dim = tree.dim();
    let m = g.subdivision();
    let steps = t_steps.max(1);
    let mut spans: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
    let mut cursor = vec![0usize; dim];
    let mut global = vec![0usize; dim];
    let mut k = vec![0u32; dim];
    let mut ix = vec![0usize; dim];
    let out = (0..tree.leaf_count())
        .map(|leaf| {
            let x = tree.leaf_center(leaf);
            let mut sum = 0.0;
            for level in 0..=tree.depth() {
                let t0 = exp2i(-(level as i32) - 1);
                let ht = t0 / m as f64;
                let hx = 2.0 * ht;
                let count = m << level;
                let dt = ht / steps as f64;
                for it in 0..m {
                    for s in 0..steps {
                        let t = t0 + it as f64 * ht + (s as f64 + 0.5) * dt;
                        for (span, &xi) in spans.iter_mut().zip(&x) {
                            *span = overlaps(xi - t, xi + t, hx, count);
                        }
                        if spans.iter().any(Vec::is_empty) {
                            continue;
                        }
                        let weight = dt / t.powi(dim as i32);
                        cursor.iter_mut().for_each(|c| *c = 0);
                        loop {
                            let mut area = 1.0;
                            for i in 0..dim {
                                let (gi, len) = spans[i][cursor[i]];
                                global[i] = gi;
                                area *= len;
                            }
                            let v = g.values()[g.global_cell(level, it, &global, &mut k, &mut ix)];
                            sum += weight * area * v * v;
                            if !advance_mixed(&mut cursor, &spans) {
                                break;
                            }
                        }
                    }
                }
            }
            sum.sqrt()
        })
        .collect();
    BoundaryFunction::from_raw(tree, out)
}

/// `max_Q (|Q|^{-1} ∬_{Q̂} (W_∞ g)²)^{1/2}` over dyadic cubes, with `W_∞ g`
/// sampled at cell centers.
pub fn modified_carleson_norm(g: &GridFunction, geo: &GeometryConfig) -> Result<Sampled<f64>> {
    let tree = *g.tree();
    let w = whitney_averaged(g, f64::INFINITY, geo)?;
    let masses: Vec<f64> = (0..tree.cube_count())
        .map(|id| w.cell_volume(id) * w.region_cells(id).iter().map(|v| v * v).sum::<f64>())
        .collect();
    let field = DyadicField::new(tree, masses)?;
    let best = carleson_ratios(&field).into_iter().fold(0.0, f64::max);
    Ok(Sampled {
        value: best.sqrt(),
        nodes: w.values().len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{to_sequence, Normalization};
    use crate::geometry::{continuum_whitney, test_cube_family, DyadicCube};
    use approx::assert_relative_eq;

    fn line(depth: usize) -> TreeConfig {
        TreeConfig::new(1, depth).unwrap()
    }

    fn field(tree: TreeConfig, v: &[f64]) -> DyadicField {
        DyadicField::new(tree, v.to_vec()).unwrap()
    }

    #[test]
    fn nt_max_examples() {
        let tree = line(1);
        assert_eq!(nt_max_dyadic(&field(tree, &[1.0, 3.0, 2.0])).values(), &[3.0, 2.0]);
        let t = line(3);
        let root = DyadicField::delta(t, &t.root(), 2.5).unwrap();
        assert!(nt_max_dyadic(&root).values().iter().all(|&v| v == 2.5));
        assert!(nt_max_dyadic(&DyadicField::zeros(t)).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn carleson_examples() {
        let tree = line(1);
        assert_eq!(carleson_dyadic(&field(tree, &[0.0, 1.0, 0.0])).values(), &[2.0, 1.0]);
        let t = TreeConfig::new(2, 2).unwrap();
        let root = DyadicField::delta(t, &t.root(), 1.5).unwrap();
        assert!(carleson_dyadic(&root).values().iter().all(|&v| v == 1.5));
    }

    #[test]
    fn carleson_of_a_delta() {
        let tree = TreeConfig::new(1, 3).unwrap();
        let q = DyadicCube::new(2, vec![1]);
        let c = carleson_dyadic(&DyadicField::delta(tree, &q, 1.0).unwrap());
        for leaf in 0..tree.leaf_count() {
            let smallest = (0..=q.level)
                .rev()
                .map(|l| tree.cube(tree.ancestor_of_leaf(leaf, l)))
                .find(|a| q.is_within(a))
                .unwrap();
            assert_eq!(c.values()[leaf], 1.0 / smallest.measure());
        }
    }

    #[test]
    fn carleson_r_of_one() {
        // Σ_{R ⊆ Q} |W_R| / |Q| = ℓ(Q) (1 - 2^{-(D - level + 1)}), largest at the root.
        let tree = line(1);
        let g = GridFunction::constant(tree, 2, 1.0).unwrap();
        let c = carleson_r_dyadic(&g, 1.0, 1.0).unwrap();
        assert!(c.values().iter().all(|&v| v == 0.75));
        let c = carleson_r_dyadic(&g, 2.0, f64::INFINITY).unwrap();
        assert!(c.values().iter().all(|&v| (v - 0.75f64.sqrt()).abs() < 1e-15));
        let t = line(4);
        let g = GridFunction::constant(t, 1, 1.0).unwrap();
        let c = carleson_r_dyadic(&g, 1.0, 2.0).unwrap();
        assert!(c.values().iter().all(|&v| v == 1.0 - 1.0 / 32.0));
        assert!(carleson_r_dyadic(&g, 3.0, 2.0).is_err());
        assert!(carleson_r_dyadic(&g, 0.5, 2.0).is_err());
    }

    #[test]
    fn carleson_r_support() {
        let tree = line(3);
        let q = DyadicCube::new(2, vec![2]);
        let g = GridFunction::indicator(tree, 2, &q, 3.0).unwrap();
        let c = carleson_r_dyadic(&g, 1.0, 2.0).unwrap();
        let qid = tree.id(&q).unwrap();
        for leaf in 0..tree.leaf_count() {
            let expected = (0..=q.level)
                .map(|l| tree.ancestor_of_leaf(leaf, l))
                .filter(|&id| tree.leaves_below(id).contains(&tree.leaves_below(qid).start))
                .map(|id| 3.0 * q.whitney_region().volume() / tree.cube(id).measure())
                .fold(0.0, f64::max);
            assert_relative_eq!(c.values()[leaf], expected, max_relative = 1e-15);
        }
    }

    #[test]
    fn maximal_examples() {
        let tree = line(1);
        let h = BoundaryFunction::new(tree, vec![1.0, 0.0]).unwrap();
        assert_eq!(maximal_dyadic(&h).values(), &[1.0, 0.5]);
        let family = test_cube_family(&tree, 1).unwrap();
        let m = maximal_continuum(&h, &family).unwrap();
        assert_eq!(m.value.values(), &[1.0, 0.5]);
        assert_eq!(m.nodes, 3);
        let c = BoundaryFunction::constant(line(4), 0.3).unwrap();
        assert!(maximal_dyadic(&c).values().iter().all(|&v| (v - 0.3).abs() < 1e-15));
    }

    #[test]
    fn nt_max_continuum_of_constant() {
        let tree = TreeConfig::new(2, 2).unwrap();
        let f = GridFunction::constant(tree, 2, 1.25).unwrap();
        let n = nt_max_continuum(&f, 2.0, &GeometryConfig::default()).unwrap();
        assert!(n.value.values().iter().all(|&v| (v - 1.25).abs() < 1e-14));
        assert!(n.nodes > tree.leaf_count());
    }

    #[test]
    fn nt_max_continuum_reach() {
        // f = 1 on W_[0,1/2); at z = 0.9 the value is positive exactly when
        // some node in the cone has a Whitney box meeting that region.
        let tree = line(2);
        let q = DyadicCube::new(1, vec![0]);
        let f = GridFunction::indicator(tree, 2, &q, 1.0).unwrap();
        let target = q.whitney_region();
        let leaf = tree.leaf_of_point(&[0.9]).unwrap();
        let z = tree.leaf_center(leaf)[0];
        for aperture in [0.0, 0.25, 0.5, 1.0, 2.0] {
            let geo = GeometryConfig::default().with_aperture(aperture).unwrap();
            let n = nt_max_continuum(&f, 1.0, &geo).unwrap();
            let mut reaches = false;
            let mut x = [0.0];
            for id in 0..tree.cube_count() {
                for cell in 0..f.cells_per_region() {
                    let t = f.cell_center(id, cell, &mut x);
                    for node in [x[0], z] {
                        if (node - z).abs() <= aperture * t {
                            let w = continuum_whitney(t, &[node], &geo).unwrap();
                            reaches |= w.intersect(&target).is_some();
                        }
                    }
                }
            }
            assert_eq!(n.value.values()[leaf] > 0.0, reaches, "aperture {aperture}");
        }
    }

    #[test]
    fn aperture_monotone() {
        let tree = line(3);
        let f = GridFunction::from_cells(tree, 2, |id, it, xs| ((id * 5 + it * 3 + xs[0]) % 7) as f64)
            .unwrap();
        let mut prev: Option<BoundaryFunction> = None;
        for a in [0.0, 0.3, 1.0, 2.5] {
            let geo = GeometryConfig::default().with_aperture(a).unwrap();
            let n = nt_max_continuum(&f, 2.0, &geo).unwrap().value;
            if let Some(p) = prev {
                assert!(p.values().iter().zip(n.values()).all(|(x, y)| x <= y));
            }
            prev = Some(n);
        }
    }

    #[test]
    fn carleson_continuum_of_one() {
        let tree = line(3);
        let g = GridFunction::constant(tree, 2, 1.0).unwrap();
        let family = test_cube_family(&tree, 1).unwrap();
        let c = carleson_continuum(&g, 1.0, 2.0, &family, &GeometryConfig::default()).unwrap();
        // The root box loses the slab below 2^{-D-1}.
        for &v in c.value.values() {
            assert_relative_eq!(v, 1.0 - 1.0 / 16.0, max_relative = 1e-14);
        }
        let zero = GridFunction::zeros(tree, 2).unwrap();
        let c = carleson_continuum(&zero, 2.0, 1.0, &family, &GeometryConfig::default()).unwrap();
        assert!(c.value.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn carleson_continuum_grows_with_family() {
        let tree = line(4);
        let g = GridFunction::from_cells(tree, 2, |id, it, _| ((id * 3 + it) % 5) as f64).unwrap();
        let geo = GeometryConfig::default();
        let coarse = test_cube_family(&tree, 4).unwrap();
        let fine = test_cube_family(&tree, 1).unwrap();
        let a = carleson_continuum(&g, 2.0, 2.0, &coarse, &geo).unwrap();
        let b = carleson_continuum(&g, 2.0, 2.0, &fine, &geo).unwrap();
        assert!(b.nodes > a.nodes);
        assert!(a.value.values().iter().zip(b.value.values()).all(|(x, y)| x <= y));
        let bad = [GridCube {
            corner: vec![15],
            side: 2,
        }];
        assert!(carleson_continuum(&g, 1.0, 1.0, &bad, &geo).is_err());
    }

    #[test]
    fn area_integral_of_one() {
        let depth = 4;
        let tree = line(depth);
        let g = GridFunction::constant(tree, 2, 1.0).unwrap();
        let a = area_integral(&g);
        let leaf = tree.leaf_of_point(&[0.5]).unwrap();
        // Cone width min(2t, t + 1 - x, 1) over t in (2^{-D-1}, 1], x = 1/2 + 2^{-D-1}.
        let x = tree.leaf_center(leaf)[0];
        let bottom = exp2i(-(depth as i32) - 1);
        let exact = 2.0 * (1.0 - x - bottom)
            + (2.0 * x - 1.0)
            + (1.0 - x) * (x / (1.0 - x)).ln()
            + (1.0 / x).ln();
        assert_relative_eq!(a.values()[leaf], exact.sqrt(), max_relative = 1e-3);
        let fine = area_integral_with(&g, 64);
        assert_relative_eq!(fine.values()[leaf], exact.sqrt(), max_relative = 2e-5);
        assert!(area_integral(&GridFunction::zeros(tree, 2).unwrap())
            .values()
            .iter()
            .all(|&v| v == 0.0));
        let doubled = area_integral(&g.scaled(2.0));
        for (d, v) in doubled.values().iter().zip(a.values()) {
            assert_relative_eq!(*d, 2.0 * v, max_relative = 1e-14);
        }
    }

    #[test]
    fn modified_norm_of_one() {
        let depth = 3;
        let tree = line(depth);
        let g = GridFunction::constant(tree, 2, 1.0).unwrap();
        let n = modified_carleson_norm(&g, &GeometryConfig::default()).unwrap();
        assert_relative_eq!(n.value, (1.0 - exp2i(-(depth as i32) - 1)).sqrt(), max_relative = 1e-14);
        let z = modified_carleson_norm(&GridFunction::zeros(tree, 2).unwrap(), &GeometryConfig::default())
            .unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn dyadic_consistency() {
        let tree = line(3);
        let f = GridFunction::from_cells(tree, 2, |id, it, xs| ((id + 2 * it + xs[0]) % 3) as f64).unwrap();
        let a = to_sequence(&f, 2.0, Normalization::Average).unwrap();
        let n = nt_max_dyadic(&a);
        for leaf in 0..tree.leaf_count() {
            let chain = (0..=tree.depth()).map(|l| a.at(tree.ancestor_of_leaf(leaf, l)));
            assert_eq!(n.values()[leaf], chain.fold(0.0, f64::max));
        }
    }
}
