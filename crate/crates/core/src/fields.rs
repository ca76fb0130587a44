//! Sequences over cubes, piecewise-constant half-space functions and
//! piecewise-constant boundary functions.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods are missing without std
use num_traits::Float;

use crate::geometry::{exp2i, interleave, DyadicCube, Region, TreeConfig};
use crate::{Error, Result};

/// A nonnegative number per cube of the tree, stored in cube-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadicField {
    tree: TreeConfig,
    values: Vec<f64>,
}

impl DyadicField {
    pub fn new(tree: TreeConfig, values: Vec<f64>) -> Result<Self> {
        check_len(tree.cube_count(), values.len())?;
        check_nonnegative(&values)?;
        Ok(Self { tree, values })
    }

    pub fn zeros(tree: TreeConfig) -> Self {
        Self {
            tree,
            values: vec![0.0; tree.cube_count()],
        }
    }

    pub fn from_fn(tree: TreeConfig, mut f: impl FnMut(&DyadicCube) -> f64) -> Result<Self> {
        Self::new(tree, tree.cubes().map(|c| f(&c)).collect())
    }

    /// `v` on `cube`, zero elsewhere.
    pub fn delta(tree: TreeConfig, cube: &DyadicCube, v: f64) -> Result<Self> {
        let mut field = Self::zeros(tree);
        field.set(cube, v)?;
        Ok(field)
    }

    pub fn tree(&self) -> &TreeConfig {
        &self.tree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, id: usize) -> f64 {
        self.values[id]
    }

    pub fn get(&self, cube: &DyadicCube) -> Result<f64> {
        Ok(self.values[self.tree.id(cube)?])
    }

    pub fn set(&mut self, cube: &DyadicCube, v: f64) -> Result<()> {
        check_nonnegative(&[v])?;
        let id = self.tree.id(cube)?;
        self.values[id] = v;
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            tree: self.tree,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }
}

/// Leaf values of a function on the base cube, constant on each leaf cell.
/// Leaves are stored in Morton order (see [`TreeConfig::leaf_coords`]).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFunction {
    tree: TreeConfig,
    values: Vec<f64>,
}

impl BoundaryFunction {
    pub fn new(tree: TreeConfig, values: Vec<f64>) -> Result<Self> {
        check_len(tree.leaf_count(), values.len())?;
        check_nonnegative(&values)?;
        Ok(Self { tree, values })
    }

    pub(crate) fn from_raw(tree: TreeConfig, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), tree.leaf_count());
        Self { tree, values }
    }

    pub fn constant(tree: TreeConfig, c: f64) -> Result<Self> {
        Self::new(tree, vec![c; tree.leaf_count()])
    }

    pub fn tree(&self) -> &TreeConfig {
        &self.tree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at_point(&self, z: &[f64]) -> Result<f64> {
        Ok(self.values[self.tree.leaf_of_point(z)?])
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        boundary_lp_norm(self, p)
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.tree.leaf_measure()
    }

    /// Pointwise power, e.g. `(N a)^(p-1)`.
    pub fn powf(&self, e: f64) -> Self {
        self.map(|v| v.powf(e))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            tree: self.tree,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Measure of `{h > level}`.
    pub fn level_set_measure(&self, level: f64) -> f64 {
        self.values.iter().filter(|&&v| v > level).count() as f64 * self.tree.leaf_measure()
    }
}

/// `(Σ_leaves |h|^p 2^{-Dn})^{1/p}`, or the maximum for `p = ∞`.
pub fn boundary_lp_norm(h: &BoundaryFunction, p: f64) -> Result<f64> {
    check_exponent("p", p)?;
    if p == f64::INFINITY {
        return Ok(h.values.iter().fold(0.0, |m, &v| m.max(v.abs())));
    }
    let sum: f64 = h.values.iter().map(|&v| v.abs().powf(p)).sum();
    Ok((sum * h.tree.leaf_measure()).powf(p.recip()))
}

/// Piecewise-constant function on `(2^{-D-1}, 1] × [0,1)^n`, the union of
/// the Whitney regions of all cubes of the tree.
///
/// Each `W_Q` is split into `m` slices in `t` and `m` slices along every `x`
/// axis. The `m^{1+n}` cells of a region are stored row-major over
/// `(t, x_1, ..., x_n)`, so `t` varies slowest; regions follow cube-id order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    tree: TreeConfig,
    m: usize,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(tree: TreeConfig, m: usize, values: Vec<f64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::Parameter {
                name: "m",
                value: 0.0,
            });
        }
        let per = m.pow(1 + tree.dim() as u32);
        check_len(tree.cube_count() * per, values.len())?;
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(v));
        }
        Ok(Self { tree, m, values })
    }

    pub fn zeros(tree: TreeConfig, m: usize) -> Result<Self> {
        let per = m.pow(1 + tree.dim() as u32);
        Self::new(tree, m, vec![0.0; tree.cube_count() * per])
    }

    pub fn constant(tree: TreeConfig, m: usize, c: f64) -> Result<Self> {
        let per = m.pow(1 + tree.dim() as u32);
        Self::new(tree, m, vec![c; tree.cube_count() * per])
    }

    /// Builds a grid from a function of `(cube id, t index, x indices)`.
    pub fn from_cells(
        tree: TreeConfig,
        m: usize,
        mut f: impl FnMut(usize, usize, &[usize]) -> f64,
    ) -> Result<Self> {
        let layout = CellLayout::new(tree.dim(), m);
        let mut values = Vec::with_capacity(tree.cube_count() * layout.per_region);
        let mut xs = vec![0usize; tree.dim()];
        for id in 0..tree.cube_count() {
            for cell in 0..layout.per_region {
                let it = layout.decode(cell, &mut xs);
                values.push(f(id, it, &xs));
            }
        }
        Self::new(tree, m, values)
    }

    /// `v` on the whole of `W_Q`, zero elsewhere.
    pub fn indicator(tree: TreeConfig, m: usize, cube: &DyadicCube, v: f64) -> Result<Self> {
        let target = tree.id(cube)?;
        Self::from_cells(tree, m, |id, _, _| if id == target { v } else { 0.0 })
    }

    pub fn tree(&self) -> &TreeConfig {
        &self.tree
    }

    pub fn subdivision(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn cells_per_region(&self) -> usize {
        self.m.pow(1 + self.tree.dim() as u32)
    }

    pub fn region_cells(&self, id: usize) -> &[f64] {
        let per = self.cells_per_region();
        &self.values[id * per..(id + 1) * per]
    }

    pub fn region_cells_mut(&mut self, id: usize) -> &mut [f64] {
        let per = self.cells_per_region();
        &mut self.values[id * per..(id + 1) * per]
    }

    /// Volume of one cell of the Whitney region of cube `id`.
    pub fn cell_volume(&self, id: usize) -> f64 {
        let cube = self.tree.cube(id);
        cube.whitney_region().volume() / self.cells_per_region() as f64
    }

    pub fn cell_region(&self, id: usize, cell: usize) -> Region {
        let layout = CellLayout::new(self.tree.dim(), self.m);
        let mut xs = vec![0usize; self.tree.dim()];
        let it = layout.decode(cell, &mut xs);
        let cube = self.tree.cube(id);
        let side = cube.side();
        let m = self.m as f64;
        let ht = side / (2.0 * m);
        let hx = side / m;
        Region {
            t: (side / 2.0 + it as f64 * ht, side / 2.0 + (it + 1) as f64 * ht),
            x: cube
                .bounds()
                .iter()
                .zip(&xs)
                .map(|(&(lo, _), &ix)| (lo + ix as f64 * hx, lo + (ix + 1) as f64 * hx))
                .collect(),
        }
    }

    /// Center of a cell; writes `x` into `x_out` and returns `t`.
    pub fn cell_center(&self, id: usize, cell: usize, x_out: &mut [f64]) -> f64 {
        let r = self.cell_region(id, cell);
        for (o, &(lo, hi)) in x_out.iter_mut().zip(&r.x) {
            *o = 0.5 * (lo + hi);
        }
        0.5 * (r.t.0 + r.t.1)
    }

    /// `(2^{-D-1}, 1] × [0,1)^n`.
    pub fn data_domain(&self) -> Region {
        Region {
            t: (exp2i(-(self.tree.depth() as i32) - 1), 1.0),
            x: vec![(0.0, 1.0); self.tree.dim()],
        }
    }

    pub fn same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.tree != other.tree {
            return Err(Error::TreeMismatch);
        }
        if self.m != other.m {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// The same function on a grid with `factor` times more cells per axis.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::Parameter {
                name: "refinement factor",
                value: 0.0,
            });
        }
        let coarse = CellLayout::new(self.tree.dim(), self.m);
        let mut buf = vec![0usize; self.tree.dim()];
        Self::from_cells(self.tree, self.m * factor, |id, it, xs| {
            for (b, &x) in buf.iter_mut().zip(xs) {
                *b = x / factor;
            }
            self.region_cells(id)[coarse.encode(it / factor, &buf)]
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            tree: self.tree,
            m: self.m,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }

    /// `|g|^r`.
    pub fn abs_pow(&self, r: f64) -> Self {
        self.map(|v| v.abs().powf(r))
    }

    /// Flat index of the cell in row `it` of level `level` whose position on
    /// that level's global `x` grid (`2^level * m` cells per axis) is `global`.
    /// `k` and `ix` are scratch buffers of length `dim`.
    pub(crate) fn global_cell(
        &self,
        level: usize,
        it: usize,
        global: &[usize],
        k: &mut [u32],
        ix: &mut [usize],
    ) -> usize {
        let m = self.m;
        for ((k, ix), &g) in k.iter_mut().zip(ix.iter_mut()).zip(global) {
            *k = (g / m) as u32;
            *ix = g % m;
        }
        let id = self.tree.level_offset(level) + interleave(k, level);
        id * self.cells_per_region() + CellLayout::new(self.tree.dim(), m).encode(it, ix)
    }

    /// Visits every cell meeting `region` in positive measure together with
    /// the overlap volume.
    pub(crate) fn for_each_overlap(&self, region: &Region, mut visit: impl FnMut(f64, f64)) {
        let dim = self.tree.dim();
        let m = self.m;
        let mut spans: Vec<Vec<(usize, f64)>> = vec![Vec::new(); dim];
        let mut cursor = vec![0usize; dim];
        let mut global = vec![0usize; dim];
        let mut k = vec![0u32; dim];
        let mut ix = vec![0usize; dim];
        for level in 0..=self.tree.depth() {
            let t0 = exp2i(-(level as i32) - 1);
            let ht = t0 / m as f64;
            let rows = overlaps(region.t.0 - t0, region.t.1 - t0, ht, m);
            if rows.is_empty() {
                continue;
            }
            let hx = 2.0 * ht;
            let cells_per_axis = m << level;
            let mut empty = false;
            for (span, &(lo, hi)) in spans.iter_mut().zip(&region.x) {
                *span = overlaps(lo, hi, hx, cells_per_axis);
                empty |= span.is_empty();
            }
            if empty {
                continue;
            }
            cursor.iter_mut().for_each(|c| *c = 0);
            loop {
                let mut area = 1.0;
                for i in 0..dim {
                    let (g, len) = spans[i][cursor[i]];
                    area *= len;
                    global[i] = g;
                }
                for &(it, len) in &rows {
                    let index = self.global_cell(level, it, &global, &mut k, &mut ix);
                    visit(self.values[index], area * len);
                }
                if !advance_mixed(&mut cursor, &spans) {
                    break;
                }
            }
        }
    }
}

/// `|f|^q` integrated over the `t`-window (or its supremum for `q = ∞`) above
/// each cell of the `x` grid of `level`, row-major with axis 0 outermost.
/// Levels finer than `level` must not meet the window.
pub(crate) struct ColumnTable {
    values: Vec<f64>,
    cells_per_axis: usize,
    width: f64,
    window: f64,
    q: f64,
}

impl ColumnTable {
    pub(crate) fn new(f: &GridFunction, window: (f64, f64), level: usize, q: f64) -> Self {
        let dim = f.tree.dim();
        let m = f.m;
        let cells_per_axis = m << level;
        let width = exp2i(-(level as i32)) / m as f64;
        let area = width.powi(dim as i32);
        let mut values = vec![0.0; cells_per_axis.pow(dim as u32)];
        let mut coarse = vec![0usize; dim];
        let mut k = vec![0u32; dim];
        let mut ix = vec![0usize; dim];
        for lv in 0..=level {
            let t0 = exp2i(-(lv as i32) - 1);
            let rows = overlaps(window.0 - t0, window.1 - t0, t0 / m as f64, m);
            if rows.is_empty() {
                continue;
            }
            let shift = level - lv;
            for (flat, slot) in values.iter_mut().enumerate() {
                let mut rest = flat;
                for c in coarse.iter_mut().rev() {
                    *c = (rest % cells_per_axis) >> shift;
                    rest /= cells_per_axis;
                }
                for &(it, len) in &rows {
                    let v = f.values[f.global_cell(lv, it, &coarse, &mut k, &mut ix)].abs();
                    if q == f64::INFINITY {
                        *slot = slot.max(v);
                    } else {
                        *slot += v.powf(q) * len * area;
                    }
                }
            }
        }
        Self {
            values,
            cells_per_axis,
            width,
            window: window.1 - window.0,
            q,
        }
    }

    /// Average over the window times `x` clipped to `[0, 1]^n`; `spans` is
    /// scratch with one entry per axis.
    pub(crate) fn average(
        &self,
        x: &[(f64, f64)],
        spans: &mut [Vec<(usize, f64)>],
        cursor: &mut [usize],
    ) -> f64 {
        let mut volume = self.window;
        for (span, &(lo, hi)) in spans.iter_mut().zip(x) {
            let (lo, hi) = (lo.max(0.0), hi.min(1.0));
            volume *= hi - lo;
            *span = overlaps(lo, hi, self.width, self.cells_per_axis);
            if span.is_empty() {
                return 0.0;
            }
        }
        cursor.iter_mut().for_each(|c| *c = 0);
        let mut acc = 0.0;
        loop {
            let mut flat = 0;
            let mut fraction = 1.0;
            for (span, &c) in spans.iter().zip(cursor.iter()) {
                let (g, len) = span[c];
                flat = flat * self.cells_per_axis + g;
                fraction *= len / self.width;
            }
            let v = self.values[flat];
            if self.q == f64::INFINITY {
                acc = acc.max(v);
            } else {
                acc += fraction * v;
            }
            if !advance_mixed(cursor, spans) {
                break;
            }
        }
        if self.q == f64::INFINITY {
            acc
        } else {
            (acc / volume).powf(self.q.recip())
        }
    }
}

/// Index arithmetic for the cells of one Whitney region.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CellLayout {
    m: usize,
    x_cells: usize,
    pub(crate) per_region: usize,
}

impl CellLayout {
    pub(crate) fn new(dim: usize, m: usize) -> Self {
        let x_cells = m.pow(dim as u32);
        Self {
            m,
            x_cells,
            per_region: x_cells * m,
        }
    }

    pub(crate) fn encode(&self, it: usize, xs: &[usize]) -> usize {
        it * self.x_cells + xs.iter().fold(0, |acc, &x| acc * self.m + x)
    }

    pub(crate) fn decode(&self, cell: usize, xs: &mut [usize]) -> usize {
        let mut rest = cell % self.x_cells;
        for x in xs.iter_mut().rev() {
            *x = rest % self.m;
            rest /= self.m;
        }
        cell / self.x_cells
    }
}

/// Cells `[i h, (i+1) h)`, `0 <= i < count`, meeting `(lo, hi)` with the
/// overlap lengths.
pub(crate) fn overlaps(lo: f64, hi: f64, h: f64, count: usize) -> Vec<(usize, f64)> {
    let lo = lo.max(0.0);
    let hi = hi.min(h * count as f64);
    if !(hi > lo) {
        return Vec::new();
    }
    let first = ((lo / h).floor() as usize).min(count - 1);
    let last = ((hi / h).ceil() as usize).min(count);
    (first..last)
        .filter_map(|i| {
            let len = hi.min((i + 1) as f64 * h) - lo.max(i as f64 * h);
            (len > 0.0).then_some((i, len))
        })
        .collect()
}

pub(crate) fn advance_mixed(state: &mut [usize], spans: &[Vec<(usize, f64)>]) -> bool {
    for (digit, span) in state.iter_mut().zip(spans).rev() {
        *digit += 1;
        if *digit < span.len() {
            return true;
        }
        *digit = 0;
    }
    false
}

/// How a Whitney-region `L_q` norm becomes one number per cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// `|W_Q|^{-1/q} ‖f‖_{L_q(W_Q)}`, the average used on the maximal-function side.
    #[default]
    Average,
    /// `|W_Q|^{1-1/q} ‖g‖_{L_q(W_Q)}`, the mass used on the Carleson side.
    Mass,
}

/// `(|R|^{-1} ∬_R |f|^q)^{1/q}` over `region` clipped to the data domain,
/// or the essential supremum for `q = ∞`.
pub fn whitney_average(f: &GridFunction, q: f64, region: &Region) -> Result<f64> {
    check_exponent("q", q)?;
    if region.dim() != f.tree.dim() {
        return Err(Error::Dimension {
            expected: f.tree.dim(),
            got: region.dim(),
        });
    }
    let clipped = region
        .intersect(&f.data_domain())
        .ok_or(Error::EmptyRegion)?;
    let mut weight = 0.0;
    let mut acc = 0.0;
    if q == f64::INFINITY {
        f.for_each_overlap(&clipped, |v, w| {
            weight += w;
            acc = acc.max(v.abs());
        });
        return if weight > 0.0 { Ok(acc) } else { Err(Error::EmptyRegion) };
    }
    f.for_each_overlap(&clipped, |v, w| {
        weight += w;
        acc += w * v.abs().powf(q);
    });
    if weight > 0.0 {
        Ok((acc / weight).powf(q.recip()))
    } else {
        Err(Error::EmptyRegion)
    }
}

/// Power mean of the cells of one region (all cells have equal volume).
pub(crate) fn region_power_mean(cells: &[f64], q: f64) -> f64 {
    if q == f64::INFINITY {
        return cells.iter().fold(0.0, |m, &v| m.max(v.abs()));
    }
    let sum: f64 = cells.iter().map(|&v| v.abs().powf(q)).sum();
    (sum / cells.len() as f64).powf(q.recip())
}

/// Restricts `f` to every Whitney region and records its normalized `L_q` norm.
pub fn to_sequence(f: &GridFunction, q: f64, norm: Normalization) -> Result<DyadicField> {
    check_exponent("q", q)?;
    let tree = f.tree;
    let values = (0..tree.cube_count())
        .map(|id| {
            let avg = region_power_mean(f.region_cells(id), q);
            match norm {
                Normalization::Average => avg,
                Normalization::Mass => tree.cube(id).whitney_region().volume() * avg,
            }
        })
        .collect();
    DyadicField::new(tree, values)
}

/// Hölder exponent `p'` with `1/p + 1/p' = 1`.
pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p == f64::INFINITY {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Exponents with `1/p + 1/p̃ = 1/q + 1/q̃ = 1/r`, `r <= p < ∞`, `r <= q <= ∞`,
/// `1 <= r < ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentConfig {
    pub p: f64,
    pub p_tilde: f64,
    pub q: f64,
    pub q_tilde: f64,
    pub r: f64,
}

impl ExponentConfig {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        if !(r >= 1.0) || !r.is_finite() {
            return Err(Error::Exponent { name: "r", value: r });
        }
        if !(p >= r) || !p.is_finite() {
            return Err(Error::ExponentRelation("need r <= p < ∞"));
        }
        if !(q >= r) {
            return Err(Error::ExponentRelation("need r <= q <= ∞"));
        }
        Ok(Self {
            p,
            p_tilde: complement(r, p),
            q,
            q_tilde: complement(r, q),
            r,
        })
    }
}

/// `s` with `1/x + 1/s = 1/r`.
fn complement(r: f64, x: f64) -> f64 {
    let inv = r.recip() - x.recip();
    if inv <= 0.0 {
        f64::INFINITY
    } else {
        inv.recip()
    }
}

pub(crate) fn check_exponent(name: &'static str, p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::Exponent { name, value: p })
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Length { expected, got })
    }
}

fn check_nonnegative(values: &[f64]) -> Result<()> {
    match values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        Some(&v) => Err(Error::InvalidValue(v)),
        None => Ok(()),
    }
}
