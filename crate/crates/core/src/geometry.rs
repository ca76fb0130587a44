//! Dyadic cubes of a truncated tree, Whitney regions, Carleson boxes and the
//! finite family of grid-aligned test cubes.
//!
//! Cubes are addressed by a flat id: level by level from the root, and inside
//! a level in Morton (bit-interleaved) order. With that layout the children of
//! a cube are a contiguous id range and so are the leaves below it.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

#[allow(unused_imports)] // inherent float methods are missing without std
use num_traits::Float;

use crate::{Error, Result};

/// Upper bound on `dim * depth`, i.e. on `log2` of the number of leaves.
pub const MAX_LEAF_BITS: usize = 26;

/// Dimension and maximal level of a truncated dyadic tree over `[0,1)^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TreeConfig {
    dim: usize,
    depth: usize,
}

impl TreeConfig {
    pub fn new(dim: usize, depth: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidTree("dimension must be at least 1"));
        }
        if dim.saturating_mul(depth) > MAX_LEAF_BITS {
            return Err(Error::InvalidTree("too many leaves"));
        }
        Ok(Self { dim, depth })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of cubes at `level`.
    pub fn level_len(&self, level: usize) -> usize {
        1 << (self.dim * level)
    }

    /// Id of the first cube at `level`.
    pub fn level_offset(&self, level: usize) -> usize {
        ((1usize << (self.dim * level)) - 1) / ((1usize << self.dim) - 1)
    }

    pub fn level_ids(&self, level: usize) -> Range<usize> {
        let start = self.level_offset(level);
        start..start + self.level_len(level)
    }

    pub fn cube_count(&self) -> usize {
        self.level_offset(self.depth + 1)
    }

    pub fn leaf_count(&self) -> usize {
        self.level_len(self.depth)
    }

    /// Lebesgue measure of a leaf cell.
    pub fn leaf_measure(&self) -> f64 {
        exp2i(-((self.dim * self.depth) as i32))
    }

    /// Leaf cells per unit length along one axis.
    pub fn grid_len(&self) -> u32 {
        1 << self.depth
    }

    pub fn level_of(&self, id: usize) -> usize {
        debug_assert!(id < self.cube_count());
        let mut level = 0;
        while self.level_offset(level + 1) <= id {
            level += 1;
        }
        level
    }

    pub fn parent(&self, id: usize) -> Option<usize> {
        let level = self.level_of(id);
        if level == 0 {
            return None;
        }
        let code = id - self.level_offset(level);
        Some(self.level_offset(level - 1) + (code >> self.dim))
    }

    /// Ids of the `2^n` children, empty for a leaf.
    pub fn child_ids(&self, id: usize) -> Range<usize> {
        let level = self.level_of(id);
        if level == self.depth {
            return 0..0;
        }
        let code = id - self.level_offset(level);
        let start = self.level_offset(level + 1) + (code << self.dim);
        start..start + (1 << self.dim)
    }

    /// Leaf indices (not ids) covered by the cube `id`.
    pub fn leaves_below(&self, id: usize) -> Range<usize> {
        let level = self.level_of(id);
        let code = id - self.level_offset(level);
        let shift = self.dim * (self.depth - level);
        (code << shift)..((code + 1) << shift)
    }

    /// Id of the level-`level` ancestor of leaf index `leaf`.
    pub fn ancestor_of_leaf(&self, leaf: usize, level: usize) -> usize {
        self.level_offset(level) + (leaf >> (self.dim * (self.depth - level)))
    }

    pub fn leaf_id(&self, leaf: usize) -> usize {
        self.level_offset(self.depth) + leaf
    }

    pub fn cube(&self, id: usize) -> DyadicCube {
        let level = self.level_of(id);
        let code = id - self.level_offset(level);
        DyadicCube {
            level,
            index: deinterleave(code, level, self.dim),
        }
    }

    pub fn id(&self, cube: &DyadicCube) -> Result<usize> {
        if cube.level > self.depth {
            return Err(Error::CubeOutsideTree { level: cube.level });
        }
        if cube.index.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: cube.index.len(),
            });
        }
        if cube.index.iter().any(|&k| k >= (1u32 << cube.level)) {
            return Err(Error::CubeOutsideTree { level: cube.level });
        }
        Ok(self.level_offset(cube.level) + interleave(&cube.index, cube.level))
    }

    pub fn root(&self) -> DyadicCube {
        DyadicCube {
            level: 0,
            index: vec![0; self.dim],
        }
    }

    /// All cubes in id order.
    pub fn cubes(&self) -> impl Iterator<Item = DyadicCube> + '_ {
        (0..self.cube_count()).map(move |id| self.cube(id))
    }

    /// The `2^n` dyadic children of `cube`; empty at the finest level.
    pub fn children(&self, cube: &DyadicCube) -> Result<Vec<DyadicCube>> {
        let id = self.id(cube)?;
        Ok(self.child_ids(id).map(|c| self.cube(c)).collect())
    }

    /// Leaf index of the cell containing `z`.
    pub fn leaf_of_point(&self, z: &[f64]) -> Result<usize> {
        if z.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: z.len(),
            });
        }
        if z.iter().any(|&c| !(0.0..1.0).contains(&c)) {
            return Err(Error::PointOutsideBase);
        }
        let scale = f64::from(self.grid_len());
        let coords: Vec<u32> = z.iter().map(|&c| (c * scale).floor() as u32).collect();
        Ok(interleave(&coords, self.depth))
    }

    /// The `D + 1` cubes containing `z`, ordered from the root down.
    pub fn ancestors_of_point(&self, z: &[f64]) -> Result<Vec<DyadicCube>> {
        let leaf = self.leaf_of_point(z)?;
        Ok((0..=self.depth)
            .map(|level| self.cube(self.ancestor_of_leaf(leaf, level)))
            .collect())
    }

    /// Integer coordinates of a leaf on the `2^D` grid.
    pub fn leaf_coords(&self, leaf: usize) -> Vec<u32> {
        deinterleave(leaf, self.depth, self.dim)
    }

    pub fn leaf_from_coords(&self, coords: &[u32]) -> usize {
        interleave(coords, self.depth)
    }

    pub fn leaf_center(&self, leaf: usize) -> Vec<f64> {
        let h = exp2i(-(self.depth as i32));
        self.leaf_coords(leaf)
            .into_iter()
            .map(|k| (f64::from(k) + 0.5) * h)
            .collect()
    }
}

/// `2^-level ([0,1)^n + index)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadicCube {
    pub level: usize,
    pub index: Vec<u32>,
}

impl DyadicCube {
    pub fn new(level: usize, index: Vec<u32>) -> Self {
        Self { level, index }
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    pub fn side(&self) -> f64 {
        exp2i(-(self.level as i32))
    }

    pub fn measure(&self) -> f64 {
        exp2i(-((self.level * self.dim()) as i32))
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let side = self.side();
        self.index
            .iter()
            .map(|&k| (f64::from(k) * side, f64::from(k + 1) * side))
            .collect()
    }

    pub fn contains_point(&self, z: &[f64]) -> bool {
        z.len() == self.dim()
            && self
                .bounds()
                .iter()
                .zip(z)
                .all(|(&(lo, hi), &c)| lo <= c && c < hi)
    }

    /// `self ⊆ other`.
    pub fn is_within(&self, other: &DyadicCube) -> bool {
        self.level >= other.level
            && self.dim() == other.dim()
            && self
                .index
                .iter()
                .zip(&other.index)
                .all(|(&k, &o)| (k >> (self.level - other.level)) == o)
    }

    /// `W_Q = (ℓ/2, ℓ] × Q`.
    pub fn whitney_region(&self) -> Region {
        let side = self.side();
        Region {
            t: (side / 2.0, side),
            x: self.bounds(),
        }
    }

    /// `Q̂ = (0, ℓ] × Q`.
    pub fn carleson_box(&self) -> Region {
        Region {
            t: (0.0, self.side()),
            x: self.bounds(),
        }
    }
}

/// Axis-parallel box in the half-space: `t ∈ (t.0, t.1]`, `x_i ∈ [x_i.0, x_i.1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub t: (f64, f64),
    pub x: Vec<(f64, f64)>,
}

impl Region {
    pub fn new(t: (f64, f64), x: Vec<(f64, f64)>) -> Result<Self> {
        if !(t.0 >= 0.0) || !(t.1 > t.0) {
            return Err(Error::Parameter {
                name: "t-interval",
                value: t.0,
            });
        }
        if let Some(&(lo, _)) = x.iter().find(|(lo, hi)| !(hi > lo)) {
            return Err(Error::Parameter {
                name: "x-interval",
                value: lo,
            });
        }
        Ok(Self { t, x })
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// Volume; zero for degenerate boxes.
    pub fn volume(&self) -> f64 {
        self.x
            .iter()
            .fold(positive_len(self.t), |acc, &iv| acc * positive_len(iv))
    }

    pub fn is_empty(&self) -> bool {
        self.volume() <= 0.0
    }

    /// Intersection, `None` when it has zero volume.
    pub fn intersect(&self, other: &Region) -> Option<Region> {
        if self.dim() != other.dim() {
            return None;
        }
        let region = Region {
            t: (self.t.0.max(other.t.0), self.t.1.min(other.t.1)),
            x: self
                .x
                .iter()
                .zip(&other.x)
                .map(|(a, b)| (a.0.max(b.0), a.1.min(b.1)))
                .collect(),
        };
        (!region.is_empty()).then_some(region)
    }

    pub fn contains(&self, other: &Region) -> bool {
        self.t.0 <= other.t.0
            && other.t.1 <= self.t.1
            && self
                .x
                .iter()
                .zip(&other.x)
                .all(|(a, b)| a.0 <= b.0 && b.1 <= a.1)
    }
}

/// Parameters of the continuum Whitney regions and cones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryConfig {
    /// Cone aperture `a`; zero gives the vertical maximal function.
    pub aperture: f64,
    /// Vertical stretch `c0 > 1`.
    pub c0: f64,
    /// Horizontal radius factor `c1 > 0`.
    pub c1: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            aperture: 1.0,
            c0: 2.0,
            c1: 0.5,
        }
    }
}

impl GeometryConfig {
    pub fn new(aperture: f64, c0: f64, c1: f64) -> Result<Self> {
        if !(aperture >= 0.0) || !aperture.is_finite() {
            return Err(Error::Parameter {
                name: "aperture",
                value: aperture,
            });
        }
        if !(c0 > 1.0) || !c0.is_finite() {
            return Err(Error::Parameter {
                name: "c0",
                value: c0,
            });
        }
        if !(c1 > 0.0) || !c1.is_finite() {
            return Err(Error::Parameter {
                name: "c1",
                value: c1,
            });
        }
        Ok(Self { aperture, c0, c1 })
    }

    pub fn with_aperture(self, aperture: f64) -> Result<Self> {
        Self::new(aperture, self.c0, self.c1)
    }
}

/// Whitney region `{(s,y): |y-x|_∞ < c1 t, t/c0 < s < c0 t}` around `(t, x)`,
/// clipped to `(0,1] × [0,1)^n`. Clipping only removes mass outside the
/// computational domain.
pub fn continuum_whitney(t: f64, x: &[f64], geo: &GeometryConfig) -> Result<Region> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Parameter { name: "t", value: t });
    }
    let radius = geo.c1 * t;
    Ok(Region {
        t: (t / geo.c0, (geo.c0 * t).min(1.0)),
        x: x
            .iter()
            .map(|&c| ((c - radius).max(0.0), (c + radius).min(1.0)))
            .collect(),
    })
}

/// Axis-parallel cube with corners on the `2^-D` grid, in grid units.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GridCube {
    pub corner: Vec<u32>,
    pub side: u32,
}

impl GridCube {
    pub fn side_length(&self, tree: &TreeConfig) -> f64 {
        f64::from(self.side) * exp2i(-(tree.depth() as i32))
    }

    pub fn measure(&self, tree: &TreeConfig) -> f64 {
        self.side_length(tree).powi(tree.dim() as i32)
    }

    pub fn bounds(&self, tree: &TreeConfig) -> Vec<(f64, f64)> {
        let h = exp2i(-(tree.depth() as i32));
        self.corner
            .iter()
            .map(|&c| (f64::from(c) * h, f64::from(c + self.side) * h))
            .collect()
    }

    /// Whether this cube coincides with a dyadic cube.
    pub fn is_dyadic(&self) -> bool {
        self.side.is_power_of_two() && self.corner.iter().all(|&c| c % self.side == 0)
    }

    /// Leaf indices of the cells inside the cube, in grid (not Morton) order.
    pub fn leaves(&self, tree: &TreeConfig) -> Vec<usize> {
        let dim = tree.dim();
        let mut out = Vec::with_capacity((self.side as usize).pow(dim as u32));
        let mut offset = vec![0u32; dim];
        let mut coords = vec![0u32; dim];
        loop {
            for ((c, &base), &o) in coords.iter_mut().zip(&self.corner).zip(&offset) {
                *c = base + o;
            }
            out.push(tree.leaf_from_coords(&coords));
            if !advance(&mut offset, self.side) {
                return out;
            }
        }
    }
}

/// Cubes with corners on the `2^-D` grid and side a multiple of `2^-D`,
/// keeping corners whose coordinates are multiples of `stride`. Dyadic cubes
/// are always kept, so the family contains the whole tree.
pub fn test_cube_family(tree: &TreeConfig, stride: u32) -> Result<Vec<GridCube>> {
    if stride == 0 {
        return Err(Error::Parameter {
            name: "stride",
            value: 0.0,
        });
    }
    let grid = tree.grid_len();
    let dim = tree.dim();
    let mut family = Vec::new();
    for side in 1..=grid {
        let span = grid - side + 1;
        let mut corner = vec![0u32; dim];
        loop {
            let cube = GridCube {
                corner: corner.clone(),
                side,
            };
            if corner.iter().all(|&c| c % stride == 0) || cube.is_dyadic() {
                family.push(cube);
            }
            if !advance(&mut corner, span) {
                break;
            }
        }
    }
    Ok(family)
}

/// Odometer increment over `[0, bound)^n`; returns `false` after the last state.
pub(crate) fn advance(state: &mut [u32], bound: u32) -> bool {
    for digit in state.iter_mut().rev() {
        *digit += 1;
        if *digit < bound {
            return true;
        }
        *digit = 0;
    }
    false
}

pub(crate) fn exp2i(e: i32) -> f64 {
    libm::ldexp(1.0, e)
}

fn positive_len((lo, hi): (f64, f64)) -> f64 {
    (hi - lo).max(0.0)
}

pub(crate) fn interleave(coords: &[u32], bits: usize) -> usize {
    let dim = coords.len();
    let mut code = 0usize;
    for b in 0..bits {
        for (i, &k) in coords.iter().enumerate() {
            code |= (((k >> b) & 1) as usize) << (b * dim + i);
        }
    }
    code
}

fn deinterleave(code: usize, bits: usize, dim: usize) -> Vec<u32> {
    let mut coords = vec![0u32; dim];
    for b in 0..bits {
        for (i, k) in coords.iter_mut().enumerate() {
            *k |= (((code >> (b * dim + i)) & 1) as u32) << b;
        }
    }
    coords
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(level: usize, index: &[u32]) -> DyadicCube {
        DyadicCube::new(level, index.to_vec())
    }

    #[test]
    fn counts() {
        let tree = TreeConfig::new(2, 3).unwrap();
        assert_eq!(tree.cube_count(), 1 + 4 + 16 + 64);
        assert_eq!(tree.leaf_count(), 64);
        let tree = TreeConfig::new(1, 0).unwrap();
        assert_eq!(tree.cube_count(), 1);
        assert!(TreeConfig::new(0, 2).is_err());
        assert!(TreeConfig::new(3, 20).is_err());
    }

    #[test]
    fn ids_round_trip() {
        let tree = TreeConfig::new(2, 3).unwrap();
        for id in 0..tree.cube_count() {
            let c = tree.cube(id);
            assert_eq!(tree.id(&c).unwrap(), id);
            if let Some(p) = tree.parent(id) {
                assert!(tree.child_ids(p).contains(&id));
                assert!(c.is_within(&tree.cube(p)));
            }
        }
    }

    #[test]
    fn children_bisect() {
        let tree = TreeConfig::new(1, 2).unwrap();
        let kids = tree.children(&tree.root()).unwrap();
        assert_eq!(kids, vec![cube(1, &[0]), cube(1, &[1])]);
        assert_eq!(kids[0].bounds(), vec![(0.0, 0.5)]);
        assert_eq!(kids[1].bounds(), vec![(0.5, 1.0)]);

        let square = TreeConfig::new(2, 1).unwrap();
        let quads = square.children(&square.root()).unwrap();
        assert_eq!(quads.len(), 4);
        let total: f64 = quads.iter().map(DyadicCube::measure).sum();
        assert_eq!(total, 1.0);
        for q in &quads {
            assert_eq!(q.side(), 0.5);
        }

        let shallow = TreeConfig::new(1, 1).unwrap();
        assert!(shallow.children(&cube(1, &[0])).unwrap().is_empty());
        assert!(shallow.children(&cube(2, &[0])).is_err());
    }

    #[test]
    fn ancestors() {
        let tree = TreeConfig::new(1, 2).unwrap();
        let chain = tree.ancestors_of_point(&[0.6]).unwrap();
        assert_eq!(chain, vec![cube(0, &[0]), cube(1, &[1]), cube(2, &[2])]);
        assert_eq!(chain[2].bounds(), vec![(0.5, 0.75)]);

        let flat = TreeConfig::new(1, 0).unwrap();
        assert_eq!(flat.ancestors_of_point(&[0.3]).unwrap(), vec![cube(0, &[0])]);

        let square = TreeConfig::new(2, 1).unwrap();
        let chain = square.ancestors_of_point(&[0.1, 0.9]).unwrap();
        assert_eq!(chain, vec![cube(0, &[0, 0]), cube(1, &[0, 1])]);

        assert_eq!(tree.ancestors_of_point(&[1.0]), Err(Error::PointOutsideBase));
        assert_eq!(tree.ancestors_of_point(&[-0.1]), Err(Error::PointOutsideBase));
    }

    #[test]
    fn ancestor_chain_shrinks() {
        let tree = TreeConfig::new(2, 4).unwrap();
        let chain = tree.ancestors_of_point(&[0.37, 0.81]).unwrap();
        assert_eq!(chain.len(), 5);
        for w in chain.windows(2) {
            assert!(w[1].side() < w[0].side());
            assert!(w[1].is_within(&w[0]));
        }
    }

    #[test]
    fn whitney_and_carleson_boxes() {
        let w = cube(1, &[0]).whitney_region();
        assert_eq!(w.t, (0.25, 0.5));
        assert_eq!(w.x, vec![(0.0, 0.5)]);
        assert_eq!(w.volume(), 0.125);
        let hat = cube(0, &[0]).carleson_box();
        assert_eq!(hat.t, (0.0, 1.0));
        assert_eq!(cube(0, &[0, 0]).whitney_region().volume(), 0.5);
    }

    #[test]
    fn whitney_slabs_per_level() {
        let tree = TreeConfig::new(2, 3).unwrap();
        for level in 0..=3 {
            let total: f64 = tree
                .level_ids(level)
                .map(|id| tree.cube(id).whitney_region().volume())
                .sum();
            assert_eq!(total, exp2i(-(level as i32) - 1));
        }
    }

    #[test]
    fn continuum_region() {
        let geo = GeometryConfig::default();
        let r = continuum_whitney(0.5, &[0.5], &geo).unwrap();
        assert_eq!(r.t, (0.25, 1.0));
        assert_eq!(r.x, vec![(0.25, 0.75)]);
        let r = continuum_whitney(1.0, &[0.0], &geo).unwrap();
        assert_eq!(r.t, (0.5, 1.0));
        assert_eq!(r.x, vec![(0.0, 0.5)]);
        assert!(continuum_whitney(0.0, &[0.5], &geo).is_err());
        assert!(continuum_whitney(-1.0, &[0.5], &geo).is_err());

        let geo = GeometryConfig::new(1.0, 3.0, 0.25).unwrap();
        let t = 0.1;
        let r = continuum_whitney(t, &[0.5, 0.5], &geo).unwrap();
        let expected = (3.0 - 1.0 / 3.0) * t * (2.0 * 0.25 * t).powi(2);
        assert!((r.volume() - expected).abs() < 1e-15);
    }

    #[test]
    fn geometry_validation() {
        assert!(GeometryConfig::new(0.0, 2.0, 0.5).is_ok());
        assert!(GeometryConfig::new(-1.0, 2.0, 0.5).is_err());
        assert!(GeometryConfig::new(1.0, 1.0, 0.5).is_err());
        assert!(GeometryConfig::new(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn family_counts() {
        let tree = TreeConfig::new(1, 1).unwrap();
        assert_eq!(test_cube_family(&tree, 1).unwrap().len(), 3);
        let tree = TreeConfig::new(1, 2).unwrap();
        assert_eq!(test_cube_family(&tree, 1).unwrap().len(), 10);
        let tree = TreeConfig::new(2, 2).unwrap();
        let expected: usize = (1..=4).map(|m| (4 - m + 1) * (4 - m + 1)).sum();
        assert_eq!(test_cube_family(&tree, 1).unwrap().len(), expected);
        assert!(test_cube_family(&tree, 0).is_err());
    }

    #[test]
    fn family_contains_dyadic_cubes() {
        for (dim, depth) in [(1, 4), (2, 3)] {
            let tree = TreeConfig::new(dim, depth).unwrap();
            for stride in [1, 2, 3, 5] {
                let family = test_cube_family(&tree, stride).unwrap();
                for c in tree.cubes() {
                    let side = 1u32 << (depth - c.level);
                    let g = GridCube {
                        corner: c.index.iter().map(|&k| k * side).collect(),
                        side,
                    };
                    assert!(family.contains(&g));
                }
                for g in &family {
                    assert!(g.corner.iter().all(|&c| c + g.side <= tree.grid_len()));
                }
            }
        }
    }

    #[test]
    fn leaves_of_a_cube_are_contiguous() {
        let tree = TreeConfig::new(2, 3).unwrap();
        for id in 0..tree.cube_count() {
            let c = tree.cube(id);
            for leaf in tree.leaves_below(id) {
                let center = tree.leaf_center(leaf);
                assert!(c.contains_point(&center));
            }
        }
    }
}
