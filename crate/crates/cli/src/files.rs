//! Field and grid files.
//!
//! A field file lists one value per dyadic cube:
//! `{"n": 1, "depth": 1, "values": [{"level": 0, "index": [0], "v": 1.0}, ...]}`.
//! A grid file adds `"m"` and gives each cube the `m^{1+n}` cell values of its
//! Whitney region as an array, `t` row outermost, then the `x` axes in order.
//! Cubes that are not listed are zero.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use carleson_core::{DyadicCube, DyadicField, GridFunction, TreeConfig};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::report::num;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    n: usize,
    depth: usize,
    #[serde(default)]
    m: Option<usize>,
    values: Vec<RawEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    level: usize,
    index: Vec<u32>,
    v: RawValue,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawValue {
    Scalar(f64),
    Cells(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Field(DyadicField),
    Grid(GridFunction),
}

impl Input {
    pub fn tree(&self) -> &TreeConfig {
        match self {
            Input::Field(f) => f.tree(),
            Input::Grid(g) => g.tree(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Input::Field(f) => field_json(f),
            Input::Grid(g) => grid_json(g),
        }
    }
}

pub fn read(path: &Path) -> Result<Input> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse(&text).with_context(|| format!("malformed input file {}", path.display()))
}

pub fn parse(text: &str) -> Result<Input> {
    let raw: RawFile = serde_json::from_str(text)?;
    let tree = TreeConfig::new(raw.n, raw.depth)?;
    let mut seen = vec![false; tree.cube_count()];
    match raw.m {
        None => {
            let mut values = vec![0.0; tree.cube_count()];
            for entry in raw.values {
                let id = slot(&tree, &mut seen, entry.level, entry.index)?;
                match entry.v {
                    RawValue::Scalar(v) => values[id] = v,
                    RawValue::Cells(_) => bail!("field entries take a single value"),
                }
            }
            Ok(Input::Field(DyadicField::new(tree, values)?))
        }
        Some(m) => {
            let mut grid = GridFunction::zeros(tree, m)?;
            let per_region = grid.cells_per_region();
            for entry in raw.values {
                let id = slot(&tree, &mut seen, entry.level, entry.index)?;
                match entry.v {
                    RawValue::Cells(cells) if cells.len() == per_region => {
                        grid.region_cells_mut(id).copy_from_slice(&cells);
                    }
                    RawValue::Cells(cells) => {
                        bail!("expected {per_region} cell values per cube, got {}", cells.len())
                    }
                    RawValue::Scalar(_) => bail!("grid entries take an array of cell values"),
                }
            }
            // Revalidate the values through the checked constructor.
            Ok(Input::Grid(GridFunction::new(tree, m, grid.values().to_vec())?))
        }
    }
}

fn slot(tree: &TreeConfig, seen: &mut [bool], level: usize, index: Vec<u32>) -> Result<usize> {
    let id = tree.id(&DyadicCube::new(level, index))?;
    if std::mem::replace(&mut seen[id], true) {
        bail!("cube {id} listed twice");
    }
    Ok(id)
}

fn entries(tree: &TreeConfig, v: impl Fn(usize) -> Value) -> Vec<Value> {
    (0..tree.cube_count())
        .map(|id| {
            let cube = tree.cube(id);
            json!({"level": cube.level, "index": cube.index, "v": v(id)})
        })
        .collect()
}

pub fn field_json(f: &DyadicField) -> Value {
    let tree = f.tree();
    json!({
        "n": tree.dim(),
        "depth": tree.depth(),
        "values": entries(tree, |id| num(f.at(id))),
    })
}

pub fn grid_json(g: &GridFunction) -> Value {
    let tree = g.tree();
    json!({
        "n": tree.dim(),
        "depth": tree.depth(),
        "m": g.subdivision(),
        "values": entries(tree, |id| Value::Array(g.region_cells(id).iter().map(|&v| num(v)).collect())),
    })
}
