use anyhow::{bail, Result};
use carleson_core::continuum::{equivalence_case, relative_change, suite_spec, tent_space_check, EquivalenceSettings};
use carleson_core::duality::multiplier_norm_estimate;
use carleson_core::geometry::test_cube_family;
use carleson_core::{ExponentConfig, GridFunction, TreeConfig};
use rayon::prelude::*;
use serde_json::json;

use super::{Report, TRUNCATION_NOTE};
use crate::report::{exponent, num, Cell, Format, Table};
use crate::{EquivalenceOpts, GeometryOpts, MultiplierOpts, Status, TentOpts};

fn grid(tree: TreeConfig, m: usize, seed: u64) -> Result<GridFunction> {
    Ok(suite_spec(seed).grid_function(tree, m, seed)?)
}

fn geometry_json(g: &GeometryOpts) -> serde_json::Value {
    json!({"aperture": num(g.aperture), "c0": num(g.c0), "c1": num(g.c1), "stride": g.stride})
}

fn with_note(mut report: Report) -> Report {
    report.extra.insert("note".into(), TRUNCATION_NOTE.into());
    report
}

pub fn equivalence(o: &EquivalenceOpts) -> Result<Status> {
    for (name, v) in [("p", o.p), ("q", o.q)] {
        if v.is_nan() || v < 1.0 {
            bail!("{name} must be at least 1, got {v}");
        }
    }
    let tree = o.tree.tree()?;
    let settings = EquivalenceSettings {
        dim: tree.dim(),
        m: o.m,
        stride: o.geometry.stride,
        geometry: o.geometry.geometry()?,
    };
    let cases = o
        .suite
        .seeds()
        .par_iter()
        .map(|&seed| equivalence_case(seed, tree.depth(), o.p, o.q, &settings))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(vec![
        "seed",
        "nt_continuum",
        "nt_dyadic",
        "nt_ratio",
        "nt_refined_ratio",
        "nt_change",
        "carleson_continuum",
        "carleson_dyadic",
        "carleson_ratio",
        "carleson_refined_ratio",
        "carleson_dense_ratio",
        "carleson_change",
    ]);
    for c in &cases {
        let carleson_change = match (
            relative_change(&c.carleson, &c.carleson_refined),
            relative_change(&c.carleson, &c.carleson_dense),
        ) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
        table.push(vec![
            Cell::Int(c.seed),
            Cell::Float(c.nt.continuum),
            Cell::Float(c.nt.dyadic),
            c.nt.ratio.into(),
            c.nt_refined.ratio.into(),
            relative_change(&c.nt, &c.nt_refined).into(),
            Cell::Float(c.carleson.continuum),
            Cell::Float(c.carleson.dyadic),
            c.carleson.ratio.into(),
            c.carleson_refined.ratio.into(),
            c.carleson_dense.ratio.into(),
            carleson_change.into(),
        ]);
    }
    let parameters = json!({
        "n": tree.dim(),
        "depth": tree.depth(),
        "m": o.m,
        "p": exponent(o.p),
        "q": exponent(o.q),
        "geometry": geometry_json(&o.geometry),
        "seed": o.suite.seed,
        "trials": o.suite.trials,
    });
    with_note(Report::new("equivalence", parameters, table)).write(&o.output, Format::Csv)?;
    Ok(Status::Ok)
}

pub fn tent(o: &TentOpts) -> Result<Status> {
    if !(o.p > 2.0 && o.p.is_finite()) {
        bail!("the tent space check needs 2 < p < inf, got p = {}", o.p);
    }
    let tree = o.tree.tree()?;
    let geo = o.geometry.geometry()?;
    let family = test_cube_family(&tree, o.geometry.stride)?;
    let reports = o
        .suite
        .seeds()
        .par_iter()
        .map(|&seed| Ok((seed, tent_space_check(&grid(tree, o.m, seed)?, o.p, &family, &geo)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(vec!["seed", "carleson", "area", "ratio"]);
    for (seed, r) in reports {
        table.push(vec![Cell::Int(seed), Cell::Float(r.carleson), Cell::Float(r.area), r.ratio.into()]);
    }
    let parameters = json!({
        "n": tree.dim(),
        "depth": tree.depth(),
        "m": o.m,
        "p": exponent(o.p),
        "geometry": geometry_json(&o.geometry),
        "seed": o.suite.seed,
        "trials": o.suite.trials,
    });
    with_note(Report::new("tent", parameters, table)).write(&o.output, Format::Csv)?;
    Ok(Status::Ok)
}

pub fn multiplier(o: &MultiplierOpts) -> Result<Status> {
    let exps = ExponentConfig::new(o.p, o.q, o.r)?;
    let tree = o.tree.tree()?;
    let geo = o.geometry.geometry()?;
    let family = test_cube_family(&tree, o.geometry.stride)?;
    let modified = o.p == 2.0 && o.q == 2.0 && o.r == 2.0;
    let reports = o
        .suite
        .seeds()
        .par_iter()
        .map(|&seed| {
            let g = grid(tree, o.m, seed)?;
            Ok((seed, multiplier_norm_estimate(&g, exps, o.budget, &geo, &family, seed)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec![
        "seed",
        "estimate",
        "candidates",
        "carleson_norm",
        "carleson_dyadic_norm",
        "ratio",
    ];
    if modified {
        columns.extend(["modified_carleson", "modified_ratio"]);
    }
    let mut table = Table::new(columns);
    for (seed, r) in reports {
        let mut row = vec![
            Cell::Int(seed),
            Cell::Float(r.estimate),
            Cell::Int(r.candidates as u64),
            Cell::Float(r.carleson_norm),
            Cell::Float(r.carleson_dyadic_norm),
            r.ratio.into(),
        ];
        if modified {
            row.extend([r.modified_carleson.into(), r.modified_ratio.into()]);
        }
        table.push(row);
    }
    let parameters = json!({
        "n": tree.dim(),
        "depth": tree.depth(),
        "m": o.m,
        "p": exponent(exps.p),
        "pprime": exponent(exps.p_tilde),
        "q": exponent(exps.q),
        "qprime": exponent(exps.q_tilde),
        "r": exponent(exps.r),
        "budget": o.budget,
        "geometry": geometry_json(&o.geometry),
        "seed": o.suite.seed,
        "trials": o.suite.trials,
    });
    with_note(Report::new("multiplier", parameters, table)).write(&o.output, Format::Csv)?;
    Ok(Status::Ok)
}
