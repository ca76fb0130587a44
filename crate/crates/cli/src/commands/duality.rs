use anyhow::{bail, Result};
use carleson_core::continuum::suite_spec;
use carleson_core::duality::{
    carleson_extremizer_constant, check_pairing_upper, extremal_f_for_carleson, extremal_g_for_ntmax,
    extremal_g_for_ntmax_p1_with,
};
use carleson_core::fields::conjugate;
use carleson_core::functionals::{carleson_dyadic, nt_max_dyadic};
use carleson_core::oracle::{oracle_vs_extremizer, Direction, ORACLE_MAX_CUBES};
use carleson_core::{DyadicField, TreeConfig};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::Report;
use crate::report::{exponent, num, Cell, Format, Table};
use crate::{DualityOpts, Status};

/// Relative rounding allowance of the exact checks.
const TOL: f64 = 1e-12;
/// Allowance for comparisons against the optimizer's certified bound.
const ORACLE_TOL: f64 = 1e-9;

struct Trial {
    row: Vec<Cell>,
    violations: Vec<&'static str>,
}

pub fn duality(o: &DualityOpts) -> Result<Status> {
    if !(o.p >= 1.0 && o.p.is_finite()) {
        bail!("p must satisfy 1 <= p < inf, got {}", o.p);
    }
    if !(o.c_stopping > 0.0 && o.c_stopping < 0.5) {
        bail!("c-stopping must lie in (0, 1/2), got {}", o.c_stopping);
    }
    let tree = o.tree.tree()?;
    let with_oracle = tree.cube_count() <= ORACLE_MAX_CUBES;
    let mut columns = vec![
        "seed",
        "pairing",
        "nt_norm",
        "carleson_norm",
        "pairing_ratio",
        "carleson_extremizer_ratio",
        "nt_extremizer_ratio",
    ];
    if with_oracle {
        columns.extend(["oracle_ntball_ratio", "oracle_cball_ratio"]);
    }
    let trials = o
        .suite
        .seeds()
        .par_iter()
        .map(|&seed| trial(seed, tree, o.p, o.c_stopping, with_oracle))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(columns);
    let mut failures = Vec::new();
    for t in trials {
        if !t.violations.is_empty() {
            let seed = match t.row[0] {
                Cell::Int(s) => s,
                _ => unreachable!("the first column is the seed"),
            };
            failures.push(json!({"seed": seed, "violations": t.violations}));
        }
        table.push(t.row);
    }
    let parameters = json!({
        "n": tree.dim(),
        "depth": tree.depth(),
        "p": exponent(o.p),
        "pprime": exponent(conjugate(o.p)),
        "c_stopping": num(o.c_stopping),
        "seed": o.suite.seed,
        "trials": o.suite.trials,
        "oracle": with_oracle,
    });
    let mut report = Report::new("duality", parameters, table);
    report.extra.insert("failures".into(), Value::Array(failures.clone()));
    report.write(&o.output, Format::Json)?;
    if failures.is_empty() {
        Ok(Status::Ok)
    } else {
        let seeds: Vec<String> = failures.iter().map(|f| f["seed"].to_string()).collect();
        Ok(Status::Violated(format!("inequality violated for seed(s) {}", seeds.join(", "))))
    }
}

fn fields(tree: TreeConfig, seed: u64) -> Result<(DyadicField, DyadicField)> {
    let a = suite_spec(seed).dyadic_field(tree, 2 * seed)?;
    let b = suite_spec(seed + 1).dyadic_field(tree, 2 * seed + 1)?;
    Ok((a, b))
}

fn trial(seed: u64, tree: TreeConfig, p: f64, c: f64, with_oracle: bool) -> Result<Trial> {
    let (a, b) = fields(tree, seed)?;
    let p_prime = conjugate(p);
    let mut violations = Vec::new();

    let upper = check_pairing_upper(&a, &b, p)?;
    if !upper.within_upper_bound() {
        violations.push("pairing exceeds 2 ||N a||_p ||C b||_p'");
    }

    let (f, f_report) = extremal_f_for_carleson(&b, p_prime)?;
    if p_prime == f64::INFINITY {
        let nt = nt_max_dyadic(&f).lp_norm(1.0)?;
        let off = |x: f64, y: f64| (x - y).abs() > TOL * x.abs().max(y.abs());
        if !b.is_zero() && (off(nt, 1.0) || off(f_report.pairing, f_report.carleson_norm)) {
            violations.push("p'=inf extremizer misses its norm");
        }
    } else if f_report.carleson_norm.powf(p_prime)
        > carleson_extremizer_constant(p_prime) * f_report.pairing * (1.0 + TOL)
    {
        violations.push("finite p' extremizer bound");
    }

    let g_report = if p > 1.0 {
        let (_, r) = extremal_g_for_ntmax(&a, p)?;
        if r.pairing < r.nt_norm.powf(p) / (2f64.powf(p) - 1.0) * (1.0 - TOL) {
            violations.push("finite p extremizer lower bound");
        }
        r
    } else {
        let (g, r) = extremal_g_for_ntmax_p1_with(&a, c)?;
        if carleson_dyadic(&g).lp_norm(f64::INFINITY)? > (1.0 + TOL) / c {
            violations.push("p=1 extremizer exceeds ||C b||_inf <= 1/c");
        }
        if r.pairing < (1.0 - 2.0 * c) / 2.0 * r.nt_norm * (1.0 - TOL) {
            violations.push("p=1 extremizer lower bound");
        }
        r
    };

    let mut row = vec![
        Cell::Int(seed),
        Cell::Float(upper.pairing),
        Cell::Float(upper.nt_norm),
        Cell::Float(upper.carleson_norm),
        upper.ratio.into(),
        f_report.ratio.into(),
        g_report.ratio.into(),
    ];
    if with_oracle {
        for (field, e, dir) in [(&b, p_prime, Direction::NtBall), (&a, p, Direction::CarlesonBall)] {
            let cmp = oracle_vs_extremizer(field, e, dir)?;
            if cmp.extremizer.is_some_and(|x| x > cmp.oracle_upper_bound * (1.0 + ORACLE_TOL)) {
                violations.push("extremizer above the oracle bound");
            }
            row.push(cmp.ratio.into());
        }
    }
    Ok(Trial { row, violations })
}
