use anyhow::Result;
use carleson_core::fields::{conjugate, to_sequence};
use carleson_core::functionals::{
    area_integral, carleson_continuum, carleson_dyadic, carleson_r_dyadic, modified_carleson_norm,
    nt_max_continuum, nt_max_dyadic,
};
use carleson_core::geometry::test_cube_family;
use carleson_core::Normalization;
use serde_json::{json, Map, Value};

use super::TRUNCATION_NOTE;
use crate::files::{self, Input};
use crate::report::{emit, exponent, num, to_json_string, Cell, Format, Table};
use crate::{NormsOpts, Status};

/// Name, value and whether the value is exact (as opposed to sampled).
type Entry = (&'static str, f64, bool);

pub fn norms(o: &NormsOpts) -> Result<Status> {
    let input = files::read(&o.input)?;
    let geo = o.geometry.geometry()?;
    let p_prime = o.pprime.unwrap_or(conjugate(o.p));
    let q_prime = o.qprime.unwrap_or(conjugate(o.q));
    let entries: Vec<Entry> = match &input {
        Input::Field(a) => vec![
            ("nt_max_lp", nt_max_dyadic(a).lp_norm(o.p)?, true),
            ("carleson_lp", carleson_dyadic(a).lp_norm(p_prime)?, true),
        ],
        Input::Grid(g) => {
            let family = test_cube_family(g.tree(), o.geometry.stride)?;
            let averages = to_sequence(g, o.q, Normalization::Average)?;
            vec![
                ("nt_max_dyadic_lp", nt_max_dyadic(&averages).lp_norm(o.p)?, true),
                ("nt_max_continuum_lp", nt_max_continuum(g, o.q, &geo)?.value.lp_norm(o.p)?, false),
                ("carleson_dyadic_lp", carleson_r_dyadic(g, o.r, q_prime)?.lp_norm(p_prime)?, true),
                (
                    "carleson_continuum_lp",
                    carleson_continuum(g, o.r, q_prime, &family, &geo)?.value.lp_norm(p_prime)?,
                    false,
                ),
                ("area_integral_lp", area_integral(g).lp_norm(o.p)?, false),
                ("modified_carleson", modified_carleson_norm(g, &geo)?.value, false),
            ]
        }
    };
    let text = match o.output.format.unwrap_or(Format::Json) {
        Format::Json => to_json_string(&report(o, &input, p_prime, q_prime, &entries)),
        Format::Csv => table(&entries).to_csv()?,
    };
    emit(&text, o.output.out.as_deref())?;
    if o.output.out.is_some() {
        print!("{}", table(&entries).pretty());
    }
    Ok(Status::Ok)
}

fn table(entries: &[Entry]) -> Table {
    let mut t = Table::new(vec!["name", "value", "exact"]);
    for &(name, v, exact) in entries {
        t.push(vec![Cell::Text(name.into()), Cell::Float(v), Cell::Bool(exact)]);
    }
    t
}

fn report(o: &NormsOpts, input: &Input, p_prime: f64, q_prime: f64, entries: &[Entry]) -> Value {
    let tree = input.tree();
    let mut described = json!({"kind": "field", "n": tree.dim(), "depth": tree.depth()});
    if let Input::Grid(g) = input {
        described["kind"] = "grid".into();
        described["m"] = g.subdivision().into();
    }
    let mut parameters = Map::new();
    parameters.insert("p".into(), exponent(o.p));
    parameters.insert("pprime".into(), exponent(p_prime));
    if let Input::Grid(_) = input {
        parameters.insert("q".into(), exponent(o.q));
        parameters.insert("qprime".into(), exponent(q_prime));
        parameters.insert("r".into(), exponent(o.r));
        parameters.insert("aperture".into(), num(o.geometry.aperture));
        parameters.insert("c0".into(), num(o.geometry.c0));
        parameters.insert("c1".into(), num(o.geometry.c1));
        parameters.insert("stride".into(), o.geometry.stride.into());
    }
    let mut out = json!({
        "command": "norms",
        "input": described,
        "parameters": parameters,
        "norms": entries.iter().map(|&(k, v, _)| (k.to_string(), num(v))).collect::<Map<_, _>>(),
        "exact": entries.iter().map(|&(k, _, e)| (k.to_string(), Value::Bool(e))).collect::<Map<_, _>>(),
    });
    if let Input::Grid(_) = input {
        out["note"] = TRUNCATION_NOTE.into();
    }
    out
}
