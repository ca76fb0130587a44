use anyhow::Result;
use carleson_core::continuum::suite_spec;
use carleson_core::random::FieldSpec;

use crate::files::Input;
use crate::report::{emit, to_json_string};
use crate::{GenerateOpts, Kind, Status};

pub fn generate(o: &GenerateOpts) -> Result<Status> {
    let tree = o.tree.tree()?;
    let spec: FieldSpec = match &o.dist {
        Some(s) => s.parse()?,
        None => suite_spec(o.seed),
    };
    let input = match o.kind {
        Kind::Field => Input::Field(spec.dyadic_field(tree, o.seed)?),
        Kind::Grid => Input::Grid(spec.grid_function(tree, o.m, o.seed)?),
    };
    emit(&to_json_string(&input.to_json()), o.out.as_deref())?;
    Ok(Status::Ok)
}
