mod duality;
mod generate;
mod norms;
mod suites;

pub use duality::duality;
pub use generate::generate;
pub use norms::norms;
pub use suites::{equivalence, multiplier, tent};

use anyhow::Result;
use serde_json::{Map, Value};

use crate::report::{emit, to_json_string, Format, Table};
use crate::OutputOpts;

/// Printed with every report built from grid functions.
pub const TRUNCATION_NOTE: &str = "grid data covers t in (2^-D-1, 1]; Carleson boxes treat the function as zero below the finest Whitney slab";

/// A finished suite: parameters, one row per trial and extra top-level keys.
pub struct Report {
    pub command: &'static str,
    pub parameters: Map<String, Value>,
    pub table: Table,
    pub extra: Map<String, Value>,
}

impl Report {
    pub fn new(command: &'static str, parameters: Value, table: Table) -> Self {
        let parameters = match parameters {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        Self {
            command,
            parameters,
            table,
            extra: Map::new(),
        }
    }

    pub fn json(&self) -> Value {
        let mut out = Map::new();
        out.insert("command".into(), self.command.into());
        out.insert("parameters".into(), Value::Object(self.parameters.clone()));
        out.insert("rows".into(), self.table.rows_json());
        out.insert("summary".into(), Value::Object(self.table.summary()));
        out.extend(self.extra.clone());
        Value::Object(out)
    }

    /// Writes the report; with `--out`, also prints the suite min/max to stdout.
    pub fn write(&self, output: &OutputOpts, default: Format) -> Result<()> {
        let text = match output.format.unwrap_or(default) {
            Format::Json => to_json_string(&self.json()),
            Format::Csv => self.table.to_csv()?,
        };
        emit(&text, output.out.as_deref())?;
        if output.out.is_some() {
            print!("{}", summary_table(&self.table).pretty());
        }
        Ok(())
    }
}

fn summary_table(table: &Table) -> Table {
    use crate::report::Cell;
    let mut out = Table::new(vec!["column", "min", "max"]);
    for (name, v) in table.summary() {
        let get = |k: &str| v[k].as_f64().into();
        out.push(vec![Cell::Text(name), get("min"), get("max")]);
    }
    out.push(vec![Cell::Text("rows".into()), Cell::Int(table.rows.len() as u64), Cell::Missing]);
    out
}
