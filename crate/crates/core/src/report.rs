//! Command reports: named values plus a transcript of the invariants that
//! were checked, rendered as text or as JSON with a schema version.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::algebra::{LinearMap, PolyMap, Polynomial, ScalarMatrix};
use crate::text::component_strings;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub check: String,
    pub passed: bool,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub field: String,
    entries: Vec<(String, Value)>,
    transcript: Vec<Check>,
}

pub fn map_value(h: &PolyMap) -> Value {
    Value::Array(
        component_strings(h)
            .into_iter()
            .map(Value::String)
            .collect(),
    )
}

pub fn matrix_value(m: &ScalarMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|s| Value::String(s.to_string())).collect()))
            .collect(),
    )
}

pub fn linear_value(t: &LinearMap) -> Value {
    matrix_value(t.matrix())
}

pub fn poly_value(p: &Polynomial) -> Value {
    Value::String(p.to_string())
}

impl Report {
    pub fn new(command: &str, field: impl ToString) -> Self {
        Report {
            command: command.to_string(),
            field: field.to_string(),
            entries: Vec::new(),
            transcript: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.entries.push((key.to_string(), value.into()));
        self
    }

    pub fn check(&mut self, name: &str, passed: bool) -> &mut Self {
        self.transcript.push(Check {
            check: name.to_string(),
            passed,
        });
        self
    }

    pub fn all_passed(&self) -> bool {
        self.transcript.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("schema".into(), SCHEMA_VERSION.into());
        obj.insert("command".into(), self.command.clone().into());
        obj.insert("field".into(), self.field.clone().into());
        let mut result = Map::new();
        for (k, v) in &self.entries {
            result.insert(k.clone(), v.clone());
        }
        obj.insert("result".into(), Value::Object(result));
        obj.insert(
            "transcript".into(),
            serde_json::to_value(&self.transcript).expect("serializable"),
        );
        Value::Object(obj)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} over {}\n", self.command, self.field);
        for (k, v) in &self.entries {
            render(&mut out, k, v, 0);
        }
        if !self.transcript.is_empty() {
            out.push_str("checks:\n");
            for c in &self.transcript {
                let mark = if c.passed { "pass" } else { "FAIL" };
                out.push_str(&format!("  [{mark}] {}\n", c.check));
            }
        }
        out
    }
}

fn render(out: &mut String, key: &str, v: &Value, indent: usize) {
    let pad = "  ".repeat(indent);
    match v {
        Value::String(s) => out.push_str(&format!("{pad}{key}: {s}\n")),
        Value::Array(items) if items.iter().all(Value::is_string) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for i in items {
                out.push_str(&format!("{pad}  {}\n", i.as_str().unwrap()));
            }
        }
        Value::Array(items) if items.iter().all(|i| i.is_array()) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for i in items {
                let row: Vec<String> = i
                    .as_array()
                    .unwrap()
                    .iter()
                    .map(|x| x.as_str().map_or_else(|| x.to_string(), str::to_string))
                    .collect();
                out.push_str(&format!("{pad}  [{}]\n", row.join(", ")));
            }
        }
        Value::Object(m) => {
            out.push_str(&format!("{pad}{key}:\n"));
            for (k, v) in m {
                render(out, k, v, indent + 1);
            }
        }
        other => out.push_str(&format!("{pad}{key}: {other}\n")),
    }
}
