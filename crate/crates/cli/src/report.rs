//! Report assembly shared by the commands: text lines plus a JSON document.

use serde_json::{Map, Value};

use rwval_core::probspace::Filtration;
use rwval_core::{NodeId, Scalar};

/// Printed with every verdict on arbitrage or martingale measures.
pub const COLLAPSE_NOTE: &str =
    "finite horizon: U = M = L and NWA <=> ND <=> NA <=> an equivalent \
martingale measure exists, so one verdict certifies every set";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// A finished report. `negative` marks a verdict that `--strict` turns into
/// exit code 2.
#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    pub json: Value,
    pub negative: bool,
}

impl Output {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("report encodes");
                s.push('\n');
                s
            }
        }
    }
}

/// Builder collecting aligned text lines and JSON fields side by side.
#[derive(Debug, Default)]
pub struct Report {
    lines: Vec<String>,
    fields: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Report::default();
        r.fields.insert("command".into(), Value::from(command));
        r
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn kv(&mut self, key: &str, text: impl std::fmt::Display) {
        self.lines.push(format!("{key}: {text}"));
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.fields.insert(key.into(), value);
    }

    pub fn finish(self, negative: bool) -> Output {
        let mut text = self.lines.join("\n");
        text.push('\n');
        Output {
            text,
            json: Value::Object(self.fields),
            negative,
        }
    }
}

pub fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn num<S: Scalar>(x: &S) -> Value {
    Value::from(x.to_string())
}

pub fn nums<S: Scalar>(xs: &[S]) -> Value {
    Value::Array(xs.iter().map(num).collect())
}

/// `{a, b, c}` from state ids.
pub fn block_label(ids: &[String], block: &[usize]) -> String {
    let names: Vec<&str> = block.iter().map(|&w| ids[w].as_str()).collect();
    format!("{{{}}}", names.join(", "))
}

pub fn block_ids(ids: &[String], block: &[usize]) -> Value {
    Value::Array(block.iter().map(|&w| Value::from(ids[w].clone())).collect())
}

pub fn node_label(f: &Filtration, ids: &[String], node: NodeId) -> String {
    format!(
        "t={} {}",
        node.t,
        block_label(ids, f.at(node.t).block(node.block))
    )
}

pub fn node_json(f: &Filtration, ids: &[String], node: NodeId) -> Value {
    serde_json::json!({
        "t": node.t,
        "states": block_ids(ids, f.at(node.t).block(node.block)),
    })
}

/// `id=value` pairs for a per-state vector.
pub fn per_state<S: Scalar>(ids: &[String], xs: &[S]) -> String {
    ids.iter()
        .zip(xs)
        .map(|(id, x)| format!("{id}={x}"))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn per_state_json<S: Scalar>(ids: &[String], xs: &[S]) -> Value {
    Value::Object(
        ids.iter()
            .zip(xs)
            .map(|(id, x)| (id.clone(), num(x)))
            .collect(),
    )
}
