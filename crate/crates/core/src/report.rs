//! Serialised forms of a discovered graph: a JSON document and a p-value CSV.

use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::dataset::format_f64;
use crate::discovery::CausalGraph;
use crate::error::Result;

/// JSON document for one graph. All fields are always present; `window` and
/// `stride` are null for the raw-series baseline and diagonal p-values are null.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphReport {
    pub names: Vec<String>,
    pub alpha: f64,
    pub window: Option<usize>,
    pub stride: Option<usize>,
    pub max_lag: usize,
    pub adjacency: Vec<Vec<bool>>,
    pub p_values: Vec<Vec<Option<f64>>>,
    pub metadata: Map<String, Value>,
}

impl GraphReport {
    pub fn from_graph(graph: &CausalGraph) -> Self {
        let mut metadata = Map::new();
        metadata.insert("method".into(), Value::from(graph.method.as_str()));
        metadata.insert("auto_window".into(), Value::from(!graph.window_selections.is_empty()));
        if !graph.window_selections.is_empty() {
            let selections = graph
                .names
                .iter()
                .zip(&graph.window_selections)
                .map(|(name, s)| {
                    serde_json::json!({
                        "variable": name,
                        "length": s.length,
                        "significant": s.significant,
                        "median_p_values": s.median_p_values,
                    })
                })
                .collect();
            metadata.insert("window_selections".into(), Value::Array(selections));
        }
        Self {
            names: graph.names.clone(),
            alpha: graph.alpha,
            window: graph.plan.map(|p| p.length),
            stride: graph.plan.map(|p| p.stride),
            max_lag: graph.max_lag,
            adjacency: graph.adjacency.clone(),
            p_values: graph
                .p_values
                .iter()
                .map(|row| row.iter().map(|&p| p.is_finite().then_some(p)).collect())
                .collect(),
            metadata,
        }
    }

    pub fn insert_metadata(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `d x d` p-value table with variable names as header row and first column;
/// diagonal cells are empty.
pub fn write_p_value_csv<W: Write>(graph: &CausalGraph, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![String::new()];
    header.extend(graph.names.iter().cloned());
    w.write_record(&header)?;
    for (name, row) in graph.names.iter().zip(&graph.p_values) {
        let mut record = vec![name.clone()];
        record.extend(row.iter().map(|&p| if p.is_finite() { format_f64(p) } else { String::new() }));
        w.write_record(&record)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
