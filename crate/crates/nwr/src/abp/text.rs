//! Text format, in the style of the circuit format with explicit layers.
//!
//! ```text
//! inputs x y
//! 0 layer 0
//! 1 layer 2
//! 2 layer 1
//! edge 0 2 x
//! edge 2 1 1 - y
//! source 0
//! sink 1
//! ```

use std::fmt::Write;

use super::{Abp, AbpEdge, AbpError};
use crate::algebra::parse_poly;

impl Abp {
    pub fn to_text(&self) -> String {
        let mut out = String::from("inputs");
        for n in &self.params {
            write!(out, " {n}").unwrap();
        }
        out.push('\n');
        for (u, l) in self.layer.iter().enumerate() {
            writeln!(out, "{u} layer {l}").unwrap();
        }
        for e in &self.edges {
            writeln!(out, "edge {} {} {}", e.from, e.to, e.label.render(&self.params)).unwrap();
        }
        writeln!(out, "source {}", self.source).unwrap();
        writeln!(out, "sink {}", self.sink).unwrap();
        out
    }
}

pub fn parse_abp(text: &str) -> Result<Abp, AbpError> {
    let mut params: Option<Vec<String>> = None;
    let mut layer: Vec<usize> = Vec::new();
    let mut edges: Vec<AbpEdge> = Vec::new();
    let (mut source, mut sink) = (None, None);
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| AbpError::Parse { line, msg };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut words = body.split_whitespace();
        let head = words.next().unwrap();
        let num = |w: Option<&str>| -> Result<usize, AbpError> {
            let w = w.ok_or_else(|| err("missing number".into()))?;
            w.parse().map_err(|_| err(format!("bad number {w:?}")))
        };
        match head {
            "inputs" => {
                if params.is_some() {
                    return Err(err("duplicate `inputs` line".into()));
                }
                params = Some(words.map(str::to_string).collect());
            }
            "edge" => {
                let names = params.as_ref().ok_or_else(|| err("missing `inputs` line".into()))?;
                let from = num(words.next())?;
                let to = num(words.next())?;
                let rest: Vec<&str> = words.collect();
                let label = parse_poly(&rest.join(" "), names).map_err(|e| err(e.to_string()))?;
                edges.push(AbpEdge { from, to, label });
            }
            "source" => source = Some(num(words.next())?),
            "sink" => sink = Some(num(words.next())?),
            _ => {
                let id: usize = head.parse().map_err(|_| err(format!("unknown line kind {head:?}")))?;
                if id != layer.len() {
                    return Err(err(format!("expected vertex {}, got {id}", layer.len())));
                }
                if words.next() != Some("layer") {
                    return Err(err("expected `layer`".into()));
                }
                layer.push(num(words.next())?);
            }
        }
    }
    let end = text.lines().count();
    let missing = |what: &str| AbpError::Parse { line: end, msg: format!("missing `{what}` line") };
    let source = source.ok_or_else(|| missing("source"))?;
    let sink = sink.ok_or_else(|| missing("sink"))?;
    let n = layer.len();
    if let Some(bad) = [source, sink].into_iter().chain(edges.iter().flat_map(|e| [e.from, e.to])).find(|&u| u >= n) {
        return Err(AbpError::Parse { line: end, msg: format!("vertex {bad} is not declared") });
    }
    Ok(Abp { params: params.unwrap_or_default(), layer, edges, source, sink })
}
