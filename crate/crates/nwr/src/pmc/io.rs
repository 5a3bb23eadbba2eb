//! JSON explicit format and the PRISM emitter.
//!
//! ```json
//! { "parameters": ["p", "q"], "states": 4, "target": 4, "sink": 3,
//!   "initial": 1, "labels": ["s", "u", "0", "1"],
//!   "transitions": [ { "from": 1, "to": 2, "poly": "p" } ] }
//! ```
//! Ids are 1-based. `initial` and `labels` are optional. Missing extremal
//! self-loops are added; repeated `(from, to)` pairs are summed.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Pmc;
use crate::algebra::{parse_poly, ParseError};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed model document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("state id {0} is out of range 1..={1}")]
    DanglingState(usize, usize),
    #[error("target and sink must be distinct")]
    SameExtremal,
    #[error("labels list has {0} entries for {1} states")]
    LabelCount(usize, usize),
    #[error(transparent)]
    Poly(#[from] ParseError),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ModelDoc {
    pub parameters: Vec<String>,
    pub states: usize,
    pub target: usize,
    pub sink: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct TransitionDoc {
    pub from: usize,
    pub to: usize,
    pub poly: String,
}

pub fn parse_model(text: &str) -> Result<Pmc, ModelError> {
    let doc: ModelDoc = serde_json::from_str(text)?;
    from_doc(doc)
}

pub(crate) fn from_doc(doc: ModelDoc) -> Result<Pmc, ModelError> {
    let n = doc.states;
    let id = |k: usize| if k >= 1 && k <= n { Ok(k - 1) } else { Err(ModelError::DanglingState(k, n)) };
    let (target, sink) = (id(doc.target)?, id(doc.sink)?);
    if target == sink {
        return Err(ModelError::SameExtremal);
    }
    let mut m = Pmc::new(doc.parameters.clone(), n, target, sink);
    // the constructor's self-loops are replaced by whatever the file lists
    let listed_target = doc.transitions.iter().any(|t| t.from == doc.target);
    let listed_sink = doc.transitions.iter().any(|t| t.from == doc.sink);
    if listed_target {
        m.set_row(target, vec![]);
    }
    if listed_sink {
        m.set_row(sink, vec![]);
    }
    for t in &doc.transitions {
        let p = parse_poly(&t.poly, &doc.parameters)?;
        m.add_transition(id(t.from)?, id(t.to)?, p);
    }
    if let Some(i) = doc.initial {
        m.set_initial(Some(id(i)?));
    }
    if !doc.labels.is_empty() {
        if doc.labels.len() != n {
            return Err(ModelError::LabelCount(doc.labels.len(), n));
        }
        m.set_labels(doc.labels);
    }
    Ok(m)
}

pub(crate) fn to_doc(pmc: &Pmc) -> ModelDoc {
    let transitions = pmc
        .transitions()
        .map(|(i, j, p)| TransitionDoc { from: i + 1, to: j + 1, poly: p.render(pmc.params()) })
        .collect();
    let labels = if pmc.labels().iter().all(|l| l.is_empty()) { Vec::new() } else { pmc.labels().to_vec() };
    ModelDoc {
        parameters: pmc.params().to_vec(),
        states: pmc.n(),
        target: pmc.target() + 1,
        sink: pmc.sink() + 1,
        initial: pmc.initial().map(|s| s + 1),
        labels,
        transitions,
    }
}

/// Pretty-printed JSON, transitions in `(from, to)` order.
pub fn emit_model(pmc: &Pmc) -> String {
    serde_json::to_string_pretty(&to_doc(pmc)).expect("model serializes") + "\n"
}

/// A PRISM DTMC with one integer variable `s` and one command per state.
/// Parameters are undefined `const double`s, the convention parametric
/// checkers use for parameter declarations.
pub fn emit_prism(pmc: &Pmc) -> String {
    let mut out = String::from("dtmc\n\n");
    for p in pmc.params() {
        let _ = writeln!(out, "const double {p};");
    }
    if !pmc.params().is_empty() {
        out.push('\n');
    }
    let n = pmc.n();
    let init = pmc.initial().unwrap_or(0) + 1;
    let _ = writeln!(out, "module chain\n  s : [1..{n}] init {init};\n");
    for s in 0..n {
        let updates: Vec<String> = pmc
            .row(s)
            .iter()
            .map(|e| {
                let p = pmc.poly(e.poly);
                let text = p.render_prism(pmc.params());
                if p.support_size() > 1 || text.starts_with('-') {
                    format!("({text}) : (s'={})", e.to + 1)
                } else {
                    format!("{text} : (s'={})", e.to + 1)
                }
            })
            .collect();
        let _ = writeln!(out, "  [] s={} -> {};", s + 1, updates.join(" + "));
    }
    let _ = writeln!(out, "\nendmodule\n");
    let _ = writeln!(out, "label \"target\" = s={};", pmc.target() + 1);
    let _ = writeln!(out, "label \"sink\" = s={};", pmc.sink() + 1);
    out
}
