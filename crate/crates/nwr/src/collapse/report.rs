use std::time::Duration;

use serde::Serialize;

use crate::pmc::StateId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceClass {
    pub exit: StateId,
    /// Exit first, then the rest ascending.
    pub members: Vec<StateId>,
}

#[derive(Clone, Debug)]
pub struct CollapseReport {
    pub classes: Vec<EquivalenceClass>,
    pub size_before: usize,
    pub size_after: usize,
    /// Old state to new state.
    pub mapping: Vec<StateId>,
    /// States dropped from a class because an earlier class owned them.
    pub trimmed: usize,
    pub elapsed: Duration,
}

#[derive(Serialize)]
struct ClassDoc {
    exit: usize,
    members: Vec<usize>,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    benchmark: &'a str,
    size_before: usize,
    size_after: usize,
    class_count: usize,
    classes: Vec<ClassDoc>,
    mapping: Vec<usize>,
}

#[derive(Serialize)]
struct CsvRow<'a> {
    benchmark: &'a str,
    size_before: usize,
    size_after: usize,
    classes: usize,
    elapsed_ms: u128,
}

impl CollapseReport {
    /// JSON with 1-based ids. Timing is left out so the document depends on
    /// the input only; the CSV row carries it.
    pub fn to_json(&self, benchmark: &str) -> String {
        let doc = ReportDoc {
            benchmark,
            size_before: self.size_before,
            size_after: self.size_after,
            class_count: self.classes.len(),
            classes: self
                .classes
                .iter()
                .map(|c| ClassDoc { exit: c.exit + 1, members: c.members.iter().map(|s| s + 1).collect() })
                .collect(),
            mapping: self.mapping.iter().map(|s| s + 1).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
    }

    /// `benchmark,size_before,size_after,classes,elapsed_ms` with a header line.
    pub fn to_csv(rows: &[(&str, &CollapseReport)]) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for (name, r) in rows {
            w.serialize(CsvRow {
                benchmark: name,
                size_before: r.size_before,
                size_after: r.size_after,
                classes: r.classes.len(),
                elapsed_ms: r.elapsed.as_millis(),
            })
            .expect("csv row serializes");
        }
        String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
    }
}
