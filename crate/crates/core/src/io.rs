//! Trace files, DOT export and analysis reports.
//!
//! A trace file holds one JSON object per line with sorted keys:
//! `{"state":{"a":1,"f":1},"t":0}` for the initial state, then
//! `{"executed":"r1","state":{...},"t":1}` and so on. The last record may
//! carry `"stop":"terminated"` or `"stop":"budget-exhausted"`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::causal::ReactionGraph;
use crate::engine::{StopReason, Trace};
use crate::error::{Error, Result, TraceError};
use crate::hierarchy::Level1Verdict;
use crate::multiset::Multiset;
use crate::selfrep::Level0Verdict;

// fields in key order so records serialize with sorted keys
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TraceRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    executed: Option<String>,
    state: Multiset,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stop: Option<StopReason>,
    t: usize,
}

pub fn write_trace(trace: &Trace, sink: &mut impl Write) -> Result<()> {
    let last = trace.len() - 1;
    for (t, state) in trace.states().iter().enumerate() {
        let record = TraceRecord {
            executed: t.checked_sub(1).map(|i| trace.executed()[i].clone()),
            state: state.clone(),
            stop: (t == last).then_some(trace.stop()),
            t,
        };
        serde_json::to_writer(&mut *sink, &record).map_err(std::io::Error::from)?;
        sink.write_all(b"\n")?;
    }
    sink.flush()?;
    Ok(())
}

/// Parses a trace file. Blank lines are ignored. A missing `stop` on the
/// last record reads as budget exhaustion.
pub fn read_trace(source: impl BufRead) -> Result<Trace> {
    let mut states = Vec::new();
    let mut executed = Vec::new();
    let mut stop = None;
    for (i, line) in source.lines().enumerate() {
        let line = line.map_err(TraceError::Io)?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: TraceRecord = serde_json::from_str(&line)
            .map_err(|e| TraceError::Malformed { line: lineno, msg: e.to_string() })?;
        let invariant = |msg: String| Error::from(TraceError::Invariant { line: lineno, msg });
        if stop.is_some() {
            return Err(invariant("record after the one carrying `stop`".into()));
        }
        if record.t != states.len() {
            return Err(invariant(format!("expected t = {}, found {}", states.len(), record.t)));
        }
        match (record.t, record.executed) {
            (0, Some(_)) => return Err(invariant("the initial record has an `executed` field".into())),
            (0, None) => {}
            (_, Some(name)) => executed.push(name),
            (_, None) => return Err(invariant("missing `executed` field".into())),
        }
        states.push(record.state);
        stop = record.stop;
    }
    if states.is_empty() {
        return Err(TraceError::Empty.into());
    }
    Trace::from_parts(states, executed, stop.unwrap_or(StopReason::BudgetExhausted))
}

fn dot_id(s: &str) -> String {
    let escaped = s.replace('\\', "\\\\").replace('"', "\\\"");
    format!("\"{escaped}\"")
}

/// Renders a reaction graph as a DOT digraph, one edge statement per causal
/// link.
pub fn export_dot(graph: &ReactionGraph) -> String {
    let mut out = String::from("digraph {\n");
    for node in &graph.nodes {
        let _ = writeln!(out, "  {};", dot_id(node.as_str()));
    }
    for e in &graph.edges {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            dot_id(e.source.as_str()),
            dot_id(e.target.as_str()),
            dot_id(&e.via)
        );
    }
    out.push_str("}\n");
    out
}

/// `sha256:` followed by the hex digest of the chemistry text.
pub fn fingerprint(text: &str) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(text.as_bytes())))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReportEntry {
    Level0(Level0Verdict),
    Level1(Level1Verdict),
    /// The search hit a budget; no verdict either way.
    Inconclusive { subject: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub fingerprint: String,
    pub parameters: BTreeMap<String, Value>,
    pub verdicts: Vec<ReportEntry>,
}

impl ReportDocument {
    pub fn new(spec_text: &str) -> Self {
        ReportDocument { fingerprint: fingerprint(spec_text), parameters: BTreeMap::new(), verdicts: Vec::new() }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        let value = serde_json::to_value(value).expect("parameters are plain data");
        self.parameters.insert(key.to_string(), value);
        self
    }

    pub fn push(&mut self, entry: ReportEntry) {
        self.verdicts.push(entry);
    }

    /// Pretty JSON with every object's keys sorted.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("reports are plain data");
        let mut s = serde_json::to_string_pretty(&value).expect("values serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::causal::reaction_graph;
    use crate::engine::{simulate, FeasibilityMode, SchedulerPolicy};
    use crate::{ms, parse_chemistry};

    fn roundtrip(trace: &Trace) -> Trace {
        let mut buf = Vec::new();
        write_trace(trace, &mut buf).unwrap();
        read_trace(buf.as_slice()).unwrap()
    }

    #[test]
    fn trace_roundtrip() {
        let spec = parse_chemistry("molecules: a, f\nreaction r1: a + f -> 2 a\nreaction r2: 2 a -> a + f\ninit: a, f")
            .unwrap();
        let trace = simulate(&spec, 1, SchedulerPolicy::FirstDeclared, FeasibilityMode::Standard);
        let mut buf = Vec::new();
        write_trace(&trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], r#"{"state":{"a":1,"f":1},"t":0}"#);
        assert_eq!(lines[1], r#"{"executed":"r1","state":{"a":2},"stop":"budget-exhausted","t":1}"#);
        assert_eq!(roundtrip(&trace), trace);

        let inert = simulate(&parse_chemistry("init:").unwrap(), 5, SchedulerPolicy::FirstDeclared, FeasibilityMode::Standard);
        let mut buf = Vec::new();
        write_trace(&inert, &mut buf).unwrap();
        assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 1);
        assert_eq!(roundtrip(&inert), inert);
    }

    #[test]
    fn trace_reading_errors() {
        let bad = |text: &str| read_trace(text.as_bytes()).unwrap_err();
        assert!(matches!(
            bad("{\"state\":{},\"t\":0}\n{\"executed\":\"r\",\"state\":{},\"t\":2}"),
            Error::Trace(TraceError::Invariant { line: 2, .. })
        ));
        assert!(matches!(bad("{\"state\":{\"a\":-1},\"t\":0}"), Error::Trace(TraceError::Malformed { line: 1, .. })));
        assert!(matches!(bad("{\"executed\":\"r\",\"state\":{},\"t\":0}"), Error::Trace(TraceError::Invariant { .. })));
        assert!(matches!(bad("{\"state\":{},\"t\":0}\n{\"state\":{},\"t\":1}"), Error::Trace(TraceError::Invariant { .. })));
        assert!(matches!(bad("not json"), Error::Trace(TraceError::Malformed { .. })));
        assert!(matches!(bad(""), Error::Trace(TraceError::Empty)));
        assert!(matches!(
            bad("{\"state\":{},\"stop\":\"terminated\",\"t\":0}\n{\"executed\":\"r\",\"state\":{},\"t\":1}"),
            Error::Trace(TraceError::Invariant { line: 2, .. })
        ));
    }

    #[test]
    fn zero_counts_are_dropped_on_read() {
        let t = read_trace(r#"{"state":{"a":0,"b":2},"t":0}"#.as_bytes()).unwrap();
        assert_eq!(t.states()[0], ms! {"b" => 2});
    }

    #[test]
    fn dot_output() {
        let empty = parse_chemistry("init:").unwrap();
        let g = reaction_graph(&Multiset::new(), &empty, 0, FeasibilityMode::Standard);
        assert_eq!(export_dot(&g), "digraph {\n}\n");

        let spec = parse_chemistry("molecules: a, a1, c\nreaction r1: a + a1 -> 2 c\nreaction r2: a -> c\ninit: a, a1").unwrap();
        let g = reaction_graph(spec.initial(), &spec, 0, FeasibilityMode::Standard);
        let dot = export_dot(&g);
        assert!(dot.contains(r#""a" -> "c" [label="r1"];"#));
        assert!(dot.contains(r#""a" -> "c" [label="r2"];"#));
        assert_eq!(dot.lines().filter(|l| l.contains("->")).count(), 3);
        assert!(dot.contains("  \"c\";"));
    }

    #[test]
    fn report_keys_are_sorted_and_stable() {
        let mut doc = ReportDocument::new("init:").param("policy", SchedulerPolicy::RoundRobin).param("max_len", 4);
        doc.push(ReportEntry::Inconclusive { subject: "a".into(), reason: "budget".into() });
        let json = doc.to_json();
        assert_eq!(json, doc.clone().to_json());
        assert!(json.find("\"fingerprint\"").unwrap() < json.find("\"parameters\"").unwrap());
        assert!(json.find("\"max_len\"").unwrap() < json.find("\"policy\"").unwrap());
        assert!(json.contains("\"kind\": \"inconclusive\""));
        assert_eq!(fingerprint("x"), fingerprint("x"));
        assert_ne!(fingerprint("x"), fingerprint("y"));
    }
}
