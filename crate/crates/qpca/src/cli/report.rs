//! Serialization of reports and traces: canonical JSON, text, and CSV.
//!
//! All three formats share [`fmt_f64`], so every numeric value agrees across
//! modes, and JSON output is canonical: fixed key order and fixed float
//! formatting, so parsing and re-serializing a report is byte-identical.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{Map, Number, Value};

use crate::attack::AttackReport;
use crate::generators::GeneratedSequence;
use crate::numfmt::fmt_f64;

/// Compact JSON with floats routed through [`fmt_f64`].
struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        writer.write_all(fmt_f64(value).as_bytes())
    }
}

/// Serializes a JSON value canonically (no trailing newline).
pub fn to_canonical_json(value: &Value) -> String {
    let mut out = Vec::new();
    let mut serializer = serde_json::Serializer::with_formatter(&mut out, CanonicalFormatter);
    value
        .serialize(&mut serializer)
        .expect("in-memory JSON serialization cannot fail");
    String::from_utf8(out).expect("serializer emits UTF-8")
}

fn float(v: f64) -> Value {
    Value::Number(Number::from_f64(v).expect("finite report value"))
}

/// How many distribution entries reports carry.
const DISTRIBUTION_TOP: usize = 10;

/// The attack report as a JSON value with the documented schema. `params`
/// is the generator parameter block built by the caller.
pub fn attack_report_value(report: &AttackReport, params: Value) -> Value {
    let plan = &report.plan;
    let mut root = Map::new();
    root.insert("generator".into(), plan.spec().name().into());
    root.insert("params".into(), params);
    root.insert("bits".into(), plan.observed().to_string().into());
    root.insert("n_qubits".into(), plan.domain_qubits().into());
    root.insert("m".into(), plan.bit_qubits().into());
    root.insert("k".into(), plan.iterations().into());
    root.insert("theta".into(), float(plan.theta()));
    root.insert("predicted_success".into(), float(plan.predicted_success()));

    let mut distribution = Map::new();
    for &(outcome, probability) in report.distribution.iter().take(DISTRIBUTION_TOP) {
        distribution.insert(outcome.to_string(), float(probability));
    }
    root.insert("distribution".into(), Value::Object(distribution));
    root.insert("top_outcome".into(), report.top_outcome.into());
    root.insert("top_probability".into(), float(report.top_probability));
    root.insert(
        "classical_seeds".into(),
        Value::Array(report.classical_seeds.iter().map(|&s| s.into()).collect()),
    );
    root.insert(
        "recovered_states".into(),
        Value::Array(
            recovered_rows(report)
                .into_iter()
                .map(|(offset, state, bit)| {
                    let mut row = Map::new();
                    row.insert("offset".into(), offset.into());
                    row.insert("state".into(), state.into());
                    row.insert("bit".into(), bit.into());
                    Value::Object(row)
                })
                .collect(),
        ),
    );
    root.insert("agreement".into(), report.agreement.into());
    Value::Object(root)
}

/// Recovered chain as (offset, state, bit) rows in chronological order.
fn recovered_rows(report: &AttackReport) -> Vec<(i64, usize, u8)> {
    let mut rows = Vec::new();
    if let Some(recovered) = &report.recovered {
        let back = recovered.backward.len() as i64;
        for (i, &(state, bit)) in recovered.backward.iter().rev().enumerate() {
            rows.push((i as i64 - back, state, bit));
        }
        rows.push((0, recovered.representative.0, recovered.representative.1));
        for (i, &(state, bit)) in recovered.forward.iter().enumerate() {
            rows.push((i as i64 + 1, state, bit));
        }
    }
    rows
}

pub fn attack_report_text(report: &AttackReport) -> String {
    let plan = &report.plan;
    let mut out = String::new();
    out.push_str(&format!("generator: {}\n", plan.spec().name()));
    out.push_str(&format!("params: {}\n", plan.spec().params()));
    out.push_str(&format!("bits: {}\n", plan.observed()));
    out.push_str(&format!("n_qubits: {}\n", plan.domain_qubits()));
    out.push_str(&format!("m: {}\n", plan.bit_qubits()));
    out.push_str(&format!("k: {}\n", plan.iterations()));
    out.push_str(&format!("theta: {}\n", fmt_f64(plan.theta())));
    out.push_str(&format!(
        "predicted_success: {}\n",
        fmt_f64(plan.predicted_success())
    ));
    out.push_str("distribution:\n");
    for &(outcome, probability) in report.distribution.iter().take(DISTRIBUTION_TOP) {
        out.push_str(&format!("  {} {}\n", outcome, fmt_f64(probability)));
    }
    out.push_str(&format!("top_outcome: {}\n", report.top_outcome));
    out.push_str(&format!(
        "top_probability: {}\n",
        fmt_f64(report.top_probability)
    ));
    let seeds: Vec<String> = report
        .classical_seeds
        .iter()
        .map(|s| s.to_string())
        .collect();
    out.push_str(&format!("classical_seeds: {{{}}}\n", seeds.join(",")));
    out.push_str("recovered_states:\n");
    for (offset, state, bit) in recovered_rows(report) {
        let label = report.plan.spec().label(state);
        let label = if label == state.to_string() {
            String::new()
        } else {
            format!(" ({label})")
        };
        out.push_str(&format!(
            "  offset={offset} state={state}{label} bit={bit}\n"
        ));
    }
    out.push_str(&format!("agreement: {}\n", report.agreement));
    out
}

pub fn attack_report_csv(report: &AttackReport, params: &[(&str, u64)]) -> String {
    let plan = &report.plan;
    let mut out = String::from("key,value\n");
    out.push_str(&format!("generator,{}\n", plan.spec().name()));
    for (key, value) in params {
        out.push_str(&format!("params.{key},{value}\n"));
    }
    out.push_str(&format!("bits,{}\n", plan.observed()));
    out.push_str(&format!("n_qubits,{}\n", plan.domain_qubits()));
    out.push_str(&format!("m,{}\n", plan.bit_qubits()));
    out.push_str(&format!("k,{}\n", plan.iterations()));
    out.push_str(&format!("theta,{}\n", fmt_f64(plan.theta())));
    out.push_str(&format!(
        "predicted_success,{}\n",
        fmt_f64(plan.predicted_success())
    ));
    for &(outcome, probability) in report.distribution.iter().take(DISTRIBUTION_TOP) {
        out.push_str(&format!(
            "distribution.{},{}\n",
            outcome,
            fmt_f64(probability)
        ));
    }
    out.push_str(&format!("top_outcome,{}\n", report.top_outcome));
    out.push_str(&format!(
        "top_probability,{}\n",
        fmt_f64(report.top_probability)
    ));
    for (i, seed) in report.classical_seeds.iter().enumerate() {
        out.push_str(&format!("classical_seeds.{i},{seed}\n"));
    }
    for (i, (offset, state, bit)) in recovered_rows(report).into_iter().enumerate() {
        out.push_str(&format!("recovered_states.{i}.offset,{offset}\n"));
        out.push_str(&format!("recovered_states.{i}.state,{state}\n"));
        out.push_str(&format!("recovered_states.{i}.bit,{bit}\n"));
    }
    out.push_str(&format!("agreement,{}\n", report.agreement));
    out
}

/// Paper-style trace listing: one block per snapshot with nonzero entries
/// sorted by (domain, bits), then the candidate sets.
pub fn trace_text(report: &AttackReport) -> String {
    let trace = &report.trace;
    let width = report.plan.bit_qubits();
    let mut out = String::new();
    for snapshot in trace.snapshots() {
        out.push_str(&snapshot.label);
        out.push('\n');
        for entry in &snapshot.entries {
            out.push_str(&format!(
                "domain={} bits={:0width$b} ancilla={} amp={},{}\n",
                entry.domain,
                entry.bits,
                entry.ancilla,
                fmt_f64(entry.amplitude.re),
                fmt_f64(entry.amplitude.im),
            ));
        }
        out.push('\n');
    }
    for (i, candidates) in trace.candidate_sets().iter().enumerate() {
        let members: Vec<String> = candidates.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("X_{} = {{{}}}\n", i + 1, members.join(",")));
    }
    out
}

pub fn generate_json(sequence: &GeneratedSequence) -> Value {
    let mut root = Map::new();
    root.insert(
        "states".into(),
        Value::Array(sequence.states.iter().map(|&s| s.into()).collect()),
    );
    root.insert("bits".into(), sequence.bits.to_string().into());
    Value::Object(root)
}

pub fn generate_text(sequence: &GeneratedSequence) -> String {
    let mut out = String::new();
    for (i, (state, bit)) in sequence.states.iter().zip(sequence.bits.iter()).enumerate() {
        out.push_str(&format!("step={} state={} bit={}\n", i + 1, state, bit));
    }
    let states: Vec<String> = sequence.states.iter().map(|s| s.to_string()).collect();
    out.push_str(&format!("states: {}\n", states.join(" ")));
    out.push_str(&format!("bits: {}\n", sequence.bits));
    out
}

pub fn generate_csv(sequence: &GeneratedSequence) -> String {
    let mut out = String::from("step,state,bit\n");
    for (i, (state, bit)) in sequence.states.iter().zip(sequence.bits.iter()).enumerate() {
        out.push_str(&format!("{},{},{}\n", i + 1, state, bit));
    }
    out
}

pub fn bruteforce_json(seeds: &[usize], elapsed_seconds: f64) -> Value {
    let mut root = Map::new();
    root.insert(
        "seeds".into(),
        Value::Array(seeds.iter().map(|&s| s.into()).collect()),
    );
    root.insert("elapsed_seconds".into(), float(elapsed_seconds));
    Value::Object(root)
}

pub fn bruteforce_text(seeds: &[usize], elapsed_seconds: f64) -> String {
    let members: Vec<String> = seeds.iter().map(|s| s.to_string()).collect();
    format!(
        "seeds: {{{}}}\nelapsed_seconds: {}\n",
        members.join(","),
        fmt_f64(elapsed_seconds)
    )
}

pub fn bruteforce_csv(seeds: &[usize], elapsed_seconds: f64) -> String {
    let mut out = String::from("key,value\n");
    for (i, seed) in seeds.iter().enumerate() {
        out.push_str(&format!("seeds.{i},{seed}\n"));
    }
    out.push_str(&format!("elapsed_seconds,{}\n", fmt_f64(elapsed_seconds)));
    out
}

/// Per-gate unitarity results for `verify-gates`.
pub struct GateCheck {
    pub name: String,
    pub dim: usize,
    pub max_deviation: f64,
    pub unitary: bool,
}

pub fn verify_json(checks: &[GateCheck]) -> Value {
    let mut root = Map::new();
    root.insert(
        "gates".into(),
        Value::Array(
            checks
                .iter()
                .map(|c| {
                    let mut row = Map::new();
                    row.insert("name".into(), c.name.clone().into());
                    row.insert("dim".into(), c.dim.into());
                    row.insert("max_deviation".into(), float(c.max_deviation));
                    row.insert("unitary".into(), c.unitary.into());
                    Value::Object(row)
                })
                .collect(),
        ),
    );
    root.insert(
        "all_unitary".into(),
        checks.iter().all(|c| c.unitary).into(),
    );
    Value::Object(root)
}

pub fn verify_text(checks: &[GateCheck]) -> String {
    let mut out = String::new();
    for c in checks {
        out.push_str(&format!(
            "gate={} dim={} max_deviation={} unitary={}\n",
            c.name,
            c.dim,
            fmt_f64(c.max_deviation),
            c.unitary
        ));
    }
    out.push_str(&format!(
        "all_unitary: {}\n",
        checks.iter().all(|c| c.unitary)
    ));
    out
}

pub fn verify_csv(checks: &[GateCheck]) -> String {
    let mut out = String::from("gate,dim,max_deviation,unitary\n");
    for c in checks {
        out.push_str(&format!(
            "{},{},{},{}\n",
            c.name,
            c.dim,
            fmt_f64(c.max_deviation),
            c.unitary
        ));
    }
    out
}
