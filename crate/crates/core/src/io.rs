//! Circuit files, JSON reports and CSV sweeps.
//!
//! A circuit file is line oriented:
//!
//! ```text
//! # comment
//! qubits 2
//! segment duration=0.78539816339744828 global_phase=0.78539816339744828
//! term 1.0 XX
//! term 1.0 YY
//! term 1.0 ZZ
//! cycles 1/2
//! ```
//!
//! `duration` is wall-clock time. With `ramp=NAME` the Hamiltonian is scaled
//! by the named profile over the segment, so the pulse area is the duration
//! times the profile mean.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::evolution::{Cycles, Ramp, RampProfile, Schedule, Segment};
use crate::gates::{NoiseRow, SweepRow};
use crate::pauli::{HamiltonianSpec, PauliString, MAX_QUBITS};
use crate::phase::{PhaseReport, SumRuleRecord};

#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum RampError {
    #[error("ramp table {path}: {message}")]
    Table { path: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Named ramp profiles. Built-ins are `const`, `tent` and `trapezoid`.
#[derive(Debug, Clone, Default)]
pub struct RampLibrary {
    tables: HashMap<String, RampProfile>,
}

impl RampLibrary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: &str, profile: RampProfile) {
        self.tables.insert(name.to_string(), profile);
    }

    pub fn get(&self, name: &str) -> Option<RampProfile> {
        RampProfile::builtin(name).or_else(|| self.tables.get(name).cloned())
    }

    /// Reads a two-column `s,strength` CSV. A header row is allowed.
    pub fn load_csv(&mut self, name: &str, path: &Path) -> Result<(), RampError> {
        let text = std::fs::read_to_string(path)?;
        let profile = parse_ramp_csv(&text).map_err(|message| RampError::Table {
            path: path.display().to_string(),
            message,
        })?;
        self.insert(name, profile);
        Ok(())
    }

    /// Loads `NAME.csv` beside `circuit` for every ramp name the text uses
    /// that is neither built in nor already present.
    pub fn load_sidecars(&mut self, text: &str, circuit: &Path) -> Result<(), RampError> {
        let dir = circuit.parent().unwrap_or_else(|| Path::new("."));
        for name in ramp_names(text) {
            if self.get(&name).is_none() {
                let path = dir.join(format!("{name}.csv"));
                if path.exists() {
                    self.load_csv(&name, &path)?;
                }
            }
        }
        Ok(())
    }
}

fn ramp_names(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in text.lines() {
        let body = line.split('#').next().unwrap_or("");
        if body.split_whitespace().next() != Some("segment") {
            continue;
        }
        for tok in body.split_whitespace() {
            if let Some(name) = tok.strip_prefix("ramp=") {
                if is_ident(name) && !out.iter().any(|n| n == name) {
                    out.push(name.to_string());
                }
            }
        }
    }
    out
}

fn parse_ramp_csv(text: &str) -> Result<RampProfile, String> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut points = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        if rec.len() != 2 {
            return Err(format!("row {}: expected 2 columns, got {}", i + 1, rec.len()));
        }
        match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
            (Ok(s), Ok(v)) => points.push((s, v)),
            _ if i == 0 => continue,
            _ => return Err(format!("row {}: not a number", i + 1)),
        }
    }
    RampProfile::new(points).map_err(|e| e.to_string())
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

struct Cursor<'a> {
    line: usize,
    text: &'a str,
}

impl Cursor<'_> {
    fn err(&self, token: &str, message: impl Into<String>) -> ParseError {
        let offset = token.as_ptr() as usize - self.text.as_ptr() as usize;
        let column = self.text[..offset].chars().count() + 1;
        ParseError { line: self.line, column, message: message.into() }
    }

    fn err_at_end(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, column: self.text.chars().count() + 1, message: message.into() }
    }
}

fn parse_float(cur: &Cursor, tok: &str, what: &str) -> Result<f64, ParseError> {
    let ok = !tok.is_empty()
        && tok.chars().all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'))
        && tok.chars().any(|c| c.is_ascii_digit());
    let v = if ok { tok.parse::<f64>().ok() } else { None };
    match v {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(cur.err(tok, format!("{what} {tok:?} is not a finite decimal number"))),
    }
}

struct PendingSegment {
    duration: f64,
    global_phase: f64,
    ramp: Option<Ramp>,
    hamiltonian: HamiltonianSpec,
}

/// Parses with the built-in ramps only.
pub fn parse(text: &str) -> Result<Schedule, ParseError> {
    parse_with(text, &RampLibrary::new())
}

/// Parses raw bytes, reporting invalid UTF-8 with its position.
pub fn parse_bytes(bytes: &[u8], ramps: &RampLibrary) -> Result<Schedule, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_with(text, ramps),
        Err(e) => {
            let valid = &bytes[..e.valid_up_to()];
            let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
            let start = valid.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
            let column = String::from_utf8_lossy(&valid[start..]).chars().count() + 1;
            Err(ParseError { line, column, message: "invalid UTF-8".into() })
        }
    }
}

pub fn parse_with(text: &str, ramps: &RampLibrary) -> Result<Schedule, ParseError> {
    let mut qubits: Option<usize> = None;
    let mut cycles: Option<Cycles> = None;
    let mut segments: Vec<PendingSegment> = Vec::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let body = raw.split('#').next().unwrap_or("");
        let cur = Cursor { line: line_no, text: raw };
        let mut toks = body.split_whitespace();
        let Some(keyword) = toks.next() else { continue };
        let rest: Vec<&str> = toks.collect();

        if keyword != "qubits" && qubits.is_none() {
            return Err(cur.err(keyword, "file must start with a `qubits N` header"));
        }
        match keyword {
            "qubits" => {
                if qubits.is_some() {
                    return Err(cur.err(keyword, "duplicate qubits header"));
                }
                let [n] = rest[..] else {
                    return Err(cur.err(keyword, "expected `qubits N`"));
                };
                let q = n
                    .parse::<usize>()
                    .ok()
                    .filter(|q| (1..=MAX_QUBITS).contains(q))
                    .ok_or_else(|| cur.err(n, format!("qubit count must be an integer in 1..={MAX_QUBITS}")))?;
                qubits = Some(q);
            }
            "segment" => {
                let q = qubits.expect("checked above");
                let mut duration = None;
                let mut global_phase = None;
                let mut ramp = None;
                for tok in &rest {
                    let (key, value) = tok
                        .split_once('=')
                        .ok_or_else(|| cur.err(tok, format!("expected key=value, got {tok:?}")))?;
                    let value_tok = &tok[key.len() + 1..];
                    match key {
                        "duration" if duration.is_none() => {
                            let d = parse_float(&cur, value_tok, "duration")?;
                            if d <= 0.0 {
                                return Err(cur.err(value_tok, format!("duration must be positive, got {d}")));
                            }
                            duration = Some(d);
                        }
                        "global_phase" if global_phase.is_none() => {
                            global_phase = Some(parse_float(&cur, value_tok, "global_phase")?);
                        }
                        "ramp" if ramp.is_none() => {
                            if !is_ident(value) {
                                return Err(cur.err(value_tok, format!("bad ramp name {value:?}")));
                            }
                            let profile = ramps
                                .get(value)
                                .ok_or_else(|| cur.err(value_tok, format!("unknown ramp {value:?}")))?;
                            ramp = Some(Ramp { name: value.to_string(), profile });
                        }
                        "duration" | "global_phase" | "ramp" => {
                            return Err(cur.err(tok, format!("duplicate {key}")));
                        }
                        _ => return Err(cur.err(tok, format!("unknown segment field {key:?}"))),
                    }
                }
                let duration = duration.ok_or_else(|| cur.err(keyword, "segment needs duration="))?;
                let ramp = ramp.filter(|r| !(r.profile.is_constant() && r.profile.points()[0].1 == 1.0));
                segments.push(PendingSegment {
                    duration,
                    global_phase: global_phase.unwrap_or(0.0),
                    ramp,
                    hamiltonian: HamiltonianSpec::new(q).expect("validated qubit count"),
                });
            }
            "term" => {
                let q = qubits.expect("checked above");
                let Some(seg) = segments.last_mut() else {
                    return Err(cur.err(keyword, "term before any segment"));
                };
                let [coef, string] = rest[..] else {
                    return Err(cur.err(keyword, "expected `term COEFFICIENT PAULI`"));
                };
                let c = parse_float(&cur, coef, "coefficient")?;
                if string.len() != q || !string.chars().all(|ch| matches!(ch, 'I' | 'X' | 'Y' | 'Z')) {
                    return Err(cur.err(string, format!("Pauli string {string:?} must be {q} letters from IXYZ")));
                }
                let p: PauliString = string.parse().map_err(|e| cur.err(string, format!("{e}")))?;
                seg.hamiltonian.push_term(c, p).map_err(|e| cur.err(string, format!("{e}")))?;
            }
            "cycles" => {
                if cycles.is_some() {
                    return Err(cur.err(keyword, "duplicate cycles line"));
                }
                let [m] = rest[..] else {
                    return Err(cur.err(keyword, "expected `cycles M`"));
                };
                cycles = Some(m.parse().map_err(|e| cur.err(m, format!("{e}")))?);
            }
            _ => return Err(cur.err(keyword, format!("unknown keyword {keyword:?}"))),
        }
    }

    let end = Cursor { line: last_line.max(1), text: text.lines().last().unwrap_or("") };
    let Some(q) = qubits else {
        return Err(end.err_at_end("missing `qubits N` header"));
    };
    if segments.is_empty() {
        return Err(end.err_at_end("no segments"));
    }
    let segs = segments
        .into_iter()
        .map(|s| Segment { hamiltonian: s.hamiltonian, duration: s.duration, global_phase: s.global_phase, ramp: s.ramp })
        .collect();
    Schedule::new(q, segs, cycles.unwrap_or_default()).map_err(|e| end.err_at_end(format!("{e}")))
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Canonical text: identity term first, remaining terms merged and sorted by
/// Pauli string, floats at 17 significant digits, explicit cycles line.
pub fn serialize(schedule: &Schedule) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "qubits {}", schedule.qubits);
    for seg in &schedule.segments {
        let _ = write!(out, "segment duration={}", format_float(seg.duration));
        if seg.global_phase != 0.0 {
            let _ = write!(out, " global_phase={}", format_float(seg.global_phase));
        }
        if let Some(r) = &seg.ramp {
            let _ = write!(out, " ramp={}", r.name);
        }
        out.push('\n');
        let h = &seg.hamiltonian;
        if h.identity_coefficient != 0.0 || h.terms.is_empty() {
            let _ = writeln!(out, "term {} {}", format_float(h.identity_coefficient), PauliString::identity(h.qubits));
        }
        let mut merged: Vec<(String, f64)> = Vec::new();
        for t in &h.terms {
            let key = t.string.to_string();
            match merged.iter_mut().find(|(k, _)| *k == key) {
                Some(entry) => entry.1 += t.coefficient,
                None => merged.push((key, t.coefficient)),
            }
        }
        merged.sort_by(|a, b| pauli_order(&a.0).cmp(&pauli_order(&b.0)));
        for (k, c) in merged {
            let _ = writeln!(out, "term {} {k}", format_float(c));
        }
    }
    let _ = writeln!(out, "cycles {}", schedule.cycles);
    out
}

fn pauli_order(s: &str) -> Vec<u8> {
    s.bytes()
        .map(|b| match b {
            b'I' => 0,
            b'X' => 1,
            b'Y' => 2,
            _ => 3,
        })
        .collect()
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round12(n.as_f64().expect("f64"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serializes to pretty JSON with every float at 12 significant digits.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("report types serialize");
    round_value(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("value serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct Conventions {
    pub global_phase_included: bool,
    pub cycles: Cycles,
}

impl Conventions {
    pub fn of(schedule: &Schedule) -> Self {
        Self {
            global_phase_included: schedule.segments.iter().any(|s| s.global_phase != 0.0),
            cycles: schedule.cycles,
        }
    }
}

fn phase_entry(state: &[[f64; 2]], p: &PhaseReport) -> Value {
    json!({
        "state": state,
        "connection_integral": p.connection_integral,
        "closing_arg": p.closing_arg,
        "gauge_correction": p.gauge_correction,
        "gamma": p.gamma,
    })
}

/// JSON report of a sum-rule run.
pub fn emit_report(record: &SumRuleRecord, nu_h_per_segment: &[Option<f64>], conventions: &Conventions) -> String {
    let gammas: Vec<Value> = record.gammas.iter().map(|g| phase_entry(&g.state, &g.phase)).collect();
    let report = json!({
        "nu_u": record.nu_u,
        "nu_h_per_segment": nu_h_per_segment,
        "gamma_sum_over_2pi": record.gamma_sum_over_2pi,
        "consistent": record.consistent,
        "gammas": gammas,
        "conventions": conventions,
        "residuals": {
            "winding": record.winding.residual,
            "sum_rule": (record.gamma_sum_over_2pi - record.nu_u as f64).abs(),
        },
    });
    to_json(&report)
}

/// JSON report of a single-state phase run.
pub fn emit_phase_report(state: &[[f64; 2]], report: &PhaseReport, conventions: &Conventions) -> String {
    let mut v = phase_entry(state, report);
    v["conventions"] = serde_json::to_value(conventions).expect("serializes");
    to_json(&v)
}

pub const SWEEP_HEADER: [&str; 7] =
    ["alpha0", "beta0", "concurrence", "gamma_numeric", "gamma_closed_form", "prediction", "difference"];

pub const NOISE_HEADER: [&str; 6] = ["alpha0", "b_over_lambda", "gamma_clean", "gamma_noisy", "shift", "prediction"];

struct Csv12(f64);

impl fmt::Display for Csv12 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let x = round12(self.0);
        if x.is_nan() {
            f.write_str("NaN")
        } else if x == 0.0 || (1e-4..1e15).contains(&x.abs()) {
            write!(f, "{x}")
        } else {
            write!(f, "{x:e}")
        }
    }
}

fn emit_csv(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.iter().map(|&x| Csv12(x).to_string())).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn emit_sweep(rows: &[SweepRow]) -> String {
    emit_csv(
        &SWEEP_HEADER,
        rows.iter().map(|r| {
            vec![r.alpha0, r.beta0, r.concurrence, r.gamma_numeric, r.gamma_closed_form, r.prediction, r.difference]
        }),
    )
}

pub fn emit_noise(rows: &[NoiseRow]) -> String {
    emit_csv(
        &NOISE_HEADER,
        rows.iter().map(|r| vec![r.alpha0, r.b_over_lambda, r.gamma_clean, r.gamma_noisy, r.shift, r.prediction]),
    )
}
