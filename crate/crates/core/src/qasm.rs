//! OpenQASM 3 subset: one flat qubit array `q`, gates `x h ry rz cx swap`
//! and `ctrl @` / `negctrl @` modifiers, one per control, listed in control
//! order ahead of the targets. Register boundaries travel in comments:
//!
//! ```text
//! OPENQASM 3.0;
//! include "stdgates.inc";
//! // register p 2 1 0
//! // register a 1 1 2
//! qubit[3] q;
//! x q[1];
//! ctrl @ negctrl @ x q[1], q[2], q[0];
//! ```
//!
//! The parser accepts exactly what the emitter writes (plus `ctrl(k)` /
//! `negctrl(k)` counts); without register comments the whole array becomes
//! one register `q` of single-qubit subregisters.

use std::fmt::Write;

use crate::circuit::{Circuit, Control, Gate, Metadata, Primitive, RegisterSpec};
use crate::error::{Error, Result};
use crate::json::{primitive_from_parts, MAX_FILE_QUBITS};

pub fn to_qasm(circuit: &Circuit) -> String {
    let mut out = String::from("OPENQASM 3.0;\ninclude \"stdgates.inc\";\n");
    if circuit.metadata != Metadata::default() {
        if let Ok(meta) = serde_json::to_string(&circuit.metadata) {
            let _ = writeln!(out, "// metadata {meta}");
        }
    }
    for r in circuit.registers() {
        let _ = writeln!(out, "// register {} {} {} {}", r.name, r.count, r.width, r.offset);
    }
    let _ = writeln!(out, "qubit[{}] q;", circuit.num_qubits());
    for g in circuit.gates() {
        out.push_str(&gate_line(g));
        out.push('\n');
    }
    out
}

fn gate_line(g: &Gate) -> String {
    let mut line = String::new();
    let name = match g.primitive.angle() {
        Some(a) => format!("{}({a})", g.primitive.name()),
        None => g.primitive.name().to_string(),
    };
    let single_positive = g.controls.len() == 1 && g.controls[0].value && g.primitive == Primitive::X;
    if single_positive {
        line.push_str("cx");
    } else {
        for c in &g.controls {
            line.push_str(if c.value { "ctrl @ " } else { "negctrl @ " });
        }
        line.push_str(&name);
    }
    let operands: Vec<String> =
        g.controls.iter().map(|c| c.qubit).chain(g.targets.iter().copied()).map(|q| format!("q[{q}]")).collect();
    let _ = write!(line, " {};", operands.join(", "));
    line
}

fn parse_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn parse_modifier(line: usize, m: &str) -> Result<(bool, usize)> {
    let m = m.trim();
    let (word, count) = match m.split_once('(') {
        Some((w, rest)) => {
            let k = rest
                .strip_suffix(')')
                .and_then(|k| k.trim().parse::<usize>().ok())
                .filter(|&k| k >= 1)
                .ok_or_else(|| parse_err(line, format!("bad modifier `{m}`")))?;
            (w.trim(), k)
        }
        None => (m, 1),
    };
    match word {
        "ctrl" => Ok((true, count)),
        "negctrl" => Ok((false, count)),
        _ => Err(parse_err(line, format!("unknown modifier `{m}`"))),
    }
}

fn parse_operand(line: usize, s: &str) -> Result<usize> {
    s.trim()
        .strip_prefix("q[")
        .and_then(|r| r.strip_suffix(']'))
        .and_then(|i| i.trim().parse::<usize>().ok())
        .ok_or_else(|| parse_err(line, format!("bad operand `{}`", s.trim())))
}

fn parse_gate(line: usize, stmt: &str) -> Result<Gate> {
    let mut parts: Vec<&str> = stmt.split('@').collect();
    let body = parts.pop().unwrap_or_default().trim();
    let mut polarities = Vec::new();
    for m in parts {
        let (value, count) = parse_modifier(line, m)?;
        if count > 64 {
            return Err(parse_err(line, "too many controls"));
        }
        polarities.extend(std::iter::repeat_n(value, count));
    }

    let split = body.find(|c: char| c.is_whitespace()).ok_or_else(|| parse_err(line, "missing operands"))?;
    let (head, operands) = body.split_at(split);
    let (name, angle) = match head.split_once('(') {
        Some((n, rest)) => {
            let a = rest
                .strip_suffix(')')
                .and_then(|a| a.trim().parse::<f64>().ok())
                .ok_or_else(|| parse_err(line, format!("bad angle in `{head}`")))?;
            (n, Some(a))
        }
        None => (head, None),
    };
    let (name, implicit) = if name == "cx" { ("x", 1) } else { (name, 0) };
    let primitive = primitive_from_parts(name, angle).map_err(|e| parse_err(line, e))?;
    polarities.extend(std::iter::repeat_n(true, implicit));

    let qubits = operands.split(',').map(|o| parse_operand(line, o)).collect::<Result<Vec<_>>>()?;
    if qubits.len() != polarities.len() + primitive.arity() {
        return Err(parse_err(line, format!("expected {} operands", polarities.len() + primitive.arity())));
    }
    let (ctrl, targets) = qubits.split_at(polarities.len());
    let controls = ctrl.iter().zip(&polarities).map(|(&qubit, &value)| Control { qubit, value }).collect();
    Ok(Gate { primitive, targets: targets.to_vec(), controls })
}

pub fn from_qasm(text: &str) -> Result<Circuit> {
    let mut registers: Vec<(RegisterSpec, usize)> = Vec::new();
    let mut metadata = Metadata::default();
    let mut circuit: Option<Circuit> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let s = raw.trim();
        if s.is_empty() {
            continue;
        }
        if let Some(comment) = s.strip_prefix("//") {
            let comment = comment.trim();
            if let Some(rest) = comment.strip_prefix("register ") {
                if circuit.is_some() {
                    return Err(parse_err(line, "register comment after qubit declaration"));
                }
                let f: Vec<&str> = rest.split_whitespace().collect();
                let nums: Vec<usize> = f.iter().skip(1).filter_map(|v| v.parse().ok()).collect();
                if f.len() != 4 || nums.len() != 3 {
                    return Err(parse_err(line, "expected `register <name> <count> <width> <start>`"));
                }
                registers.push((RegisterSpec::new(f[0], nums[0], nums[1]), nums[2]));
            } else if let Some(rest) = comment.strip_prefix("metadata ") {
                metadata = serde_json::from_str(rest).map_err(|e| parse_err(line, e))?;
            }
            continue;
        }
        let stmt = s.strip_suffix(';').ok_or_else(|| parse_err(line, "missing `;`"))?.trim();
        if stmt.starts_with("OPENQASM") || stmt.starts_with("include") {
            continue;
        }
        if let Some(decl) = stmt.strip_prefix("qubit[") {
            if circuit.is_some() {
                return Err(parse_err(line, "second qubit declaration"));
            }
            let total = decl
                .strip_suffix("] q")
                .and_then(|n| n.trim().parse::<usize>().ok())
                .ok_or_else(|| parse_err(line, "expected `qubit[N] q;`"))?;
            if total > MAX_FILE_QUBITS {
                return Err(Error::TooLarge { n: total, max: MAX_FILE_QUBITS });
            }
            let specs: Vec<RegisterSpec> = if registers.is_empty() {
                if total == 0 {
                    Vec::new()
                } else {
                    vec![RegisterSpec::new("q", total, 1)]
                }
            } else {
                registers.iter().map(|(r, _)| r.clone()).collect()
            };
            let mut c = Circuit::new(specs)?;
            for ((_, start), reg) in registers.iter().zip(c.registers()) {
                if *start != reg.offset {
                    return Err(parse_err(line, format!("register `{}` does not start at {start}", reg.name)));
                }
            }
            if c.num_qubits() != total {
                return Err(parse_err(line, format!("registers cover {} qubits, declared {total}", c.num_qubits())));
            }
            c.metadata = std::mem::take(&mut metadata);
            circuit = Some(c);
            continue;
        }
        let c = circuit.as_mut().ok_or_else(|| parse_err(line, "gate before qubit declaration"))?;
        c.push(parse_gate(line, stmt)?)?;
    }
    circuit.ok_or_else(|| Error::Parse("no qubit declaration".into()))
}
