//! JSON circuit files.
//!
//! ```json
//! {"registers":[{"name":"p","count":2,"width":1}],
//!  "gates":[{"primitive":"x","angle":null,"targets":[{"reg":"p","sub":1,"bit":0}],"controls":[]}],
//!  "metadata":{"variant":"A","n":2}}
//! ```
//!
//! Qubits are addressed by register name, subregister and bit; angles are in
//! radians and survive a round trip bit for bit.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Control, Gate, Metadata, Primitive, QubitRef, RegisterSpec};
use crate::error::{Error, Result};

/// Upper bound on the qubit count accepted from a file.
pub const MAX_FILE_QUBITS: usize = 1 << 20;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CircuitDoc {
    registers: Vec<RegisterDoc>,
    gates: Vec<GateDoc>,
    #[serde(default)]
    metadata: Metadata,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegisterDoc {
    name: String,
    count: usize,
    width: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GateDoc {
    primitive: String,
    #[serde(default)]
    angle: Option<f64>,
    targets: Vec<RefDoc>,
    #[serde(default)]
    controls: Vec<ControlDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RefDoc {
    reg: String,
    sub: usize,
    bit: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ControlDoc {
    reg: String,
    sub: usize,
    bit: usize,
    value: u8,
}

/// Parses a primitive name and its optional angle.
pub fn primitive_from_parts(name: &str, angle: Option<f64>) -> Result<Primitive> {
    let p = match (name, angle) {
        ("x", None) => Primitive::X,
        ("h", None) => Primitive::H,
        ("swap", None) => Primitive::Swap,
        ("ry", Some(a)) => Primitive::Ry(a),
        ("rz", Some(a)) => Primitive::Rz(a),
        ("ry" | "rz", None) => return Err(Error::InvalidGate(format!("{name} needs an angle"))),
        ("x" | "h" | "swap", Some(_)) => return Err(Error::InvalidGate(format!("{name} takes no angle"))),
        _ => return Err(Error::InvalidGate(format!("unknown primitive `{name}`"))),
    };
    Ok(p)
}

fn ref_doc(circuit: &Circuit, q: usize) -> Result<RefDoc> {
    let QubitRef { register, sub, bit } = circuit.qubit_ref(q)?;
    Ok(RefDoc { reg: register, sub, bit })
}

pub fn to_json(circuit: &Circuit) -> Result<String> {
    let doc = CircuitDoc {
        registers: circuit
            .registers()
            .iter()
            .map(|r| RegisterDoc { name: r.name.clone(), count: r.count, width: r.width })
            .collect(),
        gates: circuit
            .gates()
            .iter()
            .map(|g| {
                Ok(GateDoc {
                    primitive: g.primitive.name().to_string(),
                    angle: g.primitive.angle(),
                    targets: g.targets.iter().map(|&t| ref_doc(circuit, t)).collect::<Result<_>>()?,
                    controls: g
                        .controls
                        .iter()
                        .map(|c| {
                            let r = ref_doc(circuit, c.qubit)?;
                            Ok(ControlDoc { reg: r.reg, sub: r.sub, bit: r.bit, value: c.value as u8 })
                        })
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?,
        metadata: circuit.metadata.clone(),
    };
    serde_json::to_string_pretty(&doc).map_err(|e| Error::Parse(e.to_string()))
}

pub fn from_json(text: &str) -> Result<Circuit> {
    let doc: CircuitDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut circuit = Circuit::new(doc.registers.into_iter().map(|r| RegisterSpec::new(r.name, r.count, r.width)))?;
    if circuit.num_qubits() > MAX_FILE_QUBITS {
        return Err(Error::TooLarge { n: circuit.num_qubits(), max: MAX_FILE_QUBITS });
    }
    circuit.metadata = doc.metadata;
    for g in doc.gates {
        let primitive = primitive_from_parts(&g.primitive, g.angle)?;
        let targets = g.targets.iter().map(|r| circuit.qubit(&r.reg, r.sub, r.bit)).collect::<Result<Vec<_>>>()?;
        let controls = g
            .controls
            .iter()
            .map(|c| {
                let qubit = circuit.qubit(&c.reg, c.sub, c.bit)?;
                match c.value {
                    0 | 1 => Ok(Control { qubit, value: c.value == 1 }),
                    v => Err(Error::InvalidGate(format!("control value {v} is not a bit"))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        circuit.push(Gate { primitive, targets, controls })?;
    }
    Ok(circuit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut c = Circuit::new([("p", 2, 2), ("a", 1, 1)]).unwrap();
        c.metadata.variant = Some("A".into());
        c.push(Gate::ry(0.1 + 0.2, 4).controlled_by([Control::off(0)])).unwrap();
        c.push(Gate::swap(1, 3).controlled_by([Control::on(4)])).unwrap();
        c.push(Gate::rz(-1e-300, 2)).unwrap();
        let text = to_json(&c).unwrap();
        assert_eq!(from_json(&text).unwrap(), c);
    }

    #[test]
    fn field_order() {
        let mut c = Circuit::new([("q", 1, 2)]).unwrap();
        c.push(Gate::cx(0, 1)).unwrap();
        let text = to_json(&c).unwrap();
        let keys = ["\"registers\"", "\"gates\"", "\"metadata\""];
        let pos: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        let gate_keys = ["\"primitive\"", "\"angle\"", "\"targets\"", "\"controls\""];
        let pos: Vec<usize> = gate_keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_bad_documents() {
        let bad = [
            "",
            "{}",
            r#"{"registers":[{"name":"q","count":1,"width":0}],"gates":[]}"#,
            r#"{"registers":[{"name":"q","count":1,"width":1}],"gates":[{"primitive":"ry","targets":[{"reg":"q","sub":0,"bit":0}]}]}"#,
            r#"{"registers":[{"name":"q","count":1,"width":1}],"gates":[{"primitive":"x","targets":[{"reg":"q","sub":0,"bit":1}]}]}"#,
            r#"{"registers":[{"name":"q","count":1,"width":2}],"gates":[{"primitive":"x","targets":[{"reg":"q","sub":0,"bit":0}],"controls":[{"reg":"q","sub":0,"bit":0,"value":1}]}]}"#,
            r#"{"registers":[{"name":"q","count":1,"width":2}],"gates":[{"primitive":"x","targets":[{"reg":"q","sub":0,"bit":0}],"controls":[{"reg":"q","sub":0,"bit":1,"value":2}]}]}"#,
            r#"{"registers":[{"name":"q","count":1,"width":1}],"gates":[{"primitive":"cz","targets":[]}]}"#,
            r#"{"registers":[{"name":"q","count":18446744073709551615,"width":2}],"gates":[]}"#,
            r#"{"registers":[],"gates":[],"extra":1}"#,
        ];
        for text in bad {
            assert!(from_json(text).is_err(), "{text}");
        }
    }
}
