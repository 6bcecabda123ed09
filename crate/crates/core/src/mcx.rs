//! Lowering of controlled gates to the primitive alphabet.
//!
//! Two levels exist. `Counting` only splits SWAPs into CX triples, leaving
//! value-controlled X gates of any arity in place; this is the alphabet the
//! closed-form counts are written in. `Full` also removes negative controls
//! and synthesises every multi-controlled X from Toffolis, and every Toffoli
//! from 6 CX + 2 H + 7 RZ.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use crate::circuit::{Circuit, Control, Gate, Primitive};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum McxMode {
    /// Keep `C^m X` as a single gate.
    #[default]
    Abstract,
    /// `4(m − 2)` Toffolis using `m − 2` qubits in an arbitrary state.
    Borrowed,
    /// `2(m − 1)` Toffolis using `m − 1` qubits known to be `|0⟩`.
    Clean,
}

impl fmt::Display for McxMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            McxMode::Abstract => "abstract",
            McxMode::Borrowed => "borrowed",
            McxMode::Clean => "clean",
        })
    }
}

impl FromStr for McxMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "abstract" => Ok(McxMode::Abstract),
            "borrowed" => Ok(McxMode::Borrowed),
            "clean" => Ok(McxMode::Clean),
            other => Err(Error::InvalidSpec(format!("unknown mcx mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoweringLevel {
    #[default]
    Counting,
    Full,
}

impl FromStr for LoweringLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "counting" => Ok(LoweringLevel::Counting),
            "full" => Ok(LoweringLevel::Full),
            other => Err(Error::InvalidSpec(format!("unknown lowering level `{other}`"))),
        }
    }
}

/// SWAP(a, b) → CX(a→b), X(a) controlled on b and the original controls,
/// CX(a→b). Non-SWAP gates pass through.
pub fn lower_controlled_swap(gate: &Gate) -> Vec<Gate> {
    if gate.primitive != Primitive::Swap {
        return vec![gate.clone()];
    }
    let (a, b) = (gate.targets[0], gate.targets[1]);
    let middle = Gate::x(a).controlled_by(gate.controls.iter().copied().chain([Control::on(b)]));
    vec![Gate::cx(a, b), middle, Gate::cx(a, b)]
}

/// Conjugates every zero-valued control with X so the inner gate has only
/// positive controls.
pub fn eliminate_negative_controls(gate: &Gate) -> Vec<Gate> {
    let negative: Vec<usize> = gate.controls.iter().filter(|c| !c.value).map(|c| c.qubit).collect();
    if negative.is_empty() {
        return vec![gate.clone()];
    }
    let mut inner = gate.clone();
    for c in &mut inner.controls {
        c.value = true;
    }
    let mut out: Vec<Gate> = negative.iter().map(|&q| Gate::x(q)).collect();
    out.push(inner);
    out.extend(negative.iter().map(|&q| Gate::x(q)));
    out
}

fn positive_x_controls(gate: &Gate) -> Result<Vec<usize>> {
    if gate.primitive != Primitive::X || gate.controls.iter().any(|c| !c.value) {
        return Err(Error::InvalidGate("expected an X gate with positive controls".into()));
    }
    Ok(gate.controls.iter().map(|c| c.qubit).collect())
}

fn toffoli(a: usize, b: usize, target: usize) -> Gate {
    Gate::x(target).controlled_by([Control::on(a), Control::on(b)])
}

/// Toffoli → 6 CX, 2 H and 7 RZ(±π/4); equal to the Toffoli up to a global
/// phase.
pub fn lower_toffoli(gate: &Gate) -> Result<Vec<Gate>> {
    let controls = positive_x_controls(gate)?;
    let [a, b] = controls[..] else {
        return Err(Error::InvalidGate(format!("Toffoli lowering needs 2 controls, got {}", controls.len())));
    };
    let t = gate.targets[0];
    let tee = |q| Gate::rz(FRAC_PI_4, q);
    let tdg = |q| Gate::rz(-FRAC_PI_4, q);
    Ok(vec![
        Gate::h(t),
        Gate::cx(b, t),
        tdg(t),
        Gate::cx(a, t),
        tee(t),
        Gate::cx(b, t),
        tdg(t),
        Gate::cx(a, t),
        tee(b),
        tee(t),
        Gate::h(t),
        Gate::cx(a, b),
        tee(a),
        tdg(b),
        Gate::cx(a, b),
    ])
}

/// Idle qubits `lower_mcx` needs for an `m`-controlled X.
pub fn idle_qubits_needed(m: usize, mode: McxMode) -> usize {
    match mode {
        McxMode::Abstract => 0,
        _ if m < 3 => 0,
        McxMode::Borrowed => m - 2,
        McxMode::Clean => m - 1,
    }
}

/// Rewrites an X with `m >= 3` positive controls into Toffolis (plus one CX
/// in clean mode). Gates with fewer controls, and abstract mode, pass
/// through. `idle` must be disjoint from the gate's support; only the first
/// [`idle_qubits_needed`] entries are used.
pub fn lower_mcx(gate: &Gate, mode: McxMode, idle: &[usize]) -> Result<Vec<Gate>> {
    let c = positive_x_controls(gate)?;
    let m = c.len();
    let needed = idle_qubits_needed(m, mode);
    if needed == 0 {
        return Ok(vec![gate.clone()]);
    }
    if idle.len() < needed {
        return Err(Error::InsufficientQubits { needed, available: idle.len() });
    }
    let work = &idle[..needed];
    if work.iter().any(|q| gate.support().any(|s| s == *q)) {
        return Err(Error::InvalidGate("idle qubit overlaps the gate".into()));
    }
    let t = gate.targets[0];
    match mode {
        McxMode::Clean => {
            // compute c0 ∧ … ∧ c_{m-1} into work[m-2], copy, uncompute
            let mut compute = vec![toffoli(c[0], c[1], work[0])];
            for k in 2..m {
                compute.push(toffoli(c[k], work[k - 2], work[k - 1]));
            }
            let mut out = compute.clone();
            out.push(Gate::cx(work[m - 2], t));
            out.extend(compute.into_iter().rev());
            Ok(out)
        }
        McxMode::Borrowed => {
            let a = work;
            let step = |k: usize| {
                let target = if k == m - 1 { t } else { a[k - 1] };
                toffoli(c[k], a[k - 2], target)
            };
            let base = toffoli(c[0], c[1], a[0]);
            let down: Vec<Gate> = (2..m).rev().map(step).collect();
            let up: Vec<Gate> = (2..m).map(step).collect();
            let mut out = Vec::with_capacity(4 * (m - 2));
            // toggle pass: flips t by the full conjunction, disturbs a[..]
            out.extend(down.iter().cloned());
            out.push(base.clone());
            out.extend(up.iter().cloned());
            // restore pass without the target toggles
            out.extend(down[1..].iter().cloned());
            out.push(base);
            out.extend(up[..up.len() - 1].iter().cloned());
            Ok(out)
        }
        McxMode::Abstract => unreachable!(),
    }
}

fn max_x_controls_after_swap_lowering(circuit: &Circuit) -> usize {
    circuit
        .gates()
        .iter()
        .map(|g| match g.primitive {
            Primitive::Swap if !g.controls.is_empty() => g.controls.len() + 1,
            Primitive::X => g.controls.len(),
            _ => 0,
        })
        .max()
        .unwrap_or(0)
}

/// Lowers a whole circuit. In clean mode a zero-initialised work register
/// named `work` is appended to hold the Toffoli ladder's intermediates;
/// borrowed mode takes the lowest-index qubits outside each gate.
pub fn lower_circuit(circuit: &Circuit, level: LoweringLevel, mode: McxMode) -> Result<Circuit> {
    let mut out = circuit.clone_registers();
    if level == LoweringLevel::Counting {
        for g in circuit.gates() {
            out.extend(lower_controlled_swap(g))?;
        }
        return Ok(out);
    }

    let work: Vec<usize> = if mode == McxMode::Clean {
        let needed = idle_qubits_needed(max_x_controls_after_swap_lowering(circuit), mode);
        if needed > 0 {
            let mut name = String::from("work");
            while out.has_register(&name) {
                name.push('_');
            }
            out.add_register((name, 1, needed))?.qubits().collect()
        } else {
            Vec::new()
        }
    } else {
        Vec::new()
    };
    out.metadata.mcx_mode = Some(mode.to_string());
    let total = out.num_qubits();

    for g in circuit.gates() {
        for g in lower_controlled_swap(g) {
            for g in eliminate_negative_controls(&g) {
                let m = g.controls.len();
                if g.primitive != Primitive::X || m < 2 || (mode == McxMode::Abstract && m >= 3) {
                    out.push(g)?;
                    continue;
                }
                let toffolis = if m == 2 {
                    vec![g]
                } else if mode == McxMode::Clean {
                    lower_mcx(&g, mode, &work)?
                } else {
                    let idle: Vec<usize> = (0..total).filter(|q| !g.support().any(|s| s == *q)).collect();
                    lower_mcx(&g, mode, &idle)?
                };
                for t in toffolis {
                    if t.controls.len() == 2 {
                        out.extend(lower_toffoli(&t)?)?;
                    } else {
                        out.push(t)?;
                    }
                }
            }
        }
    }
    Ok(out)
}
