//! Closed-form qubit, gate and cycle counts and their measured counterparts.
//!
//! Gate and cycle formulas are linear in the cost profile and are written in
//! the counting alphabet, where a multi-controlled X is one gate priced by
//! its arity. The cycle formulas bound the ASAP depth from above: apart from
//! the single initialisation layer they serialise every subroutine.

use serde::{Deserialize, Serialize};

use crate::bits::{bit_width, ceil_log2, hamming, set_bits};
use crate::builders::{build, BuildSpec, Variant};
use crate::circuit::{weighted_depth, Circuit};
use crate::cost::{CostProfile, GateClass};
use crate::error::Result;
use crate::mcx::{lower_circuit, LoweringLevel, McxMode};
use crate::prep::Encoding;

/// Σ_{i=1}^{n-1} b_i.
pub fn ancilla_bits_sum(n: usize) -> u64 {
    (1..n).map(|i| bit_width(i) as u64).sum()
}

pub fn qubit_count_formula(variant: Variant, n: usize, m: usize, encoding: Encoding) -> u64 {
    let (n64, l) = (n as u64, ceil_log2(n) as u64);
    let m = if variant.has_data() { m as u64 } else { 0 };
    let ancilla = match (encoding, variant.is_disentangling()) {
        (Encoding::Binary, true) => l,
        (Encoding::Binary, false) => ancilla_bits_sum(n),
        (Encoding::OneHot, true) => n64.saturating_sub(1),
        (Encoding::OneHot, false) => n64 * n64.saturating_sub(1) / 2,
    };
    let perm = if variant.has_permutation() { n64 * l } else { 0 };
    perm + ancilla + m * n64
}

/// Gate cost of the binary uniform preparation on `0..=i`.
pub fn u_gate_count_formula(i: usize, profile: &CostProfile) -> Result<u64> {
    u_formula(i, profile, false)
}

pub fn u_cycle_count_formula(i: usize, profile: &CostProfile) -> Result<u64> {
    u_formula(i, profile, true)
}

fn u_formula(i: usize, profile: &CostProfile, cycles: bool) -> Result<u64> {
    let h = profile.cost(GateClass::H)?;
    let states = i + 1;
    if states.is_power_of_two() {
        return Ok(if cycles { h } else { bit_width(i) as u64 * h });
    }
    // s_0 < … < s_top are the set bits of i + 1; top ≥ 1 here
    let s = set_bits(states);
    let top = s.len() - 1;
    let prefix = if cycles { (s[0] as u64).min(1) } else { s[0] as u64 };
    let ch: u64 = (1..=top).map(|k| (s[k] - s[k - 1]) as u64).sum();
    Ok(prefix * h
        + profile.cost(GateClass::Ry)?
        + (top as u64 - 1) * profile.cost(GateClass::Cry)?
        + ch * profile.cost(GateClass::Ch)?)
}

/// Gate cost of the one-hot uniform preparation on `i` qubits.
pub fn v_gate_count_formula(i: usize, profile: &CostProfile) -> Result<u64> {
    let i = i as u64;
    Ok(profile.cost(GateClass::Ry)?
        + i.saturating_sub(1) * (profile.cost(GateClass::Cry)? + profile.cost(GateClass::Cx)?))
}

/// The one-hot preparation is a single serial chain.
pub fn v_cycle_count_formula(i: usize, profile: &CostProfile) -> Result<u64> {
    v_gate_count_formula(i, profile)
}

fn prep_cost(spec: &BuildSpec, i: usize, profile: &CostProfile, cycles: bool) -> Result<u64> {
    match (spec.encoding, cycles) {
        (Encoding::Binary, false) => u_gate_count_formula(i, profile),
        (Encoding::Binary, true) => u_cycle_count_formula(i, profile),
        (Encoding::OneHot, false) => v_gate_count_formula(i, profile),
        (Encoding::OneHot, true) => v_cycle_count_formula(i, profile),
    }
}

/// One controlled SWAP: two CX plus the middle X carrying every control and
/// the partner qubit.
fn swap_cost(spec: &BuildSpec, i: usize, profile: &CostProfile) -> Result<u64> {
    let controls = match spec.encoding {
        Encoding::Binary => bit_width(i),
        Encoding::OneHot => 1,
    };
    Ok(2 * profile.cost(GateClass::Cx)? + profile.controlled_x(controls + 1)?)
}

fn uncompute_cost(spec: &BuildSpec, i: usize, profile: &CostProfile) -> Result<u64> {
    let each = profile.controlled_x(bit_width(i))?;
    let gates = match spec.encoding {
        Encoding::Binary => (1..=i).map(|j| hamming(j) as u64).sum::<u64>(),
        Encoding::OneHot => i as u64,
    };
    Ok(gates * each)
}

/// Qubits moved by the swaps of one `(j, i)` pair.
fn swapped_bits(spec: &BuildSpec) -> u64 {
    let perm = if spec.variant.has_permutation() { spec.perm_bits() } else { 0 };
    (perm + spec.data_width()) as u64
}

pub fn gate_count_formula(spec: &BuildSpec, profile: &CostProfile) -> Result<u64> {
    let mut total = 0;
    for i in 1..spec.n {
        if spec.variant.has_permutation() {
            total += hamming(i) as u64 * profile.cost(GateClass::X)?;
        }
        total += prep_cost(spec, i, profile, false)?;
        total += i as u64 * swapped_bits(spec) * swap_cost(spec, i, profile)?;
        if spec.variant.is_disentangling() {
            total += uncompute_cost(spec, i, profile)?;
        }
    }
    Ok(total)
}

/// Upper bound on the weighted depth. `n = 1` gives 0: the circuit is empty.
pub fn cycle_count_formula(spec: &BuildSpec, profile: &CostProfile) -> Result<u64> {
    if spec.n < 2 {
        return Ok(0);
    }
    let mut total = if spec.variant.has_permutation() { profile.cost(GateClass::X)? } else { 0 };
    let mut prep_max = 0;
    for i in 1..spec.n {
        let prep = prep_cost(spec, i, profile, true)?;
        total += i as u64 * swapped_bits(spec) * swap_cost(spec, i, profile)?;
        if spec.variant.is_disentangling() {
            total += prep + uncompute_cost(spec, i, profile)?;
        } else {
            // fresh ancilla registers: all preparations run side by side
            prep_max = prep_max.max(prep);
        }
    }
    Ok(total + prep_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Measured {
    pub gates: u64,
    pub depth: u64,
    pub qubits: u64,
}

/// Weighted gate count and weighted critical path of the counting-level
/// lowering of `circuit`. Under unit costs the depth is the ASAP layer count.
pub fn measure_circuit(circuit: &Circuit, profile: &CostProfile) -> Result<Measured> {
    let lowered = lower_circuit(circuit, LoweringLevel::Counting, McxMode::Abstract)?;
    Ok(Measured {
        gates: lowered.count_primitives(profile)?,
        depth: weighted_depth(&lowered, profile)?,
        qubits: lowered.num_qubits() as u64,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub variant: String,
    pub n: usize,
    pub m: Option<usize>,
    pub encoding: String,
    pub qubits_formula: u64,
    pub qubits_measured: u64,
    pub gates_formula: u64,
    pub gates_measured: u64,
    pub cycles_formula: u64,
    pub depth_measured: u64,
}

impl ResourceReport {
    pub fn consistent(&self) -> bool {
        self.gates_formula == self.gates_measured && self.depth_measured <= self.cycles_formula
    }
}

/// Builds the circuit and reports formulas next to measurements.
pub fn resource_report(spec: &BuildSpec, profile: &CostProfile) -> Result<ResourceReport> {
    let circuit = build(spec)?;
    let measured = measure_circuit(&circuit, profile)?;
    Ok(ResourceReport {
        variant: spec.variant.to_string(),
        n: spec.n,
        m: spec.m,
        encoding: spec.encoding.to_string(),
        qubits_formula: qubit_count_formula(spec.variant, spec.n, spec.data_width(), spec.encoding),
        qubits_measured: measured.qubits,
        gates_formula: gate_count_formula(spec, profile)?,
        gates_measured: measured.gates,
        cycles_formula: cycle_count_formula(spec, profile)?,
        depth_measured: measured.depth,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub qubits: u64,
    pub gates: u64,
    pub cycles: u64,
}

/// Formula values only; nothing is built.
pub fn scaling_table(
    variant: Variant,
    ns: impl IntoIterator<Item = usize>,
    m: Option<usize>,
    encoding: Encoding,
    profile: &CostProfile,
) -> Result<Vec<ScalingRow>> {
    ns.into_iter()
        .map(|n| {
            let spec = BuildSpec::new(variant, n, m, encoding)?;
            Ok(ScalingRow {
                n,
                qubits: qubit_count_formula(variant, n, spec.data_width(), encoding),
                gates: gate_count_formula(&spec, profile)?,
                cycles: cycle_count_formula(&spec, profile)?,
            })
        })
        .collect()
}
