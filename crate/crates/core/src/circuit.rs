//! Gate-level circuit representation.
//!
//! Qubits are addressed through a register table of `(name, count, width)`
//! entries: each register holds `count` subregisters of `width` qubits.
//! Global numbering walks registers in declaration order, subregisters in
//! ascending order and bits from the least significant one up, so bit `b`
//! of a subregister contributes `2^b` to the integer it stores.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cost::{CostProfile, GateClass};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterSpec {
    pub name: String,
    pub count: usize,
    pub width: usize,
}

impl RegisterSpec {
    pub fn new(name: impl Into<String>, count: usize, width: usize) -> Self {
        RegisterSpec { name: name.into(), count, width }
    }
}

impl<S: Into<String>> From<(S, usize, usize)> for RegisterSpec {
    fn from((name, count, width): (S, usize, usize)) -> Self {
        RegisterSpec::new(name, count, width)
    }
}

/// A declared register together with the global index of its first qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub count: usize,
    pub width: usize,
    pub offset: usize,
}

impl Register {
    pub fn size(&self) -> usize {
        self.count * self.width
    }

    pub fn subregister(&self, sub: usize) -> Result<Subregister> {
        if sub >= self.count {
            return Err(Error::UnresolvedQubit(format!("{}:{}", self.name, sub)));
        }
        Ok(Subregister { offset: self.offset + sub * self.width, width: self.width })
    }

    pub fn qubits(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.size()
    }
}

/// A contiguous block of qubits storing one little-endian integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Subregister {
    pub offset: usize,
    pub width: usize,
}

impl Subregister {
    pub fn qubit(&self, bit: usize) -> usize {
        debug_assert!(bit < self.width);
        self.offset + bit
    }

    pub fn qubits(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.width
    }

    /// The low `width` bits of this subregister.
    pub fn low(&self, width: usize) -> Subregister {
        debug_assert!(width <= self.width);
        Subregister { offset: self.offset, width }
    }
}

/// Named address of a single qubit.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QubitRef {
    pub register: String,
    pub sub: usize,
    pub bit: usize,
}

impl QubitRef {
    pub fn new(register: impl Into<String>, sub: usize, bit: usize) -> Self {
        QubitRef { register: register.into(), sub, bit }
    }
}

impl fmt::Display for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}.b{}", self.register, self.sub, self.bit)
    }
}

/// Gate fires only on basis states whose `qubit` equals `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub qubit: usize,
    pub value: bool,
}

impl Control {
    pub fn on(qubit: usize) -> Self {
        Control { qubit, value: true }
    }

    pub fn off(qubit: usize) -> Self {
        Control { qubit, value: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    X,
    H,
    Ry(f64),
    Rz(f64),
    Swap,
}

impl Primitive {
    pub fn name(&self) -> &'static str {
        match self {
            Primitive::X => "x",
            Primitive::H => "h",
            Primitive::Ry(_) => "ry",
            Primitive::Rz(_) => "rz",
            Primitive::Swap => "swap",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self {
            Primitive::Ry(a) | Primitive::Rz(a) => Some(*a),
            _ => None,
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Primitive::Swap => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub primitive: Primitive,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(primitive: Primitive, targets: Vec<usize>) -> Self {
        Gate { primitive, targets, controls: Vec::new() }
    }

    pub fn x(target: usize) -> Self {
        Gate::new(Primitive::X, vec![target])
    }

    pub fn h(target: usize) -> Self {
        Gate::new(Primitive::H, vec![target])
    }

    pub fn ry(angle: f64, target: usize) -> Self {
        Gate::new(Primitive::Ry(angle), vec![target])
    }

    pub fn rz(angle: f64, target: usize) -> Self {
        Gate::new(Primitive::Rz(angle), vec![target])
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Gate::new(Primitive::Swap, vec![a, b])
    }

    /// CX with control `control` and target `target`.
    pub fn cx(control: usize, target: usize) -> Self {
        Gate::x(target).controlled_by([Control::on(control)])
    }

    pub fn controlled_by(mut self, controls: impl IntoIterator<Item = Control>) -> Self {
        self.controls.extend(controls);
        self
    }

    /// Every qubit the gate touches, targets first.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.targets.iter().copied().chain(self.controls.iter().map(|c| c.qubit))
    }

    pub fn negative_controls(&self) -> usize {
        self.controls.iter().filter(|c| !c.value).count()
    }

    /// Checks arity, duplicate qubits and the index range.
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.targets.len() != self.primitive.arity() {
            return Err(Error::InvalidGate(format!(
                "{} expects {} target(s), got {}",
                self.primitive.name(),
                self.primitive.arity(),
                self.targets.len()
            )));
        }
        if let Some(angle) = self.primitive.angle() {
            if !angle.is_finite() {
                return Err(Error::InvalidGate(format!("non-finite angle {angle}")));
            }
        }
        let mut seen = Vec::with_capacity(self.targets.len() + self.controls.len());
        for q in self.support() {
            if q >= num_qubits {
                return Err(Error::UnresolvedQubit(format!("q[{q}]")));
            }
            if seen.contains(&q) {
                let what = if self.targets.iter().filter(|&&t| t == q).count() > 1 {
                    "duplicate target"
                } else if self.targets.contains(&q) {
                    "target/control overlap"
                } else {
                    "duplicate control"
                };
                return Err(Error::InvalidGate(format!("{what} on qubit {q}")));
            }
            seen.push(q);
        }
        Ok(())
    }

    /// Counting class, or an error for gates outside the counting alphabet.
    pub fn class(&self) -> Result<GateClass> {
        let k = self.controls.len();
        let class = match (&self.primitive, k) {
            (Primitive::X, 0) => GateClass::X,
            (Primitive::X, 1) => GateClass::Cx,
            (Primitive::X, m) => GateClass::Mcx(m),
            (Primitive::H, 0) => GateClass::H,
            (Primitive::H, 1) => GateClass::Ch,
            (Primitive::Ry(_), 0) => GateClass::Ry,
            (Primitive::Ry(_), 1) => GateClass::Cry,
            (Primitive::Rz(_), 0) => GateClass::Rz,
            (p, k) => {
                let name = if k == 0 { p.name().to_string() } else { format!("c{k}-{}", p.name()) };
                return Err(Error::UncountableGate(name));
            }
        };
        Ok(class)
    }
}

/// Value controls on the low `width` bits of `sub`: bit `b` must equal bit
/// `b` of `value`.
pub fn value_controls(sub: Subregister, value: u64, width: usize) -> Result<Vec<Control>> {
    if width > sub.width || width > 63 || (width < 64 && value >> width != 0) {
        return Err(Error::ControlValueTooLarge { value, width });
    }
    Ok((0..width).map(|b| Control { qubit: sub.qubit(b), value: (value >> b) & 1 == 1 }).collect())
}

/// Free-form provenance attached to a circuit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub encoding: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mcx_mode: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    registers: Vec<Register>,
    gates: Vec<Gate>,
    num_qubits: usize,
    pub metadata: Metadata,
}

impl Circuit {
    pub fn new<R: Into<RegisterSpec>>(registers: impl IntoIterator<Item = R>) -> Result<Self> {
        let mut circuit =
            Circuit { registers: Vec::new(), gates: Vec::new(), num_qubits: 0, metadata: Metadata::default() };
        for spec in registers {
            circuit.add_register(spec)?;
        }
        Ok(circuit)
    }

    /// Appends a register after all existing ones and returns it.
    pub fn add_register(&mut self, spec: impl Into<RegisterSpec>) -> Result<&Register> {
        let spec = spec.into();
        if self.registers.iter().any(|r| r.name == spec.name) {
            return Err(Error::DuplicateRegister(spec.name));
        }
        if spec.width == 0 {
            return Err(Error::EmptyRegister { name: spec.name, what: "width" });
        }
        if spec.count == 0 {
            return Err(Error::EmptyRegister { name: spec.name, what: "count" });
        }
        let offset = self.num_qubits;
        self.num_qubits = spec
            .count
            .checked_mul(spec.width)
            .and_then(|size| size.checked_add(offset))
            .ok_or_else(|| Error::InvalidSpec(format!("register `{}` is too large", spec.name)))?;
        self.registers.push(Register { name: spec.name, count: spec.count, width: spec.width, offset });
        Ok(self.registers.last().unwrap())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn register(&self, name: &str) -> Result<&Register> {
        self.registers.iter().find(|r| r.name == name).ok_or_else(|| Error::UnknownRegister(name.to_string()))
    }

    pub fn has_register(&self, name: &str) -> bool {
        self.registers.iter().any(|r| r.name == name)
    }

    pub fn subregister(&self, name: &str, sub: usize) -> Result<Subregister> {
        self.register(name)?.subregister(sub)
    }

    pub fn qubit(&self, name: &str, sub: usize, bit: usize) -> Result<usize> {
        let s = self.subregister(name, sub)?;
        if bit >= s.width {
            return Err(Error::UnresolvedQubit(format!("{name}:{sub}.b{bit}")));
        }
        Ok(s.qubit(bit))
    }

    pub fn resolve(&self, r: &QubitRef) -> Result<usize> {
        self.qubit(&r.register, r.sub, r.bit)
    }

    /// Named address of global qubit `q`.
    pub fn qubit_ref(&self, q: usize) -> Result<QubitRef> {
        let reg = self
            .registers
            .iter()
            .find(|r| r.qubits().contains(&q))
            .ok_or_else(|| Error::UnresolvedQubit(format!("q[{q}]")))?;
        let local = q - reg.offset;
        Ok(QubitRef::new(reg.name.clone(), local / reg.width, local % reg.width))
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend(&mut self, gates: impl IntoIterator<Item = Gate>) -> Result<()> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Appends `gate` controlled on the low `width` bits of `sub` holding
    /// `value`; zero bits become negative controls.
    pub fn push_value_controlled(&mut self, gate: Gate, sub: Subregister, value: u64, width: usize) -> Result<()> {
        let controls = value_controls(sub, value, width)?;
        self.push(gate.controlled_by(controls))
    }

    /// Named-register form of [`Circuit::push_value_controlled`].
    pub fn emit_value_controlled(
        &mut self,
        gate: Gate,
        register: &str,
        sub: usize,
        value: u64,
        width: usize,
    ) -> Result<()> {
        let s = self.subregister(register, sub)?;
        self.push_value_controlled(gate, s, value, width)
    }

    /// Appends every gate of `fragment`, relabelling its qubit `k` as
    /// `mapping[k]`.
    pub fn extend_mapped(&mut self, fragment: &Circuit, mapping: &[usize]) -> Result<()> {
        if mapping.len() != fragment.num_qubits() {
            return Err(Error::DimensionMismatch { expected: fragment.num_qubits(), actual: mapping.len() });
        }
        for g in fragment.gates() {
            let mapped = Gate {
                primitive: g.primitive,
                targets: g.targets.iter().map(|&t| mapping[t]).collect(),
                controls: g.controls.iter().map(|c| Control { qubit: mapping[c.qubit], value: c.value }).collect(),
            };
            self.push(mapped)?;
        }
        Ok(())
    }

    /// Same register table and metadata, different gate list.
    pub fn with_gates(&self, gates: Vec<Gate>) -> Result<Circuit> {
        let mut out = Circuit { gates: Vec::with_capacity(gates.len()), ..self.clone_registers() };
        out.extend(gates)?;
        Ok(out)
    }

    /// Copy of the register table and metadata with an empty gate list.
    pub fn clone_registers(&self) -> Circuit {
        Circuit {
            registers: self.registers.clone(),
            gates: Vec::new(),
            num_qubits: self.num_qubits,
            metadata: self.metadata.clone(),
        }
    }

    /// Prefix of the gate list, `gates[..end]`.
    pub fn prefix(&self, end: usize) -> Circuit {
        Circuit { gates: self.gates[..end.min(self.gates.len())].to_vec(), ..self.clone_registers() }
    }

    /// Multiset of counting classes.
    pub fn histogram(&self) -> Result<BTreeMap<GateClass, usize>> {
        let mut hist = BTreeMap::new();
        for g in &self.gates {
            *hist.entry(g.class()?).or_insert(0) += 1;
        }
        Ok(hist)
    }

    /// Weighted gate count; every gate must belong to the counting alphabet.
    pub fn count_primitives(&self, profile: &CostProfile) -> Result<u64> {
        self.gates.iter().try_fold(0u64, |acc, g| Ok(acc + profile.cost(g.class()?)?))
    }

    pub fn schedule_asap(&self) -> LayeredCircuit {
        schedule_asap(self)
    }
}

/// Gate indices grouped into layers of pairwise qubit-disjoint gates.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LayeredCircuit {
    pub layers: Vec<Vec<usize>>,
}

impl LayeredCircuit {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }
}

/// Greedy as-soon-as-possible layering in gate-list order: each gate lands
/// in the first layer after the last one touching any of its qubits.
pub fn schedule_asap(circuit: &Circuit) -> LayeredCircuit {
    let mut ready = vec![0usize; circuit.num_qubits()];
    let mut layers: Vec<Vec<usize>> = Vec::new();
    for (idx, gate) in circuit.gates().iter().enumerate() {
        let layer = gate.support().map(|q| ready[q]).max().unwrap_or(0);
        for q in gate.support() {
            ready[q] = layer + 1;
        }
        if layer == layers.len() {
            layers.push(Vec::new());
        }
        layers[layer].push(idx);
    }
    LayeredCircuit { layers }
}

/// Critical-path length when every gate occupies its class cost in cycles.
pub fn weighted_depth(circuit: &Circuit, profile: &CostProfile) -> Result<u64> {
    let mut ready = vec![0u64; circuit.num_qubits()];
    let mut depth = 0;
    for gate in circuit.gates() {
        let start = gate.support().map(|q| ready[q]).max().unwrap_or(0);
        let finish = start + profile.cost(gate.class()?)?;
        for q in gate.support() {
            ready[q] = finish;
        }
        depth = depth.max(finish);
    }
    Ok(depth)
}
