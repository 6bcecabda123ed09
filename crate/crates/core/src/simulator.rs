//! Dense statevector simulation.
//!
//! Basis index bit `g` is global qubit `g`, matching the circuit numbering.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, Gate, Primitive, Register};
use crate::error::{Error, Result};

/// Memory guard: `2^26` amplitudes is 1 GiB of `Complex64`.
pub const MAX_QUBITS: usize = 26;
/// Amplitudes below this magnitude are not reported as branches.
pub const BRANCH_THRESHOLD: f64 = 1e-12;
pub const MAX_BRANCHES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    num_qubits: usize,
}

fn check_cap(num_qubits: usize) -> Result<()> {
    if num_qubits > MAX_QUBITS {
        return Err(Error::SimulationCap { qubits: num_qubits, cap: MAX_QUBITS });
    }
    Ok(())
}

impl StateVector {
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: usize, index: u64) -> Result<Self> {
        check_cap(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index as usize >= dim {
            return Err(Error::DimensionMismatch { expected: num_qubits, actual: 64 - index.leading_zeros() as usize });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector { amps, num_qubits })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidSpec(format!("{} amplitudes is not a power of two", amps.len())));
        }
        let num_qubits = amps.len().trailing_zeros() as usize;
        check_cap(num_qubits)?;
        Ok(StateVector { amps, num_qubits })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    /// `Σ|a|²` with Neumaier compensation.
    pub fn norm_sqr(&self) -> f64 {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for a in &self.amps {
            let v = a.norm_sqr();
            let t = sum + v;
            if sum.abs() >= v.abs() {
                comp += (sum - t) + v;
            } else {
                comp += (v - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        let (cmask, cval) = gate
            .controls
            .iter()
            .fold((0usize, 0usize), |(m, v), c| (m | 1 << c.qubit, v | (c.value as usize) << c.qubit));
        match gate.primitive {
            Primitive::Swap => {
                let (a, b) = (1usize << gate.targets[0], 1usize << gate.targets[1]);
                for i in 0..self.amps.len() {
                    if i & a != 0 && i & b == 0 && i & cmask == cval {
                        self.amps.swap(i, i ^ a ^ b);
                    }
                }
            }
            p => {
                let t = 1usize << gate.targets[0];
                let m = single_qubit_matrix(p);
                for i in 0..self.amps.len() {
                    if i & t == 0 && i & cmask == cval {
                        let (x0, x1) = (self.amps[i], self.amps[i | t]);
                        self.amps[i] = m[0][0] * x0 + m[0][1] * x1;
                        self.amps[i | t] = m[1][0] * x0 + m[1][1] * x1;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) -> Result<()> {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Largest amplitude magnitude over basis states where any of `qubits`
    /// is 1. Zero means the qubits are exactly in `|0…0⟩` and unentangled.
    pub fn leakage(&self, qubits: impl IntoIterator<Item = usize>) -> f64 {
        let mask = qubits.into_iter().fold(0usize, |m, q| m | 1 << q);
        self.amps.iter().enumerate().filter(|(i, _)| i & mask != 0).map(|(_, a)| a.norm()).fold(0.0, f64::max)
    }

    /// Nonzero amplitudes as `(basis index, amplitude)`.
    pub fn support(&self) -> Result<Vec<(usize, Complex64)>> {
        let mut out = Vec::new();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() > BRANCH_THRESHOLD {
                if out.len() == MAX_BRANCHES {
                    return Err(Error::TooManyBranches(MAX_BRANCHES));
                }
                out.push((i, *a));
            }
        }
        Ok(out)
    }

    /// Draws `shots` basis indices with probability `|a|²`.
    pub fn sample_indices(&self, shots: usize, seed: u64) -> BTreeMap<usize, usize> {
        let mut cumulative = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cumulative.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hist = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * acc;
            let idx = cumulative.partition_point(|&c| c <= u).min(self.amps.len() - 1);
            *hist.entry(idx).or_insert(0) += 1;
        }
        hist
    }
}

fn single_qubit_matrix(p: Primitive) -> [[Complex64; 2]; 2] {
    let r = |x: f64| Complex64::new(x, 0.0);
    match p {
        Primitive::X => [[r(0.0), r(1.0)], [r(1.0), r(0.0)]],
        Primitive::H => [[r(FRAC_1_SQRT_2), r(FRAC_1_SQRT_2)], [r(FRAC_1_SQRT_2), r(-FRAC_1_SQRT_2)]],
        Primitive::Ry(theta) => {
            let (s, c) = (theta / 2.0).sin_cos();
            [[r(c), r(-s)], [r(s), r(c)]]
        }
        Primitive::Rz(theta) => {
            [[Complex64::from_polar(1.0, -theta / 2.0), r(0.0)], [r(0.0), Complex64::from_polar(1.0, theta / 2.0)]]
        }
        Primitive::Swap => unreachable!("swap is a two-qubit gate"),
    }
}

/// Starting point of a simulation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum InitialState {
    #[default]
    Zero,
    Basis(u64),
    /// Basis state given as subregister values per named register; registers
    /// not listed start at zero.
    Registers(Vec<(String, Vec<u64>)>),
}

/// Basis index holding the given subregister values.
pub fn basis_index(circuit: &Circuit, values: &[(String, Vec<u64>)]) -> Result<u64> {
    let mut index = 0u64;
    for (name, vals) in values {
        let reg = circuit.register(name)?;
        if vals.len() != reg.count {
            return Err(Error::DimensionMismatch { expected: reg.count, actual: vals.len() });
        }
        for (sub, &v) in vals.iter().enumerate() {
            if reg.width < 64 && v >> reg.width != 0 {
                return Err(Error::ControlValueTooLarge { value: v, width: reg.width });
            }
            index |= v << reg.subregister(sub)?.offset;
        }
    }
    Ok(index)
}

pub fn initial_state(circuit: &Circuit, initial: &InitialState) -> Result<StateVector> {
    let n = circuit.num_qubits();
    match initial {
        InitialState::Zero => StateVector::zero(n),
        InitialState::Basis(idx) => StateVector::basis(n, *idx),
        InitialState::Registers(values) => StateVector::basis(n, basis_index(circuit, values)?),
    }
}

pub fn run(circuit: &Circuit, initial: &InitialState) -> Result<StateVector> {
    let mut state = initial_state(circuit, initial)?;
    state.apply_all(circuit.gates())?;
    Ok(state)
}

/// Runs `circuit` on an existing state of matching dimension.
pub fn run_from(circuit: &Circuit, mut state: StateVector) -> Result<StateVector> {
    if state.num_qubits() != circuit.num_qubits() {
        return Err(Error::DimensionMismatch { expected: circuit.num_qubits(), actual: state.num_qubits() });
    }
    state.apply_all(circuit.gates())?;
    Ok(state)
}

/// Subregister values of `reg` in basis state `index`.
pub fn decode_register(reg: &Register, index: usize) -> Vec<u64> {
    let mask = (1usize << reg.width) - 1;
    (0..reg.count).map(|s| ((index >> (reg.offset + s * reg.width)) & mask) as u64).collect()
}

/// Leakage of the named register out of `|0…0⟩`, and whether it is below
/// `tolerance`.
pub fn register_disentangled(
    circuit: &Circuit,
    state: &StateVector,
    name: &str,
    tolerance: f64,
) -> Result<(bool, f64)> {
    let leak = state.leakage(circuit.register(name)?.qubits());
    Ok((leak < tolerance, leak))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub index: usize,
    pub registers: Vec<(String, Vec<u64>)>,
    pub amplitude: Complex64,
}

impl Branch {
    pub fn values(&self, name: &str) -> Option<&[u64]> {
        self.registers.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }
}

/// Every basis state with `|a| > 1e-12`, decoded into the named registers
/// (all registers when `names` is empty).
pub fn branch_table(circuit: &Circuit, state: &StateVector, names: &[&str]) -> Result<Vec<Branch>> {
    let regs: Vec<&Register> = if names.is_empty() {
        circuit.registers().iter().collect()
    } else {
        names.iter().map(|n| circuit.register(n)).collect::<Result<_>>()?
    };
    Ok(state
        .support()?
        .into_iter()
        .map(|(index, amplitude)| Branch {
            index,
            registers: regs.iter().map(|r| (r.name.clone(), decode_register(r, index))).collect(),
            amplitude,
        })
        .collect())
}

/// Measurement histogram marginalised onto one register.
pub fn sample(
    circuit: &Circuit,
    state: &StateVector,
    shots: usize,
    seed: u64,
    register: &str,
) -> Result<BTreeMap<Vec<u64>, usize>> {
    if shots == 0 {
        return Err(Error::InvalidSpec("shots must be at least 1".into()));
    }
    let reg = circuit.register(register)?;
    let mut hist = BTreeMap::new();
    for (idx, count) in state.sample_indices(shots, seed) {
        *hist.entry(decode_register(reg, idx)).or_insert(0) += count;
    }
    Ok(hist)
}

/// Probability distribution of one register's contents.
pub fn marginal(circuit: &Circuit, state: &StateVector, register: &str) -> Result<BTreeMap<Vec<u64>, f64>> {
    let reg = circuit.register(register)?;
    let mut dist = BTreeMap::new();
    for (i, a) in state.amplitudes().iter().enumerate() {
        let p = a.norm_sqr();
        if p > 0.0 {
            *dist.entry(decode_register(reg, i)).or_insert(0.0) += p;
        }
    }
    Ok(dist)
}

/// `max_k |a_k − e^{iφ} b_k|` for the phase `φ` aligning `b` to `a`.
pub fn max_deviation_up_to_phase(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let inner: Complex64 = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    let phase = if inner.norm() > 0.0 { inner / inner.norm() } else { Complex64::new(1.0, 0.0) };
    a.iter().zip(b).map(|(x, y)| (x - phase * y).norm()).fold(0.0, f64::max)
}
