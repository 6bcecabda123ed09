//! End-to-end checks of a built circuit against its target state.
//!
//! Shuffles are fed the data inputs `|k mod 2^m⟩` on subregister `d:k`.
//! Every branch of the final state is decoded into a permutation word, the
//! draw record (entangling variants) and the data arrangement, then compared
//! with the classical replay and with the enumerated symmetric group.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::builders::{build_with_checkpoints, decode_draw, BuildSpec};
use crate::circuit::Circuit;
use crate::cost::CostProfile;
use crate::error::{Error, Result};
use crate::permutation::{enumerate_sn, factorial, replay_reversed_fisher_yates, DrawSequence, MAX_ENUMERATE};
use crate::resources::resource_report;
use crate::simulator::{basis_index, initial_state, Branch, StateVector, MAX_QUBITS};
use crate::stats::chi_square_uniform;

pub const DEFAULT_SEED: u64 = 20_250_101;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub tolerance: f64,
    pub significance: f64,
    /// 0 picks `max(10⁴, 20·n!)`.
    pub shots: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { tolerance: 1e-10, significance: 1e-3, shots: 0, seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub metric: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub variant: String,
    pub n: usize,
    pub m: Option<usize>,
    pub encoding: String,
    pub qubits: usize,
    pub seed: u64,
    pub shots: usize,
    pub branches: usize,
    pub checks: Vec<Check>,
    pub overall: bool,
}

impl VerifyReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Data value loaded into `d:k`.
pub fn data_inputs(spec: &BuildSpec) -> Vec<u64> {
    let m = spec.data_width();
    (0..spec.n as u64).map(|k| if m >= 64 { k } else { k % (1u64 << m) }).collect()
}

/// Basis state the verification starts from.
pub fn initial_registers(spec: &BuildSpec) -> Vec<(String, Vec<u64>)> {
    if spec.variant.has_data() {
        vec![("d".to_string(), data_inputs(spec))]
    } else {
        Vec::new()
    }
}

/// Expected state before iteration `i` of a disentangling build: the first
/// `i` subregisters in uniform superposition over `S_i`, the rest untouched,
/// the ancilla at zero.
pub fn checkpoint_state(circuit: &Circuit, spec: &BuildSpec, i: usize) -> Result<StateVector> {
    let inputs = data_inputs(spec);
    let words = enumerate_sn(i)?;
    let amp = Complex64::new(1.0 / (words.len() as f64).sqrt(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << circuit.num_qubits()];
    for w in &words {
        let word: Vec<usize> = (0..spec.n).map(|k| if k < i { w.as_slice()[k] } else { k }).collect();
        let mut values = Vec::new();
        if spec.variant.has_data() {
            values.push(("d".to_string(), word.iter().map(|&v| inputs[v]).collect()));
        }
        if spec.variant.has_permutation() {
            values.push(("p".to_string(), word.iter().map(|&v| v as u64).collect()));
        }
        amps[basis_index(circuit, &values)? as usize] += amp;
    }
    StateVector::from_amplitudes(amps)
}

/// One decoded branch of a final state.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchRecord {
    /// Word in the permutation register, or the replayed word for `C`.
    pub word: Option<Vec<usize>>,
    /// Draw record of the entangling variants; `None` inside if undecodable.
    pub draws: Option<Option<Vec<usize>>>,
    pub data: Option<Vec<u64>>,
    pub amplitude: Complex64,
}

pub fn decode_branch(spec: &BuildSpec, branch: &Branch) -> BranchRecord {
    let n = spec.n;
    let draws = (!spec.variant.is_disentangling()).then(|| {
        (1..n)
            .map(|i| decode_draw(spec.encoding, i, branch.values(&format!("a{i}"))?[0]))
            .collect::<Option<Vec<usize>>>()
    });
    let word = if spec.variant.has_permutation() {
        branch.values("p").map(|p| p.iter().map(|&v| v as usize).collect())
    } else {
        draws
            .clone()
            .flatten()
            .and_then(|d| DrawSequence::new(d).ok())
            .and_then(|d| replay_reversed_fisher_yates(n, &d).ok())
            .map(|w| w.into_inner())
    };
    BranchRecord { word, draws, data: branch.values("d").map(|d| d.to_vec()), amplitude: branch.amplitude }
}

fn check(name: &str, passed: bool, metric: f64, tolerance: f64) -> Check {
    Check { name: name.to_string(), passed, metric, tolerance }
}

fn count_check(name: &str, failures: usize) -> Check {
    check(name, failures == 0, failures as f64, 0.0)
}

/// Builds, simulates and checks `spec`. Refuses specs above the simulation
/// cap with [`Error::SimulationCap`].
pub fn verify(spec: &BuildSpec, options: &VerifyOptions) -> Result<VerifyReport> {
    let qubits: usize = spec.layout().iter().map(|r| r.count * r.width).sum();
    if qubits > MAX_QUBITS {
        return Err(Error::SimulationCap { qubits, cap: MAX_QUBITS });
    }
    if spec.n > MAX_ENUMERATE {
        return Err(Error::TooLarge { n: spec.n, max: MAX_ENUMERATE });
    }
    let tol = options.tolerance;
    let n = spec.n;
    let (circuit, checkpoints) = build_with_checkpoints(spec)?;
    let mut checks = Vec::new();

    let mut state = initial_state(&circuit, &crate::simulator::InitialState::Registers(initial_registers(spec)))?;
    let mut done = 0;
    let mut checkpoint_dev: f64 = 0.0;
    for (idx, &cp) in checkpoints.iter().enumerate() {
        state.apply_all(&circuit.gates()[done..cp])?;
        done = cp;
        if spec.variant.is_disentangling() {
            let expected = checkpoint_state(&circuit, spec, idx + 1)?;
            let dev =
                state.amplitudes().iter().zip(expected.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            checkpoint_dev = checkpoint_dev.max(dev);
        }
    }
    state.apply_all(&circuit.gates()[done..])?;

    let norm_dev = (state.norm_sqr() - 1.0).abs();
    checks.push(check("norm", norm_dev < tol, norm_dev, tol));

    let branches = crate::simulator::branch_table(&circuit, &state, &[])?;
    let n_fact = factorial(n) as usize;
    checks.push(check("branch_count", branches.len() == n_fact, branches.len() as f64, 0.0));

    let target = 1.0 / (n_fact as f64).sqrt();
    let amp_dev = branches.iter().map(|b| (b.amplitude - target).norm()).fold(0.0, f64::max);
    checks.push(check("amplitude_uniformity", amp_dev < tol, amp_dev, tol));

    if spec.variant.is_disentangling() && circuit.has_register("a") {
        let leak = state.leakage(circuit.register("a")?.qubits());
        checks.push(check("ancilla_leakage", leak < tol, leak, tol));
    }
    if spec.variant.is_disentangling() {
        checks.push(check("checkpoints", checkpoint_dev < tol, checkpoint_dev, tol));
    }

    let records: Vec<BranchRecord> = branches.iter().map(|b| decode_branch(spec, b)).collect();
    let all_words: BTreeSet<Vec<usize>> = enumerate_sn(n)?.into_iter().map(|w| w.into_inner()).collect();
    let found: BTreeSet<Vec<usize>> = records.iter().filter_map(|r| r.word.clone()).collect();
    let missing = all_words.symmetric_difference(&found).count();
    let undecoded = records.iter().filter(|r| r.word.is_none()).count();
    checks.push(count_check("word_set", missing + undecoded));

    if !spec.variant.is_disentangling() {
        let bad = records
            .iter()
            .filter(|r| {
                let Some(Some(draws)) = &r.draws else { return true };
                let Ok(seq) = DrawSequence::new(draws.clone()) else { return true };
                let replayed = replay_reversed_fisher_yates(n, &seq).map(|w| w.into_inner()).ok();
                replayed.is_none() || replayed != r.word
            })
            .count();
        checks.push(count_check("replay_consistency", bad));
    }
    if spec.variant.has_data() {
        let inputs = data_inputs(spec);
        let bad = records
            .iter()
            .filter(|r| match (&r.word, &r.data) {
                (Some(w), Some(d)) => w.iter().zip(d).any(|(&k, &v)| inputs.get(k) != Some(&v)),
                _ => true,
            })
            .count();
        checks.push(count_check("data_consistency", bad));
    }

    let unit = CostProfile::unit();
    let report = resource_report(spec, &unit)?;
    checks.push(check(
        "formula_qubits",
        report.qubits_formula == report.qubits_measured || n == 1,
        report.qubits_measured as f64,
        report.qubits_formula as f64,
    ));
    checks.push(check(
        "formula_gates",
        report.gates_formula == report.gates_measured,
        report.gates_measured as f64,
        report.gates_formula as f64,
    ));
    checks.push(check(
        "formula_depth",
        report.depth_measured <= report.cycles_formula,
        report.depth_measured as f64,
        report.cycles_formula as f64,
    ));

    let shots = if options.shots == 0 { (20 * n_fact).max(10_000) } else { options.shots };
    let mut hist: BTreeMap<Vec<usize>, u64> = all_words.iter().map(|w| (w.clone(), 0)).collect();
    let by_index: BTreeMap<usize, Option<Vec<usize>>> =
        branches.iter().zip(&records).map(|(b, r)| (b.index, r.word.clone())).collect();
    let mut stray = 0u64;
    for (idx, count) in state.sample_indices(shots, options.seed) {
        match by_index.get(&idx).cloned().flatten().and_then(|w| hist.get_mut(&w)) {
            Some(slot) => *slot += count as u64,
            None => stray += count as u64,
        }
    }
    let counts: Vec<u64> = hist.values().copied().collect();
    let chi = chi_square_uniform(&counts);
    checks.push(check(
        "sample_uniformity",
        stray == 0 && chi.passes(options.significance),
        chi.p_value,
        options.significance,
    ));

    let overall = checks.iter().all(|c| c.passed);
    Ok(VerifyReport {
        variant: spec.variant.to_string(),
        n,
        m: spec.m,
        encoding: spec.encoding.to_string(),
        qubits: circuit.num_qubits(),
        seed: options.seed,
        shots,
        branches: branches.len(),
        checks,
        overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::Variant;
    use crate::prep::Encoding;

    #[test]
    fn verify_a4_passes() {
        let spec = BuildSpec::binary(Variant::A, 4, None).unwrap();
        let r = verify(&spec, &VerifyOptions::default()).unwrap();
        assert!(r.overall, "{:#?}", r.checks);
        assert_eq!(r.branches, 24);
    }

    #[test]
    fn verify_bt3_passes() {
        let spec = BuildSpec::binary(Variant::BTilde, 3, Some(1)).unwrap();
        let r = verify(&spec, &VerifyOptions::default()).unwrap();
        assert!(r.overall, "{:#?}", r.checks);
        assert_eq!(r.branches, 6);
        assert!(r.check("replay_consistency").unwrap().passed);
    }

    #[test]
    fn verify_refuses_large() {
        let spec = BuildSpec::binary(Variant::A, 12, None).unwrap();
        assert!(matches!(verify(&spec, &VerifyOptions::default()), Err(Error::SimulationCap { qubits: 52, .. })));
    }

    #[test]
    fn verify_every_small_spec() {
        for v in Variant::ALL {
            for enc in [Encoding::Binary, Encoding::OneHot] {
                for n in 1..=3 {
                    let spec = BuildSpec::new(v, n, v.has_data().then_some(1), enc).unwrap();
                    let r = verify(&spec, &VerifyOptions::default()).unwrap();
                    assert!(r.overall, "{v} {enc} n={n}: {:#?}", r.checks);
                }
            }
        }
    }

    #[test]
    fn broken_circuit_is_caught() {
        let spec = BuildSpec::binary(Variant::A, 3, None).unwrap();
        let (c, _) = build_with_checkpoints(&spec).unwrap();
        // dropping the last uncompute gate leaves the ancilla entangled
        let truncated = c.prefix(c.len() - 1);
        let mut state = initial_state(&truncated, &crate::simulator::InitialState::Zero).unwrap();
        state.apply_all(truncated.gates()).unwrap();
        assert!(state.leakage(truncated.register("a").unwrap().qubits()) > 0.1);
    }
}
