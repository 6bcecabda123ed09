//! Acceptance criteria. Each test writes one `PASS`/`FAIL` line straight to
//! stderr (bypassing the harness capture) and then asserts.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Write;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qfy::bits::ceil_log2;
use qfy::builders::{build, build_with_checkpoints, BuildSpec, Variant};
use qfy::circuit::{Control, Gate};
use qfy::cost::CostProfile;
use qfy::mcx::{lower_circuit, lower_mcx, lower_toffoli, LoweringLevel, McxMode};
use qfy::permutation::{
    enumerate_sn, extend_all, factorial, replay_reversed_fisher_yates, sample_fisher_yates, Direction, DrawSequence,
    PermutationWord,
};
use qfy::prep::{build_u, Encoding};
use qfy::resources::{
    cycle_count_formula, gate_count_formula, measure_circuit, qubit_count_formula, u_cycle_count_formula,
    u_gate_count_formula,
};
use qfy::simulator::{branch_table, marginal, max_deviation_up_to_phase, run, sample, InitialState, StateVector};
use qfy::stats::chi_square_two_sample;
use qfy::verify::{checkpoint_state, data_inputs, decode_branch, initial_registers};

const AMP_TOL: f64 = 1e-10;
const MATRIX_TOL: f64 = 1e-12;
const SIGNIFICANCE: f64 = 1e-3;

fn report(id: u32, title: &str, passed: bool, detail: &str) {
    let line = format!("acceptance criterion {id:>2} [{}] {title}: {detail}\n", if passed { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn finish(id: u32, title: &str, failures: &[String], detail: &str) {
    let passed = failures.is_empty();
    let detail = if passed { detail.to_string() } else { format!("{detail}; first failure: {}", failures[0]) };
    report(id, title, passed, &detail);
    assert!(passed, "criterion {id} failed: {failures:#?}");
}

fn words_of(n: usize) -> BTreeSet<Vec<usize>> {
    enumerate_sn(n).unwrap().into_iter().map(PermutationWord::into_inner).collect()
}

#[test]
fn criterion_01_state_preparation() {
    let start = Instant::now();
    let mut failures = Vec::new();
    for n in 2..=5 {
        let c = build(&BuildSpec::binary(Variant::A, n, None).unwrap()).unwrap();
        let state = run(&c, &InitialState::Zero).unwrap();
        let branches = branch_table(&c, &state, &["p"]).unwrap();
        let n_fact = factorial(n) as usize;
        if branches.len() != n_fact {
            failures.push(format!("n={n}: {} branches", branches.len()));
        }
        let target = 1.0 / (n_fact as f64).sqrt();
        let dev = branches.iter().map(|b| (b.amplitude - target).norm()).fold(0.0, f64::max);
        if dev >= AMP_TOL {
            failures.push(format!("n={n}: amplitude deviation {dev:e}"));
        }
        let leak = state.leakage(c.register("a").unwrap().qubits());
        if leak >= AMP_TOL {
            failures.push(format!("n={n}: ancilla leakage {leak:e}"));
        }
        let found: BTreeSet<Vec<usize>> =
            branches.iter().map(|b| b.values("p").unwrap().iter().map(|&v| v as usize).collect()).collect();
        if found != words_of(n) {
            failures.push(format!("n={n}: word set differs from S_n"));
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(10) {
        failures.push(format!("runtime {elapsed:?} >= 10 s"));
    }
    finish(1, "disentangling state preparation, n = 2..5", &failures, &format!("{elapsed:.2?}"));
}

#[test]
fn criterion_02_entangling_variants_replay() {
    let mut failures = Vec::new();
    let mut cases = 0;
    for n in 2..=4 {
        let mut specs = vec![BuildSpec::binary(Variant::ATilde, n, None).unwrap()];
        for m in 1..=2 {
            specs.push(BuildSpec::binary(Variant::BTilde, n, Some(m)).unwrap());
            specs.push(BuildSpec::binary(Variant::C, n, Some(m)).unwrap());
        }
        for spec in specs {
            cases += 1;
            let c = build(&spec).unwrap();
            let inputs = data_inputs(&spec);
            let state = run(&c, &InitialState::Registers(initial_registers(&spec))).unwrap();
            let branches = branch_table(&c, &state, &[]).unwrap();
            let target = 1.0 / (factorial(n) as f64).sqrt();
            let tag = format!("{} n={n} m={:?}", spec.variant, spec.m);
            if branches.len() != factorial(n) as usize {
                failures.push(format!("{tag}: {} branches", branches.len()));
            }
            let mut draw_records = HashSet::new();
            for b in &branches {
                if (b.amplitude - target).norm() >= AMP_TOL {
                    failures.push(format!("{tag}: amplitude {}", b.amplitude));
                }
                let rec = decode_branch(&spec, b);
                let Some(Some(draws)) = rec.draws.clone() else {
                    failures.push(format!("{tag}: undecodable draws"));
                    continue;
                };
                draw_records.insert(draws.clone());
                let replayed =
                    replay_reversed_fisher_yates(n, &DrawSequence::new(draws).unwrap()).unwrap().into_inner();
                match spec.variant {
                    Variant::C => {
                        // the data register is the only place the permutation lives
                        let data = rec.data.unwrap();
                        if data.iter().enumerate().any(|(k, &v)| v != inputs[replayed[k]]) {
                            failures.push(format!("{tag}: data {data:?} vs replay {replayed:?}"));
                        }
                        if spec.data_width() >= ceil_log2(n) {
                            let read: Vec<usize> = data.iter().map(|&v| v as usize).collect();
                            if read != replayed {
                                failures.push(format!("{tag}: word read from data {read:?}"));
                            }
                        }
                    }
                    _ => {
                        if rec.word.as_ref() != Some(&replayed) {
                            failures.push(format!("{tag}: word {:?} vs replay {replayed:?}", rec.word));
                        }
                    }
                }
            }
            if draw_records.len() != factorial(n) as usize {
                failures.push(format!("{tag}: {} distinct draw records", draw_records.len()));
            }
        }
    }
    finish(2, "entangling variants match the classical replay", &failures, &format!("{cases} circuits"));
}

#[test]
fn criterion_03_disentangling_shuffle() {
    let mut failures = Vec::new();
    let mut runs = 0;
    for n in 2..=4 {
        let m = ceil_log2(n);
        let spec = BuildSpec::binary(Variant::B, n, Some(m)).unwrap();
        let (c, checkpoints) = build_with_checkpoints(&spec).unwrap();
        let mask = (1u64 << m) - 1;
        let identity: Vec<u64> = (0..n as u64).collect();
        let reversed: Vec<u64> = identity.iter().rev().copied().collect();
        let repeated: Vec<u64> = (0..n as u64).map(|k| (k * 3 + 1) & mask).collect();
        for inputs in [identity, reversed, repeated] {
            runs += 1;
            let tag = format!("n={n} inputs={inputs:?}");
            let init = InitialState::Registers(vec![("d".into(), inputs.clone())]);
            let state = run(&c, &init).unwrap();
            let leak = state.leakage(c.register("a").unwrap().qubits());
            if leak >= AMP_TOL {
                failures.push(format!("{tag}: ancilla leakage {leak:e}"));
            }
            let branches = branch_table(&c, &state, &["d", "p"]).unwrap();
            let mut words = BTreeSet::new();
            for b in &branches {
                let word: Vec<usize> = b.values("p").unwrap().iter().map(|&v| v as usize).collect();
                let data = b.values("d").unwrap();
                if data.iter().enumerate().any(|(k, &v)| v != inputs[word[k]]) {
                    failures.push(format!("{tag}: data {data:?} with word {word:?}"));
                }
                words.insert(word);
            }
            if words != words_of(n) {
                failures.push(format!("{tag}: word set differs from S_n"));
            }
        }

        // the invariant before each iteration, on the identity inputs
        let mut state = qfy::simulator::initial_state(&c, &InitialState::Registers(initial_registers(&spec))).unwrap();
        let mut done = 0;
        for (idx, &cp) in checkpoints.iter().enumerate() {
            state.apply_all(&c.gates()[done..cp]).unwrap();
            done = cp;
            let expected = checkpoint_state(&c, &spec, idx + 1).unwrap();
            let dev =
                state.amplitudes().iter().zip(expected.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            if dev >= AMP_TOL {
                failures.push(format!("n={n}: checkpoint {} deviates by {dev:e}", idx + 1));
            }
        }
    }
    finish(3, "disentangling shuffle and per-iteration invariant", &failures, &format!("{runs} input sets"));
}

#[test]
fn criterion_04_formula_equality() {
    let start = Instant::now();
    let unit = CostProfile::unit();
    let mut failures = Vec::new();
    let mut cases = 0;
    for variant in Variant::ALL {
        for n in 2..=8 {
            let ms: Vec<Option<usize>> = if variant.has_data() { vec![Some(1), Some(2)] } else { vec![None] };
            for m in ms {
                cases += 1;
                let spec = BuildSpec::binary(variant, n, m).unwrap();
                let c = build(&spec).unwrap();
                let measured = measure_circuit(&c, &unit).unwrap();
                let depth = c.schedule_asap().depth() as u64;
                let gates = gate_count_formula(&spec, &unit).unwrap();
                let cycles = cycle_count_formula(&spec, &unit).unwrap();
                let qubits = qubit_count_formula(variant, n, spec.data_width(), Encoding::Binary);
                let tag = format!("{variant} n={n} m={m:?}");
                if gates != measured.gates {
                    failures.push(format!("{tag}: gates formula {gates} measured {}", measured.gates));
                }
                if qubits != c.num_qubits() as u64 {
                    failures.push(format!("{tag}: qubits formula {qubits} measured {}", c.num_qubits()));
                }
                if depth > cycles {
                    failures.push(format!("{tag}: depth {depth} exceeds cycle bound {cycles}"));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(5) {
        failures.push(format!("runtime {elapsed:?} >= 5 s"));
    }
    finish(4, "closed-form counts equal the built circuits", &failures, &format!("{cases} specs in {elapsed:.2?}"));
}

#[test]
fn criterion_05_uniform_preparation() {
    let unit = CostProfile::unit();
    let mut failures = Vec::new();
    for i in 1..=64 {
        let c = build_u(i).unwrap();
        let measured = c.count_primitives(&unit).unwrap();
        let formula = u_gate_count_formula(i, &unit).unwrap();
        if measured != formula {
            failures.push(format!("i={i}: formula {formula} measured {measured}"));
        }
        if (i + 1).is_power_of_two() {
            let r = (i + 1).trailing_zeros() as usize;
            let all_h = c.gates().iter().all(|g| g.primitive == qfy::Primitive::H && g.controls.is_empty());
            if c.len() != r || !all_h || c.schedule_asap().depth() != 1 {
                failures.push(format!("i={i}: expected {r} parallel H gates"));
            }
            if u_cycle_count_formula(i, &unit).unwrap() != 1 {
                failures.push(format!("i={i}: cycle formula is not one H layer"));
            }
        }
        if i <= 31 {
            let state = run(&c, &InitialState::Zero).unwrap();
            let target = 1.0 / ((i + 1) as f64).sqrt();
            for (j, a) in state.amplitudes().iter().enumerate() {
                let want = if j <= i { target } else { 0.0 };
                if (a - Complex64::new(want, 0.0)).norm() >= AMP_TOL {
                    failures.push(format!("i={i}: amplitude {a} at {j}"));
                    break;
                }
            }
        }
    }
    finish(5, "binary uniform preparation counts and amplitudes", &failures, "i = 1..64");
}

fn basis_out(gates: &[Gate], qubits: usize, input: u64) -> StateVector {
    let mut s = StateVector::basis(qubits, input).unwrap();
    s.apply_all(gates).unwrap();
    s
}

#[test]
fn criterion_06_toffoli_and_mcx() {
    let mut failures = Vec::new();

    let toffoli = Gate::x(2).controlled_by([Control::on(0), Control::on(1)]);
    let lowered = lower_toffoli(&toffoli).unwrap();
    let mut exact = Vec::new();
    let mut approx = Vec::new();
    for input in 0..8 {
        exact.extend_from_slice(basis_out(std::slice::from_ref(&toffoli), 3, input).amplitudes());
        approx.extend_from_slice(basis_out(&lowered, 3, input).amplitudes());
    }
    // a single phase for the whole 8×8 matrix
    let dev = max_deviation_up_to_phase(&exact, &approx);
    if dev >= MATRIX_TOL {
        failures.push(format!("Toffoli deviation {dev:e}"));
    }
    let cx = lowered.iter().filter(|g| g.controls.len() == 1).count();
    if cx != 6 || lowered.len() != 15 {
        failures.push(format!("Toffoli uses {cx} CX of {} gates", lowered.len()));
    }

    for m in 3..=6usize {
        // controls 0..m, target m, borrowed/work qubits after it
        let gate = Gate::x(m).controlled_by((0..m).map(Control::on));
        let spare: Vec<usize> = (m + 1..2 * m).collect();
        let borrowed = lower_mcx(&gate, McxMode::Borrowed, &spare).unwrap();
        let clean = lower_mcx(&gate, McxMode::Clean, &spare).unwrap();
        let toffolis = |gs: &[Gate]| gs.iter().filter(|g| g.controls.len() == 2).count();
        if toffolis(&borrowed) != 4 * (m - 2) || borrowed.len() != 4 * (m - 2) {
            failures.push(format!("m={m}: borrowed uses {} gates", borrowed.len()));
        }
        if toffolis(&clean) != 2 * (m - 1) {
            failures.push(format!("m={m}: clean uses {} Toffolis", toffolis(&clean)));
        }
        let qubits = 2 * m;
        let controls_mask = (1u64 << m) - 1;
        for input in 0..(1u64 << qubits) {
            let want = if input & controls_mask == controls_mask { input ^ (1 << m) } else { input };
            let out = basis_out(&borrowed, qubits, input);
            if (out.amplitude(want as usize).norm() - 1.0).abs() >= MATRIX_TOL {
                failures.push(format!("m={m}: borrowed ladder maps {input:b} wrongly"));
                break;
            }
            let work_clear = input >> (m + 1) == 0;
            if work_clear {
                let out = basis_out(&clean, qubits, input);
                if (out.amplitude(want as usize).norm() - 1.0).abs() >= MATRIX_TOL {
                    failures.push(format!("m={m}: clean ladder maps {input:b} wrongly"));
                    break;
                }
            }
        }
    }
    finish(6, "Toffoli and multi-controlled X synthesis", &failures, "m = 3..6 exhaustive");
}

#[test]
fn criterion_07_recursive_enumeration() {
    let mut failures = Vec::new();
    let mut words = vec![PermutationWord::identity(1)];
    for n in 2..=6 {
        words = extend_all(&words).unwrap();
        let set: BTreeSet<Vec<usize>> = words.iter().map(|w| w.as_slice().to_vec()).collect();
        if set.len() != words.len() {
            failures.push(format!("n={n}: duplicates"));
        }
        if set != words_of(n) {
            failures.push(format!("n={n}: differs from direct enumeration"));
        }
    }
    finish(7, "recursive generation of S_n", &failures, &format!("{} words at n = 6", words.len()));
}

#[test]
fn criterion_08_distribution_agreement() {
    const SHOTS: usize = 100_000;
    const QUANTUM_SEED: u64 = 0x0A4;
    const CLASSICAL_SEED: u64 = 0xF15E;
    let c = build(&BuildSpec::binary(Variant::A, 4, None).unwrap()).unwrap();
    let state = run(&c, &InitialState::Zero).unwrap();
    let quantum = sample(&c, &state, SHOTS, QUANTUM_SEED, "p").unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(CLASSICAL_SEED);
    let mut classical: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    for _ in 0..SHOTS {
        let w = sample_fisher_yates(4, Direction::Reversed, &mut rng);
        *classical.entry(w.as_slice().iter().map(|&v| v as u64).collect()).or_default() += 1;
    }
    let bins: BTreeSet<Vec<u64>> = quantum.keys().chain(classical.keys()).cloned().collect();
    let a: Vec<u64> = bins.iter().map(|b| quantum.get(b).copied().unwrap_or(0) as u64).collect();
    let b: Vec<u64> = bins.iter().map(|k| classical.get(k).copied().unwrap_or(0)).collect();
    let t = chi_square_two_sample(&a, &b);
    let mut failures = Vec::new();
    if bins.len() != 24 {
        failures.push(format!("{} distinct words", bins.len()));
    }
    if !t.passes(SIGNIFICANCE) {
        failures.push(format!("p = {:.3e}", t.p_value));
    }
    finish(
        8,
        "quantum samples match the classical shuffle",
        &failures,
        &format!("chi2 = {:.2}, dof = {}, p = {:.3}", t.statistic, t.dof, t.p_value),
    );
}

#[test]
fn criterion_09_one_hot_parity() {
    let mut failures = Vec::new();
    let mut cases = 0;
    for variant in Variant::ALL {
        for n in 2..=4 {
            let ms: Vec<Option<usize>> = if variant.has_data() { vec![Some(1), Some(2)] } else { vec![None] };
            for m in ms {
                cases += 1;
                let tag = format!("{variant} n={n} m={m:?}");
                let bin = BuildSpec::new(variant, n, m, Encoding::Binary).unwrap();
                let oh = BuildSpec::new(variant, n, m, Encoding::OneHot).unwrap();
                let register = if variant.has_permutation() { "p" } else { "d" };
                let dist = |spec: &BuildSpec| {
                    let c = build(spec).unwrap();
                    let s = run(&c, &InitialState::Registers(initial_registers(spec))).unwrap();
                    (c.num_qubits(), marginal(&c, &s, register).unwrap())
                };
                let (_, d_bin) = dist(&bin);
                let (q_oh, d_oh) = dist(&oh);
                let keys: BTreeSet<&Vec<u64>> = d_bin.keys().chain(d_oh.keys()).collect();
                let dev = keys
                    .iter()
                    .map(|k| (d_bin.get(*k).unwrap_or(&0.0) - d_oh.get(*k).unwrap_or(&0.0)).abs())
                    .fold(0.0, f64::max);
                if dev >= AMP_TOL {
                    failures.push(format!("{tag}: marginals differ by {dev:e}"));
                }
                let ancilla = if variant.is_disentangling() { n - 1 } else { n * (n - 1) / 2 };
                let perm = if variant.has_permutation() { n * ceil_log2(n) } else { 0 };
                let expected = perm + ancilla + n * m.unwrap_or(0);
                let formula = qubit_count_formula(variant, n, m.unwrap_or(0), Encoding::OneHot) as usize;
                if q_oh != expected || formula != expected {
                    failures.push(format!("{tag}: one-hot qubits {q_oh}, formula {formula}, expected {expected}"));
                }
            }
        }
    }
    finish(9, "one-hot and binary encodings agree", &failures, &format!("{cases} specs"));
}

fn padded(state: &StateVector, len: usize) -> Vec<Complex64> {
    let mut v = state.amplitudes().to_vec();
    v.resize(len, Complex64::new(0.0, 0.0));
    v
}

#[test]
fn criterion_10_lowering_equivalence() {
    let mut failures = Vec::new();
    let mut circuits = 0;
    let mut worst: f64 = 0.0;
    for variant in Variant::ALL {
        for encoding in [Encoding::Binary, Encoding::OneHot] {
            for n in 1..=6 {
                let ms: Vec<Option<usize>> =
                    if variant.has_data() { vec![Some(1), Some(2), Some(3)] } else { vec![None] };
                for m in ms {
                    let spec = BuildSpec::new(variant, n, m, encoding).unwrap();
                    let c = build(&spec).unwrap();
                    if c.num_qubits() > 12 {
                        continue;
                    }
                    circuits += 1;
                    let tag = format!("{variant} {encoding} n={n} m={m:?}");
                    let init = InitialState::Registers(initial_registers(&spec));
                    let reference = run(&c, &init).unwrap();
                    for mode in [McxMode::Borrowed, McxMode::Clean] {
                        let lowered = match lower_circuit(&c, LoweringLevel::Full, mode) {
                            Ok(l) => l,
                            Err(e) => {
                                failures.push(format!("{tag} {mode}: {e}"));
                                continue;
                            }
                        };
                        if lowered.gates().iter().any(|g| g.controls.len() > 1 || g.negative_controls() > 0) {
                            failures.push(format!("{tag} {mode}: not fully lowered"));
                        }
                        // extra work qubits sit above the original ones and start at zero
                        let index = qfy::simulator::basis_index(&c, &initial_registers(&spec)).unwrap();
                        let out = run(&lowered, &InitialState::Basis(index)).unwrap();
                        let dev =
                            max_deviation_up_to_phase(&padded(&reference, out.amplitudes().len()), out.amplitudes());
                        worst = worst.max(dev);
                        if dev >= AMP_TOL {
                            failures.push(format!("{tag} {mode}: deviation {dev:e}"));
                        }
                    }
                }
            }
        }
    }
    finish(
        10,
        "full lowering preserves every builder circuit up to 12 qubits",
        &failures,
        &format!("{circuits} circuits, worst deviation {worst:.1e}"),
    );
}
