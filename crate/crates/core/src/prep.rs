//! Uniform superpositions over the first `i + 1` draw values.
//!
//! [`build_u`] stores the draw in binary on `⌊log₂ i⌋ + 1` qubits and
//! [`build_v`] stores it one-hot on `i` qubits (the all-zero string is one of
//! the `i + 1` states). Both produce real nonnegative amplitudes.

use std::fmt;
use std::str::FromStr;

use crate::bits::{bit_width, set_bits};
use crate::circuit::{Circuit, Control, Gate};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Encoding {
    Binary,
    OneHot,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Binary => "binary",
            Encoding::OneHot => "onehot",
        })
    }
}

impl FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "binary" => Ok(Encoding::Binary),
            "onehot" | "one-hot" | "one_hot" => Ok(Encoding::OneHot),
            other => Err(Error::InvalidSpec(format!("unknown encoding `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrepSpec {
    pub i: usize,
    pub encoding: Encoding,
    pub width: usize,
}

impl PrepSpec {
    pub fn new(i: usize, encoding: Encoding) -> Result<Self> {
        if i < 1 {
            return Err(Error::InvalidSpec("preparation index must be at least 1".into()));
        }
        let width = match encoding {
            Encoding::Binary => bit_width(i),
            Encoding::OneHot => i,
        };
        Ok(PrepSpec { i, encoding, width })
    }

    pub fn build(&self) -> Result<Circuit> {
        match self.encoding {
            Encoding::Binary => build_u(self.i),
            Encoding::OneHot => build_v(self.i),
        }
    }
}

fn split_angle(p_one: f64) -> f64 {
    2.0 * p_one.sqrt().asin()
}

/// Binary-encoded uniform superposition of `|0⟩ … |i⟩`.
///
/// For `i + 1 = 2^r` this is `r` Hadamards. Otherwise, with `s_0 < … < s_t`
/// the set bits of `i + 1`, the value range splits into blocks of size
/// `2^{s_t}, …, 2^{s_0}` from the bottom. A rotation chain on the set-bit
/// qubits `s_t, …, s_1` (one RY, then CRYs each conditioned on the previous
/// set-bit qubit being 1) selects the block; Hadamards on qubits below
/// `s_0` and zero-controlled Hadamards on `[s_k, s_{k+1})`, conditioned on
/// qubit `s_{k+1}`, fill it. Gates: `s_0` H, 1 RY, `t − 1` CRY and
/// `s_t − s_0` CH.
pub fn build_u(i: usize) -> Result<Circuit> {
    let spec = PrepSpec::new(i, Encoding::Binary)?;
    let mut c = Circuit::new([("u", 1, spec.width)])?;
    let states = i + 1;
    if states.is_power_of_two() {
        for q in 0..spec.width {
            c.push(Gate::h(q))?;
        }
        return Ok(c);
    }

    let s = set_bits(states);
    let top = s.len() - 1;
    let mut remaining = states as f64;
    for k in (1..=top).rev() {
        let block = (1usize << s[k]) as f64;
        let theta = split_angle((remaining - block) / remaining);
        let gate = Gate::ry(theta, s[k]);
        if k == top {
            c.push(gate)?;
        } else {
            c.push(gate.controlled_by([Control::on(s[k + 1])]))?;
        }
        remaining -= block;
    }
    for q in 0..s[0] {
        c.push(Gate::h(q))?;
    }
    for k in 0..top {
        for q in s[k]..s[k + 1] {
            c.push(Gate::h(q).controlled_by([Control::off(s[k + 1])]))?;
        }
    }
    Ok(c)
}

/// One-hot uniform superposition `(|0…0⟩ + Σ_k |e_k⟩)/√(i+1)`.
///
/// An RY on qubit `i − 1` leaves `1/√(i+1)` on the all-zero string and
/// moves the rest into a single excitation, which a cascade of CRY + CX pairs
/// walks down to qubit 0, dropping `1/√(i+1)` on each position. Uses
/// `2i − 1` gates of control arity at most one and has depth `2i − 1`.
pub fn build_v(i: usize) -> Result<Circuit> {
    let spec = PrepSpec::new(i, Encoding::OneHot)?;
    let mut c = Circuit::new([("v", 1, spec.width)])?;
    let total = (i + 1) as f64;
    c.push(Gate::ry(2.0 * (1.0 / total.sqrt()).acos(), i - 1))?;
    for k in (1..i).rev() {
        // excitation at k carries weight (k+1)/(i+1); keep 1/(i+1) there
        let keep = 1.0 / (k + 1) as f64;
        c.push(Gate::ry(2.0 * keep.sqrt().acos(), k - 1).controlled_by([Control::on(k)]))?;
        c.push(Gate::cx(k - 1, k))?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::GateClass;
    use crate::simulator::{run, InitialState};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn probabilities(c: &Circuit) -> Vec<f64> {
        run(c, &InitialState::Zero).unwrap().amplitudes().iter().map(|a| a.re).collect()
    }

    #[test]
    fn u_small_cases() {
        let u1 = build_u(1).unwrap();
        assert_eq!(u1.gates(), &[Gate::h(0)]);
        let a = probabilities(&u1);
        assert!((a[0] - FRAC_1_SQRT_2).abs() < 1e-12 && (a[1] - FRAC_1_SQRT_2).abs() < 1e-12);

        let u3 = build_u(3).unwrap();
        assert_eq!(u3.histogram().unwrap(), [(GateClass::H, 2)].into_iter().collect());
        assert!(probabilities(&u3).iter().all(|a| (a - 0.5).abs() < 1e-12));

        let u4 = build_u(4).unwrap();
        assert_eq!(u4.num_qubits(), 3);
        let amps = probabilities(&u4);
        for (j, a) in amps.iter().enumerate() {
            let want = if j <= 4 { 1.0 / 5f64.sqrt() } else { 0.0 };
            assert!((a - want).abs() < 1e-12, "j={j} a={a}");
        }
        let hist = u4.histogram().unwrap();
        assert_eq!(hist, [(GateClass::Ry, 1), (GateClass::Ch, 2)].into_iter().collect());
    }

    #[test]
    fn u_with_three_set_bits() {
        // i + 1 = 14 = 0b1110: s = (1, 2, 3)
        let u = build_u(13).unwrap();
        let hist = u.histogram().unwrap();
        assert_eq!(
            hist,
            [(GateClass::H, 1), (GateClass::Ry, 1), (GateClass::Cry, 1), (GateClass::Ch, 2)].into_iter().collect()
        );
        for (j, a) in probabilities(&u).iter().enumerate() {
            let want = if j <= 13 { 1.0 / 14f64.sqrt() } else { 0.0 };
            assert!((a - want).abs() < 1e-12);
        }
    }

    #[test]
    fn v_small_cases() {
        let v1 = build_v(1).unwrap();
        assert_eq!(v1.len(), 1);
        let a = probabilities(&v1);
        assert!((a[0] - FRAC_1_SQRT_2).abs() < 1e-12 && (a[1] - FRAC_1_SQRT_2).abs() < 1e-12);

        let a = probabilities(&build_v(2).unwrap());
        let third = 1.0 / 3f64.sqrt();
        assert!((a[0b00] - third).abs() < 1e-12);
        assert!((a[0b01] - third).abs() < 1e-12);
        assert!((a[0b10] - third).abs() < 1e-12);
        assert!(a[0b11].abs() < 1e-12);
    }

    #[test]
    fn rejects_zero() {
        assert!(build_u(0).is_err());
        assert!(build_v(0).is_err());
        assert!("ternary".parse::<Encoding>().is_err());
        assert_eq!("one-hot".parse::<Encoding>().unwrap(), Encoding::OneHot);
    }
}
