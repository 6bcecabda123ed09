//! The five Fisher-Yates circuits.
//!
//! Register layout, in declaration order:
//!
//! * `d`: `n` data subregisters of `m` qubits (shuffles only),
//! * `p`: `n` permutation subregisters of `⌈log₂ n⌉` qubits (all but `C`),
//! * the ancilla: a single register `a` for the disentangling variants, which
//!   is uncomputed and reused every iteration, or one fresh register `a{i}`
//!   per iteration for the entangling ones.
//!
//! Iteration `i` prepares the draw `j ∈ {0, …, i}` in the ancilla and swaps
//! subregisters `j` and `i` on the branch holding `j`. In binary encoding the
//! draw lives in the low `b_i` ancilla bits. In one-hot encoding draw `j < i`
//! is ancilla bit `j` and draw `i` (no swap) is the all-zero string, so every
//! swap carries a single positive control.
//!
//! Controlled SWAPs are emitted already split into CX, controlled X, CX.

use std::fmt;
use std::str::FromStr;

use crate::bits::{bit_width, ceil_log2, set_bits};
use crate::circuit::{value_controls, Circuit, Control, Gate, Metadata, RegisterSpec, Subregister};
use crate::error::{Error, Result};
use crate::mcx::lower_controlled_swap;
use crate::prep::{build_u, build_v, Encoding};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Disentangling state preparation.
    A,
    /// Entangling state preparation.
    ATilde,
    /// Disentangling shuffle.
    B,
    /// Entangling shuffle.
    BTilde,
    /// Entangling light shuffle: data register only.
    C,
}

impl Variant {
    pub const ALL: [Variant; 5] = [Variant::A, Variant::ATilde, Variant::B, Variant::BTilde, Variant::C];

    pub fn is_disentangling(self) -> bool {
        matches!(self, Variant::A | Variant::B)
    }

    pub fn has_data(self) -> bool {
        matches!(self, Variant::B | Variant::BTilde | Variant::C)
    }

    pub fn has_permutation(self) -> bool {
        self != Variant::C
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::A => "A",
            Variant::ATilde => "At",
            Variant::B => "B",
            Variant::BTilde => "Bt",
            Variant::C => "C",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Variant::A),
            "At" | "at" | "A~" | "Ã" => Ok(Variant::ATilde),
            "B" | "b" => Ok(Variant::B),
            "Bt" | "bt" | "B~" => Ok(Variant::BTilde),
            "C" | "c" => Ok(Variant::C),
            other => Err(Error::InvalidSpec(format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildSpec {
    pub variant: Variant,
    pub n: usize,
    /// Data subregister width; `Some` exactly for the shuffles.
    pub m: Option<usize>,
    pub encoding: Encoding,
}

impl BuildSpec {
    pub fn new(variant: Variant, n: usize, m: Option<usize>, encoding: Encoding) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidSpec("n must be at least 1".into()));
        }
        match (variant.has_data(), m) {
            (true, None) => return Err(Error::InvalidSpec(format!("variant {variant} needs m"))),
            (true, Some(0)) => return Err(Error::InvalidSpec("m must be at least 1".into())),
            (false, Some(_)) => return Err(Error::InvalidSpec(format!("variant {variant} takes no m"))),
            _ => {}
        }
        Ok(BuildSpec { variant, n, m, encoding })
    }

    pub fn binary(variant: Variant, n: usize, m: Option<usize>) -> Result<Self> {
        Self::new(variant, n, m, Encoding::Binary)
    }

    pub fn data_width(&self) -> usize {
        self.m.unwrap_or(0)
    }

    /// `⌈log₂ n⌉`, the number of bits in each permutation subregister.
    pub fn perm_bits(&self) -> usize {
        ceil_log2(self.n)
    }

    /// Width of the ancilla used in iteration `i`.
    pub fn ancilla_width(&self, i: usize) -> usize {
        match self.encoding {
            Encoding::Binary => bit_width(i),
            Encoding::OneHot => i,
        }
    }

    /// Name of the register iteration `i` prepares its draw in.
    pub fn ancilla_name(&self, i: usize) -> String {
        if self.variant.is_disentangling() {
            "a".to_string()
        } else {
            format!("a{i}")
        }
    }

    pub fn layout(&self) -> Vec<RegisterSpec> {
        let n = self.n;
        let mut regs = Vec::new();
        if self.variant.has_data() {
            regs.push(RegisterSpec::new("d", n, self.data_width()));
        }
        if self.variant.has_permutation() {
            // n = 1 has nothing to store; keep one idle qubit per subregister
            regs.push(RegisterSpec::new("p", n, self.perm_bits().max(1)));
        }
        if n >= 2 {
            if self.variant.is_disentangling() {
                regs.push(RegisterSpec::new("a", 1, self.ancilla_width(n - 1)));
            } else {
                regs.extend((1..n).map(|i| RegisterSpec::new(self.ancilla_name(i), 1, self.ancilla_width(i))));
            }
        }
        regs
    }

    fn metadata(&self) -> Metadata {
        Metadata {
            variant: Some(self.variant.to_string()),
            n: Some(self.n),
            m: self.m,
            encoding: Some(self.encoding.to_string()),
            mcx_mode: None,
        }
    }
}

/// X gates writing `k` into `p:k` for `k = 1 … n − 1`, assuming `p` starts
/// at zero. All targets are distinct, so they form a single layer.
pub fn init_identity_word(circuit: &mut Circuit, n: usize) -> Result<()> {
    for k in 1..n {
        let sub = circuit.subregister("p", k)?;
        for b in set_bits(k) {
            circuit.push(Gate::x(sub.qubit(b)))?;
        }
    }
    Ok(())
}

/// Controlled exchange of subregisters `reg:j` and `reg:i`, one SWAP per bit.
fn push_controlled_swaps(circuit: &mut Circuit, reg: &str, j: usize, i: usize, controls: &[Control]) -> Result<()> {
    let (lo, hi): (Subregister, Subregister) = (circuit.subregister(reg, j)?, circuit.subregister(reg, i)?);
    for b in 0..lo.width {
        let swap = Gate::swap(lo.qubit(b), hi.qubit(b)).controlled_by(controls.iter().copied());
        circuit.extend(lower_controlled_swap(&swap))?;
    }
    Ok(())
}

/// Builds the circuit and returns it with its iteration checkpoints.
pub fn build_with_checkpoints(spec: &BuildSpec) -> Result<(Circuit, Vec<usize>)> {
    let mut c = Circuit::new(spec.layout())?;
    c.metadata = spec.metadata();
    let n = spec.n;
    let variant = spec.variant;
    if variant.has_permutation() {
        init_identity_word(&mut c, n)?;
    }
    let mut checkpoints = vec![c.len()];

    for i in 1..n {
        let b = bit_width(i);
        let anc = c.subregister(&spec.ancilla_name(i), 0)?;
        let fragment = match spec.encoding {
            Encoding::Binary => build_u(i)?,
            Encoding::OneHot => build_v(i)?,
        };
        let mapping: Vec<usize> = (0..fragment.num_qubits()).map(|q| anc.qubit(q)).collect();
        c.extend_mapped(&fragment, &mapping)?;

        for j in 0..i {
            let controls = match spec.encoding {
                Encoding::Binary => value_controls(anc, j as u64, b)?,
                Encoding::OneHot => vec![Control::on(anc.qubit(j))],
            };
            if variant.has_data() {
                push_controlled_swaps(&mut c, "d", j, i, &controls)?;
            }
            if variant.has_permutation() {
                push_controlled_swaps(&mut c, "p", j, i, &controls)?;
            }
        }

        if variant.is_disentangling() {
            // the branch with draw j is the one where p:j now holds i
            match spec.encoding {
                Encoding::Binary => {
                    for j in 1..=i {
                        let p = c.subregister("p", j)?;
                        for bit in set_bits(j) {
                            c.push_value_controlled(Gate::x(anc.qubit(bit)), p, i as u64, b)?;
                        }
                    }
                }
                Encoding::OneHot => {
                    for j in 0..i {
                        let p = c.subregister("p", j)?;
                        c.push_value_controlled(Gate::x(anc.qubit(j)), p, i as u64, b)?;
                    }
                }
            }
        }
        checkpoints.push(c.len());
    }
    Ok((c, checkpoints))
}

pub fn build(spec: &BuildSpec) -> Result<Circuit> {
    build_with_checkpoints(spec).map(|(c, _)| c)
}

/// Gate index after initialisation and after each of the `n − 1`
/// iterations; `checkpoints[i - 1]` is where iteration `i` starts.
pub fn iteration_checkpoints(spec: &BuildSpec) -> Result<Vec<usize>> {
    build_with_checkpoints(spec).map(|(_, cp)| cp)
}

/// Reads the draw of iteration `i` from the value of its ancilla register
/// (entangling variants).
pub fn decode_draw(encoding: Encoding, i: usize, ancilla: u64) -> Option<usize> {
    match encoding {
        Encoding::Binary => (ancilla as usize <= i).then_some(ancilla as usize),
        Encoding::OneHot => match ancilla {
            0 => Some(i),
            v if v.is_power_of_two() && (v.trailing_zeros() as usize) < i => Some(v.trailing_zeros() as usize),
            _ => None,
        },
    }
}
