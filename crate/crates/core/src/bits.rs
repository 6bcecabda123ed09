//! Integer helpers shared by builders and formulas.

/// `⌊log₂ i⌋ + 1`, the number of bits needed to store any of `0..=i`.
pub fn bit_width(i: usize) -> usize {
    (usize::BITS - i.leading_zeros()) as usize
}

/// `⌈log₂ n⌉` for `n >= 1`.
pub fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        bit_width(n - 1)
    }
}

pub fn hamming(k: usize) -> usize {
    k.count_ones() as usize
}

/// Positions of the set bits of `k`, least significant first.
pub fn set_bits(k: usize) -> Vec<usize> {
    (0..usize::BITS as usize).filter(|b| (k >> b) & 1 == 1).collect()
}
