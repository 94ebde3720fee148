//! Polar encoding and successive-cancellation decoding.
//!
//! Encoding applies `F^{(x)l}` directly in the public index domain. Because
//! `B F B = F` for the bit-reversal permutation `B`, this is the natural
//! order code with both input and output indices bit-reversed, so the SC
//! decoder runs in natural order after permuting its inputs.

mod encode;
mod llr;
mod ml;
mod sc;

pub use encode::{encode, Codeword};
pub use llr::{expand_llrs, LlrVector, LLR_MAX};
pub use ml::{ml_decode, MlDecoder, ML_MAX_K};
pub use sc::{check_node, sc_decode, variable_node, ScDecoder, ScOutput};

use crate::error::{Error, Result};

/// Reverses the low `bits` bits of `j`.
pub fn bit_reverse_index(j: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        j.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Bit-reversal permutation of `0..n` (0-based).
pub fn bit_reverse(n: usize) -> Result<Vec<usize>> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let l = n.trailing_zeros();
    Ok((0..n).map(|j| bit_reverse_index(j, l)).collect())
}

/// In-place `u <- u F^{(x)l}` over GF(2). The length must be a power of two.
pub fn polar_transform_in_place(u: &mut [u8]) {
    let n = u.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in u.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, &b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= b;
            }
        }
        half *= 2;
    }
}

/// `u F^{(x)l}` over GF(2).
pub fn polar_transform(u: &[u8]) -> Result<Vec<u8>> {
    if !u.len().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(u.len()));
    }
    let mut x = u.to_vec();
    polar_transform_in_place(&mut x);
    Ok(x)
}
