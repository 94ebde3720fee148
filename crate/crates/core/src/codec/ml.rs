use super::encode::encode_into;
use super::llr::LlrVector;
use crate::error::{Error, Result};
use crate::shortening::CodeSpec;

/// Largest message length accepted by the exhaustive decoder.
pub const ML_MAX_K: usize = 16;

/// Exhaustive maximum-likelihood decoder over all `2^k` codewords.
///
/// Meant as a reference for small codes.
#[derive(Debug, Clone)]
pub struct MlDecoder {
    k: usize,
    /// Codeword of message `v` in mother positions, flattened.
    codebook: Vec<u8>,
    n: usize,
    keep: Vec<bool>,
}

fn message_of(v: usize, k: usize) -> Vec<u8> {
    (0..k).map(|j| ((v >> (k - 1 - j)) & 1) as u8).collect()
}

impl MlDecoder {
    pub fn new(spec: &CodeSpec) -> Result<Self> {
        if spec.k > ML_MAX_K {
            return Err(Error::TooLarge {
                k: spec.k,
                limit: ML_MAX_K,
            });
        }
        let count = 1usize << spec.k;
        let mut codebook = vec![0u8; count * spec.n];
        for (v, cw) in codebook.chunks_exact_mut(spec.n).enumerate() {
            encode_into(&message_of(v, spec.k), spec, cw)?;
        }
        Ok(Self {
            k: spec.k,
            codebook,
            n: spec.n,
            keep: spec.shortened().iter().map(|&s| !s).collect(),
        })
    }

    /// The message maximizing `sum (1 - 2 c_i) llr_i` over unshortened
    /// positions; ties go to the lexicographically smallest message.
    pub fn decode(&self, llrs: &LlrVector) -> Result<Vec<u8>> {
        if llrs.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: llrs.len(),
            });
        }
        let mut best = 0usize;
        let mut best_metric = f64::NEG_INFINITY;
        for (v, cw) in self.codebook.chunks_exact(self.n).enumerate() {
            let metric: f64 = cw
                .iter()
                .zip(llrs.values())
                .zip(&self.keep)
                .filter(|(_, &k)| k)
                .map(|((&c, &l), _)| if c == 0 { l } else { -l })
                .sum();
            if metric > best_metric {
                best_metric = metric;
                best = v;
            }
        }
        Ok(message_of(best, self.k))
    }
}

pub fn ml_decode(llrs: &LlrVector, spec: &CodeSpec) -> Result<Vec<u8>> {
    MlDecoder::new(spec)?.decode(llrs)
}
