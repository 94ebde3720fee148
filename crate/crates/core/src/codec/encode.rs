use super::polar_transform_in_place;
use crate::error::{Error, Result};
use crate::shortening::CodeSpec;

/// A transmitted (shortened) codeword: the `n'` unshortened code bits in
/// ascending position order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    pub bits: Vec<u8>,
}

impl Codeword {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

/// Places `msg` on the information set (ascending), zeros elsewhere,
/// applies the mother transform and drops the shortened positions.
pub fn encode(msg: &[u8], spec: &CodeSpec) -> Result<Codeword> {
    let mut x = vec![0u8; spec.n];
    encode_into(msg, spec, &mut x)?;
    let bits = x
        .iter()
        .zip(spec.shortened())
        .filter(|(_, &s)| !s)
        .map(|(&b, _)| b)
        .collect();
    Ok(Codeword { bits })
}

/// Mother-length encoding into `x`; shortened positions come out zero.
pub(crate) fn encode_into(msg: &[u8], spec: &CodeSpec, x: &mut [u8]) -> Result<()> {
    if msg.len() != spec.k {
        return Err(Error::LengthMismatch {
            expected: spec.k,
            actual: msg.len(),
        });
    }
    x.fill(0);
    for (&pos, &bit) in spec.info_set.iter().zip(msg) {
        x[pos - 1] = bit & 1;
    }
    polar_transform_in_place(x);
    for (i, &s) in spec.shortened().iter().enumerate() {
        assert!(
            !s || x[i] == 0,
            "shortened code bit {} is nonzero; the pattern is not closed under supersets",
            i + 1
        );
    }
    Ok(())
}
