use crate::error::{Error, Result};
use crate::shortening::CodeSpec;

/// Saturation magnitude for LLRs. `tanh(LLR_MAX / 2)` rounds to one in
/// double precision, so a saturated LLR behaves as a certain bit.
pub const LLR_MAX: f64 = 100.0;

/// Saturated LLRs over the mother positions (positive favours bit 0).
#[derive(Debug, Clone, PartialEq)]
pub struct LlrVector {
    values: Vec<f64>,
}

impl LlrVector {
    /// Saturates to `[-LLR_MAX, LLR_MAX]`; NaN is rejected.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        for v in &mut values {
            if v.is_nan() {
                return Err(Error::Domain {
                    name: "llr",
                    value: *v,
                    domain: "not NaN",
                });
            }
            *v = v.clamp(-LLR_MAX, LLR_MAX);
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Places the `n'` channel LLRs at the unshortened positions in ascending
/// order and `+LLR_MAX` at the shortened ones.
pub fn expand_llrs(channel_llrs: &[f64], spec: &CodeSpec) -> Result<LlrVector> {
    if channel_llrs.len() != spec.n_short {
        return Err(Error::LengthMismatch {
            expected: spec.n_short,
            actual: channel_llrs.len(),
        });
    }
    let mut values = Vec::with_capacity(spec.n);
    let mut it = channel_llrs.iter();
    for &short in spec.shortened() {
        if short {
            values.push(LLR_MAX);
        } else {
            values.push(*it.next().expect("length checked"));
        }
    }
    LlrVector::new(values)
}
