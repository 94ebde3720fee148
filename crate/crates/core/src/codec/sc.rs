use super::llr::{LlrVector, LLR_MAX};
use crate::error::{Error, Result};
use crate::shortening::CodeSpec;

/// Check-node combine `2 atanh(tanh(a/2) tanh(b/2))`, evaluated as
///
/// ```text
/// sign(a) sign(b) min(|a|,|b|) + ln(1 + e^-|a+b|) - ln(1 + e^-|a-b|)
/// ```
///
/// which stays exact when both inputs are large.
#[inline]
pub fn check_node(a: f64, b: f64) -> f64 {
    let m = a.abs().min(b.abs());
    let signed = if (a < 0.0) != (b < 0.0) { -m } else { m };
    let v = signed + (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p();
    v.clamp(-LLR_MAX, LLR_MAX)
}

/// Variable-node combine `b + (1 - 2u) a`, saturated.
#[inline]
pub fn variable_node(a: f64, b: f64, u: u8) -> f64 {
    let v = if u & 1 == 1 { b - a } else { b + a };
    v.clamp(-LLR_MAX, LLR_MAX)
}

/// Decoder output: the message and the full input vector in the public
/// domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScOutput {
    pub msg: Vec<u8>,
    pub u: Vec<u8>,
}

/// Successive-cancellation decoder bound to one code, holding its scratch
/// buffers. One instance decodes one frame at a time.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    n: usize,
    /// Bit reversal; maps natural positions to public ones and back.
    perm: Vec<usize>,
    frozen_nat: Vec<bool>,
    /// `rate0[id]` is set when the subtree of heap node `id` is all frozen.
    rate0: Vec<bool>,
    /// Information positions (0-based, public, ascending).
    info: Vec<usize>,
    llr_nat: Vec<f64>,
    scratch: Vec<f64>,
    u_nat: Vec<u8>,
    x_nat: Vec<u8>,
}

impl ScDecoder {
    pub fn new(spec: &CodeSpec) -> Self {
        let n = spec.n;
        let perm = super::bit_reverse(n).expect("mother length is a power of two");
        let frozen_nat: Vec<bool> = perm.iter().map(|&p| spec.frozen()[p]).collect();
        let mut rate0 = vec![false; 2 * n];
        for (j, &f) in frozen_nat.iter().enumerate() {
            rate0[n + j] = f;
        }
        for id in (1..n).rev() {
            rate0[id] = rate0[2 * id] && rate0[2 * id + 1];
        }
        Self {
            n,
            perm,
            frozen_nat,
            rate0,
            info: spec.info_set.iter().map(|&i| i - 1).collect(),
            llr_nat: vec![0.0; n],
            scratch: vec![0.0; n.max(1)],
            u_nat: vec![0; n],
            x_nat: vec![0; n],
        }
    }

    fn load(&mut self, llrs: &LlrVector) -> Result<()> {
        if llrs.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: llrs.len(),
            });
        }
        for (dst, &p) in self.llr_nat.iter_mut().zip(&self.perm) {
            *dst = llrs.values()[p];
        }
        Ok(())
    }

    /// Decodes one frame. Frozen positions are forced to zero; information
    /// decisions take the LLR sign, with an LLR of exactly zero giving 0.
    pub fn decode(&mut self, llrs: &LlrVector) -> Result<ScOutput> {
        self.load(llrs)?;
        let frozen = &self.frozen_nat;
        let mut decide = |j: usize, llr: f64| -> u8 {
            if frozen[j] || llr >= 0.0 {
                0
            } else {
                1
            }
        };
        descend(
            1,
            &self.llr_nat,
            &mut self.scratch,
            Some(&self.rate0),
            0,
            &mut self.u_nat,
            &mut self.x_nat,
            &mut decide,
        );
        let u: Vec<u8> = self.perm.iter().map(|&j| self.u_nat[j]).collect();
        let msg = self.info.iter().map(|&i| u[i]).collect();
        Ok(ScOutput { msg, u })
    }

    /// Genie-aided pass: every decision is replaced by the true input bit
    /// `u_true` (public domain), and the returned flags mark the positions
    /// whose own LLR would have decided wrongly.
    pub fn genie_errors(&mut self, llrs: &LlrVector, u_true: &[u8]) -> Result<Vec<bool>> {
        self.load(llrs)?;
        if u_true.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: u_true.len(),
            });
        }
        let perm = &self.perm;
        let mut wrong_nat = vec![false; self.n];
        let mut decide = |j: usize, llr: f64| -> u8 {
            let truth = u_true[perm[j]];
            let hard = if llr >= 0.0 { 0 } else { 1 };
            wrong_nat[j] = hard != truth;
            truth
        };
        descend(
            1,
            &self.llr_nat,
            &mut self.scratch,
            None,
            0,
            &mut self.u_nat,
            &mut self.x_nat,
            &mut decide,
        );
        Ok(self.perm.iter().map(|&j| wrong_nat[j]).collect())
    }
}

/// One SC node over a natural-order segment starting at `offset`.
///
/// `x` receives the re-encoded partial sums of the subtree.
#[allow(clippy::too_many_arguments)]
fn descend(
    id: usize,
    llr_in: &[f64],
    scratch: &mut [f64],
    rate0: Option<&[bool]>,
    offset: usize,
    u: &mut [u8],
    x: &mut [u8],
    decide: &mut dyn FnMut(usize, f64) -> u8,
) {
    let m = llr_in.len();
    if rate0.is_some_and(|r| r[id]) {
        u.fill(0);
        x.fill(0);
        return;
    }
    if m == 1 {
        let bit = decide(offset, llr_in[0]);
        u[0] = bit;
        x[0] = bit;
        return;
    }
    let h = m / 2;
    let (cur, rest) = scratch.split_at_mut(h);
    let (top, bottom) = llr_in.split_at(h);
    let (u_lo, u_hi) = u.split_at_mut(h);
    let (x_lo, x_hi) = x.split_at_mut(h);

    for ((c, &a), &b) in cur.iter_mut().zip(top).zip(bottom) {
        *c = check_node(a, b);
    }
    descend(2 * id, cur, rest, rate0, offset, u_lo, x_lo, decide);

    for (((c, &a), &b), &s) in cur.iter_mut().zip(top).zip(bottom).zip(x_lo.iter()) {
        *c = variable_node(a, b, s);
    }
    descend(2 * id + 1, cur, rest, rate0, offset + h, u_hi, x_hi, decide);

    for (a, &b) in x_lo.iter_mut().zip(x_hi.iter()) {
        *a ^= b;
    }
}

/// Convenience wrapper that builds a decoder for a single call.
pub fn sc_decode(llrs: &LlrVector, spec: &CodeSpec) -> Result<ScOutput> {
    ScDecoder::new(spec).decode(llrs)
}
