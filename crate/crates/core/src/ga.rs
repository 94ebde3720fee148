//! Gaussian-approximation construction of polar bit-channel reliabilities.
//!
//! The recursion tracks the mean of the (assumed Gaussian) LLR of each
//! synthetic channel. Channels are reported in the *public* index domain,
//! which is the bit-reversal of the recursion order: channel `i` (1-based)
//! of the public domain is recursion node `bitrev(i - 1)`. In that domain
//! the polarization step applied first to the physical channel sits in the
//! least significant bit of `i - 1`.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::codec::bit_reverse;
use crate::error::{Error, Result};

/// Offset inside the exponent of the low-mean branch of phi.
const PHI_OFFSET: f64 = 0.0218;
const PHI_SCALE: f64 = 0.4527;
const PHI_EXPONENT: f64 = 0.86;
/// Boundary between the two branches of phi.
const PHI_KNEE: f64 = 10.0;

/// Relative distance from [`phi_fixed_point`] below which an odd child is
/// taken to have reached it.
const FIXED_POINT_SNAP: f64 = 1e-9;

/// Default absolute tolerance of the phi inversion.
pub const DEFAULT_INVERSION_TOLERANCE: f64 = 1e-12;

/// Largest supported number of polarization stages.
pub const MAX_STAGES: u32 = 20;

fn ln_phi_low(x: f64) -> f64 {
    -PHI_SCALE * x.powf(PHI_EXPONENT) + PHI_OFFSET
}

fn ln_phi_high(x: f64) -> f64 {
    0.5 * (std::f64::consts::PI / x).ln() + (1.0 - 10.0 / (7.0 * x)).ln() - x / 4.0
}

/// Natural log of [`phi`], usable far beyond the range where `phi`
/// itself underflows.
pub fn ln_phi(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain {
            name: "x",
            value: x,
            domain: "[0, inf)",
        });
    }
    Ok(if x <= PHI_KNEE {
        ln_phi_low(x)
    } else {
        ln_phi_high(x)
    })
}

/// The GA transfer function
///
/// ```text
/// phi(x) = exp(-0.4527 x^0.86 + 0.0218)                 0 <= x <= 10
///        = sqrt(pi/x) (1 - 10/(7x)) exp(-x/4)            x > 10
/// ```
///
/// `phi(0)` is the limit of the first branch, `exp(0.0218)`. The two
/// branches do not meet at `x = 10`; the jump is left in place.
pub fn phi(x: f64) -> Result<f64> {
    ln_phi(x).map(f64::exp)
}

/// Bisection for `target` on a strictly decreasing `f` over `[lo, hi]`,
/// run until the bracket stops shrinking in floating point.
fn bisect_decreasing(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Pick the bracket end with the smaller residual.
    if (f(lo) - target).abs() <= (f(hi) - target).abs() {
        lo
    } else {
        hi
    }
}

/// Inverse of phi given `ln y`.
///
/// Each branch of phi is strictly decreasing. When `y` lies in the range
/// of the low branch (`y >= phi(10)`), the low-branch preimage is returned;
/// otherwise the preimage on the high branch. Working in the log domain
/// keeps the recursion exact for means far above the point where `phi`
/// underflows.
pub fn phi_inv_ln(ln_y: f64) -> Result<f64> {
    if ln_y.is_nan() || ln_y > PHI_OFFSET || ln_y == f64::NEG_INFINITY {
        return Err(Error::Domain {
            name: "ln y",
            value: ln_y,
            domain: "(-inf, 0.0218]",
        });
    }
    if ln_y == PHI_OFFSET {
        return Ok(0.0);
    }
    let knee = ln_phi_low(PHI_KNEE);
    if ln_y >= knee {
        return Ok(bisect_decreasing(ln_phi_low, ln_y, 0.0, PHI_KNEE));
    }
    let mut hi = 2.0 * PHI_KNEE;
    while ln_phi_high(hi) > ln_y {
        hi *= 2.0;
    }
    Ok(bisect_decreasing(ln_phi_high, ln_y, PHI_KNEE, hi))
}

/// Inverse of [`phi`] for `y` in `(0, phi(0)]`.
pub fn phi_inv(y: f64) -> Result<f64> {
    let top = PHI_OFFSET.exp();
    if !(y > 0.0 && y <= top) {
        return Err(Error::Domain {
            name: "y",
            value: y,
            domain: "(0, phi(0)]",
        });
    }
    phi_inv_ln(y.ln().min(PHI_OFFSET))
}

/// The mean where `phi` equals one.
///
/// `phi(0) > 1`, so odd children never fall below this value: repeated odd
/// steps converge to it instead of to zero.
pub fn phi_fixed_point() -> f64 {
    (PHI_OFFSET / PHI_SCALE).powf(PHI_EXPONENT.recip())
}

/// Mean of the worse (odd, check-node) child of a channel with LLR mean `m`:
/// `phi^-1(1 - (1 - phi(m))^2)`.
///
/// Children within a relative `1e-9` of [`phi_fixed_point`] are returned as
/// exactly that value, and a parent at or below it is its own odd child, so
/// channels that have converged compare equal and fall to the tie-break
/// instead of to rounding noise.
pub fn odd_child(m: f64) -> Result<f64> {
    let lp = ln_phi(m)?;
    let fixed = phi_fixed_point();
    if m <= fixed {
        return Ok(m);
    }
    // 1 - (1 - p)^2 = p (2 - p), evaluated in the log domain.
    let p = lp.exp();
    let child = phi_inv_ln(lp + (2.0 - p).ln())?;
    Ok(if child <= fixed * (1.0 + FIXED_POINT_SNAP) {
        fixed
    } else {
        child
    })
}

/// Parameters of the GA construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaParams {
    /// Design SNR in dB.
    pub design_snr_db: f64,
    /// LLR mean of the physical channel.
    pub initial_mean: f64,
    /// Absolute tolerance on `|phi(x) - y|` for the inversion.
    pub inversion_tolerance: f64,
}

impl GaParams {
    /// Parameters for a design SNR in dB, with `m = 2 * 10^(snr/10)` so
    /// that 0 dB maps to an initial mean of 2.
    pub fn from_design_snr(design_snr_db: f64) -> Result<Self> {
        if !design_snr_db.is_finite() {
            return Err(Error::Domain {
                name: "design_snr_db",
                value: design_snr_db,
                domain: "finite",
            });
        }
        Self::new(
            design_snr_db,
            2.0 * 10f64.powf(design_snr_db / 10.0),
            DEFAULT_INVERSION_TOLERANCE,
        )
    }

    /// Parameters with an explicit initial mean (the design SNR field is
    /// back-computed from it).
    pub fn with_initial_mean(initial_mean: f64) -> Result<Self> {
        Self::new(
            10.0 * (initial_mean / 2.0).log10(),
            initial_mean,
            DEFAULT_INVERSION_TOLERANCE,
        )
    }

    pub fn new(design_snr_db: f64, initial_mean: f64, inversion_tolerance: f64) -> Result<Self> {
        if !(initial_mean > 0.0 && initial_mean.is_finite()) {
            return Err(Error::Domain {
                name: "initial_mean",
                value: initial_mean,
                domain: "(0, inf)",
            });
        }
        if !(inversion_tolerance > 0.0 && inversion_tolerance <= 1e-9) {
            return Err(Error::Domain {
                name: "inversion_tolerance",
                value: inversion_tolerance,
                domain: "(0, 1e-9]",
            });
        }
        Ok(Self {
            design_snr_db,
            initial_mean,
            inversion_tolerance,
        })
    }
}

impl Default for GaParams {
    fn default() -> Self {
        Self::from_design_snr(0.0).expect("0 dB is a valid design SNR")
    }
}

fn check_stages(l: u32) -> Result<()> {
    if l > MAX_STAGES {
        return Err(Error::InvalidParameter(format!(
            "{l} polarization stages exceed the limit of {MAX_STAGES}"
        )));
    }
    Ok(())
}

/// GA means in recursion order: the children of node `j` are `2j` (odd
/// branch, worse) and `2j + 1` (even branch, `2m`).
pub fn ga_means_recursion_order(l: u32, params: &GaParams) -> Result<Vec<f64>> {
    check_stages(l)?;
    let mut means = vec![params.initial_mean];
    for _ in 0..l {
        let mut next = Vec::with_capacity(means.len() * 2);
        for &m in &means {
            next.push(odd_child(m)?);
            next.push(2.0 * m);
        }
        means = next;
    }
    Ok(means)
}

/// GA means for `2^l` channels, in the public index domain.
pub fn ga_means(l: u32, params: &GaParams) -> Result<Vec<f64>> {
    let natural = ga_means_recursion_order(l, params)?;
    let perm = bit_reverse(natural.len())?;
    Ok(perm.iter().map(|&j| natural[j]).collect())
}

/// Compares two 1-based channel indices for the tie-break: more ones in
/// `index - 1` first, then the larger index first.
fn tie_break(a: usize, b: usize) -> Ordering {
    let pa = (a - 1).count_ones();
    let pb = (b - 1).count_ones();
    pb.cmp(&pa).then(b.cmp(&a))
}

/// Sorts the polarization vector ascending.
///
/// Returns `(a, k)` with `a[i] = b[k[i] - 1]` non-decreasing and `k` a
/// 1-based permutation. Equal values are ordered by descending popcount of
/// `index - 1`, then by descending index.
pub fn sort_polarization(b: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut k: Vec<usize> = (1..=b.len()).collect();
    k.sort_by(|&x, &y| {
        b[x - 1]
            .partial_cmp(&b[y - 1])
            .unwrap_or(Ordering::Equal)
            .then_with(|| tie_break(x, y))
    });
    let a = k.iter().map(|&i| b[i - 1]).collect();
    (a, k)
}

/// Per-channel GA reliabilities of a length-`n` mother code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityProfile {
    pub n: usize,
    pub params: GaParams,
    /// LLR means, `means[i - 1]` for channel `i`. Large is good.
    pub means: Vec<f64>,
    /// Polarization values `exp(-mean / 4)`. Small is good.
    pub b: Vec<f64>,
    /// Channels ordered from most to least reliable (ascending `b`), 1-based.
    pub rank: Vec<usize>,
}

impl ReliabilityProfile {
    pub fn stages(&self) -> u32 {
        self.n.trailing_zeros()
    }

    /// 1-based position of each channel inside `rank`.
    pub fn rank_positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.n];
        for (p, &ch) in self.rank.iter().enumerate() {
            pos[ch - 1] = p + 1;
        }
        pos
    }

    /// CSV with columns `index,mean,b,rank_position`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,mean,b,rank_position\n");
        for (i, pos) in self.rank_positions().into_iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{}", i + 1, self.means[i], self.b[i], pos);
        }
        out
    }
}

/// Runs the GA construction for `n = 2^l` channels and ranks them.
///
/// `b` is `exp(-mean / 4)`. The rank is taken on the means directly
/// (descending), which orders identically to ascending `b` but survives
/// the underflow of `b` for very reliable channels. Ties use the same rule
/// as [`sort_polarization`].
pub fn build_profile(n: usize, params: &GaParams) -> Result<ReliabilityProfile> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let means = ga_means(n.trailing_zeros(), params)?;
    let b = means.iter().map(|m| (-m / 4.0).exp()).collect();
    let mut rank: Vec<usize> = (1..=n).collect();
    rank.sort_by(|&x, &y| {
        means[y - 1]
            .partial_cmp(&means[x - 1])
            .unwrap_or(Ordering::Equal)
            .then_with(|| tie_break(x, y))
    });
    Ok(ReliabilityProfile {
        n,
        params: *params,
        means,
        b,
        rank,
    })
}
