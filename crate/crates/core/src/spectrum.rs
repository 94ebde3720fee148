//! Spectrum-distance analysis over the polarization tree.
//!
//! Each channel is a root-to-leaf path of `l` labelled branches. Channel `i`
//! carries `popcount(i - 1)` branches labelled one and `l - popcount(i - 1)`
//! labelled zero. Bit reversal does not change a popcount, so the counts are
//! the same in either index domain. Shortening removes paths; the spectra
//! count the surviving paths by number of zeros (`C(X)`) and ones (`H(X)`).
//! All arithmetic is exact.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ga::ReliabilityProfile;
use crate::shortening::{generate_pattern, Method, ShortenPattern};

pub type Exact = Ratio<u64>;

/// Number of zero-labelled branches on the path of channel `i` (1-based).
pub fn path_zeros(i: usize, l: u32) -> Result<u32> {
    let n = 1usize << l;
    if i == 0 || i > n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    Ok(l - (i - 1).count_ones())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PathSpectrum {
    pub l: u32,
    /// `zero_coeffs[r]`: surviving paths with `r` zeros.
    pub zero_coeffs: Vec<u64>,
    /// `one_coeffs[k]`: surviving paths with `k` ones.
    pub one_coeffs: Vec<u64>,
    pub n_mother: u64,
}

impl PathSpectrum {
    pub fn paths(&self) -> u64 {
        self.zero_coeffs.iter().sum()
    }
}

/// Spectrum of the paths left after removing `removed` (1-based indices).
pub fn spectrum_without(l: u32, removed: &[usize]) -> Result<PathSpectrum> {
    let n = 1usize << l;
    let mut gone = vec![false; n];
    for &i in removed {
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if std::mem::replace(&mut gone[i - 1], true) {
            return Err(Error::InvalidParameter(format!("index {i} repeated")));
        }
    }
    let mut zero_coeffs = vec![0u64; l as usize + 1];
    let mut one_coeffs = vec![0u64; l as usize + 1];
    for (idx, _) in gone.iter().enumerate().filter(|(_, &g)| !g) {
        let ones = idx.count_ones() as usize;
        one_coeffs[ones] += 1;
        zero_coeffs[l as usize - ones] += 1;
    }
    Ok(PathSpectrum {
        l,
        zero_coeffs,
        one_coeffs,
        n_mother: n as u64,
    })
}

/// Spectrum after shortening with `pattern` (or of the full tree).
pub fn build_spectrum(l: u32, pattern: Option<&ShortenPattern>) -> Result<PathSpectrum> {
    match pattern {
        Some(p) => {
            if p.n() != 1usize << l {
                return Err(Error::LengthMismatch {
                    expected: 1usize << l,
                    actual: p.n(),
                });
            }
            spectrum_without(l, p.indices())
        }
        None => spectrum_without(l, &[]),
    }
}

fn weighted_mean(coeffs: &[u64], denom: u64) -> Exact {
    let total: u64 = coeffs.iter().enumerate().map(|(r, &c)| c * r as u64).sum();
    Ratio::new(total, denom)
}

/// Mean number of zeros per path, normalized by the mother length.
pub fn lambda_sd(s: &PathSpectrum) -> Exact {
    weighted_mean(&s.zero_coeffs, s.n_mother)
}

/// Mean number of ones per path, normalized by the mother length.
pub fn d_sd(s: &PathSpectrum) -> Exact {
    weighted_mean(&s.one_coeffs, s.n_mother)
}

/// `lambda` normalized by the surviving path count instead.
pub fn lambda_sd_surviving(s: &PathSpectrum) -> Exact {
    weighted_mean(&s.zero_coeffs, s.paths().max(1))
}

/// Zero-count polynomial of the removed paths, `sum_i X^{zeros(p_i)}`.
pub fn removed_polynomial(l: u32, removed: &[usize]) -> Result<Vec<u64>> {
    let mut coeffs = vec![0u64; l as usize + 1];
    for &i in removed {
        coeffs[path_zeros(i, l)? as usize] += 1;
    }
    Ok(coeffs)
}

/// Evaluates `sum c_r X^r` exactly.
pub fn evaluate(coeffs: &[u64], x: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, &c| {
        acc * x + BigRational::from_integer(BigInt::from(c))
    })
}

/// Coefficient-wise relation of two polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    Equal,
    /// Every coefficient is `<=`, at least one `<`.
    Below,
    Above,
    Incomparable,
}

pub fn dominance(a: &[u64], b: &[u64]) -> Dominance {
    let len = a.len().max(b.len());
    let get = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0);
    let (mut lt, mut gt) = (false, false);
    for i in 0..len {
        match get(a, i).cmp(&get(b, i)) {
            std::cmp::Ordering::Less => lt = true,
            std::cmp::Ordering::Greater => gt = true,
            std::cmp::Ordering::Equal => {}
        }
    }
    match (lt, gt) {
        (false, false) => Dominance::Equal,
        (true, false) => Dominance::Below,
        (false, true) => Dominance::Above,
        (true, true) => Dominance::Incomparable,
    }
}

/// Formats an exact value as `"7/4"` (or `"2"`).
pub fn exact_string(v: &Exact) -> String {
    v.to_string()
}

pub fn exact_f64(v: &Exact) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

#[derive(Debug, Clone, Serialize)]
pub struct MethodSpectrum {
    pub method: Method,
    pub pattern: Vec<usize>,
    pub spectrum: PathSpectrum,
    #[serde(serialize_with = "ser_exact")]
    pub lambda: Exact,
    #[serde(serialize_with = "ser_exact")]
    pub d: Exact,
    #[serde(serialize_with = "ser_exact")]
    pub lambda_surviving: Exact,
    pub removed_zero_coeffs: Vec<u64>,
    #[serde(serialize_with = "ser_big")]
    pub removed_at_x: BigRational,
}

fn ser_exact<S: serde::Serializer>(v: &Exact, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&exact_string(v))
}

fn ser_big<S: serde::Serializer>(v: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl MethodSpectrum {
    pub fn new(pattern: &ShortenPattern, x: &BigRational) -> Result<Self> {
        let n = pattern.n();
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(n));
        }
        let l = n.trailing_zeros();
        let spectrum = build_spectrum(l, Some(pattern))?;
        let removed = removed_polynomial(l, pattern.indices())?;
        Ok(Self {
            method: pattern.method(),
            pattern: pattern.indices().to_vec(),
            lambda: lambda_sd(&spectrum),
            d: d_sd(&spectrum),
            lambda_surviving: lambda_sd_surviving(&spectrum),
            removed_at_x: evaluate(&removed, x),
            removed_zero_coeffs: removed,
            spectrum,
        })
    }

    /// JSON object with exact rational strings and 4-place decimals.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "method": self.method,
            "pattern": self.pattern,
            "zero_coeffs": self.spectrum.zero_coeffs,
            "one_coeffs": self.spectrum.one_coeffs,
            "lambda": exact_string(&self.lambda),
            "lambda_decimal": format!("{:.4}", exact_f64(&self.lambda)),
            "d": exact_string(&self.d),
            "d_decimal": format!("{:.4}", exact_f64(&self.d)),
            "lambda_surviving": exact_string(&self.lambda_surviving),
            "removed_zero_coeffs": self.removed_zero_coeffs,
            "removed_at_x": self.removed_at_x.to_string(),
            "removed_at_x_decimal": format!("{:.6}", self.removed_at_x.to_f64().unwrap_or(f64::NAN)),
        })
    }
}

/// PD, RQUP and CW side by side for one `(n, n')`.
#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
    pub n: usize,
    pub n_short: usize,
    #[serde(serialize_with = "ser_big")]
    pub x: BigRational,
    pub methods: Vec<MethodSpectrum>,
    /// Methods by descending lambda; equal values keep the PD, RQUP, CW order.
    pub ranking: Vec<Method>,
    /// Removed-set polynomial of PD against each baseline.
    pub pd_vs: Vec<(Method, Dominance)>,
}

impl Comparison {
    pub fn get(&self, method: Method) -> Option<&MethodSpectrum> {
        self.methods.iter().find(|m| m.method == method)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let ranking: Vec<_> = self
            .ranking
            .iter()
            .map(|m| {
                serde_json::json!({
                    "method": m,
                    "lambda": exact_string(&self.get(*m).expect("ranked method present").lambda),
                })
            })
            .collect();
        let dominance: serde_json::Map<String, serde_json::Value> = self
            .pd_vs
            .iter()
            .map(|(m, d)| {
                (
                    m.as_str().to_string(),
                    serde_json::to_value(d).expect("enum"),
                )
            })
            .collect();
        serde_json::json!({
            "n": self.n,
            "n_short": self.n_short,
            "x": self.x.to_string(),
            "methods": self.methods.iter().map(MethodSpectrum::to_json).collect::<Vec<_>>(),
            "ranking": ranking,
            "pd_removed_vs": dominance,
        })
    }
}

/// Builds the PD, RQUP and CW patterns for `(2^l, n_short)` and compares
/// their spectra. `x` is where the removed-set polynomials are evaluated.
pub fn compare_methods(
    l: u32,
    n_short: usize,
    profile: &ReliabilityProfile,
    x: f64,
) -> Result<Comparison> {
    let n = 1usize << l;
    if profile.n != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: profile.n,
        });
    }
    if n_short > n || (n > 1 && n_short <= n / 2) {
        return Err(Error::InvalidParameter(format!(
            "shortened length {n_short} must lie in ({}, {n}]",
            n / 2
        )));
    }
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            domain: "(0, 1)",
        });
    }
    let xr = BigRational::from_float(x).expect("finite");
    let methods = Method::GENERATED
        .iter()
        .map(|&m| MethodSpectrum::new(&generate_pattern(m, profile, n_short)?, &xr))
        .collect::<Result<Vec<_>>>()?;
    let mut ranking: Vec<Method> = methods.iter().map(|m| m.method).collect();
    ranking.sort_by(|a, b| {
        let la = methods.iter().find(|m| m.method == *a).unwrap().lambda;
        let lb = methods.iter().find(|m| m.method == *b).unwrap().lambda;
        lb.cmp(&la)
    });
    let pd = &methods[0];
    let pd_vs = methods[1..]
        .iter()
        .map(|m| {
            (
                m.method,
                dominance(&pd.removed_zero_coeffs, &m.removed_zero_coeffs),
            )
        })
        .collect();
    Ok(Comparison {
        n,
        n_short,
        x: xr,
        methods,
        ranking,
        pd_vs,
    })
}
