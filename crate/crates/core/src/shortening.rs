//! Shortening patterns and the shortened code description.
//!
//! All indices handled here are 1-based channel (row/column) indices of the
//! mother generator `F^{(x)l}` in the public domain, where row `r` has a one
//! in column `c` exactly when the bits of `c - 1` are a subset of those of
//! `r - 1`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::codec::bit_reverse_index;
use crate::error::{Error, Result};
use crate::ga::ReliabilityProfile;

/// Largest mother length for which a generator matrix is materialized.
pub const MAX_MATERIALIZED: usize = 1 << 12;

/// At most this many offending pairs are listed in a [`Violation`].
pub const MAX_REPORTED_PAIRS: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    /// Polarization-driven: drop the most reliable channels of the GA rank.
    Pd,
    /// Iterative weight-1 column removal.
    Cw,
    /// Bit-reversed tail.
    Rqup,
    Custom,
}

impl Method {
    pub const GENERATED: [Method; 3] = [Method::Pd, Method::Rqup, Method::Cw];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pd => "PD",
            Method::Cw => "CW",
            Method::Rqup => "RQUP",
            Method::Custom => "CUSTOM",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PD" => Ok(Method::Pd),
            "CW" => Ok(Method::Cw),
            "RQUP" => Ok(Method::Rqup),
            "CUSTOM" => Ok(Method::Custom),
            other => Err(Error::InvalidParameter(format!("unknown method {other:?}"))),
        }
    }
}

/// An ordered list of shortened channel indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortenPattern {
    n: usize,
    indices: Vec<usize>,
    method: Method,
}

#[derive(Serialize, Deserialize)]
struct PatternFile {
    n: usize,
    n_short: usize,
    method: Method,
    indices: Vec<usize>,
}

impl ShortenPattern {
    /// Checks that `indices` are distinct, within `1..=n`, and fewer than `n`.
    pub fn new(n: usize, indices: Vec<usize>, method: Method) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "mother length must be positive".into(),
            ));
        }
        if indices.len() >= n {
            return Err(Error::InvalidParameter(format!(
                "pattern removes {} of {n} positions",
                indices.len()
            )));
        }
        let mut seen = HashSet::with_capacity(indices.len());
        for &i in &indices {
            if i == 0 || i > n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            if !seen.insert(i) {
                return Err(Error::InvalidParameter(format!("index {i} repeated")));
            }
        }
        Ok(Self { n, indices, method })
    }

    pub fn empty(n: usize, method: Method) -> Self {
        Self {
            n,
            indices: Vec::new(),
            method,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn n_short(&self) -> usize {
        self.n - self.indices.len()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Shortened indices (1-based) in generation order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Membership mask over 0-based positions.
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for &i in &self.indices {
            mask[i - 1] = true;
        }
        mask
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PatternFile {
            n: self.n,
            n_short: self.n_short(),
            method: self.method,
            indices: self.indices.clone(),
        })
        .expect("pattern serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PatternFile = serde_json::from_str(text)?;
        let pattern = Self::new(file.n, file.indices, file.method)?;
        if pattern.n_short() != file.n_short {
            return Err(Error::Format(format!(
                "n_short {} disagrees with n - |indices| = {}",
                file.n_short,
                pattern.n_short()
            )));
        }
        Ok(pattern)
    }
}

fn check_lengths(n: usize, n_short: usize) -> Result<()> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if n_short == 0 || n_short > n {
        return Err(Error::InvalidParameter(format!(
            "shortened length {n_short} must lie in 1..={n}"
        )));
    }
    Ok(())
}

/// Polarization-driven pattern: the first `n - n_short` entries of the rank.
pub fn pd_pattern(profile: &ReliabilityProfile, n_short: usize) -> Result<ShortenPattern> {
    check_lengths(profile.n, n_short)?;
    let q = profile.n - n_short;
    ShortenPattern::new(profile.n, profile.rank[..q].to_vec(), Method::Pd)
}

/// Column-weight pattern.
///
/// Repeatedly picks a column of weight one in the reduced generator (the
/// largest such index), then deletes it together with the row holding its
/// single one, which is the row of the same index.
pub fn cw_pattern(n: usize, n_short: usize) -> Result<ShortenPattern> {
    check_lengths(n, n_short)?;
    let l = n.trailing_zeros();
    // Surviving rows with a one in each column (0-based supersets).
    let mut weight: Vec<usize> = (0..n)
        .map(|c| 1usize << (l - (c as u32).count_ones()))
        .collect();
    let mut alive = vec![true; n];
    let mut candidates: BTreeSet<usize> = (0..n).filter(|&c| weight[c] == 1).collect();
    let mut out = Vec::with_capacity(n - n_short);
    for _ in 0..n - n_short {
        let d = candidates
            .pop_last()
            .expect("a lower-triangular Kronecker power always has a weight-1 column");
        alive[d] = false;
        out.push(d + 1);
        // Row d contributes to every column whose bits are a subset of d.
        let mut sub = d;
        loop {
            weight[sub] -= 1;
            if alive[sub] && weight[sub] == 1 {
                candidates.insert(sub);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & d;
        }
    }
    ShortenPattern::new(n, out, Method::Cw)
}

/// Bit-reversed tail: `bitrev(j) + 1` for `j = n-1, n-2, ..., n_short`.
pub fn rqup_pattern(n: usize, n_short: usize) -> Result<ShortenPattern> {
    check_lengths(n, n_short)?;
    let l = n.trailing_zeros();
    let out = (n_short..n)
        .rev()
        .map(|j| bit_reverse_index(j, l) + 1)
        .collect();
    ShortenPattern::new(n, out, Method::Rqup)
}

/// Generates the pattern for one of the built-in methods.
pub fn generate_pattern(
    method: Method,
    profile: &ReliabilityProfile,
    n_short: usize,
) -> Result<ShortenPattern> {
    match method {
        Method::Pd => pd_pattern(profile, n_short),
        Method::Cw => cw_pattern(profile.n, n_short),
        Method::Rqup => rqup_pattern(profile.n, n_short),
        Method::Custom => Err(Error::InvalidParameter(
            "a custom pattern has to be supplied explicitly".into(),
        )),
    }
}

/// Generator entries that break a shortening pattern: `(row, column)` with a
/// one at a shortened column in a row that is not shortened (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub pairs: Vec<(usize, usize)>,
    /// More offending pairs exist than are listed.
    pub truncated: bool,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "unshortened rows reach shortened columns at (row, column)"
        )?;
        for (r, c) in &self.pairs {
            write!(f, " ({r}, {c})")?;
        }
        if self.truncated {
            write!(f, " ...")?;
        }
        Ok(())
    }
}

/// Checks that the shortened code bits are forced to zero, i.e. that every
/// row with a one in a shortened column is itself shortened. For the
/// Kronecker power this means the pattern is closed under bitwise supersets
/// of `index - 1`.
pub fn validate_pattern(pattern: &ShortenPattern) -> std::result::Result<(), Violation> {
    let n = pattern.n();
    if !n.is_power_of_two() {
        return Err(Violation {
            pairs: Vec::new(),
            truncated: true,
        });
    }
    let mask = pattern.mask();
    let full = n - 1;
    let mut pairs = Vec::new();
    let mut truncated = false;
    for &col in pattern.indices() {
        let c = col - 1;
        let free = full & !c;
        // Enumerate supersets r = c | s over subsets s of the free bits.
        let mut s = free;
        loop {
            let r = c | s;
            if !mask[r] {
                if pairs.len() < MAX_REPORTED_PAIRS {
                    pairs.push((r + 1, col));
                } else {
                    truncated = true;
                    break;
                }
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & free;
        }
        if truncated {
            break;
        }
    }
    if pairs.is_empty() {
        Ok(())
    } else {
        pairs.sort_unstable();
        Err(Violation { pairs, truncated })
    }
}

/// Dense binary matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v & 1;
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Row vector times matrix over GF(2).
    pub fn mul_vec(&self, u: &[u8]) -> Vec<u8> {
        assert_eq!(u.len(), self.rows);
        let mut out = vec![0u8; self.cols];
        for (r, &bit) in u.iter().enumerate() {
            if bit & 1 == 1 {
                for (o, &g) in out.iter_mut().zip(self.row(r)) {
                    *o ^= g;
                }
            }
        }
        out
    }
}

/// The mother generator `F^{(x)l}` for `n = 2^l <= 4096`.
pub fn mother_generator(n: usize) -> Result<BitMatrix> {
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    if n > MAX_MATERIALIZED {
        return Err(Error::InvalidParameter(format!(
            "generator of length {n} is too large to materialize"
        )));
    }
    let mut g = BitMatrix::zeros(n, n);
    for r in 0..n {
        for c in 0..n {
            if r & c == c {
                g.set(r, c, 1);
            }
        }
    }
    Ok(g)
}

/// Mother generator with the pattern's rows and columns deleted.
pub fn reduce_generator(n: usize, pattern: &ShortenPattern) -> Result<BitMatrix> {
    if pattern.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: pattern.n(),
        });
    }
    if let Some(&bad) = pattern.indices().iter().find(|&&i| i == 0 || i > n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    let g = mother_generator(n)?;
    let mask = pattern.mask();
    let keep: Vec<usize> = (0..n).filter(|&i| !mask[i]).collect();
    let mut out = BitMatrix::zeros(keep.len(), keep.len());
    for (ro, &r) in keep.iter().enumerate() {
        for (co, &c) in keep.iter().enumerate() {
            out.set(ro, co, g.get(r, c));
        }
    }
    Ok(out)
}

/// A shortened polar code: mother length, pattern and information set.
#[derive(Debug, Clone, Serialize)]
pub struct CodeSpec {
    pub n: usize,
    pub n_short: usize,
    pub k: usize,
    pub method: Method,
    /// Shortened indices, 1-based, in generation order.
    pub pattern: Vec<usize>,
    /// Information set A, 1-based, ascending.
    pub info_set: Vec<usize>,
    pub design: crate::ga::GaParams,
    #[serde(skip)]
    shortened: Vec<bool>,
    #[serde(skip)]
    frozen: Vec<bool>,
    #[serde(skip)]
    profile: Arc<ReliabilityProfile>,
    #[serde(skip)]
    shortening: ShortenPattern,
}

impl CodeSpec {
    /// Builds the code from an explicit pattern. The information set holds
    /// the `k` most reliable channels of the mother rank that are not
    /// shortened.
    pub fn from_pattern(
        profile: Arc<ReliabilityProfile>,
        pattern: ShortenPattern,
        k: usize,
    ) -> Result<Self> {
        let n = profile.n;
        if pattern.n() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: pattern.n(),
            });
        }
        let n_short = pattern.n_short();
        if n > 1 && n_short <= n / 2 {
            return Err(Error::InvalidParameter(format!(
                "shortened length {n_short} must exceed n/2 = {}",
                n / 2
            )));
        }
        if k > n_short {
            return Err(Error::InvalidParameter(format!(
                "k = {k} exceeds the shortened length {n_short}"
            )));
        }
        validate_pattern(&pattern).map_err(Error::InvalidPattern)?;
        let shortened = pattern.mask();
        let mut info_set: Vec<usize> = profile
            .rank
            .iter()
            .copied()
            .filter(|&ch| !shortened[ch - 1])
            .take(k)
            .collect();
        info_set.sort_unstable();
        let mut frozen = vec![true; n];
        for &i in &info_set {
            frozen[i - 1] = false;
        }
        Ok(Self {
            n,
            n_short,
            k,
            method: pattern.method(),
            pattern: pattern.indices().to_vec(),
            info_set,
            design: profile.params,
            shortened,
            frozen,
            profile,
            shortening: pattern,
        })
    }

    /// Mother code of length `n` with `k` information bits.
    pub fn mother(profile: Arc<ReliabilityProfile>, k: usize) -> Result<Self> {
        let n = profile.n;
        Self::from_pattern(profile, ShortenPattern::empty(n, Method::Pd), k)
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n_short as f64
    }

    /// Frozen mask over the mother positions (0-based); includes every
    /// shortened position.
    pub fn frozen(&self) -> &[bool] {
        &self.frozen
    }

    /// Shortened mask over the mother positions (0-based).
    pub fn shortened(&self) -> &[bool] {
        &self.shortened
    }

    pub fn profile(&self) -> &ReliabilityProfile {
        &self.profile
    }

    pub fn shortening(&self) -> &ShortenPattern {
        &self.shortening
    }

    pub fn stages(&self) -> u32 {
        self.n.trailing_zeros()
    }
}

/// Builds a shortened code with one of the generated pattern methods.
pub fn build_code_spec(
    profile: Arc<ReliabilityProfile>,
    n_short: usize,
    k: usize,
    method: Method,
) -> Result<CodeSpec> {
    if k > n_short {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds the shortened length {n_short}"
        )));
    }
    let pattern = generate_pattern(method, &profile, n_short)?;
    CodeSpec::from_pattern(profile, pattern, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::{build_profile, GaParams};

    fn profile(n: usize) -> Arc<ReliabilityProfile> {
        Arc::new(build_profile(n, &GaParams::default()).unwrap())
    }

    #[test]
    fn pd_examples() {
        let p = profile(8);
        assert_eq!(pd_pattern(&p, 5).unwrap().indices(), &[8, 4, 6]);
        assert!(pd_pattern(&p, 8).unwrap().is_empty());
        assert_eq!(pd_pattern(&p, 4).unwrap().indices(), &[8, 4, 6, 7]);
        assert!(pd_pattern(&p, 9).is_err());
        assert!(pd_pattern(&p, 0).is_err());
    }

    #[test]
    fn cw_examples() {
        assert_eq!(cw_pattern(8, 7).unwrap().indices(), &[8]);
        assert_eq!(cw_pattern(8, 5).unwrap().indices(), &[8, 7, 6]);
        assert!(cw_pattern(8, 8).unwrap().is_empty());
        assert!(cw_pattern(12, 8).is_err());
    }

    #[test]
    fn rqup_examples() {
        assert_eq!(rqup_pattern(8, 7).unwrap().indices(), &[8]);
        assert_eq!(rqup_pattern(8, 5).unwrap().indices(), &[8, 4, 6]);
        assert!(rqup_pattern(8, 8).unwrap().is_empty());
    }

    #[test]
    fn validate_examples() {
        let ok = ShortenPattern::new(8, vec![8, 4, 6], Method::Custom).unwrap();
        assert!(validate_pattern(&ok).is_ok());
        let bad = ShortenPattern::new(8, vec![1], Method::Custom).unwrap();
        let v = validate_pattern(&bad).unwrap_err();
        assert_eq!(
            v.pairs,
            (2..=8).map(|r| (r, 1)).collect::<Vec<_>>(),
            "column 1 is all ones"
        );
        assert!(validate_pattern(&ShortenPattern::empty(8, Method::Custom)).is_ok());
    }

    #[test]
    fn pattern_well_formedness() {
        assert!(ShortenPattern::new(8, vec![9], Method::Custom).is_err());
        assert!(ShortenPattern::new(8, vec![0], Method::Custom).is_err());
        assert!(ShortenPattern::new(8, vec![3, 3], Method::Custom).is_err());
        assert!(ShortenPattern::new(2, vec![1, 2], Method::Custom).is_err());
    }

    #[test]
    fn reduce_examples() {
        let p = ShortenPattern::new(8, vec![8, 4, 6], Method::Pd).unwrap();
        let g5 = reduce_generator(8, &p).unwrap();
        let g8 = mother_generator(8).unwrap();
        let keep = [0usize, 1, 2, 4, 6];
        assert_eq!(g5.rows(), 5);
        for (i, &r) in keep.iter().enumerate() {
            for (j, &c) in keep.iter().enumerate() {
                assert_eq!(g5.get(i, j), g8.get(r, c));
            }
        }
        assert_eq!(
            reduce_generator(8, &ShortenPattern::empty(8, Method::Pd)).unwrap(),
            g8
        );

        let g1 =
            reduce_generator(2, &ShortenPattern::new(2, vec![2], Method::Custom).unwrap()).unwrap();
        assert_eq!((g1.rows(), g1.get(0, 0)), (1, 1));
    }

    #[test]
    fn info_set_examples() {
        let p = profile(8);
        let spec = build_code_spec(p.clone(), 5, 2, Method::Pd).unwrap();
        assert_eq!(spec.info_set, vec![2, 7]);
        assert_eq!(spec.pattern, vec![8, 4, 6]);

        let spec = build_code_spec(p.clone(), 5, 0, Method::Pd).unwrap();
        assert!(spec.info_set.is_empty());
        assert!(spec.frozen().iter().all(|&f| f));

        let spec = build_code_spec(p.clone(), 5, 5, Method::Pd).unwrap();
        assert_eq!(spec.info_set, vec![1, 2, 3, 5, 7]);

        assert!(build_code_spec(p.clone(), 5, 6, Method::Pd).is_err());
        assert!(build_code_spec(p, 4, 2, Method::Pd).is_err());
    }

    #[test]
    fn invalid_custom_pattern_is_an_error() {
        let p = profile(8);
        let bad = ShortenPattern::new(8, vec![1], Method::Custom).unwrap();
        assert!(matches!(
            CodeSpec::from_pattern(p, bad, 2),
            Err(Error::InvalidPattern(_))
        ));
    }

    #[test]
    fn json_roundtrip() {
        let p = rqup_pattern(16, 12).unwrap();
        let text = p.to_json();
        assert!(text.contains("\"method\": \"RQUP\""));
        assert_eq!(ShortenPattern::from_json(&text).unwrap(), p);
        let bad = r#"{"n": 8, "n_short": 6, "method": "CUSTOM", "indices": [8, 4, 6]}"#;
        assert!(ShortenPattern::from_json(bad).is_err());
    }
}
