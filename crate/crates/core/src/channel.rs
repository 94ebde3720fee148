//! BPSK over AWGN and the Monte Carlo BER/FER engine.
//!
//! Every frame draws from its own ChaCha8 stream: the key comes from the
//! point seed (`master seed + SNR index`) and the stream number is the frame
//! index. Frames are decoded in parallel batches and then folded in frame
//! order, so the stop rule and every count match a sequential run exactly.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{encode, expand_llrs, ScDecoder, LLR_MAX};
use crate::error::{Error, Result};
use crate::shortening::CodeSpec;

/// Frames decoded per parallel batch before the stop rule is consulted.
const BATCH: u64 = 512;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Noise level for an `Eb/N0` in dB at code rate `rate`, with unit-energy
/// BPSK symbols: `sigma^2 = 1 / (2 R 10^(EbN0/10))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma: f64,
}

impl ChannelParams {
    pub fn new(ebn0_db: f64, rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate <= 1.0) {
            return Err(Error::Domain {
                name: "rate",
                value: rate,
                domain: "(0, 1]",
            });
        }
        if !ebn0_db.is_finite() {
            return Err(Error::Domain {
                name: "ebn0_db",
                value: ebn0_db,
                domain: "finite",
            });
        }
        let var = 1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0));
        Ok(Self {
            ebn0_db,
            rate,
            sigma: var.sqrt(),
        })
    }
}

/// Random stream of one frame.
#[derive(Debug, Clone)]
pub struct RandomStream(ChaCha8Rng);

impl RandomStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self(rng)
    }

    /// Stream for frame `frame` of the point seeded with `point_seed`.
    pub fn for_frame(point_seed: u64, frame: u64) -> Self {
        Self::new(point_seed, frame)
    }

    pub fn gaussian(&mut self) -> f64 {
        self.0.sample(StandardNormal)
    }

    pub fn bits(&mut self, out: &mut [u8]) {
        for chunk in out.chunks_mut(64) {
            let word: u64 = self.0.random();
            for (i, b) in chunk.iter_mut().enumerate() {
                *b = ((word >> i) & 1) as u8;
            }
        }
    }
}

/// Seed of SNR point `index` in a sweep seeded with `master`.
pub fn point_seed(master: u64, index: usize) -> u64 {
    master.wrapping_add(index as u64)
}

/// BPSK: bit 0 to +1, bit 1 to -1.
pub fn modulate(c: &[u8]) -> Vec<f64> {
    c.iter()
        .map(|&b| if b & 1 == 0 { 1.0 } else { -1.0 })
        .collect()
}

/// Adds white Gaussian noise of standard deviation `sigma`.
pub fn transmit(x: &[f64], sigma: f64, stream: &mut RandomStream) -> Vec<f64> {
    if sigma == 0.0 {
        return x.to_vec();
    }
    x.iter().map(|&v| v + sigma * stream.gaussian()).collect()
}

/// BPSK LLRs `2 y / sigma^2`. With `sigma = 0` the channel is noiseless and
/// the LLRs saturate to `+-LLR_MAX` by the sign of `y`.
pub fn channel_llrs(y: &[f64], sigma: f64) -> Vec<f64> {
    if sigma == 0.0 {
        return y
            .iter()
            .map(|&v| if v < 0.0 { -LLR_MAX } else { LLR_MAX })
            .collect();
    }
    let scale = 2.0 / (sigma * sigma);
    y.iter().map(|&v| scale * v).collect()
}

/// When to stop simulating one SNR point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub min_frame_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_frame_errors: 100,
            max_frames: 1_000_000,
        }
    }
}

impl StopRule {
    pub fn new(min_frame_errors: u64, max_frames: u64) -> Result<Self> {
        if max_frames == 0 {
            return Err(Error::InvalidParameter(
                "max_frames must be at least 1".into(),
            ));
        }
        Ok(Self {
            min_frame_errors,
            max_frames,
        })
    }

    fn done(&self, tally: &Tally) -> bool {
        tally.frames >= self.max_frames
            || (self.min_frame_errors > 0 && tally.frame_errors >= self.min_frame_errors)
    }
}

/// Error counts; merging is a plain sum, so order never matters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
}

impl Tally {
    pub fn frame(bit_errors: u64) -> Self {
        Self {
            frames: 1,
            bit_errors,
            frame_errors: (bit_errors > 0) as u64,
        }
    }

    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            frames: self.frames + other.frames,
            bit_errors: self.bit_errors + other.bit_errors,
            frame_errors: self.frame_errors + other.frame_errors,
        }
    }
}

/// Result of one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPoint {
    pub ebn0_db: f64,
    pub frames: u64,
    pub bit_errors: u64,
    pub frame_errors: u64,
    pub ber: f64,
    pub fer: f64,
    /// Half-width of the normal-approximation 95% interval on the BER.
    pub ci95_ber: f64,
    pub seed: u64,
    #[serde(skip)]
    pub elapsed: f64,
}

impl SimPoint {
    /// Point statistics for `tally` with `bits_per_frame` message bits.
    pub fn from_tally(
        ebn0_db: f64,
        tally: Tally,
        bits_per_frame: usize,
        seed: u64,
        elapsed: f64,
    ) -> Self {
        let bits = tally.frames as f64 * bits_per_frame as f64;
        let ber = if bits > 0.0 {
            tally.bit_errors as f64 / bits
        } else {
            0.0
        };
        let fer = if tally.frames > 0 {
            tally.frame_errors as f64 / tally.frames as f64
        } else {
            0.0
        };
        let ci95_ber = if bits > 0.0 {
            Z95 * (ber * (1.0 - ber) / bits).sqrt()
        } else {
            0.0
        };
        Self {
            ebn0_db,
            frames: tally.frames,
            bit_errors: tally.bit_errors,
            frame_errors: tally.frame_errors,
            ber,
            fer,
            ci95_ber,
            seed,
            elapsed,
        }
    }

    pub fn tally(&self) -> Tally {
        Tally {
            frames: self.frames,
            bit_errors: self.bit_errors,
            frame_errors: self.frame_errors,
        }
    }

    /// Half-width of the normal-approximation 95% interval on the FER.
    pub fn ci95_fer(&self) -> f64 {
        if self.frames == 0 {
            return 0.0;
        }
        Z95 * (self.fer * (1.0 - self.fer) / self.frames as f64).sqrt()
    }
}

pub const CSV_HEADER: &str = "ebn0_db,frames,bit_errors,frame_errors,ber,fer,ci95_ber,seed";

/// A sweep over SNR points for one code.
#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub code: CodeSpec,
    pub stop: StopRule,
    pub master_seed: u64,
    pub points: Vec<SimPoint>,
}

impl SimResult {
    /// CSV rows, preceded by `# ` comment lines for each provenance entry.
    pub fn to_csv(&self, provenance: &[String]) -> String {
        let mut out = String::new();
        for line in provenance {
            let _ = writeln!(out, "# {line}");
        }
        out.push_str(CSV_HEADER);
        out.push('\n');
        for p in &self.points {
            let _ = writeln!(
                out,
                "{},{},{},{},{:e},{:e},{:e},{}",
                p.ebn0_db, p.frames, p.bit_errors, p.frame_errors, p.ber, p.fer, p.ci95_ber, p.seed
            );
        }
        out
    }

    pub fn to_json(&self, provenance: serde_json::Value) -> String {
        let doc = serde_json::json!({
            "provenance": provenance,
            "code": self.code,
            "stop": self.stop,
            "master_seed": self.master_seed,
            "points": self.points,
        });
        serde_json::to_string_pretty(&doc).expect("result serializes")
    }
}

struct Worker<'a> {
    spec: &'a CodeSpec,
    decoder: ScDecoder,
    msg: Vec<u8>,
}

impl<'a> Worker<'a> {
    fn new(spec: &'a CodeSpec) -> Self {
        Self {
            spec,
            decoder: ScDecoder::new(spec),
            msg: vec![0; spec.k],
        }
    }

    fn frame(&mut self, seed: u64, frame: u64, sigma: f64) -> u64 {
        let mut stream = RandomStream::for_frame(seed, frame);
        stream.bits(&mut self.msg);
        let cw = encode(&self.msg, self.spec).expect("message length matches");
        let y = transmit(&modulate(&cw.bits), sigma, &mut stream);
        let llrs = expand_llrs(&channel_llrs(&y, sigma), self.spec).expect("length matches");
        let out = self.decoder.decode(&llrs).expect("length matches");
        out.msg
            .iter()
            .zip(&self.msg)
            .filter(|(a, b)| a != b)
            .count() as u64
    }
}

/// Runs frames `0, 1, 2, ...` until the stop rule fires, evaluating
/// `frame_errors` in parallel batches and folding in frame order.
fn drive<F, I, S>(stop: &StopRule, init: I, eval: F) -> Tally
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, u64) -> u64 + Sync + Send,
{
    let mut tally = Tally::default();
    let mut next = 0u64;
    while !stop.done(&tally) {
        let end = (next + BATCH).min(stop.max_frames);
        let errors: Vec<u64> = (next..end)
            .into_par_iter()
            .map_init(&init, |state, f| eval(state, f))
            .collect();
        for e in errors {
            tally = tally.merge(Tally::frame(e));
            if stop.done(&tally) {
                break;
            }
        }
        next = end;
    }
    tally
}

/// Simulates one SNR point with the given point seed.
pub fn run_point(spec: &CodeSpec, ebn0_db: f64, stop: &StopRule, seed: u64) -> Result<SimPoint> {
    if stop.max_frames == 0 {
        return Err(Error::InvalidParameter(
            "max_frames must be at least 1".into(),
        ));
    }
    let ch = ChannelParams::new(ebn0_db, spec.rate())?;
    let start = Instant::now();
    let tally = drive(
        stop,
        || Worker::new(spec),
        |w, f| w.frame(seed, f, ch.sigma),
    );
    Ok(SimPoint::from_tally(
        ebn0_db,
        tally,
        spec.k,
        seed,
        start.elapsed().as_secs_f64(),
    ))
}

/// Simulates every SNR in `ebn0_list`; point `i` uses seed
/// `point_seed(seed, i)`.
pub fn run_sweep(
    spec: &CodeSpec,
    ebn0_list: &[f64],
    stop: &StopRule,
    seed: u64,
) -> Result<SimResult> {
    if ebn0_list.is_empty() {
        return Err(Error::InvalidParameter("empty Eb/N0 list".into()));
    }
    let points = ebn0_list
        .iter()
        .enumerate()
        .map(|(i, &e)| run_point(spec, e, stop, point_seed(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SimResult {
        code: spec.clone(),
        stop: *stop,
        master_seed: seed,
        points,
    })
}

/// Uncoded BPSK reference: `bits_per_frame` hard-decided symbols per frame
/// at rate one, for exactly `frames` frames.
pub fn run_uncoded(
    ebn0_db: f64,
    bits_per_frame: usize,
    frames: u64,
    seed: u64,
) -> Result<SimPoint> {
    let ch = ChannelParams::new(ebn0_db, 1.0)?;
    let stop = StopRule::new(0, frames)?;
    let start = Instant::now();
    let tally = drive(
        &stop,
        || vec![0u8; bits_per_frame],
        |bits, f| {
            let mut stream = RandomStream::for_frame(seed, f);
            stream.bits(bits);
            let y = transmit(&modulate(bits), ch.sigma, &mut stream);
            y.iter()
                .zip(bits.iter())
                .filter(|(&v, &b)| (v < 0.0) as u8 != b)
                .count() as u64
        },
    );
    Ok(SimPoint::from_tally(
        ebn0_db,
        tally,
        bits_per_frame,
        seed,
        start.elapsed().as_secs_f64(),
    ))
}

/// Gaussian tail `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}
