use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use polarshort::channel::{
    channel_llrs, modulate, q_function, run_sweep, run_uncoded, transmit, ChannelParams,
    RandomStream, SimPoint, StopRule,
};
use polarshort::codec::{
    bit_reverse_index, encode, expand_llrs, LlrVector, MlDecoder, ScDecoder, LLR_MAX,
};
use polarshort::ga::{build_profile, GaParams, ReliabilityProfile};
use polarshort::shortening::{
    build_code_spec, generate_pattern, reduce_generator, validate_pattern, CodeSpec, Method,
};
use polarshort::spectrum::{build_spectrum, compare_methods, exact_f64, lambda_sd};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, note: impl Into<String>) {
        let note = note.into();
        self.pass &= ok;
        self.notes
            .push(format!("{} {note}", if ok { "ok  " } else { "FAIL" }));
    }

    fn note(&mut self, note: impl Into<String>) {
        self.notes.push(format!("     {}", note.into()));
    }
}

fn criterion(id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    out.check(
        took <= budget,
        format!(
            "runtime {:.1}s within {}s",
            took.as_secs_f64(),
            budget.as_secs()
        ),
    );
    let verdict = if out.pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {id} {name}: {verdict} ({:.1}s)",
        took.as_secs_f64()
    );
    for n in &out.notes {
        println!("    {n}");
    }
    out.pass
}

fn profile(n: usize, design_snr: f64) -> Arc<ReliabilityProfile> {
    Arc::new(build_profile(n, &GaParams::from_design_snr(design_snr).unwrap()).unwrap())
}

fn ga_ordering() -> Outcome {
    let mut o = Outcome::new();
    let rank = profile(8, 0.0).rank.clone();
    o.check(
        rank == [8, 4, 6, 7, 2, 3, 5, 1],
        format!("rank {rank:?} against [8, 4, 6, 7, 2, 3, 5, 1]"),
    );
    o
}

/// `F^{(x) l}` built directly from the Kronecker definition.
fn kronecker_power(l: u32) -> Vec<Vec<u8>> {
    let mut g = vec![vec![1u8]];
    for _ in 0..l {
        let m = g.len();
        let mut next = vec![vec![0u8; 2 * m]; 2 * m];
        for r in 0..m {
            for c in 0..m {
                next[r][c] = g[r][c];
                next[m + r][c] = g[r][c];
                next[m + r][m + c] = g[r][c];
            }
        }
        g = next;
    }
    g
}

fn pd_example() -> Outcome {
    let mut o = Outcome::new();
    let p = generate_pattern(Method::Pd, &profile(8, 0.0), 5).unwrap();
    o.check(p.indices() == [8, 4, 6], format!("p = {:?}", p.indices()));
    o.check(validate_pattern(&p).is_ok(), "validate_pattern accepts p");
    let g = reduce_generator(8, &p).unwrap();
    let f = kronecker_power(3);
    let keep: Vec<usize> = (0..8).filter(|i| ![3, 5, 7].contains(i)).collect();
    let mut same = g.rows() == 5 && g.cols() == 5;
    for (r, &kr) in keep.iter().enumerate() {
        for (c, &kc) in keep.iter().enumerate() {
            same &= g.get(r, c) == f[kr][kc];
        }
    }
    o.check(
        same,
        "reduced generator is F^3 without rows/columns 4, 6, 8",
    );
    o
}

fn spectrum_example() -> Outcome {
    let mut o = Outcome::new();
    let full = build_spectrum(4, None).unwrap();
    o.check(
        full.zero_coeffs == [1, 4, 6, 4, 1] && lambda_sd(&full) == Ratio::from_integer(2),
        format!(
            "unshortened {:?}, lambda {}",
            full.zero_coeffs,
            lambda_sd(&full)
        ),
    );
    let short = polarshort::spectrum::spectrum_without(4, &[13, 14, 15, 16]).unwrap();
    o.check(
        short.zero_coeffs == [0, 2, 5, 4, 1] && lambda_sd(&short) == Ratio::new(7, 4),
        format!(
            "tail of four {:?}, lambda {}",
            short.zero_coeffs,
            lambda_sd(&short)
        ),
    );
    o
}

fn table_two() -> Outcome {
    let mut o = Outcome::new();
    for (l, n_short, reference) in [
        (9u32, 480usize, [4.53, 4.46, 4.43]),
        (11, 1920, [5.46, 5.44, 5.43]),
    ] {
        let n = 1usize << l;
        let cmp = compare_methods(l, n_short, &profile(n, 0.0), 0.5).unwrap();
        let lam = |m| cmp.get(m).unwrap().lambda;
        let (pd, rq, cw) = (lam(Method::Pd), lam(Method::Rqup), lam(Method::Cw));
        o.check(
            pd > rq,
            format!("n={n} n'={n_short}: lambda PD {pd} > RQUP {rq}"),
        );
        o.check(
            pd > cw,
            format!("n={n} n'={n_short}: lambda PD {pd} > CW {cw}"),
        );
        for (m, r) in [Method::Pd, Method::Rqup, Method::Cw]
            .into_iter()
            .zip(reference)
        {
            let s = cmp.get(m).unwrap();
            o.note(format!(
                "{m:<4} lambda {:.4} (per surviving path {:.4}), reference {r}",
                exact_f64(&s.lambda),
                exact_f64(&s.lambda_surviving)
            ));
        }
    }
    o
}

/// Eb/N0 where the FER curve crosses `target`, linear in log FER. Outside
/// the simulated range the last two usable points are extended.
fn crossing(points: &[SimPoint], target: f64) -> Option<(f64, bool)> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.frame_errors > 0)
        .map(|p| (p.ebn0_db, p.fer.log10()))
        .collect();
    if usable.len() < 2 {
        return None;
    }
    let t = target.log10();
    let lerp = |(x0, y0): (f64, f64), (x1, y1): (f64, f64)| {
        (y1 != y0).then(|| x0 + (t - y0) * (x1 - x0) / (y1 - y0))
    };
    for w in usable.windows(2) {
        if (w[0].1 - t) * (w[1].1 - t) <= 0.0 {
            return lerp(w[0], w[1]).map(|e| (e, false));
        }
    }
    let ends = if usable[0].1 < t {
        (usable[0], usable[1])
    } else {
        (usable[usable.len() - 2], usable[usable.len() - 1])
    };
    lerp(ends.0, ends.1).map(|e| (e, true))
}

fn describe(e: Option<(f64, bool)>) -> String {
    match e {
        Some((v, false)) => format!("{v:.3} dB"),
        Some((v, true)) => format!("{v:.3} dB (extrapolated)"),
        None => "not reached".into(),
    }
}

struct Curves {
    methods: Vec<(&'static str, CodeSpec, Vec<SimPoint>)>,
}

impl Curves {
    fn run(n: usize, n_short: usize, k: usize, design: f64, ebn0: &[f64], stop: &StopRule) -> Self {
        let prof = profile(n, design);
        let mut methods = Vec::new();
        for (name, method) in [
            ("PD", Method::Pd),
            ("CW", Method::Cw),
            ("RQUP", Method::Rqup),
        ] {
            methods.push((
                name,
                build_code_spec(prof.clone(), n_short, k, method).unwrap(),
            ));
        }
        methods.push(("mother", CodeSpec::mother(prof, k).unwrap()));
        let methods = methods
            .into_iter()
            .map(|(name, spec)| {
                let points = run_sweep(&spec, ebn0, stop, 2024).unwrap().points;
                (name, spec, points)
            })
            .collect();
        Self { methods }
    }

    fn get(&self, name: &str) -> &[SimPoint] {
        &self.methods.iter().find(|m| m.0 == name).unwrap().2
    }

    fn report(&self, o: &mut Outcome) {
        for (name, spec, points) in &self.methods {
            for p in points {
                o.note(format!(
                    "{name:<6} n'={} {:.2} dB frames {:>6} FER {:.3e} +- {:.1e}  BER {:.3e} +- {:.1e}",
                    spec.n_short,
                    p.ebn0_db,
                    p.frames,
                    p.fer,
                    p.ci95_fer(),
                    p.ber,
                    p.ci95_ber
                ));
            }
        }
        let mother = &self.methods.iter().find(|m| m.0 == "mother").unwrap().1;
        for (name, spec, _) in &self.methods[..3] {
            let lost = spec
                .shortening()
                .indices()
                .iter()
                .filter(|&&i| !mother.frozen()[i - 1])
                .count();
            o.note(format!(
                "{name}: {lost} of {} shortened channels carry information in the unshortened code",
                spec.shortening().len()
            ));
        }
    }

    /// PD against one baseline at the points where either curve is below
    /// `fer_cap`: both error rates no worse, and at least one point where
    /// the 95% intervals separate in PD's favour.
    fn ordering(&self, o: &mut Outcome, baseline: &str, fer_cap: f64, fer_floor: f64) {
        let pd = self.get("PD");
        let base = self.get(baseline);
        let mut compared = 0;
        let mut separated = false;
        for (a, b) in pd.iter().zip(base) {
            let lo = a.fer.min(b.fer);
            if lo >= fer_cap || lo < fer_floor {
                continue;
            }
            compared += 1;
            o.check(
                a.ber <= b.ber && a.fer <= b.fer,
                format!(
                    "{:.2} dB PD vs {baseline}: BER {:.3e} vs {:.3e}, FER {:.3e} vs {:.3e}",
                    a.ebn0_db, a.ber, b.ber, a.fer, b.fer
                ),
            );
            let ber_apart = a.ber + a.ci95_ber < b.ber - b.ci95_ber;
            let fer_apart = a.fer + a.ci95_fer() < b.fer - b.ci95_fer();
            separated |= ber_apart || fer_apart;
        }
        o.check(
            compared > 0,
            format!("{compared} points compared against {baseline}"),
        );
        o.check(
            separated,
            format!("PD better than {baseline} with separated 95% intervals somewhere"),
        );
    }
}

fn fig_two() -> Outcome {
    let mut o = Outcome::new();
    let stop = StopRule::new(100, 200_000).unwrap();
    let curves = Curves::run(512, 480, 256, 0.0, &[1.0, 1.5, 2.0, 2.5, 3.0], &stop);
    curves.report(&mut o);
    curves.ordering(&mut o, "CW", 0.1, 0.0);
    curves.ordering(&mut o, "RQUP", 0.1, 0.0);
    let at = |name| crossing(curves.get(name), 1e-2);
    let (pd, cw, mother) = (at("PD"), at("CW"), at("mother"));
    o.note(format!(
        "Eb/N0 at FER 1e-2: PD {}, CW {}, RQUP {}, mother {}",
        describe(pd),
        describe(cw),
        describe(at("RQUP")),
        describe(mother)
    ));
    match (pd, cw) {
        (Some((p, _)), Some((c, _))) => {
            let gap = c - p;
            o.check(
                gap > 0.0 && gap <= 0.5,
                format!("E(CW) - E(PD) = {gap:.3} dB in (0, 0.5]"),
            );
        }
        _ => o.check(false, "E(CW) - E(PD) undefined"),
    }
    match (pd, mother) {
        (Some((p, _)), Some((m, _))) => {
            let gap = p - m;
            o.check(
                gap.abs() <= 0.5,
                format!("E(PD) - E(mother) = {gap:.3} dB within 0.5"),
            );
        }
        _ => o.check(false, "E(PD) - E(mother) undefined"),
    }
    o
}

fn fig_three() -> Outcome {
    let mut o = Outcome::new();
    o.note("design SNR 4 dB (at 0 dB the unshortened k=1600 code has FER near 1 up to 6 dB)");
    let stop = StopRule::new(100, 200_000).unwrap();
    let curves = Curves::run(2048, 1920, 1600, 4.0, &[4.0, 4.25, 4.5, 4.75], &stop);
    curves.report(&mut o);
    curves.ordering(&mut o, "CW", 0.1, 0.005);
    curves.ordering(&mut o, "RQUP", 0.1, 0.005);
    o
}

fn ml_sanity() -> Outcome {
    let mut o = Outcome::new();
    let spec = CodeSpec::mother(profile(8, 0.0), 4).unwrap();
    let ml = MlDecoder::new(&spec).unwrap();
    let mut sc = ScDecoder::new(&spec);
    let mut clean = true;
    for v in 0u8..16 {
        let msg: Vec<u8> = (0..4).map(|i| (v >> (3 - i)) & 1).collect();
        let cw = encode(&msg, &spec).unwrap();
        let ch: Vec<f64> = cw
            .bits
            .iter()
            .map(|&b| if b == 0 { LLR_MAX } else { -LLR_MAX })
            .collect();
        let llrs = LlrVector::new(ch).unwrap();
        clean &= sc.decode(&llrs).unwrap().msg == msg && ml.decode(&llrs).unwrap() == msg;
    }
    o.check(clean, "SC and ML decode all 16 noiseless codewords");
    let sigma = ChannelParams::new(2.0, spec.rate()).unwrap().sigma;
    let (mut sc_err, mut ml_err) = (0u64, 0u64);
    let mut msg = vec![0u8; 4];
    let frames = 100_000u64;
    for f in 0..frames {
        let mut stream = RandomStream::for_frame(99, f);
        stream.bits(&mut msg);
        let cw = encode(&msg, &spec).unwrap();
        let y = transmit(&modulate(&cw.bits), sigma, &mut stream);
        let llrs = expand_llrs(&channel_llrs(&y, sigma), &spec).unwrap();
        sc_err += (sc.decode(&llrs).unwrap().msg != msg) as u64;
        ml_err += (ml.decode(&llrs).unwrap() != msg) as u64;
    }
    let (fs, fm) = (sc_err as f64 / frames as f64, ml_err as f64 / frames as f64);
    o.check(
        fs >= fm,
        format!("FER SC {fs:.4e} >= FER ML {fm:.4e} over {frames} frames"),
    );
    o
}

/// Path spectrum by walking the tree; leaves are reached in recursion
/// order and removed through their bit-reversed index.
fn brute_spectrum(l: u32, removed: &[bool]) -> Vec<u64> {
    let mut zeros = vec![0u64; l as usize + 1];
    let mut stack = vec![(0u32, 0usize, 0usize)];
    while let Some((depth, index, z)) = stack.pop() {
        if depth == l {
            if !removed[bit_reverse_index(index, l)] {
                zeros[z] += 1;
            }
            continue;
        }
        stack.push((depth + 1, 2 * index, z + 1));
        stack.push((depth + 1, 2 * index + 1, z));
    }
    zeros
}

fn invariants() -> Outcome {
    let mut o = Outcome::new();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let profiles: Vec<_> = (3..=11u32).map(|l| profile(1 << l, 0.0)).collect();

    let mut valid = 0;
    let mut cases = 0;
    for _ in 0..100 {
        let prof = &profiles[rng.random_range(0..profiles.len())];
        let n = prof.n;
        let n_short = rng.random_range(n / 2 + 1..n);
        for method in Method::GENERATED {
            let p = generate_pattern(method, prof, n_short).unwrap();
            cases += 1;
            valid += (validate_pattern(&p).is_ok() && p.len() + n_short == n) as usize;
        }
    }
    o.check(
        valid == cases && cases >= 200,
        format!("{valid}/{cases} sampled patterns valid"),
    );

    let mut specs = 0;
    let mut failures = 0;
    for _ in 0..45 {
        let prof = &profiles[rng.random_range(0..profiles.len())];
        let n = prof.n;
        let n_short = rng.random_range(n / 2 + 1..n);
        let k = rng.random_range(0..=n_short);
        let method = Method::GENERATED[rng.random_range(0..3)];
        let spec = build_code_spec(prof.clone(), n_short, k, method).unwrap();
        let mut dec = ScDecoder::new(&spec);
        let mut msg = vec![0u8; k];
        for _ in 0..1000 {
            msg.iter_mut().for_each(|b| *b = rng.random_range(0..2));
            let cw = encode(&msg, &spec).unwrap();
            let ch: Vec<f64> = cw
                .bits
                .iter()
                .map(|&b| if b == 0 { LLR_MAX } else { -LLR_MAX })
                .collect();
            let out = dec.decode(&expand_llrs(&ch, &spec).unwrap()).unwrap();
            failures += (out.msg != msg) as usize;
        }
        specs += 1;
    }
    o.check(
        failures == 0,
        format!("noiseless roundtrip: {failures} failures over {specs} specs x 1000 messages"),
    );

    let mut agree = true;
    let mut checked = 0;
    for l in 1..=12u32 {
        let n = 1usize << l;
        let prof = build_profile(n, &GaParams::default()).unwrap();
        for _ in 0..4 {
            let n_short = if n == 2 {
                2
            } else {
                rng.random_range(n / 2 + 1..=n)
            };
            for method in Method::GENERATED {
                let p = generate_pattern(method, &prof, n_short).unwrap();
                let mask = p.mask();
                agree &=
                    build_spectrum(l, Some(&p)).unwrap().zero_coeffs == brute_spectrum(l, &mask);
                checked += 1;
            }
        }
    }
    o.check(
        agree,
        format!("spectrum matches tree enumeration on {checked} patterns, l <= 12"),
    );

    for snr in 0..=6u64 {
        let ebn0 = snr as f64;
        let p = run_uncoded(ebn0, 1000, 1000, 40 + snr).unwrap();
        let want = q_function((2.0 * 10f64.powf(ebn0 / 10.0)).sqrt());
        let se = (want * (1.0 - want) / (p.frames * 1000) as f64).sqrt();
        let z = (p.ber - want) / se;
        o.check(
            z.abs() <= 3.0,
            format!(
                "uncoded {ebn0} dB: BER {:.4e} vs Q {want:.4e} ({z:+.2} SE)",
                p.ber
            ),
        );
    }
    o
}

fn main() -> ExitCode {
    let mins = |m: u64| Duration::from_secs(60 * m);
    let results = [
        criterion(1, "GA ordering", Duration::from_secs(1), ga_ordering),
        criterion(2, "PD pattern example", Duration::from_secs(1), pd_example),
        criterion(
            3,
            "spectrum worked example",
            Duration::from_secs(1),
            spectrum_example,
        ),
        criterion(
            4,
            "spectrum distance ordering",
            Duration::from_secs(5),
            table_two,
        ),
        criterion(5, "n=512 n'=480 k=256 error rates", mins(15), fig_two),
        criterion(6, "n=2048 n'=1920 k=1600 error rates", mins(20), fig_three),
        criterion(7, "SC against ML", mins(2), ml_sanity),
        criterion(8, "invariant suites", mins(10), invariants),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
