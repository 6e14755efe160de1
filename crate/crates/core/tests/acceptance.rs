//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero when any criterion fails.

use std::cell::RefCell;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use pwframe::frame::{self, FrameParams, Kind};
use pwframe::localization::{self, AsymParams, Regime, UcReport};
use pwframe::oracle::{self, Moment, ThetaParams};
use pwframe::transform;
use pwframe::{FourierSeq, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

thread_local! {
    static SEEN_UC: RefCell<Vec<(String, f64)>> = const { RefCell::new(Vec::new()) };
}

fn record(label: String, r: Result<UcReport>) -> Option<f64> {
    match r {
        Ok(rep) => {
            SEEN_UC.with(|s| s.borrow_mut().push((label, rep.uc)));
            Some(rep.uc)
        }
        Err(_) => None,
    }
}

fn uc(a: f64, j: u32, kind: Kind) -> Option<f64> {
    let p = FrameParams::new(a, j).ok()?;
    record(format!("{kind} a={a} j={j}"), localization::uc_of(&p, kind))
}

fn random_poly(rng: &mut ChaCha8Rng, degree: i64) -> FourierSeq {
    FourierSeq::from_fn(-degree, degree, |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
    .unwrap()
}

fn polys(count: usize, seed: u64) -> Vec<FourierSeq> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let degree = rng.random_range(1..=64);
            random_poly(&mut rng, degree)
        })
        .collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn table_regression() -> Outcome {
    let cells: [(f64, u32, f64, f64); 6] = [
        (100.0, 10, 0.500124, 5e-6),
        (1000.0, 10, 0.500013, 5e-6),
        (1.1, 1_000_000, 1.497, 2e-3),
        (1.1, 2_000_000, 1.498, 2e-3),
        (1.01, 500_000, 1.496, 2e-3),
        (1.01, 1_000_000, 1.497, 2e-3),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, j, expected, tol) in cells {
        let start = Instant::now();
        let got = uc(a, j, Kind::Wavelet);
        let secs = start.elapsed().as_secs_f64();
        let ok = matches!(got, Some(v) if (v - expected).abs() <= tol) && secs < 1.0;
        pass &= ok;
        parts.push(format!(
            "(a={a}, j={j}) {} vs {expected} [{}] {secs:.3}s",
            got.map_or("undefined".into(), |v| format!("{v:.6}")),
            if ok { "ok" } else { "off" }
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn uep_suite() -> Outcome {
    let start = Instant::now();
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for a in [1.1, 2.0, 10.0, 100.0] {
        for j in 1..=12u32 {
            let r = frame::verify_uep(&FrameParams::new(a, j).unwrap()).unwrap();
            worst.0 = worst.0.max(r.max_row_defect);
            worst.1 = worst.1.max(r.max_cross_defect);
            worst.2 = worst.2.max(r.max_refine_defect);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst.0 < 1e-12 && worst.1 < 1e-12 && worst.2 < 1e-12 && secs < 10.0;
    Outcome {
        pass,
        detail: format!("row {:.2e}, cross {:.2e}, refine {:.2e}, {secs:.2}s", worst.0, worst.1, worst.2),
    }
}

fn cascade_parseval() -> Outcome {
    let a = 2.0;
    let fs = polys(100, 2024);
    let mut cascade = 0.0f64;
    let mut telescoping = 0.0f64;
    let mut monotone = true;
    for f in &fs {
        for j in 1..=10u32 {
            cascade = cascade.max(transform::cascade_defect(f, &FrameParams::new(a, j).unwrap()).unwrap());
        }
        telescoping = telescoping.max(transform::parseval_defect(f, a, 12).unwrap().telescoping);
        let completeness: Vec<f64> = (6..=14u32)
            .map(|big_j| transform::parseval_defect(f, a, big_j).unwrap().completeness)
            .collect();
        monotone &= completeness.windows(2).all(|w| w[1] < w[0]);
    }
    Outcome {
        pass: cascade < 1e-10 && telescoping < 1e-10 && monotone,
        detail: format!("cascade {cascade:.2e}, telescoping {telescoping:.2e}, completeness decreasing: {monotone}"),
    }
}

fn limit_trends() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();

    let js = [100u32, 1000, 10_000, 100_000];
    let in_j: Vec<Option<f64>> = js.iter().map(|&j| uc(2.0, j, Kind::Wavelet)).collect();
    let inc = in_j.windows(2).all(|w| matches!((w[0], w[1]), (Some(x), Some(y)) if y > x));
    let near = matches!(in_j[3], Some(v) if (v - 1.5).abs() < 0.05);
    pass &= inc && near;
    parts.push(format!("wavelet a=2 over j {:?}: increasing {inc}, |uc-1.5|<0.05 {near}", fmt_list(&in_j)));

    let as_ = [10.0, 100.0, 1000.0];
    let in_a: Vec<Option<f64>> = as_.iter().map(|&a| uc(a, 10, Kind::Wavelet)).collect();
    let dec = in_a.windows(2).all(|w| matches!((w[0], w[1]), (Some(x), Some(y)) if y < x));
    let near = matches!(in_a[2], Some(v) if (v - 0.5).abs() < 0.01);
    pass &= dec && near;
    parts.push(format!("wavelet j=10 over a {:?}: decreasing {dec}, |uc-0.5|<0.01 {near}", fmt_list(&in_a)));

    let mut misses = Vec::new();
    for &(a, j) in &[
        (10_000.0, 1u32),
        (5_000.0, 2),
        (2_000.0, 5),
        (1_000.0, 10),
        (100.0, 100),
        (10.0, 1000),
        (1.01, 10_000),
        (2.0, 50_000),
        (1e5, 1),
        (1e5, 3),
        (1e4, 10),
    ] {
        let v = uc(a, j, Kind::Scaling);
        if !matches!(v, Some(x) if (x - 0.5).abs() < 0.01) {
            misses.push(format!(
                "(a={a}, j={j}) {}",
                v.map_or("undefined".into(), |x| format!("{x:.6}"))
            ));
        }
    }
    pass &= misses.is_empty();
    parts.push(if misses.is_empty() {
        "scaling within 0.01 of 0.5 for all j*a >= 1e4".to_string()
    } else {
        format!("scaling misses 0.01 band with j*a >= 1e4 at {}", misses.join(", "))
    });
    Outcome { pass, detail: parts.join("; ") }
}

fn fmt_list(v: &[Option<f64>]) -> Vec<String> {
    v.iter().map(|x| x.map_or("undefined".into(), |y| format!("{y:.6}"))).collect()
}

fn theta_agreement() -> Outcome {
    let mut worst = 0.0f64;
    for &(alpha, beta, gamma) in &[(1.0, 0.0, 0.0), (2.0, 2.0, 1.0)] {
        for m in 0..=2u32 {
            for i in 0..=40 {
                let b = 10f64.powf(-4.0 + 4.0 * i as f64 / 40.0);
                let p = ThetaParams::new(alpha, beta, gamma, b, m).unwrap();
                let d = oracle::theta_direct(&p);
                let s = oracle::theta_poisson(&p).unwrap();
                worst = worst.max((d - s).abs() / d.abs());
            }
        }
    }
    Outcome { pass: worst < 1e-12, detail: format!("max relative gap {worst:.2e}") }
}

fn closed_eta(p: &FrameParams) -> UcReport {
    let r = localization::uc_closed_form(p, Kind::Wavelet).unwrap();
    record(format!("closed eta a={} j={}", p.a, p.j), Ok(r));
    r
}

fn asymptotics() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();

    let mut norm_gap = 0.0f64;
    for j in [9_999u32, 99_999] {
        let fp = FrameParams::new(2.0, j).unwrap();
        let p = AsymParams::from_level(j, 2.0).unwrap();
        let d = oracle::eta_moment_direct(&fp, Moment::Norm).unwrap();
        norm_gap = norm_gap.max((d.ratio(&localization::asym_norm_sq(&p)) - 1.0).abs());
    }
    pass &= norm_gap < 1e-4;
    parts.push(format!("norm ratio gap {norm_gap:.2e}"));

    let fp = FrameParams::new(2.0, 99_999).unwrap();
    let p = AsymParams::from_level(fp.j, fp.a).unwrap();
    let var_f = closed_eta(&fp).var_f;
    let freq_gap = (var_f / localization::asym_freq_var(&p, Regime::HToZero) - 1.0).abs();
    pass &= freq_gap < 1e-3;
    parts.push(format!("freq-var ratio gap {freq_gap:.2e}"));

    let tau_d = oracle::eta_moment_direct(&fp, Moment::Tau).unwrap();
    let tau_h = (tau_d.ratio(&localization::asym_tau(&p, Regime::HToZero)) - 1.0).abs();
    pass &= tau_h < 1e-3;
    parts.push(format!("tau h-branch ratio gap {tau_h:.2e}"));

    let fp = FrameParams::new(1e5, 9).unwrap();
    let p = AsymParams::from_level(fp.j, fp.a).unwrap();
    let tau_d = oracle::eta_moment_direct(&fp, Moment::Tau).unwrap();
    let tau_q = (tau_d.ratio(&localization::asym_tau(&p, Regime::QToZero)) - 1.0).abs();
    pass &= tau_q < 1e-3;
    parts.push(format!("tau q-branch ratio gap {tau_q:.2e}"));

    Outcome { pass, detail: parts.join("; ") }
}

fn homogeneity_and_truncation() -> Outcome {
    let mut scale_gap = 0.0f64;
    let mut trunc_gap = 0.0f64;
    for &(a, j, kind) in &[
        (2.0, 3u32, Kind::Wavelet),
        (10.0, 6, Kind::Wavelet),
        (100.0, 10, Kind::Wavelet),
        (1.1, 2, Kind::Scaling),
        (50.0, 8, Kind::Scaling),
    ] {
        let p = FrameParams::new(a, j).unwrap();
        let seq = frame::build_seq(&p, kind).unwrap();
        let base = record(format!("{kind} a={a} j={j}"), localization::breitenberger_uc(&seq)).unwrap();
        for alpha in [Complex64::new(1e-8, 0.0), Complex64::new(-3.0, 4.0), Complex64::new(0.0, 1e7)] {
            let v = record(format!("scaled {kind} a={a} j={j}"), localization::breitenberger_uc(&seq.scaled(alpha))).unwrap();
            scale_gap = scale_gap.max((v - base).abs() / base);
        }
        let loose = localization::uc_of(&FrameParams::with_epsilon(a, j, 1e-16).unwrap(), kind);
        let tight = localization::uc_of(&FrameParams::with_epsilon(a, j, 1e-18).unwrap(), kind);
        let (u1, u2) = (record("loose".into(), loose).unwrap(), record("tight".into(), tight).unwrap());
        trunc_gap = trunc_gap.max((u1 - u2).abs() / u1);
    }
    Outcome {
        pass: scale_gap < 1e-12 && trunc_gap < 1e-9,
        detail: format!("scaling gap {scale_gap:.2e}, epsilon 1e-16 -> 1e-18 gap {trunc_gap:.2e}"),
    }
}

fn round_trip() -> Outcome {
    let a = 2.0;
    let fs = polys(20, 77);
    let mut worst_top = 0.0f64;
    let mut decreasing = true;
    for f in &fs {
        let errs: Vec<f64> = (10..=14u32).map(|j| transform::roundtrip_error(f, a, j).unwrap()).collect();
        decreasing &= errs.windows(2).all(|w| w[1] < w[0]);
        worst_top = worst_top.max(errs[4]);
    }
    Outcome {
        pass: worst_top < 1e-3 && decreasing,
        detail: format!("max error at J=14 {worst_top:.3e} (bound 1e-3), strictly decreasing in J: {decreasing}"),
    }
}

fn lower_bound() -> Outcome {
    // run after every other criterion so that all computed constants are seen
    SEEN_UC.with(|s| {
        let s = s.borrow();
        let below: Vec<_> = s.iter().filter(|(_, v)| !(*v > 0.5)).collect();
        Outcome {
            pass: below.is_empty() && !s.is_empty(),
            detail: if below.is_empty() {
                format!("{} constants, minimum {:.9}", s.len(), s.iter().map(|x| x.1).fold(f64::INFINITY, f64::min))
            } else {
                format!("not above 1/2: {below:?}")
            },
        }
    })
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "table regression", table_regression),
        (2, "UEP identities", uep_suite),
        (3, "cascade and Parseval", cascade_parseval),
        (4, "limit trends", limit_trends),
        (6, "Poisson oracle", theta_agreement),
        (7, "asymptotic formulas", asymptotics),
        (8, "homogeneity and truncation", homogeneity_and_truncation),
        (9, "transform round trip", round_trip),
    ];
    let mut results: Vec<(u32, &str, Outcome)> = criteria.iter().map(|(n, name, f)| (*n, *name, f())).collect();
    results.push((5, "UC lower bound", lower_bound()));
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (n, name, o) in &results {
        println!("criterion {n} ({name}): {} | {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
