//! Acceptance criteria. Run with
//! `cargo test -p oamcapture --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::time::{Duration, Instant};

use num_bigint::Sign;
use num_rational::BigRational;
use num_traits::One;
use rayon::prelude::*;

use oamcapture::am_algebra::{cg, HalfInt, QuadRational, SqrtRational};
use oamcapture::cross_sections::{
    oam_closed_form, oam_oracle, reconcile, rose_closed_form, rose_oracle, CaptureModel, Channel,
    Mode, Parity,
};
use oamcapture::experiment::{
    expected_observations, fit_k, fit_observations, simulate_counts, FitMode, FitOptions,
    MeasurementSetting, Weighting,
};
use oamcapture::kinematics::{check_kinematics, ReactionKinematics};
use oamcapture::numeric::{int, ratio};
use oamcapture::polarization::{axis_points, PolarizationTriple};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn oam(j: i32) -> Channel {
    Channel::new(HalfInt::integer(j), Parity::Odd)
}

fn ord(j: i32) -> Channel {
    Channel::new(HalfInt::integer(j), Parity::Even)
}

fn pol(p: BigRational, p_l: BigRational, p_n: BigRational) -> PolarizationTriple {
    PolarizationTriple::new(p, p_l, p_n).unwrap()
}

fn q(a: BigRational, b: BigRational) -> QuadRational {
    QuadRational::new(a, b)
}

fn ac1_rose_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let axis = axis_points(9).map_err(|e| e.to_string())?;
    let model = CaptureModel::unit(Mode::Ordinary);
    let mut checked = 0;
    for p in &axis {
        for p_n in &axis {
            let x = pol(p.clone(), int(0), p_n.clone());
            for c in Mode::Ordinary.channels() {
                let closed = rose_closed_form(c, &x, &model).unwrap().value;
                let oracle = rose_oracle(c, &x, &model).unwrap().value;
                ensure(closed == oracle, || {
                    format!("{c} at {x}: {closed} vs {oracle}")
                })?;
                checked += 1;
            }
        }
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok(format!(
        "{checked} exact comparisons on the 9x9 (p, P_N) grid in {:?}",
        start.elapsed()
    ))
}

/// Affine coefficients `(c0, c_pPL, c_pPN, c_PLPN)` of the oracle, probed at
/// settings that switch on one pairwise product at a time.
fn oracle_affine_coefficients(channel: Channel) -> [QuadRational; 4] {
    let model = CaptureModel::unit(Mode::Oam);
    let at = |p, l, n| {
        oam_oracle(channel, &pol(int(p), int(l), int(n)), &model)
            .unwrap()
            .value
    };
    let c0 = at(0, 0, 0);
    [
        c0.clone(),
        at(1, 1, 0) - c0.clone(),
        at(1, 0, 1) - c0.clone(),
        at(0, 1, 1) - c0,
    ]
}

fn ac2_oam_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let model = CaptureModel::unit(Mode::Oam);
    let grid = PolarizationTriple::grid(5).unwrap();
    let mut checked = 0;
    for x in &grid {
        for c in [oam(0), oam(1)] {
            let closed = oam_closed_form(c, x, &model).unwrap().value;
            let oracle = oam_oracle(c, x, &model).unwrap().value;
            ensure(closed == oracle, || {
                format!("{c} at {x}: {closed} vs {oracle}")
            })?;
            checked += 1;
        }
    }
    // Bracket sigma_1 = K/24 [A(1-pP_L) + B(1-pP_N) + C(1-P_LP_N)] read off the oracle.
    let coeffs = oracle_affine_coefficients(oam(1));
    let minus24 = int(-24);
    let (a, b, c) = (
        coeffs[1].scale(&minus24),
        coeffs[2].scale(&minus24),
        coeffs[3].scale(&minus24),
    );
    ensure(a == q(int(3), int(0)), || format!("pP_L coefficient {a}"))?;
    ensure(b == q(int(6), int(-4)), || format!("pP_N coefficient {b}"))?;
    ensure(c == q(int(3), int(4)), || format!("P_LP_N coefficient {c}"))?;
    ensure(coeffs[0].scale(&int(24)) == &(&a + &b) + &c, || {
        "constant term is not A + B + C".into()
    })?;
    within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "{checked} exact comparisons on the 5^3 grid; oracle bracket coefficients {a}, {b}, {c} in {:?}",
        start.elapsed()
    ))
}

fn ac3_sigma2_adjudication() -> Outcome {
    let first = reconcile(5).map_err(|e| e.to_string())?;
    let second = reconcile(5).map_err(|e| e.to_string())?;
    let a = serde_json::to_value(&first).unwrap();
    let b = serde_json::to_value(&second).unwrap();
    ensure(a == b, || "verdict differs between runs".into())?;

    let fixture_path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/tests/fixtures/oracle_check_grid5.json"
    );
    if std::env::var_os("UPDATE_FIXTURES").is_some() {
        std::fs::write(
            fixture_path,
            serde_json::to_string_pretty(&a).unwrap() + "\n",
        )
        .unwrap();
    }
    let shipped: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(fixture_path).map_err(|e| format!("{fixture_path}: {e}"))?,
    )
    .unwrap();
    ensure(shipped == a, || {
        "verdict differs from the shipped fixture".into()
    })?;

    let props = first
        .oracle_properties
        .iter()
        .find(|p| p.mode == Mode::Oam)
        .ok_or("no OAM properties")?;
    ensure(props.nonnegative, || {
        "oracle sigma negative somewhere".into()
    })?;
    ensure(props.sign_flip_invariant, || {
        "oracle not sign-flip invariant".into()
    })?;
    ensure(props.unpolarized[&oam(2)] == "5/12", || {
        format!("unpolarized sigma_2 {}", props.unpolarized[&oam(2)])
    })?;

    let sigma2 = first.channels.iter().find(|c| c.channel == oam(2)).unwrap();
    let claims: Vec<String> = first
        .claims
        .iter()
        .filter(|c| c.channel == oam(2))
        .map(|c| {
            format!(
                "{:?}[{}]={}",
                c.kind,
                c.condition,
                if c.supported { "supported" } else { "refuted" }
            )
        })
        .collect();
    Ok(format!(
        "verdict {:?}; printed 2- bracket mismatches oracle at {} of {} points; 2- claims: {}",
        first.verdict,
        sigma2.mismatches,
        sigma2.points,
        claims.join("; ")
    ))
}

fn ac4_coupled_state_table() -> Outcome {
    let h = HalfInt::from_twice;
    let s = |sign, n, d| SqrtRational::new(sign, ratio(n, d)).unwrap();
    // (m_L, mu) -> (amplitude on j'=3/2, amplitude on j'=1/2)
    let rows = [
        ((2, 1), SqrtRational::one(), SqrtRational::zero()),
        ((2, -1), s(Sign::Plus, 1, 3), s(Sign::Plus, 2, 3)),
        ((-2, 1), s(Sign::Plus, 1, 3), s(Sign::Minus, 2, 3)),
        ((-2, -1), SqrtRational::one(), SqrtRational::zero()),
    ];
    for ((m_l, mu), quartet, doublet) in rows {
        let m_prime = h(m_l + mu);
        let got_quartet = cg(h(2), h(m_l), h(1), h(mu), h(3), m_prime).unwrap();
        let got_doublet = if m_prime.twice().abs() <= 1 {
            cg(h(2), h(m_l), h(1), h(mu), h(1), m_prime).unwrap()
        } else {
            SqrtRational::zero()
        };
        ensure(got_quartet == quartet && got_doublet == doublet, || {
            format!("m'={m_prime}: got {got_quartet}, {got_doublet}; want {quartet}, {doublet}")
        })?;
    }
    Ok("4 rows reproduced with signs".into())
}

fn ac5_zero_loci() -> Outcome {
    let axis = axis_points(9).unwrap();
    let ordinary = CaptureModel::unit(Mode::Ordinary);
    let model = CaptureModel::unit(Mode::Oam);
    let mut checked = 0;
    for s in [int(1), int(-1)] {
        let x = pol(s.clone(), int(0), s.clone());
        for v in [
            rose_closed_form(ord(0), &x, &ordinary),
            rose_oracle(ord(0), &x, &ordinary),
        ] {
            ensure(v.unwrap().value.is_zero(), || {
                format!("singlet nonzero at {x}")
            })?;
            checked += 1;
        }
        for free in &axis {
            for x in [
                pol(s.clone(), s.clone(), free.clone()),
                pol(free.clone(), s.clone(), s.clone()),
            ] {
                for v in [
                    oam_closed_form(oam(0), &x, &model),
                    oam_oracle(oam(0), &x, &model),
                ] {
                    ensure(v.unwrap().value.is_zero(), || format!("0- nonzero at {x}"))?;
                    checked += 1;
                }
            }
        }
        let corner = pol(s.clone(), s.clone(), s.clone());
        for v in [
            oam_closed_form(oam(1), &corner, &model),
            oam_oracle(oam(1), &corner, &model),
        ] {
            ensure(v.unwrap().value.is_zero(), || {
                format!("1- nonzero at {corner}")
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} exact zeros (closed form and oracle)"))
}

fn ac6_statistical_weights() -> Outcome {
    let u = PolarizationTriple::unpolarized();
    for k in [int(1), ratio(7, 3)] {
        let model = CaptureModel::new(Mode::Oam, vec![k.clone(); 3]).unwrap();
        for (j, w) in [(0, ratio(1, 12)), (1, ratio(1, 2)), (2, ratio(5, 12))] {
            let want = QuadRational::from_rational(w * &k);
            for v in [
                oam_closed_form(oam(j), &u, &model),
                oam_oracle(oam(j), &u, &model),
            ] {
                let v = v.unwrap().value;
                ensure(v == want, || format!("{}: {v} vs {want}", oam(j)))?;
            }
        }
        let model = CaptureModel::new(Mode::Ordinary, vec![k.clone(); 2]).unwrap();
        for (j, w) in [(0, ratio(1, 4)), (1, ratio(3, 4))] {
            let want = QuadRational::from_rational(w * &k);
            for v in [
                rose_closed_form(ord(j), &u, &model),
                rose_oracle(ord(j), &u, &model),
            ] {
                let v = v.unwrap().value;
                ensure(v == want, || format!("{}: {v} vs {want}", ord(j)))?;
            }
        }
    }
    Ok("(1/12, 1/2, 5/12) K and (1/4, 3/4) K".into())
}

fn ac7_cg_properties() -> Outcome {
    let h = HalfInt::from_twice;
    let one = BigRational::one();
    let mut cases = 0;
    for tj1 in 0i32..=4 {
        for tj2 in 0..=4 {
            let totals: Vec<HalfInt> = ((tj1 - tj2).abs()..=tj1 + tj2).step_by(2).map(h).collect();
            // sum over (J, M) for fixed (m1, m2)
            for m1 in h(tj1).projections() {
                for m2 in h(tj2).projections() {
                    let mut sum = BigRational::from_integer(0.into());
                    for &j in &totals {
                        for m in j.projections() {
                            sum += cg(h(tj1), m1, h(tj2), m2, j, m).unwrap().square();
                        }
                    }
                    ensure(sum == one, || {
                        format!("orthonormality j1={tj1}/2 j2={tj2}/2 m1={m1} m2={m2}")
                    })?;
                    cases += 1;
                }
            }
            // sum over (m1, m2) for fixed (J, M); sign symmetry under m -> -m
            for &j in &totals {
                for m in j.projections() {
                    let mut sum = BigRational::from_integer(0.into());
                    for m1 in h(tj1).projections() {
                        for m2 in h(tj2).projections() {
                            let c = cg(h(tj1), m1, h(tj2), m2, j, m).unwrap();
                            let mirrored = cg(h(tj1), -m1, h(tj2), -m2, j, -m).unwrap();
                            let phase_odd = ((tj1 + tj2 - j.twice()) / 2) % 2 != 0;
                            let expected = if phase_odd { -mirrored } else { mirrored };
                            ensure(c == expected, || {
                                format!(
                                    "symmetry j1={tj1}/2 m1={m1} j2={tj2}/2 m2={m2} J={j} M={m}"
                                )
                            })?;
                            cases += 1;
                            sum += c.square();
                        }
                    }
                    ensure(sum == one, || {
                        format!("completeness j1={tj1}/2 j2={tj2}/2 J={j} M={m}")
                    })?;
                    cases += 1;
                }
            }
        }
    }
    ensure(cases >= 500, || format!("only {cases} cases"))?;
    Ok(format!("{cases} exact cases for j1, j2 <= 2"))
}

const POISSON_SEEDS: u64 = 100;
const POISSON_TOTAL_COUNTS: f64 = 1e6;

fn ac8_fit_recovery() -> Outcome {
    let start = Instant::now();
    let mode = Mode::Oam;

    for (ks, depth) in [([1, 1, 1], 0.1), ([1, 0, 0], 0.1), ([1, 1, 1], 2.0)] {
        let model = CaptureModel::from_i64(mode, &ks).unwrap();
        let settings = MeasurementSetting::grid(5, 1e4, depth).unwrap();
        let obs = expected_observations(&settings, &model).unwrap();
        for fit_mode in [FitMode::Summed, FitMode::Resolved] {
            let fit = fit_observations(&obs, mode, fit_mode).map_err(|e| e.to_string())?;
            for (est, truth) in fit.estimates().iter().zip(ks) {
                let truth = truth as f64;
                let err = if truth == 0.0 {
                    est.abs()
                } else {
                    (est - truth).abs() / truth
                };
                ensure(err <= 1e-10, || {
                    format!("noiseless {ks:?} {fit_mode:?}: {:?}", fit.estimates())
                })?;
            }
        }
    }

    // Poisson: ~10^6 captures over the 5^3 grid, K = (1, 2, 1/2).
    let truth = [1.0, 2.0, 0.5];
    let model = CaptureModel::new(mode, vec![int(1), int(2), ratio(1, 2)]).unwrap();
    let depth = 0.1;
    let unit_exposure = MeasurementSetting::grid(5, 1.0, depth).unwrap();
    let per_unit: f64 = expected_observations(&unit_exposure, &model)
        .unwrap()
        .iter()
        .map(|o| o.captures)
        .sum();
    let settings = MeasurementSetting::grid(5, POISSON_TOTAL_COUNTS / per_unit, depth).unwrap();

    let runs: Vec<_> = (0..POISSON_SEEDS)
        .into_par_iter()
        .map(|seed| simulate_counts(&settings, &model, seed).unwrap())
        .collect();
    let mean_counts =
        runs.iter().flatten().map(|r| r.capture_counts).sum::<u64>() as f64 / POISSON_SEEDS as f64;

    // Only the default fit is gated. Resolved fits are reported: with 1/max(n, 1)
    // weights the sparse per-channel cells pull the estimate low, and the
    // model-weighted variant is calibrated but not tuned to these seeds.
    let configurations = [
        (FitOptions::default(), true),
        (FitOptions::new(FitMode::Resolved, Weighting::Model), false),
        (FitOptions::new(FitMode::Resolved, Weighting::Counts), false),
    ];
    let mut summary = Vec::new();
    for (options, gated) in configurations {
        let fits = runs
            .par_iter()
            .map(|records| fit_k(records, mode, options))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        let mut covered = [0u64; 3];
        for fit in &fits {
            for (i, ((est, sd), t)) in fit
                .estimates()
                .iter()
                .zip(fit.std_errors())
                .zip(truth)
                .enumerate()
            {
                if (est - t).abs() <= 3.0 * sd {
                    covered[i] += 1;
                }
            }
        }
        let label = format!("{:?}/{:?}", options.channels, options.weighting);
        if gated {
            ensure(covered.iter().all(|&c| c >= 99), || {
                format!("{label}: seeds within 3 sd per channel {covered:?} of {POISSON_SEEDS}")
            })?;
            summary.push(format!("{label} {covered:?}"));
        } else {
            summary.push(format!("{label} {covered:?} (informational)"));
        }
    }
    within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!(
        "noiseless exact to 1e-10; coverage of {POISSON_SEEDS} seeds at {mean_counts:.0} counts: {} in {:?}",
        summary.join(", "),
        start.elapsed()
    ))
}

fn ac9_kinematics() -> Outcome {
    let report = check_kinematics(&ReactionKinematics::thermal_capture());
    ensure(report.passed, || format!("{report:?}"))?;
    Ok(report
        .checks
        .iter()
        .map(|c| c.detail.clone())
        .collect::<Vec<_>>()
        .join("; "))
}

fn ac10_determinism() -> Outcome {
    let settings = MeasurementSetting::grid(5, 5e4, 0.3).unwrap();
    let model = CaptureModel::new(Mode::Oam, vec![int(1), int(2), ratio(1, 2)]).unwrap();
    let a = simulate_counts(&settings, &model, 2024).unwrap();
    let b = simulate_counts(&settings, &model, 2024).unwrap();
    ensure(a == b, || "runs differ".into())?;
    Ok(format!("{} records identical across two runs", a.len()))
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 10] = [
        (
            "AC1 ordinary closed form == oracle",
            ac1_rose_oracle_equivalence,
        ),
        (
            "AC2 OAM 0-/1- closed form == oracle",
            ac2_oam_oracle_equivalence,
        ),
        ("AC3 2- adjudication", ac3_sigma2_adjudication),
        ("AC4 coupled-state table", ac4_coupled_state_table),
        ("AC5 zero loci", ac5_zero_loci),
        ("AC6 statistical weights", ac6_statistical_weights),
        ("AC7 CG properties", ac7_cg_properties),
        ("AC8 fit recovery", ac8_fit_recovery),
        ("AC9 kinematics", ac9_kinematics),
        ("AC10 determinism", ac10_determinism),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                println!("FAIL {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
