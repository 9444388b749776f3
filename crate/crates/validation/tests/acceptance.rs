//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::{E, FRAC_PI_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ratcheck_core::capacity::{fekete_points, PointCloud};
use ratcheck_core::contour::{
    cauchy_coeff, find_m0, hankel_bound, iota_capacity_check, make_gamma, symmetrization_check, BoundInputs,
    ContourError, IotaOptions,
};
use ratcheck_core::dfinite::{
    bell_chen_pipeline, ode_continue, ContinueOptions, DFiniteSystem, OdeSystem, PipelineInput, PipelineOptions,
    RationalEntry, RationalMatrix,
};
use ratcheck_core::hankel::{hankel_det, reconstruct_rational};
use ratcheck_core::poly::{BiPoly, IntPoly};
use ratcheck_core::restriction::{criterion_test, hankel_poly, restriction_polys, Verdict};
use ratcheck_core::series::{biseries_from_product, lacunary_series, BiSeries, ExponentRule, IntSeries1D, RationalFn};
use ratcheck_validation::{bound_direct, keyhole_length, poly_mul, series_of, trim};

type Z = Complex<f64>;
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn re(x: f64) -> Z {
    Z::new(x, 0.0)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit_s as f64, || {
        format!("runtime {:.1} s exceeds {limit_s} s", elapsed.as_secs_f64())
    })
}

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| x.into()).collect()
}

fn bp(rows: &[&[i64]]) -> BiPoly {
    BiPoly::new(rows.iter().map(|r| IntPoly::from_i64s(r)).collect())
}

fn one() -> num_rational::BigRational {
    num_rational::BigRational::from_integer(1.into())
}

fn standard_gamma() -> ratcheck_core::GammaContour64 {
    make_gamma(FRAC_PI_2, -FRAC_PI_2, 1.2, 0.05).unwrap()
}

fn lacunary_example(order: usize) -> BiSeries {
    let g = IntSeries1D::from_fn(order, |_| 1.into());
    let h = lacunary_series(&ExponentRule::Factorials, order);
    biseries_from_product(&g, &h, order).unwrap()
}

fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> Vec<i64> {
    let mut v: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-9..=9)).collect();
    while v[deg] == 0 {
        v[deg] = rng.gen_range(-9..=9);
    }
    v
}

fn kronecker_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..20 {
        let dp = rng.gen_range(0..=5);
        let dq = rng.gen_range(0..=5);
        let p = random_poly(&mut rng, dp);
        let mut q = random_poly(&mut rng, dq);
        q[0] = if rng.gen_bool(0.5) { 1 } else { -1 };
        if dq == 0 {
            q.truncate(1);
        }
        let s = dp + dq;
        let a = series_of(&ints(&p), &ints(&q), 2 * (s + 6));
        let series = IntSeries1D::new(a.clone());
        for n in s + 1..=s + 6 {
            let det = hankel_det(&series, n).map_err(|e| e.to_string())?;
            ensure(det.is_zero(), || format!("case {case}: A_{n} = {det} for P={p:?} Q={q:?}"))?;
        }
        let d = dp.max(dq);
        let r = reconstruct_rational(&series, d).map_err(|e| format!("case {case}: {e}"))?;
        // P·Q' = P'·Q, checked with an independent polynomial product
        let lhs = poly_mul(&ints(&p), r.denominator().coeffs());
        let rhs = poly_mul(r.numerator().coeffs(), &ints(&q));
        ensure(lhs == rhs, || format!("case {case}: reconstruction {r:?} differs from P={p:?} Q={q:?}"))?;
        ensure(series_of(r.numerator().coeffs(), r.denominator().coeffs(), a.len() - 1) == a, || {
            format!("case {case}: re-expansion differs")
        })?;
    }
    within(start.elapsed(), 10)?;
    Ok("20 random P/Q: A_n = 0 on [degP+degQ+1, degP+degQ+6], exact round trip".into())
}

fn restriction_exactness() -> Outcome {
    let start = Instant::now();
    let ones = BiSeries::from_fn(8, |_, _| 1.into());
    let fam = restriction_polys(&ones, 1, 8).map_err(|e| e.to_string())?;
    let h1 = hankel_poly(&fam, 1).map_err(|e| e.to_string())?;
    // P_v(1, w) = 1 + w + … + w^v, so H_1 = (1)(1+w+w²) - (1+w)² = -w
    let p = |v: usize| ints(&vec![1; v + 1]);
    let oracle_h1 = trim(
        poly_mul(&p(0), &p(2))
            .iter()
            .zip(poly_mul(&p(1), &p(1)).iter().chain(std::iter::repeat(&BigInt::zero())))
            .map(|(x, y)| x - y)
            .collect(),
    );
    ensure(h1.coeffs() == oracle_h1.as_slice() && oracle_h1 == ints(&[0, -1]), || format!("H_1 = {h1:?}"))?;
    for m in 2..=4 {
        let h = hankel_poly(&fam, m).map_err(|e| e.to_string())?;
        ensure(h.is_zero(), || format!("H_{m} = {h:?} is not identically zero"))?;
    }
    let mut m_hi = 6;
    let witness = loop {
        let order = 40.max(2 * m_hi);
        let rep = criterion_test(&lacunary_example(order), 1, 1, m_hi).map_err(|e| e.to_string())?;
        if let Some(r) = rep.results.iter().find(|r| !r.vanishes) {
            break r.m;
        }
        ensure(m_hi < 12, || "every H_m vanished up to m = 12".into())?;
        m_hi += 1;
    };
    within(start.elapsed(), 30)?;
    Ok(format!("H_1 = -w, H_2..H_4 = 0; lacunary example has H_{witness} != 0"))
}

fn capacity_oracles() -> Outcome {
    let start = Instant::now();
    let circle = PointCloud::circle(re(0.0), 1.0, 512).map_err(|e| e.to_string())?;
    let segment = PointCloud::segment(re(-1.0), re(1.0), 1001).map_err(|e| e.to_string())?;
    let d = |cloud: &PointCloud<f64>, n| fekete_points(cloud, n, 0).map(|f| f.d_n()).map_err(|e| e.to_string());
    let d24 = d(&circle, 24)?;
    ensure((1.0..=1.15).contains(&d24), || format!("circle d_24 = {d24}"))?;
    let d30 = d(&segment, 30)?;
    ensure((0.5..=0.65).contains(&d30), || format!("segment d_30 = {d30}"))?;
    for c in [re(2.0), Z::new(0.0, -3.0)] {
        for (cloud, n, base) in [(&circle, 24, d24), (&segment, 30, d30)] {
            let scaled = d(&cloud.scaled(c).map_err(|e| e.to_string())?, n)?;
            let want = c.norm() * base;
            ensure((scaled - want).abs() <= 1e-9 * want, || format!("d_{n}(cK) = {scaled}, |c|·d_{n}(K) = {want}"))?;
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!("circle d_24 = {d24:.6}, segment d_30 = {d30:.6}, scaling within 1e-9"))
}

fn inverted_contour_certificate() -> Outcome {
    let start = Instant::now();
    let result = iota_capacity_check(&standard_gamma(), 40, 0, IotaOptions::default());
    let elapsed = start.elapsed();
    match result {
        Ok(rep) => {
            within(elapsed, 60)?;
            Ok(format!("d_{} = {:.6} < 0.98", rep.certified_n, rep.certified_d))
        }
        Err(ContourError::NoCertificate { best, threshold, n_max }) => Err(format!(
            "no d_n < {threshold} for n <= {n_max}; best d_n = {best:.6} ({:.1} s)",
            elapsed.as_secs_f64()
        )),
        Err(e) => Err(e.to_string()),
    }
}

fn cauchy_recovery() -> Outcome {
    let gamma = standard_gamma();
    let g = |z: Z| re(1.0) / (re(1.0) - z / 2.0);
    let mut worst: f64 = 0.0;
    for v in 0..=6 {
        let c = cauchy_coeff(&g, &gamma, v).map_err(|e| e.to_string())?;
        let err = (c - re(0.5f64.powi(v as i32))).norm();
        worst = worst.max(err);
        ensure(err <= 1e-8, || format!("v = {v}: {c} vs {}", 0.5f64.powi(v as i32)))?;
    }
    let unit = |_: Z| re(1.0);
    for v in 0..=6 {
        let c = cauchy_coeff(&unit, &gamma, v).map_err(|e| e.to_string())?;
        let want = if v == 0 { 1.0 } else { 0.0 };
        ensure((c - re(want)).norm() <= 1e-10, || format!("g = 1, v = {v}: {c}"))?;
    }
    Ok(format!("max |c_v - 2^-v| = {worst:.2e}; g = 1 residues exact to 1e-10"))
}

fn symmetrization() -> Outcome {
    let gamma = standard_gamma();
    let g1 = |z: Z| re(1.0) / (re(1.0) - z / 2.0);
    let g2 = |z: Z| z;
    let r1 = symmetrization_check(&g1, &gamma, 1).map_err(|e| e.to_string())?;
    let r2 = symmetrization_check(&g2, &gamma, 1).map_err(|e| e.to_string())?;
    ensure(r1.residual < 1e-6 && r2.residual < 1e-6, || {
        format!("residuals {:.2e}, {:.2e}", r1.residual, r2.residual)
    })?;
    Ok(format!("residuals {:.2e} and {:.2e}", r1.residual, r2.residual))
}

fn bound_arithmetic() -> Outcome {
    let (l, m_sup, eta, rho) = (7.1969, 2.0, 0.9, 0.8);
    // the quoted L is the length of the δ = 0.1 keyhole, η = 1 - δ
    let closed = keyhole_length(FRAC_PI_2, -FRAC_PI_2, 1.2, 0.1);
    ensure((closed - l).abs() < 1e-3, || format!("closed-form length {closed}"))?;
    let b = |m| hankel_bound(&BoundInputs { l, m_sup, eta, rho, m }).unwrap();
    let (b1, b2) = (b(1), b(2));
    for (m, v) in [(1, b1), (2, b2)] {
        let d = bound_direct(l, m_sup, eta, rho, m);
        ensure((v - d).abs() <= 1e-12 * d, || format!("bound({m}) = {v}, direct {d}"))?;
    }
    ensure(b1 > 1.0 && b2 < 1.0, || format!("bound(1) = {b1}, bound(2) = {b2}"))?;
    let m0 = find_m0(l, m_sup, eta, rho, 10).map_err(|e| e.to_string())?;
    ensure(m0 == 2, || format!("m0 = {m0}"))?;
    Ok(format!("bound(1) = {b1:.4}, bound(2) = {b2:.4}, m0 = 2"))
}

fn ode_continuation() -> Outcome {
    let opts = ContinueOptions::default();
    let scalar = |e: RationalEntry<f64>, radius: f64| {
        OdeSystem::new(RationalMatrix::new(1, vec![e]).unwrap(), re(0.0), vec![re(1.0)], re(0.0), radius).unwrap()
    };
    let exp = scalar(RationalEntry::constant(re(1.0)), f64::INFINITY);
    let r = ode_continue(&exp, &[re(0.0), re(1.0)], &opts).map_err(|e| e.to_string())?;
    let e_err = (r.end[0] - re(E)).norm();
    ensure(e_err < 1e-10, || format!("e error {e_err:.2e}"))?;

    let rot = RationalMatrix::constant(&[vec![re(0.0), re(-1.0)], vec![re(1.0), re(0.0)]]).unwrap();
    let sys = OdeSystem::new(rot, re(0.0), vec![re(1.0), re(0.0)], re(0.0), f64::INFINITY).unwrap();
    let r = ode_continue(&sys, &[re(0.0), re(FRAC_PI_2)], &opts).map_err(|e| e.to_string())?;
    let rot_err = (r.end[0] - re(FRAC_PI_2.cos())).norm().max((r.end[1] - re(FRAC_PI_2.sin())).norm());
    ensure(rot_err < 1e-9, || format!("(cos, sin) error {rot_err:.2e}"))?;

    // y' = y / (1 - z): two paths to the same endpoint inside the unit disc
    let pole = scalar(RationalEntry::new(vec![re(1.0)], vec![re(1.0), re(-1.0)]).unwrap(), 1.0);
    let end = Z::new(0.6, 0.6);
    let a = ode_continue(&pole, &[re(0.0), re(0.6), end], &opts).map_err(|e| e.to_string())?;
    let b = ode_continue(&pole, &[re(0.0), Z::new(-0.3, 0.5), end], &opts).map_err(|e| e.to_string())?;
    let path_err = (a.end[0] - b.end[0]).norm();
    ensure(path_err < 1e-8, || format!("path difference {path_err:.2e}"))?;

    let err = |h: f64| {
        let o = ContinueOptions { fixed_degree: Some(4), max_step: Some(h), ..Default::default() };
        ode_continue(&exp, &[re(0.0), re(1.0)], &o).map(|r| (r.end[0] - re(E)).norm())
    };
    let (e1, e2) = (err(0.2).map_err(|e| e.to_string())?, err(0.1).map_err(|e| e.to_string())?);
    ensure(e1 / e2 >= 8.0, || format!("step-halving ratio {:.2}", e1 / e2))?;
    Ok(format!(
        "e err {e_err:.1e}, rotation err {rot_err:.1e}, path diff {path_err:.1e}, halving ratio {:.1}",
        e1 / e2
    ))
}

fn pipeline_desk_scale() -> Outcome {
    let start = Instant::now();
    let opts = |order, m_hi| PipelineOptions { n: 1, order, m_lo: 1, m_hi, continuation_demo: true };
    let vars = || vec!["z".to_string(), "w".to_string()];
    let slice_oracle = |den: &[BigInt]| RationalFn::new(IntPoly::from_i64s(&[1]), IntPoly::new(den.to_vec())).unwrap();

    // (1 - z) f_z = f, (1 - w) f_w = f
    let product = DFiniteSystem::new(
        vars(),
        vec![vec![bp(&[&[-1]]), bp(&[&[1], &[-1]])], vec![bp(&[&[-1]]), bp(&[&[1, -1]])]],
        vec![vec![one()]],
    )
    .map_err(|e| e.to_string())?;
    let r = bell_chen_pipeline(&PipelineInput::System(product), opts(30, 4)).map_err(|e| e.to_string())?;
    ensure(r.criterion.verdict == Verdict::RationalEvidence, || format!("product: {:?}", r.criterion.verdict))?;
    // f(z, z) = 1/((1 - z)(1 - z))
    let want = slice_oracle(&poly_mul(&ints(&[1, -1]), &ints(&[1, -1])));
    let got = r.slice.as_ref().map(|s| s.rational.clone());
    ensure(got.as_ref() == Some(&want), || format!("product slice {got:?}"))?;

    // (1 - z - w) f_z = f and the same in w
    let eq = vec![bp(&[&[-1]]), bp(&[&[1, -1], &[-1]])];
    let binomial = DFiniteSystem::new(vars(), vec![eq.clone(), eq], vec![vec![one()]]).map_err(|e| e.to_string())?;
    let r = bell_chen_pipeline(&PipelineInput::System(binomial), opts(30, 4)).map_err(|e| e.to_string())?;
    ensure(r.criterion.verdict == Verdict::RationalEvidence, || format!("binomial: {:?}", r.criterion.verdict))?;
    let want = slice_oracle(&ints(&[1, -2]));
    let got = r.slice.as_ref().map(|s| s.rational.clone());
    ensure(got.as_ref() == Some(&want), || format!("binomial slice {got:?}"))?;

    let r = bell_chen_pipeline(&PipelineInput::Table(lacunary_example(40)), opts(40, 6)).map_err(|e| e.to_string())?;
    ensure(r.criterion.verdict == Verdict::NotRationalEvidence, || format!("lacunary: {:?}", r.criterion.verdict))?;
    within(start.elapsed(), 60)?;
    Ok("product and binomial systems reconstructed; lacunary table rejected".into())
}

fn determinism() -> Outcome {
    let dir = std::env::temp_dir().join(format!("ratcheck-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let runs: [(&str, &str, &[&str]); 3] = [
        ("capacity", r#"{"kind":"gamma","phi":1.5707963267948966,"psi":-1.5707963267948966,"s":1.2,"delta":0.05,"invert":true}"#, &["--n-max", "12", "--seed", "7"]),
        ("criterion", r#"{"kind":"rational","numerator":[[1]],"denominator":[[1,-1],[-1]]}"#, &["--m-hi", "4"]),
        ("dfinite", r#"{"kind":"dfinite","variables":["z","w"],"equations":[[[-1],[1,-1]],[[-1],[1,-1]]],"initials":[[1]]}"#, &["--m-hi", "4"]),
    ];
    for (sub, input, extra) in runs {
        let out = dir.join(format!("{sub}.json"));
        let mut snapshots = Vec::new();
        for _ in 0..2 {
            let mut argv = vec!["ratcheck", sub, "--input", input, "--output", out.to_str().unwrap()];
            argv.extend_from_slice(extra);
            let code = ratcheck_cli::run(argv);
            ensure(code == 0, || format!("{sub} exited with {code}"))?;
            let json = std::fs::read(&out).map_err(|e| e.to_string())?;
            let csv = std::fs::read(out.with_extension("csv")).map_err(|e| e.to_string())?;
            snapshots.push((json, csv));
        }
        ensure(snapshots[0] == snapshots[1], || format!("{sub}: reports differ between runs"))?;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok("capacity (seed 7), criterion and dfinite reports byte-identical across runs".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Kronecker suite", kronecker_suite),
        ("Restriction exactness", restriction_exactness),
        ("Capacity oracles", capacity_oracles),
        ("Inverted-contour certificate", inverted_contour_certificate),
        ("Cauchy recovery", cauchy_recovery),
        ("Symmetrization", symmetrization),
        ("Bound arithmetic", bound_arithmetic),
        ("ODE continuation", ode_continuation),
        ("D-finite pipeline", pipeline_desk_scale),
        ("Determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
