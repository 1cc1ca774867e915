//! End-to-end acceptance suites. Every threshold is pinned below; each
//! suite prints a single `PASS`/`FAIL` line with its runtime, visible with
//! `cargo test --test acceptance -- --nocapture`.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twistor_core::acm_curve::{
    fiber_hilbert_function, ideal_piece_dimension, restrict_to_fiber, same_span, sigma_fiber_image, stratum_check,
    ACMCurve, FiberChart, LinearMatrix,
};
use twistor_core::cohomology::{ellia_stability_check, ideal_cohomology, normal_sheaf_report};
use twistor_core::exact_algebra::{graded_matrix, ExactMatrix, GaussianRational, HomogPoly, MonomialIndex, PolyMatrix};
use twistor_core::pencil::{
    is_injective_pencil, kronecker_reduce, stabilizer_dimension, CanonicalPair, KroneckerReduction, Pencil,
};
use twistor_core::rational_curve::{
    normal_splitting_type, random_rational_curve, stability_check, RationalCurveMap, SplittingType,
};
use twistor_core::reality::make_sigma_invariant_pencil;
use twistor_core::twistor_metric::{fiber_multiplication_operators, fiber_points, flatness_scan, ScanOptions};

// ------------------------------------------------------------ pinned limits

const KRONECKER_PENCILS: usize = 100;
const KRONECKER_BUDGET: Duration = Duration::from_secs(10);
const CURVES_PER_R: u64 = 20;
const CURVE_RS: [usize; 2] = [2, 3];
const STABILITY_BUDGET: Duration = Duration::from_secs(60);
const FIBERS_PER_CURVE: usize = 5;
const RATIONAL_SAMPLES: u64 = 20;
const RATIONAL_DEGREES: [u32; 3] = [3, 4, 5];
const BALANCED_FRACTION: f64 = 0.8;
const RATIONAL_BUDGET: Duration = Duration::from_secs(30);
const METRIC_CHARTS: usize = 10;
const METRIC_SEED: u64 = 2024;
const LINE_GRAM_TOLERANCE: f64 = 1e-8;
const LINE_QUATERNION_TOLERANCE: f64 = 1e-10;
const FLATNESS_TOLERANCE: f64 = 1e-6;
const COMPATIBILITY_TOLERANCE: f64 = 1e-8;
const FIT_TOLERANCE: f64 = 1e-8;
const METRIC_BUDGET: Duration = Duration::from_secs(120);
const INVARIANT_INSTANCES: u64 = 50;
const TRACE_TOLERANCE: f64 = 1e-9;

fn report(criterion: &str, ok: bool, elapsed: Duration, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("{verdict} [{criterion}] {detail} ({:.2} s)", elapsed.as_secs_f64());
}

fn gauss(rng: &mut ChaCha8Rng, bound: i64) -> GaussianRational {
    GaussianRational::from_ints(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound))
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ExactMatrix {
    ExactMatrix::from_fn(rows, cols, |_, _| gauss(rng, 3))
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> ExactMatrix {
    loop {
        let m = ExactMatrix::from_fn(n, n, |_, _| gauss(rng, 2));
        if m.rank() == n {
            return m;
        }
    }
}

fn random_injective_pencil(rng: &mut ChaCha8Rng, r: usize) -> Pencil {
    loop {
        let p = Pencil::new(random_matrix(rng, r + 1, r), random_matrix(rng, r + 1, r)).unwrap();
        if is_injective_pencil(&p) {
            return p;
        }
    }
}

/// A nonzero fiber parameter `(a + bi)/c`.
fn random_t(rng: &mut ChaCha8Rng) -> GaussianRational {
    loop {
        let t = &GaussianRational::from_ints(rng.gen_range(-5..=5), rng.gen_range(-5..=5))
            * &GaussianRational::ratio(1, rng.gen_range(1..=4));
        if !t.is_zero() {
            return t;
        }
    }
}

/// `H(k) = min((k+1)(k+2)/2, r(r+1)/2)` for `k = 0, …, r+2`.
fn expected_hilbert(r: usize) -> Vec<i64> {
    let len = (r * (r + 1) / 2) as i64;
    (0..=r as i64 + 2).map(|k| ((k + 1) * (k + 2) / 2).min(len)).collect()
}

fn sigma_curves() -> &'static (Vec<ACMCurve>, Duration) {
    static CURVES: OnceLock<(Vec<ACMCurve>, Duration)> = OnceLock::new();
    CURVES.get_or_init(|| {
        let start = Instant::now();
        let curves = CURVE_RS
            .iter()
            .flat_map(|&r| (0..CURVES_PER_R).map(move |seed| (r, seed)))
            .map(|(r, seed)| {
                let m = make_sigma_invariant_pencil(r, seed).expect("generation");
                ACMCurve::new(m).certify().expect("generated curves certify")
            })
            .collect();
        (curves, start.elapsed())
    })
}

// ---------------------------------------------------------------- criterion 1

#[test]
fn criterion_1_kronecker_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut failures = Vec::new();
    for i in 0..KRONECKER_PENCILS {
        let r = 1 + i % 6;
        let p = random_injective_pencil(&mut rng, r);
        let red = kronecker_reduce(&p).expect("injective pencils reduce");
        // Coefficient-matrix equality, computed here rather than via `verify`.
        let c = CanonicalPair::new(r);
        let s = &(&red.p * p.a1()) * &red.q;
        let t = &(&red.p * p.a2()) * &red.q;
        if s != c.s || t != c.t || red.p.rank() != r + 1 || red.q.rank() != r {
            failures.push(i);
        }
    }
    let stabilizers: Vec<usize> = (1..=6).map(|r| stabilizer_dimension(&CanonicalPair::new(r))).collect();
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && stabilizers.iter().all(|&d| d == 1) && elapsed < KRONECKER_BUDGET;
    report(
        "1 kronecker",
        ok,
        elapsed,
        &format!("{KRONECKER_PENCILS} pencils, failures {failures:?}, stabilizer dims {stabilizers:?}"),
    );
    assert!(ok);
}

// ------------------------------------------------------------ criteria 2 – 4

#[test]
fn criteria_2_to_4_curve_suites() {
    let (curves, generation) = sigma_curves();

    // 2: vanishing cohomology and stability.
    let start = Instant::now();
    let zero = [0i64; 4];
    let stable = curves.iter().all(|c| {
        let r = c.r() as i64;
        ideal_cohomology(c, r - 1).unwrap() == zero
            && ideal_cohomology(c, r - 2).unwrap() == zero
            && ellia_stability_check(c).unwrap()
    });
    let elapsed = *generation + start.elapsed();
    let ok2 = stable && elapsed < STABILITY_BUDGET;
    report("2 stability", ok2, elapsed, &format!("{} certified σ-invariant curves", curves.len()));

    // 3: dimension counts of the normal sheaf.
    let start = Instant::now();
    let counts_ok = curves.iter().all(|c| {
        let r = c.r();
        let n = normal_sheaf_report(c).unwrap();
        n.h0_n == 2 * r * (r + 1) && n.h0_n_minus1 == r * (r + 1)
    });
    let r2 = curves.iter().find(|c| c.r() == 2).map(|c| normal_sheaf_report(c).unwrap());
    let ok3 = counts_ok && r2.map(|n| (n.h0_n, n.h0_n_minus1)) == Some((12, 6));
    report("3 normal sheaf", ok3, start.elapsed(), "h0(N) = 2r(r+1), h0(N(-1)) = r(r+1)");

    // 4: fibers.
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0usize;
    for c in curves {
        let r = c.r();
        for _ in 0..FIBERS_PER_CURVE {
            let f = restrict_to_fiber(c, FiberChart::Affine(random_t(&mut rng))).unwrap();
            let h = fiber_hilbert_function(&f);
            if f.length() != (r * (r + 1) / 2) as i64 || h.values != expected_hilbert(r) || !stratum_check(&f) {
                bad += 1;
            }
        }
    }
    let ok4 = bad == 0;
    report(
        "4 fibers",
        ok4,
        start.elapsed(),
        &format!("{} fibers, {bad} deviating", curves.len() * FIBERS_PER_CURVE),
    );
    assert!(ok2 && ok3 && ok4);
}

// ---------------------------------------------------------------- criterion 5

#[test]
fn criterion_5_rational_curves() {
    let start = Instant::now();
    let st = |a, b| SplittingType { a, b };
    let line = normal_splitting_type(&RationalCurveMap::rational_normal(1)).unwrap() == st(1, 1);
    let conics = (0..RATIONAL_SAMPLES).all(|seed| {
        let f = random_rational_curve(2, seed).unwrap();
        normal_splitting_type(&f).unwrap() == st(2, 4) && !stability_check(&f).unwrap()
    });
    let cubic = RationalCurveMap::rational_normal(3);
    let twisted = normal_splitting_type(&cubic).unwrap() == st(5, 5) && stability_check(&cubic).unwrap();
    let mut generic = true;
    let mut fractions = Vec::new();
    for d in RATIONAL_DEGREES {
        let types: Vec<SplittingType> = (0..RATIONAL_SAMPLES)
            .map(|seed| normal_splitting_type(&random_rational_curve(d, seed).unwrap()).unwrap())
            .collect();
        let d = d as i64;
        generic &= types.iter().all(|s| s.a + s.b == 4 * d - 2);
        let balanced = types.iter().filter(|s| **s == st(2 * d - 1, 2 * d - 1)).count() as f64;
        let fraction = balanced / RATIONAL_SAMPLES as f64;
        generic &= fraction >= BALANCED_FRACTION;
        fractions.push(fraction);
    }
    let elapsed = start.elapsed();
    let ok = line && conics && twisted && generic && elapsed < RATIONAL_BUDGET;
    report(
        "5 rational curves",
        ok,
        elapsed,
        &format!("line {line}, conics {conics}, twisted cubic {twisted}, balanced fractions {fractions:?}"),
    );
    assert!(ok);
}

// ---------------------------------------------------------------- criterion 6

fn max_gram_spread(report: &twistor_core::twistor_metric::MetricReport) -> f64 {
    report
        .charts
        .iter()
        .map(|c| (&c.frame.gram - &report.mean_gram).amax())
        .fold(0.0, f64::max)
}

#[test]
fn criterion_6_metric_flatness() {
    let start = Instant::now();
    let options = ScanOptions::default();

    let lines = flatness_scan(1, METRIC_CHARTS, METRIC_SEED, &options).unwrap();
    let line_quaternion = lines.charts.iter().map(|c| c.frame.diagnostics.quaternion_residual).fold(0.0, f64::max);
    let ok_lines = lines.passed
        && lines.signature.is_some()
        && max_gram_spread(&lines) < LINE_GRAM_TOLERANCE
        && line_quaternion < LINE_QUATERNION_TOLERANCE;

    let conics = flatness_scan(2, METRIC_CHARTS, METRIC_SEED, &options).unwrap();
    let compat = conics
        .charts
        .iter()
        .map(|c| c.frame.diagnostics.compatibility[0])
        .fold(0.0, f64::max);
    let fit = conics.charts.iter().map(|c| c.frame.diagnostics.fit_residual).fold(0.0, f64::max);
    let ok_conics = conics.passed
        && conics.mean_gram.shape() == (12, 12)
        && conics.deviation < FLATNESS_TOLERANCE
        && conics.signature.is_some()
        && compat < COMPATIBILITY_TOLERANCE
        && fit < FIT_TOLERANCE;

    let control_options = ScanOptions {
        skip_sigma_gauge: true,
        ..ScanOptions::default()
    };
    let control_failed = match flatness_scan(2, METRIC_CHARTS, METRIC_SEED, &control_options) {
        Ok(rep) => !rep.passed,
        Err(_) => true,
    };

    let elapsed = start.elapsed();
    let ok = ok_lines && ok_conics && control_failed && elapsed < METRIC_BUDGET;
    report(
        "6 metric flatness",
        ok,
        elapsed,
        &format!(
            "r=1 spread {:.1e}, quaternion {:.1e}; r=2 deviation {:.1e}, compatibility {compat:.1e}, fit {fit:.1e}, \
             signature {}; negative control failed: {control_failed}",
            max_gram_spread(&lines),
            line_quaternion,
            conics.deviation,
            conics.signature.map(|s| s.to_string()).unwrap_or_default(),
        ),
    );
    assert!(ok);
}

// ---------------------------------------------------------------- criterion 7

#[test]
fn criterion_7a_pencil_gauge_invariance() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let ok = (0..INVARIANT_INSTANCES).all(|i| {
        let r = 1 + (i as usize) % 4;
        let p = random_injective_pencil(&mut rng, r);
        let g = random_invertible(&mut rng, r + 1);
        let h = random_invertible(&mut rng, r);
        let moved = p.gauge(&g, &h);
        let red = kronecker_reduce(&p).unwrap();
        // A reduction of p transports to one of G·p·H.
        let transported = KroneckerReduction {
            p: &red.p * &g.inverse().unwrap(),
            q: &h.inverse().unwrap() * &red.q,
        };
        is_injective_pencil(&moved) && transported.verify(&moved) && kronecker_reduce(&moved).unwrap().verify(&moved)
    });
    report("7 pencil gauge invariance", ok, start.elapsed(), &format!("{INVARIANT_INSTANCES} instances"));
    assert!(ok);
}

#[test]
fn criterion_7b_curve_gauge_invariance() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    let ok = (0..INVARIANT_INSTANCES).all(|i| {
        let r = 1 + (i as usize) % 3;
        let m = make_sigma_invariant_pencil(r, 700 + i).unwrap();
        let g = random_invertible(&mut rng, r + 1);
        let h = random_invertible(&mut rng, r);
        let moved: LinearMatrix = m.gauge(&g, &h);
        let (a, b) = (ACMCurve::new(m).certify().unwrap(), ACMCurve::new(moved).certify());
        let Ok(b) = b else { return false };
        // The minors of G·φ·H are det(H)·det(G)-multiples of a change of
        // basis of the original minors, so the ideal is unchanged.
        same_span(a.minors(), b.minors())
            && (r as i64..=r as i64 + 2)
                .all(|k| ideal_piece_dimension(a.minors(), k) == ideal_piece_dimension(b.minors(), k))
            && (r as i64 - 2..=r as i64 + 1).all(|k| ideal_cohomology(&a, k).unwrap() == ideal_cohomology(&b, k).unwrap())
    });
    report("7 curve gauge invariance", ok, start.elapsed(), &format!("{INVARIANT_INSTANCES} instances"));
    assert!(ok);
}

#[test]
fn criterion_7c_sigma_equivariance_of_fibers() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let ok = (0..INVARIANT_INSTANCES).all(|i| {
        let r = 1 + (i as usize) % 3;
        let c = ACMCurve::new(make_sigma_invariant_pencil(r, 900 + i).unwrap()).certify().unwrap();
        let t = random_t(&mut rng);
        let anti = -t.conj().inv();
        let here = restrict_to_fiber(&c, FiberChart::Affine(t.clone())).unwrap();
        let there = restrict_to_fiber(&c, FiberChart::Affine(anti.clone())).unwrap();
        let exact = same_span(&sigma_fiber_image(here.generators(), &t), there.generators());
        // Numerically: σ sends (u, v) over t to (v̄/t̄, −ū/t̄) over −1/t̄.
        let (p, q) = (fiber_points(c.matrix(), &t).unwrap(), fiber_points(c.matrix(), &anti).unwrap());
        let tb = t.to_complex().conj();
        let numeric = p.iter().all(|x| {
            let y = [x[1].conj() / tb, -x[0].conj() / tb];
            q.iter().any(|z| (z[0] - y[0]).norm() + (z[1] - y[1]).norm() < 1e-8 * (1.0 + y[0].norm() + y[1].norm()))
        });
        exact && numeric
    });
    report("7 sigma equivariance", ok, start.elapsed(), &format!("{INVARIANT_INSTANCES} instances"));
    assert!(ok);
}

fn random_poly_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, degree: u32) -> PolyMatrix {
    let idx = MonomialIndex::new(4, degree as i64);
    PolyMatrix::from_fn(rows, cols, 4, |_, _| {
        let coeffs: Vec<_> = (0..idx.len()).map(|_| gauss(rng, 2)).collect();
        HomogPoly::from_coefficients(&idx, &coeffs)
    })
}

#[test]
fn criterion_7d_graded_matrix_functoriality() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(74);
    let ok = (0..INVARIANT_INSTANCES).all(|_| {
        let (a, b, c) = (rng.gen_range(1..=3), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let (ea, eb) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let s = rng.gen_range(0..=2i64);
        let phi = random_poly_matrix(&mut rng, a, b, ea);
        let psi = random_poly_matrix(&mut rng, b, c, eb);
        let composite = graded_matrix(&(&phi * &psi), s).unwrap();
        let outer = graded_matrix(&phi, s + eb as i64).unwrap();
        let inner = graded_matrix(&psi, s).unwrap();
        composite.matrix == &outer.matrix * &inner.matrix
    });
    report("7 graded functoriality", ok, start.elapsed(), &format!("{INVARIANT_INSTANCES} instances"));
    assert!(ok);
}

#[test]
fn criterion_7e_fiber_trace_identities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(75);
    let trace = |x: &ExactMatrix| -> Complex64 {
        (0..x.rows()).map(|i| x[(i, i)].to_complex()).sum()
    };
    let close = |a: Complex64, b: Complex64| (a - b).norm() <= TRACE_TOLERANCE * (1.0 + b.norm());
    let ok = (0..INVARIANT_INSTANCES).all(|i| {
        let r = 1 + (i as usize) % 3;
        let m = make_sigma_invariant_pencil(r, 500 + i).unwrap();
        let t = random_t(&mut rng);
        let (mu, mv) = fiber_multiplication_operators(&m, &t).unwrap();
        let pts = fiber_points(&m, &t).unwrap();
        let sum = |f: &dyn Fn(&[Complex64; 2]) -> Complex64| -> Complex64 { pts.iter().map(f).sum() };
        pts.len() == r * (r + 1) / 2
            && &mu * &mv == &mv * &mu
            && close(sum(&|p| p[0]), trace(&mu))
            && close(sum(&|p| p[1]), trace(&mv))
            && close(sum(&|p| p[0] * p[0]), trace(&(&mu * &mu)))
            && close(sum(&|p| p[0] * p[1]), trace(&(&mu * &mv)))
            && close(sum(&|p| p[1] * p[1] * p[1]), trace(&(&(&mv * &mv) * &mv)))
    });
    report("7 fiber trace identities", ok, start.elapsed(), &format!("{INVARIANT_INSTANCES} instances"));
    assert!(ok);
}
