//! The subcommands as pure functions from arguments to a report, the files
//! to write, and an exit code. `main` only does the I/O.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use twistor_core::acm_curve::{
    certify_resolution, fiber_hilbert_function, restrict_to_fiber, stratum_check, ACMCurve, AcmError, FiberChart,
    HilbertFunction,
};
use twistor_core::cohomology::{ideal_cohomology, normal_sections, CohomologyTable};
use twistor_core::exact_algebra::GaussianRational;
use twistor_core::pencil::{kronecker_reduce, PencilError};
use twistor_core::rational_curve::{normal_splitting_type, random_rational_curve, RationalCurveMap};
use twistor_core::reality::make_sigma_invariant_pencil;
use twistor_core::twistor_metric::{flatness_scan, MetricError, ScanOptions, FIT_TOLERANCE, GRAM_TOLERANCE};

use crate::document::{literals, CurveDocument, DocumentError, Literals, Metadata, RationalMapDocument};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_INVALID: u8 = 3;
pub const EXIT_EXTRACTION: u8 = 4;

/// A finished command: the JSON report for stdout, files for `--out`, and
/// the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub report: String,
    pub files: Vec<(String, String)>,
    pub exit: u8,
}

/// Wall-clock timings in milliseconds, only collected with `--timings` so
/// that reports are otherwise byte-identical between runs.
#[derive(Debug, Default)]
pub struct Timer {
    enabled: bool,
    entries: BTreeMap<String, f64>,
}

impl Timer {
    pub fn new(enabled: bool) -> Self {
        Self {
            enabled,
            entries: BTreeMap::new(),
        }
    }

    fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        if self.enabled {
            *self.entries.entry(name.to_string()).or_default() += start.elapsed().as_secs_f64() * 1e3;
        }
        out
    }

    fn finish(self) -> Option<BTreeMap<String, f64>> {
        self.enabled.then_some(self.entries)
    }
}

#[derive(Serialize)]
struct Report<T: Serialize> {
    command: &'static str,
    #[serde(flatten)]
    body: T,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings_ms: Option<BTreeMap<String, f64>>,
}

fn render<T: Serialize>(command: &'static str, body: T, status: &'static str, timer: Timer) -> String {
    let report = Report {
        command,
        body,
        status,
        timings_ms: timer.finish(),
    };
    serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"
}

fn status(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct ErrorBody {
    error: String,
}

/// The outcome for a document that could not be parsed or validated.
pub fn document_failure(command: &'static str, e: &DocumentError) -> Outcome {
    let exit = match e {
        DocumentError::Parse(_) => EXIT_PARSE,
        DocumentError::Invalid(_) => EXIT_INVALID,
    };
    Outcome {
        report: render(command, ErrorBody { error: e.to_string() }, "ERROR", Timer::new(false)),
        files: vec![],
        exit,
    }
}

// ---------------------------------------------------------------- kronecker

#[derive(Serialize)]
struct KroneckerBody {
    r: usize,
    #[serde(rename = "P", skip_serializing_if = "Option::is_none")]
    p: Option<Literals>,
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    q: Option<Literals>,
    verified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

pub fn kronecker(doc: &CurveDocument, timer: Timer) -> Outcome {
    const NAME: &str = "kronecker";
    let mut timer = timer;
    let pencil = match doc.pencil() {
        Ok(p) => p,
        Err(e) => return document_failure(NAME, &e),
    };
    let r = pencil.r();
    match timer.time("reduce", || kronecker_reduce(&pencil)) {
        Ok(red) => {
            let verified = red.verify(&pencil);
            let body = KroneckerBody {
                r,
                p: Some(literals(&red.p)),
                q: Some(literals(&red.q)),
                verified,
                witness: None,
            };
            Outcome {
                report: render(NAME, body, status(verified), timer),
                files: vec![],
                exit: if verified { EXIT_PASS } else { EXIT_FAIL },
            }
        }
        Err(PencilError::NotInjective(w)) => {
            let body = KroneckerBody {
                r,
                p: None,
                q: None,
                verified: false,
                witness: Some(w.to_string()),
            };
            Outcome {
                report: render(NAME, body, "FAIL", timer),
                files: vec![],
                exit: EXIT_INVALID,
            }
        }
        Err(e) => Outcome {
            report: render(NAME, ErrorBody { error: e.to_string() }, "FAIL", timer),
            files: vec![],
            exit: EXIT_FAIL,
        },
    }
}

// --------------------------------------------------------------- acm verify

#[derive(Serialize)]
struct Stage {
    name: &'static str,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

#[derive(Serialize)]
struct CohomologyRowOut {
    k: i64,
    h: [i64; 4],
}

#[derive(Serialize)]
struct FiberOut {
    t: String,
    length: i64,
    hilbert_function: Vec<i64>,
    expected_hilbert_function: Vec<i64>,
    stratum: bool,
}

#[derive(Serialize, Default)]
struct VerifyBody {
    r: usize,
    degree: i64,
    genus: i64,
    stages: Vec<Stage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failed_stage: Option<&'static str>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    cohomology: Vec<CohomologyRowOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h0_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    h0_n_minus1: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    fibers: Vec<FiberOut>,
}

/// Five exact fiber parameters `t = (a + bi)/c` drawn from the seed.
fn random_fibers(seed: u64, count: usize) -> Vec<GaussianRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let c = rng.gen_range(1..=4);
            GaussianRational::ratio(rng.gen_range(-6..=6), c) + GaussianRational::ratio(rng.gen_range(-6..=6), c) * GaussianRational::i()
        })
        .collect()
}

pub fn acm_verify(doc: &CurveDocument, seed: u64, timer: Timer) -> Outcome {
    const NAME: &str = "acm verify";
    let mut timer = timer;
    let m = match doc.linear_matrix() {
        Ok(m) => m,
        Err(e) => return document_failure(NAME, &e),
    };
    let r = m.r();
    let ri = r as i64;
    let raw = ACMCurve::new(m);
    let mut body = VerifyBody {
        r,
        degree: raw.degree(),
        genus: raw.genus(),
        ..VerifyBody::default()
    };
    let record = |body: &mut VerifyBody, name: &'static str, passed: bool, detail: Option<String>| {
        if !passed && body.failed_stage.is_none() {
            body.failed_stage = Some(name);
        }
        body.stages.push(Stage { name, passed, detail });
    };

    let certified = timer.time("certify", || raw.clone().certify());
    let curve = match certified {
        Ok(c) => {
            record(&mut body, "base_avoidance", true, None);
            record(&mut body, "resolution", true, None);
            c
        }
        Err(AcmError::MeetsBaseLine(w)) => {
            record(&mut body, "base_avoidance", false, Some(format!("rank drops at {w}")));
            return Outcome {
                report: render(NAME, body, "FAIL", timer),
                files: vec![],
                exit: EXIT_FAIL,
            };
        }
        Err(_) => {
            record(&mut body, "base_avoidance", true, None);
            let report = certify_resolution(&raw);
            record(&mut body, "resolution", false, Some(report.to_string()));
            return Outcome {
                report: render(NAME, body, "FAIL", timer),
                files: vec![],
                exit: EXIT_FAIL,
            };
        }
    };
    record(&mut body, "sigma_invariance", curve.flags().sigma_invariant, None);

    let rows: Vec<CohomologyRowOut> = timer.time("cohomology", || {
        ((ri - 3)..=(ri + 1))
            .map(|k| CohomologyRowOut {
                k,
                h: ideal_cohomology(&curve, k).expect("certified"),
            })
            .collect()
    });
    let acyclic = rows.iter().filter(|row| row.k == ri - 1 || row.k == ri - 2).all(|row| row.h == [0; 4]);
    body.cohomology = rows;
    record(&mut body, "ellia_stability", acyclic, None);

    let (n0, n1) = timer.time("normal_sheaf", || {
        (normal_sections(&curve, 0).expect("certified"), normal_sections(&curve, -1).expect("certified"))
    });
    body.h0_n = Some(n0);
    body.h0_n_minus1 = Some(n1);
    let expected = (2 * r * (r + 1), r * (r + 1));
    record(
        &mut body,
        "normal_sheaf",
        (n0, n1) == expected,
        Some(format!("expected h0(N) = {}, h0(N(-1)) = {}", expected.0, expected.1)),
    );

    let expected_h = HilbertFunction::expected(r);
    let fibers: Vec<FiberOut> = timer.time("fibers", || {
        random_fibers(seed, 5)
            .into_iter()
            .map(|t| {
                let f = restrict_to_fiber(&curve, FiberChart::Affine(t.clone())).expect("certified");
                FiberOut {
                    t: t.to_string(),
                    length: f.length(),
                    hilbert_function: fiber_hilbert_function(&f).values,
                    expected_hilbert_function: expected_h.values.clone(),
                    stratum: stratum_check(&f),
                }
            })
            .collect()
    });
    let fibers_ok = fibers
        .iter()
        .all(|f| f.length == curve.degree() && f.hilbert_function == f.expected_hilbert_function && f.stratum);
    body.fibers = fibers;
    record(&mut body, "fibers", fibers_ok, None);

    let passed = body.failed_stage.is_none();
    Outcome {
        report: render(NAME, body, status(passed), timer),
        files: vec![],
        exit: if passed { EXIT_PASS } else { EXIT_FAIL },
    }
}

// --------------------------------------------------------------- acm random

#[derive(Serialize)]
struct GeneratedCurve {
    index: usize,
    seed: u64,
    file: String,
    document: CurveDocument,
}

#[derive(Serialize)]
struct RandomBody {
    r: usize,
    count: usize,
    seed: u64,
    curves: Vec<GeneratedCurve>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

/// The per-item seed of a batch: distinct for distinct `(seed, index)`.
pub fn item_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index as u64)
}

pub fn acm_random(r: usize, count: usize, seed: u64, timer: Timer) -> Outcome {
    const NAME: &str = "acm random";
    let mut timer = timer;
    if r == 0 {
        return document_failure(NAME, &DocumentError::Invalid("r must be positive".into()));
    }
    let results: Vec<(usize, u64, Result<CurveDocument, String>)> = timer.time("generate", || {
        (0..count)
            .into_par_iter()
            .map(|index| {
                let s = item_seed(seed, index);
                let doc = make_sigma_invariant_pencil(r, s)
                    .map_err(|e| e.to_string())
                    .and_then(|m| ACMCurve::new(m).certify().map_err(|e| e.to_string()))
                    .map(|c| {
                        CurveDocument::from_matrix(
                            c.matrix(),
                            Metadata {
                                seed: Some(s),
                                labels: vec![format!("sigma-invariant r={r}")],
                            },
                        )
                    });
                (index, s, doc)
            })
            .collect()
    });
    let mut curves = Vec::new();
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    for (index, s, doc) in results {
        match doc {
            Ok(doc) => {
                let file = format!("curve_r{r}_{index:03}.json");
                files.push((file.clone(), doc.to_json()));
                curves.push(GeneratedCurve {
                    index,
                    seed: s,
                    file,
                    document: doc,
                });
            }
            Err(e) => warnings.push(format!("item {index} (seed {s}): {e}")),
        }
    }
    let passed = warnings.is_empty();
    let body = RandomBody {
        r,
        count,
        seed,
        curves,
        warnings,
    };
    Outcome {
        report: render(NAME, body, status(passed), timer),
        files,
        exit: if passed { EXIT_PASS } else { EXIT_FAIL },
    }
}

// ----------------------------------------------------------------- rational

#[derive(Serialize)]
struct RationalItem {
    index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    d: u32,
    splitting_type: [i64; 2],
    balanced: bool,
    stability: bool,
}

#[derive(Serialize)]
struct HistogramEntry {
    splitting_type: [i64; 2],
    count: usize,
}

#[derive(Serialize)]
struct RationalBody {
    curves: Vec<RationalItem>,
    histogram: Vec<HistogramEntry>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    errors: Vec<String>,
}

/// Where the rational curves come from.
pub enum RationalSource {
    Random { d: u32, count: usize, seed: u64 },
    Explicit(RationalMapDocument),
}

fn analyse(index: usize, seed: Option<u64>, f: &RationalCurveMap) -> Result<RationalItem, String> {
    let s = normal_splitting_type(f).map_err(|e| e.to_string())?;
    let balanced_value = 2 * f.degree() as i64 - 1;
    Ok(RationalItem {
        index,
        seed,
        d: f.degree(),
        splitting_type: [s.a, s.b],
        balanced: s.is_balanced(),
        stability: s.a == balanced_value && s.b == balanced_value,
    })
}

pub fn rational(source: RationalSource, timer: Timer) -> Outcome {
    const NAME: &str = "rational";
    let mut timer = timer;
    let results: Vec<Result<RationalItem, String>> = match source {
        RationalSource::Explicit(doc) => {
            let f = match doc.map() {
                Ok(f) => f,
                Err(e) => return document_failure(NAME, &e),
            };
            match timer.time("splitting", || analyse(0, None, &f)) {
                Ok(item) => vec![Ok(item)],
                Err(e) => return document_failure(NAME, &DocumentError::Invalid(e)),
            }
        }
        RationalSource::Random { d, count, seed } => {
            if d == 0 {
                return document_failure(NAME, &DocumentError::Invalid("d must be positive".into()));
            }
            timer.time("splitting", || {
                (0..count)
                    .into_par_iter()
                    .map(|index| {
                        let s = item_seed(seed, index);
                        random_rational_curve(d, s)
                            .map_err(|e| e.to_string())
                            .and_then(|f| analyse(index, Some(s), &f))
                    })
                    .collect()
            })
        }
    };
    let mut curves = Vec::new();
    let mut errors = Vec::new();
    for r in results {
        match r {
            Ok(item) => curves.push(item),
            Err(e) => errors.push(e),
        }
    }
    let mut counts: BTreeMap<[i64; 2], usize> = BTreeMap::new();
    for c in &curves {
        *counts.entry(c.splitting_type).or_default() += 1;
    }
    let histogram = counts
        .into_iter()
        .map(|(splitting_type, count)| HistogramEntry { splitting_type, count })
        .collect();
    let passed = errors.is_empty() && curves.iter().all(|c| c.splitting_type[0] + c.splitting_type[1] == 4 * c.d as i64 - 2);
    Outcome {
        report: render(NAME, RationalBody { curves, histogram, errors }, status(passed), timer),
        files: vec![],
        exit: if passed { EXIT_PASS } else { EXIT_FAIL },
    }
}

// ------------------------------------------------------------------- metric

#[derive(Serialize)]
struct ChartOut {
    index: usize,
    signature: [usize; 3],
    fit_residual: f64,
    imaginary_part: f64,
    symmetry: f64,
    compatibility: [f64; 3],
    kahler_consistency: [f64; 2],
    quaternion_residual: f64,
    resamples: usize,
    gram_file: String,
}

#[derive(Serialize)]
struct MetricBody {
    r: usize,
    charts: usize,
    seed: u64,
    skip_sigma_gauge: bool,
    fibers: Vec<String>,
    dimension: usize,
    deviation: f64,
    tolerance: f64,
    fit_tolerance: f64,
    gram_tolerance: f64,
    signature: Option<[usize; 3]>,
    max_quaternion_residual: f64,
    per_chart: Vec<ChartOut>,
}

#[derive(Serialize)]
struct MetricFailure {
    r: usize,
    seed: u64,
    skip_sigma_gauge: bool,
    error: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    failed_chart: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reproduction: Option<CurveDocument>,
}

/// Gram matrix as CSV with round-trippable floats.
pub fn gram_csv(g: &nalgebra::DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..g.nrows() {
        let row: Vec<String> = (0..g.ncols()).map(|j| format!("{:e}", g[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub struct MetricArgs {
    pub r: usize,
    pub count: usize,
    pub seed: u64,
    pub fibers: Vec<GaussianRational>,
    pub skip_sigma_gauge: bool,
}

pub fn metric(args: MetricArgs, timer: Timer) -> Outcome {
    const NAME: &str = "metric";
    let mut timer = timer;
    if args.r == 0 || args.count == 0 {
        return document_failure(NAME, &DocumentError::Invalid("r and the chart count must be positive".into()));
    }
    let options = ScanOptions {
        fibers: args.fibers.clone(),
        skip_sigma_gauge: args.skip_sigma_gauge,
        ..ScanOptions::default()
    };
    let scan = timer.time("scan", || flatness_scan(args.r, args.count, args.seed, &options));
    let report = match scan {
        Ok(report) => report,
        Err(e) => {
            let (failed_chart, reproduction) = match &e {
                MetricError::ScanFailure { index, chart, .. } => (
                    Some(*index),
                    Some(CurveDocument::from_matrix(
                        &chart.linear_matrix(),
                        Metadata {
                            seed: Some(args.seed),
                            labels: vec![format!("metric chart {index}")],
                        },
                    )),
                ),
                _ => (None, None),
            };
            let files = reproduction
                .iter()
                .map(|doc| ("reproduction.json".to_string(), doc.to_json()))
                .collect();
            let body = MetricFailure {
                r: args.r,
                seed: args.seed,
                skip_sigma_gauge: args.skip_sigma_gauge,
                error: e.to_string(),
                failed_chart,
                reproduction,
            };
            return Outcome {
                report: render(NAME, body, "ERROR", timer),
                files,
                exit: EXIT_EXTRACTION,
            };
        }
    };
    let sig = |s: twistor_core::twistor_metric::Signature| [s.positive, s.negative, s.zero];
    let mut files = Vec::new();
    let per_chart: Vec<ChartOut> = report
        .charts
        .iter()
        .map(|c| {
            let gram_file = format!("gram_{:03}.csv", c.index);
            files.push((gram_file.clone(), gram_csv(&c.frame.gram)));
            let d = c.frame.diagnostics;
            ChartOut {
                index: c.index,
                signature: sig(c.frame.signature),
                fit_residual: d.fit_residual,
                imaginary_part: d.imaginary_part,
                symmetry: d.symmetry,
                compatibility: d.compatibility,
                kahler_consistency: d.kahler_consistency,
                quaternion_residual: d.quaternion_residual,
                resamples: c.resamples,
                gram_file,
            }
        })
        .collect();
    files.push(("gram_mean.csv".to_string(), gram_csv(&report.mean_gram)));
    let body = MetricBody {
        r: args.r,
        charts: args.count,
        seed: args.seed,
        skip_sigma_gauge: args.skip_sigma_gauge,
        fibers: args.fibers.iter().map(ToString::to_string).collect(),
        dimension: report.mean_gram.nrows(),
        deviation: report.deviation,
        tolerance: report.tolerance,
        fit_tolerance: FIT_TOLERANCE,
        gram_tolerance: GRAM_TOLERANCE,
        signature: report.signature.map(sig),
        max_quaternion_residual: per_chart.iter().map(|c| c.quaternion_residual).fold(0.0, f64::max),
        per_chart,
    };
    Outcome {
        report: render(NAME, body, status(report.passed), timer),
        files,
        exit: if report.passed { EXIT_PASS } else { EXIT_FAIL },
    }
}

// --------------------------------------------------------- cohomology table

#[derive(Serialize)]
struct TableRow {
    k: i64,
    h0: i64,
    h1: i64,
    h2: i64,
    h3: i64,
    h0_structure_sheaf: i64,
}

#[derive(Serialize)]
struct TableBody {
    r: usize,
    rows: Vec<TableRow>,
}

pub fn cohomology_table(doc: &CurveDocument, from: Option<i64>, to: Option<i64>, timer: Timer) -> Outcome {
    const NAME: &str = "cohomology table";
    let mut timer = timer;
    let m = match doc.linear_matrix() {
        Ok(m) => m,
        Err(e) => return document_failure(NAME, &e),
    };
    let r = m.r() as i64;
    let curve = match timer.time("certify", || ACMCurve::new(m).certify()) {
        Ok(c) => c,
        Err(e) => return document_failure(NAME, &DocumentError::Invalid(e.to_string())),
    };
    let (lo, hi) = (from.unwrap_or(-1), to.unwrap_or(2 * r));
    let table = timer
        .time("table", || CohomologyTable::compute(&curve, lo..=hi))
        .expect("certified curve");
    let rows = table
        .rows
        .iter()
        .map(|row| TableRow {
            k: row.k,
            h0: row.ideal[0],
            h1: row.ideal[1],
            h2: row.ideal[2],
            h3: row.ideal[3],
            h0_structure_sheaf: row.structure_h0,
        })
        .collect();
    Outcome {
        report: render(NAME, TableBody { r: table.r, rows }, "PASS", timer),
        files: vec![],
        exit: EXIT_PASS,
    }
}
