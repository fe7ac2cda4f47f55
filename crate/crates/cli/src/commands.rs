use std::fmt::Write as _;

use carleson_core::halfplane::{
    const_bpi, default_garnett_grid, garnett_check, w_pi_sup, w_pi_truncated_fourier_check, GarnettReport,
    LineMeasure, SpatialGrid,
};
use carleson_core::harness::{
    corpus_scan, fejer_bound, fejer_experiment, fejer_plot, CorpusSpec, FejerRow, InequalityReport, RatioKind,
    RatioSettings,
};
use carleson_core::measure::{default_delta_grid, log_grid, CarlesonVerdict};
use carleson_core::report::{two_column, NormReport};
use carleson_core::spaces::w_sigma;
use carleson_core::spectral::analyze;
use carleson_core::sumnorm::{SolverOptions, SumNormSolver};
use carleson_core::{CoeffVector, RadialMeasure, VerticalMeasure};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::measures::{load, Domain, Loaded};
use crate::{Command, Common, Failure};

pub struct Output {
    pub json: Value,
    pub csv: String,
    pub plot: Option<String>,
    /// False when some solve stopped at the iteration cap.
    pub converged: bool,
}

impl Output {
    fn new<T: Serialize>(report: &T, csv: String) -> Self {
        Self {
            json: serde_json::to_value(report).expect("reports serialize"),
            csv,
            plot: None,
            converged: true,
        }
    }
}

pub fn dispatch(cmd: &Command, c: &Common) -> Result<Output, Failure> {
    match cmd {
        Command::Moments => moments(&disk(c)?, c),
        Command::Carleson => carleson(&disk(c)?),
        Command::Sumnorm { input } => sumnorm(&disk(c)?, c, input.as_deref()),
        Command::Bbb => ratio(&disk(c)?, c, RatioKind::Bbb),
        Command::Adapted { b_scale } => {
            if !(b_scale.is_finite() && *b_scale > 0.0) {
                return Err(Failure::input(format!("--b-scale must be positive, got {b_scale}")));
            }
            ratio(&disk(c)?, c, RatioKind::Adapted { b_scale: *b_scale })
        }
        Command::Embedding => ratio(&disk(c)?, c, RatioKind::Embedding),
        Command::Fejer { n_list } => fejer(&disk(c)?, n_list),
        Command::Wsigma => wsigma(&disk(c)?, c),
        Command::Halfplane { r, eps, c_b } => {
            let Loaded::Vertical(pi) = load(&c.measure, Domain::Vertical)? else { unreachable!() };
            halfplane(&pi, *r, *eps, *c_b)
        }
        Command::Garnett => {
            let Loaded::Line(nu) = load(&c.measure, Domain::Line)? else { unreachable!() };
            garnett(&nu)
        }
    }
}

fn disk(c: &Common) -> Result<RadialMeasure, Failure> {
    match load(&c.measure, Domain::Disk)? {
        Loaded::Disk(m) => Ok(m),
        _ => unreachable!(),
    }
}

fn settings(c: &Common) -> RatioSettings {
    let mut solver = SolverOptions::with_tol(c.tol);
    if let Some(n) = c.max_iters {
        solver.max_iterations = n;
    }
    RatioSettings { grid: c.grid, solver }
}

#[derive(Serialize)]
struct MomentsReport {
    n_max: usize,
    total_mass: f64,
    boundary_accessible: bool,
    moments: Vec<f64>,
}

fn moments(mu: &RadialMeasure, c: &Common) -> Result<Output, Failure> {
    let report = MomentsReport {
        n_max: c.n_max,
        total_mass: mu.total_mass(),
        boundary_accessible: mu.boundary_accessible(),
        moments: mu.moments(c.n_max),
    };
    let mut csv = String::from("n,moment\n");
    for (n, s) in report.moments.iter().enumerate() {
        writeln!(csv, "{n},{s:e}").unwrap();
    }
    Ok(Output::new(&report, csv))
}

#[derive(Serialize)]
struct CarlesonReport {
    #[serde(flatten)]
    verdict: CarlesonVerdict,
    boundary_accessible: bool,
    /// `2π ∫ σ(dr) / (1 - r²)`, finite iff the Fejér norms stay bounded.
    #[serde(with = "carleson_core::report::extended")]
    singular_integral: f64,
}

fn carleson(mu: &RadialMeasure) -> Result<Output, Failure> {
    let report = CarlesonReport {
        verdict: mu.radial_carleson(&default_delta_grid()),
        boundary_accessible: mu.boundary_accessible(),
        singular_integral: mu.singular_integral(),
    };
    let csv = format!(
        "is_carleson,sup_ratio,boundary_accessible,singular_integral\n{},{:e},{},{:e}\n",
        report.verdict.is_carleson, report.verdict.sup_ratio, report.boundary_accessible, report.singular_integral
    );
    Ok(Output::new(&report, csv))
}

#[derive(Serialize)]
struct SumNormRow {
    index: usize,
    upper: f64,
    lower: f64,
    gap: f64,
    iterations: usize,
    converged: bool,
}

#[derive(Serialize)]
struct SumNormReport {
    /// `null` when the input came from a coefficient file.
    seed: Option<u64>,
    n_max: usize,
    grid: usize,
    tol: f64,
    results: Vec<SumNormRow>,
    all_converged: bool,
}

fn sumnorm(mu: &RadialMeasure, c: &Common, input: Option<&std::path::Path>) -> Result<Output, Failure> {
    let (inputs, seed): (Vec<CoeffVector>, Option<u64>) = match input {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::io(format!("reading {}: {e}", path.display())))?;
            let u: CoeffVector =
                serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
            (vec![u], None)
        }
        None => {
            let corpus = CorpusSpec::new(c.n_max, c.count, c.seed);
            ((0..c.count).map(|i| corpus.element(i)).collect(), Some(c.seed))
        }
    };
    let n_max = inputs[0].n_max();
    if c.grid < 2 * n_max + 1 {
        return Err(Failure::input(format!("--grid {} cannot represent degree {n_max}", c.grid)));
    }
    let solver = SumNormSolver::new(mu, n_max, c.grid)?;
    let opts = settings(c).solver;
    let results = inputs
        .par_iter()
        .enumerate()
        .map(|(index, u)| {
            let r = solver.solve(u, &opts)?;
            Ok(SumNormRow { index, upper: r.upper, lower: r.lower, gap: r.gap, iterations: r.iterations, converged: r.converged })
        })
        .collect::<carleson_core::Result<Vec<_>>>()?;
    let all_converged = results.iter().all(|r| r.converged);
    let mut csv = String::from("index,lower,upper,gap,iterations,converged\n");
    for r in &results {
        writeln!(csv, "{},{:e},{:e},{:e},{},{}", r.index, r.lower, r.upper, r.gap, r.iterations, r.converged).unwrap();
    }
    let report = SumNormReport { seed, n_max, grid: c.grid, tol: c.tol, results, all_converged };
    Ok(Output { converged: all_converged, ..Output::new(&report, csv) })
}

fn ratio(mu: &RadialMeasure, c: &Common, which: RatioKind) -> Result<Output, Failure> {
    let corpus = CorpusSpec::new(c.n_max, c.count, c.seed);
    let report: InequalityReport = corpus_scan(&corpus, mu, which, settings(c))?;
    Ok(Output { converged: report.all_converged, ..Output::new(&report, report.to_csv()) })
}

#[derive(Serialize)]
struct FejerReport {
    rows: Vec<FejerRow>,
    /// `√(2π Σ σ_j)`; `"inf"` when the moment series diverges.
    #[serde(with = "carleson_core::report::extended")]
    bound: f64,
}

fn fejer(mu: &RadialMeasure, n_list: &[usize]) -> Result<Output, Failure> {
    let rows = fejer_experiment(mu, n_list)?;
    let mut csv = String::from("n,h1_norm,analytic_part_sq,partial_moment_sum\n");
    for r in &rows {
        writeln!(csv, "{},{:e},{:e},{:e}", r.n, r.h1_norm, r.analytic_part_sq, r.partial_moment_sum).unwrap();
    }
    let plot = fejer_plot(&rows);
    let report = FejerReport { rows, bound: fejer_bound(mu) };
    Ok(Output { plot: Some(plot), ..Output::new(&report, csv) })
}

#[derive(Serialize)]
struct WsigmaReport {
    grid: usize,
    n_max: usize,
    bounded: bool,
    sup_abs: f64,
    /// `max_{|n|<=n_max} |analyze(w_σ)(n) - sgn(n) σ_n|`
    max_identity_error: f64,
}

fn wsigma(mu: &RadialMeasure, c: &Common) -> Result<Output, Failure> {
    let w = w_sigma(mu, c.grid);
    let coeffs = analyze(&w.grid, c.n_max)?;
    let moments = mu.moments(c.n_max);
    let err = coeffs
        .iter()
        .map(|(n, v)| (v - num_complex::Complex64::new(n.signum() as f64 * moments[n.unsigned_abs() as usize], 0.0)).norm())
        .fold(0.0, f64::max);
    let report = WsigmaReport {
        grid: c.grid,
        n_max: c.n_max,
        bounded: w.bounded,
        sup_abs: w.grid.max_abs(),
        max_identity_error: err,
    };
    let csv = format!(
        "grid,n_max,bounded,sup_abs,max_identity_error\n{},{},{},{:e},{:e}\n",
        report.grid, report.n_max, report.bounded, report.sup_abs, report.max_identity_error
    );
    let plot = two_column((0..w.grid.m()).map(|k| (w.grid.theta(k), w.grid.samples()[k].im)));
    Ok(Output { plot: Some(plot), ..Output::new(&report, csv) })
}

#[derive(Serialize)]
struct HalfplaneReport {
    w_pi_sup: NormReport,
    c_b: f64,
    #[serde(with = "carleson_core::report::extended")]
    const_bpi: f64,
    r: f64,
    /// `2 (2 + ‖W^{Π_R}‖_∞)^{1/2}`
    #[serde(with = "carleson_core::report::extended")]
    stability_bound: f64,
    eps: f64,
    /// Max relative error of the truncated `W^Π` transform on `ξ ∈ [0.5, 4]`.
    truncated_transform_error: Option<f64>,
}

fn halfplane(pi: &VerticalMeasure, r: f64, eps: f64, c_b: f64) -> Result<Output, Failure> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Failure::input(format!("--r must be positive, got {r}")));
    }
    let sup = w_pi_sup(pi);
    let pi_r = pi
        .truncated(r)
        .ok_or_else(|| Failure::input(format!("the measure has no mass below R = {r}")))?;
    let xi: Vec<f64> = (0..=28).map(|k| 0.5 + 0.125 * k as f64).collect();
    // The check is meaningless when Π puts no mass in [ε, R].
    let check = match pi.restricted(eps, r) {
        Some(_) => Some(w_pi_truncated_fourier_check(pi, eps, r, &SpatialGrid::default(), &xi)?),
        None => None,
    };
    let report = HalfplaneReport {
        w_pi_sup: sup,
        c_b,
        const_bpi: const_bpi(c_b, pi)?,
        r,
        stability_bound: 2.0 * (2.0 + w_pi_sup(&pi_r).value).sqrt(),
        eps,
        truncated_transform_error: check,
    };
    let csv = format!(
        "w_pi_sup,const_bpi,stability_bound,truncated_transform_error\n{:e},{:e},{:e},{}\n",
        report.w_pi_sup.value,
        report.const_bpi,
        report.stability_bound,
        check.map_or(String::new(), |e| format!("{e:e}"))
    );
    let grid = log_grid(1e-4, 1e4, 400);
    let plot = two_column(grid.iter().map(|&x| (x, carleson_core::halfplane::w_pi_real(pi, x))));
    Ok(Output { plot: Some(plot), ..Output::new(&report, csv) })
}

#[derive(Serialize)]
struct GarnettOut {
    #[serde(flatten)]
    report: GarnettReport,
    /// Analytic classification of the two sups.
    poisson_finite: bool,
    box_finite: bool,
}

fn garnett(nu: &LineMeasure) -> Result<Output, Failure> {
    let grid = default_garnett_grid();
    let report = garnett_check(nu, &grid, &grid);
    let out = GarnettOut { report, poisson_finite: report.poisson_sup.is_finite(), box_finite: report.box_sup.is_finite() };
    let csv = format!(
        "poisson_sup,box_sup,integrable\n{:e},{:e},{}\n",
        report.poisson_sup, report.box_sup, report.integrable
    );
    Ok(Output::new(&out, csv))
}
