//! The experiment suites. Each returns tables, pass/fail checks and plots;
//! nothing here touches the filesystem.

use std::time::Instant;

use kelab::charts::{complex_hessian, laplacian, ma_ratio, vol_ratio_to_omega};
use kelab::decay::{decay_sweep, DecayQuantity, RegionProbe};
use kelab::gh::{convergence_row, ConvergenceRow, GhOptions};
use kelab::models::{eh_normalization, inverse_map, smoothing_map};
use kelab::solver::{d_op, e_op, inverse_norm_estimate, r_op, random_field, solve_on, RadialBackground, SolveOptions, SolveReport};
use kelab::weighted::{decay_fit, point_on_level, rotation_from_uniform, DecayFit};
use kelab::{node_bound, Complex64, HermitianForm2, HessianMode, PotentialKind, PotentialSpec, RegionTag};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Suite};
use crate::error::Result;
use crate::svg::{Plot, Series};

/// One pass/fail verdict. `criterion` ties it to a numbered acceptance criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub criterion: Option<u8>,
    pub name: String,
    pub measured: f64,
    pub target: String,
    pub pass: bool,
}

impl Check {
    fn new(criterion: impl Into<Option<u8>>, name: impl Into<String>, measured: f64, target: impl Into<String>, pass: bool) -> Self {
        Self { criterion: criterion.into(), name: name.into(), measured, target: target.into(), pass }
    }

    fn slope(criterion: impl Into<Option<u8>>, name: &str, fit: &DecayFit) -> Self {
        Self::new(criterion, name, fit.slope, format!("{:.4} +- {}", fit.predicted, fit.tolerance), fit.pass)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Everything a suite produces. `elapsed` is wall time per criterion and is
/// never written to the report files.
#[derive(Debug, Clone)]
pub struct SuiteOutput {
    pub suite: Suite,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub plots: Vec<Plot>,
    pub json: Vec<(String, serde_json::Value)>,
    pub elapsed: Vec<(u8, f64)>,
}

impl SuiteOutput {
    fn new(suite: Suite) -> Self {
        Self { suite, tables: vec![], checks: vec![], plots: vec![], json: vec![], elapsed: vec![] }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Fixed-width scientific notation, so reruns are byte-identical.
pub fn num(x: f64) -> String {
    format!("{x:.10e}")
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Slope fit when the sweep has enough points; otherwise `None`.
fn fit(points: &[(f64, f64)], predicted: f64, tol: f64) -> Option<DecayFit> {
    if points.len() < 4 {
        return None;
    }
    decay_fit(points, predicted, tol).ok()
}

fn random_point(rng: &mut ChaCha8Rng, t: f64) -> kelab::SurfacePoint {
    // |w|^2 log-uniform between just above the cycle and |w| = 2
    let (lo, hi) = ((t * 1.0001).ln(), 4f64.ln());
    let s = (lo + (hi - lo) * rng.random::<f64>()).exp();
    let rot = rotation_from_uniform([rng.random(), rng.random(), rng.random()]);
    point_on_level(s, t, &rot)
}

fn random_hermitian(rng: &mut ChaCha8Rng, positive: bool) -> HermitianForm2 {
    let mut r = || rng.random_range(-1.0..1.0);
    let (a, b, re, im) = (r(), r(), r(), r());
    let off = Complex64::new(re, im);
    if positive {
        let (a, b) = (1.0 + a.abs(), 1.0 + b.abs());
        let off = off * (0.9 * (a * b).sqrt() / off.norm().max(1.0));
        HermitianForm2::new([[Complex64::new(a, 0.0), off], [off.conj(), Complex64::new(b, 0.0)]])
    } else {
        HermitianForm2::new([[Complex64::new(a, 0.0), off], [off.conj(), Complex64::new(b, 0.0)]])
    }
}

/// Ricci-flatness of Eguchi-Hanson, the decomposition identity of the
/// Monge-Ampere operator, and the algebraic identities behind them.
pub fn verify_identities(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new(Suite::VerifyIdentities);
    let mut rows = Vec::new();
    let tol_vol = cfg.tolerance("vol_ratio");

    let start = Instant::now();
    let vol: Vec<(f64, std::result::Result<f64, String>)> = cfg
        .delta_sweep
        .par_iter()
        .enumerate()
        .map(|(i, &d)| {
            let run = || -> Result<f64> {
                let params = cfg.params(d)?;
                let eh = PotentialSpec::new(PotentialKind::EguchiHanson, params);
                let c = eh_normalization(&params);
                let mut rng = rng_for(cfg.seed, 100 + i as u64);
                let mut worst: f64 = 0.0;
                for _ in 0..cfg.samples.identity_points {
                    let p = random_point(&mut rng, params.t());
                    let g = complex_hessian(&eh, &p, HessianMode::AnalyticRadial)?;
                    worst = worst.max((vol_ratio_to_omega(&g, &p, c)? - 1.0).abs());
                }
                Ok(worst)
            };
            (d, run().map_err(|e| e.to_string()))
        })
        .collect();
    out.elapsed.push((1, start.elapsed().as_secs_f64()));
    for (d, r) in &vol {
        let (err, msg) = match r {
            Ok(e) => (*e, String::new()),
            Err(m) => (f64::NAN, m.clone()),
        };
        let pass = err <= tol_vol;
        rows.push(vec!["eh_vol_ratio".into(), num(*d), cfg.samples.identity_points.to_string(), num(err), num(tol_vol), pass.to_string(), msg]);
        out.checks.push(Check::new(1, format!("eh vol ratio delta={d}"), err, format!("<= {tol_vol:e}"), pass));
    }

    let start = Instant::now();
    let tol_dec = cfg.tolerance("decomposition");
    let mut rng = rng_for(cfg.seed, 200);
    let mut backgrounds = Vec::new();
    for &d in &cfg.delta_sweep {
        backgrounds.push(RadialBackground::new(&cfg.params(d)?, cfg.grid_nodes)?);
    }
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for i in 0..cfg.samples.decomposition_fields {
        let bg = &backgrounds[i % backgrounds.len()];
        // near the cycle the metric is small, so shrink until omega + i ddbar phi > 0
        let amp = 0.1 * rng.random::<f64>();
        let mut phi = random_field(bg.grid, &mut rng, amp);
        let mut e = e_op(&phi, bg);
        for _ in 0..60 {
            if e.is_ok() {
                break;
            }
            phi.values.iter_mut().for_each(|v| *v *= 0.5);
            e = e_op(&phi, bg);
        }
        let Ok(e) = e else { continue };
        let (dd, rr) = (d_op(&phi, bg), r_op(&phi, bg));
        for j in 0..bg.grid.len() {
            let split = (1.0 - bg.ricci[j].exp()) + dd.values[j] + rr.values[j];
            worst = worst.max((e.values[j] - split).abs());
        }
        used += 1;
    }
    out.elapsed.push((2, start.elapsed().as_secs_f64()));
    let pass = used == cfg.samples.decomposition_fields && worst <= tol_dec;
    rows.push(vec!["decomposition".into(), String::new(), used.to_string(), num(worst), num(tol_dec), pass.to_string(), String::new()]);
    out.checks.push(Check::new(2, "E = (1 - e^f) + D + R", worst, format!("<= {tol_dec:e} on {} fields", cfg.samples.decomposition_fields), pass));

    // determinant expansion of the Monge-Ampere ratio
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let g = random_hermitian(&mut rng, true);
        let h = random_hermitian(&mut rng, false);
        let lhs = ma_ratio(&g, &h)?;
        let rhs = 1.0 + laplacian(&g, &h)? + h.det() / g.det();
        worst = worst.max((lhs - rhs).abs() / lhs.abs().max(1.0));
    }
    let pass = worst <= 1e-12;
    rows.push(vec!["ma_expansion".into(), String::new(), "200".into(), num(worst), num(1e-12), pass.to_string(), String::new()]);
    out.checks.push(Check::new(None, "ma = 1 + lap + det h / det g", worst, "<= 1e-12", pass));

    // smoothing map inverts its inverse
    let mut worst: f64 = 0.0;
    let t = 1e-4;
    for _ in 0..1000 {
        let p = random_point(&mut rng, t);
        let back = smoothing_map(&inverse_map(&p)?, t)?;
        let err = p.ambient().iter().zip(back.ambient()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        worst = worst.max(err);
    }
    let pass = worst <= 1e-10;
    rows.push(vec!["smoothing_roundtrip".into(), num(t.powf(0.25)), "1000".into(), num(worst), num(1e-10), pass.to_string(), String::new()]);
    out.checks.push(Check::new(None, "smoothing_map o inverse_map = id", worst, "<= 1e-10", pass));

    out.tables.push(Table {
        name: "identities".into(),
        header: vec!["check", "delta", "samples", "max_error", "tolerance", "pass", "error"],
        rows,
    });
    Ok(out)
}

/// One sweep of the decay suite with the tolerance and criterion it is judged by.
#[derive(Debug, Clone, Copy)]
pub struct DecayItem {
    pub quantity: DecayQuantity,
    pub k: usize,
    pub criterion: Option<u8>,
    pub tolerance_key: &'static str,
}

/// The default decay sweeps: the annulus estimate at k = 0, 2 and the Ricci
/// potential region by region at k = 0.
pub fn default_decay_items() -> Vec<DecayItem> {
    let glue = 4.0 / 3.0;
    let mut items = vec![
        DecayItem { quantity: DecayQuantity::AnnulusDifference { alpha: glue }, k: 0, criterion: Some(3), tolerance_key: "annulus_k0" },
        DecayItem { quantity: DecayQuantity::AnnulusDifference { alpha: glue }, k: 2, criterion: Some(3), tolerance_key: "annulus_k2" },
        DecayItem { quantity: DecayQuantity::Ricci(RegionProbe::outer()), k: 0, criterion: Some(4), tolerance_key: "ricci_slope" },
    ];
    for alpha in [0.5, 1.0, glue, 5.0 / 3.0, 2.0] {
        let probe = RegionProbe::annulus(alpha).expect("alpha in range");
        items.push(DecayItem { quantity: DecayQuantity::Ricci(probe), k: 0, criterion: Some(4), tolerance_key: "ricci_slope" });
    }
    items
}

fn quantity_name(q: &DecayQuantity) -> &'static str {
    match q {
        DecayQuantity::AnnulusDifference { .. } => "phi1_minus_phi2",
        DecayQuantity::Ricci(_) => "ricci_potential",
    }
}

/// Decay sweeps, optionally restricted to one region and a derivative order.
/// A `k` other than the default one turns the sweep into a diagnostic.
pub fn sweep_decay(cfg: &ExperimentConfig, region: Option<RegionTag>, k: Option<usize>) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new(Suite::SweepDecay);
    let start = Instant::now();
    let base = cfg.base_params()?;
    let mut items: Vec<DecayItem> = default_decay_items()
        .into_iter()
        .filter(|it| region.is_none_or(|r| it.quantity.region() == r))
        .collect();
    if let Some(k) = k {
        items.retain(|it| it.k == k || !matches!(it.quantity, DecayQuantity::AnnulusDifference { .. }));
        for it in items.iter_mut().filter(|it| it.k != k) {
            it.k = k;
            it.criterion = None;
        }
    }
    let results: Vec<_> = items
        .par_iter()
        .map(|it| {
            let tol = cfg.tolerance(it.tolerance_key);
            (it, decay_sweep(it.quantity, &base, &cfg.delta_sweep, it.k, cfg.samples.decay, cfg.seed, tol))
        })
        .collect();
    let mut rows = Vec::new();
    let mut by_plot: Vec<(String, Series)> = Vec::new();
    for (it, res) in results {
        let q = it.quantity;
        let alpha = q.alpha().map(num).unwrap_or_default();
        let label = format!("{} {} alpha={} k={}", quantity_name(&q), q.region(), q.alpha().map(|a| format!("{a:.3}")).unwrap_or("-".into()), it.k);
        match res {
            Ok(sweep) => {
                for (d, n) in &sweep.norms {
                    rows.push(vec![
                        quantity_name(&q).into(),
                        q.region().to_string(),
                        alpha.clone(),
                        it.k.to_string(),
                        num(*d),
                        num(*n),
                        num(sweep.fit.slope),
                        num(sweep.fit.predicted),
                        num(sweep.fit.r_squared),
                        sweep.fit.pass.to_string(),
                        String::new(),
                    ]);
                }
                out.checks.push(Check::slope(it.criterion, &label, &sweep.fit));
                by_plot.push((
                    quantity_name(&q).into(),
                    Series { label: label.clone(), points: sweep.norms.clone(), predicted_slope: Some(sweep.fit.predicted) },
                ));
            }
            Err(e) => {
                rows.push(vec![
                    quantity_name(&q).into(),
                    q.region().to_string(),
                    alpha,
                    it.k.to_string(),
                    String::new(),
                    String::new(),
                    String::new(),
                    num(q.predicted(it.k)),
                    String::new(),
                    "false".into(),
                    e.to_string(),
                ]);
                out.checks.push(Check::new(it.criterion, label, f64::NAN, format!("{:.4}", q.predicted(it.k)), false));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    out.elapsed.extend([(3, secs), (4, secs)]);
    out.tables.push(Table {
        name: "decay".into(),
        header: vec!["quantity", "region", "alpha", "k", "delta", "norm", "slope", "predicted", "r_squared", "pass", "error"],
        rows,
    });
    for (name, title) in [("phi1_minus_phi2", "pre-gluing potential difference"), ("ricci_potential", "Ricci potential by region")] {
        let series: Vec<Series> = by_plot.iter().filter(|(n, _)| n == name).map(|(_, s)| s.clone()).collect();
        if !series.is_empty() {
            out.plots.push(Plot { name: format!("decay_{name}"), title: title.into(), y_label: "sup norm".into(), series });
        }
    }
    Ok(out)
}

/// One δ of the solve suite.
#[derive(Debug, Clone, Serialize)]
pub struct SolveRow {
    pub delta: f64,
    pub report: Option<SolveReport>,
    pub c_inv_doubled: Option<f64>,
    pub final_residual: Option<f64>,
    pub error: Option<String>,
}

fn solve_row(cfg: &ExperimentConfig, delta: f64, opts: &SolveOptions) -> SolveRow {
    let run = || -> Result<(SolveReport, f64)> {
        let params = cfg.params(delta)?;
        let bg = RadialBackground::new(&params, cfg.grid_nodes)?;
        let (_, report) = solve_on(&bg, opts)?;
        let fine = RadialBackground::new(&params, 2 * cfg.grid_nodes)?;
        let c2 = inverse_norm_estimate(&fine, cfg.beta)?;
        Ok((report, c2))
    };
    match run() {
        Ok((report, c2)) => SolveRow {
            delta,
            final_residual: report.residual_history.last().copied(),
            report: Some(report),
            c_inv_doubled: Some(c2),
            error: None,
        },
        Err(e) => SolveRow { delta, report: None, c_inv_doubled: None, final_residual: None, error: Some(e.to_string()) },
    }
}

/// Newton solves across the sweep with gate constants, invertibility and slopes.
///
/// Newton runs even where the gate rejects, so that every δ contributes to
/// the slope fits; the gate verdict is judged separately.
pub fn solve(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new(Suite::Solve);
    let start = Instant::now();
    let opts = SolveOptions {
        tol: cfg.tolerance("newton_residual"),
        override_gate: true,
        lipschitz_pairs: cfg.samples.lipschitz_pairs,
        seed: cfg.seed,
        ..SolveOptions::default()
    };
    let rows: Vec<SolveRow> = cfg.delta_sweep.par_iter().map(|&d| solve_row(cfg, d, &opts)).collect();
    let secs = start.elapsed().as_secs_f64();
    out.elapsed.extend([(5, secs), (6, secs)]);

    let mut table = Vec::new();
    for r in &rows {
        let mut row = vec![num(r.delta), num(cfg.beta), cfg.grid_nodes.to_string()];
        match &r.report {
            Some(rep) => {
                let gate = match rep.ift.rejection {
                    None => "accept",
                    Some(kelab::solver::IftRejection::ExceedsR0 { .. }) => "exceeds_r0",
                    Some(kelab::solver::IftRejection::ExceedsContraction { .. }) => "exceeds_contraction",
                };
                row.extend([
                    num(rep.ift.c_inv),
                    r.c_inv_doubled.map(num).unwrap_or_default(),
                    num(rep.ift.lipschitz),
                    num(rep.ift.r0),
                    num(rep.ift.initial_error),
                    num(rep.ift.initial_error_holder),
                    rep.ift.admissible_r.map(num).unwrap_or_default(),
                    gate.into(),
                    rep.converged.to_string(),
                    rep.iterations.to_string(),
                    r.final_residual.map(num).unwrap_or_default(),
                    num(rep.solution_norm_weighted),
                    num(rep.hessian_sup),
                    String::new(),
                ]);
            }
            None => {
                row.extend(std::iter::repeat_n(String::new(), 13));
                row.push(r.error.clone().unwrap_or_default());
            }
        }
        table.push(row);
    }
    out.tables.push(Table {
        name: "solve".into(),
        header: vec![
            "delta", "beta", "nodes", "c_inv", "c_inv_doubled", "lipschitz", "r0", "initial_error", "initial_error_holder",
            "admissible_r", "gate", "converged", "iterations", "final_residual", "solution_norm", "hessian_sup", "error",
        ],
        rows: table,
    });
    out.json.push(("solve_reports".into(), serde_json::to_value(&rows)?));

    let ok: Vec<(&SolveRow, &SolveReport)> = rows.iter().filter_map(|r| r.report.as_ref().map(|rep| (r, rep))).collect();
    for r in rows.iter().filter(|r| r.report.is_none()) {
        out.checks.push(Check::new(6, format!("solve delta={}", r.delta), f64::NAN, "no error", false));
        out.checks.push(Check::new(5, format!("inverse norm delta={}", r.delta), f64::NAN, "no error", false));
    }

    // uniform invertibility
    let factor = cfg.tolerance("invertibility_factor");
    let c: Vec<f64> = ok.iter().map(|(_, rep)| rep.ift.c_inv).collect();
    if !c.is_empty() {
        let spread = c.iter().fold(0.0f64, |a, b| a.max(*b)) / c.iter().fold(f64::INFINITY, |a, b| a.min(*b));
        out.checks.push(Check::new(5, "c_inv max/min across sweep", spread, format!("<= {factor}"), spread <= factor));
    }
    let stab = cfg.tolerance("grid_stability");
    for (r, rep) in &ok {
        let rel = (r.c_inv_doubled.unwrap_or(f64::NAN) / rep.ift.c_inv - 1.0).abs();
        out.checks.push(Check::new(5, format!("c_inv grid doubling delta={}", r.delta), rel, format!("<= {stab}"), rel <= stab));
    }

    // gate and convergence
    let res_tol = cfg.tolerance("newton_residual");
    for (r, rep) in &ok {
        let accepted = rep.ift.admissible_r.is_some();
        let measured = rep.ift.admissible_r.unwrap_or(f64::NAN);
        out.checks.push(Check::new(6, format!("ift gate delta={}", r.delta), measured, "accept", accepted));
        let res = r.final_residual.unwrap_or(f64::NAN);
        out.checks.push(Check::new(6, format!("newton residual delta={}", r.delta), res, format!("<= {res_tol:e}"), rep.converged && res <= res_tol));
    }
    let beta = cfg.beta;
    let tol = cfg.tolerance("solve_slope");
    let pts = |f: &dyn Fn(&SolveReport) -> f64| -> Vec<(f64, f64)> { ok.iter().map(|(r, rep)| (r.delta, f(rep))).collect() };
    let norm_pts = pts(&|r| r.solution_norm_weighted);
    let hess_pts = pts(&|r| r.hessian_sup);
    let init_pts = pts(&|r| r.ift.initial_error);
    if let Some(f) = fit(&norm_pts, (8.0 - 2.0 * beta) / 3.0, tol) {
        out.checks.push(Check::slope(6, "solution weighted norm slope", &f));
    }
    if let Some(f) = fit(&hess_pts, (2.0 + beta) / 3.0, tol) {
        out.checks.push(Check::slope(6, "pointwise hessian slope", &f));
    }
    if let Some(f) = fit(&init_pts, (8.0 - 2.0 * beta) / 3.0, tol) {
        out.checks.push(Check::slope(None, "initial error slope", &f));
    }
    out.plots.push(Plot {
        name: "solve".into(),
        title: format!("Newton solutions, beta = {beta}"),
        y_label: "norm".into(),
        series: vec![
            Series { label: "weighted C2 norm".into(), points: norm_pts, predicted_slope: Some((8.0 - 2.0 * beta) / 3.0) },
            Series { label: "sup |i ddbar phi|".into(), points: hess_pts, predicted_slope: Some((2.0 + beta) / 3.0) },
            Series { label: "initial error".into(), points: init_pts, predicted_slope: Some((8.0 - 2.0 * beta) / 3.0) },
        ],
    });
    Ok(out)
}

/// Gromov-Hausdorff bounds of the smoothing against the central fiber.
pub fn gh(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let mut out = SuiteOutput::new(Suite::Gh);
    let start = Instant::now();
    let opts = GhOptions {
        samples: cfg.samples.gh,
        neighbours: cfg.samples.gh_neighbours,
        seed: cfg.seed,
        nodes: cfg.grid_nodes,
        solve: SolveOptions {
            tol: cfg.tolerance("newton_residual"),
            override_gate: true,
            lipschitz_pairs: cfg.samples.lipschitz_pairs,
            seed: cfg.seed,
            ..SolveOptions::default()
        },
        cycle_samples: GhOptions::default().cycle_samples,
    };
    let rows: Vec<(f64, std::result::Result<ConvergenceRow, String>)> = cfg
        .delta_sweep
        .par_iter()
        .map(|&d| (d, cfg.params(d).map_err(|e| e.to_string()).and_then(|p| convergence_row(&p, &opts).map_err(|e| e.to_string()))))
        .collect();
    out.elapsed.push((7, start.elapsed().as_secs_f64()));

    let mut table = Vec::new();
    let mut good = Vec::new();
    for (d, r) in &rows {
        match r {
            Ok(row) => {
                table.push(vec![
                    num(*d),
                    num(row.eps_preglued),
                    num(row.eps_solved),
                    num(row.gh_bound),
                    num(row.cycle_diameter),
                    num(row.cycle_diameter / d),
                    row.worst_region.to_string(),
                    String::new(),
                ]);
                good.push(row);
            }
            Err(e) => {
                table.push(vec![num(*d), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), e.clone()]);
                out.checks.push(Check::new(7, format!("gh row delta={d}"), f64::NAN, "no error", false));
            }
        }
    }
    out.tables.push(Table {
        name: "gh".into(),
        header: vec!["delta", "eps_preglued", "eps_solved", "gh_bound", "cycle_diameter", "cycle_constant", "worst_region", "error"],
        rows: table,
    });

    let mut sorted: Vec<&ConvergenceRow> = good.clone();
    sorted.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    let worst_ratio = sorted.windows(2).map(|w| w[0].gh_bound / w[1].gh_bound).fold(0.0, f64::max);
    if sorted.len() >= 2 {
        out.checks.push(Check::new(7, "gh bound strictly decreasing as delta -> 0", worst_ratio, "< 1 between neighbours", worst_ratio < 1.0));
    }
    let beta = cfg.beta;
    let pts = |f: &dyn Fn(&ConvergenceRow) -> f64| -> Vec<(f64, f64)> { good.iter().map(|r| (r.delta, f(r))).collect() };
    let sol = pts(&|r| r.eps_solved);
    let pre = pts(&|r| r.eps_preglued);
    let cyc = pts(&|r| r.cycle_diameter);
    let bound = pts(&|r| r.gh_bound);
    if let Some(f) = fit(&sol, (2.0 + beta) / 6.0, cfg.tolerance("gh_slope")) {
        out.checks.push(Check::slope(7, "solved vs preglued distortion slope", &f));
    }
    if let Some(f) = fit(&cyc, 1.0, cfg.tolerance("cycle_slope")) {
        out.checks.push(Check::slope(7, "vanishing cycle diameter slope", &f));
    }
    if let Some(f) = fit(&pre, 1.0, f64::INFINITY) {
        out.checks.push(Check::new(None, "preglued vs cone distortion slope > 0", f.slope, "> 0", f.slope > 0.0));
    }
    let consts: Vec<f64> = good.iter().map(|r| r.cycle_diameter / r.delta).collect();
    if !consts.is_empty() {
        let mean = consts.iter().sum::<f64>() / consts.len() as f64;
        let dev = consts.iter().map(|c| (c / mean - 1.0).abs()).fold(0.0, f64::max);
        let tol = cfg.tolerance("cycle_constant");
        out.checks.push(Check::new(None, format!("cycle constant c = {mean:.4} stable"), dev, format!("<= {tol}"), dev <= tol));
    }
    out.plots.push(Plot {
        name: "gh".into(),
        title: "Gromov-Hausdorff bounds".into(),
        y_label: "distance".into(),
        series: vec![
            Series { label: "eps preglued vs cone".into(), points: pre, predicted_slope: None },
            Series { label: "eps solved vs preglued".into(), points: sol, predicted_slope: Some((2.0 + beta) / 6.0) },
            Series { label: "total GH bound".into(), points: bound, predicted_slope: None },
            Series { label: "cycle diameter".into(), points: cyc, predicted_slope: Some(1.0) },
        ],
    });
    Ok(out)
}

/// Node-count bound over all degrees.
pub fn node_bounds(cfg: &ExperimentConfig) -> Result<SuiteOutput> {
    let _ = cfg;
    let mut out = SuiteOutput::new(Suite::NodeBound);
    let start = Instant::now();
    let rows = (1..=9).map(|d| Ok(vec![d.to_string(), node_bound(d)?.to_string()])).collect::<Result<Vec<_>>>()?;
    for (deg, expected) in [(3, 4), (4, 2)] {
        let got = node_bound(deg)?;
        out.checks.push(Check::new(8, format!("node bound degree {deg}"), got as f64, format!("= {expected}"), got == expected));
    }
    out.elapsed.push((8, start.elapsed().as_secs_f64()));
    out.tables.push(Table { name: "node_bound".into(), header: vec!["degree", "max_nodes"], rows });
    Ok(out)
}

/// Runs one suite with its default selection.
pub fn run_suite(cfg: &ExperimentConfig, suite: Suite) -> Result<SuiteOutput> {
    match suite {
        Suite::VerifyIdentities => verify_identities(cfg),
        Suite::SweepDecay => sweep_decay(cfg, None, None),
        Suite::Solve => solve(cfg),
        Suite::Gh => gh(cfg),
        Suite::NodeBound => node_bounds(cfg),
    }
}
