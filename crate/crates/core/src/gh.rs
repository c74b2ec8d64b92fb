//! Distances on the model metrics, the vanishing-cycle diameter, quasi-isometry
//! distortion and Gromov-Hausdorff upper bounds.
//!
//! All metrics here are radial: `omega = i ddbar u(|w|^2)`, which on a tangent
//! vector `v` at `w` gives `|v|^2_g = u_s |v|^2 + u_ss |<v, w>|^2`.

use num_complex::Complex64;
use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::charts::SurfacePoint;
use crate::error::{LabError, Result};
use crate::models::{PotentialKind, PotentialSpec, RegionTag};
use crate::params::GluingParams;
use crate::solver::{solve_on, RadialBackground, RadialField, SolveOptions, SolveReport};
use crate::weighted::{decay_fit, point_on_level, shell_samples, DecayFit};

type C64 = Complex64;

/// A Kahler metric given by a radial potential on `V_t`.
pub trait RadialMetric: Sync {
    fn t(&self) -> f64;

    /// `(u_s, u_ss)` at `s = |w|^2`.
    fn s_coefficients(&self, s: f64) -> (f64, f64);

    /// `dl / dx` along the radial curve, `x = arccosh(s / t)`; only used for `t > 0`.
    fn x_density(&self, x: f64) -> f64;

    /// `|v|_g` at the point `w`.
    fn vector_length(&self, w: &[C64; 3], v: &[C64; 3]) -> f64 {
        let s: f64 = w.iter().map(|c| c.norm_sqr()).sum();
        let (us, uss) = self.s_coefficients(s);
        let v2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        let inner: C64 = v.iter().zip(w).map(|(a, b)| a * b.conj()).sum();
        (us * v2 + uss * inner.norm_sqr()).max(0.0).sqrt()
    }
}

impl RadialMetric for PotentialSpec {
    fn t(&self) -> f64 {
        match self.kind {
            PotentialKind::Cone | PotentialKind::CentralModel => 0.0,
            _ => self.params.t(),
        }
    }

    fn s_coefficients(&self, s: f64) -> (f64, f64) {
        let [_, us, uss] = self.s_jet(s);
        (us, uss)
    }

    fn x_density(&self, x: f64) -> f64 {
        0.5 * self.x_jet(x)[2].max(0.0).sqrt()
    }
}

/// The metric `omega + i ddbar phi` of a solved field on its background.
pub struct SolvedMetric<'a> {
    pub background: &'a RadialBackground,
    pub phi: &'a RadialField,
    derivs: Vec<(f64, f64)>,
}

impl<'a> SolvedMetric<'a> {
    pub fn new(background: &'a RadialBackground, phi: &'a RadialField) -> Self {
        let derivs = (0..background.grid.len())
            .map(|i| {
                let (px, pxx) = phi.derivatives(i);
                (background.jets[i][1] + px, background.jets[i][2] + pxx)
            })
            .collect();
        Self { background, phi, derivs }
    }

    /// `(U_x + phi_x, U_xx + phi_xx)` linearly interpolated at `x`.
    fn x_derivatives(&self, x: f64) -> (f64, f64) {
        let g = &self.background.grid;
        let pos = x / g.step() - 0.5;
        let n = g.len();
        if pos <= 0.0 {
            return self.derivs[0];
        }
        if pos >= (n - 1) as f64 {
            return self.derivs[n - 1];
        }
        let i = pos.floor() as usize;
        let f = pos - i as f64;
        let (a, b) = (self.derivs[i], self.derivs[i + 1]);
        (a.0 + f * (b.0 - a.0), a.1 + f * (b.1 - a.1))
    }
}

impl RadialMetric for SolvedMetric<'_> {
    fn t(&self) -> f64 {
        self.background.grid.t()
    }

    fn s_coefficients(&self, s: f64) -> (f64, f64) {
        let t = self.t();
        let x = (s / t).max(1.0 + 1e-15).acosh();
        let (ux, uxx) = self.x_derivatives(x);
        let sh = x.sinh();
        (ux / (t * sh), (uxx - ux * x.cosh() / sh) / (t * t * sh * sh))
    }

    fn x_density(&self, x: f64) -> f64 {
        0.5 * self.x_derivatives(x).1.max(0.0).sqrt()
    }
}

fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    const NODES: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let mid = a + (k as f64 + 0.5) * h;
            NODES.iter().zip(WEIGHTS).map(|(x, w)| w * f(mid + 0.5 * h * x)).sum::<f64>() * 0.5 * h
        })
        .sum()
}

/// Length of the radial segment between `|w| = r1` and `|w| = r2`.
pub fn radial_distance<M: RadialMetric + ?Sized>(metric: &M, r1: f64, r2: f64) -> Result<f64> {
    let t = metric.t();
    let inner = t.sqrt();
    for r in [r1, r2] {
        if !(r >= inner * (1.0 - 1e-12) && r <= 2.0 * (1.0 + 1e-12)) {
            return Err(LabError::OutOfRange { value: r, lo: inner, hi: 2.0 });
        }
    }
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    if lo == hi {
        return Ok(0.0);
    }
    if t > 0.0 {
        let xa = ((lo * lo) / t).max(1.0).acosh();
        let xb = ((hi * hi) / t).max(1.0).acosh();
        Ok(gauss_legendre(|x| metric.x_density(x), xa, xb, 64))
    } else {
        // on the cone, dl = sqrt(u_s + u_ss s) dr in the variable log r
        let density = |l: f64| {
            let r = l.exp();
            let s = r * r;
            let (us, uss) = metric.s_coefficients(s);
            (us + uss * s).max(0.0).sqrt() * r
        };
        Ok(gauss_legendre(density, lo.ln(), hi.ln(), 64))
    }
}

/// Where a sampled space came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Cone,
    Smoothing { delta: f64 },
}

/// Finite metric space of graph-geodesic distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledMetricSpace {
    pub points: Vec<SurfacePoint>,
    distances: Vec<f64>,
    pub provenance: Provenance,
}

/// Undirected edge list over point indices.
pub type Edges = Vec<(usize, usize)>;

/// Edges to the `k` nearest neighbours of each listed source, ranked by
/// [`edge_length`] under `metric` so that long chords across the apex lose to
/// chains of short ones.
pub fn knn_edges<M: RadialMetric + ?Sized>(
    points: &[SurfacePoint],
    sources: impl IntoIterator<Item = usize>,
    k: usize,
    metric: &M,
) -> Edges {
    let sources: Vec<usize> = sources.into_iter().collect();
    let mut edges: Edges = sources
        .par_iter()
        .flat_map_iter(|&i| {
            let mut d: Vec<(f64, usize)> = (0..points.len())
                .filter(|&j| j != i)
                .map(|j| (edge_length(metric, &points[i], &points[j]), j))
                .collect();
            let k = k.min(d.len());
            if k > 0 {
                d.select_nth_unstable_by(k - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            }
            d.truncate(k);
            d.into_iter().map(move |(_, j)| (i.min(j), i.max(j)))
        })
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// Metric length of the chord between two points, averaged over its endpoints.
pub fn edge_length<M: RadialMetric + ?Sized>(metric: &M, p: &SurfacePoint, q: &SurfacePoint) -> f64 {
    let (a, b) = (p.ambient(), q.ambient());
    let v = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
    0.5 * (metric.vector_length(&a, &v) + metric.vector_length(&b, &v))
}

impl SampledMetricSpace {
    /// All-pairs shortest paths over `edges` with lengths from `metric`.
    pub fn from_edges<M: RadialMetric + ?Sized>(
        points: Vec<SurfacePoint>,
        edges: &Edges,
        metric: &M,
        provenance: Provenance,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(LabError::EmptySample);
        }
        let n = points.len();
        let mut graph = UnGraph::<(), f64>::with_capacity(n, edges.len());
        let nodes: Vec<NodeIndex> = (0..n).map(|_| graph.add_node(())).collect();
        for &(i, j) in edges {
            graph.add_edge(nodes[i], nodes[j], edge_length(metric, &points[i], &points[j]));
        }
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let found = dijkstra(&graph, nodes[i], None, |e| *e.weight());
                let mut row = vec![f64::INFINITY; n];
                for (node, d) in found {
                    row[node.index()] = d;
                }
                row
            })
            .collect();
        let mut distances = Vec::with_capacity(n * n);
        for row in rows {
            if row.iter().any(|d| !d.is_finite()) {
                return Err(LabError::DegenerateData("sample graph is disconnected".into()));
            }
            distances.extend(row);
        }
        // symmetrize exactly; both triangles come from the same graph
        for i in 0..n {
            for j in (i + 1)..n {
                let d = distances[i * n + j].min(distances[j * n + i]);
                distances[i * n + j] = d;
                distances[j * n + i] = d;
            }
        }
        Ok(Self { points, distances, provenance })
    }

    /// kNN graph geodesics; `k` is raised until the graph is connected.
    pub fn from_knn<M: RadialMetric + ?Sized>(
        points: Vec<SurfacePoint>,
        k: usize,
        metric: &M,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = points.len();
        let mut k = k.max(1);
        loop {
            let edges = knn_edges(&points, 0..n, k, metric);
            match Self::from_edges(points.clone(), &edges, metric, provenance) {
                Err(LabError::DegenerateData(_)) if k < n => k *= 2,
                other => return other,
            }
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i * self.len() + j]
    }

    pub fn diameter(&self) -> f64 {
        self.distances.iter().copied().fold(0.0, f64::max)
    }

    /// Largest violation of the triangle inequality over all triples.
    pub fn triangle_defect(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max(self.distance(i, k) - self.distance(i, j) - self.distance(j, k));
                }
            }
        }
        worst
    }

    /// Uniformly rescaled copy.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { distances: self.distances.iter().map(|d| d * factor).collect(), ..self.clone() }
    }
}

/// Outcome of a quasi-isometry test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distortion {
    /// `max |d_X(p, q) - d_Y(F p, F q)|`.
    pub distortion: f64,
    /// `max_y min_p d_Y(y, F p)`.
    pub covering: f64,
    pub epsilon: f64,
    /// Indices in `X` of the pair realizing `distortion`.
    pub worst_pair: (usize, usize),
}

/// `map[i]` is the index in `y` of the image of `x.points[i]`.
pub fn distortion(map: &[usize], x: &SampledMetricSpace, y: &SampledMetricSpace) -> Result<Distortion> {
    if map.is_empty() || map.len() != x.len() {
        return Err(LabError::EmptyCorrespondence);
    }
    if let Some(&bad) = map.iter().find(|&&j| j >= y.len()) {
        return Err(LabError::InvalidParameter { name: "map", reason: format!("image index {bad} out of range") });
    }
    let n = x.len();
    let (distortion, worst_pair) = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = (0.0f64, (i, i));
            for j in (i + 1)..n {
                let d = (x.distance(i, j) - y.distance(map[i], map[j])).abs();
                if d > best.0 {
                    best = (d, (i, j));
                }
            }
            best
        })
        .reduce(|| (0.0, (0, 0)), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    let covering = (0..y.len())
        .into_par_iter()
        .map(|k| map.iter().map(|&j| y.distance(k, j)).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max);
    Ok(Distortion { distortion, covering, epsilon: distortion.max(covering), worst_pair })
}

/// `d_GH <= 3 eps` for an `eps`-quasi isometry.
pub fn gh_upper_bound(epsilon: f64) -> Result<f64> {
    if !(epsilon >= 0.0) {
        return Err(LabError::InvalidParameter { name: "epsilon", reason: format!("must be nonnegative, got {epsilon}") });
    }
    Ok(3.0 * epsilon)
}

/// Fibonacci lattice on the unit sphere.
fn fibonacci_sphere(m: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..m)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / m as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Points of the vanishing cycle `{sqrt(t) e : e in S^2}`.
pub fn cycle_points(t: f64, m: usize) -> Vec<SurfacePoint> {
    fibonacci_sphere(m)
        .into_iter()
        .map(|e| SurfacePoint::from_ambient(e.map(|c| C64::new(t.sqrt() * c, 0.0)), t))
        .collect()
}

pub const CYCLE_SAMPLES: usize = 600;
pub const CYCLE_NEIGHBOURS: usize = 8;

/// Intrinsic diameter of the vanishing cycle under the Eguchi-Hanson metric,
/// as the largest graph-geodesic distance over a Fibonacci lattice.
pub fn vanishing_cycle_diameter(params: &GluingParams) -> Result<f64> {
    let eh = PotentialSpec::new(PotentialKind::EguchiHanson, *params);
    let pts = cycle_points(params.t(), CYCLE_SAMPLES);
    let space = SampledMetricSpace::from_knn(pts, CYCLE_NEIGHBOURS, &eh, Provenance::Smoothing { delta: params.delta() })?;
    Ok(space.diameter())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhOptions {
    pub samples: usize,
    pub neighbours: usize,
    pub cycle_samples: usize,
    pub seed: u64,
    pub nodes: usize,
    pub solve: SolveOptions,
}

impl Default for GhOptions {
    fn default() -> Self {
        Self { samples: 600, neighbours: 10, cycle_samples: 64, seed: 0, nodes: crate::solver::DEFAULT_NODES, solve: SolveOptions { override_gate: true, ..SolveOptions::default() } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub delta: f64,
    pub eps_preglued: f64,
    pub eps_solved: f64,
    pub gh_bound: f64,
    pub cycle_diameter: f64,
    /// Region of the inner point of the pair with largest pre-glued distortion.
    pub worst_region: RegionTag,
    pub solve: SolveReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    pub eps_solved_fit: Option<DecayFit>,
    pub eps_preglued_fit: Option<DecayFit>,
    pub cycle_fit: Option<DecayFit>,
    pub bound_decreasing: bool,
}

/// One row of the experiment: samples `z` of the central fiber with
/// `delta^2 / 4 <= |z| <= 2` under the central-model metric, mapped by the smoothing map (collapsed points to the pole of the cycle),
/// compared first against the pre-glued metric on the transported graph and
/// then, by the identity, against the solved metric.
pub fn convergence_row(params: &GluingParams, opts: &GhOptions) -> Result<ConvergenceRow> {
    let delta = params.delta();
    let t = params.t();
    let cone_pts = shell_samples(0.25 * delta * delta, 2.0, 0.0, opts.samples, opts.seed)?;
    let n = cone_pts.len();
    let cone_metric = PotentialSpec::new(PotentialKind::CentralModel, *params);
    let cone_edges = knn_edges(&cone_pts, 0..n, opts.neighbours, &cone_metric);
    let cone = SampledMetricSpace::from_edges(cone_pts.clone(), &cone_edges, &cone_metric, Provenance::Cone)?;

    let pole = point_on_level(t, t, &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    let mut images: Vec<SurfacePoint> = cone_pts
        .iter()
        .map(|z| crate::models::smoothing_map(z, t).unwrap_or(pole))
        .collect();
    let cycle = cycle_points(t, opts.cycle_samples);
    images.extend(cycle);
    let total = images.len();
    let mut edges = cone_edges.clone();
    let preglued = PotentialSpec::new(PotentialKind::Preglued, *params);
    edges.extend(knn_edges(&images, n..total, opts.neighbours, &preglued));
    edges.sort_unstable();
    edges.dedup();
    let map: Vec<usize> = (0..n).collect();

    let provenance = Provenance::Smoothing { delta };
    let y = SampledMetricSpace::from_edges(images.clone(), &edges, &preglued, provenance)?;
    let pre = distortion(&map, &cone, &y)?;

    let bg = RadialBackground::new(params, opts.nodes)?;
    let (phi, solve) = solve_on(&bg, &opts.solve)?;
    let solved_metric = SolvedMetric::new(&bg, &phi);
    let z = SampledMetricSpace::from_edges(images, &edges, &solved_metric, provenance)?;
    let identity: Vec<usize> = (0..total).collect();
    let sol = distortion(&identity, &y, &z)?;

    let (i, j) = pre.worst_pair;
    let inner = y.points[i].modulus().min(y.points[j].modulus());
    Ok(ConvergenceRow {
        delta,
        eps_preglued: pre.epsilon,
        eps_solved: sol.epsilon,
        gh_bound: gh_upper_bound(pre.epsilon)? + gh_upper_bound(sol.epsilon)?,
        cycle_diameter: vanishing_cycle_diameter(params)?,
        worst_region: RegionTag::classify(inner, delta),
        solve,
    })
}

/// Rows for each `delta` (computed concurrently, returned in input order) with slope fits.
pub fn convergence_experiment(deltas: &[f64], base: &GluingParams, opts: &GhOptions) -> Result<ConvergenceTable> {
    let rows: Vec<ConvergenceRow> = deltas
        .par_iter()
        .map(|&d| convergence_row(&base.with_delta(d)?, opts))
        .collect::<Result<_>>()?;
    let fit = |f: &dyn Fn(&ConvergenceRow) -> f64, predicted: f64, tol: f64| {
        decay_fit(&rows.iter().map(|r| (r.delta, f(r))).collect::<Vec<_>>(), predicted, tol).ok()
    };
    let beta = base.beta();
    let mut sorted: Vec<(f64, f64)> = rows.iter().map(|r| (r.delta, r.gh_bound)).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(ConvergenceTable {
        eps_solved_fit: fit(&|r| r.eps_solved, (2.0 + beta) / 6.0, 0.2),
        eps_preglued_fit: fit(&|r| r.eps_preglued, 0.0, f64::INFINITY),
        cycle_fit: fit(&|r| r.cycle_diameter, 1.0, 0.05),
        bound_decreasing: sorted.windows(2).all(|w| w[0].1 < w[1].1),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(delta: f64) -> GluingParams {
        GluingParams::new(delta).unwrap()
    }

    #[test]
    fn cone_radial_distance_closed_form() {
        let cone = PotentialSpec::new(PotentialKind::Cone, params(0.25));
        for (a, b) in [(0.01, 0.02), (0.1, 1.7), (0.5, 2.0)] {
            let d = radial_distance(&cone, a, b).unwrap();
            assert!((d - (b.sqrt() - a.sqrt())).abs() < 1e-12, "{a} {b} {d}");
        }
        assert_eq!(radial_distance(&cone, 0.3, 0.3).unwrap(), 0.0);
        assert!(matches!(radial_distance(&cone, 0.3, 2.5), Err(LabError::OutOfRange { .. })));
    }

    #[test]
    fn radial_distance_is_additive() {
        let eh = PotentialSpec::new(PotentialKind::EguchiHanson, params(0.25));
        let (a, b, c) = (0.07, 0.3, 1.9);
        let whole = radial_distance(&eh, a, c).unwrap();
        let parts = radial_distance(&eh, a, b).unwrap() + radial_distance(&eh, b, c).unwrap();
        assert!((whole - parts).abs() < 1e-10);
        assert!(matches!(radial_distance(&eh, 0.01, 1.0), Err(LabError::OutOfRange { .. })));
    }

    #[test]
    fn eh_radial_distance_approaches_cone() {
        let p = params(0.125);
        let eh = PotentialSpec::new(PotentialKind::EguchiHanson, p);
        let d = radial_distance(&eh, 0.5, 2.0).unwrap();
        assert!((d - (2f64.sqrt() - 0.5f64.sqrt())).abs() < 1e-4);
    }

    #[test]
    fn identity_and_rescale_distortion() {
        let p = params(0.25);
        let eh = PotentialSpec::new(PotentialKind::EguchiHanson, p);
        let pts = shell_samples(0.1, 1.0, p.t(), 60, 3).unwrap();
        let x = SampledMetricSpace::from_knn(pts, 8, &eh, Provenance::Smoothing { delta: 0.25 }).unwrap();
        let id: Vec<usize> = (0..x.len()).collect();
        let d0 = distortion(&id, &x, &x).unwrap();
        assert_eq!(d0.epsilon, 0.0);
        let lambda = 0.1;
        let y = x.scaled(1.0 + lambda);
        let d1 = distortion(&id, &x, &y).unwrap();
        assert!((d1.epsilon - lambda * x.diameter()).abs() < 1e-12);
        assert!(x.triangle_defect() <= 1e-8);
        assert!(matches!(distortion(&[], &x, &y), Err(LabError::EmptyCorrespondence)));
    }

    #[test]
    fn gh_bound_factor_three() {
        assert_eq!(gh_upper_bound(0.0).unwrap(), 0.0);
        assert!((gh_upper_bound(0.1).unwrap() - 0.3).abs() < 1e-15);
        assert!(gh_upper_bound(-1.0).is_err());
    }

    #[test]
    fn cycle_diameter_scales_with_delta() {
        let a = vanishing_cycle_diameter(&params(0.125)).unwrap();
        let b = vanishing_cycle_diameter(&params(0.25)).unwrap();
        assert!((b / a - 2.0).abs() < 0.04, "{a} {b}");
        // round sphere of radius delta / 2^(3/4)
        let exact = std::f64::consts::PI * 0.25 / 2f64.powf(0.75);
        assert!((b / exact - 1.0).abs() < 0.1, "{b} vs {exact}");
    }

    #[test]
    fn zero_field_reproduces_background() {
        let p = params(0.125);
        let bg = RadialBackground::new(&p, 256).unwrap();
        let phi = RadialField::zeros(bg.grid);
        let solved = SolvedMetric::new(&bg, &phi);
        let pre = PotentialSpec::new(PotentialKind::Preglued, p);
        for s in [0.01, 0.2, 1.0, 3.0] {
            let (a, b) = solved.s_coefficients(s);
            let (c, d) = pre.s_coefficients(s);
            assert!((a / c - 1.0).abs() < 1e-3, "{s}: {a} {c}");
            assert!((b - d).abs() < 1e-2 * d.abs().max(1.0), "{s}: {b} {d}");
        }
    }
}
