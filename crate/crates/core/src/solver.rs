//! Monge-Ampere operator on the radial reduction, its linearization, the
//! inverse-norm proxy, the quantitative IFT gate and the damped Newton solve.
//!
//! Fields live on the cell-centred grid `x_i = (i + 1/2) h`, `i < n`, in
//! `x = arccosh(|w|^2 / t)`. The ghost node `x = -h/2` mirrors node 0 (even
//! reflection through the vanishing cycle) and the ghost node at
//! `x_max = arccosh(4 / t)`, i.e. `|w| = 2`, carries the Dirichlet value.

use nalgebra::{DMatrix, DVector};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::models::{ricci_radial_x, PotentialKind, PotentialSpec};
use crate::params::GluingParams;
use crate::weighted::WeightFunction;

/// Outer truncation radius `|w|`.
pub const OUTER_RADIUS: f64 = 2.0;
pub const MIN_NODES: usize = 64;
pub const DEFAULT_NODES: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    t: f64,
    h: f64,
    n: usize,
}

impl RadialGrid {
    pub fn new(t: f64, n: usize) -> Result<Self> {
        if n < MIN_NODES {
            return Err(LabError::InvalidParameter { name: "grid_nodes", reason: format!("{n} < {MIN_NODES}") });
        }
        if !(t > 0.0 && t < OUTER_RADIUS.powi(2)) {
            return Err(LabError::InvalidParameter { name: "t", reason: format!("{t} outside (0, 4)") });
        }
        let x_max = (OUTER_RADIUS.powi(2) / t).acosh();
        Ok(Self { t, h: x_max / (n as f64 + 0.5), n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h
    }

    pub fn x_max(&self) -> f64 {
        (self.n as f64 + 0.5) * self.h
    }

    /// `|w|` at node `i`.
    pub fn radius(&self, i: usize) -> f64 {
        (self.t * self.x(i).cosh()).sqrt()
    }

    /// `|w|` at an arbitrary grid coordinate.
    pub fn radius_at(&self, x: f64) -> f64 {
        (self.t * x.cosh()).sqrt()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

/// A scalar field sampled on a [`RadialGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialField {
    pub grid: RadialGrid,
    pub values: Vec<f64>,
    /// Dirichlet value at `|w| = 2`.
    pub boundary: f64,
}

impl RadialField {
    pub fn zeros(grid: RadialGrid) -> Self {
        Self { grid, values: vec![0.0; grid.len()], boundary: 0.0 }
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Self {
        Self { grid, values: grid.xs().into_iter().map(f).collect(), boundary: 0.0 }
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn padded(&self, i: isize) -> f64 {
        if i < 0 {
            self.values[0]
        } else if i as usize >= self.values.len() {
            self.boundary
        } else {
            self.values[i as usize]
        }
    }

    /// Centred `(phi_x, phi_xx)` at node `i`.
    pub fn derivatives(&self, i: usize) -> (f64, f64) {
        let h = self.grid.step();
        let (l, c, r) = (self.padded(i as isize - 1), self.values[i], self.padded(i as isize + 1));
        ((r - l) / (2.0 * h), (r - 2.0 * c + l) / (h * h))
    }

    fn map(&self, f: impl Fn(usize) -> f64) -> Self {
        Self { grid: self.grid, values: (0..self.grid.len()).map(f).collect(), boundary: 0.0 }
    }

    fn axpy(&self, a: f64, other: &Self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(x, y)| x + a * y).collect(),
            boundary: self.boundary + a * other.boundary,
        }
    }
}

/// The pre-glued background on a grid: potential jets, Ricci potential and weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialBackground {
    pub params: GluingParams,
    pub grid: RadialGrid,
    /// `(U, U_x, U_xx)` per node.
    pub jets: Vec<[f64; 3]>,
    pub ricci: Vec<f64>,
    pub rho: Vec<f64>,
}

impl RadialBackground {
    pub fn new(params: &GluingParams, nodes: usize) -> Result<Self> {
        if !params.is_radial() {
            return Err(LabError::InvalidParameter {
                name: "ph_coeffs",
                reason: "the radial solver needs vanishing pluriharmonic coefficients".into(),
            });
        }
        let grid = RadialGrid::new(params.t(), nodes)?;
        let spec = PotentialSpec::new(PotentialKind::Preglued, *params);
        let weight = WeightFunction::new(params.delta())?;
        let mut jets = Vec::with_capacity(nodes);
        let mut ricci = Vec::with_capacity(nodes);
        let mut rho = Vec::with_capacity(nodes);
        for i in 0..nodes {
            let x = grid.x(i);
            let jet = spec.x_jet(x);
            if !(jet[1] > 0.0 && jet[2] > 0.0) {
                return Err(LabError::MetricDegenerate { node: i, radius: grid.radius(i) });
            }
            jets.push(jet);
            ricci.push(ricci_radial_x(x, params)?);
            rho.push(weight.value(grid.radius(i)));
        }
        Ok(Self { params: *params, grid, jets, ricci, rho })
    }

    /// Replaces the Ricci potential (e.g. by zero for an Einstein background).
    pub fn with_ricci(mut self, ricci: Vec<f64>) -> Self {
        assert_eq!(ricci.len(), self.grid.len());
        self.ricci = ricci;
        self
    }

    pub fn ricci_field(&self) -> RadialField {
        RadialField { grid: self.grid, values: self.ricci.clone(), boundary: 0.0 }
    }

    /// Relative eigenvalues `(phi_x / U_x, phi_xx / U_xx)` of `i ddbar phi` against the background.
    pub fn relative_hessian(&self, phi: &RadialField, i: usize) -> (f64, f64) {
        let (px, pxx) = phi.derivatives(i);
        (px / self.jets[i][1], pxx / self.jets[i][2])
    }

    /// Pointwise `(|phi|, |nabla phi|, |i ddbar phi|)` measured with the background metric,
    /// whose radial length element is `sqrt(U_xx) dx / 2`.
    pub fn pointwise_jets(&self, phi: &RadialField, i: usize) -> [f64; 3] {
        let (px, _) = phi.derivatives(i);
        let (a, b) = self.relative_hessian(phi, i);
        [phi.values[i].abs(), 2.0 * px.abs() / self.jets[i][2].sqrt(), a.hypot(b)]
    }

    /// `sum_{j <= 2} sup rho^{-(beta - j)} |nabla^j phi|`.
    pub fn weighted_c2_norm(&self, phi: &RadialField, beta: f64) -> f64 {
        let mut sup = [0.0f64; 3];
        for i in 0..self.grid.len() {
            let jets = self.pointwise_jets(phi, i);
            for j in 0..3 {
                sup[j] = sup[j].max(self.rho[i].powf(-(beta - j as f64)) * jets[j]);
            }
        }
        sup.iter().sum()
    }

    /// `sup rho^{2 - beta} |psi|` for a codomain field.
    pub fn weighted_c0_norm(&self, psi: &RadialField, beta: f64) -> f64 {
        psi.values.iter().zip(&self.rho).fold(0.0, |m, (v, r)| m.max(r.powf(2.0 - beta) * v.abs()))
    }

    /// Sampled Holder seminorm of a codomain field with weight `rho^{2 - beta + gamma}`,
    /// over node pairs within `rho^2` in `|w|`, with distances from the background metric.
    pub fn weighted_holder(&self, psi: &RadialField, beta: f64, gamma: f64) -> f64 {
        let n = self.grid.len();
        let h = self.grid.step();
        let mut ell = vec![0.0; n];
        for i in 1..n {
            ell[i] = ell[i - 1] + 0.25 * h * (self.jets[i - 1][2].sqrt() + self.jets[i][2].sqrt());
        }
        let mut best: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let rho = self.rho[i].min(self.rho[j]);
                if self.grid.radius(j) - self.grid.radius(i) > rho * rho {
                    break;
                }
                let d = ell[j] - ell[i];
                let q = rho.powf(2.0 - beta + gamma) * (psi.values[i] - psi.values[j]).abs() / d.powf(gamma);
                best = best.max(q);
            }
        }
        best
    }

    fn check_positive(&self, phi: &RadialField) -> Result<()> {
        for i in 0..self.grid.len() {
            let (px, pxx) = phi.derivatives(i);
            if !(self.jets[i][1] + px > 0.0 && self.jets[i][2] + pxx > 0.0) {
                return Err(LabError::MetricDegenerate { node: i, radius: self.grid.radius(i) });
            }
        }
        Ok(())
    }
}

/// `(omega + i ddbar phi)^2 / omega^2 - e^{f - phi}`.
pub fn e_op(phi: &RadialField, bg: &RadialBackground) -> Result<RadialField> {
    bg.check_positive(phi)?;
    Ok(phi.map(|i| {
        let (a, b) = bg.relative_hessian(phi, i);
        (1.0 + a) * (1.0 + b) - (bg.ricci[i] - phi.values[i]).exp()
    }))
}

/// `Delta phi + e^f phi`, the linearization of [`e_op`] at zero.
pub fn d_op(phi: &RadialField, bg: &RadialBackground) -> RadialField {
    phi.map(|i| {
        let (a, b) = bg.relative_hessian(phi, i);
        a + b + bg.ricci[i].exp() * phi.values[i]
    })
}

/// `(i ddbar phi)^2 / omega^2 - e^f (phi - 1 + e^{-phi})`.
pub fn r_op(phi: &RadialField, bg: &RadialBackground) -> RadialField {
    phi.map(|i| {
        let (a, b) = bg.relative_hessian(phi, i);
        let p = phi.values[i];
        a * b - bg.ricci[i].exp() * (p - 1.0 + (-p).exp())
    })
}

/// Tridiagonal matrix stored by diagonals.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    /// Thomas algorithm; fails on a vanishing pivot.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.diag.len();
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut pivot = self.diag[0];
        for i in 0..n {
            if i > 0 {
                pivot = self.diag[i] - self.lower[i] * c[i - 1];
            }
            if pivot.abs() < 1e-300 {
                return Err(LabError::SingularOperator(pivot.abs()));
            }
            c[i] = if i + 1 < n { self.upper[i] / pivot } else { 0.0 };
            let prev = if i > 0 { self.lower[i] * d[i - 1] } else { 0.0 };
            d[i] = (rhs[i] - prev) / pivot;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            d[i] -= c[i] * d[i + 1];
        }
        Ok(d)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.diag.len();
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.diag[i]
            } else if j + 1 == i {
                self.lower[i]
            } else if i + 1 == j {
                self.upper[i]
            } else {
                0.0
            }
        })
    }
}

/// Jacobian of [`e_op`] at `phi`.
pub fn e_jacobian(phi: &RadialField, bg: &RadialBackground) -> Tridiagonal {
    let n = bg.grid.len();
    let h = bg.grid.step();
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    for i in 0..n {
        let (a, b) = bg.relative_hessian(phi, i);
        let ca = (1.0 + b) / bg.jets[i][1];
        let cb = (1.0 + a) / bg.jets[i][2];
        let lo = cb / (h * h) - ca / (2.0 * h);
        let up = cb / (h * h) + ca / (2.0 * h);
        diag[i] = -2.0 * cb / (h * h) + (bg.ricci[i] - phi.values[i]).exp();
        if i == 0 {
            diag[i] += lo;
        } else {
            lower[i] = lo;
        }
        if i + 1 < n {
            upper[i] = up;
        }
    }
    Tridiagonal { lower, diag, upper }
}

/// Reciprocal of the smallest singular value of
/// `diag(rho^{2 - beta}) D diag(rho^beta)`, the discrete weighted inverse norm.
pub fn inverse_norm_estimate(bg: &RadialBackground, beta: f64) -> Result<f64> {
    crate::params::check_beta(beta)?;
    let jac = e_jacobian(&RadialField::zeros(bg.grid), bg).to_dense();
    let left = DVector::from_iterator(bg.grid.len(), bg.rho.iter().map(|r| r.powf(2.0 - beta)));
    let right = DVector::from_iterator(bg.grid.len(), bg.rho.iter().map(|r| r.powf(beta)));
    let scaled = DMatrix::from_diagonal(&left) * jac * DMatrix::from_diagonal(&right);
    let sigma = scaled.singular_values();
    let smin = sigma.iter().copied().fold(f64::INFINITY, f64::min);
    if !(smin >= 1e-14) {
        return Err(LabError::SingularOperator(smin));
    }
    Ok(1.0 / smin)
}

/// Cosine modes in [`random_field`].
pub const RANDOM_MODES: usize = 6;

/// Smooth random field vanishing at `|w| = 2` and even at the cycle, with sup norm `amplitude`.
pub fn random_field(grid: RadialGrid, rng: &mut ChaCha8Rng, amplitude: f64) -> RadialField {
    let coeffs: Vec<f64> = (0..RANDOM_MODES).map(|_| rng.random_range(-1.0..1.0)).collect();
    let x_max = grid.x_max();
    let mut field = RadialField::from_fn(grid, |x| {
        coeffs
            .iter()
            .enumerate()
            .map(|(m, c)| c * ((m as f64 + 0.5) * std::f64::consts::PI * x / x_max).cos())
            .sum()
    });
    let sup = field.sup().max(1e-300);
    field.values.iter_mut().for_each(|v| *v *= amplitude / sup);
    field
}

/// Largest sampled quotient
/// `|R(p1) - R(p2)|_{beta-2} / (|p1 - p2|_beta (|p1|_beta + |p2|_beta))`
/// over random pairs of weighted size `scale`.
pub fn lipschitz_estimate(bg: &RadialBackground, beta: f64, scale: f64, pairs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = random_field(bg.grid, &mut rng, 1.0);
    let unit_norm = bg.weighted_c2_norm(&unit, beta);
    let mut best: f64 = 0.0;
    for _ in 0..pairs {
        let a = random_field(bg.grid, &mut rng, scale / unit_norm);
        let b = random_field(bg.grid, &mut rng, scale / unit_norm);
        let diff = a.axpy(-1.0, &b);
        let num = bg.weighted_c0_norm(&r_op(&a, bg).axpy(-1.0, &r_op(&b, bg)), beta);
        let den = bg.weighted_c2_norm(&diff, beta) * (bg.weighted_c2_norm(&a, beta) + bg.weighted_c2_norm(&b, beta));
        if den > 0.0 {
            best = best.max(num / den);
        }
    }
    best
}

/// Which hypothesis of the gate failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IftRejection {
    /// `r >= r0`.
    ExceedsR0 { r: f64, r0: f64 },
    /// `r >= 1 / (2 L C)`.
    ExceedsContraction { r: f64, bound: f64 },
}

/// Accepts with the smallest admissible `r = 2 C e` when `r < min(r0, 1 / (2 L C))`.
pub fn ift_gate(c_inv: f64, lipschitz: f64, r0: f64, initial_error: f64) -> std::result::Result<f64, IftRejection> {
    let r = 2.0 * c_inv * initial_error;
    let bound = 1.0 / (2.0 * lipschitz * c_inv);
    if r >= r0 {
        Err(IftRejection::ExceedsR0 { r, r0 })
    } else if r >= bound {
        Err(IftRejection::ExceedsContraction { r, bound })
    } else {
        Ok(r)
    }
}

/// Radius of the ball of the weighted space on which `sup |phi| <= rho^beta |phi|_beta <= 1`,
/// where the exponential part of the nonlinearity keeps its quadratic Lipschitz bound.
pub fn lipschitz_ball_radius(delta: f64, beta: f64) -> f64 {
    delta.powf(-beta)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IftReport {
    pub c_inv: f64,
    pub lipschitz: f64,
    pub r0: f64,
    pub initial_error: f64,
    /// Same error with the sampled Holder seminorm added.
    pub initial_error_holder: f64,
    pub admissible_r: Option<f64>,
    pub rejection: Option<IftRejection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub delta: f64,
    pub beta: f64,
    pub nodes: usize,
    pub residual_history: Vec<f64>,
    pub solution_norm_weighted: f64,
    pub hessian_sup: f64,
    pub ift: IftReport,
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iterations: usize,
    /// Run Newton even when the gate rejects.
    pub override_gate: bool,
    pub lipschitz_pairs: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iterations: 50, override_gate: false, lipschitz_pairs: 32, seed: 0 }
    }
}

/// Gate constants for a background.
pub fn ift_constants(bg: &RadialBackground, beta: f64, opts: &SolveOptions) -> Result<IftReport> {
    let c_inv = inverse_norm_estimate(bg, beta)?;
    let r0 = lipschitz_ball_radius(bg.params.delta(), beta);
    let lipschitz = lipschitz_estimate(bg, beta, 0.1 * r0, opts.lipschitz_pairs, opts.seed);
    let e0 = e_op(&RadialField::zeros(bg.grid), bg)?;
    let initial_error = bg.weighted_c0_norm(&e0, beta);
    let initial_error_holder = initial_error + bg.weighted_holder(&e0, beta, bg.params.gamma());
    let gate = ift_gate(c_inv, lipschitz, r0, initial_error);
    Ok(IftReport {
        c_inv,
        lipschitz,
        r0,
        initial_error,
        initial_error_holder,
        admissible_r: gate.ok(),
        rejection: gate.err(),
    })
}

/// Damped Newton iteration with Armijo backtracking on `sup |E|`.
pub fn newton_iterate(
    bg: &RadialBackground,
    start: RadialField,
    opts: &SolveOptions,
) -> Result<(RadialField, Vec<f64>)> {
    let mut phi = start;
    let mut residual = e_op(&phi, bg)?;
    let mut history = vec![residual.sup()];
    for _ in 0..opts.max_iterations {
        let norm = *history.last().unwrap();
        if norm <= opts.tol {
            return Ok((phi, history));
        }
        let jac = e_jacobian(&phi, bg);
        let rhs: Vec<f64> = residual.values.iter().map(|v| -v).collect();
        let step = RadialField { grid: bg.grid, values: jac.solve(&rhs)?, boundary: 0.0 };
        let mut lambda = 1.0;
        loop {
            let trial = phi.axpy(lambda, &step);
            if let Ok(r) = e_op(&trial, bg) {
                if r.sup() <= (1.0 - 1e-4 * lambda) * norm {
                    phi = trial;
                    residual = r;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                return Err(LabError::LineSearchStall(lambda));
            }
        }
        history.push(residual.sup());
    }
    if *history.last().unwrap() <= opts.tol {
        Ok((phi, history))
    } else {
        Err(LabError::MaxIterations(opts.max_iterations))
    }
}

/// Gate, then solve `E[phi] = 0` on the pre-glued background.
pub fn newton_solve(params: &GluingParams, nodes: usize, opts: &SolveOptions) -> Result<(RadialField, SolveReport)> {
    let bg = RadialBackground::new(params, nodes)?;
    solve_on(&bg, opts)
}

pub fn solve_on(bg: &RadialBackground, opts: &SolveOptions) -> Result<(RadialField, SolveReport)> {
    let beta = bg.params.beta();
    let ift = ift_constants(bg, beta, opts)?;
    if ift.admissible_r.is_none() && !opts.override_gate {
        return Ok((
            RadialField::zeros(bg.grid),
            SolveReport {
                delta: bg.params.delta(),
                beta,
                nodes: bg.grid.len(),
                residual_history: vec![],
                solution_norm_weighted: 0.0,
                hessian_sup: 0.0,
                ift,
                converged: false,
                iterations: 0,
            },
        ));
    }
    let (phi, history) = newton_iterate(bg, RadialField::zeros(bg.grid), opts)?;
    let hessian_sup = (0..bg.grid.len()).map(|i| bg.pointwise_jets(&phi, i)[2]).fold(0.0, f64::max);
    let report = SolveReport {
        delta: bg.params.delta(),
        beta,
        nodes: bg.grid.len(),
        iterations: history.len() - 1,
        residual_history: history,
        solution_norm_weighted: bg.weighted_c2_norm(&phi, beta),
        hessian_sup,
        ift,
        converged: true,
    };
    Ok((phi, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn background(delta: f64, nodes: usize) -> RadialBackground {
        RadialBackground::new(&GluingParams::new(delta).unwrap(), nodes).unwrap()
    }

    #[test]
    fn grid_reaches_outer_radius() {
        let g = RadialGrid::new(1e-4, 128).unwrap();
        assert_relative_eq!(g.radius_at(g.x_max()), 2.0, max_relative = 1e-12);
        assert!(g.radius(0) > 1e-2);
        assert!(RadialGrid::new(1e-4, 10).is_err());
    }

    #[test]
    fn thomas_matches_dense() {
        let tri = Tridiagonal {
            lower: vec![0.0, 1.0, -0.5, 0.3],
            diag: vec![4.0, 5.0, 3.0, 6.0],
            upper: vec![1.0, 0.2, 0.7, 0.0],
        };
        let rhs = [1.0, -2.0, 0.5, 3.0];
        let x = tri.solve(&rhs).unwrap();
        let back = tri.to_dense() * DVector::from_column_slice(&x);
        for (a, b) in back.iter().zip(rhs) {
            assert_relative_eq!(*a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn e_at_zero_is_initial_error() {
        let bg = background(0.05, 128);
        let e0 = e_op(&RadialField::zeros(bg.grid), &bg).unwrap();
        for (e, f) in e0.values.iter().zip(&bg.ricci) {
            assert_relative_eq!(*e, 1.0 - f.exp(), epsilon = 1e-15);
        }
    }

    #[test]
    fn constant_field_under_d() {
        let bg = background(0.05, 128).with_ricci(vec![0.0; 128]);
        let mut c = RadialField::from_fn(bg.grid, |_| 0.3);
        c.boundary = 0.3;
        for v in d_op(&c, &bg).values {
            assert_relative_eq!(v, 0.3, epsilon = 1e-12);
        }
    }

    #[test]
    fn d_is_derivative_of_e() {
        let bg = background(0.1, 128);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dir = random_field(bg.grid, &mut rng, 1e-3);
        let zero = RadialField::zeros(bg.grid);
        let e0 = e_op(&zero, &bg).unwrap();
        let lin = d_op(&dir, &bg);
        let err = |eps: f64| {
            let e = e_op(&zero.axpy(eps, &dir), &bg).unwrap();
            e.values
                .iter()
                .zip(&e0.values)
                .zip(&lin.values)
                .map(|((a, b), l)| ((a - b) / eps - l).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(1e-2), err(5e-3));
        assert!(e2 < 0.6 * e1, "{e1:e} {e2:e}");
    }

    #[test]
    fn decomposition_is_exact() {
        let bg = background(0.0625, 128);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let phi = random_field(bg.grid, &mut rng, 1e-4);
            let e = e_op(&phi, &bg).unwrap();
            let d = d_op(&phi, &bg);
            let r = r_op(&phi, &bg);
            for i in 0..bg.grid.len() {
                let sum = 1.0 - bg.ricci[i].exp() + d.values[i] + r.values[i];
                assert!((sum - e.values[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn r_is_quadratic() {
        let bg = background(0.1, 128);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let phi = random_field(bg.grid, &mut rng, 1.0);
        assert_eq!(r_op(&RadialField::zeros(bg.grid), &bg).sup(), 0.0);
        let q: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&eps| {
                let scaled = RadialField { values: phi.values.iter().map(|v| v * eps).collect(), ..phi.clone() };
                r_op(&scaled, &bg).sup() / (eps * eps)
            })
            .collect();
        assert!((q[2] / q[1] - 1.0).abs() < 0.05, "{q:?}");
    }

    #[test]
    fn einstein_background_solves_immediately() {
        let bg = background(0.05, 128).with_ricci(vec![0.0; 128]);
        let (phi, history) = newton_iterate(&bg, RadialField::zeros(bg.grid), &SolveOptions::default()).unwrap();
        assert_eq!(phi.sup(), 0.0);
        assert_eq!(history, vec![0.0]);
    }

    #[test]
    fn gate_arithmetic() {
        assert_relative_eq!(ift_gate(1.0, 1.0, 1.0, 0.1).unwrap(), 0.2);
        assert!(matches!(ift_gate(1.0, 1.0, 1.0, 0.3), Err(IftRejection::ExceedsContraction { .. })));
        assert!(matches!(ift_gate(1.0, 0.1, 0.1, 0.3), Err(IftRejection::ExceedsR0 { .. })));
    }

    #[test]
    fn newton_converges_quadratically() {
        let p = GluingParams::new(2f64.powi(-5)).unwrap();
        let (_, rep) = newton_solve(&p, 256, &SolveOptions::default()).unwrap();
        assert!(rep.converged);
        assert!(rep.ift.admissible_r.is_some());
        let h = &rep.residual_history;
        assert!(*h.last().unwrap() <= 1e-8);
        for w in h.windows(2) {
            assert!(w[1] < w[0]);
        }
        let n = h.len();
        if n >= 3 && h[n - 2] > 1e-12 {
            assert!(h[n - 1] <= 1e3 * h[n - 2] * h[n - 2], "{h:?}");
        }
    }

    #[test]
    fn non_radial_rejected() {
        let p = GluingParams::new(0.1).unwrap().with_ph_coeffs([num_complex::Complex64::new(1.0, 0.0); 3]);
        assert!(RadialBackground::new(&p, 128).is_err());
    }
}
