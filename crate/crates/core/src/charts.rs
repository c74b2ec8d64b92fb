//! Coordinate charts on the local quadrics `V_t = {w1^2 + w2^2 + w3^2 = t}`
//! and the pointwise differential operators evaluated in them.
//!
//! A chart solves one ambient coordinate in terms of the other two. The
//! solved coordinate is always the one of largest modulus when a point is
//! built from ambient data, so `|w_solved|^2 >= |w|^2 / 3`.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Which ambient coordinate is solved, and on which branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ChartId {
    solved: u8,
    positive: bool,
}

impl ChartId {
    pub const W1_PLUS: ChartId = ChartId { solved: 0, positive: true };
    pub const W1_MINUS: ChartId = ChartId { solved: 0, positive: false };
    pub const W2_PLUS: ChartId = ChartId { solved: 1, positive: true };
    pub const W2_MINUS: ChartId = ChartId { solved: 1, positive: false };
    pub const W3_PLUS: ChartId = ChartId { solved: 2, positive: true };
    pub const W3_MINUS: ChartId = ChartId { solved: 2, positive: false };

    pub const ALL: [ChartId; 6] = [
        Self::W1_PLUS,
        Self::W1_MINUS,
        Self::W2_PLUS,
        Self::W2_MINUS,
        Self::W3_PLUS,
        Self::W3_MINUS,
    ];

    pub fn new(solved: usize, positive: bool) -> Self {
        assert!(solved < 3, "chart index out of range");
        Self { solved: solved as u8, positive }
    }

    /// Index (0-based) of the solved ambient coordinate.
    pub fn solved(&self) -> usize {
        self.solved as usize
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    /// Ambient indices of the two free coordinates, in cyclic order.
    pub fn free(&self) -> [usize; 2] {
        let k = self.solved();
        [(k + 1) % 3, (k + 2) % 3]
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "W{}{}", self.solved + 1, if self.positive { '+' } else { '-' })
    }
}

/// A point of `V_t` carried in an explicit chart.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    chart: ChartId,
    u: [C64; 2],
    solved_value: C64,
    t: f64,
}

fn sqrt_arg(u: &[C64; 2], t: f64) -> C64 {
    C64::new(t, 0.0) - u[0] * u[0] - u[1] * u[1]
}

/// Lifts free coordinates `u` to `V_t` in the given chart using the principal
/// square root (cut on the negative reals).
pub fn chart_lift(u: [C64; 2], t: f64, chart: ChartId) -> Result<SurfacePoint> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(LabError::InvalidParameter {
            name: "t",
            reason: format!("must be nonnegative, got {t}"),
        });
    }
    let arg = sqrt_arg(&u, t);
    if arg.im == 0.0 && arg.re < 0.0 {
        return Err(LabError::BranchCut { re: arg.re, im: arg.im });
    }
    let root = arg.sqrt();
    let solved_value = if chart.positive { root } else { -root };
    Ok(SurfacePoint { chart, u, solved_value, t })
}

impl SurfacePoint {
    /// Builds a chart point from ambient coordinates, solving for the
    /// coordinate of maximal modulus. The solved value is recomputed from the
    /// free coordinates on the branch nearest to the supplied one, so the
    /// result lies on `V_t` to rounding.
    pub fn from_ambient(w: [C64; 3], t: f64) -> Self {
        let k = (0..3)
            .max_by(|&a, &b| w[a].norm_sqr().total_cmp(&w[b].norm_sqr()))
            .unwrap();
        let probe = ChartId::new(k, true);
        let [i, j] = probe.free();
        let u = [w[i], w[j]];
        let root = sqrt_arg(&u, t).sqrt();
        let (solved_value, positive) = if (root - w[k]).norm() <= (root + w[k]).norm() {
            (root, true)
        } else {
            (-root, false)
        };
        Self { chart: ChartId::new(k, positive), u, solved_value, t }
    }

    pub fn chart(&self) -> ChartId {
        self.chart
    }

    pub fn free_coords(&self) -> [C64; 2] {
        self.u
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn solved_value(&self) -> C64 {
        self.solved_value
    }

    /// Ambient coordinates `(w1, w2, w3)`.
    pub fn ambient(&self) -> [C64; 3] {
        let mut w = [ZERO; 3];
        let [i, j] = self.chart.free();
        w[i] = self.u[0];
        w[j] = self.u[1];
        w[self.chart.solved()] = self.solved_value;
        w
    }

    /// `|w1^2 + w2^2 + w3^2 - t|`.
    pub fn residual(&self) -> f64 {
        let w = self.ambient();
        (w[0] * w[0] + w[1] * w[1] + w[2] * w[2] - self.t).norm()
    }

    /// Ambient point for the displaced free coordinates `u + du`, continuing
    /// the solved coordinate along the branch nearest to this point.
    pub fn displaced(&self, du: [C64; 2]) -> [C64; 3] {
        let u = [self.u[0] + du[0], self.u[1] + du[1]];
        let root = sqrt_arg(&u, self.t).sqrt();
        let solved = if (root - self.solved_value).norm() <= (root + self.solved_value).norm() {
            root
        } else {
            -root
        };
        let mut w = [ZERO; 3];
        let [i, j] = self.chart.free();
        w[i] = u[0];
        w[j] = u[1];
        w[self.chart.solved()] = solved;
        w
    }

    /// Re-expresses the same ambient point in another chart.
    pub fn rechart(&self, chart: ChartId) -> Result<SurfacePoint> {
        let w = self.ambient();
        let [i, j] = chart.free();
        let k = chart.solved();
        let u = [w[i], w[j]];
        let threshold = 1e-8 * self.modulus().max(self.t.sqrt());
        if w[k].norm() < threshold {
            return Err(LabError::DegenerateChart { modulus: w[k].norm(), threshold });
        }
        let root = sqrt_arg(&u, self.t).sqrt();
        let positive = (root - w[k]).norm() <= (root + w[k]).norm();
        Ok(SurfacePoint { chart: ChartId::new(k, positive), u, solved_value: w[k], t: self.t })
    }

    /// `|w|`.
    pub fn modulus(&self) -> f64 {
        ambient_norm2(self).sqrt()
    }

    /// Jacobian `dw_k / du_a` of the chart embedding (rows: ambient index).
    fn jacobian(&self) -> [[C64; 2]; 3] {
        let mut jac = [[ZERO; 2]; 3];
        let [i, j] = self.chart.free();
        jac[i] = [ONE, ZERO];
        jac[j] = [ZERO, ONE];
        let k = self.chart.solved();
        jac[k] = [-self.u[0] / self.solved_value, -self.u[1] / self.solved_value];
        jac
    }
}

/// `s = |w|^2`.
pub fn ambient_norm2(p: &SurfacePoint) -> f64 {
    p.ambient().iter().map(|c| c.norm_sqr()).sum()
}

fn degeneracy_check(p: &SurfacePoint) -> Result<()> {
    let modulus = p.solved_value.norm();
    let threshold = 1e-8 * p.modulus().max(p.t.sqrt());
    if modulus < threshold || modulus == 0.0 {
        Err(LabError::DegenerateChart { modulus, threshold })
    } else {
        Ok(())
    }
}

/// Coefficient of the residue form `Omega_t = dw_i ^ dw_j / (2 w_k)` in the
/// chart frame, where `k` is the solved index and `(i, j)` the free indices in
/// cyclic order.
pub fn holomorphic_volume_form(p: &SurfacePoint) -> Result<C64> {
    degeneracy_check(p)?;
    Ok(1.0 / (2.0 * p.solved_value))
}

/// The 2x2 Hermitian matrix of a real (1,1)-form in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermitianForm2 {
    pub entries: [[C64; 2]; 2],
}

impl HermitianForm2 {
    pub fn new(entries: [[C64; 2]; 2]) -> Self {
        Self { entries }
    }

    pub fn zero() -> Self {
        Self { entries: [[ZERO; 2]; 2] }
    }

    pub fn identity() -> Self {
        Self { entries: [[ONE, ZERO], [ZERO, ONE]] }
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i][j]
    }

    pub fn det(&self) -> f64 {
        let e = &self.entries;
        (e[0][0] * e[1][1] - e[0][1] * e[1][0]).re
    }

    pub fn trace(&self) -> f64 {
        self.entries[0][0].re + self.entries[1][1].re
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { entries: self.entries.map(|row| row.map(|c| c * factor)) }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut entries = self.entries;
        for (i, row) in entries.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c += other.entries[i][j];
            }
        }
        Self { entries }
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn asymmetry(&self) -> f64 {
        let e = &self.entries;
        let off = (e[0][1] - e[1][0].conj()).norm();
        off.max(e[0][0].im.abs()).max(e[1][1].im.abs())
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        let e = &self.entries;
        let (a, d) = (e[0][0].re, e[1][1].re);
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + e[0][1].norm_sqr()).sqrt();
        [mean - rad, mean + rad]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn inverse(&self) -> Self {
        let e = &self.entries;
        let det = e[0][0] * e[1][1] - e[0][1] * e[1][0];
        Self { entries: [[e[1][1] / det, -e[0][1] / det], [-e[1][0] / det, e[0][0] / det]] }
    }

    fn mul(&self, other: &Self) -> [[C64; 2]; 2] {
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, c) in row.iter_mut().enumerate() {
                *c = self.entries[i][0] * other.entries[0][j] + self.entries[i][1] * other.entries[1][j];
            }
        }
        out
    }

    /// Pointwise norm `sqrt(tr(g^-1 h g^-1 h))` of `h` measured with the metric `g`.
    pub fn norm_in(&self, g: &HermitianForm2) -> Result<f64> {
        ensure_positive(g)?;
        let a = HermitianForm2::new(g.inverse().mul(self));
        let sq = a.mul(&a);
        Ok((sq[0][0] + sq[1][1]).re.max(0.0).sqrt())
    }

    /// `sum g^{i j-bar} v_i conj(v_j)` for a (1,0)-covector `v`.
    pub fn covector_norm2(&self, v: [C64; 2]) -> Result<f64> {
        ensure_positive(self)?;
        let inv = self.inverse();
        let mut acc = ZERO;
        for i in 0..2 {
            for j in 0..2 {
                acc += v[i] * inv.entries[j][i] * v[j].conj();
            }
        }
        Ok(acc.re)
    }
}

fn ensure_positive(g: &HermitianForm2) -> Result<()> {
    let min_eigenvalue = g.min_eigenvalue();
    if min_eigenvalue > 0.0 {
        Ok(())
    } else {
        Err(LabError::NotPositive { min_eigenvalue, modulus: f64::NAN })
    }
}

/// `det(g + h) / det(g)`.
pub fn ma_ratio(g: &HermitianForm2, h: &HermitianForm2) -> Result<f64> {
    ensure_positive(g)?;
    Ok(g.add(h).det() / g.det())
}

/// `tr(g^-1 h)`, normalized so that it is the derivative of `ma_ratio(g, eps h)` at `eps = 0`.
pub fn laplacian(g: &HermitianForm2, h: &HermitianForm2) -> Result<f64> {
    ensure_positive(g)?;
    let prod = g.inverse().mul(h);
    Ok((prod[0][0] + prod[1][1]).re)
}

/// `g^2 / (C Omega ^ Omega-bar)`: the determinant of `g` divided by `|Omega|^2`
/// in the same chart, times `normalization`.
pub fn vol_ratio_to_omega(g: &HermitianForm2, p: &SurfacePoint, normalization: f64) -> Result<f64> {
    ensure_positive(g)?;
    let omega = holomorphic_volume_form(p)?;
    Ok(normalization * g.det() / omega.norm_sqr())
}

/// A real potential on the ambient space, restricted to `V_t`.
pub trait Potential {
    fn value(&self, w: &[C64; 3]) -> f64;

    /// `(u, du/ds, d^2u/ds^2)` at `s = |w|^2` when the potential depends on `s` only.
    fn radial_jet(&self, _s: f64) -> Option<[f64; 3]> {
        None
    }
}

/// Wraps a closure as a non-radial potential.
pub struct FnPotential<F>(pub F);

impl<F: Fn(&[C64; 3]) -> f64> Potential for FnPotential<F> {
    fn value(&self, w: &[C64; 3]) -> f64 {
        (self.0)(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HessianMode {
    AnalyticRadial,
    /// Central differences with step `eps * max(|w|, sqrt(t))`.
    FiniteDifference { eps: f64 },
}

impl HessianMode {
    pub const DEFAULT_FD: HessianMode = HessianMode::FiniteDifference { eps: 1e-3 };
}

/// `d^2 phi / du_i d(conj u_j)` in the chart of `p`.
pub fn complex_hessian<P: Potential + ?Sized>(
    potential: &P,
    p: &SurfacePoint,
    mode: HessianMode,
) -> Result<HermitianForm2> {
    match mode {
        HessianMode::AnalyticRadial => {
            let s = ambient_norm2(p);
            let [_, d1, d2] = potential.radial_jet(s).ok_or(LabError::UnregisteredRadial)?;
            let (metric, ds) = s_derivatives(p);
            let mut entries = [[ZERO; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    entries[i][j] = metric[i][j] * d1 + ds[i] * ds[j].conj() * d2;
                }
            }
            Ok(HermitianForm2 { entries })
        }
        HessianMode::FiniteDifference { eps } => {
            let h = eps * p.modulus().max(p.t.sqrt());
            if !(h >= 1e-12) {
                return Err(LabError::StepUnderflow { step: h });
            }
            Ok(fd_hessian(potential, p, h))
        }
    }
}

/// Chart gradient `d phi / du_i` by central differences.
pub fn chart_gradient<P: Potential + ?Sized>(potential: &P, p: &SurfacePoint, eps: f64) -> Result<[C64; 2]> {
    if let Some([_, d1, _]) = potential.radial_jet(ambient_norm2(p)) {
        let (_, ds) = s_derivatives(p);
        return Ok([ds[0] * d1, ds[1] * d1]);
    }
    let h = eps * p.modulus().max(p.t.sqrt());
    if !(h >= 1e-12) {
        return Err(LabError::StepUnderflow { step: h });
    }
    let f = |q: [f64; 4]| potential.value(&p.displaced(real_to_du(q)));
    let mut out = [ZERO; 2];
    for (a, slot) in out.iter_mut().enumerate() {
        let mut qp = [0.0; 4];
        let mut qm = [0.0; 4];
        qp[2 * a] = h;
        qm[2 * a] = -h;
        let dx = (f(qp) - f(qm)) / (2.0 * h);
        qp[2 * a] = 0.0;
        qm[2 * a] = 0.0;
        qp[2 * a + 1] = h;
        qm[2 * a + 1] = -h;
        let dy = (f(qp) - f(qm)) / (2.0 * h);
        *slot = C64::new(0.5 * dx, -0.5 * dy);
    }
    Ok(out)
}

fn real_to_du(q: [f64; 4]) -> [C64; 2] {
    [C64::new(q[0], q[1]), C64::new(q[2], q[3])]
}

/// Returns `(d^2 s / du_i d(conj u_j), d s / du_i)` for `s = |w|^2`.
fn s_derivatives(p: &SurfacePoint) -> ([[C64; 2]; 2], [C64; 2]) {
    let jac = p.jacobian();
    let w = p.ambient();
    let mut metric = [[ZERO; 2]; 2];
    let mut ds = [ZERO; 2];
    for a in 0..2 {
        for (row, wk) in jac.iter().zip(w) {
            ds[a] += row[a] * wk.conj();
            for b in 0..2 {
                metric[a][b] += row[a] * row[b].conj();
            }
        }
    }
    (metric, ds)
}

/// Second derivative `v^T H conj(v)` along the complex line through `p` in
/// direction `v`, from the mean of `phi` over an 8-point circle of radius `h`.
/// The error is O(h^2) in general and O(h^6) for pluriharmonic functions,
/// whose circle means are exact up to the eighth Fourier mode.
fn line_laplacian<P: Potential + ?Sized>(potential: &P, p: &SurfacePoint, v: [C64; 2], h: f64, f0: f64) -> f64 {
    const N: usize = 8;
    let mut acc = 0.0;
    for k in 0..N {
        let rot = C64::from_polar(h, std::f64::consts::TAU * k as f64 / N as f64);
        acc += potential.value(&p.displaced([v[0] * rot, v[1] * rot])) - f0;
    }
    acc / (N as f64 * h * h)
}

fn fd_hessian<P: Potential + ?Sized>(potential: &P, p: &SurfacePoint, h: f64) -> HermitianForm2 {
    let f0 = potential.value(&p.ambient());
    let lap = |v: [C64; 2]| line_laplacian(potential, p, v, h, f0);
    let i = C64::new(0.0, 1.0);
    let h11 = lap([ONE, ZERO]);
    let h22 = lap([ZERO, ONE]);
    let re = 0.25 * (lap([ONE, ONE]) - lap([ONE, -ONE]));
    let im = 0.25 * (lap([ONE, i]) - lap([ONE, -i]));
    let h12 = C64::new(re, im);
    HermitianForm2 { entries: [[C64::new(h11, 0.0), h12], [h12.conj(), C64::new(h22, 0.0)]] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    struct NormSquared;
    impl Potential for NormSquared {
        fn value(&self, w: &[C64; 3]) -> f64 {
            w.iter().map(|c| c.norm_sqr()).sum()
        }
        fn radial_jet(&self, s: f64) -> Option<[f64; 3]> {
            Some([s, 1.0, 0.0])
        }
    }

    struct EhLike(f64);
    impl Potential for EhLike {
        fn value(&self, w: &[C64; 3]) -> f64 {
            let s: f64 = w.iter().map(|c| c.norm_sqr()).sum();
            (s + self.0).sqrt()
        }
        fn radial_jet(&self, s: f64) -> Option<[f64; 3]> {
            let r = (s + self.0).sqrt();
            Some([r, 0.5 / r, -0.25 / (r * r * r)])
        }
    }

    #[test]
    fn lift_on_the_cone() {
        let p = chart_lift([c(1.0, 0.0), c(0.0, 1.0)], 0.0, ChartId::W3_PLUS).unwrap();
        let w = p.ambient();
        assert_eq!(w, [c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert_relative_eq!(ambient_norm2(&p), 2.0);
    }

    #[test]
    fn lift_at_cycle_pole() {
        let p = chart_lift([ZERO, ZERO], 0.25, ChartId::W3_PLUS).unwrap();
        assert_eq!(p.ambient()[2], c(0.5, 0.0));
        assert_relative_eq!(ambient_norm2(&p), 0.25);
        let omega = holomorphic_volume_form(&p).unwrap();
        assert_relative_eq!(omega.re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn lift_residual_small() {
        let t = 1e-4;
        let p = chart_lift([c(0.3, 0.0), c(0.0, 0.4)], t, ChartId::W3_PLUS).unwrap();
        assert!(p.residual() < 1e-12);
    }

    #[test]
    fn branch_cut_is_reported() {
        let err = chart_lift([c(1.0, 0.0), ZERO], 0.0, ChartId::W3_PLUS).unwrap_err();
        assert!(matches!(err, LabError::BranchCut { .. }));
    }

    #[test]
    fn apex_volume_form_degenerate() {
        let p = chart_lift([ZERO, ZERO], 0.0, ChartId::W3_PLUS).unwrap();
        assert!(matches!(holomorphic_volume_form(&p), Err(LabError::DegenerateChart { .. })));
    }

    #[test]
    fn from_ambient_uses_largest_coordinate() {
        let t = 0.01;
        let w = [c(0.2, 0.1), c(-0.3, 0.05), c(0.0, 0.0)];
        // complete w3 so the point lies on V_t
        let w3 = (C64::new(t, 0.0) - w[0] * w[0] - w[1] * w[1]).sqrt();
        let p = SurfacePoint::from_ambient([w[0], w[1], w3], t);
        let s = ambient_norm2(&p);
        assert!(p.solved_value().norm_sqr() >= s / 3.0 - 1e-15);
        assert!(p.residual() < 1e-14);
    }

    #[test]
    fn pluriharmonic_hessian_vanishes() {
        let p = chart_lift([c(0.3, -0.2), c(0.1, 0.4)], 1e-3, ChartId::W3_PLUS).unwrap();
        let re_w1 = FnPotential(|w: &[C64; 3]| w[0].re + (w[1] * w[2]).im);
        let h = complex_hessian(&re_w1, &p, HessianMode::DEFAULT_FD).unwrap();
        assert!(h.max_abs_entry() < 1e-10, "{h:?}");
    }

    #[test]
    fn norm_squared_hessian_positive() {
        let p = chart_lift([c(1.0, 0.0), c(0.0, 1.0)], 0.0, ChartId::W3_PLUS).unwrap();
        // w3 = 0 here, so use a nearby regular point of the same chart
        let q = SurfacePoint::from_ambient(p.ambient(), 0.0);
        let h = complex_hessian(&NormSquared, &q, HessianMode::AnalyticRadial).unwrap();
        assert!(h.min_eigenvalue() > 0.0);
        assert!(h.asymmetry() < 1e-12);
    }

    #[test]
    fn analytic_matches_fd_at_second_order() {
        let t = 1e-4;
        let pot = EhLike(t);
        let p = chart_lift([c(0.02, 0.01), c(-0.005, 0.015)], t, ChartId::W3_PLUS).unwrap();
        let exact = complex_hessian(&pot, &p, HessianMode::AnalyticRadial).unwrap();
        let err = |eps: f64| {
            let fd = complex_hessian(&pot, &p, HessianMode::FiniteDifference { eps }).unwrap();
            let mut m: f64 = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    m = m.max((fd.get(i, j) - exact.get(i, j)).norm());
                }
            }
            m
        };
        let (e1, e2) = (err(4e-2), err(2e-2));
        let ratio = e1 / e2;
        assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio} ({e1:e}, {e2:e})");
    }

    #[test]
    fn unregistered_radial() {
        let p = chart_lift([c(0.1, 0.0), c(0.0, 0.1)], 0.01, ChartId::W3_PLUS).unwrap();
        let pot = FnPotential(|w: &[C64; 3]| w[0].re);
        assert_eq!(
            complex_hessian(&pot, &p, HessianMode::AnalyticRadial),
            Err(LabError::UnregisteredRadial)
        );
    }

    #[test]
    fn ma_ratio_and_laplacian_basics() {
        let g = HermitianForm2::identity();
        assert_eq!(ma_ratio(&g, &HermitianForm2::zero()).unwrap(), 1.0);
        assert_eq!(ma_ratio(&g, &g).unwrap(), 4.0);
        assert_eq!(laplacian(&g, &g).unwrap(), 2.0);
        let bad = HermitianForm2::identity().scale(-1.0);
        assert!(matches!(ma_ratio(&bad, &g), Err(LabError::NotPositive { .. })));
    }

    #[test]
    fn ma_ratio_linearizes_to_laplacian() {
        let g = HermitianForm2::new([[c(2.0, 0.0), c(0.3, 0.4)], [c(0.3, -0.4), c(1.5, 0.0)]]);
        let h = HermitianForm2::new([[c(0.7, 0.0), c(-0.2, 0.1)], [c(-0.2, -0.1), c(-0.4, 0.0)]]);
        let lap = laplacian(&g, &h).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [1e-2, 5e-3, 2.5e-3] {
            let fd = (ma_ratio(&g, &h.scale(eps)).unwrap() - 1.0) / eps;
            let err = (fd - lap).abs();
            assert!(err < prev);
            assert!(err < 0.1 * eps.sqrt());
            prev = err;
        }
    }
}
