//! Explicit potentials and maps of the gluing construction on the local model.
//!
//! Radial quantities are written once, generically over dual numbers, in terms
//! of `s = |w|^2`. The solver grid uses `x = arccosh(s / t)`, in which
//! `sqrt(s^2 - t^2) = t sinh x` and `|z|^2 = t e^x / 2` are free of cancellation.

use std::fmt;

use num_complex::Complex64;
use num_dual::{second_derivative, DualNum};
use serde::{Deserialize, Serialize};

use crate::charts::{ambient_norm2, complex_hessian, vol_ratio_to_omega, HessianMode, Potential, SurfacePoint};
use crate::error::{LabError, Result};
use crate::params::{GluingParams, DELTA_MAX};

type C64 = Complex64;

/// Scalars that radial profiles are generic over (plain floats and dual numbers).
pub trait Scalar: DualNum<Primitive = f64> + Copy {}
impl<T: DualNum<Primitive = f64> + Copy> Scalar for T {}

/// `C` in `eta^2 = C Omega ^ Omega-bar`, from the Eguchi-Hanson metric at the
/// pole of the vanishing cycle.
pub fn eh_normalization(params: &GluingParams) -> f64 {
    let t = params.t();
    let pole = crate::charts::chart_lift([C64::new(0.0, 0.0); 2], t, crate::charts::ChartId::W3_PLUS)
        .expect("pole of the cycle is a regular point");
    let eh = PotentialSpec::new(PotentialKind::EguchiHanson, *params);
    let g = complex_hessian(&eh, &pole, HessianMode::AnalyticRadial).expect("radial");
    let omega = crate::charts::holomorphic_volume_form(&pole).expect("regular");
    omega.norm_sqr() / g.det()
}

/// `sqrt(s + delta^4)`.
pub fn eh_radial<D: Scalar>(s: D, t: f64) -> D {
    (s + t).sqrt()
}

/// `|z| + c2 |z|^2` as a function of `|z|^2`.
pub fn central_radial<D: Scalar>(z2: D, c2: f64) -> D {
    z2.sqrt() + z2 * c2
}

/// `log V0 + g` for `g = |z| + c2 |z|^2` on the cone, where `V0` is the
/// normalized volume ratio of `i ddbar g`. Vanishes when `c2 = 0` except for `g` itself.
pub fn central_defect<D: Scalar>(z2: D, c2: f64) -> D {
    let r = z2.sqrt();
    let v0 = (r * (2.0 * c2) + 1.0) * (r * (4.0 * c2) + 1.0);
    v0.ln() + central_radial(z2, c2)
}

pub fn eh_potential(p: &SurfacePoint, params: &GluingParams) -> f64 {
    eh_radial(ambient_norm2(p), params.t())
}

pub fn central_model_potential(z: &SurfacePoint, c2: f64) -> Result<f64> {
    let z2 = ambient_norm2(z);
    let modulus = z2.sqrt();
    if modulus < 1e-14 {
        return Err(LabError::ApexExcluded { modulus });
    }
    Ok(central_radial(z2, c2))
}

/// `w_i = z_i + t / (2 |z|^2) conj(z_i)` from `V_0` to `V_t`.
pub fn smoothing_map(z: &SurfacePoint, t: f64) -> Result<SurfacePoint> {
    let z2 = ambient_norm2(z);
    if z2 <= 0.5 * t {
        return Err(LabError::CollapsedLocus(format!("|z|^2 = {z2:e} <= t/2 = {:e}", 0.5 * t)));
    }
    let a = t / (2.0 * z2);
    let w = z.ambient().map(|c| c + c.conj() * a);
    Ok(SurfacePoint::from_ambient(w, t))
}

/// `|z|^2` for a point of `V_t` with `|w|^2 = s`.
pub fn inverse_modulus2(s: f64, t: f64) -> f64 {
    0.5 * (s + ((s - t) * (s + t)).max(0.0).sqrt())
}

pub fn inverse_map(w: &SurfacePoint) -> Result<SurfacePoint> {
    let t = w.t();
    let s = ambient_norm2(w);
    if s <= t * (1.0 + 1e-10) {
        return Err(LabError::CollapsedLocus(format!("|w|^2 = {s:e} on the vanishing cycle scale t = {t:e}")));
    }
    let z2 = inverse_modulus2(s, t);
    let a = t / (2.0 * z2);
    let denom = 1.0 - a * a;
    let z = w.ambient().map(|c| (c - c.conj() * a) / denom);
    Ok(SurfacePoint::from_ambient(z, 0.0))
}

/// Exponential smoothstep: 0 for `x <= 1`, 1 for `x >= 2`, flat to all orders at both ends.
pub fn cutoff<D: Scalar>(x: D) -> D {
    let xr = x.re();
    if xr <= 1.0 {
        return D::from(0.0);
    }
    if xr >= 2.0 {
        return D::from(1.0);
    }
    // logistic in g = 1/(x-1) - 1/(2-x) stays monotone under rounding
    let g = (x - 1.0).recip() - (-x + 2.0).recip();
    let gr = g.re();
    if gr > 700.0 {
        return D::from(0.0);
    }
    if gr < -700.0 {
        return D::from(1.0);
    }
    if gr > 0.0 {
        // factor out e^g so derivatives never form inf / inf
        let e = (-g).exp();
        e / (e + 1.0)
    } else {
        (g.exp() + 1.0).recip()
    }
}

/// `(chi, chi', chi'')` at `x`.
pub fn cutoff_profile(x: f64) -> [f64; 3] {
    let (v, d1, d2) = second_derivative(cutoff, x);
    [v, d1, d2]
}

/// `(sup |chi'|, sup |chi''|)` over a fine grid of `[1, 2]`.
pub fn cutoff_derivative_bounds() -> [f64; 2] {
    let n = 20_000;
    (1..n).fold([0.0f64; 2], |acc, i| {
        let [_, d1, d2] = cutoff_profile(1.0 + i as f64 / n as f64);
        [acc[0].max(d1.abs()), acc[1].max(d2.abs())]
    })
}

/// `Re(sum a_i w_i)`.
pub fn pluriharmonic_correction(p: &SurfacePoint, coeffs: &[C64; 3]) -> f64 {
    let w = p.ambient();
    coeffs.iter().zip(w.iter()).map(|(a, w)| (a * w).re).sum()
}

/// Regions of `|w|`-space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegionTag {
    Core,
    Glue,
    Neck,
    Match,
    Outer,
}

impl RegionTag {
    pub const ALL: [RegionTag; 5] = [Self::Core, Self::Glue, Self::Neck, Self::Match, Self::Outer];

    pub fn classify(modulus: f64, delta: f64) -> Self {
        let g = delta.powf(4.0 / 3.0);
        if modulus < g {
            Self::Core
        } else if modulus < 2.0 * g {
            Self::Glue
        } else if modulus < 1.0 {
            Self::Neck
        } else if modulus < 2.0 {
            Self::Match
        } else {
            Self::Outer
        }
    }

    /// `[lo, hi)` in `|w|`; the core starts at the cycle and the outer region is unbounded.
    pub fn bounds(&self, delta: f64) -> (f64, f64) {
        let g = delta.powf(4.0 / 3.0);
        match self {
            Self::Core => (delta * delta, g),
            Self::Glue => (g, 2.0 * g),
            Self::Neck => (2.0 * g, 1.0),
            Self::Match => (1.0, 2.0),
            Self::Outer => (2.0, f64::INFINITY),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Core => "core",
            Self::Glue => "glue",
            Self::Neck => "neck",
            Self::Match => "match",
            Self::Outer => "outer",
        }
    }
}

impl fmt::Display for RegionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RegionTag {
    type Err = LabError;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.as_str() == s)
            .ok_or_else(|| LabError::InvalidParameter { name: "region", reason: format!("unknown region `{s}`") })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    EguchiHanson,
    /// `|w|`, the cone potential read on any fiber.
    Cone,
    /// `|w| + c2 |w|^2`, meant for points of `V_0`.
    CentralModel,
    /// The central potential composed with the inverse smoothing map.
    PulledBack,
    Preglued,
}

/// A named potential of the construction bound to its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub params: GluingParams,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, params: GluingParams) -> Self {
        Self { kind, params }
    }

    /// Radial part as a function of `s`; `sq` supplies `sqrt(s^2 - t^2)` lazily.
    pub fn radial<D: Scalar>(&self, s: D, sq: impl Fn() -> D) -> D {
        let p = &self.params;
        let t = p.t();
        match self.kind {
            PotentialKind::EguchiHanson => eh_radial(s, t),
            PotentialKind::Cone => s.sqrt(),
            PotentialKind::CentralModel => central_radial(s, p.c2()),
            PotentialKind::PulledBack => central_radial((s + sq()) * 0.5, p.c2()),
            PotentialKind::Preglued => {
                let chi = cutoff(s.sqrt() / p.glue_radius());
                let c = chi.re();
                if c == 0.0 {
                    eh_radial(s, t)
                } else {
                    let phi1 = central_radial((s + sq()) * 0.5, p.c2());
                    if c == 1.0 {
                        phi1
                    } else {
                        chi * phi1 + (-chi + 1.0) * eh_radial(s, t)
                    }
                }
            }
        }
    }

    /// `(u, u_s, u_ss)` of the radial part.
    pub fn s_jet(&self, s: f64) -> [f64; 3] {
        let t = self.params.t();
        let (v, d1, d2) = second_derivative(|s| self.radial(s, || (s * s - t * t).sqrt()), s);
        [v, d1, d2]
    }

    /// `(u, u_x, u_xx)` of the radial part in `x = arccosh(s / t)`.
    pub fn x_jet(&self, x: f64) -> [f64; 3] {
        let t = self.params.t();
        let (v, d1, d2) = second_derivative(|x| self.radial(x.cosh() * t, || x.sinh() * t), x);
        [v, d1, d2]
    }
}

impl Potential for PotentialSpec {
    fn value(&self, w: &[C64; 3]) -> f64 {
        let s: f64 = w.iter().map(|c| c.norm_sqr()).sum();
        let t = self.params.t();
        let mut u = self.radial(s, || ((s - t) * (s + t)).max(0.0).sqrt());
        if self.kind == PotentialKind::Preglued && !self.params.is_radial() {
            let chi = cutoff(s.sqrt() / self.params.glue_radius());
            let ph: f64 = self.params.ph_coeffs().iter().zip(w).map(|(a, w)| (a * w).re).sum();
            u -= chi * ph;
        }
        u
    }

    fn radial_jet(&self, s: f64) -> Option<[f64; 3]> {
        if self.kind == PotentialKind::Preglued && !self.params.is_radial() {
            None
        } else {
            Some(self.s_jet(s))
        }
    }
}

/// Normalized volume ratio `8 s u_s (u_s + u_ss (s - t^2 / s))` of a radial potential.
pub fn radial_volume_ratio_s(jet: [f64; 3], s: f64, t: f64) -> f64 {
    let [_, d1, d2] = jet;
    8.0 * s * d1 * (d1 + d2 * (s - t * t / s))
}

/// The same ratio in the `x` variable: `8 u_x u_xx / (t sinh x)`.
pub fn radial_volume_ratio_x(jet: [f64; 3], x: f64, t: f64) -> f64 {
    8.0 * jet[1] * jet[2] / (t * x.sinh())
}

fn check_delta(params: &GluingParams) -> Result<()> {
    if params.delta() > DELTA_MAX {
        return Err(LabError::InvalidParameter {
            name: "delta",
            reason: format!("{} exceeds delta_max = {DELTA_MAX}", params.delta()),
        });
    }
    Ok(())
}

/// Pre-glued potential `chi (phi1 - p) + (1 - chi) phi2` at `p`, with its region.
/// Fails with `NotPositive` where the induced metric degenerates.
pub fn preglued_potential(p: &SurfacePoint, params: &GluingParams) -> Result<(f64, RegionTag)> {
    check_delta(params)?;
    let spec = PotentialSpec::new(PotentialKind::Preglued, *params);
    let modulus = p.modulus();
    let g = complex_hessian(&spec, p, preferred_mode(params))?;
    let min_eigenvalue = g.min_eigenvalue();
    if !(min_eigenvalue > 0.0) {
        return Err(LabError::NotPositive { min_eigenvalue, modulus });
    }
    Ok((spec.value(&p.ambient()), RegionTag::classify(modulus, params.delta())))
}

fn preferred_mode(params: &GluingParams) -> HessianMode {
    if params.is_radial() {
        HessianMode::AnalyticRadial
    } else {
        HessianMode::DEFAULT_FD
    }
}

/// Ricci potential of the pre-glued metric at a radial grid coordinate `x`
/// (pluriharmonic coefficients are ignored).
///
/// Where `chi = 1` the metric is the pulled-back central metric and the
/// potential reduces to `log(1 - e^{-2x})`, which is evaluated directly.
pub fn ricci_radial_x(x: f64, params: &GluingParams) -> Result<f64> {
    let t = params.t();
    let s = t * x.cosh();
    let chi = cutoff(s.sqrt() / params.glue_radius());
    if chi == 1.0 {
        return Ok((-(-2.0 * x).exp()).ln_1p());
    }
    let spec = PotentialSpec::new(PotentialKind::Preglued, *params);
    let jet = spec.x_jet(x);
    if !(jet[1] > 0.0 && jet[2] > 0.0) {
        return Err(LabError::NotPositive { min_eigenvalue: jet[1].min(jet[2]), modulus: s.sqrt() });
    }
    let v = radial_volume_ratio_x(jet, x, t);
    let mut f = -v.ln() - jet[0];
    if chi > 0.0 {
        f += chi * central_defect(0.5 * t * x.exp(), params.c2());
    }
    Ok(f)
}

/// Ricci potential `f` with `Ric = omega + i ddbar f` for the pre-glued metric,
/// after removing the central-fiber defect `chi (log V0 + g)` of the model
/// central metric.
pub fn ricci_potential(p: &SurfacePoint, params: &GluingParams) -> Result<f64> {
    check_delta(params)?;
    let t = params.t();
    let s = ambient_norm2(p);
    let ph = pluriharmonic_correction(p, &params.ph_coeffs());
    if params.is_radial() {
        let x = (s / t).max(1.0).acosh();
        return ricci_radial_x(x, params).map(|f| f + ph);
    }
    let spec = PotentialSpec::new(PotentialKind::Preglued, *params);
    let g = complex_hessian(&spec, p, HessianMode::DEFAULT_FD)?;
    let min_eigenvalue = g.min_eigenvalue();
    if !(min_eigenvalue > 0.0) {
        return Err(LabError::NotPositive { min_eigenvalue, modulus: s.sqrt() });
    }
    let v = vol_ratio_to_omega(&g, p, eh_normalization(params))?;
    let chi = cutoff(s.sqrt() / params.glue_radius());
    let radial = spec.radial(s, || ((s - t) * (s + t)).max(0.0).sqrt());
    let mut f = -v.ln() - radial + ph;
    if chi > 0.0 {
        f += chi * central_defect(inverse_modulus2(s, t), params.c2());
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charts::{chart_lift, ChartId};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn params(delta: f64) -> GluingParams {
        GluingParams::new(delta).unwrap()
    }

    #[test]
    fn eh_on_cycle() {
        let p = params(0.1);
        let t = p.t();
        let pole = chart_lift([c(0.0, 0.0); 2], t, ChartId::W3_PLUS).unwrap();
        assert_relative_eq!(eh_potential(&pole, &p), 2f64.sqrt() * 0.01, max_relative = 1e-14);
    }

    #[test]
    fn normalization_constant_is_two() {
        for delta in [0.2, 0.05, 2f64.powi(-8)] {
            assert_relative_eq!(eh_normalization(&params(delta)), 2.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn central_model_values() {
        let z = SurfacePoint::from_ambient([c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)], 0.0);
        // |z| = sqrt 2 here; use the value from s directly
        assert_relative_eq!(central_model_potential(&z, 0.0).unwrap(), 2f64.sqrt());
        assert_relative_eq!(central_radial(0.25, 0.1), 0.525);
        let apex = SurfacePoint::from_ambient([c(0.0, 0.0); 3], 0.0);
        assert!(matches!(central_model_potential(&apex, 0.0), Err(LabError::ApexExcluded { .. })));
    }

    #[test]
    fn smoothing_map_example() {
        let t = 1e-3;
        let z = SurfacePoint::from_ambient([c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)], 0.0);
        let w = smoothing_map(&z, t).unwrap();
        let amb = w.ambient();
        assert_relative_eq!(amb[0].re, 1.0 + t / 4.0, epsilon = 1e-15);
        assert_relative_eq!(amb[1].im, 1.0 - t / 4.0, epsilon = 1e-15);
        assert!(w.residual() < 1e-12);
        let back = inverse_map(&w).unwrap().ambient();
        for (a, b) in back.iter().zip(z.ambient().iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn smoothing_modulus_identity() {
        let t = 1e-4;
        let z = SurfacePoint::from_ambient([c(0.01, 0.002), c(-0.002, 0.01), c(0.0, 0.0)], 0.0);
        let z2 = ambient_norm2(&z);
        let w = smoothing_map(&z, t).unwrap();
        assert_relative_eq!(ambient_norm2(&w), z2 + t * t / (4.0 * z2), max_relative = 1e-12);
        assert_relative_eq!(inverse_modulus2(ambient_norm2(&w), t), z2, max_relative = 1e-10);
    }

    #[test]
    fn collapsed_locus_rejected() {
        let t = 1e-2;
        let z = SurfacePoint::from_ambient([c(0.01, 0.0), c(0.0, 0.01), c(0.0, 0.0)], 0.0);
        assert!(matches!(smoothing_map(&z, t), Err(LabError::CollapsedLocus(_))));
        let pole = chart_lift([c(0.0, 0.0); 2], t, ChartId::W3_PLUS).unwrap();
        assert!(matches!(inverse_map(&pole), Err(LabError::CollapsedLocus(_))));
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff_profile(0.5), [0.0, 0.0, 0.0]);
        assert_eq!(cutoff_profile(3.0), [1.0, 0.0, 0.0]);
        let mid = cutoff_profile(1.5);
        assert_relative_eq!(mid[0], 0.5, epsilon = 1e-15);
        let mut prev = 0.0;
        for i in 0..=1000 {
            let v = cutoff_profile(1.0 + i as f64 / 1000.0)[0];
            assert!(v >= prev, "{i} {v} {prev}");
            prev = v;
        }
        let [k1, k2] = cutoff_derivative_bounds();
        assert!(k1 > 1.0 && k1 < 3.0, "{k1}");
        assert!(k2.is_finite() && k2 > k1, "{k2}");
    }

    #[test]
    fn pluriharmonic_values() {
        let t = 1e-3;
        let z = SurfacePoint::from_ambient([c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)], 0.0);
        let w = smoothing_map(&z, t).unwrap();
        let zero = [c(0.0, 0.0); 3];
        assert_eq!(pluriharmonic_correction(&w, &zero), 0.0);
        let e1 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert_relative_eq!(pluriharmonic_correction(&w, &e1), 1.0 + t / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn region_partition() {
        let d: f64 = 0.05;
        let g = d.powf(4.0 / 3.0);
        assert_eq!(RegionTag::classify(0.5 * g, d), RegionTag::Core);
        assert_eq!(RegionTag::classify(1.5 * g, d), RegionTag::Glue);
        assert_eq!(RegionTag::classify(0.5, d), RegionTag::Neck);
        assert_eq!(RegionTag::classify(1.5, d), RegionTag::Match);
        assert_eq!(RegionTag::classify(3.0, d), RegionTag::Outer);
        assert_eq!("glue".parse::<RegionTag>().unwrap(), RegionTag::Glue);
    }

    #[test]
    fn preglued_saturates_in_core_and_neck() {
        let p = params(0.05);
        let t = p.t();
        let g = p.glue_radius();
        let core = SurfacePoint::from_ambient([c(0.3 * g, 0.0), c(0.0, 0.1 * g), c(0.0, 0.0)], t);
        let core = chart_lift([core.ambient()[0], core.ambient()[1]], t, ChartId::W3_PLUS).unwrap();
        let core = SurfacePoint::from_ambient(core.ambient(), t);
        let (v, tag) = preglued_potential(&core, &p).unwrap();
        assert_eq!(tag, RegionTag::Core);
        assert_eq!(v, eh_potential(&core, &p));

        let neck = chart_lift([c(0.3, 0.1), c(0.1, 0.2)], t, ChartId::W3_PLUS).unwrap();
        let neck = SurfacePoint::from_ambient(neck.ambient(), t);
        let (v, tag) = preglued_potential(&neck, &p).unwrap();
        assert_eq!(tag, RegionTag::Neck);
        let z = inverse_map(&neck).unwrap();
        assert_relative_eq!(v, central_model_potential(&z, p.c2()).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn s_and_x_jets_agree() {
        let p = params(0.1);
        let t = p.t();
        let spec = PotentialSpec::new(PotentialKind::Preglued, p);
        for x in [0.3, 2.0, 4.5, 6.0, 9.0] {
            let s = t * f64::cosh(x);
            let [u, us, uss] = spec.s_jet(s);
            let [ux_u, ux, uxx] = spec.x_jet(x);
            let sx = t * x.sinh();
            assert_relative_eq!(u, ux_u, max_relative = 1e-13);
            assert_relative_eq!(us * sx, ux, max_relative = 1e-10);
            assert_relative_eq!(uss * sx * sx + us * s, uxx, max_relative = 1e-8);
            let vs = radial_volume_ratio_s([u, us, uss], s, t);
            let vx = radial_volume_ratio_x([u, ux, uxx], x, t);
            assert_relative_eq!(vs, vx, max_relative = 1e-8);
        }
    }

    #[test]
    fn eh_is_ricci_flat_radially() {
        let p = params(0.1);
        let spec = PotentialSpec::new(PotentialKind::EguchiHanson, p);
        for x in [0.01, 0.5, 3.0, 10.0] {
            let v = radial_volume_ratio_x(spec.x_jet(x), x, p.t());
            assert_relative_eq!(v, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn ricci_in_core_is_minus_eh() {
        let p = params(0.05);
        let t = p.t();
        let x = 0.7;
        let f = ricci_radial_x(x, &p).unwrap();
        assert_relative_eq!(f, -eh_radial(t * f64::cosh(x), t), max_relative = 1e-12);
    }

    #[test]
    fn ricci_closed_form_matches_general_formula() {
        // inside the chi = 1 zone the general expression must agree with the closed form
        let p = params(0.2);
        let t = p.t();
        let spec = PotentialSpec::new(PotentialKind::Preglued, p);
        let x = (0.25 / t).acosh();
        let jet = spec.x_jet(x);
        let general = -radial_volume_ratio_x(jet, x, t).ln() - jet[0] + central_defect(0.5 * t * x.exp(), p.c2());
        let closed = ricci_radial_x(x, &p).unwrap();
        assert!((general - closed).abs() < 1e-12, "{general} vs {closed}");
    }
}
