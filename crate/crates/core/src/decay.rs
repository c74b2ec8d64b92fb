//! δ-sweeps of radial quantities: the pre-gluing potential difference on an
//! annulus and the Ricci potential region by region.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::models::{ricci_radial_x, PotentialKind, PotentialSpec, RegionTag};
use crate::params::GluingParams;
use crate::weighted::{annulus_samples, decay_fit, shell_samples, DecayFit};

/// Step in `x` for derivatives of the Ricci potential.
const RICCI_FD_STEP: f64 = 1e-3;

/// `(|u|, |nabla u|, |i ddbar u|)` of a radial function from its `x`-jet,
/// measured in the radial metric with `x`-jet `background`.
///
/// The gradient norm is `2 |u_x| / sqrt(U_xx)`; the Hessian norm is the
/// Euclidean norm of the two relative eigenvalues `u_x / U_x`, `u_xx / U_xx`.
pub fn radial_jet_norms(u: [f64; 3], background: [f64; 3]) -> [f64; 3] {
    let [_, bx, bxx] = background;
    [u[0].abs(), 2.0 * u[1].abs() / bxx.sqrt(), (u[1] / bx).hypot(u[2] / bxx)]
}

/// Where a region probe samples `|w|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionProbe {
    pub region: RegionTag,
    /// Annulus exponent; `None` for the outer shell `2 <= |w| <= 4`.
    pub alpha: Option<f64>,
}

impl RegionProbe {
    pub fn outer() -> Self {
        Self { region: RegionTag::Outer, alpha: None }
    }

    pub fn annulus(alpha: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&alpha) {
            return Err(LabError::InvalidAlpha(alpha));
        }
        let region = if alpha > 4.0 / 3.0 {
            RegionTag::Core
        } else if alpha == 4.0 / 3.0 {
            RegionTag::Glue
        } else if alpha > 0.0 {
            RegionTag::Neck
        } else {
            RegionTag::Match
        };
        Ok(Self { region, alpha: Some(alpha) })
    }

    /// Default probe of a region: the outer shell, the glue annulus, and the
    /// neck and core annuli at `alpha = 1` and `alpha = 5/3`.
    pub fn default_for(region: RegionTag) -> Self {
        match region {
            RegionTag::Outer => Self::outer(),
            RegionTag::Match => Self { region, alpha: Some(0.0) },
            RegionTag::Neck => Self { region, alpha: Some(1.0) },
            RegionTag::Glue => Self { region, alpha: Some(4.0 / 3.0) },
            RegionTag::Core => Self { region, alpha: Some(5.0 / 3.0) },
        }
    }

    /// Predicted decay exponent of `|nabla^k f|` for the Ricci potential.
    pub fn ricci_exponent(&self, k: usize) -> f64 {
        let k = k as f64;
        match (self.region, self.alpha) {
            (RegionTag::Outer | RegionTag::Match, _) => 4.0,
            (RegionTag::Glue, _) => (4.0 - 2.0 * k) / 3.0,
            (RegionTag::Neck, Some(a)) => 4.0 - 2.0 * a - k * a / 2.0,
            (RegionTag::Core, Some(a)) => a - k * a / 2.0,
            (_, None) => 4.0,
        }
    }

    fn samples(&self, delta: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
        let pts = match self.alpha {
            Some(a) => annulus_samples(a, delta, count, seed)?,
            None => shell_samples(2.0, 4.0, delta.powi(4), count, seed)?,
        };
        Ok(pts.iter().map(|p| p.modulus()).collect())
    }
}

/// Predicted exponent of `|nabla^k (phi1 - phi2)|` on the `alpha` annulus:
/// the `t / |w|` term of `phi2` gives `4 - alpha`, the quadratic term of
/// `phi1` gives `2 alpha`, and each derivative costs `|w|^{1/2}`.
pub fn annulus_exponent(alpha: f64, k: usize) -> f64 {
    (4.0 - alpha).min(2.0 * alpha) - k as f64 * alpha / 2.0
}

fn x_of(modulus: f64, t: f64) -> f64 {
    (modulus * modulus / t).max(1.0).acosh()
}

/// `sup |nabla^k (phi1 - phi2)|` over the `alpha` annulus, in the pre-glued metric.
pub fn annulus_difference_norm(params: &GluingParams, alpha: f64, k: usize, count: usize, seed: u64) -> Result<f64> {
    check_order(k)?;
    let t = params.t();
    let phi1 = PotentialSpec::new(PotentialKind::PulledBack, *params);
    let phi2 = PotentialSpec::new(PotentialKind::EguchiHanson, *params);
    let bg = PotentialSpec::new(PotentialKind::Preglued, *params);
    let radii = annulus_samples(alpha, params.delta(), count, seed)?;
    Ok(radii
        .iter()
        .map(|p| {
            let x = x_of(p.modulus(), t);
            let (a, b) = (phi1.x_jet(x), phi2.x_jet(x));
            radial_jet_norms([a[0] - b[0], a[1] - b[1], a[2] - b[2]], bg.x_jet(x))[k]
        })
        .fold(0.0, f64::max))
}

/// `(f, f_x, f_xx)` of the Ricci potential by central differences in `x`.
pub fn ricci_x_jet(x: f64, params: &GluingParams) -> Result<[f64; 3]> {
    let h = RICCI_FD_STEP;
    // stay on the cell-centred side of the cycle; f is even in x
    let (l, c, r) = (ricci_radial_x((x - h).abs(), params)?, ricci_radial_x(x, params)?, ricci_radial_x(x + h, params)?);
    Ok([c, (r - l) / (2.0 * h), (r - 2.0 * c + l) / (h * h)])
}

/// `sup |nabla^k f|` of the Ricci potential over a region probe.
pub fn ricci_region_norm(params: &GluingParams, probe: &RegionProbe, k: usize, count: usize, seed: u64) -> Result<f64> {
    check_order(k)?;
    let t = params.t();
    let bg = PotentialSpec::new(PotentialKind::Preglued, *params);
    let mut sup: f64 = 0.0;
    for r in probe.samples(params.delta(), count, seed)? {
        let x = x_of(r, t);
        let jet = if k == 0 { [ricci_radial_x(x, params)?, 0.0, 0.0] } else { ricci_x_jet(x, params)? };
        sup = sup.max(radial_jet_norms(jet, bg.x_jet(x))[k]);
    }
    Ok(sup)
}

fn check_order(k: usize) -> Result<()> {
    if k > 2 {
        return Err(LabError::InvalidParameter { name: "k", reason: format!("derivative order {k} above 2") });
    }
    Ok(())
}

/// What a sweep measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayQuantity {
    AnnulusDifference { alpha: f64 },
    Ricci(RegionProbe),
}

impl DecayQuantity {
    pub fn predicted(&self, k: usize) -> f64 {
        match self {
            Self::AnnulusDifference { alpha } => annulus_exponent(*alpha, k),
            Self::Ricci(p) => p.ricci_exponent(k),
        }
    }

    pub fn region(&self) -> RegionTag {
        match self {
            Self::AnnulusDifference { alpha } => RegionProbe::annulus(*alpha).map(|p| p.region).unwrap_or(RegionTag::Glue),
            Self::Ricci(p) => p.region,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self {
            Self::AnnulusDifference { alpha } => Some(*alpha),
            Self::Ricci(p) => p.alpha,
        }
    }

    pub fn measure(&self, params: &GluingParams, k: usize, count: usize, seed: u64) -> Result<f64> {
        match self {
            Self::AnnulusDifference { alpha } => annulus_difference_norm(params, *alpha, k, count, seed),
            Self::Ricci(p) => ricci_region_norm(params, p, k, count, seed),
        }
    }
}

/// Norms per δ and their log-log fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecaySweep {
    pub quantity: DecayQuantity,
    pub k: usize,
    pub norms: Vec<(f64, f64)>,
    pub fit: DecayFit,
}

/// Measures `quantity` at each δ concurrently and fits the slope.
pub fn decay_sweep(
    quantity: DecayQuantity,
    base: &GluingParams,
    deltas: &[f64],
    k: usize,
    count: usize,
    seed: u64,
    tolerance: f64,
) -> Result<DecaySweep> {
    let norms: Vec<(f64, f64)> = deltas
        .par_iter()
        .map(|&d| Ok((d, quantity.measure(&base.with_delta(d)?, k, count, seed)?)))
        .collect::<Result<_>>()?;
    let fit = decay_fit(&norms, quantity.predicted(k), tolerance)?;
    Ok(DecaySweep { quantity, k, norms, fit })
}
