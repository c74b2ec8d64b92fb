use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Default model quadratic coefficient of the central-fiber potential `|z| + c2 |z|^2`.
pub const DEFAULT_C2: f64 = 0.05;
/// Largest vanishing-cycle scale for which the pre-glued metric is trusted.
pub const DELTA_MAX: f64 = 0.2;

/// Coupled gluing parameters. The smoothing parameter is never stored: it is
/// always `t = delta^4`, i.e. `sqrt(t) = delta^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GluingParams {
    delta: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    c2: f64,
    #[serde(with = "complex3")]
    ph_coeffs: [Complex64; 3],
}

impl GluingParams {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) {
            return Err(LabError::InvalidParameter {
                name: "delta",
                reason: format!("must be positive and finite, got {delta}"),
            });
        }
        Ok(Self {
            delta,
            alpha: 4.0 / 3.0,
            beta: -1.0,
            gamma: 0.5,
            c2: DEFAULT_C2,
            ph_coeffs: [Complex64::new(0.0, 0.0); 3],
        })
    }

    /// Same parameters at another `delta`.
    pub fn with_delta(self, delta: f64) -> Result<Self> {
        let fresh = Self::new(delta)?;
        Ok(Self { delta: fresh.delta, ..self })
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&alpha) {
            return Err(LabError::InvalidAlpha(alpha));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        self.beta = check_beta(beta)?;
        Ok(self)
    }

    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(LabError::InvalidParameter {
                name: "gamma",
                reason: format!("must lie in (0, 1), got {gamma}"),
            });
        }
        self.gamma = gamma;
        Ok(self)
    }

    pub fn with_c2(mut self, c2: f64) -> Result<Self> {
        if !c2.is_finite() {
            return Err(LabError::InvalidParameter {
                name: "c2",
                reason: "must be finite".into(),
            });
        }
        self.c2 = c2;
        Ok(self)
    }

    pub fn with_ph_coeffs(mut self, coeffs: [Complex64; 3]) -> Self {
        self.ph_coeffs = coeffs;
        self
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Smoothing parameter `t = delta^4`.
    pub fn t(&self) -> f64 {
        self.delta.powi(4)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn ph_coeffs(&self) -> [Complex64; 3] {
        self.ph_coeffs
    }

    pub fn is_radial(&self) -> bool {
        self.ph_coeffs.iter().all(|a| a.norm() == 0.0)
    }

    /// Inner edge of the gluing annulus, `delta^{4/3}`.
    pub fn glue_radius(&self) -> f64 {
        self.delta.powf(4.0 / 3.0)
    }
}

/// Rejects weight exponents outside the open interval (-2, 0).
pub fn check_beta(beta: f64) -> Result<f64> {
    if beta > -2.0 && beta < 0.0 {
        Ok(beta)
    } else {
        Err(LabError::InvalidParameter {
            name: "beta",
            reason: format!("must lie strictly inside (-2, 0), got {beta}"),
        })
    }
}

mod complex3 {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64; 3], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[Complex64; 3], D::Error> {
        let pairs = <[[f64; 2]; 3]>::deserialize(d)?;
        Ok(pairs.map(|[re, im]| Complex64::new(re, im)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_is_delta_fourth() {
        let p = GluingParams::new(0.125).unwrap();
        assert_eq!(p.t().sqrt(), 0.125f64.powi(2));
    }

    #[test]
    fn beta_endpoints_rejected() {
        let p = GluingParams::new(0.1).unwrap();
        assert!(p.with_beta(-2.0).is_err());
        assert!(p.with_beta(0.0).is_err());
        assert!(p.with_beta(-1.999).is_ok());
    }

    #[test]
    fn bad_delta_and_gamma() {
        assert!(GluingParams::new(0.0).is_err());
        assert!(GluingParams::new(f64::NAN).is_err());
        let p = GluingParams::new(0.1).unwrap();
        assert!(p.with_gamma(1.0).is_err());
        assert!(p.with_alpha(2.5).is_err());
    }
}
