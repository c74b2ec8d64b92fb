//! The weight `rho`, weighted sup and Holder norms, quasi-uniform sampling of
//! annuli on `V_t`, and log-log decay regressions.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::charts::SurfacePoint;
use crate::error::{LabError, Result};

type C64 = Complex64;

/// Cubic Hermite interpolation of `log rho` in `log |w|` between two knots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Bridge {
    l0: f64,
    l1: f64,
    v0: f64,
    v1: f64,
    m0: f64,
    m1: f64,
}

impl Bridge {
    fn eval(&self, l: f64) -> f64 {
        let h = self.l1 - self.l0;
        let s = (l - self.l0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.v0
            + (s3 - 2.0 * s2 + s) * h * self.m0
            + (-2.0 * s3 + 3.0 * s2) * self.v1
            + (s3 - s2) * h * self.m1
    }
}

/// `rho = delta` on `|w| <= 2 delta^2`, `|w|^{1/2}` on `[3 delta^2, 1/2]`, `1` on `|w| >= 1`,
/// joined by monotone C^1 bridges in `log |w|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    delta: f64,
    inner: Bridge,
    outer: Bridge,
}

impl WeightFunction {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < (1.0f64 / 6.0).sqrt()) {
            return Err(LabError::InvalidParameter {
                name: "delta",
                reason: format!("weight needs 0 < delta and 3 delta^2 < 1/2, got {delta}"),
            });
        }
        let d2 = delta * delta;
        let inner = Bridge {
            l0: (2.0 * d2).ln(),
            l1: (3.0 * d2).ln(),
            v0: delta.ln(),
            v1: 0.5 * (3.0 * d2).ln(),
            m0: 0.0,
            m1: 0.5,
        };
        let outer = Bridge { l0: 0.5f64.ln(), l1: 0.0, v0: 0.5 * 0.5f64.ln(), v1: 0.0, m0: 0.5, m1: 0.0 };
        Ok(Self { delta, inner, outer })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `rho` at `|w| = modulus`.
    pub fn value(&self, modulus: f64) -> f64 {
        let d2 = self.delta * self.delta;
        if modulus <= 2.0 * d2 {
            self.delta
        } else if modulus < 3.0 * d2 {
            self.inner.eval(modulus.ln()).exp()
        } else if modulus <= 0.5 {
            modulus.sqrt()
        } else if modulus < 1.0 {
            self.outer.eval(modulus.ln()).exp()
        } else {
            1.0
        }
    }
}

pub fn weight_rho(p: &SurfacePoint, delta: f64) -> Result<f64> {
    Ok(WeightFunction::new(delta)?.value(p.modulus()))
}

/// Pointwise norms `|nabla^j phi|` at one sample, with the data needed for weights and distances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetSample {
    pub position: [C64; 3],
    pub rho: f64,
    /// Ratio of metric length to ambient Euclidean length near the sample.
    pub metric_scale: f64,
    pub jets: Vec<f64>,
}

impl JetSample {
    pub fn new(point: &SurfacePoint, weight: &WeightFunction, metric_scale: f64, jets: Vec<f64>) -> Self {
        Self { position: point.ambient(), rho: weight.value(point.modulus()), metric_scale, jets }
    }

    fn jet(&self, j: usize) -> f64 {
        self.jets.get(j).copied().unwrap_or(0.0)
    }
}

/// `sum_{j <= k} sup rho^{-(beta - j)} |nabla^j phi|`.
pub fn weighted_sup_norm(samples: &[JetSample], beta: f64, k: usize) -> Result<f64> {
    if samples.is_empty() {
        return Err(LabError::EmptySample);
    }
    Ok((0..=k)
        .map(|j| {
            samples
                .iter()
                .map(|s| s.rho.powf(-(beta - j as f64)) * s.jet(j).abs())
                .fold(0.0, f64::max)
        })
        .sum())
}

/// `sup |nabla^k phi|` without weights.
pub fn sup_norm(samples: &[JetSample], k: usize) -> Result<f64> {
    if samples.is_empty() {
        return Err(LabError::EmptySample);
    }
    Ok(samples.iter().map(|s| s.jet(k).abs()).fold(0.0, f64::max))
}

/// Pairs closer than `kappa rho^2` (ambient distance) enter the Holder quotient.
pub const HOLDER_PAIR_SCALE: f64 = 0.5;

/// Sampled lower bound for
/// `sup min(rho_p, rho_q)^{-(beta - k - gamma)} |nabla^k phi(p) - nabla^k phi(q)| / d(p, q)^gamma`.
pub fn weighted_holder_seminorm(samples: &[JetSample], beta: f64, gamma: f64, k: usize) -> Result<f64> {
    if samples.is_empty() {
        return Err(LabError::EmptySample);
    }
    let exponent = -(beta - k as f64 - gamma);
    let mut best: Option<f64> = None;
    for (i, p) in samples.iter().enumerate() {
        for q in &samples[i + 1..] {
            let euclid = p
                .position
                .iter()
                .zip(q.position.iter())
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let rho = p.rho.min(q.rho);
            if euclid == 0.0 || euclid > HOLDER_PAIR_SCALE * rho * rho {
                continue;
            }
            let d = 0.5 * (p.metric_scale + q.metric_scale) * euclid;
            let weight = p.rho.powf(exponent).min(q.rho.powf(exponent));
            let quotient = weight * (p.jet(k) - q.jet(k)).abs() / d.powf(gamma);
            best = Some(best.map_or(quotient, |b: f64| b.max(quotient)));
        }
    }
    best.ok_or(LabError::NoValidPairs)
}

fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let (mut acc, mut f) = (0.0, inv);
    while n > 0 {
        acc += (n % base) as f64 * f;
        n /= base;
        f *= inv;
    }
    acc
}

/// Rotation matrix from three uniform numbers (uniform on SO(3)).
pub fn rotation_from_uniform(u: [f64; 3]) -> [[f64; 3]; 3] {
    use std::f64::consts::TAU;
    let (a, b) = ((1.0 - u[0]).sqrt(), u[0].sqrt());
    let (x, y, z, w) = (a * (TAU * u[1]).sin(), a * (TAU * u[1]).cos(), b * (TAU * u[2]).sin(), b * (TAU * u[2]).cos());
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

/// The point of `V_t` with `|w|^2 = s` in the frame given by the first two
/// columns `(e, f)` of `rot`: `w = sqrt(t) (cosh(xi) e + i sinh(xi) f)` with
/// `cosh(2 xi) = s / t`, or `w = sqrt(s / 2) (e + i f)` on the cone.
pub fn point_on_level(s: f64, t: f64, rot: &[[f64; 3]; 3]) -> SurfacePoint {
    let (a, b) = if t > 0.0 {
        let xi = 0.5 * (s / t).max(1.0).acosh();
        (t.sqrt() * xi.cosh(), t.sqrt() * xi.sinh())
    } else {
        let r = (0.5 * s).sqrt();
        (r, r)
    };
    let w = [0, 1, 2].map(|i| C64::new(a * rot[i][0], b * rot[i][1]));
    SurfacePoint::from_ambient(w, t)
}

/// Quasi-uniform samples with `|w|` log-uniform in `[lo, hi]` on `V_t`
/// (Halton sequence in bases 2, 3, 5, 7 with a seeded random shift).
pub fn shell_samples(lo: f64, hi: f64, t: f64, count: usize, seed: u64) -> Result<Vec<SurfacePoint>> {
    if !(lo > 0.0 && hi >= lo && lo * lo >= t * (1.0 - 1e-12)) {
        return Err(LabError::InvalidParameter {
            name: "shell",
            reason: format!("need sqrt(t) <= lo <= hi, got [{lo}, {hi}] with t = {t}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; 4] = [rng.random(), rng.random(), rng.random(), rng.random()];
    let (llo, lhi) = (lo.ln(), hi.ln());
    Ok((0..count as u64)
        .map(|n| {
            let h = [2, 3, 5, 7].map(|b| radical_inverse(n + 1, b));
            let u = [0, 1, 2, 3].map(|i| (h[i] + shift[i]).fract());
            let r = (llo + (lhi - llo) * u[3]).exp();
            point_on_level((r * r).max(t), t, &rotation_from_uniform([u[0], u[1], u[2]]))
        })
        .collect())
}

/// Samples of the annulus `delta^alpha <= |w| <= 2 delta^alpha` on `V_{delta^4}`.
pub fn annulus_samples(alpha: f64, delta: f64, count: usize, seed: u64) -> Result<Vec<SurfacePoint>> {
    if !(0.0..=2.0).contains(&alpha) {
        return Err(LabError::InvalidAlpha(alpha));
    }
    if count < 8 {
        return Err(LabError::InvalidParameter { name: "count", reason: format!("need at least 8, got {count}") });
    }
    let lo = delta.powf(alpha);
    shell_samples(lo, 2.0 * lo, delta.powi(4), count, seed)
}

/// Least-squares slope of `log norm` against `log delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub predicted: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn decay_fit(measurements: &[(f64, f64)], predicted: f64, tolerance: f64) -> Result<DecayFit> {
    if measurements.len() < 4 {
        return Err(LabError::DegenerateData(format!("{} points, need at least 4", measurements.len())));
    }
    if let Some((d, n)) = measurements.iter().find(|(d, n)| !(*d > 0.0 && *n > 0.0 && n.is_finite())) {
        return Err(LabError::DegenerateData(format!("non-positive entry (delta {d}, norm {n})")));
    }
    let mut deltas: Vec<f64> = measurements.iter().map(|m| m.0).collect();
    deltas.sort_by(f64::total_cmp);
    if deltas.windows(2).any(|w| w[0] == w[1]) {
        return Err(LabError::DegenerateData("repeated delta values".into()));
    }
    let n = measurements.len() as f64;
    let xs: Vec<f64> = measurements.iter().map(|m| m.0.ln()).collect();
    let ys: Vec<f64> = measurements.iter().map(|m| m.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(DecayFit {
        slope,
        intercept,
        r_squared,
        predicted,
        tolerance,
        pass: (slope - predicted).abs() <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn weight_bullets() {
        let d = 0.05;
        let w = WeightFunction::new(d).unwrap();
        assert_eq!(w.value(d * d), d);
        assert_relative_eq!(w.value(0.25), 0.5, max_relative = 1e-15);
        assert_eq!(w.value(2.0), 1.0);
        assert_relative_eq!(w.value(3.0 * d * d), (3.0 * d * d).sqrt(), max_relative = 1e-12);
        assert_relative_eq!(w.value(0.5), 0.5f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn weight_monotone_and_in_range() {
        let d = 0.02;
        let w = WeightFunction::new(d).unwrap();
        let mut prev = 0.0;
        for i in 0..20_000 {
            let r = (d * d * 0.5) * (2.0 / (d * d * 0.5)).powf(i as f64 / 19_999.0);
            let v = w.value(r);
            assert!(v >= prev && v >= d && v <= 1.0);
            prev = v;
        }
    }

    #[test]
    fn weight_is_c1_across_bridges() {
        let d = 0.05;
        let w = WeightFunction::new(d).unwrap();
        for knot in [2.0 * d * d, 3.0 * d * d, 0.5, 1.0] {
            let h = knot * 1e-6;
            let left = (w.value(knot) - w.value(knot - h)) / h;
            let right = (w.value(knot + h) - w.value(knot)) / h;
            assert!((left - right).abs() < 1e-4 * (1.0 + left.abs()) / knot.min(1.0), "{knot}: {left} {right}");
        }
    }

    #[test]
    fn decay_fit_exact_power() {
        let m: Vec<_> = (3..=8).map(|j| 2f64.powi(-j)).map(|d| (d, 3.0 * d.powf(8.0 / 3.0))).collect();
        let fit = decay_fit(&m, 8.0 / 3.0, 0.15).unwrap();
        assert!((fit.slope - 8.0 / 3.0).abs() < 1e-10);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.pass);
    }

    #[test]
    fn decay_fit_rejects_bad_data() {
        let ok = [(0.1, 1.0), (0.2, 2.0), (0.3, 3.0)];
        assert!(matches!(decay_fit(&ok, 1.0, 0.1), Err(LabError::DegenerateData(_))));
        let zero = [(0.1, 1.0), (0.2, 0.0), (0.3, 3.0), (0.4, 1.0)];
        assert!(matches!(decay_fit(&zero, 1.0, 0.1), Err(LabError::DegenerateData(_))));
        let repeated = [(0.1, 1.0), (0.1, 2.0), (0.3, 3.0), (0.4, 1.0)];
        assert!(matches!(decay_fit(&repeated, 1.0, 0.1), Err(LabError::DegenerateData(_))));
    }

    #[test]
    fn annulus_bounds_and_equation() {
        let d = 0.1;
        for alpha in [0.0, 4.0 / 3.0, 2.0] {
            let pts = annulus_samples(alpha, d, 200, 7).unwrap();
            let lo = d.powf(alpha);
            for p in &pts {
                let r = p.modulus();
                assert!(r >= lo * (1.0 - 1e-12) && r <= 2.0 * lo * (1.0 + 1e-12), "{alpha} {r}");
                assert!(p.residual() <= 1e-12 * (1.0 + r * r));
            }
        }
        assert_eq!(annulus_samples(1.0, d, 50, 3).unwrap(), annulus_samples(1.0, d, 50, 3).unwrap());
        assert!(matches!(annulus_samples(2.5, d, 50, 3), Err(LabError::InvalidAlpha(_))));
    }

    fn constant_samples(d: f64, value: f64) -> Vec<JetSample> {
        let w = WeightFunction::new(d).unwrap();
        shell_samples(d * d, 2.0, d.powi(4), 300, 1)
            .unwrap()
            .iter()
            .map(|p| JetSample::new(p, &w, 1.0, vec![value, 0.0, 0.0]))
            .collect()
    }

    #[test]
    fn sup_norm_of_constant() {
        let s = constant_samples(0.05, 1.0);
        let n = weighted_sup_norm(&s, -1.0, 0).unwrap();
        assert!(n <= 1.0 && n > 0.9);
        assert_eq!(weighted_holder_seminorm(&s, -1.0, 0.5, 0).unwrap(), 0.0);
        assert_eq!(weighted_sup_norm(&[], -1.0, 0), Err(LabError::EmptySample));
    }

    #[test]
    fn sup_norm_of_weight_power() {
        let d = 0.05;
        let beta = -1.0;
        let w = WeightFunction::new(d).unwrap();
        let s: Vec<_> = shell_samples(d * d, 2.0, d.powi(4), 300, 2)
            .unwrap()
            .iter()
            .map(|p| {
                let rho = w.value(p.modulus());
                JetSample::new(p, &w, 1.0, vec![rho.powf(beta)])
            })
            .collect();
        assert_relative_eq!(weighted_sup_norm(&s, beta, 0).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn holder_stable_under_doubling() {
        let d = 0.1;
        let w = WeightFunction::new(d).unwrap();
        let field = |n: usize| -> Vec<JetSample> {
            shell_samples(2.0, 4.0, d.powi(4), n, 5)
                .unwrap()
                .iter()
                .map(|p| JetSample::new(p, &w, 1.0, vec![p.modulus()]))
                .collect()
        };
        let a = weighted_holder_seminorm(&field(2000), -1.0, 0.5, 0).unwrap();
        let b = weighted_holder_seminorm(&field(4000), -1.0, 0.5, 0).unwrap();
        assert!((a / b - 1.0).abs() < 0.1, "{a} {b}");
    }
}
