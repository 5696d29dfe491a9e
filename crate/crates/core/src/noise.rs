//! The `U_{θ,ν}` noise family.
//!
//! A draw is `U + θ(B − 0.5)` with `U ~ Uniform(−0.5, 0.5)` and
//! `B ~ Beta(ν, ν)`. The density is
//!
//! ```text
//! η(x) = 1(|x| < 0.5)                                   θ = 0
//! η(x) = F_B((x + 0.5)/θ + 0.5) − F_B((x − 0.5)/θ + 0.5)   θ > 0
//! ```
//!
//! It equals 1 on `[−γ1, γ1]` and 0 outside `(−γ2, γ2)` with
//! `γ1 = (1 − θ)/2`, `γ2 = (1 + θ)/2`, and is `ν − 1` times continuously
//! differentiable. Multivariate noise is the product of identical
//! coordinates.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::Rng;
use rand_distr::{Beta, Distribution, Open01};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::oracle::quadrature::adaptive_integral_with_breaks;
use crate::rng::{self, Domain};
use crate::special;

/// Quadrature tolerance for the mass of η.
pub const MASS_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseSpec {
    theta: f64,
    nu: u32,
    dims: usize,
}

impl NoiseSpec {
    /// `theta` must lie in `[0, 1)`, `nu ≥ 1`. `dims` may be zero for data
    /// without discrete columns.
    pub fn new(theta: f64, nu: u32, dims: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in [0, 1), got {theta}"
            )));
        }
        if nu == 0 {
            return Err(Error::InvalidParameter("nu must be positive".into()));
        }
        Ok(Self { theta, nu, dims })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn with_dims(self, dims: usize) -> Self {
        Self { dims, ..self }
    }

    /// Half-width of the plateau where η = 1.
    pub fn gamma1(&self) -> f64 {
        (1.0 - self.theta) / 2.0
    }

    /// Half-width of the support of η.
    pub fn gamma2(&self) -> f64 {
        (1.0 + self.theta) / 2.0
    }

    /// Univariate noise density η(x).
    pub fn density(&self, x: f64) -> f64 {
        // only |x| is used, so the density is exactly symmetric
        let x = x.abs();
        if self.theta == 0.0 {
            return if x < 0.5 { 1.0 } else { 0.0 };
        }
        // exact zero on the support boundary, where the two CDF terms
        // would otherwise differ by rounding
        if x >= self.gamma2() {
            return 0.0;
        }
        let a = f64::from(self.nu);
        let upper = special::regularized_incomplete_beta(a, a, (x + 0.5) / self.theta + 0.5);
        let lower = special::regularized_incomplete_beta(a, a, (x - 0.5) / self.theta + 0.5);
        (upper - lower).max(0.0)
    }

    /// Product density over all `dims` coordinates.
    pub fn joint_density(&self, x: &[f64]) -> f64 {
        x.iter().map(|&v| self.density(v)).product()
    }

    /// Points where η is not smooth: `±γ1`, `±γ2` (or `±0.5` for θ = 0).
    pub fn kinks(&self) -> [f64; 4] {
        let (g1, g2) = (self.gamma1(), self.gamma2());
        [-g2, -g1, g1, g2]
    }

    /// One draw of the univariate noise.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = Open01.sample(rng);
        let mut e = u - 0.5;
        if self.theta > 0.0 {
            let a = f64::from(self.nu);
            // Beta::new only fails for non-positive shapes
            let beta = Beta::new(a, a).expect("positive beta shapes");
            let b: f64 = beta.sample(rng);
            e += self.theta * (b - 0.5);
        }
        e
    }

    /// Fills `count × dims` draws from an explicit generator.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Matrix {
        let mut out = Matrix::zeros(count, self.dims);
        for r in 0..count {
            for c in 0..self.dims {
                out.set(r, c, self.draw(rng));
            }
        }
        out
    }
}

/// Draws a `count × dims` noise matrix; identical inputs give identical output.
pub fn sample_noise(spec: &NoiseSpec, seed: u64, count: usize) -> Matrix {
    let mut rng = rng::stream(seed, Domain::Noise, 0);
    spec.sample_with(&mut rng, count)
}

/// CDF of `Beta(nu, nu)`; re-exported for convenience.
pub fn beta_cdf(nu: u32, x: f64) -> Result<f64> {
    special::beta_cdf(nu, x)
}

/// Density of `spec` at `x`.
pub fn eta_density(spec: &NoiseSpec, x: f64) -> f64 {
    spec.density(x)
}

/// Result of checking a noise density against the plateau and support
/// conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseReport {
    pub value_at_zero: f64,
    pub plateau_ok: bool,
    pub support_ok: bool,
    pub mass: f64,
    pub max_abs_plateau_deviation: f64,
    pub max_outside_support: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl NoiseReport {
    pub fn mass_ok(&self) -> bool {
        (self.mass - 1.0).abs() <= MASS_TOLERANCE
    }

    pub fn passed(&self) -> bool {
        self.value_at_zero == 1.0 && self.plateau_ok && self.support_ok && self.mass_ok()
    }

    /// Plain `key = value` text block, one field per line.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "gamma1 = {}", self.gamma1);
        let _ = writeln!(s, "gamma2 = {}", self.gamma2);
        let _ = writeln!(s, "value_at_zero = {}", self.value_at_zero);
        let _ = writeln!(s, "max_abs_plateau_deviation = {:e}", self.max_abs_plateau_deviation);
        let _ = writeln!(s, "max_outside_support = {:e}", self.max_outside_support);
        let _ = writeln!(s, "mass = {}", self.mass);
        let _ = writeln!(s, "plateau_ok = {}", self.plateau_ok);
        let _ = writeln!(s, "support_ok = {}", self.support_ok);
        let _ = writeln!(s, "mass_ok = {}", self.mass_ok());
        let _ = writeln!(s, "passed = {}", self.passed());
        s
    }
}

/// Checks `spec`'s density against its own `γ1`, `γ2`.
pub fn verify_membership(spec: &NoiseSpec, grid_points: usize, tol: f64) -> NoiseReport {
    verify_density(|x| spec.density(x), spec.gamma1(), spec.gamma2(), grid_points, tol)
}

/// Checks an arbitrary univariate density against plateau `[−γ1, γ1]` and
/// support `[−γ2, γ2]`.
///
/// The plateau is probed on `grid_points` equally spaced points of
/// `[−γ1, γ1]`, the exterior on `grid_points` points of `[γ2, 1]` and their
/// mirror images, and the symmetric grid over `[−1, 1]` is scanned for
/// stray mass outside the support. Mass is integrated over `[−1, 1]` with
/// break hints at `±γ1`, `±γ2`.
pub fn verify_density<F: Fn(f64) -> f64>(
    eta: F,
    gamma1: f64,
    gamma2: f64,
    grid_points: usize,
    tol: f64,
) -> NoiseReport {
    let g = grid_points.max(3);
    let step = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * (i as f64) / ((g - 1) as f64);

    let value_at_zero = eta(0.0);

    // where the plateau touches the support boundary (θ = 0) the endpoint
    // belongs to the exterior, since a density is only fixed almost everywhere
    let max_abs_plateau_deviation = (0..g)
        .map(|i| step(-gamma1, gamma1, i))
        .filter(|x| x.abs() < gamma2)
        .map(|x| (eta(x) - 1.0).abs())
        .fold(0.0_f64, f64::max);

    let mut max_outside_support = 0.0_f64;
    for i in 0..g {
        let x = step(gamma2, 1.0, i);
        max_outside_support = max_outside_support.max(eta(x).abs()).max(eta(-x).abs());
        let y = step(-1.0, 1.0, i);
        if y.abs() >= gamma2 {
            max_outside_support = max_outside_support.max(eta(y).abs());
        }
    }

    let breaks: Vec<f64> = [-gamma2, -gamma1, gamma1, gamma2].into();
    let mass = match adaptive_integral_with_breaks(&eta, -1.0, 1.0, &breaks, 1e-13) {
        Ok(v) => v,
        Err(Error::NumericalFailure { estimate, .. }) => estimate,
        Err(_) => f64::NAN,
    };

    NoiseReport {
        value_at_zero,
        plateau_ok: max_abs_plateau_deviation <= tol,
        support_ok: max_outside_support <= tol,
        mass,
        max_abs_plateau_deviation,
        max_outside_support,
        gamma1,
        gamma2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(theta: f64, nu: u32) -> NoiseSpec {
        NoiseSpec::new(theta, nu, 1).unwrap()
    }

    #[test]
    fn construction_bounds() {
        assert!(NoiseSpec::new(1.0, 5, 1).is_err());
        assert!(NoiseSpec::new(-0.1, 5, 1).is_err());
        assert!(NoiseSpec::new(0.5, 0, 1).is_err());
        let s = spec(0.8, 5);
        assert!((s.gamma1() - 0.1).abs() < 1e-15);
        assert!((s.gamma2() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn density_examples() {
        assert_eq!(spec(0.0, 1).density(0.49), 1.0);
        assert_eq!(spec(0.0, 1).density(0.5), 0.0);
        assert_eq!(spec(0.8, 5).density(0.0), 1.0);
        assert!((spec(0.8, 5).density(0.5) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn trapezoid_for_nu_one() {
        // ν = 1: η rises linearly from 0 at −γ2 to 1 at −γ1
        let s = spec(0.4, 1);
        let x = -0.5;
        let expect = (x + s.gamma2()) / (s.gamma2() - s.gamma1());
        assert!((s.density(x) - expect).abs() < 1e-12);
    }

    #[test]
    fn membership_for_default_grid() {
        for &theta in &[0.0, 0.4, 0.8] {
            for &nu in &[1, 2, 5] {
                let r = verify_membership(&spec(theta, nu), 101, 1e-12);
                assert!(r.passed(), "theta={theta} nu={nu}: {r:?}");
            }
        }
    }

    #[test]
    fn corrupted_density_is_flagged() {
        let s = spec(0.8, 5);
        let r = verify_density(|x| 0.9 * s.density(x), s.gamma1(), s.gamma2(), 101, 1e-12);
        assert_eq!(r.value_at_zero, 0.9);
        assert!(!r.plateau_ok);
        assert!(!r.passed());
        assert!((r.mass - 0.9).abs() < 1e-8);
    }

    #[test]
    fn report_text_block_has_all_keys() {
        let text = verify_membership(&spec(0.8, 5), 11, 1e-12).to_key_value();
        for key in [
            "value_at_zero",
            "plateau_ok",
            "support_ok",
            "mass",
            "max_abs_plateau_deviation",
        ] {
            assert!(text.contains(&format!("{key} = ")), "{text}");
        }
    }

    #[test]
    fn uniform_noise_moments() {
        let n = 10_000;
        let m = sample_noise(&NoiseSpec::new(0.0, 1, 2).unwrap(), 11, n);
        let sigma = (1.0_f64 / 12.0).sqrt();
        for c in 0..2 {
            let mean = m.column(c).sum::<f64>() / n as f64;
            assert!(mean.abs() < 3.0 * sigma / (n as f64).sqrt(), "mean {mean}");
        }
    }

    #[test]
    fn smooth_noise_variance() {
        // Var(U) + θ² Var(B_ν), Var(Beta(ν, ν)) = 1 / (4(2ν + 1))
        let s = spec(0.8, 5);
        let n = 100_000;
        let m = sample_noise(&s, 3, n);
        let xs: Vec<f64> = m.column(0).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        let want = 1.0 / 12.0 + 0.64 / 44.0;
        // fourth moment is bounded by γ2⁴, so sd(var̂) ≤ γ2²/√n
        let tol = 4.0 * s.gamma2().powi(2) / (n as f64).sqrt();
        assert!((var - want).abs() < tol, "var {var} want {want}");
    }

    #[test]
    fn draws_stay_inside_support() {
        for &(theta, nu) in &[(0.0, 1), (0.4, 2), (0.8, 5), (0.95, 1)] {
            let s = NoiseSpec::new(theta, nu, 1).unwrap();
            let m = sample_noise(&s, 99, 100_000);
            let g2 = s.gamma2();
            assert!(m.as_slice().iter().all(|&e| e > -g2 && e < g2));
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = NoiseSpec::new(0.8, 5, 3).unwrap();
        assert_eq!(sample_noise(&s, 5, 50), sample_noise(&s, 5, 50));
        assert_ne!(sample_noise(&s, 5, 50), sample_noise(&s, 6, 50));
        assert_eq!(sample_noise(&s, 5, 0).nrows(), 0);
    }
}
