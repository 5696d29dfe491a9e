use std::fmt::Write as _;

use mixjitter::noise::{verify_density, verify_membership, NoiseReport};
use mixjitter::oracle::{convolve_density, finite_difference, DiscretePmf};
use mixjitter::NoiseSpec;

use crate::args::VerifyArgs;
use crate::error::{CliError, CliResult};
use crate::emit;

pub const THETAS: [f64; 3] = [0.0, 0.4, 0.8];
pub const NUS: [u32; 3] = [1, 2, 5];
pub const GRID_POINTS: usize = 101;
pub const PLATEAU_TOLERANCE: f64 = 1e-12;
pub const CONVOLUTION_TOLERANCE: f64 = 1e-10;
pub const DERIVATIVE_TOLERANCE: f64 = 1e-6;
/// Offset used for the step check when `θ = 0`.
pub const STEP_OFFSET: f64 = 0.3;

/// Results for one noise spec.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecCheck {
    pub theta: f64,
    pub nu: u32,
    pub noise: NoiseReport,
    /// Max over atoms of `|f_{Z+ε}(z) − p(z)|`, including the `z + 0.3`
    /// offsets when `θ = 0`.
    pub convolution_error: f64,
    /// Max over atoms of the first and second central differences, step
    /// `γ1/2`.
    pub first_derivative: f64,
    pub second_derivative: f64,
}

impl SpecCheck {
    pub fn convolution_ok(&self) -> bool {
        self.convolution_error <= CONVOLUTION_TOLERANCE
    }

    pub fn derivatives_ok(&self) -> bool {
        self.first_derivative <= DERIVATIVE_TOLERANCE && self.second_derivative <= DERIVATIVE_TOLERANCE
    }

    pub fn passed(&self) -> bool {
        self.noise.passed() && self.convolution_ok() && self.derivatives_ok()
    }
}

/// The reference margin, Binomial(4, 0.3).
pub fn reference_pmf() -> DiscretePmf {
    DiscretePmf::binomial(4, 0.3).expect("valid binomial")
}

pub fn check_spec(spec: &NoiseSpec, corrupt: bool) -> CliResult<SpecCheck> {
    let noise = if corrupt {
        verify_density(|x| 0.9 * spec.density(x), spec.gamma1(), spec.gamma2(), GRID_POINTS, PLATEAU_TOLERANCE)
    } else {
        verify_membership(spec, GRID_POINTS, PLATEAU_TOLERANCE)
    };
    let pmf = reference_pmf();
    let f = |z: f64| convolve_density(&pmf, spec, z);
    let h = spec.gamma1() / 2.0;
    let mut convolution_error = 0.0f64;
    let mut first_derivative = 0.0f64;
    let mut second_derivative = 0.0f64;
    for (z, p) in pmf.atoms() {
        let z = z as f64;
        convolution_error = convolution_error.max((f(z) - p).abs());
        if spec.theta() == 0.0 {
            convolution_error = convolution_error.max((f(z + STEP_OFFSET) - p).abs());
        }
        first_derivative = first_derivative.max(finite_difference(&f, z, 1, h)?.abs());
        second_derivative = second_derivative.max(finite_difference(&f, z, 2, h)?.abs());
    }
    Ok(SpecCheck {
        theta: spec.theta(),
        nu: spec.nu(),
        noise,
        convolution_error,
        first_derivative,
        second_derivative,
    })
}

pub fn run_battery(corrupt: bool) -> CliResult<Vec<SpecCheck>> {
    let mut out = Vec::with_capacity(THETAS.len() * NUS.len());
    for theta in THETAS {
        for nu in NUS {
            let spec = NoiseSpec::new(theta, nu, 1)?;
            out.push(check_spec(&spec, corrupt)?);
        }
    }
    Ok(out)
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

pub fn render_table(checks: &[SpecCheck]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>5} {:>3}  {:>8} {:>10} {:>10} {:>18}  {:>10} {:>10} {:>10}  status",
        "theta", "nu", "eta(0)", "plateau", "outside", "mass", "conv", "d1", "d2"
    );
    for c in checks {
        let _ = writeln!(
            s,
            "{:>5} {:>3}  {:>8} {:>10.2e} {:>10.2e} {:>18.15}  {:>10.2e} {:>10.2e} {:>10.2e}  {}",
            c.theta,
            c.nu,
            c.noise.value_at_zero,
            c.noise.max_abs_plateau_deviation,
            c.noise.max_outside_support,
            c.noise.mass,
            c.convolution_error,
            c.first_derivative,
            c.second_derivative,
            if c.passed() { "pass" } else { "FAIL" }
        );
    }
    s
}

pub fn run(args: &VerifyArgs) -> CliResult<()> {
    let checks = run_battery(args.corrupt_noise)?;
    let mut text = render_table(&checks);
    if args.verbose {
        for c in &checks {
            let _ = writeln!(text, "\n[theta = {}, nu = {}]", c.theta, c.nu);
            text.push_str(&c.noise.to_key_value());
            let _ = writeln!(text, "convolution = {}", mark(c.convolution_ok()));
            let _ = writeln!(text, "derivatives = {}", mark(c.derivatives_ok()));
        }
    }
    emit(None, text.as_bytes())?;
    let failed = checks.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} of {} specs failed", checks.len())));
    }
    Ok(())
}
