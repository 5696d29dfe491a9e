use core::fmt;
use core::str::FromStr;

use crate::error::Error;
use crate::special::{normal_cdf, normal_pdf};

/// Univariate smoothing kernel; multivariate kernels are products of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Kernel {
    #[default]
    Gaussian,
    /// `0.75 (1 − u²)` on `[−1, 1]`.
    Epanechnikov,
}

impl Kernel {
    #[inline]
    pub fn eval(self, u: f64) -> f64 {
        match self {
            Kernel::Gaussian => normal_pdf(u),
            Kernel::Epanechnikov => {
                if u.abs() <= 1.0 {
                    0.75 * (1.0 - u * u)
                } else {
                    0.0
                }
            }
        }
    }

    /// `∫_{−∞}^u K(v) dv`.
    pub fn cdf(self, u: f64) -> f64 {
        match self {
            Kernel::Gaussian => normal_cdf(u),
            Kernel::Epanechnikov => {
                if u <= -1.0 {
                    0.0
                } else if u >= 1.0 {
                    1.0
                } else {
                    0.5 + 0.75 * u - 0.25 * u * u * u
                }
            }
        }
    }

    /// `∫_{−∞}^u v K(v) dv`.
    pub fn partial_first_moment(self, u: f64) -> f64 {
        match self {
            Kernel::Gaussian => {
                if u.is_infinite() {
                    0.0
                } else {
                    -normal_pdf(u)
                }
            }
            Kernel::Epanechnikov => {
                if u.abs() >= 1.0 {
                    0.0
                } else {
                    let u2 = u * u;
                    0.75 * (0.5 * u2 - 0.25 * u2 * u2 - 0.25)
                }
            }
        }
    }

    /// Half-width of the support, if compact.
    pub fn support_radius(self) -> Option<f64> {
        match self {
            Kernel::Gaussian => None,
            Kernel::Epanechnikov => Some(1.0),
        }
    }

    /// `∏_j K(u_j)`.
    #[inline]
    pub fn product<I: IntoIterator<Item = f64>>(self, us: I) -> f64 {
        let mut w = 1.0;
        for u in us {
            let k = self.eval(u);
            if k == 0.0 {
                return 0.0;
            }
            w *= k;
        }
        w
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Gaussian => "gaussian",
            Kernel::Epanechnikov => "epanechnikov",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(Kernel::Gaussian),
            "epanechnikov" | "epa" => Ok(Kernel::Epanechnikov),
            other => Err(Error::InvalidParameter(alloc::format!("unknown kernel `{other}`"))),
        }
    }
}
