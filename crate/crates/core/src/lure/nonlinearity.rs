use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};
use crate::format::num;

/// Static feedback nonlinearities `y -> phi(y)`, all continuously differentiable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StaticNonlinearity {
    /// `c tanh(y)`.
    ScaledTanh(f64),
    /// `c y^3`.
    Cubic(f64),
    /// `c sin(y)`.
    Sine(f64),
    /// `c y`.
    Linear(f64),
    /// `c sat(y)` with `|sat| <= limit`. The corner is rounded over a band of
    /// half-width `limit / 100` where the slope falls linearly from `c` to 0.
    Saturation { c: f64, limit: f64 },
}

/// Closed interval of slopes `[k1, k2]`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorBounds {
    pub k1: f64,
    pub k2: f64,
}

impl SectorBounds {
    pub fn is_bounded(&self) -> bool {
        self.k1.is_finite() && self.k2.is_finite()
    }
}

impl fmt::Display for SectorBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", num(self.k1), num(self.k2))
    }
}

impl StaticNonlinearity {
    pub fn saturation(c: f64, limit: f64) -> Result<Self> {
        if !(limit > 0.0 && limit.is_finite()) {
            return Err(Error::InvalidArgument(format!("saturation limit must be positive, got {limit}")));
        }
        Ok(Self::Saturation { c, limit })
    }

    /// Gain parameter `c`.
    pub fn gain(&self) -> f64 {
        match *self {
            Self::ScaledTanh(c) | Self::Cubic(c) | Self::Sine(c) | Self::Linear(c) => c,
            Self::Saturation { c, .. } => c,
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            Self::ScaledTanh(c) => c * y.tanh(),
            Self::Cubic(c) => c * y * y * y,
            Self::Sine(c) => c * y.sin(),
            Self::Linear(c) => c * y,
            Self::Saturation { c, limit } => {
                let band = limit / 100.0;
                let a = y.abs();
                let mag = if a <= limit - band {
                    a
                } else if a >= limit + band {
                    limit
                } else {
                    let t = a - (limit - band);
                    limit - band + t - t * t / (4.0 * band)
                };
                c * mag.copysign(y)
            }
        }
    }

    pub fn derivative(&self, y: f64) -> f64 {
        match *self {
            Self::ScaledTanh(c) => {
                let ch = y.cosh();
                c / (ch * ch)
            }
            Self::Cubic(c) => 3.0 * c * y * y,
            Self::Sine(c) => c * y.cos(),
            Self::Linear(c) => c,
            Self::Saturation { c, limit } => {
                let band = limit / 100.0;
                let a = y.abs();
                if a <= limit - band {
                    c
                } else if a >= limit + band {
                    0.0
                } else {
                    c * (limit + band - a) / (2.0 * band)
                }
            }
        }
    }

    /// Points where the derivative attains its extremes.
    fn derivative_extrema(&self) -> Vec<f64> {
        match *self {
            Self::Sine(_) => vec![0.0, PI, -PI],
            Self::Saturation { limit, .. } => {
                let band = limit / 100.0;
                vec![0.0, limit - band, limit + band, band - limit, -band - limit]
            }
            _ => vec![0.0],
        }
    }

    /// Tightest interval containing `phi'(R)`.
    pub fn sector_bounds(&self) -> SectorBounds {
        match *self {
            Self::ScaledTanh(c) | Self::Saturation { c, .. } => SectorBounds { k1: c.min(0.0), k2: c.max(0.0) },
            Self::Sine(c) => SectorBounds { k1: -c.abs(), k2: c.abs() },
            Self::Linear(c) => SectorBounds { k1: c, k2: c },
            Self::Cubic(c) if c > 0.0 => SectorBounds { k1: 0.0, k2: f64::INFINITY },
            Self::Cubic(c) if c < 0.0 => SectorBounds { k1: f64::NEG_INFINITY, k2: 0.0 },
            Self::Cubic(_) => SectorBounds { k1: 0.0, k2: 0.0 },
        }
    }

    /// Checks `(phi'(y) - k1)(phi'(y) - k2) <= 0` on a symmetric log grid over
    /// `|y| <= 1e6` with `samples` points, plus the derivative's extrema.
    pub fn verify_sector(&self, k1: f64, k2: f64, samples: usize) -> Result<bool> {
        if !(k1 < k2) {
            return Err(Error::InvalidArgument(format!("sector needs k1 < k2, got [{k1}, {k2}]")));
        }
        let half = (samples / 2).max(1);
        let mut ys = self.derivative_extrema();
        for i in 0..half {
            let e = if half == 1 { 6.0 } else { -6.0 + 12.0 * i as f64 / (half - 1) as f64 };
            let y = 10f64.powf(e);
            ys.push(y);
            ys.push(-y);
        }
        let tol = 1e-12 * (1.0 + k1.abs().min(1e300) + k2.abs().min(1e300));
        Ok(ys.into_iter().all(|y| {
            let d = self.derivative(y);
            if d < k1 - tol || d > k2 + tol {
                return false;
            }
            // Infinite bounds make the product ill-defined; the range check above suffices.
            !(k1.is_finite() && k2.is_finite()) || (d - k1) * (d - k2) <= tol
        }))
    }
}

impl fmt::Display for StaticNonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::ScaledTanh(c) => write!(f, "{} tanh(y)", num(c)),
            Self::Cubic(c) => write!(f, "{} y^3", num(c)),
            Self::Sine(c) => write!(f, "{} sin(y)", num(c)),
            Self::Linear(c) => write!(f, "{} y", num(c)),
            Self::Saturation { c, limit } => write!(f, "{} sat_{}(y)", num(c), num(limit)),
        }
    }
}
