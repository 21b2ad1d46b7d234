use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Root-raised-cosine pulse `rrc_β(x)`, unit energy over the real line.
///
/// The removable singularities at `x = 0` and `|x| = 1/(4β)` are replaced by
/// their limits.
pub fn rrc_value(beta: f64, x: f64) -> f64 {
    const SNAP: f64 = 1e-9;
    if x.abs() < SNAP {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    let bx4 = 4.0 * beta * x;
    if beta > 0.0 && (bx4.abs() - 1.0).abs() < SNAP {
        let arg = PI / (4.0 * beta);
        return beta * FRAC_1_SQRT_2 * ((1.0 + 2.0 / PI) * arg.sin() + (1.0 - 2.0 / PI) * arg.cos());
    }
    let num = (PI * x * (1.0 - beta)).sin() + bx4 * (PI * x * (1.0 + beta)).cos();
    num / (PI * x * (1.0 - bx4 * bx4))
}

/// Pulse-shaping and quadrature parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    pub beta_tau: f64,
    pub beta_nu: f64,
    /// One-sided truncation of each RRC factor, in symbol intervals.
    pub truncation_lobes: usize,
    /// Quadrature nodes per symbol interval.
    pub quad_oversampling: usize,
}

impl PulseParams {
    pub fn new(beta_tau: f64, beta_nu: f64, truncation_lobes: usize, quad_oversampling: usize) -> Result<Self> {
        for (name, beta) in [("beta_tau", beta_tau), ("beta_nu", beta_nu)] {
            if !(0.0..1.0).contains(&beta) {
                return Err(Error::param(name, "roll-off must lie in [0, 1)"));
            }
        }
        if truncation_lobes < 4 {
            return Err(Error::param("truncation_lobes", "must be at least 4"));
        }
        if quad_oversampling < 8 {
            return Err(Error::param("quad_oversampling", "must be at least 8"));
        }
        Ok(PulseParams {
            beta_tau,
            beta_nu,
            truncation_lobes,
            quad_oversampling,
        })
    }
}

impl Default for PulseParams {
    fn default() -> Self {
        PulseParams::new(0.2, 0.2, 10, 16).expect("default pulse is valid")
    }
}

/// An RRC factor truncated to `|x| <= lobes` and rescaled so that its
/// trapezoidal energy on the quadrature lattice `x = m/Q` is exactly one.
#[derive(Debug, Clone)]
pub(crate) struct TruncatedRrc {
    beta: f64,
    lobes: f64,
    scale: f64,
    q: usize,
}

impl TruncatedRrc {
    pub(crate) fn new(beta: f64, lobes: usize, q: usize) -> Self {
        let raw = TruncatedRrc {
            beta,
            lobes: lobes as f64,
            scale: 1.0,
            q,
        };
        let energy: f64 = raw.nodes().map(|(x, w)| w * raw.eval(x).powi(2)).sum();
        TruncatedRrc {
            scale: 1.0 / energy.sqrt(),
            ..raw
        }
    }

    #[inline]
    pub(crate) fn eval(&self, x: f64) -> f64 {
        if x.abs() > self.lobes * (1.0 + 1e-12) {
            0.0
        } else {
            self.scale * rrc_value(self.beta, x)
        }
    }

    /// Trapezoidal nodes `(x, weight)` covering `[-lobes, lobes]` in steps of `1/Q`.
    pub(crate) fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = (self.lobes as i64) * self.q as i64;
        let step = 1.0 / self.q as f64;
        (-half..=half).map(move |m| {
            let w = if m.abs() == half { 0.5 * step } else { step };
            (m as f64 * step, w)
        })
    }

    pub(crate) fn node_vec(&self) -> Vec<(f64, f64)> {
        self.nodes().collect()
    }
}

/// Trapezoidal energy `(1/Q) Σ rrc(m/Q)^2` of the raw (unscaled) truncated pulse.
pub fn truncated_energy(beta: f64, lobes: usize, q: usize) -> f64 {
    let raw = TruncatedRrc {
        beta,
        lobes: lobes as f64,
        scale: 1.0,
        q,
    };
    raw.nodes().map(|(x, w)| w * raw.eval(x).powi(2)).sum()
}
