use alloc::format;

use crate::error::{Error, Result};

/// Zak-OTFS frame geometry.
///
/// `m` delay bins and `n` Doppler bins per period; the delay period
/// `tau_p = 1/nu_p`, the bandwidth `b = m * nu_p` and the frame duration
/// `t = n * tau_p` are derived.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    pub m: usize,
    pub n: usize,
    pub nu_p: f64,
    pub tau_p: f64,
    pub b: f64,
    pub t: f64,
}

impl GridParams {
    pub fn new(m: usize, n: usize, nu_p: f64) -> Result<Self> {
        if !(nu_p.is_finite() && nu_p > 0.0) {
            return Err(Error::InvalidGrid(format!("Doppler period {nu_p} must be positive")));
        }
        let tau_p = 1.0 / nu_p;
        Self::from_parts(m, n, nu_p, tau_p, m as f64 * nu_p, n as f64 * tau_p)
    }

    /// Validates an explicitly given parameter set.
    pub fn from_parts(m: usize, n: usize, nu_p: f64, tau_p: f64, b: f64, t: f64) -> Result<Self> {
        if m < 2 || n < 2 || !m.is_multiple_of(2) || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "M={m} and N={n} must both be even and at least 2"
            )));
        }
        if !(nu_p > 0.0 && tau_p > 0.0 && nu_p.is_finite() && tau_p.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "periods must be positive, got nu_p={nu_p} tau_p={tau_p}"
            )));
        }
        if ((tau_p * nu_p) - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidGrid(format!("tau_p * nu_p = {} != 1", tau_p * nu_p)));
        }
        if b != m as f64 * nu_p || t != n as f64 * tau_p {
            return Err(Error::InvalidGrid(format!(
                "B={b} and T={t} must equal M*nu_p and N*tau_p"
            )));
        }
        Ok(GridParams {
            m,
            n,
            nu_p,
            tau_p,
            b,
            t,
        })
    }

    /// Number of DD carriers, `M * N`.
    pub fn mn(&self) -> usize {
        self.m * self.n
    }

    pub(crate) fn check_same(&self, other: &GridParams) -> Result<()> {
        if self.m == other.m && self.n == other.n && self.nu_p == other.nu_p {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

impl Default for GridParams {
    /// `M = N = 18`, `nu_p = 30 kHz`: `B = 540 kHz`, `T = 0.6 ms`.
    fn default() -> Self {
        GridParams::new(18, 18, 30_000.0).expect("default grid is valid")
    }
}
