//! Discrete Zak transform pair on the rate-`B` sample lattice, and PAPR.
//!
//! Sample `k + nM` of the time-domain realization is the unitary `N`-point
//! inverse DFT over Doppler of delay row `k`.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dd::{QuasiPeriodicSignal, RootTable};
use crate::error::{Error, Result};
use crate::grid::GridParams;

/// `M*N` time-domain samples at rate `B`; sample `i` sits at `t = i/B`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSamples {
    grid: GridParams,
    samples: Vec<Complex64>,
}

impl TimeSamples {
    pub fn new(grid: GridParams, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.mn() {
            return Err(Error::DimensionMismatch {
                expected: grid.mn(),
                got: samples.len(),
            });
        }
        Ok(TimeSamples { grid, samples })
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub fn inverse_dzt(sig: &QuasiPeriodicSignal) -> TimeSamples {
    let grid = *sig.grid();
    let (m, n) = (grid.m, grid.n);
    let roots = RootTable::new(n);
    let scale = 1.0 / (n as f64).sqrt();
    let mut samples = vec![Complex64::new(0.0, 0.0); grid.mn()];
    for k in 0..m {
        for blk in 0..n {
            let acc: Complex64 = (0..n).map(|l| sig.at(k, l) * roots.get((blk * l) as i64)).sum();
            samples[k + blk * m] = acc * scale;
        }
    }
    TimeSamples { grid, samples }
}

pub fn forward_dzt(td: &TimeSamples) -> QuasiPeriodicSignal {
    let grid = td.grid;
    let (m, n) = (grid.m, grid.n);
    let roots = RootTable::new(n);
    let scale = 1.0 / (n as f64).sqrt();
    let mut out = QuasiPeriodicSignal::zeros(grid);
    for k in 0..m {
        for l in 0..n {
            let acc: Complex64 = (0..n)
                .map(|blk| td.samples[k + blk * m] * roots.get(-((blk * l) as i64)))
                .sum();
            out.set(k, l, acc * scale);
        }
    }
    out
}

/// Peak-to-average power ratio of the samples, in dB.
pub fn papr_db(td: &TimeSamples) -> Result<f64> {
    let powers = td.samples.iter().map(|z| z.norm_sqr());
    let (peak, total) = powers.fold((0.0f64, 0.0f64), |(p, s), x| (p.max(x), s + x));
    if total == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let mean = total / td.samples.len() as f64;
    Ok(10.0 * (peak / mean).log10())
}
