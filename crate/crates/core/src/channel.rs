//! Veh-A channel draws and the effective sampled DD channel filter.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dd::{DDFilter, TapRect};
use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::pulse::{PulseParams, TruncatedRrc};

/// Veh-A path delays in seconds.
pub const VEH_A_DELAYS: [f64; 6] = [0.0, 0.31e-6, 0.71e-6, 1.09e-6, 1.73e-6, 2.51e-6];
/// Veh-A path powers relative to the first path, in dB.
pub const VEH_A_POWERS_DB: [f64; 6] = [0.0, -1.0, -9.0, -10.0, -15.0, -20.0];

/// Veh-A power profile scaled to unit total power.
pub fn veh_a_power_profile() -> [f64; 6] {
    let lin = VEH_A_POWERS_DB.map(crate::db_to_linear);
    let total: f64 = lin.iter().sum();
    lin.map(|p| p / total)
}

/// One propagation path of a delta-path channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Path {
    pub gain: Complex64,
    /// Seconds.
    pub delay: f64,
    /// Hz.
    pub doppler: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub paths: Vec<Path>,
    pub nu_max: f64,
}

impl ChannelRealization {
    pub fn new(paths: Vec<Path>, nu_max: f64) -> Result<Self> {
        if nu_max.is_nan() || nu_max < 0.0 {
            return Err(Error::param("nu_max", "must be non-negative"));
        }
        if paths.iter().any(|p| p.doppler.abs() > nu_max * (1.0 + 1e-12)) {
            return Err(Error::param("paths", "path Doppler exceeds nu_max"));
        }
        Ok(ChannelRealization { paths, nu_max })
    }

    /// Single unit path with zero delay and Doppler.
    pub fn identity() -> Self {
        ChannelRealization {
            paths: vec![Path {
                gain: Complex64::new(1.0, 0.0),
                delay: 0.0,
                doppler: 0.0,
            }],
            nu_max: 0.0,
        }
    }

    pub fn total_power(&self) -> f64 {
        self.paths.iter().map(|p| p.gain.norm_sqr()).sum()
    }
}

/// Draws a Veh-A realization: Rayleigh path gains on the normalized power
/// profile and Dopplers `nu_max cos θ` with `θ` uniform on `[0, 2π)`.
pub fn draw_veh_a<R: Rng + ?Sized>(nu_max: f64, rng: &mut R) -> Result<ChannelRealization> {
    if !(nu_max >= 0.0 && nu_max.is_finite()) {
        return Err(Error::param("nu_max", "must be finite and non-negative"));
    }
    let profile = veh_a_power_profile();
    let paths = VEH_A_DELAYS
        .iter()
        .zip(profile)
        .map(|(&delay, power)| {
            let sd = (power / 2.0).sqrt();
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let theta = rng.random_range(0.0..2.0 * PI);
            Path {
                gain: Complex64::new(re * sd, im * sd),
                delay,
                doppler: if nu_max == 0.0 { 0.0 } else { nu_max * theta.cos() },
            }
        })
        .collect();
    Ok(ChannelRealization { paths, nu_max })
}

/// Sampled effective DD channel `h[k,l] = h(k/B, l/T)` on the full-period
/// window `[-M/2, M/2) x [-N/2, N/2)`.
///
/// With separable RRC pulses and a matched receive filter, each delta path
/// contributes `h_i e^{j2πν_i(τ-τ_i)} F_i(τ) G_i(τ,ν)`, where `F_i` and `G_i`
/// are one-dimensional correlations of the delay and Doppler pulses. Both are
/// evaluated by trapezoidal quadrature on the `1/Q` lattice.
pub fn effective_channel_taps(chan: &ChannelRealization, grid: &GridParams, pulse: &PulseParams) -> Result<DDFilter> {
    check_crystalline(chan, grid)?;
    let rect = TapRect::full_window(grid);
    let (mn, b, t) = (grid.mn() as f64, grid.b, grid.t);
    let q = pulse.quad_oversampling;
    let delay_pulse = TruncatedRrc::new(pulse.beta_tau, pulse.truncation_lobes, q);
    let doppler_pulse = TruncatedRrc::new(pulse.beta_nu, pulse.truncation_lobes, q);

    // w_m rrc(-x_m) on each axis.
    let delay_nodes = delay_pulse.node_vec();
    let delay_base: Vec<f64> = delay_nodes.iter().map(|&(u, w)| w * delay_pulse.eval(-u)).collect();
    let doppler_nodes = doppler_pulse.node_vec();
    let doppler_base: Vec<f64> = doppler_nodes.iter().map(|&(v, w)| w * doppler_pulse.eval(-v)).collect();

    let ks: Vec<i64> = (rect.k_lo..=rect.k_hi).collect();
    let ls: Vec<i64> = (rect.l_lo..=rect.l_hi).collect();

    // e^{j2π v_m τ_k / T} = e^{j2π v_m k / (MN)}, shared by all paths.
    let twist: Vec<Vec<Complex64>> = ks
        .iter()
        .map(|&k| {
            doppler_nodes
                .iter()
                .map(|&(v, _)| Complex64::from_polar(1.0, 2.0 * PI * v * k as f64 / mn))
                .collect()
        })
        .collect();

    let mut taps = vec![Complex64::new(0.0, 0.0); rect.len()];
    let mut g_row = vec![Complex64::new(0.0, 0.0); ls.len()];
    for path in &chan.paths {
        let delay_bins = b * path.delay;
        let doppler_bins = t * path.doppler;
        // e^{-j2π ν_i u / B} on the delay nodes.
        let delay_mod: Vec<Complex64> = delay_nodes
            .iter()
            .zip(&delay_base)
            .map(|(&(u, _), &base)| Complex64::from_polar(base, -2.0 * PI * doppler_bins * u / mn))
            .collect();
        // Doppler correlation, one table per output Doppler bin.
        let doppler_tables: Vec<Vec<f64>> = ls
            .iter()
            .map(|&l| {
                doppler_nodes
                    .iter()
                    .zip(&doppler_base)
                    .map(|(&(v, _), &base)| base * doppler_pulse.eval(l as f64 - doppler_bins - v))
                    .collect()
            })
            .collect();

        for (ki, &k) in ks.iter().enumerate() {
            let f: Complex64 = delay_nodes
                .iter()
                .zip(&delay_mod)
                .map(|(&(u, _), &wm)| wm * delay_pulse.eval(k as f64 - delay_bins - u))
                .sum();
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            // e^{j2π ν_i (τ - τ_i)}
            let pre =
                path.gain * Complex64::from_polar(1.0, 2.0 * PI * doppler_bins * (k as f64 - delay_bins) / mn) * f;
            for (li, table) in doppler_tables.iter().enumerate() {
                g_row[li] = table.iter().zip(&twist[ki]).map(|(&r, &ph)| ph * r).sum();
            }
            let row = &mut taps[ki * ls.len()..(ki + 1) * ls.len()];
            for (slot, g) in row.iter_mut().zip(&g_row) {
                *slot += pre * g;
            }
        }
    }
    DDFilter::from_taps(*grid, rect, taps)
}

/// Every path delay must fall within the first quarter of the delay period
/// and every Doppler within a quarter of the Doppler period either side.
fn check_crystalline(chan: &ChannelRealization, grid: &GridParams) -> Result<()> {
    let delay_limit = grid.m as f64 / 4.0;
    let doppler_limit = grid.n as f64 / 4.0;
    for (i, p) in chan.paths.iter().enumerate() {
        let delay_bins = p.delay * grid.b;
        let doppler_bins = p.doppler * grid.t;
        if !(0.0..=delay_limit).contains(&delay_bins) {
            return Err(Error::NotCrystalline(format!(
                "path {i} delay spans {delay_bins:.3} bins, limit {delay_limit}"
            )));
        }
        if doppler_bins.abs() > doppler_limit {
            return Err(Error::NotCrystalline(format!(
                "path {i} Doppler spans {doppler_bins:.3} bins, limit {doppler_limit}"
            )));
        }
    }
    Ok(())
}

/// Channel support `[k_min, k_max] x [-l_max, l_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SupportRect {
    pub k_min: i64,
    pub k_max: i64,
    pub l_max: i64,
}

impl SupportRect {
    pub fn new(k_min: i64, k_max: i64, l_max: i64, grid: &GridParams) -> Result<Self> {
        let s = SupportRect { k_min, k_max, l_max };
        s.validate(grid)?;
        Ok(s)
    }

    pub fn validate(&self, grid: &GridParams) -> Result<()> {
        if self.k_min > 0 || self.k_max < 0 || self.l_max < 0 {
            return Err(Error::param("support", "must contain the origin"));
        }
        if self.k_max - self.k_min >= grid.m as i64 || 2 * self.l_max >= grid.n as i64 {
            return Err(Error::Aliasing {
                delay_width: self.k_max - self.k_min,
                doppler_width: 2 * self.l_max,
                m: grid.m,
                n: grid.n,
            });
        }
        Ok(())
    }

    pub fn tap_rect(&self) -> TapRect {
        TapRect::new(self.k_min, self.k_max, -self.l_max, self.l_max)
    }
}

/// Smallest admissible support rectangle holding at least `1 - eps_supp` of
/// the filter energy. Ties in area go to the rectangle capturing more energy.
pub fn extract_support(h: &DDFilter, eps_supp: f64) -> Result<SupportRect> {
    if !(0.0..1.0).contains(&eps_supp) {
        return Err(Error::param("eps_supp", "must lie in [0, 1)"));
    }
    let grid = *h.grid();
    let window = TapRect::full_window(&grid);
    let total = h.energy();
    let (rows, cols) = (window.delay_len(), window.doppler_len());

    // Inclusive-exclusive 2D prefix sums of |h|^2 over the window.
    let mut prefix = vec![0.0f64; (rows + 1) * (cols + 1)];
    for r in 0..rows {
        for c in 0..cols {
            let v = h.get(window.k_lo + r as i64, window.l_lo + c as i64).norm_sqr();
            prefix[(r + 1) * (cols + 1) + c + 1] =
                v + prefix[r * (cols + 1) + c + 1] + prefix[(r + 1) * (cols + 1) + c] - prefix[r * (cols + 1) + c];
        }
    }
    let rect_energy = |s: &SupportRect| {
        let r0 = (s.k_min - window.k_lo) as usize;
        let r1 = (s.k_max - window.k_lo) as usize + 1;
        let c0 = (-s.l_max - window.l_lo) as usize;
        let c1 = (s.l_max - window.l_lo) as usize + 1;
        prefix[r1 * (cols + 1) + c1] - prefix[r0 * (cols + 1) + c1] - prefix[r1 * (cols + 1) + c0]
            + prefix[r0 * (cols + 1) + c0]
    };

    let need = (1.0 - eps_supp) * total - 1e-12 * total;
    let mut best: Option<(i64, f64, SupportRect)> = None;
    for k_min in window.k_lo..=0 {
        for k_max in 0..=window.k_hi {
            for l_max in 0..(grid.n as i64 / 2) {
                let s = SupportRect { k_min, k_max, l_max };
                let captured = rect_energy(&s);
                if captured < need {
                    continue;
                }
                let area = (k_max - k_min + 1) * (2 * l_max + 1);
                let better = match &best {
                    None => true,
                    Some((a, e, _)) => area < *a || (area == *a && captured > *e),
                };
                if better {
                    best = Some((area, captured, s));
                }
                // Larger l_max only grows the area.
                break;
            }
        }
    }
    let (_, _, s) = best.ok_or(Error::SupportNotFound)?;
    s.validate(&grid)?;
    Ok(s)
}
