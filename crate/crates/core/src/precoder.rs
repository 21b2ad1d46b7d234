//! Twisted-convolution prefilter design.
//!
//! The precoded channel `h_a = h *σ a` is linear in the prefilter taps,
//! `h_a = H a`. The prefilter maximizing the one-tap SINR
//! `|h_a[0,0]|^2 / (1/ρ + Σ_{(k,l)≠0} |h_a[k,l]|^2)` under `‖a‖ = 1` is the
//! normalized solution of `B u = h_0`, with `h_0^H` the row of `H` producing
//! `h_a[0,0]` and `B = I/ρ + Σ_{i≠0} h_i h_i^H`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channel::{extract_support, SupportRect};
use crate::dd::{unit_root, DDFilter, TapRect};
use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::linalg::{CMatrix, Cholesky};

/// Index maps between prefilter taps, precoded-channel taps and their
/// flattened vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefilterLayout {
    grid: GridParams,
    s_h: SupportRect,
    s_a: TapRect,
}

impl PrefilterLayout {
    pub fn new(grid: GridParams, s_h: SupportRect) -> Result<Self> {
        s_h.validate(&grid)?;
        let (hm, hn) = ((grid.m / 2) as i64, (grid.n / 2) as i64);
        let s_a = TapRect::new(-hm - s_h.k_min, hm - s_h.k_max - 1, -hn + s_h.l_max, hn - s_h.l_max - 1);
        let layout = PrefilterLayout { grid, s_h, s_a };
        debug_assert_eq!(s_h.tap_rect().minkowski_sum(&layout.s_a), TapRect::full_window(&grid));
        Ok(layout)
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    pub fn channel_support(&self) -> &SupportRect {
        &self.s_h
    }

    /// Prefilter support `S_a`.
    pub fn prefilter_rect(&self) -> &TapRect {
        &self.s_a
    }

    /// Number of prefilter taps, `(M + k_min - k_max)(N - 2 l_max)`.
    pub fn k(&self) -> usize {
        self.s_a.len()
    }

    /// Flat index of prefilter tap `(k, l)`.
    pub fn prefilter_index(&self, k: i64, l: i64) -> Option<usize> {
        if !self.s_a.contains(k, l) {
            return None;
        }
        let width = self.s_a.delay_len() as i64;
        Some(((k - self.s_a.k_lo) + (l - self.s_a.l_lo) * width) as usize)
    }

    pub fn prefilter_coords(&self, idx: usize) -> (i64, i64) {
        let width = self.s_a.delay_len();
        (
            self.s_a.k_lo + (idx % width) as i64,
            self.s_a.l_lo + (idx / width) as i64,
        )
    }

    /// Row of `H` holding precoded-channel tap `(k, l)` of the full window.
    pub fn channel_index(&self, k: i64, l: i64) -> usize {
        let (hm, hn) = ((self.grid.m / 2) as i64, (self.grid.n / 2) as i64);
        (k + hm + (l + hn) * self.grid.m as i64) as usize
    }

    pub fn channel_coords(&self, idx: usize) -> (i64, i64) {
        let m = self.grid.m;
        let (hm, hn) = ((m / 2) as i64, (self.grid.n / 2) as i64);
        ((idx % m) as i64 - hm, (idx / m) as i64 - hn)
    }

    /// Row producing `h_a[0,0]`: `M/2 + (N/2) M`, which equals `(M/2)(N+1)`.
    pub fn useful_row(&self) -> usize {
        let row = self.channel_index(0, 0);
        debug_assert_eq!(row, self.grid.m / 2 * (self.grid.n + 1));
        row
    }

    /// Packs a prefilter vector into a filter on `S_a`.
    pub fn prefilter(&self, a: &[Complex64]) -> Result<DDFilter> {
        if a.len() != self.k() {
            return Err(Error::DimensionMismatch {
                expected: self.k(),
                got: a.len(),
            });
        }
        DDFilter::from_fn(self.grid, self.s_a, |k, l| a[self.prefilter_index(k, l).unwrap()])
    }

    /// Flattens a prefilter on (a subset of) `S_a` into a vector.
    pub fn prefilter_vector(&self, a: &DDFilter) -> Vec<Complex64> {
        (0..self.k())
            .map(|i| {
                let (k, l) = self.prefilter_coords(i);
                a.get(k, l)
            })
            .collect()
    }

    /// Packs a full-window vector (`H a`) into a filter.
    pub fn channel_filter(&self, h_a: &[Complex64]) -> Result<DDFilter> {
        if h_a.len() != self.grid.mn() {
            return Err(Error::DimensionMismatch {
                expected: self.grid.mn(),
                got: h_a.len(),
            });
        }
        DDFilter::from_fn(self.grid, TapRect::full_window(&self.grid), |k, l| {
            h_a[self.channel_index(k, l)]
        })
    }
}

/// Builds the `MN x K` matrix mapping prefilter taps to precoded-channel taps:
/// `H[(k,l), (k',l')] = h[k-k', l-l'] e^{j2π k'(l-l')/(MN)}` on `S_h`.
pub fn assemble_h(h: &DDFilter, layout: &PrefilterLayout) -> Result<CMatrix> {
    h.grid().check_same(&layout.grid)?;
    let s_h = layout.s_h.tap_rect();
    if h.iter()
        .any(|(k, l, v)| v != Complex64::new(0.0, 0.0) && !s_h.contains(k, l))
    {
        return Err(Error::SupportMismatch);
    }
    let mn = layout.grid.mn() as i64;
    let mut mat = CMatrix::zeros(layout.grid.mn(), layout.k());
    for col in 0..layout.k() {
        let (kp, lp) = layout.prefilter_coords(col);
        for (dk, dl) in s_h.points() {
            let v = h.get(dk, dl);
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            let row = layout.channel_index(kp + dk, lp + dl);
            mat[(row, col)] = v * unit_root(kp * dl, mn);
        }
    }
    Ok(mat)
}

/// Optimal unit-norm prefilter and the resulting precoded channel.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecoderSolution {
    /// Unit-norm prefilter taps, flattened by the layout.
    pub a: Vec<Complex64>,
    /// Norm of the unnormalized solution `B^{-1} h_0`.
    pub lambda: f64,
    /// Precoded channel `H a` on the full-period window.
    pub h_a: DDFilter,
    /// One-tap SINR of `h_a` (linear).
    pub gamma: f64,
    /// SNR used in the design (linear).
    pub rho: f64,
    pub layout: PrefilterLayout,
}

impl PrecoderSolution {
    /// The prefilter as a DD filter on `S_a`.
    pub fn prefilter(&self) -> DDFilter {
        self.layout
            .prefilter(&self.a)
            .expect("solution vector matches its layout")
    }
}

/// Solves for the SINR-maximizing prefilter given `H` and `ρ`.
pub fn optimal_prefilter(h_mat: &CMatrix, layout: &PrefilterLayout, rho: f64) -> Result<PrecoderSolution> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::param("rho", "must be positive and finite"));
    }
    if h_mat.rows() != layout.grid.mn() || h_mat.cols() != layout.k() {
        return Err(Error::DimensionMismatch {
            expected: layout.grid.mn() * layout.k(),
            got: h_mat.rows() * h_mat.cols(),
        });
    }
    let i0 = layout.useful_row();
    let useful: Vec<Complex64> = h_mat.row(i0).iter().map(|v| v.conj()).collect();

    // B = H^H H - h_0 h_0^H + I/ρ
    let mut b = h_mat.gram();
    let kk = layout.k();
    for p in 0..kk {
        for q in 0..kk {
            b[(p, q)] -= useful[p] * useful[q].conj();
        }
    }
    for p in 0..kk {
        b[(p, p)].im = 0.0;
        for q in 0..p {
            let avg = (b[(p, q)] + b[(q, p)].conj()) * 0.5;
            b[(p, q)] = avg;
            b[(q, p)] = avg.conj();
        }
    }
    b.add_diagonal(1.0 / rho);

    let u = Cholesky::new(&b)?.solve(&useful)?;
    let lambda = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::ZeroSignal);
    }
    // Fix the global phase so the origin tap is real and non-negative.
    let phase = layout
        .prefilter_index(0, 0)
        .map(|i| u[i])
        .filter(|z| z.norm() > 0.0)
        .map_or(Complex64::new(1.0, 0.0), |z| z.conj() / z.norm());
    let a: Vec<Complex64> = u.iter().map(|z| z * phase / lambda).collect();

    let h_a = layout.channel_filter(&h_mat.mul_vec(&a)?)?;
    let gamma = sinr(&h_a, rho);
    Ok(PrecoderSolution {
        a,
        lambda,
        h_a,
        gamma,
        rho,
        layout: layout.clone(),
    })
}

/// Extracts the channel support, truncates `h` to it and solves for the
/// optimal prefilter.
pub fn design_precoder(h: &DDFilter, eps_supp: f64, rho: f64) -> Result<PrecoderSolution> {
    let s_h = extract_support(h, eps_supp)?;
    let layout = PrefilterLayout::new(*h.grid(), s_h)?;
    let h_s = h.restrict(s_h.tap_rect())?;
    let mat = assemble_h(&h_s, &layout)?;
    optimal_prefilter(&mat, &layout, rho)
}

/// One-tap SINR of a precoded channel.
pub fn sinr(h_a: &DDFilter, rho: f64) -> f64 {
    let useful = h_a.get(0, 0).norm_sqr();
    let interference: f64 = h_a.energy() - useful;
    useful / (1.0 / rho + interference.max(0.0))
}

/// Fraction of the filter energy at the origin tap.
pub fn localization_metric(h_a: &DDFilter) -> Result<f64> {
    let total = h_a.energy();
    if total == 0.0 {
        return Err(Error::ZeroSignal);
    }
    Ok(h_a.get(0, 0).norm_sqr() / total)
}
