//! Quasi-periodic DD signals, sparse DD filters and twisted convolution.
//!
//! A filter tap at `(k', l')` acts on a signal `x` as
//! `f[k',l'] x[k-k', l-l'] e^{j2π l'(k-k')/(MN)}`; signals are stored on the
//! fundamental domain `[0,M) x [0,N)` and extended by
//! `x[k+nM, l+mN] = e^{j2π n l/N} x[k,l]`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::GridParams;

/// `e^{j2π num/den}`, with the numerator reduced modulo `den` first so large
/// lattice indices do not lose phase precision.
pub(crate) fn unit_root(num: i64, den: i64) -> Complex64 {
    let r = num.rem_euclid(den);
    let theta = 2.0 * PI * (r as f64) / (den as f64);
    Complex64::new(theta.cos(), theta.sin())
}

/// Table of the `len`-th roots of unity.
#[derive(Debug, Clone)]
pub(crate) struct RootTable {
    roots: Vec<Complex64>,
}

impl RootTable {
    pub(crate) fn new(len: usize) -> Self {
        let den = len as i64;
        RootTable {
            roots: (0..den).map(|r| unit_root(r, den)).collect(),
        }
    }

    #[inline]
    pub(crate) fn get(&self, num: i64) -> Complex64 {
        self.roots[num.rem_euclid(self.roots.len() as i64) as usize]
    }
}

/// A quasi-periodic discrete DD signal, stored on its fundamental domain.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiPeriodicSignal {
    grid: GridParams,
    /// Row-major `[k][l]`, `k` in `[0,M)`, `l` in `[0,N)`.
    data: Vec<Complex64>,
}

impl QuasiPeriodicSignal {
    pub fn zeros(grid: GridParams) -> Self {
        QuasiPeriodicSignal {
            grid,
            data: vec![Complex64::new(0.0, 0.0); grid.mn()],
        }
    }

    pub fn from_fundamental(grid: GridParams, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != grid.mn() {
            return Err(Error::DimensionMismatch {
                expected: grid.mn(),
                got: data.len(),
            });
        }
        Ok(QuasiPeriodicSignal { grid, data })
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    pub fn fundamental(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_fundamental(self) -> Vec<Complex64> {
        self.data
    }

    /// Fundamental-domain entry; `k < M`, `l < N`.
    #[inline]
    pub fn at(&self, k: usize, l: usize) -> Complex64 {
        self.data[k * self.grid.n + l]
    }

    #[inline]
    pub fn set(&mut self, k: usize, l: usize, value: Complex64) {
        let n = self.grid.n;
        self.data[k * n + l] = value;
    }

    /// Value at an arbitrary lattice point via the quasi-periodic extension.
    pub fn eval(&self, k: i64, l: i64) -> Complex64 {
        let (m, n) = (self.grid.m as i64, self.grid.n as i64);
        let periods = k.div_euclid(m);
        let base = self.at(k.rem_euclid(m) as usize, l.rem_euclid(n) as usize);
        if periods == 0 {
            base
        } else {
            base * unit_root(periods * l, n)
        }
    }

    #[inline]
    fn eval_with(&self, roots: &RootTable, k: i64, l: i64) -> Complex64 {
        let (m, n) = (self.grid.m as i64, self.grid.n as i64);
        let periods = k.div_euclid(m);
        let base = self.at(k.rem_euclid(m) as usize, l.rem_euclid(n) as usize);
        // N-th roots are the M-th powers of the MN-th roots.
        base * roots.get(periods * l * m)
    }

    /// Sum of squared magnitudes over the fundamental domain.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Embeds an `M x N` row-major symbol array as a quasi-periodic signal.
pub fn embed_symbols(symbols: &[Complex64], grid: GridParams) -> Result<QuasiPeriodicSignal> {
    QuasiPeriodicSignal::from_fundamental(grid, symbols.to_vec())
}

/// Evaluates `sig` at any lattice point.
pub fn qp_eval(sig: &QuasiPeriodicSignal, k: i64, l: i64) -> Complex64 {
    sig.eval(k, l)
}

/// Inclusive rectangle of DD lattice points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TapRect {
    pub k_lo: i64,
    pub k_hi: i64,
    pub l_lo: i64,
    pub l_hi: i64,
}

impl TapRect {
    pub fn new(k_lo: i64, k_hi: i64, l_lo: i64, l_hi: i64) -> Self {
        TapRect { k_lo, k_hi, l_lo, l_hi }
    }

    /// One full period centred on the origin: `[-M/2, M/2) x [-N/2, N/2)`.
    pub fn full_window(grid: &GridParams) -> Self {
        let (hm, hn) = ((grid.m / 2) as i64, (grid.n / 2) as i64);
        TapRect::new(-hm, hm - 1, -hn, hn - 1)
    }

    pub fn delay_len(&self) -> usize {
        (self.k_hi - self.k_lo + 1) as usize
    }

    pub fn doppler_len(&self) -> usize {
        (self.l_hi - self.l_lo + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.delay_len() * self.doppler_len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_hi < self.k_lo || self.l_hi < self.l_lo
    }

    pub fn contains(&self, k: i64, l: i64) -> bool {
        (self.k_lo..=self.k_hi).contains(&k) && (self.l_lo..=self.l_hi).contains(&l)
    }

    pub fn contains_rect(&self, other: &TapRect) -> bool {
        self.contains(other.k_lo, other.l_lo) && self.contains(other.k_hi, other.l_hi)
    }

    pub fn minkowski_sum(&self, other: &TapRect) -> TapRect {
        TapRect::new(
            self.k_lo + other.k_lo,
            self.k_hi + other.k_hi,
            self.l_lo + other.l_lo,
            self.l_hi + other.l_hi,
        )
    }

    /// Lattice points in row-major (`k` outer) order.
    pub fn points(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let r = *self;
        (r.k_lo..=r.k_hi).flat_map(move |k| (r.l_lo..=r.l_hi).map(move |l| (k, l)))
    }
}

/// A finite DD filter: dense taps over a rectangular support.
#[derive(Debug, Clone, PartialEq)]
pub struct DDFilter {
    grid: GridParams,
    rect: TapRect,
    taps: Vec<Complex64>,
}

impl DDFilter {
    /// All-zero filter over `rect`. The rectangle must not alias on `grid`.
    pub fn zeros(grid: GridParams, rect: TapRect) -> Result<Self> {
        let delay_width = rect.k_hi - rect.k_lo;
        let doppler_width = rect.l_hi - rect.l_lo;
        if delay_width < 0 || doppler_width < 0 {
            return Err(Error::param("rect", "empty support rectangle"));
        }
        if delay_width >= grid.m as i64 || doppler_width >= grid.n as i64 {
            return Err(Error::Aliasing {
                delay_width,
                doppler_width,
                m: grid.m,
                n: grid.n,
            });
        }
        Ok(DDFilter {
            grid,
            rect,
            taps: vec![Complex64::new(0.0, 0.0); rect.len()],
        })
    }

    pub fn from_taps(grid: GridParams, rect: TapRect, taps: Vec<Complex64>) -> Result<Self> {
        let mut f = DDFilter::zeros(grid, rect)?;
        if taps.len() != f.taps.len() {
            return Err(Error::DimensionMismatch {
                expected: f.taps.len(),
                got: taps.len(),
            });
        }
        f.taps = taps;
        Ok(f)
    }

    pub fn from_fn(grid: GridParams, rect: TapRect, mut tap: impl FnMut(i64, i64) -> Complex64) -> Result<Self> {
        let mut f = DDFilter::zeros(grid, rect)?;
        for (slot, (k, l)) in f.taps.iter_mut().zip(rect.points()) {
            *slot = tap(k, l);
        }
        Ok(f)
    }

    /// Unit tap at `(k, l)`.
    pub fn delta(grid: GridParams, k: i64, l: i64) -> Self {
        let mut f = DDFilter::zeros(grid, TapRect::new(k, k, l, l)).expect("single tap never aliases");
        f.taps[0] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    pub fn rect(&self) -> &TapRect {
        &self.rect
    }

    /// Taps in the row-major order of [`TapRect::points`].
    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    #[inline]
    fn index(&self, k: i64, l: i64) -> Option<usize> {
        if self.rect.contains(k, l) {
            let row = (k - self.rect.k_lo) as usize;
            let col = (l - self.rect.l_lo) as usize;
            Some(row * self.rect.doppler_len() + col)
        } else {
            None
        }
    }

    /// Tap value; zero outside the support.
    #[inline]
    pub fn get(&self, k: i64, l: i64) -> Complex64 {
        self.index(k, l).map_or(Complex64::new(0.0, 0.0), |i| self.taps[i])
    }

    pub fn set(&mut self, k: i64, l: i64, value: Complex64) -> Result<()> {
        let i = self.index(k, l).ok_or(Error::SupportMismatch)?;
        self.taps[i] = value;
        Ok(())
    }

    /// `(k, l, tap)` over the whole support, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (i64, i64, Complex64)> + '_ {
        self.rect.points().zip(self.taps.iter()).map(|((k, l), &v)| (k, l, v))
    }

    pub fn energy(&self) -> f64 {
        self.taps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn scale(&self, c: Complex64) -> DDFilter {
        DDFilter {
            grid: self.grid,
            rect: self.rect,
            taps: self.taps.iter().map(|&z| z * c).collect(),
        }
    }

    /// Copy of this filter with support `rect`; taps outside `rect` are dropped.
    pub fn restrict(&self, rect: TapRect) -> Result<DDFilter> {
        DDFilter::from_fn(self.grid, rect, |k, l| self.get(k, l))
    }

    /// Single output tap of `self *σ other` at `(k, l)`, with no support or
    /// aliasing constraint on the result.
    pub fn twisted_tap(&self, other: &DDFilter, k: i64, l: i64) -> Complex64 {
        let mn = self.grid.mn() as i64;
        self.iter()
            .filter(|(_, _, v)| *v != Complex64::new(0.0, 0.0))
            .map(|(k1, l1, v)| v * other.get(k - k1, l - l1) * unit_root(l1 * (k - k1), mn))
            .sum()
    }
}

/// Twisted convolution of two filters; the output support is the Minkowski
/// sum of the input supports.
pub fn twisted_conv_ff(f: &DDFilter, g: &DDFilter) -> Result<DDFilter> {
    f.grid.check_same(&g.grid)?;
    let rect = f.rect.minkowski_sum(&g.rect);
    let mut out = DDFilter::zeros(f.grid, rect)?;
    let roots = RootTable::new(f.grid.mn());
    for (k1, l1, fv) in f.iter() {
        if fv == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (k2, l2, gv) in g.iter() {
            let i = out.index(k1 + k2, l1 + l2).expect("Minkowski sum covers every product");
            out.taps[i] += fv * gv * roots.get(l1 * k2);
        }
    }
    Ok(out)
}

/// Twisted convolution of a filter with a quasi-periodic signal. The output
/// is again quasi-periodic and is returned on the fundamental domain.
pub fn twisted_conv_fs(f: &DDFilter, sig: &QuasiPeriodicSignal) -> Result<QuasiPeriodicSignal> {
    f.grid.check_same(&sig.grid)?;
    let grid = sig.grid;
    let (m, n) = (grid.m as i64, grid.n as i64);
    let roots = RootTable::new(grid.mn());
    let mut out = QuasiPeriodicSignal::zeros(grid);
    for (kp, lp, fv) in f.iter() {
        if fv == Complex64::new(0.0, 0.0) {
            continue;
        }
        for k in 0..m {
            let twist_base = lp * (k - kp);
            let row = &mut out.data[(k * n) as usize..((k + 1) * n) as usize];
            for (l, slot) in row.iter_mut().enumerate() {
                let x = sig.eval_with(&roots, k - kp, l as i64 - lp);
                *slot += fv * x * roots.get(twist_base);
            }
        }
    }
    Ok(out)
}
