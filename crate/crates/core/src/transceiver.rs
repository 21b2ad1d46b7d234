//! Frame construction, channel application, estimation and equalization.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channel::SupportRect;
use crate::dd::{twisted_conv_fs, unit_root, DDFilter, QuasiPeriodicSignal, RootTable, TapRect};
use crate::error::{Error, Result};
use crate::grid::GridParams;
use crate::linalg::{CMatrix, Cholesky};
use crate::precoder::PrecoderSolution;

/// Data symbol energy `e`, noise variance `n0` per DD sample and
/// pilot-to-data power ratio `eta`, all linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub e: f64,
    pub n0: f64,
    pub eta: f64,
}

impl LinkBudget {
    pub fn new(e: f64, n0: f64, eta: f64) -> Result<Self> {
        for (name, v) in [("E", e), ("N0", n0), ("eta", eta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive and finite"));
            }
        }
        Ok(LinkBudget { e, n0, eta })
    }

    /// Unit data energy at SNR `rho`.
    pub fn from_snr(rho: f64, eta: f64) -> Result<Self> {
        LinkBudget::new(1.0, 1.0 / rho, eta)
    }

    /// Unit noise variance, with `E` chosen so the total pilot plus data
    /// energy per carrier over `N0` equals `total_snr`:
    /// `(N_d E + η N_d E) / (MN N0) = total_snr`.
    pub fn fixed_total(total_snr: f64, eta: f64, n_data: usize, mn: usize) -> Result<Self> {
        let e = total_snr * mn as f64 / (n_data as f64 * (1.0 + eta));
        LinkBudget::new(e, 1.0, eta)
    }

    pub fn rho(&self) -> f64 {
        self.e / self.n0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameMode {
    /// Single pilot, no guard carriers.
    Precoded,
    /// Pilot inside a guard strip of `2g+1` delay bins spanning all Doppler bins.
    Conventional { guard_half_width: usize },
}

/// Placement of pilot, data and guard carriers on the fundamental domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FramePlan {
    grid: GridParams,
    mode: FrameMode,
    pilot: (usize, usize),
    data: Vec<(usize, usize)>,
    guard: Vec<(usize, usize)>,
}

impl FramePlan {
    /// Pilot at `(M/2, N/2)`, every other carrier carries data.
    pub fn precoded(grid: GridParams) -> Self {
        let pilot = (grid.m / 2, grid.n / 2);
        let data = (0..grid.m)
            .flat_map(|k| (0..grid.n).map(move |l| (k, l)))
            .filter(|&p| p != pilot)
            .collect();
        FramePlan {
            grid,
            mode: FrameMode::Precoded,
            pilot,
            data,
            guard: Vec::new(),
        }
    }

    /// Pilot at `(M/2, N/2)` inside delay bins `M/2 - g ..= M/2 + g`, which are
    /// otherwise empty.
    pub fn conventional(grid: GridParams, guard_half_width: usize) -> Result<Self> {
        let g = guard_half_width;
        if 2 * g + 1 >= grid.m {
            return Err(Error::param("guard_half_width", "guard strip leaves no data carriers"));
        }
        let pilot = (grid.m / 2, grid.n / 2);
        let in_strip = |k: usize| k + g >= pilot.0 && k <= pilot.0 + g;
        let mut data = Vec::new();
        let mut guard = Vec::new();
        for k in 0..grid.m {
            for l in 0..grid.n {
                if (k, l) == pilot {
                    continue;
                }
                if in_strip(k) {
                    guard.push((k, l));
                } else {
                    data.push((k, l));
                }
            }
        }
        Ok(FramePlan {
            grid,
            mode: FrameMode::Conventional { guard_half_width: g },
            pilot,
            data,
            guard,
        })
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    pub fn mode(&self) -> FrameMode {
        self.mode
    }

    pub fn pilot(&self) -> (usize, usize) {
        self.pilot
    }

    pub fn data_positions(&self) -> &[(usize, usize)] {
        &self.data
    }

    pub fn guard_positions(&self) -> &[(usize, usize)] {
        &self.guard
    }

    pub fn data_count(&self) -> usize {
        self.data.len()
    }

    /// Pilot amplitude `sqrt(E N_d η)`: pilot energy is `η` times the
    /// aggregate data energy of the frame.
    pub fn pilot_amplitude(&self, budget: &LinkBudget) -> f64 {
        (budget.e * self.data_count() as f64 * budget.eta).sqrt()
    }

    /// Largest read-off support that fits in the guard strip with a one-bin
    /// margin: delay taps `-(g-1)..=g-1`, Doppler taps `|l| <= N/2 - 2`.
    pub fn default_read_support(&self) -> Result<SupportRect> {
        match self.mode {
            FrameMode::Conventional { guard_half_width: g } if g >= 1 => {
                let g = g as i64 - 1;
                SupportRect::new(-g, g, self.grid.n as i64 / 2 - 2, &self.grid)
            }
            FrameMode::Conventional { .. } => Err(Error::GuardTooNarrow),
            FrameMode::Precoded => Err(Error::ModeMismatch),
        }
    }

    fn flat(&self, (k, l): (usize, usize)) -> usize {
        k * self.grid.n + l
    }
}

/// Information signal `s_dd`: `sqrt(E)`-scaled unit-energy data on the data
/// carriers, the pilot at its carrier and zeros on guards.
pub fn info_signal(data: &[Complex64], plan: &FramePlan, budget: &LinkBudget) -> Result<QuasiPeriodicSignal> {
    if data.len() != plan.data_count() {
        return Err(Error::DimensionMismatch {
            expected: plan.data_count(),
            got: data.len(),
        });
    }
    let amp = budget.e.sqrt();
    let mut s = QuasiPeriodicSignal::zeros(plan.grid);
    for (&(k, l), &d) in plan.data.iter().zip(data) {
        s.set(k, l, d * amp);
    }
    s.set(
        plan.pilot.0,
        plan.pilot.1,
        Complex64::new(plan.pilot_amplitude(budget), 0.0),
    );
    Ok(s)
}

/// Precoded frame `a *σ s_dd` for unit-energy data symbols.
pub fn build_frame_precoded(
    data: &[Complex64],
    plan: &FramePlan,
    budget: &LinkBudget,
    precoder: &PrecoderSolution,
) -> Result<QuasiPeriodicSignal> {
    if plan.mode != FrameMode::Precoded {
        return Err(Error::ModeMismatch);
    }
    plan.grid.check_same(precoder.layout.grid())?;
    let s = info_signal(data, plan, budget)?;
    twisted_conv_fs(&precoder.prefilter(), &s)
}

/// Conventional (unprecoded) frame for unit-energy data symbols.
pub fn build_frame_conventional(
    data: &[Complex64],
    plan: &FramePlan,
    budget: &LinkBudget,
) -> Result<QuasiPeriodicSignal> {
    if !matches!(plan.mode, FrameMode::Conventional { .. }) {
        return Err(Error::ModeMismatch);
    }
    info_signal(data, plan, budget)
}

/// Circularly-symmetric complex Gaussian sample with the given variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let sd = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * sd, im * sd)
}

/// `y_dd = h *σ x_dd + n_dd` with i.i.d. `CN(0, N0)` noise per fundamental
/// sample.
pub fn apply_channel<R: Rng + ?Sized>(
    x: &QuasiPeriodicSignal,
    h: &DDFilter,
    budget: &LinkBudget,
    rng: &mut R,
) -> Result<QuasiPeriodicSignal> {
    let clean = twisted_conv_fs(h, x)?;
    let grid = *clean.grid();
    let noisy = clean
        .into_fundamental()
        .into_iter()
        .map(|v| v + complex_gaussian(rng, budget.n0))
        .collect();
    QuasiPeriodicSignal::from_fundamental(grid, noisy)
}

/// Shrinkage estimate of the precoded origin tap from the pilot carrier:
/// `y[k_p,l_p] / (A (1 + 1/(ρ η (MN-1))))` with `A` the pilot amplitude.
pub fn estimate_h_a00(y: &QuasiPeriodicSignal, plan: &FramePlan, budget: &LinkBudget) -> Result<Complex64> {
    if plan.mode != FrameMode::Precoded {
        return Err(Error::ModeMismatch);
    }
    if budget.eta.is_nan() || budget.eta <= 0.0 {
        return Err(Error::param("eta", "must be positive"));
    }
    let nd = plan.data_count() as f64;
    let shrink = 1.0 + 1.0 / (budget.rho() * budget.eta * nd);
    Ok(y.at(plan.pilot.0, plan.pilot.1) / (plan.pilot_amplitude(budget) * shrink))
}

/// Per-carrier scalar MMSE: `h* y / (|h|^2 + 1/ρ)` on each data carrier,
/// in the order of [`FramePlan::data_positions`].
pub fn one_tap_equalize(
    y: &QuasiPeriodicSignal,
    h_hat: Complex64,
    plan: &FramePlan,
    budget: &LinkBudget,
) -> Vec<Complex64> {
    let gain = h_hat.conj() / (h_hat.norm_sqr() + 1.0 / budget.rho());
    plan.data.iter().map(|&(k, l)| gain * y.at(k, l)).collect()
}

/// Read-off channel estimate from the conventional pilot.
///
/// For `(k,l)` in the read window `[k_p+k_min-1, k_p+k_max+1] x
/// [l_p-l_max-1, l_p+l_max+1]` the tap `h[k-k_p, l-l_p]` is
/// `y[k,l] e^{-j2π(l-l_p)k_p/(MN)} / A`; taps whose power is below
/// `eps_det` times the strongest are zeroed.
pub fn estimate_channel_conventional(
    y: &QuasiPeriodicSignal,
    plan: &FramePlan,
    budget: &LinkBudget,
    read: &SupportRect,
    eps_det: f64,
) -> Result<DDFilter> {
    let FrameMode::Conventional { guard_half_width: g } = plan.mode else {
        return Err(Error::ModeMismatch);
    };
    read.validate(&plan.grid)?;
    const MARGIN: i64 = 1;
    let g = g as i64;
    let rect = TapRect::new(
        read.k_min - MARGIN,
        read.k_max + MARGIN,
        -read.l_max - MARGIN,
        read.l_max + MARGIN,
    );
    if rect.k_lo < -g || rect.k_hi > g || rect.doppler_len() > plan.grid.n {
        return Err(Error::GuardTooNarrow);
    }
    let (kp, lp) = (plan.pilot.0 as i64, plan.pilot.1 as i64);
    let mn = plan.grid.mn() as i64;
    let amp = plan.pilot_amplitude(budget);
    let mut est = DDFilter::from_fn(plan.grid, rect, |dk, dl| {
        y.eval(kp + dk, lp + dl) * unit_root(-dl * kp, mn) / amp
    })?;
    let peak = est.taps().iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    let floor = eps_det * peak;
    for (k, l, v) in est.clone().iter() {
        if v.norm_sqr() < floor {
            est.set(k, l, Complex64::new(0.0, 0.0))?;
        }
    }
    Ok(est)
}

/// `MN x MN` matrix taking the fundamental-domain symbols (flattened `k*N+l`)
/// to the fundamental domain of `h *σ s_dd`.
pub fn effective_matrix(h: &DDFilter) -> CMatrix {
    let grid = *h.grid();
    let (m, n) = (grid.m as i64, grid.n as i64);
    let roots = RootTable::new(grid.mn());
    let mut mat = CMatrix::zeros(grid.mn(), grid.mn());
    for (kp, lp, v) in h.iter() {
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        for k in 0..m {
            let ks = k - kp;
            let periods = ks.div_euclid(m);
            for l in 0..n {
                let ls = l - lp;
                let col = ks.rem_euclid(m) * n + ls.rem_euclid(n);
                // quasi-periodic extension times the twist phase
                let phase = roots.get(periods * ls * m) * roots.get(lp * ks);
                mat[((k * n + l) as usize, col as usize)] += v * phase;
            }
        }
    }
    mat
}

fn linear_equalize(
    y: &QuasiPeriodicSignal,
    h_hat: &DDFilter,
    plan: &FramePlan,
    budget: &LinkBudget,
    regularization: f64,
) -> Result<Vec<Complex64>> {
    y.grid().check_same(&plan.grid)?;
    h_hat.grid().check_same(&plan.grid)?;
    let full = effective_matrix(h_hat);
    // Remove the known pilot contribution.
    let pilot_col = full.column(plan.flat(plan.pilot));
    let amp = plan.pilot_amplitude(budget);
    let residual: Vec<Complex64> = y
        .fundamental()
        .iter()
        .zip(&pilot_col)
        .map(|(&yv, &p)| yv - p * amp)
        .collect();
    let cols: Vec<usize> = plan.data.iter().map(|&p| plan.flat(p)).collect();
    let hd = full.select_columns(&cols);
    let mut normal = hd.gram();
    normal.add_diagonal(regularization);
    let rhs = hd.adjoint_mul_vec(&residual)?;
    Cholesky::new(&normal)?.solve(&rhs)
}

/// Joint LMMSE detection of all data carriers:
/// `(H^H H + I/ρ)^{-1} H^H (y - A h_pilot)` with `H` the data columns of the
/// effective matrix built from `h_hat`.
pub fn joint_lmmse_equalize(
    y: &QuasiPeriodicSignal,
    h_hat: &DDFilter,
    plan: &FramePlan,
    budget: &LinkBudget,
) -> Result<Vec<Complex64>> {
    linear_equalize(y, h_hat, plan, budget, 1.0 / budget.rho())
}

/// Hard decisions on equalizer output: indices of the nearest unit-energy
/// constellation points after removing the `sqrt(E)` scaling.
pub fn decide_symbols(estimates: &[Complex64], budget: &LinkBudget, qam: &crate::qam::Qam) -> Vec<usize> {
    let inv = 1.0 / budget.e.sqrt();
    estimates.iter().map(|&z| qam.decide(z * inv)).collect()
}

/// Expands an index into a unit-energy symbol vector; used for frame data.
pub fn symbols_from_indices(indices: &[usize], qam: &crate::qam::Qam) -> Vec<Complex64> {
    indices.iter().map(|&i| qam.symbol(i)).collect()
}

#[doc(hidden)]
pub fn zero_forcing_equalize(
    y: &QuasiPeriodicSignal,
    h_hat: &DDFilter,
    plan: &FramePlan,
    budget: &LinkBudget,
) -> Result<Vec<Complex64>> {
    linear_equalize(y, h_hat, plan, budget, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{draw_veh_a, effective_channel_taps};
    use crate::dd::embed_symbols;
    use crate::precoder::design_precoder;
    use crate::pulse::PulseParams;
    use crate::qam::Qam;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_data(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
        let q = Qam::new(4).unwrap();
        (0..n).map(|_| q.symbol(rng.random_range(0..4))).collect()
    }

    #[test]
    fn plan_counts() {
        let grid = GridParams::default();
        let p = FramePlan::precoded(grid);
        assert_eq!(p.data_count(), 323);
        assert_eq!(p.pilot(), (9, 9));
        let c4 = FramePlan::conventional(grid, 4).unwrap();
        assert_eq!(c4.data_count(), 162);
        assert_eq!(c4.guard_positions().len(), 9 * 18 - 1);
        let c0 = FramePlan::conventional(grid, 0).unwrap();
        assert_eq!(c0.data_count(), 17 * 18);
        assert_eq!(c0.guard_positions().len(), 17);
        assert!(FramePlan::conventional(grid, 9).is_err());
    }

    #[test]
    fn conventional_frame_energy_accounting() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let grid = GridParams::default();
        let plan = FramePlan::conventional(grid, 4).unwrap();
        let budget = LinkBudget::new(2.0, 0.1, 0.5).unwrap();
        let data = random_data(&mut rng, plan.data_count());
        let x = build_frame_conventional(&data, &plan, &budget).unwrap();
        for &(k, l) in plan.guard_positions() {
            assert_eq!(x.at(k, l), c(0.0, 0.0));
        }
        let nd = plan.data_count() as f64;
        let expected = nd * budget.e * (1.0 + budget.eta);
        assert!((x.energy() - expected).abs() < 1e-9 * expected);
        assert!((x.at(9, 9).re - (2.0 * 162.0 * 0.5f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pilot_vanishes_with_eta() {
        let grid = GridParams::default();
        let plan = FramePlan::precoded(grid);
        let amp = |eta: f64| plan.pilot_amplitude(&LinkBudget::new(1.0, 1.0, eta).unwrap());
        assert!(amp(1e-12) < 1e-4);
        assert!((amp(0.1) - (323.0 * 0.1f64).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let grid = GridParams::default();
        let plan = FramePlan::precoded(grid);
        let budget = LinkBudget::from_snr(10.0, 0.1).unwrap();
        let y = QuasiPeriodicSignal::zeros(grid);
        assert_eq!(
            build_frame_conventional(&vec![c(1.0, 0.0); 323], &plan, &budget),
            Err(Error::ModeMismatch)
        );
        let s = SupportRect::new(0, 0, 0, &grid).unwrap();
        assert!(estimate_channel_conventional(&y, &plan, &budget, &s, 1e-3).is_err());
        let conv = FramePlan::conventional(grid, 4).unwrap();
        assert_eq!(estimate_h_a00(&y, &conv, &budget), Err(Error::ModeMismatch));
    }

    #[test]
    fn delta_precoder_leaves_frame_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let grid = GridParams::new(8, 8, 1.0).unwrap();
        let h = DDFilter::delta(grid, 0, 0)
            .restrict(TapRect::full_window(&grid))
            .unwrap();
        let sol = design_precoder(&h, 0.0, 100.0).unwrap();
        let plan = FramePlan::precoded(grid);
        let budget = LinkBudget::from_snr(100.0, 0.1).unwrap();
        let data = random_data(&mut rng, plan.data_count());
        let x = build_frame_precoded(&data, &plan, &budget, &sol).unwrap();
        let s = info_signal(&data, &plan, &budget).unwrap();
        for (a, b) in x.fundamental().iter().zip(s.fundamental()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn noiseless_identity_channel_passes_frame() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = GridParams::new(6, 6, 1.0).unwrap();
        let plan = FramePlan::precoded(grid);
        let budget = LinkBudget::new(1.0, 1e-300, 0.1).unwrap();
        let data = random_data(&mut rng, plan.data_count());
        let x = info_signal(&data, &plan, &budget).unwrap();
        let y = apply_channel(&x, &DDFilter::delta(grid, 0, 0), &budget, &mut rng).unwrap();
        for (a, b) in y.fundamental().iter().zip(x.fundamental()) {
            assert!((a - b).norm() < 1e-140);
        }
    }

    #[test]
    fn noise_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let grid = GridParams::default();
        let budget = LinkBudget::new(1.0, 0.37, 0.1).unwrap();
        let zero = QuasiPeriodicSignal::zeros(grid);
        let h = DDFilter::delta(grid, 0, 0);
        let mut total = 0.0;
        let mut count = 0usize;
        while count < 100_000 {
            let y = apply_channel(&zero, &h, &budget, &mut rng).unwrap();
            total += y.energy();
            count += grid.mn();
        }
        let var = total / count as f64;
        assert!((var / 0.37 - 1.0).abs() < 0.02, "variance {var}");
    }

    #[test]
    fn channel_is_linear_in_the_frame() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let grid = GridParams::new(6, 6, 1.0).unwrap();
        let h = DDFilter::from_fn(grid, TapRect::new(-1, 1, -1, 1), |_, _| c(rng.random(), rng.random())).unwrap();
        let x1 = embed_symbols(&random_data(&mut rng, 36), grid).unwrap();
        let x2 = embed_symbols(&random_data(&mut rng, 36), grid).unwrap();
        let sum = QuasiPeriodicSignal::from_fundamental(
            grid,
            x1.fundamental()
                .iter()
                .zip(x2.fundamental())
                .map(|(a, b)| a + b)
                .collect(),
        )
        .unwrap();
        let y1 = twisted_conv_fs(&h, &x1).unwrap();
        let y2 = twisted_conv_fs(&h, &x2).unwrap();
        let ys = twisted_conv_fs(&h, &sum).unwrap();
        for i in 0..36 {
            assert!((ys.fundamental()[i] - y1.fundamental()[i] - y2.fundamental()[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn shrinkage_estimator() {
        let grid = GridParams::default();
        let plan = FramePlan::precoded(grid);
        let rho = crate::db_to_linear(15.0);
        let budget = LinkBudget::from_snr(rho, 0.1).unwrap();
        let hc = c(0.6, -0.3);
        let mut y = QuasiPeriodicSignal::zeros(grid);
        y.set(9, 9, hc * plan.pilot_amplitude(&budget));
        let est = estimate_h_a00(&y, &plan, &budget).unwrap();
        let factor = 1.0 / (1.0 + 1.0 / (rho * 0.1 * 323.0));
        assert!((est - hc * factor).norm() < 1e-14);
        assert!((factor - 0.99902).abs() < 5e-6);

        let big = LinkBudget::from_snr(1e12, 1e3).unwrap();
        let mut y = QuasiPeriodicSignal::zeros(grid);
        y.set(9, 9, hc * plan.pilot_amplitude(&big));
        assert!((estimate_h_a00(&y, &plan, &big).unwrap() - hc).norm() < 1e-12);
    }

    #[test]
    fn one_tap_examples() {
        let grid = GridParams::new(4, 4, 1.0).unwrap();
        let plan = FramePlan::precoded(grid);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let y = embed_symbols(&random_data(&mut rng, 16), grid).unwrap();
        let hi = LinkBudget::from_snr(1e15, 0.1).unwrap();
        let unit = LinkBudget::from_snr(1.0, 0.1).unwrap();
        let out_hi = one_tap_equalize(&y, c(1.0, 0.0), &plan, &hi);
        let out_unit = one_tap_equalize(&y, c(1.0, 0.0), &plan, &unit);
        for ((&(k, l), a), b) in plan.data_positions().iter().zip(&out_hi).zip(&out_unit) {
            assert!((a - y.at(k, l)).norm() < 1e-12);
            assert!((b - y.at(k, l) * 0.5).norm() < 1e-15);
        }
        assert_eq!(out_hi.len(), 15);
    }

    #[test]
    fn precoded_noiseless_recovery_has_mmse_bias() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let grid = GridParams::new(8, 8, 1.0).unwrap();
        let h = DDFilter::delta(grid, 0, 0)
            .scale(c(0.8, 0.6))
            .restrict(TapRect::full_window(&grid))
            .unwrap();
        let rho = 20.0;
        let sol = design_precoder(&h, 0.0, rho).unwrap();
        let plan = FramePlan::precoded(grid);
        let budget = LinkBudget::new(1.0, 1.0 / rho, 0.1).unwrap();
        let data = random_data(&mut rng, plan.data_count());
        let x = build_frame_precoded(&data, &plan, &budget, &sol).unwrap();
        let y = twisted_conv_fs(&h, &x).unwrap();
        let ha = sol.h_a.get(0, 0);
        let est = one_tap_equalize(&y, ha, &plan, &budget);
        let bias = ha.norm_sqr() / (ha.norm_sqr() + 1.0 / rho);
        for (e, d) in est.iter().zip(&data) {
            assert!((e - d * bias).norm() < 1e-12);
        }
    }

    #[test]
    fn conventional_estimate_of_single_tap_channel() {
        let grid = GridParams::default();
        let plan = FramePlan::conventional(grid, 4).unwrap();
        let budget = LinkBudget::new(1.0, 1.0, 1.0).unwrap();
        let read = plan.default_read_support().unwrap();
        let hc = c(-0.2, 0.9);
        let mut x = QuasiPeriodicSignal::zeros(grid);
        x.set(9, 9, c(plan.pilot_amplitude(&budget), 0.0));
        for tap in [(0i64, 0i64), (2, -3)] {
            let h = DDFilter::delta(grid, tap.0, tap.1).scale(hc);
            let y = twisted_conv_fs(&h, &x).unwrap();
            let est = estimate_channel_conventional(&y, &plan, &budget, &read, 1e-3).unwrap();
            for (k, l, v) in est.iter() {
                let expected = if (k, l) == tap { hc } else { c(0.0, 0.0) };
                assert!((v - expected).norm() < 1e-12, "tap {k},{l}");
            }
        }
        let zero =
            estimate_channel_conventional(&QuasiPeriodicSignal::zeros(grid), &plan, &budget, &read, 1e-3).unwrap();
        assert_eq!(zero.energy(), 0.0);
    }

    #[test]
    fn read_window_must_fit_in_guard() {
        let grid = GridParams::default();
        let plan = FramePlan::conventional(grid, 4).unwrap();
        let budget = LinkBudget::new(1.0, 1.0, 1.0).unwrap();
        let y = QuasiPeriodicSignal::zeros(grid);
        let wide = SupportRect::new(-4, 3, 2, &grid).unwrap();
        assert_eq!(
            estimate_channel_conventional(&y, &plan, &budget, &wide, 1e-3),
            Err(Error::GuardTooNarrow)
        );
        assert_eq!(
            FramePlan::conventional(grid, 0).unwrap().default_read_support(),
            Err(Error::GuardTooNarrow)
        );
    }

    #[test]
    fn effective_matrix_matches_signal_domain() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let grid = GridParams::new(6, 6, 1.0).unwrap();
        for _ in 0..5 {
            let h = DDFilter::from_fn(grid, TapRect::new(-2, 3, -2, 2), |_, _| c(rng.random(), rng.random())).unwrap();
            let s = random_data(&mut rng, 36);
            let via_matrix = effective_matrix(&h).mul_vec(&s).unwrap();
            let direct = twisted_conv_fs(&h, &embed_symbols(&s, grid).unwrap()).unwrap();
            for (a, b) in via_matrix.iter().zip(direct.fundamental()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn joint_lmmse_inverts_identity_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let grid = GridParams::new(8, 8, 1.0).unwrap();
        let plan = FramePlan::conventional(grid, 1).unwrap();
        let budget = LinkBudget::new(1.0, 1e-14, 0.3).unwrap();
        let data = random_data(&mut rng, plan.data_count());
        let x = build_frame_conventional(&data, &plan, &budget).unwrap();
        let h = DDFilter::delta(grid, 0, 0);
        let y = twisted_conv_fs(&h, &x).unwrap();
        let est = joint_lmmse_equalize(&y, &h, &plan, &budget).unwrap();
        for (e, d) in est.iter().zip(&data) {
            assert!((e - d).norm() < 1e-10);
        }
    }

    #[test]
    fn lmmse_beats_zero_forcing() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let grid = GridParams::new(8, 8, 1.0).unwrap();
        let plan = FramePlan::conventional(grid, 1).unwrap();
        let budget = LinkBudget::from_snr(3.0, 0.5).unwrap();
        let (mut mse_l, mut mse_z) = (0.0, 0.0);
        for _ in 0..40 {
            let h = DDFilter::from_fn(grid, TapRect::new(0, 1, -1, 1), |_, _| {
                complex_gaussian(&mut rng, 1.0 / 6.0)
            })
            .unwrap();
            let data = random_data(&mut rng, plan.data_count());
            let x = build_frame_conventional(&data, &plan, &budget).unwrap();
            let y = apply_channel(&x, &h, &budget, &mut rng).unwrap();
            let l = joint_lmmse_equalize(&y, &h, &plan, &budget).unwrap();
            let z = zero_forcing_equalize(&y, &h, &plan, &budget).unwrap();
            mse_l += l.iter().zip(&data).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
            mse_z += z.iter().zip(&data).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        }
        assert!(mse_l < mse_z, "LMMSE {mse_l} vs ZF {mse_z}");
    }

    #[test]
    fn fixed_total_budget() {
        let b = LinkBudget::fixed_total(100.0, 0.1, 323, 324).unwrap();
        let total = (323.0 * b.e * 1.1) / (324.0 * b.n0);
        assert!((total - 100.0).abs() < 1e-10);
    }

    #[test]
    fn veh_a_pipeline_smoke() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let grid = GridParams::default();
        let ch = draw_veh_a(1000.0, &mut rng).unwrap();
        let h = effective_channel_taps(&ch, &grid, &PulseParams::default()).unwrap();
        let rho = crate::db_to_linear(15.0);
        let sol = design_precoder(&h, 1e-4, rho).unwrap();
        let plan = FramePlan::precoded(grid);
        let budget = LinkBudget::from_snr(rho, 0.1).unwrap();
        let q = Qam::new(4).unwrap();
        let idx: Vec<usize> = (0..plan.data_count()).map(|_| rng.random_range(0..4)).collect();
        let x = build_frame_precoded(&symbols_from_indices(&idx, &q), &plan, &budget, &sol).unwrap();
        let y = apply_channel(&x, &h, &budget, &mut rng).unwrap();
        let h_hat = estimate_h_a00(&y, &plan, &budget).unwrap();
        let dec = decide_symbols(&one_tap_equalize(&y, h_hat, &plan, &budget), &budget, &q);
        let errors = dec.iter().zip(&idx).filter(|(a, b)| a != b).count();
        assert!(errors < 20, "{errors} symbol errors");
    }
}
