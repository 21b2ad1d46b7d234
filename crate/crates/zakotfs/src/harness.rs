//! Seeded Monte-Carlo campaigns.
//!
//! Every frame is an independent task keyed by `(point, trial)`. Its RNG is
//! ChaCha8 seeded with the master seed, point index and trial index packed
//! into the 32-byte seed, so streams never collide. The channel of trial `t`
//! comes from a seed that omits the point index: all sweep points see the
//! same channel draws, while data and noise differ. Frames run in parallel
//! but are collected in key order and reduced sequentially, which makes
//! results bit-identical under any thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use zakotfs_core::channel::draw_veh_a;
use zakotfs_core::transceiver::{
    apply_channel, build_frame_conventional, build_frame_precoded, decide_symbols, estimate_channel_conventional,
    estimate_h_a00, joint_lmmse_equalize, one_tap_equalize, symbols_from_indices,
};
use zakotfs_core::{
    design_precoder, effective_channel_taps, embed_symbols, inverse_dzt, linear_to_db, localization_metric, papr_db,
    sinr, twisted_conv_fs, ChannelRealization, Complex64, DDFilter, FramePlan, GridParams, PulseParams, Qam,
};

use crate::config::{CampaignConfig, ChannelKind, Experiment};
use crate::error::{AppError, Context, Result};

/// Receiver variant reported in campaign output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Precoded frame, one-tap equalizer on the estimated `h_a[0,0]`.
    Precoded,
    /// Same received frames, one-tap equalizer on the true `h_a[0,0]`.
    PrecodedPerfect,
    /// Pilot-plus-guard frame, read-off estimate and joint LMMSE.
    Conventional,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Precoded => "precoded",
            Mode::PrecodedPerfect => "precoded_perfect",
            Mode::Conventional => "conventional",
        }
    }
}

/// Aggregate over all frames of one sweep point and mode.
#[derive(Debug, Clone, PartialEq)]
pub struct PointResult {
    pub sweep_value: f64,
    pub mode: Mode,
    pub frames: usize,
    pub err_count: u64,
    pub sym_count: u64,
    pub ser: f64,
    /// Half-width of the 95% Wald interval on `ser`.
    pub ci_half: f64,
    /// Mean over frames of the design SINR in dB (precoded modes) or of the
    /// one-tap SINR of the unprecoded channel (conventional).
    pub mean_gamma_db: f64,
    pub mean_localization: f64,
    /// Mean over frames of the measured data-carrier SINR in dB; precoded
    /// modes only.
    pub mean_empirical_sinr_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub points: Vec<PointResult>,
}

impl CampaignResult {
    pub fn get(&self, sweep_value: f64, mode: Mode) -> Option<&PointResult> {
        self.points
            .iter()
            .find(|p| p.mode == mode && p.sweep_value == sweep_value)
    }

    /// Points of one mode in sweep order.
    pub fn curve(&self, mode: Mode) -> Vec<&PointResult> {
        self.points.iter().filter(|p| p.mode == mode).collect()
    }
}

/// Per-frame PAPR samples for both waveforms.
#[derive(Debug, Clone, PartialEq)]
pub struct PaprResult {
    pub precoded: Vec<f64>,
    pub plain: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeRow {
    pub nu_max: f64,
    pub se_precoded: f64,
    pub se_conventional: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeResult {
    pub campaign: CampaignResult,
    pub rows: Vec<SeRow>,
}

/// Operating point of one sweep entry.
#[derive(Debug, Clone, Copy)]
struct SweepPoint {
    sweep_value: f64,
    nu_max: f64,
    eta_precoded: f64,
    eta_conventional: f64,
}

#[derive(Debug, Clone, Copy)]
struct FrameOutcome {
    errors: u64,
    symbols: u64,
    gamma_db: f64,
    localization: f64,
    empirical_sinr_db: Option<f64>,
}

/// Seed of trial `trial` at sweep point `point`.
pub fn trial_seed(master: u64, point: usize, trial: usize) -> [u8; 32] {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master.to_le_bytes());
    seed[8..16].copy_from_slice(&(point as u64).to_le_bytes());
    seed[16..24].copy_from_slice(&(trial as u64).to_le_bytes());
    seed
}

/// Seed of the channel draw of trial `trial`, shared by all sweep points.
pub fn channel_seed(master: u64, trial: usize) -> [u8; 32] {
    trial_seed(master, usize::MAX, trial)
}

const STREAM_CHANNEL: u64 = 0;
const STREAM_PRECODED: u64 = 1;
const STREAM_CONVENTIONAL: u64 = 2;

fn stream(seed: [u8; 32], id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(id);
    rng
}

/// 95% normal-approximation half-width for a proportion.
pub fn wald_half_width(errors: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let p = errors as f64 / trials as f64;
    1.96 * (p * (1.0 - p) / trials as f64).sqrt()
}

struct Setup {
    grid: GridParams,
    pulse: PulseParams,
    qam: Qam,
}

impl Setup {
    fn new(cfg: &CampaignConfig) -> Result<Self> {
        let grid = cfg.grid().context(|| "grid".into())?;
        let pulse = cfg.pulse().context(|| "pulse".into())?;
        let qam = Qam::new(cfg.qam).context(|| "constellation".into())?;
        Ok(Setup { grid, pulse, qam })
    }
}

/// Draws the channel of one trial and returns it with its effective filter.
fn trial_channel(
    cfg: &CampaignConfig,
    setup: &Setup,
    nu_max: f64,
    trial: usize,
) -> Result<(ChannelRealization, DDFilter)> {
    let seed = channel_seed(cfg.seed, trial);
    let chan = match cfg.channel {
        ChannelKind::VehA => draw_veh_a(nu_max, &mut stream(seed, STREAM_CHANNEL)).context(|| "channel draw".into())?,
        ChannelKind::Identity => ChannelRealization::identity(),
    };
    let h = effective_channel_taps(&chan, &setup.grid, &setup.pulse).context(|| "effective channel".into())?;
    Ok((chan, h))
}

/// Effective channel of the first trial of point 0, as used by `effchan`.
pub fn sample_channel(cfg: &CampaignConfig) -> Result<DDFilter> {
    let setup = Setup::new(cfg)?;
    Ok(trial_channel(cfg, &setup, cfg.nu_max, 0)?.1)
}

fn random_indices(rng: &mut ChaCha8Rng, qam: &Qam, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..qam.order())).collect()
}

fn count_errors(sent: &[usize], decided: &[usize]) -> u64 {
    sent.iter().zip(decided).filter(|(a, b)| a != b).count() as u64
}

fn run_precoded(
    cfg: &CampaignConfig,
    setup: &Setup,
    pt: &SweepPoint,
    h: &DDFilter,
    seed: [u8; 32],
    modes: &[Mode],
) -> zakotfs_core::Result<Vec<(Mode, FrameOutcome)>> {
    let mut rng = stream(seed, STREAM_PRECODED);
    let plan = FramePlan::precoded(setup.grid);
    let budget = cfg.budget(pt.eta_precoded, plan.data_count())?;
    let sol = design_precoder(h, cfg.eps_supp, budget.rho())?;
    let sent = random_indices(&mut rng, &setup.qam, plan.data_count());
    let data = symbols_from_indices(&sent, &setup.qam);
    let x = build_frame_precoded(&data, &plan, &budget, &sol)?;
    let y = apply_channel(&x, h, &budget, &mut rng)?;

    let true_h00 = h.twisted_tap(&sol.prefilter(), 0, 0);
    let amp = budget.e.sqrt();
    let impairment = plan
        .data_positions()
        .iter()
        .zip(&data)
        .map(|(&(k, l), &d)| (y.at(k, l) - true_h00 * d * amp).norm_sqr())
        .sum::<f64>()
        / plan.data_count() as f64;
    let empirical = linear_to_db(true_h00.norm_sqr() * budget.e / impairment);
    let gamma_db = linear_to_db(sol.gamma);
    let localization = localization_metric(&sol.h_a)?;

    let mut out = Vec::new();
    for &mode in modes {
        let h_hat = match mode {
            Mode::Precoded => estimate_h_a00(&y, &plan, &budget)?,
            Mode::PrecodedPerfect => true_h00,
            Mode::Conventional => continue,
        };
        let decided = decide_symbols(&one_tap_equalize(&y, h_hat, &plan, &budget), &budget, &setup.qam);
        out.push((
            mode,
            FrameOutcome {
                errors: count_errors(&sent, &decided),
                symbols: sent.len() as u64,
                gamma_db,
                localization,
                empirical_sinr_db: Some(empirical),
            },
        ));
    }
    Ok(out)
}

fn run_conventional(
    cfg: &CampaignConfig,
    setup: &Setup,
    pt: &SweepPoint,
    h: &DDFilter,
    seed: [u8; 32],
) -> zakotfs_core::Result<FrameOutcome> {
    let mut rng = stream(seed, STREAM_CONVENTIONAL);
    let plan = FramePlan::conventional(setup.grid, cfg.g)?;
    let budget = cfg.budget(pt.eta_conventional, plan.data_count())?;
    let sent = random_indices(&mut rng, &setup.qam, plan.data_count());
    let data = symbols_from_indices(&sent, &setup.qam);
    let x = build_frame_conventional(&data, &plan, &budget)?;
    let y = apply_channel(&x, h, &budget, &mut rng)?;
    let read = plan.default_read_support()?;
    let h_hat = estimate_channel_conventional(&y, &plan, &budget, &read, cfg.eps_det)?;
    let estimates = joint_lmmse_equalize(&y, &h_hat, &plan, &budget)?;
    let decided = decide_symbols(&estimates, &budget, &setup.qam);
    Ok(FrameOutcome {
        errors: count_errors(&sent, &decided),
        symbols: sent.len() as u64,
        gamma_db: linear_to_db(sinr(h, budget.rho())),
        localization: localization_metric(h)?,
        empirical_sinr_db: None,
    })
}

fn run_trial(
    cfg: &CampaignConfig,
    setup: &Setup,
    pt: &SweepPoint,
    modes: &[Mode],
    trial: usize,
    seed: [u8; 32],
) -> Result<Vec<(Mode, FrameOutcome)>> {
    let (_, h) = trial_channel(cfg, setup, pt.nu_max, trial)?;
    let mut out = Vec::with_capacity(modes.len());
    if modes
        .iter()
        .any(|m| matches!(m, Mode::Precoded | Mode::PrecodedPerfect))
    {
        out.extend(run_precoded(cfg, setup, pt, &h, seed, modes).context(|| "precoded frame".into())?);
    }
    if modes.contains(&Mode::Conventional) {
        let o = run_conventional(cfg, setup, pt, &h, seed).context(|| "conventional frame".into())?;
        out.push((Mode::Conventional, o));
    }
    Ok(out)
}

fn run_points(cfg: &CampaignConfig, sweep: &[SweepPoint], modes: &[Mode]) -> Result<CampaignResult> {
    let setup = Setup::new(cfg)?;
    let jobs: Vec<(usize, usize)> = (0..sweep.len())
        .flat_map(|p| (0..cfg.frames).map(move |t| (p, t)))
        .collect();
    let outcomes: Vec<Result<Vec<(Mode, FrameOutcome)>>> = jobs
        .par_iter()
        .map(|&(p, t)| {
            run_trial(cfg, &setup, &sweep[p], modes, t, trial_seed(cfg.seed, p, t)).map_err(|e| match e {
                AppError::Numeric { context, source } => AppError::numeric(
                    format!("point {p} ({}), frame {t}: {context}", sweep[p].sweep_value),
                    source,
                ),
                other => other,
            })
        })
        .collect();

    let mut points = Vec::new();
    let mut outcomes = outcomes.into_iter();
    for pt in sweep {
        let mut per_mode: Vec<Vec<FrameOutcome>> = vec![Vec::with_capacity(cfg.frames); modes.len()];
        for _ in 0..cfg.frames {
            for (mode, o) in outcomes.next().expect("one outcome per job")? {
                let slot = modes.iter().position(|&m| m == mode).expect("mode was requested");
                per_mode[slot].push(o);
            }
        }
        for (&mode, frames) in modes.iter().zip(&per_mode) {
            points.push(aggregate(pt.sweep_value, mode, frames));
        }
    }
    Ok(CampaignResult { points })
}

fn aggregate(sweep_value: f64, mode: Mode, frames: &[FrameOutcome]) -> PointResult {
    let err_count: u64 = frames.iter().map(|f| f.errors).sum();
    let sym_count: u64 = frames.iter().map(|f| f.symbols).sum();
    let n = frames.len() as f64;
    let empirical: Vec<f64> = frames.iter().filter_map(|f| f.empirical_sinr_db).collect();
    PointResult {
        sweep_value,
        mode,
        frames: frames.len(),
        err_count,
        sym_count,
        ser: err_count as f64 / sym_count as f64,
        ci_half: wald_half_width(err_count, sym_count),
        mean_gamma_db: frames.iter().map(|f| f.gamma_db).sum::<f64>() / n,
        mean_localization: frames.iter().map(|f| f.localization).sum::<f64>() / n,
        mean_empirical_sinr_db: (!empirical.is_empty()).then(|| empirical.iter().sum::<f64>() / empirical.len() as f64),
    }
}

fn check_kind(cfg: &CampaignConfig, expected: Experiment) -> Result<()> {
    if cfg.experiment != expected {
        return Err(AppError::config(
            None,
            format!("experiment is '{}', expected '{expected}'", cfg.experiment),
        ));
    }
    Ok(())
}

fn pdr_points(cfg: &CampaignConfig) -> Vec<SweepPoint> {
    cfg.sweep_eta_db
        .iter()
        .map(|&eta_db| {
            let eta = zakotfs_core::db_to_linear(eta_db);
            SweepPoint {
                sweep_value: eta_db,
                nu_max: cfg.nu_max,
                eta_precoded: eta,
                eta_conventional: eta,
            }
        })
        .collect()
}

fn doppler_points(cfg: &CampaignConfig) -> Vec<SweepPoint> {
    cfg.sweep_nu_max
        .iter()
        .map(|&nu_max| SweepPoint {
            sweep_value: nu_max,
            nu_max,
            eta_precoded: cfg.eta(),
            eta_conventional: cfg.conv_eta(),
        })
        .collect()
}

/// SER against pilot-to-data ratio; sweep values are `sweep_eta_db`.
pub fn run_ser_vs_pdr(cfg: &CampaignConfig) -> Result<CampaignResult> {
    check_kind(cfg, Experiment::SerVsPdr)?;
    run_pdr_modes(cfg, &[Mode::Precoded, Mode::Conventional])
}

/// [`run_ser_vs_pdr`] restricted to the given receiver modes.
pub fn run_pdr_modes(cfg: &CampaignConfig, modes: &[Mode]) -> Result<CampaignResult> {
    run_points(cfg, &pdr_points(cfg), modes)
}

/// SER against maximum Doppler; sweep values are `sweep_nu_max` in Hz.
pub fn run_ser_vs_doppler(cfg: &CampaignConfig) -> Result<CampaignResult> {
    check_kind(cfg, Experiment::SerVsDoppler)?;
    run_doppler_modes(cfg, &[Mode::Precoded, Mode::PrecodedPerfect, Mode::Conventional])
}

/// [`run_ser_vs_doppler`] restricted to the given receiver modes.
pub fn run_doppler_modes(cfg: &CampaignConfig, modes: &[Mode]) -> Result<CampaignResult> {
    run_points(cfg, &doppler_points(cfg), modes)
}

/// Uncoded spectral-efficiency proxy in bits/s/Hz:
/// `(1 - SER) N_d log2(Q) / (B T (1 + β_ν)(1 + β_τ))`.
pub fn se_proxy(ser: f64, n_data: usize, qam: &Qam, grid: &GridParams, pulse: &PulseParams) -> f64 {
    (1.0 - ser) * n_data as f64 * qam.bits_per_symbol() as f64
        / (grid.b * grid.t * (1.0 + pulse.beta_nu) * (1.0 + pulse.beta_tau))
}

/// Spectral-efficiency proxy against maximum Doppler, precoded versus
/// conventional.
pub fn run_se_vs_doppler(cfg: &CampaignConfig) -> Result<SeResult> {
    check_kind(cfg, Experiment::SeVsDoppler)?;
    let setup = Setup::new(cfg)?;
    let campaign = run_doppler_modes(cfg, &[Mode::Precoded, Mode::Conventional])?;
    let nd_p = FramePlan::precoded(setup.grid).data_count();
    let nd_c = FramePlan::conventional(setup.grid, cfg.g)
        .context(|| "frame plan".into())?
        .data_count();
    let rows = cfg
        .sweep_nu_max
        .iter()
        .map(|&nu| {
            let ser = |m| campaign.get(nu, m).expect("point was run").ser;
            let se_precoded = se_proxy(ser(Mode::Precoded), nd_p, &setup.qam, &setup.grid, &setup.pulse);
            let se_conventional = se_proxy(ser(Mode::Conventional), nd_c, &setup.qam, &setup.grid, &setup.pulse);
            SeRow {
                nu_max: nu,
                se_precoded,
                se_conventional,
                ratio: se_precoded / se_conventional,
            }
        })
        .collect();
    Ok(SeResult { campaign, rows })
}

/// PAPR of data-only frames with and without the optimal prefilter.
pub fn run_papr(cfg: &CampaignConfig) -> Result<PaprResult> {
    check_kind(cfg, Experiment::Papr)?;
    let setup = Setup::new(cfg)?;
    let pairs: Vec<Result<(f64, f64)>> = (0..cfg.frames)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(cfg.seed, 0, t);
            let (_, h) = trial_channel(cfg, &setup, cfg.nu_max, t)?;
            papr_pair(cfg, &setup, &h, seed).context(|| format!("frame {t}: papr"))
        })
        .collect();
    let mut result = PaprResult {
        precoded: Vec::with_capacity(cfg.frames),
        plain: Vec::with_capacity(cfg.frames),
    };
    for pair in pairs {
        let (p, q) = pair?;
        result.precoded.push(p);
        result.plain.push(q);
    }
    Ok(result)
}

fn papr_pair(cfg: &CampaignConfig, setup: &Setup, h: &DDFilter, seed: [u8; 32]) -> zakotfs_core::Result<(f64, f64)> {
    let mut rng = stream(seed, STREAM_PRECODED);
    let sol = design_precoder(h, cfg.eps_supp, cfg.rho())?;
    let indices = random_indices(&mut rng, &setup.qam, setup.grid.mn());
    let data: Vec<Complex64> = symbols_from_indices(&indices, &setup.qam);
    let s = embed_symbols(&data, setup.grid)?;
    let precoded = twisted_conv_fs(&sol.prefilter(), &s)?;
    Ok((papr_db(&inverse_dzt(&precoded))?, papr_db(&inverse_dzt(&s))?))
}

/// Empirical CCDF `P(X > x)` at each sorted sample `x`.
pub fn ccdf(samples: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, (n - 1.0 - i as f64) / n))
        .collect()
}

/// Smallest sample whose CCDF is at most `p`.
pub fn ccdf_level(samples: &[f64], p: f64) -> f64 {
    ccdf(samples)
        .into_iter()
        .find(|&(_, c)| c <= p)
        .map_or(f64::NAN, |(x, _)| x)
}
