use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zakotfs_core::{
    draw_veh_a, effective_channel_taps, extract_support, rrc_value, ChannelRealization, Complex64, Error, GridParams,
    Path, PulseParams,
};

fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

/// Trapezoid nodes `(x, w)` on `[-lobes, lobes]` with step `1/q`.
fn nodes(lobes: usize, q: usize) -> Vec<(f64, f64)> {
    let half = (lobes * q) as i64;
    let step = 1.0 / q as f64;
    (-half..=half)
        .map(|m| (m as f64 * step, if m.abs() == half { step / 2.0 } else { step }))
        .collect()
}

/// Truncated RRC factor normalized to unit energy under the same trapezoid rule.
struct Factor {
    beta: f64,
    lobes: f64,
    scale: f64,
}

impl Factor {
    fn new(beta: f64, lobes: usize, q: usize) -> Self {
        let e: f64 = nodes(lobes, q)
            .iter()
            .map(|&(x, w)| w * rrc_value(beta, x).powi(2))
            .sum();
        Factor {
            beta,
            lobes: lobes as f64,
            scale: 1.0 / e.sqrt(),
        }
    }

    fn eval(&self, x: f64) -> f64 {
        if x.abs() > self.lobes * (1.0 + 1e-12) {
            0.0
        } else {
            self.scale * rrc_value(self.beta, x)
        }
    }
}

/// Brute-force `w_rx *σ (h_phy *σ w_tx)` sampled at `(k, l)`, in bin units
/// (delay in `1/B`, Doppler in `1/T`, twist phase `e^{j2π ν τ}` becomes
/// `e^{j2π y x / MN}`). Each twisted convolution is written out with its own
/// phase; nothing is factorized.
fn oracle_tap(chan: &ChannelRealization, grid: &GridParams, pulse: &PulseParams, k: i64, l: i64) -> Complex64 {
    let mn = grid.mn() as f64;
    let ft = Factor::new(pulse.beta_tau, pulse.truncation_lobes, pulse.quad_oversampling);
    let fv = Factor::new(pulse.beta_nu, pulse.truncation_lobes, pulse.quad_oversampling);
    let w_tx = |x: f64, y: f64| ft.eval(x) * fv.eval(y);
    // w_rx(x, y) = conj(w_tx(-x, -y)) e^{j2π x y / MN}
    let w_rx = |x: f64, y: f64| cis(x * y / mn) * w_tx(-x, -y);
    // g = h_phy *σ w_tx: (a *σ b)(x, y) = ∫∫ a(x', y') b(x - x', y - y') e^{j2π y'(x - x')/MN}
    let g = |x: f64, y: f64| -> Complex64 {
        chan.paths
            .iter()
            .map(|p| {
                let (xi, yi) = (p.delay * grid.b, p.doppler * grid.t);
                p.gain * w_tx(x - xi, y - yi) * cis(yi * (x - xi) / mn)
            })
            .sum()
    };
    let ns = nodes(pulse.truncation_lobes, pulse.quad_oversampling);
    let (kf, lf) = (k as f64, l as f64);
    let mut acc = Complex64::new(0.0, 0.0);
    for &(xp, wx) in &ns {
        for &(yp, wy) in &ns {
            acc += wx * wy * w_rx(xp, yp) * g(kf - xp, lf - yp) * cis(yp * (kf - xp) / mn);
        }
    }
    acc
}

fn random_channel(grid: &GridParams, paths: usize, rng: &mut ChaCha8Rng) -> ChannelRealization {
    let max_delay = grid.m as f64 / 4.0 / grid.b;
    let max_doppler = grid.n as f64 / 4.0 / grid.t;
    let paths: Vec<Path> = (0..paths)
        .map(|_| Path {
            gain: Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            delay: rng.random_range(0.0..max_delay),
            doppler: rng.random_range(-max_doppler..max_doppler),
        })
        .collect();
    ChannelRealization::new(paths, max_doppler).unwrap()
}

#[test]
fn factorized_taps_match_brute_force_quadrature() {
    let grid = GridParams::new(8, 8, 1000.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for pulse in [
        PulseParams::new(0.2, 0.2, 4, 8).unwrap(),
        PulseParams::new(0.5, 0.1, 5, 8).unwrap(),
    ] {
        let chan = random_channel(&grid, 3, &mut rng);
        let h = effective_channel_taps(&chan, &grid, &pulse).unwrap();
        let peak = h.iter().map(|(_, _, v)| v.norm()).fold(0.0, f64::max);
        let mut worst = 0.0f64;
        for (k, l, v) in h.iter() {
            worst = worst.max((v - oracle_tap(&chan, &grid, &pulse, k, l)).norm() / peak);
        }
        assert!(worst < 1e-8, "max relative deviation {worst:e}");
    }
}

#[test]
fn sinc_pair_samples_to_a_delta() {
    // The sinc autocorrelation vanishes at nonzero integers; the truncated
    // quadrature approaches it as O(1/lobes), so lobes must be large.
    let grid = GridParams::new(4, 4, 1000.0).unwrap();
    let pulse = PulseParams::new(0.0, 0.0, 200_000, 8).unwrap();
    let h = effective_channel_taps(&ChannelRealization::identity(), &grid, &pulse).unwrap();
    for (k, l, v) in h.iter() {
        let expected = if (k, l) == (0, 0) { 1.0 } else { 0.0 };
        assert!((v - Complex64::new(expected, 0.0)).norm() < 1e-6, "tap ({k},{l}) = {v}");
    }
}

#[test]
fn unit_path_origin_tap_is_one_for_any_rolloff() {
    let grid = GridParams::default();
    for (bt, bn) in [(0.0, 0.0), (0.2, 0.2), (0.5, 0.3), (0.9, 0.9)] {
        let pulse = PulseParams::new(bt, bn, 10, 16).unwrap();
        let h = effective_channel_taps(&ChannelRealization::identity(), &grid, &pulse).unwrap();
        assert!((h.get(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-6);
    }
}

#[test]
fn discrete_pulse_energy_is_one() {
    // The raw sinc tail decays too slowly for this at 10 lobes; beta 0 relies on renormalization.
    for beta in [0.2, 0.6] {
        for q in [8, 16] {
            let e: f64 = nodes(10, q).iter().map(|&(x, w)| w * rrc_value(beta, x).powi(2)).sum();
            assert!((e - 1.0).abs() < 1e-4, "beta {beta} q {q}: {e}");
        }
    }
}

#[test]
fn taps_are_linear_in_gains() {
    let grid = GridParams::new(8, 8, 1000.0).unwrap();
    let pulse = PulseParams::new(0.2, 0.2, 6, 8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let chan = random_channel(&grid, 4, &mut rng);
    let c = Complex64::new(-0.7, 1.3);
    let mut scaled = chan.clone();
    for p in &mut scaled.paths {
        p.gain *= c;
    }
    let h = effective_channel_taps(&chan, &grid, &pulse).unwrap();
    let hs = effective_channel_taps(&scaled, &grid, &pulse).unwrap();
    for (k, l, v) in h.iter() {
        assert!((hs.get(k, l) - c * v).norm() < 1e-12);
    }
}

#[test]
fn non_crystalline_channel_is_rejected() {
    let grid = GridParams::new(8, 8, 1000.0).unwrap();
    let far = Path {
        gain: Complex64::new(1.0, 0.0),
        delay: 3.0 / grid.b,
        doppler: 0.0,
    };
    let chan = ChannelRealization::new(vec![far], 0.0).unwrap();
    assert!(matches!(
        effective_channel_taps(&chan, &grid, &PulseParams::default()),
        Err(Error::NotCrystalline(_))
    ));
}

#[test]
fn veh_a_ensemble_power_is_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let draws = 100_000;
    let mean: f64 = (0..draws)
        .map(|_| draw_veh_a(1000.0, &mut rng).unwrap().total_power())
        .sum::<f64>()
        / draws as f64;
    assert!((mean - 1.0).abs() < 0.01, "mean power {mean}");
}

#[test]
fn veh_a_support_width() {
    let grid = GridParams::default();
    let pulse = PulseParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut widths = Vec::new();
    for _ in 0..20 {
        let chan = draw_veh_a(1000.0, &mut rng).unwrap();
        let h = effective_channel_taps(&chan, &grid, &pulse).unwrap();
        let s = extract_support(&h, 1e-4).unwrap();
        s.validate(&grid).unwrap();
        assert!(s.k_min <= 0 && s.k_max >= 0);
        widths.push((s.k_max - s.k_min + 1, s.l_max));
    }
    widths.sort();
    let (dk, dl) = widths[widths.len() / 2];
    println!("median support at eps 1e-4: {dk} delay taps, l_max {dl}");
    // Pulse tails at beta 0.2 keep more than 1e-4 of the energy outside an 8-tap strip.
    assert!((8..=14).contains(&dk), "median delay taps {dk}");
}
