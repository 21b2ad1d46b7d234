//! Flat `key=value` campaign configuration.
//!
//! Values are kept as given (dB keys stay in dB) so that the echo written
//! into every output file reproduces the run exactly; linear quantities are
//! derived through accessors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use zakotfs_core::{db_to_linear, GridParams, LinkBudget, PulseParams, Qam};

use crate::error::{AppError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Effchan,
    Precode,
    SerVsPdr,
    SerVsDoppler,
    Papr,
    SeVsDoppler,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::Effchan,
        Experiment::Precode,
        Experiment::SerVsPdr,
        Experiment::SerVsDoppler,
        Experiment::Papr,
        Experiment::SeVsDoppler,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Effchan => "effchan",
            Experiment::Precode => "precode",
            Experiment::SerVsPdr => "ser-vs-pdr",
            Experiment::SerVsDoppler => "ser-vs-doppler",
            Experiment::Papr => "papr",
            Experiment::SeVsDoppler => "se-vs-doppler",
        }
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment '{s}'"))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How pilot energy enters the link budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerMode {
    /// `E = 1`, `N0 = 1/ρ`; the pilot adds energy on top of the data.
    Additive,
    /// `N0 = 1`; pilot plus data energy per carrier equals `total_snr`.
    FixedTotal,
}

impl FromStr for PowerMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "additive" => Ok(PowerMode::Additive),
            "fixed_total" => Ok(PowerMode::FixedTotal),
            _ => Err(format!("unknown power mode '{s}' (additive | fixed_total)")),
        }
    }
}

impl fmt::Display for PowerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PowerMode::Additive => "additive",
            PowerMode::FixedTotal => "fixed_total",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    VehA,
    Identity,
}

impl FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "veh_a" => Ok(ChannelKind::VehA),
            "identity" => Ok(ChannelKind::Identity),
            _ => Err(format!("unknown channel '{s}' (veh_a | identity)")),
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::VehA => "veh_a",
            ChannelKind::Identity => "identity",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub experiment: Experiment,
    pub m: usize,
    pub n: usize,
    pub nu_p: f64,
    pub beta_tau: f64,
    pub beta_nu: f64,
    pub lobes: usize,
    pub q: usize,
    pub g: usize,
    pub eps_supp: f64,
    pub eps_det: f64,
    pub seed: u64,
    pub frames: usize,
    pub qam: usize,
    pub channel: ChannelKind,
    pub nu_max: f64,
    pub rho_db: f64,
    pub eta_db: f64,
    pub conv_eta_db: f64,
    pub power_mode: PowerMode,
    pub total_snr_db: f64,
    pub sweep_eta_db: Vec<f64>,
    pub sweep_nu_max: Vec<f64>,
}

/// Every recognised key, in echo order.
pub const KEYS: [&str; 23] = [
    "experiment",
    "M",
    "N",
    "nu_p",
    "beta_tau",
    "beta_nu",
    "lobes",
    "Q",
    "g",
    "eps_supp",
    "eps_det",
    "seed",
    "frames",
    "qam",
    "channel",
    "nu_max",
    "rho_db",
    "eta_db",
    "conv_eta_db",
    "power_mode",
    "total_snr_db",
    "sweep_eta_db",
    "sweep_nu_max",
];

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: Option<usize>,
}

/// Raw `key=value` pairs with their source line; later entries win.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            raw.insert(body, Some(i + 1))?;
        }
        Ok(raw)
    }

    /// Applies `key=value` overrides on top of the parsed file.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            self.insert(o.as_ref().trim(), None)?;
        }
        Ok(())
    }

    fn insert(&mut self, body: &str, line: Option<usize>) -> Result<()> {
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| AppError::config(line, format!("expected key=value, got '{body}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(AppError::config(line, format!("unknown key '{key}'")));
        }
        self.entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line,
            },
        );
        Ok(())
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse()
                .map(Some)
                .map_err(|err| AppError::config(e.line, format!("invalid value for {key}: '{}' ({err})", e.value))),
        }
    }

    fn get_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(e) = self.entries.get(key) else {
            return Ok(None);
        };
        e.value
            .split(',')
            .map(|v| {
                v.trim()
                    .parse()
                    .map_err(|_| AppError::config(e.line, format!("invalid number '{}' in {key}", v.trim())))
            })
            .collect::<Result<Vec<f64>>>()
            .map(Some)
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.entries.get(key).and_then(|e| e.line)
    }

    pub fn build(&self) -> Result<CampaignConfig> {
        let experiment: Experiment = self
            .get("experiment")?
            .ok_or_else(|| AppError::config(None, "missing required key 'experiment'"))?;
        let doppler_sweep = matches!(experiment, Experiment::SerVsDoppler | Experiment::SeVsDoppler);
        let cfg = CampaignConfig {
            experiment,
            m: self.get("M")?.unwrap_or(18),
            n: self.get("N")?.unwrap_or(18),
            nu_p: self.get("nu_p")?.unwrap_or(30_000.0),
            beta_tau: self.get("beta_tau")?.unwrap_or(0.2),
            beta_nu: self.get("beta_nu")?.unwrap_or(0.2),
            lobes: self.get("lobes")?.unwrap_or(10),
            q: self.get("Q")?.unwrap_or(16),
            g: self.get("g")?.unwrap_or(4),
            eps_supp: self.get("eps_supp")?.unwrap_or(1e-4),
            eps_det: self.get("eps_det")?.unwrap_or(1e-3),
            seed: self.get("seed")?.unwrap_or(0),
            frames: self
                .get("frames")?
                .unwrap_or(if experiment == Experiment::Papr { 1000 } else { 200 }),
            qam: self.get("qam")?.unwrap_or(4),
            channel: self.get("channel")?.unwrap_or(ChannelKind::VehA),
            nu_max: self.get("nu_max")?.unwrap_or(1000.0),
            rho_db: self.get("rho_db")?.unwrap_or(15.0),
            eta_db: self.get("eta_db")?.unwrap_or(-10.0),
            conv_eta_db: self.get("conv_eta_db")?.unwrap_or(0.0),
            power_mode: self.get("power_mode")?.unwrap_or(if doppler_sweep {
                PowerMode::FixedTotal
            } else {
                PowerMode::Additive
            }),
            total_snr_db: self
                .get("total_snr_db")?
                .unwrap_or(if experiment == Experiment::SeVsDoppler {
                    15.4
                } else {
                    20.0
                }),
            sweep_eta_db: self
                .get_list("sweep_eta_db")?
                .unwrap_or_else(|| (0..=20).map(|i| -20.0 + 2.0 * i as f64).collect()),
            sweep_nu_max: self
                .get_list("sweep_nu_max")?
                .unwrap_or_else(|| vec![0.0, 500.0, 1000.0, 2000.0, 5000.0]),
        };
        cfg.validate(self)?;
        Ok(cfg)
    }
}

/// Parses a configuration file; `experiment` must be present.
pub fn parse_config(text: &str) -> Result<CampaignConfig> {
    RawConfig::parse(text)?.build()
}

/// Parses a configuration file and applies command-line overrides.
pub fn load_config<S: AsRef<str>>(text: &str, overrides: &[S]) -> Result<CampaignConfig> {
    let mut raw = RawConfig::parse(text)?;
    raw.apply_overrides(overrides)?;
    raw.build()
}

impl CampaignConfig {
    /// Rebuilds a configuration from an echo line, with or without its
    /// leading `#`.
    pub fn from_echo(line: &str) -> Result<Self> {
        let tokens: Vec<&str> = line.trim_start_matches('#').split_whitespace().collect();
        load_config("", &tokens)
    }

    fn validate(&self, raw: &RawConfig) -> Result<()> {
        let bad = |key: &str, msg: String| Err(AppError::config(raw.line(key), format!("{key}: {msg}")));
        if let Err(e) = self.grid() {
            let key = if !self.m.is_multiple_of(2) || self.m < 2 {
                "M"
            } else if !self.n.is_multiple_of(2) || self.n < 2 {
                "N"
            } else {
                "nu_p"
            };
            return bad(key, e.to_string());
        }
        if let Err(e) = self.pulse() {
            return Err(AppError::config(None, e.to_string()));
        }
        if 2 * self.g + 1 >= self.m {
            return bad(
                "g",
                format!(
                    "guard strip of {} bins leaves no data with M={}",
                    2 * self.g + 1,
                    self.m
                ),
            );
        }
        if !(0.0..1.0).contains(&self.eps_supp) {
            return bad("eps_supp", "must lie in [0, 1)".into());
        }
        if !(0.0..1.0).contains(&self.eps_det) {
            return bad("eps_det", "must lie in [0, 1)".into());
        }
        if self.frames == 0 {
            return bad("frames", "must be at least 1".into());
        }
        if Qam::new(self.qam).is_err() {
            return bad("qam", "must be a square QAM order (4, 16, 64, ...)".into());
        }
        if !(self.nu_max >= 0.0 && self.nu_max.is_finite()) {
            return bad("nu_max", "must be finite and non-negative".into());
        }
        for (key, v) in [
            ("rho_db", self.rho_db),
            ("eta_db", self.eta_db),
            ("conv_eta_db", self.conv_eta_db),
            ("total_snr_db", self.total_snr_db),
        ] {
            if !v.is_finite() {
                return bad(key, "must be finite".into());
            }
        }
        for (key, list) in [
            ("sweep_eta_db", &self.sweep_eta_db),
            ("sweep_nu_max", &self.sweep_nu_max),
        ] {
            if list.is_empty() || list.iter().any(|v| !v.is_finite()) {
                return bad(key, "must be a non-empty list of finite numbers".into());
            }
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return bad(key, "values must be strictly increasing".into());
            }
        }
        if self.sweep_nu_max.iter().any(|&v| v < 0.0) {
            return bad("sweep_nu_max", "values must be non-negative".into());
        }
        Ok(())
    }

    pub fn grid(&self) -> zakotfs_core::Result<GridParams> {
        GridParams::new(self.m, self.n, self.nu_p)
    }

    pub fn pulse(&self) -> zakotfs_core::Result<PulseParams> {
        PulseParams::new(self.beta_tau, self.beta_nu, self.lobes, self.q)
    }

    pub fn rho(&self) -> f64 {
        db_to_linear(self.rho_db)
    }

    pub fn eta(&self) -> f64 {
        db_to_linear(self.eta_db)
    }

    pub fn conv_eta(&self) -> f64 {
        db_to_linear(self.conv_eta_db)
    }

    pub fn total_snr(&self) -> f64 {
        db_to_linear(self.total_snr_db)
    }

    /// Link budget for a frame with `n_data` data carriers at PDR `eta`.
    pub fn budget(&self, eta: f64, n_data: usize) -> zakotfs_core::Result<LinkBudget> {
        match self.power_mode {
            PowerMode::Additive => LinkBudget::from_snr(self.rho(), eta),
            PowerMode::FixedTotal => LinkBudget::fixed_total(self.total_snr(), eta, n_data, self.m * self.n),
        }
    }

    /// One-line `key=value` rendering of every setting, in [`KEYS`] order.
    pub fn echo(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let values: [String; 23] = [
            self.experiment.to_string(),
            self.m.to_string(),
            self.n.to_string(),
            self.nu_p.to_string(),
            self.beta_tau.to_string(),
            self.beta_nu.to_string(),
            self.lobes.to_string(),
            self.q.to_string(),
            self.g.to_string(),
            self.eps_supp.to_string(),
            self.eps_det.to_string(),
            self.seed.to_string(),
            self.frames.to_string(),
            self.qam.to_string(),
            self.channel.to_string(),
            self.nu_max.to_string(),
            self.rho_db.to_string(),
            self.eta_db.to_string(),
            self.conv_eta_db.to_string(),
            self.power_mode.to_string(),
            self.total_snr_db.to_string(),
            list(&self.sweep_eta_db),
            list(&self.sweep_nu_max),
        ];
        KEYS.iter()
            .zip(values)
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}
