//! CSV writers. Every file opens with a `#` line echoing the full config.

use std::io::{self, Write};

use zakotfs_core::{DDFilter, PrecoderSolution};

use crate::config::CampaignConfig;
use crate::harness::{ccdf, CampaignResult, PaprResult, SeResult};

fn header<W: Write>(w: &mut W, cfg: &CampaignConfig) -> io::Result<()> {
    writeln!(w, "# {}", cfg.echo())
}

pub fn write_campaign<W: Write>(w: &mut W, cfg: &CampaignConfig, res: &CampaignResult) -> io::Result<()> {
    header(w, cfg)?;
    writeln!(
        w,
        "sweep_value,mode,ser,err_count,sym_count,ci_half,mean_gamma_db,mean_localization"
    )?;
    for p in &res.points {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            p.sweep_value,
            p.mode.label(),
            p.ser,
            p.err_count,
            p.sym_count,
            p.ci_half,
            p.mean_gamma_db,
            p.mean_localization
        )?;
    }
    Ok(())
}

pub fn write_papr<W: Write>(w: &mut W, cfg: &CampaignConfig, res: &PaprResult) -> io::Result<()> {
    header(w, cfg)?;
    writeln!(w, "papr_db,ccdf,mode")?;
    for (mode, samples) in [("precoded", &res.precoded), ("plain", &res.plain)] {
        for (x, c) in ccdf(samples) {
            writeln!(w, "{x},{c},{mode}")?;
        }
    }
    Ok(())
}

pub fn write_se<W: Write>(w: &mut W, cfg: &CampaignConfig, res: &SeResult) -> io::Result<()> {
    header(w, cfg)?;
    writeln!(
        w,
        "# uncoded spectral-efficiency proxy (1-SER) N_d log2(Q) / (B T (1+beta_nu)(1+beta_tau)); not LDPC-coded"
    )?;
    writeln!(w, "sweep_value,se_precoded,se_conventional,ratio")?;
    for r in &res.rows {
        writeln!(w, "{},{},{},{}", r.nu_max, r.se_precoded, r.se_conventional, r.ratio)?;
    }
    Ok(())
}

/// `|f[k,l]|^2` over the filter support, delay-major.
pub fn write_heatmap<W: Write>(w: &mut W, cfg: &CampaignConfig, f: &DDFilter) -> io::Result<()> {
    header(w, cfg)?;
    writeln!(w, "k,l,mag2")?;
    for (k, l, v) in f.iter() {
        writeln!(w, "{k},{l},{}", v.norm_sqr())?;
    }
    Ok(())
}

/// Prefilter taps `a[k,l]`.
pub fn write_taps<W: Write>(w: &mut W, cfg: &CampaignConfig, sol: &PrecoderSolution) -> io::Result<()> {
    header(w, cfg)?;
    writeln!(w, "k,l,re,im")?;
    for (k, l, v) in sol.prefilter().iter() {
        writeln!(w, "{k},{l},{},{}", v.re, v.im)?;
    }
    Ok(())
}

pub fn write_precode_summary<W: Write>(
    w: &mut W,
    cfg: &CampaignConfig,
    sol: &PrecoderSolution,
    localization: f64,
) -> io::Result<()> {
    header(w, cfg)?;
    let s = sol.layout.channel_support();
    writeln!(w, "gamma_db,localization,lambda,taps,k_min,k_max,l_max")?;
    writeln!(
        w,
        "{},{},{},{},{},{},{}",
        zakotfs_core::linear_to_db(sol.gamma),
        localization,
        sol.lambda,
        sol.a.len(),
        s.k_min,
        s.k_max,
        s.l_max
    )
}
