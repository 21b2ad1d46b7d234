//! Command-line front end.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use zakotfs_core::{design_precoder, linear_to_db, localization_metric};

use crate::config::{load_config, CampaignConfig, Experiment};
use crate::error::{AppError, Context, Result};
use crate::{harness, output};

#[derive(Debug, Parser)]
#[command(name = "zakotfs", version, about = "Precoded Zak-OTFS link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Effective DD channel of one Veh-A draw as a |h[k,l]|^2 heatmap.
    Effchan(Invocation),
    /// Optimal prefilter for one channel draw: taps, SINR and heatmap.
    Precode(Invocation),
    /// SER against pilot-to-data ratio.
    SerVsPdr(Invocation),
    /// SER against maximum Doppler shift.
    SerVsDoppler(Invocation),
    /// PAPR CCDF of precoded and plain frames.
    Papr(Invocation),
    /// Uncoded spectral-efficiency proxy against maximum Doppler shift.
    SeVsDoppler(Invocation),
}

#[derive(Debug, Args)]
struct Invocation {
    /// Configuration file of key=value lines.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(short, long, default_value = ".")]
    out: PathBuf,
    /// key=value overrides applied after the file.
    overrides: Vec<String>,
}

impl Command {
    fn split(self) -> (Experiment, Invocation) {
        match self {
            Command::Effchan(i) => (Experiment::Effchan, i),
            Command::Precode(i) => (Experiment::Precode, i),
            Command::SerVsPdr(i) => (Experiment::SerVsPdr, i),
            Command::SerVsDoppler(i) => (Experiment::SerVsDoppler, i),
            Command::Papr(i) => (Experiment::Papr, i),
            Command::SeVsDoppler(i) => (Experiment::SeVsDoppler, i),
        }
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (experiment, inv) = cli.command.split();
    match execute(experiment, &inv) {
        Ok(files) => {
            for f in files {
                println!("wrote {}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("zakotfs: {e}");
            e.exit_code()
        }
    }
}

fn execute(experiment: Experiment, inv: &Invocation) -> Result<Vec<PathBuf>> {
    let text = match &inv.config {
        Some(p) => fs::read_to_string(p).map_err(|source| AppError::Io {
            path: p.display().to_string(),
            source,
        })?,
        None => String::new(),
    };
    let mut overrides = inv.overrides.clone();
    overrides.push(format!("experiment={experiment}"));
    let cfg = load_config(&text, &overrides)?;
    fs::create_dir_all(&inv.out).map_err(|source| AppError::Io {
        path: inv.out.display().to_string(),
        source,
    })?;
    dispatch(&cfg, &inv.out)
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<PathBuf> {
    let io_err = |source| AppError::Io {
        path: path.display().to_string(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    f(&mut w).and_then(|_| w.flush()).map_err(io_err)?;
    Ok(path.to_path_buf())
}

/// Runs the configured experiment and writes its CSV files into `out`.
pub fn dispatch(cfg: &CampaignConfig, out: &Path) -> Result<Vec<PathBuf>> {
    let file = |suffix: &str| out.join(format!("{}{suffix}.csv", cfg.experiment));
    match cfg.experiment {
        Experiment::Effchan => {
            let h = harness::sample_channel(cfg)?;
            Ok(vec![write_file(&file(""), |w| output::write_heatmap(w, cfg, &h))?])
        }
        Experiment::Precode => {
            let h = harness::sample_channel(cfg)?;
            let sol = design_precoder(&h, cfg.eps_supp, cfg.rho()).context(|| "precoder".into())?;
            let loc = localization_metric(&sol.h_a).context(|| "localization".into())?;
            println!(
                "gamma_db={} localization={loc} taps={}",
                linear_to_db(sol.gamma),
                sol.a.len()
            );
            Ok(vec![
                write_file(&file(""), |w| output::write_precode_summary(w, cfg, &sol, loc))?,
                write_file(&file("_taps"), |w| output::write_taps(w, cfg, &sol))?,
                write_file(&file("_heatmap"), |w| output::write_heatmap(w, cfg, &sol.h_a))?,
            ])
        }
        Experiment::SerVsPdr => {
            let res = harness::run_ser_vs_pdr(cfg)?;
            Ok(vec![write_file(&file(""), |w| output::write_campaign(w, cfg, &res))?])
        }
        Experiment::SerVsDoppler => {
            let res = harness::run_ser_vs_doppler(cfg)?;
            Ok(vec![write_file(&file(""), |w| output::write_campaign(w, cfg, &res))?])
        }
        Experiment::Papr => {
            let res = harness::run_papr(cfg)?;
            Ok(vec![write_file(&file(""), |w| output::write_papr(w, cfg, &res))?])
        }
        Experiment::SeVsDoppler => {
            let res = harness::run_se_vs_doppler(cfg)?;
            Ok(vec![
                write_file(&file(""), |w| output::write_campaign(w, cfg, &res.campaign))?,
                write_file(&file("_proxy"), |w| output::write_se(w, cfg, &res))?,
            ])
        }
    }
}
