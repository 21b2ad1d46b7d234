use std::fs;
use std::path::Path;

use zakotfs::cli::{dispatch, run};
use zakotfs::CampaignConfig;

fn zakotfs(args: &[&str]) -> i32 {
    run(std::iter::once("zakotfs").chain(args.iter().copied()))
}

/// Non-comment lines of a CSV file, header included.
fn rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn effchan_writes_the_full_window() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(zakotfs(&["effchan", "-o", out]), 0);
    let lines = rows(&dir.path().join("effchan.csv"));
    assert_eq!(lines[0], "k,l,mag2");
    assert_eq!(lines.len() - 1, 18 * 18);
}

#[test]
fn precode_on_identity_channel_reaches_rho() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(zakotfs(&["precode", "-o", out, "channel=identity", "rho_db=12.5"]), 0);
    let lines = rows(&dir.path().join("precode.csv"));
    assert_eq!(lines[0], "gamma_db,localization,lambda,taps,k_min,k_max,l_max");
    let fields: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert!((fields[0] - 12.5).abs() < 1e-9, "gamma_db {}", fields[0]);
    assert!((fields[1] - 1.0).abs() < 1e-12);
    assert!(dir.path().join("precode_taps.csv").exists());
    assert_eq!(rows(&dir.path().join("precode_heatmap.csv")).len() - 1, 18 * 18);
}

#[test]
fn ser_vs_pdr_has_one_row_per_point_and_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(zakotfs(&["ser-vs-pdr", "-o", out, "frames=2", "sweep_eta_db=-10,0"]), 0);
    let lines = rows(&dir.path().join("ser-vs-pdr.csv"));
    assert_eq!(
        lines[0],
        "sweep_value,mode,ser,err_count,sym_count,ci_half,mean_gamma_db,mean_localization"
    );
    assert_eq!(lines.len() - 1, 4);
}

#[test]
fn outputs_regenerate_from_their_echo() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    fs::write(&cfg_path, "# small campaign\nframes=3\nsweep_eta_db=-12,-4\nseed=17\n").unwrap();
    let first = dir.path().join("first");
    assert_eq!(
        zakotfs(&[
            "ser-vs-pdr",
            "-c",
            cfg_path.to_str().unwrap(),
            "-o",
            first.to_str().unwrap()
        ]),
        0
    );
    let original = fs::read_to_string(first.join("ser-vs-pdr.csv")).unwrap();
    let echo = original.lines().next().unwrap();
    let cfg = CampaignConfig::from_echo(echo).unwrap();
    let second = dir.path().join("second");
    fs::create_dir_all(&second).unwrap();
    dispatch(&cfg, &second).unwrap();
    assert_eq!(fs::read(second.join("ser-vs-pdr.csv")).unwrap(), original.as_bytes());
}

#[test]
fn se_output_is_labelled_as_a_proxy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(
        zakotfs(&["se-vs-doppler", "-o", out, "frames=1", "sweep_nu_max=0,500"]),
        0
    );
    let text = fs::read_to_string(dir.path().join("se-vs-doppler_proxy.csv")).unwrap();
    assert!(text.lines().nth(1).unwrap().contains("not LDPC-coded"));
    assert_eq!(rows(&dir.path().join("se-vs-doppler_proxy.csv")).len() - 1, 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(zakotfs(&["--help"]), 0);
    assert_eq!(zakotfs(&[]), 2);
    assert_eq!(zakotfs(&["frobnicate"]), 2);
    assert_eq!(zakotfs(&["effchan", "-o", out, "M=17"]), 2);
    assert_eq!(zakotfs(&["effchan", "-o", out, "colour=blue"]), 2);
    // A 100 kHz Doppler leaves the crystalline regime of the default grid.
    assert_eq!(zakotfs(&["effchan", "-o", out, "nu_max=100000"]), 3);
    assert_eq!(zakotfs(&["effchan", "-c", "/nonexistent/zakotfs.cfg", "-o", out]), 3);
}
