//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration error, 3 integration failure,
//! 4 no half-efficiency crossing, 5 partial sweep failure, 1 other I/O
//! failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::metrics::{
    self, bandwidth, efficiency_curve, optimal_detection, plateau_estimate, report_probability,
    EfficiencyCurve,
};
use crate::output::{trajectory_checks, write_with_manifest, Check, RunManifest, Table};
use crate::presets;
use crate::sweep::{self, SweepAxis, SweepParam, SweepResult};
use crate::units::{
    angular_si_to_internal, internal_rate_to_seconds, validate, Frame, RateOrigin, RawConfig,
    SimParams, HBAR,
};
use crate::wkb::{JunctionDerived, RateMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_INTEGRATION: i32 = 3;
pub const EXIT_BANDWIDTH: i32 = 4;
pub const EXIT_PARTIAL_SWEEP: i32 = 5;

/// Default ω_eg/2π (GHz) for `rates --bias-x` when no frequency is given.
const DEFAULT_OMEGA_EG_GHZ: f64 = 4.8;

#[derive(Debug, Parser)]
#[command(
    name = "jjphotond",
    version,
    about = "Josephson junction photon detector simulator"
)]
pub struct Cli {
    /// JSON config document; the built-in baseline is used when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Escape-rate mode for bias-derived rates.
    #[arg(long, global = true)]
    pub mode: Option<RateMode>,
    #[arg(long, global = true)]
    pub frame: Option<Frame>,
    /// Worker threads for sweeps and scans.
    #[arg(long, global = true, env = "JJPHOTOND_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub stride_ns: Option<f64>,
    #[arg(long, global = true)]
    pub t_end_ns: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Barrier height, plasma and transition frequency, and escape rates.
    Rates {
        #[arg(long)]
        bias_x: Option<f64>,
        #[arg(long)]
        omega_p_ghz: Option<f64>,
        #[arg(long)]
        omega_eg_ghz: Option<f64>,
    },
    /// Switching probabilities and efficiency versus time.
    Efficiency {
        /// Photon number, overriding `n_init`.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Efficiency versus detuning at the zero-detuning optimum.
    Bandwidth,
    /// CSV series for one of the reference figures: 2, 3, 4a, 4b, 5.
    Figure { id: String },
    /// Optimal detection time and efficiency across a parameter axis.
    Sweep {
        /// One of t1_ns, bias_x, delta_over_omega, n_init.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
    },
}

/// Maps an error to its exit code.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::Range(_) | Error::Json(_) | Error::DimensionGuard { .. } => {
            EXIT_CONFIG
        }
        Error::Stiffness { .. } | Error::Integration { .. } => EXIT_INTEGRATION,
        Error::BandwidthRange { .. } => EXIT_BANDWIDTH,
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn workers(cli: &Cli) -> usize {
    cli.workers
        .filter(|w| *w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

fn out_dir(cli: &Cli) -> Result<PathBuf> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn base_raw(cli: &Cli) -> Result<RawConfig> {
    match &cli.config {
        Some(path) => RawConfig::from_path(path),
        None => Ok(presets::baseline_raw()),
    }
}

fn apply_overrides(cli: &Cli, raw: &mut RawConfig) {
    if let Some(mode) = cli.mode {
        raw.rate_mode = Some(mode);
    }
    if let Some(frame) = cli.frame {
        raw.frame = Some(frame);
    }
    if let Some(s) = cli.stride_ns {
        raw.stride_ns = Some(s);
    }
    if let Some(t) = cli.t_end_ns {
        raw.t_end_ns = Some(t);
    }
}

fn resolve_params(cli: &Cli) -> Result<SimParams> {
    let mut raw = base_raw(cli)?;
    apply_overrides(cli, &mut raw);
    validate(&raw)
}

fn execute(cli: &Cli) -> Result<i32> {
    match &cli.command {
        Command::Rates {
            bias_x,
            omega_p_ghz,
            omega_eg_ghz,
        } => cmd_rates(cli, *bias_x, *omega_p_ghz, *omega_eg_ghz),
        Command::Efficiency { n } => cmd_efficiency(cli, *n),
        Command::Bandwidth => cmd_bandwidth(cli),
        Command::Figure { id } => cmd_figure(cli, id),
        Command::Sweep { param, values } => cmd_sweep(cli, param, values),
    }
}

/// Rates table rows: (quantity, SI value, SI unit, internal value, internal unit).
pub type RatesRow = (&'static str, f64, &'static str, f64, &'static str);

/// Junction quantities of a parameter set, in SI and internal units.
pub fn rates_table(p: &SimParams) -> Result<Vec<RatesRow>> {
    let derived = match p.rate_origin {
        RateOrigin::Explicit => None,
        RateOrigin::BiasX {
            x, mode, omega_p, ..
        } => Some(JunctionDerived::from_x(x, omega_p, mode)?),
        RateOrigin::Physical { bias, mode, .. } => Some(JunctionDerived::from_bias(&bias, mode)?),
    };
    let mut rows = Vec::new();
    if let Some(d) = derived {
        rows.push((
            "barrier_height",
            d.barrier_height,
            "J",
            angular_si_to_internal(d.barrier_height / HBAR),
            "rad/ns (ΔU/ħ)",
        ));
        rows.push((
            "plasma_frequency",
            d.plasma_frequency,
            "rad/s",
            angular_si_to_internal(d.plasma_frequency),
            "rad/ns",
        ));
        rows.push((
            "transition_frequency",
            d.transition_frequency,
            "rad/s",
            angular_si_to_internal(d.transition_frequency),
            "rad/ns",
        ));
        rows.push(("bias_x", d.bias_x, "1", d.bias_x, "1"));
    }
    rows.push((
        "gamma_g",
        internal_rate_to_seconds(p.gamma_g),
        "1/s",
        p.gamma_g,
        "1/ns",
    ));
    rows.push((
        "gamma_e",
        internal_rate_to_seconds(p.gamma_e),
        "1/s",
        p.gamma_e,
        "1/ns",
    ));
    Ok(rows)
}

fn cmd_rates(
    cli: &Cli,
    bias_x: Option<f64>,
    omega_p_ghz: Option<f64>,
    omega_eg_ghz: Option<f64>,
) -> Result<i32> {
    let mut raw = match (&cli.config, bias_x) {
        (Some(path), _) => RawConfig::from_path(path)?,
        (None, Some(_)) => RawConfig {
            omega_rabi_mhz: Some(200.0),
            kappa_per_s: Some(0.0),
            gamma_per_s: Some(0.0),
            n_init: Some(0),
            ..RawConfig::default()
        },
        (None, None) => {
            return Err(Error::Config(
                "missing tunneling spec: pass --bias-x or a --config providing one of \
                 `gamma_g_per_s`+`gamma_e_per_s` | `bias_x`+`rate_mode` | `i_over_i0`+`i0_ua`+`c_pf`"
                    .into(),
            ))
        }
    };
    if let Some(x) = bias_x {
        raw.clear_tunneling();
        raw.bias_x = Some(x);
    }
    if omega_p_ghz.is_some() {
        raw.omega_p_ghz = omega_p_ghz;
    }
    if omega_eg_ghz.is_some() {
        raw.omega_eg_ghz = omega_eg_ghz;
    }
    if raw.bias_x.is_some() && raw.omega_eg_ghz.is_none() && raw.omega_p_ghz.is_none() {
        raw.omega_eg_ghz = Some(DEFAULT_OMEGA_EG_GHZ);
    }
    apply_overrides(cli, &mut raw);
    let started = Instant::now();
    let p = validate(&raw)?;
    let rows = rates_table(&p)?;

    let mode = p.rate_origin.mode().map_or("explicit", RateMode::as_str);
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "mode: {mode}")?;
    if let RateOrigin::BiasX { omega_p_source, .. } = p.rate_origin {
        writeln!(
            stdout,
            "omega_p source: {}",
            serde_json::to_value(omega_p_source)?.as_str().unwrap_or("")
        )?;
    }
    writeln!(
        stdout,
        "{:<22} {:>24} {:<6} {:>24} unit",
        "quantity", "si", "unit", "internal"
    )?;
    for (name, si, si_unit, internal, internal_unit) in &rows {
        writeln!(
            stdout,
            "{name:<22} {si:>24.10e} {si_unit:<6} {internal:>24.10e} {internal_unit}"
        )?;
    }

    if cli.out.is_some() {
        let dir = out_dir(cli)?;
        let mut table = Table::new([
            "quantity",
            "si_value",
            "si_unit",
            "internal_value",
            "internal_unit",
        ]);
        for (name, si, si_unit, internal, internal_unit) in &rows {
            table.push_row(vec![
                name.to_string(),
                crate::output::format_number(*si),
                si_unit.to_string(),
                crate::output::format_number(*internal),
                internal_unit.to_string(),
            ]);
        }
        let path = dir.join("rates.csv");
        let mut manifest = RunManifest::new(&path, &p, started.elapsed().as_secs_f64())?;
        manifest.summary_value("mode", mode)?;
        write_with_manifest(&path, &table, &manifest)?;
    }
    Ok(EXIT_OK)
}

fn curve_table(curve: &EfficiencyCurve) -> Table {
    let mut table = Table::new(["t_ns", "P_n", "P_0", "eta"]);
    for k in 0..curve.times.len() {
        table.push_numbers(&[
            curve.times[k],
            report_probability(curve.p_n[k]),
            report_probability(curve.p_0[k]),
            curve.eta[k],
        ]);
    }
    table
}

fn series_table(times: &[f64], name: &str, values: &[f64]) -> Table {
    let mut table = Table::new(["t_ns", name]);
    for (t, v) in times.iter().zip(values) {
        table.push_numbers(&[*t, *v]);
    }
    table
}

fn curve_manifest(path: &Path, curve: &EfficiencyCurve, started: Instant) -> Result<RunManifest> {
    let mut manifest = RunManifest::new(path, &curve.params, started.elapsed().as_secs_f64())?;
    manifest
        .checks
        .extend(trajectory_checks("signal", &curve.stats[0]));
    manifest
        .checks
        .extend(trajectory_checks("dark", &curve.stats[1]));
    let opt = optimal_detection(curve)?;
    manifest.summary_value("n_init", curve.n_init)?;
    manifest.summary_value("t_d_ns", opt.t_d)?;
    manifest.summary_value("eta_max", opt.eta_max)?;
    if let Ok(plateau) = plateau_estimate(&curve.params) {
        manifest.summary_value("plateau_estimate", plateau)?;
    }
    Ok(manifest)
}

fn cmd_efficiency(cli: &Cli, n: Option<usize>) -> Result<i32> {
    let started = Instant::now();
    let mut p = resolve_params(cli)?;
    if let Some(n) = n {
        p = p.with_n_init(n);
    }
    let curve = efficiency_curve(&p, p.n_init)?;
    let path = out_dir(cli)?.join("efficiency.csv");
    let manifest = curve_manifest(&path, &curve, started)?;
    write_with_manifest(&path, &curve_table(&curve), &manifest)?;
    Ok(EXIT_OK)
}

fn scan_table(scan: &[(f64, f64)]) -> Table {
    let mut table = Table::new(["delta_over_omega", "eta_at_td"]);
    for (d, e) in scan {
        table.push_numbers(&[*d, *e]);
    }
    table
}

/// A finished bandwidth computation, ready to be written.
struct BandwidthRun {
    table: Table,
    manifest: RunManifest,
    outcome: Result<metrics::BandwidthResult>,
}

/// Bandwidth at the zero-detuning optimum. The scan is kept even when no
/// crossing is found.
fn bandwidth_run(path: &Path, p: &SimParams) -> Result<BandwidthRun> {
    let started = Instant::now();
    let resonant = p.with_detuning_over_omega(0.0)?;
    let curve = efficiency_curve(&resonant, resonant.n_init)?;
    let opt = optimal_detection(&curve)?;
    let mut manifest = RunManifest::new(path, &resonant, 0.0)?;
    manifest.summary_value("t_d_ns", opt.t_d)?;
    let outcome = bandwidth(&resonant, opt.t_d);
    let table = match &outcome {
        Ok(bw) => {
            manifest.summary_value("eta_zero", bw.eta_zero)?;
            manifest.summary_value("delta_minus_over_omega", bw.delta_minus / p.omega_rabi)?;
            manifest.summary_value("delta_plus_over_omega", bw.delta_plus / p.omega_rabi)?;
            manifest.summary_value("width_over_omega", bw.width_over_omega)?;
            scan_table(&bw.scan)
        }
        Err(Error::BandwidthRange { scan, .. }) => {
            manifest.summary_value("width_over_omega", Option::<f64>::None)?;
            manifest
                .checks
                .push(Check::at_most("half-efficiency crossing found", 1.0, 0.0));
            scan_table(scan)
        }
        Err(_) => Table::new(["delta_over_omega", "eta_at_td"]),
    };
    manifest.wall_clock_seconds = started.elapsed().as_secs_f64();
    Ok(BandwidthRun {
        table,
        manifest,
        outcome,
    })
}

/// Writes the scan when there is one and passes the outcome through.
fn finish_bandwidth(path: &Path, run: BandwidthRun) -> Result<metrics::BandwidthResult> {
    match run.outcome {
        Ok(_) | Err(Error::BandwidthRange { .. }) => {
            write_with_manifest(path, &run.table, &run.manifest)?
        }
        Err(_) => {}
    }
    run.outcome
}

fn cmd_bandwidth(cli: &Cli) -> Result<i32> {
    let p = resolve_params(cli)?;
    let path = out_dir(cli)?.join("bandwidth.csv");
    let bw = finish_bandwidth(&path, bandwidth_run(&path, &p)?)?;
    println!("width_over_omega: {:.6}", bw.width_over_omega);
    Ok(EXIT_OK)
}

fn label(param: SweepParam, v: f64) -> String {
    match param {
        SweepParam::BiasX => format!("{v:.1}"),
        _ if v.fract() == 0.0 => format!("{v:.0}"),
        _ => format!("{v}"),
    }
}

fn write_curves(
    dir: &Path,
    prefix: &str,
    axis: &SweepAxis,
    curves: &[EfficiencyCurve],
    started: Instant,
) -> Result<()> {
    for (v, curve) in axis.values.iter().zip(curves) {
        let path = dir.join(format!("{prefix}{}.csv", label(axis.param, *v)));
        let manifest = curve_manifest(&path, curve, started)?;
        write_with_manifest(
            &path,
            &series_table(&curve.times, "eta", &curve.eta),
            &manifest,
        )?;
    }
    Ok(())
}

fn cmd_figure(cli: &Cli, id: &str) -> Result<i32> {
    let started = Instant::now();
    let p = resolve_params(cli)?;
    let dir = out_dir(cli)?;
    let workers = workers(cli);
    match id {
        "2" => {
            let curve = efficiency_curve(&p, 1)?;
            let manifest = curve_manifest(&dir.join("fig2.csv"), &curve, started)?;
            for (series, values) in [
                ("P_1", &curve.p_n),
                ("P_0", &curve.p_0),
                ("eta", &curve.eta),
            ] {
                let reported: Vec<f64> = if series == "eta" {
                    values.clone()
                } else {
                    values.iter().map(|v| report_probability(*v)).collect()
                };
                let path = dir.join(format!("fig2_{series}.csv"));
                let mut m = manifest.clone();
                m.data_file = format!("fig2_{series}.csv");
                write_with_manifest(&path, &series_table(&curve.times, series, &reported), &m)?;
            }
        }
        "3" => {
            let xs = [2.0, 1.9, 1.8];
            let path = |x: f64| dir.join(format!("fig3_x{x:.1}.csv"));
            let runs = sweep::parallel_map(workers, &xs, |&x| {
                bandwidth_run(&path(x), &p.with_bias_x(x)?)
            })?;
            for (x, run) in xs.iter().zip(runs) {
                finish_bandwidth(&path(*x), run?)?;
            }
        }
        "4a" => {
            let axis = SweepAxis::new(SweepParam::T1, vec![10.0, 20.0, 50.0, 500.0])?;
            let curves = sweep::sweep_curves(&p.with_n_init(1), &axis, workers)?;
            write_curves(&dir, "fig4a_t1_", &axis, &curves, started)?;
        }
        "4b" => {
            let axis = SweepAxis::new(SweepParam::BiasX, vec![2.0, 1.9, 1.8, 1.7])?;
            let curves = sweep::sweep_curves(&p.with_n_init(1), &axis, workers)?;
            write_curves(&dir, "fig4b_x", &axis, &curves, started)?;
        }
        "5" => {
            let axis = SweepAxis::new(SweepParam::NInit, vec![1.0, 2.0, 3.0])?;
            let curves = sweep::sweep_curves(&p, &axis, workers)?;
            write_curves(&dir, "fig5_n", &axis, &curves, started)?;
        }
        other => {
            return Err(Error::Config(format!(
                "unknown figure `{other}` (expected 2, 3, 4a, 4b or 5)"
            )))
        }
    }
    Ok(EXIT_OK)
}

/// CSV rows `<param>,t_d_ns,eta_max`; failed points are written as `nan`.
pub fn sweep_table(result: &SweepResult) -> Table {
    let mut table = Table::new([result.axis.param.column(), "t_d_ns", "eta_max"]);
    for row in &result.rows {
        match &row.outcome {
            Ok(opt) => table.push_numbers(&[row.value, opt.t_d, opt.eta_max]),
            Err(_) => table.push_numbers(&[row.value, f64::NAN, f64::NAN]),
        }
    }
    table
}

fn cmd_sweep(cli: &Cli, param: &str, values: &[f64]) -> Result<i32> {
    let started = Instant::now();
    let param: SweepParam = param.parse()?;
    let axis = SweepAxis::new(param, values.to_vec())?;
    let p = resolve_params(cli)?;
    let result = sweep::sweep(&p, &axis, workers(cli))?;
    let path = out_dir(cli)?.join(format!("sweep_{}.csv", param.column()));
    let mut manifest = RunManifest::new(&path, &p, started.elapsed().as_secs_f64())?;
    manifest.summary_value("axis", &result.axis)?;
    manifest.summary_value("failures", result.failures())?;
    let errors: Vec<String> = result
        .rows
        .iter()
        .filter_map(|r| {
            r.outcome
                .as_ref()
                .err()
                .map(|e| format!("{}: {e}", r.value))
        })
        .collect();
    manifest.summary_value("errors", errors)?;
    write_with_manifest(&path, &sweep_table(&result), &manifest)?;
    if result.failures() > 0 {
        eprintln!(
            "{} of {} sweep points failed",
            result.failures(),
            result.rows.len()
        );
        return Ok(EXIT_PARTIAL_SWEEP);
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::seconds_rate_to_internal;

    #[test]
    fn exit_code_mapping() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::Range("x".into())), 2);
        assert_eq!(exit_code(&Error::Stiffness { t: 0.0, h: 0.0 }), 3);
        assert_eq!(
            exit_code(&Error::Integration {
                t: 0.0,
                reason: String::new()
            }),
            3
        );
        assert_eq!(
            exit_code(&Error::BandwidthRange {
                window: 4.0,
                scan: vec![]
            }),
            4
        );
    }

    #[test]
    fn rates_table_for_anchored_bias() {
        let p = presets::baseline();
        let rows = rates_table(&p).unwrap();
        let ge = rows.iter().find(|r| r.0 == "gamma_e").unwrap();
        assert_eq!(ge.1, 7.3e7);
        assert_eq!(ge.3, seconds_rate_to_internal(7.3e7));
        assert!(rows.iter().any(|r| r.0 == "barrier_height"));
    }

    #[test]
    fn unknown_figure_and_missing_rates_spec() {
        assert_eq!(run(["jjphotond", "figure", "7"]), EXIT_CONFIG);
        assert_eq!(run(["jjphotond", "rates"]), EXIT_CONFIG);
        assert_eq!(run(["jjphotond", "sweep", "--param", "t1_ns"]), EXIT_CONFIG);
    }
}
