//! Command-line front end behind the `oofsk` binary.
//!
//! Subcommands: `capacity`, `curve`, `lowpower`, `validate` and `figure`.
//! SNR and Eb/N0 are in dB on the command line and in CSV output. Options
//! may also come from a `key=value` file given with `--config`; options on
//! the command line win. `OOFSK_THREADS` caps the worker pool.
//!
//! Exit codes: 0 success, 1 validation failure or runtime error, 2 usage error.

mod figures;
mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use figures::{run_figure, FigurePreset};
pub use output::{write_csv, CsvRow, CsvTable, RunMetadata};

use crate::capacity::{capacity, Detector, Estimator, Scheme};
use crate::channel::{ChannelParams, Csi, PeakConstraint, SignalingConfig};
use crate::error::{Error, Result};
use crate::lowpower::{
    bit_energy_curve, par_limited_oofpsk_summary, par_limited_summary, peak_limited_energy_summary,
    peak_limited_oofpsk_summary, LowPowerSummary, MinSearch,
};
use crate::numerics::McConfig;
use crate::validate::{
    kkt_residual, martingale_convergence_check, simulate_mi_estimate, ValidationReport, DEFAULT_Z_THRESHOLD,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "oofsk", version, about = "Capacity and low-power analysis of on-off FSK / FPSK over Rician fading")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Capacity at one SNR.
    Capacity(PointArgs),
    /// Capacity and bit energy along an SNR grid.
    Curve(CurveArgs),
    /// Zero-SNR derivatives, minimum bit energy and wideband slope.
    Lowpower(RunArgs),
    /// Cross-validation suite; exits 1 if any check fails.
    Validate(ValidateArgs),
    /// Regenerate the data behind a figure preset.
    Figure(FigureArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DetectorArg {
    Energy,
    Phase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CsiArg {
    Perfect,
    Imperfect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Diffuse fading power gamma^2.
    #[arg(long, conflicts_with = "k")]
    pub gamma2: Option<f64>,
    /// Specular power |d|^2.
    #[arg(long, conflicts_with = "k")]
    pub d2: Option<f64>,
    /// Rician factor with E|h|^2 = 1 (`inf` for no fading).
    #[arg(long = "K", id = "k")]
    pub k: Option<f64>,
    /// Number of tones.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub m: u32,
    /// Duty factor (fixed peak-to-average ratio).
    #[arg(long, conflicts_with = "peak_eta")]
    pub nu: Option<f64>,
    /// Hold the duty factor fixed (the default regime).
    #[arg(long, conflicts_with = "peak_eta")]
    pub par: bool,
    /// Fixed normalized peak power eta; the duty factor becomes SNR / eta.
    #[arg(long)]
    pub peak_eta: Option<f64>,
    #[arg(long, value_enum, default_value_t = DetectorArg::Energy)]
    pub detector: DetectorArg,
    #[arg(long, value_enum, default_value_t = CsiArg::Imperfect)]
    pub csi: CsiArg,
    /// Monte Carlo samples per estimate.
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = McConfig::default().seed)]
    pub seed: u64,
    /// Use tensor Gauss quadrature of this order instead of Monte Carlo (M <= 3).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=256))]
    pub quadrature_order: Option<u32>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub snr_db: f64,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// `start:stop:count` in dB, or a comma-separated list of dB values.
    #[arg(long, allow_hyphen_values = true, default_value = "-20:20:21")]
    pub snr_grid: String,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Add this bias (nats) to every simulated estimate; a negative control.
    #[arg(long, allow_hyphen_values = true)]
    pub inject_bias: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    pub preset: FigurePreset,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Monte Carlo samples per curve point.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    #[arg(long, default_value_t = McConfig::default().seed)]
    pub seed: u64,
    /// Grid points per curve.
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u32).range(3..))]
    pub points: u32,
}

impl RunArgs {
    pub fn channel(&self) -> Result<ChannelParams> {
        match (self.k, self.gamma2, self.d2) {
            (Some(k), _, _) => ChannelParams::from_rician_k(k),
            (None, None, None) => ChannelParams::unfaded(1.0),
            (None, g, d) => ChannelParams::new(d.unwrap_or(0.0), g.unwrap_or(0.0)),
        }
    }

    pub fn regime(&self) -> Result<PeakConstraint> {
        match self.peak_eta {
            Some(eta) => PeakConstraint::fixed_peak(eta),
            None => Ok(PeakConstraint::FixedPar),
        }
    }

    pub fn nu(&self) -> f64 {
        self.nu.unwrap_or(1.0)
    }

    pub fn m(&self) -> usize {
        self.m as usize
    }

    pub fn scheme(&self) -> Scheme {
        Scheme {
            detector: match self.detector {
                DetectorArg::Energy => Detector::Energy,
                DetectorArg::Phase => Detector::Phase,
            },
            csi: match self.csi {
                CsiArg::Perfect => Csi::Perfect,
                CsiArg::Imperfect => Csi::Imperfect,
            },
        }
    }

    pub fn mc(&self) -> Result<McConfig> {
        McConfig::new(self.samples, self.seed)
    }

    pub fn estimator(&self) -> Result<Estimator> {
        Ok(match self.quadrature_order {
            Some(order) => Estimator::Quadrature { order: order as usize },
            None => Estimator::MonteCarlo(self.mc()?),
        })
    }

    fn metadata(&self, argv: &[String]) -> Result<RunMetadata> {
        let ch = self.channel()?;
        let mut meta = RunMetadata::new(argv);
        meta.push("gamma2", ch.gamma_sq);
        meta.push("d2", ch.d_mag_sq);
        meta.push("m", self.m);
        match self.regime()? {
            PeakConstraint::FixedPar => meta.push("nu", self.nu()),
            PeakConstraint::FixedPeak { eta } => meta.push("peak_eta", eta),
        }
        meta.push("detector", self.scheme().detector.as_str());
        meta.push("csi", self.scheme().csi.as_str());
        match self.quadrature_order {
            Some(order) => meta.push("quadrature_order", order),
            None => {
                meta.push("samples", self.samples);
                meta.push("seed", self.seed);
            }
        }
        meta.push("eb_n0_convention", "received (E|h|^2 SNR / C)");
        Ok(meta)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Parse `start:stop:count` or a comma-separated list, in dB.
pub fn parse_snr_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Config(format!("cannot parse SNR grid {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 0 || (n > 1 && b <= a) {
            return Err(bad());
        }
        return Ok((0..n).map(|i| if n == 1 { a } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect());
    }
    spec.split(',').map(|s| s.trim().parse::<f64>().map_err(|_| bad())).collect()
}

/// Replace `--config FILE` with the file's options, placed right after the
/// subcommand so that explicit options given later take precedence.
pub fn expand_config(args: &[String]) -> Result<Vec<String>> {
    let mut out = Vec::with_capacity(args.len());
    let mut config: Option<String> = None;
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if a == "--config" {
            config = Some(args.get(i + 1).ok_or_else(|| Error::Config("--config needs a file".into()))?.clone());
            i += 2;
            continue;
        }
        if let Some(p) = a.strip_prefix("--config=") {
            config = Some(p.to_string());
        } else {
            out.push(a.clone());
        }
        i += 1;
    }
    let Some(path) = config else { return Ok(out) };
    let text = std::fs::read_to_string(&path)?;
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) =
            line.split_once('=').ok_or_else(|| Error::Config(format!("{path}:{}: expected key=value", n + 1)))?;
        let key = key.trim().trim_start_matches('-').replace('_', "-");
        let value = value.trim();
        match value {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            _ => extra.push(format!("--{key}={value}")),
        }
    }
    let at = out.iter().skip(1).position(|a| !a.starts_with('-')).map_or(out.len(), |p| p + 2);
    out.splice(at..at, extra);
    Ok(out)
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = args.into_iter().map(Into::into).collect();
    let argv = match expand_config(&argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    configure_threads();
    match dispatch(&cli.command, &argv) {
        Ok(code) => code,
        Err(e @ (Error::Config(_) | Error::Domain(_))) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("OOFSK_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // Fails only if the pool was already built, e.g. by an earlier call in-process.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn dispatch(command: &Command, argv: &[String]) -> Result<i32> {
    match command {
        Command::Capacity(a) => {
            let table = curve_table(&a.run, &[a.snr_db])?;
            emit(&table, a.run.out.as_deref(), &a.run.metadata(argv)?)?;
            Ok(EXIT_OK)
        }
        Command::Curve(a) => {
            let grid = parse_snr_grid(&a.snr_grid)?;
            let table = curve_table(&a.run, &grid)?;
            let mut meta = a.run.metadata(argv)?;
            meta.push("snr_grid_db", &a.snr_grid);
            emit(&table, a.run.out.as_deref(), &meta)?;
            Ok(EXIT_OK)
        }
        Command::Lowpower(a) => {
            let s = lowpower_summary(a)?;
            emit(&lowpower_table(&[s]), a.out.as_deref(), &a.metadata(argv)?)?;
            Ok(EXIT_OK)
        }
        Command::Validate(a) => run_validate(a, argv),
        Command::Figure(a) => {
            let written = run_figure(a.preset, &a.out, a.samples, a.seed, a.points as usize, argv)?;
            for p in written {
                println!("{}", p.display());
            }
            Ok(EXIT_OK)
        }
    }
}

fn emit(table: &CsvTable, out: Option<&Path>, meta: &RunMetadata) -> Result<()> {
    match out {
        Some(path) => {
            write_csv(table, path)?;
            meta.write_sidecar(path)
        }
        None => {
            let stdout = std::io::stdout();
            table.write_to(stdout.lock())
        }
    }
}

/// One CSV row per SNR (dB) in the run's regime and scheme.
pub fn curve_table(run: &RunArgs, snr_db: &[f64]) -> Result<CsvTable> {
    let ch = run.channel()?;
    let est = run.estimator()?;
    let mut sorted: Vec<f64> = snr_db.iter().map(|&d| db_to_linear(d)).collect();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let curve = bit_energy_curve(&ch, &sorted, run.m(), run.regime()?, run.nu(), run.scheme(), &est)?;
    Ok(CsvTable::from_rows(curve.points.iter().map(CsvRow::from_point).collect()))
}

/// Closed-form summary for the run's regime and scheme, with the minimum
/// located numerically when it is not at zero rate.
pub fn lowpower_summary(run: &RunArgs) -> Result<LowPowerSummary> {
    let ch = run.channel()?;
    let est = run.estimator()?;
    let search = MinSearch::default();
    let m = run.m();
    let csi = run.scheme().csi;
    match (run.regime()?, run.scheme().detector) {
        (PeakConstraint::FixedPar, Detector::Energy) => par_limited_summary(&ch, m, run.nu(), csi, &est, &search),
        (PeakConstraint::FixedPar, Detector::Phase) => {
            par_limited_oofpsk_summary(&ch, m, run.nu(), csi)?.refine_minimum(&est, &search)
        }
        (PeakConstraint::FixedPeak { eta }, Detector::Energy) => {
            // the inner expectation is smooth and low dimensional
            let q = Estimator::Quadrature { order: run.quadrature_order.unwrap_or(64) as usize };
            peak_limited_energy_summary(&ch, m, eta, csi, &q)
        }
        (PeakConstraint::FixedPeak { eta }, Detector::Phase) => peak_limited_oofpsk_summary(&ch, m, eta, csi),
    }
}

pub fn lowpower_table(rows: &[LowPowerSummary]) -> CsvTable {
    let header = [
        "regime",
        "eta",
        "nu",
        "m",
        "detector",
        "csi",
        "k",
        "c_dot0",
        "c_ddot0",
        "eb_n0_at_zero_se_db",
        "eb_n0_min_db",
        "snr_at_min",
        "s0",
        "minimum_at_nonzero_rate",
    ];
    let records = rows
        .iter()
        .map(|s| {
            let (eta, nu) = match s.regime {
                PeakConstraint::FixedPar => (String::new(), output::num(s.nu)),
                PeakConstraint::FixedPeak { eta } => (output::num(eta), String::new()),
            };
            vec![
                s.regime.name().to_string(),
                eta,
                nu,
                s.m.to_string(),
                s.scheme.detector.as_str().to_string(),
                s.scheme.csi.as_str().to_string(),
                output::num(s.channel.rician_k()),
                output::num(s.c_dot0),
                s.c_ddot0.map(output::num).unwrap_or_default(),
                output::num(s.eb_n0_at_zero_se_db),
                s.eb_n0_min_db.map(output::num).unwrap_or_default(),
                output::num(s.snr_at_min),
                output::num(s.s0),
                s.minimum_at_nonzero_rate.to_string(),
            ]
        })
        .collect();
    CsvTable::new(header.iter().map(|s| s.to_string()).collect(), records)
}

/// One line of the validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub check: String,
    pub params: String,
    pub value: f64,
    pub reference: f64,
    pub statistic: f64,
    pub pass: bool,
}

/// The default cross-validation suite at the run's sample budget.
pub fn validation_suite(run: &RunArgs, bias: f64) -> Result<Vec<CheckOutcome>> {
    let mc = run.mc()?;
    let mut out = Vec::new();
    let points = [
        (ChannelParams::rayleigh(1.0)?, 2, 1.0, 1.0),
        (ChannelParams::from_rician_k(1.0)?, 2, 0.5, 2.0),
        (ChannelParams::from_rician_k(0.5)?, 3, 0.2, 0.5),
        (ChannelParams::unfaded(1.0)?, 2, 1.0, 3.0),
    ];
    for (i, (ch, m, nu, snr)) in points.iter().enumerate() {
        let cfg = SignalingConfig::new(*m, *nu, *snr)?;
        for (j, scheme) in Scheme::ALL.iter().enumerate() {
            let sub = mc.derive((i * 4 + j) as u64);
            let mi = simulate_mi_estimate(ch, &cfg, *scheme, &sub)?.shift(bias);
            let reference = capacity(ch, &cfg, *scheme, &Estimator::MonteCarlo(sub.derive(0xC0FFEE)))?;
            let r = ValidationReport::compare(mi, reference.estimate, DEFAULT_Z_THRESHOLD);
            out.push(CheckOutcome {
                check: "simulate_mi".into(),
                params: format!("{} K={} M={m} nu={nu} snr={snr}", scheme.name(), ch.rician_k()),
                value: r.mi_estimate.value,
                reference: r.analytic_value,
                statistic: r.z_score,
                pass: r.pass,
            });
        }
    }
    let ch = ChannelParams::from_rician_k(1.0)?;
    for m in [2, 3] {
        let cfg = SignalingConfig::new(m, 0.5, 1.0)?;
        for scheme in Scheme::ALL {
            let k = kkt_residual(&ch, &cfg, scheme, &mc.derive(0x4B4B + m as u64))?;
            out.push(CheckOutcome {
                check: "kkt_residual".into(),
                params: format!("{} K=1 M={m} nu=0.5 snr=1", scheme.name()),
                value: k.residual,
                reference: k.noise_floor,
                statistic: if k.noise_floor > 0.0 { k.residual / k.noise_floor } else { 0.0 },
                pass: k.pass(),
            });
        }
    }
    let seq = martingale_convergence_check(&ChannelParams::rayleigh(1.0)?, 1.0, 1.0, &[2, 8, 32], &mc.derive(0x3A))?;
    for w in seq.windows(2) {
        let ((ma, a), (mb, b)) = (w[0], w[1]);
        let sd = a.std_error.hypot(b.std_error);
        let z = if sd > 0.0 { (b.value - a.value) / sd } else { 0.0 };
        out.push(CheckOutcome {
            check: "chi_nonincreasing".into(),
            params: format!("Rayleigh nu=1 snr=1 M={ma}->{mb}"),
            value: b.value,
            reference: a.value,
            statistic: z,
            pass: z <= 3.0,
        });
    }
    Ok(out)
}

fn run_validate(a: &ValidateArgs, argv: &[String]) -> Result<i32> {
    let outcomes = validation_suite(&a.run, a.inject_bias.unwrap_or(0.0))?;
    let header = ["check", "params", "value", "reference", "statistic", "pass"];
    let records = outcomes
        .iter()
        .map(|o| {
            vec![
                o.check.clone(),
                o.params.clone(),
                output::num(o.value),
                output::num(o.reference),
                output::num(o.statistic),
                o.pass.to_string(),
            ]
        })
        .collect();
    let table = CsvTable::new(header.iter().map(|s| s.to_string()).collect(), records);
    let mut meta = RunMetadata::new(argv);
    meta.push("samples", a.run.samples);
    meta.push("seed", a.run.seed);
    meta.push("inject_bias", a.inject_bias.unwrap_or(0.0));
    emit(&table, a.run.out.as_deref(), &meta)?;
    let failed: Vec<&CheckOutcome> = outcomes.iter().filter(|o| !o.pass).collect();
    for f in &failed {
        eprintln!(
            "FAIL {} [{}]: value {} reference {} statistic {}",
            f.check, f.params, f.value, f.reference, f.statistic
        );
    }
    Ok(if failed.is_empty() { EXIT_OK } else { EXIT_FAILURE })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn grid_forms() {
        assert_eq!(parse_snr_grid("-10:10:3").unwrap(), vec![-10.0, 0.0, 10.0]);
        assert_eq!(parse_snr_grid("1, 2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_snr_grid("1:0:3").is_err());
        assert!(parse_snr_grid("x").is_err());
    }

    #[test]
    fn k_sets_unit_power() {
        let cli = Cli::try_parse_from(args("oofsk capacity --K 1 --snr-db 0")).unwrap();
        let Command::Capacity(a) = cli.command else { panic!() };
        let ch = a.run.channel().unwrap();
        assert!((ch.gamma_sq - 0.5).abs() < 1e-15 && (ch.d_mag_sq - 0.5).abs() < 1e-15);
        assert!(Cli::try_parse_from(args("oofsk capacity --K 1 --gamma2 1 --snr-db 0")).is_err());
        assert!(Cli::try_parse_from(args("oofsk capacity --nu 0.5 --peak-eta 2 --snr-db 0")).is_err());
        assert!(Cli::try_parse_from(args("oofsk capacity --samples 0 --snr-db 0")).is_err());
    }

    #[test]
    fn config_file_is_spliced_after_subcommand() {
        let dir = std::env::temp_dir().join(format!("oofsk-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "# comment\nm = 3\nsamples=10\npar=true\n").unwrap();
        let argv = args(&format!("oofsk curve --config {} --m 4", path.display()));
        let expanded = expand_config(&argv).unwrap();
        assert_eq!(expanded[1], "curve");
        assert_eq!(&expanded[2..5], ["--m=3", "--samples=10", "--par"]);
        let cli = Cli::try_parse_from(&expanded).unwrap();
        let Command::Curve(a) = cli.command else { panic!() };
        assert_eq!(a.run.m, 4);
        assert_eq!(a.run.samples, 10);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(args("oofsk capacity --samples 0 --snr-db 0")), EXIT_USAGE);
        assert_eq!(run(args("oofsk capacity --nu 2 --snr-db 0 --samples 10")), EXIT_USAGE);
        assert_eq!(run(args("oofsk figure fig42 --out /tmp")), EXIT_USAGE);
    }
}
