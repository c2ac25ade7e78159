//! CSV tables and their metadata sidecars.

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::lowpower::BitEnergyPoint;

/// Header of the capacity/bit-energy CSV.
pub const CURVE_HEADER: [&str; 8] =
    ["snr_db", "nu", "capacity_nats", "capacity_bits", "spectral_eff_bpshz", "eb_n0_db", "std_err", "method"];

/// Fixed 16 significant digits; `inf`, `-inf` and `nan` spelled out.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.15e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub snr_db: f64,
    pub nu: f64,
    pub capacity_nats: f64,
    pub capacity_bits: f64,
    pub spectral_eff_bpshz: f64,
    pub eb_n0_db: f64,
    pub std_err: f64,
    pub method: String,
}

impl CsvRow {
    pub fn from_point(p: &BitEnergyPoint) -> Self {
        Self {
            snr_db: 10.0 * p.snr.log10(),
            nu: p.nu,
            capacity_nats: p.capacity.nats_per_symbol,
            capacity_bits: p.capacity.bits_per_symbol(),
            spectral_eff_bpshz: p.spectral_efficiency,
            eb_n0_db: p.eb_n0_db,
            std_err: p.capacity.std_error(),
            method: p.capacity.estimate.method.as_str().to_string(),
        }
    }

    fn record(&self) -> Vec<String> {
        vec![
            num(self.snr_db),
            num(self.nu),
            num(self.capacity_nats),
            num(self.capacity_bits),
            num(self.spectral_eff_bpshz),
            num(self.eb_n0_db),
            num(self.std_err),
            self.method.clone(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub records: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: Vec<String>, records: Vec<Vec<String>>) -> Self {
        Self { header, records }
    }

    pub fn from_rows(rows: Vec<CsvRow>) -> Self {
        Self::new(CURVE_HEADER.iter().map(|s| s.to_string()).collect(), rows.iter().map(CsvRow::record).collect())
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(&self.header)?;
        for r in &self.records {
            wr.write_record(r)?;
        }
        wr.flush()?;
        Ok(())
    }
}

pub fn write_csv(table: &CsvTable, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    table.write_to(std::fs::File::create(path)?)
}

/// Run description written next to each CSV as `<file>.meta`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    entries: Vec<(String, String)>,
}

impl RunMetadata {
    pub fn new(argv: &[String]) -> Self {
        let mut m = Self { entries: Vec::new() };
        m.push("command", argv.join(" "));
        m.push("version", version());
        m
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    pub fn sidecar_path(csv: &Path) -> PathBuf {
        let mut s = csv.as_os_str().to_owned();
        s.push(".meta");
        PathBuf::from(s)
    }

    pub fn write_sidecar(&self, csv: &Path) -> Result<()> {
        std::fs::write(Self::sidecar_path(csv), self.render())?;
        Ok(())
    }
}

/// `v<crate version>`, with a `-g<hash>` suffix when built with `OOFSK_GIT_HASH` set.
pub fn version() -> String {
    match option_env!("OOFSK_GIT_HASH") {
        Some(h) if !h.is_empty() => format!("v{}-g{h}", env!("CARGO_PKG_VERSION")),
        _ => format!("v{}", env!("CARGO_PKG_VERSION")),
    }
}
