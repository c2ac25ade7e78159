//! Figure presets: each writes one CSV per curve plus a `.meta` sidecar.
//!
//! Rates are per unit symbol time, so `capacity_bits` doubles as bits/s.

use std::path::{Path, PathBuf};

use clap::ValueEnum;

use super::lowpower_table;
use super::output::{write_csv, CsvRow, CsvTable, RunMetadata};
use crate::capacity::{Detector, Estimator, Scheme};
use crate::channel::{ChannelParams, Csi, PeakConstraint};
use crate::error::Result;
use crate::lowpower::{bit_energy_curve, log_grid, peak_limited_energy_summary, peak_limited_oofpsk_summary};
use crate::numerics::McConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigurePreset {
    /// Unfaded, M=2, energy detection, fixed duty factor.
    Fig1,
    /// Rician K=0.5 unknown to the receiver, M=2, energy detection.
    Fig2,
    /// Unfaded, M=2, energy detection, fixed peak power.
    Fig3,
    /// FPSK, M=2, nu=1, several K.
    Fig4,
    /// FPSK, M=3, nu=1, several K.
    Fig5,
    /// FPSK, K=1, M=2, several duty factors.
    Fig6,
    /// FPSK, M=2, fixed peak eta=1, several K.
    Fig7,
    /// Minimum bit energy against peak power, K=1.
    Fig8,
    /// Wideband slope against peak power, K=1.
    Fig9,
}

impl FigurePreset {
    pub fn name(self) -> &'static str {
        match self {
            FigurePreset::Fig1 => "fig1",
            FigurePreset::Fig2 => "fig2",
            FigurePreset::Fig3 => "fig3",
            FigurePreset::Fig4 => "fig4",
            FigurePreset::Fig5 => "fig5",
            FigurePreset::Fig6 => "fig6",
            FigurePreset::Fig7 => "fig7",
            FigurePreset::Fig8 => "fig8",
            FigurePreset::Fig9 => "fig9",
        }
    }
}

const DUTY_SWEEP: [f64; 5] = [1.0, 0.1, 0.01, 0.001, 0.0001];
const PEAK_SWEEP: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];
const K_SWEEP: [f64; 6] = [0.0, 0.25, 0.5, 1.0, 2.0, f64::INFINITY];

struct Curve {
    label: String,
    channel: ChannelParams,
    m: usize,
    regime: PeakConstraint,
    nu: f64,
    scheme: Scheme,
    snrs: Vec<f64>,
}

fn k_label(k: f64) -> String {
    if k.is_infinite() {
        "Kinf".into()
    } else {
        format!("K{k}")
    }
}

fn curves(preset: FigurePreset, points: usize) -> Result<Vec<Curve>> {
    let phase = Scheme::PHASE_IMPERFECT;
    let energy = Scheme::ENERGY_IMPERFECT;
    let par = PeakConstraint::FixedPar;
    let mut out = Vec::new();
    let mut add = |label: String, channel, m, regime, nu, scheme, snrs: &[f64]| {
        out.push(Curve { label, channel, m, regime, nu, scheme, snrs: snrs.to_vec() });
    };
    match preset {
        FigurePreset::Fig1 | FigurePreset::Fig2 => {
            let ch = if preset == FigurePreset::Fig1 {
                ChannelParams::unfaded(1.0)?
            } else {
                ChannelParams::from_rician_k(0.5)?
            };
            for nu in DUTY_SWEEP {
                add(format!("nu{nu}"), ch, 2, par, nu, energy, &log_grid(1e-2 * nu, 1e3, points));
            }
        }
        FigurePreset::Fig3 => {
            let ch = ChannelParams::unfaded(1.0)?;
            for eta in PEAK_SWEEP {
                add(
                    format!("eta{eta}"),
                    ch,
                    2,
                    PeakConstraint::fixed_peak(eta)?,
                    1.0,
                    energy,
                    &log_grid(1e-4 * eta, eta, points),
                );
            }
        }
        FigurePreset::Fig4 | FigurePreset::Fig5 => {
            let (m, ks): (usize, &[f64]) =
                if preset == FigurePreset::Fig4 { (2, &K_SWEEP) } else { (3, &K_SWEEP[1..5]) };
            for &k in ks {
                add(k_label(k), ChannelParams::from_rician_k(k)?, m, par, 1.0, phase, &log_grid(1e-2, 1e2, points));
            }
        }
        FigurePreset::Fig6 => {
            let ch = ChannelParams::from_rician_k(1.0)?;
            for nu in [1.0, 0.5, 0.1, 0.01] {
                add(format!("nu{nu}"), ch, 2, par, nu, phase, &log_grid(1e-2 * nu, 1e3, points));
            }
        }
        FigurePreset::Fig7 => {
            let regime = PeakConstraint::fixed_peak(1.0)?;
            for k in K_SWEEP {
                add(k_label(k), ChannelParams::from_rician_k(k)?, 2, regime, 1.0, phase, &log_grid(1e-4, 1.0, points));
            }
        }
        FigurePreset::Fig8 | FigurePreset::Fig9 => {}
    }
    Ok(out)
}

/// Run a preset into `dir`; returns the CSV paths written.
pub fn run_figure(
    preset: FigurePreset,
    dir: &Path,
    samples: u64,
    seed: u64,
    points: usize,
    argv: &[String],
) -> Result<Vec<PathBuf>> {
    let mc = McConfig::new(samples, seed)?;
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    if matches!(preset, FigurePreset::Fig8 | FigurePreset::Fig9) {
        let ch = ChannelParams::from_rician_k(1.0)?;
        let q = Estimator::Quadrature { order: 64 };
        for detector in [Detector::Energy, Detector::Phase] {
            let rows = log_grid(1e-2, 1e3, points)
                .into_iter()
                .map(|eta| match detector {
                    Detector::Energy => peak_limited_energy_summary(&ch, 2, eta, Csi::Imperfect, &q),
                    Detector::Phase => peak_limited_oofpsk_summary(&ch, 2, eta, Csi::Imperfect),
                })
                .collect::<Result<Vec<_>>>()?;
            let path = dir.join(format!("{}_{}.csv", preset.name(), detector.as_str()));
            write_csv(&lowpower_table(&rows), &path)?;
            let mut meta = RunMetadata::new(argv);
            meta.push("preset", preset.name());
            meta.push("K", 1);
            meta.push("m", 2);
            meta.push("detector", detector.as_str());
            meta.push("csi", "imperfect");
            meta.push("method", "closed-form");
            meta.write_sidecar(&path)?;
            written.push(path);
        }
        return Ok(written);
    }
    for (i, c) in curves(preset, points)?.into_iter().enumerate() {
        let est = Estimator::MonteCarlo(mc.derive(i as u64));
        let curve = bit_energy_curve(&c.channel, &c.snrs, c.m, c.regime, c.nu, c.scheme, &est)?;
        let table = CsvTable::from_rows(curve.points.iter().map(CsvRow::from_point).collect());
        let path = dir.join(format!("{}_{}.csv", preset.name(), c.label));
        write_csv(&table, &path)?;
        let mut meta = RunMetadata::new(argv);
        meta.push("preset", preset.name());
        meta.push("curve", &c.label);
        meta.push("gamma2", c.channel.gamma_sq);
        meta.push("d2", c.channel.d_mag_sq);
        meta.push("m", c.m);
        match c.regime {
            PeakConstraint::FixedPar => meta.push("nu", c.nu),
            PeakConstraint::FixedPeak { eta } => meta.push("peak_eta", eta),
        }
        meta.push("scheme", c.scheme.name());
        meta.push("samples", samples);
        meta.push("seed", mc.derive(i as u64).seed);
        meta.push("symbol_time_s", 1);
        meta.write_sidecar(&path)?;
        written.push(path);
    }
    Ok(written)
}
