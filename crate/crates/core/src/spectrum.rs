//! Frequency windows: contiguous bands left after clipping deep rate dips.
//!
//! A rate spectrum samples link capacity on a frequency grid, each sample
//! using a probe bandwidth equal to the grid step. Points whose rate reaches
//! `clip_fraction` times the spectrum's 95th-percentile rate are usable;
//! maximal runs of usable points form windows. Each grid point owns the
//! cell between the midpoints to its neighbours (clipped to the band), so
//! windows and clipped gaps tile the analysed band exactly.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{total_path_loss_db, AbsorptionTable, ChannelError};
use crate::link_budget::{capacity_bps, LinkDemand, RadioParams};

/// Reference percentile for the clipping threshold.
pub const REFERENCE_PERCENTILE: f64 = 0.95;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no lookup row covers distance {0} m")]
    NoRowForDistance(f64),
    #[error("lookup row for distance {0} m has no usable window")]
    NoWindow(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyBand {
    pub lo_ghz: f64,
    pub hi_ghz: f64,
}

impl FrequencyBand {
    pub fn new(lo_ghz: f64, hi_ghz: f64) -> Result<Self, SpectrumError> {
        if !(lo_ghz.is_finite() && hi_ghz.is_finite() && lo_ghz > 0.0 && lo_ghz < hi_ghz) {
            return Err(SpectrumError::InvalidInput(format!(
                "band needs 0 < lo < hi, got [{lo_ghz}, {hi_ghz}]"
            )));
        }
        Ok(Self { lo_ghz, hi_ghz })
    }

    /// Grid `lo, lo + step, ...` up to and including `hi` (when it falls on
    /// the grid within rounding).
    pub fn grid(&self, step_ghz: f64) -> Vec<f64> {
        let n = ((self.hi_ghz - self.lo_ghz) / step_ghz + 1e-9).floor() as usize + 1;
        (0..n).map(|i| self.lo_ghz + i as f64 * step_ghz).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub f_ghz: f64,
    pub rate_bps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyWindow {
    pub center_ghz: f64,
    pub bandwidth_ghz: f64,
    pub mean_rate_bps: f64,
}

impl FrequencyWindow {
    pub fn lo_ghz(&self) -> f64 {
        self.center_ghz - self.bandwidth_ghz / 2.0
    }

    pub fn hi_ghz(&self) -> f64 {
        self.center_ghz + self.bandwidth_ghz / 2.0
    }

    /// Capacity proxy used to rank windows: mean probe rate times width.
    pub fn score(&self) -> f64 {
        self.mean_rate_bps * self.bandwidth_ghz
    }
}

/// Capacity at each grid frequency of `band`, probing `step_ghz` of bandwidth.
pub fn rate_spectrum(
    table: &AbsorptionTable,
    radio: &RadioParams,
    d_m: f64,
    rho: f64,
    band: FrequencyBand,
    step_ghz: f64,
) -> Result<Vec<SpectrumPoint>, SpectrumError> {
    if !(step_ghz > 0.0 && step_ghz.is_finite()) {
        return Err(SpectrumError::InvalidInput(format!("step must be positive, got {step_ghz}")));
    }
    let (f_min, f_max) = table.freq_range();
    if band.lo_ghz < f_min || band.hi_ghz > f_max {
        return Err(ChannelError::OutOfRange {
            quantity: "band",
            value: if band.lo_ghz < f_min { band.lo_ghz } else { band.hi_ghz },
            min: f_min,
            max: f_max,
        }
        .into());
    }
    band.grid(step_ghz)
        .into_par_iter()
        .map(|f_ghz| {
            let loss = total_path_loss_db(table, f_ghz, d_m, rho)?;
            let probe = LinkDemand {
                target_rate_bps: 1.0,
                bandwidth_hz: step_ghz * 1e9,
                center_freq_ghz: f_ghz,
            };
            Ok(SpectrumPoint {
                f_ghz,
                rate_bps: capacity_bps(radio, &probe, loss),
            })
        })
        .collect()
}

/// Linear-interpolated percentile (`q` in [0, 1]) of `values`.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = q * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let t = rank - lo as f64;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + t * (sorted[hi] - sorted[lo])
    }
}

/// Windows found in one spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowScan {
    /// All windows, ascending in frequency.
    pub windows: Vec<FrequencyWindow>,
    /// Rate a grid point must reach to be usable.
    pub threshold_bps: f64,
    pub min_width_ghz: f64,
    pub band: FrequencyBand,
}

impl WindowScan {
    /// Windows at least `min_width_ghz` wide.
    pub fn wide(&self) -> impl Iterator<Item = &FrequencyWindow> {
        self.windows.iter().filter(|w| w.bandwidth_ghz >= self.min_width_ghz)
    }

    /// Windows narrower than `min_width_ghz`.
    pub fn narrow(&self) -> impl Iterator<Item = &FrequencyWindow> {
        self.windows.iter().filter(|w| w.bandwidth_ghz < self.min_width_ghz)
    }

    /// Clipped intervals between (and around) the windows.
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        let mut gaps = Vec::new();
        let mut cursor = self.band.lo_ghz;
        for w in &self.windows {
            if w.lo_ghz() > cursor {
                gaps.push((cursor, w.lo_ghz()));
            }
            cursor = w.hi_ghz();
        }
        if cursor < self.band.hi_ghz {
            gaps.push((cursor, self.band.hi_ghz));
        }
        gaps
    }

    pub fn widest(&self) -> Option<&FrequencyWindow> {
        self.windows
            .iter()
            .max_by(|a, b| a.bandwidth_ghz.total_cmp(&b.bandwidth_ghz))
    }
}

/// Splits a sorted spectrum into usable frequency windows.
pub fn detect_windows(
    spectrum: &[SpectrumPoint],
    clip_fraction: f64,
    min_width_ghz: f64,
) -> Result<WindowScan, SpectrumError> {
    if spectrum.len() < 2 {
        return Err(SpectrumError::InvalidInput(format!(
            "spectrum needs at least 2 points, got {}",
            spectrum.len()
        )));
    }
    if !(clip_fraction > 0.0 && clip_fraction < 1.0) {
        return Err(SpectrumError::InvalidInput(format!(
            "clip fraction must be in (0, 1), got {clip_fraction}"
        )));
    }
    if spectrum.windows(2).any(|w| w[1].f_ghz <= w[0].f_ghz) {
        return Err(SpectrumError::InvalidInput("spectrum must be sorted by frequency".into()));
    }
    let rates: Vec<f64> = spectrum.iter().map(|p| p.rate_bps).collect();
    let threshold_bps = clip_fraction * percentile(&rates, REFERENCE_PERCENTILE);

    let n = spectrum.len();
    let band = FrequencyBand {
        lo_ghz: spectrum[0].f_ghz,
        hi_ghz: spectrum[n - 1].f_ghz,
    };
    let cell_lo = |i: usize| {
        if i == 0 {
            band.lo_ghz
        } else {
            0.5 * (spectrum[i - 1].f_ghz + spectrum[i].f_ghz)
        }
    };
    let cell_hi = |i: usize| {
        if i == n - 1 {
            band.hi_ghz
        } else {
            0.5 * (spectrum[i].f_ghz + spectrum[i + 1].f_ghz)
        }
    };

    let mut windows = Vec::new();
    let mut i = 0;
    while i < n {
        if spectrum[i].rate_bps < threshold_bps {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && spectrum[i + 1].rate_bps >= threshold_bps {
            i += 1;
        }
        let (lo, hi) = (cell_lo(start), cell_hi(i));
        let run = &spectrum[start..=i];
        windows.push(FrequencyWindow {
            center_ghz: 0.5 * (lo + hi),
            bandwidth_ghz: hi - lo,
            mean_rate_bps: run.iter().map(|p| p.rate_bps).sum::<f64>() / run.len() as f64,
        });
        i += 1;
    }
    Ok(WindowScan {
        windows,
        threshold_bps,
        min_width_ghz,
        band,
    })
}

/// Settings shared by window detection and lookup-table construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WindowParams {
    pub band: FrequencyBand,
    pub step_ghz: f64,
    pub clip_fraction: f64,
    pub min_width_ghz: f64,
}

impl Default for WindowParams {
    fn default() -> Self {
        Self {
            band: FrequencyBand {
                lo_ghz: 300.0,
                hi_ghz: 1000.0,
            },
            step_ghz: 0.5,
            clip_fraction: 0.5,
            min_width_ghz: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LookupRow {
    /// Inclusive lower edge (m).
    pub d_lo_m: f64,
    /// Exclusive upper edge (m); windows were evaluated at this distance.
    pub d_hi_m: f64,
    pub windows: Vec<FrequencyWindow>,
    pub min_width_ghz: f64,
}

impl LookupRow {
    pub fn wide_count(&self) -> usize {
        self.windows.iter().filter(|w| w.bandwidth_ghz >= self.min_width_ghz).count()
    }

    pub fn narrow_count(&self) -> usize {
        self.windows.len() - self.wide_count()
    }

    pub fn widest_ghz(&self) -> f64 {
        self.windows.iter().map(|w| w.bandwidth_ghz).fold(0.0, f64::max)
    }

    /// Highest-scoring window; ties go to the wider one.
    pub fn best(&self) -> Option<&FrequencyWindow> {
        self.windows.iter().reduce(|best, w| {
            match w.score().total_cmp(&best.score()) {
                std::cmp::Ordering::Greater => w,
                std::cmp::Ordering::Equal if w.bandwidth_ghz > best.bandwidth_ghz => w,
                _ => best,
            }
        })
    }

    pub fn contains(&self, d_m: f64) -> bool {
        d_m >= self.d_lo_m && d_m < self.d_hi_m
    }
}

/// Distance-indexed frequency windows. Row `i` covers
/// `[distances[i-1], distances[i])` (starting from 0) and holds the windows
/// detected at its upper edge, the worst case inside the row.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowLookupTable {
    pub rows: Vec<LookupRow>,
}

impl WindowLookupTable {
    pub fn row_for(&self, d_m: f64) -> Result<&LookupRow, SpectrumError> {
        let idx = self.rows.partition_point(|r| r.d_hi_m <= d_m);
        self.rows
            .get(idx)
            .filter(|r| r.contains(d_m))
            .ok_or(SpectrumError::NoRowForDistance(d_m))
    }

    /// `d_lo_m,d_hi_m,f_c_ghz,b_ghz,mean_rate_gbps`, one line per window.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "d_lo_m,d_hi_m,f_c_ghz,b_ghz,mean_rate_gbps")?;
        for row in &self.rows {
            for w in &row.windows {
                writeln!(
                    out,
                    "{:.3},{:.3},{:.3},{:.3},{:.3}",
                    row.d_lo_m,
                    row.d_hi_m,
                    w.center_ghz,
                    w.bandwidth_ghz,
                    w.mean_rate_bps / 1e9
                )?;
            }
        }
        Ok(())
    }
}

pub fn build_lookup_table(
    table: &AbsorptionTable,
    radio: &RadioParams,
    rho: f64,
    distances: &[f64],
    params: &WindowParams,
) -> Result<WindowLookupTable, SpectrumError> {
    if distances.is_empty() {
        return Err(SpectrumError::InvalidInput("at least one distance required".into()));
    }
    if distances[0] <= 0.0 || distances.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SpectrumError::InvalidInput(
            "distances must be positive and strictly ascending".into(),
        ));
    }
    let mut rows = Vec::with_capacity(distances.len());
    let mut d_lo = 0.0;
    for &d in distances {
        let spectrum = rate_spectrum(table, radio, d, rho, params.band, params.step_ghz)?;
        let scan = detect_windows(&spectrum, params.clip_fraction, params.min_width_ghz)?;
        rows.push(LookupRow {
            d_lo_m: d_lo,
            d_hi_m: d,
            windows: scan.windows,
            min_width_ghz: params.min_width_ghz,
        });
        d_lo = d;
    }
    Ok(WindowLookupTable { rows })
}

/// Highest-capacity window for the row containing `d_m`.
pub fn best_window(lookup: &WindowLookupTable, d_m: f64) -> Result<FrequencyWindow, SpectrumError> {
    lookup
        .row_for(d_m)?
        .best()
        .copied()
        .ok_or(SpectrumError::NoWindow(d_m))
}
