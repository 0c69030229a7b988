//! Line-of-sight path loss: free-space spreading plus water-vapour absorption.
//!
//! Absorption coefficients come from a gridded table indexed by water-vapour
//! density and frequency. Lookups interpolate bilinearly and never
//! extrapolate outside the grid.

use std::io::{Read, Write};
use std::sync::OnceLock;

use thiserror::Error;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Header of the absorption CSV format.
pub const ABSORPTION_CSV_HEADER: [&str; 3] = ["rho_g_m3", "f_ghz", "atten_db_km"];

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("invalid absorption table: {0}")]
    Validation(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{quantity} = {value} outside table range [{min}, {max}]")]
    OutOfRange {
        quantity: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Specific attenuation (dB/km) on a (water-vapour density, frequency) grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AbsorptionTable {
    freq_grid: Vec<f64>,
    rho_grid: Vec<f64>,
    /// Row-major, `coeff[r * freq_grid.len() + f]`.
    coeff: Vec<f64>,
}

fn check_grid(name: &str, grid: &[f64]) -> Result<(), ChannelError> {
    if grid.len() < 2 {
        return Err(ChannelError::Validation(format!(
            "{name} grid needs at least 2 points, got {}",
            grid.len()
        )));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(ChannelError::Validation(format!("{name} grid has non-finite values")));
    }
    if let Some(w) = grid.windows(2).find(|w| w[1] <= w[0]) {
        return Err(ChannelError::Validation(format!(
            "{name} grid not strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

impl AbsorptionTable {
    /// Builds a table from grids and a `[rho][freq]` coefficient matrix.
    pub fn new(
        freq_grid: Vec<f64>,
        rho_grid: Vec<f64>,
        coeff: Vec<Vec<f64>>,
    ) -> Result<Self, ChannelError> {
        check_grid("frequency", &freq_grid)?;
        check_grid("rho", &rho_grid)?;
        if coeff.len() != rho_grid.len() {
            return Err(ChannelError::DimensionMismatch(format!(
                "{} coefficient rows for {} rho values",
                coeff.len(),
                rho_grid.len()
            )));
        }
        let mut flat = Vec::with_capacity(rho_grid.len() * freq_grid.len());
        for (row, rho) in coeff.into_iter().zip(&rho_grid) {
            if row.len() != freq_grid.len() {
                return Err(ChannelError::DimensionMismatch(format!(
                    "rho {rho}: {} coefficients for {} frequencies",
                    row.len(),
                    freq_grid.len()
                )));
            }
            flat.extend(row);
        }
        if let Some(bad) = flat.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
            return Err(ChannelError::Validation(format!(
                "coefficient {bad} is negative or non-finite"
            )));
        }
        Ok(Self {
            freq_grid,
            rho_grid,
            coeff: flat,
        })
    }

    pub fn freq_grid(&self) -> &[f64] {
        &self.freq_grid
    }

    pub fn rho_grid(&self) -> &[f64] {
        &self.rho_grid
    }

    pub fn freq_range(&self) -> (f64, f64) {
        (self.freq_grid[0], self.freq_grid[self.freq_grid.len() - 1])
    }

    pub fn rho_range(&self) -> (f64, f64) {
        (self.rho_grid[0], self.rho_grid[self.rho_grid.len() - 1])
    }

    /// Coefficient stored at grid node `(rho_index, freq_index)`.
    pub fn node(&self, rho_index: usize, freq_index: usize) -> f64 {
        self.coeff[rho_index * self.freq_grid.len() + freq_index]
    }

    /// Bilinear interpolation of the specific attenuation (dB/km).
    pub fn coefficient(&self, f_ghz: f64, rho: f64) -> Result<f64, ChannelError> {
        let (fi, ft) = locate("f_ghz", &self.freq_grid, f_ghz)?;
        let (ri, rt) = locate("rho", &self.rho_grid, rho)?;
        let (f1, r1) = ((fi + 1).min(self.freq_grid.len() - 1), (ri + 1).min(self.rho_grid.len() - 1));
        let lerp = |a: f64, b: f64, t: f64| if t == 0.0 { a } else { (1.0 - t) * a + t * b };
        let lo = lerp(self.node(ri, fi), self.node(ri, f1), ft);
        let hi = lerp(self.node(r1, fi), self.node(r1, f1), ft);
        Ok(lerp(lo, hi, rt))
    }

    /// Writes the table in the absorption CSV format.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", ABSORPTION_CSV_HEADER.join(","))?;
        for (r, rho) in self.rho_grid.iter().enumerate() {
            for (f, freq) in self.freq_grid.iter().enumerate() {
                writeln!(out, "{rho},{freq},{}", self.node(r, f))?;
            }
        }
        Ok(())
    }
}

/// Returns the cell index and fractional offset of `x` in `grid`.
fn locate(quantity: &'static str, grid: &[f64], x: f64) -> Result<(usize, f64), ChannelError> {
    let (min, max) = (grid[0], grid[grid.len() - 1]);
    if !(x >= min && x <= max) {
        return Err(ChannelError::OutOfRange {
            quantity,
            value: x,
            min,
            max,
        });
    }
    // first index with grid[i] > x, minus one
    let upper = grid.partition_point(|g| *g <= x);
    let i = upper.saturating_sub(1);
    if i + 1 >= grid.len() {
        return Ok((grid.len() - 1, 0.0));
    }
    let t = (x - grid[i]) / (grid[i + 1] - grid[i]);
    Ok((i, t))
}

/// Parses and validates an absorption table in CSV form.
///
/// Rows must be sorted by `(rho, f)` and cover the full Cartesian product of
/// both grids.
pub fn load_absorption_table<R: Read>(source: R) -> Result<AbsorptionTable, ChannelError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(source);
    let header = reader.headers().map_err(|e| csv_error(e, 1))?.clone();
    if header.iter().map(str::trim).ne(ABSORPTION_CSV_HEADER) {
        return Err(ChannelError::Parse {
            line: 1,
            message: format!(
                "expected header `{}`, found `{}`",
                ABSORPTION_CSV_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut rho_grid: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut freqs: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(e, 0))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64, ChannelError> {
            let raw = record.get(i).unwrap_or("").trim();
            raw.parse::<f64>().map_err(|_| ChannelError::Parse {
                line,
                message: format!("column `{}`: cannot parse `{raw}` as a number", ABSORPTION_CSV_HEADER[i]),
            })
        };
        let (rho, f, k) = (field(0)?, field(1)?, field(2)?);

        match rho_grid.last() {
            Some(&last) if rho == last => {}
            Some(&last) if rho < last => {
                return Err(ChannelError::Validation(format!(
                    "line {line}: rho {rho} after {last}; rows must be sorted by rho"
                )));
            }
            _ => {
                rho_grid.push(rho);
                rows.push(Vec::new());
                freqs.push(Vec::new());
            }
        }
        let fs = freqs.last_mut().expect("group pushed above");
        if let Some(&prev) = fs.last() {
            if f <= prev {
                return Err(ChannelError::Validation(format!(
                    "line {line}: frequency {f} after {prev}; frequencies must be strictly increasing"
                )));
            }
        }
        if !(k.is_finite() && k >= 0.0) {
            return Err(ChannelError::Validation(format!(
                "line {line}: attenuation {k} must be finite and non-negative"
            )));
        }
        fs.push(f);
        rows.last_mut().expect("group pushed above").push(k);
    }

    let freq_grid = freqs.first().cloned().unwrap_or_default();
    for (rho, fs) in rho_grid.iter().zip(&freqs).skip(1) {
        if *fs != freq_grid {
            return Err(ChannelError::DimensionMismatch(format!(
                "rho {rho} has {} frequencies that differ from the first group's {}",
                fs.len(),
                freq_grid.len()
            )));
        }
    }
    AbsorptionTable::new(freq_grid, rho_grid, rows)
}

fn csv_error(err: csv::Error, fallback_line: u64) -> ChannelError {
    let line = err.position().map_or(fallback_line, |p| p.line());
    match err.into_kind() {
        csv::ErrorKind::Io(e) => ChannelError::Io(e),
        kind => ChannelError::Parse {
            line,
            message: format!("{kind:?}"),
        },
    }
}

/// Specific attenuation (dB/km) at `(f_ghz, rho)`.
pub fn absorption_coefficient(table: &AbsorptionTable, f_ghz: f64, rho: f64) -> Result<f64, ChannelError> {
    table.coefficient(f_ghz, rho)
}

/// Free-space spreading loss `20 log10(4 pi f d / c)` in dB.
pub fn spreading_loss_db(f_ghz: f64, d_m: f64) -> Result<f64, ChannelError> {
    if !(f_ghz > 0.0 && f_ghz.is_finite()) || !(d_m > 0.0 && d_m.is_finite()) {
        return Err(ChannelError::Domain(format!(
            "spreading loss needs positive finite frequency and distance (f = {f_ghz} GHz, d = {d_m} m)"
        )));
    }
    Ok(20.0 * (4.0 * std::f64::consts::PI * f_ghz * 1e9 * d_m / SPEED_OF_LIGHT).log10())
}

/// Total line-of-sight loss: spreading plus absorption over `d_m` metres.
pub fn total_path_loss_db(table: &AbsorptionTable, f_ghz: f64, d_m: f64, rho: f64) -> Result<f64, ChannelError> {
    let spreading = spreading_loss_db(f_ghz, d_m)?;
    let k_db_per_km = table.coefficient(f_ghz, rho)?;
    Ok(spreading + k_db_per_km * (d_m / 1000.0))
}

/// Ambient conditions. Temperature only enters the noise floor.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atmosphere {
    /// Water-vapour density (g/m^3).
    pub rho: f64,
    /// Air temperature (degrees Celsius).
    pub temperature_c: f64,
}

impl Atmosphere {
    pub fn new(rho: f64, temperature_c: f64) -> Result<Self, ChannelError> {
        let atm = Self { rho, temperature_c };
        atm.validate()?;
        Ok(atm)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(ChannelError::Domain(format!("rho must be >= 0, got {}", self.rho)));
        }
        if !(-40.0..=60.0).contains(&self.temperature_c) {
            return Err(ChannelError::Domain(format!(
                "temperature {} degC outside [-40, 60]",
                self.temperature_c
            )));
        }
        Ok(())
    }

    pub fn temperature_k(&self) -> f64 {
        self.temperature_c + 273.15
    }
}

impl Default for Atmosphere {
    fn default() -> Self {
        Self {
            rho: 5.0,
            temperature_c: 25.0,
        }
    }
}

/// Bundled and constructed absorption tables.
pub mod fixtures {
    use super::*;

    const REALISTIC_CSV: &str = include_str!("../data/absorption_realistic.csv");

    /// Water-vapour attenuation over 100-1000 GHz at 0.25 GHz resolution and
    /// densities 0-20 g/m^3, computed line-by-line at 25 degC and 1 atm.
    pub fn realistic() -> &'static AbsorptionTable {
        static TABLE: OnceLock<AbsorptionTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            load_absorption_table(REALISTIC_CSV.as_bytes()).expect("bundled absorption table is valid")
        })
    }

    /// Raw text of the bundled realistic table.
    pub fn realistic_csv() -> &'static str {
        REALISTIC_CSV
    }

    /// A 2x2 table of zeros spanning the given frequency and density ranges.
    pub fn zero(f_lo: f64, f_hi: f64, rho_lo: f64, rho_hi: f64) -> AbsorptionTable {
        AbsorptionTable::new(vec![f_lo, f_hi], vec![rho_lo, rho_hi], vec![vec![0.0; 2]; 2])
            .expect("valid zero table")
    }

    /// Uniform attenuation `k_db_per_km` everywhere except a triangular spike
    /// of height `peak_db_per_km` at `center_ghz` (half-width one grid step).
    pub fn spike(f_lo: f64, f_hi: f64, step: f64, center_ghz: f64, peak_db_per_km: f64) -> AbsorptionTable {
        let n = ((f_hi - f_lo) / step).round() as usize + 1;
        let freqs: Vec<f64> = (0..n).map(|i| f_lo + i as f64 * step).collect();
        let row: Vec<f64> = freqs
            .iter()
            .map(|f| if (f - center_ghz).abs() < step / 2.0 { peak_db_per_km } else { 0.0 })
            .collect();
        AbsorptionTable::new(freqs, vec![0.0, 20.0], vec![row.clone(), row]).expect("valid spike table")
    }

    /// Smooth analytic table: a quadratic continuum plus Lorentzian lines near
    /// the strong water-vapour resonances, linear in density.
    pub fn synthetic() -> AbsorptionTable {
        const LINES: [(f64, f64, f64); 5] = [
            (380.0, 150.0, 3.0),
            (448.0, 180.0, 3.0),
            (557.0, 9000.0, 4.0),
            (752.0, 6000.0, 4.0),
            (988.0, 4500.0, 4.0),
        ];
        let freqs: Vec<f64> = (0..=900).map(|i| 100.0 + i as f64).collect();
        let rhos = vec![0.0, 5.0, 10.0, 20.0];
        let coeff = rhos
            .iter()
            .map(|rho| {
                freqs
                    .iter()
                    .map(|f| {
                        let continuum = 1.0 + 30.0 * (f / 1000.0) * (f / 1000.0);
                        let lines: f64 = LINES
                            .iter()
                            .map(|(f0, h, w)| h * w * w / ((f - f0) * (f - f0) + w * w))
                            .sum();
                        rho / 5.0 * (continuum + lines)
                    })
                    .collect()
            })
            .collect();
        AbsorptionTable::new(freqs, rhos, coeff).expect("valid synthetic table")
    }
}
