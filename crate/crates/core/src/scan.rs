//! Parameter sweeps over κ and well widths, plus CSV and graymap output.

use crate::potential::{build_mbp, MbpSpec, PiecewiseConstantPotential, PotentialError};
use crate::scattering::{transmission, ScatteringError};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("invalid grid {0}")]
    InvalidGrid(String),
    #[error("invalid scan: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("at κ = {kappa}: {source}")]
    Scattering { kappa: f64, source: ScatteringError },
    #[error("nothing to write")]
    EmptyData,
    #[error("malformed CSV at line {line}: {message}")]
    Csv { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Uniform grid of `count` points from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self, ScanError> {
        let axis = Self { lo, hi, count };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi && self.count >= 2) {
            return Err(ScanError::InvalidGrid(self.to_string()));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.count - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.hi
        } else {
            self.lo + i as f64 * self.step()
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.value(i)).collect()
    }
}

impl std::fmt::Display for GridAxis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.lo, self.hi, self.count)
    }
}

impl FromStr for GridAxis {
    type Err = ScanError;

    /// Parses `lo:hi:count`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ScanError::InvalidGrid(format!("'{s}', expected lo:hi:count"));
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count] = parts.as_slice() else {
            return Err(bad());
        };
        let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
        let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
        let count: usize = count.trim().parse().map_err(|_| bad())?;
        Self::new(lo, hi, count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumRow {
    pub kappa: f64,
    pub energy: f64,
    pub t: f64,
    pub ln_t: f64,
    pub r: f64,
}

fn spectrum_row(potential: &PiecewiseConstantPotential, kappa: f64) -> Result<SpectrumRow, ScanError> {
    let energy = kappa * kappa;
    let t = transmission(potential, energy).map_err(|source| ScanError::Scattering { kappa, source })?;
    Ok(SpectrumRow { kappa, energy, t: t.t, ln_t: t.ln_t, r: t.r })
}

/// Solves at `E = κ²` for every κ on the axis, which must lie above zero.
pub fn spectrum(potential: &PiecewiseConstantPotential, kappa_axis: &GridAxis) -> Result<Vec<SpectrumRow>, ScanError> {
    spectrum_with(potential, kappa_axis, true)
}

/// [`spectrum`] with the grid evaluated serially or in parallel.
pub fn spectrum_with(potential: &PiecewiseConstantPotential, kappa_axis: &GridAxis, parallel: bool) -> Result<Vec<SpectrumRow>, ScanError> {
    check_kappa_axis(kappa_axis)?;
    let kappas = kappa_axis.values();
    if parallel {
        kappas.par_iter().map(|&k| spectrum_row(potential, k)).collect()
    } else {
        kappas.iter().map(|&k| spectrum_row(potential, k)).collect()
    }
}

fn check_kappa_axis(axis: &GridAxis) -> Result<(), ScanError> {
    axis.validate()?;
    if axis.lo <= 0.0 {
        return Err(ScanError::InvalidGrid(format!("{axis}: κ must be positive")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanParameter {
    /// Common width of every well.
    UniformTau,
    /// Width of one well, the others held at a base width.
    SingleWellTauPrime,
}

impl ScanParameter {
    pub fn tag(&self) -> &'static str {
        match self {
            ScanParameter::UniformTau => "uniform_tau",
            ScanParameter::SingleWellTauPrime => "single_well_tau_prime",
        }
    }
}

/// `ln T` over κ (columns) and a well-width parameter (rows).
#[derive(Debug, Clone, PartialEq)]
pub struct GridScan {
    pub kappa_axis: GridAxis,
    pub param_axis: GridAxis,
    pub parameter: ScanParameter,
    /// Row-major, `values[row * kappa_axis.count + col]`.
    pub values: Vec<f64>,
}

impl GridScan {
    pub fn rows(&self) -> usize {
        self.param_axis.count
    }

    pub fn cols(&self) -> usize {
        self.kappa_axis.count
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols()..(i + 1) * self.cols()]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols() + col]
    }
}

fn scan_rows<F>(
    parameter: ScanParameter,
    param_axis: &GridAxis,
    kappa_axis: &GridAxis,
    parallel: bool,
    build: F,
) -> Result<GridScan, ScanError>
where
    F: Fn(f64) -> Result<PiecewiseConstantPotential, ScanError> + Sync,
{
    param_axis.validate()?;
    check_kappa_axis(kappa_axis)?;
    let params = param_axis.values();
    let potentials = params.iter().map(|&p| build(p)).collect::<Result<Vec<_>, _>>()?;
    let row = |p: &PiecewiseConstantPotential| -> Result<Vec<f64>, ScanError> {
        Ok(spectrum_with(p, kappa_axis, false)?.into_iter().map(|r| r.ln_t).collect())
    };
    let rows: Vec<Vec<f64>> = if parallel {
        potentials.par_iter().map(row).collect::<Result<_, _>>()?
    } else {
        potentials.iter().map(row).collect::<Result<_, _>>()?
    };
    Ok(GridScan { kappa_axis: *kappa_axis, param_axis: *param_axis, parameter, values: rows.concat() })
}

fn check_train(m: usize) -> Result<(), ScanError> {
    if m < 2 {
        return Err(ScanError::InvalidSpec(format!("need at least 2 barriers, got {m}")));
    }
    Ok(())
}

/// Uniform `m`-barrier trains with every well width taken from `tau_axis`.
pub fn scan_uniform_tau(m: usize, v0: f64, delta: f64, tau_axis: &GridAxis, kappa_axis: &GridAxis) -> Result<GridScan, ScanError> {
    check_train(m)?;
    scan_rows(ScanParameter::UniformTau, tau_axis, kappa_axis, true, |tau| {
        Ok(build_mbp(&MbpSpec::uniform(m, v0, delta, tau))?)
    })
}

/// Trains whose wells are all `base_tau` except well `varied_index` (1-based),
/// which takes each value of `tau_prime_axis`.
pub fn scan_single_well(
    m: usize,
    v0: f64,
    delta: f64,
    base_tau: f64,
    varied_index: usize,
    tau_prime_axis: &GridAxis,
    kappa_axis: &GridAxis,
) -> Result<GridScan, ScanError> {
    check_train(m)?;
    if !(1..m).contains(&varied_index) {
        return Err(ScanError::InvalidSpec(format!("well index {varied_index} outside 1..={}", m - 1)));
    }
    scan_rows(ScanParameter::SingleWellTauPrime, tau_prime_axis, kappa_axis, true, |tau_prime| {
        Ok(build_mbp(&single_well_spec(m, v0, delta, base_tau, varied_index, tau_prime))?)
    })
}

/// The train used for one row of [`scan_single_well`].
pub fn single_well_spec(m: usize, v0: f64, delta: f64, base_tau: f64, varied_index: usize, tau_prime: f64) -> MbpSpec {
    let mut wells = vec![base_tau; m.saturating_sub(1)];
    if let Some(w) = wells.get_mut(varied_index.wrapping_sub(1)) {
        *w = tau_prime;
    }
    MbpSpec::new(v0, delta, wells)
}

/// Curves `τ = nπ/κ` for `n = 1..=n_max`, sampled on the κ grid and clipped
/// to the τ range. Each entry is a list of `(κ, τ)` points.
pub fn overlay_hyperbolas(kappa_axis: &GridAxis, tau_axis: &GridAxis, n_max: usize) -> Vec<Vec<(f64, f64)>> {
    (1..=n_max)
        .map(|n| {
            kappa_axis
                .values()
                .into_iter()
                .filter(|&k| k > 0.0)
                .map(|k| (k, n as f64 * PI / k))
                .filter(|&(_, tau)| tau >= tau_axis.lo && tau <= tau_axis.hi)
                .collect()
        })
        .collect()
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn spectrum_csv(rows: &[SpectrumRow]) -> Result<String, ScanError> {
    if rows.is_empty() {
        return Err(ScanError::EmptyData);
    }
    let mut out = String::from("kappa,energy,T,lnT,R\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{},{},{}", num(r.kappa), num(r.energy), num(r.t), num(r.ln_t), num(r.r));
    }
    Ok(out)
}

pub fn grid_csv(scan: &GridScan) -> Result<String, ScanError> {
    if scan.values.is_empty() {
        return Err(ScanError::EmptyData);
    }
    let kappas = scan.kappa_axis.values();
    let mut out = String::from("kappa,param,lnT\n");
    for (i, p) in scan.param_axis.values().into_iter().enumerate() {
        for (j, &k) in kappas.iter().enumerate() {
            let _ = writeln!(out, "{},{},{}", num(k), num(p), num(scan.get(i, j)));
        }
    }
    Ok(out)
}

fn parse_rows<const N: usize>(text: &str, header: &str) -> Result<Vec<[f64; N]>, ScanError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == header => {}
        _ => return Err(ScanError::Csv { line: 1, message: format!("expected header '{header}'") }),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let fields: Vec<&str> = l.split(',').collect();
            if fields.len() != N {
                return Err(ScanError::Csv { line: i + 1, message: format!("expected {N} fields, got {}", fields.len()) });
            }
            let mut row = [0.0; N];
            for (slot, f) in row.iter_mut().zip(fields) {
                *slot = f.trim().parse().map_err(|_| ScanError::Csv { line: i + 1, message: format!("bad number '{f}'") })?;
            }
            Ok(row)
        })
        .collect()
}

pub fn parse_spectrum_csv(text: &str) -> Result<Vec<SpectrumRow>, ScanError> {
    Ok(parse_rows::<5>(text, "kappa,energy,T,lnT,R")?
        .into_iter()
        .map(|[kappa, energy, t, ln_t, r]| SpectrumRow { kappa, energy, t, ln_t, r })
        .collect())
}

/// Long-form grid rows `(κ, param, ln T)`.
pub fn parse_grid_csv(text: &str) -> Result<Vec<[f64; 3]>, ScanError> {
    parse_rows::<3>(text, "kappa,param,lnT")
}

pub fn write_spectrum_csv(rows: &[SpectrumRow], path: &Path) -> Result<(), ScanError> {
    fs::write(path, spectrum_csv(rows)?)?;
    Ok(())
}

pub fn write_grid_csv(scan: &GridScan, path: &Path) -> Result<(), ScanError> {
    fs::write(path, grid_csv(scan)?)?;
    Ok(())
}

/// Gray levels for a row-major matrix: `[min, 0]` maps linearly onto `[0, 255]`.
pub fn gray_levels(values: &[f64]) -> Vec<u8> {
    let min = values.iter().copied().fold(0.0, f64::min);
    values
        .iter()
        .map(|&v| if min == 0.0 { 255 } else { (255.0 * (v.min(0.0) - min) / -min).round() as u8 })
        .collect()
}

/// Binary graymap with row 0 at the lowest parameter value.
pub fn pgm_bytes(scan: &GridScan) -> Result<Vec<u8>, ScanError> {
    if scan.values.is_empty() {
        return Err(ScanError::EmptyData);
    }
    let mut out = format!("P5\n{} {}\n255\n", scan.cols(), scan.rows()).into_bytes();
    out.extend(gray_levels(&scan.values));
    Ok(out)
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".txt");
    PathBuf::from(s)
}

fn sidecar_text(scan: &GridScan) -> String {
    let min = scan.values.iter().copied().fold(0.0, f64::min);
    let mut out = String::new();
    let _ = writeln!(out, "parameter = {}", scan.parameter.tag());
    let _ = writeln!(out, "columns = kappa {}", scan.kappa_axis);
    let _ = writeln!(out, "rows = param {} (first row lowest)", scan.param_axis);
    let _ = writeln!(out, "gray = round(255 * (lnT - lnT_min) / (0 - lnT_min))");
    let _ = writeln!(out, "lnT_min = {}", num(min));
    let _ = writeln!(out, "lnT_max = 0");
    out
}

/// Writes the graymap and its `.txt` sidecar describing axes and gray mapping.
pub fn write_pgm(scan: &GridScan, path: &Path) -> Result<(), ScanError> {
    let bytes = pgm_bytes(scan)?;
    fs::write(path, bytes)?;
    fs::write(sidecar_path(path), sidecar_text(scan))?;
    Ok(())
}
