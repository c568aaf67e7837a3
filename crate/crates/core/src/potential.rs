//! Piecewise constant potentials: validation, multi-barrier builders,
//! mirror images, and staircase discretization of sampled profiles.
//!
//! All quantities are in natural units with `2m/ħ² = 1`, so a region of level
//! `V` carries the wave number `κ = √(E − V)`.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("breakpoints must be strictly increasing (x[{index}] = {value} does not exceed x[{}])", index - 1)]
    NonIncreasingBreakpoints { index: usize, value: f64 },
    #[error("expected {expected} levels for {breakpoints} breakpoints, got {got}")]
    LengthMismatch { breakpoints: usize, expected: usize, got: usize },
    #[error("at least one breakpoint is required")]
    NoBreakpoints,
    #[error("{field}[{index}] is not finite")]
    NonFinite { field: &'static str, index: usize },
    #[error("invalid multi-barrier spec: {0}")]
    InvalidSpec(String),
    #[error("no samples given")]
    EmptySamples,
    #[error("samples must be sorted by position (sample {index} goes backwards)")]
    UnsortedSamples { index: usize },
    #[error("step count must be at least 1")]
    InvalidStepCount,
    #[error("cannot read potential file: {0}")]
    Io(String),
    #[error("malformed potential file: {0}")]
    Parse(String),
}

/// `V(x) = levels[r]` on `breakpoints[r-1] < x < breakpoints[r]`, with the
/// first and last regions extending to `∓∞`.
///
/// Regions are indexed `0..=N` and interfaces `0..N`; interface `i` sits at
/// `breakpoints[i]` between regions `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseConstantPotential {
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
}

/// Checks the structural invariants without building a potential.
pub fn validate(breakpoints: &[f64], levels: &[f64]) -> Result<(), PotentialError> {
    if levels.len() != breakpoints.len() + 1 {
        return Err(PotentialError::LengthMismatch {
            breakpoints: breakpoints.len(),
            expected: breakpoints.len() + 1,
            got: levels.len(),
        });
    }
    if breakpoints.is_empty() {
        return Err(PotentialError::NoBreakpoints);
    }
    if let Some(index) = breakpoints.iter().position(|x| !x.is_finite()) {
        return Err(PotentialError::NonFinite { field: "x", index });
    }
    if let Some(index) = levels.iter().position(|v| !v.is_finite()) {
        return Err(PotentialError::NonFinite { field: "v", index });
    }
    if let Some(index) = (1..breakpoints.len()).find(|&i| breakpoints[i] <= breakpoints[i - 1]) {
        return Err(PotentialError::NonIncreasingBreakpoints { index, value: breakpoints[index] });
    }
    Ok(())
}

impl PiecewiseConstantPotential {
    pub fn new(breakpoints: Vec<f64>, levels: Vec<f64>) -> Result<Self, PotentialError> {
        validate(&breakpoints, &levels)?;
        Ok(Self { breakpoints, levels })
    }

    pub fn validate(&self) -> Result<(), PotentialError> {
        validate(&self.breakpoints, &self.levels)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    /// Number of jump discontinuities `N`.
    pub fn interface_count(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn region_count(&self) -> usize {
        self.levels.len()
    }

    /// Width of region `r`; infinite for the two leads.
    pub fn region_width(&self, r: usize) -> f64 {
        if r == 0 || r == self.breakpoints.len() {
            f64::INFINITY
        } else {
            self.breakpoints[r] - self.breakpoints[r - 1]
        }
    }

    /// Left edge of region `r`, or the first breakpoint for the left lead.
    /// Wave amplitudes in each region are referenced to this point.
    pub fn region_origin(&self, r: usize) -> f64 {
        if r == 0 {
            self.breakpoints[0]
        } else {
            self.breakpoints[r - 1]
        }
    }

    /// Region containing `x`; a point sitting on a breakpoint belongs to the region on its left.
    pub fn region_of(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b < x)
    }

    pub fn value_at(&self, x: f64) -> f64 {
        self.levels[self.region_of(x)]
    }

    /// Total extent `x_N − x_1`.
    pub fn span(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1] - self.breakpoints[0]
    }

    pub fn has_equal_leads(&self) -> bool {
        self.levels[0] == self.levels[self.levels.len() - 1]
    }

    pub fn translate(&self, shift: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.iter().map(|x| x + shift).collect(),
            levels: self.levels.clone(),
        }
    }

    /// Mirror image about the midpoint of `[x_1, x_N]`.
    pub fn reverse(&self) -> Self {
        let first = self.breakpoints[0];
        let last = self.breakpoints[self.breakpoints.len() - 1];
        let breakpoints = self.breakpoints.iter().rev().map(|x| (first - x) + last).collect();
        let levels = self.levels.iter().rev().copied().collect();
        Self { breakpoints, levels }
    }

    /// Drops interfaces that separate equal levels. A potential whose levels
    /// are all equal keeps a single (fictitious) interface.
    pub fn merged(&self) -> Self {
        let mut breakpoints = Vec::with_capacity(self.breakpoints.len());
        let mut levels = vec![self.levels[0]];
        for (x, v) in self.breakpoints.iter().zip(&self.levels[1..]) {
            if *v != *levels.last().unwrap() {
                breakpoints.push(*x);
                levels.push(*v);
            }
        }
        if breakpoints.is_empty() {
            breakpoints.push(self.breakpoints[0]);
            levels.push(self.levels[0]);
        }
        Self { breakpoints, levels }
    }
}

/// A train of `barrier_count` rectangular barriers of common height and
/// width, separated by wells of individual widths, starting at `origin`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MbpSpec {
    pub barrier_count: usize,
    pub barrier_height: f64,
    pub barrier_width: f64,
    pub well_widths: Vec<f64>,
    pub origin: f64,
}

impl MbpSpec {
    pub fn new(barrier_height: f64, barrier_width: f64, well_widths: Vec<f64>) -> Self {
        Self {
            barrier_count: well_widths.len() + 1,
            barrier_height,
            barrier_width,
            well_widths,
            origin: 0.0,
        }
    }

    pub fn uniform(barrier_count: usize, barrier_height: f64, barrier_width: f64, well_width: f64) -> Self {
        Self::new(barrier_height, barrier_width, vec![well_width; barrier_count.saturating_sub(1)])
    }

    pub fn with_origin(mut self, origin: f64) -> Self {
        self.origin = origin;
        self
    }

    pub fn with_wells(&self, well_widths: Vec<f64>) -> Self {
        Self { barrier_count: well_widths.len() + 1, well_widths, ..self.clone() }
    }

    pub fn validate(&self) -> Result<(), PotentialError> {
        let invalid = |msg: String| Err(PotentialError::InvalidSpec(msg));
        if self.barrier_count == 0 {
            return invalid("barrier count must be at least 1".into());
        }
        if self.well_widths.len() + 1 != self.barrier_count {
            return invalid(format!(
                "{} barriers need {} well widths, got {}",
                self.barrier_count,
                self.barrier_count - 1,
                self.well_widths.len()
            ));
        }
        if !(self.barrier_height > 0.0 && self.barrier_height.is_finite()) {
            return invalid(format!("barrier height must be positive, got {}", self.barrier_height));
        }
        if !(self.barrier_width > 0.0 && self.barrier_width.is_finite()) {
            return invalid(format!("barrier width must be positive, got {}", self.barrier_width));
        }
        if let Some((i, w)) = self.well_widths.iter().enumerate().find(|(_, w)| !(**w > 0.0 && w.is_finite())) {
            return invalid(format!("well width [{i}] must be positive, got {w}"));
        }
        if !self.origin.is_finite() {
            return invalid("origin must be finite".into());
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.barrier_count as f64 * self.barrier_width + self.well_widths.iter().sum::<f64>()
    }

    pub fn is_uniform(&self) -> bool {
        self.well_widths.windows(2).all(|w| w[0] == w[1])
    }
}

/// Builds the multi-barrier potential: `N = 2m` breakpoints with levels
/// alternating `0, V0, 0, …, V0, 0`.
pub fn build_mbp(spec: &MbpSpec) -> Result<PiecewiseConstantPotential, PotentialError> {
    spec.validate()?;
    let m = spec.barrier_count;
    let (delta, theta) = (spec.barrier_width, spec.origin);
    let mut breakpoints = Vec::with_capacity(2 * m);

    if spec.is_uniform() {
        // closed form, evaluated literally so uniform trains are reproduced bit for bit
        let tau = spec.well_widths.first().copied().unwrap_or(0.0);
        for j in 1..=2 * m {
            let x = if j % 2 == 1 {
                (j - 1) as f64 / 2.0 * (delta + tau) + theta
            } else {
                (j / 2) as f64 * delta + ((j / 2) as f64 - 1.0) * tau + theta
            };
            breakpoints.push(x);
        }
    } else {
        let mut wells = 0.0;
        for k in 0..m {
            breakpoints.push(theta + k as f64 * delta + wells);
            breakpoints.push(theta + (k + 1) as f64 * delta + wells);
            if k + 1 < m {
                wells += spec.well_widths[k];
            }
        }
    }

    let levels = (0..=2 * m).map(|j| if j % 2 == 1 { spec.barrier_height } else { 0.0 }).collect();
    Ok(PiecewiseConstantPotential::new(breakpoints, levels)?.merged())
}

/// Staircase approximation with `steps` equal-width intervals over the
/// sampled range. Each level is the linearly interpolated sample value at the
/// interval midpoint; the two leads are set to zero.
pub fn discretize(samples: &[(f64, f64)], steps: usize) -> Result<PiecewiseConstantPotential, PotentialError> {
    if samples.is_empty() {
        return Err(PotentialError::EmptySamples);
    }
    if steps == 0 {
        return Err(PotentialError::InvalidStepCount);
    }
    if let Some(index) = samples.iter().position(|(x, v)| !x.is_finite() || !v.is_finite()) {
        return Err(PotentialError::NonFinite { field: "samples", index });
    }
    if let Some(index) = (1..samples.len()).find(|&i| samples[i].0 < samples[i - 1].0) {
        return Err(PotentialError::UnsortedSamples { index });
    }
    let lo = samples[0].0;
    let hi = samples[samples.len() - 1].0;
    if !(hi > lo) {
        return Err(PotentialError::InvalidSpec("samples must span a positive range".into()));
    }

    let width = (hi - lo) / steps as f64;
    let mut breakpoints: Vec<f64> = (0..steps).map(|k| lo + k as f64 * width).collect();
    breakpoints.push(hi);

    let mut levels = Vec::with_capacity(steps + 2);
    levels.push(0.0);
    levels.extend((0..steps).map(|k| interpolate(samples, lo + (k as f64 + 0.5) * width)));
    levels.push(0.0);
    PiecewiseConstantPotential::new(breakpoints, levels)
}

fn interpolate(samples: &[(f64, f64)], x: f64) -> f64 {
    let i = samples.partition_point(|(sx, _)| *sx < x);
    if i == 0 {
        return samples[0].1;
    }
    if i == samples.len() {
        return samples[samples.len() - 1].1;
    }
    let (x0, v0) = samples[i - 1];
    let (x1, v1) = samples[i];
    if x1 == x0 {
        return v1;
    }
    v0 + (v1 - v0) * (x - x0) / (x1 - x0)
}

/// On-disk potential description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialFile {
    Explicit {
        x: Vec<f64>,
        v: Vec<f64>,
    },
    Mbp {
        v0: f64,
        delta: f64,
        wells: Vec<f64>,
        #[serde(default)]
        theta: f64,
    },
}

impl PotentialFile {
    pub fn from_json(text: &str) -> Result<Self, PotentialError> {
        serde_json::from_str(text).map_err(|e| PotentialError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, PotentialError> {
        let text = std::fs::read_to_string(path).map_err(|e| PotentialError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("potential file serializes")
    }

    pub fn into_potential(self) -> Result<PiecewiseConstantPotential, PotentialError> {
        match self {
            PotentialFile::Explicit { x, v } => PiecewiseConstantPotential::new(x, v),
            PotentialFile::Mbp { v0, delta, wells, theta } => {
                build_mbp(&MbpSpec::new(v0, delta, wells).with_origin(theta))
            }
        }
    }
}

/// Parses and validates a potential file in one step.
pub fn load_potential(path: &Path) -> Result<PiecewiseConstantPotential, PotentialError> {
    PotentialFile::load(path)?.into_potential()
}
