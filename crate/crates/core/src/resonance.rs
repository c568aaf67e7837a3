//! Resonance estimates, band and peak counts, peak location in `ln T(κ)`,
//! and the well-permutation (alias) audit for multi-barrier trains.

use crate::potential::{build_mbp, MbpSpec, PiecewiseConstantPotential, PotentialError};
use crate::scattering::{transmission, ScatteringError};
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResonanceError {
    #[error("invalid κ range ({lo}, {hi}) with {grid_points} grid points")]
    InvalidRange { lo: f64, hi: f64, grid_points: usize },
    #[error("ordering {index} is not a rearrangement of the well widths")]
    BadPermutation { index: usize },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error("at κ = {kappa}: {source}")]
    Scattering { kappa: f64, source: ScatteringError },
}

/// `floor(τ√V0/π)`: resonance bands of a uniform train below the barrier top.
pub fn band_count(tau: f64, v0: f64) -> usize {
    if !(tau > 0.0 && v0 > 0.0) {
        return 0;
    }
    (tau * v0.sqrt() / PI).floor() as usize
}

fn distinct_widths(well_widths: &[f64]) -> Vec<f64> {
    let mut widths: Vec<f64> = well_widths.to_vec();
    widths.sort_by(|a, b| b.total_cmp(a));
    widths.dedup();
    widths
}

/// Sum of [`band_count`] over the distinct well widths.
pub fn peak_count(well_widths: &[f64], v0: f64) -> usize {
    distinct_widths(well_widths).iter().map(|&t| band_count(t, v0)).sum()
}

/// Infinite-square-well estimate `κ = nπ/τ` for one well width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceEstimate {
    pub well_width: f64,
    pub quantum_number: usize,
    pub kappa_estimate: f64,
}

impl ResonanceEstimate {
    pub fn new(well_width: f64, quantum_number: usize) -> Self {
        Self { well_width, quantum_number, kappa_estimate: quantum_number as f64 * PI / well_width }
    }
}

/// Every `(τ, n)` with `nπ/τ ≤ kappa_max` over distinct widths, sorted by κ.
pub fn estimates(well_widths: &[f64], kappa_max: f64) -> Vec<ResonanceEstimate> {
    let mut out: Vec<ResonanceEstimate> = distinct_widths(well_widths)
        .into_iter()
        .filter(|t| *t > 0.0)
        .flat_map(|t| (1..).map(move |n| ResonanceEstimate::new(t, n)).take_while(|e| e.kappa_estimate <= kappa_max))
        .collect();
    out.sort_by(|a, b| a.kappa_estimate.total_cmp(&b.kappa_estimate));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeakKind {
    /// Below the barrier top with prominence at or above the sharp floor.
    Sharp,
    /// Inside the band around the barrier top, above the relaxed floor.
    Diffuse,
    /// Above the barrier top, outside the diffuse band.
    AboveBarrier,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub kappa: f64,
    pub ln_t: f64,
    /// Full width at half of the prominence, in κ.
    pub width: f64,
    /// Rise in `ln T` over the lower of the two flanking minima.
    pub prominence: f64,
    pub kind: PeakKind,
}

/// Search settings for [`find_peaks`].
#[derive(Debug, Clone, PartialEq)]
pub struct PeakSearch {
    pub kappa_lo: f64,
    pub kappa_hi: f64,
    pub grid_points: usize,
    pub refine_tolerance: f64,
    pub sharp_floor: f64,
    pub diffuse_floor: f64,
    /// Diffuse band as fractions of `√V0`.
    pub diffuse_band: (f64, f64),
    /// Barrier top `V0`; the highest level of the potential when unset.
    pub barrier_height: Option<f64>,
    /// Wells seeding the estimates; interior regions at the lead level when unset.
    pub well_widths: Option<Vec<f64>>,
}

impl PeakSearch {
    /// Defaults for a barrier of height `v0`: 20 000 points on `(0.02, 1.2√V0)`.
    pub fn for_barrier(v0: f64) -> Self {
        Self {
            kappa_lo: 0.02,
            kappa_hi: 1.2 * v0.max(0.0).sqrt(),
            grid_points: 20_000,
            refine_tolerance: 1e-6,
            sharp_floor: 0.5,
            diffuse_floor: 0.1,
            diffuse_band: (0.95, 1.2),
            barrier_height: Some(v0),
            well_widths: None,
        }
    }

    pub fn with_range(mut self, lo: f64, hi: f64, grid_points: usize) -> Self {
        self.kappa_lo = lo;
        self.kappa_hi = hi;
        self.grid_points = grid_points;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.refine_tolerance = tolerance;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceCatalog {
    pub barrier_height: f64,
    pub well_widths: Vec<f64>,
    /// Retained peaks of every kind, strictly increasing in κ.
    pub peaks: Vec<Peak>,
    pub estimates: Vec<ResonanceEstimate>,
    /// Defined when all wells share one width.
    pub band_count_beta: Option<usize>,
    pub peak_count_alpha: usize,
}

impl ResonanceCatalog {
    pub fn sharp(&self) -> impl Iterator<Item = &Peak> {
        self.peaks.iter().filter(|p| p.kind == PeakKind::Sharp)
    }

    pub fn diffuse(&self) -> impl Iterator<Item = &Peak> {
        self.peaks.iter().filter(|p| p.kind == PeakKind::Diffuse)
    }

    pub fn sharp_count(&self) -> usize {
        self.sharp().count()
    }

    pub fn diffuse_count(&self) -> usize {
        self.diffuse().count()
    }

    pub fn sharp_kappas(&self) -> Vec<f64> {
        self.sharp().map(|p| p.kappa).collect()
    }
}

/// Interior regions at the lead level.
pub fn detect_wells(potential: &PiecewiseConstantPotential) -> Vec<f64> {
    let levels = potential.levels();
    (1..levels.len() - 1)
        .filter(|&r| levels[r] == levels[0])
        .map(|r| potential.region_width(r))
        .collect()
}

struct LnT<'a> {
    potential: &'a PiecewiseConstantPotential,
}

impl LnT<'_> {
    fn at(&self, kappa: f64) -> Result<f64, ResonanceError> {
        transmission(self.potential, kappa * kappa)
            .map(|t| t.ln_t)
            .map_err(|source| ResonanceError::Scattering { kappa, source })
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section search on `[a, b]` for a maximum (`sign = 1`) or minimum
/// (`sign = -1`) of `f`, to bracket width `tol`.
fn golden(f: &LnT, mut a: f64, mut b: f64, tol: f64, sign: f64) -> Result<(f64, f64), ResonanceError> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = sign * f.at(c)?;
    let mut fd = sign * f.at(d)?;
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = sign * f.at(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = sign * f.at(d)?;
        }
    }
    Ok(if fc >= fd { (c, sign * fc) } else { (d, sign * fd) })
}

/// Steps by `tol` toward any higher neighbour until the point dominates both.
fn polish_max(f: &LnT, mut x: f64, mut fx: f64, tol: f64, lo: f64, hi: f64) -> Result<(f64, f64), ResonanceError> {
    for _ in 0..10_000 {
        let left = if x - tol >= lo { f.at(x - tol)? } else { f64::NEG_INFINITY };
        let right = if x + tol <= hi { f.at(x + tol)? } else { f64::NEG_INFINITY };
        if left > fx && left >= right {
            x -= tol;
            fx = left;
        } else if right > fx {
            x += tol;
            fx = right;
        } else {
            break;
        }
    }
    Ok((x, fx))
}

const SUBGRID_POINTS: usize = 33;
const SUBGRID_DEPTH: usize = 4;

/// Resamples a grid bracket to split multiplets narrower than the grid
/// spacing, then golden-section refines every sub-bracket maximum.
#[allow(clippy::too_many_arguments)]
fn refine_bracket(
    f: &LnT,
    a: f64,
    b: f64,
    best: (f64, f64),
    tol: f64,
    lo: f64,
    hi: f64,
    depth: usize,
) -> Result<Vec<(f64, f64)>, ResonanceError> {
    if depth < SUBGRID_DEPTH && (b - a) / (SUBGRID_POINTS - 1) as f64 > tol {
        let xs = grid(a, b, SUBGRID_POINTS);
        let ys = xs.iter().map(|&x| f.at(x)).collect::<Result<Vec<f64>, _>>()?;
        let maxima: Vec<usize> = (1..SUBGRID_POINTS - 1).filter(|&j| ys[j] > ys[j - 1] && ys[j] >= ys[j + 1]).collect();
        if maxima.len() > 1 {
            let mut out = Vec::new();
            for j in maxima {
                out.extend(refine_bracket(f, xs[j - 1], xs[j + 1], (xs[j], ys[j]), tol, lo, hi, depth + 1)?);
            }
            return Ok(out);
        }
    }
    let (x, fx) = golden(f, a, b, tol, 1.0)?;
    let (x, fx) = if fx >= best.1 { (x, fx) } else { best };
    Ok(vec![polish_max(f, x, fx, tol, lo, hi)?])
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + i as f64 * step }).collect()
}

/// Evaluates `ln T` on a uniform κ grid; order of evaluation does not affect the result.
pub fn ln_t_grid(potential: &PiecewiseConstantPotential, kappas: &[f64]) -> Result<Vec<f64>, ResonanceError> {
    let f = LnT { potential };
    kappas.par_iter().map(|&k| f.at(k)).collect()
}

struct Candidate {
    kappa: f64,
    ln_t: f64,
}

fn classify(kappa: f64, prominence: f64, sqrt_v0: f64, search: &PeakSearch) -> Option<PeakKind> {
    let (band_lo, band_hi) = (search.diffuse_band.0 * sqrt_v0, search.diffuse_band.1 * sqrt_v0);
    if kappa < sqrt_v0 && prominence >= search.sharp_floor {
        Some(PeakKind::Sharp)
    } else if (band_lo..=band_hi).contains(&kappa) && prominence >= search.diffuse_floor {
        Some(PeakKind::Diffuse)
    } else if kappa >= sqrt_v0 && prominence >= search.sharp_floor {
        Some(PeakKind::AboveBarrier)
    } else {
        None
    }
}

/// Locates the resonant maxima of `ln T(κ)`.
///
/// Candidates are the local maxima of a uniform grid plus the grid maxima
/// reached by climbing from each infinite-well estimate. Each grid bracket is
/// resampled to split multiplets the grid cannot resolve, every maximum is
/// refined by golden-section search, duplicates within twice the
/// tolerance are merged, and candidates are pruned one at a time, weakest
/// first, until every survivor clears the prominence floor of its class.
pub fn find_peaks(potential: &PiecewiseConstantPotential, search: &PeakSearch) -> Result<ResonanceCatalog, ResonanceError> {
    let (lo, hi, n) = (search.kappa_lo, search.kappa_hi, search.grid_points);
    if !(lo > 0.0 && hi > lo && lo.is_finite() && hi.is_finite() && n >= 16) {
        return Err(ResonanceError::InvalidRange { lo, hi, grid_points: n });
    }
    let tol = search.refine_tolerance;
    let v0 = search
        .barrier_height
        .unwrap_or_else(|| potential.levels().iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let sqrt_v0 = v0.max(0.0).sqrt();
    let wells = search.well_widths.clone().unwrap_or_else(|| detect_wells(potential));
    let f = LnT { potential };

    let kappas = grid(lo, hi, n);
    let values = ln_t_grid(potential, &kappas)?;

    let is_max = |i: usize| values[i] > values[i - 1] && values[i] >= values[i + 1];
    let mut seeds: Vec<usize> = (1..n - 1).filter(|&i| is_max(i)).collect();
    let estimate_list = estimates(&wells, hi);
    for e in &estimate_list {
        if e.kappa_estimate <= lo {
            continue;
        }
        let mut i = kappas.partition_point(|&k| k < e.kappa_estimate).clamp(1, n - 2);
        loop {
            if values[i - 1] > values[i] && i > 1 {
                i -= 1;
            } else if values[i + 1] > values[i] && i < n - 2 {
                i += 1;
            } else {
                break;
            }
        }
        if is_max(i) {
            seeds.push(i);
        }
    }
    seeds.sort_unstable();
    seeds.dedup();

    let refined: Vec<(f64, f64)> = seeds
        .par_iter()
        .map(|&i| refine_bracket(&f, kappas[i.saturating_sub(2)], kappas[(i + 2).min(n - 1)], (kappas[i], values[i]), tol, lo, hi, 0))
        .collect::<Result<Vec<_>, _>>()?
        .concat();

    let mut candidates: Vec<Candidate> = Vec::with_capacity(refined.len());
    for (kappa, ln_t) in refined {
        match candidates.iter_mut().find(|c| (c.kappa - kappa).abs() < 2.0 * tol) {
            Some(c) if c.ln_t < ln_t => {
                c.kappa = kappa;
                c.ln_t = ln_t;
            }
            Some(_) => {}
            None => candidates.push(Candidate { kappa, ln_t }),
        }
    }
    candidates.sort_by(|a, b| a.kappa.total_cmp(&b.kappa));

    // valley minima between neighbours, recomputed as candidates are pruned
    let valley = |a: f64, fa: f64, b: f64, fb: f64| -> Result<f64, ResonanceError> {
        let start = kappas.partition_point(|&k| k <= a);
        let end = kappas.partition_point(|&k| k < b);
        let mut best = fa.min(fb);
        let mut best_i = None;
        for (i, &v) in values.iter().enumerate().take(end).skip(start) {
            if v < best {
                best = v;
                best_i = Some(i);
            }
        }
        let (wa, wb) = match best_i {
            Some(i) => (kappas[i.saturating_sub(1)].max(a), kappas[(i + 1).min(n - 1)].min(b)),
            None => (a, b),
        };
        if wb - wa > tol {
            let (_, fm) = golden(&f, wa, wb, tol, -1.0)?;
            best = best.min(fm);
        }
        Ok(best)
    };

    let mut prominences;
    loop {
        let m = candidates.len();
        let mut gaps = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let (a, fa) = if j == 0 { (lo, values[0]) } else { (candidates[j - 1].kappa, candidates[j - 1].ln_t) };
            let (b, fb) = if j == m { (hi, values[n - 1]) } else { (candidates[j].kappa, candidates[j].ln_t) };
            gaps.push(valley(a, fa, b, fb)?);
        }
        prominences = (0..m).map(|j| candidates[j].ln_t - gaps[j].min(gaps[j + 1])).collect::<Vec<f64>>();

        let weakest = (0..m)
            .filter(|&j| classify(candidates[j].kappa, prominences[j], sqrt_v0, search).is_none())
            .min_by(|&a, &b| prominences[a].total_cmp(&prominences[b]));
        match weakest {
            Some(j) => {
                candidates.remove(j);
            }
            None => break,
        }
    }

    let mut peaks = Vec::with_capacity(candidates.len());
    for (c, &prominence) in candidates.iter().zip(&prominences) {
        let kind = classify(c.kappa, prominence, sqrt_v0, search).expect("pruned");
        let width = half_prominence_width(&f, c, prominence, lo, hi, tol)?;
        peaks.push(Peak { kappa: c.kappa, ln_t: c.ln_t, width, prominence, kind });
    }

    let band_count_beta = match distinct_widths(&wells).as_slice() {
        [tau] => Some(band_count(*tau, v0)),
        _ => None,
    };
    Ok(ResonanceCatalog {
        barrier_height: v0,
        peak_count_alpha: peak_count(&wells, v0),
        well_widths: wells,
        peaks,
        estimates: estimate_list,
        band_count_beta,
    })
}

/// Distance between the points on either side where `ln T` falls to half the prominence.
fn half_prominence_width(f: &LnT, c: &Candidate, prominence: f64, lo: f64, hi: f64, tol: f64) -> Result<f64, ResonanceError> {
    let level = c.ln_t - 0.5 * prominence;
    let side = |dir: f64| -> Result<f64, ResonanceError> {
        let limit = if dir < 0.0 { c.kappa - lo } else { hi - c.kappa };
        let mut inner = 0.0;
        let mut outer = tol.min(limit);
        loop {
            if f.at(c.kappa + dir * outer)? <= level {
                break;
            }
            if outer >= limit {
                return Ok(limit);
            }
            inner = outer;
            outer = (outer * 2.0).min(limit);
        }
        while outer - inner > tol * 1e-3 {
            let mid = 0.5 * (inner + outer);
            if f.at(c.kappa + dir * mid)? > level {
                inner = mid;
            } else {
                outer = mid;
            }
        }
        Ok(0.5 * (inner + outer))
    };
    Ok(side(-1.0)? + side(1.0)?)
}

/// Settings for [`alias_audit`].
#[derive(Debug, Clone, PartialEq)]
pub struct AliasSettings {
    pub search: PeakSearch,
    /// Nearest-match gate in κ.
    pub match_gate: f64,
}

impl AliasSettings {
    pub fn for_barrier(v0: f64) -> Self {
        Self { search: PeakSearch::for_barrier(v0), match_gate: 1e-2 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderingResult {
    pub wells: Vec<f64>,
    pub catalog: ResonanceCatalog,
}

impl OrderingResult {
    pub fn sharp_count(&self) -> usize {
        self.catalog.sharp_count()
    }
}

/// Greedy nearest-neighbour matching of two peak lists.
#[derive(Debug, Clone, PartialEq)]
pub struct PeakMatching {
    pub first: usize,
    pub second: usize,
    pub matched: usize,
    pub unmatched_first: usize,
    pub unmatched_second: usize,
    /// Largest distance among pairs accepted by the gate.
    pub max_matched_distance: f64,
    /// Largest distance in the ungated one-to-one greedy assignment.
    pub max_discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReversalPair {
    pub first: usize,
    pub second: usize,
    /// `max |ΔT|` over the search grid.
    pub max_delta_t: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AliasReport {
    pub barrier_height: f64,
    pub barrier_width: f64,
    pub orderings: Vec<OrderingResult>,
    pub matchings: Vec<PeakMatching>,
    pub reversal_pairs: Vec<ReversalPair>,
    /// Input orderings dropped as exact repeats.
    pub duplicates_removed: usize,
    pub repeated_widths: bool,
}

impl AliasReport {
    pub fn counts_equal(&self) -> bool {
        self.orderings.windows(2).all(|w| w[0].sharp_count() == w[1].sharp_count())
    }

    pub fn all_matched(&self) -> bool {
        self.matchings.iter().all(|m| m.unmatched_first == 0 && m.unmatched_second == 0)
    }

    pub fn max_matched_distance(&self) -> f64 {
        self.matchings.iter().map(|m| m.max_matched_distance).fold(0.0, f64::max)
    }

    pub fn max_discrepancy(&self) -> f64 {
        self.matchings.iter().map(|m| m.max_discrepancy).fold(0.0, f64::max)
    }

    pub fn max_reversal_delta(&self) -> f64 {
        self.reversal_pairs.iter().map(|p| p.max_delta_t).fold(0.0, f64::max)
    }
}

fn greedy_pairs(a: &[f64], b: &[f64], gate: f64) -> Vec<(usize, usize, f64)> {
    let mut all: Vec<(usize, usize, f64)> = a
        .iter()
        .enumerate()
        .flat_map(|(i, x)| b.iter().enumerate().map(move |(j, y)| (i, j, (x - y).abs())))
        .filter(|(_, _, d)| *d <= gate)
        .collect();
    all.sort_by(|p, q| p.2.total_cmp(&q.2).then(p.0.cmp(&q.0)).then(p.1.cmp(&q.1)));
    let (mut used_a, mut used_b) = (vec![false; a.len()], vec![false; b.len()]);
    let mut out = Vec::new();
    for (i, j, d) in all {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            out.push((i, j, d));
        }
    }
    out
}

/// Matches the sharp peaks of two catalogs.
pub fn match_peaks(first: &[f64], second: &[f64], gate: f64) -> (usize, usize, usize, f64, f64) {
    let gated = greedy_pairs(first, second, gate);
    let ungated = greedy_pairs(first, second, f64::INFINITY);
    let max_gated = gated.iter().map(|p| p.2).fold(0.0, f64::max);
    let max_any = ungated.iter().map(|p| p.2).fold(0.0, f64::max);
    (gated.len(), first.len() - gated.len(), second.len() - gated.len(), max_gated, max_any)
}

fn same_multiset(a: &[f64], b: &[f64]) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    x == y
}

/// Runs the peak search for each well ordering, matches sharp peaks between
/// every pair of orderings, and compares full `T(κ)` curves for orderings that
/// are mirror images of each other.
pub fn alias_audit(spec: &MbpSpec, orderings: &[Vec<f64>], settings: &AliasSettings) -> Result<AliasReport, ResonanceError> {
    spec.validate()?;
    for (index, o) in orderings.iter().enumerate() {
        if !same_multiset(o, &spec.well_widths) {
            return Err(ResonanceError::BadPermutation { index });
        }
    }
    let mut unique: Vec<Vec<f64>> = Vec::new();
    for o in orderings {
        if !unique.contains(o) {
            unique.push(o.clone());
        }
    }
    let duplicates_removed = orderings.len() - unique.len();

    let mut search = settings.search.clone();
    search.barrier_height = Some(spec.barrier_height);
    search.well_widths = Some(spec.well_widths.clone());

    let results: Vec<(OrderingResult, Vec<f64>)> = unique
        .par_iter()
        .map(|wells| {
            let potential = build_mbp(&spec.with_wells(wells.clone()))?;
            let catalog = find_peaks(&potential, &search)?;
            let kappas = grid(search.kappa_lo, search.kappa_hi, search.grid_points);
            let t = kappas
                .iter()
                .map(|&k| transmission(&potential, k * k).map(|t| t.t).map_err(|source| ResonanceError::Scattering { kappa: k, source }))
                .collect::<Result<Vec<f64>, _>>()?;
            Ok((OrderingResult { wells: wells.clone(), catalog }, t))
        })
        .collect::<Result<_, ResonanceError>>()?;

    let mut matchings = Vec::new();
    let mut reversal_pairs = Vec::new();
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            let a = results[i].0.catalog.sharp_kappas();
            let b = results[j].0.catalog.sharp_kappas();
            let (matched, ua, ub, max_matched, max_any) = match_peaks(&a, &b, settings.match_gate);
            matchings.push(PeakMatching {
                first: i,
                second: j,
                matched,
                unmatched_first: ua,
                unmatched_second: ub,
                max_matched_distance: max_matched,
                max_discrepancy: max_any,
            });
            let mirrored: Vec<f64> = results[j].0.wells.iter().rev().copied().collect();
            if mirrored == results[i].0.wells {
                let max_delta_t = results[i].1.iter().zip(&results[j].1).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
                reversal_pairs.push(ReversalPair { first: i, second: j, max_delta_t });
            }
        }
    }

    Ok(AliasReport {
        barrier_height: spec.barrier_height,
        barrier_width: spec.barrier_width,
        repeated_widths: distinct_widths(&spec.well_widths).len() < spec.well_widths.len(),
        orderings: results.into_iter().map(|r| r.0).collect(),
        matchings,
        reversal_pairs,
        duplicates_removed,
    })
}

/// All distinct orderings of `widths`, in lexicographic order of positions.
pub fn all_orderings(widths: &[f64]) -> Vec<Vec<f64>> {
    fn rec(rest: &mut Vec<f64>, current: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if rest.is_empty() {
            if !out.contains(current) {
                out.push(current.clone());
            }
            return;
        }
        for i in 0..rest.len() {
            let w = rest.remove(i);
            current.push(w);
            rec(rest, current, out);
            current.pop();
            rest.insert(i, w);
        }
    }
    let mut out = Vec::new();
    rec(&mut widths.to_vec(), &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_count_examples() {
        assert_eq!(band_count(2.0, 40.0), 4);
        assert_eq!(band_count(7.0, 40.0), 14);
        assert_eq!(band_count(1e-9, 40.0), 0);
        assert_eq!(band_count(0.0, 40.0), 0);
    }

    #[test]
    fn peak_count_examples() {
        assert_eq!(peak_count(&[5.0, 3.0, 2.0], 40.0), 20);
        assert_eq!(peak_count(&[2.0, 2.0, 2.0], 40.0), 4);
        assert_eq!(peak_count(&[1.0], 40.0), 2);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn estimates_examples() {
        let e = estimates(&[2.0], 40f64.sqrt());
        let k: Vec<f64> = e.iter().map(|e| e.kappa_estimate).collect();
        assert_eq!(e.iter().map(|e| e.quantum_number).collect::<Vec<_>>(), vec![1, 2, 3, 4]);
        for (got, want) in k.iter().zip([1.5708, 3.1416, 4.7124, 6.2832]) {
            assert!((got - want).abs() < 1e-4);
        }
        assert_eq!(estimates(&[2.0, 2.0], 10.0), estimates(&[2.0], 10.0));

        let mixed = estimates(&[5.0, 3.0, 2.0], 40f64.sqrt());
        assert_eq!(mixed[0].well_width, 5.0);
        assert_eq!(mixed.len(), 20);
        assert!(mixed.windows(2).all(|w| w[0].kappa_estimate <= w[1].kappa_estimate));
        for e in &mixed {
            assert_eq!(e.kappa_estimate * e.well_width, e.quantum_number as f64 * PI);
        }
    }

    #[test]
    fn invalid_ranges() {
        let p = build_mbp(&MbpSpec::new(40.0, 0.5, vec![2.0])).unwrap();
        for s in [
            PeakSearch::for_barrier(40.0).with_range(0.0, 1.0, 100),
            PeakSearch::for_barrier(40.0).with_range(2.0, 1.0, 100),
            PeakSearch::for_barrier(40.0).with_range(0.1, 1.0, 8),
        ] {
            assert!(matches!(find_peaks(&p, &s), Err(ResonanceError::InvalidRange { .. })));
        }
    }

    #[test]
    fn single_barrier_has_no_sharp_peaks() {
        let p = build_mbp(&MbpSpec::new(40.0, 0.5, vec![])).unwrap();
        let c = find_peaks(&p, &PeakSearch::for_barrier(40.0)).unwrap();
        assert_eq!(c.sharp_count(), 0);
        assert!(c.well_widths.is_empty());
        assert_eq!(c.peak_count_alpha, 0);
    }

    #[test]
    fn greedy_matching_respects_gate() {
        let (m, ua, ub, max_m, max_any) = match_peaks(&[1.0, 2.0, 3.0], &[1.001, 2.05, 3.0], 1e-2);
        assert_eq!((m, ua, ub), (2, 1, 1));
        assert!((max_m - 0.001).abs() < 1e-12);
        assert!((max_any - 0.05).abs() < 1e-12);
    }

    #[test]
    fn orderings_enumeration() {
        assert_eq!(all_orderings(&[1.0, 2.0, 3.0, 4.0]).len(), 24);
        assert_eq!(all_orderings(&[1.0, 1.0, 2.0]).len(), 3);
    }

    #[test]
    fn bad_permutation_is_rejected() {
        let spec = MbpSpec::new(40.0, 0.5, vec![1.0, 2.0]);
        let err = alias_audit(&spec, &[vec![1.0, 2.0], vec![1.0, 3.0]], &AliasSettings::for_barrier(40.0)).unwrap_err();
        assert_eq!(err, ResonanceError::BadPermutation { index: 1 });
    }
}
