//! Transfer matrices, amplitude chains and transmission/reflection.
//!
//! Region `r` carries `ψ_r(x) = A_r e^{iκ_r s} + B_r e^{−iκ_r s}`, or
//! `A_r s + B_r` when `E` sits on the region's level, where
//! `s = x − origin_r` and `origin_r` is the left edge of the region (the first
//! breakpoint for the left lead). Referencing each region to its own edge
//! keeps every interface matrix bounded by the growth across a single region,
//! whatever the absolute position of the potential.
//!
//! The interface matrix `M_i` maps the amplitudes of region `i + 1` onto
//! those of region `i`, so `θ_r = M_r M_{r+1} ⋯ M_{N−1} θ_N`.

use crate::pauli::{fold_scaled, ComplexMatrix2, PauliError, PauliVector, ScaledPauliVector};
use crate::potential::PiecewiseConstantPotential;
use num_complex::Complex64;
use thiserror::Error;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative width of the band around a level inside which the linear basis is used.
pub const ZERO_KAPPA_RELATIVE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScatteringError {
    #[error("interface {interface} index out of range for {count} interfaces")]
    InterfaceOutOfRange { interface: usize, count: usize },
    #[error("energy {energy} sits on a level adjacent to interface {interface}; use the linear-basis matrix")]
    DegenerateKappa { interface: usize, energy: f64 },
    #[error("neither region next to interface {interface} is degenerate at energy {energy}")]
    NoDegenerateRegion { interface: usize, energy: f64 },
    #[error("both regions next to interface {interface} are degenerate at energy {energy}")]
    BothRegionsDegenerate { interface: usize, energy: f64 },
    #[error("energy {energy} does not exceed the incident lead level {level}")]
    EvanescentLead { energy: f64, level: f64 },
    #[error("leads differ ({left} vs {right}); transmission is defined for equal leads only")]
    UnequalLeads { left: f64, right: f64 },
    #[error("energy must be finite, got {0}")]
    NonFiniteEnergy(f64),
    #[error("transfer-matrix chain overflowed: {0}")]
    ChainOverflow(#[from] PauliError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Incidence {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Exponential,
    Linear,
}

pub fn zero_kappa_threshold(level: f64) -> f64 {
    ZERO_KAPPA_RELATIVE * level.abs().max(1.0)
}

pub fn is_degenerate(energy: f64, level: f64) -> bool {
    (energy - level).abs() <= zero_kappa_threshold(level)
}

/// Principal square root of `E − V`: real and nonnegative above the level,
/// positive imaginary below it.
pub fn wave_number(energy: f64, level: f64) -> Complex64 {
    let d = energy - level;
    if d >= 0.0 {
        Complex64::new(d.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-d).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct RegionKind {
    kappa: Complex64,
    basis: Basis,
}

impl RegionKind {
    fn new(energy: f64, level: f64) -> Self {
        let basis = if is_degenerate(energy, level) { Basis::Linear } else { Basis::Exponential };
        let kappa = match basis {
            Basis::Linear => Complex64::new(0.0, 0.0),
            Basis::Exponential => wave_number(energy, level),
        };
        Self { kappa, basis }
    }

    /// `[[ψ], [ψ′]]` for unit amplitudes at offset zero.
    fn basis_at_origin(&self) -> ComplexMatrix2 {
        match self.basis {
            Basis::Exponential => {
                let ik = I * self.kappa;
                ComplexMatrix2::new(1.0.into(), 1.0.into(), ik, -ik)
            }
            Basis::Linear => ComplexMatrix2::new(0.0.into(), 1.0.into(), 1.0.into(), 0.0.into()),
        }
    }

    /// Inverse of the value/derivative matrix at offset `w`, returned as
    /// `exp(log_scale) · matrix`.
    fn inverse_basis_at(&self, w: f64) -> (ComplexMatrix2, f64) {
        match self.basis {
            Basis::Exponential => {
                let k = self.kappa;
                let (up, dn, s) = growth_phases(k, w);
                let half = Complex64::new(0.5, 0.0);
                (ComplexMatrix2::new(half * up, up / (2.0 * I * k), half * dn, -dn / (2.0 * I * k)), s)
            }
            Basis::Linear => (ComplexMatrix2::new(0.0.into(), 1.0.into(), 1.0.into(), (-w).into()), 0.0),
        }
    }
}

/// `(e^{−iκw − s}, e^{iκw − s}, s)` with `s = Im(κ)·w`, so that the growing
/// factor of an evanescent region is carried in `s`.
fn growth_phases(kappa: Complex64, w: f64) -> (Complex64, Complex64, f64) {
    if w == 0.0 {
        return (1.0.into(), 1.0.into(), 0.0);
    }
    // κ is either real or purely imaginary
    let s = kappa.im * w;
    let (sin, cos) = (kappa.re * w).sin_cos();
    let decay = (-2.0 * s).exp();
    (Complex64::new(cos, -sin), Complex64::new(cos * decay, sin * decay), s)
}

fn check_interface(potential: &PiecewiseConstantPotential, interface: usize) -> Result<(), ScatteringError> {
    let count = potential.interface_count();
    if interface >= count {
        return Err(ScatteringError::InterfaceOutOfRange { interface, count });
    }
    Ok(())
}

/// Width carried by the left region of an interface: zero for the left lead
/// (its origin is the interface itself), the region width otherwise.
fn left_offset(potential: &PiecewiseConstantPotential, interface: usize) -> f64 {
    if interface == 0 {
        0.0
    } else {
        potential.region_width(interface)
    }
}

/// Interface matrix in closed form for two exponential regions:
///
/// ```text
///           1   ⎡ (κl+κr)·e^{−iκl w}   (κl−κr)·e^{−iκl w} ⎤
///  M  =  ────── ⎢                                        ⎥
///         2 κl  ⎣ (κl−κr)·e^{ iκl w}   (κl+κr)·e^{ iκl w} ⎦
/// ```
///
/// where `w` is the offset of the interface from the left region's origin.
fn closed_form_matrix(kl: Complex64, kr: Complex64, w: f64) -> ScaledPauliVector {
    let (up, dn, s) = growth_phases(kl, w);
    let sum = (kl + kr) / (2.0 * kl);
    let diff = (kl - kr) / (2.0 * kl);
    let m = ComplexMatrix2::new(sum * up, diff * up, diff * dn, sum * dn);
    ScaledPauliVector::new(PauliVector::from_matrix(&m), s)
}

/// Interface matrix obtained by imposing continuity of `ψ` and `ψ′`:
/// `M = W_left(w)⁻¹ · W_right(0)`. Valid for any pair of bases.
fn continuity_matrix(left: RegionKind, w: f64, right: RegionKind) -> (ComplexMatrix2, f64) {
    let (inv, s) = left.inverse_basis_at(w);
    (inv * right.basis_at_origin(), s)
}

/// Closed-form interface matrix `M_i` for two regions away from `E = V`.
pub fn transfer_matrix(
    potential: &PiecewiseConstantPotential,
    interface: usize,
    energy: f64,
) -> Result<PauliVector, ScatteringError> {
    check_interface(potential, interface)?;
    let levels = potential.levels();
    let (vl, vr) = (levels[interface], levels[interface + 1]);
    if is_degenerate(energy, vl) || is_degenerate(energy, vr) {
        return Err(ScatteringError::DegenerateKappa { interface, energy });
    }
    let m = closed_form_matrix(
        wave_number(energy, vl),
        wave_number(energy, vr),
        left_offset(potential, interface),
    );
    Ok(m.to_vector())
}

/// Interface matrix when exactly one adjacent region has `E = V` and carries
/// the linear basis `A s + B`.
pub fn transfer_matrix_linear(
    potential: &PiecewiseConstantPotential,
    interface: usize,
    energy: f64,
) -> Result<PauliVector, ScatteringError> {
    check_interface(potential, interface)?;
    let levels = potential.levels();
    let left = RegionKind::new(energy, levels[interface]);
    let right = RegionKind::new(energy, levels[interface + 1]);
    match (left.basis, right.basis) {
        (Basis::Linear, Basis::Linear) => Err(ScatteringError::BothRegionsDegenerate { interface, energy }),
        (Basis::Exponential, Basis::Exponential) => Err(ScatteringError::NoDegenerateRegion { interface, energy }),
        _ => {
            let (m, s) = continuity_matrix(left, left_offset(potential, interface), right);
            Ok(ScaledPauliVector::new(PauliVector::from_matrix(&m), s).to_vector())
        }
    }
}

/// Interface matrix in scaled form, routed by basis: closed form for two
/// exponential regions, continuity solve otherwise (including two linear
/// regions, which only occurs for unmerged equal levels).
pub fn interface_matrix(
    potential: &PiecewiseConstantPotential,
    interface: usize,
    energy: f64,
) -> Result<ScaledPauliVector, ScatteringError> {
    check_interface(potential, interface)?;
    let levels = potential.levels();
    let left = RegionKind::new(energy, levels[interface]);
    let right = RegionKind::new(energy, levels[interface + 1]);
    Ok(interface_matrix_for(left, right, left_offset(potential, interface)))
}

fn interface_matrix_for(left: RegionKind, right: RegionKind, w: f64) -> ScaledPauliVector {
    match (left.basis, right.basis) {
        (Basis::Exponential, Basis::Exponential) => closed_form_matrix(left.kappa, right.kappa, w),
        _ => {
            let (m, s) = continuity_matrix(left, w, right);
            ScaledPauliVector::new(PauliVector::from_matrix(&m), s)
        }
    }
}

/// Wave in one region: `exp(log_scale) · (A, B)` in the region's basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionWave {
    pub kappa: Complex64,
    pub basis: Basis,
    pub origin: f64,
    pub amplitudes: [Complex64; 2],
    pub log_scale: f64,
}

impl RegionWave {
    /// `(A, B)` with the scale applied.
    pub fn amplitude_pair(&self) -> [Complex64; 2] {
        let f = self.log_scale.exp();
        [self.amplitudes[0] * f, self.amplitudes[1] * f]
    }

    fn unscaled(&self, x: f64) -> (Complex64, Complex64) {
        let s = x - self.origin;
        let [a, b] = self.amplitudes;
        match self.basis {
            Basis::Exponential => {
                let ik = I * self.kappa;
                let fwd = a * (ik * s).exp();
                let bwd = b * (-ik * s).exp();
                (fwd + bwd, ik * (fwd - bwd))
            }
            Basis::Linear => (a * s + b, a),
        }
    }

    pub fn psi(&self, x: f64) -> Complex64 {
        self.unscaled(x).0 * self.log_scale.exp()
    }

    pub fn psi_prime(&self, x: f64) -> Complex64 {
        self.unscaled(x).1 * self.log_scale.exp()
    }

    /// Probability current `Im(ψ* ψ′)`, constant inside the region.
    pub fn current(&self) -> f64 {
        let (v, d) = self.unscaled(self.origin);
        (v.conj() * d).im * (2.0 * self.log_scale).exp()
    }

    /// `κ(|A|² − |B|²)` for a propagating region, `None` otherwise.
    pub fn flux(&self) -> Option<f64> {
        if self.basis != Basis::Exponential || self.kappa.im != 0.0 {
            return None;
        }
        let [a, b] = self.amplitude_pair();
        Some(self.kappa.re * (a.norm_sqr() - b.norm_sqr()))
    }
}

/// Stationary scattering state at one energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringSolution {
    pub energy: f64,
    pub incidence: Incidence,
    pub potential: PiecewiseConstantPotential,
    pub regions: Vec<RegionWave>,
    pub transmission: f64,
    pub ln_transmission: f64,
    pub reflection: f64,
    /// Log-magnitude carried by the full chain product.
    pub chain_log_scale: f64,
}

impl ScatteringSolution {
    pub fn region_wave(&self, x: f64) -> &RegionWave {
        &self.regions[self.potential.region_of(x)]
    }
}

/// Evaluates `ψ` at each position; points on a breakpoint use the left region.
pub fn wavefunction(solution: &ScatteringSolution, xs: &[f64]) -> Vec<Complex64> {
    xs.iter().map(|&x| solution.region_wave(x).psi(x)).collect()
}

/// Transmission, its logarithm and reflection at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmission {
    pub t: f64,
    pub ln_t: f64,
    pub r: f64,
}

impl Transmission {
    /// From the (1,1) and (2,1) entries of the chain product for left incidence.
    fn from_left_chain(chain: &ScaledPauliVector) -> Self {
        let a1 = chain.vector.upper_left();
        let b1 = chain.vector.lower_left();
        let ln_t = -2.0 * (a1.norm().ln() + chain.log_scale);
        Self { t: ln_t.exp(), ln_t, r: (b1 / a1).norm_sqr() }
    }
}

fn check_energy(potential: &PiecewiseConstantPotential, energy: f64, incidence: Incidence) -> Result<(), ScatteringError> {
    if !energy.is_finite() {
        return Err(ScatteringError::NonFiniteEnergy(energy));
    }
    let levels = potential.levels();
    let (left, right) = (levels[0], levels[levels.len() - 1]);
    if left != right {
        return Err(ScatteringError::UnequalLeads { left, right });
    }
    let lead = match incidence {
        Incidence::Left => left,
        Incidence::Right => right,
    };
    if energy <= lead || is_degenerate(energy, lead) {
        return Err(ScatteringError::EvanescentLead { energy, level: lead });
    }
    Ok(())
}

fn region_kinds(potential: &PiecewiseConstantPotential, energy: f64) -> Vec<RegionKind> {
    potential.levels().iter().map(|&v| RegionKind::new(energy, v)).collect()
}

fn interface_matrices(potential: &PiecewiseConstantPotential, kinds: &[RegionKind]) -> Vec<ScaledPauliVector> {
    (0..potential.interface_count())
        .map(|i| {
            let mut m = interface_matrix_for(kinds[i], kinds[i + 1], left_offset(potential, i));
            m.normalize();
            m
        })
        .collect()
}

/// Transmission for left incidence from a single left fold of the
/// interface chain; no wave function is assembled.
pub fn transmission(potential: &PiecewiseConstantPotential, energy: f64) -> Result<Transmission, ScatteringError> {
    check_energy(potential, energy, Incidence::Left)?;
    let levels = potential.levels();
    let mut prev = RegionKind::new(energy, levels[0]);
    let chain = fold_scaled((0..potential.interface_count()).map(|i| {
        let next = RegionKind::new(energy, levels[i + 1]);
        let m = interface_matrix_for(prev, next, left_offset(potential, i));
        prev = next;
        m
    }))?;
    Ok(Transmission::from_left_chain(&chain))
}

/// Full scattering solution. For left incidence `A_N = seed`, `B_N = 0`; for
/// right incidence `B_0 = seed`, `A_0 = 0` and the chain runs through the
/// inverted interface matrices.
pub fn solve(
    potential: &PiecewiseConstantPotential,
    energy: f64,
    incidence: Incidence,
    seed: Complex64,
) -> Result<ScatteringSolution, ScatteringError> {
    check_energy(potential, energy, incidence)?;
    let kinds = region_kinds(potential, energy);
    let mats = interface_matrices(potential, &kinds);
    let n = mats.len();

    // partial[r] is the chain mapping the seeded amplitudes onto region r
    let mut partial = vec![ScaledPauliVector::from_vector(PauliVector::IDENTITY); n + 1];
    match incidence {
        Incidence::Left => {
            for r in (0..n).rev() {
                partial[r] = mats[r].compose(&partial[r + 1]);
                if !partial[r].is_finite() {
                    return Err(PauliError::NonFiniteCoefficient { position: r }.into());
                }
            }
        }
        Incidence::Right => {
            for r in 0..n {
                let inv = mats[r].inverse().ok_or(PauliError::NonFiniteCoefficient { position: r })?;
                partial[r + 1] = inv.compose(&partial[r]);
                if !partial[r + 1].is_finite() {
                    return Err(PauliError::NonFiniteCoefficient { position: r }.into());
                }
            }
        }
    }
    for p in partial.iter_mut() {
        p.normalize();
    }

    let seed_scale = seed.norm();
    let unit_seed = if seed_scale > 0.0 { seed / seed_scale } else { seed };
    let regions = partial
        .iter()
        .enumerate()
        .map(|(r, mu)| {
            let v = mu.vector;
            let pair = match incidence {
                Incidence::Left => [v.upper_left(), v.lower_left()],
                Incidence::Right => [v.upper_right(), v.lower_right()],
            };
            RegionWave {
                kappa: kinds[r].kappa,
                basis: kinds[r].basis,
                origin: potential.region_origin(r),
                amplitudes: [pair[0] * unit_seed, pair[1] * unit_seed],
                log_scale: mu.log_scale + seed_scale.ln(),
            }
        })
        .collect();

    let (t, ln_t, r, chain_log_scale) = match incidence {
        Incidence::Left => {
            let tr = Transmission::from_left_chain(&partial[0]);
            (tr.t, tr.ln_t, tr.r, partial[0].log_scale)
        }
        Incidence::Right => {
            let g = &partial[n];
            let b_n = g.vector.lower_right();
            let a_n = g.vector.upper_right();
            let ln_t = -2.0 * (b_n.norm().ln() + g.log_scale);
            (ln_t.exp(), ln_t, (a_n / b_n).norm_sqr(), g.log_scale)
        }
    };

    Ok(ScatteringSolution {
        energy,
        incidence,
        potential: potential.clone(),
        regions,
        transmission: t,
        ln_transmission: ln_t,
        reflection: r,
        chain_log_scale,
    })
}

/// Left-incidence transmission through plain 2×2 matrix products of the
/// continuity matrices, with running max-entry normalization. Shares no code
/// with the Pauli composition path and serves as its cross-check.
pub fn transmission_direct(potential: &PiecewiseConstantPotential, energy: f64) -> Result<Transmission, ScatteringError> {
    check_energy(potential, energy, Incidence::Left)?;
    let kinds = region_kinds(potential, energy);
    let mut product = ComplexMatrix2::IDENTITY;
    let mut log_scale = 0.0;
    for i in 0..potential.interface_count() {
        let (m, s) = continuity_matrix(kinds[i], left_offset(potential, i), kinds[i + 1]);
        product = product * m;
        log_scale += s;
        let norm = product.max_abs();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(PauliError::NonFiniteCoefficient { position: i }.into());
        }
        product = product.scale((1.0 / norm).into());
        log_scale += norm.ln();
    }
    let ln_t = -2.0 * (product.m11.norm().ln() + log_scale);
    Ok(Transmission { t: ln_t.exp(), ln_t, r: (product.m21 / product.m11).norm_sqr() })
}
