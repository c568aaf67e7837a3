//! Pauli-basis algebra for 2×2 complex matrices.
//!
//! Every 2×2 complex matrix is written as `c0·σ0 + c1·σ1 + c2·σ2 + c3·σ3`.
//! Products are formed directly on the coefficient vectors through the index
//! maps [`phi`] and [`epsilon`], so a chain of matrices is reduced by a left
//! fold of pairwise compositions at linear cost.

use num_complex::Complex64;
use std::ops::{Index, Mul};
use thiserror::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Accumulated coefficients are renormalized once their largest magnitude
/// leaves `[2^-512, 2^512]`.
const RENORM_HI: f64 = 1.340_780_792_994_259_7e154; // 2^512
const RENORM_LO: f64 = 7.458_340_731_200_207e-155; // 2^-512

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error("matrix chain is empty")]
    EmptyChain,
    #[error("non-finite coefficient encountered at chain position {position}")]
    NonFiniteCoefficient { position: usize },
    #[error("chain of length {len} exceeds the explicit-sum limit of {max_len}")]
    ChainTooLong { len: usize, max_len: usize },
}

/// Index of the basis element paired with `b` so that `σ_b σ_phi(a,b) ∝ σ_a`.
///
/// `(a + b·(-1)^(a+b-1)) mod 4`, taken as the nonnegative residue.
pub const fn phi(a: usize, b: usize) -> usize {
    let (a, b) = (a as i64, b as i64);
    // (-1)^(a+b-1) is -1 when a+b is even
    let sign = if (a + b) % 2 == 0 { -1 } else { 1 };
    (a + b * sign).rem_euclid(4) as usize
}

/// `½(a-b)(b-c)(c-a)` in exact integer arithmetic.
///
/// Every triple `(p, q, phi(p, q))` yields an even product, so the halving is exact there.
pub const fn epsilon(a: usize, b: usize, c: usize) -> i64 {
    let (a, b, c) = (a as i64, b as i64, c as i64);
    (a - b) * (b - c) * (c - a) / 2
}

/// `i^e` for any integer exponent.
pub const fn i_pow(e: i64) -> Complex64 {
    match e.rem_euclid(4) {
        0 => ONE,
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// For each output index `p` and summation index `q`: the partner index
/// `phi(p, q)` and the phase `i^epsilon(p, q, phi(p, q))`.
const COMPOSE_TABLE: [[(usize, Complex64); 4]; 4] = {
    let mut table = [[(0usize, ONE); 4]; 4];
    let mut p = 0;
    while p < 4 {
        let mut q = 0;
        while q < 4 {
            let r = phi(p, q);
            table[p][q] = (r, i_pow(epsilon(p, q, r)));
            q += 1;
        }
        p += 1;
    }
    table
};

/// Plain 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMatrix2 {
    pub m11: Complex64,
    pub m12: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
}

impl ComplexMatrix2 {
    pub const IDENTITY: Self = Self::new(ONE, ZERO, ZERO, ONE);

    pub const fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    /// The basis matrix `σ_p`.
    pub fn sigma(p: usize) -> Self {
        match p {
            0 => Self::IDENTITY,
            1 => Self::new(ZERO, ONE, ONE, ZERO),
            2 => Self::new(ZERO, -I, I, ZERO),
            3 => Self::new(ONE, ZERO, ZERO, -ONE),
            _ => panic!("Pauli index {p} out of range"),
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> Complex64 {
        self.m11 + self.m22
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.determinant();
        if det == ZERO || !det.is_finite() {
            return None;
        }
        Some(Self::new(self.m22 / det, -self.m12 / det, -self.m21 / det, self.m11 / det))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.m11 * factor, self.m12 * factor, self.m21 * factor, self.m22 * factor)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [self.m11 * v[0] + self.m12 * v[1], self.m21 * v[0] + self.m22 * v[1]]
    }

    pub fn max_abs(&self) -> f64 {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.m11.is_finite() && self.m12.is_finite() && self.m21.is_finite() && self.m22.is_finite()
    }
}

impl Mul for ComplexMatrix2 {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.m11 * rhs.m11 + self.m12 * rhs.m21,
            self.m11 * rhs.m12 + self.m12 * rhs.m22,
            self.m21 * rhs.m11 + self.m22 * rhs.m21,
            self.m21 * rhs.m12 + self.m22 * rhs.m22,
        )
    }
}

/// Coefficients of a 2×2 complex matrix in the basis `{σ0, σ1, σ2, σ3}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliVector {
    pub c: [Complex64; 4],
}

impl Index<usize> for PauliVector {
    type Output = Complex64;

    fn index(&self, p: usize) -> &Complex64 {
        &self.c[p]
    }
}

impl PauliVector {
    pub const IDENTITY: Self = Self { c: [ONE, ZERO, ZERO, ZERO] };
    pub const ZERO: Self = Self { c: [ZERO; 4] };

    pub const fn new(c0: Complex64, c1: Complex64, c2: Complex64, c3: Complex64) -> Self {
        Self { c: [c0, c1, c2, c3] }
    }

    /// `c_p = ½ trace(M σ_p)`.
    pub fn from_matrix(m: &ComplexMatrix2) -> Self {
        Self::new(
            0.5 * (m.m11 + m.m22),
            0.5 * (m.m12 + m.m21),
            0.5 * I * (m.m12 - m.m21),
            0.5 * (m.m11 - m.m22),
        )
    }

    pub fn to_matrix(&self) -> ComplexMatrix2 {
        let [c0, c1, c2, c3] = self.c;
        ComplexMatrix2::new(c0 + c3, c1 - I * c2, c1 + I * c2, c0 - c3)
    }

    /// Product `self · rhs` by the pairwise composition law:
    /// `(jk)_p = Σ_q j_q · k_phi(p,q) · i^epsilon(p, q, phi(p,q))`.
    pub fn compose(&self, rhs: &Self) -> Self {
        let mut out = [ZERO; 4];
        for (p, slot) in out.iter_mut().enumerate() {
            let row = &COMPOSE_TABLE[p];
            let mut acc = ZERO;
            for (q, &(r, phase)) in row.iter().enumerate() {
                acc += self.c[q] * rhs.c[r] * phase;
            }
            *slot = acc;
        }
        Self { c: out }
    }

    /// `c0² − c1² − c2² − c3²`, the determinant of the represented matrix.
    pub fn determinant(&self) -> Complex64 {
        let [c0, c1, c2, c3] = self.c;
        c0 * c0 - c1 * c1 - c2 * c2 - c3 * c3
    }

    /// `(c0, −c1, −c2, −c3) / det`.
    pub fn inverse(&self) -> Option<Self> {
        let det = self.determinant();
        if det == ZERO || !det.is_finite() {
            return None;
        }
        let [c0, c1, c2, c3] = self.c;
        Some(Self::new(c0 / det, -c1 / det, -c2 / det, -c3 / det))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { c: self.c.map(|z| z * factor) }
    }

    pub fn max_abs(&self) -> f64 {
        let c = self.max_component();
        if c == 0.0 || !c.is_finite() {
            return c;
        }
        // scaled so the squares cannot overflow or underflow
        let inv = 1.0 / c;
        c * self.c.iter().map(|z| (z * inv).norm_sqr()).fold(0.0, f64::max).sqrt()
    }

    /// Largest real or imaginary part in magnitude; within `√2` of [`Self::max_abs`].
    fn max_component(&self) -> f64 {
        self.c.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(|z| z.is_finite())
    }

    /// Entry (1,1) of the matrix, `c0 + c3`.
    pub fn upper_left(&self) -> Complex64 {
        self.c[0] + self.c[3]
    }

    /// Entry (2,1) of the matrix, `c1 + i c2`.
    pub fn lower_left(&self) -> Complex64 {
        self.c[1] + I * self.c[2]
    }

    /// Entry (1,2) of the matrix, `c1 − i c2`.
    pub fn upper_right(&self) -> Complex64 {
        self.c[1] - I * self.c[2]
    }

    /// Entry (2,2) of the matrix, `c0 − c3`.
    pub fn lower_right(&self) -> Complex64 {
        self.c[0] - self.c[3]
    }
}

/// Free-function form of [`PauliVector::compose`].
pub fn compose(j: &PauliVector, k: &PauliVector) -> PauliVector {
    j.compose(k)
}

/// `x · 2^k` without intermediate overflow for `|k|` past the exponent range.
pub(crate) fn ldexp(mut x: f64, mut k: i64) -> f64 {
    if (-1022..=1023).contains(&k) {
        return x * f64::from_bits(((k + 1023) as u64) << 52);
    }
    while k != 0 {
        let step = k.clamp(-1000, 1000);
        x *= 2f64.powi(step as i32);
        k -= step;
    }
    x
}

/// `floor(log2(x))` for finite positive `x`, including subnormals.
fn log2_floor(x: f64) -> i64 {
    let biased = ((x.to_bits() >> 52) & 0x7ff) as i64;
    if biased == 0 {
        x.log2().floor() as i64
    } else {
        biased - 1023
    }
}

/// A Pauli vector carried with an external magnitude: the represented matrix
/// is `exp(log_scale) · vector`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPauliVector {
    pub vector: PauliVector,
    pub log_scale: f64,
}

impl ScaledPauliVector {
    pub fn new(vector: PauliVector, log_scale: f64) -> Self {
        Self { vector, log_scale }
    }

    /// Wraps `vector` and normalizes it.
    pub fn from_vector(vector: PauliVector) -> Self {
        let mut s = Self::new(vector, 0.0);
        s.normalize();
        s
    }

    /// Rescales by a power of two so the largest coefficient magnitude lies in
    /// `[1, 2)`. The zero vector and non-finite vectors are left untouched.
    pub fn normalize(&mut self) {
        let m = self.vector.max_abs();
        if m == 0.0 || !m.is_finite() {
            return;
        }
        let e = log2_floor(m);
        if e != 0 {
            self.vector = PauliVector { c: self.vector.c.map(|z| Complex64::new(ldexp(z.re, -e), ldexp(z.im, -e))) };
            self.log_scale += e as f64 * std::f64::consts::LN_2;
        }
    }

    fn renormalize_if_needed(&mut self) {
        let m = self.vector.max_component();
        if !(RENORM_LO..=RENORM_HI).contains(&m) {
            self.normalize();
        }
    }

    /// `self · rhs` with scales added.
    pub fn compose(&self, rhs: &Self) -> Self {
        let mut out = Self::new(self.vector.compose(&rhs.vector), self.log_scale + rhs.log_scale);
        out.renormalize_if_needed();
        out
    }

    pub fn inverse(&self) -> Option<Self> {
        self.vector.inverse().map(|v| {
            let mut s = Self::new(v, -self.log_scale);
            s.normalize();
            s
        })
    }

    /// The represented vector with the scale applied; may overflow to infinity.
    pub fn to_vector(&self) -> PauliVector {
        self.vector.scale(self.log_scale.exp())
    }

    pub fn is_finite(&self) -> bool {
        self.vector.is_finite() && self.log_scale.is_finite()
    }
}

/// Ordered product `chain[0] · chain[1] · … · chain[n-1]` by left fold.
pub fn fold_chain(chain: &[PauliVector]) -> Result<ScaledPauliVector, PauliError> {
    fold_scaled(chain.iter().map(|v| ScaledPauliVector::from_vector(*v)))
}

/// Left fold of already-scaled factors. Every factor is normalized before it
/// is composed so that coefficient growth is carried entirely by `log_scale`.
pub fn fold_scaled<I>(chain: I) -> Result<ScaledPauliVector, PauliError>
where
    I: IntoIterator<Item = ScaledPauliVector>,
{
    let mut iter = chain.into_iter();
    let mut acc = iter.next().ok_or(PauliError::EmptyChain)?;
    acc.normalize();
    if !acc.is_finite() {
        return Err(PauliError::NonFiniteCoefficient { position: 0 });
    }
    for (position, mut factor) in iter.enumerate().map(|(i, f)| (i + 1, f)) {
        factor.normalize();
        acc = acc.compose(&factor);
        if !acc.is_finite() {
            return Err(PauliError::NonFiniteCoefficient { position });
        }
    }
    acc.normalize();
    Ok(acc)
}

/// Default upper bound on chain length for [`explicit_product`].
pub const EXPLICIT_PRODUCT_MAX_LEN: usize = 8;

/// Evaluates the nested multi-sum for a chain product term by term:
/// for output index `p`, sums over every index path `q_1 … q_{m-1}` (with
/// `q_0 = 0`) the product of `c_j^{phi(q_j, q_{j-1})} · i^epsilon(…)` and
/// the closing factor of the last matrix. Costs `4^(m-1)` terms per output.
pub fn explicit_product(chain: &[PauliVector], max_len: usize) -> Result<PauliVector, PauliError> {
    let m = chain.len();
    if m == 0 {
        return Err(PauliError::EmptyChain);
    }
    if m > max_len {
        return Err(PauliError::ChainTooLong { len: m, max_len });
    }
    let link = |vector: &PauliVector, outer: usize, inner: usize| {
        let r = phi(outer, inner);
        vector[r] * i_pow(epsilon(outer, inner, r))
    };

    let mut out = [ZERO; 4];
    let mut path = vec![0usize; m - 1]; // q_1 … q_{m-1}
    for (p, slot) in out.iter_mut().enumerate() {
        path.iter_mut().for_each(|q| *q = 0);
        let mut sum = ZERO;
        loop {
            let mut term = ONE;
            let mut prev = 0usize;
            for (j, &q) in path.iter().enumerate() {
                term *= link(&chain[j], q, prev);
                prev = q;
            }
            term *= link(&chain[m - 1], p, prev);
            sum += term;

            // odometer over the path indices
            let mut k = 0;
            while k < path.len() {
                path[k] += 1;
                if path[k] < 4 {
                    break;
                }
                path[k] = 0;
                k += 1;
            }
            if k == path.len() {
                break;
            }
        }
        *slot = sum;
    }
    Ok(PauliVector { c: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi(1, 2), 3);
        assert_eq!(phi(1, 3), 2);
        for p in 0..4 {
            assert_eq!(phi(p, p), 0);
            assert_eq!(phi(p, 0), p);
        }
    }

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(1, 2, 3), 1);
        assert_eq!(epsilon(1, 3, 2), -1);
        for p in 0..4 {
            for q in 0..4 {
                assert_eq!(epsilon(p, p, q), 0);
            }
        }
    }

    #[test]
    fn sigma1_sigma2_is_i_sigma3() {
        let x = PauliVector::new(ZERO, ONE, ZERO, ZERO);
        let y = PauliVector::new(ZERO, ZERO, ONE, ZERO);
        assert_eq!(compose(&x, &y), PauliVector::new(ZERO, ZERO, ZERO, I));
    }

    #[test]
    fn identity_is_neutral() {
        let x = PauliVector::new(c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.1), c(0.0, 4.0));
        assert_eq!(compose(&x, &PauliVector::IDENTITY), x);
        assert_eq!(compose(&PauliVector::IDENTITY, &x), x);
    }

    #[test]
    fn matrix_round_trip_on_basis() {
        for p in 0..4 {
            let v = PauliVector::from_matrix(&ComplexMatrix2::sigma(p));
            for q in 0..4 {
                let expect = if p == q { ONE } else { ZERO };
                assert_eq!(v[q], expect, "sigma_{p} coefficient {q}");
            }
            assert_eq!(v.to_matrix(), ComplexMatrix2::sigma(p));
        }
    }

    #[test]
    fn determinant_matches_matrix() {
        let v = PauliVector::new(c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.1), c(0.0, 4.0));
        let d = v.determinant() - v.to_matrix().determinant();
        assert!(d.norm() < 1e-13);
    }

    #[test]
    fn fold_single_element_absorbs_magnitude() {
        let v = PauliVector::new(c(3e20, 0.0), c(0.0, 1e19), ZERO, c(-2e20, 0.0));
        let s = fold_chain(&[v]).unwrap();
        let m = s.vector.max_abs();
        assert!((1.0..2.0).contains(&m));
        let back = s.to_vector();
        for p in 0..4 {
            assert!((back[p] - v[p]).norm() <= 1e-14 * v.max_abs());
        }
    }

    #[test]
    fn fold_rejects_empty_and_non_finite() {
        assert_eq!(fold_chain(&[]), Err(PauliError::EmptyChain));
        let bad = PauliVector::new(c(f64::NAN, 0.0), ZERO, ZERO, ZERO);
        assert!(matches!(
            fold_chain(&[PauliVector::IDENTITY, bad]),
            Err(PauliError::NonFiniteCoefficient { .. })
        ));
    }

    #[test]
    fn fold_survives_extreme_magnitudes() {
        let big = PauliVector::new(c(1e300, 0.0), ZERO, ZERO, c(5e299, 0.0));
        let s = fold_chain(&vec![big; 50]).unwrap();
        assert!(s.is_finite());
        // (1.5e300)^50 on the upper-left entry
        let expect = 50.0 * (1.5e300f64).ln();
        assert!((s.log_scale + s.vector.upper_left().norm().ln() - expect).abs() < 1e-9);

        let tiny = PauliVector::new(c(1e-300, 0.0), ZERO, ZERO, ZERO);
        let s = fold_chain(&vec![tiny; 50]).unwrap();
        assert!((s.log_scale + s.vector[0].norm().ln() - 50.0 * (1e-300f64).ln()).abs() < 1e-9);
    }

    #[test]
    fn max_abs_does_not_overflow_or_underflow() {
        let big = PauliVector::new(c(3e300, 4e300), ZERO, c(1e300, 0.0), ZERO);
        assert!((big.max_abs() / 5e300 - 1.0).abs() < 1e-15);
        let tiny = PauliVector::new(ZERO, c(3e-300, -4e-300), ZERO, ZERO);
        assert!((tiny.max_abs() / 5e-300 - 1.0).abs() < 1e-15);

        let mut s = ScaledPauliVector::new(big, 0.0);
        s.normalize();
        let m = s.vector.max_abs();
        assert!((1.0..2.0).contains(&m));
        assert!((s.log_scale + m.ln() - (5e300f64).ln()).abs() < 1e-12);
    }

    #[test]
    fn explicit_product_small_cases() {
        let a = PauliVector::new(c(0.3, -1.0), c(2.0, 0.5), c(-0.7, 0.1), c(0.0, 4.0));
        let b = PauliVector::new(c(1.0, 1.0), c(-0.5, 0.0), c(0.2, 0.9), c(1.5, -0.3));
        assert_eq!(explicit_product(&[a], 8).unwrap(), a);
        let two = explicit_product(&[a, b], 8).unwrap();
        let pair = compose(&a, &b);
        for p in 0..4 {
            assert!((two[p] - pair[p]).norm() <= 1e-14 * pair.max_abs());
        }
        assert_eq!(
            explicit_product(&[a; 9], 8),
            Err(PauliError::ChainTooLong { len: 9, max_len: 8 })
        );
        assert_eq!(explicit_product(&[], 8), Err(PauliError::EmptyChain));
    }

    #[test]
    fn ldexp_spans_subnormals() {
        assert_eq!(ldexp(1.0, -1074), f64::from_bits(1));
        assert_eq!(ldexp(f64::from_bits(1), 1074), 1.0);
        assert_eq!(log2_floor(f64::from_bits(1)), -1074);
        assert_eq!(log2_floor(3.0), 1);
    }
}
