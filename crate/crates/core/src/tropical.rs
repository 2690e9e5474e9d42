//! Max-plus arithmetic over exact rationals.
//!
//! The tropical semiring is `ℝ ∪ {−∞}` with `max` as addition and `+` as
//! multiplication. Scalars carry exact rationals so that every comparison
//! made by the staircase and curvature checks is decided without rounding.

use std::cmp::Ordering;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TropicalError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix rows have inconsistent lengths")]
    RaggedMatrix,
    #[error("vector has no finite entry")]
    AllNegInfinity,
    #[error("zero-length segment at vertex {0}")]
    ZeroLengthSegment(usize),
    #[error("cannot parse tropical scalar from {0:?}")]
    Parse(String),
}

/// Shorthand for an exact rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// An element of `ℝ ∪ {−∞}`.
///
/// The variant order makes the derived `Ord` place `−∞` below every finite
/// value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TropScalar {
    NegInf,
    Finite(Rational),
}

impl TropScalar {
    /// The tropical unit `0`.
    pub fn one() -> Self {
        TropScalar::Finite(Rational::zero())
    }

    /// The tropical zero `−∞`.
    pub fn zero() -> Self {
        TropScalar::NegInf
    }

    pub fn int(v: i64) -> Self {
        TropScalar::Finite(Rational::from_integer(v.into()))
    }

    pub fn frac(num: i64, den: i64) -> Self {
        TropScalar::Finite(rat(num, den))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, TropScalar::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            TropScalar::Finite(v) => Some(v),
            TropScalar::NegInf => None,
        }
    }

    /// `−∞` maps to `f64::NEG_INFINITY`.
    pub fn to_f64(&self) -> f64 {
        match self {
            TropScalar::Finite(v) => v.to_f64().unwrap_or(f64::NAN),
            TropScalar::NegInf => f64::NEG_INFINITY,
        }
    }

    /// Ordinary subtraction of a finite rational, `−∞` stays `−∞`.
    pub fn shift(&self, by: &Rational) -> Self {
        match self {
            TropScalar::Finite(v) => TropScalar::Finite(v + by),
            TropScalar::NegInf => TropScalar::NegInf,
        }
    }
}

impl From<Rational> for TropScalar {
    fn from(v: Rational) -> Self {
        TropScalar::Finite(v)
    }
}

impl fmt::Display for TropScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TropScalar::NegInf => write!(f, "-inf"),
            TropScalar::Finite(v) => write!(f, "{}", v),
        }
    }
}

impl FromStr for TropScalar {
    type Err = TropicalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "-inf" {
            return Ok(TropScalar::NegInf);
        }
        s.parse::<Rational>()
            .map(TropScalar::Finite)
            .map_err(|_| TropicalError::Parse(s.to_string()))
    }
}

/// Tropical addition `a ⊕ b = max(a, b)`.
pub fn tadd(a: &TropScalar, b: &TropScalar) -> TropScalar {
    a.max(b).clone()
}

/// Tropical multiplication `a ⊙ b = a + b`, absorbing at `−∞`.
pub fn tmul(a: &TropScalar, b: &TropScalar) -> TropScalar {
    match (a, b) {
        (TropScalar::Finite(x), TropScalar::Finite(y)) => TropScalar::Finite(x + y),
        _ => TropScalar::NegInf,
    }
}

/// An extended real used for distances, which may be `+∞`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtReal {
    Finite(Rational),
    PosInf,
}

impl ExtReal {
    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::Finite(v) => v.to_f64().unwrap_or(f64::NAN),
            ExtReal::PosInf => f64::INFINITY,
        }
    }
}

impl std::ops::Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TropVector(Vec<TropScalar>);

impl TropVector {
    pub fn new(entries: Vec<TropScalar>) -> Self {
        TropVector(entries)
    }

    pub fn neg_inf(len: usize) -> Self {
        TropVector(vec![TropScalar::NegInf; len])
    }

    pub fn from_ints(values: &[i64]) -> Self {
        TropVector(values.iter().map(|&v| TropScalar::int(v)).collect())
    }

    pub fn from_rationals(values: impl IntoIterator<Item = Rational>) -> Self {
        TropVector(values.into_iter().map(TropScalar::Finite).collect())
    }

    /// Unit vector `e_k`: `0` at `k`, `−∞` elsewhere.
    pub fn unit(len: usize, k: usize) -> Self {
        let mut v = Self::neg_inf(len);
        v.0[k] = TropScalar::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[TropScalar] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TropScalar> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<TropScalar> {
        self.0
    }

    pub fn set(&mut self, k: usize, value: TropScalar) {
        self.0[k] = value;
    }

    /// Largest entry, `−∞` for an empty vector.
    pub fn max_entry(&self) -> TropScalar {
        self.0.iter().max().cloned().unwrap_or(TropScalar::NegInf)
    }

    /// Indices attaining the maximum.
    pub fn argmax(&self) -> Vec<usize> {
        let m = self.max_entry();
        self.0
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == m)
            .map(|(i, _)| i)
            .collect()
    }

    /// Entrywise tropical sum `x ⊕ y`.
    pub fn tadd(&self, other: &TropVector) -> Result<TropVector, TropicalError> {
        check_len(self.len(), other.len())?;
        Ok(TropVector(
            self.0.iter().zip(&other.0).map(|(a, b)| tadd(a, b)).collect(),
        ))
    }

    /// Tropical scaling `λ ⊙ x`.
    pub fn scale(&self, lambda: &TropScalar) -> TropVector {
        TropVector(self.0.iter().map(|a| tmul(a, lambda)).collect())
    }

    /// Tropical inner product `⊕_j (x_j ⊙ y_j)`.
    pub fn dot(&self, other: &TropVector) -> Result<TropScalar, TropicalError> {
        check_len(self.len(), other.len())?;
        Ok(self
            .0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| tmul(a, b))
            .max()
            .unwrap_or(TropScalar::NegInf))
    }

    /// Componentwise order `x ≤ y`.
    pub fn le(&self, other: &TropVector) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(TropScalar::to_f64).collect()
    }
}

impl Index<usize> for TropVector {
    type Output = TropScalar;

    fn index(&self, i: usize) -> &TropScalar {
        &self.0[i]
    }
}

impl FromIterator<TropScalar> for TropVector {
    fn from_iter<I: IntoIterator<Item = TropScalar>>(iter: I) -> Self {
        TropVector(iter.into_iter().collect())
    }
}

fn check_len(expected: usize, actual: usize) -> Result<(), TropicalError> {
    if expected == actual {
        Ok(())
    } else {
        Err(TropicalError::DimensionMismatch { expected, actual })
    }
}

/// Dense tropical matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropMatrix {
    rows: usize,
    cols: usize,
    data: Vec<TropScalar>,
}

impl TropMatrix {
    pub fn from_rows(rows: Vec<Vec<TropScalar>>) -> Result<Self, TropicalError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(TropicalError::RaggedMatrix);
        }
        Ok(TropMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn neg_inf(rows: usize, cols: usize) -> Self {
        TropMatrix {
            rows,
            cols,
            data: vec![TropScalar::NegInf; rows * cols],
        }
    }

    /// `0` on the diagonal and `−∞` elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::neg_inf(n, n);
        for i in 0..n {
            m.set(i, i, TropScalar::one());
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &TropScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: TropScalar) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[TropScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Appends a row; the length must match the column count.
    pub fn push_row(&mut self, row: Vec<TropScalar>) -> Result<(), TropicalError> {
        if self.rows > 0 || self.cols > 0 {
            check_len(self.cols, row.len())?;
        } else {
            self.cols = row.len();
        }
        self.data.extend(row);
        self.rows += 1;
        Ok(())
    }
}

/// `(M ⊙ x)_i = max_j (M_ij + x_j)`.
pub fn tmatvec(m: &TropMatrix, x: &TropVector) -> Result<TropVector, TropicalError> {
    check_len(m.ncols(), x.len())?;
    Ok((0..m.nrows())
        .map(|i| row_dot(m.row(i), x.entries()))
        .collect())
}

pub(crate) fn row_dot(row: &[TropScalar], x: &[TropScalar]) -> TropScalar {
    row.iter()
        .zip(x)
        .map(|(a, b)| tmul(a, b))
        .max()
        .unwrap_or(TropScalar::NegInf)
}

/// Tropical Funk hemi-metric `δ_F(x, y) = max(0, max_k (y_k − x_k))`, with
/// `−∞ + ∞ = +∞`.
pub fn funk(x: &TropVector, y: &TropVector) -> Result<ExtReal, TropicalError> {
    check_len(x.len(), y.len())?;
    let mut best = Rational::zero();
    for (a, b) in x.iter().zip(y.iter()) {
        match (a, b) {
            (_, TropScalar::NegInf) => {}
            (TropScalar::NegInf, TropScalar::Finite(_)) => return Ok(ExtReal::PosInf),
            (TropScalar::Finite(a), TropScalar::Finite(b)) => {
                let d = b - a;
                if d > best {
                    best = d;
                }
            }
        }
    }
    Ok(ExtReal::Finite(best))
}

/// Symmetrised Funk distance, an affine form of Hilbert's projective metric.
pub fn hilbert(x: &TropVector, y: &TropVector) -> Result<ExtReal, TropicalError> {
    Ok(funk(x, y)? + funk(y, x)?)
}

/// The tropical angle `∠^c U V W`, which is either `0` or a right angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TropAngle {
    Zero,
    Right,
}

impl TropAngle {
    pub fn radians(self) -> f64 {
        match self {
            TropAngle::Zero => 0.0,
            TropAngle::Right => FRAC_PI_2,
        }
    }
}

/// Right angle iff `max U < max V < max W` and the argmax sets of `V` and
/// `W` are disjoint.
pub fn trop_angle(
    u: &TropVector,
    v: &TropVector,
    w: &TropVector,
) -> Result<TropAngle, TropicalError> {
    check_len(u.len(), v.len())?;
    check_len(u.len(), w.len())?;
    let (mu, mv, mw) = (u.max_entry(), v.max_entry(), w.max_entry());
    if !mu.is_finite() || !mv.is_finite() || !mw.is_finite() {
        return Err(TropicalError::AllNegInfinity);
    }
    if !(mu < mv && mv < mw) {
        return Ok(TropAngle::Zero);
    }
    let av = v.argmax();
    let aw = w.argmax();
    if av.iter().any(|i| aw.contains(i)) {
        Ok(TropAngle::Zero)
    } else {
        Ok(TropAngle::Right)
    }
}

/// Turning angle at `V` of the polygonal path `U → V → W`, in `[0, π]`.
pub fn euclid_angle(u: &[f64], v: &[f64], w: &[f64]) -> Result<f64, TropicalError> {
    check_len(u.len(), v.len())?;
    check_len(u.len(), w.len())?;
    let a: Vec<f64> = v.iter().zip(u).map(|(p, q)| p - q).collect();
    let b: Vec<f64> = w.iter().zip(v).map(|(p, q)| p - q).collect();
    let na = norm(&a);
    let nb = norm(&b);
    if na == 0.0 {
        return Err(TropicalError::ZeroLengthSegment(0));
    }
    if nb == 0.0 {
        return Err(TropicalError::ZeroLengthSegment(1));
    }
    // Normalise before the inner product so that large coordinates do not overflow.
    let cos: f64 = a
        .iter()
        .zip(&b)
        .map(|(p, q)| (p / na) * (q / nb))
        .sum::<f64>()
        .clamp(-1.0, 1.0);
    if cos <= 0.0 {
        return Ok(cos.acos());
    }
    // Small turns: the chord between unit vectors resolves the angle better.
    let chord: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p / na - q / nb).collect();
    Ok(2.0 * (norm(&chord) / 2.0).min(1.0).asin())
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    scale * v.iter().map(|x| (x / scale).powi(2)).sum::<f64>().sqrt()
}

impl PartialOrd<Rational> for TropScalar {
    fn partial_cmp(&self, other: &Rational) -> Option<Ordering> {
        Some(match self {
            TropScalar::NegInf => Ordering::Less,
            TropScalar::Finite(v) => v.cmp(other),
        })
    }
}

impl PartialEq<Rational> for TropScalar {
    fn eq(&self, other: &Rational) -> bool {
        matches!(self, TropScalar::Finite(v) if v == other)
    }
}
