//! Finite generalized Puiseux polynomials `Σ c·t^α` with rational exponents.
//!
//! These stand in for germs of functions of a large real parameter `t`. The
//! ordering is the ordering of germs at `t → +∞`, which for a finite sum is
//! decided by the sign of the leading coefficient. Exponents are restricted
//! to rationals; every instance built by this crate has dyadic exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::tropical::TropScalar;
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PuiseuxError {
    #[error("evaluation requires t > 0, got {0}")]
    NonPositiveParameter(f64),
    #[error("evaluation overflowed f64 at t = {0}")]
    Overflow(f64),
    #[error("valuation homomorphism check needs ultimately nonnegative operands")]
    NegativeOperand,
    #[error("matrix rows have inconsistent lengths")]
    RaggedMatrix,
}

/// A finite sum of monomials, kept in canonical form: strictly decreasing
/// exponents and no zero coefficients. The zero element has no terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PuiseuxPoly {
    terms: Vec<(Rational, Rational)>,
}

/// Sign and natural logarithm of the magnitude of a real number, used to
/// evaluate values outside the range of `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledReal {
    pub sign: i8,
    pub ln_abs: f64,
}

impl ScaledReal {
    /// Logarithm of the magnitude in base `t`.
    pub fn log_base(&self, t: f64) -> f64 {
        self.ln_abs / t.ln()
    }

    pub fn to_f64(&self) -> Option<f64> {
        if self.sign == 0 {
            return Some(0.0);
        }
        let v = self.ln_abs.exp();
        v.is_finite().then_some(f64::from(self.sign) * v)
    }
}

impl PuiseuxPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, Rational::zero())
    }

    /// `c · t^exponent`.
    pub fn monomial(c: Rational, exponent: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            PuiseuxPoly {
                terms: vec![(exponent, c)],
            }
        }
    }

    /// `t^exponent`.
    pub fn t_pow(exponent: Rational) -> Self {
        Self::monomial(Rational::one(), exponent)
    }

    /// The parameter `t` itself.
    pub fn t() -> Self {
        Self::t_pow(Rational::one())
    }

    /// Builds a canonical polynomial from arbitrary `(exponent, coefficient)`
    /// pairs, merging duplicates and dropping zeros.
    pub fn from_terms(terms: impl IntoIterator<Item = (Rational, Rational)>) -> Self {
        let mut acc: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (e, c) in terms {
            *acc.entry(e).or_insert_with(Rational::zero) += c;
        }
        PuiseuxPoly {
            terms: acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Terms as `(exponent, coefficient)`, exponents strictly decreasing.
    pub fn terms(&self) -> &[(Rational, Rational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Leading exponent, `−∞` for zero.
    pub fn val(&self) -> TropScalar {
        match self.terms.first() {
            Some((e, _)) => TropScalar::Finite(e.clone()),
            None => TropScalar::NegInf,
        }
    }

    /// Sign of `f(t)` for all large `t`.
    pub fn sign_ultimate(&self) -> i8 {
        match self.terms.first() {
            Some((_, c)) if c.is_positive() => 1,
            Some(_) => -1,
            None => 0,
        }
    }

    pub fn leading_coefficient(&self) -> Option<&Rational> {
        self.terms.first().map(|(_, c)| c)
    }

    pub fn abs(&self) -> Self {
        if self.sign_ultimate() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        PuiseuxPoly {
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    /// `Σ c·t^α` in `f64`, failing rather than returning an infinity.
    pub fn eval(&self, t: f64) -> Result<f64, PuiseuxError> {
        if !(t > 0.0) {
            return Err(PuiseuxError::NonPositiveParameter(t));
        }
        let mut sum = 0.0;
        for (e, c) in &self.terms {
            let term = c.to_f64().unwrap_or(f64::NAN) * t.powf(e.to_f64().unwrap_or(f64::NAN));
            if !term.is_finite() {
                return Err(PuiseuxError::Overflow(t));
            }
            sum += term;
        }
        if sum.is_finite() {
            Ok(sum)
        } else {
            Err(PuiseuxError::Overflow(t))
        }
    }

    /// Extended-range evaluation: factors out the leading monomial so that
    /// the result is returned as sign and log-magnitude and never overflows.
    pub fn eval_scaled(&self, t: f64) -> Result<ScaledReal, PuiseuxError> {
        if !(t > 0.0) {
            return Err(PuiseuxError::NonPositiveParameter(t));
        }
        let Some((e0, c0)) = self.terms.first() else {
            return Ok(ScaledReal {
                sign: 0,
                ln_abs: f64::NEG_INFINITY,
            });
        };
        let ln_t = t.ln();
        let mut rest = 0.0;
        for (e, c) in &self.terms {
            let ratio = (c / c0).to_f64().unwrap_or(f64::NAN);
            let de = (e - e0).to_f64().unwrap_or(f64::NAN);
            rest += ratio * (de * ln_t).exp();
        }
        if rest == 0.0 {
            return Ok(ScaledReal {
                sign: 0,
                ln_abs: f64::NEG_INFINITY,
            });
        }
        let lead_sign: i8 = if c0.is_positive() { 1 } else { -1 };
        let sign = if rest > 0.0 { lead_sign } else { -lead_sign };
        let c0_abs = c0.abs().to_f64().unwrap_or(f64::NAN);
        Ok(ScaledReal {
            sign,
            ln_abs: c0_abs.ln() + e0.to_f64().unwrap_or(f64::NAN) * ln_t + rest.abs().ln(),
        })
    }
}

/// Checks `val(f + g) = max(val f, val g)` and `val(f g) = val f + val g`.
pub fn val_homomorphism_check(f: &PuiseuxPoly, g: &PuiseuxPoly) -> Result<bool, PuiseuxError> {
    if f.sign_ultimate() < 0 || g.sign_ultimate() < 0 {
        return Err(PuiseuxError::NegativeOperand);
    }
    let sum_ok = (f + g).val() == f.val().max(g.val());
    let prod_ok = (f * g).val() == crate::tropical::tmul(&f.val(), &g.val());
    Ok(sum_ok && prod_ok)
}

fn merge(a: &PuiseuxPoly, b: &PuiseuxPoly, negate_b: bool) -> PuiseuxPoly {
    let mut out = Vec::with_capacity(a.terms.len() + b.terms.len());
    let (mut i, mut j) = (0, 0);
    let sb = |c: &Rational| if negate_b { -c } else { c.clone() };
    while i < a.terms.len() || j < b.terms.len() {
        match (a.terms.get(i), b.terms.get(j)) {
            (Some((ea, ca)), Some((eb, cb))) if ea == eb => {
                let c = ca + sb(cb);
                if !c.is_zero() {
                    out.push((ea.clone(), c));
                }
                i += 1;
                j += 1;
            }
            (Some((ea, ca)), Some((eb, _))) if ea > eb => {
                out.push((ea.clone(), ca.clone()));
                i += 1;
            }
            (Some(_), Some((eb, cb))) | (None, Some((eb, cb))) => {
                out.push((eb.clone(), sb(cb)));
                j += 1;
            }
            (Some((ea, ca)), None) => {
                out.push((ea.clone(), ca.clone()));
                i += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    PuiseuxPoly { terms: out }
}

impl Add for &PuiseuxPoly {
    type Output = PuiseuxPoly;

    fn add(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        merge(self, rhs, false)
    }
}

impl Sub for &PuiseuxPoly {
    type Output = PuiseuxPoly;

    fn sub(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        merge(self, rhs, true)
    }
}

impl Mul for &PuiseuxPoly {
    type Output = PuiseuxPoly;

    fn mul(self, rhs: &PuiseuxPoly) -> PuiseuxPoly {
        PuiseuxPoly::from_terms(self.terms.iter().flat_map(|(ea, ca)| {
            rhs.terms.iter().map(move |(eb, cb)| (ea + eb, ca * cb))
        }))
    }
}

impl Neg for &PuiseuxPoly {
    type Output = PuiseuxPoly;

    fn neg(self) -> PuiseuxPoly {
        PuiseuxPoly {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for PuiseuxPoly {
            type Output = PuiseuxPoly;
            fn $m(self, rhs: PuiseuxPoly) -> PuiseuxPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for PuiseuxPoly {
    type Output = PuiseuxPoly;

    fn neg(self) -> PuiseuxPoly {
        -&self
    }
}

impl fmt::Display for PuiseuxPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            let c = c.abs();
            let show_coeff = !c.is_one() || e.is_zero();
            if show_coeff {
                write!(f, "{}", c)?;
            }
            if !e.is_zero() {
                if show_coeff {
                    write!(f, "*")?;
                }
                if e.is_one() {
                    write!(f, "t")?;
                } else if e.is_integer() {
                    write!(f, "t^{}", e)?;
                } else {
                    write!(f, "t^({})", e)?;
                }
            }
        }
        Ok(())
    }
}

/// Dense matrix of Puiseux polynomials, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuiseuxMatrix {
    rows: usize,
    cols: usize,
    data: Vec<PuiseuxPoly>,
}

impl PuiseuxMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PuiseuxMatrix {
            rows,
            cols,
            data: vec![PuiseuxPoly::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<PuiseuxPoly>>) -> Result<Self, PuiseuxError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(PuiseuxError::RaggedMatrix);
        }
        Ok(PuiseuxMatrix {
            rows: rows.len(),
            cols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &PuiseuxPoly {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: PuiseuxPoly) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[PuiseuxPoly] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Submatrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> PuiseuxMatrix {
        PuiseuxMatrix {
            rows: rows.len(),
            cols: cols.len(),
            data: rows
                .iter()
                .flat_map(|&i| cols.iter().map(move |&j| self.get(i, j).clone()))
                .collect(),
        }
    }

    /// Appends `column` on the right, e.g. to form the extended matrix `(A b)`.
    pub fn with_column(&self, column: &[PuiseuxPoly]) -> Result<PuiseuxMatrix, PuiseuxError> {
        if column.len() != self.rows {
            return Err(PuiseuxError::RaggedMatrix);
        }
        let rows = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(column[i].clone());
                r
            })
            .collect();
        Self::from_rows(rows)
    }

    fn map(&self, f: impl Fn(&PuiseuxPoly) -> PuiseuxPoly) -> PuiseuxMatrix {
        PuiseuxMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

/// Entries that are ultimately positive; everything else becomes zero.
pub fn pos_part(m: &PuiseuxMatrix) -> PuiseuxMatrix {
    m.map(|e| if e.sign_ultimate() > 0 { e.clone() } else { PuiseuxPoly::zero() })
}

/// Entries that are ultimately negative, kept with their sign.
pub fn neg_part(m: &PuiseuxMatrix) -> PuiseuxMatrix {
    m.map(|e| if e.sign_ultimate() < 0 { e.clone() } else { PuiseuxPoly::zero() })
}
