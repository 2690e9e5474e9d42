//! Tropical halfspace systems and their greatest points.
//!
//! A system is a list of rows
//! `max(A⁺ᵢ ⊙ x, b⁻ᵢ) ≤ max(A⁻ᵢ ⊙ x, b⁺ᵢ)` (or `=` for equality rows).
//! Systems come from tropicalizing Puiseux constraint data, and the
//! tropical barycenter of a bounded system is its coordinatewise greatest
//! point, found here by monotone saturation from an upper box.

use thiserror::Error;

use crate::puiseux::{neg_part, pos_part, PuiseuxMatrix, PuiseuxPoly};
use crate::tropical::{row_dot, TropMatrix, TropScalar, TropVector, TropicalError};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TropPolyError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("matrix of size {0} exceeds the enumeration limit {1}")]
    TooLarge(usize, usize),
    #[error("determinant classification needs a square matrix, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("system is infeasible below the given upper box (row {0})")]
    InfeasibleBelowBox(usize),
    #[error("saturation did not converge within {0} updates")]
    NonConvergence(usize),
    #[error("point is not feasible (row {0} violated)")]
    Infeasible(usize),
    #[error("row {0} has more than one finite entry in A+")]
    MultiplePositiveEntries(usize),
    #[error(transparent)]
    Tropical(#[from] TropicalError),
}

fn check_dim(expected: usize, actual: usize) -> Result<(), TropPolyError> {
    if expected == actual {
        Ok(())
    } else {
        Err(TropPolyError::DimensionMismatch { expected, actual })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
}

/// `A⁺ ⊙ x ⊕ b⁻ ≤ A⁻ ⊙ x ⊕ b⁺`, row by row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropHalfspaceSystem {
    dim: usize,
    aplus: TropMatrix,
    aminus: TropMatrix,
    bplus: Vec<TropScalar>,
    bminus: Vec<TropScalar>,
    kinds: Vec<RowKind>,
}

impl TropHalfspaceSystem {
    /// The system with no rows, whose feasible set is all of `𝕋ⁿ`.
    pub fn empty(dim: usize) -> Self {
        TropHalfspaceSystem {
            dim,
            aplus: TropMatrix::neg_inf(0, dim),
            aminus: TropMatrix::neg_inf(0, dim),
            bplus: Vec::new(),
            bminus: Vec::new(),
            kinds: Vec::new(),
        }
    }

    pub fn push_row(
        &mut self,
        aplus: Vec<TropScalar>,
        aminus: Vec<TropScalar>,
        bplus: TropScalar,
        bminus: TropScalar,
        kind: RowKind,
    ) -> Result<(), TropPolyError> {
        check_dim(self.dim, aplus.len())?;
        check_dim(self.dim, aminus.len())?;
        self.aplus.push_row(aplus)?;
        self.aminus.push_row(aminus)?;
        self.bplus.push(bplus);
        self.bminus.push(bminus);
        self.kinds.push(kind);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nrows(&self) -> usize {
        self.kinds.len()
    }

    pub fn aplus(&self) -> &TropMatrix {
        &self.aplus
    }

    pub fn aminus(&self) -> &TropMatrix {
        &self.aminus
    }

    pub fn bplus(&self) -> &[TropScalar] {
        &self.bplus
    }

    pub fn bminus(&self) -> &[TropScalar] {
        &self.bminus
    }

    pub fn kind(&self, i: usize) -> RowKind {
        self.kinds[i]
    }

    /// Left-hand side `max(A⁺ᵢ ⊙ x, b⁻ᵢ)` of row `i`.
    pub fn lhs(&self, i: usize, x: &TropVector) -> TropScalar {
        row_dot(self.aplus.row(i), x.entries()).max(self.bminus[i].clone())
    }

    /// Right-hand side `max(A⁻ᵢ ⊙ x, b⁺ᵢ)` of row `i`.
    pub fn rhs(&self, i: usize, x: &TropVector) -> TropScalar {
        row_dot(self.aminus.row(i), x.entries()).max(self.bplus[i].clone())
    }

    fn row_holds(&self, i: usize, x: &TropVector) -> bool {
        let (l, r) = (self.lhs(i, x), self.rhs(i, x));
        match self.kinds[i] {
            RowKind::Le => l <= r,
            RowKind::Eq => l == r,
        }
    }

    fn first_violated(&self, x: &TropVector) -> Option<usize> {
        (0..self.nrows()).find(|&i| !self.row_holds(i, x))
    }

    /// Largest violation `lhs − rhs` over all rows for a real point, where
    /// equality rows count violations in both directions. Non-positive means
    /// feasible.
    pub fn violation_f64(&self, x: &[f64]) -> f64 {
        let side = |m: &TropMatrix, b: &TropScalar, i: usize| {
            m.row(i)
                .iter()
                .zip(x)
                .map(|(a, v)| a.to_f64() + v)
                .fold(b.to_f64(), f64::max)
        };
        (0..self.nrows())
            .map(|i| {
                let l = side(&self.aplus, &self.bminus[i], i);
                let r = side(&self.aminus, &self.bplus[i], i);
                let d = excess(l, r);
                match self.kinds[i] {
                    RowKind::Le => d,
                    RowKind::Eq => d.max(excess(r, l)),
                }
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

fn excess(l: f64, r: f64) -> f64 {
    if l == f64::NEG_INFINITY {
        f64::NEG_INFINITY
    } else if r == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        l - r
    }
}

/// Tropicalizes `A x ≤ b`.
pub fn tropicalize(a: &PuiseuxMatrix, b: &[PuiseuxPoly]) -> Result<TropHalfspaceSystem, TropPolyError> {
    tropicalize_rows(a, b, &vec![RowKind::Le; a.nrows()])
}

/// Tropicalizes `A x (≤ or =) b` row by row: the positive and negative
/// parts of `(A | b)` are split by ultimate sign and mapped through `val`.
pub fn tropicalize_rows(
    a: &PuiseuxMatrix,
    b: &[PuiseuxPoly],
    kinds: &[RowKind],
) -> Result<TropHalfspaceSystem, TropPolyError> {
    check_dim(a.nrows(), b.len())?;
    check_dim(a.nrows(), kinds.len())?;
    let ap = pos_part(a);
    let am = neg_part(a);
    let mut sys = TropHalfspaceSystem::empty(a.ncols());
    for i in 0..a.nrows() {
        let aplus = ap.row(i).iter().map(PuiseuxPoly::val).collect();
        let aminus = am.row(i).iter().map(PuiseuxPoly::val).collect();
        let (bplus, bminus) = match b[i].sign_ultimate() {
            1 => (b[i].val(), TropScalar::NegInf),
            -1 => (TropScalar::NegInf, b[i].val()),
            _ => (TropScalar::NegInf, TropScalar::NegInf),
        };
        sys.push_row(aplus, aminus, bplus, bminus, kinds[i])?;
    }
    Ok(sys)
}

/// Classification of the tropical determinant of a square Puiseux matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetSign {
    /// All terms of maximal valuation share one sign.
    SignNonsingular,
    /// Every permutation term is zero.
    AllTermsVanish,
    /// Terms of maximal valuation carry both signs.
    Mixed,
}

pub const MAX_DET_DIM: usize = 10;
pub const MAX_GENERIC_DIM: usize = 8;

/// Expands the determinant over all permutations and classifies the signs
/// of the terms of maximal valuation.
pub fn trop_det_sign(m: &PuiseuxMatrix) -> Result<DetSign, TropPolyError> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(TropPolyError::NotSquare(n, m.ncols()));
    }
    if n > MAX_DET_DIM {
        return Err(TropPolyError::TooLarge(n, MAX_DET_DIM));
    }
    let vals: Vec<Vec<TropScalar>> = (0..n)
        .map(|i| m.row(i).iter().map(PuiseuxPoly::val).collect())
        .collect();
    let signs: Vec<Vec<i8>> = (0..n)
        .map(|i| m.row(i).iter().map(PuiseuxPoly::sign_ultimate).collect())
        .collect();

    let mut best: Option<Rational> = None;
    let (mut pos, mut neg) = (false, false);
    for_each_permutation(n, |perm, parity| {
        let mut total = Rational::from_integer(0.into());
        let mut sign = parity;
        for (i, &j) in perm.iter().enumerate() {
            match &vals[i][j] {
                TropScalar::NegInf => return,
                TropScalar::Finite(v) => total += v,
            }
            sign *= signs[i][j];
        }
        let better = best.as_ref().is_none_or(|b| total > *b);
        if better {
            best = Some(total);
            pos = false;
            neg = false;
        } else if best.as_ref() != Some(&total) {
            return;
        }
        if sign > 0 {
            pos = true;
        } else {
            neg = true;
        }
    });
    Ok(match (best, pos && neg) {
        (None, _) => DetSign::AllTermsVanish,
        (Some(_), true) => DetSign::Mixed,
        (Some(_), false) => DetSign::SignNonsingular,
    })
}

/// Heap's algorithm; the callback receives each permutation and its sign.
fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize], i8)) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    let mut parity: i8 = 1;
    f(&perm, parity);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            parity = -parity;
            f(&perm, parity);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Genericity {
    SignGeneric,
    NotGeneric,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericityReport {
    pub verdict: Genericity,
    /// Row and column indices of the first offending square submatrix.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

/// Checks that every square submatrix is sign non-singular or has only
/// vanishing permutation terms.
pub fn is_sign_generic(w: &PuiseuxMatrix) -> Result<GenericityReport, TropPolyError> {
    let k_max = w.nrows().min(w.ncols());
    if k_max > MAX_GENERIC_DIM {
        return Err(TropPolyError::TooLarge(k_max, MAX_GENERIC_DIM));
    }
    for k in 1..=k_max {
        for rows in combinations(w.nrows(), k) {
            for cols in combinations(w.ncols(), k) {
                if trop_det_sign(&w.select(&rows, &cols))? == DetSign::Mixed {
                    return Ok(GenericityReport {
                        verdict: Genericity::NotGeneric,
                        witness: Some((rows, cols)),
                    });
                }
            }
        }
    }
    Ok(GenericityReport {
        verdict: Genericity::SignGeneric,
        witness: None,
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

pub fn membership(s: &TropHalfspaceSystem, x: &TropVector) -> Result<bool, TropPolyError> {
    check_dim(s.dim(), x.len())?;
    Ok(s.first_violated(x).is_none())
}

/// Adds the row `c ⊙ x ≤ λ`.
pub fn sublevel(
    s: &TropHalfspaceSystem,
    c: &TropVector,
    lambda: &TropScalar,
) -> Result<TropHalfspaceSystem, TropPolyError> {
    let mut out = s.clone();
    out.push_row(
        c.entries().to_vec(),
        vec![TropScalar::NegInf; s.dim()],
        lambda.clone(),
        TropScalar::NegInf,
        RowKind::Le,
    )?;
    Ok(out)
}

/// One `≤` constraint with disjoint left and right supports.
struct Normalized {
    source: usize,
    left: Vec<(usize, Rational)>,
    left_const: TropScalar,
    right: Vec<(usize, Rational)>,
    right_const: TropScalar,
}

impl Normalized {
    fn build(
        source: usize,
        left: &[TropScalar],
        left_const: &TropScalar,
        right: &[TropScalar],
        right_const: &TropScalar,
    ) -> Self {
        // a term present on both sides only matters on the side where its
        // coefficient is strictly larger; ties go to the right
        let mut l = Vec::new();
        let mut r = Vec::new();
        for (j, (a, b)) in left.iter().zip(right).enumerate() {
            if a > b {
                if let TropScalar::Finite(a) = a {
                    l.push((j, a.clone()));
                }
            } else if let TropScalar::Finite(b) = b {
                r.push((j, b.clone()));
            }
        }
        let left_const = if left_const > right_const {
            left_const.clone()
        } else {
            TropScalar::NegInf
        };
        Normalized {
            source,
            left: l,
            left_const,
            right: r,
            right_const: right_const.clone(),
        }
    }

    fn rhs(&self, x: &[TropScalar]) -> TropScalar {
        self.right
            .iter()
            .map(|(j, a)| x[*j].shift(a))
            .max()
            .unwrap_or(TropScalar::NegInf)
            .max(self.right_const.clone())
    }
}

pub const SATURATION_CAP: usize = 1_000_000;

/// Greatest point of the system below `upper_box`.
///
/// Starting at the box, every violated row lowers the offending left-hand
/// coordinates to the value forced by the current right-hand side. The
/// iterate only decreases and never passes below the greatest solution, so
/// a fixpoint is that solution. Equality rows act as two opposite
/// inequalities.
pub fn barycenter(s: &TropHalfspaceSystem, upper_box: &TropVector) -> Result<TropVector, TropPolyError> {
    check_dim(s.dim(), upper_box.len())?;
    let mut rows = Vec::with_capacity(2 * s.nrows());
    for i in 0..s.nrows() {
        rows.push(Normalized::build(
            i,
            s.aplus.row(i),
            &s.bminus[i],
            s.aminus.row(i),
            &s.bplus[i],
        ));
        if s.kinds[i] == RowKind::Eq {
            rows.push(Normalized::build(
                i,
                s.aminus.row(i),
                &s.bplus[i],
                s.aplus.row(i),
                &s.bminus[i],
            ));
        }
    }

    let mut x = upper_box.clone().into_inner();
    let mut updates = 0usize;
    loop {
        let mut changed = false;
        for row in &rows {
            let r = row.rhs(&x);
            if row.left_const > r {
                return Err(TropPolyError::InfeasibleBelowBox(row.source));
            }
            for (j, a) in &row.left {
                if x[*j].shift(a) > r {
                    x[*j] = match &r {
                        TropScalar::Finite(rv) => TropScalar::Finite(rv - a),
                        TropScalar::NegInf => TropScalar::NegInf,
                    };
                    changed = true;
                    updates += 1;
                    if updates > SATURATION_CAP {
                        return Err(TropPolyError::NonConvergence(SATURATION_CAP));
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let x = TropVector::new(x);
    match s.first_violated(&x) {
        None => Ok(x),
        Some(i) => Err(TropPolyError::InfeasibleBelowBox(i)),
    }
}

/// Rows where both sides agree exactly at a feasible point.
pub fn tight_rows(s: &TropHalfspaceSystem, x: &TropVector) -> Result<Vec<usize>, TropPolyError> {
    check_dim(s.dim(), x.len())?;
    if let Some(i) = s.first_violated(x) {
        return Err(TropPolyError::Infeasible(i));
    }
    Ok((0..s.nrows()).filter(|&i| s.lhs(i, x) == s.rhs(i, x)).collect())
}

/// For systems whose `A⁺` has at most one finite entry per row: true iff
/// the tight rows at `x` cover at least `n − 1` distinct coordinates
/// through their positive entries.
pub fn on_vertex_edge_graph(
    s: &TropHalfspaceSystem,
    x: &TropVector,
    n: usize,
) -> Result<bool, TropPolyError> {
    let mut owner = Vec::with_capacity(s.nrows());
    for i in 0..s.nrows() {
        let finite: Vec<usize> = s
            .aplus
            .row(i)
            .iter()
            .enumerate()
            .filter(|(_, a)| a.is_finite())
            .map(|(j, _)| j)
            .collect();
        if finite.len() > 1 {
            return Err(TropPolyError::MultiplePositiveEntries(i));
        }
        owner.push(finite.first().copied());
    }
    let mut covered: Vec<usize> = tight_rows(s, x)?
        .into_iter()
        .filter_map(|i| owner[i])
        .collect();
    covered.sort_unstable();
    covered.dedup();
    Ok(covered.len() + 1 >= n)
}
