//! The staircase family `LP_r` and its tropical central path.
//!
//! `LP_r` minimizes `v₀` over the polytope
//!
//! ```text
//! u₀ ≤ t,  v₀ ≤ t²
//! u_i ≤ t·u_{i−1},  u_i ≤ t·v_{i−1},  v_i ≤ t^{1−1/2^i}·(u_{i−1} + v_{i−1})   (1 ≤ i ≤ r)
//! ```
//!
//! with one slack per row. Its tropical central path is the orbit of the
//! maps `G_i(a, b) = (1 + min(a, b), 1 − 2^{−i} + max(a, b))`, and the
//! `(u_i, v_i)` components trace staircases with `2^{i−1}` steps.
//!
//! Coordinates are ordered `u₀, v₀, …, u_r, v_r` followed by the slacks
//! `z₀, h₀, z₁, z'₁, h₁, …, z_r, z'_r, h_r`. The extended instance appends
//! `u_{r+1}, v_{r+1}` to the variables and `z_{r+1}, h_{r+1}` to the slacks.

use num_traits::{One, Signed, ToPrimitive};
use thiserror::Error;

use crate::puiseux::{PuiseuxError, PuiseuxMatrix, PuiseuxPoly};
use crate::tropical::{TropScalar, TropVector};
use crate::troppoly::{tropicalize, tropicalize_rows, RowKind, TropHalfspaceSystem, TropPolyError};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CexError {
    #[error("r must be at least 1")]
    InvalidR,
    #[error("strictly feasible point needs t > 1, got {0}")]
    ParameterTooSmall(f64),
    #[error("strictly feasible point violates row {row} by relative residual {residual:e}")]
    Residual { row: usize, residual: f64 },
    #[error("strictly feasible point has a nonpositive coordinate {0}")]
    NotPositive(usize),
    #[error(transparent)]
    Puiseux(#[from] PuiseuxError),
    #[error(transparent)]
    Trop(#[from] TropPolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct CexParams {
    pub r: u32,
    #[serde(default)]
    pub extended: bool,
}

impl CexParams {
    pub fn new(r: u32, extended: bool) -> Result<Self, CexError> {
        if r == 0 {
            return Err(CexError::InvalidR);
        }
        Ok(CexParams { r, extended })
    }

    pub fn plain(r: u32) -> Self {
        CexParams { r, extended: false }
    }
}

/// `min cᵀx` subject to `A x ≤ b`, `x ≥ 0`, with one named slack per row.
#[derive(Debug, Clone, PartialEq)]
pub struct LpInstance {
    pub a: PuiseuxMatrix,
    pub b: Vec<PuiseuxPoly>,
    pub c: Vec<PuiseuxPoly>,
    pub var_names: Vec<String>,
    pub slack_names: Vec<String>,
    /// Set when the instance is a member of the staircase family.
    pub family: Option<CexParams>,
}

impl LpInstance {
    pub fn nvars(&self) -> usize {
        self.var_names.len()
    }

    pub fn nrows(&self) -> usize {
        self.slack_names.len()
    }

    /// Variable names followed by slack names.
    pub fn coordinate_names(&self) -> Vec<String> {
        self.var_names.iter().chain(&self.slack_names).cloned().collect()
    }

    /// `[A | I]`, the constraint matrix of the slack form `A x + w = b`.
    pub fn equality_matrix(&self) -> PuiseuxMatrix {
        let (m, n) = (self.nrows(), self.nvars());
        let mut out = PuiseuxMatrix::zeros(m, n + m);
        for i in 0..m {
            for j in 0..n {
                out.set(i, j, self.a.get(i, j).clone());
            }
            out.set(i, n + i, PuiseuxPoly::one());
        }
        out
    }

    /// Tropicalization of `A x ≤ b` in the variables only.
    pub fn tropical_inequalities(&self) -> Result<TropHalfspaceSystem, TropPolyError> {
        tropicalize(&self.a, &self.b)
    }

    /// Tropicalization of the slack form, one equality row per constraint.
    pub fn tropical_slack_form(&self) -> Result<TropHalfspaceSystem, TropPolyError> {
        tropicalize_rows(&self.equality_matrix(), &self.b, &vec![RowKind::Eq; self.nrows()])
    }

    /// Valuation of the objective on the variables, padded with `−∞` on slacks
    /// when `with_slacks` is set.
    pub fn objective_valuation(&self, with_slacks: bool) -> TropVector {
        let mut v: Vec<TropScalar> = self.c.iter().map(PuiseuxPoly::val).collect();
        if with_slacks {
            v.extend(std::iter::repeat_n(TropScalar::NegInf, self.nrows()));
        }
        TropVector::new(v)
    }
}

/// Exponent `1 − 2^{−i}` of the `v_i` rows.
pub fn level_offset(i: u32) -> Rational {
    Rational::one() - pow2_inv(i)
}

fn pow2_inv(i: u32) -> Rational {
    Rational::new(1.into(), num_bigint::BigInt::from(1) << i as usize)
}

fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

/// Builds `LP_r` (or its extended variant) with exact Puiseux coefficients.
pub fn build_lp(p: CexParams) -> Result<LpInstance, CexError> {
    let p = CexParams::new(p.r, p.extended)?;
    let r = p.r as usize;
    let top = r + usize::from(p.extended);
    let mut var_names = Vec::new();
    for i in 0..=top {
        var_names.push(format!("u{i}"));
        var_names.push(format!("v{i}"));
    }
    let n = var_names.len();
    let u = |i: usize| 2 * i;
    let v = |i: usize| 2 * i + 1;
    let t = PuiseuxPoly::t();
    let one = PuiseuxPoly::one();

    let mut rows: Vec<Vec<PuiseuxPoly>> = Vec::new();
    let mut b = Vec::new();
    let mut slack_names = Vec::new();
    let mut push = |name: String, coeffs: Vec<(usize, PuiseuxPoly)>, rhs: PuiseuxPoly| {
        let mut row = vec![PuiseuxPoly::zero(); n];
        for (j, c) in coeffs {
            row[j] = c;
        }
        rows.push(row);
        b.push(rhs);
        slack_names.push(name);
    };

    push("z0".into(), vec![(u(0), one.clone())], t.clone());
    push("h0".into(), vec![(v(0), one.clone())], PuiseuxPoly::t_pow(int(2)));
    for i in 1..=r {
        let neg_t = -&t;
        let neg_c = -&PuiseuxPoly::t_pow(level_offset(i as u32));
        push(
            format!("z{i}"),
            vec![(u(i), one.clone()), (u(i - 1), neg_t.clone())],
            PuiseuxPoly::zero(),
        );
        push(
            format!("zp{i}"),
            vec![(u(i), one.clone()), (v(i - 1), neg_t)],
            PuiseuxPoly::zero(),
        );
        push(
            format!("h{i}"),
            vec![(v(i), one.clone()), (u(i - 1), neg_c.clone()), (v(i - 1), neg_c)],
            PuiseuxPoly::zero(),
        );
    }
    if p.extended {
        let shrink = -&PuiseuxPoly::t_pow(-int(r as i64 + 1));
        push(
            format!("z{}", r + 1),
            vec![(u(r + 1), one.clone()), (u(r), shrink.clone())],
            PuiseuxPoly::zero(),
        );
        push(
            format!("h{}", r + 1),
            vec![(v(r + 1), one.clone()), (v(r), shrink)],
            PuiseuxPoly::zero(),
        );
    }

    let mut c = vec![PuiseuxPoly::zero(); n];
    c[v(0)] = one;
    Ok(LpInstance {
        a: PuiseuxMatrix::from_rows(rows)?,
        b,
        c,
        var_names,
        slack_names,
        family: Some(p),
    })
}

/// `G_i(a, b) = (1 + min(a, b), 1 − 2^{−i} + max(a, b))`.
pub fn transition(i: u32, a: &Rational, b: &Rational) -> (Rational, Rational) {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    (Rational::one() + lo, level_offset(i) + hi)
}

/// A point of the primal tropical central path of `LP_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropPathPoint {
    pub lambda: Rational,
    pub params: CexParams,
    /// `u_0 … u_r` (and `u_{r+1}` when extended).
    pub u: Vec<Rational>,
    pub v: Vec<Rational>,
    /// `z_0 … z_r` (and `z_{r+1}` when extended).
    pub z: Vec<Rational>,
    /// `z'_1 … z'_r`, stored at index `i − 1`.
    pub zp: Vec<Rational>,
    /// `h_0 … h_r` (and `h_{r+1}` when extended).
    pub h: Vec<Rational>,
}

impl TropPathPoint {
    /// Assembles the slacks from `(u, v)` by `z_i = 1 + u_{i−1}`,
    /// `z'_i = 1 + v_{i−1}`, `h_i = v_i`, `z₀ = 1`, `h₀ = 2`.
    fn from_levels(params: CexParams, lambda: Rational, u: Vec<Rational>, v: Vec<Rational>) -> Self {
        let r = params.r as usize;
        let mut z = vec![int(1)];
        let mut zp = Vec::with_capacity(r);
        let mut h = vec![int(2)];
        for i in 1..=r {
            z.push(&u[i - 1] + int(1));
            zp.push(&v[i - 1] + int(1));
            h.push(v[i].clone());
        }
        if params.extended {
            z.push(u[r + 1].clone());
            h.push(v[r + 1].clone());
        }
        TropPathPoint { lambda, params, u, v, z, zp, h }
    }

    /// Primal coordinates in the instance's coordinate order.
    pub fn primal(&self) -> Vec<Rational> {
        let r = self.params.r as usize;
        let mut out = Vec::new();
        for (a, b) in self.u.iter().zip(&self.v) {
            out.push(a.clone());
            out.push(b.clone());
        }
        out.push(self.z[0].clone());
        out.push(self.h[0].clone());
        for i in 1..=r {
            out.push(self.z[i].clone());
            out.push(self.zp[i - 1].clone());
            out.push(self.h[i].clone());
        }
        if self.params.extended {
            out.push(self.z[r + 1].clone());
            out.push(self.h[r + 1].clone());
        }
        out
    }

    pub fn primal_vector(&self) -> TropVector {
        TropVector::from_rationals(self.primal())
    }

    /// Dual coordinates, each `λ` minus its paired primal coordinate.
    pub fn dual(&self) -> Vec<Rational> {
        dual_from_primal(&self.primal(), &self.lambda)
    }

    /// Primal coordinates followed by dual coordinates.
    pub fn primal_dual_vector(&self) -> TropVector {
        let mut p = self.primal();
        p.extend(self.dual());
        TropVector::from_rationals(p)
    }
}

/// `s_j = λ − x_j` for each coordinate; applying it twice is the identity.
pub fn dual_from_primal(coords: &[Rational], lambda: &Rational) -> Vec<Rational> {
    coords.iter().map(|x| lambda - x).collect()
}

/// Evaluates the piecewise-linear recursion `u₀ = 1`, `v₀ = min(2, λ)`,
/// `(u_i, v_i) = G_i(u_{i−1}, v_{i−1})`.
pub fn trop_path_dynamic(p: CexParams, lambda: &Rational) -> TropPathPoint {
    let r = p.r;
    let mut u = vec![int(1)];
    let mut v = vec![lambda.clone().min(int(2))];
    for i in 1..=r {
        let (a, b) = transition(i, &u[i as usize - 1], &v[i as usize - 1]);
        u.push(a);
        v.push(b);
    }
    if p.extended {
        let shift = int(r as i64 + 1);
        u.push(&u[r as usize] - &shift);
        v.push(&v[r as usize] - &shift);
    }
    TropPathPoint::from_levels(p, lambda.clone(), u, v)
}

/// `(u_i(λ), v_i(λ))` from the staircase formulas, with the constant and
/// half-line regimes for `λ ≥ 2` and `λ ≤ 0`.
pub fn staircase_level(i: u32, lambda: &Rational) -> (Rational, Rational) {
    let base = int(i as i64);
    let step = pow2_inv(i);
    if *lambda >= int(2) {
        return (&base + int(1), &base + int(1) + &step);
    }
    if !lambda.is_positive() {
        return (&base + lambda, &base + &step);
    }
    // λ ∈ (0, 2): locate k with λ ∈ [4k/2^i, (4k+4)/2^i]
    let scaled = lambda / (&step * int(4));
    let max_k = (1i64 << (i - 1)) - 1;
    let k = scaled.floor().to_integer().to_i64().unwrap_or(max_k).min(max_k);
    let k = int(k);
    let mid = (&k * int(4) + int(2)) * &step;
    if *lambda <= mid {
        (
            &base + lambda - &k * int(2) * &step,
            &base + (&k * int(2) + int(1)) * &step,
        )
    } else {
        (
            &base + (&k * int(2) + int(2)) * &step,
            &base + lambda - (&k * int(2) + int(1)) * &step,
        )
    }
}

/// Closed-form tropical central path point.
pub fn trop_path_closed(p: CexParams, lambda: &Rational) -> TropPathPoint {
    let r = p.r;
    let mut u = vec![int(1)];
    let mut v = vec![lambda.clone().min(int(2))];
    for i in 1..=r {
        let (a, b) = staircase_level(i, lambda);
        u.push(a);
        v.push(b);
    }
    if p.extended {
        let shift = int(r as i64 + 1);
        u.push(&u[r as usize] - &shift);
        v.push(&v[r as usize] - &shift);
    }
    TropPathPoint::from_levels(p, lambda.clone(), u, v)
}

/// Coordinatewise upper bound on the tropical feasible set, obtained by
/// propagating the saturated rows forward from `u₀ ≤ 1`, `v₀ ≤ 2`.
pub fn upper_box(p: CexParams) -> TropVector {
    trop_path_dynamic(p, &int(2)).primal_vector()
}

/// The `λ`-sublevel set `{v₀ ≤ λ}` of the tropicalized slack form.
pub fn sublevel_system(lp: &LpInstance, lambda: &Rational) -> Result<TropHalfspaceSystem, TropPolyError> {
    let sys = lp.tropical_slack_form()?;
    crate::troppoly::sublevel(&sys, &lp.objective_valuation(true), &TropScalar::Finite(lambda.clone()))
}

/// A strictly feasible point of `LP_r(t)` in coordinate order:
/// `u₀ = z₀ = t/2`, `v₀ = h₀ = t²/2`, then `u_i = z_i = t·u_{i−1}/2`,
/// `z'_i = t·v_{i−1} − u_i`, `v_i = h_i = t^{1−2^{−i}}(u_{i−1} + v_{i−1})/2`.
pub fn strictly_feasible_point(p: CexParams, t: f64) -> Result<Vec<f64>, CexError> {
    if !(t > 1.0) {
        return Err(CexError::ParameterTooSmall(t));
    }
    let lp = build_lp(p)?;
    let r = p.r as usize;
    let mut u = vec![t / 2.0];
    let mut v = vec![t * t / 2.0];
    let mut z = vec![t / 2.0];
    let mut zp = Vec::new();
    let mut h = vec![t * t / 2.0];
    for i in 1..=r {
        let c = t.powf(level_offset(i as u32).to_f64().unwrap_or(f64::NAN));
        let ui = t * u[i - 1] / 2.0;
        let vi = c * (u[i - 1] + v[i - 1]) / 2.0;
        u.push(ui);
        z.push(ui);
        zp.push(t * v[i - 1] - ui);
        v.push(vi);
        h.push(vi);
    }
    if p.extended {
        let s = t.powi(-(r as i32 + 1));
        let (ue, ve) = (s * u[r] / 2.0, s * v[r] / 2.0);
        u.push(ue);
        v.push(ve);
        z.push(ue);
        h.push(ve);
    }
    let mut x = Vec::new();
    for (a, b) in u.iter().zip(&v) {
        x.push(*a);
        x.push(*b);
    }
    x.push(z[0]);
    x.push(h[0]);
    for i in 1..=r {
        x.push(z[i]);
        x.push(zp[i - 1]);
        x.push(h[i]);
    }
    if p.extended {
        x.push(z[r + 1]);
        x.push(h[r + 1]);
    }

    if let Some(k) = x.iter().position(|&c| !(c > 0.0)) {
        return Err(CexError::NotPositive(k));
    }
    let n = lp.nvars();
    for i in 0..lp.nrows() {
        let mut lhs = x[n + i];
        let mut scale = x[n + i].abs();
        for j in 0..n {
            let a = lp.a.get(i, j);
            if !a.is_zero() {
                let term = a.eval(t)? * x[j];
                lhs += term;
                scale = scale.max(term.abs());
            }
        }
        let rhs = lp.b[i].eval(t)?;
        scale = scale.max(rhs.abs());
        let residual = (lhs - rhs).abs() / scale;
        if residual > 1e-12 {
            return Err(CexError::Residual { row: i, residual });
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tropical::rat;
    use crate::troppoly::{barycenter, membership};

    fn q(n: i64, d: i64) -> Rational {
        rat(n, d)
    }

    #[test]
    fn lp1_shape() {
        let lp = build_lp(CexParams::plain(1)).unwrap();
        assert_eq!(lp.nrows(), 5);
        assert_eq!(lp.nvars() + lp.nrows(), 9);
        assert_eq!(
            lp.coordinate_names(),
            ["u0", "v0", "u1", "v1", "z0", "h0", "z1", "zp1", "h1"]
        );
    }

    #[test]
    fn shapes_for_all_small_r() {
        for r in 1..=6u32 {
            for extended in [false, true] {
                let lp = build_lp(CexParams { r, extended }).unwrap();
                let extra = if extended { 2 } else { 0 };
                assert_eq!(lp.nrows(), 3 * r as usize + 2 + extra);
                assert_eq!(lp.nvars() + lp.nrows(), 5 * r as usize + 4 + 2 * extra);
            }
        }
        assert_eq!(build_lp(CexParams { r: 0, extended: false }), Err(CexError::InvalidR));
    }

    #[test]
    fn extended_rows_shrink_by_t_power() {
        let lp = build_lp(CexParams { r: 2, extended: true }).unwrap();
        let n = lp.nvars();
        let row = lp.slack_names.iter().position(|s| s == "z3").unwrap();
        let u2 = lp.var_names.iter().position(|s| s == "u2").unwrap();
        assert_eq!(lp.a.get(row, u2), &-&PuiseuxPoly::t_pow(q(-3, 1)));
        assert_eq!(lp.a.get(row, n - 2), &PuiseuxPoly::one());
    }

    #[test]
    fn schlegel_vertex_is_tight_on_four_facets() {
        let lp = build_lp(CexParams::plain(1)).unwrap();
        let t: f64 = 4.0;
        let x = [t, t, t * t, 2.0 * t.powf(1.5)];
        let mut tight = 0;
        for i in 0..lp.nrows() {
            let lhs: f64 = (0..4).map(|j| lp.a.get(i, j).eval(t).unwrap() * x[j]).sum();
            let slack = lp.b[i].eval(t).unwrap() - lhs;
            assert!(slack >= 0.0, "row {i} violated");
            if slack == 0.0 {
                tight += 1;
            }
        }
        assert_eq!(tight, 4);
    }

    #[test]
    fn transition_examples() {
        assert_eq!(transition(1, &q(1, 1), &q(2, 1)), (q(2, 1), q(5, 2)));
        assert_eq!(transition(2, &q(3, 2), &q(3, 2)), (q(5, 2), q(9, 4)));
        let a = q(7, 3);
        assert_eq!(transition(5, &a, &a), (&a + q(1, 1), &a + q(31, 32)));
    }

    #[test]
    fn dynamic_examples() {
        let p = CexParams::plain(2);
        let at0 = trop_path_dynamic(p, &q(0, 1));
        assert_eq!(at0.u, [q(1, 1), q(1, 1), q(2, 1)]);
        assert_eq!(at0.v, [q(0, 1), q(3, 2), q(9, 4)]);
        for lam in [q(2, 1), q(3, 1), q(100, 7)] {
            let pt = trop_path_dynamic(p, &lam);
            assert_eq!(pt.u, [q(1, 1), q(2, 1), q(3, 1)]);
            assert_eq!(pt.v, [q(2, 1), q(5, 2), q(13, 4)]);
        }
        let at1 = trop_path_dynamic(p, &q(1, 1));
        assert_eq!((at1.u[2].clone(), at1.v[2].clone()), (q(5, 2), q(11, 4)));
    }

    #[test]
    fn closed_form_examples() {
        let p = CexParams::plain(2);
        let pt = trop_path_closed(p, &q(1, 2));
        assert_eq!((pt.u[2].clone(), pt.v[2].clone()), (q(5, 2), q(9, 4)));
        let pt = trop_path_closed(p, &q(0, 1));
        assert_eq!(pt.u[2], q(2, 1));
        assert_eq!(pt.v[2], q(9, 4));
        assert_eq!(pt.z[2], q(2, 1));
        assert_eq!(pt.zp[1], q(5, 2));
        assert_eq!(pt.h[2], q(9, 4));
    }

    #[test]
    fn closed_matches_dynamic_outside_unit_range() {
        for r in 1..=5 {
            for lam in [q(-7, 2), q(-1, 64), q(0, 1), q(2, 1), q(9, 4), q(50, 1)] {
                let p = CexParams::plain(r);
                assert_eq!(trop_path_closed(p, &lam), trop_path_dynamic(p, &lam));
            }
        }
    }

    #[test]
    fn dual_examples() {
        let d = dual_from_primal(&[q(2, 1)], &q(1, 1));
        assert_eq!(d, [q(-1, 1)]);
        let coords = vec![q(3, 4), q(-2, 1), q(7, 8)];
        let lam = q(5, 3);
        assert_eq!(dual_from_primal(&dual_from_primal(&coords, &lam), &lam), coords);

        // extended instance: u^d_{r+1} at λ = 4k/2^r is 1 + 2k/2^r
        let r = 3u32;
        let p = CexParams { r, extended: true };
        let lp = build_lp(p).unwrap();
        let pos = lp.var_names.iter().position(|s| s == "u4").unwrap();
        for k in [0i64, 1] {
            let lam = q(4 * k, 1 << r);
            let dual = trop_path_closed(p, &lam).dual();
            assert_eq!(dual[pos], q(1, 1) + q(2 * k, 1 << r));
        }
    }

    #[test]
    fn strictly_feasible_r1() {
        let x = strictly_feasible_point(CexParams::plain(1), 2.0).unwrap();
        let expect = [1.0, 2.0, 1.0, 3.0 / 2f64.sqrt(), 1.0, 2.0, 1.0, 3.0, 3.0 / 2f64.sqrt()];
        for (a, b) in x.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert_eq!(
            strictly_feasible_point(CexParams::plain(1), 1.0),
            Err(CexError::ParameterTooSmall(1.0))
        );
    }

    #[test]
    fn strictly_feasible_positive_for_small_instances() {
        for r in 1..=5 {
            for t in [2.0, 10.0, 100.0] {
                for extended in [false, true] {
                    let x = strictly_feasible_point(CexParams { r, extended }, t).unwrap();
                    assert!(x.iter().all(|&c| c > 0.0));
                }
            }
        }
    }

    #[test]
    fn upper_box_dominates_and_lifts() {
        for r in 1..=3 {
            let p = CexParams::plain(r);
            let lp = build_lp(p).unwrap();
            let sys = lp.tropical_slack_form().unwrap();
            let top = barycenter(&sys, &upper_box(p)).unwrap();
            assert_eq!(top, upper_box(p));
            assert!(membership(&sys, &top).unwrap());
        }
    }
}
