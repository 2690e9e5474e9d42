//! Classical primal-dual central paths of instantiated programs.
//!
//! For `min cᵀx` subject to `A x + w = b`, `x, w ≥ 0`, the central path at
//! `μ > 0` is the unique solution of
//!
//! ```text
//! A x + w = b,   s = c + Aᵀy,   w_i y_i = μ,   x_j s_j = μ
//! ```
//!
//! with all of `x, w, y, s` positive. Points are computed by damped Newton
//! steps taken in relative coordinates (`Δx = x ∘ δx`), which keeps the
//! linear systems well scaled even when coordinates span many orders of
//! magnitude.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::counterexample::{strictly_feasible_point, CexError, LpInstance, TropPathPoint};
use crate::puiseux::PuiseuxError;

/// Relative residual at which Newton iterations stop.
pub const NEWTON_TOL: f64 = 1e-11;
/// Newton iterations allowed per target `μ`.
pub const NEWTON_MAX_ITER: usize = 200;
const FRACTION_TO_BOUNDARY: f64 = 0.95;
const MAX_BISECTIONS: u32 = 24;
/// `λ` at which traces start when the requested grid lies below it.
pub const ANCHOR_LAMBDA: f64 = 2.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("instantiation parameter must exceed 1, got {0}")]
    ParameterTooSmall(f64),
    #[error("no strictly feasible starting point is available")]
    NoStartingPoint,
    #[error("Newton did not converge at lambda = {lambda} (residual {residual:e})")]
    NonConvergence { lambda: f64, residual: f64 },
    #[error("singular Newton system at lambda = {0}")]
    Singular(f64),
    #[error("coordinate {0} is not strictly positive")]
    NonPositive(usize),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("lambda grid must be nonempty and strictly decreasing")]
    BadGrid,
    #[error("mu must be positive and finite, got {0}")]
    BadMu(f64),
    #[error(transparent)]
    Puiseux(#[from] PuiseuxError),
    #[error(transparent)]
    Cex(#[from] CexError),
}

pub type Result<T> = std::result::Result<T, NumericError>;

/// A program with real data, `min cᵀx` s.t. `A x ≤ b`, `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealLp {
    pub a: DMatrix<f64>,
    pub b: DVector<f64>,
    pub c: DVector<f64>,
    pub t: f64,
    /// Strictly feasible `(x, w)`, when one is known.
    pub witness: Option<Vec<f64>>,
}

impl RealLp {
    pub fn new(a: DMatrix<f64>, b: DVector<f64>, c: DVector<f64>, t: f64) -> Result<Self> {
        if b.len() != a.nrows() {
            return Err(NumericError::DimensionMismatch { expected: a.nrows(), actual: b.len() });
        }
        if c.len() != a.ncols() {
            return Err(NumericError::DimensionMismatch { expected: a.ncols(), actual: c.len() });
        }
        let mut lp = RealLp { a, b, c, t, witness: None };
        lp.witness = lp.interior_guess();
        Ok(lp)
    }

    pub fn nvars(&self) -> usize {
        self.a.ncols()
    }

    pub fn nrows(&self) -> usize {
        self.a.nrows()
    }

    /// Tries `x = δ·1` for shrinking `δ` until every slack is positive.
    fn interior_guess(&self) -> Option<Vec<f64>> {
        let n = self.nvars();
        let mut delta = 1.0;
        for _ in 0..60 {
            let x = DVector::from_element(n, delta);
            let w = &self.b - &self.a * &x;
            if w.iter().all(|&v| v > 0.0) {
                return Some(x.iter().chain(w.iter()).copied().collect());
            }
            delta /= 4.0;
        }
        None
    }

    /// Rescales to `x̂ = x·t^{−h_x}`, `ŵ = w·t^{−h_w}` for a per-coordinate
    /// valuation hint `h` over `(x, w)`.
    fn scaled(&self, hint: &[f64]) -> Result<(RealLp, Vec<f64>)> {
        let (m, n) = (self.nrows(), self.nvars());
        if hint.len() != n + m {
            return Err(NumericError::DimensionMismatch { expected: n + m, actual: hint.len() });
        }
        let scale: Vec<f64> = hint.iter().map(|h| self.t.powf(*h)).collect();
        let a = DMatrix::from_fn(m, n, |i, j| self.a[(i, j)] * scale[j] / scale[n + i]);
        let b = DVector::from_fn(m, |i, _| self.b[i] / scale[n + i]);
        let c = DVector::from_fn(n, |j, _| self.c[j] * scale[j]);
        let witness = self
            .witness
            .as_ref()
            .map(|p| p.iter().zip(&scale).map(|(v, s)| v / s).collect());
        Ok((RealLp { a, b, c, t: self.t, witness }, scale))
    }
}

/// Evaluates every entry of `lp` at `t`. Family members get the closed-form
/// strictly feasible point as witness.
pub fn instantiate(lp: &LpInstance, t: f64) -> Result<RealLp> {
    if !(t > 1.0) {
        return Err(NumericError::ParameterTooSmall(t));
    }
    let (m, n) = (lp.nrows(), lp.nvars());
    let mut a = DMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = lp.a.get(i, j).eval(t)?;
        }
    }
    let b = DVector::from_iterator(m, lp.b.iter().map(|f| f.eval(t)).collect::<std::result::Result<Vec<_>, _>>()?);
    let c = DVector::from_iterator(n, lp.c.iter().map(|f| f.eval(t)).collect::<std::result::Result<Vec<_>, _>>()?);
    let mut rlp = RealLp::new(a, b, c, t)?;
    if let Some(p) = lp.family {
        rlp.witness = Some(strictly_feasible_point(p, t)?);
    }
    Ok(rlp)
}

/// A point on the central path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample {
    pub lambda: f64,
    pub mu: f64,
    pub x: Vec<f64>,
    pub w: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    /// Largest relative KKT residual at the returned point.
    pub residual: f64,
}

impl PathSample {
    /// Completes a strictly positive primal `(x, w)` with the dual guess
    /// `y = μ/w`, `s = μ/x`.
    pub fn from_primal(rlp: &RealLp, primal: &[f64], mu: f64) -> Result<Self> {
        let n = rlp.nvars();
        if primal.len() != n + rlp.nrows() {
            return Err(NumericError::DimensionMismatch { expected: n + rlp.nrows(), actual: primal.len() });
        }
        if let Some(k) = primal.iter().position(|&v| !(v > 0.0)) {
            return Err(NumericError::NonPositive(k));
        }
        let (x, w) = primal.split_at(n);
        let mut out = PathSample {
            lambda: mu.ln() / rlp.t.ln(),
            mu,
            x: x.to_vec(),
            w: w.to_vec(),
            y: w.iter().map(|v| mu / v).collect(),
            s: x.iter().map(|v| mu / v).collect(),
            residual: f64::INFINITY,
        };
        out.residual = residual_norm(rlp, &out);
        Ok(out)
    }

    /// `(x, w)`.
    pub fn primal(&self) -> Vec<f64> {
        self.x.iter().chain(&self.w).copied().collect()
    }

    /// `(s, y)`, paired with [`PathSample::primal`] coordinatewise.
    pub fn dual(&self) -> Vec<f64> {
        self.s.iter().chain(&self.y).copied().collect()
    }

    /// `max |x_j s_j − μ| + max |w_i y_i − μ|`, divided by `μ`.
    pub fn complementarity_error(&self) -> f64 {
        let dev = |a: &[f64], b: &[f64]| {
            a.iter().zip(b).map(|(p, q)| (p * q - self.mu).abs()).fold(0.0, f64::max)
        };
        (dev(&self.x, &self.s) + dev(&self.w, &self.y)) / self.mu
    }

    /// Relative error of `cᵀx + bᵀy = (m + n)·μ`.
    pub fn duality_gap_error(&self, rlp: &RealLp) -> f64 {
        let cx: f64 = rlp.c.iter().zip(&self.x).map(|(a, b)| a * b).sum();
        let by: f64 = rlp.b.iter().zip(&self.y).map(|(a, b)| a * b).sum();
        let target = (rlp.nvars() + rlp.nrows()) as f64 * self.mu;
        (cx + by - target).abs() / target
    }
}

/// Scaled residual blocks `(primal rows, dual rows, w∘y/μ − 1, x∘s/μ − 1)`
/// with their row scales.
struct Residual {
    values: Vec<f64>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
}

fn residual(rlp: &RealLp, p: &PathSample) -> Residual {
    let (m, n) = (rlp.nrows(), rlp.nvars());
    let mut values = Vec::with_capacity(2 * (m + n));
    let mut row_scale = Vec::with_capacity(m);
    for i in 0..m {
        let mut sum = p.w[i] - rlp.b[i];
        let mut scale = p.w[i].max(rlp.b[i].abs());
        for j in 0..n {
            let term = rlp.a[(i, j)] * p.x[j];
            sum += term;
            scale = scale.max(term.abs());
        }
        values.push(sum / scale);
        row_scale.push(scale);
    }
    let mut col_scale = Vec::with_capacity(n);
    for j in 0..n {
        let mut sum = p.s[j] - rlp.c[j];
        let mut scale = p.s[j].max(rlp.c[j].abs());
        for i in 0..m {
            let term = rlp.a[(i, j)] * p.y[i];
            sum -= term;
            scale = scale.max(term.abs());
        }
        values.push(sum / scale);
        col_scale.push(scale);
    }
    values.extend(p.w.iter().zip(&p.y).map(|(a, b)| a * b / p.mu - 1.0));
    values.extend(p.x.iter().zip(&p.s).map(|(a, b)| a * b / p.mu - 1.0));
    Residual { values, row_scale, col_scale }
}

fn residual_norm(rlp: &RealLp, p: &PathSample) -> f64 {
    residual(rlp, p).values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

fn merit(values: &[f64]) -> f64 {
    values.iter().map(|v| v * v).sum()
}

/// Relative Newton direction `(δx, δw, δy, δs)`.
fn newton_direction(rlp: &RealLp, p: &PathSample, res: &Residual) -> Option<DVector<f64>> {
    let (m, n) = (rlp.nrows(), rlp.nvars());
    let dim = 2 * (m + n);
    let (ox, ow, oy, os) = (0, n, n + m, n + 2 * m);
    let mut jac = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..m {
        let rs = res.row_scale[i];
        for j in 0..n {
            jac[(i, ox + j)] = rlp.a[(i, j)] * p.x[j] / rs;
        }
        jac[(i, ow + i)] = p.w[i] / rs;
    }
    for j in 0..n {
        let cs = res.col_scale[j];
        for i in 0..m {
            jac[(m + j, oy + i)] = -rlp.a[(i, j)] * p.y[i] / cs;
        }
        jac[(m + j, os + j)] = p.s[j] / cs;
    }
    for i in 0..m {
        let q = p.w[i] * p.y[i] / p.mu;
        jac[(m + n + i, ow + i)] = q;
        jac[(m + n + i, oy + i)] = q;
    }
    for j in 0..n {
        let q = p.x[j] * p.s[j] / p.mu;
        jac[(2 * m + n + j, ox + j)] = q;
        jac[(2 * m + n + j, os + j)] = q;
    }
    let rhs = -DVector::from_column_slice(&res.values);
    let d = jac.lu().solve(&rhs)?;
    d.iter().all(|v| v.is_finite()).then_some(d)
}

fn apply(p: &PathSample, d: &DVector<f64>, alpha: f64) -> PathSample {
    let (n, m) = (p.x.len(), p.w.len());
    let step = |v: &[f64], off: usize| -> Vec<f64> {
        v.iter().enumerate().map(|(k, x)| x * (1.0 + alpha * d[off + k])).collect()
    };
    PathSample {
        lambda: p.lambda,
        mu: p.mu,
        x: step(&p.x, 0),
        w: step(&p.w, n),
        y: step(&p.y, n + m),
        s: step(&p.s, n + 2 * m),
        residual: f64::INFINITY,
    }
}

/// Solves the central path equations at `μ` by damped Newton from `start`.
pub fn central_point(rlp: &RealLp, mu: f64, start: &PathSample) -> Result<PathSample> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(NumericError::BadMu(mu));
    }
    let lambda = mu.ln() / rlp.t.ln();
    let mut p = start.clone();
    p.mu = mu;
    p.lambda = lambda;
    let positive = |p: &PathSample| {
        p.x.iter().chain(&p.w).chain(&p.y).chain(&p.s).position(|&v| !(v > 0.0))
    };
    if let Some(k) = positive(&p) {
        return Err(NumericError::NonPositive(k));
    }
    let mut res = residual(rlp, &p);
    let mut norm = res.values.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
    for _ in 0..NEWTON_MAX_ITER {
        if norm <= NEWTON_TOL {
            p.residual = norm;
            return Ok(p);
        }
        let d = newton_direction(rlp, &p, &res).ok_or(NumericError::Singular(lambda))?;
        let most_negative = d.iter().fold(0.0, |a: f64, v| a.min(*v));
        let mut alpha = if most_negative < 0.0 {
            (FRACTION_TO_BOUNDARY / -most_negative).min(1.0)
        } else {
            1.0
        };
        let current = merit(&res.values);
        let mut accepted = None;
        for _ in 0..40 {
            let cand = apply(&p, &d, alpha);
            let cres = residual(rlp, &cand);
            if merit(&cres.values) <= current * (1.0 - 1e-4 * alpha) {
                accepted = Some((cand, cres));
                break;
            }
            alpha *= 0.5;
        }
        let Some((next, nres)) = accepted else {
            break;
        };
        p = next;
        res = nres;
        norm = res.values.iter().fold(0.0, |a: f64, v| a.max(v.abs()));
    }
    if norm <= NEWTON_TOL {
        p.residual = norm;
        return Ok(p);
    }
    Err(NumericError::NonConvergence { lambda, residual: norm })
}

/// Moves from `from` to `λ = target`, bisecting the `λ` step on failure.
fn continue_to(rlp: &RealLp, from: &PathSample, target: f64) -> Result<PathSample> {
    let mut current = from.clone();
    let mut step = target - current.lambda;
    let mut bisections = 0;
    while current.lambda != target {
        let next_lambda = if (target - current.lambda).abs() <= step.abs() { target } else { current.lambda + step };
        match central_point(rlp, rlp.t.powf(next_lambda), &current) {
            Ok(mut p) => {
                p.lambda = next_lambda;
                current = p;
            }
            Err(e @ (NumericError::NonConvergence { .. } | NumericError::Singular(_))) => {
                bisections += 1;
                if bisections > MAX_BISECTIONS {
                    return Err(match e {
                        NumericError::NonConvergence { residual, .. } => {
                            NumericError::NonConvergence { lambda: next_lambda, residual }
                        }
                        _ => NumericError::Singular(next_lambda),
                    });
                }
                step /= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
    Ok(current)
}

/// Traces the central path at `μ = t^λ` for each `λ` of a strictly
/// decreasing grid, warm-starting each point from the previous one.
///
/// The trace starts at `max(λ₀, 2.5)` from the witness point. With a hint
/// (valuations of `(x, w)`), the solve runs in the rescaled variables
/// `x·t^{−hint}` and the samples are mapped back.
pub fn trace_path(rlp: &RealLp, grid: &[f64], hint: Option<&[f64]>) -> Result<Vec<PathSample>> {
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] > w[1])) || grid.iter().any(|v| !v.is_finite()) {
        return Err(NumericError::BadGrid);
    }
    let (work, scale) = match hint {
        Some(h) => {
            let (lp, s) = rlp.scaled(h)?;
            (lp, Some(s))
        }
        None => (rlp.clone(), None),
    };
    let witness = work.witness.as_ref().ok_or(NumericError::NoStartingPoint)?;
    let anchor = grid[0].max(ANCHOR_LAMBDA);
    let start = PathSample::from_primal(&work, witness, work.t.powf(anchor))?;
    let mut current = central_point(&work, start.mu, &start)?;
    current.lambda = anchor;
    let mut out = Vec::with_capacity(grid.len());
    for &lam in grid {
        current = continue_to(&work, &current, lam)?;
        out.push(current.clone());
    }
    if let Some(scale) = scale {
        let n = rlp.nvars();
        for p in &mut out {
            unscale(p, &scale, n);
        }
    }
    Ok(out)
}

fn unscale(p: &mut PathSample, scale: &[f64], n: usize) {
    for (j, v) in p.x.iter_mut().enumerate() {
        *v *= scale[j];
    }
    for (j, v) in p.s.iter_mut().enumerate() {
        *v /= scale[j];
    }
    for (i, v) in p.w.iter_mut().enumerate() {
        *v *= scale[n + i];
    }
    for (i, v) in p.y.iter_mut().enumerate() {
        *v /= scale[n + i];
    }
}

/// `log_t` of the primal-dual coordinates `(x, w, s, y)`.
pub fn log_map(sample: &PathSample, t: f64) -> Result<Vec<f64>> {
    let coords: Vec<f64> = sample.primal().into_iter().chain(sample.dual()).collect();
    if let Some(k) = coords.iter().position(|&v| !(v > 0.0)) {
        return Err(NumericError::NonPositive(k));
    }
    let lt = t.ln();
    Ok(coords.iter().map(|v| v.ln() / lt).collect())
}

/// Largest coordinatewise gap between `log_t` of the samples and the
/// primal-dual tropical path at the same `λ`.
pub fn dinfty_to_tropical<F>(samples: &[PathSample], trop_path: F, t: f64) -> Result<f64>
where
    F: Fn(f64) -> TropPathPoint,
{
    let mut worst: f64 = 0.0;
    for p in samples {
        let logs = log_map(p, t)?;
        let trop = trop_path(p.lambda).primal_dual_vector().to_f64();
        if trop.len() != logs.len() {
            return Err(NumericError::DimensionMismatch { expected: trop.len(), actual: logs.len() });
        }
        for (a, b) in logs.iter().zip(&trop) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// `λ = a, a − h, …, b` with `h = (a − b)/(n − 1)`.
pub fn descending_grid(hi: f64, lo: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|k| if k + 1 == n { lo } else { hi - h * k as f64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::{build_lp, trop_path_dynamic, CexParams};
    use crate::tropical::TropVector;
    use crate::Rational;
    use num_traits::FromPrimitive;

    fn one_d() -> RealLp {
        RealLp::new(
            DMatrix::from_element(1, 1, 1.0),
            DVector::from_element(1, 2.0),
            DVector::from_element(1, 1.0),
            std::f64::consts::E,
        )
        .unwrap()
    }

    fn trop_at(p: CexParams) -> impl Fn(f64) -> TropPathPoint {
        move |lam| trop_path_dynamic(p, &Rational::from_f64(lam).unwrap())
    }

    #[test]
    fn one_dimensional_closed_form() {
        let rlp = one_d();
        let start = PathSample::from_primal(&rlp, &[1.0, 1.0], 1.0).unwrap();
        let p = central_point(&rlp, 1.0, &start).unwrap();
        let r2 = 2f64.sqrt();
        assert!((p.x[0] - (2.0 - r2)).abs() < 1e-10);
        assert!((p.w[0] - r2).abs() < 1e-10);
        assert!((p.y[0] - 1.0 / r2).abs() < 1e-10);
        assert!((p.s[0] - (1.0 + 1.0 / r2)).abs() < 1e-10);
        assert!(p.complementarity_error() <= 1e-10);
    }

    #[test]
    fn instantiate_lp1() {
        let rlp = instantiate(&build_lp(CexParams::plain(1)).unwrap(), 10.0).unwrap();
        assert_eq!(rlp.b[0], 10.0);
        assert_eq!(rlp.b[1], 100.0);
        assert_eq!(rlp.a[(0, 0)], 1.0);
        assert_eq!(rlp.a[(1, 1)], 1.0);
        let ext = instantiate(&build_lp(CexParams { r: 1, extended: true }).unwrap(), 10.0).unwrap();
        assert!((ext.a[(5, 2)] + 0.01).abs() < 1e-15);
        assert_eq!(instantiate(&build_lp(CexParams::plain(1)).unwrap(), 1.0), Err(NumericError::ParameterTooSmall(1.0)));
    }

    #[test]
    fn lp1_at_mu_t_squared() {
        let rlp = instantiate(&build_lp(CexParams::plain(1)).unwrap(), 10.0).unwrap();
        let samples = trace_path(&rlp, &[2.0], None).unwrap();
        let logs = log_map(&samples[0], 10.0).unwrap();
        for (got, want) in logs[..4].iter().zip([1.0, 2.0, 2.0, 2.5]) {
            assert!((got - want).abs() < 0.5, "{got} vs {want}");
        }
    }

    #[test]
    fn lp1_trace_seventeen_samples() {
        let rlp = instantiate(&build_lp(CexParams::plain(1)).unwrap(), 10.0).unwrap();
        let grid = descending_grid(2.0, 0.0, 17);
        let samples = trace_path(&rlp, &grid, None).unwrap();
        assert_eq!(samples.len(), 17);
        for w in samples.windows(2) {
            assert!(w[1].x[1] <= w[0].x[1] * (1.0 + 1e-12));
        }
        for s in &samples {
            assert!(s.residual <= 1e-10);
            assert!(s.complementarity_error() <= 1e-10);
            assert!(s.duality_gap_error(&rlp) <= 1e-9);
        }
    }

    #[test]
    fn warm_and_cold_starts_agree() {
        let rlp = instantiate(&build_lp(CexParams::plain(2)).unwrap(), 10.0).unwrap();
        let warm = &trace_path(&rlp, &[2.0, 1.5, 1.0], None).unwrap()[2];
        let cold = &trace_path(&rlp, &[1.0], None).unwrap()[0];
        for (a, b) in warm.primal().iter().zip(cold.primal()) {
            assert!((a - b).abs() <= 1e-8 * a.abs());
        }
    }

    #[test]
    fn hint_scaling_gives_same_points() {
        let p = CexParams::plain(2);
        let rlp = instantiate(&build_lp(p).unwrap(), 10.0).unwrap();
        let hint = trop_path_dynamic(p, &Rational::from_integer(1.into())).primal_vector().to_f64();
        let grid = descending_grid(2.0, 0.0, 9);
        let plain = trace_path(&rlp, &grid, None).unwrap();
        let scaled = trace_path(&rlp, &grid, Some(&hint)).unwrap();
        for (a, b) in plain.iter().zip(&scaled) {
            for (u, v) in a.primal().iter().zip(b.primal()) {
                assert!((u - v).abs() <= 1e-6 * u.abs());
            }
        }
    }

    #[test]
    fn log_map_examples() {
        let p = PathSample {
            lambda: 0.0,
            mu: 1.0,
            x: vec![100.0, 1.0],
            w: vec![3.0 * 10f64.powf(1.5)],
            y: vec![1.0],
            s: vec![1.0, 1.0],
            residual: 0.0,
        };
        let l = log_map(&p, 10.0).unwrap();
        assert!((l[0] - 2.0).abs() < 1e-15);
        assert_eq!(l[1], 0.0);
        assert!((l[2] - (1.5 + 3f64.log10())).abs() < 1e-14);
        let mut bad = p.clone();
        bad.x[1] = 0.0;
        assert_eq!(log_map(&bad, 10.0), Err(NumericError::NonPositive(1)));
    }

    #[test]
    fn dinfty_of_tropical_path_against_itself_is_zero() {
        let p = CexParams::plain(2);
        let t: f64 = 10.0;
        let trop = trop_at(p);
        let lam = 0.75;
        let coords = trop(lam).primal_dual_vector().to_f64();
        let half = coords.len() / 2;
        let rlp = instantiate(&build_lp(p).unwrap(), t).unwrap();
        let n = rlp.nvars();
        let pow: Vec<f64> = coords.iter().map(|v| t.powf(*v)).collect();
        let sample = PathSample {
            lambda: lam,
            mu: t.powf(lam),
            x: pow[..n].to_vec(),
            w: pow[n..half].to_vec(),
            s: pow[half..half + n].to_vec(),
            y: pow[half + n..].to_vec(),
            residual: 0.0,
        };
        assert!(dinfty_to_tropical(&[sample], trop, t).unwrap() < 1e-12);
    }

    #[test]
    fn bad_grid_rejected() {
        let rlp = one_d();
        assert_eq!(trace_path(&rlp, &[], None), Err(NumericError::BadGrid));
        assert_eq!(trace_path(&rlp, &[0.0, 1.0], None), Err(NumericError::BadGrid));
    }

    #[test]
    fn primal_dual_vector_matches_log_layout() {
        let p = CexParams::plain(1);
        let v: TropVector = trop_path_dynamic(p, &Rational::from_integer(1.into())).primal_dual_vector();
        assert_eq!(v.len(), 18);
    }
}
