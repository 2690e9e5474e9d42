//! Total curvature of polygonal curves and its tropical lower bounds.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counterexample::{trop_path_closed, CexParams};
use crate::tropical::{euclid_angle, trop_angle, TropAngle, TropVector, TropicalError};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvatureError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("the dual bound needs r >= 2, got {0}")]
    DualNeedsR2(u32),
    #[error(transparent)]
    Tropical(#[from] TropicalError),
}

/// Per-vertex turning angles of a polygonal curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    #[serde(rename = "total_radians")]
    pub total: f64,
    pub angles: Vec<f64>,
    /// Parameter values of the vertices, when known.
    pub subdivision: Vec<f64>,
}

/// Relative distance below which consecutive samples are merged.
pub const MERGE_TOL: f64 = 1e-9;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().chain(b).fold(0.0, |m: f64, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    a.iter().zip(b).map(|(x, y)| ((x - y) / scale).powi(2)).sum::<f64>().sqrt()
}

/// Sum of the angles between consecutive segments. Exactly repeated
/// consecutive points are an error.
pub fn polygonal_curvature(points: &[Vec<f64>]) -> Result<CurvatureReport, CurvatureError> {
    if points.len() < 3 {
        return Err(CurvatureError::TooFewPoints(points.len()));
    }
    let mut angles = Vec::with_capacity(points.len() - 2);
    for (k, w) in points.windows(3).enumerate() {
        match euclid_angle(&w[0], &w[1], &w[2]) {
            Ok(a) => angles.push(a),
            Err(TropicalError::ZeroLengthSegment(s)) => {
                let i = k + s;
                return Err(CurvatureError::DuplicatePoint(i, i + 1));
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(CurvatureReport {
        total: angles.iter().sum(),
        angles,
        subdivision: (0..points.len()).map(|k| k as f64).collect(),
    })
}

/// Like [`polygonal_curvature`] but first merges samples closer than
/// [`MERGE_TOL`] (relative) to the last kept one. `params` labels the points.
pub fn merged_curvature(points: &[Vec<f64>], params: &[f64]) -> Result<CurvatureReport, CurvatureError> {
    let mut kept: Vec<usize> = Vec::new();
    for k in 0..points.len() {
        match kept.last() {
            Some(&last) if dist(&points[last], &points[k]) < MERGE_TOL => {}
            _ => kept.push(k),
        }
    }
    let pts: Vec<Vec<f64>> = kept.iter().map(|&k| points[k].clone()).collect();
    let mut report = polygonal_curvature(&pts)?;
    report.subdivision = kept.iter().map(|&k| params.get(k).copied().unwrap_or(k as f64)).collect();
    Ok(report)
}

/// Number of interior vertices where the tropical angle is a right angle.
pub fn right_angle_count(points: &[TropVector]) -> Result<u64, CurvatureError> {
    if points.len() < 3 {
        return Err(CurvatureError::TooFewPoints(points.len()));
    }
    let mut count = 0;
    for w in points.windows(3) {
        if trop_angle(&w[0], &w[1], &w[2])? == TropAngle::Right {
            count += 1;
        }
    }
    Ok(count)
}

/// `Σ ∠(p_{k−1}, p_k, p_{k+1})` over interior vertices, tropical angles.
pub fn tropical_lower_bound(points: &[TropVector]) -> Result<f64, CurvatureError> {
    Ok(right_angle_count(points)? as f64 * FRAC_PI_2)
}

/// `(2^{r−1} − 1)·π/2`.
pub fn cex_bound(r: u32) -> f64 {
    ((1u64 << (r.max(1) - 1)) - 1) as f64 * FRAC_PI_2
}

/// `(2^r − 1)·π/2`, the bound for the dual path of the extended instance.
pub fn dual_cex_bound(r: u32) -> Result<f64, CurvatureError> {
    if r < 2 {
        return Err(CurvatureError::DualNeedsR2(r));
    }
    Ok(((1u64 << r) - 1) as f64 * FRAC_PI_2)
}

/// Primal-dual tropical path of `LP_r` at `λ_k = 4k/2^r`, `k = 0..=2^{r−1}`.
pub fn cex_subdivision(r: u32) -> Vec<TropVector> {
    let p = CexParams::plain(r);
    let den = num_bigint::BigInt::from(1u8) << r as usize;
    (0..=(1u64 << (r - 1)))
        .map(|k| {
            let lam = Rational::new((4 * k).into(), den.clone());
            trop_path_closed(p, &lam).primal_dual_vector()
        })
        .collect()
}

/// Dual tropical path of the extended `LP_r` at `λ'_k = 2k/2^r`, `k = 0..=2^r`.
pub fn dual_cex_subdivision(r: u32) -> Vec<TropVector> {
    let p = CexParams { r, extended: true };
    let den = num_bigint::BigInt::from(1u8) << r as usize;
    (0..=(1u64 << r))
        .map(|k| {
            let lam = Rational::new((2 * k).into(), den.clone());
            TropVector::from_rationals(trop_path_closed(p, &lam).dual())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pts(v: &[[f64; 2]]) -> Vec<Vec<f64>> {
        v.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn polygon_examples() {
        let col = polygonal_curvature(&pts(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])).unwrap();
        assert!(col.total.abs() < 1e-12);
        let sq = polygonal_curvature(&pts(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])).unwrap();
        assert!((sq.total - PI).abs() < 1e-12);
        assert_eq!(sq.angles.len(), 2);
        let l = polygonal_curvature(&pts(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])).unwrap();
        assert!((l.total - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn polygon_errors() {
        assert_eq!(
            polygonal_curvature(&pts(&[[0.0, 0.0], [1.0, 0.0]])),
            Err(CurvatureError::TooFewPoints(2))
        );
        assert_eq!(
            polygonal_curvature(&pts(&[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [2.0, 1.0]])),
            Err(CurvatureError::DuplicatePoint(1, 2))
        );
    }

    #[test]
    fn merging_drops_near_duplicates() {
        let p = pts(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1e-13], [1.0, 1.0]]);
        let rep = merged_curvature(&p, &[0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(rep.subdivision, [0.0, 1.0, 3.0]);
        assert!((rep.total - FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn bounds() {
        assert_eq!(cex_bound(1), 0.0);
        assert_eq!(cex_bound(3), 3.0 * FRAC_PI_2);
        assert_eq!(cex_bound(5), 15.0 * FRAC_PI_2);
        assert_eq!(dual_cex_bound(2).unwrap(), 3.0 * FRAC_PI_2);
        assert_eq!(dual_cex_bound(3).unwrap(), 7.0 * FRAC_PI_2);
        assert_eq!(dual_cex_bound(1), Err(CurvatureError::DualNeedsR2(1)));
    }

    #[test]
    fn tropical_bound_on_subdivisions() {
        assert_eq!(right_angle_count(&cex_subdivision(3)).unwrap(), 3);
        assert_eq!(right_angle_count(&cex_subdivision(4)).unwrap(), 7);
        assert_eq!(right_angle_count(&dual_cex_subdivision(2)).unwrap(), 3);
        let flat = vec![TropVector::from_ints(&[1, 2]); 4];
        assert_eq!(tropical_lower_bound(&flat).unwrap(), 0.0);
    }

    #[test]
    fn quarter_circle_refinement() {
        let arc = |n: usize| -> Vec<Vec<f64>> {
            (0..=n)
                .map(|k| {
                    let a = FRAC_PI_2 * k as f64 / n as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect()
        };
        let mut prev = 0.0;
        for n in [2, 4, 8, 16, 32, 64] {
            let total = polygonal_curvature(&arc(n)).unwrap().total;
            assert!(total >= prev - 1e-9);
            prev = total;
        }
    }

    #[test]
    fn report_json_shape() {
        let rep = polygonal_curvature(&pts(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]])).unwrap();
        let v = serde_json::to_value(&rep).unwrap();
        assert!(v.get("total_radians").is_some());
        assert!(v.get("angles").is_some());
        assert!(v.get("subdivision").is_some());
    }
}
