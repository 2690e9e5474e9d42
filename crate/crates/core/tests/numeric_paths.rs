use num_traits::FromPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropath::counterexample::{build_lp, trop_path_dynamic, CexParams};
use tropath::numeric::{
    central_point, descending_grid, dinfty_to_tropical, instantiate, trace_path, PathSample, RealLp,
};
use tropath::Rational;

fn dinfty(r: u32, t: f64, grid: &[f64]) -> f64 {
    let p = CexParams::plain(r);
    let rlp = instantiate(&build_lp(p).unwrap(), t).unwrap();
    let samples = trace_path(&rlp, grid, None).unwrap();
    dinfty_to_tropical(&samples, |l| trop_path_dynamic(p, &Rational::from_f64(l).unwrap()), t).unwrap()
}

/// Scales the witness towards the origin, which keeps `A x ≤ b` strict
/// because `b ≥ 0` for the family.
fn shrunk_start(rlp: &RealLp, theta: f64, mu: f64) -> PathSample {
    let n = rlp.nvars();
    let wit = rlp.witness.as_ref().unwrap();
    let x: Vec<f64> = wit[..n].iter().map(|v| v * theta).collect();
    let ax = &rlp.a * nalgebra::DVector::from_column_slice(&x);
    let mut primal = x.clone();
    primal.extend((0..rlp.nrows()).map(|i| rlp.b[i] - ax[i]));
    PathSample::from_primal(rlp, &primal, mu).unwrap()
}

#[test]
fn central_point_independent_of_start() {
    let rlp = instantiate(&build_lp(CexParams::plain(2)).unwrap(), 10.0).unwrap();
    let mu = 10f64.powf(2.0);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let reference = central_point(&rlp, mu, &shrunk_start(&rlp, 1.0, mu)).unwrap();
    for _ in 0..5 {
        let theta = rng.gen_range(0.3..1.0);
        let p = central_point(&rlp, mu, &shrunk_start(&rlp, theta, mu)).unwrap();
        for (a, b) in p.primal().iter().zip(reference.primal()) {
            assert!((a - b).abs() <= 1e-8 * b.abs(), "{a} vs {b}");
        }
    }
}

#[test]
fn accepted_samples_satisfy_kkt_identities() {
    for r in 1..=3 {
        for t in [10.0, 100.0, 1000.0] {
            let rlp = instantiate(&build_lp(CexParams::plain(r)).unwrap(), t).unwrap();
            for s in trace_path(&rlp, &descending_grid(2.0, 0.0, 33), None).unwrap() {
                assert!(s.complementarity_error() <= 1e-10, "r={r} t={t} lambda={}", s.lambda);
                assert!(s.duality_gap_error(&rlp) <= 1e-9);
                assert!(s.primal().iter().chain(&s.dual()).all(|v| *v > 0.0));
            }
        }
    }
}

#[test]
fn objective_decreases_along_the_path() {
    let rlp = instantiate(&build_lp(CexParams::plain(3)).unwrap(), 100.0).unwrap();
    let samples = trace_path(&rlp, &descending_grid(2.5, -0.5, 49), None).unwrap();
    for w in samples.windows(2) {
        assert!(w[1].x[1] < w[0].x[1], "{} {} -> {} {}", w[0].lambda, w[0].x[1], w[1].lambda, w[1].x[1]);
    }
}

#[test]
fn scaling_hint_does_not_change_the_path() {
    for r in 1..=3 {
        let p = CexParams::plain(r);
        let rlp = instantiate(&build_lp(p).unwrap(), 10.0).unwrap();
        let grid = descending_grid(2.0, 0.0, 17);
        let hint = trop_path_dynamic(p, &Rational::from_integer(2.into())).primal_vector().to_f64();
        let a = trace_path(&rlp, &grid, None).unwrap();
        let b = trace_path(&rlp, &grid, Some(&hint)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            for (u, v) in x.primal().iter().chain(&x.dual()).zip(y.primal().iter().chain(&y.dual())) {
                assert!((u - v).abs() <= 1e-6 * u.abs());
            }
        }
    }
}

#[test]
fn dinfty_shrinks_with_t_for_lp2() {
    let grid = descending_grid(2.0, 0.0, 33);
    let d: Vec<f64> = [10.0, 100.0, 1000.0].iter().map(|&t| dinfty(2, t, &grid)).collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
}

#[test]
fn single_sample_at_two_for_large_t() {
    let t = 1e4;
    let p = CexParams::plain(1);
    let rlp = instantiate(&build_lp(p).unwrap(), t).unwrap();
    let hint = trop_path_dynamic(p, &Rational::from_integer(2.into())).primal_vector().to_f64();
    let s = trace_path(&rlp, &[2.0], Some(&hint)).unwrap();
    let d = dinfty_to_tropical(&s, |l| trop_path_dynamic(p, &Rational::from_f64(l).unwrap()), t).unwrap();
    assert!(d <= 0.25, "{d}");
}

#[test]
fn extended_instance_traces() {
    let p = CexParams { r: 2, extended: true };
    let rlp = instantiate(&build_lp(p).unwrap(), 100.0).unwrap();
    let samples = trace_path(&rlp, &descending_grid(2.0, 0.0, 17), None).unwrap();
    let d = dinfty_to_tropical(&samples, |l| trop_path_dynamic(p, &Rational::from_f64(l).unwrap()), 100.0).unwrap();
    assert!(d.is_finite() && d < 1.0, "{d}");
}
