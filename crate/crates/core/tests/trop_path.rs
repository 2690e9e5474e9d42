use num_bigint::BigInt;
use proptest::prelude::*;
use tropath::counterexample::{
    build_lp, sublevel_system, trop_path_closed, trop_path_dynamic, upper_box, CexParams,
};
use tropath::tropical::{rat, TropScalar};
use tropath::troppoly::{barycenter, membership, on_vertex_edge_graph};
use tropath::Rational;

fn dyadic(k: i64, e: u32) -> Rational {
    Rational::new(k.into(), BigInt::from(1) << e as usize)
}

#[test]
fn closed_equals_dynamic_on_dyadic_grids() {
    for r in 1..=10u32 {
        let p = CexParams::plain(r);
        let e = r + 2;
        for k in 0..=(1i64 << (r + 3)) {
            let lam = dyadic(k, e);
            assert_eq!(trop_path_closed(p, &lam), trop_path_dynamic(p, &lam), "r={r} lambda={lam}");
        }
    }
}

#[test]
fn extended_closed_equals_dynamic() {
    for r in 1..=6u32 {
        let p = CexParams { r, extended: true };
        for k in -8..=(1i64 << (r + 3)) + 8 {
            let lam = dyadic(k, r + 2);
            assert_eq!(trop_path_closed(p, &lam), trop_path_dynamic(p, &lam));
        }
    }
}

/// Largest coordinate of the primal-dual point at `λ_k = 4k/2^r`.
#[test]
fn maximal_coordinate_at_subdivision() {
    for r in 2..=8u32 {
        let p = CexParams::plain(r);
        let lp = build_lp(p).unwrap();
        let names = lp.coordinate_names();
        let pos = |n: &str| names.iter().position(|m| m == n).unwrap();
        let (zr, zpr) = (pos(&format!("z{r}")), pos(&format!("zp{r}")));
        for k in 0..=(1i64 << (r - 1)) {
            let lam = dyadic(4 * k, r);
            let v = trop_path_closed(p, &lam).primal_dual_vector();
            let top = v.max_entry();
            let arg = v.argmax();
            let want = TropScalar::Finite(Rational::from_integer(r.into()) + dyadic(2 * k + 2, r));
            assert_eq!(top, want, "r={r} k={k}");
            assert_eq!(arg, vec![if k % 2 == 0 { zpr } else { zr }], "r={r} k={k}");
        }
    }
}

#[test]
fn path_points_are_feasible_with_tight_rows() {
    for r in 1..=4u32 {
        let p = CexParams::plain(r);
        let lp = build_lp(p).unwrap();
        let sys = lp.tropical_slack_form().unwrap();
        for k in -4..=20 {
            let x = trop_path_dynamic(p, &dyadic(k, 3)).primal_vector();
            assert!(membership(&sys, &x).unwrap());
        }
    }
}

#[test]
fn barycenter_of_sublevel_lifts_the_path() {
    for r in 1..=3u32 {
        let p = CexParams::plain(r);
        let lp = build_lp(p).unwrap();
        let top = upper_box(p);
        for k in 0..=32 {
            let lam = dyadic(k, 4);
            let sys = sublevel_system(&lp, &lam).unwrap();
            let b = barycenter(&sys, &top).unwrap();
            assert_eq!(b, trop_path_dynamic(p, &lam).primal_vector(), "r={r} lambda={lam}");
        }
    }
}

#[test]
fn path_points_lie_on_vertex_edge_graph() {
    for r in 1..=3u32 {
        let p = CexParams::plain(r);
        let lp = build_lp(p).unwrap();
        let sys = lp.tropical_inequalities().unwrap();
        let n = lp.nvars();
        for k in 0..=32 {
            let pt = trop_path_dynamic(p, &dyadic(k, 4));
            let x = tropath::tropical::TropVector::from_rationals(pt.primal()[..n].to_vec());
            assert!(on_vertex_edge_graph(&sys, &x, n).unwrap(), "r={r} k={k}");
        }
    }
}

fn lambda_strategy() -> impl Strategy<Value = Rational> {
    (-64i64..=192).prop_map(|k| dyadic(k, 6))
}

proptest! {
    #[test]
    fn path_is_monotone_and_one_lipschitz(r in 1u32..=6, a in lambda_strategy(), b in lambda_strategy()) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let p = CexParams::plain(r);
        let x = trop_path_dynamic(p, &lo).primal();
        let y = trop_path_dynamic(p, &hi).primal();
        let gap = &hi - &lo;
        for (xi, yi) in x.iter().zip(&y) {
            prop_assert!(xi <= yi);
            prop_assert!(*yi <= xi + &gap);
        }
    }

    #[test]
    fn constant_above_two(r in 1u32..=6, k in 0i64..64) {
        let p = CexParams::plain(r);
        let lam = rat(2, 1) + dyadic(k, 3);
        prop_assert_eq!(trop_path_dynamic(p, &lam).primal(), trop_path_dynamic(p, &rat(2, 1)).primal());
    }
}
