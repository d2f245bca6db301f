use bjortho_core::approximation::{dist_subspace, line_min};
use bjortho_core::operators::{attainment_sample, op_norm, DEFAULT_ATTAIN_TOL};
use bjortho_core::orthogonality::bj_op;
use bjortho_core::sip::{sip_eval, SipSelector};
use bjortho_core::spaces::{one_sided_derivatives, support_extremes};
use bjortho_core::{Error, Norm, Operator64, Space, Vector32, Vector64};
use proptest::prelude::*;

fn norm() -> impl Strategy<Value = Norm> {
    prop_oneof![Just(Norm::L1), Just(Norm::L2), Just(Norm::Lp(3.0)), Just(Norm::Lp(1.5)), Just(Norm::Linf)]
}

fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, n)
}

/// Nonzero vector pair in a random space; some coordinates snapped to
/// small integers so kinks of `l1` / `linf` come up.
fn vector_pair() -> impl Strategy<Value = (Vector64, Vector64)> {
    (norm(), 1usize..=5).prop_flat_map(|(norm, n)| {
        let snap = |v: Vec<f64>, k: u8| v.into_iter().map(|c| if k % 3 == 0 { c.round() } else { c }).collect::<Vec<_>>();
        (coords(n), coords(n), any::<u8>()).prop_filter_map("nonzero base", move |(x, y, k)| {
            let s = Space::new(n, norm).unwrap();
            let x = Vector64::new(s, snap(x, k)).unwrap();
            let y = Vector64::new(s, snap(y, k / 3)).unwrap();
            (!x.is_zero()).then_some((x, y))
        })
    })
}

/// Operator pairs between norms whose operator norm is computed exactly.
fn exact_pair(max_dim: usize) -> impl Strategy<Value = (Operator64, Operator64)> {
    let sides = prop_oneof![
        Just((Norm::L2, Norm::L2)),
        Just((Norm::L1, Norm::Lp(3.0))),
        Just((Norm::Linf, Norm::Linf)),
        Just((Norm::Lp(3.0), Norm::Linf)),
        Just((Norm::Linf, Norm::L1)),
    ];
    (sides, 1usize..=max_dim, 1usize..=max_dim).prop_flat_map(|((dn, cn), n, m)| {
        (coords(n * m), coords(n * m)).prop_map(move |(t, a)| {
            let (d, c) = (Space::new(n, dn).unwrap(), Space::new(m, cn).unwrap());
            (Operator64::from_flat(d, c, t).unwrap(), Operator64::from_flat(d, c, a).unwrap())
        })
    })
}

fn euclidean_triple() -> impl Strategy<Value = [Operator64; 3]> {
    (coords(9), coords(9), coords(9)).prop_map(|(t, b1, b2)| {
        let s = Space::lp(3, 2.0).unwrap();
        [t, b1, b2].map(|d| Operator64::from_flat(s, s, d).unwrap())
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn norm_is_homogeneous_and_subadditive((x, y) in vector_pair(), alpha in -4.0..4.0f64) {
        prop_assert!(close(x.scale(alpha).norm(), alpha.abs() * x.norm(), 1e-12));
        prop_assert!(x.add(&y).unwrap().norm() <= x.norm() + y.norm() + 1e-12);
        prop_assert!(x.norm() > 0.0);
    }

    #[test]
    fn one_sided_derivatives_are_consistent((x, y) in vector_pair()) {
        let d = one_sided_derivatives(&x, &y).unwrap();
        let ny = y.norm();
        prop_assert!(d.left <= d.right + 1e-12);
        prop_assert!(d.right.abs() <= ny + 1e-12 && d.left.abs() <= ny + 1e-12);
        let flipped = one_sided_derivatives(&x, &y.neg()).unwrap();
        prop_assert!(close(d.right, -flipped.left, 1e-12));
        // convexity brackets the derivatives by difference quotients
        let h = 1e-4 * x.norm();
        let fwd = (x.plus_scaled(h, &y).unwrap().norm() - x.norm()) / h;
        let bwd = (x.norm() - x.plus_scaled(-h, &y).unwrap().norm()) / h;
        prop_assert!(fwd >= d.right - 1e-8, "forward {} right {}", fwd, d.right);
        prop_assert!(bwd <= d.left + 1e-8, "backward {} left {}", bwd, d.left);
    }

    #[test]
    fn support_extremes_norm_x_and_span_the_derivatives((x, y) in vector_pair()) {
        let extremes = support_extremes(&x).unwrap();
        prop_assert!(!extremes.is_empty());
        let u = x.normalized().unwrap();
        let mut values = Vec::new();
        for f in &extremes {
            prop_assert!(close(f.dual_norm(), 1.0, 1e-10));
            prop_assert!(close(f.apply(&u).unwrap(), 1.0, 1e-10));
            values.push(f.apply(&y).unwrap());
        }
        let d = one_sided_derivatives(&x, &y).unwrap();
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        prop_assert!(close(hi, d.right, 1e-9), "max f(y) {} vs right derivative {}", hi, d.right);
        prop_assert!(close(lo, d.left, 1e-9), "min f(y) {} vs left derivative {}", lo, d.left);
    }

    #[test]
    fn semi_inner_product_axioms((x, y) in vector_pair(), alpha in -3.0..3.0f64, beta in 0.1..3.0f64) {
        let count = support_extremes(&x).unwrap().len();
        let z = x.plus_scaled(0.5, &y).unwrap();
        for k in 0..count.min(4) {
            let sel = SipSelector::ExtremeIndex(k);
            let n = x.norm();
            prop_assert!(close(sip_eval(&x, &x, sel).unwrap(), n * n, 1e-10));
            let yx = sip_eval(&y, &x, sel).unwrap();
            prop_assert!(yx.abs() <= n * y.norm() * (1.0 + 1e-10) + 1e-12);
            let lin = sip_eval(&y.add(&z).unwrap(), &x, sel).unwrap();
            prop_assert!(close(lin, yx + sip_eval(&z, &x, sel).unwrap(), 1e-10));
            let scaled = sip_eval(&y.scale(alpha), &x.scale(beta), sel).unwrap();
            prop_assert!(close(scaled, alpha * beta * yx, 1e-10));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_norm_is_homogeneous_and_subadditive((t, a) in exact_pair(4), c in -3.0..3.0f64) {
        let nt = op_norm(&t).value;
        prop_assert!(op_norm(&t).is_exact());
        prop_assert!(close(op_norm(&t.scale(c)).value, c.abs() * nt, 1e-9));
        prop_assert!(op_norm(&t.add(&a).unwrap()).value <= nt + op_norm(&a).value + 1e-9 * (1.0 + nt));
        for x in op_norm(&t).maximizers {
            prop_assert!(close(x.norm(), 1.0, 1e-9));
            prop_assert!(close(t.apply(&x).unwrap().norm(), nt, 1e-9));
        }
    }

    #[test]
    fn orthogonality_is_invariant_under_scaling((t, a) in exact_pair(3), c in 0.2..5.0f64, d in 0.2..5.0f64, flip in any::<(bool, bool)>()) {
        prop_assume!(!t.is_zero() && !a.is_zero());
        let (c, d) = (if flip.0 { -c } else { c }, if flip.1 { -d } else { d });
        let verdict = |t: &Operator64, a: &Operator64| match bj_op(t, a) {
            Ok(cert) => Some(cert.verdict),
            Err(Error::Inconclusive { .. }) => None,
            Err(e) => panic!("{e}"),
        };
        if let (Some(v), Some(w)) = (verdict(&t, &a), verdict(&t.scale(c), &a.scale(d))) {
            prop_assert_eq!(v, w);
        }
    }

    #[test]
    fn line_minimizer_makes_the_pair_orthogonal((t, a) in exact_pair(3)) {
        prop_assume!(!a.is_zero());
        let (l0, v) = line_min(&t, &a).unwrap();
        let shifted = t.plus_scaled(l0, &a).unwrap();
        prop_assert!(close(op_norm(&shifted).value, v, 1e-9));
        prop_assert!(v <= op_norm(&t).value + 1e-12);
        // when T is a multiple of A the shifted operator is rounding noise
        if v > 1e-9 * (op_norm(&t).value + op_norm(&a).value) {
            match bj_op(&shifted, &a) {
                Ok(cert) => prop_assert!(cert.verdict, "lambda0 {} value {}", l0, v),
                Err(Error::Inconclusive { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn attainment_points_reach_the_norm((t, _) in exact_pair(3), seed in any::<u64>()) {
        prop_assume!(!t.is_zero());
        let s = attainment_sample(&t, DEFAULT_ATTAIN_TOL, 512, seed).unwrap();
        let nt = op_norm(&t).value;
        prop_assert!(!s.points.is_empty());
        for x in &s.points {
            prop_assert!(close(x.norm(), 1.0, 1e-9));
            prop_assert!(t.apply(x).unwrap().norm() >= (1.0 - DEFAULT_ATTAIN_TOL) * nt - 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn euclidean_line_minimizer_is_orthogonal([t, a, _] in euclidean_triple()) {
        let (l0, _) = line_min(&t, &a).unwrap();
        prop_assert!(bj_op(&t.plus_scaled(l0, &a).unwrap(), &a).unwrap().verdict);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn distance_shrinks_as_the_subspace_grows([t, b1, b2] in euclidean_triple()) {
        let one = dist_subspace(&t, std::slice::from_ref(&b1)).unwrap();
        let two = dist_subspace(&t, &[b1, b2]).unwrap();
        let nt = op_norm(&t).value;
        prop_assert!(two.dist_min <= one.dist_min + 1e-9);
        prop_assert!(one.dist_min >= 0.0 && one.dist_min <= nt + 1e-9);
        prop_assert!(two.dist_min >= 0.0);
    }
}

#[test]
fn orthogonality_is_not_symmetric() {
    let s = Space::lp(2, 2.0).unwrap();
    let t = Operator64::from_f64(s, s, &[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
    // A e1 = e2, so T e1 _|_ A e1; the top singular vector of A is (1, phi),
    // where <Ax, Tx> = phi / (1 + phi^2) != 0.
    let a = Operator64::from_f64(s, s, &[&[0.0, 1.0], &[1.0, 1.0]]).unwrap();
    assert!(bj_op(&t, &a).unwrap().verdict);
    assert!(!bj_op(&a, &t).unwrap().verdict);
}

#[test]
fn single_precision_tracks_double() {
    for norm in [Norm::L1, Norm::L2, Norm::Lp(3.0), Norm::Linf] {
        let s = Space::new(3, norm).unwrap();
        let x = Vector32::from_f64(s, &[0.5, -1.25, 2.0]).unwrap();
        let y = Vector64::from_f64(s, &[0.5, -1.25, 2.0]).unwrap();
        assert!((x.norm() as f64 - y.norm()).abs() < 1e-6);
    }
}

#[test]
fn near_tied_maximizers_stay_separate() {
    // rows of equal dual norm with nearly parallel norming points, 5.6e-3
    // apart: M_T is two antipodal pairs, not a connected arc
    let d = Space::lp(2, 1.5).unwrap();
    let c = Space::linf(2).unwrap();
    let t = Operator64::from_f64(d, c, &[&[0.2897884185187144, 1.7081026679055173], &[0.31659083661219123, 1.7072572480641082]]).unwrap();
    let a = Operator64::from_f64(d, c, &[&[-0.08550318385367599, 0.012085361936144595], &[0.3459946943181097, -1.066136934499532]]).unwrap();
    let (l0, _) = line_min(&t, &a).unwrap();
    let t = t.plus_scaled(l0, &a).unwrap();
    assert!(bj_op(&t, &a).unwrap().verdict);
    for seed in 0..4 {
        let s = attainment_sample(&t, DEFAULT_ATTAIN_TOL, 2048, seed).unwrap();
        assert_eq!(s.component_count(), 4, "seed {seed}");
        assert!(!s.antipodal_ok);
    }
}
