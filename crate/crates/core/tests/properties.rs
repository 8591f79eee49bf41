use cstar_pm::cmetric::{diag_metric, CStarMetric, DiagMetric};
use cstar_pm::contraction::{shrink_certificate, AffineMap2, ContractionConstant};
use cstar_pm::ddf::exp_trace;
use cstar_pm::symcone::congruence;
use cstar_pm::tnorm::iterate;
use cstar_pm::{make_ratio_pm, make_trace_pm, picard_solve, PicardOptions, PointR2, PositiveElement, SymMatrix, TMin, TProd};
use proptest::prelude::*;

fn sym2() -> impl Strategy<Value = SymMatrix> {
    (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64)
        .prop_map(|(a, b, c)| SymMatrix::from_rows(&[vec![a, b], vec![b, c]]).unwrap())
}

fn gram(entries: [f64; 4]) -> SymMatrix {
    let [p, q, r, s] = entries;
    SymMatrix::from_rows(&[vec![p * p + q * q, p * r + q * s], vec![p * r + q * s, r * r + s * s]]).unwrap()
}

fn pos2() -> impl Strategy<Value = PositiveElement> {
    prop::array::uniform4(-2.0..2.0f64).prop_map(|e| PositiveElement::new(gram(e)).unwrap())
}

fn above(floor: f64) -> impl Strategy<Value = SymMatrix> {
    prop::array::uniform4(-1.5..1.5f64).prop_map(move |e| &gram(e) + &SymMatrix::scalar(2, floor))
}

fn point() -> impl Strategy<Value = PointR2> {
    (-50.0..50.0f64, -50.0..50.0f64).prop_map(|(x, y)| PointR2::new(x, y))
}

proptest! {
    #[test]
    fn sylvester_agrees_with_spectrum(m in sym2()) {
        let (a, b, c) = (m.get(0, 0), m.get(0, 1), m.get(1, 1));
        let det = a * c - b * b;
        let margin = 1e-6;
        if a > margin && c > margin && det > margin {
            prop_assert!(m.is_positive());
        }
        if a < -margin || c < -margin || det < -margin {
            prop_assert!(!m.is_positive());
        }
    }

    #[test]
    fn sqrt_squares_back(p in pos2()) {
        let r = p.sqrt();
        prop_assert!(r.is_positive());
        let back = congruence(&r, &PositiveElement::identity(2)).unwrap();
        let err = (&back - p.matrix()).max_abs_entry();
        prop_assert!(err <= 1e-10 * (1.0 + p.op_norm()), "err {err}");
    }

    #[test]
    fn eigen_recomposes(m in sym2()) {
        let e = m.eigen();
        let err = (&e.recompose(&e.values) - &m).max_abs_entry();
        prop_assert!(err <= 1e-12 * (1.0 + m.frobenius_norm()));
    }

    #[test]
    fn loewner_is_a_partial_order(a in sym2(), p in pos2(), q in pos2()) {
        let b = &a + p.matrix();
        let c = &b + q.matrix();
        prop_assert!(a.loewner_leq(&a).unwrap());
        prop_assert!(a.loewner_leq(&b).unwrap());
        prop_assert!(b.loewner_leq(&c).unwrap());
        prop_assert!(a.loewner_leq(&c).unwrap());
        if b.loewner_leq(&a).unwrap() {
            prop_assert!((&b - &a).max_abs_entry() <= 1e-8 * (1.0 + a.op_norm()));
        }
    }

    #[test]
    fn congruence_preserves_positivity(a in sym2(), t in pos2()) {
        prop_assert!(congruence(&a, &t).unwrap().is_positive());
    }

    #[test]
    fn shrinking_holds_in_norm_and_trace(a in above(1.05), t in pos2()) {
        prop_assume!(!t.is_theta());
        let a = ContractionConstant::new(a).unwrap();
        let cert = shrink_certificate(&a, &t).unwrap();
        prop_assert!(a.inv_norm() < 1.0);
        prop_assert!(cert.norm_margin > 0.0);
        prop_assert!(cert.op_norm_margin > -1e-12);
        prop_assert!(cert.trace_margin > -1e-12);
        let shrunk = congruence(a.inverse(), &t).unwrap();
        let bound = SymMatrix::scalar(2, a.inv_norm().powi(2) * t.op_norm());
        prop_assert!(shrunk.loewner_leq(&bound).unwrap());
    }

    #[test]
    fn diag_metric_axioms(p in point(), q in point(), r in point()) {
        let m = DiagMetric;
        prop_assert!(m.distance(&p, &q).is_positive());
        prop_assert_eq!(m.distance(&p, &q), m.distance(&q, &p));
        let via = &m.distance(&p, &r) + &m.distance(&r, &q);
        prop_assert!(m.distance(&p, &q).loewner_leq(&via).unwrap());
        prop_assert!(m.distance(&p, &p).is_zero());
        prop_assert_eq!(diag_metric(&p, &q).into_matrix(), m.distance(&p, &q));
    }

    #[test]
    fn exp_trace_monotone(a in pos2(), bump in pos2()) {
        let b = a.plus(&bump).unwrap();
        prop_assert!(exp_trace(&a) <= exp_trace(&b) + 1e-12);
        prop_assert!((0.0..=1.0).contains(&exp_trace(&a)));
    }

    #[test]
    fn pm_distributions_symmetric_and_bounded(p in point(), q in point(), c in pos2()) {
        for space in [make_trace_pm(DiagMetric), make_ratio_pm(DiagMetric)] {
            let (f, g) = (space.distribution(&p, &q, &c), space.distribution(&q, &p, &c));
            prop_assert_eq!(f, g);
            prop_assert!((0.0..=1.0).contains(&f));
        }
    }

    #[test]
    fn pm_triangle_with_t_min(p in point(), q in point(), r in point(), a in pos2(), b in pos2()) {
        for space in [make_trace_pm(DiagMetric), make_ratio_pm(DiagMetric)] {
            let sum = a.plus(&b).unwrap();
            let lhs = space.distribution(&p, &r, &sum);
            let rhs = space.distribution(&p, &q, &a).min(space.distribution(&q, &r, &b));
            prop_assert!(lhs >= rhs - 1e-12, "{} < {}", lhs, rhs);
        }
    }

    #[test]
    fn tnorm_iterates_do_not_increase(a in 0.0..=1.0f64, n in 1u64..200) {
        for t in [&TMin as &dyn cstar_pm::TNorm, &TProd] {
            prop_assert!(iterate(t, a, n + 1).unwrap() <= iterate(t, a, n).unwrap());
        }
    }

    #[test]
    fn affine_error_is_geometric(
        alpha in (-5.0..5.0f64, -5.0..5.0f64),
        lambda in (0.05..0.95f64, 0.05..0.95f64),
        start in point(),
    ) {
        let map = AffineMap2::new(alpha, lambda).unwrap();
        let star = map.fixed_point();
        let space = make_trace_pm(DiagMetric);
        let trace = picard_solve(&space, |p| map.apply(p), &start, &PicardOptions::default()).unwrap();
        prop_assert!(trace.converged);
        let e0 = space.distance(&start, &star).op_norm();
        for (n, p) in trace.iterates.iter().enumerate() {
            let e = space.distance(p, &star).op_norm();
            prop_assert!(e <= map.rate().powi(n as i32) * e0 + 1e-9, "step {n}: {e}");
        }
    }

    #[test]
    fn certificate_grows_geometrically(
        alpha in (-5.0..5.0f64, -5.0..5.0f64),
        lambda in (0.05..0.95f64, 0.05..0.95f64),
        start in point(),
    ) {
        let map = AffineMap2::new(alpha, lambda).unwrap();
        let a = map.contraction_constant().unwrap();
        let space = make_trace_pm(DiagMetric);
        let options = PicardOptions::default();
        let trace = picard_solve(&space, |p| map.apply(p), &start, &options).unwrap();
        let (p0, p1) = (&trace.iterates[0], &trace.iterates[1]);
        for (n, cert) in trace.cert_values.iter().enumerate().take(60) {
            let grown = a.enlarge_n(&options.t_ref, n as u32).unwrap();
            let floor = space.distribution(p0, p1, &grown);
            prop_assert!(*cert >= floor - 1e-9, "step {n}: {cert} < {floor}");
        }
    }
}
