use normderiv_core::derivative::{rho_pair, Side};
use normderiv_core::linalg::Matrix;
use normderiv_core::operator::{norm_attainment_set, op_norm, rho_pm_operator, OperatorMatrix};
use normderiv_core::orthogonality::{check_rho_characterization, check_rho_pm_characterization};
use normderiv_core::smoothness::{classify, AdditivityConfig};
use normderiv_core::support::support_set;
use normderiv_core::{dual_norm, norm, SpaceDescriptor, Vector};
use proptest::prelude::*;

fn space_strategy() -> impl Strategy<Value = SpaceDescriptor> {
    (0usize..5, 2usize..5).prop_map(|(k, n)| match k {
        0 => SpaceDescriptor::L1(n),
        1 => SpaceDescriptor::LInf(n),
        2 => SpaceDescriptor::lp(n, 1.5).unwrap(),
        3 => SpaceDescriptor::lp(n, 3.0).unwrap(),
        _ => SpaceDescriptor::Euclidean(n),
    })
}

/// Coordinates drawn from a small integer lattice half the time, so zeros and
/// ties in absolute value are common.
fn coords(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop_oneof![
        prop::collection::vec(-3i8..=3, n).prop_map(|v| v.into_iter().map(f64::from).collect()),
        prop::collection::vec(-5.0f64..5.0, n),
    ]
}

fn instance() -> impl Strategy<Value = (SpaceDescriptor, Vector, Vector)> {
    space_strategy().prop_flat_map(|s| {
        let n = s.dim();
        (Just(s), coords(n), coords(n)).prop_map(|(s, x, y)| (s, Vector::new(x), Vector::new(y)))
    })
}

fn scale(s: &SpaceDescriptor, x: &Vector, y: &Vector) -> f64 {
    norm(s, x).unwrap() * norm(s, y).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn minus_never_exceeds_plus((s, x, y) in instance()) {
        let p = rho_pair(&s, &x, &y).unwrap();
        prop_assert!(p.minus <= p.plus + 1e-12 * scale(&s, &x, &y).max(1.0));
    }

    #[test]
    fn derivatives_are_bounded((s, x, y) in instance()) {
        let p = rho_pair(&s, &x, &y).unwrap();
        let b = scale(&s, &x, &y) * (1.0 + 1e-12);
        prop_assert!(p.plus.abs() <= b + 1e-300 && p.minus.abs() <= b + 1e-300);
    }

    #[test]
    fn homogeneous_in_direction((s, x, y) in instance(), a in -4.0f64..4.0) {
        let p = rho_pair(&s, &x, &y).unwrap();
        let q = rho_pair(&s, &x, &y.scaled(a)).unwrap();
        let tol = 1e-9 * scale(&s, &x, &y).max(1.0) * a.abs().max(1.0);
        if a >= 0.0 {
            prop_assert!((q.plus - a * p.plus).abs() <= tol);
            prop_assert!((q.minus - a * p.minus).abs() <= tol);
        } else {
            prop_assert!((q.plus - a * p.minus).abs() <= tol);
            prop_assert!((q.minus - a * p.plus).abs() <= tol);
        }
    }

    #[test]
    fn homogeneous_in_base_point((s, x, y) in instance(), a in 0.1f64..4.0) {
        let p = rho_pair(&s, &x, &y).unwrap();
        let q = rho_pair(&s, &x.scaled(a), &y).unwrap();
        let tol = 1e-9 * scale(&s, &x, &y).max(1.0) * a;
        prop_assert!((q.plus - a * p.plus).abs() <= tol);
        prop_assert!((q.minus - a * p.minus).abs() <= tol);
    }

    #[test]
    fn shifting_along_the_base_point((s, x, y) in instance(), a in -3.0f64..3.0) {
        let nx = norm(&s, &x).unwrap();
        let p = rho_pair(&s, &x, &y).unwrap();
        let q = rho_pair(&s, &x, &y.combine(1.0, &x, a)).unwrap();
        let tol = 1e-9 * (scale(&s, &x, &y) + nx * nx * a.abs()).max(1.0);
        prop_assert!((q.plus - p.plus - a * nx * nx).abs() <= tol);
        prop_assert!((q.minus - p.minus - a * nx * nx).abs() <= tol);
    }

    #[test]
    fn extremes_are_support_functionals((s, x, _y) in instance()) {
        prop_assume!(!x.is_zero());
        let nx = norm(&s, &x).unwrap();
        for f in support_set(&s, &x).unwrap().extremes() {
            prop_assert!((dual_norm(&s, f).unwrap() - 1.0).abs() < 1e-9);
            let fx: f64 = f.coords().iter().zip(x.coords()).map(|(a, b)| a * b).sum();
            prop_assert!((fx - nx).abs() < 1e-9 * nx);
        }
    }

    #[test]
    fn characterizations_agree_with_derivatives((s, x, y) in instance()) {
        prop_assume!(!x.is_zero());
        let r = check_rho_characterization(&s, &x, &y, 1e-9).unwrap();
        prop_assert!(r.agrees_with_derivative);
        prop_assert_eq!(r.holds, r.reduction_holds);
        for side in [Side::Plus, Side::Minus] {
            let c = check_rho_pm_characterization(&s, &x, &y, side, 1e-9).unwrap();
            prop_assert!(c.agrees_with_derivative, "{:?}", c);
        }
    }

    #[test]
    fn projected_directions_are_rho_orthogonal((s, x, y) in instance()) {
        prop_assume!(!x.is_zero());
        let nx = norm(&s, &x).unwrap();
        let p = rho_pair(&s, &x, &y).unwrap();
        let c = p.mean() / (nx * nx);
        let z = y.combine(1.0, &x, -c);
        let q = rho_pair(&s, &x, &z).unwrap();
        let c = check_rho_characterization(&s, &x, &z, 1e-9).unwrap();
        prop_assert!(q.mean().abs() <= 1e-9 * nx * (norm(&s, &y).unwrap() + c.derivative.abs()).max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn smoothness_report_is_consistent((s, x, _y) in instance()) {
        prop_assume!(!x.is_zero());
        let r = classify(&s, &x, &AdditivityConfig::default()).unwrap();
        prop_assert_eq!(r.rho_plus, r.rho_minus);
        prop_assert!(!r.classical || r.rho_plus);
        prop_assert!(!r.rho_plus || r.rho);
        // rho±-smooth points of these spaces are exactly the smooth ones
        prop_assert_eq!(r.rho_plus, r.classical);
        if let Some(g) = &r.hyperplane_functional {
            let gx: f64 = g.coords().iter().zip(x.coords()).map(|(a, b)| a * b).sum();
            let nx = norm(&s, &x).unwrap();
            prop_assert!((gx - nx).abs() <= 1e-8 * nx);
        }
    }

    #[test]
    fn operator_derivative_bounds(entries in prop::collection::vec(-3.0f64..3.0, 9), dir in prop::collection::vec(-3.0f64..3.0, 9)) {
        let rows = |v: &[f64]| -> Vec<Vec<f64>> { v.chunks(3).map(|c| c.to_vec()).collect() };
        let t = OperatorMatrix::hilbert(Matrix::from_rows(&rows(&entries)).unwrap());
        let a = OperatorMatrix::hilbert(Matrix::from_rows(&rows(&dir)).unwrap());
        prop_assume!(!t.is_zero());
        let plus = rho_pm_operator(&t, &a, Side::Plus).unwrap().value;
        let minus = rho_pm_operator(&t, &a, Side::Minus).unwrap().value;
        let b = op_norm(&t).unwrap() * op_norm(&a).unwrap();
        prop_assert!(minus <= plus + 1e-9 * b.max(1.0));
        prop_assert!(plus.abs() <= b * (1.0 + 1e-9) + 1e-12 && minus.abs() <= b * (1.0 + 1e-9) + 1e-12);
        let m = norm_attainment_set(&t).unwrap();
        let tn = op_norm(&t).unwrap();
        for u in m.vectors() {
            let tu = t.apply(u).unwrap();
            prop_assert!((norm(t.codomain(), &tu).unwrap() - tn).abs() <= 1e-8 * tn);
        }
    }
}
