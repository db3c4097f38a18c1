//! Exact computations checked against independent brute-force oracles.

use normderiv_core::derivative::{rho_limit_oracle, rho_pair, Schedule, Side};
use normderiv_core::linalg::Matrix;
use normderiv_core::operator::{op_limit_oracle, op_norm, rho_pm_operator, OperatorMatrix};
use normderiv_core::orthogonality::{is_orthogonal, ray_scan_2d, Relation};
use normderiv_core::sampling::{gaussian_vector, trial_rng, with_singular_values};
use normderiv_core::support::{range_over_face, support_set};
use normderiv_core::{dual_norm, norm, DualFunctional, SpaceDescriptor, Vector};

/// Points of the dual unit sphere on a grid: every `f` in `{-k/N..k/N}^n`,
/// scaled to dual norm one.
fn dual_sphere_grid(space: &SpaceDescriptor, steps: i32) -> Vec<DualFunctional> {
    let n = space.dim();
    let mut out = Vec::new();
    let mut idx = vec![-steps; n];
    loop {
        let f = DualFunctional::new(
            idx.iter()
                .map(|&k| f64::from(k) / f64::from(steps))
                .collect(),
        );
        let d = dual_norm(space, &f).unwrap();
        if d > 0.0 {
            out.push(f.scaled(1.0 / d));
        }
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            idx[k] += 1;
            if idx[k] <= steps {
                break;
            }
            idx[k] = -steps;
            k += 1;
        }
    }
}

fn pair_on(f: &DualFunctional, v: &Vector) -> f64 {
    f.coords().iter().zip(v.coords()).map(|(a, b)| a * b).sum()
}

/// `[inf, sup]` of `f(y)` over grid functionals with `f(x) >= ||x|| - slack`.
fn grid_range(
    space: &SpaceDescriptor,
    x: &Vector,
    y: &Vector,
    steps: i32,
    slack: f64,
) -> (f64, f64) {
    let nx = norm(space, x).unwrap();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for f in dual_sphere_grid(space, steps) {
        if pair_on(&f, x) >= nx - slack {
            let v = pair_on(&f, y);
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    (lo, hi)
}

#[test]
fn polytope_faces_match_dual_ball_grid() {
    let cases = [
        (SpaceDescriptor::L1(2), [1.0, 0.0], [0.0, 1.0]),
        (SpaceDescriptor::L1(2), [1.0, 0.0], [3.0, -2.0]),
        (SpaceDescriptor::L1(2), [-2.0, 1.0], [1.0, 5.0]),
        (SpaceDescriptor::LInf(2), [1.0, 1.0], [1.0, 0.0]),
        (SpaceDescriptor::LInf(2), [1.0, 1.0], [0.0, -2.0]),
        (SpaceDescriptor::LInf(2), [3.0, -3.0], [1.0, 1.0]),
        (SpaceDescriptor::LInf(2), [2.0, 1.0], [-1.0, 4.0]),
    ];
    for (space, x, y) in cases {
        let (x, y) = (Vector::from(x), Vector::from(y));
        let nx = norm(&space, &x).unwrap();
        let (lo, hi) = grid_range(&space, &x, &y, 8, 1e-12 * nx);
        let exact = rho_pair(&space, &x, &y).unwrap();
        assert!(
            (exact.plus - nx * hi).abs() < 1e-12,
            "{space:?} {x:?} {y:?}"
        );
        assert!(
            (exact.minus - nx * lo).abs() < 1e-12,
            "{space:?} {x:?} {y:?}"
        );
    }
}

#[test]
fn three_dimensional_l1_face_matches_grid() {
    let space = SpaceDescriptor::L1(3);
    let x = Vector::from([0.0, 2.0, 0.0]);
    for y in [[1.0, 0.0, -1.0], [0.5, -3.0, 2.0], [-1.0, 1.0, 1.0]] {
        let y = Vector::from(y);
        let (lo, hi) = grid_range(&space, &x, &y, 4, 1e-12);
        let exact = rho_pair(&space, &x, &y).unwrap();
        assert!((exact.plus - 2.0 * hi).abs() < 1e-12);
        assert!((exact.minus - 2.0 * lo).abs() < 1e-12);
    }
}

#[test]
fn smooth_faces_match_dual_ball_grid_approximately() {
    // a grid only approximates the single support point of a round ball
    let cases = [
        SpaceDescriptor::lp(2, 1.5).unwrap(),
        SpaceDescriptor::lp(2, 3.0).unwrap(),
        SpaceDescriptor::Euclidean(2),
    ];
    for space in cases {
        let x = Vector::from([0.8, -0.3]);
        let y = Vector::from([0.2, 1.0]);
        let nx = norm(&space, &x).unwrap();
        let (lo, hi) = grid_range(&space, &x, &y, 400, 2e-4 * nx);
        let exact = rho_pair(&space, &x, &y).unwrap();
        assert!((exact.plus / nx - hi).abs() < 5e-2, "{space:?}");
        assert!((exact.minus / nx - lo).abs() < 5e-2, "{space:?}");
    }
}

#[test]
fn face_range_bounds_every_convex_combination() {
    let space = SpaceDescriptor::L1(4);
    let x = Vector::from([1.0, 0.0, 0.0, -2.0]);
    let face = support_set(&space, &x).unwrap();
    let extremes = face.extremes();
    let mut rng = trial_rng(5, 0, 0);
    for trial in 0..200 {
        let y = gaussian_vector(&mut trial_rng(5, 1, trial), 4);
        let r = range_over_face(&face, &y).unwrap();
        let mut seen_lo = f64::INFINITY;
        let mut seen_hi = f64::NEG_INFINITY;
        for _ in 0..50 {
            let w: Vec<f64> = gaussian_vector(&mut rng, extremes.len())
                .coords()
                .iter()
                .map(|g| g.abs())
                .collect();
            let total: f64 = w.iter().sum();
            let mut f = vec![0.0; 4];
            for (wi, e) in w.iter().zip(extremes) {
                for (fk, ek) in f.iter_mut().zip(e.coords()) {
                    *fk += wi / total * ek;
                }
            }
            let v = pair_on(&DualFunctional::new(f), &y);
            assert!(v >= r.lower - 1e-12 && v <= r.upper + 1e-12);
            seen_lo = seen_lo.min(v);
            seen_hi = seen_hi.max(v);
        }
        for e in extremes {
            let v = pair_on(e, &y);
            seen_lo = seen_lo.min(v);
            seen_hi = seen_hi.max(v);
        }
        assert_eq!((seen_lo, seen_hi), (r.lower, r.upper));
    }
}

#[test]
fn limit_oracle_agrees_with_exact_faces() {
    let spaces = [
        SpaceDescriptor::L1(3),
        SpaceDescriptor::LInf(3),
        SpaceDescriptor::lp(3, 1.5).unwrap(),
        SpaceDescriptor::lp(3, 3.0).unwrap(),
        SpaceDescriptor::Euclidean(3),
    ];
    let schedule = Schedule::default();
    for (s, space) in spaces.iter().enumerate() {
        for trial in 0..100 {
            let mut rng = trial_rng(11, s as u64, trial);
            let mut x = gaussian_vector(&mut rng, 3);
            let y = gaussian_vector(&mut rng, 3);
            if trial % 3 == 0 {
                // kinks: a zero coordinate and a tie in absolute value
                let mut c = x.into_coords();
                c[0] = 0.0;
                c[2] = -c[1];
                x = Vector::new(c);
            }
            let exact = rho_pair(space, &x, &y).unwrap();
            let scale = norm(space, &x).unwrap() * norm(space, &y).unwrap();
            for side in [Side::Plus, Side::Minus] {
                let o = rho_limit_oracle(space, &x, &y, side, &schedule).unwrap();
                let e = match side {
                    Side::Plus => exact.plus,
                    Side::Minus => exact.minus,
                };
                let tol = (1e-6 * scale).max(o.error_estimate);
                assert!(
                    (o.value - e).abs() <= tol,
                    "{space:?} {x:?} {y:?} {side:?}: {} vs {e}",
                    o.value
                );
            }
        }
    }
}

#[test]
fn birkhoff_james_matches_the_norm_inequality() {
    let lambdas: Vec<f64> = (1..=400)
        .map(|k| f64::from(k) / 100.0)
        .chain((3..10).map(|j| 10f64.powi(-j)))
        .flat_map(|l| [l, -l])
        .collect();
    let spaces = [
        SpaceDescriptor::L1(2),
        SpaceDescriptor::LInf(2),
        SpaceDescriptor::lp(2, 3.0).unwrap(),
    ];
    for space in &spaces {
        for trial in 0..60 {
            let mut rng = trial_rng(3, 7, trial);
            let x = gaussian_vector(&mut rng, 2);
            let y = gaussian_vector(&mut rng, 2);
            let v = is_orthogonal(space, &x, &y, Relation::BirkhoffJames, 1e-9).unwrap();
            let nx = norm(space, &x).unwrap();
            let brute = lambdas
                .iter()
                .all(|l| norm(space, &x.combine(1.0, &y, *l)).unwrap() >= nx - 1e-12);
            // the grid can only refute; derivative margins keep clear of the boundary
            if v.rho_minus < -1e-3 && v.rho_plus > 1e-3 {
                assert!(brute, "{space:?} {x:?} {y:?}");
            }
            if v.rho_plus < -1e-3 || v.rho_minus > 1e-3 {
                assert!(!brute, "{space:?} {x:?} {y:?}");
            }
        }
    }
}

#[test]
fn ray_scan_matches_pointwise_membership() {
    let space = SpaceDescriptor::LInf(2);
    let x = Vector::from([1.0, 1.0]);
    for relation in Relation::ALL {
        let d = ray_scan_2d(&space, &x, relation, 1.0, 1e-9).unwrap();
        for k in 0..3600 {
            let deg = f64::from(k) / 10.0 + 0.05;
            let r = deg.to_radians();
            let y = Vector::from([r.cos(), r.sin()]);
            let member = is_orthogonal(&space, &x, &y, relation, 1e-9).unwrap().holds;
            let covered = d.rays.iter().any(|s| {
                let span = (s.end_deg - s.start_deg).rem_euclid(360.0);
                let off = (deg - s.start_deg).rem_euclid(360.0);
                off <= span
            });
            assert_eq!(member, covered, "{relation:?} at {deg}");
        }
    }
}

#[test]
fn euclidean_operator_norm_matches_sphere_sampling() {
    for trial in 0..20 {
        let mut rng = trial_rng(9, 0, trial);
        let m = normderiv_core::sampling::gaussian_matrix(&mut rng, 3, 2);
        let t = OperatorMatrix::hilbert(m.clone());
        let n = op_norm(&t).unwrap();
        let sampled = (0..20000)
            .map(|k| {
                let a = std::f64::consts::TAU * f64::from(k) / 20000.0;
                let v = m.apply(&[a.cos(), a.sin()]);
                v.iter().map(|c| c * c).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max);
        assert!(sampled <= n + 1e-12);
        assert!(n - sampled < 1e-6 * n);
    }
}

#[test]
fn l1_domain_operator_norm_matches_sphere_sampling() {
    let t = OperatorMatrix::from_rows(
        &[vec![2.0, 0.0], vec![0.0, 1.0]],
        SpaceDescriptor::L1(2),
        SpaceDescriptor::Euclidean(2),
    )
    .unwrap();
    let sampled = (0..=4000)
        .flat_map(|k| {
            let a = f64::from(k) / 4000.0;
            [(a, 1.0 - a), (a, a - 1.0), (-a, 1.0 - a), (-a, a - 1.0)]
        })
        .map(|(u, v)| {
            t.entries()
                .apply(&[u, v])
                .iter()
                .map(|c| c * c)
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max);
    assert_eq!(op_norm(&t).unwrap(), 2.0);
    assert!((sampled - 2.0).abs() < 1e-12);
}

#[test]
fn operator_derivative_agrees_with_oracle() {
    let schedule = Schedule::default();
    for trial in 0..100 {
        let mut rng = trial_rng(13, 0, trial);
        let t = if trial % 2 == 0 {
            OperatorMatrix::hilbert(normderiv_core::sampling::gaussian_matrix(&mut rng, 3, 3))
        } else {
            OperatorMatrix::hilbert(with_singular_values(&mut rng, 3, 3, &[2.0, 2.0, 0.5]))
        };
        let a = OperatorMatrix::hilbert(normderiv_core::sampling::gaussian_matrix(&mut rng, 3, 3));
        let scale = op_norm(&t).unwrap() * op_norm(&a).unwrap();
        for side in [Side::Plus, Side::Minus] {
            let exact = rho_pm_operator(&t, &a, side).unwrap().value;
            let o = op_limit_oracle(&t, &a, side, &schedule).unwrap();
            assert!(
                (exact - o.value).abs() <= (1e-6 * scale).max(o.error_estimate),
                "{trial} {side:?}"
            );
        }
    }
}

#[test]
fn l1_domain_derivative_agrees_with_oracle() {
    let schedule = Schedule::default();
    let codomains = [
        SpaceDescriptor::Euclidean(2),
        SpaceDescriptor::LInf(2),
        SpaceDescriptor::L1(2),
        SpaceDescriptor::lp(2, 3.0).unwrap(),
    ];
    for (c, codomain) in codomains.iter().enumerate() {
        for trial in 0..40 {
            let mut rng = trial_rng(17, c as u64, trial);
            let mut m = normderiv_core::sampling::gaussian_matrix(&mut rng, 2, 3);
            if trial % 2 == 0 {
                // make two columns attain the norm
                for i in 0..2 {
                    m[(i, 1)] = -m[(i, 0)];
                }
            }
            let t = OperatorMatrix::new(m, SpaceDescriptor::L1(3), codomain.clone()).unwrap();
            let a = t
                .with_entries(normderiv_core::sampling::gaussian_matrix(&mut rng, 2, 3))
                .unwrap();
            let scale = op_norm(&t).unwrap() * op_norm(&a).unwrap();
            for side in [Side::Plus, Side::Minus] {
                let exact = rho_pm_operator(&t, &a, side).unwrap().value;
                let o = op_limit_oracle(&t, &a, side, &schedule).unwrap();
                assert!(
                    (exact - o.value).abs() <= (1e-6 * scale).max(o.error_estimate),
                    "{codomain:?} {trial} {side:?}"
                );
            }
        }
    }
}

#[test]
fn identity_operator_values() {
    let t = OperatorMatrix::hilbert(Matrix::identity(2));
    let a1 = OperatorMatrix::hilbert(Matrix::diagonal(&[1.0, -0.5]));
    let a2 = OperatorMatrix::hilbert(Matrix::diagonal(&[-0.5, 1.0]));
    let sum = a1.combine(1.0, &a2, 1.0).unwrap();
    let p = |a: &OperatorMatrix| rho_pm_operator(&t, a, Side::Plus).unwrap().value;
    assert_eq!(p(&a1), 1.0);
    assert_eq!(p(&a2), 1.0);
    assert_eq!(p(&sum), 0.5);
}
