use normderiv_core::operator::{op_limit_oracle, rho_pm_operator};
use normderiv_core::orthogonality::{
    check_rho_characterization, check_rho_pm_characterization, is_orthogonal,
};
use normderiv_core::sampling::{gaussian_matrix, gaussian_vector, with_singular_values};
use normderiv_core::{
    dual_norm, dual_pairing, norm, range_over_face, rho_limit_oracle, rho_of, rho_pair,
    support_set, DualFunctional, OperatorMatrix, Relation, RhoPair, Schedule, Side,
    SpaceDescriptor, Vector,
};
use rand::Rng;
use serde_json::{json, Value};

use crate::gen::{dim_for, direction, point, scalar, FAMILIES};
use crate::report::Case;

/// A projection that cancelled down to rounding residue came from a
/// direction parallel to `x`; its exact value is zero.
fn snap_parallel(projected: Vector, original: &Vector) -> Vector {
    let size = |v: &Vector| v.coords().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if size(&projected) <= 1e-9 * size(original) {
        Vector::zeros(projected.dim())
    } else {
        projected
    }
}

fn ctx(space: &SpaceDescriptor, x: &Vector, y: &Vector) -> Value {
    json!({"space": space, "x": x, "y": y})
}

fn norm_of(case: &mut Case, space: &SpaceDescriptor, v: &Vector) -> Option<f64> {
    case.ok(
        "norm_evaluates",
        || json!({"space": space, "v": v}),
        norm(space, v),
    )
}

/// Checks that `f` is a norming functional for `x`: dual norm one, `f(x) = ||x||`.
fn check_norming(
    case: &mut Case,
    label: &str,
    space: &SpaceDescriptor,
    x: &Vector,
    nx: f64,
    f: &DualFunctional,
) {
    let tol = case.tol.exact;
    let inputs = || json!({"space": space, "x": x, "functional": f});
    if let Some(d) = case.ok(label, inputs, dual_norm(space, f)) {
        case.close(&format!("{label}_dual_norm"), inputs, 1.0, d, tol);
    }
    if let Some(v) = case.ok(label, inputs, dual_pairing(f, x)) {
        case.close(&format!("{label}_attains"), inputs, nx, v, tol * nx);
    }
}

pub(super) fn norm_axioms(case: &mut Case) {
    let n = dim_for(case.trial);
    let mut rng = case.rng(0);
    let tol = case.tol.exact;
    for fam in FAMILIES {
        let s = fam.space(n);
        let x = point(&mut rng, n);
        let y = direction(&mut rng, n);
        let a = scalar(&mut rng);
        let inputs = || json!({"space": s, "x": x, "y": y, "a": a});
        let (Some(nx), Some(ny), Some(nxy), Some(nax), Some(n0)) = (
            norm_of(case, &s, &x),
            norm_of(case, &s, &y),
            norm_of(case, &s, &(&x + &y)),
            norm_of(case, &s, &x.scaled(a)),
            norm_of(case, &s, &Vector::zeros(n)),
        ) else {
            continue;
        };
        case.note(
            "norms",
            &json!({"space": s, "x": nx, "y": ny, "x+y": nxy, "ax": nax}),
        );
        case.within(
            "triangle",
            inputs,
            (nxy - nx - ny).max(0.0),
            tol * (nx + ny),
        );
        case.close(
            "absolute_homogeneity",
            inputs,
            a.abs() * nx,
            nax,
            tol * a.abs() * nx,
        );
        case.holds("definiteness", inputs, nx > 0.0 && n0 == 0.0);

        let Some(face) = case.ok("support_set", inputs, support_set(&s, &x)) else {
            continue;
        };
        if fam.is_smooth() {
            case.holds("smooth_space_singleton_face", inputs, face.is_singleton());
        }
        for f in face.extremes() {
            check_norming(case, "support_functional", &s, &x, nx, f);
            if let Some(fy) = case.ok("pairing", inputs, dual_pairing(f, &y)) {
                case.within("holder", inputs, (fy.abs() - ny).max(0.0), tol * ny);
            }
        }
    }
}

pub(super) fn derivative_properties(case: &mut Case) {
    let n = dim_for(case.trial);
    let mut rng = case.rng(0);
    let tol = case.tol.exact;
    for fam in FAMILIES {
        let s = fam.space(n);
        let x = point(&mut rng, n);
        let y = direction(&mut rng, n);
        let a = scalar(&mut rng);
        let b = scalar(&mut rng);
        let inputs = || json!({"space": s, "x": x, "y": y, "a": a, "b": b});
        let (Some(nx), Some(ny)) = (norm_of(case, &s, &x), norm_of(case, &s, &y)) else {
            continue;
        };
        let scale = nx * ny;
        let Some(p) = case.ok("rho_pair", inputs, rho_pair(&s, &x, &y)) else {
            continue;
        };
        case.note("rho_pair", &json!({"space": s, "pair": p}));

        if let Some(z) = case.ok("rho_pair", inputs, rho_pair(&s, &Vector::zeros(n), &y)) {
            case.equal("zero_base", inputs, RhoPair::ZERO, z);
        }

        case.within(
            "minus_le_plus",
            inputs,
            (p.minus - p.plus).max(0.0),
            tol * scale,
        );
        if fam.is_smooth() {
            case.close(
                "smooth_space_sides_equal",
                inputs,
                p.plus,
                p.minus,
                tol * scale,
            );
        }
        case.within(
            "bound_plus",
            inputs,
            (p.plus.abs() - scale).max(0.0),
            tol * scale,
        );
        case.within(
            "bound_minus",
            inputs,
            (p.minus.abs() - scale).max(0.0),
            tol * scale,
        );
        case.within(
            "bound_mean",
            inputs,
            (p.mean().abs() - scale).max(0.0),
            tol * scale,
        );

        // Homogeneity in either argument swaps the sides for negative scalars.
        let expect = if a >= 0.0 {
            (a * p.minus, a * p.plus)
        } else {
            (a * p.plus, a * p.minus)
        };
        let htol = tol * a.abs() * scale;
        if let Some(q) = case.ok("rho_pair", inputs, rho_pair(&s, &x, &y.scaled(a))) {
            case.close(
                "homogeneity_direction_minus",
                inputs,
                expect.0,
                q.minus,
                htol,
            );
            case.close("homogeneity_direction_plus", inputs, expect.1, q.plus, htol);
            case.close(
                "homogeneity_direction_mean",
                inputs,
                a * p.mean(),
                q.mean(),
                htol,
            );
        }
        if let Some(q) = case.ok("rho_pair", inputs, rho_pair(&s, &x.scaled(a), &y)) {
            case.close("homogeneity_base_minus", inputs, expect.0, q.minus, htol);
            case.close("homogeneity_base_plus", inputs, expect.1, q.plus, htol);
            case.close(
                "homogeneity_base_mean",
                inputs,
                a * p.mean(),
                q.mean(),
                htol,
            );
        }

        let shifted = x.combine(b, &y, 1.0);
        if let Some(q) = case.ok("rho_pair", inputs, rho_pair(&s, &x, &shifted)) {
            let stol = tol * (b.abs() * nx * nx + scale);
            case.close(
                "shift_along_x_plus",
                inputs,
                b * nx * nx + p.plus,
                q.plus,
                stol,
            );
            case.close(
                "shift_along_x_minus",
                inputs,
                b * nx * nx + p.minus,
                q.minus,
                stol,
            );
        }

        // The extremes of f(y) over J(x) are attained by norming functionals
        // and give the one-sided derivatives; everything in between is sandwiched.
        let Some(face) = case.ok("support_set", inputs, support_set(&s, &x)) else {
            continue;
        };
        let Some(range) = case.ok("face_range", inputs, range_over_face(&face, &y)) else {
            continue;
        };
        let sup_f = &face.extremes()[range.argmax];
        let inf_f = &face.extremes()[range.argmin];
        check_norming(case, "sup_functional", &s, &x, nx, sup_f);
        check_norming(case, "inf_functional", &s, &x, nx, inf_f);
        if let (Ok(hi), Ok(lo)) = (dual_pairing(sup_f, &y), dual_pairing(inf_f, &y)) {
            case.close("sup_formula", inputs, p.plus, nx * hi, tol * scale);
            case.close("inf_formula", inputs, p.minus, nx * lo, tol * scale);
        }
        let k = face.extremes().len();
        let g = face.blend(
            rng.random_range(0..k),
            rng.random_range(0..k),
            rng.random::<f64>(),
        );
        check_norming(case, "blended_functional", &s, &x, nx, &g);
        if let Ok(gy) = dual_pairing(&g, &y) {
            let v = nx * gy;
            let gap = (p.minus - v).max(v - p.plus).max(0.0);
            case.within("functional_sandwich", inputs, gap, tol * scale);
        }

        // 1-Lipschitz in the direction, with constant ||x||.
        let delta = gaussian_vector(&mut rng, n).scaled(1e-3 * ny.max(1e-3));
        if let (Some(nd), Some(q)) = (
            norm_of(case, &s, &delta),
            case.ok("rho_pair", inputs, rho_pair(&s, &x, &(&y + &delta))),
        ) {
            let slack = tol * nx * (ny + nd);
            case.within(
                "continuity_plus",
                inputs,
                ((q.plus - p.plus).abs() - nx * nd).max(0.0),
                slack,
            );
            case.within(
                "continuity_minus",
                inputs,
                ((q.minus - p.minus).abs() - nx * nd).max(0.0),
                slack,
            );
        }

        birkhoff_james(case, &s, &x, &y, nx, p);
    }
}

const LAMBDAS: [f64; 12] = [
    -10.0, -3.0, -1.0, -0.3, -0.1, -1e-4, 1e-4, 0.1, 0.3, 1.0, 3.0, 10.0,
];

/// Birkhoff-James against the norm itself: after removing the rho component
/// along `x` the direction is orthogonal, so no `x + l y0` is shorter than
/// `x`; and a clearly negative one-sided derivative exhibits a shorter one.
fn birkhoff_james(
    case: &mut Case,
    s: &SpaceDescriptor,
    x: &Vector,
    y: &Vector,
    nx: f64,
    p: RhoPair,
) {
    let tol = case.tol;
    let y0 = snap_parallel(y.combine(1.0, x, -p.mean() / (nx * nx)), y);
    let inputs = || json!({"space": s, "x": x, "y": y, "y0": y0});
    let Some(ny0) = norm_of(case, s, &y0) else {
        return;
    };
    let mut worst: f64 = 0.0;
    for l in LAMBDAS {
        if let Ok(v) = norm(s, &x.combine(1.0, &y0, l)) {
            worst = worst.max((nx - v) / (nx + l.abs() * ny0));
        }
    }
    case.within("bj_projected_not_shorter", inputs, worst, tol.exact);
    if let Some(v) = case.ok(
        "bj_verdict",
        inputs,
        is_orthogonal(s, x, &y0, Relation::BirkhoffJames, tol.orthogonality),
    ) {
        case.holds("bj_projected_verdict", inputs, v.holds);
    }

    let Ok(ny) = norm(s, y) else { return };
    let margin = 1e-3 * nx * ny;
    let side = if p.plus < -margin {
        1.0
    } else if p.minus > margin {
        -1.0
    } else {
        return;
    };
    let shorter = (1..=8).any(|k| {
        let t = side * 10f64.powi(-k);
        norm(s, &x.combine(1.0, y, t)).is_ok_and(|v| v < nx)
    });
    case.holds("bj_shorter_witness", || ctx(s, x, y), shorter);
    if let Some(v) = case.ok(
        "bj_verdict",
        || ctx(s, x, y),
        is_orthogonal(s, x, y, Relation::BirkhoffJames, tol.orthogonality),
    ) {
        case.holds("bj_verdict_negative", || ctx(s, x, y), !v.holds);
    }
}

pub(super) fn oracle_agreement(case: &mut Case) {
    let n = dim_for(case.trial);
    let mut rng = case.rng(0);
    let tol = case.tol.oracle;
    let schedule = Schedule::default();
    for fam in FAMILIES {
        let s = fam.space(n);
        let x = point(&mut rng, n);
        let y = direction(&mut rng, n);
        let (Ok(nx), Ok(ny)) = (norm(&s, &x), norm(&s, &y)) else {
            continue;
        };
        for side in [Side::Plus, Side::Minus] {
            let inputs = || json!({"space": s, "x": x, "y": y, "side": side});
            let (Some(exact), Some(oracle)) = (
                case.ok("exact_evaluates", inputs, rho_of(&s, &x, &y, side.into())),
                case.ok(
                    "oracle_evaluates",
                    inputs,
                    rho_limit_oracle(&s, &x, &y, side, &schedule),
                ),
            ) else {
                continue;
            };
            case.note(
                "oracle",
                &json!({"side": side, "exact": exact, "oracle": oracle}),
            );
            let allowed = (tol * (nx * ny).max(1.0)).max(oracle.error_estimate);
            case.close(
                "vector_oracle_agrees",
                inputs,
                exact.value,
                oracle.value,
                allowed,
            );
        }
    }

    let (t, a) = operator_pair(case.trial, &mut rng);
    let (Ok(nt), Ok(na)) = (
        normderiv_core::operator::op_norm(&t),
        normderiv_core::operator::op_norm(&a),
    ) else {
        return;
    };
    for side in [Side::Plus, Side::Minus] {
        let inputs = || json!({"t": t, "a": a, "side": side});
        let (Some(exact), Some(oracle)) = (
            case.ok(
                "operator_exact_evaluates",
                inputs,
                rho_pm_operator(&t, &a, side),
            ),
            case.ok(
                "operator_oracle_evaluates",
                inputs,
                op_limit_oracle(&t, &a, side, &schedule),
            ),
        ) else {
            continue;
        };
        case.note(
            "operator_oracle",
            &json!({"side": side, "exact": exact, "oracle": oracle}),
        );
        let allowed = (tol * (nt * na).max(1.0)).max(oracle.error_estimate);
        case.close(
            "operator_oracle_agrees",
            inputs,
            exact.value,
            oracle.value,
            allowed,
        );
    }
}

/// Even trials: Euclidean operators, some with a repeated top singular
/// value. Odd trials: `l1` domains into each codomain family, some with
/// several norm-attaining columns.
fn operator_pair<R: Rng + ?Sized>(trial: usize, rng: &mut R) -> (OperatorMatrix, OperatorMatrix) {
    let k = trial / 2;
    let n = 2 + k % 3;
    if trial.is_multiple_of(2) {
        let t = match k % 3 {
            0 => gaussian_matrix(rng, n, n),
            1 => with_singular_values(rng, n, n, &[2.0, 2.0][..n.min(2)]),
            _ => with_singular_values(rng, n, n, &[1.5, 0.5]),
        };
        let a = gaussian_matrix(rng, n, n);
        (OperatorMatrix::hilbert(t), OperatorMatrix::hilbert(a))
    } else {
        let m = 2 + (k / 3) % 3;
        let codomain = match k % 4 {
            0 => SpaceDescriptor::Euclidean(m),
            1 => SpaceDescriptor::LInf(m),
            2 => SpaceDescriptor::Lp { dim: m, p: 3.0 },
            _ => SpaceDescriptor::L1(m),
        };
        let domain = SpaceDescriptor::L1(n);
        let mut t = gaussian_matrix(rng, m, n);
        if (k / 4) % 2 == 1 {
            // a second column with the same image norm, up to sign
            let j = rng.random_range(1..n);
            for r in 0..m {
                t[(r, j)] = -t[(r, 0)];
            }
        }
        let a = gaussian_matrix(rng, m, n);
        (
            OperatorMatrix::new(t, domain.clone(), codomain.clone()).expect("shapes match"),
            OperatorMatrix::new(a, domain, codomain).expect("shapes match"),
        )
    }
}

pub(super) fn characterizations(case: &mut Case) {
    let n = dim_for(case.trial);
    let mut rng = case.rng(0);
    let tol = case.tol.orthogonality;
    for fam in FAMILIES {
        let s = fam.space(n);
        let x = point(&mut rng, n);
        let y0 = direction(&mut rng, n);
        let (Ok(nx), Ok(p0)) = (norm(&s, &x), rho_pair(&s, &x, &y0)) else {
            continue;
        };
        // Mode 0 keeps a generic direction; the others remove one derivative
        // so the matching relation holds by construction.
        let mode = rng.random_range(0..4u8);
        let forced = match mode {
            1 => Some((Relation::Rho, p0.mean())),
            2 => Some((Relation::RhoPlus, p0.plus)),
            3 => Some((Relation::RhoMinus, p0.minus)),
            _ => None,
        };
        let y = match forced {
            Some((_, d)) => snap_parallel(y0.combine(1.0, &x, -d / (nx * nx)), &y0),
            None => y0.clone(),
        };
        let inputs = || json!({"space": s, "x": x, "y": y, "mode": mode});
        let (Some(ny), Some(p)) = (
            norm_of(case, &s, &y),
            case.ok("rho_pair", inputs, rho_pair(&s, &x, &y)),
        ) else {
            continue;
        };
        let tol_abs = tol * nx * ny;

        let mut verdicts = Vec::new();
        for rel in Relation::ALL {
            if let Some(v) = case.ok("verdict", inputs, is_orthogonal(&s, &x, &y, rel, tol)) {
                verdicts.push((rel, v.holds));
                if rel == Relation::BirkhoffJames {
                    let by_pair = p.minus <= tol_abs && p.plus >= -tol_abs;
                    case.equal("bj_derivative_criterion", inputs, by_pair, v.holds);
                    if let Some(f) = &v.functional {
                        check_norming(case, "bj_functional", &s, &x, nx, f);
                        if let Ok(fy) = dual_pairing(f, &y) {
                            case.within(
                                "bj_functional_annihilates",
                                inputs,
                                nx * fy.abs(),
                                tol_abs,
                            );
                        }
                    }
                    if !y.is_zero() {
                        case.equal(
                            "bj_functional_iff_holds",
                            inputs,
                            v.holds,
                            v.functional.is_some(),
                        );
                    }
                }
            }
        }
        case.note("verdicts", &verdicts);
        if let Some((rel, _)) = forced {
            let holds = verdicts.iter().any(|(r, h)| *r == rel && *h);
            case.holds("constructed_relation_holds", inputs, holds);
        }
        let bj = verdicts
            .iter()
            .any(|(r, h)| *r == Relation::BirkhoffJames && *h);
        let any_rho = verdicts
            .iter()
            .any(|(r, h)| *r != Relation::BirkhoffJames && *h);
        if any_rho {
            case.holds("rho_relations_imply_bj", inputs, bj);
        }

        if let Some(rc) = case.ok(
            "rho_characterization",
            inputs,
            check_rho_characterization(&s, &x, &y, tol),
        ) {
            case.note("rho_characterization", &rc);
            case.equal(
                "rho_characterization_vs_derivative",
                inputs,
                p.mean().abs() <= tol_abs,
                rc.holds,
            );
            case.holds(
                "rho_characterization_agrees",
                inputs,
                rc.agrees_with_derivative,
            );
            case.equal("rho_reduction_agrees", inputs, rc.reduction_holds, rc.holds);
        }
        for side in [Side::Plus, Side::Minus] {
            let Some(pc) = case.ok(
                "pm_characterization",
                inputs,
                check_rho_pm_characterization(&s, &x, &y, side, tol),
            ) else {
                continue;
            };
            case.note("pm_characterization", &pc);
            let d = match side {
                Side::Plus => p.plus,
                Side::Minus => p.minus,
            };
            case.equal(
                "pm_characterization_vs_derivative",
                inputs,
                d.abs() <= tol_abs,
                pc.holds,
            );
            case.holds(
                "pm_characterization_agrees",
                inputs,
                pc.agrees_with_derivative,
            );
            if let Some(f) = &pc.annihilator {
                check_norming(case, "pm_annihilator", &s, &x, nx, f);
            }
        }
    }
}
