use normderiv_core::sampling::gaussian_vector;
use normderiv_core::smoothness::{
    classify, verify_codimension_theorem, AdditivityConfig, CodimensionReport,
};
use normderiv_core::{dual_pairing, norm, rho_pair, Relation, SpaceDescriptor, Vector};
use serde_json::json;

use crate::gen::{dim_for, point, FAMILIES};
use crate::report::Case;

const SAMPLES: usize = 100;
const RHO_RELATIONS: [Relation; 3] = [Relation::Rho, Relation::RhoPlus, Relation::RhoMinus];

fn euclid(v: &Vector) -> f64 {
    v.coords().iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn derivative(s: &SpaceDescriptor, x: &Vector, y: &Vector, rel: Relation) -> Option<f64> {
    let kind = rel.derivative()?;
    rho_pair(s, x, y).ok().map(|p| p.get(kind))
}

/// Rechecks a codimension report from outside: a witness pair must be two
/// members with a non-member sum, a normal must cut out the set.
fn check_report(case: &mut Case, s: &SpaceDescriptor, x: &Vector, r: &CodimensionReport) {
    let tol = case.tol.additivity;
    let inputs = || json!({"space": s, "x": x, "relation": r.relation, "report": r});
    let Ok(nx) = norm(s, x) else { return };
    case.holds("additivity_matches_hyperplane", inputs, r.agrees);
    case.equal("hyperplane_iff_additive", inputs, r.additive, r.hyperplane);
    if !r.additive {
        let Some(w) = &r.witness else {
            case.holds("non_subspace_witness_present", inputs, false);
            return;
        };
        let sum = &w.y1 + &w.y2;
        let (Some(d1), Some(d2), Some(ds)) = (
            derivative(s, x, &w.y1, r.relation),
            derivative(s, x, &w.y2, r.relation),
            derivative(s, x, &sum, r.relation),
        ) else {
            return;
        };
        let n = x.dim() as f64;
        case.within(
            "witness_first_member",
            inputs,
            d1.abs(),
            tol * nx * euclid(&w.y1) * n,
        );
        case.within(
            "witness_second_member",
            inputs,
            d2.abs(),
            tol * nx * euclid(&w.y2) * n,
        );
        case.holds(
            "witness_sum_not_member",
            inputs,
            ds.abs() > tol * nx * (euclid(&w.y1) + euclid(&w.y2)),
        );
    } else if let Some(g) = &r.normal {
        // x itself is never orthogonal to x, so g(x) != 0
        let Ok(gx) = dual_pairing(g, x) else { return };
        case.close("normal_at_x", inputs, nx, gx, tol * nx);
        let mut rng = case.rng(7);
        for _ in 0..8 {
            let y = gaussian_vector(&mut rng, x.dim());
            let Ok(gy) = dual_pairing(g, &y) else {
                continue;
            };
            let p = y.combine(1.0, x, -gy / gx);
            if let Some(dp) = derivative(s, x, &p, r.relation) {
                case.within(
                    "kernel_is_orthogonal",
                    inputs,
                    dp.abs(),
                    tol * nx * (euclid(&y) + euclid(x)),
                );
            }
        }
    }
}

fn examine(case: &mut Case, s: &SpaceDescriptor, x: &Vector, smooth_space: bool) {
    let cfg = AdditivityConfig {
        seed: case.derived_seed(0),
        ..AdditivityConfig::default()
    };
    let inputs = || json!({"space": s, "x": x, "seed": cfg.seed});
    for rel in RHO_RELATIONS {
        if let Some(r) = case.ok(
            "codimension",
            inputs,
            verify_codimension_theorem(s, x, rel, SAMPLES, &cfg),
        ) {
            case.note("codimension", &r);
            check_report(case, s, x, &r);
        }
    }
    let Some(c) = case.ok("classify", inputs, classify(s, x, &cfg)) else {
        return;
    };
    case.note("classification", &c);
    case.equal("plus_minus_agree", inputs, c.rho_plus, c.rho_minus);
    // support functions of convex sets are additive only on singletons
    case.equal(
        "rho_pm_smooth_iff_classical",
        inputs,
        c.classical,
        c.rho_plus,
    );
    if c.rho_plus {
        case.holds("rho_pm_smooth_implies_rho_smooth", inputs, c.rho);
    }
    if smooth_space {
        case.holds("smooth_space_point_classical", inputs, c.classical);
    }
    if c.rho {
        case.holds(
            "rho_smooth_has_functional",
            inputs,
            c.hyperplane_functional.is_some(),
        );
    }
}

/// Points whose classification is known in closed form.
fn fixed_points(case: &mut Case) {
    let l1 = SpaceDescriptor::L1(2);
    let e1 = Vector::from([1.0, 0.0]);
    let cfg = AdditivityConfig {
        seed: case.derived_seed(1),
        ..AdditivityConfig::default()
    };
    let inputs = || json!({"space": l1, "x": e1});
    if let Some(c) = case.ok("classify", inputs, classify(&l1, &e1, &cfg)) {
        case.note("l1_vertex", &c);
        case.holds("l1_vertex_rho_smooth", inputs, c.rho);
        case.holds("l1_vertex_not_classical", inputs, !c.classical);
        case.holds(
            "l1_vertex_not_rho_pm_smooth",
            inputs,
            !c.rho_plus && !c.rho_minus,
        );
    }
    examine(case, &l1, &e1, false);
    examine(
        case,
        &SpaceDescriptor::LInf(2),
        &Vector::from([1.0, 1.0]),
        false,
    );
    examine(
        case,
        &SpaceDescriptor::LInf(3),
        &Vector::from([1.0, -1.0, 1.0]),
        false,
    );
    examine(
        case,
        &SpaceDescriptor::L1(3),
        &Vector::from([0.0, 2.0, 0.0]),
        false,
    );
}

pub(super) fn codimension(case: &mut Case) {
    if case.trial == 0 {
        fixed_points(case);
    }
    let n = dim_for(case.trial / FAMILIES.len());
    let fam = FAMILIES[case.trial % FAMILIES.len()];
    let s = fam.space(n);
    let x = point(&mut case.rng(0), n);
    examine(case, &s, &x, fam.is_smooth());
}
