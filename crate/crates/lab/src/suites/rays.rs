use normderiv_core::orthogonality::{
    direction, is_orthogonal, ray_scan_2d, RaySector, RayStructure,
};
use normderiv_core::smoothness::{classify, AdditivityConfig};
use normderiv_core::{dual_pairing, norm, RayDiagram, Relation, SpaceDescriptor, Vector};
use rand::Rng;
use serde_json::json;

use crate::gen::{point, FAMILIES};
use crate::report::Case;

/// `(start, end)` in degrees.
type Arc = (f64, f64);

const STEP_DEG: f64 = 1.0;
const ANGLE_TOL_DEG: f64 = 1e-6;

fn gap_deg(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Closed counterclockwise arc membership, with slack at the ends.
fn in_sector(r: &RaySector, deg: f64) -> bool {
    if r.start_deg == 0.0 && r.end_deg == 360.0 {
        return true;
    }
    let width = (r.end_deg - r.start_deg).rem_euclid(360.0);
    let off = (deg - r.start_deg).rem_euclid(360.0);
    off <= width
        || gap_deg(deg, r.start_deg) <= ANGLE_TOL_DEG
        || gap_deg(deg, r.end_deg) <= ANGLE_TOL_DEG
}

fn near_boundary(d: &RayDiagram, deg: f64, eps: f64) -> bool {
    d.rays
        .iter()
        .any(|r| gap_deg(deg, r.start_deg) <= eps || gap_deg(deg, r.end_deg) <= eps)
}

fn scan(case: &mut Case, s: &SpaceDescriptor, x: &Vector, rel: Relation) -> Option<RayDiagram> {
    let tol = case.tol.orthogonality;
    let d = case.ok(
        "ray_scan",
        || json!({"space": s, "x": x, "relation": rel}),
        ray_scan_2d(s, x, rel, STEP_DEG, tol),
    )?;
    case.note("diagram", &d);
    Some(d)
}

fn check_generic(case: &mut Case, s: &SpaceDescriptor, x: &Vector, d: &RayDiagram) {
    let inputs = || json!({"space": s, "x": x, "relation": d.relation});
    let nx = norm(s, x).unwrap_or(1.0);
    case.holds("scan_stable", inputs, d.stable);
    for r in &d.rays {
        case.within(
            "ray_certified_zero",
            inputs,
            r.residual,
            case.tol.exact * nx.max(1.0),
        );
    }
}

/// The `l_inf^2` corner `(1, 1)`: the one-sided orthogonality sets are two
/// perpendicular rays each, the mean one is the anti-diagonal.
fn linf_corner(case: &mut Case) {
    let s = SpaceDescriptor::LInf(2);
    let x = Vector::from([1.0, 1.0]);
    let expected: [(Relation, &[Arc], RayStructure); 4] = [
        (
            Relation::RhoPlus,
            &[(180.0, 180.0), (270.0, 270.0)],
            RayStructure::RayUnion,
        ),
        (
            Relation::RhoMinus,
            &[(0.0, 0.0), (90.0, 90.0)],
            RayStructure::RayUnion,
        ),
        (
            Relation::Rho,
            &[(135.0, 135.0), (315.0, 315.0)],
            RayStructure::Hyperplane,
        ),
        (
            Relation::BirkhoffJames,
            &[(90.0, 180.0), (270.0, 0.0)],
            RayStructure::RayUnion,
        ),
    ];
    for (rel, want, structure) in expected {
        let Some(d) = scan(case, &s, &x, rel) else {
            continue;
        };
        let inputs = || json!({"space": s, "x": x, "relation": rel});
        let got: Vec<(f64, f64)> = d.rays.iter().map(|r| (r.start_deg, r.end_deg)).collect();
        let worst = if got.len() == want.len() {
            got.iter()
                .zip(want)
                .map(|(g, w)| gap_deg(g.0, w.0).max(gap_deg(g.1, w.1)))
                .fold(0.0, f64::max)
        } else {
            f64::INFINITY
        };
        case.within("corner_rays", inputs, worst, ANGLE_TOL_DEG);
        case.equal("corner_structure", inputs, structure, d.structure);
        check_generic(case, &s, &x, &d);
    }

    let cfg = AdditivityConfig {
        seed: case.derived_seed(0),
        ..AdditivityConfig::default()
    };
    let inputs = || json!({"space": s, "x": x});
    if let Some(r) = case.ok("classify", inputs, classify(&s, &x, &cfg)) {
        case.note("classification", &r);
        case.holds("corner_not_classically_smooth", inputs, !r.classical);
        case.holds("corner_not_rho_plus_smooth", inputs, !r.rho_plus);
        case.holds("corner_not_rho_minus_smooth", inputs, !r.rho_minus);
        case.holds("corner_rho_smooth", inputs, r.rho);
        let kernel = r.hyperplane_functional.as_ref().and_then(|g| {
            dual_pairing(g, &Vector::from([1.0, -1.0]))
                .ok()
                .map(|v| (g, v))
        });
        match kernel {
            Some((g, v)) => {
                let size = g.coords().iter().fold(0.0f64, |m, c| m.max(c.abs()));
                case.within(
                    "corner_hyperplane_kernel",
                    inputs,
                    v.abs(),
                    case.tol.exact * size,
                );
                case.holds("corner_hyperplane_nonzero", inputs, size > 0.0);
            }
            None => {
                case.holds("corner_hyperplane_present", inputs, false);
            }
        }
    }
}

/// Random points of the plane: the scans must match pointwise verdicts, the
/// rho set is always a line, and the one-sided sets are lines exactly at
/// smooth points.
fn random_point(case: &mut Case) {
    let mut rng = case.rng(0);
    let fam = FAMILIES[case.trial % FAMILIES.len()];
    let s = fam.space(2);
    let x = point(&mut rng, 2);
    let classical = normderiv_core::smoothness::is_classically_smooth(&s, &x);
    let Some(classical) = case.ok("classical", || json!({"space": s, "x": x}), classical) else {
        return;
    };
    let mut rho_rays = Vec::new();
    let mut bj = None;
    for rel in Relation::ALL {
        let Some(d) = scan(case, &s, &x, rel) else {
            continue;
        };
        let inputs = || json!({"space": s, "x": x, "relation": rel});
        check_generic(case, &s, &x, &d);
        match rel {
            Relation::Rho => {
                case.equal(
                    "rho_set_is_line",
                    inputs,
                    RayStructure::Hyperplane,
                    d.structure,
                );
                rho_rays = d.rays.clone();
            }
            Relation::RhoPlus | Relation::RhoMinus => {
                case.equal(
                    "pm_line_iff_smooth",
                    inputs,
                    classical,
                    d.structure == RayStructure::Hyperplane,
                );
            }
            Relation::BirkhoffJames => bj = Some(d.clone()),
        }
        for _ in 0..12 {
            let deg = 360.0 * rng.random::<f64>();
            if near_boundary(&d, deg, 1e-4) {
                continue;
            }
            let y = direction(deg);
            let inputs = || json!({"space": s, "x": x, "relation": rel, "angle_deg": deg});
            if let Some(v) = case.ok(
                "verdict",
                inputs,
                is_orthogonal(&s, &x, &y, rel, case.tol.orthogonality),
            ) {
                let scanned = d.rays.iter().any(|r| in_sector(r, deg));
                case.equal("scan_matches_pointwise", inputs, v.holds, scanned);
            }
        }
    }
    if let Some(bj) = bj {
        for r in &rho_rays {
            let inputs = || json!({"space": s, "x": x, "ray_deg": r.start_deg});
            case.holds(
                "rho_rays_inside_bj",
                inputs,
                bj.rays.iter().any(|b| in_sector(b, r.start_deg)),
            );
        }
    }
}

pub(super) fn ray_example(case: &mut Case) {
    if case.trial == 0 {
        linf_corner(case);
    } else {
        random_point(case);
    }
}
