use normderiv_core::linalg::Matrix;
use normderiv_core::operator::{
    check_kh_theorem, check_l1_domain_theorem, check_rho_smooth_remark,
    construct_counterexample_pair, op_limit_oracle, op_norm, rho_pm_operator, OperatorSweepConfig,
};
use normderiv_core::sampling::{gaussian_matrix, with_singular_values};
use normderiv_core::{norm, OperatorMatrix, Schedule, Side, SpaceDescriptor};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::json;

use crate::report::Case;

fn sweep_config(case: &Case) -> OperatorSweepConfig {
    OperatorSweepConfig {
        seed: case.derived_seed(0),
        tol: case.tol.additivity,
        ..OperatorSweepConfig::default()
    }
}

/// Top singular value 2 with multiplicity `m`, then a strictly smaller tail.
fn top_multiplicity<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, m: usize) -> Matrix {
    let k = rows.min(cols);
    let mut values = vec![2.0; m.min(k)];
    let mut next = 1.5;
    while values.len() < k {
        values.push(next * (0.5 + 0.5 * rng.random::<f64>()));
        next *= 0.7;
    }
    with_singular_values(rng, rows, cols, &values)
}

/// The identity on the Euclidean plane: both basis directions attain the
/// norm, and the constructed pair takes derivative values 1, 1 and 1/2.
fn identity_values(case: &mut Case) {
    let t = OperatorMatrix::hilbert(Matrix::identity(2));
    let a1 = OperatorMatrix::hilbert(Matrix::diagonal(&[1.0, -0.5]));
    let a2 = OperatorMatrix::hilbert(Matrix::diagonal(&[-0.5, 1.0]));
    let sum = a1.combine(1.0, &a2, 1.0).expect("same space");
    let schedule = Schedule::default();
    for (label, a, want) in [("a1", &a1, 1.0), ("a2", &a2, 1.0), ("a1+a2", &sum, 0.5)] {
        let inputs = || json!({"t": t, "a": a, "label": label});
        if let Some(v) = case.ok("identity_exact", inputs, rho_pm_operator(&t, a, Side::Plus)) {
            case.close(
                "identity_exact_value",
                inputs,
                want,
                v.value,
                case.tol.exact,
            );
        }
        if let Some(v) = case.ok(
            "identity_oracle",
            inputs,
            op_limit_oracle(&t, a, Side::Plus, &schedule),
        ) {
            case.note("identity_oracle", &v);
            case.close(
                "identity_oracle_value",
                inputs,
                want,
                v.value,
                case.tol.oracle.max(v.error_estimate),
            );
        }
    }
    let inputs = || json!({"t": t});
    if let Some((c1, c2)) = case.ok(
        "counterexample",
        inputs,
        construct_counterexample_pair(&t, 0, 1),
    ) {
        let c12 = c1.combine(1.0, &c2, 1.0).expect("same space");
        let vals: Vec<f64> = [&c1, &c2, &c12]
            .iter()
            .filter_map(|a| rho_pm_operator(&t, a, Side::Plus).ok().map(|v| v.value))
            .collect();
        case.note("constructed_values", &vals);
        if vals.len() == 3 {
            case.close(
                "constructed_gap",
                inputs,
                1.5,
                vals[0] + vals[1] - vals[2],
                case.tol.exact,
            );
        }
    }
}

fn run_kh(case: &mut Case, t: &OperatorMatrix, multiplicity: Option<usize>) {
    let inputs = || json!({"t": t});
    let Some(r) = case.ok(
        "kh_equivalence",
        inputs,
        check_kh_theorem(t, &sweep_config(case)),
    ) else {
        return;
    };
    case.note("kh", &r);
    case.holds("kh_consistent", inputs, r.consistent);
    case.equal(
        "kh_unique_iff_dim_one",
        inputs,
        r.attainment_dim == 1,
        r.unique_attainment,
    );
    if let Some(m) = multiplicity {
        case.equal("kh_attainment_dim", inputs, m, r.attainment_dim);
    }
    if let Some(c) = &r.counterexample {
        case.holds("kh_counterexample_breaks", inputs, c.breaks_additivity);
    } else {
        case.holds(
            "kh_counterexample_when_degenerate",
            inputs,
            r.unique_attainment,
        );
    }
}

pub(super) fn kh(case: &mut Case) {
    if case.trial == 0 {
        identity_values(case);
        run_kh(case, &OperatorMatrix::hilbert(Matrix::identity(2)), Some(2));
        run_kh(
            case,
            &OperatorMatrix::hilbert(Matrix::diagonal(&[2.0, 1.0])),
            Some(1),
        );
        run_kh(
            case,
            &OperatorMatrix::hilbert(Matrix::diagonal(&[3.0, 3.0, 1.0])),
            Some(2),
        );
        return;
    }
    let mut rng = case.rng(0);
    let rows = 2 + (case.trial / 2) % 5;
    let cols = 2 + (case.trial / 10) % 5;
    if case.trial.is_multiple_of(2) {
        run_kh(
            case,
            &OperatorMatrix::hilbert(gaussian_matrix(&mut rng, rows, cols)),
            None,
        );
    } else {
        let m = 1 + (case.trial / 4) % rows.min(cols);
        let t = top_multiplicity(&mut rng, rows, cols, m);
        let nt = op_norm(&OperatorMatrix::hilbert(t.clone()));
        if let Some(nt) = case.ok("op_norm", || json!({"t": t.to_rows()}), nt) {
            case.close(
                "constructed_norm",
                || json!({"t": t.to_rows()}),
                2.0,
                nt,
                case.tol.exact,
            );
        }
        run_kh(case, &OperatorMatrix::hilbert(t), Some(m));
    }
}

pub(super) fn rho_remark(case: &mut Case) {
    let mut rng = case.rng(0);
    let (t, m) = if case.trial % 4 == 3 {
        let n = 2 + (case.trial / 4) % 5;
        (gaussian_matrix(&mut rng, n, n), None)
    } else {
        let m = 1 + case.trial % 3;
        let n = m.max(2) + (case.trial / 3) % 3;
        let t = if case.trial.is_multiple_of(2) {
            let mut d = vec![2.0; m];
            d.extend((m..n).map(|i| 1.5 / (i - m + 1) as f64));
            Matrix::diagonal(&d)
        } else {
            top_multiplicity(&mut rng, n, n, m)
        };
        (t, Some(m))
    };
    let t = OperatorMatrix::hilbert(t);
    let inputs = || json!({"t": t});
    let Some(r) = case.ok(
        "rho_remark_equivalence",
        inputs,
        check_rho_smooth_remark(&t, &sweep_config(case)),
    ) else {
        return;
    };
    case.note("rho_remark", &r);
    case.holds("rho_remark_consistent", inputs, r.consistent);
    case.equal(
        "rho_additive_iff_dim_le_two",
        inputs,
        r.attainment_dim <= 2,
        r.rho_additive,
    );
    if let Some(m) = m {
        case.equal("rho_remark_attainment_dim", inputs, m, r.attainment_dim);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Columns {
    Generic,
    /// Column 0 repeated, permuted and sign-flipped, in another column.
    Duplicated,
    /// A single maximizing column whose image has a tie in absolute value.
    Tied,
}

pub(super) fn l1_domain(case: &mut Case) {
    let mut rng = case.rng(0);
    let m = 2 + (case.trial / 9) % 3;
    let n = 2 + (case.trial / 27) % 4;
    let codomain = match case.trial % 3 {
        0 => SpaceDescriptor::Euclidean(m),
        1 => SpaceDescriptor::LInf(m),
        _ => SpaceDescriptor::Lp {
            dim: m,
            p: if (case.trial / 9).is_multiple_of(2) {
                3.0
            } else {
                1.5
            },
        },
    };
    let shape = [Columns::Generic, Columns::Duplicated, Columns::Tied][(case.trial / 3) % 3];
    let mut t = gaussian_matrix(&mut rng, m, n);
    let mut twin = None;
    match shape {
        Columns::Generic => {}
        Columns::Duplicated => {
            let j = rng.random_range(1..n);
            let mut perm: Vec<usize> = (0..m).collect();
            perm.shuffle(&mut rng);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            for r in 0..m {
                t[(r, j)] = sign * t[(perm[r], 0)];
            }
            twin = Some(j);
        }
        Columns::Tied => {
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let big = (0..m).fold(0.0f64, |b, r| b.max(t[(r, 0)].abs()));
            t[(0, 0)] = big;
            t[(1, 0)] = sign * big;
        }
    }
    if shape != Columns::Generic {
        // make column 0 (and its twin) dominate the rest by a factor of two
        let col_norm = |t: &Matrix, c: usize| norm(&codomain, &t.column(c)).unwrap_or(0.0);
        let rest = (1..n)
            .filter(|c| Some(*c) != twin)
            .fold(0.0f64, |b, c| b.max(col_norm(&t, c)));
        let k = (2.0 * rest / col_norm(&t, 0)).max(1.0);
        for c in std::iter::once(0).chain(twin) {
            for r in 0..m {
                t[(r, c)] *= k;
            }
        }
    }
    let Ok(t) = OperatorMatrix::new(t, SpaceDescriptor::L1(n), codomain.clone()) else {
        return;
    };
    let inputs = || json!({"t": t, "shape": format!("{shape:?}")});
    let Some(r) = case.ok(
        "l1_domain_equivalence",
        inputs,
        check_l1_domain_theorem(&t, &sweep_config(case)),
    ) else {
        return;
    };
    case.note("l1_domain", &r);
    case.holds("l1_domain_consistent", inputs, r.consistent);
    case.holds("l1_domain_oracle_consistent", inputs, r.oracle_consistent);
    case.equal("l1_domain_both_directions", inputs, r.right, r.left);
    match shape {
        Columns::Duplicated => {
            case.holds(
                "duplicated_columns_attain",
                inputs,
                r.maximizing_columns.len() >= 2,
            );
            case.holds("duplicated_not_smooth", inputs, !r.left);
        }
        Columns::Tied if matches!(codomain, SpaceDescriptor::LInf(_)) => {
            case.equal("tied_image_not_smooth", inputs, Some(false), r.image_smooth);
            case.holds("tied_not_smooth", inputs, !r.left);
        }
        _ => {}
    }
    if r.maximizing_columns.len() >= 2 {
        case.holds(
            "l1_counterexample_breaks",
            inputs,
            r.counterexample
                .as_ref()
                .is_some_and(|c| c.breaks_additivity),
        );
    } else if let Some(c) = &r.counterexample {
        case.holds(
            "l1_image_counterexample_breaks",
            inputs,
            c.breaks_additivity,
        );
    }
}
