//! Smooth, rho-smooth and rho±-smooth points.
//!
//! A point is rho±-smooth when `rho'_±(x, ·)` is additive and rho-smooth when
//! `rho'(x, ·)` is. Additivity is tested by sampling; since every derivative
//! here is piecewise linear with finitely many pieces, a non-additive map
//! fails on random pairs with overwhelming probability, and the failing pair
//! is kept as a witness.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::derivative::{DerivativeKind, Side};
use crate::error::{Error, Result};
use crate::orthogonality::Relation;
use crate::sampling::{gaussian_vector, trial_rng};
use crate::space::{norm, DualFunctional, SpaceDescriptor, Vector};
use crate::support::{range_over_face, support_set, SupportFace};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdditivityConfig {
    pub trials: usize,
    /// Relative; residuals are divided by `||x|| (||y1|| + ||y2||)`.
    pub tol: f64,
    pub seed: u64,
}

impl Default for AdditivityConfig {
    fn default() -> Self {
        AdditivityConfig {
            trials: 500,
            tol: tolerance::ADDITIVITY,
            seed: 0,
        }
    }
}

impl AdditivityConfig {
    pub const MIN_TRIALS: usize = 100;
    /// Fresh samples used to confirm a reconstructed functional.
    pub const LINEARITY_SAMPLES: usize = 100;
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum AdditivityWitness {
    /// `d(y1 + y2) != d(y1) + d(y2)`.
    Pair {
        y1: Vector,
        y2: Vector,
        residual: f64,
    },
    /// Additive on every sampled pair but `d(y) != ||x|| g(y)` for the
    /// functional `g` read off the standard basis.
    Linearity { y: Vector, residual: f64 },
}

impl AdditivityWitness {
    fn negated(&self) -> AdditivityWitness {
        match self {
            AdditivityWitness::Pair { y1, y2, residual } => AdditivityWitness::Pair {
                y1: -y1,
                y2: -y2,
                residual: *residual,
            },
            AdditivityWitness::Linearity { y, residual } => AdditivityWitness::Linearity {
                y: -y,
                residual: *residual,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AdditivityOutcome {
    pub additive: bool,
    /// `g` with `d(y) = ||x|| g(y)`, present when additive.
    pub functional: Option<DualFunctional>,
    pub witness: Option<AdditivityWitness>,
    pub trials: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Evidence {
    pub trials: usize,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SmoothnessReport {
    pub point: Vector,
    pub classical: bool,
    pub rho_plus: bool,
    pub rho_minus: bool,
    pub rho: bool,
    /// Linear representative of `rho'(x, ·)` (or `rho'_+(x, ·)`), scaled by `1 / ||x||`.
    pub hyperplane_functional: Option<DualFunctional>,
    pub evidence: Evidence,
}

/// Exact derivative evaluation at a fixed base point.
pub(crate) struct PointDerivative {
    face: SupportFace,
    nx: f64,
}

impl PointDerivative {
    pub(crate) fn new(space: &SpaceDescriptor, x: &Vector) -> Result<Self> {
        let nx = norm(space, x)?;
        if nx == 0.0 {
            return Err(Error::degenerate("smoothness is only defined at x != 0"));
        }
        Ok(PointDerivative {
            face: support_set(space, x)?,
            nx,
        })
    }

    pub(crate) fn eval(&self, kind: DerivativeKind, y: &Vector) -> f64 {
        let r = range_over_face(&self.face, y).expect("dimension fixed by the face");
        match kind {
            DerivativeKind::Plus => self.nx * r.upper,
            DerivativeKind::Minus => self.nx * r.lower,
            DerivativeKind::Mean => self.nx * r.upper * 0.5 + self.nx * r.lower * 0.5,
        }
    }
}

pub fn is_classically_smooth(space: &SpaceDescriptor, x: &Vector) -> Result<bool> {
    Ok(support_set(space, x)?.is_singleton())
}

pub fn is_rho_smooth(
    space: &SpaceDescriptor,
    x: &Vector,
    config: &AdditivityConfig,
) -> Result<AdditivityOutcome> {
    check_trials(config)?;
    let d = PointDerivative::new(space, x)?;
    Ok(sample_additivity(space, &d, DerivativeKind::Mean, config))
}

/// Runs the plus and minus tests on independent streams and reconciles them.
/// The verdicts must agree: `rho'_+(x, y) = -rho'_-(x, -y)`, so a failing
/// pair on one side negates into a failing pair on the other.
pub fn is_rho_pm_smooth(
    space: &SpaceDescriptor,
    x: &Vector,
    config: &AdditivityConfig,
) -> Result<AdditivityOutcome> {
    check_trials(config)?;
    let d = PointDerivative::new(space, x)?;
    let plus = sample_additivity(space, &d, DerivativeKind::Plus, config);
    let minus = sample_additivity(space, &d, DerivativeKind::Minus, config);
    let trials = plus.trials + minus.trials;
    let max_residual = plus.max_residual.max(minus.max_residual);

    let merged = |mut o: AdditivityOutcome| {
        o.trials = trials;
        o.max_residual = max_residual;
        o
    };
    match (plus.additive, minus.additive) {
        (true, true) | (false, false) => Ok(merged(plus)),
        (false, true) => {
            let w = plus
                .witness
                .clone()
                .expect("failed outcome carries a witness");
            if witness_fails(&d, DerivativeKind::Minus, &w.negated(), &minus, config.tol) {
                Ok(merged(plus))
            } else {
                Err(disagreement(Side::Plus, &w))
            }
        }
        (true, false) => {
            let w = minus
                .witness
                .clone()
                .expect("failed outcome carries a witness");
            if witness_fails(&d, DerivativeKind::Plus, &w.negated(), &plus, config.tol) {
                Ok(AdditivityOutcome {
                    additive: false,
                    functional: None,
                    witness: Some(w.negated()),
                    trials,
                    max_residual,
                })
            } else {
                Err(disagreement(Side::Minus, &w))
            }
        }
    }
}

fn disagreement(failed: Side, w: &AdditivityWitness) -> Error {
    Error::PlusMinusDisagreement(format!(
        "{failed:?} side is not additive ({w:?}) but the negated witness passes on the {:?} side",
        failed.flipped()
    ))
}

/// Re-evaluates a witness against another derivative.
fn witness_fails(
    d: &PointDerivative,
    kind: DerivativeKind,
    w: &AdditivityWitness,
    other: &AdditivityOutcome,
    tol: f64,
) -> bool {
    match w {
        AdditivityWitness::Pair { y1, y2, .. } => pair_residual(d, kind, y1, y2) > tol,
        AdditivityWitness::Linearity { y, .. } => match &other.functional {
            Some(g) => linearity_residual(d, kind, g, y) > tol,
            None => true,
        },
    }
}

pub fn classify(
    space: &SpaceDescriptor,
    x: &Vector,
    config: &AdditivityConfig,
) -> Result<SmoothnessReport> {
    let classical = is_classically_smooth(space, x)?;
    let pm = is_rho_pm_smooth(space, x, config)?;
    let mean = is_rho_smooth(space, x, config)?;
    debug_assert!(
        !classical || pm.additive,
        "smooth point failed rho± additivity"
    );
    debug_assert!(
        !pm.additive || mean.additive,
        "rho±-smooth point failed rho additivity"
    );
    Ok(SmoothnessReport {
        point: x.clone(),
        classical,
        rho_plus: pm.additive,
        rho_minus: pm.additive,
        rho: mean.additive,
        hyperplane_functional: mean.functional.or(pm.functional),
        evidence: Evidence {
            trials: pm.trials + mean.trials,
            max_residual: pm.max_residual.max(mean.max_residual),
        },
    })
}

fn check_trials(config: &AdditivityConfig) -> Result<()> {
    if config.trials < AdditivityConfig::MIN_TRIALS {
        return Err(Error::input(format!(
            "additivity sampling needs at least {} trials",
            AdditivityConfig::MIN_TRIALS
        )));
    }
    Ok(())
}

fn stream_of(kind: DerivativeKind) -> u64 {
    match kind {
        DerivativeKind::Plus => 1,
        DerivativeKind::Minus => 2,
        DerivativeKind::Mean => 3,
    }
}

/// Directions biased toward the kinks of the supported norms: Gaussian
/// vectors, signed basis vectors, and small integer vectors.
pub(crate) fn structured_direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    match rng.random_range(0..4u8) {
        0 => {
            let i = rng.random_range(0..n);
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            Vector::basis(n, i).scaled(s)
        }
        1 => Vector::new(
            (0..n)
                .map(|_| f64::from(rng.random_range(-2i8..=2)))
                .collect(),
        ),
        _ => gaussian_vector(rng, n),
    }
}

fn sample_additivity(
    space: &SpaceDescriptor,
    d: &PointDerivative,
    kind: DerivativeKind,
    config: &AdditivityConfig,
) -> AdditivityOutcome {
    let n = space.dim();
    let stream = stream_of(kind);
    let mut max_residual: f64 = 0.0;
    for i in 0..config.trials {
        let mut rng = trial_rng(config.seed, stream, i as u64);
        let y1 = structured_direction(&mut rng, n);
        // antipodal pairs expose rho'_+(x, y) + rho'_+(x, -y) = rho'_+ - rho'_- != 0
        let y2 = if kind != DerivativeKind::Mean && i % 4 == 3 {
            -&y1
        } else {
            structured_direction(&mut rng, n)
        };
        let r = pair_residual(d, kind, &y1, &y2);
        max_residual = max_residual.max(r);
        if r > config.tol {
            return AdditivityOutcome {
                additive: false,
                functional: None,
                witness: Some(AdditivityWitness::Pair {
                    y1,
                    y2,
                    residual: r,
                }),
                trials: i + 1,
                max_residual,
            };
        }
    }

    let g = reconstruct(d, kind, n);
    for k in 0..AdditivityConfig::LINEARITY_SAMPLES {
        let idx = (config.trials + k) as u64;
        let y = gaussian_vector(&mut trial_rng(config.seed, stream, idx), n);
        let r = linearity_residual(d, kind, &g, &y);
        max_residual = max_residual.max(r);
        if r > config.tol {
            return AdditivityOutcome {
                additive: false,
                functional: None,
                witness: Some(AdditivityWitness::Linearity { y, residual: r }),
                trials: config.trials,
                max_residual,
            };
        }
    }
    AdditivityOutcome {
        additive: true,
        functional: Some(g),
        witness: None,
        trials: config.trials,
        max_residual,
    }
}

/// `g_i = d(e_i) / ||x||`.
pub(crate) fn reconstruct(d: &PointDerivative, kind: DerivativeKind, n: usize) -> DualFunctional {
    DualFunctional::new(
        (0..n)
            .map(|i| d.eval(kind, &Vector::basis(n, i)) / d.nx)
            .collect(),
    )
}

fn euclid(v: &Vector) -> f64 {
    crate::float::sqrt(v.coords().iter().map(|c| c * c).sum())
}

fn pair_residual(d: &PointDerivative, kind: DerivativeKind, y1: &Vector, y2: &Vector) -> f64 {
    let scale = d.nx * (euclid(y1) + euclid(y2));
    if scale == 0.0 {
        return 0.0;
    }
    let sum = y1 + y2;
    (d.eval(kind, &sum) - d.eval(kind, y1) - d.eval(kind, y2)).abs() / scale
}

fn linearity_residual(
    d: &PointDerivative,
    kind: DerivativeKind,
    g: &DualFunctional,
    y: &Vector,
) -> f64 {
    let scale = d.nx * euclid(y);
    if scale == 0.0 {
        return 0.0;
    }
    (d.eval(kind, y) - d.nx * g.apply(y)).abs() / scale
}

/// Two members of an orthogonality set whose sum is not a member.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SubspaceWitness {
    pub y1: Vector,
    pub y2: Vector,
    /// The derivative at `y1 + y2`, which should have been zero.
    pub sum_derivative: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CodimensionReport {
    pub relation: Relation,
    /// Additivity verdict of the derivative defining the relation.
    pub additive: bool,
    /// Whether the orthogonality set was confirmed to be the hyperplane `N(g)`.
    pub hyperplane: bool,
    pub normal: Option<DualFunctional>,
    pub witness: Option<SubspaceWitness>,
    pub samples_checked: usize,
    pub max_residual: f64,
    /// `additive == hyperplane`.
    pub agrees: bool,
}

/// Reconstructs `x^⊥` for one of the rho relations and checks it against the
/// additivity verdict: additive derivatives must give a hyperplane not
/// containing `x`, non-additive ones a pair of members with a non-member sum.
pub fn verify_codimension_theorem(
    space: &SpaceDescriptor,
    x: &Vector,
    relation: Relation,
    samples: usize,
    config: &AdditivityConfig,
) -> Result<CodimensionReport> {
    let kind = relation
        .derivative()
        .ok_or_else(|| Error::input("codimension theorems concern the rho relations only"))?;
    let outcome = match relation {
        Relation::Rho => is_rho_smooth(space, x, config)?,
        _ => is_rho_pm_smooth(space, x, config)?,
    };
    let d = PointDerivative::new(space, x)?;
    let n = space.dim();
    let tol = config.tol;
    let nx2 = d.nx * d.nx;

    // y - (d(y) / ||x||^2) x has derivative zero for every kind, since each
    // support functional takes the value ||x|| at x
    let project = |y: &Vector| -> (Vector, f64) {
        let c = d.eval(kind, y) / nx2;
        let scale = d.nx * (euclid(y) + c.abs() * euclid(x));
        (y.combine(1.0, x, -c), scale)
    };
    let member_residual = |p: &Vector, scale: f64| -> f64 {
        if scale == 0.0 {
            0.0
        } else {
            d.eval(kind, p).abs() / scale
        }
    };

    let mut max_residual: f64 = 0.0;
    let mut samples_checked = 0;

    if outcome.additive {
        let g = reconstruct(&d, kind, n);
        let other = match kind {
            DerivativeKind::Plus => Some(DerivativeKind::Minus),
            DerivativeKind::Minus => Some(DerivativeKind::Plus),
            DerivativeKind::Mean => None,
        };
        let mut ok = (g.apply(x) - d.nx).abs() <= tol * d.nx * 10.0 && g.apply(x) != 0.0;
        let stream = 10 + stream_of(kind);
        let mut prev: Option<(Vector, f64)> = None;
        for k in 0..samples {
            let y = gaussian_vector(&mut trial_rng(config.seed, stream, k as u64), n);
            let (p, scale) = project(&y);
            let mut r = member_residual(&p, scale);
            // the projection lands in the kernel of g
            r = r.max((g.apply(&p) * d.nx).abs() / scale.max(f64::MIN_POSITIVE));
            if let Some(o) = other {
                r = r.max(d.eval(o, &p).abs() / scale.max(f64::MIN_POSITIVE));
            }
            if let Some((q, qs)) = &prev {
                let sum = &p + q;
                r = r.max(member_residual(&sum, scale + qs));
            }
            max_residual = max_residual.max(r);
            ok &= r <= tol;
            samples_checked += 1;
            prev = Some((p, scale));
        }
        return Ok(CodimensionReport {
            relation,
            additive: true,
            hyperplane: ok,
            normal: Some(g),
            witness: None,
            samples_checked,
            max_residual,
            agrees: ok,
        });
    }

    let mut candidates: Vec<Vector> = Vec::new();
    for i in 0..n {
        candidates.push(Vector::basis(n, i).scaled(-1.0));
        candidates.push(Vector::basis(n, i));
    }
    match &outcome.witness {
        Some(AdditivityWitness::Pair { y1, y2, .. }) => {
            candidates.push(y1.clone());
            candidates.push(y2.clone());
        }
        Some(AdditivityWitness::Linearity { y, .. }) => {
            candidates.extend((0..n).map(|i| Vector::basis(n, i).scaled(y.coords()[i])));
            candidates.push(-y);
        }
        None => {}
    }
    let members: Vec<(Vector, f64)> = candidates
        .iter()
        .map(&project)
        .filter(|(p, s)| !p.is_zero() && member_residual(p, *s) <= tol)
        .collect();

    let mut witness = None;
    'search: for (a, (p, ps)) in members.iter().enumerate() {
        for (q, qs) in &members[a + 1..] {
            samples_checked += 1;
            let sum = p + q;
            let r = member_residual(&sum, ps + qs);
            max_residual = max_residual.max(r);
            if r > tol {
                witness = Some(SubspaceWitness {
                    y1: p.clone(),
                    y2: q.clone(),
                    sum_derivative: d.eval(kind, &sum),
                });
                break 'search;
            }
        }
    }
    if witness.is_none() {
        // partial sums of the basis pieces of a linearity witness
        if let Some(AdditivityWitness::Linearity { y, .. }) = &outcome.witness {
            witness = chain_witness(&d, kind, n, y, &project, tol);
        }
    }
    let hyperplane = witness.is_none();
    Ok(CodimensionReport {
        relation,
        additive: false,
        hyperplane,
        normal: None,
        witness,
        samples_checked,
        max_residual,
        agrees: !hyperplane,
    })
}

fn chain_witness(
    d: &PointDerivative,
    kind: DerivativeKind,
    n: usize,
    y: &Vector,
    project: &impl Fn(&Vector) -> (Vector, f64),
    tol: f64,
) -> Option<SubspaceWitness> {
    let piece = |i: usize| project(&Vector::basis(n, i).scaled(y.coords()[i]));
    let (mut acc, mut acc_scale) = piece(0);
    for i in 1..n {
        let (q, qs) = piece(i);
        let sum = &acc + &q;
        let scale = acc_scale + qs;
        let value = d.eval(kind, &sum);
        if scale > 0.0 && value.abs() / scale > tol {
            return Some(SubspaceWitness {
                y1: acc,
                y2: q,
                sum_derivative: value,
            });
        }
        acc = sum;
        acc_scale = scale;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec())
    }

    fn cfg() -> AdditivityConfig {
        AdditivityConfig::default()
    }

    #[test]
    fn classical_examples() {
        assert!(is_classically_smooth(&SpaceDescriptor::L1(2), &v(&[1.0, 1.0])).unwrap());
        assert!(!is_classically_smooth(&SpaceDescriptor::LInf(2), &v(&[1.0, 1.0])).unwrap());
        assert!(
            is_classically_smooth(&SpaceDescriptor::Euclidean(4), &v(&[0.0, 1.0, -3.0, 0.0]))
                .unwrap()
        );
        assert!(matches!(
            is_classically_smooth(&SpaceDescriptor::L1(2), &Vector::zeros(2)),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn rho_smooth_examples() {
        let cases = [
            (SpaceDescriptor::LInf(2), v(&[1.0, 1.0]), [0.5, 0.5]),
            (SpaceDescriptor::L1(2), v(&[1.0, 0.0]), [1.0, 0.0]),
            (SpaceDescriptor::Euclidean(2), v(&[3.0, 4.0]), [0.6, 0.8]),
        ];
        for (space, x, g) in cases {
            let o = is_rho_smooth(&space, &x, &cfg()).unwrap();
            assert!(o.additive, "{space:?}");
            let f = o.functional.unwrap();
            assert!(f.max_abs_diff(&DualFunctional::from(g)) < 1e-12);
        }
    }

    #[test]
    fn rho_pm_examples() {
        assert!(
            !is_rho_pm_smooth(&SpaceDescriptor::LInf(2), &v(&[1.0, 1.0]), &cfg())
                .unwrap()
                .additive
        );
        assert!(
            is_rho_pm_smooth(
                &SpaceDescriptor::Euclidean(3),
                &v(&[1.0, -2.0, 0.5]),
                &cfg()
            )
            .unwrap()
            .additive
        );
        let o = is_rho_pm_smooth(&SpaceDescriptor::L1(2), &v(&[1.0, 0.0]), &cfg()).unwrap();
        assert!(!o.additive);
        assert!(o.witness.is_some());
    }

    #[test]
    fn too_few_trials_rejected() {
        let c = AdditivityConfig {
            trials: 10,
            ..cfg()
        };
        assert!(is_rho_smooth(&SpaceDescriptor::L1(2), &v(&[1.0, 0.0]), &c).is_err());
    }

    #[test]
    fn report_for_linf_corner() {
        let r = classify(&SpaceDescriptor::LInf(2), &v(&[1.0, 1.0]), &cfg()).unwrap();
        assert!(!r.classical && !r.rho_plus && !r.rho_minus && r.rho);
        let g = r.hyperplane_functional.unwrap();
        assert!(g.max_abs_diff(&DualFunctional::from([0.5, 0.5])) < 1e-12);
    }

    #[test]
    fn codimension_examples() {
        let linf = SpaceDescriptor::LInf(2);
        let x = v(&[1.0, 1.0]);
        let r = verify_codimension_theorem(&linf, &x, Relation::Rho, 100, &cfg()).unwrap();
        assert!(r.additive && r.hyperplane && r.agrees);
        assert!(
            r.normal
                .unwrap()
                .max_abs_diff(&DualFunctional::from([0.5, 0.5]))
                < 1e-12
        );

        let r = verify_codimension_theorem(&linf, &x, Relation::RhoPlus, 100, &cfg()).unwrap();
        assert!(!r.additive && !r.hyperplane && r.agrees);
        let w = r.witness.unwrap();
        let mut pair = [w.y1.into_coords(), w.y2.into_coords()];
        pair.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(pair, [[-1.0, 0.0].to_vec(), [0.0, -1.0].to_vec()]);
        assert_eq!(w.sum_derivative, -1.0);

        let e = SpaceDescriptor::Euclidean(2);
        let r = verify_codimension_theorem(&e, &v(&[1.0, 0.0]), Relation::RhoPlus, 100, &cfg())
            .unwrap();
        assert!(r.hyperplane && r.agrees);
        assert!(
            r.normal
                .unwrap()
                .max_abs_diff(&DualFunctional::from([1.0, 0.0]))
                < 1e-12
        );
    }

    #[test]
    fn birkhoff_james_has_no_codimension_check() {
        let e = SpaceDescriptor::Euclidean(2);
        assert!(verify_codimension_theorem(
            &e,
            &v(&[1.0, 0.0]),
            Relation::BirkhoffJames,
            10,
            &cfg()
        )
        .is_err());
    }
}
