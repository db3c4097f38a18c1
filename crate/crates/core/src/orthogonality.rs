//! Birkhoff-James and rho-orthogonality.
//!
//! `x ⊥_B y` holds iff `rho'_-(x, y) <= 0 <= rho'_+(x, y)`; the three rho
//! relations ask for the corresponding derivative to vanish. Besides deciding
//! the relations this module checks the two support-functional
//! characterizations literally, extreme functional by extreme functional, and
//! scans orthogonality sets of planar spaces into unions of rays.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::derivative::{DerivativeKind, RhoPair, Side};
use crate::error::{check_dim, Error, Result};
use crate::float::{ceil, cos, rem_euclid, sin};
use crate::space::{norm, DualFunctional, SpaceDescriptor, Vector};
use crate::support::{range_over_face, support_set, FaceRange, SupportFace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Relation {
    #[cfg_attr(feature = "serde", serde(rename = "bj"))]
    BirkhoffJames,
    RhoPlus,
    RhoMinus,
    Rho,
}

impl Relation {
    pub const ALL: [Relation; 4] = [
        Relation::BirkhoffJames,
        Relation::RhoPlus,
        Relation::RhoMinus,
        Relation::Rho,
    ];

    /// The derivative whose zero set defines the relation; `None` for Birkhoff-James.
    pub fn derivative(self) -> Option<DerivativeKind> {
        match self {
            Relation::BirkhoffJames => None,
            Relation::RhoPlus => Some(DerivativeKind::Plus),
            Relation::RhoMinus => Some(DerivativeKind::Minus),
            Relation::Rho => Some(DerivativeKind::Mean),
        }
    }

    fn holds_for(self, pair: &RhoPair, tol: f64) -> bool {
        match self.derivative() {
            None => pair.minus <= tol && pair.plus >= -tol,
            Some(kind) => pair.get(kind).abs() <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrthogonalityVerdict {
    pub relation: Relation,
    pub holds: bool,
    pub rho_minus: f64,
    pub rho_plus: f64,
    /// For Birkhoff-James: a support functional at `x` that annihilates `y`.
    pub functional: Option<DualFunctional>,
    /// Absolute tolerance the derivatives were compared against.
    pub tolerance: f64,
}

/// `tol` is relative; the comparison uses `tol * ||x|| * ||y||`.
pub fn is_orthogonal(
    space: &SpaceDescriptor,
    x: &Vector,
    y: &Vector,
    relation: Relation,
    tol: f64,
) -> Result<OrthogonalityVerdict> {
    let nx = norm(space, x)?;
    let ny = norm(space, y)?;
    if nx == 0.0 || ny == 0.0 {
        return Ok(OrthogonalityVerdict {
            relation,
            holds: true,
            rho_minus: 0.0,
            rho_plus: 0.0,
            functional: None,
            tolerance: 0.0,
        });
    }
    let face = support_set(space, x)?;
    let range = range_over_face(&face, y)?;
    let pair = RhoPair {
        minus: nx * range.lower,
        plus: nx * range.upper,
    };
    let tol_abs = tol * nx * ny;
    let holds = relation.holds_for(&pair, tol_abs);
    let functional = (relation == Relation::BirkhoffJames && holds)
        .then(|| annihilating_functional(&face, &range));
    Ok(OrthogonalityVerdict {
        relation,
        holds,
        rho_minus: pair.minus,
        rho_plus: pair.plus,
        functional,
        tolerance: tol_abs,
    })
}

/// The point of the segment between the minimizing and maximizing extremes
/// whose value on `y` is closest to zero.
fn annihilating_functional(face: &SupportFace, range: &FaceRange) -> DualFunctional {
    let weight = if range.width() > 0.0 {
        (range.upper / range.width()).clamp(0.0, 1.0)
    } else {
        0.0
    };
    face.blend(range.argmin, range.argmax, weight)
}

fn functional_hitting(face: &SupportFace, range: &FaceRange, target: f64) -> DualFunctional {
    let weight = if range.width() > 0.0 {
        ((range.upper - target) / range.width()).clamp(0.0, 1.0)
    } else {
        0.0
    };
    face.blend(range.argmin, range.argmax, weight)
}

/// Literal check of: `x ⊥_rho y` iff for every `f in J(x)` some `g in J(x)`
/// has `(f + g)(y) = 0`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RhoCharacterization {
    /// Verdict of the extreme-by-extreme search for partners `g`.
    pub holds: bool,
    /// Verdict of the reduced condition `max f(y) = -min f(y)`.
    pub reduction_holds: bool,
    pub derivative: f64,
    pub agrees_with_derivative: bool,
}

pub fn check_rho_characterization(
    space: &SpaceDescriptor,
    x: &Vector,
    y: &Vector,
    tol: f64,
) -> Result<RhoCharacterization> {
    let (face, range, nx, tol_abs) = face_context(space, x, y, tol)?;
    // |rho'| <= tol_abs  <=>  |m + M| <= 2 tol_abs / ||x||
    let slack = 2.0 * tol_abs / nx;

    let mut holds = true;
    for f in face.extremes() {
        let fy = f.apply(y);
        let g = functional_hitting(&face, &range, -fy);
        if (fy + g.apply(y)).abs() > slack {
            holds = false;
            break;
        }
    }
    let reduction_holds = (range.upper + range.lower).abs() <= slack;
    let derivative = nx * range.upper * 0.5 + nx * range.lower * 0.5;
    Ok(RhoCharacterization {
        holds,
        reduction_holds,
        derivative,
        agrees_with_derivative: holds == (derivative.abs() <= tol_abs),
    })
}

/// An extreme functional `f` for which `f(z_t) = 0` at some `t` in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SegmentRoot {
    pub extreme: usize,
    pub t: f64,
}

/// Literal check of the one-sided characterization: some `f0 in J(x)`
/// annihilates `y`, and no `f in J(x)` vanishes on the open segment
/// `z_t = -t x + (1 - t) y` (plus side) or `z_t = t x + (1 - t) y` (minus side).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PmCharacterization {
    pub side: Side,
    pub annihilator: Option<DualFunctional>,
    pub segment_root: Option<SegmentRoot>,
    pub holds: bool,
    pub derivative: f64,
    pub agrees_with_derivative: bool,
}

pub fn check_rho_pm_characterization(
    space: &SpaceDescriptor,
    x: &Vector,
    y: &Vector,
    side: Side,
    tol: f64,
) -> Result<PmCharacterization> {
    let (face, range, nx, tol_abs) = face_context(space, x, y, tol)?;
    let slack = tol_abs / nx;

    let f0 = functional_hitting(&face, &range, 0.0);
    let annihilator = (f0.apply(y).abs() <= slack).then_some(f0);

    // f(z_t) is affine in t; it has a root in (0, 1) iff its endpoint
    // values f(y) and f(-/+ x) = -/+ ||x|| have strictly opposite signs.
    let x_end = match side {
        Side::Plus => -x,
        Side::Minus => x.clone(),
    };
    let mut segment_root = None;
    for (i, f) in face.extremes().iter().enumerate() {
        let at_start = f.apply(y);
        let at_end = f.apply(&x_end);
        let strictly_opposite = match side {
            Side::Plus => at_start > slack,
            Side::Minus => at_start < -slack,
        } && at_start * at_end < 0.0;
        if strictly_opposite {
            segment_root = Some(SegmentRoot {
                extreme: i,
                t: at_start / (at_start - at_end),
            });
            break;
        }
    }

    let holds = annihilator.is_some() && segment_root.is_none();
    let derivative = match side {
        Side::Plus => nx * range.upper,
        Side::Minus => nx * range.lower,
    };
    Ok(PmCharacterization {
        side,
        annihilator,
        segment_root,
        holds,
        derivative,
        agrees_with_derivative: holds == (derivative.abs() <= tol_abs),
    })
}

fn face_context(
    space: &SpaceDescriptor,
    x: &Vector,
    y: &Vector,
    tol: f64,
) -> Result<(SupportFace, FaceRange, f64, f64)> {
    let nx = norm(space, x)?;
    let ny = norm(space, y)?;
    if nx == 0.0 {
        return Err(Error::degenerate("characterizations need x != 0"));
    }
    let face = support_set(space, x)?;
    let range = range_over_face(&face, y)?;
    Ok((face, range, nx, tol * nx * ny))
}

/// A closed arc of directions, swept counterclockwise from `start_deg` to
/// `end_deg`. Equal endpoints mean a single ray.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RaySector {
    pub start_deg: f64,
    pub end_deg: f64,
    /// Largest |derivative| at the endpoints.
    pub residual: f64,
}

impl RaySector {
    pub fn is_ray(&self) -> bool {
        self.start_deg == self.end_deg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RayStructure {
    /// Exactly two antipodal rays: a line through the origin.
    Hyperplane,
    RayUnion,
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RayDiagram {
    pub point: Vector,
    pub relation: Relation,
    pub rays: Vec<RaySector>,
    pub structure: RayStructure,
    /// Angular step of the finer of the last two scans.
    pub step_deg: f64,
    /// Whether the last two scans (step `2 h` and `h`) found the same rays.
    pub stable: bool,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanSample {
    pub angle_deg: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub rho: f64,
}

const MAX_REFINEMENTS: usize = 6;
const ANGLE_MATCH_DEG: f64 = 1e-6;
const BISECTION_WIDTH_DEG: f64 = 1e-11;

/// Scan the orthogonality set of `x` in a two-dimensional space. By
/// homogeneity the set is a union of rays and sectors, so only unit
/// directions `(cos θ, sin θ)` are examined.
pub fn ray_scan_2d(
    space: &SpaceDescriptor,
    x: &Vector,
    relation: Relation,
    step_deg: f64,
    tol: f64,
) -> Result<RayDiagram> {
    if !(step_deg > 0.0 && step_deg <= 1.0) {
        return Err(Error::input("angular step must lie in (0, 1] degrees"));
    }
    let scanner = Scanner::new(space, x, relation, tol)?;
    let mut step = step_deg;
    let mut coarse = scanner.sectors(step);
    let mut fine = scanner.sectors(step / 2.0);
    let mut stable = same_sectors(&coarse, &fine);
    let mut refinements = 0;
    while !stable && refinements < MAX_REFINEMENTS {
        step /= 2.0;
        coarse = fine;
        fine = scanner.sectors(step / 2.0);
        stable = same_sectors(&coarse, &fine);
        refinements += 1;
    }
    let structure = classify_sectors(&fine);
    Ok(RayDiagram {
        point: x.clone(),
        relation,
        rays: fine,
        structure,
        step_deg: step / 2.0,
        stable,
        tolerance: tol,
    })
}

/// Raw samples of both one-sided derivatives (and their mean) around the circle.
pub fn scan_samples(space: &SpaceDescriptor, x: &Vector, step_deg: f64) -> Result<Vec<ScanSample>> {
    if !(step_deg > 0.0 && step_deg <= 360.0) {
        return Err(Error::input("angular step must lie in (0, 360] degrees"));
    }
    let scanner = Scanner::new(space, x, Relation::Rho, 0.0)?;
    let n = grid_size(step_deg);
    Ok((0..n)
        .map(|k| {
            let deg = 360.0 * k as f64 / n as f64;
            let (pair, _) = scanner.eval(deg);
            ScanSample {
                angle_deg: deg,
                rho_minus: pair.minus,
                rho_plus: pair.plus,
                rho: pair.mean(),
            }
        })
        .collect())
}

fn grid_size(step_deg: f64) -> usize {
    let n = ceil(360.0 / step_deg - 1e-9);
    (n as usize).max(4)
}

pub fn direction(deg: f64) -> Vector {
    let r = deg * PI / 180.0;
    Vector::new(alloc::vec![cos(r), sin(r)])
}

struct Scanner<'a> {
    space: &'a SpaceDescriptor,
    face: SupportFace,
    nx: f64,
    relation: Relation,
    tol: f64,
}

impl<'a> Scanner<'a> {
    fn new(space: &'a SpaceDescriptor, x: &Vector, relation: Relation, tol: f64) -> Result<Self> {
        check_dim(2, space.dim(), "ray scans need a two-dimensional space")?;
        let nx = norm(space, x)?;
        if nx == 0.0 {
            return Err(Error::degenerate("ray scans need x != 0"));
        }
        Ok(Scanner {
            space,
            face: support_set(space, x)?,
            nx,
            relation,
            tol,
        })
    }

    /// Derivative pair at the unit direction and the absolute tolerance there.
    fn eval(&self, deg: f64) -> (RhoPair, f64) {
        let u = direction(deg);
        let r = range_over_face(&self.face, &u).expect("dimension checked");
        let nu = norm(self.space, &u).expect("dimension checked");
        (
            RhoPair {
                minus: self.nx * r.lower,
                plus: self.nx * r.upper,
            },
            self.tol * self.nx * nu,
        )
    }

    fn member(&self, deg: f64) -> bool {
        let (pair, tol) = self.eval(deg);
        self.relation.holds_for(&pair, tol)
    }

    fn value(&self, kind: DerivativeKind, deg: f64) -> (f64, f64) {
        let (pair, tol) = self.eval(deg);
        (pair.get(kind), tol)
    }

    fn tracked(&self) -> &'static [DerivativeKind] {
        match self.relation {
            Relation::BirkhoffJames => &[DerivativeKind::Minus, DerivativeKind::Plus],
            Relation::RhoPlus => &[DerivativeKind::Plus],
            Relation::RhoMinus => &[DerivativeKind::Minus],
            Relation::Rho => &[DerivativeKind::Mean],
        }
    }

    /// Zeros of one derivative: near-zero grid samples plus bisected sign changes.
    fn zeros(&self, kind: DerivativeKind, n: usize) -> Vec<f64> {
        let step = 360.0 / n as f64;
        let samples: Vec<(f64, f64)> = (0..n).map(|k| self.value(kind, k as f64 * step)).collect();
        let is_zero = |s: (f64, f64)| s.0.abs() <= s.1;
        let mut out = Vec::new();
        for k in 0..n {
            let here = samples[k];
            let next = samples[(k + 1) % n];
            if is_zero(here) {
                out.push(k as f64 * step);
            } else if !is_zero(next) && here.0.signum() != next.0.signum() {
                out.push(self.bisect(kind, k as f64 * step, (k + 1) as f64 * step, here.0));
            }
        }
        out
    }

    fn bisect(&self, kind: DerivativeKind, mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
        while hi - lo > BISECTION_WIDTH_DEG {
            let mid = 0.5 * (lo + hi);
            let f_mid = self.value(kind, mid).0;
            if f_mid == 0.0 {
                return mid;
            }
            if f_mid.signum() == f_lo.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn endpoint_residual(&self, deg: f64) -> f64 {
        let (pair, _) = self.eval(deg);
        match self.relation.derivative() {
            Some(kind) => pair.get(kind).abs(),
            None => pair.minus.abs().min(pair.plus.abs()),
        }
    }

    fn sectors(&self, step_deg: f64) -> Vec<RaySector> {
        let n = grid_size(step_deg);
        let mut zs: Vec<f64> = self
            .tracked()
            .iter()
            .flat_map(|&kind| self.zeros(kind, n))
            .map(normalize_deg)
            .collect();
        zs.sort_by(f64::total_cmp);
        zs.dedup_by(|b, a| (*b - *a).abs() <= 1e-9);
        if zs.len() > 1 && zs[0] + 360.0 - zs[zs.len() - 1] <= 1e-9 {
            zs.pop();
        }
        if zs.is_empty() {
            return if self.member(0.0) {
                alloc::vec![RaySector {
                    start_deg: 0.0,
                    end_deg: 360.0,
                    residual: 0.0
                }]
            } else {
                Vec::new()
            };
        }

        // alternate zero, arc, zero, arc, ... around the circle; membership
        // is constant on each open arc since it only changes at zeros
        let k = zs.len();
        let mut elements = Vec::with_capacity(2 * k);
        for i in 0..k {
            let a = zs[i];
            let b = if i + 1 < k { zs[i + 1] } else { zs[0] + 360.0 };
            elements.push((a, a, self.member(a)));
            elements.push((a, b, self.member(normalize_deg(0.5 * (a + b)))));
        }
        let Some(first_out) = elements.iter().position(|e| !e.2) else {
            return alloc::vec![RaySector {
                start_deg: 0.0,
                end_deg: 360.0,
                residual: 0.0
            }];
        };

        let mut sectors = Vec::new();
        let mut run: Option<(f64, f64)> = None;
        for step in 1..=elements.len() {
            let (a, b, inside) = elements[(first_out + step) % elements.len()];
            match (inside, run.as_mut()) {
                (true, Some(r)) => r.1 = b,
                (true, None) => run = Some((a, b)),
                (false, Some(_)) => {
                    let (s, e) = run.take().expect("checked");
                    sectors.push(self.sector(s, e));
                }
                (false, None) => {}
            }
        }
        if let Some((s, e)) = run {
            sectors.push(self.sector(s, e));
        }
        sectors.sort_by(|a, b| a.start_deg.total_cmp(&b.start_deg));
        sectors
    }

    fn sector(&self, start: f64, end: f64) -> RaySector {
        let (s, e) = (normalize_deg(start), normalize_deg(end));
        RaySector {
            start_deg: s,
            end_deg: e,
            residual: self.endpoint_residual(s).max(self.endpoint_residual(e)),
        }
    }
}

fn normalize_deg(d: f64) -> f64 {
    let r = rem_euclid(d, 360.0);
    if 360.0 - r <= 1e-9 {
        0.0
    } else {
        r
    }
}

fn angular_gap(a: f64, b: f64) -> f64 {
    let d = rem_euclid(a - b, 360.0);
    d.min(360.0 - d)
}

fn same_sectors(a: &[RaySector], b: &[RaySector]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(s, t)| {
            s.is_ray() == t.is_ray()
                && angular_gap(s.start_deg, t.start_deg) <= ANGLE_MATCH_DEG
                && angular_gap(s.end_deg, t.end_deg) <= ANGLE_MATCH_DEG
        })
}

fn classify_sectors(sectors: &[RaySector]) -> RayStructure {
    match sectors {
        [] => RayStructure::Empty,
        [a, b] if a.is_ray() && b.is_ray() => {
            if (angular_gap(a.start_deg, b.start_deg) - 180.0).abs() <= ANGLE_MATCH_DEG {
                RayStructure::Hyperplane
            } else {
                RayStructure::RayUnion
            }
        }
        _ => RayStructure::RayUnion,
    }
}
