//! The norm derivatives `rho'_+`, `rho'_-` and `rho'`.
//!
//! [`rho_plus`] and friends read the value off the support face:
//! `rho'_+(x, y) = ||x|| max { f(y) : f in J(x) }` and the same with `min`
//! for `rho'_-`. [`rho_limit_oracle`] computes the defining one-sided limit
//! directly from norm evaluations, and is kept independent of the face code
//! so the two can check each other.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::space::{norm, SpaceDescriptor, Vector};
use crate::support::{range_over_face, support_set};
use crate::tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

/// Which of the three derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum DerivativeKind {
    Plus,
    Minus,
    Mean,
}

impl From<Side> for DerivativeKind {
    fn from(side: Side) -> Self {
        match side {
            Side::Plus => DerivativeKind::Plus,
            Side::Minus => DerivativeKind::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    /// Closed form: support face extremes, or the eigenvalue formula for operators.
    ExactFace,
    /// Extrapolated one-sided difference quotients.
    LimitOracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DerivativeValue {
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
}

impl DerivativeValue {
    pub fn exact(value: f64) -> Self {
        DerivativeValue {
            value,
            method: Method::ExactFace,
            error_estimate: 0.0,
        }
    }

    /// Whether two values of the same derivative agree within
    /// `max(floor, error estimates)`.
    pub fn agrees_with(&self, other: &DerivativeValue, floor: f64) -> bool {
        let allowed = floor.max(self.error_estimate).max(other.error_estimate);
        (self.value - other.value).abs() <= allowed
    }
}

/// Both one-sided derivatives at once, from a single face evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RhoPair {
    pub minus: f64,
    pub plus: f64,
}

impl RhoPair {
    pub const ZERO: RhoPair = RhoPair {
        minus: 0.0,
        plus: 0.0,
    };

    pub fn mean(&self) -> f64 {
        0.5 * self.plus + 0.5 * self.minus
    }

    pub fn get(&self, kind: DerivativeKind) -> f64 {
        match kind {
            DerivativeKind::Plus => self.plus,
            DerivativeKind::Minus => self.minus,
            DerivativeKind::Mean => self.mean(),
        }
    }
}

/// `(rho'_-(x, y), rho'_+(x, y))` via the support face. Zero when `x = 0`.
pub fn rho_pair(space: &SpaceDescriptor, x: &Vector, y: &Vector) -> Result<RhoPair> {
    let nx = norm(space, x)?;
    check_dim(space.dim(), y.dim(), "direction")?;
    if nx == 0.0 {
        return Ok(RhoPair::ZERO);
    }
    let range = range_over_face(&support_set(space, x)?, y)?;
    Ok(RhoPair {
        minus: nx * range.lower,
        plus: nx * range.upper,
    })
}

pub fn rho_of(
    space: &SpaceDescriptor,
    x: &Vector,
    y: &Vector,
    kind: DerivativeKind,
) -> Result<DerivativeValue> {
    rho_pair(space, x, y).map(|p| DerivativeValue::exact(p.get(kind)))
}

pub fn rho_plus(space: &SpaceDescriptor, x: &Vector, y: &Vector) -> Result<DerivativeValue> {
    rho_of(space, x, y, DerivativeKind::Plus)
}

pub fn rho_minus(space: &SpaceDescriptor, x: &Vector, y: &Vector) -> Result<DerivativeValue> {
    rho_of(space, x, y, DerivativeKind::Minus)
}

pub fn rho(space: &SpaceDescriptor, x: &Vector, y: &Vector) -> Result<DerivativeValue> {
    rho_of(space, x, y, DerivativeKind::Mean)
}

/// Strictly decreasing positive step sizes for the limit oracle.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "Vec<f64>", into = "Vec<f64>"))]
pub struct Schedule(Vec<f64>);

impl Schedule {
    pub const MIN_STEPS: usize = 4;

    pub fn new(steps: Vec<f64>) -> Result<Self> {
        if steps.len() < Self::MIN_STEPS {
            return Err(Error::input(format!(
                "schedule needs at least {} steps, got {}",
                Self::MIN_STEPS,
                steps.len()
            )));
        }
        if steps.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::input("schedule steps must be positive and finite"));
        }
        if steps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::input("schedule must be strictly decreasing"));
        }
        Ok(Schedule(steps))
    }

    pub fn steps(&self) -> &[f64] {
        &self.0
    }
}

impl Default for Schedule {
    /// `10^-1, 10^-2, ..., 10^-8`.
    fn default() -> Self {
        let mut t = 1.0;
        Schedule(
            (0..8)
                .map(|_| {
                    t /= 10.0;
                    t
                })
                .collect(),
        )
    }
}

impl TryFrom<Vec<f64>> for Schedule {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Schedule::new(v)
    }
}

impl From<Schedule> for Vec<f64> {
    fn from(s: Schedule) -> Self {
        s.0
    }
}

/// One-sided limit of `||x|| (||x + t y|| - ||x||) / t` along the schedule,
/// extrapolated from the last two steps. The error estimate is the gap
/// between those two quotients plus the rounding they carry.
pub fn rho_limit_oracle(
    space: &SpaceDescriptor,
    x: &Vector,
    y: &Vector,
    side: Side,
    schedule: &Schedule,
) -> Result<DerivativeValue> {
    let nx = norm(space, x)?;
    let ny = norm(space, y)?;
    if nx == 0.0 {
        return Ok(DerivativeValue {
            value: 0.0,
            method: Method::LimitOracle,
            error_estimate: 0.0,
        });
    }
    let kind = space.norm_kind()?;
    let mut shifted = Vec::with_capacity(x.dim());
    one_sided_limit(nx, ny, side, schedule, NOISE_ULPS_VECTOR, |t| {
        shifted.clear();
        shifted.extend(x.coords().iter().zip(y.coords()).map(|(a, b)| a + t * b));
        Ok(kind.norm(&shifted))
    })
}

/// Rounding slack, in ulps of `||x|| (||x|| + t ||y||)`, allowed per raw quotient
/// when checking monotonicity. Norm evaluations are accurate to a few ulps.
pub(crate) const NOISE_ULPS_VECTOR: f64 = 16.0;

/// Shared engine for vector and operator oracles. `eval(t)` returns the norm
/// of `x + t y`; `base` and `dir` are `||x||` and `||y||`.
pub(crate) fn one_sided_limit(
    base: f64,
    dir: f64,
    side: Side,
    schedule: &Schedule,
    noise_ulps: f64,
    mut eval: impl FnMut(f64) -> Result<f64>,
) -> Result<DerivativeValue> {
    let steps = schedule.steps();
    let s = side.sign();
    let mut quotients = Vec::with_capacity(steps.len());
    for &t in steps {
        let q = base * (eval(s * t)? - base) / (s * t);
        quotients.push(q);
    }

    let noise = |t: f64| noise_ulps * f64::EPSILON * base * (base + t * dir) / t;
    for k in 1..quotients.len() {
        let (prev, cur) = (quotients[k - 1], quotients[k]);
        let slack = tolerance::MONOTONE * prev.abs().max(cur.abs()).max(1.0)
            + noise(steps[k])
            + noise(steps[k - 1]);
        // secant slopes of a convex function shrink toward the right
        // derivative and grow toward the left derivative
        let violated = match side {
            Side::Plus => cur > prev + slack,
            Side::Minus => cur < prev - slack,
        };
        if violated {
            return Err(Error::OracleInconsistency(format!(
                "{side:?} quotients not monotone at step {}: {prev} then {cur}",
                steps[k]
            )));
        }
    }

    let n = steps.len();
    let (prev, last) = (quotients[n - 2], quotients[n - 1]);
    let r = steps[n - 2] / steps[n - 1];
    // Cancellation in the last quotients grows like 1/t and the
    // extrapolation amplifies it; a quarter of the monotonicity allowance is
    // the typical rounding, the allowance itself a worst case.
    let rounding = 0.25 * (r * noise(steps[n - 1]) + noise(steps[n - 2])) / (r - 1.0);
    Ok(DerivativeValue {
        value: (r * last - prev) / (r - 1.0),
        method: Method::LimitOracle,
        error_estimate: (last - prev).abs() + rounding,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec())
    }

    const LINF2: SpaceDescriptor = SpaceDescriptor::LInf(2);
    const L12: SpaceDescriptor = SpaceDescriptor::L1(2);
    const E2: SpaceDescriptor = SpaceDescriptor::Euclidean(2);

    #[test]
    fn rho_plus_examples() {
        assert_eq!(
            rho_plus(&LINF2, &v(&[1.0, 1.0]), &v(&[-1.0, 0.0]))
                .unwrap()
                .value,
            0.0
        );
        assert_eq!(
            rho_plus(&L12, &v(&[1.0, 0.0]), &v(&[0.0, 1.0]))
                .unwrap()
                .value,
            1.0
        );
        let x = v(&[0.3, -2.0]);
        for space in [LINF2, L12, E2, SpaceDescriptor::lp(2, 1.5).unwrap()] {
            let nx = norm(&space, &x).unwrap();
            assert_abs_diff_eq!(
                rho_plus(&space, &x, &x).unwrap().value,
                nx * nx,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn rho_minus_examples() {
        assert_eq!(
            rho_minus(&LINF2, &v(&[1.0, 1.0]), &v(&[1.0, 0.0]))
                .unwrap()
                .value,
            0.0
        );
        assert_eq!(
            rho_minus(&L12, &v(&[1.0, 0.0]), &v(&[0.0, 1.0]))
                .unwrap()
                .value,
            -1.0
        );
        let e3 = SpaceDescriptor::Euclidean(3);
        let (x, y) = (v(&[1.0, -2.0, 0.5]), v(&[0.25, 4.0, -3.0]));
        let inner: f64 = x.coords().iter().zip(y.coords()).map(|(a, b)| a * b).sum();
        assert_abs_diff_eq!(
            rho_minus(&e3, &x, &y).unwrap().value,
            inner,
            epsilon = 1e-12
        );
    }

    #[test]
    fn rho_examples() {
        assert_eq!(
            rho(&LINF2, &v(&[1.0, 1.0]), &v(&[3.0, 1.0])).unwrap().value,
            2.0
        );
        assert_eq!(
            rho(&L12, &v(&[1.0, 0.0]), &v(&[0.0, 5.0])).unwrap().value,
            0.0
        );
        assert_eq!(
            rho(&E2, &v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap().value,
            0.0
        );
    }

    #[test]
    fn zero_base_point_gives_zero() {
        let y = v(&[2.0, -7.0]);
        for kind in [
            DerivativeKind::Plus,
            DerivativeKind::Minus,
            DerivativeKind::Mean,
        ] {
            assert_eq!(
                rho_of(&L12, &Vector::zeros(2), &y, kind).unwrap().value,
                0.0
            );
        }
    }

    #[test]
    fn oracle_examples() {
        let s = Schedule::default();
        let d =
            rho_limit_oracle(&LINF2, &v(&[1.0, 1.0]), &v(&[-1.0, 0.0]), Side::Plus, &s).unwrap();
        assert_eq!(d.method, Method::LimitOracle);
        assert_abs_diff_eq!(d.value, 0.0, epsilon = 1e-8);

        let d = rho_limit_oracle(&E2, &v(&[3.0, 4.0]), &v(&[1.0, 0.0]), Side::Plus, &s).unwrap();
        assert_abs_diff_eq!(d.value, 3.0, epsilon = 1e-6);

        let l13 = SpaceDescriptor::L1(3);
        let d = rho_limit_oracle(
            &l13,
            &v(&[1.0, 1.0, 1.0]),
            &v(&[1.0, -1.0, 0.0]),
            Side::Minus,
            &s,
        )
        .unwrap();
        assert_abs_diff_eq!(d.value, 0.0, epsilon = 1e-8);
    }

    #[test]
    fn schedule_validation() {
        assert!(Schedule::new(alloc::vec![0.1, 0.01, 0.001]).is_err());
        assert!(Schedule::new(alloc::vec![0.1, 0.01, 0.01, 0.001]).is_err());
        assert!(Schedule::new(alloc::vec![0.1, 0.01, -0.001, -0.01]).is_err());
        assert_eq!(Schedule::default().steps().len(), 8);
        assert_eq!(Schedule::default().steps()[0], 0.1);
    }

    #[test]
    fn non_monotone_quotients_are_reported() {
        // a "norm" that is concave in t breaks the secant ordering
        let s = Schedule::default();
        let err = one_sided_limit(1.0, 1.0, Side::Plus, &s, NOISE_ULPS_VECTOR, |t| {
            Ok(1.0 + libm::sqrt(t.abs()))
        })
        .unwrap_err();
        assert!(matches!(err, Error::OracleInconsistency(_)));
    }
}
