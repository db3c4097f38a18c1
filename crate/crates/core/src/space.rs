//! Concrete finite-dimensional normed spaces, vectors and dual functionals.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{check_dim, Error, Result};
use crate::float::{powf, sqrt};

/// Identifies a normed space. Vector spaces carry their dimension; operator
/// spaces carry a domain and a codomain, neither of which may itself be an
/// operator space.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(try_from = "wire::SpaceRepr", into = "wire::SpaceRepr")
)]
pub enum SpaceDescriptor {
    L1(usize),
    LInf(usize),
    /// `l_p` with `1 < p < inf`.
    Lp {
        dim: usize,
        p: f64,
    },
    Euclidean(usize),
    OperatorSpace {
        domain: Box<SpaceDescriptor>,
        codomain: Box<SpaceDescriptor>,
    },
}

/// The norm family of a vector space, with Euclidean kept apart from `Lp(2)`
/// so the Hilbert-space paths stay exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum NormKind {
    One,
    Inf,
    P(f64),
    Two,
}

impl SpaceDescriptor {
    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        let space = SpaceDescriptor::Lp { dim, p };
        space.validate()?;
        Ok(space)
    }

    pub fn operator(domain: SpaceDescriptor, codomain: SpaceDescriptor) -> Result<Self> {
        let space = SpaceDescriptor::OperatorSpace {
            domain: Box::new(domain),
            codomain: Box::new(codomain),
        };
        space.validate()?;
        Ok(space)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceDescriptor::L1(n) | SpaceDescriptor::LInf(n) | SpaceDescriptor::Euclidean(n) => {
                positive_dim(*n)
            }
            SpaceDescriptor::Lp { dim, p } => {
                positive_dim(*dim)?;
                if !(p.is_finite() && *p > 1.0) {
                    return Err(Error::input(format!(
                        "lp exponent must satisfy 1 < p < inf, got {p}"
                    )));
                }
                Ok(())
            }
            SpaceDescriptor::OperatorSpace { domain, codomain } => {
                for side in [domain, codomain] {
                    if side.is_operator_space() {
                        return Err(Error::input("operator spaces nest exactly one level"));
                    }
                    side.validate()?;
                }
                Ok(())
            }
        }
    }

    pub fn is_operator_space(&self) -> bool {
        matches!(self, SpaceDescriptor::OperatorSpace { .. })
    }

    /// Dimension of the underlying real vector space (`m * n` for operators).
    pub fn dim(&self) -> usize {
        match self {
            SpaceDescriptor::L1(n) | SpaceDescriptor::LInf(n) | SpaceDescriptor::Euclidean(n) => *n,
            SpaceDescriptor::Lp { dim, .. } => *dim,
            SpaceDescriptor::OperatorSpace { domain, codomain } => domain.dim() * codomain.dim(),
        }
    }

    /// The same norm family in another dimension.
    pub fn with_dim(&self, n: usize) -> Result<Self> {
        let space = match self {
            SpaceDescriptor::L1(_) => SpaceDescriptor::L1(n),
            SpaceDescriptor::LInf(_) => SpaceDescriptor::LInf(n),
            SpaceDescriptor::Euclidean(_) => SpaceDescriptor::Euclidean(n),
            SpaceDescriptor::Lp { p, .. } => SpaceDescriptor::Lp { dim: n, p: *p },
            SpaceDescriptor::OperatorSpace { .. } => {
                return Err(Error::input("with_dim is defined for vector spaces only"))
            }
        };
        space.validate()?;
        Ok(space)
    }

    pub(crate) fn norm_kind(&self) -> Result<NormKind> {
        self.validate()?;
        match self {
            SpaceDescriptor::L1(_) => Ok(NormKind::One),
            SpaceDescriptor::LInf(_) => Ok(NormKind::Inf),
            SpaceDescriptor::Lp { p, .. } => Ok(NormKind::P(*p)),
            SpaceDescriptor::Euclidean(_) => Ok(NormKind::Two),
            SpaceDescriptor::OperatorSpace { .. } => Err(Error::input(
                "operator spaces are handled by the operator module",
            )),
        }
    }
}

fn positive_dim(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::input("dimension must be positive"))
    } else {
        Ok(())
    }
}

impl NormKind {
    pub(crate) fn norm(self, xs: &[f64]) -> f64 {
        match self {
            NormKind::One => xs.iter().map(|v| v.abs()).sum(),
            NormKind::Inf => xs.iter().fold(0.0, |m, v| m.max(v.abs())),
            NormKind::Two => sqrt(xs.iter().map(|v| v * v).sum()),
            NormKind::P(p) => {
                let s: f64 = xs.iter().map(|v| powf(v.abs(), p)).sum();
                powf(s, 1.0 / p)
            }
        }
    }

    pub(crate) fn dual(self) -> NormKind {
        match self {
            NormKind::One => NormKind::Inf,
            NormKind::Inf => NormKind::One,
            NormKind::Two => NormKind::Two,
            NormKind::P(p) => NormKind::P(p / (p - 1.0)),
        }
    }
}

macro_rules! coordinate_newtype {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Default)]
        #[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
        #[cfg_attr(feature = "serde", serde(transparent))]
        pub struct $name(Vec<f64>);

        impl $name {
            pub fn new(coords: Vec<f64>) -> Self {
                $name(coords)
            }

            pub fn zeros(n: usize) -> Self {
                $name(alloc::vec![0.0; n])
            }

            /// The `i`-th standard basis element of `R^n`.
            pub fn basis(n: usize, i: usize) -> Self {
                let mut c = alloc::vec![0.0; n];
                c[i] = 1.0;
                $name(c)
            }

            pub fn coords(&self) -> &[f64] {
                &self.0
            }

            pub fn into_coords(self) -> Vec<f64> {
                self.0
            }

            pub fn dim(&self) -> usize {
                self.0.len()
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|v| *v == 0.0)
            }

            pub fn scaled(&self, a: f64) -> Self {
                $name(self.0.iter().map(|v| a * v).collect())
            }

            /// `a * self + b * other`.
            pub fn combine(&self, a: f64, other: &Self, b: f64) -> Self {
                assert_eq!(self.dim(), other.dim(), "dimension mismatch");
                $name(
                    self.0
                        .iter()
                        .zip(&other.0)
                        .map(|(u, v)| a * u + b * v)
                        .collect(),
                )
            }

            pub fn max_abs_diff(&self, other: &Self) -> f64 {
                self.0
                    .iter()
                    .zip(&other.0)
                    .fold(0.0, |m, (u, v)| m.max((u - v).abs()))
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                $name(v)
            }
        }

        impl<const N: usize> From<[f64; N]> for $name {
            fn from(v: [f64; N]) -> Self {
                $name(v.to_vec())
            }
        }

        impl Add for &$name {
            type Output = $name;
            fn add(self, rhs: &$name) -> $name {
                self.combine(1.0, rhs, 1.0)
            }
        }

        impl Sub for &$name {
            type Output = $name;
            fn sub(self, rhs: &$name) -> $name {
                self.combine(1.0, rhs, -1.0)
            }
        }

        impl Mul<&$name> for f64 {
            type Output = $name;
            fn mul(self, rhs: &$name) -> $name {
                rhs.scaled(self)
            }
        }

        impl Neg for &$name {
            type Output = $name;
            fn neg(self) -> $name {
                self.scaled(-1.0)
            }
        }
    };
}

coordinate_newtype!(
    /// A point of a finite-dimensional space, by coordinates.
    Vector
);
coordinate_newtype!(
    /// A linear functional acting by the coordinate pairing `sum f_i v_i`.
    DualFunctional
);

impl DualFunctional {
    /// Pairing without a dimension check; callers have already checked.
    pub(crate) fn apply(&self, v: &Vector) -> f64 {
        self.0.iter().zip(&v.0).map(|(f, x)| f * x).sum()
    }
}

pub fn norm(space: &SpaceDescriptor, v: &Vector) -> Result<f64> {
    let kind = space.norm_kind()?;
    check_dim(space.dim(), v.dim(), "norm")?;
    Ok(kind.norm(v.coords()))
}

pub fn dual_pairing(f: &DualFunctional, v: &Vector) -> Result<f64> {
    check_dim(f.dim(), v.dim(), "dual pairing")?;
    Ok(f.apply(v))
}

/// Norm of `f` in the dual space: `l_q` with `1/p + 1/q = 1`.
pub fn dual_norm(space: &SpaceDescriptor, f: &DualFunctional) -> Result<f64> {
    let kind = space.norm_kind()?;
    check_dim(space.dim(), f.dim(), "dual norm")?;
    Ok(kind.dual().norm(f.coords()))
}

#[cfg(feature = "serde")]
pub(crate) mod wire {
    use alloc::boxed::Box;
    use alloc::format;
    use alloc::string::{String, ToString};

    use super::SpaceDescriptor;
    use crate::error::Error;

    #[derive(serde::Serialize, serde::Deserialize)]
    pub(crate) struct SpaceRepr {
        kind: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain: Option<Box<SpaceRepr>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        codomain: Option<Box<SpaceRepr>>,
    }

    impl From<SpaceDescriptor> for SpaceRepr {
        fn from(s: SpaceDescriptor) -> Self {
            let plain = |kind: &str, dim: usize| SpaceRepr {
                kind: kind.to_string(),
                dim: Some(dim),
                p: None,
                domain: None,
                codomain: None,
            };
            match s {
                SpaceDescriptor::L1(n) => plain("l1", n),
                SpaceDescriptor::LInf(n) => plain("linf", n),
                SpaceDescriptor::Euclidean(n) => plain("euclidean", n),
                SpaceDescriptor::Lp { dim, p } => SpaceRepr {
                    p: Some(p),
                    ..plain("lp", dim)
                },
                SpaceDescriptor::OperatorSpace { domain, codomain } => SpaceRepr {
                    kind: "operator".to_string(),
                    dim: None,
                    p: None,
                    domain: Some(Box::new((*domain).into())),
                    codomain: Some(Box::new((*codomain).into())),
                },
            }
        }
    }

    impl TryFrom<SpaceRepr> for SpaceDescriptor {
        type Error = Error;

        fn try_from(r: SpaceRepr) -> Result<Self, Error> {
            let dim = || {
                r.dim
                    .ok_or_else(|| Error::input("space is missing \"dim\""))
            };
            let space = match r.kind.as_str() {
                "l1" => SpaceDescriptor::L1(dim()?),
                "linf" => SpaceDescriptor::LInf(dim()?),
                "euclidean" => SpaceDescriptor::Euclidean(dim()?),
                "lp" => SpaceDescriptor::Lp {
                    dim: dim()?,
                    p: r.p
                        .ok_or_else(|| Error::input("lp space is missing \"p\""))?,
                },
                "operator" => {
                    let (Some(d), Some(c)) = (r.domain, r.codomain) else {
                        return Err(Error::input(
                            "operator space needs \"domain\" and \"codomain\"",
                        ));
                    };
                    SpaceDescriptor::OperatorSpace {
                        domain: Box::new((*d).try_into()?),
                        codomain: Box::new((*c).try_into()?),
                    }
                }
                other => return Err(Error::input(format!("unknown space kind \"{other}\""))),
            };
            space.validate()?;
            Ok(space)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn norms_of_ones() {
        let v = Vector::from([1.0, 1.0]);
        assert_eq!(norm(&SpaceDescriptor::LInf(2), &v).unwrap(), 1.0);
        assert_eq!(norm(&SpaceDescriptor::L1(2), &v).unwrap(), 2.0);
        let l3 = SpaceDescriptor::lp(2, 3.0).unwrap();
        assert_relative_eq!(norm(&l3, &v).unwrap(), libm::cbrt(2.0), epsilon = 1e-15);
    }

    #[test]
    fn pairing_examples() {
        let v = Vector::from([-3.0, 5.0]);
        assert_eq!(
            dual_pairing(&DualFunctional::from([1.0, 0.0]), &v).unwrap(),
            -3.0
        );
        assert_eq!(dual_pairing(&DualFunctional::zeros(2), &v).unwrap(), 0.0);
        let w = Vector::from([1.0, -1.0]);
        assert_eq!(
            dual_pairing(&DualFunctional::from([1.0, 1.0]), &w).unwrap(),
            0.0
        );
    }

    #[test]
    fn dual_norm_examples() {
        let linf = SpaceDescriptor::LInf(2);
        assert_eq!(
            dual_norm(&linf, &DualFunctional::from([0.5, 0.5])).unwrap(),
            1.0
        );
        let l1 = SpaceDescriptor::L1(3);
        assert_eq!(
            dual_norm(&l1, &DualFunctional::from([1.0, -1.0, 0.2])).unwrap(),
            1.0
        );
        let e2 = SpaceDescriptor::Euclidean(2);
        assert_eq!(
            dual_norm(&e2, &DualFunctional::from([3.0, 4.0])).unwrap(),
            5.0
        );
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let err = norm(&SpaceDescriptor::L1(3), &Vector::from([1.0, 2.0])).unwrap_err();
        assert!(matches!(err, Error::InvalidInput(_)));
        let err = dual_pairing(&DualFunctional::from([1.0]), &Vector::from([1.0, 2.0]));
        assert!(err.is_err());
    }

    #[test]
    fn operator_space_vectors_are_rejected() {
        let op = SpaceDescriptor::operator(SpaceDescriptor::L1(2), SpaceDescriptor::Euclidean(2))
            .unwrap();
        assert_eq!(op.dim(), 4);
        assert!(norm(&op, &Vector::zeros(4)).is_err());
    }

    #[test]
    fn descriptor_validation() {
        assert!(SpaceDescriptor::lp(2, 1.0).is_err());
        assert!(SpaceDescriptor::lp(2, f64::INFINITY).is_err());
        assert!(SpaceDescriptor::L1(0).validate().is_err());
        let inner =
            SpaceDescriptor::operator(SpaceDescriptor::L1(2), SpaceDescriptor::L1(2)).unwrap();
        assert!(SpaceDescriptor::operator(inner, SpaceDescriptor::L1(2)).is_err());
    }
}
