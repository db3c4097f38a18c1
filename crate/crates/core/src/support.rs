//! The support-functional set `J(x) = { f in S_{X*} : f(x) = ||x|| }`.
//!
//! For the supported spaces `J(x)` is either a single functional (smooth
//! points) or a polytope, which we keep as its list of extreme functionals.
//! Every sup/inf of a linear expression over `J(x)` is then a max/min over
//! that list.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::float::powf;
use crate::space::{DualFunctional, NormKind, SpaceDescriptor, Vector};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(try_from = "wire::FaceRepr", into = "wire::FaceRepr")
)]
pub enum SupportFace {
    Singleton(DualFunctional),
    /// Extreme functionals of a polytope face; never empty, no duplicates.
    Polytope(Vec<DualFunctional>),
}

impl SupportFace {
    pub fn extremes(&self) -> &[DualFunctional] {
        match self {
            SupportFace::Singleton(f) => core::slice::from_ref(f),
            SupportFace::Polytope(fs) => fs,
        }
    }

    pub fn is_singleton(&self) -> bool {
        matches!(self, SupportFace::Singleton(_))
    }

    pub fn dim(&self) -> usize {
        self.extremes()[0].dim()
    }

    /// Convex combination `weight * extremes[i] + (1 - weight) * extremes[j]`.
    pub fn blend(&self, i: usize, j: usize, weight: f64) -> DualFunctional {
        let e = self.extremes();
        e[i].combine(weight, &e[j], 1.0 - weight)
    }
}

/// `[min, max]` of `f(y)` over a face, with the extreme functionals that attain them.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FaceRange {
    pub lower: f64,
    pub upper: f64,
    pub argmin: usize,
    pub argmax: usize,
}

impl FaceRange {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Exact support face of a nonzero vector.
pub fn support_set(space: &SpaceDescriptor, x: &Vector) -> Result<SupportFace> {
    let kind = space.norm_kind()?;
    check_dim(space.dim(), x.dim(), "support_set")?;
    if x.is_zero() {
        return Err(Error::degenerate(
            "J(0) is the whole dual sphere and is not represented",
        ));
    }
    let xs = x.coords();
    let sup = NormKind::Inf.norm(xs);
    let face = match kind {
        NormKind::One => l1_face(xs, sup)?,
        NormKind::Inf => linf_face(xs, sup),
        NormKind::Two => {
            let n = kind.norm(xs);
            SupportFace::Singleton(DualFunctional::new(xs.iter().map(|v| v / n).collect()))
        }
        NormKind::P(p) => {
            let n = kind.norm(xs);
            let f = xs
                .iter()
                .map(|v| v.signum() * powf(v.abs() / n, p - 1.0))
                .collect();
            SupportFace::Singleton(DualFunctional::new(f))
        }
    };
    Ok(face)
}

fn l1_face(xs: &[f64], sup: f64) -> Result<SupportFace> {
    let cutoff = tolerance::ZERO_CUTOFF * sup;
    let zeros: Vec<usize> = (0..xs.len()).filter(|&i| xs[i].abs() <= cutoff).collect();
    if zeros.len() > tolerance::MAX_L1_ZERO_COORDS {
        return Err(Error::Capacity(format!(
            "l1 face with {} zero coordinates has 2^{} extremes (limit {})",
            zeros.len(),
            zeros.len(),
            tolerance::MAX_L1_ZERO_COORDS
        )));
    }
    let base: Vec<f64> = xs
        .iter()
        .map(|v| if v.abs() <= cutoff { 0.0 } else { v.signum() })
        .collect();
    if zeros.is_empty() {
        return Ok(SupportFace::Singleton(DualFunctional::new(base)));
    }
    // bit k of the mask flips the k-th free coordinate from +1 to -1
    let extremes = (0u32..1 << zeros.len())
        .map(|mask| {
            let mut f = base.clone();
            for (k, &i) in zeros.iter().enumerate() {
                f[i] = if mask >> k & 1 == 0 { 1.0 } else { -1.0 };
            }
            DualFunctional::new(f)
        })
        .collect();
    Ok(SupportFace::Polytope(extremes))
}

fn linf_face(xs: &[f64], sup: f64) -> SupportFace {
    let floor = sup * (1.0 - tolerance::ZERO_CUTOFF);
    let n = xs.len();
    let mut extremes: Vec<DualFunctional> = (0..n)
        .filter(|&i| xs[i].abs() >= floor)
        .map(|i| DualFunctional::basis(n, i).scaled(xs[i].signum()))
        .collect();
    if extremes.len() == 1 {
        SupportFace::Singleton(extremes.remove(0))
    } else {
        SupportFace::Polytope(extremes)
    }
}

/// Range of `f(y)` as `f` runs over the face. A linear functional on a
/// polytope attains its extrema at vertices, so scanning the extremes is exact.
pub fn range_over_face(face: &SupportFace, y: &Vector) -> Result<FaceRange> {
    check_dim(face.dim(), y.dim(), "range_over_face")?;
    let mut range = FaceRange {
        lower: f64::INFINITY,
        upper: f64::NEG_INFINITY,
        argmin: 0,
        argmax: 0,
    };
    for (i, f) in face.extremes().iter().enumerate() {
        let v = f.apply(y);
        if v < range.lower {
            range.lower = v;
            range.argmin = i;
        }
        if v > range.upper {
            range.upper = v;
            range.argmax = i;
        }
    }
    Ok(range)
}

#[cfg(feature = "serde")]
mod wire {
    use alloc::string::{String, ToString};
    use alloc::vec::Vec;

    use super::SupportFace;
    use crate::error::Error;
    use crate::space::DualFunctional;

    #[derive(serde::Serialize, serde::Deserialize)]
    pub(super) struct FaceRepr {
        variant: String,
        functionals: Vec<DualFunctional>,
    }

    impl From<SupportFace> for FaceRepr {
        fn from(face: SupportFace) -> Self {
            match face {
                SupportFace::Singleton(f) => FaceRepr {
                    variant: "singleton".to_string(),
                    functionals: alloc::vec![f],
                },
                SupportFace::Polytope(fs) => FaceRepr {
                    variant: "polytope".to_string(),
                    functionals: fs,
                },
            }
        }
    }

    impl TryFrom<FaceRepr> for SupportFace {
        type Error = Error;

        fn try_from(mut r: FaceRepr) -> Result<Self, Error> {
            match (r.variant.as_str(), r.functionals.len()) {
                ("singleton", 1) => Ok(SupportFace::Singleton(r.functionals.remove(0))),
                ("polytope", n) if n > 0 => Ok(SupportFace::Polytope(r.functionals)),
                _ => Err(Error::input(
                    "face must be a singleton with one functional or a nonempty polytope",
                )),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{dual_norm, norm};
    use alloc::vec;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec())
    }

    #[test]
    fn linf_corner_face() {
        let face = support_set(&SpaceDescriptor::LInf(2), &v(&[1.0, 1.0])).unwrap();
        assert_eq!(
            face,
            SupportFace::Polytope(vec![
                DualFunctional::from([1.0, 0.0]),
                DualFunctional::from([0.0, 1.0])
            ])
        );
    }

    #[test]
    fn euclidean_face_is_normalized_point() {
        let face = support_set(&SpaceDescriptor::Euclidean(2), &v(&[3.0, 4.0])).unwrap();
        match face {
            SupportFace::Singleton(f) => {
                assert!(f.max_abs_diff(&DualFunctional::from([0.6, 0.8])) < 1e-15)
            }
            _ => panic!("expected singleton"),
        }
    }

    #[test]
    fn l1_face_with_one_zero() {
        let face = support_set(&SpaceDescriptor::L1(2), &v(&[1.0, 0.0])).unwrap();
        assert_eq!(
            face,
            SupportFace::Polytope(vec![
                DualFunctional::from([1.0, 1.0]),
                DualFunctional::from([1.0, -1.0])
            ])
        );
    }

    #[test]
    fn l1_face_counts() {
        let face = support_set(&SpaceDescriptor::L1(5), &v(&[0.0, -2.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(face.extremes().len(), 8);
        let smooth = support_set(&SpaceDescriptor::L1(3), &v(&[1.0, -1.0, 2.0])).unwrap();
        assert!(smooth.is_singleton());
    }

    #[test]
    fn l1_capacity_limit() {
        let mut c = vec![0.0; 22];
        c[0] = 1.0;
        let err = support_set(&SpaceDescriptor::L1(22), &Vector::new(c)).unwrap_err();
        assert!(matches!(err, Error::Capacity(_)));
    }

    #[test]
    fn zero_vector_is_degenerate() {
        let err = support_set(&SpaceDescriptor::L1(2), &Vector::zeros(2)).unwrap_err();
        assert!(matches!(err, Error::DegenerateInput(_)));
    }

    #[test]
    fn range_examples() {
        let face = SupportFace::Polytope(vec![
            DualFunctional::from([1.0, 0.0]),
            DualFunctional::from([0.0, 1.0]),
        ]);
        let r = range_over_face(&face, &v(&[3.0, 1.0])).unwrap();
        assert_eq!((r.lower, r.upper), (1.0, 3.0));

        let single = SupportFace::Singleton(DualFunctional::from([0.6, 0.8]));
        let r = range_over_face(&single, &v(&[1.0, 0.0])).unwrap();
        assert_eq!((r.lower, r.upper), (0.6, 0.6));

        let l1 = SupportFace::Polytope(vec![
            DualFunctional::from([1.0, 1.0]),
            DualFunctional::from([1.0, -1.0]),
        ]);
        let r = range_over_face(&l1, &v(&[0.0, 1.0])).unwrap();
        assert_eq!((r.lower, r.upper), (-1.0, 1.0));
    }

    #[test]
    fn extremes_are_certified_support_functionals() {
        let cases = [
            (SpaceDescriptor::L1(4), v(&[0.5, 0.0, -1.5, 0.0])),
            (SpaceDescriptor::LInf(4), v(&[2.0, -2.0, 1.0, 2.0])),
            (SpaceDescriptor::lp(3, 1.5).unwrap(), v(&[1.0, -0.25, 0.0])),
            (SpaceDescriptor::lp(3, 3.0).unwrap(), v(&[0.3, 2.0, -1.0])),
            (SpaceDescriptor::Euclidean(3), v(&[1.0, 2.0, 2.0])),
        ];
        for (space, x) in cases {
            let nx = norm(&space, &x).unwrap();
            for f in support_set(&space, &x).unwrap().extremes() {
                assert!((dual_norm(&space, f).unwrap() - 1.0).abs() < 1e-9);
                assert!((f.apply(&x) - nx).abs() < 1e-9 * nx.max(1.0));
            }
        }
    }
}
