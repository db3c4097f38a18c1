//! Random inputs for the suites.

use normderiv_core::sampling::{gaussian, gaussian_vector, unit_sphere};
use normderiv_core::{SpaceDescriptor, Vector};
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    L1,
    LInf,
    Lp15,
    Lp3,
    Euclidean,
}

pub const FAMILIES: [Family; 5] = [
    Family::L1,
    Family::LInf,
    Family::Lp15,
    Family::Lp3,
    Family::Euclidean,
];

pub const DIMS: [usize; 4] = [2, 3, 4, 6];

impl Family {
    pub fn space(self, n: usize) -> SpaceDescriptor {
        match self {
            Family::L1 => SpaceDescriptor::L1(n),
            Family::LInf => SpaceDescriptor::LInf(n),
            Family::Lp15 => SpaceDescriptor::Lp { dim: n, p: 1.5 },
            Family::Lp3 => SpaceDescriptor::Lp { dim: n, p: 3.0 },
            Family::Euclidean => SpaceDescriptor::Euclidean(n),
        }
    }

    /// Strictly convex and smooth everywhere.
    pub fn is_smooth(self) -> bool {
        matches!(self, Family::Lp15 | Family::Lp3 | Family::Euclidean)
    }
}

pub fn dim_for(trial: usize) -> usize {
    DIMS[trial % DIMS.len()]
}

/// A nonzero vector. Half the draws are scaled points of the unit sphere;
/// the rest sit on the kinks of the polyhedral norms (zero coordinates and
/// ties in absolute value).
pub fn point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    let v = match rng.random_range(0..4u8) {
        0 | 1 => unit_sphere(rng, n).scaled(0.5 + 1.5 * rng.random::<f64>()),
        2 => Vector::new(
            (0..n)
                .map(|_| f64::from(rng.random_range(-2i8..=2)))
                .collect(),
        ),
        _ => {
            let mut c = unit_sphere(rng, n).into_coords();
            let i = rng.random_range(0..n);
            let j = (i + 1 + rng.random_range(0..n - 1)) % n;
            let k = rng.random_range(0..n);
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            c[j] = s * c[i].abs();
            if k != i && k != j {
                c[k] = 0.0;
            }
            Vector::new(c)
        }
    };
    if v.is_zero() {
        Vector::basis(n, 0)
    } else {
        v
    }
}

/// Any direction, zero excluded.
pub fn direction<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    match rng.random_range(0..4u8) {
        0 => {
            let i = rng.random_range(0..n);
            Vector::basis(n, i).scaled(gaussian(rng))
        }
        1 => point(rng, n),
        _ => gaussian_vector(rng, n),
    }
}

/// Random scalar of either sign, occasionally zero.
pub fn scalar<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random_range(0..10u8) == 0 {
        0.0
    } else {
        3.0 * gaussian(rng)
    }
}
