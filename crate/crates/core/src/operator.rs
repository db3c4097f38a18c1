//! Matrices as operators from `l1^n` or Euclidean `R^n` into a supported
//! codomain, with the operator norm `||T|| = max_{||u|| = 1} ||T u||`.
//!
//! Derivatives of the operator norm are computed from the norm-attainment set
//! `M_T = { u : ||u|| = 1, ||T u|| = ||T|| }`:
//!
//! * Euclidean to Euclidean: `M_T` is the unit sphere of the top eigenspace
//!   `H0` of `T^T T`, and `rho'_±(T, A)` is the largest/smallest eigenvalue of
//!   the compression of `sym(T^T A)` to `H0`.
//! * `l1^n` domain: `||T|| = max_i ||T e_i||`, a maximum of finitely many
//!   convex functions, so `rho'_±(T, A)` is the max/min of
//!   `rho'_±(T e_i, A e_i)` over the maximizing columns.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::derivative::{one_sided_limit, rho_of, DerivativeKind, DerivativeValue, Schedule, Side};
use crate::error::{Error, Result};
use crate::float::sqrt;
use crate::linalg::{symmetric_eigen, Matrix};
use crate::sampling::{gaussian_matrix, trial_rng};
use crate::smoothness::{is_rho_pm_smooth, AdditivityConfig, AdditivityWitness};
use crate::space::{norm, SpaceDescriptor, Vector};
use crate::tolerance;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(try_from = "wire::OperatorRepr", into = "wire::OperatorRepr")
)]
pub struct OperatorMatrix {
    entries: Matrix,
    domain: SpaceDescriptor,
    codomain: SpaceDescriptor,
}

impl OperatorMatrix {
    /// `entries` is `codomain.dim() x domain.dim()`. Domains must be `L1` or
    /// `Euclidean`; codomains any vector space.
    pub fn new(
        entries: Matrix,
        domain: SpaceDescriptor,
        codomain: SpaceDescriptor,
    ) -> Result<Self> {
        SpaceDescriptor::operator(domain.clone(), codomain.clone())?;
        if !matches!(
            domain,
            SpaceDescriptor::L1(_) | SpaceDescriptor::Euclidean(_)
        ) {
            return Err(Error::input(format!(
                "operator domains must be l1 or euclidean, got {domain:?}"
            )));
        }
        if entries.rows() != codomain.dim() || entries.cols() != domain.dim() {
            return Err(Error::input(format!(
                "a {}x{} matrix does not map dimension {} into dimension {}",
                entries.rows(),
                entries.cols(),
                domain.dim(),
                codomain.dim()
            )));
        }
        Ok(OperatorMatrix {
            entries,
            domain,
            codomain,
        })
    }

    pub fn from_rows(
        rows: &[Vec<f64>],
        domain: SpaceDescriptor,
        codomain: SpaceDescriptor,
    ) -> Result<Self> {
        OperatorMatrix::new(Matrix::from_rows(rows)?, domain, codomain)
    }

    /// Euclidean to Euclidean.
    pub fn hilbert(entries: Matrix) -> Self {
        let (m, n) = (entries.rows(), entries.cols());
        OperatorMatrix::new(
            entries,
            SpaceDescriptor::Euclidean(n),
            SpaceDescriptor::Euclidean(m),
        )
        .expect("shape matches by construction")
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn domain(&self) -> &SpaceDescriptor {
        &self.domain
    }

    pub fn codomain(&self) -> &SpaceDescriptor {
        &self.codomain
    }

    pub fn space(&self) -> SpaceDescriptor {
        SpaceDescriptor::OperatorSpace {
            domain: Box::new(self.domain.clone()),
            codomain: Box::new(self.codomain.clone()),
        }
    }

    pub fn apply(&self, u: &Vector) -> Result<Vector> {
        crate::error::check_dim(self.domain.dim(), u.dim(), "operator argument")?;
        Ok(Vector::new(self.entries.apply(u.coords())))
    }

    pub fn column(&self, j: usize) -> Vector {
        self.entries.column(j)
    }

    /// An operator between the same spaces with different entries.
    pub fn with_entries(&self, entries: Matrix) -> Result<Self> {
        OperatorMatrix::new(entries, self.domain.clone(), self.codomain.clone())
    }

    pub fn combine(&self, a: f64, other: &OperatorMatrix, b: f64) -> Result<Self> {
        self.check_same_space(other)?;
        self.with_entries(self.entries.combine(a, &other.entries, b))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_zero()
    }

    fn check_same_space(&self, other: &OperatorMatrix) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::input("operators act between different spaces"));
        }
        Ok(())
    }

    fn is_hilbert(&self) -> bool {
        matches!(
            (&self.domain, &self.codomain),
            (SpaceDescriptor::Euclidean(_), SpaceDescriptor::Euclidean(_))
        )
    }

    fn is_l1_domain(&self) -> bool {
        matches!(self.domain, SpaceDescriptor::L1(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "variant", content = "vectors"))]
pub enum AttainmentVariant {
    /// Unit vectors `u`, each standing for the pair `±u`.
    FinitePairs(Vec<Vector>),
    /// Orthonormal basis of a subspace whose whole unit sphere attains the norm.
    SubsphereOfSubspace(Vec<Vector>),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NormAttainmentSet {
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub variant: AttainmentVariant,
    pub dimension_of_span: usize,
    /// `l1` domains only: two maximizing columns have a midpoint image (for
    /// some choice of signs) that still attains the norm, so `M_T` also
    /// contains non-extreme points.
    pub non_extreme_maximizers_possible: bool,
}

impl NormAttainmentSet {
    pub fn vectors(&self) -> &[Vector] {
        match &self.variant {
            AttainmentVariant::FinitePairs(v) | AttainmentVariant::SubsphereOfSubspace(v) => v,
        }
    }

    /// `Some(x0)` when `M_T = {±x0}`.
    pub fn single_pair(&self) -> Option<&Vector> {
        match &self.variant {
            AttainmentVariant::FinitePairs(v)
                if v.len() == 1 && !self.non_extreme_maximizers_possible =>
            {
                Some(&v[0])
            }
            _ => None,
        }
    }
}

/// Top eigenspace of `T^T T`.
struct Spectrum {
    norm: f64,
    /// Eigenvectors of `T^T T` as columns, by descending eigenvalue.
    basis: Matrix,
    /// Multiplicity of the top eigenvalue.
    top: usize,
}

fn spectrum(t: &OperatorMatrix) -> Result<Spectrum> {
    let eig = symmetric_eigen(&t.entries.tr_matmul(&t.entries))?;
    let lmax = eig.values[0].max(0.0);
    let top = eig
        .values
        .iter()
        .take_while(|&&v| v >= lmax * (1.0 - tolerance::ATTAINMENT))
        .count();
    Ok(Spectrum {
        norm: sqrt(lmax),
        basis: eig.vectors,
        top,
    })
}

fn column_norms(t: &OperatorMatrix) -> Vec<f64> {
    (0..t.entries.cols())
        .map(|j| norm(&t.codomain, &t.column(j)).expect("codomain checked at construction"))
        .collect()
}

fn maximizing_columns(norms: &[f64]) -> Vec<usize> {
    let max = norms.iter().copied().fold(0.0, f64::max);
    (0..norms.len())
        .filter(|&j| norms[j] >= max * (1.0 - tolerance::ATTAINMENT))
        .collect()
}

pub fn op_norm(t: &OperatorMatrix) -> Result<f64> {
    if t.is_l1_domain() {
        Ok(column_norms(t).into_iter().fold(0.0, f64::max))
    } else if t.is_hilbert() {
        Ok(spectrum(t)?.norm)
    } else {
        Err(Error::input(
            "euclidean-domain operator norms need a euclidean codomain",
        ))
    }
}

pub fn norm_attainment_set(t: &OperatorMatrix) -> Result<NormAttainmentSet> {
    if t.is_zero() {
        return Err(Error::degenerate(
            "the zero operator attains its norm everywhere",
        ));
    }
    if t.is_l1_domain() {
        let norms = column_norms(t);
        let cols = maximizing_columns(&norms);
        let tn = norms[cols[0]].max(norms.iter().copied().fold(0.0, f64::max));
        let mut aligned = false;
        for (a, &i) in cols.iter().enumerate() {
            for &j in &cols[a + 1..] {
                for s in [1.0, -1.0] {
                    let mid = t.column(i).combine(0.5, &t.column(j), 0.5 * s);
                    if norm(&t.codomain, &mid)? >= tn * (1.0 - tolerance::ATTAINMENT) {
                        aligned = true;
                    }
                }
            }
        }
        let n = t.domain.dim();
        let dim = cols.len();
        return Ok(NormAttainmentSet {
            variant: AttainmentVariant::FinitePairs(
                cols.into_iter().map(|i| Vector::basis(n, i)).collect(),
            ),
            dimension_of_span: dim,
            non_extreme_maximizers_possible: aligned,
        });
    }
    if !t.is_hilbert() {
        return Err(Error::input(
            "attainment sets need an l1 domain or a euclidean operator",
        ));
    }
    let s = spectrum(t)?;
    let vectors: Vec<Vector> = (0..s.top)
        .map(|j| canonical_sign(s.basis.column(j)))
        .collect();
    let variant = if s.top == 1 {
        AttainmentVariant::FinitePairs(vectors)
    } else {
        AttainmentVariant::SubsphereOfSubspace(vectors)
    };
    Ok(NormAttainmentSet {
        variant,
        dimension_of_span: s.top,
        non_extreme_maximizers_possible: false,
    })
}

/// Flip `u` so its first clearly nonzero coordinate is positive.
fn canonical_sign(u: Vector) -> Vector {
    let lead = u
        .coords()
        .iter()
        .copied()
        .find(|c| c.abs() > 1e-12)
        .unwrap_or(1.0);
    if lead < 0.0 {
        -&u
    } else {
        u
    }
}

/// Exact `rho'_±(T, A)` in the operator norm.
pub fn rho_pm_operator(
    t: &OperatorMatrix,
    a: &OperatorMatrix,
    side: Side,
) -> Result<DerivativeValue> {
    t.check_same_space(a)?;
    if t.is_zero() {
        return Ok(DerivativeValue::exact(0.0));
    }
    let value = if t.is_hilbert() {
        let s = spectrum(t)?;
        let (lo, hi) = compressed_range(t, a, &s)?;
        match side {
            Side::Plus => hi,
            Side::Minus => lo,
        }
    } else if t.is_l1_domain() {
        let cols = maximizing_columns(&column_norms(t));
        let kind = DerivativeKind::from(side);
        let mut values = Vec::with_capacity(cols.len());
        for &i in &cols {
            values.push(rho_of(&t.codomain, &t.column(i), &a.column(i), kind)?.value);
        }
        match side {
            Side::Plus => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Side::Minus => values.iter().copied().fold(f64::INFINITY, f64::min),
        }
    } else {
        return Err(Error::input(
            "operator derivatives need an l1 domain or a euclidean operator",
        ));
    };
    Ok(DerivativeValue::exact(value))
}

/// `(lambda_min, lambda_max)` of `P0^T sym(T^T A) P0`.
fn compressed_range(t: &OperatorMatrix, a: &OperatorMatrix, s: &Spectrum) -> Result<(f64, f64)> {
    let p0 = s.basis.leading_columns(s.top);
    let form = t.entries.tr_matmul(&a.entries).symmetric_part();
    let compressed = p0.tr_matmul(&form.matmul(&p0)).symmetric_part();
    let eig = symmetric_eigen(&compressed)?;
    Ok((eig.values[eig.values.len() - 1], eig.values[0]))
}

/// `rho'_±(T x0, A x0)` in the codomain, valid when `M_T = {±x0}`.
pub fn rho_pm_via_unique_attainment(
    t: &OperatorMatrix,
    a: &OperatorMatrix,
    x0: &Vector,
    side: Side,
) -> Result<DerivativeValue> {
    t.check_same_space(a)?;
    let m = norm_attainment_set(t)?;
    let Some(u) = m.single_pair() else {
        return Err(Error::PreconditionViolation(format!(
            "norm attainment set is not a single pair (span dimension {})",
            m.dimension_of_span
        )));
    };
    if u.max_abs_diff(x0) > 1e-8 && u.max_abs_diff(&-x0) > 1e-8 {
        return Err(Error::PreconditionViolation(
            "x0 does not attain the operator norm".into(),
        ));
    }
    rho_of(&t.codomain, &t.apply(x0)?, &a.apply(x0)?, side.into())
}

/// Rounding slack per quotient for operator norms; an eigensolve or column
/// scan costs more ulps than a vector norm.
const NOISE_ULPS_OPERATOR: f64 = 256.0;

pub fn op_limit_oracle(
    t: &OperatorMatrix,
    a: &OperatorMatrix,
    side: Side,
    schedule: &Schedule,
) -> Result<DerivativeValue> {
    t.check_same_space(a)?;
    let base = op_norm(t)?;
    let dir = op_norm(a)?;
    if base == 0.0 {
        return Ok(DerivativeValue {
            value: 0.0,
            method: crate::derivative::Method::LimitOracle,
            error_estimate: 0.0,
        });
    }
    one_sided_limit(base, dir, side, schedule, NOISE_ULPS_OPERATOR, |s| {
        op_norm(&t.combine(1.0, a, s)?)
    })
}

/// The operators used to break additivity when `M_T` holds two independent
/// directions `b_i`, `b_j`: `A1 = T b_i b_i^T - T b_j b_j^T / 2` and
/// `A2 = -T b_i b_i^T / 2 + T b_j b_j^T`. For Euclidean operators `b` runs
/// over the eigenvectors of `T^T T` by descending eigenvalue, so `i`, `j` must
/// index the top eigenspace; for `l1` domains `b` is the standard basis and
/// `i`, `j` must be maximizing columns. Indices are zero-based.
pub fn construct_counterexample_pair(
    t: &OperatorMatrix,
    i: usize,
    j: usize,
) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let n = t.domain.dim();
    if i == j || i >= n || j >= n {
        return Err(Error::input(format!(
            "need two distinct indices below {n}, got {i} and {j}"
        )));
    }
    let basis = if t.is_l1_domain() {
        let cols = maximizing_columns(&column_norms(t));
        if t.is_zero() || !cols.contains(&i) || !cols.contains(&j) {
            return Err(Error::PreconditionViolation(format!(
                "columns {i} and {j} do not both attain the operator norm"
            )));
        }
        Matrix::identity(n)
    } else if t.is_hilbert() {
        let s = spectrum(t)?;
        if t.is_zero() || i >= s.top || j >= s.top {
            return Err(Error::PreconditionViolation(format!(
                "basis vectors {i} and {j} do not both lie in the attainment subspace (dimension {})",
                s.top
            )));
        }
        s.basis
    } else {
        return Err(Error::input(
            "counterexamples need an l1 domain or a euclidean operator",
        ));
    };
    let bi = basis.column(i);
    let bj = basis.column(j);
    let ti = Matrix::from_columns(&[t.apply(&bi)?])?;
    let tj = Matrix::from_columns(&[t.apply(&bj)?])?;
    let ri = Matrix::from_rows(&[bi.into_coords()])?;
    let rj = Matrix::from_rows(&[bj.into_coords()])?;
    let pi = ti.matmul(&ri);
    let pj = tj.matmul(&rj);
    Ok((
        t.with_entries(pi.combine(1.0, &pj, -0.5))?,
        t.with_entries(pi.combine(-0.5, &pj, 1.0))?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OperatorSweepConfig {
    pub pairs: usize,
    pub seed: u64,
    /// Relative; residuals are divided by `||T|| (||A1|| + ||A2||)`.
    pub tol: f64,
}

impl Default for OperatorSweepConfig {
    fn default() -> Self {
        OperatorSweepConfig {
            pairs: 200,
            seed: 0,
            tol: tolerance::ADDITIVITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OperatorWitness {
    pub a1: OperatorMatrix,
    pub a2: OperatorMatrix,
    pub residual: f64,
}

/// Values of a derivative on a constructed pair and on its sum.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CounterexampleCheck {
    pub a1: OperatorMatrix,
    pub a2: OperatorMatrix,
    pub value_a1: f64,
    pub value_a2: f64,
    pub value_sum: f64,
    /// `value_sum != value_a1 + value_a2` beyond tolerance.
    pub breaks_additivity: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KhReport {
    pub operator: OperatorMatrix,
    pub rho_plus_additive: bool,
    pub rho_minus_additive: bool,
    /// `rho'_+(T, A) = rho'_-(T, A)` on every sampled `A`.
    pub smooth: bool,
    pub unique_attainment: bool,
    pub attainment_dim: usize,
    pub witness: Option<OperatorWitness>,
    pub counterexample: Option<CounterexampleCheck>,
    pub max_residual: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RhoRemarkReport {
    pub operator: OperatorMatrix,
    pub rho_additive: bool,
    pub attainment_dim: usize,
    pub witness: Option<OperatorWitness>,
    pub max_residual: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct L1DomainReport {
    pub operator: OperatorMatrix,
    /// `rho'_+(T, ·)` additive on every sampled pair.
    pub left: bool,
    /// The exact column formula agreed with the limit oracle on every sample.
    pub oracle_consistent: bool,
    /// Largest `|exact - oracle| / max(1e-6, error_estimate)` seen.
    pub max_oracle_ratio: f64,
    /// With a unique maximizing column: the transfer to `T e_i0` agreed with
    /// the column formula on every sample.
    pub transfer_consistent: Option<bool>,
    pub maximizing_columns: Vec<usize>,
    pub non_extreme_maximizers_possible: bool,
    /// With a unique maximizing column: whether `T e_i0` is rho±-smooth.
    pub image_smooth: Option<bool>,
    pub right: bool,
    pub witness: Option<OperatorWitness>,
    pub counterexample: Option<CounterexampleCheck>,
    pub max_residual: f64,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "theorem", rename_all = "snake_case"))]
pub enum TheoremReport {
    Kh(KhReport),
    RhoRemark(RhoRemarkReport),
    L1Domain(L1DomainReport),
}

impl TheoremReport {
    pub fn consistent(&self) -> bool {
        match self {
            TheoremReport::Kh(r) => r.consistent,
            TheoremReport::RhoRemark(r) => r.consistent,
            TheoremReport::L1Domain(r) => r.consistent,
        }
    }

    pub fn summary(&self) -> String {
        match self {
            TheoremReport::Kh(r) => format!(
                "hilbert operator: rho+ additive {}, rho- additive {}, smooth {}, single attaining pair {} (dim {})",
                r.rho_plus_additive, r.rho_minus_additive, r.smooth, r.unique_attainment, r.attainment_dim
            ),
            TheoremReport::RhoRemark(r) => format!(
                "hilbert operator: rho additive {}, attainment dim {}",
                r.rho_additive, r.attainment_dim
            ),
            TheoremReport::L1Domain(r) => format!(
                "l1-domain operator: rho± additive {}, maximizing columns {:?}, image smooth {:?}, oracle consistent {}",
                r.left, r.maximizing_columns, r.image_smooth, r.oracle_consistent
            ),
        }
    }
}

fn random_direction<R: Rng + ?Sized>(rng: &mut R, t: &OperatorMatrix) -> OperatorMatrix {
    let m = gaussian_matrix(rng, t.entries.rows(), t.entries.cols());
    t.with_entries(m).expect("same shape")
}

struct AdditivitySweep {
    additive: bool,
    witness: Option<OperatorWitness>,
    max_residual: f64,
}

fn pair_residual(
    t_norm: f64,
    a1: &OperatorMatrix,
    a2: &OperatorMatrix,
    d: &impl Fn(&OperatorMatrix) -> Result<f64>,
) -> Result<f64> {
    let scale = t_norm * (op_norm(a1)? + op_norm(a2)?);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sum = a1.combine(1.0, a2, 1.0)?;
    Ok((d(&sum)? - d(a1)? - d(a2)?).abs() / scale)
}

fn sweep_additivity(
    t: &OperatorMatrix,
    t_norm: f64,
    config: &OperatorSweepConfig,
    stream: u64,
    antipodal: bool,
    d: impl Fn(&OperatorMatrix) -> Result<f64>,
) -> Result<AdditivitySweep> {
    let mut max_residual: f64 = 0.0;
    for i in 0..config.pairs {
        let mut rng = trial_rng(config.seed, stream, i as u64);
        let a1 = random_direction(&mut rng, t);
        let a2 = if antipodal && i % 4 == 3 {
            a1.combine(-1.0, &a1, 0.0)?
        } else {
            random_direction(&mut rng, t)
        };
        let r = pair_residual(t_norm, &a1, &a2, &d)?;
        max_residual = max_residual.max(r);
        if r > config.tol {
            return Ok(AdditivitySweep {
                additive: false,
                witness: Some(OperatorWitness {
                    a1,
                    a2,
                    residual: r,
                }),
                max_residual,
            });
        }
    }
    Ok(AdditivitySweep {
        additive: true,
        witness: None,
        max_residual,
    })
}

fn counterexample_check(
    t_norm: f64,
    a1: OperatorMatrix,
    a2: OperatorMatrix,
    tol: f64,
    d: &impl Fn(&OperatorMatrix) -> Result<f64>,
) -> Result<CounterexampleCheck> {
    let sum = a1.combine(1.0, &a2, 1.0)?;
    let (v1, v2, vs) = (d(&a1)?, d(&a2)?, d(&sum)?);
    let r = pair_residual(t_norm, &a1, &a2, d)?;
    Ok(CounterexampleCheck {
        a1,
        a2,
        value_a1: v1,
        value_a2: v2,
        value_sum: vs,
        breaks_additivity: r > tol,
    })
}

fn require_hilbert(t: &OperatorMatrix) -> Result<f64> {
    if !t.is_hilbert() {
        return Err(Error::input(
            "this check needs a euclidean domain and codomain",
        ));
    }
    if t.is_zero() {
        return Err(Error::degenerate("this check needs T != 0"));
    }
    op_norm(t)
}

fn violation(report: TheoremReport) -> Result<TheoremReport> {
    if report.consistent() {
        Ok(report)
    } else {
        Err(Error::EquivalenceViolation(Box::new(report)))
    }
}

/// Four conditions on a Euclidean operator that must coincide: additivity of
/// `rho'_+(T, ·)`, additivity of `rho'_-(T, ·)`, smoothness of `T`, and
/// `M_T = {±x0}`.
pub fn check_kh_theorem(t: &OperatorMatrix, config: &OperatorSweepConfig) -> Result<KhReport> {
    let t_norm = require_hilbert(t)?;
    let s = spectrum(t)?;
    let d_plus = |a: &OperatorMatrix| compressed_range(t, a, &s).map(|r| r.1);
    let d_minus = |a: &OperatorMatrix| compressed_range(t, a, &s).map(|r| r.0);
    let plus = sweep_additivity(t, t_norm, config, 21, true, d_plus)?;
    let minus = sweep_additivity(t, t_norm, config, 22, true, d_minus)?;

    let mut smooth = true;
    let mut max_residual = plus.max_residual.max(minus.max_residual);
    for i in 0..config.pairs {
        let a = random_direction(&mut trial_rng(config.seed, 23, i as u64), t);
        let gap = (d_plus(&a)? - d_minus(&a)?) / (t_norm * op_norm(&a)?);
        max_residual = max_residual.max(gap);
        if gap > config.tol {
            smooth = false;
            break;
        }
    }

    let m = norm_attainment_set(t)?;
    let unique = m.single_pair().is_some();
    let counterexample = if unique {
        None
    } else {
        let (a1, a2) = construct_counterexample_pair(t, 0, 1)?;
        Some(counterexample_check(t_norm, a1, a2, config.tol, &d_plus)?)
    };
    let agree = plus.additive == unique && minus.additive == unique && smooth == unique;
    let consistent = agree && counterexample.as_ref().is_none_or(|c| c.breaks_additivity);
    let report = KhReport {
        operator: t.clone(),
        rho_plus_additive: plus.additive,
        rho_minus_additive: minus.additive,
        smooth,
        unique_attainment: unique,
        attainment_dim: m.dimension_of_span,
        witness: plus.witness.or(minus.witness),
        counterexample,
        max_residual,
        consistent,
    };
    match violation(TheoremReport::Kh(report))? {
        TheoremReport::Kh(r) => Ok(r),
        _ => unreachable!(),
    }
}

/// `rho'(T, ·)` is additive exactly when the top eigenspace of `T^T T` has
/// dimension at most two.
pub fn check_rho_smooth_remark(
    t: &OperatorMatrix,
    config: &OperatorSweepConfig,
) -> Result<RhoRemarkReport> {
    let t_norm = require_hilbert(t)?;
    let s = spectrum(t)?;
    let d = |a: &OperatorMatrix| -> Result<f64> {
        let (lo, hi) = compressed_range(t, a, &s)?;
        Ok(0.5 * (lo + hi))
    };
    let sweep = sweep_additivity(t, t_norm, config, 24, false, d)?;
    let report = RhoRemarkReport {
        operator: t.clone(),
        rho_additive: sweep.additive,
        attainment_dim: s.top,
        witness: sweep.witness,
        max_residual: sweep.max_residual,
        consistent: sweep.additive == (s.top <= 2),
    };
    match violation(TheoremReport::RhoRemark(report))? {
        TheoremReport::RhoRemark(r) => Ok(r),
        _ => unreachable!(),
    }
}

/// For `l1^n` domains: `T` is rho±-smooth iff a single column `i0` attains
/// the norm and `T e_i0` is rho±-smooth in the codomain.
pub fn check_l1_domain_theorem(
    t: &OperatorMatrix,
    config: &OperatorSweepConfig,
) -> Result<L1DomainReport> {
    if !t.is_l1_domain() {
        return Err(Error::input("this check needs an l1 domain"));
    }
    if t.is_zero() {
        return Err(Error::degenerate("this check needs T != 0"));
    }
    let t_norm = op_norm(t)?;
    let d_plus = |a: &OperatorMatrix| rho_pm_operator(t, a, Side::Plus).map(|v| v.value);
    let sweep = sweep_additivity(t, t_norm, config, 25, true, d_plus)?;

    let m = norm_attainment_set(t)?;
    let cols = maximizing_columns(&column_norms(t));
    let unique = cols.len() == 1;
    let x0 = m.vectors()[0].clone();

    let schedule = Schedule::default();
    let mut oracle_consistent = true;
    let mut max_oracle_ratio: f64 = 0.0;
    let mut transfer_consistent = unique.then_some(true);
    let checks = config.pairs.min(50);
    for i in 0..checks {
        let a = random_direction(&mut trial_rng(config.seed, 26, i as u64), t);
        let scale = t_norm * op_norm(&a)?;
        for side in [Side::Plus, Side::Minus] {
            let exact = rho_pm_operator(t, &a, side)?.value;
            let oracle = op_limit_oracle(t, &a, side, &schedule)?;
            let ratio = (exact - oracle.value).abs()
                / (tolerance::ORACLE * scale).max(oracle.error_estimate);
            max_oracle_ratio = max_oracle_ratio.max(ratio);
            oracle_consistent &= ratio <= 1.0;
            if unique {
                let transferred = rho_pm_via_unique_attainment(t, &a, &x0, side)?.value;
                if (transferred - exact).abs() > tolerance::EXACT * scale.max(1.0) {
                    transfer_consistent = Some(false);
                }
            }
        }
    }

    let image_outcome = if unique {
        let cfg = AdditivityConfig {
            seed: config.seed,
            ..AdditivityConfig::default()
        };
        Some(is_rho_pm_smooth(&t.codomain, &t.column(cols[0]), &cfg)?)
    } else {
        None
    };
    let image_smooth = image_outcome.as_ref().map(|o| o.additive);
    let right = unique && image_smooth == Some(true);

    let counterexample = if cols.len() >= 2 {
        let (a1, a2) = construct_counterexample_pair(t, cols[0], cols[1])?;
        Some(counterexample_check(t_norm, a1, a2, config.tol, &d_plus)?)
    } else {
        match image_outcome.and_then(|o| o.witness) {
            Some(AdditivityWitness::Pair { y1, y2, .. }) => {
                let n = t.domain.dim();
                let e = Vector::basis(n, cols[0]);
                let a3 = t.with_entries(outer(&y1, &e))?;
                let a4 = t.with_entries(outer(&y2, &e))?;
                Some(counterexample_check(t_norm, a3, a4, config.tol, &d_plus)?)
            }
            _ => None,
        }
    };

    let consistent = sweep.additive == right
        && oracle_consistent
        && transfer_consistent != Some(false)
        && counterexample.as_ref().is_none_or(|c| c.breaks_additivity);
    let report = L1DomainReport {
        operator: t.clone(),
        left: sweep.additive,
        oracle_consistent,
        max_oracle_ratio,
        transfer_consistent,
        maximizing_columns: cols,
        non_extreme_maximizers_possible: m.non_extreme_maximizers_possible,
        image_smooth,
        right,
        witness: sweep.witness,
        counterexample,
        max_residual: sweep.max_residual,
        consistent,
    };
    match violation(TheoremReport::L1Domain(report))? {
        TheoremReport::L1Domain(r) => Ok(r),
        _ => unreachable!(),
    }
}

/// `y e^T`.
fn outer(y: &Vector, e: &Vector) -> Matrix {
    let mut m = Matrix::zeros(y.dim(), e.dim());
    for i in 0..y.dim() {
        for j in 0..e.dim() {
            m[(i, j)] = y.coords()[i] * e.coords()[j];
        }
    }
    m
}

#[cfg(feature = "serde")]
mod wire {
    use alloc::vec::Vec;

    use super::OperatorMatrix;
    use crate::error::Error;
    use crate::space::SpaceDescriptor;

    #[derive(serde::Serialize, serde::Deserialize)]
    pub(super) struct OperatorRepr {
        entries: Vec<Vec<f64>>,
        domain: SpaceDescriptor,
        codomain: SpaceDescriptor,
    }

    impl From<OperatorMatrix> for OperatorRepr {
        fn from(t: OperatorMatrix) -> Self {
            OperatorRepr {
                entries: t.entries.to_rows(),
                domain: t.domain,
                codomain: t.codomain,
            }
        }
    }

    impl TryFrom<OperatorRepr> for OperatorMatrix {
        type Error = Error;

        fn try_from(r: OperatorRepr) -> Result<Self, Error> {
            OperatorMatrix::from_rows(&r.entries, r.domain, r.codomain)
        }
    }
}
