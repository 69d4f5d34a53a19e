//! Hyperboloid-model geometry.
//!
//! Model conversions, distance and geodesics, hypersphere classification
//! (metric sphere / horosphere / equidistant hypersurface), convex sides
//! of half-spaces, separating planes, and the horoball toolkit.
//!
//! The classification follows the three-way split of the support plane's
//! parallel subspace: space-like planes cut metric spheres, light-like
//! planes cut horospheres, time-like planes cut equidistant loci. Exact
//! certificates (unnormalized rational normals and squared cosh values)
//! are kept alongside floating conveniences so that every emptiness
//! predicate is a pure sign test.

use thiserror::Error;

use crate::linalg;
use crate::lorentz::{
    classify_vector, mink, orthogonal_complement, CausalClass, LorentzVec, Subspace,
};
use crate::scalar::{GeomScalar, Sign};

/// Float-mode tolerance for renormalizing near-hyperboloid input.
pub const EPS_LIFT: f64 = 1e-9;
/// Float-mode tolerance on the HPoint norm invariant.
pub const EPS_NORM: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("point lies outside the model domain: {0}")]
    OutsideDomain(String),
    #[error("vector is not time-like with positive first coordinate")]
    NotTimeLike,
    #[error("exact square root unavailable for {0}; use the Poincare chart for exact input")]
    ExactSqrt(String),
    #[error("points are affinely dependent below hyperplane dimension (rank {rank}, need {need})")]
    AffinelyDependent { rank: usize, need: usize },
    #[error("plane does not meet the hyperboloid")]
    MissesHyperboloid,
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("base point is inside or on the hull")]
    InsideHull,
    #[error(transparent)]
    Lorentz(#[from] crate::lorentz::LorentzError),
}

/// A point on the upper hyperboloid sheet `{x∘x = -1, x0 > 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPoint<S> {
    vec: LorentzVec<S>,
}

impl<S: GeomScalar> HPoint<S> {
    /// Wraps a vector already satisfying the sheet invariant. The float
    /// check is relative to the squared coordinate scale, which is the
    /// attainable cancellation precision of `x∘x` far from the basepoint.
    pub fn from_vec(vec: LorentzVec<S>) -> Result<Self, ModelError> {
        let q = mink(&vec, &vec);
        let ok = if S::EXACT {
            q == -S::one()
        } else {
            let x0 = vec.coords[0].to_f64();
            (q.to_f64() + 1.0).abs() <= EPS_NORM * (1.0 + x0 * x0)
        };
        if !ok {
            return Err(ModelError::OutsideDomain(format!("x∘x = {q}, expected -1")));
        }
        if vec.coords[0].sign() != Sign::Pos {
            return Err(ModelError::OutsideDomain("x0 <= 0".into()));
        }
        Ok(HPoint { vec })
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        HPoint::from_vec(LorentzVec::from_ints(coords)).expect("not a hyperboloid point")
    }

    pub fn vec(&self) -> &LorentzVec<S> {
        &self.vec
    }

    pub fn dim(&self) -> usize {
        self.vec.dim() - 1
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.vec.to_f64()
    }

    /// Poincare-ball coordinates `(x1..xn) / (1 + x0)`; exact.
    pub fn to_poincare(&self) -> Vec<S> {
        let denom = S::one() + &self.vec.coords[0];
        self.vec.coords[1..].iter().map(|c| c.clone() / denom.clone()).collect()
    }
}

/// Supported coordinate charts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Hyperboloid,
    PoincareBall,
    KleinBall,
    UpperHalfSpace,
}

/// A point in one of the coordinate charts.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPoint<S> {
    pub model: Model,
    pub coords: Vec<S>,
}

impl<S: GeomScalar> ModelPoint<S> {
    pub fn poincare(coords: Vec<S>) -> Self {
        ModelPoint { model: Model::PoincareBall, coords }
    }
}

fn norm_sq<S: GeomScalar>(coords: &[S]) -> S {
    let mut acc = S::zero();
    for c in coords {
        acc = acc + c.clone() * c;
    }
    acc
}

/// Lift a chart point onto the hyperboloid.
///
/// Poincare: `p ↦ ((1+|p|²), 2p) / (1-|p|²)`, rational on rational input.
/// Klein: `k ↦ (1, k)/√(1-|k|²)`; exact only when `1-|k|²` is a rational
/// square. Upper half-space goes through the standard boundary-preserving
/// map onto the ball, which is also rational.
pub fn lift<S: GeomScalar>(p: &ModelPoint<S>) -> Result<HPoint<S>, ModelError> {
    match p.model {
        Model::Hyperboloid => {
            let v = LorentzVec::new(p.coords.clone());
            if S::EXACT {
                HPoint::from_vec(v)
            } else {
                let q = mink(&v, &v).to_f64();
                if (q + 1.0).abs() <= EPS_NORM {
                    HPoint::from_vec(v)
                } else if q < 0.0 && (q + 1.0).abs() <= EPS_LIFT {
                    let s = S::from_f64_approx(1.0 / (-q).sqrt());
                    HPoint::from_vec(v.scale(&s))
                } else {
                    Err(ModelError::OutsideDomain(format!("x∘x = {q}")))
                }
            }
        }
        Model::PoincareBall => {
            let nsq = norm_sq(&p.coords);
            if (S::one() - nsq.clone()).sign() != Sign::Pos {
                return Err(ModelError::OutsideDomain("|p| >= 1".into()));
            }
            let denom = S::one() - &nsq;
            let mut coords = Vec::with_capacity(p.coords.len() + 1);
            coords.push((S::one() + &nsq) / denom.clone());
            for c in &p.coords {
                coords.push((S::from_int(2) * c) / denom.clone());
            }
            let v = LorentzVec::new(coords);
            if S::EXACT {
                HPoint::from_vec(v)
            } else {
                // float drift near the boundary: renormalize onto the sheet
                let q = mink(&v, &v).to_f64();
                let s = S::from_f64_approx(1.0 / (-q).sqrt());
                HPoint::from_vec(v.scale(&s))
            }
        }
        Model::KleinBall => {
            let nsq = norm_sq(&p.coords);
            let rem = S::one() - nsq;
            if rem.sign() != Sign::Pos {
                return Err(ModelError::OutsideDomain("|k| >= 1".into()));
            }
            let root = rem
                .exact_sqrt()
                .ok_or_else(|| ModelError::ExactSqrt(format!("1-|k|² = {rem}")))?;
            let mut coords = Vec::with_capacity(p.coords.len() + 1);
            coords.push(S::one() / root.clone());
            for c in &p.coords {
                coords.push(c.clone() / root.clone());
            }
            HPoint::from_vec(LorentzVec::new(coords))
        }
        Model::UpperHalfSpace => {
            let n = p.coords.len();
            if n == 0 {
                return Err(ModelError::OutsideDomain("empty coordinates".into()));
            }
            let height = p.coords[n - 1].clone();
            if height.sign() != Sign::Pos {
                return Err(ModelError::OutsideDomain("nonpositive height".into()));
            }
            // (y, t) ↦ (2y, |y|²+t²-1) / (|y|² + (t+1)²) onto the ball
            let ysq = norm_sq(&p.coords[..n - 1]);
            let tsq = height.clone() * &height;
            let denom = ysq.clone() + (height.clone() + S::one()) * (height.clone() + S::one());
            let mut ball = Vec::with_capacity(n);
            for y in &p.coords[..n - 1] {
                ball.push((S::from_int(2) * y) / denom.clone());
            }
            ball.push((ysq + &tsq - &S::one()) / denom);
            lift(&ModelPoint::poincare(ball))
        }
    }
}

/// Central projection `r_n: x ↦ x / √(-x∘x)` onto the hyperboloid.
/// In exact mode the norm must be a rational square.
pub fn project_to_hyperboloid<S: GeomScalar>(x: &LorentzVec<S>) -> Result<HPoint<S>, ModelError> {
    let q = -mink(x, x);
    if q.sign() != Sign::Pos || x.coords[0].sign() != Sign::Pos {
        return Err(ModelError::NotTimeLike);
    }
    let root = if S::EXACT {
        q.exact_sqrt().ok_or_else(|| ModelError::ExactSqrt(format!("-x∘x = {q}")))?
    } else {
        S::from_f64_approx(q.to_f64().sqrt())
    };
    HPoint::from_vec(x.scale(&(S::one() / root)))
}

/// `cosh` of the hyperbolic distance, exact.
pub fn cosh_dist<S: GeomScalar>(x: &HPoint<S>, y: &HPoint<S>) -> S {
    -mink(x.vec(), y.vec())
}

/// Hyperbolic distance `arccosh(-x∘y)`.
pub fn dist<S: GeomScalar>(x: &HPoint<S>, y: &HPoint<S>) -> f64 {
    let c = cosh_dist(x, y).to_f64();
    if c <= 1.0 {
        0.0
    } else {
        c.acosh()
    }
}

/// Arclength parametrization of the geodesic from `x` through `y`
/// (floating evaluation): `t ↦ cosh(t) x + sinh(t) n` with `n` the unit
/// normal component of `y` against `x`.
pub fn geodesic_point(x: &HPoint<f64>, y: &HPoint<f64>, t: f64) -> Result<HPoint<f64>, ModelError> {
    let c = mink(x.vec(), y.vec());
    let nsq = c * c - 1.0;
    if nsq <= 0.0 {
        return Err(ModelError::Constraint("geodesic direction undefined for x = y".into()));
    }
    let n = y.vec().add(&x.vec().scale(&c)).scale(&(1.0 / nsq.sqrt()));
    let p = x.vec().scale(&t.cosh()).add(&n.scale(&t.sinh()));
    // renormalize to absorb float drift
    project_to_hyperboloid(&p)
}

/// Geodesic ray into a horoball, parametrized by `w = e^t >= 1`:
/// `e^{-t} x + sinh(t) u`. Exact whenever `e^t` is rational.
pub fn horoball_ray_exp<S: GeomScalar>(
    x: &HPoint<S>,
    u: &LorentzVec<S>,
    exp_t: S,
) -> Result<HPoint<S>, ModelError> {
    if classify_vector(u) != CausalClass::LightLike || u.coords[0].sign() != Sign::Pos {
        return Err(ModelError::Constraint("u must be light-like with u0 > 0".into()));
    }
    let pairing = mink(x.vec(), u);
    if pairing != -S::one() {
        return Err(ModelError::Constraint(format!("x∘u = {pairing}, expected -1")));
    }
    let inv = S::one() / exp_t.clone();
    let sinh_t = (exp_t - &inv) / S::from_int(2);
    HPoint::from_vec(x.vec().scale(&inv).add(&u.scale(&sinh_t)))
}

/// Floating variant of [`horoball_ray_exp`] parametrized by arclength `t`.
pub fn horoball_ray(
    x: &HPoint<f64>,
    u: &LorentzVec<f64>,
    t: f64,
) -> Result<HPoint<f64>, ModelError> {
    horoball_ray_exp(x, u, t.exp())
}

/// An affine hyperplane `{x : x∘u = c}` with Lorentz normal `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePlane<S> {
    pub normal: LorentzVec<S>,
    pub offset: S,
}

impl<S: GeomScalar> AffinePlane<S> {
    pub fn new(normal: LorentzVec<S>, offset: S) -> Self {
        assert!(!normal.is_zero(), "plane normal must be nonzero");
        AffinePlane { normal, offset }
    }

    /// Causal type of the parallel subspace `{x∘u = 0}`, which is the
    /// opposite of the normal's type.
    pub fn parallel_type(&self) -> CausalClass {
        match classify_vector(&self.normal) {
            CausalClass::TimeLike => CausalClass::SpaceLike,
            CausalClass::LightLike => CausalClass::LightLike,
            CausalClass::SpaceLike => CausalClass::TimeLike,
            CausalClass::Zero => unreachable!("nonzero normal"),
        }
    }

    /// Signed evaluation `x∘u - c`.
    pub fn eval(&self, x: &LorentzVec<S>) -> S {
        mink(x, &self.normal) - self.offset.clone()
    }

    /// Whether the plane meets the hyperboloid sheet.
    pub fn meets_hyperboloid(&self) -> bool {
        let u = &self.normal;
        let c = &self.offset;
        let uu = mink(u, u);
        match uu.sign() {
            // space-like normal: x∘u is unbounded both ways on the sheet
            Sign::Pos => true,
            Sign::Zero => {
                // light-like: x∘u < 0 on the sheet when u0 > 0
                if u.coords[0].sign() == Sign::Pos {
                    c.sign() == Sign::Neg
                } else {
                    c.sign() == Sign::Pos
                }
            }
            Sign::Neg => {
                // time-like upper: x∘u ranges over (-inf, -sqrt(-u∘u)]
                let c_ok = if u.coords[0].sign() == Sign::Pos {
                    c.sign() == Sign::Neg
                } else {
                    c.sign() == Sign::Pos
                };
                c_ok && (c.clone() * c + &uu).sign() != Sign::Neg
            }
        }
    }
}

/// Side selector of a half-space `{x∘u >= c}` or `{x∘u <= c}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Geq,
    Leq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace<S> {
    pub plane: AffinePlane<S>,
    pub side: Side,
}

impl<S: GeomScalar> HalfSpace<S> {
    pub fn contains(&self, x: &LorentzVec<S>) -> bool {
        let v = self.plane.eval(x);
        match self.side {
            Side::Geq => v.sign() != Sign::Neg,
            Side::Leq => v.sign() != Sign::Pos,
        }
    }

    pub fn contains_strict(&self, x: &LorentzVec<S>) -> bool {
        let v = self.plane.eval(x);
        match self.side {
            Side::Geq => v.sign() == Sign::Pos,
            Side::Leq => v.sign() == Sign::Neg,
        }
    }
}

/// Result of [`convex_side`]: the unique convex side, or both for a
/// time-like subspace through the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum ConvexSide<S> {
    Single(HalfSpace<S>),
    BothTotallyGeodesic(AffinePlane<S>),
}

/// The unique half-space bounded by `plane` whose intersection with `H^n`
/// is convex. It always contains the origin. Planes through the origin
/// with time-like parallel subspace have both sides convex.
pub fn convex_side<S: GeomScalar>(plane: &AffinePlane<S>) -> Result<ConvexSide<S>, ModelError> {
    let mut u = plane.normal.clone();
    let mut c = plane.offset.clone();
    if !plane.meets_hyperboloid() {
        return Err(ModelError::MissesHyperboloid);
    }
    match classify_vector(&u) {
        CausalClass::TimeLike => {
            // metric ball {x∘u >= c} for u on the upper sheet direction
            if u.coords[0].sign() == Sign::Neg {
                u = u.neg();
                c = -c;
            }
            Ok(ConvexSide::Single(HalfSpace {
                plane: AffinePlane::new(u, c),
                side: Side::Geq,
            }))
        }
        CausalClass::LightLike => {
            if u.coords[0].sign() == Sign::Neg {
                u = u.neg();
                c = -c;
            }
            // horoball {x∘u >= c}, c < 0 guaranteed by meets_hyperboloid
            Ok(ConvexSide::Single(HalfSpace {
                plane: AffinePlane::new(u, c),
                side: Side::Geq,
            }))
        }
        CausalClass::SpaceLike => {
            if c.sign() == Sign::Zero {
                return Ok(ConvexSide::BothTotallyGeodesic(plane.clone()));
            }
            // rescale so the offset equals u∘u: u' = (c / u∘u) u
            let uu = mink(&u, &u);
            let lambda = c / uu;
            let u2 = u.scale(&lambda);
            let c2 = mink(&u2, &u2);
            Ok(ConvexSide::Single(HalfSpace {
                plane: AffinePlane::new(u2, c2),
                side: Side::Leq,
            }))
        }
        CausalClass::Zero => unreachable!("nonzero normal"),
    }
}

/// Circumsphere of a cell: the hypersphere cut by its support plane,
/// classified per the parallel subspace. Exact certificates only; floating
/// descriptions are derived on demand.
#[derive(Debug, Clone, PartialEq)]
pub enum Circumsphere<S> {
    /// Metric sphere: `w` is an unnormalized time-like center direction on
    /// the upper sheet, `offset = x∘w` on the sphere (negative). The empty
    /// ball is `{x∘w >= offset}`.
    Metric { center_dir: LorentzVec<S>, offset: S },
    /// Horosphere `{x∘u = -1}` with `u` light-like, `u0 > 0`. Horoball is
    /// `{x∘u >= -1}`.
    Horosphere { ideal: LorentzVec<S> },
    /// Equidistant locus around the time-like subspace spanned by the
    /// cell plane's parallel directions: the convex side is
    /// `{x∘u <= u∘u}` for the specific normal `u` with `x0 - u` in the
    /// subspace; `cosh d = sqrt(1 + u∘u)`.
    Equidistant { normal: LorentzVec<S>, basis: Vec<LorentzVec<S>>, component: Sign },
    /// Support plane through the origin (excluded for visible cells).
    TotallyGeodesic { basis: Vec<LorentzVec<S>> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphereKind {
    Metric,
    Horosphere,
    Equidistant,
    TotallyGeodesic,
}

impl<S: GeomScalar> Circumsphere<S> {
    pub fn kind(&self) -> SphereKind {
        match self {
            Circumsphere::Metric { .. } => SphereKind::Metric,
            Circumsphere::Horosphere { .. } => SphereKind::Horosphere,
            Circumsphere::Equidistant { .. } => SphereKind::Equidistant,
            Circumsphere::TotallyGeodesic { .. } => SphereKind::TotallyGeodesic,
        }
    }

    /// True when `x` lies strictly inside the convex side (the region that
    /// must be empty of sites for a Delaunay cell).
    pub fn strictly_inside(&self, x: &LorentzVec<S>) -> bool {
        match self {
            Circumsphere::Metric { center_dir, offset } => {
                (mink(x, center_dir) - offset.clone()).sign() == Sign::Pos
            }
            Circumsphere::Horosphere { ideal } => {
                (mink(x, ideal) + S::one()).sign() == Sign::Pos
            }
            Circumsphere::Equidistant { normal, .. } => {
                let uu = mink(normal, normal);
                (mink(x, normal) - uu).sign() == Sign::Neg
            }
            Circumsphere::TotallyGeodesic { .. } => false,
        }
    }

    /// True when `x` lies on the hypersphere itself.
    pub fn on_sphere(&self, x: &LorentzVec<S>) -> bool {
        match self {
            Circumsphere::Metric { center_dir, offset } => {
                mink(x, center_dir) == *offset
            }
            Circumsphere::Horosphere { ideal } => mink(x, ideal) == -S::one(),
            Circumsphere::Equidistant { normal, .. } => {
                mink(x, normal) == mink(normal, normal)
            }
            Circumsphere::TotallyGeodesic { basis } => {
                // x in the span of the basis
                let mut rows: Vec<Vec<S>> =
                    basis.iter().map(|b| b.coords.clone()).collect();
                let r0 = linalg::rank(&rows, 0.0);
                rows.push(x.coords.clone());
                linalg::rank(&rows, 0.0) == r0
            }
        }
    }

    /// Metric radius (hyperbolic length) when applicable.
    pub fn radius(&self) -> Option<f64> {
        match self {
            Circumsphere::Metric { center_dir, offset } => {
                let wn = -mink(center_dir, center_dir).to_f64();
                Some(((-offset.to_f64()) / wn.sqrt()).acosh())
            }
            _ => None,
        }
    }

    /// `cosh²` of the metric radius, exact.
    pub fn cosh_radius_sq(&self) -> Option<S> {
        match self {
            Circumsphere::Metric { center_dir, offset } => {
                let wn = -mink(center_dir, center_dir);
                Some(offset.clone() * offset / wn)
            }
            _ => None,
        }
    }

    /// Center of a metric sphere in floating hyperboloid coordinates.
    pub fn center_f64(&self) -> Option<Vec<f64>> {
        match self {
            Circumsphere::Metric { center_dir, .. } => {
                let wn = (-mink(center_dir, center_dir).to_f64()).sqrt();
                Some(center_dir.to_f64().into_iter().map(|v| v / wn).collect())
            }
            _ => None,
        }
    }

    /// Distance to the core geodesic subspace for an equidistant locus.
    pub fn equidistant_distance(&self) -> Option<f64> {
        match self {
            Circumsphere::Equidistant { normal, .. } => {
                let uu = mink(normal, normal).to_f64();
                Some((1.0 + uu).sqrt().acosh())
            }
            _ => None,
        }
    }

    /// `cosh² d = 1 + u∘u` for an equidistant locus, exact.
    pub fn cosh_equidistant_sq(&self) -> Option<S> {
        match self {
            Circumsphere::Equidistant { normal, .. } => {
                Some(S::one() + mink(normal, normal))
            }
            _ => None,
        }
    }
}

/// Classify the hypersphere through `points`, which must affinely span a
/// hyperplane `P` of the ambient space. If `P` passes through the origin
/// the result is tagged totally geodesic.
pub fn classify_hypersphere<S: GeomScalar>(
    points: &[HPoint<S>],
) -> Result<Circumsphere<S>, ModelError> {
    classify_hypersphere_in_span(points, None)
}

/// Like [`classify_hypersphere`], but relative to a proper linear span `W`
/// of the ambient space (given as an independent basis): the points must
/// affinely span a hyperplane of `W`, and the circumsphere lives in the
/// isometric copy of a lower-dimensional hyperbolic space `W ∩ H^n`.
pub fn classify_hypersphere_in_span<S: GeomScalar>(
    points: &[HPoint<S>],
    span: Option<&[LorentzVec<S>]>,
) -> Result<Circumsphere<S>, ModelError> {
    let d = points
        .first()
        .map(|p| p.vec().dim())
        .ok_or(ModelError::AffinelyDependent { rank: 0, need: 1 })?;
    let m = span.map_or(d, |b| b.len());
    let base = points[0].vec();
    let diffs: Vec<LorentzVec<S>> = points[1..].iter().map(|p| p.vec().sub(base)).collect();
    let rows: Vec<Vec<S>> = diffs.iter().map(|v| v.coords.clone()).collect();
    let rank = linalg::rank(&rows, EPS_NORM);
    if rank != m - 1 {
        return Err(ModelError::AffinelyDependent { rank, need: m - 1 });
    }
    // independent spanning subset of the differences
    let mut basis: Vec<LorentzVec<S>> = Vec::new();
    let mut brows: Vec<Vec<S>> = Vec::new();
    for v in &diffs {
        brows.push(v.coords.clone());
        if linalg::rank(&brows, EPS_NORM) == brows.len() {
            basis.push(v.clone());
        } else {
            brows.pop();
        }
        if basis.len() == m - 1 {
            break;
        }
    }
    // does the plane pass through the origin? iff base lies in span(diffs)
    let mut srows = brows.clone();
    srows.push(base.coords.clone());
    if linalg::rank(&srows, EPS_NORM) == m - 1 {
        return Ok(Circumsphere::TotallyGeodesic { basis });
    }
    let sub = Subspace { basis: basis.clone() };
    // Lorentz-orthogonal complement of V inside W, via the kernel of the
    // pairing rows v_i ∘ B_j over a basis B of W
    let complement_in_span = || -> Result<LorentzVec<S>, ModelError> {
        match span {
            None => Ok(orthogonal_complement(&sub, EPS_NORM)?),
            Some(b) => {
                let rows: Vec<Vec<S>> = basis
                    .iter()
                    .map(|v| b.iter().map(|bj| mink(v, bj)).collect())
                    .collect();
                let a = linalg::kernel_vector(&rows, EPS_NORM)
                    .ok_or(ModelError::Constraint("no complement in span".into()))?;
                let mut w = LorentzVec::zero(d);
                for (ai, bj) in a.iter().zip(b) {
                    w = w.add(&bj.scale(ai));
                }
                Ok(w)
            }
        }
    };
    match crate::lorentz::classify_subspace(&sub, EPS_NORM) {
        CausalClass::SpaceLike => {
            let mut w = complement_in_span()?;
            // orient toward the upper sheet
            if w.coords[0].sign() == Sign::Neg {
                w = w.neg();
            }
            let offset = mink(base, &w);
            debug_assert!(offset.sign() == Sign::Neg);
            Ok(Circumsphere::Metric { center_dir: w, offset })
        }
        CausalClass::LightLike => {
            let w = complement_in_span()?;
            let pairing = mink(base, &w);
            // scale so base∘u = -1; Cauchy-Schwarz keeps pairing nonzero
            let ideal = w.scale(&(-S::one() / pairing));
            Ok(Circumsphere::Horosphere { ideal })
        }
        CausalClass::TimeLike => {
            // u = component of base normal to V, via the Gram system
            let gram = sub.gram();
            let rhs: Vec<S> = basis.iter().map(|b| mink(base, b)).collect();
            let coeffs = linalg::solve(&gram, &rhs, EPS_NORM)
                .ok_or(ModelError::Constraint("degenerate Gram matrix".into()))?;
            let mut proj = LorentzVec::zero(d);
            for (a, b) in coeffs.iter().zip(&basis) {
                proj = proj.add(&b.scale(a));
            }
            let u = base.sub(&proj);
            let component = mink(base, &u).sign();
            Ok(Circumsphere::Equidistant { normal: u, basis, component })
        }
        CausalClass::Zero => unreachable!(),
    }
}

/// Distance between the horosphere `{x∘u = -1}` and its level set
/// `{x∘u = k}` along horoball rays: `ln(-1/k)`, signed (negative when the
/// level set lies outside the horoball).
pub fn horosphere_level_shift<S: GeomScalar>(k: &S) -> Result<f64, ModelError> {
    if k.sign() != Sign::Neg {
        return Err(ModelError::Constraint("level must be negative".into()));
    }
    Ok(-(-k.to_f64()).ln())
}

/// Euclidean chart of a horosphere (the isometry `R^{n-1} -> S`):
/// `F(v) = x0 + v + ½(k + v∘v) u` with `k = 1 + x0∘x0`.
pub fn horosphere_chart<S: GeomScalar>(
    x0: &HPoint<S>,
    u: &LorentzVec<S>,
    v: &LorentzVec<S>,
) -> Result<HPoint<S>, ModelError> {
    if classify_vector(u) != CausalClass::LightLike || u.coords[0].sign() != Sign::Pos {
        return Err(ModelError::Constraint("u must be light-like with u0 > 0".into()));
    }
    if mink(x0.vec(), u) != -S::one() {
        return Err(ModelError::Constraint("x0∘u must equal -1".into()));
    }
    if mink(v, u).sign() != Sign::Zero || mink(v, x0.vec()).sign() != Sign::Zero {
        return Err(ModelError::Constraint("offset must satisfy v∘u = v∘x0 = 0".into()));
    }
    let k = S::one() + mink(x0.vec(), x0.vec());
    let t = (k + mink(v, v)) / S::from_int(2);
    HPoint::from_vec(x0.vec().add(v).add(&u.scale(&t)))
}

/// Intersection shape of the horosphere of `u` with the horoball of `u'`.
#[derive(Debug, Clone, PartialEq)]
pub enum HoroballMeet<S> {
    Empty,
    /// `S ∩ B' = S ∩ U` for the metric ball `U` of the given center;
    /// `cosh_radius = -r0` where `r0 = -1/2 + 1/(u∘u')`.
    Ball { center: HPoint<S>, cosh_radius: S },
}

/// Lemma-style horoball intersection: for independent ideal vectors the
/// horosphere of `u` meets the horoball of `u'` iff `r0 <= -1`, in a ball
/// of radius `arccosh(-r0)` centered where the connecting geodesic
/// crosses the horosphere.
pub fn horoball_intersection<S: GeomScalar>(
    u: &LorentzVec<S>,
    u2: &LorentzVec<S>,
) -> Result<HoroballMeet<S>, ModelError> {
    for w in [u, u2] {
        if classify_vector(w) != CausalClass::LightLike || w.coords[0].sign() != Sign::Pos {
            return Err(ModelError::Constraint("ideal vectors must be in L+".into()));
        }
    }
    let q = mink(u, u2);
    if q.sign() != Sign::Neg {
        return Err(ModelError::Constraint("ideal vectors must be independent".into()));
    }
    let r0 = S::from_ratio(-1, 2) + S::one() / q.clone();
    if (r0.clone() + S::one()).sign() == Sign::Pos {
        return Ok(HoroballMeet::Empty);
    }
    // center = γ(1/2) = u/2 + b(1/2) u', b(a) = -1/(2a·u∘u')
    let center_vec = u.scale(&S::from_ratio(1, 2)).add(&u2.scale(&(-S::one() / q)));
    let center = HPoint::from_vec(center_vec)?;
    Ok(HoroballMeet::Ball { center, cosh_radius: -r0 })
}

/// A separating time-like hyperplane through the origin between a finite
/// closed convex hull and an outside point (weak Hahn-Banach).
///
/// The closest hull point is found by projected-gradient convex
/// minimization over the simplex of convex weights (float). The support
/// face active at the minimum is then re-derived exactly: the normal is
/// `u = x0 - proj(x0)` against the span of the active vertices, which is
/// rational and reproduces `u = x0 + (x∘x0)x` when the closest point is a
/// single vertex. All separation signs are verified exactly; `u∘y = 0`
/// occurs exactly on the closest support, `u∘y < 0` elsewhere.
pub fn separating_plane<S: GeomScalar>(
    hull_points: &[HPoint<S>],
    x0: &HPoint<S>,
) -> Result<AffinePlane<S>, ModelError> {
    if hull_points.is_empty() {
        return Err(ModelError::Constraint("empty hull".into()));
    }
    if hull_points.iter().any(|c| c == x0) {
        return Err(ModelError::InsideHull);
    }
    let lambda = closest_point_weights(hull_points, x0);
    let dim = x0.vec().dim();

    // active support detected from the converged weights
    let active: Vec<usize> =
        (0..lambda.len()).filter(|&i| lambda[i] > 1e-6).collect();

    // exact normal from the Lorentz projection of x0 onto the active span
    if !active.is_empty() {
        let basis: Vec<LorentzVec<S>> =
            active.iter().map(|&i| hull_points[i].vec().clone()).collect();
        if let Some(u) = projection_normal(&basis, x0.vec(), dim) {
            let ok_active = active
                .iter()
                .all(|&i| mink(&u, hull_points[i].vec()).sign() == Sign::Zero);
            let ok_rest = (0..hull_points.len()).all(|i| {
                active.contains(&i)
                    || mink(&u, hull_points[i].vec()).sign() == Sign::Neg
            });
            if ok_active
                && ok_rest
                && mink(&u, x0.vec()).sign() == Sign::Pos
                && mink(&u, &u).sign() == Sign::Pos
            {
                return Ok(AffinePlane::new(u, S::zero()));
            }
        }
    }

    // fallback: rationalize the float normal and tilt it toward x0 so all
    // inequalities become strict (x0∘y <= -1 makes the tilt safe)
    let xf = {
        let mut c = vec![0.0; dim];
        for (l, p) in lambda.iter().zip(hull_points) {
            for (ci, pi) in c.iter_mut().zip(p.to_f64()) {
                *ci += l * pi;
            }
        }
        let cc = {
            let mut s = -c[0] * c[0];
            for v in &c[1..] {
                s += v * v;
            }
            s
        };
        c.iter().map(|v| v / (-cc).sqrt()).collect::<Vec<f64>>()
    };
    let x0f = x0.to_f64();
    let xdot = {
        let mut s = -xf[0] * x0f[0];
        for i in 1..dim {
            s += xf[i] * x0f[i];
        }
        s
    };
    let uf: Vec<f64> = x0f.iter().zip(&xf).map(|(a, b)| a + xdot * b).collect();
    let scale = uf.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-30);
    let u0 = LorentzVec::new(uf.iter().map(|&v| S::from_f64_approx(v / scale)).collect::<Vec<_>>());
    let mut eps = mink(&u0, x0.vec());
    if eps.sign() != Sign::Pos {
        return Err(ModelError::InsideHull);
    }
    for _ in 0..60 {
        eps = eps / S::from_int(2);
        let u = u0.add(&x0.vec().scale(&eps));
        let ok = mink(&u, x0.vec()).sign() == Sign::Pos
            && mink(&u, &u).sign() == Sign::Pos
            && hull_points.iter().all(|y| mink(&u, y.vec()).sign() == Sign::Neg);
        if ok {
            return Ok(AffinePlane::new(u, S::zero()));
        }
    }
    Err(ModelError::InsideHull)
}

/// Component of `x0` Lorentz-normal to the span of `basis`, exact.
fn projection_normal<S: GeomScalar>(
    basis: &[LorentzVec<S>],
    x0: &LorentzVec<S>,
    dim: usize,
) -> Option<LorentzVec<S>> {
    let gram: Vec<Vec<S>> = basis
        .iter()
        .map(|a| basis.iter().map(|b| mink(a, b)).collect())
        .collect();
    let rhs: Vec<S> = basis.iter().map(|b| mink(x0, b)).collect();
    let coeffs = linalg::solve(&gram, &rhs, EPS_NORM)?;
    let mut w = LorentzVec::zero(dim);
    for (a, b) in coeffs.iter().zip(basis) {
        w = w.add(&b.scale(a));
    }
    Some(x0.sub(&w))
}

/// Convex weights of the closest hull point, by projected gradient with
/// restarts from each vertex; tolerance 1e-12 on the objective.
fn closest_point_weights<S: GeomScalar>(hull_points: &[HPoint<S>], x0: &HPoint<S>) -> Vec<f64> {
    let pts: Vec<Vec<f64>> = hull_points.iter().map(|p| p.to_f64()).collect();
    let x0f = x0.to_f64();
    let dim = x0f.len();
    let m = pts.len();

    let combine = |lambda: &[f64]| -> Vec<f64> {
        let mut c = vec![0.0; dim];
        for (l, p) in lambda.iter().zip(&pts) {
            for i in 0..dim {
                c[i] += l * p[i];
            }
        }
        c
    };
    let mdot = |a: &[f64], b: &[f64]| -> f64 {
        let mut s = -a[0] * b[0];
        for i in 1..dim {
            s += a[i] * b[i];
        }
        s
    };
    // objective: cosh of the distance from x0 to the projected combination
    let objective = |lambda: &[f64]| -> f64 {
        let c = combine(lambda);
        let cc = mdot(&c, &c);
        -mdot(&x0f, &c) / (-cc).sqrt()
    };

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut starts: Vec<Vec<f64>> = vec![vec![1.0 / m as f64; m]];
    for i in 0..m {
        let mut s = vec![0.0; m];
        s[i] = 1.0;
        starts.push(s);
    }
    for mut lambda in starts {
        let mut step = 0.5;
        let mut f = objective(&lambda);
        for _ in 0..4000 {
            // numeric gradient on the simplex
            let mut grad = vec![0.0; m];
            let h = 1e-7;
            for i in 0..m {
                let mut lp = lambda.clone();
                lp[i] += h;
                let norm: f64 = lp.iter().sum();
                for v in lp.iter_mut() {
                    *v /= norm;
                }
                grad[i] = (objective(&lp) - f) / h;
            }
            let mut cand: Vec<f64> = lambda.iter().zip(&grad).map(|(l, g)| l - step * g).collect();
            project_simplex(&mut cand);
            let fc = objective(&cand);
            if fc < f - 1e-15 {
                lambda = cand;
                f = fc;
                step *= 1.2;
            } else {
                step *= 0.5;
                if step < 1e-12 {
                    break;
                }
            }
        }
        if best.as_ref().map_or(true, |(bf, _)| f < *bf) {
            best = Some((f, lambda));
        }
    }
    best.unwrap().1
}

fn project_simplex(v: &mut [f64]) {
    // Euclidean projection onto the probability simplex
    let n = v.len();
    let mut sorted: Vec<f64> = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cssv = 0.0;
    let mut rho = 0;
    for (i, &s) in sorted.iter().enumerate() {
        cssv += s;
        let t = (cssv - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            rho = i + 1;
        }
    }
    let cum: f64 = sorted[..rho].iter().sum();
    let theta = (cum - 1.0) / rho as f64;
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
    let s: f64 = v.iter().sum();
    if s > 0.0 {
        for x in v.iter_mut() {
            *x /= s;
        }
    } else {
        for x in v.iter_mut() {
            *x = 1.0 / n as f64;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rat};
    use proptest::prelude::*;

    fn hp(coords: &[(i64, i64)]) -> HPoint<Rat> {
        HPoint::from_vec(LorentzVec::new(coords.iter().map(|&(n, d)| rat(n, d)).collect()))
            .unwrap()
    }

    fn lv(coords: &[i64]) -> LorentzVec<Rat> {
        LorentzVec::from_ints(coords)
    }

    #[test]
    fn poincare_lift() {
        let p = ModelPoint::poincare(vec![rat(0, 1), rat(0, 1)]);
        assert_eq!(lift(&p).unwrap(), hp(&[(1, 1), (0, 1), (0, 1)]));
        let p = ModelPoint::poincare(vec![rat(1, 2), rat(0, 1)]);
        let x = lift(&p).unwrap();
        assert_eq!(x, hp(&[(5, 3), (4, 3), (0, 1)]));
        assert_eq!(mink(x.vec(), x.vec()), rat(-1, 1));
        assert!(lift(&ModelPoint::poincare(vec![rat(1, 1), rat(0, 1)])).is_err());
    }

    #[test]
    fn klein_lift() {
        let k = ModelPoint { model: Model::KleinBall, coords: vec![rat(0, 1), rat(0, 1)] };
        assert_eq!(lift(&k).unwrap(), hp(&[(1, 1), (0, 1), (0, 1)]));
        // 1 - |k|² = 16/25 is a rational square
        let k = ModelPoint { model: Model::KleinBall, coords: vec![rat(3, 5), rat(0, 1)] };
        assert_eq!(lift(&k).unwrap(), hp(&[(5, 4), (3, 4), (0, 1)]));
        // non-square norm is rejected in exact mode with a pointer to Poincare
        let k = ModelPoint { model: Model::KleinBall, coords: vec![rat(1, 2), rat(0, 1)] };
        assert!(matches!(lift(&k), Err(ModelError::ExactSqrt(_))));
        // but works in float mode
        let kf = ModelPoint::<f64> { model: Model::KleinBall, coords: vec![0.5, 0.0] };
        let x = lift(&kf).unwrap();
        assert!((mink(x.vec(), x.vec()) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn upper_half_plane_lift() {
        // i lifts to the basepoint
        let z = ModelPoint::<Rat> {
            model: Model::UpperHalfSpace,
            coords: vec![rat(0, 1), rat(1, 1)],
        };
        assert_eq!(lift(&z).unwrap(), hp(&[(1, 1), (0, 1), (0, 1)]));
        // rational input stays rational
        let z = ModelPoint::<Rat> {
            model: Model::UpperHalfSpace,
            coords: vec![rat(1, 2), rat(1, 3)],
        };
        let x = lift(&z).unwrap();
        assert_eq!(mink(x.vec(), x.vec()), rat(-1, 1));
        assert!(lift(&ModelPoint::<Rat> {
            model: Model::UpperHalfSpace,
            coords: vec![rat(0, 1), rat(-1, 1)],
        })
        .is_err());
    }

    #[test]
    fn projection_to_hyperboloid() {
        assert_eq!(
            project_to_hyperboloid(&lv(&[2, 0, 0])).unwrap(),
            hp(&[(1, 1), (0, 1), (0, 1)])
        );
        assert_eq!(
            project_to_hyperboloid(&lv(&[1, 0, 0])).unwrap(),
            hp(&[(1, 1), (0, 1), (0, 1)])
        );
        let x = LorentzVec::new(vec![rat(10, 3), rat(8, 3), rat(0, 1)]);
        assert_eq!(project_to_hyperboloid(&x).unwrap(), hp(&[(5, 3), (4, 3), (0, 1)]));
        assert!(project_to_hyperboloid(&lv(&[0, 1, 0])).is_err());
    }

    #[test]
    fn distances() {
        let o = hp(&[(1, 1), (0, 1), (0, 1)]);
        assert_eq!(dist(&o, &o), 0.0);
        let y = HPoint::<f64>::from_vec(LorentzVec::new(vec![
            1f64.cosh(),
            1f64.sinh(),
            0.0,
        ]))
        .unwrap();
        let of = HPoint::<f64>::from_vec(LorentzVec::new(vec![1.0, 0.0, 0.0])).unwrap();
        assert!((dist(&y, &of) - 1.0).abs() < 1e-12);
        // arccosh(5/3) = ln 3
        let p = lift(&ModelPoint::poincare(vec![rat(1, 2), rat(0, 1)])).unwrap();
        assert!((dist(&p, &o) - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn geodesic_endpoints_and_interior() {
        let x = HPoint::<f64>::from_vec(LorentzVec::new(vec![1.0, 0.0, 0.0])).unwrap();
        let y = HPoint::<f64>::from_vec(LorentzVec::new(vec![
            2f64.cosh(),
            2f64.sinh(),
            0.0,
        ]))
        .unwrap();
        let at = |t: f64| geodesic_point(&x, &y, t).unwrap();
        assert!(dist(&at(0.0), &x) < 1e-12);
        assert!(dist(&at(dist(&x, &y)), &y) < 1e-10);
        let mid = at(1.0);
        assert!((mid.to_f64()[0] - 1f64.cosh()).abs() < 1e-12);
        assert!((mid.to_f64()[1] - 1f64.sinh()).abs() < 1e-12);
        assert!(geodesic_point(&x, &x, 0.5).is_err());
    }

    #[test]
    fn horoball_ray_values() {
        let x = hp(&[(1, 1), (0, 1), (0, 1)]);
        let u = lv(&[1, 1, 0]);
        // t = 0
        assert_eq!(horoball_ray_exp(&x, &u, rat(1, 1)).unwrap(), x);
        // t = ln 2: e^{-t} x + sinh(t) u = (1/2,0,0) + (3/4)(1,1,0)
        let p = horoball_ray_exp(&x, &u, rat(2, 1)).unwrap();
        assert_eq!(p, hp(&[(5, 4), (3, 4), (0, 1)]));
        // pairing along the ray: output∘u = -e^{-t}
        let q = mink(p.vec(), &u);
        assert_eq!(q, rat(-1, 2));
        let xf = HPoint::<f64>::from_vec(LorentzVec::new(vec![1.0, 0.0, 0.0])).unwrap();
        let uf = LorentzVec::new(vec![1.0, 1.0, 0.0]);
        let p1 = horoball_ray(&xf, &uf, 1.0).unwrap();
        assert!((mink(p1.vec(), &uf) + (-1f64).exp()).abs() < 1e-12);
        // wrong pairing is rejected
        let bad = hp(&[(5, 3), (4, 3), (0, 1)]);
        assert!(horoball_ray_exp(&bad, &u, rat(2, 1)).is_err());
    }

    #[test]
    fn classify_metric_sphere_symmetric_triple() {
        // rational triple equidistant from (1,0,0): x0 = 5/4, radius arccosh(5/4) = ln 2
        let pts = vec![
            hp(&[(5, 4), (3, 4), (0, 1)]),
            hp(&[(5, 4), (-9, 20), (3, 5)]),
            hp(&[(5, 4), (-9, 20), (-3, 5)]),
        ];
        let s = classify_hypersphere(&pts).unwrap();
        assert_eq!(s.kind(), SphereKind::Metric);
        let c = s.center_f64().unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12 && c[1].abs() < 1e-12 && c[2].abs() < 1e-12);
        assert!((s.radius().unwrap() - 2f64.ln()).abs() < 1e-12);
        assert_eq!(s.cosh_radius_sq().unwrap(), rat(25, 16));
    }

    #[test]
    fn classify_metric_sphere_float_circle() {
        // points at hyperbolic distance 1 around the basepoint
        let mut pts = Vec::new();
        for theta in [0.0f64, 2.0943951023931953, 4.1887902047863905] {
            pts.push(
                HPoint::<f64>::from_vec(LorentzVec::new(vec![
                    1f64.cosh(),
                    1f64.sinh() * theta.cos(),
                    1f64.sinh() * theta.sin(),
                ]))
                .unwrap(),
            );
        }
        let s = classify_hypersphere(&pts).unwrap();
        assert_eq!(s.kind(), SphereKind::Metric);
        assert!((s.radius().unwrap() - 1.0).abs() < 1e-9);
        let c = s.center_f64().unwrap();
        assert!((c[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn classify_horosphere_fixture() {
        let pts = vec![
            hp(&[(1, 1), (0, 1), (0, 1)]),
            hp(&[(3, 2), (1, 2), (1, 1)]),
            hp(&[(3, 2), (1, 2), (-1, 1)]),
        ];
        let s = classify_hypersphere(&pts).unwrap();
        match &s {
            Circumsphere::Horosphere { ideal } => {
                assert_eq!(*ideal, lv(&[1, 1, 0]));
            }
            other => panic!("expected horosphere, got {other:?}"),
        }
        for p in &pts {
            assert!(s.on_sphere(p.vec()));
        }
    }

    #[test]
    fn classify_equidistant_fixture() {
        // rational points on the plane {x2 = 1}: a² - b² = 2
        let pts = vec![
            hp(&[(3, 2), (1, 2), (1, 1)]),
            hp(&[(3, 2), (-1, 2), (1, 1)]),
            hp(&[(11, 6), (7, 6), (1, 1)]),
        ];
        let s = classify_hypersphere(&pts).unwrap();
        assert_eq!(s.kind(), SphereKind::Equidistant);
        // cosh² d = 1 + u∘u = 2, i.e. d = arccosh(√2)
        assert_eq!(s.cosh_equidistant_sq().unwrap(), rat(2, 1));
        assert!((s.equidistant_distance().unwrap() - 2f64.sqrt().acosh()).abs() < 1e-12);
    }

    #[test]
    fn classify_rejects_degenerate_input() {
        let pts = vec![hp(&[(1, 1), (0, 1), (0, 1)]), hp(&[(5, 3), (4, 3), (0, 1)])];
        assert!(matches!(
            classify_hypersphere(&pts),
            Err(ModelError::AffinelyDependent { .. })
        ));
    }

    #[test]
    fn classify_totally_geodesic_plane() {
        // three points whose affine hull passes through the origin:
        // base (1,0,0) plus points on the x0x1 geodesic... the span of the
        // geodesic through (1,0,0) and (5/4,3/4,0) is {x2=0}, and a third
        // point in that plane keeps the affine hull linear
        let pts = vec![
            hp(&[(1, 1), (0, 1), (0, 1)]),
            hp(&[(5, 4), (3, 4), (0, 1)]),
            hp(&[(5, 4), (-3, 4), (0, 1)]),
        ];
        let s = classify_hypersphere(&pts).unwrap();
        assert_eq!(s.kind(), SphereKind::TotallyGeodesic);
    }

    #[test]
    fn convex_side_three_cases() {
        // metric ball about the basepoint
        let plane = AffinePlane::new(lv(&[1, 0, 0]), rat(-5, 3));
        match convex_side(&plane).unwrap() {
            ConvexSide::Single(h) => {
                assert_eq!(h.side, Side::Geq);
                assert!(h.contains(&lv(&[1, 0, 0])));
                // a far point is outside the ball
                assert!(!h.contains(hp(&[(25, 7), (24, 7), (0, 1)]).vec()));
            }
            _ => panic!(),
        }
        // horoball
        let plane = AffinePlane::new(lv(&[1, 1, 0]), rat(-1, 1));
        match convex_side(&plane).unwrap() {
            ConvexSide::Single(h) => {
                assert_eq!(h.side, Side::Geq);
                assert!(h.contains(&lv(&[1, 0, 0])));
            }
            _ => panic!(),
        }
        // equidistant side {x∘u <= u∘u} with u = (0,0,1)
        let plane = AffinePlane::new(lv(&[0, 0, 1]), rat(1, 1));
        match convex_side(&plane).unwrap() {
            ConvexSide::Single(h) => {
                assert_eq!(h.side, Side::Leq);
                assert_eq!(h.plane.offset, rat(1, 1));
                assert!(h.contains(&lv(&[1, 0, 0])));
            }
            _ => panic!(),
        }
        // plane through 0 with time-like parallel subspace: both sides
        let plane = AffinePlane::new(lv(&[0, 0, 1]), rat(0, 1));
        assert!(matches!(convex_side(&plane).unwrap(), ConvexSide::BothTotallyGeodesic(_)));
        // plane missing the hyperboloid
        let plane = AffinePlane::new(lv(&[1, 0, 0]), rat(1, 2));
        assert!(convex_side(&plane).is_err());
    }

    #[test]
    fn separating_plane_fixture() {
        let c = vec![hp(&[(1, 1), (0, 1), (0, 1)])];
        let x0 = hp(&[(5, 3), (4, 3), (0, 1)]);
        let plane = separating_plane(&c, &x0).unwrap();
        // normal from the closest-point construction: u = x0 + (x∘x0)x = (0, 4/3, 0)
        assert_eq!(plane.normal, LorentzVec::new(vec![rat(0, 1), rat(4, 3), rat(0, 1)]));
        assert_eq!(mink(&plane.normal, c[0].vec()).sign(), Sign::Zero);
        assert_eq!(mink(&plane.normal, x0.vec()).sign(), Sign::Pos);
        // same point is rejected
        assert!(separating_plane(&c, &c[0].clone()).is_err());
    }

    #[test]
    fn separating_plane_mirror_symmetry() {
        // two points on the x1-axis geodesic, outside point mirror-symmetric
        let c = vec![hp(&[(5, 4), (3, 4), (0, 1)]), hp(&[(5, 3), (-4, 3), (0, 1)])];
        let x0 = lift(&ModelPoint::poincare(vec![rat(0, 1), rat(1, 2)])).unwrap();
        let plane = separating_plane(&c, &x0).unwrap();
        for y in &c {
            assert!(mink(&plane.normal, y.vec()).sign() != Sign::Pos);
        }
        assert_eq!(mink(&plane.normal, x0.vec()).sign(), Sign::Pos);
        // closest point interior to the segment: the separator is exactly
        // the axis plane {x2 = 0}
        assert_eq!(plane.normal.coords[0], rat(0, 1));
        assert_eq!(plane.normal.coords[1], rat(0, 1));
        assert!(plane.normal.coords[2].sign() == Sign::Pos);
    }

    #[test]
    fn level_shift_formula() {
        assert_eq!(horosphere_level_shift(&rat(-1, 1)).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let k = Rat::from_f64_approx(-1.0 / e);
        assert!((horosphere_level_shift(&k).unwrap() - 1.0).abs() < 1e-9);
        // signed extension: k = -2 gives -ln 2
        assert!((horosphere_level_shift(&rat(-2, 1)).unwrap() + 2f64.ln()).abs() < 1e-12);
        assert!(horosphere_level_shift(&rat(1, 2)).is_err());
    }

    #[test]
    fn chart_fixture_and_chord_law() {
        let x0 = hp(&[(1, 1), (0, 1), (0, 1)]);
        let u = lv(&[1, 1, 0]);
        let z = LorentzVec::zero(3);
        assert_eq!(horosphere_chart(&x0, &u, &z).unwrap(), x0);
        let v = lv(&[0, 0, 1]);
        let f = horosphere_chart(&x0, &u, &v).unwrap();
        assert_eq!(f, hp(&[(3, 2), (1, 2), (1, 1)]));
        // chord law at v=0, w=(0,0,1): -F(0)∘F(w) - 1 = 1/2
        let lhs = -mink(x0.vec(), f.vec()) - rat(1, 1);
        assert_eq!(lhs, rat(1, 2));
        // constraint violations reported
        assert!(horosphere_chart(&x0, &u, &lv(&[0, 1, 0])).is_err());
    }

    #[test]
    fn horoball_intersection_cases() {
        let u = lv(&[1, 1, 0]);
        // tangency: u∘u' = -2 gives radius 0 at the basepoint
        match horoball_intersection(&u, &lv(&[1, -1, 0])).unwrap() {
            HoroballMeet::Ball { center, cosh_radius } => {
                assert_eq!(center, hp(&[(1, 1), (0, 1), (0, 1)]));
                assert_eq!(cosh_radius, rat(1, 1));
            }
            _ => panic!("expected tangency"),
        }
        // u∘u' = -4: r0 = -3/4 > -1, empty
        assert_eq!(
            horoball_intersection(&u, &lv(&[2, -2, 0])).unwrap(),
            HoroballMeet::Empty
        );
        // u∘u' = -1: radius arccosh(3/2)
        let u2 = LorentzVec::new(vec![rat(1, 2), rat(-1, 2), rat(0, 1)]);
        match horoball_intersection(&u, &u2).unwrap() {
            HoroballMeet::Ball { cosh_radius, .. } => assert_eq!(cosh_radius, rat(3, 2)),
            _ => panic!("expected a ball"),
        }
        // proportional inputs rejected
        assert!(horoball_intersection(&u, &lv(&[2, 2, 0])).is_err());
    }

    fn small_rat() -> impl Strategy<Value = Rat> {
        (-8i64..=8, 1i64..=8).prop_map(|(n, d)| rat(n, d))
    }

    fn poincare_point() -> impl Strategy<Value = Vec<Rat>> {
        ((-9i64..=9, 12i64..=20), (-9i64..=9, 12i64..=20))
            .prop_map(|((a, b), (c, d))| vec![rat(a, b * 2), rat(c, d * 2)])
    }

    proptest! {
        #[test]
        fn poincare_round_trip(p in poincare_point()) {
            let x = lift(&ModelPoint::poincare(p.clone())).unwrap();
            prop_assert_eq!(x.to_poincare(), p);
        }

        #[test]
        fn geodesic_additivity(pa in poincare_point(), pb in poincare_point(),
                               s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let a = lift(&ModelPoint::poincare(pa)).unwrap();
            let b = lift(&ModelPoint::poincare(pb)).unwrap();
            prop_assume!(a != b);
            let af = HPoint::<f64>::from_vec(LorentzVec::new(a.to_f64())).unwrap();
            let bf = HPoint::<f64>::from_vec(LorentzVec::new(b.to_f64())).unwrap();
            let d = dist(&af, &bf);
            prop_assume!(d > 1e-6);
            let ps = geodesic_point(&af, &bf, s * d).unwrap();
            let pt = geodesic_point(&af, &bf, t * d).unwrap();
            prop_assert!((dist(&ps, &pt) - (s - t).abs() * d).abs() < 1e-10);
        }

        #[test]
        fn chord_law_random(a in small_rat(), b in small_rat()) {
            // horosphere through the basepoint with ideal vector (1,1,0);
            // admissible offsets are multiples of (0,0,1)
            let x0 = hp(&[(1, 1), (0, 1), (0, 1)]);
            let u = lv(&[1, 1, 0]);
            let va = lv(&[0, 0, 1]).scale(&a);
            let vb = lv(&[0, 0, 1]).scale(&b);
            let fa = horosphere_chart(&x0, &u, &va).unwrap();
            let fb = horosphere_chart(&x0, &u, &vb).unwrap();
            let lhs = -mink(fa.vec(), fb.vec()) - rat(1, 1);
            let dvec = va.sub(&vb);
            let rhs = mink(&dvec, &dvec) / rat(2, 1);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn convexity_of_half_space(pa in poincare_point(), pb in poincare_point(),
                                   t in 0.0f64..1.0) {
            // ratatouille-style check: points of the metric ball stay in it
            // along geodesics
            let plane = AffinePlane::new(LorentzVec::<f64>::new(vec![1.0, 0.0, 0.0]), -1.8);
            let ConvexSide::Single(h) = convex_side(&plane).unwrap() else { panic!() };
            let a = lift(&ModelPoint::<f64>::poincare(
                pa.iter().map(|v| v.to_f64() * 0.4).collect())).unwrap();
            let b = lift(&ModelPoint::<f64>::poincare(
                pb.iter().map(|v| v.to_f64() * 0.4).collect())).unwrap();
            prop_assume!(h.contains(a.vec()) && h.contains(b.vec()));
            prop_assume!(a != b);
            let d = dist(&a, &b);
            prop_assume!(d > 1e-9);
            let p = geodesic_point(&a, &b, t * d).unwrap();
            let v = h.plane.eval(p.vec());
            prop_assert!(v > -1e-9);
        }

        #[test]
        fn ratatouille_projection_lands_convex_side(pa in poincare_point(), w in 0.01f64..0.99) {
            // sample a point of P ∩ U_{n+1} on the segment between two lifted
            // points of the plane's hypersphere, project, check the inequality
            let x0 = hp(&[(1, 1), (0, 1), (0, 1)]);
            let u = lv(&[1, 1, 0]);
            let va = LorentzVec::new(vec![rat(0,1), rat(0,1), rat(1,1)])
                .scale(&pa[0]);
            let fa = horosphere_chart(&x0, &u, &va).unwrap();
            // segment between x0 and fa lies in the plane {x∘u = -1}
            let wr = Rat::from_f64_approx(w);
            let mix = x0.vec().scale(&(rat(1, 1) - wr.clone())).add(&fa.vec().scale(&wr));
            if mink(&mix, &mix).sign() == Sign::Neg {
                let proj = project_to_hyperboloid(&LorentzVec::<f64>::new(
                    mix.to_f64().iter().map(|v| *v).collect())).unwrap();
                // convex side of {x∘u = -1} is the horoball {x∘u >= -1}
                let val = mink(proj.vec(), &LorentzVec::new(u.to_f64()));
                prop_assert!(val >= -1.0 - 1e-10);
            }
        }
    }
}
