//! Lorentzian linear algebra: the bilinear form `x∘y = -x0*y0 + Σ xi*yi`,
//! causal classification of vectors and subspaces, and orthogonal
//! complements of hyperplanes.

use thiserror::Error;

use crate::linalg;
use crate::scalar::{GeomScalar, Sign};

/// Comparison epsilon for float-mode causal classification, applied to
/// `v∘v` normalized by the squared Euclidean norm.
pub const EPS_CLASSIFY: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LorentzError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("degenerate basis: rank {rank} < expected {expected}")]
    DegenerateBasis { rank: usize, expected: usize },
    #[error("empty subspace")]
    EmptySubspace,
}

/// Causal type of a vector or subspace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CausalClass {
    TimeLike,
    LightLike,
    SpaceLike,
    /// The zero vector only; never silently light-like.
    Zero,
}

/// A vector of `R^{n+1}` carrying the Lorentz form as its ambient pairing.
#[derive(Debug, Clone, PartialEq)]
pub struct LorentzVec<S> {
    pub coords: Vec<S>,
}

impl<S: GeomScalar> LorentzVec<S> {
    pub fn new(coords: Vec<S>) -> Self {
        LorentzVec { coords }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        LorentzVec { coords: coords.iter().map(|&c| S::from_int(c)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn zero(dim: usize) -> Self {
        LorentzVec { coords: vec![S::zero(); dim] }
    }

    pub fn scale(&self, s: &S) -> Self {
        LorentzVec { coords: self.coords.iter().map(|c| c.clone() * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        LorentzVec {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        LorentzVec {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a.clone() - b).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        LorentzVec { coords: self.coords.iter().map(|c| -c.clone()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.sign() == Sign::Zero)
    }

    /// The bar involution of the Euclidean/Lorentz conversion: negate the
    /// spatial entries, so that `bar(η)∘v = -η·v`.
    pub fn bar(&self) -> Self {
        let mut coords = self.coords.clone();
        for c in coords.iter_mut().skip(1) {
            *c = -c.clone();
        }
        LorentzVec { coords }
    }

    /// Euclidean inner product (used for hull bookkeeping).
    pub fn euclid_dot(&self, other: &Self) -> S {
        assert_eq!(self.dim(), other.dim());
        let mut acc = S::zero();
        for (a, b) in self.coords.iter().zip(&other.coords) {
            acc = acc + a.clone() * b;
        }
        acc
    }

    pub fn euclid_norm_sq(&self) -> S {
        self.euclid_dot(self)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|c| c.to_f64()).collect()
    }
}

/// The Lorentz form `-x0*y0 + x1*y1 + ... + xn*yn`.
pub fn minkowski<S: GeomScalar>(x: &LorentzVec<S>, y: &LorentzVec<S>) -> Result<S, LorentzError> {
    if x.dim() != y.dim() {
        return Err(LorentzError::DimensionMismatch(x.dim(), y.dim()));
    }
    Ok(mink(x, y))
}

/// Unchecked Lorentz pairing for internal call sites with known dimensions.
pub fn mink<S: GeomScalar>(x: &LorentzVec<S>, y: &LorentzVec<S>) -> S {
    debug_assert_eq!(x.dim(), y.dim());
    let mut acc = -(x.coords[0].clone() * &y.coords[0]);
    for i in 1..x.dim() {
        acc = acc + x.coords[i].clone() * &y.coords[i];
    }
    acc
}

/// Causal classification of a single vector by the sign of `v∘v`. Float
/// mode compares `v∘v / |v|²` against [`EPS_CLASSIFY`].
pub fn classify_vector<S: GeomScalar>(v: &LorentzVec<S>) -> CausalClass {
    if v.is_zero() {
        return CausalClass::Zero;
    }
    let q = mink(v, v);
    let sign = if S::EXACT {
        q.sign()
    } else {
        q.sign_within(EPS_CLASSIFY, &v.euclid_norm_sq())
    };
    match sign {
        Sign::Neg => CausalClass::TimeLike,
        Sign::Zero => CausalClass::LightLike,
        Sign::Pos => CausalClass::SpaceLike,
    }
}

/// A linear subspace spanned by an independent basis.
#[derive(Debug, Clone)]
pub struct Subspace<S> {
    pub basis: Vec<LorentzVec<S>>,
}

impl<S: GeomScalar> Subspace<S> {
    /// Builds the subspace, verifying linear independence.
    pub fn new(basis: Vec<LorentzVec<S>>, eps: f64) -> Result<Self, LorentzError> {
        if basis.is_empty() {
            return Err(LorentzError::EmptySubspace);
        }
        let rows: Vec<Vec<S>> = basis.iter().map(|v| v.coords.clone()).collect();
        let r = linalg::rank(&rows, eps);
        if r < basis.len() {
            return Err(LorentzError::DegenerateBasis { rank: r, expected: basis.len() });
        }
        Ok(Subspace { basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis[0].dim()
    }

    /// Gram matrix of the basis under the Lorentz form.
    pub fn gram(&self) -> Vec<Vec<S>> {
        let k = self.basis.len();
        let mut g = vec![vec![S::zero(); k]; k];
        for i in 0..k {
            for j in i..k {
                let v = mink(&self.basis[i], &self.basis[j]);
                g[i][j] = v.clone();
                g[j][i] = v;
            }
        }
        g
    }
}

/// Classification of a subspace: time-like iff it contains a time-like
/// vector (iff it meets `H^n` after scaling), light-like iff it is not
/// time-like but touches the light cone, space-like otherwise. Decided by
/// the inertia of the Gram matrix.
pub fn classify_subspace<S: GeomScalar>(v: &Subspace<S>, eps: f64) -> CausalClass {
    let (neg, zero, _pos) = linalg::inertia(&v.gram(), eps);
    if neg > 0 {
        CausalClass::TimeLike
    } else if zero > 0 {
        CausalClass::LightLike
    } else {
        CausalClass::SpaceLike
    }
}

/// Generator of the Lorentz-orthogonal complement of a hyperplane
/// (an `n`-dimensional subspace of `R^{n+1}`), normalized so its first
/// nonzero coordinate is positive.
///
/// The defining system `v_i∘u = 0` is solved as a kernel computation, which
/// covers the space-like, light-like (where `u` lies inside the subspace)
/// and time-like cases uniformly.
pub fn orthogonal_complement<S: GeomScalar>(
    v: &Subspace<S>,
    eps: f64,
) -> Result<LorentzVec<S>, LorentzError> {
    let ambient = v.ambient_dim();
    if v.dim() + 1 != ambient {
        return Err(LorentzError::DegenerateBasis { rank: v.dim(), expected: ambient - 1 });
    }
    // rows of the system: bar(v_i), since bar(v)·u = ... = v∘u
    let rows: Vec<Vec<S>> = v.basis.iter().map(|b| b.bar().coords).collect();
    let r = linalg::rank(&rows, eps);
    if r < v.dim() {
        return Err(LorentzError::DegenerateBasis { rank: r, expected: v.dim() });
    }
    let k = linalg::kernel_vector(&rows, eps)
        .ok_or(LorentzError::DegenerateBasis { rank: r, expected: v.dim() })?;
    Ok(LorentzVec::new(k))
}
