//! From-scratch incremental convex hull in `R^d` with exact-sign
//! predicates, coplanar-facet merging into polytopal faces, and full
//! face-lattice extraction.
//!
//! Inputs must affinely span either the whole ambient space (full mode) or
//! a hyperplane missing the origin (flat mode, where the hull itself is a
//! polytope inside that hyperplane and every face is visible). Lower
//! ranks are reported so callers can recurse inside the linear span, which
//! is what the tessellation layer does.

mod incremental;
mod lattice;

use thiserror::Error;

use crate::linalg;
use crate::lorentz::LorentzVec;
use crate::scalar::{GeomScalar, Sign};

pub use lattice::is_subset;

/// Float-mode epsilon for visibility / containment sign tests.
pub const EPS_VISIBLE: f64 = 1e-9;
/// Float-mode epsilon for coplanarity merging.
pub const EPS_MERGE: f64 = 1e-9;
/// Float-mode epsilon for duplicate-point removal.
pub const EPS_DEDUP: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HullError {
    #[error("fewer than 2 distinct points")]
    TooFewPoints,
    #[error("input points affinely span only rank {rank}; reduce to the span first")]
    RankDeficient { rank: usize },
    #[error("degenerate facet encountered")]
    DegenerateFacet,
    #[error("face is not visible")]
    NotVisible,
    #[error("dimension above the practical cap (9)")]
    DimensionCap,
}

#[derive(Debug, Clone, Copy)]
pub struct HullOptions {
    /// Seed of the insertion-order permutation.
    pub seed: u64,
    pub eps_visible: f64,
    pub eps_merge: f64,
    pub eps_dedup: f64,
}

impl Default for HullOptions {
    fn default() -> Self {
        HullOptions { seed: 0, eps_visible: EPS_VISIBLE, eps_merge: EPS_MERGE, eps_dedup: EPS_DEDUP }
    }
}

/// A merged (possibly polytopal) boundary facet with its support plane
/// `{x : normal·x = offset}` (Euclidean normal, all points `<= offset`).
#[derive(Debug, Clone)]
pub struct MergedFacet<S> {
    pub vertices: Vec<usize>,
    pub normal: LorentzVec<S>,
    pub offset: S,
    /// The simplicial facets this face was merged from.
    pub simplices: Vec<Vec<usize>>,
}

/// A face of the hull's boundary lattice (flat mode additionally carries
/// the hull itself as the unique top face).
#[derive(Debug, Clone)]
pub struct HullFace {
    pub id: usize,
    pub dim: usize,
    /// Sorted ascending indices into the deduplicated point list.
    pub vertices: Vec<usize>,
    /// Merged facets containing this face (empty for the flat top face).
    pub facet_ids: Vec<usize>,
    pub parents: Vec<usize>,
    pub children: Vec<usize>,
    /// Visible from the origin: some support plane strictly separates the
    /// origin from the point set and touches the hull exactly here.
    pub visible: bool,
}

#[derive(Debug)]
pub struct Hull<S> {
    /// Deduplicated points the combinatorics refer to.
    pub points: Vec<LorentzVec<S>>,
    /// Map from original input index to deduplicated index.
    pub dedup_map: Vec<usize>,
    pub duplicate_count: usize,
    pub dim: usize,
    /// Flat mode: points affinely span a hyperplane missing the origin.
    pub flat: bool,
    /// Affine hull plane in flat mode, oriented with negative offset.
    pub flat_plane: Option<(LorentzVec<S>, S)>,
    pub facets: Vec<MergedFacet<S>>,
    pub faces: Vec<HullFace>,
    eps_visible: f64,
}

impl<S: GeomScalar> Hull<S> {
    pub fn visible_faces(&self) -> impl Iterator<Item = &HullFace> {
        self.faces.iter().filter(|f| f.visible)
    }

    pub fn face_by_vertices(&self, vertices: &[usize]) -> Option<&HullFace> {
        self.faces.iter().find(|f| f.vertices == vertices)
    }

    /// A strictly separating support plane touching the hull exactly in
    /// `face`: the facet's own plane for facets, a positive blend of the
    /// containing facets' planes otherwise. Returned as Euclidean
    /// `(normal, offset)` with the points on the `<= offset` side and the
    /// origin strictly above.
    pub fn face_support_plane(&self, face_id: usize) -> Result<(LorentzVec<S>, S), HullError> {
        let face = &self.faces[face_id];
        if !face.visible {
            return Err(HullError::NotVisible);
        }
        if self.flat {
            return self.flat_support_plane(face);
        }
        // single containing facet: its own plane
        let visible_fid = face
            .facet_ids
            .iter()
            .copied()
            .find(|&fid| offset_visible::<S>(&self.facets[fid].offset, self.eps_visible))
            .ok_or(HullError::NotVisible)?;
        if face.facet_ids.len() == 1 {
            let f = &self.facets[visible_fid];
            return Ok((f.normal.clone(), f.offset.clone()));
        }
        // blend: full weight on a visible facet, a small positive weight on
        // the rest keeps contact exactly on this face while the offset
        // stays negative
        let base = &self.facets[visible_fid];
        let mut others: Vec<&MergedFacet<S>> = face
            .facet_ids
            .iter()
            .filter(|&&fid| fid != visible_fid)
            .map(|&fid| &self.facets[fid])
            .collect();
        others.truncate(64);
        let mut pos_sum = S::one();
        for f in &others {
            if f.offset.sign() == Sign::Pos {
                pos_sum = pos_sum + &f.offset;
            }
        }
        let mut t = -base.offset.clone() / (S::from_int(2) * pos_sum);
        for _ in 0..80 {
            let mut normal = base.normal.clone();
            let mut offset = base.offset.clone();
            for f in &others {
                normal = normal.add(&f.normal.scale(&t));
                offset = offset + t.clone() * &f.offset;
            }
            if self.verify_support(face, &normal, &offset) {
                return Ok((normal, offset));
            }
            t = t / S::from_int(2);
        }
        Err(HullError::DegenerateFacet)
    }

    fn verify_support(&self, face: &HullFace, normal: &LorentzVec<S>, offset: &S) -> bool {
        if offset.sign() != Sign::Neg {
            return false;
        }
        for (i, p) in self.points.iter().enumerate() {
            let s = (normal.euclid_dot(p) - offset.clone()).sign();
            let on_face = face.vertices.binary_search(&i).is_ok();
            match (on_face, s) {
                (true, Sign::Zero) => {}
                (false, Sign::Neg) => {}
                _ => return false,
            }
        }
        true
    }

    /// Flat mode: planes through the face inside the pencil spanned by the
    /// affine hull plane and the summed in-hyperplane support functionals
    /// of the containing reduced facets.
    fn flat_support_plane(&self, face: &HullFace) -> Result<(LorentzVec<S>, S), HullError> {
        let (plane_n, plane_c) = self.flat_plane.as_ref().expect("flat hull");
        if face.vertices.len() == self.points.len() {
            // the top face: the affine hull itself
            return Ok((plane_n.clone(), plane_c.clone()));
        }
        if face.facet_ids.is_empty() {
            return Err(HullError::DegenerateFacet);
        }
        let mut w = LorentzVec::zero(self.dim);
        let mut b = S::zero();
        for &fid in &face.facet_ids {
            w = w.add(&self.facets[fid].normal);
            b = b + &self.facets[fid].offset;
        }
        let mut t = S::one();
        for _ in 0..120 {
            let normal = plane_n.add(&w.scale(&t));
            let offset = plane_c.clone() + t.clone() * &b;
            if self.verify_support(face, &normal, &offset) {
                return Ok((normal, offset));
            }
            t = t / S::from_int(2);
        }
        Err(HullError::DegenerateFacet)
    }
}

fn offset_visible<S: GeomScalar>(offset: &S, eps: f64) -> bool {
    if S::EXACT {
        offset.sign() == Sign::Neg
    } else {
        offset.sign_within(eps, &S::one()) == Sign::Neg
    }
}

/// Build the convex hull of `points` in `R^dim`, returning the merged
/// boundary facets and the full face lattice with visibility flags.
pub fn build_hull<S: GeomScalar>(
    input: &[LorentzVec<S>],
    dim: usize,
    opts: &HullOptions,
) -> Result<Hull<S>, HullError> {
    if dim > 9 {
        return Err(HullError::DimensionCap);
    }
    // deduplicate
    let mut points: Vec<LorentzVec<S>> = Vec::new();
    let mut dedup_map: Vec<usize> = Vec::with_capacity(input.len());
    for p in input {
        assert_eq!(p.dim(), dim, "point dimension mismatch");
        let found = points.iter().position(|q| {
            if S::EXACT {
                q == p
            } else {
                q.sub(p).to_f64().iter().map(|v| v * v).sum::<f64>().sqrt() < opts.eps_dedup
            }
        });
        match found {
            Some(i) => dedup_map.push(i),
            None => {
                points.push(p.clone());
                dedup_map.push(points.len() - 1);
            }
        }
    }
    let duplicate_count = input.len() - points.len();
    if points.len() < 2 {
        return Err(HullError::TooFewPoints);
    }

    // affine rank
    let ids: Vec<usize> = (0..points.len()).collect();
    let arank = lattice::affine_rank(&points, &ids, opts.eps_visible);
    if arank == dim {
        build_full(points, dedup_map, duplicate_count, dim, opts)
    } else if arank + 1 == dim {
        // hyperplane: flat iff the origin is outside the affine hull
        let base = &points[0];
        let mut rows: Vec<Vec<S>> =
            points[1..].iter().map(|p| p.sub(base).coords.clone()).collect();
        rows.push(base.coords.clone());
        if linalg::rank(&rows, opts.eps_visible) == dim {
            build_flat(points, dedup_map, duplicate_count, dim, opts)
        } else {
            Err(HullError::RankDeficient { rank: arank })
        }
    } else {
        Err(HullError::RankDeficient { rank: arank })
    }
}

fn build_full<S: GeomScalar>(
    points: Vec<LorentzVec<S>>,
    dedup_map: Vec<usize>,
    duplicate_count: usize,
    dim: usize,
    opts: &HullOptions,
) -> Result<Hull<S>, HullError> {
    let facets = if dim == 1 {
        segment_facets(&points)
    } else {
        let simpl = incremental::build(&points, dim, opts.seed, opts.eps_visible)?;
        lattice::merge_facets(&simpl, opts.eps_merge)
    };
    let mut faces = lattice::face_lattice(&facets, &points, opts.eps_visible)?;
    // a face is visible iff some containing merged facet strictly
    // separates the origin from the points (offset < 0)
    for face in faces.iter_mut() {
        face.visible = face
            .facet_ids
            .iter()
            .any(|&fid| offset_visible::<S>(&facets[fid].offset, opts.eps_visible));
    }
    Ok(Hull {
        points,
        dedup_map,
        duplicate_count,
        dim,
        flat: false,
        flat_plane: None,
        facets,
        faces,
        eps_visible: opts.eps_visible,
    })
}

fn segment_facets<S: GeomScalar>(points: &[LorentzVec<S>]) -> Vec<MergedFacet<S>> {
    // R^1: the two extreme points, planes x <= max and -x <= -min
    let mut lo = 0;
    let mut hi = 0;
    for (i, p) in points.iter().enumerate() {
        if p.coords[0] < points[lo].coords[0] {
            lo = i;
        }
        if p.coords[0] > points[hi].coords[0] {
            hi = i;
        }
    }
    vec![
        MergedFacet {
            vertices: vec![lo],
            normal: LorentzVec::new(vec![-S::one()]),
            offset: -points[lo].coords[0].clone(),
            simplices: vec![vec![lo]],
        },
        MergedFacet {
            vertices: vec![hi],
            normal: LorentzVec::new(vec![S::one()]),
            offset: points[hi].coords[0].clone(),
            simplices: vec![vec![hi]],
        },
    ]
}

fn build_flat<S: GeomScalar>(
    points: Vec<LorentzVec<S>>,
    dedup_map: Vec<usize>,
    duplicate_count: usize,
    dim: usize,
    opts: &HullOptions,
) -> Result<Hull<S>, HullError> {
    // affine hull plane, oriented with negative offset (the origin side is
    // the empty convex side for the projected tessellation)
    let base = &points[0];
    let diff_rows: Vec<Vec<S>> = points[1..].iter().map(|p| p.sub(base).coords.clone()).collect();
    let nvec = linalg::kernel_vector(&collect_basis(&diff_rows, opts.eps_visible), opts.eps_visible)
        .ok_or(HullError::DegenerateFacet)?;
    let mut normal = LorentzVec::new(nvec);
    if !S::EXACT {
        let n = normal.to_f64().iter().map(|v| v * v).sum::<f64>().sqrt();
        normal = normal.scale(&S::from_f64_approx(1.0 / n));
    }
    let mut offset = normal.euclid_dot(base);
    if offset.sign() == Sign::Pos {
        normal = normal.neg();
        offset = -offset;
    }

    // coordinates inside the hyperplane
    let mut basis_rows: Vec<Vec<S>> = Vec::new();
    for r in &diff_rows {
        basis_rows.push(r.clone());
        if linalg::rank(&basis_rows, opts.eps_visible) != basis_rows.len() {
            basis_rows.pop();
        }
        if basis_rows.len() == dim - 1 {
            break;
        }
    }
    // columns of E are the basis vectors; coords solve E c = p - base
    let e_cols = basis_rows; // each row is one basis vector
    let reduced: Vec<LorentzVec<S>> = points
        .iter()
        .map(|p| {
            let rhs = p.sub(base).coords;
            // assemble the dim x (dim-1) system rows
            let a: Vec<Vec<S>> =
                (0..dim).map(|i| e_cols.iter().map(|b| b[i].clone()).collect()).collect();
            let c = linalg::solve_consistent(&a, &rhs, opts.eps_visible)
                .expect("points lie in their own affine hull");
            LorentzVec::new(c)
        })
        .collect();

    let inner = build_hull(&reduced, dim - 1, opts)?;
    debug_assert!(!inner.flat, "reduced flat hull must be full-rank");

    // map the reduced facet planes back to ambient support functionals:
    // for a reduced plane (δ, e), the ambient w = Mᵀδ with M the dual basis
    // satisfies w·x - b = δ·coords(x) - e on the hyperplane
    let gram: Vec<Vec<S>> = e_cols
        .iter()
        .map(|a| e_cols.iter().map(|b| dot(a, b)).collect())
        .collect();
    let mut dual_rows: Vec<Vec<S>> = Vec::new(); // rows of M
    {
        // columns of M solve gram * M = Eᵀ; assemble row-wise afterwards
        let mut cols: Vec<Vec<S>> = Vec::new();
        for k in 0..dim {
            let rhs: Vec<S> = e_cols.iter().map(|b| b[k].clone()).collect();
            let col = linalg::solve(&gram, &rhs, opts.eps_visible)
                .ok_or(HullError::DegenerateFacet)?;
            cols.push(col);
        }
        for i in 0..dim - 1 {
            dual_rows.push((0..dim).map(|k| cols[k][i].clone()).collect());
        }
    }
    let facets: Vec<MergedFacet<S>> = inner
        .facets
        .iter()
        .map(|f| {
            let mut w = vec![S::zero(); dim];
            for (i, di) in f.normal.coords.iter().enumerate() {
                for k in 0..dim {
                    w[k] = w[k].clone() + di.clone() * &dual_rows[i][k];
                }
            }
            let w = LorentzVec::new(w);
            let b = f.offset.clone() + w.euclid_dot(base);
            MergedFacet {
                vertices: f.vertices.clone(),
                normal: w,
                offset: b,
                simplices: f.simplices.clone(),
            }
        })
        .collect();

    // keep the inner lattice (recompute dims against ambient coordinates),
    // then add the hull itself as the unique top face
    let mut faces = inner.faces;
    for f in faces.iter_mut() {
        f.dim = lattice::affine_rank(&points, &f.vertices, opts.eps_visible);
        f.visible = true;
    }
    let top_id = faces.len();
    let all: Vec<usize> = (0..points.len()).collect();
    let top_dim = dim - 1;
    let top_children: Vec<usize> =
        faces.iter().filter(|f| f.dim + 1 == top_dim).map(|f| f.id).collect();
    for &c in &top_children {
        faces[c].parents.push(top_id);
    }
    faces.push(HullFace {
        id: top_id,
        dim: top_dim,
        vertices: all,
        facet_ids: Vec::new(),
        parents: Vec::new(),
        children: top_children,
        visible: true,
    });

    Ok(Hull {
        points,
        dedup_map,
        duplicate_count,
        dim,
        flat: true,
        flat_plane: Some((normal, offset)),
        facets,
        faces,
        eps_visible: opts.eps_visible,
    })
}

fn dot<S: GeomScalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.clone() * y;
    }
    acc
}

fn collect_basis<S: GeomScalar>(rows: &[Vec<S>], eps: f64) -> Vec<Vec<S>> {
    let mut basis: Vec<Vec<S>> = Vec::new();
    for r in rows {
        basis.push(r.clone());
        if linalg::rank(&basis, eps) != basis.len() {
            basis.pop();
        }
    }
    basis
}

#[cfg(test)]
mod tests;
