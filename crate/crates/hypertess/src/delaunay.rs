//! The Delaunay tessellation of a finite site set in `H^n`.
//!
//! Sites are lifted to the hyperboloid sheet, their convex hull is taken
//! in `R^{n+1}`, the faces visible from the origin are extracted, and each
//! maps to a Delaunay cell combinatorially (the central projection
//! collapses rays, so cells keep their vertex ids). Top cells carry a
//! verified empty circumsphere. Site sets spanning a lower-dimensional
//! subspace are handled by recursing inside their linear span, which meets
//! the sheet in an isometric copy of a lower-dimensional hyperbolic space.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::hull::{self, Hull, HullError, HullOptions};
use crate::linalg;
use crate::lorentz::{mink, LorentzVec};
use crate::models::{classify_hypersphere_in_span, Circumsphere, HPoint, ModelError, SphereKind};
use crate::scalar::{GeomScalar, Sign};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DelaunayError {
    #[error("empty site list")]
    EmptyInput,
    #[error("circumsphere verification failed for cell {cell}: site {site} lies strictly inside")]
    CircumsphereViolation { cell: usize, site: usize },
    #[error(transparent)]
    Hull(#[from] HullError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A cell of the tessellation: a visible hull face projected to `H^n`.
#[derive(Debug, Clone)]
pub struct DelaunayCell<S> {
    pub id: usize,
    pub dim: usize,
    /// Sorted indices into the deduplicated site list.
    pub vertex_ids: Vec<usize>,
    /// Present on top-dimensional cells (unique there); lower cells expose
    /// a non-unique certificate through [`cell_circumsphere`].
    pub circumsphere: Option<Circumsphere<S>>,
    pub children: Vec<usize>,
    pub parents: Vec<usize>,
}

#[derive(Debug)]
pub struct Tessellation<S> {
    /// Deduplicated sites.
    pub sites: Vec<HPoint<S>>,
    /// Original input index to deduplicated index.
    pub dedup_map: Vec<usize>,
    pub cells: Vec<DelaunayCell<S>>,
    /// Dimension of the top cells (the hyperbolic dimension of the hull).
    pub top_dim: usize,
    /// Hyperbolic dimension of the ambient space.
    pub ambient_dim: usize,
    /// Independent basis of the sites' linear span when it is proper.
    pub span_basis: Option<Vec<LorentzVec<S>>>,
    hull: Option<Hull<S>>,
    /// hull face id -> cell id
    face_to_cell: HashMap<usize, usize>,
}

impl<S: GeomScalar> Tessellation<S> {
    pub fn top_cells(&self) -> impl Iterator<Item = &DelaunayCell<S>> {
        self.cells.iter().filter(move |c| c.dim == self.top_dim)
    }

    pub fn cell_by_vertices(&self, vertices: &[usize]) -> Option<&DelaunayCell<S>> {
        self.cells.iter().find(|c| c.vertex_ids == vertices)
    }

    pub fn exact(&self) -> bool {
        S::EXACT
    }

    /// The support plane of a cell's hull face as a Euclidean
    /// `(normal, offset)` pair with all lifted sites on the `<=` side and
    /// the origin strictly above (top cells only have it unique).
    pub fn cell_support_plane(&self, cell_id: usize) -> Result<(LorentzVec<S>, S), DelaunayError> {
        let hull = self.hull.as_ref().expect("tessellation with at least 2 sites");
        let face_id = self
            .face_to_cell
            .iter()
            .find(|(_, &c)| c == cell_id)
            .map(|(&f, _)| f)
            .expect("cell belongs to a hull face");
        Ok(hull.face_support_plane(face_id)?)
    }
}

/// Build the Delaunay tessellation of `sites`.
pub fn delaunay_tessellation<S: GeomScalar>(
    sites: &[HPoint<S>],
    opts: &HullOptions,
) -> Result<Tessellation<S>, DelaunayError> {
    if sites.is_empty() {
        return Err(DelaunayError::EmptyInput);
    }
    let d = sites[0].vec().dim();
    let ambient_dim = d - 1;

    // deduplicate sites
    let mut dedup: Vec<HPoint<S>> = Vec::new();
    let mut dedup_map = Vec::with_capacity(sites.len());
    for s in sites {
        match dedup.iter().position(|q| {
            if S::EXACT {
                q == s
            } else {
                q.vec().sub(s.vec()).to_f64().iter().map(|v| v * v).sum::<f64>().sqrt()
                    < hull::EPS_DEDUP
            }
        }) {
            Some(i) => dedup_map.push(i),
            None => {
                dedup.push(s.clone());
                dedup_map.push(dedup.len() - 1);
            }
        }
    }

    if dedup.len() == 1 {
        return Ok(Tessellation {
            sites: dedup,
            dedup_map,
            cells: vec![DelaunayCell {
                id: 0,
                dim: 0,
                vertex_ids: vec![0],
                circumsphere: None,
                children: Vec::new(),
                parents: Vec::new(),
            }],
            top_dim: 0,
            ambient_dim,
            span_basis: None,
            hull: None,
            face_to_cell: HashMap::new(),
        });
    }

    // linear span of the site vectors
    let vecs: Vec<LorentzVec<S>> = dedup.iter().map(|p| p.vec().clone()).collect();
    let mut span_ids: Vec<usize> = Vec::new();
    let mut span_rows: Vec<Vec<S>> = Vec::new();
    for (i, v) in vecs.iter().enumerate() {
        span_rows.push(v.coords.clone());
        if linalg::rank(&span_rows, hull::EPS_VISIBLE) == span_rows.len() {
            span_ids.push(i);
        } else {
            span_rows.pop();
        }
        if span_ids.len() == d {
            break;
        }
    }
    let m = span_ids.len();

    let (hull_points, span_basis): (Vec<LorentzVec<S>>, Option<Vec<LorentzVec<S>>>) = if m == d {
        (vecs.clone(), None)
    } else {
        // coordinates with respect to the span basis
        let basis: Vec<LorentzVec<S>> = span_ids.iter().map(|&i| vecs[i].clone()).collect();
        let a: Vec<Vec<S>> =
            (0..d).map(|r| basis.iter().map(|b| b.coords[r].clone()).collect()).collect();
        let reduced = vecs
            .iter()
            .map(|v| {
                let c = linalg::solve_consistent(&a, &v.coords, hull::EPS_VISIBLE)
                    .expect("site lies in its own span");
                LorentzVec::new(c)
            })
            .collect();
        (reduced, Some(basis))
    };

    let hull = hull::build_hull(&hull_points, m, opts)?;
    let top_dim = m - 1;

    // visible faces become cells; canonical order (dim, vertices)
    let mut visible: Vec<&hull::HullFace> = hull.visible_faces().collect();
    visible.sort_by(|a, b| (a.dim, &a.vertices).cmp(&(b.dim, &b.vertices)));
    let mut face_to_cell = HashMap::new();
    let mut cells: Vec<DelaunayCell<S>> = Vec::new();
    for (cid, face) in visible.iter().enumerate() {
        face_to_cell.insert(face.id, cid);
        cells.push(DelaunayCell {
            id: cid,
            dim: face.dim,
            vertex_ids: face.vertices.clone(),
            circumsphere: None,
            children: Vec::new(),
            parents: Vec::new(),
        });
    }
    // incidence restricted to visible faces
    for face in &visible {
        let cid = face_to_cell[&face.id];
        for ch in &face.children {
            if let Some(&c) = face_to_cell.get(ch) {
                cells[cid].children.push(c);
                cells[c].parents.push(cid);
            }
        }
    }
    for c in cells.iter_mut() {
        c.children.sort_unstable();
        c.parents.sort_unstable();
    }

    let mut tess = Tessellation {
        sites: dedup,
        dedup_map,
        cells,
        top_dim,
        ambient_dim,
        span_basis,
        hull: Some(hull),
        face_to_cell,
    };

    // classify and verify the circumsphere of every top cell
    for cid in 0..tess.cells.len() {
        if tess.cells[cid].dim != top_dim {
            continue;
        }
        let sphere = top_cell_circumsphere(&tess, cid)?;
        // empty convex side: no other site strictly inside
        for (sid, site) in tess.sites.iter().enumerate() {
            if tess.cells[cid].vertex_ids.binary_search(&sid).is_ok() {
                continue;
            }
            if sphere.strictly_inside(site.vec()) {
                return Err(DelaunayError::CircumsphereViolation { cell: cid, site: sid });
            }
        }
        tess.cells[cid].circumsphere = Some(sphere);
    }
    Ok(tess)
}

fn top_cell_circumsphere<S: GeomScalar>(
    tess: &Tessellation<S>,
    cell_id: usize,
) -> Result<Circumsphere<S>, DelaunayError> {
    let cell = &tess.cells[cell_id];
    let pts: Vec<HPoint<S>> = cell.vertex_ids.iter().map(|&v| tess.sites[v].clone()).collect();
    Ok(classify_hypersphere_in_span(&pts, tess.span_basis.as_deref())?)
}

/// Circumsphere of any cell. Top cells return their unique verified
/// sphere; lower-dimensional cells derive one from a strictly separating
/// support plane of their hull face and are flagged non-unique.
pub fn cell_circumsphere<S: GeomScalar>(
    tess: &Tessellation<S>,
    cell_id: usize,
) -> Result<(Circumsphere<S>, bool), DelaunayError> {
    let cell = &tess.cells[cell_id];
    if let Some(s) = &cell.circumsphere {
        return Ok((s.clone(), true));
    }
    if cell.dim == tess.top_dim {
        return Ok((top_cell_circumsphere(tess, cell_id)?, true));
    }
    // lower cell: build a sphere from a separating support plane
    let (eta, c) = tess.cell_support_plane(cell_id)?;
    let sphere = circumsphere_from_plane(&eta, &c, tess)?;
    // the certificate must be empty of the remaining sites
    for (sid, site) in tess.sites.iter().enumerate() {
        if cell.vertex_ids.binary_search(&sid).is_ok() {
            continue;
        }
        if sphere.strictly_inside(site.vec()) {
            return Err(DelaunayError::CircumsphereViolation { cell: cell_id, site: sid });
        }
    }
    Ok((sphere, false))
}

/// Convert a strictly separating Euclidean support plane (sites on
/// `eta·x <= c`, origin above, `c < 0`) into the circumsphere whose convex
/// side is the empty region: `{x∘w >= c}` for `w = bar(-eta)`.
fn circumsphere_from_plane<S: GeomScalar>(
    eta: &LorentzVec<S>,
    c: &S,
    tess: &Tessellation<S>,
) -> Result<Circumsphere<S>, DelaunayError> {
    // in reduced coordinates the plane lives in span coordinates; map back
    let w = match &tess.span_basis {
        None => eta.neg().bar(),
        Some(basis) => {
            // eta is a functional on reduced coordinates a; the ambient
            // representative w must pair the same way on the span:
            // (B a)∘w = eta·a, i.e. B_j∘w = eta_j. Solve inside the span
            // as w = B t with Gram t = eta.
            let d = basis[0].dim();
            let gram: Vec<Vec<S>> = basis
                .iter()
                .map(|a| basis.iter().map(|b| mink(a, b)).collect())
                .collect();
            let t = linalg::solve(&gram, &eta.coords, hull::EPS_VISIBLE)
                .ok_or(ModelError::Constraint("degenerate span Gram".into()))?;
            let mut w = LorentzVec::zero(d);
            for (ti, b) in t.iter().zip(basis) {
                w = w.add(&b.scale(ti));
            }
            w
        }
    };
    let offset = c.clone();
    match crate::lorentz::classify_vector(&w) {
        crate::lorentz::CausalClass::TimeLike => {
            debug_assert!(w.coords[0].sign() == Sign::Pos);
            Ok(Circumsphere::Metric { center_dir: w, offset })
        }
        crate::lorentz::CausalClass::LightLike => {
            Ok(Circumsphere::Horosphere { ideal: w.scale(&(-S::one() / offset)) })
        }
        crate::lorentz::CausalClass::SpaceLike => {
            // rescale so the offset is u∘u, matching the equidistant side
            let ww = mink(&w, &w);
            let lambda = offset.clone() / ww;
            let u = w.scale(&lambda);
            // basis of the plane's parallel subspace within the span
            Ok(Circumsphere::Equidistant { normal: u, basis: Vec::new(), component: Sign::Pos })
        }
        crate::lorentz::CausalClass::Zero => {
            Err(DelaunayError::Model(ModelError::Constraint("zero normal".into())))
        }
    }
}

/// Outcome classes of [`check_complex`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComplexViolation {
    /// A face of a cell is missing from the complex.
    FaceClosure(String),
    /// Two cells intersect in something other than a common face.
    PairIntersection(String),
    /// A sampled hull point is not covered by any top cell.
    Coverage(String),
    /// A site lies strictly inside a cell's empty region.
    EmptyCircumsphere(String),
}

#[derive(Debug, Default)]
pub struct ComplexReport {
    pub violations: Vec<ComplexViolation>,
    pub coverage_samples: usize,
}

impl ComplexReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Validate the polyhedral-complex axioms: faces of cells are cells,
/// pairwise intersections are common faces, the union of top cells covers
/// the hull (by sampling), and every circumsphere certificate is empty.
pub fn check_complex<S: GeomScalar>(tess: &Tessellation<S>, samples: usize, seed: u64) -> ComplexReport {
    use rand::{Rng, SeedableRng};
    let mut report = ComplexReport::default();
    let by_vertices: HashMap<&[usize], usize> =
        tess.cells.iter().map(|c| (c.vertex_ids.as_slice(), c.id)).collect();

    // (a) faces of cells are cells: children exist, are one dimension
    // down, and polytopes of dim k have at least k+1 facets
    for cell in &tess.cells {
        for &ch in &cell.children {
            match tess.cells.get(ch) {
                None => report.violations.push(ComplexViolation::FaceClosure(format!(
                    "cell {} references missing child {}",
                    cell.id, ch
                ))),
                Some(child) => {
                    if child.dim + 1 != cell.dim
                        || !hull::is_subset(&child.vertex_ids, &cell.vertex_ids)
                    {
                        report.violations.push(ComplexViolation::FaceClosure(format!(
                            "cell {} has inconsistent child {}",
                            cell.id, ch
                        )));
                    }
                }
            }
        }
        if cell.dim >= 1 && cell.children.len() < cell.dim + 1 {
            report.violations.push(ComplexViolation::FaceClosure(format!(
                "cell {} (dim {}) has only {} faces",
                cell.id,
                cell.dim,
                cell.children.len()
            )));
        }
    }

    // (b) pairwise vertex intersections are common faces
    for i in 0..tess.cells.len() {
        for j in (i + 1)..tess.cells.len() {
            let a = &tess.cells[i];
            let b = &tess.cells[j];
            let inter: Vec<usize> = a
                .vertex_ids
                .iter()
                .copied()
                .filter(|v| b.vertex_ids.binary_search(v).is_ok())
                .collect();
            if inter.is_empty() || inter == a.vertex_ids || inter == b.vertex_ids {
                continue;
            }
            if !by_vertices.contains_key(inter.as_slice()) {
                report.violations.push(ComplexViolation::PairIntersection(format!(
                    "cells {} and {} intersect in a non-face {:?}",
                    a.id, b.id, inter
                )));
            }
        }
    }
    // (b') relative interiors of distinct top cells are disjoint:
    // barycenters of top cells belong to exactly one top-cell cone
    let tops: Vec<&DelaunayCell<S>> = tess.top_cells().collect();
    for a in &tops {
        let bary = barycenter_vec(tess, &a.vertex_ids);
        for b in &tops {
            if a.id == b.id {
                continue;
            }
            if in_conical_hull(tess, &b.vertex_ids, &bary) {
                report.violations.push(ComplexViolation::PairIntersection(format!(
                    "barycenter of cell {} lies in cell {}",
                    a.id, b.id
                )));
            }
        }
    }

    // (c) coverage: random convex combinations of all sites lie in some
    // top cell's cone
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for k in 0..samples {
        let mut weights: Vec<S> = Vec::with_capacity(tess.sites.len());
        for _ in 0..tess.sites.len() {
            weights.push(S::from_int(rng.gen_range(0..=8)));
        }
        if weights.iter().all(|w| w.sign() == Sign::Zero) {
            weights[0] = S::one();
        }
        let mut x = LorentzVec::zero(tess.sites[0].vec().dim());
        for (w, s) in weights.iter().zip(&tess.sites) {
            x = x.add(&s.vec().scale(w));
        }
        let covered = tess.top_cells().any(|c| in_conical_hull(tess, &c.vertex_ids, &x));
        report.coverage_samples += 1;
        if !covered {
            report.violations.push(ComplexViolation::Coverage(format!(
                "sample {k} not covered by any top cell"
            )));
        }
    }

    // (d) empty circumsphere certificates
    for cell in &tess.cells {
        if let Some(sphere) = &cell.circumsphere {
            for (sid, site) in tess.sites.iter().enumerate() {
                if cell.vertex_ids.binary_search(&sid).is_err()
                    && sphere.strictly_inside(site.vec())
                {
                    report.violations.push(ComplexViolation::EmptyCircumsphere(format!(
                        "site {} strictly inside circumsphere of cell {}",
                        sid, cell.id
                    )));
                }
            }
        }
    }
    report
}

fn barycenter_vec<S: GeomScalar>(tess: &Tessellation<S>, ids: &[usize]) -> LorentzVec<S> {
    let mut x = LorentzVec::zero(tess.sites[0].vec().dim());
    for &i in ids {
        x = x.add(tess.sites[i].vec());
    }
    x
}

/// Test membership of `x` in the conical hull of the given sites by
/// Caratheodory enumeration of independent generator subsets.
pub fn in_conical_hull<S: GeomScalar>(
    tess: &Tessellation<S>,
    ids: &[usize],
    x: &LorentzVec<S>,
) -> bool {
    let d = x.dim();
    let gens: Vec<&LorentzVec<S>> = ids.iter().map(|&i| tess.sites[i].vec()).collect();
    // try subsets of size up to d (Caratheodory for cones)
    let k_max = gens.len().min(d);
    let mut idx: Vec<usize> = Vec::new();
    subsets_upto(gens.len(), k_max, &mut idx, &mut |sel: &[usize]| {
        if sel.is_empty() {
            return false;
        }
        let a: Vec<Vec<S>> =
            (0..d).map(|r| sel.iter().map(|&g| gens[g].coords[r].clone()).collect()).collect();
        match linalg::solve_consistent(&a, &x.coords, 0.0) {
            Some(coeffs) => coeffs.iter().all(|c| c.sign() != Sign::Neg),
            None => false,
        }
    })
}

fn subsets_upto(
    n: usize,
    k_max: usize,
    current: &mut Vec<usize>,
    test: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if !current.is_empty() && test(current) {
        return true;
    }
    if current.len() == k_max {
        return false;
    }
    let start = current.last().map_or(0, |&l| l + 1);
    for i in start..n {
        current.push(i);
        if subsets_upto(n, k_max, current, test) {
            current.pop();
            return true;
        }
        current.pop();
    }
    false
}

/// Combinatorial signature used by equivariance and determinism tests.
pub fn cell_signature<S: GeomScalar>(tess: &Tessellation<S>) -> Vec<(usize, Vec<usize>)> {
    let mut sig: Vec<(usize, Vec<usize>)> =
        tess.cells.iter().map(|c| (c.dim, c.vertex_ids.clone())).collect();
    sig.sort();
    sig
}

/// Kinds of the top cells keyed by vertex set, for duality bookkeeping.
pub fn top_kinds<S: GeomScalar>(tess: &Tessellation<S>) -> HashMap<Vec<usize>, SphereKind> {
    tess.top_cells()
        .filter_map(|c| c.circumsphere.as_ref().map(|s| (c.vertex_ids.clone(), s.kind())))
        .collect()
}

/// The tessellation's vertex set as site ids (0-cells).
pub fn vertex_ids<S: GeomScalar>(tess: &Tessellation<S>) -> HashSet<usize> {
    tess.cells.iter().filter(|c| c.dim == 0).map(|c| c.vertex_ids[0]).collect()
}
