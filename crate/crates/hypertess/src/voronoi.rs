//! The Voronoi tessellation and the geometric-dual subcomplex.
//!
//! A Voronoi face is pinned by the maximal site set achieving the minimal
//! distance on it; its geometric dual is the Delaunay cell spanned by
//! those sites, and duality pairs exactly the Delaunay cells carrying a
//! metric circumsphere. Voronoi cells are kept implicitly as half-space
//! data (bisector normals `s - s'` through the origin); unbounded cells
//! are the norm in hyperbolic space, so no clipping is ever performed.
//!
//! Whether a Delaunay face is dual reduces to: does the open polyhedral
//! cone of equidistant-and-closer directions contain a time-like vector on
//! the upper sheet? In the affine chart `u0 = 1` the time-like condition
//! becomes `|spatial|² < 1`, a convex constraint, so the search is a small
//! exact quadratic program solved by enumerating active constraint sets.

use std::collections::HashMap;

use thiserror::Error;

use crate::delaunay::Tessellation;
use crate::exec;
use crate::linalg;
use crate::lorentz::{mink, LorentzVec};
use crate::models::{AffinePlane, HPoint};
use crate::scalar::{GeomScalar, Sign};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VoronoiError {
    #[error("equal sites have no bisector")]
    EqualSites,
    #[error("empty site list")]
    EmptyInput,
}

/// The time-like subspace `{x : x∘(s0 - s1) = 0}` of points equidistant
/// from the two sites.
pub fn bisector<S: GeomScalar>(
    s0: &HPoint<S>,
    s1: &HPoint<S>,
) -> Result<AffinePlane<S>, VoronoiError> {
    if s0 == s1 {
        return Err(VoronoiError::EqualSites);
    }
    Ok(AffinePlane::new(s0.vec().sub(s1.vec()), S::zero()))
}

/// A face of the Voronoi tessellation, represented implicitly.
#[derive(Debug, Clone)]
pub struct VoronoiCell<S> {
    pub id: usize,
    /// Maximal site set: the face is `∩_{s in site_ids} V_s`.
    pub site_ids: Vec<usize>,
    pub dim: usize,
    /// Unnormalized time-like direction whose projection lies in the
    /// face's relative interior (the circumcenter of the dual cell).
    pub witness: LorentzVec<S>,
    /// Id of the geometrically dual Delaunay cell.
    pub dual_cell: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DualPair {
    pub voronoi_id: usize,
    pub delaunay_cell_id: usize,
}

#[derive(Debug)]
pub struct VoronoiDiagram<S> {
    pub cells: Vec<VoronoiCell<S>>,
    /// Hyperbolic dimension of the ambient space.
    pub ambient_dim: usize,
    pub pairs: Vec<DualPair>,
}

impl<S: GeomScalar> VoronoiDiagram<S> {
    /// Closed-cell membership of an arbitrary point of `H^n`, by exact
    /// half-space signs against every site.
    pub fn cell_contains(
        &self,
        tess: &Tessellation<S>,
        cell: &VoronoiCell<S>,
        x: &LorentzVec<S>,
    ) -> bool {
        for &i in &cell.site_ids {
            let si = tess.sites[i].vec();
            for s in &tess.sites {
                if (mink(x, si) - mink(x, s.vec())).sign() == Sign::Neg {
                    return false;
                }
            }
        }
        true
    }

    pub fn vertex_cells(&self) -> impl Iterator<Item = &VoronoiCell<S>> {
        self.cells.iter().filter(|c| c.dim == 0)
    }
}

/// Search for a time-like upper-sheet vector `u` that is Lorentz-equal on
/// the face's sites and strictly larger against every other site; its
/// normalization is then a circumcenter witnessing geometric duality.
pub fn metric_center_witness<S: GeomScalar>(
    tess: &Tessellation<S>,
    face: &[usize],
) -> Option<LorentzVec<S>> {
    let d = tess.sites[0].vec().dim();
    let s0 = tess.sites[face[0]].vec();

    // fast path: a single site is its own witness (zero-radius sphere)
    if face.len() == 1 {
        let u = s0.clone();
        if verify_witness(tess, face, &u) {
            return Some(u);
        }
    }

    // solution space L of the equidistance conditions u∘(s0 - si) = 0
    let eq_rows: Vec<Vec<S>> =
        face[1..].iter().map(|&i| s0.sub(tess.sites[i].vec()).bar().coords).collect();
    let lbasis: Vec<LorentzVec<S>> = if eq_rows.is_empty() {
        (0..d)
            .map(|k| {
                let mut c = vec![S::zero(); d];
                c[k] = S::one();
                LorentzVec::new(c)
            })
            .collect()
    } else {
        linalg::kernel_basis(&eq_rows, 0.0).into_iter().map(LorentzVec::new).collect()
    };
    if lbasis.is_empty() {
        return None;
    }

    // chart u0 = 1 inside L: particular point plus directions with u0 = 0
    let pivot = lbasis.iter().position(|b| b.coords[0].sign() != Sign::Zero)?;
    let base = lbasis[pivot].scale(&(S::one() / lbasis[pivot].coords[0].clone()));
    let dirs: Vec<LorentzVec<S>> = lbasis
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pivot)
        .map(|(_, b)| {
            let t = b.coords[0].clone() / base.coords[0].clone();
            b.sub(&base.scale(&t))
        })
        .collect();
    let k = dirs.len();

    // strict constraints u∘(s0 - s) > 0 for s outside the face, in chart
    // coordinates m: row·m < rhs
    let mut a_rows: Vec<Vec<S>> = Vec::new();
    let mut b_vals: Vec<S> = Vec::new();
    for (i, s) in tess.sites.iter().enumerate() {
        if face.contains(&i) {
            continue;
        }
        let diff = s0.sub(s.vec());
        let c0 = mink(&base, &diff);
        let row: Vec<S> = dirs.iter().map(|nj| -mink(nj, &diff)).collect();
        a_rows.push(row);
        b_vals.push(c0);
    }

    if k == 0 {
        // zero-dimensional chart: the candidate is `base` itself
        let u = base;
        return if mink(&u, &u).sign() == Sign::Neg && verify_witness(tess, face, &u) {
            Some(u)
        } else {
            None
        };
    }

    // convex objective |spatial(u(m))|² with u(m) = base + Σ m_j dirs_j
    let mstar = min_norm_on_polyhedron(&base, &dirs, &a_rows, &b_vals)?;
    let ustar = chart_point(&base, &dirs, &mstar);
    if mink(&ustar, &ustar).sign() != Sign::Neg {
        return None;
    }
    if verify_witness(tess, face, &ustar) {
        return Some(ustar);
    }
    // minimizer touches a constraint boundary: blend toward a strictly
    // feasible chart point
    let msafe = strict_point(&a_rows, &b_vals, k)?;
    let mut t = S::from_ratio(1, 2);
    for _ in 0..80 {
        let m: Vec<S> = mstar
            .iter()
            .zip(&msafe)
            .map(|(a, b)| a.clone() + t.clone() * &(b.clone() - a))
            .collect();
        let u = chart_point(&base, &dirs, &m);
        if mink(&u, &u).sign() == Sign::Neg && verify_witness(tess, face, &u) {
            return Some(u);
        }
        t = t / S::from_int(2);
    }
    None
}

fn chart_point<S: GeomScalar>(
    base: &LorentzVec<S>,
    dirs: &[LorentzVec<S>],
    m: &[S],
) -> LorentzVec<S> {
    let mut u = base.clone();
    for (mj, nj) in m.iter().zip(dirs) {
        u = u.add(&nj.scale(mj));
    }
    u
}

fn verify_witness<S: GeomScalar>(tess: &Tessellation<S>, face: &[usize], u: &LorentzVec<S>) -> bool {
    if mink(u, u).sign() != Sign::Neg || u.coords[0].sign() != Sign::Pos {
        return false;
    }
    let s0 = tess.sites[face[0]].vec();
    let p0 = mink(u, s0);
    for (i, s) in tess.sites.iter().enumerate() {
        let p = mink(u, s.vec());
        let diff = (p0.clone() - p).sign();
        if face.contains(&i) {
            if diff != Sign::Zero {
                return false;
            }
        } else if diff != Sign::Pos {
            return false;
        }
    }
    true
}

/// Minimize `|spatial(base + Σ m_j dirs_j)|²` over `{A m <= b}` by
/// enumerating active constraint subsets (exact KKT solves). Returns the
/// minimizer, or `None` when the closed polyhedron is empty.
fn min_norm_on_polyhedron<S: GeomScalar>(
    base: &LorentzVec<S>,
    dirs: &[LorentzVec<S>],
    a_rows: &[Vec<S>],
    b_vals: &[S],
) -> Option<Vec<S>> {
    let k = dirs.len();
    let _d = base.dim();
    // objective = |F m + g|², F columns = spatial parts of dirs
    let fcols: Vec<Vec<S>> = dirs.iter().map(|v| v.coords[1..].to_vec()).collect();
    let g: Vec<S> = base.coords[1..].to_vec();
    // FᵀF and Fᵀg
    let ftf: Vec<Vec<S>> = (0..k)
        .map(|i| (0..k).map(|j| dotv(&fcols[i], &fcols[j])).collect())
        .collect();
    let ftg: Vec<S> = (0..k).map(|i| dotv(&fcols[i], &g)).collect();

    let mut best: Option<(S, Vec<S>)> = None;
    let m_total = a_rows.len();
    let mut subset: Vec<usize> = Vec::new();
    enumerate_subsets(m_total, k, &mut subset, &mut |sel: &[usize]| {
        // KKT: [FᵀF  A_Jᵀ; A_J  0] [m; λ] = [-Fᵀg; b_J]
        let n = k + sel.len();
        let mut mat = vec![vec![S::zero(); n]; n];
        let mut rhs = vec![S::zero(); n];
        for i in 0..k {
            for j in 0..k {
                mat[i][j] = ftf[i][j].clone();
            }
            rhs[i] = -ftg[i].clone();
        }
        for (r, &ci) in sel.iter().enumerate() {
            for j in 0..k {
                mat[k + r][j] = a_rows[ci][j].clone();
                mat[j][k + r] = a_rows[ci][j].clone();
            }
            rhs[k + r] = b_vals[ci].clone();
        }
        if let Some(sol) = linalg::solve(&mat, &rhs, 0.0) {
            let m = sol[..k].to_vec();
            // feasibility of the candidate
            let feasible = a_rows.iter().zip(b_vals).all(|(row, b)| {
                (dotv(row, &m) - b.clone()).sign() != Sign::Pos
            });
            if feasible {
                let mut resid = g.clone();
                for (mj, col) in m.iter().zip(&fcols) {
                    for (ri, ci) in resid.iter_mut().zip(col) {
                        *ri = ri.clone() + mj.clone() * ci;
                    }
                }
                let val = dotv(&resid, &resid);
                if best.as_ref().map_or(true, |(bv, _)| val < *bv) {
                    best = Some((val, m));
                }
            }
        }
        false // keep enumerating
    });
    best.map(|(_, m)| m)
}

/// A strictly feasible point of `{A m < b}`: Fourier-Motzkin elimination
/// on `{A m + t·1 <= b, t <= 1}`, keeping the slack variable last. Any
/// point with positive slack is strictly inside; elimination and
/// back-substitution are exact.
fn strict_point<S: GeomScalar>(a_rows: &[Vec<S>], b_vals: &[S], k: usize) -> Option<Vec<S>> {
    // rows are (coeffs over m_0..m_{k-1}, t | rhs)
    let mut rows: Vec<(Vec<S>, S)> = a_rows
        .iter()
        .zip(b_vals)
        .map(|(r, b)| {
            let mut c = r.clone();
            c.push(S::one());
            (c, b.clone())
        })
        .collect();
    let mut t_cap = vec![S::zero(); k];
    t_cap.push(S::one());
    rows.push((t_cap, S::one()));

    // eliminate the m variables, keeping each stage for back-substitution
    let mut stages: Vec<Vec<(Vec<S>, S)>> = Vec::new();
    for var in 0..k {
        stages.push(rows.clone());
        let mut next: Vec<(Vec<S>, S)> = Vec::new();
        let mut pos: Vec<&(Vec<S>, S)> = Vec::new();
        let mut neg: Vec<&(Vec<S>, S)> = Vec::new();
        for row in &rows {
            match row.0[var].sign() {
                Sign::Zero => next.push(row.clone()),
                Sign::Pos => pos.push(row),
                Sign::Neg => neg.push(row),
            }
        }
        if pos.len() * neg.len() > 40_000 {
            return None; // defensive cap; never hit at tessellation scale
        }
        for p in &pos {
            for q in &neg {
                // p scaled by -q_var plus q scaled by p_var removes `var`
                let a = p.0[var].clone();
                let bq = -q.0[var].clone();
                let coeffs: Vec<S> = p
                    .0
                    .iter()
                    .zip(&q.0)
                    .map(|(x, y)| bq.clone() * x + a.clone() * y)
                    .collect();
                let rhs = bq.clone() * &p.1 + a.clone() * &q.1;
                next.push((coeffs, rhs));
            }
        }
        rows = next;
    }

    // remaining rows constrain t only
    let mut hi: Option<S> = None;
    let mut lo: Option<S> = None;
    for (c, b) in &rows {
        match c[k].sign() {
            Sign::Zero => {
                if b.sign() == Sign::Neg {
                    return None; // infeasible
                }
            }
            Sign::Pos => {
                let bound = b.clone() / c[k].clone();
                if hi.as_ref().map_or(true, |h| bound < *h) {
                    hi = Some(bound);
                }
            }
            Sign::Neg => {
                let bound = b.clone() / c[k].clone();
                if lo.as_ref().map_or(true, |l| bound > *l) {
                    lo = Some(bound);
                }
            }
        }
    }
    let hi = hi.unwrap_or_else(S::one);
    if hi.sign() != Sign::Pos {
        return None;
    }
    let floor = match lo {
        Some(l) if l.sign() == Sign::Pos => l,
        _ => S::zero(),
    };
    if floor >= hi {
        return None;
    }
    let mut point = vec![S::zero(); k + 1];
    point[k] = (floor.clone() + &hi) / S::from_int(2);

    // back-substitute the m variables in reverse order
    for var in (0..k).rev() {
        let stage = &stages[var];
        let mut vhi: Option<S> = None;
        let mut vlo: Option<S> = None;
        for (c, b) in stage {
            // residual rhs after the known later variables
            let mut resid = b.clone();
            for j in (var + 1)..=k {
                resid = resid - c[j].clone() * &point[j];
            }
            match c[var].sign() {
                Sign::Zero => {}
                Sign::Pos => {
                    let bound = resid / c[var].clone();
                    if vhi.as_ref().map_or(true, |h| bound < *h) {
                        vhi = Some(bound);
                    }
                }
                Sign::Neg => {
                    let bound = resid / c[var].clone();
                    if vlo.as_ref().map_or(true, |l| bound > *l) {
                        vlo = Some(bound);
                    }
                }
            }
        }
        point[var] = match (vlo, vhi) {
            (Some(l), Some(h)) => (l + &h) / S::from_int(2),
            (Some(l), None) => l + &S::one(),
            (None, Some(h)) => h - &S::one(),
            (None, None) => S::zero(),
        };
    }
    Some(point[..k].to_vec())
}

fn dotv<S: GeomScalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.clone() * y;
    }
    acc
}

fn enumerate_subsets(
    n: usize,
    k_max: usize,
    current: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]) -> bool,
) -> bool {
    if visit(current) {
        return true;
    }
    if current.len() == k_max {
        return false;
    }
    let start = current.last().map_or(0, |&l| l + 1);
    for i in start..n {
        current.push(i);
        if enumerate_subsets(n, k_max, current, visit) {
            current.pop();
            return true;
        }
        current.pop();
    }
    false
}

/// The geometric-dual subcomplex: all Delaunay cells admitting a metric
/// circumcenter witness, paired with their Voronoi faces.
pub fn geometric_dual<S: GeomScalar>(tess: &Tessellation<S>) -> VoronoiDiagram<S> {
    let n = tess.ambient_dim;
    let jobs: Vec<(usize, Vec<usize>)> =
        tess.cells.iter().map(|c| (c.id, c.vertex_ids.clone())).collect();
    let witnesses = exec::map_collect(jobs, |(cid, verts)| {
        let w = dual_witness_for_cell(tess, cid, &verts);
        (cid, w)
    });
    let mut cells = Vec::new();
    let mut pairs = Vec::new();
    let mut ordered: Vec<(usize, LorentzVec<S>)> =
        witnesses.into_iter().filter_map(|(cid, w)| w.map(|w| (cid, w))).collect();
    ordered.sort_by_key(|(cid, _)| *cid);
    for (vid, (cid, witness)) in ordered.into_iter().enumerate() {
        let cell = &tess.cells[cid];
        cells.push(VoronoiCell {
            id: vid,
            site_ids: cell.vertex_ids.clone(),
            dim: n - cell.dim,
            witness,
            dual_cell: cid,
        });
        pairs.push(DualPair { voronoi_id: vid, delaunay_cell_id: cid });
    }
    VoronoiDiagram { cells, ambient_dim: n, pairs }
}

fn dual_witness_for_cell<S: GeomScalar>(
    tess: &Tessellation<S>,
    cid: usize,
    verts: &[usize],
) -> Option<LorentzVec<S>> {
    let d = tess.sites[0].vec().dim();
    let cell = &tess.cells[cid];
    // full-rank top cells have a unique support plane: dual iff metric
    if cell.dim + 1 == d {
        if let Some(sphere) = &cell.circumsphere {
            return match sphere {
                crate::models::Circumsphere::Metric { center_dir, .. } => {
                    let u = center_dir.clone();
                    verify_witness(tess, verts, &u).then_some(u)
                }
                _ => None,
            };
        }
    }
    metric_center_witness(tess, verts)
}

/// The Voronoi tessellation: every face, as the dual of the corresponding
/// Delaunay cell. Top Voronoi cells are the `V_s` (duals of the sites).
pub fn voronoi_diagram<S: GeomScalar>(tess: &Tessellation<S>) -> Result<VoronoiDiagram<S>, VoronoiError> {
    if tess.sites.is_empty() {
        return Err(VoronoiError::EmptyInput);
    }
    Ok(geometric_dual(tess))
}

/// Contravariance report: Voronoi-face inclusions must reverse to
/// Delaunay-face inclusions, and every face of a dual cell must be dual.
#[derive(Debug, Default)]
pub struct ContravarianceReport {
    pub violations: Vec<String>,
    pub pairs_checked: usize,
}

impl ContravarianceReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_contravariance<S: GeomScalar>(
    tess: &Tessellation<S>,
    dual: &VoronoiDiagram<S>,
) -> ContravarianceReport {
    let mut report = ContravarianceReport::default();
    let by_cell: HashMap<usize, &VoronoiCell<S>> =
        dual.cells.iter().map(|c| (c.dual_cell, c)).collect();

    // transitive descendants in the Delaunay lattice
    let descendants = |cid: usize| -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![cid];
        while let Some(c) = stack.pop() {
            for &ch in &tess.cells[c].children {
                if !out.contains(&ch) {
                    out.push(ch);
                    stack.push(ch);
                }
            }
        }
        out
    };

    for v in &dual.cells {
        for vp in &dual.cells {
            if v.id == vp.id {
                continue;
            }
            // V' ⊂ V  iff sites(V') ⊃ sites(V)
            if v.site_ids.len() < vp.site_ids.len()
                && v.site_ids.iter().all(|s| vp.site_ids.contains(s))
            {
                report.pairs_checked += 1;
                // then C_V must be a face of C_{V'}
                let desc = descendants(vp.dual_cell);
                if !desc.contains(&v.dual_cell) {
                    report.violations.push(format!(
                        "dual of {:?} is not a face of dual of {:?}",
                        v.site_ids, vp.site_ids
                    ));
                }
            }
        }
        // every face of C_V is dual to some coarser Voronoi cell
        for f in descendants(v.dual_cell) {
            report.pairs_checked += 1;
            match by_cell.get(&f) {
                None => report.violations.push(format!(
                    "face {:?} of dual cell {:?} is not in the dual complex",
                    tess.cells[f].vertex_ids, v.site_ids
                )),
                Some(vf) => {
                    // the pairing must reverse inclusion: sites(V_f) ⊆ sites(V)
                    if !vf.site_ids.iter().all(|s| tess.cells[v.dual_cell].vertex_ids.contains(s)) {
                        report.violations.push(format!(
                            "pairing of face {:?} does not include into {:?}",
                            vf.site_ids, v.site_ids
                        ));
                    }
                }
            }
        }
        // dimension pairing
        if v.dim + tess.cells[v.dual_cell].dim != dual.ambient_dim {
            report.violations.push(format!(
                "dimension pairing violated at {:?}",
                v.site_ids
            ));
        }
        // independent dimension recomputation from the equidistance system
        let s0 = tess.sites[v.site_ids[0]].vec();
        let rows: Vec<Vec<S>> = v.site_ids[1..]
            .iter()
            .map(|&i| s0.sub(tess.sites[i].vec()).coords.clone())
            .collect();
        let rank = if rows.is_empty() { 0 } else { linalg::rank(&rows, 0.0) };
        let expected = tess.sites[0].vec().dim() - 1 - rank;
        if v.dim != expected {
            report.violations.push(format!(
                "voronoi face {:?} has dim {} but equidistance rank gives {}",
                v.site_ids, v.dim, expected
            ));
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delaunay::{delaunay_tessellation, cell_signature};
    use crate::hull::HullOptions;
    use crate::models::{geodesic_point, lift, dist, ModelPoint};
    use crate::scalar::{rat, Rat};

    fn hp(coords: &[(i64, i64)]) -> HPoint<Rat> {
        HPoint::from_vec(LorentzVec::new(coords.iter().map(|&(n, d)| rat(n, d)).collect()))
            .unwrap()
    }

    fn sweep_sites(a: (i64, i64), b: (i64, i64)) -> Vec<HPoint<Rat>> {
        vec![
            hp(&[(1, 1), (0, 1), (0, 1)]),
            hp(&[(3, 2), a, b]),
            hp(&[(3, 2), a, (-b.0, b.1)]),
        ]
    }

    fn build(sites: &[HPoint<Rat>]) -> (Tessellation<Rat>, VoronoiDiagram<Rat>) {
        let tess = delaunay_tessellation(sites, &HullOptions::default()).unwrap();
        let dual = geometric_dual(&tess);
        (tess, dual)
    }

    #[test]
    fn bisector_fixtures() {
        let s0 = hp(&[(5, 3), (4, 3), (0, 1)]);
        let s1 = hp(&[(5, 3), (-4, 3), (0, 1)]);
        let plane = bisector(&s0, &s1).unwrap();
        // mirror pair: the bisector is {x1 = 0}
        assert_eq!(plane.normal, LorentzVec::new(vec![rat(0, 1), rat(8, 3), rat(0, 1)]));
        assert!(bisector(&s0, &s0.clone()).is_err());

        // the midpoint of any pair lies on the bisector
        let a = lift(&ModelPoint::poincare(vec![rat(1, 3), rat(1, 7)])).unwrap();
        let b = lift(&ModelPoint::poincare(vec![rat(-2, 5), rat(1, 2)])).unwrap();
        let plane = bisector(&a, &b).unwrap();
        let af = HPoint::<f64>::from_vec(LorentzVec::new(a.to_f64())).unwrap();
        let bf = HPoint::<f64>::from_vec(LorentzVec::new(b.to_f64())).unwrap();
        let mid = geodesic_point(&af, &bf, dist(&af, &bf) / 2.0).unwrap();
        let nf = LorentzVec::new(plane.normal.to_f64());
        assert!(mink(mid.vec(), &nf).abs() < 1e-10);

        // explicit evaluation: s0 = basepoint, s1 = (cosh 2, sinh 2, 0)
        let of = HPoint::<f64>::from_vec(LorentzVec::new(vec![1.0, 0.0, 0.0])).unwrap();
        let f2 =
            HPoint::<f64>::from_vec(LorentzVec::new(vec![2f64.cosh(), 2f64.sinh(), 0.0])).unwrap();
        let plane = bisector(&of, &f2).unwrap();
        assert!((plane.normal.coords[0] - (1.0 - 2f64.cosh())).abs() < 1e-12);
        assert!((plane.normal.coords[1] + 2f64.sinh()).abs() < 1e-12);
        let m1 = HPoint::<f64>::from_vec(LorentzVec::new(vec![1f64.cosh(), 1f64.sinh(), 0.0]))
            .unwrap();
        assert!(mink(m1.vec(), &plane.normal).abs() < 1e-12);
    }

    #[test]
    fn left_config_dual_is_whole_tessellation() {
        // metric circumsphere: every Delaunay cell is dual
        let (tess, dual) = build(&sweep_sites((1, 1), (1, 2)));
        assert_eq!(dual.cells.len(), tess.cells.len());
        assert_eq!(dual.cells.len(), 7);
        // the triangle is dual to the Voronoi vertex
        let vertex_cells: Vec<_> = dual.vertex_cells().collect();
        assert_eq!(vertex_cells.len(), 1);
        assert_eq!(vertex_cells[0].site_ids, vec![0, 1, 2]);
        let report = check_contravariance(&tess, &dual);
        assert!(report.ok(), "{:?}", report.violations);
    }

    #[test]
    fn middle_and_right_configs_drop_the_triangle() {
        // horospherical and equidistant circumspheres: the 2-cell and the
        // far edge [y,z] are excluded; duals are x, y, z and the two edges
        // at the apex x
        for (a, b) in [((1i64, 2i64), (1i64, 1i64)), ((1, 5), (11, 10))] {
            let (tess, dual) = build(&sweep_sites(a, b));
            let mut dual_sets: Vec<(usize, Vec<usize>)> = dual
                .cells
                .iter()
                .map(|c| (tess.cells[c.dual_cell].dim, c.site_ids.clone()))
                .collect();
            dual_sets.sort();
            assert_eq!(
                dual_sets,
                vec![
                    (0, vec![0]),
                    (0, vec![1]),
                    (0, vec![2]),
                    (1, vec![0, 1]),
                    (1, vec![0, 2]),
                ],
                "config a = {a:?}"
            );
            // no Voronoi vertex in these configurations
            assert_eq!(dual.vertex_cells().count(), 0);
            let report = check_contravariance(&tess, &dual);
            assert!(report.ok(), "{:?}", report.violations);
        }
    }

    #[test]
    fn two_sites_dual() {
        let sites = vec![
            lift(&ModelPoint::poincare(vec![rat(1, 4), rat(0, 1)])).unwrap(),
            lift(&ModelPoint::poincare(vec![rat(-1, 3), rat(1, 5)])).unwrap(),
        ];
        let (tess, dual) = build(&sites);
        assert_eq!(cell_signature(&tess).len(), 3);
        // edge dual to the bisector (dim 1), endpoints dual to half-planes
        let mut dims: Vec<(usize, usize)> =
            dual.cells.iter().map(|c| (c.dim, tess.cells[c.dual_cell].dim)).collect();
        dims.sort();
        assert_eq!(dims, vec![(1, 1), (2, 0), (2, 0)]);
        let report = check_contravariance(&tess, &dual);
        assert!(report.ok(), "{:?}", report.violations);
    }

    #[test]
    fn single_site_dual() {
        let sites = vec![hp(&[(1, 1), (0, 1), (0, 1)])];
        let (tess, dual) = build(&sites);
        assert_eq!(dual.cells.len(), 1);
        assert_eq!(dual.cells[0].dim, 2);
        assert_eq!(tess.cells[dual.cells[0].dual_cell].dim, 0);
    }

    #[test]
    fn symmetric_triple_vertex_witness() {
        // rational triple equidistant from the basepoint: the Voronoi
        // vertex witness must be proportional to (1,0,0)
        let sites = vec![
            hp(&[(5, 4), (3, 4), (0, 1)]),
            hp(&[(5, 4), (-9, 20), (3, 5)]),
            hp(&[(5, 4), (-9, 20), (-3, 5)]),
        ];
        let (tess, dual) = build(&sites);
        let v = dual.vertex_cells().next().expect("one Voronoi vertex");
        assert_eq!(v.site_ids, vec![0, 1, 2]);
        assert_eq!(v.witness.coords[1].sign(), Sign::Zero);
        assert_eq!(v.witness.coords[2].sign(), Sign::Zero);
        assert!(v.witness.coords[0].sign() == Sign::Pos);
        // three 2-cells, three edges, one vertex
        let mut dims: Vec<usize> = dual.cells.iter().map(|c| c.dim).collect();
        dims.sort();
        assert_eq!(dims, vec![0, 1, 1, 1, 2, 2, 2]);
        let _ = tess;
    }

    #[test]
    fn dual_subset_and_metric_iff() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for case in 0..10 {
            let n = rng.gen_range(4..=8);
            let sites: Vec<HPoint<Rat>> = (0..n)
                .map(|_| {
                    lift(&ModelPoint::poincare(vec![
                        rat(rng.gen_range(-40..=40), 64),
                        rat(rng.gen_range(-40..=40), 64),
                    ]))
                    .unwrap()
                })
                .collect();
            let tess = match delaunay_tessellation(&sites, &HullOptions::default()) {
                Ok(t) => t,
                Err(_) => continue,
            };
            let dual = geometric_dual(&tess);
            // every dual id is a tessellation cell
            for p in &dual.pairs {
                assert!(p.delaunay_cell_id < tess.cells.len());
            }
            // a top cell is dual iff its circumsphere is metric
            let dual_ids: Vec<usize> = dual.pairs.iter().map(|p| p.delaunay_cell_id).collect();
            for c in tess.top_cells() {
                if tess.span_basis.is_none() {
                    let is_metric = matches!(
                        c.circumsphere.as_ref().unwrap().kind(),
                        crate::models::SphereKind::Metric
                    );
                    assert_eq!(dual_ids.contains(&c.id), is_metric, "case {case}");
                }
            }
            // dimension pairing and contravariance
            let report = check_contravariance(&tess, &dual);
            assert!(report.ok(), "case {case}: {:?}", report.violations);
        }
    }

    #[test]
    fn membership_matches_argmin_on_samples() {
        use rand::{Rng, SeedableRng};
        let sites = sweep_sites((1, 1), (1, 2));
        let (tess, dual) = build(&sites);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let p = lift(&ModelPoint::poincare(vec![
                rat(rng.gen_range(-45..=45), 64),
                rat(rng.gen_range(-45..=45), 64),
            ]))
            .unwrap();
            // argmin set of cosh-distance
            let vals: Vec<Rat> =
                tess.sites.iter().map(|s| -mink(p.vec(), s.vec())).collect();
            let min = vals.iter().min().unwrap().clone();
            let argmin: Vec<usize> =
                (0..vals.len()).filter(|&i| vals[i] == min).collect();
            // top Voronoi cells containing p
            let holders: Vec<usize> = dual
                .cells
                .iter()
                .filter(|c| c.dim == 2 && dual.cell_contains(&tess, c, p.vec()))
                .map(|c| c.site_ids[0])
                .collect();
            let mut h = holders.clone();
            h.sort_unstable();
            assert_eq!(h, argmin);
        }
    }
}
