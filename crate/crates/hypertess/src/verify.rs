//! Independent brute-force oracles for validating the hull pipeline.
//!
//! These are deliberately naive (subset enumeration, quadratic scans) and
//! share nothing with the hull construction beyond the Lorentz kernel and
//! basic linear algebra. The Delaunay oracle enumerates empty
//! circumspheres directly; the Euclidean oracle re-derives the geometric
//! dual in Poincare coordinates, where it consists of the Euclidean
//! Delaunay faces whose circumdisks lie strictly inside the unit disk.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::delaunay::{cell_signature, delaunay_tessellation, Tessellation};
use crate::exec;
use crate::hull::HullOptions;
use crate::linalg;
use crate::lorentz::{mink, LorentzVec};
use crate::models::{
    classify_hypersphere_in_span, lift, Circumsphere, HPoint, ModelPoint,
};
use crate::scalar::{rat, rat_from_f64, GeomScalar, Rat, Sign};
use crate::voronoi::{geometric_dual, VoronoiDiagram};

pub const MAX_ORACLE_SITES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("too many sites for the oracle (cap {MAX_ORACLE_SITES})")]
    TooManySites,
    #[error("oracle only supports 2-dimensional sites")]
    WrongDimension,
    #[error(transparent)]
    Delaunay(#[from] crate::delaunay::DelaunayError),
}

/// Outcome of one oracle comparison.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub instance_hash: u64,
    pub oracle: &'static str,
    pub matched: bool,
    pub mismatches: Vec<String>,
}

/// Cells as `(dim, sorted site ids)`, the comparison currency of oracles.
pub type CellSet = Vec<(usize, Vec<usize>)>;

fn hash_sites(sites: &[HPoint<Rat>]) -> u64 {
    let mut h = DefaultHasher::new();
    for s in sites {
        for c in &s.vec().coords {
            c.to_string().hash(&mut h);
        }
    }
    h.finish()
}

/// Empty-circumsphere enumeration: every spanning subset's hypersphere is
/// tested for emptiness; kept contact sets are closed under faces by
/// recursive support-plane enumeration.
pub fn brute_force_delaunay(sites: &[HPoint<Rat>]) -> Result<CellSet, VerifyError> {
    if sites.len() > MAX_ORACLE_SITES {
        return Err(VerifyError::TooManySites);
    }
    // dedup
    let mut pts: Vec<HPoint<Rat>> = Vec::new();
    for s in sites {
        if !pts.contains(s) {
            pts.push(s.clone());
        }
    }
    if pts.is_empty() {
        return Ok(Vec::new());
    }
    if pts.len() == 1 {
        return Ok(vec![(0, vec![0])]);
    }
    let d = pts[0].vec().dim();

    // linear span of the sites
    let mut span: Vec<LorentzVec<Rat>> = Vec::new();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for p in &pts {
        rows.push(p.vec().coords.clone());
        if linalg::rank(&rows, 0.0) == rows.len() {
            span.push(p.vec().clone());
        } else {
            rows.pop();
        }
    }
    let m = span.len();
    let span_opt = if m == d { None } else { Some(span.as_slice()) };

    // enumerate m-subsets spanning a hyperplane of the span
    let mut kept: Vec<Vec<usize>> = Vec::new();
    let mut subset: Vec<usize> = (0..m).collect();
    let n = pts.len();
    loop {
        let chosen: Vec<HPoint<Rat>> = subset.iter().map(|&i| pts[i].clone()).collect();
        if let Ok(sphere) = classify_hypersphere_in_span(&chosen, span_opt) {
            if !matches!(sphere, Circumsphere::TotallyGeodesic { .. }) {
                let mut on: Vec<usize> = Vec::new();
                let mut empty = true;
                for (i, p) in pts.iter().enumerate() {
                    if sphere.on_sphere(p.vec()) {
                        on.push(i);
                    } else if sphere.strictly_inside(p.vec()) {
                        empty = false;
                        break;
                    }
                }
                if empty {
                    on.sort_unstable();
                    if !kept.contains(&on) {
                        kept.push(on);
                    }
                }
            }
        }
        // next m-subset of 0..n
        let mut k = m;
        let mut done = true;
        while k > 0 {
            k -= 1;
            subset[k] += 1;
            if subset[k] <= n - (m - k) {
                for j in k + 1..m {
                    subset[j] = subset[j - 1] + 1;
                }
                done = false;
                break;
            }
        }
        if done {
            break;
        }
    }

    // close under faces
    let mut cells: Vec<(usize, Vec<usize>)> = Vec::new();
    for c in kept {
        close_under_faces(&pts, &c, &mut cells);
    }
    cells.sort();
    cells.dedup();
    Ok(cells)
}

/// Recursive face closure of a cell given by its vertex ids (points in
/// convex position on a sphere): enumerate in-plane support hyperplanes
/// at every level.
fn close_under_faces(pts: &[HPoint<Rat>], ids: &[usize], out: &mut Vec<(usize, Vec<usize>)>) {
    let rank = affine_rank_of(pts, ids);
    let entry = (rank, ids.to_vec());
    if out.contains(&entry) {
        return;
    }
    out.push(entry);
    if rank == 0 {
        return;
    }
    if rank == 1 {
        // endpoints along the segment: extreme in any nonzero direction
        let a = pts[ids[0]].vec();
        let b = pts[*ids.last().unwrap()].vec();
        let dir = b.sub(a);
        let mut best_lo = ids[0];
        let mut best_hi = ids[0];
        for &i in ids {
            let t = dir.euclid_dot(pts[i].vec());
            if t < dir.euclid_dot(pts[best_lo].vec()) {
                best_lo = i;
            }
            if t > dir.euclid_dot(pts[best_hi].vec()) {
                best_hi = i;
            }
        }
        close_under_faces(pts, &[best_lo], out);
        close_under_faces(pts, &[best_hi], out);
        return;
    }
    // reduce to affine coordinates of the cell's hull plane and enumerate
    // one-sided hyperplanes through rank-subsets
    let base = pts[ids[0]].vec();
    let mut basis: Vec<LorentzVec<Rat>> = Vec::new();
    let mut rows: Vec<Vec<Rat>> = Vec::new();
    for &i in &ids[1..] {
        let v = pts[i].vec().sub(base);
        rows.push(v.coords.clone());
        if linalg::rank(&rows, 0.0) == rows.len() {
            basis.push(v);
        } else {
            rows.pop();
        }
    }
    let k = basis.len();
    debug_assert_eq!(k, rank);
    let a: Vec<Vec<Rat>> = (0..base.dim())
        .map(|r| basis.iter().map(|b| b.coords[r].clone()).collect())
        .collect();
    let coords: Vec<Vec<Rat>> = ids
        .iter()
        .map(|&i| {
            linalg::solve_consistent(&a, &pts[i].vec().sub(base).coords, 0.0)
                .expect("cell point lies in its own affine hull")
        })
        .collect();
    // hyperplanes through k-subsets of the reduced points
    let nn = ids.len();
    let mut sel: Vec<usize> = (0..k).collect();
    loop {
        let srows: Vec<Vec<Rat>> = sel[1..]
            .iter()
            .map(|&i| {
                coords[i]
                    .iter()
                    .zip(&coords[sel[0]])
                    .map(|(x, y)| x.clone() - y)
                    .collect()
            })
            .collect();
        if linalg::rank(&srows, 0.0) == k - 1 {
            if let Some(normal) = linalg::kernel_vector(&srows, 0.0) {
                let c0 = dotv(&normal, &coords[sel[0]]);
                let mut pos = false;
                let mut neg = false;
                let mut on = Vec::new();
                for (j, cc) in coords.iter().enumerate() {
                    match (dotv(&normal, cc) - c0.clone()).sign() {
                        Sign::Pos => pos = true,
                        Sign::Neg => neg = true,
                        Sign::Zero => on.push(ids[j]),
                    }
                }
                if !(pos && neg) && on.len() < ids.len() {
                    on.sort_unstable();
                    close_under_faces(pts, &on, out);
                }
            }
        }
        let mut kk = k;
        let mut done = true;
        while kk > 0 {
            kk -= 1;
            sel[kk] += 1;
            if sel[kk] <= nn - (k - kk) {
                for j in kk + 1..k {
                    sel[j] = sel[j - 1] + 1;
                }
                done = false;
                break;
            }
        }
        if done {
            break;
        }
    }
}

fn affine_rank_of(pts: &[HPoint<Rat>], ids: &[usize]) -> usize {
    if ids.len() <= 1 {
        return 0;
    }
    let base = pts[ids[0]].vec();
    let rows: Vec<Vec<Rat>> =
        ids[1..].iter().map(|&i| pts[i].vec().sub(base).coords.clone()).collect();
    linalg::rank(&rows, 0.0)
}

fn dotv(a: &[Rat], b: &[Rat]) -> Rat {
    let mut acc = rat(0, 1);
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.clone() * y;
    }
    acc
}

/// Compare the hull pipeline against the brute-force oracle.
pub fn delaunay_oracle_report(sites: &[HPoint<Rat>]) -> Result<OracleReport, VerifyError> {
    let tess = delaunay_tessellation(sites, &HullOptions::default())?;
    let ours = cell_signature(&tess);
    let brute = brute_force_delaunay(&tess.sites)?;
    let mut mismatches = Vec::new();
    for c in &ours {
        if !brute.contains(c) {
            mismatches.push(format!("hull produced {c:?} the oracle does not"));
        }
    }
    for c in &brute {
        if !ours.contains(c) {
            mismatches.push(format!("oracle produced {c:?} the hull does not"));
        }
    }
    Ok(OracleReport {
        instance_hash: hash_sites(&tess.sites),
        oracle: "brute_force_delaunay",
        matched: mismatches.is_empty(),
        mismatches,
    })
}

/// The inside-circumdisk Euclidean Delaunay subcomplex of the Poincare
/// coordinates, by brute force. Matches the geometric dual complex.
pub fn poincare_euclidean_oracle(sites: &[HPoint<Rat>]) -> Result<CellSet, VerifyError> {
    if sites.len() > MAX_ORACLE_SITES {
        return Err(VerifyError::TooManySites);
    }
    if sites.first().map_or(0, |s| s.dim()) != 2 {
        return Err(VerifyError::WrongDimension);
    }
    let pts: Vec<Vec<Rat>> = sites.iter().map(|s| s.to_poincare()).collect();
    let n = pts.len();
    let mut cells: CellSet = Vec::new();
    // vertices always qualify (arbitrarily small circles around a site)
    for i in 0..n {
        cells.push((0, vec![i]));
    }
    // edges: does some circle through the pair separate it from the rest
    // while staying strictly inside the unit disk?
    for i in 0..n {
        for j in (i + 1)..n {
            if edge_has_empty_inside_disk(&pts, i, j) {
                cells.push((1, vec![i, j]));
            }
        }
    }
    // triangles (merged across cocircular groups)
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let Some((c, r2)) = circumcircle(&pts[i], &pts[j], &pts[k]) else {
                    continue;
                };
                let mut on = Vec::new();
                let mut empty = true;
                for (s, p) in pts.iter().enumerate() {
                    let d2 = dist2(p, &c);
                    match (d2 - r2.clone()).sign() {
                        Sign::Zero => on.push(s),
                        Sign::Neg => {
                            empty = false;
                            break;
                        }
                        Sign::Pos => {}
                    }
                }
                if !empty {
                    continue;
                }
                // strictly inside the unit disk: sqrt(|c|²) + sqrt(r²) < 1
                if !sqrt_sum_less_than_one(&dist2(&c, &[rat(0, 1), rat(0, 1)]), &r2) {
                    continue;
                }
                on.sort_unstable();
                let entry = (2usize, on);
                if !cells.contains(&entry) {
                    cells.push(entry);
                }
            }
        }
    }
    cells.sort();
    cells.dedup();
    Ok(cells)
}

/// Exact test for `sqrt(a) + sqrt(b) < 1` with nonnegative rationals.
fn sqrt_sum_less_than_one(a: &Rat, b: &Rat) -> bool {
    let one = rat(1, 1);
    let rest = one - a - b;
    if rest.sign() != Sign::Pos {
        return false;
    }
    // 2 sqrt(ab) < rest  <=>  4ab < rest²
    (rat(4, 1) * a * b - rest.clone() * &rest).sign() == Sign::Neg
}

fn dist2(p: &[Rat], q: &[Rat]) -> Rat {
    let dx = p[0].clone() - &q[0];
    let dy = p[1].clone() - &q[1];
    dx.clone() * &dx + dy.clone() * &dy
}

/// Euclidean circumcircle of a non-collinear triple: center and r².
fn circumcircle(p: &[Rat], q: &[Rat], r: &[Rat]) -> Option<(Vec<Rat>, Rat)> {
    // 2(q-p)·c = |q|²-|p|², 2(r-p)·c = |r|²-|p|²
    let a = vec![
        vec![rat(2, 1) * (q[0].clone() - &p[0]), rat(2, 1) * (q[1].clone() - &p[1])],
        vec![rat(2, 1) * (r[0].clone() - &p[0]), rat(2, 1) * (r[1].clone() - &p[1])],
    ];
    let b = vec![
        dist2(q, &[rat(0, 1), rat(0, 1)]) - dist2(p, &[rat(0, 1), rat(0, 1)]),
        dist2(r, &[rat(0, 1), rat(0, 1)]) - dist2(p, &[rat(0, 1), rat(0, 1)]),
    ];
    let c = linalg::solve(&a, &b, 0.0)?;
    let r2 = dist2(p, &c);
    Some((c, r2))
}

/// Whether some circle through sites `i`, `j` has every other site
/// strictly outside and its closed disk strictly inside the unit disk.
///
/// Centers live on the perpendicular bisector `c(t) = mid + t·dir`; the
/// emptiness conditions are affine in `t`, giving an open interval, and
/// `|c(t)| + r(t)` is convex with a rational unconstrained minimizer (a
/// reflection argument), so the decision reduces to exact sign tests.
fn edge_has_empty_inside_disk(pts: &[Vec<Rat>], i: usize, j: usize) -> bool {
    let y = &pts[i];
    let z = &pts[j];
    let mid = vec![(y[0].clone() + &z[0]) / rat(2, 1), (y[1].clone() + &z[1]) / rat(2, 1)];
    let dir = vec![-(z[1].clone() - &y[1]), z[0].clone() - &y[0]]; // rot90(z-y)
    // empty conditions: for s != y,z: alpha_s t + beta_s > 0
    let mut t_lo: Option<Rat> = None;
    let mut t_hi: Option<Rat> = None;
    for (s, p) in pts.iter().enumerate() {
        if s == i || s == j {
            continue;
        }
        // |s - c|² > |y - c|²  <=>  |s|²-|y|² - 2(s-y)·c > 0
        let alpha = rat(-2, 1) * ((p[0].clone() - &y[0]) * &dir[0] + (p[1].clone() - &y[1]) * &dir[1]);
        let beta = dist2(p, &[rat(0, 1), rat(0, 1)]) - dist2(y, &[rat(0, 1), rat(0, 1)])
            - rat(2, 1) * ((p[0].clone() - &y[0]) * &mid[0] + (p[1].clone() - &y[1]) * &mid[1]);
        match alpha.sign() {
            Sign::Zero => {
                if beta.sign() != Sign::Pos {
                    return false;
                }
            }
            Sign::Pos => {
                let bound = -beta / alpha;
                if t_lo.as_ref().map_or(true, |l| bound > *l) {
                    t_lo = Some(bound);
                }
            }
            Sign::Neg => {
                let bound = -beta / alpha;
                if t_hi.as_ref().map_or(true, |h| bound < *h) {
                    t_hi = Some(bound);
                }
            }
        }
    }
    if let (Some(l), Some(h)) = (&t_lo, &t_hi) {
        if !(l < h) {
            return false;
        }
    }
    // unconstrained minimizer of |c(t)| + |c(t) - y| on the bisector line:
    // reflect through the line or cross it, both rational
    let t_star = min_sum_distances_on_line(&mid, &dir, y);
    let t_min = match (&t_lo, &t_hi) {
        (Some(l), _) if t_star < *l => l.clone(),
        (_, Some(h)) if t_star > *h => h.clone(),
        _ => t_star,
    };
    let c = vec![mid[0].clone() + t_min.clone() * &dir[0], mid[1].clone() + t_min.clone() * &dir[1]];
    let a2 = dist2(&c, &[rat(0, 1), rat(0, 1)]);
    let r2 = dist2(&c, y);
    if !sqrt_sum_less_than_one(&a2, &r2) {
        return false;
    }
    // phi(t_min) < 1; a strictly interior t then exists whenever the
    // interval is nondegenerate (phi is continuous and convex)
    let strictly_inside = |t: &Rat| {
        t_lo.as_ref().map_or(true, |l| t > l) && t_hi.as_ref().map_or(true, |h| t < h)
    };
    if strictly_inside(&t_min) {
        return true;
    }
    match (&t_lo, &t_hi) {
        (Some(l), Some(h)) => l < h,
        _ => true,
    }
}

/// Minimizer of `t ↦ |c(t)| + |c(t) - y|` over the line `c(t) = mid + t·dir`.
fn min_sum_distances_on_line(mid: &[Rat], dir: &[Rat], y: &[Rat]) -> Rat {
    // signed side values of 0 and y relative to the line
    let side = |p: &[Rat]| -> Rat {
        // cross(dir, p - mid)
        dir[0].clone() * &(p[1].clone() - &mid[1]) - dir[1].clone() * &(p[0].clone() - &mid[0])
    };
    let s0 = side(&[rat(0, 1), rat(0, 1)]);
    let sy = side(y);
    let target: Vec<Rat> = if (s0.clone() * &sy).sign() == Sign::Pos {
        // same side: reflect y across the line
        let d2 = dir[0].clone() * &dir[0] + dir[1].clone() * &dir[1];
        let w = vec![y[0].clone() - &mid[0], y[1].clone() - &mid[1]];
        let proj = (w[0].clone() * &dir[0] + w[1].clone() * &dir[1]) / d2;
        let foot = vec![mid[0].clone() + proj.clone() * &dir[0], mid[1].clone() + proj * &dir[1]];
        vec![
            rat(2, 1) * &foot[0] - y[0].clone(),
            rat(2, 1) * &foot[1] - y[1].clone(),
        ]
    } else {
        y.to_vec()
    };
    // intersect the segment/line from 0 to target with the bisector line:
    // solve mid + t dir = u * target
    let a = vec![
        vec![dir[0].clone(), -target[0].clone()],
        vec![dir[1].clone(), -target[1].clone()],
    ];
    let b = vec![-mid[0].clone(), -mid[1].clone()];
    match linalg::solve(&a, &b, 0.0) {
        Some(sol) => sol[0].clone(),
        None => {
            // 0-target direction parallel to the line: minimize |c| alone
            let d2 = dir[0].clone() * &dir[0] + dir[1].clone() * &dir[1];
            -(mid[0].clone() * &dir[0] + mid[1].clone() * &dir[1]) / d2
        }
    }
}

/// Compare the geometric dual against the Euclidean oracle.
pub fn dual_oracle_report(sites: &[HPoint<Rat>]) -> Result<OracleReport, VerifyError> {
    let tess = delaunay_tessellation(sites, &HullOptions::default())?;
    let dual = geometric_dual(&tess);
    let mut ours: CellSet = dual
        .cells
        .iter()
        .map(|c| (tess.cells[c.dual_cell].dim, c.site_ids.clone()))
        .collect();
    ours.sort();
    let oracle = poincare_euclidean_oracle(&tess.sites)?;
    let mut mismatches = Vec::new();
    for c in &ours {
        if !oracle.contains(c) {
            mismatches.push(format!("dual has {c:?}, oracle does not"));
        }
    }
    for c in &oracle {
        if !ours.contains(c) {
            mismatches.push(format!("oracle has {c:?}, dual does not"));
        }
    }
    Ok(OracleReport {
        instance_hash: hash_sites(&tess.sites),
        oracle: "poincare_euclidean",
        matched: mismatches.is_empty(),
        mismatches,
    })
}

/// Argmin-distance membership check on uniform samples from a hyperbolic
/// ball around the site centroid, with exact sign comparisons.
pub fn voronoi_membership_oracle(
    tess: &Tessellation<Rat>,
    dual: &VoronoiDiagram<Rat>,
    samples: usize,
    seed: u64,
) -> OracleReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = Vec::new();

    // centroid in hyperboloid coordinates, projected to the sheet (float),
    // then the ball radius covering all sites plus one
    let dim = tess.sites[0].vec().dim();
    let mut centroid = vec![0.0f64; dim];
    for s in &tess.sites {
        for (c, v) in centroid.iter_mut().zip(s.to_f64()) {
            *c += v;
        }
    }
    let q = {
        let mut s = -centroid[0] * centroid[0];
        for v in &centroid[1..] {
            s += v * v;
        }
        (-s).sqrt()
    };
    for c in centroid.iter_mut() {
        *c /= q;
    }
    let radius = tess
        .sites
        .iter()
        .map(|s| {
            // cosh of the distance to the centroid, raw float arithmetic
            let v = s.to_f64();
            let mut c = centroid[0] * v[0];
            for (a, b) in centroid[1..].iter().zip(&v[1..]) {
                c -= a * b;
            }
            c.max(1.0).acosh()
        })
        .fold(0.0f64, f64::max)
        + 1.0;

    // hyperbolic translation (boost) taking the basepoint to the centroid
    let c0 = centroid[0];
    let cs = &centroid[1..];
    let boost = |v: &[f64]| -> Vec<f64> {
        let spatial_dot: f64 = cs.iter().zip(&v[1..]).map(|(a, b)| a * b).sum();
        let mut out = vec![c0 * v[0] + spatial_dot];
        for (i, ci) in cs.iter().enumerate() {
            out.push(ci * v[0] + v[1 + i] + ci * spatial_dot / (1.0 + c0));
        }
        out
    };

    for k in 0..samples {
        // uniform in the hyperbolic ball: angle uniform, radius by the
        // cosh-area inverse CDF; boost to the centroid and rationalize the
        // Poincare coordinates
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let u: f64 = rng.gen();
        let r = (1.0 + u * ((radius).cosh() - 1.0)).acosh();
        let raw = boost(&[r.cosh(), r.sinh() * theta.cos(), r.sinh() * theta.sin()]);
        let Ok(sample_f) = HPoint::<f64>::from_vec(LorentzVec::new(raw)) else {
            continue;
        };
        let pc = {
            let v = sample_f.to_poincare();
            ModelPoint::poincare(vec![
                rat_from_f64(v[0], 1 << 20),
                rat_from_f64(v[1], 1 << 20),
            ])
        };
        let Ok(sample) = lift(&pc) else { continue };

        // argmin of the distance = argmax of x∘s, exact
        let vals: Vec<Rat> =
            tess.sites.iter().map(|s| mink(sample.vec(), s.vec())).collect();
        let max = vals.iter().max().unwrap().clone();
        let argmin: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] == max).collect();

        let mut holders: Vec<usize> = dual
            .cells
            .iter()
            .filter(|c| {
                c.dim == tess.ambient_dim && dual.cell_contains(tess, c, sample.vec())
            })
            .map(|c| c.site_ids[0])
            .collect();
        holders.sort_unstable();
        if holders != argmin {
            mismatches.push(format!(
                "sample {k}: argmin {argmin:?} vs cells {holders:?}"
            ));
        }
    }
    OracleReport {
        instance_hash: hash_sites(&tess.sites),
        oracle: "voronoi_membership",
        matched: mismatches.is_empty(),
        mismatches,
    }
}

/// Random exact instance: Poincare coordinates with small denominators.
pub fn random_instance(rng: &mut ChaCha8Rng, n: usize) -> Vec<HPoint<Rat>> {
    let mut sites = Vec::with_capacity(n);
    while sites.len() < n {
        let p = ModelPoint::poincare(vec![
            rat(rng.gen_range(-56..=56), 64),
            rat(rng.gen_range(-56..=56), 64),
        ]);
        if let Ok(s) = lift(&p) {
            if !sites.contains(&s) {
                sites.push(s);
            }
        }
    }
    sites
}

#[derive(Debug, Default)]
pub struct CorpusReport {
    pub instances: usize,
    pub delaunay_mismatches: usize,
    pub dual_mismatches: usize,
    pub contravariance_violations: usize,
    pub membership_mismatches: usize,
    pub details: Vec<String>,
}

impl CorpusReport {
    pub fn ok(&self) -> bool {
        self.delaunay_mismatches == 0
            && self.dual_mismatches == 0
            && self.contravariance_violations == 0
            && self.membership_mismatches == 0
    }
}

/// Run the oracle battery over a random corpus. Instances run in
/// parallel under the `parallel` feature.
pub fn run_corpus(
    instances: usize,
    site_range: (usize, usize),
    seed: u64,
    membership_samples: usize,
) -> CorpusReport {
    let mut seeds = Vec::with_capacity(instances);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..instances {
        seeds.push(rng.gen::<u64>());
    }
    let results = exec::map_collect(seeds, move |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let n = rng.gen_range(site_range.0..=site_range.1);
        let sites = random_instance(&mut rng, n);
        let mut delaunay_bad = Vec::new();
        let mut dual_bad = Vec::new();
        let mut contra = 0usize;
        let mut member_bad = Vec::new();
        match delaunay_oracle_report(&sites) {
            Ok(r) if !r.matched => delaunay_bad.extend(r.mismatches),
            Err(e) => delaunay_bad.push(format!("error: {e}")),
            _ => {}
        }
        match dual_oracle_report(&sites) {
            Ok(r) if !r.matched => dual_bad.extend(r.mismatches),
            Err(e) => dual_bad.push(format!("error: {e}")),
            _ => {}
        }
        if let Ok(tess) = delaunay_tessellation(&sites, &HullOptions::default()) {
            let dual = geometric_dual(&tess);
            let report = crate::voronoi::check_contravariance(&tess, &dual);
            contra = report.violations.len();
            if membership_samples > 0 {
                let r = voronoi_membership_oracle(&tess, &dual, membership_samples, s ^ 0x5eed);
                if !r.matched {
                    member_bad.extend(r.mismatches);
                }
            }
        }
        (delaunay_bad, dual_bad, contra, member_bad)
    });
    let mut report = CorpusReport { instances, ..Default::default() };
    for (dl, du, cv, mb) in results {
        if !dl.is_empty() {
            report.delaunay_mismatches += 1;
            report.details.extend(dl);
        }
        if !du.is_empty() {
            report.dual_mismatches += 1;
            report.details.extend(du);
        }
        report.contravariance_violations += cv;
        if !mb.is_empty() {
            report.membership_mismatches += 1;
            report.details.extend(mb);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn brute_force_matches_pipeline_on_fixtures() {
        for (a, b) in [((1i64, 1i64), (1i64, 2i64)), ((1, 2), (1, 1)), ((1, 5), (11, 10))] {
            let sites = sweep_sites(a, b);
            let r = delaunay_oracle_report(&sites).unwrap();
            assert!(r.matched, "{:?}", r.mismatches);
        }
    }

    #[test]
    fn brute_force_quad_and_singleton() {
        let quad = vec![
            hp(&[(5, 3), (4, 3), (0, 1)]),
            hp(&[(5, 3), (-4, 3), (0, 1)]),
            hp(&[(5, 3), (0, 1), (4, 3)]),
            hp(&[(5, 3), (0, 1), (-4, 3)]),
        ];
        let cells = brute_force_delaunay(&quad).unwrap();
        assert!(cells.contains(&(2, vec![0, 1, 2, 3])));
        assert_eq!(cells.iter().filter(|c| c.0 == 2).count(), 1);
        assert_eq!(cells.iter().filter(|c| c.0 == 1).count(), 4);
        let r = delaunay_oracle_report(&quad).unwrap();
        assert!(r.matched, "{:?}", r.mismatches);

        let single = vec![hp(&[(1, 1), (0, 1), (0, 1)])];
        assert_eq!(brute_force_delaunay(&single).unwrap(), vec![(0, vec![0])]);
        let r = delaunay_oracle_report(&single).unwrap();
        assert!(r.matched);

        let too_many: Vec<HPoint<Rat>> = (0..13)
            .map(|i| {
                lift(&ModelPoint::poincare(vec![rat(i, 20), rat(1, 3)])).unwrap()
            })
            .collect();
        assert!(matches!(brute_force_delaunay(&too_many), Err(VerifyError::TooManySites)));
    }

    #[test]
    fn euclidean_oracle_matches_dual_on_fixtures() {
        // left: triangle kept (circumdisk strictly inside)
        let r = dual_oracle_report(&sweep_sites((1, 1), (1, 2))).unwrap();
        assert!(r.matched, "{:?}", r.mismatches);
        // middle (horocycle: tangent disk) and right (crossing): dropped
        for (a, b) in [((1i64, 2i64), (1i64, 1i64)), ((1, 5), (11, 10))] {
            let sites = sweep_sites(a, b);
            let oracle = poincare_euclidean_oracle(&sites).unwrap();
            assert!(!oracle.iter().any(|c| c.0 == 2), "triangle must be dropped");
            let r = dual_oracle_report(&sites).unwrap();
            assert!(r.matched, "{:?}", r.mismatches);
        }
        // symmetric square: quad kept
        let quad = vec![
            hp(&[(5, 3), (4, 3), (0, 1)]),
            hp(&[(5, 3), (-4, 3), (0, 1)]),
            hp(&[(5, 3), (0, 1), (4, 3)]),
            hp(&[(5, 3), (0, 1), (-4, 3)]),
        ];
        let oracle = poincare_euclidean_oracle(&quad).unwrap();
        assert!(oracle.contains(&(2, vec![0, 1, 2, 3])));
        let r = dual_oracle_report(&quad).unwrap();
        assert!(r.matched, "{:?}", r.mismatches);
    }

    #[test]
    fn membership_oracle_fixture() {
        let sites = sweep_sites((1, 1), (1, 2));
        let tess = delaunay_tessellation(&sites, &HullOptions::default()).unwrap();
        let dual = geometric_dual(&tess);
        let report = voronoi_membership_oracle(&tess, &dual, 500, 99);
        assert!(report.matched, "{:?}", report.mismatches);
        // a sample equal to a site lands in its own cell
        let own = tess.sites[1].clone();
        let vals: Vec<Rat> =
            tess.sites.iter().map(|s| mink(own.vec(), s.vec())).collect();
        let max = vals.iter().max().unwrap();
        assert_eq!(vals.iter().position(|v| v == max), Some(1));
    }

    #[test]
    fn small_corpus_is_clean() {
        let report = run_corpus(25, (4, 9), 2024, 50);
        assert!(report.ok(), "{:?}", report.details);
    }
}
