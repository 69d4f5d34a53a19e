//! Randomized incremental convex hull with conflict lists.
//!
//! Facets are oriented simplices whose Euclidean outward plane
//! `{x : η·x = c}` keeps every input point on the `η·x <= c` side. A point
//! lying exactly on a facet plane counts as seeing the facet; this keeps
//! horizon ridges strictly off the apex's span, so new facets are never
//! degenerate, and coplanar patches produced by cospherical inputs are
//! reunified by the merge pass afterwards.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::HullError;
use crate::linalg;
use crate::lorentz::LorentzVec;
use crate::scalar::{GeomScalar, Sign};

#[derive(Debug, Clone)]
pub(crate) struct Facet<S> {
    pub vertices: Vec<u32>,
    /// `neighbors[i]` shares the ridge opposite `vertices[i]`.
    pub neighbors: Vec<u32>,
    pub normal: LorentzVec<S>,
    pub offset: S,
    pub conflicts: Vec<u32>,
    pub alive: bool,
}

#[derive(Debug)]
pub(crate) struct SimplicialHull<S> {
    pub facets: Vec<Facet<S>>,
}

impl<S: GeomScalar> SimplicialHull<S> {
    pub fn alive_facets(&self) -> impl Iterator<Item = (usize, &Facet<S>)> {
        self.facets.iter().enumerate().filter(|(_, f)| f.alive)
    }
}

fn above<S: GeomScalar>(normal: &LorentzVec<S>, offset: &S, p: &LorentzVec<S>, eps: f64) -> Sign {
    let s = normal.euclid_dot(p) - offset.clone();
    if S::EXACT {
        s.sign()
    } else {
        let scale = S::from_f64_approx(1.0 + p.to_f64().iter().map(|v| v.abs()).sum::<f64>());
        s.sign_within(eps, &scale)
    }
}

/// Plane through the given vertex points, oriented so `interior` is on the
/// strict `< c` side.
fn facet_plane<S: GeomScalar>(
    pts: &[LorentzVec<S>],
    vertices: &[u32],
    interior: &LorentzVec<S>,
    eps: f64,
) -> Result<(LorentzVec<S>, S), HullError> {
    let base = &pts[vertices[0] as usize];
    let rows: Vec<Vec<S>> = vertices[1..]
        .iter()
        .map(|&v| pts[v as usize].sub(base).coords)
        .collect();
    let normal = linalg::kernel_vector(&rows, eps).ok_or(HullError::DegenerateFacet)?;
    let mut normal = LorentzVec::new(normal);
    if !S::EXACT {
        let n = normal.to_f64().iter().map(|v| v * v).sum::<f64>().sqrt();
        normal = normal.scale(&S::from_f64_approx(1.0 / n));
    }
    let mut offset = normal.euclid_dot(base);
    match above(&normal, &offset, interior, eps) {
        Sign::Neg => {}
        Sign::Pos => {
            normal = normal.neg();
            offset = -offset;
        }
        Sign::Zero => return Err(HullError::DegenerateFacet),
    }
    Ok((normal, offset))
}

/// Build the simplicial hull of full-dimensional `points` (affinely
/// spanning `R^D`). Insertion order is a seeded random permutation.
pub(crate) fn build<S: GeomScalar>(
    points: &[LorentzVec<S>],
    dim: usize,
    seed: u64,
    eps: f64,
) -> Result<SimplicialHull<S>, HullError> {
    assert!(dim >= 2, "one-dimensional hulls are handled by the caller");
    let n = points.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    // greedy affinely independent seed simplex in shuffled order
    let mut simplex: Vec<u32> = vec![order[0]];
    let mut diff_rows: Vec<Vec<S>> = Vec::new();
    for &i in &order[1..] {
        if simplex.len() == dim + 1 {
            break;
        }
        let d = points[i as usize].sub(&points[simplex[0] as usize]);
        diff_rows.push(d.coords.clone());
        if linalg::rank(&diff_rows, eps) == diff_rows.len() {
            simplex.push(i);
        } else {
            diff_rows.pop();
        }
    }
    if simplex.len() < dim + 1 {
        return Err(HullError::RankDeficient { rank: simplex.len().saturating_sub(1) });
    }

    // interior reference: centroid of the seed simplex
    let mut interior = LorentzVec::zero(dim);
    for &i in &simplex {
        interior = interior.add(&points[i as usize]);
    }
    let denom = S::from_int((dim + 1) as i64);
    interior = LorentzVec::new(interior.coords.into_iter().map(|c| c / denom.clone()).collect());

    let mut hull = SimplicialHull { facets: Vec::new() };
    // one facet opposite each simplex vertex
    for skip in 0..=dim {
        let vertices: Vec<u32> =
            simplex.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
        let (normal, offset) = facet_plane(points, &vertices, &interior, eps)?;
        let neighbors = vec![u32::MAX; dim];
        hull.facets.push(Facet { vertices, neighbors, normal, offset, conflicts: Vec::new(), alive: true });
    }
    // wire initial neighbors: facet skip_a and skip_b share the ridge
    // missing both simplex vertices
    for a in 0..=dim {
        for b in 0..=dim {
            if a == b {
                continue;
            }
            // facet a's ridge opposite simplex[b]
            let pos = hull.facets[a].vertices.iter().position(|&v| v == simplex[b]).unwrap();
            hull.facets[a].neighbors[pos] = b as u32;
        }
    }

    let mut inserted = vec![false; n];
    for &i in &simplex {
        inserted[i as usize] = true;
    }

    // initial conflicts
    let mut pconflicts: Vec<Vec<u32>> = vec![Vec::new(); n];
    for fid in 0..hull.facets.len() {
        let (normal, offset) = (hull.facets[fid].normal.clone(), hull.facets[fid].offset.clone());
        for q in 0..n as u32 {
            if inserted[q as usize] {
                continue;
            }
            if above(&normal, &offset, &points[q as usize], eps) != Sign::Neg {
                hull.facets[fid].conflicts.push(q);
                pconflicts[q as usize].push(fid as u32);
            }
        }
    }

    for &p in &order {
        if inserted[p as usize] {
            continue;
        }
        let visible: Vec<u32> = pconflicts[p as usize]
            .iter()
            .copied()
            .filter(|&f| hull.facets[f as usize].alive)
            .collect();
        if visible.is_empty() {
            continue; // interior point: appears in no face
        }
        inserted[p as usize] = true;
        let visible_set: std::collections::HashSet<u32> = visible.iter().copied().collect();

        // horizon: ridges between a visible facet and a kept neighbor
        struct HorizonEdge {
            ridge: Vec<u32>,
            keeper: u32,
            keeper_pos: usize,
            donor: u32,
        }
        let mut horizon: Vec<HorizonEdge> = Vec::new();
        for &f in &visible {
            let facet = &hull.facets[f as usize];
            for (k, &g) in facet.neighbors.iter().enumerate() {
                if visible_set.contains(&g) {
                    continue;
                }
                let ridge: Vec<u32> = facet
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .map(|(_, &v)| v)
                    .collect();
                // position of this ridge in the keeper's neighbor table
                let keeper = &hull.facets[g as usize];
                let keeper_pos = keeper
                    .vertices
                    .iter()
                    .position(|v| !ridge.contains(v))
                    .expect("keeper shares the ridge");
                horizon.push(HorizonEdge { ridge, keeper: g, keeper_pos, donor: f });
            }
        }

        // new facets: apex + ridge
        let mut new_ids: Vec<u32> = Vec::new();
        let mut ridge_map: std::collections::HashMap<Vec<u32>, (u32, usize)> =
            std::collections::HashMap::new();
        for edge in &horizon {
            let mut vertices = vec![p];
            vertices.extend_from_slice(&edge.ridge);
            let (normal, offset) = facet_plane(points, &vertices, &interior, eps)?;
            let fid = hull.facets.len() as u32;
            let mut neighbors = vec![u32::MAX; dim];
            neighbors[0] = edge.keeper; // across the ridge (opposite apex)
            hull.facets.push(Facet {
                vertices,
                neighbors,
                normal,
                offset,
                conflicts: Vec::new(),
                alive: true,
            });
            hull.facets[edge.keeper as usize].neighbors[edge.keeper_pos] = fid;
            new_ids.push(fid);

            // candidate conflicts: donor's plus keeper's lists
            let mut cand: Vec<u32> = Vec::new();
            cand.extend_from_slice(&hull.facets[edge.donor as usize].conflicts);
            cand.extend_from_slice(&hull.facets[edge.keeper as usize].conflicts);
            cand.sort_unstable();
            cand.dedup();
            let (normal, offset) =
                (hull.facets[fid as usize].normal.clone(), hull.facets[fid as usize].offset.clone());
            for q in cand {
                if inserted[q as usize] || q == p {
                    continue;
                }
                if above(&normal, &offset, &points[q as usize], eps) != Sign::Neg {
                    hull.facets[fid as usize].conflicts.push(q);
                    pconflicts[q as usize].push(fid);
                }
            }

            // wire the apex-side ridges among the new facets
            for skip in 1..dim {
                let sub: Vec<u32> = hull.facets[fid as usize]
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != 0 && j != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let mut key = sub;
                key.sort_unstable();
                match ridge_map.remove(&key) {
                    None => {
                        ridge_map.insert(key, (fid, skip));
                    }
                    Some((other, other_pos)) => {
                        hull.facets[fid as usize].neighbors[skip] = other;
                        hull.facets[other as usize].neighbors[other_pos] = fid;
                    }
                }
            }
        }
        debug_assert!(ridge_map.is_empty(), "unmatched apex ridge");

        for &f in &visible {
            hull.facets[f as usize].alive = false;
            hull.facets[f as usize].conflicts.clear();
        }
        let _ = &new_ids;
    }

    Ok(hull)
}
