//! Coplanar-facet merging and face-lattice extraction.

use std::collections::HashMap;

use super::incremental::SimplicialHull;
use super::{HullError, HullFace, MergedFacet};
use crate::linalg;
use crate::lorentz::LorentzVec;
use crate::scalar::{GeomScalar, Sign};

/// Same support plane with the same outward orientation.
fn same_plane<S: GeomScalar>(
    n1: &LorentzVec<S>,
    c1: &S,
    n2: &LorentzVec<S>,
    c2: &S,
    eps: f64,
) -> bool {
    if S::EXACT {
        // positive proportionality of (normal, offset)
        let k = match n1.coords.iter().position(|v| v.sign() != Sign::Zero) {
            Some(k) => k,
            None => return false,
        };
        if n2.coords[k].sign() != n1.coords[k].sign() {
            return false;
        }
        let a = &n1.coords[k];
        let b = &n2.coords[k];
        for (x, y) in n1.coords.iter().zip(&n2.coords) {
            if x.clone() * b != y.clone() * a {
                return false;
            }
        }
        c1.clone() * b == c2.clone() * a
    } else {
        // normals are unit length in float mode
        let close = n1
            .coords
            .iter()
            .zip(&n2.coords)
            .all(|(x, y)| (x.to_f64() - y.to_f64()).abs() <= eps);
        let scale = 1.0 + c1.to_f64().abs();
        close && (c1.to_f64() - c2.to_f64()).abs() <= eps * scale
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }
    fn find(&mut self, i: usize) -> usize {
        if self.0[i] != i {
            let r = self.find(self.0[i]);
            self.0[i] = r;
        }
        self.0[i]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Merge ridge-adjacent coplanar simplicial facets into polytopal faces.
pub(crate) fn merge_facets<S: GeomScalar>(
    hull: &SimplicialHull<S>,
    eps_merge: f64,
) -> Vec<MergedFacet<S>> {
    let mut uf = UnionFind::new(hull.facets.len());
    for (fid, f) in hull.alive_facets() {
        for &g in &f.neighbors {
            let gid = g as usize;
            if gid <= fid || !hull.facets[gid].alive {
                continue;
            }
            let gf = &hull.facets[gid];
            if same_plane(&f.normal, &f.offset, &gf.normal, &gf.offset, eps_merge) {
                uf.union(fid, gid);
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for (fid, _) in hull.alive_facets() {
        groups.entry(uf.find(fid)).or_default().push(fid);
    }
    let mut merged: Vec<MergedFacet<S>> = groups
        .into_iter()
        .map(|(rep, members)| {
            let mut vertices: Vec<usize> = members
                .iter()
                .flat_map(|&m| hull.facets[m].vertices.iter().map(|&v| v as usize))
                .collect();
            vertices.sort_unstable();
            vertices.dedup();
            MergedFacet {
                vertices,
                normal: hull.facets[rep].normal.clone(),
                offset: hull.facets[rep].offset.clone(),
                simplices: members
                    .iter()
                    .map(|&m| hull.facets[m].vertices.iter().map(|&v| v as usize).collect())
                    .collect(),
            }
        })
        .collect();
    merged.sort_by(|a, b| a.vertices.cmp(&b.vertices));
    merged
}

/// Closure of the merged facet vertex sets under pairwise intersection,
/// graded by affine rank. Every proper face of a polytope arises as an
/// intersection of facets, so this enumerates the full face lattice.
pub(crate) fn face_lattice<S: GeomScalar>(
    merged: &[MergedFacet<S>],
    points: &[LorentzVec<S>],
    eps: f64,
) -> Result<Vec<HullFace>, HullError> {
    let mut sets: Vec<Vec<usize>> = merged.iter().map(|m| m.vertices.clone()).collect();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    for (i, s) in sets.iter().enumerate() {
        seen.insert(s.clone(), i);
    }
    let mut head = 0;
    while head < sets.len() {
        let current = sets[head].clone();
        for m in merged {
            let inter: Vec<usize> =
                current.iter().copied().filter(|v| m.vertices.binary_search(v).is_ok()).collect();
            if inter.is_empty() || inter == current {
                continue;
            }
            if !seen.contains_key(&inter) {
                seen.insert(inter.clone(), sets.len());
                sets.push(inter);
            }
        }
        head += 1;
    }

    // grade by affine rank of the vertex coordinates
    let mut graded: Vec<(usize, Vec<usize>)> = sets
        .into_iter()
        .map(|s| {
            let dim = affine_rank(points, &s, eps);
            (dim, s)
        })
        .collect();
    graded.sort();

    let mut faces: Vec<HullFace> = graded
        .iter()
        .enumerate()
        .map(|(id, (dim, s))| HullFace {
            id,
            dim: *dim,
            vertices: s.clone(),
            facet_ids: merged
                .iter()
                .enumerate()
                .filter(|(_, m)| s.iter().all(|v| m.vertices.binary_search(v).is_ok()))
                .map(|(i, _)| i)
                .collect(),
            parents: Vec::new(),
            children: Vec::new(),
            visible: false,
        })
        .collect();

    // parent/child: graded poset, adjacent ranks with inclusion
    for i in 0..faces.len() {
        for j in (i + 1)..faces.len() {
            if faces[j].dim != faces[i].dim + 1 {
                continue;
            }
            if is_subset(&faces[i].vertices, &faces[j].vertices) {
                faces[i].parents.push(j);
                faces[j].children.push(i);
            }
        }
    }
    Ok(faces)
}

pub(crate) fn affine_rank<S: GeomScalar>(points: &[LorentzVec<S>], ids: &[usize], eps: f64) -> usize {
    if ids.len() <= 1 {
        return 0;
    }
    let base = &points[ids[0]];
    let rows: Vec<Vec<S>> = ids[1..].iter().map(|&i| points[i].sub(base).coords).collect();
    linalg::rank(&rows, eps)
}

pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|v| b.binary_search(v).is_ok())
}
