use super::*;
use crate::lorentz::LorentzVec;
use crate::models::{lift, ModelPoint};
use crate::scalar::{rat, Rat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lv(coords: &[i64]) -> LorentzVec<Rat> {
    LorentzVec::from_ints(coords)
}

fn lvr(coords: &[(i64, i64)]) -> LorentzVec<Rat> {
    LorentzVec::new(coords.iter().map(|&(n, d)| rat(n, d)).collect())
}

/// Brute-force hull oracle: every affinely independent d-subset whose
/// plane has all points on one side is a support plane; facets are the
/// maximal on-plane vertex sets. Independent of the incremental code.
fn naive_facets(points: &[LorentzVec<Rat>], dim: usize) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut facets: Vec<Vec<usize>> = Vec::new();
    let mut subset: Vec<usize> = (0..dim).collect();
    loop {
        // plane through the subset
        let base = &points[subset[0]];
        let rows: Vec<Vec<Rat>> =
            subset[1..].iter().map(|&i| points[i].sub(base).coords.clone()).collect();
        if crate::linalg::rank(&rows, 0.0) == dim - 1 {
            if let Some(normal) = crate::linalg::kernel_vector(&rows, 0.0) {
                let normal = LorentzVec::new(normal);
                let c = normal.euclid_dot(base);
                let mut pos = false;
                let mut neg = false;
                let mut on = Vec::new();
                for (i, p) in points.iter().enumerate() {
                    match (normal.euclid_dot(p) - c.clone()).sign() {
                        crate::scalar::Sign::Pos => pos = true,
                        crate::scalar::Sign::Neg => neg = true,
                        crate::scalar::Sign::Zero => on.push(i),
                    }
                }
                if !(pos && neg) {
                    on.sort_unstable();
                    if !facets.contains(&on) {
                        facets.push(on);
                    }
                }
            }
        }
        // next subset
        let mut k = dim;
        loop {
            if k == 0 {
                facets.sort();
                return facets;
            }
            k -= 1;
            subset[k] += 1;
            if subset[k] <= n - (dim - k) {
                for j in k + 1..dim {
                    subset[j] = subset[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn face_count_by_dim(hull: &Hull<Rat>) -> Vec<usize> {
    let max = hull.faces.iter().map(|f| f.dim).max().unwrap_or(0);
    let mut counts = vec![0; max + 1];
    for f in &hull.faces {
        counts[f.dim] += 1;
    }
    counts
}

#[test]
fn tetrahedron() {
    let pts = vec![lv(&[0, 0, 0]), lv(&[1, 0, 0]), lv(&[0, 1, 0]), lv(&[0, 0, 1])];
    let hull = build_hull(&pts, 3, &HullOptions::default()).unwrap();
    assert!(!hull.flat);
    assert_eq!(hull.facets.len(), 4);
    assert_eq!(face_count_by_dim(&hull), vec![4, 6, 4]);
}

#[test]
fn interior_point_in_no_face() {
    let pts = vec![
        lv(&[0, 0, 0]),
        lv(&[4, 0, 0]),
        lv(&[0, 4, 0]),
        lv(&[0, 0, 4]),
        lv(&[1, 1, 1]),
    ];
    let hull = build_hull(&pts, 3, &HullOptions::default()).unwrap();
    assert_eq!(hull.facets.len(), 4);
    assert!(hull.faces.iter().all(|f| !f.vertices.contains(&4)));
}

#[test]
fn flat_square_is_one_visible_quad() {
    // cocircular lifts of poincare (±1/2, 0), (0, ±1/2): coplanar by symmetry
    let pts = vec![
        lvr(&[(5, 3), (4, 3), (0, 1)]),
        lvr(&[(5, 3), (-4, 3), (0, 1)]),
        lvr(&[(5, 3), (0, 1), (4, 3)]),
        lvr(&[(5, 3), (0, 1), (-4, 3)]),
    ];
    let hull = build_hull(&pts, 3, &HullOptions::default()).unwrap();
    assert!(hull.flat);
    let counts = face_count_by_dim(&hull);
    assert_eq!(counts, vec![4, 4, 1]);
    assert!(hull.faces.iter().all(|f| f.visible));
    // edges join square-adjacent corners, never the diagonals
    for f in hull.faces.iter().filter(|f| f.dim == 1) {
        assert_ne!(f.vertices, vec![0, 1]);
        assert_ne!(f.vertices, vec![2, 3]);
    }
    // support plane of the top face is the affine hull with negative offset
    let top = hull.faces.iter().find(|f| f.dim == 2).unwrap();
    let (n, c) = hull.face_support_plane(top.id).unwrap();
    assert_eq!(c.sign(), crate::scalar::Sign::Neg);
    for p in &hull.points {
        assert_eq!(n.euclid_dot(p), c);
    }
}

#[test]
fn pyramid_merges_coplanar_top() {
    // square lift plus the basepoint below: the two coplanar top triangles
    // merge into one quadrilateral facet
    let pts = vec![
        lvr(&[(5, 3), (4, 3), (0, 1)]),
        lvr(&[(5, 3), (-4, 3), (0, 1)]),
        lvr(&[(5, 3), (0, 1), (4, 3)]),
        lvr(&[(5, 3), (0, 1), (-4, 3)]),
        lv(&[1, 0, 0]),
    ];
    let hull = build_hull(&pts, 3, &HullOptions::default()).unwrap();
    assert_eq!(hull.facets.len(), 5);
    let quad = hull.facets.iter().find(|f| f.vertices.len() == 4).unwrap();
    assert_eq!(quad.vertices, vec![0, 1, 2, 3]);
    assert_eq!(quad.simplices.len(), 2);
    // the quad faces away from the origin, the four triangles toward it
    assert_eq!(quad.offset.sign(), crate::scalar::Sign::Pos);
    let visible: Vec<_> = hull.visible_faces().collect();
    // 4 triangles + 4 lateral edges + 4 bottom edges... every face except
    // the quad top is contained in some visible lateral facet
    assert!(visible.iter().all(|f| f.vertices != vec![0, 1, 2, 3]));
    // all five sites are hull vertices and visible as 0-faces
    for v in 0..5 {
        let f = hull.face_by_vertices(&[v]).unwrap();
        assert!(f.visible, "vertex {v} must be visible");
    }
}

#[test]
fn two_point_segment_hull() {
    let pts = vec![lv(&[1, 0, 0]), lvr(&[(5, 3), (4, 3), (0, 1)])];
    let err = build_hull(&pts, 3, &HullOptions::default()).unwrap_err();
    assert!(matches!(err, HullError::RankDeficient { rank: 1 }));
}

#[test]
fn duplicate_points_removed() {
    let pts = vec![
        lv(&[0, 0, 0]),
        lv(&[1, 0, 0]),
        lv(&[0, 1, 0]),
        lv(&[0, 0, 1]),
        lv(&[1, 0, 0]),
    ];
    let hull = build_hull(&pts, 3, &HullOptions::default()).unwrap();
    assert_eq!(hull.duplicate_count, 1);
    assert_eq!(hull.dedup_map, vec![0, 1, 2, 3, 1]);
    assert_eq!(hull.points.len(), 4);
}

#[test]
fn matches_naive_hull_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..40 {
        let n = rng.gen_range(4..=10);
        let mut pts = Vec::new();
        for _ in 0..n {
            // random rational points in a box
            pts.push(LorentzVec::new(vec![
                rat(rng.gen_range(-32..=32), 8),
                rat(rng.gen_range(-32..=32), 8),
                rat(rng.gen_range(-32..=32), 8),
            ]));
        }
        let hull = match build_hull(&pts, 3, &HullOptions::default()) {
            Ok(h) => h,
            Err(HullError::RankDeficient { .. }) | Err(HullError::TooFewPoints) => continue,
            Err(e) => panic!("case {case}: {e}"),
        };
        if hull.flat {
            continue;
        }
        let naive = naive_facets(&hull.points, 3);
        let mut ours: Vec<Vec<usize>> = hull.facets.iter().map(|f| f.vertices.clone()).collect();
        ours.sort();
        assert_eq!(ours, naive, "case {case}");
        // Euler characteristic of the boundary complex of a 3-polytope
        let c = face_count_by_dim(&hull);
        assert_eq!(c[0] as i64 - c[1] as i64 + c[2] as i64, 2, "case {case}");
        // every point lies on or below every facet plane
        for f in &hull.facets {
            for p in &hull.points {
                assert!(
                    (f.normal.euclid_dot(p) - f.offset.clone()).sign()
                        != crate::scalar::Sign::Pos
                );
            }
        }
    }
}

#[test]
fn hyperboloid_sites_every_vertex_visible() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = rng.gen_range(4..=9);
        let mut pts = Vec::new();
        for _ in 0..n {
            let a = rat(rng.gen_range(-40..=40), 64);
            let b = rat(rng.gen_range(-40..=40), 64);
            pts.push(lift(&ModelPoint::poincare(vec![a, b])).unwrap().vec().clone());
        }
        let hull = match build_hull(&pts, 3, &HullOptions::default()) {
            Ok(h) => h,
            Err(_) => continue,
        };
        // sites on the strictly convex sheet are all extreme, and each is
        // visible through the tangent-plane certificate
        for v in 0..hull.points.len() {
            let f = hull.face_by_vertices(&[v]).expect("site must be a hull vertex");
            if !hull.flat {
                assert!(f.visible);
            }
        }
    }
}

#[test]
fn deterministic_ids_and_permutation_invariance() {
    let pts = vec![
        lvr(&[(5, 3), (4, 3), (0, 1)]),
        lvr(&[(5, 3), (-4, 3), (0, 1)]),
        lvr(&[(5, 3), (0, 1), (4, 3)]),
        lv(&[1, 0, 0]),
        lvr(&[(5, 4), (3, 4), (0, 1)]),
    ];
    let h1 = build_hull(&pts, 3, &HullOptions::default()).unwrap();
    let h2 = build_hull(&pts, 3, &HullOptions::default()).unwrap();
    let sig = |h: &Hull<Rat>| -> Vec<(usize, Vec<usize>)> {
        h.faces.iter().map(|f| (f.dim, f.vertices.clone())).collect()
    };
    assert_eq!(sig(&h1), sig(&h2));

    // permuted input: identical lattice after relabeling back
    let perm = [3usize, 0, 4, 1, 2];
    let permuted: Vec<_> = perm.iter().map(|&i| pts[i].clone()).collect();
    let h3 = build_hull(&permuted, 3, &HullOptions::default()).unwrap();
    let mut relabeled: Vec<(usize, Vec<usize>)> = h3
        .faces
        .iter()
        .map(|f| {
            let mut vs: Vec<usize> = f.vertices.iter().map(|&v| perm[v]).collect();
            vs.sort_unstable();
            (f.dim, vs)
        })
        .collect();
    relabeled.sort();
    let mut orig = sig(&h1);
    orig.sort();
    assert_eq!(orig, relabeled);
}

#[test]
fn sub_face_support_planes_touch_exactly() {
    let pts = vec![
        lvr(&[(5, 3), (4, 3), (0, 1)]),
        lvr(&[(5, 3), (-4, 3), (0, 1)]),
        lvr(&[(5, 3), (0, 1), (4, 3)]),
        lvr(&[(5, 3), (0, 1), (-4, 3)]),
        lv(&[1, 0, 0]),
    ];
    let hull = build_hull(&pts, 3, &HullOptions::default()).unwrap();
    for face in hull.visible_faces() {
        let (n, c) = hull.face_support_plane(face.id).unwrap();
        assert_eq!(c.sign(), crate::scalar::Sign::Neg, "strict separation from 0");
        for (i, p) in hull.points.iter().enumerate() {
            let s = (n.euclid_dot(p) - c.clone()).sign();
            if face.vertices.binary_search(&i).is_ok() {
                assert_eq!(s, crate::scalar::Sign::Zero);
            } else {
                assert_eq!(s, crate::scalar::Sign::Neg);
            }
        }
    }
    // non-visible faces are refused
    let quad_face = hull.face_by_vertices(&[0, 1, 2, 3]).unwrap();
    assert!(matches!(hull.face_support_plane(quad_face.id), Err(HullError::NotVisible)));
}

#[test]
fn float_mode_square_merge() {
    let pts: Vec<LorentzVec<f64>> = vec![
        LorentzVec::new(vec![5.0 / 3.0, 4.0 / 3.0, 0.0]),
        LorentzVec::new(vec![5.0 / 3.0, -4.0 / 3.0, 0.0]),
        LorentzVec::new(vec![5.0 / 3.0, 0.0, 4.0 / 3.0]),
        LorentzVec::new(vec![5.0 / 3.0, 0.0, -4.0 / 3.0]),
        LorentzVec::new(vec![1.0, 0.0, 0.0]),
    ];
    let hull = build_hull(&pts, 3, &HullOptions::default()).unwrap();
    assert_eq!(hull.facets.len(), 5);
    assert!(hull.facets.iter().any(|f| f.vertices.len() == 4));
}
