//! Truncated orbits of subgroups of `SO⁺(1,2)` and the invariance /
//! cusp-cell diagnostics run on their Delaunay tessellations.
//!
//! Generators come in as exact rational 2x2 matrices of determinant one;
//! the 3x3 image acts on `R^{1,2}` through the symmetric-matrix model
//! `x ↔ [[x0+x1, x2], [x2, x0-x1]]`, `X ↦ g X gᵀ`, so orbit points stay
//! rational and every form-preservation check is exact.

use std::collections::HashMap;

use thiserror::Error;

use crate::delaunay::Tessellation;
use crate::lorentz::{mink, LorentzVec};
use crate::models::{lift, HPoint, Model, ModelPoint};
use crate::scalar::{rat, GeomScalar, Rat, Sign};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("generator determinant must be 1, got {0}")]
    BadDeterminant(String),
    #[error("matrix does not preserve the Lorentz form")]
    NotIsometry,
    #[error("bad example needs r_inf > 1")]
    BadRadius,
}

/// An element of `SO⁺(1,2)` with its generator word.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    /// 3x3 matrix preserving the Lorentz form.
    pub matrix: Vec<Vec<Rat>>,
    /// Source 2x2 matrix when the element came through the covering map.
    pub sl2: Option<[[Rat; 2]; 2]>,
    /// Generator indices: `+k` for generator `k-1`, `-k` for its inverse.
    pub word: Vec<i32>,
}

impl GroupElement {
    pub fn identity() -> Self {
        let mut m = vec![vec![rat(0, 1); 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = rat(1, 1);
        }
        GroupElement { matrix: m, sl2: None, word: Vec::new() }
    }

    pub fn apply(&self, v: &LorentzVec<Rat>) -> LorentzVec<Rat> {
        let mut out = vec![rat(0, 1); 3];
        for (i, row) in self.matrix.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                out[i] = out[i].clone() + a.clone() * &v.coords[j];
            }
        }
        LorentzVec::new(out)
    }

    pub fn apply_point(&self, p: &HPoint<Rat>) -> HPoint<Rat> {
        HPoint::from_vec(self.apply(p.vec())).expect("isometries preserve the sheet")
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        let mut m = vec![vec![rat(0, 1); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = rat(0, 1);
                for (k, ok) in other.matrix.iter().enumerate() {
                    acc = acc + self.matrix[i][k].clone() * &ok[j];
                }
                m[i][j] = acc;
            }
        }
        let mut word = self.word.clone();
        word.extend_from_slice(&other.word);
        GroupElement { matrix: m, sl2: None, word }
    }

    /// Exact check of `Mᵀ J M = J` for `J = diag(-1, 1, 1)`.
    pub fn preserves_form(&self) -> bool {
        let j = |k: usize| if k == 0 { rat(-1, 1) } else { rat(1, 1) };
        for a in 0..3 {
            for b in 0..3 {
                let mut acc = rat(0, 1);
                for k in 0..3 {
                    acc = acc + self.matrix[k][a].clone() * &self.matrix[k][b] * &j(k);
                }
                let expect = if a == b { j(a) } else { rat(0, 1) };
                if acc != expect {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_identity(&self) -> bool {
        self.matrix
            .iter()
            .enumerate()
            .all(|(i, row)| row.iter().enumerate().all(|(j, v)| {
                *v == if i == j { rat(1, 1) } else { rat(0, 1) }
            }))
    }
}

/// Covering map `SL(2,R) -> SO⁺(1,2)` by the adjoint action on the
/// symmetric-matrix model of the Lorentz form; `m` and `-m` have the same
/// image.
pub fn sl2_to_so21(m: &[[Rat; 2]; 2]) -> Result<GroupElement, OrbitError> {
    let det = m[0][0].clone() * &m[1][1] - m[0][1].clone() * &m[1][0];
    if det != rat(1, 1) {
        return Err(OrbitError::BadDeterminant(det.to_string()));
    }
    // act on the coordinate basis: e0 ↔ I, e1 ↔ diag(1,-1), e2 ↔ offdiag
    let act = |p: Rat, q: Rat, r: Rat| -> (Rat, Rat, Rat) {
        // X = [[p, q], [q, r]], Y = m X mᵀ
        let (a, b, c, d) = (&m[0][0], &m[0][1], &m[1][0], &m[1][1]);
        let y00 = a.clone() * &a.clone() * &p
            + rat(2, 1) * a.clone() * &b.clone() * &q
            + b.clone() * &b.clone() * &r;
        let y01 = a.clone() * &c.clone() * &p
            + (a.clone() * &d.clone() + b.clone() * &c.clone()) * &q
            + b.clone() * &d.clone() * &r;
        let y11 = c.clone() * &c.clone() * &p
            + rat(2, 1) * c.clone() * &d.clone() * &q
            + d.clone() * &d.clone() * &r;
        (y00, y01, y11)
    };
    let mut matrix = vec![vec![rat(0, 1); 3]; 3];
    let basis = [
        (rat(1, 1), rat(0, 1), rat(1, 1)),  // e0
        (rat(1, 1), rat(0, 1), rat(-1, 1)), // e1
        (rat(0, 1), rat(1, 1), rat(0, 1)),  // e2
    ];
    for (col, (p, q, r)) in basis.into_iter().enumerate() {
        let (y00, y01, y11) = act(p, q, r);
        matrix[0][col] = (y00.clone() + &y11) / rat(2, 1);
        matrix[1][col] = (y00 - &y11) / rat(2, 1);
        matrix[2][col] = y01;
    }
    let g = GroupElement { matrix, sl2: Some(m.clone()), word: Vec::new() };
    if !g.preserves_form() {
        return Err(OrbitError::NotIsometry);
    }
    Ok(g)
}

pub fn sl2_inverse(m: &[[Rat; 2]; 2]) -> [[Rat; 2]; 2] {
    [
        [m[1][1].clone(), -m[0][1].clone()],
        [-m[1][0].clone(), m[0][0].clone()],
    ]
}

/// A truncated orbit: all products of at most `max_word_length` generators
/// or inverses applied to the base points, deduplicated exactly.
#[derive(Debug)]
pub struct OrbitSet {
    pub base_points: Vec<HPoint<Rat>>,
    pub elements: Vec<GroupElement>,
    pub points: Vec<HPoint<Rat>>,
    /// `(base index, element index)` witnessing each point.
    pub provenance: Vec<(usize, usize)>,
    /// Minimal word length producing each point.
    pub word_len: Vec<usize>,
    pub max_word_length: usize,
}

type Key = Vec<Rat>;

fn matrix_key(m: &[Vec<Rat>]) -> Key {
    m.iter().flat_map(|r| r.iter().cloned()).collect()
}

/// Enumerate the word ball of radius `max_len` and apply it to the bases.
pub fn orbit_ball(
    gens: &[GroupElement],
    bases: &[HPoint<Rat>],
    max_len: usize,
) -> OrbitSet {
    // closed generator list with inverses (exact inverse through sl2 when
    // available, else by the form-preserving transpose J Mᵀ J)
    let mut step: Vec<GroupElement> = Vec::new();
    for (k, g) in gens.iter().enumerate() {
        let mut fwd = g.clone();
        fwd.word = vec![k as i32 + 1];
        step.push(fwd);
        let mut inv = match &g.sl2 {
            Some(m) => sl2_to_so21(&sl2_inverse(m)).expect("inverse stays in SL2"),
            None => lorentz_inverse(g),
        };
        inv.word = vec![-(k as i32 + 1)];
        step.push(inv);
    }

    let mut elements: Vec<GroupElement> = vec![GroupElement::identity()];
    let mut seen: HashMap<Key, usize> = HashMap::new();
    seen.insert(matrix_key(&elements[0].matrix), 0);
    let mut frontier: Vec<usize> = vec![0];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for &ei in &frontier {
            for s in &step {
                let g = elements[ei].compose(s);
                let key = matrix_key(&g.matrix);
                if !seen.contains_key(&key) {
                    seen.insert(key, elements.len());
                    next.push(elements.len());
                    elements.push(g);
                }
            }
        }
        frontier = next;
    }

    let mut points: Vec<HPoint<Rat>> = Vec::new();
    let mut provenance = Vec::new();
    let mut word_len = Vec::new();
    let mut point_index: HashMap<Key, usize> = HashMap::new();
    for (bi, base) in bases.iter().enumerate() {
        for (ei, g) in elements.iter().enumerate() {
            let p = g.apply_point(base);
            let key: Key = p.vec().coords.clone();
            match point_index.get(&key) {
                Some(&pi) => {
                    if g.word.len() < word_len[pi] {
                        word_len[pi] = g.word.len();
                        provenance[pi] = (bi, ei);
                    }
                }
                None => {
                    point_index.insert(key, points.len());
                    points.push(p);
                    provenance.push((bi, ei));
                    word_len.push(g.word.len());
                }
            }
        }
    }
    OrbitSet {
        base_points: bases.to_vec(),
        elements,
        points,
        provenance,
        word_len,
        max_word_length: max_len,
    }
}

/// Inverse of a Lorentz-orthogonal matrix: `J Mᵀ J`.
fn lorentz_inverse(g: &GroupElement) -> GroupElement {
    let j = |k: usize| if k == 0 { rat(-1, 1) } else { rat(1, 1) };
    let mut m = vec![vec![rat(0, 1); 3]; 3];
    for i in 0..3 {
        for k in 0..3 {
            m[i][k] = j(i) * &g.matrix[k][i] * &j(k);
        }
    }
    GroupElement { matrix: m, sl2: None, word: Vec::new() }
}

/// Per-dimension orbit statistics of the interior cells under the
/// generator action.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub max_word_length: usize,
    pub interior_cells: usize,
    /// `(dim, orbit class count)` over interior cells.
    pub orbit_counts: Vec<(usize, usize)>,
    /// Interior cells whose generator image exists pointwise in the site
    /// set but is not a cell of the tessellation.
    pub equivariance_violations: usize,
}

/// Group interior cells into generator-action orbits and report counts
/// per dimension. Interior means every vertex has word length at most
/// `max_word_length - 2`: the truncation frontier distorts the cell
/// structure one full layer in, so a single-layer margin still shows
/// spurious violations (measured on the punctured-torus fixture).
pub fn invariance_report(
    tess: &Tessellation<Rat>,
    orbit: &OrbitSet,
    gens: &[GroupElement],
) -> InvarianceReport {
    let l = orbit.max_word_length;
    // the tessellation sites must be the orbit points, index-aligned
    debug_assert_eq!(tess.sites.len(), orbit.points.len());

    let site_index: HashMap<Key, usize> = tess
        .sites
        .iter()
        .enumerate()
        .map(|(i, p)| (p.vec().coords.clone(), i))
        .collect();
    let interior_site = |i: usize| orbit.word_len[i] + 2 <= l;
    let interior_cell = |ids: &[usize]| ids.iter().all(|&v| interior_site(v));

    let cell_index: HashMap<&[usize], usize> =
        tess.cells.iter().map(|c| (c.vertex_ids.as_slice(), c.id)).collect();
    let interiors: Vec<usize> =
        tess.cells.iter().filter(|c| interior_cell(&c.vertex_ids)).map(|c| c.id).collect();

    // union-find over all cells, joined through generator images
    let mut parent: Vec<usize> = (0..tess.cells.len()).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    let mut step: Vec<GroupElement> = Vec::new();
    for g in gens {
        step.push(g.clone());
        step.push(match &g.sl2 {
            Some(m) => sl2_to_so21(&sl2_inverse(m)).expect("inverse stays in SL2"),
            None => lorentz_inverse(g),
        });
    }
    let mut violations = 0;
    for &cid in &interiors {
        for g in &step {
            let mut image: Vec<usize> = Vec::new();
            let mut all_present = true;
            for &v in &tess.cells[cid].vertex_ids {
                let p = g.apply_point(&tess.sites[v]);
                match site_index.get(p.vec().coords.as_slice()) {
                    Some(&i) => image.push(i),
                    None => {
                        all_present = false;
                        break;
                    }
                }
            }
            if !all_present {
                continue;
            }
            image.sort_unstable();
            match cell_index.get(image.as_slice()) {
                Some(&other) => {
                    let (ra, rb) = (find(&mut parent, cid), find(&mut parent, other));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
                None => violations += 1,
            }
        }
    }

    // orbit classes restricted to interior cells
    let mut class_dims: HashMap<usize, usize> = HashMap::new();
    for &cid in &interiors {
        let root = find(&mut parent, cid);
        class_dims.insert(root, tess.cells[cid].dim);
    }
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for (_, dim) in class_dims {
        *counts.entry(dim).or_insert(0) += 1;
    }
    let mut orbit_counts: Vec<(usize, usize)> = counts.into_iter().collect();
    orbit_counts.sort();
    InvarianceReport {
        max_word_length: l,
        interior_cells: interiors.len(),
        orbit_counts,
        equivariance_violations: violations,
    }
}

/// Per-cell cusp diagnostics: the Lorentz norm of the support-plane
/// normal scaled so the cell's sites pair to -1 with it. A horospherical
/// limit shows up as `u∘u -> 0` on the cells around the cusp direction.
#[derive(Debug, Clone)]
pub struct CuspCellInfo {
    pub cell_id: usize,
    pub vertex_ids: Vec<usize>,
    pub interior: bool,
    /// `u∘u` of the scaled normal, exact.
    pub norm: Rat,
    /// Direction of the normal (floating, unit Euclidean length).
    pub direction: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct CuspReport {
    pub max_word_length: usize,
    pub cells: Vec<CuspCellInfo>,
}

impl CuspReport {
    /// Smallest `|u∘u|` among interior top cells and its direction.
    pub fn min_interior_norm(&self) -> Option<(f64, Vec<f64>)> {
        self.cells
            .iter()
            .filter(|c| c.interior)
            .map(|c| (c.norm.to_f64().abs(), c.direction.clone()))
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
    }

    /// Cells whose support plane is exactly light-like-parallel: the
    /// truncation shadows of the parabolic-invariant cells. Their
    /// directions are the parabolic fixed lines.
    pub fn horospherical_cells(&self) -> impl Iterator<Item = &CuspCellInfo> {
        self.cells.iter().filter(|c| c.norm.sign() == Sign::Zero)
    }

    /// Smallest nonzero `|u∘u|`: the tightest cell of the ring around the
    /// cusp that has not yet reached the horospherical limit. This is the
    /// quantity whose trend across increasing word length diagnoses the
    /// cusp (exactly-zero cells are already at their limit and are
    /// reported separately).
    pub fn min_nonzero_norm(&self) -> Option<(f64, Vec<f64>)> {
        self.cells
            .iter()
            .filter(|c| c.norm.sign() != Sign::Zero)
            .map(|c| (c.norm.to_f64().abs(), c.direction.clone()))
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
    }
}

pub fn cusp_cell_diagnostic(tess: &Tessellation<Rat>, orbit: &OrbitSet) -> CuspReport {
    let l = orbit.max_word_length;
    let interior_cell = |ids: &[usize]| ids.iter().all(|&v| orbit.word_len[v] + 2 <= l);
    let mut cells = Vec::new();
    for cell in tess.top_cells() {
        let Ok((eta, c)) = tess.cell_support_plane(cell.id) else { continue };
        // Lorentz normal with sites pairing to -1: u = bar(-eta) / (-c)
        let w = eta.neg().bar();
        let u = w.scale(&(rat(-1, 1) / c));
        let norm = mink(&u, &u);
        let dir = {
            let v = u.to_f64();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / n).collect::<Vec<f64>>()
        };
        cells.push(CuspCellInfo {
            cell_id: cell.id,
            vertex_ids: cell.vertex_ids.clone(),
            interior: interior_cell(&cell.vertex_ids),
            norm,
            direction: dir,
        });
    }
    CuspReport { max_word_length: l, cells }
}

/// Monotonicity verdict of the per-length minimum nonzero `|u∘u|` trend.
pub fn cusp_trend(reports: &[CuspReport]) -> (Vec<f64>, bool) {
    let mins: Vec<f64> = reports
        .iter()
        .filter_map(|r| r.min_nonzero_norm().map(|(m, _)| m))
        .collect();
    let monotone = mins.windows(2).all(|w| w[1] < w[0]);
    (mins, monotone)
}

/// The pathological fixture: points on shrinking circles through `i` in
/// the upper half-plane, accumulating at two boundary points. Returns
/// `2N + 1` hyperboloid points ordered `p0, p1, p-1, p2, p-2, ...`.
pub fn bad_example_points(r_inf: f64, n_max: usize) -> Result<Vec<HPoint<f64>>, OrbitError> {
    if r_inf <= 1.0 {
        return Err(OrbitError::BadRadius);
    }
    let mut out = Vec::with_capacity(2 * n_max + 1);
    let lift_hp = |x: f64, y: f64| -> HPoint<f64> {
        lift(&ModelPoint::<f64> { model: Model::UpperHalfSpace, coords: vec![x, y] })
            .expect("upper half-plane point")
    };
    out.push(lift_hp(0.0, 1.0));
    for n in 1..=n_max {
        let r = r_inf + 1.0 / n as f64;
        let c = 1.0 - r; // center of the circle through i on the imaginary axis
        let y = 1.0 / (n as f64 + 1.0);
        let x = (r * r - (y - c) * (y - c)).sqrt();
        out.push(lift_hp(x, y));
        out.push(lift_hp(-x, y));
    }
    Ok(out)
}

/// Index of `p_n` in the [`bad_example_points`] ordering (`n` signed).
pub fn bad_example_index(n: i64) -> usize {
    match n {
        0 => 0,
        n if n > 0 => 2 * n as usize - 1,
        n => 2 * (-n) as usize,
    }
}

/// The punctured-torus style generator pair used by the cusp experiments.
pub fn punctured_torus_generators() -> Vec<GroupElement> {
    let a = [[rat(1, 1), rat(1, 1)], [rat(1, 1), rat(2, 1)]];
    let b = [[rat(1, 1), rat(-1, 1)], [rat(-1, 1), rat(2, 1)]];
    vec![sl2_to_so21(&a).unwrap(), sl2_to_so21(&b).unwrap()]
}
