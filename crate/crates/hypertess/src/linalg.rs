//! Small dense linear algebra over a `GeomScalar`.
//!
//! Everything here is written for the low dimensions this crate works in
//! (matrices up to roughly 9x9). Exact mode clears denominators and runs
//! Bareiss fraction-free elimination so intermediate values stay integral
//! and pivots are deterministic; float mode pivots on magnitude.

use crate::scalar::{GeomScalar, Sign};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat<S> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<S>,
}

impl<S: GeomScalar> Mat<S> {
    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix");
            data.extend(row.iter().cloned());
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn at(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

fn pivot_magnitude<S: GeomScalar>(v: &S) -> f64 {
    v.to_f64().abs()
}

/// Result of a fraction-free forward elimination.
pub struct Echelon<S> {
    pub mat: Mat<S>,
    pub rank: usize,
    /// Column index of the pivot in each eliminated row.
    pub pivot_cols: Vec<usize>,
    /// Sign flip parity from row swaps.
    pub swaps: usize,
    /// Last pivot value (Bareiss: equals det of the leading rank-minor up to sign).
    pub last_pivot: S,
}

/// Bareiss fraction-free elimination. In exact mode all divisions are exact;
/// in float mode it degrades to ordinary elimination with magnitude pivoting.
///
/// `eps` is the float-mode zero threshold relative to the row scale.
pub fn eliminate<S: GeomScalar>(mut m: Mat<S>, eps: f64) -> Echelon<S> {
    let scale = row_scale(&m);
    let mut prev = S::one();
    let mut rank = 0;
    let mut swaps = 0;
    let mut pivot_cols = Vec::new();
    let mut last_pivot = S::one();
    let mut col = 0;
    while rank < m.rows && col < m.cols {
        // choose pivot row: exact mode takes the first nonzero for
        // determinism, float mode the largest magnitude
        let mut pivot_row = None;
        if S::EXACT {
            for i in rank..m.rows {
                if m.at(i, col).sign() != Sign::Zero {
                    pivot_row = Some(i);
                    break;
                }
            }
        } else {
            let mut best = 0.0;
            for i in rank..m.rows {
                let mag = pivot_magnitude(m.at(i, col));
                if mag > best {
                    best = mag;
                    pivot_row = Some(i);
                }
            }
            if let Some(i) = pivot_row {
                if m.at(i, col).sign_within(eps, &scale) == Sign::Zero {
                    pivot_row = None;
                }
            }
        }
        let Some(p) = pivot_row else {
            col += 1;
            continue;
        };
        if p != rank {
            m.swap_rows(p, rank);
            swaps += 1;
        }
        let pivot = m.at(rank, col).clone();
        for i in (rank + 1)..m.rows {
            let factor = m.at(i, col).clone();
            for j in 0..m.cols {
                // Bareiss update: (pivot*a_ij - factor*a_pj) / prev
                let v = pivot.clone() * m.at(i, j) - factor.clone() * m.at(rank, j);
                m.set(i, j, v / prev.clone());
            }
        }
        prev = pivot.clone();
        last_pivot = pivot;
        pivot_cols.push(col);
        rank += 1;
        col += 1;
    }
    Echelon { mat: m, rank, pivot_cols, swaps, last_pivot }
}

fn row_scale<S: GeomScalar>(m: &Mat<S>) -> S {
    let mut best = S::one();
    for v in &m.data {
        let a = v.abs_val();
        if a > best {
            best = a;
        }
    }
    best
}

pub fn rank<S: GeomScalar>(rows: &[Vec<S>], eps: f64) -> usize {
    eliminate(Mat::from_rows(rows), eps).rank
}

/// Determinant of a square matrix.
pub fn det<S: GeomScalar>(rows: &[Vec<S>], eps: f64) -> S {
    let n = rows.len();
    let m = Mat::from_rows(rows);
    assert_eq!(m.cols, n, "determinant of a non-square matrix");
    if n == 0 {
        return S::one();
    }
    // closed forms for the hot small cases
    if n == 2 {
        return rows[0][0].clone() * &rows[1][1] - rows[0][1].clone() * &rows[1][0];
    }
    if n == 3 {
        let a = &rows[0];
        let b = &rows[1];
        let c = &rows[2];
        let m0 = b[1].clone() * &c[2] - b[2].clone() * &c[1];
        let m1 = b[0].clone() * &c[2] - b[2].clone() * &c[0];
        let m2 = b[0].clone() * &c[1] - b[1].clone() * &c[0];
        return a[0].clone() * &m0 - a[1].clone() * &m1 + a[2].clone() * &m2;
    }
    let e = eliminate(m, eps);
    if e.rank < n {
        return S::zero();
    }
    // Bareiss: the last pivot is det up to swap parity
    if e.swaps % 2 == 1 {
        -e.last_pivot
    } else {
        e.last_pivot
    }
}

/// One kernel vector of the row space map `x -> A x` when the kernel is
/// nontrivial; normalized so its first nonzero coordinate is positive.
/// Returns `None` when `A` has full column rank.
pub fn kernel_vector<S: GeomScalar>(rows: &[Vec<S>], eps: f64) -> Option<Vec<S>> {
    let cols = rows.first().map_or(0, |r| r.len());
    let e = eliminate(Mat::from_rows(rows), eps);
    if e.rank == cols {
        return None;
    }
    // pick the first free column and back-substitute
    let free = (0..cols).find(|c| !e.pivot_cols.contains(c))?;
    let mut x = vec![S::zero(); cols];
    x[free] = S::one();
    for r in (0..e.rank).rev() {
        let pc = e.pivot_cols[r];
        // pivot * x[pc] + sum_{j>pc} a_rj x_j = 0
        let mut acc = S::zero();
        for j in (pc + 1)..cols {
            let t = e.mat.at(r, j).clone() * &x[j];
            acc = acc + &t;
        }
        let piv = e.mat.at(r, pc).clone();
        x[pc] = -(acc / piv);
    }
    // clear to a canonical orientation: first nonzero coordinate positive
    let first = x.iter().find(|v| v.sign() != Sign::Zero)?;
    if first.sign() == Sign::Neg {
        for v in &mut x {
            *v = -v.clone();
        }
    }
    Some(x)
}

/// Basis of the kernel of the map `x -> A x` (one vector per free column).
pub fn kernel_basis<S: GeomScalar>(rows: &[Vec<S>], eps: f64) -> Vec<Vec<S>> {
    let cols = rows.first().map_or(0, |r| r.len());
    let e = eliminate(Mat::from_rows(rows), eps);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !e.pivot_cols.contains(c)) {
        let mut x = vec![S::zero(); cols];
        x[free] = S::one();
        for r in (0..e.rank).rev() {
            let pc = e.pivot_cols[r];
            let mut acc = S::zero();
            for j in (pc + 1)..cols {
                let t = e.mat.at(r, j).clone() * &x[j];
                acc = acc + &t;
            }
            let piv = e.mat.at(r, pc).clone();
            x[pc] = -(acc / piv);
        }
        basis.push(x);
    }
    basis
}

/// Solve `A x = b` for square invertible `A`.
pub fn solve<S: GeomScalar>(a: &[Vec<S>], b: &[S], eps: f64) -> Option<Vec<S>> {
    let n = a.len();
    assert!(a.iter().all(|r| r.len() == n));
    assert_eq!(b.len(), n);
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut r = a[i].clone();
        r.push(b[i].clone());
        rows.push(r);
    }
    let e = eliminate(Mat::from_rows(&rows), eps);
    if e.rank < n || e.pivot_cols.iter().any(|&c| c == n) {
        return None;
    }
    let mut x = vec![S::zero(); n];
    for r in (0..n).rev() {
        let pc = e.pivot_cols[r];
        let mut acc = e.mat.at(r, n).clone();
        for j in (pc + 1)..n {
            let t = e.mat.at(r, j).clone() * &x[j];
            acc = acc - &t;
        }
        x[pc] = acc / e.mat.at(r, pc).clone();
    }
    Some(x)
}

/// Solve the (possibly overdetermined but consistent) system `A x = b`.
/// Returns `None` if the system is inconsistent or underdetermined.
pub fn solve_consistent<S: GeomScalar>(a: &[Vec<S>], b: &[S], eps: f64) -> Option<Vec<S>> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(a.len());
    for (r, rhs) in a.iter().zip(b) {
        let mut row = r.clone();
        row.push(rhs.clone());
        rows.push(row);
    }
    let e = eliminate(Mat::from_rows(&rows), eps);
    if e.pivot_cols.iter().any(|&c| c == cols) {
        return None; // inconsistent
    }
    if e.rank < cols {
        return None; // underdetermined
    }
    let mut x = vec![S::zero(); cols];
    for r in (0..e.rank).rev() {
        let pc = e.pivot_cols[r];
        let mut acc = e.mat.at(r, cols).clone();
        for j in (pc + 1)..cols {
            let t = e.mat.at(r, j).clone() * &x[j];
            acc = acc - &t;
        }
        x[pc] = acc / e.mat.at(r, pc).clone();
    }
    Some(x)
}

/// Signature of a symmetric matrix under congruence: (negative, zero,
/// positive) inertia counts. Uses symmetric elimination with the standard
/// row/column transfer when the diagonal runs out of pivots.
pub fn inertia<S: GeomScalar>(sym: &[Vec<S>], eps: f64) -> (usize, usize, usize) {
    let n = sym.len();
    let mut m = Mat::from_rows(sym);
    let scale = row_scale(&m);
    let sgn = |v: &S| -> Sign {
        if S::EXACT {
            v.sign()
        } else {
            v.sign_within(eps, &scale)
        }
    };
    let mut neg = 0;
    let mut pos = 0;
    let mut k = 0;
    let mut active: Vec<usize> = (0..n).collect();
    while k < active.len() {
        // find a nonzero diagonal pivot among active indices
        let diag = active[k..].iter().position(|&i| sgn(m.at(i, i)) != Sign::Zero);
        if let Some(off) = diag {
            active.swap(k, k + off);
            let p = active[k];
            let pv = m.at(p, p).clone();
            match sgn(&pv) {
                Sign::Pos => pos += 1,
                Sign::Neg => neg += 1,
                Sign::Zero => unreachable!(),
            }
            for idx in (k + 1)..active.len() {
                let i = active[idx];
                let f = m.at(i, p).clone() / pv.clone();
                for jdx in (k + 1)..active.len() {
                    let j = active[jdx];
                    let v = m.at(i, j).clone() - f.clone() * m.at(p, j);
                    m.set(i, j, v);
                }
                m.set(i, p, S::zero());
            }
            // mirror the elimination on the columns (symmetry)
            for jdx in (k + 1)..active.len() {
                let j = active[jdx];
                m.set(p, j, S::zero());
            }
            k += 1;
            continue;
        }
        // all active diagonal entries are zero: look for an off-diagonal
        let mut found = None;
        'outer: for a in k..active.len() {
            for b in (a + 1)..active.len() {
                if sgn(m.at(active[a], active[b])) != Sign::Zero {
                    found = Some((a, b));
                    break 'outer;
                }
            }
        }
        match found {
            None => break, // remaining block is zero
            Some((a, b)) => {
                // congruence: add row/col b to row/col a to create a
                // nonzero diagonal entry, then retry
                let (ia, ib) = (active[a], active[b]);
                for jdx in k..active.len() {
                    let j = active[jdx];
                    let v = m.at(ia, j).clone() + m.at(ib, j);
                    m.set(ia, j, v);
                }
                for idx in k..active.len() {
                    let i = active[idx];
                    let v = m.at(i, ia).clone() + m.at(i, ib);
                    m.set(i, ia, v);
                }
            }
        }
    }
    (neg, n - neg - pos, pos)
}
