//! Dense matrices over a scalar ring and an incremental sparse row-reduction
//! engine.
//!
//! All solution-space and subspace computations go through [`RowSpace`]: rows
//! are inserted one at a time, kept in reduced row-echelon form, and the
//! nullspace is read off the echelon rows. In exact mode the pivot is the
//! leftmost nonzero entry (true RREF, canonical bases); in approximate mode
//! the largest-magnitude entry is chosen and entries below the absolute
//! threshold are flushed to zero.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::scalar::{ExtScalar, Ring, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Mat<R: Ring> {
    rows: usize,
    cols: usize,
    data: Vec<R>,
}

impl<R: Ring> std::fmt::Debug for Mat<R> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                write!(f, "{}  ", self.at(r, c))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<R: Ring> Mat<R> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![R::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = R::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols));
        Self { rows: nrows, cols: ncols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> &R {
        &self.data[r * self.cols + c]
    }

    #[inline]
    pub fn at_mut(&mut self, r: usize, c: usize) -> &mut R {
        &mut self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[R] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<R> {
        (0..self.rows).map(|r| self.at(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r).clone())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows);
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    let b = rhs.at(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.at(r, c).add(&a.mul(b));
                    *out.at_mut(r, c) = cur;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[R]) -> Vec<R> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![R::zero(); self.rows];
        for r in 0..self.rows {
            for c in 0..self.cols {
                let a = self.at(r, c);
                if a.is_zero() || v[c].is_zero() {
                    continue;
                }
                out[r] = out[r].add(&a.mul(&v[c]));
            }
        }
        out
    }

    pub fn add_mat(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |r, c| self.at(r, c).add(rhs.at(r, c)))
    }

    pub fn sub_mat(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Self::from_fn(self.rows, self.cols, |r, c| self.at(r, c).sub(rhs.at(r, c)))
    }

    pub fn neg_mat(&self) -> Self {
        self.map(Ring::neg)
    }

    pub fn scale(&self, s: &R) -> Self {
        self.map(|x| x.mul(s))
    }

    /// `self * T - T * self`.
    pub fn commutator(&self, rhs: &Self) -> Self {
        self.matmul(rhs).sub_mat(&rhs.matmul(self))
    }

    pub fn map<S: Ring>(&self, f: impl Fn(&R) -> S) -> Mat<S> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn entries(&self) -> impl Iterator<Item = &R> {
        self.data.iter()
    }
}

impl<K: Scalar> Mat<K> {
    pub fn max_abs_entry(&self) -> K {
        let mut best = K::zero();
        for x in &self.data {
            if x.abs_gt(&best) {
                best = x.clone();
            }
        }
        best.abs()
    }

    pub fn is_negligible(&self, tol: &K) -> bool {
        self.data.iter().all(|x| x.is_negligible(tol))
    }

    /// Lift into the extension ring entry-wise.
    pub fn lift(&self) -> Mat<K::Ext> {
        self.map(|x| K::Ext::from_base(x))
    }

    /// Gauss-Jordan inverse with partial pivoting.
    pub fn invert(&self, tol: &K) -> Result<Mat<K>, LinalgError> {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::<K>::identity(n);
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r1, &r2| {
                    if a.at(r1, col).abs_gt(a.at(r2, col)) {
                        std::cmp::Ordering::Greater
                    } else {
                        std::cmp::Ordering::Less
                    }
                })
                .unwrap();
            if a.at(pivot_row, col).is_negligible(tol) {
                return Err(LinalgError::Singular);
            }
            if pivot_row != col {
                for c in 0..n {
                    a.data.swap(pivot_row * n + c, col * n + c);
                    inv.data.swap(pivot_row * n + c, col * n + c);
                }
            }
            let p = a.at(col, col).clone();
            for c in 0..n {
                *a.at_mut(col, c) = a.at(col, c).div(&p);
                *inv.at_mut(col, c) = inv.at(col, c).div(&p);
            }
            for r in 0..n {
                if r == col || a.at(r, col).is_zero() {
                    continue;
                }
                let f = a.at(r, col).clone();
                for c in 0..n {
                    let v = a.at(r, c).sub(&f.mul(a.at(col, c)));
                    *a.at_mut(r, c) = v;
                    let w = inv.at(r, c).sub(&f.mul(inv.at(col, c)));
                    *inv.at_mut(r, c) = w;
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by elimination with partial pivoting.
    pub fn det(&self, tol: &K) -> K {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = K::one();
        for col in 0..n {
            let pivot_row = (col..n)
                .max_by(|&r1, &r2| {
                    if a.at(r1, col).abs_gt(a.at(r2, col)) {
                        std::cmp::Ordering::Greater
                    } else {
                        std::cmp::Ordering::Less
                    }
                })
                .unwrap();
            if a.at(pivot_row, col).is_negligible(tol) {
                return K::zero();
            }
            if pivot_row != col {
                for c in 0..n {
                    a.data.swap(pivot_row * n + c, col * n + c);
                }
                det = det.neg();
            }
            let p = a.at(col, col).clone();
            det = det.mul(&p);
            for r in col + 1..n {
                if a.at(r, col).is_zero() {
                    continue;
                }
                let f = a.at(r, col).div(&p);
                for c in col..n {
                    let v = a.at(r, c).sub(&f.mul(a.at(col, c)));
                    *a.at_mut(r, c) = v;
                }
            }
        }
        det
    }

    /// Symmetric-elimination pivot test: positive definite iff every pivot
    /// stays strictly above the threshold.
    pub fn is_positive_definite(&self, tol: &K) -> bool {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        for k in 0..n {
            let d = a.at(k, k).clone();
            if d.is_negligible(tol) || !d.is_positive() {
                return false;
            }
            for r in k + 1..n {
                if a.at(r, k).is_zero() {
                    continue;
                }
                let f = a.at(r, k).div(&d);
                for c in k..n {
                    let v = a.at(r, c).sub(&f.mul(a.at(k, c)));
                    *a.at_mut(r, c) = v;
                }
            }
        }
        true
    }

    pub fn rank(&self, tol: &K) -> usize {
        let mut rs = RowSpace::new(self.cols, tol.clone());
        for r in 0..self.rows {
            rs.insert_dense(self.row(r));
        }
        rs.rank()
    }
}

/// Sparse vector: sorted `(index, value)` pairs, no stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseVec<K> {
    entries: Vec<(usize, K)>,
}

impl<K: Scalar> SparseVec<K> {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn from_dense(v: &[K]) -> Self {
        Self {
            entries: v
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        }
    }

    pub fn from_entries(mut entries: Vec<(usize, K)>) -> Self {
        entries.retain(|(_, x)| !x.is_zero());
        entries.sort_by_key(|(i, _)| *i);
        Self { entries }
    }

    pub fn to_dense(&self, len: usize) -> Vec<K> {
        let mut v = vec![K::zero(); len];
        for (i, x) in &self.entries {
            v[*i] = x.clone();
        }
        v
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(usize, K)> {
        self.entries.iter()
    }

    pub fn get(&self, idx: usize) -> Option<&K> {
        self.entries
            .binary_search_by_key(&idx, |(i, _)| *i)
            .ok()
            .map(|p| &self.entries[p].1)
    }

    fn scale_in_place(&mut self, s: &K) {
        for (_, x) in &mut self.entries {
            *x = x.mul(s);
        }
    }

    /// `self - factor * other`, dropping entries at or below the threshold.
    fn sub_scaled(&self, other: &Self, factor: &K, tol: &K) -> Self {
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        while i < self.entries.len() || j < other.entries.len() {
            let next = match (self.entries.get(i), other.entries.get(j)) {
                (Some((ia, a)), Some((ib, b))) => {
                    if ia < ib {
                        i += 1;
                        (*ia, a.clone())
                    } else if ib < ia {
                        j += 1;
                        (*ib, factor.mul(b).neg())
                    } else {
                        let v = a.sub(&factor.mul(b));
                        i += 1;
                        j += 1;
                        (*ia, v)
                    }
                }
                (Some((ia, a)), None) => {
                    i += 1;
                    (*ia, a.clone())
                }
                (None, Some((ib, b))) => {
                    j += 1;
                    (*ib, factor.mul(b).neg())
                }
                (None, None) => unreachable!(),
            };
            if !next.1.is_negligible(tol) {
                out.push(next);
            }
        }
        Self { entries: out }
    }
}

impl<K: Scalar> Default for SparseVec<K> {
    fn default() -> Self {
        Self::new()
    }
}

/// Row space in reduced echelon form, built incrementally.
#[derive(Clone, Debug)]
pub struct RowSpace<K: Scalar> {
    cols: usize,
    tol: K,
    /// pivot column -> normalized row (pivot entry 1, zero at other pivots).
    rows: BTreeMap<usize, SparseVec<K>>,
}

impl<K: Scalar> RowSpace<K> {
    /// `tol` is an absolute threshold; pass zero in exact mode.
    pub fn new(cols: usize, tol: K) -> Self {
        Self { cols, tol, rows: BTreeMap::new() }
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.keys().copied().collect()
    }

    /// Fully reduce `v` against the current rows.
    pub fn reduce(&self, v: SparseVec<K>) -> SparseVec<K> {
        let mut v = v;
        // Columns below this bound are known to be pivot-free in `v`;
        // subtractions only introduce non-pivot columns there.
        let mut scanned_below = 0usize;
        loop {
            let start = v.entries.partition_point(|(i, _)| *i < scanned_below);
            let hit = v.entries[start..]
                .iter()
                .find(|(idx, _)| self.rows.contains_key(idx))
                .map(|(idx, coef)| (*idx, coef.clone()));
            match hit {
                Some((idx, coef)) => {
                    v = v.sub_scaled(&self.rows[&idx], &coef, &self.tol);
                    scanned_below = idx;
                }
                None => break,
            }
        }
        v
    }

    pub fn reduce_dense(&self, v: &[K]) -> SparseVec<K> {
        self.reduce(SparseVec::from_dense(v))
    }

    /// Insert a row; returns the new pivot column, or `None` when the row is
    /// dependent on the current space.
    pub fn insert(&mut self, v: SparseVec<K>) -> Option<usize> {
        self.insert_choosing(v, K::EXACT)
    }

    fn insert_choosing(&mut self, v: SparseVec<K>, leftmost: bool) -> Option<usize> {
        let mut v = self.reduce(v);
        if v.is_empty() {
            return None;
        }
        let pivot = if leftmost {
            v.entries[0].0
        } else {
            // Column pivoting: take the largest-magnitude entry.
            v.entries
                .iter()
                .max_by(|(_, a), (_, b)| {
                    if a.abs_gt(b) {
                        std::cmp::Ordering::Greater
                    } else {
                        std::cmp::Ordering::Less
                    }
                })
                .map(|(i, _)| *i)
                .unwrap()
        };
        let inv = K::one().div(v.get(pivot).unwrap());
        v.scale_in_place(&inv);
        // Keep reduced form: clear the new pivot column from existing rows.
        let affected: Vec<usize> = self
            .rows
            .iter()
            .filter(|(_, row)| row.get(pivot).is_some())
            .map(|(p, _)| *p)
            .collect();
        for p in affected {
            let row = self.rows.remove(&p).unwrap();
            let factor = row.get(pivot).unwrap().clone();
            let updated = row.sub_scaled(&v, &factor, &self.tol);
            self.rows.insert(p, updated);
        }
        self.rows.insert(pivot, v);
        Some(pivot)
    }

    pub fn insert_dense(&mut self, v: &[K]) -> Option<usize> {
        self.insert(SparseVec::from_dense(v))
    }

    /// Echelon row with the given pivot column.
    pub fn echelon_row(&self, pivot: usize) -> Option<&SparseVec<K>> {
        self.rows.get(&pivot)
    }

    pub fn contains_dense(&self, v: &[K]) -> bool {
        self.reduce_dense(v).is_empty()
    }

    /// Echelon rows in pivot order, densified.
    pub fn basis_dense(&self) -> Vec<Vec<K>> {
        self.rows.values().map(|r| r.to_dense(self.cols)).collect()
    }

    /// Canonical basis of `{x : row . x = 0 for all rows}`.
    pub fn nullspace(&self) -> Vec<Vec<K>> {
        let pivots = self.pivots();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivots.binary_search(&free).is_ok() {
                continue;
            }
            let mut v = vec![K::zero(); self.cols];
            v[free] = K::one();
            for (p, row) in &self.rows {
                if let Some(x) = row.get(free) {
                    v[*p] = x.neg();
                }
            }
            basis.push(v);
        }
        basis
    }
}

/// Coefficients `c_0..c_d` (monic, `c_d = 1`) of the minimal polynomial.
///
/// Krylov construction: vectorized powers of `m` are inserted into a row
/// space augmented by power-index markers; the first insertion whose pivot
/// lands in the marker zone exposes the dependency.
pub fn minimal_polynomial<K: Scalar>(m: &Mat<K>, tol: &K) -> Vec<K> {
    assert!(m.is_square());
    let n = m.nrows();
    let nn = n * n;
    let max_deg = n + 1;
    let mut rs = RowSpace::new(nn + max_deg + 1, tol.clone());
    let mut power = Mat::<K>::identity(n);
    for k in 0..=n {
        let mut entries: Vec<(usize, K)> = power
            .entries()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i, x.clone()))
            .collect();
        entries.push((nn + k, K::one()));
        // Leftmost pivots keep the marker zone from being chosen while the
        // power block is nonzero.
        let pivot = rs
            .insert_choosing(SparseVec::from_entries(entries), true)
            .expect("power rows carry independent markers");
        if pivot >= nn {
            // Left block vanished: the marker part encodes the relation
            // sum_k c_k M^k = 0.
            let row = rs.echelon_row(pivot).unwrap().to_dense(nn + max_deg + 1);
            let mut coeffs: Vec<K> = row[nn..nn + k + 1].to_vec();
            let lead = coeffs[k].clone();
            for c in &mut coeffs {
                *c = c.div(&lead);
            }
            return coeffs;
        }
        power = power.matmul(m);
    }
    unreachable!("minimal polynomial has degree at most n");
}

/// Evaluate a polynomial given by ascending coefficients.
pub fn poly_eval<K: Scalar>(coeffs: &[K], x: &K) -> K {
    let mut acc = K::zero();
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

/// Lift a square base-field matrix and compare against another extension
/// matrix entry-wise within the tolerance.
pub fn ext_eq<K: Scalar>(a: &Mat<K::Ext>, b: &Mat<K::Ext>, tol: &K) -> bool {
    a.sub_mat(b).entries().all(|x| x.is_negligible(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    fn rmat(rows: &[&[i64]]) -> Mat<Rat> {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rat::from_int(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn inverse_round_trip() {
        let m = rmat(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = m.invert(&Rat::zero()).unwrap();
        assert_eq!(m.matmul(&inv), Mat::identity(3));
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = rmat(&[&[1, 2], &[2, 4]]);
        assert_eq!(m.invert(&Rat::zero()), Err(LinalgError::Singular));
        assert!(m.det(&Rat::zero()).is_zero());
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = rmat(&[&[1, 2, 3], &[0, 4, 5], &[1, 0, 6]]);
        assert_eq!(m.det(&Rat::zero()), Rat::from_int(22));
    }

    #[test]
    fn positive_definiteness() {
        let spd = rmat(&[&[2, 1], &[1, 2]]);
        assert!(spd.is_positive_definite(&Rat::zero()));
        let indef = rmat(&[&[1, 2], &[2, 1]]);
        assert!(!indef.is_positive_definite(&Rat::zero()));
    }

    #[test]
    fn rowspace_rank_and_nullspace() {
        let mut rs = RowSpace::new(4, Rat::zero());
        rs.insert_dense(&[rat(1, 1), rat(2, 1), rat(0, 1), rat(1, 1)]);
        rs.insert_dense(&[rat(2, 1), rat(4, 1), rat(0, 1), rat(2, 1)]);
        rs.insert_dense(&[rat(0, 1), rat(0, 1), rat(1, 1), rat(3, 1)]);
        assert_eq!(rs.rank(), 2);
        let ns = rs.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in rs.basis_dense() {
                let dot = row
                    .iter()
                    .zip(v)
                    .fold(Rat::zero(), |acc, (a, b)| acc.add(&a.mul(b)));
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn rowspace_reduction_is_canonical() {
        let mut rs = RowSpace::new(3, Rat::zero());
        rs.insert_dense(&[rat(0, 1), rat(2, 1), rat(4, 1)]);
        rs.insert_dense(&[rat(1, 1), rat(1, 1), rat(1, 1)]);
        let basis = rs.basis_dense();
        // RREF: pivots 1, zeros above and below.
        assert_eq!(basis[0], vec![rat(1, 1), rat(0, 1), rat(-1, 1)]);
        assert_eq!(basis[1], vec![rat(0, 1), rat(1, 1), rat(2, 1)]);
    }

    #[test]
    fn minimal_polynomial_of_projection() {
        // Diagonal (1, 1, 0): minimal polynomial x^2 - x.
        let mut m = Mat::<Rat>::zeros(3, 3);
        *m.at_mut(0, 0) = Rat::from_int(1);
        *m.at_mut(1, 1) = Rat::from_int(1);
        let p = minimal_polynomial(&m, &Rat::zero());
        assert_eq!(p, vec![Rat::zero(), Rat::from_int(-1), Rat::from_int(1)]);
    }

    #[test]
    fn minimal_polynomial_of_rotation_block() {
        // [[0,-1],[1,0]]: x^2 + 1.
        let mut m = Mat::<Rat>::zeros(2, 2);
        *m.at_mut(0, 1) = Rat::from_int(-1);
        *m.at_mut(1, 0) = Rat::from_int(1);
        let p = minimal_polynomial(&m, &Rat::zero());
        assert_eq!(p, vec![Rat::from_int(1), Rat::zero(), Rat::from_int(1)]);
    }

    #[test]
    fn approximate_rowspace_flushes_noise() {
        let mut rs = RowSpace::new(2, 1e-9f64);
        rs.insert_dense(&[1.0, 1.0]);
        rs.insert_dense(&[1.0, 1.0 + 1e-13]);
        assert_eq!(rs.rank(), 1);
    }
}
