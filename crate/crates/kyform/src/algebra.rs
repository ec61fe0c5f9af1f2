//! Finite-dimensional real metric Lie algebras given by structure constants,
//! with the structural queries the solvers build on: center, commutator
//! ideal, orthogonal complements and the 2-step decomposition.
//!
//! Brackets are stored sparsely for ordered pairs `(i, j)` with `i < j`; the
//! opposite orientation is derived by sign flip, so antisymmetry holds by
//! construction. All values are immutable after construction and every
//! operation is a pure function.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::exec::{self, Execution};
use crate::linalg::{Mat, RowSpace};
use crate::scalar::{Ring, Scalar};

/// An `n x n` matrix acting on basis coordinates, viewed as a (1,1)-tensor.
pub type Endo<K> = Mat<K>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("bracket key ({i},{j}) is invalid for dimension {dim}")]
    InvalidBracketKey { i: usize, j: usize, dim: usize },
    #[error("metric is not symmetric")]
    MetricNotSymmetric,
    #[error("metric is not positive definite")]
    MetricNotPositiveDefinite,
    #[error("Jacobi identity fails on basis triple ({i},{j},{k})")]
    JacobiViolation { i: usize, j: usize, k: usize },
    #[error("operation requires a 2-step nilpotent algebra")]
    NotTwoStep,
    #[error("subspace is not closed under the bracket")]
    NotSubalgebra,
    #[error("vector does not lie in the subspace")]
    NotInSubspace,
    #[error("labels length {found} does not match dimension {expected}")]
    BadLabels { expected: usize, found: usize },
    #[error("internal invariant violated: {0}")]
    Internal(&'static str),
}

/// A subspace of coordinate space, stored as a canonical reduced-echelon
/// basis (each row has entry 1 at its pivot and 0 at all other pivots).
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<K: Scalar> {
    ambient: usize,
    basis: Vec<Vec<K>>,
    pivots: Vec<usize>,
}

impl<K: Scalar> Subspace<K> {
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![K::zero(); ambient];
                v[i] = K::one();
                v
            })
            .collect();
        Self { ambient, basis, pivots: (0..ambient).collect() }
    }

    pub fn from_spanning(ambient: usize, vectors: &[Vec<K>], tol: &K) -> Self {
        let mut rs = RowSpace::new(ambient, tol.clone());
        for v in vectors {
            assert_eq!(v.len(), ambient);
            rs.insert_dense(v);
        }
        Self::from_rowspace(&rs)
    }

    pub fn from_rowspace(rs: &RowSpace<K>) -> Self {
        Self { ambient: rs.cols(), basis: rs.basis_dense(), pivots: rs.pivots() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<K>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after subtracting its components along the basis.
    pub fn reduce(&self, v: &[K], tol: &K) -> Vec<K> {
        assert_eq!(v.len(), self.ambient);
        let mut rem = v.to_vec();
        for (row, p) in self.basis.iter().zip(&self.pivots) {
            let c = rem[*p].clone();
            if c.is_zero() {
                continue;
            }
            for (x, b) in rem.iter_mut().zip(row) {
                *x = x.sub(&c.mul(b));
            }
        }
        for x in &mut rem {
            if x.is_negligible(tol) {
                *x = K::zero();
            }
        }
        rem
    }

    pub fn contains(&self, v: &[K], tol: &K) -> bool {
        self.reduce(v, tol).iter().all(K::is_zero)
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[K], tol: &K) -> Option<Vec<K>> {
        if !self.contains(v, tol) {
            return None;
        }
        Some(self.pivots.iter().map(|p| v[*p].clone()).collect())
    }

    pub fn contains_subspace(&self, other: &Self, tol: &K) -> bool {
        other.basis.iter().all(|v| self.contains(v, tol))
    }

    pub fn same_span(&self, other: &Self, tol: &K) -> bool {
        self.rank() == other.rank() && self.contains_subspace(other, tol)
    }

    pub fn sum(&self, other: &Self, tol: &K) -> Self {
        assert_eq!(self.ambient, other.ambient);
        let mut rs = RowSpace::new(self.ambient, tol.clone());
        for v in self.basis.iter().chain(&other.basis) {
            rs.insert_dense(v);
        }
        Self::from_rowspace(&rs)
    }

    pub fn intersect(&self, other: &Self, tol: &K) -> Self {
        assert_eq!(self.ambient, other.ambient);
        let (r1, r2) = (self.rank(), other.rank());
        // Solve B1^T c1 = B2^T c2 coordinate-wise.
        let mut rs = RowSpace::new(r1 + r2, tol.clone());
        for coord in 0..self.ambient {
            let mut row = Vec::with_capacity(r1 + r2);
            for b in &self.basis {
                row.push(b[coord].clone());
            }
            for b in &other.basis {
                row.push(b[coord].neg());
            }
            rs.insert_dense(&row);
        }
        let vectors: Vec<Vec<K>> = rs
            .nullspace()
            .into_iter()
            .map(|c| {
                let mut v = vec![K::zero(); self.ambient];
                for (s, b) in c[..r1].iter().zip(&self.basis) {
                    for (x, y) in v.iter_mut().zip(b) {
                        *x = x.add(&s.mul(y));
                    }
                }
                v
            })
            .collect();
        Self::from_spanning(self.ambient, &vectors, tol)
    }

    /// Basis as matrix rows (`rank x n`).
    pub fn matrix_rows(&self) -> Mat<K> {
        Mat::from_rows(self.basis.clone())
    }

    /// Basis as matrix columns (`n x rank`).
    pub fn matrix_cols(&self) -> Mat<K> {
        self.matrix_rows().transpose()
    }
}

/// Orthogonal decomposition of a 2-step algebra: the center splits as
/// `a (+) n'` with `n'` the commutator ideal, and `v` is the orthogonal
/// complement of the center.
#[derive(Clone, Debug)]
pub struct ZavSplit<K: Scalar> {
    pub a: Subspace<K>,
    pub nprime: Subspace<K>,
    pub v: Subspace<K>,
}

/// A real Lie algebra with an inner product, in a fixed basis.
#[derive(Clone, Debug)]
pub struct MetricLieAlgebra<K: Scalar> {
    dim: usize,
    brackets: BTreeMap<(usize, usize), Vec<K>>,
    metric: Mat<K>,
    metric_inv: Mat<K>,
    eps: K,
    labels: Option<Vec<String>>,
}

impl<K: Scalar> MetricLieAlgebra<K> {
    /// Default relative tolerance: zero in exact mode, `1e-9` otherwise.
    pub fn default_eps() -> K {
        if K::EXACT {
            K::zero()
        } else {
            K::from_ratio(1, 1_000_000_000)
        }
    }

    pub fn new(
        dim: usize,
        brackets: impl IntoIterator<Item = ((usize, usize), Vec<K>)>,
        metric: Mat<K>,
    ) -> Result<Self, AlgebraError> {
        Self::with_options(dim, brackets, metric, None, None)
    }

    pub fn with_orthonormal_metric(
        dim: usize,
        brackets: impl IntoIterator<Item = ((usize, usize), Vec<K>)>,
    ) -> Result<Self, AlgebraError> {
        Self::new(dim, brackets, Mat::identity(dim))
    }

    pub fn with_options(
        dim: usize,
        brackets: impl IntoIterator<Item = ((usize, usize), Vec<K>)>,
        metric: Mat<K>,
        eps: Option<K>,
        labels: Option<Vec<String>>,
    ) -> Result<Self, AlgebraError> {
        let eps = eps.unwrap_or_else(Self::default_eps);
        let mut table = BTreeMap::new();
        for ((i, j), v) in brackets {
            if i >= j || j >= dim {
                return Err(AlgebraError::InvalidBracketKey { i, j, dim });
            }
            if v.len() != dim {
                return Err(AlgebraError::DimensionMismatch { expected: dim, found: v.len() });
            }
            if v.iter().all(K::is_zero) {
                continue;
            }
            table.insert((i, j), v);
        }
        if metric.nrows() != dim || metric.ncols() != dim {
            return Err(AlgebraError::DimensionMismatch { expected: dim, found: metric.nrows() });
        }
        if let Some(l) = &labels {
            if l.len() != dim {
                return Err(AlgebraError::BadLabels { expected: dim, found: l.len() });
            }
        }
        let metric_scale = metric.max_abs_entry();
        let metric_tol = eps.mul(&metric_scale);
        if !metric.sub_mat(&metric.transpose()).is_negligible(&metric_tol) {
            return Err(AlgebraError::MetricNotSymmetric);
        }
        if !metric.is_positive_definite(&metric_tol) {
            return Err(AlgebraError::MetricNotPositiveDefinite);
        }
        let metric_inv = metric
            .invert(&metric_tol)
            .map_err(|_| AlgebraError::MetricNotPositiveDefinite)?;
        let alg = Self { dim, brackets: table, metric, metric_inv, eps, labels };
        alg.check_jacobi()?;
        Ok(alg)
    }

    fn check_jacobi(&self) -> Result<(), AlgebraError> {
        let n = self.dim;
        let scale = self.max_bracket_abs();
        let tol = self.eps.mul(&scale.mul(&scale));
        let mut triples = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    triples.push((i, j, k));
                }
            }
        }
        let bad = exec::find_first_map(Execution::default(), &triples, |&(i, j, k)| {
            let mut sum = self.bracket_with_basis(&self.bracket_basis(i, j), k);
            for (x, y) in sum
                .iter_mut()
                .zip(self.bracket_with_basis(&self.bracket_basis(j, k), i))
            {
                *x = x.add(&y);
            }
            for (x, y) in sum
                .iter_mut()
                .zip(self.bracket_with_basis(&self.bracket_basis(k, i), j))
            {
                *x = x.add(&y);
            }
            if sum.iter().all(|x| x.is_negligible(&tol)) {
                None
            } else {
                Some((i, j, k))
            }
        });
        match bad {
            Some((i, j, k)) => Err(AlgebraError::JacobiViolation { i, j, k }),
            None => Ok(()),
        }
    }

    /// The abelian algebra of the given dimension, orthonormal basis.
    pub fn abelian(dim: usize) -> Self {
        Self::with_orthonormal_metric(dim, []).expect("abelian data is valid")
    }

    /// The real Heisenberg algebra `h_{2n+1}`: basis
    /// `x_1, y_1, ..., x_n, y_n, z` with `[x_i, y_i] = z`, orthonormal.
    pub fn heisenberg(n: usize) -> Self {
        assert!(n >= 1);
        let dim = 2 * n + 1;
        let mut brackets = Vec::new();
        for i in 0..n {
            let mut v = vec![K::zero(); dim];
            v[2 * n] = K::one();
            brackets.push(((2 * i, 2 * i + 1), v));
        }
        let mut labels: Vec<String> = Vec::new();
        for i in 1..=n {
            labels.push(format!("x{i}"));
            labels.push(format!("y{i}"));
        }
        labels.push("z".to_owned());
        Self::with_options(dim, brackets, Mat::identity(dim), None, Some(labels))
            .expect("heisenberg data is valid")
    }

    /// The free 2-step nilpotent algebra on `g` generators: generators
    /// `x_1..x_g` followed by `z_{ij} = [x_i, x_j]` for `i < j`, orthonormal.
    pub fn free_two_step(g: usize) -> Self {
        assert!(g >= 2);
        let m = g * (g - 1) / 2;
        let dim = g + m;
        let mut brackets = Vec::new();
        let mut labels: Vec<String> = (1..=g).map(|i| format!("x{i}")).collect();
        let mut idx = g;
        for i in 0..g {
            for j in i + 1..g {
                let mut v = vec![K::zero(); dim];
                v[idx] = K::one();
                brackets.push(((i, j), v));
                labels.push(format!("z{}{}", i + 1, j + 1));
                idx += 1;
            }
        }
        Self::with_options(dim, brackets, Mat::identity(dim), None, Some(labels))
            .expect("free 2-step data is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &Mat<K> {
        &self.metric
    }

    pub fn metric_inv(&self) -> &Mat<K> {
        &self.metric_inv
    }

    pub fn eps(&self) -> &K {
        &self.eps
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("e{}", i + 1),
        }
    }

    /// Sparse bracket table entries `(i, j) -> [e_i, e_j]`, `i < j`.
    pub fn bracket_table(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<K>)> {
        self.brackets.iter()
    }

    pub fn max_bracket_abs(&self) -> K {
        let mut best = K::one();
        for v in self.brackets.values() {
            for x in v {
                if x.abs_gt(&best) {
                    best = x.clone();
                }
            }
        }
        best.abs()
    }

    /// Absolute zero threshold for residuals of the given scale.
    pub fn zero_tol(&self, scale: &K) -> K {
        let s = if scale.abs_gt(&K::one()) { scale.abs() } else { K::one() };
        self.eps.mul(&s)
    }

    /// `[e_i, e_j]` as a coordinate vector.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<K> {
        if i == j {
            return vec![K::zero(); self.dim];
        }
        let (key, flip) = if i < j { ((i, j), false) } else { ((j, i), true) };
        match self.brackets.get(&key) {
            None => vec![K::zero(); self.dim],
            Some(v) if flip => v.iter().map(Ring::neg).collect(),
            Some(v) => v.clone(),
        }
    }

    /// `[x, e_k]` for a coordinate vector `x`.
    pub fn bracket_with_basis(&self, x: &[K], k: usize) -> Vec<K> {
        let mut out = vec![K::zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            let b = self.bracket_basis(i, k);
            for (o, bv) in out.iter_mut().zip(&b) {
                if !bv.is_zero() {
                    *o = o.add(&xi.mul(bv));
                }
            }
        }
        out
    }

    /// Bilinear extension `[x, y]`.
    pub fn bracket(&self, x: &[K], y: &[K]) -> Result<Vec<K>, AlgebraError> {
        if x.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        if y.len() != self.dim {
            return Err(AlgebraError::DimensionMismatch { expected: self.dim, found: y.len() });
        }
        let mut out = vec![K::zero(); self.dim];
        for ((i, j), v) in &self.brackets {
            // x_i y_j - x_j y_i weights the stored [e_i, e_j].
            let w = x[*i].mul(&y[*j]).sub(&x[*j].mul(&y[*i]));
            if w.is_zero() {
                continue;
            }
            for (o, bv) in out.iter_mut().zip(v) {
                if !bv.is_zero() {
                    *o = o.add(&w.mul(bv));
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `ad_{e_i}`, column `j` holding `[e_i, e_j]`.
    pub fn ad_basis(&self, i: usize) -> Mat<K> {
        let mut m = Mat::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            if i == j {
                continue;
            }
            let v = self.bracket_basis(i, j);
            for (k, x) in v.into_iter().enumerate() {
                if !x.is_zero() {
                    *m.at_mut(k, j) = x;
                }
            }
        }
        m
    }

    /// Inner product `g(x, y)`.
    pub fn inner(&self, x: &[K], y: &[K]) -> K {
        let gy = self.metric.mul_vec(y);
        x.iter()
            .zip(&gy)
            .fold(K::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
    }

    fn bracket_scale_tol(&self) -> K {
        self.zero_tol(&self.max_bracket_abs())
    }

    /// Center: kernel of the stacked adjoint maps.
    pub fn center(&self) -> Subspace<K> {
        let tol = self.bracket_scale_tol();
        let mut rs = RowSpace::new(self.dim, tol.clone());
        for j in 0..self.dim {
            let ad = self.ad_basis(j);
            for r in 0..self.dim {
                rs.insert_dense(ad.row(r));
            }
        }
        let null = rs.nullspace();
        Subspace::from_spanning(self.dim, &null, &tol)
    }

    /// Commutator ideal: span of all basis brackets.
    pub fn derived(&self) -> Subspace<K> {
        let tol = self.bracket_scale_tol();
        let vectors: Vec<Vec<K>> = self.brackets.values().cloned().collect();
        Subspace::from_spanning(self.dim, &vectors, &tol)
    }

    pub fn is_abelian(&self) -> bool {
        self.derived().is_zero()
    }

    /// Not abelian, and the commutator ideal sits inside the center.
    pub fn is_two_step(&self) -> bool {
        let derived = self.derived();
        if derived.is_zero() {
            return false;
        }
        self.center()
            .contains_subspace(&derived, &self.bracket_scale_tol())
    }

    pub fn orthogonal_complement(&self, s: &Subspace<K>) -> Result<Subspace<K>, AlgebraError> {
        if s.ambient_dim() != self.dim {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.dim,
                found: s.ambient_dim(),
            });
        }
        let tol = self.zero_tol(&self.metric.max_abs_entry());
        let mut rs = RowSpace::new(self.dim, tol.clone());
        for b in s.basis() {
            rs.insert_dense(&self.metric.mul_vec(b));
        }
        let null = rs.nullspace();
        Ok(Subspace::from_spanning(self.dim, &null, &tol))
    }

    /// Orthogonal decomposition `n = a (+) n' (+) v` of a 2-step algebra.
    pub fn zav_split(&self) -> Result<ZavSplit<K>, AlgebraError> {
        if !self.is_two_step() {
            return Err(AlgebraError::NotTwoStep);
        }
        let center = self.center();
        let nprime = self.derived();
        let v = self.orthogonal_complement(&center)?;
        // a = center cap (n')^perp: kernel of the stacked ads together with
        // the metric rows of the commutator ideal.
        let tol = self.zero_tol(&self.max_bracket_abs().add(&self.metric.max_abs_entry()));
        let mut rs = RowSpace::new(self.dim, tol.clone());
        for j in 0..self.dim {
            let ad = self.ad_basis(j);
            for r in 0..self.dim {
                rs.insert_dense(ad.row(r));
            }
        }
        for b in nprime.basis() {
            rs.insert_dense(&self.metric.mul_vec(b));
        }
        let a = Subspace::from_spanning(self.dim, &rs.nullspace(), &tol);
        if a.rank() + nprime.rank() != center.rank()
            || center.rank() + v.rank() != self.dim
        {
            return Err(AlgebraError::Internal("zav split ranks do not add up"));
        }
        Ok(ZavSplit { a, nprime, v })
    }

    /// Block-diagonal direct sum of two algebras over the same scalar field.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let dim = self.dim + other.dim;
        let mut brackets: Vec<((usize, usize), Vec<K>)> = Vec::new();
        for ((i, j), v) in &self.brackets {
            let mut w = v.clone();
            w.extend(std::iter::repeat_with(K::zero).take(other.dim));
            brackets.push(((*i, *j), w));
        }
        for ((i, j), v) in &other.brackets {
            let mut w = vec![K::zero(); self.dim];
            w.extend(v.iter().cloned());
            brackets.push(((self.dim + i, self.dim + j), w));
        }
        let mut metric = Mat::zeros(dim, dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                *metric.at_mut(r, c) = self.metric.at(r, c).clone();
            }
        }
        for r in 0..other.dim {
            for c in 0..other.dim {
                *metric.at_mut(self.dim + r, self.dim + c) = other.metric.at(r, c).clone();
            }
        }
        let eps = if self.eps.abs_gt(&other.eps) {
            self.eps.clone()
        } else {
            other.eps.clone()
        };
        let labels = match (&self.labels, &other.labels) {
            (Some(a), Some(b)) => Some(a.iter().chain(b).cloned().collect()),
            _ => None,
        };
        Self::with_options(dim, brackets, metric, Some(eps), labels)
            .expect("direct sum of valid algebras is valid")
    }

    /// Skew-symmetry of `t` with respect to the metric: `T^t g + g T = 0`.
    pub fn is_skew(&self, t: &Endo<K>) -> bool {
        let gt = self.metric.matmul(t);
        let s = t.transpose().matmul(&self.metric).add_mat(&gt);
        let scale = t.max_abs_entry().mul(&self.metric.max_abs_entry());
        s.is_negligible(&self.zero_tol(&scale))
    }

    /// Symmetry of `t` with respect to the metric: `T^t g = g T`.
    pub fn is_g_symmetric(&self, t: &Endo<K>) -> bool {
        let s = t
            .transpose()
            .matmul(&self.metric)
            .sub_mat(&self.metric.matmul(t));
        let scale = t.max_abs_entry().mul(&self.metric.max_abs_entry());
        s.is_negligible(&self.zero_tol(&scale))
    }

    /// Bi-invariance of an endomorphism: `J[x,y] = [Jx,y] = [x,Jy]` on all
    /// basis pairs.
    pub fn is_bi_invariant(&self, j: &Endo<K>) -> bool {
        let tol = self.zero_tol(&j.max_abs_entry().mul(&self.max_bracket_abs()));
        for a in 0..self.dim {
            for b in a + 1..self.dim {
                let jb = j.mul_vec(&self.bracket_basis(a, b));
                let left = self.bracket_with_basis(&j.col(a), b);
                let right = self.bracket_with_basis(&j.col(b), a);
                for ((x, y), z) in jb.iter().zip(&left).zip(&right) {
                    if !x.sub(y).is_negligible(&tol) || !x.add(z).is_negligible(&tol) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Restrict the algebra to a subspace closed under the bracket.
    /// The result uses the subspace's canonical basis; the metric is the
    /// restricted Gram matrix.
    pub fn restrict_to_subalgebra(&self, s: &Subspace<K>) -> Result<Self, AlgebraError> {
        let tol = self.bracket_scale_tol();
        let r = s.rank();
        let mut brackets = Vec::new();
        for a in 0..r {
            for b in a + 1..r {
                let br = self
                    .bracket(&s.basis()[a], &s.basis()[b])
                    .expect("basis vectors have ambient length");
                let coords = s.coordinates(&br, &tol).ok_or(AlgebraError::NotSubalgebra)?;
                brackets.push(((a, b), coords));
            }
        }
        let gram = Mat::from_fn(r, r, |i, j| self.inner(&s.basis()[i], &s.basis()[j]));
        Self::with_options(r, brackets, gram, Some(self.eps.clone()), None)
    }

    /// Restrict an endomorphism to an invariant subspace, in the subspace's
    /// canonical basis.
    pub fn restrict_endo(&self, s: &Subspace<K>, t: &Endo<K>) -> Result<Endo<K>, AlgebraError> {
        let tol = self.zero_tol(&t.max_abs_entry());
        let r = s.rank();
        let mut out = Mat::zeros(r, r);
        for (c, b) in s.basis().iter().enumerate() {
            let image = t.mul_vec(b);
            let coords = s.coordinates(&image, &tol).ok_or(AlgebraError::NotInSubspace)?;
            for (row, x) in coords.into_iter().enumerate() {
                *out.at_mut(row, c) = x;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn h3() -> MetricLieAlgebra<Rat> {
        MetricLieAlgebra::heisenberg(1)
    }

    #[test]
    fn heisenberg_bracket_table() {
        let l = h3();
        let e1 = vec![Rat::from_int(1), Rat::zero(), Rat::zero()];
        let e2 = vec![Rat::zero(), Rat::from_int(1), Rat::zero()];
        let e3 = vec![Rat::zero(), Rat::zero(), Rat::from_int(1)];
        assert_eq!(l.bracket(&e1, &e2).unwrap(), e3);
        // Antisymmetry and [x, x] = 0.
        let back = l.bracket(&e2, &e1).unwrap();
        assert_eq!(back, e3.iter().map(Ring::neg).collect::<Vec<_>>());
        assert!(l.bracket(&e1, &e1).unwrap().iter().all(Rat::is_zero));
    }

    #[test]
    fn jacobi_violation_is_rejected() {
        // [e1,e2]=e3, [e1,e3]=e1 violates Jacobi on (1,2,3).
        let mk = |k: usize| {
            let mut v = vec![Rat::zero(); 3];
            v[k] = Rat::from_int(1);
            v
        };
        let err = MetricLieAlgebra::<Rat>::with_orthonormal_metric(
            3,
            [((0, 1), mk(2)), ((0, 2), mk(0))],
        )
        .unwrap_err();
        assert_eq!(err, AlgebraError::JacobiViolation { i: 0, j: 1, k: 2 });
    }

    #[test]
    fn center_and_derived_of_heisenberg() {
        let l = h3();
        let c = l.center();
        assert_eq!(c.rank(), 1);
        assert_eq!(c.basis()[0], vec![Rat::zero(), Rat::zero(), Rat::from_int(1)]);
        let d = l.derived();
        assert_eq!(d.rank(), 1);
        assert!(c.same_span(&d, &Rat::zero()));
        assert!(l.is_two_step());
    }

    #[test]
    fn abelian_center_is_everything() {
        let l = MetricLieAlgebra::<Rat>::abelian(3);
        assert_eq!(l.center().rank(), 3);
        assert_eq!(l.derived().rank(), 0);
        assert!(!l.is_two_step());
        assert!(l.zav_split().is_err());
    }

    #[test]
    fn three_step_algebra_is_not_two_step() {
        // [e1,e2]=e3, [e1,e3]=e4.
        let mk = |k: usize| {
            let mut v = vec![Rat::zero(); 4];
            v[k] = Rat::from_int(1);
            v
        };
        let l = MetricLieAlgebra::<Rat>::with_orthonormal_metric(
            4,
            [((0, 1), mk(2)), ((0, 2), mk(3))],
        )
        .unwrap();
        assert!(!l.is_two_step());
    }

    #[test]
    fn orthogonal_complement_dimensions() {
        let l = h3();
        let c = l.center();
        let v = l.orthogonal_complement(&c).unwrap();
        assert_eq!(v.rank(), 2);
        assert!(v.contains(&[Rat::from_int(1), Rat::zero(), Rat::zero()], &Rat::zero()));
        let full = Subspace::full(3);
        assert_eq!(l.orthogonal_complement(&full).unwrap().rank(), 0);
        // Involution on spans.
        let back = l.orthogonal_complement(&v).unwrap();
        assert!(back.same_span(&c, &Rat::zero()));
    }

    #[test]
    fn zav_split_of_heisenberg() {
        let l = h3();
        let z = l.zav_split().unwrap();
        assert_eq!(z.a.rank(), 0);
        assert_eq!(z.nprime.rank(), 1);
        assert_eq!(z.v.rank(), 2);
    }

    #[test]
    fn direct_sum_block_structure() {
        let l = h3().direct_sum(&MetricLieAlgebra::abelian(1));
        assert_eq!(l.dim(), 4);
        assert_eq!(l.center().rank(), 2);
        assert!(l.is_two_step());
        let ab = MetricLieAlgebra::<Rat>::abelian(2).direct_sum(&MetricLieAlgebra::abelian(2));
        assert!(ab.is_abelian());
    }

    #[test]
    fn free_two_step_shape() {
        let l = MetricLieAlgebra::<Rat>::free_two_step(3);
        assert_eq!(l.dim(), 6);
        assert!(l.is_two_step());
        assert_eq!(l.center().rank(), 3);
        assert_eq!(l.derived().rank(), 3);
    }

    #[test]
    fn unimodularity_of_two_step() {
        let l = MetricLieAlgebra::<Rat>::free_two_step(3);
        for i in 0..l.dim() {
            let ad = l.ad_basis(i);
            let trace = (0..l.dim()).fold(Rat::zero(), |acc, k| acc.add(ad.at(k, k)));
            assert!(trace.is_zero());
        }
    }

    #[test]
    fn restriction_to_invariant_subalgebra() {
        let l = h3().direct_sum(&MetricLieAlgebra::abelian(1));
        // First factor is a subalgebra.
        let s = Subspace::from_spanning(
            4,
            &[
                vec![Rat::from_int(1), Rat::zero(), Rat::zero(), Rat::zero()],
                vec![Rat::zero(), Rat::from_int(1), Rat::zero(), Rat::zero()],
                vec![Rat::zero(), Rat::zero(), Rat::from_int(1), Rat::zero()],
            ],
            &Rat::zero(),
        );
        let r = l.restrict_to_subalgebra(&s).unwrap();
        assert_eq!(r.dim(), 3);
        assert!(r.is_two_step());
    }
}
