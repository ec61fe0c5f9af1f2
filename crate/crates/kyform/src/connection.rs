//! The Levi-Civita connection of a left-invariant metric and the derived
//! differential operators on left-invariant tensors.
//!
//! The connection is determined by `2 g(nabla_x y, z) =
//! g([x,y],z) - g([y,z],x) + g([z,x],y)` on basis vectors; a
//! [`ConnectionTable`] caches all `n` matrices up front because every
//! downstream operation touches all of them.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{Endo, MetricLieAlgebra};
use crate::linalg::Mat;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConnectionError {
    #[error("the 2-form matrix is not skew-symmetric")]
    NotSkewForm,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// All covariant-derivative matrices `nabla_{e_i}` of a metric Lie algebra.
#[derive(Clone, Debug)]
pub struct ConnectionTable<K: Scalar> {
    nabla: Vec<Mat<K>>,
}

/// Solve the Koszul formula for every direction.
pub fn levi_civita<K: Scalar>(l: &MetricLieAlgebra<K>) -> ConnectionTable<K> {
    let n = l.dim();
    let half = K::from_ratio(1, 2);
    // gb[i][j] = g [e_i, e_j], so g([e_i,e_j], e_k) = gb[i][j][k].
    let gb: Vec<Vec<Vec<K>>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| l.metric().mul_vec(&l.bracket_basis(i, j)))
                .collect()
        })
        .collect();
    let mut nabla = Vec::with_capacity(n);
    for i in 0..n {
        // rhs[k][j] = (1/2)(g([e_i,e_j],e_k) - g([e_j,e_k],e_i) + g([e_k,e_i],e_j))
        let mut rhs = Mat::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let val = gb[i][j][k].sub(&gb[j][k][i]).add(&gb[k][i][j]);
                if !val.is_zero() {
                    *rhs.at_mut(k, j) = val.mul(&half);
                }
            }
        }
        // Columns of nabla_i solve g * x = rhs column.
        nabla.push(l.metric_inv().matmul(&rhs));
    }
    ConnectionTable { nabla }
}

impl<K: Scalar> ConnectionTable<K> {
    pub fn dim(&self) -> usize {
        self.nabla.len()
    }

    /// Matrix of `nabla_{e_i}`.
    pub fn matrix(&self, i: usize) -> &Mat<K> {
        &self.nabla[i]
    }

    pub fn matrices(&self) -> &[Mat<K>] {
        &self.nabla
    }

    /// `(nabla_{e_i} T)` for a left-invariant tensor: the matrix commutator
    /// `nabla_i T - T nabla_i`.
    pub fn covariant_derivative_endo(&self, t: &Endo<K>, i: usize) -> Endo<K> {
        self.nabla[i].commutator(t)
    }

    /// True when every directional covariant derivative of `t` vanishes.
    pub fn is_parallel(&self, l: &MetricLieAlgebra<K>, t: &Endo<K>) -> bool {
        let scale = t
            .max_abs_entry()
            .mul(&self.nabla.iter().fold(K::one(), |m, nb| {
                let e = nb.max_abs_entry();
                if e.abs_gt(&m) {
                    e
                } else {
                    m
                }
            }));
        let tol = l.zero_tol(&scale);
        (0..self.dim()).all(|i| self.covariant_derivative_endo(t, i).is_negligible(&tol))
    }

    /// Metric compatibility (`nabla_i` skew w.r.t. `g`) and torsion freeness
    /// (`nabla_i e_j - nabla_j e_i = [e_i, e_j]`), checked on all pairs.
    pub fn satisfies_invariants(&self, l: &MetricLieAlgebra<K>) -> bool {
        let n = self.dim();
        (0..n).all(|i| l.is_skew(&self.nabla[i]))
            && (0..n).all(|i| {
                (i + 1..n).all(|j| {
                    let mut diff = self.nabla[i].col(j);
                    let other = self.nabla[j].col(i);
                    let br = l.bracket_basis(i, j);
                    for ((d, o), b) in diff.iter_mut().zip(&other).zip(&br) {
                        *d = d.sub(o).sub(b);
                    }
                    let scale = self.nabla[i].max_abs_entry().add(&l.max_bracket_abs());
                    diff.iter().all(|x| x.is_negligible(&l.zero_tol(&scale)))
                })
            })
    }
}

/// Alternating 3-form table on basis triples `i < j < k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeForm<K: Scalar> {
    dim: usize,
    vals: BTreeMap<(usize, usize, usize), K>,
}

impl<K: Scalar> ThreeForm<K> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Value on an ordered basis triple, with alternating signs.
    pub fn get(&self, i: usize, j: usize, k: usize) -> K {
        if i == j || j == k || i == k {
            return K::zero();
        }
        let mut idx = [i, j, k];
        // Sort the triple, tracking the permutation sign.
        let mut sign = false;
        for a in 0..2 {
            for b in 0..2 - a {
                if idx[b] > idx[b + 1] {
                    idx.swap(b, b + 1);
                    sign = !sign;
                }
            }
        }
        let v = self
            .vals
            .get(&(idx[0], idx[1], idx[2]))
            .cloned()
            .unwrap_or_else(K::zero);
        if sign {
            v.neg()
        } else {
            v
        }
    }

    /// Entries on increasing triples (zero entries omitted).
    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &K)> {
        self.vals.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.vals.is_empty()
    }
}

/// Exterior derivative of a left-invariant 2-form given by its skew value
/// matrix `omega[j][k] = w(e_j, e_k)`:
/// `dw(x,y,z) = -w([x,y],z) + w([x,z],y) - w([y,z],x)`.
pub fn exterior_derivative_2form<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    omega: &Mat<K>,
) -> Result<ThreeForm<K>, ConnectionError> {
    let n = l.dim();
    if omega.nrows() != n || omega.ncols() != n {
        return Err(ConnectionError::DimensionMismatch { expected: n, found: omega.nrows() });
    }
    let skew_tol = l.zero_tol(&omega.max_abs_entry());
    if !omega.add_mat(&omega.transpose()).is_negligible(&skew_tol) {
        return Err(ConnectionError::NotSkewForm);
    }
    let w_of = |x: &[K], k: usize| -> K {
        // w(x, e_k) = sum_j x_j omega[j][k]
        x.iter()
            .enumerate()
            .fold(K::zero(), |acc, (j, xj)| {
                if xj.is_zero() {
                    acc
                } else {
                    acc.add(&xj.mul(omega.at(j, k)))
                }
            })
    };
    let tol = l.zero_tol(&omega.max_abs_entry().mul(&l.max_bracket_abs()));
    let mut vals = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let bij = l.bracket_basis(i, j);
            for k in j + 1..n {
                let bik = l.bracket_basis(i, k);
                let bjk = l.bracket_basis(j, k);
                let val = w_of(&bik, j).sub(&w_of(&bij, k)).sub(&w_of(&bjk, i));
                if !val.is_negligible(&tol) {
                    vals.insert((i, j, k), val);
                }
            }
        }
    }
    Ok(ThreeForm { dim: n, vals })
}

/// The 2-form of a tensor: `w(x, y) = g(Tx, y)`, i.e. `Omega = T^t g`.
pub fn form_of_endo<K: Scalar>(l: &MetricLieAlgebra<K>, t: &Endo<K>) -> Mat<K> {
    t.transpose().matmul(l.metric())
}

/// The tensor of a 2-form: inverse of [`form_of_endo`].
pub fn endo_of_form<K: Scalar>(l: &MetricLieAlgebra<K>, omega: &Mat<K>) -> Endo<K> {
    // Omega = T^t g and skewness give T = -g^{-1} Omega.
    l.metric_inv().matmul(omega).neg_mat()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rat, Ring};

    fn zero() -> Rat {
        <Rat as Ring>::zero()
    }

    fn h3() -> MetricLieAlgebra<Rat> {
        MetricLieAlgebra::heisenberg(1)
    }

    fn rat(n: i64, d: i64) -> Rat {
        Rat::from_ratio(n, d)
    }

    #[test]
    fn abelian_connection_vanishes() {
        let l = MetricLieAlgebra::<Rat>::abelian(3);
        let c = levi_civita(&l);
        for i in 0..3 {
            assert!(c.matrix(i).is_negligible(&zero()));
        }
        // Every tensor is parallel.
        let mut t = Mat::<Rat>::zeros(3, 3);
        *t.at_mut(0, 1) = rat(7, 2);
        assert!(c.is_parallel(&l, &t));
    }

    #[test]
    fn heisenberg_connection_values() {
        let l = h3();
        let c = levi_civita(&l);
        // nabla_{e1} e2 = e3/2, nabla_{e1} e3 = -e2/2, nabla_{e3} e3 = 0.
        assert_eq!(c.matrix(0).col(1), vec![rat(0, 1), rat(0, 1), rat(1, 2)]);
        assert_eq!(c.matrix(0).col(2), vec![rat(0, 1), rat(-1, 2), rat(0, 1)]);
        assert!(c.matrix(2).col(2).iter().all(Ring::is_zero));
        assert!(c.satisfies_invariants(&l));
    }

    #[test]
    fn connection_uniqueness_breaks_under_perturbation() {
        let l = h3();
        let c = levi_civita(&l);
        for (r, s) in [(0usize, 1usize), (1, 2), (2, 0)] {
            let mut nabla = c.nabla.clone();
            let bumped = nabla[0].at(r, s).add(&rat(1, 3));
            *nabla[0].at_mut(r, s) = bumped;
            let perturbed = ConnectionTable { nabla };
            assert!(!perturbed.satisfies_invariants(&l));
        }
    }

    #[test]
    fn identity_is_parallel() {
        let l = h3();
        let c = levi_civita(&l);
        assert!(c.is_parallel(&l, &Mat::identity(3)));
        // J0 with J0 e1 = e2, J0 e3 = 0 is not parallel:
        // (nabla_{e1} J0) e1 = e3/2.
        let mut j0 = Mat::<Rat>::zeros(3, 3);
        *j0.at_mut(1, 0) = rat(1, 1);
        *j0.at_mut(0, 1) = rat(-1, 1);
        let d = c.covariant_derivative_endo(&j0, 0);
        assert_eq!(d.col(0), vec![rat(0, 1), rat(0, 1), rat(1, 2)]);
        assert!(!c.is_parallel(&l, &j0));
    }

    #[test]
    fn heisenberg_two_forms_are_closed() {
        let l = h3();
        for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
            let mut omega = Mat::<Rat>::zeros(3, 3);
            *omega.at_mut(a, b) = rat(1, 1);
            *omega.at_mut(b, a) = rat(-1, 1);
            let d = exterior_derivative_2form(&l, &omega).unwrap();
            assert!(d.is_zero());
        }
    }

    #[test]
    fn non_skew_form_is_rejected() {
        let l = h3();
        let mut omega = Mat::<Rat>::zeros(3, 3);
        *omega.at_mut(0, 1) = rat(1, 1);
        assert_eq!(
            exterior_derivative_2form(&l, &omega),
            Err(ConnectionError::NotSkewForm)
        );
    }

    #[test]
    fn form_endo_round_trip() {
        let l = h3();
        let mut t = Mat::<Rat>::zeros(3, 3);
        *t.at_mut(1, 0) = rat(2, 1);
        *t.at_mut(0, 1) = rat(-2, 1);
        let omega = form_of_endo(&l, &t);
        assert_eq!(endo_of_form(&l, &omega), t);
    }
}
