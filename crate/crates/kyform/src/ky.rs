//! Killing-Yano solvers and the related linear tensor-equation solvers.
//!
//! A skew tensor `T` is Killing-Yano when `(nabla_x T)y = -(nabla_y T)x`.
//! The generic solver assembles that equation over symmetrized basis pairs
//! and works on any metric Lie algebra. On 2-step nilpotent algebras the
//! equivalent characterization `T(z) ⊆ z` and `T[x,y] = 3[Tx,y]` for all
//! `x, y` in the complement of the center yields a much smaller system; the
//! two solvers are cross-checked against each other in the test suites.
//!
//! Unknowns are the form coordinates `w_{ab} = w(e_a, e_b)` for `a < b` in
//! lexicographic order (symmetric coordinates `a <= b` for Codazzi tensors);
//! solution bases are reduced row-echelon over those coordinates, so results
//! are canonical and reproducible.

use thiserror::Error;

use crate::algebra::{AlgebraError, Endo, MetricLieAlgebra, Subspace};
use crate::connection::{form_of_endo, ConnectionTable};
use crate::exec::{self, Execution};
use crate::linalg::{Mat, RowSpace, SparseVec};
use crate::scalar::{Ring, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("solver requires a 2-step nilpotent algebra")]
    NotTwoStep,
    #[error("solver requires a 2-step nilpotent or abelian algebra")]
    NotTwoStepOrAbelian,
    #[error("tensor is not symmetric with respect to the metric")]
    NotGSymmetric,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Which linear tensor equation a solution space solves.
#[derive(Clone, Debug, PartialEq)]
pub enum SolutionKind<K> {
    KillingYano,
    Codazzi,
    CommutingSkew(K),
    ParallelSkew,
}

/// Coordinate layout of the unknown tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum UnknownLayout {
    /// `w_{ab}`, `a < b`: skew forms.
    Skew,
    /// `s_{ab}`, `a <= b`: symmetric forms.
    Symmetric,
}

fn layout_pairs(layout: UnknownLayout, n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for a in 0..n {
        let start = match layout {
            UnknownLayout::Skew => a + 1,
            UnknownLayout::Symmetric => a,
        };
        for b in start..n {
            out.push((a, b));
        }
    }
    out
}

fn pair_index(layout: UnknownLayout, n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a <= b);
    match layout {
        UnknownLayout::Skew => {
            debug_assert!(a < b);
            a * (2 * n - a - 1) / 2 + (b - a - 1)
        }
        UnknownLayout::Symmetric => a * (2 * n - a + 1) / 2 + (b - a),
    }
}

/// Basis of a linear space of tensors, canonical over the form coordinates.
#[derive(Clone, Debug)]
pub struct SolutionSpace<K: Scalar> {
    kind: SolutionKind<K>,
    layout: UnknownLayout,
    ambient_dim: usize,
    coords: Subspace<K>,
    basis: Vec<Endo<K>>,
}

impl<K: Scalar> SolutionSpace<K> {
    pub fn kind(&self) -> &SolutionKind<K> {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.coords.rank()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Basis tensors, matching the canonical coordinate rows.
    pub fn basis(&self) -> &[Endo<K>] {
        &self.basis
    }

    /// Canonical coordinate rows (RREF over the unknown layout).
    pub fn coord_rows(&self) -> &[Vec<K>] {
        self.coords.basis()
    }

    /// Span membership of a tensor (after checking its symmetry type).
    pub fn contains(&self, l: &MetricLieAlgebra<K>, t: &Endo<K>) -> bool {
        let coords = match self.layout {
            UnknownLayout::Skew => skew_coords(l, t),
            UnknownLayout::Symmetric => sym_coords(l, t),
        };
        match coords {
            Some(c) => {
                let tol = l.zero_tol(&t.max_abs_entry());
                self.coords.contains(&c, &tol)
            }
            None => false,
        }
    }

    /// Equality of spans via mutual membership.
    pub fn spans_same(&self, l: &MetricLieAlgebra<K>, other: &Self) -> bool {
        self.dim() == other.dim()
            && other.basis.iter().all(|t| self.contains(l, t))
            && self.basis.iter().all(|t| other.contains(l, t))
    }

    /// `sum_i coeffs[i] * basis[i]`.
    pub fn linear_combination(&self, coeffs: &[K]) -> Endo<K> {
        assert_eq!(coeffs.len(), self.basis.len());
        let mut out = Mat::zeros(self.ambient_dim, self.ambient_dim);
        for (c, b) in coeffs.iter().zip(&self.basis) {
            out = out.add_mat(&b.scale(c));
        }
        out
    }
}

/// Skew-form coordinates of a tensor, if it is skew w.r.t. the metric.
fn skew_coords<K: Scalar>(l: &MetricLieAlgebra<K>, t: &Endo<K>) -> Option<Vec<K>> {
    if !l.is_skew(t) {
        return None;
    }
    let omega = form_of_endo(l, t);
    let n = l.dim();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for a in 0..n {
        for b in a + 1..n {
            out.push(omega.at(a, b).clone());
        }
    }
    Some(out)
}

/// Symmetric-form coordinates of a tensor, if it is symmetric w.r.t. the
/// metric.
fn sym_coords<K: Scalar>(l: &MetricLieAlgebra<K>, t: &Endo<K>) -> Option<Vec<K>> {
    if !l.is_g_symmetric(t) {
        return None;
    }
    let s = l.metric().matmul(t);
    let n = l.dim();
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for a in 0..n {
        for b in a..n {
            out.push(s.at(a, b).clone());
        }
    }
    Some(out)
}

/// Tensor from coordinates: `T = -g^{-1} Omega` (skew) or `g^{-1} S`
/// (symmetric).
fn endo_from_coords<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    layout: UnknownLayout,
    coords: &[K],
) -> Endo<K> {
    let n = l.dim();
    let mut form = Mat::zeros(n, n);
    let mut idx = 0;
    match layout {
        UnknownLayout::Skew => {
            for a in 0..n {
                for b in a + 1..n {
                    if !coords[idx].is_zero() {
                        *form.at_mut(a, b) = coords[idx].clone();
                        *form.at_mut(b, a) = coords[idx].neg();
                    }
                    idx += 1;
                }
            }
            l.metric_inv().matmul(&form).neg_mat()
        }
        UnknownLayout::Symmetric => {
            for a in 0..n {
                for b in a..n {
                    if !coords[idx].is_zero() {
                        *form.at_mut(a, b) = coords[idx].clone();
                        if a != b {
                            *form.at_mut(b, a) = coords[idx].clone();
                        }
                    }
                    idx += 1;
                }
            }
            l.metric_inv().matmul(&form)
        }
    }
}

fn solve_space<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    kind: SolutionKind<K>,
    layout: UnknownLayout,
    rows: Vec<SparseVec<K>>,
) -> SolutionSpace<K> {
    let n = l.dim();
    let unknowns = layout_pairs(layout, n).len();
    let mut scale = K::one();
    for r in &rows {
        for (_, x) in r.iter() {
            if x.abs_gt(&scale) {
                scale = x.clone();
            }
        }
    }
    let tol = l.eps().mul(&scale.abs());
    let mut rs = RowSpace::new(unknowns, tol.clone());
    for r in rows {
        rs.insert(r);
    }
    let coords = Subspace::from_spanning(unknowns, &rs.nullspace(), &tol);
    let basis = coords
        .basis()
        .iter()
        .map(|c| endo_from_coords(l, layout, c))
        .collect();
    SolutionSpace { kind, layout, ambient_dim: n, coords, basis }
}

/// Per-unknown accumulation of one vector-valued equation block.
struct BlockAccumulator<K: Scalar> {
    n: usize,
    entries: std::collections::BTreeMap<usize, Vec<K>>,
}

impl<K: Scalar> BlockAccumulator<K> {
    fn new(n: usize) -> Self {
        Self { n, entries: std::collections::BTreeMap::new() }
    }

    fn add_scaled(&mut self, unknown: usize, vec: &[K], scale: &K) {
        if scale.is_zero() {
            return;
        }
        let slot = self
            .entries
            .entry(unknown)
            .or_insert_with(|| vec![K::zero(); self.n]);
        for (s, v) in slot.iter_mut().zip(vec) {
            if !v.is_zero() {
                *s = s.add(&scale.mul(v));
            }
        }
    }

    /// One sparse row per vector component, in component order.
    fn into_rows(self) -> Vec<SparseVec<K>> {
        let mut rows = Vec::with_capacity(self.n);
        for k in 0..self.n {
            let entries: Vec<(usize, K)> = self
                .entries
                .iter()
                .filter_map(|(u, vec)| {
                    if vec[k].is_zero() {
                        None
                    } else {
                        Some((*u, vec[k].clone()))
                    }
                })
                .collect();
            if !entries.is_empty() {
                rows.push(SparseVec::from_entries(entries));
            }
        }
        rows
    }
}

/// Full space of Killing-Yano tensors via the covariant-derivative equation,
/// valid on any metric Lie algebra.
pub fn ky_space_generic<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    c: &ConnectionTable<K>,
) -> SolutionSpace<K> {
    ky_space_generic_with(l, c, Execution::default())
}

pub fn ky_space_generic_with<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    c: &ConnectionTable<K>,
    exec: Execution,
) -> SolutionSpace<K> {
    let n = l.dim();
    let ginv_cols: Vec<Vec<K>> = (0..n).map(|a| l.metric_inv().col(a)).collect();
    // ni[i] = nabla_i g^{-1}; its columns are nabla_i applied to g^{-1} e_a.
    let ni: Vec<Mat<K>> = (0..n).map(|i| c.matrix(i).matmul(l.metric_inv())).collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i..n {
            pairs.push((i, j));
        }
    }
    let rows = exec::flat_map(exec, &pairs, |&(i, j)| {
        let mut acc = BlockAccumulator::new(n);
        // (nabla_i T)e_j + (nabla_j T)e_i, with T the unknown.
        let one = K::one();
        for b in j + 1..n {
            acc.add_scaled(pair_index(UnknownLayout::Skew, n, j, b), &ni[i].col(b), &one);
        }
        for a in 0..j {
            let col = ni[i].col(a);
            acc.add_scaled(pair_index(UnknownLayout::Skew, n, a, j), &col, &one.neg());
        }
        for b in i + 1..n {
            acc.add_scaled(pair_index(UnknownLayout::Skew, n, i, b), &ni[j].col(b), &one);
        }
        for a in 0..i {
            let col = ni[j].col(a);
            acc.add_scaled(pair_index(UnknownLayout::Skew, n, a, i), &col, &one.neg());
        }
        // -s_a ginv_b + s_b ginv_a with s = nabla_i e_j + nabla_j e_i.
        let mut s = c.matrix(i).col(j);
        for (x, y) in s.iter_mut().zip(c.matrix(j).col(i)) {
            *x = x.add(&y);
        }
        for (m, sm) in s.iter().enumerate() {
            if sm.is_zero() {
                continue;
            }
            for b in m + 1..n {
                acc.add_scaled(
                    pair_index(UnknownLayout::Skew, n, m, b),
                    &ginv_cols[b],
                    &sm.neg(),
                );
            }
            for a in 0..m {
                acc.add_scaled(pair_index(UnknownLayout::Skew, n, a, m), &ginv_cols[a], sm);
            }
        }
        acc.into_rows()
    });
    solve_space(l, SolutionKind::KillingYano, UnknownLayout::Skew, rows)
}

/// Rows for `g(T z, v) = 0` over `z` in the center basis, `v` in the
/// complement basis (center invariance of a skew unknown).
fn center_invariance_rows<K: Scalar>(
    n: usize,
    zs: &Subspace<K>,
    vs: &Subspace<K>,
    exec: Execution,
) -> Vec<SparseVec<K>> {
    let mut zv = Vec::new();
    for z in 0..zs.rank() {
        for v in 0..vs.rank() {
            zv.push((z, v));
        }
    }
    exec::flat_map(exec, &zv, |&(zi, vi)| {
        let z = &zs.basis()[zi];
        let v = &vs.basis()[vi];
        let mut entries = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                // coefficient of w_{ab}: z_a v_b - z_b v_a
                let coef = z[a].mul(&v[b]).sub(&z[b].mul(&v[a]));
                if !coef.is_zero() {
                    entries.push((pair_index(UnknownLayout::Skew, n, a, b), coef));
                }
            }
        }
        if entries.is_empty() {
            Vec::new()
        } else {
            vec![SparseVec::from_entries(entries)]
        }
    })
}

/// Space of skew `T` with `T(z) ⊆ z` and `T[x,y] = lambda [Tx,y]` for all
/// `x, y` in the orthogonal complement of the center. Accepts 2-step
/// nilpotent and abelian algebras (for the latter the conditions are vacuous
/// and every skew tensor solves).
pub fn commuting_skew_space<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    lambda: K,
) -> Result<SolutionSpace<K>, SolveError> {
    commuting_skew_space_with(l, lambda, Execution::default())
}

pub fn commuting_skew_space_with<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    lambda: K,
    exec: Execution,
) -> Result<SolutionSpace<K>, SolveError> {
    let space = commuting_rows(l, &lambda, exec)?;
    Ok(solve_space(
        l,
        SolutionKind::CommutingSkew(lambda),
        UnknownLayout::Skew,
        space,
    ))
}

fn commuting_rows<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    lambda: &K,
    exec: Execution,
) -> Result<Vec<SparseVec<K>>, SolveError> {
    let center = l.center();
    if !center.contains_subspace(&l.derived(), &l.zero_tol(&l.max_bracket_abs())) {
        return Err(SolveError::NotTwoStepOrAbelian);
    }
    let n = l.dim();
    let vs = l.orthogonal_complement(&center)?;
    let mut rows = center_invariance_rows(n, &center, &vs, exec);
    let ginv_cols: Vec<Vec<K>> = (0..n).map(|a| l.metric_inv().col(a)).collect();
    // br[a][q] = [g^{-1} e_a, v_q]
    let br: Vec<Vec<Vec<K>>> = (0..n)
        .map(|a| {
            (0..vs.rank())
                .map(|q| {
                    l.bracket(&ginv_cols[a], &vs.basis()[q])
                        .expect("basis vectors have ambient length")
                })
                .collect()
        })
        .collect();
    let mut vpairs = Vec::new();
    for p in 0..vs.rank() {
        for q in 0..vs.rank() {
            vpairs.push((p, q));
        }
    }
    // T[x,y] - lambda [Tx, y] = 0 for ALL ordered pairs, diagonal included:
    // the mirrored equation enforces [Tx,y] = [x,Ty] and the diagonal
    // enforces [Tx,x] = 0, neither of which follows from the i<j half.
    let mut eq_rows = exec::flat_map(exec, &vpairs, |&(p, q)| {
        let x = &vs.basis()[p];
        let y = &vs.basis()[q];
        let cb = l.bracket(x, y).expect("basis vectors have ambient length");
        let mut acc = BlockAccumulator::new(n);
        for a in 0..n {
            for b in a + 1..n {
                let u = pair_index(UnknownLayout::Skew, n, a, b);
                // T_u [x,y] = cb_a ginv_b - cb_b ginv_a
                acc.add_scaled(u, &ginv_cols[b], &cb[a]);
                acc.add_scaled(u, &ginv_cols[a], &cb[b].neg());
                // -lambda [T_u x, y] = -lambda (x_a [ginv_b, y] - x_b [ginv_a, y])
                acc.add_scaled(u, &br[b][q], &lambda.mul(&x[a]).neg());
                acc.add_scaled(u, &br[a][q], &lambda.mul(&x[b]));
            }
        }
        acc.into_rows()
    });
    rows.append(&mut eq_rows);
    Ok(rows)
}

/// Killing-Yano space of a 2-step nilpotent algebra via the center/complement
/// characterization (`lambda = 3`). Rejects abelian input; the generic solver
/// covers that case.
pub fn ky_space_2step<K: Scalar>(
    l: &MetricLieAlgebra<K>,
) -> Result<SolutionSpace<K>, SolveError> {
    ky_space_2step_with(l, Execution::default())
}

pub fn ky_space_2step_with<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    exec: Execution,
) -> Result<SolutionSpace<K>, SolveError> {
    if !l.is_two_step() {
        return Err(SolveError::NotTwoStep);
    }
    let rows = commuting_rows(l, &K::from_int(3), exec)?;
    Ok(solve_space(l, SolutionKind::KillingYano, UnknownLayout::Skew, rows))
}

/// Space of symmetric `B` with `B(z) ⊆ z` and `B[x,y] = [Bx,y]` for all
/// basis pairs (Codazzi tensors of a 2-step algebra).
pub fn codazzi_space<K: Scalar>(
    l: &MetricLieAlgebra<K>,
) -> Result<SolutionSpace<K>, SolveError> {
    codazzi_space_with(l, Execution::default())
}

pub fn codazzi_space_with<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    exec: Execution,
) -> Result<SolutionSpace<K>, SolveError> {
    if !l.is_two_step() {
        return Err(SolveError::NotTwoStep);
    }
    let n = l.dim();
    let center = l.center();
    let vs = l.orthogonal_complement(&center)?;
    let ginv_cols: Vec<Vec<K>> = (0..n).map(|a| l.metric_inv().col(a)).collect();
    // Center invariance: g(B z, v) = 0.
    let mut zv = Vec::new();
    for z in 0..center.rank() {
        for v in 0..vs.rank() {
            zv.push((z, v));
        }
    }
    let mut rows = exec::flat_map(exec, &zv, |&(zi, vi)| {
        let z = &center.basis()[zi];
        let v = &vs.basis()[vi];
        let mut entries = Vec::new();
        for a in 0..n {
            for b in a..n {
                let coef = if a == b {
                    z[a].mul(&v[a])
                } else {
                    z[b].mul(&v[a]).add(&z[a].mul(&v[b]))
                };
                if !coef.is_zero() {
                    entries.push((pair_index(UnknownLayout::Symmetric, n, a, b), coef));
                }
            }
        }
        if entries.is_empty() {
            Vec::new()
        } else {
            vec![SparseVec::from_entries(entries)]
        }
    });
    // brb[a][j] = [g^{-1} e_a, e_j]
    let brb: Vec<Vec<Vec<K>>> = (0..n)
        .map(|a| (0..n).map(|j| l.bracket_with_basis(&ginv_cols[a], j)).collect())
        .collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            pairs.push((i, j));
        }
    }
    let mut eq_rows = exec::flat_map(exec, &pairs, |&(i, j)| {
        let cb = l.bracket_basis(i, j);
        let mut acc = BlockAccumulator::new(n);
        for a in 0..n {
            for b in a..n {
                let u = pair_index(UnknownLayout::Symmetric, n, a, b);
                if a == b {
                    // B_u [e_i,e_j] = cb_a ginv_a; [B_u e_i, e_j] = d_{ai}[ginv_a, e_j]
                    acc.add_scaled(u, &ginv_cols[a], &cb[a]);
                    if a == i {
                        acc.add_scaled(u, &brb[a][j], &K::one().neg());
                    }
                } else {
                    acc.add_scaled(u, &ginv_cols[a], &cb[b]);
                    acc.add_scaled(u, &ginv_cols[b], &cb[a]);
                    if b == i {
                        acc.add_scaled(u, &brb[a][j], &K::one().neg());
                    }
                    if a == i {
                        acc.add_scaled(u, &brb[b][j], &K::one().neg());
                    }
                }
            }
        }
        acc.into_rows()
    });
    rows.append(&mut eq_rows);
    Ok(solve_space(l, SolutionKind::Codazzi, UnknownLayout::Symmetric, rows))
}

/// Space of skew tensors commuting with every covariant derivative
/// (left-invariant parallel skew tensors).
pub fn parallel_skew_space<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    c: &ConnectionTable<K>,
) -> SolutionSpace<K> {
    parallel_skew_space_with(l, c, Execution::default())
}

pub fn parallel_skew_space_with<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    c: &ConnectionTable<K>,
    exec: Execution,
) -> SolutionSpace<K> {
    let n = l.dim();
    let ginv_cols: Vec<Vec<K>> = (0..n).map(|a| l.metric_inv().col(a)).collect();
    let ni: Vec<Mat<K>> = (0..n).map(|i| c.matrix(i).matmul(l.metric_inv())).collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for m in 0..n {
            pairs.push((i, m));
        }
    }
    let rows = exec::flat_map(exec, &pairs, |&(i, m)| {
        // (nabla_i T) e_m = 0.
        let mut acc = BlockAccumulator::new(n);
        let one = K::one();
        for b in m + 1..n {
            acc.add_scaled(pair_index(UnknownLayout::Skew, n, m, b), &ni[i].col(b), &one);
        }
        for a in 0..m {
            let col = ni[i].col(a);
            acc.add_scaled(pair_index(UnknownLayout::Skew, n, a, m), &col, &one.neg());
        }
        let w = c.matrix(i).col(m);
        for (t, wt) in w.iter().enumerate() {
            if wt.is_zero() {
                continue;
            }
            for b in t + 1..n {
                acc.add_scaled(
                    pair_index(UnknownLayout::Skew, n, t, b),
                    &ginv_cols[b],
                    &wt.neg(),
                );
            }
            for a in 0..t {
                acc.add_scaled(pair_index(UnknownLayout::Skew, n, a, t), &ginv_cols[a], wt);
            }
        }
        acc.into_rows()
    });
    solve_space(l, SolutionKind::ParallelSkew, UnknownLayout::Skew, rows)
}

/// Outcome of a membership check, with a failing witness when negative.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<K> {
    pub verdict: bool,
    pub witness: Option<Witness<K>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness<K> {
    /// `T^t g + g T` has this nonzero entry.
    NotSkew { pair: (usize, usize), residual: K },
    /// `T^t g - g T` has this nonzero entry.
    NotSymmetric { pair: (usize, usize), residual: K },
    /// A defining equation has a nonzero residual on a basis triple.
    Equation { rule: &'static str, triple: (usize, usize, usize), residual: K },
}

impl<K> Certificate<K> {
    pub fn pass() -> Self {
        Self { verdict: true, witness: None }
    }

    pub fn fail(witness: Witness<K>) -> Self {
        Self { verdict: false, witness: Some(witness) }
    }
}

fn skew_violation<K: Scalar>(l: &MetricLieAlgebra<K>, t: &Endo<K>) -> Option<Witness<K>> {
    let n = l.dim();
    let s = t
        .transpose()
        .matmul(l.metric())
        .add_mat(&l.metric().matmul(t));
    let tol = l.zero_tol(&t.max_abs_entry().mul(&l.metric().max_abs_entry()));
    for i in 0..n {
        for j in 0..n {
            if !s.at(i, j).is_negligible(&tol) {
                return Some(Witness::NotSkew { pair: (i, j), residual: s.at(i, j).clone() });
            }
        }
    }
    None
}

/// Killing-Yano membership through the covariant-derivative equation.
/// Returns a failing basis triple `(i, j, k)` and residual on rejection.
pub fn is_ky<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    c: &ConnectionTable<K>,
    t: &Endo<K>,
) -> Certificate<K> {
    is_ky_with(l, c, t, Execution::default())
}

pub fn is_ky_with<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    c: &ConnectionTable<K>,
    t: &Endo<K>,
    exec: Execution,
) -> Certificate<K> {
    if let Some(w) = skew_violation(l, t) {
        return Certificate::fail(w);
    }
    let n = l.dim();
    let derivs: Vec<Mat<K>> = (0..n).map(|i| c.covariant_derivative_endo(t, i)).collect();
    let scale = t.max_abs_entry().mul(
        &derivs
            .iter()
            .fold(K::one(), |m, d| {
                let e = d.max_abs_entry();
                if e.abs_gt(&m) {
                    e
                } else {
                    m
                }
            })
            .add(&K::one()),
    );
    let tol = l.zero_tol(&scale);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i..n {
            pairs.push((i, j));
        }
    }
    let violation = exec::find_first_map(exec, &pairs, |&(i, j)| {
        let mut r = derivs[i].col(j);
        for (x, y) in r.iter_mut().zip(derivs[j].col(i)) {
            *x = x.add(&y);
        }
        r.iter().enumerate().find(|(_, x)| !x.is_negligible(&tol)).map(|(k, x)| {
            Witness::Equation { rule: "killing_yano", triple: (i, j, k), residual: x.clone() }
        })
    });
    match violation {
        Some(w) => Certificate::fail(w),
        None => Certificate::pass(),
    }
}

/// Killing-Yano membership on a 2-step algebra via the center/complement
/// characterization; much cheaper than [`is_ky`] and equivalent on 2-step
/// input. Witness triples index the center/complement bases.
pub fn ky_certificate_2step<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    t: &Endo<K>,
) -> Result<Certificate<K>, SolveError> {
    if !l.is_two_step() {
        return Err(SolveError::NotTwoStep);
    }
    if let Some(w) = skew_violation(l, t) {
        return Ok(Certificate::fail(w));
    }
    let center = l.center();
    let vs = l.orthogonal_complement(&center)?;
    let tol = l.zero_tol(
        &t.max_abs_entry()
            .mul(&l.max_bracket_abs())
            .mul(&K::from_int(4)),
    );
    for (zi, z) in center.basis().iter().enumerate() {
        let tz = t.mul_vec(z);
        for (vi, v) in vs.basis().iter().enumerate() {
            let r = l.inner(&tz, v);
            if !r.is_negligible(&tol) {
                return Ok(Certificate::fail(Witness::Equation {
                    rule: "center_invariance",
                    triple: (zi, vi, 0),
                    residual: r,
                }));
            }
        }
    }
    let three = K::from_int(3);
    for (p, x) in vs.basis().iter().enumerate() {
        let tx = t.mul_vec(x);
        for (q, y) in vs.basis().iter().enumerate() {
            let cb = l.bracket(x, y)?;
            let mut r = t.mul_vec(&cb);
            let btxy = l.bracket(&tx, y)?;
            for (a, b) in r.iter_mut().zip(&btxy) {
                *a = a.sub(&three.mul(b));
            }
            if let Some((k, x)) = r.iter().enumerate().find(|(_, x)| !x.is_negligible(&tol)) {
                return Ok(Certificate::fail(Witness::Equation {
                    rule: "bracket_commutation",
                    triple: (p, q, k),
                    residual: x.clone(),
                }));
            }
        }
    }
    Ok(Certificate::pass())
}

/// Killing-tensor membership for a symmetric tensor: the full symmetrization
/// of `g((nabla_i S) e_j, e_k)` must vanish on every basis triple.
pub fn is_killing_tensor<K: Scalar>(
    l: &MetricLieAlgebra<K>,
    c: &ConnectionTable<K>,
    s: &Endo<K>,
) -> Result<Certificate<K>, SolveError> {
    if !l.is_g_symmetric(s) {
        return Err(SolveError::NotGSymmetric);
    }
    let n = l.dim();
    // f[i](k, j) = g((nabla_i S) e_j, e_k)
    let f: Vec<Mat<K>> = (0..n)
        .map(|i| l.metric().matmul(&c.covariant_derivative_endo(s, i)))
        .collect();
    let scale = s.max_abs_entry().mul(
        &f.iter()
            .fold(K::one(), |m, d| {
                let e = d.max_abs_entry();
                if e.abs_gt(&m) {
                    e
                } else {
                    m
                }
            })
            .add(&K::one()),
    );
    let tol = l.zero_tol(&scale);
    let mut triples = Vec::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                triples.push((i, j, k));
            }
        }
    }
    let violation = exec::find_first_map(Execution::default(), &triples, |&(i, j, k)| {
        let perms = [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)];
        let total = perms
            .iter()
            .fold(K::zero(), |acc, &(a, b, cc)| acc.add(f[a].at(cc, b)));
        if total.is_negligible(&tol) {
            None
        } else {
            Some(Witness::Equation { rule: "killing_tensor", triple: (i, j, k), residual: total })
        }
    });
    Ok(match violation {
        Some(w) => Certificate::fail(w),
        None => Certificate::pass(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::levi_civita;
    use crate::scalar::Rat;

    fn zero() -> Rat {
        <Rat as Ring>::zero()
    }

    #[test]
    fn abelian_ky_space_is_all_skew_forms() {
        for n in 2..=5usize {
            let l = MetricLieAlgebra::<Rat>::abelian(n);
            let c = levi_civita(&l);
            let space = ky_space_generic(&l, &c);
            assert_eq!(space.dim(), n * (n - 1) / 2);
            for t in space.basis() {
                assert!(l.is_skew(t));
                assert!(is_ky(&l, &c, t).verdict);
            }
        }
    }

    #[test]
    fn heisenberg_has_no_ky_tensors() {
        let l = MetricLieAlgebra::<Rat>::heisenberg(1);
        let c = levi_civita(&l);
        assert_eq!(ky_space_generic(&l, &c).dim(), 0);
        assert_eq!(ky_space_2step(&l).unwrap().dim(), 0);
    }

    #[test]
    fn two_step_solver_rejects_abelian() {
        let l = MetricLieAlgebra::<Rat>::abelian(3);
        assert_eq!(ky_space_2step(&l).unwrap_err(), SolveError::NotTwoStep);
        assert_eq!(codazzi_space(&l).unwrap_err(), SolveError::NotTwoStep);
    }

    #[test]
    fn commuting_skew_on_abelian_is_every_skew_form() {
        let l = MetricLieAlgebra::<Rat>::abelian(4);
        let space = commuting_skew_space(&l, Rat::from_int(1)).unwrap();
        assert_eq!(space.dim(), 6);
    }

    #[test]
    fn solver_agreement_on_small_two_step_algebras() {
        for l in [
            MetricLieAlgebra::<Rat>::heisenberg(1),
            MetricLieAlgebra::<Rat>::heisenberg(2),
            MetricLieAlgebra::<Rat>::free_two_step(3),
        ] {
            let c = levi_civita(&l);
            let generic = ky_space_generic(&l, &c);
            let fast = ky_space_2step(&l).unwrap();
            assert!(generic.spans_same(&l, &fast));
        }
    }

    #[test]
    fn zero_tensor_is_ky() {
        let l = MetricLieAlgebra::<Rat>::heisenberg(1);
        let c = levi_civita(&l);
        let t = Mat::<Rat>::zeros(3, 3);
        assert!(is_ky(&l, &c, &t).verdict);
    }

    #[test]
    fn non_skew_tensor_fails_with_witness() {
        let l = MetricLieAlgebra::<Rat>::heisenberg(1);
        let c = levi_civita(&l);
        let mut t = Mat::<Rat>::zeros(3, 3);
        *t.at_mut(0, 0) = Rat::from_int(1);
        let cert = is_ky(&l, &c, &t);
        assert!(!cert.verdict);
        assert!(matches!(cert.witness, Some(Witness::NotSkew { pair: (0, 0), .. })));
    }

    #[test]
    fn identity_is_codazzi_and_killing() {
        let l = MetricLieAlgebra::<Rat>::heisenberg(1);
        let c = levi_civita(&l);
        let space = codazzi_space(&l).unwrap();
        let id = Mat::<Rat>::identity(3);
        assert!(space.contains(&l, &id));
        assert!(is_killing_tensor(&l, &c, &id).unwrap().verdict);
        // The Codazzi space of h3 is exactly the scalar multiples of Id.
        assert_eq!(space.dim(), 1);
    }

    #[test]
    fn killing_tensor_rejects_non_symmetric_input() {
        let l = MetricLieAlgebra::<Rat>::heisenberg(1);
        let c = levi_civita(&l);
        let mut t = Mat::<Rat>::zeros(3, 3);
        *t.at_mut(0, 1) = Rat::from_int(1);
        assert_eq!(
            is_killing_tensor(&l, &c, &t).unwrap_err(),
            SolveError::NotGSymmetric
        );
    }

    #[test]
    fn parallel_skew_space_of_heisenberg_is_trivial() {
        let l = MetricLieAlgebra::<Rat>::heisenberg(1);
        let c = levi_civita(&l);
        assert_eq!(parallel_skew_space(&l, &c).dim(), 0);
    }

    #[test]
    fn solution_spaces_are_linear() {
        let l = MetricLieAlgebra::<Rat>::abelian(4);
        let c = levi_civita(&l);
        let space = ky_space_generic(&l, &c);
        let coeffs: Vec<Rat> = (0..space.dim()).map(|i| Rat::from_int(i as i64 - 2)).collect();
        let combo = space.linear_combination(&coeffs);
        assert!(space.contains(&l, &combo));
        assert!(is_ky(&l, &c, &combo).verdict);
    }

    #[test]
    fn certificate_2step_matches_generic_certificate() {
        let l = MetricLieAlgebra::<Rat>::heisenberg(2);
        let c = levi_civita(&l);
        // A skew non-solution: rotation in the (x1, z) plane.
        let mut t = Mat::<Rat>::zeros(5, 5);
        *t.at_mut(4, 0) = Rat::from_int(1);
        *t.at_mut(0, 4) = Rat::from_int(-1);
        assert!(!is_ky(&l, &c, &t).verdict);
        assert!(!ky_certificate_2step(&l, &t).unwrap().verdict);
        let id_skew = Mat::<Rat>::zeros(5, 5);
        assert!(ky_certificate_2step(&l, &id_skew).unwrap().verdict);
    }

    #[test]
    fn sparse_coordinates_round_trip() {
        let l = MetricLieAlgebra::<Rat>::abelian(3);
        let mut t = Mat::<Rat>::zeros(3, 3);
        *t.at_mut(1, 0) = Rat::from_ratio(5, 3);
        *t.at_mut(0, 1) = Rat::from_ratio(-5, 3);
        let coords = skew_coords(&l, &t).unwrap();
        let back = endo_from_coords(&l, UnknownLayout::Skew, &coords);
        assert_eq!(back, t);
        assert_eq!(coords[0], Rat::from_ratio(5, 3));
        assert!(coords[1].is_zero() && coords[2].is_zero());
    }

    #[test]
    fn execution_modes_agree() {
        let l = MetricLieAlgebra::<Rat>::free_two_step(3);
        let c = levi_civita(&l);
        let seq = ky_space_generic_with(&l, &c, Execution::Sequential);
        let def = ky_space_generic(&l, &c);
        assert_eq!(seq.dim(), def.dim());
        for (a, b) in seq.coord_rows().iter().zip(def.coord_rows()) {
            assert_eq!(a, b);
        }
    }
}
