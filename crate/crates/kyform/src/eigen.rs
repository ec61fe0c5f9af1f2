//! Spectral routines for self-adjoint operators, per scalar mode.
//!
//! Exact mode finds the distinct eigenvalues as the rational roots of the
//! minimal polynomial; irrational spectra surface later as kernels that fail
//! to exhaust the space. Approximate mode reduces the generalized symmetric
//! problem with a Cholesky factor and runs cyclic Jacobi sweeps.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

use crate::linalg::{minimal_polynomial, poly_eval, Mat};
use crate::scalar::{Rat, Ring, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EigenError {
    #[error("cannot factor {0} while searching for rational eigenvalues")]
    Unfactorable(String),
    #[error("gram matrix is not positive definite")]
    GramNotPositive,
}

/// Mode-specific eigenvalue extraction used by the eigen-block analysis.
pub trait SpectralScalar: Scalar {
    /// Distinct eigenvalue candidates of an operator `m` that is
    /// self-adjoint with respect to the inner product with Gram matrix
    /// `gram` (in the same basis). Exact mode returns exactly the rational
    /// eigenvalues; irrational ones are simply absent from the list.
    fn self_adjoint_eigenvalues(
        m: &Mat<Self>,
        gram: &Mat<Self>,
        tol: &Self,
    ) -> Result<Vec<Self>, EigenError>;
}

impl SpectralScalar for Rat {
    fn self_adjoint_eigenvalues(
        m: &Mat<Self>,
        _gram: &Mat<Self>,
        tol: &Self,
    ) -> Result<Vec<Self>, EigenError> {
        let minpoly = minimal_polynomial(m, tol);
        let mut roots = rational_roots(&minpoly)?;
        roots.sort();
        roots.dedup();
        Ok(roots)
    }
}

impl SpectralScalar for f64 {
    fn self_adjoint_eigenvalues(
        m: &Mat<Self>,
        gram: &Mat<Self>,
        tol: &Self,
    ) -> Result<Vec<Self>, EigenError> {
        let n = m.nrows();
        if n == 0 {
            return Ok(Vec::new());
        }
        let l = cholesky(gram).ok_or(EigenError::GramNotPositive)?;
        // S = L^-1 (G M) L^-T is symmetric with the same spectrum as M.
        let gm = gram.matmul(m);
        let y = forward_solve(&l, &gm);
        let s = forward_solve(&l, &y.transpose());
        let mut eigs = jacobi_eigenvalues(&s);
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Cluster within the tolerance to produce distinct candidates.
        let scale = eigs.iter().fold(0.0f64, |m, x| m.max(f64::abs(*x))).max(1.0);
        let merge = tol.max(1e-10) * scale;
        let mut out: Vec<f64> = Vec::new();
        for e in eigs {
            match out.last() {
                Some(last) if (e - last).abs() <= merge => {}
                _ => out.push(e),
            }
        }
        Ok(out)
    }
}

/// Distinct rational roots of a rational-coefficient polynomial
/// (ascending coefficients).
pub fn rational_roots(coeffs: &[Rat]) -> Result<Vec<Rat>, EigenError> {
    let mut coeffs: Vec<Rat> = coeffs.to_vec();
    while coeffs.last().map_or(false, Ring::is_zero) {
        coeffs.pop();
    }
    if coeffs.len() <= 1 {
        return Ok(Vec::new());
    }
    let mut roots = Vec::new();
    while coeffs.first().map_or(false, Ring::is_zero) {
        if roots.is_empty() {
            roots.push(<Rat as Ring>::zero());
        }
        coeffs.remove(0);
    }
    if coeffs.len() <= 1 {
        return Ok(roots);
    }
    // Clear denominators to a primitive integer polynomial.
    let mut lcm = BigInt::from(1);
    for c in &coeffs {
        lcm = num_integer::lcm(lcm, c.denom().clone());
    }
    let ints: Vec<BigInt> = coeffs
        .iter()
        .map(|c| c.numer() * (&lcm / c.denom()))
        .collect();
    let lead = ints.last().unwrap().abs();
    let constant = ints.first().unwrap().abs();
    let p_divs = divisors(&constant)?;
    let q_divs = divisors(&lead)?;
    for p in &p_divs {
        for q in &q_divs {
            for sign in [1i64, -1] {
                let cand = Rat::new(BigInt::from(sign) * BigInt::from(*p), BigInt::from(*q));
                if Ring::is_zero(&poly_eval(&coeffs, &cand)) && !roots.contains(&cand) {
                    roots.push(cand);
                }
            }
        }
    }
    Ok(roots)
}

fn divisors(n: &BigInt) -> Result<Vec<u128>, EigenError> {
    let n = n
        .to_u128()
        .ok_or_else(|| EigenError::Unfactorable(n.to_string()))?;
    if n == 0 {
        return Ok(vec![1]);
    }
    let factors = factorize(n)?;
    let mut divs: Vec<u128> = vec![1];
    for (p, e) in factors {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk: u128 = 1;
            for _ in 0..=e {
                match d.checked_mul(pk) {
                    Some(v) => next.push(v),
                    None => return Err(EigenError::Unfactorable(n.to_string())),
                }
                pk = match pk.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
            }
        }
        next.sort_unstable();
        next.dedup();
        divs = next;
    }
    Ok(divs)
}

fn factorize(mut n: u128) -> Result<Vec<(u128, u32)>, EigenError> {
    let mut out = Vec::new();
    let mut d: u128 = 2;
    while d <= 1_000_000 && d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d = if d == 2 { 3 } else { d + 2 };
    }
    if n > 1 {
        let mut stack = vec![n];
        while let Some(m) = stack.pop() {
            if m == 1 {
                continue;
            }
            if is_prime_u128(m) {
                match out.iter_mut().find(|(p, _)| *p == m) {
                    Some((_, e)) => *e += 1,
                    None => out.push((m, 1)),
                }
                continue;
            }
            let f = pollard_rho(m).ok_or_else(|| EigenError::Unfactorable(m.to_string()))?;
            stack.push(f);
            stack.push(m / f);
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    // Inputs stay below 2^64 in practice; widen defensively via modular halving.
    if let (Some(_), true) = (a.checked_mul(b), a < (1 << 64) && b < (1 << 64)) {
        return a * b % m;
    }
    let mut result: u128 = 0;
    let mut a = a % m;
    let mut b = b;
    while b > 0 {
        if b & 1 == 1 {
            result = (result + a) % m;
        }
        a = (a << 1) % m;
        b >>= 1;
    }
    result
}

fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc: u128 = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u128) -> Option<u128> {
    if n % 2 == 0 {
        return Some(2);
    }
    for c in 1..20u128 {
        let f = |x: u128| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u128, 2u128, 1u128);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            let diff = if x > y { x - y } else { y - x };
            d = num_integer::gcd(diff, n);
        }
        if d != n {
            return Some(d);
        }
    }
    None
}

fn cholesky(g: &Mat<f64>) -> Option<Mat<f64>> {
    let n = g.nrows();
    let mut l = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = *g.at(i, j);
            for k in 0..j {
                s -= l.at(i, k) * l.at(j, k);
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                *l.at_mut(i, j) = s.sqrt();
            } else {
                *l.at_mut(i, j) = s / l.at(j, j);
            }
        }
    }
    Some(l)
}

/// Solve `L X = B` for lower-triangular `L`.
fn forward_solve(l: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let n = l.nrows();
    let cols = b.ncols();
    let mut x = Mat::<f64>::zeros(n, cols);
    for c in 0..cols {
        for i in 0..n {
            let mut s = *b.at(i, c);
            for k in 0..i {
                s -= l.at(i, k) * x.at(k, c);
            }
            *x.at_mut(i, c) = s / l.at(i, i);
        }
    }
    x
}

fn jacobi_eigenvalues(s: &Mat<f64>) -> Vec<f64> {
    let n = s.nrows();
    let mut a = s.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += a.at(i, j) * a.at(i, j);
            }
        }
        if off.sqrt() < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = *a.at(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = *a.at(k, p);
                    let akq = *a.at(k, q);
                    *a.at_mut(k, p) = c * akp - sn * akq;
                    *a.at_mut(k, q) = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = *a.at(p, k);
                    let aqk = *a.at(q, k);
                    *a.at_mut(p, k) = c * apk - sn * aqk;
                    *a.at_mut(q, k) = sn * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| *a.at(i, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_roots_of_quadratic() {
        // (x - 2)(x + 1/3) = x^2 - 5/3 x - 2/3
        let coeffs = vec![
            Rat::from_ratio(-2, 3),
            Rat::from_ratio(-5, 3),
            Rat::from_int(1),
        ];
        let mut roots = rational_roots(&coeffs).unwrap();
        roots.sort();
        assert_eq!(roots, vec![Rat::from_ratio(-1, 3), Rat::from_int(2)]);
    }

    #[test]
    fn irrational_roots_are_absent() {
        // x^2 - 2 has no rational roots.
        let coeffs = vec![Rat::from_int(-2), Rat::zero(), Rat::from_int(1)];
        assert!(rational_roots(&coeffs).unwrap().is_empty());
    }

    #[test]
    fn factorization_handles_semiprimes() {
        let f = factorize(1_000_003u128 * 1_000_033).unwrap();
        assert_eq!(f, vec![(1_000_003, 1), (1_000_033, 1)]);
    }

    #[test]
    fn exact_spectral_candidates() {
        // diag(1, 4, 4) with identity gram.
        let mut m = Mat::<Rat>::zeros(3, 3);
        *m.at_mut(0, 0) = Rat::from_int(1);
        *m.at_mut(1, 1) = Rat::from_int(4);
        *m.at_mut(2, 2) = Rat::from_int(4);
        let g = Mat::<Rat>::identity(3);
        let eigs = Rat::self_adjoint_eigenvalues(&m, &g, &Rat::zero()).unwrap();
        assert_eq!(eigs, vec![Rat::from_int(1), Rat::from_int(4)]);
    }

    #[test]
    fn approx_spectral_candidates() {
        let m = Mat::<f64>::from_rows(vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
        let g = Mat::<f64>::identity(2);
        let eigs = f64::self_adjoint_eigenvalues(&m, &g, &1e-9).unwrap();
        assert_eq!(eigs.len(), 2);
        assert!((eigs[0] - 1.0).abs() < 1e-9);
        assert!((eigs[1] - 3.0).abs() < 1e-9);
    }
}
