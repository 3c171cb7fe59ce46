//! Small dense matrices over `K`.
//!
//! Vectors are rows: a row `v` of K-coordinates stands for `sum_k v[k] x_k`.

use num_traits::{Signed, Zero};

use crate::arith::Q;
use crate::order::{KNumber, Order};

pub type KMatrix = Vec<Vec<KNumber>>;

pub fn identity(order: Order, n: usize) -> KMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { order.one() } else { order.zero() }).collect())
        .collect()
}

pub fn from_rational(order: Order, a: &[Vec<Q>]) -> KMatrix {
    a.iter().map(|r| r.iter().map(|x| order.rational(*x)).collect()).collect()
}

pub fn mul(a: &KMatrix, b: &KMatrix) -> KMatrix {
    let order = a[0][0].order();
    a.iter()
        .map(|row| {
            (0..b[0].len())
                .map(|j| row.iter().zip(b).fold(order.zero(), |acc, (x, brow)| acc + *x * brow[j]))
                .collect()
        })
        .collect()
}

pub fn vec_mul(v: &[KNumber], a: &KMatrix) -> Vec<KNumber> {
    let order = a[0][0].order();
    (0..a[0].len())
        .map(|j| v.iter().zip(a).fold(order.zero(), |acc, (x, row)| acc + *x * row[j]))
        .collect()
}

pub fn conj(a: &KMatrix) -> KMatrix {
    a.iter().map(|r| r.iter().map(|x| x.conj()).collect()).collect()
}

/// Conjugate transpose.
pub fn adjoint(a: &KMatrix) -> KMatrix {
    (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j].conj()).collect())
        .collect()
}

pub fn scale(a: &KMatrix, s: &KNumber) -> KMatrix {
    a.iter().map(|r| r.iter().map(|x| *x * *s).collect()).collect()
}

/// `p * g * adjoint(p)`: the Gram matrix of the rows of `p`.
pub fn transform(p: &KMatrix, g: &KMatrix) -> KMatrix {
    mul(&mul(p, g), &adjoint(p))
}

/// Hermitian form `v g adjoint(w)`.
pub fn form(g: &KMatrix, v: &[KNumber], w: &[KNumber]) -> KNumber {
    let order = g[0][0].order();
    let mut acc = order.zero();
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for (j, wj) in w.iter().enumerate() {
            if !wj.is_zero() {
                acc += *vi * g[i][j] * wj.conj();
            }
        }
    }
    acc
}

pub fn is_hermitian(g: &KMatrix) -> bool {
    let n = g.len();
    g.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..n).all(|j| g[j][i] == g[i][j].conj()))
}

pub fn det(a: &KMatrix) -> KNumber {
    let n = a.len();
    let order = a[0][0].order();
    let mut m = a.clone();
    let mut d = order.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|r| !m[*r][c].is_zero()) else {
            return order.zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        let inv = m[c][c].inv();
        for r in (c + 1)..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c] * inv;
            for k in c..n {
                let t = m[c][k] * f;
                m[r][k] -= t;
            }
        }
    }
    d
}

pub fn inverse(a: &KMatrix) -> Option<KMatrix> {
    let n = a.len();
    let order = a[0][0].order();
    let mut m = a.clone();
    let mut inv = identity(order, n);
    for c in 0..n {
        let p = (c..n).find(|r| !m[*r][c].is_zero())?;
        m.swap(p, c);
        inv.swap(p, c);
        let pinv = m[c][c].inv();
        for k in 0..n {
            m[c][k] *= pinv;
            inv[c][k] *= pinv;
        }
        for r in 0..n {
            if r == c || m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c];
            for k in 0..n {
                let (t1, t2) = (m[c][k] * f, inv[c][k] * f);
                m[r][k] -= t1;
                inv[r][k] -= t2;
            }
        }
    }
    Some(inv)
}

/// Hermitian LDL: `g[i][j] = sum_{k <= min(i,j)} mu[i][k] conj(mu[j][k]) d[k]`
/// with `mu[i][i] = 1`. `None` unless `g` is positive definite.
pub fn hermitian_ldl(g: &KMatrix) -> Option<(Vec<Q>, KMatrix)> {
    let n = g.len();
    let order = g[0][0].order();
    let mut d = vec![Q::zero(); n];
    let mut mu = vec![vec![order.zero(); n]; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= mu[i][k] * mu[j][k].conj() * order.rational(d[k]);
            }
            mu[i][j] = s.scale(Q::from_integer(1) / d[j]);
        }
        let mut s = g[i][i];
        for k in 0..i {
            s -= order.rational(mu[i][k].norm() * d[k]);
        }
        if !s.is_rational() || !s.a.is_positive() {
            return None;
        }
        d[i] = s.a;
        mu[i][i] = order.one();
    }
    Some((d, mu))
}
