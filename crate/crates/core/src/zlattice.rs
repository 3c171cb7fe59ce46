//! Integer lattices given by rational Gram matrices.
//!
//! Hermite normal forms with transforms, exact LDL decompositions, Gram-based
//! LLL and Fincke-Pohst enumeration of short vectors. Everything stays in
//! exact rational arithmetic; floating point only seeds integer search ranges
//! that are then tightened exactly.

use num_traits::{One, Signed, Zero};

use crate::arith::{int_range_around, q, xgcd, Q};

pub type IntMatrix = Vec<Vec<i128>>;
pub type RatMatrix = Vec<Vec<Q>>;

/// Row-style Hermite normal form with a unimodular transform.
///
/// Returns `(h, u)` where `u * a = h`, `u` is `m x m` unimodular, the first
/// `rank` rows of `h` are in echelon form (pivot columns strictly increasing,
/// positive pivots, entries above a pivot reduced into `[0, pivot)`) and the
/// remaining rows are zero. The last `m - rank` rows of `u` span the integer
/// left kernel of `a`.
pub fn hnf_with_transform(a: &IntMatrix) -> (IntMatrix, IntMatrix, usize) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut h = a.clone();
    let mut u: IntMatrix = (0..m)
        .map(|i| (0..m).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        if row == m {
            break;
        }
        // Fold every lower entry in this column into the pivot row.
        for r in (row + 1)..m {
            if h[r][col] == 0 {
                continue;
            }
            let (a0, b0) = (h[row][col], h[r][col]);
            let (g, s, t) = xgcd(a0, b0);
            let (x, y) = (a0 / g, b0 / g);
            // [s t; -y x] has determinant s*x + t*y = 1.
            for k in 0..n {
                let (p, q) = (h[row][k], h[r][k]);
                h[row][k] = s * p + t * q;
                h[r][k] = -y * p + x * q;
            }
            for k in 0..m {
                let (p, q) = (u[row][k], u[r][k]);
                u[row][k] = s * p + t * q;
                u[r][k] = -y * p + x * q;
            }
        }
        if h[row][col] == 0 {
            continue;
        }
        if h[row][col] < 0 {
            h[row].iter_mut().for_each(|x| *x = -*x);
            u[row].iter_mut().for_each(|x| *x = -*x);
        }
        pivots.push((row, col));
        row += 1;
    }
    for &(pr, pc) in &pivots {
        let p = h[pr][pc];
        for r in 0..pr {
            let f = h[r][pc].div_euclid(p);
            if f != 0 {
                for k in 0..n {
                    h[r][k] -= f * h[pr][k];
                }
                for k in 0..m {
                    u[r][k] -= f * u[pr][k];
                }
            }
        }
    }
    (h, u, row)
}

/// Echelon basis of the integer row span of `a` (zero rows dropped).
pub fn hnf(a: &IntMatrix) -> IntMatrix {
    let (h, _, rank) = hnf_with_transform(a);
    h.into_iter().take(rank).collect()
}

/// Integer coordinates of `v` in an echelon basis produced by [`hnf`], if `v`
/// lies in its span.
pub fn echelon_coords(basis: &IntMatrix, v: &[i128]) -> Option<Vec<i128>> {
    let mut rest = v.to_vec();
    let mut coords = vec![0i128; basis.len()];
    for (i, b) in basis.iter().enumerate() {
        let pc = b.iter().position(|x| *x != 0)?;
        if rest[..pc].iter().any(|x| *x != 0) {
            return None;
        }
        if rest[pc] % b[pc] != 0 {
            return None;
        }
        let f = rest[pc] / b[pc];
        coords[i] = f;
        for k in 0..rest.len() {
            rest[k] -= f * b[k];
        }
    }
    rest.iter().all(|x| *x == 0).then_some(coords)
}

/// Scale a rational matrix to an integer one; returns the common denominator.
pub fn clear_denominators(a: &RatMatrix) -> (IntMatrix, i128) {
    let d = crate::arith::lcm_denoms(a.iter().flatten());
    let m = a
        .iter()
        .map(|row| row.iter().map(|x| (x * q(d)).to_integer()).collect())
        .collect();
    (m, d)
}

pub fn det(a: &RatMatrix) -> Q {
    let n = a.len();
    let mut m = a.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        let piv = m[c][c];
        for r in (c + 1)..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = m[r][c] / piv;
            for k in c..n {
                let t = m[c][k];
                m[r][k] -= f * t;
            }
        }
    }
    d
}

pub fn int_det(a: &IntMatrix) -> i128 {
    let r: RatMatrix = a.iter().map(|row| row.iter().map(|x| q(*x)).collect()).collect();
    det(&r).to_integer()
}

pub fn mat_mul_int(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| row.iter().zip(b).map(|(x, br)| x * br[j]).sum())
                .collect()
        })
        .collect()
}

/// `t * g * t^T` for an integer transform `t` acting on rows.
pub fn transform_gram(g: &RatMatrix, t: &IntMatrix) -> RatMatrix {
    let n = t.len();
    let mut out = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = bilinear(g, &t[i], &t[j]);
            out[i][j] = v;
            out[j][i] = v;
        }
    }
    out
}

pub fn bilinear(g: &RatMatrix, x: &[i128], y: &[i128]) -> Q {
    let mut acc = Q::zero();
    for (i, xi) in x.iter().enumerate() {
        if *xi == 0 {
            continue;
        }
        let mut row = Q::zero();
        for (j, yj) in y.iter().enumerate() {
            if *yj != 0 {
                row += g[i][j] * q(*yj);
            }
        }
        acc += row * q(*xi);
    }
    acc
}

pub fn norm(g: &RatMatrix, x: &[i128]) -> Q {
    bilinear(g, x, x)
}

/// Exact LDL^T data of a positive definite Gram matrix:
/// `x^T G x = sum_i d[i] * (x_i + sum_{j>i} mu[j][i] x_j)^2`.
#[derive(Clone, Debug)]
pub struct Ldl {
    pub d: Vec<Q>,
    pub mu: RatMatrix,
}

/// LDL decomposition; `None` if the matrix is not positive definite.
pub fn ldl(g: &RatMatrix) -> Option<Ldl> {
    let n = g.len();
    let mut d = vec![Q::zero(); n];
    let mut mu = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= mu[i][k] * mu[j][k] * d[k];
            }
            mu[i][j] = s / d[j];
        }
        let mut s = g[i][i];
        for k in 0..i {
            s -= mu[i][k] * mu[i][k] * d[k];
        }
        if !s.is_positive() {
            return None;
        }
        d[i] = s;
        mu[i][i] = Q::one();
    }
    Some(Ldl { d, mu })
}

pub fn is_positive_definite(g: &RatMatrix) -> bool {
    ldl(g).is_some()
}

/// LLL reduction (delta = 3/4) of a positive definite Gram matrix.
///
/// Returns the integer transform `t` (rows = new basis in old coordinates)
/// and the reduced Gram `t g t^T`.
pub fn lll_gram(g: &RatMatrix) -> (IntMatrix, RatMatrix) {
    let n = g.len();
    let mut t = identity(n);
    let mut cur = g.clone();
    let delta = Q::new(3, 4);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let l = ldl(&cur).expect("LLL input must be positive definite");
            let r = l.mu[k][j].round().to_integer();
            if r != 0 {
                for c in 0..n {
                    t[k][c] -= r * t[j][c];
                }
                cur = transform_gram(g, &t);
            }
        }
        let l = ldl(&cur).expect("LLL input must be positive definite");
        let m = l.mu[k][k - 1];
        if l.d[k] >= (delta - m * m) * l.d[k - 1] {
            k += 1;
        } else {
            t.swap(k, k - 1);
            cur = transform_gram(g, &t);
            k = (k - 1).max(1);
        }
    }
    (t, cur)
}

/// Short vector enumeration options.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Signs {
    /// One vector out of each `{v, -v}` pair (first nonzero coordinate positive).
    UpToSign,
    /// Both `v` and `-v`.
    Both,
}

/// All nonzero integer vectors `x` with `x^T g x <= bound`, sorted by norm
/// and then lexicographically. Panics if `g` is not positive definite.
pub fn short_vectors(g: &RatMatrix, bound: &Q, signs: Signs) -> Vec<(Vec<i128>, Q)> {
    let n = g.len();
    if n == 0 || !bound.is_positive() {
        return Vec::new();
    }
    let (t, red) = lll_gram(g);
    let l = ldl(&red).expect("short_vectors requires a positive definite Gram matrix");
    let mut out = Vec::new();
    let mut y = vec![0i128; n];
    enumerate_level(&l, bound, n, Q::zero(), &mut y, true, &mut |y| {
        let mut x = vec![0i128; n];
        for (i, yi) in y.iter().enumerate() {
            if *yi != 0 {
                for c in 0..n {
                    x[c] += yi * t[i][c];
                }
            }
        }
        if let Some(first) = x.iter().find(|v| **v != 0) {
            if *first < 0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
        }
        out.push(x);
    });
    let mut res: Vec<(Vec<i128>, Q)> = Vec::with_capacity(out.len() * 2);
    for x in out {
        let nx = norm(g, &x);
        if signs == Signs::Both {
            res.push((x.iter().map(|v| -v).collect(), nx));
        }
        res.push((x, nx));
    }
    res.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)));
    res
}

fn enumerate_level(
    l: &Ldl,
    bound: &Q,
    level: usize,
    used: Q,
    y: &mut Vec<i128>,
    upper_zero: bool,
    emit: &mut impl FnMut(&[i128]),
) {
    if level == 0 {
        if !upper_zero {
            emit(y);
        }
        return;
    }
    let i = level - 1;
    let n = y.len();
    let mut center = Q::zero();
    for j in (i + 1)..n {
        if y[j] != 0 {
            center -= l.mu[j][i] * q(y[j]);
        }
    }
    let room = (*bound - used) / l.d[i];
    let Some((mut lo, hi)) = int_range_around(&center, &room) else {
        return;
    };
    if upper_zero && lo < 0 {
        lo = 0;
    }
    for v in lo..=hi {
        y[i] = v;
        let diff = q(v) - center;
        let nu = used + l.d[i] * diff * diff;
        enumerate_level(l, bound, i, nu, y, upper_zero && v == 0, emit);
    }
    y[i] = 0;
}

/// All integer `x` with `(x - c)^T g (x - c) <= bound`, for a positive
/// definite `g`. No reduction is applied, so this is meant for small ranks.
pub fn close_vectors(g: &RatMatrix, center: &[Q], bound: &Q) -> Vec<Vec<i128>> {
    let n = g.len();
    let l = ldl(g).expect("close_vectors requires a positive definite Gram matrix");
    let mut out = Vec::new();
    let mut x = vec![0i128; n];
    close_level(&l, center, bound, n, Q::zero(), &mut x, &mut out);
    out
}

fn close_level(l: &Ldl, c: &[Q], bound: &Q, level: usize, used: Q, x: &mut Vec<i128>, out: &mut Vec<Vec<i128>>) {
    if level == 0 {
        out.push(x.clone());
        return;
    }
    let i = level - 1;
    let mut center = c[i];
    for j in (i + 1)..x.len() {
        center -= l.mu[j][i] * (q(x[j]) - c[j]);
    }
    let room = (*bound - used) / l.d[i];
    let Some((lo, hi)) = int_range_around(&center, &room) else {
        return;
    };
    for v in lo..=hi {
        x[i] = v;
        let diff = q(v) - center;
        close_level(l, c, bound, i, used + l.d[i] * diff * diff, x, out);
    }
    x[i] = 0;
}

/// Minimum of the form over nonzero vectors.
pub fn minimum(g: &RatMatrix) -> Q {
    // The smallest diagonal entry of an LLL-reduced Gram bounds the minimum.
    let (_, red) = lll_gram(g);
    let b = red.iter().enumerate().map(|(i, r)| r[i]).min().expect("nonempty");
    short_vectors(g, &b, Signs::UpToSign)
        .first()
        .map(|(_, n)| *n)
        .unwrap_or(b)
}

/// Whether some nonzero vector has norm strictly below `bound`.
pub fn has_vector_below(g: &RatMatrix, bound: &Q) -> bool {
    if g.is_empty() || !bound.is_positive() {
        return false;
    }
    if (0..g.len()).any(|i| g[i][i] < *bound) {
        return true;
    }
    short_vectors(g, bound, Signs::UpToSign)
        .first()
        .is_some_and(|(_, n)| n < bound)
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| i128::from(i == j)).collect())
        .collect()
}

pub fn is_symmetric(g: &RatMatrix) -> bool {
    (0..g.len()).all(|i| (0..g.len()).all(|j| g[i][j] == g[j][i]))
}

pub fn rat(a: &IntMatrix) -> RatMatrix {
    a.iter().map(|r| r.iter().map(|x| q(*x)).collect()).collect()
}

pub fn abs_det_int(a: &IntMatrix) -> i128 {
    int_det(a).abs()
}
