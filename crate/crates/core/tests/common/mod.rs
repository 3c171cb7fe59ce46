//! Shared generators and an independent isometry oracle for integration tests.

#![allow(dead_code)]

use hermlat::arith::{q, qf, Q};
use hermlat::enumeration::{enumerate_unimodular, EnumConfig};
use hermlat::ideal::primes_above;
use hermlat::kmat;
use hermlat::{FracIdeal, HermitianLattice, KNumber, Order};
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn order(d: i64) -> Order {
    Order::new(d).unwrap()
}

pub fn element<R: Rng>(rng: &mut R, o: Order, bound: i128) -> KNumber {
    loop {
        let x = o.elem_int(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound));
        if !x.is_zero() {
            return x;
        }
    }
}

/// A product of small prime powers, rescaled by a random element of `K`.
pub fn ideal<R: Rng>(rng: &mut R, o: Order) -> FracIdeal {
    let mut a = FracIdeal::unit(o);
    for _ in 0..rng.gen_range(0..=3) {
        let p = *[2, 3, 5, 7, 11, 13].choose(rng).unwrap();
        let ps = primes_above(o, p);
        let pr = ps.choose(rng).unwrap();
        a = a.mul(&pr.pow(rng.gen_range(-2..=2)));
    }
    let num = element(rng, o, 4);
    let den = rng.gen_range(1..=4);
    a.scale(&num.scale(qf(1, den)))
}

/// A small ideal with norm at most 9, for lattices that must stay cheap.
pub fn small_ideal<R: Rng>(rng: &mut R, o: Order) -> FracIdeal {
    let p = *[1, 2, 3].choose(rng).unwrap();
    if p == 1 {
        return FracIdeal::unit(o);
    }
    let pr = *primes_above(o, p).choose(rng).unwrap();
    if rng.gen_bool(0.5) {
        pr
    } else {
        pr.inv()
    }
}

/// `P D adjoint(P)` with `P` unit upper triangular and `D` positive.
pub fn lattice<R: Rng>(rng: &mut R, o: Order, g: usize) -> HermitianLattice {
    let mut p = kmat::identity(o, g);
    for i in 0..g {
        for j in (i + 1)..g {
            if rng.gen_bool(0.7) {
                p[i][j] = o.elem(qf(rng.gen_range(-3..=3), 2), qf(rng.gen_range(-3..=3), 2));
            }
        }
    }
    let d: Vec<Q> = (0..g).map(|_| qf(rng.gen_range(1..=6), rng.gen_range(1..=3))).collect();
    let gram = kmat::transform(&p, &hermlat::lattice::diag(o, &d));
    let ideals = (0..g).map(|_| small_ideal(rng, o)).collect();
    HermitianLattice::new(o, ideals, gram).unwrap()
}

/// An element of `a`, small but nonzero.
pub fn element_of<R: Rng>(rng: &mut R, a: &FracIdeal) -> KNumber {
    let [g1, g2] = a.zbasis();
    loop {
        let x = g1 * q(rng.gen_range(-2..=2)) + g2 * q(rng.gen_range(-2..=2));
        if !x.is_zero() {
            return x;
        }
    }
}

/// The same lattice on a randomly changed pseudo-basis: permutations,
/// rescalings `x_i -> l x_i` (ideal `a_i / l`) and transvections
/// `x_i -> x_i + r x_j` with `r a_i` inside `a_j`.
pub fn rebased<R: Rng>(rng: &mut R, l: &HermitianLattice) -> HermitianLattice {
    let o = l.order();
    let g = l.rank();
    let mut ideals = l.ideals().to_vec();
    let mut p = kmat::identity(o, g);
    for _ in 0..6 {
        match rng.gen_range(0..3) {
            0 if g > 1 => {
                let (i, j) = (rng.gen_range(0..g), rng.gen_range(0..g));
                ideals.swap(i, j);
                p.swap(i, j);
            }
            1 => {
                let i = rng.gen_range(0..g);
                let lam = element(rng, o, 2);
                ideals[i] = ideals[i].scale(&lam.inv());
                p[i] = p[i].iter().map(|x| *x * lam).collect();
            }
            _ if g > 1 => {
                let i = rng.gen_range(0..g);
                let j = (i + rng.gen_range(1..g)) % g;
                let r = element_of(rng, &ideals[j].div(&ideals[i]));
                let row: Vec<KNumber> = p[i].iter().zip(&p[j]).map(|(a, b)| *a + r * *b).collect();
                p[i] = row;
            }
            _ => {}
        }
    }
    l.rebase(ideals, &p).unwrap()
}

/// Orthogonal sums of rank-one lattices `(a_i, c / N(a_i))`: `cR`-modular.
pub fn modular_lattice<R: Rng>(rng: &mut R, o: Order, g: usize) -> HermitianLattice {
    let c = q(rng.gen_range(1..=3));
    let mut out: Option<HermitianLattice> = None;
    for _ in 0..g {
        let a = small_ideal(rng, o);
        let r1 = HermitianLattice::new(o, vec![a], vec![vec![o.rational(c / a.norm())]]).unwrap();
        out = Some(match out {
            None => r1,
            Some(l) => l.orthogonal_sum(&r1),
        });
    }
    rebased(rng, &out.unwrap())
}

pub fn unimodular_classes(d: i64, g: usize, free_only: bool) -> Vec<HermitianLattice> {
    let cfg = EnumConfig { free_only, ..Default::default() };
    let list = enumerate_unimodular(order(d), g, &cfg).unwrap();
    assert!(list.complete);
    list.reps
}

/// Exact inverse of a rational matrix.
pub fn rat_inverse(a: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|r| !m[*r][c].is_zero()).expect("invertible");
        m.swap(p, c);
        let pv = m[c][c];
        for x in m[c].iter_mut() {
            *x /= pv;
        }
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = m[r][c];
                for k in 0..2 * n {
                    let t = m[c][k] * f;
                    m[r][k] -= t;
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn rat_det(a: &[Vec<Q>]) -> Q {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|r| !m[*r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= m[c][c];
        for r in (c + 1)..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                let t = m[c][k] * f;
                m[r][k] -= t;
            }
        }
    }
    d
}

/// Trace form and multiplication by `w` on the Z-basis `gamma x_i`, built
/// directly from the ideals and the Gram matrix.
pub struct ZForm {
    pub gram: Vec<Vec<Q>>,
    /// `omega[k]`: coordinates of `w * e_k`.
    pub omega: Vec<Vec<i128>>,
}

impl ZForm {
    pub fn new(l: &HermitianLattice) -> ZForm {
        let o = l.order();
        let basis: Vec<(usize, KNumber)> = l
            .ideals()
            .iter()
            .enumerate()
            .flat_map(|(i, a)| a.zbasis().into_iter().map(move |gm| (i, gm)))
            .collect();
        let n = basis.len();
        let gram = (0..n)
            .map(|k| {
                (0..n)
                    .map(|m| {
                        let ((i, a), (j, b)) = (basis[k], basis[m]);
                        (a * l.gram()[i][j] * b.conj()).trace()
                    })
                    .collect()
            })
            .collect();
        let omega = basis
            .iter()
            .map(|(i, gm)| {
                let (s, t) = l.ideals()[*i].coords(&(*gm * o.omega())).unwrap();
                let mut v = vec![0; n];
                v[2 * i] = s;
                v[2 * i + 1] = t;
                v
            })
            .collect();
        ZForm { gram, omega }
    }

    pub fn inner(&self, x: &[i128], y: &[i128]) -> Q {
        let mut s = Q::zero();
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                if *xi != 0 && *yj != 0 {
                    s += self.gram[i][j] * q(xi * yj);
                }
            }
        }
        s
    }

    pub fn apply_omega(&self, x: &[i128]) -> Vec<i128> {
        let n = x.len();
        (0..n).map(|m| (0..n).map(|k| x[k] * self.omega[k][m]).sum()).collect()
    }

    /// The same form in a pairwise reduced basis.
    pub fn reduced(&self) -> ZForm {
        let n = self.gram.len();
        let u = pairwise_reduced(&self.gram);
        let gram = (0..n).map(|i| (0..n).map(|j| self.inner(&u[i], &u[j])).collect()).collect();
        let uq: Vec<Vec<Q>> = u.iter().map(|r| r.iter().map(|x| q(*x)).collect()).collect();
        let inv = rat_inverse(&uq);
        let omega = u
            .iter()
            .map(|r| {
                let img = self.apply_omega(r);
                (0..n)
                    .map(|m| (0..n).map(|k| q(img[k]) * inv[k][m]).sum::<Q>().to_integer())
                    .collect()
            })
            .collect();
        ZForm { gram, omega }
    }

    /// All integer vectors of norm exactly `norm`: a box scan in a pairwise
    /// reduced basis, mapped back to the original coordinates.
    pub fn vectors_of_norm(&self, norm: Q) -> Vec<Vec<i128>> {
        let n = self.gram.len();
        let u = pairwise_reduced(&self.gram);
        let red: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| self.inner(&u[i], &u[j])).collect()).collect();
        let inv = rat_inverse(&red);
        let bounds: Vec<i128> = (0..n)
            .map(|i| {
                let b2 = norm * inv[i][i];
                (b2.numer().to_f64().unwrap() / b2.denom().to_f64().unwrap()).sqrt().floor() as i128 + 1
            })
            .collect();
        let mut out = Vec::new();
        let mut cur = vec![0i128; n];
        fn rec(red: &[Vec<Q>], k: usize, bounds: &[i128], norm: Q, cur: &mut Vec<i128>, out: &mut Vec<Vec<i128>>) {
            if k == cur.len() {
                let mut s = Q::zero();
                for i in 0..k {
                    for j in 0..k {
                        s += red[i][j] * q(cur[i] * cur[j]);
                    }
                }
                if s == norm {
                    out.push(cur.clone());
                }
                return;
            }
            for x in -bounds[k]..=bounds[k] {
                cur[k] = x;
                rec(red, k + 1, bounds, norm, cur, out);
            }
            cur[k] = 0;
        }
        rec(&red, 0, &bounds, norm, &mut cur, &mut out);
        out.into_iter()
            .map(|c| (0..n).map(|m| (0..n).map(|k| c[k] * u[k][m]).sum()).collect())
            .collect()
    }
}

/// Rows of a unimodular matrix whose vectors are pairwise size reduced:
/// `|T(b_i, b_j)| <= T(b_j, b_j) / 2`.
fn pairwise_reduced(gram: &[Vec<Q>]) -> Vec<Vec<i128>> {
    let n = gram.len();
    let mut u: Vec<Vec<i128>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
    let t = |u: &Vec<Vec<i128>>, i: usize, j: usize| -> Q {
        let mut s = Q::zero();
        for a in 0..n {
            for b in 0..n {
                s += gram[a][b] * q(u[i][a] * u[j][b]);
            }
        }
        s
    };
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let r = (t(&u, i, j) / t(&u, j, j)).round().to_integer();
                if r != 0 && t(&u, i, i) > t(&u, j, j) / q(4) {
                    let row: Vec<i128> = (0..n).map(|k| u[i][k] - r * u[j][k]).collect();
                    let old = t(&u, i, i);
                    let saved = std::mem::replace(&mut u[i], row);
                    if t(&u, i, i) < old {
                        changed = true;
                    } else {
                        u[i] = saved;
                    }
                }
            }
        }
        if !changed {
            return u;
        }
    }
}

use num_traits::ToPrimitive;

/// Brute-force isometry test: backtrack over images of every Z-basis vector
/// with matching inner products, then require a unimodular matrix commuting
/// with multiplication by `w`.
pub fn brute_isometric(l1: &HermitianLattice, l2: &HermitianLattice) -> bool {
    if l1.order() != l2.order() || l1.rank() != l2.rank() {
        return false;
    }
    let (z1, z2) = (ZForm::new(l1).reduced(), ZForm::new(l2).reduced());
    let n = z1.gram.len();
    if rat_det(&z1.gram) != rat_det(&z2.gram) {
        return false;
    }
    let cands: Vec<Vec<Vec<i128>>> = (0..n).map(|k| z2.vectors_of_norm(z1.gram[k][k])).collect();
    let mut chosen: Vec<Vec<i128>> = Vec::new();
    fn rec(z1: &ZForm, z2: &ZForm, cands: &[Vec<Vec<i128>>], chosen: &mut Vec<Vec<i128>>) -> bool {
        let k = chosen.len();
        let n = cands.len();
        if k == n {
            let m: Vec<Vec<Q>> = chosen.iter().map(|r| r.iter().map(|x| q(*x)).collect()).collect();
            if rat_det(&m).abs() != Q::one() {
                return false;
            }
            // phi(w e_k) = w phi(e_k)
            return (0..n).all(|k| {
                let lhs: Vec<i128> = (0..n).map(|c| (0..n).map(|m| z1.omega[k][m] * chosen[m][c]).sum()).collect();
                lhs == z2.apply_omega(&chosen[k])
            });
        }
        for v in &cands[k] {
            if (0..k).all(|j| z2.inner(v, &chosen[j]) == z1.gram[k][j]) {
                chosen.push(v.clone());
                if rec(z1, z2, cands, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    rec(&z1, &z2, &cands, &mut chosen)
}

/// Rank-one and rank-two lattices with trace determinant at most `max_det`,
/// together with re-encoded isometric copies.
pub fn small_pool<R: Rng>(rng: &mut R, discs: &[i64], max_det: i128) -> Vec<HermitianLattice> {
    let mut out = Vec::new();
    for &d in discs {
        let o = order(d);
        let ideals: Vec<FracIdeal> = {
            let mut v = vec![FracIdeal::unit(o)];
            v.extend(primes_above(o, 2).into_iter().filter(|p| p.norm() == q(2)));
            v.extend(primes_above(o, 3).into_iter().filter(|p| p.norm() == q(3)).take(1));
            v
        };
        let w = o.omega();
        let offdiag = [o.zero(), o.one(), w, o.one() + w, w.scale(qf(1, 2)), o.rational(qf(1, 2))];
        let mut base = Vec::new();
        for a in &ideals {
            for c in [qf(1, 1), qf(2, 1), qf(3, 1), qf(1, 2)] {
                let c = c / a.norm();
                base.push(HermitianLattice::new(o, vec![*a], vec![vec![o.rational(c)]]).unwrap());
            }
        }
        for (ai, a) in ideals.iter().enumerate() {
            for b in &ideals[ai..] {
                for (x, y) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
                    for e in &offdiag {
                        let (x, y) = (o.rational(q(x) / a.norm()), o.rational(q(y) / b.norm()));
                        let g = vec![vec![x, *e], vec![e.conj(), y]];
                        if let Ok(l) = HermitianLattice::new(o, vec![*a, *b], g) {
                            base.push(l);
                        }
                    }
                }
            }
        }
        base.retain(|l| rat_det(&ZForm::new(l).gram) <= q(max_det));
        base.shuffle(rng);
        base.truncate(14);
        for l in base {
            let copy = rebased(rng, &l);
            out.push(l);
            out.push(copy);
        }
    }
    out
}
