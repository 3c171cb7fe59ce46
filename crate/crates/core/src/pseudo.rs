//! Pseudo-bases of R-modules in `K^n` and the Steinitz normal form.

use crate::arith::{lcm_denoms, q, Q};
use crate::classgroup::IdealClassGroup;
use crate::ideal::FracIdeal;
use crate::kmat::{self, KMatrix};
use crate::lattice::HermitianLattice;
use crate::order::{KNumber, Order};
use crate::zlattice::{echelon_coords, hnf, hnf_with_transform, IntMatrix};

/// A coefficient ideal with its vector: the summand `a * v`.
pub type PseudoElement = (FracIdeal, Vec<KNumber>);

fn flatten(v: &[KNumber]) -> Vec<Q> {
    v.iter().flat_map(|x| [x.a, x.b]).collect()
}

fn unflatten(order: Order, row: &[i128], den: i128) -> Vec<KNumber> {
    row.chunks(2)
        .map(|c| order.elem(Q::new(c[0], den), Q::new(c[1], den)))
        .collect()
}

fn combine(order: Order, n: usize, coeffs: &[KNumber], vecs: &[Vec<KNumber>]) -> Vec<KNumber> {
    let mut out = vec![order.zero(); n];
    for (c, v) in coeffs.iter().zip(vecs) {
        if c.is_zero() {
            continue;
        }
        for k in 0..n {
            out[k] += *c * v[k];
        }
    }
    out
}

/// Echelon Z-basis of the span of `vecs`, scaled by the common denominator `den`.
fn zspan(vecs: &[Vec<KNumber>], den: i128) -> IntMatrix {
    let rows: IntMatrix = vecs
        .iter()
        .map(|v| flatten(v).iter().map(|x| (x * q(den)).to_integer()).collect())
        .collect();
    hnf(&rows)
}

fn common_den<'a>(vecs: impl IntoIterator<Item = &'a Vec<KNumber>>) -> i128 {
    let all: Vec<Q> = vecs.into_iter().flat_map(|v| flatten(v)).collect();
    lcm_denoms(all.iter())
}

/// Whether two families of K-vectors span the same Z-module.
pub fn same_zspan(a: &[Vec<KNumber>], b: &[Vec<KNumber>]) -> bool {
    let d = common_den(a.iter().chain(b));
    zspan(a, d) == zspan(b, d)
}

/// `(i, j)` with `i` in `x`, `j` in `y` and `i + j = 1`, for coprime
/// integral ideals.
pub fn split_one(x: &FracIdeal, y: &FracIdeal) -> (KNumber, KNumber) {
    let gens = [x.gen1(), x.gen2(), y.gen1(), y.gen2()];
    let rows: IntMatrix = gens
        .iter()
        .map(|g| vec![g.a.to_integer(), g.b.to_integer()])
        .collect();
    let (h, u, rank) = hnf_with_transform(&rows);
    let c = echelon_coords(&h[..rank].to_vec(), &[1, 0]).expect("ideals must be coprime");
    let comb: Vec<i128> = (0..4).map(|k| (0..rank).map(|r| c[r] * u[r][k]).sum()).collect();
    let i = gens[0] * q(comb[0]) + gens[1] * q(comb[1]);
    let j = gens[2] * q(comb[2]) + gens[3] * q(comb[3]);
    (i, j)
}

/// A pseudo-basis of the R-module generated by `gens` in `K^n`.
///
/// Peels off the last nonzero coordinate: the projection is an ideal `a`
/// with Z-generators `c, d` lifting to module elements `m_c, m_d`; picking
/// `alpha, beta` in `a^{-1}` with `alpha c + beta d = 1` gives the section
/// `a -> a (alpha m_c + beta m_d)`, and the Z-kernel of the projection is the
/// remaining module.
pub fn pseudo_basis(order: Order, n: usize, gens: &[Vec<KNumber>]) -> Vec<PseudoElement> {
    let w = order.omega();
    let mut z: Vec<Vec<KNumber>> = gens
        .iter()
        .flat_map(|g| [g.clone(), g.iter().map(|x| *x * w).collect()])
        .collect();
    let mut out = Vec::new();
    loop {
        let den = common_den(z.iter());
        z = zspan(&z, den).iter().map(|r| unflatten(order, r, den)).collect();
        let Some(p) = (0..n).rev().find(|p| z.iter().any(|v| !v[*p].is_zero())) else {
            break;
        };
        let proj: Vec<KNumber> = z.iter().map(|v| v[p]).collect();
        let a = FracIdeal::from_zspan(order, &proj).expect("projection of an R-module is an ideal");
        let rows: IntMatrix = proj
            .iter()
            .map(|x| {
                let (s, t) = a.coords(x).expect("projection lies in its span");
                vec![s, t]
            })
            .collect();
        let (h, u, rank) = hnf_with_transform(&rows);
        debug_assert_eq!(h[..2], [vec![1, 0], vec![0, 1]]);
        let lift = |r: usize| {
            let coeffs: Vec<KNumber> = u[r].iter().map(|x| order.int(*x)).collect();
            combine(order, n, &coeffs, &z)
        };
        let (c, d) = (a.gen1(), a.gen2());
        let ainv = a.inv();
        let (i, j) = split_one(&ainv.scale(&c), &ainv.scale(&d));
        let x = combine(order, n, &[i / c, j / d], &[lift(0), lift(1)]);
        out.push((a, x));
        z = (rank..u.len()).map(lift).collect();
    }
    out.reverse();
    out
}

/// Rewrite `a x + b y` as `R z + (ab) w`.
fn merge(order: Order, (a_id, x): &PseudoElement, (b_id, y): &PseudoElement) -> (Vec<KNumber>, PseudoElement) {
    let n = x.len();
    let a = a_id.shortest_element();
    let i_id = a_id.inv().scale(&a);
    let [g1, g2] = b_id.zbasis();
    let mut found = None;
    'search: for r in 1i128.. {
        for m1 in -r..=r {
            for m2 in -r..=r {
                if m1.abs().max(m2.abs()) != r {
                    continue;
                }
                let b = g1 * q(m1) + g2 * q(m2);
                let j_id = b_id.inv().scale(&b);
                if i_id.add(&j_id).is_unit() {
                    found = Some((b, j_id));
                    break 'search;
                }
            }
        }
    }
    let (b, j_id) = found.expect("loop only exits on success");
    let (i, j) = split_one(&i_id, &j_id);
    let (u, v) = (i / a, j / b);
    let z = combine(order, n, &[a, b], &[x.clone(), y.clone()]);
    let w = combine(order, n, &[v, -u], &[x.clone(), y.clone()]);
    (z, (a_id.mul(b_id), w))
}

/// Steinitz normal form `R y_1 + ... + R y_{g-1} + c y_g` with `c` the
/// smallest-norm representative of the Steinitz class. Returns the lattice on
/// the new basis and the matrix whose rows are the `y_i` in the old basis.
pub fn steinitz_form(l: &HermitianLattice, cg: &IdealClassGroup) -> (HermitianLattice, KMatrix) {
    let order = l.order();
    let g = l.rank();
    let id = kmat::identity(order, g);
    let mut rows = Vec::with_capacity(g);
    let mut acc: PseudoElement = (l.ideals()[0], id[0].clone());
    for i in 1..g {
        let (z, rest) = merge(order, &acc, &(l.ideals()[i], id[i].clone()));
        rows.push(z);
        acc = rest;
    }
    let (a, w) = acc;
    let c = cg.rep(cg.class_of(&a));
    let lambda = a.div(&c).generator().expect("same class");
    rows.push(w.iter().map(|x| *x * lambda).collect());
    let mut ideals = vec![FracIdeal::unit(order); g - 1];
    ideals.push(c);
    let lat = l.rebase(ideals, &rows).expect("rebasing keeps the form positive definite");
    (lat, rows)
}

/// The lattice `sum a_i v_i` for a pseudo-basis in the ambient space of `l`.
pub fn sublattice(l: &HermitianLattice, pb: &[PseudoElement]) -> HermitianLattice {
    let ideals = pb.iter().map(|(a, _)| *a).collect();
    let p: KMatrix = pb.iter().map(|(_, v)| v.clone()).collect();
    l.rebase(ideals, &p).expect("sub-basis of a positive definite space")
}

/// Z-basis of `sum a_i v_i` in ambient coordinates.
pub fn pseudo_zbasis(pb: &[PseudoElement]) -> Vec<Vec<KNumber>> {
    pb.iter()
        .flat_map(|(a, v)| a.zbasis().map(|g| v.iter().map(|x| *x * g).collect::<Vec<_>>()))
        .collect()
}

/// Z-basis of `l` mapped into ambient coordinates through the rows of `p`.
pub fn ambient_zbasis(l: &HermitianLattice, p: &KMatrix) -> Vec<Vec<KNumber>> {
    l.zbasis().iter().map(|v| kmat::vec_mul(v, p)).collect()
}
