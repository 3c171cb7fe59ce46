//! Isometry testing, automorphism groups and orthogonal decomposition.
//!
//! An isometry `phi: L1 -> L2` is stored as the K-matrix `M` whose row `i`
//! holds the coordinates of `phi(x_i)` in the basis of `L2`, so that
//! `M G2 adjoint(M) = G1`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{q, Q};
use crate::kmat::{self, KMatrix};
use crate::lattice::{kmatrix_from_json, kmatrix_to_json, HermitianLattice, KJson};
use crate::order::{KNumber, Order};
use crate::pseudo::{pseudo_basis, sublattice};
use crate::zlattice::{self, hnf, identity, lll_gram, short_vectors, IntMatrix, Signs};
use crate::Error;

/// Trace norm up to which theta coefficients are compared.
pub const THETA_DEPTH: i128 = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsometryWitness {
    pub matrix: KMatrix,
}

impl IsometryWitness {
    pub fn identity(l: &HermitianLattice) -> IsometryWitness {
        IsometryWitness { matrix: kmat::identity(l.order(), l.rank()) }
    }

    /// Witness of the reverse isometry.
    pub fn inverse(&self) -> IsometryWitness {
        IsometryWitness { matrix: kmat::inverse(&self.matrix).expect("isometries are invertible") }
    }

    /// `other` after `self`: for `self: L1 -> L2` and `other: L2 -> L3`.
    pub fn then(&self, other: &IsometryWitness) -> IsometryWitness {
        IsometryWitness { matrix: kmat::mul(&self.matrix, &other.matrix) }
    }

    /// Checks Gram transport and that the induced integer matrix between the
    /// Z-bases of `l1` and `l2` is unimodular.
    pub fn verify(&self, l1: &HermitianLattice, l2: &HermitianLattice) -> bool {
        if self.matrix.len() != l1.rank() || l1.rank() != l2.rank() {
            return false;
        }
        if kmat::transform(&self.matrix, l2.gram()) != *l1.gram() {
            return false;
        }
        let mut rows: IntMatrix = Vec::new();
        for v in l1.zbasis() {
            let img = kmat::vec_mul(&v, &self.matrix);
            let mut row = Vec::new();
            for (x, a) in img.iter().zip(l2.ideals()) {
                match a.coords(x) {
                    Some((s, t)) => row.extend([s, t]),
                    None => return false,
                }
            }
            rows.push(row);
        }
        zlattice::abs_det_int(&rows) == 1
    }

    pub fn to_json(&self) -> Vec<Vec<KJson>> {
        kmatrix_to_json(&self.matrix)
    }

    pub fn from_json(order: Order, m: &[Vec<KJson>]) -> Result<IsometryWitness, Error> {
        Ok(IsometryWitness { matrix: kmatrix_from_json(order, m)? })
    }
}

/// First invariant found to differ between two lattices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Separation {
    Order,
    Rank,
    Scale,
    Volume,
    Steinitz,
    TraceDeterminant,
    Theta,
    SearchExhausted,
}

impl Separation {
    pub fn name(&self) -> &'static str {
        match self {
            Separation::Order => "order",
            Separation::Rank => "rank",
            Separation::Scale => "scale",
            Separation::Volume => "volume",
            Separation::Steinitz => "steinitz",
            Separation::TraceDeterminant => "trace_determinant",
            Separation::Theta => "theta",
            Separation::SearchExhausted => "search exhausted",
        }
    }
}

impl fmt::Display for Separation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Cheap isometry invariants, computed once per lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub disc: i64,
    pub rank: usize,
    pub scale: crate::FracIdeal,
    pub volume: Q,
    pub steinitz: crate::FracIdeal,
    pub trace_det: Q,
    /// `(trace norm, number of vectors)` for all norms up to the depth.
    pub theta: Vec<(Q, usize)>,
}

impl Invariants {
    pub fn new(l: &HermitianLattice) -> Invariants {
        Invariants::with_depth(l, THETA_DEPTH)
    }

    pub fn with_depth(l: &HermitianLattice, depth: i128) -> Invariants {
        let t = l.trace_lattice();
        Invariants {
            disc: l.order().disc(),
            rank: l.rank(),
            scale: l.scale(),
            volume: l.volume_q(),
            steinitz: l.steinitz_ideal(),
            trace_det: t.det(),
            theta: theta_prefix(&t.gram_z, depth),
        }
    }

    /// The first invariant that separates the two lattices, if any.
    pub fn separation(&self, o: &Invariants) -> Option<Separation> {
        if self.disc != o.disc {
            return Some(Separation::Order);
        }
        if self.rank != o.rank {
            return Some(Separation::Rank);
        }
        if self.scale != o.scale {
            return Some(Separation::Scale);
        }
        if self.volume != o.volume {
            return Some(Separation::Volume);
        }
        if !self.steinitz.div(&o.steinitz).is_principal() {
            return Some(Separation::Steinitz);
        }
        if self.trace_det != o.trace_det {
            return Some(Separation::TraceDeterminant);
        }
        if self.theta != o.theta {
            return Some(Separation::Theta);
        }
        None
    }
}

/// Vector counts (both signs) of the Z-form `gram` per norm up to `depth`.
pub fn theta_prefix(gram: &zlattice::RatMatrix, depth: i128) -> Vec<(Q, usize)> {
    let mut counts: BTreeMap<Q, usize> = BTreeMap::new();
    for (_, n) in short_vectors(gram, &q(depth), Signs::UpToSign) {
        *counts.entry(n).or_default() += 2;
    }
    counts.into_iter().collect()
}

pub fn is_isometric(l1: &HermitianLattice, l2: &HermitianLattice) -> Result<IsometryWitness, Separation> {
    is_isometric_with(l1, &Invariants::new(l1), l2, &Invariants::new(l2))
}

/// As [`is_isometric`] with precomputed invariants.
pub fn is_isometric_with(
    l1: &HermitianLattice,
    i1: &Invariants,
    l2: &HermitianLattice,
    i2: &Invariants,
) -> Result<IsometryWitness, Separation> {
    if let Some(s) = i1.separation(i2) {
        return Err(s);
    }
    Search::new(l1, l2)
        .run(false)
        .into_iter()
        .next()
        .map(|matrix| IsometryWitness { matrix })
        .ok_or(Separation::SearchExhausted)
}

/// Every self-isometry of `l`.
pub fn automorphisms(l: &HermitianLattice) -> Vec<IsometryWitness> {
    Search::new(l, l)
        .run(true)
        .into_iter()
        .map(|matrix| IsometryWitness { matrix })
        .collect()
}

/// Backtracking over images of a fixed K-basis of short vectors of `l1`.
///
/// An R-linear map is fixed by the images `v_i` of K-independent vectors
/// `u_i`, so R-equivariance holds by construction; candidates for `v_i` are
/// the vectors of `l2` of norm `H(u_i, u_i)` whose inner products with the
/// earlier images match.
struct Search<'a> {
    l1: &'a HermitianLattice,
    l2: &'a HermitianLattice,
    u: Vec<Vec<KNumber>>,
    cands: Vec<Vec<Vec<KNumber>>>,
}

impl<'a> Search<'a> {
    fn new(l1: &'a HermitianLattice, l2: &'a HermitianLattice) -> Search<'a> {
        let u = independent_short_vectors(l1);
        let t2 = l2.trace_lattice();
        let norms: Vec<Q> = u.iter().map(|v| l1.form(v, v).a).collect();
        let max = norms.iter().max().copied().expect("rank >= 1");
        let pool = short_vectors(&t2.gram_z, &(max * q(2)), Signs::Both);
        let cands = norms
            .iter()
            .map(|n| {
                pool.iter()
                    .filter(|(_, m)| *m == *n * q(2))
                    .map(|(v, _)| t2.to_k(v))
                    .collect()
            })
            .collect();
        Search { l1, l2, u, cands }
    }

    fn run(&self, all: bool) -> Vec<KMatrix> {
        let g = self.u.len();
        if self.cands.iter().any(|c| c.is_empty()) {
            return Vec::new();
        }
        let target: Vec<Vec<KNumber>> = (0..g)
            .map(|i| (0..g).map(|j| self.l1.form(&self.u[i], &self.u[j])).collect())
            .collect();
        let uinv = kmat::inverse(&self.u).expect("independent vectors");
        let units = self.l1.order().units();
        let mut first = self.cands[0].clone();
        if !all {
            // Units act as automorphisms of l2, so one image per unit orbit suffices.
            let mut seen: HashSet<Vec<KNumber>> = HashSet::new();
            first.retain(|v| {
                if seen.contains(v) {
                    return false;
                }
                for e in &units {
                    seen.insert(v.iter().map(|x| *x * *e).collect());
                }
                true
            });
        }
        let mut out = Vec::new();
        let mut chosen: Vec<Vec<KNumber>> = Vec::with_capacity(g);
        self.extend(&first, &target, &uinv, all, &mut chosen, &mut out);
        out
    }

    fn extend(
        &self,
        first: &[Vec<KNumber>],
        target: &[Vec<KNumber>],
        uinv: &KMatrix,
        all: bool,
        chosen: &mut Vec<Vec<KNumber>>,
        out: &mut Vec<KMatrix>,
    ) {
        let i = chosen.len();
        if i == self.u.len() {
            let m = kmat::mul(uinv, chosen);
            if self.maps_into(&m) {
                out.push(m);
            }
            return;
        }
        let cands = if i == 0 { first } else { &self.cands[i][..] };
        for v in cands {
            if (0..i).any(|j| self.l2.form(v, &chosen[j]) != target[i][j]) {
                continue;
            }
            chosen.push(v.clone());
            self.extend(first, target, uinv, all, chosen, out);
            chosen.pop();
            if !all && !out.is_empty() {
                return;
            }
        }
    }

    /// `a_i M_ij` inside `b_j` for all `i, j`.
    fn maps_into(&self, m: &KMatrix) -> bool {
        self.l1.ideals().iter().enumerate().all(|(i, a)| {
            self.l2
                .ideals()
                .iter()
                .enumerate()
                .all(|(j, b)| m[i][j].is_zero() || a.zbasis().iter().all(|g| b.contains(&(*g * m[i][j]))))
        })
    }
}

/// `g` K-linearly independent vectors of `l`, greedily by increasing norm.
fn independent_short_vectors(l: &HermitianLattice) -> Vec<Vec<KNumber>> {
    let g = l.rank();
    let t = l.trace_lattice();
    let (_, red) = lll_gram(&t.gram_z);
    let bound = (0..red.len()).map(|i| red[i][i]).max().expect("rank >= 1");
    let mut chosen: Vec<Vec<KNumber>> = Vec::with_capacity(g);
    for (v, _) in short_vectors(&t.gram_z, &bound, Signs::UpToSign) {
        let kv = t.to_k(&v);
        chosen.push(kv);
        let gram: KMatrix = chosen
            .iter()
            .map(|a| chosen.iter().map(|b| l.form(a, b)).collect())
            .collect();
        if !kmat::det(&gram).is_zero() {
            if chosen.len() == g {
                break;
            }
        } else {
            chosen.pop();
        }
    }
    assert_eq!(chosen.len(), g, "LLL basis vectors span K^g");
    chosen
}

/// The finest orthogonal decomposition `L = L_1 + ... + L_k`.
///
/// The trace lattice splits along the connected components of its
/// indecomposable vectors (non-orthogonality graph); components joined by
/// `T(w C_i, C_j) != 0` must lie in one hermitian summand, and the merged
/// blocks are H-orthogonal because `T(u, v) = T(w u, v) = 0` forces
/// `H(u, v) = 0`.
pub fn decompose(l: &HermitianLattice) -> Vec<HermitianLattice> {
    let t = l.trace_lattice();
    let n = t.rank;
    let (_, red) = lll_gram(&t.gram_z);
    let mut bound = (0..n).map(|i| red[i][i]).max().expect("rank >= 1");
    let vecs = loop {
        let s = short_vectors(&t.gram_z, &bound, Signs::UpToSign);
        let rows: IntMatrix = s.iter().map(|(v, _)| v.clone()).collect();
        if hnf(&rows) == identity(n) {
            break s;
        }
        bound *= q(2);
    };
    let indec: Vec<&Vec<i128>> = vecs
        .iter()
        .filter(|(v, nv)| {
            !vecs
                .iter()
                .take_while(|(_, nu)| nu < nv)
                .any(|(u, nu)| t.inner(u, v).abs() == *nu)
        })
        .map(|(v, _)| v)
        .collect();
    let mut uf = UnionFind::new(indec.len());
    for i in 0..indec.len() {
        for j in (i + 1)..indec.len() {
            if !t.inner(indec[i], indec[j]).is_zero() {
                uf.union(i, j);
            }
        }
    }
    let omega: Vec<Vec<i128>> = indec.iter().map(|v| t.omega(v)).collect();
    for i in 0..indec.len() {
        for j in 0..indec.len() {
            if uf.find(i) != uf.find(j) && !t.inner(&omega[i], indec[j]).is_zero() {
                uf.union(i, j);
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<Vec<KNumber>>> = BTreeMap::new();
    let mut first_seen: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, v) in indec.iter().enumerate() {
        let r = uf.find(i);
        let key = *first_seen.entry(r).or_insert(i);
        blocks.entry(key).or_default().push(t.to_k(v));
    }
    blocks
        .into_values()
        .map(|gens| sublattice(l, &pseudo_basis(l.order(), l.rank(), &gens)))
        .collect()
}

pub fn is_indecomposable(l: &HermitianLattice) -> bool {
    decompose(l).len() == 1
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    /// Joins the two sets; the smaller root survives.
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}
