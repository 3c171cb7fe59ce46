//! Hermitian lattices `L = a_1 x_1 + ... + a_g x_g` in pseudo-basis form.
//!
//! The form is `H(u, v) = u G adjoint(v)`: linear in the first argument and
//! conjugate-linear in the second, with `G[i][j] = H(x_i, x_j)`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_q, parse_q, q, Q};
use crate::classgroup::{IdealClass, IdealClassGroup};
use crate::ideal::FracIdeal;
use crate::kmat::{self, KMatrix};
use crate::order::{KNumber, Order};
use crate::zlattice::{self, IntMatrix, RatMatrix, Signs};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "LatticeJson", into = "LatticeJson")]
pub struct HermitianLattice {
    order: Order,
    ideals: Vec<FracIdeal>,
    gram: KMatrix,
}

impl HermitianLattice {
    pub fn new(order: Order, ideals: Vec<FracIdeal>, gram: KMatrix) -> Result<HermitianLattice, Error> {
        let g = ideals.len();
        if g == 0 {
            return Err(Error::Rank(0));
        }
        if gram.len() != g || gram.iter().any(|r| r.len() != g) {
            return Err(Error::Lattice(format!("gram must be {g}x{g}")));
        }
        for id in &ideals {
            if id.order() != order {
                return Err(Error::OrderMismatch(order.disc(), id.order().disc()));
            }
        }
        for x in gram.iter().flatten() {
            if x.order() != order {
                return Err(Error::OrderMismatch(order.disc(), x.order().disc()));
            }
        }
        if !kmat::is_hermitian(&gram) {
            return Err(Error::Lattice("gram is not hermitian".into()));
        }
        if kmat::hermitian_ldl(&gram).is_none() {
            return Err(Error::Lattice("gram is not positive definite".into()));
        }
        Ok(HermitianLattice { order, ideals, gram })
    }

    /// No validation; callers guarantee a hermitian positive definite Gram.
    pub(crate) fn new_unchecked(order: Order, ideals: Vec<FracIdeal>, gram: KMatrix) -> HermitianLattice {
        HermitianLattice { order, ideals, gram }
    }

    /// `R^g` with the given Gram matrix.
    pub fn free(order: Order, gram: KMatrix) -> Result<HermitianLattice, Error> {
        let ideals = vec![FracIdeal::unit(order); gram.len()];
        HermitianLattice::new(order, ideals, gram)
    }

    /// The standard lattice `R^g` with identity Gram.
    pub fn standard(order: Order, g: usize) -> HermitianLattice {
        HermitianLattice::free(order, kmat::identity(order, g)).expect("identity is positive definite")
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.ideals.len()
    }

    pub fn ideals(&self) -> &[FracIdeal] {
        &self.ideals
    }

    pub fn gram(&self) -> &KMatrix {
        &self.gram
    }

    /// `H(L, L) = sum_{i,j} a_i conj(a_j) G_ij`.
    pub fn scale(&self) -> FracIdeal {
        let mut acc: Option<FracIdeal> = None;
        for (i, ai) in self.ideals.iter().enumerate() {
            for (j, aj) in self.ideals.iter().enumerate().skip(i) {
                if self.gram[i][j].is_zero() {
                    continue;
                }
                let t = ai.mul(&aj.conj()).scale(&self.gram[i][j]);
                // The (j, i) term is the conjugate ideal.
                let t = if i == j { t } else { t.add(&t.conj()) };
                acc = Some(match acc {
                    None => t,
                    Some(s) => s.add(&t),
                });
            }
        }
        acc.expect("positive definite gram has nonzero diagonal")
    }

    /// Positive rational generator of the volume: `prod N(a_i) * det G`.
    pub fn volume_q(&self) -> Q {
        let d = kmat::det(&self.gram);
        debug_assert!(d.is_rational());
        self.ideals.iter().map(|a| a.norm()).product::<Q>() * d.a
    }

    pub fn volume(&self) -> FracIdeal {
        FracIdeal::rational(self.order, self.volume_q())
    }

    /// `L^# = sum_i conj(a_i)^{-1} y_i` with `y_i` the rows of `G^{-1}`; its
    /// Gram on the `y_i` is `G^{-1}`.
    pub fn dual(&self) -> HermitianLattice {
        let inv = kmat::inverse(&self.gram).expect("positive definite gram is invertible");
        let ideals = self.ideals.iter().map(|a| a.conj().inv()).collect();
        HermitianLattice { order: self.order, ideals, gram: inv }
    }

    pub fn is_integral(&self) -> bool {
        self.scale().is_integral()
    }

    /// `a`-modular: volume `a^g` and scale `a`.
    pub fn is_modular(&self, a: &FracIdeal) -> bool {
        self.scale() == *a && self.volume() == a.pow(self.rank() as i64)
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_modular(&FracIdeal::unit(self.order))
    }

    /// `a_1 * ... * a_g`.
    pub fn steinitz_ideal(&self) -> FracIdeal {
        self.ideals
            .iter()
            .fold(FracIdeal::unit(self.order), |acc, a| acc.mul(a))
    }

    pub fn steinitz(&self, cg: &IdealClassGroup) -> IdealClass {
        cg.class_of(&self.steinitz_ideal())
    }

    pub fn is_free(&self) -> bool {
        self.steinitz_ideal().is_principal()
    }

    /// The index `[L^# : L]`, read off the integer coordinates of a Z-basis
    /// of `L` in a Z-basis of `L^#`.
    pub fn polarization_degree(&self) -> Result<i128, Error> {
        let d = self.dual();
        let mut rows: IntMatrix = Vec::new();
        for v in self.zbasis() {
            // v = sum_k v_k x_k = (v G) . y
            let c = kmat::vec_mul(&v, &self.gram);
            let mut row = Vec::with_capacity(2 * self.rank());
            for (i, ci) in c.iter().enumerate() {
                let (s, t) = d.ideals[i].coords(ci).ok_or(Error::NotIntegral)?;
                row.push(s);
                row.push(t);
            }
            rows.push(row);
        }
        Ok(zlattice::abs_det_int(&rows))
    }

    /// Z-basis of the underlying module: `gamma * x_i` for `gamma` running over
    /// the Z-basis of `a_i`, as K-coordinate rows.
    pub fn zbasis(&self) -> Vec<Vec<KNumber>> {
        let g = self.rank();
        let mut out = Vec::with_capacity(2 * g);
        for (i, a) in self.ideals.iter().enumerate() {
            for gamma in a.zbasis() {
                let mut v = vec![self.order.zero(); g];
                v[i] = gamma;
                out.push(v);
            }
        }
        out
    }

    pub fn contains(&self, v: &[KNumber]) -> bool {
        v.iter().zip(&self.ideals).all(|(x, a)| a.contains(x))
    }

    /// `H(u, v)` for K-coordinate rows.
    pub fn form(&self, u: &[KNumber], v: &[KNumber]) -> KNumber {
        kmat::form(&self.gram, u, v)
    }

    /// The same module and form on the new basis rows of `p`: the coefficient
    /// ideals are given, and the Gram becomes `p G adjoint(p)`.
    pub fn rebase(&self, ideals: Vec<FracIdeal>, p: &KMatrix) -> Result<HermitianLattice, Error> {
        HermitianLattice::new(self.order, ideals, kmat::transform(p, &self.gram))
    }

    pub fn orthogonal_sum(&self, other: &HermitianLattice) -> HermitianLattice {
        let (a, b) = (self.rank(), other.rank());
        let mut gram = vec![vec![self.order.zero(); a + b]; a + b];
        for i in 0..a {
            for j in 0..a {
                gram[i][j] = self.gram[i][j];
            }
        }
        for i in 0..b {
            for j in 0..b {
                gram[a + i][a + j] = other.gram[i][j];
            }
        }
        let ideals = self.ideals.iter().chain(&other.ideals).copied().collect();
        HermitianLattice { order: self.order, ideals, gram }
    }

    /// `(aL, H / N(a))`.
    pub fn ideal_act(&self, a: &FracIdeal) -> HermitianLattice {
        let s = self.order.rational(Q::one() / a.norm());
        HermitianLattice {
            order: self.order,
            ideals: self.ideals.iter().map(|x| a.mul(x)).collect(),
            gram: kmat::scale(&self.gram, &s),
        }
    }

    /// `(conj L, conj H)`.
    pub fn conj(&self) -> HermitianLattice {
        HermitianLattice {
            order: self.order,
            ideals: self.ideals.iter().map(|x| x.conj()).collect(),
            gram: kmat::conj(&self.gram),
        }
    }

    pub fn trace_lattice(&self) -> TraceLattice {
        let order = self.order;
        let mut basis_map = Vec::new();
        for (i, a) in self.ideals.iter().enumerate() {
            for (k, gamma) in a.zbasis().into_iter().enumerate() {
                basis_map.push(TraceBasis { index: i, generator: k, element: gamma });
            }
        }
        let n = basis_map.len();
        let mut gram_z = vec![vec![Q::zero(); n]; n];
        for r in 0..n {
            for c in r..n {
                let (br, bc) = (&basis_map[r], &basis_map[c]);
                let h = br.element * bc.element.conj() * self.gram[br.index][bc.index];
                gram_z[r][c] = h.trace();
                gram_z[c][r] = h.trace();
            }
        }
        let w = order.omega();
        let rows: IntMatrix = basis_map
            .iter()
            .map(|b| {
                let (s, t) = self.ideals[b.index]
                    .coords(&(b.element * w))
                    .expect("ideals are stable under w");
                let mut row = vec![0i128; n];
                row[2 * b.index] = s;
                row[2 * b.index + 1] = t;
                row
            })
            .collect();
        // Column c holds the coordinates of w * (basis vector c).
        let omega_action = (0..n).map(|r| (0..n).map(|c| rows[c][r]).collect()).collect();
        TraceLattice { order, rank: n, gram_z, omega_action, basis_map }
    }

    pub fn text(&self) -> String {
        serde_json::to_string(self).expect("lattice serializes")
    }

    pub fn parse(s: &str) -> Result<HermitianLattice, Error> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// One Z-basis vector `element * x_index` of a trace lattice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceBasis {
    pub index: usize,
    /// 0 or 1: which Z-generator of the coefficient ideal.
    pub generator: usize,
    pub element: KNumber,
}

/// The Z-lattice `(L, Tr H)` together with multiplication by `w`.
///
/// Integer vectors are coordinates in the basis `basis_map`; `omega_action`
/// is the matrix of `v -> w v` acting on column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceLattice {
    pub order: Order,
    pub rank: usize,
    pub gram_z: RatMatrix,
    pub omega_action: IntMatrix,
    pub basis_map: Vec<TraceBasis>,
}

impl TraceLattice {
    /// K-coordinates of an integer vector.
    pub fn to_k(&self, v: &[i128]) -> Vec<KNumber> {
        let g = self.rank / 2;
        let mut out = vec![self.order.zero(); g];
        for (b, vi) in self.basis_map.iter().zip(v) {
            if *vi != 0 {
                out[b.index] += b.element * q(*vi);
            }
        }
        out
    }

    pub fn omega(&self, v: &[i128]) -> Vec<i128> {
        self.omega_action
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    pub fn inner(&self, u: &[i128], v: &[i128]) -> Q {
        zlattice::bilinear(&self.gram_z, u, v)
    }

    pub fn det(&self) -> Q {
        zlattice::det(&self.gram_z)
    }

    /// Nonzero vectors of trace norm at most `bound`, one of each sign pair.
    pub fn minimum_vectors(&self, bound: &Q) -> Vec<Vec<i128>> {
        zlattice::short_vectors(&self.gram_z, bound, Signs::UpToSign)
            .into_iter()
            .map(|(v, _)| v)
            .collect()
    }

    /// Recover the hermitian Gram on the pseudo-basis from `T(u, v)` and
    /// `T(w u, v)`: for `h = p + q w`, `Tr h = 2p + qt` and
    /// `Tr(w h) = pt + q(t^2 - 2n)`.
    pub fn hermitian_gram(&self) -> KMatrix {
        let (t, n) = (q(self.order.omega_trace() as i128), q(self.order.omega_norm() as i128));
        let disc = t * t - q(4) * n;
        let g = self.rank / 2;
        let mut out = vec![vec![self.order.zero(); g]; g];
        let first: Vec<usize> = (0..g)
            .map(|i| {
                self.basis_map
                    .iter()
                    .position(|b| b.index == i && b.generator == 0)
                    .expect("every index has a first generator")
            })
            .collect();
        for i in 0..g {
            for j in 0..g {
                let (u, v) = (first[i], first[j]);
                let tr = self.gram_z[u][v];
                let mut unit = vec![0i128; self.rank];
                unit[u] = 1;
                let wu = self.omega(&unit);
                let trw: Q = (0..self.rank).map(|k| q(wu[k]) * self.gram_z[k][v]).sum();
                // [2 t; t t^2-2n] [p; q] = [tr; trw], determinant = disc.
                let p = (tr * (t * t - q(2) * n) - t * trw) / disc;
                let qq = (q(2) * trw - t * tr) / disc;
                let h = self.order.elem(p, qq);
                let (gi, gj) = (self.basis_map[u].element, self.basis_map[v].element);
                out[i][j] = h / (gi * gj.conj());
            }
        }
        out
    }
}

/// JSON form of a field element: exact rational coordinates on `(1, w)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KJson {
    pub a: String,
    pub b: String,
}

impl From<&KNumber> for KJson {
    fn from(x: &KNumber) -> KJson {
        KJson { a: fmt_q(&x.a), b: fmt_q(&x.b) }
    }
}

impl KJson {
    pub fn to_k(&self, order: Order) -> Result<KNumber, Error> {
        let num = |s: &str| parse_q(s).ok_or_else(|| Error::Parse(format!("bad rational `{s}`")));
        Ok(order.elem(num(&self.a)?, num(&self.b)?))
    }
}

pub fn kmatrix_to_json(m: &KMatrix) -> Vec<Vec<KJson>> {
    m.iter().map(|r| r.iter().map(KJson::from).collect()).collect()
}

pub fn kmatrix_from_json(order: Order, m: &[Vec<KJson>]) -> Result<KMatrix, Error> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_k(order)).collect())
        .collect()
}

#[derive(Serialize, Deserialize)]
struct LatticeJson {
    disc: i64,
    rank: usize,
    ideals: Vec<[i128; 4]>,
    gram: Vec<Vec<KJson>>,
}

impl From<HermitianLattice> for LatticeJson {
    fn from(l: HermitianLattice) -> LatticeJson {
        LatticeJson {
            disc: l.order.disc(),
            rank: l.rank(),
            ideals: l
                .ideals
                .iter()
                .map(|a| {
                    let (d, x, y, z) = a.tuple();
                    [d, x, y, z]
                })
                .collect(),
            gram: kmatrix_to_json(&l.gram),
        }
    }
}

impl TryFrom<LatticeJson> for HermitianLattice {
    type Error = Error;
    fn try_from(j: LatticeJson) -> Result<HermitianLattice, Error> {
        let order = Order::new(j.disc)?;
        if j.ideals.len() != j.rank {
            return Err(Error::Parse(format!("rank {} but {} ideals", j.rank, j.ideals.len())));
        }
        let ideals = j
            .ideals
            .iter()
            .map(|t| FracIdeal::from_tuple(order, t[0], t[1], t[2], t[3]))
            .collect::<Result<Vec<_>, _>>()?;
        let gram = kmatrix_from_json(order, &j.gram)?;
        HermitianLattice::new(order, ideals, gram)
    }
}

/// Positive rational scalar matrix helper used by tests and examples.
pub fn diag(order: Order, entries: &[Q]) -> KMatrix {
    let n = entries.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { order.rational(entries[i]) } else { order.zero() })
                .collect()
        })
        .collect()
}
