//! Enumeration of unimodular hermitian lattices of rank 1 to 3, one per
//! isometry class.
//!
//! Every lattice has a pseudo-basis `L = c_1^{-1} x_1 + ... + c_g^{-1} x_g`
//! chosen greedily: `x_1` spans a line minimizing the line invariant
//! `d(l) = N(b) H(x, x)` (for `l = b x`), and each later `x_i` does the same
//! in the projection of `L` orthogonal to the earlier ones. Rescaling `x_i`
//! makes `c_i` any fixed integral representative of its class. With
//! Gram-Schmidt data `G_ij = sum_k mu_ik conj(mu_jk) q_k`, `d_i = q_i / N(c_i)`:
//!
//! - integrality: `G_ij` in `c_i conj(c_j)`, `G_ii` in `N(c_i) Z`;
//! - unimodularity: `prod d_i = 1`;
//! - size reduction: `mu_ij` may be moved by `c_j^{-1} c_i`, so it lies in
//!   the closed Voronoi cell of that lattice;
//! - `d_i` is at most the minimum of the projected lattice of rank `r`, whose
//!   trace form has determinant `|disc|^r Q_i^2` with `Q_i = prod_{k<i} 1/d_k`,
//!   so `(2 d_i)^{2r} <= gamma_{2r}^{2r} |disc|^r Q_i^2`;
//! - no vector of a projected partial lattice has norm below its `d_j`.
//!
//! The search box is therefore finite and contains every class; duplicates
//! are removed by isometry testing inside buckets of equal invariants.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{ceil, pow, q, qf, Q};
use crate::classgroup::IdealClassGroup;
use crate::ideal::FracIdeal;
use crate::isometry::{is_indecomposable, is_isometric_with, Invariants};
use crate::kmat::KMatrix;
use crate::lattice::HermitianLattice;
use crate::order::{KNumber, Order};
use crate::zlattice::{close_vectors, has_vector_below, RatMatrix};
use crate::Error;

/// `gamma_{2r}^{2r}` for trace-lattice ranks 2, 4 and 6.
fn hermite_power(r: usize) -> Q {
    match r {
        1 => qf(4, 3),
        2 => q(4),
        3 => qf(64, 3),
        _ => unreachable!("rank is at most 3"),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumConfig {
    pub free_only: bool,
    pub indecomposable_only: bool,
    /// Cap on complete Gram candidates.
    pub max_candidates: Option<u64>,
    pub max_seconds: Option<u64>,
    /// Shuffles the candidate stream before deduplication.
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumStats {
    /// Search-tree nodes visited.
    pub nodes: u64,
    /// Complete Gram matrices produced.
    pub candidates: u64,
    /// Pairwise isometry searches run during deduplication.
    pub isometry_tests: u64,
    /// Classes before the indecomposability filter.
    pub classes_total: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassList {
    pub disc: i64,
    pub rank: usize,
    pub free_only: bool,
    pub indecomposable_only: bool,
    /// False when a resource cap stopped the search early.
    pub complete: bool,
    pub reps: Vec<HermitianLattice>,
    pub stats: EnumStats,
}

impl ClassList {
    pub fn order(&self) -> Order {
        Order::new(self.disc).expect("class lists are built from valid orders")
    }
}

struct Limits {
    max_candidates: Option<u64>,
    deadline: Option<Instant>,
}

/// Closed Voronoi cell of a rank-2 lattice in `K`.
struct Cell {
    /// Upper bound for the squared covering radius.
    radius: Q,
    relevant: Vec<KNumber>,
}

impl Cell {
    fn new(lat: &FracIdeal) -> Cell {
        let [g1, g2] = lat.zbasis();
        // Any point is within half a basis step of a lattice point in each direction.
        let radius = (g1.norm() + g2.norm()) / q(2);
        let gram = norm_gram(lat);
        let zero = [Q::zero(), Q::zero()];
        let relevant = close_vectors(&gram, &zero, &(radius * q(4)))
            .into_iter()
            .filter(|v| v.iter().any(|x| *x != 0))
            .map(|v| g1 * q(v[0]) + g2 * q(v[1]))
            .collect();
        Cell { radius, relevant }
    }

    fn contains(&self, x: &KNumber) -> bool {
        let n = x.norm();
        self.relevant.iter().all(|l| n <= (*x - *l).norm())
    }
}

/// Gram of the norm form on the Z-basis of an ideal.
fn norm_gram(a: &FracIdeal) -> RatMatrix {
    let b = a.zbasis();
    (0..2)
        .map(|i| (0..2).map(|j| (b[i] * b[j].conj()).trace() / q(2)).collect())
        .collect()
}

struct Searcher<'a> {
    order: Order,
    g: usize,
    disc_abs: Q,
    nc: Vec<Q>,
    b: Vec<FracIdeal>,
    /// `c_i conj(c_j)` for `j < i`, with the Voronoi cell of `c_j^{-1} c_i`.
    off: Vec<Vec<Option<(FracIdeal, RatMatrix, Cell)>>>,
    mu: Vec<Vec<KNumber>>,
    q: Vec<Q>,
    d: Vec<Q>,
    gram: KMatrix,
    limits: &'a Limits,
    stats: EnumStats,
    out: Vec<HermitianLattice>,
    aborted: bool,
}

impl<'a> Searcher<'a> {
    fn new(order: Order, c: &[FracIdeal], limits: &'a Limits) -> Searcher<'a> {
        let g = c.len();
        let off = (0..g)
            .map(|i| {
                (0..g)
                    .map(|j| {
                        (j < i).then(|| {
                            let jid = c[i].mul(&c[j].conj());
                            let gram = norm_gram(&jid);
                            (jid, gram, Cell::new(&c[i].div(&c[j])))
                        })
                    })
                    .collect()
            })
            .collect();
        let mut mu = vec![vec![order.zero(); g]; g];
        for (i, row) in mu.iter_mut().enumerate() {
            row[i] = order.one();
        }
        Searcher {
            order,
            g,
            disc_abs: q(order.disc().abs() as i128),
            nc: c.iter().map(|x| x.norm()).collect(),
            b: c.iter().map(|x| x.inv()).collect(),
            off,
            mu,
            q: vec![Q::zero(); g],
            d: vec![Q::zero(); g],
            gram: vec![vec![order.zero(); g]; g],
            limits,
            stats: EnumStats::default(),
            out: Vec::new(),
            aborted: false,
        }
    }

    fn over_limits(&mut self) -> bool {
        if let Some(m) = self.limits.max_candidates {
            if self.stats.candidates >= m {
                self.aborted = true;
            }
        }
        if self.stats.nodes % 256 == 0 {
            if let Some(t) = self.limits.deadline {
                if Instant::now() >= t {
                    self.aborted = true;
                }
            }
        }
        self.aborted
    }

    fn level(&mut self, i: usize) {
        if self.aborted {
            return;
        }
        if i == self.g {
            let l = HermitianLattice::new_unchecked(self.order, self.b.clone(), self.gram.clone());
            debug_assert!(l.is_unimodular());
            self.stats.candidates += 1;
            self.out.push(l);
            return;
        }
        self.offdiag(i, 0);
    }

    fn offdiag(&mut self, i: usize, j: usize) {
        if j == i {
            self.diag(i);
            return;
        }
        let mut s = self.order.zero();
        for k in 0..j {
            s += self.mu[i][k] * self.mu[j][k].conj() * self.q[k];
        }
        let qj = self.q[j];
        let (points, cell_ok): (Vec<KNumber>, Vec<bool>) = {
            let (jid, gram, cell) = self.off[i][j].as_ref().expect("j < i");
            let (c1, c2) = jid.rational_coords(&s);
            let [e1, e2] = jid.zbasis();
            let pts: Vec<KNumber> = close_vectors(gram, &[c1, c2], &(qj * qj * cell.radius))
                .into_iter()
                .map(|v| e1 * q(v[0]) + e2 * q(v[1]))
                .collect();
            let ok = pts.iter().map(|x| cell.contains(&((*x - s) * (Q::one() / qj)))).collect();
            (pts, ok)
        };
        for (gij, ok) in points.into_iter().zip(cell_ok) {
            if !ok {
                continue;
            }
            self.mu[i][j] = (gij - s) * (Q::one() / qj);
            self.gram[i][j] = gij;
            self.gram[j][i] = gij.conj();
            self.offdiag(i, j + 1);
            if self.aborted {
                return;
            }
        }
    }

    fn diag(&mut self, i: usize) {
        let s: Q = (0..i).map(|k| self.mu[i][k].norm() * self.q[k]).sum();
        let big_q: Q = Q::one() / (0..i).map(|k| self.d[k]).product::<Q>();
        let r = self.g - i;
        let nc = self.nc[i];
        if i == self.g - 1 {
            let gii = big_q * nc + s;
            if (gii / nc).is_integer() {
                self.try_diag(i, gii, s);
            }
            return;
        }
        let limit = hermite_power(r) * pow(&self.disc_abs, r as u32) * big_q * big_q;
        let mut k = ceil(&(s / nc)).max(1);
        loop {
            let gii = q(k) * nc;
            k += 1;
            if gii <= s {
                continue;
            }
            let d = (gii - s) / nc;
            if pow(&(d * q(2)), 2 * r as u32) > limit {
                break;
            }
            self.try_diag(i, gii, s);
            if self.aborted {
                return;
            }
        }
    }

    fn try_diag(&mut self, i: usize, gii: Q, s: Q) {
        self.stats.nodes += 1;
        if self.over_limits() {
            return;
        }
        self.q[i] = gii - s;
        self.d[i] = self.q[i] / self.nc[i];
        self.gram[i][i] = self.order.rational(gii);
        if self.projections_ok(i) {
            self.level(i + 1);
        }
    }

    /// No vector of the projection of `b_0 x_0 + ... + b_i x_i` orthogonal to
    /// `x_0, ..., x_{j-1}` has norm below `d_j`.
    fn projections_ok(&self, i: usize) -> bool {
        (0..i).all(|j| {
            let idx: Vec<usize> = (j..=i).collect();
            let gram: KMatrix = idx
                .iter()
                .map(|&a| {
                    idx.iter()
                        .map(|&b| {
                            (j..=a.min(b)).fold(self.order.zero(), |acc, k| {
                                acc + self.mu[a][k] * self.mu[b][k].conj() * self.q[k]
                            })
                        })
                        .collect()
                })
                .collect();
            let ideals = idx.iter().map(|&a| self.b[a]).collect();
            let l = HermitianLattice::new_unchecked(self.order, ideals, gram);
            !has_vector_below(&l.trace_lattice().gram_z, &(self.d[j] * q(2)))
        })
    }
}

/// Raw candidate stream: unimodular lattices covering every class of rank `g`
/// (with trivial Steinitz class when `free_only`), with repetitions.
pub fn candidates(
    order: Order,
    g: usize,
    free_only: bool,
    max_candidates: Option<u64>,
    deadline: Option<Instant>,
) -> Result<(Vec<HermitianLattice>, EnumStats, bool), Error> {
    if !(1..=3).contains(&g) {
        return Err(Error::Rank(g));
    }
    let cg = IdealClassGroup::new(order);
    let reps = cg.representatives();
    let limits = Limits { max_candidates, deadline };
    let mut tuples: Vec<Vec<FracIdeal>> = vec![Vec::new()];
    for _ in 0..g {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                reps.iter().map(move |c| {
                    let mut t = t.clone();
                    t.push(*c);
                    t
                })
            })
            .collect();
    }
    if free_only {
        tuples.retain(|t| t.iter().fold(FracIdeal::unit(order), |a, c| a.mul(c)).is_principal());
    }
    let mut out = Vec::new();
    let mut stats = EnumStats::default();
    let mut complete = true;
    for t in &tuples {
        let mut s = Searcher::new(order, t, &limits);
        s.stats.candidates = stats.candidates;
        s.level(0);
        stats.nodes += s.stats.nodes;
        stats.candidates = s.stats.candidates;
        out.append(&mut s.out);
        if s.aborted {
            complete = false;
            break;
        }
    }
    Ok((out, stats, complete))
}

/// One representative per isometry class of unimodular lattices of rank `g`.
///
/// Each class is represented by its member with the smallest JSON text among
/// the candidates, so the output does not depend on the candidate order.
pub fn enumerate_unimodular(order: Order, g: usize, cfg: &EnumConfig) -> Result<ClassList, Error> {
    let deadline = cfg.max_seconds.map(|s| Instant::now() + Duration::from_secs(s));
    let (mut cands, mut stats, complete) = candidates(order, g, cfg.free_only, cfg.max_candidates, deadline)?;
    if let Some(seed) = cfg.seed {
        cands.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let cg = IdealClassGroup::new(order);
    let keyed: Vec<(InvKey, Invariants, HermitianLattice)> = cands
        .into_par_iter()
        .map(|l| {
            let inv = Invariants::new(&l);
            let key = InvKey {
                steinitz: cg.class_of(&inv.steinitz).0,
                trace_det: inv.trace_det,
                theta: inv.theta.clone(),
            };
            (key, inv, l)
        })
        .collect();
    let mut buckets: BTreeMap<InvKey, Vec<(Invariants, HermitianLattice)>> = BTreeMap::new();
    for (k, inv, l) in keyed {
        buckets.entry(k).or_default().push((inv, l));
    }
    let results: Vec<(Vec<HermitianLattice>, u64)> = buckets
        .into_values()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(dedup_bucket)
        .collect();
    let mut reps: Vec<HermitianLattice> = Vec::new();
    for (r, tests) in results {
        stats.isometry_tests += tests;
        reps.extend(r);
    }
    stats.classes_total = reps.len() as u64;
    if cfg.indecomposable_only {
        reps = reps.into_par_iter().filter(is_indecomposable).collect();
    }
    reps.sort_by_cached_key(|l| l.text());
    Ok(ClassList {
        disc: order.disc(),
        rank: g,
        free_only: cfg.free_only,
        indecomposable_only: cfg.indecomposable_only,
        complete,
        reps,
        stats,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct InvKey {
    steinitz: usize,
    trace_det: Q,
    theta: Vec<(Q, usize)>,
}

fn dedup_bucket(items: Vec<(Invariants, HermitianLattice)>) -> (Vec<HermitianLattice>, u64) {
    let mut reps: Vec<(Invariants, HermitianLattice, String)> = Vec::new();
    let mut tests = 0u64;
    for (inv, l) in items {
        let text = l.text();
        let mut found = None;
        for (k, (rinv, rl, rtext)) in reps.iter().enumerate() {
            if *rtext == text {
                found = Some(k);
                break;
            }
            tests += 1;
            if is_isometric_with(&l, &inv, rl, rinv).is_ok() {
                found = Some(k);
                break;
            }
        }
        match found {
            Some(k) => {
                if text < reps[k].2 {
                    reps[k] = (inv, l, text);
                }
            }
            None => reps.push((inv, l, text)),
        }
    }
    (reps.into_iter().map(|(_, l, _)| l).collect(), tests)
}

/// The sublist of indecomposable classes.
pub fn filter_indecomposable(list: &ClassList) -> ClassList {
    let mut out = list.clone();
    out.reps = list.reps.par_iter().filter(|l| is_indecomposable(l)).cloned().collect();
    out.indecomposable_only = true;
    out
}
