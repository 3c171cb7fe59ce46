//! Acceptance gate: one line per criterion, non-zero exit if any fails.
//!
//! Every count is compared exactly; the property suites run fixed sample
//! sizes from a fixed seed so the gate is reproducible.

mod common;

use std::collections::BTreeMap;
use std::time::Instant;

use common::*;
use hermlat::arith::q;
use hermlat::enumeration::{enumerate_unimodular, EnumConfig};
use hermlat::isometry::{decompose, is_indecomposable, Invariants, THETA_DEPTH};
use hermlat::kmat;
use hermlat::moduli::{
    conj_lattice, conj_matches_steinitz_action, enumerate_moduli_q, ideal_act, table_row, ActionSet,
};
use hermlat::pseudo::{ambient_zbasis, same_zspan};
use hermlat::{is_isometric, FracIdeal, HermitianLattice, IdealClassGroup, IsometryWitness};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Allowed difference between computed and expected counts.
const COUNT_TOLERANCE: usize = 0;
const SEED: u64 = 0x5eed_2024;
const IDEALS_PER_DISC: usize = 1000;
const RANDOM_LATTICES: usize = 200;
const MAX_TRACE_DET: i128 = 400;
const SHUFFLE_SEEDS: [u64; 3] = [1, 2, 3];

type Rows = &'static [(i64, [usize; 3])];

/// `(disc, [P, #A_RQ, #A_R])` for rank 2.
const G2_H1: Rows = &[
    (-3, [0, 0, 0]),
    (-4, [0, 0, 0]),
    (-7, [0, 0, 0]),
    (-8, [1, 1, 1]),
    (-11, [1, 1, 1]),
    (-19, [1, 1, 1]),
    (-43, [2, 2, 2]),
    (-67, [3, 3, 3]),
    (-163, [7, 7, 7]),
];
const G2_H2: Rows = &[
    (-15, [0, 1, 1]),
    (-20, [1, 1, 3]),
    (-24, [1, 3, 3]),
    (-35, [0, 1, 5]),
    (-40, [2, 4, 4]),
    (-51, [0, 2, 6]),
    (-52, [2, 3, 5]),
];
const G2_H4: Rows = &[(-84, [0, 2, 18])];
/// `(disc, [#A_RQ, #A_R^free, unused])` for rank 3.
const G3: Rows = &[
    (-3, [0, 0, 0]),
    (-4, [0, 0, 0]),
    (-7, [0, 0, 0]),
    (-8, [0, 0, 0]),
    (-11, [0, 0, 0]),
    (-19, [1, 1, 0]),
    (-43, [3, 5, 0]),
    (-67, [5, 13, 0]),
];

/// `(h_R, discriminants)` for every row of both count tables.
const CLASS_NUMBERS: &[(usize, &[i64])] = &[
    (1, &[-3, -4, -7, -8, -11, -19, -43, -67, -163]),
    (
        2,
        &[-15, -20, -24, -35, -40, -51, -52, -88, -91, -115, -123, -148, -187, -232, -235, -267, -403, -427],
    ),
    (3, &[-23, -31, -59, -83, -107, -139, -211, -283, -307, -331, -379, -499, -547, -643, -883, -907]),
    (
        4,
        &[
            -84, -120, -132, -168, -195, -228, -280, -312, -340, -372, -408, -435, -483, -520, -532, -555, -595,
            -627, -708, -715, -760, -795, -1012, -1435,
        ],
    ),
    (9, &[-4027]),
];

type Outcome = Result<String, String>;

fn close(a: usize, b: usize) -> bool {
    a.abs_diff(b) <= COUNT_TOLERANCE
}

fn table_rows(g: usize, rows: Rows) -> Outcome {
    let results: Vec<(i64, [usize; 3], [usize; 3])> = rows
        .par_iter()
        .map(|(d, want)| {
            let r = table_row(order(*d), g, &EnumConfig::default(), ActionSet::Generators).unwrap();
            assert!(r.complete);
            let got = match r.p {
                Some(p) => [p, r.count_q, r.count],
                None => [r.count_q, r.count, 0],
            };
            (*d, *want, got)
        })
        .collect();
    let bad: Vec<String> = results
        .iter()
        .filter(|(_, w, g)| !(0..3).all(|k| close(w[k], g[k])))
        .map(|(d, w, g)| {
            let k = if rows == G3 { 2 } else { 3 };
            format!("disc {d}: expected {:?}, got {:?}", &w[..k], &g[..k])
        })
        .collect();
    if bad.is_empty() {
        Ok(format!("{} rows exact", rows.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn class_numbers() -> Outcome {
    let mut bad = Vec::new();
    let mut n = 0;
    for (h, discs) in CLASS_NUMBERS {
        for d in *discs {
            n += 1;
            let got = IdealClassGroup::new(order(*d)).class_number();
            if got != *h {
                bad.push(format!("disc {d}: expected {h}, got {got}"));
            }
        }
    }
    if bad.is_empty() {
        Ok(format!("{n} discriminants"))
    } else {
        Err(bad.join("; "))
    }
}

fn check(ok: bool, what: impl Into<String>, bad: &mut Vec<String>) {
    if !ok && bad.len() < 10 {
        bad.push(what.into());
    }
}

fn ideal_suite() -> Outcome {
    let discs = [-3, -4, -7, -15, -23];
    let bad: Vec<String> = discs
        .par_iter()
        .flat_map(|d| {
            let o = order(*d);
            let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ d.unsigned_abs());
            let mut bad = Vec::new();
            let ideals: Vec<FracIdeal> = (0..IDEALS_PER_DISC).map(|_| ideal(&mut rng, o)).collect();
            for (k, a) in ideals.iter().enumerate() {
                let b = &ideals[(k * 7 + 3) % ideals.len()];
                check(a.mul(&a.conj()) == FracIdeal::rational(o, a.norm()), format!("a conj(a) for {a}"), &mut bad);
                check(a.mul(&b).norm() == a.norm() * b.norm(), format!("N({a} {b})"), &mut bad);
                check(a.mul(&a.inv()).is_unit(), format!("a a^-1 for {a}"), &mut bad);
                // The same module from a scrambled generating set.
                let [g1, g2] = a.zbasis();
                let x = element(&mut rng, o, 3);
                let gens = [g1 * q(3) + g2 * q(2), g1 + g2, g1 * x, g2 * x.conj()];
                let c = FracIdeal::from_zspan(o, &gens[..2]).unwrap();
                check(c == *a, format!("canonical form of {a}"), &mut bad);
                let s = FracIdeal::generated_by(o, &gens).unwrap();
                check(s == *a, format!("R-span of generators of {a}"), &mut bad);
                let same_set = a.is_subset_of(b) && b.is_subset_of(a);
                check(same_set == (a.tuple() == b.tuple()), format!("set equality {a} {b}"), &mut bad);
            }
            bad
        })
        .collect();
    if bad.is_empty() {
        Ok(format!("{} ideals", discs.len() * IDEALS_PER_DISC))
    } else {
        Err(bad.join("; "))
    }
}

/// `a L^#` as Z-module in the ambient coordinates of `l`.
fn scaled_dual_zbasis(l: &HermitianLattice, a: &FracIdeal) -> Vec<Vec<hermlat::KNumber>> {
    let d = l.dual();
    let scaled = HermitianLattice::new(l.order(), d.ideals().iter().map(|x| a.mul(x)).collect(), d.gram().clone())
        .unwrap();
    let p = kmat::inverse(l.gram()).unwrap();
    ambient_zbasis(&scaled, &p)
}

fn lattice_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let discs = [-3, -4, -7, -8, -15, -20, -23, -84];
    let mut pool: Vec<HermitianLattice> = Vec::new();
    while pool.len() < RANDOM_LATTICES {
        let o = order(discs[pool.len() % discs.len()]);
        let g = 1 + pool.len() % 3;
        let l = match pool.len() % 4 {
            0 | 1 => lattice(&mut rng, o, g),
            _ => modular_lattice(&mut rng, o, g),
        };
        pool.push(l);
    }
    for (d, g) in [(-15, 2), (-20, 2), (-7, 3), (-23, 1)] {
        for l in unimodular_classes(d, g, false) {
            pool.push(rebased(&mut rng, &l));
        }
    }
    let (mut unimodular, mut modular) = (0, 0);
    let mut bad = Vec::new();
    for l in &pool {
        let o = l.order();
        let r = FracIdeal::unit(o);
        check(l.dual().dual() == *l, format!("dual involution {}", l.text()), &mut bad);
        let self_dual = same_zspan(&scaled_dual_zbasis(l, &r), &l.zbasis());
        let crit = l.is_integral() && l.volume() == r;
        check(l.is_unimodular() == self_dual && self_dual == crit, format!("unimodular {}", l.text()), &mut bad);
        unimodular += l.is_unimodular() as usize;
        let s = l.scale();
        let modular_by_def = same_zspan(&scaled_dual_zbasis(l, &s), &l.zbasis());
        check(l.is_modular(&s) == modular_by_def, format!("modularity {}", l.text()), &mut bad);
        let g = l.rank() as u32;
        let t = l.trace_lattice();
        let norms: hermlat::arith::Q = l.ideals().iter().map(|a| a.norm()).product();
        let det_g = kmat::det(l.gram()).a;
        let want = q(o.disc().unsigned_abs() as i128).pow(g as i32) * norms * norms * det_g * det_g;
        check(t.det() == want && rat_det(&ZForm::new(l).gram) == want, format!("trace det {}", l.text()), &mut bad);
        check(t.hermitian_gram() == *l.gram(), format!("trace round trip {}", l.text()), &mut bad);
        if l.is_modular(&s) && l.is_integral() {
            modular += 1;
            let nv = l.volume().norm();
            check(q(l.polarization_degree().unwrap()) == nv, format!("degree {}", l.text()), &mut bad);
        }
        let v = l.volume();
        let vd = l.dual().volume();
        check(vd == v.conj().inv(), format!("dual volume {}", l.text()), &mut bad);
    }
    if modular < 50 || unimodular < 20 {
        bad.push(format!("pool too thin: {modular} modular, {unimodular} unimodular"));
    }
    if bad.is_empty() {
        Ok(format!("{} lattices, {modular} modular, {unimodular} unimodular", pool.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn isometry_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let pool = small_pool(&mut rng, &[-3, -4, -7, -8, -15, -20], MAX_TRACE_DET);
    let pairs: Vec<(usize, usize)> = (0..pool.len())
        .flat_map(|i| (i..pool.len()).map(move |j| (i, j)))
        .filter(|(i, j)| pool[*i].order() == pool[*j].order())
        .collect();
    let results: Vec<(usize, usize, Option<IsometryWitness>, bool)> = pairs
        .par_iter()
        .map(|(i, j)| (*i, *j, is_isometric(&pool[*i], &pool[*j]).ok(), brute_isometric(&pool[*i], &pool[*j])))
        .collect();
    let mut bad = Vec::new();
    let mut iso: BTreeMap<(usize, usize), IsometryWitness> = BTreeMap::new();
    let mut positives = 0;
    for (i, j, w, oracle) in results {
        let (a, b) = (&pool[i], &pool[j]);
        check(w.is_some() == oracle, format!("oracle disagrees on {} vs {}", a.text(), b.text()), &mut bad);
        if let Some(w) = w {
            positives += (i != j) as usize;
            check(w.verify(a, b), format!("witness {} -> {}", a.text(), b.text()), &mut bad);
            check(w.inverse().verify(b, a), format!("inverse witness {}", b.text()), &mut bad);
            check(is_isometric(b, a).is_ok(), format!("symmetry {}", b.text()), &mut bad);
            let (ia, ib) = (Invariants::with_depth(a, THETA_DEPTH), Invariants::with_depth(b, THETA_DEPTH));
            check(ia.separation(&ib).is_none(), format!("invariants {}", a.text()), &mut bad);
            if a.is_integral() {
                check(a.polarization_degree() == b.polarization_degree(), format!("degree {}", a.text()), &mut bad);
            }
            iso.insert((i, j), w.clone());
            iso.insert((j, i), w.inverse());
        }
    }
    for i in 0..pool.len() {
        check(iso.contains_key(&(i, i)), format!("reflexivity {}", pool[i].text()), &mut bad);
    }
    let mut triples = 0;
    for (&(i, j), w1) in &iso {
        for (&(j2, k), w2) in iso.range((j, 0)..(j + 1, 0)) {
            debug_assert_eq!(j, j2);
            triples += 1;
            check(iso.contains_key(&(i, k)), format!("transitivity {i} {j} {k}"), &mut bad);
            check(w1.then(w2).verify(&pool[i], &pool[k]), format!("composed witness {i} {j} {k}"), &mut bad);
        }
    }
    if positives < 25 {
        bad.push(format!("only {positives} isometric pairs in the pool"));
    }
    if bad.is_empty() {
        Ok(format!("{} lattices, {} pairs, {positives} isometric, {triples} compositions", pool.len(), pairs.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn galois_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut bad = Vec::new();
    let mut pool: Vec<HermitianLattice> = Vec::new();
    for (d, g, free) in [(-15, 2, false), (-20, 2, false), (-24, 2, false), (-84, 2, false), (-23, 3, true), (-23, 2, false)] {
        pool.extend(unimodular_classes(d, g, free));
    }
    for l in &pool {
        let o = l.order();
        let cg = IdealClassGroup::new(o);
        let g = l.rank() as i64;
        let (a, b) = (small_ideal(&mut rng, o), cg.representatives()[cg.class_number() - 1]);
        let ab = ideal_act(&a.mul(&b), l);
        let a_b = ideal_act(&a, &ideal_act(&b, l));
        check(is_isometric(&ab, &a_b).is_ok(), format!("action of ab on {}", l.text()), &mut bad);
        let lam = element(&mut rng, o, 3);
        let pl = ideal_act(&FracIdeal::principal(lam), l);
        let scalar = IsometryWitness { matrix: kmat::scale(&kmat::identity(o, l.rank()), &lam) };
        check(scalar.verify(l, &pl), format!("scalar witness on {}", l.text()), &mut bad);
        check(is_isometric(l, &pl).is_ok(), format!("principal action on {}", l.text()), &mut bad);
        for x in [&a, &b] {
            let al = ideal_act(x, l);
            let want = cg.mul(cg.pow(cg.class_of(x), g as u64), l.steinitz(&cg));
            check(al.steinitz(&cg) == want, format!("st(aL) for {}", l.text()), &mut bad);
            check(al.is_unimodular() && al.is_integral(), format!("aL unimodular {}", l.text()), &mut bad);
            check(is_indecomposable(&al) == is_indecomposable(l), format!("aL indecomposable {}", l.text()), &mut bad);
            check(al.polarization_degree() == l.polarization_degree(), format!("aL degree {}", l.text()), &mut bad);
        }
        let c = conj_lattice(l);
        check(conj_lattice(&c) == *l, format!("conj involution {}", l.text()), &mut bad);
        check(c.is_unimodular(), format!("conj unimodular {}", l.text()), &mut bad);
        check(decompose(&c).len() == decompose(l).len(), format!("conj decomposition {}", l.text()), &mut bad);
        check(
            c.steinitz(&cg) == cg.class_of(&l.steinitz_ideal().conj()),
            format!("st(conj L) {}", l.text()),
            &mut bad,
        );
    }
    let mut prop = 0;
    for d in [-15, -20, -24] {
        for l in unimodular_classes(d, 2, false) {
            prop += 1;
            check(conj_matches_steinitz_action(&l), format!("conjugation vs Steinitz action {}", l.text()), &mut bad);
        }
    }
    if bad.is_empty() {
        Ok(format!("{} lattices, {prop} rank-2 classes for the conjugation shortcut", pool.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn robustness_suite() -> Outcome {
    let discs: Vec<i64> = G2_H1.iter().chain(G2_H2).map(|(d, _)| *d).collect();
    let bad: Vec<String> = discs
        .par_iter()
        .flat_map(|d| {
            let o = order(*d);
            let verdicts = |cfg: &EnumConfig, set| -> BTreeMap<String, bool> {
                let run = enumerate_moduli_q(o, 2, cfg, set).unwrap();
                assert!(run.complete());
                run.reports.iter().map(|r| (r.lattice.text(), r.verdict)).collect()
            };
            let base = verdicts(&EnumConfig::default(), ActionSet::Generators);
            let classes = enumerate_unimodular(o, 2, &EnumConfig::default()).unwrap().reps;
            let mut bad = Vec::new();
            if verdicts(&EnumConfig::default(), ActionSet::AllClasses) != base {
                bad.push(format!("disc {d}: full class list changes verdicts"));
            }
            for s in SHUFFLE_SEEDS {
                let cfg = EnumConfig { seed: Some(s), ..Default::default() };
                if verdicts(&cfg, ActionSet::Generators) != base {
                    bad.push(format!("disc {d}: seed {s} changes verdicts"));
                }
                if enumerate_unimodular(o, 2, &cfg).unwrap().reps != classes {
                    bad.push(format!("disc {d}: seed {s} changes the class list"));
                }
            }
            bad
        })
        .collect();
    if bad.is_empty() {
        Ok(format!("{} discriminants, {} seeds", discs.len(), SHUFFLE_SEEDS.len()))
    } else {
        Err(bad.join("; "))
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("rank 2, class number 1 rows", || table_rows(2, G2_H1)),
        ("rank 2, class number 2 rows", || table_rows(2, G2_H2)),
        ("rank 2, class number 4 row", || table_rows(2, G2_H4)),
        ("rank 3 rows", || table_rows(3, G3)),
        ("class numbers", class_numbers),
        ("ideal algebra", ideal_suite),
        ("lattice invariants", lattice_suite),
        ("isometry relation", isometry_suite),
        ("Galois action", galois_suite),
        ("enumeration robustness", robustness_suite),
    ];
    // ACCEPTANCE_ONLY=4,8 runs a subset.
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failed = Vec::new();
    for (k, (name, f)) in criteria.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(k + 1))) {
            continue;
        }
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} ({secs:.1}s)", k + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name}: {detail} ({secs:.1}s)", k + 1);
                failed.push(k + 1);
            }
        }
    }
    if !failed.is_empty() {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
