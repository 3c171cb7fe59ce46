//! Galois action on hermitian lattices and the field-of-moduli-`Q` test.
//!
//! An automorphism of `Qbar/K` acts on the class of `(L, H)` through an
//! ideal class `a` as `(aL, H / N(a))`; complex conjugation acts as
//! `(conj L, conj H)`. The polarized variety has field of moduli `Q` exactly
//! when its lattice is isometric to all of these images, and since the
//! action factors through `Cl(R)` it suffices to test generators.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classgroup::IdealClassGroup;
use crate::enumeration::{enumerate_unimodular, ClassList, EnumConfig};
use crate::ideal::FracIdeal;
use crate::isometry::{is_isometric, Separation};
use crate::lattice::{HermitianLattice, KJson};
use crate::order::Order;
use crate::Error;

/// `(aL, H / N(a))`.
pub fn ideal_act(a: &FracIdeal, l: &HermitianLattice) -> HermitianLattice {
    l.ideal_act(a)
}

/// `(conj L, conj H)`.
pub fn conj_lattice(l: &HermitianLattice) -> HermitianLattice {
    l.conj()
}

/// Necessary conditions for field of moduli `Q`, checked before any search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prechecks {
    /// The class group exponent divides `g`.
    pub exponent_ok: bool,
    /// The Steinitz class has order at most 2.
    pub steinitz_order_ok: bool,
    /// For odd `g` the lattice is free.
    pub odd_g_free_ok: bool,
}

impl Prechecks {
    pub fn ok(&self) -> bool {
        self.exponent_ok && self.steinitz_order_ok && self.odd_g_free_ok
    }

    /// Why the prechecks fail, if they do.
    pub fn reason(&self) -> Option<&'static str> {
        if !self.exponent_ok {
            Some("class group exponent does not divide the rank")
        } else if !self.steinitz_order_ok {
            Some("Steinitz class has order greater than 2")
        } else if !self.odd_g_free_ok {
            Some("odd rank and the lattice is not free")
        } else {
            None
        }
    }
}

pub fn moduli_precheck(cg: &IdealClassGroup, l: &HermitianLattice) -> Prechecks {
    let g = l.rank() as u64;
    let st = l.steinitz(cg);
    Prechecks {
        exponent_ok: g % cg.exponent() == 0,
        steinitz_order_ok: cg.element_order(st) <= 2,
        odd_g_free_ok: g % 2 == 0 || st.is_trivial(),
    }
}

/// Which ideals the Galois test runs over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionSet {
    /// A minimal generating set of the class group.
    #[default]
    Generators,
    /// One ideal per class, the trivial class included.
    AllClasses,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    /// `ideal:[d|a,b,c]` or `conj`.
    pub action: String,
    pub isometric: bool,
    /// Maps the lattice onto its image.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Vec<Vec<KJson>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub separation: Option<Separation>,
}

impl Check {
    fn run(action: String, l: &HermitianLattice, image: &HermitianLattice) -> Check {
        match is_isometric(l, image) {
            Ok(w) => {
                debug_assert!(w.verify(l, image));
                Check { action, isometric: true, witness: Some(w.to_json()), separation: None }
            }
            Err(s) => Check { action, isometric: false, witness: None, separation: Some(s) },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuliReport {
    pub lattice: HermitianLattice,
    /// Field of moduli is `Q`.
    pub verdict: bool,
    pub prechecks: Prechecks,
    /// Empty when a precheck failed.
    pub checks: Vec<Check>,
}

/// Field-of-moduli verdict for one unimodular lattice.
pub fn has_field_of_moduli_q(cg: &IdealClassGroup, l: &HermitianLattice, set: ActionSet) -> ModuliReport {
    let prechecks = moduli_precheck(cg, l);
    if !prechecks.ok() {
        return ModuliReport { lattice: l.clone(), verdict: false, prechecks, checks: Vec::new() };
    }
    let ideals = match set {
        ActionSet::Generators => cg.generators(),
        ActionSet::AllClasses => cg.representatives().to_vec(),
    };
    let mut checks: Vec<Check> = ideals
        .iter()
        .map(|a| Check::run(format!("ideal:{}", a.text()), l, &ideal_act(a, l)))
        .collect();
    checks.push(Check::run("conj".into(), l, &conj_lattice(l)));
    let verdict = checks.iter().all(|c| c.isometric);
    ModuliReport { lattice: l.clone(), verdict, prechecks, checks }
}

/// Rank-2 shortcut: `conj L` is isometric to `conj(s) L` for a Steinitz
/// ideal `s` of `L`. Returns whether both checks agree.
pub fn conj_matches_steinitz_action(l: &HermitianLattice) -> bool {
    let s = l.steinitz_ideal().conj();
    let by_conj = is_isometric(l, &conj_lattice(l)).is_ok();
    let by_ideal = is_isometric(l, &ideal_act(&s, l)).is_ok();
    let direct = is_isometric(&conj_lattice(l), &ideal_act(&s, l)).is_ok();
    direct && by_conj == by_ideal
}

/// Enumeration followed by the Galois test on every indecomposable class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuliRun {
    /// Indecomposable unimodular classes (free ones only for odd rank).
    pub classes: ClassList,
    /// One report per class, in the order of `classes.reps`.
    pub reports: Vec<ModuliReport>,
}

impl ModuliRun {
    pub fn complete(&self) -> bool {
        self.classes.complete
    }

    pub fn count_q(&self) -> usize {
        self.reports.iter().filter(|r| r.verdict).count()
    }

    /// Field-of-moduli-`Q` classes on a free module (`A = E^g`).
    pub fn count_q_free(&self) -> usize {
        self.reports.iter().filter(|r| r.verdict && r.lattice.is_free()).count()
    }
}

pub fn enumerate_moduli_q(order: Order, g: usize, cfg: &EnumConfig, set: ActionSet) -> Result<ModuliRun, Error> {
    let mut cfg = cfg.clone();
    cfg.indecomposable_only = true;
    // Odd rank forces a free lattice.
    cfg.free_only |= g % 2 == 1;
    let classes = enumerate_unimodular(order, g, &cfg)?;
    let cg = IdealClassGroup::new(order);
    let reports = classes
        .reps
        .par_iter()
        .map(|l| has_field_of_moduli_q(&cg, l, set))
        .collect();
    Ok(ModuliRun { classes, reports })
}

/// One row of the count tables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub class_number: usize,
    pub disc: i64,
    pub g: usize,
    /// Field-of-moduli-`Q` classes with `A = E^g`; reported for even rank.
    pub p: Option<usize>,
    pub count_q: usize,
    /// All indecomposable classes for even rank, free ones for odd rank.
    pub count: usize,
    pub complete: bool,
}

pub fn table_row(order: Order, g: usize, cfg: &EnumConfig, set: ActionSet) -> Result<TableRow, Error> {
    let run = enumerate_moduli_q(order, g, cfg, set)?;
    Ok(TableRow {
        class_number: IdealClassGroup::new(order).class_number(),
        disc: order.disc(),
        g,
        p: (g % 2 == 0).then(|| run.count_q_free()),
        count_q: run.count_q(),
        count: run.classes.reps.len(),
        complete: run.complete(),
    })
}
