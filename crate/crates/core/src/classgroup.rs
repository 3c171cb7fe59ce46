//! The ideal class group `Cl(R)`.

use std::collections::BTreeSet;

use num_integer::Integer;

use crate::arith::{isqrt, Q};
use crate::ideal::{primitive_ideals_of_norm, FracIdeal};
use crate::order::Order;

/// Index of an ideal class in its [`IdealClassGroup`]; `IdealClass(0)` is
/// the trivial class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdealClass(pub usize);

impl IdealClass {
    pub fn is_trivial(&self) -> bool {
        self.0 == 0
    }
}

#[derive(Clone, Debug)]
pub struct IdealClassGroup {
    order: Order,
    classes: Vec<FracIdeal>,
    table: Vec<Vec<usize>>,
    orders: Vec<u64>,
    generators: Vec<usize>,
    exponent: u64,
}

impl IdealClassGroup {
    /// Every class contains a primitive integral ideal of norm at most
    /// `floor(sqrt(|disc| / 3))` (the `a` of its reduced form), so those
    /// ideals, sorted by norm and grouped by principality of quotients, give
    /// one smallest-norm representative per class.
    pub fn new(order: Order) -> IdealClassGroup {
        let bound = isqrt(i128::from(order.disc().abs()) / 3);
        let mut classes: Vec<FracIdeal> = Vec::new();
        for m in 1..=bound.max(1) {
            for id in primitive_ideals_of_norm(order, m) {
                if !classes.iter().any(|c| id.div(c).is_principal()) {
                    classes.push(id);
                }
            }
        }
        let h = classes.len();
        let class_of = |x: &FracIdeal| {
            classes
                .iter()
                .position(|c| x.div(c).is_principal())
                .expect("every ideal lies in some class")
        };
        let table: Vec<Vec<usize>> = (0..h)
            .map(|i| (0..h).map(|j| class_of(&classes[i].mul(&classes[j]))).collect())
            .collect();
        let orders: Vec<u64> = (0..h)
            .map(|i| {
                let (mut k, mut acc) = (1u64, i);
                while acc != 0 {
                    acc = table[acc][i];
                    k += 1;
                }
                k
            })
            .collect();
        let exponent = orders.iter().fold(1u64, |a, b| a.lcm(b));
        let generators = minimal_generators(&table);
        IdealClassGroup { order, classes, table, orders, generators, exponent }
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn class_number(&self) -> usize {
        self.classes.len()
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Smallest-norm integral representative of each class, trivial class first.
    pub fn representatives(&self) -> &[FracIdeal] {
        &self.classes
    }

    pub fn rep(&self, c: IdealClass) -> FracIdeal {
        self.classes[c.0]
    }

    pub fn classes(&self) -> impl Iterator<Item = IdealClass> {
        (0..self.classes.len()).map(IdealClass)
    }

    /// A minimal generating set, as smallest-norm representatives.
    pub fn generators(&self) -> Vec<FracIdeal> {
        self.generators.iter().map(|i| self.classes[*i]).collect()
    }

    pub fn generator_classes(&self) -> Vec<IdealClass> {
        self.generators.iter().map(|i| IdealClass(*i)).collect()
    }

    pub fn class_of(&self, x: &FracIdeal) -> IdealClass {
        IdealClass(
            self.classes
                .iter()
                .position(|c| x.div(c).is_principal())
                .expect("every ideal lies in some class"),
        )
    }

    pub fn mul(&self, x: IdealClass, y: IdealClass) -> IdealClass {
        IdealClass(self.table[x.0][y.0])
    }

    pub fn pow(&self, x: IdealClass, k: u64) -> IdealClass {
        (0..k).fold(IdealClass(0), |acc, _| self.mul(acc, x))
    }

    pub fn inverse(&self, x: IdealClass) -> IdealClass {
        self.pow(x, self.orders[x.0] - 1)
    }

    pub fn element_order(&self, x: IdealClass) -> u64 {
        self.orders[x.0]
    }

    /// Composition table: `table()[i][j]` is the class of `rep(i) * rep(j)`.
    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn min_norm(&self, c: IdealClass) -> Q {
        self.classes[c.0].norm()
    }
}

fn closure(table: &[Vec<usize>], gens: &[usize]) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([0usize]);
    let mut frontier = vec![0usize];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = table[x][*g];
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    seen
}

/// Lexicographically first generating subset of minimum size.
fn minimal_generators(table: &[Vec<usize>]) -> Vec<usize> {
    let h = table.len();
    if h == 1 {
        return Vec::new();
    }
    for size in 1..h {
        let mut idx: Vec<usize> = (1..=size).collect();
        loop {
            if closure(table, &idx).len() == h {
                return idx;
            }
            // next combination of `size` elements from 1..h
            let mut i = size;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if idx[i] < h - size + i {
                    idx[i] += 1;
                    for j in (i + 1)..size {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
                if i == 0 {
                    i = usize::MAX;
                    break;
                }
            }
            if i == usize::MAX {
                break;
            }
        }
    }
    (1..h).collect()
}
