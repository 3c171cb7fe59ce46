//! Fractional ideals of a maximal imaginary quadratic order.
//!
//! An ideal is stored as `(Z*a + Z*(b + c*w)) / den` in column Hermite normal
//! form over the basis `(1, w)`: `a, c > 0`, `0 <= b < a`, `c | a`, `c | b`
//! and `gcd(a, b, c, den) = 1`. Two ideals are equal as sets exactly when
//! their tuples are equal, so the derived `Eq`/`Hash` are set equality.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{gcd_all, lcm_denoms, q, Q};
use crate::order::{KNumber, Order};
use crate::zlattice::{hnf, hnf_with_transform};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FracIdeal {
    order: Order,
    den: i128,
    a: i128,
    b: i128,
    c: i128,
}

impl PartialOrd for FracIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FracIdeal {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        (self.norm(), self.den, self.a, self.c, self.b).cmp(&(o.norm(), o.den, o.a, o.c, o.b))
    }
}

impl FracIdeal {
    /// The unit ideal `R`.
    pub fn unit(order: Order) -> FracIdeal {
        FracIdeal { order, den: 1, a: 1, b: 0, c: 1 }
    }

    pub fn principal(x: KNumber) -> FracIdeal {
        FracIdeal::generated_by(x.order(), &[x]).expect("principal ideal of a nonzero element")
    }

    pub fn rational(order: Order, x: Q) -> FracIdeal {
        FracIdeal::principal(order.rational(x))
    }

    /// The ideal generated over `R` by `gens`. Fails if all generators are zero.
    pub fn generated_by(order: Order, gens: &[KNumber]) -> Result<FracIdeal, Error> {
        let w = order.omega();
        let zgens: Vec<KNumber> = gens.iter().flat_map(|g| [*g, *g * w]).collect();
        FracIdeal::from_zspan(order, &zgens)
    }

    /// The ideal whose underlying Z-module is spanned by `gens`; the span must
    /// already be stable under multiplication by `w`.
    pub fn from_zspan(order: Order, gens: &[KNumber]) -> Result<FracIdeal, Error> {
        let d = lcm_denoms(gens.iter().flat_map(|g| [&g.a, &g.b]));
        let rows: Vec<Vec<i128>> = gens
            .iter()
            .map(|g| vec![(g.b * q(d)).to_integer(), (g.a * q(d)).to_integer()])
            .collect();
        let h = hnf(&rows);
        if h.len() != 2 {
            return Err(Error::ZeroIdeal);
        }
        // Rows are (c, b) and (0, a).
        let (c, b, a) = (h[0][0], h[0][1], h[1][1]);
        let id = FracIdeal::normalized(order, d, a, b, c);
        if !id.contains(&(id.gen2() * order.omega())) || !id.contains(&(id.gen1() * order.omega())) {
            return Err(Error::NotAnIdeal);
        }
        Ok(id)
    }

    /// Build from the textual tuple `(den, a, b, c)`, validating invariants.
    pub fn from_tuple(order: Order, den: i128, a: i128, b: i128, c: i128) -> Result<FracIdeal, Error> {
        if den <= 0 || a <= 0 || c <= 0 {
            return Err(Error::NotAnIdeal);
        }
        let gens = [order.elem(Q::new(a, den), Q::zero()), order.elem(Q::new(b, den), Q::new(c, den))];
        let id = FracIdeal::from_zspan(order, &gens)?;
        if id.tuple() != (den, a, b, c) {
            return Err(Error::NotNormalized);
        }
        Ok(id)
    }

    fn normalized(order: Order, den: i128, a: i128, b: i128, c: i128) -> FracIdeal {
        let g = gcd_all([den, a, b, c]);
        FracIdeal { order, den: den / g, a: a / g, b: b / g, c: c / g }
    }

    pub fn order(&self) -> Order {
        self.order
    }

    /// `(den, a, b, c)`.
    pub fn tuple(&self) -> (i128, i128, i128, i128) {
        (self.den, self.a, self.b, self.c)
    }

    /// First Z-basis element `a / den`.
    pub fn gen1(&self) -> KNumber {
        self.order.elem(Q::new(self.a, self.den), Q::zero())
    }

    /// Second Z-basis element `(b + c w) / den`.
    pub fn gen2(&self) -> KNumber {
        self.order.elem(Q::new(self.b, self.den), Q::new(self.c, self.den))
    }

    pub fn zbasis(&self) -> [KNumber; 2] {
        [self.gen1(), self.gen2()]
    }

    pub fn norm(&self) -> Q {
        Q::new(self.a * self.c, self.den * self.den)
    }

    pub fn is_unit(&self) -> bool {
        self.tuple() == (1, 1, 0, 1)
    }

    pub fn is_integral(&self) -> bool {
        self.den == 1
    }

    /// Integral and not divisible by any rational integer > 1.
    pub fn is_primitive(&self) -> bool {
        self.den == 1 && self.c == 1
    }

    pub fn contains(&self, x: &KNumber) -> bool {
        self.coords(x).is_some()
    }

    /// Integer coordinates of `x` in the Z-basis `(gen1, gen2)`.
    pub fn coords(&self, x: &KNumber) -> Option<(i128, i128)> {
        let (s, t) = self.rational_coords(x);
        (s.is_integer() && t.is_integer()).then(|| (s.to_integer(), t.to_integer()))
    }

    /// Rational coordinates of `x` in the Z-basis `(gen1, gen2)`.
    pub fn rational_coords(&self, x: &KNumber) -> (Q, Q) {
        // x = s * a/den + t * (b + c w)/den
        let t = x.b * q(self.den) / q(self.c);
        let s = (x.a * q(self.den) - t * q(self.b)) / q(self.a);
        (s, t)
    }

    pub fn is_subset_of(&self, other: &FracIdeal) -> bool {
        other.contains(&self.gen1()) && other.contains(&self.gen2())
    }

    pub fn mul(&self, o: &FracIdeal) -> FracIdeal {
        let gens: Vec<KNumber> = self
            .zbasis()
            .iter()
            .flat_map(|x| o.zbasis().map(|y| *x * y))
            .collect();
        FracIdeal::from_zspan(self.order, &gens).expect("product of nonzero ideals")
    }

    pub fn scale(&self, x: &KNumber) -> FracIdeal {
        assert!(!x.is_zero(), "scaling an ideal by zero");
        let gens = self.zbasis().map(|g| g * *x);
        FracIdeal::from_zspan(self.order, &gens).expect("nonzero scale")
    }

    pub fn scale_q(&self, x: Q) -> FracIdeal {
        self.scale(&self.order.rational(x))
    }

    pub fn conj(&self) -> FracIdeal {
        let gens = self.zbasis().map(|g| g.conj());
        FracIdeal::from_zspan(self.order, &gens).expect("conjugate of an ideal")
    }

    /// `a^{-1} = conj(a) / N(a)`.
    pub fn inv(&self) -> FracIdeal {
        self.conj().scale_q(Q::one() / self.norm())
    }

    pub fn div(&self, o: &FracIdeal) -> FracIdeal {
        self.mul(&o.inv())
    }

    pub fn pow(&self, k: i64) -> FracIdeal {
        let base = if k < 0 { self.inv() } else { *self };
        let mut acc = FracIdeal::unit(self.order);
        for _ in 0..k.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }

    pub fn add(&self, o: &FracIdeal) -> FracIdeal {
        let gens = [self.gen1(), self.gen2(), o.gen1(), o.gen2()];
        FracIdeal::from_zspan(self.order, &gens).expect("sum of ideals")
    }

    pub fn intersect(&self, o: &FracIdeal) -> FracIdeal {
        let all = [self.gen1(), self.gen2(), o.gen1(), o.gen2()];
        let d = lcm_denoms(all.iter().flat_map(|g| [&g.a, &g.b]));
        let v = |g: &KNumber| vec![(g.a * q(d)).to_integer(), (g.b * q(d)).to_integer()];
        // Integer relations s*x1 + t*x2 = u*y1 + v*y2 give the intersection.
        let rows = vec![v(&all[0]), v(&all[1]), v(&all[2]).iter().map(|x| -x).collect(), v(&all[3]).iter().map(|x| -x).collect()];
        let (_, u, rank) = hnf_with_transform(&rows);
        let gens: Vec<KNumber> = u[rank..]
            .iter()
            .map(|rel| all[0] * q(rel[0]) + all[1] * q(rel[1]))
            .collect();
        FracIdeal::from_zspan(self.order, &gens).expect("intersection of nonzero ideals")
    }

    /// A generator `x` with `x R = self`, if the ideal is principal.
    ///
    /// Finds a shortest nonzero element under the norm form by Lagrange-Gauss
    /// reduction of the Z-basis; the ideal is principal exactly when that
    /// minimum equals the ideal norm. Among the unit multiples of the
    /// generator, the one with the smallest `(|b|, b < 0, a < 0)` is returned.
    pub fn generator(&self) -> Option<KNumber> {
        let mu = self.shortest_element();
        if mu.norm() != self.norm() {
            return None;
        }
        self.order
            .units()
            .into_iter()
            .map(|u| u * mu)
            .min_by_key(|x| (x.b.abs(), x.b.is_negative(), x.a.is_negative(), x.a, x.b))
    }

    pub fn is_principal(&self) -> bool {
        self.shortest_element().norm() == self.norm()
    }

    /// A nonzero element of minimal norm.
    pub fn shortest_element(&self) -> KNumber {
        let (mut u, mut v) = (self.gen1(), self.gen2());
        loop {
            if v.norm() < u.norm() {
                std::mem::swap(&mut u, &mut v);
            }
            // Re<v, u> / <u, u>; reduced once it lies in [-1/2, 1/2].
            let ratio = (v * u.conj()).trace() / (q(2) * u.norm());
            if ratio.abs() <= Q::new(1, 2) {
                return u;
            }
            v -= u * ratio.round();
        }
    }

    pub fn text(&self) -> String {
        format!("[{} | {}, {}, {}]", self.den, self.a, self.b, self.c)
    }

    pub fn parse(order: Order, s: &str) -> Result<FracIdeal, Error> {
        let bad = || Error::Parse(format!("ideal `{s}`: expected `[d | a, b, c]`"));
        let inner = s.trim().strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
        let (d, rest) = inner.split_once('|').ok_or_else(bad)?;
        let nums: Vec<i128> = std::iter::once(d)
            .chain(rest.split(','))
            .map(|x| i128::from_str(x.trim()).map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        if nums.len() != 4 {
            return Err(bad());
        }
        FracIdeal::from_tuple(order, nums[0], nums[1], nums[2], nums[3])
    }
}

impl fmt::Display for FracIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// All primitive integral ideals of norm `m`.
pub fn primitive_ideals_of_norm(order: Order, m: i128) -> Vec<FracIdeal> {
    let (t, n) = (order.omega_trace() as i128, order.omega_norm() as i128);
    (0..m)
        .filter(|b| (b * b + t * b + n).mod_floor(&m) == 0)
        .map(|b| FracIdeal { order, den: 1, a: m, b, c: 1 })
        .collect()
}

/// Primes of `R` above the rational prime `p` (one or two ideals).
pub fn primes_above(order: Order, p: i128) -> Vec<FracIdeal> {
    let v = primitive_ideals_of_norm(order, p);
    if v.is_empty() {
        vec![FracIdeal::rational(order, q(p))]
    } else {
        v
    }
}
