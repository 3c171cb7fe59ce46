//! Maximal orders `R = Z[w]` of imaginary quadratic fields and exact elements
//! of their fraction fields.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_q, q, Q};
use crate::Error;

/// The maximal order of `Q(sqrt(disc))`, with `w^2 - t*w + n = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Order {
    disc: i64,
    t: i64,
    n: i64,
}

fn squarefree(m: i64) -> bool {
    let m = m.abs();
    let mut p = 2i64;
    while p * p <= m {
        if m % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

impl Order {
    /// Build the maximal order of discriminant `disc`, which must be a
    /// negative fundamental discriminant.
    pub fn new(disc: i64) -> Result<Order, Error> {
        if disc >= 0 {
            return Err(Error::Discriminant { disc, reason: "discriminant must be negative" });
        }
        match disc.rem_euclid(4) {
            1 => {
                if !squarefree(disc) {
                    return Err(Error::Discriminant {
                        disc,
                        reason: "disc = 1 mod 4 but not squarefree",
                    });
                }
                Ok(Order { disc, t: 1, n: (1 - disc) / 4 })
            }
            0 => {
                let m = disc / 4;
                if m.rem_euclid(4) == 1 {
                    return Err(Error::Discriminant {
                        disc,
                        reason: "disc/4 = 1 mod 4, so disc is not fundamental",
                    });
                }
                if !squarefree(m) {
                    return Err(Error::Discriminant { disc, reason: "disc/4 is not squarefree" });
                }
                Ok(Order { disc, t: 0, n: -m })
            }
            _ => Err(Error::Discriminant { disc, reason: "disc must be 0 or 1 mod 4" }),
        }
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    /// Trace of `w`.
    pub fn omega_trace(&self) -> i64 {
        self.t
    }

    /// Norm of `w`.
    pub fn omega_norm(&self) -> i64 {
        self.n
    }

    pub fn zero(&self) -> KNumber {
        KNumber::new(*self, Q::zero(), Q::zero())
    }

    pub fn one(&self) -> KNumber {
        self.int(1)
    }

    pub fn int(&self, k: i128) -> KNumber {
        KNumber::new(*self, q(k), Q::zero())
    }

    pub fn rational(&self, x: Q) -> KNumber {
        KNumber::new(*self, x, Q::zero())
    }

    pub fn omega(&self) -> KNumber {
        KNumber::new(*self, Q::zero(), Q::one())
    }

    pub fn elem(&self, a: Q, b: Q) -> KNumber {
        KNumber::new(*self, a, b)
    }

    pub fn elem_int(&self, a: i128, b: i128) -> KNumber {
        KNumber::new(*self, q(a), q(b))
    }

    /// The units of `R`, sorted.
    pub fn units(&self) -> Vec<KNumber> {
        // Units are the elements of norm 1; |b| <= 1 suffices for every disc.
        let mut out = Vec::new();
        for b in -1..=1i128 {
            for a in -2..=2i128 {
                let u = self.elem_int(a, b);
                if u.norm().is_one() {
                    out.push(u);
                }
            }
        }
        out.sort();
        out
    }

    pub fn unit_count(&self) -> usize {
        match self.disc {
            -3 => 6,
            -4 => 4,
            _ => 2,
        }
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O({})", self.disc)
    }
}

/// An element `a + b*w` of `K = Q(w)` with exact rational coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KNumber {
    order: Order,
    pub a: Q,
    pub b: Q,
}

impl PartialOrd for KNumber {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for KNumber {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.a, self.b).cmp(&(other.a, other.b))
    }
}

impl KNumber {
    pub fn new(order: Order, a: Q, b: Q) -> KNumber {
        KNumber { order, a, b }
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// `conj(a + b w) = (a + b t) - b w`.
    pub fn conj(&self) -> KNumber {
        let t = q(self.order().t as i128);
        KNumber { order: self.order, a: self.a + self.b * t, b: -self.b }
    }

    pub fn norm(&self) -> Q {
        let o = self.order();
        let (t, n) = (q(o.t as i128), q(o.n as i128));
        self.a * self.a + t * self.a * self.b + n * self.b * self.b
    }

    pub fn trace(&self) -> Q {
        let t = q(self.order().t as i128);
        self.a * q(2) + self.b * t
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    pub fn scale(&self, s: Q) -> KNumber {
        KNumber { order: self.order, a: self.a * s, b: self.b * s }
    }

    pub fn inv(&self) -> KNumber {
        assert!(!self.is_zero(), "inverse of zero");
        self.conj().scale(Q::one() / self.norm())
    }

    /// Lowest common denominator of both coordinates.
    pub fn denom(&self) -> i128 {
        num_integer::lcm(*self.a.denom(), *self.b.denom())
    }

    pub fn text(&self) -> String {
        format!("{{{},{}}}", fmt_q(&self.a), fmt_q(&self.b))
    }
}

impl fmt::Display for KNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", fmt_q(&self.a)),
            (true, false) => write!(f, "{}*w", fmt_q(&self.b)),
            (false, false) => {
                let sign = if self.b.is_negative() { "-" } else { "+" };
                write!(f, "{} {} {}*w", fmt_q(&self.a), sign, fmt_q(&self.b.abs()))
            }
        }
    }
}

impl Add for KNumber {
    type Output = KNumber;
    fn add(self, o: KNumber) -> KNumber {
        KNumber { order: self.order, a: self.a + o.a, b: self.b + o.b }
    }
}

impl Sub for KNumber {
    type Output = KNumber;
    fn sub(self, o: KNumber) -> KNumber {
        KNumber { order: self.order, a: self.a - o.a, b: self.b - o.b }
    }
}

impl Neg for KNumber {
    type Output = KNumber;
    fn neg(self) -> KNumber {
        KNumber { order: self.order, a: -self.a, b: -self.b }
    }
}

impl Mul for KNumber {
    type Output = KNumber;
    fn mul(self, o: KNumber) -> KNumber {
        let ord = self.order;
        debug_assert_eq!(self.order, o.order);
        let (t, n) = (q(ord.t as i128), q(ord.n as i128));
        let bd = self.b * o.b;
        KNumber {
            order: ord,
            a: self.a * o.a - n * bd,
            b: self.a * o.b + self.b * o.a + t * bd,
        }
    }
}

impl Div for KNumber {
    type Output = KNumber;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: KNumber) -> KNumber {
        self * o.inv()
    }
}

impl Mul<Q> for KNumber {
    type Output = KNumber;
    fn mul(self, s: Q) -> KNumber {
        self.scale(s)
    }
}

impl AddAssign for KNumber {
    fn add_assign(&mut self, o: KNumber) {
        *self = *self + o;
    }
}

impl SubAssign for KNumber {
    fn sub_assign(&mut self, o: KNumber) {
        *self = *self - o;
    }
}

impl MulAssign for KNumber {
    fn mul_assign(&mut self, o: KNumber) {
        *self = *self * o;
    }
}
