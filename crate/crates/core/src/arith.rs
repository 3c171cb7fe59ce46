//! Exact scalar arithmetic shared by every module.
//!
//! All computations run over fixed-width `i128` rationals. The workspace builds
//! with overflow checks enabled in every profile, so an overflow aborts loudly
//! instead of producing a wrong count.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Exact rational number.
pub type Q = Ratio<i128>;

pub fn q(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn qf(num: i128, den: i128) -> Q {
    Q::new(num, den)
}

pub fn floor(x: &Q) -> i128 {
    x.floor().to_integer()
}

pub fn ceil(x: &Q) -> i128 {
    x.ceil().to_integer()
}

/// Largest integer `r` with `r*r <= n`.
pub fn isqrt(n: i128) -> i128 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Integer interval `[lo, hi]` of all `x` with `(x - center)^2 <= radius_sq`.
/// Returns `None` when the interval is empty.
pub fn int_range_around(center: &Q, radius_sq: &Q) -> Option<(i128, i128)> {
    if radius_sq.is_negative() {
        return None;
    }
    let approx = (*radius_sq.numer() as f64 / *radius_sq.denom() as f64).sqrt();
    let c = *center.numer() as f64 / *center.denom() as f64;
    let mut lo = (c - approx).floor() as i128 - 1;
    let mut hi = (c + approx).ceil() as i128 + 1;
    let inside = |x: i128| {
        let d = q(x) - center;
        d * d <= *radius_sq
    };
    while lo <= hi && !inside(lo) {
        lo += 1;
    }
    while hi >= lo && !inside(hi) {
        hi -= 1;
    }
    (lo <= hi).then_some((lo, hi))
}

pub fn lcm_denoms<'a>(xs: impl IntoIterator<Item = &'a Q>) -> i128 {
    xs.into_iter().fold(1i128, |acc, x| acc.lcm(x.denom()))
}

pub fn gcd_all(xs: impl IntoIterator<Item = i128>) -> i128 {
    xs.into_iter().fold(0i128, |acc, x| acc.gcd(&x))
}

/// Extended gcd: returns `(g, s, t)` with `s*a + t*b = g >= 0`.
pub fn xgcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let qt = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
        (old_t, t) = (t, old_t - qt * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn pow(x: &Q, k: u32) -> Q {
    let mut acc = Q::one();
    for _ in 0..k {
        acc *= *x;
    }
    acc
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Canonical text for a rational: `p` or `p/q`.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i128 = n.trim().parse().ok()?;
            let d: i128 = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => s.parse::<i128>().ok().map(q),
    }
}
