//! Exact rational scalars and p-adic valuations.
//!
//! All arithmetic in this crate runs over `Q` with arbitrary-precision
//! integers; nothing is ever rounded. Rationals are kept in canonical
//! reduced form (positive denominator, gcd 1) by `num_rational`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// The scalar type of the whole crate: an arbitrary-precision rational.
pub type Rat = num_rational::BigRational;

/// Shorthand for a rational from two machine integers.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Shorthand for an integer rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScalarError {
    /// The modulus passed to a valuation was not prime.
    NotPrime(u64),
    /// An operation required a nonzero input.
    ZeroInput,
    /// A rational literal could not be parsed.
    BadRational(String),
}

impl fmt::Display for ScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarError::NotPrime(p) => write!(f, "{p} is not prime"),
            ScalarError::ZeroInput => write!(f, "input must be nonzero"),
            ScalarError::BadRational(s) => write!(f, "cannot parse rational literal {s:?}"),
        }
    }
}

impl std::error::Error for ScalarError {}

/// Serializes a rational as `"a/b"`, or `"a"` when the denominator is 1.
/// The sign sits on the numerator.
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses the `"a/b"` / `"a"` format produced by [`format_rat`].
pub fn parse_rat(s: &str) -> Result<Rat, ScalarError> {
    let bad = || ScalarError::BadRational(s.to_string());
    let mut parts = s.trim().splitn(2, '/');
    let numer: BigInt = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    match parts.next() {
        None => Ok(Rat::from_integer(numer)),
        Some(d) => {
            let denom: BigInt = d.trim().parse().map_err(|_| bad())?;
            if denom.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(numer, denom))
        }
    }
}

/// Trial-division primality test. The primes appearing here are small
/// (they play the role of a residue characteristic), so this is plenty.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// A p-adic valuation value: an integer, or `+inf` for the zero element.
///
/// The ordering places `Infinity` above every finite value, matching the
/// ultrametric convention `v(0) = +inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn is_finite(&self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    /// The finite value, panicking on `Infinity`. Callers use this after
    /// checking the input was nonzero.
    pub fn finite(&self) -> i64 {
        match self {
            Valuation::Finite(v) => *v,
            Valuation::Infinity => panic!("valuation of zero has no finite value"),
        }
    }

    /// `v(xy) = v(x) + v(y)`, with absorbing `Infinity`.
    pub fn add(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinity,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinity => write!(f, "inf"),
        }
    }
}

fn int_valuation(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut v = 0i64;
    let mut m = n.abs();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        v += 1;
        m = q;
    }
}

/// The p-adic valuation `v_p(x)`, with `v_p(0) = +inf`.
pub fn valuation_of(x: &Rat, p: u64) -> Result<Valuation, ScalarError> {
    if !is_prime(p) {
        return Err(ScalarError::NotPrime(p));
    }
    if x.is_zero() {
        return Ok(Valuation::Infinity);
    }
    let p = BigInt::from(p);
    Ok(Valuation::Finite(
        int_valuation(x.numer(), &p) - int_valuation(x.denom(), &p),
    ))
}

/// Exact power `p^e` as a rational, for integer (possibly negative) `e`.
pub fn p_power(p: u64, e: i64) -> Rat {
    let base = BigInt::from(p);
    if e >= 0 {
        Rat::from_integer(base.pow(e as u32))
    } else {
        Rat::new(BigInt::one(), base.pow((-e) as u32))
    }
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rational_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let ns = x.numer().sqrt();
    let ds = x.denom().sqrt();
    if &(&ns * &ns) == x.numer() && &(&ds * &ds) == x.denom() {
        Some(Rat::new(ns, ds))
    } else {
        None
    }
}

/// The rational roots of `a x^2 + b x + c` (`a != 0`), sorted ascending.
/// Irrational roots are simply absent: over `Q` the quadratic has rational
/// roots exactly when its discriminant is a rational square.
pub fn quadratic_roots(a: &Rat, b: &Rat, c: &Rat) -> Vec<Rat> {
    assert!(!a.is_zero(), "leading coefficient must be nonzero");
    let disc = b * b - Rat::from_integer(BigInt::from(4)) * a * c;
    match rational_sqrt(&disc) {
        None => Vec::new(),
        Some(s) => {
            let two_a = Rat::from_integer(BigInt::from(2)) * a;
            let r1 = (-b.clone() - s.clone()) / two_a.clone();
            let r2 = (-b.clone() + s) / two_a;
            if r1 == r2 {
                vec![r1]
            } else if r1 < r2 {
                vec![r1, r2]
            } else {
                vec![r2, r1]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn valuation_basics() {
        assert_eq!(valuation_of(&rat_int(125), 5).unwrap(), Valuation::Finite(3));
        assert_eq!(valuation_of(&rat(2, 5), 5).unwrap(), Valuation::Finite(-1));
        assert_eq!(valuation_of(&rat_int(0), 5).unwrap(), Valuation::Infinity);
        assert!(valuation_of(&rat_int(1), 6).is_err());
    }

    #[test]
    fn valuation_ordering() {
        assert!(Valuation::Infinity > Valuation::Finite(1_000_000));
        assert!(Valuation::Finite(-1) < Valuation::Finite(0));
    }

    #[test]
    fn rational_round_trip() {
        for s in ["3/4", "-3/4", "7", "0", "-12/5"] {
            let x = parse_rat(s).unwrap();
            assert_eq!(format_rat(&x), s);
        }
        // non-canonical input parses to the reduced representative
        assert_eq!(format_rat(&parse_rat("4/8").unwrap()), "1/2");
        assert_eq!(format_rat(&parse_rat("3/-6").unwrap()), "-1/2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x").is_err());
    }

    #[test]
    fn quadratic_root_finding() {
        // x^2 - 3x + 2 = (x-1)(x-2)
        let roots = quadratic_roots(&rat_int(1), &rat_int(-3), &rat_int(2));
        assert_eq!(roots, vec![rat_int(1), rat_int(2)]);
        // x^2 + 1 has no rational roots
        assert!(quadratic_roots(&rat_int(1), &rat_int(0), &rat_int(1)).is_empty());
        // x^2 - 2 has irrational roots: none over Q
        assert!(quadratic_roots(&rat_int(1), &rat_int(0), &rat_int(-2)).is_empty());
        // double root
        assert_eq!(
            quadratic_roots(&rat_int(1), &rat_int(-2), &rat_int(1)),
            vec![rat_int(1)]
        );
    }

    #[test]
    fn p_power_negative_exponent() {
        assert_eq!(p_power(5, 3), rat_int(125));
        assert_eq!(p_power(5, -2), rat(1, 25));
    }
}
