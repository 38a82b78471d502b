//! Exact rationals viewed inside `Q_p`: valuations, norms, residues mod `p^n`,
//! Hensel square roots and Newton polygons.
//!
//! Everything here is exact. A norm is never a float: it is stored as the
//! exponent `e` in `|x| = p^e` (or [`Norm::Zero`]).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("value has negative valuation {0} and has no residue mod p^n")]
    NotIntegral(i64),
    #[error("valuation {0} is odd, no square root in Q_p")]
    OddValuation(i64),
    #[error("unit part is not a square modulo p")]
    NonResidue,
    #[error("square roots at p = 2 are not supported")]
    EvenPrimeUnsupported,
    #[error("zero has no unit part")]
    Zero,
    #[error("precision must be at least 1")]
    ZeroPrecision,
    #[error("bad scalar literal {0:?}")]
    BadLiteral(String),
}

/// A rational prime, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Prime, PadicError> {
        if p < 2 {
            return Err(PadicError::NotPrime(p));
        }
        let mut d = 2u64;
        while d.saturating_mul(d) <= p {
            if p.is_multiple_of(d) {
                return Err(PadicError::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^k` as a big integer.
    pub fn pow(self, k: u32) -> BigInt {
        num_traits::pow(self.big(), k as usize)
    }

    /// `p^k` for any integer `k`, as a rational.
    pub fn rational_pow(self, k: i64) -> Rational {
        let base = Rational::from_integer(self.pow(k.unsigned_abs() as u32));
        if k >= 0 {
            base
        } else {
            base.recip()
        }
    }
}

impl TryFrom<u64> for Prime {
    type Error = PadicError;
    fn try_from(p: u64) -> Result<Self, Self::Error> {
        Prime::new(p)
    }
}

impl From<Prime> for u64 {
    fn from(p: Prime) -> u64 {
        p.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `v_p(x)`, with `v_p(0) = +inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinity) => Ordering::Less,
            (Valuation::Infinity, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinity, Valuation::Infinity) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
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

/// An exact p-adic absolute value: either zero or `p^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    Zero,
    Pow(i64),
}

impl Norm {
    pub const ONE: Norm = Norm::Pow(0);

    pub fn from_valuation(v: Valuation) -> Norm {
        match v {
            Valuation::Finite(v) => Norm::Pow(-v),
            Valuation::Infinity => Norm::Zero,
        }
    }

    pub fn exponent(self) -> Option<i64> {
        match self {
            Norm::Zero => None,
            Norm::Pow(e) => Some(e),
        }
    }

    pub fn to_rational(self, p: Prime) -> Rational {
        match self {
            Norm::Zero => Rational::zero(),
            Norm::Pow(e) => p.rational_pow(e),
        }
    }
}

impl Mul for Norm {
    type Output = Norm;
    fn mul(self, rhs: Norm) -> Norm {
        match (self, rhs) {
            (Norm::Pow(a), Norm::Pow(b)) => Norm::Pow(a + b),
            _ => Norm::Zero,
        }
    }
}

impl Ord for Norm {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Norm::Zero, Norm::Zero) => Ordering::Equal,
            (Norm::Zero, Norm::Pow(_)) => Ordering::Less,
            (Norm::Pow(_), Norm::Zero) => Ordering::Greater,
            (Norm::Pow(a), Norm::Pow(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for Norm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Strips all factors of `p` from a nonzero integer, returning the count.
fn strip(n: &BigInt, p: &BigInt) -> (i64, BigInt) {
    let mut count = 0;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return (count, m);
        }
        m = q;
        count += 1;
    }
}

pub fn valuation_int(n: &BigInt, p: Prime) -> Valuation {
    if n.is_zero() {
        return Valuation::Infinity;
    }
    Valuation::Finite(strip(n, &p.big()).0)
}

pub fn valuation(x: &Rational, p: Prime) -> Valuation {
    if x.is_zero() {
        return Valuation::Infinity;
    }
    let pb = p.big();
    Valuation::Finite(strip(x.numer(), &pb).0 - strip(x.denom(), &pb).0)
}

pub fn norm(x: &Rational, p: Prime) -> Norm {
    Norm::from_valuation(valuation(x, p))
}

/// Splits a nonzero `x` as `p^v * u` with `u` a p-adic unit.
pub fn unit_split(x: &Rational, p: Prime) -> Result<(i64, Rational), PadicError> {
    if x.is_zero() {
        return Err(PadicError::Zero);
    }
    let pb = p.big();
    let (vn, n) = strip(x.numer(), &pb);
    let (vd, d) = strip(x.denom(), &pb);
    Ok((vn - vd, Rational::new(n, d)))
}

/// Inverse of `a` modulo `m`, when it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

/// The image of a p-integral rational in `Z/p^n`, as a representative in `[0, p^n)`.
pub fn reduce_mod(x: &Rational, p: Prime, n: u32) -> Result<BigInt, PadicError> {
    let modulus = p.pow(n);
    if x.is_zero() {
        return Ok(BigInt::zero());
    }
    if let Valuation::Finite(v) = valuation(x, p) {
        if v < 0 {
            return Err(PadicError::NotIntegral(v));
        }
    }
    let inv = mod_inverse(x.denom(), &modulus).expect("denominator of an integral value is a unit");
    Ok((x.numer() * inv).mod_floor(&modulus))
}

/// A scalar of `Q` together with the prime it is viewed at.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicScalar {
    pub value: Rational,
    pub prime: Prime,
}

impl PadicScalar {
    pub fn new(value: Rational, prime: Prime) -> Self {
        PadicScalar { value, prime }
    }

    pub fn from_int(n: i64, prime: Prime) -> Self {
        PadicScalar::new(Rational::from_integer(n.into()), prime)
    }

    pub fn from_frac(n: i64, d: i64, prime: Prime) -> Self {
        PadicScalar::new(Rational::new(n.into(), d.into()), prime)
    }

    pub fn valuation(&self) -> Valuation {
        valuation(&self.value, self.prime)
    }

    pub fn norm(&self) -> Norm {
        norm(&self.value, self.prime)
    }

    pub fn val_norm(&self) -> (Valuation, Norm) {
        let v = self.valuation();
        (v, Norm::from_valuation(v))
    }

    pub fn reduce_mod(&self, n: u32) -> Result<BigInt, PadicError> {
        reduce_mod(&self.value, self.prime, n)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    fn same_prime(&self, other: &Self) {
        assert_eq!(self.prime, other.prime, "mixing scalars at different primes");
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.value))
    }
}

impl Add for &PadicScalar {
    type Output = PadicScalar;
    fn add(self, rhs: &PadicScalar) -> PadicScalar {
        self.same_prime(rhs);
        PadicScalar::new(&self.value + &rhs.value, self.prime)
    }
}

impl Sub for &PadicScalar {
    type Output = PadicScalar;
    fn sub(self, rhs: &PadicScalar) -> PadicScalar {
        self.same_prime(rhs);
        PadicScalar::new(&self.value - &rhs.value, self.prime)
    }
}

impl Mul for &PadicScalar {
    type Output = PadicScalar;
    fn mul(self, rhs: &PadicScalar) -> PadicScalar {
        self.same_prime(rhs);
        PadicScalar::new(&self.value * &rhs.value, self.prime)
    }
}

impl Neg for &PadicScalar {
    type Output = PadicScalar;
    fn neg(self) -> PadicScalar {
        PadicScalar::new(-&self.value, self.prime)
    }
}

/// `p^valuation * unit_residue`, known modulo `p^(valuation + precision)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ApproxScalar {
    pub prime: Prime,
    pub valuation: i64,
    pub unit_residue: BigInt,
    pub precision: u32,
}

impl ApproxScalar {
    /// Truncates a nonzero rational to `precision` significant p-adic digits.
    pub fn from_rational(x: &Rational, prime: Prime, precision: u32) -> Result<Self, PadicError> {
        if precision == 0 {
            return Err(PadicError::ZeroPrecision);
        }
        let (v, u) = unit_split(x, prime)?;
        Ok(ApproxScalar {
            prime,
            valuation: v,
            unit_residue: reduce_mod(&u, prime, precision)?,
            precision,
        })
    }

    /// The rational `p^valuation * unit_residue`.
    pub fn to_rational(&self) -> Rational {
        Rational::from_integer(self.unit_residue.clone()) * self.prime.rational_pow(self.valuation)
    }

    /// Whether the exact value `x` is consistent with this approximation.
    pub fn agrees_with(&self, x: &Rational) -> bool {
        let diff = x - self.to_rational();
        valuation(&diff, self.prime) >= Valuation::Finite(self.valuation + self.precision as i64)
    }
}

impl fmt::Display for ApproxScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p^{} * {} + O(p^{})",
            self.valuation,
            self.unit_residue,
            self.valuation + self.precision as i64
        )
    }
}

fn pow_mod(mut base: u128, mut exp: u64, m: u128) -> u128 {
    let mut acc = 1u128 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// A square root of `a` modulo an odd prime `p` (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let (a, pm) = ((a % p) as u128, p as u128);
    if a == 0 {
        return Some(0);
    }
    if pow_mod(a, (p - 1) / 2, pm) != 1 {
        return None;
    }
    let (mut q, mut s) = (p - 1, 0u32);
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let z = (2..p).find(|&z| pow_mod(z as u128, (p - 1) / 2, pm) == pm - 1)?;
    let mut m = s;
    let mut c = pow_mod(z as u128, q, pm);
    let mut t = pow_mod(a, q, pm);
    let mut r = pow_mod(a, q.div_ceil(2), pm);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = t2 * t2 % pm;
            i += 1;
        }
        let b = pow_mod(c, 1u64 << (m - i - 1), pm);
        m = i;
        c = b * b % pm;
        t = t * c % pm;
        r = r * b % pm;
    }
    Some(r as u64)
}

/// Square root of `a` in `Q_p` to `precision` digits: returns `s` with
/// `s^2 = a mod p^(v(a) + precision)`. Of the two roots, the one whose unit
/// residue mod `p` lies in `[1, (p-1)/2]` is returned.
pub fn hensel_sqrt(a: &Rational, p: Prime, precision: u32) -> Result<ApproxScalar, PadicError> {
    if p.get() == 2 {
        return Err(PadicError::EvenPrimeUnsupported);
    }
    if precision == 0 {
        return Err(PadicError::ZeroPrecision);
    }
    let (v, u) = unit_split(a, p)?;
    if v.rem_euclid(2) != 0 {
        return Err(PadicError::OddValuation(v));
    }
    let u_mod_p = reduce_mod(&u, p, 1)?.to_u64().expect("residue below p");
    let root = sqrt_mod_prime(u_mod_p, p.get()).ok_or(PadicError::NonResidue)?;

    let modulus = p.pow(precision);
    let target = reduce_mod(&u, p, precision)?;
    let mut s = BigInt::from(root);
    let mut known = 1u32;
    while known < precision {
        known = (known * 2).min(precision);
        let m = p.pow(known);
        let two_s = (&s * BigInt::from(2)).mod_floor(&m);
        let inv = mod_inverse(&two_s, &m).expect("2s is a unit for odd p");
        let f = (&s * &s - &target).mod_floor(&m);
        s = (&s - f * inv).mod_floor(&m);
    }
    s = s.mod_floor(&modulus);
    let half = (p.get() - 1) / 2;
    if (&s % p.big()).to_u64().expect("residue below p") > half {
        s = &modulus - s;
    }
    Ok(ApproxScalar { prime: p, valuation: v / 2, unit_residue: s, precision })
}

/// Lower Newton polygon of a monic polynomial, read as root valuations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Root valuations with multiplicity, ascending.
    pub slopes: Vec<Ratio<i64>>,
    /// Number of roots equal to zero.
    pub zero_roots: usize,
}

impl NewtonPolygon {
    /// Smallest root valuation, i.e. `-log_p` of the largest root norm.
    pub fn min_slope(&self) -> Option<Ratio<i64>> {
        self.slopes.first().copied()
    }
}

/// Newton polygon of `sum coeffs[i] X^i` (coefficients low to high).
pub fn newton_slopes(coeffs: &[Rational], p: Prime) -> NewtonPolygon {
    let points: Vec<(i64, i64)> = coeffs
        .iter()
        .enumerate()
        .filter_map(|(i, c)| valuation(c, p).finite().map(|v| (i as i64, v)))
        .collect();
    let Some(&(first, _)) = points.first() else {
        return NewtonPolygon { slopes: Vec::new(), zero_roots: 0 };
    };

    let mut hull: Vec<(i64, i64)> = Vec::new();
    for &pt in &points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or above the segment a -> pt
            let cross = (b.0 - a.0) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 - a.0);
            if cross <= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }

    let mut slopes = Vec::new();
    for w in hull.windows(2) {
        let (len, drop) = (w[1].0 - w[0].0, w[0].1 - w[1].1);
        let slope = Ratio::new(drop, len);
        slopes.extend(std::iter::repeat_n(slope, len as usize));
    }
    slopes.sort();
    NewtonPolygon { slopes, zero_roots: first as usize }
}

/// Exact square root in `Q`, if `x` is a rational square.
pub fn rational_sqrt(x: &Rational) -> Option<Rational> {
    use num_traits::Signed;
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer().sqrt(), x.denom().sqrt());
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Rational::new(n, d))
}

/// Serializes a rational as its `"a"` / `"a/b"` literal.
pub fn ser_rational<S: serde::Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(x))
}

/// Renders a rational as `"a"` or `"a/b"`.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses the scalar literal grammar: a signed product of integers and
/// `p`, `p^k` factors, optionally divided by another such product.
/// Examples: `"3/4"`, `"p^2*7"`, `"-1/p"`.
pub fn parse_scalar(s: &str, p: Prime) -> Result<Rational, PadicError> {
    let bad = || PadicError::BadLiteral(s.to_string());
    let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(&text)),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let mut parts = body.split('/');
    let num = parse_product(parts.next().ok_or_else(bad)?, p).ok_or_else(bad)?;
    let value = match parts.next() {
        None => num,
        Some(den) => {
            let den = parse_product(den, p).ok_or_else(bad)?;
            if den.is_zero() || parts.next().is_some() {
                return Err(bad());
            }
            num / den
        }
    };
    Ok(if negative { -value } else { value })
}

fn parse_product(s: &str, p: Prime) -> Option<Rational> {
    let mut acc = Rational::one();
    for factor in s.split('*') {
        if let Some(rest) = factor.strip_prefix('p') {
            let exp = match rest.strip_prefix('^') {
                None if rest.is_empty() => 1,
                Some(e) => e.strip_prefix('(').and_then(|e| e.strip_suffix(')')).unwrap_or(e).parse::<i64>().ok()?,
                None => return None,
            };
            acc *= p.rational_pow(exp);
        } else {
            if factor.is_empty() || !factor.bytes().all(|b| b.is_ascii_digit()) {
                return None;
            }
            acc *= Rational::from_integer(factor.parse::<BigInt>().ok()?);
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn val_norm_examples() {
        assert_eq!(PadicScalar::from_int(5, p(5)).val_norm(), (Valuation::Finite(1), Norm::Pow(-1)));
        assert_eq!(PadicScalar::from_frac(3, 4, p(2)).val_norm(), (Valuation::Finite(-2), Norm::Pow(2)));
        assert_eq!(PadicScalar::from_int(0, p(7)).val_norm(), (Valuation::Infinity, Norm::Zero));
        assert_eq!(Norm::Pow(2).to_rational(p(2)), q(4, 1));
    }

    #[test]
    fn prime_validation() {
        assert!(Prime::new(1).is_err());
        assert!(Prime::new(9).is_err());
        assert!(Prime::new(97).is_ok());
    }

    #[test]
    fn reduce_mod_examples() {
        // 2 * 16 = 32 = 7 mod 25
        assert_eq!(reduce_mod(&q(7, 2), p(5), 2).unwrap(), BigInt::from(16));
        assert_eq!(reduce_mod(&q(0, 1), p(3), 4).unwrap(), BigInt::from(0));
        assert_eq!(reduce_mod(&q(1, 5), p(5), 1), Err(PadicError::NotIntegral(-1)));
        assert_eq!(reduce_mod(&q(-1, 1), p(5), 1).unwrap(), BigInt::from(4));
    }

    #[test]
    fn hensel_sqrt_examples() {
        let r = hensel_sqrt(&q(-1, 1), p(5), 3).unwrap();
        assert_eq!(r.unit_residue, BigInt::from(57));
        assert_eq!(r.valuation, 0);
        assert_eq!(hensel_sqrt(&q(5, 1), p(5), 3), Err(PadicError::OddValuation(1)));
        assert_eq!(hensel_sqrt(&q(4, 1), p(7), 2).unwrap().unit_residue, BigInt::from(2));
        assert_eq!(hensel_sqrt(&q(3, 1), p(5), 2), Err(PadicError::NonResidue));
        assert_eq!(hensel_sqrt(&q(1, 1), p(2), 2), Err(PadicError::EvenPrimeUnsupported));
        let r = hensel_sqrt(&q(-1, 25), p(5), 4).unwrap();
        assert_eq!(r.valuation, -1);
    }

    #[test]
    fn tonelli_shanks_small_primes() {
        for &prime in &[3u64, 5, 7, 13, 17, 41, 97, 257] {
            for a in 1..prime {
                match sqrt_mod_prime(a, prime) {
                    Some(r) => assert_eq!(r * r % prime, a),
                    None => assert!((1..prime).all(|x| x * x % prime != a)),
                }
            }
        }
    }

    #[test]
    fn newton_examples() {
        let five = p(5);
        // X^2 - (p+1)X + p = (X - 1)(X - p)
        let np = newton_slopes(&[q(5, 1), q(-6, 1), q(1, 1)], five);
        assert_eq!(np.slopes, vec![Ratio::new(0, 1), Ratio::new(1, 1)]);
        let np = newton_slopes(&[q(-1, 1), q(0, 1), q(1, 1)], five);
        assert_eq!(np.slopes, vec![Ratio::new(0, 1); 2]);
        let np = newton_slopes(&[q(-5, 1), q(0, 1), q(1, 1)], five);
        assert_eq!(np.slopes, vec![Ratio::new(1, 2); 2]);
        let np = newton_slopes(&[q(0, 1), q(0, 1), q(1, 1)], five);
        assert_eq!(np.zero_roots, 2);
        assert!(np.slopes.is_empty());
    }

    #[test]
    fn literal_grammar() {
        let five = p(5);
        assert_eq!(parse_scalar("3/4", five).unwrap(), q(3, 4));
        assert_eq!(parse_scalar("p^2*7", five).unwrap(), q(175, 1));
        assert_eq!(parse_scalar("-1/p", five).unwrap(), q(-1, 5));
        assert_eq!(parse_scalar("p^-2", five).unwrap(), q(1, 25));
        assert_eq!(parse_scalar(" 12 ", five).unwrap(), q(12, 1));
        assert!(parse_scalar("1/0", five).is_err());
        assert!(parse_scalar("x", five).is_err());
        assert!(parse_scalar("", five).is_err());
        assert!(parse_scalar("1/2/3", five).is_err());
    }
}
