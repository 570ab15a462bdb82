//! Exact arithmetic in an imaginary quadratic field `K = Q(sqrt d)`.
//!
//! Elements are stored in the integral basis `(1, w)` with `w = (D + sqrt D)/2`,
//! where `D` is the fundamental discriminant. With this convention the ring of
//! integers is `Z + Z w` for every `d`, and `w` has trace `D` and norm
//! `(D^2 - D)/4`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary precision rational.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical text form of a rational: `p` or `p/q` in lowest terms.
pub fn q_to_string(x: &Q) -> String {
    x.to_string()
}

pub fn q_from_str(s: &str) -> Result<Q> {
    let s = s.trim();
    let parse = |t: &str| t.parse::<BigInt>().map_err(|e| Error::Parse(format!("{t}: {e}")));
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s}")));
            }
            Ok(Q::new(parse(n)?, d))
        }
        None => Ok(Q::from_integer(parse(s)?)),
    }
}

pub fn is_squarefree(n: i64) -> bool {
    let mut m = n.unsigned_abs();
    if m == 0 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= m {
        if m % (p * p) == 0 {
            return false;
        }
        if m % p == 0 {
            m /= p;
        }
        p += 1;
    }
    true
}

/// An imaginary quadratic field, identified by its squarefree `d < 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuadField {
    d: i64,
    disc: i64,
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 {
            return Err(Error::InvalidField(format!("d = {d} must be negative")));
        }
        if !is_squarefree(d) {
            return Err(Error::InvalidField(format!("d = {d} is not squarefree")));
        }
        let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        Ok(QuadField { d, disc })
    }

    /// Accepts either a squarefree `d` or a fundamental discriminant `4d`.
    pub fn from_disc_or_d(v: i64) -> Result<Self> {
        if is_squarefree(v) {
            return Self::new(v);
        }
        if v % 4 == 0 {
            let d = v / 4;
            if d.rem_euclid(4) != 1 && is_squarefree(d) {
                return Self::new(d);
            }
        }
        Err(Error::InvalidField(format!("{v} is neither squarefree nor a fundamental discriminant")))
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Fundamental discriminant `D`.
    pub fn disc(&self) -> i64 {
        self.disc
    }

    /// Trace of `w`.
    pub fn omega_trace(&self) -> i64 {
        self.disc
    }

    /// Norm of `w`.
    pub fn omega_norm(&self) -> i64 {
        (self.disc * self.disc - self.disc) / 4
    }

    pub fn elem(&self, a: Q, b: Q) -> Elem {
        Elem { a, b, disc: self.disc }
    }

    pub fn int(&self, a: i64, b: i64) -> Elem {
        self.elem(q(a), q(b))
    }

    pub fn rational(&self, a: Q) -> Elem {
        self.elem(a, Q::zero())
    }

    pub fn zero(&self) -> Elem {
        self.int(0, 0)
    }

    pub fn one(&self) -> Elem {
        self.int(1, 0)
    }

    pub fn omega(&self) -> Elem {
        self.int(0, 1)
    }

    /// `sqrt(D) = 2w - D`.
    pub fn sqrt_disc(&self) -> Elem {
        self.int(-self.disc, 2)
    }

    /// `sqrt(d)`; equals `sqrt(D)` or `sqrt(D)/2`.
    pub fn sqrt_d(&self) -> Elem {
        let s = self.sqrt_disc();
        if self.disc == self.d {
            s
        } else {
            s.scale(&qf(1, 2))
        }
    }

    /// The roots of unity in `O_K`.
    pub fn units(&self) -> Vec<Elem> {
        let mut out = vec![self.one(), -self.one()];
        match self.d {
            -1 => {
                let i = self.sqrt_d();
                out.push(i.clone());
                out.push(-i);
            }
            -3 => {
                // (1 + sqrt -3)/2 generates the sixth roots of unity
                let z = (self.one() + self.sqrt_d()).scale(&qf(1, 2));
                let mut p = z.clone();
                for _ in 0..5 {
                    if !out.contains(&p) {
                        out.push(p.clone());
                    }
                    p = &p * &z;
                }
            }
            _ => {}
        }
        out.sort();
        out
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt {})", self.d)
    }
}

/// `a + b w` with rational `a, b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Elem {
    a: Q,
    b: Q,
    disc: i64,
}

impl PartialOrd for Elem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Elem {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.a, &self.b).cmp(&(&other.a, &other.b))
    }
}

impl Elem {
    pub fn a(&self) -> &Q {
        &self.a
    }

    pub fn b(&self) -> &Q {
        &self.b
    }

    pub fn disc(&self) -> i64 {
        self.disc
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn zero_like(&self) -> Elem {
        Elem { a: Q::zero(), b: Q::zero(), disc: self.disc }
    }

    pub fn one_like(&self) -> Elem {
        Elem { a: Q::one(), b: Q::zero(), disc: self.disc }
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }

    fn omega_norm(&self) -> Q {
        q((self.disc * self.disc - self.disc) / 4)
    }

    pub fn conj(&self) -> Elem {
        // conj(w) = D - w
        Elem { a: &self.a + &self.b * q(self.disc), b: -&self.b, disc: self.disc }
    }

    pub fn norm(&self) -> Q {
        &self.a * &self.a + &self.a * &self.b * q(self.disc) + &self.b * &self.b * self.omega_norm()
    }

    pub fn trace(&self) -> Q {
        &self.a * q(2) + &self.b * q(self.disc)
    }

    /// Real part of the complex embedding, `trace/2`.
    pub fn re(&self) -> Q {
        self.trace() / q(2)
    }

    pub fn scale(&self, s: &Q) -> Elem {
        Elem { a: &self.a * s, b: &self.b * s, disc: self.disc }
    }

    pub fn inv(&self) -> Result<Elem> {
        if self.is_zero() {
            return Err(Error::Singular);
        }
        let n = self.norm();
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn div(&self, other: &Elem) -> Result<Elem> {
        Ok(self * &other.inv()?)
    }

    /// Least common denominator of both coordinates.
    pub fn denominator(&self) -> BigInt {
        self.a.denom().lcm(self.b.denom())
    }

    /// Approximate complex value, for diagnostics only.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        let a = ratio_to_f64(&self.a);
        let b = ratio_to_f64(&self.b);
        let d = self.disc as f64;
        (a + b * d / 2.0, b * (-d).sqrt() / 2.0)
    }

    pub fn to_pair(&self) -> [String; 2] {
        [q_to_string(&self.a), q_to_string(&self.b)]
    }

    pub fn from_pair(field: &QuadField, p: &[String; 2]) -> Result<Elem> {
        Ok(field.elem(q_from_str(&p[0])?, q_from_str(&p[1])?))
    }
}

pub fn ratio_to_f64(x: &Q) -> f64 {
    use num_traits::ToPrimitive;
    match (x.numer().to_f64(), x.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() && d != 0.0 => n / d,
        _ => {
            // very large entries: shift both down
            let bits = x.numer().bits().max(x.denom().bits()) as i64 - 60;
            let shift = bits.max(0) as usize;
            let n = (x.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (x.denom() >> shift).to_f64().unwrap_or(1.0);
            if d == 0.0 {
                if x.is_negative() { f64::MIN } else { f64::MAX }
            } else {
                n / d
            }
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "({})w", self.b)
        } else {
            write!(f, "{} + ({})w", self.a, self.b)
        }
    }
}

impl<'a> Add<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn add(self, o: &Elem) -> Elem {
        debug_assert_eq!(self.disc, o.disc);
        Elem { a: &self.a + &o.a, b: &self.b + &o.b, disc: self.disc }
    }
}

impl<'a> Sub<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn sub(self, o: &Elem) -> Elem {
        debug_assert_eq!(self.disc, o.disc);
        Elem { a: &self.a - &o.a, b: &self.b - &o.b, disc: self.disc }
    }
}

impl<'a> Mul<&'a Elem> for &'a Elem {
    type Output = Elem;
    fn mul(self, o: &Elem) -> Elem {
        debug_assert_eq!(self.disc, o.disc);
        // w^2 = D w - N(w)
        let bd = &self.b * &o.b;
        Elem {
            a: &self.a * &o.a - &bd * self.omega_norm(),
            b: &self.a * &o.b + &self.b * &o.a + bd * q(self.disc),
            disc: self.disc,
        }
    }
}

impl Neg for &Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        Elem { a: -&self.a, b: -&self.b, disc: self.disc }
    }
}

impl Neg for Elem {
    type Output = Elem;
    fn neg(self) -> Elem {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Elem> for Elem {
            type Output = Elem;
            fn $m(self, o: Elem) -> Elem {
                (&self).$m(&o)
            }
        }
        impl<'a> $tr<&'a Elem> for Elem {
            type Output = Elem;
            fn $m(self, o: &Elem) -> Elem {
                (&self).$m(o)
            }
        }
        impl<'a> $tr<Elem> for &'a Elem {
            type Output = Elem;
            fn $m(self, o: Elem) -> Elem {
                self.$m(&o)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_field_conventions() {
        let k = QuadField::new(-15).unwrap();
        assert_eq!(k.disc(), -15);
        assert_eq!(k.omega_norm(), 60);
        let k = QuadField::new(-1).unwrap();
        assert_eq!(k.disc(), -4);
        // w = -2 + i
        let i = k.sqrt_d();
        assert_eq!(&i * &i, -k.one());
        assert_eq!(k.omega(), k.int(-2, 0) + i);
        assert_eq!(QuadField::new(-5).unwrap().disc(), -20);
        assert!(QuadField::new(3).is_err());
        assert!(QuadField::new(-12).is_err());
        assert!(QuadField::new(0).is_err());
    }

    #[test]
    fn same_ring_as_half_integral_generator() {
        // Z[(1 + sqrt -15)/2] = Z + Z w
        let k = QuadField::new(-15).unwrap();
        let theta = (k.one() + k.sqrt_d()).scale(&qf(1, 2));
        assert!(theta.is_integral());
        assert_eq!(theta, k.int(8, 1));
        assert!(k.omega().is_integral());
        let w_back = &theta - &k.int(8, 0);
        assert_eq!(w_back, k.omega());
    }

    #[test]
    fn conj_norm_trace_examples() {
        let k = QuadField::new(-15).unwrap();
        let one = k.one();
        assert_eq!(one.conj(), one);
        assert_eq!(one.norm(), q(1));
        assert_eq!(one.trace(), q(2));
        let w = k.omega();
        assert_eq!(w.norm(), q(60));
        assert_eq!(w.trace(), q(-15));
        let s = k.sqrt_d();
        assert_eq!(s.norm(), q(15));
        assert_eq!(s.trace(), q(0));
        assert_eq!(&w * &w.conj(), k.rational(q(60)));
    }

    #[test]
    fn from_disc_or_d() {
        assert_eq!(QuadField::from_disc_or_d(-20).unwrap().d(), -5);
        assert_eq!(QuadField::from_disc_or_d(-15).unwrap().d(), -15);
        assert_eq!(QuadField::from_disc_or_d(-84).unwrap().d(), -21);
        assert!(QuadField::from_disc_or_d(-16).is_err());
    }

    #[test]
    fn units() {
        assert_eq!(QuadField::new(-1).unwrap().units().len(), 4);
        assert_eq!(QuadField::new(-3).unwrap().units().len(), 6);
        assert_eq!(QuadField::new(-21).unwrap().units().len(), 2);
        let k = QuadField::new(-3).unwrap();
        for u in k.units() {
            assert_eq!(u.norm(), q(1));
            assert!(u.is_integral());
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(q_from_str("-3/6").unwrap(), qf(-1, 2));
        assert_eq!(q_to_string(&qf(4, 2)), "2");
        assert_eq!(q_to_string(&qf(-1, 2)), "-1/2");
        assert!(q_from_str("1/0").is_err());
    }
}
