//! Fractional ideals of `O_K`, binary quadratic forms and the class group.
//!
//! Dictionary between ideals and forms (fixed once, used everywhere):
//! the primitive integral ideal `Z A + Z (-B + sqrt D)/2` corresponds to the
//! form `(A, B, C)` with `B^2 - 4AC = D`. In the `(1, w)` basis,
//! `(-B + sqrt D)/2 = (-B - D)/2 + w`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfield::{Elem, QuadField, Q};

/// Fractional ideal with Z-basis `(a/den, (b + c w)/den)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ideal {
    field: QuadField,
    den: BigInt,
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealRepr {
    pub den: String,
    pub hnf: [[String; 2]; 2],
}

/// Hermite normal form `[[a, b], [0, c]]` of the Z-span of integer vectors `(x, y)`
/// (coefficients of `1` and `w`). `None` when the span has rank < 2.
fn hnf2(gens: &[(BigInt, BigInt)]) -> Option<(BigInt, BigInt, BigInt)> {
    let mut xs: Vec<BigInt> = Vec::new();
    let mut v: Option<(BigInt, BigInt)> = None;
    for (x, y) in gens {
        if y.is_zero() {
            xs.push(x.clone());
            continue;
        }
        match v.take() {
            None => v = Some((x.clone(), y.clone())),
            Some((vx, vy)) => {
                let e = vy.extended_gcd(y);
                let g = e.gcd.clone();
                let nx = &e.x * &vx + &e.y * x;
                let ny = &e.x * &vy + &e.y * y;
                // second vector of the unimodular change, with zero w-coefficient
                let wx = (y / &g) * &vx - (&vy / &g) * x;
                xs.push(wx);
                v = Some((nx, ny));
            }
        }
    }
    let (mut vx, mut vy) = v?;
    if vy.is_negative() {
        vx = -vx;
        vy = -vy;
    }
    let a = xs.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if a.is_zero() {
        return None;
    }
    let b = vx.mod_floor(&a);
    Some((a, b, vy))
}

impl Ideal {
    /// Z-span of the given elements; the caller guarantees O-stability.
    fn from_zspan(k: &QuadField, elems: &[Elem]) -> Result<Ideal> {
        let mut l = BigInt::one();
        for e in elems {
            l = l.lcm(&e.denominator());
        }
        let lq = Q::from_integer(l.clone());
        let gens: Vec<(BigInt, BigInt)> =
            elems.iter().map(|e| ((e.a() * &lq).to_integer(), (e.b() * &lq).to_integer())).collect();
        let (a, b, c) = hnf2(&gens).ok_or(Error::ZeroIdeal)?;
        Ok(Self::normalized(*k, l, a, b, c))
    }

    fn normalized(field: QuadField, den: BigInt, a: BigInt, b: BigInt, c: BigInt) -> Ideal {
        let g = den.gcd(&a).gcd(&b).gcd(&c);
        Ideal { field, den: den / &g, a: a / &g, b: b / &g, c: c / &g }
    }

    /// The O-ideal generated by the given elements.
    pub fn from_generators(k: &QuadField, gens: &[Elem]) -> Result<Ideal> {
        let w = k.omega();
        let mut span = Vec::with_capacity(2 * gens.len());
        for g in gens {
            span.push(g.clone());
            span.push(g * &w);
        }
        Self::from_zspan(k, &span)
    }

    pub fn unit(k: &QuadField) -> Ideal {
        Ideal { field: *k, den: BigInt::one(), a: BigInt::one(), b: BigInt::zero(), c: BigInt::one() }
    }

    pub fn principal(k: &QuadField, x: &Elem) -> Result<Ideal> {
        if x.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        Self::from_generators(k, std::slice::from_ref(x))
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn hnf(&self) -> [[BigInt; 2]; 2] {
        [[self.a.clone(), self.b.clone()], [BigInt::zero(), self.c.clone()]]
    }

    pub fn zbasis(&self) -> [Elem; 2] {
        let d = Q::from_integer(self.den.clone());
        [
            self.field.elem(Q::from_integer(self.a.clone()) / &d, Q::zero()),
            self.field.elem(Q::from_integer(self.b.clone()) / &d, Q::from_integer(self.c.clone()) / &d),
        ]
    }

    pub fn norm(&self) -> Q {
        Q::new(&self.a * &self.c, &self.den * &self.den)
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_unit(&self) -> bool {
        self.den.is_one() && self.a.is_one() && self.c.is_one() && self.b.is_zero()
    }

    pub fn mul(&self, o: &Ideal) -> Ideal {
        let [x1, x2] = self.zbasis();
        let [y1, y2] = o.zbasis();
        let prods = [&x1 * &y1, &x1 * &y2, &x2 * &y1, &x2 * &y2];
        Self::from_zspan(&self.field, &prods).expect("product of nonzero ideals is nonzero")
    }

    pub fn mul_elem(&self, x: &Elem) -> Result<Ideal> {
        if x.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        let [b1, b2] = self.zbasis();
        Self::from_zspan(&self.field, &[&b1 * x, &b2 * x])
    }

    pub fn add(&self, o: &Ideal) -> Ideal {
        let [x1, x2] = self.zbasis();
        let [y1, y2] = o.zbasis();
        Self::from_zspan(&self.field, &[x1, x2, y1, y2]).expect("sum of nonzero ideals is nonzero")
    }

    pub fn conj(&self) -> Ideal {
        let [x1, x2] = self.zbasis();
        Self::from_zspan(&self.field, &[x1.conj(), x2.conj()]).expect("nonzero")
    }

    pub fn inverse(&self) -> Ideal {
        let n = self.norm().recip();
        let [x1, x2] = self.conj().zbasis();
        Self::from_zspan(&self.field, &[x1.scale(&n), x2.scale(&n)]).expect("nonzero")
    }

    /// Coordinates of `x` in the Z-basis, if `x` lies in the Q-span (always true).
    pub fn coords(&self, x: &Elem) -> (Q, Q) {
        let d = Q::from_integer(self.den.clone());
        let t = x.b() * &d / Q::from_integer(self.c.clone());
        let s = (x.a() * &d - &t * Q::from_integer(self.b.clone())) / Q::from_integer(self.a.clone());
        (s, t)
    }

    pub fn contains(&self, x: &Elem) -> bool {
        let (s, t) = self.coords(x);
        s.is_integer() && t.is_integer()
    }

    /// Checks closure under multiplication by `w`.
    pub fn is_o_stable(&self) -> bool {
        let w = self.field.omega();
        self.zbasis().iter().all(|b| self.contains(&(b * &w)))
    }

    /// Writes `I = r * J` with `r` rational positive and `J = [A, b' + w]` primitive integral.
    pub fn primitive_part(&self) -> (Q, BigInt, BigInt) {
        debug_assert!((&self.a % &self.c).is_zero() && (&self.b % &self.c).is_zero());
        let r = Q::new(self.c.clone(), self.den.clone());
        (r, &self.a / &self.c, &self.b / &self.c)
    }

    /// A generator if the ideal is principal.
    pub fn generator(&self) -> Option<Elem> {
        let [b1, b2] = self.zbasis();
        let target = self.norm();
        // norm form on the Z-basis; enumerate vectors of norm exactly N(I)
        let n11 = b1.norm();
        let n22 = b2.norm();
        let n12 = (&b1 * &b2.conj()).re();
        let gram = vec![vec![n11, n12.clone()], vec![n12, n22]];
        let vs = crate::reduce::short_vectors_gram(&gram, &target).ok()?;
        vs.into_iter()
            .find(|(_, v)| *v == target)
            .map(|(c, _)| b1.scale(&Q::from_integer(c[0].clone())) + b2.scale(&Q::from_integer(c[1].clone())))
    }

    pub fn to_repr(&self) -> IdealRepr {
        IdealRepr {
            den: self.den.to_string(),
            hnf: [[self.a.to_string(), self.b.to_string()], ["0".into(), self.c.to_string()]],
        }
    }

    pub fn from_repr(k: &QuadField, r: &IdealRepr) -> Result<Ideal> {
        let p = |s: &str| s.parse::<BigInt>().map_err(|e| Error::Parse(e.to_string()));
        let den = p(&r.den)?;
        let a = p(&r.hnf[0][0])?;
        let b = p(&r.hnf[0][1])?;
        let c = p(&r.hnf[1][1])?;
        if !den.is_positive() || !a.is_positive() || !c.is_positive() || b.is_negative() || b >= a {
            return Err(Error::Parse("ideal not in Hermite normal form".into()));
        }
        let id = Ideal::normalized(*k, den, a, b, c);
        if !id.is_o_stable() {
            return Err(Error::Parse("lattice is not an O_K-ideal".into()));
        }
        Ok(id)
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y] = self.zbasis();
        write!(f, "<{}, {}>", x, y)
    }
}

/// Primitive binary quadratic form `a x^2 + b xy + c y^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BinaryForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl BinaryForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        BinaryForm { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn principal(disc: i64) -> Self {
        let b = disc.rem_euclid(2);
        BinaryForm { a: 1, b, c: (b * b - disc) / 4 }
    }

    pub fn is_reduced(&self) -> bool {
        self.b.abs() <= self.a && self.a <= self.c && ((self.b.abs() != self.a && self.a != self.c) || self.b >= 0)
    }

    pub fn reduce(&self) -> Self {
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        let disc = b * b - 4 * a * c;
        loop {
            // normalize b into (-a, a]
            if b <= -a || b > a {
                let r = Integer::div_floor(&(a - b), &(2 * a));
                b += 2 * r * a;
                c = (b * b - disc) / (4 * a);
            }
            if a > c {
                (a, b, c) = (c, -b, a);
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        BinaryForm { a: a as i64, b: b as i64, c: c as i64 }
    }

    pub fn inverse(&self) -> Self {
        BinaryForm { a: self.a, b: -self.b, c: self.c }.reduce()
    }

    /// Gauss composition (Dirichlet's method for positive definite forms).
    pub fn compose(&self, o: &BinaryForm) -> BinaryForm {
        debug_assert_eq!(self.disc(), o.disc());
        let disc = self.disc() as i128;
        let (mut f1, mut f2) = (*self, *o);
        if f1.a > f2.a {
            std::mem::swap(&mut f1, &mut f2);
        }
        let (a1, b1) = (f1.a as i128, f1.b as i128);
        let (a2, b2, c2) = (f2.a as i128, f2.b as i128, f2.c as i128);
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (y1, d) = if a2 % a1 == 0 {
            (0, a1)
        } else {
            let e = a2.extended_gcd(&a1);
            (e.x, e.gcd)
        };
        let (x2, y2, d1) = if s % d == 0 {
            (0, -1, d)
        } else {
            let e = s.extended_gcd(&d);
            (e.x, -e.y, e.gcd)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).mod_floor(&v1);
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (b3 * b3 - disc) / (4 * a3);
        debug_assert_eq!((b3 * b3 - disc) % (4 * a3), 0);
        BinaryForm { a: a3 as i64, b: b3 as i64, c: c3 as i64 }.reduce()
    }

    /// The primitive integral ideal `[A, (-B + sqrt D)/2]`.
    pub fn to_ideal(&self, k: &QuadField) -> Ideal {
        let d = k.disc();
        let a = BigInt::from(self.a);
        let b = BigInt::from((-self.b - d) / 2).mod_floor(&a);
        Ideal { field: *k, den: BigInt::one(), a, b, c: BigInt::one() }
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// An ideal class, represented by its reduced form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdealClass {
    pub form: BinaryForm,
}

impl IdealClass {
    pub fn principal(k: &QuadField) -> Self {
        IdealClass { form: BinaryForm::principal(k.disc()).reduce() }
    }

    /// Smallest norm of an integral ideal in the class.
    pub fn min_norm(&self) -> i64 {
        self.form.a
    }

    pub fn is_principal(&self) -> bool {
        self.form.a == 1
    }

    pub fn compose(&self, o: &IdealClass) -> IdealClass {
        IdealClass { form: self.form.compose(&o.form) }
    }

    pub fn inverse(&self) -> IdealClass {
        IdealClass { form: self.form.inverse() }
    }

    /// An integral ideal of norm `min_norm` in this class.
    pub fn min_ideal(&self, k: &QuadField) -> Ideal {
        self.form.to_ideal(k)
    }

    pub fn triple(&self) -> [i64; 3] {
        [self.form.a, self.form.b, self.form.c]
    }
}

impl fmt::Display for IdealClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.form)
    }
}

pub fn class_of(ideal: &Ideal) -> IdealClass {
    let k = ideal.field;
    let (_, a, b) = ideal.primitive_part();
    let d = k.disc();
    let a = a.to_i64().expect("ideal norm fits in i64");
    let b = b.to_i64().expect("HNF entry fits in i64");
    let bb = -2 * b - d;
    let c = (bb * bb - d) / (4 * a);
    debug_assert_eq!((bb * bb - d) % (4 * a), 0);
    IdealClass { form: BinaryForm::new(a, bb, c).reduce() }
}

pub fn class_min_norm(c: &IdealClass) -> i64 {
    c.min_norm()
}

pub fn ideal_mul(i: &Ideal, j: &Ideal) -> Ideal {
    i.mul(j)
}

pub fn ideal_inverse(i: &Ideal) -> Ideal {
    i.inverse()
}

pub fn ideal_norm(i: &Ideal) -> Q {
    i.norm()
}

/// All reduced primitive forms of discriminant `D`, sorted.
pub fn reduced_forms(disc: i64) -> Vec<BinaryForm> {
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -disc {
        for b in -a + 1..=a {
            if (b - disc).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            let f = BinaryForm::new(a, b, c);
            if f.is_reduced() && a.gcd(&b).gcd(&c) == 1 {
                out.push(f);
            }
        }
        a += 1;
    }
    out.sort();
    out
}

/// The class group with its composition table.
#[derive(Clone, Debug)]
pub struct ClassGroup {
    field: QuadField,
    classes: Vec<IdealClass>,
    table: Vec<Vec<usize>>,
}

impl ClassGroup {
    pub fn new(k: &QuadField) -> ClassGroup {
        let classes: Vec<IdealClass> = reduced_forms(k.disc()).into_iter().map(|form| IdealClass { form }).collect();
        let index = |c: &IdealClass| classes.iter().position(|x| x == c).expect("closed under composition");
        let table = classes.iter().map(|x| classes.iter().map(|y| index(&x.compose(y))).collect()).collect();
        ClassGroup { field: *k, classes, table }
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn order(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[IdealClass] {
        &self.classes
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn index_of(&self, c: &IdealClass) -> usize {
        self.classes.iter().position(|x| x == c).expect("class belongs to this group")
    }

    pub fn identity(&self) -> usize {
        // the principal form (1, b, c) sorts first
        0
    }

    pub fn pow(&self, x: usize, e: u64) -> usize {
        let mut r = self.identity();
        for _ in 0..e {
            r = self.table[r][x];
        }
        r
    }

    pub fn element_order(&self, x: usize) -> u64 {
        let mut r = x;
        let mut k = 1;
        while r != self.identity() {
            r = self.table[r][x];
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u64 {
        (0..self.order()).map(|x| self.element_order(x)).fold(1, |acc, o| acc.lcm(&o))
    }

    /// Largest class minimal norm, the enumeration factor for weight `phi_1`.
    pub fn max_min_norm(&self) -> i64 {
        self.classes.iter().map(|c| c.min_norm()).max().unwrap_or(1)
    }

    /// The subgroup of n-th powers.
    pub fn powers(&self, n: u64) -> BTreeSet<usize> {
        (0..self.order()).map(|x| self.pow(x, n)).collect()
    }

    /// Cosets of `Cl^n`, each as a sorted list of class indices; the principal coset first.
    pub fn cosets_mod_powers(&self, n: u64) -> Vec<Vec<usize>> {
        let h = self.powers(n);
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for x in 0..self.order() {
            if seen.contains(&x) {
                continue;
            }
            let coset: BTreeSet<usize> = h.iter().map(|&y| self.table[x][y]).collect();
            seen.extend(coset.iter().copied());
            out.push(coset.into_iter().collect());
        }
        out
    }
}

pub fn class_group(k: &QuadField) -> ClassGroup {
    ClassGroup::new(k)
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

/// Prime ideals above the rational prime `p`, sorted by Hermite normal form.
pub fn primes_above(k: &QuadField, p: u64) -> Vec<Ideal> {
    let pi = p as i64;
    let d = k.disc();
    let n = k.omega_norm();
    // roots of x^2 - D x + N(w) mod p
    let roots: Vec<i64> = (0..pi).filter(|s| (s * s - d * s + n).rem_euclid(pi) == 0).collect();
    let pe = k.int(pi, 0);
    let mut out: Vec<Ideal> = if roots.is_empty() {
        vec![Ideal::principal(k, &pe).expect("p != 0")]
    } else {
        roots
            .iter()
            .map(|&s| Ideal::from_generators(k, &[pe.clone(), k.int(-s, 1)]).expect("nonzero"))
            .collect()
    };
    out.sort();
    out.dedup();
    out
}

/// A representative of one class of `Cl(K)/Cl(K)^n` with a concrete integral ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinitzRep {
    pub class: IdealClass,
    /// `O_K` for the principal coset, otherwise a prime ideal of least norm in the coset.
    pub ideal: Ideal,
    /// `"principal"` or `"p<prime>,<index>"`.
    pub label: String,
}

/// One ideal class per element of `Cl(K)/Cl(K)^n`.
pub fn steinitz_reps_mod_n(k: &QuadField, n: u64) -> Vec<IdealClass> {
    steinitz_representatives(k, n).into_iter().map(|r| r.class).collect()
}

pub fn steinitz_representatives(k: &QuadField, n: u64) -> Vec<SteinitzRep> {
    let cl = ClassGroup::new(k);
    let cosets = cl.cosets_mod_powers(n);
    let mut out = Vec::new();
    for coset in cosets {
        if coset.contains(&cl.identity()) {
            out.push(SteinitzRep { class: IdealClass::principal(k), ideal: Ideal::unit(k), label: "principal".into() });
            continue;
        }
        let mut found = None;
        'search: for p in (2u64..).filter(|&p| is_prime(p)) {
            for (i, pr) in primes_above(k, p).into_iter().enumerate() {
                let c = class_of(&pr);
                if coset.contains(&cl.index_of(&c)) {
                    found = Some(SteinitzRep { class: c, ideal: pr, label: format!("p{},{}", p, i + 1) });
                    break 'search;
                }
            }
        }
        out.push(found.expect("every class contains prime ideals"));
    }
    out
}

/// Counts the primes dividing `D` (genus theory: `|Cl/Cl^2| = 2^(t-1)`).
pub fn prime_discriminant_factors(disc: i64) -> u32 {
    let mut m = disc.unsigned_abs();
    let mut t = 0;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            t += 1;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        t += 1;
    }
    t
}

pub fn rational_ideal(k: &QuadField, r: i64) -> Ideal {
    Ideal::principal(k, &k.int(r, 0)).expect("nonzero")
}
