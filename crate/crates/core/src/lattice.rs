//! Pseudo-lattices `L = e_1 c_1 + ... + e_n c_n` in `K^n`, coefficient ideals and weights.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideals::{class_of, Ideal, IdealClass, IdealRepr};
use crate::linalg::KMat;
use crate::qfield::{Elem, QuadField, Q};

pub type KVec = Vec<Elem>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WeightMode {
    /// Constant weight 1.
    Phi0,
    /// `1 / N_x`, the inverse minimal norm of the class of the coefficient ideal.
    Phi1,
}

impl WeightMode {
    pub fn name(&self) -> &'static str {
        match self {
            WeightMode::Phi0 => "phi0",
            WeightMode::Phi1 => "phi1",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "phi0" => Ok(WeightMode::Phi0),
            "phi1" => Ok(WeightMode::Phi1),
            _ => Err(Error::Parse(format!("unknown weight {s:?}, expected phi0 or phi1"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PseudoLattice {
    field: QuadField,
    coeff: Vec<Ideal>,
    zbasis: Vec<KVec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeRepr {
    pub disc: i64,
    pub n: usize,
    pub steinitz: [i64; 3],
    pub coeff_ideals: Vec<IdealRepr>,
}

impl PseudoLattice {
    pub fn new(k: &QuadField, coeff: Vec<Ideal>) -> Result<Self> {
        if coeff.is_empty() {
            return Err(Error::Parse("lattice of rank 0".into()));
        }
        let n = coeff.len();
        let mut zbasis = Vec::with_capacity(2 * n);
        for (i, c) in coeff.iter().enumerate() {
            for b in c.zbasis() {
                let mut v = vec![k.zero(); n];
                v[i] = b;
                zbasis.push(v);
            }
        }
        Ok(PseudoLattice { field: *k, coeff, zbasis })
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.coeff.len()
    }

    pub fn coeff_ideals(&self) -> &[Ideal] {
        &self.coeff
    }

    /// The `2n` Z-basis vectors, coordinate-major.
    pub fn zbasis(&self) -> &[KVec] {
        &self.zbasis
    }

    pub fn steinitz(&self) -> IdealClass {
        let prod = self.coeff.iter().skip(1).fold(self.coeff[0].clone(), |acc, c| acc.mul(c));
        class_of(&prod)
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        v.len() == self.n() && v.iter().zip(&self.coeff).all(|(x, c)| c.contains(x))
    }

    /// Rational coordinates in the Z-basis.
    pub fn to_zq(&self, v: &[Elem]) -> Vec<Q> {
        let mut out = Vec::with_capacity(2 * self.n());
        for (x, c) in v.iter().zip(&self.coeff) {
            let (s, t) = c.coords(x);
            out.push(s);
            out.push(t);
        }
        out
    }

    /// Integer coordinates in the Z-basis, or `None` if `v` is not in `L`.
    pub fn to_z(&self, v: &[Elem]) -> Option<Vec<BigInt>> {
        let zq = self.to_zq(v);
        if zq.iter().all(|x| x.is_integer()) {
            Some(zq.into_iter().map(|x| x.to_integer()).collect())
        } else {
            None
        }
    }

    pub fn from_z(&self, z: &[BigInt]) -> KVec {
        let mut v = vec![self.field.zero(); self.n()];
        for (zi, b) in z.iter().zip(&self.zbasis) {
            if zi.is_zero() {
                continue;
            }
            let s = Q::from_integer(zi.clone());
            for (vj, bj) in v.iter_mut().zip(b) {
                *vj = &*vj + &bj.scale(&s);
            }
        }
        v
    }

    pub fn to_repr(&self) -> LatticeRepr {
        LatticeRepr {
            disc: self.field.disc(),
            n: self.n(),
            steinitz: self.steinitz().triple(),
            coeff_ideals: self.coeff.iter().map(|c| c.to_repr()).collect(),
        }
    }

    pub fn from_repr(r: &LatticeRepr) -> Result<Self> {
        let k = QuadField::from_disc_or_d(r.disc)?;
        let coeff = r.coeff_ideals.iter().map(|c| Ideal::from_repr(&k, c)).collect::<Result<Vec<_>>>()?;
        if coeff.len() != r.n {
            return Err(Error::Parse("rank does not match the number of coefficient ideals".into()));
        }
        let l = PseudoLattice::new(&k, coeff)?;
        if l.steinitz().triple() != r.steinitz {
            return Err(Error::Parse("Steinitz class does not match the coefficient ideals".into()));
        }
        Ok(l)
    }
}

/// `L(c) = e_1 O + ... + e_{n-1} O + e_n c`.
pub fn standard_lattice(k: &QuadField, c: &Ideal, n: usize) -> PseudoLattice {
    let mut coeff = vec![Ideal::unit(k); n];
    coeff[n - 1] = c.clone();
    PseudoLattice::new(k, coeff).expect("rank >= 1")
}

/// `a_l = sum_i c_i^{-1} l_i`.
pub fn coefficient_ideal(l: &PseudoLattice, v: &[Elem]) -> Result<Ideal> {
    let mut acc: Option<Ideal> = None;
    for (x, c) in v.iter().zip(l.coeff_ideals()) {
        if x.is_zero() {
            continue;
        }
        let term = c.inverse().mul_elem(x)?;
        acc = Some(match acc {
            None => term,
            Some(a) => a.add(&term),
        });
    }
    acc.ok_or(Error::ZeroVector)
}

pub fn weight(l: &PseudoLattice, v: &[Elem], mode: WeightMode) -> Result<Q> {
    match mode {
        WeightMode::Phi0 => {
            if v.iter().all(|x| x.is_zero()) {
                return Err(Error::ZeroVector);
            }
            Ok(Q::from_integer(1.into()))
        }
        WeightMode::Phi1 => {
            let a = coefficient_ideal(l, v)?;
            Ok(Q::new(1.into(), class_of(&a).min_norm().into()))
        }
    }
}

/// `gL = L`.
pub fn gl_membership(l: &PseudoLattice, g: &KMat) -> Result<bool> {
    if g.n() != l.n() {
        return Err(Error::Parse("matrix size does not match lattice rank".into()));
    }
    let gi = g.inverse()?;
    Ok(l.zbasis().iter().all(|b| l.contains(&g.apply(b)) && l.contains(&gi.apply(b))))
}

/// Elementary generators of a subgroup of `GL(L)`: transvections `I + x E_ij` with `x`
/// running over a Z-basis of `c_i c_j^{-1}`, diagonal units and coordinate swaps between
/// equal coefficient ideals.
pub fn elementary_generators(l: &PseudoLattice) -> Vec<KMat> {
    let k = l.field();
    let n = l.n();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let ideal = l.coeff_ideals()[i].mul(&l.coeff_ideals()[j].inverse());
            for x in ideal.zbasis() {
                for s in [x.clone(), -x] {
                    let mut g = KMat::identity(k, n);
                    g.set(i, j, s);
                    out.push(g);
                }
            }
        }
    }
    for i in 0..n {
        for u in k.units() {
            if u.is_one() {
                continue;
            }
            let mut g = KMat::identity(k, n);
            g.set(i, i, u);
            out.push(g);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if l.coeff_ideals()[i] == l.coeff_ideals()[j] {
                let mut g = KMat::identity(k, n);
                g.set(i, i, k.zero());
                g.set(j, j, k.zero());
                g.set(i, j, k.one());
                g.set(j, i, k.one());
                out.push(g);
            }
        }
    }
    out
}

/// A random product of `len` elementary generators.
pub fn random_gl_element<R: Rng>(l: &PseudoLattice, len: usize, rng: &mut R) -> KMat {
    let gens = elementary_generators(l);
    let mut g = KMat::identity(l.field(), l.n());
    for _ in 0..len {
        g = g.mul(&gens[rng.gen_range(0..gens.len())]);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::primes_above;
    use crate::qfield::{q, qf};

    fn setup() -> (QuadField, PseudoLattice, PseudoLattice, Ideal) {
        let k = QuadField::new(-15).unwrap();
        let p2 = primes_above(&k, 2)[0].clone();
        let l0 = standard_lattice(&k, &Ideal::unit(&k), 2);
        let l1 = standard_lattice(&k, &p2, 2);
        (k, l0, l1, p2)
    }

    #[test]
    fn steinitz_classes() {
        let (k, l0, l1, p2) = setup();
        assert!(l0.steinitz().is_principal());
        assert_eq!(l1.steinitz(), class_of(&p2));
        let lp = standard_lattice(&k, &Ideal::principal(&k, &k.int(3, 1)).unwrap(), 2);
        assert!(lp.steinitz().is_principal());
    }

    #[test]
    fn coefficient_ideal_examples() {
        let (k, l0, l1, p2) = setup();
        assert!(coefficient_ideal(&l0, &[k.one(), k.zero()]).unwrap().is_unit());
        let a = coefficient_ideal(&l1, &[k.zero(), k.int(2, 0)]).unwrap();
        assert_eq!(a, p2.conj());
        assert_eq!(a.norm(), q(2));
        assert_eq!(coefficient_ideal(&l0, &[k.int(2, 0), k.zero()]).unwrap().norm(), q(4));
        assert_eq!(coefficient_ideal(&l0, &[k.zero(), k.zero()]), Err(Error::ZeroVector));
    }

    #[test]
    fn weights() {
        let (k, l0, l1, _) = setup();
        let v = [k.zero(), k.int(2, 0)];
        assert_eq!(weight(&l1, &v, WeightMode::Phi0).unwrap(), q(1));
        assert_eq!(weight(&l1, &v, WeightMode::Phi1).unwrap(), qf(1, 2));
        assert_eq!(weight(&l0, &[k.int(1, 1), k.int(3, 0)], WeightMode::Phi1).unwrap(), q(1));
        let g = QuadField::new(-1).unwrap();
        let lg = standard_lattice(&g, &Ideal::unit(&g), 2);
        assert_eq!(weight(&lg, &[g.int(2, 1), g.int(1, 0)], WeightMode::Phi1).unwrap(), q(1));
    }

    #[test]
    fn membership() {
        let (k, l0, l1, _) = setup();
        assert!(gl_membership(&l0, &KMat::identity(&k, 2)).unwrap());
        let mut e = KMat::identity(&k, 2);
        e.set(0, 1, k.omega());
        assert!(gl_membership(&l0, &e).unwrap());
        let mut f = KMat::identity(&k, 2);
        f.set(1, 0, k.one());
        assert!(!gl_membership(&l1, &f).unwrap());
        let z = KMat::from_rows(vec![vec![k.zero(), k.zero()], vec![k.zero(), k.zero()]]);
        assert_eq!(gl_membership(&l0, &z), Err(Error::Singular));
    }

    #[test]
    fn generators_lie_in_gl() {
        let (_, l0, l1, _) = setup();
        for l in [&l0, &l1] {
            for g in elementary_generators(l) {
                assert!(gl_membership(l, &g).unwrap(), "{g}");
            }
        }
    }

    #[test]
    fn z_coordinates_round_trip() {
        let (k, _, l1, _) = setup();
        let v = vec![k.int(3, -2), k.int(2, 0)];
        let z = l1.to_z(&v).unwrap();
        assert_eq!(l1.from_z(&z), v);
        assert!(l1.to_z(&[k.zero(), k.one()]).is_none());
    }

    #[test]
    fn repr_round_trip() {
        let (_, _, l1, _) = setup();
        assert_eq!(PseudoLattice::from_repr(&l1.to_repr()).unwrap(), l1);
    }
}
