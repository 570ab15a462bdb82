//! Hermitian forms over `K`, their rational coordinates, and weighted minima on lattices.
//!
//! Coordinates of a form `F` (dimension `n^2`): the diagonal entries `F_ii`, then for each
//! pair `i < j` the two rational numbers `u, v` with `F_ij = u + v w`.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideals::{class_of, ClassGroup, IdealClass};
use crate::lattice::{coefficient_ideal, KVec, PseudoLattice, WeightMode};
use crate::linalg::{dot, KMat, QMat, QVec};
use crate::qfield::{q, q_from_str, q_to_string, Elem, QuadField, Q};
use crate::reduce::{lll_gram, short_vectors_gram};

pub fn sym_dim(n: usize) -> usize {
    n * n
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HermForm {
    m: KMat,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormRepr {
    pub n: usize,
    pub entries: Vec<Vec<[String; 2]>>,
    pub sym: Vec<String>,
}

impl HermForm {
    pub fn new(m: KMat) -> Result<Self> {
        if m.dagger() != m {
            return Err(Error::Parse("matrix is not Hermitian".into()));
        }
        Ok(HermForm { m })
    }

    pub fn identity(k: &QuadField, n: usize) -> Self {
        HermForm { m: KMat::identity(k, n) }
    }

    pub fn from_sym(k: &QuadField, n: usize, s: &[Q]) -> Self {
        assert_eq!(s.len(), sym_dim(n));
        let mut m = KMat::identity(k, n);
        for i in 0..n {
            m.set(i, i, k.rational(s[i].clone()));
        }
        for (p, (i, j)) in pairs(n).enumerate() {
            let x = k.elem(s[n + 2 * p].clone(), s[n + 2 * p + 1].clone());
            m.set(j, i, x.conj());
            m.set(i, j, x);
        }
        HermForm { m }
    }

    pub fn sym(&self) -> QVec {
        let n = self.n();
        let mut s: QVec = (0..n).map(|i| self.m.get(i, i).a().clone()).collect();
        for (i, j) in pairs(n) {
            let x = self.m.get(i, j);
            s.push(x.a().clone());
            s.push(x.b().clone());
        }
        s
    }

    pub fn matrix(&self) -> &KMat {
        &self.m
    }

    pub fn n(&self) -> usize {
        self.m.n()
    }

    pub fn field(&self) -> QuadField {
        QuadField::from_disc_or_d(self.m.get(0, 0).disc()).expect("valid discriminant")
    }

    /// `F[x] = x^dagger F x`.
    pub fn evaluate(&self, x: &[Elem]) -> Q {
        let fx = self.m.apply(x);
        let mut t = fx[0].zero_like();
        for (xi, yi) in x.iter().zip(&fx) {
            t = t + &xi.conj() * yi;
        }
        debug_assert!(t.is_rational());
        t.a().clone()
    }

    pub fn scale(&self, s: &Q) -> Self {
        let k = self.field();
        let sym: QVec = self.sym().iter().map(|x| x * s).collect();
        HermForm::from_sym(&k, self.n(), &sym)
    }

    /// `g^dagger F g`.
    pub fn transform(&self, g: &KMat) -> Self {
        HermForm { m: g.dagger().mul(&self.m).mul(g) }
    }

    pub fn det(&self) -> Q {
        self.m.det().a().clone()
    }

    pub fn is_positive_definite(&self) -> bool {
        let n = self.n();
        (1..=n).all(|r| {
            let rows: Vec<Vec<Elem>> = (0..r).map(|i| (0..r).map(|j| self.m.get(i, j).clone()).collect()).collect();
            KMat::from_rows(rows).det().a().is_positive()
        })
    }

    pub fn inverse(&self) -> Result<Self> {
        Ok(HermForm { m: self.m.inverse()? })
    }

    pub fn to_repr(&self) -> FormRepr {
        FormRepr { n: self.n(), entries: self.m.to_json(), sym: self.sym().iter().map(q_to_string).collect() }
    }

    pub fn from_repr(k: &QuadField, r: &FormRepr) -> Result<Self> {
        let sym = r.sym.iter().map(|s| q_from_str(s)).collect::<Result<Vec<_>>>()?;
        if sym.len() != sym_dim(r.n) {
            return Err(Error::Parse("wrong number of form coordinates".into()));
        }
        let f = HermForm::from_sym(k, r.n, &sym);
        if f.m.to_json() != r.entries {
            return Err(Error::Parse("form entries disagree with coordinates".into()));
        }
        Ok(f)
    }
}

/// The linear functional `F -> F[x]` in coordinates.
pub fn ev_functional(k: &QuadField, x: &[Elem]) -> QVec {
    let n = x.len();
    let mut out: QVec = x.iter().map(|xi| xi.norm()).collect();
    let w = k.omega();
    for (i, j) in pairs(n) {
        let p = &x[i].conj() * &x[j];
        out.push(p.trace());
        out.push((&w * &p).trace());
    }
    out
}

/// Coordinates of the rank one form `x x^dagger`.
pub fn projection(k: &QuadField, x: &[Elem]) -> QVec {
    let n = x.len();
    let rows: Vec<Vec<Elem>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { k.rational(x[i].norm()) } else { &x[i] * &x[j].conj() }).collect()).collect();
    HermForm { m: KMat::from_rows(rows) }.sym()
}

/// Gram matrix of the trace pairing `tr(F_1 F_2)` in coordinates.
pub fn pairing_gram(k: &QuadField, n: usize) -> QMat {
    let d = sym_dim(n);
    let mut g = vec![vec![Q::zero(); d]; d];
    for (i, row) in g.iter_mut().enumerate().take(n) {
        row[i] = q(1);
    }
    let disc = q(k.disc());
    let nw = q(2 * k.omega_norm());
    for p in 0..n * (n - 1) / 2 {
        let u = n + 2 * p;
        g[u][u] = q(2);
        g[u][u + 1] = disc.clone();
        g[u + 1][u] = disc.clone();
        g[u + 1][u + 1] = nw.clone();
    }
    g
}

pub fn pair(f1: &HermForm, f2: &HermForm) -> Q {
    let g = pairing_gram(&f1.field(), f1.n());
    let s1 = f1.sym();
    let s2 = f2.sym();
    let mut t = Q::zero();
    for (i, row) in g.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            if !x.is_zero() {
                t += x * &s1[i] * &s2[j];
            }
        }
    }
    t
}

/// `G_ij = Re(b_i^dagger F b_j)` on the Z-basis of `L`.
pub fn trace_gram(f: &HermForm, l: &PseudoLattice) -> QMat {
    let zb = l.zbasis();
    let fb: Vec<KVec> = zb.iter().map(|b| f.m.apply(b)).collect();
    let m = zb.len();
    let mut g = vec![vec![Q::zero(); m]; m];
    for i in 0..m {
        for j in i..m {
            let mut s = fb[0][0].zero_like();
            for (bi, fj) in zb[i].iter().zip(&fb[j]) {
                s = s + &bi.conj() * fj;
            }
            let r = s.re();
            g[i][j] = r.clone();
            g[j][i] = r;
        }
    }
    g
}

/// All `l` in `L - {0}` with `F[l] <= bound`, one per `+-` pair, sorted by value.
pub fn short_vectors(f: &HermForm, l: &PseudoLattice, bound: &Q) -> Result<Vec<(KVec, Q)>> {
    if !f.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let g = trace_gram(f, l);
    Ok(short_vectors_gram(&g, bound)?.into_iter().map(|(z, v)| (l.from_z(&z), v)).collect())
}

/// Scales `x` so that its first nonzero coordinate is `1`; identifies the line `xK`.
pub fn line_key(x: &[Elem]) -> KVec {
    let p = x.iter().find(|c| !c.is_zero()).expect("nonzero vector");
    let inv = p.inv().expect("nonzero");
    x.iter().map(|c| c * &inv).collect()
}

/// A minimal vector, one per line `xK`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinVec {
    pub x: KVec,
    /// `F[x]`.
    pub value: Q,
    pub class: IdealClass,
    /// `N(a_x)`, equal to the minimal norm of `class`.
    pub coeff_norm: Q,
    pub weight: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimumResult {
    pub min: Q,
    /// Sorted by line key.
    pub vectors: Vec<MinVec>,
}

impl MinimumResult {
    /// Number of minimal vectors counted up to sign.
    pub fn size(&self) -> usize {
        2 * self.vectors.len()
    }
}

fn weight_of(l: &PseudoLattice, x: &[Elem], mode: WeightMode) -> Result<(Q, IdealClass, Q)> {
    let a = coefficient_ideal(l, x)?;
    let c = class_of(&a);
    let w = match mode {
        WeightMode::Phi0 => q(1),
        WeightMode::Phi1 => Q::new(1.into(), c.min_norm().into()),
    };
    Ok((w, c, a.norm()))
}

/// Values of the LLL-reduced basis vectors, an upper bound for any minimum.
fn basis_bound<Fw: Fn(&KVec) -> Result<Q>>(f: &HermForm, l: &PseudoLattice, val: Fw) -> Result<Q> {
    let g = trace_gram(f, l);
    let (_, u) = lll_gram(&g)?;
    let mut best: Option<Q> = None;
    for row in &u {
        let v = l.from_z(row);
        let x = val(&v)?;
        if best.as_ref().is_none_or(|b| &x < b) {
            best = Some(x);
        }
    }
    best.ok_or(Error::Internal("empty basis".into()))
}

/// Weighted minimum and minimal vectors.
pub fn minimum_and_minimal_vectors(f: &HermForm, l: &PseudoLattice, mode: WeightMode) -> Result<MinimumResult> {
    if !f.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let k = l.field();
    let b = match mode {
        WeightMode::Phi0 => 1,
        WeightMode::Phi1 => ClassGroup::new(k).max_min_norm(),
    };
    let mu0 = basis_bound(f, l, |v| Ok(weight_of(l, v, mode)?.0 * f.evaluate(v)))?;
    let cands = short_vectors(f, l, &(&mu0 * q(b)))?;
    let mut min: Option<Q> = None;
    let mut lines: BTreeMap<KVec, MinVec> = BTreeMap::new();
    for (x, value) in cands {
        let (w, class, nrm) = weight_of(l, &x, mode)?;
        let val = &w * &value;
        match &min {
            Some(m) if &val > m => continue,
            Some(m) if &val < m => lines.clear(),
            _ => {}
        }
        min = Some(val);
        let key = line_key(&x);
        let mv = MinVec { x, value, class, coeff_norm: nrm, weight: w };
        match lines.get(&key) {
            Some(old) if (&old.coeff_norm, &old.x) <= (&mv.coeff_norm, &mv.x) => {}
            _ => {
                lines.insert(key, mv);
            }
        }
    }
    let min = min.ok_or(Error::Internal("no vectors below the basis bound".into()))?;
    Ok(MinimumResult { min, vectors: lines.into_values().collect() })
}

/// Minkowski bound: every ideal class contains an integral ideal of norm at most this.
fn minkowski_bound(k: &QuadField) -> i64 {
    (2.0 * (k.disc().abs() as f64).sqrt() / std::f64::consts::PI).floor() as i64 + 1
}

/// `min F[l] / N(a_l)` over `L - {0}`.
pub fn cusp_minimum(f: &HermForm, l: &PseudoLattice) -> Result<Q> {
    if !f.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let ratio = |v: &KVec| -> Result<Q> { Ok(f.evaluate(v) / coefficient_ideal(l, v)?.norm()) };
    let mu0 = basis_bound(f, l, ratio)?;
    let bound = &mu0 * q(minkowski_bound(l.field()));
    let mut best = mu0;
    for (x, _) in short_vectors(f, l, &bound)? {
        let r = ratio(&x)?;
        if r < best {
            best = r;
        }
    }
    Ok(best)
}

/// `T = sum_x x x^dagger` over the minimal lines.
pub fn canonical_form(k: &QuadField, n: usize, vectors: &[KVec]) -> HermForm {
    let mut s = vec![Q::zero(); sym_dim(n)];
    for x in vectors {
        for (si, pi) in s.iter_mut().zip(projection(k, x)) {
            *si += pi;
        }
    }
    HermForm::from_sym(k, n, &s)
}

pub fn eval_sym(ev: &[Q], s: &[Q]) -> Q {
    dot(ev, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::{primes_above, Ideal};
    use crate::lattice::standard_lattice;
    use crate::linalg::det;
    use crate::qfield::qf;

    fn k15() -> QuadField {
        QuadField::new(-15).unwrap()
    }

    fn l0(k: &QuadField) -> PseudoLattice {
        standard_lattice(k, &Ideal::unit(k), 2)
    }

    fn l1(k: &QuadField) -> PseudoLattice {
        standard_lattice(k, &primes_above(k, 2)[0], 2)
    }

    #[test]
    fn evaluate_and_pair_examples() {
        let k = k15();
        let i = HermForm::identity(&k, 2);
        assert_eq!(i.evaluate(&[k.one(), k.zero()]), q(1));
        assert_eq!(pair(&i, &i), q(2));
        assert!(i.is_positive_definite());
        let d = HermForm::from_sym(&k, 2, &[q(1), q(-1), q(0), q(0)]);
        assert!(!d.is_positive_definite());
        let w = HermForm::from_sym(&k, 2, &[q(1), q(1), q(0), q(1)]);
        assert_eq!(w.det(), q(1 - 60));
        assert!(!w.is_positive_definite());
    }

    #[test]
    fn pairing_matches_trace() {
        let k = k15();
        let f1 = HermForm::from_sym(&k, 2, &[q(3), qf(1, 2), q(-2), qf(5, 3)]);
        let f2 = HermForm::from_sym(&k, 2, &[q(-1), q(4), qf(7, 2), q(1)]);
        let prod = f1.matrix().mul(f2.matrix());
        let tr = prod.get(0, 0) + prod.get(1, 1);
        assert!(tr.is_rational());
        assert_eq!(pair(&f1, &f2), tr.a().clone());
    }

    #[test]
    fn projection_consistency() {
        let k = k15();
        let f = HermForm::from_sym(&k, 2, &[q(3), qf(1, 2), q(-2), qf(5, 3)]);
        let x = vec![k.int(2, -1), k.elem(qf(1, 3), q(4))];
        let p = HermForm::from_sym(&k, 2, &projection(&k, &x));
        assert_eq!(pair(&f, &p), f.evaluate(&x));
        assert_eq!(eval_sym(&ev_functional(&k, &x), &f.sym()), f.evaluate(&x));
    }

    #[test]
    fn trace_gram_gaussian() {
        let g = QuadField::new(-1).unwrap();
        let l = l0(&g);
        let t = trace_gram(&HermForm::identity(&g, 2), &l);
        let nw = q(g.omega_norm());
        assert_eq!([t[0][0].clone(), t[1][1].clone(), t[2][2].clone(), t[3][3].clone()], [q(1), nw.clone(), q(1), nw]);
        assert!(det(&t).is_positive());
    }

    #[test]
    fn short_vectors_identity() {
        let k = k15();
        let l = l0(&k);
        let i = HermForm::identity(&k, 2);
        let vs = short_vectors(&i, &l, &q(1)).unwrap();
        assert_eq!(vs.len(), 2);
        assert!(vs.iter().all(|(_, v)| *v == q(1)));
        assert!(short_vectors(&i, &l, &qf(1, 2)).unwrap().is_empty());
        let vs2 = short_vectors(&i.scale(&q(2)), &l, &q(2)).unwrap();
        assert_eq!(vs2.len(), 2);
        // next norm after 1 in O_K is 4
        assert_eq!(short_vectors(&i, &l, &qf(39, 10)).unwrap().len(), 4);
    }

    #[test]
    fn minimum_of_identity() {
        let k = k15();
        let r = minimum_and_minimal_vectors(&HermForm::identity(&k, 2), &l0(&k), WeightMode::Phi1).unwrap();
        assert_eq!(r.min, q(1));
        assert_eq!(r.size(), 4);
        let r1 = minimum_and_minimal_vectors(&HermForm::identity(&k, 2), &l1(&k), WeightMode::Phi1).unwrap();
        assert!(r1.min <= q(1));
        assert!(r1.vectors.iter().any(|v| v.x == vec![k.one(), k.zero()]));
    }

    #[test]
    fn homogeneity() {
        let k = k15();
        let f = HermForm::from_sym(&k, 2, &[q(3), q(2), q(1), qf(1, 7)]);
        let l = l1(&k);
        let a = minimum_and_minimal_vectors(&f, &l, WeightMode::Phi1).unwrap();
        let b = minimum_and_minimal_vectors(&f.scale(&q(2)), &l, WeightMode::Phi1).unwrap();
        assert_eq!(b.min, &a.min * q(2));
        assert_eq!(a.vectors.iter().map(|v| &v.x).collect::<Vec<_>>(), b.vectors.iter().map(|v| &v.x).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_non_pd() {
        let k = k15();
        let f = HermForm::from_sym(&k, 2, &[q(1), q(-1), q(0), q(0)]);
        assert_eq!(minimum_and_minimal_vectors(&f, &l0(&k), WeightMode::Phi0), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn repr_round_trip() {
        let k = k15();
        let f = HermForm::from_sym(&k, 2, &[q(3), qf(1, 2), q(-2), qf(5, 3)]);
        assert_eq!(HermForm::from_repr(&k, &f.to_repr()).unwrap(), f);
    }
}
