//! Automorphism groups and isometries of Hermitian forms on a lattice `L`.
//!
//! Everything is reduced to the Z-lattice underlying `L` with two bilinear forms:
//! the trace Gram matrix `G1` and `G2 = G1 J`, where `J` is multiplication by `w`.
//! A Z-linear map preserving both commutes with `J`, hence is `O_K`-linear.

pub mod backtrack;
pub mod group;
pub mod smallgroups;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::forms::{canonical_form, line_key, trace_gram, HermForm};
use crate::lattice::{gl_membership, KVec, PseudoLattice};
use crate::linalg::{int_to_q, inverse, mat_mul, transpose, IMat, KMat, QMat};
use crate::qfield::{QuadField, Q};
use crate::reduce::{lll_gram, short_vectors_gram};

pub use group::{Fingerprint, FiniteMatrixGroup, GroupRepr};

use backtrack::{IMat128, Side, Target};

/// Restriction of scalars of `(L, F)`.
#[derive(Clone, Debug)]
pub struct ZModel {
    pub g1: QMat,
    pub g2: QMat,
    /// Columns: coordinates of `b_i w`.
    pub j: IMat,
}

pub fn omega_matrix(l: &PseudoLattice) -> IMat {
    let w = l.field().omega();
    let cols: Vec<Vec<BigInt>> = l
        .zbasis()
        .iter()
        .map(|b| {
            let bw: KVec = b.iter().map(|x| x * &w).collect();
            l.to_z(&bw).expect("lattice is O-stable")
        })
        .collect();
    let m = cols.len();
    (0..m).map(|i| (0..m).map(|j| cols[j][i].clone()).collect()).collect()
}

pub fn zmodel(f: &HermForm, l: &PseudoLattice) -> ZModel {
    let g1 = trace_gram(f, l);
    let j = omega_matrix(l);
    let g2 = mat_mul(&g1, &int_to_q(&j));
    ZModel { g1, g2, j }
}

fn lcm_den(ms: &[&QMat]) -> BigInt {
    let mut l = BigInt::one();
    for m in ms {
        for row in m.iter() {
            for x in row {
                l = l.lcm(x.denom());
            }
        }
    }
    l
}

fn to_i128(m: &QMat, scale: &BigInt) -> Result<IMat128> {
    let s = Q::from_integer(scale.clone());
    m.iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let y = x * &s;
                    debug_assert!(y.is_integer());
                    y.to_integer().to_i128().ok_or(Error::Overflow("scaled Gram matrix"))
                })
                .collect()
        })
        .collect()
}

fn conj_by(u: &IMat, m: &QMat) -> QMat {
    let uq = int_to_q(u);
    mat_mul(&mat_mul(&uq, m), &transpose(&uq))
}

fn signed_short_vectors(g: &QMat, bound: &Q) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::new();
    for (v, _) in short_vectors_gram(g, bound)? {
        let v: Vec<i64> = v.iter().map(|x| x.to_i64().ok_or(Error::Overflow("short vector"))).collect::<Result<_>>()?;
        out.push(v.iter().map(|x| -x).collect());
        out.push(v);
    }
    Ok(out)
}

/// Search data for maps onto `(L, F2)`: a reduced basis of `L` for `F2`.
struct Prepared {
    u: IMat,
    t1: QMat,
    t2: QMat,
    bound: Q,
}

fn prepare(zm: &ZModel) -> Result<Prepared> {
    let (t1, u) = lll_gram(&zm.g1)?;
    let t2 = conj_by(&u, &zm.g2);
    let bound = (0..t1.len()).map(|i| t1[i][i].clone()).max().expect("nonempty");
    Ok(Prepared { u, t1, t2, bound })
}

/// All (or the first) `g` in `GL(L)` with `g^dagger F1 g = F2`.
fn isometries_impl(f1: &HermForm, f2: &HermForm, l: &PseudoLattice, all: bool) -> Result<Vec<KMat>> {
    if !f1.is_positive_definite() || !f2.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    if f1.det() != f2.det() {
        return Ok(Vec::new());
    }
    let z1 = zmodel(f1, l);
    let z2 = zmodel(f2, l);
    let p = prepare(&z2)?;
    let scale = lcm_den(&[&z1.g1, &z1.g2, &z2.g1, &z2.g2, &p.t1, &p.t2]);
    let src_vecs = signed_short_vectors(&z1.g1, &p.bound)?;
    let tgt_vecs = signed_short_vectors(&z2.g1, &p.bound)?;
    if src_vecs.len() != tgt_vecs.len() {
        return Ok(Vec::new());
    }
    let src = Side::new(to_i128(&z1.g1, &scale)?, to_i128(&z1.g2, &scale)?, src_vecs)?;
    let tside = Side::new(to_i128(&z2.g1, &scale)?, to_i128(&z2.g2, &scale)?, tgt_vecs)?;
    let basis: Vec<Vec<i64>> = p
        .u
        .iter()
        .map(|r| r.iter().map(|x| x.to_i64().ok_or(Error::Overflow("reduced basis"))).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let fps = basis.iter().map(|b| tside.fingerprint_of(b)).collect::<Result<Vec<_>>>()?;
    let tgt = Target { t1: to_i128(&p.t1, &scale)?, t2: to_i128(&p.t2, &scale)?, fps };
    let sols = backtrack::search(&src, &tgt, all);
    let uinv = inverse(&int_to_q(&p.u))?;
    let mut out = Vec::with_capacity(sols.len());
    for s in sols {
        let g = to_kmatrix(l, &src, &s, &uinv)?;
        debug_assert_eq!(f1.transform(&g), *f2);
        out.push(g);
    }
    Ok(out)
}

/// From images of the reduced basis to the K-matrix of the map.
fn to_kmatrix(l: &PseudoLattice, src: &Side, sol: &[usize], uinv: &QMat) -> Result<KMat> {
    let k = l.field();
    let n = l.n();
    let m = 2 * n;
    let imgs: Vec<KVec> = sol
        .iter()
        .map(|&v| l.from_z(&src.vecs[v].iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>()))
        .collect();
    // g(b_j) = sum_i uinv[j][i] g(b'_i)
    let img_of_old = |j: usize| -> KVec {
        let mut acc = vec![k.zero(); n];
        for (i, im) in imgs.iter().enumerate().take(m) {
            let c = &uinv[j][i];
            if c.is_zero() {
                continue;
            }
            for (a, x) in acc.iter_mut().zip(im) {
                *a = &*a + &x.scale(c);
            }
        }
        acc
    };
    let mut cols = Vec::with_capacity(n);
    for c in 0..n {
        let beta = l.zbasis()[2 * c][c].clone();
        let binv = beta.inv()?;
        cols.push(img_of_old(2 * c).iter().map(|x| x * &binv).collect::<Vec<_>>());
    }
    Ok(KMat::from_cols(&cols))
}

/// Some `g` in `GL(L)` with `g^dagger F1 g = F2`.
pub fn isometry(f1: &HermForm, f2: &HermForm, l: &PseudoLattice) -> Result<Option<KMat>> {
    Ok(isometries_impl(f1, f2, l, false)?.into_iter().next())
}

/// All isometries from `F1` to `F2`; a coset `g_0 Aut_L(F2)`.
pub fn all_isometries(f1: &HermForm, f2: &HermForm, l: &PseudoLattice) -> Result<Vec<KMat>> {
    isometries_impl(f1, f2, l, true)
}

pub fn aut_group(f: &HermForm, l: &PseudoLattice) -> Result<FiniteMatrixGroup> {
    let els = isometries_impl(f, f, l, true)?;
    FiniteMatrixGroup::from_elements(l.field(), l.n(), els)
}

pub fn identify_group(g: &FiniteMatrixGroup) -> String {
    g.label()
}

/// Stabilizer of a finite set of lines spanning `K^n`, via the canonical form.
pub fn set_stabilizer(vectors: &[KVec], l: &PseudoLattice) -> Result<FiniteMatrixGroup> {
    let k = l.field();
    let t = canonical_form(k, l.n(), vectors);
    if t.det().is_zero() {
        return Err(Error::NotWellRounded);
    }
    let g = aut_group(&t.inverse()?, l)?;
    let keys: BTreeSet<KVec> = vectors.iter().map(|x| line_key(x)).collect();
    for h in g.elements() {
        for x in vectors {
            if !keys.contains(&line_key(&h.apply(x))) {
                return Err(Error::Internal("automorphism of the canonical form does not permute the lines".into()));
            }
        }
    }
    Ok(g)
}

/// Brute force: `g` is determined by the images of `e_1 beta_1, ..., e_n beta_n`.
pub fn naive_aut_group(f: &HermForm, l: &PseudoLattice) -> Result<FiniteMatrixGroup> {
    let k: QuadField = *l.field();
    let n = l.n();
    let g1 = trace_gram(f, l);
    let targets: Vec<KVec> = (0..n).map(|c| l.zbasis()[2 * c].clone()).collect();
    let bound = targets.iter().map(|t| f.evaluate(t)).max().expect("rank >= 1");
    let mut pool: Vec<KVec> = Vec::new();
    for (z, _) in short_vectors_gram(&g1, &bound)? {
        let v = l.from_z(&z);
        pool.push(v.iter().map(|x| -x.clone()).collect());
        pool.push(v);
    }
    let options: Vec<Vec<&KVec>> =
        targets.iter().map(|t| pool.iter().filter(|v| f.evaluate(v) == f.evaluate(t)).collect()).collect();
    let mut found = Vec::new();
    let mut idx = vec![0usize; n];
    if options.iter().any(|o| o.is_empty()) {
        return Err(Error::Internal("no candidate images".into()));
    }
    loop {
        let cols: Vec<KVec> = (0..n)
            .map(|c| {
                let binv = l.zbasis()[2 * c][c].inv().expect("nonzero");
                options[c][idx[c]].iter().map(|x| x * &binv).collect()
            })
            .collect();
        let g = KMat::from_cols(&cols);
        if !g.det().is_zero() && f.transform(&g) == *f && gl_membership(l, &g)? {
            found.push(g);
        }
        let mut c = 0;
        loop {
            if c == n {
                return FiniteMatrixGroup::from_elements(&k, n, found);
            }
            idx[c] += 1;
            if idx[c] == options[c].len() {
                idx[c] = 0;
                c += 1;
            } else {
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::{primes_above, Ideal};
    use crate::lattice::{random_gl_element, standard_lattice};
    use crate::qfield::{q, qf};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn k15() -> QuadField {
        QuadField::new(-15).unwrap()
    }

    #[test]
    fn identity_form_group() {
        let k = k15();
        let l = standard_lattice(&k, &Ideal::unit(&k), 2);
        let g = aut_group(&HermForm::identity(&k, 2), &l).unwrap();
        assert_eq!(g.order(), 8);
        assert_eq!(g.label(), "D8");
        assert_eq!(naive_aut_group(&HermForm::identity(&k, 2), &l).unwrap(), g);
        let g2 = aut_group(&HermForm::identity(&k, 2).scale(&q(2)), &l).unwrap();
        assert_eq!(g2, g);
        for h in g.elements() {
            assert!(gl_membership(&l, h).unwrap());
        }
    }

    #[test]
    fn gaussian_identity_group() {
        let k = QuadField::new(-1).unwrap();
        let l = standard_lattice(&k, &Ideal::unit(&k), 2);
        let g = aut_group(&HermForm::identity(&k, 2), &l).unwrap();
        assert_eq!(g.order(), 32);
        assert_eq!(naive_aut_group(&HermForm::identity(&k, 2), &l).unwrap(), g);
    }

    #[test]
    fn planted_isometry() {
        let k = k15();
        let l = standard_lattice(&k, &primes_above(&k, 2)[0], 2);
        let f = HermForm::from_sym(&k, 2, &[q(3), q(2), qf(1, 2), qf(1, 5)]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let g = random_gl_element(&l, 6, &mut rng);
            let f2 = f.transform(&g);
            let h = isometry(&f, &f2, &l).unwrap().expect("planted isometry");
            assert_eq!(f.transform(&h), f2);
            assert!(gl_membership(&l, &h).unwrap());
        }
    }

    #[test]
    fn non_isometric() {
        let k = k15();
        let l = standard_lattice(&k, &Ideal::unit(&k), 2);
        let f1 = HermForm::identity(&k, 2);
        let f2 = HermForm::from_sym(&k, 2, &[q(1), q(2), q(0), q(0)]);
        assert!(isometry(&f1, &f2, &l).unwrap().is_none());
    }

    #[test]
    fn stabilizer_of_basis() {
        let k = k15();
        let l = standard_lattice(&k, &Ideal::unit(&k), 2);
        let s = vec![vec![k.one(), k.zero()], vec![k.zero(), k.one()]];
        assert_eq!(set_stabilizer(&s, &l).unwrap().order(), 8);
        assert_eq!(set_stabilizer(&s[..1], &l), Err(Error::NotWellRounded));
    }

    #[test]
    fn zmodel_relations() {
        let k = k15();
        let l = standard_lattice(&k, &primes_above(&k, 2)[0], 2);
        let f = HermForm::from_sym(&k, 2, &[q(3), q(2), qf(1, 2), qf(1, 5)]);
        let z = zmodel(&f, &l);
        let aut = aut_group(&f, &l).unwrap();
        for g in aut.elements() {
            // Z-matrix of g: columns are coordinates of g b_i
            let cols: Vec<Vec<BigInt>> = l.zbasis().iter().map(|b| l.to_z(&g.apply(b)).unwrap()).collect();
            let m = cols.len();
            let gz: QMat = (0..m).map(|i| (0..m).map(|j| Q::from_integer(cols[j][i].clone())).collect()).collect();
            let gt = transpose(&gz);
            assert_eq!(mat_mul(&mat_mul(&gt, &z.g1), &gz), z.g1);
            assert_eq!(mat_mul(&mat_mul(&gt, &z.g2), &gz), z.g2);
            let jq = int_to_q(&z.j);
            assert_eq!(mat_mul(&gz, &jq), mat_mul(&jq, &gz));
        }
    }
}
