//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use ugv::forms::{line_key, trace_gram, HermForm};
use ugv::ideals::ClassGroup;
use ugv::lattice::{coefficient_ideal, gl_membership, KVec, PseudoLattice};
use ugv::linalg::{inverse, KMat};
use ugv::qfield::{q, Elem, QuadField, Q};
use ugv::voronoi::{is_positive_semidefinite, line_search, MinimalClass, Walk};
use ugv::lattice::WeightMode;

/// Small random positive definite binary Hermitian form.
pub fn random_pd_form<R: Rng>(k: &QuadField, rng: &mut R) -> HermForm {
    loop {
        let a = Q::new(rng.gen_range(1..=6).into(), rng.gen_range(1..=2).into());
        let c = Q::new(rng.gen_range(1..=6).into(), rng.gen_range(1..=2).into());
        let u = Q::new(rng.gen_range(-4..=4).into(), 2.into());
        let v = Q::new(rng.gen_range(-2..=2).into(), (2 * k.disc().abs()).into());
        let f = HermForm::from_sym(k, 2, &[a, c, u, v]);
        if f.is_positive_definite() {
            return f;
        }
    }
}

fn isqrt_floor(x: &Q) -> i64 {
    let f = x.to_f64().expect("finite");
    let mut r = f.sqrt().floor() as i64 + 1;
    while Q::from_integer((r * r).into()) > *x {
        r -= 1;
    }
    r
}

/// `min F[l] / N(a_l)` by scanning a box that is certified by Cauchy-Schwarz.
pub fn brute_cusp_minimum(f: &HermForm, l: &PseudoLattice) -> Q {
    let g = trace_gram(f, l);
    let gi = inverse(&g).expect("definite");
    let m = g.len();
    let ratio = |v: &KVec| f.evaluate(v) / coefficient_ideal(l, v).unwrap().norm();
    let mut upper: Option<Q> = None;
    for b in l.zbasis() {
        let r = ratio(b);
        if upper.as_ref().is_none_or(|u| &r < u) {
            upper = Some(r);
        }
    }
    let upper = upper.unwrap();
    // every line has a vector whose coefficient ideal has norm <= max class min norm
    let bmax = q(ClassGroup::new(l.field()).max_min_norm());
    let radius = &upper * &bmax;
    let bounds: Vec<i64> = (0..m).map(|i| isqrt_floor(&(&gi[i][i] * &radius))).collect();
    let den = g.iter().flatten().fold(BigInt::from(1), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let gint: Vec<Vec<i128>> =
        g.iter().map(|r| r.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer().to_i128().unwrap()).collect()).collect();
    let lim = (&radius * Q::from_integer(den.clone())).floor().to_integer().to_i128().unwrap();
    let mut best = upper;
    let mut z = vec![0i64; m];
    fn rec(i: usize, z: &mut Vec<i64>, bounds: &[i64], visit: &mut dyn FnMut(&[i64])) {
        if i == z.len() {
            visit(z);
            return;
        }
        for c in -bounds[i]..=bounds[i] {
            z[i] = c;
            rec(i + 1, z, bounds, visit);
        }
    }
    rec(0, &mut z, &bounds, &mut |z: &[i64]| {
        if z.iter().all(|&c| c == 0) {
            return;
        }
        let mut val: i128 = 0;
        for i in 0..m {
            for j in 0..m {
                val += gint[i][j] * z[i] as i128 * z[j] as i128;
            }
        }
        if val > lim {
            return;
        }
        let zb: Vec<BigInt> = z.iter().map(|&c| c.into()).collect();
        let v = l.from_z(&zb);
        let r = ratio(&v);
        if r < best {
            best = r;
        }
    });
    best
}

/// Stabilizer of a set of lines by brute force over images of a basis.
pub fn naive_set_stabilizer(vectors: &[KVec], l: &PseudoLattice) -> BTreeSet<KMat> {
    let k = *l.field();
    let keys: BTreeSet<KVec> = vectors.iter().map(|v| line_key(v)).collect();
    let x1 = &vectors[0];
    let x2 = vectors.iter().find(|v| !det2(x1, v).is_zero()).expect("spanning");
    let xinv = KMat::from_cols(&[x1.clone(), x2.clone()]).inverse().unwrap();
    // g preserves coefficient ideals, so g x = lambda y with a_x = a_y lambda
    let images = |x: &KVec| -> Vec<KVec> {
        let ax = coefficient_ideal(l, x).unwrap();
        let mut out = Vec::new();
        for y in vectors {
            let ratio = ax.mul(&coefficient_ideal(l, y).unwrap().inverse());
            if let Some(lam) = ratio.generator() {
                for u in k.units() {
                    let m = &lam * &u;
                    out.push(y.iter().map(|c| c * &m).collect::<KVec>());
                }
            }
        }
        out
    };
    let (im1, im2) = (images(x1), images(x2));
    let mut out = BTreeSet::new();
    for y1 in &im1 {
        for y2 in &im2 {
            if det2(y1, y2).is_zero() {
                continue;
            }
            let g = KMat::from_cols(&[y1.clone(), y2.clone()]).mul(&xinv);
            if !gl_membership(l, &g).unwrap() {
                continue;
            }
            if vectors.iter().all(|v| keys.contains(&line_key(&g.apply(v)))) {
                out.insert(g);
            }
        }
    }
    out
}

fn det2(a: &[Elem], b: &[Elem]) -> Elem {
    &(&a[0] * &b[1]) - &(&a[1] * &b[0])
}

/// A form in the relative interior of the class: the perfect form pushed along a
/// random positive combination of the facet normals containing the face.
pub fn class_sample<R: Rng>(w: &Walk, c: &MinimalClass, l: &PseudoLattice, rng: &mut R) -> HermForm {
    let (ni, labels) = &c.source;
    let node = &w.nodes[*ni];
    let k = *l.field();
    let mut r = vec![Q::zero(); node.form.sym().len()];
    for f in node.facets.iter().filter(|f| f.labels.is_superset(labels)) {
        let nf = w.space.form(&f.normal_local).sym();
        let cf = q(rng.gen_range(1..=5));
        for (a, b) in r.iter_mut().zip(nf) {
            *a += &cf * b;
        }
    }
    let rf = HermForm::from_sym(&k, 2, &r);
    let t = if is_positive_semidefinite(&rf) { q(1) } else { line_search(&node.form, &rf, l, w.mode).unwrap() / q(2) };
    let s: Vec<Q> = node.form.sym().iter().zip(rf.sym()).map(|(a, b)| a + &t * b).collect();
    HermForm::from_sym(&k, 2, &s)
}

pub fn line_keys(vs: &[KVec]) -> BTreeSet<KVec> {
    vs.iter().map(|v| line_key(v)).collect()
}

pub fn minimal_lines(f: &HermForm, l: &PseudoLattice, mode: WeightMode) -> BTreeSet<KVec> {
    let m = ugv::forms::minimum_and_minimal_vectors(f, l, mode).unwrap();
    m.vectors.iter().map(|v| line_key(&v.x)).collect()
}
