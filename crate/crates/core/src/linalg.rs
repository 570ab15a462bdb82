//! Dense exact linear algebra over `Q` and over `K`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::qfield::{Elem, QuadField, Q};

pub type QVec = Vec<Q>;
pub type QMat = Vec<QVec>;
pub type IVec = Vec<BigInt>;
pub type IMat = Vec<IVec>;

pub fn zeros(r: usize, c: usize) -> QMat {
    vec![vec![Q::zero(); c]; r]
}

pub fn identity(n: usize) -> QMat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn transpose(m: &QMat) -> QMat {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &QMat, b: &QMat) -> QMat {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| row.iter().zip(b).fold(Q::zero(), |acc, (x, br)| acc + x * &br[j]))
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &QMat, v: &[Q]) -> QVec {
    a.iter().map(|row| dot(row, v)).collect()
}

pub fn vec_mat(v: &[Q], a: &QMat) -> QVec {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| v.iter().zip(a).fold(Q::zero(), |acc, (x, r)| acc + x * &r[j])).collect()
}

pub fn scale_vec(v: &[Q], s: &Q) -> QVec {
    v.iter().map(|x| x * s).collect()
}

pub fn add_vec(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_vec(a: &[Q], b: &[Q]) -> QVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Reduced row echelon form; returns the matrix and its pivot columns.
pub fn rref(m: &QMat) -> (QMat, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let t = &f * &a[r][j];
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank(rows: &[QVec]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rref(&rows.to_vec()).1.len()
}

/// Basis of `{x : m x = 0}` where `m` has `cols` columns.
pub fn nullspace(m: &[QVec], cols: usize) -> Vec<QVec> {
    if m.is_empty() {
        return identity(cols);
    }
    let (r, pivots) = rref(&m.to_vec());
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); cols];
        v[free] = Q::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -r[i][free].clone();
        }
        out.push(v);
    }
    out
}

pub fn inverse(m: &QMat) -> Result<QMat> {
    let n = m.len();
    let aug: QMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(Error::Singular);
    }
    Ok(r.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn det(m: &QMat) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    d
}

/// Solve `m x = b`; `None` if inconsistent. Picks free variables as zero.
pub fn solve(m: &QMat, b: &[Q]) -> Option<QVec> {
    let cols = m.first().map_or(0, |r| r.len());
    let aug: QMat = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r[i][cols].clone();
    }
    Some(x)
}

/// Scales a nonzero vector to a primitive integral vector with the same direction.
pub fn primitive(v: &[Q]) -> QVec {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|x| Q::from_integer(x / &g)).collect()
}

pub fn int_to_q(m: &IMat) -> QMat {
    m.iter().map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect()).collect()
}

pub fn q_to_int(m: &QMat) -> Result<IMat> {
    m.iter()
        .map(|r| {
            r.iter()
                .map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(Error::Internal("non-integral matrix".into())) })
                .collect()
        })
        .collect()
}

pub fn int_identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn int_mul(a: &IMat, b: &IMat) -> IMat {
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| (0..cols).map(|j| row.iter().zip(b).fold(BigInt::zero(), |acc, (x, br)| acc + x * &br[j])).collect())
        .collect()
}

pub fn int_inverse(m: &IMat) -> Result<IMat> {
    q_to_int(&inverse(&int_to_q(m))?)
}

pub fn is_zero_vec(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn sign_of(x: &Q) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Square matrix over `K`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KMat {
    n: usize,
    e: Vec<Elem>,
}

impl KMat {
    pub fn from_rows(rows: Vec<Vec<Elem>>) -> KMat {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "KMat must be square");
        KMat { n, e: rows.into_iter().flatten().collect() }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<Elem>]) -> KMat {
        let n = cols.len();
        let e = (0..n).flat_map(|i| cols.iter().map(move |c| c[i].clone())).collect();
        KMat { n, e }
    }

    pub fn identity(k: &QuadField, n: usize) -> KMat {
        KMat { n, e: (0..n * n).map(|i| if i / n == i % n { k.one() } else { k.zero() }).collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Elem) {
        self.e[i * self.n + j] = x;
    }

    pub fn rows(&self) -> Vec<Vec<Elem>> {
        self.e.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn col(&self, j: usize) -> Vec<Elem> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, o: &KMat) -> KMat {
        let n = self.n;
        let mut e = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut s = self.get(i, 0) * o.get(0, j);
                for k in 1..n {
                    s = s + self.get(i, k) * o.get(k, j);
                }
                e.push(s);
            }
        }
        KMat { n, e }
    }

    pub fn apply(&self, v: &[Elem]) -> Vec<Elem> {
        (0..self.n)
            .map(|i| {
                let mut s = self.get(i, 0) * &v[0];
                for k in 1..self.n {
                    s = s + self.get(i, k) * &v[k];
                }
                s
            })
            .collect()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> KMat {
        let n = self.n;
        let mut e = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                e.push(self.get(j, i).conj());
            }
        }
        KMat { n, e }
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() }))
    }

    pub fn det(&self) -> Elem {
        let n = self.n;
        let mut a = self.rows();
        let mut d = self.e[0].one_like();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
                return d.zero_like();
            };
            if p != c {
                a.swap(p, c);
                d = -d;
            }
            d = &d * &a[c][c];
            let inv = a[c][c].inv().expect("nonzero pivot");
            for i in c + 1..n {
                if !a[i][c].is_zero() {
                    let f = &a[i][c] * &inv;
                    for j in c..n {
                        let t = &f * &a[c][j];
                        a[i][j] = &a[i][j] - &t;
                    }
                }
            }
        }
        d
    }

    pub fn inverse(&self) -> Result<KMat> {
        let n = self.n;
        let mut a = self.rows();
        let zero = self.e[0].zero_like();
        let one = self.e[0].one_like();
        let mut inv: Vec<Vec<Elem>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect()).collect();
        for c in 0..n {
            let p = (c..n).find(|&i| !a[i][c].is_zero()).ok_or(Error::Singular)?;
            a.swap(p, c);
            inv.swap(p, c);
            let pinv = a[c][c].inv()?;
            for j in 0..n {
                a[c][j] = &a[c][j] * &pinv;
                inv[c][j] = &inv[c][j] * &pinv;
            }
            for i in 0..n {
                if i != c && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..n {
                        a[i][j] = &a[i][j] - &(&f * &a[c][j]);
                        inv[i][j] = &inv[i][j] - &(&f * &inv[c][j]);
                    }
                }
            }
        }
        Ok(KMat::from_rows(inv))
    }

    pub fn entries(&self) -> &[Elem] {
        &self.e
    }

    pub fn to_json(&self) -> Vec<Vec<[String; 2]>> {
        self.rows().iter().map(|r| r.iter().map(|x| x.to_pair()).collect()).collect()
    }
}

impl fmt::Display for KMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")).collect();
        write!(f, "[{}]", rows.join("; "))
    }
}
