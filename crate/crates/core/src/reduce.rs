//! Lattice reduction and short vector enumeration for rational Gram matrices.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{int_identity, IMat, IVec, QMat};
use crate::qfield::{ratio_to_f64, Q};

/// Gram-Schmidt data: `mu[i][j]` for `j < i` and squared lengths `b[i]`.
fn gso(g: &QMat) -> Result<(QMat, Vec<Q>)> {
    let n = g.len();
    let mut mu = vec![vec![Q::zero(); n]; n];
    let mut b = vec![Q::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j].clone();
            for k in 0..j {
                s -= &mu[j][k] * &mu[i][k] * &b[k];
            }
            mu[i][j] = s / &b[j];
        }
        let mut s = g[i][i].clone();
        for k in 0..i {
            s -= &mu[i][k] * &mu[i][k] * &b[k];
        }
        if !s.is_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        b[i] = s;
    }
    Ok((mu, b))
}

fn round(x: &Q) -> BigInt {
    (x + Q::new(1.into(), 2.into())).floor().to_integer()
}

/// LLL with `delta = 3/4`. Returns the reduced Gram matrix and `U` with new basis rows
/// `b'_i = sum_j U[i][j] b_j`.
pub fn lll_gram(g0: &QMat) -> Result<(QMat, IMat)> {
    let n = g0.len();
    let mut g = g0.clone();
    let mut u = int_identity(n);
    let delta = Q::new(3.into(), 4.into());
    gso(&g)?;
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let (mu, _) = gso(&g)?;
            let r = round(&mu[k][j]);
            if r.is_zero() {
                continue;
            }
            let rq = Q::from_integer(r.clone());
            // b_k -= r b_j
            let gkk = &g[k][k] - Q::from(BigInt::from(2)) * &rq * &g[k][j] + &rq * &rq * &g[j][j];
            for i in 0..n {
                if i != k {
                    let v = &g[k][i] - &rq * &g[j][i];
                    g[k][i] = v.clone();
                    g[i][k] = v;
                }
            }
            g[k][k] = gkk;
            for c in 0..n {
                let v = &u[k][c] - &r * &u[j][c];
                u[k][c] = v;
            }
        }
        let (mu, b) = gso(&g)?;
        if b[k] >= (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1] {
            k += 1;
        } else {
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    Ok((g, u))
}

fn float_floor(x: f64) -> BigInt {
    BigInt::from(x.floor() as i64)
}

/// All nonzero `v` with `v^T G v <= bound`, one per `+-` pair.
///
/// Each vector is normalized so its first nonzero coordinate is positive; the output is
/// sorted by value and then by coordinates.
pub fn short_vectors_gram(g0: &QMat, bound: &Q) -> Result<Vec<(IVec, Q)>> {
    let n = g0.len();
    if n == 0 || !bound.is_positive() {
        return Ok(Vec::new());
    }
    let (g, u) = lll_gram(g0)?;
    let (mu, b) = gso(&g)?;
    let mut out: Vec<(IVec, Q)> = Vec::new();
    let mut x: Vec<BigInt> = vec![BigInt::zero(); n];
    // depth-first over levels n-1 .. 0, remaining budget per level
    enumerate(&mu, &b, n, &mut x, bound.clone(), &mut |y: &[BigInt]| {
        if y.iter().all(|c| c.is_zero()) {
            return;
        }
        // keep one of each +- pair: last nonzero coordinate positive
        let last = y.iter().rev().find(|c| !c.is_zero()).expect("nonzero");
        if last.is_negative() {
            return;
        }
        let mut v: IVec = vec![BigInt::zero(); n];
        for (i, yi) in y.iter().enumerate() {
            if yi.is_zero() {
                continue;
            }
            for c in 0..n {
                v[c] += yi * &u[i][c];
            }
        }
        let first = v.iter().find(|c| !c.is_zero()).expect("nonzero");
        if first.is_negative() {
            for c in v.iter_mut() {
                *c = -c.clone();
            }
        }
        let val = quad_value(g0, &v);
        out.push((v, val));
    });
    out.sort_by(|p, q| p.1.cmp(&q.1).then_with(|| p.0.cmp(&q.0)));
    Ok(out)
}

fn enumerate(
    mu: &QMat,
    b: &[Q],
    level: usize,
    x: &mut Vec<BigInt>,
    budget: Q,
    visit: &mut dyn FnMut(&[BigInt]),
) {
    if level == 0 {
        visit(x);
        return;
    }
    let i = level - 1;
    let n = x.len();
    let mut c = Q::zero();
    for j in i + 1..n {
        c -= &mu[j][i] * Q::from_integer(x[j].clone());
    }
    let r2 = ratio_to_f64(&(&budget / &b[i]));
    let r = r2.max(0.0).sqrt();
    let cf = ratio_to_f64(&c);
    let lo = float_floor(cf - r) - BigInt::one();
    let hi = float_floor(cf + r) + BigInt::from(2);
    let mut t = lo;
    while t <= hi {
        let d = Q::from_integer(t.clone()) - &c;
        let used = &d * &d * &b[i];
        if used <= budget {
            x[i] = t.clone();
            enumerate(mu, b, level - 1, x, &budget - &used, visit);
        }
        t += 1;
    }
    x[i] = BigInt::zero();
}

pub fn quad_value(g: &QMat, v: &[BigInt]) -> Q {
    let mut s = Q::zero();
    for i in 0..v.len() {
        if v[i].is_zero() {
            continue;
        }
        for j in 0..v.len() {
            if v[j].is_zero() {
                continue;
            }
            s += &g[i][j] * Q::from_integer(&v[i] * &v[j]);
        }
    }
    s
}

pub fn bilinear(g: &QMat, v: &[BigInt], w: &[BigInt]) -> Q {
    let mut s = Q::zero();
    for i in 0..v.len() {
        if v[i].is_zero() {
            continue;
        }
        for j in 0..w.len() {
            s += &g[i][j] * Q::from_integer(&v[i] * &w[j]);
        }
    }
    s
}

/// Converts an integer vector to `i64`, failing on overflow.
pub fn to_i64_vec(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(|x| x.to_i64().ok_or(Error::Overflow("short vector coordinates"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::int_to_q;
    use crate::qfield::q;

    fn qm(rows: &[&[i64]]) -> QMat {
        rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect()
    }

    fn brute(g: &QMat, bound: &Q, range: i64) -> Vec<(IVec, Q)> {
        let n = g.len();
        let mut out = Vec::new();
        let mut x = vec![-range; n];
        loop {
            let v: IVec = x.iter().map(|&c| BigInt::from(c)).collect();
            let first = v.iter().find(|c| !c.is_zero());
            if let Some(f) = first {
                if f.is_positive() {
                    let val = quad_value(g, &v);
                    if &val <= bound {
                        out.push((v, val));
                    }
                }
            }
            let mut i = 0;
            loop {
                if i == n {
                    out.sort_by(|p, q| p.1.cmp(&q.1).then_with(|| p.0.cmp(&q.0)));
                    return out;
                }
                x[i] += 1;
                if x[i] > range {
                    x[i] = -range;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn lll_keeps_gram_equivalent() {
        let g = qm(&[&[10, 7, 3], &[7, 6, 2], &[3, 2, 5]]);
        let (r, u) = lll_gram(&g).unwrap();
        let uq = int_to_q(&u);
        let back = crate::linalg::mat_mul(&crate::linalg::mat_mul(&uq, &g), &crate::linalg::transpose(&uq));
        assert_eq!(back, r);
        assert_eq!(crate::linalg::det(&uq).abs(), q(1));
        assert!(r[0][0] <= g[0][0]);
    }

    #[test]
    fn matches_brute_force() {
        let g = qm(&[&[4, 1, 0, 1], &[1, 3, 1, 0], &[0, 1, 5, 2], &[1, 0, 2, 6]]);
        for b in [3, 5, 8, 12] {
            assert_eq!(short_vectors_gram(&g, &q(b)).unwrap(), brute(&g, &q(b), 5), "bound {b}");
        }
    }

    #[test]
    fn rational_gram() {
        let g: QMat = vec![vec![q(2), Q::new(1.into(), 2.into())], vec![Q::new(1.into(), 2.into()), q(2)]];
        let vs = short_vectors_gram(&g, &q(2)).unwrap();
        assert_eq!(vs.len(), 2);
        let vs = short_vectors_gram(&g, &q(3)).unwrap();
        assert_eq!(vs.len(), 3);
    }

    #[test]
    fn rejects_indefinite() {
        let g = qm(&[&[1, 2], &[2, 1]]);
        assert_eq!(short_vectors_gram(&g, &q(1)), Err(Error::NotPositiveDefinite));
    }
}
