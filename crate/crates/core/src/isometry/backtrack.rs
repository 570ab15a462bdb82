//! Backtrack search for isometries between pairs of integral bilinear forms.
//!
//! A solution is a list of images `w_0, ..., w_{m-1}` of the target basis with
//! `w_i^T A w_j = T_A[i][j]` for both forms `A`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

pub type IMat128 = Vec<Vec<i128>>;

fn mul_vec(g: &IMat128, v: &[i64]) -> Result<Vec<i128>> {
    g.iter()
        .map(|row| {
            row.iter().zip(v).try_fold(0i128, |acc, (a, &b)| {
                a.checked_mul(b as i128).and_then(|p| acc.checked_add(p)).ok_or(Error::Overflow("bilinear form"))
            })
        })
        .collect()
}

fn dot(a: &[i64], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(&x, y)| x as i128 * y).sum()
}

/// A lattice side: two forms and a sign-closed list of short vectors.
pub struct Side {
    pub g1: IMat128,
    pub g2: IMat128,
    pub vecs: Vec<Vec<i64>>,
    g1v: Vec<Vec<i128>>,
    g2v: Vec<Vec<i128>>,
    g2tv: Vec<Vec<i128>>,
    norms: Vec<i128>,
    fps: Vec<u64>,
}

fn transpose(g: &IMat128) -> IMat128 {
    let n = g.len();
    (0..n).map(|i| (0..n).map(|j| g[j][i]).collect()).collect()
}

impl Side {
    pub fn new(g1: IMat128, g2: IMat128, vecs: Vec<Vec<i64>>) -> Result<Side> {
        let g2t = transpose(&g2);
        let g1v = vecs.iter().map(|v| mul_vec(&g1, v)).collect::<Result<Vec<_>>>()?;
        let g2v = vecs.iter().map(|v| mul_vec(&g2, v)).collect::<Result<Vec<_>>>()?;
        let g2tv = vecs.iter().map(|v| mul_vec(&g2t, v)).collect::<Result<Vec<_>>>()?;
        let norms = vecs.iter().zip(&g1v).map(|(v, gv)| dot(v, gv)).collect();
        let mut s = Side { g1, g2, vecs, g1v, g2v, g2tv, norms, fps: Vec::new() };
        s.fps = (0..s.vecs.len()).map(|i| s.fingerprint_of(&s.vecs[i].clone())).collect::<Result<Vec<_>>>()?;
        Ok(s)
    }

    /// Hash of the multiset of form values between `v` and all short vectors.
    pub fn fingerprint_of(&self, v: &[i64]) -> Result<u64> {
        let mut vals: Vec<(i128, i128, i128)> = (0..self.vecs.len())
            .map(|j| (dot(v, &self.g1v[j]), dot(v, &self.g2v[j]), dot(v, &self.g2tv[j])))
            .collect();
        vals.sort_unstable();
        let mut h = DefaultHasher::new();
        vals.hash(&mut h);
        Ok(h.finish())
    }

    pub fn len(&self) -> usize {
        self.vecs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vecs.is_empty()
    }
}

/// Target data: Gram matrices of both forms on a basis, and fingerprints of that basis
/// computed against the target's own short vectors.
pub struct Target {
    pub t1: IMat128,
    pub t2: IMat128,
    pub fps: Vec<u64>,
}

/// Enumerates solutions; stops after the first one unless `all` is set.
pub fn search(src: &Side, tgt: &Target, all: bool) -> Vec<Vec<usize>> {
    let m = tgt.t1.len();
    let cands: Vec<Vec<usize>> = (0..m)
        .map(|i| (0..src.len()).filter(|&v| src.norms[v] == tgt.t1[i][i] && src.fps[v] == tgt.fps[i]).collect())
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::with_capacity(m);
    rec(src, tgt, &cands, &mut chosen, all, &mut out);
    out
}

fn rec(src: &Side, tgt: &Target, cands: &[Vec<usize>], chosen: &mut Vec<usize>, all: bool, out: &mut Vec<Vec<usize>>) -> bool {
    let i = chosen.len();
    if i == cands.len() {
        out.push(chosen.clone());
        return !all;
    }
    for &v in &cands[i] {
        let vv = &src.vecs[v];
        if dot(vv, &src.g2v[v]) != tgt.t2[i][i] {
            continue;
        }
        let ok = chosen.iter().enumerate().all(|(j, &w)| {
            dot(vv, &src.g1v[w]) == tgt.t1[i][j] && dot(vv, &src.g2v[w]) == tgt.t2[i][j] && dot(vv, &src.g2tv[w]) == tgt.t2[j][i]
        });
        if !ok {
            continue;
        }
        chosen.push(v);
        if rec(src, tgt, cands, chosen, all, out) {
            return true;
        }
        chosen.pop();
    }
    false
}
