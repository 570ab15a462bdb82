//! Exact rational polyhedral cones: facets by double description, faces with labels.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, inverse, mat_mul, primitive, rank, rref, solve, transpose, QMat, QVec};
use crate::qfield::{q_to_string, Q};

pub fn span_dim(vectors: &[QVec]) -> usize {
    rank(vectors)
}

/// Cone spanned by generators; facets computed on construction.
#[derive(Clone, Debug)]
pub struct Cone {
    ambient: usize,
    gens: Vec<QVec>,
    dim: usize,
    /// Facets as functionals in ambient coordinates, nonnegative on all generators.
    facets: Vec<QVec>,
    /// Generator indices on each facet.
    facet_sets: Vec<BTreeSet<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Face {
    pub generators: BTreeSet<usize>,
    pub dim: usize,
}

#[derive(Serialize)]
struct ConeDump {
    ambient: usize,
    dim: usize,
    generators: Vec<Vec<String>>,
    facets: Vec<Vec<String>>,
}

/// Extreme rays of `{f : A f >= 0}` for constraint rows spanning `Q^k`.
pub fn dual_rays(rows: &[QVec], k: usize) -> Result<Vec<QVec>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    if rank(rows) < k {
        return Err(Error::Internal("constraints do not span".into()));
    }
    // an independent subset to start from
    let mut basis_idx: Vec<usize> = Vec::new();
    let mut acc: Vec<QVec> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        acc.push(r.clone());
        if rank(&acc) > basis_idx.len() {
            basis_idx.push(i);
            if basis_idx.len() == k {
                break;
            }
        } else {
            acc.pop();
        }
    }
    let a: QMat = basis_idx.iter().map(|&i| rows[i].clone()).collect();
    let ainv = inverse(&a)?;
    let mut rays: Vec<QVec> = transpose(&ainv).into_iter().map(|c| primitive(&c)).collect();
    let mut used: Vec<usize> = basis_idx.clone();
    for (i, g) in rows.iter().enumerate() {
        if basis_idx.contains(&i) {
            continue;
        }
        let vals: Vec<Q> = rays.iter().map(|r| dot(g, r)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&j| vals[j].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&j| vals[j].is_negative()).collect();
        if neg.is_empty() {
            used.push(i);
            continue;
        }
        let zero_sets: Vec<Vec<usize>> =
            rays.iter().map(|r| used.iter().copied().filter(|&c| dot(&rows[c], r).is_zero()).collect()).collect();
        let mut next: Vec<QVec> = (0..rays.len()).filter(|j| !vals[*j].is_negative()).map(|j| rays[j].clone()).collect();
        for &p in &pos {
            for &n in &neg {
                let common: Vec<usize> = zero_sets[p].iter().copied().filter(|c| zero_sets[n].contains(c)).collect();
                if common.len() + 2 < k {
                    continue;
                }
                let m: Vec<QVec> = common.iter().map(|&c| rows[c].clone()).collect();
                if rank(&m) != k - 2 {
                    continue;
                }
                let v: QVec = rays[n].iter().zip(&rays[p]).map(|(xn, xp)| &vals[p] * xn - &vals[n] * xp).collect();
                next.push(primitive(&v));
            }
        }
        next.sort();
        next.dedup();
        rays = next;
        used.push(i);
    }
    rays.sort();
    Ok(rays)
}

impl Cone {
    pub fn new(ambient: usize, gens: Vec<QVec>) -> Result<Cone> {
        if gens.iter().any(|g| g.len() != ambient) {
            return Err(Error::Internal("generator of wrong length".into()));
        }
        let dim = rank(&gens);
        let mut facets = Vec::new();
        if dim > 0 {
            // coordinates on a basis of the span
            let (r, piv) = rref(&gens);
            let basis: QMat = r.into_iter().take(piv.len()).collect();
            let bt = transpose(&basis);
            let local: Vec<QVec> = gens.iter().map(|g| solve(&bt, g).expect("generator lies in its span")).collect();
            let lrays = dual_rays(&local, dim)?;
            // lift: f with f . basis_i = local_i, inside the span
            let gram = mat_mul(&basis, &bt);
            let ginv = inverse(&gram)?;
            for lr in lrays {
                let c: QVec = ginv.iter().map(|row| dot(row, &lr)).collect();
                let mut f = vec![Q::zero(); ambient];
                for (ci, bi) in c.iter().zip(&basis) {
                    for (fj, bj) in f.iter_mut().zip(bi) {
                        *fj += ci * bj;
                    }
                }
                facets.push(primitive(&f));
            }
        }
        let facet_sets =
            facets.iter().map(|f| (0..gens.len()).filter(|&i| dot(f, &gens[i]).is_zero()).collect()).collect();
        Ok(Cone { ambient, gens, dim, facets, facet_sets })
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[QVec] {
        &self.gens
    }

    pub fn facets(&self) -> &[QVec] {
        &self.facets
    }

    pub fn facet_generators(&self) -> &[BTreeSet<usize>] {
        &self.facet_sets
    }

    /// Indices of generators spanning extreme rays.
    pub fn extreme_generators(&self) -> BTreeSet<usize> {
        self.faces().into_iter().filter(|f| f.dim == 1).flat_map(|f| f.generators).collect()
    }

    /// All faces (intersections of facets), including the apex and the full cone.
    pub fn faces(&self) -> Vec<Face> {
        let all: BTreeSet<usize> = (0..self.gens.len()).collect();
        let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        seen.insert(all.clone());
        let mut frontier: Vec<BTreeSet<usize>> = vec![all];
        while let Some(s) = frontier.pop() {
            for f in &self.facet_sets {
                let t: BTreeSet<usize> = s.intersection(f).copied().collect();
                if seen.insert(t.clone()) {
                    frontier.push(t);
                }
            }
        }
        let mut out: Vec<Face> = seen
            .into_iter()
            .map(|s| {
                let vs: Vec<QVec> = s.iter().map(|&i| self.gens[i].clone()).collect();
                Face { dim: rank(&vs), generators: s }
            })
            .collect();
        out.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.generators.cmp(&b.generators)));
        out
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let mut rows = self.gens.clone();
        rows.push(v.to_vec());
        rank(&rows) == self.dim && self.facets.iter().all(|f| !dot(f, v).is_negative())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let fmt = |v: &QVec| v.iter().map(q_to_string).collect::<Vec<_>>();
        serde_json::to_value(ConeDump {
            ambient: self.ambient,
            dim: self.dim,
            generators: self.gens.iter().map(fmt).collect(),
            facets: self.facets.iter().map(fmt).collect(),
        })
        .expect("serializable")
    }
}

pub fn facets(c: &Cone) -> &[QVec] {
    c.facets()
}

/// Faces as `(generator index set, dimension)`, deduplicated by generator set.
pub fn faces_with_labels(c: &Cone) -> Vec<(BTreeSet<usize>, usize)> {
    c.faces().into_iter().map(|f| (f.generators, f.dim)).collect()
}
