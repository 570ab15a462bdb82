//! Voronoi's algorithm for Hermitian forms relative to a lattice and a weight.
//!
//! The walk runs inside a linear subspace of the form space, given by a rational basis:
//! the whole space for the classical algorithm, or the `G`-invariant forms for the
//! equivariant one. Minimal vectors act on the subspace through the functionals
//! `F -> w(x) F[x]`, restricted to the basis.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{
    canonical_form, ev_functional, line_key, minimum_and_minimal_vectors, sym_dim, HermForm, MinVec, MinimumResult,
};
use crate::ideals::IdealClass;
use crate::isometry::{aut_group, all_isometries, isometry, FiniteMatrixGroup};
use crate::lattice::{KVec, PseudoLattice, WeightMode};
use crate::linalg::{dot, identity, nullspace, primitive, rank, KMat, QMat, QVec};
use crate::polyhedra::Cone;
use crate::qfield::{q, q_to_string, Elem, QuadField, Q};

/// The subspace the walk lives in, with the group whose normalizer defines equivalence.
#[derive(Clone, Debug)]
pub struct Space {
    k: QuadField,
    n: usize,
    basis: QMat,
    group: FiniteMatrixGroup,
}

impl Space {
    pub fn full(k: &QuadField, n: usize) -> Space {
        Space { k: *k, n, basis: identity(sym_dim(n)), group: FiniteMatrixGroup::trivial(k, n) }
    }

    /// Rows of `basis` must span the `G`-invariant forms.
    pub fn invariant(group: &FiniteMatrixGroup, basis: QMat) -> Space {
        Space { k: *group.field(), n: group.n(), basis, group: group.clone() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &QMat {
        &self.basis
    }

    pub fn group(&self) -> &FiniteMatrixGroup {
        &self.group
    }

    pub fn field(&self) -> &QuadField {
        &self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn form(&self, local: &[Q]) -> HermForm {
        let mut s = vec![Q::zero(); sym_dim(self.n)];
        for (c, b) in local.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (si, bi) in s.iter_mut().zip(b) {
                *si += c * bi;
            }
        }
        HermForm::from_sym(&self.k, self.n, &s)
    }

    /// `F -> w F[x]` in local coordinates.
    pub fn functional(&self, mv: &MinVec) -> QVec {
        let ev = ev_functional(&self.k, &mv.x);
        self.basis.iter().map(|b| &mv.weight * dot(&ev, b)).collect()
    }

    /// A positive definite form in the subspace: the group average of the identity.
    pub fn start_form(&self) -> HermForm {
        let id = HermForm::identity(&self.k, self.n);
        let mut s = vec![Q::zero(); sym_dim(self.n)];
        for g in self.group.elements() {
            for (si, x) in s.iter_mut().zip(id.transform(g).sym()) {
                *si += x;
            }
        }
        HermForm::from_sym(&self.k, self.n, &s)
    }

    fn is_trivial(&self) -> bool {
        self.group.order() == 1
    }
}

/// Minimal vectors with positively proportional functionals merged.
#[derive(Clone, Debug)]
pub struct Generator {
    pub local: QVec,
    pub labels: BTreeSet<usize>,
}

#[derive(Clone, Debug)]
pub enum FacetTarget {
    Neighbor(usize),
    DeadEnd { eigenvectors: bool },
}

#[derive(Clone, Debug)]
pub struct Facet {
    pub normal_local: QVec,
    pub generators: BTreeSet<usize>,
    pub labels: BTreeSet<usize>,
    pub target: Option<FacetTarget>,
}

#[derive(Clone, Debug)]
pub struct PerfectForm {
    pub form: HermForm,
    pub min: MinimumResult,
    pub generators: Vec<Generator>,
    pub cone: Cone,
    pub aut: FiniteMatrixGroup,
    pub facets: Vec<Facet>,
}

impl PerfectForm {
    pub fn vectors(&self) -> &[MinVec] {
        &self.min.vectors
    }

    /// Cheap GL(L)-invariants used before isometry testing.
    pub fn invariant_key(&self) -> (usize, Q, usize, Vec<IdealClass>) {
        let mut cls: Vec<IdealClass> = self.min.vectors.iter().map(|v| v.class).collect();
        cls.sort();
        (self.min.size(), self.form.det(), self.aut.order(), cls)
    }
}

pub fn is_positive_semidefinite(f: &HermForm) -> bool {
    let n = f.n();
    (1u32..(1 << n)).all(|mask| {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let rows: Vec<Vec<Elem>> = idx.iter().map(|&i| idx.iter().map(|&j| f.matrix().get(i, j).clone()).collect()).collect();
        !KMat::from_rows(rows).det().a().is_negative()
    })
}

fn add_scaled(f: &HermForm, r: &HermForm, t: &Q) -> HermForm {
    let s: QVec = f.sym().iter().zip(r.sym()).map(|(a, b)| a + t * b).collect();
    HermForm::from_sym(&f.field(), f.n(), &s)
}

fn min_or_none(f: &HermForm, l: &PseudoLattice, mode: WeightMode) -> Result<Option<MinimumResult>> {
    if !f.is_positive_definite() {
        return Ok(None);
    }
    minimum_and_minimal_vectors(f, l, mode).map(Some)
}

/// Smallest `t > 0` at which a new vector reaches the minimum `1` on `F + tR`.
///
/// Requires `min F = 1`, `R[x] >= 0` on the minimal vectors of `F`, and `R` not
/// positive semidefinite.
pub fn line_search(f: &HermForm, r: &HermForm, l: &PseudoLattice, mode: WeightMode) -> Result<Q> {
    let one = q(1);
    let mut lo = Q::zero();
    let mut u = q(1);
    let mut hi: Option<Q> = None;
    let mut steps = 0;
    let mut cur = loop {
        steps += 1;
        if steps > 400 {
            return Err(Error::Internal("line search did not bracket".into()));
        }
        let g = add_scaled(f, r, &u);
        match min_or_none(&g, l, mode)? {
            None => {
                hi = Some(u.clone());
                u = (&lo + &u) / q(2);
            }
            Some(m) if m.min >= one => {
                lo = u.clone();
                u = match &hi {
                    Some(h) => (&u + h) / q(2),
                    None => &u * q(2),
                };
            }
            Some(m) => break m,
        }
    };
    loop {
        // crossing point of the vectors below the minimum
        let mut t: Option<Q> = None;
        for mv in &cur.vectors {
            let fx = &mv.weight * f.evaluate(&mv.x);
            let rx = &mv.weight * r.evaluate(&mv.x);
            if !rx.is_negative() {
                return Err(Error::Internal("line search: vector below minimum with R[x] >= 0".into()));
            }
            let tx = (fx - &one) / (-rx);
            if t.as_ref().is_none_or(|t0| &tx < t0) {
                t = Some(tx);
            }
        }
        let t = t.ok_or(Error::Internal("line search: no minimal vectors".into()))?;
        let g = add_scaled(f, r, &t);
        let m = min_or_none(&g, l, mode)?.ok_or(Error::Internal("line search left the cone".into()))?;
        if m.min == one {
            return Ok(t);
        }
        if m.min > one {
            return Err(Error::Internal("line search overshoot".into()));
        }
        cur = m;
    }
}

fn build_generators(space: &Space, min: &MinimumResult) -> Vec<Generator> {
    let mut by_dir: BTreeMap<QVec, BTreeSet<usize>> = BTreeMap::new();
    for (i, mv) in min.vectors.iter().enumerate() {
        let dir = primitive(&space.functional(mv));
        by_dir.entry(dir).or_default().insert(i);
    }
    by_dir.into_iter().map(|(local, labels)| Generator { local, labels }).collect()
}

fn local_rank(space: &Space, min: &MinimumResult) -> usize {
    let rows: Vec<QVec> = min.vectors.iter().map(|mv| space.functional(mv)).collect();
    rank(&rows)
}

/// Assembles a perfect form from a min-1 form whose functionals span the subspace.
pub fn perfect_form(space: &Space, f: HermForm, l: &PseudoLattice, mode: WeightMode) -> Result<PerfectForm> {
    let min = minimum_and_minimal_vectors(&f, l, mode)?;
    if min.min != q(1) {
        return Err(Error::Internal("perfect form must have minimum 1".into()));
    }
    if local_rank(space, &min) != space.dim() {
        return Err(Error::Internal("form is not perfect in the subspace".into()));
    }
    let generators = build_generators(space, &min);
    let cone = Cone::new(space.dim(), generators.iter().map(|g| g.local.clone()).collect())?;
    let facets = cone
        .facets()
        .iter()
        .zip(cone.facet_generators())
        .map(|(nrm, gens)| Facet {
            normal_local: nrm.clone(),
            generators: gens.clone(),
            labels: gens.iter().flat_map(|&g| generators[g].labels.iter().copied()).collect(),
            target: None,
        })
        .collect();
    let aut = aut_group(&f, l)?;
    Ok(PerfectForm { form: f, min, generators, cone, aut, facets })
}

/// Ascent from the group-averaged identity to a perfect form of the subspace.
pub fn initial_perfect_form(space: &Space, l: &PseudoLattice, mode: WeightMode) -> Result<PerfectForm> {
    let f0 = space.start_form();
    let m0 = minimum_and_minimal_vectors(&f0, l, mode)?;
    let mut f = f0.scale(&m0.min.recip());
    let mut min = minimum_and_minimal_vectors(&f, l, mode)?;
    let mut rk = local_rank(space, &min);
    while rk < space.dim() {
        let rows: Vec<QVec> = min.vectors.iter().map(|mv| space.functional(mv)).collect();
        let ns = nullspace(&rows, space.dim());
        let mut r = space.form(&ns[0]);
        if is_positive_semidefinite(&r) {
            r = r.scale(&q(-1));
        }
        let t = line_search(&f, &r, l, mode)?;
        f = add_scaled(&f, &r, &t);
        min = minimum_and_minimal_vectors(&f, l, mode)?;
        let nr = local_rank(space, &min);
        if nr <= rk {
            return Err(Error::Internal("ascent did not increase the perfection rank".into()));
        }
        rk = nr;
    }
    perfect_form(space, f, l, mode)
}

pub enum FlipResult {
    Neighbor(HermForm),
    DeadEnd { eigenvectors: bool },
}

/// Facet vectors are common eigenvectors of the group.
fn eigenvector_criterion(space: &Space, pf: &PerfectForm, facet: &Facet) -> bool {
    facet.labels.iter().all(|&i| {
        let x = &pf.min.vectors[i].x;
        let key = line_key(x);
        space.group.generators().iter().all(|g| line_key(&g.apply(x)) == key)
    })
}

/// The contiguous perfect form across a facet, or a dead end if the facet normal is
/// positive semidefinite.
pub fn flip(space: &Space, pf: &PerfectForm, facet: usize, l: &PseudoLattice, mode: WeightMode) -> Result<FlipResult> {
    let fct = pf.facets.get(facet).ok_or_else(|| Error::NotAFacet(format!("index {facet}")))?;
    let r = space.form(&fct.normal_local);
    if is_positive_semidefinite(&r) {
        return Ok(FlipResult::DeadEnd { eigenvectors: eigenvector_criterion(space, pf, fct) });
    }
    let t = line_search(&pf.form, &r, l, mode)?;
    Ok(FlipResult::Neighbor(add_scaled(&pf.form, &r, &t)))
}

/// Isometry `F1 -> F2` normalizing the group of the space, if any.
pub fn equivalent(space: &Space, f1: &HermForm, f2: &HermForm, l: &PseudoLattice) -> Result<Option<KMat>> {
    if space.is_trivial() {
        return isometry(f1, f2, l);
    }
    for h in all_isometries(f1, f2, l)? {
        if space.group.normalized_by(&h)? {
            return Ok(Some(h));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Default)]
pub struct WalkOptions {
    /// Shuffles the order in which facets are explored.
    pub seed: Option<u64>,
    /// Stop after this many perfect forms.
    pub max_nodes: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Walk {
    pub space: Space,
    pub mode: WeightMode,
    pub nodes: Vec<PerfectForm>,
}

impl Walk {
    pub fn dead_ends(&self) -> usize {
        self.nodes
            .iter()
            .flat_map(|n| &n.facets)
            .filter(|f| matches!(f.target, Some(FacetTarget::DeadEnd { .. })))
            .count()
    }
}

fn find_equivalent(space: &Space, nodes: &[PerfectForm], pf: &PerfectForm, l: &PseudoLattice) -> Result<Option<usize>> {
    let key = pf.invariant_key();
    for (i, nd) in nodes.iter().enumerate() {
        if nd.invariant_key() == key && equivalent(space, &nd.form, &pf.form, l)?.is_some() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Breadth-first enumeration of perfect forms of the subspace up to equivalence.
pub fn walk(space: &Space, l: &PseudoLattice, mode: WeightMode, opts: &WalkOptions) -> Result<Walk> {
    let mut rng = opts.seed.map(ChaCha8Rng::seed_from_u64);
    let first = initial_perfect_form(space, l, mode)?;
    let mut nodes = vec![first];
    let mut next = 0;
    while next < nodes.len() {
        let cur = next;
        next += 1;
        let mut order: Vec<usize> = (0..nodes[cur].facets.len()).collect();
        if let Some(r) = rng.as_mut() {
            order.shuffle(r);
        }
        let pf = nodes[cur].clone();
        let flips: Vec<(usize, Result<FlipResult>)> =
            order.par_iter().map(|&fi| (fi, flip(space, &pf, fi, l, mode))).collect();
        for (fi, res) in flips {
            let target = match res? {
                FlipResult::DeadEnd { eigenvectors } => FacetTarget::DeadEnd { eigenvectors },
                FlipResult::Neighbor(g) => {
                    let cand = perfect_form(space, g, l, mode)?;
                    match find_equivalent(space, &nodes, &cand, l)? {
                        Some(j) => FacetTarget::Neighbor(j),
                        None => {
                            if opts.max_nodes.is_some_and(|m| nodes.len() >= m) {
                                return Err(Error::Internal("too many perfect forms".into()));
                            }
                            nodes.push(cand);
                            FacetTarget::Neighbor(nodes.len() - 1)
                        }
                    }
                }
            };
            nodes[cur].facets[fi].target = Some(target);
        }
    }
    Ok(Walk { space: space.clone(), mode, nodes })
}

/// Classical walk over all Hermitian forms.
pub fn enumerate_perfect_forms(l: &PseudoLattice, mode: WeightMode, opts: &WalkOptions) -> Result<Walk> {
    walk(&Space::full(l.field(), l.n()), l, mode, opts)
}

/// Rank over `K` of a list of vectors.
pub fn k_rank(vectors: &[KVec]) -> usize {
    let mut rows: Vec<KVec> = vectors.to_vec();
    let Some(first) = rows.first() else { return 0 };
    let n = first.len();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv().expect("nonzero pivot");
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = &rows[i][c] * &inv;
                for j in 0..n {
                    let t = &f * &rows[r][j];
                    rows[i][j] = &rows[i][j] - &t;
                }
            }
        }
        r += 1;
    }
    r
}

/// A minimal class, identified by its minimal vectors (one per line).
#[derive(Clone, Debug)]
pub struct MinimalClass {
    pub vectors: Vec<MinVec>,
    /// `n^2` minus the rank of the functionals of the vectors on all forms.
    pub corank: usize,
    pub well_rounded: bool,
    pub canonical: HermForm,
    pub stabilizer: FiniteMatrixGroup,
    /// Perfect form and face it was found on.
    pub source: (usize, BTreeSet<usize>),
}

impl MinimalClass {
    pub fn size(&self) -> usize {
        2 * self.vectors.len()
    }

    pub fn kvectors(&self) -> Vec<KVec> {
        self.vectors.iter().map(|v| v.x.clone()).collect()
    }

    pub fn invariant_key(&self) -> (usize, usize, Q, usize) {
        (self.size(), self.corank, self.canonical.det(), self.stabilizer.order())
    }
}

pub fn corank(k: &QuadField, n: usize, vectors: &[MinVec]) -> usize {
    let rows: Vec<QVec> = vectors.iter().map(|v| ev_functional(k, &v.x)).collect();
    sym_dim(n) - rank(&rows)
}

/// Well-rounded faces of all domains of the walk, up to `GL(L)`-equivalence.
pub fn well_rounded_classes(w: &Walk, l: &PseudoLattice) -> Result<Vec<MinimalClass>> {
    let k = *l.field();
    let n = l.n();
    let mut faces: Vec<(usize, BTreeSet<usize>)> = Vec::new();
    for (ni, node) in w.nodes.iter().enumerate() {
        let mut seen: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        for face in node.cone.faces() {
            let labels: BTreeSet<usize> = face.generators.iter().flat_map(|&g| node.generators[g].labels.iter().copied()).collect();
            if labels.is_empty() || !seen.insert(labels.clone()) {
                continue;
            }
            let vs: Vec<KVec> = labels.iter().map(|&i| node.min.vectors[i].x.clone()).collect();
            if k_rank(&vs) == n {
                faces.push((ni, labels));
            }
        }
    }
    let built: Vec<Result<MinimalClass>> = faces
        .into_par_iter()
        .map(|(ni, labels)| {
            let node = &w.nodes[ni];
            let vectors: Vec<MinVec> = labels.iter().map(|&i| node.min.vectors[i].clone()).collect();
            let kv: Vec<KVec> = vectors.iter().map(|v| v.x.clone()).collect();
            let canonical = canonical_form(&k, n, &kv);
            let stabilizer = crate::isometry::set_stabilizer(&kv, l)?;
            Ok(MinimalClass { corank: corank(&k, n, &vectors), vectors, well_rounded: true, canonical, stabilizer, source: (ni, labels) })
        })
        .collect();
    let mut out: Vec<MinimalClass> = Vec::new();
    for c in built {
        let c = c?;
        let key = c.invariant_key();
        let mut dup = false;
        for o in &out {
            if o.invariant_key() == key && isometry(&o.canonical.inverse()?, &c.canonical.inverse()?, l)?.is_some() {
                dup = true;
                break;
            }
        }
        if !dup {
            out.push(c);
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct NodeJson {
    id: usize,
    form: crate::forms::FormRepr,
    min_vectors: Vec<Vec<[String; 2]>>,
    size: usize,
    aut_order: usize,
    aut_label: String,
}

#[derive(Serialize)]
struct EdgeJson {
    from: usize,
    facet: usize,
    to: Option<usize>,
    dead_end: bool,
}

#[derive(Serialize)]
struct GraphJson {
    space_dim: usize,
    group_order: usize,
    weight: &'static str,
    nodes: Vec<NodeJson>,
    edges: Vec<EdgeJson>,
}

impl Walk {
    pub fn to_json(&self) -> serde_json::Value {
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, nd)| NodeJson {
                id: i,
                form: nd.form.to_repr(),
                min_vectors: nd.min.vectors.iter().map(|v| v.x.iter().map(|e| e.to_pair()).collect()).collect(),
                size: nd.min.size(),
                aut_order: nd.aut.order(),
                aut_label: nd.aut.label(),
            })
            .collect();
        let mut edges = Vec::new();
        for (i, nd) in self.nodes.iter().enumerate() {
            for (fi, f) in nd.facets.iter().enumerate() {
                let (to, dead_end) = match f.target {
                    Some(FacetTarget::Neighbor(j)) => (Some(j), false),
                    Some(FacetTarget::DeadEnd { .. }) => (None, true),
                    None => (None, false),
                };
                edges.push(EdgeJson { from: i, facet: fi, to, dead_end });
            }
        }
        serde_json::to_value(GraphJson {
            space_dim: self.space.dim(),
            group_order: self.space.group.order(),
            weight: self.mode.name(),
            nodes,
            edges,
        })
        .expect("serializable")
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph perfect_forms {\n");
        for (i, nd) in self.nodes.iter().enumerate() {
            s += &format!("  p{} [label=\"P{} |S|={} {}\"];\n", i, i + 1, nd.min.size(), nd.aut.label());
        }
        let mut dead = 0;
        for (i, nd) in self.nodes.iter().enumerate() {
            for f in &nd.facets {
                match f.target {
                    Some(FacetTarget::Neighbor(j)) if i <= j => s += &format!("  p{i} -- p{j};\n"),
                    Some(FacetTarget::DeadEnd { .. }) => {
                        s += &format!("  d{dead} [shape=point];\n  p{i} -- d{dead} [style=dashed];\n");
                        dead += 1;
                    }
                    _ => {}
                }
            }
        }
        s += "}\n";
        s
    }
}

pub fn form_summary(f: &HermForm) -> Vec<String> {
    f.sym().iter().map(q_to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::{primes_above, Ideal};
    use crate::lattice::standard_lattice;

    #[test]
    fn psd_test() {
        let k = QuadField::new(-15).unwrap();
        assert!(is_positive_semidefinite(&HermForm::from_sym(&k, 2, &[q(1), q(0), q(0), q(0)])));
        assert!(!is_positive_semidefinite(&HermForm::from_sym(&k, 2, &[q(1), q(-1), q(0), q(0)])));
        assert!(!is_positive_semidefinite(&HermForm::from_sym(&k, 2, &[q(0), q(0), q(1), q(0)])));
    }

    #[test]
    fn k_rank_examples() {
        let k = QuadField::new(-15).unwrap();
        let a = vec![k.one(), k.omega()];
        let b: Vec<Elem> = a.iter().map(|x| x * &k.int(2, 1)).collect();
        assert_eq!(k_rank(&[a.clone(), b]), 1);
        assert_eq!(k_rank(&[a, vec![k.zero(), k.one()]]), 2);
    }

    #[test]
    fn ascent_reaches_perfect_form() {
        let k = QuadField::new(-15).unwrap();
        let l = standard_lattice(&k, &Ideal::unit(&k), 2);
        let space = Space::full(&k, 2);
        let p = initial_perfect_form(&space, &l, WeightMode::Phi1).unwrap();
        assert_eq!(local_rank(&space, &p.min), 4);
        assert_eq!(p.min.min, q(1));
        let l1 = standard_lattice(&k, &primes_above(&k, 2)[0], 2);
        let p1 = initial_perfect_form(&space, &l1, WeightMode::Phi1).unwrap();
        assert_eq!(p1.aut.label(), "C3:C4");
    }

    #[test]
    fn gaussian_perfect_forms() {
        let k = QuadField::new(-1).unwrap();
        let l = standard_lattice(&k, &Ideal::unit(&k), 2);
        let w = enumerate_perfect_forms(&l, WeightMode::Phi0, &WalkOptions::default()).unwrap();
        assert_eq!(w.dead_ends(), 0);
        assert!(!w.nodes.is_empty());
    }
}
