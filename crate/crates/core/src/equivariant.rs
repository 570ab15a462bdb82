//! Invariant form spaces of finite groups and the equivariant Voronoi walk.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{pairing_gram, sym_dim, HermForm};
use crate::isometry::FiniteMatrixGroup;
use crate::lattice::{PseudoLattice, WeightMode};
use crate::linalg::{identity, inverse, mat_mul, mat_vec, nullspace, primitive, transpose, KMat, QMat, QVec};
use crate::qfield::{q, QuadField, Q};
use crate::voronoi::{k_rank, walk, well_rounded_classes, FacetTarget, MinimalClass, Space, Walk, WalkOptions};

/// Matrix of `F -> g^dagger F g` on coordinates (acting on columns).
pub fn action_matrix(k: &QuadField, g: &KMat) -> QMat {
    let n = g.n();
    let m = sym_dim(n);
    let cols: Vec<QVec> = (0..m)
        .map(|j| {
            let mut e = vec![Q::zero(); m];
            e[j] = q(1);
            HermForm::from_sym(k, n, &e).transform(g).sym()
        })
        .collect();
    transpose(&cols)
}

#[derive(Clone, Debug)]
pub struct FixedSpace {
    pub group: FiniteMatrixGroup,
    /// Rows span the invariant forms.
    pub basis: QMat,
    /// Orthogonal projection onto the span of `basis` for the trace pairing.
    pub projector: QMat,
}

impl FixedSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn space(&self) -> Space {
        Space::invariant(&self.group, self.basis.clone())
    }

    pub fn project(&self, f: &HermForm) -> HermForm {
        HermForm::from_sym(self.group.field(), self.group.n(), &mat_vec(&self.projector, &f.sym()))
    }

    pub fn contains(&self, f: &HermForm) -> bool {
        self.group.generators().iter().all(|g| &f.transform(g) == f)
    }
}

pub fn fixed_space(g: &FiniteMatrixGroup) -> Result<FixedSpace> {
    let k = *g.field();
    let n = g.n();
    let m = sym_dim(n);
    let mut rows: QMat = Vec::new();
    for x in g.generators() {
        let mut a = action_matrix(&k, x);
        for (i, row) in a.iter_mut().enumerate() {
            row[i] -= q(1);
        }
        rows.extend(a);
    }
    let basis: QMat = if rows.is_empty() { identity(m) } else { nullspace(&rows, m).iter().map(|v| primitive(v)).collect() };
    if basis.is_empty() {
        return Err(Error::Internal("group fixes no form".into()));
    }
    // P = B^T (B G B^T)^{-1} B G
    let gram = pairing_gram(&k, n);
    let bg = mat_mul(&basis, &gram);
    let inner = inverse(&mat_mul(&bg, &transpose(&basis)))?;
    let projector = mat_mul(&mat_mul(&transpose(&basis), &inner), &bg);
    Ok(FixedSpace { group: g.clone(), basis, projector })
}

/// `(1/|G|) sum g^dagger F g`.
pub fn average(f: &HermForm, g: &FiniteMatrixGroup) -> HermForm {
    let mut s = vec![Q::zero(); sym_dim(f.n())];
    for x in g.elements() {
        for (a, b) in s.iter_mut().zip(f.transform(x).sym()) {
            *a += b;
        }
    }
    let ord = q(g.order() as i64);
    let s: QVec = s.into_iter().map(|x| x / &ord).collect();
    HermForm::from_sym(&f.field(), f.n(), &s)
}

#[derive(Clone, Debug)]
pub struct GWalk {
    pub fixed: FixedSpace,
    pub walk: Walk,
}

impl GWalk {
    pub fn dead_ends(&self) -> usize {
        self.walk.dead_ends()
    }
}

/// Equivariant Voronoi walk; every `G`-perfect form is checked to be well rounded.
pub fn g_perfect_walk(g: &FiniteMatrixGroup, l: &PseudoLattice, mode: WeightMode, opts: &WalkOptions) -> Result<GWalk> {
    let fixed = fixed_space(g)?;
    let w = walk(&fixed.space(), l, mode, opts)?;
    for p in &w.nodes {
        let vs: Vec<_> = p.min.vectors.iter().map(|v| v.x.clone()).collect();
        if k_rank(&vs) != l.n() {
            return Err(Error::Internal("G-perfect form is not well rounded".into()));
        }
    }
    Ok(GWalk { fixed, walk: w })
}

/// Well-rounded `G`-minimal classes with their full stabilizers.
pub fn g_minimal_classes(gw: &GWalk, l: &PseudoLattice) -> Result<Vec<MinimalClass>> {
    well_rounded_classes(&gw.walk, l)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
pub struct GPerfectSummary {
    pub size: usize,
    pub aut: String,
    pub facets: usize,
    pub dead_ends: usize,
    pub eigenvector_dead_ends: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupReport {
    pub group: String,
    pub order: usize,
    pub fixed_dim: usize,
    pub perfect_forms: Vec<GPerfectSummary>,
    /// Labels of the full stabilizers of the well-rounded `G`-minimal classes.
    pub face_stabilizers: Vec<String>,
}

pub fn group_report(gw: &GWalk, classes: &[MinimalClass]) -> GroupReport {
    let perfect_forms = gw
        .walk
        .nodes
        .iter()
        .map(|p| {
            let dead: Vec<bool> = p
                .facets
                .iter()
                .filter_map(|f| match f.target {
                    Some(FacetTarget::DeadEnd { eigenvectors }) => Some(eigenvectors),
                    _ => None,
                })
                .collect();
            GPerfectSummary {
                size: p.min.size(),
                aut: p.aut.label(),
                facets: p.facets.len(),
                dead_ends: dead.len(),
                eigenvector_dead_ends: dead.iter().filter(|&&e| e).count(),
            }
        })
        .collect();
    let mut face_stabilizers: Vec<String> = classes.iter().map(|c| c.stabilizer.label()).collect();
    face_stabilizers.sort();
    GroupReport {
        group: gw.fixed.group.label(),
        order: gw.fixed.group.order(),
        fixed_dim: gw.fixed.dim(),
        perfect_forms,
        face_stabilizers,
    }
}
