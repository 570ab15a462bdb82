//! Explicit finite matrix groups and abstract fingerprints.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::KMat;
use crate::qfield::QuadField;

use super::smallgroups::identify_fingerprint;

/// `(order, element-order histogram, abelian, derived subgroup order)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub order: usize,
    pub orders: Vec<(usize, usize)>,
    pub abelian: bool,
    pub derived: usize,
}

/// Fingerprint of an abstract group given by its Cayley table, with identity `e`.
pub fn fingerprint_of_table(table: &[Vec<usize>], e: usize) -> Fingerprint {
    let n = table.len();
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for x in 0..n {
        let mut k = 1;
        let mut y = x;
        while y != e {
            y = table[y][x];
            k += 1;
        }
        *hist.entry(k).or_default() += 1;
    }
    let abelian = (0..n).all(|x| (0..n).all(|y| table[x][y] == table[y][x]));
    let inv: Vec<usize> = (0..n).map(|x| (0..n).find(|&y| table[x][y] == e).expect("group")).collect();
    let comms: BTreeSet<usize> =
        (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).map(|(x, y)| table[table[inv[x]][inv[y]]][table[x][y]]).collect();
    let mut derived: BTreeSet<usize> = comms.clone();
    derived.insert(e);
    loop {
        let next: BTreeSet<usize> = derived.iter().flat_map(|&a| derived.iter().map(move |&b| (a, b))).map(|(a, b)| table[a][b]).collect();
        if next.len() == derived.len() {
            break;
        }
        derived = next;
    }
    Fingerprint { order: n, orders: hist.into_iter().collect(), abelian, derived: derived.len() }
}

impl Fingerprint {
    pub fn label(&self) -> String {
        identify_fingerprint(self).map(|s| s.to_string()).unwrap_or_else(|| {
            let hist: Vec<String> = self.orders.iter().map(|(o, c)| format!("{o}^{c}")).collect();
            format!("G(order={}, fp={}|{}|{})", self.order, hist.join(","), if self.abelian { "ab" } else { "nab" }, self.derived)
        })
    }
}

/// A finite subgroup of `GL_n(K)` with its full element list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMatrixGroup {
    field: QuadField,
    n: usize,
    elements: Vec<KMat>,
    generators: Vec<KMat>,
    fingerprint: Fingerprint,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupRepr {
    pub label: String,
    pub order: usize,
    pub generators: Vec<Vec<Vec<[String; 2]>>>,
}

const MAX_ORDER: usize = 10_000;

impl FiniteMatrixGroup {
    /// Closure of the generators; fails if the group exceeds a safety bound.
    pub fn generate(k: &QuadField, n: usize, gens: &[KMat]) -> Result<Self> {
        let id = KMat::identity(k, n);
        let mut elems: BTreeSet<KMat> = BTreeSet::new();
        elems.insert(id.clone());
        let mut frontier = vec![id];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = x.mul(g);
                if elems.insert(y.clone()) {
                    if elems.len() > MAX_ORDER {
                        return Err(Error::Internal("group is not finite or too large".into()));
                    }
                    frontier.push(y);
                }
            }
        }
        Self::from_elements(k, n, elems.into_iter().collect())
    }

    /// Builds the group from a complete, closed element list.
    pub fn from_elements(k: &QuadField, n: usize, mut elements: Vec<KMat>) -> Result<Self> {
        elements.sort();
        elements.dedup();
        let index: HashMap<&KMat, usize> = elements.iter().enumerate().map(|(i, g)| (g, i)).collect();
        let mut table = vec![vec![0usize; elements.len()]; elements.len()];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                table[i][j] = *index.get(&a.mul(b)).ok_or_else(|| Error::Internal("element list not closed".into()))?;
            }
        }
        let id = KMat::identity(k, n);
        let e = *index.get(&id).ok_or_else(|| Error::Internal("identity missing".into()))?;
        let fingerprint = fingerprint_of_table(&table, e);
        // a small generating set, greedily
        let mut generators: Vec<KMat> = Vec::new();
        let mut span: BTreeSet<usize> = [e].into_iter().collect();
        for (i, g) in elements.iter().enumerate() {
            if span.contains(&i) {
                continue;
            }
            generators.push(g.clone());
            let gi: Vec<usize> = generators.iter().map(|g| index[g]).collect();
            let mut frontier: Vec<usize> = span.iter().copied().collect();
            while let Some(x) = frontier.pop() {
                for &g in &gi {
                    let y = table[x][g];
                    if span.insert(y) {
                        frontier.push(y);
                    }
                }
            }
        }
        Ok(FiniteMatrixGroup { field: *k, n, elements, generators, fingerprint })
    }

    pub fn trivial(k: &QuadField, n: usize) -> Self {
        Self::from_elements(k, n, vec![KMat::identity(k, n)]).expect("trivial group")
    }

    pub fn field(&self) -> &QuadField {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[KMat] {
        &self.elements
    }

    pub fn generators(&self) -> &[KMat] {
        &self.generators
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    pub fn label(&self) -> String {
        self.fingerprint.label()
    }

    pub fn contains(&self, g: &KMat) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn is_subgroup_of(&self, h: &FiniteMatrixGroup) -> bool {
        self.generators.iter().all(|g| h.contains(g))
    }

    /// `g G g^{-1}`.
    pub fn conjugate(&self, g: &KMat) -> Result<FiniteMatrixGroup> {
        let gi = g.inverse()?;
        let els = self.elements.iter().map(|x| g.mul(x).mul(&gi)).collect();
        Self::from_elements(&self.field, self.n, els)
    }

    /// Checks whether `g G g^{-1} = G` (enough to test generators).
    pub fn normalized_by(&self, g: &KMat) -> Result<bool> {
        let gi = g.inverse()?;
        Ok(self.generators.iter().all(|x| self.contains(&g.mul(x).mul(&gi))))
    }

    pub fn to_repr(&self) -> GroupRepr {
        GroupRepr { label: self.label(), order: self.order(), generators: self.generators.iter().map(|g| g.to_json()).collect() }
    }
}
