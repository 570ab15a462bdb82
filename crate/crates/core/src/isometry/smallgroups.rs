//! Small groups from explicit constructions, identified by fingerprint.

use std::sync::OnceLock;

use super::group::{fingerprint_of_table, Fingerprint};

/// Cayley table with identity `0`.
#[derive(Clone, Debug)]
pub struct CayleyTable {
    pub table: Vec<Vec<usize>>,
}

impl CayleyTable {
    fn from_mul<T: Clone + PartialEq>(elems: Vec<T>, mul: impl Fn(&T, &T) -> T) -> Self {
        let idx = |x: &T| elems.iter().position(|y| y == x).expect("closed");
        let table = elems.iter().map(|a| elems.iter().map(|b| idx(&mul(a, b))).collect()).collect();
        CayleyTable { table }
    }

    pub fn fingerprint(&self) -> Fingerprint {
        fingerprint_of_table(&self.table, 0)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }
}

/// `Z_m x| Z_k` with the generator of `Z_k` acting as multiplication by `r`.
pub fn semidirect(m: usize, k: usize, r: usize) -> CayleyTable {
    let elems: Vec<(usize, usize)> = (0..k).flat_map(|b| (0..m).map(move |a| (a, b))).collect();
    let pow = |b: usize| (0..b).fold(1usize, |acc, _| acc * r % m);
    CayleyTable::from_mul(elems, |x, y| ((x.0 + pow(x.1) * y.0) % m, (x.1 + y.1) % k))
}

pub fn cyclic(n: usize) -> CayleyTable {
    semidirect(n, 1, 1)
}

/// Dihedral group of order `2m`.
pub fn dihedral(m: usize) -> CayleyTable {
    semidirect(m, 2, m - 1)
}

pub fn direct(a: &CayleyTable, b: &CayleyTable) -> CayleyTable {
    let elems: Vec<(usize, usize)> = (0..a.order()).flat_map(|x| (0..b.order()).map(move |y| (x, y))).collect();
    CayleyTable::from_mul(elems, |x, y| (a.table[x.0][y.0], b.table[x.1][y.1]))
}

pub fn quaternion() -> CayleyTable {
    // (sign, unit) with units 1, i, j, k
    let mul_unit = |a: usize, b: usize| -> (bool, usize) {
        const T: [[(bool, usize); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        T[a][b]
    };
    let elems: Vec<(bool, usize)> = [false, true].into_iter().flat_map(|s| (0..4).map(move |u| (s, u))).collect();
    CayleyTable::from_mul(elems, |x, y| {
        let (s, u) = mul_unit(x.1, y.1);
        (x.0 ^ y.0 ^ s, u)
    })
}

fn perm_group(n: usize, gens: &[Vec<usize>]) -> CayleyTable {
    let id: Vec<usize> = (0..n).collect();
    let mut elems = vec![id];
    let mut i = 0;
    while i < elems.len() {
        for g in gens {
            let y: Vec<usize> = (0..n).map(|p| elems[i][g[p]]).collect();
            if !elems.contains(&y) {
                elems.push(y);
            }
        }
        i += 1;
    }
    CayleyTable::from_mul(elems, |a, b| (0..n).map(|p| a[b[p]]).collect())
}

pub fn alternating4() -> CayleyTable {
    perm_group(4, &[vec![1, 2, 0, 3], vec![1, 0, 3, 2]])
}

pub fn symmetric4() -> CayleyTable {
    perm_group(4, &[vec![1, 2, 3, 0], vec![1, 0, 2, 3]])
}

/// `SL_2(F_3)`.
pub fn sl2_3() -> CayleyTable {
    let mut elems = vec![[1usize, 0, 0, 1]];
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                for d in 0..3 {
                    let m = [a, b, c, d];
                    if (a * d + 3 - (b * c) % 3) % 3 == 1 && m != elems[0] {
                        elems.push(m);
                    }
                }
            }
        }
    }
    CayleyTable::from_mul(elems, |x, y| {
        [(x[0] * y[0] + x[1] * y[2]) % 3, (x[0] * y[1] + x[1] * y[3]) % 3, (x[2] * y[0] + x[3] * y[2]) % 3, (x[2] * y[1] + x[3] * y[3]) % 3]
    })
}

pub struct Entry {
    pub label: &'static str,
    pub group: CayleyTable,
}

/// Named groups with pairwise distinct fingerprints.
pub fn table() -> &'static [Entry] {
    static T: OnceLock<Vec<Entry>> = OnceLock::new();
    T.get_or_init(|| {
        let c = cyclic;
        let mut v = Vec::new();
        let names = ["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12"];
        for (i, name) in names.iter().enumerate() {
            v.push(Entry { label: name, group: c(i + 1) });
        }
        v.push(Entry { label: "V4", group: direct(&c(2), &c(2)) });
        v.push(Entry { label: "C2xC4", group: direct(&c(2), &c(4)) });
        v.push(Entry { label: "C2^3", group: direct(&direct(&c(2), &c(2)), &c(2)) });
        v.push(Entry { label: "C2xC6", group: direct(&c(2), &c(6)) });
        v.push(Entry { label: "C4xC4", group: direct(&c(4), &c(4)) });
        v.push(Entry { label: "C2xC8", group: direct(&c(2), &c(8)) });
        v.push(Entry { label: "C2^2xC4", group: direct(&direct(&c(2), &c(2)), &c(4)) });
        v.push(Entry { label: "C2^4", group: direct(&direct(&c(2), &c(2)), &direct(&c(2), &c(2))) });
        v.push(Entry { label: "C2xC12", group: direct(&c(2), &c(12)) });
        v.push(Entry { label: "C24", group: c(24) });
        v.push(Entry { label: "C16", group: c(16) });
        v.push(Entry { label: "D6", group: dihedral(3) });
        v.push(Entry { label: "D8", group: dihedral(4) });
        v.push(Entry { label: "D10", group: dihedral(5) });
        v.push(Entry { label: "D12", group: dihedral(6) });
        v.push(Entry { label: "D16", group: dihedral(8) });
        v.push(Entry { label: "D24", group: dihedral(12) });
        v.push(Entry { label: "Q8", group: quaternion() });
        v.push(Entry { label: "C3:C4", group: semidirect(3, 4, 2) });
        v.push(Entry { label: "C3:C8", group: semidirect(3, 8, 2) });
        v.push(Entry { label: "A4", group: alternating4() });
        v.push(Entry { label: "SL2(3)", group: sl2_3() });
        v.push(Entry { label: "S4", group: symmetric4() });
        v.push(Entry { label: "C2xD8", group: direct(&c(2), &dihedral(4)) });
        v.push(Entry { label: "C2xQ8", group: direct(&c(2), &quaternion()) });
        v.push(Entry { label: "C4xD8", group: direct(&c(4), &dihedral(4)) });
        v.push(Entry { label: "C2xA4", group: direct(&c(2), &alternating4()) });
        v.push(Entry { label: "C2xD12", group: direct(&c(2), &dihedral(6)) });
        v.push(Entry { label: "C3xD8", group: direct(&c(3), &dihedral(4)) });
        v.push(Entry { label: "C3xQ8", group: direct(&c(3), &quaternion()) });
        v.push(Entry { label: "C4xS3", group: direct(&c(4), &dihedral(3)) });
        v.push(Entry { label: "C2xC3:C4", group: direct(&c(2), &semidirect(3, 4, 2)) });
        v.push(Entry { label: "C6xS3", group: direct(&c(6), &dihedral(3)) });
        v.push(Entry { label: "S3xS3", group: direct(&dihedral(3), &dihedral(3)) });
        v.push(Entry { label: "C2xS4", group: direct(&c(2), &symmetric4()) });
        v.push(Entry { label: "C2xSL2(3)", group: direct(&c(2), &sl2_3()) });
        v.push(Entry { label: "C4xA4", group: direct(&c(4), &alternating4()) });
        v
    })
}

pub fn identify_fingerprint(fp: &Fingerprint) -> Option<&'static str> {
    static FPS: OnceLock<Vec<(Fingerprint, &'static str)>> = OnceLock::new();
    let fps = FPS.get_or_init(|| table().iter().map(|e| (e.group.fingerprint(), e.label)).collect());
    fps.iter().find(|(f, _)| f == fp).map(|(_, l)| *l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    #[test]
    fn fingerprints_are_unique() {
        let mut seen: BTreeMap<Fingerprint, &str> = BTreeMap::new();
        for e in table() {
            if let Some(prev) = seen.insert(e.group.fingerprint(), e.label) {
                panic!("{} and {} share a fingerprint", prev, e.label);
            }
        }
    }

    fn involutions(fp: &Fingerprint) -> usize {
        fp.orders.iter().find(|(o, _)| *o == 2).map_or(0, |(_, c)| *c)
    }

    #[test]
    fn defining_properties() {
        let v4 = direct(&cyclic(2), &cyclic(2)).fingerprint();
        assert_eq!((v4.order, involutions(&v4)), (4, 3));
        let d8 = dihedral(4).fingerprint();
        assert_eq!((d8.order, involutions(&d8)), (8, 5));
        let q8 = quaternion().fingerprint();
        assert_eq!((q8.order, involutions(&q8)), (8, 1));
        let sl = sl2_3().fingerprint();
        assert_eq!(sl.order, 24);
        assert_eq!(involutions(&sl), 1);
        assert_eq!(sl.orders.iter().find(|(o, _)| *o == 3).unwrap().1, 8);
        let dic = semidirect(3, 4, 2).fingerprint();
        assert_eq!((dic.order, involutions(&dic), dic.abelian), (12, 1, false));
        assert_eq!(symmetric4().order(), 24);
        assert_eq!(alternating4().fingerprint().derived, 4);
    }

    #[test]
    fn labels() {
        assert_eq!(identify_fingerprint(&dihedral(6).fingerprint()), Some("D12"));
        assert_eq!(identify_fingerprint(&cyclic(6).fingerprint()), Some("C6"));
        assert_eq!(identify_fingerprint(&direct(&cyclic(2), &cyclic(2)).fingerprint()), Some("V4"));
        assert_eq!(Fingerprint { order: 1000, orders: vec![(1, 1)], abelian: true, derived: 1 }.label(), "G(order=1000, fp=1^1|ab|1)");
    }
}
