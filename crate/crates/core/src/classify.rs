//! Maximal finite subgroups of `GL(L)` up to conjugacy.
//!
//! Candidates are the stabilizers of the well-rounded minimal classes. A candidate `G`
//! is maximal iff no well-rounded `G`-minimal class has a larger stabilizer, and two
//! candidates are conjugate iff some isometry between their `G`-perfect forms
//! conjugates one group onto the other.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::equivariant::{fixed_space, g_minimal_classes, g_perfect_walk, group_report, FixedSpace, GWalk, GroupReport};
use crate::error::{Error, Result};
use crate::forms::{minimum_and_minimal_vectors, HermForm};
use crate::ideals::{class_of, primes_above, ClassGroup, SteinitzRep, steinitz_representatives};
use crate::isometry::{aut_group, all_isometries, FiniteMatrixGroup};
use crate::lattice::{standard_lattice, PseudoLattice, WeightMode};
use crate::linalg::{nullspace, sub_vec, KMat, QVec};
use crate::qfield::{q, QuadField};
use crate::voronoi::{enumerate_perfect_forms, well_rounded_classes, MinimalClass, Walk, WalkOptions};

/// Bumped whenever the serialized report layout changes.
pub const REPORT_VERSION: u32 = 1;

/// Column order of the summary table.
pub const SUMMARY_COLUMNS: [&str; 6] = ["D8", "D12", "V4", "SL2(3)", "Q8", "C3:C4"];

/// Resolves `principal`, `p,k` or `pP,K` to the canonical representative of its class
/// in `Cl(K)/Cl(K)^n`.
pub fn resolve_steinitz(k: &QuadField, n: usize, sel: &str) -> Result<SteinitzRep> {
    let reps = steinitz_representatives(k, n as u64);
    if sel == "principal" {
        return Ok(reps[0].clone());
    }
    let body = sel.strip_prefix('p').unwrap_or(sel);
    let (p, i) = body.split_once(',').ok_or_else(|| Error::Parse(format!("bad Steinitz selector {sel:?}")))?;
    let p: u64 = p.trim().parse().map_err(|_| Error::Parse(format!("bad prime in {sel:?}")))?;
    let i: usize = i.trim().parse().map_err(|_| Error::Parse(format!("bad index in {sel:?}")))?;
    let primes = primes_above(k, p);
    let pr = primes
        .get(i.wrapping_sub(1))
        .ok_or_else(|| Error::Parse(format!("no prime ideal number {i} above {p}")))?;
    if pr.norm() != q(p as i64) {
        return Err(Error::Parse(format!("{p} is inert, its prime ideal is principal")));
    }
    let cl = ClassGroup::new(k);
    let c = class_of(pr);
    let squares = cl.powers(n as u64);
    reps.into_iter()
        .find(|r| squares.contains(&cl.index_of(&c.compose(&r.class.inverse()))))
        .ok_or(Error::Internal("Steinitz class not found".into()))
}

/// Stabilizers of the well-rounded minimal classes, with the classical walk.
pub fn candidates(l: &PseudoLattice, mode: WeightMode, opts: &WalkOptions) -> Result<(Walk, Vec<MinimalClass>)> {
    let w = enumerate_perfect_forms(l, mode, opts)?;
    let cls = well_rounded_classes(&w, l)?;
    Ok((w, cls))
}

/// Span of `C` inside the invariant forms of its stabilizer.
#[derive(Clone, Debug)]
pub struct PiSpan {
    pub dim: usize,
    /// The `G`-perfect form on the ray when `dim == 1`.
    pub form: Option<HermForm>,
    pub aut: Option<FiniteMatrixGroup>,
}

pub fn pi_span(c: &MinimalClass, fs: &FixedSpace, l: &PseudoLattice, mode: WeightMode) -> Result<PiSpan> {
    let space = fs.space();
    let fun: Vec<QVec> = c.vectors.iter().map(|v| space.functional(v)).collect();
    let rows: Vec<QVec> = fun[1..].iter().map(|r| sub_vec(r, &fun[0])).collect();
    let ns = nullspace(&rows, space.dim());
    if ns.len() != 1 {
        return Ok(PiSpan { dim: ns.len(), form: None, aut: None });
    }
    let val = crate::linalg::dot(&fun[0], &ns[0]);
    if val.is_zero() {
        return Err(Error::Internal("degenerate invariant ray".into()));
    }
    let f = space.form(&ns[0]).scale(&val.recip());
    let m = minimum_and_minimal_vectors(&f, l, mode)?;
    if m.min != q(1) || m.vectors.len() != c.vectors.len() {
        return Err(Error::Internal("invariant ray does not carry the class".into()));
    }
    let aut = aut_group(&f, l)?;
    Ok(PiSpan { dim: 1, form: Some(f), aut: Some(aut) })
}

#[derive(Clone, Debug)]
pub struct Maximality {
    pub maximal: bool,
    /// A proper overgroup when not maximal.
    pub overgroup: Option<FiniteMatrixGroup>,
    pub report: GroupReport,
}

pub fn is_maximal_finite(gw: &GWalk, l: &PseudoLattice) -> Result<Maximality> {
    let classes = g_minimal_classes(gw, l)?;
    let ord = gw.fixed.group.order();
    let overgroup = classes.iter().find(|c| c.stabilizer.order() > ord).map(|c| c.stabilizer.clone());
    Ok(Maximality { maximal: overgroup.is_none(), overgroup, report: group_report(gw, &classes) })
}

/// Some `h` with `h G1 h^{-1} = G2`, searched among isometries between `G`-perfect forms.
pub fn conjugacy_test(gw1: &GWalk, gw2: &GWalk, l: &PseudoLattice) -> Result<Option<KMat>> {
    let g1 = &gw1.fixed.group;
    let g2 = &gw2.fixed.group;
    if g1.fingerprint() != g2.fingerprint() || gw1.fixed.dim() != gw2.fixed.dim() {
        return Ok(None);
    }
    let p1 = &gw1.walk.nodes[0];
    for p2 in &gw2.walk.nodes {
        if p2.min.size() != p1.min.size() || p2.aut.order() != p1.aut.order() || p2.form.det() != p1.form.det() {
            continue;
        }
        for g in all_isometries(&p1.form, &p2.form, l)? {
            // g^{-1} G1 g lies in Aut(F2)
            let h = g.inverse()?;
            if g1.conjugate(&h)?.elements() == g2.elements() {
                return Ok(Some(h));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ReportRow {
    pub label: String,
    pub corank: usize,
    pub size: usize,
    pub stabilizer: String,
    pub stabilizer_order: usize,
    pub dim_pi: usize,
    pub aut_f: Option<String>,
    pub maximal: bool,
    /// Index into `conjugacy_classes`.
    pub conjugacy_class: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ConjugacyClassReport {
    pub label: String,
    pub order: usize,
    pub maximal: bool,
    pub overgroup: Option<String>,
    pub group: GroupReport,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ClassificationReport {
    pub version: u32,
    pub disc: i64,
    pub steinitz: String,
    pub weight: String,
    pub n: usize,
    pub perfect_forms: Vec<String>,
    pub rows: Vec<ReportRow>,
    pub conjugacy_classes: Vec<ConjugacyClassReport>,
    /// Conjugacy classes of maximal finite subgroups by isomorphism type.
    pub summary: BTreeMap<String, usize>,
    /// Every maximal group is the stabilizer of a class spanning a ray.
    pub ray_check: bool,
}

fn row_prefix(corank: usize) -> String {
    match corank {
        0 => "P".into(),
        1 => "C".into(),
        2 => "D".into(),
        c => format!("E{c}_"),
    }
}

struct Cand {
    class: MinimalClass,
    span: PiSpan,
    gw: GWalk,
}

/// The full pipeline for one lattice.
pub fn classify_lattice(l: &PseudoLattice, steinitz: &str, mode: WeightMode, opts: &WalkOptions) -> Result<ClassificationReport> {
    let (w, classes) = candidates(l, mode, opts)?;
    let cands: Vec<Cand> = classes
        .into_par_iter()
        .map(|class| {
            let g = class.stabilizer.clone();
            let fs = fixed_space(&g)?;
            let span = pi_span(&class, &fs, l, mode)?;
            let gw = g_perfect_walk(&g, l, mode, opts)?;
            Ok(Cand { class, span, gw })
        })
        .collect::<Result<Vec<_>>>()?;

    // conjugacy classes, representatives in candidate order
    let mut reps: Vec<usize> = Vec::new();
    let mut class_of_cand: Vec<usize> = Vec::with_capacity(cands.len());
    for (i, c) in cands.iter().enumerate() {
        let mut found = None;
        for (ri, &r) in reps.iter().enumerate() {
            if conjugacy_test(&cands[r].gw, &c.gw, l)?.is_some() {
                found = Some(ri);
                break;
            }
        }
        class_of_cand.push(match found {
            Some(ri) => ri,
            None => {
                reps.push(i);
                reps.len() - 1
            }
        });
    }
    let maxi: Vec<Maximality> = reps.par_iter().map(|&r| is_maximal_finite(&cands[r].gw, l)).collect::<Result<Vec<_>>>()?;

    let mut ccs: Vec<(ConjugacyClassReport, usize)> = reps
        .iter()
        .zip(&maxi)
        .enumerate()
        .map(|(ri, (&r, m))| {
            let g = &cands[r].gw.fixed.group;
            (
                ConjugacyClassReport {
                    label: g.label(),
                    order: g.order(),
                    maximal: m.maximal,
                    overgroup: m.overgroup.as_ref().map(|h| h.label()),
                    group: m.report.clone(),
                },
                ri,
            )
        })
        .collect();
    // canonical order for conjugacy classes, independent of discovery order
    ccs.sort_by(|a, b| (&a.0.order, &a.0.label, &a.0.group, &a.0.maximal).cmp(&(&b.0.order, &b.0.label, &b.0.group, &b.0.maximal)));
    let mut new_index = vec![0; reps.len()];
    for (ni, (_, ri)) in ccs.iter().enumerate() {
        new_index[*ri] = ni;
    }

    let mut rows: Vec<ReportRow> = cands
        .iter()
        .zip(&class_of_cand)
        .map(|(c, &ri)| ReportRow {
            label: String::new(),
            corank: c.class.corank,
            size: c.class.size(),
            stabilizer: c.class.stabilizer.label(),
            stabilizer_order: c.class.stabilizer.order(),
            dim_pi: c.span.dim,
            aut_f: c.span.aut.as_ref().map(|a| a.label()),
            maximal: maxi[ri].maximal,
            conjugacy_class: new_index[ri],
        })
        .collect();
    rows.sort_by(|a, b| {
        (a.corank, std::cmp::Reverse(a.stabilizer_order), &a.stabilizer, a.size, a.dim_pi, &a.aut_f, a.maximal, a.conjugacy_class).cmp(&(
            b.corank,
            std::cmp::Reverse(b.stabilizer_order),
            &b.stabilizer,
            b.size,
            b.dim_pi,
            &b.aut_f,
            b.maximal,
            b.conjugacy_class,
        ))
    });
    let mut counters: BTreeMap<usize, usize> = BTreeMap::new();
    for r in rows.iter_mut() {
        let c = counters.entry(r.corank).or_default();
        *c += 1;
        r.label = format!("{}{}", row_prefix(r.corank), c);
    }

    let mut summary: BTreeMap<String, usize> = BTreeMap::new();
    for (cc, _) in &ccs {
        if cc.maximal {
            *summary.entry(cc.label.clone()).or_default() += 1;
        }
    }
    let ray_check = ccs
        .iter()
        .enumerate()
        .filter(|(_, (cc, _))| cc.maximal)
        .all(|(ni, _)| rows.iter().any(|r| r.conjugacy_class == ni && r.dim_pi == 1));

    let mut perfect_forms: Vec<String> = w.nodes.iter().map(|p| p.aut.label()).collect();
    perfect_forms.sort();
    let ccs: Vec<ConjugacyClassReport> = ccs.into_iter().map(|(c, _)| c).collect();
    Ok(ClassificationReport {
        version: REPORT_VERSION,
        disc: l.field().disc(),
        steinitz: steinitz.to_string(),
        weight: mode.name().to_string(),
        n: l.n(),
        perfect_forms,
        rows,
        conjugacy_classes: ccs,
        summary,
        ray_check,
    })
}

/// Lattice `O^(n-1) + a` for the Steinitz selector.
pub fn lattice_for(disc: i64, n: usize, steinitz: &str) -> Result<(PseudoLattice, SteinitzRep)> {
    let k = QuadField::from_disc_or_d(disc)?;
    let rep = resolve_steinitz(&k, n, steinitz)?;
    Ok((standard_lattice(&k, &rep.ideal, n), rep))
}

pub fn classify_maximal_finite(
    disc: i64,
    n: usize,
    steinitz: &str,
    mode: WeightMode,
    opts: &WalkOptions,
) -> Result<ClassificationReport> {
    let (l, rep) = lattice_for(disc, n, steinitz)?;
    classify_lattice(&l, &rep.label, mode, opts)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PairVerdict {
    pub a: String,
    pub b: String,
    pub verdict: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CompareReport {
    pub version: u32,
    pub disc: i64,
    pub weight: String,
    pub summaries: BTreeMap<String, BTreeMap<String, usize>>,
    pub pairs: Vec<PairVerdict>,
}

pub const DISTINGUISHED: &str = "DISTINGUISHED";
pub const INCONCLUSIVE: &str = "INCONCLUSIVE";

pub fn compare_reports(disc: i64, mode: WeightMode, reports: &[ClassificationReport]) -> CompareReport {
    let mut pairs = Vec::new();
    for (i, a) in reports.iter().enumerate() {
        for b in &reports[i + 1..] {
            let verdict = if a.summary != b.summary { DISTINGUISHED } else { INCONCLUSIVE };
            pairs.push(PairVerdict { a: a.steinitz.clone(), b: b.steinitz.clone(), verdict: verdict.into() });
        }
    }
    CompareReport {
        version: REPORT_VERSION,
        disc,
        weight: mode.name().into(),
        summaries: reports.iter().map(|r| (r.steinitz.clone(), r.summary.clone())).collect(),
        pairs,
    }
}

/// Compares the maximal finite subgroups of `GL(L)` across all Steinitz classes.
pub fn compare_unit_groups(disc: i64, n: usize, mode: WeightMode, opts: &WalkOptions) -> Result<CompareReport> {
    let k = QuadField::from_disc_or_d(disc)?;
    let reps = steinitz_representatives(&k, n as u64);
    let reports = reps
        .par_iter()
        .map(|r| classify_lattice(&standard_lattice(&k, &r.ideal, n), &r.label, mode, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(compare_reports(k.disc(), mode, &reports))
}

impl ClassificationReport {
    /// One line in the layout of the summary table.
    pub fn summary_line(&self) -> String {
        let mut cells: Vec<String> =
            SUMMARY_COLUMNS.iter().map(|c| self.summary.get(*c).map_or("-".to_string(), |v| v.to_string())).collect();
        let extra: Vec<String> = self
            .summary
            .iter()
            .filter(|(k, _)| !SUMMARY_COLUMNS.contains(&k.as_str()))
            .map(|(k, v)| format!("{k}:{v}"))
            .collect();
        if !extra.is_empty() {
            cells.push(format!("[{}]", extra.join(" ")));
        }
        format!("{:>6} {:<10} {}", self.disc, self.steinitz, cells.join(" "))
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "disc {} steinitz {} weight {} n {}", self.disc, self.steinitz, self.weight, self.n);
        let _ = writeln!(s, "perfect forms: {}", self.perfect_forms.len());
        let _ = writeln!(s, "{:<5} {:>6} {:>4} {:<10} {:>3} {:<10} maximal", "C", "corank", "|S|", "G", "dim", "Aut(F)");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:<5} {:>6} {:>4} {:<10} {:>3} {:<10} {}",
                r.label,
                r.corank,
                r.size,
                r.stabilizer,
                r.dim_pi,
                r.aut_f.as_deref().unwrap_or(""),
                if r.maximal { "yes" } else { "no" }
            );
        }
        let _ = writeln!(s, "{:>6} {:<10} {}", "disc", "St(L)", SUMMARY_COLUMNS.join(" "));
        let _ = writeln!(s, "{}", self.summary_line());
        s
    }
}

impl CompareReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (st, sum) in &self.summaries {
            let cells: Vec<String> = sum.iter().map(|(k, v)| format!("{k}:{v}")).collect();
            let _ = writeln!(s, "{st}: {}", cells.join(" "));
        }
        if self.pairs.is_empty() {
            let _ = writeln!(s, "single Steinitz class, nothing to compare");
        }
        for p in &self.pairs {
            let _ = writeln!(s, "{} vs {}: {}", p.a, p.b, p.verdict);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selectors() {
        let k = QuadField::new(-15).unwrap();
        assert_eq!(resolve_steinitz(&k, 2, "principal").unwrap().label, "principal");
        assert_eq!(resolve_steinitz(&k, 2, "2,1").unwrap().label, "p2,1");
        assert_eq!(resolve_steinitz(&k, 2, "p2,2").unwrap().label, "p2,1");
        assert_eq!(resolve_steinitz(&k, 2, "p3,1").unwrap().label, "p2,1");
        assert!(resolve_steinitz(&k, 2, "7,1").is_err());
        assert!(resolve_steinitz(&k, 2, "x").is_err());
    }
}
