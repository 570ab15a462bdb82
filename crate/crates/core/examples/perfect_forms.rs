//! Perfect forms and well-rounded minimal classes for binary Hermitian forms.
//!
//! `cargo run --release --example perfect_forms -- -15 p2,1`

use ugv::ideals::steinitz_representatives;
use ugv::lattice::{standard_lattice, WeightMode};
use ugv::qfield::QuadField;
use ugv::voronoi::{enumerate_perfect_forms, well_rounded_classes, WalkOptions};

fn main() -> ugv::error::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let d: i64 = args.get(1).map_or(-15, |s| s.parse().expect("integer d"));
    let label = args.get(2).cloned().unwrap_or_else(|| "principal".into());
    let k = QuadField::from_disc_or_d(d)?;
    let rep = steinitz_representatives(&k, 2).into_iter().find(|r| r.label == label).expect("known Steinitz label");
    let l = standard_lattice(&k, &rep.ideal, 2);
    let w = enumerate_perfect_forms(&l, WeightMode::Phi1, &WalkOptions::default())?;
    for (i, p) in w.nodes.iter().enumerate() {
        println!("P{} |S|={} Aut={} facets={}", i + 1, p.min.size(), p.aut.label(), p.facets.len());
    }
    for c in well_rounded_classes(&w, &l)? {
        println!("corank {} |S|={} Aut={}", c.corank, c.size(), c.stabilizer.label());
    }
    Ok(())
}
