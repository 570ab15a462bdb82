//! Well-rounded minimal classes, their perfection corank and stabilizers.
//!
//! `cargo run --release --example minimal_classes -- -15`

use ugv::classify::lattice_for;
use ugv::lattice::WeightMode;
use ugv::voronoi::{enumerate_perfect_forms, well_rounded_classes, WalkOptions};

fn main() -> ugv::error::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let d: i64 = args.get(1).map_or(-15, |s| s.parse().expect("integer d"));
    let st = args.get(2).map_or("principal", |s| s.as_str());
    let (l, rep) = lattice_for(d, 2, st)?;
    let w = enumerate_perfect_forms(&l, WeightMode::Phi1, &WalkOptions::default())?;
    let mut classes = well_rounded_classes(&w, &l)?;
    classes.sort_by_key(|c| (c.corank, std::cmp::Reverse(c.stabilizer.order())));
    println!("{} classes on L({})", classes.len(), rep.label);
    for c in &classes {
        let ideals: Vec<String> = c.vectors.iter().map(|v| format!("{:?}", v.class.triple())).collect();
        println!("corank {}  |S| = {:>2}  Aut = {:<6} coefficient classes {}", c.corank, c.size(), c.stabilizer.label(), ideals.join(" "));
    }
    Ok(())
}
