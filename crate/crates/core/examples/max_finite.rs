//! Maximal finite subgroups of GL(L) for one Steinitz class.
//!
//! `cargo run --release --example max_finite -- -21 p5,1`

use ugv::classify::classify_maximal_finite;
use ugv::lattice::WeightMode;
use ugv::voronoi::WalkOptions;

fn main() -> ugv::error::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let d: i64 = args.get(1).map_or(-15, |s| s.parse().expect("integer d"));
    let st = args.get(2).map_or("principal", |s| s.as_str());
    let report = classify_maximal_finite(d, 2, st, WeightMode::Phi1, &WalkOptions::default())?;
    print!("{}", report.to_text());
    for c in &report.conjugacy_classes {
        let over = c.overgroup.as_deref().map(|o| format!(" (inside {o})")).unwrap_or_default();
        println!("class {} maximal={}{} G-perfect forms={}", c.label, c.maximal, over, c.group.perfect_forms.len());
    }
    Ok(())
}
