//! Tells apart the unit groups of non-conjugate maximal orders of M_2(K).
//!
//! `cargo run --release --example compare_unit_groups -- -21`

use ugv::classify::compare_unit_groups;
use ugv::lattice::WeightMode;
use ugv::voronoi::WalkOptions;

fn main() -> ugv::error::Result<()> {
    let d: i64 = std::env::args().nth(1).map_or(-15, |s| s.parse().expect("integer d"));
    print!("{}", compare_unit_groups(d, 2, WeightMode::Phi1, &WalkOptions::default())?.to_text());
    Ok(())
}
