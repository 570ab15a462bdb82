//! The equivariant walk for the stabilizers of the corank 2 classes, where every
//! facet is a dead end.

use ugv::classify::lattice_for;
use ugv::equivariant::{g_minimal_classes, g_perfect_walk};
use ugv::lattice::WeightMode;
use ugv::voronoi::{enumerate_perfect_forms, well_rounded_classes, FacetTarget, WalkOptions};

fn main() -> ugv::error::Result<()> {
    let opts = WalkOptions::default();
    for st in ["principal", "p2,1"] {
        let (l, _) = lattice_for(-15, 2, st)?;
        let w = enumerate_perfect_forms(&l, WeightMode::Phi1, &opts)?;
        for c in well_rounded_classes(&w, &l)?.iter().filter(|c| c.corank == 2) {
            let gw = g_perfect_walk(&c.stabilizer, &l, WeightMode::Phi1, &opts)?;
            println!("L({st}) G = {} with dim F(G) = {}", c.stabilizer.label(), gw.fixed.dim());
            for p in &gw.walk.nodes {
                let ds: Vec<String> = p
                    .facets
                    .iter()
                    .map(|f| match f.target {
                        Some(FacetTarget::DeadEnd { eigenvectors: true }) => "dead end (eigenvectors)".into(),
                        Some(FacetTarget::DeadEnd { eigenvectors: false }) => "dead end".into(),
                        Some(FacetTarget::Neighbor(j)) => format!("neighbour {j}"),
                        None => "unexplored".into(),
                    })
                    .collect();
                println!("  G-perfect form with |S| = {}: {}", p.min.size(), ds.join(", "));
            }
            let stabs: Vec<String> = g_minimal_classes(&gw, &l)?.iter().map(|m| m.stabilizer.label()).collect();
            println!("  well-rounded G-minimal classes: {}", stabs.join(" "));
        }
    }
    Ok(())
}
