//! Automorphism groups and isometries of Hermitian forms on a lattice.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ugv::forms::HermForm;
use ugv::ideals::{primes_above, Ideal};
use ugv::isometry::{aut_group, isometry};
use ugv::lattice::{random_gl_element, standard_lattice};
use ugv::qfield::{q, QuadField};

fn main() -> ugv::error::Result<()> {
    let k = QuadField::new(-15)?;
    let l0 = standard_lattice(&k, &Ideal::unit(&k), 2);
    let id = HermForm::identity(&k, 2);
    let g = aut_group(&id, &l0)?;
    println!("Aut(I) on O^2: order {} ({})", g.order(), g.label());

    let l1 = standard_lattice(&k, &primes_above(&k, 2)[0], 2);
    let f = HermForm::from_sym(&k, 2, &[q(2), q(3), q(1), q(0)]);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let h = random_gl_element(&l1, 10, &mut rng);
    let f2 = f.transform(&h);
    let w = isometry(&f, &f2, &l1)?.expect("planted isometry");
    assert_eq!(f.transform(&w), f2);
    println!("recovered an isometry onto g^dagger F g: {w}");
    println!("Aut(F) on L1: {}", aut_group(&f, &l1)?.label());
    Ok(())
}
