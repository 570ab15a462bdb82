mod common;

use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use ugv::classify::classify_maximal_finite;
use ugv::equivariant::{average, fixed_space};
use ugv::forms::{cusp_minimum, minimum_and_minimal_vectors};
use ugv::ideals::{Ideal, primes_above};
use ugv::isometry::{aut_group, naive_aut_group, set_stabilizer};
use ugv::lattice::{coefficient_ideal, gl_membership, random_gl_element, standard_lattice, weight, PseudoLattice, WeightMode};
use ugv::qfield::{Elem, QuadField};
use ugv::voronoi::{enumerate_perfect_forms, well_rounded_classes, MinimalClass, Walk, WalkOptions};

fn lattice(d: i64, principal: bool) -> PseudoLattice {
    let k = QuadField::new(d).unwrap();
    let c = if principal { Ideal::unit(&k) } else { primes_above(&k, 2)[0].clone() };
    standard_lattice(&k, &c, 2)
}

struct Enumerated {
    l: PseudoLattice,
    walk: Walk,
    classes: Vec<MinimalClass>,
}

fn enumerated() -> &'static [Enumerated] {
    static E: OnceLock<Vec<Enumerated>> = OnceLock::new();
    E.get_or_init(|| {
        [(-15, true), (-15, false), (-5, true), (-6, false)]
            .into_iter()
            .map(|(d, p)| {
                let l = lattice(d, p);
                let walk = enumerate_perfect_forms(&l, WeightMode::Phi1, &WalkOptions::default()).unwrap();
                let classes = well_rounded_classes(&walk, &l).unwrap();
                Enumerated { l, walk, classes }
            })
            .collect()
    })
}

fn random_vector<R: Rng>(l: &PseudoLattice, rng: &mut R) -> Vec<Elem> {
    loop {
        let z: Vec<num_bigint::BigInt> = (0..l.zbasis().len()).map(|_| rng.gen_range(-3i64..=3).into()).collect();
        if z.iter().any(|c| c != &0.into()) {
            return l.from_z(&z);
        }
    }
}

#[test]
fn stabilizer_equals_automorphisms_of_inverse_canonical_form() {
    for e in enumerated() {
        for c in &e.classes {
            let via_t = set_stabilizer(&c.kvectors(), &e.l).unwrap();
            let naive = naive_set_stabilizer(&c.kvectors(), &e.l);
            assert_eq!(via_t.elements().iter().cloned().collect::<std::collections::BTreeSet<_>>(), naive);
        }
    }
}

#[test]
fn fixed_space_dimensions() {
    let e = &enumerated()[0];
    for c in &e.classes {
        let fs = fixed_space(&c.stabilizer).unwrap();
        match c.stabilizer.label().as_str() {
            "C6" | "C4" => assert_eq!(fs.dim(), 2),
            "D12" | "D8" => assert_eq!(fs.dim(), 1),
            _ => {}
        }
    }
}

#[test]
fn classical_walk_is_connected_and_closed() {
    for e in enumerated() {
        for p in &e.walk.nodes {
            for f in &p.facets {
                assert!(matches!(f.target, Some(ugv::voronoi::FacetTarget::Neighbor(_))));
            }
        }
    }
}

#[test]
fn weights_agree_on_class_number_one() {
    for d in [-1, -2, -7] {
        let r0 = classify_maximal_finite(d, 2, "principal", WeightMode::Phi0, &WalkOptions::default()).unwrap();
        let r1 = classify_maximal_finite(d, 2, "principal", WeightMode::Phi1, &WalkOptions::default()).unwrap();
        assert_eq!((&r0.rows, &r0.summary), (&r1.rows, &r1.summary));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn averaging_preserves_minimal_vectors(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = &enumerated()[rng.gen_range(0..2)];
        let c = &e.classes[rng.gen_range(0..e.classes.len())];
        let f = class_sample(&e.walk, c, &e.l, &mut rng);
        let s = line_keys(&c.kvectors());
        prop_assert_eq!(&minimal_lines(&f, &e.l, WeightMode::Phi1), &s);
        let fa = average(&f, &c.stabilizer);
        prop_assert_eq!(&minimal_lines(&fa, &e.l, WeightMode::Phi1), &s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cusp_minimum_matches_definition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for d in [-15, -5, -6, -10, -21] {
            let l = lattice(d, rng.gen_bool(0.5));
            let f = random_pd_form(l.field(), &mut rng);
            let brute = brute_cusp_minimum(&f, &l);
            prop_assert_eq!(cusp_minimum(&f, &l).unwrap(), brute.clone());
            prop_assert_eq!(minimum_and_minimal_vectors(&f, &l, WeightMode::Phi1).unwrap().min, brute);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn weights_are_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (d, p) in [(-15, true), (-15, false), (-21, false), (-10, false)] {
            let l = lattice(d, p);
            let g = random_gl_element(&l, 8, &mut rng);
            prop_assert!(gl_membership(&l, &g).unwrap());
            let x = random_vector(&l, &mut rng);
            let gx = g.apply(&x);
            prop_assert_eq!(coefficient_ideal(&l, &gx).unwrap(), coefficient_ideal(&l, &x).unwrap());
            for mode in [WeightMode::Phi0, WeightMode::Phi1] {
                prop_assert_eq!(weight(&l, &gx, mode).unwrap(), weight(&l, &x, mode).unwrap());
            }
        }
    }

    #[test]
    fn coefficient_ideal_scales(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = lattice(-21, rng.gen_bool(0.5));
        let k = *l.field();
        let x = random_vector(&l, &mut rng);
        let lam = loop {
            let e = k.elem(
                num_rational::BigRational::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=3).into()),
                num_rational::BigRational::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=3).into()),
            );
            if !e.is_zero() { break e; }
        };
        let xl: Vec<Elem> = x.iter().map(|c| c * &lam).collect();
        prop_assert_eq!(coefficient_ideal(&l, &xl).unwrap(), coefficient_ideal(&l, &x).unwrap().mul_elem(&lam).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn automorphisms_match_naive_search(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = [-15, -5, -6, -1, -3, -21][rng.gen_range(0..6)];
        let l = lattice(d, rng.gen_bool(0.5));
        let f = random_pd_form(l.field(), &mut rng);
        let a = aut_group(&f, &l).unwrap();
        let b = naive_aut_group(&f, &l).unwrap();
        prop_assert_eq!(a.elements(), b.elements());
    }
}
