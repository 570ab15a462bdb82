//! Class group, reduced forms and Steinitz representatives of a field.
//!
//! `cargo run --example class_group -- -21`

use ugv::ideals::{class_group, steinitz_representatives};
use ugv::qfield::QuadField;

fn main() -> ugv::error::Result<()> {
    let d: i64 = std::env::args().nth(1).map_or(-21, |s| s.parse().expect("integer d"));
    let k = QuadField::from_disc_or_d(d)?;
    let cl = class_group(&k);
    println!("D = {}, h = {}, exponent {}", k.disc(), cl.order(), cl.exponent());
    for (i, c) in cl.classes().iter().enumerate() {
        let [a, b, cc] = c.triple();
        println!("  ({a}, {b}, {cc})  order {}  smallest ideal norm {}", cl.element_order(i), c.min_norm());
    }
    for r in steinitz_representatives(&k, 2) {
        println!("Steinitz class {:<10} ideal {}", r.label, r.ideal);
    }
    Ok(())
}
