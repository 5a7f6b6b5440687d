//! Coplanarity and convexity conditions for the canonical tiling, in the light-cone model.

use commensurability::tiling::{canonicity_report, convexity_witnesses};

fn main() {
    for w in convexity_witnesses() {
        println!("{}: {} (expected {})", w.description, w.value, w.expected);
    }
    println!("{}", canonicity_report(3));
}
