//! Assembles the cusp annuli of both polyhedral quotients from horospherical rectangles.

use commensurability::polyhedra::{p1_annuli, p2_annuli};

fn main() {
    for a in p1_annuli().unwrap().iter().chain(&p2_annuli().unwrap()) {
        println!("{a}");
    }
}
