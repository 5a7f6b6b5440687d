//! The reflection group G_n: dihedral angles of P_n and Gamma_n inside G_n.

use commensurability::kleinian::commensurator_suite;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let rep = commensurator_suite(n);
    println!("{rep}");
}
