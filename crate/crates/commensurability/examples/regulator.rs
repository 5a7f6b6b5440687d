//! Bloch invariants of M_n, their Borel regulators and the pairwise determinants.

use commensurability::bloch::{bloch_invariant_mn, borel_regulator, incommensurability_certificate, polyhedron_volumes};

fn main() {
    let (v1, v2) = polyhedron_volumes().unwrap();
    println!("v1 = {v1:.12}, v2 = {v2:.12}");
    println!("beta(M_1) = {}", bloch_invariant_mn(1).unwrap());
    for n in 1..=4 {
        let r = borel_regulator(&bloch_invariant_mn(n).unwrap()).unwrap();
        println!("M_{n}: ({:.9}, {:.9})", r.r1, r.r2);
    }
    let c = incommensurability_certificate(2, 3).unwrap();
    println!("det(M_2, M_3) = {:.6}, certified {}", c.determinant, c.certified);
}
