//! Cusp parameters of M_n and of a {0,2}-mutant, with the annulus chain behind each one.
//!
//! cargo run --example cusp_parameters -- 0,2,2,0

use commensurability::cusp_moduli::{assemble_mutant_moduli, mn_moduli, mutant_chains, mutant_moduli, pgl2q_equivalent};
use commensurability::kleinian::MutationWord;

fn main() {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "0,2,0,0".into());
    let word: MutationWord = arg.parse().expect("word over {0,2}");
    let (t1, t2) = mutant_moduli(&word).unwrap();
    let (a1, a2) = assemble_mutant_moduli(&word).unwrap();
    let (m1, m2) = mn_moduli(word.n()).unwrap();
    let (c1, c2) = mutant_chains(&word).unwrap();
    println!("I = {word}");
    println!("T1 = {t1} (assembled {a1})");
    println!("T2 = {t2} (assembled {a2})");
    println!("chains: {c1:?}\n        {c2:?}");
    println!("M_{}: {m1}, {m2}", word.n());
    println!(
        "equivalent to M_n: {} {}",
        pgl2q_equivalent(&t1, &m1).unwrap(),
        pgl2q_equivalent(&t2, &m2).unwrap()
    );
}
