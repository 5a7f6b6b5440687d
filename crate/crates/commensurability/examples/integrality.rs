//! Trace integrality of Gamma_n against a mutant Gamma_I, plus the explicit witness.

use commensurability::kleinian::{gamma_i, gamma_n, integrality_scan, printed_witness_report, structural_witness, MutationWord};

fn main() {
    let scan = integrality_scan(&gamma_n(2).unwrap(), 3).unwrap();
    println!("{}: {} words, all integral: {}", scan.group, scan.words_checked, scan.all_integral);

    let word: MutationWord = "0,0,2".parse().unwrap();
    let scan = integrality_scan(&gamma_i(&word).unwrap(), 3).unwrap();
    match &scan.witness {
        Some(w) => println!("{}: tr({}) = {} has denominator {}", scan.group, w.word, w.trace, w.denominator),
        None => println!("{}: no witness", scan.group),
    }
    let (w, g) = structural_witness(&word).unwrap();
    println!("structural witness {w}: trace {}", g.normalized().unwrap().raw_trace());
    println!("{}", printed_witness_report());
}
