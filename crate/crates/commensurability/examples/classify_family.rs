//! Partitions {0,2}^{n+1} by PGL2(Q)-classes of cusp parameters.

use commensurability::cusp_moduli::classify_family;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4);
    let fam = classify_family(n).unwrap();
    for w in &fam.words {
        println!("{} class {:>2}  T1 = {}  T2 = {}", w.word, w.class_id, w.t1, w.t2);
    }
    println!("{} classes", fam.class_count);
    println!("single 2 at k = 0..={n}: classes {:?}", fam.single_two_classes);
    println!("adjacent 2s at k, k+1: classes {:?}", fam.adjacent_pair_classes);
}
