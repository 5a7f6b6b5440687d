//! Arithmetic in K = Q(i, sqrt 2): products, inverses, the automorphism sqrt2 -> -sqrt2,
//! both complex embeddings and the algebraic-integer test.

use commensurability::numfield::{rat, Embedding, Nf};

fn main() {
    let z = Nf::from_ints(1, 0, 1, 0); // 1 + i
    let w = Nf::new(rat(-2, 5), rat(0, 1), rat(0, 1), rat(3, 5)); // -2/5 + (3/5) i sqrt2
    let p = &z * &w;
    println!("z = {z}, w = {w}");
    println!("z w = {p}");
    println!("1 / w = {}", w.inv().unwrap());
    println!("sigma2(w) = {}", w.sigma2());
    println!("w in sigma1 = {}, in sigma2 = {}", w.embed(Embedding::Sigma1), w.embed(Embedding::Sigma2));
    println!("z integral: {}, w integral: {}", z.is_algebraic_integer(), w.is_algebraic_integer());
    println!("denominator of w: {}", w.denominator());
    let s = Nf::from_ints(-1, 0, 0, 0).sqrt().unwrap();
    println!("sqrt(-1) = {s}");
}
