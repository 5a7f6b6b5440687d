//! Classes of {0,1}-words up to reversal and endpoint flips, checked against orbit search.

use commensurability::kleinian::{brute_force_orbit, isometry_classes, normalize_endpoints};

fn main() {
    let len: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    for class in isometry_classes(len) {
        let words: Vec<String> = class.iter().map(|w| w.to_string()).collect();
        let orbit = brute_force_orbit(&class[0]).len();
        println!("{}  normal form {}  orbit {orbit}", words.join(" "), normalize_endpoints(&class[0]));
    }
}
