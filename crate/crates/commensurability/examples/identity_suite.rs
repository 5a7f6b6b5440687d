//! Runs the exact matrix identities relating the tangle generators, the mutators and the
//! polyhedral face pairings. Pass `--break` to perturb p3 and watch the suite fail.

use commensurability::cli::verification_table;
use commensurability::moebius::identity_suite;

fn main() {
    let broken = std::env::args().any(|a| a == "--break");
    let t = verification_table(broken);
    let start = std::time::Instant::now();
    let rep = identity_suite(&t);
    println!("{rep}");
    println!("{} of {} checks pass in {:?}", rep.len() - rep.failures().count(), rep.len(), start.elapsed());
    if !rep.passed() {
        std::process::exit(1);
    }
}
