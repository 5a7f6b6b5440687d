//! Acceptance checks, one line per criterion. Runs without the libtest harness so the
//! lines always show up in `cargo test` output.
//!
//! A line marked `FAIL (known)` is a criterion whose literal wording contradicts an exact
//! computation; the computed value is asserted instead, so a regression still fails the run.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

use commensurability::bloch::{
    bloch_invariant_mn, borel_regulator, d2, incommensurability_certificate, mutation_invariance_check,
    triangulate_p1,
};
use commensurability::cusp_moduli::{
    apply_integer_matrix, assemble_mutant_moduli, brute_force_pgl2q, classify_family, mn_moduli, mutant_moduli,
    pgl2q_equivalent, word_with_twos, CuspParameter,
};
use commensurability::kleinian::{
    brute_force_orbit, entrywise_equal_pm, gamma_i, gamma_n, integrality_scan, isometry_classes, isometry_classify,
    printed_witness_matrices, IsometryVerdict, MutationWord,
};
use commensurability::moebius::{builtin_generators, identity_suite, ExtendedMoebius};
use commensurability::numfield::{rat, Nf, RealQuad};
use commensurability::polyhedra::{
    face_pairing_report, p1, p1_annuli, p2, p2_annuli, verify_internal_face_pairing, FacePairing,
};
use commensurability::tiling::{canonicity_report, convexity_witnesses};

const CATALAN: f64 = 0.915_965_594_177_219;
const V1: f64 = 3.663_862_377;

enum Status {
    Pass,
    Fail,
    Known,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn from(ok: bool, detail: impl Into<String>) -> Self {
        Outcome { status: if ok { Status::Pass } else { Status::Fail }, detail: detail.into() }
    }
}

/// Collects sub-checks of one criterion.
#[derive(Default)]
struct Checks {
    failed: Vec<String>,
    known: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn check(&mut self, name: &str, ok: bool) {
        if !ok {
            self.failed.push(name.to_string());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn known(&mut self, s: impl Into<String>) {
        self.known.push(s.into());
    }

    fn finish(self) -> Outcome {
        let mut detail = self.notes.join("; ");
        if !self.failed.is_empty() {
            return Outcome { status: Status::Fail, detail: format!("failed: {}; {detail}", self.failed.join(", ")) };
        }
        if !self.known.is_empty() {
            detail = format!("{}; {detail}", self.known.join("; "));
            return Outcome { status: Status::Known, detail };
        }
        Outcome { status: Status::Pass, detail }
    }
}

fn cp(q1: (i64, i64), q2: (i64, i64)) -> CuspParameter {
    CuspParameter::new(rat(q1.0, q1.1), rat(q2.0, q2.1)).unwrap()
}

fn word(s: &str) -> MutationWord {
    s.parse().unwrap()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let x = f();
    (x, t.elapsed())
}

fn criterion_1() -> Outcome {
    let t = builtin_generators();
    let (rep, dt) = timed(|| identity_suite(&t));
    let mut c = Checks::default();
    c.check("identity suite passes", rep.passed());
    c.check("at least 25 identities", rep.len() >= 25);
    c.check("runtime under 1 s", dt < Duration::from_secs(1));
    c.note(format!("{} identities in {dt:.2?}", rep.len()));
    if let Some(f) = rep.first_failure() {
        c.note(format!("first failure {}", f.name));
    }
    c.finish()
}

fn criterion_2() -> Outcome {
    let mut c = Checks::default();
    let (rep, dt) = timed(face_pairing_report);
    c.check("P1 with s, t and P2 with f, g, h", rep.passed());
    let t = builtin_generators();
    let oct = p1();
    let cub = p2().unwrap();
    let negatives: [(&str, &_, Vec<&str>); 3] =
        [("P1 with s only", &oct, vec!["s"]), ("P1 with s, s", &oct, vec!["s", "s"]), ("P2 with f, g", &cub, vec!["f", "g"])];
    for (name, p, names) in negatives {
        let gens: Vec<(&str, ExtendedMoebius)> = names.iter().map(|n| (*n, t[n].clone())).collect();
        let rejected = match FacePairing::from_generators(p, &gens) {
            Ok(fp) => !verify_internal_face_pairing(p, &fp).passed(),
            Err(_) => true,
        };
        c.check(&format!("negative control {name} rejected"), rejected);
    }
    c.check("runtime under 1 s", dt < Duration::from_secs(1));
    c.note(format!("{} checks in {dt:.2?}, 3 negative controls rejected", rep.len()));
    c.finish()
}

fn criterion_3() -> Outcome {
    let mut c = Checks::default();
    let a = p1_annuli().unwrap();
    let b = p2_annuli().unwrap();
    let s2 = RealQuad::sqrt2();
    let fifth = RealQuad::new(rat(1, 5), rat(0, 1));
    let expected = [
        ("A1", RealQuad::one(), 1),
        ("A2", fifth.clone(), 5),
        ("B1", s2.clone(), 1),
        ("B2", &s2 * &fifth, 5),
        ("B3", s2.clone(), 1),
        ("B4", &s2 * &fifth, 5),
    ];
    let all: Vec<_> = a.iter().chain(&b).collect();
    c.check("six annuli", all.len() == 6);
    for (label, m, rects) in &expected {
        let found = all.iter().find(|x| x.label.as_deref() == Some(*label));
        let ok = found.is_some_and(|x| x.modulus == *m && x.rectangles() == *rects);
        c.check(&format!("m({label}) = {m} with {rects} rectangles"), ok);
    }
    let summary: Vec<String> = all.iter().map(|x| format!("{}={}", x.label.as_deref().unwrap_or("?"), x.modulus)).collect();
    c.note(summary.join(" "));
    c.finish()
}

fn criterion_4() -> Outcome {
    let mut c = Checks::default();
    for n in 1..=10 {
        let (t1, _) = mn_moduli(n).unwrap();
        c.check(&format!("T1(M_{n}) = i(2 + {}√2)", 4 * n), t1 == cp((2, 1), (4 * n as i64, 1)));
    }
    let (words, dt) = timed(|| {
        let mut count = 0;
        let mut bad = Vec::new();
        for n in 1..=6 {
            for w in MutationWord::all(n + 1, &[0, 2]) {
                count += 1;
                if assemble_mutant_moduli(&w).unwrap() != mutant_moduli(&w).unwrap() {
                    bad.push(w.to_string());
                }
            }
        }
        (count, bad)
    });
    c.check("assembled moduli equal the closed form", words.1.is_empty());
    c.check("exhaustive comparison under 10 s", dt < Duration::from_secs(10));
    c.note(format!("{} words in {dt:.2?}", words.0));

    let mut single = 0;
    let mut adjacent = 0;
    for n in 1..=6i64 {
        for k in 0..=n {
            let w = word_with_twos(n as usize, &[k as usize]).unwrap();
            let (t1, t2) = mutant_moduli(&w).unwrap();
            let e1 = cp((6, 5), (4 * (n + 4 * k), 5));
            let e2 = cp((6, 5), (4 * (5 * n - 4 * k), 5));
            c.check(&format!("single 2 at {k}, n = {n}"), t1 == e1 && t2 == e2);
            single += 1;
        }
        for k in 0..n {
            let w = word_with_twos(n as usize, &[k as usize, k as usize + 1]).unwrap();
            let (t1, t2) = mutant_moduli(&w).unwrap();
            let e1 = cp((2, 1), (4 * (5 * n - 4), 5));
            let e2 = cp((2, 5), (4 * (n + 4), 5));
            let ok = pgl2q_equivalent(&t1, &e1).unwrap() && pgl2q_equivalent(&t2, &e2).unwrap();
            c.check(&format!("adjacent 2s at {k}, {}, n = {n}", k + 1), ok);
            adjacent += 1;
        }
    }
    c.note(format!("{single} single-2 words exact, {adjacent} adjacent-pair words up to PGL2(Q)"));
    c.finish()
}

fn criterion_5() -> Outcome {
    let mut c = Checks::default();
    let mut params = Vec::new();
    for n in 1..=4 {
        for x in classify_family(n).unwrap().words {
            params.push(x.t1);
            params.push(x.t2);
        }
    }
    params.sort_by_key(|p| p.to_string());
    params.dedup();
    let (mut pairs, mut positives, mut disagreements) = (0, 0, 0);
    for (i, z) in params.iter().enumerate() {
        for w in params.iter().skip(i).step_by(3) {
            pairs += 1;
            let eq = pgl2q_equivalent(z, w).unwrap();
            let agrees = match brute_force_pgl2q(z, w, 12) {
                Some(m) => {
                    positives += 1;
                    eq && apply_integer_matrix(m, z).as_ref() == Some(w)
                }
                // a class can need larger entries than 12; confirm with a wider search
                None => !eq || brute_force_pgl2q(z, w, 2000).is_some(),
            };
            if !agrees {
                disagreements += 1;
            }
        }
    }
    c.check("at least 50 sampled pairs", pairs >= 50);
    c.check("pgl2q_equivalent agrees with brute force", disagreements == 0);
    c.note(format!("{pairs} pairs, {positives} with a witness of entries <= 12"));

    let n = 4;
    let fam = classify_family(n).unwrap();
    let s = &fam.single_two_classes;
    let mirror = (0..=n).all(|k| s[k] == s[n - k]);
    let below: Vec<usize> = (0..=n).filter(|k| 2 * k < n + 1).collect();
    let distinct = below.iter().all(|&k| below.iter().all(|&l| k == l || s[k] != s[l]));
    c.check("I_k and I_{n-k} share a class", mirror);
    c.check("I_k, k < (n+1)/2, pairwise inequivalent", distinct);
    c.check("at least n/2 inequivalent single-2 words", 2 * fam.single_two_distinct >= n);
    c.check("adjacent-pair family unified", fam.adjacent_pairs_share_moduli && fam.adjacent_pair_classes.len() == n);
    let ceil = n.div_ceil(2);
    c.check("single-2 count is floor(n/2) + 1", fam.single_two_distinct == n / 2 + 1);
    if fam.single_two_distinct != ceil {
        c.known(format!(
            "single-2 family has {} classes for n = 4, not ceil(n/2) = {ceil} (I_0, I_1, I_2 are pairwise inequivalent)",
            fam.single_two_distinct
        ));
    }
    c.finish()
}

fn criterion_6() -> Outcome {
    let mut c = Checks::default();
    let (scan, dt) = timed(|| integrality_scan(&gamma_n(2).unwrap(), 4).unwrap());
    c.check("Gamma_2 traces integral up to length 4", scan.all_integral);
    c.note(format!("Gamma_2: {} words in {dt:.2?}", scan.words_checked));

    let mut mutants = 0;
    for n in 1..=3 {
        for w in MutationWord::all(n + 1, &[0, 2]) {
            if !w.entries().contains(&2) {
                continue;
            }
            mutants += 1;
            let out = integrality_scan(&gamma_i(&w).unwrap(), 2).unwrap();
            let five = out.witness.as_ref().is_some_and(|x| x.denominator.parse::<u64>().is_ok_and(|d| d % 5 == 0));
            c.check(&format!("witness for {w} has denominator divisible by 5"), five);
        }
    }
    c.note(format!("{mutants} mutants each have a witness"));

    let printed = printed_witness_matrices();
    let get = |name: &str| printed.iter().find(|(n, _)| *n == name).map(|(_, m)| m.clone()).unwrap();
    let hbar = get("hbar");
    let conj = get("m2 h m2^-1");
    let t = builtin_generators();
    c.check("hbar matches entry for entry", entrywise_equal_pm(&hbar, &t["h"].bar()));
    c.check("m2 h m2^-1 matches entry for entry", entrywise_equal_pm(&conj, &t["h"].conjugate(&t["m2"])));
    let tg = get("t m2 g m2^-1");
    c.check("t m2 g m2^-1 matches entry for entry", entrywise_equal_pm(&tg, &t["t"].compose(&t["g"].conjugate(&t["m2"]))));

    let product = hbar.compose(&conj).normalized().unwrap();
    let q = |a: i64, b: i64, cc: i64, d: i64, den: i64| Nf::new(rat(a, den), rat(b, den), rat(cc, den), rat(d, den));
    let printed_product = ExtendedMoebius::preserving(q(-71, 0, 0, 0, 5), q(-20, 0, 0, -30, 1), q(-36, 0, 0, 54, 5), q(55, 0, 0, 0, 1));
    let true_product = ExtendedMoebius::preserving(q(-71, 0, 0, 0, 5), q(-24, 0, 0, -36, 1), q(-36, 0, 0, 54, 5), q(-67, 0, 0, 0, 1));
    let trace = product.raw_trace();
    c.check("recomputed product", entrywise_equal_pm(&product, &true_product));
    c.check("recomputed trace -406/5 is nonintegral", trace == q(-406, 0, 0, 0, 5) && !trace.is_algebraic_integer());
    c.check("printed trace 204/5 is nonintegral", !q(204, 0, 0, 0, 5).is_algebraic_integer());
    if !entrywise_equal_pm(&product, &printed_product) {
        c.known(format!("printed product (trace 204/5) is not hbar (m2 h m2^-1); the product is {product}, trace {trace}"));
    }
    c.finish()
}

fn criterion_7() -> Outcome {
    let mut c = Checks::default();
    let catalan = d2(Complex64::new(0.5, 0.5)).unwrap();
    c.check("D2((1+i)/2) is Catalan's constant", (catalan - CATALAN).abs() < 1e-9);
    let r = borel_regulator(&triangulate_p1().unwrap()).unwrap();
    c.check("regulator of beta_1 is (v1, v1)", (r.r1 - V1).abs() < 1e-8 && (r.r2 - V1).abs() < 1e-8);
    c.note(format!("D2 = {catalan:.12}, v1 = {:.10}", r.r1));

    let mut min_det = f64::INFINITY;
    for m in 1..=8 {
        for n in (m + 1)..=8 {
            let cert = incommensurability_certificate(m, n).unwrap();
            c.check(&format!("M_{m}, M_{n} regulators non-proportional"), cert.certified);
            min_det = min_det.min(cert.determinant.abs());
        }
    }
    let regs: Vec<_> = (1..=8).map(|n| borel_regulator(&bloch_invariant_mn(n).unwrap()).unwrap()).collect();
    c.check("regulators computed for n = 1..8", regs.len() == 8);
    c.note(format!("smallest |det| {min_det:.3}"));

    let mut runner = TestRunner::deterministic();
    let upper = (-3.0..3.0f64, 0.01..3.0f64).prop_map(|(a, b)| Complex64::new(a, b));
    let pair = (upper.clone(), upper);
    let one = Complex64::new(1.0, 0.0);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    while count < 200 {
        let (x, y) = pair.new_tree(&mut runner).unwrap().current();
        if (x - y).norm() < 1e-3 {
            continue;
        }
        let terms = [x, y, y / x, (one - x.inv()) / (one - y.inv()), (one - x) / (one - y)];
        let v = [1.0, -1.0, 1.0, -1.0, 1.0];
        let sum: f64 = terms.iter().zip(v).map(|(z, s)| s * d2(*z).unwrap()).sum();
        worst = worst.max(sum.abs());
        count += 1;
    }
    c.check("five-term relation within 1e-9", worst < 1e-9);
    c.note(format!("five-term worst residual {worst:.1e} over {count} pairs"));
    c.finish()
}

fn criterion_8() -> Outcome {
    let mut c = Checks::default();
    for (s, k) in [("0,2,0,0", 1), ("0,2,2,0", 2), ("2,0,2,2", 3), ("0,1,0", 0), ("2,1,2,1", 2)] {
        let (inv, rep) = mutation_invariance_check(&word(s)).unwrap();
        c.check(&format!("{s}: {k} m2 mutations"), inv.twos == k);
        c.check(&format!("{s}: correction regulator exactly (0, 0)"), inv.regulator.r1 == 0.0 && inv.regulator.r2 == 0.0);
        c.check(&format!("{s}: correction formally zero"), inv.formally_zero && rep.passed());
    }
    c.note("corrections 6k[2] for k = 1, 2, 3 vanish exactly");
    c.finish()
}

fn criterion_9() -> Outcome {
    let mut c = Checks::default();
    let rep = canonicity_report(3);
    c.check("canonicity report", rep.passed());
    let count = |prefix: &str| rep.checks.iter().filter(|x| x.name.starts_with(prefix) && x.passed).count();
    c.check("12 columns with n . m_i = 1", count("n . m") == 12);
    c.check("6 columns with sqrt2 n . n_i = 1", count("sqrt2 n . n") == 6);
    let values: Vec<RealQuad> = convexity_witnesses().iter().map(|w| w.value.clone()).collect();
    let expected = [RealQuad::from_ints(5, 0), RealQuad::from_ints(3, 0), RealQuad::from_ints(3, 0), RealQuad::from_ints(2, 1)];
    c.check("witness values 5, 3, 3, 2 + √2", values == expected);
    c.check("witnesses exceed 1 and lie in L+", convexity_witnesses().iter().all(|w| w.passes()));
    let shown: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    c.note(format!("{} exact checks; witnesses {}", rep.len(), shown.join(", ")));
    c.finish()
}

fn criterion_10() -> Outcome {
    let mut c = Checks::default();
    let all = MutationWord::all(5, &[0, 1]);
    let mut mismatches = 0;
    for i in &all {
        let orbit = brute_force_orbit(i);
        for j in &all {
            let iso = isometry_classify(i, j).unwrap() == IsometryVerdict::Isometric;
            if iso != orbit.contains(j) {
                mismatches += 1;
            }
        }
    }
    let classes = isometry_classes(5);
    c.check("isometry_classify agrees with the orbit oracle", mismatches == 0);
    c.check("classes have at most two normalized words", classes.iter().all(|k| k.len() <= 2));
    c.note(format!("{} ordered pairs, {} classes", all.len() * all.len(), classes.len()));
    c.finish()
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact identity suite", criterion_1),
        ("face pairings", criterion_2),
        ("cusp annuli", criterion_3),
        ("cusp parameters", criterion_4),
        ("PGL2(Q) classification", criterion_5),
        ("integrality", criterion_6),
        ("dilogarithm and regulator", criterion_7),
        ("mutation invariance", criterion_8),
        ("canonicity", criterion_9),
        ("isometry classification", criterion_10),
    ];
    let mut unexpected = 0;
    println!();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Outcome::from(false, "panicked"));
        let tag = match out.status {
            Status::Pass => "PASS",
            Status::Fail => {
                unexpected += 1;
                "FAIL"
            }
            Status::Known => "FAIL (known)",
        };
        println!("criterion {:>2} {tag:<12} {name}: {}", i + 1, out.detail);
    }
    println!();
    if unexpected > 0 {
        println!("{unexpected} criteria failed");
        std::process::exit(1);
    }
}
