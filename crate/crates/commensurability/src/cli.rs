//! Report assembly for the `commens` binary: argument types, one function per subcommand and
//! a deterministic JSON envelope.

use std::collections::BTreeMap;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bloch;
use crate::cusp_moduli;
use crate::kleinian::{self, MutationWord};
use crate::moebius::{builtin_generators, identity_suite, ExtendedMoebius};
use crate::polyhedra;
use crate::report::Report;
use crate::tiling;
use crate::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit codes.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "commens", version, about = "Checks on the link complements M_n and their mutants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every exact identity and geometric check.
    Verify(VerifyArgs),
    /// Cusp parameters of M_n or a {0,2}-mutant.
    Moduli(ModuliArgs),
    /// Bloch invariant and Borel regulator of M_n.
    Regulator(NArgs),
    /// Partition {0,2}^{n+1} by cusp parameters, and {0,1}^{n+1} by isometry.
    Classify(NArgs),
    /// Canonical tiling checks in the light-cone model.
    TilingCheck(NArgs),
    /// Everything known about one mutant M_I.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Number of blocks used by the tiling and commensurator checks.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Perturb p3 before running the identities (negative control).
    #[arg(long)]
    pub break_injection: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ModuliArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated word over {0,2}, e.g. 0,2,0.
    #[arg(long)]
    pub mutation: Option<String>,
    /// Entry bound for a brute-force PGL2(Q) search against the parameters of M_n.
    #[arg(long)]
    pub bound: Option<i64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct NArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated word over {0,1,2}.
    #[arg(long)]
    pub mutation: Option<String>,
    /// Longest word in the integrality scan.
    #[arg(long, default_value_t = 3)]
    pub max_word_length: usize,
    #[arg(long)]
    pub json: bool,
}

impl Command {
    pub fn json(&self) -> bool {
        match self {
            Command::Verify(a) => a.json,
            Command::Moduli(a) => a.json,
            Command::Regulator(a) | Command::Classify(a) | Command::TilingCheck(a) => a.json,
            Command::Report(a) => a.json,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Moduli(_) => "moduli",
            Command::Regulator(_) => "regulator",
            Command::Classify(_) => "classify",
            Command::TilingCheck(_) => "tiling-check",
            Command::Report(_) => "report",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub passed: bool,
    pub checks: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl Summary {
    fn of(reports: &[&Report]) -> Self {
        let checks = reports.iter().map(|r| r.len()).sum();
        let failed = reports.iter().map(|r| r.failures().count()).sum();
        let first_failure = reports
            .iter()
            .find_map(|r| r.first_failure().map(|c| format!("{}: {}", r.title, c.name)));
        Summary { passed: failed == 0, checks, failed, first_failure }
    }
}

/// The output of every subcommand. Maps are ordered, so the serialization is stable.
#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub results: Value,
    pub summary: Summary,
    pub version: String,
}

impl ReportEnvelope {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("envelope serializes")
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub envelope: ReportEnvelope,
    pub text: String,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.envelope.summary.passed {
            EXIT_OK
        } else {
            EXIT_FAILURE
        }
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            self.envelope.to_json()
        } else {
            self.text.clone()
        }
    }
}

/// Bad input, reported with exit code 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<Error> for UsageError {
    fn from(e: Error) -> Self {
        UsageError(e.to_string())
    }
}

/// Twelve significant digits.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn envelope(command: &str, inputs: Vec<(&str, Value)>, results: Value, reports: &[&Report]) -> ReportEnvelope {
    ReportEnvelope {
        command: command.to_string(),
        inputs: inputs.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        results,
        summary: Summary::of(reports),
        version: VERSION.to_string(),
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn parse_word(src: &str, alphabet: &[u8]) -> Result<MutationWord, UsageError> {
    let mut pos = 0;
    for tok in src.split(',') {
        let t = tok.trim();
        if !t.parse::<u8>().map(|x| alphabet.contains(&x)).unwrap_or(false) {
            return Err(UsageError(format!(
                "parse error at position {pos}: unexpected `{t}` (allowed {alphabet:?})"
            )));
        }
        pos += tok.len() + 1;
    }
    Ok(src.parse()?)
}

/// Resolves `--n` and `--mutation` into one word.
fn resolve_word(n: Option<usize>, mutation: Option<&str>, alphabet: &[u8]) -> Result<MutationWord, UsageError> {
    let word = match (n, mutation) {
        (_, Some(m)) => parse_word(m, alphabet)?,
        (Some(n), None) => MutationWord::zeros(n + 1),
        (None, None) => return Err(UsageError("one of --n or --mutation is required".into())),
    };
    if word.len() < 2 {
        return Err(UsageError("n must be positive".into()));
    }
    if let Some(n) = n {
        if n == 0 {
            return Err(UsageError("n must be positive".into()));
        }
        if word.len() != n + 1 {
            return Err(UsageError(format!("mutation {word} has length {}, expected n + 1 = {}", word.len(), n + 1)));
        }
    }
    Ok(word)
}

fn require_n(n: usize) -> Result<(), UsageError> {
    if n == 0 {
        Err(UsageError("n must be positive".into()))
    } else {
        Ok(())
    }
}

/// The identity table, with `p3` perturbed when `broken`.
pub fn verification_table(broken: bool) -> crate::moebius::GeneratorTable {
    let mut t = builtin_generators();
    if broken {
        t.insert("p3", ExtendedMoebius::from_ints(-14, 25, -9, 17));
    }
    t
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, UsageError> {
    require_n(args.n)?;
    let t = verification_table(args.break_injection);
    let reports = vec![
        identity_suite(&t),
        polyhedra::face_pairing_report(),
        kleinian::printed_witness_report(),
        kleinian::commensurator_suite(args.n),
        tiling::canonicity_report(args.n as u32),
    ];
    let refs: Vec<&Report> = reports.iter().collect();
    let env = envelope(
        "verify",
        vec![("n", json!(args.n)), ("break_injection", json!(args.break_injection))],
        to_value(&reports),
        &refs,
    );
    let mut text = String::new();
    for r in &reports {
        let bad = r.failures().count();
        text.push_str(&format!("{}: {} checks, {}\n", r.title, r.len(), if bad == 0 { "all pass".into() } else { format!("{bad} FAILED") }));
        for c in r.failures() {
            text.push_str(&format!("  FAIL {} {}\n", c.name, c.detail));
        }
    }
    match &env.summary.first_failure {
        None => text.push_str("verify: ok\n"),
        Some(f) => text.push_str(&format!("verify: failed at {f}\n")),
    }
    Ok(Outcome { envelope: env, text })
}

pub fn cmd_moduli(args: &ModuliArgs) -> Result<Outcome, UsageError> {
    let word = resolve_word(args.n, args.mutation.as_deref(), &[0, 2])?;
    if let Some(b) = args.bound {
        if b < 0 {
            return Err(UsageError("bound must be nonnegative".into()));
        }
    }
    let (t1, t2) = cusp_moduli::mutant_moduli(&word)?;
    let (a1, a2) = cusp_moduli::assemble_mutant_moduli(&word)?;
    let (c1, c2) = cusp_moduli::mutant_chains(&word)?;
    let (m1, m2) = cusp_moduli::mn_moduli(word.n())?;
    let mut rep = Report::new("cusp moduli");
    rep.push("assembled T1 equals the closed form", a1 == t1, a1.to_string());
    rep.push("assembled T2 equals the closed form", a2 == t2, a2.to_string());
    let eq1 = cusp_moduli::pgl2q_equivalent(&t1, &m1)?;
    let eq2 = cusp_moduli::pgl2q_equivalent(&t2, &m2)?;
    let mut results = json!({
        "word": word.to_string(),
        "T1": t1,
        "T2": t2,
        "chains": {"T1": c1, "T2": c2},
        "M_n": {"T1": m1, "T2": m2},
        "pgl2q_equivalent_to_M_n": {"T1": eq1, "T2": eq2},
    });
    let mut text = format!("I = {word}\nT1 = {t1}\nT2 = {t2}\nM_n: T1 = {m1}, T2 = {m2}\nPGL2(Q)-equivalent to M_n: T1 {eq1}, T2 {eq2}\n");
    if let Some(b) = args.bound {
        let w1 = cusp_moduli::brute_force_pgl2q(&m1, &t1, b);
        let w2 = cusp_moduli::brute_force_pgl2q(&m2, &t2, b);
        rep.push("brute force T1 consistent", w1.is_none() || eq1, format!("{w1:?}"));
        rep.push("brute force T2 consistent", w2.is_none() || eq2, format!("{w2:?}"));
        results["brute_force"] = json!({"bound": b, "T1": w1, "T2": w2});
        text.push_str(&format!("brute force (bound {b}): T1 {w1:?}, T2 {w2:?}\n"));
    }
    results["checks"] = to_value(&rep);
    let env = envelope(
        "moduli",
        vec![("n", json!(word.n())), ("mutation", json!(word.to_string())), ("bound", json!(args.bound))],
        results,
        &[&rep],
    );
    Ok(Outcome { envelope: env, text })
}

pub fn cmd_regulator(args: &NArgs) -> Result<Outcome, UsageError> {
    require_n(args.n)?;
    let beta = bloch::bloch_invariant_mn(args.n)?;
    let reg = bloch::borel_regulator(&beta)?;
    let (v1, v2) = bloch::polyhedron_volumes()?;
    let nf = args.n as f64;
    let expected = (2.0 * v1 + 2.0 * nf * v2, 2.0 * v1 - 2.0 * nf * v2);
    let mut rep = Report::new("regulator");
    rep.push("r1 = 2 v1 + 2n v2", (reg.r1 - expected.0).abs() < 1e-8, format!("{}", round12(reg.r1)));
    rep.push("r2 = 2 v1 - 2n v2", (reg.r2 - expected.1).abs() < 1e-8, format!("{}", round12(reg.r2)));
    let results = json!({
        "bloch_invariant": beta,
        "regulator": {"r1": round12(reg.r1), "r2": round12(reg.r2)},
        "volumes": {"v1": round12(v1), "v2": round12(v2)},
        "checks": rep,
    });
    let text = format!(
        "beta(M_{n}) = {beta}\nregulator = ({}, {})\nv1 = {}, v2 = {}\n",
        round12(reg.r1),
        round12(reg.r2),
        round12(v1),
        round12(v2),
        n = args.n
    );
    Ok(Outcome { envelope: envelope("regulator", vec![("n", json!(args.n))], results, &[&rep]), text })
}

pub fn cmd_classify(args: &NArgs) -> Result<Outcome, UsageError> {
    require_n(args.n)?;
    let fam = cusp_moduli::classify_family(args.n)?;
    let iso = kleinian::isometry_classes(args.n + 1);
    let mut rep = Report::new("classification");
    let single = &fam.single_two_classes;
    let separated = (0..=args.n).all(|k| (0..=args.n).all(|l| (single[k] == single[l]) == (k == l || k + l == args.n)));
    rep.push("I_k and I_l share a class iff l = k or l = n - k", separated, format!("{single:?}"));
    rep.push("adjacent-pair words share moduli", fam.adjacent_pairs_share_moduli || args.n < 2, format!("{:?}", fam.adjacent_pair_classes));
    let iso_json: Vec<Vec<String>> = iso.iter().map(|c| c.iter().map(|w| w.to_string()).collect()).collect();
    let mut text = format!("{} words in {} classes\n", fam.words.len(), fam.class_count);
    for w in &fam.words {
        text.push_str(&format!("  {} class {}: T1 = {}, T2 = {}\n", w.word, w.class_id, w.t1, w.t2));
    }
    text.push_str(&format!("single-2 classes {single:?} ({} distinct)\n", fam.single_two_distinct));
    text.push_str(&format!("adjacent-pair classes {:?}\n", fam.adjacent_pair_classes));
    text.push_str(&format!("isometry classes of {{0,1}}^{}: {}\n", args.n + 1, iso.len()));
    let results = json!({"family": fam, "isometry_classes": iso_json, "checks": rep});
    Ok(Outcome { envelope: envelope("classify", vec![("n", json!(args.n))], results, &[&rep]), text })
}

pub fn cmd_tiling_check(args: &NArgs) -> Result<Outcome, UsageError> {
    require_n(args.n)?;
    let rep = tiling::canonicity_report(args.n as u32);
    let text = format!("{rep}\n");
    let env = envelope("tiling-check", vec![("n", json!(args.n))], to_value(&rep), &[&rep]);
    Ok(Outcome { envelope: env, text })
}

pub fn cmd_report(args: &ReportArgs) -> Result<Outcome, UsageError> {
    let word = resolve_word(args.n, args.mutation.as_deref(), &[0, 1, 2])?;
    if args.max_word_length == 0 || args.max_word_length > 6 {
        return Err(UsageError("max-word-length must be between 1 and 6".into()));
    }
    let spec = kleinian::gamma_i(&word)?;
    let scan = kleinian::integrality_scan(&spec, args.max_word_length)?;
    let (inv, mut rep) = bloch::mutation_invariance_check(&word)?;
    let has_two = word.entries().contains(&2);
    rep.push(
        "nonintegral trace found iff some entry is 2",
        scan.all_integral != has_two || (has_two && scan.all_integral && args.max_word_length < 2),
        scan.witness.as_ref().map(|w| w.word.clone()).unwrap_or_default(),
    );
    let mut results = json!({
        "word": word.to_string(),
        "generators": spec.len(),
        "integrality": scan,
        "bloch_correction": inv,
    });
    let mut text = format!("I = {word}\nGamma_I has {} generators\n", spec.len());
    match &results["integrality"]["witness"] {
        Value::Null => text.push_str(&format!("all traces integral up to length {}\n", args.max_word_length)),
        w => text.push_str(&format!("nonintegral trace: {} (trace {})\n", w["word"], w["trace"])),
    }
    text.push_str(&format!("Bloch correction {}\n", results["bloch_correction"]["correction"]));
    if word.uses_only(&[0, 2]) {
        let (t1, t2) = cusp_moduli::mutant_moduli(&word)?;
        text.push_str(&format!("T1 = {t1}, T2 = {t2}\n"));
        results["moduli"] = json!({"T1": t1, "T2": t2});
    }
    if word.uses_only(&[0, 1]) {
        let class: Vec<String> = kleinian::brute_force_orbit(&word)
            .into_iter()
            .filter(|w| kleinian::isometry_classify(&word, w).map(|v| v == kleinian::IsometryVerdict::Isometric).unwrap_or(false))
            .map(|w| w.to_string())
            .collect();
        text.push_str(&format!("isometric to {}\n", class.join(" ")));
        results["isometric_words"] = json!(class);
    }
    results["checks"] = to_value(&rep);
    let env = envelope(
        "report",
        vec![
            ("n", json!(word.n())),
            ("mutation", json!(word.to_string())),
            ("max_word_length", json!(args.max_word_length)),
        ],
        results,
        &[&rep],
    );
    Ok(Outcome { envelope: env, text })
}

pub fn run(cli: &Cli) -> Result<Outcome, UsageError> {
    match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Moduli(a) => cmd_moduli(a),
        Command::Regulator(a) => cmd_regulator(a),
        Command::Classify(a) => cmd_classify(a),
        Command::TilingCheck(a) => cmd_tiling_check(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// Parses `argv`, runs the command and returns what to print and the exit code.
pub fn main_with_args<I, T>(argv: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let s = e.render().to_string();
            return if code == EXIT_OK { (s, String::new(), code) } else { (String::new(), s, code) };
        }
    };
    match run(&cli) {
        Ok(out) => {
            let code = out.exit_code();
            let err = match (&out.envelope.summary.first_failure, code) {
                (Some(f), EXIT_FAILURE) => format!("verification failed: {f}\n"),
                _ => String::new(),
            };
            (out.render(cli.command.json()), err, code)
        }
        Err(e) => (String::new(), format!("error: {e}\n"), EXIT_USAGE),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (String, String, i32) {
        main_with_args(std::iter::once("commens").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["moduli"]).2, EXIT_USAGE);
        let (_, err, code) = run_args(&["moduli", "--mutation", "0,1"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("position 2") && err.contains("`1`"), "{err}");
        let (_, err, code) = run_args(&["moduli", "--mutation", "0,x,2"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("position 2") && err.contains('x'), "{err}");
        assert_eq!(run_args(&["moduli", "--n", "3", "--mutation", "0,2"]).2, EXIT_USAGE);
        assert_eq!(run_args(&["regulator", "--n", "0"]).2, EXIT_USAGE);
        assert_eq!(run_args(&["frobnicate"]).2, EXIT_USAGE);
        assert_eq!(run_args(&["report", "--n", "1", "--max-word-length", "0"]).2, EXIT_USAGE);
    }

    #[test]
    fn moduli_command() {
        let (out, _, code) = run_args(&["moduli", "--n", "2", "--mutation", "0,2,0", "--json"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["results"]["T1"]["q1"], "6/5");
        assert_eq!(v["results"]["T1"]["q2"], "24/5");
        assert_eq!(v["command"], "moduli");
        let (out2, _, _) = run_args(&["moduli", "--n", "2", "--mutation", "0,2,0", "--json"]);
        assert_eq!(out, out2);
    }

    #[test]
    fn regulator_command() {
        let (out, _, code) = run_args(&["regulator", "--n", "3", "--json"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        let (v1, v2) = bloch::polyhedron_volumes().unwrap();
        let r1 = v["results"]["regulator"]["r1"].as_f64().unwrap();
        assert!((r1 - (2.0 * v1 + 6.0 * v2)).abs() < 1e-8);
    }

    #[test]
    fn classify_command() {
        let (out, _, code) = run_args(&["classify", "--n", "4", "--json"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        let s = v["results"]["family"]["single_two_classes"].as_array().unwrap();
        assert_ne!(s[0], s[1]);
        assert_eq!(s[0], s[4]);
    }

    #[test]
    fn verify_and_negative_control() {
        let (_, _, code) = run_args(&["verify", "--n", "1"]);
        assert_eq!(code, EXIT_OK);
        let (_, err, code) = run_args(&["verify", "--n", "1", "--break-injection"]);
        assert_eq!(code, EXIT_FAILURE);
        assert!(err.contains("p3"), "{err}");
    }

    #[test]
    fn report_command() {
        let (out, _, code) = run_args(&["report", "--mutation", "0,2,0", "--max-word-length", "2"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("nonintegral trace"));
        let (out, _, code) = run_args(&["report", "--mutation", "0,1,0", "--max-word-length", "2"]);
        assert_eq!(code, EXIT_OK, "{out}");
        assert!(out.contains("isometric to"));
    }

    #[test]
    fn rounding() {
        assert_eq!(round12(3.663_862_376_708_876), 3.66386237671);
        assert_eq!(round12(0.0), 0.0);
    }
}
