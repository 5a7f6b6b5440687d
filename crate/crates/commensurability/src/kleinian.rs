//! The groups `Gamma_n`, `Gamma_I` and `G_n` as generator tables, with trace scans, integer
//! word decomposition and the checks that place `Gamma_I` inside `G_n`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::geometry::{HalfSpace, Hyperplane, Incidence};
use crate::moebius::{
    a_i, b0, builtin_generators, c_translation, f0, ExtendedMoebius, GeneratorTable, GroupWord, Point,
};
use crate::numfield::{rat, Nf, RealQuad};
use crate::report::Report;
use crate::{Error, Result};

/// `(a_0, ..., a_n)`: which mutation, if any, is applied at each of the `n + 1` spheres.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MutationWord(Vec<u8>);

impl MutationWord {
    pub fn new(entries: Vec<u8>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Precondition("mutation word is empty".into()));
        }
        if let Some(x) = entries.iter().find(|&&x| x > 2) {
            return Err(Error::Precondition(format!("entry {x} is not in {{0, 1, 2}}")));
        }
        Ok(MutationWord(entries))
    }

    pub fn zeros(len: usize) -> Self {
        MutationWord(vec![0; len])
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `n` for a word of length `n + 1`.
    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    pub fn reversed(&self) -> Self {
        MutationWord(self.0.iter().rev().copied().collect())
    }

    pub fn uses_only(&self, alphabet: &[u8]) -> bool {
        self.0.iter().all(|x| alphabet.contains(x))
    }

    fn require(&self, alphabet: &[u8]) -> Result<()> {
        if self.uses_only(alphabet) {
            Ok(())
        } else {
            Err(Error::Precondition(format!("{self} is not over {alphabet:?}")))
        }
    }

    /// All words of length `len` over the alphabet, in lexicographic order.
    pub fn all(len: usize, alphabet: &[u8]) -> Vec<MutationWord> {
        let mut out = vec![Vec::new()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w: Vec<u8>| {
                    alphabet.iter().map(move |&x| {
                        let mut w = w.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out.into_iter().map(MutationWord).collect()
    }
}

impl FromStr for MutationWord {
    type Err = Error;

    /// Parses `"0,2,0,2"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut pos = 0;
        let mut out = Vec::new();
        for tok in s.split(',') {
            let t = tok.trim();
            let v = t.parse::<u8>().map_err(|_| Error::Parse { token: t.to_string(), position: pos })?;
            out.push(v);
            pos += tok.len() + 1;
        }
        MutationWord::new(out)
    }
}

impl fmt::Display for MutationWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// A generator with the word it was built from.
#[derive(Debug, Clone, Serialize)]
pub struct NamedElement {
    pub name: String,
    pub provenance: String,
    pub element: ExtendedMoebius,
}

#[derive(Debug, Clone, Serialize)]
pub struct GroupSpec {
    pub name: String,
    pub generators: Vec<NamedElement>,
}

impl GroupSpec {
    pub fn table(&self) -> GeneratorTable {
        let mut t = GeneratorTable::new();
        for g in &self.generators {
            t.insert(g.name.clone(), g.element.clone());
        }
        t
    }

    pub fn get(&self, name: &str) -> Option<&ExtendedMoebius> {
        self.generators.iter().find(|g| g.name == name).map(|g| &g.element)
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Same matrices in the same order.
    pub fn same_generators(&self, other: &GroupSpec) -> bool {
        self.len() == other.len() && self.generators.iter().zip(&other.generators).all(|(a, b)| a.element == b.element)
    }
}

fn cpow(k: i64) -> ExtendedMoebius {
    c_translation().pow(k)
}

/// `c^-k x c^k`.
fn shift(x: &ExtendedMoebius, k: i64) -> ExtendedMoebius {
    x.conjugate(&cpow(-k))
}

/// `m_j^(i) = c^-2i m_j c^2i`, with `m_0^(i) = id`.
pub fn indexed_mutator(j: u8, i: usize) -> ExtendedMoebius {
    let t = builtin_generators();
    match j {
        0 => ExtendedMoebius::identity(),
        1 => shift(&t["m1"], 2 * i as i64),
        _ => shift(&t["m2"], 2 * i as i64),
    }
}

/// Generator blocks before any mutation: `Gamma_S`, the `Gamma_T^(i)` and the final mirror.
fn blocks(n: usize) -> Vec<Vec<NamedElement>> {
    let t = builtin_generators();
    let ne = |name: String, provenance: String, element: ExtendedMoebius| NamedElement { name, provenance, element };
    let mut out = vec![vec![
        ne("s".into(), "s".into(), t["s"].clone()),
        ne("t".into(), "t".into(), t["t"].clone()),
    ]];
    for i in 1..=n {
        let k = 2 * (i as i64 - 1);
        let mut b = Vec::new();
        for x in ["f", "g", "h"] {
            b.push(ne(format!("{x}{i}"), format!("c^-{k} {x} c^{k}"), shift(&t[x], k)));
        }
        for x in ["f", "g", "h"] {
            b.push(ne(format!("{x}bar{i}"), format!("c^-{} {x}bar c^{}", k + 2, k + 2), shift(&t[x].bar(), k + 2)));
        }
        out.push(b);
    }
    let k = 2 * n as i64;
    out.push(
        ["s", "t"]
            .iter()
            .map(|x| ne(format!("{x}bar"), format!("c^-{k} {x}bar c^{k}"), shift(&t[*x].bar(), k)))
            .collect(),
    );
    out
}

/// `Gamma_n`: `s, t`, then for each `i` the shifted `f, g, h` and their mirrors, then the
/// shifted mirrors of `s, t`. It has `6n + 4` generators.
pub fn gamma_n(n: usize) -> Result<GroupSpec> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    Ok(GroupSpec { name: format!("Gamma_{n}"), generators: blocks(n).into_iter().flatten().collect() })
}

/// The conjugators `q_1, ..., q_{n+1}` with `q_{i+1} = m_{a_0}^(0) ... m_{a_i}^(i)`.
pub fn conjugators(word: &MutationWord) -> Vec<(String, ExtendedMoebius)> {
    let mut q = ExtendedMoebius::identity();
    let mut name = String::new();
    let mut out = Vec::new();
    for (i, &a) in word.entries().iter().enumerate() {
        q = q.compose(&indexed_mutator(a, i));
        if a != 0 {
            if !name.is_empty() {
                name.push(' ');
            }
            name.push_str(&format!("m{a}({i})"));
        }
        out.push((if name.is_empty() { "1".to_string() } else { name.clone() }, q.clone()));
    }
    out
}

/// `Gamma_I`: block `i` of `Gamma_n` conjugated by `q_i`, the final block by `q_{n+1}`.
pub fn gamma_i(word: &MutationWord) -> Result<GroupSpec> {
    if word.len() < 2 {
        return Err(Error::Precondition("mutation word needs length at least 2".into()));
    }
    let n = word.n();
    let qs = conjugators(word);
    let mut gens = Vec::new();
    for (i, block) in blocks(n).into_iter().enumerate() {
        for g in block {
            if i == 0 {
                gens.push(g);
                continue;
            }
            let (qn, q) = &qs[i - 1];
            if q.is_identity() {
                gens.push(g);
            } else {
                gens.push(NamedElement {
                    name: g.name,
                    provenance: format!("({qn}) {} ({qn})^-1", g.provenance),
                    element: g.element.conjugate(q),
                });
            }
        }
    }
    Ok(GroupSpec { name: format!("Gamma_{word}"), generators: gens })
}

// ---------------------------------------------------------------------------
// Integrality
// ---------------------------------------------------------------------------

/// `a + b sqrt2 + c i + d i sqrt2` with integer coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Zq([i128; 4]);

impl Zq {
    fn add(self, o: Zq) -> Option<Zq> {
        let mut r = [0; 4];
        for i in 0..4 {
            r[i] = self.0[i].checked_add(o.0[i])?;
        }
        Some(Zq(r))
    }

    fn mul(self, o: Zq) -> Option<Zq> {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        // (x0 + x1 sqrt2)(y0 + y1 sqrt2)
        let rq = |x0: i128, x1: i128, y0: i128, y1: i128| -> Option<(i128, i128)> {
            let p = x0.checked_mul(y0)?.checked_add(x1.checked_mul(y1)?.checked_mul(2)?)?;
            let q = x0.checked_mul(y1)?.checked_add(x1.checked_mul(y0)?)?;
            Some((p, q))
        };
        let (rr0, rr1) = rq(a, b, e, f)?;
        let (ii0, ii1) = rq(c, d, g, h)?;
        let (ri0, ri1) = rq(a, b, g, h)?;
        let (ir0, ir1) = rq(c, d, e, f)?;
        Some(Zq([
            rr0.checked_sub(ii0)?,
            rr1.checked_sub(ii1)?,
            ri0.checked_add(ir0)?,
            ri1.checked_add(ir1)?,
        ]))
    }
}

/// A matrix `E / den` with `E` over `Z[i, sqrt2]`.
#[derive(Debug, Clone, Copy)]
struct IntMat {
    e: [Zq; 4],
    den: i128,
}

impl IntMat {
    fn from_moebius(x: &ExtendedMoebius) -> Option<IntMat> {
        let mut den = BigInt::one();
        for z in x.entries() {
            den = den.lcm(&z.denominator());
        }
        let conv = |z: &Nf| -> Option<Zq> {
            let mut r = [0i128; 4];
            for (k, q) in z.coords().iter().enumerate() {
                let v = (*q * &num_rational::BigRational::from_integer(den.clone())).to_integer();
                r[k] = v.to_i128()?;
            }
            Some(Zq(r))
        };
        let [a, b, c, d] = x.entries();
        Some(IntMat { e: [conv(a)?, conv(b)?, conv(c)?, conv(d)?], den: den.to_i128()? })
    }

    fn mul(&self, o: &IntMat) -> Option<IntMat> {
        let [a, b, c, d] = self.e;
        let [e, f, g, h] = o.e;
        let m = IntMat {
            e: [
                a.mul(e)?.add(b.mul(g)?)?,
                a.mul(f)?.add(b.mul(h)?)?,
                c.mul(e)?.add(d.mul(g)?)?,
                c.mul(f)?.add(d.mul(h)?)?,
            ],
            den: self.den.checked_mul(o.den)?,
        };
        Some(m.reduced())
    }

    fn reduced(mut self) -> IntMat {
        if self.den == 1 {
            return self;
        }
        let mut g = self.den;
        for z in &self.e {
            for &x in &z.0 {
                g = g.gcd(&x);
                if g == 1 {
                    return self;
                }
            }
        }
        for z in &mut self.e {
            for x in &mut z.0 {
                *x /= g;
            }
        }
        self.den /= g;
        self
    }

    /// Trace of `self * o` without forming the product.
    fn trace_with(&self, o: &IntMat) -> Option<(Zq, i128)> {
        let [a, b, c, d] = self.e;
        let [e, f, g, h] = o.e;
        let t = a.mul(e)?.add(b.mul(g)?)?.add(c.mul(f)?)?.add(d.mul(h)?)?;
        Some((t, self.den.checked_mul(o.den)?))
    }
}

/// Integrality of `X / den` for `X` in `Z[i, sqrt2]`, from the characteristic polynomial of
/// `X` over `Q`: `X / den` is integral iff `den^k` divides the `k`-th coefficient.
fn quotient_is_integral(x: Zq, den: i128) -> Option<bool> {
    if den == 1 {
        return Some(true);
    }
    let [a, b, c, d] = x.0;
    // over Q(sqrt2): X is a root of Y^2 - p Y + q with p = 2(a + b sqrt2), q = |X|^2
    let (p0, p1) = (a.checked_mul(2)?, b.checked_mul(2)?);
    let q0 = a.checked_mul(a)?
        .checked_add(b.checked_mul(b)?.checked_mul(2)?)?
        .checked_add(c.checked_mul(c)?)?
        .checked_add(d.checked_mul(d)?.checked_mul(2)?)?;
    let q1 = a.checked_mul(b)?.checked_add(c.checked_mul(d)?)?.checked_mul(2)?;
    let e1 = p0.checked_mul(2)?;
    let e2 = q0.checked_mul(2)?.checked_add(p0.checked_mul(p0)?.checked_sub(p1.checked_mul(p1)?.checked_mul(2)?)?)?;
    let e3 = p0.checked_mul(q0)?.checked_sub(p1.checked_mul(q1)?.checked_mul(2)?)?.checked_mul(2)?;
    let e4 = q0.checked_mul(q0)?.checked_sub(q1.checked_mul(q1)?.checked_mul(2)?)?;
    let mut dk = 1i128;
    for e in [e1, e2, e3, e4] {
        dk = dk.checked_mul(den)?;
        if e % dk != 0 {
            return Some(false);
        }
    }
    Some(true)
}

/// A word whose trace is not an algebraic integer.
#[derive(Debug, Clone, Serialize)]
pub struct TraceWitness {
    pub word: String,
    /// Trace of the determinant-one representative (up to sign).
    pub trace: Nf,
    pub denominator: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralityOutcome {
    pub group: String,
    pub max_word_length: usize,
    pub words_checked: u64,
    pub all_integral: bool,
    pub witness: Option<TraceWitness>,
}

struct Scan<'a> {
    letters: Vec<(String, i64, IntMat, ExtendedMoebius)>,
    inverse_of: Vec<usize>,
    checked: u64,
    spec: &'a GroupSpec,
}

impl Scan<'_> {
    /// Exact fallback when the fixed-width path overflows.
    fn exact_integral(&self, path: &[usize]) -> bool {
        let x = path.iter().fold(ExtendedMoebius::identity(), |acc, &l| acc.compose(&self.letters[l].3));
        x.raw_trace().is_algebraic_integer()
    }

    fn word(&self, path: &[usize]) -> GroupWord {
        GroupWord::from_letters(path.iter().map(|&l| (self.letters[l].0.clone(), self.letters[l].1)))
    }

    /// Visits reduced words of exactly `len` letters extending `path` in lexicographic order.
    fn visit(&mut self, path: &mut Vec<usize>, acc: Option<IntMat>, len: usize) -> Option<Vec<usize>> {
        let last = path.last().copied();
        for l in 0..self.letters.len() {
            if last.is_some_and(|p| self.inverse_of[p] == l) {
                continue;
            }
            path.push(l);
            let m = &self.letters[l].2;
            if path.len() == len {
                self.checked += 1;
                let integral = match acc {
                    None => quotient_is_integral(m.e[0].add(m.e[3]).expect("small"), m.den),
                    Some(a) => a.trace_with(m).and_then(|(t, d)| quotient_is_integral(t, d)),
                }
                .unwrap_or_else(|| self.exact_integral(path));
                if !integral {
                    return Some(path.clone());
                }
            } else {
                let next = match acc {
                    None => Some(*m),
                    Some(a) => a.mul(m),
                };
                let found = match next {
                    Some(nx) => self.visit(path, Some(nx), len),
                    None => self.visit_exact(path, len),
                };
                if found.is_some() {
                    return found;
                }
            }
            path.pop();
        }
        None
    }

    /// Slow path below a node whose product no longer fits.
    fn visit_exact(&mut self, path: &mut Vec<usize>, len: usize) -> Option<Vec<usize>> {
        let last = path.last().copied();
        for l in 0..self.letters.len() {
            if last.is_some_and(|p| self.inverse_of[p] == l) {
                continue;
            }
            path.push(l);
            if path.len() == len {
                self.checked += 1;
                if !self.exact_integral(path) {
                    return Some(path.clone());
                }
            } else if let Some(w) = self.visit_exact(path, len) {
                return Some(w);
            }
            path.pop();
        }
        None
    }
}

/// Scans reduced words in the generators and their inverses, shortest first and then in
/// lexicographic order, for a trace that is not an algebraic integer.
pub fn integrality_scan(spec: &GroupSpec, max_word_length: usize) -> Result<IntegralityOutcome> {
    if max_word_length == 0 {
        return Err(Error::Precondition("max_word_length must be at least 1".into()));
    }
    let mut letters = Vec::new();
    let mut inverse_of = Vec::new();
    for g in &spec.generators {
        let x = g.element.normalized()?;
        for (e, m) in [(1, x.clone()), (-1, x.inverse())] {
            let im = IntMat::from_moebius(&m)
                .ok_or_else(|| Error::Inconsistent(format!("entries of {} are too large", g.name)))?;
            inverse_of.push(letters.len() ^ 1);
            letters.push((g.name.clone(), e, im, m));
        }
    }
    let mut scan = Scan { letters, inverse_of, checked: 0, spec };
    for len in 1..=max_word_length {
        if let Some(path) = scan.visit(&mut Vec::new(), None, len) {
            let x = path.iter().fold(ExtendedMoebius::identity(), |acc, &l| acc.compose(&scan.letters[l].3));
            let trace = x.raw_trace();
            let witness = TraceWitness {
                word: scan.word(&path).to_string(),
                denominator: trace.denominator().to_string(),
                trace,
            };
            return Ok(IntegralityOutcome {
                group: scan.spec.name.clone(),
                max_word_length,
                words_checked: scan.checked,
                all_integral: false,
                witness: Some(witness),
            });
        }
    }
    Ok(IntegralityOutcome {
        group: spec.name.clone(),
        max_word_length,
        words_checked: scan.checked,
        all_integral: true,
        witness: None,
    })
}

/// A product of two generators of `Gamma_I` with a nonintegral trace, chosen by where the
/// first `2` sits in `I`. Returns the word and its value.
pub fn structural_witness(word: &MutationWord) -> Result<(GroupWord, ExtendedMoebius)> {
    let spec = gamma_i(word)?;
    let n = word.n();
    let i0 = word
        .entries()
        .iter()
        .position(|&a| a == 2)
        .ok_or_else(|| Error::Precondition(format!("{word} has no entry 2")))?;
    let w = if i0 == 0 {
        "t g1".to_string()
    } else if i0 == n {
        format!("gbar{n} tbar")
    } else {
        format!("hbar{i0} h{}", i0 + 1)
    };
    let gw = GroupWord::parse(&w)?;
    let x = spec.table().evaluate(&gw)?;
    Ok((gw, x))
}

fn nfq(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> Nf {
    Nf::new(rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1), rat(d.0, d.1))
}

/// The printed matrices `t m2 g m2^-1`, `hbar` and `m2 h m2^-1`.
pub fn printed_witness_matrices() -> Vec<(&'static str, ExtendedMoebius)> {
    let z = (0, 1);
    let w = |a, b, c, d| ExtendedMoebius::preserving(a, b, c, d);
    vec![
        (
            "t m2 g m2^-1",
            w(
                nfq((-2, 5), (12, 5), (31, 5), (4, 5)),
                nfq((-2, 1), (1, 1), (21, 1), (2, 1)),
                nfq((-1, 5), (7, 5), (16, 5), (2, 5)),
                nfq((-1, 1), (1, 1), (11, 1), (1, 1)),
            ),
        ),
        ("hbar", w(nfq(z, z, z, (-2, 1)), nfq((-3, 1), z, z, (1, 1)), nfq((-3, 1), z, z, (-1, 1)), nfq(z, z, z, (3, 1)))),
        ("m2 h m2^-1", w(nfq(z, z, z, (-3, 1)), nfq((15, 1), z, z, (-5, 1)), nfq((3, 5), z, (0, 1), (1, 5)), nfq(z, z, z, (2, 1)))),
    ]
}

/// Exact equality of entries up to an overall sign.
pub fn entrywise_equal_pm(x: &ExtendedMoebius, y: &ExtendedMoebius) -> bool {
    let same = x.entries().iter().zip(y.entries()).all(|(a, b)| *a == b);
    let neg = x.entries().iter().zip(y.entries()).all(|(a, b)| **a == -b);
    x.orientation() == y.orientation() && (same || neg)
}

/// Checks the printed matrices against the generators they come from.
pub fn printed_witness_report() -> Report {
    let mut rep = Report::new("nonintegral traces");
    let t = builtin_generators();
    let m2 = &t["m2"];
    let printed = printed_witness_matrices();
    let computed = [t["t"].compose(&t["g"].conjugate(m2)), t["h"].bar(), t["h"].conjugate(m2)];
    for ((name, p), c) in printed.iter().zip(&computed) {
        rep.push(format!("{name} matches entry for entry"), entrywise_equal_pm(p, c), c.to_string());
    }
    // The printed product has (1,1) entry -71/5 but its other entries and its trace 204/5 do
    // not follow from the printed factors; the true trace is -406/5.
    let prod = printed[1].1.compose(&printed[2].1);
    rep.push("hbar m2 h m2^-1 has (1,1) entry -71/5", *prod.entries()[0] == Nf::from_rational(rat(-71, 5)), prod.to_string());
    let tr = prod.raw_trace();
    rep.push("trace of hbar m2 h m2^-1 is -406/5", tr == Nf::from_rational(rat(-406, 5)), tr.to_string());
    rep.push("printed trace 204/5 is also nonintegral", !Nf::from_rational(rat(204, 5)).is_algebraic_integer(), "");
    rep.check("-406/5 is not an algebraic integer", !tr.is_algebraic_integer());
    let tr0 = computed[0].raw_trace();
    rep.push("trace of t m2 g m2^-1 is not integral", !tr0.is_algebraic_integer(), tr0.to_string());
    rep
}

/// The subfield of `Q(i, sqrt2)` generated by the given traces is everything: no nontrivial
/// automorphism fixes all of them.
pub fn traces_generate_full_field(traces: &[Nf]) -> bool {
    let autos: [fn(&Nf) -> Nf; 3] = [|x| x.conj(), |x| x.sigma2(), |x| x.conj().sigma2()];
    autos.iter().all(|s| traces.iter().any(|x| s(x) != *x))
}

// ---------------------------------------------------------------------------
// PSL2(Z)
// ---------------------------------------------------------------------------

fn integer_entry(z: &Nf) -> Option<BigInt> {
    let [a, b, c, d] = z.coords();
    if !b.is_zero() || !c.is_zero() || !d.is_zero() || !a.is_integer() {
        return None;
    }
    Some(a.to_integer())
}

/// A word in `S = (0 -1; 1 0)` and `T = (1 1; 0 1)` equal to `x` up to sign, from the
/// Euclidean algorithm on the first column.
pub fn psl2z_word(x: &ExtendedMoebius) -> Result<GroupWord> {
    if !x.is_preserving() {
        return Err(Error::Precondition("orientation-reversing element".into()));
    }
    let ents: Vec<BigInt> = x
        .entries()
        .iter()
        .map(|z| integer_entry(z))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Precondition(format!("{x} has non-integer entries")))?;
    let (mut a, mut b, mut c, mut d) = (ents[0].clone(), ents[1].clone(), ents[2].clone(), ents[3].clone());
    if &a * &d - &b * &c != BigInt::one() {
        return Err(Error::Precondition(format!("{x} does not have determinant 1")));
    }
    let mut w = GroupWord::empty();
    let small = |v: &BigInt| v.to_i64().ok_or_else(|| Error::Precondition("exponent too large".into()));
    while !c.is_zero() {
        // x = W T^q (T^-q x), then x = W S (S^-1 x)
        let q = a.div_floor(&c);
        if !q.is_zero() {
            a -= &q * &c;
            b -= &q * &d;
            w.push("T", small(&q)?);
        }
        let (na, nb, nc, nd) = (c.clone(), d.clone(), -&a, -&b);
        (a, b, c, d) = (na, nb, nc, nd);
        w.push("S", 1);
    }
    // now +-(1 b'; 0 1)
    let e = &b * &a;
    w.push("T", small(&e)?);
    Ok(reduce_s_squares(w))
}

fn reduce_s_squares(w: GroupWord) -> GroupWord {
    GroupWord::from_letters(w.letters().iter().map(|(n, e)| {
        if n == "S" {
            (n.clone(), e.rem_euclid(2))
        } else {
            (n.clone(), *e)
        }
    }))
}

/// A table holding `S` and `T`.
pub fn psl2z_table() -> GeneratorTable {
    let mut t = GeneratorTable::new();
    t.insert("S", ExtendedMoebius::from_ints(0, -1, 1, 0));
    t.insert("T", ExtendedMoebius::from_ints(1, 1, 0, 1));
    t
}

// ---------------------------------------------------------------------------
// G_n
// ---------------------------------------------------------------------------

fn nf_ints(a: i64, b: i64, c: i64, d: i64) -> Nf {
    Nf::from_ints(a, b, c, d)
}

/// The face planes of `P_n` with the side containing `P_n`, labelled.
///
/// `radius_squared` sets the hemispheres `dB_k` (1 for the true polyhedron).
pub fn pn_faces(n: usize, radius_squared: &RealQuad) -> Result<Vec<(String, Hyperplane, HalfSpace)>> {
    let half = Nf::from_rational(rat(1, 2));
    let inside = Point::Finite(Nf::new(rat(1, 4), rat(0, 1), rat(-1, 4), rat(0, 1)));
    let mut out = Vec::new();
    let verticals = [
        ("H + i/2", Hyperplane::line(Nf::one(), &half * &Nf::i())),
        ("iH", Hyperplane::line(Nf::i(), Nf::zero())),
        ("iH + 1/2", Hyperplane::line(Nf::i(), half.clone())),
        ("H - n i sqrt2", Hyperplane::line(Nf::one(), nf_ints(0, 0, 0, -(n as i64)))),
    ];
    for (name, h) in verticals {
        let hs = HalfSpace::containing(&h, &inside)?;
        out.push((name.to_string(), h, hs));
    }
    for k in 0..=n as i64 {
        let h = Hyperplane::hemisphere(nf_ints(0, 0, 0, -k), radius_squared.clone())?;
        let hs = HalfSpace::containing(&h, &Point::Infinity)?;
        out.push((format!("dB_{k}"), h, hs));
    }
    Ok(out)
}

/// Pairwise interior angles of `P_n`: every pair of face planes that meets does so at an
/// angle with cosine `0`, `1/2` or `sqrt2/2`.
pub fn pn_angle_report(n: usize, radius_squared: &RealQuad) -> Report {
    let mut rep = Report::new(format!("angles of P_{n}"));
    let faces = match pn_faces(n, radius_squared) {
        Ok(f) => f,
        Err(e) => {
            rep.push("face planes", false, e.to_string());
            return rep;
        }
    };
    let allowed = [RealQuad::zero(), RealQuad::from_rational(rat(1, 2)), RealQuad::new(rat(0, 1), rat(1, 2))];
    for i in 0..faces.len() {
        for j in i + 1..faces.len() {
            let inc = faces[i].2.interior_angle(&faces[j].2);
            let (ok, detail) = match &inc {
                Incidence::Meet { cos: Some(c), .. } => (allowed.contains(c), format!("cos {c}")),
                Incidence::Meet { cos_squared, cos: None } => (false, format!("cos^2 {cos_squared}")),
                Incidence::Tangent => (true, "tangent".into()),
                Incidence::Disjoint => (true, "disjoint".into()),
            };
            rep.push(format!("{} / {}", faces[i].0, faces[j].0), ok, detail);
        }
    }
    rep
}

/// Reflection in `dB_m` as an element of `G_n`: a face for `m <= n`, otherwise the conjugate
/// of the face `dB_{2n-m}` by reflection in `H - n i sqrt2`.
pub fn ball_reflection_in_gn(n: usize, m: usize) -> Result<ExtendedMoebius> {
    if m > 2 * n {
        return Err(Error::Precondition(format!("dB_{m} is out of range for n = {n}")));
    }
    let faces = pn_faces(n, &RealQuad::one())?;
    let refl = |name: &str| faces.iter().find(|f| f.0 == name).map(|f| f.1.reflection()).expect("face exists");
    if m <= n {
        Ok(refl(&format!("dB_{m}")))
    } else {
        let rho = refl("H - n i sqrt2");
        Ok(refl(&format!("dB_{}", 2 * n - m)).conjugate(&rho))
    }
}

/// `a_i` as an element of `G_n`, for `0 <= i <= 2n`.
pub fn a_in_gn(n: usize, i: usize) -> Result<ExtendedMoebius> {
    let faces = pn_faces(n, &RealQuad::one())?;
    let half = faces.iter().find(|f| f.0 == "iH + 1/2").expect("face").1.reflection();
    Ok(ball_reflection_in_gn(n, i)?.compose(&half))
}

/// The order-two rotation about the intersection of `iH` and `dB_{2j}`, inside `G_n`.
pub fn rotation_in_gn(n: usize, j: usize) -> Result<ExtendedMoebius> {
    let faces = pn_faces(n, &RealQuad::one())?;
    let ih = faces.iter().find(|f| f.0 == "iH").expect("face").1.reflection();
    Ok(ih.compose(&ball_reflection_in_gn(n, 2 * j)?))
}

/// `f0`, `b0` and the mirror `c^-2n b0bar c^2n` inside `G_n`.
fn f0_b0_in_gn(n: usize) -> Result<(ExtendedMoebius, ExtendedMoebius, ExtendedMoebius)> {
    let faces = pn_faces(n, &RealQuad::one())?;
    let r = |name: &str| faces.iter().find(|f| f.0 == name).expect("face").1.reflection();
    let f0 = r("iH + 1/2").compose(&r("iH"));
    let b0 = r("dB_0").compose(&r("H + i/2"));
    let b0_far = b0.conjugate(&r("H - n i sqrt2"));
    Ok((f0, b0, b0_far))
}

/// Each generator of `Gamma_n` rewritten in elements of `G_n`.
pub fn gamma_n_in_gn(n: usize) -> Result<Vec<(String, ExtendedMoebius)>> {
    let (f0, b0, b0_far) = f0_b0_in_gn(n)?;
    let a = |i: usize| a_in_gn(n, i);
    let cj = |x: &ExtendedMoebius, by: &ExtendedMoebius| x.conjugate(by);
    let fi = f0.inverse();
    let mut out = vec![
        ("s".to_string(), cj(&f0, &a(0)?)),
        ("t".to_string(), cj(&f0, &a(0)?.compose(&b0).inverse()).compose(&a(0)?)),
    ];
    for i in 1..=n {
        let k = 2 * (i - 1);
        out.push((format!("f{i}"), cj(&f0, &a(k)?)));
        out.push((format!("g{i}"), cj(&fi, &a(k)?.inverse().compose(&a(k + 1)?))));
        out.push((format!("h{i}"), a(k + 1)?.compose(&a(k)?).compose(&fi).compose(&a(k + 1)?)));
        let k = 2 * i;
        out.push((format!("fbar{i}"), cj(&f0, &a(k)?)));
        out.push((format!("gbar{i}"), cj(&fi, &a(k)?.inverse().compose(&a(k - 1)?))));
        out.push((format!("hbar{i}"), a(k - 1)?.compose(&a(k)?).compose(&fi).compose(&a(k - 1)?)));
    }
    let k = 2 * n;
    out.push(("sbar".into(), cj(&f0, &a(k)?)));
    out.push(("tbar".into(), cj(&f0, &a(k)?.compose(&b0_far).inverse()).compose(&a(k)?)));
    Ok(out)
}

/// Evaluates a word in `S, T` with `S -> rot`, `T -> (rot a)^-1`.
fn eval_st(w: &GroupWord, rot: &ExtendedMoebius, a: &ExtendedMoebius) -> Result<ExtendedMoebius> {
    let mut t = GeneratorTable::new();
    t.insert("S", rot.clone());
    t.insert("T", rot.compose(a).inverse());
    t.evaluate(w)
}

/// Checks placing `Gamma_n` and the mutators `m1^(j)` inside the reflection group `G_n`.
pub fn commensurator_suite(n: usize) -> Report {
    let mut rep = Report::new(format!("commensurator, n = {n}"));
    if n == 0 {
        rep.push("n is positive", false, "n = 0");
        return rep;
    }
    rep.absorb(pn_angle_report(n, &RealQuad::one()));
    let t = builtin_generators();
    let eq = |rep: &mut Report, name: String, l: Result<ExtendedMoebius>, r: Result<ExtendedMoebius>| match (l, r) {
        (Ok(l), Ok(r)) => {
            let ok = l == r;
            rep.push(name, ok, if ok { String::new() } else { format!("{l} vs {r}") });
        }
        (Err(e), _) | (_, Err(e)) => rep.push(name, false, e.to_string()),
    };
    let ev = |s: &str| t.eval_str(s);

    // f0, b0 and a_i from the faces
    let fb = f0_b0_in_gn(n);
    eq(&mut rep, "f0 from faces".into(), fb.as_ref().map(|x| x.0.clone()).map_err(clone_err), Ok(f0()));
    eq(&mut rep, "b0 from faces".into(), fb.as_ref().map(|x| x.1.clone()).map_err(clone_err), Ok(b0()));
    for i in 0..=2 * n {
        eq(&mut rep, format!("a_{i} in G_n"), a_in_gn(n, i), Ok(a_i(i as i64)));
    }

    // s, t, g, h through f0
    eq(&mut rep, "s = a0 f0 a0^-1".into(), Ok(t["s"].clone()), ev("a0 f0 a0^-1"));
    eq(&mut rep, "f = a0 f0 a0^-1".into(), Ok(t["f"].clone()), ev("a0 f0 a0^-1"));
    eq(&mut rep, "t = (a0 b0)^-1 f0 (a0 b0) a0".into(), Ok(t["t"].clone()), ev("(a0 b0)^-1 f0 (a0 b0) a0"));
    eq(&mut rep, "g = (a0^-1 a1) f0^-1 (a0^-1 a1)^-1".into(), Ok(t["g"].clone()), ev("(a0^-1 a1) f0^-1 (a0^-1 a1)^-1"));
    eq(&mut rep, "h = a1 a0 f0^-1 a1".into(), Ok(t["h"].clone()), ev("a1 a0 f0^-1 a1"));

    // back-conjugation
    let k = n as i64;
    let rho = cpow(-k).compose(&crate::moebius::r_reflection()).compose(&cpow(k));
    for x in ["s", "t", "f", "g", "h", "a0", "b0"] {
        let lhs = rho.compose(&t[x]).compose(&rho);
        let rhs = shift(&t[x].bar(), 2 * k);
        eq(&mut rep, format!("back-conjugation of {x}"), Ok(lhs), Ok(rhs));
    }
    // c^-2i a_i bar c^2i = a_i
    for i in 0..=2 * k {
        eq(&mut rep, format!("c^-{} a_{i}bar c^{} = a_{i}", 2 * i, 2 * i), Ok(shift(&a_i(i).bar(), 2 * i)), Ok(a_i(i)));
    }
    // Gamma_n inside G_n
    match (gamma_n(n), gamma_n_in_gn(n)) {
        (Ok(g), Ok(words)) => {
            for (name, x) in words {
                eq(&mut rep, format!("{name} from G_n"), Ok(x), g.get(&name).cloned().ok_or(Error::UnknownGenerator(name.clone())));
            }
        }
        (Err(e), _) | (_, Err(e)) => rep.push("Gamma_n from G_n", false, e.to_string()),
    }
    // m1^(j) through S, T words
    match psl2z_word(&t["m1"]) {
        Ok(w) => {
            eq(&mut rep, format!("m1 = {w}"), psl2z_table().evaluate(&w), Ok(t["m1"].clone()));
            for j in 0..=n {
                let lhs = rotation_in_gn(n, j).and_then(|rot| eval_st(&w, &rot, &a_i(2 * j as i64)));
                eq(&mut rep, format!("m1^({j}) from G_n"), lhs, Ok(indexed_mutator(1, j)));
            }
        }
        Err(e) => rep.push("m1 as a word in S, T", false, e.to_string()),
    }
    rep
}

fn clone_err(e: &Error) -> Error {
    Error::Inconsistent(e.to_string())
}

// ---------------------------------------------------------------------------
// Isometry classes of mutants
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IsometryVerdict {
    Isometric,
    NotIsometric,
}

/// Sets both endpoints to 0.
pub fn normalize_endpoints(w: &MutationWord) -> MutationWord {
    let mut e = w.entries().to_vec();
    let last = e.len() - 1;
    e[0] = 0;
    e[last] = 0;
    MutationWord(e)
}

/// `M_I` and `M_J` over `{0, 1}` are isometric iff after endpoint normalization `J = I` or
/// `J` is `I` reversed.
pub fn isometry_classify(i: &MutationWord, j: &MutationWord) -> Result<IsometryVerdict> {
    if i.len() != j.len() {
        return Err(Error::Precondition(format!("{i} and {j} differ in length")));
    }
    i.require(&[0, 1])?;
    j.require(&[0, 1])?;
    let (a, b) = (normalize_endpoints(i), normalize_endpoints(j));
    Ok(if a == b || a == b.reversed() { IsometryVerdict::Isometric } else { IsometryVerdict::NotIsometric })
}

/// Orbit of `w` under reversal and flipping either endpoint, by breadth-first search.
pub fn brute_force_orbit(w: &MutationWord) -> Vec<MutationWord> {
    let flip = |w: &MutationWord, k: usize| {
        let mut e = w.entries().to_vec();
        e[k] = 1 - e[k];
        MutationWord(e)
    };
    let mut seen = vec![w.clone()];
    let mut queue = std::collections::VecDeque::from([w.clone()]);
    while let Some(x) = queue.pop_front() {
        for y in [x.reversed(), flip(&x, 0), flip(&x, x.len() - 1)] {
            if !seen.contains(&y) {
                seen.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    seen.sort();
    seen
}

/// Isometry classes of `{0, 1}^len`, each as its sorted list of endpoint-normalized members.
pub fn isometry_classes(len: usize) -> Vec<Vec<MutationWord>> {
    let mut classes: Vec<Vec<MutationWord>> = Vec::new();
    for w in MutationWord::all(len, &[0, 1]) {
        let w = normalize_endpoints(&w);
        if classes.iter().any(|c| c.contains(&w)) {
            continue;
        }
        let mut c = vec![w.clone()];
        if w.reversed() != w {
            c.push(w.reversed());
        }
        c.sort();
        classes.push(c);
    }
    classes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> MutationWord {
        s.parse().unwrap()
    }

    #[test]
    fn parse_words() {
        assert_eq!(w("0,2,0,2").entries(), &[0, 2, 0, 2]);
        assert_eq!(w(" 1 ,0").to_string(), "(1,0)");
        assert!(matches!("0,x".parse::<MutationWord>(), Err(Error::Parse { position: 2, .. })));
        assert!("0,3".parse::<MutationWord>().is_err());
    }

    #[test]
    fn gamma_n_counts() {
        assert_eq!(gamma_n(1).unwrap().len(), 10);
        assert_eq!(gamma_n(3).unwrap().len(), 22);
        assert!(gamma_n(0).is_err());
        assert!(gamma_n(3).unwrap().generators.iter().all(|g| g.element.has_integral_entries()));
        assert!(gamma_n(3).unwrap().generators.iter().all(|g| g.element.is_preserving() && g.element.det().is_one()));
    }

    #[test]
    fn unmutated_word_gives_gamma_n() {
        for n in 1..=4 {
            assert!(gamma_i(&MutationWord::zeros(n + 1)).unwrap().same_generators(&gamma_n(n).unwrap()));
        }
        assert!(gamma_i(&w("0")).is_err());
    }

    #[test]
    fn trace_field() {
        let t = builtin_generators();
        let tt = t["t"].raw_trace();
        let th = t["h"].raw_trace();
        assert!(traces_generate_full_field(&[tt.clone(), th.clone()]));
        assert!(!traces_generate_full_field(&[tt]));
        assert!(!traces_generate_full_field(&[th]));
    }

    #[test]
    fn printed_matrices_match() {
        let rep = printed_witness_report();
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn first_block_witness_is_printed_matrix() {
        let (_, x) = structural_witness(&w("2,0,0")).unwrap();
        assert!(entrywise_equal_pm(&x, &printed_witness_matrices()[0].1));
    }

    #[test]
    fn structural_witnesses_are_nonintegral() {
        for n in 1..=4 {
            for word in MutationWord::all(n + 1, &[0, 1, 2]).into_iter().filter(|x| x.entries().contains(&2)) {
                let (gw, x) = structural_witness(&word).unwrap();
                let tr = x.normalized().unwrap().raw_trace();
                assert!(!tr.is_algebraic_integer(), "{word}: {gw}");
                assert!((tr.denominator() % BigInt::from(5)).is_zero());
                let interior = word.entries()[1..n].contains(&2) && word.entries()[0] != 2;
                if interior {
                    let v = Nf::from_rational(rat(-406, 5));
                    assert!(tr == v || tr == -&v, "{word}");
                }
            }
        }
    }

    #[test]
    fn fast_integrality_agrees_with_char_poly() {
        let xs = [
            nfq((204, 5), (0, 1), (0, 1), (0, 1)),
            nfq((1, 2), (1, 2), (1, 2), (1, 2)),
            nfq((0, 1), (1, 2), (0, 1), (1, 2)),
            nfq((1, 2), (0, 1), (1, 2), (0, 1)),
            nfq((3, 1), (-2, 1), (1, 1), (7, 1)),
            nfq((2, 5), (1, 5), (3, 5), (4, 5)),
        ];
        for x in xs {
            let mut den = BigInt::one();
            for q in x.coords() {
                den = den.lcm(q.denom());
            }
            let d = num_rational::BigRational::from_integer(den.clone());
            let coords: Vec<i128> = x.coords().iter().map(|q| (*q * &d).to_integer().to_i128().unwrap()).collect();
            let fast = quotient_is_integral(Zq([coords[0], coords[1], coords[2], coords[3]]), den.to_i128().unwrap());
            assert_eq!(fast, Some(x.is_algebraic_integer()), "{x}");
        }
    }

    #[test]
    fn scans() {
        let out = integrality_scan(&gamma_n(2).unwrap(), 3).unwrap();
        assert!(out.all_integral);
        assert_eq!(out.words_checked, 32 + 32 * 31 + 32 * 31 * 31);
        let out = integrality_scan(&gamma_i(&w("2,0,0")).unwrap(), 4).unwrap();
        let wit = out.witness.unwrap();
        assert!(!wit.trace.is_algebraic_integer());
        assert!((BigInt::from_str(&wit.denominator).unwrap() % BigInt::from(5)).is_zero());
        let p1 = GroupSpec {
            name: "<p1>".into(),
            generators: vec![NamedElement { name: "p1".into(), provenance: "p1".into(), element: builtin_generators()["p1"].clone() }],
        };
        assert!(integrality_scan(&p1, 6).unwrap().all_integral);
        assert!(integrality_scan(&p1, 0).is_err());
    }

    #[test]
    fn psl2z_words() {
        let t = psl2z_table();
        let tr = ExtendedMoebius::from_ints(1, 1, 0, 1);
        assert_eq!(psl2z_word(&tr).unwrap().to_string(), "T");
        let s2 = ExtendedMoebius::from_ints(-1, 0, 0, -1);
        assert!(psl2z_word(&s2).unwrap().is_empty());
        let m1 = builtin_generators()["m1"].clone();
        assert_eq!(t.evaluate(&psl2z_word(&m1).unwrap()).unwrap(), m1);
        assert!(psl2z_word(&builtin_generators()["t"]).is_err());
        assert!(psl2z_word(&ExtendedMoebius::from_ints(2, 0, 0, 1)).is_err());
    }

    #[test]
    fn pn_angles() {
        for n in 1..=3 {
            let rep = pn_angle_report(n, &RealQuad::one());
            assert!(rep.passed(), "{rep}");
        }
        assert_eq!(pn_faces(3, &RealQuad::one()).unwrap().len(), 8);
        let bad = pn_angle_report(2, &RealQuad::from_rational(rat(9, 8)));
        assert!(!bad.passed());
    }

    #[test]
    fn commensurator_checks() {
        for n in 1..=3 {
            let rep = commensurator_suite(n);
            assert!(rep.passed(), "{rep}");
        }
    }

    #[test]
    fn isometry_examples() {
        use IsometryVerdict::*;
        assert_eq!(isometry_classify(&w("0,1,0,0"), &w("0,0,1,0")).unwrap(), Isometric);
        assert_eq!(isometry_classify(&w("0,1,1,0"), &w("0,1,0,0")).unwrap(), NotIsometric);
        assert_eq!(isometry_classify(&w("1,0,0,1"), &w("0,0,0,0")).unwrap(), Isometric);
        assert!(isometry_classify(&w("0,1"), &w("0,1,0")).is_err());
        assert!(isometry_classify(&w("0,2"), &w("0,1")).is_err());
    }

    #[test]
    fn isometry_matches_orbits() {
        for len in 2..=6 {
            let all = MutationWord::all(len, &[0, 1]);
            for i in &all {
                let orbit = brute_force_orbit(i);
                for j in &all {
                    let v = isometry_classify(i, j).unwrap() == IsometryVerdict::Isometric;
                    assert_eq!(v, orbit.contains(j), "{i} {j}");
                }
            }
            assert!(isometry_classes(len).iter().all(|c| c.len() <= 2));
        }
    }
}
