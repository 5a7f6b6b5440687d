//! Projective 2x2 matrices over `K`, possibly orientation-reversing, and words in them.
//!
//! An orientation-reversing element with matrix `M` acts on the Riemann sphere by
//! conjugating its input first and then applying `M` as a Moebius map. Composition
//! follows from that convention: `X o Y` has matrix `M_X * conj(M_Y)` when `X` reverses
//! orientation and `M_X * M_Y` otherwise.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Index, Mul};

use serde::{Serialize, Serializer};

use crate::numfield::{int, Embedding, Nf, RealQuad};
use crate::report::Report;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Preserving,
    Reversing,
}

impl Orientation {
    fn then(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::Preserving
        } else {
            Orientation::Reversing
        }
    }
}

/// A point of `K u {oo}` on the sphere at infinity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Point {
    Finite(Nf),
    Infinity,
}

impl Point {
    pub fn finite(z: Nf) -> Self {
        Point::Finite(z)
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Point::Finite(Nf::from_ints(a, b, c, d))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Nf> {
        match self {
            Point::Finite(z) => Some(z),
            Point::Infinity => None,
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            Point::Finite(z) => Point::Finite(z.conj()),
            Point::Infinity => Point::Infinity,
        }
    }
}

impl From<Nf> for Point {
    fn from(z: Nf) -> Self {
        Point::Finite(z)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(z) => write!(f, "{z}"),
            Point::Infinity => write!(f, "∞"),
        }
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Point::Finite(z) => z.serialize(s),
            Point::Infinity => s.serialize_str("inf"),
        }
    }
}

/// Element of the extended Moebius group with entries in `K`.
///
/// Equality is projective: matrices are compared up to a nonzero scalar.
#[derive(Clone)]
pub struct ExtendedMoebius {
    m: [Nf; 4],
    orientation: Orientation,
}

fn mat_mul(x: &[Nf; 4], y: &[Nf; 4]) -> [Nf; 4] {
    [
        &x[0] * &y[0] + &x[1] * &y[2],
        &x[0] * &y[1] + &x[1] * &y[3],
        &x[2] * &y[0] + &x[3] * &y[2],
        &x[2] * &y[1] + &x[3] * &y[3],
    ]
}

fn mat_conj(x: &[Nf; 4]) -> [Nf; 4] {
    [x[0].conj(), x[1].conj(), x[2].conj(), x[3].conj()]
}

impl ExtendedMoebius {
    pub fn new(a: Nf, b: Nf, c: Nf, d: Nf, orientation: Orientation) -> Result<Self> {
        let x = ExtendedMoebius { m: [a, b, c, d], orientation };
        if x.det().is_zero() {
            return Err(Error::Singular);
        }
        Ok(x)
    }

    /// Orientation-preserving element; panics on a singular matrix.
    pub fn preserving(a: Nf, b: Nf, c: Nf, d: Nf) -> Self {
        Self::new(a, b, c, d, Orientation::Preserving).expect("singular matrix")
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Self::preserving(a.into(), b.into(), c.into(), d.into())
    }

    pub fn identity() -> Self {
        Self::from_ints(1, 0, 0, 1)
    }

    /// Reflection in the circle or line `{a|z|^2 + b zbar + bbar z + d = 0}`.
    ///
    /// `a` and `d` are real, and the form must be indefinite: `|b|^2 - ad > 0`.
    pub fn hermitian_reflection(a: &RealQuad, b: &Nf, d: &RealQuad) -> Result<Self> {
        let disc = b.abs2() - a * d;
        if !disc.is_positive() {
            return Err(Error::Degenerate(format!("form ({a}, {b}, {d}) has no real locus")));
        }
        Self::new(
            -b,
            -Nf::from_real(d.clone()),
            Nf::from_real(a.clone()),
            b.conj(),
            Orientation::Reversing,
        )
    }

    pub fn entries(&self) -> [&Nf; 4] {
        [&self.m[0], &self.m[1], &self.m[2], &self.m[3]]
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn is_preserving(&self) -> bool {
        self.orientation == Orientation::Preserving
    }

    pub fn det(&self) -> Nf {
        &self.m[0] * &self.m[3] - &self.m[1] * &self.m[2]
    }

    /// Raw matrix trace of this representative.
    pub fn raw_trace(&self) -> Nf {
        &self.m[0] + &self.m[3]
    }

    /// `self o other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let rhs = match self.orientation {
            Orientation::Preserving => mat_mul(&self.m, &other.m),
            Orientation::Reversing => mat_mul(&self.m, &mat_conj(&other.m)),
        };
        ExtendedMoebius { m: rhs, orientation: self.orientation.then(other.orientation) }
    }

    /// Exact inverse: the representative returned has determinant `1/det` (or its conjugate).
    pub fn inverse(&self) -> Self {
        let det = self.det();
        let dinv = det.inv().expect("nonsingular by construction");
        let [a, b, c, d] = &self.m;
        let adj = [d.clone(), -b, -c, a.clone()];
        let m = match self.orientation {
            Orientation::Preserving => adj.map(|e| &e * &dinv),
            Orientation::Reversing => {
                let s = dinv.conj();
                mat_conj(&adj).map(|e| &e * &s)
            }
        };
        ExtendedMoebius { m, orientation: self.orientation }
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::identity();
        let mut sq = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.compose(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.compose(&sq);
            }
        }
        acc
    }

    /// `by o self o by^-1`, written `self^by`.
    pub fn conjugate(&self, by: &Self) -> Self {
        by.compose(self).compose(&by.inverse())
    }

    /// Entrywise complex conjugate, keeping the orientation.
    pub fn bar(&self) -> Self {
        ExtendedMoebius { m: mat_conj(&self.m), orientation: self.orientation }
    }

    /// Entrywise `sqrt2 -> -sqrt2`.
    pub fn sigma2(&self) -> Self {
        ExtendedMoebius { m: self.m.clone().map(|e| e.sigma2()), orientation: self.orientation }
    }

    /// Multiplies every entry by `lambda` (the projective class is unchanged).
    pub fn scaled(&self, lambda: &Nf) -> Result<Self> {
        if lambda.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(ExtendedMoebius { m: self.m.clone().map(|e| &e * lambda), orientation: self.orientation })
    }

    pub fn projectively_equal(&self, other: &Self) -> bool {
        if self.orientation != other.orientation {
            return false;
        }
        // x = lambda y iff all cross products x_i y_j - x_j y_i vanish
        for i in 0..4 {
            for j in (i + 1)..4 {
                if &self.m[i] * &other.m[j] != &self.m[j] * &other.m[i] {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_identity(&self) -> bool {
        self.projectively_equal(&Self::identity())
    }

    /// A determinant-one representative, when `det` is a square in `K`.
    pub fn normalized(&self) -> Result<Self> {
        let det = self.det();
        if det.is_one() {
            return Ok(self.clone());
        }
        let root = det.sqrt().ok_or_else(|| Error::NotASquare(det.to_string()))?;
        self.scaled(&root.inv()?)
    }

    /// `tr^2 / det`, the projective invariant behind `trace_pm`.
    pub fn trace_squared_normalized(&self) -> Nf {
        let t = self.raw_trace();
        (&t * &t).checked_div(&self.det()).expect("nonsingular")
    }

    pub fn trace_pm(&self) -> Result<TracePm> {
        if !self.is_preserving() {
            return Err(Error::Precondition("trace of an orientation-reversing element".into()));
        }
        Ok(TracePm::new(self.normalized()?.raw_trace()))
    }

    pub fn classify(&self) -> Result<Classification> {
        if !self.is_preserving() {
            return Err(Error::Precondition("classify needs an orientation-preserving element".into()));
        }
        self.normalized()?;
        if self.is_identity() {
            return Ok(Classification::Identity);
        }
        let t2 = self.trace_squared_normalized();
        if t2 == Nf::from(4) {
            return Ok(Classification::Parabolic);
        }
        let mut p = self.clone();
        for k in 2..=ELLIPTIC_SEARCH_BOUND {
            p = p.compose(self);
            if p.is_identity() {
                return Ok(Classification::Elliptic(Some(k)));
            }
        }
        let z = t2.embed(Embedding::Sigma1);
        if z.im.abs() < 1e-12 && z.re >= 0.0 && z.re < 4.0 {
            Ok(Classification::Elliptic(None))
        } else {
            Ok(Classification::Loxodromic)
        }
    }

    /// Action on a boundary point.
    pub fn apply(&self, p: &Point) -> Point {
        let input = match self.orientation {
            Orientation::Preserving => p.clone(),
            Orientation::Reversing => p.conj(),
        };
        let [a, b, c, d] = &self.m;
        match input {
            Point::Infinity => {
                if c.is_zero() {
                    Point::Infinity
                } else {
                    Point::Finite(a / c)
                }
            }
            Point::Finite(z) => {
                let den = c * &z + d;
                if den.is_zero() {
                    Point::Infinity
                } else {
                    Point::Finite(&(a * &z + b) / &den)
                }
            }
        }
    }

    /// The orientation-preserving map sending `p, q, r` to `0, 1, oo`.
    pub fn to_zero_one_infinity(p: &Point, q: &Point, r: &Point) -> Result<Self> {
        if p == q || q == r || p == r {
            return Err(Error::Degenerate("three distinct points needed".into()));
        }
        let one = Nf::one();
        let (a, b, c, d) = match (p, q, r) {
            (Point::Infinity, Point::Finite(q), Point::Finite(r)) => (Nf::zero(), q - r, one, -r),
            (Point::Finite(p), Point::Infinity, Point::Finite(r)) => (one.clone(), -p, one, -r),
            (Point::Finite(p), Point::Finite(q), Point::Infinity) => (one, -p, Nf::zero(), q - p),
            (Point::Finite(p), Point::Finite(q), Point::Finite(r)) => {
                let qr = q - r;
                let qp = q - p;
                (qr.clone(), -(p * &qr), qp.clone(), -(r * &qp))
            }
            _ => unreachable!("distinct points include at most one infinity"),
        };
        ExtendedMoebius::new(a, b, c, d, Orientation::Preserving)
    }

    /// The orientation-preserving map sending each `src[i]` to `dst[i]`.
    pub fn through_triples(src: [&Point; 3], dst: [&Point; 3]) -> Result<Self> {
        let a = Self::to_zero_one_infinity(src[0], src[1], src[2])?;
        let b = Self::to_zero_one_infinity(dst[0], dst[1], dst[2])?;
        Ok(b.inverse().compose(&a))
    }

    /// True iff every entry is an algebraic integer.
    pub fn has_integral_entries(&self) -> bool {
        self.m.iter().all(Nf::is_algebraic_integer)
    }
}

/// Powers tried when looking for a finite elliptic order.
pub const ELLIPTIC_SEARCH_BOUND: u32 = 12;

impl PartialEq for ExtendedMoebius {
    fn eq(&self, other: &Self) -> bool {
        self.projectively_equal(other)
    }
}

impl Eq for ExtendedMoebius {}

impl Mul for &ExtendedMoebius {
    type Output = ExtendedMoebius;
    fn mul(self, rhs: &ExtendedMoebius) -> ExtendedMoebius {
        self.compose(rhs)
    }
}

impl Mul for ExtendedMoebius {
    type Output = ExtendedMoebius;
    fn mul(self, rhs: ExtendedMoebius) -> ExtendedMoebius {
        self.compose(&rhs)
    }
}

impl fmt::Display for ExtendedMoebius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.m;
        write!(f, "({a}, {b}; {c}, {d})")?;
        if self.orientation == Orientation::Reversing {
            write!(f, " o conj")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ExtendedMoebius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for ExtendedMoebius {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            entries: [[&'a Nf; 2]; 2],
            orientation: Orientation,
        }
        let [a, b, c, d] = &self.m;
        Repr { entries: [[a, b], [c, d]], orientation: self.orientation }.serialize(s)
    }
}

/// A trace defined up to sign.
#[derive(Debug, Clone)]
pub struct TracePm {
    tau: Nf,
}

impl TracePm {
    fn new(t: Nf) -> Self {
        let neg = -&t;
        // canonical representative: the lexicographically larger of the two
        let tau = if neg > t { neg } else { t };
        TracePm { tau }
    }

    pub fn value(&self) -> &Nf {
        &self.tau
    }

    pub fn contains(&self, x: &Nf) -> bool {
        *x == self.tau || *x == -&self.tau
    }

    pub fn is_algebraic_integer(&self) -> bool {
        self.tau.is_algebraic_integer()
    }
}

impl PartialEq for TracePm {
    fn eq(&self, other: &Self) -> bool {
        self.tau == other.tau
    }
}

impl Eq for TracePm {}

impl fmt::Display for TracePm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "±({})", self.tau)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    Identity,
    Parabolic,
    /// `None` means infinite order.
    Elliptic(Option<u32>),
    Loxodromic,
}

// ---------------------------------------------------------------------------
// Words
// ---------------------------------------------------------------------------

/// A word `x1^e1 x2^e2 ...` over named generators; evaluated left to right.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupWord {
    letters: Vec<(String, i64)>,
}

impl GroupWord {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_letters<I, S>(letters: I) -> Self
    where
        I: IntoIterator<Item = (S, i64)>,
        S: Into<String>,
    {
        let mut w = GroupWord::empty();
        for (name, e) in letters {
            w.push(name, e);
        }
        w
    }

    /// Appends a letter, merging with the last one when the names agree.
    pub fn push(&mut self, name: impl Into<String>, e: i64) {
        let name = name.into();
        if e == 0 {
            return;
        }
        if let Some(last) = self.letters.last_mut() {
            if last.0 == name {
                last.1 += e;
                if last.1 == 0 {
                    self.letters.pop();
                }
                return;
            }
        }
        self.letters.push((name, e));
    }

    pub fn letters(&self) -> &[(String, i64)] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Total number of generator occurrences, counting `x^3` as three.
    pub fn length(&self) -> u64 {
        self.letters.iter().map(|(_, e)| e.unsigned_abs()).sum()
    }

    pub fn inverse(&self) -> Self {
        GroupWord { letters: self.letters.iter().rev().map(|(n, e)| (n.clone(), -e)).collect() }
    }

    pub fn concat(&self, other: &Self) -> Self {
        let mut w = self.clone();
        for (n, e) in &other.letters {
            w.push(n.clone(), *e);
        }
        w
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut w = GroupWord::empty();
        for _ in 0..e.unsigned_abs() {
            w = w.concat(&base);
        }
        w
    }

    /// Rewrites every generator name through `f`.
    pub fn rename(&self, f: impl Fn(&str) -> String) -> Self {
        GroupWord::from_letters(self.letters.iter().map(|(n, e)| (f(n), *e)))
    }

    /// Parses words such as `s t s t^-2`, `(t a)^-1 a (t a)` or `p1^{-1}`.
    ///
    /// Names start with a letter and may contain digits, `_` and `'`.
    /// Letters are separated by whitespace, `.` or `*`.
    pub fn parse(src: &str) -> Result<Self> {
        let mut p = Parser { src, pos: 0 };
        let w = p.word()?;
        p.skip_separators();
        if p.pos < src.len() {
            return Err(p.error());
        }
        Ok(w)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn error(&self) -> Error {
        let token = self.peek().map(String::from).unwrap_or_else(|| "end of input".into());
        Error::Parse { token, position: self.pos }
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace() || c == '.' || c == '*') {
            self.bump();
        }
    }

    fn word(&mut self) -> Result<GroupWord> {
        let mut w = GroupWord::empty();
        loop {
            self.skip_separators();
            match self.peek() {
                Some('(') => {
                    self.bump();
                    let inner = self.word()?;
                    self.skip_separators();
                    if self.peek() != Some(')') {
                        return Err(self.error());
                    }
                    self.bump();
                    let e = self.exponent()?;
                    w = w.concat(&inner.pow(e));
                }
                Some(c) if c.is_alphabetic() => {
                    let start = self.pos;
                    while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_' || c == '\'') {
                        self.bump();
                    }
                    let name = self.src[start..self.pos].to_string();
                    let e = self.exponent()?;
                    w.push(name, e);
                }
                _ => return Ok(w),
            }
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.bump();
        let braced = self.peek() == Some('{');
        if braced {
            self.bump();
        }
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('+')) {
            self.bump();
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        let text = &self.src[start..self.pos];
        let e: i64 = text.parse().map_err(|_| Error::Parse {
            token: if text.is_empty() { self.peek().map(String::from).unwrap_or_default() } else { text.into() },
            position: start,
        })?;
        if braced {
            if self.peek() != Some('}') {
                return Err(self.error());
            }
            self.bump();
        }
        if e == 0 {
            return Err(Error::Parse { token: text.into(), position: start });
        }
        Ok(e)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for (i, (n, e)) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if *e == 1 {
                write!(f, "{n}")?;
            } else {
                write!(f, "{n}^{e}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for GroupWord {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

// ---------------------------------------------------------------------------
// Generator tables
// ---------------------------------------------------------------------------

/// Named elements, read-only once built.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct GeneratorTable {
    entries: BTreeMap<String, ExtendedMoebius>,
}

impl GeneratorTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, x: ExtendedMoebius) {
        self.entries.insert(name.into(), x);
    }

    pub fn get(&self, name: &str) -> Option<&ExtendedMoebius> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ExtendedMoebius)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn evaluate(&self, w: &GroupWord) -> Result<ExtendedMoebius> {
        let mut acc = ExtendedMoebius::identity();
        for (name, e) in w.letters() {
            let x = self.get(name).ok_or_else(|| Error::UnknownGenerator(name.clone()))?;
            acc = acc.compose(&x.pow(*e));
        }
        Ok(acc)
    }

    /// Parses and evaluates in one step.
    pub fn eval_str(&self, src: &str) -> Result<ExtendedMoebius> {
        self.evaluate(&GroupWord::parse(src)?)
    }
}

impl Index<&str> for GeneratorTable {
    type Output = ExtendedMoebius;
    fn index(&self, name: &str) -> &ExtendedMoebius {
        self.get(name).unwrap_or_else(|| panic!("no generator named {name}"))
    }
}

fn nf(a: i64, b: i64, c: i64, d: i64) -> Nf {
    Nf::from_ints(a, b, c, d)
}

fn m(a: Nf, b: Nf, c: Nf, d: Nf) -> ExtendedMoebius {
    ExtendedMoebius::preserving(a, b, c, d)
}

/// `c = (1, i sqrt2; 0, 1)`, translation by `i sqrt2`.
pub fn c_translation() -> ExtendedMoebius {
    m(nf(1, 0, 0, 0), nf(0, 0, 0, 1), Nf::zero(), nf(1, 0, 0, 0))
}

/// Reflection in the real line: `z -> zbar`.
pub fn r_reflection() -> ExtendedMoebius {
    ExtendedMoebius::new(Nf::one(), Nf::zero(), Nf::zero(), Nf::one(), Orientation::Reversing)
        .expect("nonsingular")
}

/// Reflection in the line `Re z = 1/2`.
fn refl_half_vertical() -> ExtendedMoebius {
    ExtendedMoebius::hermitian_reflection(&RealQuad::zero(), &Nf::one(), &RealQuad::from_ints(-1, 0))
        .expect("line")
}

/// Reflection in the line `Re z = 0`.
fn refl_imaginary_axis() -> ExtendedMoebius {
    ExtendedMoebius::hermitian_reflection(&RealQuad::zero(), &Nf::one(), &RealQuad::zero()).expect("line")
}

/// Reflection in the line `Im z = 1/2`.
fn refl_half_horizontal() -> ExtendedMoebius {
    let b = Nf::from_rational(crate::numfield::rat(1, 2)) * Nf::i();
    ExtendedMoebius::hermitian_reflection(&RealQuad::zero(), &b, &RealQuad::new(crate::numfield::rat(-1, 2), int(0)))
        .expect("line")
}

/// Reflection in the unit circle about `-j i sqrt2`, the boundary of `B_j`.
pub fn refl_ball(j: i64) -> ExtendedMoebius {
    // |z - w|^2 - 1 with w = -j i sqrt2: a = 1, b = -w, d = |w|^2 - 1 = 2j^2 - 1
    let b = nf(0, 0, 0, j);
    ExtendedMoebius::hermitian_reflection(&RealQuad::one(), &b, &RealQuad::from_ints(2 * j * j - 1, 0))
        .expect("circle")
}

/// `a_i`: reflect in `Re z = 1/2`, then in the boundary of `B_i`.
pub fn a_from_reflections(i: i64) -> ExtendedMoebius {
    refl_ball(i).compose(&refl_half_vertical())
}

/// `a_i = c^-i a_0 c^i`.
pub fn a_i(i: i64) -> ExtendedMoebius {
    let c = c_translation();
    let a0 = ExtendedMoebius::from_ints(0, 1, -1, 1);
    a0.conjugate(&c.pow(-i))
}

/// `b_0`: reflect in `Im z = 1/2`, then in the unit circle.
pub fn b0() -> ExtendedMoebius {
    refl_ball(0).compose(&refl_half_horizontal())
}

/// `f_0`: reflect in the imaginary axis, then in `Re z = 1/2`.
pub fn f0() -> ExtendedMoebius {
    refl_half_vertical().compose(&refl_imaginary_axis())
}

/// The order-two rotation obtained from reflecting in the unit circle, then the imaginary axis.
pub fn rotation_s() -> ExtendedMoebius {
    refl_imaginary_axis().compose(&refl_ball(0))
}

/// Rotation from reflecting in the boundary of `B_{2j}`, then in the imaginary axis.
pub fn rotation_s_at(j: i64) -> ExtendedMoebius {
    refl_imaginary_axis().compose(&refl_ball(2 * j))
}

/// The table of all named elements.
///
/// Printed matrices are transcribed; `b0`, `f0`, `a1..a4` and the rotation `S` are built from
/// reflections or conjugation.
pub fn builtin_generators() -> GeneratorTable {
    let mut t = GeneratorTable::new();
    let z = Nf::zero;
    t.insert("s", ExtendedMoebius::from_ints(1, 0, -1, 1));
    t.insert("t", m(nf(0, 0, 2, 0), nf(2, 0, -1, 0), nf(0, 0, 1, 0), nf(1, 0, -1, 0)));
    t.insert("f", ExtendedMoebius::from_ints(1, 0, -1, 1));
    t.insert("g", m(nf(-1, 0, 0, 1), nf(1, 0, 0, -2), nf(-2, 0, 0, 0), nf(3, 0, 0, -1)));
    t.insert("h", m(nf(0, 0, 0, 2), nf(-3, 0, 0, -1), nf(-3, 0, 0, 1), nf(0, 0, 0, -3)));
    t.insert("p1", ExtendedMoebius::from_ints(1, 0, 1, 1));
    t.insert("p2", ExtendedMoebius::from_ints(-1, 5, 0, -1));
    t.insert("p3", ExtendedMoebius::from_ints(-14, 25, -9, 16));
    t.insert("p4", ExtendedMoebius::from_ints(29, -45, 20, -31));
    t.insert("k", m(nf(0, 0, 1, 0), nf(0, -1, 1, 0), z(), nf(0, 0, -1, 0)));
    t.insert("c", c_translation());
    t.insert("r", r_reflection());
    t.insert("m1", ExtendedMoebius::from_ints(-3, 5, -2, 3));
    // (0 sqrt5; -1/sqrt5 0) rescaled by sqrt5 so the entries lie in K
    t.insert("m2", ExtendedMoebius::from_ints(0, 5, -1, 0));
    t.insert("a0", ExtendedMoebius::from_ints(0, 1, -1, 1));
    for i in 1..=4 {
        t.insert(format!("a{i}"), a_i(i));
    }
    t.insert("b0", b0());
    t.insert("f0", f0());
    t.insert("S", rotation_s());
    t.insert("T", ExtendedMoebius::from_ints(1, 1, 0, 1));
    t
}

/// Exact check of every matrix identity relating the named generators.
pub fn identity_suite(t: &GeneratorTable) -> Report {
    let mut rep = Report::new("matrix identities");
    let mut eq = |name: &str, lhs: Result<ExtendedMoebius>, rhs: Result<ExtendedMoebius>| {
        match (lhs, rhs) {
            (Ok(l), Ok(r)) => {
                let ok = l == r;
                let detail = if ok { String::new() } else { format!("{l} vs {r}") };
                rep.push(name, ok, detail);
            }
            (Err(e), _) | (_, Err(e)) => rep.push(name, false, e.to_string()),
        }
    };
    let ev = |s: &str| t.eval_str(s);
    let get = |s: &str| t.get(s).cloned().ok_or_else(|| Error::UnknownGenerator(s.into()));
    let conj = |x: &str, by: &str| Ok::<_, Error>(ev(x)?.conjugate(&ev(by)?));

    eq("p1 = s^-1", get("p1"), ev("s^-1"));
    eq("p1 = f^-1", get("p1"), ev("f^-1"));
    eq("p2 = s t s t^-2", get("p2"), ev("s t s t^-2"));
    eq("p2 = f g^-1 f^-1 h^-1 g", get("p2"), ev("f g^-1 f^-1 h^-1 g"));
    eq("p3 = (s^-1)^(t s t)", get("p3"), conj("s^-1", "t s t"));
    eq("p3 = (g^-1)^(g^-1 f^-1 h)", get("p3"), conj("g^-1", "g^-1 f^-1 h"));
    eq("p4 = p1 p2 p3^-1", get("p4"), ev("p1 p2 p3^-1"));
    eq("p4 = (s t s t^-2)^(t s t^-1)", get("p4"), conj("s t s t^-2", "t s t^-1"));
    eq("k^2 = 1", ev("k^2"), Ok(ExtendedMoebius::identity()));
    eq("f^k = g^(f g^-1)", conj("f", "k"), conj("g", "f g^-1"));
    eq("g^k = f^(f g^-1)", conj("g", "k"), conj("f", "f g^-1"));
    eq("h^k = (h^-1)^(f g^-1)", conj("h", "k"), conj("h^-1", "f g^-1"));
    eq("p2^k = p2^-1", conj("p2", "k"), ev("p2^-1"));
    eq("p1^m1 = p3^-1", conj("p1", "m1"), ev("p3^-1"));
    eq("p2^m1 = p4^-1", conj("p2", "m1"), ev("p4^-1"));
    eq("p1^m2 = p2", conj("p1", "m2"), get("p2"));
    eq("p3^m2 = p4^(p1^-1)", conj("p3", "m2"), conj("p4", "p1^-1"));
    eq("s = a0 f0 a0^-1", get("s"), ev("a0 f0 a0^-1"));
    eq("f = a0 f0 a0^-1", get("f"), ev("a0 f0 a0^-1"));
    // as printed the conjugator reads b0 a0; only the order a0 b0 (or f0^-1 in place of f0)
    // matches b0 as defined from its two reflections
    eq("t = (a0 b0)^-1 f0 (a0 b0) a0", get("t"), ev("(a0 b0)^-1 f0 (a0 b0) a0"));
    eq("t = (b0 a0)^-1 f0^-1 (b0 a0) a0", get("t"), ev("(b0 a0)^-1 f0^-1 (b0 a0) a0"));
    eq("g = (a0^-1 a1) f0^-1 (a0^-1 a1)^-1", get("g"), ev("(a0^-1 a1) f0^-1 (a0^-1 a1)^-1"));
    eq("h = a1 a0 f0^-1 a1", get("h"), ev("a1 a0 f0^-1 a1"));
    eq("b0^3 = 1", ev("b0^3"), Ok(ExtendedMoebius::identity()));
    eq("c^-1 r c = c^-2 r", ev("c^-1 r c"), ev("c^-2 r"));
    eq("r t r = tbar", ev("r t r"), get("t").map(|x| x.bar()));
    eq("f0 = z -> z+1", get("f0"), Ok(ExtendedMoebius::from_ints(1, 1, 0, 1)));
    eq("S from reflections", get("S"), Ok(ExtendedMoebius::from_ints(0, -1, 1, 0)));
    for i in 0..=4i64 {
        eq(&format!("a{i} from reflections"), Ok(a_from_reflections(i)), Ok(a_i(i)));
        if i >= 1 {
            eq(
                &format!("c a{i} c^-1 = a{}", i - 1),
                Ok(a_i(i).conjugate(&c_translation())),
                Ok(a_i(i - 1)),
            );
        }
        eq(
            &format!("c^-{} a{i}bar c^{} = a{i}", 2 * i, 2 * i),
            Ok(a_i(i).bar().conjugate(&c_translation().pow(-2 * i))),
            Ok(a_i(i)),
        );
    }
    let c2 = c_translation().pow(-2);
    let f0x = f0();
    eq(
        "c^-2 fbar c^2 = a2 f0 a2^-1",
        get("f").map(|x| x.bar().conjugate(&c2)),
        Ok(f0x.conjugate(&a_i(2))),
    );
    let a21 = a_i(2).inverse().compose(&a_i(1));
    eq(
        "c^-2 gbar c^2 = (a2^-1 a1) f0^-1 (a2^-1 a1)^-1",
        get("g").map(|x| x.bar().conjugate(&c2)),
        Ok(f0x.inverse().conjugate(&a21)),
    );
    eq(
        "c^-2 hbar c^2 = a1 a2 f0^-1 a1",
        get("h").map(|x| x.bar().conjugate(&c2)),
        Ok(a_i(1).compose(&a_i(2)).compose(&f0x.inverse()).compose(&a_i(1))),
    );
    for n in 1..=3i64 {
        let refl = r_reflection().conjugate(&c_translation().pow(-n));
        for x in ["s", "t", "f", "g", "h"] {
            let lhs = get(x).map(|g| refl.compose(&g).compose(&refl));
            let rhs = get(x).map(|g| g.bar().conjugate(&c_translation().pow(-2 * n)));
            eq(&format!("back conjugation n={n} x={x}"), lhs, rhs);
        }
    }
    rep.absorb(tangle_images(t));
    rep
}

/// Images of the tangle-group words under the two representations.
pub fn tangle_images(t: &GeneratorTable) -> Report {
    let mut rep = Report::new("tangle word images");
    let (Some(f), Some(g), Some(s), Some(tt), Some(p2), Some(p3), Some(p4)) =
        (t.get("f"), t.get("g"), t.get("s"), t.get("t"), t.get("p2"), t.get("p3"), t.get("p4"))
    else {
        rep.push("generators present", false, "missing s, t, f, g or p2..p4");
        return rep;
    };

    let mut st = GeneratorTable::new();
    st.insert("a", s.clone());
    st.insert("b", tt.clone());
    st.insert("s", s.clone());
    st.insert("t", tt.clone());
    let e = st.eval_str("a (b a b^-1) b^-1");
    rep.check("S: e = a w b^-1 maps to p2", e.as_ref().is_ok_and(|x| x == p2));
    let v = st.eval_str("t s t s t^-1 s^-1 t^-1");
    rep.check(
        "S: t s t s t^-1 s^-1 t^-1 = (16 -25; 9 -14)",
        v.as_ref().is_ok_and(|x| *x == ExtendedMoebius::from_ints(16, -25, 9, -14)),
    );
    rep.check("S: that image is p3^-1", v.as_ref().is_ok_and(|x| *x == p3.inverse()));

    let mut tz = GeneratorTable::new();
    tz.insert("a", f.clone());
    tz.insert("t", f.compose(g).compose(&f.inverse()));
    tz.insert("e", p2.clone());
    let y = GroupWord::parse("(t a)^-1 a (t a)").expect("static word");
    let x = GroupWord::parse("(a t e)^-1 t (a t e)").expect("static word");
    let v = y.inverse().concat(&x).concat(&y);
    let u = GroupWord::parse("a^-1 e").expect("static word").concat(&v);
    rep.check("T0: v = y^-1 x y maps to p3^-1", tz.evaluate(&v).is_ok_and(|m| m == p3.inverse()));
    rep.check("T0: u = a^-1 e v maps to p4", tz.evaluate(&u).is_ok_and(|m| m == *p4));
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numfield::rat;

    fn table() -> GeneratorTable {
        builtin_generators()
    }

    #[test]
    fn whole_identity_suite_passes() {
        let rep = identity_suite(&table());
        assert!(rep.passed(), "{rep}");
        assert!(rep.len() >= 25);
    }

    #[test]
    fn reflection_is_involution() {
        let r = r_reflection();
        assert!(r.compose(&r).is_identity());
        let b = refl_ball(3);
        assert!(b.compose(&b).is_identity());
    }

    #[test]
    fn conjugating_by_r_conjugates_entries() {
        let t = table();
        let x = t.eval_str("r t r").unwrap();
        assert_eq!(x, t["t"].bar());
        assert!(x.is_preserving());
    }

    #[test]
    fn composition_matches_boundary_action() {
        let t = table();
        let pts = [Point::from_ints(0, 0, 0, 0), Point::from_ints(1, 1, 2, 0), Point::Infinity, Point::from_ints(-3, 0, 1, 1)];
        let elems = [t["t"].clone(), t["r"].clone(), t["b0"].clone(), refl_ball(1), t["h"].clone()];
        for x in &elems {
            for y in &elems {
                let xy = x.compose(y);
                for p in &pts {
                    assert_eq!(xy.apply(p), x.apply(&y.apply(p)), "{x} o {y} at {p}");
                }
            }
        }
    }

    #[test]
    fn word_evaluation_examples() {
        let t = table();
        assert_eq!(t.eval_str("s t s t^-2").unwrap(), t["p2"]);
        assert_eq!(t.eval_str("f g^-1 f^-1 h^-1 g").unwrap(), t["p2"]);
        assert!(t.evaluate(&GroupWord::empty()).unwrap().is_identity());
        assert_eq!(t.eval_str("q"), Err(Error::UnknownGenerator("q".into())));
    }

    #[test]
    fn parse_forms() {
        let w = GroupWord::parse("p1^{-1} (t a)^-2 s*s").unwrap();
        assert_eq!(w.to_string(), "p1^-1 a^-1 t^-1 a^-1 t^-1 s^2");
        assert_eq!(w.length(), 7);
        assert!(matches!(GroupWord::parse("s^x"), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(GroupWord::parse("s )"), Err(Error::Parse { position: 2, .. })));
        assert!(matches!(GroupWord::parse("s^0"), Err(Error::Parse { .. })));
        assert_eq!(GroupWord::parse("s s^-1").unwrap(), GroupWord::empty());
    }

    #[test]
    fn projective_equality() {
        let t = table();
        assert!(t.eval_str("k^2").unwrap().is_identity());
        assert!(t.eval_str("b0^3").unwrap().is_identity());
        assert_ne!(t["s"], t["t"]);
        let twice = t["t"].scaled(&Nf::from_ints(0, 1, 3, 0)).unwrap();
        assert_eq!(twice, t["t"]);
        assert_ne!(t["r"], ExtendedMoebius::identity());
    }

    #[test]
    fn traces() {
        let t = table();
        assert!(t["t"].trace_pm().unwrap().contains(&Nf::from_ints(1, 0, 1, 0)));
        assert!(t["h"].trace_pm().unwrap().contains(&Nf::i_sqrt2()));
        assert!(ExtendedMoebius::identity().trace_pm().unwrap().contains(&Nf::from(-2)));
        assert!(t["r"].trace_pm().is_err());
        // det 5 is not a square in K
        assert!(matches!(t["m2"].trace_pm(), Err(Error::NotASquare(_))));
        // det 4: scale back by 1/2
        let two = ExtendedMoebius::from_ints(2, 2, 0, 2);
        assert!(two.trace_pm().unwrap().contains(&Nf::from(2)));
    }

    #[test]
    fn classification() {
        let t = table();
        assert_eq!(t["p3"].classify().unwrap(), Classification::Parabolic);
        assert_eq!(t["a0"].classify().unwrap(), Classification::Elliptic(Some(3)));
        assert_eq!(t["S"].classify().unwrap(), Classification::Elliptic(Some(2)));
        assert_eq!(t["k"].classify().unwrap(), Classification::Elliptic(Some(2)));
        assert_eq!(ExtendedMoebius::identity().classify().unwrap(), Classification::Identity);
        assert_eq!(ExtendedMoebius::from_ints(2, 1, 1, 1).classify().unwrap(), Classification::Loxodromic);
        assert_eq!(t["t"].classify().unwrap(), Classification::Loxodromic);
    }

    #[test]
    fn a_i_are_elliptic_of_order_three() {
        for i in 0..5 {
            assert_eq!(a_i(i).classify().unwrap(), Classification::Elliptic(Some(3)));
        }
        assert_eq!(b0().classify().unwrap(), Classification::Elliptic(Some(3)));
    }

    #[test]
    fn maps_through_triples() {
        let pts = [Point::from_ints(0, 0, 0, 0), Point::from_ints(1, 1, 0, 0), Point::Infinity, Point::from_ints(2, 0, -1, 3)];
        for (i, j, k, l) in [(0, 1, 2, 3), (2, 0, 1, 3), (1, 2, 3, 0), (3, 1, 0, 2)] {
            let src = [&pts[i], &pts[j], &pts[k]];
            let dst = [&pts[j], &pts[k], &pts[l]];
            let g = ExtendedMoebius::through_triples(src, dst).unwrap();
            for n in 0..3 {
                assert_eq!(g.apply(src[n]), dst[n].clone());
            }
        }
        assert!(ExtendedMoebius::to_zero_one_infinity(&pts[0], &pts[0], &pts[2]).is_err());
    }

    #[test]
    fn b0_matrix() {
        assert_eq!(b0(), ExtendedMoebius::preserving(Nf::zero(), Nf::one(), Nf::one(), -Nf::i()));
    }

    #[test]
    fn t_from_f0_needs_swapped_conjugator() {
        let t = table();
        assert_ne!(t.eval_str("(b0 a0)^-1 f0 (b0 a0) a0").unwrap(), t["t"]);
        assert_eq!(t.eval_str("(a0 b0)^-1 f0 (a0 b0) a0").unwrap(), t["t"]);
    }

    #[test]
    fn inverse_of_reversing() {
        let x = refl_ball(2).compose(&c_translation());
        assert!(!x.is_preserving());
        assert!(x.compose(&x.inverse()).is_identity());
        assert!(x.inverse().compose(&x).is_identity());
    }

    #[test]
    fn exact_inverse_keeps_determinant_one() {
        let t = table();
        let x = t["g"].conjugate(&t["m2"]);
        assert!(x.det().is_one());
        let fifth = Nf::from_rational(rat(1, 5));
        assert_eq!(*x.entries()[2], Nf::from_ints(-1, 0, 0, 2) * fifth);
        assert!(!x.has_integral_entries());
    }

    #[test]
    fn serialize_table_entry() {
        let t = table();
        let js = serde_json::to_string(&t["p1"]).unwrap();
        assert_eq!(
            js,
            r#"{"entries":[[["1","0","0","0"],["0","0","0","0"]],[["1","0","0","0"],["1","0","0","0"]]],"orientation":"preserving"}"#
        );
    }
}
