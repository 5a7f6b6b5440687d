//! Exact arithmetic in `K = Q(i, sqrt 2)`.
//!
//! An element is stored as `re + i*im` with `re, im` in `Q(sqrt 2)`, which makes
//! `a + b sqrt2 + c i + d i sqrt2` the same thing as `(a + b sqrt2) + i (c + d sqrt2)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::{Error, Result};

pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Rational::new(rn, rd))
    } else {
        None
    }
}

fn rat_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// The two complex embeddings of `K` up to conjugation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Embedding {
    /// The identity embedding, `sqrt 2 > 0`.
    Sigma1,
    /// `sqrt 2 -> -sqrt 2`, fixing `i`.
    Sigma2,
}

// ---------------------------------------------------------------------------
// Q(sqrt 2)
// ---------------------------------------------------------------------------

/// `a + b sqrt 2` with rational `a, b`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RealQuad {
    pub a: Rational,
    pub b: Rational,
}

impl RealQuad {
    pub fn new(a: Rational, b: Rational) -> Self {
        RealQuad { a, b }
    }

    pub fn from_ints(a: i64, b: i64) -> Self {
        RealQuad::new(int(a), int(b))
    }

    pub fn from_rational(a: Rational) -> Self {
        RealQuad::new(a, Rational::zero())
    }

    pub fn zero() -> Self {
        RealQuad::default()
    }

    pub fn one() -> Self {
        RealQuad::from_ints(1, 0)
    }

    pub fn sqrt2() -> Self {
        RealQuad::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate `a - b sqrt 2`.
    pub fn conj(&self) -> Self {
        RealQuad::new(self.a.clone(), -&self.b)
    }

    /// Field norm `a^2 - 2 b^2`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - int(2) * &self.b * &self.b
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(RealQuad::new(&self.a / &n, -&self.b / &n))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Exact sign of the real number `a + b sqrt 2`.
    pub fn signum(&self) -> i8 {
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sa == 0 {
            return sb;
        }
        if sb == 0 || sa == sb {
            return sa;
        }
        // opposite signs: compare a^2 with 2 b^2
        let lhs = &self.a * &self.a;
        let rhs = int(2) * &self.b * &self.b;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Square root inside `Q(sqrt 2)`, choosing the positive one.
    pub fn sqrt(&self) -> Option<Self> {
        match self.signum() {
            0 => return Some(RealQuad::zero()),
            s if s < 0 => return None,
            _ => {}
        }
        // (p + q sqrt2)^2 = p^2 + 2 q^2 + 2 p q sqrt2
        let m = rational_sqrt(&self.norm())?;
        let two = int(2);
        for sign in [1i64, -1] {
            let p2 = (&self.a + int(sign) * &m) / &two;
            let Some(p) = rational_sqrt(&p2) else { continue };
            let q = if p.is_zero() {
                let q2 = &self.a / &two;
                match rational_sqrt(&q2) {
                    Some(q) => q,
                    None => continue,
                }
            } else {
                &self.b / (&two * &p)
            };
            let cand = RealQuad::new(p, q);
            if &(&cand * &cand) == self {
                return Some(cand.abs());
            }
        }
        None
    }

    /// Value under the embedding `sqrt 2 -> +-sqrt 2`.
    pub fn to_f64_with(&self, e: Embedding) -> f64 {
        let s = match e {
            Embedding::Sigma1 => std::f64::consts::SQRT_2,
            Embedding::Sigma2 => -std::f64::consts::SQRT_2,
        };
        rat_to_f64(&self.a) + rat_to_f64(&self.b) * s
    }

    pub fn to_f64(&self) -> f64 {
        self.to_f64_with(Embedding::Sigma1)
    }

    pub fn is_integral(&self) -> bool {
        self.a.is_integer() && self.b.is_integer()
    }
}

fn sign_of(q: &Rational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

impl PartialOrd for RealQuad {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RealQuad {
    /// Order as real numbers under the identity embedding.
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl From<i64> for RealQuad {
    fn from(n: i64) -> Self {
        RealQuad::from_ints(n, 0)
    }
}

impl From<Rational> for RealQuad {
    fn from(q: Rational) -> Self {
        RealQuad::from_rational(q)
    }
}

impl<'a> Add<&'a RealQuad> for &'a RealQuad {
    type Output = RealQuad;
    fn add(self, o: &RealQuad) -> RealQuad {
        RealQuad::new(&self.a + &o.a, &self.b + &o.b)
    }
}

impl<'a> Sub<&'a RealQuad> for &'a RealQuad {
    type Output = RealQuad;
    fn sub(self, o: &RealQuad) -> RealQuad {
        RealQuad::new(&self.a - &o.a, &self.b - &o.b)
    }
}

impl<'a> Mul<&'a RealQuad> for &'a RealQuad {
    type Output = RealQuad;
    fn mul(self, o: &RealQuad) -> RealQuad {
        let a = &self.a * &o.a + int(2) * &self.b * &o.b;
        let b = &self.a * &o.b + &self.b * &o.a;
        RealQuad::new(a, b)
    }
}

impl Neg for &RealQuad {
    type Output = RealQuad;
    fn neg(self) -> RealQuad {
        RealQuad::new(-&self.a, -&self.b)
    }
}

impl fmt::Display for RealQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, &[(&self.a, ""), (&self.b, "√2")])
    }
}

impl fmt::Debug for RealQuad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for RealQuad {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.a.to_string(), self.b.to_string()].serialize(s)
    }
}

// ---------------------------------------------------------------------------
// K = Q(i, sqrt 2)
// ---------------------------------------------------------------------------

/// `a + b sqrt2 + c i + d i sqrt2`, stored as `re + i im`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Nf {
    re: RealQuad,
    im: RealQuad,
}

/// Spelled-out name for [`Nf`].
pub type NumberFieldElement = Nf;

impl Nf {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        Nf { re: RealQuad::new(a, b), im: RealQuad::new(c, d) }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Nf::new(int(a), int(b), int(c), int(d))
    }

    pub fn from_parts(re: RealQuad, im: RealQuad) -> Self {
        Nf { re, im }
    }

    pub fn from_real(re: RealQuad) -> Self {
        Nf { re, im: RealQuad::zero() }
    }

    pub fn from_rational(q: Rational) -> Self {
        Nf::from_real(RealQuad::from_rational(q))
    }

    pub fn zero() -> Self {
        Nf::default()
    }

    pub fn one() -> Self {
        Nf::from_ints(1, 0, 0, 0)
    }

    pub fn i() -> Self {
        Nf::from_ints(0, 0, 1, 0)
    }

    pub fn sqrt2() -> Self {
        Nf::from_ints(0, 1, 0, 0)
    }

    pub fn i_sqrt2() -> Self {
        Nf::from_ints(0, 0, 0, 1)
    }

    pub fn a(&self) -> &Rational {
        &self.re.a
    }
    pub fn b(&self) -> &Rational {
        &self.re.b
    }
    pub fn c(&self) -> &Rational {
        &self.im.a
    }
    pub fn d(&self) -> &Rational {
        &self.im.b
    }

    /// Real part, an element of `Q(sqrt 2)`.
    pub fn re(&self) -> &RealQuad {
        &self.re
    }

    /// Imaginary part, an element of `Q(sqrt 2)`.
    pub fn im(&self) -> &RealQuad {
        &self.im
    }

    pub fn coords(&self) -> [&Rational; 4] {
        [&self.re.a, &self.re.b, &self.im.a, &self.im.b]
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.re.b.is_zero() && self.re.a.is_one()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.im.is_zero() && self.re.b.is_zero()
    }

    /// Complex conjugation: `i -> -i`, `sqrt 2` fixed.
    pub fn conj(&self) -> Self {
        Nf { re: self.re.clone(), im: -&self.im }
    }

    /// The automorphism `sqrt 2 -> -sqrt 2`, fixing `i`.
    pub fn sigma2(&self) -> Self {
        Nf { re: self.re.conj(), im: self.im.conj() }
    }

    /// `x * conj(x)`, the relative norm down to `Q(sqrt 2)`.
    pub fn abs2(&self) -> RealQuad {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.abs2().inv()?;
        let c = self.conj();
        Ok(Nf { re: &c.re * &n, im: &c.im * &n })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, r: &RealQuad) -> Self {
        Nf { re: &self.re * r, im: &self.im * r }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Nf::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// A square root in `K`, when one exists.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Nf::zero());
        }
        // (p + i q)^2 = p^2 - q^2 + 2 i p q with p, q in Q(sqrt 2)
        let u = &self.re;
        let v = &self.im;
        let n = self.abs2().sqrt_any()?;
        let half = RealQuad::from_rational(rat(1, 2));
        for nn in [n.clone(), -&n] {
            let p2 = &(u + &nn) * &half;
            let cand = if p2.is_zero() {
                let q2 = -u;
                q2.sqrt_any().map(|q| Nf::from_parts(RealQuad::zero(), q))
            } else {
                p2.sqrt_any().and_then(|p| {
                    let two_p = &p + &p;
                    v.checked_div(&two_p).ok().map(|q| Nf::from_parts(p, q))
                })
            };
            if let Some(c) = cand {
                if &(&c * &c) == self {
                    return Some(c);
                }
            }
        }
        None
    }

    /// Image under one of the two complex embeddings.
    pub fn embed(&self, e: Embedding) -> Complex64 {
        Complex64::new(self.re.to_f64_with(e), self.im.to_f64_with(e))
    }

    pub fn to_complex(&self) -> Complex64 {
        self.embed(Embedding::Sigma1)
    }

    /// Matrix of multiplication by `self` on the basis `1, sqrt2, i, i sqrt2`.
    pub fn multiplication_matrix(&self) -> [[Rational; 4]; 4] {
        let (a, b, c, d) = (self.a(), self.b(), self.c(), self.d());
        let two = int(2);
        // columns: x*1, x*sqrt2, x*i, x*i*sqrt2
        let cols = [
            [a.clone(), b.clone(), c.clone(), d.clone()],
            [&two * b, a.clone(), &two * d, c.clone()],
            [-c, -d, a.clone(), b.clone()],
            [-(&two * d), -c, &two * b, a.clone()],
        ];
        let mut m: [[Rational; 4]; 4] = Default::default();
        for (j, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                m[i][j] = v.clone();
            }
        }
        m
    }

    /// Coefficients `[c0, c1, c2, c3, c4]` of `det(X - L_x)`, lowest degree first.
    pub fn char_poly(&self) -> [Rational; 5] {
        faddeev_leverrier(&self.multiplication_matrix())
    }

    /// True iff the characteristic polynomial has integer coefficients.
    pub fn is_algebraic_integer(&self) -> bool {
        self.char_poly().iter().all(|c| c.is_integer())
    }

    /// Lexicographic key on the coordinate tuple.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.coords().cmp(&other.coords())
    }

    /// Least common denominator of the four coordinates.
    pub fn denominator(&self) -> BigInt {
        self.coords()
            .iter()
            .fold(BigInt::one(), |acc, q| num_integer::Integer::lcm(&acc, q.denom()))
    }
}

impl RealQuad {
    /// Either square root, sign unconstrained; used inside the `K` square root.
    fn sqrt_any(&self) -> Option<Self> {
        if self.signum() >= 0 {
            if let Some(r) = self.sqrt() {
                return Some(r);
            }
        }
        // The sigma-conjugate may be a square even if self is negative under sigma1,
        // e.g. 3 - 2 sqrt2 = (1 - sqrt2)^2 is positive, but -1 + sqrt2 ... is handled here.
        let m = rational_sqrt(&self.norm())?;
        let two = int(2);
        for sign in [1i64, -1] {
            let p2 = (&self.a + int(sign) * &m) / &two;
            let Some(p) = rational_sqrt(&p2) else { continue };
            if p.is_zero() {
                continue;
            }
            let q = &self.b / (&two * &p);
            let cand = RealQuad::new(p, q);
            if &(&cand * &cand) == self {
                return Some(cand);
            }
        }
        None
    }
}

fn faddeev_leverrier(a: &[[Rational; 4]; 4]) -> [Rational; 5] {
    let n = 4usize;
    let mut coeffs: [Rational; 5] = Default::default();
    coeffs[n] = Rational::one();
    let mut m: [[Rational; 4]; 4] = Default::default();
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next: [[Rational; 4]; 4] = Default::default();
        for i in 0..n {
            for j in 0..n {
                let mut s = Rational::zero();
                for l in 0..n {
                    s += &a[i][l] * &m[l][j];
                }
                if i == j {
                    s += &coeffs[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut tr = Rational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &m[l][i];
            }
        }
        coeffs[n - k] = -tr / int(k as i64);
    }
    coeffs
}

impl PartialOrd for Nf {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Nf {
    /// Lexicographic on `(a, b, c, d)`; a total order for map keys, not a field order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.lex_cmp(other)
    }
}

impl From<i64> for Nf {
    fn from(n: i64) -> Self {
        Nf::from_ints(n, 0, 0, 0)
    }
}

impl From<Rational> for Nf {
    fn from(q: Rational) -> Self {
        Nf::from_rational(q)
    }
}

impl From<RealQuad> for Nf {
    fn from(r: RealQuad) -> Self {
        Nf::from_real(r)
    }
}

impl<'a> Add<&'a Nf> for &'a Nf {
    type Output = Nf;
    fn add(self, o: &Nf) -> Nf {
        Nf { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Nf> for &'a Nf {
    type Output = Nf;
    fn sub(self, o: &Nf) -> Nf {
        Nf { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a Nf> for &'a Nf {
    type Output = Nf;
    fn mul(self, o: &Nf) -> Nf {
        let re = &(&self.re * &o.re) - &(&self.im * &o.im);
        let im = &(&self.re * &o.im) + &(&self.im * &o.re);
        Nf { re, im }
    }
}

impl Neg for &Nf {
    type Output = Nf;
    fn neg(self) -> Nf {
        Nf { re: -&self.re, im: -&self.im }
    }
}

/// Forward owned-operand arithmetic to the reference impls.
macro_rules! owned_ops {
    ($t:ty) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                &self + &o
            }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                &self - &o
            }
        }
        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                &self * &o
            }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
        impl<'a> Add<&'a $t> for $t {
            type Output = $t;
            fn add(self, o: &$t) -> $t {
                &self + o
            }
        }
        impl<'a> Sub<&'a $t> for $t {
            type Output = $t;
            fn sub(self, o: &$t) -> $t {
                &self - o
            }
        }
        impl<'a> Mul<&'a $t> for $t {
            type Output = $t;
            fn mul(self, o: &$t) -> $t {
                &self * o
            }
        }
        impl AddAssign<&$t> for $t {
            fn add_assign(&mut self, o: &$t) {
                *self = &*self + o;
            }
        }
        impl SubAssign<&$t> for $t {
            fn sub_assign(&mut self, o: &$t) {
                *self = &*self - o;
            }
        }
        impl MulAssign<&$t> for $t {
            fn mul_assign(&mut self, o: &$t) {
                *self = &*self * o;
            }
        }
        /// Division panics on a zero divisor; use `checked_div` to recover.
        impl<'a> Div<&'a $t> for &'a $t {
            type Output = $t;
            fn div(self, o: &$t) -> $t {
                self.checked_div(o).expect("division by zero")
            }
        }
    };
}

owned_ops!(RealQuad);
owned_ops!(Nf);

fn write_terms(f: &mut fmt::Formatter<'_>, terms: &[(&Rational, &str)]) -> fmt::Result {
    let mut first = true;
    for (q, unit) in terms {
        if q.is_zero() {
            continue;
        }
        let neg = q.is_negative();
        let mag = q.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, "{}", if neg { " - " } else { " + " })?;
        }
        first = false;
        let mag_is_one = mag.is_one();
        if unit.is_empty() {
            write!(f, "{mag}")?;
        } else if mag_is_one {
            write!(f, "{unit}")?;
        } else if mag.is_integer() {
            write!(f, "{mag}{unit}")?;
        } else {
            write!(f, "({mag}){unit}")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for Nf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(
            f,
            &[(&self.re.a, ""), (&self.re.b, "√2"), (&self.im.a, "i"), (&self.im.b, "i√2")],
        )
    }
}

impl fmt::Debug for Nf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Nf {
    /// Serialized as the coordinate tuple `[a, b, c, d]` of rational strings.
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().map(|q| q.to_string()).serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(a: i64, b: i64, c: i64, d: i64) -> Nf {
        Nf::from_ints(a, b, c, d)
    }

    fn half(n: &Nf) -> Nf {
        n * &Nf::from_rational(rat(1, 2))
    }

    /// char poly via the tower Q(sqrt2) -> K: (X^2 - tX + n)(X^2 - t'X + n').
    fn tower_char_poly(z: &Nf) -> [Rational; 5] {
        let t = &z.re + &z.re;
        let n = z.abs2();
        let (tc, nc) = (t.conj(), n.conj());
        // all coefficients are rational; take the `a` part
        let e1 = (&t + &tc).a;
        let e2 = (&(&n + &nc) + &(&t * &tc)).a;
        let e3 = (&(&t * &nc) + &(&tc * &n)).a;
        let e4 = (&n * &nc).a;
        [e4, -e3, e2, -e1, Rational::one()]
    }

    #[test]
    fn product_of_conjugate_halves() {
        let p = half(&x(1, 0, 1, 0));
        let q = half(&x(1, 0, -1, 0));
        assert_eq!(&p * &q, Nf::from_rational(rat(1, 2)));
    }

    #[test]
    fn inverse_roundtrip() {
        let z = x(3, 0, 0, 1);
        assert!((&z * &z.inv().unwrap()).is_one());
        assert_eq!(Nf::zero().inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn zeta8_to_the_fourth() {
        let z = half(&x(0, 1, 0, 1));
        assert_eq!(z.pow(4), x(-1, 0, 0, 0));
        assert_eq!(z.pow(8), Nf::one());
    }

    #[test]
    fn automorphisms() {
        assert_eq!(Nf::i_sqrt2().conj(), x(0, 0, 0, -1));
        assert_eq!(x(3, 0, 0, 0).conj(), x(3, 0, 0, 0));
        let y = x(1, 1, 1, 0);
        assert_eq!(y.conj().conj(), y);
        assert_eq!(Nf::sqrt2().sigma2(), x(0, -1, 0, 0));
        assert_eq!(Nf::i().sigma2(), Nf::i());
        let w = &half(&x(1, 0, 1, 0)) + &Nf::sqrt2();
        assert_eq!(w.sigma2().sigma2(), w);
    }

    #[test]
    fn embeddings() {
        let s = Nf::sqrt2();
        assert!((s.embed(Embedding::Sigma1).re - std::f64::consts::SQRT_2).abs() < 1e-8);
        assert!((s.embed(Embedding::Sigma2).re + std::f64::consts::SQRT_2).abs() < 1e-8);
        let h = half(&x(1, 0, 1, 0)).embed(Embedding::Sigma2);
        assert!((h.re - 0.5).abs() < 1e-15 && (h.im - 0.5).abs() < 1e-15);
    }

    #[test]
    fn integrality() {
        assert!(x(0, 0, 2, 0).is_algebraic_integer());
        assert!(!Nf::from_rational(rat(204, 5)).is_algebraic_integer());
        let z = half(&x(0, 1, 0, 1));
        assert!(z.is_algebraic_integer());
        let cp = z.char_poly();
        assert_eq!(cp, [int(1), int(0), int(0), int(0), int(1)]);
        // (1 + i)/sqrt2 lies outside Z[i, sqrt2] but is integral
        assert!(!z.b().is_integer());
        assert!(!half(&x(1, 0, 1, 0)).is_algebraic_integer());
    }

    #[test]
    fn char_poly_matches_tower_formula() {
        for z in [x(1, 2, 3, 4), half(&x(1, -3, 5, 7)), x(0, 0, 0, 1), x(-7, 1, 0, 2)] {
            assert_eq!(z.char_poly(), tower_char_poly(&z), "{z}");
        }
    }

    #[test]
    fn real_quad_sign_and_sqrt() {
        let r = RealQuad::from_ints(3, -2); // 3 - 2 sqrt2 > 0
        assert_eq!(r.signum(), 1);
        assert_eq!(RealQuad::from_ints(1, -1).signum(), -1);
        let s = r.sqrt().unwrap();
        assert_eq!(&s * &s, r);
        assert!(s.is_positive());
        assert_eq!(RealQuad::from_ints(2, 0).sqrt(), Some(RealQuad::sqrt2()));
        assert_eq!(RealQuad::from_ints(3, 0).sqrt(), None);
        assert_eq!(RealQuad::from_rational(rat(1, 4)).sqrt(), Some(RealQuad::from_rational(rat(1, 2))));
    }

    #[test]
    fn k_sqrt() {
        assert_eq!(x(-1, 0, 0, 0).sqrt().map(|r| &r * &r), Some(x(-1, 0, 0, 0)));
        assert_eq!(Nf::i().sqrt().map(|r| &r * &r), Some(Nf::i()));
        assert!(x(5, 0, 0, 0).sqrt().is_none());
        for z in [x(1, 2, 3, 4), half(&x(1, 1, 1, 1)), x(0, 0, 0, 3)] {
            let sq = &z * &z;
            let r = sq.sqrt().expect("square");
            assert_eq!(&r * &r, sq);
        }
    }

    #[test]
    fn display() {
        assert_eq!(x(1, -2, 0, 3).to_string(), "1 - 2√2 + 3i√2");
        assert_eq!(half(&x(1, 0, 1, 0)).to_string(), "1/2 + (1/2)i");
        assert_eq!(Nf::zero().to_string(), "0");
        assert_eq!(serde_json::to_string(&x(1, 0, -1, 0)).unwrap(), r#"["1","0","-1","0"]"#);
    }
}
