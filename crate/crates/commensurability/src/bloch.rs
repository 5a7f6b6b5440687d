//! Pre-Bloch sums from ideal triangulations, the Bloch-Wigner dilogarithm and the Borel
//! regulator of `Q(i, sqrt2)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::kleinian::MutationWord;
use crate::moebius::{ExtendedMoebius, Point};
use crate::numfield::{rat, Nf};
use crate::polyhedra::{p1, p2, p2_pairing, IdealPolyhedron};
use crate::report::Report;
use crate::{Error, Result};

/// The representative of `{z, 1 - 1/z, 1/(1 - z)}` with the smallest coordinates.
pub fn canonical_parameter(z: &Nf) -> Result<Nf> {
    if z.is_zero() || z.is_one() {
        return Err(Error::Degenerate(format!("[{z}] is not a parameter")));
    }
    let one = Nf::one();
    let a = &one - &z.inv()?;
    let b = (&one - z).inv()?;
    Ok([z.clone(), a, b].into_iter().min().expect("three candidates"))
}

/// A finite formal sum of parameters, keyed by their canonical representative.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PreBlochElement {
    terms: BTreeMap<Nf, i64>,
}

impl PreBlochElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `c [z]`.
    pub fn term(z: &Nf, c: i64) -> Result<Self> {
        let mut x = Self::zero();
        x.add_term(z, c)?;
        Ok(x)
    }

    pub fn add_term(&mut self, z: &Nf, c: i64) -> Result<()> {
        let key = canonical_parameter(z)?;
        let e = self.terms.entry(key.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Nf, i64)> {
        self.terms.iter().map(|(k, v)| (k, *v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, z: &Nf) -> i64 {
        canonical_parameter(z).ok().and_then(|k| self.terms.get(&k).copied()).unwrap_or(0)
    }

    /// Number of tetrahedra counted with sign.
    pub fn total_coefficient(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.add_scaled(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add_scaled(other, -1)
    }

    pub fn scale(&self, c: i64) -> Self {
        Self::zero().add_scaled(self, c)
    }

    fn add_scaled(&self, other: &Self, c: i64) -> Self {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k, c * v).expect("stored keys are parameters");
        }
        out
    }

    /// The mirror image: `[z] -> -[zbar]`.
    pub fn mirror(&self) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(&k.conj(), -v).expect("conjugate of a parameter");
        }
        out
    }

    /// Applies `sigma2` to every parameter.
    pub fn sigma2(&self) -> Self {
        let mut out = Self::zero();
        for (k, v) in &self.terms {
            out.add_term(&k.sigma2(), *v).expect("image of a parameter");
        }
        out
    }

    /// True iff every parameter lies in `Q(i sqrt2)`.
    pub fn in_q_i_sqrt2(&self) -> bool {
        self.terms.keys().all(|z| z.b().is_zero() && z.c().is_zero())
    }
}

impl fmt::Display for PreBlochElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, v)) in self.terms.iter().enumerate() {
            match (i, *v < 0) {
                (0, false) => {}
                (0, true) => write!(f, "-")?,
                (_, false) => write!(f, " + ")?,
                (_, true) => write!(f, " - ")?,
            }
            if v.abs() != 1 {
                write!(f, "{}", v.abs())?;
            }
            write!(f, "[{k}]")?;
        }
        Ok(())
    }
}

impl Serialize for PreBlochElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (k, v) in &self.terms {
            seq.serialize_element(&(k.to_string(), v))?;
        }
        seq.end()
    }
}

/// The image of `z3` under the map sending `z0, z1, z2` to `0, 1, oo`, canonicalized.
pub fn cross_ratio_parameter(z0: &Point, z1: &Point, z2: &Point, z3: &Point) -> Result<Nf> {
    let g = ExtendedMoebius::to_zero_one_infinity(z0, z1, z2)?;
    match g.apply(z3) {
        Point::Finite(z) if !z.is_zero() && !z.is_one() => canonical_parameter(&z),
        _ => Err(Error::Degenerate("coincident points".into())),
    }
}

/// The parameter of the tetrahedron with the given vertices, ordered so that it is positively
/// oriented under `sigma1` (flat ones are left as they are).
fn positive_parameter(v: [&Point; 4]) -> Result<Nf> {
    let g = ExtendedMoebius::to_zero_one_infinity(v[0], v[1], v[2])?;
    let z = match g.apply(v[3]) {
        Point::Finite(z) if !z.is_zero() && !z.is_one() => z,
        _ => return Err(Error::Degenerate("coincident points".into())),
    };
    if z.im().signum() < 0 {
        canonical_parameter(&z.inv()?)
    } else {
        canonical_parameter(&z)
    }
}

/// One triangle per face not containing `apex`, squares split along `diagonals[f]`.
fn cone_triangles(p: &IdealPolyhedron, apex: usize, diagonals: &BTreeMap<usize, (usize, usize)>) -> Result<Vec<[usize; 3]>> {
    let mut out = Vec::new();
    for (fi, f) in p.faces.iter().enumerate() {
        if f.contains(apex) {
            continue;
        }
        match f.cycle.len() {
            3 => out.push([f.cycle[0], f.cycle[1], f.cycle[2]]),
            4 => {
                let (a, b) = diagonals
                    .get(&fi)
                    .copied()
                    .ok_or_else(|| Error::Inconsistent(format!("no diagonal for face {fi}")))?;
                let others: Vec<usize> = f.cycle.iter().copied().filter(|&v| v != a && v != b).collect();
                out.push([a, b, others[0]]);
                out.push([a, b, others[1]]);
            }
            k => return Err(Error::Inconsistent(format!("face {fi} has {k} sides"))),
        }
    }
    Ok(out)
}

fn cone_element(p: &IdealPolyhedron, apex: usize, diagonals: &BTreeMap<usize, (usize, usize)>) -> Result<PreBlochElement> {
    let mut x = PreBlochElement::zero();
    for t in cone_triangles(p, apex, diagonals)? {
        let v = &p.vertices;
        x.add_term(&positive_parameter([&v[apex], &v[t[0]], &v[t[1]], &v[t[2]]])?, 1)?;
    }
    Ok(x)
}

fn infinity_index(p: &IdealPolyhedron) -> Result<usize> {
    p.vertex_index(&Point::Infinity).ok_or_else(|| Error::Inconsistent("no vertex at infinity".into()))
}

/// `4 [(1+i)/2]`: the octahedron coned from `oo` over the four faces at `(1+i)/2`.
pub fn triangulate_p1() -> Result<PreBlochElement> {
    let p = p1();
    cone_element(&p, infinity_index(&p)?, &BTreeMap::new())
}

/// The two diagonals of a square face as sorted vertex pairs.
fn square_diagonals(cycle: &[usize]) -> [(usize, usize); 2] {
    let s = |a: usize, b: usize| (a.min(b), a.max(b));
    [s(cycle[0], cycle[2]), s(cycle[1], cycle[3])]
}

/// Diagonal choices for the squares of `P2`: squares at `oo` are split through `oo`, and the
/// pairings `f, g, h` must carry chosen diagonals to chosen diagonals. Returns the first
/// compatible assignment in binary order over the squares.
pub fn p2_diagonals() -> Result<(IdealPolyhedron, usize, BTreeMap<usize, (usize, usize)>)> {
    let p = p2()?;
    let apex = infinity_index(&p)?;
    let fp = p2_pairing(&p)?;
    let squares: Vec<usize> = (0..p.faces.len()).filter(|&f| p.faces[f].cycle.len() == 4).collect();
    // each square pairing as a map on the vertex indices of its source face
    let mut images: Vec<(usize, usize, BTreeMap<usize, usize>)> = Vec::new();
    for e in fp.entries.iter().filter(|e| p.faces[e.source].cycle.len() == 4) {
        let mut img = BTreeMap::new();
        for &v in &p.faces[e.source].cycle {
            let w = p
                .vertex_index(&e.isometry.apply(&p.vertices[v]))
                .filter(|&w| p.faces[e.target].contains(w))
                .ok_or_else(|| Error::Inconsistent(format!("{} does not carry face {} to face {}", e.name, e.source, e.target)))?;
            img.insert(v, w);
        }
        images.push((e.source, e.target, img));
    }
    'choice: for mask in 0u32..(1 << squares.len()) {
        let mut chosen = BTreeMap::new();
        for (bit, &f) in squares.iter().enumerate() {
            let d = square_diagonals(&p.faces[f].cycle)[((mask >> bit) & 1) as usize];
            if p.faces[f].contains(apex) && d.0 != apex && d.1 != apex {
                continue 'choice;
            }
            chosen.insert(f, d);
        }
        for (src, dst, img) in &images {
            let (a, b) = chosen[src];
            let (x, y) = (img[&a], img[&b]);
            if chosen[dst] != (x.min(y), x.max(y)) {
                continue 'choice;
            }
        }
        return Ok((p, apex, chosen));
    }
    Err(Error::Inconsistent("no diagonal assignment is compatible with the face pairings".into()))
}

/// The cuboctahedron coned from `oo` with pairing-compatible diagonals.
pub fn triangulate_p2() -> Result<PreBlochElement> {
    let (p, apex, d) = p2_diagonals()?;
    cone_element(&p, apex, &d)
}

/// `beta_2`: the triangulated cuboctahedron together with its mirror image.
pub fn beta2() -> Result<PreBlochElement> {
    let t = triangulate_p2()?;
    Ok(t.add(&t.mirror()))
}

/// `beta_1 - betabar_1 + n beta_2`.
pub fn bloch_invariant_mn(n: usize) -> Result<PreBlochElement> {
    if n == 0 {
        return Err(Error::Precondition("n must be positive".into()));
    }
    let b1 = triangulate_p1()?;
    Ok(b1.add(&b1.mirror()).add(&beta2()?.scale(n as i64)))
}

// ---------------------------------------------------------------------------
// D2
// ---------------------------------------------------------------------------

/// `B_k / (k + 1)!` for `k = 0..N`, exact and then rounded.
fn bernoulli_coefficients() -> &'static [f64] {
    static CELL: OnceLock<Vec<f64>> = OnceLock::new();
    CELL.get_or_init(|| {
        const N: usize = 60;
        let mut b: Vec<BigRational> = vec![BigRational::one()];
        for m in 1..N {
            // sum_{k <= m} C(m + 1, k) B_k = 0
            let mut binom = BigRational::one();
            let mut s = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                s += &binom * bk;
                binom = binom * BigRational::from_integer(((m + 1 - k) as i64).into())
                    / BigRational::from_integer(((k + 1) as i64).into());
            }
            b.push(-s / binom);
        }
        let mut fact = BigRational::one();
        b.iter()
            .enumerate()
            .map(|(k, bk)| {
                fact = &fact * BigRational::from_integer((k as i64 + 1).into());
                (bk / &fact).to_f64().unwrap_or(0.0)
            })
            .collect()
    })
}

/// The dilogarithm for `|z| <= 1`, `Re z <= 1/2`, via the series in `-log(1 - z)`.
fn li2_reduced(z: Complex64) -> Complex64 {
    let u = -(Complex64::new(1.0, 0.0) - z).ln();
    let mut pow = u;
    let mut sum = Complex64::new(0.0, 0.0);
    for &c in bernoulli_coefficients() {
        sum += pow * c;
        pow *= u;
    }
    sum
}

/// The plain series `sum z^n / n^2`, for `|z| < 1`.
pub fn li2_series(z: Complex64, terms: usize) -> Complex64 {
    let mut pow = z;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 1..=terms {
        sum += pow / (n * n) as f64;
        pow *= z;
    }
    sum
}

/// The Bloch-Wigner function `Im Li2(z) + log|z| arg(1 - z)`.
pub fn d2(z: Complex64) -> Result<f64> {
    if !z.re.is_finite() || !z.im.is_finite() || z == Complex64::new(0.0, 0.0) || z == Complex64::new(1.0, 0.0) {
        return Err(Error::Degenerate(format!("D2 is singular at {z}")));
    }
    if z.im == 0.0 {
        return Ok(0.0);
    }
    let mut z = z;
    let mut sign = 1.0;
    if z.norm_sqr() > 1.0 {
        z = z.inv();
        sign = -sign;
    }
    if z.re > 0.5 {
        z = Complex64::new(1.0, 0.0) - z;
        sign = -sign;
    }
    let one_minus = Complex64::new(1.0, 0.0) - z;
    Ok(sign * (li2_reduced(z).im + z.norm().ln() * one_minus.arg()))
}

/// `Lambda(theta) = (1/2) sum sin(2 n theta) / n^2`, the Lobachevsky function.
pub fn lobachevsky(theta: f64, terms: usize) -> f64 {
    0.5 * (1..=terms).map(|n| (2.0 * n as f64 * theta).sin() / (n * n) as f64).sum::<f64>()
}

/// Volume of the ideal tetrahedron with parameter `z` from its dihedral angles.
pub fn tetrahedron_volume_from_angles(z: Complex64, terms: usize) -> f64 {
    let a = z.arg();
    let b = (Complex64::new(1.0, 0.0) - z).inv().arg();
    let c = PI - a - b;
    lobachevsky(a, terms) + lobachevsky(b, terms) + lobachevsky(c, terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegulatorVector {
    pub r1: f64,
    pub r2: f64,
}

impl RegulatorVector {
    /// `r1 s2 - r2 s1`.
    pub fn det(&self, other: &RegulatorVector) -> f64 {
        self.r1 * other.r2 - self.r2 * other.r1
    }

    pub fn distance(&self, other: &RegulatorVector) -> f64 {
        (self.r1 - other.r1).hypot(self.r2 - other.r2)
    }
}

/// Sum of `c D2(sigma(z))` over the terms.
pub fn evaluate_d2(beta: &PreBlochElement, sigma2: bool) -> Result<f64> {
    let mut s = 0.0;
    for (z, c) in beta.terms() {
        let w = if sigma2 { z.sigma2() } else { z.clone() };
        s += c as f64 * d2(w.to_complex())?;
    }
    Ok(s)
}

/// `(sum c D2(sigma1 z), sum c D2(sigma2 z))` with `sigma2` negating `sqrt2` and fixing `i`.
pub fn borel_regulator(beta: &PreBlochElement) -> Result<RegulatorVector> {
    Ok(RegulatorVector { r1: evaluate_d2(beta, false)?, r2: evaluate_d2(beta, true)? })
}

/// Volumes of `P1` and `P2` as sums of `D2` over the triangulations.
pub fn polyhedron_volumes() -> Result<(f64, f64)> {
    Ok((evaluate_d2(&triangulate_p1()?, false)?, evaluate_d2(&triangulate_p2()?, false)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct IncommensurabilityCertificate {
    pub m: usize,
    pub n: usize,
    pub regulator_m: RegulatorVector,
    pub regulator_n: RegulatorVector,
    pub determinant: f64,
    pub certified: bool,
}

pub const DETERMINANT_TOLERANCE: f64 = 1e-6;

/// The regulators of `M_m` and `M_n` are not proportional, so no positive rational multiples
/// of the two Bloch invariants agree.
pub fn incommensurability_certificate(m: usize, n: usize) -> Result<IncommensurabilityCertificate> {
    if m == n {
        return Err(Error::Precondition(format!("m = n = {m}")));
    }
    let a = borel_regulator(&bloch_invariant_mn(m)?)?;
    let b = borel_regulator(&bloch_invariant_mn(n)?)?;
    let det = a.det(&b);
    Ok(IncommensurabilityCertificate {
        m,
        n,
        regulator_m: a,
        regulator_n: b,
        determinant: det,
        certified: det.abs() > DETERMINANT_TOLERANCE,
    })
}

/// `[z] + [z/(z-1)]`, zero in the pre-Bloch group.
pub fn relation_z_over_z_minus_1(z: &Nf) -> Result<PreBlochElement> {
    let w = z.checked_div(&(z - &Nf::one()))?;
    let mut x = PreBlochElement::term(z, 1)?;
    x.add_term(&w, 1)?;
    Ok(x)
}

/// `[z] + [1 - z]`, zero in the pre-Bloch group.
pub fn relation_one_minus(z: &Nf) -> Result<PreBlochElement> {
    let mut x = PreBlochElement::term(z, 1)?;
    x.add_term(&(&Nf::one() - z), 1)?;
    Ok(x)
}

#[derive(Debug, Clone, Serialize)]
pub struct MutationInvariance {
    pub word: String,
    pub twos: usize,
    pub correction: PreBlochElement,
    pub regulator: RegulatorVector,
    pub formally_zero: bool,
}

/// Each mutation by `m2` adds six flat tetrahedra with parameter `[2]`; the correction is
/// `6k [2]`, which vanishes under `D2` and formally since `2[2] = [2] + [2/(2-1)]`.
pub fn mutation_invariance_check(word: &MutationWord) -> Result<(MutationInvariance, Report)> {
    let k = word.entries().iter().filter(|&&x| x == 2).count();
    let two = Nf::from_rational(rat(2, 1));
    let correction = PreBlochElement::term(&two, 6 * k as i64)?;
    let reg = borel_regulator(&correction)?;
    let r1 = relation_z_over_z_minus_1(&two)?;
    let r2 = relation_one_minus(&Nf::from_rational(rat(-1, 1)))?;
    let mut rep = Report::new(format!("mutation invariance for {word}"));
    rep.push("[2] + [2/(2-1)] = 2[2]", r1 == PreBlochElement::term(&two, 2)?, r1.to_string());
    rep.push("[-1] + [1-(-1)] = 2[2]", r2 == PreBlochElement::term(&two, 2)?, r2.to_string());
    let reduced = correction.sub(&r1.scale(3 * k as i64));
    rep.push("6k[2] reduces to 0", reduced.is_zero(), reduced.to_string());
    rep.push("regulator of 6k[2] is (0, 0)", reg.r1 == 0.0 && reg.r2 == 0.0, format!("({}, {})", reg.r1, reg.r2));
    Ok((
        MutationInvariance {
            word: word.to_string(),
            twos: k,
            correction,
            regulator: reg,
            formally_zero: reduced.is_zero(),
        },
        rep,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const CATALAN: f64 = 0.915_965_594_177_219;
    const V1: f64 = 3.663_862_376_708_876;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn half_plus_half_i() -> Nf {
        Nf::new(rat(1, 2), rat(0, 1), rat(1, 2), rat(0, 1))
    }

    #[test]
    fn d2_values() {
        assert_eq!(d2(c(2.0, 0.0)).unwrap(), 0.0);
        assert_abs_diff_eq!(d2(c(0.5, 0.5)).unwrap(), CATALAN, epsilon = 1e-13);
        assert_abs_diff_eq!(4.0 * d2(c(0.5, 0.5)).unwrap(), V1, epsilon = 1e-12);
        // regular ideal tetrahedron
        assert_abs_diff_eq!(d2(c(0.5, 3f64.sqrt() / 2.0)).unwrap(), 1.014_941_606_409_653_6, epsilon = 1e-13);
        assert!(d2(c(0.0, 0.0)).is_err());
        assert!(d2(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn d2_agrees_with_plain_series_near_zero() {
        for &(re, im) in &[(0.1, 0.2), (-0.3, 0.25), (0.2, -0.4), (0.45, 0.1), (-0.2, -0.2)] {
            let z = c(re, im);
            let direct = li2_series(z, 200).im + z.norm().ln() * (c(1.0, 0.0) - z).arg();
            assert_abs_diff_eq!(d2(z).unwrap(), direct, epsilon = 1e-13);
        }
    }

    #[test]
    fn d2_matches_lobachevsky() {
        for &(re, im) in &[(0.5, 0.5), (0.3, 1.7), (-2.0, 0.4), (5.0, 3.0)] {
            let z = c(re, im);
            assert_abs_diff_eq!(d2(z).unwrap(), tetrahedron_volume_from_angles(z, 200_000), epsilon = 1e-6);
        }
    }

    #[test]
    fn canonical_keys() {
        let z = half_plus_half_i();
        assert_eq!(canonical_parameter(&z).unwrap(), Nf::i());
        assert_eq!(canonical_parameter(&Nf::from(2)).unwrap(), Nf::from(-1));
        assert!(canonical_parameter(&Nf::one()).is_err());
    }

    #[test]
    fn cross_ratios() {
        let pt = |z: Nf| Point::Finite(z);
        let z = cross_ratio_parameter(&pt(Nf::zero()), &pt(Nf::one()), &Point::Infinity, &pt(half_plus_half_i())).unwrap();
        assert_eq!(z, canonical_parameter(&half_plus_half_i()).unwrap());
        let zb = cross_ratio_parameter(&pt(Nf::zero()), &pt(Nf::one()), &Point::Infinity, &pt(half_plus_half_i().conj())).unwrap();
        assert_eq!(zb, canonical_parameter(&half_plus_half_i().conj()).unwrap());
        let two = cross_ratio_parameter(&pt(Nf::zero()), &pt(Nf::one()), &Point::Infinity, &pt(Nf::from(2))).unwrap();
        assert_eq!(two, canonical_parameter(&Nf::from(2)).unwrap());
        assert!(cross_ratio_parameter(&pt(Nf::zero()), &pt(Nf::one()), &Point::Infinity, &pt(Nf::zero())).is_err());
    }

    #[test]
    fn p1_triangulation() {
        let b1 = triangulate_p1().unwrap();
        assert_eq!(b1, PreBlochElement::term(&half_plus_half_i(), 4).unwrap());
        assert_eq!(b1.mirror(), PreBlochElement::term(&half_plus_half_i().conj(), -4).unwrap());
        let r = borel_regulator(&b1).unwrap();
        assert_abs_diff_eq!(r.r1, V1, epsilon = 1e-12);
        assert_abs_diff_eq!(r.r2, V1, epsilon = 1e-12);
        let r = borel_regulator(&b1.mirror()).unwrap();
        assert_abs_diff_eq!(r.r1, V1, epsilon = 1e-12);
    }

    #[test]
    fn p2_triangulation() {
        let t = triangulate_p2().unwrap();
        assert_eq!(t.total_coefficient(), 14);
        assert!(t.in_q_i_sqrt2());
        let (_, v2) = polyhedron_volumes().unwrap();
        // independent evaluation through the Lobachevsky function
        let mut lob = 0.0;
        for (z, k) in t.terms() {
            lob += k as f64 * tetrahedron_volume_from_angles(z.to_complex(), 200_000);
        }
        assert_abs_diff_eq!(v2, lob, epsilon = 1e-5);
        assert_abs_diff_eq!(v2, 12.046_092, epsilon = 1e-5);
        let r = borel_regulator(&beta2().unwrap()).unwrap();
        assert_abs_diff_eq!(r.r1, 2.0 * v2, epsilon = 1e-9);
        assert_abs_diff_eq!(r.r2, -2.0 * v2, epsilon = 1e-9);
    }

    #[test]
    fn invariant_of_mn() {
        let (v1, v2) = polyhedron_volumes().unwrap();
        let b1 = triangulate_p1().unwrap();
        assert_eq!(bloch_invariant_mn(1).unwrap(), b1.add(&b1.mirror()).add(&beta2().unwrap()));
        assert_eq!(bloch_invariant_mn(2).unwrap().sub(&bloch_invariant_mn(1).unwrap()), beta2().unwrap());
        let mut regs = Vec::new();
        for n in 1..=8 {
            let r = borel_regulator(&bloch_invariant_mn(n).unwrap()).unwrap();
            assert_abs_diff_eq!(r.r1, 2.0 * v1 + 2.0 * n as f64 * v2, epsilon = 1e-8);
            assert_abs_diff_eq!(r.r2, 2.0 * v1 - 2.0 * n as f64 * v2, epsilon = 1e-8);
            regs.push(r);
        }
        for i in 0..regs.len() {
            for j in i + 1..regs.len() {
                assert!(regs[i].det(&regs[j]).abs() >= 1e-6);
            }
        }
        assert!(bloch_invariant_mn(0).is_err());
    }

    #[test]
    fn certificates() {
        assert!(incommensurability_certificate(1, 2).unwrap().certified);
        assert!(incommensurability_certificate(3, 5).unwrap().certified);
        assert!(incommensurability_certificate(2, 2).is_err());
    }

    #[test]
    fn mutation_corrections() {
        let (m, rep) = mutation_invariance_check(&"0,2,0".parse().unwrap()).unwrap();
        assert!(rep.passed(), "{rep}");
        assert_eq!(m.correction, PreBlochElement::term(&Nf::from(2), 6).unwrap());
        let (m, _) = mutation_invariance_check(&"0,0,0".parse().unwrap()).unwrap();
        assert!(m.correction.is_zero());
        let (m, rep) = mutation_invariance_check(&"2,2,2".parse().unwrap()).unwrap();
        assert!(rep.passed());
        assert_eq!(m.correction.coefficient(&Nf::from(2)), 18);
        assert_eq!((m.regulator.r1, m.regulator.r2), (0.0, 0.0));
    }

    #[test]
    fn display() {
        let x = PreBlochElement::term(&half_plus_half_i(), 4).unwrap().sub(&PreBlochElement::term(&Nf::from(3), 1).unwrap());
        assert_eq!(x.to_string(), "-[-1/2] + 4[i]");
        assert_eq!(PreBlochElement::zero().to_string(), "0");
    }
}
