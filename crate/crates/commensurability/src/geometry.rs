//! Planes in upper half-space, their reflections and angles, and the light-cone lift.
//!
//! A hyperplane is stored by its boundary circle or line. Internally everything goes
//! through the Hermitian form `Q(z) = a|z|^2 + b zbar + bbar z + d` with real `a, d`,
//! which makes reflections, images and angles linear algebra over `K`.

use std::fmt;

use serde::Serialize;

use crate::moebius::{ExtendedMoebius, Orientation, Point};
use crate::numfield::{rat, Embedding, Nf, RealQuad};
use crate::{Error, Result};

/// Absolute tolerance used whenever embedded (floating) values are compared.
pub const FLOAT_TOL: f64 = 1e-9;

/// The form `a|z|^2 + b zbar + bbar z + d`, defined up to a nonzero real multiple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HermitianForm {
    pub a: RealQuad,
    pub b: Nf,
    pub d: RealQuad,
}

impl HermitianForm {
    pub fn new(a: RealQuad, b: Nf, d: RealQuad) -> Self {
        HermitianForm { a, b, d }
    }

    pub fn eval(&self, z: &Nf) -> RealQuad {
        let t = &self.b.conj() * z;
        &(&self.a * &z.abs2()) + &(&(t.re() + t.re()) + &self.d)
    }

    /// Sign of the form at a boundary point; at infinity this is the sign of `a`.
    pub fn sign_at(&self, p: &Point) -> i8 {
        match p {
            Point::Finite(z) => self.eval(z).signum(),
            Point::Infinity => self.a.signum(),
        }
    }

    /// `|b|^2 - a d`; positive iff the zero set is a circle or line.
    pub fn discriminant(&self) -> RealQuad {
        &self.b.abs2() - &(&self.a * &self.d)
    }

    /// Polarization of the quadratic form `|b|^2 - ad`.
    pub fn pairing(&self, other: &Self) -> RealQuad {
        let cross = &self.b * &other.b.conj();
        let two_re = cross.re() + cross.re();
        let s = &two_re - &(&(&self.a * &other.d) + &(&other.a * &self.d));
        s * RealQuad::from_rational(rat(1, 2))
    }

    pub fn negated(&self) -> Self {
        HermitianForm { a: -&self.a, b: -&self.b, d: -&self.d }
    }

    /// True iff `other = lambda * self` for a real `lambda` of the given sign (0 = any).
    fn proportional(&self, other: &Self, sign: i8) -> bool {
        let x = [Nf::from_real(self.a.clone()), self.b.clone(), Nf::from_real(self.d.clone())];
        let y = [Nf::from_real(other.a.clone()), other.b.clone(), Nf::from_real(other.d.clone())];
        for i in 0..3 {
            for j in (i + 1)..3 {
                if &x[i] * &y[j] != &x[j] * &y[i] {
                    return false;
                }
            }
        }
        if sign == 0 {
            return true;
        }
        // compare the sign of the first nonzero coordinate
        let k = (0..3).find(|&k| !x[k].is_zero()).expect("nonzero form");
        let s = (&x[k].conj() * &y[k]).re().signum();
        s == sign
    }

    /// The form whose zero set is the image under `g`.
    pub fn push_forward(&self, g: &ExtendedMoebius) -> Self {
        // Q o g^-1, i.e. conjugate the Hermitian matrix by N = g^-1
        let n = g.inverse();
        let [p, q, r, s] = n.entries();
        let (a, b, d) = (Nf::from_real(self.a.clone()), &self.b, Nf::from_real(self.d.clone()));
        let bb = b.conj();
        // H = (a b; bbar d), N* H N
        let h00 = &(&a * p) + &(b * r);
        let h01 = &(&a * q) + &(b * s);
        let h10 = &(&bb * p) + &(&d * r);
        let h11 = &(&bb * q) + &(&d * s);
        let na = &(&p.conj() * &h00) + &(&r.conj() * &h10);
        let nb = &(&p.conj() * &h01) + &(&r.conj() * &h11);
        let nd = &(&q.conj() * &h01) + &(&s.conj() * &h11);
        let nb = match g.orientation() {
            Orientation::Preserving => nb,
            Orientation::Reversing => nb.conj(),
        };
        HermitianForm { a: na.re().clone(), b: nb, d: nd.re().clone() }
    }
}

/// A totally geodesic plane in upper half-space.
#[derive(Debug, Clone, Serialize)]
pub enum Hyperplane {
    /// Vertical plane over the line through `p` and `q`.
    Vertical { p: Nf, q: Nf },
    /// Hemisphere over the circle `|z - center|^2 = radius_squared`.
    Hemisphere { center: Nf, radius_squared: RealQuad },
}

impl Hyperplane {
    pub fn vertical(p: Nf, q: Nf) -> Result<Self> {
        if p == q {
            return Err(Error::Degenerate("vertical plane anchors coincide".into()));
        }
        Ok(Hyperplane::Vertical { p, q })
    }

    pub fn hemisphere(center: Nf, radius_squared: RealQuad) -> Result<Self> {
        if !radius_squared.is_positive() {
            return Err(Error::Degenerate(format!("radius squared {radius_squared} is not positive")));
        }
        Ok(Hyperplane::Hemisphere { center, radius_squared })
    }

    /// `w H + z`: the vertical plane over `w R + z`.
    pub fn line(w: Nf, z: Nf) -> Self {
        let q = &z + &w;
        Hyperplane::vertical(z, q).expect("nonzero direction")
    }

    /// `H`, over the real axis.
    pub fn real_axis() -> Self {
        Self::line(Nf::one(), Nf::zero())
    }

    /// `iH`, over the imaginary axis.
    pub fn imaginary_axis() -> Self {
        Self::line(Nf::i(), Nf::zero())
    }

    /// The boundary of `B_j`: the unit hemisphere centred at `-j i sqrt2`.
    pub fn ball_boundary(j: i64) -> Self {
        Hyperplane::Hemisphere { center: Nf::from_ints(0, 0, 0, -j), radius_squared: RealQuad::one() }
    }

    pub fn form(&self) -> HermitianForm {
        match self {
            Hyperplane::Vertical { p, q } => {
                let w = q - p;
                let b = &Nf::i() * &w;
                let t = &b.conj() * p;
                let d = -(t.re() + t.re());
                HermitianForm::new(RealQuad::zero(), b, d)
            }
            Hyperplane::Hemisphere { center, radius_squared } => HermitianForm::new(
                RealQuad::one(),
                -center,
                &center.abs2() - radius_squared,
            ),
        }
    }

    pub fn from_form(f: &HermitianForm) -> Result<Self> {
        let disc = f.discriminant();
        if !disc.is_positive() {
            return Err(Error::Degenerate("form has no real zero set".into()));
        }
        if f.a.is_zero() {
            // b zbar + bbar z + d = 0: p0 = -d b / (2|b|^2), direction i b
            let twice = &f.b.abs2() * &RealQuad::from_ints(2, 0);
            let scale = -(&f.d * &twice.inv()?);
            let p = f.b.scale(&scale);
            let q = &p + &(&Nf::i() * &f.b);
            Hyperplane::vertical(p, q)
        } else {
            let ainv = f.a.inv()?;
            let center = -f.b.scale(&ainv);
            let r2 = &disc * &(&ainv * &ainv);
            Hyperplane::hemisphere(center, r2)
        }
    }

    pub fn is_vertical(&self) -> bool {
        matches!(self, Hyperplane::Vertical { .. })
    }

    /// True iff the boundary point lies on the plane's boundary circle or line.
    pub fn contains(&self, p: &Point) -> bool {
        self.form().sign_at(p) == 0
    }

    pub fn reflection(&self) -> ExtendedMoebius {
        let f = self.form();
        ExtendedMoebius::hermitian_reflection(&f.a, &f.b, &f.d).expect("valid plane")
    }

    /// Image of the plane under `g`.
    pub fn apply(&self, g: &ExtendedMoebius) -> Self {
        Hyperplane::from_form(&self.form().push_forward(g)).expect("isometries preserve planes")
    }
}

impl PartialEq for Hyperplane {
    fn eq(&self, other: &Self) -> bool {
        self.form().proportional(&other.form(), 0)
    }
}

impl fmt::Display for Hyperplane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hyperplane::Vertical { p, q } => write!(f, "vertical over line through {p} and {q}"),
            Hyperplane::Hemisphere { center, radius_squared } => {
                write!(f, "hemisphere centre {center}, radius^2 {radius_squared}")
            }
        }
    }
}

/// `image of x under g` for the plane form of [`Hyperplane::apply`].
pub fn apply_to_hyperplane(g: &ExtendedMoebius, h: &Hyperplane) -> Hyperplane {
    h.apply(g)
}

/// How two planes sit relative to each other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Incidence {
    /// The planes cross. `cos_squared` is exact; `cos` is the nonnegative cosine of the
    /// acute angle when it lies in `Q(sqrt 2)`.
    Meet { cos_squared: RealQuad, cos: Option<RealQuad> },
    /// Boundary circles touch at one point (for vertical planes: parallel lines, meeting at oo).
    Tangent,
    Disjoint,
}

impl Incidence {
    pub fn cos(&self) -> Option<&RealQuad> {
        match self {
            Incidence::Meet { cos, .. } => cos.as_ref(),
            _ => None,
        }
    }

    /// The angle as `pi / k` when the cosine is one of the standard values.
    pub fn submultiple_of_pi(&self) -> Option<u32> {
        let c2 = match self {
            Incidence::Meet { cos_squared, .. } => cos_squared,
            _ => return None,
        };
        // cos^2(pi/k) for k = 2, 3, 4, 6
        [(2, rat(0, 1)), (3, rat(1, 4)), (4, rat(1, 2)), (6, rat(3, 4))]
            .into_iter()
            .find(|(_, v)| *c2 == RealQuad::from_rational(v.clone()))
            .map(|(k, _)| k)
    }
}

fn classify_pairing(p: &RealQuad, d1: &RealQuad, d2: &RealQuad) -> (RealQuad, std::cmp::Ordering) {
    let p2 = p * p;
    let prod = d1 * d2;
    let c2 = &p2 * &prod.inv().expect("positive discriminants");
    (c2, p2.cmp(&prod))
}

/// Angle between two planes (unoriented, so the acute angle is reported).
pub fn dihedral_cos(h1: &Hyperplane, h2: &Hyperplane) -> Incidence {
    let (f1, f2) = (h1.form(), h2.form());
    let p = f1.pairing(&f2);
    let (c2, ord) = classify_pairing(&p, &f1.discriminant(), &f2.discriminant());
    match ord {
        std::cmp::Ordering::Less => {
            let cos = c2.sqrt();
            Incidence::Meet { cos_squared: c2, cos }
        }
        std::cmp::Ordering::Equal => Incidence::Tangent,
        std::cmp::Ordering::Greater => Incidence::Disjoint,
    }
}

/// A closed half-space `{Q >= 0}` of a plane form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HalfSpace {
    pub form: HermitianForm,
}

impl HalfSpace {
    /// The side of `h` containing the boundary point `p` (which must not lie on `h`).
    pub fn containing(h: &Hyperplane, p: &Point) -> Result<Self> {
        let f = h.form();
        match f.sign_at(p) {
            0 => Err(Error::Degenerate(format!("{p} lies on the plane"))),
            s if s > 0 => Ok(HalfSpace { form: f }),
            _ => Ok(HalfSpace { form: f.negated() }),
        }
    }

    pub fn plane(&self) -> Hyperplane {
        Hyperplane::from_form(&self.form).expect("valid")
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.form.sign_at(p) >= 0
    }

    /// Signed cosine squared of the interior angle of `self` and `other`: returns
    /// `(sign of cos, cos^2)` or the non-meeting incidence.
    pub fn interior_angle(&self, other: &HalfSpace) -> Incidence {
        let (f1, f2) = (&self.form, &other.form);
        let p = -f1.pairing(f2);
        let (c2, ord) = classify_pairing(&p, &f1.discriminant(), &f2.discriminant());
        match ord {
            std::cmp::Ordering::Less => {
                let cos = c2.sqrt().map(|c| if p.signum() < 0 { -c } else { c });
                Incidence::Meet { cos_squared: c2, cos }
            }
            std::cmp::Ordering::Equal => Incidence::Tangent,
            std::cmp::Ordering::Greater => Incidence::Disjoint,
        }
    }
}

/// A horosphere: height for the one centred at oo, Euclidean diameter otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HoroData {
    pub center: Point,
    pub scale: RealQuad,
}

impl HoroData {
    pub fn new(center: Point, scale: RealQuad) -> Result<Self> {
        if !scale.is_positive() {
            return Err(Error::Degenerate("horosphere scale must be positive".into()));
        }
        Ok(HoroData { center, scale })
    }

    /// Image under `g`.
    ///
    /// For `det g = 1`, diameter `delta` at `z` goes to diameter `delta/|cz+d|^2` at `g z` when
    /// both are finite; the height `h` at oo goes to diameter `1/(|c|^2 h)`; diameter `delta`
    /// at `-d/c` goes to height `1/(|c|^2 delta)`. A general `g` rescales by `|det g|`, which
    /// must lie in `Q(sqrt 2)`. A reversing `g` acts on `conj(z)`.
    pub fn apply(&self, g: &ExtendedMoebius) -> Result<Self> {
        let det2 = g.det().abs2();
        let abs_det = det2.sqrt().ok_or_else(|| Error::NotInField(det2.to_string()))?;
        let [a, _, c, d] = g.entries();
        let img = g.apply(&self.center);
        let src = match g.orientation() {
            Orientation::Preserving => self.center.clone(),
            Orientation::Reversing => self.center.conj(),
        };
        let scale = match (&src, &img) {
            (Point::Infinity, Point::Infinity) => &(&self.scale * &a.abs2()) * &abs_det.inv()?,
            (Point::Infinity, Point::Finite(_)) | (Point::Finite(_), Point::Infinity) => {
                &abs_det * &(&c.abs2() * &self.scale).inv()?
            }
            (Point::Finite(z), Point::Finite(_)) => {
                let den = (&(c * z) + d).abs2();
                &(&self.scale * &abs_det) * &den.inv()?
            }
        };
        HoroData::new(img, scale)
    }
}

/// A vector in `R^{3,1}` with coordinates in `Q(sqrt 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct LorentzVector(pub [RealQuad; 4]);

impl LorentzVector {
    pub fn new(v: [RealQuad; 4]) -> Self {
        LorentzVector(v)
    }

    /// Coordinates `x + y sqrt2` given as `(x, y)` integer pairs.
    pub fn from_pairs(v: [(i64, i64); 4]) -> Self {
        LorentzVector(v.map(|(a, b)| RealQuad::from_ints(a, b)))
    }

    pub fn scale(&self, s: &RealQuad) -> Self {
        LorentzVector(self.0.clone().map(|x| &x * s))
    }

    /// Euclidean dot product in `R^4`.
    pub fn dot(&self, w: &Self) -> RealQuad {
        let mut acc = RealQuad::zero();
        for i in 0..4 {
            acc += &(&self.0[i] * &w.0[i]);
        }
        acc
    }

    pub fn is_null(&self) -> bool {
        lorentz_inner(self, self).is_zero()
    }

    /// In the closed positive light cone: null with positive last coordinate.
    pub fn in_light_cone(&self) -> bool {
        self.is_null() && self.0[3].is_positive()
    }

    pub fn to_f64(&self) -> [f64; 4] {
        [0, 1, 2, 3].map(|i| self.0[i].to_f64())
    }
}

impl fmt::Display for LorentzVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.0;
        write!(f, "({a}, {b}, {c}, {d})")
    }
}

/// `v1 w1 + v2 w2 + v3 w3 - v4 w4`.
pub fn lorentz_inner(v: &LorentzVector, w: &LorentzVector) -> RealQuad {
    let mut acc = RealQuad::zero();
    for i in 0..3 {
        acc += &(&v.0[i] * &w.0[i]);
    }
    &acc - &(&v.0[3] * &w.0[3])
}

/// Generalized cross product: a vector Euclidean-orthogonal to the three inputs.
///
/// Zero iff the inputs are linearly dependent.
pub fn cross3(u: &[RealQuad; 4], v: &[RealQuad; 4], w: &[RealQuad; 4]) -> [RealQuad; 4] {
    let minor = |c0: usize, c1: usize, c2: usize| -> RealQuad {
        let det2 = |i: usize, j: usize| &(&v[i] * &w[j]) - &(&v[j] * &w[i]);
        let t0 = &u[c0] * &det2(c1, c2);
        let t1 = &u[c1] * &det2(c0, c2);
        let t2 = &u[c2] * &det2(c0, c1);
        &(&t0 - &t1) + &t2
    };
    [minor(1, 2, 3), -minor(0, 2, 3), minor(0, 1, 3), -minor(0, 1, 2)]
}

/// A Lorentz normal `u` to the span of three vectors: `<u, v_i> = 0`.
pub fn lorentz_normal(a: &LorentzVector, b: &LorentzVector, c: &LorentzVector) -> Result<LorentzVector> {
    let [x, y, z, t] = cross3(&a.0, &b.0, &c.0);
    if [&x, &y, &z, &t].iter().all(|e| e.is_zero()) {
        return Err(Error::Degenerate("vectors are linearly dependent".into()));
    }
    Ok(LorentzVector([x, y, z, -t]))
}

/// Reflection of `v` in the Lorentz-orthogonal complement of a spacelike `u`.
pub fn lorentz_reflect(u: &LorentzVector, v: &LorentzVector) -> Result<LorentzVector> {
    let uu = lorentz_inner(u, u);
    if !uu.is_positive() {
        return Err(Error::Precondition(format!("{u} is not spacelike")));
    }
    let k = &(&lorentz_inner(v, u) * &RealQuad::from_ints(2, 0)) * &uu.inv()?;
    let mut out = v.0.clone();
    for i in 0..4 {
        out[i] = &out[i] - &(&k * &u.0[i]);
    }
    Ok(LorentzVector(out))
}

/// `z = x + iy -> (2x, 2y, |z|^2 - 1, |z|^2 + 1)`, `oo -> (0, 0, 1, 1)`.
pub fn boundary_to_lightcone(p: &Point) -> LorentzVector {
    match p {
        Point::Infinity => LorentzVector::from_pairs([(0, 0), (0, 0), (1, 0), (1, 0)]),
        Point::Finite(z) => {
            let two = RealQuad::from_ints(2, 0);
            let n = z.abs2();
            LorentzVector([
                &two * z.re(),
                &two * z.im(),
                &n - &RealQuad::one(),
                &n + &RealQuad::one(),
            ])
        }
    }
}

/// Inverse of [`boundary_to_lightcone`] on rays.
pub fn lightcone_to_boundary(v: &LorentzVector) -> Result<Point> {
    if !v.is_null() {
        return Err(Error::Precondition(format!("{v} is not null")));
    }
    if !v.0[3].is_positive() {
        return Err(Error::Precondition(format!("{v} is not future-pointing")));
    }
    let den = &v.0[3] - &v.0[2];
    if den.is_zero() {
        return Ok(Point::Infinity);
    }
    let inv = den.inv()?;
    Ok(Point::Finite(Nf::from_parts(&v.0[0] * &inv, &v.0[1] * &inv)))
}

/// Exact linear action on `R^{3,1}` induced by `g`.
///
/// Uses `v <-> (v4+v3, v1+i v2; v1-i v2, v4-v3)` and `X -> M X M* / |det M|`; an
/// orientation-reversing element transposes `X` first. Fails if `|det M|` is not in `Q(sqrt 2)`.
pub fn lorentz_action(g: &ExtendedMoebius, v: &LorentzVector) -> Result<LorentzVector> {
    let abs_det = g.det().abs2().sqrt().ok_or_else(|| Error::NotInField(g.det().abs2().to_string()))?;
    let scale = abs_det.inv()?;
    let [v1, v2, v3, v4] = &v.0;
    let off = Nf::from_parts(v1.clone(), v2.clone());
    let (x01, x10) = match g.orientation() {
        Orientation::Preserving => (off.clone(), off.conj()),
        Orientation::Reversing => (off.conj(), off),
    };
    let x00 = Nf::from_real(v4 + v3);
    let x11 = Nf::from_real(v4 - v3);
    let [a, b, c, d] = g.entries();
    // Y = M X
    let y00 = &(a * &x00) + &(b * &x10);
    let y01 = &(a * &x01) + &(b * &x11);
    let y10 = &(c * &x00) + &(d * &x10);
    let y11 = &(c * &x01) + &(d * &x11);
    // Z = Y M*
    let z00 = &(&y00 * &a.conj()) + &(&y01 * &b.conj());
    let z01 = &(&y00 * &c.conj()) + &(&y01 * &d.conj());
    let z11 = &(&y10 * &c.conj()) + &(&y11 * &d.conj());
    let half = &scale * &RealQuad::from_rational(rat(1, 2));
    let (p, q) = (z00.re().clone(), z11.re().clone());
    Ok(LorentzVector([
        z01.re() * &scale,
        z01.im() * &scale,
        &(&p - &q) * &half,
        &(&p + &q) * &half,
    ]))
}

/// Numerical copy of [`lorentz_action`] under an embedding, for spot checks.
pub fn lorentz_action_f64(g: &ExtendedMoebius, v: [f64; 4], e: Embedding) -> [f64; 4] {
    use num_complex::Complex64;
    let m: Vec<Complex64> = g.entries().iter().map(|x| x.embed(e)).collect();
    let k = 1.0 / (m[0] * m[3] - m[1] * m[2]).norm();
    let off = Complex64::new(v[0], v[1]);
    let (x01, x10) = if g.is_preserving() { (off, off.conj()) } else { (off.conj(), off) };
    let x = [Complex64::new(v[3] + v[2], 0.0), x01, x10, Complex64::new(v[3] - v[2], 0.0)];
    let y = [
        m[0] * x[0] + m[1] * x[2],
        m[0] * x[1] + m[1] * x[3],
        m[2] * x[0] + m[3] * x[2],
        m[2] * x[1] + m[3] * x[3],
    ];
    let z00 = y[0] * m[0].conj() + y[1] * m[1].conj();
    let z01 = y[0] * m[2].conj() + y[1] * m[3].conj();
    let z11 = y[2] * m[2].conj() + y[3] * m[3].conj();
    [k * z01.re, k * z01.im, k * (z00.re - z11.re) / 2.0, k * (z00.re + z11.re) / 2.0]
}
