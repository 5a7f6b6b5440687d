//! Canonicity of the tiling in the Lorentz model: coplanarity of each tile's horospherical
//! vectors and convexity across shared faces.
//!
//! `n . v` below is the Euclidean dot product in `R^4`; nullity uses the Lorentz form.

use serde::Serialize;

use crate::geometry::{
    lightcone_to_boundary, lorentz_action, lorentz_action_f64, lorentz_inner,
    lorentz_normal, lorentz_reflect, LorentzVector, FLOAT_TOL,
};
use crate::moebius::{ExtendedMoebius, Point};
use crate::numfield::{rat, Embedding, RealQuad};
use crate::report::Report;
use crate::{Error, Result};

/// A labelled set of horospherical vectors, one per ideal vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HoroVectorSet {
    pub label: String,
    pub columns: Vec<LorentzVector>,
}

impl HoroVectorSet {
    pub fn new(label: impl Into<String>, columns: Vec<LorentzVector>) -> Result<Self> {
        let set = HoroVectorSet { label: label.into(), columns };
        if let Some(bad) = set.columns.iter().find(|v| !v.in_light_cone()) {
            return Err(Error::Inconsistent(format!("{bad} is not in the positive light cone")));
        }
        Ok(set)
    }

    /// Column `i`, counted from 1.
    pub fn col(&self, i: usize) -> &LorentzVector {
        &self.columns[i - 1]
    }

    pub fn ideal_points(&self) -> Vec<Point> {
        self.columns.iter().map(|v| lightcone_to_boundary(v).expect("validated")).collect()
    }

    /// Images of every column under an isometry.
    pub fn map(&self, label: impl Into<String>, f: impl Fn(&LorentzVector) -> Result<LorentzVector>) -> Result<Self> {
        let columns = self.columns.iter().map(f).collect::<Result<Vec<_>>>()?;
        HoroVectorSet::new(label, columns)
    }
}

fn q(a: i64, b: i64) -> RealQuad {
    RealQuad::from_ints(a, b)
}

/// The twelve cuboctahedron vectors `M` and the six octahedron vectors `N`.
pub fn load_mn() -> (HoroVectorSet, HoroVectorSet) {
    let m_cols: [[(i64, i64); 4]; 12] = [
        [(2, 0), (0, 0), (0, 0), (2, 0)],
        [(1, 0), (1, 0), (0, 1), (2, 0)],
        [(0, 0), (2, 0), (0, 0), (2, 0)],
        [(1, 0), (1, 0), (0, -1), (2, 0)],
        [(0, 0), (-2, 0), (0, 0), (2, 0)],
        [(-1, 0), (-1, 0), (0, 1), (2, 0)],
        [(-2, 0), (0, 0), (0, 0), (2, 0)],
        [(-1, 0), (-1, 0), (0, -1), (2, 0)],
        [(1, 0), (-1, 0), (0, -1), (2, 0)],
        [(-1, 0), (1, 0), (0, -1), (2, 0)],
        [(-1, 0), (1, 0), (0, 1), (2, 0)],
        [(1, 0), (-1, 0), (0, 1), (2, 0)],
    ];
    let n_cols: [[(i64, i64); 4]; 6] = [
        [(0, 1), (0, 0), (0, 0), (0, 1)],
        [(0, 0), (0, 1), (0, 0), (0, 1)],
        [(0, 0), (0, 0), (0, 1), (0, 1)],
        [(0, -1), (0, 0), (0, 0), (0, 1)],
        [(0, 0), (0, -1), (0, 0), (0, 1)],
        [(0, 0), (0, 0), (0, -1), (0, 1)],
    ];
    let m = HoroVectorSet::new("M", m_cols.iter().map(|c| LorentzVector::from_pairs(*c)).collect())
        .expect("M columns are null");
    let n = HoroVectorSet::new("N", n_cols.iter().map(|c| LorentzVector::from_pairs(*c)).collect())
        .expect("N columns are null");
    (m, n)
}

/// `n = (0, 0, 0, 1/2)`.
pub fn normal_n() -> LorentzVector {
    let half = RealQuad::from_rational(rat(1, 2));
    LorentzVector([RealQuad::zero(), RealQuad::zero(), RealQuad::zero(), half])
}

pub fn coplanarity_values(normal: &LorentzVector, vs: &HoroVectorSet) -> Vec<RealQuad> {
    vs.columns.iter().map(|v| normal.dot(v)).collect()
}

/// `normal . v = 1` for every column, exactly.
pub fn coplanarity_check(normal: &LorentzVector, vs: &HoroVectorSet) -> bool {
    coplanarity_values(normal, vs).iter().all(|x| *x == RealQuad::one())
}

/// True iff the listed columns span a face of the hull of all columns: they lie on one
/// Lorentz hyperplane through the origin and every other column is strictly on one side.
pub fn is_face(vs: &HoroVectorSet, face: &[usize]) -> bool {
    if face.len() < 3 {
        return false;
    }
    let Ok(u) = lorentz_normal(vs.col(face[0]), vs.col(face[1]), vs.col(face[2])) else {
        return false;
    };
    let mut side = 0i8;
    for (i, v) in vs.columns.iter().enumerate() {
        let s = lorentz_inner(&u, v).signum();
        let on_face = face.contains(&(i + 1));
        if on_face != (s == 0) {
            return false;
        }
        if s != 0 {
            if side != 0 && s != side {
                return false;
            }
            side = s;
        }
    }
    true
}

/// The tile adjacent across a face: reflect every column in the face's plane.
pub fn reflect_across_face(vs: &HoroVectorSet, face: &[usize]) -> Result<HoroVectorSet> {
    let u = lorentz_normal(vs.col(face[0]), vs.col(face[1]), vs.col(face[2]))?;
    vs.map(format!("{} reflected across {:?}", vs.label, face), |v| lorentz_reflect(&u, v))
}

/// The isometry `h` carrying `n1, n2, n3` to `m1, m4, m9` together with `h(N)`.
///
/// The ray assignment `n2 -> m4, n3 -> m9` puts `h(P_N)` on the far side of the face
/// `(m1, m9, m4)`; the other orientation-preserving choice overlaps `P_M`.
pub fn octahedron_across_triangle() -> Result<(ExtendedMoebius, HoroVectorSet)> {
    let (m, n) = load_mn();
    let np = n.ideal_points();
    let mp = m.ideal_points();
    let h = ExtendedMoebius::through_triples([&np[0], &np[1], &np[2]], [&mp[0], &mp[3], &mp[8]])?;
    let hn = n.map("h(N)", |v| lorentz_action(&h, v))?;
    Ok((h, hn))
}

/// One convexity condition `n . w > 1`.
#[derive(Debug, Clone, Serialize)]
pub struct ConvexityWitness {
    pub description: String,
    pub w: LorentzVector,
    /// Factor multiplying `n` (1 or `sqrt 2`).
    pub normal_scale: RealQuad,
    pub value: RealQuad,
    pub expected: RealQuad,
}

impl ConvexityWitness {
    pub fn passes(&self) -> bool {
        self.value == self.expected && self.value > RealQuad::one() && self.w.in_light_cone()
    }
}

/// The four witnesses for the convex-angle condition, evaluated exactly.
///
/// The octahedron witness is `h(n4) = (2+2 sqrt2, 0, -2-2 sqrt2, 4+2 sqrt2)`; see
/// [`octahedron_across_triangle`] for where it comes from.
pub fn convexity_witnesses() -> Vec<ConvexityWitness> {
    let n = normal_n();
    let s2 = RealQuad::sqrt2();
    let mk = |description: &str, w: LorentzVector, scale: RealQuad, expected: RealQuad| {
        let value = n.scale(&scale).dot(&w);
        ConvexityWitness { description: description.into(), w, normal_scale: scale, value, expected }
    };
    vec![
        mk(
            "cuboctahedron across triangle (m1, m9, m4)",
            LorentzVector::from_pairs([(7, 0), (1, 0), (0, -5), (10, 0)]),
            RealQuad::one(),
            q(5, 0),
        ),
        mk(
            "cuboctahedron across square (m1, m2, m3, m4)",
            LorentzVector::from_pairs([(3, 0), (5, 0), (0, -1), (6, 0)]),
            RealQuad::one(),
            q(3, 0),
        ),
        mk(
            "octahedron across face (n1, n2, n3)",
            LorentzVector::from_pairs([(0, 1), (0, 2), (0, 2), (0, 3)]),
            s2.clone(),
            q(3, 0),
        ),
        mk(
            "octahedron h(P_N) across triangle (m1, m9, m4)",
            LorentzVector::from_pairs([(2, 2), (0, 0), (-2, -2), (4, 2)]),
            RealQuad::one(),
            q(2, 1),
        ),
    ]
}

/// Numerical check that `(n A^-1) . (A v) = n . v` for the Lorentz matrix of `g`.
pub fn isometry_invariance_spotcheck(g: &ExtendedMoebius, v: &LorentzVector, n: &LorentzVector) -> bool {
    let ginv = g.inverse();
    let basis = |i: usize| {
        let mut e = [0.0; 4];
        e[i] = 1.0;
        e
    };
    // rows of (A^-1)^T n: component j is sum_i n_i (A^-1)_{ij} = n . (A^-1 e_j)
    let nf = n.to_f64();
    let moved_n: Vec<f64> = (0..4)
        .map(|j| {
            let col = lorentz_action_f64(&ginv, basis(j), Embedding::Sigma1);
            (0..4).map(|i| nf[i] * col[i]).sum()
        })
        .collect();
    let av = lorentz_action_f64(g, v.to_f64(), Embedding::Sigma1);
    let lhs: f64 = (0..4).map(|i| moved_n[i] * av[i]).sum();
    let rhs: f64 = (0..4).map(|i| nf[i] * v.to_f64()[i]).sum();
    (lhs - rhs).abs() < FLOAT_TOL * (1.0 + rhs.abs())
}

/// Every exact canonicity condition, plus derivations of the witness vectors.
pub fn canonicity_report(n_blocks: u32) -> Report {
    let mut rep = Report::new("canonical tiling");
    let (m, nn) = load_mn();
    let n = normal_n();
    rep.check("all 18 columns lie in L+", m.columns.iter().chain(&nn.columns).all(LorentzVector::in_light_cone));
    for (i, v) in coplanarity_values(&n, &m).iter().enumerate() {
        rep.push(format!("n . m{} = 1", i + 1), *v == RealQuad::one(), v.to_string());
    }
    let sn = n.scale(&RealQuad::sqrt2());
    for (i, v) in coplanarity_values(&sn, &nn).iter().enumerate() {
        rep.push(format!("sqrt2 n . n{} = 1", i + 1), *v == RealQuad::one(), v.to_string());
    }
    for w in convexity_witnesses() {
        rep.push(format!("{}: n . w = {}", w.description, w.expected), w.passes(), w.value.to_string());
    }

    // the witnesses are vertices of the neighbouring tiles, found by reflection or by h
    let faces: [(&HoroVectorSet, &[usize], usize); 3] =
        [(&m, &[1, 9, 4], 0), (&m, &[1, 2, 3, 4], 1), (&nn, &[1, 2, 3], 2)];
    let ws = convexity_witnesses();
    for (set, face, k) in faces {
        let ok = is_face(set, face);
        rep.push(format!("{face:?} is a face of P_{}", set.label), ok, "");
        match reflect_across_face(set, face) {
            Ok(nb) => {
                let w = &ws[k].w;
                let found = nb.columns.contains(w) && !set.columns.contains(w);
                rep.push(format!("w = {w} is a new vertex of the tile across {face:?}"), found, "");
            }
            Err(e) => rep.push(format!("reflect across {face:?}"), false, e.to_string()),
        }
    }
    match octahedron_across_triangle() {
        Ok((_, hn)) => {
            rep.check("h(n1) = m1, h(n2) = m4, h(n3) = m9", hn.col(1) == m.col(1) && hn.col(2) == m.col(4) && hn.col(3) == m.col(9));
            rep.check("h(n4) is the octahedron witness", *hn.col(4) == ws[3].w);
            let far = hn.columns[3..].iter().all(|v| n.dot(v) > RealQuad::one());
            rep.check("h(P_N) lies beyond the face: n . h(n_i) > 1 for i = 4, 5, 6", far);
        }
        Err(e) => rep.push("construct h", false, e.to_string()),
    }

    // conditions are preserved by the translations c^-j moving the tiles down the chain
    let c = crate::moebius::c_translation();
    for j in 1..=n_blocks as i64 {
        let g = c.pow(-j);
        let ok = m.columns.iter().all(|v| isometry_invariance_spotcheck(&g, v, &n));
        rep.push(format!("pairing n . m_i preserved under c^-{j}"), ok, "");
        let moved = m.map("c^-j M", |v| lorentz_action(&g, v));
        rep.push(format!("c^-{j} moves M to null vectors"), moved.is_ok(), "");
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrices_load() {
        let (m, n) = load_mn();
        assert_eq!(*m.col(1), LorentzVector::from_pairs([(2, 0), (0, 0), (0, 0), (2, 0)]));
        assert_eq!(*n.col(1), LorentzVector::from_pairs([(0, 1), (0, 0), (0, 0), (0, 1)]));
        assert_eq!(m.columns.len() + n.columns.len(), 18);
        assert!(m.columns.iter().chain(&n.columns).all(|v| lorentz_inner(v, v).is_zero()));
    }

    #[test]
    fn coplanarity() {
        let (m, n) = load_mn();
        assert!(coplanarity_check(&normal_n(), &m));
        assert!(coplanarity_check(&normal_n().scale(&RealQuad::sqrt2()), &n));
        assert!(!coplanarity_check(&normal_n(), &n));
        assert!(coplanarity_values(&normal_n(), &n).iter().all(|v| *v == RealQuad::new(rat(0, 1), rat(1, 2))));
    }

    #[test]
    fn witnesses() {
        let ws = convexity_witnesses();
        let vals: Vec<_> = ws.iter().map(|w| w.value.clone()).collect();
        assert_eq!(vals, vec![q(5, 0), q(3, 0), q(3, 0), q(2, 1)]);
        assert!(ws.iter().all(ConvexityWitness::passes));
    }

    #[test]
    fn printed_octahedron_vector_is_not_null() {
        // (2+2 sqrt2, 0, -2-2 sqrt2, 4+4 sqrt2) as printed
        let w = LorentzVector::from_pairs([(2, 2), (0, 0), (-2, -2), (4, 4)]);
        assert!(!w.is_null());
        assert_eq!(normal_n().dot(&w), q(2, 2));
    }

    #[test]
    fn h_places_the_octahedron_across_the_triangle() {
        let (m, _) = load_mn();
        let (h, hn) = octahedron_across_triangle().unwrap();
        assert!(h.is_preserving());
        assert_eq!(hn.col(1), m.col(1));
        assert_eq!(*hn.col(4), LorentzVector::from_pairs([(2, 2), (0, 0), (-2, -2), (4, 2)]));
        let mut all = m.clone();
        all.columns.extend(hn.columns[3..].iter().cloned());
        assert!(is_face(&m, &[1, 9, 4]));
        // with the octahedron's far vertices included the triangle separates the two tiles
        assert!(!is_face(&all, &[1, 9, 4]));
    }

    #[test]
    fn faces_of_m_and_n() {
        let (m, n) = load_mn();
        assert!(is_face(&m, &[1, 2, 3, 4]));
        assert!(is_face(&m, &[1, 9, 4]));
        assert!(!is_face(&m, &[1, 2, 3]));
        assert!(is_face(&n, &[1, 2, 3]));
        assert!(!is_face(&n, &[1, 4, 2]));
    }

    #[test]
    fn invariance_spot_checks() {
        let t = crate::moebius::builtin_generators();
        let (m, _) = load_mn();
        let n = normal_n();
        assert!(isometry_invariance_spotcheck(&ExtendedMoebius::identity(), m.col(1), &n));
        assert!(isometry_invariance_spotcheck(&t["c"], m.col(1), &n));
        assert!(isometry_invariance_spotcheck(&t["a0"], m.col(5), &n));
        assert!(isometry_invariance_spotcheck(&t["r"], m.col(7), &n));
    }

    #[test]
    fn full_report_passes() {
        let rep = canonicity_report(3);
        assert!(rep.passed(), "{rep}");
    }
}
