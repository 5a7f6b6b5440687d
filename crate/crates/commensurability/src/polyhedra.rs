//! Ideal polyhedra in the upper half-space: hull reconstruction from ideal vertices,
//! checkerings, internal face pairings and the cusp annuli they produce.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::geometry::{cross3, HermitianForm, HoroData, Hyperplane};
use crate::moebius::{r_reflection, ExtendedMoebius, Point};
use crate::numfield::{rat, Nf, RealQuad};
use crate::report::Report;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FaceKind {
    Internal,
    External,
}

impl FaceKind {
    fn other(self) -> Self {
        match self {
            FaceKind::Internal => FaceKind::External,
            FaceKind::External => FaceKind::Internal,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Face {
    /// Vertex indices in cyclic order around the face.
    pub cycle: Vec<usize>,
    pub plane: Hyperplane,
    #[serde(skip)]
    form: HermitianForm,
    /// Sign of `form` at the vertices off the face.
    #[serde(skip)]
    inner_sign: i8,
}

impl Face {
    pub fn vertex_set(&self) -> BTreeSet<usize> {
        self.cycle.iter().copied().collect()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.cycle.contains(&v)
    }

    /// The two vertices adjacent to `v` along the face boundary.
    pub fn neighbours_of(&self, v: usize) -> Option<(usize, usize)> {
        let k = self.cycle.len();
        let i = self.cycle.iter().position(|&u| u == v)?;
        Some((self.cycle[(i + k - 1) % k], self.cycle[(i + 1) % k]))
    }

    pub fn side_of(&self, p: &Point) -> i8 {
        sign_on_circle(&self.form, p)
    }

    pub fn inner_sign(&self) -> i8 {
        self.inner_sign
    }

    fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let k = self.cycle.len();
        (0..k).map(move |i| {
            let (a, b) = (self.cycle[i], self.cycle[(i + 1) % k]);
            (a.min(b), a.max(b))
        })
    }
}

/// A convex ideal polyhedron given by its ideal vertices and supporting planes.
#[derive(Debug, Clone, Serialize)]
pub struct IdealPolyhedron {
    pub vertices: Vec<Point>,
    pub faces: Vec<Face>,
    pub checkering: Option<Vec<FaceKind>>,
}

/// `(|z|^2, 2x, 2y, 1)`, or `(1, 0, 0, 0)` for oo: the form `(a, b, d)` vanishes at `z` iff
/// this row is orthogonal to `(a, Re b, Im b, d)`.
fn circle_row(p: &Point) -> [RealQuad; 4] {
    match p {
        Point::Infinity => [RealQuad::one(), RealQuad::zero(), RealQuad::zero(), RealQuad::zero()],
        Point::Finite(z) => {
            let two = RealQuad::from_ints(2, 0);
            [z.abs2(), &two * z.re(), &two * z.im(), RealQuad::one()]
        }
    }
}

fn circle_through(p: &Point, q: &Point, r: &Point) -> Result<HermitianForm> {
    let n = cross3(&circle_row(p), &circle_row(q), &circle_row(r));
    if n.iter().all(RealQuad::is_zero) {
        return Err(Error::Degenerate("repeated vertex".into()));
    }
    let [a, b1, b2, d] = n;
    Ok(HermitianForm::new(a, Nf::from_parts(b1, b2), d))
}

fn sign_on_circle(f: &HermitianForm, p: &Point) -> i8 {
    f.sign_at(p)
}

/// Orders concyclic points cyclically: send the first to oo, then sort along the line.
fn cyclic_order(points: &[Point], idx: &[usize]) -> Vec<usize> {
    let v0 = &points[idx[0]];
    let send = |p: &Point| -> Nf {
        match (v0, p) {
            (Point::Infinity, Point::Finite(z)) => z.clone(),
            (Point::Finite(c), Point::Finite(z)) => (z - c).inv().expect("distinct points"),
            (Point::Finite(_), Point::Infinity) => Nf::zero(),
            _ => unreachable!("v0 appears once"),
        }
    };
    let rest: Vec<(usize, Nf)> = idx[1..].iter().map(|&i| (i, send(&points[i]))).collect();
    let base = rest[0].1.clone();
    let dir = &rest[1].1 - &base;
    let key = |w: &Nf| (&(w - &base) * &dir.conj()).re().clone();
    let mut rest = rest;
    rest.sort_by_key(|x| key(&x.1));
    std::iter::once(idx[0]).chain(rest.into_iter().map(|(i, _)| i)).collect()
}

/// Reconstructs the faces of the ideal polyhedron with the given vertices.
///
/// Three vertices span a face iff every other vertex lies strictly on one side of the circle
/// through them (or on it, when the face has more than three vertices).
pub fn hull_faces(vertices: Vec<Point>) -> Result<IdealPolyhedron> {
    let n = vertices.len();
    if n < 4 {
        return Err(Error::Degenerate(format!("{n} vertices do not bound a polyhedron")));
    }
    for i in 0..n {
        for j in i + 1..n {
            if vertices[i] == vertices[j] {
                return Err(Error::Degenerate(format!("vertex {} is repeated", vertices[i])));
            }
        }
    }
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut faces = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let form = circle_through(&vertices[i], &vertices[j], &vertices[k])?;
                let signs: Vec<i8> = vertices.iter().map(|p| sign_on_circle(&form, p)).collect();
                let on: Vec<usize> = (0..n).filter(|&m| signs[m] == 0).collect();
                if on.len() == n {
                    return Err(Error::Degenerate("all vertices lie on one circle".into()));
                }
                let off: BTreeSet<i8> = signs.iter().copied().filter(|&s| s != 0).collect();
                if off.len() != 1 || seen.contains(&on) {
                    continue;
                }
                seen.insert(on.clone());
                let inner_sign = *off.iter().next().expect("nonempty");
                let plane = Hyperplane::from_form(&form)?;
                let cycle = cyclic_order(&vertices, &on);
                faces.push(Face { cycle, plane, form, inner_sign });
            }
        }
    }
    let p = IdealPolyhedron { vertices, faces, checkering: None };
    for v in 0..n {
        let deg = p.faces_at(v).len();
        if deg < 3 {
            return Err(Error::Degenerate(format!("vertex {} lies on {deg} faces", p.vertices[v])));
        }
    }
    Ok(p)
}

impl IdealPolyhedron {
    pub fn vertex_index(&self, p: &Point) -> Option<usize> {
        self.vertices.iter().position(|q| q == p)
    }

    pub fn faces_at(&self, v: usize) -> Vec<usize> {
        (0..self.faces.len()).filter(|&f| self.faces[f].contains(v)).collect()
    }

    pub fn face_with_vertices(&self, set: &BTreeSet<usize>) -> Option<usize> {
        self.faces.iter().position(|f| f.vertex_set() == *set)
    }

    /// The face whose ideal vertices are exactly the given points.
    pub fn face_through(&self, pts: &[Point]) -> Option<usize> {
        let set = pts.iter().map(|p| self.vertex_index(p)).collect::<Option<BTreeSet<_>>>()?;
        self.face_with_vertices(&set)
    }

    pub fn kind(&self, f: usize) -> Option<FaceKind> {
        self.checkering.as_ref().map(|c| c[f])
    }

    pub fn internal_faces(&self) -> Vec<usize> {
        (0..self.faces.len()).filter(|&f| self.kind(f) == Some(FaceKind::Internal)).collect()
    }

    /// Faces sharing an edge with `f`.
    pub fn adjacent_faces(&self, f: usize) -> Vec<usize> {
        let edges: BTreeSet<_> = self.faces[f].edges().collect();
        (0..self.faces.len())
            .filter(|&g| g != f && self.faces[g].edges().any(|e| edges.contains(&e)))
            .collect()
    }

    pub fn face_name(&self, f: usize) -> String {
        let names: Vec<String> = self.faces[f].cycle.iter().map(|&v| self.vertices[v].to_string()).collect();
        format!("[{}]", names.join(", "))
    }

    /// Colours the faces so that faces sharing an edge get different kinds, starting from
    /// `seed`. Fails if the face graph is not bipartite.
    pub fn checkered(mut self, seed: usize, kind: FaceKind) -> Result<Self> {
        let mut colour: Vec<Option<FaceKind>> = vec![None; self.faces.len()];
        colour[seed] = Some(kind);
        let mut queue = VecDeque::from([seed]);
        while let Some(f) = queue.pop_front() {
            let c = colour[f].expect("queued faces are coloured");
            for g in self.adjacent_faces(f) {
                match colour[g] {
                    None => {
                        colour[g] = Some(c.other());
                        queue.push_back(g);
                    }
                    Some(d) if d == c => {
                        return Err(Error::Inconsistent(format!(
                            "faces {} and {} share an edge and a colour",
                            self.face_name(f),
                            self.face_name(g)
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        let colour = colour
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Inconsistent("face graph is disconnected".into()))?;
        self.checkering = Some(colour);
        Ok(self)
    }

    /// Indices of the images of the vertices under `g`, if they are all vertices.
    pub fn image_indices(&self, g: &ExtendedMoebius) -> Option<Vec<usize>> {
        self.vertices.iter().map(|p| self.vertex_index(&g.apply(p))).collect()
    }

    pub fn is_symmetry(&self, g: &ExtendedMoebius) -> bool {
        match self.image_indices(g) {
            Some(img) => img.iter().collect::<BTreeSet<_>>().len() == img.len(),
            None => false,
        }
    }

    /// All isometries preserving the vertex set (both orientations).
    pub fn symmetries(&self) -> Vec<ExtendedMoebius> {
        let base = &self.faces[0].cycle;
        let src: Vec<&Point> = base[..3].iter().map(|&v| &self.vertices[v]).collect();
        let src_bar: Vec<Point> = src.iter().map(|p| p.conj()).collect();
        let mut out: Vec<ExtendedMoebius> = Vec::new();
        for face in self.faces.iter().filter(|f| f.cycle.len() == base.len()) {
            let k = face.cycle.len();
            for start in 0..k {
                for step in [1, k - 1] {
                    let dst: Vec<&Point> =
                        (0..3).map(|j| &self.vertices[face.cycle[(start + j * step) % k]]).collect();
                    let dst = [dst[0], dst[1], dst[2]];
                    let mut candidates = Vec::new();
                    if let Ok(g) = ExtendedMoebius::through_triples([src[0], src[1], src[2]], dst) {
                        candidates.push(g);
                    }
                    if let Ok(g) = ExtendedMoebius::through_triples([&src_bar[0], &src_bar[1], &src_bar[2]], dst) {
                        candidates.push(g.compose(&r_reflection()));
                    }
                    for g in candidates {
                        if self.is_symmetry(&g) && !out.contains(&g) {
                            out.push(g);
                        }
                    }
                }
            }
        }
        out
    }

    /// Horospheres at every vertex, obtained from the one of height `height` at oo by
    /// symmetries of the polyhedron.
    pub fn symmetric_horospheres(&self, height: RealQuad) -> Result<Vec<HoroData>> {
        let inf = self
            .vertex_index(&Point::Infinity)
            .ok_or_else(|| Error::Precondition("oo is not a vertex".into()))?;
        let h_inf = HoroData::new(Point::Infinity, height)?;
        let syms = self.symmetries();
        (0..self.vertices.len())
            .map(|v| {
                syms.iter()
                    .filter(|g| self.vertex_index(&g.apply(&self.vertices[inf])) == Some(v))
                    .find_map(|g| h_inf.apply(g).ok())
                    .ok_or_else(|| {
                        Error::Precondition(format!("no symmetry takes oo to {}", self.vertices[v]))
                    })
            })
            .collect()
    }

    /// True iff every symmetry carries the family to itself.
    pub fn horospheres_are_invariant(&self, family: &[HoroData]) -> bool {
        self.symmetries().iter().all(|g| {
            family.iter().all(|h| match (h.apply(g), self.vertex_index(&g.apply(&h.center))) {
                (Ok(img), Some(w)) => img == family[w],
                (Err(Error::NotInField(_)), Some(_)) => true,
                _ => false,
            })
        })
    }
}

/// One side of a horospherical cross-section.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SectionSide {
    pub face: usize,
    pub kind: Option<FaceKind>,
    pub length: RealQuad,
}

/// The Euclidean polygon `h_v` cut out by the faces through `v`, with sides in cyclic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossSection {
    pub vertex: usize,
    pub sides: Vec<SectionSide>,
}

impl CrossSection {
    pub fn sides_of(&self, kind: FaceKind) -> Vec<&SectionSide> {
        self.sides.iter().filter(|s| s.kind == Some(kind)).collect()
    }

    pub fn side_on(&self, face: usize) -> Option<&SectionSide> {
        self.sides.iter().find(|s| s.face == face)
    }
}

/// `z -> -1/(z - v)`, taking `v` to oo.
fn send_to_infinity(v: &Point) -> ExtendedMoebius {
    match v {
        Point::Infinity => ExtendedMoebius::identity(),
        Point::Finite(z) => ExtendedMoebius::preserving(Nf::zero(), Nf::from(-1), Nf::one(), -z),
    }
}

/// The polygon `scale ∩ P` at vertex `v`, measured on the horosphere.
pub fn horoball_cross_section(p: &IdealPolyhedron, v: usize, scale: &HoroData) -> Result<CrossSection> {
    if scale.center != p.vertices[v] {
        return Err(Error::Precondition(format!("horosphere is not centred at {}", p.vertices[v])));
    }
    let mu = send_to_infinity(&p.vertices[v]);
    let height = scale.apply(&mu)?.scale;
    let w = |u: usize| -> Nf {
        match mu.apply(&p.vertices[u]) {
            Point::Finite(z) => z,
            Point::Infinity => unreachable!("only v goes to oo"),
        }
    };
    let faces = p.faces_at(v);
    // walk around v: the next face contains the edge (v, next neighbour)
    let mut order = vec![faces[0]];
    let mut prev_nb = p.faces[faces[0]].neighbours_of(v).expect("v on face").0;
    while order.len() < faces.len() {
        let last = *order.last().expect("nonempty");
        let (a, b) = p.faces[last].neighbours_of(v).expect("v on face");
        let next_nb = if a == prev_nb { b } else { a };
        let next = faces
            .iter()
            .copied()
            .find(|&f| !order.contains(&f) && p.faces[f].contains(next_nb))
            .ok_or_else(|| Error::Inconsistent(format!("faces around {} do not close up", p.vertices[v])))?;
        prev_nb = next_nb;
        order.push(next);
    }
    let sides = order
        .into_iter()
        .map(|f| {
            let (a, b) = p.faces[f].neighbours_of(v).expect("v on face");
            let d2 = (&w(a) - &w(b)).abs2();
            let d = d2.sqrt().ok_or_else(|| Error::NotInField(d2.to_string()))?;
            Ok(SectionSide { face: f, kind: p.kind(f), length: d.checked_div(&height)? })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CrossSection { vertex: v, sides })
}

/// One isometry of a face pairing with the faces it matches.
#[derive(Debug, Clone, Serialize)]
pub struct PairingEntry {
    pub name: String,
    pub isometry: ExtendedMoebius,
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FacePairing {
    pub entries: Vec<PairingEntry>,
}

/// Internal faces `f` with `g(f)` an internal face, in the order of `p.faces`.
fn matched_faces(p: &IdealPolyhedron, g: &ExtendedMoebius) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for f in p.internal_faces() {
        let img: Option<BTreeSet<usize>> =
            p.faces[f].cycle.iter().map(|&v| p.vertex_index(&g.apply(&p.vertices[v]))).collect();
        if let Some(t) = img.and_then(|s| p.face_with_vertices(&s)) {
            if p.kind(t) == Some(FaceKind::Internal) && image_beyond(p, g, f, t) {
                out.push((f, t));
            }
        }
    }
    out
}

/// The images of the vertices off `source` all lie in the closed half-space across `target`.
fn image_beyond(p: &IdealPolyhedron, g: &ExtendedMoebius, source: usize, target: usize) -> bool {
    let face = &p.faces[target];
    (0..p.vertices.len())
        .filter(|&v| !p.faces[source].contains(v))
        .all(|v| face.side_of(&g.apply(&p.vertices[v])) != face.inner_sign())
}

impl FacePairing {
    /// Attaches each named isometry to the internal face it carries onto another internal face
    /// with the polyhedron landing on the far side.
    pub fn derive(p: &IdealPolyhedron, isometries: Vec<(String, ExtendedMoebius)>) -> Result<Self> {
        if p.checkering.is_none() {
            return Err(Error::Precondition("polyhedron is not checkered".into()));
        }
        let entries = isometries
            .into_iter()
            .map(|(name, g)| {
                let m = matched_faces(p, &g);
                match m.as_slice() {
                    [(s, t)] => Ok(PairingEntry { name, isometry: g, source: *s, target: *t }),
                    [] => Err(Error::Inconsistent(format!("{name} pairs no internal faces"))),
                    _ => Err(Error::Inconsistent(format!("{name} pairs {} faces", m.len()))),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FacePairing { entries })
    }

    /// Each generator together with its inverse.
    pub fn from_generators(p: &IdealPolyhedron, gens: &[(&str, ExtendedMoebius)]) -> Result<Self> {
        let mut named = Vec::new();
        for (n, g) in gens {
            named.push((n.to_string(), g.clone()));
            named.push((format!("{n}^-1"), g.inverse()));
        }
        Self::derive(p, named)
    }

    pub fn from_source(&self, face: usize) -> Option<&PairingEntry> {
        self.entries.iter().find(|e| e.source == face)
    }
}

/// Checks that `fp` is an internal face pairing of `p`; failures are listed in the report.
pub fn verify_internal_face_pairing(p: &IdealPolyhedron, fp: &FacePairing) -> Report {
    let mut rep = Report::new("internal face pairing");
    if p.checkering.is_none() {
        rep.push("polyhedron is checkered", false, "no checkering");
        return rep;
    }
    for e in &fp.entries {
        let src = &p.faces[e.source];
        let img: Option<BTreeSet<usize>> =
            src.cycle.iter().map(|&v| p.vertex_index(&e.isometry.apply(&p.vertices[v]))).collect();
        rep.check(format!("{}: source {} is internal", e.name, p.face_name(e.source)), p.kind(e.source) == Some(FaceKind::Internal));
        rep.check(format!("{}: target {} is internal", e.name, p.face_name(e.target)), p.kind(e.target) == Some(FaceKind::Internal));
        rep.check(
            format!("{}: maps {} onto {}", e.name, p.face_name(e.source), p.face_name(e.target)),
            img == Some(p.faces[e.target].vertex_set()),
        );
        rep.check(
            format!("{}: image of P lies across {}", e.name, p.face_name(e.target)),
            image_beyond(p, &e.isometry, e.source, e.target),
        );
        let inv = e.isometry.inverse();
        let closed = fp
            .entries
            .iter()
            .any(|o| o.source == e.target && o.target == e.source && o.isometry == inv);
        rep.check(format!("{}: inverse pairs {} back", e.name, p.face_name(e.target)), closed);
    }
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for e in &fp.entries {
        *count.entry(e.source).or_default() += 1;
    }
    for f in p.internal_faces() {
        let c = count.get(&f).copied().unwrap_or(0);
        rep.push(format!("internal face {} is a source exactly once", p.face_name(f)), c == 1, format!("{c} times"));
    }
    rep
}

/// A Euclidean annulus assembled from horospherical rectangles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CuspAnnulus {
    pub label: Option<String>,
    pub core_length: RealQuad,
    pub width: RealQuad,
    pub modulus: RealQuad,
    /// `(vertex, copy)`: the rectangle at `vertex` in the `copy`-th translate of `P` met by
    /// the walk along the core.
    pub cycle: Vec<(usize, usize)>,
}

impl CuspAnnulus {
    pub fn rectangles(&self) -> usize {
        self.cycle.len()
    }

    pub fn contains_vertex(&self, v: usize) -> bool {
        self.cycle.iter().any(|&(u, _)| u == v)
    }

    /// The double across one boundary component.
    pub fn doubled(&self) -> CuspAnnulus {
        let two = RealQuad::from_ints(2, 0);
        CuspAnnulus {
            label: self.label.as_ref().map(|l| format!("D{l}")),
            core_length: self.core_length.clone(),
            width: &self.width * &two,
            modulus: &self.modulus * &two,
            cycle: self.cycle.clone(),
        }
    }
}

impl fmt::Display for CuspAnnulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} rectangles, core {}, width {}, modulus {}",
            self.label.as_deref().unwrap_or("?"),
            self.rectangles(),
            self.core_length,
            self.width,
            self.modulus
        )
    }
}

/// Checks that a section is a rectangle with opposite sides of equal kind and length.
fn rectangle_sides(s: &CrossSection) -> Result<(RealQuad, RealQuad)> {
    let ok = s.sides.len() == 4
        && (0..2).all(|i| s.sides[i].kind == s.sides[i + 2].kind && s.sides[i].length == s.sides[i + 2].length)
        && s.sides[0].kind != s.sides[1].kind;
    if !ok {
        return Err(Error::Inconsistent(format!("section at vertex {} is not a checkered rectangle", s.vertex)));
    }
    let int = s.sides_of(FaceKind::Internal)[0].length.clone();
    let ext = s.sides_of(FaceKind::External)[0].length.clone();
    Ok((int, ext))
}

/// Glues the horospherical rectangles along internal sides under the pairing and returns
/// the annuli, one per closed chain.
pub fn assemble_cusp_annuli(p: &IdealPolyhedron, fp: &FacePairing, horospheres: &[HoroData]) -> Result<Vec<CuspAnnulus>> {
    let n = p.vertices.len();
    if horospheres.len() != n {
        return Err(Error::Precondition("one horosphere per vertex needed".into()));
    }
    let sections = (0..n)
        .map(|v| horoball_cross_section(p, v, &horospheres[v]))
        .collect::<Result<Vec<_>>>()?;
    let dims = sections.iter().map(rectangle_sides).collect::<Result<Vec<_>>>()?;
    let internal_at = |v: usize| -> Vec<usize> {
        sections[v].sides_of(FaceKind::Internal).iter().map(|s| s.face).collect()
    };
    let mut done = vec![false; n];
    let mut out = Vec::new();
    for v0 in 0..n {
        if done[v0] {
            continue;
        }
        let start = (v0, internal_at(v0)[0]);
        let (mut v, mut entered) = start;
        let mut cycle = Vec::new();
        let mut core = RealQuad::zero();
        loop {
            if cycle.len() > n {
                return Err(Error::Inconsistent(format!("walk from vertex {v0} does not close")));
            }
            done[v] = true;
            cycle.push((v, cycle.len()));
            core += &dims[v].1;
            let ints = internal_at(v);
            let exit = if ints[0] == entered { ints[1] } else { ints[0] };
            let e = fp
                .from_source(exit)
                .ok_or_else(|| Error::Inconsistent(format!("face {} is not paired", p.face_name(exit))))?;
            let w = p
                .vertex_index(&e.isometry.apply(&p.vertices[v]))
                .ok_or_else(|| Error::Inconsistent(format!("{} moves a vertex off P", e.name)))?;
            if horospheres[v].apply(&e.isometry)? != horospheres[w] {
                return Err(Error::Inconsistent(format!("{} does not match the horospheres at {} and {}", e.name, p.vertices[v], p.vertices[w])));
            }
            let here = sections[v].side_on(exit).map(|s| &s.length);
            let there = sections[w].side_on(e.target).map(|s| &s.length);
            if here.is_none() || here != there {
                return Err(Error::Inconsistent(format!("{} glues sides of different lengths", e.name)));
            }
            v = w;
            entered = e.target;
            if (v, entered) == start {
                break;
            }
        }
        let width = dims[v0].0.clone();
        if cycle.iter().any(|&(u, _)| dims[u].0 != width) {
            return Err(Error::Inconsistent("annulus width varies".into()));
        }
        let modulus = width.checked_div(&core)?;
        out.push(CuspAnnulus { label: None, core_length: core, width, modulus, cycle });
    }
    Ok(out)
}

/// Names each annulus after the anchor vertex it contains; the last unmatched one gets
/// `rest`. Fails if an anchor is missing or the naming is ambiguous.
pub fn label_annuli(p: &IdealPolyhedron, annuli: &mut [CuspAnnulus], anchors: &[(&str, Point)], rest: Option<&str>) -> Result<()> {
    for (name, pt) in anchors {
        let v = p
            .vertex_index(pt)
            .ok_or_else(|| Error::Precondition(format!("{pt} is not a vertex")))?;
        let a = annuli
            .iter_mut()
            .find(|a| a.contains_vertex(v))
            .ok_or_else(|| Error::Inconsistent(format!("no annulus contains {pt}")))?;
        if a.label.is_some() {
            return Err(Error::Inconsistent(format!("{pt} lies in the already labelled {}", a.label.as_deref().unwrap_or(""))));
        }
        a.label = Some(name.to_string());
    }
    let unlabelled: Vec<_> = annuli.iter_mut().filter(|a| a.label.is_none()).collect();
    match (unlabelled.len(), rest) {
        (0, _) => Ok(()),
        (1, Some(r)) => {
            unlabelled.into_iter().for_each(|a| a.label = Some(r.to_string()));
            Ok(())
        }
        (k, _) => Err(Error::Inconsistent(format!("{k} annuli left without a label"))),
    }
}

fn nf(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> Nf {
    Nf::new(rat(a.0, a.1), rat(b.0, b.1), rat(c.0, c.1), rat(d.0, d.1))
}

fn pt(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> Point {
    Point::Finite(nf(a, b, c, d))
}

const Z: (i64, i64) = (0, 1);
const ONE: (i64, i64) = (1, 1);

/// `{oo, 0, 1, i, 1+i, (1+i)/2}`.
pub fn p1_vertices() -> Vec<Point> {
    vec![
        Point::Infinity,
        pt(Z, Z, Z, Z),
        pt(ONE, Z, Z, Z),
        pt(Z, Z, ONE, Z),
        pt(ONE, Z, ONE, Z),
        pt((1, 2), Z, (1, 2), Z),
    ]
}

/// The regular ideal octahedron, checkered with the face `{0, 1, oo}` external.
pub fn p1() -> IdealPolyhedron {
    let p = hull_faces(p1_vertices()).expect("octahedron");
    let a = p.face_through(&face_a()).expect("face {0, 1, oo}");
    p.checkered(a, FaceKind::External).expect("octahedron is checkerable")
}

/// The face `{0, 1, oo}` shared by both polyhedra.
pub fn face_a() -> [Point; 3] {
    [pt(Z, Z, Z, Z), pt(ONE, Z, Z, Z), Point::Infinity]
}

/// Vertex labels of the cuboctahedron used as anchors.
pub fn p2_anchor_labels() -> Vec<Point> {
    vec![
        pt(Z, Z, Z, Z),
        pt(ONE, Z, Z, Z),
        pt(Z, Z, Z, (-1, 2)),
        pt(Z, Z, Z, (-1, 1)),
        pt(ONE, Z, Z, (-1, 1)),
        pt(ONE, Z, Z, (-1, 2)),
    ]
}

/// Cuboctahedron vertices: the light-cone columns of `M` sent to the upper half-space, then
/// moved by an isometry taking a triangle to `{0, 1, oo}` so that the anchor labels appear.
///
/// Every such isometry gives the same vertex set; a second candidate set is an error.
pub fn p2_vertices() -> Result<Vec<Point>> {
    let (m, _) = crate::tiling::load_mn();
    let pts = m.ideal_points();
    let hull = hull_faces(pts.clone())?;
    let anchors = p2_anchor_labels();
    let fa = face_a();
    let targets = [&fa[0], &fa[1], &fa[2]];
    let mut found: Vec<Vec<Point>> = Vec::new();
    for f in hull.faces.iter().filter(|f| f.cycle.len() == 3) {
        let c = &f.cycle;
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let src = perm.map(|i| pts[c[i]].clone());
            let src_bar = src.clone().map(|p| p.conj());
            let mut maps = vec![ExtendedMoebius::through_triples([&src[0], &src[1], &src[2]], targets)?];
            maps.push(ExtendedMoebius::through_triples([&src_bar[0], &src_bar[1], &src_bar[2]], targets)?.compose(&r_reflection()));
            for g in maps {
                let img: Vec<Point> = pts.iter().map(|p| g.apply(p)).collect();
                if anchors.iter().all(|a| img.contains(a)) {
                    let set: BTreeSet<String> = img.iter().map(|p| p.to_string()).collect();
                    if !found.iter().any(|f| f.iter().map(|p| p.to_string()).collect::<BTreeSet<_>>() == set) {
                        found.push(img);
                    }
                }
            }
        }
    }
    match found.len() {
        1 => Ok(found.pop().expect("one")),
        0 => Err(Error::Inconsistent("no embedding of M matches the anchor labels".into())),
        k => Err(Error::Inconsistent(format!("{k} distinct embeddings match the anchor labels"))),
    }
}

/// The right-angled ideal cuboctahedron, checkered with the triangles external.
pub fn p2() -> Result<IdealPolyhedron> {
    let p = hull_faces(p2_vertices()?)?;
    let tri = p
        .faces
        .iter()
        .position(|f| f.cycle.len() == 3)
        .ok_or_else(|| Error::Inconsistent("no triangular face".into()))?;
    let p = p.checkered(tri, FaceKind::External)?;
    let ok = p.faces.iter().enumerate().all(|(i, f)| (f.cycle.len() == 3) == (p.kind(i) == Some(FaceKind::External)));
    if !ok {
        return Err(Error::Inconsistent("triangles are not all external".into()));
    }
    Ok(p)
}

fn gens(names: &[&'static str]) -> Vec<(&'static str, ExtendedMoebius)> {
    let t = crate::moebius::builtin_generators();
    names.iter().map(|n| (*n, t[n].clone())).collect()
}

/// `{s, t}` and their inverses on the octahedron.
pub fn p1_pairing(p: &IdealPolyhedron) -> Result<FacePairing> {
    FacePairing::from_generators(p, &gens(&["s", "t"]))
}

/// `{f, g, h}` and their inverses on the cuboctahedron.
pub fn p2_pairing(p: &IdealPolyhedron) -> Result<FacePairing> {
    FacePairing::from_generators(p, &gens(&["f", "g", "h"]))
}

/// The two cusp annuli of the octahedron quotient, labelled `A1 ∋ 0` and `A2`.
pub fn p1_annuli() -> Result<Vec<CuspAnnulus>> {
    let p = p1();
    let fp = p1_pairing(&p)?;
    let horos = p.symmetric_horospheres(RealQuad::from_ints(2, 0))?;
    let mut a = assemble_cusp_annuli(&p, &fp, &horos)?;
    label_annuli(&p, &mut a, &[("A1", pt(Z, Z, Z, Z))], Some("A2"))?;
    a.sort_by(|x, y| x.label.cmp(&y.label));
    Ok(a)
}

/// The four cusp annuli of the cuboctahedron quotient: `B1 ∋ 0`, `B2 ∋ oo`,
/// `B3 ∋ 1 - i sqrt2/2` and `B4`.
pub fn p2_annuli() -> Result<Vec<CuspAnnulus>> {
    let p = p2()?;
    let fp = p2_pairing(&p)?;
    let horos = p.symmetric_horospheres(RealQuad::from_ints(2, 0))?;
    let mut a = assemble_cusp_annuli(&p, &fp, &horos)?;
    let anchors = [("B1", pt(Z, Z, Z, Z)), ("B2", Point::Infinity), ("B3", pt(ONE, Z, Z, (-1, 2)))];
    label_annuli(&p, &mut a, &anchors, Some("B4"))?;
    a.sort_by(|x, y| x.label.cmp(&y.label));
    Ok(a)
}

/// Face-pairing checks for both polyhedra plus the negative control.
pub fn face_pairing_report() -> Report {
    let mut rep = Report::new("face pairings");
    let p = p1();
    match p1_pairing(&p) {
        Ok(fp) => {
            let mut r = verify_internal_face_pairing(&p, &fp);
            r.title = "P1 with s, t".into();
            rep.absorb(r);
        }
        Err(e) => rep.push("P1 pairing", false, e.to_string()),
    }
    match FacePairing::from_generators(&p, &gens(&["s", "s"])) {
        Ok(fp) => {
            let r = verify_internal_face_pairing(&p, &fp);
            rep.push("P1 with s, s is rejected", !r.passed(), r.first_failure().map(|c| c.name.clone()).unwrap_or_default());
        }
        Err(e) => rep.push("P1 with s, s is rejected", true, e.to_string()),
    }
    match p2().and_then(|p| p2_pairing(&p).map(|fp| (p, fp))) {
        Ok((p, fp)) => {
            let mut r = verify_internal_face_pairing(&p, &fp);
            r.title = "P2 with f, g, h".into();
            rep.absorb(r);
        }
        Err(e) => rep.push("P2 pairing", false, e.to_string()),
    }
    rep
}
