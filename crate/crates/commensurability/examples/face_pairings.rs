//! Internal face pairings of the octahedron (by s, t) and the cuboctahedron (by f, g, h).

use commensurability::polyhedra::{face_pairing_report, p1, p2};

fn main() {
    let oct = p1();
    let cub = p2().expect("cuboctahedron");
    for (name, p) in [("P1", &oct), ("P2", &cub)] {
        let internal: Vec<String> = p.internal_faces().iter().map(|&f| p.face_name(f)).collect();
        println!("{name}: {} faces, internal {}", p.faces.len(), internal.join(" "));
    }
    println!("{}", face_pairing_report());
}
