use std::collections::BTreeSet;

use num_complex::Complex64;
use proptest::prelude::*;

use commensurability::bloch::{canonical_parameter, d2};
use commensurability::cusp_moduli::{apply_integer_matrix, pgl2q_equivalent, CuspParameter};
use commensurability::kleinian::{
    brute_force_orbit, isometry_classify, psl2z_table, psl2z_word, IsometryVerdict, MutationWord,
};
use commensurability::moebius::{ExtendedMoebius, Point};
use commensurability::numfield::{rat, Nf};
use commensurability::polyhedra::{hull_faces, p1_vertices};

fn nf() -> impl Strategy<Value = Nf> {
    (-9i64..=9, -9i64..=9, -9i64..=9, -9i64..=9, 1i64..=6)
        .prop_map(|(a, b, c, d, q)| Nf::new(rat(a, q), rat(b, q), rat(c, q), rat(d, q)))
}

fn upper() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, 0.01..3.0f64).prop_map(|(a, b)| Complex64::new(a, b))
}

fn sl2z() -> impl Strategy<Value = ExtendedMoebius> {
    // products of T^k and S give every element
    prop::collection::vec(-6i64..=6, 1..6).prop_map(|ks| {
        let s = ExtendedMoebius::from_ints(0, -1, 1, 0);
        let mut x = ExtendedMoebius::identity();
        for k in ks {
            x = x.compose(&ExtendedMoebius::from_ints(1, k, 0, 1)).compose(&s);
        }
        x
    })
}

fn word(x: &[u8]) -> MutationWord {
    MutationWord::new(x.to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn field_inverse(z in nf()) {
        prop_assume!(!z.is_zero());
        prop_assert!((&z * &z.inv().unwrap()).is_one());
    }

    #[test]
    fn sigma2_is_a_ring_map(z in nf(), w in nf()) {
        prop_assert_eq!((&z * &w).sigma2(), &z.sigma2() * &w.sigma2());
        prop_assert_eq!((&z + &w).sigma2(), &z.sigma2() + &w.sigma2());
    }

    #[test]
    fn five_term(x in upper(), y in upper()) {
        prop_assume!((x - y).norm() > 1e-3);
        let one = Complex64::new(1.0, 0.0);
        let s = d2(x).unwrap() - d2(y).unwrap() + d2(y / x).unwrap()
            - d2((one - x.inv()) / (one - y.inv())).unwrap()
            + d2((one - x) / (one - y)).unwrap();
        prop_assert!(s.abs() < 1e-9, "{}", s);
    }

    #[test]
    fn d2_symmetries(z in upper()) {
        let v = d2(z).unwrap();
        let one = Complex64::new(1.0, 0.0);
        prop_assert!((d2(z.conj()).unwrap() + v).abs() < 1e-10);
        prop_assert!((d2(z.inv()).unwrap() + v).abs() < 1e-10);
        prop_assert!((d2(one - z).unwrap() + v).abs() < 1e-10);
        prop_assert!((d2(one - z.inv()).unwrap() - v).abs() < 1e-10);
        prop_assert!((d2((one - z).inv()).unwrap() - v).abs() < 1e-10);
    }

    #[test]
    fn canonical_parameter_is_orbit_invariant(z in nf()) {
        let one = Nf::one();
        prop_assume!(!z.is_zero() && z != one);
        let k = canonical_parameter(&z).unwrap();
        let z2 = &one - &z.inv().unwrap();
        let z3 = (&one - &z).inv().unwrap();
        prop_assert_eq!(canonical_parameter(&z2).unwrap(), k.clone());
        prop_assert_eq!(canonical_parameter(&z3).unwrap(), k);
    }

    #[test]
    fn psl2z_round_trip(x in sl2z()) {
        let w = psl2z_word(&x).unwrap();
        let y = psl2z_table().evaluate(&w).unwrap();
        prop_assert!(y.projectively_equal(&x), "{} vs {}", w, x);
    }

    #[test]
    fn isometry_matches_orbit(i in prop::collection::vec(0u8..2, 2..8), seed in prop::collection::vec(0u8..2, 8)) {
        let i = word(&i);
        let j = word(&seed[..i.len()]);
        let iso = isometry_classify(&i, &j).unwrap() == IsometryVerdict::Isometric;
        prop_assert_eq!(iso, brute_force_orbit(&i).contains(&j));
    }

    #[test]
    fn modulus_rescaling(q1 in 1i64..20, q2 in -20i64..20, num in 1i64..9, den in 1i64..9) {
        let z = CuspParameter::new(rat(q1, 1), rat(q2, 1)).unwrap();
        // (num 0; 0 den) scales by a rational
        let w = apply_integer_matrix([num, 0, 0, den], &z).unwrap();
        prop_assert!(pgl2q_equivalent(&z, &w).unwrap());
        // z -> -1/z is in PGL2(Z) as well
        let v = apply_integer_matrix([0, -1, 1, 0], &z).unwrap();
        prop_assert!(pgl2q_equivalent(&z, &v).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hull_is_isometry_invariant(g in sl2z()) {
        let vs = p1_vertices();
        let moved: Vec<Point> = vs.iter().map(|p| g.apply(p)).collect();
        let a = hull_faces(vs).unwrap();
        let b = hull_faces(moved).unwrap();
        // vertex order is kept, so the face vertex sets must agree
        let faces = |p: &commensurability::polyhedra::IdealPolyhedron| {
            p.faces.iter().map(|f| f.vertex_set()).collect::<BTreeSet<_>>()
        };
        prop_assert_eq!(faces(&a), faces(&b));
    }
}
