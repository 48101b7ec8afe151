use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use alg2d::aut::automorphisms_closed_form;
use alg2d::canonical::{canonical_msc, is_admissible, CanonicalFamily, Regime};
use alg2d::der::{build_der_system, derivation_algebra, derivations_closed_form};
use alg2d::errata::Reading;
use alg2d::field::{Field, FieldSpec, FiniteField, Rationals};
use alg2d::msc::{
    is_automorphism, is_derivation, kron2, multiply, p_invariant, transform, Mat2, Msc, Vector2,
};
use alg2d::text::{parse_msc, render_msc};

fn gf(q: u64) -> FiniteField {
    FiniteField::new(FieldSpec::of_order(q).unwrap())
}

fn elem(q: u32) -> impl Strategy<Value = u32> {
    0..q
}

fn msc_strategy(q: u32) -> impl Strategy<Value = Msc<u32>> {
    prop::array::uniform8(elem(q)).prop_map(Msc::from_entries)
}

fn mat_strategy(q: u32) -> impl Strategy<Value = Mat2<u32>> {
    prop::array::uniform4(elem(q)).prop_map(Mat2::from_array)
}

fn gl_strategy(q: u64) -> impl Strategy<Value = Mat2<u32>> {
    let f = gf(q);
    mat_strategy(q as u32).prop_filter("invertible", move |g| g.is_invertible(&f))
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=5).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn action_law(a in msc_strategy(9), g in gl_strategy(9), h in gl_strategy(9)) {
        let f = gf(9);
        let lhs = transform(&f, &transform(&f, &a, &g).unwrap(), &h).unwrap();
        prop_assert_eq!(lhs, transform(&f, &a, &h.mul(&g, &f)).unwrap());
        prop_assert_eq!(transform(&f, &a, &Mat2::identity(&f)).unwrap(), a);
    }

    #[test]
    fn transform_is_a_basis_change(a in msc_strategy(7), g in gl_strategy(7),
                                   u in prop::array::uniform2(elem(7)), v in prop::array::uniform2(elem(7))) {
        let f = gf(7);
        let b = transform(&f, &a, &g).unwrap();
        let apply = |m: &Mat2<u32>, x: &Vector2<u32>| {
            let r = m.rows();
            Vector2::new(
                f.add(&f.mul(&r[0][0], &x.x1), &f.mul(&r[0][1], &x.x2)),
                f.add(&f.mul(&r[1][0], &x.x1), &f.mul(&r[1][1], &x.x2)),
            )
        };
        let (u, v) = (Vector2::new(u[0], u[1]), Vector2::new(v[0], v[1]));
        // g maps the product of A to the product of B.
        let lhs = apply(&g, &multiply(&f, &a, &u, &v));
        let rhs = multiply(&f, &b, &apply(&g, &u), &apply(&g, &v));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn product_is_bilinear(a in msc_strategy(5), u in prop::array::uniform2(elem(5)),
                           v in prop::array::uniform2(elem(5)), w in prop::array::uniform2(elem(5)), s in elem(5)) {
        let f = gf(5);
        let vec = |x: [u32; 2]| Vector2::new(x[0], x[1]);
        let add = |x: &Vector2<u32>, y: &Vector2<u32>| Vector2::new(f.add(&x.x1, &y.x1), f.add(&x.x2, &y.x2));
        let scale = |x: &Vector2<u32>| Vector2::new(f.mul(&s, &x.x1), f.mul(&s, &x.x2));
        let (u, v, w) = (vec(u), vec(v), vec(w));
        prop_assert_eq!(
            multiply(&f, &a, &add(&u, &w), &v),
            add(&multiply(&f, &a, &u, &v), &multiply(&f, &a, &w, &v))
        );
        prop_assert_eq!(multiply(&f, &a, &u, &scale(&v)), scale(&multiply(&f, &a, &u, &v)));
    }

    #[test]
    fn automorphisms_are_the_stabilizer(a in msc_strategy(4), g in gl_strategy(4)) {
        let f = gf(4);
        prop_assert_eq!(is_automorphism(&f, &a, &g), transform(&f, &a, &g).unwrap() == a);
    }

    #[test]
    fn p_covariance(a in msc_strategy(8), g in gl_strategy(8)) {
        let f = gf(8);
        let lhs = p_invariant(&f, &transform(&f, &a, &g).unwrap()).p_matrix;
        prop_assert_eq!(lhs, p_invariant(&f, &a).p_matrix.mul(&g.inverse(&f).unwrap(), &f));
    }

    #[test]
    fn kron_is_multiplicative(g in mat_strategy(5), h in mat_strategy(5), k in mat_strategy(5), l in mat_strategy(5)) {
        let f = gf(5);
        let m4 = |x: &[[u32; 4]; 4], y: &[[u32; 4]; 4]| -> [[u32; 4]; 4] {
            std::array::from_fn(|i| std::array::from_fn(|j| {
                (0..4).fold(0, |acc, t| f.add(&acc, &f.mul(&x[i][t], &y[t][j])))
            }))
        };
        prop_assert_eq!(
            m4(&kron2(&f, &g, &h), &kron2(&f, &k, &l)),
            kron2(&f, &g.mul(&k, &f), &h.mul(&l, &f))
        );
    }

    #[test]
    fn der_system_kernel_is_the_derivation_set(a in msc_strategy(3), d in mat_strategy(3)) {
        let f = gf(3);
        let sys = build_der_system(&f, &a);
        let zero = sys.apply(&f, &d).iter().all(|x| f.is_zero(x));
        prop_assert_eq!(zero, is_derivation(&f, &a, &d));
        prop_assert_eq!(derivation_algebra(&f, &a).contains(&f, &d), is_derivation(&f, &a, &d));
    }

    #[test]
    fn derivations_close_under_bracket(a in msc_strategy(7)) {
        let f = gf(7);
        let basis = derivation_algebra(&f, &a).basis;
        for x in &basis {
            prop_assert!(is_derivation(&f, &a, x));
            for y in &basis {
                prop_assert!(is_derivation(&f, &a, &x.commutator(y, &f)));
                prop_assert!(is_derivation(&f, &a, &x.add(y, &f)));
            }
        }
    }

    #[test]
    fn render_parse_round_trip(a in msc_strategy(27)) {
        let f = gf(27);
        prop_assert_eq!(parse_msc(&f, &render_msc(&f, &a)).unwrap(), a);
    }

    #[test]
    fn rational_round_trip(e in prop::array::uniform8(rational())) {
        let q = Rationals::new();
        let a = Msc::from_entries(e);
        prop_assert_eq!(parse_msc(&q, &render_msc(&q, &a)).unwrap(), a);
    }

    #[test]
    fn rational_field_axioms(x in rational(), y in rational(), z in rational()) {
        let q = Rationals::new();
        prop_assert_eq!(q.add(&q.add(&x, &y), &z), q.add(&x, &q.add(&y, &z)));
        prop_assert_eq!(q.mul(&x, &q.add(&y, &z)), q.add(&q.mul(&x, &y), &q.mul(&x, &z)));
        prop_assert_eq!(q.mul(&x, &y), q.mul(&y, &x));
        prop_assert!(q.is_zero(&q.add(&x, &q.neg(&x))));
        if !x.is_zero() {
            prop_assert!(q.mul(&x, &q.inv(&x).unwrap()).is_one());
        }
    }
}

/// Over the rationals: members of the closed-form groups, instantiated at
/// sample parameters, are automorphisms; the closed-form derivation
/// basis spans the kernel.
#[test]
fn rational_closed_forms_hold_on_instances() {
    let q = Rationals::new();
    let ints: Vec<BigRational> = [-3i64, -2, -1, 0, 1, 2, 3, 5]
        .iter()
        .map(|&n| BigRational::from_integer(BigInt::from(n)))
        .chain([BigRational::new(BigInt::from(1), BigInt::from(3)), BigRational::new(BigInt::from(-5), BigInt::from(2))])
        .collect();
    let reading = Reading::corrected();
    let mut checked = 0;
    for &tag in Regime::CharNot2Or3.families() {
        let arity = tag.arity();
        let mut tuples: Vec<Vec<BigRational>> = vec![Vec::new()];
        for _ in 0..arity {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    ints.iter().map(move |x| {
                        let mut t = t.clone();
                        t.push(x.clone());
                        t
                    })
                })
                .collect();
        }
        let admissible: Vec<_> = tuples
            .into_iter()
            .map(|p| CanonicalFamily::new(tag, p))
            .filter(|fam| is_admissible(&q, fam))
            .step_by(7)
            .take(12)
            .collect();
        for fam in admissible {
            let a = canonical_msc(&q, &fam).unwrap();
            let group = automorphisms_closed_form(&q, &fam, &reading).unwrap();
            for g in &group.elements {
                assert!(is_automorphism(&q, &a, g), "{tag} {:?}: {g:?}", fam.params);
            }
            for p in &group.patterns {
                for x in &ints {
                    for y in ints.iter().take(3) {
                        if let Some(g) = p.instantiate(&q, x, y) {
                            assert!(is_automorphism(&q, &a, &g), "{tag} {:?}: {p:?}", fam.params);
                        }
                    }
                }
            }
            let closed = derivations_closed_form(&q, &fam, &reading).unwrap();
            assert_eq!(closed, derivation_algebra(&q, &a), "{tag} {:?}", fam.params);
            checked += 1;
        }
    }
    assert!(checked > 60, "{checked}");
}

#[test]
fn rational_has_root_examples() {
    let q = Rationals::new();
    let r = |n: i64| BigRational::from_integer(BigInt::from(n));
    // t^3 - 1 and 2 - t^3, lowest degree first.
    assert_eq!(q.roots(&[r(-1), r(0), r(0), r(1)]).unwrap(), vec![r(1)]);
    assert!(q.roots(&[r(2), r(0), r(0), r(-1)]).unwrap().is_empty());
}
