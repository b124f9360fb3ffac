use fq_core::constructions::{enumerate_roots_example1, fourier_coefficient, lambda_p0, Example1Spec};
use fq_core::genericity::is_generic;
use fq_core::lattice::{smith_normal_form, unimodular_completion, IntMat};
use fq_core::measures::{multiset_distance, Multiset};
use fq_core::polyring::{LaurentMap, LaurentPoly};
use fq_core::polytope::{minkowski_sum, mixed_volume, volume, LatticePolytope};
use fq_core::rootfind::{winding_number, Rect, TrigPoly1};
use fq_core::scalar::Scalar;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;

fn multiset(k: usize) -> impl Strategy<Value = Multiset> {
    proptest::collection::vec(0.0f64..10.0, k).prop_map(|v| Multiset::from_points(v.into_iter().map(|x| vec![x]).collect()))
}

fn polygon() -> impl Strategy<Value = LatticePolytope> {
    proptest::collection::vec((-2i64..3, -2i64..3), 3..6)
        .prop_map(|v| LatticePolytope::from_exponents(&v.into_iter().map(|(a, b)| vec![a, b]).collect::<Vec<_>>()).unwrap())
        .prop_filter("full dimensional", |p| p.dim() == 2)
}

fn unimodular() -> impl Strategy<Value = IntMat> {
    proptest::collection::vec((any::<bool>(), -2i64..3), 1..5).prop_map(|ops| {
        let mut m = [[1i64, 0], [0, 1]];
        for (swap, k) in ops {
            for c in 0..2 {
                m[0][c] += k * m[1][c];
            }
            if swap {
                m.swap(0, 1);
            }
        }
        IntMat::from_rows(&[m[0].to_vec(), m[1].to_vec()]).unwrap()
    })
}

fn square_system(a: [i64; 4], b: [i64; 4]) -> LaurentMap {
    let p = |c: [i64; 4]| {
        LaurentPoly::real(2, &[(&[0, 0], c[0] as f64), (&[1, 0], c[1] as f64), (&[0, 1], c[2] as f64), (&[1, 1], c[3] as f64)]).unwrap()
    };
    LaurentMap::new(vec![p(a), p(b)]).unwrap()
}

fn coeff() -> impl Strategy<Value = i64> {
    prop_oneof![-3i64..0, 1i64..4]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn multiset_distance_is_a_metric((a, b, c) in (1usize..6).prop_flat_map(|k| (multiset(k), multiset(k), multiset(k)))) {
        let (ab, bc, ac) = (multiset_distance(&a, &b), multiset_distance(&b, &c), multiset_distance(&a, &c));
        prop_assert_eq!(multiset_distance(&a, &a), 0.0);
        prop_assert_eq!(ab, multiset_distance(&b, &a));
        prop_assert!(ac <= ab + bc + 1e-12);
        if a.points != b.points {
            prop_assert!(ab > 0.0);
        }
    }

    #[test]
    fn mixed_volume_is_symmetric_and_additive(p in polygon(), q in polygon(), s in polygon()) {
        let v = |x: &LatticePolytope, y: &LatticePolytope| mixed_volume(&[x.clone(), y.clone()]).unwrap();
        prop_assert_eq!(v(&p, &q), v(&q, &p));
        let pq = minkowski_sum(&p, &q).unwrap();
        prop_assert_eq!(v(&pq, &s), v(&p, &s) + v(&q, &s));
        prop_assert_eq!(v(&p, &p), BigRational::from_integer(2.into()) * volume(&p).unwrap());
    }

    #[test]
    fn winding_is_additive(x0 in -20.0f64..20.0, w in 1.0f64..6.0, f in 0.2f64..0.8) {
        let spec = Example1Spec::kurasov_sarnak();
        let p = TrigPoly1::from_trig_map(&fq_core::constructions::build_example1(&spec).unwrap()).unwrap();
        let h = p.imag_band();
        let (x0, x1) = (x0 + 0.01234, x0 + 0.01234 + w);
        let cut = x0 + f * w;
        let whole = winding_number(&p, &Rect::new(x0, x1, -h, h).unwrap()).unwrap();
        let left = winding_number(&p, &Rect::new(x0, cut, -h, h).unwrap()).unwrap();
        let right = winding_number(&p, &Rect::new(cut, x1, -h, h).unwrap()).unwrap();
        prop_assert_eq!(whole, left + right);
    }

    #[test]
    fn genericity_and_minimality_are_gl_invariant(a in [coeff(), coeff(), coeff(), coeff()], b in [coeff(), coeff(), coeff(), coeff()], u in unimodular()) {
        let q = square_system(a, b);
        let t = q.gl_transform(&u).unwrap();
        prop_assert_eq!(is_generic(&q).unwrap().verdict, is_generic(&t).unwrap().verdict);
        prop_assert_eq!(q.is_minimal(), t.is_minimal());
    }

    #[test]
    fn snf_diagonal_multiplies_to_det(rows in proptest::collection::vec(proptest::collection::vec(-5i64..6, 3), 3)) {
        let m = IntMat::from_rows(&rows).unwrap();
        let det = m.det().unwrap();
        let prod: BigInt = smith_normal_form(&m).diagonal().iter().product();
        if det != BigInt::from(0) {
            prop_assert_eq!(prod.abs(), det.abs());
        }
    }

    #[test]
    fn completion_maps_gamma_to_last_basis_vector(g in proptest::collection::vec(1i64..30, 2..5)) {
        let d = g.iter().fold(0i64, |a, &b| num_integer::gcd(a, b));
        let g: Vec<i64> = g.iter().map(|v| v / d).collect();
        let j = unimodular_completion(&g).unwrap();
        prop_assert!(j.is_unimodular());
        let img = j.mul_vec(&g);
        let m = g.len();
        for (i, v) in img.iter().enumerate() {
            prop_assert_eq!(v.clone(), BigInt::from((i == m - 1) as i64));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn example1_roots_match_density(b in 0.15f64..0.9, s0 in -0.8f64..0.8, s1 in -0.8f64..0.8) {
        prop_assume!(s0.abs() > 0.05);
        let spec = Example1Spec::new(vec![Scalar::float(s0), Scalar::float(s1)], vec![Scalar::float(b)], vec![2, 1], Scalar::int(1)).unwrap();
        let roots = enumerate_roots_example1(&spec, 100.0).unwrap();
        let delta = lambda_p0(&spec).unwrap().delta;
        prop_assert!((delta - (1.0 + 2.0 * b)).abs() < 1e-12);
        prop_assert!((roots.total() as f64 - 200.0 * delta).abs() <= 2.0);
    }

    #[test]
    fn coefficients_are_conjugate_symmetric_and_bounded(l1 in -4i64..5, l2 in -4i64..5) {
        let spec = Example1Spec::kurasov_sarnak();
        let a = fourier_coefficient(&spec, &[l1, l2]).unwrap();
        let b = fourier_coefficient(&spec, &[-l1, -l2]).unwrap();
        prop_assert!((a - b.conj()).norm() < 1e-10);
        prop_assert!(a.norm() <= 1.6 + 1e-10);
        if (l1 >= 1 && l2 >= 1) || (l1 <= -1 && l2 <= -1) {
            prop_assert!(a.norm() < 1e-8);
        }
    }
}
