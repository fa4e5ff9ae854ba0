use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use moment_cara::combinatorics::{binom, enum_multi_indices, DegreeMode, MonomialBasis, MultiIndex};
use moment_cara::flat::{flat_check, required_extension_degree};
use moment_cara::hilbert::{grid_cara_closed_form, hf_regular_quotient, Domain, HilbertProfile, Parity};
use moment_cara::io::{read_measure, read_moments, write_measure, write_moments};
use moment_cara::linalg::RationalMatrix;
use moment_cara::moments::{
    atomic_moments, eval_vector, hankel, riesz_apply, shift, Atom, AtomicMeasure, Polynomial,
};
use moment_cara::recover::{recover_atoms_1d, RecoveryConfig};
use moment_cara::sparse::{descartes_number, sparse_cara_bounds, SemigroupRing};
use moment_cara::witness::{interpolation_points, prune};

fn rational() -> impl Strategy<Value = BigRational> {
    (-12i64..=12, 1i64..=4).prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
}

fn positive_rational() -> impl Strategy<Value = BigRational> {
    (1i64..=12, 1i64..=4).prop_map(|(p, q)| BigRational::new(p.into(), q.into()))
}

fn dedup(points: Vec<Vec<BigRational>>) -> Vec<Vec<BigRational>> {
    let mut out: Vec<Vec<BigRational>> = Vec::new();
    for p in points {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn measure(n: usize, max_atoms: usize, weight: BoxedStrategy<BigRational>) -> impl Strategy<Value = AtomicMeasure> {
    prop::collection::vec((prop::collection::vec(rational(), n), weight), 0..=max_atoms).prop_map(
        move |atoms| {
            let points = dedup(atoms.iter().map(|a| a.0.clone()).collect());
            let atoms = points
                .into_iter()
                .zip(atoms.into_iter().map(|a| a.1))
                .map(|(point, weight)| Atom { point, weight })
                .collect();
            AtomicMeasure::new(n, atoms).unwrap()
        },
    )
}

fn signed_measure(n: usize, max_atoms: usize) -> impl Strategy<Value = AtomicMeasure> {
    measure(n, max_atoms, rational().boxed())
}

fn positive_measure(n: usize, max_atoms: usize) -> impl Strategy<Value = AtomicMeasure> {
    measure(n, max_atoms, positive_rational().boxed())
}

fn generators() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(2u64..=9, 1..=3)
        .prop_filter("gcd 1", |g| g.iter().fold(0, |a, &b| num_integer::gcd(a, b)) == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn hankel_is_weighted_outer_product_sum(
        (n, m) in (1usize..=2).prop_flat_map(|n| (Just(n), signed_measure(n, 5))),
        d in 0u32..=2,
    ) {
        let h = hankel(&atomic_moments(&m, 2 * d), d).unwrap().matrix;
        let size = h.rows();
        for i in 0..size {
            for j in 0..size {
                let mut expected = BigRational::zero();
                for a in m.atoms() {
                    let v = eval_vector(n, d, &a.point);
                    expected += &a.weight * &v[i] * &v[j];
                }
                prop_assert_eq!(h.get(i, j), &expected);
            }
        }
    }

    #[test]
    fn shift_composes(m in signed_measure(2, 4), b in 0u32..=2, c in 0u32..=2, i in 0usize..2, j in 0usize..2) {
        let s = atomic_moments(&m, 6);
        let beta = { let mut a = MultiIndex::zero(2); a.0[i] = b; a };
        let gamma = { let mut a = MultiIndex::zero(2); a.0[j] = c; a };
        prop_assert_eq!(
            shift(&shift(&s, &beta).unwrap(), &gamma).unwrap(),
            shift(&s, &beta.add(&gamma)).unwrap()
        );
    }

    #[test]
    fn riesz_matches_integration(m in signed_measure(2, 5), coeffs in prop::collection::vec(rational(), 10)) {
        let p = Polynomial::from_terms(enum_multi_indices(2, 3, DegreeMode::AtMost).into_iter().zip(coeffs));
        prop_assert_eq!(riesz_apply(&atomic_moments(&m, 3), &p).unwrap(), m.integrate(&p));
    }

    #[test]
    fn positive_hankel_minors_nonnegative(m in positive_measure(1, 6)) {
        let h = hankel(&atomic_moments(&m, 6), 3).unwrap().matrix;
        for k in 1..=h.rows() {
            let minor = RationalMatrix::from_rows((0..k).map(|i| h.row(i)[..k].to_vec()).collect());
            prop_assert!(!minor.determinant().is_negative());
        }
    }

    #[test]
    fn json_round_trip(m in signed_measure(2, 4), degree in 0u32..=3) {
        let s = atomic_moments(&m, degree);
        let mut buf = Vec::new();
        write_moments(&mut buf, &s).unwrap();
        prop_assert_eq!(read_moments(buf.as_slice()).unwrap(), s);
        let mut buf = Vec::new();
        write_measure(&mut buf, &m).unwrap();
        prop_assert_eq!(read_measure(buf.as_slice()).unwrap(), m);
    }

    #[test]
    fn prune_preserves_moments(m in positive_measure(2, 14), degree in 1u32..=2) {
        let rank = if m.is_empty() { 0 } else { m.evaluation_matrix(degree).rank() };
        let p = prune(&m, degree).unwrap();
        prop_assert!(p.len() <= rank);
        prop_assert!(p.is_positive());
        prop_assert_eq!(atomic_moments(&p, degree), atomic_moments(&m, degree));
        prop_assert_eq!(prune(&p, degree).unwrap(), p);
    }

    #[test]
    fn interpolation_points_invertible(pts in prop::collection::vec(prop::collection::vec(rational(), 2), 6..30), degree in 0u32..=2) {
        let need = MonomialBasis::new(2, degree).len();
        if let Ok(chosen) = interpolation_points(2, degree, dedup(pts)) {
            prop_assert_eq!(chosen.len(), need);
            let m = AtomicMeasure::unit_masses(2, chosen).unwrap().evaluation_matrix(degree);
            prop_assert!(!m.determinant().is_zero());
        }
    }

    #[test]
    fn descartes_bounded_and_monotone(gens in generators(), k in 0u64..=14) {
        let ring = SemigroupRing::new(&gens).unwrap();
        let a = descartes_number(&ring, k).unwrap().value as u64;
        let b = descartes_number(&ring, k + 1).unwrap().value as u64;
        prop_assert!(a <= k);
        prop_assert!(a <= b);
    }

    #[test]
    fn semigroup_dimension_formula(gens in generators(), extra in 0u64..10) {
        let ring = SemigroupRing::new(&gens).unwrap();
        let d = ring.conductor() + extra;
        prop_assert_eq!(ring.dim_upto(d), d + 1 - ring.gaps());
    }

    #[test]
    fn sparse_bounds_ordered_with_slope_one(gens in generators(), extra in 0u64..6) {
        let ring = SemigroupRing::new(&gens).unwrap();
        let k = ring.conductor() + extra;
        // Large conductors exceed the explicit enumeration cap and are refused.
        let (Ok((l, u)), Ok((l1, u1))) = (sparse_cara_bounds(&ring, k), sparse_cara_bounds(&ring, k + 1)) else {
            return Err(TestCaseError::reject("enumeration cap"));
        };
        prop_assert!(l <= u);
        prop_assert_eq!((l1, u1), (l + 1, u + 1));
    }

    #[test]
    fn regular_quotient_with_no_forms_is_identity(n in 1u64..6, j in -3i64..20, d in 1u64..5) {
        let base = HilbertProfile::ProjectiveSpace(n);
        prop_assert_eq!(hf_regular_quotient(&base, 0, d, j), base.eval(j));
    }

    #[test]
    fn required_degree_within_bounds(n in 1u64..40, d in 1u64..40) {
        let r = required_extension_degree(n, d).unwrap();
        prop_assert!(r.d <= r.required_d && r.required_d <= 2 * d);
        let strict = BigInt::from(binom(n + 2 * d - 1, n as i64)) < r.cara_lower;
        prop_assert_eq!(r.worst_case, strict);
        prop_assert_eq!(r.cara_lower, grid_cara_closed_form(n, d, Parity::Even, Domain::Rn));
    }

    #[test]
    fn flat_ranks_stabilize(xs in prop::collection::btree_set(-6i64..=6, 1..=3)) {
        let k = xs.len();
        let m = AtomicMeasure::unit_masses(1, xs.into_iter().map(|x| vec![BigRational::from_integer(x.into())]).collect()).unwrap();
        let s = atomic_moments(&m, 10);
        for big_d in (k as u32 - 1)..=4 {
            let c = flat_check(&s, big_d).unwrap();
            prop_assert_eq!((c.rank_lower, c.rank_upper, c.flat), (k, k, true));
        }
    }

    #[test]
    fn recovery_scales_with_moments(raw in prop::collection::btree_set(-10i32..=10, 1..=4), lambda in 0.1f64..10.0) {
        let z: Vec<f64> = raw.iter().map(|&x| x as f64 / 10.0).collect();
        let k = z.len();
        let s: Vec<f64> = (0..2 * k + 2).map(|j| z.iter().map(|z| z.powi(j as i32)).sum()).collect();
        let cfg = RecoveryConfig::default();
        let a = recover_atoms_1d(&s, k, &cfg).unwrap();
        let scaled: Vec<f64> = s.iter().map(|x| lambda * x).collect();
        let b = recover_atoms_1d(&scaled, k, &cfg).unwrap();
        for (x, y) in a.atoms.iter().zip(&b.atoms) {
            prop_assert!((x - y).norm() < 1e-8);
        }
        for (x, y) in a.weights.iter().zip(&b.weights) {
            prop_assert!((x * lambda - y).norm() < 1e-7 * lambda.max(1.0));
        }
        for (x, e) in a.atoms.iter().zip(&z) {
            prop_assert!((x.re - e).abs() < 1e-6 && x.im.abs() < 1e-6);
        }
    }
}
