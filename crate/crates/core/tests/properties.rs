use hmix::dirichlet::bound_row_general;
use hmix::group::{canonical_measure, convolve, DistributionTable, GroupElement};
use hmix::harper::{build_general, build_harper, juxtaposition_clause};
use hmix::mixing::CenterFormula;
use hmix::repr::{enumerate_irreps, irrep_matrix};
use proptest::prelude::*;

fn element(n: u64) -> impl Strategy<Value = GroupElement> {
    (0..n as i64, 0..n as i64, 0..n as i64).prop_map(move |(x, y, z)| GroupElement::new(x, y, z, n))
}

fn triple() -> impl Strategy<Value = (GroupElement, GroupElement, GroupElement)> {
    (2u64..40).prop_flat_map(|n| (element(n), element(n), element(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_law_is_associative((a, b, c) in triple()) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        prop_assert!(a.mul(&a.inv()).unwrap().is_identity());
        prop_assert!(a.inv().mul(&a).unwrap().is_identity());
        prop_assert_eq!(GroupElement::from_index(a.index(), a.n), a);
    }

    #[test]
    fn irreps_are_homomorphisms(n in 2u64..10, pick in any::<prop::sample::Index>(), seed in any::<[i64; 6]>()) {
        let labels = enumerate_irreps(n);
        let label = &labels[pick.index(labels.len())];
        let m = n as i64;
        let g = GroupElement::new(seed[0] % m, seed[1] % m, seed[2] % m, n);
        let h = GroupElement::new(seed[3] % m, seed[4] % m, seed[5] % m, n);
        let lhs = irrep_matrix(label, &g.mul(&h).unwrap()).unwrap();
        let rhs = irrep_matrix(label, &g).unwrap().matmul(&irrep_matrix(label, &h).unwrap());
        for i in 0..label.dim() {
            for j in 0..label.dim() {
                prop_assert!((lhs[(i, j)] - rhs[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn convolution_keeps_mass_and_contracts(n in 3u64..9, steps in 1usize..30) {
        let q = canonical_measure(n).unwrap();
        let mut p = DistributionTable::point_mass(GroupElement::identity(n));
        let mut tv = p.tv_distance();
        for _ in 0..steps {
            p = convolve(&p, &q).unwrap();
            prop_assert!((p.total_mass() - 1.0).abs() < 1e-12);
            let next = p.tv_distance();
            prop_assert!(next <= tv + 1e-14);
            tv = next;
        }
    }

    #[test]
    fn harper_spectrum_lies_in_unit_interval(n in 3usize..60, xi in 1u64..60, alpha in -1.0f64..1.0) {
        prop_assume!((xi as usize) < n);
        let vals = build_harper(n, xi, alpha).unwrap().eigenvalues().unwrap();
        prop_assert_eq!(vals.len(), n);
        prop_assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(vals[0] <= 1.0 + 1e-12 && vals[n - 1] >= -1.0 - 1e-12);
        let trace: f64 = build_harper(n, xi, alpha).unwrap().diagonal().iter().sum();
        prop_assert!((vals.iter().sum::<f64>() - trace).abs() < 1e-10);
    }

    #[test]
    fn juxtaposed_spectrum_contains_the_small_one(n in 3usize..25, xi in 1u64..25, k in 2usize..4, alpha in -1.0f64..1.0) {
        prop_assume!((xi as usize) < n);
        prop_assert!(juxtaposition_clause(n, xi, k, alpha).unwrap().holds);
    }

    #[test]
    fn path_bounds_hold_for_any_diagonal(diag in prop::collection::vec(-0.5f64..=0.5, 3..40)) {
        let row = bound_row_general(&diag).unwrap();
        prop_assert!(row.is_valid(), "{:?}", row);
        let vals = build_general(diag.len(), &diag).unwrap().eigenvalues().unwrap();
        prop_assert_eq!(vals[0], row.beta1_exact);
    }

    #[test]
    fn center_law_is_a_distribution(p in prop::sample::select(vec![3u64, 5, 7, 11, 13]), k in 1u32..150) {
        let law = CenterFormula::new(p).unwrap().distribution(k).unwrap();
        prop_assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(law.iter().all(|&v| v > -1e-10));
    }
}
