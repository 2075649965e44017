use proptest::prelude::*;
use turborecon::interleave::{build_interleaver, parity_coverage};
use turborecon::puncture::PuncturePattern;

fn arb_case() -> impl Strategy<Value = (Vec<bool>, Vec<bool>, u64)> {
    (2usize..120).prop_flat_map(|n| {
        (
            proptest::collection::vec(any::<bool>(), n),
            proptest::collection::vec(any::<bool>(), n),
            any::<u64>(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn bijective_with_minimal_double_and_zero_parity((m1, m2, seed) in arb_case()) {
        let n = m1.len();
        let p1 = PuncturePattern::from_mask(m1);
        let p2 = PuncturePattern::from_mask(m2);
        let perm = build_interleaver(n, &p1, &p2, seed).unwrap();

        let mut seen = vec![false; n];
        for &src in perm.forward() {
            prop_assert!(!seen[src as usize]);
            seen[src as usize] = true;
        }

        let (t1, t2) = (p1.transmitted_count(), p2.transmitted_count());
        let (both, neither) = parity_coverage(&perm, &p1, &p2);
        prop_assert_eq!(both, (t1 + t2).saturating_sub(n));
        prop_assert_eq!(neither, n.saturating_sub(t1 + t2));
        prop_assert_eq!(perm.group_boundary(), t1);
    }

    #[test]
    fn round_trip_and_determinism(n in 2usize..300, c1 in 0usize..300, c2 in 0usize..300, seed in any::<u64>()) {
        let p1 = PuncturePattern::spread(n, c1.min(n), 0);
        let p2 = PuncturePattern::spread(n, c2.min(n), 3);
        let a = build_interleaver(n, &p1, &p2, seed).unwrap();
        let b = build_interleaver(n, &p1, &p2, seed).unwrap();
        prop_assert_eq!(&a, &b);
        let block: Vec<u64> = (0..n as u64).map(|i| i * 31 + 7).collect();
        prop_assert_eq!(a.apply_inverse(&a.apply(&block).unwrap()).unwrap(), block.clone());
        prop_assert_eq!(a.apply(&a.apply_inverse(&block).unwrap()).unwrap(), block);
    }
}
