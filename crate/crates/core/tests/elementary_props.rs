use caga_core::elementary::{demo_rule, evolve, random_row, BinaryRule};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn demo_rule_table_is_wolfram_165() {
    let rule = demo_rule();
    // bit i of 165 = output for neighbourhood i
    for i in 0..8u8 {
        let (l, c, r) = ((i >> 2) & 1, (i >> 1) & 1, i & 1);
        assert_eq!(rule.apply(l, c, r), (165u8 >> i) & 1, "{l}{c}{r}");
    }
    assert_eq!(rule.wolfram_code(), 165);
}

fn evolve_plain(rule: &BinaryRule, row: &[u8], steps: usize) -> Vec<Vec<u8>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    evolve(rule, row, steps, 0.0, &mut rng)
        .unwrap()
        .rows()
        .to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rule_165_is_affine(width in 1usize..64, steps in 0usize..40, seed in any::<u64>()) {
        let rule = demo_rule();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_row(width, &mut rng);
        let b = random_row(width, &mut rng);
        let ab: Vec<u8> = a.iter().zip(&b).map(|(x, y)| x ^ y).collect();
        let ea = evolve_plain(&rule, &a, steps);
        let eb = evolve_plain(&rule, &b, steps);
        let e0 = evolve_plain(&rule, &vec![0; width], steps);
        let eab = evolve_plain(&rule, &ab, steps);
        for t in 0..=steps {
            let expected: Vec<u8> = (0..width).map(|i| ea[t][i] ^ eb[t][i] ^ e0[t][i]).collect();
            prop_assert_eq!(&eab[t], &expected);
        }
    }

    #[test]
    fn unperturbed_evolution_ignores_the_rng(code in any::<u8>(), width in 1usize..50, s1 in any::<u64>(), s2 in any::<u64>()) {
        let rule = BinaryRule::from_wolfram(code);
        let row = random_row(width, &mut ChaCha8Rng::seed_from_u64(s1 ^ s2));
        let a = evolve(&rule, &row, 20, 0.0, &mut ChaCha8Rng::seed_from_u64(s1)).unwrap();
        let b = evolve(&rule, &row, 20, 0.0, &mut ChaCha8Rng::seed_from_u64(s2)).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn wolfram_code_round_trips(code in any::<u8>()) {
        prop_assert_eq!(BinaryRule::from_wolfram(code).wolfram_code(), code);
    }
}
