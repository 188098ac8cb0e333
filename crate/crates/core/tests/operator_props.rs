use std::sync::Arc;

use caga_core::genome::{random_genome, Layout};
use caga_core::operators::{
    crossover, hyper_mutation, mutate_best, regular_mutation, Archive, CrossoverKind,
    MutationVersion,
};
use caga_core::{Cell, Evaluation};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const KINDS: [CrossoverKind; 3] = [
    CrossoverKind::OnePoint,
    CrossoverKind::TwoPoint,
    CrossoverKind::VariableToVariable,
];
const VERSIONS: [MutationVersion; 2] = [MutationVersion::Ordinary, MutationVersion::Gaussian];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn operators_stay_in_alphabet(
        lengths in prop::collection::vec(1usize..7, 1..6),
        cells in 2usize..8,
        op in 0usize..4,
        seed in any::<u64>(),
    ) {
        let layout = Arc::new(Layout::from_lengths(&lengths));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut lattice: Vec<Cell> = (0..cells)
            .map(|_| {
                let f = rng.random_range(-5.0..5.0);
                Cell::new(random_genome(&layout, &mut rng), Evaluation::maximize(f))
            })
            .collect();
        let before = lattice.clone();
        match op {
            0 => {
                let kind = KINDS[rng.random_range(0..3)];
                let child = crossover(&lattice[0].genome, &lattice[1].genome, kind, &mut rng).unwrap();
                // every position comes from one of the parents
                for (i, d) in child.digits().iter().enumerate() {
                    prop_assert!(*d == lattice[0].genome.digits()[i] || *d == lattice[1].genome.digits()[i]);
                }
                if kind == CrossoverKind::VariableToVariable {
                    for v in 0..lengths.len() {
                        let s = child.substring(v);
                        prop_assert!(s == lattice[0].genome.substring(v) || s == lattice[1].genome.substring(v));
                    }
                }
                lattice[0].genome = child;
            }
            1 => {
                let rounds = rng.random_range(1..4);
                regular_mutation(&mut lattice, rounds, VERSIONS[rng.random_range(0..2)], &mut rng);
            }
            2 => mutate_best(&mut lattice, VERSIONS[rng.random_range(0..2)], &mut rng),
            _ => {
                let mut archive = Archive::new(5);
                for _ in 0..3 {
                    archive.push(random_genome(&layout, &mut rng));
                }
                hyper_mutation(&mut lattice, &archive, &mut rng);
                let changed: Vec<usize> = (0..cells).filter(|&i| lattice[i] != before[i]).collect();
                prop_assert!(changed.len() <= 1);
            }
        }
        for c in &lattice {
            prop_assert_eq!(c.genome.len(), layout.total_len());
            prop_assert!(c.genome.same_layout(&before[0].genome));
            prop_assert!(c.genome.digits().iter().all(|&d| d <= 9));
        }
    }
}
