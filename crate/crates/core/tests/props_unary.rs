//! The reachability classification for unary algebras against the ground
//! truth it abbreviates: a carrier is positively classified exactly when
//! every two-coloring admits a homogeneous singleton for every start point.
//! Also hammers the three-cell partition on random fixed-point-free maps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramsey_core::algebra::{Evaluator, OperationDef, Phylum, Signature, SortIndex, SortWord, Value};
use ramsey_core::homogeneity::{find_homogeneous, Coloring};
use ramsey_core::reduction::{SortedPrefix, TermBounds};
use ramsey_core::unary::{katetov_partition, unary_ramsey_classification, UnaryAlgebra};

fn atom(ordinal: usize) -> Value {
    Value::Atom { phylum: SortIndex(0), ordinal }
}

fn unary_signature(n: usize, maps: &[Vec<usize>]) -> Signature {
    let names = (0..n).map(|i| format!("a{i}")).collect();
    let ops = maps
        .iter()
        .enumerate()
        .map(|(k, map)| OperationDef {
            name: format!("f{k}"),
            arg_sorts: vec![SortIndex(0)],
            out_sort: SortIndex(0),
            eval: Evaluator::Table(
                (0..n).map(|i| (vec![atom(i)], atom(map[i]))).collect(),
            ),
        })
        .collect();
    Signature {
        phyla: vec![Phylum::Atoms { names }],
        phylum_names: vec!["A".to_string()],
        ops,
    }
}

/// Ground truth by exhaustive search: positive iff for every 2-coloring and
/// every starting element, a homogeneous singleton reduction exists within
/// carrier-sized term bounds.
fn oracle_is_ramsey(n: usize, maps: &[Vec<usize>]) -> bool {
    let sig = unary_signature(n, maps);
    let word = SortWord::constant(SortIndex(0));
    let bounds = TermBounds::new(n, 1);
    for mask in 0..(1u32 << n) {
        let coloring = Coloring::from_table(
            "mask",
            2,
            (0..n)
                .map(|i| (atom(i), ((mask >> i) & 1) as usize))
                .collect(),
            None,
        );
        for start in 0..n {
            let b = SortedPrefix::new(&sig, vec![atom(start)], word.clone()).unwrap();
            let report = find_homogeneous(&sig, &b, &word, &coloring, 1, bounds).unwrap();
            if !report.found() {
                return false;
            }
        }
    }
    true
}

fn algebra(n: usize, maps: &[Vec<usize>]) -> UnaryAlgebra {
    UnaryAlgebra::new((0..n).map(atom).collect(), maps.to_vec()).unwrap()
}

#[test]
fn classification_matches_search_on_all_single_maps() {
    for n in 1..=3usize {
        let mut map = vec![0usize; n];
        loop {
            let maps = vec![map.clone()];
            let classified = unary_ramsey_classification(&algebra(n, &maps)).is_ramsey;
            let searched = oracle_is_ramsey(n, &maps);
            assert_eq!(classified, searched, "n={n} map={map:?}");
            // Odometer over all n^n maps.
            let mut i = 0;
            loop {
                if i == n {
                    break;
                }
                map[i] += 1;
                if map[i] < n {
                    break;
                }
                map[i] = 0;
                i += 1;
            }
            if i == n {
                break;
            }
        }
    }
}

#[test]
fn classification_matches_search_on_sampled_map_pairs() {
    let n = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
    for _ in 0..60 {
        let maps: Vec<Vec<usize>> = (0..2)
            .map(|_| (0..n).map(|_| rng.gen_range(0..n)).collect())
            .collect();
        let classified = unary_ramsey_classification(&algebra(n, &maps)).is_ramsey;
        let searched = oracle_is_ramsey(n, &maps);
        assert_eq!(classified, searched, "maps={maps:?}");
    }
}

#[test]
fn three_cells_separate_random_fixed_point_free_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xca7e);
    for _ in 0..200 {
        let n = rng.gen_range(2..=40);
        let t: Vec<usize> = (0..n)
            .map(|i| {
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                j
            })
            .collect();
        let partition = katetov_partition(&t).unwrap();
        assert!(partition.separates(&t));
    }
}
