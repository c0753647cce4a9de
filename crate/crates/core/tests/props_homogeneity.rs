//! Search-level properties: positive reports re-verify from scratch, the
//! semigroup specialization agrees with the general search everywhere in a
//! small exhaustive grid, and merged reductions keep their promised shape.

use num::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ramsey_core::algebra::{
    Evaluator, FieldKind, OperationDef, Phylum, Scalar, Signature, SortIndex, SortWord, Value,
};
use ramsey_core::homogeneity::{
    find_homogeneous, hindman_search, merge_sorted_reduction, Coloring,
};
use ramsey_core::reduction::{ReductionWitness, SortedPrefix, TermBounds, WitnessEntry};
use ramsey_core::terms::OrderlyTerm;

fn additive_rationals() -> Signature {
    Signature {
        phyla: vec![Phylum::Field(FieldKind::Rationals)],
        phylum_names: vec!["Q".to_string()],
        ops: vec![OperationDef {
            name: "+".to_string(),
            arg_sorts: vec![SortIndex(0), SortIndex(0)],
            out_sort: SortIndex(0),
            eval: Evaluator::FieldAdd,
        }],
    }
}

fn rationals(ints: &[i64]) -> Vec<Value> {
    ints.iter()
        .map(|&n| Value::Scalar(Scalar::Rat(BigRational::from_integer(n.into()))))
        .collect()
}

fn numer_u64(v: &Value) -> u64 {
    match v {
        Value::Scalar(Scalar::Rat(r)) => {
            use num::ToPrimitive;
            r.numer().to_u64().unwrap_or(0)
        }
        _ => 0,
    }
}

/// Every positive report must survive independent re-verification, under
/// arbitrary colorings.
#[test]
fn positive_reports_reverify() {
    let sig = additive_rationals();
    let word = SortWord::constant(SortIndex(0));
    let b = SortedPrefix::new(&sig, rationals(&[1, 2, 4, 8, 16, 32]), word.clone()).unwrap();
    let bounds = TermBounds::new(2, 3);
    let mut found = 0;
    for seed in 0..24u64 {
        let mix = ChaCha8Rng::seed_from_u64(seed).gen::<u64>() | 1;
        let coloring = Coloring::new("scrambled", 2, move |v: &Value| {
            (numer_u64(v).wrapping_mul(mix) >> 63) as usize
        });
        let report = find_homogeneous(&sig, &b, &word, &coloring, 2, bounds).unwrap();
        if report.found() {
            report.verify(&sig, &b, &coloring, bounds).unwrap();
            found += 1;
        }
    }
    assert!(found > 0);
}

/// The semigroup-specialized search and the general search reach the same
/// verdict on every additive instance with |b| <= 6 and bounds <= 3.
#[test]
fn semigroup_and_general_search_agree() {
    let sig = additive_rationals();
    let word = SortWord::constant(SortIndex(0));
    let prefixes: [&[i64]; 4] = [
        &[1, 2, 4, 8, 16, 32],
        &[1, 3, 9, 27, 81],
        &[5, 10, 20, 40],
        &[1, 2, 3, 4, 5, 6],
    ];
    let colorings: Vec<Coloring> = vec![
        Coloring::new("parity", 2, |v: &Value| (numer_u64(v) % 2) as usize),
        Coloring::new("mod3", 3, |v: &Value| (numer_u64(v) % 3) as usize),
        Coloring::new("threshold", 2, |v: &Value| usize::from(numer_u64(v) > 12)),
    ];
    let mut agreements = 0;
    for ints in prefixes {
        for take in 2..=ints.len() {
            let b = SortedPrefix::new(&sig, rationals(&ints[..take]), word.clone()).unwrap();
            for coloring in &colorings {
                for size in 1..=3usize {
                    let bounds = TermBounds::new(size, 3);
                    for target in 1..=2usize {
                        let general =
                            find_homogeneous(&sig, &b, &word, coloring, target, bounds).unwrap();
                        let special =
                            hindman_search(&sig, &b, coloring, target, bounds).unwrap();
                        assert_eq!(
                            general.found(),
                            special.found(),
                            "b={ints:?}[..{take}] coloring={} size={size} target={target}",
                            coloring.name
                        );
                        if special.found() {
                            special.verify(&sig, &b, coloring, bounds).unwrap();
                        }
                        agreements += 1;
                    }
                }
            }
        }
    }
    assert!(agreements > 200);
}

fn disjoint_atoms() -> Signature {
    let a0 = Value::Atom { phylum: SortIndex(0), ordinal: 0 };
    let y1 = Value::Atom { phylum: SortIndex(1), ordinal: 1 };
    Signature {
        phyla: vec![
            Phylum::Atoms { names: vec!["x0".into(), "x1".into(), "x2".into()] },
            Phylum::Atoms { names: vec!["y0".into(), "y1".into()] },
        ],
        phylum_names: vec!["X".to_string(), "Y".to_string()],
        ops: vec![
            OperationDef {
                name: "circ".to_string(),
                arg_sorts: vec![SortIndex(0), SortIndex(0)],
                out_sort: SortIndex(0),
                eval: Evaluator::Const(a0),
            },
            OperationDef {
                name: "h".to_string(),
                arg_sorts: vec![SortIndex(1)],
                out_sort: SortIndex(1),
                eval: Evaluator::Const(y1),
            },
        ],
    }
}

/// Merged reductions must re-verify against the source prefix, and their
/// head-sort positions must reproduce a prefix of the supplied reduction of
/// the head-sort subsequence.
#[test]
fn merged_reductions_embed_the_head_reduction() {
    let sig = disjoint_atoms();
    let atom =
        |phylum: usize, ordinal: usize| Value::Atom { phylum: SortIndex(phylum), ordinal };
    let e = SortWord::new(vec![], vec![SortIndex(0), SortIndex(1)]).unwrap();
    let b_values = vec![
        atom(0, 1),
        atom(1, 0),
        atom(0, 2),
        atom(1, 1),
        atom(0, 0),
        atom(1, 0),
        atom(0, 1),
        atom(1, 1),
    ];
    let b = SortedPrefix::new(&sig, b_values, e.clone()).unwrap();
    let head_word = SortWord::constant(SortIndex(0));

    // Reductions of the head-sort subsequence <x1, x2, x0, x1>: the identity
    // spaced out, and a composite first entry.
    let head_indices = [0usize, 2, 4, 6];
    let leaf = OrderlyTerm::Leaf { sort: SortIndex(0) };
    let witness_sets: Vec<Vec<WitnessEntry>> = vec![
        (0..3)
            .map(|j| WitnessEntry { term: leaf.clone(), indices: vec![head_indices[j]] })
            .collect(),
        vec![
            WitnessEntry {
                term: OrderlyTerm::Node {
                    op: ramsey_core::algebra::OpIndex(0),
                    children: vec![leaf.clone(), leaf.clone()],
                },
                indices: vec![head_indices[0], head_indices[1]],
            },
            WitnessEntry { term: leaf.clone(), indices: vec![head_indices[2]] },
        ],
    ];
    for eta_entries in witness_sets {
        let alpha_values: Vec<Value> = eta_entries
            .iter()
            .map(|entry| {
                let w = ReductionWitness { entries: vec![entry.clone()] };
                w.apply(&sig, &b).unwrap().remove(0)
            })
            .collect();
        let alpha =
            SortedPrefix::new(&sig, alpha_values.clone(), head_word.clone()).unwrap();
        let target_len = 2 * alpha.len();
        let (merged, witness) =
            merge_sorted_reduction(&sig, &alpha, &b, &e, &eta_entries, target_len).unwrap();
        let reproduced = witness.check(&sig, &b, &e).unwrap();
        assert_eq!(&reproduced, merged.values());

        let head_positions: Vec<&Value> = merged
            .values()
            .iter()
            .enumerate()
            .filter(|(i, _)| e.at(*i) == SortIndex(0))
            .map(|(_, v)| v)
            .collect();
        assert!(head_positions.len() <= alpha_values.len());
        for (got, want) in head_positions.iter().zip(&alpha_values) {
            assert_eq!(*got, want);
        }
    }
}
