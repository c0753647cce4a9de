//! Properties of sort words and value phyla: classification must not depend
//! on how an eventually periodic word is written down, recurring sorts must
//! live in the canonical period, and phyla must stay disjoint.

use proptest::prelude::*;
use ramsey_core::{FieldKind, OmegaClass, Signature, SortIndex, SortWord};

fn word_parts() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (
        prop::collection::vec(0..3usize, 0..4),
        prop::collection::vec(0..3usize, 1..4),
    )
}

fn to_sorts(raw: &[usize]) -> Vec<SortIndex> {
    raw.iter().map(|&s| SortIndex(s)).collect()
}

proptest! {
    /// Unrolling the period into the prefix and repeating the period both
    /// leave the denoted infinite word unchanged, so the canonical form and
    /// the classification must agree.
    #[test]
    fn omega_class_ignores_representation(
        (prefix, period) in word_parts(),
        unroll in 0..6usize,
        repeat in 1..4usize,
    ) {
        let base = SortWord::new(to_sorts(&prefix), to_sorts(&period)).unwrap();

        let mut long_prefix = prefix.clone();
        let mut rotated = period.clone();
        for _ in 0..unroll {
            let head = rotated.remove(0);
            long_prefix.push(head);
            rotated.push(head);
        }
        let mut pumped = Vec::new();
        for _ in 0..repeat {
            pumped.extend(rotated.iter().copied());
        }
        let other = SortWord::new(to_sorts(&long_prefix), to_sorts(&pumped)).unwrap();

        prop_assert_eq!(&base, &other);
        prop_assert_eq!(base.omega_class(), other.omega_class());
    }

    /// Positional reads agree with the canonical form far past the prefix.
    #[test]
    fn positions_match_the_denoted_word((prefix, period) in word_parts(), i in 0..40usize) {
        let word = SortWord::new(to_sorts(&prefix), to_sorts(&period)).unwrap();
        let expected = if i < prefix.len() {
            prefix[i]
        } else {
            period[(i - prefix.len()) % period.len()]
        };
        prop_assert_eq!(word.at(i), SortIndex(expected));
    }

    /// When every occurring sort recurs, the canonical period carries all of
    /// them: the recurring set, the period content, and the full content of
    /// the word coincide.
    #[test]
    fn recurring_sorts_live_in_the_period((prefix, period) in word_parts()) {
        let word = SortWord::new(to_sorts(&prefix), to_sorts(&period)).unwrap();
        if let OmegaClass::InOmega { head, recurring } = word.omega_class() {
            prop_assert_eq!(head, word.at(0));
            let period_sorts: std::collections::BTreeSet<_> =
                word.period().iter().copied().collect();
            prop_assert_eq!(&recurring, &period_sorts);
            for s in word.prefix() {
                prop_assert!(recurring.contains(s));
            }
        }
    }
}

#[test]
fn phyla_are_disjoint_value_sets() {
    let sig = Signature::vector_space(FieldKind::Prime(3), 2);
    let scalars = sig.phylum_values(SortIndex(0)).unwrap();
    let vectors = sig.phylum_values(SortIndex(1)).unwrap();
    for s in &scalars {
        assert!(sig.contains(SortIndex(0), s));
        assert!(!sig.contains(SortIndex(1), s));
        for v in &vectors {
            assert_ne!(s, v);
            assert!(sig.contains(SortIndex(1), v));
            assert!(!sig.contains(SortIndex(0), v));
        }
    }
    assert_eq!(scalars.len(), 3);
    assert_eq!(vectors.len(), 9);
}
