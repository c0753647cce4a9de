//! Witnessed reductions between sorted sequences, their enumeration over
//! finite prefixes, and first-value sets.
//!
//! A reduction sends sequence `b` to sequence `a` by evaluating, at each
//! position `j`, an orderly term on a strictly increasing block of `b`, with
//! blocks strictly increasing across positions. Infinite sequences are
//! approximated by finite prefixes throughout.

use std::collections::{BTreeMap, HashMap};

use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::algebra::{OmegaClass, Signature, SortIndex, SortWord, Value};
use crate::terms::{enumerate_terms, OrderlyTerm, TermError};

/// Caps on the orderly terms a reduction may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TermBounds {
    pub max_term_size: usize,
    pub max_arity: usize,
}

impl TermBounds {
    pub fn new(max_term_size: usize, max_arity: usize) -> TermBounds {
        TermBounds { max_term_size, max_arity }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("value at position {position} is not in the phylum for sort {sort}")]
    PrefixSort { position: usize, sort: SortIndex },
    #[error("sort word mentions sort {sort} but the signature has {limit} phyla")]
    SortOutOfRange { sort: SortIndex, limit: usize },
    #[error("entry {entry}: term of arity {expected} given {got} indices")]
    IndexCount { entry: usize, expected: usize, got: usize },
    #[error("entry {entry}: indices must be strictly increasing")]
    IndicesNotIncreasing { entry: usize },
    #[error("entry {entry}: block must start after the previous block ends")]
    BlocksNotIncreasing { entry: usize },
    #[error("entry {entry}: index {index} out of range for a sequence of length {len}")]
    IndexOutOfRange { entry: usize, index: usize, len: usize },
    #[error("entry {entry}: term produces sort {got}, target word wants {expected}")]
    OutputSort { entry: usize, got: SortIndex, expected: SortIndex },
    #[error("entry {entry}: leaf {position} wants sort {expected}, sequence has {got}")]
    LeafSort { entry: usize, position: usize, expected: SortIndex, got: SortIndex },
    #[error("entry {entry}: {source}")]
    Term { entry: usize, source: TermError },
    #[error("composition refers to position {index} beyond inner witness length {len}")]
    ComposeIndex { index: usize, len: usize },
}

/// Finite prefix of an infinite sorted sequence: values paired with the
/// sequence's sort word. Construction validates every value against the
/// phylum its position demands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortedPrefix {
    values: Vec<Value>,
    sorts: SortWord,
}

impl SortedPrefix {
    pub fn new(
        sig: &Signature,
        values: Vec<Value>,
        sorts: SortWord,
    ) -> Result<SortedPrefix, ReductionError> {
        let max = sorts.max_sort();
        if max.0 >= sig.sort_count() {
            return Err(ReductionError::SortOutOfRange { sort: max, limit: sig.sort_count() });
        }
        for (position, v) in values.iter().enumerate() {
            let sort = sorts.at(position);
            if !sig.contains(sort, v) {
                return Err(ReductionError::PrefixSort { position, sort });
            }
        }
        Ok(SortedPrefix { values, sorts })
    }

    pub fn values(&self) -> &[Value] {
        &self.values
    }

    pub fn sorts(&self) -> &SortWord {
        &self.sorts
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &Value {
        &self.values[i]
    }
}

/// One position of a reduction: a term and the block of source indices it
/// consumes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessEntry {
    pub term: OrderlyTerm,
    pub indices: Vec<usize>,
}

/// Complete witness that one sequence reduces to another.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ReductionWitness {
    pub entries: Vec<WitnessEntry>,
}

impl ReductionWitness {
    /// Structural validation plus evaluation; `expected` additionally pins
    /// the sort word of the reduced sequence.
    fn run(
        &self,
        sig: &Signature,
        b: &SortedPrefix,
        expected: Option<&SortWord>,
    ) -> Result<Vec<Value>, ReductionError> {
        let mut out = Vec::with_capacity(self.entries.len());
        let mut cursor = 0usize;
        for (entry, we) in self.entries.iter().enumerate() {
            we.term
                .check(sig)
                .map_err(|source| ReductionError::Term { entry, source })?;
            let arg_sorts = we.term.arg_sorts();
            if we.indices.len() != arg_sorts.len() {
                return Err(ReductionError::IndexCount {
                    entry,
                    expected: arg_sorts.len(),
                    got: we.indices.len(),
                });
            }
            if !we.indices.windows(2).all(|w| w[0] < w[1]) {
                return Err(ReductionError::IndicesNotIncreasing { entry });
            }
            if let Some(&first) = we.indices.first() {
                if entry > 0 && first < cursor {
                    return Err(ReductionError::BlocksNotIncreasing { entry });
                }
            }
            for (position, (&index, &want)) in we.indices.iter().zip(&arg_sorts).enumerate() {
                if index >= b.len() {
                    return Err(ReductionError::IndexOutOfRange { entry, index, len: b.len() });
                }
                let got = b.sorts().at(index);
                if got != want {
                    return Err(ReductionError::LeafSort { entry, position, expected: want, got });
                }
            }
            if let Some(word) = expected {
                let got = we.term.out_sort(sig);
                let want = word.at(entry);
                if got != want {
                    return Err(ReductionError::OutputSort { entry, got, expected: want });
                }
            }
            let args: Vec<Value> = we.indices.iter().map(|&i| b.get(i).clone()).collect();
            let value = we
                .term
                .evaluate(sig, &args)
                .map_err(|source| ReductionError::Term { entry, source })?;
            out.push(value);
            if let Some(&last) = we.indices.last() {
                cursor = last + 1;
            }
        }
        Ok(out)
    }

    /// Validates the witness against `b` and returns the reduced values.
    pub fn apply(&self, sig: &Signature, b: &SortedPrefix) -> Result<Vec<Value>, ReductionError> {
        self.run(sig, b, None)
    }

    /// Like [`apply`](Self::apply), also checking each output against the
    /// target sort word.
    pub fn check(
        &self,
        sig: &Signature,
        b: &SortedPrefix,
        target_sorts: &SortWord,
    ) -> Result<Vec<Value>, ReductionError> {
        self.run(sig, b, Some(target_sorts))
    }

    /// `self` witnesses `c <= a` and `inner` witnesses `a <= b`; the result
    /// witnesses `c <= b` by grafting inner terms into the outer leaves.
    pub fn compose(&self, inner: &ReductionWitness) -> Result<ReductionWitness, ReductionError> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for (entry, we) in self.entries.iter().enumerate() {
            if we.indices.len() != we.term.arity() {
                return Err(ReductionError::IndexCount {
                    entry,
                    expected: we.term.arity(),
                    got: we.indices.len(),
                });
            }
            let mut terms = Vec::with_capacity(we.indices.len());
            let mut indices = Vec::new();
            for &i in &we.indices {
                let inner_entry = inner
                    .entries
                    .get(i)
                    .ok_or(ReductionError::ComposeIndex { index: i, len: inner.entries.len() })?;
                terms.push(inner_entry.term.clone());
                indices.extend(inner_entry.indices.iter().copied());
            }
            let mut replacements = terms.into_iter();
            let term = graft(&we.term, &mut replacements);
            entries.push(WitnessEntry { term, indices });
        }
        Ok(ReductionWitness { entries })
    }

    pub fn max_term_size(&self) -> usize {
        self.entries.iter().map(|e| e.term.size()).max().unwrap_or(0)
    }

    pub fn max_arity(&self) -> usize {
        self.entries.iter().map(|e| e.term.arity()).max().unwrap_or(0)
    }

    pub fn to_json(&self, sig: &Signature) -> Json {
        json!({
            "entries": self
                .entries
                .iter()
                .map(|e| json!({ "term": e.term.to_sexpr(sig), "indices": e.indices }))
                .collect::<Vec<_>>(),
        })
    }
}

fn graft(term: &OrderlyTerm, replacements: &mut impl Iterator<Item = OrderlyTerm>) -> OrderlyTerm {
    match term {
        OrderlyTerm::Leaf { .. } => replacements.next().expect("one replacement per leaf"),
        OrderlyTerm::Node { op, children } => OrderlyTerm::Node {
            op: *op,
            children: children.iter().map(|c| graft(c, replacements)).collect(),
        },
    }
}

/// A reduced prefix together with the witness that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub values: Vec<Value>,
    pub witness: ReductionWitness,
}

impl Reduction {
    /// Repackages the reduced values as a prefix of a `target_sorts`-sorted
    /// sequence.
    pub fn to_prefix(
        &self,
        sig: &Signature,
        target_sorts: &SortWord,
    ) -> Result<SortedPrefix, ReductionError> {
        SortedPrefix::new(sig, self.values.clone(), target_sorts.clone())
    }
}

/// Every reduction of `b` to a `target_sorts`-sorted prefix of length
/// `target_len`, using terms within `bounds`. Deterministic order: positions
/// filled left to right, terms in enumeration order, blocks in lexicographic
/// order.
pub fn enumerate_reductions(
    sig: &Signature,
    b: &SortedPrefix,
    target_sorts: &SortWord,
    target_len: usize,
    bounds: TermBounds,
) -> Result<Vec<Reduction>, ReductionError> {
    let max = target_sorts.max_sort();
    if max.0 >= sig.sort_count() {
        return Err(ReductionError::SortOutOfRange { sort: max, limit: sig.sort_count() });
    }
    let mut term_cache: HashMap<usize, Vec<OrderlyTerm>> = HashMap::new();
    for j in 0..target_len {
        let sort = target_sorts.at(j);
        term_cache.entry(sort.0).or_insert_with(|| {
            enumerate_terms(sig, sort, bounds.max_arity, bounds.max_term_size)
        });
    }
    let mut out = Vec::new();
    let mut values = Vec::new();
    let mut entries = Vec::new();
    extend_reduction(
        sig,
        b,
        target_sorts,
        target_len,
        &term_cache,
        0,
        0,
        &mut values,
        &mut entries,
        &mut out,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn extend_reduction(
    sig: &Signature,
    b: &SortedPrefix,
    target_sorts: &SortWord,
    target_len: usize,
    term_cache: &HashMap<usize, Vec<OrderlyTerm>>,
    position: usize,
    cursor: usize,
    values: &mut Vec<Value>,
    entries: &mut Vec<WitnessEntry>,
    out: &mut Vec<Reduction>,
) -> Result<(), ReductionError> {
    if position == target_len {
        out.push(Reduction {
            values: values.clone(),
            witness: ReductionWitness { entries: entries.clone() },
        });
        return Ok(());
    }
    let sort = target_sorts.at(position);
    for term in &term_cache[&sort.0] {
        let arg_sorts = term.arg_sorts();
        for indices in index_tuples(b, &arg_sorts, cursor) {
            let args: Vec<Value> = indices.iter().map(|&i| b.get(i).clone()).collect();
            let value = term
                .evaluate(sig, &args)
                .map_err(|source| ReductionError::Term { entry: position, source })?;
            let next_cursor = indices.last().copied().map_or(cursor, |last| last + 1);
            values.push(value);
            entries.push(WitnessEntry { term: term.clone(), indices });
            extend_reduction(
                sig,
                b,
                target_sorts,
                target_len,
                term_cache,
                position + 1,
                next_cursor,
                values,
                entries,
                out,
            )?;
            values.pop();
            entries.pop();
        }
    }
    Ok(())
}

/// Strictly increasing index tuples into `b` starting at or after `start`,
/// whose positions carry exactly `arg_sorts`, in lexicographic order.
fn index_tuples(b: &SortedPrefix, arg_sorts: &[SortIndex], start: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut acc = Vec::with_capacity(arg_sorts.len());
    fill_tuples(b, arg_sorts, start, &mut acc, &mut out);
    out
}

fn fill_tuples(
    b: &SortedPrefix,
    arg_sorts: &[SortIndex],
    start: usize,
    acc: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if acc.len() == arg_sorts.len() {
        out.push(acc.clone());
        return;
    }
    let want = arg_sorts[acc.len()];
    let remaining = arg_sorts.len() - acc.len();
    for i in start..=b.len().saturating_sub(remaining) {
        if b.sorts().at(i) == want {
            acc.push(i);
            fill_tuples(b, arg_sorts, i + 1, acc, out);
            acc.pop();
        }
    }
}

/// How a first-value set was computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrMode {
    /// Target word in Omega: single orderly terms over finite subsequences
    /// reach exactly the first-value set.
    DirectTerms,
    /// Target word not in Omega: reductions enumerated out to a finite
    /// length; complete only relative to bounds and that length.
    TruncatedReduction { target_len: usize },
}

/// First values of `target`-sorted reductions of a sequence, each with the
/// least witness that produced it.
#[derive(Clone, Debug)]
pub struct FrSet {
    pub witnesses: BTreeMap<Value, ReductionWitness>,
    pub bounds: TermBounds,
    pub mode: FrMode,
}

impl FrSet {
    pub fn elements(&self) -> Vec<Value> {
        self.witnesses.keys().cloned().collect()
    }

    pub fn contains(&self, v: &Value) -> bool {
        self.witnesses.contains_key(v)
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn to_json(&self, sig: &Signature) -> Json {
        json!({
            "mode": match &self.mode {
                FrMode::DirectTerms => json!("direct-terms"),
                FrMode::TruncatedReduction { target_len } =>
                    json!({ "truncated-to": target_len }),
            },
            "bounds": {
                "max_term_size": self.bounds.max_term_size,
                "max_arity": self.bounds.max_arity,
            },
            "elements": self
                .witnesses
                .iter()
                .map(|(v, w)| json!({
                    "value": sig.display_value(v),
                    "witness": w.to_json(sig),
                }))
                .collect::<Vec<_>>(),
        })
    }
}

/// First-value set of `target_sorts`-sorted reductions of `b`, within term
/// `bounds`. Words in Omega take the direct single-term route; words outside
/// Omega enumerate reductions of length `n* + 2`.
pub fn fr_set(
    sig: &Signature,
    b: &SortedPrefix,
    target_sorts: &SortWord,
    bounds: TermBounds,
) -> Result<FrSet, ReductionError> {
    let max = target_sorts.max_sort();
    if max.0 >= sig.sort_count() {
        return Err(ReductionError::SortOutOfRange { sort: max, limit: sig.sort_count() });
    }
    let mut witnesses: BTreeMap<Value, ReductionWitness> = BTreeMap::new();
    match target_sorts.omega_class() {
        OmegaClass::InOmega { head, .. } => {
            for term in enumerate_terms(sig, head, bounds.max_arity, bounds.max_term_size) {
                let arg_sorts = term.arg_sorts();
                for indices in index_tuples(b, &arg_sorts, 0) {
                    let args: Vec<Value> = indices.iter().map(|&i| b.get(i).clone()).collect();
                    let value = term
                        .evaluate(sig, &args)
                        .map_err(|source| ReductionError::Term { entry: 0, source })?;
                    witnesses.entry(value).or_insert_with(|| ReductionWitness {
                        entries: vec![WitnessEntry { term: term.clone(), indices }],
                    });
                }
            }
            Ok(FrSet { witnesses, bounds, mode: FrMode::DirectTerms })
        }
        OmegaClass::NotInOmega { n_star, .. } => {
            let target_len = n_star + 2;
            for red in enumerate_reductions(sig, b, target_sorts, target_len, bounds)? {
                witnesses
                    .entry(red.values[0].clone())
                    .or_insert(red.witness);
            }
            Ok(FrSet {
                witnesses,
                bounds,
                mode: FrMode::TruncatedReduction { target_len },
            })
        }
    }
}

/// Outcome of checking `FR(a) ⊆ FR(b)` for a witnessed reduction `a <= b`.
/// The outer set is computed at bounds wide enough to hold every composite
/// of an inner first-value term with witness terms: grafting a term of size
/// `s` and arity `k` onto witness entries of size at most `w` yields size at
/// most `s + k·w`.
#[derive(Clone, Debug)]
pub struct MonotoneReport {
    pub inner: FrSet,
    pub outer: FrSet,
    pub outer_bounds: TermBounds,
    pub missing: Vec<Value>,
}

impl MonotoneReport {
    pub fn holds(&self) -> bool {
        self.missing.is_empty()
    }
}

pub fn fr_monotone_check(
    sig: &Signature,
    b: &SortedPrefix,
    witness: &ReductionWitness,
    target_sorts: &SortWord,
    bounds: TermBounds,
) -> Result<MonotoneReport, ReductionError> {
    let a_values = witness.apply(sig, b)?;
    let a_sorts: Vec<SortIndex> = witness.entries.iter().map(|e| e.term.out_sort(sig)).collect();
    let a_word = SortWord::new(a_sorts, target_sorts.period().to_vec())
        .expect("period of an existing word is nonempty");
    let a = SortedPrefix::new(sig, a_values, a_word)?;
    let inner = fr_set(sig, &a, target_sorts, bounds)?;
    let w_size = witness.max_term_size();
    let w_arity = witness.max_arity().max(1);
    let outer_bounds = TermBounds {
        max_term_size: bounds.max_term_size + bounds.max_arity * w_size,
        max_arity: bounds.max_arity * w_arity,
    };
    let outer = fr_set(sig, b, target_sorts, outer_bounds)?;
    let missing = inner
        .witnesses
        .keys()
        .filter(|v| !outer.contains(v))
        .cloned()
        .collect();
    Ok(MonotoneReport { inner, outer, outer_bounds, missing })
}
