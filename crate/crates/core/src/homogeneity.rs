//! Homogeneity search: reductions whose first-value sets land in a single
//! cell of a finite coloring, the explicit zero-scalar and sorted-merge
//! constructions behind the positive classification theorems, and the
//! semigroup specialization of the search.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::algebra::{
    Evaluator, FieldKind, OpIndex, Phylum, Scalar, Signature, SortIndex, SortWord, Value,
};
use crate::reduction::{
    enumerate_reductions, fr_set, ReductionError, ReductionWitness, SortedPrefix, TermBounds,
    WitnessEntry,
};
use crate::terms::OrderlyTerm;

#[derive(Debug, Error)]
pub enum HomogeneityError {
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("coloring `{name}` must have at least one color")]
    NoColors { name: String },
    #[error("coloring assigns color {color} but declares {num_colors} colors")]
    ColorOutOfRange { color: usize, num_colors: usize },
    #[error("not a semigroup: {reason}")]
    NotSemigroup { reason: String },
    #[error("operation `{op}` crosses phyla; the merge needs phylum-disjoint operations")]
    NotDisjoint { op: String },
    #[error("rho must be a scalar value")]
    RhoNotScalar,
    #[error("rho must lie in a prime field")]
    RhoNotPrimeField,
    #[error("s must be positive")]
    ZeroFold,
    #[error("the {s}-fold sum of rho is {got}, not zero")]
    RhoOrder { s: usize, got: String },
    #[error("no phylum carries the field of rho")]
    NoScalarPhylum,
    #[error("no field-addition operation on the scalar phylum")]
    NoFieldAdd,
    #[error("position {position}: needs at least {needed_more} more occurrences of rho")]
    InsufficientRho { position: usize, needed_more: usize, partial: Vec<Value> },
    #[error("position {position}: prefix has no further element of sort {sort}")]
    PrefixExhausted { position: usize, sort: SortIndex, partial: Vec<Value> },
    #[error("position {position}: no unused alpha block starts at or after index {cursor}")]
    AlphaExhausted { position: usize, cursor: usize, partial: Vec<Value> },
    #[error("alpha prefix must be constant-sorted")]
    AlphaNotConstant,
    #[error("{entries} alpha witness entries for {values} alpha values")]
    AlphaWitnessCount { entries: usize, values: usize },
    #[error("alpha witness evaluates to {got} at entry {entry}, alpha prefix holds {want}")]
    AlphaMismatch { entry: usize, got: String, want: String },
}

/// Total map from one phylum into colors `0..num_colors`.
#[derive(Clone)]
pub struct Coloring {
    pub name: String,
    pub num_colors: usize,
    classify: Arc<dyn Fn(&Value) -> usize + Send + Sync>,
}

impl fmt::Debug for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coloring")
            .field("name", &self.name)
            .field("num_colors", &self.num_colors)
            .finish_non_exhaustive()
    }
}

impl Coloring {
    pub fn new(
        name: impl Into<String>,
        num_colors: usize,
        classify: impl Fn(&Value) -> usize + Send + Sync + 'static,
    ) -> Coloring {
        Coloring { name: name.into(), num_colors, classify: Arc::new(classify) }
    }

    /// Table-backed coloring; values outside the table take `default`, or an
    /// out-of-range color when no default is given (flagged during search).
    pub fn from_table(
        name: impl Into<String>,
        num_colors: usize,
        table: BTreeMap<Value, usize>,
        default: Option<usize>,
    ) -> Coloring {
        let fallback = default.unwrap_or(num_colors);
        Coloring::new(name, num_colors, move |v| {
            table.get(v).copied().unwrap_or(fallback)
        })
    }

    /// One color: everything is monochromatic.
    pub fn single(name: impl Into<String>) -> Coloring {
        Coloring::new(name, 1, |_| 0)
    }

    /// Two colors: 0 inside the set, 1 outside.
    pub fn indicator(
        name: impl Into<String>,
        inside: impl Fn(&Value) -> bool + Send + Sync + 'static,
    ) -> Coloring {
        Coloring::new(name, 2, move |v| usize::from(!inside(v)))
    }

    pub fn classify(&self, v: &Value) -> usize {
        (self.classify)(v)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Candidate reductions enumerated.
    pub nodes: usize,
    /// Candidates whose first-value set was computed and colored.
    pub inspected: usize,
    /// Largest witness term size among scanned candidates.
    pub max_depth: usize,
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Found { prefix: SortedPrefix, witness: ReductionWitness, color: usize },
    Exhausted { bounds: TermBounds, target_len: usize },
}

#[derive(Clone, Debug)]
pub struct HomogeneityReport {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

impl HomogeneityReport {
    pub fn found(&self) -> bool {
        matches!(self.outcome, Outcome::Found { .. })
    }

    /// Re-derives everything a `Found` outcome claims: the witness reduces
    /// `b` to the prefix, and the prefix's first-value set is nonempty and
    /// entirely the reported color.
    pub fn verify(
        &self,
        sig: &Signature,
        b: &SortedPrefix,
        coloring: &Coloring,
        bounds: TermBounds,
    ) -> Result<(), String> {
        let Outcome::Found { prefix, witness, color } = &self.outcome else {
            return Ok(());
        };
        let e = prefix.sorts();
        let values = witness
            .check(sig, b, e)
            .map_err(|err| format!("witness fails: {err}"))?;
        if values != prefix.values() {
            return Err("witness does not reproduce the reported prefix".to_string());
        }
        let fr = fr_set(sig, prefix, e, bounds).map_err(|err| err.to_string())?;
        if fr.is_empty() {
            return Err("first-value set is empty".to_string());
        }
        for v in fr.witnesses.keys() {
            let got = coloring.classify(v);
            if got != *color {
                return Err(format!(
                    "first-value {} has color {got}, report claims {color}",
                    sig.display_value(v)
                ));
            }
        }
        Ok(())
    }

    pub fn to_json(&self, sig: &Signature) -> Json {
        let stats = json!({
            "nodes": self.stats.nodes,
            "inspected": self.stats.inspected,
            "max_depth": self.stats.max_depth,
        });
        match &self.outcome {
            Outcome::Found { prefix, witness, color } => json!({
                "outcome": "found",
                "color": color,
                "a": prefix.values().iter().map(|v| sig.display_value(v)).collect::<Vec<_>>(),
                "witness": witness.to_json(sig)["entries"],
                "stats": stats,
            }),
            Outcome::Exhausted { bounds, target_len } => json!({
                "outcome": "exhausted",
                "bounds": {
                    "max_term_size": bounds.max_term_size,
                    "max_arity": bounds.max_arity,
                },
                "target_len": target_len,
                "stats": stats,
            }),
        }
    }
}

/// Searches the e-sorted reductions of `b` (length `target_len`, terms within
/// `bounds`) for one whose first-value set is monochromatic. Candidates are
/// scanned in iterative-deepening order — witness size first, lexicographic
/// within — so the first hit is the least witness. Candidates whose
/// first-value set is empty at this scale are skipped: a homogeneity claim
/// needs evidence.
pub fn find_homogeneous(
    sig: &Signature,
    b: &SortedPrefix,
    e: &SortWord,
    coloring: &Coloring,
    target_len: usize,
    bounds: TermBounds,
) -> Result<HomogeneityReport, HomogeneityError> {
    if coloring.num_colors == 0 {
        return Err(HomogeneityError::NoColors { name: coloring.name.clone() });
    }
    let mut candidates = enumerate_reductions(sig, b, e, target_len, bounds)?;
    candidates.sort_by_key(|c| c.witness.max_term_size());
    let nodes = candidates.len();
    let mut inspected = 0;
    let mut max_depth = 0;
    for cand in &candidates {
        max_depth = max_depth.max(cand.witness.max_term_size());
        let a = cand.to_prefix(sig, e)?;
        let fr = fr_set(sig, &a, e, bounds)?;
        if fr.is_empty() {
            continue;
        }
        inspected += 1;
        let mut colors = fr.witnesses.keys().map(|v| coloring.classify(v));
        let first = colors.next().expect("nonempty first-value set");
        if first >= coloring.num_colors {
            return Err(HomogeneityError::ColorOutOfRange {
                color: first,
                num_colors: coloring.num_colors,
            });
        }
        if colors.all(|c| c == first) {
            return Ok(HomogeneityReport {
                outcome: Outcome::Found {
                    prefix: a,
                    witness: cand.witness.clone(),
                    color: first,
                },
                stats: SearchStats { nodes, inspected, max_depth },
            });
        }
    }
    Ok(HomogeneityReport {
        outcome: Outcome::Exhausted { bounds, target_len },
        stats: SearchStats { nodes, inspected, max_depth },
    })
}

/// The zero-scalar construction: an e-sorted reduction of `b` whose scalar
/// positions all evaluate to zero, formed by summing `s` copies of `rho`
/// (requiring `s·rho = 0`), and whose other positions copy `b` in order.
/// With `target_len: None` the construction runs greedily until `b` is
/// exhausted; with a target it either reaches it or reports the shortfall.
pub fn zero_scalar_reduction(
    sig: &Signature,
    b: &SortedPrefix,
    e: &SortWord,
    rho: &Value,
    s: usize,
    target_len: Option<usize>,
) -> Result<(SortedPrefix, ReductionWitness), HomogeneityError> {
    let scalar = rho.as_scalar().ok_or(HomogeneityError::RhoNotScalar)?;
    let FieldKind::Prime(_) = scalar.field() else {
        return Err(HomogeneityError::RhoNotPrimeField);
    };
    if s == 0 {
        return Err(HomogeneityError::ZeroFold);
    }
    let mut acc = Scalar::zero(scalar.field());
    for _ in 0..s {
        acc = acc.add(scalar);
    }
    if !acc.is_zero() {
        return Err(HomogeneityError::RhoOrder { s, got: acc.to_string() });
    }
    let scalar_sort = (0..sig.sort_count())
        .map(SortIndex)
        .find(|ix| sig.phyla[ix.0] == Phylum::Field(scalar.field()))
        .ok_or(HomogeneityError::NoScalarPhylum)?;
    let plus_f = sig
        .ops
        .iter()
        .position(|o| o.eval == Evaluator::FieldAdd && o.out_sort == scalar_sort)
        .map(OpIndex);
    if s > 1 && plus_f.is_none() {
        return Err(HomogeneityError::NoFieldAdd);
    }

    let mut entries: Vec<WitnessEntry> = Vec::new();
    let mut values: Vec<Value> = Vec::new();
    let mut cursor = 0usize;
    let mut position = 0usize;
    loop {
        if let Some(t) = target_len {
            if position == t {
                break;
            }
        }
        let sort = e.at(position);
        if sort == scalar_sort {
            let mut picked = Vec::with_capacity(s);
            let mut i = cursor;
            while i < b.len() && picked.len() < s {
                if b.sorts().at(i) == scalar_sort && b.get(i) == rho {
                    picked.push(i);
                }
                i += 1;
            }
            if picked.len() < s {
                let Some(t) = target_len else { break };
                let remaining_slots =
                    (position..t).filter(|&j| e.at(j) == scalar_sort).count();
                let rho_left = (cursor..b.len())
                    .filter(|&i| b.sorts().at(i) == scalar_sort && b.get(i) == rho)
                    .count();
                return Err(HomogeneityError::InsufficientRho {
                    position,
                    needed_more: s * remaining_slots - rho_left,
                    partial: values,
                });
            }
            let term = if s == 1 {
                OrderlyTerm::Leaf { sort: scalar_sort }
            } else {
                fold_term(plus_f.expect("checked above"), scalar_sort, s)
            };
            cursor = picked.last().expect("s > 0") + 1;
            values.push(Value::Scalar(Scalar::zero(scalar.field())));
            entries.push(WitnessEntry { term, indices: picked });
        } else {
            let found = (cursor..b.len()).find(|&i| b.sorts().at(i) == sort);
            let Some(i) = found else {
                let Some(_) = target_len else { break };
                return Err(HomogeneityError::PrefixExhausted { position, sort, partial: values });
            };
            cursor = i + 1;
            values.push(b.get(i).clone());
            entries.push(WitnessEntry {
                term: OrderlyTerm::Leaf { sort },
                indices: vec![i],
            });
        }
        position += 1;
    }

    let witness = ReductionWitness { entries };
    let checked = witness.check(sig, b, e)?;
    debug_assert_eq!(checked, values);
    let prefix = SortedPrefix::new(sig, checked, e.clone())?;
    Ok((prefix, witness))
}

/// Left-nested fold of `k` leaves under one binary operation.
fn fold_term(op: OpIndex, sort: SortIndex, k: usize) -> OrderlyTerm {
    let mut t = OrderlyTerm::Leaf { sort };
    for _ in 1..k {
        t = OrderlyTerm::Node {
            op,
            children: vec![t, OrderlyTerm::Leaf { sort }],
        };
    }
    t
}

/// The sorted-merge recursion: interleaves the witnessed reduction `alpha`
/// of `b`'s η-subsequence with direct picks from `b`'s other phyla to build
/// an e-sorted reduction of length `target_len`. At an η position the next
/// α block starting past the cursor is consumed (blocks are consumed in
/// order); at any other position the first remaining `b` element of that
/// sort is copied. Requires phylum-disjoint operations, the setting in which
/// the merged sequence provably inherits α's first-value set.
pub fn merge_sorted_reduction(
    sig: &Signature,
    alpha: &SortedPrefix,
    b: &SortedPrefix,
    e: &SortWord,
    eta_entries: &[WitnessEntry],
    target_len: usize,
) -> Result<(SortedPrefix, ReductionWitness), HomogeneityError> {
    for op in &sig.ops {
        if !op.arg_sorts.iter().all(|&a| a == op.out_sort) {
            return Err(HomogeneityError::NotDisjoint { op: op.name.clone() });
        }
    }
    if !alpha.sorts().prefix().is_empty() || alpha.sorts().period().len() != 1 {
        return Err(HomogeneityError::AlphaNotConstant);
    }
    let eta = alpha.sorts().at(0);
    if eta_entries.len() != alpha.len() {
        return Err(HomogeneityError::AlphaWitnessCount {
            entries: eta_entries.len(),
            values: alpha.len(),
        });
    }
    let alpha_witness = ReductionWitness { entries: eta_entries.to_vec() };
    let produced = alpha_witness.check(sig, b, alpha.sorts())?;
    for (entry, (got, want)) in produced.iter().zip(alpha.values()).enumerate() {
        if got != want {
            return Err(HomogeneityError::AlphaMismatch {
                entry,
                got: sig.display_value(got),
                want: sig.display_value(want),
            });
        }
    }

    let mut entries: Vec<WitnessEntry> = Vec::new();
    let mut values: Vec<Value> = Vec::new();
    let mut cursor = 0usize;
    let mut alpha_cursor = 0usize;
    for position in 0..target_len {
        let sort = e.at(position);
        if sort == eta {
            while alpha_cursor < eta_entries.len()
                && eta_entries[alpha_cursor].indices[0] < cursor
            {
                alpha_cursor += 1;
            }
            if alpha_cursor == eta_entries.len() {
                return Err(HomogeneityError::AlphaExhausted {
                    position,
                    cursor,
                    partial: values,
                });
            }
            let entry = eta_entries[alpha_cursor].clone();
            cursor = entry.indices.last().expect("terms have arity >= 1") + 1;
            values.push(alpha.get(alpha_cursor).clone());
            entries.push(entry);
            alpha_cursor += 1;
        } else {
            let found = (cursor..b.len()).find(|&i| b.sorts().at(i) == sort);
            let Some(i) = found else {
                return Err(HomogeneityError::PrefixExhausted { position, sort, partial: values });
            };
            cursor = i + 1;
            values.push(b.get(i).clone());
            entries.push(WitnessEntry {
                term: OrderlyTerm::Leaf { sort },
                indices: vec![i],
            });
        }
    }

    let witness = ReductionWitness { entries };
    let checked = witness.check(sig, b, e)?;
    debug_assert_eq!(checked, values);
    let prefix = SortedPrefix::new(sig, checked, e.clone())?;
    Ok((prefix, witness))
}

/// Semigroup specialization of the search: over one associative binary
/// operation every term of arity `k` folds to the same value, so candidates
/// are tuples of block sums and first-value sets are bounded subset sums.
/// Outcomes agree exactly with [`find_homogeneous`] at the same bounds.
pub fn hindman_search(
    sig: &Signature,
    b: &SortedPrefix,
    coloring: &Coloring,
    target_len: usize,
    bounds: TermBounds,
) -> Result<HomogeneityReport, HomogeneityError> {
    if coloring.num_colors == 0 {
        return Err(HomogeneityError::NoColors { name: coloring.name.clone() });
    }
    let op = semigroup_op(sig)?;
    let sort = SortIndex(0);
    let word = SortWord::constant(sort);
    // A term over one binary operation of size <= S has at most S+1 leaves.
    let max_block = bounds.max_arity.min(bounds.max_term_size + 1);

    let mut candidates: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut acc = Vec::new();
    collect_blocks(b.len(), target_len, max_block, 0, &mut acc, &mut candidates);
    candidates.sort_by_key(|blocks| blocks.iter().map(Vec::len).max().unwrap_or(0));

    let nodes = candidates.len();
    let mut inspected = 0;
    let mut max_depth = 0;
    for blocks in &candidates {
        let depth = blocks.iter().map(Vec::len).max().unwrap_or(1) - 1;
        max_depth = max_depth.max(depth);
        let mut values = Vec::with_capacity(blocks.len());
        for block in blocks {
            values.push(fold_values(sig, op, block.iter().map(|&i| b.get(i)))?);
        }
        inspected += 1;
        let mut mono: Option<usize> = None;
        let mut ok = true;
        'subsets: for k in 1..=max_block.min(values.len()) {
            for subset in (0..values.len()).combinations(k) {
                let sum = fold_values(sig, op, subset.iter().map(|&i| &values[i]))?;
                let color = coloring.classify(&sum);
                if color >= coloring.num_colors {
                    return Err(HomogeneityError::ColorOutOfRange {
                        color,
                        num_colors: coloring.num_colors,
                    });
                }
                match mono {
                    None => mono = Some(color),
                    Some(c) if c != color => {
                        ok = false;
                        break 'subsets;
                    }
                    Some(_) => {}
                }
            }
        }
        if ok {
            if let Some(color) = mono {
                let entries = blocks
                    .iter()
                    .map(|block| WitnessEntry {
                        term: fold_term(op, sort, block.len()),
                        indices: block.clone(),
                    })
                    .collect();
                let witness = ReductionWitness { entries };
                let prefix = SortedPrefix::new(sig, values, word.clone())?;
                return Ok(HomogeneityReport {
                    outcome: Outcome::Found { prefix, witness, color },
                    stats: SearchStats { nodes, inspected, max_depth },
                });
            }
        }
    }
    Ok(HomogeneityReport {
        outcome: Outcome::Exhausted { bounds, target_len },
        stats: SearchStats { nodes, inspected, max_depth },
    })
}

fn semigroup_op(sig: &Signature) -> Result<OpIndex, HomogeneityError> {
    let fail = |reason: &str| HomogeneityError::NotSemigroup { reason: reason.to_string() };
    if sig.sort_count() != 1 {
        return Err(fail("more than one phylum"));
    }
    if sig.op_count() != 1 {
        return Err(fail("need exactly one operation"));
    }
    let def = &sig.ops[0];
    if def.arity() != 2 || def.arg_sorts != vec![SortIndex(0); 2] || def.out_sort != SortIndex(0) {
        return Err(fail("operation is not binary on the single phylum"));
    }
    match &def.eval {
        Evaluator::FieldAdd | Evaluator::FieldMul | Evaluator::VectorAdd => {}
        Evaluator::Const(_) => {}
        Evaluator::Table(_) => {
            let Some(values) = sig.phylum_values(SortIndex(0)) else {
                return Err(fail("cannot enumerate the carrier to verify associativity"));
            };
            let op = OpIndex(0);
            for x in &values {
                for y in &values {
                    let xy = sig.evaluate_op(op, &[x.clone(), y.clone()])?;
                    for z in &values {
                        let left = sig.evaluate_op(op, &[xy.clone(), z.clone()])?;
                        let yz = sig.evaluate_op(op, &[y.clone(), z.clone()])?;
                        let right = sig.evaluate_op(op, &[x.clone(), yz])?;
                        if left != right {
                            return Err(fail("operation is not associative"));
                        }
                    }
                }
            }
        }
        _ => return Err(fail("operation is not a binary semigroup product")),
    }
    Ok(OpIndex(0))
}

fn fold_values<'v>(
    sig: &Signature,
    op: OpIndex,
    mut items: impl Iterator<Item = &'v Value>,
) -> Result<Value, HomogeneityError> {
    let first = items.next().expect("blocks are nonempty").clone();
    let mut acc = first;
    for v in items {
        acc = sig.evaluate_op(op, &[acc, v.clone()]).map_err(|e| {
            HomogeneityError::Reduction(ReductionError::Term {
                entry: 0,
                source: e.into(),
            })
        })?;
    }
    Ok(acc)
}

impl From<crate::algebra::EvalError> for HomogeneityError {
    fn from(e: crate::algebra::EvalError) -> Self {
        HomogeneityError::Reduction(ReductionError::Term { entry: 0, source: e.into() })
    }
}

fn collect_blocks(
    n: usize,
    target: usize,
    max_block: usize,
    cursor: usize,
    acc: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    if acc.len() == target {
        out.push(acc.clone());
        return;
    }
    for size in 1..=max_block {
        if cursor + size > n {
            break;
        }
        for tuple in (cursor..n).combinations(size) {
            let next = tuple.last().copied().expect("size >= 1") + 1;
            acc.push(tuple);
            collect_blocks(n, target, max_block, next, acc, out);
            acc.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{OperationDef, VectorElem};
    use num::Integer;

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

    fn rat(n: i64) -> Value {
        Value::Scalar(Scalar::from_integer(FieldKind::Rationals, n))
    }

    fn rat_prefix(sig: &Signature, ns: &[i64]) -> SortedPrefix {
        SortedPrefix::new(
            sig,
            ns.iter().map(|&n| rat(n)).collect(),
            SortWord::constant(SortIndex(0)),
        )
        .unwrap()
    }

    fn parity() -> Coloring {
        Coloring::new("parity", 2, |v| match v {
            Value::Scalar(Scalar::Rat(r)) => usize::from(!r.numer().is_even()),
            _ => 0,
        })
    }

    #[test]
    fn parity_search_finds_the_even_subsequence() {
        let sig = additive_rationals();
        let b = rat_prefix(&sig, &[1, 2, 4, 8, 16, 32]);
        let e = SortWord::constant(SortIndex(0));
        let bounds = TermBounds::new(2, 3);
        let report = find_homogeneous(&sig, &b, &e, &parity(), 3, bounds).unwrap();
        let Outcome::Found { prefix, witness, color } = &report.outcome else {
            panic!("expected Found, got {:?}", report.outcome);
        };
        assert_eq!(prefix.values(), &[rat(2), rat(4), rat(8)]);
        assert_eq!(*color, 0);
        let picks: Vec<_> = witness.entries.iter().map(|en| en.indices.clone()).collect();
        assert_eq!(picks, vec![vec![1], vec![2], vec![3]]);
        report.verify(&sig, &b, &parity(), bounds).unwrap();
    }

    #[test]
    fn single_color_returns_the_identity_reduction() {
        let sig = additive_rationals();
        let b = rat_prefix(&sig, &[1, 2, 4]);
        let e = SortWord::constant(SortIndex(0));
        let coloring = Coloring::single("all");
        let report =
            find_homogeneous(&sig, &b, &e, &coloring, 2, TermBounds::new(1, 2)).unwrap();
        let Outcome::Found { prefix, witness, color } = &report.outcome else {
            panic!("expected Found");
        };
        assert_eq!(prefix.values(), &b.values()[..2]);
        assert_eq!(*color, 0);
        assert!(witness.entries.iter().all(|en| en.term.size() == 0));
    }

    #[test]
    fn two_constant_ops_defeat_every_candidate() {
        // Two atom phyla; a binary constant a0 on phylum 0 and a unary map
        // from phylum 1 constantly equal to a different element a1 of
        // phylum 0. Any reduction sorted to hit both phyla has both
        // constants in its first-value set, so the indicator of {a0} admits
        // no homogeneous reduction at any scale.
        let a0 = Value::Atom { phylum: SortIndex(0), ordinal: 0 };
        let a1 = Value::Atom { phylum: SortIndex(0), ordinal: 1 };
        let sig = Signature {
            phyla: vec![
                Phylum::Atoms { names: vec!["a0".into(), "a1".into(), "p".into(), "q".into()] },
                Phylum::Atoms { names: vec!["u".into(), "v".into()] },
            ],
            phylum_names: vec!["A0".to_string(), "A1".to_string()],
            ops: vec![
                OperationDef {
                    name: "circ".to_string(),
                    arg_sorts: vec![SortIndex(0), SortIndex(0)],
                    out_sort: SortIndex(0),
                    eval: Evaluator::Const(a0.clone()),
                },
                OperationDef {
                    name: "h".to_string(),
                    arg_sorts: vec![SortIndex(1)],
                    out_sort: SortIndex(0),
                    eval: Evaluator::Const(a1),
                },
            ],
        };
        let e = SortWord::new(vec![], vec![SortIndex(0), SortIndex(1)]).unwrap();
        let p = Value::Atom { phylum: SortIndex(0), ordinal: 2 };
        let q = Value::Atom { phylum: SortIndex(0), ordinal: 3 };
        let u = Value::Atom { phylum: SortIndex(1), ordinal: 0 };
        let v = Value::Atom { phylum: SortIndex(1), ordinal: 1 };
        let b = SortedPrefix::new(&sig, vec![p, u, q, v], e.clone()).unwrap();
        let coloring = Coloring::indicator("is-a0", move |val| *val == a0);
        let report =
            find_homogeneous(&sig, &b, &e, &coloring, 3, TermBounds::new(1, 2)).unwrap();
        assert!(!report.found());
        assert!(report.stats.inspected >= 1);
    }

    #[test]
    fn zero_scalar_reduction_cancels_gf2_pairs() {
        let sig = Signature::vector_space(FieldKind::Prime(2), 2);
        let k = FieldKind::Prime(2);
        let e = SortWord::new(vec![], vec![SortIndex(0), SortIndex(1)]).unwrap();
        let one = Value::Scalar(Scalar::one(k));
        let vec_at = |c: &[i64]| Value::Vector(VectorElem::from_integers(k, c));
        let b = SortedPrefix::new(
            &sig,
            vec![
                one.clone(),
                vec_at(&[1, 0]),
                one.clone(),
                vec_at(&[0, 1]),
                one.clone(),
                vec_at(&[1, 1]),
                one.clone(),
                vec_at(&[1, 0]),
            ],
            e.clone(),
        )
        .unwrap();
        let (prefix, witness) =
            zero_scalar_reduction(&sig, &b, &e, &one, 2, Some(4)).unwrap();
        assert_eq!(
            prefix.values(),
            &[
                Value::Scalar(Scalar::zero(k)),
                vec_at(&[0, 1]),
                Value::Scalar(Scalar::zero(k)),
                vec_at(&[1, 0]),
            ]
        );
        assert_eq!(witness.entries[0].indices, vec![0, 2]);
        assert_eq!(witness.entries[1].indices, vec![3]);
        assert_eq!(witness.entries[2].indices, vec![4, 6]);
        assert_eq!(witness.entries[3].indices, vec![7]);

        let err = zero_scalar_reduction(&sig, &b, &e, &one, 2, Some(5)).unwrap_err();
        let HomogeneityError::InsufficientRho { position, needed_more, partial } = err else {
            panic!("expected InsufficientRho");
        };
        assert_eq!(position, 4);
        assert_eq!(needed_more, 2);
        assert_eq!(partial.len(), 4);
    }

    #[test]
    fn zero_scalar_reduction_triples_in_gf3() {
        let sig = Signature::vector_space(FieldKind::Prime(3), 1);
        let k = FieldKind::Prime(3);
        let e = SortWord::constant(SortIndex(0));
        let two = Value::Scalar(Scalar::from_integer(k, 2));
        let b = SortedPrefix::new(&sig, vec![two.clone(); 6], e.clone()).unwrap();
        let (prefix, witness) = zero_scalar_reduction(&sig, &b, &e, &two, 3, Some(2)).unwrap();
        assert_eq!(prefix.values(), vec![Value::Scalar(Scalar::zero(k)); 2]);
        assert_eq!(witness.entries[0].indices, vec![0, 1, 2]);
        assert_eq!(witness.entries[0].term.size(), 2);
        assert_eq!(witness.entries[1].indices, vec![3, 4, 5]);
    }

    #[test]
    fn zero_scalar_reduction_passes_vectors_through() {
        let sig = Signature::vector_space(FieldKind::Prime(2), 2);
        let k = FieldKind::Prime(2);
        let e = SortWord::constant(SortIndex(1));
        let vecs: Vec<Value> = (0..2)
            .map(|i| Value::Vector(VectorElem::basis(k, 2, i)))
            .collect();
        let b = SortedPrefix::new(&sig, vecs.clone(), e.clone()).unwrap();
        let one = Value::Scalar(Scalar::one(k));
        let (prefix, _) = zero_scalar_reduction(&sig, &b, &e, &one, 2, None).unwrap();
        assert_eq!(prefix.values(), &vecs[..]);
    }

    fn disjoint_atoms() -> Signature {
        Signature {
            phyla: vec![
                Phylum::Atoms { names: vec!["x0".into(), "x1".into(), "x2".into()] },
                Phylum::Atoms { names: vec!["y0".into(), "y1".into(), "y2".into()] },
            ],
            phylum_names: vec!["X".to_string(), "Y".to_string()],
            ops: vec![
                OperationDef {
                    name: "u".to_string(),
                    arg_sorts: vec![SortIndex(0)],
                    out_sort: SortIndex(0),
                    eval: Evaluator::Const(Value::Atom { phylum: SortIndex(0), ordinal: 0 }),
                },
                OperationDef {
                    name: "w".to_string(),
                    arg_sorts: vec![SortIndex(1)],
                    out_sort: SortIndex(1),
                    eval: Evaluator::Const(Value::Atom { phylum: SortIndex(1), ordinal: 0 }),
                },
            ],
        }
    }

    #[test]
    fn merge_interleaves_phyla_in_sort_order() {
        let sig = disjoint_atoms();
        let x = |o| Value::Atom { phylum: SortIndex(0), ordinal: o };
        let y = |o| Value::Atom { phylum: SortIndex(1), ordinal: o };
        let e = SortWord::new(vec![], vec![SortIndex(0), SortIndex(1)]).unwrap();
        let b = SortedPrefix::new(
            &sig,
            vec![x(0), y(0), x(1), y(1), x(2), y(2)],
            e.clone(),
        )
        .unwrap();
        let alpha = SortedPrefix::new(
            &sig,
            vec![x(0), x(1), x(2)],
            SortWord::constant(SortIndex(0)),
        )
        .unwrap();
        let leaf = OrderlyTerm::Leaf { sort: SortIndex(0) };
        let eta_entries: Vec<WitnessEntry> = [0usize, 2, 4]
            .iter()
            .map(|&i| WitnessEntry { term: leaf.clone(), indices: vec![i] })
            .collect();

        // Alternating target: the merge reproduces b itself.
        let (merged, witness) =
            merge_sorted_reduction(&sig, &alpha, &b, &e, &eta_entries, 6).unwrap();
        assert_eq!(merged.values(), b.values());
        assert_eq!(witness.entries.len(), 6);

        // Constant-eta target: the merge is alpha itself.
        let e0 = SortWord::constant(SortIndex(0));
        let (merged0, _) =
            merge_sorted_reduction(&sig, &alpha, &b, &e0, &eta_entries, 3).unwrap();
        assert_eq!(merged0.values(), alpha.values());

        // Exhaustion reports the failing position and partial output.
        let err = merge_sorted_reduction(&sig, &alpha, &b, &e, &eta_entries, 8).unwrap_err();
        let HomogeneityError::AlphaExhausted { position, partial, .. } = err else {
            panic!("expected AlphaExhausted");
        };
        assert_eq!(position, 6);
        assert_eq!(partial.len(), 6);
    }

    #[test]
    fn merge_requires_disjoint_operations() {
        let sig = Signature::vector_space(FieldKind::Prime(2), 2);
        let alpha = SortedPrefix::new(&sig, vec![], SortWord::constant(SortIndex(1))).unwrap();
        let b = SortedPrefix::new(&sig, vec![], SortWord::constant(SortIndex(1))).unwrap();
        let e = SortWord::constant(SortIndex(1));
        assert!(matches!(
            merge_sorted_reduction(&sig, &alpha, &b, &e, &[], 0),
            Err(HomogeneityError::NotDisjoint { .. })
        ));
    }

    #[test]
    fn hindman_finds_powers_of_two_mod_2() {
        let sig = additive_rationals();
        let b = rat_prefix(&sig, &[1, 2, 4, 8, 16, 32, 64, 128, 256, 512]);
        let bounds = TermBounds::new(3, 3);
        let report = hindman_search(&sig, &b, &parity(), 4, bounds).unwrap();
        assert!(report.found(), "{:?}", report.outcome);
        report.verify(&sig, &b, &parity(), bounds).unwrap();
    }

    #[test]
    fn hindman_exhausts_on_an_adversarial_coloring() {
        let sig = additive_rationals();
        let b = rat_prefix(&sig, &[1, 2, 4]);
        let table: BTreeMap<Value, usize> = [
            (rat(1), 0),
            (rat(2), 0),
            (rat(3), 1),
            (rat(4), 1),
            (rat(5), 0),
            (rat(6), 1),
            (rat(7), 0),
        ]
        .into_iter()
        .collect();
        let coloring = Coloring::from_table("adversarial", 2, table, None);
        let bounds = TermBounds::new(2, 3);
        let report = hindman_search(&sig, &b, &coloring, 2, bounds).unwrap();
        assert!(!report.found());
        assert!(report.stats.nodes >= 5);

        let e = SortWord::constant(SortIndex(0));
        let general = find_homogeneous(&sig, &b, &e, &coloring, 2, bounds).unwrap();
        assert!(!general.found());
    }

    #[test]
    fn hindman_rejects_non_semigroups() {
        let sig = Signature::vector_space(FieldKind::Prime(2), 2);
        let b = SortedPrefix::new(&sig, vec![], SortWord::constant(SortIndex(1))).unwrap();
        assert!(matches!(
            hindman_search(&sig, &b, &Coloring::single("c"), 1, TermBounds::new(1, 2)),
            Err(HomogeneityError::NotSemigroup { .. })
        ));
    }

    #[test]
    fn hindman_one_element_semigroup_is_trivially_found() {
        let x = Value::Atom { phylum: SortIndex(0), ordinal: 0 };
        let mut table = BTreeMap::new();
        table.insert(vec![x.clone(), x.clone()], x.clone());
        let sig = Signature {
            phyla: vec![Phylum::Atoms { names: vec!["x".into()] }],
            phylum_names: vec!["P".to_string()],
            ops: vec![OperationDef {
                name: "mul".to_string(),
                arg_sorts: vec![SortIndex(0), SortIndex(0)],
                out_sort: SortIndex(0),
                eval: Evaluator::Table(table),
            }],
        };
        let b =
            SortedPrefix::new(&sig, vec![x.clone(); 3], SortWord::constant(SortIndex(0))).unwrap();
        let coloring = Coloring::new("which", 2, |_| 1);
        let report =
            hindman_search(&sig, &b, &coloring, 2, TermBounds::new(2, 2)).unwrap();
        let Outcome::Found { color, .. } = report.outcome else {
            panic!("expected Found");
        };
        assert_eq!(color, 1);
    }

    #[test]
    fn report_json_shape() {
        let sig = additive_rationals();
        let b = rat_prefix(&sig, &[2, 4]);
        let e = SortWord::constant(SortIndex(0));
        let report =
            find_homogeneous(&sig, &b, &e, &parity(), 1, TermBounds::new(1, 2)).unwrap();
        let json = report.to_json(&sig);
        assert_eq!(json["outcome"], "found");
        assert_eq!(json["color"], 0);
        assert!(json["a"].is_array());
        assert!(json["witness"].is_array());
        assert!(json["stats"]["nodes"].as_u64().unwrap() >= 1);
    }
}
