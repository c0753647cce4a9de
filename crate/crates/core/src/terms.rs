//! Orderly terms: identity leaves and operation nodes whose variables are
//! consumed left to right, each exactly once.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use thiserror::Error;

use crate::algebra::{EvalError, OpIndex, Signature, SortIndex, Value};

/// A term over a signature. Leaves are variable slots labeled only by sort;
/// an argument sequence fills them left to right.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OrderlyTerm {
    Leaf { sort: SortIndex },
    Node { op: OpIndex, children: Vec<OrderlyTerm> },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("operation index {op} out of range")]
    OpOutOfRange { op: OpIndex },
    #[error("sort index {sort} out of range")]
    SortOutOfRange { sort: SortIndex },
    #[error("operation `{op}` given {got} children, expects {expected}")]
    ChildCount { op: String, expected: usize, got: usize },
    #[error("child {position} of `{op}` has sort {got}, expected {expected}")]
    ChildSort { op: String, position: usize, got: SortIndex, expected: SortIndex },
    #[error("term consumes {needed} arguments, {provided} provided")]
    ArgCount { needed: usize, provided: usize },
    #[error("argument {position} is not in the phylum its leaf expects")]
    ArgSort { position: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl OrderlyTerm {
    pub fn identity(sort: SortIndex) -> OrderlyTerm {
        OrderlyTerm::Leaf { sort }
    }

    /// The operation itself as a term: `f(x_1, ..., x_n)`.
    pub fn of_op(sig: &Signature, op: OpIndex) -> OrderlyTerm {
        OrderlyTerm::Node {
            op,
            children: sig
                .op(op)
                .arg_sorts
                .iter()
                .map(|&sort| OrderlyTerm::Leaf { sort })
                .collect(),
        }
    }

    /// Number of operation nodes; leaves are free.
    pub fn size(&self) -> usize {
        match self {
            OrderlyTerm::Leaf { .. } => 0,
            OrderlyTerm::Node { children, .. } => {
                1 + children.iter().map(OrderlyTerm::size).sum::<usize>()
            }
        }
    }

    /// Number of leaves, i.e. arguments the term consumes.
    pub fn arity(&self) -> usize {
        match self {
            OrderlyTerm::Leaf { .. } => 1,
            OrderlyTerm::Node { children, .. } => {
                children.iter().map(OrderlyTerm::arity).sum()
            }
        }
    }

    pub fn out_sort(&self, sig: &Signature) -> SortIndex {
        match self {
            OrderlyTerm::Leaf { sort } => *sort,
            OrderlyTerm::Node { op, .. } => sig.op(*op).out_sort,
        }
    }

    /// Sorts of the leaves, left to right: the sort word of the arguments the
    /// term consumes.
    pub fn arg_sorts(&self) -> Vec<SortIndex> {
        let mut out = Vec::with_capacity(self.arity());
        self.collect_arg_sorts(&mut out);
        out
    }

    fn collect_arg_sorts(&self, out: &mut Vec<SortIndex>) {
        match self {
            OrderlyTerm::Leaf { sort } => out.push(*sort),
            OrderlyTerm::Node { children, .. } => {
                for c in children {
                    c.collect_arg_sorts(out);
                }
            }
        }
    }

    /// Well-sortedness: every node applies a real operation to children of
    /// the sorts it expects.
    pub fn check(&self, sig: &Signature) -> Result<(), TermError> {
        match self {
            OrderlyTerm::Leaf { sort } => {
                if sort.0 >= sig.sort_count() {
                    return Err(TermError::SortOutOfRange { sort: *sort });
                }
                Ok(())
            }
            OrderlyTerm::Node { op, children } => {
                if op.0 >= sig.op_count() {
                    return Err(TermError::OpOutOfRange { op: *op });
                }
                let def = sig.op(*op);
                if children.len() != def.arity() {
                    return Err(TermError::ChildCount {
                        op: def.name.clone(),
                        expected: def.arity(),
                        got: children.len(),
                    });
                }
                for (i, (child, expected)) in children.iter().zip(&def.arg_sorts).enumerate() {
                    child.check(sig)?;
                    let got = child.out_sort(sig);
                    if got != *expected {
                        return Err(TermError::ChildSort {
                            op: def.name.clone(),
                            position: i,
                            got,
                            expected: *expected,
                        });
                    }
                }
                Ok(())
            }
        }
    }

    /// Evaluates the term, consuming `args` left to right. The term must be
    /// well-sorted for the signature; argument values are still checked.
    pub fn evaluate(&self, sig: &Signature, args: &[Value]) -> Result<Value, TermError> {
        let needed = self.arity();
        if needed != args.len() {
            return Err(TermError::ArgCount { needed, provided: args.len() });
        }
        let mut cursor = 0;
        self.eval_at(sig, args, &mut cursor)
    }

    fn eval_at(
        &self,
        sig: &Signature,
        args: &[Value],
        cursor: &mut usize,
    ) -> Result<Value, TermError> {
        match self {
            OrderlyTerm::Leaf { sort } => {
                let position = *cursor;
                let v = &args[position];
                *cursor += 1;
                if !sig.contains(*sort, v) {
                    return Err(TermError::ArgSort { position });
                }
                Ok(v.clone())
            }
            OrderlyTerm::Node { op, children } => {
                let vals: Vec<Value> = children
                    .iter()
                    .map(|c| c.eval_at(sig, args, cursor))
                    .collect::<Result<_, _>>()?;
                Ok(sig.evaluate_op(*op, &vals)?)
            }
        }
    }

    /// S-expression form, e.g. `(+V (. (idF _) (idV _)) (idV _))`.
    pub fn to_sexpr(&self, sig: &Signature) -> String {
        let mut out = String::new();
        self.write_sexpr(sig, &mut out);
        out
    }

    fn write_sexpr(&self, sig: &Signature, out: &mut String) {
        match self {
            OrderlyTerm::Leaf { sort } => {
                let name = sig
                    .phylum_names
                    .get(sort.0)
                    .cloned()
                    .unwrap_or_else(|| sort.0.to_string());
                out.push_str(&format!("(id{name} _)"));
            }
            OrderlyTerm::Node { op, children } => {
                out.push('(');
                out.push_str(&sig.op(*op).name);
                for c in children {
                    out.push(' ');
                    c.write_sexpr(sig, out);
                }
                out.push(')');
            }
        }
    }

    pub fn from_sexpr(sig: &Signature, text: &str) -> Result<OrderlyTerm, SexprError> {
        let tokens = sexpr_tokens(text);
        let mut pos = 0;
        let term = parse_sexpr(sig, &tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(SexprError::Trailing { found: tokens[pos].clone() });
        }
        term.check(sig).map_err(|e| SexprError::IllSorted { message: e.to_string() })?;
        Ok(term)
    }
}

impl fmt::Display for OrderlyTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderlyTerm::Leaf { sort } => write!(f, "(id{sort} _)"),
            OrderlyTerm::Node { op, children } => {
                write!(f, "(#{op}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SexprError {
    #[error("expected `{expected}`, found `{found}`")]
    Expected { expected: String, found: String },
    #[error("unexpected end of input")]
    Eof,
    #[error("unknown operation `{name}`")]
    UnknownOp { name: String },
    #[error("unknown phylum `{name}`")]
    UnknownPhylum { name: String },
    #[error("trailing input starting at `{found}`")]
    Trailing { found: String },
    #[error("ill-sorted term: {message}")]
    IllSorted { message: String },
}

fn sexpr_tokens(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for ch in text.chars() {
        match ch {
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(ch.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

fn parse_sexpr(
    sig: &Signature,
    tokens: &[String],
    pos: &mut usize,
) -> Result<OrderlyTerm, SexprError> {
    expect(tokens, pos, "(")?;
    let head = next(tokens, pos)?.clone();
    if let Some(phylum) = head.strip_prefix("id") {
        if tokens.get(*pos).map(String::as_str) == Some("_") {
            let sort = sig
                .sort_named(phylum)
                .ok_or_else(|| SexprError::UnknownPhylum { name: phylum.to_string() })?;
            *pos += 1;
            expect(tokens, pos, ")")?;
            return Ok(OrderlyTerm::Leaf { sort });
        }
    }
    let op = sig
        .op_named(&head)
        .ok_or_else(|| SexprError::UnknownOp { name: head.clone() })?;
    let mut children = Vec::new();
    while tokens.get(*pos).map(String::as_str) != Some(")") {
        if *pos >= tokens.len() {
            return Err(SexprError::Eof);
        }
        children.push(parse_sexpr(sig, tokens, pos)?);
    }
    *pos += 1;
    Ok(OrderlyTerm::Node { op, children })
}

fn next<'t>(tokens: &'t [String], pos: &mut usize) -> Result<&'t String, SexprError> {
    let t = tokens.get(*pos).ok_or(SexprError::Eof)?;
    *pos += 1;
    Ok(t)
}

fn expect(tokens: &[String], pos: &mut usize, what: &str) -> Result<(), SexprError> {
    let t = next(tokens, pos)?;
    if t != what {
        return Err(SexprError::Expected { expected: what.to_string(), found: t.clone() });
    }
    Ok(())
}

/// All well-sorted terms with output sort `out_sort`, at most `max_arity`
/// leaves, and at most `max_size` operation nodes, ordered by size, then
/// arity, then structurally. Includes the identity leaf at size 0. Distinct
/// entries denote distinct trees by construction.
pub fn enumerate_terms(
    sig: &Signature,
    out_sort: SortIndex,
    max_arity: usize,
    max_size: usize,
) -> Vec<OrderlyTerm> {
    let table = build_term_table(sig, max_arity, max_size);
    collect_sorted(&table, out_sort, max_arity, max_size)
}

/// Per-sort term lists, indexed by sort.
pub fn enumerate_all_terms(
    sig: &Signature,
    max_arity: usize,
    max_size: usize,
) -> Vec<Vec<OrderlyTerm>> {
    let table = build_term_table(sig, max_arity, max_size);
    (0..sig.sort_count())
        .map(|s| collect_sorted(&table, SortIndex(s), max_arity, max_size))
        .collect()
}

type TermTable = HashMap<(usize, usize, usize), Vec<OrderlyTerm>>;

fn collect_sorted(
    table: &TermTable,
    out_sort: SortIndex,
    max_arity: usize,
    max_size: usize,
) -> Vec<OrderlyTerm> {
    let mut out = Vec::new();
    for size in 0..=max_size {
        for arity in 1..=max_arity {
            if let Some(bucket) = table.get(&(size, arity, out_sort.0)) {
                out.extend(bucket.iter().cloned());
            }
        }
    }
    out
}

fn build_term_table(sig: &Signature, max_arity: usize, max_size: usize) -> TermTable {
    let mut table: TermTable = HashMap::new();
    for sort in 0..sig.sort_count() {
        table.insert((0, 1, sort), vec![OrderlyTerm::Leaf { sort: SortIndex(sort) }]);
    }
    for size in 1..=max_size {
        for arity in 1..=max_arity {
            for sort in 0..sig.sort_count() {
                let mut bucket = Vec::new();
                for (op_idx, def) in sig.ops.iter().enumerate() {
                    if def.out_sort.0 != sort || def.arity() == 0 {
                        continue;
                    }
                    let k = def.arity();
                    for size_comp in compositions(size - 1, k) {
                        for arity_comp in positive_compositions(arity, k) {
                            let child_buckets: Vec<&Vec<OrderlyTerm>> = (0..k)
                                .map(|i| {
                                    table
                                        .get(&(size_comp[i], arity_comp[i], def.arg_sorts[i].0))
                                        .unwrap_or(&EMPTY_BUCKET)
                                })
                                .collect();
                            if child_buckets.iter().any(|b| b.is_empty()) {
                                continue;
                            }
                            for children in child_buckets
                                .iter()
                                .map(|b| b.iter().cloned())
                                .multi_cartesian_product()
                            {
                                bucket.push(OrderlyTerm::Node { op: OpIndex(op_idx), children });
                            }
                        }
                    }
                }
                bucket.sort();
                if !bucket.is_empty() {
                    table.insert((size, arity, sort), bucket);
                }
            }
        }
    }
    table
}

static EMPTY_BUCKET: Vec<OrderlyTerm> = Vec::new();

/// Ways to write `total` as an ordered sum of `parts` nonnegative integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Ways to write `total` as an ordered sum of `parts` positive integers.
fn positive_compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if total < parts {
        return vec![];
    }
    compositions(total - parts, parts)
        .into_iter()
        .map(|comp| comp.into_iter().map(|c| c + 1).collect())
        .collect()
}

/// Collapses extensionally equal terms over finite carriers, keeping the
/// enumeration-least representative of each argument-table class. `None`
/// when some argument phylum is infinite.
pub fn dedup_extensional(sig: &Signature, terms: &[OrderlyTerm]) -> Option<Vec<OrderlyTerm>> {
    let mut seen: HashMap<(Vec<SortIndex>, Vec<Value>), ()> = HashMap::new();
    let mut out = Vec::new();
    for term in terms {
        let arg_sorts = term.arg_sorts();
        let domains: Option<Vec<Vec<Value>>> =
            arg_sorts.iter().map(|&s| sig.phylum_values(s)).collect();
        let domains = domains?;
        let mut results = Vec::new();
        for args in domains.iter().map(|d| d.iter().cloned()).multi_cartesian_product() {
            results.push(term.evaluate(sig, &args).expect("term valid over its own domain"));
        }
        if seen.insert((arg_sorts, results), ()).is_none() {
            out.push(term.clone());
        }
    }
    Some(out)
}
