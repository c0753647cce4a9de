//! Vector-space experiments: the two-sorted signature, the rational
//! sequences on which bounded sum-form and product-form term values never
//! collide, the coloring sets built from them, the scaled-unary structure
//! over one vector phylum, and the classification that ties them together.

use std::collections::BTreeMap;

use itertools::Itertools;
use num::BigRational;
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::algebra::{
    is_prime, Evaluator, FieldKind, OmegaClass, OpIndex, Phylum, Scalar, Signature, SortIndex,
    SortWord, Value, VectorElem,
};
use crate::reduction::{
    enumerate_reductions, fr_set, ReductionError, ReductionWitness, SortedPrefix, TermBounds,
    WitnessEntry,
};
use crate::terms::{enumerate_terms, OrderlyTerm, TermError};

#[derive(Debug, Error)]
pub enum VspaceError {
    #[error("vector spaces need a positive dimension")]
    ZeroDim,
    #[error("{p} is not prime")]
    NotPrime { p: u64 },
    #[error("sequence construction needs length >= 2 and term bound >= 1")]
    BetaRequest,
    #[error("position {position}: all {tried} candidates violated the disequation; last: {violation}")]
    BetaBudget { position: usize, tried: usize, violation: String },
    #[error("values at {i} and {j} coincide; the sequence must be pairwise distinct")]
    DuplicateBeta { i: usize, j: usize },
    #[error("disequation fails: {0}")]
    InvalidBeta(BetaViolation),
    #[error("requested term bound {requested} exceeds the verified bound {verified}")]
    BoundTooLoose { requested: usize, verified: usize },
    #[error("the lift needs a nonzero vector")]
    ZeroLiftVector,
    #[error("missing positions: {need}")]
    MissingPositions { need: String },
    #[error("over the two-element field every scaling is the identity; no separation exists")]
    FieldTooSmall,
    #[error("signature is not a scaled-unary vector signature")]
    NotKSignature,
    #[error("expected dimension + 1 = {expected} vectors, got {got}")]
    WrongVectorCount { expected: usize, got: usize },
    #[error("vector {index} has the wrong dimension or field")]
    VectorMismatch { index: usize },
    #[error("coefficient {position} is zero; scaled-unary terms never produce one")]
    ZeroCoefficient { position: usize },
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// The two-sorted vector-space signature over a chosen field and dimension:
/// sort 0 carries scalars, sort 1 carries coordinate vectors.
#[derive(Clone, Debug)]
pub struct VectorSpaceSpec {
    pub field: FieldKind,
    pub dim: usize,
    sig: Signature,
}

impl VectorSpaceSpec {
    pub const SCALAR: SortIndex = SortIndex(0);
    pub const VECTOR: SortIndex = SortIndex(1);

    pub fn new(field: FieldKind, dim: usize) -> Result<VectorSpaceSpec, VspaceError> {
        if dim == 0 {
            return Err(VspaceError::ZeroDim);
        }
        if let FieldKind::Prime(p) = field {
            if !is_prime(p) {
                return Err(VspaceError::NotPrime { p });
            }
        }
        Ok(VectorSpaceSpec { field, dim, sig: Signature::vector_space(field, dim) })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }
}

/// Single-phylum structure of vectors under addition and one scaling per
/// nonzero scalar (the zero scaling is excluded by construction).
#[derive(Clone, Debug)]
pub struct KSignature {
    pub p: u64,
    pub dim: usize,
    sig: Signature,
}

impl KSignature {
    pub fn new(p: u64, dim: usize) -> Result<KSignature, VspaceError> {
        if !is_prime(p) {
            return Err(VspaceError::NotPrime { p });
        }
        if dim == 0 {
            return Err(VspaceError::ZeroDim);
        }
        Ok(KSignature { p, dim, sig: Signature::k_signature(p, dim) })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }
}

/// Recognizes a scaled-unary vector signature: vector addition first, then
/// exactly the scalings by 1..p in order. Returns the field characteristic.
pub fn k_signature_shape(sig: &Signature) -> Option<(u64, usize)> {
    let [Phylum::Vectors { field: FieldKind::Prime(p), dim }] = sig.phyla.as_slice() else {
        return None;
    };
    if sig.op_count() != *p as usize {
        return None;
    }
    if sig.ops[0].eval != Evaluator::VectorAdd {
        return None;
    }
    for r in 1..*p {
        let expected = Evaluator::ScaleBy(Scalar::Mod { p: *p, value: r });
        if sig.ops[r as usize].eval != expected {
            return None;
        }
    }
    Some((*p, *dim))
}

// ---------------------------------------------------------------------------
// The β machinery: rational sequences where bounded sums never meet bounded
// products.

/// One collision between a sum-form and a product-form term value.
#[derive(Clone, Debug)]
pub struct BetaViolation {
    pub sum: (WitnessEntry, WitnessEntry),
    pub product: (WitnessEntry, WitnessEntry),
    pub value: BigRational,
}

impl std::fmt::Display for BetaViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sig = Signature::field_only(FieldKind::Rationals);
        write!(
            f,
            "{}@{:?} + {}@{:?} = {}@{:?} * {}@{:?} = {}",
            self.sum.0.term.to_sexpr(&sig),
            self.sum.0.indices,
            self.sum.1.term.to_sexpr(&sig),
            self.sum.1.indices,
            self.product.0.term.to_sexpr(&sig),
            self.product.0.indices,
            self.product.1.term.to_sexpr(&sig),
            self.product.1.indices,
            self.value,
        )
    }
}

/// Rational prefix carrying the term-size bound at which the disequation
/// between sum forms and product forms has been verified exhaustively.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetaSequence {
    values: Vec<BigRational>,
    term_bound: usize,
}

impl BetaSequence {
    /// Validates distinctness and the full disequation sweep at `term_bound`.
    pub fn new(values: Vec<BigRational>, term_bound: usize) -> Result<BetaSequence, VspaceError> {
        for i in 0..values.len() {
            for j in 0..i {
                if values[i] == values[j] {
                    return Err(VspaceError::DuplicateBeta { i: j, j: i });
                }
            }
        }
        if let Some(v) = check_beta(&values, term_bound) {
            return Err(VspaceError::InvalidBeta(v));
        }
        Ok(BetaSequence { values, term_bound })
    }

    pub fn from_integers(ints: &[i64], term_bound: usize) -> Result<BetaSequence, VspaceError> {
        BetaSequence::new(
            ints.iter().map(|&n| BigRational::from_integer(n.into())).collect(),
            term_bound,
        )
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn term_bound(&self) -> usize {
        self.term_bound
    }

    /// Truncation; validity is inherited because the constraints of a prefix
    /// are a subset of those of the whole.
    pub fn prefix(&self, len: usize) -> BetaSequence {
        BetaSequence {
            values: self.values[..len.min(self.values.len())].to_vec(),
            term_bound: self.term_bound,
        }
    }

    pub fn scalar_values(&self) -> Vec<Value> {
        self.values.iter().map(|r| Value::Scalar(Scalar::Rat(r.clone()))).collect()
    }

    pub fn to_json(&self) -> Json {
        json!({
            "values": self.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "term_bound": self.term_bound,
        })
    }
}

/// Evaluates a `{+, *}` term on rational arguments, left to right.
fn eval_rat(term: &OrderlyTerm, args: &[BigRational]) -> BigRational {
    fn go(term: &OrderlyTerm, args: &[BigRational], cursor: &mut usize) -> BigRational {
        match term {
            OrderlyTerm::Leaf { .. } => {
                let v = args[*cursor].clone();
                *cursor += 1;
                v
            }
            OrderlyTerm::Node { op, children } => {
                let a = go(&children[0], args, cursor);
                let b = go(&children[1], args, cursor);
                if op.0 == 0 {
                    a + b
                } else {
                    a * b
                }
            }
        }
    }
    let mut cursor = 0;
    go(term, args, &mut cursor)
}

struct FieldEval {
    entry: WitnessEntry,
    lo: usize,
    hi: usize,
    value: BigRational,
}

/// Every bounded term applied to every increasing index tuple of `values`.
/// Over two binary operations a term of size s has exactly s+1 leaves, so
/// bounding the size also bounds the arity.
fn field_evals(values: &[BigRational], term_bound: usize) -> Vec<FieldEval> {
    let sig = Signature::field_only(FieldKind::Rationals);
    let terms = enumerate_terms(&sig, SortIndex(0), term_bound + 1, term_bound);
    let mut out = Vec::new();
    for term in &terms {
        let arity = term.arity();
        if arity > values.len() {
            continue;
        }
        for combo in (0..values.len()).combinations(arity) {
            let args: Vec<BigRational> = combo.iter().map(|&i| values[i].clone()).collect();
            out.push(FieldEval {
                lo: combo[0],
                hi: *combo.last().expect("terms have arity >= 1"),
                value: eval_rat(term, &args),
                entry: WitnessEntry { term: term.clone(), indices: combo },
            });
        }
    }
    out
}

type SumMap = BTreeMap<BigRational, (WitnessEntry, WitnessEntry)>;

fn sum_map(evals: &[FieldEval]) -> SumMap {
    let mut map = SumMap::new();
    for x in evals {
        for y in evals {
            if y.lo > x.hi {
                map.entry(&x.value + &y.value)
                    .or_insert_with(|| (x.entry.clone(), y.entry.clone()));
            }
        }
    }
    map
}

/// Exhaustive disequation sweep: no bounded sum form may equal any bounded
/// product form over blocks drawn in order from `values`. Returns the first
/// collision found, if any.
pub fn check_beta(values: &[BigRational], term_bound: usize) -> Option<BetaViolation> {
    let evals = field_evals(values, term_bound);
    let sums = sum_map(&evals);
    for x in &evals {
        for y in &evals {
            if y.lo > x.hi {
                let product = &x.value * &y.value;
                if let Some((f, g)) = sums.get(&product) {
                    return Some(BetaViolation {
                        sum: (f.clone(), g.clone()),
                        product: (x.entry.clone(), y.entry.clone()),
                        value: product,
                    });
                }
            }
        }
    }
    None
}

fn beta_candidates() -> Vec<BigRational> {
    let mut out: Vec<BigRational> =
        (1..=64).map(|n: i64| BigRational::from_integer(n.into())).collect();
    let mut m = 128i64;
    while m <= 1 << 20 {
        out.push(BigRational::from_integer(m.into()));
        m *= 2;
    }
    out
}

/// A value no collision constraint over a positive-integer prefix can reach.
/// Extending the prefix by one element turns each potential collision into a
/// linear equation in the new value with integer coefficients: nonnegative
/// slopes on both sides, offsets bounded by term values at the prefix
/// maximum. Unequal slopes differ by at least one, so every solution is at
/// most the sum of two such offsets; equal slopes make the constraint
/// independent of the candidate entirely.
fn safe_jump(values: &[BigRational], term_bound: usize) -> BigRational {
    let vmax = values.iter().max().expect("nonempty prefix").clone();
    let mut ext = values.to_vec();
    ext.push(vmax);
    let max_eval = field_evals(&ext, term_bound)
        .into_iter()
        .map(|e| e.value)
        .max()
        .expect("at least the identity evaluation");
    max_eval * BigRational::from_integer(2.into()) + BigRational::from_integer(1.into())
}

/// Constructs a strictly increasing sequence satisfying the disequation at
/// `term_bound`: integer candidates of increasing magnitude at each
/// position, then one computed value large enough to escape every remaining
/// constraint, with backtracking when a position is unconditionally dead.
/// Deterministic.
pub fn build_beta(length: usize, term_bound: usize) -> Result<BetaSequence, VspaceError> {
    if length < 2 || term_bound < 1 {
        return Err(VspaceError::BetaRequest);
    }
    let candidates = beta_candidates();
    let mut values: Vec<BigRational> = Vec::new();
    let mut cursors: Vec<usize> = vec![0];
    let mut last_violation: Option<BetaViolation> = None;
    loop {
        if values.len() == length {
            return Ok(BetaSequence { values, term_bound });
        }
        let position = values.len();
        let mut placed = false;
        while cursors[position] <= candidates.len() {
            let cursor = cursors[position];
            cursors[position] += 1;
            let c = if cursor < candidates.len() {
                candidates[cursor].clone()
            } else if values.is_empty() {
                break;
            } else {
                safe_jump(&values, term_bound)
            };
            if values.last().is_some_and(|prev| c <= *prev) {
                continue;
            }
            values.push(c);
            match check_beta(&values, term_bound) {
                None => {
                    placed = true;
                    break;
                }
                Some(v) => {
                    last_violation = Some(v);
                    values.pop();
                }
            }
        }
        if placed {
            cursors.push(0);
        } else {
            cursors.pop();
            if values.pop().is_none() {
                return Err(VspaceError::BetaBudget {
                    position,
                    tried: candidates.len() + 1,
                    violation: last_violation.map(|v| v.to_string()).unwrap_or_default(),
                });
            }
        }
    }
}

/// Bounded decision procedure for membership in the sum-form value set of a
/// sequence: every `f(β̄₀) + g(β̄₁)` over bounded terms and ordered splits is
/// tabulated with a witness at construction.
#[derive(Debug)]
pub struct YMembership {
    map: SumMap,
    term_bound: usize,
    prefix_len: usize,
}

#[derive(Clone, Debug)]
pub struct YAnswer {
    pub member: bool,
    pub witness: Option<(WitnessEntry, WitnessEntry)>,
}

impl YMembership {
    pub fn new(beta: &BetaSequence, prefix_len: usize) -> YMembership {
        let len = prefix_len.min(beta.len());
        let evals = field_evals(&beta.values()[..len], beta.term_bound());
        YMembership {
            map: sum_map(&evals),
            term_bound: beta.term_bound(),
            prefix_len: len,
        }
    }

    pub fn term_bound(&self) -> usize {
        self.term_bound
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix_len
    }

    pub fn check(&self, v: &BigRational) -> YAnswer {
        match self.map.get(v) {
            Some(w) => YAnswer { member: true, witness: Some(w.clone()) },
            None => YAnswer { member: false, witness: None },
        }
    }
}

// ---------------------------------------------------------------------------
// Counterexample sweeps.

/// Aggregated outcome of an exhaustive verification sweep.
#[derive(Clone, Debug, Default)]
pub struct SweepReport {
    pub checked: usize,
    pub violations: Vec<String>,
}

impl SweepReport {
    pub fn passes(&self) -> bool {
        self.checked > 0 && self.violations.is_empty()
    }

    pub fn to_json(&self) -> Json {
        json!({
            "checked": self.checked,
            "violations": self.violations,
        })
    }
}

fn rat_of(v: &Value) -> &BigRational {
    match v {
        Value::Scalar(Scalar::Rat(r)) => r,
        _ => panic!("expected a rational scalar"),
    }
}

fn vec_of(v: &Value) -> &VectorElem {
    v.as_vector().expect("expected a vector")
}

/// Sweeps every bounded reduction of the sequence inside the field algebra
/// and checks the defeat pattern: the sum of the first two values lands in
/// the sum-form set, their product never does. Soundness requires the
/// reduction bounds to stay within the sequence's verified bound.
pub fn verify_field_counterexample(
    beta: &BetaSequence,
    red_bounds: TermBounds,
    target_len: usize,
) -> Result<SweepReport, VspaceError> {
    if red_bounds.max_term_size > beta.term_bound() {
        return Err(VspaceError::BoundTooLoose {
            requested: red_bounds.max_term_size,
            verified: beta.term_bound(),
        });
    }
    if target_len < 2 {
        return Err(VspaceError::MissingPositions { need: "target length >= 2".to_string() });
    }
    let sig = Signature::field_only(FieldKind::Rationals);
    let word = SortWord::constant(SortIndex(0));
    let b = SortedPrefix::new(&sig, beta.scalar_values(), word.clone())?;
    let y = YMembership::new(beta, beta.len());
    let mut report = SweepReport::default();
    for red in enumerate_reductions(&sig, &b, &word, target_len, red_bounds)? {
        report.checked += 1;
        let a0 = rat_of(&red.values[0]);
        let a1 = rat_of(&red.values[1]);
        let sum = a0 + a1;
        let product = a0 * a1;
        if !y.check(&sum).member {
            report.violations.push(format!("{a0} + {a1} = {sum} escaped the sum-form set"));
        }
        if y.check(&product).member {
            report
                .violations
                .push(format!("{a0} * {a1} = {product} landed in the sum-form set"));
        }
    }
    Ok(report)
}

/// Interleaves a rational sequence into the two-sorted world along `e`:
/// scalar positions carry the value itself, vector positions its scaling of
/// a fixed nonzero vector.
pub fn lift_beta(
    beta: &BetaSequence,
    e: &SortWord,
    v: &VectorElem,
) -> Result<SortedPrefix, VspaceError> {
    if v.is_zero() {
        return Err(VspaceError::ZeroLiftVector);
    }
    if v.field != FieldKind::Rationals {
        return Err(VspaceError::VectorMismatch { index: 0 });
    }
    let sig = Signature::vector_space(FieldKind::Rationals, v.dim());
    let values = beta
        .values()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            if e.at(i) == VectorSpaceSpec::SCALAR {
                Value::Scalar(Scalar::Rat(r.clone()))
            } else {
                Value::Vector(v.scale(&Scalar::Rat(r.clone())))
            }
        })
        .collect();
    Ok(SortedPrefix::new(&sig, values, e.clone())?)
}

/// Sweeps every bounded e-sorted reduction of the lifted sequence and checks
/// that its first-value set meets both cells of the defeating coloring: a
/// sum-form combination lands inside, a product-form combination outside.
/// Vector-headed words use the scalar-multiple image of the sum-form set,
/// scalar-headed words use the sum-form set itself.
pub fn verify_vspace_counterexample(
    beta: &BetaSequence,
    e: &SortWord,
    v: &VectorElem,
    red_bounds: TermBounds,
    target_len: usize,
) -> Result<SweepReport, VspaceError> {
    if red_bounds.max_term_size > beta.term_bound() {
        return Err(VspaceError::BoundTooLoose {
            requested: red_bounds.max_term_size,
            verified: beta.term_bound(),
        });
    }
    let OmegaClass::InOmega { head, .. } = e.omega_class() else {
        return Err(VspaceError::MissingPositions {
            need: "a sort word whose occurring sorts all recur".to_string(),
        });
    };
    let b = lift_beta(beta, e, v)?;
    let sig = Signature::vector_space(FieldKind::Rationals, v.dim());
    let y = YMembership::new(beta, beta.len());

    let lead = v
        .coords
        .iter()
        .position(|c| !c.is_zero())
        .expect("nonzero vector");
    let x_check = |w: &VectorElem| -> bool {
        let alpha = w.coords[lead].mul(&v.coords[lead].inv().expect("nonzero coordinate"));
        if *w != v.scale(&alpha) {
            return false;
        }
        let Scalar::Rat(alpha) = alpha else {
            unreachable!("rational field")
        };
        y.check(&alpha).member
    };

    let mut report = SweepReport::default();
    if head == VectorSpaceSpec::VECTOR {
        let m1 = (1..target_len)
            .find(|&i| e.at(i) == VectorSpaceSpec::SCALAR)
            .ok_or_else(|| VspaceError::MissingPositions {
                need: format!("a scalar position after 0 within the first {target_len}"),
            })?;
        let m2 = (m1 + 1..target_len)
            .find(|&i| e.at(i) == VectorSpaceSpec::VECTOR)
            .ok_or_else(|| VspaceError::MissingPositions {
                need: format!("a vector position after {m1} within the first {target_len}"),
            })?;
        for red in enumerate_reductions(&sig, &b, e, target_len, red_bounds)? {
            report.checked += 1;
            let a0 = vec_of(&red.values[0]);
            let am1 = red.values[m1].as_scalar().expect("scalar position").clone();
            let am2 = vec_of(&red.values[m2]);
            let c1 = a0.add(am2);
            let c2 = am2.scale(&am1);
            if !x_check(&c1) {
                report.violations.push(format!("{c1} escaped the scaled sum-form set"));
            }
            if x_check(&c2) {
                report.violations.push(format!("{c2} landed in the scaled sum-form set"));
            }
        }
    } else {
        let m = (1..target_len)
            .find(|&i| e.at(i) == VectorSpaceSpec::SCALAR)
            .ok_or_else(|| VspaceError::MissingPositions {
                need: format!("a scalar position after 0 within the first {target_len}"),
            })?;
        for red in enumerate_reductions(&sig, &b, e, target_len, red_bounds)? {
            report.checked += 1;
            let a0 = rat_of(&red.values[0]);
            let am = rat_of(&red.values[m]);
            let sum = a0 + am;
            let product = a0 * am;
            if !y.check(&sum).member {
                report.violations.push(format!("{sum} escaped the sum-form set"));
            }
            if y.check(&product).member {
                report.violations.push(format!("{product} landed in the sum-form set"));
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// The scaled-unary structure.

/// Coefficient vector of a term over the scaled-unary signature: the term
/// acts linearly, so feeding the first basis vector through one argument at
/// a time reads off each coefficient. All coefficients are necessarily
/// nonzero; a zero one signals an enumeration bug upstream.
pub fn ot_k_coefficients(sig: &Signature, term: &OrderlyTerm) -> Result<Vec<Scalar>, VspaceError> {
    let (_, dim) = k_signature_shape(sig).ok_or(VspaceError::NotKSignature)?;
    term.check(sig)?;
    let Phylum::Vectors { field, .. } = sig.phyla[0] else {
        return Err(VspaceError::NotKSignature);
    };
    let n = term.arity();
    let unit = VectorElem::basis(field, dim, 0);
    let zero = VectorElem::zero(field, dim);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let args: Vec<Value> = (0..n)
            .map(|j| Value::Vector(if j == i { unit.clone() } else { zero.clone() }))
            .collect();
        let image = term.evaluate(sig, &args)?;
        let coeff = vec_of(&image).coords[0].clone();
        if coeff.is_zero() {
            return Err(VspaceError::ZeroCoefficient { position: i });
        }
        out.push(coeff);
    }
    Ok(out)
}

/// Canonical scaled-unary term with the given nonzero coefficients: the
/// left-nested sum of one scaling per argument.
pub fn k_term_from_coefficients(coeffs: &[Scalar]) -> OrderlyTerm {
    let v = SortIndex(0);
    let scaled = |c: &Scalar| -> OrderlyTerm {
        let Scalar::Mod { value, .. } = c else {
            panic!("scaled-unary coefficients live in a prime field")
        };
        OrderlyTerm::Node {
            op: OpIndex(*value as usize),
            children: vec![OrderlyTerm::Leaf { sort: v }],
        }
    };
    let mut iter = coeffs.iter();
    let mut t = scaled(iter.next().expect("at least one coefficient"));
    for c in iter {
        t = OrderlyTerm::Node { op: OpIndex(0), children: vec![t, scaled(c)] };
    }
    t
}

/// Given dimension + 1 vectors, finds a linear dependence by exact Gaussian
/// elimination, keeps the indices with nonzero coefficients, and returns the
/// scaled-unary term that annihilates exactly those vectors.
pub fn finite_dim_zero_term(
    sig: &Signature,
    vectors: &[VectorElem],
) -> Result<(Vec<usize>, OrderlyTerm), VspaceError> {
    let (_, dim) = k_signature_shape(sig).ok_or(VspaceError::NotKSignature)?;
    let Phylum::Vectors { field, .. } = sig.phyla[0] else {
        return Err(VspaceError::NotKSignature);
    };
    if vectors.len() != dim + 1 {
        return Err(VspaceError::WrongVectorCount { expected: dim + 1, got: vectors.len() });
    }
    for (index, v) in vectors.iter().enumerate() {
        if v.dim() != dim || v.field != field {
            return Err(VspaceError::VectorMismatch { index });
        }
    }
    let solution = nullspace_vector(field, dim, vectors);
    let indices: Vec<usize> =
        (0..solution.len()).filter(|&i| !solution[i].is_zero()).collect();
    let coeffs: Vec<Scalar> = indices.iter().map(|&i| solution[i].clone()).collect();
    let term = k_term_from_coefficients(&coeffs);
    debug_assert!({
        let args: Vec<Value> =
            indices.iter().map(|&i| Value::Vector(vectors[i].clone())).collect();
        vec_of(&term.evaluate(sig, &args).expect("well-formed")).is_zero()
    });
    Ok((indices, term))
}

/// Nonzero kernel vector of the matrix whose columns are the given vectors
/// (rows < columns guarantees one): reduced row echelon form, least free
/// column set to one.
fn nullspace_vector(field: FieldKind, rows: usize, columns: &[VectorElem]) -> Vec<Scalar> {
    let cols = columns.len();
    let mut a: Vec<Vec<Scalar>> = (0..rows)
        .map(|i| (0..cols).map(|j| columns[j].coords[i].clone()).collect())
        .collect();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        if row == rows {
            break;
        }
        let Some(pr) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, pr);
        let inv = a[row][col].inv().expect("pivot is nonzero");
        for j in col..cols {
            a[row][j] = a[row][j].mul(&inv);
        }
        for r in 0..rows {
            if r != row && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for j in col..cols {
                    a[r][j] = a[r][j].sub(&factor.mul(&a[row][j]));
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }
    let free = (0..cols)
        .find(|c| !pivot_cols.contains(c))
        .expect("more columns than rows");
    let mut solution = vec![Scalar::zero(field); cols];
    solution[free] = Scalar::one(field);
    for (r, &pc) in pivot_cols.iter().enumerate() {
        solution[pc] = a[r][free].neg();
    }
    solution
}

/// Sweeps every bounded reduction of an independent family and checks the
/// leading-coefficient dichotomy: a first value with leading coefficient one
/// lies in the marked set and doubling leaves it, otherwise it lies outside
/// and scaling by the inverse enters it. Needs at least three scalars, since
/// over the two-element field every scaling is the identity.
pub fn verify_k_infinite_counterexample(
    p: u64,
    num_basis: usize,
    bounds: TermBounds,
    target_len: usize,
) -> Result<SweepReport, VspaceError> {
    if p == 2 {
        return Err(VspaceError::FieldTooSmall);
    }
    let k = KSignature::new(p, num_basis)?;
    let sig = k.signature();
    let field = FieldKind::Prime(p);
    let word = SortWord::constant(SortIndex(0));
    let basis: Vec<VectorElem> =
        (0..num_basis).map(|i| VectorElem::basis(field, num_basis, i)).collect();
    let values: Vec<Value> = basis.iter().cloned().map(Value::Vector).collect();
    let b = SortedPrefix::new(sig, values, word.clone())?;

    let leading = |w: &VectorElem| -> Option<Scalar> {
        w.coords.iter().find(|c| !c.is_zero()).cloned()
    };
    let in_x = |w: &VectorElem| leading(w).is_some_and(|c| c.is_one());

    let mut report = SweepReport::default();
    for red in enumerate_reductions(sig, &b, &word, target_len, bounds)? {
        report.checked += 1;
        let w = vec_of(&red.values[0]);
        let Some(r0) = leading(w) else {
            report
                .violations
                .push("zero vector reached from an independent family".to_string());
            continue;
        };
        // Cross-validate the coordinate reading against the witness term's
        // coefficient vector.
        let entry = &red.witness.entries[0];
        let coeffs = ot_k_coefficients(sig, &entry.term)?;
        let mut recombined = VectorElem::zero(field, num_basis);
        for (c, &i) in coeffs.iter().zip(&entry.indices) {
            recombined = recombined.add(&basis[i].scale(c));
        }
        if recombined != *w {
            report.violations.push(format!(
                "coefficients {coeffs:?} over {:?} do not recombine to {w}",
                entry.indices
            ));
        }
        if r0.is_one() {
            if !in_x(w) {
                report.violations.push(format!("{w} has leading one yet sits outside"));
            }
            let doubled = w.scale(&Scalar::from_integer(field, 2));
            if in_x(&doubled) {
                report.violations.push(format!("doubling kept {w} inside"));
            }
        } else {
            if in_x(w) {
                report.violations.push(format!("{w} lacks leading one yet sits inside"));
            }
            let fixed = w.scale(&r0.inv().expect("leading coefficient is nonzero"));
            if !in_x(&fixed) {
                report.violations.push(format!("inverse scaling left {w} outside"));
            }
        }
    }
    Ok(report)
}

/// Outcome of the fixed-point gate: does some bounded reduction have its
/// addition-only first-value set inside the scalings' fixed-point set?
#[derive(Clone, Debug)]
pub struct GateReport {
    pub passes: bool,
    pub candidates: usize,
    pub witness: Option<(Vec<Value>, ReductionWitness)>,
    pub obstruction: Option<String>,
}

impl GateReport {
    pub fn to_json(&self, sig: &Signature) -> Json {
        json!({
            "passes": self.passes,
            "candidates": self.candidates,
            "witness": self.witness.as_ref().map(|(values, w)| json!({
                "values": values.iter().map(|v| sig.display_value(v)).collect::<Vec<_>>(),
                "entries": w.to_json(sig)["entries"],
            })),
            "obstruction": self.obstruction,
        })
    }
}

/// Searches the bounded reductions of `b` under the full scaled-unary
/// signature for one whose first-value set under addition alone is contained
/// in the fixed-point set of the scalings — the whole phylum over the
/// two-element field, the zero vector alone otherwise.
pub fn corteh_gate(
    sig: &Signature,
    b: &SortedPrefix,
    bounds: TermBounds,
    target_len: usize,
) -> Result<GateReport, VspaceError> {
    let (p, _) = k_signature_shape(sig).ok_or(VspaceError::NotKSignature)?;
    let word = SortWord::constant(SortIndex(0));
    let g_sig = Signature {
        phyla: sig.phyla.clone(),
        phylum_names: sig.phylum_names.clone(),
        ops: vec![sig.ops[0].clone()],
    };
    let in_s = |v: &Value| p == 2 || matches!(v, Value::Vector(w) if w.is_zero());

    let mut candidates = 0;
    let mut obstruction: Option<String> = None;
    for red in enumerate_reductions(sig, b, &word, target_len, bounds)? {
        candidates += 1;
        let a = SortedPrefix::new(&g_sig, red.values.clone(), word.clone())?;
        let fr = fr_set(&g_sig, &a, &word, bounds)?;
        match fr.witnesses.keys().find(|v| !in_s(v)) {
            None => {
                return Ok(GateReport {
                    passes: true,
                    candidates,
                    witness: Some((red.values, red.witness)),
                    obstruction: None,
                })
            }
            Some(v) if obstruction.is_none() => {
                obstruction = Some(format!(
                    "first-value {} is not fixed by every scaling",
                    g_sig.display_value(v)
                ));
            }
            Some(_) => {}
        }
    }
    Ok(GateReport {
        passes: false,
        candidates,
        witness: None,
        obstruction: obstruction
            .or_else(|| Some("no reductions within the given bounds".to_string())),
    })
}

// ---------------------------------------------------------------------------
// Classification.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Ramsey,
    NotRamsey,
    /// Positive for this sort specifically because the scalar field is
    /// finite; the same sort fails over any infinite field.
    RamseyIfFieldFinite,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Ramsey => write!(f, "ramsey"),
            Verdict::NotRamsey => write!(f, "not-ramsey"),
            Verdict::RamseyIfFieldFinite => write!(f, "ramsey-if-field-finite"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerdictReport {
    pub verdict: Verdict,
    /// Name of the operation that verifies the verdict at finite scale.
    pub evidence: &'static str,
}

impl VerdictReport {
    pub fn to_json(&self) -> Json {
        json!({
            "verdict": self.verdict.to_string(),
            "evidence": self.evidence,
        })
    }
}

/// Classifies one sort word over one vector space. Words with a transient
/// sort are positive regardless of the field; the all-vector word rides the
/// vector semigroup; everything else splits on field finiteness, with the
/// all-scalar word over a finite field flagged as finite-specific.
pub fn classify_vspace(
    spec: &VectorSpaceSpec,
    e: &SortWord,
) -> Result<VerdictReport, VspaceError> {
    let limit = spec.signature().sort_count();
    if e.max_sort().0 >= limit {
        return Err(VspaceError::Reduction(ReductionError::SortOutOfRange {
            sort: e.max_sort(),
            limit,
        }));
    }
    let in_omega = matches!(e.omega_class(), OmegaClass::InOmega { .. });
    let constant_of = |s: SortIndex| e.prefix().is_empty() && e.period() == [s];
    let report = if !in_omega {
        VerdictReport {
            verdict: Verdict::Ramsey,
            evidence: "enumerate_reductions: transient positions are pinned",
        }
    } else if constant_of(VectorSpaceSpec::VECTOR) {
        VerdictReport {
            verdict: Verdict::Ramsey,
            evidence: "hindman_search over the vector semigroup",
        }
    } else if spec.field.is_finite() {
        if constant_of(VectorSpaceSpec::SCALAR) {
            VerdictReport {
                verdict: Verdict::RamseyIfFieldFinite,
                evidence: "zero_scalar_reduction over the finite scalar field",
            }
        } else {
            VerdictReport {
                verdict: Verdict::Ramsey,
                evidence: "zero_scalar_reduction + hindman_search",
            }
        }
    } else {
        VerdictReport {
            verdict: Verdict::NotRamsey,
            evidence: "verify_vspace_counterexample",
        }
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn shortest_sequence_is_one_two() {
        let beta = build_beta(2, 3).unwrap();
        assert_eq!(beta.values(), &[rat(1), rat(2)]);
    }

    #[test]
    fn first_element_one_is_poisoned_at_length_three() {
        // With a leading 1, the sum id(x) + id(y) always equals the product
        // id(1) * (x + y), so backtracking must replace the first element.
        let beta = build_beta(3, 3).unwrap();
        assert_eq!(beta.values(), &[rat(2), rat(3), rat(7)]);
        assert!(check_beta(beta.values(), 3).is_none());
    }

    #[test]
    fn collisions_are_reported_with_witnesses() {
        // 2 + (3 + 5) hits 2 * 5.
        let violation = check_beta(&[rat(2), rat(3), rat(5)], 3).expect("collision");
        assert_eq!(violation.value, rat(10));
        assert!(matches!(
            BetaSequence::from_integers(&[2, 3, 5], 3),
            Err(VspaceError::InvalidBeta(_))
        ));
        assert!(matches!(
            BetaSequence::from_integers(&[2, 3, 2], 3),
            Err(VspaceError::DuplicateBeta { .. })
        ));
    }

    #[test]
    fn membership_answers_carry_witnesses() {
        let beta = build_beta(4, 3).unwrap();
        let y = YMembership::new(&beta, beta.len());
        let sum = &beta.values()[0] + &beta.values()[1];
        let answer = y.check(&sum);
        assert!(answer.member);
        let (f, g) = answer.witness.unwrap();
        assert_eq!(f.indices, vec![0]);
        assert_eq!(g.indices, vec![1]);

        let product = &beta.values()[0] * &beta.values()[1];
        assert!(!y.check(&product).member);
        assert!(!y.check(&rat(997_003)).member);
    }

    #[test]
    fn beta_prefix_stays_valid() {
        let beta = build_beta(4, 2).unwrap();
        let prefix = beta.prefix(3);
        assert_eq!(prefix.len(), 3);
        assert!(check_beta(prefix.values(), prefix.term_bound()).is_none());
    }

    #[test]
    fn field_counterexample_sweep_has_no_violations() {
        let beta = build_beta(5, 3).unwrap();
        let report =
            verify_field_counterexample(&beta, TermBounds::new(2, 2), 2).unwrap();
        assert!(report.passes(), "{:?}", report.violations);
        assert!(report.checked > 0);

        assert!(matches!(
            verify_field_counterexample(&beta, TermBounds::new(4, 2), 2),
            Err(VspaceError::BoundTooLoose { requested: 4, verified: 3 })
        ));
    }

    #[test]
    fn lift_interleaves_scalars_and_scaled_vectors() {
        let beta = build_beta(4, 2).unwrap();
        let e = SortWord::new(vec![], vec![SortIndex(0), SortIndex(1)]).unwrap();
        let v = VectorElem::from_integers(FieldKind::Rationals, &[1, 0]);
        let b = lift_beta(&beta, &e, &v).unwrap();
        assert_eq!(b.len(), 4);
        assert_eq!(rat_of(b.get(0)), &beta.values()[0]);
        assert_eq!(vec_of(b.get(1)), &v.scale(&Scalar::Rat(beta.values()[1].clone())));

        let zero = VectorElem::zero(FieldKind::Rationals, 2);
        assert!(matches!(
            lift_beta(&beta, &e, &zero),
            Err(VspaceError::ZeroLiftVector)
        ));
    }

    #[test]
    fn vspace_counterexample_vector_headed() {
        let beta = build_beta(5, 3).unwrap();
        let e = SortWord::new(vec![], vec![SortIndex(1), SortIndex(0)]).unwrap();
        let v = VectorElem::from_integers(FieldKind::Rationals, &[1, 0]);
        let report =
            verify_vspace_counterexample(&beta, &e, &v, TermBounds::new(2, 2), 3).unwrap();
        assert!(report.passes(), "{:?}", report.violations);
    }

    #[test]
    fn vspace_counterexample_scalar_headed() {
        let beta = build_beta(5, 3).unwrap();
        let e = SortWord::new(vec![], vec![SortIndex(0), SortIndex(1)]).unwrap();
        let v = VectorElem::from_integers(FieldKind::Rationals, &[1, 0]);
        let report =
            verify_vspace_counterexample(&beta, &e, &v, TermBounds::new(2, 2), 3).unwrap();
        assert!(report.passes(), "{:?}", report.violations);
    }

    #[test]
    fn vspace_counterexample_needs_mixed_positions() {
        let beta = build_beta(4, 2).unwrap();
        let e = SortWord::constant(SortIndex(1));
        let v = VectorElem::from_integers(FieldKind::Rationals, &[1]);
        assert!(matches!(
            verify_vspace_counterexample(&beta, &e, &v, TermBounds::new(1, 2), 3),
            Err(VspaceError::MissingPositions { .. })
        ));
    }

    #[test]
    fn coefficients_read_off_scaled_sums() {
        let k = KSignature::new(5, 2).unwrap();
        let sig = k.signature();
        let leaf = OrderlyTerm::Leaf { sort: SortIndex(0) };
        assert_eq!(
            ot_k_coefficients(sig, &leaf).unwrap(),
            vec![Scalar::Mod { p: 5, value: 1 }]
        );

        let two_x_plus_three_y = OrderlyTerm::Node {
            op: OpIndex(0),
            children: vec![
                OrderlyTerm::Node { op: OpIndex(2), children: vec![leaf.clone()] },
                OrderlyTerm::Node { op: OpIndex(3), children: vec![leaf.clone()] },
            ],
        };
        assert_eq!(
            ot_k_coefficients(sig, &two_x_plus_three_y).unwrap(),
            vec![Scalar::Mod { p: 5, value: 2 }, Scalar::Mod { p: 5, value: 3 }]
        );

        let doubled = OrderlyTerm::Node {
            op: OpIndex(2),
            children: vec![two_x_plus_three_y.clone()],
        };
        assert_eq!(
            ot_k_coefficients(sig, &doubled).unwrap(),
            vec![Scalar::Mod { p: 5, value: 4 }, Scalar::Mod { p: 5, value: 1 }]
        );

        // Linearity cross-check on a concrete tuple.
        let args = vec![
            Value::Vector(VectorElem::from_integers(FieldKind::Prime(5), &[1, 2])),
            Value::Vector(VectorElem::from_integers(FieldKind::Prime(5), &[3, 4])),
        ];
        let direct = two_x_plus_three_y.evaluate(sig, &args).unwrap();
        assert_eq!(
            vec_of(&direct),
            &VectorElem::from_integers(FieldKind::Prime(5), &[2 + 9, 4 + 12])
        );
    }

    #[test]
    fn zero_term_from_equal_vectors() {
        let k = KSignature::new(2, 1).unwrap();
        let one = VectorElem::from_integers(FieldKind::Prime(2), &[1]);
        let (indices, term) =
            finite_dim_zero_term(k.signature(), &[one.clone(), one.clone()]).unwrap();
        assert_eq!(indices, vec![0, 1]);
        let value = term
            .evaluate(
                k.signature(),
                &[Value::Vector(one.clone()), Value::Vector(one)],
            )
            .unwrap();
        assert!(vec_of(&value).is_zero());
    }

    #[test]
    fn zero_term_by_elimination_over_gf5() {
        let k = KSignature::new(5, 2).unwrap();
        let vectors = [
            VectorElem::from_integers(FieldKind::Prime(5), &[1, 0]),
            VectorElem::from_integers(FieldKind::Prime(5), &[0, 1]),
            VectorElem::from_integers(FieldKind::Prime(5), &[2, 3]),
        ];
        let (indices, term) = finite_dim_zero_term(k.signature(), &vectors).unwrap();
        assert_eq!(indices, vec![0, 1, 2]);
        let coeffs = ot_k_coefficients(k.signature(), &term).unwrap();
        assert_eq!(
            coeffs,
            vec![
                Scalar::Mod { p: 5, value: 3 },
                Scalar::Mod { p: 5, value: 2 },
                Scalar::Mod { p: 5, value: 1 },
            ]
        );
        let args: Vec<Value> =
            vectors.iter().cloned().map(Value::Vector).collect();
        assert!(vec_of(&term.evaluate(k.signature(), &args).unwrap()).is_zero());
    }

    #[test]
    fn k_infinite_counterexample_sweeps_clean() {
        let report =
            verify_k_infinite_counterexample(3, 4, TermBounds::new(3, 3), 1).unwrap();
        assert!(report.passes(), "{:?}", report.violations);
        assert!(report.checked > 0);
        assert!(matches!(
            verify_k_infinite_counterexample(2, 4, TermBounds::new(3, 3), 1),
            Err(VspaceError::FieldTooSmall)
        ));
    }

    #[test]
    fn gate_passes_over_gf2_and_fails_on_independent_gf3() {
        let k2 = KSignature::new(2, 2).unwrap();
        let word = SortWord::constant(SortIndex(0));
        let basis2: Vec<Value> = (0..2)
            .map(|i| Value::Vector(VectorElem::basis(FieldKind::Prime(2), 2, i)))
            .collect();
        let b2 = SortedPrefix::new(k2.signature(), basis2, word.clone()).unwrap();
        let gate = corteh_gate(k2.signature(), &b2, TermBounds::new(1, 2), 1).unwrap();
        assert!(gate.passes);
        assert!(gate.witness.is_some());

        let k3 = KSignature::new(3, 3).unwrap();
        let basis3: Vec<Value> = (0..3)
            .map(|i| Value::Vector(VectorElem::basis(FieldKind::Prime(3), 3, i)))
            .collect();
        let b3 = SortedPrefix::new(k3.signature(), basis3, word.clone()).unwrap();
        let gate = corteh_gate(k3.signature(), &b3, TermBounds::new(1, 2), 1).unwrap();
        assert!(!gate.passes);
        assert!(gate.obstruction.is_some());

        // A zero vector in the prefix restores the constant-zero escape.
        let with_zero = vec![
            Value::Vector(VectorElem::zero(FieldKind::Prime(3), 3)),
            Value::Vector(VectorElem::basis(FieldKind::Prime(3), 3, 0)),
        ];
        let bz = SortedPrefix::new(k3.signature(), with_zero, word.clone()).unwrap();
        let gate = corteh_gate(k3.signature(), &bz, TermBounds::new(1, 2), 1).unwrap();
        assert!(gate.passes);
    }

    #[test]
    fn classification_matrix() {
        let gf2 = VectorSpaceSpec::new(FieldKind::Prime(2), 3).unwrap();
        let q2 = VectorSpaceSpec::new(FieldKind::Rationals, 2).unwrap();
        let alternating = SortWord::new(vec![], vec![SortIndex(0), SortIndex(1)]).unwrap();
        let const_vec = SortWord::constant(SortIndex(1));
        let const_scalar = SortWord::constant(SortIndex(0));
        let transient = SortWord::new(vec![SortIndex(0)], vec![SortIndex(1)]).unwrap();

        assert_eq!(
            classify_vspace(&gf2, &alternating).unwrap().verdict,
            Verdict::Ramsey
        );
        assert_eq!(
            classify_vspace(&q2, &alternating).unwrap().verdict,
            Verdict::NotRamsey
        );
        assert_eq!(classify_vspace(&q2, &const_vec).unwrap().verdict, Verdict::Ramsey);
        assert_eq!(
            classify_vspace(&q2, &const_scalar).unwrap().verdict,
            Verdict::NotRamsey
        );
        assert_eq!(
            classify_vspace(&gf2, &const_scalar).unwrap().verdict,
            Verdict::RamseyIfFieldFinite
        );
        assert_eq!(classify_vspace(&q2, &transient).unwrap().verdict, Verdict::Ramsey);
        assert_eq!(
            classify_vspace(&gf2, &transient).unwrap().verdict,
            Verdict::Ramsey
        );
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            VectorSpaceSpec::new(FieldKind::Prime(4), 2),
            Err(VspaceError::NotPrime { p: 4 })
        ));
        assert!(matches!(
            VectorSpaceSpec::new(FieldKind::Rationals, 0),
            Err(VspaceError::ZeroDim)
        ));
        assert!(k_signature_shape(KSignature::new(3, 2).unwrap().signature()).is_some());
        assert!(k_signature_shape(&Signature::vector_space(FieldKind::Prime(3), 2)).is_none());
    }
}
