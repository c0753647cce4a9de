//! Sorted algebras over pairwise-disjoint phyla, exact scalar arithmetic,
//! and eventually periodic sort words.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

/// Index of a phylum (sort) within a [`Signature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SortIndex(pub usize);

impl fmt::Display for SortIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Index of an operation within a [`Signature`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpIndex(pub usize);

impl fmt::Display for OpIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("sort word period must be nonempty")]
    EmptyPeriod,
    #[error("sort index {sort} out of range for {limit} phyla")]
    SortOutOfRange { sort: SortIndex, limit: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("operation `{op}` expects {expected} arguments, got {got}")]
    Arity { op: String, expected: usize, got: usize },
    #[error("argument {position} of `{op}` is not in the expected phylum")]
    SortMismatch { op: String, position: usize },
    #[error("table for `{op}` has no entry for the given arguments")]
    TableMiss { op: String },
}

/// Scalar field of a phylum: the prime field `GF(p)` or the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FieldKind {
    Prime(u64),
    Rationals,
}

impl FieldKind {
    pub fn is_finite(self) -> bool {
        matches!(self, FieldKind::Prime(_))
    }

    pub fn size(self) -> Option<u64> {
        match self {
            FieldKind::Prime(p) => Some(p),
            FieldKind::Rationals => None,
        }
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Prime(p) => write!(f, "gf({p})"),
            FieldKind::Rationals => write!(f, "rationals"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Exact field element. `Mod` values are always reduced modulo `p`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    Mod { p: u64, value: u64 },
    Rat(BigRational),
}

impl Scalar {
    pub fn zero(field: FieldKind) -> Scalar {
        Scalar::from_integer(field, 0)
    }

    pub fn one(field: FieldKind) -> Scalar {
        Scalar::from_integer(field, 1)
    }

    pub fn from_integer(field: FieldKind, n: i64) -> Scalar {
        match field {
            FieldKind::Prime(p) => {
                let r = n.rem_euclid(p as i64) as u64;
                Scalar::Mod { p, value: r }
            }
            FieldKind::Rationals => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
        }
    }

    pub fn ratio(numer: i64, denom: i64) -> Scalar {
        Scalar::Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn field(&self) -> FieldKind {
        match self {
            Scalar::Mod { p, .. } => FieldKind::Prime(*p),
            Scalar::Rat(_) => FieldKind::Rationals,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 0,
            Scalar::Rat(r) => r.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Mod { value, .. } => *value == 1,
            Scalar::Rat(r) => r.is_one(),
        }
    }

    fn is_normalized(&self) -> bool {
        match self {
            Scalar::Mod { p, value } => value < p,
            Scalar::Rat(_) => true,
        }
    }

    /// Panics when the operands live in different fields; evaluation through
    /// a validated [`Signature`] never mixes fields.
    pub fn add(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Mod { p, value: a }, Scalar::Mod { p: q, value: b }) if p == q => {
                Scalar::Mod {
                    p: *p,
                    value: ((*a as u128 + *b as u128) % *p as u128) as u64,
                }
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            _ => panic!("scalar addition across distinct fields"),
        }
    }

    pub fn mul(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Mod { p, value: a }, Scalar::Mod { p: q, value: b }) if p == q => {
                Scalar::Mod {
                    p: *p,
                    value: ((*a as u128 * *b as u128) % *p as u128) as u64,
                }
            }
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            _ => panic!("scalar multiplication across distinct fields"),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Mod { p, value } => Scalar::Mod {
                p: *p,
                value: (*p - *value) % *p,
            },
            Scalar::Rat(r) => Scalar::Rat(-r),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Scalar {
        self.add(&other.neg())
    }

    pub fn inv(&self) -> Option<Scalar> {
        if self.is_zero() {
            return None;
        }
        match self {
            Scalar::Mod { p, value } => Some(Scalar::Mod {
                p: *p,
                value: pow_mod(*value, *p - 2, *p),
            }),
            Scalar::Rat(r) => Some(Scalar::Rat(r.recip())),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Mod { value, .. } => write!(f, "{value}"),
            Scalar::Rat(r) => write!(f, "{r}"),
        }
    }
}

fn pow_mod(base: u64, mut exp: u64, p: u64) -> u64 {
    let mut base = base as u128 % p as u128;
    let mut acc: u128 = 1;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        exp >>= 1;
    }
    acc as u64
}

/// Coordinate vector with exact entries, all drawn from `field`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VectorElem {
    pub field: FieldKind,
    pub coords: Vec<Scalar>,
}

impl VectorElem {
    pub fn zero(field: FieldKind, dim: usize) -> VectorElem {
        VectorElem {
            field,
            coords: vec![Scalar::zero(field); dim],
        }
    }

    pub fn from_integers(field: FieldKind, coords: &[i64]) -> VectorElem {
        VectorElem {
            field,
            coords: coords.iter().map(|&c| Scalar::from_integer(field, c)).collect(),
        }
    }

    /// Standard basis vector `e_i` (zero-based).
    pub fn basis(field: FieldKind, dim: usize, i: usize) -> VectorElem {
        let mut v = VectorElem::zero(field, dim);
        v.coords[i] = Scalar::one(field);
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, other: &VectorElem) -> VectorElem {
        assert_eq!(self.coords.len(), other.coords.len(), "vector dimensions differ");
        VectorElem {
            field: self.field,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> VectorElem {
        VectorElem {
            field: self.field,
            coords: self.coords.iter().map(|c| s.mul(c)).collect(),
        }
    }
}

impl fmt::Display for VectorElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Element of some phylum.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Atom { phylum: SortIndex, ordinal: usize },
    Scalar(Scalar),
    Vector(VectorElem),
}

impl Value {
    pub fn as_scalar(&self) -> Option<&Scalar> {
        match self {
            Value::Scalar(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_vector(&self) -> Option<&VectorElem> {
        match self {
            Value::Vector(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Atom { ordinal, .. } => write!(f, "'#{ordinal}"),
            Value::Scalar(s) => write!(f, "{s}"),
            Value::Vector(v) => write!(f, "{v}"),
        }
    }
}

/// Carrier of one sort.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Phylum {
    /// Finite set of named atoms.
    Atoms { names: Vec<String> },
    /// A field, carried as its own phylum of scalars.
    Field(FieldKind),
    /// Coordinate vectors of a fixed dimension over a field.
    Vectors { field: FieldKind, dim: usize },
}

impl Phylum {
    pub fn contains(&self, own_index: SortIndex, v: &Value) -> bool {
        match (self, v) {
            (Phylum::Atoms { names }, Value::Atom { phylum, ordinal }) => {
                *phylum == own_index && *ordinal < names.len()
            }
            (Phylum::Field(k), Value::Scalar(s)) => s.field() == *k && s.is_normalized(),
            (Phylum::Vectors { field, dim }, Value::Vector(ve)) => {
                ve.field == *field
                    && ve.coords.len() == *dim
                    && ve.coords.iter().all(|c| c.field() == *field && c.is_normalized())
            }
            _ => false,
        }
    }

    /// Number of elements, or `None` when infinite.
    pub fn size(&self) -> Option<u128> {
        match self {
            Phylum::Atoms { names } => Some(names.len() as u128),
            Phylum::Field(k) => k.size().map(u128::from),
            Phylum::Vectors { field, dim } => {
                let p = field.size()?;
                (p as u128).checked_pow(*dim as u32)
            }
        }
    }

    /// All elements in ascending order, or `None` when infinite. Callers keep
    /// carriers small; this materializes the full set.
    pub fn values(&self, own_index: SortIndex) -> Option<Vec<Value>> {
        match self {
            Phylum::Atoms { names } => Some(
                (0..names.len())
                    .map(|ordinal| Value::Atom { phylum: own_index, ordinal })
                    .collect(),
            ),
            Phylum::Field(FieldKind::Prime(p)) => Some(
                (0..*p)
                    .map(|value| Value::Scalar(Scalar::Mod { p: *p, value }))
                    .collect(),
            ),
            Phylum::Field(FieldKind::Rationals) => None,
            Phylum::Vectors { field: FieldKind::Prime(p), dim } => {
                let mut out = vec![VectorElem::zero(FieldKind::Prime(*p), *dim)];
                for i in 0..*dim {
                    out = out
                        .into_iter()
                        .flat_map(|v| {
                            (0..*p).map(move |c| {
                                let mut w = v.clone();
                                w.coords[i] = Scalar::Mod { p: *p, value: c };
                                w
                            })
                        })
                        .collect();
                }
                out.sort();
                Some(out.into_iter().map(Value::Vector).collect())
            }
            Phylum::Vectors { field: FieldKind::Rationals, .. } => None,
        }
    }

    fn field_kind(&self) -> Option<FieldKind> {
        match self {
            Phylum::Atoms { .. } => None,
            Phylum::Field(k) => Some(*k),
            Phylum::Vectors { field, .. } => Some(*field),
        }
    }
}

/// How an operation computes: built-in exact arithmetic, a constant, or an
/// explicit finite table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evaluator {
    FieldAdd,
    FieldMul,
    VectorAdd,
    ScalarMul,
    ScaleBy(Scalar),
    Const(Value),
    Table(BTreeMap<Vec<Value>, Value>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperationDef {
    pub name: String,
    pub arg_sorts: Vec<SortIndex>,
    pub out_sort: SortIndex,
    pub eval: Evaluator,
}

impl OperationDef {
    pub fn arity(&self) -> usize {
        self.arg_sorts.len()
    }
}

/// A heterogeneous algebra: disjoint phyla plus operations between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    pub phyla: Vec<Phylum>,
    pub phylum_names: Vec<String>,
    pub ops: Vec<OperationDef>,
}

impl Signature {
    pub fn sort_count(&self) -> usize {
        self.phyla.len()
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    pub fn op(&self, op: OpIndex) -> &OperationDef {
        &self.ops[op.0]
    }

    pub fn op_named(&self, name: &str) -> Option<OpIndex> {
        self.ops.iter().position(|o| o.name == name).map(OpIndex)
    }

    pub fn sort_named(&self, name: &str) -> Option<SortIndex> {
        self.phylum_names.iter().position(|n| n == name).map(SortIndex)
    }

    pub fn contains(&self, sort: SortIndex, v: &Value) -> bool {
        self.phyla
            .get(sort.0)
            .is_some_and(|ph| ph.contains(sort, v))
    }

    pub fn phylum_size(&self, sort: SortIndex) -> Option<u128> {
        self.phyla[sort.0].size()
    }

    pub fn phylum_values(&self, sort: SortIndex) -> Option<Vec<Value>> {
        self.phyla[sort.0].values(sort)
    }

    pub fn display_value(&self, v: &Value) -> String {
        match v {
            Value::Atom { phylum, ordinal } => {
                match self.phyla.get(phylum.0) {
                    Some(Phylum::Atoms { names }) if *ordinal < names.len() => {
                        format!("'{}", names[*ordinal])
                    }
                    _ => format!("'#{ordinal}"),
                }
            }
            other => other.to_string(),
        }
    }

    pub fn evaluate_op(&self, op: OpIndex, args: &[Value]) -> Result<Value, EvalError> {
        let def = self.op(op);
        if args.len() != def.arity() {
            return Err(EvalError::Arity {
                op: def.name.clone(),
                expected: def.arity(),
                got: args.len(),
            });
        }
        for (i, (arg, sort)) in args.iter().zip(&def.arg_sorts).enumerate() {
            if !self.contains(*sort, arg) {
                return Err(EvalError::SortMismatch { op: def.name.clone(), position: i });
            }
        }
        Ok(match &def.eval {
            Evaluator::FieldAdd => {
                Value::Scalar(args[0].as_scalar().unwrap().add(args[1].as_scalar().unwrap()))
            }
            Evaluator::FieldMul => {
                Value::Scalar(args[0].as_scalar().unwrap().mul(args[1].as_scalar().unwrap()))
            }
            Evaluator::VectorAdd => {
                Value::Vector(args[0].as_vector().unwrap().add(args[1].as_vector().unwrap()))
            }
            Evaluator::ScalarMul => {
                Value::Vector(args[1].as_vector().unwrap().scale(args[0].as_scalar().unwrap()))
            }
            Evaluator::ScaleBy(s) => Value::Vector(args[0].as_vector().unwrap().scale(s)),
            Evaluator::Const(v) => v.clone(),
            Evaluator::Table(table) => table
                .get(args)
                .cloned()
                .ok_or(EvalError::TableMiss { op: def.name.clone() })?,
        })
    }

    /// Structural checks: well-formed phyla, pairwise disjointness, and
    /// operation/evaluator consistency. Empty result means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut errs = Vec::new();
        if self.phyla.is_empty() {
            errs.push("signature has no phyla".to_string());
        }
        if self.phylum_names.len() != self.phyla.len() {
            errs.push(format!(
                "{} phylum names for {} phyla",
                self.phylum_names.len(),
                self.phyla.len()
            ));
        }
        let mut seen_names = BTreeSet::new();
        for name in &self.phylum_names {
            if !seen_names.insert(name) {
                errs.push(format!("duplicate phylum name `{name}`"));
            }
        }
        for (i, ph) in self.phyla.iter().enumerate() {
            let label = self.phylum_label(i);
            match ph {
                Phylum::Atoms { names } => {
                    if names.is_empty() {
                        errs.push(format!("phylum {label} has no atoms"));
                    }
                    let mut seen = BTreeSet::new();
                    for n in names {
                        if !seen.insert(n) {
                            errs.push(format!("phylum {label} repeats atom '{n}"));
                        }
                    }
                }
                Phylum::Field(k) | Phylum::Vectors { field: k, .. } => {
                    if let FieldKind::Prime(p) = k {
                        if !is_prime(*p) {
                            errs.push(format!("phylum {label}: {p} is not prime"));
                        }
                    }
                    if let Phylum::Vectors { dim, .. } = ph {
                        if *dim == 0 {
                            errs.push(format!("phylum {label} has dimension 0"));
                        }
                    }
                }
            }
        }
        for i in 0..self.phyla.len() {
            for j in i + 1..self.phyla.len() {
                if let Some(reason) = phyla_overlap(&self.phyla[i], &self.phyla[j]) {
                    errs.push(format!(
                        "phyla {} and {} overlap: {reason}",
                        self.phylum_label(i),
                        self.phylum_label(j)
                    ));
                }
            }
        }
        for def in &self.ops {
            self.validate_op(def, &mut errs);
        }
        let mut seen_ops = BTreeSet::new();
        for def in &self.ops {
            if !seen_ops.insert(&def.name) {
                errs.push(format!("duplicate operation name `{}`", def.name));
            }
        }
        errs
    }

    fn phylum_label(&self, i: usize) -> String {
        match self.phylum_names.get(i) {
            Some(name) => format!("`{name}`"),
            None => format!("#{i}"),
        }
    }

    fn validate_op(&self, def: &OperationDef, errs: &mut Vec<String>) {
        let name = &def.name;
        if def.arity() == 0 {
            errs.push(format!("operation `{name}` has arity 0; operations take at least one argument"));
            return;
        }
        for sort in def.arg_sorts.iter().chain([&def.out_sort]) {
            if sort.0 >= self.phyla.len() {
                errs.push(format!("operation `{name}` references sort {sort} out of range"));
                return;
            }
        }
        let out = &self.phyla[def.out_sort.0];
        match &def.eval {
            Evaluator::FieldAdd | Evaluator::FieldMul => {
                let ok = def.arity() == 2
                    && def.arg_sorts[0] == def.out_sort
                    && def.arg_sorts[1] == def.out_sort
                    && matches!(out, Phylum::Field(_));
                if !ok {
                    errs.push(format!(
                        "operation `{name}` must map a field phylum squared to itself"
                    ));
                }
            }
            Evaluator::VectorAdd => {
                let ok = def.arity() == 2
                    && def.arg_sorts[0] == def.out_sort
                    && def.arg_sorts[1] == def.out_sort
                    && matches!(out, Phylum::Vectors { .. });
                if !ok {
                    errs.push(format!(
                        "operation `{name}` must map a vector phylum squared to itself"
                    ));
                }
            }
            Evaluator::ScalarMul => {
                let field_of_out = match out {
                    Phylum::Vectors { field, .. } => Some(*field),
                    _ => None,
                };
                let field_of_arg0 = self.phyla[def.arg_sorts[0].0].field_kind();
                let ok = def.arity() == 2
                    && def.arg_sorts[1] == def.out_sort
                    && matches!(self.phyla[def.arg_sorts[0].0], Phylum::Field(_))
                    && field_of_out.is_some()
                    && field_of_arg0 == field_of_out;
                if !ok {
                    errs.push(format!(
                        "operation `{name}` must take a scalar of the vectors' field and a vector"
                    ));
                }
            }
            Evaluator::ScaleBy(s) => {
                let ok = def.arity() == 1
                    && def.arg_sorts[0] == def.out_sort
                    && matches!(out, Phylum::Vectors { field, .. } if *field == s.field());
                if !ok {
                    errs.push(format!(
                        "operation `{name}` must scale a vector phylum by a scalar of its field"
                    ));
                }
            }
            Evaluator::Const(v) => {
                if !self.contains(def.out_sort, v) {
                    errs.push(format!(
                        "operation `{name}`: constant value lies outside the output phylum"
                    ));
                }
            }
            Evaluator::Table(table) => self.validate_table(def, table, errs),
        }
    }

    fn validate_table(
        &self,
        def: &OperationDef,
        table: &BTreeMap<Vec<Value>, Value>,
        errs: &mut Vec<String>,
    ) {
        let name = &def.name;
        let mut expected: u128 = 1;
        for sort in &def.arg_sorts {
            match self.phylum_size(*sort) {
                Some(n) => expected = expected.saturating_mul(n),
                None => {
                    errs.push(format!(
                        "operation `{name}` tabulates over infinite phylum {}",
                        self.phylum_label(sort.0)
                    ));
                    return;
                }
            }
        }
        for (key, value) in table {
            if key.len() != def.arity() {
                errs.push(format!("operation `{name}`: table key of wrong arity"));
                return;
            }
            for (arg, sort) in key.iter().zip(&def.arg_sorts) {
                if !self.contains(*sort, arg) {
                    errs.push(format!(
                        "operation `{name}`: table key {} outside phylum {}",
                        self.display_value(arg),
                        self.phylum_label(sort.0)
                    ));
                    return;
                }
            }
            if !self.contains(def.out_sort, value) {
                errs.push(format!(
                    "operation `{name}`: table value {} outside phylum {}",
                    self.display_value(value),
                    self.phylum_label(def.out_sort.0)
                ));
                return;
            }
        }
        if (table.len() as u128) != expected {
            errs.push(format!(
                "operation `{name}`: table has {} entries but the argument space has {expected}",
                table.len()
            ));
        }
    }

    /// Two-sorted vector-space algebra: scalars at sort 0, vectors at sort 1,
    /// operations `+V`, `+F`, `*F`, `.`.
    pub fn vector_space(field: FieldKind, dim: usize) -> Signature {
        let f = SortIndex(0);
        let v = SortIndex(1);
        Signature {
            phyla: vec![Phylum::Field(field), Phylum::Vectors { field, dim }],
            phylum_names: vec!["F".to_string(), "V".to_string()],
            ops: vec![
                OperationDef {
                    name: "+V".to_string(),
                    arg_sorts: vec![v, v],
                    out_sort: v,
                    eval: Evaluator::VectorAdd,
                },
                OperationDef {
                    name: "+F".to_string(),
                    arg_sorts: vec![f, f],
                    out_sort: f,
                    eval: Evaluator::FieldAdd,
                },
                OperationDef {
                    name: "*F".to_string(),
                    arg_sorts: vec![f, f],
                    out_sort: f,
                    eval: Evaluator::FieldMul,
                },
                OperationDef {
                    name: ".".to_string(),
                    arg_sorts: vec![f, v],
                    out_sort: v,
                    eval: Evaluator::ScalarMul,
                },
            ],
        }
    }

    /// One-sorted field algebra with `+F` and `*F`.
    pub fn field_only(field: FieldKind) -> Signature {
        let f = SortIndex(0);
        Signature {
            phyla: vec![Phylum::Field(field)],
            phylum_names: vec!["F".to_string()],
            ops: vec![
                OperationDef {
                    name: "+F".to_string(),
                    arg_sorts: vec![f, f],
                    out_sort: f,
                    eval: Evaluator::FieldAdd,
                },
                OperationDef {
                    name: "*F".to_string(),
                    arg_sorts: vec![f, f],
                    out_sort: f,
                    eval: Evaluator::FieldMul,
                },
            ],
        }
    }

    /// One-sorted vector algebra over `GF(p)`: vector addition plus one unary
    /// scaling `f_r` for every nonzero scalar `r`. `ops[0]` is `+V`;
    /// `ops[r]` scales by `r` for `1 <= r < p`.
    pub fn k_signature(p: u64, dim: usize) -> Signature {
        let v = SortIndex(0);
        let field = FieldKind::Prime(p);
        let mut ops = vec![OperationDef {
            name: "+V".to_string(),
            arg_sorts: vec![v, v],
            out_sort: v,
            eval: Evaluator::VectorAdd,
        }];
        for r in 1..p {
            ops.push(OperationDef {
                name: format!("f{r}"),
                arg_sorts: vec![v],
                out_sort: v,
                eval: Evaluator::ScaleBy(Scalar::Mod { p, value: r }),
            });
        }
        Signature {
            phyla: vec![Phylum::Vectors { field, dim }],
            phylum_names: vec!["V".to_string()],
            ops,
        }
    }
}

fn phyla_overlap(a: &Phylum, b: &Phylum) -> Option<String> {
    match (a, b) {
        (Phylum::Atoms { names: na }, Phylum::Atoms { names: nb }) => {
            let set: BTreeSet<_> = na.iter().collect();
            nb.iter()
                .find(|n| set.contains(n))
                .map(|n| format!("both contain atom '{n}"))
        }
        (Phylum::Field(ka), Phylum::Field(kb)) if ka == kb => {
            Some(format!("both are the field {ka}"))
        }
        (
            Phylum::Vectors { field: ka, dim: da },
            Phylum::Vectors { field: kb, dim: db },
        ) if ka == kb && da == db => Some(format!("both are {ka}^{da}")),
        _ => None,
    }
}

/// Classification of a sort word: either every occurring sort recurs forever,
/// or some sort is transient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OmegaClass {
    /// Every occurring sort occurs infinitely often. `head` is the sort at
    /// position 0; `recurring` is the set of sorts in the periodic part.
    InOmega {
        head: SortIndex,
        recurring: BTreeSet<SortIndex>,
    },
    /// Some sort occurs only finitely often. `n_star` is the last position
    /// holding a transient sort; `eventual` is the tail sort when the word is
    /// eventually constant.
    NotInOmega {
        n_star: usize,
        eventual: Option<SortIndex>,
    },
}

/// Eventually periodic infinite word of sort indices: `prefix` followed by
/// `period` repeated forever. Stored canonically — the period is primitive
/// and the prefix cannot be shortened by rotating the period — so two words
/// are equal as sequences iff they are equal as values.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SortWord {
    prefix: Vec<SortIndex>,
    period: Vec<SortIndex>,
}

impl SortWord {
    pub fn new(prefix: Vec<SortIndex>, period: Vec<SortIndex>) -> Result<SortWord, AlgebraError> {
        if period.is_empty() {
            return Err(AlgebraError::EmptyPeriod);
        }
        let mut period = period;
        let len = period.len();
        for d in 1..=len {
            if len % d == 0 && (d..len).all(|i| period[i] == period[i - d]) {
                period.truncate(d);
                break;
            }
        }
        let mut prefix = prefix;
        while let Some(&last) = prefix.last() {
            if last == *period.last().unwrap() {
                prefix.pop();
                period.rotate_right(1);
            } else {
                break;
            }
        }
        Ok(SortWord { prefix, period })
    }

    pub fn constant(sort: SortIndex) -> SortWord {
        SortWord { prefix: Vec::new(), period: vec![sort] }
    }

    pub fn prefix(&self) -> &[SortIndex] {
        &self.prefix
    }

    pub fn period(&self) -> &[SortIndex] {
        &self.period
    }

    pub fn at(&self, i: usize) -> SortIndex {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn take(&self, n: usize) -> Vec<SortIndex> {
        (0..n).map(|i| self.at(i)).collect()
    }

    /// Largest sort index mentioned anywhere in the word.
    pub fn max_sort(&self) -> SortIndex {
        self.prefix
            .iter()
            .chain(&self.period)
            .copied()
            .max()
            .expect("period is nonempty")
    }

    pub fn omega_class(&self) -> OmegaClass {
        let recurring: BTreeSet<SortIndex> = self.period.iter().copied().collect();
        let transient_max = self
            .prefix
            .iter()
            .enumerate()
            .filter(|(_, s)| !recurring.contains(s))
            .map(|(i, _)| i)
            .max();
        match transient_max {
            None => OmegaClass::InOmega { head: self.at(0), recurring },
            Some(n_star) => OmegaClass::NotInOmega {
                n_star,
                eventual: (self.period.len() == 1).then(|| self.period[0]),
            },
        }
    }
}

impl fmt::Display for SortWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "prefix [")?;
        for (i, s) in self.prefix.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "] period [")?;
        for (i, s) in self.period.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "]")
    }
}
