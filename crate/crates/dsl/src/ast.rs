//! Syntax tree for `.ralg` experiment files.
//!
//! Every node that a diagnostic can point at carries a [`SourceSpan`].
//! Structural comparisons (round-trip tests) go through
//! [`ExperimentAst::stripped`], which zeroes the spans.

use num::{BigInt, BigRational};

/// A point in the source text. Lines and columns are 1-based, bytes 0-based.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Location {
    pub line: usize,
    pub column: usize,
    pub byte: usize,
}

/// Half-open source range; `start.byte <= end.byte`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SourceSpan {
    pub start: Location,
    pub end: Location,
}

impl SourceSpan {
    pub fn join(self, other: SourceSpan) -> SourceSpan {
        let start = if self.start.byte <= other.start.byte { self.start } else { other.start };
        let end = if self.end.byte >= other.end.byte { self.end } else { other.end };
        SourceSpan { start, end }
    }

    /// Well-formed and contained in a text of `len` bytes.
    pub fn valid_for(&self, len: usize) -> bool {
        self.start.byte <= self.end.byte
            && self.end.byte <= len
            && self.start.line >= 1
            && self.start.column >= 1
    }
}

/// A message anchored to a source range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub message: String,
    pub span: SourceSpan,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}:{}-{}:{}: {}",
            self.span.start.line,
            self.span.start.column,
            self.span.end.line,
            self.span.end.column,
            self.message
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldRef {
    Gf(u64),
    Rationals,
}

/// Right-hand side of a `phylum` declaration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Carrier {
    /// `atoms('a 'b)` — explicit finite carrier.
    Atoms(Vec<String>),
    /// `atoms('0..n)` — atoms named by the numbers `0..n`.
    AtomRange { first: u64, limit: u64 },
    /// `gf(p)` — prime-field scalars.
    Gf(u64),
    /// `rationals` — exact rational scalars.
    Rationals,
    /// `vspace(field, dim)` — coordinate vectors of a vector space.
    Vspace { field: FieldRef, dim: usize },
    /// `ksig(p, dim)` — the vector carrier of the one-sorted scaling algebra.
    Ksig { p: u64, dim: usize },
}

/// A literal value: integer, rational, atom, or coordinate tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Literal {
    Int(BigInt),
    Rat(BigRational),
    Atom(String),
    Tuple(Vec<Literal>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpBuiltin {
    Add,
    Mul,
    Scale,
    ScaleBy(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpBody {
    /// `builtin` (resolved by shape) or `builtin add` etc.
    Builtin(Option<OpBuiltin>),
    /// `table { (args) -> out, ... }`
    Table { rows: Vec<(Vec<Literal>, Literal)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OpDecl {
    pub name: String,
    pub arg_sorts: Vec<usize>,
    pub out_sort: usize,
    pub body: OpBody,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortDecl {
    pub prefix: Vec<usize>,
    pub period: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringBody {
    /// Finite lookup table with an optional `default` color.
    Table { entries: Vec<(Literal, usize)>, default: Option<usize> },
    /// Two colors: membership in the sum set of the named rational sequence.
    InY { seq: String, bound: usize },
    /// Two colors: whether a vector's first nonzero coordinate is 1.
    LeadingCoeffOne,
    /// Colors a vector by its i-th coordinate (finite fields only).
    Coord(usize),
}

/// Value position of an `experiment` key: a declared name or a literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KvValue {
    Name(String),
    Lit(Literal),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Phylum { name: String, carrier: Carrier },
    Op(OpDecl),
    Sort { name: String, decl: SortDecl },
    Seq { name: String, values: Vec<(Literal, SourceSpan)> },
    Coloring { name: String, body: ColoringBody },
    Experiment { name: String, entries: Vec<(String, KvValue, SourceSpan)> },
}

impl DeclKind {
    pub fn name(&self) -> &str {
        match self {
            DeclKind::Phylum { name, .. }
            | DeclKind::Sort { name, .. }
            | DeclKind::Seq { name, .. }
            | DeclKind::Coloring { name, .. }
            | DeclKind::Experiment { name, .. } => name,
            DeclKind::Op(op) => &op.name,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub kind: DeclKind,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentAst {
    pub decls: Vec<Decl>,
}

impl ExperimentAst {
    /// Copy with every span zeroed, for span-insensitive comparison.
    pub fn stripped(&self) -> ExperimentAst {
        let zero = SourceSpan::default();
        let decls = self
            .decls
            .iter()
            .map(|d| {
                let kind = match &d.kind {
                    DeclKind::Seq { name, values } => DeclKind::Seq {
                        name: name.clone(),
                        values: values.iter().map(|(v, _)| (v.clone(), zero)).collect(),
                    },
                    DeclKind::Experiment { name, entries } => DeclKind::Experiment {
                        name: name.clone(),
                        entries: entries
                            .iter()
                            .map(|(k, v, _)| (k.clone(), v.clone(), zero))
                            .collect(),
                    },
                    other => other.clone(),
                };
                Decl { kind, span: zero }
            })
            .collect();
        ExperimentAst { decls }
    }
}
