//! Text format for describing algebras, sort words, sequences, colorings,
//! and experiments (`.ralg` files), with a span-carrying parser, a canonical
//! printer, and an elaborator producing core objects.
//!
//! ```text
//! file := decl*
//! decl := "phylum" NAME "=" carrier
//!       | "op" NAME ":" sorts "->" sort "=" body
//!       | "sort" NAME "=" "prefix" "[" ints "]" "period" "[" ints "]"
//!       | "seq" NAME "=" "[" values "]"
//!       | "coloring" NAME "=" spec
//!       | "experiment" NAME "{" kv* "}"
//! ```
//!
//! Comments run from `#` to end of line. Values are integers, rationals
//! `a/b`, atoms `'name`, and coordinate tuples `(1 0 2)`.

pub mod ast;
pub mod elaborate;
pub mod lexer;
pub mod parser;
pub mod printer;

pub use ast::{Diagnostic, ExperimentAst, SourceSpan};
pub use elaborate::{elaborate, literal_to_value, ColoringDef, Elaborated, ExperimentConfig};
pub use parser::parse;
pub use printer::pretty_print;
