//! Semantic resolution: builtin ops land on the intended evaluators, sort
//! words and sequences type-check, and every failure is a spanned
//! diagnostic.

use ramsey_core::algebra::{
    Evaluator, FieldKind, OmegaClass, Signature, SortIndex, Value,
};
use ramsey_core::vspace::k_signature_shape;
use ramsey_dsl::{elaborate, parse};

fn elaborate_text(text: &str) -> ramsey_dsl::Elaborated {
    elaborate(&parse(text).unwrap()).unwrap()
}

fn diagnostics(text: &str) -> Vec<ramsey_dsl::Diagnostic> {
    elaborate(&parse(text).unwrap()).err().expect("expected diagnostics")
}

const VSPACE_GF2: &str = "
phylum F = gf(2)
phylum V = vspace(gf(2), 3)
op addV : 1 1 -> 1 = builtin
op addF : 0 0 -> 0 = builtin add
op mulF : 0 0 -> 0 = builtin mul
op smul : 0 1 -> 1 = builtin scale
";

#[test]
fn vector_space_file_matches_the_canonical_signature_structurally() {
    let elab = elaborate_text(VSPACE_GF2);
    let canon = Signature::vector_space(FieldKind::Prime(2), 3);
    assert_eq!(elab.signature.phyla, canon.phyla);
    assert_eq!(elab.signature.ops.len(), canon.ops.len());
    // Same shapes and evaluators; surface names are free.
    let shape = |sig: &Signature| {
        let mut v: Vec<_> = sig
            .ops
            .iter()
            .map(|o| (o.arg_sorts.clone(), o.out_sort, o.eval.clone()))
            .collect();
        v.sort_by_key(|(a, o, _)| (a.clone(), *o));
        v
    };
    assert_eq!(shape(&elab.signature), shape(&canon));
}

#[test]
fn bare_builtin_on_two_vectors_is_vector_addition() {
    let elab = elaborate_text(VSPACE_GF2);
    let add = elab.signature.ops.iter().find(|o| o.name == "addV").unwrap();
    assert_eq!(add.eval, Evaluator::VectorAdd);
}

#[test]
fn bare_builtin_on_a_field_is_ambiguous() {
    let diags = diagnostics("phylum F = gf(3)\nop f : 0 0 -> 0 = builtin\n");
    assert!(diags[0].message.contains("ambiguous"), "{diags:?}");
}

#[test]
fn two_sorted_constant_algebra_elaborates() {
    let elab = elaborate_text(
        "
phylum A = atoms('a 'b)
phylum B = atoms('u)
op comp : 0 0 -> 0 = table { ('a 'a) -> 'a, ('a 'b) -> 'a, ('b 'a) -> 'a, ('b 'b) -> 'a }
op h : 1 -> 0 = table { ('u) -> 'a }
",
    );
    assert_eq!(elab.signature.ops[0].eval, {
        let sig = &elab.signature;
        let a = Value::Atom { phylum: SortIndex(0), ordinal: 0 };
        let pairs = sig.phylum_values(SortIndex(0)).unwrap();
        Evaluator::Table(
            pairs
                .iter()
                .flat_map(|x| pairs.iter().map(|y| (vec![x.clone(), y.clone()], a.clone())))
                .collect(),
        )
    });
}

#[test]
fn empty_prefix_sort_word_is_the_alternating_word() {
    let elab = elaborate_text(&format!("{VSPACE_GF2}\nsort e = prefix [] period [0 1]\n"));
    let e = &elab.sorts["e"];
    assert_eq!(e.at(0), SortIndex(0));
    assert_eq!(e.at(1), SortIndex(1));
    assert_eq!(e.at(7), SortIndex(1));
    assert!(matches!(e.omega_class(), OmegaClass::InOmega { .. }));
}

#[test]
fn ksig_file_has_the_scaling_algebra_shape() {
    let elab = elaborate_text(
        "
phylum V = ksig(5, 2)
op addV : 0 0 -> 0 = builtin add
op f1 : 0 -> 0 = builtin scale_by(1)
op f2 : 0 -> 0 = builtin scale_by(2)
op f3 : 0 -> 0 = builtin scale_by(3)
op f4 : 0 -> 0 = builtin scale_by(4)
",
    );
    assert_eq!(k_signature_shape(&elab.signature), Some((5, 2)));
}

#[test]
fn sequences_bind_against_the_sort_word() {
    let elab = elaborate_text(&format!(
        "{VSPACE_GF2}
sort e = prefix [] period [0 1]
seq b = [1 (1 0 1) 0 (0 1 1)]
experiment main {{
  sort = e
  sequence = b
}}
"
    ));
    let prefix = elab.experiments["main"].prefix.as_ref().unwrap();
    assert_eq!(prefix.len(), 4);
    assert!(matches!(prefix.get(1), Value::Vector(_)));
}

#[test]
fn sequence_sort_mismatch_points_at_the_value() {
    let text = format!(
        "{VSPACE_GF2}
sort e = prefix [] period [0 1]
seq b = [1 17/3]
experiment main {{
  sort = e
  sequence = b
}}
"
    );
    let diags = elaborate(&parse(&text).unwrap()).err().expect("expected diagnostics");
    assert_eq!(diags.len(), 1);
    assert!(diags[0].message.contains("position 1"), "{diags:?}");
    assert_eq!(&text[diags[0].span.start.byte..diags[0].span.end.byte], "17/3");
}

#[test]
fn coloring_phylum_must_match_the_first_sort() {
    let text = format!(
        "{VSPACE_GF2}
sort v = prefix [] period [1]
coloring zero = table {{ 0 -> 0, 1 -> 1 }}
experiment main {{
  sort = v
  coloring = zero
}}
"
    );
    let diags = elaborate(&parse(&text).unwrap()).err().expect("expected diagnostics");
    assert_eq!(diags.len(), 1);
    assert!(diags[0].message.contains("phylum 0"), "{diags:?}");
    assert!(diags[0].message.contains("phylum 1"), "{diags:?}");
}

#[test]
fn unknown_names_and_duplicates_are_reported() {
    let text = "
phylum A = atoms('a 'b)
sort e = prefix [] period [0]
sort e = prefix [] period [0 0]
experiment main {
  sort = e
  sequence = nope
}
";
    let diags = elaborate(&parse(text).unwrap()).err().expect("expected diagnostics");
    let messages: Vec<&str> = diags.iter().map(|d| d.message.as_str()).collect();
    assert!(messages.iter().any(|m| m.contains("duplicate name `e`")), "{messages:?}");
    assert!(messages.iter().any(|m| m.contains("unknown sequence `nope`")), "{messages:?}");
}

#[test]
fn membership_coloring_classifies_pair_sums() {
    let elab = elaborate_text(
        "
phylum Q = rationals
op addQ : 0 0 -> 0 = builtin add
op mulQ : 0 0 -> 0 = builtin mul
seq beta = [2 3 7]
coloring y = in_Y(beta, 3)
",
    );
    let def = &elab.colorings["y"];
    assert_eq!(def.phylum, SortIndex(0));
    let rat = |n: i64| Value::Scalar(ramsey_core::Scalar::from_integer(FieldKind::Rationals, n));
    assert_eq!(def.coloring.classify(&rat(5)), 0);
    assert_eq!(def.coloring.classify(&rat(10)), 0);
    assert_eq!(def.coloring.classify(&rat(11)), 1);
}

#[test]
fn numbered_atom_ranges_expand() {
    let elab = elaborate_text("phylum N = atoms('0..4)\nop next : 0 -> 0 = table { ('0) -> '1, ('1) -> '2, ('2) -> '3, ('3) -> '0 }\n");
    assert_eq!(
        elab.signature.phyla[0],
        ramsey_core::Phylum::Atoms {
            names: vec!["0".into(), "1".into(), "2".into(), "3".into()]
        }
    );
}

#[test]
fn partial_tables_are_rejected() {
    let diags = diagnostics(
        "phylum A = atoms('a 'b)\nop f : 0 -> 0 = table { ('a) -> 'b }\n",
    );
    assert!(diags[0].message.contains("covers 1 of 2"), "{diags:?}");
}

#[test]
fn nonprime_field_orders_are_rejected() {
    let diags = diagnostics("phylum F = gf(4)\n");
    assert!(diags[0].message.contains("not prime"), "{diags:?}");
}
