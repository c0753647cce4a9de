//! Parse/print round-trips and span hygiene for the `.ralg` format.

use ramsey_dsl::{parse, pretty_print};

const ALL_KINDS: &str = r#"
# every declaration kind in one file
phylum F = gf(2)
phylum V = vspace(gf(2), 3)
phylum A = atoms('x0 'x1)
phylum N = atoms('0..4)
phylum Q = rationals
op addF : 0 0 -> 0 = builtin add
op addV : 1 1 -> 1 = builtin
op smul : 0 1 -> 1 = builtin scale
op swap : 2 -> 2 = table { ('x0) -> 'x1, ('x1) -> 'x0 }
sort e = prefix [0 1] period [0]
seq b = [1 -2 4/6 'x0 (1 0 1)]
coloring parity = table { 'x0 -> 0, 'x1 -> 1, default -> 0 }
coloring y = in_Y(b, 3)
coloring lead = leading_coeff_one
coloring c0 = coord(0)
experiment main {
  kind = search
  sequence = b
  target = 3
}
"#;

#[test]
fn print_then_parse_is_identity_up_to_spans() {
    let ast = parse(ALL_KINDS).unwrap();
    let printed = pretty_print(&ast);
    let reparsed = parse(&printed).unwrap();
    assert_eq!(reparsed.stripped(), ast.stripped());
}

#[test]
fn printing_is_idempotent_after_one_pass() {
    let once = pretty_print(&parse(ALL_KINDS).unwrap());
    let twice = pretty_print(&parse(&once).unwrap());
    assert_eq!(once, twice);
}

#[test]
fn empty_file_prints_empty() {
    let ast = parse("").unwrap();
    assert!(ast.decls.is_empty());
    assert_eq!(pretty_print(&ast), "");
    assert_eq!(pretty_print(&parse("  # only a comment\n").unwrap()), "");
}

#[test]
fn canonical_output_is_stable() {
    let printed = pretty_print(&parse(ALL_KINDS).unwrap());
    let expected = "\
phylum F = gf(2)
phylum V = vspace(gf(2), 3)
phylum A = atoms('x0 'x1)
phylum N = atoms('0..4)
phylum Q = rationals
op addF : 0 0 -> 0 = builtin add
op addV : 1 1 -> 1 = builtin
op smul : 0 1 -> 1 = builtin scale
op swap : 2 -> 2 = table { ('x0) -> 'x1, ('x1) -> 'x0 }
sort e = prefix [0 1] period [0]
seq b = [1 -2 2/3 'x0 (1 0 1)]
coloring parity = table { 'x0 -> 0, 'x1 -> 1, default -> 0 }
coloring y = in_Y(b, 3)
coloring lead = leading_coeff_one
coloring c0 = coord(0)
experiment main {
  kind = search
  sequence = b
  target = 3
}
";
    assert_eq!(printed, expected);
}

#[test]
fn parse_errors_carry_valid_spans_and_keep_going() {
    let text = "phylum F = gf(six)\nsort e = prefix [0] period []\nop f : 0 -> 0 = magic\n";
    let diags = parse(text).unwrap_err();
    assert!(diags.len() >= 2, "{diags:?}");
    for d in &diags {
        assert!(d.span.valid_for(text.len()), "bad span in {d}");
    }
    let first = &diags[0];
    assert_eq!(&text[first.span.start.byte..first.span.end.byte], "six");
}

#[test]
fn error_messages_name_line_and_column() {
    let text = "seq b = [1\n         2 oops]\n";
    let diags = parse(text).unwrap_err();
    let shown = diags[0].to_string();
    assert!(shown.starts_with("2:"), "{shown}");
    assert!(shown.contains("oops"), "{shown}");
}

#[test]
fn rationals_normalize_once() {
    let once = pretty_print(&parse("seq b = [4/2 -6/4]\n").unwrap());
    assert_eq!(once, "seq b = [2/1 -3/2]\n");
    assert_eq!(pretty_print(&parse(&once).unwrap()), once);
}
