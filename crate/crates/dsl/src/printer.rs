//! Canonical formatter. `parse(pretty_print(ast))` reproduces `ast` up to
//! spans, and printing a freshly parsed file is idempotent.

use crate::ast::*;

pub fn pretty_print(ast: &ExperimentAst) -> String {
    let mut out = String::new();
    for decl in &ast.decls {
        print_decl(&mut out, &decl.kind);
    }
    out
}

fn print_decl(out: &mut String, kind: &DeclKind) {
    match kind {
        DeclKind::Phylum { name, carrier } => {
            out.push_str(&format!("phylum {name} = {}\n", carrier_text(carrier)));
        }
        DeclKind::Op(op) => {
            out.push_str(&format!("op {} :", op.name));
            for s in &op.arg_sorts {
                out.push_str(&format!(" {s}"));
            }
            out.push_str(&format!(" -> {} = {}\n", op.out_sort, op_body_text(&op.body)));
        }
        DeclKind::Sort { name, decl } => {
            out.push_str(&format!(
                "sort {name} = prefix [{}] period [{}]\n",
                indices_text(&decl.prefix),
                indices_text(&decl.period)
            ));
        }
        DeclKind::Seq { name, values } => {
            let items: Vec<String> = values.iter().map(|(v, _)| literal_text(v)).collect();
            out.push_str(&format!("seq {name} = [{}]\n", items.join(" ")));
        }
        DeclKind::Coloring { name, body } => {
            out.push_str(&format!("coloring {name} = {}\n", coloring_text(body)));
        }
        DeclKind::Experiment { name, entries } => {
            out.push_str(&format!("experiment {name} {{\n"));
            for (key, value, _) in entries {
                let v = match value {
                    KvValue::Name(n) => n.clone(),
                    KvValue::Lit(l) => literal_text(l),
                };
                out.push_str(&format!("  {key} = {v}\n"));
            }
            out.push_str("}\n");
        }
    }
}

fn carrier_text(carrier: &Carrier) -> String {
    match carrier {
        Carrier::Atoms(names) => {
            let items: Vec<String> = names.iter().map(|n| format!("'{n}")).collect();
            format!("atoms({})", items.join(" "))
        }
        Carrier::AtomRange { first, limit } => format!("atoms('{first}..{limit})"),
        Carrier::Gf(p) => format!("gf({p})"),
        Carrier::Rationals => "rationals".to_string(),
        Carrier::Vspace { field, dim } => format!("vspace({}, {dim})", field_text(field)),
        Carrier::Ksig { p, dim } => format!("ksig({p}, {dim})"),
    }
}

fn field_text(field: &FieldRef) -> String {
    match field {
        FieldRef::Gf(p) => format!("gf({p})"),
        FieldRef::Rationals => "rationals".to_string(),
    }
}

fn op_body_text(body: &OpBody) -> String {
    match body {
        OpBody::Builtin(None) => "builtin".to_string(),
        OpBody::Builtin(Some(OpBuiltin::Add)) => "builtin add".to_string(),
        OpBody::Builtin(Some(OpBuiltin::Mul)) => "builtin mul".to_string(),
        OpBody::Builtin(Some(OpBuiltin::Scale)) => "builtin scale".to_string(),
        OpBody::Builtin(Some(OpBuiltin::ScaleBy(r))) => format!("builtin scale_by({r})"),
        OpBody::Table { rows } => {
            let items: Vec<String> = rows
                .iter()
                .map(|(args, out)| {
                    let args: Vec<String> = args.iter().map(literal_text).collect();
                    format!("({}) -> {}", args.join(" "), literal_text(out))
                })
                .collect();
            format!("table {{ {} }}", items.join(", "))
        }
    }
}

fn coloring_text(body: &ColoringBody) -> String {
    match body {
        ColoringBody::Table { entries, default } => {
            let mut items: Vec<String> = entries
                .iter()
                .map(|(v, c)| format!("{} -> {c}", literal_text(v)))
                .collect();
            if let Some(d) = default {
                items.push(format!("default -> {d}"));
            }
            format!("table {{ {} }}", items.join(", "))
        }
        ColoringBody::InY { seq, bound } => format!("in_Y({seq}, {bound})"),
        ColoringBody::LeadingCoeffOne => "leading_coeff_one".to_string(),
        ColoringBody::Coord(i) => format!("coord({i})"),
    }
}

fn indices_text(indices: &[usize]) -> String {
    let items: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
    items.join(" ")
}

fn literal_text(lit: &Literal) -> String {
    match lit {
        Literal::Int(n) => n.to_string(),
        Literal::Rat(r) => format!("{}/{}", r.numer(), r.denom()),
        Literal::Atom(a) => format!("'{a}"),
        Literal::Tuple(items) => {
            let items: Vec<String> = items.iter().map(literal_text).collect();
            format!("({})", items.join(" "))
        }
    }
}
