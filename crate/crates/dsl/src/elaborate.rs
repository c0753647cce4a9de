//! Resolves a parsed file into core objects: a signature, sort words,
//! sorted prefixes, and colorings. All semantic checks happen here so that
//! every failure points back at a source span.

use std::collections::{BTreeMap, BTreeSet};

use num::{BigInt, BigRational, Integer, ToPrimitive};
use ramsey_core::algebra::{
    Evaluator, FieldKind, OperationDef, Phylum, Scalar, Signature, SortIndex, SortWord, Value,
    VectorElem,
};
use ramsey_core::homogeneity::Coloring;
use ramsey_core::reduction::{SortedPrefix, TermBounds};
use ramsey_core::vspace::{BetaSequence, YMembership};

use crate::ast::*;

/// A coloring together with the phylum whose values it classifies.
pub struct ColoringDef {
    pub phylum: SortIndex,
    pub coloring: Coloring,
}

/// One `experiment` block with its reference keys resolved.
pub struct ExperimentConfig {
    pub entries: Vec<(String, KvValue, SourceSpan)>,
    pub sort: Option<SortWord>,
    pub prefix: Option<SortedPrefix>,
    pub coloring: Option<String>,
    pub bounds: Option<TermBounds>,
    pub span: SourceSpan,
}

impl ExperimentConfig {
    pub fn value(&self, key: &str) -> Option<&KvValue> {
        self.entries.iter().find(|(k, _, _)| k == key).map(|(_, v, _)| v)
    }

    pub fn name_value(&self, key: &str) -> Option<&str> {
        match self.value(key)? {
            KvValue::Name(n) => Some(n),
            KvValue::Lit(_) => None,
        }
    }

    pub fn usize_value(&self, key: &str) -> Option<usize> {
        match self.value(key)? {
            KvValue::Lit(Literal::Int(n)) => n.to_usize(),
            _ => None,
        }
    }

    pub fn literal_value(&self, key: &str) -> Option<&Literal> {
        match self.value(key)? {
            KvValue::Lit(l) => Some(l),
            KvValue::Name(_) => None,
        }
    }
}

/// Fully resolved contents of an experiment file.
pub struct Elaborated {
    pub signature: Signature,
    pub sorts: BTreeMap<String, SortWord>,
    pub seqs: BTreeMap<String, Vec<(Literal, SourceSpan)>>,
    pub colorings: BTreeMap<String, ColoringDef>,
    pub experiments: BTreeMap<String, ExperimentConfig>,
}

impl Elaborated {
    /// The values of a `seq` declaration read as exact rationals.
    pub fn rational_seq(&self, name: &str) -> Option<Vec<BigRational>> {
        let lits = self.seqs.get(name)?;
        lits.iter().map(|(l, _)| literal_to_rational(l)).collect()
    }
}

fn literal_to_rational(lit: &Literal) -> Option<BigRational> {
    match lit {
        Literal::Int(n) => Some(BigRational::from_integer(n.clone())),
        Literal::Rat(r) => Some(r.clone()),
        _ => None,
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn literal_to_scalar(lit: &Literal, field: FieldKind) -> Result<Scalar, String> {
    match (lit, field) {
        (Literal::Int(n), FieldKind::Prime(p)) => {
            let m = n.mod_floor(&BigInt::from(p)).to_i64().expect("reduced residue");
            Ok(Scalar::from_integer(field, m))
        }
        (Literal::Int(n), FieldKind::Rationals) => {
            Ok(Scalar::Rat(BigRational::from_integer(n.clone())))
        }
        (Literal::Rat(r), FieldKind::Rationals) => Ok(Scalar::Rat(r.clone())),
        (Literal::Rat(_), FieldKind::Prime(p)) => {
            Err(format!("rational literal in the prime field GF({p})"))
        }
        (other, _) => Err(format!("expected a scalar, found {}", describe_literal(other))),
    }
}

fn describe_literal(lit: &Literal) -> &'static str {
    match lit {
        Literal::Int(_) => "an integer",
        Literal::Rat(_) => "a rational",
        Literal::Atom(_) => "an atom",
        Literal::Tuple(_) => "a tuple",
    }
}

/// Convert a literal into a member of the given phylum.
pub fn literal_to_value(sig: &Signature, sort: SortIndex, lit: &Literal) -> Result<Value, String> {
    match &sig.phyla[sort.0] {
        Phylum::Atoms { names } => match lit {
            Literal::Atom(a) => match names.iter().position(|n| n == a) {
                Some(ordinal) => Ok(Value::Atom { phylum: sort, ordinal }),
                None => Err(format!(
                    "no atom named `'{a}` in phylum {}",
                    sig.phylum_names[sort.0]
                )),
            },
            other => Err(format!("expected an atom, found {}", describe_literal(other))),
        },
        Phylum::Field(field) => literal_to_scalar(lit, *field).map(Value::Scalar),
        Phylum::Vectors { field, dim } => match lit {
            Literal::Tuple(items) => {
                if items.len() != *dim {
                    return Err(format!("expected {dim} coordinates, found {}", items.len()));
                }
                let coords = items
                    .iter()
                    .map(|item| literal_to_scalar(item, *field))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Value::Vector(VectorElem { field: *field, coords }))
            }
            other => Err(format!("expected a coordinate tuple, found {}", describe_literal(other))),
        },
    }
}

struct Elaborator<'a> {
    ast: &'a ExperimentAst,
    diags: Vec<Diagnostic>,
}

impl Elaborator<'_> {
    fn diag(&mut self, span: SourceSpan, message: impl Into<String>) {
        self.diags.push(Diagnostic { message: message.into(), span });
    }
}

pub fn elaborate(ast: &ExperimentAst) -> Result<Elaborated, Vec<Diagnostic>> {
    let mut el = Elaborator { ast, diags: Vec::new() };

    let (phyla, phylum_names) = el.collect_phyla();
    let ops = el.collect_ops(&phyla);
    let signature = Signature { phyla, phylum_names, ops };
    // A file may carry no algebra at all (pure construction experiments).
    let has_algebra = !signature.phyla.is_empty() || !signature.ops.is_empty();
    if el.diags.is_empty() && has_algebra {
        for problem in signature.validate() {
            let span = ast.decls.first().map_or(SourceSpan::default(), |d| d.span);
            el.diag(span, problem);
        }
    }

    let sorts = el.collect_sorts(signature.phyla.len());
    let seqs = el.collect_seqs();
    let colorings = el.collect_colorings(&signature, &seqs);
    let experiments = el.collect_experiments(&signature, &sorts, &seqs, &colorings);

    if el.diags.is_empty() {
        Ok(Elaborated { signature, sorts, seqs, colorings, experiments })
    } else {
        Err(el.diags)
    }
}

impl Elaborator<'_> {
    fn collect_phyla(&mut self) -> (Vec<Phylum>, Vec<String>) {
        let mut phyla = Vec::new();
        let mut names = Vec::new();
        for decl in &self.ast.decls {
            let DeclKind::Phylum { name, carrier } = &decl.kind else { continue };
            if names.contains(name) {
                self.diag(decl.span, format!("duplicate name `{name}`"));
                continue;
            }
            let phylum = match carrier {
                Carrier::Atoms(atom_names) => {
                    let mut seen = BTreeSet::new();
                    for a in atom_names {
                        if !seen.insert(a) {
                            self.diag(decl.span, format!("duplicate atom `'{a}`"));
                        }
                    }
                    Some(Phylum::Atoms { names: atom_names.clone() })
                }
                Carrier::AtomRange { first, limit } => {
                    if first >= limit {
                        self.diag(decl.span, "empty atom range");
                        None
                    } else {
                        let names = (*first..*limit).map(|i| i.to_string()).collect();
                        Some(Phylum::Atoms { names })
                    }
                }
                Carrier::Gf(p) => {
                    if is_prime(*p) {
                        Some(Phylum::Field(FieldKind::Prime(*p)))
                    } else {
                        self.diag(decl.span, format!("{p} is not prime"));
                        None
                    }
                }
                Carrier::Rationals => Some(Phylum::Field(FieldKind::Rationals)),
                Carrier::Vspace { field, dim } => {
                    let field = match field {
                        FieldRef::Gf(p) if !is_prime(*p) => {
                            self.diag(decl.span, format!("{p} is not prime"));
                            None
                        }
                        FieldRef::Gf(p) => Some(FieldKind::Prime(*p)),
                        FieldRef::Rationals => Some(FieldKind::Rationals),
                    };
                    if *dim == 0 {
                        self.diag(decl.span, "zero-dimensional vector phylum");
                    }
                    field.map(|f| Phylum::Vectors { field: f, dim: *dim })
                }
                Carrier::Ksig { p, dim } => {
                    if !is_prime(*p) {
                        self.diag(decl.span, format!("{p} is not prime"));
                        None
                    } else if *dim == 0 {
                        self.diag(decl.span, "zero-dimensional vector phylum");
                        None
                    } else {
                        Some(Phylum::Vectors { field: FieldKind::Prime(*p), dim: *dim })
                    }
                }
            };
            if let Some(phylum) = phylum {
                phyla.push(phylum);
                names.push(name.clone());
            }
        }
        (phyla, names)
    }

    fn collect_ops(&mut self, phyla: &[Phylum]) -> Vec<OperationDef> {
        let mut ops: Vec<OperationDef> = Vec::new();
        for decl in &self.ast.decls {
            let DeclKind::Op(op) = &decl.kind else { continue };
            if ops.iter().any(|o| o.name == op.name) {
                self.diag(decl.span, format!("duplicate name `{}`", op.name));
                continue;
            }
            let mut in_range = true;
            for &s in op.arg_sorts.iter().chain([&op.out_sort]) {
                if s >= phyla.len() {
                    self.diag(decl.span, format!("sort index {s} out of range"));
                    in_range = false;
                }
            }
            if !in_range {
                continue;
            }
            let arg_sorts: Vec<SortIndex> = op.arg_sorts.iter().map(|&s| SortIndex(s)).collect();
            let out_sort = SortIndex(op.out_sort);
            let eval = match &op.body {
                OpBody::Builtin(which) => {
                    match resolve_builtin(*which, &arg_sorts, out_sort, phyla) {
                        Ok(eval) => eval,
                        Err(msg) => {
                            self.diag(decl.span, msg);
                            continue;
                        }
                    }
                }
                OpBody::Table { rows } => {
                    match self.build_table(decl.span, rows, &arg_sorts, out_sort, phyla) {
                        Some(eval) => eval,
                        None => continue,
                    }
                }
            };
            ops.push(OperationDef { name: op.name.clone(), arg_sorts, out_sort, eval });
        }
        ops
    }

    fn build_table(
        &mut self,
        span: SourceSpan,
        rows: &[(Vec<Literal>, Literal)],
        arg_sorts: &[SortIndex],
        out_sort: SortIndex,
        phyla: &[Phylum],
    ) -> Option<Evaluator> {
        // Conversion needs a full signature value; ops are not involved.
        let sig = Signature {
            phyla: phyla.to_vec(),
            phylum_names: (0..phyla.len()).map(|i| i.to_string()).collect(),
            ops: Vec::new(),
        };
        let mut table = BTreeMap::new();
        for (args, out) in rows {
            if args.len() != arg_sorts.len() {
                self.diag(span, format!("row has {} arguments, expected {}", args.len(), arg_sorts.len()));
                return None;
            }
            let mut key = Vec::with_capacity(args.len());
            for (lit, &sort) in args.iter().zip(arg_sorts) {
                match literal_to_value(&sig, sort, lit) {
                    Ok(v) => key.push(v),
                    Err(msg) => {
                        self.diag(span, msg);
                        return None;
                    }
                }
            }
            let out = match literal_to_value(&sig, out_sort, out) {
                Ok(v) => v,
                Err(msg) => {
                    self.diag(span, msg);
                    return None;
                }
            };
            if table.insert(key, out).is_some() {
                self.diag(span, "duplicate table row");
                return None;
            }
        }
        let mut domain = 1usize;
        for &sort in arg_sorts {
            match sig.phylum_values(sort) {
                Some(values) => domain *= values.len(),
                None => {
                    self.diag(span, "table over an infinite phylum");
                    return None;
                }
            }
        }
        if table.len() != domain {
            self.diag(span, format!("table covers {} of {domain} argument tuples", table.len()));
            return None;
        }
        Some(Evaluator::Table(table))
    }

    fn collect_sorts(&mut self, phylum_count: usize) -> BTreeMap<String, SortWord> {
        let mut sorts = BTreeMap::new();
        for decl in &self.ast.decls {
            let DeclKind::Sort { name, decl: sd } = &decl.kind else { continue };
            if sorts.contains_key(name) {
                self.diag(decl.span, format!("duplicate name `{name}`"));
                continue;
            }
            let mut in_range = true;
            for &s in sd.prefix.iter().chain(&sd.period) {
                if s >= phylum_count {
                    self.diag(decl.span, format!("sort index {s} out of range"));
                    in_range = false;
                }
            }
            if !in_range {
                continue;
            }
            let prefix: Vec<SortIndex> = sd.prefix.iter().map(|&s| SortIndex(s)).collect();
            let period: Vec<SortIndex> = sd.period.iter().map(|&s| SortIndex(s)).collect();
            match SortWord::new(prefix, period) {
                Ok(word) => {
                    sorts.insert(name.clone(), word);
                }
                Err(e) => self.diag(decl.span, e.to_string()),
            }
        }
        sorts
    }

    fn collect_seqs(&mut self) -> BTreeMap<String, Vec<(Literal, SourceSpan)>> {
        let mut seqs = BTreeMap::new();
        for decl in &self.ast.decls {
            let DeclKind::Seq { name, values } = &decl.kind else { continue };
            if seqs.insert(name.clone(), values.clone()).is_some() {
                self.diag(decl.span, format!("duplicate name `{name}`"));
            }
        }
        seqs
    }

    fn unique_phylum(
        &mut self,
        sig: &Signature,
        span: SourceSpan,
        what: &str,
        pred: impl Fn(&Phylum) -> bool,
    ) -> Option<SortIndex> {
        let hits: Vec<usize> =
            (0..sig.phyla.len()).filter(|&i| pred(&sig.phyla[i])).collect();
        match hits.as_slice() {
            [only] => Some(SortIndex(*only)),
            [] => {
                self.diag(span, format!("no {what} phylum declared"));
                None
            }
            _ => {
                self.diag(span, format!("more than one {what} phylum declared"));
                None
            }
        }
    }

    fn collect_colorings(
        &mut self,
        sig: &Signature,
        seqs: &BTreeMap<String, Vec<(Literal, SourceSpan)>>,
    ) -> BTreeMap<String, ColoringDef> {
        let mut colorings = BTreeMap::new();
        for decl in &self.ast.decls {
            let DeclKind::Coloring { name, body } = &decl.kind else { continue };
            if colorings.contains_key(name) {
                self.diag(decl.span, format!("duplicate name `{name}`"));
                continue;
            }
            let Some(def) = self.build_coloring(sig, seqs, decl.span, name, body) else {
                continue;
            };
            colorings.insert(name.clone(), def);
        }
        colorings
    }

    fn build_coloring(
        &mut self,
        sig: &Signature,
        seqs: &BTreeMap<String, Vec<(Literal, SourceSpan)>>,
        span: SourceSpan,
        name: &str,
        body: &ColoringBody,
    ) -> Option<ColoringDef> {
        match body {
            ColoringBody::Table { entries, default } => {
                if entries.is_empty() {
                    self.diag(span, "empty coloring table");
                    return None;
                }
                // The phylum is whichever one admits every table value.
                let candidates: Vec<SortIndex> = (0..sig.phyla.len())
                    .map(SortIndex)
                    .filter(|&s| {
                        entries.iter().all(|(lit, _)| literal_to_value(sig, s, lit).is_ok())
                    })
                    .collect();
                let phylum = match candidates.as_slice() {
                    [only] => *only,
                    [] => {
                        self.diag(span, "no phylum contains every table value");
                        return None;
                    }
                    _ => {
                        self.diag(span, "table values fit more than one phylum");
                        return None;
                    }
                };
                let mut table = BTreeMap::new();
                for (lit, color) in entries {
                    let value = literal_to_value(sig, phylum, lit).expect("candidate phylum");
                    if table.insert(value, *color).is_some() {
                        self.diag(span, "duplicate coloring entry");
                        return None;
                    }
                }
                let max_color =
                    entries.iter().map(|(_, c)| *c).chain(*default).max().expect("nonempty");
                let coloring =
                    Coloring::from_table(name.to_string(), max_color + 1, table, *default);
                Some(ColoringDef { phylum, coloring })
            }
            ColoringBody::InY { seq, bound } => {
                let phylum = self.unique_phylum(sig, span, "rational scalar", |p| {
                    matches!(p, Phylum::Field(FieldKind::Rationals))
                })?;
                let Some(lits) = seqs.get(seq) else {
                    self.diag(span, format!("unknown sequence `{seq}`"));
                    return None;
                };
                let mut values = Vec::with_capacity(lits.len());
                for (lit, lit_span) in lits {
                    match literal_to_rational(lit) {
                        Some(r) => values.push(r),
                        None => {
                            self.diag(*lit_span, "sum-set membership needs rational values");
                            return None;
                        }
                    }
                }
                let beta = match BetaSequence::new(values, *bound) {
                    Ok(beta) => beta,
                    Err(e) => {
                        self.diag(span, e.to_string());
                        return None;
                    }
                };
                let y = YMembership::new(&beta, beta.len());
                let coloring = Coloring::new(format!("in_Y({seq}, {bound})"), 2, move |v| {
                    match v {
                        Value::Scalar(Scalar::Rat(r)) => usize::from(!y.check(r).member),
                        _ => 1,
                    }
                });
                Some(ColoringDef { phylum, coloring })
            }
            ColoringBody::LeadingCoeffOne => {
                let phylum = self.unique_phylum(sig, span, "vector", |p| {
                    matches!(p, Phylum::Vectors { .. })
                })?;
                let coloring = Coloring::new("leading_coeff_one", 2, |v| match v {
                    Value::Vector(ve) => ve
                        .coords
                        .iter()
                        .find(|c| !c.is_zero())
                        .map_or(1, |c| usize::from(!c.is_one())),
                    _ => 1,
                });
                Some(ColoringDef { phylum, coloring })
            }
            ColoringBody::Coord(i) => {
                let phylum = self.unique_phylum(sig, span, "vector", |p| {
                    matches!(p, Phylum::Vectors { .. })
                })?;
                let Phylum::Vectors { field, dim } = &sig.phyla[phylum.0] else { unreachable!() };
                let FieldKind::Prime(p) = field else {
                    self.diag(span, "coordinate coloring needs a finite field");
                    return None;
                };
                if *i >= *dim {
                    self.diag(span, format!("coordinate {i} out of range for dimension {dim}"));
                    return None;
                }
                let i = *i;
                let coloring = Coloring::new(format!("coord({i})"), *p as usize, move |v| {
                    match v {
                        Value::Vector(ve) => match ve.coords[i] {
                            Scalar::Mod { value, .. } => value as usize,
                            Scalar::Rat(_) => 0,
                        },
                        _ => 0,
                    }
                });
                Some(ColoringDef { phylum, coloring })
            }
        }
    }

    fn collect_experiments(
        &mut self,
        sig: &Signature,
        sorts: &BTreeMap<String, SortWord>,
        seqs: &BTreeMap<String, Vec<(Literal, SourceSpan)>>,
        colorings: &BTreeMap<String, ColoringDef>,
    ) -> BTreeMap<String, ExperimentConfig> {
        let mut experiments = BTreeMap::new();
        for decl in &self.ast.decls {
            let DeclKind::Experiment { name, entries } = &decl.kind else { continue };
            if experiments.contains_key(name) {
                self.diag(decl.span, format!("duplicate name `{name}`"));
                continue;
            }
            let mut seen = BTreeSet::new();
            for (key, _, kv_span) in entries {
                if !seen.insert(key.clone()) {
                    self.diag(*kv_span, format!("duplicate key `{key}`"));
                }
            }

            let mut config = ExperimentConfig {
                entries: entries.clone(),
                sort: None,
                prefix: None,
                coloring: None,
                bounds: None,
                span: decl.span,
            };

            if let Some((_, value, kv_span)) = entries.iter().find(|(k, _, _)| k == "sort") {
                match value {
                    KvValue::Name(n) => match sorts.get(n) {
                        Some(word) => config.sort = Some(word.clone()),
                        None => self.diag(*kv_span, format!("unknown sort `{n}`")),
                    },
                    KvValue::Lit(_) => self.diag(*kv_span, "expected a sort name"),
                }
            }

            if let Some((_, value, kv_span)) = entries.iter().find(|(k, _, _)| k == "sequence") {
                match value {
                    KvValue::Name(n) => match seqs.get(n) {
                        Some(lits) => {
                            if let Some(word) = &config.sort {
                                config.prefix =
                                    self.resolve_prefix(sig, word.clone(), lits, *kv_span);
                            } else {
                                self.diag(
                                    *kv_span,
                                    "experiment binds a sequence but declares no sort",
                                );
                            }
                        }
                        None => self.diag(*kv_span, format!("unknown sequence `{n}`")),
                    },
                    KvValue::Lit(_) => self.diag(*kv_span, "expected a sequence name"),
                }
            }

            if let Some((_, value, kv_span)) = entries.iter().find(|(k, _, _)| k == "coloring") {
                match value {
                    KvValue::Name(n) => match colorings.get(n) {
                        Some(def) => {
                            if let Some(word) = &config.sort {
                                if word.at(0) != def.phylum {
                                    self.diag(
                                        *kv_span,
                                        format!(
                                            "coloring `{n}` is over phylum {} but the sort word starts at phylum {}",
                                            def.phylum.0,
                                            word.at(0).0
                                        ),
                                    );
                                }
                            }
                            config.coloring = Some(n.clone());
                        }
                        None => self.diag(*kv_span, format!("unknown coloring `{n}`")),
                    },
                    KvValue::Lit(_) => self.diag(*kv_span, "expected a coloring name"),
                }
            }

            let size = config.usize_value("max_term_size");
            let arity = config.usize_value("max_arity");
            match (size, arity) {
                (Some(size), Some(arity)) => config.bounds = Some(TermBounds::new(size, arity)),
                (None, None) => {}
                _ => self.diag(
                    decl.span,
                    "`max_term_size` and `max_arity` must be given together",
                ),
            }

            experiments.insert(name.clone(), config);
        }
        experiments
    }

    fn resolve_prefix(
        &mut self,
        sig: &Signature,
        word: SortWord,
        lits: &[(Literal, SourceSpan)],
        ref_span: SourceSpan,
    ) -> Option<SortedPrefix> {
        let mut values = Vec::with_capacity(lits.len());
        for (i, (lit, lit_span)) in lits.iter().enumerate() {
            match literal_to_value(sig, word.at(i), lit) {
                Ok(v) => values.push(v),
                Err(msg) => {
                    self.diag(*lit_span, format!("position {i}: {msg}"));
                    return None;
                }
            }
        }
        match SortedPrefix::new(sig, values, word) {
            Ok(prefix) => Some(prefix),
            Err(e) => {
                self.diag(ref_span, e.to_string());
                None
            }
        }
    }
}

fn resolve_builtin(
    which: Option<OpBuiltin>,
    arg_sorts: &[SortIndex],
    out_sort: SortIndex,
    phyla: &[Phylum],
) -> Result<Evaluator, String> {
    let shape: Vec<&Phylum> = arg_sorts.iter().map(|s| &phyla[s.0]).collect();
    let out = &phyla[out_sort.0];
    let field_binary = matches!(
        (shape.as_slice(), out),
        ([Phylum::Field(a), Phylum::Field(b)], Phylum::Field(c)) if a == b && b == c
    );
    let vector_add = match (shape.as_slice(), out) {
        ([Phylum::Vectors { field: a, dim: da }, Phylum::Vectors { field: b, dim: db }], Phylum::Vectors { field: c, dim: dc }) => {
            a == b && b == c && da == db && db == dc
        }
        _ => false,
    };
    let scalar_mul = match (shape.as_slice(), out) {
        ([Phylum::Field(a), Phylum::Vectors { field: b, dim: db }], Phylum::Vectors { field: c, dim: dc }) => {
            a == b && b == c && db == dc
        }
        _ => false,
    };
    let unary_vector = matches!(
        (shape.as_slice(), out),
        ([Phylum::Vectors { field: a, dim: da }], Phylum::Vectors { field: b, dim: db }) if a == b && da == db
    );

    match which {
        None => {
            if vector_add {
                Ok(Evaluator::VectorAdd)
            } else if scalar_mul {
                Ok(Evaluator::ScalarMul)
            } else if field_binary {
                Err("ambiguous builtin for a field operation; write `builtin add` or `builtin mul`".to_string())
            } else if unary_vector {
                Err("write `builtin scale_by(r)` to pick the scaling factor".to_string())
            } else {
                Err("no builtin operation has this shape".to_string())
            }
        }
        Some(OpBuiltin::Add) => {
            if field_binary {
                Ok(Evaluator::FieldAdd)
            } else if vector_add {
                Ok(Evaluator::VectorAdd)
            } else {
                Err("`builtin add` needs two arguments and a result in one field or one vector phylum".to_string())
            }
        }
        Some(OpBuiltin::Mul) => {
            if field_binary {
                Ok(Evaluator::FieldMul)
            } else {
                Err("`builtin mul` needs two arguments and a result in one field phylum".to_string())
            }
        }
        Some(OpBuiltin::Scale) => {
            if scalar_mul {
                Ok(Evaluator::ScalarMul)
            } else {
                Err("`builtin scale` needs a scalar and a vector over the same field".to_string())
            }
        }
        Some(OpBuiltin::ScaleBy(r)) => {
            if unary_vector {
                let Phylum::Vectors { field, .. } = out else { unreachable!() };
                let scalar = match field {
                    FieldKind::Prime(p) => Scalar::Mod { p: *p, value: r % p },
                    FieldKind::Rationals => Scalar::from_integer(FieldKind::Rationals, r as i64),
                };
                Ok(Evaluator::ScaleBy(scalar))
            } else {
                Err("`builtin scale_by` needs one vector argument and a vector result".to_string())
            }
        }
    }
}
