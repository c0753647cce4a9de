//! Recursive-descent parser. On a malformed declaration it records a
//! diagnostic and resynchronizes at the next declaration keyword, so one
//! pass reports every broken declaration rather than only the first.

use num::{BigRational, ToPrimitive};

use crate::ast::*;
use crate::lexer::{lex, Token, TokenKind};

const DECL_KEYWORDS: [&str; 6] = ["phylum", "op", "sort", "seq", "coloring", "experiment"];

pub fn parse(text: &str) -> Result<ExperimentAst, Vec<Diagnostic>> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0, diags: Vec::new() };
    let mut decls = Vec::new();
    while !p.at_eof() {
        let before = p.pos;
        match p.parse_decl() {
            Some(decl) => decls.push(decl),
            None => p.synchronize(before),
        }
    }
    if p.diags.is_empty() {
        Ok(ExperimentAst { decls })
    } else {
        Err(p.diags)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> &TokenKind {
        &self.tokens[self.pos].kind
    }

    fn peek_span(&self) -> SourceSpan {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> SourceSpan {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> TokenKind {
        let kind = self.tokens[self.pos].kind.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        kind
    }

    fn at_eof(&self) -> bool {
        *self.peek() == TokenKind::Eof
    }

    fn fail<T>(&mut self, message: impl Into<String>) -> Option<T> {
        self.diags.push(Diagnostic { message: message.into(), span: self.peek_span() });
        None
    }

    /// Skip to the next declaration keyword outside any bracketing.
    fn synchronize(&mut self, before: usize) {
        if self.pos == before && !self.at_eof() {
            self.bump();
        }
        let mut depth = 0usize;
        while !self.at_eof() {
            match self.peek() {
                TokenKind::LBrace | TokenKind::LBracket | TokenKind::LParen => depth += 1,
                TokenKind::RBrace | TokenKind::RBracket | TokenKind::RParen => {
                    depth = depth.saturating_sub(1)
                }
                TokenKind::Name(n) if depth == 0 && DECL_KEYWORDS.contains(&n.as_str()) => {
                    return
                }
                _ => {}
            }
            self.bump();
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Option<()> {
        if *self.peek() == kind {
            self.bump();
            Some(())
        } else {
            let found = self.peek().describe();
            self.fail(format!("expected {}, found {found}", kind.describe()))
        }
    }

    fn expect_name(&mut self, what: &str) -> Option<String> {
        if let TokenKind::Name(n) = self.peek() {
            let n = n.clone();
            self.bump();
            Some(n)
        } else {
            let found = self.peek().describe();
            self.fail(format!("expected {what}, found {found}"))
        }
    }

    fn expect_usize(&mut self, what: &str) -> Option<usize> {
        if let TokenKind::Int(n) = self.peek() {
            match n.to_usize() {
                Some(v) => {
                    self.bump();
                    Some(v)
                }
                None => self.fail(format!("{what} out of range")),
            }
        } else {
            let found = self.peek().describe();
            self.fail(format!("expected {what}, found {found}"))
        }
    }

    fn expect_u64(&mut self, what: &str) -> Option<u64> {
        if let TokenKind::Int(n) = self.peek() {
            match n.to_u64() {
                Some(v) => {
                    self.bump();
                    Some(v)
                }
                None => self.fail(format!("{what} out of range")),
            }
        } else {
            let found = self.peek().describe();
            self.fail(format!("expected {what}, found {found}"))
        }
    }

    fn parse_decl(&mut self) -> Option<Decl> {
        let start = self.peek_span();
        let keyword = self.expect_name("a declaration keyword")?;
        let kind = match keyword.as_str() {
            "phylum" => {
                let name = self.expect_name("a phylum name")?;
                self.expect(TokenKind::Eq)?;
                let carrier = self.parse_carrier()?;
                DeclKind::Phylum { name, carrier }
            }
            "op" => DeclKind::Op(self.parse_op()?),
            "sort" => {
                let name = self.expect_name("a sort name")?;
                self.expect(TokenKind::Eq)?;
                let kw = self.expect_name("`prefix`")?;
                if kw != "prefix" {
                    return self.fail("expected `prefix`");
                }
                let prefix = self.parse_index_list()?;
                let kw = self.expect_name("`period`")?;
                if kw != "period" {
                    return self.fail("expected `period`");
                }
                let period = self.parse_index_list()?;
                DeclKind::Sort { name, decl: SortDecl { prefix, period } }
            }
            "seq" => {
                let name = self.expect_name("a sequence name")?;
                self.expect(TokenKind::Eq)?;
                self.expect(TokenKind::LBracket)?;
                let mut values = Vec::new();
                while *self.peek() != TokenKind::RBracket {
                    values.push(self.parse_literal()?);
                }
                self.bump();
                DeclKind::Seq { name, values }
            }
            "coloring" => {
                let name = self.expect_name("a coloring name")?;
                self.expect(TokenKind::Eq)?;
                DeclKind::Coloring { name, body: self.parse_coloring_body()? }
            }
            "experiment" => {
                let name = self.expect_name("an experiment name")?;
                self.expect(TokenKind::LBrace)?;
                let mut entries = Vec::new();
                while *self.peek() != TokenKind::RBrace {
                    let kv_start = self.peek_span();
                    let key = self.expect_name("a key")?;
                    self.expect(TokenKind::Eq)?;
                    let value = match self.peek() {
                        TokenKind::Name(n) => {
                            let n = n.clone();
                            self.bump();
                            KvValue::Name(n)
                        }
                        _ => KvValue::Lit(self.parse_literal()?.0),
                    };
                    entries.push((key, value, kv_start.join(self.prev_span())));
                }
                self.bump();
                DeclKind::Experiment { name, entries }
            }
            other => return self.fail(format!("unknown declaration keyword `{other}`")),
        };
        Some(Decl { kind, span: start.join(self.prev_span()) })
    }

    fn parse_carrier(&mut self) -> Option<Carrier> {
        let head = self.expect_name("a carrier")?;
        match head.as_str() {
            "rationals" => Some(Carrier::Rationals),
            "gf" => {
                self.expect(TokenKind::LParen)?;
                let p = self.expect_u64("a field order")?;
                self.expect(TokenKind::RParen)?;
                Some(Carrier::Gf(p))
            }
            "atoms" => {
                self.expect(TokenKind::LParen)?;
                let first = if let TokenKind::Atom(a) = self.peek() {
                    a.clone()
                } else {
                    return self.fail("expected an atom");
                };
                self.bump();
                if *self.peek() == TokenKind::DotDot {
                    self.bump();
                    let Ok(start) = first.parse::<u64>() else {
                        return self.fail("range start must be a numbered atom like `'0`");
                    };
                    let limit = self.expect_u64("a range end")?;
                    self.expect(TokenKind::RParen)?;
                    return Some(Carrier::AtomRange { first: start, limit });
                }
                let mut names = vec![first];
                while let TokenKind::Atom(a) = self.peek() {
                    names.push(a.clone());
                    self.bump();
                }
                self.expect(TokenKind::RParen)?;
                Some(Carrier::Atoms(names))
            }
            "vspace" => {
                self.expect(TokenKind::LParen)?;
                let field = self.parse_field_ref()?;
                self.expect(TokenKind::Comma)?;
                let dim = self.expect_usize("a dimension")?;
                self.expect(TokenKind::RParen)?;
                Some(Carrier::Vspace { field, dim })
            }
            "ksig" => {
                self.expect(TokenKind::LParen)?;
                let p = self.expect_u64("a field order")?;
                self.expect(TokenKind::Comma)?;
                let dim = self.expect_usize("a dimension")?;
                self.expect(TokenKind::RParen)?;
                Some(Carrier::Ksig { p, dim })
            }
            other => self.fail(format!("unknown carrier `{other}`")),
        }
    }

    fn parse_field_ref(&mut self) -> Option<FieldRef> {
        let head = self.expect_name("a field")?;
        match head.as_str() {
            "rationals" => Some(FieldRef::Rationals),
            "gf" => {
                self.expect(TokenKind::LParen)?;
                let p = self.expect_u64("a field order")?;
                self.expect(TokenKind::RParen)?;
                Some(FieldRef::Gf(p))
            }
            other => self.fail(format!("unknown field `{other}`")),
        }
    }

    fn parse_op(&mut self) -> Option<OpDecl> {
        let name = self.expect_name("an operation name")?;
        self.expect(TokenKind::Colon)?;
        let mut arg_sorts = Vec::new();
        while *self.peek() != TokenKind::Arrow {
            arg_sorts.push(self.expect_usize("a sort index")?);
        }
        self.bump();
        let out_sort = self.expect_usize("a sort index")?;
        self.expect(TokenKind::Eq)?;
        let body = match self.expect_name("`builtin` or `table`")?.as_str() {
            "builtin" => OpBody::Builtin(self.parse_builtin_ref()?),
            "table" => {
                self.expect(TokenKind::LBrace)?;
                let mut rows = Vec::new();
                loop {
                    self.expect(TokenKind::LParen)?;
                    let mut args = Vec::new();
                    while *self.peek() != TokenKind::RParen {
                        args.push(self.parse_literal()?.0);
                    }
                    self.bump();
                    self.expect(TokenKind::Arrow)?;
                    let out = self.parse_literal()?.0;
                    rows.push((args, out));
                    if *self.peek() == TokenKind::Comma {
                        self.bump();
                        if *self.peek() == TokenKind::RBrace {
                            break;
                        }
                    } else {
                        break;
                    }
                }
                self.expect(TokenKind::RBrace)?;
                OpBody::Table { rows }
            }
            other => return self.fail(format!("unknown operation body `{other}`")),
        };
        Some(OpDecl { name, arg_sorts, out_sort, body })
    }

    fn parse_builtin_ref(&mut self) -> Option<Option<OpBuiltin>> {
        let TokenKind::Name(n) = self.peek() else { return Some(None) };
        let b = match n.as_str() {
            "add" => OpBuiltin::Add,
            "mul" => OpBuiltin::Mul,
            "scale" => OpBuiltin::Scale,
            "scale_by" => {
                self.bump();
                self.expect(TokenKind::LParen)?;
                let r = self.expect_u64("a scalar")?;
                self.expect(TokenKind::RParen)?;
                return Some(Some(OpBuiltin::ScaleBy(r)));
            }
            _ => return Some(None),
        };
        self.bump();
        Some(Some(b))
    }

    fn parse_coloring_body(&mut self) -> Option<ColoringBody> {
        let head = self.expect_name("a coloring")?;
        match head.as_str() {
            "leading_coeff_one" => Some(ColoringBody::LeadingCoeffOne),
            "coord" => {
                self.expect(TokenKind::LParen)?;
                let i = self.expect_usize("a coordinate index")?;
                self.expect(TokenKind::RParen)?;
                Some(ColoringBody::Coord(i))
            }
            "in_Y" => {
                self.expect(TokenKind::LParen)?;
                let seq = self.expect_name("a sequence name")?;
                self.expect(TokenKind::Comma)?;
                let bound = self.expect_usize("a term bound")?;
                self.expect(TokenKind::RParen)?;
                Some(ColoringBody::InY { seq, bound })
            }
            "table" => {
                self.expect(TokenKind::LBrace)?;
                let mut entries = Vec::new();
                let mut default = None;
                loop {
                    if *self.peek() == TokenKind::Name("default".to_string()) {
                        self.bump();
                        self.expect(TokenKind::Arrow)?;
                        let color = self.expect_usize("a color")?;
                        if default.replace(color).is_some() {
                            return self.fail("duplicate `default` entry");
                        }
                    } else {
                        let value = self.parse_literal()?.0;
                        self.expect(TokenKind::Arrow)?;
                        let color = self.expect_usize("a color")?;
                        entries.push((value, color));
                    }
                    if *self.peek() == TokenKind::Comma {
                        self.bump();
                        if *self.peek() == TokenKind::RBrace {
                            break;
                        }
                    } else {
                        break;
                    }
                }
                self.expect(TokenKind::RBrace)?;
                Some(ColoringBody::Table { entries, default })
            }
            other => self.fail(format!("unknown coloring `{other}`")),
        }
    }

    fn parse_index_list(&mut self) -> Option<Vec<usize>> {
        self.expect(TokenKind::LBracket)?;
        let mut items = Vec::new();
        while *self.peek() != TokenKind::RBracket {
            items.push(self.expect_usize("a sort index")?);
        }
        self.bump();
        Some(items)
    }

    fn parse_literal(&mut self) -> Option<(Literal, SourceSpan)> {
        let start = self.peek_span();
        match self.peek().clone() {
            TokenKind::Int(n) => {
                self.bump();
                if *self.peek() == TokenKind::Slash {
                    self.bump();
                    let TokenKind::Int(d) = self.peek().clone() else {
                        return self.fail("expected a denominator");
                    };
                    if d == 0.into() {
                        return self.fail("zero denominator");
                    }
                    self.bump();
                    let lit = Literal::Rat(BigRational::new(n, d));
                    Some((lit, start.join(self.prev_span())))
                } else {
                    Some((Literal::Int(n), start))
                }
            }
            TokenKind::Atom(a) => {
                self.bump();
                Some((Literal::Atom(a), start))
            }
            TokenKind::LParen => {
                self.bump();
                let mut items = Vec::new();
                while *self.peek() != TokenKind::RParen {
                    items.push(self.parse_literal()?.0);
                }
                self.bump();
                Some((Literal::Tuple(items), start.join(self.prev_span())))
            }
            other => self.fail(format!("expected a value, found {}", other.describe())),
        }
    }
}
