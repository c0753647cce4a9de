//! Tokenizer with exact source spans. `#` starts a comment running to the
//! end of the line.

use num::BigInt;

use crate::ast::{Diagnostic, Location, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Name(String),
    Int(BigInt),
    Atom(String),
    Eq,
    Colon,
    Arrow,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Slash,
    DotDot,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Name(n) => format!("`{n}`"),
            TokenKind::Int(n) => format!("`{n}`"),
            TokenKind::Atom(a) => format!("`'{a}`"),
            TokenKind::Eq => "`=`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::LBracket => "`[`".into(),
            TokenKind::RBracket => "`]`".into(),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Slash => "`/`".into(),
            TokenKind::DotDot => "`..`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

struct Lexer<'a> {
    text: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    column: usize,
    byte: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Lexer<'a> {
        Lexer { text, chars: text.char_indices().peekable(), line: 1, column: 1, byte: 0 }
    }

    fn here(&self) -> Location {
        Location { line: self.line, column: self.column, byte: self.byte }
    }

    fn bump(&mut self) -> Option<char> {
        let (i, c) = self.chars.next()?;
        self.byte = i + c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn take_while(&mut self, start: usize, pred: impl Fn(char) -> bool) -> &'a str {
        while self.peek().is_some_and(&pred) {
            self.bump();
        }
        &self.text[start..self.byte]
    }
}

fn is_name_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn lex(text: &str) -> Result<Vec<Token>, Vec<Diagnostic>> {
    let mut lx = Lexer::new(text);
    let mut tokens = Vec::new();
    loop {
        while lx.peek().is_some_and(|c| c.is_whitespace()) {
            lx.bump();
        }
        if lx.peek() == Some('#') {
            while lx.peek().is_some_and(|c| c != '\n') {
                lx.bump();
            }
            continue;
        }
        let start = lx.here();
        let Some(c) = lx.peek() else { break };
        let kind = match c {
            '=' => {
                lx.bump();
                TokenKind::Eq
            }
            ':' => {
                lx.bump();
                TokenKind::Colon
            }
            '(' => {
                lx.bump();
                TokenKind::LParen
            }
            ')' => {
                lx.bump();
                TokenKind::RParen
            }
            '[' => {
                lx.bump();
                TokenKind::LBracket
            }
            ']' => {
                lx.bump();
                TokenKind::RBracket
            }
            '{' => {
                lx.bump();
                TokenKind::LBrace
            }
            '}' => {
                lx.bump();
                TokenKind::RBrace
            }
            ',' => {
                lx.bump();
                TokenKind::Comma
            }
            '/' => {
                lx.bump();
                TokenKind::Slash
            }
            '.' => {
                lx.bump();
                if lx.peek() == Some('.') {
                    lx.bump();
                    TokenKind::DotDot
                } else {
                    return Err(vec![Diagnostic {
                        message: "expected `..`".to_string(),
                        span: SourceSpan { start, end: lx.here() },
                    }]);
                }
            }
            '-' => {
                lx.bump();
                match lx.peek() {
                    Some('>') => {
                        lx.bump();
                        TokenKind::Arrow
                    }
                    Some(d) if d.is_ascii_digit() => {
                        let digits = lx.take_while(start.byte, |c| c.is_ascii_digit());
                        TokenKind::Int(digits.parse().expect("lexed integer"))
                    }
                    _ => {
                        return Err(vec![Diagnostic {
                            message: "expected `->` or a negative integer".to_string(),
                            span: SourceSpan { start, end: lx.here() },
                        }])
                    }
                }
            }
            '\'' => {
                lx.bump();
                let name_start = lx.byte;
                let name = lx.take_while(name_start, is_name_char);
                if name.is_empty() {
                    return Err(vec![Diagnostic {
                        message: "atom name expected after `'`".to_string(),
                        span: SourceSpan { start, end: lx.here() },
                    }]);
                }
                TokenKind::Atom(name.to_string())
            }
            d if d.is_ascii_digit() => {
                let digits = lx.take_while(start.byte, |c| c.is_ascii_digit());
                TokenKind::Int(digits.parse().expect("lexed integer"))
            }
            s if is_name_start(s) => {
                let name = lx.take_while(start.byte, is_name_char);
                TokenKind::Name(name.to_string())
            }
            other => {
                lx.bump();
                return Err(vec![Diagnostic {
                    message: format!("unexpected character `{other}`"),
                    span: SourceSpan { start, end: lx.here() },
                }]);
            }
        };
        tokens.push(Token { kind, span: SourceSpan { start, end: lx.here() } });
    }
    let eof = lx.here();
    tokens.push(Token { kind: TokenKind::Eof, span: SourceSpan { start: eof, end: eof } });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokenKind> {
        lex(text).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn punctuation_and_literals() {
        assert_eq!(
            kinds("a : -> = -3 2/5 'x0 ( ) .."),
            vec![
                TokenKind::Name("a".into()),
                TokenKind::Colon,
                TokenKind::Arrow,
                TokenKind::Eq,
                TokenKind::Int(BigInt::from(-3)),
                TokenKind::Int(BigInt::from(2)),
                TokenKind::Slash,
                TokenKind::Int(BigInt::from(5)),
                TokenKind::Atom("x0".into()),
                TokenKind::LParen,
                TokenKind::RParen,
                TokenKind::DotDot,
                TokenKind::Eof,
            ]
        );
    }

    #[test]
    fn comments_and_spans() {
        let text = "ab # rest\n  cd";
        let toks = lex(text).unwrap();
        assert_eq!(toks.len(), 3);
        assert_eq!(toks[1].kind, TokenKind::Name("cd".into()));
        assert_eq!(toks[1].span.start.line, 2);
        assert_eq!(toks[1].span.start.column, 3);
        assert_eq!(&text[toks[1].span.start.byte..toks[1].span.end.byte], "cd");
    }

    #[test]
    fn errors_carry_spans() {
        let diags = lex("ok $").unwrap_err();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].span.valid_for(4));
        assert_eq!(diags[0].span.start.byte, 3);
    }
}
