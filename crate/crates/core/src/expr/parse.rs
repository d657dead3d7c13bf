//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := atom ('^' unary)?
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative, binds tighter than unary minus, and its exponent
//! must fold to a constant. There is no implicit multiplication. `-t^2` reads
//! as `-(t^2)`; parenthesize the base, as in `(-t)^2`, for the other meaning.
//! A sign is still allowed in the exponent, so `t^-2` parses.

use super::{Expr, Exponent, Func};
use thiserror::Error;

/// Parse failures, with byte positions into the source text.
#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier '{name}' at byte {position}")]
    UnknownIdentifier { position: usize, name: String },
    #[error("arity error at byte {position}: {message}")]
    Arity { position: usize, message: String },
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        position,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexer {
    tokens: Vec<(usize, Tok)>,
    end: usize,
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                tokens.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                tokens.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                tokens.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                tokens.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                tokens.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                tokens.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    if i >= bytes.len() || !bytes[i].is_ascii_digit() {
                        return Err(syntax(start, "digits required after decimal point"));
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let value: f64 = lit
                    .parse()
                    .map_err(|_| syntax(start, format!("bad number literal '{lit}'")))?;
                tokens.push((start, Tok::Number(value)));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                tokens.push((start, Tok::Ident(text[start..i].to_string())));
            }
            other => return Err(syntax(i, format!("unexpected character '{other}'"))),
        }
    }
    Ok(Lexer {
        tokens,
        end: bytes.len(),
    })
}

struct Parser<'a> {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    variables: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(p, _)| *p)
            .unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        let at = self.here();
        match self.bump() {
            Some(t) if t == tok => Ok(()),
            _ => Err(syntax(at, format!("expected {what}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.bump();
            let at = self.here();
            let exp_tree = self.unary()?;
            let value = fold_constant(&exp_tree)
                .ok_or_else(|| syntax(at, "exponent must be a constant"))?;
            let exp = if value.fract() == 0.0 && value.abs() <= i32::MAX as f64 {
                Exponent::Int(value as i32)
            } else {
                Exponent::Real(value)
            };
            return Ok(Expr::Pow(Box::new(base), exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Number(v)) => Ok(Expr::Constant(v)),
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "closing ')'")?;
                Ok(inner)
            }
            Some(Tok::Ident(name)) => {
                let called = self.peek() == Some(&Tok::LParen);
                if called {
                    let func = match Func::from_name(&name) {
                        Some(f) => f,
                        None => {
                            if self.variables.iter().any(|v| v == &name) {
                                return Err(ParseError::Arity {
                                    position: at,
                                    message: format!("variable '{name}' cannot be called"),
                                });
                            }
                            return Err(ParseError::UnknownIdentifier { position: at, name });
                        }
                    };
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen, "closing ')'")?;
                    Ok(Expr::Call(func, Box::new(arg)))
                } else {
                    if Func::from_name(&name).is_some() {
                        return Err(ParseError::Arity {
                            position: at,
                            message: format!("function '{name}' needs an argument list"),
                        });
                    }
                    match self.variables.iter().position(|v| v == &name) {
                        Some(i) => Ok(Expr::Variable(i)),
                        None => Err(ParseError::UnknownIdentifier { position: at, name }),
                    }
                }
            }
            _ => Err(syntax(at, "expected a number, identifier, or '('")),
        }
    }
}

/// Evaluates a variable-free subtree, used for exponents.
fn fold_constant(e: &Expr) -> Option<f64> {
    if e.max_variable().is_some() {
        return None;
    }
    e.eval(&[]).ok()
}

/// Parses `text` over the given variable names into an expression tree.
pub fn parse_expr(text: &str, variables: &[String]) -> Result<Expr, ParseError> {
    let lexer = lex(text)?;
    let end = lexer.end;
    let mut parser = Parser {
        tokens: lexer.tokens,
        pos: 0,
        end,
        variables,
    };
    let ast = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(syntax(parser.here(), "unexpected trailing input"));
    }
    Ok(ast)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars() -> Vec<String> {
        vec!["t".into(), "u".into()]
    }

    #[test]
    fn precedence_and_associativity() {
        let v = vars();
        let e = parse_expr("2*t^3", &v).unwrap();
        assert_eq!(e.eval(&[2.0, 0.0]).unwrap(), 16.0);
        assert_eq!(
            parse_expr("2 - 3 - 4", &v).unwrap().eval(&[0.0, 0.0]).unwrap(),
            -5.0
        );
        // Right-associative caret: 2^(3^2).
        assert_eq!(
            parse_expr("2^3^2", &v).unwrap().eval(&[0.0, 0.0]).unwrap(),
            512.0
        );
        assert_eq!(
            parse_expr("1 - -2", &v).unwrap().eval(&[0.0, 0.0]).unwrap(),
            3.0
        );
    }

    #[test]
    fn caret_binds_tighter_than_unary_minus() {
        let v = vars();
        let e = parse_expr("-t^2", &v).unwrap();
        assert_eq!(
            e,
            Expr::Neg(Box::new(Expr::Pow(
                Box::new(Expr::Variable(0)),
                Exponent::Int(2)
            )))
        );
        assert_eq!(e.eval(&[2.0, 0.0]).unwrap(), -4.0);
        assert_eq!(parse_expr("-2^2", &v).unwrap().eval(&[0.0, 0.0]).unwrap(), -4.0);
        assert_eq!(
            parse_expr("(-t)^2", &v).unwrap().eval(&[2.0, 0.0]).unwrap(),
            4.0
        );
    }

    #[test]
    fn exponents_fold_and_negative_exponents_work() {
        let v = vars();
        let e = parse_expr("t^-2", &v).unwrap();
        assert_eq!(e, Expr::Pow(Box::new(Expr::Variable(0)), Exponent::Int(-2)));
        assert_eq!(e.eval(&[2.0, 0.0]).unwrap(), 0.25);
        let e = parse_expr("t^(1/2)", &v).unwrap();
        assert_eq!(e, Expr::Pow(Box::new(Expr::Variable(0)), Exponent::Real(0.5)));
        match parse_expr("2^t", &v) {
            Err(ParseError::Syntax { message, .. }) => {
                assert!(message.contains("constant"))
            }
            other => panic!("expected constant-exponent error, got {other:?}"),
        }
    }

    #[test]
    fn number_literals() {
        let v = vars();
        assert_eq!(
            parse_expr("1.5e2 + 2E-1", &v).unwrap().eval(&[0.0, 0.0]).unwrap(),
            150.2
        );
        assert!(matches!(
            parse_expr("1.", &v),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn error_cases() {
        let v = vars();
        assert!(matches!(
            parse_expr("4**t", &v),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_expr("foo + 1", &v),
            Err(ParseError::UnknownIdentifier { ref name, .. }) if name == "foo"
        ));
        assert!(matches!(
            parse_expr("sin + 1", &v),
            Err(ParseError::Arity { .. })
        ));
        assert!(matches!(
            parse_expr("t(3)", &v),
            Err(ParseError::Arity { .. })
        ));
        assert!(matches!(
            parse_expr("bar(3)", &v),
            Err(ParseError::UnknownIdentifier { ref name, .. }) if name == "bar"
        ));
        assert!(matches!(
            parse_expr("sin()", &v),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(parse_expr("(1", &v), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_expr("", &v), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse_expr("1 2", &v),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_expr("t $ 2", &v),
            Err(ParseError::Syntax { .. })
        ));
    }

    #[test]
    fn whitespace_is_insignificant() {
        let v = vars();
        let a = parse_expr("t^4-4*t^2+2", &v).unwrap();
        let b = parse_expr("  t^4 - 4 * t^2\t+ 2 ", &v).unwrap();
        assert_eq!(a, b);
    }
}
