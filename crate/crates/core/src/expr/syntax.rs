//! Concrete text syntax.
//!
//! ```text
//! expr   := concat
//! concat := atom ( "." atom )*          right-associative
//! atom   := "eps" | WORD | "x" "(" expr ")"
//!         | "\/" "(" expr ("," expr)+ ")" | "||" "(" expr ("," expr)+ ")"
//!         | "(" expr ")"
//! ```
//!
//! The bare `"(" expr ")"` grouping form exists so that a left-nested
//! concatenation can be written down; the renderer only emits it there.

use super::{ExprError, IdlExpr, Symbol, PUNCTUATION};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Eps,
    Lock,
    Or,
    Interleave,
    Dot,
    LParen,
    RParen,
    Comma,
    Word(String),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Eps => "`eps`".into(),
            Tok::Lock => "`x`".into(),
            Tok::Or => "`\\/`".into(),
            Tok::Interleave => "`||`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Word(w) => format!("word `{w}`"),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Pos {
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Vec<(Tok, Pos)> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut column = 1;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, column };
        if c == '\n' {
            chars.next();
            line += 1;
            column = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            column += 1;
            continue;
        }
        if let Some(tok) = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            _ => None,
        } {
            chars.next();
            column += 1;
            out.push((tok, pos));
            continue;
        }
        let mut word = String::new();
        while let Some(&c) = chars.peek() {
            if c.is_whitespace() || PUNCTUATION.contains(&c) {
                break;
            }
            word.push(c);
            chars.next();
            column += 1;
        }
        let tok = match word.as_str() {
            "eps" => Tok::Eps,
            "x" => Tok::Lock,
            "\\/" => Tok::Or,
            "||" => Tok::Interleave,
            _ => Tok::Word(word),
        };
        out.push((tok, pos));
    }
    out.push((Tok::End, Pos { line, column }));
    out
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ExprError {
        let Pos { line, column } = self.pos();
        ExprError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), ExprError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn expr(&mut self) -> Result<IdlExpr, ExprError> {
        let head = self.atom()?;
        if *self.peek() == Tok::Dot {
            self.bump();
            let tail = self.expr()?;
            Ok(IdlExpr::concat(head, tail))
        } else {
            Ok(head)
        }
    }

    fn atom(&mut self) -> Result<IdlExpr, ExprError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Eps => Ok(IdlExpr::Epsilon),
            Tok::Word(w) => Symbol::new(&w)
                .map(IdlExpr::Terminal)
                .map_err(|_| ExprError::Syntax {
                    line: pos.line,
                    column: pos.column,
                    message: format!("`{w}` is not a valid word"),
                }),
            Tok::Lock => {
                self.expect(Tok::LParen)?;
                let child = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(IdlExpr::lock(child))
            }
            Tok::Or | Tok::Interleave => {
                let operator = if tok == Tok::Or { "\\/" } else { "||" };
                self.expect(Tok::LParen)?;
                let mut children = vec![self.expr()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    children.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                if children.len() < 2 {
                    return Err(ExprError::Arity {
                        operator,
                        found: children.len(),
                        line: pos.line,
                        column: pos.column,
                    });
                }
                Ok(if tok == Tok::Or {
                    IdlExpr::Or(children)
                } else {
                    IdlExpr::Interleave(children)
                })
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(ExprError::Syntax {
                line: pos.line,
                column: pos.column,
                message: format!("expected an expression, found {}", other.describe()),
            }),
        }
    }
}

/// Parses expression text into its syntax tree.
pub fn parse_expr_text(text: &str) -> Result<IdlExpr, ExprError> {
    let mut parser = Parser {
        toks: tokenize(text),
        at: 0,
    };
    let e = parser.expr()?;
    if *parser.peek() != Tok::End {
        return Err(parser.error(format!(
            "unexpected {} after expression",
            parser.peek().describe()
        )));
    }
    Ok(e)
}

/// Canonical text form. `parse_expr_text(&render_expr_text(e)) == e`.
pub fn render_expr_text(e: &IdlExpr) -> String {
    let mut out = String::new();
    render_into(e, &mut out);
    out
}

fn render_into(e: &IdlExpr, out: &mut String) {
    match e {
        IdlExpr::Terminal(s) => out.push_str(s.as_str()),
        IdlExpr::Epsilon => out.push_str("eps"),
        IdlExpr::Lock(child) => {
            out.push_str("x(");
            render_into(child, out);
            out.push(')');
        }
        IdlExpr::Or(children) | IdlExpr::Interleave(children) => {
            out.push_str(if matches!(e, IdlExpr::Or(_)) {
                "\\/("
            } else {
                "||("
            });
            for (i, child) in children.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                render_into(child, out);
            }
            out.push(')');
        }
        IdlExpr::Concat(left, right) => {
            if matches!(**left, IdlExpr::Concat(..)) {
                out.push('(');
                render_into(left, out);
                out.push(')');
            } else {
                render_into(left, out);
            }
            out.push_str(" . ");
            render_into(right, out);
        }
    }
}
