//! Concrete syntax: parser and printer.
//!
//! ```text
//! term    := abs | app
//! abs     := ('\' | 'λ') ident+ '.' term
//! app     := atom+ abs?
//! atom    := primary ('[' ident ('/' | '//') term ']')*
//! primary := ident | '(' term ')'
//! ```

use crate::error::{Error, Result};

use super::Term;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lam,
    Dot,
    LParen,
    RParen,
    LBrack,
    RBrack,
    Slash,
    SlashSlash,
    Ident(String),
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Lam => "`\\`".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrack => "`[`".into(),
            Tok::RBrack => "`]`".into(),
            Tok::Slash => "`/`".into(),
            Tok::SlashSlash => "`//`".into(),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c == '_' || (c.is_alphabetic() && c != 'λ')
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c == '\'' || (c.is_alphanumeric() && c != 'λ')
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (l, k) = (line, col);
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: l, col: k });
        chars.next();
        if c == '\n' {
            line += 1;
            col = 1;
            continue;
        }
        col += 1;
        match c {
            c if c.is_whitespace() => {}
            '\\' | 'λ' => push(&mut out, Tok::Lam),
            '.' => push(&mut out, Tok::Dot),
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            '[' => push(&mut out, Tok::LBrack),
            ']' => push(&mut out, Tok::RBrack),
            '/' => {
                if chars.peek() == Some(&'/') {
                    chars.next();
                    col += 1;
                    push(&mut out, Tok::SlashSlash);
                } else {
                    push(&mut out, Tok::Slash);
                }
            }
            c if is_ident_start(c) => {
                let mut s = String::from(c);
                while let Some(&d) = chars.peek() {
                    if !is_ident_continue(d) {
                        break;
                    }
                    s.push(d);
                    chars.next();
                    col += 1;
                }
                push(&mut out, Tok::Ident(s));
            }
            other => {
                return Err(Error::Parse {
                    line: l,
                    col: k,
                    expected: vec!["a term".into()],
                    found: format!("character `{other}`"),
                })
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, expected: &[&str]) -> Result<T> {
        let t = self.peek();
        Err(Error::Parse {
            line: t.line,
            col: t.col,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek().tok == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(&[what])
        }
    }

    fn ident(&mut self) -> Result<String> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => self.fail(&["identifier"]),
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek().tok, Tok::Ident(_) | Tok::LParen)
    }

    fn term(&mut self) -> Result<Term> {
        if self.peek().tok == Tok::Lam {
            return self.abs();
        }
        let mut head = self.atom()?;
        loop {
            if self.starts_atom() {
                let a = self.atom()?;
                head = Term::app(head, a);
            } else if self.peek().tok == Tok::Lam {
                let a = self.abs()?;
                return Ok(Term::app(head, a));
            } else {
                return Ok(head);
            }
        }
    }

    fn abs(&mut self) -> Result<Term> {
        self.expect(Tok::Lam, "`\\`")?;
        let mut binders = vec![self.ident()?];
        while let Tok::Ident(_) = self.peek().tok {
            binders.push(self.ident()?);
        }
        self.expect(Tok::Dot, "`.`")?;
        let body = self.term()?;
        Ok(binders.into_iter().rev().fold(body, |b, x| Term::lam(x, b)))
    }

    fn atom(&mut self) -> Result<Term> {
        let mut t = self.primary()?;
        while self.peek().tok == Tok::LBrack {
            self.bump();
            let x = self.ident()?;
            let dist = match self.peek().tok {
                Tok::Slash => false,
                Tok::SlashSlash => true,
                _ => return self.fail(&["`/`", "`//`"]),
            };
            self.bump();
            let start = self.peek().clone();
            let content = self.term()?;
            self.expect(Tok::RBrack, "`]`")?;
            t = if dist {
                if !content.is_abs() {
                    return Err(Error::Parse {
                        line: start.line,
                        col: start.col,
                        expected: vec!["abstraction".into()],
                        found: start.tok.describe(),
                    });
                }
                Term::dist(t, x, content)
            } else {
                Term::sub(t, x, content)
            };
        }
        Ok(t)
    }

    fn primary(&mut self) -> Result<Term> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Term::Var(s))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            _ => self.fail(&["identifier", "`(`"]),
        }
    }
}

/// Parses a term.
pub fn parse(src: &str) -> Result<Term> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
    };
    let t = p.term()?;
    if p.peek().tok != Tok::Eof {
        return p.fail(&["end of input"]);
    }
    Ok(t)
}

/// Printer settings.
#[derive(Clone, Copy, Debug, Default)]
pub struct Printer {
    pub unicode: bool,
}

impl Printer {
    pub fn print(&self, t: &Term) -> String {
        let mut s = String::new();
        self.term(t, &mut s);
        s
    }

    fn lam(&self) -> &'static str {
        if self.unicode {
            "λ"
        } else {
            "\\"
        }
    }

    fn term(&self, t: &Term, out: &mut String) {
        match t {
            Term::Abs(x, b) => {
                out.push_str(self.lam());
                out.push_str(x);
                out.push('.');
                self.term(b, out);
            }
            Term::App(f, a) => {
                match **f {
                    Term::Abs(..) => self.paren(f, out),
                    _ => self.term(f, out),
                }
                out.push(' ');
                match **a {
                    Term::App(..) | Term::Abs(..) => self.paren(a, out),
                    _ => self.term(a, out),
                }
            }
            Term::Var(x) => out.push_str(x),
            Term::Sub(b, x, c) | Term::Dist(b, x, c) => {
                match **b {
                    Term::App(..) | Term::Abs(..) => self.paren(b, out),
                    _ => self.term(b, out),
                }
                out.push('[');
                out.push_str(x);
                out.push_str(if matches!(t, Term::Sub(..)) { "/" } else { "//" });
                self.term(c, out);
                out.push(']');
            }
        }
    }

    fn paren(&self, t: &Term, out: &mut String) {
        out.push('(');
        self.term(t, out);
        out.push(')');
    }
}

/// Prints with ASCII `\`.
pub fn print(t: &Term) -> String {
    Printer::default().print(t)
}

/// Prints with `λ`.
pub fn print_unicode(t: &Term) -> String {
    Printer { unicode: true }.print(t)
}
