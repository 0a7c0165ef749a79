use thiserror::Error;

use super::{Atom, Bang, Constant, Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unbound variable `{name}`")]
    UnboundVariable { name: String },
    #[error("variable `{name}` is bound twice on one path")]
    ShadowedVariable { name: String },
    #[error("letter `{name}` is used with conflicting kinds")]
    ConflictingLetter { name: String },
    #[error("bare `{op}` at byte {pos} but no recurrence is bound to it")]
    UnboundRecurrence { op: char, pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Tilde,
    Amp,
    Pipe,
    Arrow,
    LParen,
    RParen,
    Comma,
    Dot,
    Hash,
    /// `!` or `?`, with an optional explicit selector.
    Rec { dual: bool, sel: Option<char> },
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, msg: &str| ParseError::Syntax { pos, msg: msg.to_string() };
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '~' => {
                out.push((pos, Tok::Tilde));
                i += 1;
            }
            '&' => {
                out.push((pos, Tok::Amp));
                i += 1;
            }
            '|' => {
                out.push((pos, Tok::Pipe));
                i += 1;
            }
            '(' => {
                out.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((pos, Tok::RParen));
                i += 1;
            }
            ',' => {
                out.push((pos, Tok::Comma));
                i += 1;
            }
            '.' => {
                out.push((pos, Tok::Dot));
                i += 1;
            }
            '#' => {
                out.push((pos, Tok::Hash));
                i += 1;
            }
            '-' => {
                if chars.get(i + 1).map(|p| p.1) == Some('>') {
                    out.push((pos, Tok::Arrow));
                    i += 2;
                } else {
                    return Err(err(pos, "expected `->`"));
                }
            }
            '!' | '?' => {
                let dual = c == '?';
                let next = chars.get(i + 1).map(|p| p.1);
                let after = chars.get(i + 2).map(|p| p.1);
                let selector = matches!(next, Some('p' | 'u' | 'c'))
                    && !after.is_some_and(|a| is_ident_char(a) || a == '(');
                if selector {
                    out.push((pos, Tok::Rec { dual, sel: next }));
                    i += 2;
                } else {
                    out.push((pos, Tok::Rec { dual, sel: None }));
                    i += 1;
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().map(|p| p.1).collect();
                let n = s.parse::<u64>().map_err(|_| err(pos, "numeral out of range"))?;
                out.push((pos, Tok::Num(n)));
            }
            c if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i].1) {
                    i += 1;
                }
                out.push((pos, Tok::Ident(chars[start..i].iter().map(|p| p.1).collect())));
            }
            other => return Err(err(pos, &format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    bang: Option<Bang>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.1)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.at + k).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.0).unwrap_or(self.end)
    }

    fn fail<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.into() })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implies()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.and()?];
        while self.eat(&Tok::Pipe) {
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::Or(parts) })
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.eat(&Tok::Amp) {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { Formula::And(parts) })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Tilde) => {
                self.at += 1;
                Ok(Formula::neg(self.unary()?))
            }
            Some(Tok::Rec { dual, sel }) => {
                self.at += 1;
                let bang = match sel {
                    Some('p') => Bang::Parallel,
                    Some('u') => Bang::Uncountable,
                    Some('c') => Bang::Aleph0,
                    _ => match self.bang {
                        Some(b) => b,
                        None => {
                            return Err(ParseError::UnboundRecurrence {
                                op: if dual { '?' } else { '!' },
                                pos,
                            })
                        }
                    },
                };
                let body = self.unary()?;
                Ok(if dual { bang.corec(body) } else { bang.rec(body) })
            }
            Some(Tok::Ident(q))
                if (q == "A" || q == "E")
                    && matches!(self.peek_at(1), Some(Tok::Ident(_)))
                    && self.peek_at(2) == Some(&Tok::Dot) =>
            {
                let var = match self.peek_at(1) {
                    Some(Tok::Ident(v)) => v.clone(),
                    _ => unreachable!(),
                };
                self.at += 3;
                let body = Box::new(self.unary()?);
                Ok(if q == "A" {
                    Formula::ChoiceAll(var, body)
                } else {
                    Formula::ChoiceExists(var, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().cloned() {
            Some(Tok::LParen) => {
                self.at += 1;
                let f = self.implies()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                let mut args = Vec::new();
                if self.eat(&Tok::LParen) {
                    loop {
                        match self.peek().cloned() {
                            Some(Tok::Ident(v)) => args.push(Term::Var(v)),
                            Some(Tok::Num(0)) => return self.fail("constants start at 1"),
                            Some(Tok::Num(n)) => args.push(Term::Const(Constant(n))),
                            _ => return self.fail("expected a variable or a constant"),
                        }
                        self.at += 1;
                        if self.eat(&Tok::Comma) {
                            continue;
                        }
                        self.expect(&Tok::RParen, "`,` or `)`")?;
                        break;
                    }
                }
                let mut atom = Atom::with_args(name, args);
                if self.eat(&Tok::Hash) {
                    match self.peek().cloned() {
                        Some(Tok::Num(n)) if n <= u32::MAX as u64 => {
                            self.at += 1;
                            atom.tag = Some(n as u32);
                        }
                        _ => return self.fail("expected an occurrence tag after `#`"),
                    }
                }
                Ok(Formula::Atom(atom))
            }
            Some(_) => self.fail("expected a formula"),
            None => self.fail("unexpected end of input"),
        }
    }
}

fn check_scopes(f: &Formula, bound: &mut Vec<String>) -> Result<(), ParseError> {
    match f {
        Formula::Atom(a) => {
            for t in &a.args {
                if let Term::Var(v) = t {
                    if !bound.contains(v) {
                        return Err(ParseError::UnboundVariable { name: v.clone() });
                    }
                }
            }
            Ok(())
        }
        Formula::ChoiceAll(v, body) | Formula::ChoiceExists(v, body) => {
            if bound.contains(v) {
                return Err(ParseError::ShadowedVariable { name: v.clone() });
            }
            bound.push(v.clone());
            let r = check_scopes(body, bound);
            bound.pop();
            r
        }
        other => other.children().into_iter().try_for_each(|c| check_scopes(c, bound)),
    }
}

/// Parse a formula in which every recurrence carries an explicit selector.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_inner(text, None)
}

/// Parse a formula, reading bare `!`/`?` as the recurrence `bang`.
pub fn parse_with_bang(text: &str, bang: Bang) -> Result<Formula, ParseError> {
    parse_inner(text, Some(bang))
}

fn parse_inner(text: &str, bang: Option<Bang>) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), bang };
    let f = p.implies()?;
    if p.at != p.toks.len() {
        return p.fail("trailing input");
    }
    check_scopes(&f, &mut Vec::new())?;
    f.letters().map_err(|name| ParseError::ConflictingLetter { name })?;
    Ok(f)
}
