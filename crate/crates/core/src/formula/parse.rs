use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::{int, parse_rational, Formula, Interval, LinearConstraint, Rational, Relation, Temporal, TemporalOp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: interval [{lo},{hi}] has its lower bound above its upper bound")]
    EmptyInterval { line: usize, col: usize, lo: u64, hi: u64 },
    #[error("{line}:{col}: `{text}` is not a rational constant")]
    BadConstant { line: usize, col: usize, text: String },
}

/// Input language of a formula or requirement file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dialect {
    Stl,
    Mltl,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Plus,
    Minus,
    Star,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Neq,
    Eof,
}

struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let next = chars.get(i + 1).copied();
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '[' => (Tok::LBracket, 1),
            ']' => (Tok::RBracket, 1),
            ',' => (Tok::Comma, 1),
            '+' => (Tok::Plus, 1),
            '*' => (Tok::Star, 1),
            '~' => (Tok::Bang, 1),
            '&' => (Tok::Amp, if next == Some('&') { 2 } else { 1 }),
            '|' => (Tok::Pipe, if next == Some('|') { 2 } else { 1 }),
            '-' if next == Some('>') => (Tok::Arrow, 2),
            '-' => (Tok::Minus, 1),
            '!' if next == Some('=') => (Tok::Neq, 2),
            '!' => (Tok::Bang, 1),
            '<' if next == Some('=') => (Tok::Le, 2),
            '<' => (Tok::Lt, 1),
            '>' if next == Some('=') => (Tok::Ge, 2),
            '>' => (Tok::Gt, 1),
            '=' if next == Some('=') => (Tok::EqEq, 2),
            '=' => (Tok::EqEq, 1),
            c if c.is_ascii_digit() || c == '.' => {
                let mut j = i;
                let digit_run = |j: &mut usize| {
                    while *j < chars.len() && (chars[*j].is_ascii_digit() || chars[*j] == '.') {
                        *j += 1;
                    }
                };
                digit_run(&mut j);
                if j + 1 < chars.len() && chars[j] == '/' && chars[j + 1].is_ascii_digit() {
                    j += 1;
                    digit_run(&mut j);
                }
                let s: String = chars[i..j].iter().collect();
                (Tok::Number(s), j - i)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        tokens.push(Token {
            tok,
            line: start_line,
            col: start_col,
        });
        i += len;
        col += len;
    }
    tokens.push(Token { tok: Tok::Eof, line, col });
    Ok(tokens)
}

/// Parses an STL formula over linear constraints.
pub fn parse_stl(text: &str) -> Result<Formula, ParseError> {
    Parser::new(text, Dialect::Stl)?.parse_all()
}

/// Parses an MLTL formula over Boolean propositions; each proposition `p`
/// becomes the atom `p == 1` and `U`/`R` denote the strict operators.
pub fn parse_mltl(text: &str) -> Result<Formula, ParseError> {
    Parser::new(text, Dialect::Mltl)?.parse_all()
}

/// Parses a formula in the given dialect.
pub fn parse(text: &str, dialect: Dialect) -> Result<Formula, ParseError> {
    Parser::new(text, dialect)?.parse_all()
}

/// Parses a requirement set: one formula per line, blank lines and lines
/// starting with `#` skipped. The result is the conjunction of all lines, or
/// `true` when there are none.
pub fn parse_requirements(text: &str, dialect: Dialect) -> Result<Formula, ParseError> {
    let mut parts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        parts.push(parse(line, dialect).map_err(|e| e.on_line(i + 1))?);
    }
    Ok(parts.into_iter().reduce(Formula::and).unwrap_or(Formula::True))
}

impl ParseError {
    fn on_line(self, n: usize) -> Self {
        match self {
            ParseError::Syntax { col, message, .. } => ParseError::Syntax { line: n, col, message },
            ParseError::EmptyInterval { col, lo, hi, .. } => ParseError::EmptyInterval { line: n, col, lo, hi },
            ParseError::BadConstant { col, text, .. } => ParseError::BadConstant { line: n, col, text },
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    dialect: Dialect,
}

type LinearExpr = (BTreeMap<String, Rational>, Rational);

impl Parser {
    fn new(text: &str, dialect: Dialect) -> Result<Self, ParseError> {
        Ok(Parser {
            tokens: lex(text)?,
            pos: 0,
            dialect,
        })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn advance(&mut self) -> Tok {
        let tok = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let t = &self.tokens[self.pos];
        Err(ParseError::Syntax {
            line: t.line,
            col: t.col,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            self.error(format!("expected {what}, found {}", describe(self.peek())))
        }
    }

    fn parse_all(mut self) -> Result<Formula, ParseError> {
        let f = self.parse_implies()?;
        if *self.peek() != Tok::Eof {
            return self.error(format!("unexpected {}", describe(self.peek())));
        }
        Ok(f)
    }

    fn parse_implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_or()?;
        if *self.peek() == Tok::Arrow {
            self.advance();
            let rhs = self.parse_implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_and()?;
        while *self.peek() == Tok::Pipe {
            self.advance();
            let rhs = self.parse_and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_binary_temporal()?;
        while *self.peek() == Tok::Amp {
            self.advance();
            let rhs = self.parse_binary_temporal()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn temporal_keyword(&self) -> Option<TemporalOp> {
        let Tok::Ident(name) = self.peek() else {
            return None;
        };
        if *self.peek_at(1) != Tok::LBracket {
            return None;
        }
        let strict = self.dialect == Dialect::Mltl;
        match name.as_str() {
            "G" => Some(TemporalOp::G),
            "F" => Some(TemporalOp::F),
            "U" if strict => Some(TemporalOp::SU),
            "R" if strict => Some(TemporalOp::SR),
            "U" => Some(TemporalOp::U),
            "R" => Some(TemporalOp::R),
            "sU" => Some(TemporalOp::SU),
            "sR" => Some(TemporalOp::SR),
            _ => None,
        }
    }

    fn parse_binary_temporal(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_unary()?;
        while let Some(op) = self.temporal_keyword().filter(|op| !op.is_unary()) {
            self.advance();
            let interval = self.parse_interval()?;
            let rhs = self.parse_unary()?;
            lhs = Formula::Temporal(Temporal::binary(op, interval, Arc::new(lhs), Arc::new(rhs)));
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        if *self.peek() == Tok::Bang {
            self.advance();
            return Ok(Formula::negation(self.parse_unary()?));
        }
        if let Some(op) = self.temporal_keyword() {
            if op.is_unary() {
                self.advance();
                let interval = self.parse_interval()?;
                let arg = self.parse_unary()?;
                return Ok(Formula::Temporal(Temporal::unary(op, interval, Arc::new(arg))));
            }
            return self.error(format!("binary operator `{}` is missing its left operand", op.keyword()));
        }
        self.parse_primary()
    }

    fn parse_interval(&mut self) -> Result<Interval, ParseError> {
        let (line, col) = (self.tokens[self.pos].line, self.tokens[self.pos].col);
        self.expect(Tok::LBracket, "`[`")?;
        let lo = self.parse_nat()?;
        self.expect(Tok::Comma, "`,`")?;
        let hi = self.parse_nat()?;
        self.expect(Tok::RBracket, "`]`")?;
        if lo > hi {
            return Err(ParseError::EmptyInterval { line, col, lo, hi });
        }
        Ok(Interval::new(lo, hi))
    }

    fn parse_nat(&mut self) -> Result<u64, ParseError> {
        let t = &self.tokens[self.pos];
        match &t.tok {
            Tok::Number(s) => match s.parse::<u64>() {
                Ok(n) => {
                    self.advance();
                    Ok(n)
                }
                Err(_) => self.error(format!("interval bound `{s}` is not a natural number")),
            },
            other => self.error(format!("expected an interval bound, found {}", describe(other))),
        }
    }

    fn parse_primary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.advance();
                let f = self.parse_implies()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(name) if name == "true" => {
                self.advance();
                Ok(Formula::True)
            }
            Tok::Ident(name) if name == "false" => {
                self.advance();
                Ok(Formula::falsum())
            }
            Tok::Ident(name) if self.dialect == Dialect::Mltl => {
                self.advance();
                Ok(Formula::Atom(LinearConstraint::proposition(&name)))
            }
            Tok::Ident(_) | Tok::Number(_) | Tok::Minus | Tok::Plus => self.parse_atom(),
            other => self.error(format!("expected a formula, found {}", describe(&other))),
        }
    }

    fn parse_atom(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_linear()?;
        let relation = match self.peek() {
            Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge | Tok::EqEq | Tok::Neq => self.advance(),
            other => return self.error(format!("expected a comparison, found {}", describe(other))),
        };
        let rhs = self.parse_linear()?;
        let mut terms = lhs.0;
        for (var, coef) in rhs.0 {
            *terms.entry(var).or_insert_with(|| int(0)) -= coef;
        }
        let bound = rhs.1 - lhs.1;
        let c = LinearConstraint::new(terms, Relation::Gt, bound);
        let f = match relation {
            Tok::Gt => Formula::Atom(c),
            Tok::Lt => Formula::Atom(c.negated_sides(Relation::Gt)),
            Tok::Le => Formula::negation(Formula::Atom(c)),
            Tok::Ge => Formula::Atom(LinearConstraint { relation: Relation::Ge, ..c }),
            Tok::EqEq => Formula::Atom(LinearConstraint { relation: Relation::Eq, ..c }),
            Tok::Neq => Formula::Atom(LinearConstraint { relation: Relation::Neq, ..c }),
            _ => unreachable!(),
        };
        Ok(fold_ground(f))
    }

    fn parse_linear(&mut self) -> Result<LinearExpr, ParseError> {
        let mut terms: BTreeMap<String, Rational> = BTreeMap::new();
        let mut constant = int(0);
        let mut sign = match self.peek() {
            Tok::Minus => {
                self.advance();
                -1
            }
            Tok::Plus => {
                self.advance();
                1
            }
            _ => 1,
        };
        loop {
            let (coef, var) = self.parse_term()?;
            let coef = coef * int(sign);
            match var {
                Some(v) => *terms.entry(v).or_insert_with(|| int(0)) += coef,
                None => constant += coef,
            }
            sign = match self.peek() {
                Tok::Plus => 1,
                Tok::Minus => -1,
                _ => break,
            };
            self.advance();
        }
        Ok((terms, constant))
    }

    fn parse_term(&mut self) -> Result<(Rational, Option<String>), ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.advance();
                Ok((int(1), Some(name)))
            }
            Tok::Number(text) => {
                let t = &self.tokens[self.pos];
                let Some(value) = parse_rational(&text) else {
                    return Err(ParseError::BadConstant {
                        line: t.line,
                        col: t.col,
                        text,
                    });
                };
                self.advance();
                if *self.peek() == Tok::Star {
                    self.advance();
                }
                match self.peek().clone() {
                    Tok::Ident(name) if self.temporal_keyword().is_none() => {
                        self.advance();
                        Ok((value, Some(name)))
                    }
                    _ => Ok((value, None)),
                }
            }
            other => self.error(format!("expected a term, found {}", describe(&other))),
        }
    }
}

fn fold_ground(f: Formula) -> Formula {
    let (negated, c) = match &f {
        Formula::Atom(c) => (false, c),
        Formula::Not(inner) => match &**inner {
            Formula::Atom(c) => (true, c),
            _ => return f,
        },
        _ => return f,
    };
    match c.ground_truth() {
        Some(v) if v != negated => Formula::True,
        Some(_) => Formula::falsum(),
        None => f,
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Number(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::LBracket => "`[`".into(),
        Tok::RBracket => "`]`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Pipe => "`|`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Lt => "`<`".into(),
        Tok::Le => "`<=`".into(),
        Tok::Gt => "`>`".into(),
        Tok::Ge => "`>=`".into(),
        Tok::EqEq => "`==`".into(),
        Tok::Neq => "`!=`".into(),
    }
}
