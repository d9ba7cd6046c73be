//! Recursive-descent parser producing [`RawRule`]s.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::{Spanned, Token};
use super::ParseError;

pub(super) struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
    end_line: u32,
    end_col: u32,
    pub diagnostics: Vec<String>,
}

impl Parser {
    pub(super) fn new(tokens: Vec<Spanned>) -> Self {
        let (end_line, end_col) =
            tokens.last().map(|t| (t.line, t.col + 1)).unwrap_or((1, 1));
        Parser { tokens, pos: 0, end_line, end_col, diagnostics: Vec::new() }
    }

    pub(super) fn parse_program(&mut self) -> Result<Vec<RawRule>, ParseError> {
        let mut rules = Vec::new();
        while self.peek().is_some() {
            if let Some(rule) = self.parse_statement()? {
                rules.push(rule);
            }
        }
        Ok(rules)
    }

    fn parse_statement(&mut self) -> Result<Option<RawRule>, ParseError> {
        match self.peek() {
            Some(Token::Directive(_)) => {
                let (line, col) = self.here();
                let name = match self.advance() {
                    Some(Token::Directive(d)) => d,
                    _ => unreachable!(),
                };
                match name.as_str() {
                    "#show" | "#const" => {
                        // Parsed (skipped through the terminating dot) and ignored.
                        self.skip_until_dot()?;
                        self.diagnostics.push(format!("ignored directive {name}"));
                        Ok(None)
                    }
                    _ => Err(ParseError::new(
                        line,
                        col,
                        format!("directive {name} is not supported"),
                    )),
                }
            }
            Some(Token::ColonTilde) => {
                let (line, col) = self.here();
                Err(ParseError::new(line, col, "weak constraints (`:~`) are not supported"))
            }
            _ => self.parse_rule().map(Some),
        }
    }

    fn skip_until_dot(&mut self) -> Result<(), ParseError> {
        loop {
            match self.advance() {
                Some(Token::Dot) => return Ok(()),
                Some(_) => {}
                None => {
                    return Err(ParseError::new(
                        self.end_line,
                        self.end_col,
                        "unexpected end of input inside directive",
                    ))
                }
            }
        }
    }

    fn parse_rule(&mut self) -> Result<RawRule, ParseError> {
        let head = if self.peek() == Some(&Token::ColonDash) {
            Head::Falsum
        } else {
            self.parse_head()?
        };

        let mut rule = RawRule {
            head,
            positive_body: Vec::new(),
            negative_body: Vec::new(),
            aggregates: Vec::new(),
            comparisons: Vec::new(),
        };

        if self.peek() == Some(&Token::ColonDash) {
            self.advance();
            loop {
                self.parse_body_literal(&mut rule)?;
                if self.peek() == Some(&Token::Comma) {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(Token::Dot)?;
        Ok(rule)
    }

    fn parse_head(&mut self) -> Result<Head, ParseError> {
        // A leading integer or `{` starts a choice atom.
        let lower = match self.peek() {
            Some(Token::Integer(_)) => {
                let n = match self.advance() {
                    Some(Token::Integer(n)) => n,
                    _ => unreachable!(),
                };
                self.expect(Token::LBrace)?;
                Some(n)
            }
            Some(Token::LBrace) => {
                self.advance();
                None
            }
            _ => {
                let first = self.parse_plain_atom()?;
                if self.peek() == Some(&Token::Pipe) {
                    let mut atoms = alloc::vec![first];
                    while self.peek() == Some(&Token::Pipe) {
                        self.advance();
                        atoms.push(self.parse_plain_atom()?);
                    }
                    return Ok(Head::Disjunction(atoms));
                }
                return Ok(Head::Atom(first));
            }
        };

        let mut conditions = Vec::new();
        if self.peek() != Some(&Token::RBrace) {
            loop {
                let head = self.parse_plain_atom()?;
                let mut literals = Vec::new();
                if self.peek() == Some(&Token::Colon) {
                    self.advance();
                    loop {
                        literals.push(self.parse_literal()?);
                        if self.peek() == Some(&Token::Comma) {
                            self.advance();
                        } else {
                            break;
                        }
                    }
                }
                conditions.push(ChoiceCondition { head, literals });
                if self.peek() == Some(&Token::Semicolon) {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(Token::RBrace)?;
        let upper = match self.peek() {
            Some(Token::Integer(_)) => match self.advance() {
                Some(Token::Integer(n)) => Some(n),
                _ => unreachable!(),
            },
            _ => None,
        };
        Ok(Head::Choice { lower, upper, conditions })
    }

    fn parse_body_literal(&mut self, rule: &mut RawRule) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token::Not) => {
                self.advance();
                if let Some(Token::Aggregate(_)) = self.peek() {
                    // A negated aggregate is handled like a plain one: ignored.
                    let agg = self.parse_aggregate_right()?;
                    rule.aggregates.push(agg);
                } else {
                    rule.negative_body.push(self.parse_plain_atom()?);
                }
                Ok(())
            }
            Some(Token::Aggregate(_)) => {
                rule.aggregates.push(self.parse_aggregate_right()?);
                Ok(())
            }
            Some(Token::Minus) if matches!(self.peek2(), Some(Token::Ident(_))) => {
                // Classical negation at literal start: `-p(X)`.
                rule.positive_body.push(self.parse_plain_atom()?);
                Ok(())
            }
            _ => {
                let (line, col) = self.here();
                let term = self.parse_term()?;
                if let Some(op) = self.peek_comparator() {
                    self.advance();
                    if let Some(Token::Aggregate(_)) = self.peek() {
                        // Bound on the left: `t < #count{...}`.
                        let mut agg = self.parse_aggregate_body()?;
                        agg.comparator = op.flipped();
                        agg.bound = term;
                        rule.aggregates.push(agg);
                    } else {
                        let right = self.parse_term()?;
                        rule.comparisons.push(Comparison { left: term, op, right });
                    }
                    return Ok(());
                }
                match term_to_atom(term) {
                    Some(atom) => {
                        rule.positive_body.push(atom);
                        Ok(())
                    }
                    None => Err(ParseError::new(line, col, "expected an atom or comparison")),
                }
            }
        }
    }

    /// Parses `#aggr{...} ≺ t` where the bound is on the right.
    fn parse_aggregate_right(&mut self) -> Result<AggregateAtom, ParseError> {
        let mut agg = self.parse_aggregate_body()?;
        let (line, col) = self.here();
        match self.peek_comparator() {
            Some(op) => {
                self.advance();
                agg.comparator = op;
                agg.bound = self.parse_term()?;
                Ok(agg)
            }
            None => Err(ParseError::new(line, col, "expected comparator after aggregate")),
        }
    }

    /// Parses `#aggr{e0;...;en}` leaving comparator/bound as placeholders.
    fn parse_aggregate_body(&mut self) -> Result<AggregateAtom, ParseError> {
        let function = match self.advance() {
            Some(Token::Aggregate(f)) => f,
            _ => unreachable!(),
        };
        self.expect(Token::LBrace)?;
        let mut elements = Vec::new();
        if self.peek() != Some(&Token::RBrace) {
            loop {
                let mut terms = alloc::vec![self.parse_term()?];
                while self.peek() == Some(&Token::Comma) {
                    self.advance();
                    terms.push(self.parse_term()?);
                }
                let mut literals = Vec::new();
                if self.peek() == Some(&Token::Colon) {
                    self.advance();
                    loop {
                        literals.push(self.parse_literal()?);
                        if self.peek() == Some(&Token::Comma) {
                            self.advance();
                        } else {
                            break;
                        }
                    }
                }
                elements.push(AggregateElement { terms, literals });
                if self.peek() == Some(&Token::Semicolon) {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(Token::RBrace)?;
        Ok(AggregateAtom {
            function,
            elements,
            comparator: Comparator::Eq,
            bound: Term::Integer(0),
        })
    }

    fn parse_literal(&mut self) -> Result<Literal, ParseError> {
        if self.peek() == Some(&Token::Not) {
            self.advance();
            Ok(Literal::Negative(self.parse_plain_atom()?))
        } else {
            Ok(Literal::Positive(self.parse_plain_atom()?))
        }
    }

    /// An atom, possibly classically negated (`-p(X)` becomes predicate `-p`).
    fn parse_plain_atom(&mut self) -> Result<Atom, ParseError> {
        let negated = if self.peek() == Some(&Token::Minus) {
            self.advance();
            true
        } else {
            false
        };
        let (line, col) = self.here();
        match self.advance() {
            Some(Token::Ident(name)) => {
                let terms = if self.peek() == Some(&Token::LParen) {
                    self.advance();
                    let args = self.parse_term_args()?;
                    self.expect(Token::RParen)?;
                    args
                } else {
                    Vec::new()
                };
                let predicate = if negated { format!("-{name}") } else { name };
                Ok(Atom { predicate, terms })
            }
            Some(other) => {
                Err(ParseError::new(line, col, format!("expected atom, found {}", other.describe())))
            }
            None => Err(ParseError::new(self.end_line, self.end_col, "unexpected end of input")),
        }
    }

    fn parse_term_args(&mut self) -> Result<Vec<Term>, ParseError> {
        let mut args = alloc::vec![self.parse_pool_expr()?];
        while self.peek() == Some(&Token::Comma) {
            self.advance();
            args.push(self.parse_pool_expr()?);
        }
        Ok(args)
    }

    /// `t1;...;tn` — one argument slot; more than one member makes a pool.
    fn parse_pool_expr(&mut self) -> Result<Term, ParseError> {
        let first = self.parse_term()?;
        if self.peek() != Some(&Token::Semicolon) {
            return Ok(first);
        }
        let mut members = Vec::new();
        push_pool_member(&mut members, first);
        while self.peek() == Some(&Token::Semicolon) {
            self.advance();
            push_pool_member(&mut members, self.parse_term()?);
        }
        Ok(Term::Pool(members))
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        let lo = self.parse_additive()?;
        if self.peek() == Some(&Token::DotDot) {
            self.advance();
            let hi = self.parse_additive()?;
            Ok(Term::Interval(Box::new(lo), Box::new(hi)))
        } else {
            Ok(lo)
        }
    }

    fn parse_additive(&mut self) -> Result<Term, ParseError> {
        let mut left = self.parse_multiplicative()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinOp::Add,
                Some(Token::Minus) => BinOp::Sub,
                _ => break,
            };
            self.advance();
            let right = self.parse_multiplicative()?;
            left = Term::BinaryOp(op, Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_multiplicative(&mut self) -> Result<Term, ParseError> {
        let mut left = self.parse_unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinOp::Mul,
                Some(Token::Slash) => BinOp::Div,
                Some(Token::Backslash) => BinOp::Mod,
                _ => break,
            };
            self.advance();
            let right = self.parse_unary()?;
            left = Term::BinaryOp(op, Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn parse_unary(&mut self) -> Result<Term, ParseError> {
        if self.peek() == Some(&Token::Minus) {
            self.advance();
            let inner = self.parse_unary()?;
            return Ok(match inner {
                Term::Integer(n) => Term::Integer(-n),
                other => Term::BinaryOp(BinOp::Sub, Box::new(Term::Integer(0)), Box::new(other)),
            });
        }
        self.parse_primary()
    }

    fn parse_primary(&mut self) -> Result<Term, ParseError> {
        let (line, col) = self.here();
        match self.advance() {
            Some(Token::Integer(n)) => Ok(Term::Integer(n)),
            Some(Token::Variable(v)) => Ok(Term::Variable(v)),
            Some(Token::Ident(name)) => {
                if self.peek() == Some(&Token::LParen) {
                    self.advance();
                    let args = self.parse_term_args()?;
                    self.expect(Token::RParen)?;
                    Ok(Term::Function(name, args))
                } else {
                    Ok(Term::Symbol(name))
                }
            }
            Some(Token::LParen) => {
                let inner = self.parse_pool_expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Some(other) => {
                Err(ParseError::new(line, col, format!("expected term, found {}", other.describe())))
            }
            None => Err(ParseError::new(self.end_line, self.end_col, "unexpected end of input")),
        }
    }

    fn peek_comparator(&self) -> Option<Comparator> {
        match self.peek() {
            Some(Token::Lt) => Some(Comparator::Lt),
            Some(Token::Le) => Some(Comparator::Le),
            Some(Token::Gt) => Some(Comparator::Gt),
            Some(Token::Ge) => Some(Comparator::Ge),
            Some(Token::Eq) => Some(Comparator::Eq),
            Some(Token::Ne) => Some(Comparator::Ne),
            _ => None,
        }
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    fn peek2(&self) -> Option<&Token> {
        self.tokens.get(self.pos + 1).map(|s| &s.token)
    }

    fn here(&self) -> (u32, u32) {
        self.tokens
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|s| s.token.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, expected: Token) -> Result<(), ParseError> {
        let (line, col) = self.here();
        match self.advance() {
            Some(ref t) if *t == expected => Ok(()),
            Some(other) => Err(ParseError::new(
                line,
                col,
                format!("expected {}, found {}", expected.describe(), other.describe()),
            )),
            None => Err(ParseError::new(
                self.end_line,
                self.end_col,
                format!("expected {}, found end of input", expected.describe()),
            )),
        }
    }
}

/// Reinterprets a term parsed in literal position as an atom.
fn term_to_atom(term: Term) -> Option<Atom> {
    match term {
        Term::Symbol(name) => Some(Atom { predicate: name, terms: Vec::new() }),
        Term::Function(name, args) => Some(Atom { predicate: name, terms: args }),
        _ => None,
    }
}

/// Pools are kept flat: `(a;(b;c))` and `(a;b;c)` denote the same pool.
fn push_pool_member(members: &mut Vec<Term>, term: Term) {
    match term {
        Term::Pool(inner) => members.extend(inner),
        other => members.push(other),
    }
}
