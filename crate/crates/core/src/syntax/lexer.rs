//! Tokenizer for the textual input format.

use alloc::string::String;
use alloc::vec::Vec;

use super::ast::AggregateFn;
use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(super) enum Token {
    Ident(String),
    Variable(String),
    Integer(i64),
    Aggregate(AggregateFn),
    /// `#`-directive other than an aggregate function, e.g. `#show`.
    Directive(String),
    Dot,
    DotDot,
    Comma,
    Semicolon,
    Colon,
    ColonDash,
    ColonTilde,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Pipe,
    Plus,
    Minus,
    Star,
    Slash,
    Backslash,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Not,
}

impl Token {
    pub(super) fn describe(&self) -> String {
        use alloc::format;
        match self {
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Variable(s) => format!("variable `{s}`"),
            Token::Integer(n) => format!("integer `{n}`"),
            Token::Aggregate(f) => format!("`{}`", f.name()),
            Token::Directive(d) => format!("directive `{d}`"),
            Token::Dot => "`.`".into(),
            Token::DotDot => "`..`".into(),
            Token::Comma => "`,`".into(),
            Token::Semicolon => "`;`".into(),
            Token::Colon => "`:`".into(),
            Token::ColonDash => "`:-`".into(),
            Token::ColonTilde => "`:~`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::LBrace => "`{`".into(),
            Token::RBrace => "`}`".into(),
            Token::Pipe => "`|`".into(),
            Token::Plus => "`+`".into(),
            Token::Minus => "`-`".into(),
            Token::Star => "`*`".into(),
            Token::Slash => "`/`".into(),
            Token::Backslash => "`\\`".into(),
            Token::Lt => "`<`".into(),
            Token::Le => "`<=`".into(),
            Token::Gt => "`>`".into(),
            Token::Ge => "`>=`".into(),
            Token::Eq => "`=`".into(),
            Token::Ne => "`!=`".into(),
            Token::Not => "`not`".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub(super) struct Spanned {
    pub token: Token,
    pub line: u32,
    pub col: u32,
}

pub(super) fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line: u32 = 1;
    let mut col: u32 = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    loop {
        let (tok_line, tok_col) = (line, col);
        let c = match chars.peek().copied() {
            Some(c) => c,
            None => break,
        };
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                bump!();
                continue;
            }
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
                continue;
            }
            '0'..='9' => {
                let mut value: i64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(digit) = d.to_digit(10) {
                        value = value
                            .checked_mul(10)
                            .and_then(|v| v.checked_add(digit as i64))
                            .ok_or_else(|| {
                                ParseError::new(tok_line, tok_col, "integer literal out of range")
                            })?;
                        bump!();
                    } else {
                        break;
                    }
                }
                tokens.push(Spanned { token: Token::Integer(value), line: tok_line, col: tok_col });
            }
            'a'..='z' => {
                let word = lex_word(&mut chars, &mut line, &mut col);
                let token = if word == "not" { Token::Not } else { Token::Ident(word) };
                tokens.push(Spanned { token, line: tok_line, col: tok_col });
            }
            'A'..='Z' => {
                let word = lex_word(&mut chars, &mut line, &mut col);
                tokens.push(Spanned { token: Token::Variable(word), line: tok_line, col: tok_col });
            }
            '#' => {
                bump!();
                let word = lex_word(&mut chars, &mut line, &mut col);
                let token = match word.as_str() {
                    "count" => Token::Aggregate(AggregateFn::Count),
                    "sum" => Token::Aggregate(AggregateFn::Sum),
                    "max" => Token::Aggregate(AggregateFn::Max),
                    "min" => Token::Aggregate(AggregateFn::Min),
                    _ => {
                        let mut d = String::from("#");
                        d.push_str(&word);
                        Token::Directive(d)
                    }
                };
                tokens.push(Spanned { token, line: tok_line, col: tok_col });
            }
            '.' => {
                bump!();
                if chars.peek() == Some(&'.') {
                    bump!();
                    tokens.push(Spanned { token: Token::DotDot, line: tok_line, col: tok_col });
                } else {
                    tokens.push(Spanned { token: Token::Dot, line: tok_line, col: tok_col });
                }
            }
            ':' => {
                bump!();
                let token = match chars.peek() {
                    Some('-') => {
                        bump!();
                        Token::ColonDash
                    }
                    Some('~') => {
                        bump!();
                        Token::ColonTilde
                    }
                    _ => Token::Colon,
                };
                tokens.push(Spanned { token, line: tok_line, col: tok_col });
            }
            '<' => {
                bump!();
                let token = if chars.peek() == Some(&'=') {
                    bump!();
                    Token::Le
                } else if chars.peek() == Some(&'>') {
                    bump!();
                    Token::Ne
                } else {
                    Token::Lt
                };
                tokens.push(Spanned { token, line: tok_line, col: tok_col });
            }
            '>' => {
                bump!();
                let token = if chars.peek() == Some(&'=') {
                    bump!();
                    Token::Ge
                } else {
                    Token::Gt
                };
                tokens.push(Spanned { token, line: tok_line, col: tok_col });
            }
            '=' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                }
                tokens.push(Spanned { token: Token::Eq, line: tok_line, col: tok_col });
            }
            '!' => {
                bump!();
                if chars.peek() == Some(&'=') {
                    bump!();
                    tokens.push(Spanned { token: Token::Ne, line: tok_line, col: tok_col });
                } else {
                    return Err(ParseError::new(tok_line, tok_col, "expected `!=`"));
                }
            }
            ',' | ';' | '(' | ')' | '{' | '}' | '|' | '+' | '-' | '*' | '/' | '\\' => {
                bump!();
                let token = match c {
                    ',' => Token::Comma,
                    ';' => Token::Semicolon,
                    '(' => Token::LParen,
                    ')' => Token::RParen,
                    '{' => Token::LBrace,
                    '}' => Token::RBrace,
                    '|' => Token::Pipe,
                    '+' => Token::Plus,
                    '-' => Token::Minus,
                    '*' => Token::Star,
                    '/' => Token::Slash,
                    '\\' => Token::Backslash,
                    _ => unreachable!(),
                };
                tokens.push(Spanned { token, line: tok_line, col: tok_col });
            }
            '_' => {
                return Err(ParseError::new(
                    tok_line,
                    tok_col,
                    "anonymous variables and `_`-prefixed identifiers are not supported",
                ));
            }
            '"' => {
                return Err(ParseError::new(
                    tok_line,
                    tok_col,
                    "string constants are not supported; use alphanumeric constants",
                ));
            }
            other => {
                return Err(ParseError::new(
                    tok_line,
                    tok_col,
                    alloc::format!("unexpected character `{other}`"),
                ));
            }
        }
    }
    Ok(tokens)
}

fn lex_word(
    chars: &mut core::iter::Peekable<core::str::Chars<'_>>,
    line: &mut u32,
    col: &mut u32,
) -> String {
    let mut word = String::new();
    while let Some(&c) = chars.peek() {
        if c.is_ascii_alphanumeric() || c == '_' {
            word.push(c);
            chars.next();
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        } else {
            break;
        }
    }
    word
}
