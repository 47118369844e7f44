//! The analyzed language: assignments over uninterpreted expressions, plus
//! non-deterministic branching and looping.
//!
//! ```text
//! program := stmt*
//! stmt    := ident ":=" expr ";"
//!          | "if" "(" "*" ")" block "else" block
//!          | "while" "(" "*" ")" block
//!          | ident ":"                      (program-point label)
//! block   := "{" stmt* "}"
//! expr    := atom (op atom)*                (single precedence, left-assoc)
//! atom    := ident | integer | "-" integer | "(" expr ")"
//! op      := "+" | "-" | "*" | "/"
//! ```
//!
//! Branch and loop conditions are always the wildcard `*`: the analyses treat
//! every path as feasible, so concrete conditions would add nothing. `#`
//! starts a comment that runs to the end of the line. Identifiers beginning
//! with `__` are reserved for synthesized point names.

use crate::error::{Error, Result};
use crate::term::{Op, Term};
use num_bigint::BigInt;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    /// `var := rhs;`
    Assign { var: String, rhs: Term },
    /// `if (*) { ... } else { ... }`
    If {
        then_branch: Vec<Stmt>,
        else_branch: Vec<Stmt>,
    },
    /// `while (*) { ... }`
    While { body: Vec<Stmt> },
    /// `name:` — names the program point at this position.
    Label(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub stmts: Vec<Stmt>,
}

impl Program {
    pub fn parse(src: &str) -> Result<Program> {
        let tokens = lex(src)?;
        let mut parser = Parser { tokens, pos: 0 };
        let stmts = parser.parse_stmts(/*in_block=*/ false)?;
        let program = Program { stmts };
        program.validate()?;
        Ok(program)
    }

    fn validate(&self) -> Result<()> {
        let mut labels = BTreeSet::new();
        self.try_visit_stmts(&mut |stmt| {
            match stmt {
                Stmt::Assign { var, rhs } => {
                    check_not_reserved(var)?;
                    for v in rhs.vars() {
                        check_not_reserved(&v)?;
                    }
                }
                Stmt::Label(name) => {
                    check_not_reserved(name)?;
                    if !labels.insert(name.clone()) {
                        return Err(Error::DuplicateLabel(name.clone()));
                    }
                }
                Stmt::If { .. } | Stmt::While { .. } => {}
            }
            Ok(())
        })
    }

    fn try_visit_stmts(&self, f: &mut impl FnMut(&Stmt) -> Result<()>) -> Result<()> {
        fn walk(stmts: &[Stmt], f: &mut impl FnMut(&Stmt) -> Result<()>) -> Result<()> {
            for stmt in stmts {
                f(stmt)?;
                match stmt {
                    Stmt::If {
                        then_branch,
                        else_branch,
                    } => {
                        walk(then_branch, f)?;
                        walk(else_branch, f)?;
                    }
                    Stmt::While { body } => walk(body, f)?,
                    _ => {}
                }
            }
            Ok(())
        }
        walk(&self.stmts, f)
    }

    /// Applies `f` to every statement, including statements nested in
    /// branches and loop bodies.
    pub fn visit_stmts(&self, f: &mut impl FnMut(&Stmt)) {
        self.try_visit_stmts(&mut |s| {
            f(s);
            Ok(())
        })
        .expect("infallible visitor");
    }

    /// Every variable that is assigned or read anywhere in the program.
    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_stmts(&mut |stmt| {
            if let Stmt::Assign { var, rhs } = stmt {
                out.insert(var.clone());
                out.extend(rhs.vars());
            }
        });
        out
    }

    /// Every constant literal appearing in the program.
    pub fn constants(&self) -> BTreeSet<BigInt> {
        let mut out = BTreeSet::new();
        self.visit_stmts(&mut |stmt| {
            if let Stmt::Assign { rhs, .. } = stmt {
                out.extend(rhs.constants());
            }
        });
        out
    }

    /// Every operator appearing in the program.
    pub fn operators(&self) -> BTreeSet<Op> {
        let mut out = BTreeSet::new();
        self.visit_stmts(&mut |stmt| {
            if let Stmt::Assign { rhs, .. } = stmt {
                out.extend(rhs.operators());
            }
        });
        out
    }

    /// The largest right-hand-side size in the program (0 for a program of
    /// pure copies, or with no assignments at all).
    pub fn max_rhs_size(&self) -> usize {
        let mut max = 0;
        self.visit_stmts(&mut |stmt| {
            if let Stmt::Assign { rhs, .. } = stmt {
                max = max.max(rhs.size());
            }
        });
        max
    }

    /// Program-size measure: the number of distinct variables plus the total
    /// number of subterm occurrences across all right-hand sides.
    pub fn size_measure(&self) -> usize {
        let mut occurrences = 0;
        self.visit_stmts(&mut |stmt| {
            if let Stmt::Assign { rhs, .. } = stmt {
                occurrences += rhs.occurrence_count();
            }
        });
        self.variables().len() + occurrences
    }

    /// All point labels, in source order.
    pub fn labels(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit_stmts(&mut |stmt| {
            if let Stmt::Label(name) = stmt {
                out.push(name.clone());
            }
        });
        out
    }
}

fn check_not_reserved(name: &str) -> Result<()> {
    if name.starts_with("__") {
        Err(Error::ReservedIdent(name.to_string()))
    } else {
        Ok(())
    }
}

impl FromStr for Program {
    type Err = Error;

    fn from_str(s: &str) -> Result<Program> {
        Program::parse(s)
    }
}

/// Parses a single expression such as `x + (1 * y)`, using the same grammar
/// as assignment right-hand sides.
pub fn parse_term(src: &str) -> Result<Term> {
    let tokens = lex(src)?;
    let mut parser = Parser { tokens, pos: 0 };
    let term = parser.parse_expr()?;
    parser.expect(TokenKind::Eof, "end of expression")?;
    Ok(term)
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Term> {
        parse_term(s)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_stmts(f, &self.stmts, 0)
    }
}

fn write_stmts(f: &mut fmt::Formatter<'_>, stmts: &[Stmt], indent: usize) -> fmt::Result {
    for stmt in stmts {
        for _ in 0..indent {
            write!(f, "  ")?;
        }
        match stmt {
            Stmt::Assign { var, rhs } => writeln!(f, "{var} := {rhs};")?,
            Stmt::Label(name) => writeln!(f, "{name}:")?,
            Stmt::If {
                then_branch,
                else_branch,
            } => {
                writeln!(f, "if (*) {{")?;
                write_stmts(f, then_branch, indent + 1)?;
                for _ in 0..indent {
                    write!(f, "  ")?;
                }
                writeln!(f, "}} else {{")?;
                write_stmts(f, else_branch, indent + 1)?;
                for _ in 0..indent {
                    write!(f, "  ")?;
                }
                writeln!(f, "}}")?;
            }
            Stmt::While { body } => {
                writeln!(f, "while (*) {{")?;
                write_stmts(f, body, indent + 1)?;
                for _ in 0..indent {
                    write!(f, "  ")?;
                }
                writeln!(f, "}}")?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
enum TokenKind {
    Ident(String),
    Int(BigInt),
    Assign, // :=
    Colon,
    Semi,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Op(Op),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = src.chars().peekable();

    macro_rules! err {
        ($($arg:tt)*) => {
            return Err(Error::Parse { line, col, message: format!($($arg)*) })
        };
    }

    while let Some(&c) = chars.peek() {
        let (tok_line, tok_col) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };

        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }

        let kind = if c.is_ascii_alphabetic() || c == '_' {
            let mut ident = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    ident.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            TokenKind::Ident(ident)
        } else if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    digits.push(bump(&mut chars));
                } else {
                    break;
                }
            }
            TokenKind::Int(digits.parse().expect("digit run parses as integer"))
        } else {
            match bump(&mut chars) {
                ':' => {
                    if chars.peek() == Some(&'=') {
                        bump(&mut chars);
                        TokenKind::Assign
                    } else {
                        TokenKind::Colon
                    }
                }
                ';' => TokenKind::Semi,
                '{' => TokenKind::LBrace,
                '}' => TokenKind::RBrace,
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                c => match Op::from_symbol(c) {
                    Some(op) => TokenKind::Op(op),
                    None => err!("unexpected character `{c}`"),
                },
            }
        };
        tokens.push(Token {
            kind,
            line: tok_line,
            col: tok_col,
        });
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        line,
        col,
    });
    Ok(tokens)
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn peek2(&self) -> &TokenKind {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)].kind
    }

    fn advance(&mut self) -> Token {
        let tok = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        tok
    }

    fn error_here(&self, message: impl Into<String>) -> Error {
        let tok = self.peek();
        Error::Parse {
            line: tok.line,
            col: tok.col,
            message: message.into(),
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<()> {
        if self.peek().kind == kind {
            self.advance();
            Ok(())
        } else {
            Err(self.error_here(format!("expected {what}")))
        }
    }

    fn parse_stmts(&mut self, in_block: bool) -> Result<Vec<Stmt>> {
        let mut stmts = Vec::new();
        loop {
            match &self.peek().kind {
                TokenKind::Eof => {
                    if in_block {
                        return Err(self.error_here("expected `}`"));
                    }
                    return Ok(stmts);
                }
                TokenKind::RBrace if in_block => return Ok(stmts),
                _ => stmts.push(self.parse_stmt()?),
            }
        }
    }

    fn parse_block(&mut self) -> Result<Vec<Stmt>> {
        self.expect(TokenKind::LBrace, "`{`")?;
        let stmts = self.parse_stmts(true)?;
        self.expect(TokenKind::RBrace, "`}`")?;
        Ok(stmts)
    }

    fn parse_stmt(&mut self) -> Result<Stmt> {
        match self.peek().kind.clone() {
            TokenKind::Ident(name) => match name.as_str() {
                "if" => {
                    self.advance();
                    self.expect(TokenKind::LParen, "`(` after `if`")?;
                    self.expect(TokenKind::Op(Op::Mul), "`*` condition")?;
                    self.expect(TokenKind::RParen, "`)` after condition")?;
                    let then_branch = self.parse_block()?;
                    match &self.peek().kind {
                        TokenKind::Ident(kw) if kw == "else" => {
                            self.advance();
                        }
                        _ => return Err(self.error_here("expected `else`")),
                    }
                    let else_branch = self.parse_block()?;
                    Ok(Stmt::If {
                        then_branch,
                        else_branch,
                    })
                }
                "while" => {
                    self.advance();
                    self.expect(TokenKind::LParen, "`(` after `while`")?;
                    self.expect(TokenKind::Op(Op::Mul), "`*` condition")?;
                    self.expect(TokenKind::RParen, "`)` after condition")?;
                    let body = self.parse_block()?;
                    Ok(Stmt::While { body })
                }
                "else" => Err(self.error_here("`else` without matching `if`")),
                _ => {
                    self.advance();
                    match self.peek().kind.clone() {
                        TokenKind::Assign => {
                            self.advance();
                            let rhs = self.parse_expr()?;
                            self.expect(TokenKind::Semi, "`;` after assignment")?;
                            Ok(Stmt::Assign { var: name, rhs })
                        }
                        TokenKind::Colon => {
                            self.advance();
                            Ok(Stmt::Label(name))
                        }
                        _ => Err(self.error_here("expected `:=` or `:` after identifier")),
                    }
                }
            },
            _ => Err(self.error_here("expected a statement")),
        }
    }

    fn parse_expr(&mut self) -> Result<Term> {
        let mut lhs = self.parse_atom()?;
        while let TokenKind::Op(op) = self.peek().kind {
            self.advance();
            let rhs = self.parse_atom()?;
            lhs = Term::app(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_atom(&mut self) -> Result<Term> {
        match self.peek().kind.clone() {
            TokenKind::Ident(name) => {
                if name == "if" || name == "else" || name == "while" {
                    return Err(self.error_here(format!("keyword `{name}` used as a variable")));
                }
                self.advance();
                Ok(Term::Var(name))
            }
            TokenKind::Int(value) => {
                self.advance();
                Ok(Term::Const(value))
            }
            TokenKind::Op(Op::Sub) => {
                // Unary minus: only immediately before an integer literal.
                if let TokenKind::Int(_) = self.peek2() {
                    self.advance();
                    if let TokenKind::Int(value) = self.advance().kind {
                        Ok(Term::Const(-value))
                    } else {
                        unreachable!("peeked an integer literal")
                    }
                } else {
                    Err(self.error_here("`-` must be followed by an integer literal here"))
                }
            }
            TokenKind::LParen => {
                self.advance();
                let expr = self.parse_expr()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(expr)
            }
            _ => Err(self.error_here("expected a variable, constant, or `(`")),
        }
    }
}
