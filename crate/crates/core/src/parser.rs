//! Reader for the `.ppt` program format and for formulas.
//!
//! ```text
//! program   ::= (directive | rule)*
//! directive ::= ("#initial" | "#dynamic" | "#final") "."
//! rule      ::= head? (":-" formula)? "."
//! head      ::= atom (("|" | ";" | "or") atom)*
//! formula   ::= conj (("or" | ";") conj)*
//! conj      ::= temp (("and" | ",") temp)*
//! temp      ::= unary (("since" | "trigger") unary)*
//! unary     ::= ("not" | "prev" | "wprev" | "always_before" | "eventually_before") unary
//!             | atom | "true" | "false" | "initially" | "(" formula ")"
//! ```
//!
//! [`parse_ext_formula`] additionally reads `->` (right associative), `<->`
//! (non-associative, loosest), `I`, `F`, `always(..)` and `wnext_always(..)`.

use std::fmt;

use thiserror::Error;

use crate::ltlf::ExtFormula;
use crate::syntax::{
    expand_derived, Atom, PastFormula, Program, Rule, RuleKind, SurfaceFormula, SyntaxError,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParseErrorKind {
    /// The text does not follow the grammar.
    Syntax,
    /// The text is grammatical but breaks a rule-form restriction.
    Restriction,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub expected: Vec<String>,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Directive(String),
    ColonDash,
    Dot,
    Comma,
    Semi,
    Bar,
    LParen,
    RParen,
    Arrow,
    DoubleArrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Directive(s) => write!(f, "`#{s}`"),
            Tok::ColonDash => f.write_str("`:-`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Semi => f.write_str("`;`"),
            Tok::Bar => f.write_str("`|`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::DoubleArrow => f.write_str("`<->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax_error(
    line: usize,
    column: usize,
    message: impl Into<String>,
    expected: &[&str],
) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
        kind: ParseErrorKind::Syntax,
    }
}

struct Cursor {
    chars: Vec<char>,
    i: usize,
    line: usize,
    column: usize,
}

impl Cursor {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.i + ahead).copied()
    }

    fn bump(&mut self, n: usize) {
        for _ in 0..n {
            if self.chars[self.i] == '\n' {
                self.line += 1;
                self.column = 1;
            } else {
                self.column += 1;
            }
            self.i += 1;
        }
    }

    fn ident_len(&self, from: usize) -> usize {
        self.chars[self.i + from..]
            .iter()
            .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
            .count()
    }

    fn text(&self, from: usize, n: usize) -> String {
        self.chars[self.i + from..self.i + from + n]
            .iter()
            .collect()
    }
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut cur = Cursor {
        chars: src.chars().collect(),
        i: 0,
        line: 1,
        column: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek(0) {
        let (line, column) = (cur.line, cur.column);
        let (tok, width) = match c {
            c if c.is_whitespace() => {
                cur.bump(1);
                continue;
            }
            '%' => {
                while cur.peek(0).is_some_and(|c| c != '\n') {
                    cur.bump(1);
                }
                continue;
            }
            ':' if cur.peek(1) == Some('-') => (Tok::ColonDash, 2),
            '-' if cur.peek(1) == Some('>') => (Tok::Arrow, 2),
            '<' if cur.peek(1) == Some('-') && cur.peek(2) == Some('>') => (Tok::DoubleArrow, 3),
            '.' => (Tok::Dot, 1),
            ',' => (Tok::Comma, 1),
            ';' => (Tok::Semi, 1),
            '|' => (Tok::Bar, 1),
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            '#' => {
                let n = cur.ident_len(1);
                if n == 0 {
                    return Err(syntax_error(
                        line,
                        column,
                        "expected a directive name after `#`",
                        &["`#initial`", "`#dynamic`", "`#final`"],
                    ));
                }
                (Tok::Directive(cur.text(1, n)), n + 1)
            }
            c if c.is_ascii_alphabetic() => {
                let n = cur.ident_len(0);
                (Tok::Ident(cur.text(0, n)), n)
            }
            other => {
                return Err(syntax_error(
                    line,
                    column,
                    format!("unexpected character `{other}`"),
                    &[],
                ));
            }
        };
        cur.bump(width);
        out.push(Token { tok, line, column });
    }
    out.push(Token {
        tok: Tok::Eof,
        line: cur.line,
        column: cur.column,
    });
    Ok(out)
}

#[derive(Clone, Copy)]
enum Unary {
    Not,
    Previous,
    WeakPrevious,
    AlwaysBefore,
    EventuallyBefore,
}

#[derive(Clone, Copy)]
enum Binary {
    Or,
    And,
    Since,
    Trigger,
    Implies,
    Iff,
}

/// Formula syntax tree before derived operators are removed.
enum Expr {
    Falsum,
    Verum,
    Atom(Atom),
    Initially,
    Unary(Unary, Box<Expr>),
    Binary(Binary, Box<Expr>, Box<Expr>),
    InitialConst,
    FinalConst,
    Always(Box<Expr>),
    WeakNextAlways(Box<Expr>),
}

impl Expr {
    fn to_surface(&self) -> SurfaceFormula {
        use SurfaceFormula as S;
        match self {
            Expr::Falsum => S::Falsum,
            Expr::Verum => S::Verum,
            Expr::Atom(a) => S::Atom(a.clone()),
            Expr::Initially => S::Initially,
            Expr::Unary(op, f) => {
                let f = Box::new(f.to_surface());
                match op {
                    Unary::Not => S::Not(f),
                    Unary::Previous => S::Previous(f),
                    Unary::WeakPrevious => S::WeakPrevious(f),
                    Unary::AlwaysBefore => S::AlwaysBefore(f),
                    Unary::EventuallyBefore => S::EventuallyBefore(f),
                }
            }
            Expr::Binary(op, l, r) => {
                let (l, r) = (Box::new(l.to_surface()), Box::new(r.to_surface()));
                match op {
                    Binary::Or => S::Or(l, r),
                    Binary::And => S::And(l, r),
                    Binary::Since => S::Since(l, r),
                    Binary::Trigger => S::Trigger(l, r),
                    Binary::Implies | Binary::Iff => unreachable!("only read in extended mode"),
                }
            }
            _ => unreachable!("only read in extended mode"),
        }
    }

    /// Derived past operators expand as in [`expand_derived`]; `true` stays `⊤`.
    fn to_ext(&self) -> ExtFormula {
        use ExtFormula as E;
        match self {
            Expr::Falsum => E::Falsum,
            Expr::Verum => E::Verum,
            Expr::Atom(a) => E::Atom(a.clone()),
            Expr::Initially => E::from(PastFormula::initially()),
            Expr::InitialConst => E::InitialConst,
            Expr::FinalConst => E::FinalConst,
            Expr::Always(f) => f.to_ext().always(),
            Expr::WeakNextAlways(f) => f.to_ext().wnext_always(),
            Expr::Unary(op, f) => {
                let f = f.to_ext();
                match op {
                    Unary::Not => f.negate(),
                    Unary::Previous => E::Previous(Box::new(f)),
                    Unary::WeakPrevious => {
                        E::Previous(Box::new(f)).or(E::from(PastFormula::initially()))
                    }
                    Unary::AlwaysBefore => E::Trigger(Box::new(E::Falsum), Box::new(f)),
                    Unary::EventuallyBefore => E::Since(Box::new(E::Falsum.negate()), Box::new(f)),
                }
            }
            Expr::Binary(op, l, r) => {
                let (l, r) = (l.to_ext(), r.to_ext());
                match op {
                    Binary::Or => l.or(r),
                    Binary::And => l.and(r),
                    Binary::Since => E::Since(Box::new(l), Box::new(r)),
                    Binary::Trigger => E::Trigger(Box::new(l), Box::new(r)),
                    Binary::Implies => l.implies(r),
                    Binary::Iff => l.iff(r),
                }
            }
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    extended: bool,
}

impl Parser {
    fn new(src: &str, extended: bool) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            extended,
        })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn at_word(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == word)
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        syntax_error(t.line, t.column, format!("unexpected {}", t.tok), expected)
    }

    fn expect(&mut self, tok: Tok, expected: &[&str]) -> Result<(), ParseError> {
        if self.peek().tok == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn is_reserved(&self, word: &str) -> bool {
        crate::syntax::RESERVED_WORDS.contains(&word)
            || (self.extended && (word == "I" || word == "F"))
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        let t = self.peek().clone();
        match &t.tok {
            Tok::Ident(name) if !self.is_reserved(name) => match Atom::new(name.as_str()) {
                Ok(a) => {
                    self.next();
                    Ok(a)
                }
                Err(_) => Err(syntax_error(
                    t.line,
                    t.column,
                    format!("invalid atom name `{name}`: atoms start with a lowercase letter"),
                    &["atom"],
                )),
            },
            _ => Err(self.error(&["atom"])),
        }
    }

    fn formula(&mut self) -> Result<Expr, ParseError> {
        if self.extended {
            self.iff()
        } else {
            self.disjunction()
        }
    }

    fn iff(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.implication()?;
        if self.peek().tok != Tok::DoubleArrow {
            return Ok(lhs);
        }
        self.next();
        let rhs = self.implication()?;
        if self.peek().tok == Tok::DoubleArrow {
            let t = self.peek();
            return Err(syntax_error(
                t.line,
                t.column,
                "`<->` does not associate; add parentheses",
                &[],
            ));
        }
        Ok(Expr::Binary(Binary::Iff, Box::new(lhs), Box::new(rhs)))
    }

    fn implication(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.disjunction()?;
        if self.extended && self.peek().tok == Tok::Arrow {
            self.next();
            let rhs = self.implication()?;
            return Ok(Expr::Binary(Binary::Implies, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.peek().tok == Tok::Semi || self.at_word("or") {
            self.next();
            let rhs = self.conjunction()?;
            lhs = Expr::Binary(Binary::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.temporal()?;
        while self.peek().tok == Tok::Comma || self.at_word("and") {
            self.next();
            let rhs = self.temporal()?;
            lhs = Expr::Binary(Binary::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.at_word("since") {
                Binary::Since
            } else if self.at_word("trigger") {
                Binary::Trigger
            } else {
                return Ok(lhs);
            };
            self.next();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        const EXPECTED: &[&str] = &["atom", "`not`", "`prev`", "`true`", "`false`", "`(`"];
        let t = self.peek().clone();
        let word = match &t.tok {
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen, &["`)`"])?;
                return Ok(f);
            }
            Tok::Ident(w) => w.as_str(),
            _ => return Err(self.error(EXPECTED)),
        };
        let op = match word {
            "not" => Some(Unary::Not),
            "prev" => Some(Unary::Previous),
            "wprev" => Some(Unary::WeakPrevious),
            "always_before" => Some(Unary::AlwaysBefore),
            "eventually_before" => Some(Unary::EventuallyBefore),
            _ => None,
        };
        if let Some(op) = op {
            self.next();
            return Ok(Expr::Unary(op, Box::new(self.unary()?)));
        }
        let constant = match word {
            "true" => Some(Expr::Verum),
            "false" => Some(Expr::Falsum),
            "initially" => Some(Expr::Initially),
            "I" if self.extended => Some(Expr::InitialConst),
            "F" if self.extended => Some(Expr::FinalConst),
            _ => None,
        };
        if let Some(c) = constant {
            self.next();
            return Ok(c);
        }
        if self.extended && (word == "always" || word == "wnext_always") {
            let next_always = word == "wnext_always";
            self.next();
            self.expect(Tok::LParen, &["`(`"])?;
            let f = Box::new(self.formula()?);
            self.expect(Tok::RParen, &["`)`"])?;
            return Ok(if next_always {
                Expr::WeakNextAlways(f)
            } else {
                Expr::Always(f)
            });
        }
        if self.is_reserved(word) {
            return Err(self.error(EXPECTED));
        }
        Ok(Expr::Atom(self.atom()?))
    }

    fn end(&mut self) -> Result<(), ParseError> {
        self.expect(Tok::Eof, &["end of input"])
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut kind = RuleKind::Initial;
        let mut rules = Vec::new();
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Eof => break,
                Tok::Directive(name) => {
                    kind = match name.as_str() {
                        "initial" => RuleKind::Initial,
                        "dynamic" => RuleKind::Dynamic,
                        "final" => RuleKind::Final,
                        _ => {
                            return Err(syntax_error(
                                t.line,
                                t.column,
                                format!("unknown directive `#{name}`"),
                                &["`#initial`", "`#dynamic`", "`#final`"],
                            ))
                        }
                    };
                    self.next();
                    self.expect(Tok::Dot, &["`.`"])?;
                }
                _ => {
                    let index = rules.len();
                    rules.push(self.rule(kind, index)?);
                }
            }
        }
        Ok(Program::new(rules))
    }

    fn rule(&mut self, kind: RuleKind, index: usize) -> Result<Rule, ParseError> {
        let start = self.peek().clone();
        let mut head = Vec::new();
        if self.peek().tok != Tok::ColonDash {
            head.push(self.atom()?);
            while matches!(self.peek().tok, Tok::Bar | Tok::Semi) || self.at_word("or") {
                self.next();
                head.push(self.atom()?);
            }
        }
        let mut body_start = self.peek().clone();
        let body = if self.peek().tok == Tok::ColonDash {
            self.next();
            body_start = self.peek().clone();
            let f = self.formula()?;
            self.expect(Tok::Dot, &["`.`", "`,`", "`or`", "`since`", "`trigger`"])?;
            expand_derived(&f.to_surface())
        } else {
            self.expect(Tok::Dot, &["`.`", "`:-`", "`|`"])?;
            PastFormula::verum()
        };
        Rule::new(kind, head, body, index).map_err(|e| {
            let at = match e {
                SyntaxError::FinalHead => &start,
                _ => &body_start,
            };
            ParseError {
                line: at.line,
                column: at.column,
                message: e.to_string(),
                expected: vec![],
                kind: ParseErrorKind::Restriction,
            }
        })
    }
}

/// Parses a `.ppt` program; rules are numbered in source order from 0.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    Parser::new(src, false)?.program()
}

/// Parses a past formula and removes derived operators.
pub fn parse_formula(src: &str) -> Result<PastFormula, ParseError> {
    let mut p = Parser::new(src, false)?;
    let f = p.formula()?;
    p.end()?;
    Ok(expand_derived(&f.to_surface()))
}

/// Parses a formula of the extended output language.
pub fn parse_ext_formula(src: &str) -> Result<ExtFormula, ParseError> {
    let mut p = Parser::new(src, true)?;
    let f = p.formula()?;
    p.end()?;
    Ok(f.to_ext())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(name: &str) -> PastFormula {
        PastFormula::Atom(Atom::new(name).unwrap())
    }

    const P1: &str = "load.
#dynamic.
shoot | load | unload.
dead :- shoot, (not unload since load).
shoot :- dead.
#final.
:- not dead.
";

    #[test]
    fn p1_sections() {
        let p = parse_program(P1).unwrap();
        assert_eq!(p.initial().len(), 1);
        assert_eq!(p.dynamic().len(), 3);
        assert_eq!(p.final_rules().len(), 1);
        let indices: Vec<usize> = p.rules().iter().map(Rule::source_index).collect();
        assert_eq!(indices, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn rule_three_structure() {
        let p = parse_program("#dynamic. dead :- shoot, (not unload since load).").unwrap();
        let r = &p.rules()[0];
        assert_eq!(r.kind(), RuleKind::Dynamic);
        assert_eq!(r.head(), &[Atom::new("dead").unwrap()]);
        assert_eq!(
            r.body(),
            &a("shoot").and(a("unload").negate().since(a("load")))
        );
    }

    #[test]
    fn restriction_on_initial_body() {
        let e = parse_program("#initial. a :- (b since c).").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Restriction);
        assert_eq!((e.line, e.column), (1, 16));
        let e = parse_program("#final. a :- b.").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Restriction);
        assert_eq!((e.line, e.column), (1, 9));
        assert!(parse_program("#final. :- prev b.").is_err());
        assert!(parse_program("#dynamic. a :- prev b.").is_ok());
    }

    #[test]
    fn formulas() {
        assert_eq!(
            parse_formula("not unload since load").unwrap(),
            a("unload").negate().since(a("load"))
        );
        assert_eq!(
            parse_formula("initially").unwrap(),
            PastFormula::initially()
        );
        assert_eq!(parse_formula("false").unwrap(), PastFormula::Falsum);
        assert_eq!(parse_formula("true").unwrap(), PastFormula::verum());
    }

    #[test]
    fn since_is_left_associative() {
        assert_eq!(
            parse_formula("a since b since c").unwrap(),
            a("a").since(a("b")).since(a("c"))
        );
        assert_eq!(
            parse_formula("a trigger b since c").unwrap(),
            a("a").trigger(a("b")).since(a("c"))
        );
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse_formula("a ; b , c since d").unwrap(),
            a("a").or(a("b").and(a("c").since(a("d"))))
        );
        assert_eq!(
            parse_formula("not a since b").unwrap(),
            a("a").negate().since(a("b"))
        );
        assert_eq!(
            parse_formula("a and b or c").unwrap(),
            a("a").and(a("b")).or(a("c"))
        );
    }

    #[test]
    fn derived_operators() {
        assert_eq!(
            parse_formula("always_before a").unwrap(),
            PastFormula::Falsum.trigger(a("a"))
        );
        assert_eq!(
            parse_formula("eventually_before a").unwrap(),
            PastFormula::verum().since(a("a"))
        );
        assert_eq!(parse_formula("wprev a").unwrap(), a("a").weak_previous());
    }

    #[test]
    fn head_separators() {
        let p = parse_program("a | b. c ; d. e or f.").unwrap();
        for r in p.rules() {
            assert_eq!(r.head().len(), 2);
            assert!(r.body().is_verum());
        }
    }

    #[test]
    fn comments_and_defaults() {
        let p = parse_program("% nothing here\na. % a fact\n").unwrap();
        assert_eq!(p.rules()[0].kind(), RuleKind::Initial);
        assert!(parse_program("").unwrap().is_empty());
    }

    #[test]
    fn error_positions() {
        let e = parse_program("a :- b\nc.").unwrap_err();
        assert_eq!((e.line, e.column), (2, 1));
        assert_eq!(e.kind, ParseErrorKind::Syntax);
        let e = parse_program("a :- not.").unwrap_err();
        assert_eq!((e.line, e.column), (1, 9));
        assert!(e.expected.contains(&"atom".to_string()));
        let e = parse_program("#sometimes.").unwrap_err();
        assert_eq!((e.line, e.column), (1, 1));
        let e = parse_program("a :- B.").unwrap_err();
        assert_eq!((e.line, e.column), (1, 6));
        let e = parse_program("a :- b & c.").unwrap_err();
        assert_eq!((e.line, e.column), (1, 8));
        assert!(parse_program(".").is_err());
        assert!(parse_program("not.").is_err());
    }

    #[test]
    fn reserved_words_are_not_atoms() {
        assert!(parse_formula("since").is_err());
        assert!(parse_formula("always(a)").is_err());
        assert!(parse_ext_formula("always").is_err());
    }

    #[test]
    fn extended_syntax() {
        let e = |n: &str| ExtFormula::Atom(Atom::new(n).unwrap());
        assert_eq!(
            parse_ext_formula("always(a <-> I, b)").unwrap(),
            e("a").iff(ExtFormula::InitialConst.and(e("b"))).always()
        );
        assert_eq!(
            parse_ext_formula("a -> b -> c").unwrap(),
            e("a").implies(e("b").implies(e("c")))
        );
        assert_eq!(
            parse_ext_formula("wnext_always(F -> false)").unwrap(),
            ExtFormula::FinalConst
                .implies(ExtFormula::Falsum)
                .wnext_always()
        );
        assert_eq!(parse_ext_formula("true").unwrap(), ExtFormula::Verum);
        assert!(parse_ext_formula("a <-> b <-> c").is_err());
    }
}
