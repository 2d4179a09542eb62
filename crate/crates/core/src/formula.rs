//! Boolean formulas in conjunctive normal form: parsing, normalization,
//! the length measure `|Q|`, a brute-force satisfiability oracle, and the
//! bipartition-set compiler.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormulaError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("not in conjunctive normal form: {0}")]
    NotCnf(String),
    #[error("variable index {0} out of range 1..={1}")]
    VarOutOfRange(u32, u32),
    #[error("empty clause has no gadget")]
    EmptyClause,
    #[error("variable ids must be contiguous 1..=n; {0} never occurs")]
    MissingVariable(u32),
    #[error("too many variables for exhaustive enumeration: {0} > {1}")]
    TooManyVariables(u32, u32),
    #[error("bipartition is not a partition of 1..={0}")]
    BadBipartition(u32),
    #[error("empty bipartition set")]
    EmptyBipartitionSet,
}

/// A node of a fully parenthesized Boolean formula: every `And`/`Or` is
/// binary.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Node {
    Var(u32),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
}

impl Node {
    fn var(id: u32) -> Node {
        Node::Var(id)
    }

    /// Number of variable occurrences plus operator count; parentheses are
    /// never counted.
    pub fn length(&self) -> u64 {
        match self {
            Node::Var(_) => 1,
            Node::Not(a) => 1 + a.length(),
            Node::And(a, b) | Node::Or(a, b) => 1 + a.length() + b.length(),
        }
    }

    pub fn eval(&self, assignment: &Assignment) -> bool {
        match self {
            Node::Var(v) => assignment.get(*v),
            Node::Not(a) => !a.eval(assignment),
            Node::And(a, b) => a.eval(assignment) && b.eval(assignment),
            Node::Or(a, b) => a.eval(assignment) || b.eval(assignment),
        }
    }

    fn max_var(&self) -> u32 {
        match self {
            Node::Var(v) => *v,
            Node::Not(a) => a.max_var(),
            Node::And(a, b) | Node::Or(a, b) => a.max_var().max(b.max_var()),
        }
    }

    fn collect_vars(&self, seen: &mut BTreeSet<u32>) {
        match self {
            Node::Var(v) => {
                seen.insert(*v);
            }
            Node::Not(a) => a.collect_vars(seen),
            Node::And(a, b) | Node::Or(a, b) => {
                a.collect_vars(seen);
                b.collect_vars(seen);
            }
        }
    }

    fn check_cnf(&self) -> Result<(), FormulaError> {
        match self {
            Node::Var(_) => Ok(()),
            Node::Not(a) => match **a {
                Node::Var(_) => Ok(()),
                _ => Err(FormulaError::NotCnf(format!("negation above {a}"))),
            },
            Node::Or(a, b) => {
                for child in [a, b] {
                    if matches!(**child, Node::And(_, _)) {
                        return Err(FormulaError::NotCnf(format!("conjunction below a disjunction: {child}")));
                    }
                    child.check_cnf()?;
                }
                Ok(())
            }
            Node::And(a, b) => {
                a.check_cnf()?;
                b.check_cnf()
            }
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Var(v) => write!(f, "v{v}"),
            Node::Not(a) => write!(f, "~{a}"),
            Node::And(a, b) => write!(f, "({a} & {b})"),
            Node::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

/// A parsed formula over variables `1..=n`, each of which occurs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Formula {
    root: Node,
    n_vars: u32,
    names: Vec<String>,
}

impl Formula {
    pub fn new(root: Node) -> Result<Formula, FormulaError> {
        let n = root.max_var();
        let mut seen = BTreeSet::new();
        root.collect_vars(&mut seen);
        for v in 1..=n {
            if !seen.contains(&v) {
                return Err(FormulaError::MissingVariable(v));
            }
        }
        let names = (1..=n).map(|v| format!("v{v}")).collect();
        Ok(Formula { root, n_vars: n, names })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn n_vars(&self) -> u32 {
        self.n_vars
    }

    pub fn var_name(&self, id: u32) -> &str {
        &self.names[(id - 1) as usize]
    }

    /// `|Q|`: variable occurrences + negations + conjunctions + disjunctions.
    pub fn length(&self) -> u64 {
        self.root.length()
    }

    pub fn is_cnf(&self) -> bool {
        self.root.check_cnf().is_ok()
    }

    pub fn eval(&self, a: &Assignment) -> bool {
        self.root.eval(a)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(node: &Node, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
            match node {
                Node::Var(v) => write!(f, "{}", names[(*v - 1) as usize]),
                Node::Not(a) => {
                    write!(f, "~")?;
                    go(a, names, f)
                }
                Node::And(a, b) => {
                    write!(f, "(")?;
                    go(a, names, f)?;
                    write!(f, " & ")?;
                    go(b, names, f)?;
                    write!(f, ")")
                }
                Node::Or(a, b) => {
                    write!(f, "(")?;
                    go(a, names, f)?;
                    write!(f, " | ")?;
                    go(b, names, f)?;
                    write!(f, ")")
                }
            }
        }
        go(&self.root, &self.names, f)
    }
}

// ---------------------------------------------------------------------------
// Expression parser
// ---------------------------------------------------------------------------

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    LParen,
    RParen,
    End,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src, pos: 0 }
    }

    fn peek_tok(&self) -> Result<(Tok, usize, usize), FormulaError> {
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i] as char).is_whitespace() {
            i += 1;
        }
        if i >= bytes.len() {
            return Ok((Tok::End, i, i));
        }
        let rest = &self.src[i..];
        let (tok, len) = if rest.starts_with('~') || rest.starts_with('¬') {
            (Tok::Not, rest.chars().next().unwrap().len_utf8())
        } else if rest.starts_with('&') || rest.starts_with('∧') {
            (Tok::And, rest.chars().next().unwrap().len_utf8())
        } else if rest.starts_with('|') || rest.starts_with('∨') {
            (Tok::Or, rest.chars().next().unwrap().len_utf8())
        } else if rest.starts_with('(') {
            (Tok::LParen, 1)
        } else if rest.starts_with(')') {
            (Tok::RParen, 1)
        } else {
            let end = rest
                .char_indices()
                .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
                .map(|(j, _)| j)
                .unwrap_or(rest.len());
            if end == 0 {
                return Err(FormulaError::Syntax {
                    offset: i,
                    message: format!("unexpected character {:?}", rest.chars().next().unwrap()),
                });
            }
            (Tok::Ident(rest[..end].to_string()), end)
        };
        Ok((tok, i, i + len))
    }

    fn next_tok(&mut self) -> Result<(Tok, usize), FormulaError> {
        let (tok, start, end) = self.peek_tok()?;
        self.pos = end;
        Ok((tok, start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    vars: BTreeMap<String, u32>,
    names: Vec<String>,
}

impl<'a> Parser<'a> {
    // or_expr := and_expr ('|'... no: precedence '&' binds looser than '|'?
    // Conventional precedence: ~ > & > | would make "a|b&c" parse as
    // a|(b&c), which is never CNF. We use the usual logic convention
    // ~ > & > |? No: CNF inputs are written clause-and-clause, so '&' must
    // bind *looser* than '|': "a|c & b|c" groups as (a|c)&(b|c).
    fn parse_formula(&mut self) -> Result<Node, FormulaError> {
        let node = self.parse_and()?;
        let (tok, start) = self.lexer.next_tok()?;
        if tok != Tok::End {
            return Err(FormulaError::Syntax {
                offset: start,
                message: format!("unexpected trailing {tok:?}"),
            });
        }
        Ok(node)
    }

    fn parse_and(&mut self) -> Result<Node, FormulaError> {
        let mut node = self.parse_or()?;
        loop {
            let (tok, _, end) = self.lexer.peek_tok()?;
            if tok == Tok::And {
                self.lexer.pos = end;
                let rhs = self.parse_or()?;
                node = Node::And(Box::new(node), Box::new(rhs));
            } else {
                return Ok(node);
            }
        }
    }

    fn parse_or(&mut self) -> Result<Node, FormulaError> {
        let mut node = self.parse_atom()?;
        loop {
            let (tok, _, end) = self.lexer.peek_tok()?;
            if tok == Tok::Or {
                self.lexer.pos = end;
                let rhs = self.parse_atom()?;
                node = Node::Or(Box::new(node), Box::new(rhs));
            } else {
                return Ok(node);
            }
        }
    }

    fn parse_atom(&mut self) -> Result<Node, FormulaError> {
        let (tok, start) = self.lexer.next_tok()?;
        match tok {
            Tok::Not => Ok(Node::Not(Box::new(self.parse_atom()?))),
            Tok::LParen => {
                let inner = self.parse_and()?;
                let (tok, start) = self.lexer.next_tok()?;
                if tok != Tok::RParen {
                    return Err(FormulaError::Syntax {
                        offset: start,
                        message: "expected ')'".to_string(),
                    });
                }
                Ok(inner)
            }
            Tok::Ident(name) => {
                let next = (self.vars.len() + 1) as u32;
                let id = *self.vars.entry(name.clone()).or_insert_with(|| {
                    self.names.push(name);
                    next
                });
                Ok(Node::var(id))
            }
            other => Err(FormulaError::Syntax {
                offset: start,
                message: format!("expected a literal or '(', found {other:?}"),
            }),
        }
    }
}

/// Parses the `~ & |` expression syntax (UTF-8 `¬ ∧ ∨` accepted as
/// aliases). Unparenthesized chains associate to the left; non-CNF shapes
/// are accepted here and rejected by [`normalize_cnf`].
pub fn parse_expr(text: &str) -> Result<Formula, FormulaError> {
    let mut parser = Parser {
        lexer: Lexer::new(text),
        vars: BTreeMap::new(),
        names: Vec::new(),
    };
    let root = parser.parse_formula()?;
    let mut f = Formula::new(root)?;
    f.names = parser.names;
    Ok(f)
}

/// Parses standard DIMACS CNF. Clause literals become left-associated
/// `Or` chains, clauses a left-associated `And` chain.
pub fn parse_dimacs(text: &str) -> Result<Formula, FormulaError> {
    let mut n_vars: Option<u32> = None;
    let mut n_clauses: Option<usize> = None;
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let mut current: Vec<i64> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(FormulaError::Syntax {
                    offset: 0,
                    message: format!("malformed DIMACS header {line:?}"),
                });
            }
            n_vars = Some(parts[2].parse().map_err(|_| FormulaError::Syntax {
                offset: 0,
                message: "bad variable count".to_string(),
            })?);
            n_clauses = Some(parts[3].parse().map_err(|_| FormulaError::Syntax {
                offset: 0,
                message: "bad clause count".to_string(),
            })?);
            continue;
        }
        let n = n_vars.ok_or_else(|| FormulaError::Syntax {
            offset: 0,
            message: "clause before header".to_string(),
        })?;
        for word in line.split_whitespace() {
            let lit: i64 = word.parse().map_err(|_| FormulaError::Syntax {
                offset: 0,
                message: format!("bad literal {word:?}"),
            })?;
            if lit == 0 {
                if current.is_empty() {
                    return Err(FormulaError::EmptyClause);
                }
                clauses.push(std::mem::take(&mut current));
            } else {
                let v = lit.unsigned_abs() as u32;
                if v > n {
                    return Err(FormulaError::VarOutOfRange(v, n));
                }
                current.push(lit);
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    if let Some(m) = n_clauses {
        if clauses.len() != m {
            return Err(FormulaError::Syntax {
                offset: 0,
                message: format!("header declares {m} clauses, found {}", clauses.len()),
            });
        }
    }
    if clauses.is_empty() {
        return Err(FormulaError::EmptyClause);
    }
    let clause_nodes: Vec<Node> = clauses
        .iter()
        .map(|clause| {
            clause
                .iter()
                .map(|&lit| {
                    let v = Node::var(lit.unsigned_abs() as u32);
                    if lit < 0 {
                        Node::Not(Box::new(v))
                    } else {
                        v
                    }
                })
                .reduce(|a, b| Node::Or(Box::new(a), Box::new(b)))
                .unwrap()
        })
        .collect();
    let root = clause_nodes
        .into_iter()
        .reduce(|a, b| Node::And(Box::new(a), Box::new(b)))
        .unwrap();
    Formula::new(root)
}

/// Verifies the CNF shape (negation only on variables, no conjunction below
/// a disjunction) and returns the fully parenthesized binary tree unchanged.
/// Idempotent.
pub fn normalize_cnf(f: Formula) -> Result<Formula, FormulaError> {
    f.root.check_cnf()?;
    Ok(f)
}

// ---------------------------------------------------------------------------
// Assignments and the brute-force oracle
// ---------------------------------------------------------------------------

/// A total truth assignment over variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Assignment {
        Assignment { values }
    }

    pub fn from_bits(bits: u32, n: u32) -> Assignment {
        Assignment {
            values: (0..n).map(|i| bits >> i & 1 == 1).collect(),
        }
    }

    pub fn n_vars(&self) -> u32 {
        self.values.len() as u32
    }

    pub fn get(&self, var: u32) -> bool {
        self.values[(var - 1) as usize]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "v{}={}", i + 1, if *v { "T" } else { "F" })?;
        }
        Ok(())
    }
}

pub const BRUTE_FORCE_VAR_LIMIT: u32 = 24;

/// The exact set of satisfying assignments, by exhaustive enumeration.
pub fn brute_force_sat(f: &Formula) -> Result<BTreeSet<Assignment>, FormulaError> {
    let n = f.n_vars();
    if n > BRUTE_FORCE_VAR_LIMIT {
        return Err(FormulaError::TooManyVariables(n, BRUTE_FORCE_VAR_LIMIT));
    }
    let mut out = BTreeSet::new();
    for bits in 0..1u64 << n {
        let a = Assignment::from_bits(bits as u32, n);
        if f.eval(&a) {
            out.insert(a);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Bipartitions (Corollary on realizable boundary bipartition sets)
// ---------------------------------------------------------------------------

/// An ordered bipartition `{P+ | P-}` of `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    plus: BTreeSet<u32>,
    minus: BTreeSet<u32>,
    n: u32,
}

impl Bipartition {
    pub fn new(plus: BTreeSet<u32>, minus: BTreeSet<u32>, n: u32) -> Result<Bipartition, FormulaError> {
        let all: BTreeSet<u32> = (1..=n).collect();
        let union: BTreeSet<u32> = plus.union(&minus).copied().collect();
        if union != all || !plus.is_disjoint(&minus) {
            return Err(FormulaError::BadBipartition(n));
        }
        Ok(Bipartition { plus, minus, n })
    }

    pub fn from_plus(plus: BTreeSet<u32>, n: u32) -> Result<Bipartition, FormulaError> {
        if plus.iter().any(|&v| v == 0 || v > n) {
            return Err(FormulaError::BadBipartition(n));
        }
        let minus = (1..=n).filter(|v| !plus.contains(v)).collect();
        Bipartition::new(plus, minus, n)
    }

    pub fn plus(&self) -> &BTreeSet<u32> {
        &self.plus
    }

    pub fn minus(&self) -> &BTreeSet<u32> {
        &self.minus
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// The correspondence `i in P+ <=> v_i = true`.
    pub fn to_assignment(&self) -> Assignment {
        Assignment::new((1..=self.n).map(|v| self.plus.contains(&v)).collect())
    }

    pub fn from_assignment(a: &Assignment) -> Bipartition {
        let plus = (1..=a.n_vars()).filter(|&v| a.get(v)).collect();
        Bipartition::from_plus(plus, a.n_vars()).unwrap()
    }

    pub fn all(n: u32) -> Vec<Bipartition> {
        (0..1u64 << n)
            .map(|bits| {
                let plus = (1..=n).filter(|&v| bits >> (v - 1) & 1 == 1).collect();
                Bipartition::from_plus(plus, n).unwrap()
            })
            .collect()
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<u32>| {
            s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("")
        };
        write!(f, "{}|{}", list(&self.plus), list(&self.minus))
    }
}

/// Builds `Q(P) = ~OR{ q(P') : P' not in P }` with
/// `q(P') = AND{v_i : i in P'+} AND{~v_i : i in P'-}`, pushed to CNF by
/// De Morgan. Satisfying assignments of the result correspond exactly to
/// the members of `P` via `i in P+ <=> v_i = true`. When `P` contains every
/// ordered bipartition the complement is empty and a canonical tautology
/// `(v_1 | ~v_1) & ... & (v_n | ~v_n)` is returned.
pub fn compile_bipartitions(set: &BTreeSet<Bipartition>, n: u32) -> Result<Formula, FormulaError> {
    if set.is_empty() {
        return Err(FormulaError::EmptyBipartitionSet);
    }
    if set.iter().any(|p| p.n() != n) {
        return Err(FormulaError::BadBipartition(n));
    }
    let complement: Vec<Bipartition> = Bipartition::all(n)
        .into_iter()
        .filter(|p| !set.contains(p))
        .collect();
    let root = if complement.is_empty() {
        (1..=n)
            .map(|v| {
                Node::Or(
                    Box::new(Node::var(v)),
                    Box::new(Node::Not(Box::new(Node::var(v)))),
                )
            })
            .reduce(|a, b| Node::And(Box::new(a), Box::new(b)))
            .unwrap()
    } else {
        // ~q(P') is the clause OR{~v_i : i in P'+} OR{v_i : i in P'-}.
        complement
            .iter()
            .map(|p| {
                (1..=n)
                    .map(|v| {
                        if p.plus().contains(&v) {
                            Node::Not(Box::new(Node::var(v)))
                        } else {
                            Node::var(v)
                        }
                    })
                    .reduce(|a, b| Node::Or(Box::new(a), Box::new(b)))
                    .unwrap()
            })
            .reduce(|a, b| Node::And(Box::new(a), Box::new(b)))
            .unwrap()
    };
    normalize_cnf(Formula::new(root)?)
}
