//! Loop words, the identity DSL, and named property predicates.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! identity := expr '=' expr
//! expr     := term (('\' | '/') term)*      left-associative
//! term     := postfix ('*' postfix)*        left-associative
//! postfix  := atom ('^l' | '^r')*
//! atom     := [a-z]+ | '1' | '(' expr ')'
//! ```
//!
//! `x\y` is left division, `x/y` right division, `x^l = 1/x`, `x^r = x\1`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::structure::{find_associativity_violation, generate_subloop};
use crate::table::{Elem, ElemSet, LoopTable};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    One,
    Mul(Box<Term>, Box<Term>),
    LDiv(Box<Term>, Box<Term>),
    RDiv(Box<Term>, Box<Term>),
    /// `x^l = 1/x`
    LInv(Box<Term>),
    /// `x^r = x\1`
    RInv(Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn ldiv(a: Term, b: Term) -> Term {
        Term::LDiv(Box::new(a), Box::new(b))
    }

    pub fn rdiv(a: Term, b: Term) -> Term {
        Term::RDiv(Box::new(a), Box::new(b))
    }

    fn precedence(&self) -> u8 {
        match self {
            Term::LDiv(..) | Term::RDiv(..) => 1,
            Term::Mul(..) => 2,
            Term::LInv(_) | Term::RInv(_) => 3,
            Term::Var(_) | Term::One => 4,
        }
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::One => {}
            Term::Mul(a, b) | Term::LDiv(a, b) | Term::RDiv(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            Term::LInv(a) | Term::RInv(a) => a.collect_vars(out),
        }
    }

    /// Evaluates under `assign`, where `vars[i]` takes value `assign[i]`.
    pub fn eval(&self, q: &LoopTable, vars: &[String], assign: &[Elem]) -> Elem {
        Program::compile(self, vars).eval(q, assign)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &Term, op: &str, b: &Term, p: u8| {
            if a.precedence() < p {
                write!(f, "({a})")?;
            } else {
                write!(f, "{a}")?;
            }
            write!(f, "{op}")?;
            if b.precedence() <= p {
                write!(f, "({b})")
            } else {
                write!(f, "{b}")
            }
        };
        let postfix = |f: &mut fmt::Formatter<'_>, a: &Term, op: &str| {
            if a.precedence() < 3 {
                write!(f, "({a}){op}")
            } else {
                write!(f, "{a}{op}")
            }
        };
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::One => write!(f, "1"),
            Term::Mul(a, b) => binary(f, a, "*", b, 2),
            Term::LDiv(a, b) => binary(f, a, "\\", b, 1),
            Term::RDiv(a, b) => binary(f, a, "/", b, 1),
            Term::LInv(a) => postfix(f, a, "^l"),
            Term::RInv(a) => postfix(f, a, "^r"),
        }
    }
}

/// A universally quantified equation `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Identity {
    pub lhs: Term,
    pub rhs: Term,
    /// Distinct variables in alphabetical order; assignments follow this order.
    pub vars: Vec<String>,
}

impl Identity {
    pub fn new(lhs: Term, rhs: Term) -> Identity {
        let mut vars = Vec::new();
        lhs.collect_vars(&mut vars);
        rhs.collect_vars(&mut vars);
        vars.sort();
        Identity { lhs, rhs, vars }
    }

    /// True if the two sides agree under `assign`.
    pub fn holds_at(&self, q: &LoopTable, assign: &[Elem]) -> bool {
        let (l, r) = self.compile();
        l.eval(q, assign) == r.eval(q, assign)
    }

    pub(crate) fn compile(&self) -> (Program, Program) {
        (Program::compile(&self.lhs, &self.vars), Program::compile(&self.rhs, &self.vars))
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

impl FromStr for Identity {
    type Err = IdentityError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_identity(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentityError {
    #[error("syntax error at position {position}: expected one of {}", expected.join(", "))]
    Syntax { position: usize, expected: Vec<String> },
    #[error("{assignments} assignments exceed the limit of {limit}")]
    TooManyVariables { assignments: u128, limit: u128 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    One,
    Star,
    Backslash,
    Slash,
    Caret,
    LParen,
    RParen,
    Eq,
    End,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, IdentityError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'a'..=b'z' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_lowercase() {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
                continue;
            }
            b'1' => Tok::One,
            b'*' => Tok::Star,
            b'\\' => Tok::Backslash,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'=' => Tok::Eq,
            _ => {
                return Err(IdentityError::Syntax {
                    position: i,
                    expected: vec!["variable".into(), "1".into(), "operator".into(), "(".into(), ")".into()],
                })
            }
        };
        out.push((tok, i));
        i += 1;
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> usize {
        self.toks[self.pos].1
    }

    fn error(&self, expected: &[&str]) -> IdentityError {
        IdentityError::Syntax {
            position: self.here(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expr(&mut self) -> Result<Term, IdentityError> {
        let mut t = self.term()?;
        loop {
            match self.peek() {
                Tok::Backslash => {
                    self.pos += 1;
                    t = Term::ldiv(t, self.term()?);
                }
                Tok::Slash => {
                    self.pos += 1;
                    t = Term::rdiv(t, self.term()?);
                }
                _ => return Ok(t),
            }
        }
    }

    fn term(&mut self) -> Result<Term, IdentityError> {
        let mut t = self.postfix()?;
        while *self.peek() == Tok::Star {
            self.pos += 1;
            t = Term::mul(t, self.postfix()?);
        }
        Ok(t)
    }

    fn postfix(&mut self) -> Result<Term, IdentityError> {
        let mut t = self.atom()?;
        while *self.peek() == Tok::Caret {
            self.pos += 1;
            t = match self.peek() {
                Tok::Ident(s) if s == "l" => Term::LInv(Box::new(t)),
                Tok::Ident(s) if s == "r" => Term::RInv(Box::new(t)),
                _ => return Err(self.error(&["l", "r"])),
            };
            self.pos += 1;
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term, IdentityError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                self.pos += 1;
                Ok(Term::Var(name))
            }
            Tok::One => {
                self.pos += 1;
                Ok(Term::One)
            }
            Tok::LParen => {
                self.pos += 1;
                let t = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&[")", "*", "\\", "/", "^"]));
                }
                self.pos += 1;
                Ok(t)
            }
            _ => Err(self.error(&["variable", "1", "("])),
        }
    }
}

/// Parses `lhs = rhs` in the identity DSL.
pub fn parse_identity(src: &str) -> Result<Identity, IdentityError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let lhs = p.expr()?;
    if *p.peek() != Tok::Eq {
        return Err(p.error(&["=", "*", "\\", "/", "^"]));
    }
    p.pos += 1;
    let rhs = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["end of input", "*", "\\", "/", "^"]));
    }
    Ok(Identity::new(lhs, rhs))
}

/// Parses a single term (no `=`).
pub fn parse_term(src: &str) -> Result<Term, IdentityError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let t = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["end of input", "*", "\\", "/", "^"]));
    }
    Ok(t)
}

/// Postfix code for a term, evaluated on a small stack.
#[derive(Debug, Clone)]
pub(crate) struct Program {
    pub(crate) ops: Vec<Op>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Op {
    Var(usize),
    One,
    Mul,
    LDiv,
    RDiv,
    LInv,
    RInv,
}

impl Program {
    pub(crate) fn compile(t: &Term, vars: &[String]) -> Program {
        fn go(t: &Term, vars: &[String], ops: &mut Vec<Op>) {
            match t {
                Term::Var(v) => {
                    let i = vars.iter().position(|w| w == v).expect("variable listed");
                    ops.push(Op::Var(i));
                }
                Term::One => ops.push(Op::One),
                Term::Mul(a, b) | Term::LDiv(a, b) | Term::RDiv(a, b) => {
                    go(a, vars, ops);
                    go(b, vars, ops);
                    ops.push(match t {
                        Term::Mul(..) => Op::Mul,
                        Term::LDiv(..) => Op::LDiv,
                        _ => Op::RDiv,
                    });
                }
                Term::LInv(a) => {
                    go(a, vars, ops);
                    ops.push(Op::LInv);
                }
                Term::RInv(a) => {
                    go(a, vars, ops);
                    ops.push(Op::RInv);
                }
            }
        }
        let mut ops = Vec::new();
        go(t, vars, &mut ops);
        Program { ops }
    }

    #[inline]
    pub(crate) fn eval(&self, q: &LoopTable, assign: &[Elem]) -> Elem {
        let mut stack = [0usize; 32];
        let mut sp = 0;
        let mut heap: Vec<Elem> = Vec::new();
        if self.ops.len() > 32 {
            // deep terms fall back to a growable stack
            for op in &self.ops {
                step(q, assign, *op, &mut heap);
            }
            return heap[0];
        }
        for op in &self.ops {
            match *op {
                Op::Var(i) => {
                    stack[sp] = assign[i];
                    sp += 1;
                }
                Op::One => {
                    stack[sp] = 0;
                    sp += 1;
                }
                Op::LInv => stack[sp - 1] = q.linv(stack[sp - 1]),
                Op::RInv => stack[sp - 1] = q.rinv(stack[sp - 1]),
                Op::Mul | Op::LDiv | Op::RDiv => {
                    let (a, b) = (stack[sp - 2], stack[sp - 1]);
                    sp -= 1;
                    stack[sp - 1] = match *op {
                        Op::Mul => q.mul(a, b),
                        Op::LDiv => q.ldiv(a, b),
                        _ => q.rdiv(a, b),
                    };
                }
            }
        }
        stack[0]
    }
}

fn step(q: &LoopTable, assign: &[Elem], op: Op, st: &mut Vec<Elem>) {
    match op {
        Op::Var(i) => st.push(assign[i]),
        Op::One => st.push(0),
        Op::LInv => {
            let a = st.pop().unwrap();
            st.push(q.linv(a));
        }
        Op::RInv => {
            let a = st.pop().unwrap();
            st.push(q.rinv(a));
        }
        Op::Mul | Op::LDiv | Op::RDiv => {
            let b = st.pop().unwrap();
            let a = st.pop().unwrap();
            st.push(match op {
                Op::Mul => q.mul(a, b),
                Op::LDiv => q.ldiv(a, b),
                _ => q.rdiv(a, b),
            });
        }
    }
}

/// Default cap on `n^|vars|` for exhaustive identity checks.
pub const DEFAULT_ASSIGNMENT_LIMIT: u128 = 1_000_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub holds: bool,
    /// Lexicographically least violating assignment, in `Identity::vars` order.
    pub counterexample: Option<Vec<Elem>>,
}

pub fn check_identity(q: &LoopTable, id: &Identity) -> Result<CheckOutcome, IdentityError> {
    check_identity_with_limit(q, id, DEFAULT_ASSIGNMENT_LIMIT)
}

pub fn check_identity_with_limit(
    q: &LoopTable,
    id: &Identity,
    limit: u128,
) -> Result<CheckOutcome, IdentityError> {
    let n = q.order();
    let k = id.vars.len();
    let total = (n as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if total > limit {
        return Err(IdentityError::TooManyVariables { assignments: total, limit });
    }
    let (lhs, rhs) = id.compile();
    let scan = |first: Option<Elem>| -> Option<Vec<Elem>> {
        let mut assign = vec![0; k];
        let fixed = usize::from(first.is_some());
        if let Some(f) = first {
            assign[0] = f;
        }
        loop {
            if lhs.eval(q, &assign) != rhs.eval(q, &assign) {
                return Some(assign);
            }
            // odometer over positions fixed..k, last position fastest
            let mut i = k;
            loop {
                if i == fixed {
                    return None;
                }
                i -= 1;
                assign[i] += 1;
                if assign[i] < n {
                    break;
                }
                assign[i] = 0;
            }
        }
    };
    let counterexample = if k == 0 {
        scan(None)
    } else if total < 50_000 {
        (0..n).find_map(|x| scan(Some(x)))
    } else {
        (0..n).into_par_iter().find_map_first(|x| scan(Some(x)))
    };
    Ok(CheckOutcome { holds: counterexample.is_none(), counterexample })
}

/// Named laws in DSL form.
pub mod laws {
    pub const ASSOCIATIVE: &str = "x*(y*z) = (x*y)*z";
    pub const COMMUTATIVE: &str = "x*y = y*x";
    pub const FLEXIBLE: &str = "x*(y*x) = (x*y)*x";
    pub const LEFT_ALTERNATIVE: &str = "x*(x*y) = (x*x)*y";
    pub const RIGHT_ALTERNATIVE: &str = "(y*x)*x = y*(x*x)";
    pub const MOUFANG: &str = "(x*y)*(z*x) = (x*(y*z))*x";
    /// Fenyves' extra law.
    pub const EXTRA: &str = "x*(y*(z*x)) = ((x*y)*z)*x";
    /// `x * yz = f(x,y) * xz`
    pub const RCC: &str = "x*(y*z) = ((x*y)/x)*(x*z)";
    /// `zy * x = zx * g(x,y)`
    pub const LCC: &str = "(z*y)*x = (z*x)*(x\\(y*x))";
    /// RCC with `f(x,y) = x * y x^r`, valid in every CC-loop.
    pub const RCC_ROWS: &str = "x*(y*z) = (x*(y*x^r))*(x*z)";
    /// LCC with `g(x,y) = x^l y * x`, valid in every CC-loop.
    pub const LCC_COLUMNS: &str = "(z*y)*x = (z*x)*((x^l*y)*x)";
    pub const CUBE_ASSOCIATIVE: &str = "x*(x*x) = (x*x)*x";
    pub const TWO_SIDED_INVERSE: &str = "x^l = x^r";
    pub const INVERSE_AUTOMORPHIC: &str = "(x*y)^r = x^r*y^r";
    pub const AAIP: &str = "(x*y)^r = y^r*x^r";
    /// `lambda R_x rho = L_x^-1`, applied to `y`.
    pub const WIP: &str = "(y^l*x)^r = x\\y";
    pub const EXPONENT_TWO: &str = "x*x = 1";
    pub const EXPONENT_THREE: &str = "x*(x*x) = 1";
}

pub(crate) fn law(src: &str) -> Identity {
    parse_identity(src).expect("built-in law parses")
}

fn holds(q: &LoopTable, src: &str) -> bool {
    first_violation(q, src).is_none()
}

fn first_violation(q: &LoopTable, src: &str) -> Option<Vec<Elem>> {
    check_identity_with_limit(q, &law(src), u128::MAX)
        .expect("no limit")
        .counterexample
}

pub fn is_group(q: &LoopTable) -> bool {
    find_associativity_violation(q, &ElemSet::full(q.order())).is_none()
}

pub fn is_commutative(q: &LoopTable) -> bool {
    q.elements().all(|x| (0..x).all(|y| q.mul(x, y) == q.mul(y, x)))
}

pub fn is_flexible(q: &LoopTable) -> bool {
    holds(q, laws::FLEXIBLE)
}

pub fn is_left_alternative(q: &LoopTable) -> bool {
    holds(q, laws::LEFT_ALTERNATIVE)
}

pub fn is_right_alternative(q: &LoopTable) -> bool {
    holds(q, laws::RIGHT_ALTERNATIVE)
}

pub fn is_moufang(q: &LoopTable) -> bool {
    holds(q, laws::MOUFANG)
}

/// Fenyves' identity `x(y·zx) = (xy·z)x`.
pub fn is_extra(q: &LoopTable) -> bool {
    holds(q, laws::EXTRA)
}

/// Right conjugacy closure, `x·yz = f(x,y)·xz` with `f(x,y) = (xy)/x`.
pub fn is_rcc(q: &LoopTable) -> bool {
    let n = q.order();
    let row_ok = |x: Elem| {
        (0..n).all(|y| {
            let f = q.f(x, y);
            (0..n).all(|z| q.mul(x, q.mul(y, z)) == q.mul(f, q.mul(x, z)))
        })
    };
    if n < 64 {
        (0..n).all(row_ok)
    } else {
        (0..n).into_par_iter().all(row_ok)
    }
}

/// Left conjugacy closure, `zy·x = zx·g(x,y)` with `g(x,y) = x\(yx)`.
pub fn is_lcc(q: &LoopTable) -> bool {
    let n = q.order();
    let row_ok = |x: Elem| {
        (0..n).all(|y| {
            let g = q.g(x, y);
            (0..n).all(|z| q.mul(q.mul(z, y), x) == q.mul(q.mul(z, x), g))
        })
    };
    if n < 64 {
        (0..n).all(row_ok)
    } else {
        (0..n).into_par_iter().all(row_ok)
    }
}

pub fn is_cc(q: &LoopTable) -> bool {
    is_rcc(q) && is_lcc(q)
}

/// CC via conjugation: every `L_x^-1 L_y L_x` is a left translation and
/// every `R_x^-1 R_y R_x` a right translation.
pub fn is_cc_by_conjugation(q: &LoopTable) -> bool {
    let lefts: Vec<_> = q.elements().map(|x| q.left(x)).collect();
    let rights: Vec<_> = q.elements().map(|x| q.right(x)).collect();
    let closed = |ts: &[crate::table::Perm]| {
        ts.iter().all(|tx| {
            let inv = tx.inverse();
            ts.iter().all(|ty| {
                let c = inv.then(ty).then(tx);
                // a translation is determined by the image of the identity
                c == ts[c.apply(0)]
            })
        })
    };
    closed(&lefts) && closed(&rights)
}

/// `a` is power-associative iff `<a>` is a group.
pub fn is_pa_element(q: &LoopTable, a: Elem) -> bool {
    let h = generate_subloop(q, &ElemSet::from_slice(q.order(), &[a]));
    find_associativity_violation(q, &h.members).is_none()
}

/// Shortcut valid in CC-loops: `a` is power-associative iff `1/a = a\1`.
pub fn is_pa_element_cc(q: &LoopTable, a: Elem) -> bool {
    q.linv(a) == q.rinv(a)
}

/// Uses the inverse-map shortcut when `q` is CC, checked against the
/// general closure test in debug builds.
pub fn is_pa(q: &LoopTable) -> bool {
    if is_cc(q) {
        let fast = q.elements().all(|a| is_pa_element_cc(q, a));
        debug_assert_eq!(fast, q.elements().all(|a| is_pa_element(q, a)));
        fast
    } else {
        q.elements().all(|a| is_pa_element(q, a))
    }
}

/// Witness that some `<x,y>` is not a group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiassociativityWitness {
    pub x: Elem,
    pub y: Elem,
    /// A non-associating triple inside `<x,y>`.
    pub triple: (Elem, Elem, Elem),
}

pub fn diassociativity_violation(q: &LoopTable) -> Option<DiassociativityWitness> {
    let n = q.order();
    let mut groups: Vec<ElemSet> = Vec::new();
    for x in 0..n {
        for y in x..n {
            if groups.iter().any(|g| g.contains(x) && g.contains(y)) {
                continue;
            }
            let h = generate_subloop(q, &ElemSet::from_slice(n, &[x, y]));
            match find_associativity_violation(q, &h.members) {
                Some(triple) => return Some(DiassociativityWitness { x, y, triple }),
                None => groups.push(h.members),
            }
        }
    }
    None
}

pub fn is_diassociative(q: &LoopTable) -> bool {
    diassociativity_violation(q).is_none()
}

/// The four equivalent forms of "c is a WIP element":
/// `lambda R_c rho = L_c^-1`, `rho L_c lambda = R_c^-1`,
/// `R_c rho L_c = rho`, `L_c lambda R_c = lambda`.
pub fn wip_forms(q: &LoopTable, c: Elem) -> [bool; 4] {
    let (lambda, rho) = q.inverse_maps();
    let (lc, rc) = q.translations(c);
    [
        lambda.then(&rc).then(&rho) == lc.inverse(),
        rho.then(&lc).then(&lambda) == rc.inverse(),
        rc.then(&rho).then(&lc) == rho,
        lc.then(&lambda).then(&rc) == lambda,
    ]
}

pub fn is_wip_element(q: &LoopTable, c: Elem) -> bool {
    // (1/y * c) \ 1 == c \ y for all y
    q.elements().all(|y| q.rinv(q.mul(q.linv(y), c)) == q.ldiv(c, y))
}

pub fn wip_elements(q: &LoopTable) -> ElemSet {
    ElemSet::from_iter(
        q.order(),
        q.elements().filter(|&c| {
            let wip = is_wip_element(q, c);
            debug_assert!(wip_forms(q, c).iter().all(|&f| f == wip));
            wip
        }),
    )
}

pub fn has_wip(q: &LoopTable) -> bool {
    q.elements().all(|c| is_wip_element(q, c))
}

/// `rho = lambda` and `J = rho` is an automorphism.
pub fn has_aip(q: &LoopTable) -> bool {
    holds(q, laws::TWO_SIDED_INVERSE) && holds(q, laws::INVERSE_AUTOMORPHIC)
}

pub fn has_aaip(q: &LoopTable) -> bool {
    holds(q, laws::AAIP)
}

pub fn is_boolean_group(q: &LoopTable) -> bool {
    is_group(q) && q.elements().all(|x| q.mul(x, x) == 0)
}

/// Classification flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    Loop,
    Group,
    Cc,
    Extra,
    Moufang,
    Flexible,
    LeftAlt,
    RightAlt,
    Pa,
    Diassociative,
    Wip,
    Aip,
    Aaip,
    Commutative,
    BooleanGroup,
}

impl Property {
    pub const ALL: [Property; 15] = [
        Property::Loop,
        Property::Group,
        Property::Cc,
        Property::Extra,
        Property::Moufang,
        Property::Flexible,
        Property::LeftAlt,
        Property::RightAlt,
        Property::Pa,
        Property::Diassociative,
        Property::Wip,
        Property::Aip,
        Property::Aaip,
        Property::Commutative,
        Property::BooleanGroup,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::Loop => "loop",
            Property::Group => "group",
            Property::Cc => "cc",
            Property::Extra => "extra",
            Property::Moufang => "moufang",
            Property::Flexible => "flexible",
            Property::LeftAlt => "left_alt",
            Property::RightAlt => "right_alt",
            Property::Pa => "pa",
            Property::Diassociative => "diassociative",
            Property::Wip => "wip",
            Property::Aip => "aip",
            Property::Aaip => "aaip",
            Property::Commutative => "commutative",
            Property::BooleanGroup => "boolean_group",
        }
    }

    /// Evaluates the flag directly.
    pub fn holds(self, q: &LoopTable) -> bool {
        match self {
            Property::Loop => true,
            Property::Group => is_group(q),
            Property::Cc => is_cc(q),
            Property::Extra => is_extra(q),
            Property::Moufang => is_moufang(q),
            Property::Flexible => is_flexible(q),
            Property::LeftAlt => is_left_alternative(q),
            Property::RightAlt => is_right_alternative(q),
            Property::Pa => is_pa(q),
            Property::Diassociative => is_diassociative(q),
            Property::Wip => has_wip(q),
            Property::Aip => has_aip(q),
            Property::Aaip => has_aaip(q),
            Property::Commutative => is_commutative(q),
            Property::BooleanGroup => is_boolean_group(q),
        }
    }

    /// Identities every loop with this property satisfies. Used by the model
    /// finder for propagation; a complete table is still checked with
    /// [`Property::holds`].
    pub fn implied_laws(self) -> &'static [&'static str] {
        match self {
            Property::Loop => &[],
            Property::Group => &[laws::ASSOCIATIVE],
            Property::Cc => &[laws::RCC, laws::LCC],
            Property::Extra => &[laws::EXTRA, laws::RCC, laws::LCC],
            Property::Moufang => &[laws::MOUFANG],
            Property::Flexible => &[laws::FLEXIBLE],
            Property::LeftAlt => &[laws::LEFT_ALTERNATIVE],
            Property::RightAlt => &[laws::RIGHT_ALTERNATIVE],
            Property::Pa => &[laws::CUBE_ASSOCIATIVE, laws::TWO_SIDED_INVERSE],
            Property::Diassociative => &[
                laws::FLEXIBLE,
                laws::LEFT_ALTERNATIVE,
                laws::RIGHT_ALTERNATIVE,
                laws::TWO_SIDED_INVERSE,
            ],
            Property::Wip => &[laws::WIP],
            Property::Aip => &[laws::TWO_SIDED_INVERSE, laws::INVERSE_AUTOMORPHIC],
            Property::Aaip => &[laws::AAIP],
            Property::Commutative => &[laws::COMMUTATIVE],
            Property::BooleanGroup => &[laws::ASSOCIATIVE, laws::EXPONENT_TWO],
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        let p = match key.as_str() {
            "associative" => Property::Group,
            "power_associative" => Property::Pa,
            "left_alternative" => Property::LeftAlt,
            "right_alternative" => Property::RightAlt,
            other => *Property::ALL
                .iter()
                .find(|p| p.name() == other)
                .ok_or_else(|| format!("unknown property {s:?}"))?,
        };
        Ok(p)
    }
}

/// Evidence that a property fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// A DSL identity, or one of `"pa"`, `"diassociative"`, `"wip"`.
    pub law: String,
    pub elems: Vec<Elem>,
}

impl Witness {
    fn identity(q: &LoopTable, src: &str) -> Option<Witness> {
        first_violation(q, src).map(|elems| Witness { law: src.to_string(), elems })
    }

    /// True if the witness exhibits a genuine violation in `q`.
    pub fn recheck(&self, q: &LoopTable) -> bool {
        let n = q.order();
        if self.elems.iter().any(|&e| e >= n) {
            return false;
        }
        match self.law.as_str() {
            "pa" => {
                let [a, x, y, z] = self.elems[..] else { return false };
                let h = generate_subloop(q, &ElemSet::from_slice(n, &[a]));
                [x, y, z].iter().all(|&e| h.members.contains(e))
                    && q.mul(x, q.mul(y, z)) != q.mul(q.mul(x, y), z)
            }
            "diassociative" => {
                let [a, b, x, y, z] = self.elems[..] else { return false };
                let h = generate_subloop(q, &ElemSet::from_slice(n, &[a, b]));
                [x, y, z].iter().all(|&e| h.members.contains(e))
                    && q.mul(x, q.mul(y, z)) != q.mul(q.mul(x, y), z)
            }
            "wip" => self.elems.len() == 1 && !is_wip_element(q, self.elems[0]),
            src => match parse_identity(src) {
                Ok(id) => self.elems.len() == id.vars.len() && !id.holds_at(q, &self.elems),
                Err(_) => false,
            },
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elems.iter().map(|e| e.to_string()).collect();
        write!(f, "{} at ({})", self.law, parts.join(","))
    }
}

/// All classification flags, with a witness for every false one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyReport {
    pub flags: BTreeMap<Property, bool>,
    pub witnesses: BTreeMap<Property, Witness>,
}

impl PropertyReport {
    pub fn get(&self, p: Property) -> bool {
        self.flags[&p]
    }
}

fn group_witness(q: &LoopTable) -> Option<Witness> {
    find_associativity_violation(q, &ElemSet::full(q.order())).map(|(x, y, z)| Witness {
        law: laws::ASSOCIATIVE.to_string(),
        elems: vec![x, y, z],
    })
}

fn pa_witness(q: &LoopTable) -> Option<Witness> {
    q.elements().find_map(|a| {
        let h = generate_subloop(q, &ElemSet::from_slice(q.order(), &[a]));
        find_associativity_violation(q, &h.members).map(|(x, y, z)| Witness {
            law: "pa".into(),
            elems: vec![a, x, y, z],
        })
    })
}

pub fn classify(q: &LoopTable) -> PropertyReport {
    let mut witnesses = BTreeMap::new();
    let mut flags = BTreeMap::new();
    let mut record = |p: Property, w: Option<Witness>| {
        flags.insert(p, w.is_none());
        if let Some(w) = w {
            witnesses.insert(p, w);
        }
    };
    let group = group_witness(q);
    let is_grp = group.is_none();
    record(Property::Loop, None);
    record(Property::Group, group.clone());
    let cc = Witness::identity(q, laws::RCC).or_else(|| Witness::identity(q, laws::LCC));
    let cc_flag = cc.is_none();
    debug_assert_eq!(cc_flag, is_cc_by_conjugation(q));
    record(Property::Cc, cc);
    let moufang = Witness::identity(q, laws::MOUFANG);
    let moufang_flag = moufang.is_none();
    record(Property::Moufang, moufang);
    let extra = Witness::identity(q, laws::EXTRA);
    debug_assert_eq!(extra.is_none(), cc_flag && moufang_flag);
    record(Property::Extra, extra);
    record(Property::Flexible, Witness::identity(q, laws::FLEXIBLE));
    record(Property::LeftAlt, Witness::identity(q, laws::LEFT_ALTERNATIVE));
    record(Property::RightAlt, Witness::identity(q, laws::RIGHT_ALTERNATIVE));
    record(Property::Pa, pa_witness(q));
    record(
        Property::Diassociative,
        diassociativity_violation(q).map(|w| Witness {
            law: "diassociative".into(),
            elems: vec![w.x, w.y, w.triple.0, w.triple.1, w.triple.2],
        }),
    );
    record(
        Property::Wip,
        q.elements()
            .find(|&c| !is_wip_element(q, c))
            .map(|c| Witness { law: "wip".into(), elems: vec![c] }),
    );
    record(
        Property::Aip,
        Witness::identity(q, laws::TWO_SIDED_INVERSE)
            .or_else(|| Witness::identity(q, laws::INVERSE_AUTOMORPHIC)),
    );
    record(Property::Aaip, Witness::identity(q, laws::AAIP));
    let comm = Witness::identity(q, laws::COMMUTATIVE);
    record(Property::Commutative, comm);
    let boolean = if is_grp { Witness::identity(q, laws::EXPONENT_TWO) } else { group };
    record(Property::BooleanGroup, boolean);
    PropertyReport { flags, witnesses }
}
