//! Finite model search: backtracking Latin-square completion with
//! constraint propagation and least-number symmetry breaking.
//!
//! Required properties contribute the identities they imply to the
//! propagator; every complete table is then checked exactly. A forbidden
//! `associative` is handled by fixing a witness triple `a(bc) != (ab)c` on
//! the smallest labels, one equality pattern at a time.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::identities::{check_identity, laws, parse_identity, Identity, Property, Term};
use crate::structure::find_isomorphism;
use crate::table::LoopTable;

/// Bitmask domains cap the order at 64.
pub const HARD_ORDER_LIMIT: usize = 64;
pub const DEFAULT_MAX_ORDER: usize = 32;

const NONE: u8 = u8::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("no model exists ({0})")]
    Unsatisfiable(SearchStats),
    #[error("order {order} exceeds the search limit {limit}")]
    OrderTooLarge { order: usize, limit: usize },
    #[error("spec line {line}: {message}")]
    BadSpec { line: usize, message: String },
}

/// A required or forbidden condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    Property(Property),
    Identity(Identity),
}

impl Constraint {
    pub fn holds(&self, q: &LoopTable) -> bool {
        match self {
            Constraint::Property(p) => p.holds(q),
            Constraint::Identity(id) => check_identity(q, id).map(|o| o.holds).unwrap_or(false),
        }
    }

    fn laws(&self) -> Vec<Identity> {
        match self {
            Constraint::Property(p) => p.implied_laws().iter().map(|s| parse_identity(s).expect("built-in law")).collect(),
            Constraint::Identity(id) => vec![id.clone()],
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Property(p) => write!(f, "{p}"),
            Constraint::Identity(id) => write!(f, "{id}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Symmetry {
    /// Only the identity row and column are fixed.
    None,
    /// Least-number heuristic: labels never used so far are interchangeable,
    /// so only the smallest of them is tried.
    #[default]
    Lnh,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchSpec {
    pub order: usize,
    pub require: Vec<Constraint>,
    pub forbid: Vec<Constraint>,
    /// Stop after this many distinct models; `0` means no limit.
    pub limit: usize,
    pub iso_reduce: bool,
    /// Seeds the value-order shuffle.
    pub seed: u64,
    pub symmetry: Symmetry,
    pub max_order: usize,
    pub time_limit: Option<Duration>,
    /// With a positive `limit`, search in restarted runs of growing node
    /// budgets instead of one depth-first pass.
    pub restarts: bool,
}

impl SearchSpec {
    pub fn new(order: usize) -> Self {
        SearchSpec {
            order,
            require: Vec::new(),
            forbid: Vec::new(),
            limit: 0,
            iso_reduce: false,
            seed: 0,
            symmetry: Symmetry::Lnh,
            max_order: DEFAULT_MAX_ORDER,
            time_limit: None,
            restarts: true,
        }
    }

    pub fn require(mut self, items: &str) -> Result<Self, SearchError> {
        for item in split_items(items) {
            let (forbid, c) = parse_constraint(item).map_err(|message| SearchError::BadSpec { line: 0, message })?;
            if forbid {
                self.forbid.push(c)
            } else {
                self.require.push(c)
            }
        }
        Ok(self)
    }

    pub fn forbid(mut self, items: &str) -> Result<Self, SearchError> {
        for item in split_items(items) {
            let (negated, c) = parse_constraint(item).map_err(|message| SearchError::BadSpec { line: 0, message })?;
            if negated {
                self.require.push(c)
            } else {
                self.forbid.push(c)
            }
        }
        Ok(self)
    }

    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn symmetry(mut self, symmetry: Symmetry) -> Self {
        self.symmetry = symmetry;
        self
    }

    pub fn iso_reduce(mut self, on: bool) -> Self {
        self.iso_reduce = on;
        self
    }

    pub fn restarts(mut self, on: bool) -> Self {
        self.restarts = on;
        self
    }

    pub fn time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    fn forbids_associativity(&self) -> bool {
        self.forbid.iter().any(|c| matches!(c, Constraint::Property(Property::Group)))
    }
}

fn split_items(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

/// Returns `(negated, constraint)`; `nonassociative` is a negated
/// `associative`, `exponent-k` is `x^k = 1`.
fn parse_constraint(item: &str) -> Result<(bool, Constraint), String> {
    if item.contains('=') {
        return parse_identity(item).map(|id| (false, Constraint::Identity(id))).map_err(|e| e.to_string());
    }
    let key = item.to_ascii_lowercase().replace('-', "_");
    match key.as_str() {
        "nonassociative" | "non_associative" => return Ok((true, Constraint::Property(Property::Group))),
        "exponent_2" => return Ok((false, Constraint::Identity(parse_identity(laws::EXPONENT_TWO).unwrap()))),
        "exponent_3" => return Ok((false, Constraint::Identity(parse_identity(laws::EXPONENT_THREE).unwrap()))),
        _ => {}
    }
    Property::from_str(item).map(|p| (false, Constraint::Property(p)))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("{key}: expected true/false, got `{value}`")),
    }
}

impl FromStr for SearchSpec {
    type Err = SearchError;

    /// `key = value` lines: `order`, `require`, `forbid`, `limit`,
    /// `iso_reduce`, `seed`, `symmetry`, `max_order`, `restarts`, `time_limit`
    /// (seconds). `#` starts a comment.
    fn from_str(src: &str) -> Result<Self, Self::Err> {
        let mut spec = SearchSpec::new(0);
        let mut have_order = false;
        for (i, raw) in src.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| SearchError::BadSpec { line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| bad("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<u64>().map_err(|_| bad(format!("{key}: expected a number, got `{v}`")));
            match key {
                "order" => {
                    spec.order = num(value)? as usize;
                    have_order = true;
                }
                "require" | "forbid" => {
                    for item in split_items(value) {
                        let (neg, c) = parse_constraint(item).map_err(bad)?;
                        if (key == "forbid") != neg {
                            spec.forbid.push(c)
                        } else {
                            spec.require.push(c)
                        }
                    }
                }
                "limit" => spec.limit = num(value)? as usize,
                "seed" => spec.seed = num(value)?,
                "max_order" => spec.max_order = num(value)? as usize,
                "restarts" => spec.restarts = parse_bool(key, value).map_err(bad)?,
                "time_limit" => spec.time_limit = Some(Duration::from_secs(num(value)?)),
                "iso_reduce" => spec.iso_reduce = parse_bool(key, value).map_err(bad)?,
                "symmetry" => {
                    spec.symmetry = match value {
                        "none" => Symmetry::None,
                        "lnh" => Symmetry::Lnh,
                        _ => return Err(bad(format!("symmetry: expected none/lnh, got `{value}`"))),
                    }
                }
                _ => return Err(bad(format!("unknown key `{key}`"))),
            }
        }
        if !have_order || spec.order == 0 {
            return Err(SearchError::BadSpec { line: 0, message: "missing or zero `order`".into() });
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub propagations: u64,
    pub models: usize,
    pub elapsed: Duration,
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nodes={} propagations={} models={} time={:.3}s",
            self.nodes,
            self.propagations,
            self.models,
            self.elapsed.as_secs_f64()
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    /// The whole (symmetry-reduced) space was explored.
    Exhausted,
    /// Stopped at `limit` models; more may exist.
    LimitReached,
    /// Stopped at the time limit.
    TimedOut,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub models: Vec<LoopTable>,
    pub stats: SearchStats,
    pub status: SearchStatus,
}

/// Signals an empty domain or a violated constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("conflict at cell ({row}, {col})")]
pub struct Conflict {
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Var(u8),
    One,
    Mul(u16, u16),
    LDiv(u16, u16),
    RDiv(u16, u16),
    LInv(u16),
    RInv(u16),
}

/// A term flattened into an arena; the root is the last node.
#[derive(Debug, Clone)]
struct Flat {
    nodes: Vec<Node>,
}

impl Flat {
    fn new(t: &Term, vars: &[String]) -> Flat {
        let mut f = Flat { nodes: Vec::new() };
        f.push(t, vars);
        f
    }

    fn push(&mut self, t: &Term, vars: &[String]) -> u16 {
        let node = match t {
            Term::Var(v) => Node::Var(vars.iter().position(|w| w == v).expect("variable listed") as u8),
            Term::One => Node::One,
            Term::Mul(a, b) => Node::Mul(self.push(a, vars), self.push(b, vars)),
            Term::LDiv(a, b) => Node::LDiv(self.push(a, vars), self.push(b, vars)),
            Term::RDiv(a, b) => Node::RDiv(self.push(a, vars), self.push(b, vars)),
            Term::LInv(a) => Node::LInv(self.push(a, vars)),
            Term::RInv(a) => Node::RInv(self.push(a, vars)),
        };
        self.nodes.push(node);
        (self.nodes.len() - 1) as u16
    }

    fn root(&self) -> u16 {
        (self.nodes.len() - 1) as u16
    }
}

/// A law prepared for ground-instance propagation.
#[derive(Debug, Clone)]
struct Law {
    arity: usize,
    lhs: Flat,
    rhs: Flat,
    /// `levels[side][l]`: nodes whose highest variable is `l`, children first.
    levels: [Vec<Vec<u16>>; 2],
}

impl Law {
    fn new(id: &Identity) -> Law {
        let arity = id.vars.len();
        let lhs = Flat::new(&id.lhs, &id.vars);
        let rhs = Flat::new(&id.rhs, &id.vars);
        let levels = [Self::levels(&lhs, arity), Self::levels(&rhs, arity)];
        Law { arity, lhs, rhs, levels }
    }

    fn levels(t: &Flat, arity: usize) -> Vec<Vec<u16>> {
        let mut level = vec![0usize; t.nodes.len()];
        let mut out = vec![Vec::new(); arity.max(1)];
        for (i, node) in t.nodes.iter().enumerate() {
            level[i] = match *node {
                Node::Var(v) => v as usize,
                Node::One => 0,
                Node::Mul(a, b) | Node::LDiv(a, b) | Node::RDiv(a, b) => level[a as usize].max(level[b as usize]),
                Node::LInv(a) | Node::RInv(a) => level[a as usize],
            };
            out[level[i]].push(i as u16);
        }
        out
    }
}

const NOVAL: usize = usize::MAX;

/// Constraints understood by [`PartialTable::propagate`].
#[derive(Debug, Clone, Default)]
pub struct Constraints {
    laws: Vec<Law>,
    /// Ground `lhs != rhs` with all variables fixed.
    disequalities: Vec<(Flat, Flat, Vec<u8>)>,
}

impl Constraints {
    pub fn new(identities: &[Identity]) -> Self {
        Constraints { laws: identities.iter().map(Law::new).collect(), disequalities: Vec::new() }
    }

    pub fn from_required(required: &[Constraint]) -> Self {
        let mut ids: Vec<Identity> = Vec::new();
        for c in required {
            for id in c.laws() {
                if !ids.contains(&id) {
                    ids.push(id);
                }
            }
        }
        Self::new(&ids)
    }

    /// Adds `a(bc) != (ab)c` for fixed `a, b, c`.
    pub fn with_nonassociative_triple(mut self, a: usize, b: usize, c: usize) -> Self {
        let id = parse_identity(laws::ASSOCIATIVE).expect("built-in law");
        let (l, r) = (Flat::new(&id.lhs, &id.vars), Flat::new(&id.rhs, &id.vars));
        self.disequalities.push((l, r, vec![a as u8, b as u8, c as u8]));
        self
    }
}

/// A partially filled Cayley table with cell domains.
#[derive(Debug, Clone)]
pub struct PartialTable {
    n: usize,
    cells: Vec<u8>,
    dom: Vec<u64>,
    /// `row_pos[r*n + v]` is the column holding `v` in row `r`.
    row_pos: Vec<u8>,
    /// `col_pos[c*n + v]` is the row holding `v` in column `c`.
    col_pos: Vec<u8>,
    filled: usize,
    /// Largest label mentioned so far.
    mdn: usize,
    pending: Vec<(usize, usize)>,
}

impl PartialTable {
    /// Identity row and column filled; everything else open.
    pub fn new(n: usize) -> Result<Self, Conflict> {
        assert!((1..=HARD_ORDER_LIMIT).contains(&n), "order must be in 1..=64");
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let mut t = PartialTable {
            n,
            cells: vec![NONE; n * n],
            dom: vec![full; n * n],
            row_pos: vec![NONE; n * n],
            col_pos: vec![NONE; n * n],
            filled: 0,
            mdn: 0,
            pending: Vec::new(),
        };
        for i in 0..n {
            t.set(0, i, i)?;
            t.set(i, 0, i)?;
        }
        t.mdn = 0;
        Ok(t)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn value(&self, r: usize, c: usize) -> Option<usize> {
        let v = self.cells[r * self.n + c];
        (v != NONE).then_some(v as usize)
    }

    pub fn domain(&self, r: usize, c: usize) -> Vec<usize> {
        let d = self.dom[r * self.n + c];
        (0..self.n).filter(|&v| d >> v & 1 == 1).collect()
    }

    pub fn is_complete(&self) -> bool {
        self.filled == self.n * self.n
    }

    pub fn to_table(&self) -> Option<LoopTable> {
        if !self.is_complete() {
            return None;
        }
        LoopTable::from_fn(self.n, |x, y| self.cells[x * self.n + y] as usize).ok()
    }

    /// Places `v` at `(r, c)` and updates row/column domains.
    pub fn set(&mut self, r: usize, c: usize, v: usize) -> Result<bool, Conflict> {
        let n = self.n;
        let i = r * n + c;
        let conflict = Conflict { row: r, col: c };
        if self.cells[i] != NONE {
            return if self.cells[i] as usize == v { Ok(false) } else { Err(conflict) };
        }
        if self.dom[i] >> v & 1 == 0 || self.row_pos[r * n + v] != NONE || self.col_pos[c * n + v] != NONE {
            return Err(conflict);
        }
        self.cells[i] = v as u8;
        self.dom[i] = 1 << v;
        self.row_pos[r * n + v] = c as u8;
        self.col_pos[c * n + v] = r as u8;
        self.filled += 1;
        self.mdn = self.mdn.max(r).max(c).max(v);
        let bit = !(1u64 << v);
        for k in 0..n {
            for j in [r * n + k, k * n + c] {
                if self.cells[j] == NONE {
                    self.dom[j] &= bit;
                    match self.dom[j].count_ones() {
                        0 => return Err(Conflict { row: j / n, col: j % n }),
                        1 => self.pending.push((j / n, j % n)),
                        _ => {}
                    }
                }
            }
        }
        Ok(true)
    }

    fn remove(&mut self, r: usize, c: usize, v: usize) -> Result<bool, Conflict> {
        let i = r * self.n + c;
        if self.cells[i] != NONE {
            return if self.cells[i] as usize == v { Err(Conflict { row: r, col: c }) } else { Ok(false) };
        }
        if self.dom[i] >> v & 1 == 0 {
            return Ok(false);
        }
        self.dom[i] &= !(1u64 << v);
        match self.dom[i].count_ones() {
            0 => Err(Conflict { row: r, col: c }),
            1 => {
                self.pending.push((r, c));
                Ok(true)
            }
            _ => Ok(true),
        }
    }

    fn get(&self, r: usize, c: usize) -> Option<usize> {
        self.value(r, c)
    }

    fn row_pos(&self, r: usize, v: usize) -> Option<usize> {
        let p = self.row_pos[r * self.n + v];
        (p != NONE).then_some(p as usize)
    }

    fn col_pos(&self, c: usize, v: usize) -> Option<usize> {
        let p = self.col_pos[c * self.n + v];
        (p != NONE).then_some(p as usize)
    }

    fn eval(&self, t: &Flat, at: u16, assign: &[u8]) -> Option<usize> {
        match t.nodes[at as usize] {
            Node::Var(i) => Some(assign[i as usize] as usize),
            Node::One => Some(0),
            Node::Mul(a, b) => self.get(self.eval(t, a, assign)?, self.eval(t, b, assign)?),
            Node::LDiv(a, b) => self.row_pos(self.eval(t, a, assign)?, self.eval(t, b, assign)?),
            Node::RDiv(a, b) => {
                let x = self.eval(t, a, assign)?;
                self.col_pos(self.eval(t, b, assign)?, x)
            }
            Node::LInv(a) => self.col_pos(self.eval(t, a, assign)?, 0),
            Node::RInv(a) => self.row_pos(self.eval(t, a, assign)?, 0),
        }
    }

    /// Makes subterm `at` evaluate to `v`, as far as known values allow.
    fn force(&mut self, t: &Flat, at: u16, assign: &[u8], v: usize) -> Result<bool, Conflict> {
        let here = Conflict { row: v, col: v };
        match t.nodes[at as usize] {
            Node::Var(i) => {
                if assign[i as usize] as usize == v { Ok(false) } else { Err(here) }
            }
            Node::One => {
                if v == 0 { Ok(false) } else { Err(here) }
            }
            // a*b = v
            Node::Mul(a, b) => match (self.eval(t, a, assign), self.eval(t, b, assign)) {
                (Some(x), Some(y)) => self.set(x, y, v),
                (Some(x), None) => match self.row_pos(x, v) {
                    Some(c) => self.force(t, b, assign, c),
                    None => Ok(false),
                },
                (None, Some(y)) => match self.col_pos(y, v) {
                    Some(r) => self.force(t, a, assign, r),
                    None => Ok(false),
                },
                (None, None) => Ok(false),
            },
            // a*v = b
            Node::LDiv(a, b) => match (self.eval(t, a, assign), self.eval(t, b, assign)) {
                (Some(x), Some(y)) => self.set(x, v, y),
                (Some(x), None) => match self.get(x, v) {
                    Some(y) => self.force(t, b, assign, y),
                    None => Ok(false),
                },
                (None, Some(y)) => match self.col_pos(v, y) {
                    Some(x) => self.force(t, a, assign, x),
                    None => Ok(false),
                },
                (None, None) => Ok(false),
            },
            // v*b = a
            Node::RDiv(a, b) => match (self.eval(t, a, assign), self.eval(t, b, assign)) {
                (Some(x), Some(y)) => self.set(v, y, x),
                (None, Some(y)) => match self.get(v, y) {
                    Some(x) => self.force(t, a, assign, x),
                    None => Ok(false),
                },
                (Some(x), None) => match self.row_pos(v, x) {
                    Some(y) => self.force(t, b, assign, y),
                    None => Ok(false),
                },
                (None, None) => Ok(false),
            },
            // v*a = 1
            Node::LInv(a) => match self.eval(t, a, assign) {
                Some(x) => self.set(v, x, 0),
                None => match self.row_pos(v, 0) {
                    Some(x) => self.force(t, a, assign, x),
                    None => Ok(false),
                },
            },
            // a*v = 1
            Node::RInv(a) => match self.eval(t, a, assign) {
                Some(x) => self.set(x, v, 0),
                None => match self.col_pos(v, 0) {
                    Some(x) => self.force(t, a, assign, x),
                    None => Ok(false),
                },
            },
        }
    }

    fn law_instance(&mut self, law: &Law, assign: &[u8]) -> Result<bool, Conflict> {
        let l = self.eval(&law.lhs, law.lhs.root(), assign);
        let r = self.eval(&law.rhs, law.rhs.root(), assign);
        match (l, r) {
            (Some(x), Some(y)) if x != y => Err(Conflict { row: x, col: y }),
            (Some(_), Some(_)) => Ok(false),
            (Some(x), None) => self.force(&law.rhs, law.rhs.root(), assign, x),
            (None, Some(y)) => self.force(&law.lhs, law.lhs.root(), assign, y),
            (None, None) => Ok(false),
        }
    }

    fn disequality(&mut self, l: &Flat, r: &Flat, assign: &[u8]) -> Result<bool, Conflict> {
        let lv = self.eval(l, l.root(), assign);
        let rv = self.eval(r, r.root(), assign);
        match (lv, rv) {
            (Some(x), Some(y)) if x == y => Err(Conflict { row: x, col: y }),
            (Some(x), None) => self.exclude(r, assign, x),
            (None, Some(y)) => self.exclude(l, assign, y),
            _ => Ok(false),
        }
    }

    /// Removes `v` from the outermost product cell of `t` when its factors are known.
    fn exclude(&mut self, t: &Flat, assign: &[u8], v: usize) -> Result<bool, Conflict> {
        if let Node::Mul(a, b) = t.nodes[t.root() as usize] {
            if let (Some(x), Some(y)) = (self.eval(t, a, assign), self.eval(t, b, assign)) {
                return self.remove(x, y, v);
            }
        }
        Ok(false)
    }

    fn drain_singles(&mut self) -> Result<bool, Conflict> {
        let mut changed = false;
        while let Some((r, c)) = self.pending.pop() {
            let i = r * self.n + c;
            if self.cells[i] == NONE {
                let v = self.dom[i].trailing_zeros() as usize;
                changed |= self.set(r, c, v)?;
            }
        }
        Ok(changed)
    }

    /// A value that fits in exactly one cell of a row or column goes there.
    fn hidden_singles(&mut self) -> Result<bool, Conflict> {
        let n = self.n;
        let mut changed = false;
        for line in 0..n {
            for v in 0..n {
                if self.row_pos[line * n + v] == NONE {
                    let mut spots = (0..n).filter(|&c| self.cells[line * n + c] == NONE && self.dom[line * n + c] >> v & 1 == 1);
                    match (spots.next(), spots.next()) {
                        (None, _) => return Err(Conflict { row: line, col: v }),
                        (Some(c), None) => changed |= self.set(line, c, v)?,
                        _ => {}
                    }
                }
                if self.col_pos[line * n + v] == NONE {
                    let mut spots = (0..n).filter(|&r| self.cells[r * n + line] == NONE && self.dom[r * n + line] >> v & 1 == 1);
                    match (spots.next(), spots.next()) {
                        (None, _) => return Err(Conflict { row: v, col: line }),
                        (Some(r), None) => changed |= self.set(r, line, v)?,
                        _ => {}
                    }
                }
            }
        }
        Ok(changed)
    }

    /// Value of node `i` from already computed children.
    fn node_value(&self, t: &Flat, i: u16, assign: &[u8], vals: &[usize]) -> usize {
        let known = |v: Option<usize>| v.unwrap_or(NOVAL);
        let get = |a: u16| vals[a as usize];
        match t.nodes[i as usize] {
            Node::Var(v) => assign[v as usize] as usize,
            Node::One => 0,
            Node::Mul(a, b) | Node::LDiv(a, b) | Node::RDiv(a, b) if get(a) == NOVAL || get(b) == NOVAL => NOVAL,
            Node::LInv(a) | Node::RInv(a) if get(a) == NOVAL => NOVAL,
            Node::Mul(a, b) => known(self.get(get(a), get(b))),
            Node::LDiv(a, b) => known(self.row_pos(get(a), get(b))),
            Node::RDiv(a, b) => known(self.col_pos(get(b), get(a))),
            Node::LInv(a) => known(self.col_pos(get(a), 0)),
            Node::RInv(a) => known(self.row_pos(get(a), 0)),
        }
    }

    /// Ground instances of `law`, with subterm values hoisted out of inner
    /// loops. A branch is skipped once both sides contain an unknown subterm.
    fn sweep_level(&mut self, law: &Law, l: usize, assign: &mut [u8; 8], vals: &mut [Vec<usize>; 2], dead: [bool; 2]) -> Result<bool, Conflict> {
        let mut changed = false;
        for v in 0..self.n {
            assign[l] = v as u8;
            let mut d = dead;
            for side in 0..2 {
                let t = if side == 0 { &law.lhs } else { &law.rhs };
                for &i in &law.levels[side][l] {
                    let x = self.node_value(t, i, &assign[..], &vals[side]);
                    vals[side][i as usize] = x;
                    d[side] |= x == NOVAL;
                }
            }
            if d[0] && d[1] {
                continue;
            }
            if l + 1 < law.arity {
                changed |= self.sweep_level(law, l + 1, assign, vals, d)?;
                continue;
            }
            let k = law.arity;
            let lv = vals[0][law.lhs.root() as usize];
            let rv = vals[1][law.rhs.root() as usize];
            changed |= match (lv != NOVAL, rv != NOVAL) {
                (true, true) if lv != rv => return Err(Conflict { row: lv, col: rv }),
                (true, false) => self.force(&law.rhs, law.rhs.root(), &assign[..k], lv)?,
                (false, true) => self.force(&law.lhs, law.lhs.root(), &assign[..k], rv)?,
                _ => false,
            };
        }
        Ok(changed)
    }

    fn law_sweep(&mut self, cons: &Constraints) -> Result<bool, Conflict> {
        let mut changed = false;
        for law in &cons.laws {
            if law.arity == 0 {
                changed |= self.law_instance(law, &[])?;
                continue;
            }
            assert!(law.arity <= 8, "laws take at most 8 variables");
            let mut assign = [0u8; 8];
            let mut vals = [vec![NOVAL; law.lhs.nodes.len()], vec![NOVAL; law.rhs.nodes.len()]];
            changed |= self.sweep_level(law, 0, &mut assign, &mut vals, [false, false])?;
        }
        for (l, r, a) in &cons.disequalities {
            changed |= self.disequality(l, r, a)?;
        }
        Ok(changed)
    }

    /// Runs all propagation rules to a fixpoint.
    pub fn propagate(&mut self, cons: &Constraints) -> Result<u64, Conflict> {
        let mut rounds = 0;
        loop {
            rounds += 1;
            let mut changed = self.drain_singles()?;
            changed |= self.hidden_singles()?;
            changed |= self.drain_singles()?;
            changed |= self.law_sweep(cons)?;
            changed |= self.drain_singles()?;
            if !changed {
                return Ok(rounds);
            }
        }
    }

    /// Most constrained open cell, ties broken row-major. Under LNH only
    /// cells within one label of the mentioned range qualify.
    fn choose_cell(&self, symmetry: Symmetry) -> Option<(usize, usize)> {
        let n = self.n;
        let bound = match symmetry {
            Symmetry::None => n,
            Symmetry::Lnh => (self.mdn + 2).min(n),
        };
        let mut best: Option<(u32, usize, usize)> = None;
        for r in 1..bound {
            for c in 1..bound {
                if self.cells[r * n + c] == NONE {
                    let size = self.dom[r * n + c].count_ones();
                    if best.is_none_or(|(s, _, _)| size < s) {
                        best = Some((size, r, c));
                    }
                }
            }
        }
        best.map(|(_, r, c)| (r, c))
    }

    fn candidates(&self, r: usize, c: usize, symmetry: Symmetry) -> Vec<usize> {
        let cap = match symmetry {
            Symmetry::None => self.n,
            Symmetry::Lnh => (self.mdn.max(r).max(c) + 2).min(self.n),
        };
        let d = self.dom[r * self.n + c];
        (0..cap).filter(|&v| d >> v & 1 == 1).collect()
    }
}

struct Searcher<'a> {
    spec: &'a SearchSpec,
    cons: Constraints,
    rng: ChaCha8Rng,
    stats: SearchStats,
    seen: BTreeSet<LoopTable>,
    models: Vec<LoopTable>,
    start: Instant,
    stop: Option<SearchStatus>,
    /// Node budget for the current run; exceeding it sets `cut`.
    budget: Option<u64>,
    run_nodes: u64,
    cut: bool,
}

impl Searcher<'_> {
    fn accept(&self, q: &LoopTable) -> bool {
        self.spec.require.iter().all(|c| c.holds(q)) && !self.spec.forbid.iter().any(|c| c.holds(q))
    }

    fn dfs(&mut self, mut t: PartialTable) {
        if self.stop.is_some() || self.cut {
            return;
        }
        self.stats.nodes += 1;
        self.run_nodes += 1;
        if self.budget.is_some_and(|b| self.run_nodes > b) {
            self.cut = true;
            return;
        }
        if let Some(limit) = self.spec.time_limit {
            if self.stats.nodes % 64 == 0 && self.start.elapsed() > limit {
                self.stop = Some(SearchStatus::TimedOut);
                return;
            }
        }
        match t.propagate(&self.cons) {
            Ok(rounds) => self.stats.propagations += rounds,
            Err(_) => return,
        }
        let Some((r, c)) = t.choose_cell(self.spec.symmetry) else {
            if let Some(q) = t.to_table() {
                if self.accept(&q) && self.seen.insert(q.clone()) {
                    self.models.push(q);
                    if self.spec.limit != 0 && self.models.len() >= self.spec.limit {
                        self.stop = Some(SearchStatus::LimitReached);
                    }
                }
            }
            return;
        };
        let mut values = t.candidates(r, c, self.spec.symmetry);
        // ascending order drifts into group-like regions; a seeded shuffle
        // reaches nonassociative models far sooner
        values.shuffle(&mut self.rng);
        for v in values {
            let mut child = t.clone();
            if child.set(r, c, v).is_ok() {
                self.dfs(child);
            }
            if self.stop.is_some() || self.cut {
                return;
            }
        }
    }
}

/// The Luby restart sequence 1, 1, 2, 1, 1, 2, 4, ... (1-based).
fn luby(i: u64) -> u64 {
    let mut k = 1;
    while (1u64 << k) - 1 < i {
        k += 1;
    }
    if (1u64 << k) - 1 == i {
        1 << (k - 1)
    } else {
        luby(i - (1 << (k - 1)) + 1)
    }
}

const RESTART_BASE: u64 = 512;

/// Equality patterns for a witness `a(bc) != (ab)c` on labels `1..=3`.
const WITNESS_PATTERNS: [(usize, usize, usize); 5] = [(1, 1, 1), (1, 1, 2), (1, 2, 1), (1, 2, 2), (1, 2, 3)];

pub fn find_models(spec: &SearchSpec) -> Result<SearchOutcome, SearchError> {
    let n = spec.order;
    let limit = spec.max_order.min(HARD_ORDER_LIMIT);
    if n == 0 {
        return Err(SearchError::BadSpec { line: 0, message: "order must be positive".into() });
    }
    if n > limit {
        return Err(SearchError::OrderTooLarge { order: n, limit });
    }
    let base = Constraints::from_required(&spec.require);
    let mut s = Searcher {
        spec,
        cons: base.clone(),
        rng: ChaCha8Rng::seed_from_u64(spec.seed),
        stats: SearchStats::default(),
        seen: BTreeSet::new(),
        models: Vec::new(),
        start: Instant::now(),
        stop: None,
        budget: None,
        run_nodes: 0,
        cut: false,
    };
    let root = PartialTable::new(n).expect("identity row and column are consistent");
    let mut roots: Vec<(Constraints, PartialTable)> = Vec::new();
    if spec.forbids_associativity() {
        for (a, b, c) in WITNESS_PATTERNS.iter().copied().filter(|p| p.2 < n && p.1 < n) {
            let mut t = root.clone();
            // the witness labels are fixed, so they count as mentioned
            t.mdn = t.mdn.max(b).max(c);
            roots.push((base.clone().with_nonassociative_triple(a, b, c), t));
        }
    } else {
        roots.push((base, root));
    }
    if spec.limit == 0 || !spec.restarts {
        for (cons, t) in &roots {
            s.cons = cons.clone();
            s.dfs(t.clone());
            if s.stop.is_some() {
                break;
            }
        }
    } else {
        // Budgeted runs with fresh value orders. A run that ends under
        // budget has exhausted its root, so exhaustion stays exact.
        let mut open = vec![true; roots.len()];
        let mut i = 0;
        while s.stop.is_none() && open.iter().any(|&o| o) {
            i += 1;
            let budget = luby(i).saturating_mul(RESTART_BASE);
            for (k, (cons, t)) in roots.iter().enumerate() {
                if !open[k] {
                    continue;
                }
                s.cons = cons.clone();
                s.budget = Some(budget);
                s.run_nodes = 0;
                s.cut = false;
                s.dfs(t.clone());
                if s.stop.is_some() {
                    break;
                }
                if !s.cut {
                    open[k] = false;
                }
            }
        }
    }
    let mut models = s.models;
    if spec.iso_reduce {
        models = iso_reduce(&models);
    }
    let stats = SearchStats { models: models.len(), elapsed: s.start.elapsed(), ..s.stats };
    let status = s.stop.unwrap_or(SearchStatus::Exhausted);
    if models.is_empty() && status == SearchStatus::Exhausted {
        return Err(SearchError::Unsatisfiable(stats));
    }
    Ok(SearchOutcome { models, stats, status })
}

/// One representative per isomorphism class: the least table in the class
/// among those given. Output is sorted.
pub fn iso_reduce(models: &[LoopTable]) -> Vec<LoopTable> {
    let mut classes: Vec<LoopTable> = Vec::new();
    for q in models {
        match classes.iter_mut().find(|rep| rep.order() == q.order() && find_isomorphism(rep, q).is_some()) {
            Some(rep) => {
                if q < rep {
                    *rep = q.clone();
                }
            }
            None => classes.push(q.clone()),
        }
    }
    classes.sort();
    classes
}
