//! Cayley tables, permutations and element sets.

use std::fmt;

use thiserror::Error;

/// A loop element, always in `0..n`. Element `0` is the identity.
pub type Elem = usize;

/// Which line of a grid violated the Latin-square property.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    Row(usize),
    Column(usize),
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Line::Row(i) => write!(f, "row {i}"),
            Line::Column(j) => write!(f, "column {j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TableError {
    #[error("empty table")]
    Empty,
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("entry {value} at ({row}, {col}) is outside 0..{n}")]
    OutOfRange { row: usize, col: usize, value: i64, n: usize },
    #[error("not a Latin square: {line} repeats {value}")]
    NotLatinSquare { line: Line, value: usize },
    #[error("0 is not a two-sided identity: 0*{witness} or {witness}*0 differs from {witness}")]
    NoIdentity { witness: usize },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("element {0} is not power-associative")]
    NotPowerAssociative(Elem),
    #[error("{0} is not a permutation")]
    NotPermutation(String),
}

/// A finite loop given by its Cayley table.
///
/// Division tables are filled at validation time, so `mul`, `ldiv` and
/// `rdiv` are all single lookups. Values are immutable after construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LoopTable {
    n: usize,
    mul: Vec<u32>,
    ldiv: Vec<u32>,
    rdiv: Vec<u32>,
}

impl fmt::Debug for LoopTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LoopTable(n = {})", self.n)
    }
}

impl PartialOrd for LoopTable {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on (order, row-major entries).
impl Ord for LoopTable {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n.cmp(&other.n).then_with(|| self.mul.cmp(&other.mul))
    }
}

impl LoopTable {
    /// Validates an integer grid as a loop with identity `0`.
    pub fn from_rows<T, R>(rows: &[R]) -> Result<Self, TableError>
    where
        T: Copy + Into<i64>,
        R: AsRef<[T]>,
    {
        let n = rows.len();
        if n == 0 {
            return Err(TableError::Empty);
        }
        let mut mul = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(TableError::NotSquare { row: i, len: row.len(), expected: n });
            }
            for (j, &v) in row.iter().enumerate() {
                let v: i64 = v.into();
                if v < 0 || v >= n as i64 {
                    return Err(TableError::OutOfRange { row: i, col: j, value: v, n });
                }
                mul.push(v as u32);
            }
        }
        Self::from_flat(n, mul)
    }

    /// Builds a table from `f(x, y) = x * y` and validates it.
    pub fn from_fn(n: usize, f: impl Fn(Elem, Elem) -> Elem) -> Result<Self, TableError> {
        if n == 0 {
            return Err(TableError::Empty);
        }
        let mut mul = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let v = f(x, y);
                if v >= n {
                    return Err(TableError::OutOfRange { row: x, col: y, value: v as i64, n });
                }
                mul.push(v as u32);
            }
        }
        Self::from_flat(n, mul)
    }

    fn from_flat(n: usize, mul: Vec<u32>) -> Result<Self, TableError> {
        let mut ldiv = vec![u32::MAX; n * n];
        let mut rdiv = vec![u32::MAX; n * n];
        // rows first, so a repeated entry is reported against its row
        for x in 0..n {
            for y in 0..n {
                let v = mul[x * n + y] as usize;
                // x * y = v  =>  x \ v = y
                if ldiv[x * n + v] != u32::MAX {
                    return Err(TableError::NotLatinSquare { line: Line::Row(x), value: v });
                }
                ldiv[x * n + v] = y as u32;
            }
        }
        for y in 0..n {
            for x in 0..n {
                let v = mul[x * n + y] as usize;
                // v / y = x
                if rdiv[v * n + y] != u32::MAX {
                    return Err(TableError::NotLatinSquare { line: Line::Column(y), value: v });
                }
                rdiv[v * n + y] = x as u32;
            }
        }
        for x in 0..n {
            if mul[x] as usize != x || mul[x * n] as usize != x {
                return Err(TableError::NoIdentity { witness: x });
            }
        }
        Ok(LoopTable { n, mul, ldiv, rdiv })
    }

    /// Relabels a quasigroup with some two-sided identity `e` so that `e`
    /// becomes `0`. Other elements keep their relative order.
    pub fn normalize<T, R>(rows: &[R]) -> Result<Self, TableError>
    where
        T: Copy + Into<i64>,
        R: AsRef<[T]>,
    {
        let n = rows.len();
        let grid: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|&v| v.into()).collect())
            .collect();
        let in_range = grid.iter().all(|r| r.len() == n && r.iter().all(|&v| v >= 0 && v < n as i64));
        if !in_range {
            // let from_rows produce the precise error
            return Self::from_rows(&grid);
        }
        let e = (0..n).find(|&e| (0..n).all(|x| grid[e][x] == x as i64 && grid[x][e] == x as i64));
        let Some(e) = e else {
            return Self::from_rows(&grid);
        };
        // e -> 0, elements below e shift up by one
        let label = |x: usize| if x == e { 0 } else if x < e { x + 1 } else { x };
        let mut out = vec![vec![0i64; n]; n];
        for x in 0..n {
            for y in 0..n {
                out[label(x)][label(y)] = label(grid[x][y] as usize) as i64;
            }
        }
        Self::from_rows(&out)
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        self.mul[x * self.n + y] as Elem
    }

    /// `x \ y`: the unique `z` with `x * z = y`.
    #[inline]
    pub fn ldiv(&self, x: Elem, y: Elem) -> Elem {
        self.ldiv[x * self.n + y] as Elem
    }

    /// `x / y`: the unique `z` with `z * y = x`.
    #[inline]
    pub fn rdiv(&self, x: Elem, y: Elem) -> Elem {
        self.rdiv[x * self.n + y] as Elem
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.n
    }

    pub fn row(&self, x: Elem) -> &[u32] {
        &self.mul[x * self.n..(x + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<Elem>> {
        (0..self.n).map(|x| self.row(x).iter().map(|&v| v as Elem).collect()).collect()
    }

    /// `L_x : y -> x*y`
    pub fn left(&self, x: Elem) -> Perm {
        Perm::from_images_unchecked((0..self.n).map(|y| self.mul(x, y)).collect())
    }

    /// `R_x : y -> y*x`
    pub fn right(&self, x: Elem) -> Perm {
        Perm::from_images_unchecked((0..self.n).map(|y| self.mul(y, x)).collect())
    }

    pub fn translations(&self, x: Elem) -> (Perm, Perm) {
        (self.left(x), self.right(x))
    }

    /// `y -> y \ 1`
    pub fn rho(&self) -> Perm {
        self.d_map(0)
    }

    /// `y -> 1 / y`
    pub fn lambda(&self) -> Perm {
        Perm::from_images_unchecked((0..self.n).map(|y| self.rdiv(0, y)).collect())
    }

    pub fn inverse_maps(&self) -> (Perm, Perm) {
        (self.lambda(), self.rho())
    }

    /// `D_x : y -> y \ x`
    pub fn d_map(&self, x: Elem) -> Perm {
        Perm::from_images_unchecked((0..self.n).map(|y| self.ldiv(y, x)).collect())
    }

    #[inline]
    pub fn rinv(&self, x: Elem) -> Elem {
        self.ldiv(x, 0)
    }

    #[inline]
    pub fn linv(&self, x: Elem) -> Elem {
        self.rdiv(0, x)
    }

    /// `f(x,y) = (xy)/x`
    #[inline]
    pub fn f(&self, x: Elem, y: Elem) -> Elem {
        self.rdiv(self.mul(x, y), x)
    }

    /// `g(x,y) = x\(yx)`
    #[inline]
    pub fn g(&self, x: Elem, y: Elem) -> Elem {
        self.ldiv(x, self.mul(y, x))
    }

    /// `(F_x, G_x)` with `y F_x = f(x,y)` and `y G_x = g(x,y)`.
    pub fn fg_maps(&self, x: Elem) -> (Perm, Perm) {
        let f = (0..self.n).map(|y| self.f(x, y)).collect();
        let g = (0..self.n).map(|y| self.g(x, y)).collect();
        (Perm::from_images_unchecked(f), Perm::from_images_unchecked(g))
    }

    /// `E_x = R_x R_{x^rho}`, applying `R_x` first.
    pub fn e_map(&self, x: Elem) -> Perm {
        self.right(x).then(&self.right(self.rinv(x)))
    }

    /// `x^k`, computed by repeated multiplication with a left/right
    /// bracketing agreement check.
    pub fn power(&self, x: Elem, k: i64) -> Result<Elem, TableError> {
        if k == 0 {
            return Ok(0);
        }
        let (base, alt) = if k > 0 {
            (x, x)
        } else {
            (self.rinv(x), self.linv(x))
        };
        if base != alt {
            return Err(TableError::NotPowerAssociative(x));
        }
        let m = k.unsigned_abs();
        let (mut left, mut right) = (base, base);
        for _ in 1..m {
            left = self.mul(left, base);
            right = self.mul(base, right);
            if left != right {
                return Err(TableError::NotPowerAssociative(x));
            }
        }
        // x^-k must also invert x^k on both sides
        if k < 0 {
            let pos = self.power(x, -k)?;
            if self.mul(pos, left) != 0 || self.mul(left, pos) != 0 {
                return Err(TableError::NotPowerAssociative(x));
            }
        }
        Ok(left)
    }

    /// Isomorphic copy with every element `x` renamed to `sigma(x)`.
    /// `sigma` must fix `0`.
    pub fn relabel(&self, sigma: &Perm) -> LoopTable {
        assert_eq!(sigma.len(), self.n);
        assert_eq!(sigma.apply(0), 0, "relabeling must fix the identity");
        let n = self.n;
        let mut mul = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                mul[sigma.apply(x) * n + sigma.apply(y)] = sigma.apply(self.mul(x, y)) as u32;
            }
        }
        Self::from_flat(n, mul).expect("relabeling preserves the loop axioms")
    }

    /// Sub-table on `members` (which must be a subloop), relabeled in
    /// ascending member order.
    pub fn restrict(&self, members: &ElemSet) -> Option<LoopTable> {
        let elems: Vec<Elem> = members.iter().collect();
        let mut index = vec![usize::MAX; self.n];
        for (i, &e) in elems.iter().enumerate() {
            index[e] = i;
        }
        let m = elems.len();
        let mut mul = Vec::with_capacity(m * m);
        for &x in &elems {
            for &y in &elems {
                let i = index[self.mul(x, y)];
                if i == usize::MAX {
                    return None;
                }
                mul.push(i as u32);
            }
        }
        Self::from_flat(m, mul).ok()
    }

    pub fn direct_product(&self, other: &LoopTable) -> LoopTable {
        let m = other.n;
        LoopTable::from_fn(self.n * m, |p, q| {
            self.mul(p / m, q / m) * m + other.mul(p % m, q % m)
        })
        .expect("direct product of loops is a loop")
    }

    /// Parses the `.tbl` text format.
    pub fn parse_tbl(src: &str) -> Result<Self, TableError> {
        let mut lines = src
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty());
        let (hdr_no, hdr) = lines.next().ok_or(TableError::Parse {
            line: 1,
            column: 1,
            message: "missing order line".into(),
        })?;
        let n: usize = hdr.trim().parse().map_err(|_| TableError::Parse {
            line: hdr_no + 1,
            column: column_of(hdr, hdr.trim()),
            message: format!("expected order, found {:?}", hdr.trim()),
        })?;
        if n == 0 {
            return Err(TableError::Empty);
        }
        let mut rows = Vec::with_capacity(n);
        for (no, line) in lines.by_ref() {
            if rows.len() == n {
                return Err(TableError::Parse {
                    line: no + 1,
                    column: 1,
                    message: format!("unexpected content after {n} rows"),
                });
            }
            let mut row = Vec::with_capacity(n);
            for tok in line.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| TableError::Parse {
                    line: no + 1,
                    column: column_of(line, tok),
                    message: format!("expected integer, found {tok:?}"),
                })?;
                row.push(v);
            }
            if row.len() != n {
                return Err(TableError::Parse {
                    line: no + 1,
                    column: line.len() + 1,
                    message: format!("expected {n} entries, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(TableError::Parse {
                line: src.lines().count() + 1,
                column: 1,
                message: format!("expected {n} rows, found {}", rows.len()),
            });
        }
        Self::from_rows(&rows)
    }

    /// Serializes to `.tbl`: order line, then rows of single-space separated
    /// entries, every line newline-terminated.
    pub fn to_tbl(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for x in 0..self.n {
            let row: Vec<String> = self.row(x).iter().map(u32::to_string).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// The cyclic group `Z_n`.
    pub fn cyclic(n: usize) -> LoopTable {
        LoopTable::from_fn(n, |x, y| (x + y) % n).expect("Z_n is a loop")
    }
}

fn column_of(line: &str, tok: &str) -> usize {
    // tok is a subslice of line
    (tok.as_ptr() as usize).saturating_sub(line.as_ptr() as usize) + 1
}

/// A permutation of `0..n`, acting on the right.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<Elem>) -> Result<Perm, TableError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(TableError::NotPermutation(format!("{images:?}")));
            }
            seen[v] = true;
        }
        Ok(Self::from_images_unchecked(images))
    }

    pub(crate) fn from_images_unchecked(images: Vec<Elem>) -> Perm {
        Perm(images.into_iter().map(|v| v as u32).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.0[x] as Elem
    }

    pub fn images(&self) -> Vec<Elem> {
        self.0.iter().map(|&v| v as Elem).collect()
    }

    /// `self` followed by `other`: `x -> other(self(x))`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&v| other.0[v as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn pow(&self, k: i64) -> Perm {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Perm::identity(self.len());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.then(&sq);
            }
            sq = sq.then(&sq);
            e >>= 1;
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = p.then(self);
            k += 1;
        }
        k
    }

    pub fn commutes_with(&self, other: &Perm) -> bool {
        self.then(other) == other.then(self)
    }

    pub fn fixes(&self, set: &ElemSet) -> bool {
        set.iter().all(|x| self.apply(x) == x)
    }

    pub fn image_of(&self, set: &ElemSet) -> ElemSet {
        ElemSet::from_iter(set.capacity(), set.iter().map(|x| self.apply(x)))
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// A subset of `0..n`, stored as a bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElemSet {
    n: usize,
    words: Vec<u64>,
}

impl ElemSet {
    pub fn empty(n: usize) -> ElemSet {
        ElemSet { n, words: vec![0; n.div_ceil(64)] }
    }

    pub fn full(n: usize) -> ElemSet {
        ElemSet::from_iter(n, 0..n)
    }

    pub fn from_iter(n: usize, it: impl IntoIterator<Item = Elem>) -> ElemSet {
        let mut s = ElemSet::empty(n);
        for x in it {
            s.insert(x);
        }
        s
    }

    pub fn from_slice(n: usize, xs: &[Elem]) -> ElemSet {
        ElemSet::from_iter(n, xs.iter().copied())
    }

    /// Size of the carrier, not of the set.
    pub fn capacity(&self) -> usize {
        self.n
    }

    pub fn insert(&mut self, x: Elem) -> bool {
        assert!(x < self.n, "element {x} outside carrier of size {}", self.n);
        let (w, b) = (x / 64, x % 64);
        let fresh = self.words[w] & (1 << b) == 0;
        self.words[w] |= 1 << b;
        fresh
    }

    pub fn remove(&mut self, x: Elem) {
        self.words[x / 64] &= !(1 << (x % 64));
    }

    #[inline]
    pub fn contains(&self, x: Elem) -> bool {
        x < self.n && self.words[x / 64] & (1 << (x % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.n).filter(move |&x| self.contains(x))
    }

    pub fn to_vec(&self) -> Vec<Elem> {
        self.iter().collect()
    }

    pub fn intersection(&self, other: &ElemSet) -> ElemSet {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        ElemSet { n: self.n, words }
    }

    pub fn union(&self, other: &ElemSet) -> ElemSet {
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        ElemSet { n: self.n, words }
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }
}

impl PartialOrd for ElemSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Orders by size, then by sorted member list.
impl Ord for ElemSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn z3_is_valid() {
        let q = LoopTable::from_rows(&[[0, 1, 2], [1, 2, 0], [2, 0, 1]]).unwrap();
        assert_eq!(q.order(), 3);
        assert_eq!(q, LoopTable::cyclic(3));
    }

    #[test]
    fn duplicate_in_row_is_rejected() {
        let err = LoopTable::from_rows(&[[0, 1, 2], [1, 2, 0], [0, 1, 1]]).unwrap_err();
        assert!(matches!(err, TableError::NotLatinSquare { line: Line::Row(2), .. }), "{err}");
    }

    #[test]
    fn missing_identity_is_rejected() {
        let err = LoopTable::from_rows(&[[1, 0], [0, 1]]).unwrap_err();
        assert_eq!(err, TableError::NoIdentity { witness: 0 });
    }

    #[test]
    fn out_of_range_is_rejected() {
        let err = LoopTable::from_rows(&[[0, 1], [1, 2]]).unwrap_err();
        assert!(matches!(err, TableError::OutOfRange { row: 1, col: 1, value: 2, .. }));
        let err = LoopTable::from_rows(&[[0i64, -1], [1, 0]]).unwrap_err();
        assert!(matches!(err, TableError::OutOfRange { value: -1, .. }));
    }

    #[test]
    fn fixture_spot_values() {
        let t16 = fixtures::t16();
        assert_eq!(t16.mul(4, 8), 12);
        assert_eq!(t16.mul(8, 4), 15);
        let t27 = fixtures::t27();
        assert_eq!(t27.mul(9, 9), 18);
        assert_eq!(t27.mul(9, 18), 0);
        assert_eq!(t27.mul(9, 12), 22);
        assert_eq!(t27.rinv(3), 6);
    }

    #[test]
    fn division_axioms() {
        for q in [fixtures::t16(), fixtures::t27()] {
            for x in q.elements() {
                for y in q.elements() {
                    assert_eq!(q.mul(x, q.ldiv(x, y)), y);
                    assert_eq!(q.mul(q.rdiv(x, y), y), x);
                    assert_eq!(q.ldiv(x, q.mul(x, y)), y);
                    assert_eq!(q.rdiv(q.mul(x, y), y), x);
                }
            }
        }
    }

    #[test]
    fn inverse_maps_are_unique_inverses() {
        for q in [fixtures::t16(), fixtures::t27(), LoopTable::cyclic(5)] {
            let (lambda, rho) = q.inverse_maps();
            assert_eq!(rho, q.d_map(0));
            assert_eq!(lambda, q.d_map(0).inverse());
            for x in q.elements() {
                let right: Vec<_> = q.elements().filter(|&z| q.mul(x, z) == 0).collect();
                let left: Vec<_> = q.elements().filter(|&z| q.mul(z, x) == 0).collect();
                assert_eq!(right, vec![rho.apply(x)]);
                assert_eq!(left, vec![lambda.apply(x)]);
            }
        }
        // t16 is power-associative so both inverses agree
        let t16 = fixtures::t16();
        assert_eq!(t16.rho(), t16.lambda());
    }

    #[test]
    fn group_inverse_maps_and_conjugation() {
        let z5 = LoopTable::cyclic(5);
        for x in z5.elements() {
            assert_eq!(z5.rho().apply(x), (5 - x) % 5);
            let (f, g) = z5.fg_maps(x);
            assert!(f.is_identity() && g.is_identity());
            assert!(z5.e_map(x).is_identity());
        }
    }

    #[test]
    fn t16_f_value_from_column_scan() {
        let t16 = fixtures::t16();
        assert_eq!(t16.mul(4, 8), 12);
        // the unique z with z*4 = 12, read off column 4
        let col4: Vec<_> = t16.elements().filter(|&z| t16.rows()[z][4] == 12).collect();
        assert_eq!(col4, vec![9]);
        assert_eq!(t16.f(4, 8), 9);
        assert_eq!(t16.fg_maps(4).0.apply(8), 9);
    }

    #[test]
    fn t16_e_map_fixes_nucleus() {
        let t16 = fixtures::t16();
        let e = t16.e_map(4);
        for y in 0..4 {
            assert_eq!(e.apply(y), y);
        }
    }

    #[test]
    fn powers() {
        let t27 = fixtures::t27();
        assert_eq!(t27.power(3, 3).unwrap(), 0);
        assert_eq!(t27.power(9, 2).unwrap(), 18);
        assert_eq!(t27.power(9, -1).unwrap(), t27.rinv(9));
        let t16 = fixtures::t16();
        assert_eq!(t16.power(1, 2).unwrap(), 2);
        assert_eq!(t16.power(1, 4).unwrap(), 0);
        assert_eq!(t16.power(7, 0).unwrap(), 0);
    }

    #[test]
    fn non_power_associative_power_fails() {
        // x*x = 2 but (x*x)*x != x*(x*x) for x = 1
        let q = LoopTable::from_rows(&[
            [0, 1, 2, 3, 4],
            [1, 2, 3, 4, 0],
            [2, 4, 1, 0, 3],
            [3, 0, 4, 1, 2],
            [4, 3, 0, 2, 1],
        ])
        .unwrap();
        assert_ne!(q.mul(q.mul(1, 1), 1), q.mul(1, q.mul(1, 1)));
        assert_eq!(q.power(1, 3), Err(TableError::NotPowerAssociative(1)));
    }

    #[test]
    fn perm_composition_acts_on_the_right() {
        let p = Perm::from_images(vec![1, 2, 0]).unwrap();
        let q = Perm::from_images(vec![0, 2, 1]).unwrap();
        // 0 -p-> 1 -q-> 2
        assert_eq!(p.then(&q).apply(0), 2);
        assert!(p.then(&p.inverse()).is_identity());
        assert_eq!(p.order(), 3);
        assert_eq!(p.pow(-1), p.inverse());
        assert!(Perm::from_images(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn tbl_round_trip_is_byte_stable() {
        for src in [fixtures::T16_TBL, fixtures::T27_TBL] {
            let q = LoopTable::parse_tbl(src).unwrap();
            assert_eq!(q.to_tbl(), src);
        }
    }

    #[test]
    fn tbl_parse_errors() {
        let err = LoopTable::parse_tbl("3\n0 1 2\n1 2 0\n").unwrap_err();
        assert!(matches!(err, TableError::Parse { .. }), "{err}");
        let err = LoopTable::parse_tbl("# c\n2\n0 1\n1 x\n").unwrap_err();
        assert_eq!(
            err,
            TableError::Parse { line: 4, column: 3, message: "expected integer, found \"x\"".into() }
        );
        let err = LoopTable::parse_tbl("2\n0 1\n1 1\n").unwrap_err();
        assert!(matches!(err, TableError::NotLatinSquare { .. }));
        assert!(LoopTable::parse_tbl("# only comments\n").is_err());
    }

    #[test]
    fn normalize_moves_identity_to_zero() {
        // Z3 written with identity 2
        let q = LoopTable::normalize(&[[1, 2, 0], [2, 0, 1], [0, 1, 2]]).unwrap();
        assert_eq!(q.order(), 3);
        assert!(crate::identities::is_group(&q));
    }

    #[test]
    fn elemset_basics() {
        let mut s = ElemSet::from_slice(70, &[0, 3, 65]);
        assert!(s.contains(65) && !s.contains(64));
        assert_eq!(s.len(), 3);
        s.remove(3);
        assert_eq!(s.to_vec(), vec![0, 65]);
        let t = ElemSet::from_slice(70, &[0, 1]);
        assert_eq!(s.intersection(&t).to_vec(), vec![0]);
        assert_eq!(s.union(&t).len(), 3);
        assert!(ElemSet::from_slice(70, &[0]).is_subset(&t));
        assert_eq!(format!("{}", t), "{0,1}");
    }
}
