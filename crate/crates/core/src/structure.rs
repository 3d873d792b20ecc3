//! Structural invariants: subloops, nuclei, center, associators, inner
//! mappings, automorphisms, normality and quotients.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::identities::is_cc;
use crate::table::{Elem, ElemSet, LoopTable, Perm};

/// Largest order accepted by the enumeration routines.
pub const DESK_SCALE_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("{0} is not a subloop")]
    NotSubloop(ElemSet),
    #[error("subloop is not normal: {0}")]
    NotNormal(NormalityWitness),
    #[error("order {order} exceeds the enumeration limit {limit}")]
    OrderTooLarge { order: usize, limit: usize },
    #[error("order {0} is not a prime power")]
    NotPrimePower(usize),
    #[error("loop is not conjugacy closed")]
    NotCC,
    #[error("({0}, {1}, {2}) is not an autotopism")]
    NotAutotopism(Perm, Perm, Perm),
}

/// Two products of coset-equivalent factors landing in different cosets,
/// or two cosets that overlap without coinciding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalityWitness {
    /// `x1 ~ x2` and `y1 ~ y2` but `x1*y1` and `x2*y2` lie in different cosets.
    Product { x1: Elem, y1: Elem, x2: Elem, y2: Elem },
    /// `a H` and `b H` overlap without being equal.
    Overlap { a: Elem, b: Elem },
}

impl std::fmt::Display for NormalityWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormalityWitness::Product { x1, y1, x2, y2 } => {
                write!(f, "{x1}*{y1} and {x2}*{y2} fall in different cosets")
            }
            NormalityWitness::Overlap { a, b } => write!(f, "cosets of {a} and {b} overlap"),
        }
    }
}

/// A triple `(alpha, beta, gamma)` with `y alpha * z beta = (yz) gamma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Autotopism {
    pub alpha: Perm,
    pub beta: Perm,
    pub gamma: Perm,
}

impl Autotopism {
    pub fn new(q: &LoopTable, alpha: Perm, beta: Perm, gamma: Perm) -> Result<Self, StructureError> {
        if is_autotopism(q, &alpha, &beta, &gamma) {
            Ok(Autotopism { alpha, beta, gamma })
        } else {
            Err(StructureError::NotAutotopism(alpha, beta, gamma))
        }
    }

    /// Componentwise composition, `self` first.
    pub fn then(&self, other: &Autotopism) -> Autotopism {
        Autotopism {
            alpha: self.alpha.then(&other.alpha),
            beta: self.beta.then(&other.beta),
            gamma: self.gamma.then(&other.gamma),
        }
    }
}

pub fn is_autotopism(q: &LoopTable, alpha: &Perm, beta: &Perm, gamma: &Perm) -> bool {
    let n = q.order();
    if alpha.len() != n || beta.len() != n || gamma.len() != n {
        return false;
    }
    q.elements().all(|y| {
        let ya = alpha.apply(y);
        q.elements().all(|z| q.mul(ya, beta.apply(z)) == gamma.apply(q.mul(y, z)))
    })
}

pub fn is_automorphism(q: &LoopTable, a: &Perm) -> bool {
    is_autotopism(q, a, a, a)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubloopInfo {
    pub members: ElemSet,
    pub is_normal: bool,
    pub generators: Vec<Elem>,
}

impl SubloopInfo {
    pub fn order(&self) -> usize {
        self.members.len()
    }
}

/// Least subset containing `s` and `0` closed under multiplication. In a
/// finite loop this is also closed under both divisions.
pub fn closure(q: &LoopTable, s: &ElemSet) -> ElemSet {
    let mut members = s.clone();
    members.insert(0);
    let mut list: Vec<Elem> = members.iter().collect();
    let mut queue: VecDeque<Elem> = list.iter().copied().collect();
    while let Some(a) = queue.pop_front() {
        let mut i = 0;
        while i < list.len() {
            let b = list[i];
            for c in [q.mul(a, b), q.mul(b, a)] {
                if members.insert(c) {
                    list.push(c);
                    queue.push_back(c);
                }
            }
            i += 1;
        }
    }
    members
}

pub fn generate_subloop(q: &LoopTable, s: &ElemSet) -> SubloopInfo {
    let members = closure(q, s);
    let is_normal = normality_witness(q, &members).is_none();
    SubloopInfo { members, is_normal, generators: s.iter().collect() }
}

/// Lexicographically least `(x,y,z)` in `set^3` with `x(yz) != (xy)z`.
pub fn find_associativity_violation(q: &LoopTable, set: &ElemSet) -> Option<(Elem, Elem, Elem)> {
    let elems: Vec<Elem> = set.iter().collect();
    for &x in &elems {
        for &y in &elems {
            let xy = q.mul(x, y);
            for &z in &elems {
                if q.mul(x, q.mul(y, z)) != q.mul(xy, z) {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

pub fn is_associative_subset(q: &LoopTable, set: &ElemSet) -> bool {
    find_associativity_violation(q, set).is_none()
}

/// True if `x(yz) = (xy)z` for every `x in a`, `y in b`, `z in c`.
pub fn associates(q: &LoopTable, a: &ElemSet, b: &ElemSet, c: &ElemSet) -> bool {
    a.iter().all(|x| b.iter().all(|y| c.iter().all(|z| q.mul(x, q.mul(y, z)) == q.mul(q.mul(x, y), z))))
}

/// `(x,y,z) = (x*yz) \ (xy*z)` and `[x,y,z] = (x*yz) / (xy*z)`.
pub fn associator(q: &LoopTable, x: Elem, y: Elem, z: Elem) -> (Elem, Elem) {
    let a = q.mul(x, q.mul(y, z));
    let b = q.mul(q.mul(x, y), z);
    (q.ldiv(a, b), q.rdiv(a, b))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nuclei {
    pub left: ElemSet,
    pub middle: ElemSet,
    pub right: ElemSet,
    pub nucleus: ElemSet,
}

pub fn nuclei(q: &LoopTable) -> Nuclei {
    let n = q.order();
    let all = |pred: &dyn Fn(Elem, Elem) -> bool| (0..n).all(|x| (0..n).all(|y| pred(x, y)));
    let left = ElemSet::from_iter(n, (0..n).filter(|&a| all(&|x, y| q.mul(a, q.mul(x, y)) == q.mul(q.mul(a, x), y))));
    let middle = ElemSet::from_iter(n, (0..n).filter(|&a| all(&|x, y| q.mul(q.mul(x, a), y) == q.mul(x, q.mul(a, y)))));
    let right = ElemSet::from_iter(n, (0..n).filter(|&a| all(&|x, y| q.mul(x, q.mul(y, a)) == q.mul(q.mul(x, y), a))));
    let nucleus = left.intersection(&middle).intersection(&right);
    Nuclei { left, middle, right, nucleus }
}

pub fn nucleus(q: &LoopTable) -> ElemSet {
    nuclei(q).nucleus
}

/// Elements commuting with everything (not necessarily nuclear).
pub fn commutant(q: &LoopTable) -> ElemSet {
    ElemSet::from_iter(q.order(), q.elements().filter(|&x| q.elements().all(|y| q.mul(x, y) == q.mul(y, x))))
}

/// Nuclear elements commuting with everything.
pub fn center(q: &LoopTable) -> ElemSet {
    nucleus(q).intersection(&commutant(q))
}

/// `R(x,y) = R_x R_y R_{xy}^-1` and `L(x,y) = L_x L_y L_{yx}^-1`.
pub fn inner_maps(q: &LoopTable, x: Elem, y: Elem) -> (Perm, Perm) {
    let r = q.right(x).then(&q.right(y)).then(&q.right(q.mul(x, y)).inverse());
    let l = q.left(x).then(&q.left(y)).then(&q.left(q.mul(y, x)).inverse());
    (r, l)
}

/// `T_x = R_x L_x^-1`.
pub fn t_map(q: &LoopTable, x: Elem) -> Perm {
    q.right(x).then(&q.left(x).inverse())
}

/// `|<x>|`; the order of `x` when `x` is power-associative.
pub fn element_order(q: &LoopTable, x: Elem) -> usize {
    closure(q, &ElemSet::from_slice(q.order(), &[x])).len()
}

/// Isomorphism-invariant data per element, used to prune bijection search.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Profile {
    cyclic_order: usize,
    left_period: usize,
    square_is_one: bool,
    nuclear: bool,
    commuting: usize,
    square_roots: usize,
}

fn profiles(q: &LoopTable) -> Vec<Profile> {
    let n = q.order();
    let nuc = nucleus(q);
    let mut roots = vec![0usize; n];
    for x in 0..n {
        roots[q.mul(x, x)] += 1;
    }
    (0..n)
        .map(|x| {
            // length of the orbit of 0 under L_x
            let mut p = 1;
            let mut y = x;
            while y != 0 {
                y = q.mul(x, y);
                p += 1;
            }
            Profile {
                cyclic_order: element_order(q, x),
                left_period: if x == 0 { 1 } else { p - 1 },
                square_is_one: q.mul(x, x) == 0,
                nuclear: nuc.contains(x),
                commuting: (0..n).filter(|&y| q.mul(x, y) == q.mul(y, x)).count(),
                square_roots: roots[x],
            }
        })
        .collect()
}

/// A short generating sequence, each element chosen to enlarge the
/// generated subloop as much as possible.
pub fn generating_sequence(q: &LoopTable) -> Vec<Elem> {
    let n = q.order();
    let mut gens = Vec::new();
    let mut cur = ElemSet::from_slice(n, &[0]);
    while cur.len() < n {
        let mut best: Option<(usize, Elem, ElemSet)> = None;
        for x in (0..n).filter(|&x| !cur.contains(x)) {
            let mut s = cur.clone();
            s.insert(x);
            let c = closure(q, &s);
            if best.as_ref().is_none_or(|(sz, _, _)| c.len() > *sz) {
                best = Some((c.len(), x, c));
            }
        }
        let (_, x, c) = best.expect("some element outside a proper subloop");
        gens.push(x);
        cur = c;
    }
    gens
}

struct IsoSearch<'a> {
    src: &'a LoopTable,
    dst: &'a LoopTable,
    gens: Vec<Elem>,
    candidates: Vec<Vec<Elem>>,
    find_all: bool,
    found: Vec<Perm>,
}

impl IsoSearch<'_> {
    /// Extends `map` multiplicatively from `fresh`; false on conflict.
    fn extend(&self, map: &mut [Option<Elem>], used: &mut [bool], mapped: &mut Vec<Elem>, fresh: Elem) -> bool {
        let mut queue = VecDeque::from([fresh]);
        while let Some(a) = queue.pop_front() {
            let fa = map[a].unwrap();
            let mut i = 0;
            while i < mapped.len() {
                let b = mapped[i];
                let fb = map[b].unwrap();
                for (c, fc) in [(self.src.mul(a, b), self.dst.mul(fa, fb)), (self.src.mul(b, a), self.dst.mul(fb, fa))] {
                    match map[c] {
                        Some(v) if v != fc => return false,
                        Some(_) => {}
                        None => {
                            if used[fc] {
                                return false;
                            }
                            map[c] = Some(fc);
                            used[fc] = true;
                            mapped.push(c);
                            queue.push_back(c);
                        }
                    }
                }
                i += 1;
            }
        }
        true
    }

    fn search(&mut self, depth: usize, map: Vec<Option<Elem>>, used: Vec<bool>, mapped: Vec<Elem>) {
        if !self.find_all && !self.found.is_empty() {
            return;
        }
        if depth == self.gens.len() {
            let images: Vec<Elem> = map.iter().map(|v| v.expect("generators reach every element")).collect();
            self.found.push(Perm::from_images(images).expect("injective by construction"));
            return;
        }
        let g = self.gens[depth];
        if map[g].is_some() {
            // already forced by earlier generators
            self.search(depth + 1, map, used, mapped);
            return;
        }
        for c in self.candidates[depth].clone() {
            if used[c] {
                continue;
            }
            let (mut m, mut u, mut l) = (map.clone(), used.clone(), mapped.clone());
            m[g] = Some(c);
            u[c] = true;
            l.push(g);
            if self.extend(&mut m, &mut u, &mut l, g) {
                self.search(depth + 1, m, u, l);
            }
            if !self.find_all && !self.found.is_empty() {
                return;
            }
        }
    }
}

fn isomorphisms(src: &LoopTable, dst: &LoopTable, find_all: bool) -> Vec<Perm> {
    let n = src.order();
    if n != dst.order() {
        return Vec::new();
    }
    let (ps, pd) = (profiles(src), profiles(dst));
    let mut ms: Vec<_> = ps.clone();
    let mut md: Vec<_> = pd.clone();
    ms.sort();
    md.sort();
    if ms != md {
        return Vec::new();
    }
    let gens = generating_sequence(src);
    let candidates = gens
        .iter()
        .map(|&g| (0..n).filter(|&c| pd[c] == ps[g]).collect())
        .collect();
    let mut map = vec![None; n];
    let mut used = vec![false; n];
    map[0] = Some(0);
    used[0] = true;
    let mut s = IsoSearch { src, dst, gens, candidates, find_all, found: Vec::new() };
    s.search(0, map, used, vec![0]);
    s.found.sort();
    s.found
}

/// Some isomorphism `src -> dst`, if one exists.
pub fn find_isomorphism(src: &LoopTable, dst: &LoopTable) -> Option<Perm> {
    isomorphisms(src, dst, false).into_iter().next()
}

pub fn are_isomorphic(a: &LoopTable, b: &LoopTable) -> bool {
    find_isomorphism(a, b).is_some()
}

/// The full automorphism group, sorted by image array.
pub fn automorphisms(q: &LoopTable) -> Result<Vec<Perm>, StructureError> {
    automorphisms_with_limit(q, DESK_SCALE_LIMIT)
}

pub fn automorphisms_with_limit(q: &LoopTable, limit: usize) -> Result<Vec<Perm>, StructureError> {
    if q.order() > limit {
        return Err(StructureError::OrderTooLarge { order: q.order(), limit });
    }
    Ok(isomorphisms(q, q, true))
}

/// `alpha` is nuclear iff `x alpha` lies in `xN` for every `x`.
pub fn is_nuclear_map(q: &LoopTable, nuc: &ElemSet, alpha: &Perm) -> bool {
    q.elements().all(|x| nuc.contains(q.ldiv(x, alpha.apply(x))))
}

pub fn nuclear_automorphisms(q: &LoopTable) -> Result<Vec<Perm>, StructureError> {
    let nuc = nucleus(q);
    Ok(automorphisms(q)?.into_iter().filter(|a| is_nuclear_map(q, &nuc, a)).collect())
}

/// True if `sub` is closed under conjugation by every element of `group`.
pub fn is_normal_subgroup_of(sub: &[Perm], group: &[Perm]) -> bool {
    let members: BTreeSet<&Perm> = sub.iter().collect();
    group.iter().all(|b| {
        let bi = b.inverse();
        sub.iter().all(|a| members.contains(&bi.then(a).then(b)))
    })
}

/// Coset partition by left cosets `xH`, in order of least member.
fn coset_partition(q: &LoopTable, h: &ElemSet) -> Result<Vec<usize>, NormalityWitness> {
    let n = q.order();
    let mut class = vec![usize::MAX; n];
    let mut rep = Vec::new();
    for x in 0..n {
        if class[x] != usize::MAX {
            continue;
        }
        let id = rep.len();
        rep.push(x);
        for m in h.iter() {
            let y = q.mul(x, m);
            if class[y] != usize::MAX {
                return Err(NormalityWitness::Overlap { a: rep[class[y]], b: x });
            }
            class[y] = id;
        }
    }
    Ok(class)
}

/// `None` if `h` is normal; otherwise evidence that the coset relation is
/// not a congruence. `h` must be a subloop.
pub fn normality_witness(q: &LoopTable, h: &ElemSet) -> Option<NormalityWitness> {
    let class = match coset_partition(q, h) {
        Ok(c) => c,
        Err(w) => return Some(w),
    };
    let n = q.order();
    let k = n / h.len();
    // first representative pair seen for each coset product
    let mut seen: Vec<Option<(Elem, Elem, usize)>> = vec![None; k * k];
    for x in 0..n {
        for y in 0..n {
            let slot = class[x] * k + class[y];
            let c = class[q.mul(x, y)];
            match seen[slot] {
                None => seen[slot] = Some((x, y, c)),
                Some((x1, y1, c1)) if c1 != c => {
                    return Some(NormalityWitness::Product { x1, y1, x2: x, y2: y });
                }
                _ => {}
            }
        }
    }
    None
}

fn require_subloop(q: &LoopTable, h: &ElemSet) -> Result<(), StructureError> {
    if !h.contains(0) || closure(q, h) != *h {
        return Err(StructureError::NotSubloop(h.clone()));
    }
    Ok(())
}

pub fn is_normal(q: &LoopTable, h: &ElemSet) -> Result<bool, StructureError> {
    require_subloop(q, h)?;
    Ok(normality_witness(q, h).is_none())
}

/// Normality as invariance under every `T_x`, `R(x,y)`, `L(x,y)`.
pub fn is_normal_by_inner_maps(q: &LoopTable, h: &ElemSet) -> Result<bool, StructureError> {
    require_subloop(q, h)?;
    for x in q.elements() {
        if t_map(q, x).image_of(h) != *h {
            return Ok(false);
        }
        for y in q.elements() {
            let (r, l) = inner_maps(q, x, y);
            if r.image_of(h) != *h || l.image_of(h) != *h {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quotient {
    pub table: LoopTable,
    /// `projection[x]` is the coset label of `x`; label `0` is `H`.
    pub projection: Vec<Elem>,
    /// Cosets in label order, sorted by least member.
    pub cosets: Vec<ElemSet>,
}

pub fn quotient(q: &LoopTable, h: &ElemSet) -> Result<Quotient, StructureError> {
    require_subloop(q, h)?;
    if let Some(w) = normality_witness(q, h) {
        return Err(StructureError::NotNormal(w));
    }
    let class = coset_partition(q, h).expect("normal subloop partitions");
    let k = q.order() / h.len();
    let mut reps = vec![usize::MAX; k];
    for (x, &c) in class.iter().enumerate() {
        if reps[c] == usize::MAX {
            reps[c] = x;
        }
    }
    let table = LoopTable::from_fn(k, |a, b| class[q.mul(reps[a], reps[b])]).expect("quotient of a loop is a loop");
    let mut cosets = vec![ElemSet::empty(q.order()); k];
    for (x, &c) in class.iter().enumerate() {
        cosets[c].insert(x);
    }
    Ok(Quotient { table, projection: class, cosets })
}

/// Every subloop, sorted by order then members.
pub fn all_subloops(q: &LoopTable) -> Result<Vec<SubloopInfo>, StructureError> {
    let n = q.order();
    if n > DESK_SCALE_LIMIT {
        return Err(StructureError::OrderTooLarge { order: n, limit: DESK_SCALE_LIMIT });
    }
    let trivial = ElemSet::from_slice(n, &[0]);
    let mut found: HashMap<ElemSet, Vec<Elem>> = HashMap::from([(trivial.clone(), Vec::new())]);
    let mut queue = VecDeque::from([trivial]);
    while let Some(s) = queue.pop_front() {
        let gens = found[&s].clone();
        for e in (0..n).filter(|&e| !s.contains(e)) {
            let mut t = s.clone();
            t.insert(e);
            let t = closure(q, &t);
            if !found.contains_key(&t) {
                let mut g = gens.clone();
                g.push(e);
                found.insert(t.clone(), g);
                queue.push_back(t);
            }
        }
    }
    let mut out: Vec<SubloopInfo> = found
        .into_iter()
        .map(|(members, generators)| {
            let is_normal = normality_witness(q, &members).is_none();
            SubloopInfo { members, is_normal, generators }
        })
        .collect();
    out.sort_by(|a, b| a.members.cmp(&b.members));
    Ok(out)
}

/// Strong Lagrange: for subloops `K <= H`, `|K|` divides `|H|`.
pub fn lagrange_check(q: &LoopTable) -> Result<bool, StructureError> {
    let subs = all_subloops(q)?;
    Ok(subs.iter().all(|h| {
        subs.iter()
            .filter(|k| k.members.is_subset(&h.members))
            .all(|k| h.order() % k.order() == 0)
    }))
}

pub fn prime_power(n: usize) -> Option<(usize, u32)> {
    if n < 2 {
        return None;
    }
    let p = (2..=n).find(|d| n % d == 0)?;
    let mut m = n;
    let mut k = 0;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    (m == 1).then_some((p, k))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterTowerReport {
    pub prime: usize,
    pub exponent: u32,
    pub center_order: usize,
    /// `|Z| = p^r`, if `|Z|` is a power of `p`.
    pub r: Option<u32>,
    /// `r` is neither `0` nor `exponent - 1`.
    pub r_allowed: bool,
    /// Normal subloops of order `p^0, p^1, ..., p^exponent`, if the
    /// construction succeeded.
    pub normal_chain: Option<Vec<ElemSet>>,
}

impl CenterTowerReport {
    pub fn holds(&self) -> bool {
        self.r_allowed && self.normal_chain.is_some()
    }
}

fn log_p(m: usize, p: usize) -> Option<u32> {
    let mut m = m;
    let mut r = 0;
    while m > 1 {
        if m % p != 0 {
            return None;
        }
        m /= p;
        r += 1;
    }
    Some(r)
}

/// Normal subloops of each order `p^m`, built from a central subgroup of
/// order `p` and recursion through the quotient.
fn normal_chain(q: &LoopTable, p: usize) -> Option<Vec<ElemSet>> {
    let n = q.order();
    let trivial = ElemSet::from_slice(n, &[0]);
    if n == 1 {
        return Some(vec![trivial]);
    }
    let z = center(q);
    let c = z.iter().find(|&x| x != 0)?;
    // element of order p inside the cyclic group <c>
    let ord = element_order(q, c);
    let w = q.power(c, (ord / p) as i64).ok()?;
    let pgroup = closure(q, &ElemSet::from_slice(n, &[w]));
    if pgroup.len() != p {
        return None;
    }
    let quot = quotient(q, &pgroup).ok()?;
    let sub = normal_chain(&quot.table, p)?;
    let mut chain = vec![trivial];
    for s in sub {
        chain.push(ElemSet::from_iter(n, (0..n).filter(|&x| s.contains(quot.projection[x]))));
    }
    let ok = chain
        .iter()
        .enumerate()
        .all(|(m, h)| h.len() == p.pow(m as u32) && normality_witness(q, h).is_none() && closure(q, h) == *h);
    ok.then_some(chain)
}

pub fn center_tower_check(q: &LoopTable) -> Result<CenterTowerReport, StructureError> {
    let (p, k) = prime_power(q.order()).ok_or(StructureError::NotPrimePower(q.order()))?;
    if !is_cc(q) {
        return Err(StructureError::NotCC);
    }
    let center_order = center(q).len();
    let r = log_p(center_order, p);
    let r_allowed = matches!(r, Some(r) if r != 0 && r + 1 != k);
    Ok(CenterTowerReport {
        prime: p,
        exponent: k,
        center_order,
        r,
        r_allowed,
        normal_chain: normal_chain(q, p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(n: usize, xs: &[Elem]) -> ElemSet {
        ElemSet::from_slice(n, xs)
    }

    #[test]
    fn trivial_and_translation_autotopisms() {
        for q in [fixtures::t16(), fixtures::t27()] {
            let n = q.order();
            let id = Perm::identity(n);
            assert!(is_autotopism(&q, &id, &id, &id));
            for x in q.elements() {
                let (l, r) = q.translations(x);
                let f = l.then(&r.inverse());
                assert!(is_autotopism(&q, &f, &l, &l), "x = {x}");
                let (f2, _) = q.fg_maps(x);
                assert_eq!(f, f2);
            }
        }
        let d4 = fixtures::dihedral(4);
        let id = Perm::identity(8);
        for a in d4.elements() {
            let la = d4.left(a);
            assert!(Autotopism::new(&d4, la.clone(), id.clone(), la).is_ok());
        }
    }

    #[test]
    fn fixture_nuclei_and_centers() {
        let t27 = fixtures::t27();
        let n = nuclei(&t27);
        assert_eq!(n.nucleus, set(27, &[0, 1, 2]));
        assert_eq!(n.left, n.middle);
        assert_eq!(n.middle, n.right);
        assert_eq!(center(&t27), set(27, &[0, 1, 2]));
        assert_eq!(commutant(&t27), center(&t27));
        let t16 = fixtures::t16();
        assert_eq!(nucleus(&t16), set(16, &[0, 1, 2, 3]));
        assert_eq!(center(&t16), set(16, &[0, 1, 2, 3]));
        let d3 = fixtures::dihedral(3);
        assert_eq!(nucleus(&d3), ElemSet::full(6));
        assert_eq!(center(&d3), set(6, &[0]));
        assert_eq!(center(&fixtures::cyclic(5)), ElemSet::full(5));
    }

    #[test]
    fn subloop_generation() {
        let t16 = fixtures::t16();
        assert_eq!(generate_subloop(&t16, &set(16, &[4, 8])).members, ElemSet::full(16));
        assert_eq!(generate_subloop(&t16, &set(16, &[0])).members, set(16, &[0]));
        let t27 = fixtures::t27();
        let h = generate_subloop(&t27, &set(27, &[3, 9]));
        assert!(h.order() >= 9);
        assert!(!is_associative_subset(&t27, &h.members));
        assert_eq!(t27.mul(9, 6), 16);
        assert_eq!(t27.mul(12, 3), 15);
    }

    #[test]
    fn associating_triples() {
        let t16 = fixtures::t16();
        let z = set(16, &[0]);
        assert!(associates(&t16, &z, &z, &z));
        let nuc = set(16, &[0, 1, 2, 3]);
        assert!(associates(&t16, &nuc, &nuc, &nuc));
        let s = set(16, &[4, 8]);
        assert!(!associates(&t16, &s, &s, &s));
    }

    #[test]
    fn associators() {
        let t16 = fixtures::t16();
        // 4*(8*4) = 4*15 = 9, (4*8)*4 = 12*4 = 11, 9 \ 11 = 2
        assert_eq!(t16.mul(4, t16.mul(8, 4)), 9);
        assert_eq!(t16.mul(t16.mul(4, 8), 4), 11);
        assert_eq!(associator(&t16, 4, 8, 4).0, 2);
        let d4 = fixtures::dihedral(4);
        for x in d4.elements() {
            for y in d4.elements() {
                assert_eq!(associator(&d4, x, y, 3), (0, 0));
            }
        }
        let t27 = fixtures::t27();
        let (p, _) = associator(&t27, 9, 3, 3);
        assert_eq!(p, t27.ldiv(16, 15));
        assert_ne!(p, 0);
        assert!(nucleus(&t27).contains(p));
    }

    #[test]
    fn inner_mappings() {
        let d3 = fixtures::dihedral(3);
        for x in d3.elements() {
            for y in d3.elements() {
                let (r, l) = inner_maps(&d3, x, y);
                assert!(r.is_identity() && l.is_identity());
            }
        }
        let t16 = fixtures::t16();
        let (_, l84) = inner_maps(&t16, 8, 4);
        assert!(!l84.is_identity());
        // z L(y,x) = z (x,y,z)^-1
        for z in t16.elements() {
            let a = associator(&t16, 4, 8, z).0;
            assert_eq!(l84.apply(z), t16.mul(z, t16.rinv(a)));
        }
        let t27 = fixtures::t27();
        let maps: Vec<Perm> = t27
            .elements()
            .flat_map(|x| t27.elements().map(move |y| (x, y)))
            .flat_map(|(x, y)| {
                let (r, l) = inner_maps(&t27, x, y);
                [r, l]
            })
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        for a in &maps {
            for b in &maps {
                assert!(a.commutes_with(b));
            }
        }
    }

    #[test]
    fn automorphism_groups() {
        assert_eq!(automorphisms(&fixtures::cyclic(3)).unwrap().len(), 2);
        assert_eq!(automorphisms(&fixtures::cyclic(8)).unwrap().len(), 4);
        assert_eq!(automorphisms(&fixtures::klein()).unwrap().len(), 6);
        assert_eq!(automorphisms(&fixtures::dihedral(3)).unwrap().len(), 6);
        assert_eq!(automorphisms(&fixtures::quaternion()).unwrap().len(), 24);
        for q in [fixtures::t16(), fixtures::cyclic(5)] {
            let auts = automorphisms(&q).unwrap();
            assert!(auts.contains(&Perm::identity(q.order())));
            for a in &auts {
                assert!(is_automorphism(&q, a));
            }
        }
        let big = fixtures::cyclic(65);
        assert!(matches!(automorphisms(&big), Err(StructureError::OrderTooLarge { .. })));
    }

    #[test]
    fn t16_inverse_map_automorphism_matches_aip() {
        let t16 = fixtures::t16();
        let auts = automorphisms(&t16).unwrap();
        let j = t16.rho();
        assert_eq!(auts.contains(&j), crate::identities::has_aip(&t16));
        let t27 = fixtures::t27();
        assert!(is_automorphism(&t27, &t27.rho()));
    }

    #[test]
    fn nuclear_automorphisms_form_a_normal_subgroup() {
        for q in [fixtures::t16(), fixtures::t27()] {
            let auts = automorphisms(&q).unwrap();
            let naut = nuclear_automorphisms(&q).unwrap();
            assert!(is_normal_subgroup_of(&naut, &auts));
        }
        // for groups every automorphism is nuclear
        let d4 = fixtures::dihedral(4);
        assert_eq!(nuclear_automorphisms(&d4).unwrap(), automorphisms(&d4).unwrap());
    }

    #[test]
    fn isomorphism_detection() {
        let z4 = fixtures::cyclic(4);
        let mut rng = rand::thread_rng();
        let z4b = fixtures::random_relabel(&z4, &mut rng);
        let iso = find_isomorphism(&z4, &z4b).unwrap();
        assert_eq!(z4.relabel(&iso), z4b);
        assert!(!are_isomorphic(&z4, &fixtures::klein()));
        assert!(!are_isomorphic(&fixtures::t16(), &fixtures::cayley_loop()));
    }

    #[test]
    fn quotients() {
        let t27 = fixtures::t27();
        let qn = quotient(&t27, &set(27, &[0, 1, 2])).unwrap();
        assert_eq!(qn.table.order(), 9);
        assert!(crate::identities::is_group(&qn.table));
        assert!(crate::identities::is_commutative(&qn.table));
        assert!(qn.table.elements().all(|x| qn.table.power(x, 3).unwrap() == 0));
        let h9 = ElemSet::from_iter(27, 0..9);
        assert!(is_normal(&t27, &h9).unwrap());
        let q3 = quotient(&t27, &h9).unwrap();
        assert_eq!(q3.table, fixtures::cyclic(3));

        let t16 = fixtures::t16();
        let qn = quotient(&t16, &set(16, &[0, 1, 2, 3])).unwrap();
        assert!(crate::identities::is_boolean_group(&qn.table));
        assert_eq!(qn.table.order(), 4);
        assert_eq!(qn.cosets[0], set(16, &[0, 1, 2, 3]));
    }

    #[test]
    fn non_normal_and_non_subloop() {
        let d3 = fixtures::dihedral(3);
        // {0, 3} = {1, t} is a non-normal subgroup of S3
        let h = set(6, &[0, 3]);
        assert!(!is_normal(&d3, &h).unwrap());
        assert!(!is_normal_by_inner_maps(&d3, &h).unwrap());
        assert!(matches!(quotient(&d3, &h), Err(StructureError::NotNormal(_))));
        assert!(matches!(is_normal(&d3, &set(6, &[0, 1])), Err(StructureError::NotSubloop(_))));
        let rot = set(6, &[0, 1, 2]);
        assert!(is_normal(&d3, &rot).unwrap());
        assert!(is_normal_by_inner_maps(&d3, &rot).unwrap());
    }

    #[test]
    fn normality_tests_agree_on_fixtures() {
        for q in [fixtures::t16(), fixtures::t27()] {
            for h in all_subloops(&q).unwrap() {
                assert_eq!(h.is_normal, is_normal_by_inner_maps(&q, &h.members).unwrap(), "{}", h.members);
            }
        }
    }

    #[test]
    fn subloop_enumeration() {
        let orders = |q: &LoopTable| -> BTreeSet<usize> { all_subloops(q).unwrap().iter().map(|h| h.order()).collect() };
        assert_eq!(orders(&fixtures::cyclic(6)), BTreeSet::from([1, 2, 3, 6]));
        assert_eq!(all_subloops(&fixtures::cyclic(6)).unwrap().len(), 4);
        assert_eq!(all_subloops(&fixtures::klein()).unwrap().len(), 5);
        assert_eq!(all_subloops(&fixtures::dihedral(3)).unwrap().len(), 6);
        assert!(orders(&fixtures::t27()).is_subset(&BTreeSet::from([1, 3, 9, 27])));
        assert!(orders(&fixtures::t16()).iter().all(|o| 16 % o == 0));
        assert!(lagrange_check(&fixtures::t27()).unwrap());
        assert!(lagrange_check(&fixtures::t16()).unwrap());
    }

    #[test]
    fn center_towers() {
        let r = center_tower_check(&fixtures::t27()).unwrap();
        assert_eq!((r.prime, r.exponent, r.center_order, r.r), (3, 3, 3, Some(1)));
        assert!(r.holds());
        let chain = r.normal_chain.unwrap();
        assert_eq!(chain.iter().map(|h| h.len()).collect::<Vec<_>>(), vec![1, 3, 9, 27]);

        let r = center_tower_check(&fixtures::t16()).unwrap();
        assert_eq!((r.center_order, r.r), (4, Some(2)));
        assert!(r.holds());

        let r = center_tower_check(&fixtures::cyclic(8)).unwrap();
        assert_eq!(r.r, Some(3));
        assert!(r.holds());

        assert_eq!(center_tower_check(&fixtures::cyclic(6)), Err(StructureError::NotPrimePower(6)));
    }
}
