//! New loops from old: semidirect products, holomorphs and internal
//! decompositions.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::identities::is_cc;
use crate::structure::{self, is_autotopism, is_automorphism, is_nuclear_map, StructureError};
use crate::table::{Elem, ElemSet, LoopTable, Perm};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("bad action: {0}")]
    BadAction(String),
    #[error("action is not a homomorphism: phi_{{{a}*{b}}} != phi_{a} phi_{b}")]
    NotHomomorphism { a: Elem, b: Elem },
    #[error("phi_{0} is not an automorphism")]
    NotAutomorphism(Elem),
    #[error("{0} is not conjugacy closed")]
    NotCC(&'static str),
    #[error("{0} is not a subloop")]
    NotSubloop(ElemSet),
    #[error("K is not normal")]
    NotNormal,
    #[error("A and K are not complementary: {0}")]
    NotComplementary(String),
    #[error("({condition}) does not associate: witness ({}, {}, {})", witness.0, witness.1, witness.2)]
    TriplesFail { condition: &'static str, witness: (Elem, Elem, Elem) },
    #[error("sidecar line {line}: {message}")]
    Sidecar { line: usize, message: String },
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// `a -> phi_a`, a map from the elements of `A` into `Sym(K)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionMap {
    k_order: usize,
    maps: Vec<Perm>,
}

impl ActionMap {
    pub fn new(a: &LoopTable, k: &LoopTable, maps: Vec<Perm>) -> Result<Self, ConstructError> {
        if maps.len() != a.order() {
            return Err(ConstructError::BadAction(format!("{} maps for {} elements", maps.len(), a.order())));
        }
        for (i, p) in maps.iter().enumerate() {
            if p.len() != k.order() {
                return Err(ConstructError::BadAction(format!("phi_{i} acts on {} points, K has {}", p.len(), k.order())));
            }
            if p.apply(0) != 0 {
                return Err(ConstructError::BadAction(format!("phi_{i} moves the identity")));
            }
        }
        if !maps[0].is_identity() {
            return Err(ConstructError::BadAction("phi of the identity is not the identity".into()));
        }
        Ok(ActionMap { k_order: k.order(), maps })
    }

    pub fn trivial(a: &LoopTable, k: &LoopTable) -> Self {
        ActionMap { k_order: k.order(), maps: vec![Perm::identity(k.order()); a.order()] }
    }

    /// `Z_m` acting on `K` through powers of `beta`, where `m` is the order of `beta`.
    pub fn cyclic_powers(k: &LoopTable, beta: &Perm) -> (LoopTable, Self) {
        let m = beta.order();
        let maps = (0..m as i64).map(|i| beta.pow(i)).collect();
        (LoopTable::cyclic(m), ActionMap { k_order: k.order(), maps })
    }

    pub fn phi(&self, a: Elem) -> &Perm {
        &self.maps[a]
    }

    pub fn maps(&self) -> &[Perm] {
        &self.maps
    }

    pub fn k_order(&self) -> usize {
        self.k_order
    }

    /// First `(a, b)` with `phi_{ab} != phi_a phi_b`.
    pub fn homomorphism_violation(&self, a: &LoopTable) -> Option<(Elem, Elem)> {
        for x in a.elements() {
            for y in a.elements() {
                if self.maps[a.mul(x, y)] != self.maps[x].then(&self.maps[y]) {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// One line per element: `a: i0 i1 ...`.
    pub fn to_sidecar(&self) -> String {
        let mut out = String::new();
        for (a, p) in self.maps.iter().enumerate() {
            let imgs: Vec<String> = p.images().iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{a}: {}", imgs.join(" "));
        }
        out
    }

    pub fn parse_sidecar(src: &str, a: &LoopTable, k: &LoopTable) -> Result<Self, ConstructError> {
        let mut found: BTreeMap<Elem, Perm> = BTreeMap::new();
        for (i, raw) in src.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| ConstructError::Sidecar { line: i + 1, message };
            let (key, rest) = line.split_once(':').ok_or_else(|| err("expected `a: images`".into()))?;
            let key: Elem = key.trim().parse().map_err(|_| err(format!("bad element `{}`", key.trim())))?;
            if key >= a.order() {
                return Err(err(format!("element {key} out of range")));
            }
            let imgs = rest
                .trim()
                .trim_start_matches('[')
                .trim_end_matches(']')
                .split_whitespace()
                .map(|t| t.parse::<Elem>().map_err(|_| err(format!("bad image `{t}`"))))
                .collect::<Result<Vec<_>, _>>()?;
            let p = Perm::from_images(imgs).map_err(|e| err(e.to_string()))?;
            if found.insert(key, p).is_some() {
                return Err(err(format!("element {key} listed twice")));
            }
        }
        let maps: Vec<Perm> = a
            .elements()
            .map(|x| found.remove(&x).ok_or_else(|| ConstructError::BadAction(format!("no map for element {x}"))))
            .collect::<Result<_, _>>()?;
        ActionMap::new(a, k, maps)
    }
}

/// `(a,x)(b,y) = (ab, (x)phi_b * y)`, with `(a,x)` stored at `a*|K| + x`.
pub fn semidirect(a: &LoopTable, k: &LoopTable, phi: &ActionMap) -> Result<LoopTable, ConstructError> {
    if phi.maps.len() != a.order() || phi.k_order != k.order() {
        return Err(ConstructError::BadAction("action does not match the factors".into()));
    }
    let m = k.order();
    LoopTable::from_fn(a.order() * m, |p, q| {
        let (pa, px) = (p / m, p % m);
        let (qb, qy) = (q / m, q % m);
        a.mul(pa, qb) * m + k.mul(phi.maps[qb].apply(px), qy)
    })
    .map_err(|e| ConstructError::BadAction(e.to_string()))
}

/// `(a,x) \ (b,y) = (a\b, [(x)phi_{a\b}] \ y)`.
pub fn semidirect_ldiv(a: &LoopTable, k: &LoopTable, phi: &ActionMap, p: Elem, q: Elem) -> Elem {
    let m = k.order();
    let c = a.ldiv(p / m, q / m);
    c * m + k.ldiv(phi.maps[c].apply(p % m), q % m)
}

/// `(a,x) / (b,y) = (a/b, (x/y) phi_b^-1)`.
pub fn semidirect_rdiv(a: &LoopTable, k: &LoopTable, phi: &ActionMap, p: Elem, q: Elem) -> Elem {
    let m = k.order();
    let (b, y) = (q / m, q % m);
    a.rdiv(p / m, b) * m + phi.maps[b].inverse().apply(k.rdiv(p % m, y))
}

/// `U(x,b) = (L_{x^b} R_x^-1, L_x, L_{x^b})`.
pub fn u_triple(k: &LoopTable, phi: &Perm, x: Elem) -> (Perm, Perm, Perm) {
    let xb = phi.apply(x);
    let (lx, rx) = k.translations(x);
    let lxb = k.left(xb);
    (lxb.then(&rx.inverse()), lx, lxb)
}

/// `V(x,b) = (R_x, R_{x^b} L_x^-1, R_{x^b})`.
pub fn v_triple(k: &LoopTable, phi: &Perm, x: Elem) -> (Perm, Perm, Perm) {
    let xb = phi.apply(x);
    let (lx, rx) = k.translations(x);
    let rxb = k.right(xb);
    (rx, rxb.then(&lx.inverse()), rxb)
}

/// The three equivalent conditions for a semidirect product of CC-loops.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoremCheck {
    /// The product is CC.
    pub cc: bool,
    /// Every `phi_b` is a nuclear automorphism.
    pub nuclear: bool,
    /// Every `U(x,b)` and `V(x,b)` is an autotopism of `K`.
    pub triples: bool,
}

impl TheoremCheck {
    pub fn agree(&self) -> bool {
        self.cc == self.nuclear && self.nuclear == self.triples
    }
}

pub fn check_semidirect_theorem(a: &LoopTable, k: &LoopTable, phi: &ActionMap) -> Result<TheoremCheck, ConstructError> {
    if !is_cc(a) {
        return Err(ConstructError::NotCC("A"));
    }
    if !is_cc(k) {
        return Err(ConstructError::NotCC("K"));
    }
    for (b, p) in phi.maps.iter().enumerate() {
        if !is_automorphism(k, p) {
            return Err(ConstructError::NotAutomorphism(b));
        }
    }
    if let Some((x, y)) = phi.homomorphism_violation(a) {
        return Err(ConstructError::NotHomomorphism { a: x, b: y });
    }
    let product = semidirect(a, k, phi)?;
    let nuc = structure::nucleus(k);
    let nuclear = phi.maps.iter().all(|p| is_nuclear_map(k, &nuc, p));
    let triples = phi.maps.iter().all(|p| {
        k.elements().all(|x| {
            let (u1, u2, u3) = u_triple(k, p, x);
            let (v1, v2, v3) = v_triple(k, p, x);
            is_autotopism(k, &u1, &u2, &u3) && is_autotopism(k, &v1, &v2, &v3)
        })
    });
    Ok(TheoremCheck { cc: is_cc(&product), nuclear, triples })
}

/// Cayley table of a permutation group under right-action composition.
/// Elements are sorted by image array, so the identity is element `0`.
pub fn permutation_group_table(perms: &[Perm]) -> Result<(LoopTable, Vec<Perm>), ConstructError> {
    let mut sorted = perms.to_vec();
    sorted.sort();
    sorted.dedup();
    let index: BTreeMap<&Perm, Elem> = sorted.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let n = sorted.len();
    for p in &sorted {
        for q in &sorted {
            if !index.contains_key(&p.then(q)) {
                return Err(ConstructError::BadAction("permutations not closed under composition".into()));
            }
        }
    }
    let table = LoopTable::from_fn(n, |i, j| index[&sorted[i].then(&sorted[j])])
        .map_err(|e| ConstructError::BadAction(e.to_string()))?;
    Ok((table, sorted))
}

#[derive(Debug, Clone)]
pub struct Holomorph {
    /// `G ⋉ Q` with `G` acting naturally.
    pub table: LoopTable,
    pub group: LoopTable,
    /// `group` element `i` is `perms[i]`.
    pub perms: Vec<Perm>,
}

/// `NAut(Q) ⋉ Q`, or `G ⋉ Q` for a given subgroup `G` of `NAut(Q)`.
pub fn holomorph(q: &LoopTable, subgroup: Option<&[Perm]>) -> Result<Holomorph, ConstructError> {
    if !is_cc(q) {
        return Err(ConstructError::NotCC("Q"));
    }
    let naut = structure::nuclear_automorphisms(q)?;
    let perms = match subgroup {
        None => naut,
        Some(g) => {
            if let Some(p) = g.iter().find(|p| !naut.contains(p)) {
                return Err(ConstructError::BadAction(format!("{p} is not a nuclear automorphism")));
            }
            let mut g = g.to_vec();
            if !g.iter().any(|p| p.is_identity()) {
                g.push(Perm::identity(q.order()));
            }
            g
        }
    };
    let (group, perms) = permutation_group_table(&perms)?;
    let phi = ActionMap::new(&group, q, perms.clone())?;
    let table = semidirect(&group, q, &phi)?;
    Ok(Holomorph { table, group, perms })
}

/// Failure of one of the associating conditions `(K,A,K)`, `(A,A,K)`,
/// `(A,K,Q)`, each checked independently.
pub fn triple_conditions(q: &LoopTable, a: &ElemSet, k: &ElemSet) -> [(&'static str, Option<(Elem, Elem, Elem)>); 3] {
    let all = ElemSet::full(q.order());
    let witness = |x: &ElemSet, y: &ElemSet, z: &ElemSet| {
        x.iter().find_map(|u| {
            y.iter().find_map(|v| {
                z.iter()
                    .find(|&w| q.mul(u, q.mul(v, w)) != q.mul(q.mul(u, v), w))
                    .map(|w| (u, v, w))
            })
        })
    };
    [
        ("K,A,K", witness(k, a, k)),
        ("A,A,K", witness(a, a, k)),
        ("A,K,Q", witness(a, k, &all)),
    ]
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    pub a: LoopTable,
    pub k: LoopTable,
    /// Element `i` of `a` (resp. `k`) is `a_elems[i]` (resp. `k_elems[i]`) in `Q`.
    pub a_elems: Vec<Elem>,
    pub k_elems: Vec<Elem>,
    /// `phi_a = R_a L_a^-1` restricted to `K`.
    pub action: ActionMap,
    /// `(a, x) -> a*x`, from the external product to `Q`.
    pub isomorphism: Perm,
}

pub fn internal_decompose(q: &LoopTable, a_set: &ElemSet, k_set: &ElemSet) -> Result<Decomposition, ConstructError> {
    for s in [a_set, k_set] {
        if !s.contains(0) || structure::closure(q, s) != *s {
            return Err(ConstructError::NotSubloop(s.clone()));
        }
    }
    if structure::normality_witness(q, k_set).is_some() {
        return Err(ConstructError::NotNormal);
    }
    if a_set.intersection(k_set).len() != 1 {
        return Err(ConstructError::NotComplementary(format!("A ∩ K = {}", a_set.intersection(k_set))));
    }
    let a_elems = a_set.to_vec();
    let k_elems = k_set.to_vec();
    let products = ElemSet::from_iter(q.order(), a_elems.iter().flat_map(|&u| k_elems.iter().map(move |&v| q.mul(u, v))));
    if products.len() != q.order() || a_elems.len() * k_elems.len() != q.order() {
        return Err(ConstructError::NotComplementary(format!("|AK| = {}", products.len())));
    }
    for (condition, w) in triple_conditions(q, a_set, k_set) {
        if let Some(witness) = w {
            return Err(ConstructError::TriplesFail { condition, witness });
        }
    }
    let a = q.restrict(a_set).expect("checked subloop");
    let k = q.restrict(k_set).expect("checked subloop");
    let mut k_index = vec![usize::MAX; q.order()];
    for (i, &x) in k_elems.iter().enumerate() {
        k_index[x] = i;
    }
    let mut maps = Vec::with_capacity(a_elems.len());
    for &u in &a_elems {
        let imgs: Vec<Elem> = k_elems.iter().map(|&x| k_index[q.ldiv(u, q.mul(x, u))]).collect();
        if imgs.contains(&usize::MAX) {
            return Err(ConstructError::BadAction(format!("R_{u} L_{u}^-1 does not preserve K")));
        }
        maps.push(Perm::from_images(imgs).map_err(|e| ConstructError::BadAction(e.to_string()))?);
    }
    let action = ActionMap::new(&a, &k, maps)?;
    let product = semidirect(&a, &k, &action)?;
    let m = k_elems.len();
    let iso = Perm::from_images((0..q.order()).map(|p| q.mul(a_elems[p / m], k_elems[p % m])).collect())
        .map_err(|e| ConstructError::BadAction(e.to_string()))?;
    if product.relabel(&iso) != *q {
        return Err(ConstructError::BadAction("(a,x) -> a*x is not an isomorphism".into()));
    }
    Ok(Decomposition { a, k, a_elems, k_elems, action, isomorphism: iso })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::identities::{is_commutative, is_group};
    use crate::structure::{are_isomorphic, automorphisms, nuclear_automorphisms};

    fn inversion(k: &LoopTable) -> Perm {
        Perm::from_images(k.elements().map(|x| k.rinv(x)).collect()).unwrap()
    }

    #[test]
    fn trivial_action_gives_direct_product() {
        let (a, k) = (fixtures::cyclic(2), fixtures::cyclic(3));
        let p = semidirect(&a, &k, &ActionMap::trivial(&a, &k)).unwrap();
        assert_eq!(p, a.direct_product(&k));
        assert!(are_isomorphic(&p, &fixtures::cyclic(6)));
    }

    #[test]
    fn inversion_action_gives_s3() {
        let (a, k) = (fixtures::cyclic(2), fixtures::cyclic(3));
        let phi = ActionMap::new(&a, &k, vec![Perm::identity(3), inversion(&k)]).unwrap();
        let p = semidirect(&a, &k, &phi).unwrap();
        assert!(is_group(&p) && !is_commutative(&p));
        assert!(are_isomorphic(&p, &fixtures::dihedral(3)));
    }

    #[test]
    fn bad_actions_are_rejected() {
        let (a, k) = (fixtures::cyclic(2), fixtures::cyclic(3));
        let swap = Perm::from_images(vec![1, 0, 2]).unwrap();
        assert!(matches!(ActionMap::new(&a, &k, vec![Perm::identity(3), swap]), Err(ConstructError::BadAction(_))));
        let inv = inversion(&k);
        assert!(matches!(ActionMap::new(&a, &k, vec![inv.clone(), inv]), Err(ConstructError::BadAction(_))));
    }

    #[test]
    fn division_formulas_match_the_table() {
        let k = fixtures::t16();
        let (a, phi) = ActionMap::cyclic_powers(&k, &nuclear_automorphisms(&k).unwrap()[1]);
        let p = semidirect(&a, &k, &phi).unwrap();
        for x in p.elements() {
            for y in p.elements() {
                assert_eq!(semidirect_ldiv(&a, &k, &phi, x, y), p.ldiv(x, y));
                assert_eq!(semidirect_rdiv(&a, &k, &phi, x, y), p.rdiv(x, y));
            }
        }
    }

    #[test]
    fn theorem_conditions_on_trivial_action() {
        for (a, k) in [(fixtures::cyclic(3), fixtures::t16()), (fixtures::dihedral(3), fixtures::cyclic(4))] {
            let t = check_semidirect_theorem(&a, &k, &ActionMap::trivial(&a, &k)).unwrap();
            assert_eq!(t, TheoremCheck { cc: true, nuclear: true, triples: true });
        }
    }

    #[test]
    fn theorem_conditions_on_non_nuclear_action() {
        for k in [fixtures::t16(), fixtures::t27()] {
            let auts = automorphisms(&k).unwrap();
            let naut = nuclear_automorphisms(&k).unwrap();
            let Some(beta) = auts.iter().find(|b| !naut.contains(b)) else { continue };
            let (a, phi) = ActionMap::cyclic_powers(&k, beta);
            let t = check_semidirect_theorem(&a, &k, &phi).unwrap();
            assert_eq!(t, TheoremCheck { cc: false, nuclear: false, triples: false });
            return;
        }
        panic!("no non-nuclear automorphism in either fixture");
    }

    #[test]
    fn non_cc_factor_is_rejected() {
        let bad = LoopTable::from_rows(&[
            [0, 1, 2, 3, 4],
            [1, 3, 0, 4, 2],
            [2, 4, 3, 1, 0],
            [3, 0, 4, 2, 1],
            [4, 2, 1, 0, 3],
        ])
        .unwrap();
        let a = fixtures::cyclic(2);
        assert_eq!(check_semidirect_theorem(&a, &bad, &ActionMap::trivial(&a, &bad)), Err(ConstructError::NotCC("K")));
    }

    #[test]
    fn non_homomorphism_is_rejected() {
        let (a, k) = (fixtures::cyclic(3), fixtures::cyclic(3));
        let inv = inversion(&k);
        let phi = ActionMap::new(&a, &k, vec![Perm::identity(3), inv.clone(), inv]).unwrap();
        assert!(matches!(check_semidirect_theorem(&a, &k, &phi), Err(ConstructError::NotHomomorphism { .. })));
    }

    #[test]
    fn holomorphs_of_small_groups() {
        let h = holomorph(&fixtures::cyclic(3), None).unwrap();
        assert_eq!(h.table.order(), 6);
        assert!(are_isomorphic(&h.table, &fixtures::dihedral(3)));
        let h = holomorph(&fixtures::cyclic(2), None).unwrap();
        assert_eq!(h.table, fixtures::cyclic(2));
        let h = holomorph(&fixtures::cyclic(3), Some(&[])).unwrap();
        assert_eq!(h.table, fixtures::cyclic(3));
    }

    #[test]
    fn sidecar_round_trip() {
        let (a, k) = (fixtures::cyclic(2), fixtures::cyclic(3));
        let phi = ActionMap::new(&a, &k, vec![Perm::identity(3), inversion(&k)]).unwrap();
        let text = phi.to_sidecar();
        assert_eq!(text, "0: 0 1 2\n1: 0 2 1\n");
        assert_eq!(ActionMap::parse_sidecar(&text, &a, &k).unwrap(), phi);
        assert!(matches!(ActionMap::parse_sidecar("0: 0 1 2\n", &a, &k), Err(ConstructError::BadAction(_))));
        assert!(matches!(ActionMap::parse_sidecar("0 0 1 2\n", &a, &k), Err(ConstructError::Sidecar { line: 1, .. })));
    }

    #[test]
    fn decomposition_of_s3() {
        let s3 = fixtures::dihedral(3);
        let a = ElemSet::from_slice(6, &[0, 3]);
        let k = ElemSet::from_slice(6, &[0, 1, 2]);
        let d = internal_decompose(&s3, &a, &k).unwrap();
        assert_eq!(d.action.phi(1).images(), vec![0, 2, 1]);
        assert!(matches!(internal_decompose(&s3, &k, &a), Err(ConstructError::NotNormal)));
    }

    #[test]
    fn trivial_decomposition() {
        let t16 = fixtures::t16();
        let d = internal_decompose(&t16, &ElemSet::from_slice(16, &[0]), &ElemSet::full(16)).unwrap();
        assert!(d.action.phi(0).is_identity());
        assert!(d.isomorphism.is_identity());
    }

    #[test]
    fn decomposition_recovers_the_action() {
        let k = fixtures::t16();
        let naut = nuclear_automorphisms(&k).unwrap();
        let beta = naut.iter().find(|b| !b.is_identity()).unwrap();
        let (a, phi) = ActionMap::cyclic_powers(&k, beta);
        let p = semidirect(&a, &k, &phi).unwrap();
        let m = k.order();
        let a_set = ElemSet::from_iter(p.order(), a.elements().map(|i| i * m));
        let k_set = ElemSet::from_iter(p.order(), 0..m);
        let d = internal_decompose(&p, &a_set, &k_set).unwrap();
        assert_eq!(d.action, phi);
        assert!(d.isomorphism.is_identity());
    }
}
