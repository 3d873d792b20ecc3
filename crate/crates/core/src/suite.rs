//! The verification battery behind `ccloop paper-suite`.
//!
//! [`check_loop`] runs every structural invariant that applies to a given
//! loop (CC-only statements are skipped on non-CC input, power-associative
//! ones on non-PA input, and so on). [`fixture_claims`] pins the concrete
//! facts about the two bundled loops, and [`construction_checks`] exercises
//! semidirect products and holomorphs.

use std::fmt;
use std::time::{Duration, Instant};

use crate::construct::{
    check_semidirect_theorem, holomorph, internal_decompose, semidirect, ActionMap, TheoremCheck,
};
use crate::fixtures;
use crate::identities::{
    check_identity, classify, is_cc, is_cc_by_conjugation, is_commutative, is_extra, is_group,
    is_moufang, is_pa, is_pa_element, is_pa_element_cc, parse_identity, wip_forms, Property,
};
use crate::structure::{
    are_isomorphic, associates, associator, automorphisms, center, center_tower_check, commutant, generate_subloop,
    inner_maps, is_associative_subset, is_autotopism, is_automorphism, is_normal, is_normal_by_inner_maps,
    is_normal_subgroup_of, lagrange_check, nuclear_automorphisms, nuclei, prime_power, quotient,
};
use crate::table::{Elem, ElemSet, LoopTable, Perm};

/// Automorphism groups are only enumerated up to this order.
const AUT_ORDER_LIMIT: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail(String),
    /// The statement's hypotheses do not hold for this subject.
    Skip,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub subject: String,
    pub verdict: Verdict,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteReport {
    pub results: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| !matches!(r.verdict, Verdict::Fail(_)))
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(|r| matches!(r.verdict, Verdict::Fail(_)))
    }

    pub fn count(&self, f: impl Fn(&Verdict) -> bool) -> usize {
        self.results.iter().filter(|r| f(&r.verdict)).count()
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.results.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in &self.results {
            let (tag, detail) = match &r.verdict {
                Verdict::Pass => ("pass", String::new()),
                Verdict::Skip => ("skip", String::new()),
                Verdict::Fail(d) => ("FAIL", format!("  {d}")),
            };
            writeln!(f, "{tag}  {:<w$}  {}{detail}", r.name, r.subject)?;
        }
        let pass = self.count(|v| *v == Verdict::Pass);
        let skip = self.count(|v| *v == Verdict::Skip);
        let fail = self.results.len() - pass - skip;
        writeln!(f, "passed {pass}, failed {fail}, skipped {skip}")
    }
}

/// Facts about a loop that several checks need.
pub struct Subject<'a> {
    pub q: &'a LoopTable,
    pub n: usize,
    pub cc: bool,
    pub pa: bool,
    pub nucleus: ElemSet,
    pub wip_pa: Vec<Elem>,
}

impl<'a> Subject<'a> {
    pub fn new(q: &'a LoopTable) -> Subject<'a> {
        let cc = is_cc(q);
        let pa = is_pa(q);
        let nucleus = nuclei(q).nucleus;
        let wip_pa = q
            .elements()
            .filter(|&c| is_pa_element(q, c) && crate::identities::is_wip_element(q, c))
            .collect();
        Subject { q, n: q.order(), cc, pa, nucleus, wip_pa }
    }

    fn pairs(&self) -> impl Iterator<Item = (Elem, Elem)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)))
    }

    fn triples(&self) -> impl Iterator<Item = (Elem, Elem, Elem)> + '_ {
        let n = self.n;
        self.pairs().flat_map(move |(x, y)| (0..n).map(move |z| (x, y, z)))
    }

    fn inv(&self, x: Elem) -> Elem {
        self.q.rinv(x)
    }

    fn pow(&self, x: Elem, k: i64) -> Elem {
        self.q.power(x, k).expect("power of a power-associative element")
    }

    fn set(&self, xs: &[Elem]) -> ElemSet {
        ElemSet::from_slice(self.n, xs)
    }
}

type CheckFn = fn(&Subject) -> Verdict;

fn pass_unless(failure: Option<String>) -> Verdict {
    match failure {
        None => Verdict::Pass,
        Some(d) => Verdict::Fail(d),
    }
}

fn require(cond: bool, check: impl FnOnce() -> Verdict) -> Verdict {
    if cond {
        check()
    } else {
        Verdict::Skip
    }
}

fn perm_eq(name: &str, x: impl fmt::Debug, a: &Perm, b: &Perm) -> Option<String> {
    (a != b).then(|| format!("{name} at {x:?}: {a} vs {b}"))
}

fn law(q: &LoopTable, src: &str) -> Option<String> {
    let id = parse_identity(src).expect("built-in law parses");
    let out = check_identity(q, &id).expect("within assignment limit");
    out.counterexample.map(|c| format!("{src} fails at {c:?}"))
}

// loop-core

fn quasigroup_cancellation(s: &Subject) -> Verdict {
    let q = s.q;
    pass_unless(s.pairs().find_map(|(x, y)| {
        let ok = q.ldiv(x, q.mul(x, y)) == y
            && q.rdiv(q.mul(x, y), y) == x
            && q.mul(x, q.ldiv(x, y)) == y
            && q.mul(q.rdiv(x, y), y) == x;
        (!ok).then(|| format!("({x},{y})"))
    }))
}

fn translations_are_permutations(s: &Subject) -> Verdict {
    pass_unless(s.q.elements().find_map(|x| {
        let (l, r) = s.q.translations(x);
        let ok = Perm::from_images(l.images()).is_ok() && Perm::from_images(r.images()).is_ok();
        (!ok).then(|| format!("x = {x}"))
    }))
}

fn inverses_are_unique(s: &Subject) -> Verdict {
    let q = s.q;
    let (lambda, rho) = q.inverse_maps();
    let unique = q.elements().find_map(|x| {
        let right: Vec<Elem> = q.elements().filter(|&z| q.mul(x, z) == 0).collect();
        let left: Vec<Elem> = q.elements().filter(|&z| q.mul(z, x) == 0).collect();
        (right != [rho.apply(x)] || left != [lambda.apply(x)]).then(|| format!("x = {x}"))
    });
    let d1 = q.d_map(0);
    pass_unless(
        unique
            .or_else(|| perm_eq("rho = D_1", 0, &rho, &d1))
            .or_else(|| perm_eq("lambda = D_1^-1", 0, &lambda, &d1.inverse())),
    )
}

fn f_g_translation_forms(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc, || {
        pass_unless(q.elements().find_map(|x| {
            let (l, r) = q.translations(x);
            let (f, g) = q.fg_maps(x);
            perm_eq("F = L R^-1", x, &f, &l.then(&r.inverse()))
                .or_else(|| perm_eq("F = R_rho L", x, &f, &q.right(q.rinv(x)).then(&l)))
                .or_else(|| perm_eq("G = R L^-1", x, &g, &r.then(&l.inverse())))
                .or_else(|| perm_eq("G = L_lambda R", x, &g, &q.left(q.linv(x)).then(&r)))
        }))
    })
}

fn f_g_are_inverse(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc, || {
        pass_unless(q.elements().find_map(|x| {
            let (f, g) = q.fg_maps(x);
            (!f.then(&g).is_identity() || !g.then(&f).is_identity()).then(|| format!("x = {x}"))
        }))
    })
}

fn e_commutes_with_translations(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc, || {
        pass_unless(q.elements().filter(|&x| is_pa_element(q, x)).find_map(|x| {
            let e = q.e_map(x);
            (!e.commutes_with(&q.left(x)) || !e.commutes_with(&q.right(x))).then(|| format!("x = {x}"))
        }))
    })
}

fn e_sixth_power(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc && s.pa, || {
        pass_unless(q.elements().find_map(|x| (!q.e_map(x).pow(6).is_identity()).then(|| format!("x = {x}"))))
    })
}

fn powers_are_consistent(s: &Subject) -> Verdict {
    let q = s.q;
    pass_unless(q.elements().filter(|&x| is_pa_element(q, x)).find_map(|x| {
        if s.pow(x, -1) != q.rinv(x) || s.pow(x, 0) != 0 || s.pow(x, 1) != x {
            return Some(format!("x = {x}"));
        }
        (-6i64..=6).find_map(|a| {
            (-6i64..=6).find_map(|b| {
                (q.mul(s.pow(x, a), s.pow(x, b)) != s.pow(x, a + b)).then(|| format!("x = {x}, {a} + {b}"))
            })
        })
    }))
}

// identities

fn cc_two_paths(s: &Subject) -> Verdict {
    let by_conj = is_cc_by_conjugation(s.q);
    pass_unless((s.cc != by_conj).then(|| format!("identity {} vs conjugation {by_conj}", s.cc)))
}

fn pa_two_paths(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc, || {
        pass_unless(q.elements().find_map(|a| (is_pa_element(q, a) != is_pa_element_cc(q, a)).then(|| format!("a = {a}"))))
    })
}

fn wip_forms_agree(s: &Subject) -> Verdict {
    let q = s.q;
    pass_unless(q.elements().find_map(|c| {
        let f = wip_forms(q, c);
        f.iter().any(|&b| b != f[0]).then(|| format!("c = {c}: {f:?}"))
    }))
}

fn classify_witnesses(s: &Subject) -> Verdict {
    let r = classify(s.q);
    let bad = Property::ALL.iter().find_map(|&p| {
        let direct = p.holds(s.q);
        if r.get(p) != direct {
            return Some(format!("{p}: report {} vs direct {direct}", r.get(p)));
        }
        match (r.get(p), r.witnesses.get(&p)) {
            (true, None) => None,
            (false, Some(w)) if w.recheck(s.q) => None,
            _ => Some(format!("{p}: witness missing or not a violation")),
        }
    });
    pass_unless(bad)
}

fn extra_two_paths(s: &Subject) -> Verdict {
    let direct = is_extra(s.q);
    let derived = s.cc && is_moufang(s.q);
    pass_unless((direct != derived).then(|| format!("identity {direct} vs cc+moufang {derived}")))
}

fn aaip_forces_extra(s: &Subject) -> Verdict {
    require(s.cc && Property::Aaip.holds(s.q), || pass_unless((!is_extra(s.q)).then(|| "not extra".into())))
}

fn commutative_cc_is_group(s: &Subject) -> Verdict {
    require(s.cc && is_commutative(s.q), || pass_unless((!is_group(s.q)).then(|| "not associative".into())))
}

fn two_sided_inverse_law(s: &Subject) -> Verdict {
    require(s.cc, || pass_unless(law(s.q, "(x*(y*x^r))*(x*y^r) = x")))
}

fn wip_powers_are_wip(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc, || {
        pass_unless(s.wip_pa.iter().find_map(|&c| {
            (-6..=6).find_map(|k| {
                let p = s.pow(c, k);
                (!crate::identities::is_wip_element(q, p)).then(|| format!("c = {c}, k = {k}"))
            })
        }))
    })
}

fn wip_e_square(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc, || {
        pass_unless(s.wip_pa.iter().find_map(|&c| {
            let e = q.e_map(c);
            if !e.pow(2).is_identity() {
                return Some(format!("E_c^2 at c = {c}"));
            }
            let rho = q.rho();
            perm_eq("D_c = L_{c^-1} rho", c, &q.d_map(c), &q.left(s.inv(c)).then(&rho))
        }))
    })
}

fn wip_square_law(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc, || {
        pass_unless(s.wip_pa.iter().find_map(|&c| {
            let e_inv = q.e_map(c).inverse();
            q.elements().find_map(|x| {
                let lhs = q.mul(x, q.mul(e_inv.apply(x), c));
                let rhs = q.mul(q.mul(x, x), c);
                (lhs != rhs).then(|| format!("c = {c}, x = {x}"))
            })
        }))
    })
}

fn cubes_are_wip(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc && s.pa, || {
        pass_unless(q.elements().find_map(|x| {
            let c = s.pow(x, 3);
            (!crate::identities::is_wip_element(q, c)).then(|| format!("x = {x}"))
        }))
    })
}

fn pa_cc_laws(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc && s.pa, || {
        pass_unless(s.pairs().find_map(|(x, y)| {
            let (xi, yi) = (s.inv(x), s.inv(y));
            let x2 = q.mul(x, x);
            let x3 = s.pow(x, 3);
            let rx3 = q.mul(q.mul(q.mul(y, x), x), x);
            let lx3 = q.mul(x, q.mul(x, q.mul(x, y)));
            let checks = [
                ("(x*xy)*(y^-1 x^-1) = x", q.mul(q.mul(x, q.mul(x, y)), q.mul(yi, xi)) == x),
                ("x^-1 y^-1*(yx*x) = x", q.mul(q.mul(xi, yi), q.mul(q.mul(y, x), x)) == x),
                ("y^-1*(y R_x^3) = x^3", q.mul(yi, rx3) == x3),
                ("(y L_x^3)*y^-1 = x^3", q.mul(lx3, yi) == x3),
                ("x^2 = y*((x^-1 y)^-1 * x)", q.mul(y, q.mul(s.inv(q.mul(xi, y)), x)) == x2),
                ("x^2 = (x*(y x^-1)^-1)*y", q.mul(q.mul(x, s.inv(q.mul(y, xi))), y) == x2),
            ];
            checks.iter().find(|c| !c.1).map(|c| format!("{} at ({x},{y})", c.0))
        }))
        .and_then(|| {
            pass_unless(q.elements().find_map(|x| {
                let xi = s.inv(x);
                let (l, r) = q.translations(x);
                let (d, di) = (q.d_map(x), q.d_map(xi));
                perm_eq("R_x L_x = D_{x^-1} D_x", x, &r.then(&l), &di.then(&d))
                    .or_else(|| perm_eq("L_x R_x = (D_x D_{x^-1})^-1", x, &l.then(&r), &d.then(&di).inverse()))
            }))
        })
    })
}

fn cc_mf_laws(s: &Subject) -> Verdict {
    require(s.cc, || {
        pass_unless(
            law(s.q, "x*((y*z)*x) = (x^l\\y)*(z*x)").or_else(|| law(s.q, "(x*(y*z))*x = (x*y)*(z/x^r)")),
        )
    })
}

// structure

fn nuclei_coincide(s: &Subject) -> Verdict {
    let nu = nuclei(s.q);
    require(s.cc, || {
        let same = nu.left == nu.nucleus && nu.middle == nu.nucleus && nu.right == nu.nucleus;
        pass_unless((!same).then(|| format!("left {} middle {} right {}", nu.left, nu.middle, nu.right)))
    })
}

fn center_is_commutant(s: &Subject) -> Verdict {
    require(s.cc, || {
        let (z, c) = (center(s.q), commutant(s.q));
        pass_unless((z != c).then(|| format!("center {z} vs commutant {c}")))
    })
}

fn nucleus_quotient_is_abelian_group(s: &Subject) -> Verdict {
    require(s.cc, || match quotient(s.q, &s.nucleus) {
        Ok(quot) => {
            let t = &quot.table;
            pass_unless((!is_group(t) || !is_commutative(t)).then(|| format!("Q/N of order {} not abelian", t.order())))
        }
        Err(e) => Verdict::Fail(e.to_string()),
    })
}

fn normality_two_paths(s: &Subject) -> Verdict {
    let q = s.q;
    let mut sets = vec![s.nucleus.clone(), center(q), commutant(q)];
    sets.extend(q.elements().map(|x| generate_subloop(q, &s.set(&[x])).members));
    pass_unless(sets.iter().filter(|h| crate::structure::closure(q, h) == **h).find_map(|h| {
        let a = is_normal(q, h).ok()?;
        let b = is_normal_by_inner_maps(q, h).ok()?;
        (a != b).then(|| format!("{h}: congruence {a} vs inner maps {b}"))
    }))
}

fn nuclear_associator_shifts(s: &Subject) -> Verdict {
    let q = s.q;
    let a3 = |x, y, z| associator(q, x, y, z).0;
    let normal = is_normal(q, &s.nucleus).unwrap_or(false);
    pass_unless(s.nucleus.iter().find_map(|a| {
        let ai = q.rinv(a);
        s.triples().find_map(|(x, y, z)| {
            let base = a3(x, y, z);
            let conj = q.mul(q.mul(ai, base), a);
            let mut ok = a3(q.mul(a, x), y, z) == base
                && a3(q.mul(x, a), y, z) == a3(x, q.mul(a, y), z)
                && a3(x, q.mul(y, a), z) == a3(x, y, q.mul(a, z))
                && a3(x, y, q.mul(z, a)) == conj;
            if normal {
                ok &= a3(q.mul(x, a), y, z) == base && a3(x, q.mul(y, a), z) == base && conj == base;
            }
            (!ok).then(|| format!("a = {a}, ({x},{y},{z})"))
        })
    }))
}

fn associator_symmetry(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc, || {
        pass_unless(s.triples().find_map(|(x, y, z)| {
            let a = associator(q, x, y, z).0;
            let perms = [(x, z, y), (y, x, z), (y, z, x), (z, x, y), (z, y, x)];
            let ok = s.nucleus.contains(a) && perms.iter().all(|&(u, v, w)| associator(q, u, v, w).0 == a);
            (!ok).then(|| format!("({x},{y},{z})"))
        }))
    })
}

fn associator_inverse_law(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc, || {
        pass_unless(s.triples().find_map(|(x, y, z)| {
            let a = associator(q, x, y, z).0;
            let lhs = q.mul(z, q.rinv(a));
            let rhs = q.mul(associator(q, x, y, q.linv(z)).0, z);
            (lhs != rhs).then(|| format!("({x},{y},{z})"))
        }))
    })
}

fn inner_maps_via_associators(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc, || {
        pass_unless(s.pairs().find_map(|(x, y)| {
            let (_, l_yx) = inner_maps(q, y, x);
            let (r_yz, _) = inner_maps(q, x, y);
            q.elements().find_map(|z| {
                let left = l_yx.apply(z) == q.mul(z, q.rinv(associator(q, x, y, z).0));
                // xR(y,z) = [x,y,z]^-1 x, with the roles renamed to (z, x, y)
                let right = r_yz.apply(z) == q.mul(q.rinv(associator(q, z, x, y).1), z);
                (!left || !right).then(|| format!("({x},{y},{z})"))
            })
        }))
    })
}

fn translation_conjugation(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc, || {
        pass_unless(s.pairs().find_map(|(x, y)| {
            let (lx, rx) = q.translations(x);
            let (ly, ry) = q.translations(y);
            let (lxi, rxi) = (lx.inverse(), rx.inverse());
            let (xr, xl) = (q.rinv(x), q.linv(x));
            let f = q.f(x, y);
            let g = q.g(x, y);
            perm_eq("L_x L_y L_x^-1 = L_g", (x, y), &lx.then(&ly).then(&lxi), &q.left(g))
                .or_else(|| perm_eq("R_x R_y R_x^-1 = R_f", (x, y), &rx.then(&ry).then(&rxi), &q.right(f)))
                .or_else(|| {
                    q.elements().find_map(|z| {
                        let a = q.mul(x, q.mul(g, z)) == q.mul(y, q.mul(x, z));
                        let b = q.mul(q.mul(z, f), x) == q.mul(q.mul(z, x), y);
                        (!a || !b).then(|| format!("translated form at ({x},{y},{z})"))
                    })
                })
                .or_else(|| {
                    let a = lxi.then(&ry).then(&lx);
                    perm_eq("L_x^-1 R_y L_x = R_x^-1 R_xy", (x, y), &a, &rxi.then(&q.right(q.mul(x, y))))
                        .or_else(|| perm_eq("= R_{y/x^r} R_x^-1", (x, y), &a, &q.right(q.rdiv(y, xr)).then(&rxi)))
                })
                .or_else(|| {
                    let a = rxi.then(&ly).then(&rx);
                    perm_eq("R_x^-1 L_y R_x = L_x^-1 L_yx", (x, y), &a, &lxi.then(&q.left(q.mul(y, x))))
                        .or_else(|| perm_eq("= L_{x^l\\y} L_x^-1", (x, y), &a, &q.left(q.ldiv(xl, y)).then(&lxi)))
                })
                .or_else(|| {
                    let a = lx.then(&ry).then(&lxi);
                    let rr = q.right(xr).inverse();
                    perm_eq("L_x R_y L_x^-1 = R_{x^r}^-1 R_{x\\y}", (x, y), &a, &rr.then(&q.right(q.ldiv(x, y))))
                        .or_else(|| perm_eq("= R_{y x^r} R_{x^r}^-1", (x, y), &a, &q.right(q.mul(y, xr)).then(&rr)))
                })
                .or_else(|| {
                    let a = rx.then(&ly).then(&rxi);
                    let ll = q.left(xl).inverse();
                    perm_eq("R_x L_y R_x^-1 = L_{x^l}^-1 L_{y/x}", (x, y), &a, &ll.then(&q.left(q.rdiv(y, x))))
                        .or_else(|| perm_eq("= L_{x^l y} L_{x^l}^-1", (x, y), &a, &q.left(q.mul(xl, y)).then(&ll)))
                })
        }))
    })
}

fn cc_autotopisms(s: &Subject) -> Verdict {
    let q = s.q;
    let id = Perm::identity(s.n);
    let nuclear = s.nucleus.iter().find_map(|a| {
        let la = q.left(a);
        (!is_autotopism(q, &la, &id, &la)).then(|| format!("(L_a, I, L_a) at a = {a}"))
    });
    let cc = if s.cc {
        q.elements().find_map(|x| {
            let (f, g) = q.fg_maps(x);
            let (l, r) = q.translations(x);
            let ok = is_autotopism(q, &f, &l, &l) && is_autotopism(q, &r, &g, &r);
            (!ok).then(|| format!("(F_x, L_x, L_x) / (R_x, G_x, R_x) at x = {x}"))
        })
    } else {
        None
    };
    pass_unless(nuclear.or(cc))
}

fn all_inner_maps(q: &LoopTable) -> Vec<Perm> {
    let mut maps: Vec<Perm> = q
        .elements()
        .flat_map(|x| q.elements().map(move |y| (x, y)))
        .flat_map(|(x, y)| {
            let (r, l) = inner_maps(q, x, y);
            [r, l]
        })
        .collect();
    maps.sort();
    maps.dedup();
    maps
}

fn inner_maps_are_automorphisms(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc, || {
        let sym = s.pairs().find_map(|(x, y)| {
            let (r1, l1) = inner_maps(q, x, y);
            let (r2, l2) = inner_maps(q, y, x);
            (r1 != r2 || l1 != l2).then(|| format!("R(x,y) = R(y,x), L(x,y) = L(y,x) at ({x},{y})"))
        });
        let maps = all_inner_maps(q);
        let aut = maps.iter().find_map(|m| {
            (!is_automorphism(q, m) || !m.fixes(&s.nucleus)).then(|| format!("{m} is not a nucleus-fixing automorphism"))
        });
        let comm = maps.iter().enumerate().find_map(|(i, a)| {
            maps[i + 1..].iter().find(|b| !a.commutes_with(b)).map(|b| format!("{a} and {b} do not commute"))
        });
        pass_unless(sym.or(aut).or(comm))
    })
}

fn nuclear_automorphism_group(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.n <= AUT_ORDER_LIMIT, || {
        let (aut, naut) = match (automorphisms(q), nuclear_automorphisms(q)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return Verdict::Fail(e.to_string()),
        };
        if !aut.iter().any(Perm::is_identity) {
            return Verdict::Fail("identity missing from Aut".into());
        }
        if !is_normal_subgroup_of(&naut, &aut) {
            return Verdict::Fail("NAut is not normal in Aut".into());
        }
        if !s.cc {
            return Verdict::Pass;
        }
        let maps = all_inner_maps(q);
        pass_unless(maps.iter().find_map(|m| {
            let central = naut.binary_search(m).is_ok() && naut.iter().all(|a| a.commutes_with(m));
            (!central).then(|| format!("{m} is not central in NAut"))
        }))
    })
}

fn strong_lagrange(s: &Subject) -> Verdict {
    match lagrange_check(s.q) {
        Ok(true) => Verdict::Pass,
        Ok(false) => Verdict::Fail("a subloop order does not divide".into()),
        Err(e) => Verdict::Fail(e.to_string()),
    }
}

fn cauchy(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc && s.pa, || {
        let primes = (2..=s.n).filter(|&p| s.n % p == 0 && (2..p).all(|d| p % d != 0));
        pass_unless(primes.into_iter().find_map(|p| {
            let found = q.elements().any(|x| crate::structure::element_order(q, x) == p);
            (!found).then(|| format!("no element of order {p}"))
        }))
    })
}

fn center_tower(s: &Subject) -> Verdict {
    require(s.cc && s.n > 1 && prime_power(s.n).is_some(), || match center_tower_check(s.q) {
        Ok(t) if t.holds() => Verdict::Pass,
        Ok(t) => Verdict::Fail(format!("{t:?}")),
        Err(e) => Verdict::Fail(e.to_string()),
    })
}

fn associating_sets_generate_groups(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc, || {
        pass_unless(s.pairs().find_map(|(x, y)| {
            let set = s.set(&[x, y]);
            let single = s.set(&[x]);
            let other = s.set(&[y]);
            let orders = [
                associates(q, &set, &single, &other),
                associates(q, &set, &other, &single),
                associates(q, &single, &set, &other),
                associates(q, &single, &other, &set),
                associates(q, &other, &set, &single),
                associates(q, &other, &single, &set),
            ];
            if orders.iter().any(|&b| b != orders[0]) {
                return Some(format!("associating is not symmetric at ({x},{y})"));
            }
            let gen = generate_subloop(q, &set).members;
            (associates(q, &set, &set, &set) && !is_associative_subset(q, &gen))
                .then(|| format!("{{{x},{y}}} associates but does not generate a group"))
        }))
    })
}

fn group_generation(s: &Subject) -> Verdict {
    let q = s.q;
    require(s.cc && s.pa, || {
        let assoc = |a: Elem, b: Elem| is_associative_subset(q, &generate_subloop(q, &s.set(&[a, b])).members);
        let wip = |c: Elem| s.wip_pa.contains(&c);
        pass_unless(s.pairs().find_map(|(b, c)| {
            let (b2, c2) = (s.pow(b, 2), s.pow(c, 2));
            if wip(c) && !(assoc(b, c2) && assoc(b2, c)) {
                return Some(format!("<b, c^2> or <b^2, c> at ({b},{c})"));
            }
            (!(assoc(b, s.pow(c, 6)) && assoc(b2, s.pow(c, 3)))).then(|| format!("<b, c^6> or <b^2, c^3> at ({b},{c})"))
        }))
    })
}

fn extra_loop_laws(s: &Subject) -> Verdict {
    let q = s.q;
    require(is_extra(q), || {
        if !is_group(q) && s.n % 16 != 0 {
            return Verdict::Fail(format!("nonassociative extra loop of order {}", s.n));
        }
        pass_unless(s.pairs().find_map(|(x, y)| {
            let (r, l) = inner_maps(q, x, y);
            let (r2, l2) = inner_maps(q, y, x);
            let same = r == l && l == r2 && r2 == l2;
            if !same || !l.pow(2).is_identity() {
                return Some(format!("inner maps at ({x},{y})"));
            }
            q.elements().find_map(|z| {
                let (a, b) = associator(q, x, y, z);
                let ok = a == b && q.mul(a, a) == 0 && [x, y, z].iter().all(|&w| q.mul(a, w) == q.mul(w, a));
                (!ok).then(|| format!("associator at ({x},{y},{z})"))
            })
        }))
    })
}

fn square_nucleus_symmetry(s: &Subject) -> Verdict {
    let q = s.q;
    let squares_nuclear = q.elements().all(|x| s.nucleus.contains(q.mul(x, x)));
    require(s.cc && squares_nuclear, || {
        pass_unless(s.triples().find_map(|(x, y, z)| {
            let a = associator(q, x, y, z).0;
            let forms = |v: Elem| [v, q.rinv(v), q.linv(v)];
            let ok = forms(x)
                .iter()
                .all(|&u| forms(y).iter().all(|&v| forms(z).iter().all(|&w| associator(q, u, v, w).0 == a)));
            (!ok).then(|| format!("({x},{y},{z})"))
        }))
    })
}

/// The generic battery, in reporting order.
pub const CHECKS: &[(&str, CheckFn)] = &[
    ("quasigroup cancellation", quasigroup_cancellation),
    ("translations are permutations", translations_are_permutations),
    ("inverses are unique, rho = D_1", inverses_are_unique),
    ("powers agree in <x>", powers_are_consistent),
    ("F_x and G_x as translation words", f_g_translation_forms),
    ("F_x G_x = G_x F_x = I", f_g_are_inverse),
    ("E_x commutes with L_x and R_x", e_commutes_with_translations),
    ("E_x^6 = I", e_sixth_power),
    ("cc by identity = cc by conjugation", cc_two_paths),
    ("pa by closure = pa by inverses", pa_two_paths),
    ("four wip forms agree", wip_forms_agree),
    ("classify flags and witnesses", classify_witnesses),
    ("extra = cc and moufang", extra_two_paths),
    ("cc with aaip is extra", aaip_forces_extra),
    ("commutative cc is a group", commutative_cc_is_group),
    ("(x.yx^r).xy^r = x", two_sided_inverse_law),
    ("powers of wip elements are wip", wip_powers_are_wip),
    ("E_c^2 = I and D_c = L_{c^-1} rho", wip_e_square),
    ("x.(xE_c^-1.c) = x^2.c", wip_square_law),
    ("cubes are wip", cubes_are_wip),
    ("power-associative cc laws", pa_cc_laws),
    ("x(yz.x) = (x^l\\y).zx and mirror", cc_mf_laws),
    ("left, middle, right nuclei coincide", nuclei_coincide),
    ("center = commutant", center_is_commutant),
    ("Q/N is an abelian group", nucleus_quotient_is_abelian_group),
    ("normality: congruence = inner maps", normality_two_paths),
    ("nuclear shifts of associators", nuclear_associator_shifts),
    ("associator S3 symmetry, nuclear", associator_symmetry),
    ("z(x,y,z)^-1 = (x,y,z^l)z", associator_inverse_law),
    ("inner maps via associators", inner_maps_via_associators),
    ("conjugation of translations", translation_conjugation),
    ("autotopisms (F,L,L), (R,G,R), (L_a,I,L_a)", cc_autotopisms),
    ("inner maps: symmetric, automorphic, commuting", inner_maps_are_automorphisms),
    ("NAut normal in Aut, inner maps central", nuclear_automorphism_group),
    ("strong Lagrange", strong_lagrange),
    ("Cauchy", cauchy),
    ("center tower", center_tower),
    ("associating sets generate groups", associating_sets_generate_groups),
    ("<b,c^2>, <b^2,c>, <b,c^6>, <b^2,c^3> are groups", group_generation),
    ("associators ignore inverses when squares are nuclear", square_nucleus_symmetry),
    ("extra loop laws", extra_loop_laws),
];

fn timed(name: &'static str, subject: &str, f: impl FnOnce() -> Verdict) -> CheckResult {
    let start = Instant::now();
    let verdict = f();
    CheckResult { name, subject: subject.to_string(), verdict, elapsed: start.elapsed() }
}

/// Runs every check in [`CHECKS`] on `q`.
pub fn check_loop(subject: &str, q: &LoopTable) -> Vec<CheckResult> {
    let s = Subject::new(q);
    CHECKS.iter().map(|&(name, f)| timed(name, subject, || f(&s))).collect()
}

fn claim(ok: bool, detail: impl FnOnce() -> String) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail(detail())
    }
}

fn not_group_for(q: &LoopTable, pairs: impl IntoIterator<Item = (Elem, Elem)>) -> Option<(Elem, Elem)> {
    let n = q.order();
    pairs
        .into_iter()
        .find(|&(a, b)| !is_associative_subset(q, &generate_subloop(q, &ElemSet::from_slice(n, &[a, b])).members))
}

/// Concrete facts about the two bundled loops.
pub fn fixture_claims() -> Vec<CheckResult> {
    let t27 = fixtures::t27();
    let t16 = fixtures::t16();
    let mut out = Vec::new();
    let n27 = ElemSet::from_slice(27, &[0, 1, 2]);
    let n16 = ElemSet::from_slice(16, &[0, 1, 2, 3]);
    out.push(timed("spot values", "t27", || claim(t27.mul(9, 9) == 18 && t27.mul(9, 18) == 0, || "9*9, 9*18".into())));
    out.push(timed("spot values", "t16", || claim(t16.mul(4, 8) == 12 && t16.mul(8, 4) == 15, || "4*8, 8*4".into())));
    out.push(timed("cc, pa, aip; not extra, not diassociative", "t27", || {
        let r = classify(&t27);
        let want = [(Property::Cc, true), (Property::Pa, true), (Property::Aip, true), (Property::Extra, false), (Property::Diassociative, false)];
        claim(want.iter().all(|&(p, b)| r.get(p) == b), || format!("{:?}", r.flags))
    }));
    out.push(timed("exponent 3", "t27", || {
        claim(t27.elements().all(|x| t27.power(x, 3) == Ok(0)), || "some cube is not 1".into())
    }));
    out.push(timed("Z = N = {0,1,2}", "t27", || claim(center(&t27) == n27 && nuclei(&t27).nucleus == n27, || format!("{}", center(&t27)))));
    out.push(timed("{0..8} is a normal subloop with quotient Z3", "t27", || {
        let h = ElemSet::from_iter(27, 0..9);
        let ok = crate::structure::closure(&t27, &h) == h
            && is_normal(&t27, &h) == Ok(true)
            && quotient(&t27, &h).map(|qt| are_isomorphic(&qt.table, &fixtures::cyclic(3))).unwrap_or(false);
        claim(ok, || "not a normal subloop with quotient Z3".into())
    }));
    out.push(timed("Q/N is elementary abelian of order 9", "t27", || {
        let ok = quotient(&t27, &n27)
            .map(|qt| {
                let t = qt.table;
                t.order() == 9 && is_group(&t) && is_commutative(&t) && t.elements().all(|x| t.power(x, 3) == Ok(0))
            })
            .unwrap_or(false);
        claim(ok, || "unexpected quotient".into())
    }));
    out.push(timed("cc, pa, wip; not extra, not diassociative", "t16", || {
        let r = classify(&t16);
        let want = [(Property::Cc, true), (Property::Pa, true), (Property::Wip, true), (Property::Extra, false), (Property::Diassociative, false)];
        claim(want.iter().all(|&(p, b)| r.get(p) == b), || format!("{:?}", r.flags))
    }));
    out.push(timed("4.(8.4) != (4.8).4", "t16", || {
        claim(t16.mul(4, t16.mul(8, 4)) != t16.mul(t16.mul(4, 8), 4), || "associates".into())
    }));
    out.push(timed("Z = N = {0,1,2,3}", "t16", || claim(center(&t16) == n16 && nuclei(&t16).nucleus == n16, || format!("{}", center(&t16)))));
    out.push(timed("<4,8> = Q", "t16", || {
        claim(generate_subloop(&t16, &ElemSet::from_slice(16, &[4, 8])).members == ElemSet::full(16), || "proper".into())
    }));
    out.push(timed("squares lie in N", "t16", || claim(t16.elements().all(|x| n16.contains(t16.mul(x, x))), || "square outside N".into())));
    out.push(timed("Q/N is boolean of order 4", "t16", || {
        let ok = quotient(&t16, &n16).map(|qt| qt.table.order() == 4 && crate::identities::is_boolean_group(&qt.table)).unwrap_or(false);
        claim(ok, || "unexpected quotient".into())
    }));
    out.push(timed("|Z| = 3^1 with r outside {0,2}", "t27", || {
        let t = center_tower_check(&t27);
        claim(matches!(&t, Ok(t) if t.center_order == 3 && t.r == Some(1) && t.holds()), || format!("{t:?}"))
    }));
    out.push(timed("|Z| = 2^2 with r outside {0,3}", "t16", || {
        let t = center_tower_check(&t16);
        claim(matches!(&t, Ok(t) if t.center_order == 4 && t.r == Some(2) && t.holds()), || format!("{t:?}"))
    }));
    out.push(timed("some <b^2,c^2> is not a group", "t27", || {
        let sq = |x| t27.mul(x, x);
        let pairs = t27.elements().flat_map(|b| t27.elements().map(move |c| (b, c)));
        claim(not_group_for(&t27, pairs.map(|(b, c)| (sq(b), sq(c)))).is_some(), || "all groups".into())
    }));
    out.push(timed("<3^2, 9^2> = <6, 18> is not a group", "t27", || {
        claim(not_group_for(&t27, [(t27.mul(3, 3), t27.mul(9, 9))]).is_some(), || "is a group".into())
    }));
    out.push(timed("some <b^3,c^3> is not a group", "t16", || {
        let cube = |x| t16.power(x, 3).unwrap();
        claim(not_group_for(&t16, [(cube(4), cube(8))]).is_some(), || "<4^3, 8^3> is a group".into())
    }));
    out
}

fn theorem_result(t: Result<TheoremCheck, crate::construct::ConstructError>) -> Verdict {
    match t {
        Ok(t) if t.agree() => Verdict::Pass,
        Ok(t) => Verdict::Fail(format!("{t:?}")),
        Err(e) => Verdict::Fail(e.to_string()),
    }
}

/// Semidirect products, holomorphs and decompositions.
pub fn construction_checks() -> Vec<CheckResult> {
    let mut out = Vec::new();
    let z2 = fixtures::cyclic(2);
    let z3 = fixtures::cyclic(3);
    let t16 = fixtures::t16();
    let t27 = fixtures::t27();
    let inversion = Perm::from_images(z3.elements().map(|x| z3.rinv(x)).collect()).expect("inversion");

    out.push(timed("semidirect theorem: trivial action", "Z2 x Z3", || {
        theorem_result(check_semidirect_theorem(&z2, &z3, &ActionMap::trivial(&z2, &z3)))
    }));
    out.push(timed("semidirect theorem: trivial action", "Z3 x t16", || {
        theorem_result(check_semidirect_theorem(&z3, &t16, &ActionMap::trivial(&z3, &t16)))
    }));
    out.push(timed("semidirect theorem: inversion gives S3", "Z2 x| Z3", || {
        let phi = match ActionMap::new(&z2, &z3, vec![Perm::identity(3), inversion.clone()]) {
            Ok(p) => p,
            Err(e) => return Verdict::Fail(e.to_string()),
        };
        let s3 = semidirect(&z2, &z3, &phi).map(|p| are_isomorphic(&p, &fixtures::dihedral(3)));
        match s3 {
            Ok(true) => theorem_result(check_semidirect_theorem(&z2, &z3, &phi)),
            _ => Verdict::Fail("product is not S3".into()),
        }
    }));
    for (name, k) in [("t16", &t16), ("t27", &t27)] {
        let naut = nuclear_automorphisms(k).unwrap_or_default();
        let aut = automorphisms(k).unwrap_or_default();
        if let Some(beta) = naut.iter().find(|b| !b.is_identity()) {
            out.push(timed("semidirect theorem: nuclear automorphism", name, || {
                let (a, phi) = ActionMap::cyclic_powers(k, beta);
                let t = check_semidirect_theorem(&a, k, &phi);
                match t {
                    Ok(TheoremCheck { cc: true, nuclear: true, triples: true }) => Verdict::Pass,
                    other => theorem_result(other).and_fail("expected all true"),
                }
            }));
        }
        if let Some(beta) = aut.iter().find(|b| naut.binary_search(b).is_err()) {
            out.push(timed("semidirect theorem: non-nuclear automorphism", name, || {
                let (a, phi) = ActionMap::cyclic_powers(k, beta);
                match check_semidirect_theorem(&a, k, &phi) {
                    Ok(TheoremCheck { cc: false, nuclear: false, triples: false }) => Verdict::Pass,
                    other => theorem_result(other).and_fail("expected all false"),
                }
            }));
        }
    }
    out.push(timed("holomorph of Z3 is S3", "Z3", || {
        claim(holomorph(&z3, None).map(|h| are_isomorphic(&h.table, &fixtures::dihedral(3))).unwrap_or(false), || "not S3".into())
    }));
    out.push(timed("holomorph of Z2 is Z2", "Z2", || {
        claim(holomorph(&z2, None).map(|h| h.table == z2).unwrap_or(false), || "not Z2".into())
    }));
    out.push(timed("holomorph is cc", "t16", || match holomorph(&t16, None) {
        Ok(h) => claim(is_cc(&h.table) && h.table.order() == 16 * h.perms.len(), || "not cc".into()),
        Err(e) => Verdict::Fail(e.to_string()),
    }));
    out.push(timed("decomposition recovers the action", "t16", || {
        let naut = nuclear_automorphisms(&t16).unwrap_or_default();
        let Some(beta) = naut.iter().find(|b| !b.is_identity()) else { return Verdict::Skip };
        let (a, phi) = ActionMap::cyclic_powers(&t16, beta);
        let p = match semidirect(&a, &t16, &phi) {
            Ok(p) => p,
            Err(e) => return Verdict::Fail(e.to_string()),
        };
        let a_set = ElemSet::from_iter(p.order(), a.elements().map(|i| i * 16));
        let k_set = ElemSet::from_iter(p.order(), 0..16);
        match internal_decompose(&p, &a_set, &k_set) {
            Ok(d) => claim(d.action == phi, || "different action".into()),
            Err(e) => Verdict::Fail(e.to_string()),
        }
    }));
    out.push(timed("decomposition over a cyclic complement", "t27", || {
        let k = ElemSet::from_iter(27, 0..9);
        let complement = t27.elements().find_map(|x| {
            let a = generate_subloop(&t27, &ElemSet::from_slice(27, &[x])).members;
            (a.len() == 3 && a.intersection(&k).len() == 1).then_some(a)
        });
        let Some(a) = complement else { return Verdict::Fail("no cyclic complement".into()) };
        // either outcome is legitimate; what matters is a verified answer
        match internal_decompose(&t27, &a, &k) {
            Ok(d) => claim(d.action.homomorphism_violation(&t27.restrict(&a).expect("subloop")).is_none(), || "bad action".into()),
            Err(crate::construct::ConstructError::TriplesFail { .. }) => Verdict::Pass,
            Err(e) => Verdict::Fail(e.to_string()),
        }
    }));
    out
}

trait AndFail {
    fn and_fail(self, why: &str) -> Verdict;
}

impl AndFail for Verdict {
    fn and_fail(self, why: &str) -> Verdict {
        match self {
            Verdict::Fail(d) => Verdict::Fail(format!("{why}: {d}")),
            _ => Verdict::Fail(why.to_string()),
        }
    }
}

impl Verdict {
    fn and_then(self, next: impl FnOnce() -> Verdict) -> Verdict {
        match self {
            Verdict::Pass => next(),
            other => other,
        }
    }
}

/// Loops the generic battery is run on.
pub fn subjects() -> Vec<(&'static str, LoopTable)> {
    vec![
        ("t16", fixtures::t16()),
        ("t27", fixtures::t27()),
        ("Z3", fixtures::cyclic(3)),
        ("Z6", fixtures::cyclic(6)),
        ("Z8", fixtures::cyclic(8)),
        ("Z2^2", fixtures::klein()),
        ("S3", fixtures::dihedral(3)),
        ("D4", fixtures::dihedral(4)),
        ("Q8", fixtures::quaternion()),
        ("octonion units", fixtures::cayley_loop()),
    ]
}

/// Everything: the generic battery on every subject, the fixture claims and
/// the construction checks.
pub fn run_suite() -> SuiteReport {
    let mut results = Vec::new();
    for (name, q) in subjects() {
        results.extend(check_loop(name, &q));
    }
    results.extend(fixture_claims());
    results.extend(construction_checks());
    SuiteReport { results }
}
