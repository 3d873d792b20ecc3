//! End-to-end acceptance run: one line per criterion, with timings.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ccloop::construct::{check_semidirect_theorem, holomorph, ActionMap, TheoremCheck};
use ccloop::fixtures;
use ccloop::identities::{classify, has_wip, is_cc, is_commutative, is_group, is_boolean_group, Property};
use ccloop::search::{find_models, SearchError, SearchSpec, Symmetry};
use ccloop::structure::{
    all_subloops, are_isomorphic, associator, automorphisms, center, center_tower_check, element_order,
    generate_subloop, inner_maps, is_associative_subset, is_automorphism, is_normal, lagrange_check,
    nuclear_automorphisms, nuclei, quotient,
};
use ccloop::suite::{check_loop, construction_checks, fixture_claims, CheckResult, Verdict};
use ccloop::{ElemSet, LoopTable, Perm};

type Criterion = fn() -> Result<(), String>;

fn ensure(cond: bool, what: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.to_string())
    }
}

fn clean(results: &[CheckResult]) -> Result<(), String> {
    match results.iter().find(|r| matches!(r.verdict, Verdict::Fail(_))) {
        None => Ok(()),
        Some(r) => Err(format!("{} on {}: {:?}", r.name, r.subject, r.verdict)),
    }
}

fn named(results: Vec<CheckResult>, names: &[&str]) -> Result<(), String> {
    for name in names {
        let hits: Vec<&CheckResult> = results.iter().filter(|r| r.name == *name).collect();
        ensure(!hits.is_empty(), &format!("no check named {name}"))?;
        for r in hits {
            ensure(r.verdict == Verdict::Pass, &format!("{name} on {}: {:?}", r.subject, r.verdict))?;
        }
    }
    Ok(())
}

fn fixture_fidelity() -> Result<(), String> {
    let t16 = LoopTable::parse_tbl(fixtures::T16_TBL).map_err(|e| e.to_string())?;
    let t27 = LoopTable::parse_tbl(fixtures::T27_TBL).map_err(|e| e.to_string())?;
    ensure(t16.order() == 16 && t27.order() == 27, "orders")?;
    ensure(t16.mul(4, 8) == 12, "t16 4*8 = 12")?;
    ensure(t16.mul(8, 4) == 15, "t16 8*4 = 15")?;
    ensure(t27.mul(9, 9) == 18, "t27 9*9 = 18")?;
    ensure(t16.to_tbl() == fixtures::T16_TBL.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect::<String>(), "t16 round trip")
}

fn section_nine_claims() -> Result<(), String> {
    let (t16, t27) = (fixtures::t16(), fixtures::t27());
    let r27 = classify(&t27);
    ensure(r27.get(Property::Cc) && r27.get(Property::Pa) && r27.get(Property::Aip), "t27 cc, pa, aip")?;
    ensure(t27.elements().all(|x| t27.power(x, 3) == Ok(0)), "t27 exponent 3")?;
    let n27 = ElemSet::from_slice(27, &[0, 1, 2]);
    ensure(center(&t27) == n27 && nuclei(&t27).nucleus == n27, "t27 Z = N = {0,1,2}")?;
    let h = ElemSet::from_iter(27, 0..9);
    ensure(generate_subloop(&t27, &h).members == h && is_normal(&t27, &h) == Ok(true), "{0..8} normal subloop")?;
    let r16 = classify(&t16);
    ensure(r16.get(Property::Cc) && r16.get(Property::Pa) && r16.get(Property::Wip), "t16 cc, pa, wip")?;
    ensure(!r16.get(Property::Diassociative), "t16 not diassociative")?;
    ensure(t16.mul(4, t16.mul(8, 4)) != t16.mul(t16.mul(4, 8), 4), "4(8*4) != (4*8)4")?;
    let n16 = ElemSet::from_slice(16, &[0, 1, 2, 3]);
    ensure(center(&t16) == n16 && nuclei(&t16).nucleus == n16, "t16 Z = N = {0,1,2,3}")?;
    ensure(generate_subloop(&t16, &ElemSet::from_slice(16, &[4, 8])).members == ElemSet::full(16), "<4,8> = Q")?;
    ensure(t16.elements().all(|x| n16.contains(t16.mul(x, x))), "squares in N")?;
    clean(&fixture_claims())
}

fn quotient_lagrange_cauchy() -> Result<(), String> {
    let (t16, t27) = (fixtures::t16(), fixtures::t27());
    let q16 = quotient(&t16, &nuclei(&t16).nucleus).map_err(|e| e.to_string())?.table;
    ensure(q16.order() == 4 && is_boolean_group(&q16), "t16/N boolean of order 4")?;
    let q27 = quotient(&t27, &nuclei(&t27).nucleus).map_err(|e| e.to_string())?.table;
    ensure(
        q27.order() == 9 && is_group(&q27) && is_commutative(&q27) && q27.elements().all(|x| q27.power(x, 3) == Ok(0)),
        "t27/N abelian of order 9, exponent 3",
    )?;
    for q in [&t16, &t27] {
        ensure(lagrange_check(q) == Ok(true), "strong Lagrange")?;
        let subs = all_subloops(q).map_err(|e| e.to_string())?;
        ensure(subs.iter().all(|h| q.order() % h.order() == 0), "subloop orders divide")?;
    }
    ensure(t27.elements().any(|x| element_order(&t27, x) == 3), "t27 has an element of order 3")?;
    ensure(t16.elements().any(|x| element_order(&t16, x) == 2), "t16 has an element of order 2")
}

fn associator_suite() -> Result<(), String> {
    for q in [fixtures::t16(), fixtures::t27()] {
        let n = q.order();
        let nuc = nuclei(&q).nucleus;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let a = associator(&q, x, y, z).0;
                    let perms = [(x, z, y), (y, x, z), (y, z, x), (z, x, y), (z, y, x)];
                    ensure(perms.iter().all(|&(u, v, w)| associator(&q, u, v, w).0 == a), "S3 symmetry")?;
                }
            }
        }
        let mut maps: Vec<Perm> = Vec::new();
        for x in 0..n {
            for y in 0..n {
                let (r, l) = inner_maps(&q, x, y);
                maps.push(r);
                maps.push(l);
            }
        }
        maps.sort();
        maps.dedup();
        ensure(maps.iter().all(|m| is_automorphism(&q, m) && m.fixes(&nuc)), "inner maps are automorphisms fixing N")?;
        ensure(maps.iter().all(|a| maps.iter().all(|b| a.commutes_with(b))), "inner maps commute")?;
    }
    let t = center_tower_check(&fixtures::t27()).map_err(|e| e.to_string())?;
    ensure(t.center_order == 3 && t.r == Some(1) && t.r_allowed, "|Z(t27)| = 3, r = 1")
}

fn wip_and_power_suite() -> Result<(), String> {
    let mut results = Vec::new();
    for (name, q) in [("t16", fixtures::t16()), ("t27", fixtures::t27())] {
        results.extend(check_loop(name, &q));
    }
    named(
        results,
        &[
            "E_c^2 = I and D_c = L_{c^-1} rho",
            "E_x^6 = I",
            "cubes are wip",
            "<b,c^2>, <b^2,c>, <b,c^6>, <b^2,c^3> are groups",
        ],
    )?;
    named(fixture_claims(), &["some <b^2,c^2> is not a group", "some <b^3,c^3> is not a group"])?;
    // the sharpness witnesses, restated directly
    let t27 = fixtures::t27();
    let six_eighteen = generate_subloop(&t27, &ElemSet::from_slice(27, &[t27.mul(3, 3), t27.mul(9, 9)])).members;
    ensure(!is_associative_subset(&t27, &six_eighteen), "<6,18> in t27 is not a group")?;
    let t16 = fixtures::t16();
    let cubes = [4, 8].map(|x| t16.power(x, 3).unwrap());
    let g = generate_subloop(&t16, &ElemSet::from_slice(16, &cubes)).members;
    ensure(g == ElemSet::full(16) && !is_associative_subset(&t16, &g), "<4^3, 8^3> = t16 is not a group")
}

fn semidirect_suite() -> Result<(), String> {
    let checks = construction_checks();
    let theorem = checks.iter().filter(|r| r.name.starts_with("semidirect theorem")).count();
    ensure(theorem >= 5, &format!("only {theorem} theorem checks"))?;
    clean(&checks)?;
    let (z2, z3) = (fixtures::cyclic(2), fixtures::cyclic(3));
    let t = check_semidirect_theorem(&z2, &z3, &ActionMap::trivial(&z2, &z3)).map_err(|e| e.to_string())?;
    ensure(t == TheoremCheck { cc: true, nuclear: true, triples: true }, "trivial action")?;
    let h = holomorph(&z3, None).map_err(|e| e.to_string())?;
    ensure(are_isomorphic(&h.table, &fixtures::dihedral(3)), "Hol(Z3) = S3")?;
    let h = holomorph(&fixtures::t16(), None).map_err(|e| e.to_string())?;
    ensure(is_cc(&h.table), "Hol(t16) is cc")
}

fn order_sixteen_search() -> Result<(), String> {
    let spec = SearchSpec::new(16)
        .require("cc, pa, nonassociative")
        .map_err(|e| e.to_string())?
        .limit(1)
        .time_limit(Duration::from_secs(600));
    let out = find_models(&spec).map_err(|e| e.to_string())?;
    let m = out.models.first().ok_or("no model within the time limit")?;
    let r = classify(m);
    ensure(r.get(Property::Cc) && r.get(Property::Pa) && !r.get(Property::Group), "model has the required flags")?;
    ensure(has_wip(m), "model has the weak inverse property")?;
    eprintln!("    order 16: {}", out.stats);
    Ok(())
}

/// All tables of order `n` with row and column 0 fixed, by plain
/// backtracking over cells.
fn brute_force_count(n: usize) -> usize {
    fn go(n: usize, t: &mut Vec<Vec<usize>>, cell: usize) -> usize {
        if cell == n * n {
            return 1;
        }
        let (r, c) = (cell / n, cell % n);
        if r == 0 || c == 0 {
            return go(n, t, cell + 1);
        }
        let mut total = 0;
        for v in 0..n {
            if (0..c).any(|j| t[r][j] == v) || (0..r).any(|i| t[i][c] == v) {
                continue;
            }
            t[r][c] = v;
            total += go(n, t, cell + 1);
        }
        t[r][c] = usize::MAX;
        total
    }
    let mut t = vec![vec![usize::MAX; n]; n];
    for i in 0..n {
        t[0][i] = i;
        t[i][0] = i;
    }
    go(n, &mut t, 0)
}

fn search_oracle() -> Result<(), String> {
    for n in 1..=5 {
        let expected = brute_force_count(n);
        let out = find_models(&SearchSpec::new(n).symmetry(Symmetry::None)).map_err(|e| e.to_string())?;
        ensure(out.models.len() == expected, &format!("order {n}: {} vs {expected}", out.models.len()))?;
    }
    ensure([1, 2, 3, 4, 5].map(brute_force_count) == [1, 1, 1, 4, 56], "oracle counts")?;
    let spec = SearchSpec::new(6).require("cc, nonassociative").map_err(|e| e.to_string())?;
    match find_models(&spec) {
        Err(SearchError::Unsatisfiable(_)) => Err("order 6 cc nonassociative reported unsatisfiable".into()),
        Err(e) => Err(e.to_string()),
        Ok(out) => {
            // a CC-loop of order 6 that is not a group does exist; see "Known deviations" in the README
            ensure(out.models.iter().all(|m| is_cc(m) && !is_group(m)), "models are cc and nonassociative")?;
            Err(format!(
                "expected Unsatisfiable, found {} nonassociative CC-loop(s) of order 6",
                ccloop::search::iso_reduce(&out.models).len()
            ))
        }
    }
}

fn property_suite() -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..100 {
        let g = fixtures::random_group(&mut rng);
        clean(&check_loop(&format!("random group {i}"), &g))?;
        ensure(automorphisms(&g).is_ok() && nuclear_automorphisms(&g).is_ok(), "automorphisms")?;
    }
    for (name, q) in ccloop::suite::subjects() {
        clean(&check_loop(name, &q))?;
        let r = classify(&q);
        for (p, w) in &r.witnesses {
            ensure(w.recheck(&q), &format!("{name}: witness for {p} does not recheck"))?;
        }
    }
    Ok(())
}

const CRITERIA: [(&str, Criterion, u64); 9] = [
    ("1 fixture fidelity", fixture_fidelity, 1),
    ("2 claims about the two fixtures", section_nine_claims, 5),
    ("3 Q/N, strong Lagrange, Cauchy", quotient_lagrange_cauchy, 30),
    ("4 associators and inner maps", associator_suite, 60),
    ("5 WIP and power-associative calculus", wip_and_power_suite, 120),
    ("6 semidirect products and holomorphs", semidirect_suite, 60),
    ("7 order-16 search", order_sixteen_search, 600),
    ("8 search oracle", search_oracle, 300),
    ("9 property battery", property_suite, 120),
];

/// Criteria that cannot hold as stated. Each is still run and reported as
/// FAIL; the test additionally checks that it stays red, so a change in
/// behaviour is noticed. See the README's "Known deviations".
const KNOWN_RED: &[&str] = &["8 search oracle"];

#[test]
fn acceptance() {
    let mut failed = Vec::new();
    for (name, f, budget) in CRITERIA {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(budget);
        let detail = match (&result, over) {
            (Ok(()), false) => None,
            (Ok(()), true) => Some(format!("over the {budget}s budget")),
            (Err(e), _) => Some(e.clone()),
        };
        let verdict = if detail.is_none() { "PASS" } else { "FAIL" };
        println!("{verdict}  {name:<40} {:>9.3}s  {}", elapsed.as_secs_f64(), detail.unwrap_or_default());
        if verdict != "PASS" {
            failed.push(name);
        }
    }
    let unexpected: Vec<&str> = failed.iter().copied().filter(|f| !KNOWN_RED.contains(f)).collect();
    assert!(unexpected.is_empty(), "failed criteria: {unexpected:?}");
    let flipped: Vec<&&str> = KNOWN_RED.iter().filter(|k| !failed.contains(k)).collect();
    assert!(flipped.is_empty(), "known-red criteria now pass, update KNOWN_RED: {flipped:?}");
}
