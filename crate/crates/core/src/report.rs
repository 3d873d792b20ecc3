//! Deterministic key/value reports.

use std::collections::BTreeMap;
use std::fmt;

use crate::identities::{classify, wip_elements, Property};
use crate::structure::{center, center_tower_check, commutant, element_order, nuclei};
use crate::table::LoopTable;

/// Sorted `key = value` lines. Keys are dotted, lowercase.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    entries: BTreeMap<String, String>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.insert(key.into(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Full structural summary of a loop.
///
/// Keys: `order`, `is.<flag>`, `witness.<flag>`, `nucleus`, `nucleus.left`,
/// `nucleus.middle`, `nucleus.right`, `center`, `commutant`, `wip_elements`,
/// `element_orders` (only for power-associative loops) and, for CC-loops of
/// prime-power order, `center_tower.*`.
pub fn analyze(q: &LoopTable) -> Report {
    let mut r = Report::new();
    r.insert("order", q.order());
    let props = classify(q);
    for p in Property::ALL {
        r.insert(format!("is.{}", p.name()), yes_no(props.get(p)));
    }
    for (p, w) in &props.witnesses {
        r.insert(format!("witness.{}", p.name()), w);
    }
    let nuc = nuclei(q);
    r.insert("nucleus", &nuc.nucleus);
    r.insert("nucleus.left", &nuc.left);
    r.insert("nucleus.middle", &nuc.middle);
    r.insert("nucleus.right", &nuc.right);
    r.insert("center", center(q));
    r.insert("commutant", commutant(q));
    r.insert("wip_elements", wip_elements(q));
    if props.get(Property::Pa) {
        let orders: Vec<String> = q.elements().map(|x| element_order(q, x).to_string()).collect();
        r.insert("element_orders", orders.join(" "));
    }
    if props.get(Property::Cc) {
        if let Ok(t) = center_tower_check(q) {
            r.insert("center_tower.prime", t.prime);
            r.insert("center_tower.exponent", t.exponent);
            r.insert("center_tower.center_order", t.center_order);
            r.insert("center_tower.holds", yes_no(t.holds()));
        }
    }
    r
}
