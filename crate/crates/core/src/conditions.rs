//! Known sufficient conditions for a gap set to tile an interval.

use serde::{Deserialize, Serialize};

use crate::construct::{auto_split, split_is_admissible, thresholds};
use crate::gapset::GapSet;
use crate::grid::HeightTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionStatus {
    Satisfied,
    NotSatisfied,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub name: String,
    pub status: ConditionStatus,
    pub witness: Option<String>,
}

impl ConditionResult {
    fn new(name: &str, satisfied: bool, witness: impl Into<Option<String>>) -> Self {
        ConditionResult {
            name: name.into(),
            status: if satisfied {
                ConditionStatus::Satisfied
            } else {
                ConditionStatus::NotSatisfied
            },
            witness: witness.into(),
        }
    }

    fn not_applicable(name: &str, why: &str) -> Self {
        ConditionResult {
            name: name.into(),
            status: ConditionStatus::NotApplicable,
            witness: Some(why.into()),
        }
    }

    pub fn satisfied(&self) -> bool {
        self.status == ConditionStatus::Satisfied
    }
}

/// Four-point tiles `{p, q, r}`: tiles an interval once `r ≥ 63·max(p, q)²`.
pub fn cjk_holds(p: u64, q: u64, r: u64) -> bool {
    let m = p.max(q) as u128;
    r as u128 >= 63 * m * m
}

/// `{p^(k), q^(l)}` for the three closed-form cases; returns the first one
/// that applies (1-based).
pub fn nakamigawa_case(p: u64, k: usize, q: u64, l: usize) -> Option<u8> {
    (1..=3).find(|&c| case_holds(c, p, k, q, l))
}

/// Whether `a` is a nonnegative combination of `k+1, ..., k+l+1`.
pub fn representable(a: u64, k: usize, l: usize) -> bool {
    let coins: Vec<u64> = (k as u64 + 1..=(k + l) as u64 + 1).collect();
    let smallest = coins[0];
    // beyond this bound every value is representable (Frobenius bound for
    // consecutive coins is at most smallest²)
    let cap = smallest * smallest + smallest;
    if a >= cap {
        return true;
    }
    let mut ok = vec![false; a as usize + 1];
    ok[0] = true;
    for v in 1..=a as usize {
        ok[v] = coins.iter().any(|&c| c as usize <= v && ok[v - c as usize]);
    }
    ok[a as usize]
}

/// The `a` with `a·p ≤ q ≤ (a+1)·p` such that both `a` and `a+1` are
/// representable over coins `k+1..=k+l+1`.
pub fn nakamigawa_window(p: u64, k: usize, q: u64, l: usize) -> Option<u64> {
    if p == 0 {
        return None;
    }
    let hi = q / p;
    let lo = q.div_ceil(p).saturating_sub(1);
    (lo..=hi).find(|&a| a >= 1 && representable(a, k, l) && representable(a + 1, k, l))
}

fn labelings(t: &GapSet) -> [(u64, usize, u64, usize); 2] {
    let (a, b) = (t.entries()[0], t.entries()[1]);
    [(a.0, a.1, b.0, b.1), (b.0, b.1, a.0, a.1)]
}

/// Evaluates every condition whose shape fits `gaps`.
pub fn check_sufficient_conditions(table: &HeightTable, gaps: &GapSet) -> Vec<ConditionResult> {
    let mut out = Vec::new();

    if gaps.size() == 3 {
        let mut v = gaps.expanded();
        v.sort_unstable();
        let ok = cjk_holds(v[0], v[1], v[2]);
        let bound = 63 * (v[1] as u128).pow(2);
        out.push(ConditionResult::new(
            "cjk",
            ok,
            format!("r={} vs 63·max(p,q)²={bound}", v[2]),
        ));
    } else {
        out.push(ConditionResult::not_applicable(
            "cjk",
            "needs exactly three gaps",
        ));
    }

    if gaps.distinct() == 2 {
        let labels = labelings(gaps);
        for case in 1..=3u8 {
            let hit = labels
                .iter()
                .find(|&&(p, k, q, l)| case_holds(case, p, k, q, l));
            out.push(ConditionResult::new(
                &format!("nakamigawa-{case}"),
                hit.is_some(),
                hit.map(|&(p, k, q, l)| format!("p={p}^({k}), q={q}^({l})")),
            ));
        }
        let hit = labels.iter().find_map(|&(p, k, q, l)| {
            nakamigawa_window(p, k, q, l).map(|a| format!("a={a}: {a}·{p} ≤ {q} ≤ {}·{p}", a + 1))
        });
        out.push(ConditionResult::new(
            "nakamigawa-representation",
            hit.is_some(),
            hit,
        ));
    } else {
        for name in [
            "nakamigawa-1",
            "nakamigawa-2",
            "nakamigawa-3",
            "nakamigawa-representation",
        ] {
            out.push(ConditionResult::not_applicable(
                name,
                "needs two distinct distances",
            ));
        }
    }

    out.push(staged_construction(table, gaps));
    out
}

fn case_holds(case: u8, p: u64, k: usize, q: u64, l: usize) -> bool {
    let (p, q, k, l) = (p as u128, q as u128, k as u128, l as u128);
    match case {
        1 => k == 1,
        2 => k * (k + 1) * p <= q,
        _ => k <= l && (k + 1) * p <= q,
    }
}

fn staged_construction(table: &HeightTable, gaps: &GapSet) -> ConditionResult {
    const NAME: &str = "staged-construction";
    if gaps.distinct() < 2 {
        return ConditionResult::not_applicable(NAME, "needs at least two distinct distances");
    }
    let ks: Vec<usize> = gaps.entries().iter().map(|e| e.1).collect();
    let splits = match gaps.split() {
        Some(s) if split_is_admissible(&ks, s) => vec![s],
        Some(s) => {
            return ConditionResult::new(
                NAME,
                false,
                format!(
                    "split s={}, p={} violates the multiplicity conditions",
                    s.s, s.p
                ),
            )
        }
        None => match auto_split(gaps) {
            Ok(v) => v,
            Err(e) => return ConditionResult::new(NAME, false, e.to_string()),
        },
    };
    let mut last_err = String::new();
    for split in splits {
        match thresholds(table, gaps, Some(split), 1) {
            Ok(rep) if rep.all_met() => {
                return ConditionResult::new(NAME, true, format!("s={}, p={}", split.s, split.p));
            }
            Ok(_) => last_err = format!("s={}, p={}: threshold not met", split.s, split.p),
            Err(e) => last_err = format!("s={}, p={}: {e}", split.s, split.p),
        }
    }
    ConditionResult::new(NAME, false, last_err)
}
