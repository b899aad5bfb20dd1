//! Brute-force reference implementations and random instance generators
//! shared by the integration tests. Nothing here reuses the library's
//! search code: paths are found by exhaustive enumeration over the trace
//! and cycles by direct comparison of every candidate `(n, l)`.
#![allow(dead_code)]

use std::collections::BTreeSet;

use achem::{ChemistrySpec, Multiset, Trace};
use rand::Rng;

/// `(waypoints, [(reaction, anchor)])`
pub type RawPath = (Vec<String>, Vec<(String, usize)>);

fn feasible(spec: &ChemistrySpec, reaction: usize, state: &Multiset, strict: bool) -> bool {
    let r = &spec.reactions()[reaction];
    r.input.iter().all(|(g, need)| {
        let have = state.count(g);
        if strict {
            have > need
        } else {
            have >= need
        }
    })
}

/// Every path from `from` to `to` with 1..=`max_len` links whose anchors
/// come from `anchors` (state indices), enumerated by trying every
/// increasing anchor tuple, every reaction at each anchor and every
/// waypoint choice.
pub fn brute_paths(
    spec: &ChemistrySpec,
    trace: &Trace,
    from: &str,
    to: &str,
    max_len: usize,
    anchors: &[usize],
    strict: bool,
) -> Vec<RawPath> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for tuple in increasing_tuples(anchors, len) {
            let per_step: Vec<Vec<usize>> = tuple
                .iter()
                .map(|&s| {
                    (0..spec.reactions().len())
                        .filter(|&r| feasible(spec, r, &trace.states()[s], strict))
                        .collect()
                })
                .collect();
            for reactions in cartesian(&per_step) {
                for waypoints in chains(spec, &reactions, from, to) {
                    let steps = reactions
                        .iter()
                        .zip(&tuple)
                        .map(|(&r, &s)| (spec.reactions()[r].name.clone(), s))
                        .collect();
                    out.push((waypoints, steps));
                }
            }
        }
    }
    out.sort();
    out
}

/// Same as [`brute_paths`] restricted to explicit `(reaction, anchor)`
/// occurrences.
pub fn brute_paths_over(
    spec: &ChemistrySpec,
    occurrences: &[(String, usize)],
    from: &str,
    to: &str,
    max_len: usize,
) -> Vec<RawPath> {
    let occ: BTreeSet<(usize, String)> = occurrences.iter().map(|(r, s)| (*s, r.clone())).collect();
    let occ: Vec<(usize, String)> = occ.into_iter().collect();
    let mut out = Vec::new();
    for len in 1..=max_len {
        for pick in index_subsets(occ.len(), len) {
            let chosen: Vec<&(usize, String)> = pick.iter().map(|&i| &occ[i]).collect();
            if chosen.windows(2).any(|w| w[0].0 >= w[1].0) {
                continue;
            }
            let reactions: Vec<usize> = chosen.iter().map(|(_, r)| spec.reaction_index(r).unwrap()).collect();
            for waypoints in chains(spec, &reactions, from, to) {
                let steps = chosen.iter().map(|(s, r)| (r.clone(), *s)).collect();
                out.push((waypoints, steps));
            }
        }
    }
    out.sort();
    out
}

fn chains(spec: &ChemistrySpec, reactions: &[usize], from: &str, to: &str) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    let mut cur = vec![from.to_string()];
    fn go(spec: &ChemistrySpec, reactions: &[usize], to: &str, cur: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
        let i = cur.len() - 1;
        if i == reactions.len() {
            if cur.last().unwrap() == to {
                out.push(cur.clone());
            }
            return;
        }
        let r = &spec.reactions()[reactions[i]];
        if r.input.count(cur.last().unwrap()) == 0 {
            return;
        }
        for (g, _) in r.output.iter() {
            cur.push(g.to_string());
            go(spec, reactions, to, cur, out);
            cur.pop();
        }
    }
    go(spec, reactions, to, &mut cur, &mut out);
    out
}

fn increasing_tuples(items: &[usize], len: usize) -> Vec<Vec<usize>> {
    index_subsets(items.len(), len)
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| items[i]).collect())
        .collect()
}

fn index_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    (k - 1..n)
        .flat_map(|last| {
            index_subsets(last, k - 1).into_iter().map(move |mut v| {
                v.push(last);
                v
            })
        })
        .collect()
}

fn cartesian(choices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    choices.iter().fold(vec![Vec::new()], |acc, opts| {
        acc.iter()
            .flat_map(|prefix| {
                opts.iter().map(move |&o| {
                    let mut v = prefix.clone();
                    v.push(o);
                    v
                })
            })
            .collect()
    })
}

/// First `(n, l)` by smallest `l`, then smallest `n`, such that every
/// recorded `j > n` with `j + l` recorded has `states[j] == states[j + l]`
/// and the trace holds `n + 2l + 1` states.
pub fn brute_cycle(states: &[Multiset]) -> Option<(usize, usize)> {
    let len = states.len();
    for l in 1..len {
        for n in 0..len {
            if n + 2 * l + 1 > len {
                break;
            }
            if (n + 1..len - l).all(|j| states[j] == states[j + l]) {
                return Some((n, l));
            }
        }
    }
    None
}

/// DSL text for a random chemistry over `m0..m{k-1}`.
pub fn random_chemistry(rng: &mut impl Rng, max_molecules: usize, max_reactions: usize) -> String {
    let k = rng.gen_range(2..=max_molecules);
    let names: Vec<String> = (0..k).map(|i| format!("m{i}")).collect();
    let mut text = format!("molecules: {}\n", names.join(", "));
    let side = |rng: &mut dyn rand::RngCore, min: usize| -> String {
        let n = rng.gen_range(min..=2);
        let mut picked: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        picked.sort();
        picked.dedup();
        picked
            .iter()
            .map(|&i| format!("{} {}", rng.gen_range(1..=2), names[i]))
            .collect::<Vec<_>>()
            .join(" + ")
    };
    for r in 0..rng.gen_range(1..=max_reactions) {
        let input = side(rng, 1);
        let output = side(rng, 0);
        text.push_str(&format!("reaction r{r}: {input} -> {output}\n"));
    }
    let init: Vec<String> = names
        .iter()
        .filter_map(|n| {
            let c = rng.gen_range(0..=3);
            (c > 0).then(|| format!("{c} {n}"))
        })
        .collect();
    text.push_str(&format!("init: {}\n", init.join(", ")));
    text
}

pub fn raw(paths: &[achem::CausalPath]) -> Vec<RawPath> {
    let mut v: Vec<RawPath> = paths
        .iter()
        .map(|p| {
            (
                p.waypoints.iter().map(|s| s.to_string()).collect(),
                p.steps.steps().iter().map(|s| (s.reaction.clone(), s.state)).collect(),
            )
        })
        .collect();
    v.sort();
    v
}
