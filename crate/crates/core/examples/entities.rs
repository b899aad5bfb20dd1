//! Sets of molecules as entities, and when one set causes another.

use std::collections::BTreeSet;

use achem::{
    enumerate_level1, is_nontrivial, level1_causal, parse_chemistry, simulate, takes_part, FeasibilityMode,
    HierEntity, MetaReaction, ReactionSeq, SchedulerPolicy, Step, Symbol,
};

fn meta(spec: &achem::ChemistrySpec, trace: &achem::Trace) -> achem::Result<MetaReaction> {
    let steps = ReactionSeq::new(vec![Step::new("r1", 0), Step::new("r2", 1), Step::new("r3", 2)])?;
    MetaReaction::new(steps, spec, trace, FeasibilityMode::Standard)
}

fn main() -> achem::Result<()> {
    let support: BTreeSet<Symbol> = ["a", "b", "c"].into_iter().map(Symbol::from).collect();
    for e in enumerate_level1(&support, 3, 100)? {
        println!("{e} (level {})", e.level());
    }
    let nested: HierEntity = "{{a, b}, c}".parse()?;
    println!("{nested} has level {}", nested.level());

    let spec = parse_chemistry(include_str!("data/meta_reaction.chem"))?;
    let trace = simulate(&spec, 3, SchedulerPolicy::FirstDeclared, FeasibilityMode::Standard);
    let r = meta(&spec, &trace)?;
    let z1: HierEntity = "{a, c, e1}".parse()?;
    let z2: HierEntity = "{c, d, f}".parse()?;
    println!("\nR = {r}, net product {}", r.net_product(&spec)?);
    println!("{z1} takes part: {}", takes_part(&z1, &r, &spec)?);
    println!("{z1} =>1 {z2}: {}", level1_causal(&z1, &r, &z2, &spec)?);

    let spec = parse_chemistry(include_str!("data/independent_links.chem"))?;
    let trace = simulate(&spec, 3, SchedulerPolicy::FirstDeclared, FeasibilityMode::Standard);
    let r = meta(&spec, &trace)?;
    let z1: HierEntity = "{a, b, e1}".parse()?;
    let z2: HierEntity = "{a′, b′, f}".parse()?;
    let nt = is_nontrivial(&spec, &trace, &z1, &z2, std::slice::from_ref(&r), 4, FeasibilityMode::Standard)?;
    println!("\n{z1} =>1 {z2}: {}", level1_causal(&z1, &r, &z2, &spec)?);
    println!("but only {} paths for {} members: non-trivial = {}", nt.counted, nt.threshold, nt.nontrivial);
    Ok(())
}
