//! Potential causal paths along a run, whole and windowed.

use achem::{
    causal_paths, count_pairwise_paths, parse_chemistry, simulate, FeasibilityMode, PathQuery, PathScope,
    SchedulerPolicy, Step,
};

fn main() -> achem::Result<()> {
    let spec = parse_chemistry(include_str!("data/hypercycle.chem"))?;
    let trace = simulate(&spec, 4, SchedulerPolicy::RoundRobin, FeasibilityMode::Standard);
    println!("executed {:?}", trace.executed());

    let query = PathQuery::new(3);
    for path in causal_paths(&spec, &trace, "x", "x", &query)? {
        println!("  {path}");
    }

    let late = query.clone().window(2, trace.len() - 1);
    println!("x => y from state 2 on: {}", causal_paths(&spec, &trace, "x", "y", &late)?.len());

    // only the reactions that actually fired in the first two steps
    let fired = PathScope::Steps(vec![Step::new("r1", 0), Step::new("r2", 1)]);
    let members = [spec.molecules()[0].clone(), spec.molecules()[1].clone()];
    let n = count_pairwise_paths(&spec, &trace, &members, &members, &query.scope(fired))?;
    println!("paths among {{x, y}} over <r1@0, r2@1>: {n}");

    let tight = PathQuery::new(4).budget(5);
    match causal_paths(&spec, &trace, "x", "x", &tight) {
        Err(e) if e.is_budget_exceeded() => println!("with a budget of 5: {e}"),
        other => println!("unexpected: {other:?}"),
    }
    Ok(())
}
