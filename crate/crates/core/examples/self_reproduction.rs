//! Molecule-level self-reproduction, on a plain trace and on a cycle.

use achem::{
    detect_cycle, detect_selfrep, parse_chemistry, simulate, sweep_molecules, verify_theorem1, EquivalenceSpec,
    FeasibilityMode, SchedulerPolicy, SelfRepQuery,
};

fn main() -> achem::Result<()> {
    let query = SelfRepQuery::default();

    let spec = parse_chemistry(include_str!("data/autocatalytic.chem"))?;
    let trace = simulate(&spec, 8, SchedulerPolicy::FirstDeclared, FeasibilityMode::Standard);
    let eq = EquivalenceSpec::identity();
    let v = detect_selfrep(&spec, &trace, "a", &eq, &query)?;
    println!("a: {:?}, X = {:?}", v.status, v.consumed);
    for p in v.witness_paths.iter().take(3) {
        println!("  {p}");
    }

    let cycle = detect_cycle(&trace).expect("the autocatalytic pair cycles");
    let v = verify_theorem1(&spec, &trace, &cycle, "a", &eq, &query)?;
    println!("on the cycle: {:?} via {}", v.status, v.witness_paths[0]);

    let flip = parse_chemistry(include_str!("data/flip_flop.chem"))?;
    let t = simulate(&flip, 8, SchedulerPolicy::FirstDeclared, FeasibilityMode::Standard);
    let v = detect_selfrep(&flip, &t, "a", &eq, &query)?;
    println!("flip-flop a: {:?} ({:?})", v.status, v.failure.map(|_| "material basis"));

    // variants count as copies when the observer says so
    let mutation = parse_chemistry(include_str!("data/mutation.chem"))?;
    let t = simulate(&mutation, 12, SchedulerPolicy::RoundRobin, FeasibilityMode::Standard);
    let eq = EquivalenceSpec::from_spec(&mutation);
    for (g, verdict) in sweep_molecules(&mutation, &t, &eq, &query) {
        match verdict {
            Ok(v) => println!("  {g}: {:?} partner {:?}", v.status, v.partner),
            Err(e) => println!("  {g}: inconclusive ({e})"),
        }
    }
    Ok(())
}
