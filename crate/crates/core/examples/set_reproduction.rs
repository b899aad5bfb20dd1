//! Self-reproduction of a set of molecules: the hypercycle {x, y}.

use achem::{
    detect_selfrep1, parse_chemistry, simulate, EquivalenceSpec, FeasibilityMode, HierEntity, Level1Caps,
    SchedulerPolicy,
};

fn main() -> achem::Result<()> {
    let spec = parse_chemistry(include_str!("data/hypercycle.chem"))?;
    let z: HierEntity = "{x, y}".parse()?;
    let caps = Level1Caps::default();

    for policy in SchedulerPolicy::ALL {
        let trace = simulate(&spec, 10, policy, FeasibilityMode::Standard);
        let v = detect_selfrep1(&spec, &trace, &z, &EquivalenceSpec::identity(), &caps, FeasibilityMode::Standard)?;
        println!("{policy:?}: {:?}", v.status);
        for r in &v.witness {
            println!("  meta reaction {r}");
        }
        if let (Some(p), Some(nt), Some((before, after))) = (&v.partner, v.nontriviality, v.copy_count) {
            println!("  partner {p}, {} paths > {}, copies {before} -> {after}, depleted {:?}", nt.counted, nt.threshold, v.decreased);
        }
    }

    let spec = parse_chemistry(include_str!("data/independent_links.chem"))?;
    let trace = simulate(&spec, 3, SchedulerPolicy::FirstDeclared, FeasibilityMode::Standard);
    let z: HierEntity = "{a, b, e1}".parse()?;
    let v = detect_selfrep1(&spec, &trace, &z, &EquivalenceSpec::from_spec(&spec), &caps, FeasibilityMode::Standard)?;
    println!("\n{z}: {:?} ({:?})", v.status, v.failure);
    println!("{}", serde_json::to_string_pretty(&v).expect("verdicts serialize"));
    Ok(())
}
