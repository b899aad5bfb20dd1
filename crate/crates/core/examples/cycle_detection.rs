//! Find the cyclic tail of a run.

use achem::{detect_cycle, parse_chemistry, simulate, FeasibilityMode, SchedulerPolicy};

fn report(name: &str, text: &str, steps: usize) -> achem::Result<()> {
    let spec = parse_chemistry(text)?;
    let trace = simulate(&spec, steps, SchedulerPolicy::FirstDeclared, FeasibilityMode::Standard);
    match detect_cycle(&trace) {
        Some(w) => {
            let body = &trace.executed()[w.cycle_start()..w.cycle_start() + w.cycle_len];
            println!("{name}: prefix {} period {}, body {:?}", w.prefix_len, w.cycle_len, body);
        }
        None => println!("{name}: no cycle within {} states", trace.len()),
    }
    Ok(())
}

fn main() -> achem::Result<()> {
    report("autocatalytic", include_str!("data/autocatalytic.chem"), 8)?;
    report("flip-flop", include_str!("data/flip_flop.chem"), 8)?;
    report("mutation", include_str!("data/mutation.chem"), 30)?;
    report("growth", "molecules: a\nreaction r: a -> 2 a\ninit: a", 30)?;
    Ok(())
}
