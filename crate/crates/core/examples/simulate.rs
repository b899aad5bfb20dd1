//! Parse a chemistry and run it under both scheduling policies.
//!
//! `cargo run --example simulate -- path/to/file.chem [steps]`

use std::fs;

use achem::{parse_chemistry, simulate, write_trace, FeasibilityMode, SchedulerPolicy};

fn main() -> achem::Result<()> {
    let mut args = std::env::args().skip(1);
    let text = match args.next() {
        Some(path) => fs::read_to_string(path)?,
        None => include_str!("data/hypercycle.chem").to_string(),
    };
    let steps = args.next().and_then(|s| s.parse().ok()).unwrap_or(6);
    let spec = parse_chemistry(&text)?;
    print!("{spec}");

    for policy in SchedulerPolicy::ALL {
        let trace = simulate(&spec, steps, policy, FeasibilityMode::Standard);
        println!("\n{policy:?} ({:?} after {} steps)", trace.stop(), trace.executed().len());
        for (i, state) in trace.states().iter().enumerate() {
            match i.checked_sub(1) {
                Some(prev) => println!("  {i:>3}  {:<6} {state}", trace.executed()[prev]),
                None => println!("  {i:>3}  {:<6} {state}", ""),
            }
        }
    }

    let strict = simulate(&spec, steps, SchedulerPolicy::FirstDeclared, FeasibilityMode::Strict);
    println!("\nstrict feasibility stops after {} steps", strict.executed().len());

    let mut out = Vec::new();
    write_trace(&strict, &mut out)?;
    print!("{}", String::from_utf8_lossy(&out));
    Ok(())
}
