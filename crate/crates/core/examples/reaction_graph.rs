//! The potential reaction graph of a state, printed as DOT.
//!
//! `cargo run --example reaction_graph | dot -Tsvg > graph.svg`

use achem::{causal_edges, export_dot, parse_chemistry, reaction_graph, FeasibilityMode};

fn main() -> achem::Result<()> {
    let spec = parse_chemistry(include_str!("data/meta_reaction.chem"))?;
    let state = spec.initial();

    for e in causal_edges(state, &spec, 0, FeasibilityMode::Standard) {
        eprintln!("{} =={}=> {}", e.source, e.via, e.target);
    }
    let graph = reaction_graph(state, &spec, 0, FeasibilityMode::Standard);
    eprintln!("products not yet present: {:?}", graph.output_only);
    print!("{}", export_dot(&graph));
    Ok(())
}
