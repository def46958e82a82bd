//! Folds the shipped datapath branch onto one adder and one multiplier,
//! then derives register lifetimes and a forward-backward allocation.

use scma::dfg::parse::{load_dfg, load_folding_spec};
use scma::dfg::{allocate_registers, fold, lifetime_analysis, report};

fn main() -> scma::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/data");
    let graph = load_dfg(format!("{dir}/init_branch.dfg"))?;
    let spec = load_folding_spec(format!("{dir}/init_branch.fold"))?;

    let folded = fold(&graph, &spec)?;
    print!("{}", report::folding_text(&graph, &folded));

    let table = lifetime_analysis(&graph, &spec, &folded)?;
    print!("\n{}", report::lifetime_text(&table));

    let alloc = allocate_registers(&table)?;
    alloc.replay()?;
    print!("\n{}", report::alloc_text(&alloc));
    println!("replay: every value reaches its consumers");
    Ok(())
}
