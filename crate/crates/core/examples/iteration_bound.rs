//! Loop bounds and the iteration bound of the decoder's feedback loops.

use scma::dfg::parse::{load_dfg, parse_dfg};
use scma::dfg::{iteration_bound, report, Rational};

fn main() -> scma::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/loop_bounds.dfg");
    let mut graph = load_dfg(path)?;
    let bound = iteration_bound(&graph)?;
    print!("{}", report::bound_text(&graph, &bound));

    // A slower comparator moves the critical loop.
    graph.set_timing("T_C", Rational::from_integer(4));
    let slower = iteration_bound(&graph)?;
    let critical = slower.critical_loop().expect("graph has loops");
    println!(
        "\nwith T_C = 4: T∞ = {} via {}",
        slower.bound, critical.symbolic
    );

    // Graphs can also be written inline.
    let g = parse_dfg("node x adder T=3/2\nnode y comparator T=1\nedge x y\nedge y x w=2\n")?;
    println!("inline loop: T∞ = {}", iteration_bound(&g)?.bound);
    Ok(())
}
