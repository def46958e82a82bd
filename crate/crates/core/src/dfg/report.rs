//! Plain-text and CSV renderings of the analyses.

use std::fmt::Write;

use super::alloc::Allocation;
use super::bound::IterationBound;
use super::fold::FoldedEdge;
use super::lifetime::LifetimeTable;
use super::Dfg;

pub fn folding_text(dfg: &Dfg, folded: &[FoldedEdge]) -> String {
    let mut s = String::from("edge        w  P_U  u  v  D_F\n");
    for f in folded {
        let flag = if f.needs_retiming() {
            "  retiming required"
        } else {
            ""
        };
        let _ = writeln!(
            s,
            "{:<10} {:>2} {:>4} {:>2} {:>2} {:>4}{flag}",
            dfg.edge_label(f.edge),
            f.delays,
            f.pipeline,
            f.u,
            f.v,
            f.folded
        );
    }
    s
}

pub fn folding_csv(dfg: &Dfg, folded: &[FoldedEdge]) -> String {
    let mut s = String::from("from,to,w,p_u,u,v,d_f,retiming_required\n");
    for f in folded {
        let e = &dfg.edges()[f.edge];
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            dfg.node(e.from).id,
            dfg.node(e.to).id,
            f.delays,
            f.pipeline,
            f.u,
            f.v,
            f.folded,
            f.needs_retiming()
        );
    }
    s
}

pub fn lifetime_text(table: &LifetimeTable) -> String {
    let mut s = String::from("value  T_in  T_out  reads\n");
    for v in &table.values {
        let reads: Vec<String> = v.reads.iter().map(i64::to_string).collect();
        let _ = writeln!(
            s,
            "{:<6} {:>4} {:>6}  {}",
            v.label,
            v.tin,
            v.tout,
            reads.join(" ")
        );
    }
    let counts: Vec<String> = table.live_counts().iter().map(usize::to_string).collect();
    let _ = writeln!(
        s,
        "live per cycle (mod {}): {}",
        table.period,
        counts.join(" ")
    );
    let _ = writeln!(s, "minimum registers: {}", table.min_registers());
    s
}

pub fn lifetime_csv(table: &LifetimeTable) -> String {
    let mut s = String::from("value,t_in,t_out,reads\n");
    for v in &table.values {
        let reads: Vec<String> = v.reads.iter().map(i64::to_string).collect();
        let _ = writeln!(s, "{},{},{},{}", v.label, v.tin, v.tout, reads.join(" "));
    }
    s
}

pub fn alloc_text(alloc: &Allocation) -> String {
    let mut s = format!(
        "{} registers, period {}\ncycle",
        alloc.registers, alloc.period
    );
    for r in 0..alloc.registers {
        let _ = write!(s, " {:>4}", format!("R{}", r + 1));
    }
    s.push('\n');
    for (t, row) in alloc.grid().iter().enumerate() {
        let _ = write!(s, "{t:>5}");
        for cell in row {
            let _ = write!(s, " {:>4}", cell.as_deref().unwrap_or("."));
        }
        s.push('\n');
    }
    s
}

pub fn alloc_csv(alloc: &Allocation) -> String {
    let mut s = String::from("value,cycle,register,move\n");
    for path in &alloc.paths {
        for (i, (&r, m)) in path.registers.iter().zip(&path.moves).enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{:?}",
                path.label,
                path.tin + i as i64,
                r + 1,
                m
            );
        }
    }
    s
}

fn loop_nodes(dfg: &Dfg, nodes: &[usize]) -> String {
    let ids: Vec<&str> = nodes.iter().map(|&i| dfg.node(i).id.as_str()).collect();
    ids.join("→")
}

pub fn bound_text(dfg: &Dfg, bound: &IterationBound) -> String {
    let mut s = String::new();
    for (i, l) in bound.loops.iter().enumerate() {
        let mark = if Some(i) == bound.critical {
            "  critical"
        } else {
            ""
        };
        let _ = writeln!(
            s,
            "loop {}: {}  t={} w={}  bound {} = {}{mark}",
            i + 1,
            loop_nodes(dfg, &l.nodes),
            l.time,
            l.delays,
            l.symbolic,
            l.bound
        );
    }
    if let Some(note) = &bound.note {
        let _ = writeln!(s, "{note}");
    }
    let _ = writeln!(s, "T∞ = {}", bound.bound);
    s
}

pub fn bound_csv(dfg: &Dfg, bound: &IterationBound) -> String {
    let mut s = String::from("loop,nodes,time,delays,symbolic,bound,critical\n");
    for (i, l) in bound.loops.iter().enumerate() {
        let ids: Vec<&str> = l.nodes.iter().map(|&n| dfg.node(n).id.as_str()).collect();
        let _ = writeln!(
            s,
            "{},{},{},{},\"{}\",{},{}",
            i + 1,
            ids.join(" "),
            l.time,
            l.delays,
            l.symbolic,
            l.bound,
            Some(i) == bound.critical
        );
    }
    s
}
