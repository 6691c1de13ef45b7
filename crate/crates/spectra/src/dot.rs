//! Graphviz output for models, resolutions and realized spectra.

use std::fmt::Write as _;

use spectra_core::resolution::{Choice, ResolutionSpace};
use spectra_core::{EquivalenceId, Nplts};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// States as nodes; a probabilistic transition goes through a point node.
pub fn model_dot(m: &Nplts) -> String {
    let mut out = format!("digraph {} {{\n  node [shape=circle];\n", quote(m.name()));
    for s in m.state_ids() {
        let _ = writeln!(out, "  {};", quote(m.state_name(s)));
    }
    for (i, t) in m.transitions().iter().enumerate() {
        let src = quote(m.state_name(t.source));
        let label = m.action_name(t.label);
        if let [(s, _)] = t.target.entries() {
            let _ = writeln!(out, "  {src} -> {} [label={}];", quote(m.state_name(*s)), quote(label));
        } else {
            let mid = format!("\"t{i}\"");
            let _ = writeln!(out, "  {mid} [shape=point];");
            let _ = writeln!(out, "  {src} -> {mid} [label={}, arrowhead=none];", quote(label));
            for &(s, p) in t.target.entries() {
                let _ = writeln!(out, "  {mid} -> {} [label={}, style=dashed];", quote(m.state_name(s)), quote(&p.to_string()));
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Every resolution in the space as a cluster of tree nodes, labeled with
/// the model states they correspond to.
pub fn resolutions_dot(m: &Nplts, space: &ResolutionSpace, limit: usize) -> String {
    let tree = space.tree();
    let mut out = String::from("digraph resolutions {\n  node [shape=circle];\n");
    for (k, z) in space.iter().enumerate().take(limit) {
        let _ = writeln!(out, "  subgraph \"cluster_{k}\" {{\n    label=\"z{k}{}\";", if z.is_maximal() { " (maximal)" } else { "" });
        for n in z.nodes(tree) {
            let name = format!("\"z{k}n{}\"", n.index());
            let _ = writeln!(out, "    {name} [label={}];", quote(m.state_name(tree.corr(n))));
            if let Choice::Take(b) = z.choice(n) {
                let branch = &tree.node(n).branches[b as usize];
                let label = m.action_name(branch.label);
                for &(c, p) in &branch.children {
                    let child = format!("\"z{k}n{}\"", c.index());
                    let _ = writeln!(out, "    {name} -> {child} [label={}];", quote(&format!("{label} {p}")));
                }
            }
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

/// Equivalences as nodes and implications as edges, finer above coarser.
pub fn spectrum_dot(edges: &[(EquivalenceId, EquivalenceId)]) -> String {
    let mut out = String::from("digraph spectrum {\n  rankdir=TB;\n  node [shape=box];\n");
    for id in EquivalenceId::ALL {
        let _ = writeln!(out, "  {};", quote(id.as_str()));
    }
    for (a, b) in edges {
        let _ = writeln!(out, "  {} -> {};", quote(a.as_str()), quote(b.as_str()));
    }
    out.push_str("}\n");
    out
}
