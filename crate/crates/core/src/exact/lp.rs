//! CPLEX LP text export of the model, for cross-checking with external MIP
//! solvers.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::tour::Edge;

use super::SolveOptions;

const TERMS_PER_LINE: usize = 6;

fn var(e: &Edge) -> String {
    format!("x_{}_{}", e.item, e.placeholder)
}

fn write_sum(out: &mut String, terms: impl IntoIterator<Item = String>) {
    for (k, t) in terms.into_iter().enumerate() {
        if k > 0 {
            if k % TERMS_PER_LINE == 0 {
                out.push_str("\n   ");
            }
            out.push_str(" + ");
        }
        out.push_str(&t);
    }
}

/// Renders the model as LP text.
pub fn lp_string(inst: &Instance, opts: &SolveOptions) -> Result<String> {
    let n = inst.n();
    let edges: Vec<Edge> = (0..n)
        .flat_map(|i| (0..n).map(move |p| (i, p)))
        .map(|(i, p)| Edge::new(inst.item_id(i), inst.placeholder_id(p)))
        .collect();
    let mut forced = opts.forced_edges.clone();
    if let Some((i, p)) = inst.fixed_edge() {
        forced.insert(Edge::new(i, p));
    }
    for e in forced.iter().chain(&opts.forbidden_edges) {
        if !inst.is_item(e.item) || !inst.is_placeholder(e.placeholder) {
            return Err(Error::NonConnectable(e.item, e.placeholder));
        }
    }

    let mut out = String::new();
    writeln!(out, "\\ Joint routing-assignment model, n = {n} pairs").unwrap();
    writeln!(
        out,
        "\\ Subtour elimination constraints sum x(S) <= |S| - 1 are enforced lazily and not listed."
    )
    .unwrap();
    out.push_str("Minimize\n obj: ");
    write_sum(
        &mut out,
        edges.iter().map(|e| format!("{:.12} {}", e.cost(inst), var(e))),
    );
    out.push_str("\nSubject To\n");
    for v in inst.node_ids() {
        write!(out, " deg_{v}: ").unwrap();
        write_sum(
            &mut out,
            edges.iter().filter(|e| e.touches(v)).map(var),
        );
        out.push_str(" = 2\n");
    }
    if let (Some(set), Some(min)) = (&opts.retain_set, opts.retain_min) {
        out.push_str(" retain: ");
        write_sum(&mut out, set.iter().map(var));
        let sense = if opts.retain_exact { "=" } else { ">=" };
        writeln!(out, " {sense} {min}").unwrap();
    }
    out.push_str("Bounds\n");
    for e in &forced {
        writeln!(out, " {} = 1", var(e)).unwrap();
    }
    for e in &opts.forbidden_edges {
        writeln!(out, " {} = 0", var(e)).unwrap();
    }
    out.push_str("Binaries\n");
    for chunk in edges.chunks(TERMS_PER_LINE) {
        out.push(' ');
        out.push_str(&chunk.iter().map(var).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out.push_str("End\n");
    Ok(out)
}

/// Writes the model to `path` in LP format.
pub fn export_lp(inst: &Instance, opts: &SolveOptions, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, lp_string(inst, opts)?).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::NodeId;
    use crate::tour::Tour;

    #[test]
    fn two_pair_model_counts() {
        let inst = Instance::generate(2, 0, 1.0).unwrap();
        let text = lp_string(&inst, &SolveOptions::default()).unwrap();
        let binaries: Vec<&str> = text
            .split("Binaries\n")
            .nth(1)
            .unwrap()
            .split_whitespace()
            .take_while(|w| *w != "End")
            .collect();
        assert_eq!(binaries, ["x_1_3", "x_1_4", "x_2_3", "x_2_4"]);
        assert_eq!(text.matches(" deg_").count(), 4);
        assert!(text.contains(" x_2_4 = 1\n"));
        assert!(text.contains("lazily"));
    }

    #[test]
    fn forced_and_retain_rows() {
        let inst = Instance::generate(3, 0, 1.0).unwrap().with_fixed_pair(false);
        let t = Tour::identity(3);
        let opts = SolveOptions {
            forced_edges: [Edge::new(NodeId(1), NodeId(4))].into_iter().collect(),
            forbidden_edges: [Edge::new(NodeId(2), NodeId(6))].into_iter().collect(),
            retain_set: Some(t.edge_set()),
            retain_min: Some(5),
            ..Default::default()
        };
        let text = lp_string(&inst, &opts).unwrap();
        assert!(text.contains(" x_1_4 = 1\n"));
        assert!(text.contains(" x_2_6 = 0\n"));
        assert_eq!(text.matches(" retain: ").count(), 1);
        assert!(text.contains(">= 5\n"));
    }
}
