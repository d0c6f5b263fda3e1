use std::fmt::Write;

use super::{Rule, TableauNode};

#[derive(Clone, Debug)]
struct TraceNode {
    parent: Option<usize>,
    rule: Rule,
    text: String,
    outcome: Option<String>,
}

/// Every node the search created, for rendering as a DOT graph.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    nodes: Vec<TraceNode>,
}

impl Trace {
    pub(crate) fn record(&mut self, u: &TableauNode) {
        debug_assert_eq!(u.id, self.nodes.len());
        self.nodes.push(TraceNode {
            parent: u.parent,
            rule: u.rule,
            text: u.to_string(),
            outcome: None,
        });
    }

    pub(crate) fn outcome(&mut self, id: usize, outcome: impl Into<String>) {
        if let Some(n) = self.nodes.get_mut(id) {
            n.outcome = Some(outcome.into());
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tableau {\n  node [shape=box, fontname=\"monospace\"];\n");
        for (id, n) in self.nodes.iter().enumerate() {
            let mut label = escape(&n.text);
            if let Some(o) = &n.outcome {
                label.push_str("\\n");
                label.push_str(&escape(o));
            }
            let _ = writeln!(out, "  n{id} [label=\"{label}\"];");
            if let Some(p) = n.parent {
                let _ = writeln!(out, "  n{p} -> n{id} [label=\"{}\"];", n.rule);
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
