//! Info-clustering dendrograms: the partitions of a sequence read as a
//! hierarchy, merge heights being the λ-critical values.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::distributed::PrefixState;
use crate::error::{PspError, Result};
use crate::partition::Partition;
use crate::psp::Psp;
use crate::rational::Rational;
use crate::set::{self, Set};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub members: Set,
    /// `None` for leaves.
    pub height: Option<Rational>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dendrogram {
    nodes: Vec<Node>,
    root: usize,
}

impl Dendrogram {
    /// `levels[k]` holds on `[critical[k-1], critical[k])`, coarsest first;
    /// the last level is the leaf partition.
    pub fn from_levels(critical: &[Rational], levels: &[Partition]) -> Result<Dendrogram> {
        if levels.len() != critical.len() + 1 || critical.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PspError::Invalid("dendrogram levels do not match the critical values".into()));
        }
        let leaves = levels.last().unwrap();
        let mut nodes = Vec::new();
        let mut id: HashMap<Set, usize> = HashMap::new();
        for b in leaves.blocks() {
            id.insert(*b, nodes.len());
            nodes.push(Node { members: *b, height: None, children: Vec::new() });
        }
        for k in (0..critical.len()).rev() {
            let finer = &levels[k + 1];
            for b in levels[k].blocks() {
                let parts: Vec<Set> = finer.blocks().iter().copied().filter(|c| set::is_subset(*c, *b)).collect();
                if parts.iter().fold(0, |a, c| a | c) != *b {
                    return Err(PspError::Invalid("dendrogram levels are not nested".into()));
                }
                if parts.len() > 1 {
                    let children = parts.iter().map(|c| id[c]).collect();
                    id.insert(*b, nodes.len());
                    nodes.push(Node { members: *b, height: Some(critical[k]), children });
                }
            }
        }
        let top = levels[0].blocks();
        let root = if top.len() == 1 {
            id[&top[0]]
        } else {
            return Err(PspError::Invalid("coarsest level must be a single block".into()));
        };
        Ok(Dendrogram { nodes, root })
    }

    pub fn from_psp(psp: &Psp) -> Result<Dendrogram> {
        let levels: Vec<Partition> = psp.chain().iter().rev().cloned().collect();
        Dendrogram::from_levels(&psp.critical_lambda(), &levels)
    }

    /// The tree of a DistrPAR prefix at the end of its iteration.
    pub fn from_prefix(state: &PrefixState) -> Result<Dendrogram> {
        Dendrogram::from_levels(&state.critical_lambda(), &state.chain_lambda())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn root(&self) -> usize {
        self.root
    }

    /// Internal nodes as `(members, height)`, highest first.
    pub fn merges(&self) -> Vec<(Set, Rational)> {
        let mut out: Vec<(Set, Rational)> = self.nodes.iter().filter_map(|n| n.height.map(|h| (n.members, h))).collect();
        out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        out
    }

    /// Distinct merge heights, highest first.
    pub fn heights(&self) -> Vec<Rational> {
        let mut h: Vec<Rational> = self.merges().into_iter().map(|m| m.1).collect();
        h.dedup();
        h
    }

    /// Height at which `members` first forms a cluster.
    pub fn height_of(&self, members: Set) -> Option<Rational> {
        self.nodes.iter().find(|n| n.members == members).and_then(|n| n.height)
    }

    pub fn to_newick(&self, labels: &[String]) -> String {
        let mut s = String::new();
        self.newick(self.root, labels, &mut s);
        s.push(';');
        s
    }

    fn newick(&self, k: usize, labels: &[String], out: &mut String) {
        let n = &self.nodes[k];
        match n.height {
            None => out.push_str(&newick_label(&leaf_label(n.members, labels))),
            Some(h) => {
                out.push('(');
                for (i, c) in n.children.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    self.newick(*c, labels, out);
                }
                out.push(')');
                out.push_str(&h.to_string());
            }
        }
    }

    pub fn to_dot(&self, labels: &[String]) -> String {
        let mut s = String::from("graph dendrogram {\n");
        for (k, n) in self.nodes.iter().enumerate() {
            let label = match n.height {
                None => leaf_label(n.members, labels),
                Some(h) => format!("λ = {h}"),
            };
            let _ = writeln!(s, "  n{k} [label=\"{}\"];", label.replace('"', "\\\""));
        }
        for (k, n) in self.nodes.iter().enumerate() {
            for c in &n.children {
                let _ = writeln!(s, "  n{k} -- n{c};");
            }
        }
        s.push_str("}\n");
        s
    }
}

fn leaf_label(members: Set, labels: &[String]) -> String {
    set::members(members).map(|i| labels[i].as_str()).collect::<Vec<_>>().join(",")
}

fn newick_label(s: &str) -> String {
    if s.chars().any(|c| "()[]':;, \t".contains(c)) {
        format!("'{}'", s.replace('\'', "''"))
    } else {
        s.to_string()
    }
}
