//! Report files and the DistrPAR message trace.

use psp_core::cluster::Dendrogram;
use psp_core::distributed::Message;
use psp_core::partition::Partition;
use psp_core::psp::PspReport;
use psp_core::segmented::Segmented;
use psp_core::AffineFn;
use serde::{Deserialize, Serialize};

use crate::problem::{Problem, Q, SCHEMA};

pub type Blocks = Vec<Vec<String>>;

fn blocks(p: &Problem, part: &Partition) -> Blocks {
    part.blocks().iter().map(|b| p.names(*b)).collect()
}

fn qs(v: &[psp_core::Rational]) -> Vec<Q> {
    v.iter().copied().map(Q).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PspSection {
    /// Ascending α-critical values.
    pub alpha: Vec<Q>,
    /// Ascending λ-critical values, `λ = f(V) - α`.
    pub lambda: Vec<Q>,
    /// Singletons first, `{V}` last.
    pub partitions: Vec<Blocks>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportFile {
    pub schema: u32,
    pub algorithm: String,
    pub users: Vec<String>,
    pub order: Vec<String>,
    pub psp: PspSection,
    pub r_aco: Q,
    pub r_nco: Q,
    pub fundamental_partition: Blocks,
    pub mmi: Q,
    pub secret_capacity: Q,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strength: Option<Q>,
    pub optimal_rate_aco: Vec<Q>,
    pub optimal_rate_nco: Option<Vec<Q>>,
    pub sfm_call_count: u64,
    pub degenerate: bool,
}

impl ReportFile {
    pub fn new(p: &Problem, r: &PspReport) -> ReportFile {
        ReportFile {
            schema: SCHEMA,
            algorithm: r.algorithm.name().to_string(),
            users: p.labels().to_vec(),
            order: r.order.iter().map(|i| p.labels()[*i].clone()).collect(),
            psp: PspSection {
                alpha: qs(r.psp.critical_alpha()),
                lambda: qs(&r.psp.critical_lambda()),
                partitions: r.psp.chain().iter().map(|c| blocks(p, c)).collect(),
            },
            r_aco: Q(r.r_aco),
            r_nco: Q(r.r_nco),
            fundamental_partition: blocks(p, &r.fundamental_partition),
            mmi: Q(r.mmi),
            secret_capacity: Q(r.secret_capacity),
            strength: r.strength.map(Q),
            optimal_rate_aco: qs(&r.optimal_rate_aco),
            optimal_rate_nco: r.optimal_rate_nco.as_deref().map(qs),
            sfm_call_count: r.sfm_call_count,
            degenerate: r.degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: Q,
    pub hi: Q,
    pub slope: Q,
    pub intercept: Q,
}

fn pieces(s: &Segmented<AffineFn>) -> Vec<Piece> {
    s.iter()
        .map(|(iv, a)| Piece { lo: Q(iv.lo), hi: Q(iv.hi), slope: Q(a.slope), intercept: Q(a.intercept) })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRate {
    pub user: String,
    pub pieces: Vec<Piece>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub step: usize,
    pub sender: String,
    pub receiver: Option<String>,
    /// λ-critical values of the sender's prefix.
    pub breakpoints: Vec<Q>,
    /// Prefix partitions, coarsest first.
    pub partitions: Vec<Blocks>,
    /// λ-domain rates of the prefix users.
    pub rates: Vec<TraceRate>,
}

pub fn trace(p: &Problem, log: &[Message]) -> Vec<TraceEntry> {
    log.iter()
        .map(|m| {
            let s = &m.payload;
            TraceEntry {
                step: m.step,
                sender: p.labels()[m.sender].clone(),
                receiver: m.receiver.map(|r| p.labels()[r].clone()),
                breakpoints: qs(&s.critical_lambda()),
                partitions: s.chain_lambda().iter().map(|c| blocks(p, c)).collect(),
                rates: psp_core::set::members(s.prefix)
                    .map(|u| TraceRate { user: p.labels()[u].clone(), pieces: pieces(s.rates_lambda.coord(u)) })
                    .collect(),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: usize,
    pub members: Vec<String>,
    pub height: Option<Q>,
    pub children: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeFile {
    pub schema: u32,
    pub users: Vec<String>,
    pub root: usize,
    pub nodes: Vec<TreeNode>,
}

impl TreeFile {
    pub fn new(p: &Problem, d: &Dendrogram) -> TreeFile {
        TreeFile {
            schema: SCHEMA,
            users: p.labels().to_vec(),
            root: d.root(),
            nodes: d
                .nodes()
                .iter()
                .enumerate()
                .map(|(id, n)| TreeNode {
                    id,
                    members: p.names(n.members),
                    height: n.height.map(Q),
                    children: n.children.clone(),
                })
                .collect(),
        }
    }
}
