//! Problem files: a model tag, the user labels and a model payload.

use std::collections::BTreeMap;
use std::fmt;

use psp_core::oracle::{BitAssignmentSource, CHECK_LIMIT, MatrixSourceGF2, TableOracle, WeightedGraphCut};
use psp_core::set::{self, GroundSet, Set};
use psp_core::{Oracle, Rational};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::CliError;

pub const SCHEMA: u32 = 1;

/// A rational written as `"p/q"`; integers are also accepted bare on input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational such as \"13/2\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
                v.parse().map(Q).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
                Ok(Q(Rational::from(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
                Ok(Q(Rational::int(v as i128)))
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Bits,
    Gf2,
    Graph,
    Table,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphPayload {
    pub edges: Vec<(String, String, Q)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default = "default_schema")]
    pub schema: u32,
    pub model: Model,
    pub users: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gf2: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphPayload>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<BTreeMap<String, Q>>,
}

fn default_schema() -> u32 {
    SCHEMA
}

pub struct Problem {
    pub model: Model,
    pub ground: GroundSet,
    pub oracle: Box<dyn Oracle>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem").field("model", &self.model).field("ground", &self.ground).finish()
    }
}

impl Problem {
    pub fn labels(&self) -> &[String] {
        self.ground.labels()
    }

    pub fn names(&self, s: Set) -> Vec<String> {
        self.ground.names(s).into_iter().map(str::to_string).collect()
    }
}

/// Subset key of the table model: labels sorted and comma-joined, `""` for ∅.
pub fn subset_key(ground: &GroundSet, s: Set) -> String {
    let mut names = ground.names(s);
    names.sort_unstable();
    names.join(",")
}

fn payload<'a, T>(p: &'a Option<T>, model: &str) -> Result<&'a T, CliError> {
    p.as_ref().ok_or_else(|| CliError::Input(format!("model `{model}` needs a `{model}` payload")))
}

fn per_user(ground: &GroundSet, map: &BTreeMap<String, Vec<String>>) -> Result<Vec<Vec<String>>, CliError> {
    for k in map.keys() {
        ground.index(k)?;
    }
    Ok(ground.labels().iter().map(|l| map.get(l).cloned().unwrap_or_default()).collect())
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<ProblemFile, CliError> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| CliError::Input(format!("problem file: {e}")))?;
        if file.schema != SCHEMA {
            return Err(CliError::Input(format!("unsupported schema {} (expected {SCHEMA})", file.schema)));
        }
        Ok(file)
    }

    pub fn load(&self) -> Result<Problem, CliError> {
        let ground = GroundSet::new(self.users.iter().cloned())?;
        let present = [
            (Model::Bits, self.bits.is_some()),
            (Model::Gf2, self.gf2.is_some()),
            (Model::Graph, self.graph.is_some()),
            (Model::Table, self.table.is_some()),
        ];
        if let Some((m, _)) = present.iter().find(|(m, p)| *p && *m != self.model) {
            return Err(CliError::Input(format!("payload for {m:?} given with model {:?}", self.model)));
        }
        let oracle: Box<dyn Oracle> = match self.model {
            Model::Bits => Box::new(BitAssignmentSource::new(&per_user(&ground, payload(&self.bits, "bits")?)?)?),
            Model::Gf2 => Box::new(MatrixSourceGF2::from_strings(&per_user(&ground, payload(&self.gf2, "gf2")?)?)?),
            Model::Graph => {
                let edges = payload(&self.graph, "graph")?
                    .edges
                    .iter()
                    .map(|(u, v, w)| {
                        if w.0.signum() <= 0 {
                            return Err(CliError::Input(format!("edge {u}-{v} has weight {} (must be > 0)", w.0)));
                        }
                        Ok((ground.index(u)?, ground.index(v)?, w.0))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                Box::new(WeightedGraphCut::new(ground.len(), edges)?)
            }
            Model::Table => Box::new(load_table(&ground, payload(&self.table, "table")?)?),
        };
        Ok(Problem { model: self.model, ground, oracle })
    }
}

fn load_table(ground: &GroundSet, table: &BTreeMap<String, Q>) -> Result<TableOracle, CliError> {
    let n = ground.len();
    if n > CHECK_LIMIT {
        return Err(psp_core::PspError::TooLarge { what: "table oracle", size: n, limit: CHECK_LIMIT }.into());
    }
    let mut values: Vec<Option<Rational>> = vec![None; 1 << n];
    values[0] = Some(Rational::ZERO);
    for (key, v) in table {
        let labels: Vec<&str> = if key.trim().is_empty() { vec![] } else { key.split(',').map(str::trim).collect() };
        let s = ground.set_of(&labels)?;
        if set::len(s) != labels.len() {
            return Err(CliError::Input(format!("table key `{key}` repeats a user")));
        }
        if s == 0 && !v.0.is_zero() {
            return Err(CliError::Input("table value on the empty set must be 0".into()));
        }
        values[s as usize] = Some(v.0);
    }
    let values: Vec<Rational> = values
        .into_iter()
        .enumerate()
        .map(|(s, v)| v.ok_or_else(|| CliError::Input(format!("table misses the subset `{}`", subset_key(ground, s as Set)))))
        .collect::<Result<_, _>>()?;
    match TableOracle::new(n, values) {
        Err(psp_core::PspError::NotSubmodular { x, y }) => Err(CliError::Input(format!(
            "table is not submodular: f({{{}}}) + f({{{}}}) < f({{{}}}) + f({{{}}})",
            subset_key(ground, x),
            subset_key(ground, y),
            subset_key(ground, x & y),
            subset_key(ground, x | y)
        ))),
        other => Ok(other?),
    }
}
