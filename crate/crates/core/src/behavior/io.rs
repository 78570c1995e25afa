//! JSON representation of behavior files.
//!
//! ```json
//! {
//!   "preparations": ["W"],
//!   "local_contexts": [{"name": "x0", "outcomes": ["0", "1"]}],
//!   "remote_contexts": [{"name": "y0", "outcomes": ["0", "1"]}],
//!   "table": [[[[[0.5, 0.0], [0.0, 0.5]]]]]
//! }
//! ```
//!
//! The table nests preparation → local context → remote context → local
//! outcome → remote outcome. A single-region behavior omits
//! `remote_contexts` and the two remote levels of the table.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Behavior, Context, JointBehavior, OutcomeSet};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextRepr {
    pub name: String,
    pub outcomes: Vec<String>,
}

impl From<&Context> for ContextRepr {
    fn from(c: &Context) -> Self {
        Self {
            name: c.name.clone(),
            outcomes: c.outcomes.labels().to_vec(),
        }
    }
}

impl TryFrom<ContextRepr> for Context {
    type Error = Error;

    fn try_from(c: ContextRepr) -> Result<Self> {
        Ok(Context::new(c.name, OutcomeSet::new(c.outcomes)?))
    }
}

fn contexts(reprs: Vec<ContextRepr>) -> Result<Vec<Context>> {
    reprs.into_iter().map(Context::try_from).collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BehaviorRepr {
    preparations: Vec<String>,
    local_contexts: Vec<ContextRepr>,
    table: Vec<Vec<Vec<f64>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JointRepr {
    preparations: Vec<String>,
    local_contexts: Vec<ContextRepr>,
    remote_contexts: Vec<ContextRepr>,
    table: Vec<Vec<Vec<Vec<Vec<f64>>>>>,
}

impl From<&Behavior> for BehaviorRepr {
    fn from(b: &Behavior) -> Self {
        let table = (0..b.preparations.len())
            .map(|w| (0..b.contexts.len()).map(|e| b.row(w, e).to_vec()).collect())
            .collect();
        Self {
            preparations: b.preparations.clone(),
            local_contexts: b.contexts.iter().map(Into::into).collect(),
            table,
        }
    }
}

impl From<&JointBehavior> for JointRepr {
    fn from(jb: &JointBehavior) -> Self {
        let table = (0..jb.preparations.len())
            .map(|w| {
                (0..jb.local.len())
                    .map(|e| {
                        (0..jb.remote.len())
                            .map(|d| {
                                jb.block(w, e, d)
                                    .chunks(jb.remote[d].len())
                                    .map(<[f64]>::to_vec)
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Self {
            preparations: jb.preparations.clone(),
            local_contexts: jb.local.iter().map(Into::into).collect(),
            remote_contexts: jb.remote.iter().map(Into::into).collect(),
            table,
        }
    }
}

impl Serialize for Behavior {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BehaviorRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Behavior {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BehaviorRepr::deserialize(d)?;
        contexts(r.local_contexts)
            .and_then(|c| Behavior::new(r.preparations, c, r.table))
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for JointBehavior {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        JointRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for JointBehavior {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = JointRepr::deserialize(d)?;
        let local = contexts(r.local_contexts).map_err(serde::de::Error::custom)?;
        let remote = contexts(r.remote_contexts).map_err(serde::de::Error::custom)?;
        JointBehavior::new(r.preparations, local, remote, r.table).map_err(serde::de::Error::custom)
    }
}

/// Either kind of behavior file, told apart by the presence of `remote_contexts`.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum BehaviorFile {
    Single(Behavior),
    Joint(JointBehavior),
}

impl BehaviorFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let joint = value.get("remote_contexts").is_some();
        Ok(if joint {
            BehaviorFile::Joint(serde_json::from_value(value)?)
        } else {
            BehaviorFile::Single(serde_json::from_value(value)?)
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("behaviors serialize")
    }
}
