//! Certificate entries: one recorded inequality each.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

/// A single checked relation `lhs (op) rhs`.
///
/// `margin` is oriented so that a nonnegative (or positive, for strict
/// relations) margin means the relation holds; `status` is recomputable from
/// `lhs`, `rhs` and `relation` alone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertEntry {
    pub id: String,
    pub graph: String,
    pub anchor: String,
    pub relation: Relation,
    pub params: BTreeMap<String, serde_json::Value>,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub margin: Option<f64>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<")]
    Less,
    #[serde(rename = "<=")]
    LessEq,
    #[serde(rename = ">=")]
    GreaterEq,
    #[serde(rename = ">")]
    Greater,
}

impl Relation {
    pub fn margin(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Relation::Less | Relation::LessEq => rhs - lhs,
            Relation::Greater | Relation::GreaterEq => lhs - rhs,
        }
    }

    pub fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Relation::Less => lhs < rhs,
            Relation::LessEq => lhs <= rhs,
            Relation::GreaterEq => lhs >= rhs,
            Relation::Greater => lhs > rhs,
        }
    }
}

impl CertEntry {
    /// Entry whose status follows from comparing `lhs` with `rhs`.
    pub fn compare(
        id: &str,
        graph: &str,
        anchor: &str,
        relation: Relation,
        lhs: f64,
        rhs: f64,
    ) -> Self {
        let ok = !lhs.is_nan() && !rhs.is_nan() && relation.holds(lhs, rhs);
        let margin = relation.margin(lhs, rhs);
        Self {
            id: id.to_string(),
            graph: graph.to_string(),
            anchor: anchor.to_string(),
            relation,
            params: BTreeMap::new(),
            lhs: finite(lhs),
            rhs: finite(rhs),
            margin: finite(margin),
            status: if ok { Status::Pass } else { Status::Fail },
            reason: None,
        }
    }

    pub fn inconclusive(id: &str, graph: &str, anchor: &str, relation: Relation, reason: &str) -> Self {
        Self {
            id: id.to_string(),
            graph: graph.to_string(),
            anchor: anchor.to_string(),
            relation,
            params: BTreeMap::new(),
            lhs: None,
            rhs: None,
            margin: None,
            status: Status::Inconclusive,
            reason: Some(reason.to_string()),
        }
    }

    pub fn with_param(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_reason(mut self, reason: impl Into<String>) -> Self {
        self.reason = Some(reason.into());
        self
    }

    /// Downgrades a computed result, keeping the numbers.
    pub fn mark_inconclusive(mut self, reason: impl Into<String>) -> Self {
        self.status = Status::Inconclusive;
        self.reason = Some(reason.into());
        self
    }

    pub fn force_fail(mut self, reason: impl Into<String>) -> Self {
        self.status = Status::Fail;
        self.reason = Some(reason.into());
        self
    }
}

/// Infinite values serialize as `null`.
fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}
