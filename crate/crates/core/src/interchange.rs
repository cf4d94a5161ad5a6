//! Graph interchange file (`quilts.graph/1`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::generate::{Stimulus, TreatmentSpec};
use crate::graph::{GraphError, LayeredGraph, Link, NodeId};

pub const GRAPH_FORMAT: &str = "quilts.graph/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub format: String,
    pub node_count: usize,
    pub layer_count: usize,
    /// Layer of each node id, 1-based.
    pub layer_of: Vec<usize>,
    pub links: Vec<Link>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<TreatmentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub destination: Option<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attempts: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub rejections: BTreeMap<String, usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum InterchangeError {
    #[error("unsupported graph format `{0}`")]
    Format(String),
    #[error("node_count {declared} does not match {actual} layer entries")]
    NodeCount { declared: usize, actual: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl GraphFile {
    pub fn from_graph(g: &LayeredGraph) -> Self {
        Self {
            format: GRAPH_FORMAT.to_string(),
            node_count: g.node_count(),
            layer_count: g.layer_count(),
            layer_of: g.layer_assignment().to_vec(),
            links: g.links().to_vec(),
            seed: None,
            spec: None,
            source: None,
            destination: None,
            attempts: None,
            rejections: BTreeMap::new(),
        }
    }

    pub fn from_stimulus(s: &Stimulus) -> Self {
        Self {
            seed: Some(s.seed),
            spec: Some(s.spec),
            source: Some(s.source),
            destination: Some(s.destination),
            attempts: Some(s.attempts),
            rejections: s.rejections.clone(),
            ..Self::from_graph(&s.graph)
        }
    }

    pub fn to_graph(&self) -> Result<LayeredGraph, InterchangeError> {
        if self.format != GRAPH_FORMAT {
            return Err(InterchangeError::Format(self.format.clone()));
        }
        if self.node_count != self.layer_of.len() {
            return Err(InterchangeError::NodeCount {
                declared: self.node_count,
                actual: self.layer_of.len(),
            });
        }
        Ok(LayeredGraph::new(self.layer_count, self.layer_of.clone(), self.links.clone())?)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("graph file serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, InterchangeError> {
        Ok(serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = LayeredGraph::new(2, vec![1, 2, 2], vec![Link::new(0, 1), Link::new(2, 0)]).unwrap();
        let f = GraphFile::from_graph(&g);
        let text = f.to_json();
        assert!(text.contains("\"layer_of\""));
        let back = GraphFile::from_json(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(back.to_graph().unwrap(), g);
    }

    #[test]
    fn rejects_bad_documents() {
        let mut f = GraphFile::from_graph(&LayeredGraph::new(2, vec![1, 2], vec![]).unwrap());
        f.node_count = 3;
        assert!(matches!(f.to_graph(), Err(InterchangeError::NodeCount { .. })));
        f.node_count = 2;
        f.links.push(Link::new(0, 0));
        assert!(matches!(f.to_graph(), Err(InterchangeError::Graph(_))));
        f.format = "other/9".into();
        assert!(matches!(f.to_graph(), Err(InterchangeError::Format(_))));
    }
}
