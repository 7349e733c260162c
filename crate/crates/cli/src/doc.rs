//! The JSON instance document and its conversions to core types.
//!
//! A document is a single object with a `ground` array naming the elements
//! plus the payload fields the invoked command needs (`diversity`,
//! `hypergraph`, `metric`, `points`, `capacities`, `demands`, `cut`,
//! `measure`, `family`, `tree`, `samples`), and optional `tolerance` and
//! `seed`. Commands check that exactly their payload fields are present.
//! Numbers round-trip bit-exactly through serde_json's shortest encoding.

use serde::{Deserialize, Serialize};

use divlab_core::diversity::{TabulatedDiversity, TabulatedMetric};
use divlab_core::flowcut::SubsetVector;
use divlab_core::ground::{GroundSet, Subset};
use divlab_core::splits::SplitSystem;
use divlab_core::zoo::{
    DiscreteRandomFamily, FiniteMeasureSpace, PhyloTree, PointCloud, WeightedGraph,
    WeightedHypergraph,
};

#[derive(Debug)]
pub enum DocError {
    /// Malformed document or missing/extra fields: exit code 2.
    Structure(String),
    /// Well-formed input that fails domain rules: exit code 1.
    Domain(String),
}

impl DocError {
    pub fn structure(msg: impl Into<String>) -> Self {
        DocError::Structure(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        DocError::Domain(msg.into())
    }
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct SubsetValue {
    pub subset: Vec<String>,
    pub value: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct EdgeDoc {
    pub members: Vec<String>,
    pub weight: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct HypergraphDoc {
    pub edges: Vec<EdgeDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct PointsDoc {
    pub dim: usize,
    pub coords: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct MeasureDoc {
    pub masses: Vec<f64>,
    /// One atom-index list per ground element.
    pub sets: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct OutcomeDoc {
    pub prob: f64,
    pub states: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct FamilyDoc {
    pub outcomes: Vec<OutcomeDoc>,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct TreeEdgeDoc {
    pub a: usize,
    pub b: usize,
    pub weight: f64,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct TreeDoc {
    pub nodes: usize,
    pub edges: Vec<TreeEdgeDoc>,
    /// Node index for each ground element.
    pub labels: Vec<usize>,
}

#[derive(Serialize, Deserialize, Clone, Debug, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub ground: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diversity: Option<Vec<SubsetValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypergraph: Option<HypergraphDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<PointsDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacities: Option<Vec<SubsetValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub demands: Option<Vec<SubsetValue>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cut: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InstanceDocument {
    pub fn parse(text: &str) -> Result<Self, DocError> {
        serde_json::from_str(text).map_err(|e| DocError::structure(format!("bad document: {e}")))
    }

    fn present_payload(&self) -> Vec<&'static str> {
        let mut p = Vec::new();
        if self.diversity.is_some() {
            p.push("diversity");
        }
        if self.metric.is_some() {
            p.push("metric");
        }
        if self.hypergraph.is_some() {
            p.push("hypergraph");
        }
        if self.points.is_some() {
            p.push("points");
        }
        if self.capacities.is_some() {
            p.push("capacities");
        }
        if self.demands.is_some() {
            p.push("demands");
        }
        if self.cut.is_some() {
            p.push("cut");
        }
        if self.measure.is_some() {
            p.push("measure");
        }
        if self.family.is_some() {
            p.push("family");
        }
        if self.tree.is_some() {
            p.push("tree");
        }
        if self.samples.is_some() {
            p.push("samples");
        }
        p
    }

    /// Enforce that exactly `required` payload fields are present
    /// (`tolerance` and `seed` are always allowed).
    pub fn expect_payload(&self, required: &[&str]) -> Result<(), DocError> {
        let present = self.present_payload();
        for r in required {
            if !present.contains(r) {
                return Err(DocError::structure(format!("missing required field {r:?}")));
            }
        }
        for p in present {
            if !required.contains(&p) {
                return Err(DocError::structure(format!(
                    "field {p:?} is not used by this command"
                )));
            }
        }
        Ok(())
    }

    pub fn ground_set(&self) -> Result<GroundSet, DocError> {
        GroundSet::new(self.ground.iter().map(String::as_str))
            .map_err(|e| DocError::structure(e.to_string()))
    }

    pub fn subset(&self, ground: &GroundSet, labels: &[String]) -> Result<Subset, DocError> {
        Subset::from_labels(ground, labels.iter().map(String::as_str))
            .map_err(|e| DocError::structure(e.to_string()))
    }

    pub fn tolerance_or(&self, fallback: f64) -> f64 {
        self.tolerance.unwrap_or(fallback)
    }

    /// The diversity table; entries for every subset of size ≥ 2 are
    /// required (smaller sets are pinned to zero and may be listed as 0).
    pub fn diversity_table(&self) -> Result<TabulatedDiversity, DocError> {
        let ground = self.ground_set()?;
        let entries = self
            .diversity
            .as_ref()
            .ok_or_else(|| DocError::structure("missing field \"diversity\""))?;
        let mut values = vec![f64::NAN; ground.table_len()];
        for e in entries {
            let s = self.subset(&ground, &e.subset)?;
            if !values[s.0 as usize].is_nan() {
                return Err(DocError::structure(format!(
                    "duplicate table entry for {}",
                    ground.render(s)
                )));
            }
            if s.len() <= 1 && e.value != 0.0 {
                return Err(DocError::domain(format!(
                    "entry for {} must be 0, got {}",
                    ground.render(s),
                    e.value
                )));
            }
            values[s.0 as usize] = e.value;
        }
        for s in ground.subsets() {
            if values[s.0 as usize].is_nan() {
                if s.len() <= 1 {
                    values[s.0 as usize] = 0.0;
                } else {
                    return Err(DocError::structure(format!(
                        "table is missing an entry for {}",
                        ground.render(s)
                    )));
                }
            }
        }
        TabulatedDiversity::new(ground, values).map_err(|e| DocError::structure(e.to_string()))
    }

    pub fn metric_table(&self, eps: f64) -> Result<TabulatedMetric, DocError> {
        let ground = self.ground_set()?;
        let rows = self
            .metric
            .as_ref()
            .ok_or_else(|| DocError::structure("missing field \"metric\""))?;
        if rows.len() != ground.len() * ground.len() {
            return Err(DocError::structure(format!(
                "metric must have {}² entries, got {}",
                ground.len(),
                rows.len()
            )));
        }
        TabulatedMetric::new(ground, rows.clone(), eps).map_err(|e| DocError::domain(e.to_string()))
    }

    pub fn hypergraph_value(&self) -> Result<WeightedHypergraph, DocError> {
        let ground = self.ground_set()?;
        let doc = self
            .hypergraph
            .as_ref()
            .ok_or_else(|| DocError::structure("missing field \"hypergraph\""))?;
        let mut edges = Vec::with_capacity(doc.edges.len());
        for e in &doc.edges {
            edges.push((self.subset(&ground, &e.members)?, e.weight));
        }
        WeightedHypergraph::new(ground, edges).map_err(|e| DocError::domain(e.to_string()))
    }

    pub fn graph_value(&self) -> Result<WeightedGraph, DocError> {
        let h = self.hypergraph_value()?;
        WeightedGraph::new(h.ground().clone(), h.edges().to_vec())
            .map_err(|e| DocError::domain(e.to_string()))
    }

    pub fn points_value(&self) -> Result<PointCloud, DocError> {
        let ground = self.ground_set()?;
        let doc = self
            .points
            .as_ref()
            .ok_or_else(|| DocError::structure("missing field \"points\""))?;
        if doc.coords.iter().any(|c| c.len() != doc.dim) {
            return Err(DocError::structure("coords do not match the declared dim"));
        }
        PointCloud::new(ground, doc.coords.clone()).map_err(|e| DocError::domain(e.to_string()))
    }

    pub fn subset_vector(
        &self,
        entries: &Option<Vec<SubsetValue>>,
        name: &str,
    ) -> Result<SubsetVector, DocError> {
        let ground = self.ground_set()?;
        let entries = entries
            .as_ref()
            .ok_or_else(|| DocError::structure(format!("missing field {name:?}")))?;
        let mut v = SubsetVector::zero(ground.clone());
        for e in entries {
            if !(e.value.is_finite() && e.value >= 0.0) {
                return Err(DocError::domain(format!("{name} entries must be nonnegative")));
            }
            v.add(self.subset(&ground, &e.subset)?, e.value);
        }
        Ok(v)
    }

    pub fn cut_side(&self) -> Result<(GroundSet, Subset), DocError> {
        let ground = self.ground_set()?;
        let labels = self
            .cut
            .as_ref()
            .ok_or_else(|| DocError::structure("missing field \"cut\""))?;
        let side = self.subset(&ground, labels)?;
        Ok((ground, side))
    }

    pub fn measure_value(&self) -> Result<(FiniteMeasureSpace, Vec<u64>, GroundSet), DocError> {
        let ground = self.ground_set()?;
        let doc = self
            .measure
            .as_ref()
            .ok_or_else(|| DocError::structure("missing field \"measure\""))?;
        let space =
            FiniteMeasureSpace::new(doc.masses.clone()).map_err(|e| DocError::domain(e.to_string()))?;
        if doc.sets.len() != ground.len() {
            return Err(DocError::structure("one atom set per ground element required"));
        }
        let mut sets = Vec::with_capacity(doc.sets.len());
        for atoms in &doc.sets {
            let mut mask = 0u64;
            for &a in atoms {
                if a >= doc.masses.len() {
                    return Err(DocError::structure(format!("atom index {a} out of range")));
                }
                mask |= 1 << a;
            }
            sets.push(mask);
        }
        Ok((space, sets, ground))
    }

    pub fn family_value(&self, eps: f64) -> Result<(DiscreteRandomFamily, GroundSet), DocError> {
        let ground = self.ground_set()?;
        let doc = self
            .family
            .as_ref()
            .ok_or_else(|| DocError::structure("missing field \"family\""))?;
        // Map state labels to dense ids.
        let mut names: Vec<&str> = Vec::new();
        let mut outcomes = Vec::with_capacity(doc.outcomes.len());
        for o in &doc.outcomes {
            let ids = o
                .states
                .iter()
                .map(|s| {
                    names.iter().position(|n| n == s).unwrap_or_else(|| {
                        names.push(s);
                        names.len() - 1
                    }) as u32
                })
                .collect();
            outcomes.push((o.prob, ids));
        }
        let fam = DiscreteRandomFamily::new(ground.len(), outcomes, eps)
            .map_err(|e| DocError::domain(e.to_string()))?;
        Ok((fam, ground))
    }

    pub fn tree_value(&self) -> Result<PhyloTree, DocError> {
        let ground = self.ground_set()?;
        let doc = self
            .tree
            .as_ref()
            .ok_or_else(|| DocError::structure("missing field \"tree\""))?;
        PhyloTree::new(
            ground,
            doc.nodes,
            doc.edges.iter().map(|e| (e.a, e.b, e.weight)).collect(),
            doc.labels.clone(),
        )
        .map_err(|e| DocError::domain(e.to_string()))
    }
}

/// Render a full table back into document entries, every subset included.
pub fn table_entries(t: &TabulatedDiversity) -> Vec<SubsetValue> {
    t.ground()
        .subsets()
        .map(|s| SubsetValue {
            subset: s.iter().map(|i| t.ground().label(i).to_string()).collect(),
            value: t.get(s),
        })
        .collect()
}

pub fn subset_labels(ground: &GroundSet, s: Subset) -> Vec<String> {
    s.iter().map(|i| ground.label(i).to_string()).collect()
}

pub fn vector_entries(v: &SubsetVector) -> Vec<SubsetValue> {
    v.iter()
        .map(|(s, value)| SubsetValue { subset: subset_labels(v.ground(), s), value })
        .collect()
}

pub fn split_entries(sys: &SplitSystem) -> Vec<SubsetValue> {
    sys.iter()
        .map(|(side, weight)| SubsetValue {
            subset: subset_labels(sys.ground(), side),
            value: weight,
        })
        .collect()
}
