//! Weighted hypergraphs, their multi-hypergraph expansion, and the instance
//! document format.
//!
//! A [`WeightedHypergraph`] lives in ambient dimension `d` (projective
//! dimension `d - 1`). Every hyperedge `e_k` carries a weight `m_k`, the number
//! of pins spanning its pinning subspace. Expanding the hypergraph replaces
//! `e_k` with `m_k * (d - |e_k|)` multi-edges, one per scalar incidence
//! equation.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Chart coordinates of a point in projective `(d - 1)`-space.
pub type Point = Vec<f64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HypergraphError {
    #[error("ambient dimension must be at least 2, got {0}")]
    Dimension(usize),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("hyperedge {edge} references unknown vertex `{vertex}`")]
    UnknownVertex { edge: usize, vertex: String },
    #[error("hyperedge {edge} references vertex index {index} but there are {count} vertices")]
    VertexIndex {
        edge: usize,
        index: usize,
        count: usize,
    },
    #[error("hyperedge {0} is empty")]
    EmptyHyperedge(usize),
    #[error("hyperedge {0} lists a vertex more than once")]
    RepeatedVertex(usize),
    #[error("hyperedge {edge} has {size} vertices; rank bound requires fewer than d = {d}")]
    RankBound { edge: usize, size: usize, d: usize },
    #[error("hyperedge {0} has weight 0")]
    ZeroWeight(usize),
    #[error("hyperedge {edge} has weight {weight} exceeding its size {size}")]
    WeightExceedsSize {
        edge: usize,
        weight: usize,
        size: usize,
    },
    #[error("hyperedges {first} and {second} share the same vertex set")]
    DuplicateHyperedge { first: usize, second: usize },
}

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("malformed instance document: {0}")]
    Schema(#[from] serde_json::Error),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error("hyperedge {edge} declares weight {weight} but lists {found} pins")]
    PinCount {
        edge: usize,
        weight: usize,
        found: usize,
    },
    #[error("pin {pin} of hyperedge {edge} has {found} coordinates, expected d - 1 = {expected}")]
    PinDimension {
        edge: usize,
        pin: usize,
        expected: usize,
        found: usize,
    },
    #[error("pin {pin} of hyperedge {edge} has a non-finite coordinate")]
    NonFinitePin { edge: usize, pin: usize },
    #[error("pins are given for some hyperedges but not for hyperedge {0}")]
    PartialPins(usize),
    #[error("instance has no pins")]
    MissingPins,
}

/// A hyperedge: sorted vertex indices plus its weight `m_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hyperedge {
    pub vertices: Vec<usize>,
    pub weight: usize,
}

impl Hyperedge {
    pub fn new(mut vertices: Vec<usize>, weight: usize) -> Self {
        vertices.sort_unstable();
        Self { vertices, weight }
    }

    pub fn size(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }
}

/// `H = (V, E, m)` in ambient dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHypergraph {
    dim: usize,
    names: Vec<String>,
    edges: Vec<Hyperedge>,
}

impl WeightedHypergraph {
    /// Builds and validates a hypergraph. Vertex names default to `v0, v1, ...`
    /// when `names` is `None`.
    pub fn new(
        dim: usize,
        num_vertices: usize,
        edges: Vec<Hyperedge>,
        names: Option<Vec<String>>,
    ) -> Result<Self, HypergraphError> {
        if dim < 2 {
            return Err(HypergraphError::Dimension(dim));
        }
        let names = names.unwrap_or_else(|| (0..num_vertices).map(|i| format!("v{i}")).collect());
        let mut seen_names = BTreeSet::new();
        for n in &names {
            if !seen_names.insert(n.as_str()) {
                return Err(HypergraphError::DuplicateVertex(n.clone()));
            }
        }
        let mut edges = edges;
        for e in &mut edges {
            e.vertices.sort_unstable();
        }
        let mut seen_sets: HashMap<&[usize], usize> = HashMap::new();
        for (k, e) in edges.iter().enumerate() {
            if e.vertices.is_empty() {
                return Err(HypergraphError::EmptyHyperedge(k));
            }
            if let Some(&index) = e.vertices.iter().find(|&&v| v >= names.len()) {
                return Err(HypergraphError::VertexIndex {
                    edge: k,
                    index,
                    count: names.len(),
                });
            }
            if e.vertices.windows(2).any(|w| w[0] == w[1]) {
                return Err(HypergraphError::RepeatedVertex(k));
            }
            if e.size() >= dim {
                return Err(HypergraphError::RankBound {
                    edge: k,
                    size: e.size(),
                    d: dim,
                });
            }
            if e.weight == 0 {
                return Err(HypergraphError::ZeroWeight(k));
            }
            if e.weight > e.size() {
                return Err(HypergraphError::WeightExceedsSize {
                    edge: k,
                    weight: e.weight,
                    size: e.size(),
                });
            }
            if let Some(&first) = seen_sets.get(e.vertices.as_slice()) {
                return Err(HypergraphError::DuplicateHyperedge { first, second: k });
            }
            seen_sets.insert(&e.vertices, k);
        }
        Ok(Self { dim, names, edges })
    }

    /// Convenience constructor with all weights equal to one.
    pub fn unit_weights(
        dim: usize,
        num_vertices: usize,
        edges: &[&[usize]],
    ) -> Result<Self, HypergraphError> {
        let edges = edges
            .iter()
            .map(|e| Hyperedge::new(e.to_vec(), 1))
            .collect();
        Self::new(dim, num_vertices, edges, None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    /// Number of multi-edges `m_k (d - |e_k|)` for hyperedge `k`.
    pub fn copies(&self, k: usize) -> usize {
        let e = &self.edges[k];
        e.weight * (self.dim - e.size())
    }

    pub fn total_copies(&self) -> usize {
        (0..self.edges.len()).map(|k| self.copies(k)).sum()
    }

    /// Degrees of freedom `(d - 1) |V|`.
    pub fn freedom(&self) -> usize {
        (self.dim - 1) * self.num_vertices()
    }

    pub fn total_pins(&self) -> usize {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Expands every hyperedge into its labelled copies, ordered by `k` and then
    /// by copy ordinal.
    pub fn expand(&self) -> MultiHypergraph {
        let mut edges = Vec::with_capacity(self.total_copies());
        for (k, e) in self.edges.iter().enumerate() {
            for ordinal in 0..self.copies(k) {
                edges.push(MultiEdge {
                    parent: k,
                    ordinal,
                    vertices: e.vertices.clone(),
                });
            }
        }
        MultiHypergraph {
            num_vertices: self.num_vertices(),
            edges,
        }
    }

    /// The subgraph induced by `vs`: vertices renumbered in ascending original
    /// order, hyperedges kept iff fully contained in `vs`, weights preserved.
    pub fn induced_subgraph(&self, vs: &BTreeSet<usize>) -> InducedSubgraph {
        let vertex_map: Vec<usize> = vs.iter().copied().collect();
        let mut local = HashMap::with_capacity(vertex_map.len());
        for (i, &v) in vertex_map.iter().enumerate() {
            local.insert(v, i);
        }
        let mut edges = Vec::new();
        let mut edge_map = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            if e.vertices.iter().all(|v| vs.contains(v)) {
                edges.push(Hyperedge::new(
                    e.vertices.iter().map(|v| local[v]).collect(),
                    e.weight,
                ));
                edge_map.push(k);
            }
        }
        let names = vertex_map.iter().map(|&v| self.names[v].clone()).collect();
        let hypergraph = Self {
            dim: self.dim,
            names,
            edges,
        };
        InducedSubgraph {
            hypergraph,
            vertex_map,
            edge_map,
        }
    }

    /// Same hypergraph with the weights replaced; hyperedges whose new weight
    /// is zero are dropped.
    pub fn reweighted(&self, weights: &[usize]) -> (Self, Vec<usize>) {
        assert_eq!(weights.len(), self.edges.len());
        let mut edges = Vec::new();
        let mut edge_map = Vec::new();
        for (k, (e, &w)) in self.edges.iter().zip(weights).enumerate() {
            if w > 0 {
                edges.push(Hyperedge {
                    vertices: e.vertices.clone(),
                    weight: w.min(e.size()),
                });
                edge_map.push(k);
            }
        }
        (
            Self {
                dim: self.dim,
                names: self.names.clone(),
                edges,
            },
            edge_map,
        )
    }

    /// Vertex sets of the connected components, counting only hyperedges.
    pub fn components(&self) -> Vec<BTreeSet<usize>> {
        let n = self.num_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut c = x;
            while p[c] != r {
                let next = p[c];
                p[c] = r;
                c = next;
            }
            r
        }
        for e in &self.edges {
            let a = find(&mut parent, e.vertices[0]);
            for &v in &e.vertices[1..] {
                let b = find(&mut parent, v);
                if a != b {
                    parent[b] = a;
                }
            }
        }
        let mut groups: Vec<BTreeSet<usize>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            let i = *slot.entry(r).or_insert_with(|| {
                groups.push(BTreeSet::new());
                groups.len() - 1
            });
            groups[i].insert(v);
        }
        groups
    }
}

/// Result of [`WeightedHypergraph::induced_subgraph`] with index maps back to
/// the parent.
#[derive(Debug, Clone)]
pub struct InducedSubgraph {
    pub hypergraph: WeightedHypergraph,
    /// local vertex index -> parent vertex index
    pub vertex_map: Vec<usize>,
    /// local hyperedge index -> parent hyperedge index
    pub edge_map: Vec<usize>,
}

/// One copy `e^k` in the expansion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiEdge {
    pub parent: usize,
    pub ordinal: usize,
    pub vertices: Vec<usize>,
}

/// Expanded multi-hypergraph `Ĥ = (V, Ê)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiHypergraph {
    pub num_vertices: usize,
    pub edges: Vec<MultiEdge>,
}

impl MultiHypergraph {
    pub fn new(num_vertices: usize) -> Self {
        Self {
            num_vertices,
            edges: Vec::new(),
        }
    }

    /// Appends a copy of hyperedge `parent` spanning `vertices`.
    pub fn push(&mut self, parent: usize, vertices: Vec<usize>) {
        let ordinal = self.edges.iter().filter(|e| e.parent == parent).count();
        let mut vertices = vertices;
        vertices.sort_unstable();
        self.edges.push(MultiEdge {
            parent,
            ordinal,
            vertices,
        });
    }

    /// Removes the last copy of `parent`, if any.
    pub fn remove_copy(&mut self, parent: usize) -> Option<MultiEdge> {
        let pos = self.edges.iter().rposition(|e| e.parent == parent)?;
        Some(self.edges.remove(pos))
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn copies_of(&self, parent: usize) -> usize {
        self.edges.iter().filter(|e| e.parent == parent).count()
    }

    /// Sub-multi-hypergraph induced by `vs`, vertices renumbered ascending.
    pub fn induced(&self, vs: &BTreeSet<usize>) -> (MultiHypergraph, Vec<usize>) {
        let vertex_map: Vec<usize> = vs.iter().copied().collect();
        let local: HashMap<usize, usize> = vertex_map
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let edges = self
            .edges
            .iter()
            .filter(|e| e.vertices.iter().all(|v| vs.contains(v)))
            .map(|e| MultiEdge {
                parent: e.parent,
                ordinal: e.ordinal,
                vertices: e.vertices.iter().map(|v| local[v]).collect(),
            })
            .collect();
        (
            MultiHypergraph {
                num_vertices: vertex_map.len(),
                edges,
            },
            vertex_map,
        )
    }
}

/// A hypergraph with (optionally) its pins, as read from an instance document.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub hypergraph: WeightedHypergraph,
    /// `pins[k][l]` is pin `x^k_l` in chart coordinates; `None` when the
    /// document carried no pins.
    pub pins: Option<Vec<Vec<Point>>>,
}

/// A hypergraph together with all of its pins.
#[derive(Debug, Clone, PartialEq)]
pub struct PinnedInstance {
    pub hypergraph: WeightedHypergraph,
    pub pins: Vec<Vec<Point>>,
}

impl PinnedInstance {
    pub fn new(
        hypergraph: WeightedHypergraph,
        pins: Vec<Vec<Point>>,
    ) -> Result<Self, InstanceError> {
        check_pins(&hypergraph, &pins)?;
        Ok(Self { hypergraph, pins })
    }

    pub fn dim(&self) -> usize {
        self.hypergraph.dim()
    }

    /// Restriction to an induced subgraph; pins follow their hyperedges.
    pub fn induced(&self, vs: &BTreeSet<usize>) -> (PinnedInstance, InducedSubgraph) {
        let sub = self.hypergraph.induced_subgraph(vs);
        let pins = sub.edge_map.iter().map(|&k| self.pins[k].clone()).collect();
        (
            PinnedInstance {
                hypergraph: sub.hypergraph.clone(),
                pins,
            },
            sub,
        )
    }
}

impl From<PinnedInstance> for Instance {
    fn from(p: PinnedInstance) -> Self {
        Instance {
            hypergraph: p.hypergraph,
            pins: Some(p.pins),
        }
    }
}

impl Instance {
    pub fn pinned(&self) -> Result<PinnedInstance, InstanceError> {
        match &self.pins {
            Some(p) => PinnedInstance::new(self.hypergraph.clone(), p.clone()),
            None => Err(InstanceError::MissingPins),
        }
    }
}

fn check_pins(h: &WeightedHypergraph, pins: &[Vec<Point>]) -> Result<(), InstanceError> {
    let expected = h.dim() - 1;
    for (k, e) in h.edges().iter().enumerate() {
        let found = pins.get(k).map_or(0, Vec::len);
        if found != e.weight {
            return Err(InstanceError::PinCount {
                edge: k,
                weight: e.weight,
                found,
            });
        }
        for (l, x) in pins[k].iter().enumerate() {
            if x.len() != expected {
                return Err(InstanceError::PinDimension {
                    edge: k,
                    pin: l,
                    expected,
                    found: x.len(),
                });
            }
            if x.iter().any(|c| !c.is_finite()) {
                return Err(InstanceError::NonFinitePin { edge: k, pin: l });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    d: usize,
    vertices: Vec<String>,
    hyperedges: Vec<HyperedgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HyperedgeDoc {
    vertices: Vec<String>,
    weight: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pins: Option<Vec<Vec<f64>>>,
}

/// Parses an instance document:
/// `{"d": int, "vertices": [id...], "hyperedges": [{"vertices": [id...], "weight": int, "pins": [[f64; d-1]...]}]}`.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    let mut index = HashMap::new();
    for (i, name) in doc.vertices.iter().enumerate() {
        if index.insert(name.as_str(), i).is_some() {
            return Err(HypergraphError::DuplicateVertex(name.clone()).into());
        }
    }
    let mut edges = Vec::with_capacity(doc.hyperedges.len());
    for (k, he) in doc.hyperedges.iter().enumerate() {
        let mut vs = Vec::with_capacity(he.vertices.len());
        for name in &he.vertices {
            let &i = index
                .get(name.as_str())
                .ok_or_else(|| HypergraphError::UnknownVertex {
                    edge: k,
                    vertex: name.clone(),
                })?;
            vs.push(i);
        }
        edges.push(Hyperedge::new(vs, he.weight));
    }
    let hypergraph = WeightedHypergraph::new(doc.d, doc.vertices.len(), edges, Some(doc.vertices))?;

    let with_pins = doc.hyperedges.iter().filter(|h| h.pins.is_some()).count();
    let pins = if with_pins == 0 {
        None
    } else {
        if let Some(k) = doc.hyperedges.iter().position(|h| h.pins.is_none()) {
            return Err(InstanceError::PartialPins(k));
        }
        let pins: Vec<Vec<Point>> = doc
            .hyperedges
            .into_iter()
            .map(|h| h.pins.unwrap_or_default())
            .collect();
        check_pins(&hypergraph, &pins)?;
        Some(pins)
    };
    Ok(Instance { hypergraph, pins })
}

/// Inverse of [`parse_instance`]; pretty-printed JSON.
pub fn serialize_instance(inst: &Instance) -> String {
    let h = &inst.hypergraph;
    let doc = InstanceDoc {
        d: h.dim(),
        vertices: h.names().to_vec(),
        hyperedges: h
            .edges()
            .iter()
            .enumerate()
            .map(|(k, e)| HyperedgeDoc {
                vertices: e.vertices.iter().map(|&v| h.names()[v].clone()).collect(),
                weight: e.weight,
                pins: inst.pins.as_ref().map(|p| p[k].clone()),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("instance document serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    use crate::fixtures::quad_d3;

    #[test]
    fn quad_d3_copy_counts() {
        let h = quad_d3();
        let mh = h.expand();
        let counts: Vec<usize> = (0..5).map(|k| mh.copies_of(k)).collect();
        assert_eq!(counts, vec![2, 2, 1, 1, 2]);
        assert_eq!(mh.len(), 8);
        // ordering by k then ordinal
        let order: Vec<(usize, usize)> = mh.edges.iter().map(|e| (e.parent, e.ordinal)).collect();
        assert_eq!(
            order,
            vec![
                (0, 0),
                (0, 1),
                (1, 0),
                (1, 1),
                (2, 0),
                (3, 0),
                (4, 0),
                (4, 1)
            ]
        );
    }

    #[test]
    fn expansion_counts_small_cases() {
        let h = WeightedHypergraph::new(4, 2, vec![Hyperedge::new(vec![0, 1], 2)], None).unwrap();
        assert_eq!(h.expand().len(), 4);
        let h = WeightedHypergraph::unit_weights(3, 1, &[&[0]]).unwrap();
        assert_eq!(h.expand().len(), 2);
    }

    #[test]
    fn rank_bound_rejected() {
        let err = WeightedHypergraph::unit_weights(3, 3, &[&[0, 1, 2]]).unwrap_err();
        assert!(matches!(
            err,
            HypergraphError::RankBound { size: 3, d: 3, .. }
        ));
    }

    #[test]
    fn weight_rules() {
        let err =
            WeightedHypergraph::new(4, 2, vec![Hyperedge::new(vec![0, 1], 3)], None).unwrap_err();
        assert!(matches!(
            err,
            HypergraphError::WeightExceedsSize {
                weight: 3,
                size: 2,
                ..
            }
        ));
        let err =
            WeightedHypergraph::new(4, 2, vec![Hyperedge::new(vec![0, 1], 0)], None).unwrap_err();
        assert_eq!(err, HypergraphError::ZeroWeight(0));
    }

    #[test]
    fn duplicate_vertex_sets_rejected() {
        let err = WeightedHypergraph::unit_weights(3, 2, &[&[0, 1], &[1, 0]]).unwrap_err();
        assert_eq!(
            err,
            HypergraphError::DuplicateHyperedge {
                first: 0,
                second: 1
            }
        );
    }

    #[test]
    fn induced_subgraph_filters_edges() {
        let h = quad_d3();
        let sub = h.induced_subgraph(&BTreeSet::from([0, 2]));
        assert_eq!(sub.edge_map, vec![0, 2]);
        assert_eq!(
            sub.hypergraph.names(),
            &["v1".to_string(), "v3".to_string()]
        );
        assert_eq!(sub.hypergraph.edges()[1].vertices, vec![0, 1]);

        let empty = h.induced_subgraph(&BTreeSet::new());
        assert_eq!(empty.hypergraph.num_vertices(), 0);
        assert!(empty.hypergraph.edges().is_empty());

        let all = h.induced_subgraph(&(0..4).collect());
        assert_eq!(all.hypergraph, h);
    }

    #[test]
    fn components_of_quad_d3() {
        let h = quad_d3();
        assert_eq!(h.components().len(), 1);
        let h = WeightedHypergraph::unit_weights(3, 3, &[&[0], &[1, 2]]).unwrap();
        assert_eq!(
            h.components(),
            vec![BTreeSet::from([0]), BTreeSet::from([1, 2])]
        );
    }

    #[test]
    fn minimal_document_parses() {
        let text = r#"{"d": 3, "vertices": ["a"], "hyperedges": [{"vertices": ["a"], "weight": 1, "pins": [[0.5, -1.0]]}]}"#;
        let inst = parse_instance(text).unwrap();
        let pinned = inst.pinned().unwrap();
        assert_eq!(pinned.pins, vec![vec![vec![0.5, -1.0]]]);
    }

    #[test]
    fn pin_count_mismatch_is_reported() {
        let text = r#"{"d": 4, "vertices": ["a", "b"], "hyperedges": [
            {"vertices": ["a", "b"], "weight": 2, "pins": [[0,0,0],[1,1,1],[2,2,2]]}]}"#;
        let err = parse_instance(text).unwrap_err();
        assert!(matches!(
            err,
            InstanceError::PinCount {
                edge: 0,
                weight: 2,
                found: 3
            }
        ));
    }

    #[test]
    fn distinct_diagnostics() {
        let dim = r#"{"d": 3, "vertices": ["a"], "hyperedges": [{"vertices": ["a"], "weight": 1, "pins": [[0.5]]}]}"#;
        assert!(matches!(
            parse_instance(dim).unwrap_err(),
            InstanceError::PinDimension { .. }
        ));
        let schema = r#"{"d": 3, "vertices": ["a"]}"#;
        assert!(matches!(
            parse_instance(schema).unwrap_err(),
            InstanceError::Schema(_)
        ));
        let unknown =
            r#"{"d": 3, "vertices": ["a"], "hyperedges": [{"vertices": ["b"], "weight": 1}]}"#;
        assert!(matches!(
            parse_instance(unknown).unwrap_err(),
            InstanceError::Hypergraph(HypergraphError::UnknownVertex { .. })
        ));
        let partial = r#"{"d": 3, "vertices": ["a", "b"], "hyperedges": [
            {"vertices": ["a"], "weight": 1, "pins": [[0, 0]]}, {"vertices": ["b"], "weight": 1}]}"#;
        assert!(matches!(
            parse_instance(partial).unwrap_err(),
            InstanceError::PartialPins(1)
        ));
    }

    #[test]
    fn quad_d3_round_trip() {
        let pins = vec![
            vec![vec![0.1, 0.2]],
            vec![vec![0.3, 0.4]],
            vec![vec![0.5, 0.6]],
            vec![vec![0.7, 0.8]],
            vec![vec![0.9, 1.0], vec![-1.5, 2.25]],
        ];
        let inst: Instance = PinnedInstance::new(quad_d3(), pins).unwrap().into();
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(serialize_instance(&back), text);
    }
}
