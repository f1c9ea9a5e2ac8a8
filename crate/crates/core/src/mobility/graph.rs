use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netsim::Position;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate junction id {0:?}")]
    DuplicateJunction(String),
    #[error("duplicate edge id {0:?}")]
    DuplicateEdge(String),
    #[error("edge {edge:?} references unknown junction {junction:?}")]
    UnknownJunction { edge: String, junction: String },
    #[error("edge {0:?}: {1}")]
    BadEdge(String, &'static str),
    #[error("unknown edge {0:?}")]
    UnknownEdge(String),
    #[error("no path from {from:?} to {to:?}")]
    Unreachable { from: String, to: String },
    #[error("network file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("network file: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length: f64,
    pub speed_limit: f64,
    pub lanes: u32,
}

impl Edge {
    pub fn free_flow_time(&self) -> f64 {
        self.length / self.speed_limit
    }
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    junctions: Vec<Junction>,
    edges: Vec<Edge>,
}

/// Directed road network. Edges are kept sorted by id, so an edge index
/// order is also the lexicographic id order.
#[derive(Debug, Clone)]
pub struct RoadGraph {
    junctions: Vec<Junction>,
    edges: Vec<Edge>,
    junction_index: BTreeMap<String, usize>,
    edge_index: BTreeMap<String, usize>,
    from_junction: Vec<usize>,
    to_junction: Vec<usize>,
    out_edges: Vec<Vec<usize>>,
}

impl RoadGraph {
    pub fn new(mut junctions: Vec<Junction>, mut edges: Vec<Edge>) -> Result<Self, GraphError> {
        junctions.sort_by(|a, b| a.id.cmp(&b.id));
        edges.sort_by(|a, b| a.id.cmp(&b.id));
        let mut junction_index = BTreeMap::new();
        for (i, j) in junctions.iter().enumerate() {
            if junction_index.insert(j.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateJunction(j.id.clone()));
            }
        }
        let mut edge_index = BTreeMap::new();
        let mut from_junction = Vec::with_capacity(edges.len());
        let mut to_junction = Vec::with_capacity(edges.len());
        let mut out_edges = vec![Vec::new(); junctions.len()];
        for (i, e) in edges.iter().enumerate() {
            if edge_index.insert(e.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateEdge(e.id.clone()));
            }
            let lookup = |j: &str| {
                junction_index.get(j).copied().ok_or_else(|| GraphError::UnknownJunction {
                    edge: e.id.clone(),
                    junction: j.to_string(),
                })
            };
            let (f, t) = (lookup(&e.from)?, lookup(&e.to)?);
            if !(e.length > 0.0) {
                return Err(GraphError::BadEdge(e.id.clone(), "length must be > 0"));
            }
            if !(e.speed_limit > 0.0) {
                return Err(GraphError::BadEdge(e.id.clone(), "speed_limit must be > 0"));
            }
            if e.lanes == 0 {
                return Err(GraphError::BadEdge(e.id.clone(), "lanes must be >= 1"));
            }
            from_junction.push(f);
            to_junction.push(t);
            out_edges[f].push(i);
        }
        Ok(Self {
            junctions,
            edges,
            junction_index,
            edge_index,
            from_junction,
            to_junction,
            out_edges,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let f: NetworkFile = serde_json::from_str(text)?;
        Self::new(f.junctions, f.edges)
    }

    pub fn load(path: &Path) -> Result<Self, GraphError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let f = NetworkFile {
            junctions: self.junctions.clone(),
            edges: self.edges.clone(),
        };
        serde_json::to_string_pretty(&f).expect("network serialises")
    }

    pub fn junctions(&self) -> &[Junction] {
        &self.junctions
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn edge_idx(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    pub fn junction_idx(&self, id: &str) -> Option<usize> {
        self.junction_index.get(id).copied()
    }

    pub fn edge_from(&self, idx: usize) -> usize {
        self.from_junction[idx]
    }

    pub fn edge_to(&self, idx: usize) -> usize {
        self.to_junction[idx]
    }

    /// Outgoing edges of a junction, in id order.
    pub fn out_edges(&self, junction: usize) -> &[usize] {
        &self.out_edges[junction]
    }

    pub fn junction_pos(&self, idx: usize) -> Position {
        let j = &self.junctions[idx];
        Position::new(j.x, j.y)
    }

    /// Point at `offset` metres along an edge.
    pub fn point_on_edge(&self, edge: usize, offset: f64) -> Position {
        let a = self.junction_pos(self.from_junction[edge]);
        let b = self.junction_pos(self.to_junction[edge]);
        let f = (offset / self.edges[edge].length).clamp(0.0, 1.0);
        Position::new(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f)
    }

    /// Shortest distance from `p` to the straight segment of an edge.
    pub fn distance_to_edge(&self, edge: usize, p: &Position) -> f64 {
        let a = self.junction_pos(self.from_junction[edge]);
        let b = self.junction_pos(self.to_junction[edge]);
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let len2 = dx * dx + dy * dy;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2).clamp(0.0, 1.0)
        };
        Position::new(a.x + dx * t, a.y + dy * t).distance(p)
    }

    /// Bounding box `(min_x, min_y, max_x, max_y)` of all junctions.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for j in &self.junctions {
            b.0 = b.0.min(j.x);
            b.1 = b.1.min(j.y);
            b.2 = b.2.max(j.x);
            b.3 = b.3.max(j.y);
        }
        b
    }

    /// Bounding-box area in km².
    pub fn area_km2(&self) -> f64 {
        if self.junctions.is_empty() {
            return 0.0;
        }
        let (x0, y0, x1, y1) = self.bounds();
        (x1 - x0) * (y1 - y0) / 1e6
    }

    fn is_u_turn(&self, a: usize, b: usize) -> bool {
        self.from_junction[a] == self.to_junction[b] && self.to_junction[a] == self.from_junction[b]
    }

    /// Edges that may follow `edge` on a route. Immediate reversal onto the
    /// opposite edge is not allowed.
    pub fn successors(&self, edge: usize) -> impl Iterator<Item = usize> + '_ {
        self.out_edges[self.to_junction[edge]]
            .iter()
            .copied()
            .filter(move |&n| !self.is_u_turn(edge, n))
    }

    /// Minimum-weight route that starts with `from_edge` and ends with
    /// `to_edge`. The cost includes both end edges. Equal costs are broken by
    /// comparing routes edge by edge on their ids.
    pub fn shortest_path<W: Fn(&Edge) -> f64>(
        &self,
        from_edge: &str,
        to_edge: &str,
        weight: W,
    ) -> Result<(Vec<String>, f64), GraphError> {
        let f = self.edge_idx(from_edge).ok_or_else(|| GraphError::UnknownEdge(from_edge.into()))?;
        let t = self.edge_idx(to_edge).ok_or_else(|| GraphError::UnknownEdge(to_edge.into()))?;
        let w0 = weight(&self.edges[f]);
        self.dijkstra(vec![(w0, vec![f])], |e| e == t, &weight)
            .map(|(p, c)| (self.ids(&p), c))
            .ok_or_else(|| GraphError::Unreachable {
                from: from_edge.into(),
                to: to_edge.into(),
            })
    }

    /// Minimum-weight route between two junctions, as edge indices.
    pub fn route_between<W: Fn(&Edge) -> f64>(
        &self,
        from_junction: usize,
        to_junction: usize,
        weight: W,
    ) -> Option<(Vec<usize>, f64)> {
        let starts = self.out_edges[from_junction]
            .iter()
            .map(|&e| (weight(&self.edges[e]), vec![e]))
            .collect();
        self.dijkstra(starts, |e| self.to_junction[e] == to_junction, &weight)
    }

    pub fn ids(&self, path: &[usize]) -> Vec<String> {
        path.iter().map(|&e| self.edges[e].id.clone()).collect()
    }

    fn dijkstra<W: Fn(&Edge) -> f64>(
        &self,
        starts: Vec<(f64, Vec<usize>)>,
        is_target: impl Fn(usize) -> bool,
        weight: &W,
    ) -> Option<(Vec<usize>, f64)> {
        let mut settled = vec![false; self.edges.len()];
        let mut heap: BinaryHeap<Label> = starts.into_iter().map(|(cost, path)| Label { cost, path }).collect();
        while let Some(Label { cost, path }) = heap.pop() {
            let e = *path.last().unwrap();
            if settled[e] {
                continue;
            }
            settled[e] = true;
            if is_target(e) {
                return Some((path, cost));
            }
            for n in self.successors(e) {
                if !settled[n] {
                    let mut p = path.clone();
                    p.push(n);
                    heap.push(Label {
                        cost: cost + weight(&self.edges[n]),
                        path: p,
                    });
                }
            }
        }
        None
    }
}

struct Label {
    cost: f64,
    path: Vec<usize>,
}

impl PartialEq for Label {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Label {}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Label {
    // reversed for the max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.path.cmp(&self.path))
    }
}

pub fn grid_junction_id(r: u32, c: u32) -> String {
    format!("j{r}_{c}")
}

/// Manhattan lattice with a two-way edge between every pair of adjacent
/// junctions. Junction `j{r}_{c}` sits at `(c * block, r * block)`.
pub fn generate_grid(rows: u32, cols: u32, block: f64, speed_limit: f64, lanes: u32) -> Result<RoadGraph, GraphError> {
    let mut junctions = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            junctions.push(Junction {
                id: grid_junction_id(r, c),
                x: c as f64 * block,
                y: r as f64 * block,
            });
        }
    }
    let mut edges = Vec::new();
    let mut link = |a: String, b: String| {
        for (f, t) in [(a.clone(), b.clone()), (b, a)] {
            edges.push(Edge {
                id: format!("{f}-{t}"),
                from: f,
                to: t,
                length: block,
                speed_limit,
                lanes,
            });
        }
    };
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                link(grid_junction_id(r, c), grid_junction_id(r, c + 1));
            }
            if r + 1 < rows {
                link(grid_junction_id(r, c), grid_junction_id(r + 1, c));
            }
        }
    }
    RoadGraph::new(junctions, edges)
}

/// A straight corridor with one edge per direction.
pub fn generate_highway(length: f64, lanes: u32, speed_limit: f64) -> Result<RoadGraph, GraphError> {
    let junctions = vec![
        Junction {
            id: "w".into(),
            x: 0.0,
            y: 0.0,
        },
        Junction {
            id: "e".into(),
            x: length,
            y: 0.0,
        },
    ];
    let edges = vec![
        Edge {
            id: "w-e".into(),
            from: "w".into(),
            to: "e".into(),
            length,
            speed_limit,
            lanes,
        },
        Edge {
            id: "e-w".into(),
            from: "e".into(),
            to: "w".into(),
            length,
            speed_limit,
            lanes,
        },
    ];
    RoadGraph::new(junctions, edges)
}
