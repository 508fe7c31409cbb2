//! Undirected simple graphs: construction, JSON ingestion, BFS distances and
//! a distance-regularity check.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactlinalg::{rat, ExactMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("invalid graph file: {0}")]
    Parse(String),
}

/// Undirected simple graph on vertices `0..n`. Edges are stored as `(u, v)`
/// with `u < v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

/// On-disk form: `{"n": 4, "edges": [[0, 1], [1, 2]]}`.
#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Graph {
    /// Rejects loops, repeated edges (in either orientation) and out-of-range vertices.
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        let mut neighbors = vec![Vec::new(); n];
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::Loop(u));
            }
            let key = (u.min(v), u.max(v));
            if !set.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
            neighbors[u].push(v);
            neighbors[v].push(u);
        }
        for list in &mut neighbors {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges: set,
            neighbors,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        Self::new(file.n, file.edges.into_iter().map(|[u, v]| (u, v)))
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        };
        serde_json::to_string(&file).expect("graph serializes")
    }

    pub fn path(n: usize) -> Self {
        Self::new(n, (1..n).map(|v| (v - 1, v))).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle is simple")
    }

    pub fn complete(n: usize) -> Self {
        Self::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
            .expect("complete graph is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in increasing order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Equal or adjacent: the positions where an A-like matrix may be nonzero.
    pub fn in_support(&self, u: usize, v: usize) -> bool {
        u == v || self.is_adjacent(u, v)
    }

    pub fn adjacency(&self) -> ExactMatrix {
        ExactMatrix::from_triplets(
            self.n,
            self.n,
            self.edges
                .iter()
                .flat_map(|&(u, v)| [(u, v, rat(1)), (v, u, rat(1))]),
        )
        .expect("edges in range")
    }

    /// BFS distances from `source`; `None` for unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].expect("queued vertices have distances");
            for &y in &self.neighbors[x] {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// All-pairs distance table; fails on disconnected graphs.
    pub fn distance_table(&self) -> Result<Vec<Vec<usize>>, GraphError> {
        (0..self.n)
            .map(|x| {
                self.distances_from(x)
                    .into_iter()
                    .collect::<Option<Vec<_>>>()
                    .ok_or(GraphError::Disconnected)
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.distances_from(0).iter().all(Option::is_some)
    }

    pub fn diameter(&self) -> Result<usize, GraphError> {
        Ok(self
            .distance_table()?
            .iter()
            .flat_map(|row| row.iter().copied())
            .max()
            .unwrap_or(0))
    }

    /// `A_i`: 1 at `(x, y)` when `dist(x, y) == i`. `A_0 = I` and `A_1 = A`
    /// need no connectivity; larger `i` require a connected graph.
    pub fn distance_matrix(&self, i: usize) -> Result<ExactMatrix, GraphError> {
        match i {
            0 => Ok(ExactMatrix::identity(self.n)),
            1 => Ok(self.adjacency()),
            _ => {
                let table = self.distance_table()?;
                Ok(ExactMatrix::from_triplets(
                    self.n,
                    self.n,
                    table.iter().enumerate().flat_map(|(x, row)| {
                        row.iter()
                            .enumerate()
                            .filter(move |(_, &d)| d == i)
                            .map(move |(y, _)| (x, y, rat(1)))
                    }),
                )
                .expect("indices in range"))
            }
        }
    }

    /// Checks whether `|Γ_i(x) ∩ Γ_j(y)|` depends only on `dist(x, y)`.
    pub fn distance_regularity(&self) -> Result<DistanceRegularity, GraphError> {
        let dist = self.distance_table()?;
        let diameter = dist.iter().flatten().copied().max().unwrap_or(0);
        let size = diameter + 1;
        // table[h] is filled by the first pair seen at distance h, with that pair recorded.
        let mut table: Vec<Option<FirstSeen>> = vec![None; size];
        for x in 0..self.n {
            for y in 0..self.n {
                let h = dist[x][y];
                let mut counts = vec![vec![0usize; size]; size];
                for z in 0..self.n {
                    counts[dist[x][z]][dist[y][z]] += 1;
                }
                match &table[h] {
                    None => table[h] = Some(((x, y), counts)),
                    Some((first, reference)) => {
                        if *reference != counts {
                            let (i, j) = (0..size)
                                .flat_map(|i| (0..size).map(move |j| (i, j)))
                                .find(|&(i, j)| reference[i][j] != counts[i][j])
                                .expect("tables differ");
                            return Ok(DistanceRegularity::Irregular(IrregularityWitness {
                                h,
                                i,
                                j,
                                first: *first,
                                first_count: reference[i][j],
                                second: (x, y),
                                second_count: counts[i][j],
                            }));
                        }
                    }
                }
            }
        }
        Ok(DistanceRegularity::Regular {
            diameter,
            intersection_numbers: table
                .into_iter()
                .map(|entry| entry.expect("every distance up to the diameter occurs").1)
                .collect(),
        })
    }
}

/// A vertex pair and its `|Γ_i(x) ∩ Γ_j(y)|` counts.
type FirstSeen = ((usize, usize), Vec<Vec<usize>>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IrregularityWitness {
    pub h: usize,
    pub i: usize,
    pub j: usize,
    pub first: (usize, usize),
    pub first_count: usize,
    pub second: (usize, usize),
    pub second_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DistanceRegularity {
    /// `intersection_numbers[h][i][j] = p^h_{ij}`.
    Regular {
        diameter: usize,
        intersection_numbers: Vec<Vec<Vec<usize>>>,
    },
    /// Two vertex pairs at the same distance `h` with different counts
    /// `|Γ_i(x) ∩ Γ_j(y)|`.
    Irregular(IrregularityWitness),
}

impl DistanceRegularity {
    pub fn is_regular(&self) -> bool {
        matches!(self, DistanceRegularity::Regular { .. })
    }

    pub fn intersection_number(&self, h: usize, i: usize, j: usize) -> Option<usize> {
        match self {
            DistanceRegularity::Regular {
                intersection_numbers,
                ..
            } => intersection_numbers.get(h)?.get(i)?.get(j).copied(),
            DistanceRegularity::Irregular(_) => None,
        }
    }
}
