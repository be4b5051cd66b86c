//! kNN spanning graphs over embedded points and their connected components.

use serde::{Deserialize, Serialize};

use crate::dissimilarity::EmbeddedPoints;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Undirected kNN graph. Edges are stored once with u < v, sorted
/// lexicographically; weights are Euclidean distances between embedded rows.
#[derive(Clone, Debug, PartialEq)]
pub struct KnnGraph<F> {
    pub vertex_count: usize,
    pub k: usize,
    pub edges: Vec<(usize, usize, F)>,
}

impl<F: Real> KnnGraph<F> {
    /// Sub-graph induced by a sorted vertex set, with vertices renumbered to
    /// 0..len in that order. Edges crossing the set boundary are dropped.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> KnnGraph<F> {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        let edges = self
            .edges
            .iter()
            .filter_map(|&(u, v, w)| {
                let lu = vertices.binary_search(&u).ok()?;
                let lv = vertices.binary_search(&v).ok()?;
                Some((lu, lv, w))
            })
            .collect();
        KnnGraph {
            vertex_count: vertices.len(),
            k: self.k,
            edges,
        }
    }

    /// Adjacency lists (neighbour, weight), vertices in edge order.
    pub fn adjacency(&self) -> Vec<Vec<(usize, F)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(u, v, w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        adj
    }
}

/// Connected-component partition of a graph's vertex set.
///
/// Components are listed in order of their smallest member; vertices inside a
/// component are ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub component_of: Vec<usize>,
    pub components: Vec<Vec<usize>>,
}

impl Partition {
    /// Number of components d.
    pub fn order(&self) -> usize {
        self.components.len()
    }

    /// Rebuilds the vertex -> component map from a component list. The lists
    /// must be disjoint and cover 0..n exactly.
    pub fn from_components(components: Vec<Vec<usize>>) -> Result<Self> {
        let n: usize = components.iter().map(|c| c.len()).sum();
        let mut component_of = vec![usize::MAX; n];
        for (ci, comp) in components.iter().enumerate() {
            if comp.is_empty() {
                return Err(Error::InvalidConfig(format!(
                    "partition component {ci} is empty"
                )));
            }
            for &v in comp {
                if v >= n || component_of[v] != usize::MAX {
                    return Err(Error::InvalidConfig(format!(
                        "partition vertex {v} out of range or repeated"
                    )));
                }
                component_of[v] = ci;
            }
        }
        Ok(Partition {
            component_of,
            components,
        })
    }
}

/// Pairwise distances between embedded rows plus, per vertex, all other
/// vertices sorted by (distance, index). Built once per embedding, it serves
/// every k without repeating the O(n^2 log n) sort.
pub struct NeighborTable<F> {
    n: usize,
    dist: Vec<F>,
    order: Vec<u32>,
}

impl<F: Real> NeighborTable<F> {
    pub fn new(points: &EmbeddedPoints<F>) -> Self {
        let n = points.rows();
        let mut dist = vec![F::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = points.row_distance(i, j);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        let mut order = Vec::with_capacity(n * (n - 1));
        let mut scratch: Vec<u32> = Vec::with_capacity(n - 1);
        for v in 0..n {
            scratch.clear();
            scratch.extend((0..n as u32).filter(|&u| u as usize != v));
            let row = &dist[v * n..(v + 1) * n];
            scratch.sort_unstable_by(|&a, &b| {
                row[a as usize]
                    .partial_cmp(&row[b as usize])
                    .expect("finite distance")
                    .then(a.cmp(&b))
            });
            order.extend_from_slice(&scratch);
        }
        NeighborTable { n, dist, order }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn distance(&self, u: usize, v: usize) -> F {
        self.dist[u * self.n + v]
    }

    /// kNN graph by union symmetrization: an edge exists when either endpoint
    /// ranks the other among its k nearest.
    pub fn graph_for_k(&self, k: usize) -> Result<KnnGraph<F>> {
        let n = self.n;
        if n < 2 {
            return Err(Error::BadDataset("need at least 2 points".into()));
        }
        if k == 0 || k > n - 1 {
            return Err(Error::InvalidConfig(format!(
                "k = {k} outside [1, {}]",
                n - 1
            )));
        }
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(n * k);
        for v in 0..n {
            let nearest = &self.order[v * (n - 1)..v * (n - 1) + k];
            for &u in nearest {
                let (a, b) = if (v as u32) < u {
                    (v as u32, u)
                } else {
                    (u, v as u32)
                };
                pairs.push((a, b));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let edges = pairs
            .into_iter()
            .map(|(a, b)| (a as usize, b as usize, self.distance(a as usize, b as usize)))
            .collect();
        Ok(KnnGraph {
            vertex_count: n,
            k,
            edges,
        })
    }
}

/// Builds the union-symmetrized kNN graph over embedded points.
///
/// Neighbour ties are broken by lower vertex index; the search is an exact
/// all-pairs scan.
pub fn build_knn_graph<F: Real>(points: &EmbeddedPoints<F>, k: usize) -> Result<KnnGraph<F>> {
    NeighborTable::new(points).graph_for_k(k)
}

/// Connected components via union-find with path halving.
pub fn connected_components<F: Real>(graph: &KnnGraph<F>) -> Partition {
    let n = graph.vertex_count;
    let mut parent: Vec<usize> = (0..n).collect();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for &(u, v, _) in &graph.edges {
        let ru = find(&mut parent, u);
        let rv = find(&mut parent, v);
        if ru != rv {
            // Attach the larger root to the smaller; keeps roots at minimal
            // indices so component order falls out of the scan below.
            let (lo, hi) = if ru < rv { (ru, rv) } else { (rv, ru) };
            parent[hi] = lo;
        }
    }

    let mut component_of = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for v in 0..n {
        let root = find(&mut parent, v);
        if component_of[root] == usize::MAX {
            component_of[root] = components.len();
            components.push(Vec::new());
        }
        let ci = component_of[root];
        component_of[v] = ci;
        components[ci].push(v);
    }
    Partition {
        component_of,
        components,
    }
}
