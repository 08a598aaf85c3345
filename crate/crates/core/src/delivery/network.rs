use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::DeliveryError;

/// How a road network was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    WattsStrogatz,
    ExpectedDegree,
    ErdosRenyi,
    StaticScaleFree,
    Manual,
}

impl GeneratorKind {
    /// The four random generators, in sampling order.
    pub const RANDOM: [GeneratorKind; 4] = [
        GeneratorKind::WattsStrogatz,
        GeneratorKind::ExpectedDegree,
        GeneratorKind::ErdosRenyi,
        GeneratorKind::StaticScaleFree,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GeneratorKind::WattsStrogatz => "watts_strogatz",
            GeneratorKind::ExpectedDegree => "expected_degree",
            GeneratorKind::ErdosRenyi => "erdos_renyi",
            GeneratorKind::StaticScaleFree => "static_scale_free",
            GeneratorKind::Manual => "manual",
        }
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = DeliveryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "watts_strogatz" | "ws" => Ok(GeneratorKind::WattsStrogatz),
            "expected_degree" | "ed" => Ok(GeneratorKind::ExpectedDegree),
            "erdos_renyi" | "er" => Ok(GeneratorKind::ErdosRenyi),
            "static_scale_free" | "sf" => Ok(GeneratorKind::StaticScaleFree),
            "manual" => Ok(GeneratorKind::Manual),
            other => Err(DeliveryError::InvalidNetwork(format!("unknown generator `{other}`"))),
        }
    }
}

/// Serialized form of a network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDoc {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub generator: GeneratorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layout: Option<Vec<[f64; 2]>>,
}

/// Undirected simple graph of road intersections. Edges are stored
/// canonically (`a < b`, sorted) and adjacency lists are sorted by node id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NetworkDoc", into = "NetworkDoc")]
pub struct RoadNetwork {
    n: usize,
    edges: Vec<(usize, usize)>,
    generator: GeneratorKind,
    layout: Option<Vec<[f64; 2]>>,
    adjacency: Vec<Vec<usize>>,
}

impl RoadNetwork {
    /// Builds a network, rejecting self-loops, duplicate edges, and
    /// out-of-range endpoints. Connectivity is not required here; see
    /// [`RoadNetwork::is_connected`].
    pub fn new(n: usize, edges: &[(usize, usize)], generator: GeneratorKind) -> Result<Self, DeliveryError> {
        if n < 2 {
            return Err(DeliveryError::InvalidNetwork(format!("need at least 2 nodes, got {n}")));
        }
        let mut canon = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(DeliveryError::InvalidNetwork(format!("edge ({a}, {b}) out of range")));
            }
            if a == b {
                return Err(DeliveryError::InvalidNetwork(format!("self-loop at node {a}")));
            }
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(DeliveryError::InvalidNetwork(format!("duplicate edge {:?}", w[0])));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in &canon {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(RoadNetwork {
            n,
            edges: canon,
            generator,
            layout: None,
            adjacency,
        })
    }

    pub fn with_layout(mut self, layout: Vec<[f64; 2]>) -> Result<Self, DeliveryError> {
        if layout.len() != self.n || layout.iter().flatten().any(|c| !c.is_finite()) {
            return Err(DeliveryError::InvalidNetwork("layout must give finite coordinates for every node".into()));
        }
        self.layout = Some(layout);
        Ok(self)
    }

    /// Evenly spaced positions on the unit circle.
    pub fn with_circle_layout(self) -> Self {
        let n = self.n;
        let layout = (0..n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        RoadNetwork {
            layout: Some(layout),
            ..self
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn generator(&self) -> GeneratorKind {
        self.generator
    }

    pub fn layout(&self) -> Option<&[[f64; 2]]> {
        self.layout.as_deref()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn edge_node_ratio(&self) -> f64 {
        self.edges.len() as f64 / self.n as f64
    }

    /// BFS hop counts from `source`; `None` for unreachable nodes.
    pub fn distances_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap_or(0);
            for &v in &self.adjacency[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Hop distance between two nodes, `None` if they are disconnected.
    pub fn shortest_path_distance(&self, a: usize, b: usize) -> Option<usize> {
        self.distances_from(a)[b]
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(0).iter().all(Option::is_some)
    }
}

impl TryFrom<NetworkDoc> for RoadNetwork {
    type Error = DeliveryError;

    fn try_from(doc: NetworkDoc) -> Result<Self, Self::Error> {
        let edges: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
        let net = RoadNetwork::new(doc.n, &edges, doc.generator)?;
        match doc.layout {
            Some(layout) => net.with_layout(layout),
            None => Ok(net),
        }
    }
}

impl From<RoadNetwork> for NetworkDoc {
    fn from(net: RoadNetwork) -> Self {
        NetworkDoc {
            n: net.n,
            edges: net.edges.iter().map(|&(a, b)| [a, b]).collect(),
            generator: net.generator,
            layout: net.layout,
        }
    }
}
