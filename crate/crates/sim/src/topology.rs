use crate::{Error, Result};

/// Who can hear whom. Symmetric, irreflexive.
#[derive(Debug, Clone)]
pub struct Topology {
    n: usize,
    adj: Vec<Vec<bool>>,
    neighbors: Vec<Vec<usize>>,
}

impl Topology {
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Scenario("topology needs at least one node".into()));
        }
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::Scenario(format!(
                    "edge ({a},{b}) references a node outside 0..{n}"
                )));
            }
            if a == b {
                return Err(Error::Scenario(format!("self-edge on node {a}")));
            }
            adj[a][b] = true;
            adj[b][a] = true;
        }
        let neighbors = adj
            .iter()
            .map(|row| (0..n).filter(|&j| row[j]).collect())
            .collect();
        Ok(Self { n, adj, neighbors })
    }

    /// Everyone hears everyone.
    pub fn clique(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        Self::from_edges(n.max(1), &edges).expect("clique edges are always valid")
    }

    /// Chain 0-1-2-...; only adjacent indices hear each other.
    pub fn line(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|b| (b - 1, b)).collect();
        Self::from_edges(n.max(1), &edges).expect("line edges are always valid")
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn connected(&self, a: usize, b: usize) -> bool {
        self.adj[a][b]
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.neighbors[node]
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.iter().map(Vec::len).sum::<usize>() / 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clique_has_all_pairs() {
        let t = Topology::clique(5);
        assert_eq!(t.edge_count(), 10);
        for a in 0..5 {
            assert!(!t.connected(a, a));
            assert_eq!(t.neighbors(a).len(), 4);
        }
    }

    #[test]
    fn line_connects_only_adjacent() {
        let t = Topology::line(3);
        assert_eq!(t.edge_count(), 2);
        assert!(t.connected(0, 1) && t.connected(1, 2));
        assert!(!t.connected(0, 2));
        assert_eq!(t.neighbors(1), &[0, 2]);
    }

    #[test]
    fn rejects_self_and_out_of_range_edges() {
        assert!(Topology::from_edges(3, &[(1, 1)]).is_err());
        assert!(Topology::from_edges(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn single_node_is_fine() {
        let t = Topology::clique(1);
        assert_eq!(t.len(), 1);
        assert_eq!(t.edge_count(), 0);
    }
}
