//! BS-anchored affinity graph: ratio weights, Laplacian and cuts.
//!
//! Vertex `i` always stands for BS `i`; only the set of users anchored to it
//! changes over time, so graphs from different instants are conformable.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::channel::{best_bs, ChannelGains};
use crate::clustering::Partition;
use crate::error::{Error, Result};
use crate::format::sig9;

#[derive(Debug, Clone, PartialEq)]
pub struct AffinityGraph {
    anchors: Vec<usize>,
    weights: DMatrix<f64>,
    laplacian: DMatrix<f64>,
}

/// Degree matrix minus weight matrix.
pub fn laplacian(weights: &DMatrix<f64>) -> DMatrix<f64> {
    let mut lap = -weights.clone();
    for i in 0..weights.nrows() {
        lap[(i, i)] = weights.row(i).sum() - weights[(i, i)];
    }
    lap
}

impl AffinityGraph {
    /// Graph from an explicit weight matrix, which must be square, symmetric,
    /// nonnegative and zero on the diagonal.
    pub fn from_weights(anchors: Vec<usize>, weights: DMatrix<f64>) -> Result<Self> {
        if !weights.is_square() {
            return Err(Error::Dimension("weight matrix must be square".into()));
        }
        let n = weights.nrows();
        for i in 0..n {
            if weights[(i, i)] != 0.0 {
                return Err(Error::Config(format!("nonzero self-weight at vertex {i}")));
            }
            for j in 0..n {
                let w = weights[(i, j)];
                if !(w.is_finite() && w >= 0.0) || w != weights[(j, i)] {
                    return Err(Error::Config(format!("invalid weight at ({i}, {j})")));
                }
            }
        }
        if anchors.iter().any(|&a| a >= n) {
            return Err(Error::Config("anchor outside the vertex set".into()));
        }
        let laplacian = laplacian(&weights);
        Ok(AffinityGraph {
            anchors,
            weights,
            laplacian,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.weights.nrows()
    }

    /// Anchor vertex of every user.
    pub fn anchors(&self) -> &[usize] {
        &self.anchors
    }

    pub fn weights(&self) -> &DMatrix<f64> {
        &self.weights
    }

    pub fn laplacian(&self) -> &DMatrix<f64> {
        &self.laplacian
    }

    /// Upper-triangle edge list `i,j,w`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,w\n");
        let n = self.num_vertices();
        for i in 0..n {
            for j in (i + 1)..n {
                let _ = writeln!(out, "{i},{j},{}", sig9(self.weights[(i, j)]));
            }
        }
        out
    }
}

/// Builds the graph from large-scale gains.
///
/// Each user joins the vertex of its best BS. The weight between vertices
/// `i != j` sums, over the users of `i`, the gain ratio `g[k][j] / g[k][i]`,
/// plus the mirrored sum over the users of `j`.
pub fn build_graph(gains: &ChannelGains) -> AffinityGraph {
    let n = gains.num_bs();
    let anchors: Vec<usize> = (0..gains.num_users()).map(|k| best_bs(gains, k)).collect();
    // directed[i][j] = sum over users in v_i of g_kj / g_ki
    let mut directed = DMatrix::<f64>::zeros(n, n);
    for (k, &i) in anchors.iter().enumerate() {
        let own = gains.get(k, i);
        for j in 0..n {
            if j != i {
                directed[(i, j)] += gains.get(k, j) / own;
            }
        }
    }
    let weights = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            directed[(i, j)] + directed[(j, i)]
        }
    });
    let laplacian = laplacian(&weights);
    AffinityGraph {
        anchors,
        weights,
        laplacian,
    }
}

/// Total weight of edges leaving `subset`. Vertex indices are BS indices,
/// so a subset taken from one instant can be cut on another instant's graph.
pub fn cut_value(graph: &AffinityGraph, subset: &[usize]) -> f64 {
    let n = graph.num_vertices();
    let mut inside = vec![false; n];
    for &i in subset {
        inside[i] = true;
    }
    let mut total = 0.0;
    for i in (0..n).filter(|&i| inside[i]) {
        for j in (0..n).filter(|&j| !inside[j]) {
            total += graph.weights[(i, j)];
        }
    }
    total
}

/// Sum of the cuts of every group in a labelling of the vertices.
pub fn sum_cut_of_labels(graph: &AffinityGraph, labels: &[usize]) -> f64 {
    let n = graph.num_vertices();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] != labels[j] {
                total += graph.weights[(i, j)];
            }
        }
    }
    total
}

pub fn sum_cut(graph: &AffinityGraph, partition: &Partition) -> f64 {
    sum_cut_of_labels(graph, partition.vertex_labels())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{channel_gains, RadioParams};
    use crate::topology::generate_layout;

    fn three_vertex() -> AffinityGraph {
        let w = DMatrix::from_row_slice(3, 3, &[0., 1., 2., 1., 0., 3., 2., 3., 0.]);
        AffinityGraph::from_weights(vec![], w).unwrap()
    }

    #[test]
    fn no_users_means_no_weight() {
        let gains = ChannelGains::new(DMatrix::zeros(0, 4), false).unwrap();
        let g = build_graph(&gains);
        assert_eq!(g.weights(), &DMatrix::zeros(4, 4));
        assert_eq!(g.laplacian(), &DMatrix::zeros(4, 4));
    }

    #[test]
    fn hand_evaluated_pair() {
        let gains = ChannelGains::from_rows(&[&[4.0, 1.0]]).unwrap();
        let g = build_graph(&gains);
        assert_eq!(g.anchors(), &[0]);
        assert_eq!(g.weights()[(0, 1)], 0.25);
        assert_eq!(g.laplacian(), &DMatrix::from_row_slice(2, 2, &[0.25, -0.25, -0.25, 0.25]));
    }

    #[test]
    fn random_graph_invariants() {
        let layout = generate_layout(30, 50, 4).unwrap();
        let g = build_graph(&channel_gains(&layout, &RadioParams::default(), None));
        let w = g.weights();
        assert_eq!(w, &w.transpose());
        assert!((0..50).all(|i| w[(i, i)] == 0.0));
        for i in 0..50 {
            assert!(g.laplacian().row(i).sum().abs() < 1e-9);
        }
    }

    #[test]
    fn cut_examples() {
        let g = three_vertex();
        assert_eq!(cut_value(&g, &[0, 1, 2]), 0.0);
        assert_eq!(cut_value(&g, &[]), 0.0);
        assert_eq!(cut_value(&g, &[0]), 3.0);
        assert_eq!(cut_value(&g, &[1, 2]), 3.0);
    }

    #[test]
    fn sum_cut_extremes() {
        let g = three_vertex();
        let one = Partition::new(vec![0, 0, 0], 1, vec![]).unwrap();
        assert_eq!(sum_cut(&g, &one), 0.0);
        let singletons = Partition::new(vec![0, 1, 2], 3, vec![]).unwrap();
        assert_eq!(sum_cut(&g, &singletons), 2.0 * 6.0);
    }

    #[test]
    fn rejects_bad_weights() {
        let asym = DMatrix::from_row_slice(2, 2, &[0., 1., 2., 0.]);
        assert!(AffinityGraph::from_weights(vec![], asym).is_err());
        let diag = DMatrix::from_row_slice(2, 2, &[1., 1., 1., 0.]);
        assert!(AffinityGraph::from_weights(vec![], diag).is_err());
    }

    #[test]
    fn edge_list_csv() {
        assert_eq!(three_vertex().to_csv(), "i,j,w\n0,1,1\n0,2,2\n1,2,3\n");
    }
}
