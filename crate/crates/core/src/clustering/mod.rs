//! Evolutionary spectral clustering of the affinity graph.
//!
//! The current and previous Laplacians are blended as
//! `alpha * L_t + (1 - alpha) * L_prev`; the eigenvectors of the `M`
//! smallest eigenvalues embed each vertex as a row, and k-means on those
//! rows yields the vertex labels. Users inherit the label of their anchor
//! vertex in the current graph. The eigendecomposition dominates the cost
//! at O(L^3).

mod eigen;
mod kmeans;
mod partition;

use nalgebra::DMatrix;

pub use eigen::{smallest_eigenvectors, symmetric_eigen, EigenPairs};
pub use kmeans::{kmeans_rows, KMeansParams, KMeansResult};
pub use partition::{canonicalize, indicator_matrix, Partition};

use crate::error::{Error, Result};
use crate::graph::{sum_cut_of_labels, AffinityGraph};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConfig {
    /// Weight of the current graph, in [0, 1].
    pub alpha: f64,
    /// Number of subnetworks.
    pub num_subnetworks: usize,
    pub kmeans: KMeansParams,
    pub seed: u64,
}

impl SpectralConfig {
    pub fn new(alpha: f64, num_subnetworks: usize, seed: u64) -> Self {
        SpectralConfig {
            alpha,
            num_subnetworks,
            kmeans: KMeansParams::default(),
            seed,
        }
    }

    pub fn validate(&self, num_vertices: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        if self.num_subnetworks == 0 || self.num_subnetworks > num_vertices {
            return Err(Error::Config(format!(
                "need 1 <= M <= L, got M={} with L={num_vertices}",
                self.num_subnetworks
            )));
        }
        Ok(())
    }
}

/// `alpha * lap_t + (1 - alpha) * lap_prev`; the endpoints return the
/// corresponding input unchanged.
pub fn blended_laplacian(lap_t: &DMatrix<f64>, lap_prev: &DMatrix<f64>, alpha: f64) -> Result<DMatrix<f64>> {
    if lap_t.shape() != lap_prev.shape() {
        return Err(Error::Dimension(format!(
            "laplacians {:?} and {:?} are not conformable",
            lap_t.shape(),
            lap_prev.shape()
        )));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::Config(format!("alpha {alpha} outside [0, 1]")));
    }
    Ok(if alpha == 1.0 {
        lap_t.clone()
    } else if alpha == 0.0 {
        lap_prev.clone()
    } else {
        lap_t * alpha + lap_prev * (1.0 - alpha)
    })
}

/// Spectral embedding plus k-means on an already formed Laplacian.
pub fn cluster_laplacian(lap: &DMatrix<f64>, anchors: &[usize], cfg: &SpectralConfig) -> Result<Partition> {
    cfg.validate(lap.nrows())?;
    let embedding = smallest_eigenvectors(lap, cfg.num_subnetworks)?;
    let clusters = kmeans_rows(&embedding.vectors, cfg.num_subnetworks, &cfg.kmeans, cfg.seed)?;
    Partition::new(clusters.labels, cfg.num_subnetworks, anchors.to_vec())
}

/// Temporal-smoothed partition of `graph_t` given the previous instant's
/// graph.
pub fn temporal_smoothed_partition(
    graph_prev: &AffinityGraph,
    graph_t: &AffinityGraph,
    cfg: &SpectralConfig,
) -> Result<Partition> {
    let blended = blended_laplacian(graph_t.laplacian(), graph_prev.laplacian(), cfg.alpha)?;
    cluster_laplacian(&blended, graph_t.anchors(), cfg)
}

/// Per-instant partition of a single graph, ignoring history and `cfg.alpha`.
pub fn spectral_partition(graph: &AffinityGraph, cfg: &SpectralConfig) -> Result<Partition> {
    cluster_laplacian(graph.laplacian(), graph.anchors(), cfg)
}

/// First partition of a trajectory, where no earlier graph exists.
pub fn initial_partition(graph_0: &AffinityGraph, cfg: &SpectralConfig) -> Result<Partition> {
    temporal_smoothed_partition(graph_0, graph_0, cfg)
}

/// `alpha * sumcut_t + (1 - alpha) * sumcut_prev` of a vertex labelling.
pub fn blended_objective(graph_prev: &AffinityGraph, graph_t: &AffinityGraph, alpha: f64, labels: &[usize]) -> f64 {
    alpha * sum_cut_of_labels(graph_t, labels) + (1.0 - alpha) * sum_cut_of_labels(graph_prev, labels)
}

/// `Tr(Z^T A Z)` for the indicator matrix of `labels`.
pub fn trace_objective(a: &DMatrix<f64>, labels: &[usize], num_groups: usize) -> f64 {
    let z = indicator_matrix(labels, num_groups);
    (z.transpose() * a * z).trace()
}
