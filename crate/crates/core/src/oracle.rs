//! Exhaustive references for small instances.
//!
//! Set partitions are enumerated as restricted growth strings, so each
//! grouping appears once regardless of how its groups are numbered.

use std::fmt;

use rand::Rng;

use crate::channel::{channel_gains, RadioParams};
use crate::clustering::{blended_objective, temporal_smoothed_partition, trace_objective, Partition, SpectralConfig};
use crate::error::{Error, Result};
use crate::graph::{build_graph, sum_cut_of_labels, AffinityGraph};
use crate::rng::{derive_seed, rng_from_seed};
use crate::topology::{generate_layout, step_waypoint, MobilityParams};

/// Candidate count above which enumeration is refused.
pub const MAX_CANDIDATES: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_vertices: usize,
    pub max_subnetworks: usize,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_vertices: 8,
            max_subnetworks: 3,
        }
    }
}

impl EnumerationBudget {
    pub fn check(&self, vertices: usize, groups: usize) -> Result<()> {
        let over = vertices > self.max_vertices
            || groups > self.max_subnetworks
            || stirling2(vertices, groups) > MAX_CANDIDATES;
        if over {
            Err(Error::BudgetExceeded { vertices, groups })
        } else {
            Ok(())
        }
    }
}

/// Stirling number of the second kind, S(n, k).
pub fn stirling2(n: usize, k: usize) -> u128 {
    let mut row = vec![0u128; k + 1];
    row[0] = 1;
    for i in 1..=n {
        for j in (1..=k.min(i)).rev() {
            row[j] = row[j].saturating_mul(j as u128).saturating_add(row[j - 1]);
        }
        row[0] = 0;
    }
    row[k]
}

/// Iterator over all partitions of `0..n` into exactly `k` nonempty groups.
#[derive(Debug, Clone)]
pub struct SetPartitions {
    n: usize,
    k: usize,
    current: Vec<usize>,
    done: bool,
}

impl SetPartitions {
    fn new(n: usize, k: usize) -> Self {
        let done = k == 0 || k > n;
        // Lexicographically first string using all k labels: 0...0 1 2 .. k-1.
        let current = (0..n).map(|i| (i + k).saturating_sub(n)).collect();
        SetPartitions { n, k, current, done }
    }

    /// Advances to the next string in lexicographic order with exactly `k`
    /// distinct labels.
    fn advance(&mut self) -> bool {
        let (n, k) = (self.n, self.k);
        // prefix_max[i] = max label among current[0..i]
        let mut prefix_max = vec![0usize; n];
        let mut m = 0;
        for i in 0..n {
            prefix_max[i] = m;
            m = m.max(self.current[i]);
        }
        for i in (1..n).rev() {
            let limit = prefix_max[i] + 1;
            let mut value = self.current[i] + 1;
            while value <= limit && value < k {
                let used = prefix_max[i].max(value) + 1;
                // Remaining positions must be able to introduce the missing labels.
                if k - used <= n - i - 1 {
                    self.current[i] = value;
                    let mut top = used;
                    for j in (i + 1)..n {
                        let remaining = n - j;
                        if k - top >= remaining {
                            self.current[j] = top;
                            top += 1;
                        } else {
                            self.current[j] = 0;
                        }
                    }
                    return true;
                }
                value += 1;
            }
        }
        false
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        self.done = !self.advance();
        Some(out)
    }
}

pub fn enumerate_partitions(n: usize, k: usize, budget: &EnumerationBudget) -> Result<SetPartitions> {
    budget.check(n, k)?;
    Ok(SetPartitions::new(n, k))
}

/// Exact minimizer of the blended sum-cut objective. The first partition in
/// enumeration order wins ties.
pub fn brute_force_best(
    graph_prev: &AffinityGraph,
    graph_t: &AffinityGraph,
    alpha: f64,
    num_subnetworks: usize,
    budget: &EnumerationBudget,
) -> Result<(Partition, f64)> {
    if graph_prev.num_vertices() != graph_t.num_vertices() {
        return Err(Error::Dimension("graphs over different vertex sets".into()));
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for labels in enumerate_partitions(graph_t.num_vertices(), num_subnetworks, budget)? {
        let value = blended_objective(graph_prev, graph_t, alpha, &labels);
        if best.as_ref().is_none_or(|(_, b)| value < *b) {
            best = Some((labels, value));
        }
    }
    let (labels, value) = best.ok_or_else(|| Error::Config("no partition to enumerate".into()))?;
    Ok((
        Partition::new(labels, num_subnetworks, graph_t.anchors().to_vec())?,
        value,
    ))
}

/// Settings for [`certify`].
#[derive(Debug, Clone, PartialEq)]
pub struct CertificationParams {
    pub instances: usize,
    pub seed: u64,
    pub max_users: usize,
    pub budget: EnumerationBudget,
    pub subnetwork_counts: Vec<usize>,
    pub alphas: Vec<f64>,
    /// Relative tolerance of the sum-cut / trace agreement.
    pub trace_tol: f64,
    /// Spectral objective allowed over the optimum, as a factor.
    pub quality_factor: f64,
    /// Fraction of instances that must meet `quality_factor`.
    pub required_fraction: f64,
}

impl Default for CertificationParams {
    fn default() -> Self {
        CertificationParams {
            instances: 100,
            seed: 1,
            max_users: 12,
            budget: EnumerationBudget::default(),
            subnetwork_counts: vec![2, 3],
            alphas: vec![0.0, 0.25, 0.5, 0.75, 0.9, 1.0],
            trace_tol: 1e-9,
            quality_factor: 1.25,
            required_fraction: 0.95,
        }
    }
}

/// Outcome for one random instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceReport {
    pub num_bs: usize,
    pub num_users: usize,
    pub num_subnetworks: usize,
    pub alpha: f64,
    pub partitions_checked: usize,
    /// Largest relative gap between sum cut and trace form, both graphs.
    pub max_trace_error: f64,
    pub spectral_objective: f64,
    pub optimum: f64,
}

impl InstanceReport {
    /// Spectral objective over the optimum; 1 when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.optimum > 0.0 {
            self.spectral_objective / self.optimum
        } else if self.spectral_objective <= 1e-12 {
            1.0
        } else {
            f64::INFINITY
        }
    }

    fn below_optimum(&self) -> bool {
        self.spectral_objective < self.optimum - 1e-9 * self.optimum.abs().max(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificationReport {
    pub params: CertificationParams,
    pub instances: Vec<InstanceReport>,
}

impl CertificationReport {
    pub fn max_trace_error(&self) -> f64 {
        self.instances.iter().map(|i| i.max_trace_error).fold(0.0, f64::max)
    }

    pub fn trace_identity_holds(&self) -> bool {
        self.max_trace_error() <= self.params.trace_tol
    }

    /// Fraction of instances within the quality factor.
    pub fn within_factor(&self) -> f64 {
        let ok = self
            .instances
            .iter()
            .filter(|i| i.ratio() <= self.params.quality_factor)
            .count();
        ok as f64 / self.instances.len().max(1) as f64
    }

    pub fn any_below_optimum(&self) -> bool {
        self.instances.iter().any(InstanceReport::below_optimum)
    }

    pub fn passed(&self) -> bool {
        self.trace_identity_holds()
            && !self.any_below_optimum()
            && self.within_factor() >= self.params.required_fraction
    }
}

impl fmt::Display for CertificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let checked: usize = self.instances.iter().map(|i| i.partitions_checked).sum();
        let worst = self.instances.iter().map(InstanceReport::ratio).fold(1.0, f64::max);
        writeln!(
            f,
            "instances: {}, enumerated partitions: {checked}",
            self.instances.len()
        )?;
        writeln!(
            f,
            "{} trace identity: max relative error {:.3e} (tol {:.0e})",
            if self.trace_identity_holds() { "PASS" } else { "FAIL" },
            self.max_trace_error(),
            self.params.trace_tol
        )?;
        write!(
            f,
            "{} spectral quality: {:.1}% within {}x of optimum (need {:.0}%), worst ratio {worst:.4}, below optimum: {}",
            if self.within_factor() >= self.params.required_fraction && !self.any_below_optimum() {
                "PASS"
            } else {
                "FAIL"
            },
            100.0 * self.within_factor(),
            self.params.quality_factor,
            100.0 * self.params.required_fraction,
            self.any_below_optimum()
        )
    }
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// Draws random two-instant networks small enough to enumerate, checks the
/// trace form of the sum cut on every partition, and compares the spectral
/// solution with the exact optimum.
pub fn certify(params: &CertificationParams) -> Result<CertificationReport> {
    let radio = RadioParams::default();
    let mobility = MobilityParams::default();
    let mut reports = Vec::with_capacity(params.instances);
    for i in 0..params.instances {
        let seed = derive_seed(params.seed, 0x6f72_6163_6c65, i as u64);
        let mut rng = rng_from_seed(seed);
        let m = params.subnetwork_counts[rng.random_range(0..params.subnetwork_counts.len())];
        let num_bs = rng.random_range(m.max(3)..=params.budget.max_vertices);
        let num_users = rng.random_range(1..=params.max_users);
        let alpha = params.alphas[rng.random_range(0..params.alphas.len())];

        let layout0 = generate_layout(num_users, num_bs, rng.random())?;
        let layout1 = step_waypoint(&layout0, &mobility, rng.random())?;
        let graph_prev = build_graph(&channel_gains(&layout0, &radio, None));
        let graph_t = build_graph(&channel_gains(&layout1, &radio, None));

        let mut checked = 0;
        let mut max_trace_error: f64 = 0.0;
        for labels in enumerate_partitions(num_bs, m, &params.budget)? {
            for g in [&graph_prev, &graph_t] {
                let cut = sum_cut_of_labels(g, &labels);
                let trace = trace_objective(g.laplacian(), &labels, m);
                max_trace_error = max_trace_error.max(relative_gap(cut, trace));
            }
            checked += 1;
        }

        let (_, optimum) = brute_force_best(&graph_prev, &graph_t, alpha, m, &params.budget)?;
        let cfg = SpectralConfig::new(alpha, m, rng.random());
        let spectral = temporal_smoothed_partition(&graph_prev, &graph_t, &cfg)?;
        let spectral_objective = blended_objective(&graph_prev, &graph_t, alpha, spectral.vertex_labels());
        reports.push(InstanceReport {
            num_bs,
            num_users,
            num_subnetworks: m,
            alpha,
            partitions_checked: checked,
            max_trace_error,
            spectral_objective,
            optimum,
        });
    }
    Ok(CertificationReport {
        params: params.clone(),
        instances: reports,
    })
}
