//! Per-step KPIs: temporal smoothness, handovers and the zero-forcing
//! downlink rate.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::channel::{best_bs, check_dims, per_user_rates, sum_rate, user_rate, ChannelGains, RadioParams};
use crate::clustering::Partition;
use crate::error::{Error, Result};

/// Relative singular-value floor below which an intra-subnetwork channel is
/// treated as rank deficient.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub time_index: usize,
    pub sum_rate: f64,
    /// Missing at the first instant of a trajectory.
    pub temporal_smoothness: Option<f64>,
    /// Missing at the first instant of a trajectory.
    pub handovers: Option<usize>,
    pub zfbf_sum_rate: Option<f64>,
    pub per_user_rates: Vec<f64>,
}

/// The time-t vertex partition scored on the time-(t-1) large-scale gains.
///
/// Users join the vertex of their best BS under `gains_prev`, the same
/// membership the time-(t-1) graph uses, so this is the rate counterpart of
/// cutting the previous graph with the current labels.
pub fn temporal_smoothness(gains_prev: &ChannelGains, partition_t: &Partition, params: &RadioParams) -> Result<f64> {
    check_dims(gains_prev, partition_t)?;
    let anchors = (0..gains_prev.num_users()).map(|k| best_bs(gains_prev, k)).collect();
    sum_rate(gains_prev, &partition_t.with_anchors(anchors)?, params)
}

/// Number of (user, BS) service pairs in `current` that were absent in
/// `previous`.
pub fn handover_count(previous: &Partition, current: &Partition) -> Result<usize> {
    if previous.num_users() != current.num_users() || previous.num_bs() != current.num_bs() {
        return Err(Error::Dimension("partitions cover different networks".into()));
    }
    let old = previous.connections();
    Ok(current.connections().difference(&old).count())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZfbfOutcome {
    pub sum_rate: f64,
    pub per_user_rates: Vec<f64>,
    /// Largest `|h_j w_i| / |h_i w_i|` over `i != j` inside any subnetwork.
    pub max_crosstalk: f64,
    /// Subnetworks with more users than BSs; their users get zero rate.
    pub overloaded: Vec<usize>,
    /// Subnetworks whose channel was numerically rank deficient; also zero rate.
    pub singular: Vec<usize>,
}

/// Downlink sum rate with zero-forcing precoding inside every subnetwork.
///
/// The precoder is the right pseudo-inverse of the subnetwork channel with
/// each user's beam normalized to an equal share of the subnetwork power
/// `L_m * P_t`. Interference comes from every BS outside the subnetwork, each
/// radiating `P_t`. Noise power is one.
pub fn zfbf_sum_rate(
    gains_faded: &ChannelGains,
    channel: &DMatrix<Complex64>,
    partition: &Partition,
    params: &RadioParams,
) -> Result<ZfbfOutcome> {
    check_dims(gains_faded, partition)?;
    if channel.shape() != gains_faded.gains.shape() {
        return Err(Error::Dimension("complex channel and gains differ in shape".into()));
    }
    let r = params.pt_over_sigma2;
    let mut rates = vec![0.0; partition.num_users()];
    let mut max_crosstalk: f64 = 0.0;
    let mut overloaded = Vec::new();
    let mut singular = Vec::new();

    for m in 0..partition.num_subnetworks() {
        let users = partition.users_in(m);
        if users.is_empty() {
            continue;
        }
        let bss = partition.bs_in(m);
        if users.len() > bss.len() {
            overloaded.push(m);
            continue;
        }
        let h = DMatrix::from_fn(users.len(), bss.len(), |a, b| channel[(users[a], bss[b])]);
        let Some(precoder) = pseudo_inverse_right(&h) else {
            singular.push(m);
            continue;
        };
        let effective = &h * &precoder;
        let per_user_power = bss.len() as f64 * r / users.len() as f64;
        for (a, &k) in users.iter().enumerate() {
            let intended = effective[(a, a)].norm();
            for b in (0..users.len()).filter(|&b| b != a) {
                max_crosstalk = max_crosstalk.max(effective[(b, a)].norm() / intended);
            }
            let beam_norm_sq = precoder.column(a).norm_squared();
            let signal = per_user_power * intended * intended / beam_norm_sq;
            let interference: f64 = partition
                .vertex_labels()
                .iter()
                .enumerate()
                .filter(|&(_, &label)| label != m)
                .map(|(l, _)| gains_faded.get(k, l))
                .sum();
            rates[k] = user_rate(signal / (r * interference + 1.0));
        }
    }
    Ok(ZfbfOutcome {
        sum_rate: rates.iter().sum(),
        per_user_rates: rates,
        max_crosstalk,
        overloaded,
        singular,
    })
}

/// `H^H (H H^H)^-1`, or `None` when `H` is numerically rank deficient.
fn pseudo_inverse_right(h: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let sv = h.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if !(max > 0.0) || min < RANK_TOL * max {
        return None;
    }
    let hh = h.adjoint();
    let gram = h * &hh;
    let inv = gram.cholesky()?.inverse();
    Some(hh * inv)
}

/// Bundles the KPIs of one instant.
pub fn record_step(
    time_index: usize,
    gains: &ChannelGains,
    gains_prev: Option<&ChannelGains>,
    partition_prev: Option<&Partition>,
    partition: &Partition,
    zfbf: Option<(&ChannelGains, &DMatrix<Complex64>)>,
    params: &RadioParams,
) -> Result<MetricsRecord> {
    let per_user = per_user_rates(gains, partition, params)?;
    let temporal_smoothness = gains_prev
        .map(|g| temporal_smoothness(g, partition, params))
        .transpose()?;
    let handovers = partition_prev.map(|p| handover_count(p, partition)).transpose()?;
    let zfbf_sum_rate = zfbf
        .map(|(g, h)| zfbf_sum_rate(g, h, partition, params).map(|o| o.sum_rate))
        .transpose()?;
    Ok(MetricsRecord {
        time_index,
        sum_rate: per_user.iter().sum(),
        temporal_smoothness,
        handovers,
        zfbf_sum_rate,
        per_user_rates: per_user,
    })
}
