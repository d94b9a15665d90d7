//! Channel gains, best-BS selection and the approximate SINR / sum-rate model.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};

use crate::clustering::Partition;
use crate::error::{Error, Result};
use crate::format::sig9;
use crate::rng::rng_from_seed;
use crate::topology::Layout;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    /// Path-loss exponent.
    pub beta: f64,
    /// Transmit power over noise power, linear scale.
    pub pt_over_sigma2: f64,
    /// Distances below this are clamped before applying the path-loss law.
    pub d_min: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        RadioParams {
            beta: 4.0,
            pt_over_sigma2: 1.0,
            d_min: 0.01,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if finite_pos(self.beta) && finite_pos(self.pt_over_sigma2) && finite_pos(self.d_min) {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid radio parameters {self:?}")))
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// K x L matrix of squared channel magnitudes (row = user, column = BS).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelGains {
    pub gains: DMatrix<f64>,
    pub includes_fading: bool,
}

impl ChannelGains {
    pub fn new(gains: DMatrix<f64>, includes_fading: bool) -> Result<Self> {
        if gains.iter().any(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::Numerical("channel gains must be positive and finite".into()));
        }
        Ok(ChannelGains {
            gains,
            includes_fading,
        })
    }

    /// Builds from a row-major list of user rows.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let num_bs = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != num_bs) {
            return Err(Error::Dimension("ragged gain rows".into()));
        }
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        ChannelGains::new(DMatrix::from_row_slice(rows.len(), num_bs, &flat), false)
    }

    /// Squared magnitudes of a complex channel matrix.
    pub fn from_complex(channel: &DMatrix<Complex64>) -> Result<Self> {
        ChannelGains::new(channel.map(|h| h.norm_sqr()), true)
    }

    pub fn num_users(&self) -> usize {
        self.gains.nrows()
    }

    pub fn num_bs(&self) -> usize {
        self.gains.ncols()
    }

    pub fn get(&self, user: usize, bs: usize) -> f64 {
        self.gains[(user, bs)]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for k in 0..self.num_users() {
            let row: Vec<String> = (0..self.num_bs()).map(|l| sig9(self.get(k, l))).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

fn clamped_distance(layout: &Layout, user: usize, bs: usize, params: &RadioParams) -> f64 {
    layout.user_positions[user]
        .distance(&layout.bs_positions[bs])
        .max(params.d_min)
}

/// Complex channel `d^(-beta/2) * g` with `g ~ CN(0, 1)`, drawn row by row.
pub fn complex_channel(layout: &Layout, params: &RadioParams, fading_seed: u64) -> DMatrix<Complex64> {
    let mut rng = rng_from_seed(fading_seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let (users, bss) = (layout.num_users(), layout.num_bs());
    let mut h = DMatrix::from_element(users, bss, Complex64::new(0.0, 0.0));
    for k in 0..users {
        for l in 0..bss {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            let amplitude = clamped_distance(layout, k, l, params).powf(-params.beta / 2.0);
            h[(k, l)] = Complex64::new(re * scale, im * scale) * amplitude;
        }
    }
    h
}

/// Channel gains for a layout. Without a fading seed only path loss is
/// applied; with one, the result equals the squared magnitude of
/// [`complex_channel`] for the same seed.
pub fn channel_gains(layout: &Layout, params: &RadioParams, fading_seed: Option<u64>) -> ChannelGains {
    let gains = match fading_seed {
        None => DMatrix::from_fn(layout.num_users(), layout.num_bs(), |k, l| {
            clamped_distance(layout, k, l, params).powf(-params.beta)
        }),
        Some(seed) => complex_channel(layout, params, seed).map(|h| h.norm_sqr()),
    };
    ChannelGains {
        gains,
        includes_fading: fading_seed.is_some(),
    }
}

/// Index of the strongest BS for `user`; the lowest index wins ties.
pub fn best_bs(gains: &ChannelGains, user: usize) -> usize {
    let row = gains.gains.row(user);
    let mut best = 0;
    for (l, &g) in row.iter().enumerate().skip(1) {
        if g > row[best] {
            best = l;
        }
    }
    best
}

/// Approximate SINR of `user`: best-BS power over out-of-subnetwork
/// interference plus noise, with noise normalized to one.
pub fn sinr_approx(gains: &ChannelGains, partition: &Partition, user: usize, params: &RadioParams) -> Result<f64> {
    check_dims(gains, partition)?;
    let own = partition
        .user_subnetwork(user)
        .ok_or(Error::UnassignedUser(user))?;
    let r = params.pt_over_sigma2;
    let signal = r * gains.get(user, best_bs(gains, user));
    let interference: f64 = partition
        .vertex_labels()
        .iter()
        .enumerate()
        .filter(|&(_, &label)| label != own)
        .map(|(l, _)| gains.get(user, l))
        .sum();
    Ok(signal / (r * interference + 1.0))
}

pub fn user_rate(sinr: f64) -> f64 {
    (1.0 + sinr).log2()
}

pub fn per_user_rates(gains: &ChannelGains, partition: &Partition, params: &RadioParams) -> Result<Vec<f64>> {
    (0..gains.num_users())
        .map(|k| sinr_approx(gains, partition, k, params).map(user_rate))
        .collect()
}

/// Sum of approximate per-user rates. Scoring a time-t partition on the
/// time-(t-1) gains yields the temporal smoothness.
pub fn sum_rate(gains: &ChannelGains, partition: &Partition, params: &RadioParams) -> Result<f64> {
    Ok(per_user_rates(gains, partition, params)?.iter().sum())
}

pub(crate) fn check_dims(gains: &ChannelGains, partition: &Partition) -> Result<()> {
    if gains.num_users() != partition.num_users() || gains.num_bs() != partition.num_bs() {
        return Err(Error::Dimension(format!(
            "gains are {}x{}, partition covers {} users and {} BSs",
            gains.num_users(),
            gains.num_bs(),
            partition.num_users(),
            partition.num_bs()
        )));
    }
    Ok(())
}
