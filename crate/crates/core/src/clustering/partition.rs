use std::collections::BTreeSet;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Assignment of the BS-anchored vertices to subnetworks.
///
/// Users follow their anchor vertex: user `k` belongs to the subnetwork of
/// vertex `anchor(k)` and is served by every BS of that subnetwork.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    num_subnetworks: usize,
    anchors: Vec<usize>,
}

impl Partition {
    /// Fails unless every label is below `num_subnetworks`, every
    /// subnetwork holds at least one BS and every anchor names a vertex.
    pub fn new(labels: Vec<usize>, num_subnetworks: usize, anchors: Vec<usize>) -> Result<Self> {
        let p = Partition {
            labels,
            num_subnetworks,
            anchors,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.labels.len();
        if self.num_subnetworks == 0 || self.num_subnetworks > l {
            return Err(Error::Config(format!(
                "{} subnetworks over {l} BSs",
                self.num_subnetworks
            )));
        }
        let mut sizes = vec![0usize; self.num_subnetworks];
        for (i, &label) in self.labels.iter().enumerate() {
            if label >= self.num_subnetworks {
                return Err(Error::Config(format!("vertex {i} has label {label} out of range")));
            }
            sizes[label] += 1;
        }
        if let Some(m) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::Config(format!("subnetwork {m} has no BS")));
        }
        if let Some(k) = self.anchors.iter().position(|&a| a >= l) {
            return Err(Error::Config(format!("user {k} anchored to missing vertex")));
        }
        Ok(())
    }

    pub fn vertex_labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn num_subnetworks(&self) -> usize {
        self.num_subnetworks
    }

    pub fn num_bs(&self) -> usize {
        self.labels.len()
    }

    pub fn num_users(&self) -> usize {
        self.anchors.len()
    }

    pub fn anchors(&self) -> &[usize] {
        &self.anchors
    }

    pub fn user_subnetwork(&self, user: usize) -> Option<usize> {
        self.anchors.get(user).map(|&a| self.labels[a])
    }

    pub fn user_assignment(&self) -> Vec<usize> {
        self.anchors.iter().map(|&a| self.labels[a]).collect()
    }

    pub fn bs_in(&self, subnetwork: usize) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&l| self.labels[l] == subnetwork)
            .collect()
    }

    pub fn users_in(&self, subnetwork: usize) -> Vec<usize> {
        (0..self.anchors.len())
            .filter(|&k| self.labels[self.anchors[k]] == subnetwork)
            .collect()
    }

    /// Every (user, BS) service pair.
    pub fn connections(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for (k, &a) in self.anchors.iter().enumerate() {
            let m = self.labels[a];
            for (l, &label) in self.labels.iter().enumerate() {
                if label == m {
                    out.insert((k, l));
                }
            }
        }
        out
    }

    /// L x M 0/1 matrix with `z[i][m] = 1` iff vertex `i` is in subnetwork `m`.
    pub fn indicator(&self) -> DMatrix<f64> {
        indicator_matrix(&self.labels, self.num_subnetworks)
    }

    /// Same vertex labels with users attached to different anchor vertices.
    pub fn with_anchors(&self, anchors: Vec<usize>) -> Result<Self> {
        Partition::new(self.labels.clone(), self.num_subnetworks, anchors)
    }

    /// Labels renumbered in order of first appearance.
    pub fn canonical_labels(&self) -> Vec<usize> {
        canonicalize(&self.labels)
    }
}

pub fn indicator_matrix(labels: &[usize], num_groups: usize) -> DMatrix<f64> {
    DMatrix::from_fn(labels.len(), num_groups, |i, m| {
        if labels[i] == m {
            1.0
        } else {
            0.0
        }
    })
}

/// Relabels so the first vertex gets 0, the first vertex outside its group
/// gets 1 and so on (a restricted growth string).
pub fn canonicalize(labels: &[usize]) -> Vec<usize> {
    let mut map: Vec<Option<usize>> = vec![None; labels.iter().max().map_or(0, |m| m + 1)];
    let mut next = 0;
    labels
        .iter()
        .map(|&l| {
            *map[l].get_or_insert_with(|| {
                next += 1;
                next - 1
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Partition::new(vec![0, 1, 1], 2, vec![0, 2]).is_ok());
        assert!(Partition::new(vec![0, 0, 0], 2, vec![]).is_err());
        assert!(Partition::new(vec![0, 2, 1], 2, vec![]).is_err());
        assert!(Partition::new(vec![0, 1], 2, vec![2]).is_err());
        assert!(Partition::new(vec![0], 0, vec![]).is_err());
    }

    #[test]
    fn derived_sets() {
        let p = Partition::new(vec![1, 0, 1], 2, vec![0, 1, 2]).unwrap();
        assert_eq!(p.user_assignment(), vec![1, 0, 1]);
        assert_eq!(p.bs_in(1), vec![0, 2]);
        assert_eq!(p.users_in(1), vec![0, 2]);
        let c: Vec<_> = p.connections().into_iter().collect();
        assert_eq!(c, vec![(0, 0), (0, 2), (1, 1), (2, 0), (2, 2)]);
        assert_eq!(p.canonical_labels(), vec![0, 1, 0]);
    }

    #[test]
    fn indicator_columns() {
        let z = indicator_matrix(&[0, 1, 0], 2);
        assert_eq!(z, DMatrix::from_row_slice(3, 2, &[1., 0., 0., 1., 1., 0.]));
    }
}
