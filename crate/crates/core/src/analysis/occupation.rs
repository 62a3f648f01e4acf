use serde::{Deserialize, Serialize};

use crate::model::Species;
use crate::sde::Trajectory;

/// Fraction of recorded time steps spent in each cell of a uniform grid
/// over `[0, max I] × [0, max U]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupationHistogram {
    pub infected_edges: Vec<f64>,
    pub uninfected_edges: Vec<f64>,
    /// Row-major: `weights[i_bin * n_u + u_bin]`.
    pub weights: Vec<f64>,
}

impl OccupationHistogram {
    pub fn bins(&self) -> (usize, usize) {
        (
            self.infected_edges.len() - 1,
            self.uninfected_edges.len() - 1,
        )
    }

    pub fn weight(&self, i_bin: usize, u_bin: usize) -> f64 {
        self.weights[i_bin * self.bins().1 + u_bin]
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn edges(&self, species: Species) -> &[f64] {
        match species {
            Species::Infected => &self.infected_edges,
            Species::Uninfected => &self.uninfected_edges,
        }
    }

    pub fn marginal(&self, species: Species) -> Vec<f64> {
        let (ni, nu) = self.bins();
        match species {
            Species::Infected => (0..ni)
                .map(|a| self.weights[a * nu..(a + 1) * nu].iter().sum())
                .collect(),
            Species::Uninfected => (0..nu)
                .map(|b| (0..ni).map(|a| self.weights[a * nu + b]).sum())
                .collect(),
        }
    }

    /// First moment of a marginal using bin midpoints.
    pub fn marginal_mean(&self, species: Species) -> f64 {
        let edges = self.edges(species);
        self.marginal(species)
            .iter()
            .enumerate()
            .map(|(k, w)| w * 0.5 * (edges[k] + edges[k + 1]))
            .sum()
    }

    pub fn bin_width(&self, species: Species) -> f64 {
        let edges = self.edges(species);
        edges[1] - edges[0]
    }

    /// Mass of the lowest bin of a marginal.
    pub fn lowest_bin_mass(&self, species: Species) -> f64 {
        self.marginal(species)[0]
    }

    /// Nonzero cells as `(i_lo, i_hi, u_lo, u_hi, weight)`.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64, f64, f64)> + '_ {
        let nu = self.bins().1;
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(move |(idx, &w)| {
                let (a, b) = (idx / nu, idx % nu);
                (
                    self.infected_edges[a],
                    self.infected_edges[a + 1],
                    self.uninfected_edges[b],
                    self.uninfected_edges[b + 1],
                    w,
                )
            })
    }
}

fn uniform_edges(max: f64, bins: usize) -> Vec<f64> {
    // a degenerate range (all values 0) still needs a positive width
    let upper = if max > 0.0 { max } else { 1.0 };
    (0..=bins)
        .map(|k| {
            if k == bins {
                upper
            } else {
                upper * k as f64 / bins as f64
            }
        })
        .collect()
}

fn bin_of(value: f64, max: f64, bins: usize) -> usize {
    if max <= 0.0 {
        return 0;
    }
    ((value / max * bins as f64) as usize).min(bins - 1)
}

/// Normalized 2D histogram of every recorded state of `traj`.
///
/// Apply burn-in beforehand with [`Trajectory::after`].
///
/// # Panics
/// If either bin count is zero.
pub fn occupation_measure(traj: &Trajectory, bins: (usize, usize)) -> OccupationHistogram {
    let (ni, nu) = bins;
    assert!(ni > 0 && nu > 0, "bin counts must be positive");
    let max_i = traj.infected().iter().copied().fold(0.0, f64::max);
    let max_u = traj.uninfected().iter().copied().fold(0.0, f64::max);
    let mut counts = vec![0u64; ni * nu];
    for (&i, &u) in traj.infected().iter().zip(traj.uninfected()) {
        counts[bin_of(i, max_i, ni) * nu + bin_of(u, max_u, nu)] += 1;
    }
    let n = traj.len() as f64;
    OccupationHistogram {
        infected_edges: uniform_edges(max_i, ni),
        uninfected_edges: uniform_edges(max_u, nu),
        weights: counts.into_iter().map(|c| c as f64 / n).collect(),
    }
}
