use serde::{Deserialize, Serialize};

use super::{SeedLineage, SimConfig};
use crate::model::{ModelParams, Species, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    Full,
    BoundaryI,
    BoundaryU,
}

/// A recorded sample path on the uniform grid `0, stride·Δ, 2·stride·Δ, …`.
///
/// Boundary paths keep the simulated species in its own column and zeros in
/// the other.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub lineage: SeedLineage,
    pub config: SimConfig,
    pub params: ModelParams,
    pub(crate) times: Vec<f64>,
    pub(crate) infected: Vec<f64>,
    pub(crate) uninfected: Vec<f64>,
    /// State after the last integration step, recorded or not.
    pub final_state: State,
    pub steps: u64,
}

impl Trajectory {
    /// Assembles a trajectory from raw columns, e.g. synthetic data or a CSV
    /// read back from disk.
    ///
    /// # Panics
    /// If the columns have different lengths or are empty.
    pub fn from_columns(
        times: Vec<f64>,
        infected: Vec<f64>,
        uninfected: Vec<f64>,
        config: SimConfig,
        params: ModelParams,
    ) -> Self {
        assert!(!times.is_empty(), "trajectory needs at least one point");
        assert_eq!(times.len(), infected.len());
        assert_eq!(times.len(), uninfected.len());
        let last = times.len() - 1;
        let final_state = State::new(infected[last], uninfected[last]);
        Trajectory {
            kind: TrajectoryKind::Full,
            lineage: SeedLineage::new(config.seed, config.path_index),
            config,
            params,
            times,
            infected,
            uninfected,
            final_state,
            steps: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn infected(&self) -> &[f64] {
        &self.infected
    }

    pub fn uninfected(&self) -> &[f64] {
        &self.uninfected
    }

    pub fn values(&self, species: Species) -> &[f64] {
        match species {
            Species::Infected => &self.infected,
            Species::Uninfected => &self.uninfected,
        }
    }

    pub fn state(&self, index: usize) -> State {
        State::new(self.infected[index], self.uninfected[index])
    }

    pub fn end_time(&self) -> f64 {
        *self.times.last().expect("nonempty trajectory")
    }

    /// First recorded index with time `>= t`, or `len()` if none.
    pub fn index_at_or_after(&self, t: f64) -> usize {
        self.times.partition_point(|&s| s < t)
    }

    /// Recorded index whose time is closest to `t`.
    pub fn nearest_index(&self, t: f64) -> usize {
        let k = self.index_at_or_after(t);
        if k == 0 {
            0
        } else if k == self.len() {
            k - 1
        } else if (self.times[k] - t) < (t - self.times[k - 1]) {
            k
        } else {
            k - 1
        }
    }

    /// Copy of the recorded points with time `>= t`.
    pub fn after(&self, t: f64) -> Trajectory {
        let k = self.index_at_or_after(t).min(self.len() - 1);
        Trajectory {
            times: self.times[k..].to_vec(),
            infected: self.infected[k..].to_vec(),
            uninfected: self.uninfected[k..].to_vec(),
            ..self.clone()
        }
    }

    /// Every recorded value is finite and nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.infected
            .iter()
            .chain(&self.uninfected)
            .all(|v| v.is_finite() && *v >= 0.0)
    }

    /// Once a recorded component is exactly 0 it stays 0.
    pub fn respects_absorption(&self) -> bool {
        Species::BOTH.iter().all(|&s| {
            let values = self.values(s);
            match values.iter().position(|&v| v == 0.0) {
                Some(first) => values[first..].iter().all(|&v| v == 0.0),
                None => true,
            }
        })
    }
}
