use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Knobs of the Best Trail search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Score-proportional selection iterations per tree.
    pub explore_iterations: usize,
    /// Rank-based selection iterations per tree.
    pub converge_iterations: usize,
    /// Trees grown per starting point.
    pub repetitions: usize,
    /// Discrimination factor in `[0, 1)`; 0 means plain best-first.
    pub discrimination: f64,
    /// Position discount in `(0, 1)`.
    pub gamma: f64,
    /// Repeat-content discount in `(0, 1]`.
    pub delta: f64,
    /// Constant added to the trail length under sum distinct.
    pub sum_distinct_constant: f64,
    /// Maximal trail length.
    pub depth_cap: usize,
    pub seed: u64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            explore_iterations: 50,
            converge_iterations: 50,
            repetitions: 1,
            discrimination: 0.5,
            gamma: 0.75,
            delta: 0.5,
            sum_distinct_constant: 1.0,
            depth_cap: 8,
            seed: 0,
        }
    }
}

impl Params {
    pub fn validate(&self) -> Result<()> {
        if self.repetitions < 1 {
            return Err(Error::param("m", "must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.discrimination) {
            return Err(Error::param("df", "must lie in [0, 1)"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::param("gamma", "must lie in (0, 1)"));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::param("delta", "must lie in (0, 1]"));
        }
        if !(self.sum_distinct_constant >= 0.0 && self.sum_distinct_constant.is_finite()) {
            return Err(Error::param("c", "must be a finite value >= 0"));
        }
        if self.depth_cap < 1 {
            return Err(Error::param("depth_cap", "must be at least 1"));
        }
        Ok(())
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }
}
