//! Trail scoring functions.

use std::fmt;
use std::ops::Index;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph_store::{ContentClasses, NodeId};
use crate::index::RelevanceVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoringFunction {
    /// Relevance of the distinct pages over `length + C`.
    SumDistinct,
    /// `sum_i mu(U_i) * gamma^(i-1)`
    Discounted,
    /// Discounted sum with an extra `delta` factor per earlier equal page.
    Weighted,
}

impl ScoringFunction {
    pub const ALL: [ScoringFunction; 3] = [
        ScoringFunction::SumDistinct,
        ScoringFunction::Discounted,
        ScoringFunction::Weighted,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScoringFunction::SumDistinct => "sum_distinct",
            ScoringFunction::Discounted => "discounted",
            ScoringFunction::Weighted => "weighted",
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for ScoringFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScoringFunction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ScoringFunction::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| format!("unknown scoring function {s:?}"))
    }
}

/// Constants shared by the scoring functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreParams {
    pub gamma: f64,
    pub delta: f64,
    pub constant: f64,
}

impl From<&super::Params> for ScoreParams {
    fn from(p: &super::Params) -> Self {
        ScoreParams {
            gamma: p.gamma,
            delta: p.delta,
            constant: p.sum_distinct_constant,
        }
    }
}

/// A trail's value under every scoring function.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TrailScores(pub [f64; 3]);

impl TrailScores {
    pub fn compute(
        trail: &[NodeId],
        relevance: &RelevanceVector,
        classes: &ContentClasses,
        params: ScoreParams,
    ) -> Self {
        TrailScores([
            score_sum_distinct(trail, relevance, classes, params.constant),
            score_discounted(trail, relevance, params.gamma),
            score_weighted(trail, relevance, params.gamma, params.delta, classes),
        ])
    }

    pub fn get(&self, f: ScoringFunction) -> f64 {
        self.0[f.slot()]
    }
}

impl Index<ScoringFunction> for TrailScores {
    type Output = f64;

    fn index(&self, f: ScoringFunction) -> &f64 {
        &self.0[f.slot()]
    }
}

/// Contribution of the page at 1-based `position` that has `repeats`
/// earlier equal-content pages on the trail.
#[inline]
pub(crate) fn weighted_term(mu: f64, position: usize, repeats: usize, gamma: f64, delta: f64) -> f64 {
    let mut term = mu * gamma.powi(position as i32 - 1);
    if repeats > 0 {
        term *= delta.powi(repeats as i32);
    }
    term
}

/// Sum of relevance over distinct content classes, divided by `n + C`.
pub fn score_sum_distinct(
    trail: &[NodeId],
    relevance: &RelevanceVector,
    classes: &ContentClasses,
    constant: f64,
) -> f64 {
    let mut distinct = 0.0;
    for (i, &page) in trail.iter().enumerate() {
        let class = classes.class_of(page);
        if !trail[..i].iter().any(|p| classes.class_of(*p) == class) {
            distinct += relevance.mu(page);
        }
    }
    distinct / (trail.len() as f64 + constant)
}

/// `sum_i mu(U_i) * gamma^(i-1)`
pub fn score_discounted(trail: &[NodeId], relevance: &RelevanceVector, gamma: f64) -> f64 {
    trail
        .iter()
        .enumerate()
        .map(|(i, &page)| weighted_term(relevance.mu(page), i + 1, 0, gamma, 1.0))
        .sum()
}

/// `sum_i mu(U_i) * gamma^(i-1) * delta^c(i)` where `c(i)` counts earlier
/// pages with the same content as `U_i`.
pub fn score_weighted(
    trail: &[NodeId],
    relevance: &RelevanceVector,
    gamma: f64,
    delta: f64,
    classes: &ContentClasses,
) -> f64 {
    trail
        .iter()
        .enumerate()
        .map(|(i, &page)| {
            let class = classes.class_of(page);
            let repeats = trail[..i].iter().filter(|p| classes.class_of(**p) == class).count();
            weighted_term(relevance.mu(page), i + 1, repeats, gamma, delta)
        })
        .sum()
}
