use serde::Serialize;

use crate::error::{invalid, Result};

/// Binned counts over strictly increasing edges. Bins are half-open
/// `[edge_i, edge_{i+1})` except the last, which also takes its upper edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
    underflow: u64,
    overflow: u64,
}

impl Histogram {
    pub fn from_edges(edges: Vec<f64>) -> Result<Self> {
        if edges.len() < 2 {
            return Err(invalid("edges", "need at least two bin edges"));
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("edges", "bin edges must be finite and strictly increasing"));
        }
        let n = edges.len() - 1;
        Ok(Self {
            edges,
            counts: vec![0; n],
            underflow: 0,
            overflow: 0,
        })
    }

    pub fn uniform(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if bins == 0 || !(lo < hi) {
            return Err(invalid("bins", format!("need bins > 0 and lo < hi, got {bins} over [{lo}, {hi}]")));
        }
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins)
            .map(|i| if i == bins { hi } else { lo + width * i as f64 })
            .collect();
        Self::from_edges(edges)
    }

    pub fn add(&mut self, value: f64) {
        let lo = self.edges[0];
        let hi = *self.edges.last().expect("at least two edges");
        if value.is_nan() || value < lo {
            self.underflow += 1;
        } else if value > hi {
            self.overflow += 1;
        } else {
            // last edge <= value for the upper-closed final bin
            let idx = self.edges.partition_point(|&e| e <= value).saturating_sub(1);
            let last = self.counts.len() - 1;
            self.counts[idx.min(last)] += 1;
        }
    }

    pub fn extend<I: IntoIterator<Item = f64>>(&mut self, values: I) {
        for v in values {
            self.add(v);
        }
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn underflow(&self) -> u64 {
        self.underflow
    }

    pub fn overflow(&self) -> u64 {
        self.overflow
    }

    /// All samples seen, including those outside the edges.
    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.underflow + self.overflow
    }

    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    pub fn bin(&self, i: usize) -> (f64, f64) {
        (self.edges[i], self.edges[i + 1])
    }

    /// Index of the bin containing `value`, if any.
    pub fn find(&self, value: f64) -> Option<usize> {
        let lo = self.edges[0];
        let hi = *self.edges.last()?;
        if !(lo..=hi).contains(&value) {
            return None;
        }
        Some(
            self.edges
                .partition_point(|&e| e <= value)
                .saturating_sub(1)
                .min(self.counts.len() - 1),
        )
    }

    /// Count per unit width, normalised by the total number of samples.
    pub fn density(&self, i: usize) -> f64 {
        let total = self.total();
        if total == 0 {
            return 0.0;
        }
        let (a, b) = self.bin(i);
        self.counts[i] as f64 / (total as f64 * (b - a))
    }
}
