//! Error norms and oscillation counts of difference fields.

use super::RunOutcome;
use crate::scheme::Diagnostics;
use crate::vars::Vars;

/// Second differences at most this fraction of the largest one are
/// treated as flat when counting sign changes.
pub const FLAT_FRACTION: f64 = 1e-3;

/// Number of sign changes of the discrete second difference, ignoring
/// second differences below `FLAT_FRACTION` of the largest.
pub fn oscillation_count(f: &[f64]) -> usize {
    if f.len() < 3 {
        return 0;
    }
    let d2: Vec<f64> = f.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect();
    let peak = d2.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return 0;
    }
    let mut last = 0.0_f64;
    let mut count = 0;
    for v in d2.into_iter().filter(|v| v.abs() > FLAT_FRACTION * peak) {
        if last != 0.0 && v.signum() != last.signum() {
            count += 1;
        }
        last = v;
    }
    count
}

pub fn total_variation(f: &[f64]) -> f64 {
    f.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentMetrics {
    pub name: String,
    pub linf: f64,
    pub l1: f64,
    pub total_variation: f64,
    pub oscillations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsReport {
    pub components: Vec<ComponentMetrics>,
    pub runtime_seconds: f64,
    pub steps: usize,
    pub diagnostics: Diagnostics,
}

impl MetricsReport {
    /// Metrics of an interior field stored row-major with `x` fastest. In
    /// two dimensions variation and oscillations are summed over all rows
    /// and columns.
    pub fn new(
        field: &[Vars],
        names: &[&str],
        (nx, ny): (usize, usize),
        cell_volume: f64,
        outcome: &RunOutcome,
        diagnostics: &Diagnostics,
    ) -> Self {
        let components = names
            .iter()
            .enumerate()
            .map(|(c, name)| {
                let v: Vec<f64> = field.iter().map(|u| u[c]).collect();
                let mut tv = 0.0;
                let mut osc = 0;
                for k in 0..ny {
                    let row = &v[k * nx..(k + 1) * nx];
                    tv += total_variation(row);
                    osc += oscillation_count(row);
                }
                if ny > 1 {
                    for j in 0..nx {
                        let col: Vec<f64> = (0..ny).map(|k| v[j + nx * k]).collect();
                        tv += total_variation(&col);
                        osc += oscillation_count(&col);
                    }
                }
                ComponentMetrics {
                    name: name.to_string(),
                    linf: v.iter().fold(0.0, |m, x| m.max(x.abs())),
                    l1: v.iter().map(|x| x.abs()).sum::<f64>() * cell_volume,
                    total_variation: tv,
                    oscillations: osc,
                }
            })
            .collect();
        MetricsReport {
            components,
            runtime_seconds: outcome.runtime_seconds,
            steps: outcome.summary.steps,
            diagnostics: diagnostics.clone(),
        }
    }

    pub fn oscillations(&self) -> usize {
        self.components.iter().map(|c| c.oscillations).sum()
    }

    pub fn component(&self, name: &str) -> Option<&ComponentMetrics> {
        self.components.iter().find(|c| c.name == name)
    }
}
