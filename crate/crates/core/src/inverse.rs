//! Brute-force inverse design: evaluate the surrogates on a uniform lattice
//! over the feasible `(d_rel, D_rel)` triangle and keep the point whose
//! predictions best match the requested constants.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::elasticity::BaseMaterial;
use crate::error::{Error, Result};
use crate::forest::Surrogate;
use crate::par;

pub const DEFAULT_EVALUATIONS: usize = 20_000;
pub const DEFAULT_THRESHOLD: f64 = 1e-6;
/// Distance kept from the `d_rel + D_rel = 1` boundary.
pub const DEFAULT_MARGIN: f64 = 0.01;

/// Desired `(C11, C12, C33) / E`; absent components carry zero weight.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InverseTarget {
    pub c11: Option<f64>,
    pub c12: Option<f64>,
    pub c33: Option<f64>,
}

impl InverseTarget {
    pub fn normalized(c11: Option<f64>, c12: Option<f64>, c33: Option<f64>) -> Result<Self> {
        let t = InverseTarget { c11, c12, c33 };
        t.validate()?;
        Ok(t)
    }

    /// Targets given in stress units, divided by the material's modulus.
    pub fn from_stress(c11: Option<f64>, c12: Option<f64>, c33: Option<f64>, material: &BaseMaterial) -> Result<Self> {
        material.validate()?;
        let e = material.youngs_modulus;
        Self::normalized(c11.map(|v| v / e), c12.map(|v| v / e), c33.map(|v| v / e))
    }

    pub fn values(&self) -> [Option<f64>; 3] {
        [self.c11, self.c12, self.c33]
    }

    pub fn weights(&self) -> [f64; 3] {
        self.values().map(|v| if v.is_some() { 1.0 } else { 0.0 })
    }

    pub fn count(&self) -> usize {
        self.values().iter().flatten().count()
    }

    pub fn validate(&self) -> Result<()> {
        if self.count() == 0 {
            return Err(Error::invalid("at least one target constant is required"));
        }
        if self.values().iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::invalid("target constants must be finite"));
        }
        Ok(())
    }
}

/// Mean squared mismatch over the specified components.
pub fn inverse_loss(prediction: [f64; 3], target: &InverseTarget) -> f64 {
    let mut acc = 0.0;
    for (y, y_hat) in prediction.iter().zip(target.values()) {
        if let Some(y_hat) = y_hat {
            acc += (y - y_hat) * (y - y_hat);
        }
    }
    acc / target.count() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseOptions {
    /// Approximate number of lattice points to evaluate.
    pub eval_count: usize,
    pub threshold: f64,
    pub margin: f64,
}

impl Default for InverseOptions {
    fn default() -> Self {
        InverseOptions {
            eval_count: DEFAULT_EVALUATIONS,
            threshold: DEFAULT_THRESHOLD,
            margin: DEFAULT_MARGIN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseResult {
    pub d_rel: f64,
    #[serde(rename = "D_rel")]
    pub big_d_rel: f64,
    pub loss: f64,
    pub evaluations: usize,
    pub elapsed_s: f64,
    pub feasible: bool,
}

impl InverseResult {
    /// Equality of everything but the timing.
    pub fn same_outcome(&self, other: &InverseResult) -> bool {
        self.d_rel.to_bits() == other.d_rel.to_bits()
            && self.big_d_rel.to_bits() == other.big_d_rel.to_bits()
            && self.loss.to_bits() == other.loss.to_bits()
            && self.evaluations == other.evaluations
            && self.feasible == other.feasible
    }
}

/// Lattice of the search: points `(i h, j h)` with `i + j < m` and
/// `h = (1 - margin) / m`. Doubling `m` halves the pitch and keeps every
/// previous point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchGrid {
    pub m: usize,
    pub pitch: f64,
}

impl SearchGrid {
    /// The largest lattice with at most `eval_count` points (at least one).
    pub fn for_count(eval_count: usize, margin: f64) -> Result<Self> {
        if eval_count == 0 {
            return Err(Error::invalid("evaluation count must be at least 1"));
        }
        if !(0.0..1.0).contains(&margin) {
            return Err(Error::invalid("margin must lie in [0, 1)"));
        }
        let mut m = ((2.0 * eval_count as f64).sqrt() as usize).max(1);
        while m * (m + 1) / 2 > eval_count {
            m -= 1;
        }
        while (m + 1) * (m + 2) / 2 <= eval_count {
            m += 1;
        }
        let m = m.max(1);
        Ok(SearchGrid {
            m,
            pitch: (1.0 - margin) / m as f64,
        })
    }

    pub fn len(&self) -> usize {
        self.m * (self.m + 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Point `(i, j)` with `i + j < m`.
    pub fn point(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.pitch, j as f64 * self.pitch)
    }
}

/// Search with an arbitrary forward model `f(d_rel, D_rel) -> (C11, C12, C33) / E`.
pub fn brute_force_with<F>(f: F, target: &InverseTarget, opts: &InverseOptions) -> Result<InverseResult>
where
    F: Fn(f64, f64) -> [f64; 3] + Sync + Send,
{
    target.validate()?;
    let start = Instant::now();
    let grid = SearchGrid::for_count(opts.eval_count, opts.margin)?;

    // best per row of fixed i, then a sequential reduction in row order
    let rows: Vec<(f64, usize)> = par::map_indexed(grid.m, |i| {
        let mut best = (f64::INFINITY, 0);
        for j in 0..grid.m - i {
            let (d, big_d) = grid.point(i, j);
            let loss = inverse_loss(f(d, big_d), target);
            if loss < best.0 {
                best = (loss, j);
            }
        }
        best
    });
    let mut best = (f64::INFINITY, 0, 0);
    for (i, &(loss, j)) in rows.iter().enumerate() {
        if loss < best.0 {
            best = (loss, i, j);
        }
    }
    let (loss, i, j) = best;
    if !loss.is_finite() {
        return Err(Error::Degenerate("inverse loss is not finite anywhere on the grid".into()));
    }
    let (d_rel, big_d_rel) = grid.point(i, j);
    Ok(InverseResult {
        d_rel,
        big_d_rel,
        loss,
        evaluations: grid.len(),
        elapsed_s: start.elapsed().as_secs_f64(),
        feasible: loss <= opts.threshold,
    })
}

/// Search the surrogate of one shape at fixed base-material `nu`.
pub fn brute_force(surrogate: &Surrogate, target: &InverseTarget, nu: f64, opts: &InverseOptions) -> Result<InverseResult> {
    BaseMaterial::new(1.0, nu)?;
    brute_force_with(|d, big_d| surrogate.predict(d, big_d, nu), target, opts)
}
