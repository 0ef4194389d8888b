//! Parametric studies: constants versus `D_rel` at fixed `d_rel` and `nu`,
//! onset of auxeticity, and surrogate error versus training-set size.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::elasticity::{BaseMaterial, Regime};
use crate::error::{Error, Result};
use crate::fft::{homogenize_with, HomogenizeOptions, Method};
use crate::forest::{fit_forest, Forest, Hyperparams, Surrogate, Target};
use crate::geometry::{UnitCellSpec, VoidShape};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Evaluator {
    Fft,
    Surrogate,
    Both,
}

impl Evaluator {
    pub fn name(self) -> &'static str {
        match self {
            Evaluator::Fft => "fft",
            Evaluator::Surrogate => "surrogate",
            Evaluator::Both => "both",
        }
    }

    fn includes(self, other: Evaluator) -> bool {
        self == Evaluator::Both || self == other
    }
}

impl std::fmt::Display for Evaluator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Evaluator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fft" => Ok(Evaluator::Fft),
            "surrogate" => Ok(Evaluator::Surrogate),
            "both" => Ok(Evaluator::Both),
            other => Err(Error::invalid(format!("unknown evaluator {other:?} (expected fft, surrogate or both)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub shape: VoidShape,
    pub d_rel: f64,
    pub nu: f64,
    pub big_d_min: f64,
    pub big_d_max: f64,
    pub step: f64,
    pub evaluator: Evaluator,
}

impl SweepSpec {
    pub fn new(shape: VoidShape, evaluator: Evaluator) -> Self {
        SweepSpec {
            shape,
            d_rel: 0.05,
            nu: 0.3,
            big_d_min: 0.05,
            big_d_max: 0.9,
            step: 0.01,
            evaluator,
        }
    }

    pub fn validate(&self) -> Result<()> {
        BaseMaterial::new(1.0, self.nu)?;
        if !(self.step > 0.0) || !self.big_d_min.is_finite() || !self.big_d_max.is_finite() {
            return Err(Error::invalid("sweep step must be positive and the range finite"));
        }
        if self.big_d_min < 0.0 || self.big_d_max < self.big_d_min {
            return Err(Error::invalid(format!(
                "bad D_rel range [{}, {}]",
                self.big_d_min, self.big_d_max
            )));
        }
        if self.d_rel < 0.0 || self.d_rel + self.big_d_max >= 1.0 {
            return Err(Error::invalid(format!(
                "d_rel = {} with D_rel up to {} violates d_rel + D_rel < 1",
                self.d_rel, self.big_d_max
            )));
        }
        Ok(())
    }

    /// The tabulated `D_rel` values, rounded to whole multiples of the step
    /// offset from the start so they print cleanly.
    pub fn big_d_values(&self) -> Vec<f64> {
        let count = ((self.big_d_max - self.big_d_min) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| {
                let v = self.big_d_min + k as f64 * self.step;
                (v * 1e10).round() / 1e10
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    #[serde(rename = "D_rel")]
    pub big_d_rel: f64,
    pub c11_over_e: f64,
    pub c12_over_e: f64,
    pub c33_over_e: f64,
    pub nu_eff: f64,
    /// `fft` or `surrogate`.
    pub evaluator: Evaluator,
    /// Why the row has no values, if it failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SweepRow {
    fn from_constants(big_d_rel: f64, c: [f64; 3], evaluator: Evaluator) -> SweepRow {
        SweepRow {
            big_d_rel,
            c11_over_e: c[0],
            c12_over_e: c[1],
            c33_over_e: c[2],
            nu_eff: c[1] / c[0],
            evaluator,
            error: None,
        }
    }

    fn failed(big_d_rel: f64, evaluator: Evaluator, error: String) -> SweepRow {
        SweepRow {
            big_d_rel,
            c11_over_e: f64::NAN,
            c12_over_e: f64::NAN,
            c33_over_e: f64::NAN,
            nu_eff: f64::NAN,
            evaluator,
            error: Some(error),
        }
    }

    pub fn constants(&self) -> [f64; 3] {
        [self.c11_over_e, self.c12_over_e, self.c33_over_e]
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub spec: SweepSpec,
    /// FFT rows first, then surrogate rows, each in ascending `D_rel`.
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_CSV_HEADER: &str = "D_rel,c11_over_E,c12_over_E,c33_over_E,nu_eff,evaluator";

impl SweepTable {
    pub fn series(&self, evaluator: Evaluator) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.evaluator == evaluator).collect()
    }

    pub fn failures(&self) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| !r.is_ok()).collect()
    }

    pub fn onset(&self, evaluator: Evaluator) -> Result<f64> {
        let s: Vec<(f64, f64)> = self
            .series(evaluator)
            .into_iter()
            .map(|r| (r.big_d_rel, r.nu_eff))
            .collect();
        onset(&s)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{SWEEP_CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                r.big_d_rel, r.c11_over_e, r.c12_over_e, r.c33_over_e, r.nu_eff, r.evaluator
            )?;
        }
        Ok(())
    }
}

/// Options of the FFT evaluator in a sweep.
pub fn sweep_homogenize_options(grid_n: usize, tol: f64) -> HomogenizeOptions {
    HomogenizeOptions {
        n: grid_n,
        tol,
        method: Method::Sensitivity,
        regime: Regime::PlaneStrain,
        ..HomogenizeOptions::default()
    }
}

/// Evaluate the sweep with the requested evaluators. Solver failures are
/// kept as rows with an error message.
pub fn run_sweep(spec: &SweepSpec, opts: &HomogenizeOptions, surrogate: Option<&Surrogate>) -> Result<SweepTable> {
    spec.validate()?;
    let values = spec.big_d_values();
    let mut rows = Vec::new();

    if spec.evaluator.includes(Evaluator::Fft) {
        let spectral = opts.spectral()?;
        let material = BaseMaterial::new(1.0, spec.nu)?;
        rows.extend(par::map_slice(&values, |&big_d| {
            let out = UnitCellSpec::new(spec.shape, spec.d_rel, big_d, material)
                .and_then(|cell| homogenize_with(&spectral, &cell, opts));
            match out {
                Ok((c, _)) => SweepRow::from_constants(big_d, [c.c11, c.c12, c.c33], Evaluator::Fft),
                Err(e) => {
                    log::warn!("sweep point D_rel = {big_d} failed: {e}");
                    SweepRow::failed(big_d, Evaluator::Fft, e.to_string())
                }
            }
        }));
    }
    if spec.evaluator.includes(Evaluator::Surrogate) {
        let s = surrogate.ok_or_else(|| Error::invalid("the surrogate evaluator needs trained models"))?;
        if s.shape != spec.shape {
            return Err(Error::invalid(format!("models are for {}, sweep is for {}", s.shape, spec.shape)));
        }
        rows.extend(
            values
                .iter()
                .map(|&big_d| SweepRow::from_constants(big_d, s.predict(spec.d_rel, big_d, spec.nu), Evaluator::Surrogate)),
        );
    }
    Ok(SweepTable { spec: *spec, rows })
}

/// Smallest tabulated `D_rel` at which `nu_eff` turns from positive to
/// `<= 0`. Rows with a non-finite `nu_eff` are skipped.
pub fn onset(series: &[(f64, f64)]) -> Result<f64> {
    if series.windows(2).any(|w| w[1].0 < w[0].0) {
        return Err(Error::invalid("sweep table must be sorted by D_rel"));
    }
    let finite: Vec<(f64, f64)> = series.iter().copied().filter(|(_, nu)| nu.is_finite()).collect();
    finite
        .windows(2)
        .find(|w| w[0].1 > 0.0 && w[1].1 <= 0.0)
        .map(|w| w[1].0)
        .ok_or(Error::NoOnset)
}

/// Five-number summary with whiskers at the most extreme data within
/// 1.5 IQR of the quartiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    pub min: f64,
    pub max: f64,
    pub outliers: usize,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn box_stats(values: &[f64]) -> Result<BoxStats> {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return Err(Error::invalid("no finite values to summarize"));
    }
    v.sort_by(f64::total_cmp);
    let (q1, median, q3) = (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75));
    let iqr = q3 - q1;
    let (lo_fence, hi_fence) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let inside: Vec<f64> = v.iter().copied().filter(|&x| x >= lo_fence && x <= hi_fence).collect();
    Ok(BoxStats {
        median,
        q1,
        q3,
        // an interpolated quartile can lie past every datum inside the fence
        whisker_low: inside.first().map_or(q1, |&x| x.min(q1)),
        whisker_high: inside.last().map_or(q3, |&x| x.max(q3)),
        min: v[0],
        max: v[v.len() - 1],
        outliers: v.len() - inside.len(),
    })
}

/// Dataset sizes of the size study at full scale.
pub const PAPER_SIZES: [usize; 5] = [3_000, 6_000, 12_000, 24_000, 48_000];
pub const DESK_FACTOR: usize = 16;

/// `PAPER_SIZES` divided by `factor`, rounded up.
pub fn study_sizes(factor: usize) -> Vec<usize> {
    PAPER_SIZES.iter().map(|s| s.div_ceil(factor.max(1))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeStudyRow {
    pub size: usize,
    pub stats: BoxStats,
    /// Relative error at every sweep point, in sweep order.
    pub relative_errors: Vec<f64>,
}

/// Train one forest per dataset and compare its predictions along the
/// sweep with FFT reference values.
pub fn size_study(
    datasets: &[Dataset],
    reference: &SweepTable,
    target: Target,
    hp: &Hyperparams,
) -> Result<Vec<SizeStudyRow>> {
    let spec = reference.spec;
    let truth: Vec<&SweepRow> = reference.series(Evaluator::Fft).into_iter().filter(|r| r.is_ok()).collect();
    if truth.is_empty() {
        return Err(Error::invalid("reference sweep has no FFT rows"));
    }
    let mut out = Vec::with_capacity(datasets.len());
    for ds in datasets {
        if ds.meta.shape != spec.shape {
            return Err(Error::invalid(format!(
                "dataset is for {}, sweep is for {}",
                ds.meta.shape, spec.shape
            )));
        }
        let model: Forest = fit_forest(ds, target, hp)?;
        let relative_errors: Vec<f64> = truth
            .iter()
            .map(|r| {
                let exact = r.constants()[target.index()];
                let pred = model.predict(spec.d_rel, r.big_d_rel, spec.nu);
                ((pred - exact) / exact).abs()
            })
            .collect();
        out.push(SizeStudyRow {
            size: ds.len(),
            stats: box_stats(&relative_errors)?,
            relative_errors,
        });
    }
    Ok(out)
}

/// Number of adjacent pairs whose median error does not decrease.
pub fn median_inversions(rows: &[SizeStudyRow]) -> usize {
    rows.windows(2).filter(|w| w[1].stats.median >= w[0].stats.median).count()
}
