//! Galerkin FFT homogenization on a periodic pixel grid.
//!
//! Equilibrium is posed on the fluctuation strain `eps~` as
//! `F^-1[G : F(D : eps~)] = -F^-1[G : F(D : eps_bar)]` with the projection
//! `G` built from rotated finite-difference frequencies, and solved with
//! matrix-free MINRES. Voids carry zero stiffness, so the operator is
//! singular; MINRES returns the minimum-norm fluctuation.

mod field;
mod frequency;
mod minres;
mod operator;
mod spectral;

pub use field::{MacroStrain, SpectralField, TensorField2, STRAIN_METRIC};
pub use frequency::{centered_index, native_index, rotated_frequency, wave_number, FrequencyGrid};
pub use minres::{minres, LinearOperator, MinresOptions, SolveReport};
pub use operator::{apply_operator, EquilibriumOperator, Microstructure};
pub use spectral::{Scheme, Spectral, Workspace};

use serde::{Deserialize, Serialize};

use crate::elasticity::{base_stiffness, EffectiveStiffness, Regime, VoigtMatrix3};
use crate::error::{Error, Result};
use crate::geometry::{rasterize, UnitCellSpec};

/// Magnitude of the macroscopic strain perturbation. Any value gives the
/// same stiffness in linear elasticity.
pub const PERTURBATION: f64 = 1.0;

pub const DEFAULT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Average stress under three unit macroscopic strains.
    Perturbation,
    /// Solve for the strain sensitivity and average `D : (I + d eps~/d eps_bar)`.
    #[default]
    Sensitivity,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "perturbation" => Ok(Method::Perturbation),
            "sensitivity" => Ok(Method::Sensitivity),
            other => Err(Error::invalid(format!(
                "unknown method {other:?} (expected perturbation or sensitivity)"
            ))),
        }
    }
}

/// Default iteration cap for a grid of side `n`.
pub fn default_max_iter(n: usize) -> usize {
    10 * n
}

/// Solve for the fluctuation strain under a macroscopic strain. The report
/// tells whether the tolerance was met; only non-finite values are errors.
pub fn solve_equilibrium(
    spectral: &Spectral,
    micro: &Microstructure,
    macro_strain: &MacroStrain,
    tol: f64,
    max_iter: usize,
) -> Result<(TensorField2, SolveReport)> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    if !macro_strain.is_finite() {
        return Err(Error::invalid("macroscopic strain must be finite"));
    }
    let mut op = EquilibriumOperator::new(spectral, micro);
    let b = op.rhs(macro_strain);
    let (x, report) = minres(&mut op, &b, MinresOptions { tol, max_iter })?;
    Ok((TensorField2::from_vec(micro.n(), x), report))
}

/// Volume average of `D(x) (eps_bar + eps~(x))`.
pub fn average_stress(micro: &Microstructure, macro_strain: &MacroStrain, fluct: &TensorField2) -> [f64; 3] {
    micro.stress(macro_strain, Some(fluct)).mean()
}

fn require_converged(report: SolveReport) -> Result<SolveReport> {
    if report.converged {
        Ok(report)
    } else {
        Err(Error::NotConverged {
            iterations: report.iterations,
            residual: report.residual,
        })
    }
}

/// Stiffness columns from the average stress under `eps_bar = beta e_kl`.
pub fn effective_stiffness_perturbation(
    spectral: &Spectral,
    micro: &Microstructure,
    tol: f64,
    max_iter: usize,
) -> Result<(EffectiveStiffness, SolveReport)> {
    let mut c = VoigtMatrix3::ZERO;
    let mut report = SolveReport::trivial();
    for kl in 0..3 {
        let mut load = MacroStrain::unit(kl);
        load.0[kl] = PERTURBATION;
        let (fluct, rep) = solve_equilibrium(spectral, micro, &load, tol, max_iter)?;
        report = report.merge(require_converged(rep)?);
        let sigma = average_stress(micro, &load, &fluct);
        for ij in 0..3 {
            c[(ij, kl)] = sigma[ij] / PERTURBATION;
        }
    }
    Ok((EffectiveStiffness::from_matrix(c), report))
}

/// Stiffness from the sensitivity of the fluctuation to the macroscopic
/// strain: one solve per Voigt column with right-hand side `-G * D e_kl`,
/// then `C = <D> + <D : d eps~/d eps_bar>`.
pub fn effective_stiffness_sensitivity(
    spectral: &Spectral,
    micro: &Microstructure,
    tol: f64,
    max_iter: usize,
) -> Result<(EffectiveStiffness, SolveReport)> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let n = micro.n();
    let np = n * n;
    let mut op = EquilibriumOperator::new(spectral, micro);
    let mut report = SolveReport::trivial();
    let mut columns = Vec::with_capacity(3);
    for kl in 0..3 {
        let b = op.rhs(&MacroStrain::unit(kl));
        let (x, rep) = minres(&mut op, &b, MinresOptions { tol, max_iter })?;
        report = report.merge(require_converged(rep)?);
        columns.push(x);
    }

    // <D : S> with S(x) the 3x3 sensitivity at each pixel
    let mut ds = VoigtMatrix3::ZERO;
    for p in 0..np {
        let d = micro.at(p);
        if d.max_abs() == 0.0 {
            continue;
        }
        let mut s = VoigtMatrix3::ZERO;
        for (kl, col) in columns.iter().enumerate() {
            for c in 0..3 {
                s[(c, kl)] = col[c * np + p];
            }
        }
        ds = ds + *d * s;
    }
    let c = micro.mean_stiffness() + ds.scale(1.0 / np as f64);
    Ok((EffectiveStiffness::from_matrix(c), report))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomogenizeOptions {
    pub n: usize,
    pub tol: f64,
    /// Defaults to `10 n` when absent.
    pub max_iter: Option<usize>,
    pub method: Method,
    pub regime: Regime,
    pub scheme: Scheme,
    /// Void stiffness as a fraction of the solid. Zero unless diagnosing
    /// the solver.
    pub void_contrast: f64,
}

impl Default for HomogenizeOptions {
    fn default() -> Self {
        HomogenizeOptions {
            n: 256,
            tol: DEFAULT_TOLERANCE,
            max_iter: None,
            method: Method::Sensitivity,
            regime: Regime::PlaneStrain,
            scheme: Scheme::Rotated,
            void_contrast: 0.0,
        }
    }
}

impl HomogenizeOptions {
    pub fn with_n(n: usize) -> Self {
        HomogenizeOptions {
            n,
            ..Default::default()
        }
    }

    pub fn max_iter(&self) -> usize {
        self.max_iter.unwrap_or_else(|| default_max_iter(self.n))
    }

    pub fn spectral(&self) -> Result<Spectral> {
        Spectral::new(self.n, 1.0, self.scheme)
    }
}

/// Rasterize, solve at unit modulus, rescale by the material's modulus.
pub fn homogenize(spec: &UnitCellSpec, opts: &HomogenizeOptions) -> Result<(EffectiveStiffness, SolveReport)> {
    let spectral = opts.spectral()?;
    homogenize_with(&spectral, spec, opts)
}

/// [`homogenize`] reusing FFT plans and projection tables.
pub fn homogenize_with(
    spectral: &Spectral,
    spec: &UnitCellSpec,
    opts: &HomogenizeOptions,
) -> Result<(EffectiveStiffness, SolveReport)> {
    spec.validate()?;
    if spectral.n() != opts.n {
        return Err(Error::invalid("spectral tables built for a different grid size"));
    }
    if !(opts.void_contrast >= 0.0 && opts.void_contrast < 1.0) {
        return Err(Error::invalid("void contrast must lie in [0, 1)"));
    }
    let grid = rasterize(spec, opts.n)?;
    let d = base_stiffness(&spec.material.normalized(), opts.regime)?;
    let micro = Microstructure::from_grid(&grid, d, opts.void_contrast);
    let (c, report) = match opts.method {
        Method::Perturbation => effective_stiffness_perturbation(spectral, &micro, opts.tol, opts.max_iter())?,
        Method::Sensitivity => effective_stiffness_sensitivity(spectral, &micro, opts.tol, opts.max_iter())?,
    };
    Ok((c.scaled(spec.material.youngs_modulus), report))
}
