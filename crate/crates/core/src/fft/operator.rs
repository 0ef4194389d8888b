use num_complex::Complex64;

use super::field::{metric_dot, MacroStrain, TensorField2};
use super::minres::LinearOperator;
use super::spectral::{Spectral, Workspace};
use crate::elasticity::VoigtMatrix3;
use crate::error::{Error, Result};
use crate::geometry::PixelGrid;

/// Per-pixel stiffness as a phase map over a small set of phase stiffnesses.
#[derive(Debug, Clone, PartialEq)]
pub struct Microstructure {
    n: usize,
    phase: Vec<u8>,
    stiffness: Vec<VoigtMatrix3>,
}

impl Microstructure {
    pub fn new(n: usize, phase: Vec<u8>, stiffness: Vec<VoigtMatrix3>) -> Result<Self> {
        if phase.len() != n * n {
            return Err(Error::invalid(format!("phase map has {} pixels, expected {}", phase.len(), n * n)));
        }
        if let Some(&p) = phase.iter().find(|&&p| p as usize >= stiffness.len()) {
            return Err(Error::invalid(format!("phase {p} has no stiffness")));
        }
        Ok(Microstructure { n, phase, stiffness })
    }

    /// Solid pixels get `solid`, voids get `void_contrast * solid`
    /// (`0.0` is the true void).
    pub fn from_grid(grid: &PixelGrid, solid: VoigtMatrix3, void_contrast: f64) -> Self {
        let phase = grid.indicator().iter().map(|&s| s as u8).collect();
        Microstructure {
            n: grid.n(),
            phase,
            stiffness: vec![solid.scale(void_contrast), solid],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, pixel: usize) -> &VoigtMatrix3 {
        &self.stiffness[self.phase[pixel] as usize]
    }

    pub fn phases(&self) -> &[VoigtMatrix3] {
        &self.stiffness
    }

    /// Arithmetic mean of the pixel stiffnesses.
    pub fn mean_stiffness(&self) -> VoigtMatrix3 {
        let mut counts = vec![0usize; self.stiffness.len()];
        for &p in &self.phase {
            counts[p as usize] += 1;
        }
        let np = (self.n * self.n) as f64;
        counts
            .iter()
            .zip(&self.stiffness)
            .fold(VoigtMatrix3::ZERO, |acc, (&c, d)| acc + d.scale(c as f64 / np))
    }

    /// Pointwise stress `D(x) (macro + fluct(x))`; `fluct` may be absent.
    pub fn stress(&self, macro_strain: &MacroStrain, fluct: Option<&TensorField2>) -> TensorField2 {
        let n = self.n;
        let mut out = TensorField2::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut e = macro_strain.0;
                if let Some(f) = fluct {
                    let v = f.get(i, j);
                    for c in 0..3 {
                        e[c] += v[c];
                    }
                }
                out.set(i, j, self.at(i * n + j).mul_vec(e));
            }
        }
        out
    }
}

/// `eps -> F^-1[G : F(D : eps)]` on engineering-strain fields.
///
/// The output lies in the compatible subspace. Restricted to that subspace
/// the operator is self-adjoint in the energy inner product, which is all
/// MINRES needs since every Krylov vector stays there.
pub struct EquilibriumOperator<'a> {
    spectral: &'a Spectral,
    micro: &'a Microstructure,
    work: Workspace,
}

impl<'a> EquilibriumOperator<'a> {
    pub fn new(spectral: &'a Spectral, micro: &'a Microstructure) -> Self {
        assert_eq!(spectral.n(), micro.n(), "grid size mismatch");
        EquilibriumOperator {
            spectral,
            micro,
            work: spectral.workspace(),
        }
    }

    fn np(&self) -> usize {
        self.micro.n * self.micro.n
    }

    /// Load `D(x) x(x)` as complex tensor components into the workspace.
    fn load_stress(&mut self, x: &[f64]) {
        let np = self.np();
        let (s0, rest) = self.work.spec.split_at_mut(np);
        let (s1, s2) = rest.split_at_mut(np);
        for p in 0..np {
            let sig = self.micro.at(p).mul_vec([x[p], x[np + p], x[2 * np + p]]);
            s0[p] = Complex64::new(sig[0], 0.0);
            s1[p] = Complex64::new(sig[1], 0.0);
            s2[p] = Complex64::new(sig[2], 0.0);
        }
    }

    /// Project the workspace and write the real engineering-strain result.
    fn project_into(&mut self, y: &mut [f64]) {
        let np = self.np();
        let Workspace { spec, fft_scratch } = &mut self.work;
        self.spectral.forward_in_place(spec, fft_scratch);
        self.spectral.project_tensor_in_place(spec);
        self.spectral.inverse_in_place(spec, fft_scratch);
        let norm = 1.0 / np as f64;
        for p in 0..np {
            y[p] = spec[p].re * norm;
            y[np + p] = spec[np + p].re * norm;
            y[2 * np + p] = 2.0 * spec[2 * np + p].re * norm;
        }
    }

    /// Apply the projection alone to an engineering-strain vector.
    pub fn project(&mut self, x: &[f64], y: &mut [f64]) {
        let np = self.np();
        for p in 0..np {
            self.work.spec[p] = Complex64::new(x[p], 0.0);
            self.work.spec[np + p] = Complex64::new(x[np + p], 0.0);
            self.work.spec[2 * np + p] = Complex64::new(0.5 * x[2 * np + p], 0.0);
        }
        self.project_into(y);
    }

    /// `P D P`: self-adjoint on all fields, equal to `P D` on compatible ones.
    pub fn apply_symmetric(&mut self, x: &[f64], y: &mut [f64]) {
        let mut px = vec![0.0; x.len()];
        self.project(x, &mut px);
        self.apply(&px, y);
    }

    /// Right-hand side `-F^-1[G : F(D : eps_bar)]` for a uniform loading.
    pub fn rhs(&mut self, macro_strain: &MacroStrain) -> Vec<f64> {
        let np = self.np();
        let mut x = vec![0.0; 3 * np];
        for c in 0..3 {
            x[c * np..(c + 1) * np].fill(macro_strain.0[c]);
        }
        let mut y = vec![0.0; 3 * np];
        self.apply(&x, &mut y);
        y.iter_mut().for_each(|v| *v = -*v);
        y
    }
}

impl LinearOperator for EquilibriumOperator<'_> {
    fn dim(&self) -> usize {
        3 * self.np()
    }

    fn apply(&mut self, x: &[f64], y: &mut [f64]) {
        self.load_stress(x);
        self.project_into(y);
    }

    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        metric_dot(self.micro.n, a, b)
    }
}

/// Convenience wrapper: one application of the operator to a field.
pub fn apply_operator(spectral: &Spectral, micro: &Microstructure, eps: &TensorField2) -> TensorField2 {
    let mut op = EquilibriumOperator::new(spectral, micro);
    let mut y = vec![0.0; op.dim()];
    op.apply(eps.as_slice(), &mut y);
    TensorField2::from_vec(eps.n(), y)
}
