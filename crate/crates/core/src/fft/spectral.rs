use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::field::{SpectralField, TensorField2};
use super::frequency::{centered_index, FrequencyGrid};
use crate::error::{Error, Result};

/// Discrete gradient used to build the projection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Rotated finite differences on the pixel corners.
    #[default]
    Rotated,
    /// Plain trigonometric frequencies. Converges poorly with voids.
    Spectral,
}

/// Per-frequency data of the projection: the gradient vector `g` and the
/// inverse of the Hermitian acoustic tensor `K = (|g|^2 I + g g^H) / 2`.
#[derive(Debug, Clone, Copy)]
struct ProjectionEntry {
    g: [Complex64; 2],
    kinv11: f64,
    kinv22: f64,
    kinv12: Complex64,
}

/// FFT plans and projection tables for one grid size. Immutable after
/// construction and safe to share between threads.
pub struct Spectral {
    n: usize,
    scheme: Scheme,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch_len: usize,
    /// Indexed like a [`SpectralField`] component; `None` where masked.
    table: Vec<Option<ProjectionEntry>>,
    frequencies: FrequencyGrid,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral")
            .field("n", &self.n)
            .field("scheme", &self.scheme)
            .finish()
    }
}

/// Scratch memory for transforms and operator applications.
pub struct Workspace {
    pub(crate) spec: Vec<Complex64>,
    pub(crate) fft_scratch: Vec<Complex64>,
}

impl Spectral {
    pub fn new(n: usize, cell_length: f64, scheme: Scheme) -> Result<Self> {
        if n < 2 || n % 2 != 0 {
            return Err(Error::invalid(format!("grid size must be even (got {n})")));
        }
        let frequencies = FrequencyGrid::new(n, cell_length);
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let scratch_len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());

        let mut table = vec![None; n * n];
        for k2 in 0..n {
            for k1 in 0..n {
                let (n1, n2) = (centered_index(k1, n), centered_index(k2, n));
                if frequencies.is_masked(n1, n2) {
                    continue;
                }
                let g = match scheme {
                    Scheme::Rotated => frequencies.xi_rot(n1, n2),
                    Scheme::Spectral => frequencies.xi(n1, n2),
                };
                let a1 = g[0].norm_sqr();
                let a2 = g[1].norm_sqr();
                let g2 = a1 + a2;
                if g2 == 0.0 || !g2.is_finite() {
                    return Err(Error::SingularAcoustic(n1, n2));
                }
                // det K = |g|^4 / 2, so K^{-1} = [[|g|^2 + |g2|^2, -g1 g2*], [-g2 g1*, |g|^2 + |g1|^2]] / |g|^4
                let inv_g4 = 1.0 / (g2 * g2);
                table[k2 * n + k1] = Some(ProjectionEntry {
                    g,
                    kinv11: (g2 + a2) * inv_g4,
                    kinv22: (g2 + a1) * inv_g4,
                    kinv12: -(g[0] * g[1].conj()) * inv_g4,
                });
            }
        }
        Ok(Spectral {
            n,
            scheme,
            fwd,
            inv,
            scratch_len,
            table,
            frequencies,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn frequencies(&self) -> &FrequencyGrid {
        &self.frequencies
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            spec: vec![Complex64::new(0.0, 0.0); 3 * self.n * self.n],
            fft_scratch: vec![Complex64::new(0.0, 0.0); self.scratch_len],
        }
    }

    /// In-place forward transform of `count` consecutive components.
    /// Input layout `i * n + j`, output `k2 * n + k1`.
    pub(crate) fn forward_in_place(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        let np = self.n * self.n;
        self.fwd.process_with_scratch(buf, scratch);
        for comp in buf.chunks_exact_mut(np) {
            transpose_square(comp, self.n);
        }
        self.fwd.process_with_scratch(buf, scratch);
    }

    /// Inverse of [`forward_in_place`], unnormalized.
    pub(crate) fn inverse_in_place(&self, buf: &mut [Complex64], scratch: &mut [Complex64]) {
        let np = self.n * self.n;
        self.inv.process_with_scratch(buf, scratch);
        for comp in buf.chunks_exact_mut(np) {
            transpose_square(comp, self.n);
        }
        self.inv.process_with_scratch(buf, scratch);
    }

    pub fn forward(&self, field: &TensorField2) -> SpectralField {
        assert_eq!(field.n(), self.n);
        let mut data: Vec<Complex64> = field
            .as_slice()
            .iter()
            .map(|&x| Complex64::new(x, 0.0))
            .collect();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len];
        self.forward_in_place(&mut data, &mut scratch);
        SpectralField { n: self.n, data }
    }

    /// Inverse transform. Returns the real part and the largest imaginary
    /// magnitude that was discarded.
    pub fn inverse(&self, field: &SpectralField) -> (TensorField2, f64) {
        assert_eq!(field.n(), self.n);
        let mut data = field.data.clone();
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len];
        self.inverse_in_place(&mut data, &mut scratch);
        let norm = 1.0 / (self.n * self.n) as f64;
        let max_imag = data.iter().fold(0.0f64, |m, z| m.max(z.im.abs())) * norm;
        let real = data.iter().map(|z| z.re * norm).collect();
        (TensorField2::from_vec(self.n, real), max_imag)
    }

    /// Apply the projection to tensor components `(t11, t22, t12)` stored
    /// component-major in `buf`, in place.
    pub(crate) fn project_tensor_in_place(&self, buf: &mut [Complex64]) {
        let np = self.n * self.n;
        let (c0, rest) = buf.split_at_mut(np);
        let (c1, c2) = rest.split_at_mut(np);
        let zero = Complex64::new(0.0, 0.0);
        for (k, entry) in self.table.iter().enumerate() {
            match entry {
                None => {
                    c0[k] = zero;
                    c1[k] = zero;
                    c2[k] = zero;
                }
                Some(e) => {
                    let [p11, p22, p12] = e.project([c0[k], c1[k], c2[k]]);
                    c0[k] = p11;
                    c1[k] = p22;
                    c2[k] = p12;
                }
            }
        }
    }

    /// Projection of an engineering-strain spectral field onto compatible
    /// strains. Zero and Nyquist frequencies map to zero.
    pub fn apply_projection(&self, field: &SpectralField) -> SpectralField {
        assert_eq!(field.n(), self.n);
        let np = self.n * self.n;
        let mut data = field.data.clone();
        for z in &mut data[2 * np..] {
            *z *= 0.5;
        }
        self.project_tensor_in_place(&mut data);
        for z in &mut data[2 * np..] {
            *z *= 2.0;
        }
        SpectralField { n: self.n, data }
    }
}

impl ProjectionEntry {
    /// `P(t)_ij = sym(g_i w_j)` with `w = K^{-1} (t g*)`.
    #[inline]
    fn project(&self, t: [Complex64; 3]) -> [Complex64; 3] {
        let [g1, g2] = self.g;
        let (h1, h2) = (g1.conj(), g2.conj());
        let v1 = t[0] * h1 + t[2] * h2;
        let v2 = t[2] * h1 + t[1] * h2;
        let w1 = v1 * self.kinv11 + self.kinv12 * v2;
        let w2 = self.kinv12.conj() * v1 + v2 * self.kinv22;
        [g1 * w1, g2 * w2, 0.5 * (g1 * w2 + g2 * w1)]
    }
}

fn transpose_square(a: &mut [Complex64], n: usize) {
    const B: usize = 16;
    for ib in (0..n).step_by(B) {
        for jb in (ib..n).step_by(B) {
            for i in ib..(ib + B).min(n) {
                let j0 = if ib == jb { i + 1 } else { jb };
                for j in j0..(jb + B).min(n) {
                    a.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}
