use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Per-pixel symmetric 2nd-order tensor in Voigt form on an `n x n` grid.
///
/// Strain-like fields use `(eps_11, eps_22, 2 eps_12)`. Storage is
/// component-major: component `c` of pixel `(i, j)` lives at
/// `c * n * n + i * n + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorField2 {
    n: usize,
    data: Vec<f64>,
}

/// Weights of the energy inner product for engineering-shear Voigt vectors:
/// `eps : eps' = e0 e0' + e1 e1' + e2 e2' / 2`.
pub const STRAIN_METRIC: [f64; 3] = [1.0, 1.0, 0.5];

impl TensorField2 {
    pub fn zeros(n: usize) -> Self {
        TensorField2 {
            n,
            data: vec![0.0; 3 * n * n],
        }
    }

    pub fn uniform(n: usize, v: [f64; 3]) -> Self {
        Self::from_fn(n, |_, _| v)
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, f(i, j));
            }
        }
        out
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), 3 * n * n, "field length");
        TensorField2 { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pixels(&self) -> usize {
        self.n * self.n
    }

    pub fn get(&self, i: usize, j: usize) -> [f64; 3] {
        let p = i * self.n + j;
        let np = self.pixels();
        [self.data[p], self.data[np + p], self.data[2 * np + p]]
    }

    pub fn set(&mut self, i: usize, j: usize, v: [f64; 3]) {
        let p = i * self.n + j;
        let np = self.pixels();
        self.data[p] = v[0];
        self.data[np + p] = v[1];
        self.data[2 * np + p] = v[2];
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let np = self.pixels();
        &self.data[c * np..(c + 1) * np]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn mean(&self) -> [f64; 3] {
        let np = self.pixels() as f64;
        [0, 1, 2].map(|c| self.component(c).iter().sum::<f64>() / np)
    }

    /// Energy inner product summed over pixels.
    pub fn dot(&self, other: &TensorField2) -> f64 {
        metric_dot(self.n, &self.data, &other.data)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn max_abs_diff(&self, other: &TensorField2) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

pub(crate) fn metric_dot(n: usize, a: &[f64], b: &[f64]) -> f64 {
    let np = n * n;
    let mut acc = 0.0;
    for (c, w) in STRAIN_METRIC.iter().enumerate() {
        let s: f64 = a[c * np..(c + 1) * np]
            .iter()
            .zip(&b[c * np..(c + 1) * np])
            .map(|(x, y)| x * y)
            .sum();
        acc += w * s;
    }
    acc
}

/// Fourier coefficients of a [`TensorField2`], same component order.
///
/// Within a component the coefficient for native FFT bins `(k1, k2)` sits at
/// `k2 * n + k1`; this is the layout the 2D transform produces without a
/// second transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub(crate) n: usize,
    pub(crate) data: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(n: usize) -> Self {
        SpectralField {
            n,
            data: vec![Complex64::new(0.0, 0.0); 3 * n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficients at native bins `(k1, k2)`.
    pub fn get(&self, k1: usize, k2: usize) -> [Complex64; 3] {
        let np = self.n * self.n;
        let p = k2 * self.n + k1;
        [self.data[p], self.data[np + p], self.data[2 * np + p]]
    }

    pub fn set(&mut self, k1: usize, k2: usize, v: [Complex64; 3]) {
        let np = self.n * self.n;
        let p = k2 * self.n + k1;
        self.data[p] = v[0];
        self.data[np + p] = v[1];
        self.data[2 * np + p] = v[2];
    }

    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.norm()))
    }
}

/// Prescribed average strain in engineering Voigt form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroStrain(pub [f64; 3]);

impl MacroStrain {
    /// Unit loading of one Voigt component.
    pub fn unit(component: usize) -> Self {
        let mut v = [0.0; 3];
        v[component] = 1.0;
        MacroStrain(v)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}
