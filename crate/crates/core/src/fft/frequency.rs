use std::f64::consts::PI;

use num_complex::Complex64;

/// Discrete frequencies of an `n x n` periodic grid.
///
/// Entries are addressed by the centered index `(n1, n2)` with
/// `q_m = 2 pi (n_m - n/2) / n`, so `n_m = 0` is the Nyquist frequency
/// `q = -pi` and `n_m = n/2` the zero frequency. [`native_index`] maps a
/// centered index to the FFT library's ordering.
#[derive(Debug, Clone)]
pub struct FrequencyGrid {
    n: usize,
    cell_length: f64,
    xi: Vec<[Complex64; 2]>,
    xi_rot: Vec<[Complex64; 2]>,
    nyquist: Vec<bool>,
    zero: Vec<bool>,
}

/// FFT ordering of a centered index: bins `0..n/2` hold non-negative
/// frequencies, `n/2..n` the negative ones.
pub fn native_index(centered: usize, n: usize) -> usize {
    (centered + n / 2) % n
}

pub fn centered_index(native: usize, n: usize) -> usize {
    (native + n / 2) % n
}

/// `q` for a centered index.
pub fn wave_number(centered: usize, n: usize) -> f64 {
    2.0 * PI * (centered as f64 - n as f64 / 2.0) / n as f64
}

/// Frequency vector of the rotated (staggered corner) finite-difference
/// scheme for wave numbers `q`. Returns zero when any `q_m = -pi`, where
/// the averaging factor vanishes.
pub fn rotated_frequency(q: [f64; 2], n: usize, cell_length: f64) -> [Complex64; 2] {
    if q.iter().any(|&qm| qm <= -PI) {
        return [Complex64::new(0.0, 0.0); 2];
    }
    let avg = q
        .iter()
        .map(|&qm| 0.5 * (Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, -qm)))
        .fold(Complex64::new(1.0, 0.0), |acc, f| acc * f);
    let scale = 2.0 * n as f64 / cell_length;
    q.map(|qm| Complex64::new(0.0, scale * (0.5 * qm).tan()) * avg)
}

impl FrequencyGrid {
    pub fn new(n: usize, cell_length: f64) -> Self {
        assert!(n >= 2 && n % 2 == 0, "grid size must be even");
        let mut xi = Vec::with_capacity(n * n);
        let mut xi_rot = Vec::with_capacity(n * n);
        let mut nyquist = Vec::with_capacity(n * n);
        let mut zero = Vec::with_capacity(n * n);
        let scale = n as f64 / cell_length;
        for n1 in 0..n {
            for n2 in 0..n {
                let q = [wave_number(n1, n), wave_number(n2, n)];
                xi.push(q.map(|qm| Complex64::new(0.0, qm * scale)));
                xi_rot.push(rotated_frequency(q, n, cell_length));
                nyquist.push(n1 == 0 || n2 == 0);
                zero.push(n1 == n / 2 && n2 == n / 2);
            }
        }
        FrequencyGrid {
            n,
            cell_length,
            xi,
            xi_rot,
            nyquist,
            zero,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cell_length(&self) -> f64 {
        self.cell_length
    }

    fn idx(&self, n1: usize, n2: usize) -> usize {
        n1 * self.n + n2
    }

    /// Plain spectral frequency `i q N / L`.
    pub fn xi(&self, n1: usize, n2: usize) -> [Complex64; 2] {
        self.xi[self.idx(n1, n2)]
    }

    /// Rotated-scheme frequency.
    pub fn xi_rot(&self, n1: usize, n2: usize) -> [Complex64; 2] {
        self.xi_rot[self.idx(n1, n2)]
    }

    pub fn is_nyquist(&self, n1: usize, n2: usize) -> bool {
        self.nyquist[self.idx(n1, n2)]
    }

    pub fn is_zero(&self, n1: usize, n2: usize) -> bool {
        self.zero[self.idx(n1, n2)]
    }

    /// True where the projection is defined to be zero.
    pub fn is_masked(&self, n1: usize, n2: usize) -> bool {
        let k = self.idx(n1, n2);
        self.nyquist[k] || self.zero[k]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn index_permutation_matches_centered_wave_numbers() {
        for n in [4usize, 8, 16, 64] {
            for centered in 0..n {
                let k = native_index(centered, n);
                assert_eq!(centered_index(k, n), centered);
                // FFT bin k carries 2 pi k / n wrapped into [-pi, pi)
                let native_q = if k < n / 2 {
                    2.0 * PI * k as f64 / n as f64
                } else {
                    2.0 * PI * (k as f64 - n as f64) / n as f64
                };
                assert_abs_diff_eq!(native_q, wave_number(centered, n), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn zero_and_nyquist_pixels() {
        let fg = FrequencyGrid::new(4, 1.0);
        assert!(fg.is_zero(2, 2));
        assert_eq!(fg.xi_rot(2, 2), [Complex64::new(0.0, 0.0); 2]);
        assert!(fg.is_nyquist(0, 0));
        assert_eq!(fg.xi_rot(0, 0), [Complex64::new(0.0, 0.0); 2]);
        assert!(fg.is_nyquist(0, 3) && fg.is_nyquist(1, 0));
        assert_eq!(fg.xi_rot(1, 0), [Complex64::new(0.0, 0.0); 2]);
    }

    #[test]
    fn hand_evaluated_rotated_frequency() {
        // q = (pi/2, 0): i * 8 * tan(pi/4) * (1 + e^{-i pi/2})/2 * 1 = 4 + 4i
        let fg = FrequencyGrid::new(4, 1.0);
        let g = fg.xi_rot(3, 2);
        assert_abs_diff_eq!(g[0].re, 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g[0].im, 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g[1].norm(), 0.0, epsilon = 1e-14);
        let xi = fg.xi(3, 2);
        assert_abs_diff_eq!(xi[0].im, 4.0 * PI / 2.0, epsilon = 1e-14);
        assert_eq!(xi[0].re, 0.0);
    }

    #[test]
    fn rotated_frequency_is_hermitian() {
        let n = 8;
        let fg = FrequencyGrid::new(n, 1.0);
        for n1 in 1..n {
            for n2 in 1..n {
                let a = fg.xi_rot(n1, n2);
                let b = fg.xi_rot(n - n1, n - n2);
                for m in 0..2 {
                    assert_abs_diff_eq!(a[m].re, b[m].re, epsilon = 1e-12);
                    assert_abs_diff_eq!(a[m].im, -b[m].im, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn rotated_tends_to_spectral_at_low_frequency() {
        let n = 256;
        let fg = FrequencyGrid::new(n, 1.0);
        let (a, b) = (fg.xi_rot(n / 2 + 1, n / 2), fg.xi(n / 2 + 1, n / 2));
        // relative deviation is about q/2 for the half-pixel averaging factor
        assert!((a[0] - b[0]).norm() / b[0].norm() < 0.02);
    }
}
