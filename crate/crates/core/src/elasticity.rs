//! Isotropic base material, 2D Voigt algebra and effective constants.
//!
//! Voigt order is `(11, 22, 12)`. Strains carry engineering shear
//! `2 eps_12`, stresses carry `sigma_12`, so a stiffness matrix maps
//! `(eps_11, eps_22, 2 eps_12)` to `(sigma_11, sigma_22, sigma_12)`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    #[default]
    PlaneStrain,
    PlaneStress,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::PlaneStrain => "plane_strain",
            Regime::PlaneStress => "plane_stress",
        })
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "plane_strain" => Ok(Regime::PlaneStrain),
            "plane_stress" => Ok(Regime::PlaneStress),
            other => Err(Error::invalid(format!(
                "unknown regime {other:?} (expected plane_strain or plane_stress)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseMaterial {
    #[serde(rename = "E")]
    pub youngs_modulus: f64,
    pub nu: f64,
}

impl BaseMaterial {
    pub fn new(youngs_modulus: f64, nu: f64) -> Result<Self> {
        let m = BaseMaterial { youngs_modulus, nu };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.youngs_modulus.is_finite() && self.youngs_modulus > 0.0) {
            return Err(Error::invalid(format!(
                "Young's modulus must be positive (got {})",
                self.youngs_modulus
            )));
        }
        if !(self.nu > -1.0 && self.nu < 0.5) {
            return Err(Error::invalid(format!(
                "Poisson's ratio must lie in (-1, 0.5) (got {})",
                self.nu
            )));
        }
        Ok(())
    }

    /// Same Poisson's ratio, unit modulus.
    pub fn normalized(&self) -> Self {
        BaseMaterial {
            youngs_modulus: 1.0,
            nu: self.nu,
        }
    }
}

/// Symmetric 3x3 matrix in 2D Voigt order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VoigtMatrix3(pub [[f64; 3]; 3]);

impl VoigtMatrix3 {
    pub const ZERO: VoigtMatrix3 = VoigtMatrix3([[0.0; 3]; 3]);
    pub const IDENTITY: VoigtMatrix3 =
        VoigtMatrix3([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    pub fn isotropic(c11: f64, c12: f64, c33: f64) -> Self {
        VoigtMatrix3([[c11, c12, 0.0], [c12, c11, 0.0], [0.0, 0.0, c33]])
    }

    pub fn mul_vec(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.0;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn transpose(&self) -> Self {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in self.0.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                t[j][i] = x;
            }
        }
        VoigtMatrix3(t)
    }

    pub fn scale(&self, s: f64) -> Self {
        VoigtMatrix3(self.0.map(|row| row.map(|x| x * s)))
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |a, &x| a.max(x.abs()))
    }

    pub fn asymmetry(&self) -> f64 {
        let m = &self.0;
        (m[0][1] - m[1][0])
            .abs()
            .max((m[0][2] - m[2][0]).abs())
            .max((m[1][2] - m[2][1]).abs())
    }

    pub fn symmetrized(&self) -> Self {
        (*self + self.transpose()).scale(0.5)
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn inverse(&self) -> Option<Self> {
        let det = self.determinant();
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let m = &self.0;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
        let adj = [
            [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
            [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
            [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
        ];
        Some(VoigtMatrix3(adj).scale(1.0 / det))
    }
}

impl Index<(usize, usize)> for VoigtMatrix3 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.0[i][j]
    }
}

impl IndexMut<(usize, usize)> for VoigtMatrix3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.0[i][j]
    }
}

impl Add for VoigtMatrix3 {
    type Output = VoigtMatrix3;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for VoigtMatrix3 {
    type Output = VoigtMatrix3;
    fn sub(self, rhs: Self) -> Self {
        self + rhs.scale(-1.0)
    }
}

impl Mul for VoigtMatrix3 {
    type Output = VoigtMatrix3;
    fn mul(self, rhs: Self) -> Self {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = (0..3).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        VoigtMatrix3(out)
    }
}

/// Isotropic stiffness of the base material in the chosen 2D regime.
pub fn base_stiffness(m: &BaseMaterial, regime: Regime) -> Result<VoigtMatrix3> {
    m.validate()?;
    let (e, nu) = (m.youngs_modulus, m.nu);
    let shear = e / (2.0 * (1.0 + nu));
    Ok(match regime {
        Regime::PlaneStrain => {
            let f = e / ((1.0 + nu) * (1.0 - 2.0 * nu));
            VoigtMatrix3::isotropic(f * (1.0 - nu), f * nu, shear)
        }
        Regime::PlaneStress => {
            let f = e / (1.0 - nu * nu);
            VoigtMatrix3::isotropic(f, f * nu, shear)
        }
    })
}

/// Homogenized stiffness with the three constants that define it for the
/// square-symmetric cells.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveStiffness {
    pub c11: f64,
    pub c12: f64,
    pub c33: f64,
    pub full: VoigtMatrix3,
}

impl EffectiveStiffness {
    pub fn from_matrix(full: VoigtMatrix3) -> Self {
        EffectiveStiffness {
            c11: full[(0, 0)],
            c12: full[(0, 1)],
            c33: full[(2, 2)],
            full,
        }
    }

    pub fn nu_eff(&self) -> Result<f64> {
        nu_eff(self)
    }

    pub fn scaled(&self, youngs_modulus: f64) -> Self {
        scale_by_e(self, youngs_modulus)
    }
}

/// Effective Poisson's ratio `C12 / C11`.
pub fn nu_eff(c: &EffectiveStiffness) -> Result<f64> {
    if c.c11 == 0.0 || !c.c11.is_finite() {
        return Err(Error::Degenerate(format!(
            "effective C11 is {}; Poisson's ratio undefined",
            c.c11
        )));
    }
    Ok(c.c12 / c.c11)
}

/// Rescale constants computed at unit modulus to modulus `e`.
pub fn scale_by_e(normalized: &EffectiveStiffness, e: f64) -> EffectiveStiffness {
    EffectiveStiffness::from_matrix(normalized.full.scale(e))
}
