//! Unit cells with orthogonal voids and their pixel rasters.
//!
//! A cell of side `L` (taken as 1; all lengths are relative to `L`) holds
//! voids on a square lattice of spacing `L/2` with alternating orientation:
//! long axis along `x2` at the center and the corners, along `x1` at the
//! edge midpoints. Tiled periodically this is two vertical and two
//! horizontal voids per cell, each pointing its tips at the middle of its
//! neighbours. `d_rel` is the narrow and `D_rel` the long full extent of a
//! void, so the voids stay disconnected exactly when `d_rel + D_rel < 1`.
//!
//! Pixel `(i, j)` has its center at `((i + 1/2)/n, (j + 1/2)/n)`; `i` runs
//! along `x1`, `j` along `x2` and the raster is stored with `j` fastest.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::elasticity::BaseMaterial;
use crate::error::{Error, Result};

/// Number of boundary samples used for the peanut polygon and for all SVG
/// outlines of curved voids.
pub const OUTLINE_SAMPLES: usize = 720;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VoidShape {
    #[serde(rename = "rect")]
    Rectangular,
    #[serde(rename = "diamond")]
    Diamond,
    #[serde(rename = "oval")]
    Oval,
    #[serde(rename = "peanut")]
    Peanut,
}

impl VoidShape {
    pub const ALL: [VoidShape; 4] = [
        VoidShape::Rectangular,
        VoidShape::Diamond,
        VoidShape::Oval,
        VoidShape::Peanut,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VoidShape::Rectangular => "rect",
            VoidShape::Diamond => "diamond",
            VoidShape::Oval => "oval",
            VoidShape::Peanut => "peanut",
        }
    }
}

impl fmt::Display for VoidShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VoidShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rect" | "rectangular" => Ok(VoidShape::Rectangular),
            "diamond" => Ok(VoidShape::Diamond),
            "oval" => Ok(VoidShape::Oval),
            "peanut" => Ok(VoidShape::Peanut),
            other => Err(Error::invalid(format!(
                "unknown shape {other:?} (expected rect, diamond, oval or peanut)"
            ))),
        }
    }
}

/// Which axis carries the long extent `D_rel`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Long axis along `x2`; center and corner voids.
    Vertical,
    /// Long axis along `x1`; edge-midpoint voids.
    Horizontal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitCellSpec {
    pub shape: VoidShape,
    pub d_rel: f64,
    #[serde(rename = "D_rel")]
    pub big_d_rel: f64,
    pub material: BaseMaterial,
}

impl UnitCellSpec {
    pub fn new(shape: VoidShape, d_rel: f64, big_d_rel: f64, material: BaseMaterial) -> Result<Self> {
        let spec = UnitCellSpec {
            shape,
            d_rel,
            big_d_rel,
            material,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn solid(material: BaseMaterial) -> Self {
        UnitCellSpec {
            shape: VoidShape::Rectangular,
            d_rel: 0.0,
            big_d_rel: 0.0,
            material,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_diameters(self.d_rel, self.big_d_rel)?;
        self.material.validate()
    }
}

pub(crate) fn validate_diameters(d_rel: f64, big_d_rel: f64) -> Result<()> {
    if !d_rel.is_finite() || !big_d_rel.is_finite() {
        return Err(Error::invalid("void diameters must be finite"));
    }
    if d_rel < 0.0 || big_d_rel < 0.0 {
        return Err(Error::invalid(format!(
            "void diameters must be non-negative (d_rel = {d_rel}, D_rel = {big_d_rel})"
        )));
    }
    if d_rel + big_d_rel >= 1.0 {
        return Err(Error::invalid(format!(
            "d_rel + D_rel must be < 1 so voids do not interconnect (got {})",
            d_rel + big_d_rel
        )));
    }
    Ok(())
}

/// Binary material indicator on an `n x n` periodic raster.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelGrid {
    n: usize,
    cell_length: f64,
    solid: Vec<bool>,
}

impl PixelGrid {
    /// Build a grid from a raw indicator, `true` = solid. Index is `i * n + j`.
    pub fn from_indicator(n: usize, solid: Vec<bool>) -> Result<Self> {
        check_grid_size(n)?;
        if solid.len() != n * n {
            return Err(Error::invalid(format!(
                "indicator has {} entries, expected {}",
                solid.len(),
                n * n
            )));
        }
        if !solid.iter().any(|&s| s) {
            return Err(Error::invalid("grid has no solid pixel"));
        }
        Ok(PixelGrid {
            n,
            cell_length: 1.0,
            solid,
        })
    }

    pub fn all_solid(n: usize) -> Result<Self> {
        Self::from_indicator(n, vec![true; n * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cell_length(&self) -> f64 {
        self.cell_length
    }

    pub fn is_solid(&self, i: usize, j: usize) -> bool {
        self.solid[i * self.n + j]
    }

    pub fn indicator(&self) -> &[bool] {
        &self.solid
    }

    pub fn void_count(&self) -> usize {
        self.solid.iter().filter(|&&s| !s).count()
    }

    pub fn solid_fraction(&self) -> f64 {
        1.0 - self.void_fraction()
    }

    pub fn void_fraction(&self) -> f64 {
        self.void_count() as f64 / (self.n * self.n) as f64
    }

    /// Binary PGM, top row first (largest `x2`), solid = 255, void = 0.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        let n = self.n;
        write!(out, "P5\n{n} {n}\n255\n")?;
        let mut row = vec![0u8; n];
        for j in (0..n).rev() {
            for (i, px) in row.iter_mut().enumerate() {
                *px = if self.is_solid(i, j) { 255 } else { 0 };
            }
            out.write_all(&row)?;
        }
        Ok(())
    }
}

fn check_grid_size(n: usize) -> Result<()> {
    if n < 8 || n % 2 != 0 {
        return Err(Error::invalid(format!(
            "grid size must be even and at least 8 (got {n})"
        )));
    }
    Ok(())
}

fn peanut_radius(theta: f64) -> f64 {
    let s = (2.0 * theta).sin();
    ((2.0 * theta).cos() + (1.1 - s * s).sqrt()).sqrt()
}

fn peanut_norm() -> f64 {
    (1.0 + 1.1f64.sqrt()).sqrt()
}

/// Point on the peanut outline with narrow extent `d_rel` along `x1` and
/// long-axis scale `big_d_rel` along `x2`. Both scales are full extents, so
/// the point at `theta = 0` sits at `x1 = d_rel / 2`.
pub fn peanut_point(theta: f64, d_rel: f64, big_d_rel: f64) -> (f64, f64) {
    let theta = theta.rem_euclid(TAU);
    let r = peanut_radius(theta) / peanut_norm();
    (
        0.5 * d_rel * r * theta.cos(),
        0.5 * big_d_rel * r * theta.sin(),
    )
}

/// Closed peanut polygon (`OUTLINE_SAMPLES` vertices, last not repeated).
pub fn peanut_polygon(d_rel: f64, big_d_rel: f64) -> Vec<(f64, f64)> {
    (0..OUTLINE_SAMPLES)
        .map(|k| peanut_point(TAU * k as f64 / OUTLINE_SAMPLES as f64, d_rel, big_d_rel))
        .collect()
}

/// Peanut void in the frame of a vertical void: `d_rel` wide along `x1`,
/// `D_rel` long along `x2`, with the two lobes at the ends of the long axis
/// and the pinch across it. This is the curve of [`peanut_point`] with the
/// long extent on the lobe axis.
pub fn peanut_void_polygon(d_rel: f64, big_d_rel: f64) -> Vec<(f64, f64)> {
    peanut_polygon(big_d_rel, d_rel)
        .into_iter()
        .map(|(u, v)| (v, u))
        .collect()
}

/// Even-odd ray casting.
pub fn point_in_polygon(p: (f64, f64), poly: &[(f64, f64)]) -> bool {
    let (x, y) = p;
    let mut inside = false;
    let mut j = poly.len() - 1;
    for i in 0..poly.len() {
        let (xi, yi) = poly[i];
        let (xj, yj) = poly[j];
        if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
            inside = !inside;
        }
        j = i;
    }
    inside
}

/// Star-shaped membership test for the peanut: compare the point's radius in
/// normalized coordinates with the curve radius at the same polar angle.
pub fn peanut_contains_radial(p: (f64, f64), d_rel: f64, big_d_rel: f64) -> bool {
    if d_rel <= 0.0 || big_d_rel <= 0.0 {
        return false;
    }
    let scale = 1.0 / peanut_norm();
    let u = p.0 / (0.5 * d_rel * scale);
    let v = p.1 / (0.5 * big_d_rel * scale);
    let r = u.hypot(v);
    if r == 0.0 {
        return true;
    }
    r <= peanut_radius(v.atan2(u))
}

/// Membership of an offset `p` (relative to the void center) in a single
/// void. Vertical voids are `d_rel` wide along `x1` and `D_rel` tall along
/// `x2`; horizontal ones are the same void rotated by 90 degrees.
pub fn point_in_void(
    shape: VoidShape,
    p: (f64, f64),
    d_rel: f64,
    big_d_rel: f64,
    orientation: Orientation,
) -> bool {
    let (x, y) = match orientation {
        Orientation::Vertical => p,
        Orientation::Horizontal => (p.1, p.0),
    };
    if d_rel <= 0.0 || big_d_rel <= 0.0 {
        return false;
    }
    let a = 0.5 * d_rel;
    let b = 0.5 * big_d_rel;
    match shape {
        VoidShape::Rectangular => x.abs() <= a && y.abs() <= b,
        VoidShape::Diamond => x.abs() / a + y.abs() / b <= 1.0,
        VoidShape::Oval => (x / a).powi(2) + (y / b).powi(2) <= 1.0,
        VoidShape::Peanut => {
            if x.abs() > a || y.abs() > b {
                return false;
            }
            point_in_polygon((x, y), &peanut_void_polygon(d_rel, big_d_rel))
        }
    }
}

/// Pixel-center rasterization of the cell. Offsets are formed from integer
/// numerators so mirrored pixels see exactly negated coordinates.
pub fn rasterize(spec: &UnitCellSpec, n: usize) -> Result<PixelGrid> {
    validate_diameters(spec.d_rel, spec.big_d_rel)?;
    check_grid_size(n)?;
    let (d, big_d) = (spec.d_rel, spec.big_d_rel);
    let peanut = (spec.shape == VoidShape::Peanut && d > 0.0 && big_d > 0.0)
        .then(|| peanut_void_polygon(d, big_d));
    let inside = |p: (f64, f64), o: Orientation| -> bool {
        match &peanut {
            Some(poly) => {
                let (x, y) = match o {
                    Orientation::Vertical => p,
                    Orientation::Horizontal => (p.1, p.0),
                };
                x.abs() <= 0.5 * d && y.abs() <= 0.5 * big_d && point_in_polygon((x, y), poly)
            }
            None => point_in_void(spec.shape, p, d, big_d, o),
        }
    };

    // lattice points k * L/2 for k in 0..=2 along each axis; voids centered
    // further out cannot reach into the cell since each half extent is < 1/2
    let two_n = 2 * n as i64;
    let n_i = n as i64;
    let offset = |i: usize, k: i64| (2 * i as i64 + 1 - k * n_i) as f64 / two_n as f64;

    let mut solid = vec![true; n * n];
    for i in 0..n {
        for j in 0..n {
            let hit = (0..3).any(|k1| {
                (0..3).any(|k2| {
                    let o = if (k1 + k2) % 2 == 0 {
                        Orientation::Vertical
                    } else {
                        Orientation::Horizontal
                    };
                    inside((offset(i, k1), offset(j, k2)), o)
                })
            });
            if hit {
                solid[i * n + j] = false;
            }
        }
    }
    PixelGrid::from_indicator(n, solid)
}

/// Outline of one void centered at the origin, counter-clockwise.
pub fn void_outline(
    shape: VoidShape,
    d_rel: f64,
    big_d_rel: f64,
    orientation: Orientation,
) -> Vec<(f64, f64)> {
    let a = 0.5 * d_rel;
    let b = 0.5 * big_d_rel;
    let pts: Vec<(f64, f64)> = match shape {
        VoidShape::Rectangular => vec![(a, -b), (a, b), (-a, b), (-a, -b)],
        VoidShape::Diamond => vec![(a, 0.0), (0.0, b), (-a, 0.0), (0.0, -b)],
        VoidShape::Oval => (0..OUTLINE_SAMPLES)
            .map(|k| {
                let t = TAU * k as f64 / OUTLINE_SAMPLES as f64;
                (a * t.cos(), b * t.sin())
            })
            .collect(),
        VoidShape::Peanut => peanut_void_polygon(d_rel, big_d_rel),
    };
    match orientation {
        Orientation::Vertical => pts,
        // rotate by +90 degrees: (x, y) -> (-y, x)
        Orientation::Horizontal => pts.into_iter().map(|(x, y)| (-y, x)).collect(),
    }
}

/// Shoelace area.
pub fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    let mut acc = 0.0;
    for k in 0..poly.len() {
        let (x0, y0) = poly[k];
        let (x1, y1) = poly[(k + 1) % poly.len()];
        acc += x0 * y1 - x1 * y0;
    }
    0.5 * acc.abs()
}

/// Analytic area of one void (peanut via its polygon).
pub fn void_area(shape: VoidShape, d_rel: f64, big_d_rel: f64) -> f64 {
    match shape {
        VoidShape::Rectangular => d_rel * big_d_rel,
        VoidShape::Diamond => 0.5 * d_rel * big_d_rel,
        VoidShape::Oval => PI * 0.25 * d_rel * big_d_rel,
        VoidShape::Peanut => polygon_area(&peanut_polygon(d_rel, big_d_rel)),
    }
}

/// SVG of the unit cell in a unit view box with `x2` pointing up.
pub fn cell_svg(shape: VoidShape, d_rel: f64, big_d_rel: f64) -> Result<String> {
    validate_diameters(d_rel, big_d_rel)?;
    let mut paths = Vec::new();
    if d_rel > 0.0 && big_d_rel > 0.0 {
        let vertical = void_outline(shape, d_rel, big_d_rel, Orientation::Vertical);
        for c in [(0.5, 0.5), (0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            paths.push(svg_path(&vertical, c));
        }
        let horizontal = void_outline(shape, d_rel, big_d_rel, Orientation::Horizontal);
        for c in [(0.5, 0.0), (0.5, 1.0), (0.0, 0.5), (1.0, 0.5)] {
            paths.push(svg_path(&horizontal, c));
        }
    }
    let mut svg = String::from(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1 1\" width=\"320\" height=\"320\">\n",
    );
    svg.push_str(&format!(
        "<title>{shape} d/L={d_rel:.4} D/L={big_d_rel:.4}</title>\n"
    ));
    svg.push_str("<defs><clipPath id=\"cell\"><rect x=\"0\" y=\"0\" width=\"1\" height=\"1\"/></clipPath></defs>\n");
    svg.push_str("<rect class=\"solid\" x=\"0\" y=\"0\" width=\"1\" height=\"1\" fill=\"#3b5b92\"/>\n");
    svg.push_str("<g class=\"voids\" clip-path=\"url(#cell)\" fill=\"#ffffff\">\n");
    for p in paths {
        svg.push_str(&format!("<path d=\"{p}\"/>\n"));
    }
    svg.push_str("</g>\n</svg>\n");
    Ok(svg)
}

fn svg_path(poly: &[(f64, f64)], center: (f64, f64)) -> String {
    let mut s = String::with_capacity(poly.len() * 20);
    for (k, &(x, y)) in poly.iter().enumerate() {
        let cmd = if k == 0 { 'M' } else { 'L' };
        // SVG y grows downwards
        s.push_str(&format!("{cmd}{:.6} {:.6} ", center.0 + x, 1.0 - (center.1 + y)));
    }
    s.push('Z');
    s
}
