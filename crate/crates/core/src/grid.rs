//! Geometry, grids and fields shared by every solver.
//!
//! The domain is a tube Ω = D × ℝ with a one-dimensional cross-section
//! D = (0, L). Fields are dense nonnegative samples on either the
//! cross-section alone or a truncated tube D × (y_min, y_max).

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exponent bundle for the p-Laplacian problems.
///
/// `reaction_coefficient` holds 1/(p-2) and is populated only for p > 2;
/// p = 2 is admitted solely for the linear-contrast runs, which have no
/// reaction term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub p: f64,
    pub reaction_coefficient: Option<f64>,
}

impl Params {
    pub fn new(p: f64) -> Result<Self> {
        if !p.is_finite() || p < 2.0 {
            return Err(Error::InvalidParam(format!("p must be >= 2, got {p}")));
        }
        let reaction_coefficient = if p > 2.0 { Some(1.0 / (p - 2.0)) } else { None };
        Ok(Params { p, reaction_coefficient })
    }

    /// 1/(p-2); errors at p = 2 where the rescaling is undefined.
    pub fn reaction(&self) -> Result<f64> {
        self.reaction_coefficient
            .ok_or_else(|| Error::InvalidParam("reaction coefficient undefined at p = 2".into()))
    }

    pub fn is_slow_diffusion(&self) -> bool {
        self.p > 2.0
    }
}

/// Cross-section D = (0, L) discretized with `n_z` nodes.
///
/// The first and last nodes are boundary nodes; the homogeneous Dirichlet
/// value 0 is pinned there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossSection {
    pub length: f64,
    pub n_z: usize,
}

impl CrossSection {
    pub fn new(length: f64, n_z: usize) -> Result<Self> {
        if !(length > 0.0) {
            return Err(Error::InvalidParam(format!("length must be > 0, got {length}")));
        }
        if n_z < 3 {
            return Err(Error::GridTooSmall(format!("n_z must be >= 3, got {n_z}")));
        }
        Ok(CrossSection { length, n_z })
    }

    pub fn dz(&self) -> f64 {
        self.length / (self.n_z - 1) as f64
    }

    pub fn z(&self, iz: usize) -> f64 {
        iz as f64 * self.dz()
    }

    /// Index of the midpoint node (grids are built with odd n_z so this is exact).
    pub fn mid_index(&self) -> usize {
        (self.n_z - 1) / 2
    }
}

/// Truncated tube D × (y_min, y_max) with `n_y` longitudinal nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TubeGrid {
    pub cross_section: CrossSection,
    pub y_min: f64,
    pub y_max: f64,
    pub n_y: usize,
}

impl TubeGrid {
    pub fn new(cross_section: CrossSection, y_min: f64, y_max: f64, n_y: usize) -> Result<Self> {
        if !(y_min < y_max) {
            return Err(Error::InvalidParam(format!(
                "y_min < y_max required, got [{y_min}, {y_max}]"
            )));
        }
        if n_y < 3 {
            return Err(Error::GridTooSmall(format!("n_y must be >= 3, got {n_y}")));
        }
        Ok(TubeGrid { cross_section, y_min, y_max, n_y })
    }

    /// Symmetric tube (-half, half) with an odd node count so y = 0 is a node.
    pub fn symmetric(cross_section: CrossSection, half_width: f64, dy: f64) -> Result<Self> {
        let half_cells = (half_width / dy).round() as usize;
        if half_cells == 0 {
            return Err(Error::GridTooSmall("tube half-width under one cell".into()));
        }
        let half = half_cells as f64 * dy;
        Self::new(cross_section, -half, half, 2 * half_cells + 1)
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.n_y - 1) as f64
    }

    pub fn y(&self, iy: usize) -> f64 {
        self.y_min + iy as f64 * self.dy()
    }

    /// Index of the y = 0 (or longitudinal-center) node.
    pub fn center_index(&self) -> usize {
        (self.n_y - 1) / 2
    }
}

/// Samples over the cross-section alone: Φ(z), V(z,τ) and friends.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileField {
    pub cross_section: CrossSection,
    pub values: Array1<f64>,
    pub time_tag: f64,
}

impl ProfileField {
    pub fn zeros(cross_section: CrossSection) -> Self {
        ProfileField {
            cross_section,
            values: Array1::zeros(cross_section.n_z),
            time_tag: 0.0,
        }
    }

    pub fn from_fn(cross_section: CrossSection, f: impl Fn(f64) -> f64) -> Self {
        let mut field = Self::zeros(cross_section);
        for iz in 1..cross_section.n_z - 1 {
            field.values[iz] = f(cross_section.z(iz));
        }
        field
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().cloned().fold(0.0_f64, f64::max)
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("profile field"))
        }
    }
}

/// Samples over the tube: u(z,y,t), v(z,y,τ), w(z,ξ,τ).
/// Layout is `values[[iy, iz]]`: one row per longitudinal node.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeField {
    pub grid: TubeGrid,
    pub values: Array2<f64>,
    pub time_tag: f64,
}

impl TubeField {
    pub fn zeros(grid: TubeGrid) -> Self {
        TubeField {
            grid,
            values: Array2::zeros((grid.n_y, grid.cross_section.n_z)),
            time_tag: 0.0,
        }
    }

    pub fn from_fn(grid: TubeGrid, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut field = Self::zeros(grid);
        for iy in 1..grid.n_y - 1 {
            for iz in 1..grid.cross_section.n_z - 1 {
                field.values[[iy, iz]] = f(grid.cross_section.z(iz), grid.y(iy));
            }
        }
        field
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().cloned().fold(0.0_f64, f64::max)
    }

    /// Discrete L¹ norm (cell-weighted sum of absolute values).
    pub fn mass(&self) -> f64 {
        let cell = self.grid.dy() * self.grid.cross_section.dz();
        self.values.iter().map(|v| v.abs()).sum::<f64>() * cell
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("tube field"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_reaction_coefficient_only_above_two() {
        let slow = Params::new(4.0).unwrap();
        assert_eq!(slow.reaction_coefficient, Some(0.5));
        let linear = Params::new(2.0).unwrap();
        assert_eq!(linear.reaction_coefficient, None);
        assert!(linear.reaction().is_err());
        assert!(Params::new(1.5).is_err());
    }

    #[test]
    fn cross_section_spacing() {
        let cs = CrossSection::new(1.0, 17).unwrap();
        assert!((cs.dz() - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(cs.mid_index(), 8);
        assert!(CrossSection::new(1.0, 2).is_err());
        assert!(CrossSection::new(-1.0, 9).is_err());
    }

    #[test]
    fn symmetric_tube_contains_origin_node() {
        let cs = CrossSection::new(1.0, 9).unwrap();
        let grid = TubeGrid::symmetric(cs, 4.0, 0.25).unwrap();
        assert_eq!(grid.n_y % 2, 1);
        assert!(grid.y(grid.center_index()).abs() < 1e-14);
        assert!((grid.dy() - 0.25).abs() < 1e-14);
    }

    #[test]
    fn tube_field_mass_and_sup() {
        let cs = CrossSection::new(1.0, 5).unwrap();
        let grid = TubeGrid::symmetric(cs, 1.0, 0.5).unwrap();
        let mut f = TubeField::zeros(grid);
        f.values[[2, 2]] = 3.0;
        assert_eq!(f.sup(), 3.0);
        assert!((f.mass() - 3.0 * 0.5 * 0.25).abs() < 1e-15);
    }
}
