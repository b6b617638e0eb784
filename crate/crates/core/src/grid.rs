//! One-dimensional finite-volume grids on the unit interval.
//!
//! Irregular grids perturb the interior faces of a uniform grid using a fixed
//! 64-bit linear congruential generator, so a given `(n_cells, seed,
//! perturb_fraction)` produces bit-identical faces on every platform and in
//! any language that reimplements the recipe.

use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Smallest grid the Fromm stencil can be applied to (it reaches `j - 2`).
pub const MIN_CELLS: usize = 4;

/// Largest accepted perturbation fraction. Beyond this adjacent faces may
/// cross.
pub const MAX_PERTURB_FRACTION: f64 = 0.45;

/// Perturbation fraction used by the presets.
pub const DEFAULT_PERTURB_FRACTION: f64 = 0.1;

const LCG_MULTIPLIER: u64 = 6364136223846793005;
const LCG_INCREMENT: u64 = 1442695040888963407;

/// The linear congruential generator that drives grid irregularity.
///
/// `state <- 6364136223846793005 * state + 1442695040888963407 (mod 2^64)`,
/// and each draw returns the top 53 bits of the new state scaled to `[0, 1)`.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub fn new(seed: u64) -> Self {
        Lcg { state: seed }
    }

    pub fn next_unit(&mut self) -> f64 {
        self.state = self
            .state
            .wrapping_mul(LCG_MULTIPLIER)
            .wrapping_add(LCG_INCREMENT);
        (self.state >> 11) as f64 / (1u64 << 53) as f64
    }

    /// A draw mapped to `[-1, 1)`.
    fn next_signed(&mut self) -> f64 {
        2.0 * self.next_unit() - 1.0
    }
}

/// A 1D finite-volume grid on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    faces: Vec<f64>,
    centers: Vec<f64>,
    volumes: Vec<f64>,
}

impl Grid1D {
    /// Builds a grid from its face coordinates, checking that they start at 0,
    /// end at 1 and increase strictly.
    pub fn from_faces(faces: Vec<f64>) -> Result<Self> {
        if faces.len() < 2 {
            return Err(Error::InvalidFaces("need at least two faces".into()));
        }
        if faces[0] != 0.0 || faces[faces.len() - 1] != 1.0 {
            return Err(Error::InvalidFaces(format!(
                "boundary faces must be 0 and 1, got {} and {}",
                faces[0],
                faces[faces.len() - 1]
            )));
        }
        if let Some(i) = faces.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidFaces(format!(
                "faces not strictly increasing at index {}: {} -> {}",
                i,
                faces[i],
                faces[i + 1]
            )));
        }
        let centers = faces.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let volumes = faces.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(Grid1D {
            faces,
            centers,
            volumes,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.volumes.len()
    }

    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// Nominal spacing `1 / n_cells`, the `h` used for refinement ratios and
    /// CFL-based time steps.
    pub fn nominal_spacing(&self) -> f64 {
        1.0 / self.n_cells() as f64
    }

    /// Plain-text dump: one face per line, 17 significant digits.
    pub fn dump(&self) -> String {
        let mut out = String::with_capacity(self.faces.len() * 24);
        for x in &self.faces {
            let _ = writeln!(out, "{x:.16e}");
        }
        out
    }
}

fn check_cells(n_cells: usize) -> Result<()> {
    if n_cells < MIN_CELLS {
        return Err(Error::TooFewCells {
            got: n_cells,
            min: MIN_CELLS,
        });
    }
    Ok(())
}

fn check_fraction(perturb_fraction: f64) -> Result<()> {
    if !(0.0..=MAX_PERTURB_FRACTION).contains(&perturb_fraction) {
        return Err(Error::PerturbFraction(perturb_fraction));
    }
    Ok(())
}

/// Uniform grid with faces at `i / n_cells`.
pub fn make_regular(n_cells: usize) -> Result<Grid1D> {
    check_cells(n_cells)?;
    let n = n_cells as f64;
    let faces = (0..=n_cells).map(|i| i as f64 / n).collect();
    Grid1D::from_faces(faces)
}

/// Builds faces `i/N + d(i) * r * h` for the interior, where `d(i)` is a
/// displacement in `[-1, 1)`.
fn perturbed(n_cells: usize, r: f64, mut displacement: impl FnMut(usize) -> f64) -> Result<Grid1D> {
    let n = n_cells as f64;
    let h = 1.0 / n;
    let mut faces = Vec::with_capacity(n_cells + 1);
    faces.push(0.0);
    for i in 1..n_cells {
        faces.push(i as f64 / n + displacement(i) * r * h);
    }
    faces.push(1.0);
    Grid1D::from_faces(faces)
}

/// Irregular grid: each interior face of the uniform grid is moved by
/// `(2u - 1) * r * h`, with one LCG draw per face from left to right.
///
/// Every cell volume lies in `[(1 - 2r) h, (1 + 2r) h]`.
pub fn make_irregular(n_cells: usize, seed: u64, perturb_fraction: f64) -> Result<Grid1D> {
    check_cells(n_cells)?;
    check_fraction(perturb_fraction)?;
    let mut rng = Lcg::new(seed);
    perturbed(n_cells, perturb_fraction, |_| rng.next_signed())
}

/// Irregular grid whose face displacements repeat with the given period.
///
/// The pattern holds `period` LCG draws: draws 1..period-1 go to pattern
/// slots 1..period-1 and the last draw to slot 0, and face `i` uses slot
/// `i % period`. With `n_cells == period` the result is bit-identical to
/// [`make_irregular`] with the same seed, and refining by two keeps the same
/// mix of local stencil shapes at every level.
pub fn make_irregular_tiled(
    n_cells: usize,
    period: usize,
    seed: u64,
    perturb_fraction: f64,
) -> Result<Grid1D> {
    check_cells(n_cells)?;
    check_fraction(perturb_fraction)?;
    if period == 0 {
        return Err(Error::InvalidFaces("tile period must be positive".into()));
    }
    let mut rng = Lcg::new(seed);
    let mut pattern = vec![0.0; period];
    for slot in (1..period).chain(std::iter::once(0)) {
        pattern[slot] = rng.next_signed();
    }
    perturbed(n_cells, perturb_fraction, |i| pattern[i % period])
}

/// How irregular levels of a family relate to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IrregularLayout {
    /// The coarsest level's displacement pattern repeated at every level.
    #[default]
    Tiled,
    /// A fresh [`make_irregular`] draw per level with seed `seed + k`.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Regular,
    Irregular,
}

impl GridKind {
    pub fn name(self) -> &'static str {
        match self {
            GridKind::Regular => "regular",
            GridKind::Irregular => "irregular",
        }
    }
}

/// Parameters of a refinement family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub kind: GridKind,
    pub base_cells: usize,
    pub n_levels: usize,
    pub seed: u64,
    pub perturb_fraction: f64,
    pub layout: IrregularLayout,
}

/// Level `k` has `base_cells * 2^k` cells.
pub fn grid_family(spec: &FamilySpec) -> Result<Vec<Grid1D>> {
    if spec.n_levels < 2 {
        return Err(Error::TooFewLevels(spec.n_levels));
    }
    (0..spec.n_levels)
        .map(|k| {
            let n_cells = spec.base_cells << k;
            match (spec.kind, spec.layout) {
                (GridKind::Regular, _) => make_regular(n_cells),
                (GridKind::Irregular, IrregularLayout::Independent) => make_irregular(
                    n_cells,
                    spec.seed.wrapping_add(k as u64),
                    spec.perturb_fraction,
                ),
                (GridKind::Irregular, IrregularLayout::Tiled) => {
                    make_irregular_tiled(n_cells, spec.base_cells, spec.seed, spec.perturb_fraction)
                }
            }
        })
        .collect()
}
