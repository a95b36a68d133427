//! Feature and sensitivity pipelines shared by the `contour` and `scaling`
//! commands.

use std::f64::consts::TAU;
use std::str::FromStr;

use rayon::prelude::*;
use su11_core::feature::{
    central_contour, central_feature, closing_level, radial_extent, scaling_exponent,
    zero_contours, Contour, ScalingFit,
};
use su11_core::sensitivity::{first_zero_radius, sql_radius};
use su11_core::{
    BargmannIndex, CircularState, CircularStateSpec, Error, PhaseSpaceGrid, ScalarField,
};

use crate::compute::{wigner_field, with_workers};
use crate::error::{LabError, LabResult};

/// Nodes per axis of the grids used to locate the central feature.
pub const ANALYSIS_POINTS: usize = 201;
/// Grow factor applied to the grid half-width while the feature does not fit.
const EXTENT_GROWTH: f64 = 1.25;
/// Largest half-width tried; beyond it the grid corners leave the disk.
const MAX_EXTENT: f64 = 0.7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelMode {
    /// The origin-enclosing zero contour, or an error if it is open.
    Zero,
    /// Zero if it closes, otherwise the level at which the central
    /// extremum's region first closes.
    Closing,
}

impl FromStr for LevelMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(LevelMode::Zero),
            "closing" => Ok(LevelMode::Closing),
            _ => Err(format!(
                "unknown level mode {s:?} (expected zero or closing)"
            )),
        }
    }
}

impl LevelMode {
    pub fn as_str(self) -> &'static str {
        match self {
            LevelMode::Zero => "zero",
            LevelMode::Closing => "closing",
        }
    }
}

/// Level used by `mode` on this field.
pub fn feature_level(field: &ScalarField, mode: LevelMode) -> su11_core::Result<f64> {
    match mode {
        LevelMode::Zero => Ok(0.0),
        LevelMode::Closing => closing_level(field),
    }
}

/// The origin-enclosing contour of `field` under `mode`.
pub fn feature_contour(field: &ScalarField, mode: LevelMode) -> su11_core::Result<Contour> {
    match mode {
        LevelMode::Zero => central_contour(&zero_contours(field, 0.0), (0.0, 0.0)),
        LevelMode::Closing => central_feature(field),
    }
}

/// Central Wigner feature of a circular state together with the field it was
/// extracted from.
///
/// The grid starts at a half-width of `0.5/k` and grows until the feature
/// closes inside it, so the contour is always resolved by a comparable number
/// of cells whatever `k`.
pub fn central_wigner_feature(
    state: &CircularState,
    mode: LevelMode,
    points: usize,
    workers: usize,
) -> LabResult<(Contour, ScalarField)> {
    let mut extent = (0.5 / state.k().value()).min(MAX_EXTENT);
    loop {
        let grid = PhaseSpaceGrid::new(points, points, extent)?;
        let field = wigner_field(state, grid, true, workers)?;
        match feature_contour(&field, mode) {
            Ok(c) => return Ok((c, field)),
            Err(Error::NoEnclosingContour) if extent < MAX_EXTENT => {
                extent = (extent * EXTENT_GROWTH).min(MAX_EXTENT);
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// `n` equally spaced angles starting at 0.
pub fn even_directions(n: usize) -> Vec<f64> {
    (0..n).map(|m| TAU * m as f64 / n as f64).collect()
}

pub fn extents(c: &Contour, thetas: &[f64]) -> LabResult<Vec<f64>> {
    thetas
        .iter()
        .map(|&t| radial_extent(c, t).map_err(LabError::from))
        .collect()
}

/// First zero of the overlap along each direction, in parallel. Directions
/// along which the overlap never vanishes below the scan limit give `None`.
pub fn zero_radii(
    state: &CircularState,
    thetas: &[f64],
    workers: usize,
) -> LabResult<Vec<Option<f64>>> {
    let radii: Vec<su11_core::Result<f64>> = with_workers(workers, || {
        thetas
            .par_iter()
            .map(|&t| first_zero_radius(state, t, true))
            .collect()
    })?;
    radii
        .into_iter()
        .map(|r| match r {
            Ok(r) => Ok(Some(r)),
            Err(Error::NoZeroFound { .. }) => Ok(None),
            Err(e) => Err(e.into()),
        })
        .collect()
}

/// The values that exist, or the no-zero error if none does.
pub fn present_values(radii: &[Option<f64>]) -> LabResult<Vec<f64>> {
    let found: Vec<f64> = radii.iter().flatten().copied().collect();
    if found.is_empty() {
        return Err(Error::NoZeroFound {
            limit: su11_core::sensitivity::ZERO_SCAN_LIMIT,
        }
        .into());
    }
    Ok(found)
}

/// `(max − min) / mean`.
pub fn relative_spread(values: &[f64]) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / mean(values)
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// What a scaling sweep measures at each `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingTarget {
    /// Radial extents of the central Wigner feature along the directions.
    WignerExtent,
    /// First overlap zero along the directions.
    OverlapRadius,
    /// e-folding radius of the single coherent state overlap.
    SqlRadius,
    /// `c·k^e`, for checking the fitting pipeline.
    Planted { c: f64, exponent: f64 },
}

impl ScalingTarget {
    pub fn name(&self) -> &'static str {
        match self {
            ScalingTarget::WignerExtent => "wigner-extent",
            ScalingTarget::OverlapRadius => "overlap-radius",
            ScalingTarget::SqlRadius => "sql-radius",
            ScalingTarget::Planted { .. } => "planted",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepPoint {
    pub k: f64,
    /// One value per direction (a single value for direction-free targets);
    /// `None` where the overlap has no zero along that direction.
    pub raw: Vec<Option<f64>>,
    /// Mean of the values present in `raw`, the quantity that is fitted.
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct Sweep {
    pub points: Vec<SweepPoint>,
    pub fit: ScalingFit,
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub target: ScalingTarget,
    pub ks: Vec<f64>,
    pub nbar: usize,
    pub tau: f64,
    pub thetas: Vec<f64>,
    pub mode: LevelMode,
    pub points: usize,
}

pub fn measure(spec: &SweepSpec, k: f64, workers: usize) -> LabResult<SweepPoint> {
    let kb = BargmannIndex::new(k)?;
    let state = || -> LabResult<CircularState> {
        Ok(CircularState::new(CircularStateSpec::new(
            kb, spec.nbar, spec.tau,
        )?)?)
    };
    let raw: Vec<Option<f64>> = match spec.target {
        ScalingTarget::WignerExtent => {
            let (c, _) = central_wigner_feature(&state()?, spec.mode, spec.points, workers)?;
            extents(&c, &spec.thetas)?.into_iter().map(Some).collect()
        }
        ScalingTarget::OverlapRadius => zero_radii(&state()?, &spec.thetas, workers)?,
        ScalingTarget::SqlRadius => vec![Some(sql_radius(kb))],
        ScalingTarget::Planted { c, exponent } => vec![Some(c * k.powf(exponent))],
    };
    let value = mean(&present_values(&raw)?);
    Ok(SweepPoint { k, raw, value })
}

/// Runs the sweep and fits `ln value` against `ln k`. Any failing `k` fails
/// the whole sweep, with the offending `k` in the message.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> LabResult<Sweep> {
    let mut points = Vec::with_capacity(spec.ks.len());
    for &k in &spec.ks {
        let p = measure(spec, k, workers).map_err(|e| match e {
            LabError::Numerical(m) => LabError::Numerical(format!("k = {k}: {m}")),
            other => other,
        })?;
        points.push(p);
    }
    let samples: Vec<(f64, f64)> = points.iter().map(|p| (p.k, p.value)).collect();
    let fit = scaling_exponent(&samples)?;
    Ok(Sweep { points, fit })
}
