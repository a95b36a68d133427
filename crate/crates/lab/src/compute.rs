//! Grid evaluation on a rayon pool. Every cell is computed independently and
//! the only reduction is a maximum, so results do not depend on the worker
//! count.

use rayon::prelude::*;
use su11_core::sensitivity::{overlap_circular, sql_baseline};
use su11_core::wigner::wigner_value;
use su11_core::{
    BargmannIndex, CircularState, Complex64, DiskPoint, PhaseSpaceGrid, Result, ScalarField,
};

use crate::error::{LabError, LabResult};

pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

pub fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> LabResult<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| LabError::usage(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(job))
}

/// Parallel counterpart of `ScalarField::from_fn`.
pub fn evaluate<F>(grid: PhaseSpaceGrid, workers: usize, f: F) -> LabResult<ScalarField>
where
    F: Fn(DiskPoint) -> Result<Complex64> + Sync,
{
    let cells: Vec<Result<Option<Complex64>>> = with_workers(workers, || {
        (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let (i, j) = grid.coords(idx);
                grid.point(i, j).map(&f).transpose()
            })
            .collect()
    })?;
    let mut values = Vec::with_capacity(cells.len());
    let mut imag: f64 = 0.0;
    for c in cells {
        match c? {
            Some(w) => {
                values.push(w.re);
                imag = imag.max(w.im.abs());
            }
            None => values.push(f64::NAN),
        }
    }
    Ok(ScalarField::from_values(grid, values, imag)?)
}

/// Wigner field of a circular state, rejected when the imaginary residue is
/// not negligible.
pub fn wigner_field(
    state: &CircularState,
    grid: PhaseSpaceGrid,
    normalize: bool,
    workers: usize,
) -> LabResult<ScalarField> {
    let field = evaluate(grid, workers, |z| Ok(wigner_value(state, z, normalize)))?;
    field.check_imaginary_residue()?;
    Ok(field)
}

/// `S(δ)` over the δ-plane.
pub fn overlap_field(
    state: &CircularState,
    grid: PhaseSpaceGrid,
    normalize: bool,
    workers: usize,
) -> LabResult<ScalarField> {
    evaluate(grid, workers, |d| {
        overlap_circular(state, d.value(), normalize).map(|s| Complex64::new(s, 0.0))
    })
}

/// Single coherent state baseline `(1−|δ|²)^{2k}`.
pub fn sql_field(k: BargmannIndex, grid: PhaseSpaceGrid, workers: usize) -> LabResult<ScalarField> {
    evaluate(grid, workers, |d| {
        sql_baseline(k, d.value()).map(|s| Complex64::new(s, 0.0))
    })
}
