//! Wigner distributions `W(ζ) = tr[ρ D(ζ) Π D†(ζ)]` on the Poincaré disk.
//!
//! No `2/π`-style prefactor is applied: a coherent state has `W(ζ) = 1` at
//! its own label.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::geometry::DiskPoint;
use crate::math::cexp;
use crate::states::{ln_one_minus_norm_sqr, BargmannIndex, CircularState};
use crate::{Error, Result};

/// Cells with `|ζ| ≥ 1 − MASK_MARGIN` are left out of every field.
pub const MASK_MARGIN: f64 = 1e-9;

/// Largest tolerated `max |Im W| / max |W|` for a Hermitian state.
pub const IMAG_RESIDUE_TOLERANCE: f64 = 1e-8;

/// Square sampling lattice over `[−r_max, r_max]²` in stereographic
/// coordinates `ζ = x + ip`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpaceGrid {
    nx: usize,
    np: usize,
    extent: f64,
}

impl PhaseSpaceGrid {
    pub fn new(nx: usize, np: usize, extent: f64) -> Result<Self> {
        if nx < 2 || np < 2 {
            return Err(Error::invalid("grid needs at least 2 samples per axis"));
        }
        if !(extent > 0.0 && extent < 1.0) {
            return Err(Error::invalid("grid extent must lie in (0, 1)"));
        }
        Ok(Self { nx, np, extent })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn np(&self) -> usize {
        self.np
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spacing between neighbouring samples along x.
    pub fn dx(&self) -> f64 {
        2.0 * self.extent / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * self.extent / (self.np - 1) as f64
    }

    /// Written so that `x(i) = −x(nx−1−i)` holds bit for bit.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        let m = (self.nx - 1) as f64;
        self.extent * (2.0 * i as f64 - m) / m
    }

    #[inline]
    pub fn p(&self, j: usize) -> f64 {
        let m = (self.np - 1) as f64;
        self.extent * (2.0 * j as f64 - m) / m
    }

    /// Row-major index, p outer and x inner.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    pub fn zeta(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x(i), self.p(j))
    }

    #[inline]
    pub fn masked_in(&self, i: usize, j: usize) -> bool {
        self.zeta(i, j).norm() < 1.0 - MASK_MARGIN
    }

    /// The disk point of a masked-in cell.
    pub fn point(&self, i: usize, j: usize) -> Option<DiskPoint> {
        if self.masked_in(i, j) {
            DiskPoint::new(self.zeta(i, j)).ok()
        } else {
            None
        }
    }
}

/// Real samples on a [`PhaseSpaceGrid`]. Masked-out cells hold `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: PhaseSpaceGrid,
    values: Vec<f64>,
    max_abs_imag_discarded: f64,
}

impl ScalarField {
    /// Wraps precomputed values. Masked-out cells are forced to `NaN`.
    pub fn from_values(
        grid: PhaseSpaceGrid,
        mut values: Vec<f64>,
        max_abs_imag_discarded: f64,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid("value count does not match the grid"));
        }
        for (idx, v) in values.iter_mut().enumerate() {
            let (i, j) = grid.coords(idx);
            if !grid.masked_in(i, j) {
                *v = f64::NAN;
            }
        }
        Ok(Self {
            grid,
            values,
            max_abs_imag_discarded,
        })
    }

    /// Evaluates `f` on every masked-in cell, keeping the real part and
    /// recording the largest discarded imaginary part.
    pub fn from_fn<F>(grid: PhaseSpaceGrid, mut f: F) -> Result<Self>
    where
        F: FnMut(DiskPoint) -> Result<Complex64>,
    {
        let mut values = alloc::vec![f64::NAN; grid.len()];
        let mut imag: f64 = 0.0;
        for j in 0..grid.np {
            for i in 0..grid.nx {
                if let Some(z) = grid.point(i, j) {
                    let w = f(z)?;
                    values[grid.index(i, j)] = w.re;
                    imag = imag.max(w.im.abs());
                }
            }
        }
        Ok(Self {
            grid,
            values,
            max_abs_imag_discarded: imag,
        })
    }

    pub fn grid(&self) -> &PhaseSpaceGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.values[self.grid.index(i, j)];
        (!v.is_nan()).then_some(v)
    }

    pub fn max_abs_imag_discarded(&self) -> f64 {
        self.max_abs_imag_discarded
    }

    /// Largest `|value|` over masked-in cells.
    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .filter(|v| !v.is_nan())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(min, max)` over masked-in cells.
    pub fn range(&self) -> Option<(f64, f64)> {
        let mut it = self.values.iter().copied().filter(|v| !v.is_nan());
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v))))
    }

    /// Copy with every value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            max_abs_imag_discarded: self.max_abs_imag_discarded * c.abs(),
        }
    }

    /// Errors when the discarded imaginary part is not negligible.
    pub fn check_imaginary_residue(&self) -> Result<()> {
        let scale = self.max_abs();
        if self.max_abs_imag_discarded > IMAG_RESIDUE_TOLERANCE * scale {
            return Err(Error::Numerical(alloc::format!(
                "imaginary residue {} exceeds {} of the field maximum {}",
                self.max_abs_imag_discarded,
                IMAG_RESIDUE_TOLERANCE,
                scale
            )));
        }
        Ok(())
    }
}

/// Single term `tr[|ζᵢ⟩⟨ζⱼ| Π(ζ)] = ⟨ζⱼ|D(ζ) Π D†(ζ)|ζᵢ⟩`, evaluated as
/// `e^{2ik arg(A/B)} ⟨(ζⱼ−ζ)/A| Π |(ζᵢ−ζ)/B⟩` with `A = 1 − ζⱼζ*` and
/// `B = 1 − ζᵢζ*`.
pub fn wigner_term(k: BargmannIndex, zi: DiskPoint, zj: DiskPoint, z: DiskPoint) -> Complex64 {
    let kv = k.value();
    let (zi, zj, z) = (zi.value(), zj.value(), z.value());
    let one = Complex64::new(1.0, 0.0);
    let a = one - zj * z.conj();
    let b = one - zi * z.conj();
    let u = (zj - z) / a;
    let v = (zi - z) / b;
    // 1 − |u|² = (1 − |ζⱼ|²)(1 − |ζ|²) / |A|², which stays accurate near the rim.
    let ln_z = ln_one_minus_norm_sqr(z);
    let ln_u = ln_one_minus_norm_sqr(zj) + ln_z - 2.0 * libm::log(a.norm());
    let ln_v = ln_one_minus_norm_sqr(zi) + ln_z - 2.0 * libm::log(b.norm());
    let base = one + u.conj() * v;
    let log = Complex64::new(
        kv * (ln_u + ln_v) - 2.0 * kv * libm::log(base.norm()),
        2.0 * kv * ((a / b).arg() - base.arg()),
    );
    cexp(log)
}

/// `[(1−|ζ|²)/(1+|ζ|²)]^{2k}`, the Wigner function of the reference state
/// `|k,0⟩`.
pub fn wigner_coherent(k: BargmannIndex, z: DiskPoint) -> f64 {
    let r2 = z.norm_sqr();
    libm::exp(2.0 * k.value() * (libm::log1p(-r2) - libm::log1p(r2)))
}

/// Large-`k` Gaussian approximation `e^{−4k|ζ|²}` of [`wigner_coherent`].
pub fn wigner_coherent_gaussian(k: BargmannIndex, z: DiskPoint) -> f64 {
    libm::exp(-4.0 * k.value() * z.norm_sqr())
}

/// `W(ζ)` of the circular superposition. Hermitian-conjugate pairs are
/// summed as `2 Re`, so only the diagonal contributes an imaginary part.
pub fn wigner_value(state: &CircularState, z: DiskPoint, normalize: bool) -> Complex64 {
    let k = state.k();
    let pts = state.points();
    let mut diag = Complex64::new(0.0, 0.0);
    let mut off = 0.0;
    for (i, &a) in pts.iter().enumerate() {
        diag += wigner_term(k, a, a, z);
        for &b in &pts[i + 1..] {
            off += wigner_term(k, a, b, z).re;
        }
    }
    let w = diag + 2.0 * off;
    if normalize {
        w / state.norm_sqr()
    } else {
        w
    }
}

/// Samples [`wigner_value`] on the grid and checks the imaginary residue.
pub fn wigner_circular(
    state: &CircularState,
    grid: PhaseSpaceGrid,
    normalize: bool,
) -> Result<ScalarField> {
    let field = ScalarField::from_fn(grid, |z| Ok(wigner_value(state, z, normalize)))?;
    field.check_imaginary_residue()?;
    Ok(field)
}
