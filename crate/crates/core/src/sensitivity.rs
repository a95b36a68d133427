//! Displacement overlaps `S(δ) = |⟨ψ|D(δ)|ψ⟩|²` and directional
//! first-orthogonality radii.

use num_complex::Complex64;

use crate::geometry::DiskPoint;
use crate::math::cexp;
use crate::states::{ln_one_minus_norm_sqr, BargmannIndex, CircularState};
use crate::wigner::{PhaseSpaceGrid, ScalarField};
use crate::{Error, Result};

/// `S` below this value counts as orthogonal.
pub const ZERO_THRESHOLD: f64 = 1e-6;
/// Radius beyond which [`first_zero_radius`] gives up.
pub const ZERO_SCAN_LIMIT: f64 = 0.5;
/// Bisection resolution of [`first_zero_radius`].
pub const ZERO_RESOLUTION: f64 = 1e-5;
/// Coarse scan step of [`first_zero_radius`].
const SCAN_STEP: f64 = 5e-4;

/// One evaluation of the overlap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementSample {
    pub delta: Complex64,
    pub value: f64,
}

fn check_delta(d: Complex64) -> Result<()> {
    if !(d.re.is_finite() && d.im.is_finite()) || d.norm() >= 1.0 {
        return Err(Error::OutsideDisk { re: d.re, im: d.im });
    }
    Ok(())
}

/// `⟨ζᵢ|D(δ)|ζⱼ⟩ = e^{−2ik arg(1+δ*ζⱼ)} ⟨ζᵢ|ζⱼ′⟩` with
/// `ζⱼ′ = (δ+ζⱼ)/(1+δ*ζⱼ)`.
pub fn overlap_term(
    k: BargmannIndex,
    zi: DiskPoint,
    zj: DiskPoint,
    d: Complex64,
) -> Result<Complex64> {
    check_delta(d)?;
    Ok(overlap_term_unchecked(k.value(), zi.value(), zj.value(), d))
}

#[inline]
fn overlap_term_unchecked(k: f64, zi: Complex64, zj: Complex64, d: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let c = one + d.conj() * zj;
    let shifted = (d + zj) / c;
    // 1 − |ζⱼ′|² = (1 − |δ|²)(1 − |ζⱼ|²) / |1 + δ*ζⱼ|²
    let ln_shifted =
        ln_one_minus_norm_sqr(d) + ln_one_minus_norm_sqr(zj) - 2.0 * libm::log(c.norm());
    let base = one - zi.conj() * shifted;
    let re = k * (ln_one_minus_norm_sqr(zi) + ln_shifted) - 2.0 * k * libm::log(base.norm());
    let im = -2.0 * k * (c.arg() + base.arg());
    cexp(Complex64::new(re, im))
}

/// `⟨○|D(δ)|○⟩`, divided by `‖○‖²` when `normalize` is set.
pub fn overlap_amplitude(
    state: &CircularState,
    d: Complex64,
    normalize: bool,
) -> Result<Complex64> {
    check_delta(d)?;
    let k = state.k().value();
    let mut sum = Complex64::new(0.0, 0.0);
    for a in state.points() {
        for b in state.points() {
            sum += overlap_term_unchecked(k, a.value(), b.value(), d);
        }
    }
    Ok(if normalize {
        sum / state.norm_sqr()
    } else {
        sum
    })
}

/// `S(δ) = |⟨○|D(δ)|○⟩|²`; with `normalize` set `S(0) = 1`.
pub fn overlap_circular(state: &CircularState, d: Complex64, normalize: bool) -> Result<f64> {
    overlap_amplitude(state, d, normalize).map(|a| a.norm_sqr())
}

pub fn sample(state: &CircularState, d: Complex64, normalize: bool) -> Result<DisplacementSample> {
    Ok(DisplacementSample {
        delta: d,
        value: overlap_circular(state, d, normalize)?,
    })
}

/// `S` over the δ-plane.
pub fn overlap_grid(
    state: &CircularState,
    grid: PhaseSpaceGrid,
    normalize: bool,
) -> Result<ScalarField> {
    ScalarField::from_fn(grid, |z| {
        overlap_circular(state, z.value(), normalize).map(|s| Complex64::new(s, 0.0))
    })
}

/// Exact coherent-state overlap `|⟨0|D(δ)|0⟩|² = (1−|δ|²)^{2k}`.
pub fn sql_baseline(k: BargmannIndex, d: Complex64) -> Result<f64> {
    check_delta(d)?;
    Ok(libm::exp(2.0 * k.value() * ln_one_minus_norm_sqr(d)))
}

/// The Gaussian form `e^{−k|δ|²}` often quoted for the coherent overlap. It
/// decays half as fast as [`sql_baseline`] for small `|δ|` and is kept only as
/// a comparison.
pub fn sql_gaussian(k: BargmannIndex, d: Complex64) -> f64 {
    libm::exp(-k.value() * d.norm_sqr())
}

/// Radius of the `e^{−1}` level set of [`sql_baseline`]:
/// `√(1 − e^{−1/(2k)})`.
pub fn sql_radius(k: BargmannIndex) -> f64 {
    libm::sqrt(-libm::expm1(-0.5 / k.value()))
}

/// Smallest `r` at which `S(r e^{iθ})` drops below [`ZERO_THRESHOLD`] inside
/// an isolated dip.
///
/// `S` is scanned outward and every local minimum is refined by golden-section
/// search. The first minimum that goes under the threshold is bracketed and the
/// entry point into the sub-threshold interval bisected to
/// [`ZERO_RESOLUTION`]. A smooth monotone decay (the coherent tail) is never
/// mistaken for a zero.
pub fn first_zero_radius(state: &CircularState, theta: f64, normalize: bool) -> Result<f64> {
    let dir = Complex64::new(libm::cos(theta), libm::sin(theta));
    let s = |r: f64| overlap_circular(state, dir * r, normalize);
    first_dip_below(s, ZERO_SCAN_LIMIT, ZERO_THRESHOLD)
}

/// Dip search behind [`first_zero_radius`] for any function of the radius.
pub fn first_dip_below<F>(mut s: F, limit: f64, threshold: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let steps = libm::ceil(limit / SCAN_STEP) as usize;
    let h = limit / steps as f64;
    let mut prev2 = s(0.0)?;
    let mut prev = s(h)?;
    for i in 2..=steps {
        let r = h * i as f64;
        let cur = s(r)?;
        // local minimum of the samples at r − h
        if prev <= prev2 && prev < cur {
            let (lo, hi) = (r - 2.0 * h, r);
            let (r_min, s_min) = golden_min(&mut s, lo, hi)?;
            if s_min < threshold {
                // walk back to a sample above the threshold, then bisect the entry
                let mut a = lo;
                let mut sa = prev2;
                while sa < threshold && a > 0.0 {
                    a = (a - h).max(0.0);
                    sa = s(a)?;
                }
                if sa < threshold {
                    return Ok(0.0);
                }
                let mut b = r_min;
                while b - a > ZERO_RESOLUTION {
                    let m = 0.5 * (a + b);
                    if s(m)? < threshold {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                return Ok(0.5 * (a + b));
            }
        }
        prev2 = prev;
        prev = cur;
    }
    Err(Error::NoZeroFound { limit })
}

fn golden_min<F>(s: &mut F, mut a: f64, mut b: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = s(c)?;
    let mut fd = s(d)?;
    while b - a > 1e-9 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = s(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = s(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}
