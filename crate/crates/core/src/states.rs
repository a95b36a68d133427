//! Perelomov coherent states `|ζ,k⟩ = D(ζ)|k,0⟩`, their overlaps, and the
//! circular superpositions `Σ_j |ζ_j⟩` with `ζ_j = e^{2πij/n̄} tanh(τ̄/2)`.
//!
//! States are kept unnormalized. Consumers that need a normalized state divide
//! by [`circular_norm`] (squared) themselves.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // unused only when another crate links std into num-traits
use num_traits::Float;

use num_complex::Complex64;

use crate::geometry::{max_tau, DiskPoint};
use crate::math::{cexp, cln, ln_pochhammer_over_factorial};
use crate::{Error, Result};

/// Bargmann index `k > 0` of a positive discrete-series representation.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BargmannIndex(f64);

impl BargmannIndex {
    /// Squeezed vacuum realization `K₊ = a†²/2`.
    pub const QUARTER: BargmannIndex = BargmannIndex(0.25);
    /// One-photon squeezed realization.
    pub const THREE_QUARTERS: BargmannIndex = BargmannIndex(0.75);

    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::invalid("Bargmann index must be finite and positive"));
        }
        Ok(Self(k))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `k = (Δ + 1) / 2` for the two-mode realization with photon-number
/// asymmetry `Δ`.
pub fn bargmann_from_degeneracy(delta: u32) -> BargmannIndex {
    BargmannIndex(0.5 * (f64::from(delta) + 1.0))
}

/// `(k, n̄, τ̄)` for an `n̄`-component circular superposition.
///
/// `n̄ = 1` is accepted as the degenerate single coherent state `|tanh(τ̄/2)⟩`,
/// in which case `τ̄ = 0` is allowed too.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularStateSpec {
    k: BargmannIndex,
    n_components: usize,
    tau_bar: f64,
}

impl CircularStateSpec {
    pub fn new(k: BargmannIndex, n_components: usize, tau_bar: f64) -> Result<Self> {
        if n_components == 0 || (n_components > 1 && !n_components.is_multiple_of(2)) {
            return Err(Error::invalid(
                "number of components must be 1 or an even integer >= 2",
            ));
        }
        if !tau_bar.is_finite() || tau_bar < 0.0 || (n_components > 1 && tau_bar == 0.0) {
            return Err(Error::invalid("tau_bar must be finite and positive"));
        }
        if tau_bar > max_tau() {
            return Err(Error::invalid("tau_bar maps onto the disk boundary"));
        }
        Ok(Self {
            k,
            n_components,
            tau_bar,
        })
    }

    pub fn k(&self) -> BargmannIndex {
        self.k
    }

    pub fn n_components(&self) -> usize {
        self.n_components
    }

    pub fn tau_bar(&self) -> f64 {
        self.tau_bar
    }

    /// Common disk radius `tanh(τ̄/2)` of the components.
    pub fn radius(&self) -> f64 {
        (0.5 * self.tau_bar).tanh()
    }
}

/// `e^{iθ}` with exact values on the axes, so that grids and symmetry checks
/// see the quarter turns without rounding noise.
fn unit_phasor(j: usize, n: usize) -> Complex64 {
    let four_j = 4 * j;
    if four_j.is_multiple_of(n) {
        return match (four_j / n) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = 2.0 * PI * j as f64 / n as f64;
    Complex64::new(libm::cos(theta), libm::sin(theta))
}

/// The `n̄` component labels. Point `n̄ − j` is the exact conjugate of point
/// `j`, so the family is closed under reflection across the real axis.
pub fn component_points(spec: &CircularStateSpec) -> Vec<DiskPoint> {
    let n = spec.n_components;
    let r = spec.radius();
    let mut pts = Vec::with_capacity(n);
    for j in 0..n {
        let z = if 2 * j <= n {
            unit_phasor(j, n) * r
        } else {
            (unit_phasor(n - j, n) * r).conj()
        };
        // |z| = tanh(τ̄/2) already passed the boundary guard via max_tau.
        pts.push(DiskPoint::new(z).expect("component radius is inside the disk"));
    }
    pts
}

/// `ln(1 − |ζ|²)`.
#[inline]
pub(crate) fn ln_one_minus_norm_sqr(z: Complex64) -> f64 {
    libm::log1p(-z.norm_sqr())
}

/// Log of `[(1−|ζ₁|²)(1−|ζ₂|²)]^k (1 + s ζ₁* ζ₂)^{−2k}` with `s = −1` for the
/// plain overlap and `s = +1` for the parity-sandwiched one.
#[inline]
pub(crate) fn ln_overlap_kernel(k: f64, z1: Complex64, z2: Complex64, s: f64) -> Complex64 {
    let base = Complex64::new(1.0, 0.0) + z1.conj() * z2 * s;
    let modulus = k * (ln_one_minus_norm_sqr(z1) + ln_one_minus_norm_sqr(z2));
    Complex64::new(modulus, 0.0) - cln(base) * (2.0 * k)
}

/// Expansion coefficient `⟨k,n|ζ,k⟩ = (1−|ζ|²)^k √(Γ(2k+n)/(n!Γ(2k))) ζⁿ`.
pub fn coherent_amplitude(k: BargmannIndex, z: DiskPoint, n: usize) -> Complex64 {
    let zeta = z.value();
    if zeta.norm_sqr() == 0.0 {
        return if n == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let k = k.value();
    let ln_mod = k * ln_one_minus_norm_sqr(zeta)
        + 0.5 * ln_pochhammer_over_factorial(2.0 * k, n)
        + n as f64 * libm::log(zeta.norm());
    cexp(Complex64::new(ln_mod, n as f64 * zeta.arg()))
}

/// `⟨ζ₁|ζ₂⟩ = [(1−|ζ₁|²)(1−|ζ₂|²)]^k (1 − ζ₁*ζ₂)^{−2k}`.
pub fn coherent_overlap(k: BargmannIndex, z1: DiskPoint, z2: DiskPoint) -> Complex64 {
    cexp(ln_overlap_kernel(k.value(), z1.value(), z2.value(), -1.0))
}

/// `⟨ζ₁|Π|ζ₂⟩` with `Π = e^{iπ(K₀−k)}`; parity maps `|ζ⟩` to `|−ζ⟩`.
pub fn parity_overlap(k: BargmannIndex, z1: DiskPoint, z2: DiskPoint) -> Complex64 {
    cexp(ln_overlap_kernel(k.value(), z1.value(), z2.value(), 1.0))
}

/// Relative size of the imaginary part of a Gram sum that is tolerated before
/// the sum is declared numerically broken.
pub const GRAM_IMAG_TOLERANCE: f64 = 1e-8;

/// `‖Σ_j |ζ_j⟩‖`.
pub fn circular_norm(spec: &CircularStateSpec) -> Result<f64> {
    let pts = component_points(spec);
    gram_norm(spec.k, &pts)
}

pub(crate) fn gram_norm(k: BargmannIndex, pts: &[DiskPoint]) -> Result<f64> {
    let mut diag = 0.0;
    let mut off = 0.0;
    let mut imag = 0.0;
    for (i, &a) in pts.iter().enumerate() {
        let d = coherent_overlap(k, a, a);
        diag += d.re;
        imag += d.im;
        for &b in &pts[i + 1..] {
            off += coherent_overlap(k, a, b).re;
        }
    }
    let total = diag + 2.0 * off;
    if !(total.is_finite() && total > 0.0) || imag.abs() > GRAM_IMAG_TOLERANCE * total.abs() {
        return Err(Error::Numerical(alloc::format!(
            "Gram sum {total} + {imag}i is not a positive real"
        )));
    }
    Ok(total.sqrt())
}

/// Amplitudes on a truncated number basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FockAmplitudes {
    k: BargmannIndex,
    amps: Vec<Complex64>,
}

impl FockAmplitudes {
    pub fn k(&self) -> BargmannIndex {
        self.k
    }

    /// Largest basis index kept.
    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Coherent-state amplitudes `c_0..=c_N` in the `|k,n⟩` basis.
pub fn coherent_amplitudes(k: BargmannIndex, z: DiskPoint, cutoff: usize) -> FockAmplitudes {
    let amps = (0..=cutoff).map(|n| coherent_amplitude(k, z, n)).collect();
    FockAmplitudes { k, amps }
}

/// Single-mode realization `K₊ = a†²/2`: the coherent state written on the
/// photon-number basis `|0⟩..=|N⟩`.
///
/// For `k = ¼` the weight sits on even photon numbers,
/// `(1−|ζ|²)^{1/4} Σ √((2n)!) ζⁿ / (2ⁿ n!) |2n⟩`; for `k = ¾` on odd ones,
/// `(1−|ζ|²)^{3/4} Σ √((2n+1)!) ζⁿ / (2ⁿ n!) |2n+1⟩`.
pub fn single_mode_embedding(
    k: BargmannIndex,
    z: DiskPoint,
    cutoff: usize,
) -> Result<FockAmplitudes> {
    let offset = if k == BargmannIndex::QUARTER {
        0
    } else if k == BargmannIndex::THREE_QUARTERS {
        1
    } else {
        return Err(Error::UnsupportedRealization(k.value()));
    };
    let zeta = z.value();
    let prefactor = k.value() * ln_one_minus_norm_sqr(zeta);
    let mut amps = alloc::vec![Complex64::new(0.0, 0.0); cutoff + 1];
    let mut n = 0usize;
    while 2 * n + offset <= cutoff {
        let m = 2 * n + offset;
        let amp = if n == 0 {
            cexp(Complex64::new(prefactor, 0.0))
        } else if zeta.norm_sqr() == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let ln_fact = |x: usize| libm::lgamma(x as f64 + 1.0);
            let ln_mod =
                prefactor + 0.5 * ln_fact(m) - n as f64 * core::f64::consts::LN_2 - ln_fact(n)
                    + n as f64 * libm::log(zeta.norm());
            cexp(Complex64::new(ln_mod, n as f64 * zeta.arg()))
        };
        amps[m] = amp;
        n += 1;
    }
    Ok(FockAmplitudes { k, amps })
}

/// Two-mode squeezed number state: amplitudes of `|n, n+Δ⟩` for `n = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeAmplitudes {
    delta: u32,
    amps: Vec<Complex64>,
}

impl TwoModeAmplitudes {
    pub fn delta(&self) -> u32 {
        self.delta
    }

    /// Photon numbers `(n₁, n₂) = (n, n + Δ)` carrying `amps()[n]`.
    pub fn modes(&self, n: usize) -> (usize, usize) {
        (n, n + self.delta as usize)
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }
}

/// `(1−|ζ|²)^{(1+Δ)/2} Σ_n √((n+Δ)!/(n!Δ!)) ζⁿ |n, n+Δ⟩`, truncated at `n = N`.
pub fn two_mode_amplitudes(delta: u32, z: DiskPoint, cutoff: usize) -> TwoModeAmplitudes {
    let zeta = z.value();
    let d = f64::from(delta);
    let prefactor = 0.5 * (1.0 + d) * ln_one_minus_norm_sqr(zeta);
    let amps = (0..=cutoff)
        .map(|n| {
            if n == 0 {
                return cexp(Complex64::new(prefactor, 0.0));
            }
            if zeta.norm_sqr() == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let nf = n as f64;
            let ln_binom =
                libm::lgamma(nf + d + 1.0) - libm::lgamma(nf + 1.0) - libm::lgamma(d + 1.0);
            let ln_mod = prefactor + 0.5 * ln_binom + nf * libm::log(zeta.norm());
            cexp(Complex64::new(ln_mod, nf * zeta.arg()))
        })
        .collect();
    TwoModeAmplitudes { delta, amps }
}

/// Precomputed data for repeated evaluation of one circular superposition.
#[derive(Debug, Clone)]
pub struct CircularState {
    spec: CircularStateSpec,
    points: Vec<DiskPoint>,
    norm_sqr: f64,
}

impl CircularState {
    pub fn new(spec: CircularStateSpec) -> Result<Self> {
        let points = component_points(&spec);
        let norm = gram_norm(spec.k, &points)?;
        Ok(Self {
            spec,
            points,
            norm_sqr: norm * norm,
        })
    }

    pub fn spec(&self) -> &CircularStateSpec {
        &self.spec
    }

    pub fn k(&self) -> BargmannIndex {
        self.spec.k
    }

    pub fn points(&self) -> &[DiskPoint] {
        &self.points
    }

    /// `‖Σ_j |ζ_j⟩‖²`.
    pub fn norm_sqr(&self) -> f64 {
        self.norm_sqr
    }
}
