//! Coordinates on the Poincaré disk.
//!
//! A point of the upper hyperboloid sheet is labelled by `(τ, φ)`; its
//! stereographic image in the open unit disk is `ζ = e^{iφ} tanh(τ/2)`. The
//! SU(1,1) displacements act on the disk by the Möbius maps `ζ ↦ (ζ+δ)/(1+δ̄ζ)`.

use num_complex::Complex64;
#[allow(unused_imports)] // unused only when another crate links std into num-traits
use num_traits::Float;

use crate::math::wrap_angle;
use crate::{Error, Result};

/// Points with `|ζ| ≥ 1 − DISK_GUARD` are rejected: every closed form divides
/// by `1 − |ζ|²`.
pub const DISK_GUARD: f64 = 1e-15;

/// Largest hyperbolic radius whose disk image still passes [`DISK_GUARD`].
pub fn max_tau() -> f64 {
    2.0 * (1.0 - DISK_GUARD).atanh()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicPoint {
    tau: f64,
    phi: f64,
}

impl HyperbolicPoint {
    /// `phi` is reduced into `[0, 2π)`.
    pub fn new(tau: f64, phi: f64) -> Result<Self> {
        if !tau.is_finite() || !phi.is_finite() {
            return Err(Error::invalid("hyperbolic coordinates must be finite"));
        }
        if tau.abs() > max_tau() {
            return Err(Error::invalid("|tau| maps onto the disk boundary"));
        }
        Ok(Self {
            tau,
            phi: wrap_angle(phi),
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// A point strictly inside the unit disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint(Complex64);

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint(Complex64 { re: 0.0, im: 0.0 });

    pub fn new(z: Complex64) -> Result<Self> {
        if !(z.re.is_finite() && z.im.is_finite()) || z.norm() >= 1.0 - DISK_GUARD {
            return Err(Error::OutsideDisk { re: z.re, im: z.im });
        }
        Ok(Self(z))
    }

    pub fn from_xy(x: f64, p: f64) -> Result<Self> {
        Self::new(Complex64::new(x, p))
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        Self::new(Complex64::from_polar(r, theta))
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        self.0
    }

    #[inline]
    pub fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    #[inline]
    pub fn conj(&self) -> DiskPoint {
        DiskPoint(self.0.conj())
    }
}

impl From<DiskPoint> for Complex64 {
    fn from(p: DiskPoint) -> Self {
        p.0
    }
}

pub fn disk_from_hyperbolic(p: HyperbolicPoint) -> DiskPoint {
    let r = (0.5 * p.tau).tanh();
    DiskPoint(Complex64::from_polar(r, p.phi))
}

/// Inverse stereographic map: `τ = 2 artanh|ζ|`, `φ = arg ζ` (taken as 0 at
/// the origin).
pub fn hyperbolic_from_disk(z: DiskPoint) -> HyperbolicPoint {
    let r = z.0.norm();
    if r == 0.0 {
        return HyperbolicPoint { tau: 0.0, phi: 0.0 };
    }
    let tau = 2.0 * r.atanh();
    HyperbolicPoint {
        tau,
        phi: wrap_angle(z.0.arg()),
    }
}

/// Möbius addition `(ζ + δ) / (1 + δ̄ ζ)`: the disk image of `D(δ)` acting on
/// the coherent-state label `ζ`.
pub fn mobius_add(z: DiskPoint, d: Complex64) -> Result<DiskPoint> {
    if !(d.re.is_finite() && d.im.is_finite()) || d.norm() >= 1.0 {
        return Err(Error::OutsideDisk { re: d.re, im: d.im });
    }
    let one = Complex64::new(1.0, 0.0);
    DiskPoint::new((z.0 + d) / (one + d.conj() * z.0))
}

/// Hyperbolic counterpart of the Bloch vector, `(cosh τ, sinh τ cos φ, sinh τ sin φ)`.
pub fn bloch_vector(p: HyperbolicPoint) -> [f64; 3] {
    let (s, c) = (p.tau.sinh(), p.tau.cosh());
    [c, s * p.phi.cos(), s * p.phi.sin()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, PI, TAU};
    use proptest::prelude::*;

    /// tanh from its exponential series, kept away from libm.
    fn tanh_series(x: f64) -> f64 {
        let mut e = 0.0;
        let mut term = 1.0;
        for n in 0..60 {
            e += term;
            term *= 2.0 * x / (n as f64 + 1.0);
        }
        (e - 1.0) / (e + 1.0)
    }

    #[test]
    fn origin_is_fixed() {
        let z = disk_from_hyperbolic(HyperbolicPoint::new(0.0, 1.234).unwrap());
        assert_eq!(z.value(), Complex64::new(0.0, 0.0));
        let h = hyperbolic_from_disk(DiskPoint::ORIGIN);
        assert_eq!((h.tau(), h.phi()), (0.0, 0.0));
    }

    #[test]
    fn stereographic_examples() {
        let expected = tanh_series(0.75);
        assert!((expected - 0.635149).abs() < 1e-6);
        let z = disk_from_hyperbolic(HyperbolicPoint::new(1.5, 0.0).unwrap());
        assert!((z.value() - Complex64::new(expected, 0.0)).norm() < 1e-15);
        let z = disk_from_hyperbolic(HyperbolicPoint::new(1.5, PI).unwrap());
        assert!((z.value() - Complex64::new(-expected, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inverse_examples() {
        let h = hyperbolic_from_disk(DiskPoint::from_xy(tanh_series(0.75), 0.0).unwrap());
        assert!((h.tau() - 1.5).abs() < 1e-12);
        assert_eq!(h.phi(), 0.0);

        // artanh(0.5) = ½ ln 3
        let h = hyperbolic_from_disk(DiskPoint::from_xy(0.0, 0.5).unwrap());
        assert!((h.tau() - 3f64.ln()).abs() < 1e-14);
        assert!((h.tau() - 1.098612).abs() < 1e-6);
        assert!((h.phi() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_boundary() {
        assert!(DiskPoint::from_xy(1.0, 0.0).is_err());
        assert!(DiskPoint::from_xy(0.6, 0.8).is_err());
        assert!(DiskPoint::from_xy(1.0 - 1e-16, 0.0).is_err());
        assert!(DiskPoint::from_xy(0.999_999, 0.0).is_ok());
        assert!(HyperbolicPoint::new(f64::NAN, 0.0).is_err());
        assert!(HyperbolicPoint::new(100.0, 0.0).is_err());
        assert!(mobius_add(DiskPoint::ORIGIN, Complex64::new(0.0, 1.0)).is_err());
    }

    #[test]
    fn mobius_examples() {
        let d = Complex64::new(0.2, -0.4);
        assert_eq!(mobius_add(DiskPoint::ORIGIN, d).unwrap().value(), d);
        let z = DiskPoint::from_xy(0.5, 0.0).unwrap();
        let got = mobius_add(z, Complex64::new(0.3, 0.0)).unwrap().value();
        assert!((got.re - 0.8 / 1.15).abs() < 1e-15 && got.im == 0.0);
        assert!((got.re - 0.695652).abs() < 1e-6);
        let z = DiskPoint::from_xy(-0.31, 0.77).unwrap();
        assert_eq!(mobius_add(z, Complex64::new(0.0, 0.0)).unwrap(), z);
    }

    #[test]
    fn bloch_examples() {
        let v = bloch_vector(HyperbolicPoint::new(0.0, 0.0).unwrap());
        assert_eq!(v, [1.0, 0.0, 0.0]);
        let v = bloch_vector(HyperbolicPoint::new(1.5, 0.0).unwrap());
        assert!((v[0] - 2.352410).abs() < 1e-6 && (v[1] - 2.129279).abs() < 1e-6 && v[2] == 0.0);
        let v = bloch_vector(HyperbolicPoint::new(1.5, FRAC_PI_2).unwrap());
        assert!(
            (v[0] - 2.352410).abs() < 1e-6 && v[1].abs() < 1e-15 && (v[2] - 2.129279).abs() < 1e-6
        );
    }

    fn disk_point() -> impl Strategy<Value = DiskPoint> {
        (0.0..0.999f64, 0.0..TAU).prop_map(|(r, t)| DiskPoint::from_polar(r, t).unwrap())
    }

    proptest! {
        #[test]
        fn hyperboloid_constraint(tau in -20.0..20.0f64, phi in 0.0..TAU) {
            let n = bloch_vector(HyperbolicPoint::new(tau, phi).unwrap());
            let lhs = n[0] * n[0] - n[1] * n[1] - n[2] * n[2];
            // relative to the size of the components being cancelled
            prop_assert!((lhs - 1.0).abs() <= 1e-12 * n[0] * n[0]);
            prop_assert!(n[0] >= 1.0);
        }

        #[test]
        fn round_trip(tau in 0.0..6.0f64, phi in -10.0..10.0f64) {
            let p = HyperbolicPoint::new(tau, phi).unwrap();
            let back = hyperbolic_from_disk(disk_from_hyperbolic(p));
            prop_assert!((back.tau() - p.tau()).abs() <= 1e-12 * p.tau().max(1.0));
            if tau > 1e-6 {
                let dphi = (back.phi() - p.phi()).rem_euclid(TAU);
                prop_assert!(dphi.min(TAU - dphi) < 1e-12);
            }
        }

        #[test]
        fn mobius_stays_inside(z in disk_point(), d1 in disk_point(), d2 in disk_point()) {
            let w = mobius_add(z, d1.value());
            prop_assume!(w.is_ok());
            let w = w.unwrap();
            prop_assert!(w.value().norm() < 1.0);
            if let Ok(u) = mobius_add(w, d2.value()) {
                prop_assert!(u.value().norm() < 1.0);
            }
        }
    }
}
