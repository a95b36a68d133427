//! Brute-force ground truth on the truncated number basis `|k,0⟩..=|k,N⟩`.
//!
//! Nothing here uses the closed forms of [`crate::states`]: coherent states are
//! produced by applying `exp(ξK₊ − ξ*K₋)` to `|k,0⟩`, and every matrix element
//! is an explicit inner product. The vector exponential is a Chebyshev
//! expansion; [`displacement_matrix`] additionally builds the full operator two
//! independent ways.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // unused only when another crate links std into num-traits
use num_traits::Float;

use num_complex::Complex64;

use crate::geometry::{mobius_add, DiskPoint};
use crate::math::ln_pochhammer_over_factorial;
use crate::states::{BargmannIndex, CircularStateSpec};
use crate::{Error, Result};

/// Hard upper bound on any cutoff handed out by [`cutoff_for_tail`].
pub const MAX_CUTOFF: usize = 20_000;
/// Tail mass left out by the oracle's own cutoff choice. Overlaps of two
/// truncated states are off by at most this much.
pub const ORACLE_TAIL_EPS: f64 = 1e-20;
/// Largest change tolerated when the oracle cutoff is doubled.
pub const CONVERGENCE_TOLERANCE: f64 = 1e-9;
/// [`displacement_matrix`] refuses labels beyond this radius.
pub const DISPLACEMENT_RADIUS_LIMIT: f64 = 0.9;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Dense `(N+1)×(N+1)` matrix on the truncated basis, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    k: BargmannIndex,
    cutoff: usize,
    data: Vec<Complex64>,
}

impl TruncatedOperator {
    pub fn zeros(k: BargmannIndex, cutoff: usize) -> Self {
        let d = cutoff + 1;
        Self {
            k,
            cutoff,
            data: vec![ZERO; d * d],
        }
    }

    pub fn identity(k: BargmannIndex, cutoff: usize) -> Self {
        let mut m = Self::zeros(k, cutoff);
        for n in 0..=cutoff {
            m.set(n, n, ONE);
        }
        m
    }

    pub fn k(&self) -> BargmannIndex {
        self.k
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: Complex64) {
        let d = self.dim();
        self.data[row * d + col] = v;
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let mut out = Self::zeros(self.k, self.cutoff);
        for r in 0..d {
            for c in 0..d {
                out.data[c * d + r] = self.data[r * d + c].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let d = self.dim();
        assert_eq!(d, other.dim(), "dimension mismatch");
        let mut out = Self::zeros(self.k, self.cutoff);
        for r in 0..d {
            let row = &mut out.data[r * d..(r + 1) * d];
            for m in 0..d {
                let a = self.data[r * d + m];
                if a == ZERO {
                    continue;
                }
                let other_row = &other.data[m * d..(m + 1) * d];
                for (o, b) in row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim();
        (0..d)
            .map(|r| {
                self.data[r * d..(r + 1) * d]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    fn combine(&self, other: &Self, a: Complex64, b: Complex64) -> Self {
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self {
            k: self.k,
            cutoff: self.cutoff,
            data,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, ONE, ONE)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, ONE, -ONE)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            k: self.k,
            cutoff: self.cutoff,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    /// `max |A[r,c] − B[r,c]|` over rows and columns `< block`.
    pub fn max_abs_diff_on_block(&self, other: &Self, block: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..block.min(self.dim()) {
            for c in 0..block.min(self.dim()) {
                worst = worst.max((self.get(r, c) - other.get(r, c)).norm());
            }
        }
        worst
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .map(|r| {
                self.data[r * d..(r + 1) * d]
                    .iter()
                    .map(|x| x.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// `K₊[n+1,n] = √((n+1)(2k+n))` for `n = 0..N`.
fn raising_elements(k: f64, cutoff: usize) -> Vec<f64> {
    (0..cutoff)
        .map(|n| (((n + 1) as f64) * (2.0 * k + n as f64)).sqrt())
        .collect()
}

/// `(K₊, K₋, K₀)` with `K₋ = K₊†` taken entrywise.
pub fn generator_matrices(
    k: BargmannIndex,
    cutoff: usize,
) -> Result<(TruncatedOperator, TruncatedOperator, TruncatedOperator)> {
    if cutoff < 1 {
        return Err(Error::invalid("cutoff must be at least 1"));
    }
    let mut kp = TruncatedOperator::zeros(k, cutoff);
    for (n, e) in raising_elements(k.value(), cutoff).into_iter().enumerate() {
        kp.set(n + 1, n, Complex64::new(e, 0.0));
    }
    let km = kp.adjoint();
    let mut k0 = TruncatedOperator::zeros(k, cutoff);
    for n in 0..=cutoff {
        k0.set(n, n, Complex64::new(k.value() + n as f64, 0.0));
    }
    Ok((kp, km, k0))
}

/// `Π = e^{iπ(K₀−k)}`, diagonal `(−1)ⁿ`.
pub fn parity_matrix(k: BargmannIndex, cutoff: usize) -> TruncatedOperator {
    let mut p = TruncatedOperator::zeros(k, cutoff);
    for n in 0..=cutoff {
        p.set(
            n,
            n,
            Complex64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0),
        );
    }
    p
}

/// `ξ = artanh|ζ| e^{i arg ζ}`, the generator coefficient of `D(ζ)`.
fn xi_of(z: Complex64) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return ZERO;
    }
    z * (r.atanh() / r)
}

/// Full displacement operator on the truncated basis.
///
/// Two constructions are compared on the leading `⌈(N+1)/2⌉` block:
///
/// * the disentangled product `e^{ζK₊} e^{ln(1−|ζ|²)K₀} e^{−ζ*K₋}`, whose
///   triangular factors make every entry a finite sum;
/// * scaling and squaring of a degree-16 Taylor polynomial of
///   `ξK₊ − ξ*K₋`.
///
/// The second is returned. Disagreement above `1e−9` means the cutoff is
/// too small for this `ζ` and is reported as [`Error::Convergence`].
pub fn displacement_matrix(
    k: BargmannIndex,
    z: DiskPoint,
    cutoff: usize,
) -> Result<TruncatedOperator> {
    let zeta = z.value();
    if zeta.norm() > DISPLACEMENT_RADIUS_LIMIT {
        return Err(Error::invalid(format!(
            "|zeta| must not exceed {DISPLACEMENT_RADIUS_LIMIT}"
        )));
    }
    if cutoff < 1 {
        return Err(Error::invalid("cutoff must be at least 1"));
    }
    let (product, bound) = disentangled_product(k, zeta, cutoff);
    let expm = generator_exponential(k, xi_of(zeta), cutoff)?;
    let block = cutoff.div_ceil(2);
    // The finite sum cancels heavily away from the origin, so only entries
    // whose own rounding bound is small take part in the comparison.
    let mut diff = 0.0f64;
    for m in 0..block {
        for n in 0..block {
            if bound.get(m, n).re <= PRODUCT_TRUST {
                diff = diff.max((product.get(m, n) - expm.get(m, n)).norm());
            }
        }
    }
    if !(diff <= 1e-9) {
        return Err(Error::Convergence(format!(
            "disentangled and exponential displacement differ by {diff:e} on the leading {block} block at cutoff {cutoff}"
        )));
    }
    Ok(expm)
}

/// Entries of the disentangled product with a rounding bound above this are
/// left out of the cross-check.
const PRODUCT_TRUST: f64 = 1e-11;

/// `D[m,n] = Σ_{l ≤ min(m,n)} (e^{ζK₊})[m,l] (1−|ζ|²)^{k+l} (e^{−ζ*K₋})[l,n]`,
/// returned together with a per-entry rounding bound (stored in the real part).
fn disentangled_product(
    k: BargmannIndex,
    zeta: Complex64,
    cutoff: usize,
) -> (TruncatedOperator, TruncatedOperator) {
    let kv = k.value();
    let d = cutoff + 1;
    let r = zeta.norm();
    let ln_r = r.ln();
    let ln_w = (1.0 - r * r).ln();
    let phase = zeta.arg();
    // ln of the K₊ ladder product from l up to m: ½ ln[m!/l! · Γ(2k+m)/Γ(2k+l)]
    let ln_fact: Vec<f64> = (0..d).map(|n| libm::lgamma(n as f64 + 1.0)).collect();
    let ln_gam: Vec<f64> = (0..d).map(|n| libm::lgamma(2.0 * kv + n as f64)).collect();
    let ladder = |m: usize, l: usize| 0.5 * (ln_fact[m] - ln_fact[l] + ln_gam[m] - ln_gam[l]);

    let mut out = TruncatedOperator::zeros(k, cutoff);
    let mut bound = TruncatedOperator::zeros(k, cutoff);
    for m in 0..d {
        for n in 0..d {
            let mut acc = ZERO;
            let mut mass = 0.0;
            for l in 0..=m.min(n) {
                let (a, b) = (m - l, n - l);
                if r == 0.0 && (a > 0 || b > 0) {
                    continue;
                }
                let ln_mag = ladder(m, l) + ladder(n, l) - ln_fact[a] - ln_fact[b]
                    + (a + b) as f64 * if r == 0.0 { 0.0 } else { ln_r }
                    + (kv + l as f64) * ln_w;
                // ζ^a (−ζ*)^b
                let sign = if b % 2 == 0 { 1.0 } else { -1.0 };
                let arg = (a as f64 - b as f64) * phase;
                let mag = ln_mag.exp();
                mass += mag;
                acc += Complex64::from_polar(sign * mag, arg);
            }
            out.set(m, n, acc);
            let terms = (m.min(n) + 1) as f64;
            bound.set(m, n, Complex64::new(4.0 * f64::EPSILON * terms * mass, 0.0));
        }
    }
    (out, bound)
}

/// `exp(ξK₊ − ξ*K₋)` by scaling and squaring. After scaling the infinity norm
/// is at most ½, where the degree-16 Taylor remainder is below `1e−19`.
fn generator_exponential(
    k: BargmannIndex,
    xi: Complex64,
    cutoff: usize,
) -> Result<TruncatedOperator> {
    let (kp, km, _) = generator_matrices(k, cutoff)?;
    let g = kp.scale(xi).sub(&km.scale(xi.conj()));
    let norm = g.norm_inf();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    if squarings > 60 {
        return Err(Error::Numerical(
            "generator norm too large to exponentiate".into(),
        ));
    }
    let a = g.scale(Complex64::new(0.5f64.powi(squarings), 0.0));
    let id = TruncatedOperator::identity(k, cutoff);
    let mut p = id.clone();
    for j in (1..=16).rev() {
        p = id.add(&a.matmul(&p).scale(Complex64::new(1.0 / j as f64, 0.0)));
    }
    for _ in 0..squarings {
        p = p.matmul(&p);
    }
    Ok(p)
}

/// Smallest `N` with `Σ_{n>N} |c_n(k, r_max)|² < eps`, then doubled as a
/// margin for displaced arguments.
pub fn cutoff_for_tail(k: BargmannIndex, rmax: f64, eps: f64) -> Result<usize> {
    Ok((2 * tail_index(k, rmax, eps)?).max(1))
}

/// Smallest `N` with `Σ_{n>N} |c_n(k, r_max)|² < eps`, capped at half of
/// [`MAX_CUTOFF`].
///
/// Terms are summed directly in log space; the neglected tail is bounded by a
/// geometric series once the term ratio has fallen below one.
fn tail_index(k: BargmannIndex, rmax: f64, eps: f64) -> Result<usize> {
    if !(rmax > 0.0 && rmax < 1.0) {
        return Err(Error::invalid("rmax must lie in (0, 1)"));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    let kv = k.value();
    let r2 = rmax * rmax;
    let ln_r2 = r2.ln();
    let ln_w = 2.0 * kv * (1.0 - r2).ln();
    let ln_term = |n: usize| ln_w + ln_pochhammer_over_factorial(2.0 * kv, n) + n as f64 * ln_r2;
    let mut n = 0usize;
    loop {
        // ratio t_{m+1}/t_m = r²(2k+m)/(m+1); bounded by max(ratio at N+1, r²) beyond N
        let next = n + 1;
        let q = (r2 * (2.0 * kv + next as f64) / (next as f64 + 1.0)).max(r2);
        if q < 1.0 {
            let tail = ln_term(next).exp() / (1.0 - q);
            if tail < eps {
                break;
            }
        }
        n += 1;
        if 2 * n > MAX_CUTOFF {
            return Err(Error::CutoffExceeded { cap: MAX_CUTOFF });
        }
    }
    Ok(n)
}

/// Sparse representation of `ξK₊ − ξ*K₋` for vector exponentials.
struct Generator {
    raising: Vec<f64>,
    xi: Complex64,
}

impl Generator {
    fn new(k: f64, cutoff: usize, xi: Complex64) -> Self {
        Self {
            raising: raising_elements(k, cutoff),
            xi,
        }
    }

    fn dim(&self) -> usize {
        self.raising.len() + 1
    }

    /// Gershgorin bound on the spectral radius of `H = iG`.
    fn spectral_bound(&self) -> f64 {
        let a = self.xi.norm();
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for n in 0..d {
            let below = if n > 0 { self.raising[n - 1] } else { 0.0 };
            let above = if n + 1 < d { self.raising[n] } else { 0.0 };
            worst = worst.max(a * (below + above));
        }
        worst
    }

    /// `out = c · H v` with `H = i(ξK₊ − ξ*K₋)`, for `v` supported on
    /// `0..len`. Only `out[..len + 1]` is written.
    fn apply_h(&self, v: &[Complex64], len: usize, c: f64, out: &mut [Complex64]) {
        let d = self.dim();
        let ixi = Complex64::new(0.0, c) * self.xi;
        let ixic = Complex64::new(0.0, c) * self.xi.conj();
        for n in 0..(len + 1).min(d) {
            let mut acc = ZERO;
            if n > 0 {
                acc += ixi * (self.raising[n - 1] * v[n - 1]);
            }
            if n + 1 < d {
                acc -= ixic * (self.raising[n] * v[n + 1]);
            }
            out[n] = acc;
        }
    }
}

/// `J_0(x)..=J_M(x)` by Miller's backward recurrence, normalized with
/// `J_0 + 2 Σ J_{2m} = 1`. Orders whose value is negligible are trimmed.
fn bessel_j_sequence(x: f64) -> Vec<f64> {
    if x == 0.0 {
        return vec![1.0];
    }
    let start = (x + 15.0 * x.cbrt() + 40.0).ceil() as usize;
    let mut j = vec![0.0f64; start + 2];
    j[start + 1] = 0.0;
    j[start] = 1e-300;
    for m in (1..=start).rev() {
        j[m - 1] = (2.0 * m as f64 / x) * j[m] - j[m + 1];
        if j[m - 1].abs() > 1e250 {
            for v in j[m - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let norm: f64 = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
    for v in j.iter_mut() {
        *v /= norm;
    }
    while j.len() > 1 && j[j.len() - 1].abs() < 1e-22 {
        j.pop();
    }
    j
}

/// `exp(ξK₊ − ξ*K₋) v` on the truncated basis, via
/// `e^{−iH} = J₀(R) + 2 Σ (−i)^m J_m(R) T_m(H/R)`.
fn expm_action(k: f64, xi: Complex64, v: &[Complex64]) -> Vec<Complex64> {
    let gen = Generator::new(k, v.len() - 1, xi);
    let radius = gen.spectral_bound();
    if radius == 0.0 {
        return v.to_vec();
    }
    let coeffs = bessel_j_sequence(radius);
    let d = v.len();
    let inv_r = 1.0 / radius;
    let mut out: Vec<Complex64> = v.iter().map(|x| x * coeffs[0]).collect();
    if coeffs.len() == 1 {
        return out;
    }
    // nonzero entries of the Chebyshev vectors grow by one per step
    let mut len = v.iter().rposition(|x| *x != ZERO).map_or(0, |i| i + 1);
    let mut prev = v.to_vec();
    let mut cur = vec![ZERO; d];
    gen.apply_h(v, len, inv_r, &mut cur);
    len = (len + 1).min(d);
    let mut next = vec![ZERO; d];
    // (−i)^m cycles through 1, −i, −1, i
    let phases = [
        ONE,
        Complex64::new(0.0, -1.0),
        -ONE,
        Complex64::new(0.0, 1.0),
    ];
    for (m, &c) in coeffs.iter().enumerate().skip(1) {
        let w = phases[m % 4] * (2.0 * c);
        for (o, x) in out[..len].iter_mut().zip(&cur[..len]) {
            *o += w * x;
        }
        if m + 1 == coeffs.len() {
            break;
        }
        gen.apply_h(&cur, len, 2.0 * inv_r, &mut next);
        len = (len + 1).min(d);
        for (nx, p) in next[..len].iter_mut().zip(&prev[..len]) {
            *nx -= p;
        }
        core::mem::swap(&mut prev, &mut cur);
        core::mem::swap(&mut cur, &mut next);
    }
    out
}

fn vdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn vdot_parity(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(n, (x, y))| {
            if n % 2 == 0 {
                x.conj() * y
            } else {
                -(x.conj() * y)
            }
        })
        .sum()
}

/// `D(ζ) v` for a disk label `ζ`.
pub fn displace_vector(k: BargmannIndex, z: Complex64, v: &[Complex64]) -> Vec<Complex64> {
    expm_action(k.value(), xi_of(z), v)
}

/// `D(ζ)|k,0⟩` on the basis `0..=N`, built from the generator exponential.
pub fn oracle_coherent_state(k: BargmannIndex, z: DiskPoint, cutoff: usize) -> Vec<Complex64> {
    let mut e0 = vec![ZERO; cutoff + 1];
    e0[0] = ONE;
    displace_vector(k, z.value(), &e0)
}

/// Runs `f` at the tail cutoff for radius `rmax` and at twice that cutoff,
/// returning the larger-cutoff value if both agree.
///
/// The doubled run is the margin for displaced arguments, so the tail cutoff
/// itself is not padded further.
fn converged<F>(k: BargmannIndex, rmax: f64, mut f: F) -> Result<Complex64>
where
    F: FnMut(usize) -> Complex64,
{
    let n = tail_index(k, rmax.max(1e-3), ORACLE_TAIL_EPS)?.max(1);
    if 2 * n > MAX_CUTOFF {
        return Err(Error::CutoffExceeded { cap: MAX_CUTOFF });
    }
    let a = f(n);
    let b = f(2 * n);
    let diff = (a - b).norm();
    if !(diff <= CONVERGENCE_TOLERANCE) {
        return Err(Error::Convergence(format!(
            "cutoff {n} -> {}: values differ by {diff:e}",
            2 * n
        )));
    }
    Ok(b)
}

fn radius_of(z: Result<DiskPoint>) -> Result<f64> {
    Ok(z?.value().norm())
}

/// `⟨ζ₁|ζ₂⟩` from two independently displaced vacua.
pub fn oracle_coherent_overlap(
    k: BargmannIndex,
    z1: DiskPoint,
    z2: DiskPoint,
) -> Result<Complex64> {
    let rmax = z1.value().norm().max(z2.value().norm());
    converged(k, rmax, |n| {
        vdot(
            &oracle_coherent_state(k, z1, n),
            &oracle_coherent_state(k, z2, n),
        )
    })
}

/// `⟨ζ₁|Π|ζ₂⟩` with `Π` applied as `(−1)ⁿ`.
pub fn oracle_parity_overlap(k: BargmannIndex, z1: DiskPoint, z2: DiskPoint) -> Result<Complex64> {
    let rmax = z1.value().norm().max(z2.value().norm());
    converged(k, rmax, |n| {
        vdot_parity(
            &oracle_coherent_state(k, z1, n),
            &oracle_coherent_state(k, z2, n),
        )
    })
}

/// `⟨ζⱼ|D(ζ) Π D†(ζ)|ζᵢ⟩ = (D†(ζ)|ζⱼ⟩)† Π (D†(ζ)|ζᵢ⟩)`.
pub fn oracle_wigner_term(
    k: BargmannIndex,
    zi: DiskPoint,
    zj: DiskPoint,
    z: DiskPoint,
) -> Result<Complex64> {
    let minus = -z.value();
    let rmax = [
        zi.value().norm(),
        zj.value().norm(),
        radius_of(mobius_add(zi, minus))?,
        radius_of(mobius_add(zj, minus))?,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    converged(k, rmax, |n| {
        let a = displace_vector(k, minus, &oracle_coherent_state(k, zi, n));
        let b = displace_vector(k, minus, &oracle_coherent_state(k, zj, n));
        vdot_parity(&b, &a)
    })
}

/// Disk label of the half displacement `D(δ)^{1/2}`.
fn half_label(d: Complex64) -> Complex64 {
    let r = d.norm();
    if r == 0.0 {
        return d;
    }
    d * ((0.5 * r.atanh()).tanh() / r)
}

/// `⟨ζᵢ|D(δ)|ζⱼ⟩`, split as `(D(δ)^{−1/2}|ζᵢ⟩)† (D(δ)^{1/2}|ζⱼ⟩)` so that
/// neither intermediate state is pushed further out than necessary.
pub fn oracle_overlap_term(
    k: BargmannIndex,
    zi: DiskPoint,
    zj: DiskPoint,
    d: Complex64,
) -> Result<Complex64> {
    if !(d.norm() < 1.0) {
        return Err(Error::OutsideDisk { re: d.re, im: d.im });
    }
    let h = half_label(d);
    let rmax = [
        zi.value().norm(),
        zj.value().norm(),
        radius_of(mobius_add(zi, -h))?,
        radius_of(mobius_add(zj, h))?,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    converged(k, rmax, |n| {
        let a = displace_vector(k, -h, &oracle_coherent_state(k, zi, n));
        let b = displace_vector(k, h, &oracle_coherent_state(k, zj, n));
        vdot(&a, &b)
    })
}

/// Superposition `Σ_j D(ζ_j)|k,0⟩` and its squared norm.
fn oracle_circular_vector(spec: &CircularStateSpec, cutoff: usize) -> (Vec<Complex64>, f64) {
    let mut psi = vec![ZERO; cutoff + 1];
    for z in crate::states::component_points(spec) {
        for (p, c) in psi
            .iter_mut()
            .zip(oracle_coherent_state(spec.k(), z, cutoff))
        {
            *p += c;
        }
    }
    let norm = psi.iter().map(|c| c.norm_sqr()).sum();
    (psi, norm)
}

/// `⟨○|D(ζ)ΠD†(ζ)|○⟩`, optionally divided by `‖○‖²`.
pub fn oracle_wigner_circular(
    spec: &CircularStateSpec,
    z: DiskPoint,
    normalize: bool,
) -> Result<Complex64> {
    let k = spec.k();
    let r = spec.radius();
    let rz = z.value().norm();
    let rmax = (r + rz) / (1.0 + r * rz);
    converged(k, rmax.max(r), |n| {
        let (psi, norm) = oracle_circular_vector(spec, n);
        let shifted = displace_vector(k, -z.value(), &psi);
        let w = vdot_parity(&shifted, &shifted);
        if normalize {
            w / norm
        } else {
            w
        }
    })
}

/// `|⟨○|D(δ)|○⟩|²`, optionally normalized.
pub fn oracle_overlap_circular(
    spec: &CircularStateSpec,
    d: Complex64,
    normalize: bool,
) -> Result<f64> {
    if !(d.norm() < 1.0) {
        return Err(Error::OutsideDisk { re: d.re, im: d.im });
    }
    let k = spec.k();
    let r = spec.radius();
    let h = half_label(d);
    let rh = h.norm();
    let rmax = (r + rh) / (1.0 + r * rh);
    let amp = converged(k, rmax.max(r), |n| {
        let (psi, norm) = oracle_circular_vector(spec, n);
        let a = displace_vector(k, -h, &psi);
        let b = displace_vector(k, h, &psi);
        let v = vdot(&a, &b);
        if normalize {
            v / norm
        } else {
            v
        }
    })?;
    Ok(amp.norm_sqr())
}

/// Leading block size on which truncation cannot corrupt the algebra:
/// the last `⌈(N+1)/4⌉` rows and columns are excluded.
pub fn interior_block(cutoff: usize) -> usize {
    let d = cutoff + 1;
    d - d.div_ceil(4)
}
