//! Randomized comparison of the closed forms against the Fock-space oracle.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use su11_core::fock::{
    oracle_coherent_overlap, oracle_overlap_term, oracle_parity_overlap, oracle_wigner_term,
};
use su11_core::sensitivity::overlap_term;
use su11_core::states::{coherent_overlap, parity_overlap};
use su11_core::wigner::wigner_term;
use su11_core::{BargmannIndex, Complex64, DiskPoint};

use crate::compute::with_workers;
use crate::error::LabResult;

/// Magnitudes below this are compared absolutely: the oracle resolves values
/// only down to rounding of its O(1) amplitudes.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-6;

pub const QUANTITIES: [&str; 4] = [
    "wigner_term",
    "overlap_term",
    "coherent_overlap",
    "parity_overlap",
];

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub kset: Vec<f64>,
    pub max_radius: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            trials: 100,
            seed: 7,
            tol: 1e-8,
            kset: vec![0.5, 1.0, 5.0, 12.0, 16.0],
            max_radius: 0.8,
        }
    }
}

/// One random draw: `ζᵢ`, `ζⱼ`, a phase-space point `ζ` and a displacement `δ`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tuple {
    pub k: f64,
    pub zi: [f64; 2],
    pub zj: [f64; 2],
    pub zeta: [f64; 2],
    pub delta: [f64; 2],
}

#[derive(Debug, Clone, Serialize)]
pub struct Worst {
    pub relative_error: f64,
    pub closed_form: [f64; 2],
    pub oracle: [f64; 2],
    pub tuple: Tuple,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuantityReport {
    pub compared: usize,
    pub failures: usize,
    pub worst: Option<Worst>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub trials_per_k: usize,
    pub seed: u64,
    pub tol: f64,
    pub kset: Vec<f64>,
    pub max_radius: f64,
    pub relative_error_floor: f64,
    pub quantities: BTreeMap<String, QuantityReport>,
    /// Oracle failures (no convergence, cutoff cap) with their tuples.
    pub errors: Vec<String>,
    pub passed: bool,
}

impl CheckReport {
    pub fn worst_error(&self) -> f64 {
        self.quantities
            .values()
            .filter_map(|q| q.worst.as_ref().map(|w| w.relative_error))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn in_disk(rng: &mut ChaCha8Rng, radius: f64) -> [f64; 2] {
    let r = radius * rng.gen::<f64>().sqrt();
    let t = std::f64::consts::TAU * rng.gen::<f64>();
    [r * t.cos(), r * t.sin()]
}

pub fn draw_tuples(cfg: &CheckConfig) -> Vec<Tuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut out = Vec::with_capacity(cfg.kset.len() * cfg.trials);
    for &k in &cfg.kset {
        for _ in 0..cfg.trials {
            out.push(Tuple {
                k,
                zi: in_disk(&mut rng, cfg.max_radius),
                zj: in_disk(&mut rng, cfg.max_radius),
                zeta: in_disk(&mut rng, cfg.max_radius),
                delta: in_disk(&mut rng, cfg.max_radius),
            });
        }
    }
    out
}

pub fn relative_error(closed: Complex64, oracle: Complex64) -> f64 {
    (closed - oracle).norm() / oracle.norm().max(RELATIVE_ERROR_FLOOR)
}

type Pair = (Complex64, Complex64);

fn evaluate(t: &Tuple) -> su11_core::Result<[Pair; 4]> {
    let c = |v: [f64; 2]| Complex64::new(v[0], v[1]);
    let k = BargmannIndex::new(t.k)?;
    let zi = DiskPoint::new(c(t.zi))?;
    let zj = DiskPoint::new(c(t.zj))?;
    let z = DiskPoint::new(c(t.zeta))?;
    let d = c(t.delta);
    Ok([
        (wigner_term(k, zi, zj, z), oracle_wigner_term(k, zi, zj, z)?),
        (
            overlap_term(k, zi, zj, d)?,
            oracle_overlap_term(k, zi, zj, d)?,
        ),
        (
            coherent_overlap(k, zi, zj),
            oracle_coherent_overlap(k, zi, zj)?,
        ),
        (parity_overlap(k, zi, zj), oracle_parity_overlap(k, zi, zj)?),
    ])
}

/// Runs every tuple; the report is a pure function of the configuration.
pub fn run(cfg: &CheckConfig, workers: usize) -> LabResult<CheckReport> {
    let tuples = draw_tuples(cfg);
    let results: Vec<su11_core::Result<[Pair; 4]>> =
        with_workers(workers, || tuples.par_iter().map(evaluate).collect())?;

    let mut quantities: BTreeMap<String, QuantityReport> = QUANTITIES
        .iter()
        .map(|q| {
            (
                q.to_string(),
                QuantityReport {
                    compared: 0,
                    failures: 0,
                    worst: None,
                },
            )
        })
        .collect();
    let mut errors = Vec::new();
    for (t, r) in tuples.iter().zip(results) {
        let pairs = match r {
            Ok(p) => p,
            Err(e) => {
                errors.push(format!("{e} at {t:?}"));
                continue;
            }
        };
        for (name, (closed, oracle)) in QUANTITIES.iter().zip(pairs) {
            let q = quantities.get_mut(*name).expect("known quantity");
            let err = relative_error(closed, oracle);
            q.compared += 1;
            // `!(err < tol)` also counts NaN, and a zero tolerance always fails
            if !(err < cfg.tol) {
                q.failures += 1;
            }
            if q.worst.as_ref().is_none_or(|w| err > w.relative_error) {
                q.worst = Some(Worst {
                    relative_error: err,
                    closed_form: [closed.re, closed.im],
                    oracle: [oracle.re, oracle.im],
                    tuple: *t,
                });
            }
        }
    }
    let passed = errors.is_empty() && quantities.values().all(|q| q.failures == 0);
    Ok(CheckReport {
        trials_per_k: cfg.trials,
        seed: cfg.seed,
        tol: cfg.tol,
        kset: cfg.kset.clone(),
        max_radius: cfg.max_radius,
        relative_error_floor: RELATIVE_ERROR_FLOOR,
        quantities,
        errors,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> CheckConfig {
        CheckConfig {
            trials: 3,
            seed: 11,
            kset: vec![0.5, 3.0],
            max_radius: 0.5,
            ..CheckConfig::default()
        }
    }

    #[test]
    fn draws_are_seeded_and_inside_the_radius() {
        let a = draw_tuples(&small());
        let b = draw_tuples(&small());
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        assert_eq!(a.len(), 6);
        for t in &a {
            for z in [t.zi, t.zj, t.zeta, t.delta] {
                assert!(z[0].hypot(z[1]) <= 0.5);
            }
        }
    }

    #[test]
    fn small_check_passes_and_zero_tolerance_fails() {
        let r = run(&small(), 2).unwrap();
        assert!(r.passed, "{}", r.to_json());
        assert!(r.worst_error() < 1e-8);
        let strict = CheckConfig {
            tol: 0.0,
            ..small()
        };
        let r = run(&strict, 1).unwrap();
        assert!(!r.passed);
    }
}
