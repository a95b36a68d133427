//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process fails if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use su11_core::feature::{
    interpolate, isotropy_ratio, radial_extent, scaling_exponent, DEFAULT_DIRECTIONS,
};
use su11_core::sensitivity::{first_zero_radius, overlap_circular, sql_baseline, sql_radius};
use su11_core::wigner::{wigner_coherent, wigner_coherent_gaussian, wigner_value};
use su11_core::{
    BargmannIndex, CircularState, CircularStateSpec, Complex64, DiskPoint, Error, PhaseSpaceGrid,
    ScalarField,
};
use su11_phase_lab::analysis::{
    central_wigner_feature, even_directions, mean, present_values, relative_spread, zero_radii,
    LevelMode, ANALYSIS_POINTS,
};
use su11_phase_lab::compute::{default_workers, overlap_field, wigner_field};
use su11_phase_lab::oracle_check::{self, CheckConfig};

const SWEEP: [f64; 5] = [8.0, 12.0, 16.0, 24.0, 32.0];
const TAU_BAR: f64 = 1.5;

const ORACLE_TOL: f64 = 1e-8;
const ORACLE_TRIALS: usize = 100;
const ORACLE_SEED: u64 = 7;
const ORACLE_KSET: [f64; 5] = [0.5, 1.0, 5.0, 12.0, 16.0];
const ORACLE_MAX_RADIUS: f64 = 0.8;
const ORACLE_TIME_LIMIT: Duration = Duration::from_secs(120);

const GAUSSIAN_K: f64 = 16.0;
const GAUSSIAN_MAX_RADIUS: f64 = 0.15;
const GAUSSIAN_REL_TOL: f64 = 0.02;
const COHERENT_K: f64 = 12.0;
const COHERENT_RADIUS: f64 = 0.2;
const COHERENT_VALUE: f64 = 0.146356;
const COHERENT_TOL: f64 = 1e-6;

const SQL_SLOPE: f64 = -0.5;
const SQL_SLOPE_TOL: f64 = 0.02;

const CAT_X_SLOPE: f64 = -1.0;
const CAT_P_SLOPE: f64 = -0.5;
const EXTENT_SLOPE_TOL: f64 = 0.15;
const COMPASS_SLOPE: f64 = -1.0;

const ISOTROPY_K: f64 = 12.0;
const ISOTROPY_PLATEAU_TOL: f64 = 0.05;

const SPREAD_DIRECTIONS: usize = 64;
const SPREAD_LIMIT_N16: f64 = 0.10;
const ZERO_RADIUS_SLOPE: f64 = -1.0;
const ZERO_RADIUS_SLOPE_TOL: f64 = 0.15;

const SYMMETRY_EXACT_TOL: f64 = 1e-8;
const SYMMETRY_GRID_TOL: f64 = 1e-6;
const SYMMETRY_SAMPLES: usize = 200;
const SYMMETRY_GRID_POINTS: usize = 301;
const SYMMETRY_GRID_EXTENT: f64 = 0.3;
const SYMMETRY_CHECK_RADIUS: f64 = 0.2;
const INTERPOLATION_ORDER: usize = 8;
const IMAG_RESIDUE_TOL: f64 = 1e-8;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn k(v: f64) -> BargmannIndex {
    BargmannIndex::new(v).unwrap()
}

fn state(kv: f64, nbar: usize, tau: f64) -> CircularState {
    CircularState::new(CircularStateSpec::new(k(kv), nbar, tau).unwrap()).unwrap()
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

fn fit_slope(samples: &[(f64, f64)]) -> Result<f64, String> {
    scaling_exponent(samples)
        .map(|f| f.slope)
        .map_err(|e| e.to_string())
}

fn fmt_samples(samples: &[(f64, f64)]) -> String {
    samples
        .iter()
        .map(|(k, v)| format!("k={k}:{v:.5}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn criterion_1() -> Verdict {
    let cfg = CheckConfig {
        trials: ORACLE_TRIALS,
        seed: ORACLE_SEED,
        tol: ORACLE_TOL,
        kset: ORACLE_KSET.to_vec(),
        max_radius: ORACLE_MAX_RADIUS,
    };
    let started = Instant::now();
    let report = oracle_check::run(&cfg, default_workers()).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let per: Vec<String> = report
        .quantities
        .iter()
        .map(|(name, q)| {
            format!(
                "{name} {}/{} worst {:.2e}",
                q.compared - q.failures,
                q.compared,
                q.worst.as_ref().map_or(0.0, |w| w.relative_error)
            )
        })
        .collect();
    let detail = format!(
        "{}; oracle errors {}; {:.1}s (limit {}s)",
        per.join(", "),
        report.errors.len(),
        elapsed.as_secs_f64(),
        ORACLE_TIME_LIMIT.as_secs()
    );
    if report.passed && elapsed < ORACLE_TIME_LIMIT {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_2() -> Verdict {
    let kk = k(GAUSSIAN_K);
    let mut worst: f64 = 0.0;
    for m in 0..=150 {
        let r = GAUSSIAN_MAX_RADIUS * m as f64 / 150.0;
        for theta in [0.0, 1.1, 2.5] {
            let z = DiskPoint::from_polar(r, theta).unwrap();
            let exact = wigner_coherent(kk, z);
            let gauss = wigner_coherent_gaussian(kk, z);
            worst = worst.max((exact / gauss - 1.0).abs());
            // the circular-state evaluator with a single component must agree
            let single = wigner_value(&state(GAUSSIAN_K, 1, 0.0), z, true);
            worst = worst.max((single.re / gauss - 1.0).abs());
        }
    }
    let z = DiskPoint::from_xy(COHERENT_RADIUS, 0.0).unwrap();
    let value = wigner_coherent(k(COHERENT_K), z);
    let gauss_ok = worst <= GAUSSIAN_REL_TOL;
    let value_ok = within(value, COHERENT_VALUE, COHERENT_TOL);
    let detail = format!(
        "max |exact/gaussian - 1| = {worst:.3e} (tol {GAUSSIAN_REL_TOL}); \
         W(k={COHERENT_K}, |z|={COHERENT_RADIUS}) = {value:.7} vs {COHERENT_VALUE} +- {COHERENT_TOL:e}"
    );
    if gauss_ok && value_ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_3() -> Verdict {
    let mut samples = Vec::new();
    for kv in SWEEP {
        let r = sql_radius(k(kv));
        // the radius really is where the exact overlap falls to 1/e
        let s = sql_baseline(k(kv), Complex64::new(r, 0.0)).map_err(|e| e.to_string())?;
        if !within(s, (-1.0f64).exp(), 1e-12) {
            return Err(format!("overlap at k={kv} radius is {s}, not 1/e"));
        }
        samples.push((kv, r));
    }
    let slope = fit_slope(&samples)?;
    let detail = format!(
        "slope {slope:.4} (target {SQL_SLOPE} +- {SQL_SLOPE_TOL}); {}",
        fmt_samples(&samples)
    );
    if within(slope, SQL_SLOPE, SQL_SLOPE_TOL) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Radial extents of the central Wigner feature along `thetas` for each `k`.
fn feature_extents(
    nbar: usize,
    mode: LevelMode,
    thetas: &[f64],
) -> Result<Vec<Vec<(f64, f64)>>, String> {
    let mut per_dir = vec![Vec::new(); thetas.len()];
    for kv in SWEEP {
        let s = state(kv, nbar, TAU_BAR);
        let (c, _) = central_wigner_feature(&s, mode, ANALYSIS_POINTS, default_workers())
            .map_err(|e| format!("k={kv}: {e}"))?;
        for (d, &t) in thetas.iter().enumerate() {
            let r = radial_extent(&c, t).map_err(|e| format!("k={kv}: {e}"))?;
            per_dir[d].push((kv, r));
        }
    }
    Ok(per_dir)
}

fn criterion_4() -> Verdict {
    let zero = feature_extents(2, LevelMode::Zero, &[0.0, FRAC_PI_2]);
    let zero_note = match &zero {
        Ok(_) => "zero contour closes".to_string(),
        Err(e) => format!("zero contour: {e}"),
    };
    let ext = match zero {
        Ok(v) => v,
        Err(_) => feature_extents(2, LevelMode::Closing, &[0.0, FRAC_PI_2])
            .map_err(|e| format!("{zero_note}; closing level: {e}"))?,
    };
    let sx = fit_slope(&ext[0])?;
    let sp = fit_slope(&ext[1])?;
    let detail = format!(
        "{zero_note}; x slope {sx:.3} (target {CAT_X_SLOPE} +- {EXTENT_SLOPE_TOL}), \
         p slope {sp:.3} (target {CAT_P_SLOPE} +- {EXTENT_SLOPE_TOL}); x: {}; p: {}",
        fmt_samples(&ext[0]),
        fmt_samples(&ext[1])
    );
    if within(sx, CAT_X_SLOPE, EXTENT_SLOPE_TOL) && within(sp, CAT_P_SLOPE, EXTENT_SLOPE_TOL) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_5() -> Verdict {
    let ext = feature_extents(4, LevelMode::Closing, &[0.0, FRAC_PI_4])?;
    let s0 = fit_slope(&ext[0])?;
    let s45 = fit_slope(&ext[1])?;
    let detail = format!(
        "theta=0 slope {s0:.3}, theta=pi/4 slope {s45:.3} (target {COMPASS_SLOPE} +- {EXTENT_SLOPE_TOL}); 0: {}; pi/4: {}",
        fmt_samples(&ext[0]),
        fmt_samples(&ext[1])
    );
    if within(s0, COMPASS_SLOPE, EXTENT_SLOPE_TOL) && within(s45, COMPASS_SLOPE, EXTENT_SLOPE_TOL) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn criterion_6() -> Verdict {
    let nbars = [4, 6, 8, 12, 16];
    let mut ratios = Vec::new();
    for n in nbars {
        let s = state(ISOTROPY_K, n, TAU_BAR);
        let (c, _) =
            central_wigner_feature(&s, LevelMode::Closing, ANALYSIS_POINTS, default_workers())
                .map_err(|e| format!("nbar={n}: {e}"))?;
        ratios.push(isotropy_ratio(&c, DEFAULT_DIRECTIONS).map_err(|e| e.to_string())?);
    }
    let decreasing = ratios[0] > ratios[1] && ratios[1] > ratios[2];
    let plateau = ratios[3] <= ratios[2] * (1.0 + ISOTROPY_PLATEAU_TOL)
        && ratios[4] <= ratios[3] * (1.0 + ISOTROPY_PLATEAU_TOL);
    let detail = nbars
        .iter()
        .zip(&ratios)
        .map(|(n, r)| format!("nbar={n}:{r:.5}"))
        .collect::<Vec<_>>()
        .join(" ");
    if decreasing && plateau {
        Ok(detail)
    } else {
        Err(format!(
            "{detail} (strictly decreasing 4-6-8: {decreasing}, plateau within 5%: {plateau})"
        ))
    }
}

/// First-zero radii over the evenly spaced directions, the ones that exist,
/// and how many directions have none.
fn direction_radii(kv: f64, nbar: usize) -> Result<(Vec<f64>, usize), String> {
    let thetas = even_directions(SPREAD_DIRECTIONS);
    let radii = zero_radii(&state(kv, nbar, TAU_BAR), &thetas, default_workers())
        .map_err(|e| format!("k={kv} nbar={nbar}: {e}"))?;
    let missing = radii.iter().filter(|r| r.is_none()).count();
    let found = present_values(&radii).map_err(|e| format!("k={kv} nbar={nbar}: {e}"))?;
    Ok((found, missing))
}

fn criterion_7() -> Verdict {
    let nbars = [4, 6, 8, 16];
    let mut spreads = Vec::new();
    let mut notes = Vec::new();
    for n in nbars {
        let (radii, missing) = direction_radii(ISOTROPY_K, n)?;
        let s = relative_spread(&radii);
        spreads.push(s);
        notes.push(format!("nbar={n}:{s:.5} ({missing} zero-free)"));
    }
    let decreasing = spreads[0] > spreads[1] && spreads[1] > spreads[2];
    let small = spreads[3] < SPREAD_LIMIT_N16;
    let detail = notes.join(" ");
    if decreasing && small {
        Ok(detail)
    } else {
        Err(format!(
            "{detail} (decreasing 4-6-8: {decreasing}, nbar=16 below {SPREAD_LIMIT_N16}: {small})"
        ))
    }
}

fn criterion_8() -> Verdict {
    let mut samples = Vec::new();
    let mut missing = Vec::new();
    for kv in SWEEP {
        let (radii, m) = direction_radii(kv, 4)?;
        samples.push((kv, mean(&radii)));
        missing.push(m);
    }
    let slope = fit_slope(&samples)?;
    let baseline = first_zero_radius(&state(12.0, 1, 0.0), 0.3, true);
    let no_zero = matches!(baseline, Err(Error::NoZeroFound { .. }));
    let detail = format!(
        "slope {slope:.3} (target {ZERO_RADIUS_SLOPE} +- {ZERO_RADIUS_SLOPE_TOL}); {}; zero-free directions {missing:?}; coherent baseline: {:?}",
        fmt_samples(&samples),
        baseline
    );
    if within(slope, ZERO_RADIUS_SLOPE, ZERO_RADIUS_SLOPE_TOL) && no_zero {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rotate(z: Complex64, angle: f64) -> Complex64 {
    z * Complex64::from_polar(1.0, angle)
}

/// Largest deviation of `f` under the n-fold rotation and under conjugation
/// at random points.
fn exact_symmetry(n: usize, rng: &mut ChaCha8Rng, f: impl Fn(Complex64) -> f64) -> f64 {
    let mut worst: f64 = 0.0;
    for _ in 0..SYMMETRY_SAMPLES {
        let r = 0.9 * rng.gen::<f64>().sqrt();
        let z = Complex64::from_polar(r, TAU * rng.gen::<f64>());
        let v = f(z);
        worst = worst.max((f(rotate(z, TAU / n as f64)) - v).abs());
        worst = worst.max((f(z.conj()) - v).abs());
    }
    worst
}

/// Largest deviation between grid nodes and the interpolated field at their
/// rotated and conjugated images, over nodes within the check radius.
fn grid_symmetry(field: &ScalarField, n: usize) -> Result<f64, String> {
    let g = field.grid();
    let mut worst: f64 = 0.0;
    for j in 0..g.np() {
        for i in 0..g.nx() {
            let z = g.zeta(i, j);
            if z.norm() > SYMMETRY_CHECK_RADIUS {
                continue;
            }
            let v = field.get(i, j).ok_or("masked node inside check radius")?;
            for w in [rotate(z, TAU / n as f64), z.conj()] {
                let u = interpolate(field, w.re, w.im, INTERPOLATION_ORDER)
                    .map_err(|e| e.to_string())?;
                worst = worst.max((u - v).abs());
            }
        }
    }
    Ok(worst)
}

fn criterion_9() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let workers = default_workers();
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [2, 4, 6, 8] {
        let s = state(12.0, n, TAU_BAR);
        let w_exact = exact_symmetry(n, &mut rng, |z| {
            wigner_value(&s, DiskPoint::new(z).unwrap(), true).re
        });
        let s_exact = exact_symmetry(n, &mut rng, |d| overlap_circular(&s, d, true).unwrap());
        let grid = PhaseSpaceGrid::new(
            SYMMETRY_GRID_POINTS,
            SYMMETRY_GRID_POINTS,
            SYMMETRY_GRID_EXTENT,
        )
        .map_err(|e| e.to_string())?;
        let wf = wigner_field(&s, grid, true, workers).map_err(|e| e.to_string())?;
        let sf = overlap_field(&s, grid, true, workers).map_err(|e| e.to_string())?;
        let w_grid = grid_symmetry(&wf, n)?;
        let s_grid = grid_symmetry(&sf, n)?;
        ok &= w_exact <= SYMMETRY_EXACT_TOL && s_exact <= SYMMETRY_EXACT_TOL;
        ok &= w_grid <= SYMMETRY_GRID_TOL && s_grid <= SYMMETRY_GRID_TOL;
        lines.push(format!(
            "nbar={n} W {w_exact:.1e}/{w_grid:.1e} S {s_exact:.1e}/{s_grid:.1e}"
        ));
    }
    // imaginary residues of whole-disk Wigner fields
    let mut worst_residue: f64 = 0.0;
    let grid = PhaseSpaceGrid::new(101, 101, 0.95).map_err(|e| e.to_string())?;
    for kv in [0.5, 12.0, 32.0] {
        for n in [1, 2, 4, 6, 8, 12, 16] {
            let tau = if n == 1 { 0.0 } else { TAU_BAR };
            let f =
                wigner_field(&state(kv, n, tau), grid, true, workers).map_err(|e| e.to_string())?;
            worst_residue = worst_residue.max(f.max_abs_imag_discarded() / f.max_abs());
        }
    }
    ok &= worst_residue < IMAG_RESIDUE_TOL;
    let detail = format!(
        "exact/grid deviations: {}; worst imaginary residue / max {worst_residue:.1e}",
        lines.join(", ")
    );
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn run_lab(dir: &Path, args: &[&str]) -> Result<(), String> {
    let o = Command::new(env!("CARGO_BIN_EXE_su11-phase-lab"))
        .args(args)
        .current_dir(dir)
        .env_remove("SU11_LAB_OUT_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(())
    } else {
        Err(format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr)))
    }
}

/// Manifest with the execution-only fields removed.
fn manifest_core(path: &Path) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let obj = v.as_object_mut().ok_or("manifest is not an object")?;
    obj.remove("timings");
    obj.remove("workers");
    obj.remove("outputs");
    Ok(v)
}

fn criterion_10() -> Verdict {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs = [("a", "1"), ("b", "1"), ("c", "4")];
    let jobs: [(&str, Vec<&str>); 5] = [
        (
            "wigner.csv",
            vec![
                "wigner", "--k", "12", "--nbar", "6", "--tau", "1.5", "--nx", "81", "--np", "81",
                "--extent", "0.6",
            ],
        ),
        (
            "wigner.json",
            vec![
                "wigner", "--k", "16", "--nbar", "4", "--tau", "1.5", "--nx", "64", "--np", "48",
                "--extent", "0.9",
            ],
        ),
        (
            "overlap.json",
            vec![
                "overlap", "--k", "12", "--nbar", "8", "--tau", "1.5", "--nx", "61", "--np", "61",
                "--extent", "0.5", "--sql",
            ],
        ),
        (
            "scaling.json",
            vec![
                "scaling",
                "--target",
                "wigner-extent",
                "--nbar",
                "4",
                "--ks",
                "8,12,16",
                "--thetas",
                "0,pi/4",
                "--points",
                "101",
            ],
        ),
        (
            "oracle.json",
            vec![
                "oracle-check",
                "--trials",
                "5",
                "--seed",
                "3",
                "--kset",
                "0.5,12",
            ],
        ),
    ];
    for (run, workers) in runs {
        let dir = root.path().join(run);
        std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        for (out, args) in &jobs {
            let mut a = args.clone();
            a.extend(["--out", out, "--workers", workers]);
            run_lab(&dir, &a)?;
        }
        run_lab(&dir, &["contour", "wigner.csv", "--out", "contour.json"])?;
    }
    let files = [
        "wigner.csv",
        "wigner.json",
        "overlap.json",
        "overlap.sql.json",
        "scaling.json",
        "oracle.json",
        "contour.json",
    ];
    let mut compared = 0;
    for f in files {
        let a = std::fs::read(root.path().join("a").join(f)).map_err(|e| e.to_string())?;
        for other in ["b", "c"] {
            let b = std::fs::read(root.path().join(other).join(f)).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("{f} differs between run a and run {other}"));
            }
            compared += 1;
        }
    }
    for f in files.iter().filter(|f| **f != "overlap.sql.json") {
        let m = Path::new(f).with_extension("manifest.json");
        let a = manifest_core(&root.path().join("a").join(&m))?;
        for other in ["b", "c"] {
            if manifest_core(&root.path().join(other).join(&m))? != a {
                return Err(format!(
                    "{} differs between run a and run {other}",
                    m.display()
                ));
            }
        }
    }
    Ok(format!(
        "{compared} output comparisons byte-identical across repeated runs and workers 1/4; manifests agree"
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", criterion_1),
        ("coherent Wigner limit", criterion_2),
        ("SQL scaling", criterion_3),
        ("cat anisotropy", criterion_4),
        ("compass sub-Planck scaling", criterion_5),
        ("isotropy trend", criterion_6),
        ("sensitivity isotropy", criterion_7),
        ("sensitivity scaling", criterion_8),
        ("symmetry suite", criterion_9),
        ("reproducibility", criterion_10),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .and_then(|s| s.parse().ok());
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let started = Instant::now();
        let verdict = check();
        let secs = started.elapsed().as_secs_f64();
        match verdict {
            Ok(d) => println!("criterion {n:2} {name}: PASS [{secs:.1}s] {d}"),
            Err(d) => {
                println!("criterion {n:2} {name}: FAIL [{secs:.1}s] {d}");
                failed.push(n);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
