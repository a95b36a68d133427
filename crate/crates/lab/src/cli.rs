//! Command-line front end. Exit codes: 0 success, 1 usage or input errors,
//! 2 numerical failures.

use std::ffi::OsString;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use su11_core::feature::{isotropy_ratio, zero_contours, Contour, DEFAULT_DIRECTIONS};
use su11_core::{BargmannIndex, CircularState, CircularStateSpec, PhaseSpaceGrid};

use crate::analysis::{
    even_directions, extents, feature_contour, feature_level, run_sweep, LevelMode, ScalingTarget,
    SweepSpec, ANALYSIS_POINTS,
};
use crate::compute::{default_workers, overlap_field, sql_field, wigner_field};
use crate::error::{LabError, LabResult};
use crate::fieldio::{encode, read_field, FieldFile, Format};
use crate::manifest::RunManifest;
use crate::options::{flag_set, output_path, sibling, NumList};
use crate::oracle_check::{self, CheckConfig};

const DEFAULT_K: f64 = 12.0;
const DEFAULT_NBAR: usize = 4;
const DEFAULT_TAU: f64 = 1.5;
const DEFAULT_POINTS: usize = 201;
const DEFAULT_EXTENT: f64 = 0.9;
const DEFAULT_SWEEP: [f64; 5] = [8.0, 12.0, 16.0, 24.0, 32.0];

#[derive(Parser, Debug)]
#[command(
    name = "su11-phase-lab",
    version,
    about = "SU(1,1) circular-state phase-space lab"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Wigner function of a circular state on a phase-space grid.
    Wigner(WignerOpts),
    /// Displacement overlap S(δ) of a circular state on the δ-plane.
    Overlap(OverlapOpts),
    /// Central contour and its metrics for a field file.
    Contour(ContourCmd),
    /// Power-law fit of a feature size against k.
    Scaling(ScalingOpts),
    /// Random comparison of the closed forms against the Fock oracle.
    OracleCheck(OracleOpts),
}

flag_set! {
    WignerOpts {
        /// Bargmann index.
        k: f64,
        /// Number of superposed coherent states (1 or even).
        nbar: usize,
        /// Hyperbolic radius of the components.
        tau: f64,
        /// Grid nodes along x.
        nx: usize,
        /// Grid nodes along p.
        np: usize,
        /// Half-width of the grid in x and p.
        extent: f64,
        /// Divide by the state norm (default true).
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        normalize: bool,
        /// Output file (default: a fixed name in $SU11_LAB_OUT_DIR or the current directory).
        out: PathBuf,
        /// csv, json or pgm; defaults to the extension of --out, then csv.
        format: Format,
        /// Worker threads (default: available cores).
        workers: usize,
        /// Also write a gnuplot script next to a CSV output.
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        plot_script: bool,
    }
}

flag_set! {
    OverlapOpts {
        /// Bargmann index.
        k: f64,
        /// Number of superposed coherent states (1 or even).
        nbar: usize,
        /// Hyperbolic radius of the components.
        tau: f64,
        /// Grid nodes along x.
        nx: usize,
        /// Grid nodes along p.
        np: usize,
        /// Half-width of the grid in x and p.
        extent: f64,
        /// Divide by the state norm (default true).
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        normalize: bool,
        /// Output file (default: a fixed name in $SU11_LAB_OUT_DIR or the current directory).
        out: PathBuf,
        /// csv, json or pgm; defaults to the extension of --out, then csv.
        format: Format,
        /// Worker threads (default: available cores).
        workers: usize,
        /// Also write a gnuplot script next to a CSV output.
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        plot_script: bool,
        /// Also write the single coherent state baseline field.
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        sql: bool,
    }
}

#[derive(Args, Debug)]
pub struct ContourCmd {
    /// Field file (CSV or JSON).
    pub input: PathBuf,
    #[command(flatten)]
    pub opts: ContourOpts,
}

flag_set! {
    ContourOpts {
        /// zero or closing.
        level_mode: LevelMode,
        /// Number of rays for the directional extents.
        directions: usize,
        /// Number of rays for the isotropy ratio.
        isotropy_directions: usize,
        /// Output file (default: a fixed name in $SU11_LAB_OUT_DIR or the current directory).
        out: PathBuf,
    }
}

flag_set! {
    ScalingOpts {
        /// wigner-extent, overlap-radius, sql-radius or planted.
        target: String,
        /// Comma-separated k values.
        ks: NumList,
        /// Number of superposed coherent states (1 or even).
        nbar: usize,
        /// Hyperbolic radius of the components.
        tau: f64,
        /// Comma-separated angles; `pi/4` style is accepted.
        thetas: NumList,
        /// Use this many equally spaced angles instead of --thetas.
        directions: usize,
        /// zero or closing.
        level_mode: LevelMode,
        /// Grid nodes per axis for locating the central feature.
        points: usize,
        /// Prefactor c of the planted law c·k^p.
        planted_c: f64,
        /// Exponent p of the planted law.
        planted_exponent: f64,
        /// Output file (default: a fixed name in $SU11_LAB_OUT_DIR or the current directory).
        out: PathBuf,
        /// Worker threads (default: available cores).
        workers: usize,
    }
}

flag_set! {
    OracleOpts {
        /// Random tuples per k.
        trials: usize,
        /// Seed of the tuple generator.
        seed: u64,
        /// Largest accepted relative error.
        tol: f64,
        /// Comma-separated k values.
        kset: NumList,
        /// Largest |ζ| and |δ| drawn.
        max_radius: f64,
        /// Also write the report and a manifest here.
        out: PathBuf,
        /// Worker threads (default: available cores).
        workers: usize,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cmd: Command) -> LabResult<()> {
    match cmd {
        Command::Wigner(o) => cmd_wigner(o),
        Command::Overlap(o) => cmd_overlap(o),
        Command::Contour(c) => cmd_contour(&c.input, c.opts),
        Command::Scaling(o) => cmd_scaling(o),
        Command::OracleCheck(o) => cmd_oracle_check(o),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> LabResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| LabError::io(path, e))?;
    println!("{}", path.display());
    Ok(())
}

fn finish_manifest(mut m: RunManifest, out: &Path, started: Instant) -> LabResult<()> {
    m.timings
        .insert("total_seconds".into(), started.elapsed().as_secs_f64());
    let path = sibling(out, "manifest.json");
    m.finish();
    write_file(&path, m.to_json().as_bytes())
}

fn positive_workers(w: Option<usize>) -> LabResult<usize> {
    match w {
        Some(0) => Err(LabError::usage("--workers must be at least 1")),
        Some(w) => Ok(w),
        None => Ok(default_workers()),
    }
}

/// Resolved parameters of the two field commands.
struct FieldRun {
    k: f64,
    nbar: usize,
    tau: f64,
    nx: usize,
    np: usize,
    extent: f64,
    normalize: bool,
    out: PathBuf,
    format: Format,
    workers: usize,
    plot_script: bool,
}

impl FieldRun {
    #[allow(clippy::too_many_arguments)]
    fn new(
        command: &str,
        k: Option<f64>,
        nbar: Option<usize>,
        tau: Option<f64>,
        nx: Option<usize>,
        np: Option<usize>,
        extent: Option<f64>,
        normalize: Option<bool>,
        out: Option<PathBuf>,
        format: Option<Format>,
        workers: Option<usize>,
        plot_script: Option<bool>,
    ) -> LabResult<Self> {
        let format = format
            .or_else(|| out.as_deref().and_then(Format::from_path))
            .unwrap_or(Format::Csv);
        let out = output_path(out, &format!("{command}.{}", format.extension()));
        let plot_script = plot_script.unwrap_or(false);
        if plot_script && format != Format::Csv {
            return Err(LabError::usage("--plot-script needs CSV output"));
        }
        Ok(Self {
            k: k.unwrap_or(DEFAULT_K),
            nbar: nbar.unwrap_or(DEFAULT_NBAR),
            tau: tau.unwrap_or(DEFAULT_TAU),
            nx: nx.unwrap_or(DEFAULT_POINTS),
            np: np.unwrap_or(DEFAULT_POINTS),
            extent: extent.unwrap_or(DEFAULT_EXTENT),
            normalize: normalize.unwrap_or(true),
            out,
            format,
            workers: positive_workers(workers)?,
            plot_script,
        })
    }

    fn state(&self) -> LabResult<CircularState> {
        let spec = CircularStateSpec::new(BargmannIndex::new(self.k)?, self.nbar, self.tau)?;
        Ok(CircularState::new(spec)?)
    }

    fn grid(&self) -> LabResult<PhaseSpaceGrid> {
        Ok(PhaseSpaceGrid::new(self.nx, self.np, self.extent)?)
    }

    fn manifest(&self, command: &str, config: Option<String>) -> RunManifest {
        let mut m = RunManifest::new(command);
        m.param("k", self.k)
            .param("nbar", self.nbar)
            .param("tau", self.tau)
            .param("nx", self.nx)
            .param("np", self.np)
            .param("extent", self.extent)
            .param("normalize", self.normalize)
            .param("format", self.format.extension());
        m.config_file = config;
        m.workers = self.workers;
        m
    }

    fn write_field(&self, m: &mut RunManifest, path: &Path, file: &FieldFile) -> LabResult<()> {
        write_file(path, &encode(file, self.format))?;
        m.outputs.push(path.display().to_string());
        if self.plot_script {
            let script = sibling(path, "gp");
            write_file(&script, gnuplot_script(path, &file.kind).as_bytes())?;
            m.outputs.push(script.display().to_string());
        }
        Ok(())
    }
}

fn gnuplot_script(data: &Path, kind: &str) -> String {
    let name = data
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    format!(
        "set datafile separator ','\n\
         set size ratio -1\n\
         set xlabel 'x'\n\
         set ylabel 'p'\n\
         set title '{kind}'\n\
         set view map\n\
         set palette defined (-1 'blue', 0 'white', 1 'red')\n\
         splot '{name}' every ::1 using 1:2:3 with points pointtype 5 pointsize 0.4 palette notitle\n"
    )
}

fn cmd_wigner(o: WignerOpts) -> LabResult<()> {
    let started = Instant::now();
    let (o, config) = o.resolve()?;
    let run = FieldRun::new(
        "wigner",
        o.k,
        o.nbar,
        o.tau,
        o.nx,
        o.np,
        o.extent,
        o.normalize,
        o.out,
        o.format,
        o.workers,
        o.plot_script,
    )?;
    let state = run.state()?;
    let field = wigner_field(&state, run.grid()?, run.normalize, run.workers)?;
    let mut m = run.manifest("wigner", config);
    let file = FieldFile {
        kind: "wigner".into(),
        field,
    };
    run.write_field(&mut m, &run.out, &file)?;
    finish_manifest(m, &run.out, started)
}

fn cmd_overlap(o: OverlapOpts) -> LabResult<()> {
    let started = Instant::now();
    let (o, config) = o.resolve()?;
    let run = FieldRun::new(
        "overlap",
        o.k,
        o.nbar,
        o.tau,
        o.nx,
        o.np,
        o.extent,
        o.normalize,
        o.out,
        o.format,
        o.workers,
        o.plot_script,
    )?;
    let sql = o.sql.unwrap_or(false);
    let state = run.state()?;
    let grid = run.grid()?;
    let field = overlap_field(&state, grid, run.normalize, run.workers)?;
    let mut m = run.manifest("overlap", config);
    m.param("sql", sql);
    let file = FieldFile {
        kind: "overlap".into(),
        field,
    };
    run.write_field(&mut m, &run.out, &file)?;
    if sql {
        let base = FieldFile {
            kind: "sql".into(),
            field: sql_field(state.k(), grid, run.workers)?,
        };
        let path = sibling(&run.out, &format!("sql.{}", run.format.extension()));
        run.write_field(&mut m, &path, &base)?;
    }
    finish_manifest(m, &run.out, started)
}

fn polyline(c: &Contour) -> Value {
    let pts: Vec<[f64; 2]> = c.points.iter().map(|&(x, p)| [x, p]).collect();
    json!({ "closed": c.closed, "points": pts })
}

fn cmd_contour(input: &Path, o: ContourOpts) -> LabResult<()> {
    let started = Instant::now();
    let (o, config) = o.resolve()?;
    let mode = o.level_mode.unwrap_or(LevelMode::Closing);
    let n_dirs = o.directions.unwrap_or(8);
    let n_iso = o.isotropy_directions.unwrap_or(DEFAULT_DIRECTIONS);
    if n_dirs == 0 || n_iso == 0 {
        return Err(LabError::usage("direction counts must be positive"));
    }
    let stem = input
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "field".into());
    let out = output_path(o.out, &format!("{stem}.contour.json"));

    let file = read_field(input)?;
    let level = feature_level(&file.field, mode)
        .map_err(|e| LabError::Numerical(format!("{}: {e}", input.display())))?;
    let central = feature_contour(&file.field, mode)
        .map_err(|e| LabError::Numerical(format!("{}: {e}", input.display())))?;
    let all = zero_contours(&file.field, level);
    let thetas = even_directions(n_dirs);
    let radii = extents(&central, &thetas)?;
    let iso = isotropy_ratio(&central, n_iso)?;

    let doc = json!({
        "input": input.display().to_string(),
        "kind": file.kind,
        "level_mode": mode.as_str(),
        "level": level,
        "central": polyline(&central),
        "contours": all.iter().map(polyline).collect::<Vec<_>>(),
        "metrics": {
            "isotropy_ratio": iso,
            "isotropy_directions": n_iso,
            "area": central.area(),
            "extents": thetas.iter().zip(&radii)
                .map(|(t, r)| json!({ "theta": t, "r": r }))
                .collect::<Vec<_>>(),
        },
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("contour serializes");
    text.push('\n');
    write_file(&out, text.as_bytes())?;

    let mut m = RunManifest::new("contour");
    m.param("input", input.display().to_string())
        .param("level_mode", mode.as_str())
        .param("directions", n_dirs)
        .param("isotropy_directions", n_iso);
    m.config_file = config;
    m.workers = 1;
    m.outputs.push(out.display().to_string());
    finish_manifest(m, &out, started)
}

fn cmd_scaling(o: ScalingOpts) -> LabResult<()> {
    let started = Instant::now();
    let (o, config) = o.resolve()?;
    let target_name = o.target.as_deref().unwrap_or("wigner-extent");
    let target = match target_name {
        "wigner-extent" => ScalingTarget::WignerExtent,
        "overlap-radius" => ScalingTarget::OverlapRadius,
        "sql-radius" => ScalingTarget::SqlRadius,
        "planted" => ScalingTarget::Planted {
            c: o.planted_c.unwrap_or(1.0),
            exponent: o.planted_exponent.unwrap_or(-1.0),
        },
        other => {
            return Err(LabError::usage(format!(
                "unknown target {other:?} (expected wigner-extent, overlap-radius, sql-radius or planted)"
            )))
        }
    };
    let thetas = match (o.directions, o.thetas) {
        (Some(0), _) => return Err(LabError::usage("--directions must be positive")),
        (Some(n), _) => even_directions(n),
        (None, Some(t)) => t.0,
        (None, None) => vec![0.0],
    };
    let spec = SweepSpec {
        target,
        ks: o.ks.map(|l| l.0).unwrap_or_else(|| DEFAULT_SWEEP.to_vec()),
        nbar: o.nbar.unwrap_or(DEFAULT_NBAR),
        tau: o.tau.unwrap_or(DEFAULT_TAU),
        thetas,
        mode: o.level_mode.unwrap_or(LevelMode::Closing),
        points: o.points.unwrap_or(ANALYSIS_POINTS),
    };
    if spec.ks.len() < 3 {
        return Err(LabError::usage("a sweep needs at least three k values"));
    }
    let workers = positive_workers(o.workers)?;
    let out = output_path(o.out, &format!("scaling-{}.json", target.name()));

    let sweep = run_sweep(&spec, workers)?;
    let doc = json!({
        "target": target.name(),
        "nbar": spec.nbar,
        "tau": spec.tau,
        "level_mode": spec.mode.as_str(),
        "thetas": spec.thetas,
        "points": sweep.points.iter()
            .map(|p| json!({ "k": p.k, "value": p.value, "raw": p.raw }))
            .collect::<Vec<_>>(),
        "fit": {
            "slope": sweep.fit.slope,
            "intercept": sweep.fit.intercept,
            "rms_residual": sweep.fit.rms_residual,
        },
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("fit serializes");
    text.push('\n');
    write_file(&out, text.as_bytes())?;

    let mut m = RunManifest::new("scaling");
    m.param("target", target.name())
        .param("ks", &spec.ks)
        .param("nbar", spec.nbar)
        .param("tau", spec.tau)
        .param("thetas", &spec.thetas)
        .param("level_mode", spec.mode.as_str())
        .param("points", spec.points);
    if let ScalingTarget::Planted { c, exponent } = target {
        m.param("planted_c", c).param("planted_exponent", exponent);
    }
    m.config_file = config;
    m.workers = workers;
    m.outputs.push(out.display().to_string());
    finish_manifest(m, &out, started)
}

fn cmd_oracle_check(o: OracleOpts) -> LabResult<()> {
    let started = Instant::now();
    let (o, config) = o.resolve()?;
    let defaults = CheckConfig::default();
    let cfg = CheckConfig {
        trials: o.trials.unwrap_or(defaults.trials),
        seed: o.seed.unwrap_or(defaults.seed),
        tol: o.tol.unwrap_or(defaults.tol),
        kset: o.kset.map(|l| l.0).unwrap_or(defaults.kset),
        max_radius: o.max_radius.unwrap_or(defaults.max_radius),
    };
    if !(cfg.tol >= 0.0) {
        return Err(LabError::usage("--tol must be non-negative"));
    }
    if !(cfg.max_radius > 0.0 && cfg.max_radius < 1.0) {
        return Err(LabError::usage("--max-radius must lie in (0, 1)"));
    }
    for &k in &cfg.kset {
        BargmannIndex::new(k)?;
    }
    let workers = positive_workers(o.workers)?;
    let report = oracle_check::run(&cfg, workers)?;
    let text = report.to_json();
    if let Some(out) = o.out {
        write_file(&out, text.as_bytes())?;
        let mut m = RunManifest::new("oracle-check");
        m.param("trials", cfg.trials)
            .param("seed", cfg.seed)
            .param("tol", cfg.tol)
            .param("kset", &cfg.kset)
            .param("max_radius", cfg.max_radius);
        m.config_file = config;
        m.workers = workers;
        m.outputs.push(out.display().to_string());
        finish_manifest(m, &out, started)?;
    } else {
        let mut stdout = std::io::stdout().lock();
        let _ = stdout.write_all(text.as_bytes());
    }
    if report.passed {
        Ok(())
    } else {
        let failed: usize = report.quantities.values().map(|q| q.failures).sum();
        Err(LabError::Numerical(format!(
            "{failed} comparisons and {} oracle runs failed (worst relative error {:e}, tolerance {:e})",
            report.errors.len(),
            report.worst_error(),
            cfg.tol
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        std::fs::write(&cfg, "k = 16\nnbar = 6\nextent = 0.5\nformat = \"json\"\n").unwrap();
        let cli = Cli::try_parse_from([
            "su11-phase-lab",
            "wigner",
            "--config",
            cfg.to_str().unwrap(),
            "--k",
            "8",
        ])
        .unwrap();
        let Command::Wigner(o) = cli.command else {
            panic!("wrong command")
        };
        let (o, _) = o.resolve().unwrap();
        assert_eq!(o.k, Some(8.0));
        assert_eq!(o.nbar, Some(6));
        assert_eq!(o.extent, Some(0.5));
        assert_eq!(o.format, Some(Format::Json));
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.toml");
        std::fs::write(&cfg, "kappa = 3\n").unwrap();
        let o = WignerOpts {
            config: Some(cfg),
            ..WignerOpts::default()
        };
        assert!(matches!(o.resolve(), Err(LabError::Parse { .. })));
    }
}
