use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use compact_wave::grid::{GridField, TimeMesh};
use compact_wave::harness::{
    convergence_study, extract_line, extract_slice, format_table, save_field_dump,
    save_series_csv, save_table_csv, ErrorSeries, RunConfig, RunManifest, SchemeChoice,
};
use compact_wave::oracles::{Scenario, ScenarioKind};
use compact_wave::parallel::max_workers;
use compact_wave::scheme::{check_stability, Observer, SchemeKind, SchemeState, StabilityReport};
use compact_wave::Error;

use crate::{Command, MeshArgs, SchemeArgs};

pub const EXIT_STABILITY: u8 = 2;
pub const EXIT_CONFIG: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Stability(String),
    Config(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Stability(_) => EXIT_STABILITY,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Stability(m) | CliError::Config(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn dispatch(config: Option<&Path>, command: Command) -> Result<()> {
    match command {
        Command::Run {
            scenario,
            mesh,
            scheme,
            common,
            snapshots,
            series_every,
            l2_scale,
            dump,
            strict,
        } => {
            let mut cfg = base_config(config, scenario)?;
            apply_mesh(&mut cfg, &mesh);
            apply_common(&mut cfg, &common)?;
            if let Some(s) = scheme {
                cfg.scheme = s.parse()?;
            }
            if let Some(snaps) = snapshots {
                cfg.output.snapshots = Some(snaps);
            }
            if let Some(k) = series_every {
                cfg.output.series_every = k;
            }
            if let Some(s) = l2_scale {
                cfg.output.l2_scale = s;
            }
            cfg.output.field_dumps |= dump;
            run(&cfg, strict)
        }
        Command::Converge {
            scenario,
            ladder,
            scheme,
            common,
            timing,
        } => {
            let mut cfg = base_config(config, scenario)?;
            apply_common(&mut cfg, &common)?;
            if let Some(s) = scheme {
                cfg.scheme = s.parse()?;
            }
            if let Some(l) = ladder {
                cfg.ladder = Some(parse_ladder(&l)?);
            }
            cfg.output.timing |= timing;
            converge(&cfg)
        }
        Command::CheckStability {
            scenario,
            mesh,
            strict,
        } => {
            let mut cfg = base_config(config, scenario)?;
            apply_mesh(&mut cfg, &mesh);
            let scenario = cfg.scenario()?;
            let (n, m) = cfg.mesh_size(&scenario)?;
            let report = stability(&scenario, n, m)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if strict && !report.satisfied {
                return Err(CliError::Stability(format!(
                    "stability condition violated: h_t² Σa²/h² / ρ_min = {}",
                    report.cfl_number
                )));
            }
            Ok(())
        }
        Command::Oracle {
            scenario,
            mesh,
            t,
            out,
        } => {
            let mut cfg = base_config(config, scenario)?;
            apply_mesh(&mut cfg, &mesh);
            if let Some(o) = out {
                cfg.output.dir = o;
            }
            oracle(&cfg, t)
        }
    }
}

fn base_config(path: Option<&Path>, scenario: Option<String>) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p).map_err(|e| match e {
            Error::Io { .. } => config_error(e.to_string()),
            other => other.into(),
        })?,
        None => RunConfig::new(
            scenario
                .clone()
                .ok_or_else(|| config_error("no scenario given (positional or --config)"))?,
        ),
    };
    if let Some(s) = scenario {
        cfg.scenario = s;
    }
    Ok(cfg)
}

fn apply_mesh(cfg: &mut RunConfig, mesh: &MeshArgs) {
    if mesh.n.is_some() {
        cfg.n = mesh.n;
        cfg.m = mesh.m;
    } else if mesh.m.is_some() {
        cfg.m = mesh.m;
    }
}

fn apply_common(cfg: &mut RunConfig, args: &SchemeArgs) -> Result<()> {
    if let Some(v) = &args.first_step {
        cfg.first_step = v.parse()?;
    }
    if args.workers.is_some() {
        cfg.workers = args.workers;
    }
    cfg.explicit_first_step_rho_weight |= args.explicit_rho_weight;
    cfg.explicit_first_step_velocity_correction |= args.explicit_velocity_correction;
    if let Some(o) = &args.out {
        cfg.output.dir = o.clone();
    }
    Ok(())
}

fn parse_ladder(items: &[String]) -> Result<Vec<(usize, usize)>> {
    items
        .iter()
        .map(|item| {
            let (n, m) = item
                .split_once(['x', 'X', ':'])
                .ok_or_else(|| config_error(format!("ladder entry `{item}` is not NxM")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| config_error(format!("ladder entry `{item}` is not NxM")))
            };
            Ok((parse(n)?, parse(m)?))
        })
        .collect()
}

fn stability(scenario: &Scenario, n: usize, m: usize) -> Result<StabilityReport> {
    let mesh = scenario.mesh(n, m)?;
    let medium = scenario.medium(mesh.space())?;
    Ok(check_stability(&mesh, &medium, None, None)?)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))
}

fn single_scheme(choice: SchemeChoice) -> Result<SchemeKind> {
    match choice {
        SchemeChoice::Compact => Ok(SchemeKind::Compact),
        SchemeChoice::Explicit => Ok(SchemeKind::Explicit),
        SchemeChoice::Both => Err(config_error("`run` takes one scheme, not both")),
    }
}

fn tag(t: f64) -> String {
    format!("{t:.4}")
}

/// Writes the slice through the centre plane `z = const`, the line along `x`
/// through the centre, and optionally a binary dump.
fn write_snapshot(
    scenario: &Scenario,
    field: &GridField,
    time: &TimeMesh,
    level: usize,
    dir: &Path,
    dump: bool,
) -> compact_wave::Result<Vec<PathBuf>> {
    let t = time.time(level);
    let mid = scenario.origin + scenario.extent / 2.0;
    let n = field.mesh().axes()[0].intervals();
    let mut written = Vec::new();

    let slice = extract_slice(field, 2, mid)?;
    let path = dir.join(format!("slice_t{}.csv", tag(t)));
    slice.save(&path, n, t)?;
    written.push(path);

    let line = extract_line(field, 0, &[mid; 3])?;
    let path = dir.join(format!("line_t{}.csv", tag(t)));
    let text: String = std::iter::once("x,u\n".to_string())
        .chain(line.iter().map(|(x, u)| format!("{x:e},{u:e}\n")))
        .collect();
    std::fs::write(&path, text).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    written.push(path);

    if dump {
        let path = dir.join(format!("field_t{}.bin", tag(t)));
        save_field_dump(field, time, level, &path)?;
        written.push(path);
    }
    Ok(written)
}

struct Snapshots<'a> {
    scenario: &'a Scenario,
    time: TimeMesh,
    levels: Vec<usize>,
    dir: &'a Path,
    dump: bool,
    written: Vec<PathBuf>,
}

impl Observer for Snapshots<'_> {
    fn observe(&mut self, state: &SchemeState) -> compact_wave::Result<()> {
        if self.levels.contains(&state.level) {
            let files = write_snapshot(self.scenario, &state.v_cur, &self.time, state.level, self.dir, self.dump)?;
            self.written.extend(files);
        }
        Ok(())
    }
}

fn snapshot_levels(times: &[f64], time: &TimeMesh) -> Result<Vec<usize>> {
    times
        .iter()
        .map(|&t| {
            let level = time
                .level_of(t)
                .ok_or_else(|| config_error(format!("snapshot time {t} lies outside [0, T]")))?;
            if (time.time(level) - t).abs() > 1e-9 * time.extent() {
                log::warn!("snapshot t = {t} is not a time level; using t = {}", time.time(level));
            }
            Ok(level)
        })
        .collect()
}

fn source_masses(scenario: &Scenario, mesh: &compact_wave::grid::SpaceMesh) -> BTreeMap<String, serde_json::Value> {
    let mut extra = BTreeMap::new();
    if let ScenarioKind::Layered { bump, center, .. } = &scenario.kind {
        extra.insert("source_integral_quadrature".into(), bump.radial_mass().into());
        extra.insert("source_integral_nodal".into(), bump.nodal_mass(mesh, center).into());
    }
    extra
}

fn new_manifest(cfg: &RunConfig, scenario: &Scenario, scheme: SchemeKind, n: usize, m: usize, report: StabilityReport) -> RunManifest {
    RunManifest {
        scenario: scenario.name.clone(),
        scheme,
        n,
        m,
        t_final: scenario.t_final,
        stability: report,
        first_step: cfg.first_step,
        workers: cfg.workers.unwrap_or_else(max_workers),
        wall_time_s: 0.0,
        stepping_time_s: 0.0,
        cpu_rel: None,
        outputs: Vec::new(),
        version: compact_wave::harness::manifest::VERSION.into(),
        extra: BTreeMap::new(),
    }
}

fn finish_manifest(mut manifest: RunManifest, files: &[PathBuf], dir: &Path) -> Result<()> {
    for f in files {
        manifest.add_output(f)?;
    }
    let path = dir.join("manifest.json");
    manifest.save(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cfg: &RunConfig, strict: bool) -> Result<()> {
    let started = Instant::now();
    let scheme = single_scheme(cfg.scheme)?;
    let scenario = cfg.scenario()?;
    let (n, m) = cfg.mesh_size(&scenario)?;
    let report = stability(&scenario, n, m)?;
    if !report.satisfied {
        let msg = format!(
            "stability condition violated: h_t² Σa²/h² / ρ_min = {:.4} > 1",
            report.cfl_number
        );
        if strict {
            return Err(CliError::Stability(msg));
        }
        log::warn!("{msg}");
    }
    let dir = cfg.output.dir.clone();
    create_dir(&dir)?;
    let mesh = scenario.mesh(n, m)?;
    let time = mesh.time().clone();

    let mut times = cfg
        .output
        .snapshots
        .clone()
        .unwrap_or_else(|| scenario.snapshots().to_vec());
    if times.is_empty() {
        times.push(scenario.t_final);
    }
    let mut snaps = Snapshots {
        scenario: &scenario,
        levels: snapshot_levels(&times, &time)?,
        time: time.clone(),
        dir: &dir,
        dump: cfg.output.field_dumps,
        written: Vec::new(),
    };

    let exact = |x: &[f64], t: f64| scenario.exact(x, t).unwrap_or(f64::NAN);
    let mut series = (scenario.has_exact() && cfg.output.series_every > 0)
        .then(|| ErrorSeries::new(&exact, time.clone(), scenario.coefficients(), cfg.output.series_every));

    let outcome = match series.as_mut() {
        Some(s) => compact_wave::harness::run_scenario(&scenario, scheme, n, m, &cfg.options(), &mut [&mut snaps, s])?,
        None => compact_wave::harness::run_scenario(&scenario, scheme, n, m, &cfg.options(), &mut [&mut snaps])?,
    };
    let mut files = std::mem::take(&mut snaps.written);

    let mut manifest = new_manifest(cfg, &scenario, scheme, n, m, report);
    manifest.extra = source_masses(&scenario, mesh.space());
    if let Some(series) = &series {
        let path = dir.join("series.csv");
        save_series_csv(&series.rows, &path, cfg.output.l2_scale)?;
        files.push(path);
        if let Some(e) = series.last() {
            println!(
                "{} {} N={n} M={m}: e_L2 = {:.6e}  e_H1 = {:.6e}  e_E = {:.6e}",
                scenario.name,
                scheme.name(),
                e.e_l2,
                e.e_h1,
                e.e_e
            );
            manifest.extra.insert("final_errors".into(), serde_json::to_value(e).expect("serializes"));
        }
    } else {
        println!(
            "{} {} N={n} M={m}: max |v(T)| = {:e}",
            scenario.name,
            scheme.name(),
            outcome.state.v_cur.max_abs()
        );
    }
    manifest.stepping_time_s = outcome.stepping_time.as_secs_f64();
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    finish_manifest(manifest, &files, &dir)
}

fn converge(cfg: &RunConfig) -> Result<()> {
    let started = Instant::now();
    let scenario = cfg.scenario()?;
    let ladder = scenario.ladder.clone();
    let dir = cfg.output.dir.clone();
    create_dir(&dir)?;
    let mut tables = Vec::new();
    for scheme in cfg.scheme.kinds() {
        let table = convergence_study(&scenario, scheme, &ladder, &cfg.options())?;
        print!("{}", format_table(&table));
        println!();
        tables.push(table);
    }
    let path = dir.join("table.csv");
    save_table_csv(&tables, &path, cfg.output.timing)?;
    let &(n, m) = ladder.last().expect("validated ladder is non-empty");
    let mut manifest = new_manifest(cfg, &scenario, tables[0].scheme, n, m, stability(&scenario, n, m)?);
    let last = tables[0].rows.last();
    manifest.cpu_rel = last.and_then(|r| r.cpu_rel);
    manifest.stepping_time_s = tables
        .iter()
        .flat_map(|t| &t.rows)
        .filter_map(|r| r.cpu_s)
        .sum();
    manifest.wall_time_s = started.elapsed().as_secs_f64();
    manifest.extra.insert("tables".into(), serde_json::to_value(&tables).expect("serializes"));
    finish_manifest(manifest, &[path], &dir)
}

fn oracle(cfg: &RunConfig, t: Option<f64>) -> Result<()> {
    let scenario = cfg.scenario()?;
    if !scenario.has_exact() {
        return Err(config_error(format!("scenario `{}` has no exact solution", scenario.name)));
    }
    let (n, m) = cfg.mesh_size(&scenario)?;
    let mesh = scenario.mesh(n, m)?;
    let time = mesh.time().clone();
    let t = t.unwrap_or(scenario.t_final);
    let level = snapshot_levels(&[t], &time)?[0];
    let field = GridField::from_fn(mesh.space(), |x| scenario.exact(x, t).unwrap_or(f64::NAN));
    if field.values().iter().any(|v| v.is_nan()) {
        return Err(config_error("exact solution undefined on part of the mesh"));
    }
    let dir = cfg.output.dir.clone();
    create_dir(&dir)?;
    let path = dir.join(format!("exact_t{}.bin", tag(t)));
    save_field_dump(&field, &time, level, &path)?;
    let slice = extract_slice(&field, 2, scenario.origin + scenario.extent / 2.0)?;
    let spath = dir.join(format!("exact_slice_t{}.csv", tag(t)));
    slice.save(&spath, n, t)?;
    println!("{} exact at t = {t}: max |u| = {:e}", scenario.name, field.max_abs());
    let report = stability(&scenario, n, m)?;
    finish_manifest(new_manifest(cfg, &scenario, SchemeKind::Compact, n, m, report), &[path, spath], &dir)
}
