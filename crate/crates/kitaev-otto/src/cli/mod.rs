//! Command-line front end: flag/config-file resolution, orchestration of
//! the sweep machinery, and bit-stable tabular output.
//!
//! Flags override config-file values; every resolved parameter is echoed
//! in the output's `# config:` block. The `--workers` setting (or the
//! `KITAEV_OTTO_WORKERS` environment variable) changes wall time only,
//! never output bytes.

pub mod emit;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use ndarray::Array2;

use crate::couplings::{Boundary, CouplingSpec};
use crate::dynamics::{bath_average, occupation_at, BathSpec};
use crate::error::{Error, Result};
use crate::oracle::two_level_cycle_sum;
use crate::otto::{cycle_heats, mode_energies, CycleParams};
use crate::sweep::{
    peak_scaling, run_map, Axis, AxisName, HfRule, Observable, SweepBase, SweepRow,
};
use emit::{canonical_row, format_float, render_csv, render_json, Field, Table, CANONICAL_COLUMNS};

const ENV_WORKERS: &str = "KITAEV_OTTO_WORKERS";

#[derive(Parser)]
#[command(
    name = "kitaev-otto",
    about = "Quantum Otto cycle thermodynamics for long-range Kitaev chains",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a single cycle and emit one table row.
    Cycle(CycleCmd),
    /// Two-axis operation-mode map.
    Map(MapCmd),
    /// Observable curves vs h_i for a family of parameter values.
    Curve(CurveCmd),
    /// Peak-height scaling across chain sizes with exponent regression.
    Scaling(ScalingCmd),
    /// Occupation relaxation trajectories under thermal baths.
    Relax(RelaxCmd),
    /// Compare production formulas against the brute-force oracles.
    #[command(hide = true)]
    Oracle(OracleCmd),
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Number of sites (even).
    #[arg(long)]
    n: Option<usize>,
    /// Power-law exponent for both hopping and pairing.
    #[arg(long)]
    alpha: Option<f64>,
    /// Hopping exponent (overrides --alpha for hopping).
    #[arg(long)]
    alpha1: Option<f64>,
    /// Pairing exponent (overrides --alpha for pairing).
    #[arg(long)]
    alpha2: Option<f64>,
    /// Energy scale J.
    #[arg(long)]
    j: Option<f64>,
    /// Apply Kac normalization (true/false).
    #[arg(long)]
    kac: Option<bool>,
    /// Boundary condition: periodic or open.
    #[arg(long)]
    boundary: Option<String>,
    /// Site-resolved hopping table (matrix file, one row per line).
    #[arg(long)]
    disorder_file: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct FieldArgs {
    /// Field during cold thermalization.
    #[arg(long)]
    hi: Option<f64>,
    /// Field during hot thermalization (conflicts with --delta-h).
    #[arg(long, conflicts_with = "delta_h")]
    hf: Option<f64>,
    /// h_f = h_i + delta-h.
    #[arg(long)]
    delta_h: Option<f64>,
    /// Cold-bath temperature.
    #[arg(long)]
    tc: Option<f64>,
    /// Hot-bath temperature.
    #[arg(long)]
    th: Option<f64>,
    /// Classification tolerance.
    #[arg(long)]
    eps: Option<f64>,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Significant digits in CSV floats.
    #[arg(long)]
    digits: Option<usize>,
    /// Flat key = value config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (wall time only; output bytes are identical).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct CycleCmd {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    fields: FieldArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct MapCmd {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    fields: FieldArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Swept axis, exactly twice: name=start:stop:step, name=start:stop:xCOUNT,
    /// or name=v1,v2,... (names: alpha, hi, n, tc, th, t-ratio).
    #[arg(long = "sweep", num_args = 1, action = clap::ArgAction::Append)]
    sweeps: Vec<String>,
}

#[derive(Args)]
struct CurveCmd {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    fields: FieldArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// h_i axis: start:stop:step, start:stop:xCOUNT, or v1,v2,...
    #[arg(long)]
    sweep_hi: String,
    /// Family axis: name=v1,v2,... (one curve per value).
    #[arg(long)]
    family: String,
}

#[derive(Args)]
struct ScalingCmd {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    fields: FieldArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Chain sizes, e.g. 10,20,30 (at least three).
    #[arg(long)]
    ns: Option<String>,
    /// h_i window start:stop:step.
    #[arg(long)]
    hi_range: Option<String>,
    /// Peak observable: pi, pi-r, eta, eta-r, w, qc.
    #[arg(long)]
    observable: Option<String>,
}

#[derive(Args)]
struct RelaxCmd {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Field at which the chain is held.
    #[arg(long)]
    h: Option<f64>,
    /// Bath temperatures, comma list.
    #[arg(long)]
    bath_temps: Option<String>,
    /// Per-bath coupling rates (uniform across modes); defaults to --gamma.
    #[arg(long)]
    bath_rates: Option<String>,
    /// Uniform coupling rate when --bath-rates is omitted.
    #[arg(long)]
    gamma: Option<f64>,
    /// Constant initial occupation for every mode (conflicts with --n0-temp).
    #[arg(long, conflicts_with = "n0_temp")]
    n0: Option<f64>,
    /// Thermal initial occupations at this temperature.
    #[arg(long)]
    n0_temp: Option<f64>,
    /// Final time of the trajectory.
    #[arg(long)]
    t_stop: Option<f64>,
    /// Number of sample times (including t = 0).
    #[arg(long)]
    t_steps: Option<usize>,
}

#[derive(Args)]
struct OracleCmd {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    fields: FieldArgs,
    #[command(flatten)]
    output: OutputArgs,
}

// ---------------------------------------------------------------------
// config file

#[derive(Debug, Default)]
struct Settings {
    map: BTreeMap<String, String>,
}

impl Settings {
    fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)?;
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected 'key = value', got '{raw}'",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::Config(format!(
                    "{}: duplicate key '{key}'",
                    path.display()
                )));
            }
        }
        Ok(Self { map })
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<()> {
        for key in self.map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "unknown config key '{key}' (allowed: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| Error::Config(format!("config key '{key}': cannot parse '{raw}'"))),
        }
    }
}

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn require<T>(value: Option<T>, key: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(format!("missing required parameter '{key}'")))
}

const MODEL_KEYS: [&str; 8] = [
    "n",
    "alpha",
    "alpha1",
    "alpha2",
    "j",
    "kac",
    "boundary",
    "disorder-file",
];
const FIELD_KEYS: [&str; 6] = ["hi", "hf", "delta-h", "tc", "th", "eps"];
const OUTPUT_KEYS: [&str; 4] = ["out", "format", "digits", "workers"];

// ---------------------------------------------------------------------
// resolved settings

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

struct Resolved {
    base: SweepBase,
    format: Format,
    digits: usize,
    out: Option<PathBuf>,
    workers: Option<usize>,
    /// `key = value` echo lines for the output header.
    echo: Vec<(String, String)>,
}

fn parse_boundary(s: &str) -> Result<Boundary> {
    match s.to_ascii_lowercase().as_str() {
        "periodic" | "pbc" => Ok(Boundary::Periodic),
        "open" | "obc" => Ok(Boundary::Open),
        other => Err(Error::Config(format!(
            "boundary must be 'periodic' or 'open', got '{other}'"
        ))),
    }
}

fn load_disorder(path: &Path) -> Result<Array2<f64>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<f64> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|tok| !tok.is_empty())
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| {
                    Error::Config(format!("{}: bad matrix entry '{tok}'", path.display()))
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config(format!(
            "{}: disorder table must be a square matrix",
            path.display()
        )));
    }
    let mut table = Array2::zeros((n, n));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            table[[i, j]] = v;
        }
    }
    Ok(table)
}

struct CommandSpec<'a> {
    model: &'a ModelArgs,
    fields: Option<&'a FieldArgs>,
    output: &'a OutputArgs,
    extra_keys: &'a [&'a str],
    /// Axis names swept by the command; their scalar settings become optional.
    swept: &'a [AxisName],
}

fn resolve(cmd: &CommandSpec, settings: &Settings) -> Result<Resolved> {
    let mut allowed: Vec<&str> = Vec::new();
    allowed.extend(MODEL_KEYS);
    if cmd.fields.is_some() {
        allowed.extend(FIELD_KEYS);
    }
    allowed.extend(OUTPUT_KEYS);
    allowed.extend(cmd.extra_keys);
    settings.reject_unknown(&allowed)?;

    let swept = |name: AxisName| cmd.swept.contains(&name);
    let mut echo: Vec<(String, String)> = Vec::new();

    // model
    let n_opt = pick(cmd.model.n, settings.parse("n")?);
    let n = if swept(AxisName::N) {
        n_opt.unwrap_or(2)
    } else {
        require(n_opt, "n")?
    };
    let alpha_both = pick(cmd.model.alpha, settings.parse("alpha")?);
    let alpha1_opt = pick(cmd.model.alpha1, settings.parse("alpha1")?).or(alpha_both);
    let alpha2_opt = pick(cmd.model.alpha2, settings.parse("alpha2")?).or(alpha_both);
    let (alpha1, alpha2) = if swept(AxisName::Alpha) {
        (alpha1_opt.unwrap_or(1.0), alpha2_opt.unwrap_or(1.0))
    } else {
        (
            require(alpha1_opt, "alpha (or alpha1)")?,
            require(alpha2_opt, "alpha (or alpha2)")?,
        )
    };
    let j = pick(cmd.model.j, settings.parse("j")?).unwrap_or(1.0);
    let kac = pick(cmd.model.kac, settings.parse("kac")?).unwrap_or(true);
    let boundary = match pick(cmd.model.boundary.clone(), settings.parse("boundary")?) {
        Some(s) => parse_boundary(&s)?,
        None => Boundary::Periodic,
    };
    let disorder_path = pick(
        cmd.model.disorder_file.clone(),
        settings.parse::<PathBuf>("disorder-file")?,
    );
    let disorder = disorder_path.as_deref().map(load_disorder).transpose()?;

    // cycle parameters
    let (h_i, hf_rule, t_c, t_h, eps) = if let Some(fields) = cmd.fields {
        let hi_opt = pick(fields.hi, settings.parse("hi")?);
        let h_i = if swept(AxisName::HI) {
            hi_opt.unwrap_or(0.0)
        } else {
            require(hi_opt, "hi")?
        };
        let hf_flag = fields.hf;
        let dh_flag = fields.delta_h;
        let hf_file: Option<f64> = settings.parse("hf")?;
        let dh_file: Option<f64> = settings.parse("delta-h")?;
        let hf_rule = match (hf_flag, dh_flag) {
            (Some(hf), None) => HfRule::Fixed(hf),
            (None, Some(dh)) => HfRule::DeltaH(dh),
            (Some(_), Some(_)) => unreachable!("clap rejects the flag pair"),
            (None, None) => match (hf_file, dh_file) {
                (Some(_), Some(_)) => {
                    return Err(Error::Config(
                        "config file sets both 'hf' and 'delta-h'; keep one".into(),
                    ))
                }
                (Some(hf), None) => HfRule::Fixed(hf),
                (None, Some(dh)) => HfRule::DeltaH(dh),
                (None, None) => HfRule::DeltaH(0.5),
            },
        };
        let tc_opt = pick(fields.tc, settings.parse("tc")?);
        let th_opt = pick(fields.th, settings.parse("th")?);
        let t_c = if swept(AxisName::TC) || swept(AxisName::TRatio) {
            tc_opt.unwrap_or(1.0)
        } else {
            require(tc_opt, "tc")?
        };
        let t_h = if swept(AxisName::TH) {
            th_opt.unwrap_or(1.0)
        } else {
            require(th_opt, "th")?
        };
        let eps = pick(fields.eps, settings.parse("eps")?).unwrap_or(CycleParams::DEFAULT_EPS);
        (h_i, hf_rule, t_c, t_h, eps)
    } else {
        (0.0, HfRule::DeltaH(0.5), 1.0, 2.0, CycleParams::DEFAULT_EPS)
    };

    // output
    let format = match pick(cmd.output.format.clone(), settings.parse("format")?) {
        None => Format::Csv,
        Some(s) => match s.to_ascii_lowercase().as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => {
                return Err(Error::Config(format!(
                    "format must be 'csv' or 'json', got '{other}'"
                )))
            }
        },
    };
    let digits = pick(cmd.output.digits, settings.parse("digits")?).unwrap_or(12);
    if digits == 0 || digits > 17 {
        return Err(Error::Config(format!(
            "digits must be in 1..=17, got {digits}"
        )));
    }
    let out = pick(cmd.output.out.clone(), settings.parse::<PathBuf>("out")?);
    let workers = match pick(cmd.output.workers, settings.parse("workers")?) {
        Some(w) => Some(w),
        None => std::env::var(ENV_WORKERS)
            .ok()
            .map(|s| {
                s.parse::<usize>().map_err(|_| {
                    Error::Config(format!("{ENV_WORKERS} must be an integer, got '{s}'"))
                })
            })
            .transpose()?,
    };

    let ff = |x: f64| format_float(x, digits);
    echo.push(("n".into(), n.to_string()));
    echo.push(("alpha1".into(), ff(alpha1)));
    echo.push(("alpha2".into(), ff(alpha2)));
    echo.push(("j".into(), ff(j)));
    echo.push(("kac".into(), kac.to_string()));
    echo.push(("boundary".into(), boundary.to_string()));
    if let Some(p) = &disorder_path {
        echo.push(("disorder-file".into(), p.display().to_string()));
    }
    if cmd.fields.is_some() {
        echo.push(("hi".into(), ff(h_i)));
        match hf_rule {
            HfRule::DeltaH(d) => echo.push(("delta-h".into(), ff(d))),
            HfRule::Fixed(hf) => echo.push(("hf".into(), ff(hf))),
        }
        echo.push(("tc".into(), ff(t_c)));
        echo.push(("th".into(), ff(t_h)));
        echo.push(("eps".into(), ff(eps)));
    }
    echo.push((
        "format".into(),
        if format == Format::Csv { "csv" } else { "json" }.into(),
    ));
    echo.push(("digits".into(), digits.to_string()));
    // worker count is not echoed: output bytes are worker-independent

    let base = SweepBase {
        n,
        alpha1,
        alpha2,
        j,
        kac,
        boundary,
        disorder,
        h_i,
        hf_rule,
        t_c,
        t_h,
        eps,
    };
    Ok(Resolved {
        base,
        format,
        digits,
        out,
        workers,
        echo,
    })
}

// ---------------------------------------------------------------------
// axis and list parsing

fn parse_f64(token: &str, what: &str) -> Result<f64> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("{what}: cannot parse '{token}'")))
}

fn parse_values(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',').map(|tok| parse_f64(tok, what)).collect()
}

/// `start:stop:step`, `start:stop:xCOUNT`, or `v1,v2,...`.
fn parse_axis_values(name: AxisName, text: &str) -> Result<Axis> {
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "axis '{text}': expected start:stop:step or start:stop:xCOUNT"
            )));
        }
        let start = parse_f64(parts[0], "axis start")?;
        let stop = parse_f64(parts[1], "axis stop")?;
        if let Some(count) = parts[2].strip_prefix('x') {
            let count: usize = count
                .parse()
                .map_err(|_| Error::Config(format!("axis count: cannot parse '{}'", parts[2])))?;
            Axis::linspace(name, start, stop, count)
        } else {
            let step = parse_f64(parts[2], "axis step")?;
            Axis::range(name, start, stop, step)
        }
    } else {
        Axis::list(name, parse_values(text, "axis values")?)
    }
}

fn parse_axis(spec: &str) -> Result<Axis> {
    let Some((name, values)) = spec.split_once('=') else {
        return Err(Error::Config(format!(
            "sweep '{spec}': expected name=values"
        )));
    };
    parse_axis_values(name.trim().parse()?, values.trim())
}

// ---------------------------------------------------------------------
// execution helpers

fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None | Some(0) => Ok(f()),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))
            .map(|pool| pool.install(f)),
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        None => {
            std::io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, content)?;
            Ok(())
        }
    }
}

fn emit_rows(resolved: &Resolved, rows: &[SweepRow], extra_comments: &[String]) -> Result<()> {
    let table = Table {
        columns: CANONICAL_COLUMNS.to_vec(),
        rows: rows.iter().map(canonical_row).collect(),
    };
    let content = match resolved.format {
        Format::Csv => render_csv(&table, &resolved.echo, extra_comments, resolved.digits),
        Format::Json => render_json(&table, &resolved.echo),
    };
    write_output(resolved.out.as_deref(), &content)
}

// ---------------------------------------------------------------------
// command runners

fn run_cycle_cmd(cmd: &CycleCmd) -> Result<()> {
    let settings = Settings::load(cmd.output.config.as_deref())?;
    let mut resolved = resolve(
        &CommandSpec {
            model: &cmd.model,
            fields: Some(&cmd.fields),
            output: &cmd.output,
            extra_keys: &[],
            swept: &[],
        },
        &settings,
    )?;
    resolved.echo.push(("command".into(), "cycle".into()));
    resolved.echo.sort();
    let (spec, params) = resolved.base.resolve(&[])?;
    let outcome = crate::otto::run_cycle(&params, &spec)?;
    let row = SweepRow {
        alpha: spec.alpha1,
        h_i: params.h_i,
        h_f: params.h_f,
        n: spec.n,
        t_c: params.t_c,
        t_h: params.t_h,
        outcome,
    };
    emit_rows(&resolved, &[row], &[])
}

fn run_map_cmd(cmd: &MapCmd) -> Result<()> {
    if cmd.sweeps.len() != 2 {
        return Err(Error::Config(format!(
            "map needs exactly two --sweep axes, got {}",
            cmd.sweeps.len()
        )));
    }
    let axis0 = parse_axis(&cmd.sweeps[0])?;
    let axis1 = parse_axis(&cmd.sweeps[1])?;
    let settings = Settings::load(cmd.output.config.as_deref())?;
    let mut resolved = resolve(
        &CommandSpec {
            model: &cmd.model,
            fields: Some(&cmd.fields),
            output: &cmd.output,
            extra_keys: &[],
            swept: &[axis0.name, axis1.name],
        },
        &settings,
    )?;
    resolved.echo.push(("command".into(), "map".into()));
    resolved.echo.push(("sweep0".into(), cmd.sweeps[0].clone()));
    resolved.echo.push(("sweep1".into(), cmd.sweeps[1].clone()));
    resolved.echo.sort();
    let base = resolved.base.clone();
    let axes = [axis0, axis1];
    let rows = with_workers(resolved.workers, move || run_map(&base, &axes))??;
    emit_rows(&resolved, &rows, &[])
}

fn run_curve_cmd(cmd: &CurveCmd) -> Result<()> {
    let hi_axis = parse_axis_values(AxisName::HI, cmd.sweep_hi.trim())?;
    let family = parse_axis(&cmd.family)?;
    if family.name == AxisName::HI {
        return Err(Error::Config("curve family axis cannot be h_i".into()));
    }
    let settings = Settings::load(cmd.output.config.as_deref())?;
    let mut resolved = resolve(
        &CommandSpec {
            model: &cmd.model,
            fields: Some(&cmd.fields),
            output: &cmd.output,
            extra_keys: &[],
            swept: &[AxisName::HI, family.name],
        },
        &settings,
    )?;
    resolved.echo.push(("command".into(), "curve".into()));
    resolved
        .echo
        .push(("sweep-hi".into(), cmd.sweep_hi.clone()));
    resolved.echo.push(("family".into(), cmd.family.clone()));
    resolved.echo.sort();
    let base = resolved.base.clone();
    let axes = [family, hi_axis];
    let rows = with_workers(resolved.workers, move || run_map(&base, &axes))??;
    emit_rows(&resolved, &rows, &[])
}

fn run_scaling_cmd(cmd: &ScalingCmd) -> Result<()> {
    let settings = Settings::load(cmd.output.config.as_deref())?;
    let mut resolved = resolve(
        &CommandSpec {
            model: &cmd.model,
            fields: Some(&cmd.fields),
            output: &cmd.output,
            extra_keys: &["ns", "hi-range", "observable"],
            swept: &[AxisName::HI, AxisName::N],
        },
        &settings,
    )?;
    let ns_text = require(pick(cmd.ns.clone(), settings.parse("ns")?), "ns")?;
    let sizes: Vec<usize> = ns_text
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("ns: cannot parse '{tok}'")))
        })
        .collect::<Result<_>>()?;
    let hi_text = pick(cmd.hi_range.clone(), settings.parse("hi-range")?)
        .unwrap_or_else(|| "0:2:0.01".to_string());
    let hi_axis = parse_axis_values(AxisName::HI, &hi_text)?;
    let obs_text = pick(cmd.observable.clone(), settings.parse("observable")?)
        .unwrap_or_else(|| "pi".to_string());
    let observable: Observable = obs_text.parse()?;

    resolved.echo.push(("command".into(), "scaling".into()));
    resolved.echo.push(("ns".into(), ns_text.clone()));
    resolved.echo.push(("hi-range".into(), hi_text.clone()));
    resolved
        .echo
        .push(("observable".into(), observable.label().into()));
    resolved.echo.sort();

    let base = resolved.base.clone();
    let sizes_for_run = sizes.clone();
    let report = with_workers(resolved.workers, move || {
        peak_scaling(&base, &sizes_for_run, observable, &hi_axis)
    })??;

    // peak rows in canonical schema plus a branch column
    let mut columns = CANONICAL_COLUMNS.to_vec();
    columns.push("branch");
    columns.push("value");
    let mut rows = Vec::new();
    for sr in &report.rows {
        for (branch, point) in [("ferro", &sr.ferro), ("para", &sr.para)] {
            if let Some(p) = point {
                let mut row = canonical_row(&p.row);
                row.push(Field::Text(branch.into()));
                row.push(p.value.map(Field::Float).unwrap_or(Field::Missing));
                rows.push(row);
            }
        }
    }
    let mut comments = vec![format!(
        "h_c = {}",
        format_float(report.h_c, resolved.digits)
    )];
    for (branch, fit) in [("ferro", &report.ferro_fit), ("para", &report.para_fit)] {
        match fit {
            Some(r) => comments.push(format!(
                "regression {branch}: exponent = {}, intercept = {}, residual_rms = {}, points = {}",
                format_float(r.exponent, resolved.digits),
                format_float(r.intercept, resolved.digits),
                format_float(r.residual, resolved.digits),
                r.points
            )),
            None => comments.push(format!("regression {branch}: insufficient peaks")),
        }
    }
    let table = Table { columns, rows };
    let content = match resolved.format {
        Format::Csv => render_csv(&table, &resolved.echo, &comments, resolved.digits),
        Format::Json => render_json(&table, &resolved.echo),
    };
    write_output(resolved.out.as_deref(), &content)
}

fn run_relax_cmd(cmd: &RelaxCmd) -> Result<()> {
    let settings = Settings::load(cmd.output.config.as_deref())?;
    let mut resolved = resolve(
        &CommandSpec {
            model: &cmd.model,
            fields: None,
            output: &cmd.output,
            extra_keys: &[
                "h",
                "bath-temps",
                "bath-rates",
                "gamma",
                "n0",
                "n0-temp",
                "t-stop",
                "t-steps",
            ],
            swept: &[],
        },
        &settings,
    )?;
    let h = require(pick(cmd.h, settings.parse("h")?), "h")?;
    let temps_text = require(
        pick(cmd.bath_temps.clone(), settings.parse("bath-temps")?),
        "bath-temps",
    )?;
    let temps = parse_values(&temps_text, "bath-temps")?;
    let t_stop = require(pick(cmd.t_stop, settings.parse("t-stop")?), "t-stop")?;
    if t_stop.is_nan() || t_stop <= 0.0 {
        return Err(Error::Config(format!(
            "t-stop must be positive, got {t_stop}"
        )));
    }
    let t_steps = pick(cmd.t_steps, settings.parse("t-steps")?).unwrap_or(51);
    if t_steps < 2 {
        return Err(Error::Config(format!(
            "t-steps must be at least 2, got {t_steps}"
        )));
    }
    let gamma0 = pick(cmd.gamma, settings.parse("gamma")?).unwrap_or(1.0);

    let spec = CouplingSpec::new(
        resolved.base.n,
        resolved.base.alpha1,
        resolved.base.alpha2,
        resolved.base.j,
        resolved.base.kac,
        resolved.base.boundary,
        resolved.base.disorder.clone(),
    )?;
    let omegas = mode_energies(&spec, h)?;
    let n_modes = omegas.len();

    let bath = match pick(cmd.bath_rates.clone(), settings.parse("bath-rates")?) {
        None => BathSpec::uniform(temps.clone(), gamma0, n_modes)?,
        Some(text) => {
            let per_bath = parse_values(&text, "bath-rates")?;
            if per_bath.len() != temps.len() {
                return Err(Error::Config(format!(
                    "bath-rates lists {} rates for {} baths",
                    per_bath.len(),
                    temps.len()
                )));
            }
            let mut rates = Array2::zeros((temps.len(), n_modes));
            for (b, &g) in per_bath.iter().enumerate() {
                for k in 0..n_modes {
                    rates[[b, k]] = g;
                }
            }
            BathSpec::new(temps.clone(), rates)?
        }
    };

    let n0_const = pick(cmd.n0, settings.parse("n0")?);
    let n0_temp = pick(cmd.n0_temp, settings.parse("n0-temp")?);
    if n0_const.is_some() && n0_temp.is_some() {
        return Err(Error::Config(
            "set one of 'n0' and 'n0-temp', not both".into(),
        ));
    }
    let initial: Vec<f64> = match (n0_const, n0_temp) {
        (Some(c), _) => vec![c; n_modes],
        (None, temp) => {
            let t0 = temp.unwrap_or(temps[0]);
            if t0.is_nan() || t0 <= 0.0 {
                return Err(Error::Config(format!("n0-temp must be positive, got {t0}")));
            }
            omegas
                .iter()
                .map(|&w| crate::otto::fermi_occupation(t0, w))
                .collect()
        }
    };

    let ff = |x: f64| format_float(x, resolved.digits);
    resolved.echo.push(("command".into(), "relax".into()));
    resolved.echo.push(("h".into(), ff(h)));
    resolved
        .echo
        .push(("bath-temps".into(), temps_text.clone()));
    resolved.echo.push(("gamma".into(), ff(gamma0)));
    resolved.echo.push(("t-stop".into(), ff(t_stop)));
    resolved.echo.push(("t-steps".into(), t_steps.to_string()));
    resolved.echo.sort();

    let mut rows = Vec::with_capacity(t_steps * n_modes);
    for step in 0..t_steps {
        let t = t_stop * step as f64 / (t_steps - 1) as f64;
        for (idx, &omega) in omegas.iter().enumerate() {
            let f_tilde = bath_average(&bath, omega, idx)?;
            let occ = occupation_at(t, initial[idx], f_tilde, bath.gamma_sum(idx));
            rows.push(vec![
                Field::Float(t),
                Field::Int(idx as i64),
                Field::Float(omega),
                Field::Float(f_tilde),
                Field::Float(occ),
            ]);
        }
    }
    let table = Table {
        columns: vec!["t", "mode_index", "omega", "f_tilde", "occupation"],
        rows,
    };
    let content = match resolved.format {
        Format::Csv => render_csv(&table, &resolved.echo, &[], resolved.digits),
        Format::Json => render_json(&table, &resolved.echo),
    };
    write_output(resolved.out.as_deref(), &content)
}

fn run_oracle_cmd(cmd: &OracleCmd) -> Result<()> {
    let settings = Settings::load(cmd.output.config.as_deref())?;
    let resolved = resolve(
        &CommandSpec {
            model: &cmd.model,
            fields: Some(&cmd.fields),
            output: &cmd.output,
            extra_keys: &[],
            swept: &[],
        },
        &settings,
    )?;
    let (spec, params) = resolved.base.resolve(&[])?;
    let (q_h, q_c, w) = cycle_heats(&params, &spec)?;
    let (oq_h, oq_c, ow) = two_level_cycle_sum(&params, &spec)?;
    let dev = (q_h - oq_h)
        .abs()
        .max((q_c - oq_c).abs())
        .max((w - ow).abs());
    let mut out = String::new();
    out.push_str(&format!(
        "cycle heats     : Q_h={q_h:+.15e} Q_c={q_c:+.15e} W={w:+.15e}\n"
    ));
    out.push_str(&format!(
        "two-level oracle: Q_h={oq_h:+.15e} Q_c={oq_c:+.15e} W={ow:+.15e}\n"
    ));
    out.push_str(&format!("max |deviation| : {dev:.3e}\n"));
    if spec.boundary == Boundary::Periodic && spec.disorder.is_none() {
        let sys = crate::bdg::diagonalize(&crate::bdg::build_quadratic(&spec, params.h_i)?)?;
        let mut omegas = crate::spectrum::ModeTable::new(&spec)?.omega(params.h_i);
        omegas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let qp = sys.quasiparticle_energies();
        let mdev = omegas
            .iter()
            .zip(&qp)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        out.push_str(&format!(
            "nambu vs momentum (h_i): max |deviation| = {mdev:.3e}\n"
        ));
        out.push_str(&format!(
            "particle-hole residual  : {:.3e}\n",
            crate::bdg::particle_hole_check(&sys)
        ));
    }
    write_output(resolved.out.as_deref(), &out)
}

/// Parse the command line and run; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Cycle(c) => run_cycle_cmd(c),
        Command::Map(c) => run_map_cmd(c),
        Command::Curve(c) => run_curve_cmd(c),
        Command::Scaling(c) => run_scaling_cmd(c),
        Command::Relax(c) => run_relax_cmd(c),
        Command::Oracle(c) => run_oracle_cmd(c),
    };
    match result {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
