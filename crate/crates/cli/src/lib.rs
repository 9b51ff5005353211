//! Command-line front end: configuration, subcommands and output files.

pub mod config;
pub mod output;
pub mod plot;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use couette::diagnostics::{
    bootstrap_report, echo_scan, fit_decay, linear_regression, onset_time, DecayKind, DecayModel,
    DiagnosticsRecord,
};
use couette::linear::{default_fit_window, linear_rate_report};
use couette::multipliers::{run_lemma_suite, LemmaSuiteConfig, MultiplierSpec, WeightContext};
use couette::solver::{run, RunOptions, SimConfig, Trajectory};

use config::{parse_config, Settings};
use output::{num, OutputDir};
use plot::{line_plot, Series};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CHECK_FAILED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Enstrophy fraction near the periodic seam above which a run is reported as
/// feeling the truncation of the `y` line.
const SEAM_WARNING: f64 = 1e-6;

#[derive(Parser, Debug)]
#[command(name = "couette", version, about = "Near-Couette 2D Navier-Stokes simulator and diagnostics")]
struct Cli {
    /// Warn about unknown configuration keys instead of failing.
    #[arg(long, global = true)]
    lenient: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form Kelvin evolution: norm time series and decay-rate fits.
    Linear(IoArgs),
    /// Full nonlinear run with diagnostics records.
    Simulate(SimulateArgs),
    /// Weight tables and the lemma property suite.
    Multipliers(MultipliersArgs),
    /// Simulations over a geometric viscosity grid and the T*(ν) fit.
    Sweep(IoArgs),
    /// Summaries and plots of a finished `simulate` directory.
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct IoArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Evaluate the per-mode `w` commutator terms as well.
    #[arg(long)]
    expensive_diagnostics: bool,
    /// Also write SVG plots of the main series.
    #[arg(long)]
    svg: bool,
}

#[derive(Args, Debug)]
struct MultipliersArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for the weight tables; omitted means no tables.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the lemma property suite; exits 2 on a violation.
    #[arg(long)]
    check: bool,
    /// Tables cover `|k| ≤ k_max`.
    #[arg(long, default_value_t = 4)]
    k_max: i64,
    /// Tables cover `η = 0, step, …, eta_max`.
    #[arg(long, default_value_t = 64.0)]
    eta_max: f64,
    #[arg(long, default_value_t = 1.0)]
    eta_step: f64,
    /// Comma separated sample times.
    #[arg(long, default_value = "0,1,5,10,50,100")]
    times: String,
    /// Samples for the pointwise bounds in `--check`.
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// A directory written by `simulate`.
    #[arg(long)]
    input: PathBuf,
    /// Defaults to `<input>/report`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: bool,
}

/// Runs the CLI on `argv` (including the program name) and returns the exit code.
pub fn run_command<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let strict = !cli.lenient;
    let result = match cli.command {
        Command::Linear(a) => load(&a.config, strict).and_then(|s| cmd_linear(&s, &a.out)),
        Command::Simulate(a) => load(&a.io.config, strict).and_then(|mut s| {
            s.record.expensive |= a.expensive_diagnostics;
            cmd_simulate(&s, &a.io.out, a.svg)
        }),
        Command::Multipliers(a) => cmd_multipliers(&a, strict),
        Command::Sweep(a) => load(&a.config, strict).and_then(|s| cmd_sweep(&s, &a.out)),
        Command::Report(a) => cmd_report(&a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_RUNTIME
        }
    }
}

fn load(path: &Path, strict: bool) -> Result<Settings> {
    let s = parse_config(path, strict)?;
    log::info!("resolved configuration: {}", serde_json::to_string(&s)?);
    Ok(s)
}

fn settings_json(s: &Settings) -> Value {
    serde_json::to_value(s).expect("settings serialize")
}

fn run_options(s: &Settings) -> RunOptions {
    RunOptions {
        weights: s.weights,
        record: s.record,
        echo_k_watch: s.echo_k_watch,
        snapshot_every: s.snapshot_every,
    }
}

fn cmd_linear(s: &Settings, out: &Path) -> Result<i32> {
    let f_in = s.sim.initial_field()?;
    let n = (s.sim.t_max / s.linear_t_step).floor() as usize;
    let t_grid: Vec<f64> = (0..=n).map(|i| i as f64 * s.linear_t_step).collect();
    let report = linear_rate_report(&f_in, s.sim.nu, &t_grid, s.fit_window, s.weights.sigma)
        .context("linear rate report")?;
    let mut dir = OutputDir::create(out, "linear", settings_json(s))?;
    write_serialized_csv(&mut dir, "linear.csv", &report.samples)?;
    dir.write_json(
        "linear_fit.json",
        &json!({
            "window": report.window,
            "ux_nonzero": report.ux_fit,
            "uy": report.uy_fit,
            "mixing": report.mixing_fit,
        }),
    )?;
    println!(
        "linear: |P!=0 U^x| ~ t^{:.4}, |U^y| ~ t^{:.4} over [{}, {}]",
        report.ux_fit.exponent, report.uy_fit.exponent, report.window.0, report.window.1
    );
    let root = dir.finish()?;
    println!("wrote {}", root.display());
    Ok(EXIT_OK)
}

fn write_serialized_csv<T: Serialize>(dir: &mut OutputDir, name: &str, items: &[T]) -> Result<()> {
    let mut buf = dir.csv_preamble().into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        for it in items {
            w.serialize(it)?;
        }
        w.flush()?;
    }
    dir.write(name, &buf)?;
    Ok(())
}

fn try_fit(series: &[(f64, f64)], kind: DecayKind, window: (f64, f64)) -> Value {
    match fit_decay(series, &DecayModel { kind, window }) {
        Ok(f) => json!({ "window": window, "fit": f }),
        Err(e) => json!({ "window": window, "error": e.to_string() }),
    }
}

fn series(records: &[DiagnosticsRecord], sel: impl Fn(&DiagnosticsRecord) -> f64) -> Vec<(f64, f64)> {
    records.iter().map(|r| (r.t, sel(r))).collect()
}

fn fits(records: &[DiagnosticsRecord], nu: f64, window: Option<(f64, f64)>) -> Value {
    let w = window.unwrap_or_else(|| default_fit_window(nu));
    let mut v = json!({
        "ux_nonzero_power": try_fit(&series(records, |r| r.ux_nonzero), DecayKind::Power, w),
        "uy_power": try_fit(&series(records, |r| r.uy), DecayKind::Power, w),
        // lossy elliptic decay, expected near ⟨t⟩^{−2}
        "psi_nonzero_power": try_fit(&series(records, |r| r.psi_nonzero_gevrey), DecayKind::Power, w),
    });
    if nu > 0.0 {
        v["l2_nonzero_exp_nu_t3"] = try_fit(
            &series(records, |r| r.l2_nonzero),
            DecayKind::ExpNuTCubed { nu },
            (0.0, f64::INFINITY),
        );
        v["l2_zero_mode_heat"] = try_fit(
            &series(records, |r| r.l2_zero_mode),
            DecayKind::QuarterHeat { nu },
            (1.0 / nu, f64::INFINITY),
        );
    }
    v
}

fn plots(dir: &mut OutputDir, records: &[DiagnosticsRecord]) -> Result<()> {
    let comment = format!("{} config: {}", output::VERSION, dir.config());
    let panels: [(&str, Vec<(&str, fn(&DiagnosticsRecord) -> f64)>); 3] = [
        (
            "norms",
            vec![
                ("l2_total", |r| r.l2_total),
                ("l2_zero_mode", |r| r.l2_zero_mode),
                ("l2_nonzero", |r| r.l2_nonzero),
            ],
        ),
        ("velocity", vec![("ux_nonzero", |r| r.ux_nonzero), ("uy", |r| r.uy)]),
        (
            "bootstrap",
            vec![("gevrey_A_sq", |r| r.gevrey_A_sq), ("gevrey_Anu_sq", |r| r.gevrey_Anu_sq)],
        ),
    ];
    for (name, sel) in panels {
        let ss: Vec<Series> = sel
            .iter()
            .map(|(label, f)| Series {
                label,
                points: series(records, f),
            })
            .collect();
        dir.write(&format!("{name}.svg"), line_plot(name, &ss, &comment).as_bytes())?;
    }
    Ok(())
}

fn simulate_once(sim: &SimConfig, s: &Settings) -> Result<Trajectory> {
    run(sim, &run_options(s)).map_err(|e| anyhow!("simulation at nu = {}: {e}", sim.nu))
}

fn cmd_simulate(s: &Settings, out: &Path, svg: bool) -> Result<i32> {
    let tr = simulate_once(&s.sim, s)?;
    let mut dir = OutputDir::create(out, "simulate", settings_json(s))?;
    dir.write_ndjson("records.ndjson", &tr.records)?;
    write_serialized_csv(&mut dir, "records.csv", &tr.records)?;
    let last = tr.coords.last().expect("run emits at least one record");
    let rows: Vec<Vec<String>> = (0..s.sim.grid.n_v)
        .map(|b| {
            vec![
                num(s.sim.grid.y_at(b)),
                num(last.phi[b]),
                num(last.u0[b]),
                num(last.v_minus_y[b]),
                num(last.vprime_minus_1[b]),
                num(last.g[b]),
                num(last.hbar[b]),
            ]
        })
        .collect();
    dir.write_csv(
        "coords_final.csv",
        &["y", "phi", "u0", "v_minus_y", "vprime_minus_1", "g", "hbar"],
        &rows,
    )?;
    let mut snap = Vec::new();
    tr.final_state.f_hat.write_snapshot(&mut snap)?;
    dir.write("final.cspf", &snap)?;
    for (i, st) in tr.snapshots.iter().enumerate() {
        let mut b = Vec::new();
        st.f_hat.write_snapshot(&mut b)?;
        dir.write(&format!("snapshots/{i:05}.cspf"), &b)?;
    }
    let boot = bootstrap_report(&tr.records, s.sim.epsilon, s.bootstrap_factor);
    let bursts = echo_scan(&tr.mode_history, s.echo_k_watch, &s.echo);
    let w = tr.final_state.warnings;
    let max_seam = tr.records.iter().map(|r| r.seam_fraction).fold(0.0, f64::max);
    if max_seam > SEAM_WARNING {
        log::warn!(
            "{max_seam:.2e} of the enstrophy reached |y| > 3L/4; increase L to keep the data away from the periodic seam"
        );
    }
    if w.remap_lost_modes > 0 {
        log::warn!(
            "remaps dropped {} modes carrying {:.3e} of L2 energy",
            w.remap_lost_modes,
            w.remap_lost_energy
        );
    }
    let summary = json!({
        "steps": tr.steps,
        "t_final": tr.final_state.t,
        "remaps": tr.final_state.remap_count,
        "warnings": {
            "remap_lost_modes": w.remap_lost_modes,
            "remap_lost_energy": w.remap_lost_energy,
            "cfl_limited_steps": w.cfl_limited_steps,
            "max_seam_fraction": max_seam,
            "seam_warning": max_seam > SEAM_WARNING,
        },
        "min_vprime": tr.records.iter().map(|r| r.min_vprime).fold(f64::INFINITY, f64::min),
        "bootstrap": boot,
        "echo_bursts": bursts,
        "mode_history": tr.mode_history,
        "fits": fits(&tr.records, s.sim.nu, s.fit_window),
    });
    dir.write_json("summary.json", &summary)?;
    if svg {
        plots(&mut dir, &tr.records)?;
    }
    for e in &boot.entries {
        println!(
            "{:<24} max/eps^{} = {:.4e}  growth {:.3}{}",
            e.name,
            e.epsilon_power,
            e.max_ratio,
            e.growth,
            if e.flagged { "  FLAGGED" } else { "" }
        );
    }
    let root = dir.finish()?;
    println!("wrote {} ({} steps, {} echo bursts)", root.display(), tr.steps, bursts.len());
    Ok(if boot.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn cmd_multipliers(a: &MultipliersArgs, strict: bool) -> Result<i32> {
    let s = match &a.config {
        Some(p) => load(p, strict)?,
        None => Settings::default(),
    };
    let ctx = WeightContext::new(s.weights)?;
    let mut code = EXIT_OK;
    let mut dir = match &a.out {
        Some(p) => Some(OutputDir::create(p, "multipliers", settings_json(&s))?),
        None => None,
    };
    if let Some(dir) = dir.as_mut() {
        let times: Vec<f64> = a
            .times
            .split(',')
            .map(|t| config::parse_number(t).ok_or_else(|| anyhow!("bad time `{t}`")))
            .collect::<Result<_>>()?;
        if !(a.eta_step > 0.0) || a.k_max < 0 {
            return Err(anyhow!("need eta_step > 0 and k_max >= 0"));
        }
        let n_eta = (a.eta_max / a.eta_step).floor() as usize;
        for spec in MultiplierSpec::ALL {
            let ks: Vec<i64> = if spec.uses_k() {
                (-a.k_max..=a.k_max).collect()
            } else {
                vec![0]
            };
            let mut rows = Vec::new();
            for &k in &ks {
                for i in 0..=n_eta {
                    let eta = i as f64 * a.eta_step;
                    for &t in &times {
                        let v = match ctx.multiplier_log(spec, k, eta, t) {
                            Ok(l) => num(l.exp()),
                            Err(_) => "inf".to_string(),
                        };
                        rows.push(vec![k.to_string(), num(eta), num(t), v]);
                    }
                }
            }
            dir.write_csv(&format!("{}.csv", spec.name()), &["k", "eta", "t", "value"], &rows)?;
        }
    }
    if a.check {
        let cfg = LemmaSuiteConfig {
            bound_samples: a.samples,
            ..Default::default()
        };
        let rep = run_lemma_suite(&ctx, &cfg);
        for c in &rep.checks {
            println!(
                "[{}] {:<30} {:.4e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.value
            );
        }
        if let Some(dir) = dir.as_mut() {
            dir.write_json("lemmas.json", &rep)?;
        }
        if !rep.all_passed() {
            code = EXIT_CHECK_FAILED;
        }
    }
    if let Some(dir) = dir {
        println!("wrote {}", dir.finish()?.display());
    }
    Ok(code)
}

/// Worker count: `COUETTE_THREADS` when set, capped by the available cores.
pub fn thread_count() -> usize {
    let avail = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    std::env::var("COUETTE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .map(|n| n.min(avail))
        .unwrap_or(avail)
}

#[derive(Debug, Serialize)]
struct SweepPoint {
    nu: f64,
    t_star: Option<f64>,
    steps: usize,
}

fn cmd_sweep(s: &Settings, out: &Path) -> Result<i32> {
    let nus = s.sweep.values();
    let mut jobs = vec![0.0];
    jobs.extend(&nus);
    let results: Mutex<Vec<Option<Result<Trajectory>>>> =
        Mutex::new((0..jobs.len()).map(|_| None).collect());
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..thread_count().min(jobs.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= jobs.len() {
                    break;
                }
                let mut sim = s.sim.clone();
                sim.nu = jobs[i];
                let r = simulate_once(&sim, s);
                results.lock().expect("no poisoned workers")[i] = Some(r);
            });
        }
    });
    let runs: Vec<Trajectory> = results
        .into_inner()
        .expect("workers joined")
        .into_iter()
        .map(|r| r.expect("every job ran"))
        .collect::<Result<_>>()?;

    let mut dir = OutputDir::create(out, "sweep", settings_json(s))?;
    let base = series(&runs[0].records, |r| r.l2_nonzero);
    let mut points = Vec::new();
    for (i, tr) in runs.iter().enumerate() {
        let name = if i == 0 {
            "points/baseline/records.ndjson".to_string()
        } else {
            format!("points/nu-{i:02}/records.ndjson")
        };
        dir.write_ndjson(&name, &tr.records)?;
        if i > 0 {
            points.push(SweepPoint {
                nu: tr.config.nu,
                t_star: onset_time(&series(&tr.records, |r| r.l2_nonzero), &base),
                steps: tr.steps,
            });
        }
    }
    let rows: Vec<Vec<String>> = points
        .iter()
        .map(|p| vec![num(p.nu), p.t_star.map(num).unwrap_or_default()])
        .collect();
    dir.write_csv("sweep.csv", &["nu", "t_star"], &rows)?;
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter_map(|p| p.t_star.map(|t| (p.nu.ln(), t.ln())))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = usable.iter().copied().unzip();
    let fit = if usable.len() >= 2 {
        linear_regression(&xs, &ys)
    } else {
        None
    };
    let fit_json = match fit {
        Some((a, b, r2)) => {
            println!("sweep: T* ~ nu^{b:.4} (r^2 {r2:.4}, {} points)", usable.len());
            json!({ "exponent": b, "log_coefficient": a, "r_squared": r2, "points": usable.len() })
        }
        None => {
            println!("sweep: insufficient points for a fit ({} usable)", usable.len());
            json!({ "error": "insufficient points", "points": usable.len() })
        }
    };
    dir.write_json("sweep.json", &json!({ "points": points, "fit": fit_json }))?;
    println!("wrote {}", dir.finish()?.display());
    Ok(EXIT_OK)
}

fn read_records(path: &Path) -> Result<(Value, Vec<DiagnosticsRecord>)> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Value = serde_json::from_str(lines.next().ok_or_else(|| anyhow!("empty records file"))?)?;
    if header["kind"] != "header" {
        return Err(anyhow!("{} does not start with a header line", path.display()));
    }
    let records = lines
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("record {}", i + 1)))
        .collect::<Result<Vec<DiagnosticsRecord>>>()?;
    Ok((header["config"].clone(), records))
}

fn cmd_report(a: &ReportArgs) -> Result<i32> {
    let (config, records) = read_records(&a.input.join("records.ndjson"))?;
    let out = a.out.clone().unwrap_or_else(|| a.input.join("report"));
    let mut dir = OutputDir::create(&out, "report", config.clone())?;
    let value = serde_json::to_value(&records)?;
    let mut rows = Vec::new();
    if let Some(first) = value.get(0).and_then(Value::as_object) {
        for key in first.keys() {
            let xs: Vec<f64> = value
                .as_array()
                .expect("array of records")
                .iter()
                .filter_map(|r| r[key].as_f64())
                .collect();
            if xs.is_empty() || key == "t" {
                continue;
            }
            let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            rows.push(vec![
                key.clone(),
                num(xs[0]),
                num(xs[xs.len() - 1]),
                num(min),
                num(max),
            ]);
        }
    }
    dir.write_csv("summary.csv", &["quantity", "first", "last", "min", "max"], &rows)?;
    let nu = config["sim"]["nu"].as_f64().unwrap_or(0.0);
    let window = config["fit_window"]
        .as_array()
        .and_then(|w| Some((w.first()?.as_f64()?, w.get(1)?.as_f64()?)));
    dir.write_json("fits.json", &fits(&records, nu, window))?;
    if a.svg {
        plots(&mut dir, &records)?;
    }
    println!("wrote {}", dir.finish()?.display());
    Ok(EXIT_OK)
}
