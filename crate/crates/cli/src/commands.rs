use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use thz_core::channel::{absorption_coefficient, fixtures, load_absorption_table, spreading_loss_db, AbsorptionTable};
use thz_core::link_budget::{min_beamwidth_deg, LinkDemand, LinkError};
use thz_core::simulator::{beamwidth_grid, optimal_beamwidth, write_trace_csv, Objective, Simulation};
use thz_core::spectrum::{build_lookup_table, FrequencyBand, SpectrumError};

use crate::config::RunConfigFile;
use crate::{resolve_output, Cli, CliError, Command, CommonArgs, Format, LossArgs, MinbwArgs, SimulateArgs, SweepArgs, WindowsArgs};

impl From<SpectrumError> for CliError {
    fn from(e: SpectrumError) -> Self {
        match e {
            SpectrumError::Channel(c) => c.into(),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<LinkError> for CliError {
    fn from(e: LinkError) -> Self {
        CliError::Config(e.to_string())
    }
}

pub fn dispatch(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let c = &cli.common;
    match &cli.command {
        Command::Loss(a) => loss(c, a, stdout),
        Command::Windows(a) => windows(c, a, stdout, stderr),
        Command::Minbw(a) => minbw(c, a, stdout, stderr),
        Command::Simulate(a) => simulate(c, a, stdout),
        Command::Sweep(a) => sweep(c, a, stdout, stderr),
    }
}

fn round_to(x: f64, decimals: i32) -> f64 {
    let s = 10f64.powi(decimals);
    (x * s).round() / s
}

pub fn load_absorption(common: &CommonArgs) -> Result<Arc<AbsorptionTable>, CliError> {
    match &common.absorption {
        None => Ok(Arc::new(fixtures::realistic().clone())),
        Some(path) => {
            let file = std::fs::File::open(path)
                .map_err(|e| CliError::Data(format!("cannot open absorption table {}: {e}", path.display())))?;
            load_absorption_table(std::io::BufReader::new(file))
                .map(Arc::new)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
        }
    }
}

pub fn load_config(common: &CommonArgs) -> Result<RunConfigFile, CliError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfigFile::load(path)?,
        None => RunConfigFile::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn emit(common: &CommonArgs, body: &[u8], stdout: &mut dyn Write) -> Result<(), CliError> {
    match &common.out {
        Some(path) => write_file(path, body),
        None => Ok(stdout.write_all(body)?),
    }
}

fn write_file(path: &Path, body: &[u8]) -> Result<(), CliError> {
    let path = resolve_output(path);
    std::fs::write(&path, body).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut body = serde_json::to_vec_pretty(value).expect("plain data serializes");
    body.push(b'\n');
    body
}

fn check_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Config(format!("frequency step must be positive (got {step})")));
    }
    Ok(FrequencyBand::new(lo, hi)?.grid(step))
}

fn check_positive(name: &str, values: &[f64]) -> Result<(), CliError> {
    match values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        Some(v) => Err(CliError::Config(format!("{name} must be positive (got {v})"))),
        None if values.is_empty() => Err(CliError::Config(format!("{name} needs at least one value"))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct LossRow {
    f_ghz: f64,
    d_m: f64,
    rho: f64,
    spread_db: f64,
    abs_db: f64,
    total_db: f64,
}

fn loss(common: &CommonArgs, args: &LossArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let table = load_absorption(common)?;
    let freqs = check_grid(args.f_lo, args.f_hi, args.f_step)?;
    check_positive("distance", &args.distances)?;
    if args.rhos.is_empty() || args.rhos.iter().any(|r| r.is_nan() || *r < 0.0) {
        return Err(CliError::Config("rho values must be >= 0".into()));
    }
    let mut rows = Vec::with_capacity(freqs.len() * args.distances.len() * args.rhos.len());
    for &rho in &args.rhos {
        for &d in &args.distances {
            for &f in &freqs {
                let spread = spreading_loss_db(f, d)?;
                let abs = absorption_coefficient(&table, f, rho)? * d / 1000.0;
                rows.push(LossRow {
                    f_ghz: f,
                    d_m: d,
                    rho,
                    spread_db: spread,
                    abs_db: abs,
                    total_db: spread + abs,
                });
            }
        }
    }
    let body = match common.format {
        Format::Csv => {
            let mut b = b"f_ghz,d_m,rho,spread_db,abs_db,total_db\n".to_vec();
            for r in &rows {
                writeln!(
                    b,
                    "{:.3},{},{},{:.4},{:.4},{:.4}",
                    r.f_ghz, r.d_m, r.rho, r.spread_db, r.abs_db, r.total_db
                )?;
            }
            b
        }
        Format::Json => {
            let rounded: Vec<LossRow> = rows
                .iter()
                .map(|r| LossRow {
                    f_ghz: round_to(r.f_ghz, 3),
                    d_m: r.d_m,
                    rho: r.rho,
                    spread_db: round_to(r.spread_db, 4),
                    abs_db: round_to(r.abs_db, 4),
                    total_db: round_to(r.total_db, 4),
                })
                .collect();
            to_json(&rounded)
        }
    };
    emit(common, &body, stdout)
}

#[derive(Serialize)]
struct JsonWindow {
    f_c_ghz: f64,
    b_ghz: f64,
    mean_rate_gbps: f64,
}

#[derive(Serialize)]
struct JsonRow {
    d_lo_m: f64,
    d_hi_m: f64,
    wide_count: usize,
    narrow_count: usize,
    windows: Vec<JsonWindow>,
}

fn windows(common: &CommonArgs, args: &WindowsArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let table = load_absorption(common)?;
    let mut cfg = load_config(common)?;
    if let Some(b) = args.beamwidth {
        cfg.radio.beamwidth_deg = b;
    }
    if let Some(rho) = args.rho {
        cfg.atmosphere.rho = rho;
    }
    let mut params = cfg.window_params;
    params.band.lo_ghz = args.band_lo.unwrap_or(params.band.lo_ghz);
    params.band.hi_ghz = args.band_hi.unwrap_or(params.band.hi_ghz);
    params.step_ghz = args.step.unwrap_or(params.step_ghz);
    params.clip_fraction = args.clip.unwrap_or(params.clip_fraction);
    params.min_width_ghz = args.min_width.unwrap_or(params.min_width_ghz);
    FrequencyBand::new(params.band.lo_ghz, params.band.hi_ghz)?;
    let radio = cfg.radio_params()?;
    let lookup = build_lookup_table(&table, &radio, cfg.atmosphere.rho, &args.distances, &params)?;
    for row in &lookup.rows {
        writeln!(
            stderr,
            "[{}, {}) m: {} windows >= {} GHz, {} narrower",
            row.d_lo_m,
            row.d_hi_m,
            row.wide_count(),
            params.min_width_ghz,
            row.narrow_count()
        )?;
    }
    let body = match common.format {
        Format::Csv => {
            let mut b = Vec::new();
            lookup.write_csv(&mut b)?;
            b
        }
        Format::Json => {
            let rows: Vec<JsonRow> = lookup
                .rows
                .iter()
                .map(|r| JsonRow {
                    d_lo_m: r.d_lo_m,
                    d_hi_m: r.d_hi_m,
                    wide_count: r.wide_count(),
                    narrow_count: r.narrow_count(),
                    windows: r
                        .windows
                        .iter()
                        .map(|w| JsonWindow {
                            f_c_ghz: round_to(w.center_ghz, 3),
                            b_ghz: round_to(w.bandwidth_ghz, 3),
                            mean_rate_gbps: round_to(w.mean_rate_bps / 1e9, 3),
                        })
                        .collect(),
                })
                .collect();
            to_json(&rows)
        }
    };
    emit(common, &body, stdout)
}

#[derive(Serialize)]
struct MinbwRow {
    f_ghz: f64,
    d_m: f64,
    delta_min_deg: Option<f64>,
}

fn minbw(common: &CommonArgs, args: &MinbwArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let table = load_absorption(common)?;
    let cfg = load_config(common)?;
    let radio = cfg.radio_params()?;
    let rho = args.rho.unwrap_or(cfg.atmosphere.rho);
    let freqs = check_grid(args.f_lo, args.f_hi, args.f_step)?;
    check_positive("distance", &args.distances)?;
    let mut rows = Vec::with_capacity(freqs.len() * args.distances.len());
    let mut unattainable = 0usize;
    for &d in &args.distances {
        for &f in &freqs {
            let demand = LinkDemand::new(args.rate_gbps * 1e9, args.bandwidth_ghz * 1e9, f)?;
            let loss = spreading_loss_db(f, d)? + absorption_coefficient(&table, f, rho)? * d / 1000.0;
            let delta = match min_beamwidth_deg(&radio, &demand, loss) {
                Ok(v) => Some(v),
                Err(LinkError::Unattainable { .. }) => {
                    unattainable += 1;
                    None
                }
                Err(e) => return Err(e.into()),
            };
            rows.push(MinbwRow {
                f_ghz: f,
                d_m: d,
                delta_min_deg: delta,
            });
        }
    }
    let body = match common.format {
        Format::Csv => {
            let mut b = b"f_ghz,d_m,delta_min_deg\n".to_vec();
            for r in &rows {
                match r.delta_min_deg {
                    Some(v) => writeln!(b, "{:.3},{},{:.4}", r.f_ghz, r.d_m, v)?,
                    None => writeln!(b, "{:.3},{},", r.f_ghz, r.d_m)?,
                }
            }
            b
        }
        Format::Json => {
            let rounded: Vec<MinbwRow> = rows
                .iter()
                .map(|r| MinbwRow {
                    f_ghz: round_to(r.f_ghz, 3),
                    d_m: r.d_m,
                    delta_min_deg: r.delta_min_deg.map(|v| round_to(v, 4)),
                })
                .collect();
            to_json(&rounded)
        }
    };
    emit(common, &body, stdout)?;
    writeln!(stderr, "minbw: {unattainable} of {} cells unattainable", rows.len())?;
    if unattainable == rows.len() {
        return Err(CliError::Infeasible("no grid cell can meet the demand".into()));
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateReport {
    peak_gbps: f64,
    avg_coverage: f64,
    outage_frac: f64,
    aggregate_peak_gbps: f64,
    mean_rate_gbps: f64,
    seed: u64,
    scenario: String,
    service: String,
    users: usize,
    n_slots: usize,
    beamwidth_deg: f64,
}

fn simulate(common: &CommonArgs, args: &SimulateArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let mut cfg = load_config(common)?;
    if let Some(b) = args.beamwidth {
        cfg.radio.beamwidth_deg = b;
    }
    let absorption = load_absorption(common)?;
    let sim = Simulation::new(cfg.to_sim_config(absorption)?)?;
    let radio = sim.config().radio;
    let trajectories = sim.trajectories();
    let out = sim.evaluate(&radio, &trajectories);
    let report = SimulateReport {
        peak_gbps: round_to(out.peak_throughput_bps / 1e9, 3),
        avg_coverage: round_to(out.avg_user_coverage, 3),
        outage_frac: round_to(out.outage_fraction, 4),
        aggregate_peak_gbps: round_to(out.aggregate_peak_bps / 1e9, 3),
        mean_rate_gbps: round_to(out.mean_user_rate_bps / 1e9, 3),
        seed: cfg.seed,
        scenario: cfg.placement.label().to_owned(),
        service: cfg.service_label(),
        users: cfg.user_count(),
        n_slots: cfg.n_slots,
        beamwidth_deg: cfg.radio.beamwidth_deg,
    };
    if let Some(path) = args.trace.as_ref().or(cfg.trace_path.as_ref()) {
        let records = sim.trace(&radio, &trajectories);
        let mut b = Vec::new();
        write_trace_csv(&trajectories, &records, &mut b)?;
        write_file(path, &b)?;
    }
    let body = match common.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let r = &report;
            format!(
                "peak_gbps,avg_coverage,outage_frac,aggregate_peak_gbps,mean_rate_gbps,seed,scenario,service,users,n_slots,beamwidth_deg\n\
                 {:.3},{:.3},{:.4},{:.3},{:.3},{},{},{},{},{},{}\n",
                r.peak_gbps,
                r.avg_coverage,
                r.outage_frac,
                r.aggregate_peak_gbps,
                r.mean_rate_gbps,
                r.seed,
                r.scenario,
                r.service,
                r.users,
                r.n_slots,
                r.beamwidth_deg
            )
            .into_bytes()
        }
    };
    emit(common, &body, stdout)
}

#[derive(Serialize)]
struct SweepJsonPoint {
    beamwidth_deg: f64,
    peak_gbps: f64,
    avg_coverage: f64,
    outage_frac: f64,
}

#[derive(Serialize)]
struct SweepReport {
    scenario: String,
    service: String,
    objective: Objective,
    seed: u64,
    delta_opt_deg: f64,
    points: Vec<SweepJsonPoint>,
}

fn sweep(common: &CommonArgs, args: &SweepArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let cfg = load_config(common)?;
    let lo = args.bw_lo.unwrap_or(cfg.sweep.bw_lo);
    let hi = args.bw_hi.unwrap_or(cfg.sweep.bw_hi);
    let step = args.bw_step.unwrap_or(cfg.sweep.bw_step);
    let objective = args.objective.map(Objective::from).unwrap_or(cfg.sweep.objective);
    let grid = beamwidth_grid(lo, hi, step)?;
    let absorption = load_absorption(common)?;
    let sim = Simulation::new(cfg.to_sim_config(absorption)?)?;
    let result = sim.sweep(&grid)?;
    let delta_opt = optimal_beamwidth(&result, objective)?;
    let scenario = cfg.placement.label();
    let service = cfg.service_label();
    let body = match common.format {
        Format::Csv => {
            let mut b = Vec::new();
            result.write_csv(&mut b, scenario, &service)?;
            b
        }
        Format::Json => to_json(&SweepReport {
            scenario: scenario.to_owned(),
            service: service.clone(),
            objective,
            seed: cfg.seed,
            delta_opt_deg: delta_opt,
            points: result
                .points
                .iter()
                .map(|p| SweepJsonPoint {
                    beamwidth_deg: p.beamwidth_deg,
                    peak_gbps: round_to(p.outcome.peak_throughput_bps / 1e9, 3),
                    avg_coverage: round_to(p.outcome.avg_user_coverage, 3),
                    outage_frac: round_to(p.outcome.outage_fraction, 4),
                })
                .collect(),
        }),
    };
    emit(common, &body, stdout)?;
    writeln!(stderr, "delta_opt_deg={delta_opt:.3} objective={}", objective_label(objective))?;
    Ok(())
}

fn objective_label(o: Objective) -> &'static str {
    match o {
        Objective::Coverage => "coverage",
        Objective::PeakThroughput => "peak_throughput",
    }
}
