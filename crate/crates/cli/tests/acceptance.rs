//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::collections::HashMap;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thz_core::channel::{fixtures, spreading_loss_db, total_path_loss_db, AbsorptionTable};
use thz_core::geometry::{PlacementScenario, Room};
use thz_core::link_budget::{
    capacity_bps, min_beamwidth_deg, noise_psd_dbw_per_hz, AntennaModel, LinkDemand, RadioParams, CIRCULAR_APERTURE,
    RECTANGULAR_APERTURE,
};
use thz_core::mobility::{default_profile, gait_phase, generate_trajectories, ServiceType};
use thz_core::simulator::{optimal_beamwidth, Objective, SimConfig, SweepResult};
use thz_core::spectrum::{
    build_lookup_table, detect_windows, rate_spectrum, FrequencyBand, SpectrumPoint, WindowParams,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn ac1() -> Outcome {
    let n0 = noise_psd_dbw_per_hz(10.0, 298.15);
    outcome((n0 - -193.85).abs() <= 0.01, format!("N0 = {n0:.4} dB/Hz, want -193.85 +/- 0.01"))
}

fn ac2() -> Outcome {
    let g1 = AntennaModel::new(CIRCULAR_APERTURE, 1.0).unwrap().gain_dbi();
    let g20 = AntennaModel::new(CIRCULAR_APERTURE, 20.0).unwrap().gain_dbi();
    let pass = (g1 - 47.2).abs() <= 0.1 && (g20 - 21.2).abs() <= 0.1;
    outcome(pass, format!("G(1 deg) = {g1:.3} dBi, G(20 deg) = {g20:.3} dBi, want 47.2 / 21.2 +/- 0.1"))
}

fn ac3() -> Outcome {
    let table = fixtures::realistic();
    let mut rng = StdRng::seed_from_u64(3);
    let (mut checked, mut rejected, mut worst) = (0, 0, 0.0f64);
    while checked < 1000 {
        let x = if rng.random::<bool>() { CIRCULAR_APERTURE } else { RECTANGULAR_APERTURE };
        let radio = RadioParams::new(
            rng.random_range(-10.0..20.0),
            rng.random_range(3.0..15.0),
            rng.random_range(270.0..320.0),
            AntennaModel::new(x, 10.0).unwrap(),
            AntennaModel::new(x, 10.0).unwrap(),
        )
        .unwrap();
        let bandwidth = rng.random_range(1e9..50e9);
        let rate = bandwidth * rng.random_range(0.1..20.0);
        let f = rng.random_range(100.0..1000.0);
        let d = rng.random_range(0.1..50.0);
        let rho = rng.random_range(0.0..20.0);
        let demand = LinkDemand::new(rate, bandwidth, f).unwrap();
        let loss = total_path_loss_db(table, f, d, rho).unwrap();
        let Ok(delta) = min_beamwidth_deg(&radio, &demand, loss) else {
            rejected += 1;
            continue;
        };
        let Ok(at_min) = radio.with_beamwidth(delta) else {
            rejected += 1;
            continue;
        };
        let err = (capacity_bps(&at_min, &demand, loss) - rate).abs() / rate;
        worst = worst.max(err);
        checked += 1;
    }
    outcome(
        worst < 1e-6,
        format!("{checked} configs ({rejected} outside (0, 180] deg redrawn), worst relative error {worst:.2e}"),
    )
}

/// `20 log10(4 pi f d / c)` evaluated as a sum of separately computed
/// logarithms in double-double arithmetic.
fn spreading_oracle(f_ghz: f64, d_m: f64) -> f64 {
    fn log10_dd(x: f64) -> (f64, f64) {
        // one Newton step on 10^y = x refines the f64 logarithm
        let y = x.log10();
        let back = 10f64.powf(y);
        let corr = (x - back) / (back * std::f64::consts::LN_10);
        (y, corr)
    }
    let terms = [
        log10_dd(4.0 * std::f64::consts::PI),
        log10_dd(f_ghz),
        (9.0, 0.0),
        log10_dd(d_m),
    ];
    let c = log10_dd(299_792_458.0);
    let hi: f64 = terms.iter().map(|t| t.0).sum::<f64>() - c.0;
    let lo: f64 = terms.iter().map(|t| t.1).sum::<f64>() - c.1;
    20.0 * (hi + lo)
}

fn ac4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let f = rng.random_range(100.0..1000.0);
        let d = 10f64.powf(rng.random_range(-2.0..2.0));
        let got = spreading_loss_db(f, d).unwrap();
        worst = worst.max((got - spreading_oracle(f, d)).abs());
    }
    outcome(worst < 1e-9, format!("10^4 pairs, worst deviation {worst:.2e} dB"))
}

fn brute_force_windows(spectrum: &[SpectrumPoint], clip: f64) -> Vec<(f64, f64)> {
    let mut rates: Vec<f64> = spectrum.iter().map(|p| p.rate_bps).collect();
    rates.sort_by(f64::total_cmp);
    let rank = 0.95 * (rates.len() - 1) as f64;
    let (i, j) = (rank.floor() as usize, rank.ceil() as usize);
    let p95 = if i == j { rates[i] } else { rates[i] + (rank - i as f64) * (rates[j] - rates[i]) };
    let threshold = clip * p95;
    let n = spectrum.len();
    let edge = |k: usize| 0.5 * (spectrum[k - 1].f_ghz + spectrum[k].f_ghz);
    let mut out = Vec::new();
    let mut start = None;
    for k in 0..=n {
        let usable = k < n && spectrum[k].rate_bps >= threshold;
        match (usable, start) {
            (true, None) => start = Some(k),
            (false, Some(s)) => {
                let lo = if s == 0 { spectrum[0].f_ghz } else { edge(s) };
                let hi = if k == n { spectrum[n - 1].f_ghz } else { edge(k) };
                out.push((0.5 * (lo + hi), hi - lo));
                start = None;
            }
            _ => {}
        }
    }
    out
}

fn ac5() -> Outcome {
    let radio = RadioParams::default();
    let band = FrequencyBand::new(300.0, 1000.0).unwrap();
    let mut fixtures_checked = 0;
    let mut mismatches = Vec::new();
    let spikes: Vec<(String, AbsorptionTable)> = [(550.0, 5e4), (420.0, 2e5), (900.0, 1e6), (650.0, 3e3)]
        .iter()
        .map(|&(c, p)| (format!("spike {c} GHz"), fixtures::spike(100.0, 1000.0, 1.0, c, p)))
        .chain(std::iter::once(("multi-line".to_owned(), fixtures::synthetic())))
        .collect();
    for (name, table) in &spikes {
        for d in [0.3, 2.0, 10.0, 30.0] {
            for clip in [0.3, 0.5, 0.8] {
                let s = rate_spectrum(table, &radio, d, 5.0, band, 0.5).unwrap();
                let got: Vec<(f64, f64)> = detect_windows(&s, clip, 50.0)
                    .unwrap()
                    .windows
                    .iter()
                    .map(|w| (w.center_ghz, w.bandwidth_ghz))
                    .collect();
                if got != brute_force_windows(&s, clip) {
                    mismatches.push(format!("{name} d={d} clip={clip}"));
                }
                fixtures_checked += 1;
            }
        }
    }
    let distances = [0.3, 1.0, 2.0, 10.0, 11.0];
    let lookup =
        build_lookup_table(fixtures::realistic(), &radio, 5.0, &distances, &WindowParams::default()).unwrap();
    let widest: Vec<f64> = lookup.rows.iter().map(|r| r.widest_ghz()).collect();
    let narrow: Vec<usize> = lookup.rows.iter().map(|r| r.narrow_count()).collect();
    let widest_ok = widest.windows(2).all(|w| w[1] <= w[0]);
    let narrow_ok = narrow.windows(2).all(|w| w[1] >= w[0]);
    outcome(
        mismatches.is_empty() && widest_ok && narrow_ok,
        format!(
            "spike scans {}/{} exact; realistic widest {:?} GHz ({}), sub-50 GHz counts {:?} ({})",
            fixtures_checked - mismatches.len(),
            fixtures_checked,
            widest,
            if widest_ok { "non-increasing" } else { "NOT non-increasing" },
            narrow,
            if narrow_ok { "non-decreasing" } else { "NOT non-decreasing" },
        ),
    )
}

fn ac6() -> Outcome {
    let table = fixtures::realistic();
    let radio = RadioParams::default();
    let (lo, hi) = table.freq_range();
    let s = rate_spectrum(table, &radio, 30.0, 5.0, FrequencyBand::new(lo, hi).unwrap(), 0.5).unwrap();
    let scan = detect_windows(&s, 0.5, 50.0).unwrap();
    let best = scan.windows.iter().max_by(|a, b| a.score().total_cmp(&b.score())).unwrap();
    let demand = LinkDemand::new(10e9, 10e9, best.center_ghz).unwrap();
    let loss = total_path_loss_db(table, best.center_ghz, 30.0, 5.0).unwrap();
    let delta = min_beamwidth_deg(&radio, &demand, loss).unwrap();
    outcome(
        (15.0..=25.0).contains(&delta),
        format!(
            "best window {:.1}-{:.1} GHz, f_c {:.2} GHz: delta_min = {delta:.2} deg, want [15, 25]",
            best.lo_ghz(),
            best.hi_ghz(),
            best.center_ghz
        ),
    )
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Within 10% of `target`; a zero target allows 10% of `scale`.
fn within_ten_percent(got: f64, target: f64, scale: f64) -> bool {
    (got - target).abs() <= 0.1 * if target == 0.0 { scale } else { target.abs() }
}

fn ac7() -> Outcome {
    const SLOTS: usize = 100_000;
    let room = Room::default();
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for service in ServiceType::ALL {
        let p = default_profile(service);
        let traj = generate_trajectories(&[(service, p)], &room, SLOTS, 7);
        let states = &traj.user(0)[1..];
        let steps: Vec<f64> = states.iter().map(|s| s.last_step_m).collect();
        let (step_mean, step_std) = mean_std(&steps);
        let offsets: Vec<(f64, f64)> = states
            .iter()
            .map(|s| {
                let phase = gait_phase(s.gait_slot(), p.rotation_period_slots);
                (s.position.z - p.base_height_m, phase.sin())
            })
            .collect();
        let amplitude = 2.0 * offsets.iter().map(|(o, s)| o * s).sum::<f64>() / offsets.len() as f64;
        let jitter: Vec<f64> = offsets.iter().map(|(o, s)| o - p.dz_mean * s).collect();
        let (_, jitter_std) = mean_std(&jitter);
        let checks = [
            ("step mean", within_ten_percent(step_mean, p.dxy_mean, p.dxy_std)),
            ("step std", within_ten_percent(step_std, p.dxy_std, p.dxy_std)),
            ("bob amplitude", within_ten_percent(amplitude, p.dz_mean, p.dz_std)),
            ("bob jitter", within_ten_percent(jitter_std, p.dz_std, p.dz_std)),
        ];
        let bound = 4.0 * p.rotation_noise_std_deg;
        let peaks = [
            ("yaw", p.yaw_peak_deg, states.iter().map(|s| s.yaw_deg.abs()).fold(0.0, f64::max)),
            ("pitch", p.pitch_peak_deg, states.iter().map(|s| s.pitch_deg.abs()).fold(0.0, f64::max)),
            ("roll", p.roll_peak_deg, states.iter().map(|s| s.roll_deg.abs()).fold(0.0, f64::max)),
        ];
        for (name, ok) in checks {
            if !ok {
                failures.push(format!("{service} {name}"));
            }
        }
        for (name, peak, max) in peaks {
            if (max - peak).abs() > bound {
                failures.push(format!("{service} {name} peak {max:.2} vs {peak}"));
            }
        }
        summary.push(format!(
            "{service}: step {step_mean:.3}+/-{step_std:.3}, dz {amplitude:.4}+/-{jitter_std:.4}, peaks {:.1}/{:.1}/{:.1}",
            peaks[0].2, peaks[1].2, peaks[2].2
        ));
    }
    let detail = if failures.is_empty() {
        summary.join("; ")
    } else {
        format!("off: {}; {}", failures.join(", "), summary.join("; "))
    };
    outcome(failures.is_empty(), detail)
}

type SweepKey = (&'static str, ServiceType);

fn sweeps() -> HashMap<SweepKey, SweepResult> {
    let grid: Vec<f64> = (1..=60).map(f64::from).collect();
    let mut out = HashMap::new();
    for (label, placement) in [
        ("A", PlacementScenario::CeilingCenter),
        ("B", PlacementScenario::WallCenter),
        ("C", PlacementScenario::TableCenter),
    ] {
        for service in ServiceType::ALL {
            let cfg = SimConfig::new(placement, service, 10);
            out.insert((label, service), thz_core::simulator::sweep_beamwidth(cfg, &grid).unwrap());
        }
    }
    out
}

fn ac8(sweeps: &HashMap<SweepKey, SweepResult>) -> Outcome {
    let mut bad = Vec::new();
    for (&(label, service), sweep) in sweeps {
        let outage: Vec<f64> = sweep.points.iter().map(|p| p.outcome.outage_fraction).collect();
        if !outage.windows(2).all(|w| w[1] <= w[0]) {
            bad.push(format!("{label}/{service}"));
        }
    }
    bad.sort();
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} sweeps over 1-60 deg, outage non-increasing in all", sweeps.len())
        } else {
            format!("increasing outage in {}", bad.join(", "))
        },
    )
}

fn ac9(sweeps: &HashMap<SweepKey, SweepResult>) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for label in ["B", "C"] {
        let s1 = &sweeps[&(label, ServiceType::S1HighMobility)];
        let cov = s1.metric(Objective::Coverage);
        let best = cov.iter().cloned().fold(f64::MIN, f64::max);
        let s1_opt = optimal_beamwidth(s1, Objective::Coverage).unwrap();
        let interior = best > cov[0] && best > cov[cov.len() - 1] && s1_opt > 1.0 && s1_opt < 60.0;
        pass &= interior;
        let mut others = Vec::new();
        for service in [ServiceType::S2FastWalk, ServiceType::S2SlowWalk, ServiceType::S3LowMobility] {
            let opt = optimal_beamwidth(&sweeps[&(label, service)], Objective::Coverage).unwrap();
            pass &= opt <= s1_opt;
            others.push(format!("{service} {opt}"));
        }
        parts.push(format!(
            "{label}: S1 opt {s1_opt} deg ({}), {}",
            if interior { "interior" } else { "NOT interior" },
            others.join(", ")
        ));
    }
    outcome(pass, parts.join("; "))
}

fn ac10(sweeps: &HashMap<SweepKey, SweepResult>) -> Outcome {
    let a = &sweeps[&("A", ServiceType::S3LowMobility)];
    let c = &sweeps[&("C", ServiceType::S3LowMobility)];
    let mut worst_ratio = f64::INFINITY;
    let mut failing = Vec::new();
    for (pa, pc) in a.points.iter().zip(&c.points) {
        let bw = pa.beamwidth_deg;
        if !(5.0..=30.0).contains(&bw) {
            continue;
        }
        let (ra, rc) = (pa.outcome.peak_throughput_bps, pc.outcome.peak_throughput_bps);
        worst_ratio = worst_ratio.min(rc / ra);
        if rc <= ra {
            failing.push(bw);
        }
    }
    outcome(
        failing.is_empty(),
        format!("C/A peak ratio over 5-30 deg >= {worst_ratio:.2}; failing beamwidths {failing:?}"),
    )
}

fn run_cli(args: &[&str], out_dir: &Path) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_thzsim"))
        .args(args)
        .env("THZSIM_OUT_DIR", out_dir)
        .output()
        .expect("thzsim runs");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut bytes = out.stdout;
    bytes.extend(out.stderr);
    let mut names: Vec<_> = std::fs::read_dir(out_dir).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    for path in names {
        bytes.extend(std::fs::read(path).unwrap());
    }
    bytes
}

fn ac11() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"placement": "B", "users": [{"service": "S1", "count": 6}, {"service": "S2-fast", "count": 4}], "n_slots": 1500}"#,
    )
    .unwrap();
    let cfg = cfg.to_str().unwrap();
    let max_threads = std::thread::available_parallelism().map_or(8, |n| n.get()).max(8).to_string();
    let mut identical = true;
    let mut runs = 0;
    for cmd in [
        vec!["simulate", "--config", cfg, "--seed", "99", "--format", "json", "--trace", "trace.csv"],
        vec!["sweep", "--config", cfg, "--seed", "99", "--out", "sweep.csv"],
    ] {
        let mut reference: Option<Vec<u8>> = None;
        for threads in ["1", max_threads.as_str(), max_threads.as_str(), "1"] {
            let out_dir = tempfile::tempdir().unwrap();
            let args: Vec<&str> = cmd.iter().copied().chain(["--threads", threads]).collect();
            let bytes = run_cli(&args, out_dir.path());
            runs += 1;
            match &reference {
                None => reference = Some(bytes),
                Some(r) => identical &= *r == bytes,
            }
        }
    }
    outcome(
        identical,
        format!("{runs} runs of simulate and sweep at 1 and {max_threads} threads, outputs byte-identical: {identical}"),
    )
}

fn main() {
    let started = Instant::now();
    let mut results: Vec<(u32, &str, Outcome, f64)> = Vec::new();
    let mut timed = |n: u32, name: &'static str, f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let o = f();
        results.push((n, name, o, t.elapsed().as_secs_f64()));
    };
    timed(1, "noise anchor", &ac1);
    timed(2, "gain anchors", &ac2);
    timed(3, "rate/beamwidth inversion", &ac3);
    timed(4, "spreading-loss oracle", &ac4);
    timed(5, "window detection", &ac5);
    timed(6, "delta_min ballpark", &ac6);
    timed(7, "mobility statistics", &ac7);
    let t = Instant::now();
    let sweeps = sweeps();
    let sweep_secs = t.elapsed().as_secs_f64();
    timed(8, "outage monotonicity", &|| ac8(&sweeps));
    timed(9, "beamwidth dilemma", &|| ac9(&sweeps));
    timed(10, "placement ordering", &|| ac10(&sweeps));
    timed(11, "determinism", &ac11);

    let mut failed = 0;
    for (n, name, o, secs) in &results {
        let secs = if (8..=10).contains(n) { secs + sweep_secs } else { *secs };
        println!(
            "[{}] AC{n} {name} ({secs:.2} s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.1} s; criteria 8-10 share {sweep_secs:.1} s of sweeps)",
        results.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
