//! Acceptance criteria. Runs as a plain binary so every criterion prints
//! exactly one PASS/FAIL line; the process fails if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use grf_swarm::experiments::*;
use grf_swarm::potential::{cb_derivative, cb_energy, cb_potential, total_energy};
use grf_swarm::sampler::metropolis_accept;
use grf_swarm::sensing::Neighbor;
use grf_swarm::world::step;
use grf_swarm::*;

const POTENTIAL_TOL: f64 = 1e-12;
const DERIVATIVE_REL_TOL: f64 = 1e-5;
const FD_STEP: f64 = 1e-6;
const TRANSLATION_TOL: f64 = 1e-9;
const TV_TOL: f64 = 0.05;
const MH_STEPS: usize = 100_000;
const COHESION_TICKS: u64 = 2_000;
const COHESION_CV: f64 = 0.2;
const SCALABILITY_SEEDS: u64 = 30;
const ROBUSTNESS_SEEDS: u64 = 10;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn v(x: f64, y: f64) -> Vec2 {
    Vec2::new(x, y)
}

fn progress(msg: &str) {
    eprintln!("  .. {msg}");
}

/// A perception with every kind of term populated, shifted by `offset`.
fn busy_perception(offset: Vec2, variant: usize) -> Perception {
    let mut p = Perception::empty(v(0.1, -0.2) + offset, v(1.0, 0.0));
    p.self_velocity = v(0.03, 0.02);
    p.neighbors = vec![
        Neighbor {
            relative_position: v(0.3, 0.1),
            velocity: v(0.05, 0.01),
        },
        Neighbor {
            relative_position: v(-0.2, 0.25),
            velocity: v(0.02, -0.04),
        },
    ];
    if variant != 1 {
        p.object_points = (0..6)
            .map(|k| v(0.45, -0.3 + 0.1 * k as f64) + p.self_pose)
            .collect();
        p.surface_gradients = p.object_points.windows(2).map(|w| w[1] - w[0]).collect();
    }
    if variant != 0 {
        p.obstacle_points = (0..4)
            .map(|k| v(-0.2 + 0.1 * k as f64, 0.35) + p.self_pose)
            .collect();
    }
    p
}

fn criterion_1() -> Verdict {
    let neutral = CBParams::new(1.0, 1.0, 12.0, 0.0);
    let at_min = cb_potential(1.0, &neutral).unwrap();
    let min_ok = (at_min + 1.0).abs() <= POTENTIAL_TOL;

    let mut worst = 0.0_f64;
    for p in [
        CBParams::new(1.0, 0.3, 12.0, -0.5),
        CBParams::new(2.0, 0.25, 12.0, -0.8),
    ] {
        let mut r = 0.2 * p.r0;
        while r <= 5.0 * p.r0 {
            let fd = (cb_energy(r + FD_STEP, &p) - cb_energy(r - FD_STEP, &p)) / (2.0 * FD_STEP);
            let an = cb_derivative(r, &p);
            worst = worst.max((fd - an).abs() / an.abs());
            r += 0.001;
        }
    }
    let deriv_ok = worst <= DERIVATIVE_REL_TOL;

    let params = EnergyParams::default();
    let mut rng = RngStream::new(1, 0, 0);
    let mut drift = 0.0_f64;
    for variant in 0..3 {
        for mode in [Mode::Push, Mode::Circulate] {
            for _ in 0..50 {
                let shift = v(6.0 * rng.uniform() - 3.0, 6.0 * rng.uniform() - 3.0);
                let cand = v(0.16 * rng.uniform() - 0.08, 0.16 * rng.uniform() - 0.08);
                let a = total_energy(
                    cand,
                    &busy_perception(v(0.0, 0.0), variant),
                    mode,
                    &params,
                    0.1,
                );
                let b = total_energy(cand, &busy_perception(shift, variant), mode, &params, 0.1);
                drift = drift.max((a - b).abs());
            }
        }
    }
    let shift_ok = drift <= TRANSLATION_TOL;

    verdict(
        min_ok && deriv_ok && shift_ok,
        format!(
            "phi(r0)+eps={:.1e}, worst derivative rel err {worst:.2e}, translation drift {drift:.1e}",
            at_min + 1.0
        ),
    )
}

/// Polar grid of candidate velocities inside the speed disc.
fn velocity_grid(v_max: f64) -> Vec<Vec2> {
    let mut grid = vec![v(0.0, 0.0)];
    for ring in 1..=3 {
        let speed = v_max * ring as f64 / 3.0;
        for k in 0..8 {
            grid.push(Vec2::from_angle(k as f64 * std::f64::consts::FRAC_PI_4) * speed);
        }
    }
    grid
}

fn criterion_2() -> Verdict {
    let params = EnergyParams::default();
    let temperature = SamplerParams::default().temperature;
    let grid = velocity_grid(params.v_max);
    let cases = [
        (0, Mode::Push, 11_u64),
        (1, Mode::Circulate, 22),
        (2, Mode::Circulate, 33),
    ];
    let mut worst = 0.0_f64;
    for (variant, mode, seed) in cases {
        let perception = busy_perception(v(0.0, 0.0), variant);
        let energies: Vec<f64> = grid
            .iter()
            .map(|&c| total_energy(c, &perception, mode, &params, 0.1) / temperature)
            .collect();

        // enumeration
        let low = energies.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = energies.iter().map(|e| (low - e).exp()).collect();
        let z: f64 = weights.iter().sum();

        // uniform independent proposals over the grid
        let mut rng = RngStream::new(seed, 0, 0);
        let mut counts = vec![0usize; grid.len()];
        let mut state = 0;
        for _ in 0..MH_STEPS {
            let cand = rng.below(grid.len());
            if metropolis_accept(energies[cand] - energies[state], rng.uniform()) {
                state = cand;
            }
            counts[state] += 1;
        }
        let tv: f64 = counts
            .iter()
            .zip(&weights)
            .map(|(&c, &w)| (c as f64 / MH_STEPS as f64 - w / z).abs())
            .sum::<f64>()
            / 2.0;
        worst = worst.max(tv);
    }
    verdict(
        worst <= TV_TOL,
        format!(
            "worst total variation {worst:.4} over 3 perceptions, {MH_STEPS} steps, {} states",
            grid.len()
        ),
    )
}

fn criterion_3() -> Verdict {
    let cfg = build_scenario(&ScenarioKind::Scalability(10)).unwrap();
    let (low, high) = (0.5 * cfg.energy.robot_robot.r0, cfg.sensor.lambda);
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for seed in 0..10 {
        let mut w = cfg.build_world(seed).unwrap();
        w.object = None;
        for _ in 0..COHESION_TICKS {
            w = step(&w, &cfg.energy, &cfg.sampler, &cfg.sensor, &cfg.physics).unwrap();
        }
        let n = w.robots.len();
        let mut total = 0.0;
        let mut pairs = 0;
        for i in 0..n {
            for j in i + 1..n {
                total += w.robots[i].position.distance(w.robots[j].position);
                pairs += 1;
            }
        }
        let d = total / pairs as f64;
        let headings: Vec<Vec2> = w
            .robots
            .iter()
            .filter_map(|r| r.velocity.normalized())
            .collect();
        let mean = headings.iter().fold(v(0.0, 0.0), |a, &h| a + h) / headings.len().max(1) as f64;
        let cv = 1.0 - mean.norm();
        if !(d >= low && d <= high && cv < COHESION_CV) {
            failures.push(seed);
        }
        summary.push(format!("{d:.2}/{cv:.2}"));
    }
    verdict(
        failures.is_empty(),
        format!(
            "distance/circular variance per seed [{}], bounds [{low}, {high}] and < {COHESION_CV}, failing seeds {failures:?}",
            summary.join(" ")
        ),
    )
}

fn batch(kind: ScenarioKind, seeds: u64) -> SummaryStats {
    let cfg = build_scenario(&kind).unwrap();
    let seeds: Vec<u64> = (0..seeds).collect();
    let t0 = Instant::now();
    let (_, stats) = run_batch(&cfg, &seeds).unwrap();
    progress(&format!(
        "{kind:?}: {}/{} ok, mean {:.1}s ({:.0}s wall)",
        stats.n,
        seeds.len(),
        stats.mean_time,
        t0.elapsed().as_secs_f64()
    ));
    stats
}

fn join(checks: &[TrendCheck]) -> Verdict {
    verdict(
        checks.iter().all(|c| c.pass),
        checks
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("; "),
    )
}

fn criterion_8() -> Verdict {
    let energy = EnergyParams::default();
    // a vanishing proposal width freezes every robot at its scripted velocity
    let sampler = SamplerParams {
        proposal_sigma: 1e-300,
        ..SamplerParams::default()
    };
    let sensor = SensorParams::default();
    let physics = PhysicsParams::default();
    let run = |robots: &[(f64, f64)]| {
        let robots: Vec<RobotState> = robots
            .iter()
            .enumerate()
            .map(|(id, &(x, speed))| {
                let mut r = RobotState::new(id, v(x, 0.0), ROBOT_RADIUS);
                r.velocity = v(speed, 0.0);
                r
            })
            .collect();
        let object = TransportObject::new(
            Polygon::rectangle(0.5, 0.4).unwrap(),
            v(0.0, 0.0),
            0.2,
            v(1.7, 0.0),
        );
        let w = WorldState::new(
            robots,
            Some(object),
            vec![],
            Polygon::rectangle(4.0, 4.0).unwrap(),
            0.1,
        )
        .unwrap();
        let next = step(&w, &energy, &sampler, &sensor, &physics).unwrap();
        next.object.unwrap().position
    };
    let fast = run(&[(-0.30, 0.12)]);
    let slow = run(&[(-0.30, 0.05)]);
    let opposed = run(&[(-0.30, 0.12), (0.30, -0.12)]);
    let pass = fast.x > 0.0 && slow == v(0.0, 0.0) && opposed == v(0.0, 0.0);
    verdict(
        pass,
        format!(
            "0.12 m/s moves object to x={:.4}, 0.05 m/s to x={:.4}, opposing pair to ({:.4},{:.4})",
            fast.x, slow.x, opposed.x, opposed.y
        ),
    )
}

fn criterion_9() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let mut traces = Vec::new();
    for threads in ["1", "8"] {
        let path = dir.path().join(format!("trace_{threads}.jsonl"));
        let out = Command::new(env!("CARGO_BIN_EXE_grf-swarm"))
            .args([
                "--threads",
                threads,
                "run",
                "--scenario",
                "scalability",
                "--robots",
                "10",
            ])
            .args(["--seed", "5", "--tick-limit", "1500", "--trace"])
            .arg(&path)
            .env_remove("GRF_SWARM_THREADS")
            .output()
            .unwrap();
        if !out.status.success() {
            return verdict(
                false,
                format!("run failed: {}", String::from_utf8_lossy(&out.stderr)),
            );
        }
        traces.push(std::fs::read(&path).unwrap());
    }
    let lines = traces[0].iter().filter(|&&b| b == b'\n').count();
    verdict(
        traces[0] == traces[1] && lines > 0,
        format!(
            "{lines} trace lines, {} vs {} bytes, identical: {}",
            traces[0].len(),
            traces[1].len(),
            traces[0] == traces[1]
        ),
    )
}

fn main() -> ExitCode {
    let mut results: Vec<(usize, &str, Verdict)> = Vec::new();
    let mut record = |k: usize, name: &'static str, f: &dyn Fn() -> Verdict| {
        let t0 = Instant::now();
        let v = f();
        let line = format!(
            "{} criterion {k} ({name}): {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t0.elapsed().as_secs_f64()
        );
        println!("{line}");
        results.push((k, name, v));
    };

    record(1, "potential unit checks", &criterion_1);
    record(2, "Gibbs oracle", &criterion_2);
    record(3, "emergent cohesion", &criterion_3);

    let scalability: Vec<(usize, SummaryStats)> = [2, 4, 10, 20]
        .into_iter()
        .map(|n| (n, batch(ScenarioKind::Scalability(n), SCALABILITY_SEEDS)))
        .collect();
    record(4, "transport success", &|| {
        let ten = &scalability[2].1;
        verdict(
            ten.success_rate == 1.0,
            format!(
                "10 robots reached the goal in {}/{SCALABILITY_SEEDS} trials",
                ten.n
            ),
        )
    });
    record(5, "scalability trend", &|| {
        let means: Vec<(usize, f64)> = scalability.iter().map(|(n, s)| (*n, s.mean_time)).collect();
        join(&scalability_trend(&means))
    });

    let ideal = batch(ScenarioKind::IdealAdaptability, SCALABILITY_SEEDS);
    let failure = batch(ScenarioKind::FailureAdaptability, SCALABILITY_SEEDS);
    let goal = batch(ScenarioKind::GoalChangeAdaptability, SCALABILITY_SEEDS);
    record(6, "adaptability trend", &|| {
        let mut v = join(&adaptability_trend(
            ideal.mean_time,
            failure.mean_time,
            goal.mean_time,
        ));
        v.detail += &format!(
            "; success ideal {:.2}, failure {:.2}, goal change {:.2}",
            ideal.success_rate, failure.success_rate, goal.success_rate
        );
        v
    });

    let mut cells = Vec::new();
    for shape in [ShapeKind::Rect, ShapeKind::Octagon, ShapeKind::Triangle] {
        for mass in [BASE_MASS, 2.0 * BASE_MASS] {
            let stats = batch(
                ScenarioKind::Robustness {
                    shape,
                    scale: 1.0,
                    mass,
                },
                ROBUSTNESS_SEEDS,
            );
            cells.push((shape, mass, stats));
        }
    }
    record(7, "robustness trend", &|| {
        let trend: Vec<RobustnessCell> = cells
            .iter()
            .map(|(shape, mass, s)| RobustnessCell {
                shape: *shape,
                mass: *mass,
                mean_time: s.mean_time,
            })
            .collect();
        let mut v = join(&robustness_trend(&trend));
        let rates: Vec<String> = cells
            .iter()
            .map(|(shape, mass, s)| {
                format!("{} {mass} kg {}/{ROBUSTNESS_SEEDS}", shape.name(), s.n)
            })
            .collect();
        v.detail += &format!("; successes {}", rates.join(", "));
        v
    });

    record(8, "physics contract", &criterion_8);
    record(9, "determinism across threads", &criterion_9);

    let failed: Vec<usize> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {}/{} criteria passed",
        results.len() - failed.len(),
        results.len()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
