//! Acceptance suite: one PASS/FAIL line per criterion with its runtime.
//!
//! Run with `cargo test -p strata-cli --test acceptance`. The process exits
//! non-zero when any criterion fails or exceeds its time budget.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::fs;
use std::panic;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use strata_core::evolution::{
    crowding_distance, dominates, fast_nondominated_sort, nsga2_select_indices, run_nsga2, EvolutionConfig,
    FitnessWeights, HallOfFame, Individual, SearchSpace,
};
use strata_core::game::{expand_grid, vote_argmax, vote_condorcet, TournamentResult};
use strata_core::kernel::run_tick;
use strata_core::policy::{flatten, param_count, unflatten, MlpSpec, OutputActivation, PolicyFile};
use strata_core::rng_substream;
use strata_core::schemas::{Gene, Genotype, Schema};
use strata_models::eco::{self, EcoConfig, EcoStrategy};
use strata_models::enterprise::{
    self, default_policy_spec, BargainRule, EnterpriseConfig, Regime, Regulation, Sector, WelfareWeights,
    WEIGHT_BOUND,
};

type Check = fn() -> Result<String, String>;

struct Criterion {
    id: u8,
    title: &'static str,
    budget: Option<Duration>,
    check: Check,
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn config_path(name: &str) -> String {
    workspace().join("configs").join(name).display().to_string()
}

/// Run the CLI binary; returns stdout on exit 0.
fn strata(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(args)
        .arg("--quiet")
        .env_remove("HEAS_OUT")
        .output()
        .map_err(|e| format!("cannot start strata: {e}"))?;
    if out.status.success() {
        Ok(String::from_utf8_lossy(&out.stdout).into_owned())
    } else {
        Err(format!(
            "strata {} exited with {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ))
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn tempdir() -> tempfile::TempDir {
    tempfile::tempdir().expect("temporary directory")
}

fn distinct_ticks(csv: &str) -> usize {
    let mut ticks: Vec<&str> = csv.lines().skip(1).filter_map(|l| l.split(',').next()).collect();
    ticks.dedup();
    ticks.len()
}

// 1 -------------------------------------------------------------------------

fn determinism() -> Result<String, String> {
    let dir = tempdir();
    let mut detail = Vec::new();
    for (config, steps) in [("eco.json", 140), ("enterprise.json", 100)] {
        let cfg = config_path(config);
        let mut traces = Vec::new();
        for rep in 0..2 {
            let out = dir.path().join(format!("{config}-{rep}"));
            let started = Instant::now();
            strata(&["run", &cfg, "--seed", "7", "--steps", &steps.to_string(), "--out", &out.display().to_string()])?;
            let took = started.elapsed();
            ensure!(took < Duration::from_secs(5), "{config} run took {took:?}");
            traces.push(fs::read(out.join("trace.csv")).map_err(|e| e.to_string())?);
        }
        ensure!(traces[0] == traces[1], "{config}: traces differ between identical runs");
        let ticks = distinct_ticks(&String::from_utf8_lossy(&traces[0]));
        ensure!(ticks == steps, "{config}: {ticks} ticks, expected {steps}");
        detail.push(format!("{config} {} bytes x2 identical", traces[0].len()));
    }
    Ok(detail.join("; "))
}

// 2, 3 ----------------------------------------------------------------------

fn random_population(rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = rng.random_range(1..=64);
    let n_obj = rng.random_range(2..=3);
    let coarse = rng.random_bool(0.5);
    let fits = (0..n)
        .map(|_| {
            (0..n_obj)
                .map(|_| if coarse { rng.random_range(0..5) as f64 } else { rng.random::<f64>() * 10.0 - 5.0 })
                .collect()
        })
        .collect();
    let w = (0..n_obj).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    (fits, w)
}

fn individuals(fits: &[Vec<f64>]) -> Vec<Individual> {
    fits.iter().map(|f| Individual::evaluated(Genotype(vec![0.5]), f.clone())).collect()
}

fn nsga_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    let mut compared = 0;
    for case in 0..200 {
        let (fits, w) = random_population(&mut rng);
        let weights = FitnessWeights::new(w.clone()).map_err(|e| e.to_string())?;
        let fronts = fast_nondominated_sort(&mut individuals(&fits), &weights).map_err(|e| e.to_string())?;
        ensure!(fronts == common::brute_fronts(&fits, &w), "case {case}: fronts differ");
        let mu = rng.random_range(1..=fits.len());
        let chosen = nsga2_select_indices(&mut individuals(&fits), mu, &weights).map_err(|e| e.to_string())?;
        ensure!(chosen == common::brute_select(&fits, &w, mu), "case {case}: selection differs");
        for a in &fits {
            let b = &fits[rng.random_range(0..fits.len())];
            ensure!(
                dominates(a, b, &weights).map_err(|e| e.to_string())? == common::dom(a, b, &w),
                "case {case}: dominance differs"
            );
        }
        compared += fits.len();
    }
    Ok(format!("200 populations, {compared} individuals, sort + select identical"))
}

fn crowding() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let mut worst: f64 = 0.0;
    for case in 0..300 {
        let m = rng.random_range(1..=40);
        let n_obj = rng.random_range(2..=3);
        let fits: Vec<Vec<f64>> = (0..m).map(|_| (0..n_obj).map(|_| rng.random::<f64>() * 4.0).collect()).collect();
        let front: Vec<usize> = (0..m).collect();
        let got = crowding_distance(&individuals(&fits), &front, &FitnessWeights::minimize(n_obj))
            .map_err(|e| e.to_string())?;
        let want = common::brute_crowding(&fits, &front);
        for (g, w) in got.iter().zip(&want) {
            if w.is_infinite() {
                ensure!(*g == f64::INFINITY, "case {case}: expected +inf, got {g}");
            } else {
                worst = worst.max((g - w).abs());
                ensure!((g - w).abs() <= 1e-12, "case {case}: {g} vs {w}");
            }
        }
        // the extremes of every objective are boundary points
        for o in 0..n_obj {
            let lo = (0..m).min_by(|a, b| fits[*a][o].total_cmp(&fits[*b][o])).unwrap();
            let hi = (0..m).max_by(|a, b| fits[*a][o].total_cmp(&fits[*b][o])).unwrap();
            ensure!(got[lo] == f64::INFINITY && got[hi] == f64::INFINITY, "case {case}: finite boundary");
        }
        if m <= 2 {
            ensure!(got.iter().all(|d| *d == f64::INFINITY), "case {case}: size {m} front not all infinite");
        }
    }
    Ok(format!("300 fronts, max abs error {worst:.1e}"))
}

// 4 -------------------------------------------------------------------------

fn convergence() -> Result<String, String> {
    let schema = Schema::new(vec![Gene::float("theta1", -4.0, 4.0), Gene::float("theta2", -4.0, 4.0)])
        .map_err(|e| e.to_string())?;
    let space = SearchSpace::Schema(schema.clone());
    let w = FitnessWeights::minimize(2);
    let theta = |g: &Genotype| -> Result<f64, String> {
        schema.decode(g).map_err(|e| e.to_string())?["theta1"].as_f64().ok_or("theta1 is not numeric".to_string())
    };
    let objective = |g: &Genotype, _seed: u64| {
        let t = theta(g)?;
        Ok(vec![t * t, (t - 1.0) * (t - 1.0)])
    };
    let reference = (2.0, 2.0);
    let oracle = common::analytic_front_hv(10_000, reference);
    let mut gaps = Vec::new();
    for seed in 0..5 {
        let out = run_nsga2(&EvolutionConfig::new(24, 20, seed), &space, &objective, &w).map_err(|e| e.to_string())?;
        let entries = out.hall_of_fame.entries();
        ensure!(!entries.is_empty(), "seed {seed}: empty archive");
        for e in entries {
            let t = theta(&e.genotype)?;
            ensure!((-0.02..=1.02).contains(&t), "seed {seed}: theta1 = {t}");
        }
        for a in entries {
            for b in entries {
                ensure!(!dominates(&a.fitness, &b.fitness, &w).unwrap(), "seed {seed}: archive not mutually non-dominated");
            }
        }
        let pts: Vec<(f64, f64)> = entries.iter().map(|e| (e.fitness[0], e.fitness[1])).collect();
        let gap = (oracle - common::hypervolume_2d(&pts, reference)).abs() / oracle;
        ensure!(gap <= 0.05, "seed {seed}: hypervolume gap {:.2}%", gap * 100.0);
        gaps.push(gap);
    }
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    Ok(format!("5 seeds, oracle HV {oracle:.4}, worst gap {:.2}%", worst * 100.0))
}

// 5 -------------------------------------------------------------------------

fn flatten_round_trip() -> Result<String, String> {
    let spec = MlpSpec::new(vec![6, 8, 2], OutputActivation::Sigmoid).map_err(|e| e.to_string())?;
    ensure!(param_count(&spec) == 74, "param_count([6,8,2]) = {}", param_count(&spec));
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    for case in 0..1000 {
        let depth = rng.random_range(2..=5);
        let sizes: Vec<usize> = (0..depth).map(|_| rng.random_range(1..=12)).collect();
        let spec = MlpSpec::new(sizes, OutputActivation::Sigmoid).map_err(|e| e.to_string())?;
        let flat: Vec<f64> = (0..spec.param_count())
            .map(|_| match rng.random_range(0..10) {
                0 => 0.0,
                1 => -0.0,
                2 => f64::MIN_POSITIVE / 3.0,
                _ => (rng.random::<f64>() - 0.5) * 10f64.powi(rng.random_range(-30..30)),
            })
            .collect();
        let back = flatten(&unflatten(&spec, &flat).map_err(|e| e.to_string())?);
        ensure!(
            back.len() == flat.len() && back.iter().zip(&flat).all(|(a, b)| a.to_bits() == b.to_bits()),
            "case {case}: round trip not bit-exact"
        );
    }
    Ok("1000 pairs bit-exact, param_count([6,8,2]) = 74".into())
}

// 6 -------------------------------------------------------------------------

fn grid_structure() -> Result<String, String> {
    let eco_n = expand_grid(&eco::default_grid()).map_err(|e| e.to_string())?.len();
    let ent_n = expand_grid(&enterprise::default_grid()).map_err(|e| e.to_string())?.len();
    ensure!(eco_n == 4, "eco grid has {eco_n} scenarios");
    ensure!(ent_n == 32, "enterprise grid has {ent_n} scenarios");

    let dir = tempdir();
    let out = dir.path().display().to_string();
    strata(&["tournament", &config_path("eco.json"), "--episodes", "4", "--steps", "140", "--out", &out])?;
    let csv = read(&dir.path().join("scores.csv"))?;
    let rows = csv.lines().skip(1).count();
    ensure!(rows == 4 * 2 * 4, "eco tournament wrote {rows} score rows");
    let result = TournamentResult::from_json(&read(&dir.path().join("tournament.json"))?).map_err(|e| e.to_string())?;
    ensure!(result.steps == 140 && result.episodes == 4, "tournament settings not recorded");

    let ent = dir.path().join("enterprise");
    strata(&["tournament", &config_path("enterprise.json"), "--episodes", "1", "--out", &ent.display().to_string()])?;
    let result = TournamentResult::from_json(&read(&ent.join("tournament.json"))?).map_err(|e| e.to_string())?;
    ensure!(result.scenarios.len() == 32, "enterprise tournament played {} scenarios", result.scenarios.len());
    Ok(format!("eco {eco_n} scenarios, enterprise {ent_n}; eco tournament {rows} rows"))
}

// 7 -------------------------------------------------------------------------

fn random_eco(rng: &mut ChaCha8Rng, move_cost: f64) -> EcoConfig {
    EcoConfig {
        amp: rng.random_range(0.0..1.0),
        period: rng.random_range(2.0..40.0),
        shock_prob: rng.random_range(0.0..0.3),
        n_patches: rng.random_range(1..=16),
        fragmentation: rng.random(),
        move_cost,
        r: rng.random_range(0.0..0.8),
        k: rng.random_range(10.0..200.0),
        mort: rng.random_range(0.0..1.0),
        x0_frac: rng.random_range(0.05..1.0),
        y0_frac: rng.random_range(0.0..0.05),
        ..EcoConfig::default()
    }
}

fn eco_conservation() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    let (x_pre, x) = (eco::keys::x_pre(), eco::keys::x());
    let mut worst_rel: f64 = 0.0;
    let mut ticks = 0;
    for case in 0..1000 {
        let free = case % 2 == 0;
        let cost = if free { 0.0 } else { rng.random_range(0.0..1.0) };
        let cfg = random_eco(&mut rng, cost);
        let dispersal: f64 = rng.random();
        let seed = rng.random();
        let inst = eco::build_model(&cfg, &EcoStrategy::traits(rng.random(), dispersal), seed).map_err(|e| e.to_string())?;
        let episode = rng_substream(seed, "episode");
        let mut ctx = inst.init.clone();
        for t in 0..20 {
            ctx = run_tick(&inst.model, ctx, &episode).map_err(|e| e.to_string())?.0;
            let before: f64 = ctx.vector(&x_pre).ok_or("missing PREY.x_pre")?.iter().sum();
            let after: f64 = ctx.vector(&x).ok_or("missing PREY.x")?.iter().sum();
            let slack = 1e-9 * before.abs().max(f64::MIN_POSITIVE);
            if free {
                worst_rel = worst_rel.max((before - after).abs() / before.max(f64::MIN_POSITIVE));
                ensure!((before - after).abs() <= slack, "case {case} tick {t}: {before} -> {after}");
            } else {
                let loss = before - after;
                ensure!(
                    loss <= cost * dispersal * before + slack && loss >= -slack,
                    "case {case} tick {t}: loss {loss} above {cost} * {dispersal} * {before}"
                );
            }
            ticks += 1;
        }
    }
    Ok(format!("1000 configs, {ticks} ticks, worst free-movement drift {worst_rel:.1e}"))
}

// 8 -------------------------------------------------------------------------

fn voting() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(8008);
    let mut with_winner = 0;
    for case in 0..500 {
        let n_p = rng.random_range(2..=5);
        let n_s = rng.random_range(1..=7);
        let table: BTreeMap<String, BTreeMap<String, f64>> = (0..n_s)
            .map(|s| {
                let row = (0..n_p).map(|p| (format!("p{p}"), rng.random_range(0..4) as f64)).collect();
                (format!("s{s}"), row)
            })
            .collect();
        let out = vote_condorcet(&table).ok_or(format!("case {case}: no outcome"))?;
        match common::brute_condorcet(&table) {
            Some(w) => {
                with_winner += 1;
                ensure!(out.winner == w && !out.fallback, "case {case}: {} vs brute force {w}", out.winner);
            }
            None => ensure!(out.fallback, "case {case}: winner claimed where none exists"),
        }
    }
    let transforms: [fn(f64) -> f64; 4] = [|x| 2.5 * x + 1.0, f64::exp, |x| x.powi(3), f64::atan];
    for case in 0..500 {
        let n = rng.random_range(1..=6);
        let names: Vec<String> = (0..n).map(|i| format!("p{i}")).collect();
        let scores: Vec<f64> = (0..n).map(|_| rng.random_range(-4..4) as f64 * 0.5).collect();
        let base = vote_argmax(names.iter().map(String::as_str).zip(scores.iter().copied()));
        for t in transforms {
            let moved = vote_argmax(names.iter().map(String::as_str).zip(scores.iter().map(|&s| t(s))));
            ensure!(moved == base, "case {case}: argmax changed under a monotone transform");
        }
    }
    Ok(format!("500 tables ({with_winner} with a Condorcet winner), 500 argmax cases"))
}

// 9 -------------------------------------------------------------------------

fn random_policy(rng: &mut ChaCha8Rng) -> PolicyFile {
    let spec = default_policy_spec();
    let params = (0..spec.param_count()).map(|_| rng.random_range(-WEIGHT_BOUND..WEIGHT_BOUND)).collect();
    PolicyFile::new(&spec, params).expect("74 parameters")
}

/// First-layer weights on the tax and subsidy inputs zeroed, so actions do
/// not react to the policy levers under test.
fn blind_policy(rng: &mut ChaCha8Rng) -> PolicyFile {
    let mut p = random_policy(rng);
    for h in 0..8 {
        p.params[h * 6 + 2] = 0.0;
        p.params[h * 6 + 4] = 0.0;
    }
    p
}

fn random_enterprise(rng: &mut ChaCha8Rng) -> EnterpriseConfig {
    let pick = |rng: &mut ChaCha8Rng| rng.random_bool(0.5);
    EnterpriseConfig {
        regime: if pick(rng) { Regime::Cooperative } else { Regime::Directive },
        tax: rng.random(),
        audit_intensity: rng.random(),
        regulation: if pick(rng) { Regulation::Lenient } else { Regulation::Strict },
        std_compat: rng.random(),
        base_demand: rng.random_range(1.0..300.0),
        shock_amp: rng.random_range(0.0..50.0),
        atr: rng.random(),
        subsidy: rng.random_range(0.0..10.0),
        bargain_rule: if pick(rng) { BargainRule::EqualSplit } else { BargainRule::Proportional },
        side_payment: rng.random_range(0.0..5.0),
        welfare_weights: WelfareWeights {
            w_profit: rng.random(),
            w_consumer: rng.random(),
        },
        risk_penalty: rng.random(),
        sector: if pick(rng) { Sector::Energy } else { Sector::Tech },
        ..EnterpriseConfig::default()
    }
}

fn enterprise_invariants() -> Result<String, String> {
    use enterprise::keys;
    let mut rng = ChaCha8Rng::seed_from_u64(9009);
    let run = |cfg: &EnterpriseConfig, a: &PolicyFile, b: &PolicyFile, seed: u64| {
        enterprise::run(cfg, a, b, seed, 100).map_err(|e| e.to_string())
    };
    for case in 0..100 {
        let cfg = random_enterprise(&mut rng);
        let (pa, pb) = (random_policy(&mut rng), random_policy(&mut rng));
        let seed = rng.random();
        let (ab, ba) = (run(&cfg, &pa, &pb, seed)?, run(&cfg, &pb, &pa, seed)?);
        ensure!(
            ab.series(&keys::profit_a()) == ba.series(&keys::profit_b())
                && ab.series(&keys::profit_b()) == ba.series(&keys::profit_a()),
            "case {case}: swapping firms did not swap profits exactly"
        );
    }
    for case in 0..100 {
        let cfg = random_enterprise(&mut rng);
        let (pa, pb) = (blind_policy(&mut rng), blind_policy(&mut rng));
        let seed = rng.random();
        let base = run(&cfg, &pa, &pb, seed)?;
        let subsidised = EnterpriseConfig {
            subsidy: cfg.subsidy + rng.random_range(0.1..10.0),
            ..cfg.clone()
        };
        let taxed = EnterpriseConfig {
            tax: cfg.tax + (1.0 - cfg.tax) * rng.random::<f64>(),
            ..cfg.clone()
        };
        let (s, t) = (run(&subsidised, &pa, &pb, seed)?, run(&taxed, &pa, &pb, seed)?);
        for key in [keys::profit_a(), keys::profit_b()] {
            let (b, s, t) = (base.series(&key).unwrap(), s.series(&key).unwrap(), t.series(&key).unwrap());
            ensure!(b.iter().zip(&s).all(|(b, s)| s >= b), "case {case}: subsidy lowered {key}");
            ensure!(b.iter().zip(&t).all(|(b, t)| t <= b), "case {case}: tax raised {key}");
        }
    }
    for case in 0..100 {
        let cfg = EnterpriseConfig {
            risk_penalty: 0.0,
            welfare_weights: WelfareWeights {
                w_profit: 1.0,
                w_consumer: 0.0,
            },
            ..random_enterprise(&mut rng)
        };
        let trace = run(&cfg, &random_policy(&mut rng), &random_policy(&mut rng), rng.random())?;
        let (a, b, w) = (
            trace.series(&keys::profit_a()).unwrap(),
            trace.series(&keys::profit_b()).unwrap(),
            trace.series(&keys::welfare()).unwrap(),
        );
        ensure!(
            w.iter().zip(a.iter().zip(&b)).all(|(w, (a, b))| *w == a + b),
            "case {case}: welfare differs from total profit"
        );
    }
    Ok("swap symmetry x100, monotonicity x100 paired, welfare identity x100".into())
}

// 10 ------------------------------------------------------------------------

fn workflow() -> Result<String, String> {
    let dir = tempdir();
    let d = dir.path();
    let out = d.display().to_string();
    let eco_cfg = config_path("eco.json");

    strata(&["run", &eco_cfg, "--seed", "7", "--steps", "140", "--out", &out])?;
    strata(&["tune", &eco_cfg, "--algo", "nsga2", "--pop", "20", "--ngen", "5", "--seed", "7", "--out", &out])?;

    let mut doc: Value = serde_json::from_str(&read(Path::new(&eco_cfg))?).map_err(|e| e.to_string())?;
    doc["tournament"]["participants"] = json!([
        {"name": "baseline", "reference": true},
        {"name": "champion", "hof": d.join("hof.json")}
    ]);
    let workflow_cfg = d.join("workflow.json");
    fs::write(&workflow_cfg, serde_json::to_string_pretty(&doc).unwrap()).map_err(|e| e.to_string())?;
    strata(&["tournament", &workflow_cfg.display().to_string(), "--seed", "7", "--out", &out])?;

    for (artifact, kind) in [
        ("trace.csv", "trace"),
        ("hof.json", "pareto"),
        ("logbook.jsonl", "logbook"),
        ("tournament.json", "tournament"),
    ] {
        strata(&["viz", &d.join(artifact).display().to_string(), "--kind", kind, "--out", &out])?;
    }

    let trace = read(&d.join("trace.csv"))?;
    ensure!(distinct_ticks(&trace) == 140, "trace has {} ticks", distinct_ticks(&trace));
    let logbook_rows = read(&d.join("logbook.jsonl"))?.lines().filter(|l| !l.trim().is_empty()).count();
    ensure!(logbook_rows == 6, "logbook has {logbook_rows} rows");
    let hof = HallOfFame::entries_from_json(&read(&d.join("hof.json"))?).map_err(|e| e.to_string())?;
    ensure!(!hof.is_empty() && hof.iter().all(|e| e.genotype.len() == 2), "HoF genotypes do not match the schema");
    let result = TournamentResult::from_json(&read(&d.join("tournament.json"))?).map_err(|e| e.to_string())?;
    ensure!(result.scores.len() == 32, "tournament has {} score rows", result.scores.len());

    let count = |file: &str, needle: &str| -> Result<usize, String> { Ok(read(&d.join(file))?.matches(needle).count()) };
    ensure!(count("trace.svg", "class=\"series\"")? >= 1, "trace plot has no series");
    let first_series = read(&d.join("trace.svg"))?;
    let points = first_series
        .split("points=\"")
        .nth(1)
        .and_then(|s| s.split('"').next())
        .map_or(0, |p| p.split(' ').count());
    ensure!(points == 140, "trace polyline has {points} points");
    ensure!(count("pareto.svg", "class=\"marker\"")? == hof.len(), "pareto markers do not match the HoF");
    ensure!(count("logbook.svg", "class=\"band\"")? == 2, "logbook plot needs one band per objective");
    ensure!(count("tournament.svg", "class=\"cell\"")? == 8, "heat grid is not 4 x 2");
    for manifest in ["run", "tune", "tournament", "viz-trace", "viz-pareto", "viz-logbook", "viz-tournament"] {
        ensure!(d.join(format!("{manifest}.manifest.json")).exists(), "missing {manifest} manifest");
    }

    // same seed and config reproduce the data artifacts
    let again = d.join("again");
    strata(&["tune", &eco_cfg, "--pop", "20", "--ngen", "5", "--seed", "7", "--out", &again.display().to_string()])?;
    for artifact in ["logbook.jsonl", "hof.json"] {
        ensure!(read(&d.join(artifact))? == read(&again.join(artifact))?, "{artifact} not reproduced");
    }
    Ok(format!(
        "trace 140 ticks, logbook {logbook_rows} rows, HoF {} entries, 32 scores, winner {}, 4 SVGs",
        hof.len(),
        result.overall_winner
    ))
}

fn main() {
    // libtest-style filter arguments are accepted and ignored
    let criteria = [
        Criterion {
            id: 1,
            title: "determinism golden test (eco 140 steps, enterprise 100 steps)",
            budget: Some(Duration::from_secs(10)),
            check: determinism,
        },
        Criterion {
            id: 2,
            title: "NSGA-II sort and selection match brute force",
            budget: Some(Duration::from_secs(10)),
            check: nsga_oracle,
        },
        Criterion {
            id: 3,
            title: "crowding distance matches the formula to 1e-12",
            budget: None,
            check: crowding,
        },
        Criterion {
            id: 4,
            title: "bi-objective convergence to the analytic front",
            budget: Some(Duration::from_secs(30)),
            check: convergence,
        },
        Criterion {
            id: 5,
            title: "flatten/unflatten round trip",
            budget: None,
            check: flatten_round_trip,
        },
        Criterion {
            id: 6,
            title: "grid structure and tournament row count",
            budget: None,
            check: grid_structure,
        },
        Criterion {
            id: 7,
            title: "eco movement conservation and loss bound",
            budget: None,
            check: eco_conservation,
        },
        Criterion {
            id: 8,
            title: "Condorcet and argmax voting oracles",
            budget: None,
            check: voting,
        },
        Criterion {
            id: 9,
            title: "enterprise symmetry, monotonicity and welfare identity",
            budget: None,
            check: enterprise_invariants,
        },
        Criterion {
            id: 10,
            title: "simulate, optimize, evaluate and plot workflow",
            budget: Some(Duration::from_secs(120)),
            check: workflow,
        },
    ];

    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for c in criteria {
        let started = Instant::now();
        let outcome = panic::catch_unwind(c.check);
        let took = started.elapsed();
        let verdict = match outcome {
            Ok(Ok(detail)) => match c.budget {
                Some(budget) if took > budget => Err(format!("took {took:.2?}, budget {budget:?}")),
                _ => Ok(detail),
            },
            Ok(Err(reason)) => Err(reason),
            Err(payload) => Err(payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into())),
        };
        let budget = c.budget.map_or("none".to_string(), |b| format!("{}s", b.as_secs()));
        match verdict {
            Ok(detail) => println!(
                "criterion {:>2}: PASS [{:>7.2}s, budget {budget}] {}: {detail}",
                c.id,
                took.as_secs_f64(),
                c.title
            ),
            Err(reason) => {
                failures += 1;
                println!(
                    "criterion {:>2}: FAIL [{:>7.2}s, budget {budget}] {}: {reason}",
                    c.id,
                    took.as_secs_f64(),
                    c.title
                );
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", 10 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
