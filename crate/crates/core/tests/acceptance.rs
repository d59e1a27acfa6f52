//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::Rng;

use floodopt::model::{
    default_site_grid, random_design, BarangayGenome, GeneValue, ObjectiveConfig, PenaltyShape,
    TraitId, TraitMap, VulnerabilityWeights,
};
use floodopt::objective::{penalty, vulnerability, DesignEvaluator};
use floodopt::oracle::{best_genome_for_factor, best_genome_per_trait};
use floodopt::report::compare::{compare_runs, CompareOptions, Comparison};
use floodopt::report::floodplain::floodplain_report;
use floodopt::report::render::{design_from_trait_grid, parse_trait_grid};
use floodopt::report::RunConfig;
use floodopt::rng::seeded_rng;
use floodopt::run::EngineKind;
use floodopt::sa::{
    acceptance_probability, calibrate_initial_temperature, metropolis_accept, Annealer, MoveKind,
};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

const SEEDS: std::ops::Range<u64> = 1..21;

fn random_config(rng: &mut impl Rng) -> ObjectiveConfig {
    let shapes = [
        PenaltyShape::Linear,
        PenaltyShape::Quadratic,
        PenaltyShape::Exponential,
    ];
    let weights = TraitMap::from_fn(|_| rng.gen_range(0.0..4.0));
    let shapes = TraitMap::from_fn(|_| shapes[rng.gen_range(0..3)]);
    let scale = rng.gen_range(0.1..10.0);
    ObjectiveConfig::new(VulnerabilityWeights::new(weights).unwrap(), shapes, scale).unwrap()
}

fn oracle_exactness() -> Outcome {
    let started = Instant::now();
    let mut rng = seeded_rng(2024);
    let mut checked = 0;
    for i in 0..50 {
        let cfg = random_config(&mut rng);
        for s in [0.5, 1.0, 2.0] {
            let (g_full, v_full) = best_genome_for_factor(s, &cfg).map_err(|e| e.to_string())?;
            let (g_1d, v_1d) = best_genome_per_trait(s, &cfg).map_err(|e| e.to_string())?;
            ensure(
                g_full == g_1d && v_full == v_1d,
                format!("config {i}, S={s}: {g_full:?}/{v_full} vs {g_1d:?}/{v_1d}"),
            )?;
            checked += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure(
        elapsed < Duration::from_secs(5),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "{checked} (config, S) pairs identical in {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn site_grid_fidelity() -> Outcome {
    const H: f64 = 0.5;
    let expected = [
        [H, H, H, H, 1.0, 2.0],
        [H, H, H, 1.0, 2.0, 1.0],
        [H, H, 1.0, 2.0, 1.0, H],
        [H, 1.0, 2.0, 1.0, H, H],
        [1.0, 2.0, 1.0, H, H, H],
        [2.0, 1.0, H, H, H, H],
    ];
    let grid = default_site_grid(6).map_err(|e| e.to_string())?;
    for (r, row) in expected.iter().enumerate() {
        for (c, &f) in row.iter().enumerate() {
            ensure(
                grid.factor(r, c) == f,
                format!("({r},{c}) = {} expected {f}", grid.factor(r, c)),
            )?;
        }
    }
    let m = [
        grid.multiplicity(0.5),
        grid.multiplicity(1.0),
        grid.multiplicity(2.0),
    ];
    ensure(m == [20, 10, 6], format!("multiplicities {m:?}"))?;
    Ok("36/36 factors match; multiplicities 20/10/6".into())
}

fn formula_spot_values() -> Outcome {
    let cfg = ObjectiveConfig::default();
    let unscaled = ObjectiveConfig::unscaled();
    let three = BarangayGenome::uniform(GeneValue::THREE);
    let zero = BarangayGenome::ZERO;
    let v = vulnerability(&three, 2.0, cfg.weights()).map_err(|e| e.to_string())?;
    ensure(v == 48.0, format!("vulnerability(all 3, S=2) = {v}"))?;
    let p0 = penalty(&zero, 1.0, unscaled.shapes(), 1.0).map_err(|e| e.to_string())?;
    let want = 3.0 * 3f64.exp() + 18.0;
    ensure(
        ((p0 - want) / want).abs() <= 1e-9,
        format!("penalty(all 0) = {p0}, expected {want}"),
    )?;
    let p3 = penalty(&three, 1.0, unscaled.shapes(), 1.0).map_err(|e| e.to_string())?;
    ensure(p3 == 3.0, format!("penalty(all 3) = {p3}"))?;
    Ok(format!("V=48, C(0)={p0}, C(3)=3"))
}

fn run_comparison(equalize_budgets: bool) -> Result<(Comparison, Duration), String> {
    let started = Instant::now();
    let seeds: Vec<u64> = SEEDS.collect();
    let cmp = compare_runs(
        &RunConfig::default(),
        &seeds,
        CompareOptions { equalize_budgets },
    )
    .map_err(|e| e.to_string())?;
    Ok((cmp, started.elapsed()))
}

fn convergence(cmp: &Comparison, elapsed: Duration) -> Outcome {
    if let Some(r) = cmp.runs.iter().find(|r| r.gap < 0.0) {
        return Err(format!(
            "{} seed {} beat the oracle: gap {}",
            r.engine.name(),
            r.seed,
            r.gap
        ));
    }
    let median = |e: EngineKind| {
        cmp.engines
            .iter()
            .find(|s| s.engine == e)
            .map(|s| s.median_gap)
            .unwrap_or(f64::NAN)
    };
    let (ga, sa) = (median(EngineKind::Ga), median(EngineKind::Sa));
    ensure(sa <= 0.02, format!("SA median gap {:.4}%", 100.0 * sa))?;
    ensure(ga <= 0.05, format!("GA median gap {:.4}%", 100.0 * ga))?;
    ensure(
        elapsed < Duration::from_secs(300),
        format!("took {elapsed:?}"),
    )?;
    Ok(format!(
        "median gap SA {:.4}%, GA {:.4}% over {} seeds each ({:.1}s)",
        100.0 * sa,
        100.0 * ga,
        SEEDS.count(),
        elapsed.as_secs_f64()
    ))
}

fn monotone_traces(cmps: &[&Comparison]) -> Outcome {
    let mut n = 0;
    for cmp in cmps {
        for r in &cmp.reports {
            ensure(
                r.trace_is_nonincreasing(),
                format!("{} seed {} trace increases", r.engine.name(), r.seed),
            )?;
            n += 1;
        }
    }
    Ok(format!("{n} traces nonincreasing"))
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_floodopt");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let outputs = ["json", "trace.csv", "grids.txt"];
    for engine in ["ga", "sa"] {
        let mut first: Option<Vec<Vec<u8>>> = None;
        for i in 0..3 {
            let out = dir.path().join(format!("{engine}{i}.json"));
            let status = Command::new(bin)
                .args([engine, "--seed", "11", "--out"])
                .arg(&out)
                .output()
                .map_err(|e| e.to_string())?;
            ensure(
                status.status.success(),
                format!("{engine} run {i} failed: {status:?}"),
            )?;
            let files = outputs
                .iter()
                .map(|ext| read(&dir.path().join(format!("{engine}{i}.{ext}"))))
                .collect::<Result<Vec<_>, _>>()?;
            match &first {
                None => first = Some(files),
                Some(f) => ensure(
                    *f == files,
                    format!("{engine} invocation {i} differs from the first"),
                )?,
            }
        }
    }
    Ok("ga and sa outputs byte-identical across 3 invocations".into())
}

fn read(path: &Path) -> Result<Vec<u8>, String> {
    std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn floodplain_fixture() -> Outcome {
    let text = include_str!("fixtures/ga_poverty_grid.txt");
    let rows = parse_trait_grid(text).map_err(|e| e.to_string())?;
    let design = design_from_trait_grid(TraitId::Poverty, &rows).map_err(|e| e.to_string())?;
    let grid = default_site_grid(6).map_err(|e| e.to_string())?;
    let rep = floodplain_report(&design, &grid).map_err(|e| e.to_string())?;
    let on_plain = rep.flags_for(TraitId::Poverty).count();
    let total = rep.counts[TraitId::Poverty].total(3);
    ensure(
        on_plain == 2,
        format!("{on_plain} poor cells on the floodplain"),
    )?;
    ensure(
        total == 9,
        format!("{total} poverty value-3 cells in total"),
    )?;
    Ok(format!(
        "{on_plain} of {total} poverty value-3 cells on the floodplain"
    ))
}

fn metropolis_stub() -> Outcome {
    let mut checked = 0;
    for &(delta, t) in &[
        (0.5, 1.0),
        (3.0, 3.0),
        (10.0, 2.5),
        (1e-3, 7.0),
        (42.0, 40.0),
    ] {
        let p = acceptance_probability(delta, t).map_err(|e| e.to_string())?;
        let exact = (-delta / t).exp();
        ensure(p == exact, format!("p({delta},{t}) = {p} vs {exact}"))?;
        let below = f64::from_bits(p.to_bits() - 1);
        ensure(
            metropolis_accept(delta, t, below).unwrap(),
            "u just below p rejected",
        )?;
        ensure(!metropolis_accept(delta, t, p).unwrap(), "u = p accepted")?;
        checked += 1;
    }
    for delta in [-5.0, 0.0] {
        ensure(
            metropolis_accept(delta, 1.0, 0.999_999).unwrap(),
            "downhill rejected",
        )?;
    }

    let grid = default_site_grid(6).unwrap();
    let eval = DesignEvaluator::new(&grid, &ObjectiveConfig::default()).unwrap();
    let mut chain = Annealer::new(&eval, random_design(5, 6).unwrap(), 10.0).unwrap();
    for bit in [0, 13, 200, 503] {
        let prop = chain.propose_flip(bit);
        let p = acceptance_probability(prop.delta, 10.0).unwrap();
        if p < 1.0 {
            let before = chain.current().clone();
            let out = chain.decide(prop, p);
            ensure(
                !out.accepted && *chain.current() == before,
                "stubbed u = p applied",
            )?;
        }
        let below = if p > 0.0 {
            f64::from_bits(p.to_bits() - 1)
        } else {
            -1.0
        };
        ensure(chain.decide(prop, below).accepted, "stubbed u < p rejected")?;
        checked += 1;
    }
    Ok(format!("{checked} stubbed thresholds exact"))
}

fn metropolis_statistics() -> Outcome {
    let grid = default_site_grid(6).unwrap();
    let eval = DesignEvaluator::new(&grid, &ObjectiveConfig::default()).unwrap();
    let mut rng = seeded_rng(77);
    let mut chain = Annealer::new(&eval, random_design(77, 6).unwrap(), 1.0).unwrap();
    let (t0, _) = calibrate_initial_temperature(&chain, MoveKind::BitFlip, &mut rng);
    let t = 0.25 * t0;
    chain.set_temperature(t).unwrap();
    let (mut uphill, mut accepted, mut expected, mut variance) = (0u64, 0u64, 0.0, 0.0);
    for _ in 0..100_000 {
        let out = chain.step(MoveKind::BitFlip, &mut rng);
        if out.delta > 0.0 {
            uphill += 1;
            expected += out.probability;
            variance += out.probability * (1.0 - out.probability);
            if out.accepted {
                accepted += 1;
            }
        }
    }
    let z = (accepted as f64 - expected) / variance.sqrt();
    ensure(uphill > 1000, format!("only {uphill} uphill proposals"))?;
    ensure(
        z.abs() <= 3.0,
        format!("accepted {accepted}, expected {expected:.1}, z = {z:.2}"),
    )?;
    Ok(format!(
        "T={t:.2}: {accepted} of {uphill} uphill accepted, expected {expected:.1}, z = {z:.2}"
    ))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut results: Vec<(&str, Outcome)> = Vec::new();
    let mut run = |name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("[{tag}] {name}: {detail}");
        results.push((name, outcome));
    };

    run("oracle exactness", &mut oracle_exactness);
    run("default site grid fidelity", &mut site_grid_fidelity);
    run("formula spot values", &mut formula_spot_values);

    let default_runs = run_comparison(false);
    let equal_runs = run_comparison(true);
    run("engine convergence (default parameters)", &mut || {
        let (cmp, t) = default_runs.as_ref().map_err(Clone::clone)?;
        convergence(cmp, *t)
    });
    run("engine convergence (equalized budgets)", &mut || {
        let (cmp, t) = equal_runs.as_ref().map_err(Clone::clone)?;
        convergence(cmp, *t)
    });
    run("monotone traces", &mut || {
        let a = &default_runs.as_ref().map_err(Clone::clone)?.0;
        let b = &equal_runs.as_ref().map_err(Clone::clone)?.0;
        monotone_traces(&[a, b])
    });
    run("determinism", &mut determinism);
    run(
        "floodplain report on transcribed GA poverty grid",
        &mut floodplain_fixture,
    );
    run("Metropolis stubbed thresholds", &mut metropolis_stub);
    run(
        "Metropolis uphill acceptance frequency",
        &mut metropolis_statistics,
    );

    let failed = results.iter().filter(|(_, r)| r.is_err()).count();
    println!(
        "\n{} criteria, {} passed, {} failed ({:.1}s)",
        results.len(),
        results.len() - failed,
        failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
