//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero when any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pathip_core::encoding::{encode_base, encode_time_expanded, Reachability};
use pathip_core::generate::{generate_instance, GeneratorSpec};
use pathip_core::mmcr::{build_mmcr_model, solve_mmcr, MmcrConfig};
use pathip_core::model::{brute_force_optimum, enumerate_feasible};
use pathip_core::model::{ObjectiveSense, Sense, VarKind};
use pathip_core::mpp::{build_mpp_model, solve_mpp, underestimate_t, Heuristic, MppConfig};
use pathip_core::oracle::{mmcr_oracle, mpp_oracle, rcp_oracle};
use pathip_core::rcp::{build_otp, choose_horizon, solve_rcp, RcpConfig};
use pathip_core::solver::{solve, SolveConfig, SolveStatus};
use pathip_core::validate::{
    evaluate_rcp, validate_mmcr_solution, validate_mpp_solution, validate_rcp_solution,
};
use pathip_core::{
    Graph, IpModel, MmcrInstance, MppInstance, Path, ProblemInstance, RcpInstance, RcpVariant,
};

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Debug>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

struct Outcome {
    passed: bool,
}

fn run(id: &str, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Check) -> Outcome {
    let started = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        })
        .and_then(|detail| match limit {
            Some(l) if started.elapsed() > l => Err(format!(
                "{detail}; took {:.1}s, limit {:.0}s",
                started.elapsed().as_secs_f64(),
                l.as_secs_f64()
            )),
            _ => Ok(detail),
        });
    let secs = started.elapsed().as_secs_f64();
    let (tag, detail) = match &result {
        Ok(d) => ("PASS", d),
        Err(d) => ("FAIL", d),
    };
    println!("{tag} [{id}] {title} ({secs:.2}s): {detail}");
    Outcome {
        passed: result.is_ok(),
    }
}

fn secs(s: u64) -> Option<Duration> {
    Some(Duration::from_secs(s))
}

// ---------------------------------------------------------------------------
// Row normalization for golden comparisons

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Row {
    terms: Vec<(String, i64)>,
    sense: &'static str,
    rhs: i64,
}

/// Scaled to integers; golden coefficients are all integral.
fn scaled(x: f64) -> i64 {
    (x * 1e6).round() as i64
}

fn normalize(mut terms: BTreeMap<String, f64>, sense: Sense, mut rhs: f64) -> Row {
    terms.retain(|_, c| *c != 0.0);
    let flip = match sense {
        Sense::Ge => true,
        Sense::Le => false,
        Sense::Eq => terms.values().next().is_some_and(|&c| c < 0.0),
    };
    let sign = if flip { -1.0 } else { 1.0 };
    rhs *= sign;
    Row {
        terms: terms
            .into_iter()
            .map(|(n, c)| (n, scaled(sign * c)))
            .collect(),
        sense: if sense == Sense::Eq { "=" } else { "<=" },
        rhs: scaled(rhs),
    }
}

/// Parses `a + 2 b - c <= d + 1` style text (terms and constants on either side).
fn parse_row(text: &str) -> Row {
    let (op, sense) = [("<=", Sense::Le), (">=", Sense::Ge), ("=", Sense::Eq)]
        .into_iter()
        .find(|(op, _)| text.contains(op))
        .expect("row has a relation");
    let (lhs, rhs) = text.split_once(op).unwrap();
    let mut terms = BTreeMap::new();
    let mut constant = 0.0;
    for (side, side_sign) in [(lhs, 1.0), (rhs, -1.0)] {
        let mut sign = 1.0;
        let mut coef: Option<f64> = None;
        for tok in side.split_whitespace() {
            match tok {
                "+" => sign = 1.0,
                "-" => sign = -1.0,
                _ => {
                    if let Ok(c) = tok.parse::<f64>() {
                        if let Some(prev) = coef.replace(c) {
                            constant += side_sign * sign * prev;
                        }
                    } else {
                        *terms.entry(tok.to_string()).or_insert(0.0) +=
                            side_sign * sign * coef.take().unwrap_or(1.0);
                        sign = 1.0;
                    }
                }
            }
        }
        if let Some(c) = coef {
            constant += side_sign * sign * c;
        }
    }
    normalize(terms, sense, -constant)
}

fn model_rows(model: &IpModel) -> BTreeSet<Row> {
    model
        .constraints()
        .iter()
        .map(|c| {
            let terms = c
                .terms
                .iter()
                .map(|&(k, v)| (model.variable(v).name.clone(), k))
                .collect();
            normalize(terms, c.sense, c.rhs)
        })
        .collect()
}

fn check_rows(model: &IpModel, golden: &[&str]) -> std::result::Result<usize, String> {
    let have = model_rows(model);
    for g in golden {
        ensure!(have.contains(&parse_row(g)), "missing row `{g}`");
    }
    Ok(golden.len())
}

fn variable_names(model: &IpModel) -> BTreeSet<String> {
    model.variables().iter().map(|v| v.name.clone()).collect()
}

fn name_set(names: &[&str]) -> BTreeSet<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn objective_row(model: &IpModel) -> BTreeMap<String, i64> {
    model
        .objective()
        .linear
        .iter()
        .map(|&(c, v)| (model.variable(v).name.clone(), scaled(c)))
        .collect()
}

// ---------------------------------------------------------------------------
// Instances

fn path3() -> Graph {
    Graph::new(3, &[(0, 1), (1, 2)]).unwrap()
}

fn fig1(k: usize) -> MppInstance {
    let g = Graph::new(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
    MppInstance::new(g, vec![0, 2], vec![2, 3], k, vec![]).unwrap()
}

fn small_mpp(i: u64) -> MppInstance {
    let n = 2 + (i % 2) as usize;
    let spec = GeneratorSpec::Mpp {
        rows: 2 + (i % 3) as usize,
        cols: 2 + (i / 3 % 3) as usize,
        removal: [0.0, 0.1, 0.2, 0.25][(i % 4) as usize],
        n,
        k: Some(1 + (i / 2) as usize % n),
    };
    match generate_instance(&spec, 1000 + i).unwrap() {
        ProblemInstance::Mpp(m) => m,
        _ => unreachable!(),
    }
}

fn small_mpp_suite() -> Vec<MppInstance> {
    (0..50).map(small_mpp).collect()
}

/// Horizon cap shared by solver and oracle. Proving that no plan exists takes
/// branch-and-bound time exponential in the horizon, so the cap stays small.
fn horizon_cap(inst: &MppInstance) -> usize {
    underestimate_t(inst).unwrap() + 4
}

fn mpp_config(inst: &MppInstance, heuristic: Heuristic) -> MppConfig {
    MppConfig {
        heuristic,
        max_t: Some(horizon_cap(inst)),
        ..MppConfig::default()
    }
}

// ---------------------------------------------------------------------------
// Criteria

fn c1_figure_one() -> Check {
    let mut out = Vec::new();
    for (k, expected) in [(2, 3), (1, 2)] {
        let started = Instant::now();
        let inst = fig1(k);
        let sol = ok(solve_mpp(&inst, &MppConfig::default()))?;
        let took = started.elapsed();
        ensure!(
            sol.status == SolveStatus::Optimal,
            "k={k}: status {:?}",
            sol.status
        );
        ensure!(
            sol.makespan == Some(expected),
            "k={k}: makespan {:?}, expected {expected}",
            sol.makespan
        );
        ensure!(took < Duration::from_secs(1), "k={k}: took {took:?}");
        let verdict = validate_mpp_solution(&inst, &sol);
        ensure!(verdict.is_ok(), "k={k}: invalid plan {verdict:?}");
        let oracle = ok(mpp_oracle(&inst, 10))?;
        ensure!(oracle == Some(expected), "k={k}: oracle says {oracle:?}");
        out.push(format!("k={k} -> {expected}"));
    }
    Ok(out.join(", "))
}

fn c2_appendix_mpp() -> Check {
    let inst = MppInstance::new(path3(), vec![0, 1], vec![1, 2], 1, vec![]).unwrap();
    let config = MppConfig {
        keep_redundant: true,
        literal_feedback_collisions: true,
        ..MppConfig::default()
    };
    let built = ok(build_mpp_model(&inst, 1, &config, Heuristic::None))?;
    let model = built.model();
    let expected = name_set(&[
        "x[0][0][0][0]",
        "x[0][0][1][0]",
        "x[1][0][0][1]",
        "x[1][0][1][1]",
        "x[1][0][2][1]",
        "x[0][1][0][0]",
        "x[0][1][0][1]",
        "x[1][1][1][0]",
        "x[1][1][1][1]",
        "x[1][1][1][2]",
    ]);
    ensure!(
        variable_names(model) == expected,
        "variables {:?}",
        variable_names(model)
    );
    ensure!(
        model.variables().iter().all(|v| v.is_binary()),
        "non-binary variable"
    );
    let rows = check_rows(
        model,
        &[
            // flow
            "x[0][1][0][0] + x[0][1][0][1] = x[0][0][0][0] + x[0][0][1][0]",
            "x[1][1][1][2] + x[1][1][1][1] + x[1][1][1][0] = x[1][0][2][1] + x[1][0][1][1] + x[1][0][0][1]",
            // vertex collisions
            "x[0][0][0][0] + x[0][0][1][0] <= 1",
            "x[1][0][0][1] + x[1][0][1][1] + x[1][0][2][1] <= 1",
            "x[0][1][0][0] + x[1][1][1][0] <= 1",
            "x[0][1][0][1] + x[1][1][1][1] <= 1",
            "x[1][1][1][2] <= 1",
            // edge collisions
            "x[0][0][0][0] <= 1",
            "x[1][0][0][1] + x[0][0][1][0] <= 1",
            "x[1][0][1][1] <= 1",
            "x[1][0][2][1] <= 1",
            "x[0][1][0][0] <= 1",
            "x[0][1][0][1] + x[1][1][1][0] <= 1",
            "x[1][1][1][1] <= 1",
            "x[1][1][1][2] <= 1",
            // termination
            "x[0][0][1][0] + x[1][0][2][1] >= 1",
        ],
    )?;
    let obj = objective_row(model);
    ensure!(
        model.objective().sense == ObjectiveSense::Maximize
            && obj
                == BTreeMap::from([
                    ("x[0][0][1][0]".to_string(), scaled(1.0)),
                    ("x[1][0][2][1]".to_string(), scaled(1.0)),
                ]),
        "objective {obj:?}"
    );
    Ok(format!("10 variables, {rows} rows"))
}

fn c2_appendix_mmcr() -> Check {
    let inst = MmcrInstance::new(
        path3(),
        vec![0, 1],
        vec![1, 2],
        vec![vec![0, 1], vec![1, 2]],
    )
    .unwrap();
    let built = ok(build_mmcr_model(&inst, 0))?;
    let model = &built.model;
    let expected = name_set(&[
        "x[0][0][1]",
        "x[0][1][0]",
        "x[0][1][2]",
        "x[0][2][1]",
        "x[1][0][1]",
        "x[1][1][0]",
        "x[1][1][2]",
        "x[1][2][1]",
        "xV[0]",
        "xV[1]",
        "xV[2]",
        "xO[0]",
        "xO[1]",
    ]);
    ensure!(
        variable_names(model) == expected,
        "variables {:?}",
        variable_names(model)
    );
    let rows = check_rows(
        model,
        &[
            "x[0][0][1] = 1",
            "x[0][0][1] + x[0][2][1] = 1",
            "x[1][1][0] + x[1][1][2] = 1",
            "x[1][1][2] = 1",
            "x[0][1][0] = 0",
            "x[0][1][0] + x[0][1][2] = 0",
            "x[1][0][1] + x[1][2][1] = 0",
            "x[1][2][1] = 0",
            "x[0][2][1] = x[0][1][2]",
            "x[0][1][2] <= 1",
            "x[1][0][1] = x[1][1][0]",
            "x[1][1][0] <= 1",
            "4 xV[0] >= x[0][0][1] + x[0][1][0] + x[1][0][1] + x[1][1][0]",
            "8 xV[1] >= x[0][1][0] + x[0][0][1] + x[0][1][2] + x[0][2][1] + x[1][1][0] + x[1][0][1] + x[1][1][2] + x[1][2][1]",
            "4 xV[2] >= x[0][2][1] + x[0][1][2] + x[1][2][1] + x[1][1][2]",
            "2 xO[0] >= xV[0] + xV[1]",
            "2 xO[1] >= xV[1] + xV[2]",
        ],
    )?;
    let obj = objective_row(model);
    ensure!(
        model.objective().sense == ObjectiveSense::Minimize
            && obj
                == BTreeMap::from([
                    ("xO[0]".to_string(), scaled(1.0)),
                    ("xO[1]".to_string(), scaled(1.0)),
                ]),
        "objective {obj:?}"
    );
    let oracle = ok(mmcr_oracle(&inst))?;
    ensure!(oracle == 2, "oracle says {oracle}");
    Ok(format!("13 variables, {rows} rows"))
}

fn c2_appendix_otp() -> Check {
    let (c01, c12, budget) = (2.0, 3.0, 10.0);
    let inst = RcpInstance::new(
        path3(),
        vec![c01, c12],
        budget,
        vec![0, 1],
        vec![0, 1],
        RcpVariant::Otp {
            rates: vec![1.0, 2.0, 3.0],
        },
    )
    .unwrap();
    let enc = ok(build_otp(&inst, 1, Reachability::Forward))?;
    let model = &enc.model;
    let binaries: BTreeSet<String> = model
        .variables()
        .iter()
        .filter(|v| v.is_binary())
        .map(|v| v.name.clone())
        .collect();
    let expected = name_set(&[
        "x[0][0][u][0]",
        "x[0][0][u][1]",
        "x[0][2][0][u]",
        "x[0][2][1][u]",
        "x[0][1][0][0]",
        "x[0][1][0][1]",
        "x[0][1][1][0]",
        "x[0][1][1][1]",
        "x[0][1][1][2]",
        "xv[0]",
        "xv[1]",
        "xv[2]",
    ]);
    ensure!(binaries == expected, "binary variables {binaries:?}");
    let continuous: Vec<(String, f64)> = model
        .variables()
        .iter()
        .filter(|v| matches!(v.kind, VarKind::Continuous { .. }))
        .map(|v| (v.name.clone(), v.lower()))
        .collect();
    ensure!(
        continuous
            == vec![
                ("t[0]".to_string(), 0.0),
                ("t[1]".to_string(), 0.0),
                ("t[2]".to_string(), 0.0)
            ],
        "continuous variables {continuous:?}"
    );
    let rows = check_rows(
        model,
        &[
            "2 x[0][1][0][1] + 2 x[0][1][1][0] + 3 x[0][1][1][2] + t[0] + t[1] + t[2] <= 10",
            "x[0][0][u][0] + x[0][0][u][1] = 1",
            "x[0][2][0][u] + x[0][2][1][u] = 1",
            "x[0][1][0][0] + x[0][1][0][1] = x[0][0][u][0]",
            "x[0][1][1][0] + x[0][1][1][1] + x[0][1][1][2] = x[0][0][u][1]",
            "x[0][2][0][u] = x[0][1][0][0] + x[0][1][1][0]",
            "x[0][2][1][u] = x[0][1][0][1] + x[0][1][1][1]",
            "xv[0] <= x[0][0][u][0] + x[0][1][0][0] + x[0][1][1][0]",
            "xv[1] <= x[0][0][u][1] + x[0][1][0][1] + x[0][1][1][1]",
            "xv[2] <= x[0][1][1][2]",
            "x[0][0][u][0] = x[0][2][0][u]",
            "x[0][0][u][1] = x[0][2][1][u]",
            "t[0] <= 10 xv[0]",
            "t[1] <= 10 xv[1]",
            "t[2] <= 10 xv[2]",
        ],
    )?;
    Ok(format!("12 binaries + 3 dwell variables, {rows} rows"))
}

fn c3_mpp_oracle() -> Check {
    let mut solved = 0;
    for (i, inst) in small_mpp_suite().iter().enumerate() {
        let sol = ok(solve_mpp(inst, &mpp_config(inst, Heuristic::None)))?;
        let oracle = ok(mpp_oracle(inst, horizon_cap(inst)))?;
        match oracle {
            Some(t) => {
                ensure!(
                    sol.status == SolveStatus::Optimal && sol.makespan == Some(t),
                    "instance {i}: {:?} makespan {:?}, oracle {t}",
                    sol.status,
                    sol.makespan
                );
                let verdict = validate_mpp_solution(inst, &sol);
                ensure!(verdict.is_ok(), "instance {i}: invalid plan {verdict:?}");
                solved += 1;
            }
            None => ensure!(
                sol.status == SolveStatus::TimeoutNoIncumbent,
                "instance {i}: oracle finds no plan, solver returns {:?}",
                sol.status
            ),
        }
    }
    Ok(format!("50 instances agree ({solved} solvable)"))
}

fn c4_variable_reduction() -> Check {
    let spec = GeneratorSpec::Mpp {
        rows: 24,
        cols: 18,
        removal: 0.1,
        n: 30,
        k: None,
    };
    let config = MppConfig::default();
    let mut totals = [0usize; 3];
    for seed in 0..20 {
        let ProblemInstance::Mpp(inst) = ok(generate_instance(&spec, seed))? else {
            unreachable!()
        };
        let t0 = ok(underestimate_t(&inst))?;
        for (total, h) in
            totals
                .iter_mut()
                .zip([Heuristic::None, Heuristic::Tube(2), Heuristic::Sphere(2)])
        {
            *total += ok(build_mpp_model(&inst, t0, &config, h))?
                .model()
                .variable_count();
        }
    }
    let tube = totals[1] as f64 / totals[0] as f64;
    let sphere = totals[2] as f64 / totals[0] as f64;
    let detail = format!(
        "mean variables exact {:.0}, tube {:.0} ({:.1}%), sphere {:.0} ({:.1}%)",
        totals[0] as f64 / 20.0,
        totals[1] as f64 / 20.0,
        100.0 * tube,
        totals[2] as f64 / 20.0,
        100.0 * sphere
    );
    ensure!(tube <= 0.4 && sphere <= 0.4, "{detail}");
    Ok(detail)
}

fn c5_heuristic_optimality() -> Check {
    let heuristics = [
        Heuristic::Tube(0),
        Heuristic::Tube(1),
        Heuristic::Sphere(0),
        Heuristic::Sphere(1),
    ];
    let mut runs = 0;
    for (i, inst) in small_mpp_suite().iter().enumerate() {
        let exact = ok(solve_mpp(inst, &mpp_config(inst, Heuristic::None)))?;
        for h in heuristics {
            let sol = ok(solve_mpp(inst, &mpp_config(inst, h)))?;
            ensure!(
                sol.makespan == exact.makespan
                    && sol.status.has_solution() == exact.status.has_solution(),
                "instance {i} {h:?}: makespan {:?} ({:?}) vs exact {:?} ({:?})",
                sol.makespan,
                sol.status,
                exact.makespan,
                exact.status
            );
            if sol.status.has_solution() {
                let verdict = validate_mpp_solution(inst, &sol);
                ensure!(verdict.is_ok(), "instance {i} {h:?}: {verdict:?}");
            }
            runs += 1;
        }
    }
    Ok(format!("{runs} heuristic runs match exact"))
}

fn c6_mmcr_oracle() -> Check {
    let mut sizes = Vec::new();
    for i in 0..30u64 {
        let spec = GeneratorSpec::Mmcr {
            rows: 10,
            cols: 10,
            n: 1 + (i % 2) as usize,
            obstacles: 1 + (i % 10) as usize,
            max_side: 4,
        };
        let ProblemInstance::Mmcr(inst) = ok(generate_instance(&spec, 2000 + i))? else {
            unreachable!()
        };
        let sol = ok(solve_mmcr(&inst, &MmcrConfig::default()))?;
        let oracle = ok(mmcr_oracle(&inst))?;
        ensure!(
            sol.removed_obstacles.len() == oracle,
            "instance {i}: removed {:?}, oracle {oracle}",
            sol.removed_obstacles
        );
        let verdict = validate_mmcr_solution(&inst, &sol);
        ensure!(verdict.is_ok(), "instance {i}: {verdict:?}");
        sizes.push(oracle);
    }
    Ok(format!(
        "30 instances agree, removal sizes {}..={}",
        sizes.iter().min().unwrap(),
        sizes.iter().max().unwrap()
    ))
}

fn random_rcp(i: u64) -> RcpInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(3000 + i);
    let (rows, cols) = [(2, 2), (2, 3), (3, 2), (2, 4), (1, 5), (3, 3)][(i % 6) as usize];
    let (rows, cols) = if rows * cols > 8 {
        (2, 4)
    } else {
        (rows, cols)
    };
    let budget = rng.gen_range(0.0..6.0);
    let starts = rng.gen_range(1..=2);
    let spec = if i % 2 == 0 {
        GeneratorSpec::Qcop {
            rows,
            cols,
            budget,
            starts,
        }
    } else {
        GeneratorSpec::Otp {
            rows,
            cols,
            budget,
            starts,
        }
    };
    let ProblemInstance::Rcp(mut inst) = generate_instance(&spec, 3000 + i).unwrap() else {
        unreachable!()
    };
    if i % 3 == 0 {
        inst.edge_costs = (0..inst.graph.edge_count())
            .map(|_| rng.gen_range(0.3..2.0))
            .collect();
    }
    inst
}

fn c7_rcp_oracle() -> Check {
    let (mut qcop, mut otp) = (0, 0);
    for i in 0..50u64 {
        let inst = random_rcp(i);
        let horizon = ok(choose_horizon(&inst))?.min(6);
        let config = RcpConfig {
            horizon: Some(horizon),
            ..RcpConfig::default()
        };
        let sol = ok(solve_rcp(&inst, &config))?;
        let oracle = ok(rcp_oracle(&inst, horizon))?;
        let Some(best) = oracle else {
            ensure!(
                sol.status == SolveStatus::Infeasible,
                "instance {i}: oracle finds no walk, solver returns {:?}",
                sol.status
            );
            continue;
        };
        ensure!(
            sol.status == SolveStatus::Optimal,
            "instance {i}: status {:?}",
            sol.status
        );
        let reward = sol.reward.unwrap();
        ensure!(
            (reward - best.reward).abs() <= 1e-6,
            "instance {i} (T={horizon}): reward {reward}, oracle {}",
            best.reward
        );
        let eval = ok(evaluate_rcp(&inst, &sol.paths[0], &sol.dwell_times))?;
        ensure!(
            eval.cost <= inst.budget + 1e-9,
            "instance {i}: cost {} over budget {}",
            eval.cost,
            inst.budget
        );
        ensure!(
            (sol.objective.unwrap() - eval.reward).abs() <= 1e-6,
            "instance {i}: model objective {:?} vs evaluated {}",
            sol.objective,
            eval.reward
        );
        for (v, &t) in sol.dwell_times.iter().enumerate() {
            ensure!(
                t <= 1e-9 || sol.paths[0].vertices.contains(&v),
                "instance {i}: dwell {t} at unvisited vertex {v}"
            );
        }
        let verdict = validate_rcp_solution(&inst, &sol);
        ensure!(verdict.is_ok(), "instance {i}: {verdict:?}");
        if inst.is_otp() {
            otp += 1;
        } else {
            qcop += 1;
        }
    }
    Ok(format!("{qcop} QCOP + {otp} OTP instances agree"))
}

/// Every connected graph on `n` labelled vertices.
fn connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    (0u32..1 << pairs.len())
        .filter_map(|mask| {
            let edges: Vec<_> = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            Graph::new(n, &edges).ok().filter(|g| g.is_connected())
        })
        .collect()
}

fn simple_paths(g: &Graph, s: usize, t: usize) -> BTreeSet<Vec<usize>> {
    fn go(g: &Graph, t: usize, cur: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        let v = *cur.last().unwrap();
        if v == t {
            out.insert(cur.clone());
            return;
        }
        for &w in g.neighbors(v) {
            if !cur.contains(&w) {
                cur.push(w);
                go(g, t, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(g, t, &mut vec![s], &mut out);
    out
}

fn walks(g: &Graph, s: usize, t: usize, steps: usize) -> BTreeSet<Vec<usize>> {
    let mut layer = vec![vec![s]];
    for _ in 0..steps {
        layer = layer
            .into_iter()
            .flat_map(|w| {
                let v = *w.last().unwrap();
                std::iter::once(v)
                    .chain(g.neighbors(v).iter().copied())
                    .map(move |x| {
                        let mut n = w.clone();
                        n.push(x);
                        n
                    })
            })
            .collect();
    }
    layer.into_iter().filter(|w| w.last() == Some(&t)).collect()
}

fn binary_part(model: &IpModel, values: &[f64]) -> Vec<u8> {
    model
        .variables()
        .iter()
        .zip(values)
        .filter(|(v, _)| v.is_binary())
        .map(|(_, &x)| x as u8)
        .collect()
}

fn c8_bijections() -> Check {
    let mut base_cases = 0;
    let mut expanded_cases = 0;
    for n in 1..=4 {
        for g in connected_graphs(n) {
            for s in 0..n {
                for t in 0..n {
                    if s != t {
                        let enc = ok(encode_base(&g, s, t, true))?;
                        let expected = simple_paths(&g, s, t);
                        let mut seen: BTreeMap<Vec<u8>, Vec<usize>> = BTreeMap::new();
                        let mut err = None;
                        ok(enumerate_feasible(&enc.model, |values| {
                            match enc.extract_path(values) {
                                Ok(p) => {
                                    let key = binary_part(&enc.model, values);
                                    if let Some(prev) = seen.insert(key, p.vertices.clone()) {
                                        if prev != p.vertices {
                                            err = Some(format!(
                                                "one assignment, two paths {prev:?} {p:?}"
                                            ));
                                        }
                                    }
                                }
                                Err(e) => err = Some(format!("{e}")),
                            }
                            err.is_none()
                        }))?;
                        if let Some(e) = err {
                            return Err(format!("base n={n} {s}->{t}: {e}"));
                        }
                        let got: BTreeSet<Vec<usize>> = seen.values().cloned().collect();
                        ensure!(
                            got.len() == seen.len() && got == expected,
                            "base n={n} edges {:?} {s}->{t}: {} assignments, {} paths, {} simple paths",
                            g.edges(),
                            seen.len(),
                            got.len(),
                            expected.len()
                        );
                        for p in &expected {
                            let path = Path::new(p.clone());
                            let values = ok(enc.encode_assignment(&path))?;
                            ensure!(
                                enc.model.is_feasible(&values, 1e-9),
                                "base: encoding of {p:?} is infeasible"
                            );
                            ensure!(
                                ok(enc.extract_path(&values))? == path,
                                "base: round trip of {p:?}"
                            );
                        }
                        base_cases += 1;
                    }
                    for horizon in 0..=3 {
                        let expected = walks(&g, s, t, horizon);
                        for reach in [false, true] {
                            let enc = match encode_time_expanded(&g, &[s], &[t], horizon, reach) {
                                Ok(e) => e,
                                Err(_) if expected.is_empty() => continue,
                                Err(e) => return Err(format!("{e}")),
                            };
                            let mut got = BTreeSet::new();
                            let mut count = 0;
                            let mut err = None;
                            ok(enumerate_feasible(&enc.model, |values| {
                                count += 1;
                                match enc.extract_path(values) {
                                    Ok(p) => {
                                        got.insert(p.vertices);
                                    }
                                    Err(e) => err = Some(format!("{e}")),
                                }
                                err.is_none()
                            }))?;
                            if let Some(e) = err {
                                return Err(format!("expanded n={n} {s}->{t} T={horizon}: {e}"));
                            }
                            ensure!(
                                count == got.len() && got == expected,
                                "expanded n={n} edges {:?} {s}->{t} T={horizon} reach={reach}: {count} assignments, {} walks expected",
                                g.edges(),
                                expected.len()
                            );
                            for w in &expected {
                                let path = Path::new(w.clone());
                                let values = ok(enc.encode_assignment(&[path.clone()]))?;
                                ensure!(
                                    enc.model.is_feasible(&values, 1e-9),
                                    "expanded: encoding of {w:?} is infeasible"
                                );
                                ensure!(
                                    ok(enc.extract_path(&values))? == path,
                                    "expanded: round trip of {w:?}"
                                );
                            }
                            expanded_cases += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!(
        "{base_cases} base-graph and {expanded_cases} time-expanded cases"
    ))
}

fn random_milp(rng: &mut ChaCha8Rng) -> IpModel {
    let mut m = IpModel::new();
    let n = rng.gen_range(1..=15);
    let x: Vec<_> = (0..n).map(|i| m.add_binary(format!("x{i}"))).collect();
    for r in 0..rng.gen_range(0..=10) {
        let mut terms = Vec::new();
        for &v in &x {
            if rng.gen_bool(0.6) {
                terms.push((rng.gen_range(-5..=9) as f64, v));
            }
        }
        let sense = [Sense::Le, Sense::Le, Sense::Ge, Sense::Eq][rng.gen_range(0..4)];
        let rhs = match sense {
            Sense::Eq => rng.gen_range(0..=4) as f64,
            _ => rng.gen_range(-2..=12) as f64,
        };
        m.add_constraint(format!("r{r}"), terms, sense, rhs)
            .unwrap();
    }
    let sense = if rng.gen_bool(0.5) {
        ObjectiveSense::Maximize
    } else {
        ObjectiveSense::Minimize
    };
    let obj: Vec<_> = x
        .iter()
        .map(|&v| (rng.gen_range(-10..=10) as f64, v))
        .collect();
    m.set_objective(sense, obj).unwrap();
    m
}

fn c9_solver() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let (mut feasible, mut nodes) = (0, 0);
    for i in 0..200 {
        let m = random_milp(&mut rng);
        let config = SolveConfig {
            record_nodes: true,
            ..SolveConfig::default()
        };
        let outcome = ok(solve(&m, &config))?;
        let truth = ok(brute_force_optimum(&m))?;
        match truth {
            None => ensure!(
                outcome.status == SolveStatus::Infeasible,
                "model {i}: solver {:?}, enumeration infeasible",
                outcome.status
            ),
            Some(best) => {
                ensure!(
                    outcome.status == SolveStatus::Optimal,
                    "model {i}: status {:?}",
                    outcome.status
                );
                let obj = outcome.objective.unwrap();
                ensure!(
                    (obj - best.objective).abs() < 1e-6,
                    "model {i}: objective {obj}, enumeration {}",
                    best.objective
                );
                ensure!(
                    m.is_feasible(&outcome.values, 1e-6),
                    "model {i}: infeasible"
                );
                let max = m.objective().sense == ObjectiveSense::Maximize;
                for rec in &outcome.node_log {
                    let dominates = |b: f64| {
                        if max {
                            b >= best.objective - 1e-6
                        } else {
                            b <= best.objective + 1e-6
                        }
                    };
                    ensure!(
                        dominates(rec.global_bound),
                        "model {i} node {}: bound {} vs optimum {}",
                        rec.id,
                        rec.global_bound,
                        best.objective
                    );
                    if rec.id == 0 {
                        ensure!(
                            rec.lp_bound.is_some_and(dominates),
                            "model {i}: root LP bound {:?}",
                            rec.lp_bound
                        );
                    }
                }
                nodes += outcome.node_log.len();
                feasible += 1;
            }
        }
    }
    Ok(format!(
        "200 models agree ({feasible} feasible, {nodes} node bounds checked)"
    ))
}

fn c10_scale_smoke() -> Check {
    let spec = GeneratorSpec::Mpp {
        rows: 24,
        cols: 18,
        removal: 0.1,
        n: 10,
        k: None,
    };
    let ProblemInstance::Mpp(inst) = ok(generate_instance(&spec, 7))? else {
        unreachable!()
    };
    let mut config = MppConfig::default();
    config.solver.time_limit = 600.0;
    let sol = ok(solve_mpp(&inst, &config))?;
    ensure!(
        sol.status == SolveStatus::Optimal,
        "status {:?}",
        sol.status
    );
    let verdict = validate_mpp_solution(&inst, &sol);
    ensure!(verdict.is_ok(), "{verdict:?}");
    Ok(format!(
        "makespan {} with {} variables",
        sol.makespan.unwrap(),
        sol.stats.variable_count
    ))
}

fn main() {
    let outcomes = [
        run("1", "Fig. 1 makespans", secs(2), c1_figure_one),
        run("2a", "MPP golden model", secs(1), c2_appendix_mpp),
        run("2b", "MMCR golden model", secs(1), c2_appendix_mmcr),
        run("2c", "OTP golden model", secs(1), c2_appendix_otp),
        run("3", "MPP oracle equivalence", secs(120), c3_mpp_oracle),
        run(
            "4",
            "heuristic variable reduction",
            secs(120),
            c4_variable_reduction,
        ),
        run(
            "5",
            "heuristic optimality with fallback",
            None,
            c5_heuristic_optimality,
        ),
        run("6", "MMCR oracle equivalence", secs(120), c6_mmcr_oracle),
        run("7", "RCP oracle equivalence", secs(180), c7_rcp_oracle),
        run("8", "path/assignment bijections", secs(60), c8_bijections),
        run("9", "solver against enumeration", None, c9_solver),
        run("10", "24x18 grid, 10 robots", secs(600), c10_scale_smoke),
    ];
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        outcomes.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
