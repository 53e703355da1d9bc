//! Experiment runners. Each returns a [`Report`] with result tables and the
//! acceptance checks for the published numbers it reproduces.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use thermovar_core::circuit::{build_ansatz, output_factor, RegisterLayout};
use thermovar_core::hamiltonian::{gibbs_state, spectral_gap, PauliHamiltonian};
use thermovar_core::loss::{
    delta_star, fidelity_floor_theorem1, free_energy, prop2_fidelity_bound, truncated_free_energy_factor,
};
use thermovar_core::optim::{train, TrainTrace};

use crate::config::{ExperimentConfig, ExperimentId};
use crate::error::Result;
use crate::output::{fmt_float, ResultRow, Table};

/// One acceptance check. Only checks with `paper = true` decide the exit code.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub paper: bool,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, paper: bool, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            paper,
            passed,
            detail: detail.into(),
        }
    }
}

/// Everything an experiment produced.
#[derive(Clone, Debug)]
pub struct Report {
    pub config: ExperimentConfig,
    /// Main table, `<id>.csv`.
    pub main: Table,
    /// Auxiliary tables, `<id>.<suffix>.csv`.
    pub extra: Vec<Table>,
    pub checks: Vec<Check>,
    /// Training runs in deterministic cell order (empty for the analytic experiments).
    pub runs: Vec<Run>,
}

impl Report {
    pub fn tables(&self) -> impl Iterator<Item = &Table> {
        std::iter::once(&self.main).chain(&self.extra)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| c.paper).all(|c| c.passed)
    }
}

/// Coordinates of one training run.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub model: String,
    pub ansatz: String,
    pub chain_length: usize,
    pub n_ancilla: usize,
    pub depth: usize,
    pub order: usize,
    pub beta: f64,
    pub seed: u64,
}

impl Cell {
    pub fn layout(&self) -> Result<RegisterLayout> {
        Ok(RegisterLayout::new(self.n_ancilla, self.chain_length)?)
    }

    /// The depth column; the Ising ansatzes have no repeated module.
    pub fn depth_column(&self) -> usize {
        if self.ansatz == "xy" {
            self.depth
        } else {
            0
        }
    }

    fn group_key(&self) -> (String, usize, usize, usize, usize, u64) {
        (
            self.model_column(),
            self.chain_length,
            self.n_ancilla,
            self.depth_column(),
            self.order,
            self.beta.to_bits(),
        )
    }

    fn model_column(&self) -> String {
        format!("{}/{}", self.model, self.ansatz)
    }
}

#[derive(Clone, Debug)]
pub struct Run {
    pub cell: Cell,
    pub trace: TrainTrace,
    pub wall_ms: f64,
}

impl Run {
    /// Fidelity after `iteration` steps, or the final one if training stopped earlier.
    pub fn fidelity_at(&self, iteration: usize) -> f64 {
        self.trace
            .records
            .iter()
            .take_while(|r| r.iteration <= iteration)
            .last()
            .map_or(self.trace.initial_fidelity, |r| r.fidelity)
    }
}

pub fn train_cell(cfg: &ExperimentConfig, cell: &Cell) -> Result<Run> {
    let start = Instant::now();
    let layout = cell.layout()?;
    let h = PauliHamiltonian::from_model_name(&cell.model, cell.chain_length)?;
    let circ = build_ansatz(&cell.ansatz, &layout, cell.depth)?;
    let tc = cfg.train_config(cell.beta, cell.order, cell.seed)?;
    let trace = train(&circ, &layout, &h, &tc)?;
    let wall_ms = if cfg.wall_time {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    };
    Ok(Run {
        cell: cell.clone(),
        trace,
        wall_ms,
    })
}

/// Trains every cell, in parallel, and returns the runs in input order.
pub fn run_cells(cfg: &ExperimentConfig, cells: &[Cell]) -> Result<Vec<Run>> {
    cells.par_iter().map(|c| train_cell(cfg, c)).collect()
}

/// Cartesian product of the configured grids, seeds innermost.
pub fn training_cells(cfg: &ExperimentConfig) -> Vec<Cell> {
    let mut cells = Vec::new();
    for ansatz in &cfg.ansatz {
        let depths: &[usize] = if ansatz == "xy" { &cfg.depths } else { &[1] };
        for &chain_length in &cfg.chain_lengths {
            for &depth in depths {
                for &order in &cfg.orders {
                    for &beta in &cfg.betas {
                        for seed in cfg.seeds() {
                            cells.push(Cell {
                                model: cfg.model.clone(),
                                ansatz: ansatz.clone(),
                                chain_length,
                                n_ancilla: cfg.n_ancilla,
                                depth,
                                order,
                                beta,
                                seed,
                            });
                        }
                    }
                }
            }
        }
    }
    cells
}

pub fn result_rows(id: ExperimentId, runs: &[Run]) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for run in runs {
        let c = &run.cell;
        let row = |iteration, loss, fidelity| ResultRow {
            experiment: id.to_string(),
            model: c.model_column(),
            chain_length: c.chain_length,
            n_ancilla: c.n_ancilla,
            n_system: c.chain_length,
            depth: c.depth_column(),
            order: c.order,
            beta: c.beta,
            seed: c.seed,
            iteration,
            loss,
            fidelity,
            wall_time_ms: run.wall_ms,
        };
        rows.push(row(0, run.trace.initial_loss, run.trace.initial_fidelity));
        rows.extend(run.trace.records.iter().map(|r| row(r.iteration, r.loss, r.fidelity)));
    }
    rows
}

/// Restart statistics of one grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupStats {
    pub cell: Cell,
    pub runs: usize,
    pub best_seed: u64,
    pub best: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub best_loss: f64,
    pub best_iterations: usize,
}

/// Groups runs by everything except the seed, keeping first-seen order.
pub fn group_stats(runs: &[Run]) -> Vec<GroupStats> {
    let mut order = Vec::new();
    let mut groups: BTreeMap<_, Vec<&Run>> = BTreeMap::new();
    for run in runs {
        let key = run.cell.group_key();
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(run);
    }
    order
        .into_iter()
        .map(|key| {
            let members = &groups[&key];
            let mut fids: Vec<f64> = members.iter().map(|r| r.trace.final_fidelity()).collect();
            fids.sort_by(f64::total_cmp);
            let best = members
                .iter()
                .copied()
                .max_by(|a, b| {
                    a.trace
                        .final_fidelity()
                        .total_cmp(&b.trace.final_fidelity())
                        .then(b.cell.seed.cmp(&a.cell.seed))
                })
                .expect("groups are nonempty");
            GroupStats {
                cell: best.cell.clone(),
                runs: members.len(),
                best_seed: best.cell.seed,
                best: best.trace.final_fidelity(),
                median: quantile(&fids, 0.5),
                q1: quantile(&fids, 0.25),
                q3: quantile(&fids, 0.75),
                min: fids[0],
                best_loss: best.trace.final_loss(),
                best_iterations: best.trace.iterations,
            }
        })
        .collect()
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

const SUMMARY_HEADER: [&str; 18] = [
    "experiment",
    "model",
    "L",
    "n_A",
    "n_B",
    "d",
    "K",
    "beta",
    "runs",
    "best_seed",
    "best_fidelity",
    "median_fidelity",
    "q1_fidelity",
    "q3_fidelity",
    "min_fidelity",
    "best_loss",
    "best_iterations",
    "log2_best_infidelity",
];

fn summary_table(id: ExperimentId, stats: &[GroupStats]) -> Table {
    let mut table = Table::new("summary", &SUMMARY_HEADER);
    for s in stats {
        let c = &s.cell;
        table.rows.push(vec![
            id.to_string(),
            c.model_column(),
            c.chain_length.to_string(),
            c.n_ancilla.to_string(),
            c.chain_length.to_string(),
            c.depth_column().to_string(),
            c.order.to_string(),
            fmt_float(c.beta),
            s.runs.to_string(),
            s.best_seed.to_string(),
            fmt_float(s.best),
            fmt_float(s.median),
            fmt_float(s.q1),
            fmt_float(s.q3),
            fmt_float(s.min),
            fmt_float(s.best_loss),
            s.best_iterations.to_string(),
            fmt_float((1.0 - s.best).max(f64::MIN_POSITIVE).log2()),
        ]);
    }
    table
}

fn training_report(cfg: &ExperimentConfig) -> Result<(Report, Vec<GroupStats>)> {
    let runs = run_cells(cfg, &training_cells(cfg))?;
    let stats = group_stats(&runs);
    let report = Report {
        config: cfg.clone(),
        main: Table::from_results(&result_rows(cfg.id, &runs)),
        extra: vec![summary_table(cfg.id, &stats)],
        checks: Vec::new(),
        runs,
    };
    Ok((report, stats))
}

fn find(stats: &[GroupStats], pred: impl Fn(&Cell) -> bool) -> Vec<&GroupStats> {
    stats.iter().filter(|s| pred(&s.cell)).collect()
}

fn threshold(name: String, value: f64, floor: f64) -> Check {
    Check::new(name, true, value >= floor, format!("{value:.5} >= {floor}"))
}

/// Distance from `theta` to the nearest `π/2 + kπ`.
pub fn distance_to_half_pi(theta: f64) -> f64 {
    let r = (theta - FRAC_PI_2).rem_euclid(PI);
    r.min(PI - r)
}

/// Trained angle of the lowest-loss restart in `cell`'s group versus `π/2 + kπ`.
fn theta_check(runs: &[Run], cell: &Cell) -> Check {
    let best = runs
        .iter()
        .filter(|r| r.cell.group_key() == cell.group_key())
        .min_by(|a, b| a.trace.final_loss().total_cmp(&b.trace.final_loss()))
        .expect("group has runs");
    let off = distance_to_half_pi(best.trace.theta[0]);
    Check::new(
        format!(
            "ising1 L={} beta={}: trained theta near pi/2 mod pi",
            cell.chain_length, cell.beta
        ),
        true,
        off <= 1e-2,
        format!("seed {}: |theta - (pi/2 + k pi)| = {off:.2e} <= 1e-2", best.cell.seed),
    )
}

/// Runs the experiment selected by `cfg.id`.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    match cfg.id {
        ExperimentId::IsingSweep => ising_sweep(cfg),
        ExperimentId::IsingScaling => ising_scaling(cfg),
        ExperimentId::XySweep => xy_sweep(cfg),
        ExperimentId::KOrderStudy => k_order_study(cfg),
        ExperimentId::Prop1Check => prop1_check(cfg),
        ExperimentId::Prop2Curve => prop2_curve(cfg),
        ExperimentId::BoundsTable => bounds_table(cfg),
    }
}

fn is_ising_reference(c: &Cell) -> bool {
    c.model == "ising" && c.chain_length == 5 && c.order == 2
}

pub fn ising_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    let (mut report, stats) = training_report(cfg)?;
    let mut checks = Vec::new();
    for s in find(&stats, |c| is_ising_reference(c) && c.ansatz == "ising6") {
        let b = s.cell.beta;
        if b == 1.2 {
            let at30 = report
                .runs
                .iter()
                .filter(|r| r.cell.group_key() == s.cell.group_key())
                .map(|r| r.fidelity_at(30))
                .fold(0.0, f64::max);
            checks.push(threshold(
                format!("ising6 beta={b}: best fidelity after 30 iterations"),
                at30,
                0.95,
            ));
        }
        if b >= 2.0 {
            checks.push(threshold(format!("ising6 beta={b}: best final fidelity"), s.best, 0.99));
        }
    }
    for s1 in find(&stats, |c| is_ising_reference(c) && c.ansatz == "ising1") {
        let b = s1.cell.beta;
        checks.push(theta_check(&report.runs, &s1.cell));
        if let Some(s6) = find(&stats, |c| is_ising_reference(c) && c.ansatz == "ising6" && c.beta == b).first() {
            let gap = (s6.best - s1.best).abs();
            checks.push(Check::new(
                format!("ising1 vs ising6 beta={b}: same final fidelity"),
                true,
                gap <= 0.005,
                format!("|{:.5} - {:.5}| = {gap:.2e} <= 0.005", s1.best, s6.best),
            ));
        }
    }
    report.checks = checks;
    Ok(report)
}

pub fn ising_scaling(cfg: &ExperimentConfig) -> Result<Report> {
    let (mut report, stats) = training_report(cfg)?;
    let mut checks = Vec::new();
    let k2 = |c: &Cell| c.model == "ising" && c.order == 2;
    for s in find(&stats, |c| k2(c) && c.beta >= 2.0) {
        checks.push(threshold(
            format!("L={} beta={}: best final fidelity", s.cell.chain_length, s.cell.beta),
            s.best,
            0.99,
        ));
    }
    // Converged fidelities can differ by optimizer noise once both are ~1.
    const SLACK: f64 = 1e-4;
    for &l in &cfg.chain_lengths {
        let row = find(&stats, |c| k2(c) && c.chain_length == l);
        let mut by_beta: Vec<_> = row.iter().map(|s| (s.cell.beta, s.best)).collect();
        by_beta.sort_by(|a, b| a.0.total_cmp(&b.0));
        if by_beta.len() > 1 {
            let ok = by_beta.windows(2).all(|w| w[1].1 >= w[0].1 - SLACK);
            let detail = by_beta
                .iter()
                .map(|(b, f)| format!("{b}:{f:.5}"))
                .collect::<Vec<_>>()
                .join(" ");
            checks.push(Check::new(
                format!("L={l}: fidelity nondecreasing in beta"),
                true,
                ok,
                detail,
            ));
        }
    }
    let (lmin, lmax) = (cfg.chain_lengths.iter().min(), cfg.chain_lengths.iter().max());
    if let (Some(&lmin), Some(&lmax)) = (lmin, lmax) {
        if lmin < lmax {
            for &b in &cfg.betas {
                let f = |l| {
                    find(&stats, |c| k2(c) && c.chain_length == l && c.beta == b)
                        .first()
                        .map(|s| s.best)
                };
                if let (Some(small), Some(large)) = (f(lmin), f(lmax)) {
                    checks.push(Check::new(
                        format!("beta={b}: fidelity at L={lmax} not above L={lmin}"),
                        true,
                        large <= small + SLACK,
                        format!("{large:.6} <= {small:.6}"),
                    ));
                }
            }
        }
    }
    report.checks = checks;
    Ok(report)
}

pub fn xy_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    let (mut report, stats) = training_report(cfg)?;
    let mut checks = Vec::new();
    let reference = |c: &Cell| c.model == "xy" && c.chain_length == 5 && c.n_ancilla == 1 && c.order == 2;
    for s in find(&stats, |c| reference(c) && c.depth == 4) {
        let floor = match s.cell.beta {
            b if b >= 4.0 => 0.99,
            b if b >= 2.0 => 0.98,
            b if b >= 1.5 => 0.95,
            _ => continue,
        };
        checks.push(threshold(
            format!("d=4 beta={}: best fidelity", s.cell.beta),
            s.best,
            floor,
        ));
    }
    let median = |d| {
        find(&stats, |c| reference(c) && c.depth == d && c.beta == 2.0)
            .first()
            .map(|s| s.median)
    };
    if let (Some(m3), Some(m6)) = (median(3), median(6)) {
        checks.push(Check::new(
            "beta=2: median fidelity at d=6 not below d=3",
            true,
            m6 >= m3,
            format!("{m6:.5} >= {m3:.5}"),
        ));
    }
    report.checks = checks;
    Ok(report)
}

pub fn k_order_study(cfg: &ExperimentConfig) -> Result<Report> {
    let (mut report, stats) = training_report(cfg)?;
    let mut checks = Vec::new();
    for &b in &cfg.betas {
        let mut by_k: Vec<_> = find(&stats, |c| c.beta == b)
            .iter()
            .map(|s| (s.cell.order, s.median))
            .collect();
        by_k.sort_by_key(|p| p.0);
        if by_k.len() > 1 {
            let ok = by_k.windows(2).all(|w| w[1].1 >= w[0].1);
            let detail = by_k
                .iter()
                .map(|(k, m)| format!("K={k}:{m:.5}"))
                .collect::<Vec<_>>()
                .join(" ");
            checks.push(Check::new(
                format!("beta={b}: median fidelity nondecreasing in K"),
                true,
                ok,
                detail,
            ));
        }
    }
    for s in find(&stats, |c| c.beta == 0.3 && c.order >= 2) {
        checks.push(threshold(
            format!("K={} beta=0.3: median fidelity", s.cell.order),
            s.median,
            0.98,
        ));
    }
    for s in find(&stats, |c| c.beta == 0.1 && c.order == 2) {
        checks.push(Check::new(
            "K=2 beta=0.1: every run",
            false,
            s.min >= 0.90,
            format!("min {:.5} >= 0.90", s.min),
        ));
    }
    report.checks = checks;
    Ok(report)
}

/// Scans `θ ∈ [0, 2π)` on the one-parameter Ising ansatz and trains it.
pub fn prop1_check(cfg: &ExperimentConfig) -> Result<Report> {
    let mut cfg1 = cfg.clone();
    cfg1.model = "ising".into();
    cfg1.ansatz = vec!["ising1".into()];
    cfg1.n_ancilla = 1;
    let (mut report, _) = training_report(&cfg1)?;
    report.config = cfg.clone();

    let steps = (2.0 * PI / cfg.theta_resolution).round() as usize;
    let mut scan = Table::new("scan", &["L", "beta", "theta", "free_energy", "truncated_free_energy"]);
    let mut checks = Vec::new();
    for &l in &cfg.chain_lengths {
        let layout = RegisterLayout::new(1, l)?;
        let h = PauliHamiltonian::from_model_name("ising", l)?;
        let circ = build_ansatz("ising1", &layout, 1)?;
        for &beta in &cfg.betas {
            let points: Vec<(f64, f64, f64)> = (0..steps)
                .into_par_iter()
                .map(|i| -> Result<_> {
                    let theta = 2.0 * PI * i as f64 / steps as f64;
                    let state = output_factor(&circ, &[theta], &layout)?;
                    let exact = free_energy(&h, &state.to_density(), beta)?;
                    let truncated = truncated_free_energy_factor(&h, &state, beta, 2)?;
                    Ok((theta, exact, truncated))
                })
                .collect::<Result<_>>()?;
            for &(theta, exact, truncated) in &points {
                scan.rows.push(vec![
                    l.to_string(),
                    fmt_float(beta),
                    fmt_float(theta),
                    fmt_float(exact),
                    fmt_float(truncated),
                ]);
            }
            let argmin = |pick: fn(&(f64, f64, f64)) -> f64| {
                points
                    .iter()
                    .min_by(|a, b| pick(a).total_cmp(&pick(b)))
                    .expect("grid is nonempty")
                    .0
            };
            for (label, theta) in [("F", argmin(|p| p.1)), ("F_2", argmin(|p| p.2))] {
                let off = distance_to_half_pi(theta);
                checks.push(Check::new(
                    format!("L={l} beta={beta}: argmin of {label} at pi/2 mod pi"),
                    true,
                    off <= cfg.theta_resolution,
                    format!("theta = {theta:.6}, off by {off:.2e} <= {}", cfg.theta_resolution),
                ));
            }
        }
    }
    for s in group_stats(&report.runs) {
        checks.push(theta_check(&report.runs, &s.cell));
    }
    report.extra.push(scan);
    report.checks = checks;
    Ok(report)
}

/// Fidelity of the cat-state mixture `ρ_B(π/2)` against the closed-form floor.
pub fn prop2_curve(cfg: &ExperimentConfig) -> Result<Report> {
    let mut rows = Vec::new();
    let mut curve = Table::new("bound", &["L", "N", "gap", "beta", "bound", "empirical"]);
    let mut checks = Vec::new();
    let closed = prop2_fidelity_bound(32, 1.25, 4.0)?;
    checks.push(Check::new(
        "closed form at N=32, beta=1.25, gap=4",
        true,
        (closed - 0.953).abs() <= 1e-3,
        format!("{closed:.5} = 0.953 +- 0.001"),
    ));
    for &l in &cfg.chain_lengths {
        let layout = RegisterLayout::new(1, l)?;
        let h = PauliHamiltonian::from_model_name("ising", l)?;
        let gap = spectral_gap(&h)?;
        let circ = build_ansatz("ising1", &layout, 1)?;
        let state = output_factor(&circ, &[FRAC_PI_2], &layout)?;
        let dim = 1usize << l;
        for &beta in &cfg.betas {
            let empirical = state.fidelity(&gibbs_state(&h, beta)?)?;
            let bound = prop2_fidelity_bound(dim, beta, gap)?;
            curve.rows.push(vec![
                l.to_string(),
                dim.to_string(),
                fmt_float(gap),
                fmt_float(beta),
                fmt_float(bound),
                fmt_float(empirical),
            ]);
            rows.push(ResultRow {
                experiment: cfg.id.to_string(),
                model: "ising/ising1".into(),
                chain_length: l,
                n_ancilla: 1,
                n_system: l,
                depth: 0,
                order: 2,
                beta,
                seed: 0,
                iteration: 0,
                loss: truncated_free_energy_factor(&h, &state, beta, 2)?,
                fidelity: empirical,
                wall_time_ms: 0.0,
            });
            checks.push(Check::new(
                format!("L={l} beta={beta}: empirical fidelity above bound"),
                true,
                empirical >= bound,
                format!("{empirical:.5} >= {bound:.5}"),
            ));
            if l == 5 && (beta == 1.2 || beta == 1.25) {
                let floor = if beta == 1.2 { 0.95 } else { 0.953 };
                checks.push(threshold(
                    format!("L=5 beta={beta}: empirical fidelity"),
                    empirical,
                    floor,
                ));
            }
        }
    }
    Ok(Report {
        config: cfg.clone(),
        main: Table::from_results(&rows),
        extra: vec![curve],
        checks,
        runs: Vec::new(),
    })
}

const BOUNDS_HEADER: [&str; 8] = [
    "K",
    "r",
    "beta",
    "eps",
    "delta_star",
    "truncation_bound",
    "fidelity_floor",
    "vacuous",
];

/// Tabulates the truncation and fidelity bounds over the configured grids.
pub fn bounds_table(cfg: &ExperimentConfig) -> Result<Report> {
    let mut table = Table::new("", &BOUNDS_HEADER);
    let mut reports = Vec::new();
    for &k in &cfg.bound_orders {
        for &r in &cfg.bound_ranks {
            for &beta in &cfg.bound_betas {
                for &eps in &cfg.bound_eps {
                    let b = fidelity_floor_theorem1(k, r, beta, eps)?;
                    table.rows.push(vec![
                        k.to_string(),
                        r.to_string(),
                        fmt_float(beta),
                        fmt_float(eps),
                        fmt_float(b.delta_star),
                        fmt_float(b.truncation_bound),
                        fmt_float(b.fidelity_floor),
                        b.vacuous.to_string(),
                    ]);
                    reports.push(b);
                }
            }
        }
    }
    let mut checks = Vec::new();
    let deltas: Vec<f64> = cfg
        .bound_orders
        .iter()
        .map(|&k| delta_star(k))
        .collect::<std::result::Result<_, _>>()?;
    checks.push(Check::new(
        "delta_star inside (0, 1/e)",
        false,
        deltas.iter().all(|&d| d > 0.0 && d < (-1.0f64).exp()),
        format!("{deltas:.6?}"),
    ));
    // (rank, beta, eps) -> [(K, truncation bound, fidelity floor)]
    type Series = BTreeMap<(usize, u64, u64), Vec<(usize, f64, f64)>>;
    let mut series = Series::new();
    for b in &reports {
        series
            .entry((b.rank, b.beta.to_bits(), b.eps.to_bits()))
            .or_default()
            .push((b.order, b.truncation_bound, b.fidelity_floor));
    }
    let mut bound_ok = true;
    let mut floor_ok = true;
    for points in series.values_mut() {
        points.sort_by_key(|p| p.0);
        bound_ok &= points.windows(2).all(|w| w[1].1 <= w[0].1);
        floor_ok &= points.windows(2).all(|w| w[1].2 >= w[0].2);
    }
    checks.push(Check::new("truncation bound nonincreasing in K", false, bound_ok, ""));
    checks.push(Check::new("fidelity floor nondecreasing in K", false, floor_ok, ""));
    Ok(Report {
        config: cfg.clone(),
        main: table,
        extra: Vec::new(),
        checks,
        runs: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile(&v, 0.5), 2.5);
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(quantile(&[7.0], 0.25), 7.0);
    }

    #[test]
    fn half_pi_distance_wraps() {
        assert!(distance_to_half_pi(FRAC_PI_2) < 1e-15);
        assert!(distance_to_half_pi(3.0 * FRAC_PI_2 + 0.01) - 0.01 < 1e-12);
        assert!((distance_to_half_pi(0.0) - FRAC_PI_2).abs() < 1e-15);
        assert!(distance_to_half_pi(-FRAC_PI_2 - 0.002) - 0.002 < 1e-12);
    }

    #[test]
    fn cells_cover_the_grid() {
        let cfg = ExperimentConfig::defaults(ExperimentId::XySweep);
        let cells = training_cells(&cfg);
        assert_eq!(cells.len(), 4 * 4 * 5);
        assert!(cells.iter().all(|c| c.chain_length == 5 && c.n_ancilla == 1));
        let ising = training_cells(&ExperimentConfig::defaults(ExperimentId::IsingSweep));
        assert_eq!(ising.len(), 2 * 5 * 5);
        assert!(ising.iter().all(|c| c.depth_column() == 0));
    }

    #[test]
    fn bounds_table_is_well_formed() {
        let report = run(&ExperimentConfig::defaults(ExperimentId::BoundsTable)).unwrap();
        assert_eq!(report.main.rows.len(), 8 * 3);
        assert!(report.checks.iter().all(|c| c.passed), "{:?}", report.checks);
    }

    #[test]
    fn prop2_curve_passes() {
        let report = run(&ExperimentConfig::defaults(ExperimentId::Prop2Curve)).unwrap();
        assert!(report.passed(), "{:?}", report.checks);
        assert_eq!(report.main.rows.len(), 6);
    }
}
