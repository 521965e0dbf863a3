//! One function per subcommand, each returning a typed, renderable result.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use dilemma_core::erc::{equilibrium_report, is_equilibrium_profile};
use dilemma_core::institutions::{default_c, solve_t, sweep, table1_d0, TABLE1_N};
use dilemma_core::simulate::{best_response_dynamics, mc_participation, random_profile, SimRecord};
use dilemma_core::{
    EquilibriumReport, GameParams, InstitutionSolution, Population, Regime, SimConfig, Strategy,
    StructureReport,
};

use crate::config::{CommandKind, Format, RunConfig};
use crate::error::CliError;
use crate::output::{echo3, full, render, to_json_value, Render, Table};

/// Parameters of the payoff figure: `d = 2.2827`, `c = 4.2827`, `n = 25`.
pub const FIG1_N: usize = 25;
pub const FIG1_C: f64 = 4.2827;
pub const FIG1_D: f64 = 2.2827;

pub const FIG2_N_MIN: usize = 3;
pub const FIG2_N_MAX: usize = 100;

pub const MC_DEFAULT_TRIALS: u64 = 1_000_000;
pub const MC_DEFAULT_SHARDS: usize = 8;
pub const DYNAMICS_DEFAULT_RUNS: u64 = 100;
pub const DYNAMICS_MAX_ROUNDS: usize = 100;

fn regime_name(r: Regime) -> &'static str {
    match r {
        Regime::FullParticipation => "FullParticipation",
        Regime::Mixed => "Mixed",
    }
}

fn error_tag(e: &dilemma_core::Error) -> String {
    let msg = e.to_string();
    let name = msg.split(':').next().unwrap_or("Error");
    format!("error:{name}")
}

fn load_population(path: &Path) -> Result<Population, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Population(format!("{}: {e}", path.display())))?;
    let pop: Population = serde_json::from_str(&text)
        .map_err(|e| CliError::Population(format!("{}: {e}", path.display())))?;
    Population::new(pop.types).map_err(CliError::from)
}

fn population_for(cfg: &RunConfig, n: usize) -> Result<Population, CliError> {
    match &cfg.population {
        Some(path) => {
            let pop = load_population(path)?;
            if pop.len() != n {
                return Err(dilemma_core::Error::LengthMismatch {
                    expected: n,
                    actual: pop.len(),
                }
                .into());
            }
            Ok(pop)
        }
        None => Ok(Population::selfish(n)),
    }
}

// analyze

#[derive(Clone, Debug, Serialize)]
pub struct AnalyzeReport {
    pub game: GameParams,
    pub structure: StructureReport,
    pub institution: InstitutionSolution,
    pub erc: EquilibriumReport,
}

pub fn cmd_analyze(
    n: usize,
    c: f64,
    d: f64,
    pop: Option<Population>,
) -> Result<AnalyzeReport, CliError> {
    let g = GameParams::new(n, c, d)?;
    let pop = pop.unwrap_or_else(|| Population::selfish(n));
    Ok(AnalyzeReport {
        structure: g.check_structure(),
        institution: solve_t(&g)?,
        erc: equilibrium_report(&g, &pop)?,
        game: g,
    })
}

impl Render for AnalyzeReport {
    fn table(&self) -> Table {
        let g = &self.game;
        let s = &self.structure;
        let i = &self.institution;
        let b = |v: bool| v.to_string();
        let mut t = Table::new(["key", "value"]);
        let kv: Vec<(&str, String)> = vec![
            ("n", g.n().to_string()),
            ("c", full(g.c())),
            ("d", full(g.d())),
            ("e", full(g.e())),
            ("phi", full(g.phi())),
            ("alpha", full(g.alpha())),
            ("k_star", g.k_star().to_string()),
            ("dominance", b(s.dominance)),
            ("monotonicity", b(s.monotonicity)),
            ("nonnegativity", b(s.nonnegativity)),
            ("pareto_relation", b(s.pareto_relation)),
            ("desirability", b(s.desirability)),
            ("k_star_sandwich", b(s.k_star_sandwich)),
            ("beta", full(i.beta)),
            ("regime", regime_name(i.regime).into()),
            ("t", full(i.t)),
            ("p_A", full(i.p_agree)),
            ("p_I", full(i.p_insider)),
            ("p_F", full(i.p_freerider)),
            (
                "min_supportable_coalition",
                self.erc
                    .min_supportable_coalition
                    .map(|k| k.to_string())
                    .unwrap_or_default(),
            ),
            (
                "equilibrium_sizes",
                self.erc
                    .equilibrium_sizes
                    .iter()
                    .map(|k| k.to_string())
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
        ];
        for (k, v) in kv {
            t.push(vec![k.into(), v]);
        }
        t
    }

    fn json(&self) -> Result<serde_json::Value, CliError> {
        to_json_value(self)
    }
}

// table1

#[derive(Clone, Debug, Serialize)]
pub struct Table1Row {
    pub n: usize,
    #[serde(flatten)]
    pub solution: Option<InstitutionSolution>,
    pub status: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1 {
    pub d0: f64,
    pub rows: Vec<Table1Row>,
}

pub fn cmd_table1(d0: f64, ns: &[usize]) -> Table1 {
    let rows = sweep(d0, ns)
        .into_iter()
        .map(|(n, r)| match r {
            Ok(sol) => Table1Row {
                n,
                solution: Some(sol),
                status: "ok".into(),
            },
            Err(e) => {
                log::info!("table1: skipping n = {n}: {e}");
                Table1Row {
                    n,
                    solution: None,
                    status: error_tag(&e),
                }
            }
        })
        .collect();
    Table1 { d0, rows }
}

impl Render for Table1 {
    fn table(&self) -> Table {
        let mut t = Table::new([
            "n", "k_star", "beta", "t", "p_A", "p_I", "p_F", "regime", "beta_3dp", "t_3dp",
            "p_A_3dp", "p_I_3dp", "p_F_3dp", "status",
        ]);
        for row in &self.rows {
            let mut cells = vec![row.n.to_string()];
            match &row.solution {
                Some(s) => {
                    let vals = [s.beta, s.t, s.p_agree, s.p_insider, s.p_freerider];
                    cells.push(s.k_star.to_string());
                    cells.extend(vals.iter().map(|&v| full(v)));
                    cells.push(regime_name(s.regime).into());
                    cells.extend(vals.iter().map(|&v| echo3(v)));
                }
                None => cells.extend(std::iter::repeat_n(String::new(), 12)),
            }
            cells.push(row.status.clone());
            t.push(cells);
        }
        t
    }

    fn json(&self) -> Result<serde_json::Value, CliError> {
        to_json_value(self)
    }
}

// fig1

#[derive(Clone, Debug, Serialize)]
pub struct Fig1Point {
    pub k: usize,
    pub payoff_nc: f64,
    pub payoff_c: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig1 {
    pub game: GameParams,
    pub points: Vec<Fig1Point>,
    /// First `k` with `f(NC, k) > f(C, 0)`; equals `k* - 1`.
    pub crossing_k: Option<usize>,
    pub baseline: f64,
}

pub fn cmd_fig1(n: usize, c: f64, d: f64) -> Result<Fig1, CliError> {
    let g = GameParams::new(n, c, d)?;
    let points: Vec<Fig1Point> = (0..n)
        .map(|k| -> Result<_, CliError> {
            Ok(Fig1Point {
                k,
                payoff_nc: g.payoff(Strategy::NC, k)?,
                payoff_c: g.payoff(Strategy::C, k)?,
            })
        })
        .collect::<Result<_, _>>()?;
    let baseline = g.payoff(Strategy::C, 0)?;
    let crossing_k = points.iter().find(|p| p.payoff_nc > baseline).map(|p| p.k);
    Ok(Fig1 {
        game: g,
        points,
        crossing_k,
        baseline,
    })
}

impl Render for Fig1 {
    fn table(&self) -> Table {
        let mut t = Table::new(["kind", "k", "payoff_NC", "payoff_C"]);
        for p in &self.points {
            t.push(vec![
                "payoff".into(),
                p.k.to_string(),
                full(p.payoff_nc),
                full(p.payoff_c),
            ]);
        }
        if let Some(k) = self.crossing_k {
            // NC payoff at the crossing against the all-C baseline f(C, 0)
            t.push(vec![
                "crossing".into(),
                k.to_string(),
                full(self.points[k].payoff_nc),
                full(self.baseline),
            ]);
        }
        t
    }

    fn json(&self) -> Result<serde_json::Value, CliError> {
        to_json_value(self)
    }
}

// fig2

#[derive(Clone, Debug, Serialize)]
pub struct Fig2Point {
    pub n: usize,
    pub t: Option<f64>,
    pub regime: Option<Regime>,
    pub status: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Fig2 {
    pub d0: f64,
    pub points: Vec<Fig2Point>,
}

pub fn cmd_fig2(d0: f64, n_min: usize, n_max: usize) -> Fig2 {
    let ns: Vec<usize> = (n_min..=n_max).collect();
    let points = sweep(d0, &ns)
        .into_iter()
        .map(|(n, r)| match r {
            Ok(s) => Fig2Point {
                n,
                t: Some(s.t),
                regime: Some(s.regime),
                status: "ok".into(),
            },
            Err(e) => Fig2Point {
                n,
                t: None,
                regime: None,
                status: error_tag(&e),
            },
        })
        .collect();
    Fig2 { d0, points }
}

impl Render for Fig2 {
    fn table(&self) -> Table {
        let mut t = Table::new(["n", "t", "t_3dp", "regime", "status"]);
        for p in &self.points {
            t.push(vec![
                p.n.to_string(),
                p.t.map(full).unwrap_or_default(),
                p.t.map(echo3).unwrap_or_default(),
                p.regime.map(regime_name).unwrap_or_default().into(),
                p.status.clone(),
            ]);
        }
        t
    }

    fn json(&self) -> Result<serde_json::Value, CliError> {
        to_json_value(self)
    }
}

// mc

#[derive(Clone, Debug, Serialize)]
pub struct McOutput {
    pub n: usize,
    pub c: f64,
    pub d: f64,
    pub k_star: usize,
    pub t: f64,
    pub shards: usize,
    pub records: Vec<McRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct McRecord {
    #[serde(flatten)]
    pub record: SimRecord,
    /// Binomial closed form at the same `t`.
    pub closed_form: f64,
}

pub fn cmd_mc(
    n: usize,
    c: f64,
    d: f64,
    t: Option<f64>,
    cfg: SimConfig,
) -> Result<McOutput, CliError> {
    let g = GameParams::new(n, c, d)?;
    let t = match t {
        Some(t) => t,
        None => solve_t(&g)?.t,
    };
    log::info!(
        "mc: n = {n}, t = {t}, trials = {}, shards = {}",
        cfg.trials,
        cfg.shards
    );
    let report = mc_participation(&g, t, cfg)?;
    let (pa, pi, pf) = dilemma_core::institutions::participation_probabilities(&g, t)?;
    let records = report
        .records()
        .into_iter()
        .zip([pa, pi, pf])
        .map(|(record, closed_form)| McRecord {
            record,
            closed_form,
        })
        .collect();
    Ok(McOutput {
        n,
        c: g.c(),
        d: g.d(),
        k_star: g.k_star(),
        t,
        shards: cfg.shards,
        records,
    })
}

impl Render for McOutput {
    fn table(&self) -> Table {
        let mut t = Table::new([
            "quantity",
            "estimate",
            "stderr",
            "closed_form",
            "trials",
            "seed",
            "rng_algorithm",
        ]);
        for r in &self.records {
            t.push(vec![
                r.record.quantity.into(),
                full(r.record.estimate),
                full(r.record.stderr),
                full(r.closed_form),
                r.record.trials.to_string(),
                r.record.seed.to_string(),
                r.record.rng_algorithm.into(),
            ]);
        }
        t
    }

    fn json(&self) -> Result<serde_json::Value, CliError> {
        to_json_value(self)
    }
}

// dynamics

#[derive(Clone, Debug, Serialize)]
pub struct DynamicsRun {
    pub initial_nc: usize,
    pub rounds: usize,
    pub fixed_point: bool,
    pub final_nc: usize,
    pub is_equilibrium: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DynamicsSummary {
    pub n: usize,
    pub seed: u64,
    pub max_rounds: usize,
    pub runs: Vec<DynamicsRun>,
}

impl DynamicsSummary {
    pub fn all_fixed_points_are_equilibria(&self) -> bool {
        self.runs.iter().all(|r| !r.fixed_point || r.is_equilibrium)
    }
}

pub fn cmd_dynamics(
    g: &GameParams,
    pop: &Population,
    seed: u64,
    runs: u64,
) -> Result<DynamicsSummary, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(runs as usize);
    for _ in 0..runs {
        let initial = random_profile(g.n(), &mut rng);
        let trace = best_response_dynamics(g, pop, &initial, DYNAMICS_MAX_ROUNDS)?;
        out.push(DynamicsRun {
            initial_nc: initial.nc_count(),
            rounds: trace.rounds,
            fixed_point: trace.fixed_point,
            final_nc: trace.final_profile.nc_count(),
            is_equilibrium: is_equilibrium_profile(g, pop, &trace.final_profile)?,
        });
    }
    Ok(DynamicsSummary {
        n: g.n(),
        seed,
        max_rounds: DYNAMICS_MAX_ROUNDS,
        runs: out,
    })
}

impl Render for DynamicsSummary {
    fn table(&self) -> Table {
        let mut t = Table::new([
            "run",
            "initial_nc",
            "rounds",
            "fixed_point",
            "final_nc",
            "is_equilibrium",
        ]);
        for (i, r) in self.runs.iter().enumerate() {
            t.push(vec![
                i.to_string(),
                r.initial_nc.to_string(),
                r.rounds.to_string(),
                r.fixed_point.to_string(),
                r.final_nc.to_string(),
                r.is_equilibrium.to_string(),
            ]);
        }
        t
    }

    fn json(&self) -> Result<serde_json::Value, CliError> {
        let mut v = to_json_value(self)?;
        v["all_fixed_points_are_equilibria"] = json!(self.all_fixed_points_are_equilibria());
        Ok(v)
    }
}

/// Validates `cfg`, runs the selected command and renders its output.
pub fn run(cfg: &RunConfig) -> Result<String, CliError> {
    cfg.validate()?;
    let d0 = cfg.d0.unwrap_or_else(table1_d0);
    match cfg.command {
        CommandKind::Analyze => {
            let n = cfg.n.expect("validated");
            let pop = match &cfg.population {
                Some(_) => Some(population_for(cfg, n)?),
                None => None,
            };
            let r = cmd_analyze(n, cfg.c.expect("validated"), cfg.d.expect("validated"), pop)?;
            render(&r, cfg.format_or(Format::Json))
        }
        CommandKind::Table1 => {
            let ns: Vec<usize> = match (cfg.n_min, cfg.n_max) {
                (None, None) => TABLE1_N.to_vec(),
                (lo, hi) => (lo.unwrap_or(3)..=hi.unwrap_or(50)).collect(),
            };
            render(&cmd_table1(d0, &ns), cfg.format_or(Format::Csv))
        }
        CommandKind::Fig1 => {
            let r = cmd_fig1(
                cfg.n.unwrap_or(FIG1_N),
                cfg.c.unwrap_or(FIG1_C),
                cfg.d.unwrap_or(FIG1_D),
            )?;
            render(&r, cfg.format_or(Format::Csv))
        }
        CommandKind::Fig2 => {
            let r = cmd_fig2(
                d0,
                cfg.n_min.unwrap_or(FIG2_N_MIN),
                cfg.n_max.unwrap_or(FIG2_N_MAX),
            );
            render(&r, cfg.format_or(Format::Csv))
        }
        CommandKind::Mc => {
            let d = cfg.d.unwrap_or(d0);
            let sim = SimConfig::new(
                cfg.trials.unwrap_or(MC_DEFAULT_TRIALS),
                cfg.seed.unwrap_or(0),
                cfg.shards.unwrap_or(MC_DEFAULT_SHARDS),
            );
            let r = cmd_mc(
                cfg.n.expect("validated"),
                cfg.c.unwrap_or_else(|| default_c(d)),
                d,
                cfg.t,
                sim,
            )?;
            render(&r, cfg.format_or(Format::Json))
        }
        CommandKind::Dynamics => {
            let n = cfg.n.expect("validated");
            let d = cfg.d.unwrap_or(d0);
            let g = GameParams::new(n, cfg.c.unwrap_or_else(|| default_c(d)), d)?;
            let pop = population_for(cfg, n)?;
            let r = cmd_dynamics(
                &g,
                &pop,
                cfg.seed.unwrap_or(0),
                cfg.trials.unwrap_or(DYNAMICS_DEFAULT_RUNS),
            )?;
            render(&r, cfg.format_or(Format::Json))
        }
    }
}
