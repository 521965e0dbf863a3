//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use dilemma_cli::commands::{cmd_fig1, cmd_mc, cmd_table1, FIG1_C, FIG1_D, FIG1_N};
use dilemma_cli::output::render;
use dilemma_cli::Format;
use dilemma_core::erc::{delta, is_equilibrium_profile, necessary_condition_value};
use dilemma_core::institutions::{
    beta, beta_upper_bound, default_c, participation_probabilities_for, solve_t, solve_t_with,
    table1_d0, TABLE1_N,
};
use dilemma_core::simulate::{best_response_dynamics, mc_participation, random_profile};
use dilemma_core::{GameParams, Population, SimConfig, SolveOptions, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

const GRID_D: [f64; 4] = [2.1, 3.0, 5.0, 10.0];
const MC_TRIALS: u64 = 1_000_000;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Valid games on the structure grid, skipping integer-ratio rejects.
fn grid() -> Vec<GameParams> {
    let mut out = Vec::new();
    for &d in &GRID_D {
        for n in 4..=30 {
            if let Ok(g) = GameParams::new(n, default_c(d), d) {
                out.push(g);
            }
        }
    }
    out
}

struct Reference {
    n: usize,
    k_star: usize,
    values: [f64; 5],
}

fn reference_rows() -> Vec<Reference> {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../core/tests/fixtures/table1_reference.csv"
    );
    let text = std::fs::read_to_string(path).expect("reference table");
    text.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            let mut values = [0.0; 5];
            for (v, s) in values.iter_mut().zip(&f[2..7]) {
                *v = s.parse().expect("numeric cell");
            }
            Reference {
                n: f[0].parse().expect("n"),
                k_star: f[1].parse().expect("k*"),
                values,
            }
        })
        .collect()
}

fn table1_reproduction() -> Check {
    const TOL: f64 = 1.5e-3;
    let d0 = table1_d0();
    ensure((3.0 / (2.0 * d0 - 1.0) - 0.930).abs() < 1e-12, || {
        format!("d0 = {d0} does not reproduce beta(3) = 0.930")
    })?;
    let rows = reference_rows();
    // rows 4 and 5 confirm d0 before the full comparison
    for r in rows.iter().filter(|r| r.n == 4 || r.n == 5) {
        let sol = solve_t(&GameParams::new(r.n, default_c(d0), d0).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure((sol.beta - r.values[0]).abs() <= TOL, || {
            format!("d0 fails to confirm row n = {}", r.n)
        })?;
    }

    let start = Instant::now();
    let table = cmd_table1(d0, &TABLE1_N);
    let elapsed = start.elapsed();
    ensure(table.rows.len() == rows.len(), || "row count".into())?;
    let mut worst = 0.0_f64;
    for (got, want) in table.rows.iter().zip(&rows) {
        let sol = got
            .solution
            .as_ref()
            .ok_or_else(|| format!("n = {}: {}", got.n, got.status))?;
        ensure(got.n == want.n && sol.k_star == want.k_star, || {
            format!(
                "n = {}: k* = {} expected {}",
                got.n, sol.k_star, want.k_star
            )
        })?;
        let vals = [sol.beta, sol.t, sol.p_agree, sol.p_insider, sol.p_freerider];
        for (i, (a, b)) in vals.iter().zip(&want.values).enumerate() {
            let err = (a - b).abs();
            worst = worst.max(err);
            ensure(err <= TOL, || {
                format!("n = {}: column {i} = {a} vs printed {b}", got.n)
            })?;
        }
    }
    ensure(elapsed < Duration::from_secs(1), || {
        format!("runtime {elapsed:?}")
    })?;
    Ok(format!(
        "20 rows, worst error {worst:.2e}, runtime {:.1} ms",
        elapsed.as_secs_f64() * 1e3
    ))
}

fn mc_within(g: &GameParams, t: f64, exact: [f64; 3], seed: u64) -> Result<f64, String> {
    let report =
        mc_participation(g, t, SimConfig::new(MC_TRIALS, seed, 8)).map_err(|e| e.to_string())?;
    let mut worst = 0.0_f64;
    for (est, want) in report.estimates().iter().zip(exact) {
        let se = est.stderr.max(1e-12);
        let z = (est.estimate - want).abs() / se;
        worst = worst.max(z);
        ensure(z <= 4.0, || {
            format!(
                "n = {}: MC {} = {} vs {want} ({z:.2} SE)",
                g.n(),
                est.quantity,
                est.estimate
            )
        })?;
    }
    Ok(worst)
}

fn closed_forms() -> Check {
    let d0 = table1_d0();
    let close = |a: f64, b: f64, what: &str| {
        ensure((a - b).abs() <= 1e-9, || format!("{what}: {a} vs {b}"))
    };

    // n = 4, k* = 3: G(x) = x/3
    let g4 = GameParams::new(4, default_c(d0), d0).map_err(|e| e.to_string())?;
    ensure(g4.k_star() == 3, || "k*(4) != 3".into())?;
    let s4 = solve_t(&g4).map_err(|e| e.to_string())?;
    let x4 = 3.0 * beta(&g4);
    let t4 = x4 / (1.0 + x4);
    close(s4.t, t4, "n = 4 t")?;
    ensure((t4 - 0.333).abs() < 1e-3, || format!("n = 4 t = {t4}"))?;
    let p4 = [
        4.0 * t4.powi(3) * (1.0 - t4) + t4.powi(4),
        t4 * (3.0 * t4 * t4 * (1.0 - t4) + t4.powi(3)),
        (1.0 - t4) * t4.powi(3),
    ];
    close(s4.p_agree, p4[0], "n = 4 p_A")?;
    close(s4.p_insider, p4[1], "n = 4 p_I")?;
    close(s4.p_freerider, p4[2], "n = 4 p_F")?;
    let (a, i, f) = participation_probabilities_for(4, 3, 1.0 / 3.0).map_err(|e| e.to_string())?;
    close(a, 9.0 / 81.0, "p_A(1/3)")?;
    close(i, 7.0 / 81.0, "p_I(1/3)")?;
    close(f, 2.0 / 81.0, "p_F(1/3)")?;

    // n = 5, k* = 4: G(x) = x/4
    let g5 = GameParams::new(5, default_c(d0), d0).map_err(|e| e.to_string())?;
    ensure(g5.k_star() == 4, || "k*(5) != 4".into())?;
    let s5 = solve_t(&g5).map_err(|e| e.to_string())?;
    let x5 = 4.0 * beta(&g5);
    let t5 = x5 / (1.0 + x5);
    close(s5.t, t5, "n = 5 t")?;
    let p5 = [
        5.0 * t5.powi(4) * (1.0 - t5) + t5.powi(5),
        t5 * (4.0 * t5.powi(3) * (1.0 - t5) + t5.powi(4)),
        (1.0 - t5) * t5.powi(4),
    ];
    close(s5.p_agree, p5[0], "n = 5 p_A")?;
    close(s5.p_insider, p5[1], "n = 5 p_I")?;
    close(s5.p_freerider, p5[2], "n = 5 p_F")?;
    ensure((s5.p_agree - 0.1913).abs() < 1.5e-3, || {
        format!("n = 5 p_A = {}", s5.p_agree)
    })?;

    let z4 = mc_within(&g4, t4, p4, 11)?;
    let z5 = mc_within(&g5, t5, p5, 12)?;
    Ok(format!(
        "t(4) = {t4:.6}, p_A(5) = {:.6}, MC worst {:.2} SE",
        s5.p_agree,
        z4.max(z5)
    ))
}

fn fig1_sandwich() -> Check {
    let fig = cmd_fig1(FIG1_N, FIG1_C, FIG1_D).map_err(|e| e.to_string())?;
    let g = &fig.game;
    ensure(g.k_star() == 18, || format!("k* = {}", g.k_star()))?;
    // independent re-evaluation from the raw parameters
    let phi = (FIG1_D + 1.0) / FIG1_N as f64;
    let f_nc = |k: usize| FIG1_C - (FIG1_N - k - 1) as f64 * phi;
    let f_c0 = FIG1_C + FIG1_D - FIG1_N as f64 * phi;
    let printed = [(16, 3.232236), (17, 3.363544)];
    for (k, want) in printed {
        let got = fig.points[k].payoff_nc;
        ensure(
            (got - want).abs() <= 1e-5 && (got - f_nc(k)).abs() <= 1e-12,
            || format!("f(NC,{k}) = {got}"),
        )?;
    }
    let base = fig.points[0].payoff_c;
    ensure(
        (base - 3.2827).abs() <= 1e-5 && (base - f_c0).abs() <= 1e-12,
        || format!("f(C,0) = {base}"),
    )?;
    ensure(
        fig.points[16].payoff_nc < base && base < fig.points[17].payoff_nc,
        || "sandwich order".into(),
    )?;
    ensure(fig.crossing_k == Some(17), || {
        format!("crossing at {:?}", fig.crossing_k)
    })?;
    Ok(format!(
        "k* = 18, {:.6} < {base:.6} < {:.6}",
        fig.points[16].payoff_nc, fig.points[17].payoff_nc
    ))
}

fn structure_grid() -> Check {
    let games = grid();
    for g in &games {
        let s = g.check_structure();
        ensure(s.all(), || format!("n = {}, d = {}: {s:?}", g.n(), g.d()))?;
        for k in 0..g.n() {
            let gap = g.payoff(Strategy::C, k).unwrap() - g.payoff(Strategy::NC, k).unwrap();
            ensure((gap - g.alpha()).abs() <= 1e-12, || {
                format!("n = {}, d = {}, k = {k}: gap {gap}", g.n(), g.d())
            })?;
        }
    }
    Ok(format!("{} games, all checks true", games.len()))
}

fn sign_law() -> Check {
    let mut checks = 0usize;
    for g in grid() {
        let n = g.n();
        for k in 2..=n {
            let v = necessary_condition_value(&g, k).map_err(|e| e.to_string())?;
            let dl = delta(&g, k - 1).map_err(|e| e.to_string())?;
            let want = 2 * k > n;
            ensure((v > 0.0) == want && (dl > 0.0) == want, || {
                format!("n = {n}, d = {}, k = {k}: value {v}, delta {dl}", g.d())
            })?;
            checks += 1;
        }
    }
    Ok(format!("{checks} checks, 0 counterexamples"))
}

fn beta_envelope() -> Check {
    let mut count = 0;
    for g in grid() {
        let (b, ub) = (beta(&g), beta_upper_bound(&g));
        ensure(b <= ub, || {
            format!("n = {}, d = {}: {b} > {ub}", g.n(), g.d())
        })?;
        count += 1;
    }
    let d0 = table1_d0();
    let mut last = f64::NAN;
    for n in [100usize, 1_000, 10_000, 1_000_000] {
        let g = GameParams::new(n, default_c(d0), d0).map_err(|e| e.to_string())?;
        let (b, ub) = (beta(&g), beta_upper_bound(&g));
        ensure(b <= ub, || format!("n = {n}: {b} > {ub}"))?;
        last = b;
        count += 1;
    }
    ensure(last < 1e-5, || format!("beta(1e6) = {last}"))?;
    Ok(format!("{count} games, beta(1e6) = {last:.3e}"))
}

fn root_finder() -> Check {
    let d0 = table1_d0();
    let mut solved = 0;
    let mut skipped = 0;
    let mut widest = 0.0_f64;
    for n in 3..=300 {
        let Ok(g) = GameParams::new(n, default_c(d0), d0) else {
            skipped += 1;
            continue;
        };
        let (base, bracket) =
            solve_t_with(&g, SolveOptions::default()).map_err(|e| format!("n = {n}: {e}"))?;
        if let Some(b) = bracket {
            ensure(b.width() < 1e-12, || {
                format!("n = {n}: width {}", b.width())
            })?;
            widest = widest.max(b.width());
        }
        for upper in [1e-6, 1e-3, 0.5, 7.0, 1e4] {
            let opts = SolveOptions {
                initial_upper: upper,
                ..SolveOptions::default()
            };
            let (sol, _) = solve_t_with(&g, opts).map_err(|e| format!("n = {n}: {e}"))?;
            ensure((sol.t - base.t).abs() <= 1e-9, || {
                format!("n = {n}, upper {upper}: t {} vs {}", sol.t, base.t)
            })?;
        }
        solved += 1;
    }
    Ok(format!(
        "{solved} solved, {skipped} invalid n skipped, widest bracket {widest:.1e}"
    ))
}

fn dynamics() -> Check {
    let d0 = table1_d0();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut runs = 0;
    let mut max_rounds = 0;
    for i in 0..100 {
        let n = 3 + i % 40;
        let Ok(g) = GameParams::new(n, default_c(d0), d0) else {
            continue;
        };
        let pop = Population::selfish(n);
        let initial = random_profile(n, &mut rng);
        let trace = best_response_dynamics(&g, &pop, &initial, 100).map_err(|e| e.to_string())?;
        ensure(trace.fixed_point && trace.rounds <= 2, || {
            format!("n = {n}: rounds {}", trace.rounds)
        })?;
        ensure(trace.final_profile.nc_count() == 0, || {
            format!("n = {n}: final NC count {}", trace.final_profile.nc_count())
        })?;
        let eq =
            is_equilibrium_profile(&g, &pop, &trace.final_profile).map_err(|e| e.to_string())?;
        ensure(eq, || format!("n = {n}: fixed point not an equilibrium"))?;
        max_rounds = max_rounds.max(trace.rounds);
        runs += 1;
    }
    ensure(runs == 100, || format!("only {runs} runs"))?;
    Ok(format!("{runs} runs, max rounds {max_rounds}"))
}

fn determinism() -> Check {
    let d0 = table1_d0();
    let c = default_c(d0);
    let json = |shards: usize| -> Result<(String, Vec<_>), String> {
        let out = cmd_mc(7, c, d0, None, SimConfig::new(200_000, 42, shards))
            .map_err(|e| e.to_string())?;
        let text = render(&out, Format::Json).map_err(|e| e.to_string())?;
        Ok((text, out.records))
    };
    let (a, rec_a) = json(8)?;
    let (b, _) = json(8)?;
    ensure(a == b, || "JSON differs between identical runs".into())?;
    let (_, rec_1) = json(1)?;
    ensure(rec_1 == rec_a, || "shards 1 and 8 disagree".into())?;
    Ok(format!("{} bytes identical, shards 1 = 8", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("table1 reproduction", table1_reproduction),
        ("closed-form cross-check", closed_forms),
        ("fig1 sandwich", fig1_sandwich),
        ("structure invariants", structure_grid),
        ("sign law", sign_law),
        ("beta envelope", beta_envelope),
        ("root-finder robustness", root_finder),
        ("best-response dynamics", dynamics),
        ("mc determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
