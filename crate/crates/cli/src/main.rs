mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use permclt_core::exact::{
    self, bivariate_brute, bivariate_gf, bivariate_recurrence, carlitz_mismatches,
    descent_covariance_exact, eulerian_row, format_rational, irwin_hall_cell,
    kolmogorov_to_normal, t_distribution, verify_euler_identity, BivariateDescentTable,
    CarlitzRule, ExactDistribution,
};
use permclt_core::lab::{
    self, bivariate_experiment, check_interaction_rule, coincidence_rate, bound_scaling,
    InteractionOptions, McOptions, Sampler, Statistic,
};
use permclt_core::metrics::{
    distance, invariance_check, search_triangle_violations, DescentGraph, MetricKind,
};
use permclt_core::rng::DEFAULT_SEED;
use permclt_core::stats::LocalPair;
use permclt_core::{Permutation, SeededRng};

use output::{Format, Output};

/// Descent statistics on permutations: exact laws, rank metrics and Monte Carlo checks.
#[derive(Parser)]
#[command(name = "permclt", version)]
struct Cli {
    /// Seed for every random stream [env: PERMCLT_SEED; default: 20160519].
    #[arg(long, global = true, env = "PERMCLT_SEED")]
    seed: Option<u64>,
    /// Worker threads for Monte Carlo work (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Group,
}

#[derive(Subcommand)]
enum Group {
    /// Exact laws and identities over all of S_n.
    #[command(subcommand)]
    Exact(ExactCmd),
    /// Distances between permutations.
    #[command(subcommand)]
    Metric(MetricCmd),
    /// Monte Carlo experiments.
    #[command(subcommand)]
    Mc(McCmd),
    /// Randomized checks of the interaction-graph bounds.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Brute,
    Gf,
    Recurrence,
}

#[derive(Args)]
struct SizeArg {
    #[arg(long)]
    n: usize,
}

#[derive(Subcommand)]
enum ExactCmd {
    /// Eulerian numbers: the law of D on S_n.
    Eulerian(SizeArg),
    /// Joint law of (D(π), D(π⁻¹)).
    Bivariate {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Method::Recurrence)]
        method: Method,
    },
    /// Law of T(π) = D(π) + D(π⁻¹).
    Tdist {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Method::Recurrence)]
        method: Method,
    },
    /// Exact mean and variance.
    Moments {
        /// D, T, peaks or local:<file>.
        #[arg(long)]
        stat: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Method::Recurrence)]
        method: Method,
    },
    /// Covariance of D(π) and D(π⁻¹) by enumeration.
    Covariance(SizeArg),
    /// Series identity for Σ k^n t^k.
    EulerIdentity {
        #[arg(long)]
        n: usize,
        /// Number of coefficients checked beyond t^0 (default n + 12).
        #[arg(long)]
        k: Option<usize>,
    },
    /// Irwin-Hall unit cells against Eulerian numbers.
    Stanley {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        j: Option<usize>,
    },
    /// Vanishing pattern of the joint descent table.
    Carlitz {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Method::Recurrence)]
        method: Method,
    },
    /// Kolmogorov distance of D to the normal against √(12/n).
    Pitman(SizeArg),
}

#[derive(Subcommand)]
enum MetricCmd {
    /// Distance between two permutations.
    Dist {
        #[arg(long)]
        kind: MetricKind,
        #[arg(long)]
        p: Permutation,
        #[arg(long)]
        q: Permutation,
    },
    /// Shortest-path descent distance; with only --n, how often the direct edge is shortest.
    GraphDist {
        #[arg(long)]
        p: Option<Permutation>,
        #[arg(long)]
        q: Option<Permutation>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Triangle-inequality failures of the descent edge weight through the identity.
    Violations(SizeArg),
    /// Randomized left/right invariance check.
    Invariance {
        #[arg(long)]
        kind: MetricKind,
        #[arg(long, default_value_t = permclt_core::metrics::DEFAULT_INVARIANCE_N)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

#[derive(Subcommand)]
enum McCmd {
    /// Standardized statistic against the normal: KS and W1 distance.
    Clt {
        /// D, T, peaks, peaks_pair or local:<file>.
        #[arg(long, default_value = "T")]
        stat: String,
        #[command(flatten)]
        size: McArgs,
        #[arg(long, default_value = "points")]
        sampler: Sampler,
        /// Also write the raw values as CSV here.
        #[arg(long)]
        raw_out: Option<PathBuf>,
    },
    /// Correlation and marginals of (D(π), D(π⁻¹)).
    Bivariate(McArgs),
    /// Frequency of D(π) = D(π⁻¹).
    Coincidence(McArgs),
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Non-interaction identity, M and δ on random point configurations.
    Interaction {
        #[arg(long, default_value = "T")]
        stat: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Rank threshold of the graph (default: degree - 1).
        #[arg(long)]
        threshold: Option<usize>,
        /// Compute M over all coordinates every this many trials.
        #[arg(long, default_value_t = 100)]
        sweep_every: usize,
    },
    /// Bound terms at several n and their log-log slopes.
    #[command(name = "theorem4-scaling")]
    BoundScaling {
        #[arg(long, default_value = "T")]
        stat: String,
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000")]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        /// Bound on M (default 4 for D and T, 4k otherwise).
        #[arg(long)]
        m_bound: Option<f64>,
        /// Bound on δ (default 4(k+3) + 1).
        #[arg(long)]
        delta_bound: Option<f64>,
    },
}

fn parse_stat(spec: &str) -> Result<Statistic> {
    if let Some(path) = spec.strip_prefix("local:") {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
        return Ok(Statistic::Local(LocalPair::from_json(&text)?));
    }
    Ok(spec.parse()?)
}

fn table(n: usize, method: Method) -> Result<BivariateDescentTable> {
    Ok(match method {
        Method::Brute => bivariate_brute(n)?,
        Method::Gf => bivariate_gf(n)?,
        Method::Recurrence => bivariate_recurrence(n)?,
    })
}

fn distribution_rows(dist: &ExactDistribution) -> Output {
    let rows = dist
        .values
        .iter()
        .map(|(v, c)| vec![v.to_string(), c.to_string()])
        .collect();
    Output::new(serde_json::to_value(dist).expect("serializable")).with_rows(&["value", "count"], rows)
}

fn run_exact(cmd: ExactCmd) -> Result<Output> {
    Ok(match cmd {
        ExactCmd::Eulerian(SizeArg { n }) => distribution_rows(&eulerian_row(n)?),
        ExactCmd::Bivariate { n, method } => {
            let t = table(n, method)?;
            let rows = t
                .to_json()
                .cells
                .into_iter()
                .map(|c| vec![c.r.to_string(), c.s.to_string(), c.count])
                .collect();
            Output::new(serde_json::to_value(t.to_json())?).with_rows(&["r", "s", "count"], rows)
        }
        ExactCmd::Tdist { n, method } => distribution_rows(&t_distribution(&table(n, method)?)),
        ExactCmd::Moments { stat, n, method } => {
            let stat = parse_stat(&stat)?;
            let m = match &stat {
                Statistic::D => exact::moments(&eulerian_row(n)?)?,
                Statistic::T => exact::moments(&t_distribution(&table(n, method)?))?,
                Statistic::Peaks => permclt_core::LocalStatistic::peaks().exact_moments(n)?,
                Statistic::Local(LocalPair {
                    forward: Some(side),
                    inverse: None,
                }) => side.exact_moments(n)?,
                other => bail!("no exact moments for statistic {other}"),
            };
            Output::new(json!({
                "statistic": stat.name(),
                "n": n,
                "mean": format_rational(&m.mean),
                "variance": format_rational(&m.variance),
            }))
        }
        ExactCmd::Covariance(SizeArg { n }) => {
            let c = descent_covariance_exact(n)?;
            Output::new(json!({
                "n": n,
                "covariance": format_rational(&c.covariance),
                "mean_product": format_rational(&c.mean_product),
                "variance": format_rational(&c.variance),
                "correlation": c.correlation().as_ref().map(format_rational),
            }))
        }
        ExactCmd::EulerIdentity { n, k } => {
            let k = k.unwrap_or(n + 12);
            Output::new(json!({ "n": n, "k": k, "holds": verify_euler_identity(n, k)? }))
        }
        ExactCmd::Stanley { n, j } => {
            let row = eulerian_row(n)?;
            let fact: num_bigint::BigUint = (1..=n as u64).map(num_bigint::BigUint::from).product();
            let js: Vec<usize> = match j {
                Some(j) => vec![j],
                None => (0..n).collect(),
            };
            let mut cells = Vec::new();
            for j in js {
                let cell = irwin_hall_cell(n, j)?;
                let count = row.count(j as i64);
                let scaled = &cell * num_rational::BigRational::from_integer(fact.clone().into());
                cells.push(json!({
                    "j": j,
                    "probability": format_rational(&cell),
                    "eulerian": count.to_string(),
                    "matches": scaled == num_rational::BigRational::from_integer(count.into()),
                }));
            }
            Output::new(json!({ "n": n, "cells": cells })).with_array("cells")
        }
        ExactCmd::Carlitz { n, method } => {
            let t = table(n, method)?;
            let report = |rule| {
                let m = carlitz_mismatches(&t, rule);
                json!({
                    "holds": m.is_empty(),
                    "mismatches": m.iter().map(|&(r, s)| json!({
                        "r": r, "s": s, "count": t.get(r, s).to_string()
                    })).collect::<Vec<_>>(),
                })
            };
            Output::new(json!({
                "n": n,
                "displayed": report(CarlitzRule::Displayed),
                "strict": report(CarlitzRule::Strict),
            }))
        }
        ExactCmd::Pitman(SizeArg { n }) => {
            if n < 2 {
                bail!("pitman check requires n >= 2");
            }
            let mean = exact::formulas::descent_mean(n as i64);
            let sd = ((n as f64 + 1.0) / 12.0).sqrt();
            let ks = kolmogorov_to_normal(&eulerian_row(n)?, &mean, sd)?;
            let bound = (12.0 / n as f64).sqrt();
            Output::new(json!({ "n": n, "ks": ks, "bound": bound, "within": ks <= bound }))
        }
    })
}

fn run_metric(cmd: MetricCmd, seed: u64) -> Result<Output> {
    Ok(match cmd {
        MetricCmd::Dist { kind, p, q } => {
            let d = permclt_core::metrics::distance_any(kind, &p, &q)?;
            Output::new(json!({ "kind": kind, "p": p, "q": q, "distance": d }))
        }
        MetricCmd::GraphDist { p, q, n } => match (p, q, n) {
            (Some(p), Some(q), None) => {
                let g = DescentGraph::cached(p.len())?;
                Output::new(json!({
                    "p": p,
                    "q": q,
                    "distance": g.distance(&p, &q)?,
                    "edge_weight": distance(MetricKind::DescentEdge, &p, &q)?,
                }))
            }
            (None, None, Some(n)) => {
                let (equal, total) = DescentGraph::cached(n)?.edge_is_shortest_counts();
                Output::new(json!({
                    "n": n,
                    "pairs": total,
                    "edge_is_shortest": equal,
                    "fraction": equal as f64 / total as f64,
                }))
            }
            _ => bail!("give either --p and --q, or --n"),
        },
        MetricCmd::Violations(SizeArg { n }) => {
            let r = search_triangle_violations(n)?;
            let rows = r
                .violations
                .iter()
                .map(|v| {
                    vec![
                        v.pi.to_string(),
                        v.sigma.to_string(),
                        v.d_pi_id.to_string(),
                        v.d_id_sigma.to_string(),
                        v.d_pi_sigma.to_string(),
                    ]
                })
                .collect();
            Output::new(serde_json::to_value(&r)?)
                .with_rows(&["pi", "sigma", "d_pi_id", "d_id_sigma", "d_pi_sigma"], rows)
        }
        MetricCmd::Invariance { kind, n, trials } => {
            let r = invariance_check(kind, n, trials, &mut SeededRng::new(seed))?;
            Output::new(serde_json::to_value(r)?)
        }
    })
}

fn run_mc(cmd: McCmd, seed: u64) -> Result<Output> {
    let mut rng = SeededRng::new(seed);
    Ok(match cmd {
        McCmd::Clt {
            stat,
            size,
            sampler,
            raw_out,
        } => {
            let stat = parse_stat(&stat)?;
            let opts = McOptions {
                sampler,
                keep_values: raw_out.is_some(),
            };
            let r = lab::mc_statistic_with(&stat, size.n, size.samples, &mut rng, opts)?;
            if let Some(path) = raw_out {
                output::write_values(&path, &r.values)?;
            }
            Output::new(serde_json::to_value(&r)?)
        }
        McCmd::Bivariate(a) => Output::new(serde_json::to_value(bivariate_experiment(a.n, a.samples, &mut rng)?)?),
        McCmd::Coincidence(a) => Output::new(serde_json::to_value(coincidence_rate(a.n, a.samples, &mut rng)?)?),
    })
}

fn run_verify(cmd: VerifyCmd, seed: u64) -> Result<Output> {
    let mut rng = SeededRng::new(seed);
    Ok(match cmd {
        VerifyCmd::Interaction {
            stat,
            n,
            trials,
            threshold,
            sweep_every,
        } => {
            let stat = parse_stat(&stat)?;
            let opts = InteractionOptions {
                threshold,
                full_sweep_every: sweep_every,
            };
            Output::new(serde_json::to_value(check_interaction_rule(&stat, n, trials, &mut rng, opts)?)?)
        }
        VerifyCmd::BoundScaling {
            stat,
            ns,
            samples,
            m_bound,
            delta_bound,
        } => {
            let stat = parse_stat(&stat)?;
            let k = stat.degree();
            let m_default = match stat {
                Statistic::D | Statistic::T => 4.0,
                _ => 4.0 * k as f64,
            };
            let m = m_bound.unwrap_or(m_default);
            let delta = delta_bound.unwrap_or((4 * (k + 3) + 1) as f64);
            let s = bound_scaling(&stat, &ns, m, delta, samples, &mut rng)?;
            Output::new(serde_json::to_value(&s)?).with_array("rows")
        }
    })
}

fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .context("configuring worker threads")?;
    }
    let seed = cli.seed.unwrap_or(DEFAULT_SEED);
    let out = match cli.command {
        Group::Exact(c) => run_exact(c)?,
        Group::Metric(c) => run_metric(c, seed)?,
        Group::Mc(c) => run_mc(c, seed)?,
        Group::Verify(c) => run_verify(c, seed)?,
    };
    out.emit(cli.format, cli.out.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}


fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<csv::Error>().is_some_and(|c| {
                matches!(c.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe)
            })
            || c.downcast_ref::<serde_json::Error>()
                .and_then(|j| j.io_error_kind())
                .is_some_and(|k| k == std::io::ErrorKind::BrokenPipe)
    })
}
