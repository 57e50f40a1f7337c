use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use latgauss::cvp::{exact_cvp, CvpConfig};
use latgauss::dgs::{approx_cvp, estimate_distance, ApproxCvpConfig, DgsConfig, DgsPlan, DgsRequest};
use latgauss::gaussian::{ExactSampler, KleinSampler, DEFAULT_KLEIN_FACTOR};
use latgauss::lattice::{format_basis_file, hkz_basis, parse_basis_file, parse_target, Basis, ShiftedLattice};
use latgauss::rational::{self, Q, QVec};
use latgauss::rng::rng_from_seed;
use latgauss_harness::{gen_instance, run_experiment, ExperimentKind, ExperimentSpec, Summary, TargetMode};
use num_traits::Signed;

#[derive(Parser)]
#[command(name = "latgauss", version, about = "Discrete Gaussian sampling and exact CVP on small lattices")]
struct Cli {
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Worker threads for experiment suites (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Strict sizing: the full input count and the final count check.
    #[arg(long, global = true)]
    strict: bool,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Uniform,
    Near,
    Deep,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Dgs,
    Klein,
    Exact,
}

#[derive(Subcommand)]
enum Cmd {
    /// Random instance in the basis file format.
    Gen {
        #[arg(short)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        bound: i64,
        #[arg(long, value_enum, default_value_t = Mode::Uniform)]
        mode: Mode,
        #[arg(long, default_value_t = 0.25)]
        noise: f64,
    },
    /// HKZ-reduce a basis.
    Hkz {
        #[arg(long)]
        basis: PathBuf,
    },
    /// Samples from D_{L−t,s}, one per line as exact coefficients of By − t.
    Sample {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        target: Option<String>,
        #[arg(short)]
        s: f64,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Method::Dgs)]
        method: Method,
        #[arg(long, default_value_t = 0)]
        ell: usize,
        #[arg(long, default_value_t = 4.0)]
        kappa: f64,
        /// Use the enumerated distance instead of the sampled estimate.
        #[arg(long)]
        oracle: bool,
    },
    /// Exact closest vector.
    Cvp {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        census: bool,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        f: Option<usize>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, default_value_t = 5)]
        repeat: usize,
    },
    /// Approximate closest vector within (1 + 1/f)·dist.
    ApproxCvp {
        #[arg(long)]
        basis: PathBuf,
        #[arg(long)]
        target: Option<String>,
        #[arg(long, default_value_t = 100.0)]
        f: f64,
        #[arg(long)]
        oracle: bool,
    },
    /// Run an experiment suite and report one record per line.
    Verify {
        suite: String,
        /// Comma-separated dimensions.
        #[arg(long)]
        dims: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
        /// Suite parameter as key=value; repeatable.
        #[arg(long = "param")]
        params: Vec<String>,
        /// Also write a JSON summary here.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Wall-time scaling of the sampler.
    Bench {
        #[arg(long)]
        dims: Option<String>,
        #[arg(long)]
        trials: Option<usize>,
    },
}

fn read_instance(path: &Path, target: Option<&str>) -> Result<(Basis, QVec)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let file = parse_basis_file(&text)?;
    let n = file.basis.rank();
    let t = match (target, file.target) {
        (Some(s), _) => parse_target(s, n)?,
        (None, Some(t)) => t,
        (None, None) => bail!("no target: pass --target or add a `t:` line"),
    };
    Ok((file.basis, t))
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        match part.split_once("..") {
            Some((a, b)) => out.extend(a.trim().parse::<usize>()?..=b.trim().parse::<usize>()?),
            None => out.push(part.trim().parse()?),
        }
    }
    Ok(out)
}

fn witness(c: &[i64]) -> String {
    c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// The distance as an exact rational when dist² is a rational square,
/// otherwise as a float.
fn distance_text(d_sq: &Q) -> String {
    let (p, q) = (d_sq.numer(), d_sq.denom());
    if !p.is_negative() {
        let (rp, rq) = (p.sqrt(), q.sqrt());
        if &(&rp * &rp) == p && &(&rq * &rq) == q {
            return rational::format_q(&Q::new(rp, rq));
        }
    }
    format!("{}", rational::q_to_f64(d_sq).sqrt())
}

fn run(cli: &Cli) -> Result<(String, bool)> {
    let mut rng = rng_from_seed(cli.seed);
    let mut text = String::new();
    let mut ok = true;
    match &cli.cmd {
        Cmd::Gen { n, bound, mode, noise } => {
            let mode = match mode {
                Mode::Uniform => TargetMode::Uniform,
                Mode::Near => TargetMode::NearLattice { noise: *noise },
                Mode::Deep => TargetMode::DeepHole,
            };
            let inst = gen_instance(*n, *bound, cli.seed, mode)?;
            text = format_basis_file(&inst.basis, Some(&inst.target));
        }
        Cmd::Hkz { basis } => {
            let file = parse_basis_file(&fs::read_to_string(basis)?)?;
            let h = hkz_basis(&file.basis)?;
            text = format_basis_file(&h.basis, file.target.as_deref());
        }
        Cmd::Sample { basis, target, s, count, method, ell, kappa, oracle } => {
            let (b, t) = read_instance(basis, target.as_deref())?;
            let lat = ShiftedLattice::new(b, t)?;
            let samples: Vec<Vec<i64>> = match method {
                Method::Exact => {
                    let ex = ExactSampler::new(&lat, *s, 1e-12)?;
                    (0..*count).map(|_| ex.sample(&mut rng).to_vec()).collect()
                }
                Method::Klein => {
                    let k = KleinSampler::new(lat.clone(), *s, DEFAULT_KLEIN_FACTOR)?;
                    (0..*count).map(|_| k.sample(&mut rng)).collect()
                }
                Method::Dgs => {
                    let plan = DgsPlan::new(&lat)?;
                    let cfg = DgsConfig { ell: *ell, kappa: *kappa, strict: cli.strict, ..DgsConfig::default() };
                    let distance = estimate_distance(&plan, &cfg, *oracle, &mut rng)?;
                    let req = DgsRequest { lat: lat.clone(), s: *s, f: f64::INFINITY, eps: 0.0, distance };
                    let mut got: Vec<Vec<i64>> = Vec::new();
                    while got.len() < *count {
                        let out = plan.solve(&req, &cfg, None, &mut rng)?;
                        if out.batch.is_empty() {
                            bail!("sampler produced no output at s = {s}");
                        }
                        got.extend(out.batch.iter().map(|y| y.to_vec()));
                    }
                    got.truncate(*count);
                    got
                }
            };
            // coefficients of By − t, that is y − B⁻¹t
            let tc = lat.target_coefficients()?;
            for y in samples {
                let x: QVec = y.iter().zip(&tc).map(|(a, c)| rational::q_int(*a) - c).collect();
                text.push_str(&rational::format_qvec(&x));
                text.push('\n');
            }
        }
        Cmd::Cvp { basis, target, oracle, census, alpha, f, p, repeat } => {
            let (b, t) = read_instance(basis, target.as_deref())?;
            let mut cfg = CvpConfig { repeat: (*repeat).max(1), ..CvpConfig::default() };
            cfg.ccvp.oracle_distance = *oracle;
            cfg.ccvp.alpha = *alpha;
            cfg.ccvp.f_cluster = *f;
            cfg.ccvp.p_cap = *p;
            let sol = exact_cvp(&b, &t, &cfg, &mut rng)?;
            text = format!("distance={} witness={}\n", distance_text(&sol.dist_sq), witness(&sol.coeffs));
            if *census {
                for (d, c) in &sol.census {
                    text.push_str(&format!("rank={d} calls={c}\n"));
                }
            }
        }
        Cmd::ApproxCvp { basis, target, f, oracle } => {
            let (b, t) = read_instance(basis, target.as_deref())?;
            let cfg = ApproxCvpConfig { f: *f, oracle: *oracle, ..ApproxCvpConfig::default() };
            let a = approx_cvp(&b, &t, &cfg, &mut rng)?;
            text = format!(
                "distance={} witness={} s={} ell={}\n",
                distance_text(&a.dist_sq),
                witness(&a.coeffs),
                a.s,
                a.ell
            );
        }
        Cmd::Verify { suite, dims, trials, params, summary } => {
            let kind: ExperimentKind = suite.parse()?;
            let mut spec = ExperimentSpec::preset(kind, cli.seed);
            if let Some(d) = dims {
                spec.dims = parse_dims(d)?;
            }
            if let Some(t) = trials {
                spec.trials = *t;
            }
            for kv in params {
                let (k, v) = kv.split_once('=').ok_or_else(|| anyhow!("--param expects key=value, got `{kv}`"))?;
                spec = spec.with_param(k, v);
            }
            let records = run_experiment(&spec)?;
            text = latgauss_harness::report::render(&records);
            let sum = Summary::new(kind.name(), cli.seed, &records);
            ok = sum.pass;
            if let Some(path) = summary {
                fs::write(path, sum.to_json())?;
            }
        }
        Cmd::Bench { dims, trials } => {
            let mut spec = ExperimentSpec::preset(ExperimentKind::Bench, cli.seed);
            if let Some(d) = dims {
                spec.dims = parse_dims(d)?;
            }
            if let Some(t) = trials {
                spec.trials = *t;
            }
            let records = run_experiment(&spec)?;
            text = latgauss_harness::report::render(&records);
        }
    }
    Ok((text, ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok((text, ok)) => {
            let written = match &cli.out {
                Some(p) => fs::write(p, &text).map_err(anyhow::Error::from),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(anyhow::Error::from),
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
