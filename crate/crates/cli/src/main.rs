use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use graphcorr::detect::{compute_statistic, decide, default_threshold, Observation, TestKind, DEFAULT_RESTARTS};
use graphcorr::enumerate::{
    algorithm1_forests, algorithm2_pseudoforests, validate_forest, validate_pseudoforest, ConstructionParams,
};
use graphcorr::experiments::verify::{verify, DEFAULT_VERIFY_SEED};
use graphcorr::experiments::{
    configure_workers, exact_min_error_er, exact_tv_er, p_star, run_sweep, threshold_curves, ModelKind, SweepConfig,
};
use graphcorr::io;
use graphcorr::moments::{
    gf_bound_forest, gf_bound_jk, gf_orbit_forests_bruteforce, gf_orbit_pseudoforests_bruteforce,
    second_moment_exact, second_moment_monte_carlo,
};
use graphcorr::orbit::{backbone, classify_orbit, edge_orbits, node_cycles, OrbitGraph};
use graphcorr::sampler::{
    sample_null_er, sample_null_gaussian, sample_planted_er, sample_planted_gaussian, ErParams, GaussianParams,
};
use graphcorr::{CycleType, ModelParams, Permutation, SeedSpec};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "graphcorr", about = "Detecting correlation between two unlabeled random graphs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Gaussian,
    Er,
}

#[derive(Clone, Copy, ValueEnum)]
enum Hypothesis {
    Null,
    Planted,
}

#[derive(clap::Args, Clone)]
struct ModelArgs {
    #[arg(long, value_enum)]
    model: Model,
    /// Correlation (Gaussian model).
    #[arg(long)]
    rho: Option<f64>,
    /// Parent edge probability (ER model).
    #[arg(long)]
    p: Option<f64>,
    /// Subsampling probability (ER model).
    #[arg(long)]
    s: Option<f64>,
}

impl ModelArgs {
    fn params(&self, n: usize) -> Result<ModelParams> {
        let params = match self.model {
            Model::Gaussian => ModelParams::Gaussian(GaussianParams {
                n,
                rho: self.rho.context("--rho is required for the Gaussian model")?,
            }),
            Model::Er => ModelParams::Er(ErParams {
                n,
                p: self.p.context("--p is required for the ER model")?,
                s: self.s.context("--s is required for the ER model")?,
            }),
        };
        params.validate()?;
        Ok(params)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample a pair of graphs and write them (plus the alignment when planted).
    Generate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "planted")]
        hypothesis: Hypothesis,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Edge-orbit census and classification of a permutation.
    Orbit {
        /// Permutation file (one line of 1-based images) or inline cycle notation such as "(12)(34)(5678)".
        #[arg(long)]
        sigma: String,
        /// Restrict the listing to orbits in O_k and enable backbones.
        #[arg(long)]
        k: Option<usize>,
        /// Print the orbit listing grouped by class.
        #[arg(long)]
        table: bool,
        /// Edge-list file of an orbit graph whose backbone should be printed.
        #[arg(long)]
        backbone: Option<PathBuf>,
    },
    /// Run a detection test on two graph files.
    Test {
        #[arg(long)]
        stat: String,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// "auto" or a number.
        #[arg(long, default_value = "auto")]
        threshold: String,
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generating function of orbit (pseudo)forests against its product bound.
    Gf {
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: f64,
        #[arg(long)]
        forest: bool,
    },
    /// Second moment of the likelihood ratio, as CSV.
    Moments {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: usize,
        /// Use this many Monte-Carlo samples instead of exact enumeration.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the backbone generators for one cycle type and parameter set.
    Enumerate {
        /// Orbit counts n_1,n_2,… such as "0,2,0,1".
        #[arg(long)]
        cycle_type: String,
        #[arg(long)]
        k: usize,
        /// Stage sizes "a_1,…;b_1,…;c_1,…;d_1,…".
        #[arg(long)]
        params: String,
        /// Use the forest generator instead of the pseudoforest one.
        #[arg(long)]
        forest: bool,
        /// Tally violated conditions over the stream.
        #[arg(long)]
        validate: bool,
    },
    /// Monte-Carlo error sweep from a key = value config file.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output path.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact total variation and minimal error sums for the ER model, n ≤ 4.
    Tv {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        s: f64,
    },
    /// Boundary formulas tabulated over n.
    Curves {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long)]
        n_min: usize,
        #[arg(long)]
        n_max: usize,
        #[arg(long, default_value_t = 20)]
        points: usize,
        /// Comma-separated edge probabilities for the ER model.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.01, 0.05, 0.1, 0.2, 0.5])]
        p: Vec<f64>,
    },
    /// Run the acceptance suites.
    Verify {
        /// Suite id or name; repeatable. All suites when omitted.
        #[arg(long)]
        suite: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_VERIFY_SEED)]
        seed: u64,
    },
}

fn read_permutation(arg: &str) -> Result<Permutation> {
    let path = Path::new(arg);
    if path.is_file() {
        Ok(io::parse_permutation(&io::read_to_string(path)?)?)
    } else {
        Ok(io::parse_permutation(arg).with_context(|| format!("{arg:?} is neither a file nor a permutation"))?)
    }
}

fn read_observation(model: Model, a: &Path, b: &Path) -> Result<Observation> {
    Ok(match model {
        Model::Gaussian => Observation::Gaussian {
            a: io::parse_weighted_graph(&io::read_to_string(a)?)?,
            b: io::parse_weighted_graph(&io::read_to_string(b)?)?,
        },
        Model::Er => Observation::Er {
            a: io::parse_binary_graph(&io::read_to_string(a)?)?,
            b: io::parse_binary_graph(&io::read_to_string(b)?)?,
        },
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { model, n, hypothesis, seed, out } => {
            let params = model.params(n)?;
            let spec = SeedSpec::new(seed, 0);
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let planted = matches!(hypothesis, Hypothesis::Planted);
            let (a, b, pi) = match (&params, planted) {
                (ModelParams::Gaussian(g), false) => {
                    let (a, b) = sample_null_gaussian(g, spec)?;
                    (io::format_weighted_graph(&a), io::format_weighted_graph(&b), None)
                }
                (ModelParams::Gaussian(g), true) => {
                    let (a, b, pi) = sample_planted_gaussian(g, spec)?;
                    (io::format_weighted_graph(&a), io::format_weighted_graph(&b), Some(pi))
                }
                (ModelParams::Er(e), false) => {
                    let (a, b) = sample_null_er(e, spec)?;
                    (io::format_binary_graph(&a), io::format_binary_graph(&b), None)
                }
                (ModelParams::Er(e), true) => {
                    let (a, b, pi) = sample_planted_er(e, spec)?;
                    (io::format_binary_graph(&a), io::format_binary_graph(&b), Some(pi))
                }
            };
            io::write_string(&out.join("A.txt"), &a)?;
            io::write_string(&out.join("B.txt"), &b)?;
            if let Some(pi) = pi {
                io::write_string(&out.join("pi.txt"), &io::format_permutation(&pi))?;
            }
            println!("wrote {}", out.display());
        }
        Command::Orbit { sigma, k, table, backbone: bb_path } => {
            let sigma = read_permutation(&sigma)?;
            let decomp = node_cycles(&sigma);
            let (orbits, census) = edge_orbits(&sigma);
            if table {
                let mut groups: BTreeMap<char, Vec<String>> = BTreeMap::new();
                for o in &orbits {
                    let class = classify_orbit(&decomp, o)?;
                    if k.is_some_and(|k| class.orbit_len() > k || o.len() > k) {
                        continue;
                    }
                    groups.entry(class.tag()).or_default().push(format!("{:<24} {class} len={}", o.display_one_based(), o.len()));
                }
                for tag in ['M', 'B', 'C', 'S'] {
                    for line in groups.get(&tag).into_iter().flatten() {
                        println!("{tag}  {line}");
                    }
                }
            }
            println!("n={}", sigma.len());
            println!("cycle_type={}", decomp.cycle_type());
            println!("orbits={}", census.orbit_count());
            for (len, count) in census.nonzero() {
                println!("N_{len}={count}");
            }
            if let Some(path) = bb_path {
                let k = k.context("--backbone needs --k")?;
                let h = io::parse_binary_graph(&io::read_to_string(&path)?)?;
                let h = OrbitGraph::new(&decomp, h)?;
                print!("{}", backbone(&decomp, &h, k)?.describe());
            }
        }
        Command::Test { stat, a, b, model, threshold, restarts, seed } => {
            let kind = TestKind::parse(&stat)?;
            let obs = read_observation(model.model, &a, &b)?;
            let n = match &obs {
                Observation::Gaussian { a, .. } => a.node_count(),
                Observation::Er { a, .. } => a.node_count(),
            };
            let params = model.params(n)?;
            let tau = if threshold == "auto" {
                default_threshold(kind, &params)?
            } else {
                threshold.parse().with_context(|| format!("bad threshold {threshold:?}"))?
            };
            let (value, argmax) = compute_statistic(kind, &obs, &params, restarts, SeedSpec::new(seed, 0))?;
            println!("statistic={value}");
            println!("threshold={tau}");
            println!("decision={}", decide(value, tau, kind.tail()));
            if let Some(pi) = argmax {
                println!("argmax={}", io::format_permutation(&pi).trim_end());
            }
        }
        Command::Gf { sigma, k, s, forest } => {
            let sigma = read_permutation(&sigma)?;
            let ct = node_cycles(&sigma).cycle_type();
            let (brute, bound) = if forest {
                (gf_orbit_forests_bruteforce(&sigma, k, s)?, gf_bound_forest(&ct, k, s))
            } else {
                (gf_orbit_pseudoforests_bruteforce(&sigma, k, s)?, gf_bound_jk(&ct, k, s))
            };
            println!("bruteforce={brute}");
            println!("bound={bound}");
            println!("margin={}", bound - brute);
        }
        Command::Moments { model, n, samples, seed } => {
            let params = model.params(n)?;
            let report = match samples {
                Some(m) => second_moment_monte_carlo(&params, m, SeedSpec::new(seed, 0))?,
                None => second_moment_exact(&params)?,
            };
            print!("{}", report.to_csv());
        }
        Command::Enumerate { cycle_type, k, params, forest, validate } => {
            let ct = CycleType::parse(&cycle_type)?;
            let params = ConstructionParams::parse(&params, k)?;
            let lengths = ct.lengths();
            let mut tally: BTreeMap<String, usize> = BTreeMap::new();
            let mut visit = |bb: &graphcorr::BackboneGraph, _ok: bool| {
                if validate {
                    let v = if forest { validate_forest(bb) } else { validate_pseudoforest(bb) };
                    let mut seen: Vec<String> = v.violations.iter().map(|x| format!("{:?}", x.condition)).collect();
                    seen.dedup();
                    for c in seen {
                        *tally.entry(c).or_default() += 1;
                    }
                }
            };
            let (summary, bound) = if forest {
                (algorithm1_forests(&lengths, k, &params, &mut visit), params.forest_bound(&ct))
            } else {
                (algorithm2_pseudoforests(&lengths, k, &params, &mut visit), params.pseudoforest_bound(&ct))
            };
            println!("params={params}");
            println!("emitted={}", summary.emitted);
            println!("valid={}", summary.valid);
            println!("duplicates_skipped={}", summary.duplicates);
            println!("bound={bound}");
            for (cond, count) in tally {
                println!("violations_{cond}={count}");
            }
        }
        Command::Sweep { config, out } => {
            let mut cfg = SweepConfig::parse(&io::read_to_string(&config)?)?;
            if out.is_some() {
                cfg.output = out;
            }
            let result = run_sweep(&cfg)?;
            for failure in result.failures() {
                eprintln!("cell failed: {failure}");
            }
            if cfg.output.is_none() {
                print!("{}", result.to_csv());
            }
        }
        Command::Tv { n, p, s } => {
            let params = ErParams { n, p, s };
            println!("tv={}", exact_tv_er(&params)?);
            for kind in [TestKind::LikelihoodRatio, TestKind::QapExact, TestKind::EdgeCount] {
                println!("min_error_{}={}", kind.name(), exact_min_error_er(&params, kind)?);
            }
        }
        Command::Curves { model, n_min, n_max, points, p } => {
            let kind = match model {
                Model::Gaussian => ModelKind::Gaussian,
                Model::Er => ModelKind::Er,
            };
            print!("{}", threshold_curves(kind, n_min, n_max, points, &p)?);
            if matches!(model, Model::Er) {
                eprintln!("p_star={}", p_star());
            }
        }
        Command::Verify { suite, seed } => {
            let report = verify(&suite, seed)?;
            print!("{}", report.render());
            if !report.all_passed() {
                bail!("some criteria failed");
            }
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = configure_workers().map_err(anyhow::Error::from).and_then(|()| run(cli)) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
