use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use certlab::report::{analyze, parse_measures, tsv, DEFAULT_INPUT_MEASURES, DEFAULT_MEASURES};
use certlab::search::{uniform_measure_search, window_search, WindowEntry};
use certlab_core::designs::{build_design, parse_design, verify_design, write_design, DesignCheck};
use certlab_core::fraccert::fractional_certificate;
use certlab_core::measures::{
    block_sensitivity, certificate_complexity, neighborhood, verify_block_set, verify_certificate,
};
use certlab_core::poly::{
    maxonomials, mobius_transform, ndeg, omega_weight, shrink_iteration_bound, shrink_iterations, FairCoin,
    MultilinearPoly,
};
use certlab_core::quantum::{family_budget, GroverInstance};
use certlab_core::text::parse_function;
use certlab_core::verifiers::{
    child_hit_minimax, gap_table_g1, one_sided_report, optimal_child_table, trial_rng, NoisyVerifier, VerifierSpec,
    ZeroErrorEvaluator,
};
use certlab_core::{Error, FunctionObject, InputPoint};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Verification(_) | CliError::Core(Error::Consistency(_) | Error::Infeasible(_)) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(
    name = "certlab",
    version,
    about = "Exact certificate-complexity measures and verifier simulations"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct FnArg {
    /// Function text (`ctor=...`, `n=..;tt=..`) or a path to a function file.
    #[arg(long = "fn")]
    function: String,
}

#[derive(Args, Clone)]
struct OutArg {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Measure table for one function.
    Analyze {
        #[command(flatten)]
        f: FnArg,
        #[arg(long)]
        input: Option<String>,
        #[arg(long)]
        measures: Option<String>,
        #[command(flatten)]
        out: OutArg,
    },
    #[command(subcommand)]
    Search(SearchCmd),
    #[command(subcommand)]
    Simulate(SimCmd),
    /// Weighted Grover search against every neighbour with the other value.
    Grover {
        #[command(flatten)]
        f: FnArg,
        #[arg(long)]
        input: String,
        /// Number of basis states (default n²).
        #[arg(long)]
        states: Option<usize>,
        #[command(flatten)]
        out: OutArg,
    },
    #[command(subcommand)]
    Design(DesignCmd),
    /// Möbius polynomial, degree and nondeterministic degree.
    Poly {
        #[command(flatten)]
        f: FnArg,
        #[command(flatten)]
        out: OutArg,
    },
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Subcommand)]
enum SearchCmd {
    /// Rank weight windows by the exponent of their iterated composition.
    Window {
        #[arg(long, default_value_t = 32)]
        nmax: usize,
        #[command(flatten)]
        out: OutArg,
    },
    /// Look for a 6-variable function with C^X = 5 and bs^X = 4 everywhere.
    Uniform {
        #[arg(long, default_value_t = 200_000)]
        budget: u64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand)]
enum SimCmd {
    /// Zero-error evaluation on random (or fixed) inputs.
    R0 {
        #[command(flatten)]
        f: FnArg,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        input: Option<String>,
        /// Write the query transcript of the first trial here.
        #[arg(long)]
        transcript: Option<PathBuf>,
        #[command(flatten)]
        out: OutArg,
    },
    /// Monomial shrinking on random polynomials.
    Shrink {
        #[arg(long, default_value_t = 8)]
        vars: usize,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Noisy nonadaptive verifier and its one-sided transform.
    Verifier {
        #[command(flatten)]
        f: FnArg,
        #[arg(long)]
        input: String,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Spurious rejection probability added to the verifier.
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Subcommand)]
enum DesignCmd {
    Build {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    Check {
        #[arg(long)]
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Minimum certificate at an input, rechecked.
    Cert {
        #[command(flatten)]
        f: FnArg,
        #[arg(long)]
        input: String,
    },
    /// Maximum disjoint sensitive blocks at an input, rechecked.
    Blocks {
        #[command(flatten)]
        f: FnArg,
        #[arg(long)]
        input: String,
    },
    /// Certificate LP at an input with primal and dual witnesses.
    Lp {
        #[command(flatten)]
        f: FnArg,
        #[arg(long)]
        input: String,
    },
    /// Worst-case child hit probability of the recursive verifier.
    Minimax {
        #[command(flatten)]
        f: FnArg,
        /// `gap` (only for window(29,13,16)) or `optimal`.
        #[arg(long, default_value = "optimal")]
        table: String,
    },
}

fn load_function(spec: &str) -> CliResult<FunctionObject> {
    let path = Path::new(spec);
    if !spec.contains('=') && path.is_file() {
        return Ok(parse_function(&std::fs::read_to_string(path)?)?);
    }
    Ok(parse_function(spec)?)
}

fn emit(out: &OutArg, text: &str) -> CliResult<()> {
    match &out.out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn f64_of(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn window_row(e: &WindowEntry) -> String {
    format!(
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.6}\t{:.4}\t{}\t{:.4}\n",
        e.n,
        e.a,
        e.b,
        e.level.c0,
        e.level.c1,
        e.level.bs0,
        e.level.bs1,
        e.growth,
        e.bs_exponent,
        e.hit,
        e.certified_exponent
    )
}

fn random_domain_point(f: &FunctionObject, rng: &mut ChaCha8Rng) -> CliResult<InputPoint> {
    for _ in 0..10_000 {
        let x = InputPoint::new((0..f.n()).map(|_| rng.gen_range(0..f.alphabet())).collect());
        if f.evaluate(&x)?.is_some() {
            return Ok(x);
        }
    }
    Err(CliError::Core(Error::InvalidParameters(
        "could not sample a domain point; pass --input".into(),
    )))
}

fn run(cmd: Cmd) -> CliResult<()> {
    match cmd {
        Cmd::Analyze {
            f,
            input,
            measures,
            out,
        } => {
            let f = load_function(&f.function)?;
            let x = input.as_deref().map(InputPoint::parse_bits).transpose()?;
            let list = measures.unwrap_or_else(|| match x {
                Some(_) => format!("{DEFAULT_MEASURES},{DEFAULT_INPUT_MEASURES}"),
                None => DEFAULT_MEASURES.to_string(),
            });
            let rows = analyze(&f, &parse_measures(&list)?, x.as_ref())?;
            emit(&out, &tsv(&rows))
        }
        Cmd::Search(SearchCmd::Window { nmax, out }) => {
            let s = window_search(nmax)?;
            let head = "n\ta\tb\tC0\tC1\tbs0\tbs1\tgrowth\tbs_exponent\thit\tcertified_exponent\n";
            let mut text = String::from(head);
            s.ranked.iter().for_each(|e| text.push_str(&window_row(e)));
            if !s.unequal.is_empty() {
                text.push_str("# bs0 != bs1, exponents unproven\n");
                s.unequal.iter().for_each(|e| text.push_str(&window_row(e)));
            }
            emit(&out, &text)
        }
        Cmd::Search(SearchCmd::Uniform { budget, seed, out }) => {
            let text = match uniform_measure_search(budget, seed)? {
                Some(t) => {
                    let f = FunctionObject::from_truth_bits(6, t);
                    let check = certlab::search::uniform_measure_check(&f)?;
                    let fc = check.fc_max.map(|v| v.to_string()).unwrap_or_default();
                    format!("table\tFC\n{t:#018x}\t{fc}\n")
                }
                None => "table\tFC\nnone\t-\n".to_string(),
            };
            emit(&out, &text)
        }
        Cmd::Simulate(SimCmd::R0 {
            f,
            trials,
            seed,
            input,
            transcript,
            out,
        }) => {
            let f = load_function(&f.function)?;
            let fixed = input.as_deref().map(InputPoint::parse_bits).transpose()?;
            let mut ev = ZeroErrorEvaluator::new(&f)?;
            let (mut errors, mut queries, mut max_q, mut iters) = (0u64, 0u64, 0usize, 0u64);
            for t in 0..trials {
                let mut rng = trial_rng(seed, t);
                let y = match &fixed {
                    Some(y) => y.clone(),
                    None => random_domain_point(&f, &mut rng)?,
                };
                let r = ev.evaluate(&y, rng.gen())?;
                if f.evaluate(&y)? != Some(r.value) {
                    errors += 1;
                }
                queries += r.queries as u64;
                iters += r.iterations as u64;
                max_q = max_q.max(r.queries);
                if t == 0 {
                    if let Some(p) = &transcript {
                        let lines: String = r.transcript.iter().map(|l| format!("{l}\n")).collect();
                        std::fs::write(p, format!("position\tvalue\trestriction\n{lines}"))?;
                    }
                }
            }
            let tr = trials.max(1) as f64;
            emit(
                &out,
                &format!(
                    "trials\terrors\tmean_queries\tmax_queries\tmean_iterations\n{trials}\t{errors}\t{:.4}\t{max_q}\t{:.4}\n",
                    queries as f64 / tr,
                    iters as f64 / tr
                ),
            )?;
            if errors > 0 {
                return Err(CliError::Verification(format!("{errors} wrong answers")));
            }
            Ok(())
        }
        Cmd::Simulate(SimCmd::Shrink {
            vars,
            trials,
            seed,
            out,
        }) => {
            if vars == 0 || vars > 16 || trials == 0 {
                return Err(Error::InvalidParameters("need 1..=16 variables and at least one trial".into()).into());
            }
            let mut within = 0u64;
            for t in 0..trials {
                let mut rng = trial_rng(seed, t);
                let terms: Vec<(u64, certlab_core::lp::Q)> = (1..1u64 << vars)
                    .filter(|_| rng.gen::<bool>())
                    .map(|m| (m, certlab_core::lp::q(1)))
                    .collect();
                let p = MultilinearPoly::new(vars, terms);
                let bound = shrink_iteration_bound(vars, p.degree().max(1)).floor() as usize;
                if shrink_iterations(&p, &mut FairCoin, rng.gen(), bound + 1) <= bound {
                    within += 1;
                }
            }
            let frac = within as f64 / trials as f64;
            let sigma = (0.25 / trials as f64).sqrt();
            let pass = frac >= 0.5 - 3.0 * sigma;
            emit(
                &out,
                &format!(
                    "trials\twithin_bound\tfraction\tsigma\tpass\n{trials}\t{within}\t{frac:.5}\t{sigma:.5}\t{pass}\n"
                ),
            )?;
            if !pass {
                return Err(CliError::Verification("completion rate below 1/2 - 3σ".into()));
            }
            Ok(())
        }
        Cmd::Simulate(SimCmd::Verifier {
            f,
            input,
            trials,
            seed,
            noise,
            out,
        }) => {
            let f = load_function(&f.function)?;
            let x = InputPoint::parse_bits(&input)?;
            let (_, sol) = fractional_certificate(&f, &x)?;
            let inner = VerifierSpec::doubled(x.clone(), &sol.lambda)?;
            if !(0.0..=1.0).contains(&noise) {
                return Err(Error::InvalidParameters("noise must lie in [0, 1]".into()).into());
            }
            let v = NoisyVerifier {
                inner,
                spurious_reject: noise,
            };
            let vx = f.evaluate(&x)?;
            let bad: Vec<InputPoint> = neighborhood(&f, &x)?
                .into_iter()
                .filter(|y| f.evaluate(y).map(|v| v != vx).unwrap_or(false))
                .collect();
            let r = one_sided_report(&v, &bad, trials, seed);
            let sigma = (0.25 / trials.max(1) as f64).sqrt();
            let bound = r.bound.map(|b| format!("{b:.5}")).unwrap_or_else(|| "-".into());
            emit(
                &out,
                &format!(
                    "eps0\teps1\tbound\tvacuous\tstar_reject_x\tstar_reject_bad\n{:.5}\t{:.5}\t{bound}\t{}\t{:.5}\t{:.5}\n",
                    r.eps0, r.eps1, r.vacuous, r.star_reject_claimed, r.star_reject_bad
                ),
            )?;
            if r.star_reject_claimed > 0.0 {
                return Err(CliError::Verification("V* rejected the claimed input".into()));
            }
            if let (Some(b), false) = (r.bound, r.vacuous) {
                if r.star_reject_bad < b - 3.0 * sigma {
                    return Err(CliError::Verification("V* rejection below the bound".into()));
                }
            }
            Ok(())
        }
        Cmd::Grover { f, input, states, out } => {
            let f = load_function(&f.function)?;
            let x = InputPoint::parse_bits(&input)?;
            let (_, sol) = fractional_certificate(&f, &x)?;
            let lambda: Vec<f64> = sol.lambda.iter().map(f64_of).collect();
            let vx = f.evaluate(&x)?;
            let ys: Vec<InputPoint> = neighborhood(&f, &x)?
                .into_iter()
                .filter(|y| f.evaluate(y).map(|v| v != vx).unwrap_or(false))
                .collect();
            let family: Vec<Vec<usize>> = ys.iter().map(|y| x.disagreement(y)).collect();
            let (budget, m_min) = family_budget(&lambda, states, &family)?;
            let mut text = format!(
                "# FC = {}, budget = {budget}, min marked = {m_min}\nY\tmarked\tbest_k\tsuccess\n",
                sol.value
            );
            for y in &ys {
                let g = GroverInstance::from_points(&lambda, states, &x, y)?;
                let (k, p) = g.best_within(budget);
                let bits: String = y.values().iter().map(|v| v.to_string()).collect();
                text.push_str(&format!("{bits}\t{}\t{k}\t{p:.6}\n", g.marked_states()));
            }
            emit(&out, &text)
        }
        Cmd::Design(DesignCmd::Build { n, gamma, m, seed, out }) => {
            let d = build_design(n, gamma, m, seed)?;
            if !verify_design(&d).passed() {
                return Err(Error::Consistency("built design fails its own check".into()).into());
            }
            emit(&out, &write_design(&d))
        }
        Cmd::Design(DesignCmd::Check { file }) => {
            let d = parse_design(&std::fs::read_to_string(file)?)?;
            match verify_design(&d) {
                DesignCheck::Pass => {
                    println!(
                        "pass\tm={}\tmax_intersection={}\tbound={}",
                        d.m(),
                        d.max_intersection().unwrap_or(0),
                        d.bound
                    );
                    Ok(())
                }
                other => Err(CliError::Verification(format!("{other:?}"))),
            }
        }
        Cmd::Poly { f, out } => {
            let f = load_function(&f.function)?;
            let p = mobius_transform(&f)?;
            let nd = ndeg(&f)?;
            let mut text = format!("poly\t{p}\ndeg\t{}\n", p.degree());
            if !p.is_zero() {
                let maxo = maxonomials(&p)?;
                text.push_str(&format!(
                    "maxonomials\t{}\nomega\t{}\n",
                    maxo.len(),
                    omega_weight(&p.monomials())
                ));
            }
            text.push_str(&format!("ndeg\t{}\t{:?}\n", nd.degree, nd.certificate));
            emit(&out, &text)
        }
        Cmd::Verify(VerifyCmd::Cert { f, input }) => {
            let f = load_function(&f.function)?;
            let x = InputPoint::parse_bits(&input)?;
            let (c, cert) = certificate_complexity(&f, &x)?;
            if !verify_certificate(&f, &cert)? {
                return Err(CliError::Verification("certificate does not fix the value".into()));
            }
            println!("C\tpositions\n{c}\t{:?}", cert.positions);
            Ok(())
        }
        Cmd::Verify(VerifyCmd::Blocks { f, input }) => {
            let f = load_function(&f.function)?;
            let x = InputPoint::parse_bits(&input)?;
            let (bs, set) = block_sensitivity(&f, &x)?;
            if !verify_block_set(&f, &x, &set)? {
                return Err(CliError::Verification("blocks are not disjoint and sensitive".into()));
            }
            println!("bs\tblocks\n{bs}\t{:?}", set.blocks);
            Ok(())
        }
        Cmd::Verify(VerifyCmd::Lp { f, input }) => {
            let f = load_function(&f.function)?;
            let x = InputPoint::parse_bits(&input)?;
            let (lp, sol) = fractional_certificate(&f, &x)?;
            sol.verify(&lp)?;
            let lam: Vec<String> = sol.lambda.iter().map(|v| v.to_string()).collect();
            println!("FC\trows\tlambda\n{}\t{}\t{}", sol.value, lp.rows.len(), lam.join(","));
            Ok(())
        }
        Cmd::Verify(VerifyCmd::Minimax { f, table }) => {
            let f = load_function(&f.function)?;
            let profile = f.profile().ok_or(Error::NotSymmetric)?.to_vec();
            let (p, mm) = match table.as_str() {
                "gap" => {
                    let p = gap_table_g1();
                    let mm = child_hit_minimax(&profile, &p)?;
                    (p, mm)
                }
                "optimal" => optimal_child_table(&profile)?,
                other => return Err(Error::InvalidParameters(format!("unknown table {other:?}")).into()),
            };
            let ps: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            println!("hit\tworst\ttable\n{}\t{:?}\t{}", mm.value, mm.worst, ps.join(","));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
