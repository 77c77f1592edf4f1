use clap::{Args, Parser, Subcommand};
use modsym_lab::config::{Gamma1Choice, RunConfig};
use modsym_lab::eisenstein::{eval_plain, eval_twisted, EisensteinValue, TwistOrder};
use modsym_lab::halfplane::HPoint;
use modsym_lab::pipeline::{CacheStatus, Session};
use modsym_lab::report::{histogram_svg, write_json};
use modsym_lab::stats::{build_distribution, standard_rectangles, summarize};
use modsym_lab::summatory::{counting_constant, fit_counting, moment_sum, odd_moment_decay};
use modsym_lab::verify::Verifier;
use modsym_lab::Error;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "modsym-lab", version, about = "Coset enumeration, modular symbols and their distribution on Gamma0(N)")]
struct Cli {
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

/// Flags that override fields of the configuration document.
#[derive(Args)]
struct Overrides {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long = "N", global = true)]
    level: Option<i64>,
    /// `auto` or `a,b,c,d`.
    #[arg(long, global = true)]
    gamma1: Option<String>,
    /// Reference point `x,y`.
    #[arg(long, global = true)]
    zref: Option<String>,
    #[arg(long = "T", global = true)]
    t: Option<f64>,
    /// Comma-separated, increasing.
    #[arg(long = "Tgrid", global = true)]
    t_grid: Option<String>,
    #[arg(long, global = true)]
    digits: Option<u32>,
    #[arg(long = "U", global = true)]
    u: Option<f64>,
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    coeff_file: Option<PathBuf>,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate cosets up to T and cache them.
    Enumerate,
    /// Compute and cache the symbols of every coset up to T.
    Symbols,
    /// Evaluate a plain or twisted Eisenstein series.
    Eisenstein {
        /// Point `x,y` in the diagonal frame of the generator.
        #[arg(long, default_value = "0,1")]
        z: String,
        /// `re,im` with re > 1.
        #[arg(long, default_value = "2,0")]
        s: String,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value_t = 0)]
        n: u32,
    },
    /// Fit the coset count against the predicted linear law.
    Counting,
    /// Fit an even moment sum and report odd-sum decay.
    Moments {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = 0)]
        n: u32,
    },
    /// Empirical distribution of the normalized symbols.
    Distribution {
        /// Also write a histogram for the largest T.
        #[arg(long)]
        svg: bool,
        /// Also write the samples for the largest T.
        #[arg(long)]
        csv: bool,
    },
    /// Run the acceptance checks.
    Verify {
        /// Exact, oracle and identity checks only.
        #[arg(long)]
        quick: bool,
    },
}

enum Failure {
    Config(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Config(m),
            Error::ContextMismatch(_) => Failure::Config(e.to_string()),
            _ => Failure::Compute(e.to_string()),
        }
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|p| p.trim().parse::<T>().map_err(|_| Failure::Config(format!("cannot parse {what} from {s:?}"))))
        .collect()
}

fn parse_pair(s: &str, what: &str) -> Result<[f64; 2], Failure> {
    let v: Vec<f64> = parse_list(s, what)?;
    v.try_into().map_err(|_| Failure::Config(format!("{what} needs two numbers, got {s:?}")))
}

fn build_config(o: &Overrides) -> Result<RunConfig, Failure> {
    let mut c = match &o.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = o.level {
        c.level = v;
    }
    if let Some(g) = &o.gamma1 {
        c.gamma1 = if g == "auto" {
            Gamma1Choice::Auto
        } else {
            let e: Vec<i64> = parse_list(g, "gamma1")?;
            Gamma1Choice::Explicit(e.try_into().map_err(|_| Failure::Config("gamma1 needs four entries".into()))?)
        };
    }
    if let Some(z) = &o.zref {
        c.z_ref = parse_pair(z, "zref")?;
    }
    if let Some(t) = o.t {
        c.t = t;
    }
    if let Some(g) = &o.t_grid {
        c.t_grid = parse_list(g, "Tgrid")?;
    }
    if let Some(d) = o.digits {
        c.digits = d;
    }
    if let Some(u) = o.u {
        c.u = u;
    }
    if let Some(d) = &o.output_dir {
        c.output_dir = d.clone();
    }
    if let Some(f) = &o.coeff_file {
        c.coeff_file = Some(f.clone());
    }
    if let Some(n) = o.threads {
        c.threads = Some(n);
    }
    c.validate()?;
    Ok(c)
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    command: &'a str,
    config: &'a RunConfig,
    gamma1: [i64; 4],
    mu: f64,
    result: T,
}

fn emit<T: Serialize>(session: &Session, command: &str, result: T) -> Result<(), Failure> {
    let env = Envelope {
        command,
        config: &session.config,
        gamma1: session.context.gamma1.entries(),
        mu: session.context.mu,
        result,
    };
    let path = session.config.output_dir.join(format!("{command}.json"));
    write_json(&path, &env)?;
    println!("report: {}", path.display());
    Ok(())
}

fn cache_word(s: CacheStatus) -> &'static str {
    match s {
        CacheStatus::Hit => "hit",
        CacheStatus::Miss => "miss",
    }
}

fn grid_max(c: &RunConfig) -> Result<f64, Failure> {
    c.t_grid.last().copied().ok_or_else(|| Failure::Config("T_grid is empty".into()))
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let config = build_config(&cli.overrides)?;
    if let Some(n) = config.threads {
        // Fails only if a pool already exists, which cannot happen here.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let mut session = Session::new(config)?;
    match cli.command {
        Command::Enumerate => {
            let t = session.config.t;
            let (en, st) = session.enumeration(t)?;
            let predicted = counting_constant(&en);
            let density = en.len() as f64 / t;
            println!(
                "N={} gamma1={} T={t} cosets={} density={density:.6} predicted={predicted:.6} ratio={:.6} cache={}",
                en.level,
                session.context.gamma1,
                en.len(),
                density / predicted,
                cache_word(st)
            );
            emit(&session, "enumerate", json!({"T": t, "cosets": en.len(), "density": density, "predicted_density": predicted}))?;
        }
        Command::Symbols => {
            let t = session.config.t;
            let (en, _) = session.enumeration(t)?;
            let (table, st) = session.symbols(&en)?;
            let syms = table.for_reps(&en.reps)?;
            let max_err = syms.iter().map(|s| s.abs_err).fold(0.0, f64::max);
            let max_abs = syms.iter().map(|s| s.value.norm()).fold(0.0, f64::max);
            let lattice = session.lattice(&en, &table)?;
            let pn = session.petersson(&lattice);
            println!(
                "T={t} symbols={} max_abs={max_abs:.6} max_err={max_err:e} covolume={:.10} petersson_norm_sq={:.12} cache={}",
                syms.len(),
                lattice.covolume,
                pn.value,
                cache_word(st)
            );
            emit(
                &session,
                "symbols",
                json!({
                    "T": t, "count": syms.len(), "max_abs": max_abs, "max_abs_err": max_err,
                    "lattice": {"w1": [lattice.w1.re, lattice.w1.im], "w2": [lattice.w2.re, lattice.w2.im], "covolume": lattice.covolume},
                    "petersson_norm_sq": pn.value, "petersson_method": pn.method,
                }),
            )?;
        }
        Command::Eisenstein { z, s, m, n } => {
            let [zx, zy] = parse_pair(&z, "z")?;
            let [sr, si] = parse_pair(&s, "s")?;
            let z = HPoint::new(zx, zy)?;
            let s = Complex64::new(sr, si);
            let order = TwistOrder::new(m, n)?;
            let t = session.config.t;
            let (en, _) = session.enumeration(t)?;
            let v: EisensteinValue = if m + n == 0 {
                eval_plain(z, s, &en)?
            } else {
                let (table, _) = session.symbols(&en)?;
                eval_twisted(z, s, order, &en, &table)?
            };
            println!(
                "E(z={zx}+{zy}i, s={s}, m={m}, n={n}; T={t}) = {} (heuristic tail {:e}, {} terms)",
                v.value, v.tail_estimate, v.terms
            );
            emit(&session, "eisenstein", json!({"order": order, "value": v, "tail_estimate_kind": "heuristic"}))?;
        }
        Command::Counting => {
            let (en, _) = session.enumeration(grid_max(&session.config)?)?;
            let fit = fit_counting(&en, &session.config.t_grid)?;
            println!(
                "leading_coeff={:.6} predicted={:.6} rel_dev={:.4}",
                fit.leading_coeff, fit.paper_coeff, fit.rel_dev
            );
            emit(&session, "counting", fit)?;
        }
        Command::Moments { m, n } => {
            let (en, _) = session.enumeration(grid_max(&session.config)?)?;
            let (table, _) = session.symbols(&en)?;
            let lattice = session.lattice(&en, &table)?;
            let pn = session.petersson(&lattice);
            let grid = session.config.t_grid.clone();
            let fit = moment_sum(m, n, &en, &table, &grid, pn.value)?;
            let odd_alpha = odd_moment_decay(1, 0, &en, &table, &grid)?;
            let odd_beta = odd_moment_decay(0, 1, &en, &table, &grid)?;
            println!(
                "(m,n)=({m},{n}) leading_coeff={:e} predicted={:e} |ratio|={:.4} sign_match={}",
                fit.leading_coeff,
                fit.paper_coeff,
                (fit.leading_coeff / fit.paper_coeff).abs(),
                fit.sign_match
            );
            emit(&session, "moments", json!({"fit": fit, "odd_decay": {"alpha": odd_alpha, "beta": odd_beta}}))?;
        }
        Command::Distribution { svg, csv } => {
            let grid = session.config.t_grid.clone();
            let last = grid_max(&session.config)?;
            let (en, _) = session.enumeration(last)?;
            let (table, _) = session.symbols(&en)?;
            let lattice = session.lattice(&en, &table)?;
            let pn = session.petersson(&lattice);
            let normalized = session.normalized(&en, &table, &pn)?;
            let mut reports = Vec::new();
            for &t in &grid {
                let d = build_distribution(&en, &normalized, t)?;
                let r = summarize(&d, &standard_rectangles())?;
                let m = |a, b| r.moments.get(a, b).map_or(f64::NAN, |e| e.value);
                println!(
                    "T={t} n={} M20={:.4} M02={:.4} M40={:.4} M11={:.4} KSx={:.4} KSy={:.4}",
                    r.count,
                    m(2, 0),
                    m(0, 2),
                    m(4, 0),
                    m(1, 1),
                    r.ks_x,
                    r.ks_y
                );
                reports.push(r);
            }
            let d = build_distribution(&en, &normalized, last)?;
            if svg {
                let path = session.config.output_dir.join(format!("distribution_T{last}.svg"));
                std::fs::create_dir_all(&session.config.output_dir).map_err(Error::from)?;
                std::fs::write(&path, histogram_svg(&d)).map_err(Error::from)?;
                println!("histogram: {}", path.display());
            }
            if csv {
                let path = session.config.output_dir.join(format!("distribution_T{last}.csv"));
                std::fs::create_dir_all(&session.config.output_dir).map_err(Error::from)?;
                d.write_csv(&path)?;
                println!("samples: {}", path.display());
            }
            emit(&session, "distribution", json!({"petersson_norm_sq": pn.value, "reports": reports}))?;
        }
        Command::Verify { quick } => {
            let mut verifier = match Verifier::new(session, quick) {
                Ok(v) => v,
                Err(e @ Error::Config(_)) => return Err(e.into()),
                Err(e) => {
                    eprintln!("hard failure while preparing the checks: {e}");
                    return Ok(ExitCode::from(1));
                }
            };
            let verdict = verifier.run_all();
            for c in &verdict.criteria {
                println!("{}", c.line());
            }
            println!("hard failures: {}, trend failures: {}", verdict.hard_failures, verdict.trend_failures);
            emit(&verifier.session, "verify", &verdict)?;
            if !verdict.hard_passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Config(m)) => {
            eprintln!("configuration error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
