use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use chainsemi::cache::Cache;
use chainsemi::claims::{self, ClaimSpec, Context, MethodChoice, VerifyRequest, REGISTRY};
use chainsemi::green::{classic_classes, star_classes, Method, Relation};
use chainsemi::output::{write_enumeration, write_report, ClassesDoc};
use chainsemi::{Budget, Config, Error, FamilyTag, OutputFormat, Result};

#[derive(Parser, Debug)]
#[command(
    name = "chainsemi",
    version,
    about = "Partial contraction semigroups on a finite chain"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Directory for cached enumerations.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[arg(long, global = true, default_value_t = Budget::default().max_enumeration_n)]
    max_enumeration_n: u8,

    #[arg(long, global = true, default_value_t = Budget::default().max_oracle_n)]
    max_oracle_n: u8,

    #[arg(long, global = true, default_value_t = Budget::default().max_jstar_n)]
    max_jstar_n: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the canonical ids of a family.
    Enumerate {
        #[arg(long)]
        family: FamilyTag,
        #[arg(long)]
        n: u8,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Partition a family by one of Green's relations.
    Classes {
        #[arg(long)]
        family: FamilyTag,
        #[arg(long)]
        n: u8,
        #[arg(long)]
        relation: Relation,
        #[arg(long, default_value = "characterization")]
        method: MethodChoice,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run registry claims and print a pass/fail table.
    Verify {
        /// `all` or a comma-separated list of claim keys.
        #[arg(long, default_value = "all", value_parser = parse_claims)]
        claims: ClaimList,
        /// Comma-separated families.
        #[arg(long, value_delimiter = ',', default_values_t = FamilyTag::CONTRACTIONS.to_vec())]
        family: Vec<FamilyTag>,
        /// A single size or an inclusive range such as `1..4`.
        #[arg(long, default_value = "1..4", value_parser = parse_range)]
        n: SizeRange,
        #[arg(long, default_value = "both")]
        method: MethodChoice,
        /// Write the JSON report here (`-` for stdout, which moves the table to stderr).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include per-claim runtimes in the JSON report.
        #[arg(long)]
        timings: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
        }
    }
}

#[derive(Debug, Clone)]
struct SizeRange(Vec<u8>);

#[derive(Debug, Clone)]
struct ClaimList(Vec<&'static ClaimSpec>);

fn parse_claims(s: &str) -> std::result::Result<ClaimList, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(ClaimList(REGISTRY.iter().collect()));
    }
    s.split(',')
        .map(|k| claims::lookup(k.trim()).ok_or_else(|| format!("unknown claim '{}'", k.trim())))
        .collect::<std::result::Result<_, _>>()
        .map(ClaimList)
}

fn parse_range(s: &str) -> std::result::Result<SizeRange, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<u8>()
            .map_err(|e| format!("bad size '{t}': {e}"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => (num(s)?, num(s)?),
    };
    if lo == 0 || lo > hi {
        return Err(format!("empty or invalid range '{s}'"));
    }
    Ok(SizeRange((lo..=hi).collect()))
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) if p.as_os_str() != "-" => Box::new(BufWriter::new(File::create(p)?)),
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn config(g: &GlobalArgs) -> Result<Config> {
    let budget = Budget {
        max_enumeration_n: g.max_enumeration_n,
        max_oracle_n: g.max_oracle_n,
        max_jstar_n: g.max_jstar_n,
    };
    budget.validate()?;
    Ok(Config {
        budget,
        cache_dir: g.cache_dir.clone(),
        threads: g.threads,
        ..Config::default()
    })
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = config(&cli.global)?;
    let ctx = Context::new(cfg.budget, cfg.cache_dir.clone().map(Cache::new));
    match cli.command {
        Command::Enumerate {
            family,
            n,
            format,
            out,
        } => {
            let set = ctx.set(family, n)?;
            let mut w = output(&out)?;
            write_enumeration(&mut w, &set, format.into())?;
            w.flush()?;
        }
        Command::Classes {
            family,
            n,
            relation,
            method,
            format,
            out,
        } => {
            let set = ctx.set(family, n)?;
            let doc = if relation.is_starred() {
                let run = |m: Method| -> Result<_> {
                    if relation == Relation::Jstar {
                        Ok(star_classes(&set, relation, m, &cfg.budget)?)
                    } else {
                        Ok((*ctx.classes(family, n, relation, m)?).clone())
                    }
                };
                match method {
                    MethodChoice::Oracle => {
                        ClassesDoc::new(&set, &run(Method::Oracle)?, "oracle", None)
                    }
                    MethodChoice::Characterization if relation == Relation::Jstar => {
                        return Err(Error::UnsupportedRelation(
                            "jstar has no characterization; use --method oracle".into(),
                        ))
                    }
                    MethodChoice::Characterization => ClassesDoc::new(
                        &set,
                        &run(Method::Characterization)?,
                        "characterization",
                        None,
                    ),
                    MethodChoice::Both => {
                        let oracle = run(Method::Oracle)?;
                        let other = if relation == Relation::Jstar {
                            (*ctx.classes(family, n, Relation::Dstar, Method::Oracle)?).clone()
                        } else {
                            run(Method::Characterization)?
                        };
                        let agree = oracle.same_partition(&other);
                        ClassesDoc::new(&set, &oracle, "both", Some(agree))
                    }
                }
            } else {
                ClassesDoc::new(
                    &set,
                    &classic_classes(&set, relation)?,
                    "characterization",
                    None,
                )
            };
            let mut w = output(&out)?;
            doc.write(&mut w, format.into())?;
            w.flush()?;
            if doc.agree == Some(false) {
                eprintln!("oracle and characterization partitions differ");
                return Ok(ExitCode::from(1));
            }
        }
        Command::Verify {
            claims: keys,
            family,
            n,
            method,
            out,
            timings,
        } => {
            cfg.families = family;
            cfg.timings = timings;
            let req = VerifyRequest {
                claims: keys.0,
                families: cfg.families.clone(),
                ns: n.0,
                method,
                timings: cfg.timings,
            };
            let (report, times) = claims::verify(&ctx, &req);
            let table = report.table(&times);
            match &out {
                Some(p) if p.as_os_str() == "-" => {
                    eprint!("{table}");
                    let mut w = output(&out)?;
                    write_report(&mut w, &report)?;
                    w.flush()?;
                }
                Some(_) => {
                    print!("{table}");
                    let mut w = output(&out)?;
                    write_report(&mut w, &report)?;
                    w.flush()?;
                }
                None => print!("{table}"),
            }
            if report.any_failed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.global.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.threads)
            .build_global()
        {
            eprintln!("chainsemi: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("chainsemi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
