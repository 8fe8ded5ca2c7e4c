use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use tautcalc_core::hyperelliptic_db::{HypClassId, Registry};
use tautcalc_core::rational::format as fmt_rational;
use tautcalc_core::verify::{self, Group, VerifyOptions};
use tautcalc_core::{
    b_curve_pairing, conj_pair_family, pair, parse, wk, MarkedSpace, PsiMoment, Rational, TautError,
    TautExpr,
};

/// Exact intersection numbers on moduli spaces of stable curves, genus ≤ 2.
#[derive(Parser)]
#[command(name = "tautcalc", version)]
struct Cli {
    /// Emit JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,

    /// Also print the dual graph of every stratum in an expression result.
    #[arg(long, global = true)]
    dump_graph: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct SpaceArgs {
    /// Genus of the ambient space.
    #[arg(long)]
    g: u32,

    /// Comma-separated marking labels.
    #[arg(long, default_value = "", allow_hyphen_values = true)]
    markings: String,
}

impl SpaceArgs {
    fn space(&self) -> Result<MarkedSpace, TautError> {
        MarkedSpace::new(self.g, split_labels(&self.markings))
    }
}

fn split_labels(text: &str) -> Vec<String> {
    text.split(',').map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect()
}

#[derive(Clone, Copy, ValueEnum)]
enum Curve {
    ConjPair,
    BCurve,
}

#[derive(Subcommand)]
enum Command {
    /// ⟨τ_a1 ... τ_an⟩_g.
    Wk {
        #[arg(long)]
        g: u32,
        /// Comma-separated exponents.
        #[arg(long, default_value = "")]
        exps: String,
    },
    /// Degree of a top-dimensional class.
    Integrate {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Canonical form of an expression.
    Normalize {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Product of two expressions.
    Multiply {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Pushforward along the map forgetting `--label`.
    Push {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        label: String,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Pullback along the map forgetting the new marking `--label`.
    Pull {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, allow_hyphen_values = true)]
        label: String,
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Pair a divisor class with a test curve.
    Pair {
        #[arg(long, value_enum)]
        curve: Curve,
        /// Number of free points p1..pn.
        #[arg(long, default_value_t = 0)]
        free: usize,
        /// Divisor class on M_{2,{+,-,p1..pn}}; not used by the b-curve.
        #[arg(allow_hyphen_values = true)]
        expr: Option<String>,
    },
    /// Registered class of H_{g,l,2m,n}.
    Class {
        #[arg(long, default_value_t = 2)]
        g: u32,
        #[arg(long)]
        ell: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value_t = 0)]
        n: usize,
    },
    /// Rerun the reference computations.
    Verify {
        /// Comma-separated groups: logan, notprop, w-vanishing, b-curve,
        /// omega, ladder, w-pullback, engine.
        #[arg(long)]
        only: Option<String>,
    },
}

enum Output {
    Value(Rational),
    Expr(TautExpr),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<i32, TautError> {
    let out = match &cli.command {
        Command::Wk { g, exps } => {
            let exps = exps
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<u32>().map_err(|_| TautError::Syntax {
                        pos: 0,
                        msg: format!("bad exponent `{s}`"),
                    })
                })
                .collect::<Result<Vec<u32>, _>>()?;
            let m = PsiMoment::new(*g, exps);
            if !m.is_stable() {
                return Err(TautError::InvalidSpace(format!("⟨{:?}⟩_{g} is unstable", m.exponents)));
            }
            Output::Value(wk(&m)?)
        }
        Command::Integrate { space, expr } => Output::Value(parse(&space.space()?, expr)?.integrate()?),
        Command::Normalize { space, expr } => Output::Expr(parse(&space.space()?, expr)?),
        Command::Multiply { space, a, b } => {
            let s = space.space()?;
            Output::Expr(parse(&s, a)?.multiply(&parse(&s, b)?)?)
        }
        Command::Push { space, label, expr } => Output::Expr(parse(&space.space()?, expr)?.pushforward_forget(label)?),
        Command::Pull { space, label, expr } => Output::Expr(parse(&space.space()?, expr)?.pullback_forget(label)?),
        Command::Pair { curve, free, expr } => match curve {
            Curve::ConjPair => {
                let f = conj_pair_family(*free);
                let text = expr.as_deref().ok_or_else(|| TautError::Syntax {
                    pos: 0,
                    msg: "the conj-pair curve needs a divisor expression".into(),
                })?;
                Output::Value(pair(&f, &parse(f.space(), text)?)?)
            }
            Curve::BCurve => {
                let b = b_curve_pairing(*free)?;
                if cli.json {
                    println!(
                        "{}",
                        json!({
                            "value": fmt_rational(&b.value),
                            "up_to_positive_power_of_two": b.up_to_positive_power_of_two,
                            "negative": b.is_negative(),
                            "free_points": b.free_points,
                        })
                    );
                } else {
                    println!("{} (up to a positive power of two)", fmt_rational(&b.value));
                }
                return Ok(0);
            }
        },
        Command::Class { g, ell, m, n } => {
            let id = HypClassId::with_genus(*g, *ell, *m, *n)?;
            let reg = Registry::shared();
            let e = reg.class_of(&id)?;
            let source = &reg.entry(&id).expect("class_of succeeded").source;
            if !cli.json {
                println!("# {id} on {} [{source}]", e.space());
            }
            Output::Expr(e)
        }
        Command::Verify { only } => {
            let mut options = VerifyOptions::default();
            if let Some(only) = only {
                for name in split_labels(only) {
                    let g = Group::from_name(&name).ok_or_else(|| TautError::Syntax {
                        pos: 0,
                        msg: format!("unknown verify group `{name}`"),
                    })?;
                    options.only.push(g);
                }
            }
            let start = Instant::now();
            let report = verify::run(&options);
            if cli.json {
                let checks: Vec<_> = report
                    .checks
                    .iter()
                    .map(|c| {
                        json!({
                            "group": c.group.name(),
                            "name": c.name,
                            "expected": c.expected,
                            "computed": c.computed,
                            "passed": c.passed,
                        })
                    })
                    .collect();
                println!("{}", serde_json::to_string_pretty(&json!({ "passed": report.passed(), "checks": checks })).unwrap());
            } else {
                println!("{report} in {:.1}s", start.elapsed().as_secs_f64());
            }
            return Ok(report.exit_code());
        }
    };
    match out {
        Output::Value(v) => {
            if cli.json {
                println!("{}", json!({ "value": fmt_rational(&v) }));
            } else {
                println!("{}", fmt_rational(&v));
            }
        }
        Output::Expr(e) => {
            if cli.json {
                println!("{}", e.to_json()?);
            } else {
                println!("{e}");
            }
            if cli.dump_graph {
                let n = e.normalize()?;
                for (s, _) in n.strata().expect("canonical") {
                    println!("{}", s.graph().to_json());
                }
            }
        }
    }
    Ok(0)
}
