use std::io::{Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use jetform::frontend::json::{form_json, VERSION};
use jetform::frontend::print::{form_latex, form_text};
use jetform::frontend::{parser, verify, Names};
use jetform::interior_euler::{interior_euler, residual_lower, residual_top};
use jetform::lepage::{self, IbpPolicy, Lagrangian};
use jetform::varmorph::{self, FormSign};
use jetform::{BundleContext, Form, JetError};

#[derive(Parser)]
#[command(name = "jetform", version, about = "Variational calculus on jet bundles")]
struct Cli {
    /// Base dimension n
    #[arg(long, global = true, default_value_t = 2)]
    base_dim: u8,
    /// Fiber dimension m
    #[arg(long, global = true, default_value_t = 1)]
    fiber_dim: u8,
    /// Highest jet order accepted in the input
    #[arg(long, global = true, default_value_t = 1)]
    order: u8,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Comma-separated field names, one per fiber coordinate
    #[arg(long, global = true)]
    fields: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Latex,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    Plain,
    Generalized,
    /// Equal sharing among contact factors; closed for null Lagrangians
    Symmetric,
}

#[derive(Subcommand)]
enum Command {
    /// Contact components p_0 .. p_q of a form
    Decompose { form: String },
    /// Interior Euler operator of the top contact component
    Ieuler {
        form: String,
        /// Contact degree (defaults to the highest present)
        #[arg(long)]
        contact: Option<usize>,
    },
    /// Residual operator; codegree 0 is the top-degree operator
    Residual {
        form: String,
        #[arg(long, default_value_t = 0)]
        codegree: usize,
        #[arg(long)]
        contact: Option<usize>,
    },
    /// Canonical splitting of the morphism of a 1-contact form
    Split { form: String },
    /// Splitting read off integration by parts
    Splitlike { form: String },
    /// Discrepancy between the two rank-2, codegree-1 splittings
    Alpha { form: String },
    /// Poincaré–Cartan form of a Lagrangian density
    Pc { lagrangian: String },
    /// Lepage equivalent from the full recurrence
    Kb {
        lagrangian: String,
        #[arg(long, value_enum, default_value_t = Variant::Plain)]
        variant: Variant,
    },
    /// Euler–Lagrange form
    El { lagrangian: String },
    /// Check a named identity on seeded random input
    Verify {
        /// One of the named identities, or "all"
        #[arg(long, default_value = "all")]
        identity: String,
        /// Number of consecutive seeds starting at --seed
        #[arg(long, default_value_t = 1)]
        seeds: u64,
    },
}

enum Failure {
    Usage(String),
    Fail,
}

impl From<JetError> for Failure {
    fn from(e: JetError) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Out<'a> {
    format: Format,
    n: u8,
    names: &'a Names,
    parts: Vec<(String, Form)>,
}

impl Out<'_> {
    fn push(&mut self, label: &str, f: Form) {
        self.parts.push((label.to_string(), f));
    }

    fn render(&self) -> String {
        match self.format {
            Format::Text => {
                if self.parts.len() == 1 {
                    form_text(&self.parts[0].1, self.n, self.names)
                } else {
                    let lines: Vec<String> = self.parts.iter().map(|(l, f)| format!("{}: {}", l, form_text(f, self.n, self.names))).collect();
                    lines.join("\n")
                }
            }
            Format::Latex => {
                if self.parts.len() == 1 {
                    form_latex(&self.parts[0].1, self.n, self.names)
                } else {
                    let lines: Vec<String> = self
                        .parts
                        .iter()
                        .map(|(l, f)| format!("\\mathrm{{{}}} = {}", l.replace('_', "\\_"), form_latex(f, self.n, self.names)))
                        .collect();
                    lines.join("\n")
                }
            }
            Format::Json => {
                let v = if self.parts.len() == 1 {
                    form_json(&self.parts[0].1, self.names)
                } else {
                    let parts: Vec<Value> = self.parts.iter().map(|(l, f)| json!({"label": l, "form": form_json(f, self.names)})).collect();
                    json!({"version": VERSION, "parts": parts})
                };
                serde_json::to_string_pretty(&v).expect("json values always serialize")
            }
        }
    }
}

fn read_arg(s: &str) -> Result<String, Failure> {
    if s == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).map_err(|e| Failure::Usage(format!("reading stdin: {}", e)))?;
        Ok(buf)
    } else {
        Ok(s.to_string())
    }
}

fn names_for(cli: &Cli) -> Result<Names, Failure> {
    match &cli.fields {
        None => Ok(Names::default_for(cli.fiber_dim)),
        Some(list) => {
            let v: Vec<&str> = list.split(',').map(str::trim).collect();
            if v.len() != cli.fiber_dim as usize {
                return Err(Failure::Usage(format!("--fields lists {} names for fiber dimension {}", v.len(), cli.fiber_dim)));
            }
            Ok(Names::custom(&v))
        }
    }
}

fn top_contact(f: &Form, given: Option<usize>) -> usize {
    given.unwrap_or_else(|| f.max_contact_degree().max(1))
}

fn run(cli: &Cli) -> Result<String, Failure> {
    if cli.base_dim == 0 || cli.fiber_dim == 0 {
        return Err(Failure::Usage("--base-dim and --fiber-dim must be positive".into()));
    }
    let names = names_for(cli)?;
    let n = cli.base_dim;
    let ctx = BundleContext::new(n, cli.fiber_dim, cli.order);
    let mut out = Out {
        format: cli.format,
        n,
        names: &names,
        parts: Vec::new(),
    };
    let form = |s: &str| -> Result<Form, Failure> { Ok(parser::parse_form(&read_arg(s)?, &ctx, &names)?) };
    let lagrangian = |s: &str| -> Result<Lagrangian, Failure> { Ok(Lagrangian::new(parser::parse_expr(&read_arg(s)?, &ctx, &names)?)?) };

    match &cli.command {
        Command::Decompose { form: src } => {
            let f = form(src)?;
            for k in 0..=f.max_contact_degree() {
                out.push(&format!("p{}", k), f.p(k));
            }
        }
        Command::Ieuler { form: src, contact } => {
            let f = form(src)?;
            let k = top_contact(&f, *contact);
            out.push("I", interior_euler(&f, k, &ctx)?);
        }
        Command::Residual { form: src, codegree, contact } => {
            let f = form(src)?;
            let k = top_contact(&f, *contact);
            let r = if *codegree == 0 { residual_top(&f, k, &ctx)? } else { residual_lower(&f, k, *codegree, &ctx)? };
            out.push("R", r);
        }
        Command::Split { form: src } => {
            let v = varmorph::from_contact_form(&form(src)?, &ctx)?;
            let sp = if v.s == 0 { varmorph::split_codegree0(&v, &ctx)? } else { varmorph::split_canonical_codegree_s(&v, &ctx)? };
            out.push("volume", sp.volume.to_contact_form(FormSign::Plain));
            out.push("boundary", sp.boundary.to_contact_form(FormSign::Plain));
        }
        Command::Splitlike { form: src } => {
            let v = varmorph::from_contact_form(&form(src)?, &ctx)?;
            let sp = varmorph::split_like(&v, &ctx)?;
            out.push("volume", sp.volume.to_contact_form(FormSign::Plain));
            out.push("boundary", sp.boundary.to_contact_form(FormSign::Plain));
        }
        Command::Alpha { form: src } => {
            let f = form(src)?;
            let v = varmorph::from_contact_form(&f, &ctx)?;
            // a morphism read from a form only records the ranks present in it
            let v = varmorph::VariationalMorphism::new(v.coeffs, 2);
            let res = varmorph::alpha_discrepancy(&v, &ctx)?;
            out.push("alpha", res.alpha.to_contact_form(FormSign::Plain));
            out.push("D_alpha", res.d_alpha.to_contact_form(FormSign::Plain));
        }
        Command::Pc { lagrangian: src } => {
            out.push("theta", lepage::poincare_cartan(&lagrangian(src)?, &ctx)?);
        }
        Command::Kb { lagrangian: src, variant } => {
            let l = lagrangian(src)?;
            let policy = match variant {
                Variant::Plain => IbpPolicy::Plain,
                Variant::Generalized => IbpPolicy::Generalized,
                Variant::Symmetric => IbpPolicy::Symmetric,
            };
            // at first order only the generalized grouping telescopes every ω_j
            let policy = if l.order == 1 && policy == IbpPolicy::Plain { IbpPolicy::Generalized } else { policy };
            let seq = lepage::rossi_sequence(&l, policy, &ctx)?;
            out.push("rho", seq.last().cloned().unwrap_or_else(|| l.form(&ctx)));
        }
        Command::El { lagrangian: src } => {
            out.push("E", lepage::euler_lagrange(&lagrangian(src)?, &ctx)?);
        }
        Command::Verify { identity, seeds } => return verify_cmd(cli, identity, *seeds, &names),
    }
    Ok(out.render())
}

fn verify_cmd(cli: &Cli, identity: &str, seeds: u64, names: &Names) -> Result<String, Failure> {
    let ids: Vec<&str> = if identity == "all" { verify::IDENTITIES.to_vec() } else { vec![identity] };
    let mut lines = Vec::new();
    let mut docs = Vec::new();
    let mut failed = false;
    for id in ids {
        for seed in cli.seed..cli.seed + seeds.max(1) {
            let o = verify::run(id, cli.base_dim, cli.fiber_dim, seed)?;
            failed |= !o.pass();
            let status = if o.pass() { "PASS" } else { "FAIL" };
            lines.push(format!("{} {} n={} m={} seed={} checks={}", status, id, cli.base_dim, cli.fiber_dim, seed, o.checks));
            let failure = o.failure.as_ref().map(|(label, diff)| {
                lines.push(format!("  {}: difference {}", label, form_text(diff, cli.base_dim, names)));
                json!({"check": label, "difference": form_text(diff, cli.base_dim, names)})
            });
            docs.push(json!({
                "identity": id, "n": cli.base_dim, "m": cli.fiber_dim, "seed": seed,
                "pass": o.pass(), "checks": o.checks, "failure": failure,
            }));
        }
    }
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&json!({"version": VERSION, "results": docs})).expect("json values always serialize"),
        _ => lines.join("\n"),
    };
    if failed {
        emit(&text);
        Err(Failure::Fail)
    } else {
        Ok(text)
    }
}

// a closed pipe downstream is not an error worth reporting
fn emit(s: &str) {
    let _ = writeln!(std::io::stdout(), "{}", s);
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(s) => {
            emit(&s);
            ExitCode::SUCCESS
        }
        Err(Failure::Fail) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {}", msg);
            ExitCode::from(2)
        }
    }
}
