use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use pencilform::construct::{lemma_a2_pair, realize_pair, segre_pair, SegreSpec};
use pencilform::nonsym::nonsym_equivalent_with;
use pencilform::oracle::DEFAULT_BUDGET;
use pencilform::slorbit::Existence;
use pencilform::{
    algebra_of, brute_equivalent, enumerate_orbits, existence_search, gs_act, gs_order,
    module_type, scheme_of, segre_symbol, sl_orbit_count, stabilizer, sym_equivalent,
    sym_invariant, BinaryForm, Constraint, Error, Exec, Field, Group, Mode, ModuleType,
    OracleConfig, Pencil, Result, SchemeS,
};

/// Classification of regular matrix pencils under GL and SL congruence.
///
/// Inputs given with -i/-j (and the JSON-valued flags) are inline JSON when they start with
/// '{' or '[', standard input when they are '-', and file paths otherwise. Every command writes
/// one JSON document. Exit codes: 0 success, 2 invalid input, 3 unsupported or over budget.
#[derive(Parser, Debug)]
#[command(name = "pencilform", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// Field descriptor: q, fp:<p>, fq:<p>:<d> or fq:<p>:<d>:<c0,...,1>. Defaults to the
    /// input document's "field".
    #[arg(short = 'f', long, global = true)]
    field: Option<String>,
    /// Primary input.
    #[arg(short = 'i', long, global = true)]
    input: Option<String>,
    /// Second input (equiv).
    #[arg(short = 'j', long = "input2", global = true)]
    input2: Option<String>,
    /// Write the result here instead of standard output.
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
    /// Seed for randomized steps. All current algorithms are deterministic, so it is
    /// accepted for reproducible scripts and otherwise unused.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Discriminant det(X0 M0 + X1 M1) of a pencil.
    Disc,
    /// Discriminant scheme of a pencil or of a binary form {"coeffs": [...]}.
    Scheme,
    /// Elementary divisors per closed point.
    ModuleType,
    /// Segre symbol.
    Segre,
    /// GL-congruence invariant of a symmetric pencil (odd characteristic).
    Invariant,
    /// Are the pencils -i and -j congruent?
    Equiv {
        /// Treat the pencils as general pairs even when both are symmetric.
        #[arg(long)]
        general: bool,
        /// Congruence group for oracle fallbacks.
        #[arg(long, value_enum, default_value_t = GroupArg::Gl)]
        group: GroupArg,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Build a symmetric pencil from a discriminant, Segre data or a module type.
    Construct {
        /// Binary form {"coeffs": [c_0, ..., c_d]} with c_i the coefficient of X0^i X1^(d-i).
        #[arg(long, group = "source")]
        disc: Option<String>,
        /// {"points": [{"u": .., "v": .., "partition": [..]} | {"point": [..], "partition": [..]}]}
        #[arg(long, group = "source")]
        segre: Option<String>,
        /// Module type as printed by module-type.
        #[arg(long = "type", group = "source")]
        module_type: Option<String>,
    },
    /// Number of SL-orbits of free symmetric pencils with discriminant exactly -i.
    SlCount,
    /// Search for (u, alpha) solving the norm equation for the discriminant -i.
    SlExists {
        /// Coefficient bound for the search over Q.
        #[arg(long, default_value_t = 10)]
        bound: u64,
    },
    /// Stabilizer of a free symmetric pencil in SL, from its scheme (-i is a pencil or a form).
    SlStabilizer,
    /// Act on a free symmetric pencil by (u, alpha) in G_S.
    GsAct {
        /// Scalar u.
        #[arg(long)]
        u: String,
        /// alpha: one coefficient array per point of the scheme, or {"global": [...]}.
        #[arg(long)]
        alpha: String,
    },
    /// Exhaustive orbit table over a small finite field.
    Oracle {
        /// Pencils are (n+1) x (n+1).
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = GroupArg::Gl)]
        group: GroupArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Symmetric)]
        mode: ModeArg,
        /// Keep pencils whose discriminant has the scheme of this form.
        #[arg(long, group = "constraint")]
        scheme_of: Option<String>,
        /// Keep pencils with exactly this discriminant (SL only).
        #[arg(long = "fixed-disc", group = "constraint")]
        fixed_disc: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Disable the parallel enumeration.
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GroupArg {
    Gl,
    Sl,
}

impl From<GroupArg> for Group {
    fn from(g: GroupArg) -> Group {
        match g {
            GroupArg::Gl => Group::GL,
            GroupArg::Sl => Group::SL,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Symmetric,
    General,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Jsonl,
}

fn load(src: &str) -> Result<Value> {
    let text = if src.trim_start().starts_with(['{', '[', '"']) {
        src.to_string()
    } else if src == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Parse(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(src).map_err(|e| Error::Parse(format!("{src}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref()
        .ok_or_else(|| Error::InvalidInput(format!("{flag} is required")))
}

/// Field from -f, else from the document.
fn field_of(c: &Common, doc: Option<&Value>) -> Result<Field> {
    if let Some(f) = &c.field {
        return Field::parse(f);
    }
    match doc.and_then(|d| d.get("field")).and_then(|f| f.as_str()) {
        Some(f) => Field::parse(f),
        None => Err(Error::InvalidInput(
            "no field: pass -f or include \"field\" in the input".into(),
        )),
    }
}

fn pencil_arg(c: &Common, src: &str) -> Result<Pencil> {
    let v = load(src)?;
    let k = c.field.as_deref().map(Field::parse).transpose()?;
    Pencil::from_json(&v, k.as_ref())
}

fn pencil(c: &Common) -> Result<Pencil> {
    pencil_arg(c, required(&c.input, "-i")?)
}

fn form_arg(c: &Common, src: &str) -> Result<BinaryForm> {
    let v = load(src)?;
    BinaryForm::from_json(&field_of(c, Some(&v))?, &v)
}

/// Scheme of a pencil document (has "M0") or of a form document.
fn scheme_input(c: &Common) -> Result<(SchemeS, Option<BinaryForm>)> {
    let src = required(&c.input, "-i")?;
    let v = load(src)?;
    if v.get("M0").is_some() {
        let k = c.field.as_deref().map(Field::parse).transpose()?;
        let m = Pencil::from_json(&v, k.as_ref())?;
        let d = m.disc();
        Ok((scheme_of(&d)?, Some(d)))
    } else {
        let f = BinaryForm::from_json(&field_of(c, Some(&v))?, &v)?;
        Ok((scheme_of(&f)?, Some(f)))
    }
}

enum Out {
    Json(Value),
    Lines(String),
}

fn run(cli: &Cli) -> Result<Out> {
    let c = &cli.common;
    let Cmd::Oracle {
        n,
        group,
        mode,
        scheme_of: so,
        fixed_disc,
        budget,
        format,
        sequential,
    } = &cli.cmd
    else {
        return run_json(cli).map(Out::Json);
    };
    let k = field_of(c, None)?;
    let constraint = if let Some(f) = so {
        Constraint::FixedScheme(scheme_of(&form_arg(c, f)?)?)
    } else if let Some(f) = fixed_disc {
        Constraint::FixedDisc(form_arg(c, f)?)
    } else {
        Constraint::All
    };
    let mode = match mode {
        ModeArg::Symmetric => Mode::Symmetric,
        ModeArg::General => Mode::General,
    };
    let exec = if *sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    let cfg = OracleConfig {
        budget: *budget,
        exec,
    };
    let t = enumerate_orbits(&k, *n, (*group).into(), mode, &constraint, &cfg)?;
    Ok(match format {
        Format::Json => Out::Json(t.to_json()),
        Format::Jsonl => Out::Lines(t.to_jsonl()),
    })
}

fn run_json(cli: &Cli) -> Result<Value> {
    let c = &cli.common;
    match &cli.cmd {
        Cmd::Disc => {
            let m = pencil(c)?;
            Ok(json!({"disc": m.disc().to_json()}))
        }
        Cmd::Scheme => {
            let (s, _) = scheme_input(c)?;
            Ok(json!({"scheme": s.to_json()}))
        }
        Cmd::ModuleType => {
            let m = pencil(c)?;
            let t = module_type(&m)?;
            Ok(json!({"module_type": t.to_json(), "free": t.is_free()}))
        }
        Cmd::Segre => {
            let m = pencil(c)?;
            Ok(json!({"segre": segre_symbol(&m)?.to_json()}))
        }
        Cmd::Invariant => {
            let m = pencil(c)?;
            Ok(json!({"invariant": sym_invariant(&m)?.to_json()}))
        }
        Cmd::Equiv {
            general,
            group,
            budget,
        } => {
            let a = pencil(c)?;
            let b = pencil_arg(c, required(&c.input2, "-j")?)?;
            let cfg = OracleConfig {
                budget: *budget,
                exec: Exec::default(),
            };
            let group: Group = (*group).into();
            let k = a.field();
            let (eq, method) = if group == Group::SL {
                (brute_equivalent(&a, &b, Group::SL, &cfg)?, "oracle")
            } else if !general && a.is_symmetric() && b.is_symmetric() {
                if k.is_finite() && k.characteristic() != 2 {
                    (sym_equivalent(&a, &b)?, "invariant")
                } else if k.is_finite() {
                    (brute_equivalent(&a, &b, Group::GL, &cfg)?, "oracle")
                } else {
                    return Err(Error::Unsupported("symmetric equivalence over Q".into()));
                }
            } else {
                let (e, m) = nonsym_equivalent_with(&a, &b, &cfg)?;
                (e, m.name())
            };
            Ok(json!({"equivalent": eq, "method": method}))
        }
        Cmd::Construct {
            disc,
            segre,
            module_type: ty,
        } => {
            let m = if let Some(d) = disc {
                lemma_a2_pair(&form_arg(c, d)?)?
            } else if let Some(s) = segre {
                let v = load(s)?;
                segre_pair(&SegreSpec::from_json(&field_of(c, Some(&v))?, &v)?)?
            } else if let Some(t) = ty {
                let v = load(t)?;
                let inner = v.get("module_type").unwrap_or(&v);
                realize_pair(&ModuleType::from_json(&field_of(c, Some(&v))?, inner)?)?
            } else {
                return Err(Error::InvalidInput(
                    "one of --disc, --segre, --type is required".into(),
                ));
            };
            Ok(m.to_json())
        }
        Cmd::SlCount => {
            let (s, f) = scheme_input(c)?;
            let f = f.expect("scheme input always carries a form");
            let l = algebra_of(&s);
            let cnt = sl_orbit_count(&s, &f)?;
            Ok(json!({
                "count": cnt.count,
                "solutions": cnt.solutions,
                "gs_order": gs_order(&s)?,
                "algebra": l.to_json(),
                "labels": cnt.labels.iter().map(|g| json!({"u": s.field().to_json(&g.u), "alpha": l.elem_to_json(&g.alpha)})).collect::<Vec<_>>(),
            }))
        }
        Cmd::SlExists { bound } => {
            let (s, f) = scheme_input(c)?;
            let f = f.expect("scheme input always carries a form");
            let l = algebra_of(&s);
            Ok(match existence_search(&s, &f, *bound)? {
                Existence::Witness(g) => json!({
                    "exists": true,
                    "status": "witness",
                    "witness": {"u": s.field().to_json(&g.u), "alpha": l.elem_to_json(&g.alpha)},
                }),
                Existence::None => {
                    json!({"exists": false, "status": "no solution", "witness": null})
                }
                Existence::Unknown => {
                    json!({"exists": null, "status": "no witness within bound", "bound": bound, "witness": null})
                }
            })
        }
        Cmd::SlStabilizer => {
            let (s, _) = scheme_input(c)?;
            let l = algebra_of(&s);
            let st = stabilizer(&s)?;
            Ok(json!({
                "size": st.size,
                "method": st.method,
                "elements": st.elements.iter().map(|e| l.elem_to_json(e)).collect::<Vec<_>>(),
            }))
        }
        Cmd::GsAct { u, alpha } => {
            let m = pencil(c)?;
            let k = m.field().clone();
            let u = k.from_json(&load(u).or_else(|_| {
                serde_json::from_str::<Value>(u).map_err(|e| Error::Parse(e.to_string()))
            })?)?;
            let l = algebra_of(&m.scheme()?);
            let a = l.elem_from_json(&load(alpha)?)?;
            Ok(gs_act(&m, &u, &a)?.to_json())
        }
        Cmd::Oracle { .. } => unreachable!("handled in run"),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let msg = e.render().to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            println!("{}", json!({"error": {"kind": "Usage", "message": first}}));
            return ExitCode::from(2);
        }
    };
    let (text, code) = match run(&cli) {
        Ok(Out::Json(v)) => (format!("{v}\n"), 0u8),
        Ok(Out::Lines(s)) => (s, 0),
        Err(e) => (
            format!(
                "{}\n",
                json!({"error": {"kind": e.kind(), "message": e.to_string()}})
            ),
            e.exit_code() as u8,
        ),
    };
    match &cli.common.output {
        Some(p) if code == 0 => {
            if let Err(e) = std::fs::write(p, &text) {
                let err =
                    json!({"error": {"kind": "Io", "message": format!("{}: {e}", p.display())}});
                println!("{err}");
                return ExitCode::from(2);
            }
        }
        _ => print!("{text}"),
    }
    ExitCode::from(code)
}
