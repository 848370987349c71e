mod input;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ksquare::biunitary::{canonical_form, enumerate_biunitaries, extract_ks, is_biunitary, PermMatrix};
use ksquare::bisch::{bisch_projection, build_p_n, permutation_fixed};
use ksquare::exact::q;
use ksquare::groups::{biunitary_from_subgroup, gamma_of, orbit_data, OrbitData};
use ksquare::ladder::{first_relative_commutant, markov_data, GroupLadder};
use ksquare::squares::{intermediate_squares, square_from_biunitary, SquareSpec};
use ksquare::{suite, Error, Report};
use rayon::prelude::*;
use serde_json::{json, Value};

use input::{parse_items, parse_ladder_items, read_text, GroupInput, LadderInput};

#[derive(Parser, Debug)]
#[command(name = "ksquare", version, about = "Exact checks for commuting squares of permutation biunitaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for batch input.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Biunitarity, permutation families and the commuting-square identities.
    Verify { input: Option<PathBuf> },
    /// The families λ, ρ, ν, θ.
    Extract { input: Option<PathBuf> },
    /// Γ, Γ', orbits, stabilizers and the first relative commutant dimension.
    Invariants { input: Option<PathBuf> },
    /// All permutation biunitaries in M_p ⊗ M_k.
    Enumerate {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: usize,
        /// Experimental: keep one representative per (P₁⊗Q₁)U(P₂⊗Q₂) class.
        #[arg(long)]
        canonical: bool,
    },
    /// Biunitary built from permutation group generators.
    FromGroup { input: Option<PathBuf> },
    /// A₁′ ∩ B₀ for the square of a biunitary.
    Relcomm { input: Option<PathBuf> },
    /// The Bisch projection for --p/--k, or its identities for input biunitaries.
    Bisch {
        input: Option<PathBuf>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        /// Build p_n for n up to this value.
        #[arg(long, default_value_t = 0)]
        depth: usize,
    },
    /// Group-model tower, its graph and checks.
    Ladder {
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        depth: usize,
    },
    /// Every check for each input biunitary.
    Report { input: Option<PathBuf> },
}

/// One rendered result.
struct Item {
    json: Value,
    text: String,
    dot: Option<String>,
    pass: bool,
}

impl Item {
    fn data(json: Value, text: String) -> Self {
        Item { json, text, dot: None, pass: true }
    }

    fn report(r: &Report, header: String) -> Self {
        Item { json: to_json(r), text: header + &report_text(r), dot: None, pass: r.all_pass() }
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("plain data serializes")
}

fn report_text(r: &Report) -> String {
    let mut s = String::new();
    for (name, c) in r.iter() {
        s += if c.pass { "PASS " } else { "FAIL " };
        s += name;
        if let Some(d) = &c.details {
            s += &format!(" ({d})");
        }
        s.push('\n');
    }
    s
}

/// The 2×2 corner layout, top row first.
fn square_text(sq: &SquareSpec) -> String {
    let [a0, a1, b0, b1] = sq.labels();
    let w = a0.chars().count().max(b0.chars().count());
    let pad = |s: &str| format!("{s}{}", " ".repeat(w - s.chars().count()));
    let bar = format!("{}{}", "∪", " ".repeat(w.saturating_sub(1)));
    format!("{} ⊂ {b1}\n{bar}   ∪\n{} ⊂ {a1}\n", pad(b0), pad(a0))
}

fn compact(u: &PermMatrix) -> String {
    serde_json::to_string(u).expect("plain data serializes")
}

fn biunitary_gate(u: &PermMatrix) -> Option<Item> {
    if is_biunitary(u) {
        return None;
    }
    let mut r = Report::new();
    r.check("biunitary", false);
    Some(Item::report(&r, format!("{}\n", compact(u))))
}

fn verify(u: &PermMatrix) -> Result<Item, Error> {
    if let Some(item) = biunitary_gate(u) {
        return Ok(item);
    }
    let mut r = Report::new();
    r.check("biunitary", true);
    r.merge("ks", suite::ks_report(u)?);
    r.merge("squares", suite::squares_report(u)?);
    let (lower, upper) = intermediate_squares(u)?;
    let header = format!("{}\n{}\n{}\n", square_text(&upper), square_text(&lower), compact(u));
    Ok(Item::report(&r, header))
}

fn full_report(u: &PermMatrix) -> Result<Item, Error> {
    if let Some(item) = biunitary_gate(u) {
        return Ok(item);
    }
    let mut r = suite::full_report(u)?;
    r.check("biunitary", true);
    Ok(Item::report(&r, format!("{}\n", compact(u))))
}

fn perm_text(name: &str, family: &[ksquare::perm::Perm]) -> String {
    family
        .iter()
        .enumerate()
        .map(|(i, x)| format!("{name}_{} = {}\n", i + 1, serde_json::to_string(x).expect("serializes")))
        .collect()
}

fn extract(u: &PermMatrix) -> Result<Item, Error> {
    let ks = extract_ks(u)?;
    let text = perm_text("lambda", &ks.lambda) + &perm_text("rho", &ks.rho) + &perm_text("nu", &ks.nu) + &perm_text("theta", &ks.theta);
    Ok(Item::data(to_json(&ks), text))
}

fn invariants(u: &PermMatrix) -> Result<Item, Error> {
    let inv = suite::invariants(u)?;
    let h = &inv.group.stabilizers[0];
    let text = format!(
        "|Γ| = {}\n|Ω| = {}\ntransitive = {}\n|H| = {}\ndim A1'∩B0 = {}\n",
        inv.group.order,
        inv.omega,
        inv.group.transitive,
        h.len(),
        inv.relative_commutant_dim
    );
    Ok(Item::data(to_json(&inv), text))
}

fn from_group(g: &GroupInput) -> Result<Item, Error> {
    g.validate()?;
    let u = biunitary_from_subgroup(&g.generators)?;
    Ok(Item::data(to_json(&u), compact(&u) + "\n"))
}

fn relcomm(u: &PermMatrix) -> Result<Item, Error> {
    let sq = square_from_biunitary(u)?;
    let rc = first_relative_commutant(&sq)?;
    let (lower, _) = intermediate_squares(u)?;
    let rc_lower = first_relative_commutant(&lower)?;
    let json = json!({
        "dim": rc.dim(),
        "irreducible": rc.dim() == 1,
        "basis": to_json(&rc.basis()),
        "lower_dim": rc_lower.dim(),
    });
    let text = format!("dim A1'∩B0 = {}\ndim A1'∩B0 (lower square) = {}\n", rc.dim(), rc_lower.dim());
    Ok(Item::data(json, text))
}

fn bisch_identities(u: &PermMatrix) -> Result<Item, Error> {
    if let Some(item) = biunitary_gate(u) {
        return Ok(item);
    }
    Ok(Item::report(&suite::bisch_report(u)?, format!("{}\n", compact(u))))
}

fn bisch_data(p: usize, k: usize, depth: usize) -> Result<Item, Error> {
    let bd = bisch_projection(p, k)?;
    let mut p_n = Vec::new();
    let mut text = format!("p = {p}, k = {k}\n");
    for n in 0..=depth {
        let m = build_p_n(n, p, k)?;
        let tr = m.raw_trace() / ksquare::exact::qi(m.dim() as i64);
        text += &format!("tr(p_{n}) = {tr} in M_{}\n", m.dim());
        p_n.push(json!({"n": n, "dim": m.dim(), "trace": tr.to_string()}));
    }
    let fixed = permutation_fixed(&bd);
    text += &format!("permutation_fixed = {fixed}\n");
    let json = json!({
        "p": p,
        "k": k,
        "q": to_json(&bd.q_matrix),
        "trace": q(1, k as i64).to_string(),
        "p_n": p_n,
        "permutation_fixed": fixed,
    });
    Ok(Item { json, text, dot: None, pass: fixed })
}

fn ladder(inp: &LadderInput, depth: usize) -> Result<Item, Error> {
    let od: OrbitData = match inp {
        LadderInput::Group(g) => gamma_of(&extract_ks(&biunitary_from_subgroup(&g.generators)?)?)?,
        LadderInput::Biunitary(u) => orbit_data(u)?,
    };
    let gl = GroupLadder::build(&od, depth)?;
    let r = gl.check_group_expectations()?;
    let levels: Vec<Value> = gl
        .levels()
        .iter()
        .map(|l| json!({"n": l.n, "ambient": l.ambient, "dim_a": l.a.dim(), "dim_b": l.b.dim(), "dim_c": l.c.dim()}))
        .collect();
    let mut markov = Value::Null;
    if depth >= 1 {
        let sq = gl.grpsq()?;
        let md = markov_data(sq.b0(), sq.b1(), sq.trace())?;
        let uniform = md.amb_trace.windows(2).all(|w| w[0] == w[1]);
        markov = json!({"beta": md.beta.to_string(), "uniform_trace": uniform});
    }
    let g = gl.graph();
    let json = json!({
        "graph": g.to_json(),
        "levels": levels,
        "markov": markov,
        "report": to_json(&r),
    });
    let mut text = format!(
        "|Γ| = {}, p = {}, depth = {}\ngraph: {} vertices, {} edges\n",
        od.gamma.len(),
        gl.p(),
        depth,
        g.vertex_count(),
        g.edge_count()
    );
    if depth >= 1 {
        text += &square_text(&gl.grpsq()?);
    }
    text += &report_text(&r);
    Ok(Item { json, text, dot: Some(g.to_dot()), pass: r.all_pass() })
}

/// Runs `f` over `items` on a pool of `jobs` threads, keeping input order.
fn run_batch<T: Sync>(items: &[T], jobs: u16, f: impl Fn(&T) -> Result<Item, Error> + Sync) -> Result<Vec<Item>, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs as usize)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let results: Vec<Result<Item, Error>> = pool.install(|| items.par_iter().map(&f).collect());
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            r.map_err(|e| {
                if items.len() > 1 {
                    prefix_error(e, &format!("item {}", i + 1))
                } else {
                    e
                }
            })
        })
        .collect()
}

fn prefix_error(e: Error, prefix: &str) -> Error {
    match e {
        Error::Input(m) => Error::Input(format!("{prefix}: {m}")),
        Error::Capacity(m) => Error::Capacity(format!("{prefix}: {m}")),
        Error::DegenerateTrace(m) => Error::DegenerateTrace(format!("{prefix}: {m}")),
        Error::Structure(m) => Error::Structure(format!("{prefix}: {m}")),
        Error::Internal(m) => Error::Internal(format!("{prefix}: {m}")),
        Error::Violation(m) => Error::Violation(format!("{prefix}: {m}")),
        Error::Scope(m) => Error::Scope(format!("{prefix}: {m}")),
        Error::OutOfScope(m) => Error::OutOfScope(format!("{prefix}: {m}")),
    }
}

fn render(items: Vec<Item>, batch: bool, format: Format) -> Result<(String, bool), Error> {
    let pass = items.iter().all(|i| i.pass);
    let out = match format {
        Format::Json => {
            let v = if batch {
                Value::Array(items.into_iter().map(|i| i.json).collect())
            } else {
                items.into_iter().next().map(|i| i.json).unwrap_or(Value::Null)
            };
            serde_json::to_string_pretty(&v).expect("serializes") + "\n"
        }
        Format::Text => items.into_iter().map(|i| i.text).collect::<Vec<_>>().join("\n"),
        Format::Dot => {
            let dots = items.into_iter().map(|i| i.dot).collect::<Option<Vec<_>>>();
            dots.ok_or_else(|| Error::Input("DOT output is only available for the ladder command".into()))?
                .concat()
        }
    };
    Ok((out, pass))
}

fn run(cli: Cli) -> Result<(String, bool), Error> {
    let jobs = cli.jobs;
    let biunitaries = |input: &Option<PathBuf>, f: fn(&PermMatrix) -> Result<Item, Error>| {
        let (items, batch) = parse_items::<PermMatrix>(&read_text(input.as_deref())?)?;
        Ok::<_, Error>((run_batch(&items, jobs, f)?, batch))
    };
    let (items, batch) = match &cli.command {
        Command::Verify { input } => biunitaries(input, verify)?,
        Command::Extract { input } => biunitaries(input, extract)?,
        Command::Invariants { input } => biunitaries(input, invariants)?,
        Command::Relcomm { input } => biunitaries(input, relcomm)?,
        Command::Report { input } => biunitaries(input, full_report)?,
        Command::FromGroup { input } => {
            let (items, batch) = parse_items::<GroupInput>(&read_text(input.as_deref())?)?;
            (run_batch(&items, jobs, from_group)?, batch)
        }
        Command::Enumerate { p, k, canonical } => {
            let mut all = enumerate_biunitaries(*p, *k)?;
            if *canonical {
                let reps = run_batch(&all, jobs, |u| Ok(Item::data(to_json(&canonical_form(u)?), String::new())))?;
                all = reps
                    .into_iter()
                    .map(|i| serde_json::from_value(i.json).map_err(|e| Error::Internal(e.to_string())))
                    .collect::<Result<Vec<PermMatrix>, Error>>()?;
                all.sort();
                all.dedup();
            }
            let items = all.iter().map(|u| Item::data(to_json(u), compact(u) + "\n")).collect();
            (items, true)
        }
        Command::Bisch { input, p, k, depth } => match (input, p, k) {
            (None, Some(p), Some(k)) => (vec![bisch_data(*p, *k, *depth)?], false),
            (Some(_), None, None) => biunitaries(input, bisch_identities)?,
            _ => return Err(Error::Input("bisch takes either --p and --k or an input file".into())),
        },
        Command::Ladder { input, depth } => {
            let (items, batch) = parse_ladder_items(&read_text(input.as_deref())?)?;
            let depth = *depth;
            (run_batch(&items, jobs, |x| ladder(x, depth))?, batch)
        }
    };
    render(items, batch, cli.format)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, pass)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(2);
            }
            ExitCode::from(if pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
