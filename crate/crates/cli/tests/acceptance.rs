//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use ksquare::biunitary::{enumerate_biunitaries, extract_ks, PermMatrix};
use ksquare::bisch::{bisch_projection, build_p_n, permutation_fixed};
use ksquare::exact::{q, qi, TraceForm};
use ksquare::groups::{biunitary_from_subgroup, gamma_of};
use ksquare::ladder::{markov_data, GroupLadder};
use ksquare::perm::{closure, Perm};
use ksquare::suite::full_report;
use serde_json::Value;

fn ksquare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ksquare")).args(args).output().expect("binary runs")
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut v: Vec<usize> = (0..n).collect();
    loop {
        out.push(v.clone());
        let Some(i) = (1..n).rev().find(|&i| v[i - 1] < v[i]) else { break };
        let j = (i..n).rev().find(|&j| v[j] > v[i - 1]).unwrap();
        v.swap(i - 1, j);
        v[i..].reverse();
    }
    out
}

fn block_transpose_is_permutation(p: usize, k: usize, map: &[usize]) -> bool {
    let mut rows = vec![false; p * k];
    let mut cols = vec![false; p * k];
    for (col, &row) in map.iter().enumerate() {
        let (alpha, a) = (col / k, col % k);
        let (beta, b) = (row / k, row % k);
        let (r, c) = (alpha * k + b, beta * k + a);
        if rows[r] || cols[c] {
            return false;
        }
        rows[r] = true;
        cols[c] = true;
    }
    true
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(t < limit, format!("{what} took {t:.1?}, limit {limit:?}"))
}

fn enumeration_oracle() -> Outcome {
    let mut notes = Vec::new();
    for (p, k) in [(1, 1), (2, 1), (1, 2), (2, 2), (2, 3), (3, 2), (3, 3)] {
        let start = Instant::now();
        let oracle: BTreeSet<Vec<usize>> =
            permutations(p * k).into_iter().filter(|m| block_transpose_is_permutation(p, k, m)).collect();
        let sweep = start.elapsed();
        let fast: BTreeSet<Vec<usize>> =
            enumerate_biunitaries(p, k).map_err(|e| e.to_string())?.iter().map(|u| u.map().to_vec()).collect();
        ensure(fast == oracle, format!("({p},{k}): enumeration differs from brute force"))?;
        if (p, k) == (2, 2) {
            ensure(fast.len() == 12, format!("(2,2) gave {}", fast.len()))?;
        }
        if (p, k) == (3, 3) {
            within(sweep, Duration::from_secs(60), "(3,3) brute-force sweep")?;
            notes.push(format!("(3,3): {} biunitaries, sweep {sweep:.1?}", fast.len()));
        }
    }
    Ok(notes.join("; "))
}

const REQUIRED: &[&str] = &[
    "biunitary",
    "ks.reconstruct_from_lambda_rho",
    "ks.reconstruct_adjoint_from_nu_theta",
    "squares.sq.commuting",
    "squares.sq.symmetric",
    "squares.lower.commuting",
    "squares.lower.symmetric",
    "squares.upper.commuting",
    "squares.upper.symmetric",
    "squares.intsq.lowsq2.middle_row_equal",
    "squares.intsq.upsq2.top_left",
    "squares.intsq.upsq2.top_right",
    "squares.intsq.upsq2.bottom_left",
    "squares.intsq.upsq2.bottom_right",
    "squares.dual.duabc.u_tilde_matrix",
    "squares.dual.dlowsq.u_tilde_equals_lambda",
    "squares.dual.lambda_fixes_1⊗e",
    "bisch.pdiagram.pdiagram.branches_agree",
    "bisch.pdiagram.lemma5",
    "bisch.qprop.qprop.commutant",
    "bisch.qprop.qprop1.span",
    "bisch.qprop.level1.C1=E_p(A1)",
];

const GROUP_KEYS: &[&str] = &[
    "groups.omega_equals_components",
    "groups.q_r.projections",
    "groups.q_r.mutually_orthogonal",
    "groups.q_r.sum_to_identity",
    "groups.q_r_in_A1'∩B0",
    "groups.omega_at_most_rc_dim",
    "groups.irreducible_implies_transitive",
];

/// Reports for the (3,3) corpus, one object per biunitary.
struct Corpus {
    path: String,
    items: Vec<PermMatrix>,
    reports: Vec<Value>,
    report_bytes: Vec<u8>,
    transitive: Vec<bool>,
}

fn load_corpus(dir: &Path) -> Result<(Corpus, Duration), String> {
    let out = ksquare(&["enumerate", "--p", "3", "--k", "3"]);
    ensure(out.status.success(), "enumerate failed")?;
    let path = dir.join("corpus.json");
    std::fs::write(&path, &out.stdout).map_err(|e| e.to_string())?;
    let path = path.to_str().unwrap().to_string();
    let items: Vec<PermMatrix> = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let rep = ksquare(&["report", &path, "--jobs", "1"]);
    let elapsed = start.elapsed();
    ensure(rep.status.code() == Some(0), format!("report exited with {:?}", rep.status.code()))?;
    let reports: Vec<Value> = serde_json::from_slice(&rep.stdout).map_err(|e| e.to_string())?;
    let inv = ksquare(&["invariants", &path, "--jobs", "1"]);
    let inv: Vec<Value> = serde_json::from_slice(&inv.stdout).map_err(|e| e.to_string())?;
    let transitive = inv.iter().map(|v| v["group"]["transitive"] == true).collect();
    Ok((Corpus { path, items, reports, report_bytes: rep.stdout, transitive }, elapsed))
}

fn failing(report: &Value) -> Vec<String> {
    report.as_object().map_or(vec!["<not an object>".into()], |m| {
        m.iter().filter(|(_, c)| c["pass"] != true).map(|(n, _)| n.clone()).collect()
    })
}

fn identity_suite(c: &Corpus, elapsed: Duration) -> Outcome {
    ensure(c.reports.len() == c.items.len(), "report count differs from corpus size")?;
    for (i, r) in c.reports.iter().enumerate() {
        let bad = failing(r);
        ensure(bad.is_empty(), format!("item {}: {bad:?}", i + 1))?;
        for key in REQUIRED {
            ensure(r.get(*key).is_some(), format!("item {}: missing {key}", i + 1))?;
        }
    }
    for (i, u) in c.items.iter().enumerate().step_by(97) {
        let r = full_report(u).map_err(|e| e.to_string())?;
        ensure(r.all_pass(), format!("in-process item {}: {:?}", i + 1, r.failures()))?;
        let cli = c.reports[i].as_object().unwrap();
        let names: BTreeSet<&str> = r.iter().map(|(n, _)| n.as_str()).collect();
        let cli_names: BTreeSet<&str> = cli.keys().map(String::as_str).filter(|n| *n != "biunitary").collect();
        ensure(names == cli_names, format!("item {}: CLI and library check names differ", i + 1))?;
    }
    within(elapsed, Duration::from_secs(300), "full report")?;
    Ok(format!("{} biunitaries, report {elapsed:.1?}", c.items.len()))
}

fn subgroup_proxies(c: &Corpus) -> Outcome {
    let mut transitive = 0;
    for (i, r) in c.reports.iter().enumerate() {
        for key in GROUP_KEYS {
            let pass = r.get(*key).map(|x| x["pass"] == true);
            ensure(pass == Some(true), format!("item {}: {key} {pass:?}", i + 1))?;
        }
        let coset = r.as_object().unwrap().keys().any(|k| k.starts_with("groups.coset_square."));
        ensure(coset == c.transitive[i], format!("item {}: coset square checks present = {coset}", i + 1))?;
        transitive += usize::from(coset);
    }
    Ok(format!("{transitive} transitive cases with coset square checks"))
}

fn round_trip(k: usize, gens: &[Perm], stabilizer_order: usize) -> Result<Duration, String> {
    let start = Instant::now();
    let u = biunitary_from_subgroup(gens).map_err(|e| e.to_string())?;
    let od = gamma_of(&extract_ks(&u).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let group: Vec<Perm> = closure(k, gens).map_err(|e| e.to_string())?.into_iter().collect();
    let stab: Vec<Perm> = group.iter().filter(|g| g.apply(0) == 0).cloned().collect();
    ensure(od.gamma == group, format!("degree {k}: recovered group differs"))?;
    ensure(od.stabilizers[0] == stab, format!("degree {k}: stabilizer of 1 differs"))?;
    ensure(stab.len() == stabilizer_order, format!("degree {k}: |H| = {}", stab.len()))?;
    let t = start.elapsed();
    within(t, Duration::from_secs(1), "round trip")?;
    Ok(t)
}

fn subgroup_round_trips() -> Outcome {
    let s3 = round_trip(3, &[Perm::transposition(3, 0, 1), Perm::cycle(3, &[0, 1, 2])], 2)?;
    let z4 = round_trip(4, &[Perm::cycle(4, &[0, 1, 2, 3])], 1)?;
    let s4 = round_trip(4, &[Perm::transposition(4, 0, 1), Perm::cycle(4, &[0, 1, 2, 3])], 6)?;
    Ok(format!("S3 {s3:.1?}, Z4 {z4:.1?}, S4 {s4:.1?}"))
}

const LADDER_KEYS: &[&str] = &[
    "grpsq.commuting",
    "grpsq.symmetric",
    "grpsq.connected_top",
    "grpsq.Δ_Γ∩(1⊗Δ_Γ')_scalars",
    "mu.group_action",
    "mu.graph_automorphism",
];

fn ladder_checks() -> Outcome {
    let start = Instant::now();
    for gens in [vec![Perm::transposition(2, 0, 1)], vec![Perm::transposition(3, 0, 1), Perm::cycle(3, &[0, 1, 2])]] {
        let u = biunitary_from_subgroup(&gens).map_err(|e| e.to_string())?;
        let od = gamma_of(&extract_ks(&u).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let gl = GroupLadder::build(&od, 3).map_err(|e| e.to_string())?;
        let r = gl.check_group_expectations().map_err(|e| e.to_string())?;
        let k = od.k;
        ensure(r.all_pass(), format!("|Γ| = {}: {:?}", od.gamma.len(), r.failures()))?;
        let mut keys: Vec<String> = LADDER_KEYS.iter().map(|s| s.to_string()).collect();
        for n in 0..=3 {
            keys.push(format!("level{n}.E^Γ(A)=B"));
            keys.push(format!("level{n}.E^H(A)=C"));
        }
        for n in 2..=3 {
            keys.push(format!("level{n}.jones.in_C"));
            keys.push(format!("level{n}.C_bratteli_transpose"));
        }
        for key in &keys {
            ensure(r.get(key).is_some(), format!("S{k}: missing {key}"))?;
        }
    }
    let t = start.elapsed();
    within(t, Duration::from_secs(30), "ladder checks")?;
    Ok(format!("S2 and S3 to depth 3 in {t:.1?}"))
}

fn index_bookkeeping(c: &Corpus) -> Outcome {
    for (i, r) in c.reports.iter().enumerate() {
        for key in ["markov.vertical.norm2", "markov.horizontal.beta"] {
            ensure(r.get(key).map(|x| x["pass"] == true) == Some(true), format!("item {}: {key}", i + 1))?;
        }
    }
    for gens in [vec![Perm::transposition(2, 0, 1)], vec![Perm::transposition(3, 0, 1), Perm::cycle(3, &[0, 1, 2])]] {
        let u = biunitary_from_subgroup(&gens).map_err(|e| e.to_string())?;
        let od = gamma_of(&extract_ks(&u).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let gl = GroupLadder::build(&od, 1).map_err(|e| e.to_string())?;
        let sq = gl.grpsq().map_err(|e| e.to_string())?;
        let md = markov_data(sq.b0(), sq.b1(), sq.trace()).map_err(|e| e.to_string())?;
        let p = gl.p() as i64;
        ensure(md.beta == qi(p * p), format!("grpsq β = {}, expected {}", md.beta, p * p))?;
        ensure(md.amb_trace.windows(2).all(|w| w[0] == w[1]), "grpsq trace vector is not uniform")?;
    }
    Ok("corpus Markov checks and grpsq β = p²".into())
}

fn bisch_basics() -> Outcome {
    let mut built = 0;
    for p in 1..=3 {
        for k in 1..=3 {
            let bd = bisch_projection(p, k).map_err(|e| e.to_string())?;
            let m = &bd.q_matrix;
            ensure(m.is_projection(), format!("({p},{k}): not a projection"))?;
            ensure(TraceForm::normalized(m.dim()).eval(m) == q(1, k as i64), format!("({p},{k}): trace"))?;
            ensure(permutation_fixed(&bd), format!("({p},{k}): not permutation fixed"))?;
            for n in 0..=8 {
                match build_p_n(n, p, k) {
                    Ok(pn) => {
                        ensure(pn.is_projection(), format!("({p},{k}) p_{n}: not a projection"))?;
                        let tr = TraceForm::normalized(pn.dim()).eval(&pn);
                        ensure(tr == q(1, k as i64), format!("({p},{k}) p_{n}: trace {tr}"))?;
                        built += 1;
                    }
                    Err(ksquare::Error::Capacity(_)) => break,
                    Err(e) => return Err(format!("({p},{k}) p_{n}: {e}")),
                }
            }
        }
    }
    Ok(format!("{built} p_n checked"))
}

fn determinism(c: &Corpus) -> Outcome {
    let path = c.path.as_str();
    let mut runs: Vec<(&str, Vec<&str>)> = ["verify", "extract", "invariants", "relcomm", "bisch", "ladder"]
        .into_iter()
        .map(|cmd| (cmd, vec![cmd, path]))
        .collect();
    runs.push(("enumerate", vec!["enumerate", "--p", "3", "--k", "3"]));
    runs.push(("enumerate --canonical", vec!["enumerate", "--p", "3", "--k", "3", "--canonical"]));
    for (name, args) in runs {
        let one = ksquare(&[args.as_slice(), &["--jobs", "1"]].concat());
        let four = ksquare(&[args.as_slice(), &["--jobs", "4"]].concat());
        ensure(one.status.code() == Some(0), format!("{name} exited with {:?}", one.status.code()))?;
        ensure(one.stdout == four.stdout, format!("{name}: output depends on --jobs"))?;
    }
    let four = ksquare(&["report", path, "--jobs", "4"]);
    ensure(four.stdout == c.report_bytes, "report: output depends on --jobs")?;

    let dir = Path::new(path).parent().unwrap();
    let groups = dir.join("groups.json");
    std::fs::write(
        &groups,
        r#"[{"k":3,"generators":[[2,1,3],[2,3,1]]},{"k":4,"generators":[[2,3,4,1]]},{"k":4,"generators":[[2,1,3,4],[2,3,4,1]]}]"#,
    )
    .map_err(|e| e.to_string())?;
    let g = groups.to_str().unwrap();
    let one = ksquare(&["from-group", g, "--jobs", "1"]);
    let again = ksquare(&["from-group", g, "--jobs", "1"]);
    let four = ksquare(&["from-group", g, "--jobs", "4"]);
    ensure(one.stdout == four.stdout && one.stdout == again.stdout, "from-group: output not reproducible")?;
    Ok("all commands byte-identical across --jobs 1 and 4".into())
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut results: Vec<(&str, Outcome)> = vec![("1 enumeration oracle", enumeration_oracle())];
    match load_corpus(dir.path()) {
        Ok((corpus, elapsed)) => {
            results.push(("2 identity suite at (3,3)", identity_suite(&corpus, elapsed)));
            results.push(("3 subgroup proxies at (3,3)", subgroup_proxies(&corpus)));
            results.push(("4 subgroup round trips", subgroup_round_trips()));
            results.push(("5 group ladder to depth 3", ladder_checks()));
            results.push(("6 index bookkeeping", index_bookkeeping(&corpus)));
            results.push(("7 Bisch projection basics", bisch_basics()));
            results.push(("8 determinism", determinism(&corpus)));
        }
        Err(e) => {
            for name in ["2 identity suite at (3,3)", "3 subgroup proxies at (3,3)", "6 index bookkeeping", "8 determinism"] {
                results.push((name, Err(format!("corpus unavailable: {e}"))));
            }
            results.push(("4 subgroup round trips", subgroup_round_trips()));
            results.push(("5 group ladder to depth 3", ladder_checks()));
            results.push(("7 Bisch projection basics", bisch_basics()));
        }
    }
    let mut ok = true;
    for (name, r) in &results {
        match r {
            Ok(note) => println!("PASS criterion {name}: {note}"),
            Err(e) => {
                ok = false;
                println!("FAIL criterion {name}: {e}");
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
