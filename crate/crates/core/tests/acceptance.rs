//! Acceptance gate: one pass/fail line per criterion.
//!
//! All comparisons are exact (integer dimensions, ranks, and matrix identities
//! over Q or F_p); there is no floating-point tolerance anywhere.
//!
//! Criterion 4 includes a chain-level claim that does not hold for the
//! standard B operator. It is run as stated and reported FAIL; the process
//! exits nonzero only if the set of failing criteria differs from that.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::Instant;

use funho::algkit::{build_algebra, AlgebraSpec};
use funho::exactlin::{PrimeField, Rationals, ScalarField};
use funho::theories::kahler::kahler_dim;
use funho::verify::{render_report, run_suite, Check, ReportFormat, RunConfig, Status, Suite, SuiteReport};

const KNOWN_RED: &[usize] = &[4];

struct Line {
    id: usize,
    title: &'static str,
    ok: bool,
    detail: String,
}

fn q() -> ScalarField {
    ScalarField::Rationals
}

fn fp(p: u32) -> ScalarField {
    ScalarField::Prime(p)
}

fn spec(s: &str) -> AlgebraSpec {
    s.parse().unwrap()
}

fn select<'a>(r: &'a SuiteReport, prefix: &str, inputs: &[&str], fields: &[ScalarField]) -> Vec<&'a Check> {
    let fields: Vec<String> = fields.iter().map(|f| f.to_string()).collect();
    r.checks
        .iter()
        .filter(|c| c.name.starts_with(prefix))
        .filter(|c| inputs.is_empty() || inputs.contains(&c.input.as_str()))
        .filter(|c| fields.is_empty() || fields.contains(&c.field))
        .collect()
}

/// Passes when `expected` checks were run and none failed. Skips are listed in the detail.
fn judge(id: usize, title: &'static str, checks: &[&Check], expected: usize) -> Line {
    let fail: Vec<&&Check> = checks.iter().filter(|c| c.status == Status::Fail).collect();
    let skipped = checks.iter().filter(|c| c.status == Status::SkippedResource).count();
    let mut detail = format!("{} checks, {} failed, {} skipped", checks.len(), fail.len(), skipped);
    if checks.len() != expected {
        detail += &format!("; expected {expected} checks");
    }
    if let Some(c) = fail.first() {
        detail += &format!("; first failure {} [{} / {}]: {}", c.name, c.input, c.field, c.detail);
    }
    Line { id, title, ok: fail.is_empty() && checks.len() == expected, detail }
}

fn merge(lines: Vec<Line>, id: usize, title: &'static str) -> Line {
    let ok = lines.iter().all(|l| l.ok);
    let detail = lines.iter().map(|l| l.detail.as_str()).collect::<Vec<_>>().join(" | ");
    Line { id, title, ok, detail }
}

fn strip_timings(json: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(json).expect("report json");
    if let Some(o) = v.as_object_mut() {
        o.remove("timings");
    }
    serde_json::to_string(&v).unwrap()
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cfg = RunConfig::default();
    let all = run_suite(Suite::All, &cfg).expect("verify all");
    let mut lines = Vec::new();

    let corpus = ["trunc:2", "trunc:3", "group:2", "group:3", "prod:2"];
    let fields = [q(), fp(2), fp(3)];

    let rep = select(&all, "representables/", &[], &[q(), fp(2)]);
    lines.push(judge(1, "representable F^n has HGammaC = (n, 0, 0)", &rep, 6));

    let etale = select(&all, "stable-sequence/etale", &["prod:2"], &fields);
    lines.push(judge(2, "etale collapse for prod:2", &etale, 6));

    let p53a = select(&all, "prop53/dim HGammaC_0 = dim HC_1", &corpus, &fields);
    let p53b = select(&all, "prop53/dim HC_1 = dim Omega^1/dA", &corpus, &fields);
    lines.push(merge(
        vec![judge(3, "", &p53a, 15), judge(3, "", &p53b, 15)],
        3,
        "HGammaC_0 = HC_1 = Omega^1/dA on 15 pairs",
    ));

    let sb = select(&all, "stab-b/", &corpus, &fields);
    let homology = select(&all, "stab-b/stab B = 0 on HC_", &corpus, &fields);
    let chains = select(&all, "stab-b/stab(B x) in D_", &corpus, &fields);
    let sharp = select(&all, "stab-b/stab B on HC_0 has rank 1", &["trunc:2"], &[q()]);
    lines.push(merge(
        vec![
            judge(4, "", &homology, 45),
            judge(4, "", &chains, 45),
            judge(4, "", &sharp, 1),
        ],
        4,
        "stab B = 0 on HC_1..3, chain-level D_n membership, rank 1 at n = 0",
    ));
    assert_eq!(sb.len(), 91);

    let per = select(&all, "periodicity/", &["trunc:2", "group:2"], &[q(), fp(2)]);
    lines.push(judge(5, "periodicity sequence exact for n <= 4", &per, 4));

    let five = select(&all, "stable-sequence/five-term", &corpus, &fields);
    lines.push(judge(6, "five-term sequence exact on the corpus", &five, 15));

    let ids = select(&all, "identities/", &corpus, &fields);
    let closure = select(&all, "degeneracy/adjacent diagonals are closed", &corpus, &fields);
    let mut id_lines = vec![judge(7, "", &ids, 15 * 14), judge(7, "", &closure, 15)];
    let unexpected_skip: Vec<&&Check> = ids
        .iter()
        .filter(|c| c.status == Status::SkippedResource)
        .filter(|c| !(c.name.contains("cube degree 4") && (c.input.ends_with(":3"))))
        .collect();
    id_lines.push(Line {
        id: 7,
        title: "",
        ok: unexpected_skip.is_empty(),
        detail: format!("skips outside cube degree 4 with d = 3: {}", unexpected_skip.len()),
    });
    lines.push(merge(id_lines, 7, "d^2, delta^2, B^2, total d^2, delta(D) in D, stab chain map"));

    let q0 = select(&all, "q0/", &["trunc:2"], &[q(), fp(2)]);
    lines.push(judge(8, "H_n(Q0(G')) = HH_{n+1}(G), n = 0..2", &q0, 2));

    let ident = select(&all, "prop53/dim HGamma_0 = dim Omega^1 = dim HH_1", &corpus, &fields);
    let iso = select(&all, "prop53/stab: HH_1 -> HGamma_0 is an isomorphism", &corpus, &fields);
    let oq = kahler_dim(&build_algebra(&spec("trunc:2"), &Rationals).unwrap());
    let o2 = kahler_dim(&build_algebra(&spec("trunc:2"), &PrimeField::new(2).unwrap()).unwrap());
    let char_line = Line {
        id: 9,
        title: "",
        ok: (oq, o2) == (1, 2),
        detail: format!("Omega^1(trunc:2) = {oq} over Q, {o2} over F2"),
    };
    lines.push(merge(
        vec![judge(9, "", &ident, 15), judge(9, "", &iso, 15), char_line],
        9,
        "HGamma_0 = Omega^1 = HH_1, stab iso, characteristic sensitivity",
    ));

    let l31 = select(&all, "lemma31/", &[], &fields);
    lines.push(judge(10, "mu*F^n = Gamma^{n+1} naturally", &l31, 6));

    let lad = select(&all, "ladder/", &["trunc:2", "prod:2"], &[q(), fp(2)]);
    lines.push(judge(11, "ladder squares commute", &lad, 4));

    let a = run_suite(Suite::StabB, &cfg).unwrap().without_timings();
    let b = run_suite(Suite::StabB, &cfg).unwrap().without_timings();
    let same_lib = render_report(&a, ReportFormat::Json).unwrap() == render_report(&b, ReportFormat::Json).unwrap();
    let cli = |dir: &std::path::Path| {
        let out = Command::new(env!("CARGO_BIN_EXE_funho"))
            .args(["verify", "--suite", "lemma31", "--format", "json", "--no-cache"])
            .env("FUNHO_CACHE_DIR", dir)
            .output()
            .expect("run funho");
        strip_timings(&String::from_utf8_lossy(&out.stdout))
    };
    let tmp = tempfile::tempdir().unwrap();
    let same_cli = cli(tmp.path()) == cli(tmp.path());
    lines.push(Line {
        id: 12,
        title: "byte-identical JSON across runs",
        ok: same_lib && same_cli,
        detail: format!("library stab-b rerun identical: {same_lib}; CLI lemma31 rerun identical: {same_cli}"),
    });

    println!("acceptance: {} checks in the full run, {:.1}s", all.summary.checks, start.elapsed().as_secs_f64());
    let mut failing = BTreeSet::new();
    for l in &lines {
        println!(
            "criterion {:>2} {}: {} ({})",
            l.id,
            if l.ok { "PASS" } else { "FAIL" },
            l.title,
            l.detail
        );
        if !l.ok {
            failing.insert(l.id);
        }
    }
    let expected: BTreeSet<usize> = KNOWN_RED.iter().copied().collect();
    if failing == expected {
        println!("acceptance: failing criteria {failing:?} match the recorded expectation");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failing:?}, expected {expected:?}");
        ExitCode::FAILURE
    }
}
