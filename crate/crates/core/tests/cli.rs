use std::path::Path;
use std::process::{Command, Output};

fn funho(cache: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_funho"))
        .args(args)
        .env("FUNHO_CACHE_DIR", cache)
        .output()
        .expect("spawn funho")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn oversized_request_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let o = funho(dir.path(), &["compute", "--algebra", "trunc:2", "--coeff", "q", "--theories", "hgamma", "--max-degree", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource"));
}

#[test]
fn etale_cyclic_gamma_table() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["compute", "--algebra", "prod:2", "--coeff", "q", "--theories", "hgammac", "--max-degree", "2"];
    let o = funho(dir.path(), &args);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let dims: Vec<u64> = v[0]["rows"].as_array().unwrap().iter().map(|r| r["dim"].as_u64().unwrap()).collect();
    assert_eq!(dims, [0, 2, 0]);
    assert_eq!(v[0]["theory"], "HΓC");

    // second run is served from the cache and prints the same bytes
    let again = funho(dir.path(), &args);
    assert_eq!(stdout(&again), stdout(&o));
    let stat = funho(dir.path(), &["cache", "stat"]);
    let s: serde_json::Value = serde_json::from_str(&stdout(&stat)).unwrap();
    assert_eq!(s["entries"], 1);
}

#[test]
fn compute_formats() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["compute", "--algebras", "trunc:2,group:2", "--coeffs", "f2", "--theories", "hh,hc", "--max-degree", "2", "--no-cache"];
    let csv = funho(dir.path(), &[&base[..], &["--format", "csv"]].concat());
    assert_eq!(csv.status.code(), Some(0));
    let text = stdout(&csv);
    assert_eq!(text.lines().count(), 1 + 2 * 2 * 3);
    assert!(text.contains("HH,trunc:2,F2,1,2"));
    let md = funho(dir.path(), &[&base[..], &["--format", "markdown"]].concat());
    assert!(stdout(&md).contains("## HC of group:2 over F2"));
    let bad = funho(dir.path(), &[&base[..], &["--format", "yaml"]].concat());
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn stab_matrix_in_degree_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = funho(dir.path(), &["maps", "--algebra", "trunc:2", "--coeff", "q", "--map", "stab", "--degree", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# stab in degree 2 (chain level) over Q: G[3] -> G[4]"));
    // G[3] = A^{⊗4}, G[4] = A^{⊗5} for dim A = 2
    assert!(text.lines().nth(1).unwrap().starts_with("32 16 Q"));
}

#[test]
fn connes_b_in_degree_zero_has_rank_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = funho(
        dir.path(),
        &["maps", "--map", "B", "--degree", "0", "--algebra", "trunc:2", "--coeff", "q", "--format", "json"],
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["rank"], 1);
    assert_eq!(v["level"], "homology");
    let chain = funho(
        dir.path(),
        &["maps", "--map", "B", "--degree", "0", "--level", "chain", "--format", "json", "--no-cache"],
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&chain)).unwrap();
    assert_eq!(v["rank"], 2);
}

#[test]
fn every_map_kind_dumps() {
    let dir = tempfile::tempdir().unwrap();
    for (map, degree) in [("b", "1"), ("delta", "1"), ("cone-c", "0"), ("I", "1"), ("S", "2")] {
        for level in ["chain", "homology"] {
            let o = funho(
                dir.path(),
                &["maps", "--map", map, "--degree", degree, "--level", level, "--coeff", "f2", "--format", "csv"],
            );
            assert_eq!(o.status.code(), Some(0), "{map} {level}: {}", String::from_utf8_lossy(&o.stderr));
            assert!(stdout(&o).starts_with("row,col,value"));
        }
    }
    let o = funho(dir.path(), &["maps", "--map", "S", "--degree", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn empty_cache_has_no_entries() {
    let dir = tempfile::tempdir().unwrap();
    let o = funho(dir.path(), &["cache", "stat"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["entries"], 0);
    let cleared = funho(dir.path(), &["cache", "clear"]);
    assert_eq!(cleared.status.code(), Some(0));
}

#[test]
fn corrupt_cache_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["maps", "--map", "b", "--degree", "2", "--coeff", "f3"];
    let first = stdout(&funho(dir.path(), &args));
    for e in std::fs::read_dir(dir.path()).unwrap() {
        std::fs::write(e.unwrap().path(), "garbage").unwrap();
    }
    let list = funho(dir.path(), &["cache", "list"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&list)).unwrap();
    assert_eq!(v[0]["valid"], false);
    let second = funho(dir.path(), &args);
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(stdout(&second), first);
}

#[test]
fn bad_inputs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["verify", "--suite", "nope"][..],
        &["maps", "--map", "zeta"],
        &["compute", "--algebra", "trunc:0"],
        &["compute", "--algebra", "trunc:2", "--coeff", "f4"],
        &["compute", "--algebra", "trunc:2", "--theories", "hk"],
        &["compute"],
        &["frobnicate"],
    ] {
        assert_eq!(funho(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let pass = funho(dir.path(), &["verify", "--suite", "ladder", "--algebras", "trunc:2", "--coeffs", "q,f2"]);
    assert_eq!(pass.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&pass)).unwrap();
    assert_eq!(v["summary"]["pass"], 2);

    let red = funho(dir.path(), &["verify", "--suite", "stab-b", "--algebras", "trunc:2", "--coeffs", "f2", "--max-degree", "2"]);
    assert_eq!(red.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&red)).unwrap();
    let failing: Vec<&serde_json::Value> =
        v["checks"].as_array().unwrap().iter().filter(|c| c["status"] == "fail").collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["witness"]["kind"], "chain");

    let skip = ["verify", "--suite", "identities", "--algebras", "trunc:3", "--coeffs", "f3"];
    assert_eq!(funho(dir.path(), &skip).status.code(), Some(0));
    assert_eq!(funho(dir.path(), &[&skip[..], &["--strict"]].concat()).status.code(), Some(3));
}

#[test]
fn markdown_rows_match_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report/degeneracy.md");
    let o = funho(
        dir.path(),
        &["verify", "--suite", "degeneracy", "--algebras", "trunc:2,prod:2", "--coeffs", "q", "--format", "markdown", "--out", out.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let md = std::fs::read_to_string(&out).unwrap();
    let rows = md.lines().filter(|l| l.starts_with("| degeneracy/")).count();
    let json = funho(dir.path(), &["verify", "--suite", "degeneracy", "--algebras", "trunc:2,prod:2", "--coeffs", "q"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(rows as u64, v["summary"]["checks"].as_u64().unwrap());
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["compute", "--algebra", "trunc:2", "--coeff", "f2", "--theories", "hgamma", "--max-degree", "2", "--no-cache"];
    let one = funho(dir.path(), &[&args[..], &["--threads", "1"]].concat());
    let four = funho(dir.path(), &[&args[..], &["--threads", "4"]].concat());
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stdout(&one), stdout(&four));
}
