use std::io::{self, Write};
use std::path::PathBuf;
use std::process::Command;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("shiftca").chain(args.iter().copied());
    let code = shiftca::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

struct Broken;

impl Write for Broken {
    fn write(&mut self, _: &[u8]) -> io::Result<usize> {
        Err(io::Error::new(io::ErrorKind::BrokenPipe, "closed"))
    }

    fn flush(&mut self) -> io::Result<()> {
        Ok(())
    }
}

#[test]
fn exact_results_exit_zero() {
    let (code, out, _) = run(&["kgroups", "--no-cache", "-i", &data("full3.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("K0 = Z/2"), "{out}");
    let (code, out, _) = run(&["kgroups", "--no-cache", "-i", &data("zero_column.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("K0 = Z,") && out.contains("K1 = Z"), "{out}");
    let (code, out, _) = run(&["check", "--condition", "I", "-i", &data("point.json")]);
    assert_eq!(code, 0, "a failing condition is still an exact answer");
    assert!(out.contains("FAILS"), "{out}");
}

#[test]
fn bad_input_exits_one() {
    let (code, _, err) = run(&["classes", "--no-cache", "-i", &data("bad.json")]);
    assert_eq!(code, 1);
    assert!(err.starts_with("error:"), "{err}");
    assert_eq!(run(&["classes", "-i", "/nonexistent/input.json"]).0, 1);
    assert_eq!(run(&["bf", "-i", &data("even.json")]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["classes", "-l", "0", "-i", &data("gm.json")]).0, 1);
}

#[test]
fn truncated_results_exit_two_unless_partial_allowed() {
    let even = data("even.json");
    let (code, out, _) = run(&["kgroups", "--no-cache", "-l", "1", "-i", &even]);
    assert_eq!(code, 2);
    assert!(out.contains("APPROXIMATE"), "{out}");
    let (code, _, _) = run(&["kgroups", "--no-cache", "-l", "1", "--allow-partial", "-i", &even]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["classes", "--no-cache", "--monoid-cap", "1", "-i", &even]);
    assert_eq!(code, 2);
}

#[test]
fn output_failure_exits_three() {
    let argv = ["shiftca", "kgroups", "--no-cache", "-i", &data("gm.json")];
    let code = shiftca::cli::run(argv, &mut Broken, &mut Vec::new());
    assert_eq!(code, 3);
}

#[test]
fn json_output_is_deterministic() {
    for cmd in [&["classes"][..], &["kgroups"], &["check", "--condition", "star"], &["ideals"], &["dimension-group"]] {
        let mut args = cmd.to_vec();
        args.extend(["--json", "--no-cache", "-i"]);
        let input = data("even.json");
        args.push(&input);
        let first = run(&args);
        assert_eq!(first.0, 0, "{cmd:?}: {}", first.2);
        serde_json::from_str::<serde_json::Value>(&first.1).unwrap();
        assert_eq!(first, run(&args), "{cmd:?}");
    }
}

#[test]
fn cache_hit_matches_cold_run() {
    let dir = tempfile::tempdir().unwrap();
    let shiftca = |args: &[&str]| {
        let o = Command::new(env!("CARGO_BIN_EXE_shiftca"))
            .args(args)
            .env("SHIFTCA_CACHE_DIR", dir.path())
            .output()
            .unwrap();
        (o.status.code(), o.stdout)
    };
    let input = data("even.json");
    let cold = shiftca(&["classes", "--json", "--no-cache", "-i", &input]);
    let fill = shiftca(&["classes", "--json", "-i", &input]);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let hit = shiftca(&["classes", "--json", "-i", &input]);
    assert_eq!(cold.0, Some(0));
    assert_eq!(cold, fill);
    assert_eq!(cold, hit);
    // a corrupt entry is recomputed, not trusted
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        std::fs::write(entry.unwrap().path(), "{ not json").unwrap();
    }
    assert_eq!(cold, shiftca(&["classes", "--json", "-i", &input]));
    let k = shiftca(&["kgroups", "-i", &input]);
    assert_eq!(k.0, Some(0));
}

#[test]
fn presentations_agree_through_the_cli() {
    let a = run(&["kgroups", "--json", "--no-cache", "-i", &data("gm.json")]);
    let b = run(&["kgroups", "--json", "--no-cache", "-i", &data("gm_forbidden.json")]);
    assert_eq!(a.0, 0);
    assert_eq!(a, b);
}
