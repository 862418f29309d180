use std::path::PathBuf;
use std::process::{Command, Output};

fn monodromy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monodromy")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("monodromy-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn ranks_for_one_case() {
    let o = monodromy(&["verify", "ranks", "--case", "S013", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("rank 8"), "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(monodromy(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(monodromy(&["verify", "ranks", "--k", "1"]).status.code(), Some(2));
    assert_eq!(monodromy(&["describe", "no-such-fixture"]).status.code(), Some(2));
    assert_eq!(monodromy(&["braid", "s031", "--arcs", "a,zz", "--word", "2"]).status.code(), Some(2));
    assert_eq!(monodromy(&[]).status.code(), Some(2));
}

#[test]
fn failing_checks_exit_one() {
    assert_eq!(monodromy(&["verify", "positivity"]).status.code(), Some(1));
}

#[test]
fn json_report() {
    let o = monodromy(&["verify", "rmatrix", "--k", "3", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["suiteId"], "rmatrix");
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["checkId"].is_string() && c["status"].is_string()));
    assert!(checks.iter().all(|c| c.get("elapsedMs").is_none()));
}

#[test]
fn reports_are_deterministic() {
    let args = ["verify", "casimirs", "--k", "3", "--format", "json", "--seed", "7"];
    assert_eq!(monodromy(&args).stdout, monodromy(&args).stdout);
}

#[test]
fn out_writes_the_report() {
    let path = scratch("out").join("report.txt");
    let o = monodromy(&["verify", "rmatrix", "--k", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, stdout(&monodromy(&["verify", "rmatrix", "--k", "2"])));
}

#[test]
fn describe_lists_structure() {
    let fig1 = stdout(&monodromy(&["describe", "fig1"]));
    assert!(fig1.contains('['), "{fig1}");
    let s031 = stdout(&monodromy(&["describe", "s031"]));
    assert!(s031.contains("omega1") && s031.contains("omega2"), "{s031}");
}

#[test]
fn fixture_directory_override() {
    let dir = scratch("fixtures");
    let original = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/fixtures/fig1.json")).unwrap();
    std::fs::write(dir.join("mine.json"), original).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_monodromy"))
        .args(["describe", "mine"])
        .env("MONODROMY_FIXTURE_DIR", &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), stdout(&monodromy(&["describe", "fig1"])).replace("fig1", "mine"));
}

#[test]
fn braid_subcommand() {
    assert_eq!(monodromy(&["braid", "s041", "--arcs", "a,b,c", "--word", "2,3,2"]).status.code(), Some(0));
    assert_eq!(monodromy(&["braid", "s031", "--arcs", "b,a", "--word", "2"]).status.code(), Some(1));
}
