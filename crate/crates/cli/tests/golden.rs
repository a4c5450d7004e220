//! Each file in `tests/golden` lists `args:` lines, an `exit:` line, a
//! `---` separator and the expected stdout.

use std::fs;
use std::path::Path;
use std::process::Command;

struct Case {
    args: Vec<String>,
    exit: i32,
    stdout: String,
}

fn load(path: &Path) -> Case {
    let text = fs::read_to_string(path).unwrap();
    let (head, stdout) = text.split_once("---\n").expect("separator");
    let mut args = Vec::new();
    let mut exit = None;
    for line in head.lines() {
        if let Some(a) = line.strip_prefix("args: ") {
            args.push(a.to_string());
        } else if let Some(e) = line.strip_prefix("exit: ") {
            exit = Some(e.parse().unwrap());
        }
    }
    Case { args, exit: exit.expect("exit line"), stdout: stdout.to_string() }
}

#[test]
fn golden_files() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut paths: Vec<_> = fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    assert!(paths.len() > 50);
    let mut failed = Vec::new();
    for p in &paths {
        let case = load(p);
        let out = Command::new(env!("CARGO_BIN_EXE_qendo")).args(&case.args).output().unwrap();
        let stdout = String::from_utf8(out.stdout).unwrap();
        if out.status.code() != Some(case.exit) || stdout != case.stdout {
            failed.push(format!(
                "{}: exit {:?} (want {}), stdout:\n{stdout}",
                p.file_name().unwrap().to_string_lossy(),
                out.status.code(),
                case.exit
            ));
        }
    }
    assert!(failed.is_empty(), "{}", failed.join("\n"));
}

#[test]
fn output_is_stable() {
    let bin = env!("CARGO_BIN_EXE_qendo");
    let args = ["nonregular", "(0,1)", "1/2*sqrt(2)"];
    let a = Command::new(bin).args(args).output().unwrap().stdout;
    let b = Command::new(bin).args(args).output().unwrap().stdout;
    assert_eq!(a, b);
}

#[test]
fn printed_values_reparse() {
    let bin = env!("CARGO_BIN_EXE_qendo");
    let run = |args: &[&str]| String::from_utf8(Command::new(bin).args(args).output().unwrap().stdout).unwrap().trim_end().to_string();
    for x in ["[0,1] u {2}", "~(0,sqrt(2))", "(-inf,1/2) u [3,inf)"] {
        let built = run(&["build-retract", x]);
        assert_eq!(run(&["image", &built]), run(&["normalize", x]));
        let printed = run(&["normalize", x]);
        assert_eq!(run(&["normalize", &printed]), printed);
    }
    let f = run(&["nonregular", "(0,1)", "1/2*sqrt(2)"]);
    let endo: String = f.lines().skip(1).take_while(|l| l.starts_with("piece")).collect::<Vec<_>>().join("\n");
    assert_eq!(run(&["image", &endo]), "(0,1/2) u (0 + 1/2*sqrt(2),1)");
}
