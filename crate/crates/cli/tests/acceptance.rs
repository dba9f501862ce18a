//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};

const BIN: &str = env!("CARGO_BIN_EXE_hodgefrob");
const OUTPUTS: [&str; 4] = ["u.csv", "Q.csv", "residual.csv", "report.txt"];

fn sample(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn invoke(sub: &str, config: &Path, out: &Path) -> Option<i32> {
    Command::new(BIN)
        .args([sub, "--threads", "1", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .ok()?
        .status
        .code()
}

fn read_report(path: &Path) -> BTreeMap<String, String> {
    std::fs::read_to_string(path)
        .unwrap_or_default()
        .lines()
        .filter_map(|l| l.split_once(" = "))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

/// Solve the same configuration twice and compare outputs byte for byte.
fn deterministic_outputs(config: &Path) -> Result<String, String> {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    for dir in [&a, &b] {
        match invoke("solve", config, dir.path()) {
            Some(0) => {}
            code => return Err(format!("solve exited with {code:?}")),
        }
    }
    let mut bytes = 0;
    for f in OUTPUTS {
        let x = std::fs::read(a.path().join(f)).map_err(|e| format!("{f}: {e}"))?;
        let y = std::fs::read(b.path().join(f)).map_err(|e| format!("{f}: {e}"))?;
        if x != y {
            return Err(format!("{f} differs between runs"));
        }
        bytes += x.len();
    }
    Ok(format!("{} files, {bytes} bytes identical", OUTPUTS.len()))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut line = |ok: bool, id: u32, name: &str, detail: &str| {
        if !ok {
            failed += 1;
        }
        println!("{} [{id}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
    };

    let out = tempfile::tempdir().expect("temporary directory");
    let code = invoke("verify", &sample("verify.cfg"), out.path());
    let report = read_report(&out.path().join("report.txt"));
    for id in 1..=10 {
        let key = format!("criterion_{id}");
        match report.get(&key) {
            Some(status) => line(
                status == "pass",
                id,
                report.get(&format!("{key}.name")).map_or("", String::as_str),
                report.get(&format!("{key}.detail")).map_or("", String::as_str),
            ),
            None => line(false, id, "missing", "no report line"),
        }
    }

    let det = deterministic_outputs(&sample("scherk.cfg"));
    let detail = format!(
        "verify exit {}; {}",
        code.map_or("none".to_string(), |c| c.to_string()),
        det.as_ref().unwrap_or_else(|e| e)
    );
    line(code == Some(0) && det.is_ok(), 11, "verify exit and csv determinism", &detail);

    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
