use std::path::Path;
use std::process::{Command, Output};

const MANIFEST: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../manifests/identities.toml"
);

fn qbailey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbailey"))
        .args(args)
        .env_remove("QBAILEY_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_exit_codes() {
    assert_eq!(
        code(&qbailey(&["verify", "--id", "EULER", "--order", "80"])),
        0
    );
    assert_eq!(
        code(&qbailey(&[
            "verify", "--id", "C4_SPT", "--param", "M=0..6", "--order", "50"
        ])),
        0
    );
    assert_eq!(code(&qbailey(&["verify", "--id", "NO_SUCH"])), 2);
    assert_eq!(code(&qbailey(&["verify"])), 2);
    assert_eq!(
        code(&qbailey(&["verify", "--id", "EULER", "--order", "-1"])),
        2
    );
    assert_eq!(
        code(&qbailey(&["verify", "--id", "C4_SPT", "--param", "M=99"])),
        2
    );
    assert_eq!(
        code(&qbailey(&["verify", "--id", "C4_SPT", "--param", "k=1"])),
        2
    );
    assert_eq!(
        code(&qbailey(&["verify", "--id", "EULER", "--k-cap", "3"])),
        2
    );
    assert_eq!(
        code(&qbailey(&["verify", "--id", "EULER", "--jobs", "0"])),
        2
    );
    assert_eq!(code(&qbailey(&["nonsense"])), 2);
}

#[test]
fn failing_and_truncated_checks_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.toml",
        "[[check]]\nname = \"off-by-one\"\norder = 10\nlhs = \"1/poch(q, inf)\"\nrhs = \"1/poch(q, inf) + q^7\"\n",
    );
    let out = qbailey(&["verify", "--manifest", &bad]);
    assert_eq!(code(&out), 1);
    assert!(
        stdout(&out).contains("first mismatch at q^7: 15 != 16"),
        "{}",
        stdout(&out)
    );

    let out = qbailey(&[
        "verify",
        "--id",
        "E8_PENTA_CUBE",
        "--order",
        "60",
        "--k-cap",
        "5",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).starts_with("truncation-failure"));
}

#[test]
fn manifest_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(
        dir.path(),
        "broken.toml",
        "[[check]]\nname = \"x\"\norder = 5\nlhs = \"q +\"\nrhs = \"q\"\n",
    );
    let out = qbailey(&["verify", "--manifest", &broken]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("check #1 (`x`)"));
    assert_eq!(
        code(&qbailey(&["verify", "--manifest", "/no/such/file.toml"])),
        2
    );
    assert_eq!(
        code(&qbailey(&[
            "verify",
            "--manifest",
            MANIFEST,
            "--param",
            "zzz=1"
        ])),
        2
    );
}

#[test]
fn shipped_manifest_passes() {
    let out = qbailey(&["verify", "--manifest", MANIFEST, "--order", "30"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = qbailey(&[
        "verify",
        "--manifest",
        MANIFEST,
        "--param",
        "M=4",
        "--order",
        "20",
    ]);
    assert_eq!(code(&out), 0);
    assert!(!stdout(&out).contains("M=3"));
    assert!(stdout(&out).contains("QCHU T=20 [M=4,N=4]"));
}

#[test]
fn compute_examples() {
    assert_eq!(
        stdout(&qbailey(&["compute", "spt", "--n", "1..5"])),
        "1\t1\n2\t3\n3\t5\n4\t10\n5\t14\n"
    );
    assert_eq!(
        stdout(&qbailey(&["compute", "spt-star", "--M", "1", "--n", "4"])),
        "4\t9\n"
    );
    assert_eq!(stdout(&qbailey(&["compute", "p", "--n", "0"])), "0\t1\n");
    assert_eq!(
        stdout(&qbailey(&[
            "compute",
            "rank-moment",
            "--n",
            "2",
            "--format",
            "csv"
        ])),
        "n,value\n2,1\n"
    );
    assert_eq!(code(&qbailey(&["compute", "spt-star", "--n", "4"])), 2);
    assert_eq!(code(&qbailey(&["compute", "p", "--n", "5..2"])), 2);
    assert_eq!(code(&qbailey(&["compute", "p", "--n", "1000"])), 2);
}

#[test]
fn series_examples() {
    let out = qbailey(&[
        "series",
        "poch(q,inf)^3",
        "--order",
        "10",
        "--format",
        "csv",
    ]);
    let values: Vec<String> = stdout(&out)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(
        values,
        ["1", "-3", "0", "5", "0", "0", "-7", "0", "0", "0", "9"]
    );

    let out = qbailey(&["series", "1/poch(q,inf)", "--order", "6"]);
    assert_eq!(
        stdout(&out),
        "1 + q + 2q^2 + 3q^3 + 5q^4 + 7q^5 + 11q^6 + O(q^7)\n"
    );

    assert_eq!(code(&qbailey(&["series", "1/(2+q)"])), 1);
    assert_eq!(code(&qbailey(&["series", "1/(q"])), 2);
    assert_eq!(
        code(&qbailey(&[
            "series", "q^M", "--param", "M=3", "--order", "4"
        ])),
        0
    );
    assert_eq!(code(&qbailey(&["series", "q^M", "--order", "4"])), 1);

    let out = qbailey(&["series", "1/q + 1", "--order", "1", "--format", "csv"]);
    assert_eq!(stdout(&out), "n,value\n-1,1\n0,1\n1,0\n");
}

#[test]
fn export_formats() {
    let out = qbailey(&["export", "--id", "EULER", "--order", "5"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,lhs,rhs,equal"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.ends_with(",true")));

    let out = qbailey(&[
        "export", "--id", "EULER", "--order", "5", "--format", "json",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json[0]["first_mismatch"].is_null());
    assert_eq!(json[0]["status"], "pass");
    assert_eq!(json[0]["table"].as_array().unwrap().len(), 6);

    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "empty.toml", "");
    let out = qbailey(&["export", "--manifest", &empty]);
    assert_eq!(
        (code(&out), stdout(&out)),
        (0, "n,lhs,rhs,equal\n".to_string())
    );

    let out = qbailey(&["export", "--stat", "p", "--n", "0..4"]);
    assert_eq!(stdout(&out), "n,value\n0,1\n1,1\n2,2\n3,3\n4,5\n");
}

#[test]
fn verify_json_report_fields() {
    let out = qbailey(&[
        "verify",
        "--id",
        "E8_PENTA_CUBE",
        "--order",
        "30",
        "--format",
        "json",
    ]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let r = &json[0];
    assert_eq!(r["id"], "E8_PENTA_CUBE");
    assert_eq!(r["order"], 30);
    assert!(r["first_mismatch"].is_null());
    assert!(r["stabilized_k"].as_i64().unwrap() >= 1);
    assert!(r.get("elapsed_ms").is_none());
}

#[test]
fn output_is_independent_of_parallelism() {
    for format in ["json", "csv", "text"] {
        let run = |jobs: &str| {
            stdout(&qbailey(&[
                "verify",
                "--manifest",
                MANIFEST,
                "--order",
                "25",
                "--format",
                format,
                "--jobs",
                jobs,
            ]))
        };
        assert_eq!(run("1"), run("4"), "{format}");
    }
    let run = |jobs: &str| {
        stdout(&qbailey(&[
            "export", "--id", "QCHU", "--order", "20", "--jobs", jobs,
        ]))
    };
    assert_eq!(run("1"), run("3"));
}

#[test]
fn reports_are_sorted_by_id_then_params() {
    let out = stdout(&qbailey(&[
        "verify",
        "--manifest",
        MANIFEST,
        "--order",
        "20",
        "--format",
        "csv",
    ]));
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    let ids: Vec<String> = reader
        .records()
        .map(|r| r.unwrap()[0].to_string())
        .collect();
    assert!(ids.len() > 20);
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
}

#[test]
fn output_files_and_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("euler.csv");
    let out = qbailey(&[
        "export",
        "--id",
        "EULER",
        "--order",
        "3",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 5);

    let out = Command::new(env!("CARGO_BIN_EXE_qbailey"))
        .args([
            "compute", "p", "--n", "3", "--format", "csv", "--output", "p.csv",
        ])
        .env("QBAILEY_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert_eq!(
        std::fs::read_to_string(dir.path().join("p.csv")).unwrap(),
        "n,value\n3,3\n"
    );

    let out = qbailey(&[
        "export",
        "--id",
        "EULER",
        "--output",
        "/no/such/dir/out.csv",
    ]);
    assert_eq!(code(&out), 2);
}
