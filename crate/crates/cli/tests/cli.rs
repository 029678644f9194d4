use std::process::{Command, Output};

use certlab::search::window_search;

fn certlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_certlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn analyze_g1_row() {
    let o = certlab(&["analyze", "--fn", "ctor=window(29,13,16)", "--measures", "C0,C1,bs,FC"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "C0\tC1\tbs\tFC");
    assert!(rows[1].starts_with("17\t26\t17\t"));
}

#[test]
fn exit_codes() {
    assert_eq!(certlab(&["--help"]).status.code(), Some(0));
    assert_eq!(certlab(&["analyze"]).status.code(), Some(1));
    assert_eq!(certlab(&["analyze", "--fn", "ctor=nope(3)"]).status.code(), Some(1));
    // randomized commands refuse to run without a seed
    let o = certlab(&["simulate", "r0", "--fn", "ctor=or(3)", "--trials", "5"]);
    assert_eq!(o.status.code(), Some(1));

    let dir = std::env::temp_dir().join(format!("certlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.design");
    std::fs::write(&bad, "8 2 4 2\n1 2 3 4\n1 2 3 5\n").unwrap();
    let o = certlab(&["design", "check", "--file", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));

    let good = dir.join("good.design");
    let o = certlab(&[
        "design",
        "build",
        "--n",
        "12",
        "--gamma",
        "3",
        "--m",
        "16",
        "--seed",
        "1",
        "--out",
        good.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(certlab(&["design", "check", "--file", good.to_str().unwrap()])
        .status
        .success());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn r0_is_replayable_and_writes_a_transcript() {
    let dir = std::env::temp_dir().join(format!("certlab-r0-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let tr = dir.join("t.tsv");
    let args = [
        "simulate",
        "r0",
        "--fn",
        "ctor=window(5,2,3)",
        "--trials",
        "500",
        "--seed",
        "7",
    ];
    let a = certlab(&args);
    let b = certlab(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b));
    let row = stdout(&a).lines().nth(1).unwrap().to_string();
    assert_eq!(row.split('\t').nth(1), Some("0"));

    let mut with_tr = args.to_vec();
    with_tr.extend(["--transcript", tr.to_str().unwrap()]);
    assert!(certlab(&with_tr).status.success());
    let text = std::fs::read_to_string(&tr).unwrap();
    assert!(text.starts_with("position\tvalue\trestriction"));
    assert!(text.lines().count() >= 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn search_and_verify_subcommands() {
    let o = certlab(&["search", "window", "--nmax", "6"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("n\ta\tb\t"));
    let o = certlab(&["verify", "minimax", "--fn", "ctor=window(29,13,16)", "--table", "gap"]);
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("1/17\t"));
    let o = certlab(&["verify", "lp", "--fn", "ctor=or(3)", "--input", "000"]);
    assert!(stdout(&o).lines().nth(1).unwrap().starts_with("3\t"));
    let o = certlab(&["poly", "--fn", "ctor=majority(3)"]);
    assert!(stdout(&o).contains("x1x2 + x1x3 + x2x3 - 2x1x2x3"));
}

#[test]
fn window_search_ignores_thread_count() {
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| window_search(12).unwrap())
    };
    assert_eq!(run(1), run(4));
}
