use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shelftalk"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_data_is_deterministic_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.tsv"), dir.path().join("b.tsv"));
    for out in [&a, &b] {
        let o = run(&["gen-data", "--out", s(out), "--per-intent", "125", "--seed", "42"]);
        assert!(o.status.success());
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 500);
    for label in ["spec_qa", "recommendation", "purchase", "chitchat"] {
        assert_eq!(lines.iter().filter(|l| l.ends_with(&format!("\t{label}"))).count(), 125);
    }
    assert_eq!(text, std::fs::read_to_string(data("intents.tsv")).unwrap());
}

#[test]
fn gen_data_rejects_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["gen-data", "--out", s(&dir.path().join("x")), "--per-intent", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn train_with_one_tree_records_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let o = run(&[
        "train-intent",
        "--data",
        s(&data("intents.tsv")),
        "--trees",
        "1",
        "--seed",
        "3",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("held-out accuracy"));
    let model: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(model["n_trees"], 1);
    assert_eq!(model["format_version"], 1);
}

#[test]
fn train_errors_exit_with_data_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let o = run(&["train-intent", "--data", "/nonexistent.tsv", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let one_class = dir.path().join("one.tsv");
    std::fs::write(&one_class, "hello there\tchitchat\n".repeat(30)).unwrap();
    let o = run(&["train-intent", "--data", s(&one_class), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn usage_errors_and_help() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["train-intent"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["chat"]).status.code(), Some(1));
}

#[test]
fn eval_intent_on_bundled_model() {
    let o = run(&[
        "eval-intent",
        "--model",
        s(&data("intent_model.json")),
        "--data",
        s(&data("intents.tsv")),
        "--seed",
        "42",
        "--json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["total"], 166);
    assert!(v["accuracy"].as_f64().unwrap() >= 0.95);
}

#[test]
fn eval_qa_json_and_text() {
    let (catalog, lexicon) = (data("catalog.jsonl"), data("lexicon.tsv"));
    let args = ["eval-qa", "--catalog", s(&catalog), "--lexicon", s(&lexicon)];
    let dir = tempfile::tempdir().unwrap();
    let single = dir.path().join("q.tsv");
    std::fs::write(&single, "How heavy is it?\tchair-001\tweight\n").unwrap();
    let o = run(&[&args[..], &["--questions", s(&single), "--json"]].concat());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        v,
        serde_json::json!({"questions": 1, "top1": 1.0, "top2": 1.0, "top3": 1.0})
    );

    let o = run(&[&args[..], &["--questions", s(&data("qa_eval.tsv"))]].concat());
    let text = stdout(&o);
    assert!(text.contains("top-1:") && text.contains("top-3:"));

    let bad = dir.path().join("bad.tsv");
    std::fs::write(&bad, "How heavy is it?\tchair-001\twingspan\n").unwrap();
    let o = run(&[&args[..], &["--questions", s(&bad)]].concat());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn local_chat_session() {
    let o = run_with_stdin(
        &["chat", "--local", "--data-dir", s(&data(""))],
        "/scan 036000291452\nhow heavy is this?\n/confirm\n/bogus\n/quit\nnever reached\n",
    );
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("Found Office Chair"), "{out}");
    assert!(out.contains("The weight of Office Chair is 14 lb."), "{out}");
    assert!(out.contains("error: nothing has been quoted"), "{out}");
    assert!(out.contains("unknown command /bogus"), "{out}");
}

#[test]
fn local_chat_with_missing_data_fails() {
    let o = run_with_stdin(&["chat", "--local", "--data-dir", "/nonexistent"], "/quit\n");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn remote_chat_against_running_server() {
    let (addr_tx, addr_rx) = std::sync::mpsc::channel();
    let (stop_tx, stop_rx) = tokio::sync::oneshot::channel::<()>();
    let config = shelftalk_server::ServerConfig {
        port: 0,
        data: shelftalk_core::orchestrator::DataPaths::in_dir(data("")),
        ..Default::default()
    };
    let server = std::thread::spawn(move || {
        tokio::runtime::Runtime::new()
            .unwrap()
            .block_on(shelftalk_server::serve(
                config,
                move |addr| addr_tx.send(addr).unwrap(),
                async move {
                    let _ = stop_rx.await;
                },
            ))
    });
    let addr = addr_rx.recv().unwrap();
    let url = format!("http://{addr}");
    let o = run_with_stdin(
        &["chat", "--server", &url],
        "how heavy is this?\n/scan 036000291452\nhow heavy is this?\n/scan 036000291453\n/quit\n",
    );
    stop_tx.send(()).unwrap();
    server.join().unwrap().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("scan a product first"), "{out}");
    assert!(out.contains("The weight of Office Chair is 14 lb."), "{out}");
    assert!(out.contains("error: invalid barcode"), "{out}");
}

#[test]
fn unreachable_server_fails_at_startup() {
    let o = run_with_stdin(&["chat", "--server", "http://127.0.0.1:9"], "/quit\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot start a session"));
}
