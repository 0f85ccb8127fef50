use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::process::{Child, Command, Output, Stdio};

use serde_json::Value;

const RAW: &str = r#"{"id":1270000000000000001,"created_at":"2020-06-12T09:00:00Z","text":"Stay home, stay safe! #COVID19","user":"alice","location":"New York, NY"}
{"id":1270000000000000002,"created_at":"2020-06-12T10:30:00Z","text":"Coronavirus testing lines are terrible today","user":"bob","location":"Texas"}
{"id":1270000000000000003,"created_at":"2020-06-12T11:00:00Z","text":"great news about the covid vaccine trial","user":"carol","verified":true,"location":"California"}
{"id":1270000000000000004,"created_at":"2020-06-12T12:00:00Z","text":"lunch was good","user":"dave","location":"Georgia"}
{"id":1270000000000000005,"created_at":"2020-06-13T08:00:00Z","text":"masks help stop corona spreading, wear masks","user":"alice","location":"Austin, TX"}
{"id":1270000000000000006,"created_at":"2020-06-13T09:00:00Z","text":"new covid cases rising, hospital is full","user":"bob","location":"Texas"}
{"id":1270000000000000007,"created_at":"2020-06-13T10:00:00Z","text":"happy the covid lockdown is ending","user":"erin","location":"somewhere far away"}
{"id":1270000000000000008,"created_at":"2020-06-13T11:00:00Z","text":"covid testing and masks for everyone","user":"carol","verified":true,"location":"California"}
not json at all
"#;

const CONFIG: &str = r#"data_dir = "data"

[lda]
k = 2
iterations = 20
min_df = 1
max_df = 1.0
"#;

fn coronavis() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_coronavis"));
    for var in ["CORONAVIS_PORT", "CORONAVIS_DATA_DIR", "CORONAVIS_SALT", "CORONAVIS_URL"] {
        cmd.env_remove(var);
    }
    cmd
}

fn run_with_stdin(cmd: &mut Command, input: &str) -> Output {
    let mut child = cmd
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Ingests the raw fixture into `<root>/data` and writes `<root>/config.toml`.
fn prepare(root: &Path) {
    let out = run_with_stdin(
        coronavis()
            .args(["ingest", "--out-dir"])
            .arg(root.join("data"))
            .args(["--salt", "test-salt"]),
        RAW,
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let report: Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert_eq!(report["lines"], 9);
    assert_eq!(report["kept"], 6);
    assert_eq!(report["malformed"], 1);
    assert_eq!(report["off_topic"], 1);
    assert_eq!(report["no_location"], 1);
    std::fs::write(root.join("config.toml"), CONFIG).unwrap();
}

#[test]
fn ingest_of_empty_input_writes_a_header_only_csv() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("empty.csv");
    let out = run_with_stdin(
        coronavis().args(["ingest", "--salt", "s", "--out"]).arg(&target),
        "",
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        std::fs::read_to_string(&target).unwrap(),
        "tweet_id,created_at,loc,text,user_id,verified\n"
    );
}

#[test]
fn ingest_writes_daily_files() {
    let dir = tempfile::tempdir().unwrap();
    prepare(dir.path());
    let day1 = std::fs::read_to_string(dir.path().join("data/2020-06-12.csv")).unwrap();
    let day2 = std::fs::read_to_string(dir.path().join("data/2020-06-13.csv")).unwrap();
    assert_eq!(day1.lines().count(), 4);
    assert_eq!(day2.lines().count(), 4);
    assert!(day1.contains(",NY,stay home stay safe #covid19,"));
    assert!(!day1.contains("alice"));
}

#[test]
fn analyze_emits_every_report() {
    let dir = tempfile::tempdir().unwrap();
    prepare(dir.path());
    let out_dir = dir.path().join("out");
    let out = coronavis()
        .args(["analyze", "--config"])
        .arg(dir.path().join("config.toml"))
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    for name in [
        "report", "frequency", "top_words", "top_bigrams", "frequent_topics", "featured_topics",
        "sentiment_series", "subjectivity_series", "sentiment_distribution", "sentiment_labels", "cohorts",
        "wordclouds", "mobility", "lda",
    ] {
        let path = out_dir.join(format!("{name}.json"));
        let text = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {name}.json"));
        serde_json::from_str::<Value>(&text).unwrap_or_else(|e| panic!("{name}.json: {e}"));
    }
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["tweet_count"], 6);
    assert_eq!(report["mobility"]["movements"], 1);
    let lda: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("lda.json")).unwrap()).unwrap();
    assert_eq!(lda["k"], 2);
}

#[test]
fn lda_and_mobility_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    prepare(dir.path());
    let config = dir.path().join("config.toml");
    let lda_out = dir.path().join("topics.json");
    let out = coronavis()
        .args(["lda", "--config"])
        .arg(&config)
        .args(["--k", "3", "--iterations", "10", "--seed", "5", "--top-terms", "4", "--out"])
        .arg(&lda_out)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let payload: Value = serde_json::from_str(&std::fs::read_to_string(&lda_out).unwrap()).unwrap();
    assert_eq!(payload["schema_version"], 1);
    assert_eq!(payload["k"], 3);
    assert_eq!(payload["seed"], 5);
    assert!(payload["rankings"].as_array().unwrap().iter().all(|r| r["terms"].as_array().unwrap().len() <= 4));

    let cases = dir.path().join("cases.csv");
    std::fs::write(&cases, "state,week_start,cases\nTX,2020-06-18,120\nNY,2020-06-18,300\n").unwrap();
    let mob_out = dir.path().join("mobility");
    let out = coronavis()
        .args(["mobility", "--config"])
        .arg(&config)
        .arg("--cases")
        .arg(&cases)
        .arg("--out-dir")
        .arg(&mob_out)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let events = std::fs::read_to_string(mob_out.join("events.csv")).unwrap();
    assert_eq!(events.lines().count(), 2);
    assert!(events.lines().nth(1).unwrap().contains(",NY,TX,"));
    let joined = std::fs::read_to_string(mob_out.join("lagged_join.csv")).unwrap();
    assert_eq!(joined.lines().count(), 3);
    assert!(mob_out.join("weekly.csv").exists());
}

#[test]
fn usage_and_runtime_errors_have_distinct_exit_codes() {
    let out = coronavis().arg("bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = coronavis().args(["ingest", "--salt", "s"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let out = coronavis()
        .args(["analyze", "--data-dir"])
        .arg(dir.path())
        .arg("--out-dir")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn replay_exits_when_done() {
    let dir = tempfile::tempdir().unwrap();
    prepare(dir.path());
    let out = coronavis()
        .args(["replay", "--config"])
        .arg(dir.path().join("config.toml"))
        .args(["--port", "0", "--speedup", "1e9", "--exit-when-done"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let summary: Value = serde_json::from_str(stderr(&out).lines().last().unwrap()).unwrap();
    assert_eq!(summary["published"], 2);
}

struct KillOnDrop(Child);

impl Drop for KillOnDrop {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

#[test]
fn query_talks_to_a_running_server() {
    let dir = tempfile::tempdir().unwrap();
    prepare(dir.path());
    let mut server = KillOnDrop(
        coronavis()
            .args(["serve", "--config"])
            .arg(dir.path().join("config.toml"))
            .args(["--port", "0"])
            .stderr(Stdio::piped())
            .spawn()
            .unwrap(),
    );
    let mut lines = BufReader::new(server.0.stderr.take().unwrap()).lines();
    let url = lines
        .by_ref()
        .map_while(Result::ok)
        .find_map(|l| l.strip_prefix("listening on ").map(str::to_string))
        .expect("server did not announce its address");
    std::thread::spawn(move || lines.for_each(drop));

    let out = coronavis().args(["query", "/api/health", "--url", &url]).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let health: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(health["data"]["tweets"], 6);
    assert_eq!(health["data"]["lda_ready"], true);

    let out = coronavis()
        .args(["query", "/api/words/top", "state=TX", "k=2", "--url", &url])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let words: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(words["data"]["scope"], "TX");
    assert_eq!(words["data"]["words"].as_array().unwrap().len(), 2);

    let out = coronavis()
        .args(["query", "/api/frequency", "state=XX", "--url", &url])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("STATE_UNKNOWN"));
}
