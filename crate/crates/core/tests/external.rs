//! Protocol tests against scripted Python children.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use mosbd_core::dominance::Bounds;
use mosbd_core::engine::{run, Algorithm, EvalError, Evaluator, RunConfig};
use mosbd_core::io::{write_archive_csv, ExternalEvaluator};
use mosbd_core::Error;

const PRELUDE: &str = r#"
import json, sys, time
hs = json.loads(sys.stdin.readline())
K, Q = hs["k"], hs["q"]
def reply(rid, phi):
    sys.stdout.write(json.dumps({"id": rid, "phi": phi}) + "\n")
    sys.stdout.flush()
"#;

struct Child {
    _dir: tempfile::TempDir,
    script: PathBuf,
}

fn child(body: &str) -> Child {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("child.py");
    std::fs::write(&script, format!("{PRELUDE}\n{body}")).unwrap();
    Child { _dir: dir, script }
}

fn spawn(c: &Child, k: usize, q: usize, timeout: Duration) -> ExternalEvaluator {
    let command = vec!["python3".to_string(), c.script.display().to_string()];
    ExternalEvaluator::spawn(&command, q, Arc::new(Bounds::unit(k)), timeout).unwrap()
}

const ECHO: &str = r#"
for line in sys.stdin:
    req = json.loads(line)
    reply(req["id"], req["x"][:Q])
"#;

#[test]
fn echo_round_trips_bit_exactly() {
    let c = child(ECHO);
    let ev = spawn(&c, 3, 2, Duration::from_secs(10));
    let tricky = [0.1 + 0.2, 1.0 / 3.0, 5e-324, 0.999_999_999_999_999_9, 2f64.sqrt() - 1.0];
    for w in tricky.windows(3) {
        let phi = ev.evaluate(w).unwrap();
        assert_eq!(phi.len(), 2);
        for (a, b) in phi.iter().zip(w) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn shuffled_answers_are_matched_by_id() {
    // buffers the whole batch, then answers in reverse
    let c = child(
        r#"
pending = []
for line in sys.stdin:
    pending.append(json.loads(line))
    if len(pending) == 6:
        for req in reversed(pending):
            reply(req["id"], [sum(req["x"]), req["x"][0]])
        pending = []
"#,
    );
    let ev = spawn(&c, 2, 2, Duration::from_secs(10));
    let xs: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64 / 10.0, 0.5]).collect();
    let got = ev.evaluate_batch(&xs);
    for (x, r) in xs.iter().zip(got) {
        assert_eq!(r.unwrap(), vec![x[0] + x[1], x[0]]);
    }
}

#[test]
fn slow_answer_times_out_and_late_reply_is_ignored() {
    let c = child(
        r#"
for line in sys.stdin:
    req = json.loads(line)
    if req["id"] == 0:
        time.sleep(0.8)
        reply(0, [9.0, 9.0])
    else:
        reply(req["id"], req["x"][:Q])
"#,
    );
    let ev = spawn(&c, 2, 2, Duration::from_millis(300));
    let t = Instant::now();
    let first = ev.evaluate(&[0.25, 0.75]);
    assert!(matches!(first, Err(EvalError::Failed(_))), "{first:?}");
    assert!(t.elapsed() < Duration::from_millis(700));
    // let the stale answer to request 0 arrive before asking again
    std::thread::sleep(Duration::from_millis(800));
    assert_eq!(ev.evaluate(&[0.3, 0.4]).unwrap(), vec![0.3, 0.4]);
}

#[test]
fn malformed_and_short_answers_fail_one_evaluation() {
    let c = child(
        r#"
for line in sys.stdin:
    req = json.loads(line)
    if req["id"] == 0:
        sys.stdout.write("not json\n"); sys.stdout.flush()
    elif req["id"] == 1:
        reply(1, [0.5])
    else:
        reply(req["id"], req["x"][:Q])
"#,
    );
    let ev = spawn(&c, 2, 2, Duration::from_secs(10));
    assert!(matches!(ev.evaluate(&[0.1, 0.2]), Err(EvalError::Failed(_))));
    assert!(matches!(ev.evaluate(&[0.1, 0.2]), Err(EvalError::Failed(_))));
    assert_eq!(ev.evaluate(&[0.1, 0.2]).unwrap(), vec![0.1, 0.2]);
}

#[test]
fn crash_is_fatal() {
    let c = child(
        r#"
line = sys.stdin.readline()
sys.exit(3)
"#,
    );
    let ev = spawn(&c, 2, 2, Duration::from_secs(10));
    assert!(matches!(ev.evaluate(&[0.1, 0.2]), Err(EvalError::Fatal(_))));
    // stays dead
    assert!(matches!(ev.evaluate(&[0.1, 0.2]), Err(EvalError::Fatal(_))));
}

#[test]
fn missing_program_is_reported() {
    let command = vec!["/nonexistent/evaluator".to_string()];
    let err = ExternalEvaluator::spawn(&command, 2, Arc::new(Bounds::unit(2)), Duration::from_secs(1))
        .err()
        .unwrap();
    assert!(matches!(err, Error::EvaluatorAborted(_)), "{err}");
}

/// The same two-objective function, in process.
struct Local;

impl Evaluator for Local {
    fn dim(&self) -> usize {
        3
    }

    fn n_objectives(&self) -> usize {
        2
    }

    fn bounds(&self) -> Arc<Bounds> {
        Arc::new(Bounds::unit(3))
    }

    fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        let g = 1.0 + (x[1] - 0.5) * (x[1] - 0.5) + (x[2] - 0.5) * (x[2] - 0.5);
        Ok(vec![x[0] * g, (1.0 - x[0]) * g])
    }
}

#[test]
fn external_run_matches_in_process_run() {
    let c = child(
        r#"
for line in sys.stdin:
    req = json.loads(line)
    x = req["x"]
    g = 1.0 + (x[1] - 0.5) * (x[1] - 0.5) + (x[2] - 0.5) * (x[2] - 0.5)
    reply(req["id"], [x[0] * g, (1.0 - x[0]) * g])
"#,
    );
    let ev = spawn(&c, 3, 2, Duration::from_secs(10));
    let mut config = RunConfig::dtlz1_small(2);
    config.max_iterations = 300;
    config.t_rl_max = 60;
    config.stop_on_stationarity = false;
    for algo in [Algorithm::Sbd, Algorithm::Std] {
        config.algo = algo;
        let a = run(config.clone(), &ev).unwrap();
        let b = run(config.clone(), &Local).unwrap();
        let (mut ca, mut cb) = (Vec::new(), Vec::new());
        write_archive_csv(&a.archive, &mut ca).unwrap();
        write_archive_csv(&b.archive, &mut cb).unwrap();
        assert_eq!(ca, cb);
        assert_eq!((a.c_fw, a.t_rl), (b.c_fw, b.t_rl));
    }
}
