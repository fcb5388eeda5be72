//! Evaluator backed by a child process.
//!
//! The child reads one JSON object per line on stdin and answers on stdout.
//! At startup it receives `{"k":K,"q":Q}`. Each request is
//! `{"id":N,"x":[...]}` and must be answered by `{"id":N,"phi":[...]}`;
//! answers may come in any order. Anything the child writes to stderr is
//! passed through.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use log::{debug, warn};
use serde::Deserialize;

use crate::dominance::Bounds;
use crate::engine::{EvalError, Evaluator};
use crate::error::{Error, Result};

#[derive(Deserialize)]
struct Response {
    id: u64,
    phi: Vec<f64>,
}

enum Event {
    Line(String),
    Closed(String),
}

struct Channel {
    child: Child,
    stdin: ChildStdin,
    events: Receiver<Event>,
    next_id: u64,
    /// Requests whose answer is no longer awaited.
    abandoned: HashSet<u64>,
    dead: Option<String>,
}

pub struct ExternalEvaluator {
    k: usize,
    q: usize,
    bounds: Arc<Bounds>,
    timeout: Duration,
    channel: Mutex<Channel>,
}

/// Formats a float with 17 significant digits.
fn fmt_float(out: &mut String, v: f64) {
    write!(out, "{v:.16e}").expect("writing to a string");
}

fn request_line(id: u64, x: &[f64]) -> String {
    let mut line = format!("{{\"id\":{id},\"x\":[");
    for (i, v) in x.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        fmt_float(&mut line, *v);
    }
    line.push_str("]}\n");
    line
}

impl ExternalEvaluator {
    /// Starts `command` (program followed by its arguments) and sends the
    /// handshake.
    pub fn spawn(command: &[String], q: usize, bounds: Arc<Bounds>, timeout: Duration) -> Result<Self> {
        let (program, args) = command
            .split_first()
            .ok_or_else(|| Error::config("problem.command", "must name a program"))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| Error::EvaluatorAborted(format!("cannot start `{program}`: {e}")))?;
        let mut stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, events) = mpsc::channel();
        thread::spawn(move || {
            let mut reader = BufReader::new(stdout);
            loop {
                let mut line = String::new();
                let event = match reader.read_line(&mut line) {
                    Ok(0) => Event::Closed("evaluator closed its output".into()),
                    Ok(_) => Event::Line(line),
                    Err(e) => Event::Closed(format!("reading evaluator output: {e}")),
                };
                let closed = matches!(event, Event::Closed(_));
                if tx.send(event).is_err() || closed {
                    break;
                }
            }
        });
        let k = bounds.dim();
        writeln!(stdin, "{{\"k\":{k},\"q\":{q}}}")
            .and_then(|_| stdin.flush())
            .map_err(|e| Error::EvaluatorAborted(format!("handshake failed: {e}")))?;
        Ok(Self {
            k,
            q,
            bounds,
            timeout,
            channel: Mutex::new(Channel {
                child,
                stdin,
                events,
                next_id: 0,
                abandoned: HashSet::new(),
                dead: None,
            }),
        })
    }

    pub fn timeout(&self) -> Duration {
        self.timeout
    }

    fn parse(&self, line: &str) -> std::result::Result<Response, String> {
        let r: Response =
            serde_json::from_str(line.trim()).map_err(|e| format!("malformed response {:?}: {e}", line.trim()))?;
        Ok(r)
    }

    /// Sends every design, then collects answers until all arrived or the
    /// deadline passed.
    fn exchange(&self, xs: &[Vec<f64>]) -> Vec<std::result::Result<Vec<f64>, EvalError>> {
        let mut ch = self.channel.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(reason) = &ch.dead {
            return xs.iter().map(|_| Err(EvalError::Fatal(reason.clone()))).collect();
        }
        let mut ids = Vec::with_capacity(xs.len());
        for x in xs {
            let id = ch.next_id;
            ch.next_id += 1;
            ids.push(id);
            if let Err(e) = ch
                .stdin
                .write_all(request_line(id, x).as_bytes())
                .and_then(|_| ch.stdin.flush())
            {
                let reason = format!("writing request {id}: {e}");
                ch.dead = Some(reason.clone());
                return xs.iter().map(|_| Err(EvalError::Fatal(reason.clone()))).collect();
            }
        }
        let slots: HashMap<u64, usize> = ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
        let mut results: Vec<Option<std::result::Result<Vec<f64>, EvalError>>> = vec![None; xs.len()];
        let mut open = xs.len();
        let deadline = Instant::now() + self.timeout;
        while open > 0 {
            let wait = deadline.saturating_duration_since(Instant::now());
            match ch.events.recv_timeout(wait) {
                Ok(Event::Line(line)) => {
                    if line.trim().is_empty() {
                        continue;
                    }
                    match self.parse(&line) {
                        Ok(r) => match slots.get(&r.id) {
                            Some(&i) if results[i].is_none() => {
                                results[i] = Some(if r.phi.len() == self.q {
                                    Ok(r.phi)
                                } else {
                                    Err(EvalError::Failed(format!(
                                        "response {} has {} objectives, expected {}",
                                        r.id,
                                        r.phi.len(),
                                        self.q
                                    )))
                                });
                                open -= 1;
                            }
                            Some(_) => warn!("duplicate response for request {}", r.id),
                            None if ch.abandoned.remove(&r.id) => {
                                debug!("late response for request {} ignored", r.id)
                            }
                            None => warn!("response with unknown id {}", r.id),
                        },
                        Err(m) => {
                            // not attributable to a request: fail the oldest open one
                            warn!("{m}");
                            if let Some(i) = results.iter().position(Option::is_none) {
                                results[i] = Some(Err(EvalError::Failed(m)));
                                ch.abandoned.insert(ids[i]);
                                open -= 1;
                            }
                        }
                    }
                }
                Ok(Event::Closed(reason)) => {
                    let status = ch.child.try_wait().ok().flatten();
                    let reason = match status {
                        Some(s) => format!("{reason} ({s})"),
                        None => reason,
                    };
                    ch.dead = Some(reason.clone());
                    for r in results.iter_mut().filter(|r| r.is_none()) {
                        *r = Some(Err(EvalError::Fatal(reason.clone())));
                    }
                    open = 0;
                }
                Err(RecvTimeoutError::Timeout) => {
                    for (i, r) in results.iter_mut().enumerate().filter(|(_, r)| r.is_none()) {
                        *r = Some(Err(EvalError::Failed(format!(
                            "no response to request {} within {:?}",
                            ids[i], self.timeout
                        ))));
                        ch.abandoned.insert(ids[i]);
                    }
                    open = 0;
                }
                Err(RecvTimeoutError::Disconnected) => {
                    let reason = "evaluator output reader stopped".to_string();
                    ch.dead = Some(reason.clone());
                    for r in results.iter_mut().filter(|r| r.is_none()) {
                        *r = Some(Err(EvalError::Fatal(reason.clone())));
                    }
                    open = 0;
                }
            }
        }
        results.into_iter().map(|r| r.expect("every slot filled")).collect()
    }
}

impl Evaluator for ExternalEvaluator {
    fn dim(&self) -> usize {
        self.k
    }

    fn n_objectives(&self) -> usize {
        self.q
    }

    fn bounds(&self) -> Arc<Bounds> {
        Arc::clone(&self.bounds)
    }

    fn evaluate(&self, x: &[f64]) -> std::result::Result<Vec<f64>, EvalError> {
        self.exchange(std::slice::from_ref(&x.to_vec()))
            .pop()
            .expect("one result per request")
    }

    /// All requests are written before any answer is awaited.
    fn evaluate_batch(&self, xs: &[Vec<f64>]) -> Vec<std::result::Result<Vec<f64>, EvalError>> {
        self.exchange(xs)
    }
}

impl Drop for ExternalEvaluator {
    fn drop(&mut self) {
        let ch = self.channel.get_mut().unwrap_or_else(|p| p.into_inner());
        let _ = ch.child.kill();
        let _ = ch.child.wait();
    }
}
