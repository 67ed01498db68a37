//! External objective programs speaking a line protocol on stdin/stdout.
//!
//! Each request is one line of space-separated coordinates. Each reply is one
//! line, either `F <value>` or `INFEASIBLE`.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use crate::constraints::{ConstraintSet, Predicate};
use crate::error::EvalError;
use crate::Objective;

#[derive(Debug, Clone, PartialEq)]
pub struct BlackBoxSpec {
    /// Run through `sh -c`.
    pub command: String,
    pub timeout: Duration,
    pub dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reply {
    Value(f64),
    Infeasible,
}

pub fn parse_reply(line: &str) -> Result<Reply, EvalError> {
    let t = line.trim();
    if t == "INFEASIBLE" {
        return Ok(Reply::Infeasible);
    }
    t.strip_prefix("F ")
        .and_then(|v| v.trim().parse::<f64>().ok())
        .map(Reply::Value)
        .ok_or_else(|| EvalError::Protocol {
            reply: line.to_string(),
        })
}

/// Shortest decimal that parses back to exactly `v`, in exponent form for
/// very large or small magnitudes.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Coordinates as sent on the wire.
pub fn format_request(x: &[f64]) -> String {
    x.iter().copied().map(format_f64).collect::<Vec<_>>().join(" ")
}

struct Channel {
    child: Child,
    stdin: ChildStdin,
    replies: Receiver<String>,
}

/// A running black-box program.
///
/// The feasibility predicate from [`BlackBox::constraints`] sends the request
/// and keeps a numeric reply, so a feasible point that is then evaluated costs
/// exactly one request.
pub struct BlackBox {
    spec: BlackBoxSpec,
    channel: Mutex<Channel>,
    last: Mutex<Option<(Vec<f64>, f64)>>,
    requests: Mutex<u64>,
}

impl BlackBox {
    pub fn spawn(spec: BlackBoxSpec) -> Result<Self, EvalError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(&spec.command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| EvalError::Io(e.to_string()))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Self {
            spec,
            channel: Mutex::new(Channel {
                child,
                stdin,
                replies: rx,
            }),
            last: Mutex::new(None),
            requests: Mutex::new(0),
        })
    }

    pub fn spec(&self) -> &BlackBoxSpec {
        &self.spec
    }

    /// Requests sent so far.
    pub fn requests(&self) -> u64 {
        *self.requests.lock().unwrap()
    }

    pub fn request(&self, x: &[f64]) -> Result<Reply, EvalError> {
        if x.len() != self.spec.dim {
            return Err(EvalError::Other(format!(
                "black box expects {} coordinates, got {}",
                self.spec.dim,
                x.len()
            )));
        }
        let mut ch = self.channel.lock().unwrap();
        *self.requests.lock().unwrap() += 1;
        writeln!(ch.stdin, "{}", format_request(x))
            .and_then(|_| ch.stdin.flush())
            .map_err(|e| exit_error(&mut ch, e.to_string()))?;
        match ch.replies.recv_timeout(self.spec.timeout) {
            Ok(line) => parse_reply(&line),
            Err(RecvTimeoutError::Timeout) => Err(EvalError::Timeout(self.spec.timeout)),
            Err(RecvTimeoutError::Disconnected) => {
                Err(exit_error(&mut ch, "closed its output".into()))
            }
        }
    }

    fn feasible(&self, x: &[f64]) -> Result<bool, EvalError> {
        match self.request(x)? {
            Reply::Value(v) => {
                *self.last.lock().unwrap() = Some((x.to_vec(), v));
                Ok(true)
            }
            Reply::Infeasible => Ok(false),
        }
    }

    /// A constraint set holding the program's feasibility verdict as a
    /// predicate.
    pub fn constraints(self: &Arc<Self>) -> ConstraintSet {
        ConstraintSet::new().fallible_predicate(self.predicate())
    }

    pub fn predicate(self: &Arc<Self>) -> Predicate {
        let bb = Arc::clone(self);
        Arc::new(move |x: &[f64]| bb.feasible(x))
    }
}

fn exit_error(ch: &mut Channel, context: String) -> EvalError {
    match ch.child.try_wait() {
        Ok(Some(status)) => EvalError::ProcessExit(format!("{status}")),
        _ => EvalError::ProcessExit(context),
    }
}

impl Objective for BlackBox {
    fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        if let Some((cx, v)) = self.last.lock().unwrap().take() {
            if cx == x {
                return Ok(v);
            }
        }
        match self.request(x)? {
            Reply::Value(v) => Ok(v),
            // only reachable without the predicate installed
            Reply::Infeasible => Ok(f64::INFINITY),
        }
    }
}

impl Drop for BlackBox {
    fn drop(&mut self) {
        if let Ok(ch) = self.channel.get_mut() {
            let _ = ch.child.kill();
            let _ = ch.child.wait();
        }
    }
}

/// Spawn the program and return it with its feasibility constraints.
pub fn blackbox_objective(spec: BlackBoxSpec) -> Result<(Arc<BlackBox>, ConstraintSet), EvalError> {
    let bb = Arc::new(BlackBox::spawn(spec)?);
    let c = bb.constraints();
    Ok((bb, c))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(script: &str) -> BlackBoxSpec {
        BlackBoxSpec {
            command: script.to_string(),
            timeout: Duration::from_secs(5),
            dim: 2,
        }
    }

    #[test]
    fn replies_parse() {
        assert_eq!(parse_reply("F 1.5\n").unwrap(), Reply::Value(1.5));
        assert_eq!(parse_reply("F -1e-3").unwrap(), Reply::Value(-1e-3));
        assert_eq!(parse_reply("INFEASIBLE").unwrap(), Reply::Infeasible);
        assert!(matches!(parse_reply("oops"), Err(EvalError::Protocol { .. })));
        assert!(matches!(parse_reply("F"), Err(EvalError::Protocol { .. })));
    }

    #[test]
    fn requests_round_trip() {
        let x = [0.1 + 0.2, -1e-300, 12345.678901234567, 3e20, -0.0, 5e-324];
        let s = format_request(&x);
        let back: Vec<f64> = s.split(' ').map(|t| t.parse().unwrap()).collect();
        assert_eq!(back, x);
        assert_eq!(s, "0.30000000000000004 -1e-300 12345.678901234567 3e20 -0 5e-324");
    }

    #[test]
    fn constant_program() {
        let bb = BlackBox::spawn(spec("while read l; do echo 'F 0'; done")).unwrap();
        assert_eq!(bb.eval(&[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(bb.eval(&[3.0, 4.0]).unwrap(), 0.0);
        assert_eq!(bb.requests(), 2);
    }

    #[test]
    fn predicate_reply_is_reused() {
        let (bb, c) =
            blackbox_objective(spec("while read x y; do echo \"F $x\"; done")).unwrap();
        assert!(crate::is_feasible(&c, &[2.5, 1.0]).unwrap());
        assert_eq!(bb.eval(&[2.5, 1.0]).unwrap(), 2.5);
        assert_eq!(bb.requests(), 1);
    }

    #[test]
    fn infeasible_reply() {
        let (_bb, c) = blackbox_objective(spec("while read l; do echo INFEASIBLE; done")).unwrap();
        assert!(!crate::is_feasible(&c, &[0.0, 0.0]).unwrap());
    }

    #[test]
    fn garbage_reply_is_protocol_error() {
        let bb = BlackBox::spawn(spec("while read l; do echo hello; done")).unwrap();
        assert_eq!(
            bb.eval(&[0.0, 0.0]),
            Err(EvalError::Protocol {
                reply: "hello".into()
            })
        );
    }

    #[test]
    fn exit_and_timeout() {
        let bb = BlackBox::spawn(spec("exit 0")).unwrap();
        assert!(matches!(bb.eval(&[0.0, 0.0]), Err(EvalError::ProcessExit(_))));
        let mut s = spec("sleep 5");
        s.timeout = Duration::from_millis(100);
        let bb = BlackBox::spawn(s).unwrap();
        assert!(matches!(bb.eval(&[0.0, 0.0]), Err(EvalError::Timeout(_))));
    }
}
