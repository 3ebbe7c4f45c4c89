//! Client for a remote model server speaking newline-delimited JSON.
//!
//! One request per line, one response per line:
//!
//! ```text
//! request:  {"id": 7, "op": "full", "tokens": ["hello", " ", "how"]}
//! response: {"id": 7, "predictions": [",", " ", " "]}
//! ```
//!
//! `op` is `"full"` (one prediction per input position) or `"step"` (exactly
//! one prediction). Tokens travel as bare text; the client re-classifies
//! predictions against its punctuation set. Transport failures and contract
//! violations surface as errors, never as fabricated predictions.

use std::io::{BufRead, BufReader, BufWriter, Write};
use std::net::TcpStream;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::model::{CausalModel, ModelError, PredictionSeq};
use crate::token::{PunctuationSet, Token};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireRequest {
    pub id: u64,
    pub op: String,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WireResponse {
    pub id: u64,
    pub predictions: Vec<String>,
}

struct Connection {
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
}

/// A [`CausalModel`] backed by a TCP endpoint. Maintains one lazily opened
/// connection per client; clone-free, so give each worker its own instance.
pub struct RemoteModel {
    endpoint: String,
    puncts: PunctuationSet,
    timeout: Duration,
    next_id: AtomicU64,
    conn: Mutex<Option<Connection>>,
}

impl RemoteModel {
    pub fn connect(endpoint: impl Into<String>, puncts: PunctuationSet) -> Self {
        RemoteModel {
            endpoint: endpoint.into(),
            puncts,
            timeout: Duration::from_secs(10),
            next_id: AtomicU64::new(1),
            conn: Mutex::new(None),
        }
    }

    pub fn endpoint(&self) -> &str {
        &self.endpoint
    }

    fn transport(&self, source: std::io::Error) -> ModelError {
        ModelError::Transport { endpoint: self.endpoint.clone(), source }
    }

    fn open(&self) -> Result<Connection, ModelError> {
        let stream = TcpStream::connect(&self.endpoint).map_err(|e| self.transport(e))?;
        stream.set_read_timeout(Some(self.timeout)).map_err(|e| self.transport(e))?;
        stream.set_write_timeout(Some(self.timeout)).map_err(|e| self.transport(e))?;
        let reader = BufReader::new(stream.try_clone().map_err(|e| self.transport(e))?);
        Ok(Connection { reader, writer: BufWriter::new(stream) })
    }

    fn roundtrip(&self, op: &str, tokens: &[Token]) -> Result<Vec<String>, ModelError> {
        let request = WireRequest {
            id: self.next_id.fetch_add(1, Ordering::Relaxed),
            op: op.to_string(),
            tokens: tokens.iter().map(|t| t.text().to_string()).collect(),
        };
        let mut guard = self.conn.lock().expect("remote connection lock poisoned");
        if guard.is_none() {
            *guard = Some(self.open()?);
        }
        let conn = guard.as_mut().expect("connection just opened");

        let line = serde_json::to_string(&request).expect("request serialization cannot fail");
        let io_result = conn
            .writer
            .write_all(line.as_bytes())
            .and_then(|()| conn.writer.write_all(b"\n"))
            .and_then(|()| conn.writer.flush());
        if let Err(e) = io_result {
            *guard = None;
            return Err(self.transport(e));
        }

        let mut raw = String::new();
        match conn.reader.read_line(&mut raw) {
            Ok(0) => {
                *guard = None;
                return Err(self.transport(std::io::Error::new(
                    std::io::ErrorKind::UnexpectedEof,
                    "server closed the connection",
                )));
            }
            Ok(_) => {}
            Err(e) => {
                *guard = None;
                return Err(self.transport(e));
            }
        }
        let malformed = |reason: String| ModelError::MalformedResponse {
            endpoint: self.endpoint.clone(),
            reason,
            raw: raw.trim_end().to_string(),
        };
        let response: WireResponse =
            serde_json::from_str(raw.trim_end()).map_err(|e| malformed(e.to_string()))?;
        if response.id != request.id {
            return Err(malformed(format!(
                "response id {} does not match request id {}",
                response.id, request.id
            )));
        }
        Ok(response.predictions)
    }

    fn classify(&self, texts: Vec<String>) -> Vec<Token> {
        texts.iter().map(|t| Token::classify(t, &self.puncts)).collect()
    }
}

impl CausalModel for RemoteModel {
    fn forward_full(&self, tokens: &[Token]) -> Result<PredictionSeq, ModelError> {
        if tokens.is_empty() {
            return Ok(Vec::new());
        }
        let predictions = self.roundtrip("full", tokens)?;
        if predictions.len() != tokens.len() {
            return Err(ModelError::LengthMismatch {
                endpoint: self.endpoint.clone(),
                expected: tokens.len(),
                got: predictions.len(),
            });
        }
        Ok(self.classify(predictions))
    }

    fn forward_step(&self, tokens: &[Token]) -> Result<Token, ModelError> {
        if tokens.is_empty() {
            return Err(ModelError::EmptyInput);
        }
        let predictions = self.roundtrip("step", tokens)?;
        if predictions.len() != 1 {
            return Err(ModelError::LengthMismatch {
                endpoint: self.endpoint.clone(),
                expected: 1,
                got: predictions.len(),
            });
        }
        Ok(self.classify(predictions).pop().expect("length checked above"))
    }
}

/// Outcome of one protocol conformance probe.
#[derive(Debug, Clone, Serialize)]
pub struct ServeCheckReport {
    pub endpoint: String,
    pub checks: Vec<(String, Result<String, String>)>,
}

impl ServeCheckReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|(_, outcome)| outcome.is_ok())
    }
}

/// Probe an endpoint's `full` and `step` operations and validate the length
/// contracts and step/full consistency on a small fixed sequence.
pub fn serve_check(endpoint: &str, puncts: &PunctuationSet) -> ServeCheckReport {
    let model = RemoteModel::connect(endpoint, puncts.clone());
    let probe = vec![Token::word("hello"), Token::space(), Token::word("how")];
    let mut checks: Vec<(String, Result<String, String>)> = Vec::new();

    let full = model.forward_full(&probe);
    checks.push((
        format!("full: {} tokens in, {} predictions out", probe.len(), probe.len()),
        match &full {
            Ok(p) => Ok(format!("got {:?}", p.iter().map(|t| t.text()).collect::<Vec<_>>())),
            Err(e) => Err(e.to_string()),
        },
    ));

    let step = model.forward_step(&probe);
    checks.push((
        "step: exactly one prediction".to_string(),
        match &step {
            Ok(t) => Ok(format!("got {:?}", t.text())),
            Err(e) => Err(e.to_string()),
        },
    ));

    if let (Ok(full), Ok(step)) = (&full, &step) {
        let consistent = full.last() == Some(step);
        checks.push((
            "consistency: step equals last of full".to_string(),
            if consistent {
                Ok("agreed".to_string())
            } else {
                Err(format!(
                    "full ends with {:?} but step returned {:?}",
                    full.last().map(|t| t.text()),
                    step.text()
                ))
            },
        ));
    }

    ServeCheckReport { endpoint: endpoint.to_string(), checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::net::TcpListener;
    use std::thread;

    /// Serve `respond` for each request line, accepting connections until the
    /// test process exits.
    fn spawn_server(respond: impl Fn(WireRequest) -> String + Send + Sync + 'static) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap().to_string();
        let respond = std::sync::Arc::new(respond);
        thread::spawn(move || {
            for stream in listener.incoming() {
                let Ok(stream) = stream else { break };
                let respond = respond.clone();
                thread::spawn(move || {
                    let mut reader = BufReader::new(stream.try_clone().unwrap());
                    let mut writer = BufWriter::new(stream);
                    let mut line = String::new();
                    while let Ok(n) = reader.read_line(&mut line) {
                        if n == 0 {
                            break;
                        }
                        let request: WireRequest = match serde_json::from_str(line.trim_end()) {
                            Ok(r) => r,
                            Err(_) => break,
                        };
                        let reply = respond(request);
                        if writer.write_all(reply.as_bytes()).is_err()
                            || writer.write_all(b"\n").is_err()
                            || writer.flush().is_err()
                        {
                            break;
                        }
                        line.clear();
                    }
                });
            }
        });
        addr
    }

    fn conforming(request: WireRequest) -> String {
        // Predict a comma after "hello", end-of-sequence otherwise.
        let predict = |prefix: &[String]| -> String {
            match prefix.last().map(String::as_str) {
                Some("hello") => ",".to_string(),
                _ => crate::token::EOS_TEXT.to_string(),
            }
        };
        let predictions: Vec<String> = match request.op.as_str() {
            "full" => {
                (1..=request.tokens.len()).map(|j| predict(&request.tokens[..j])).collect()
            }
            _ => vec![predict(&request.tokens)],
        };
        serde_json::to_string(&WireResponse { id: request.id, predictions }).unwrap()
    }

    #[test]
    fn full_and_step_respect_the_contract() {
        let addr = spawn_server(conforming);
        let model = RemoteModel::connect(&addr, PunctuationSet::default());

        let tokens = vec![Token::word("hello"), Token::space(), Token::word("how")];
        let full = model.forward_full(&tokens).unwrap();
        assert_eq!(full.len(), 3);
        assert_eq!(full[0], Token::punct(','));

        let step = model.forward_step(&[Token::word("hello")]).unwrap();
        assert_eq!(step, Token::punct(','));

        let report = serve_check(&addr, &PunctuationSet::default());
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn short_response_is_a_length_mismatch() {
        let addr = spawn_server(|request| {
            serde_json::to_string(&WireResponse {
                id: request.id,
                predictions: vec![" ".to_string(); request.tokens.len().saturating_sub(1)],
            })
            .unwrap()
        });
        let model = RemoteModel::connect(&addr, PunctuationSet::default());
        let tokens = vec![Token::word("a"), Token::word("b"), Token::word("c")];
        let err = model.forward_full(&tokens).unwrap_err();
        assert!(
            matches!(err, ModelError::LengthMismatch { expected: 3, got: 2, .. }),
            "{err}"
        );

        let report = serve_check(&addr, &PunctuationSet::default());
        assert!(!report.passed());
    }

    #[test]
    fn garbage_payload_is_a_malformed_response() {
        let addr = spawn_server(|_| "not json at all".to_string());
        let model = RemoteModel::connect(&addr, PunctuationSet::default());
        let err = model.forward_step(&[Token::word("a")]).unwrap_err();
        assert!(matches!(err, ModelError::MalformedResponse { .. }), "{err}");
    }

    #[test]
    fn unreachable_endpoint_is_a_transport_error() {
        let model = RemoteModel::connect("127.0.0.1:1", PunctuationSet::default());
        let err = model.forward_step(&[Token::word("a")]).unwrap_err();
        assert!(matches!(err, ModelError::Transport { .. }), "{err}");
    }
}
