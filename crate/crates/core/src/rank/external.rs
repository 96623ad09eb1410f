//! Client for an external embedding service speaking newline-delimited JSON
//! over TCP.
//!
//! Request `{"id","unit","sentence"}`, response `{"id","vector":[...]}` or
//! `{"id","error":code}`. A `{"op":"health"}` line answers `{"dim","model"}`.

use std::io::{BufRead, BufReader, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::embed::{EmbedError, Embedder};

#[derive(Debug, Serialize)]
struct EmbedRequest<'a> {
    id: String,
    unit: &'a str,
    sentence: &'a str,
}

#[derive(Debug, Deserialize)]
struct EmbedResponse {
    id: Option<String>,
    #[serde(default)]
    vector: Option<Vec<f64>>,
    #[serde(default)]
    error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub dim: usize,
    pub model: String,
}

struct Connection {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    next_id: u64,
}

impl Connection {
    fn roundtrip(&mut self, line: &str) -> Result<String, EmbedError> {
        let io = |e: std::io::Error| EmbedError::Unavailable(e.to_string());
        self.writer.write_all(line.as_bytes()).map_err(io)?;
        self.writer.write_all(b"\n").map_err(io)?;
        self.writer.flush().map_err(io)?;
        let mut response = String::new();
        if self.reader.read_line(&mut response).map_err(io)? == 0 {
            return Err(EmbedError::Unavailable("server closed the connection".into()));
        }
        Ok(response)
    }
}

/// One connection, used by one request at a time.
pub struct ExternalEmbedder {
    conn: Mutex<Connection>,
    health: Health,
}

impl ExternalEmbedder {
    pub fn connect(addr: impl ToSocketAddrs, timeout: Duration) -> Result<Self, EmbedError> {
        let unavailable = |e: std::io::Error| EmbedError::Unavailable(e.to_string());
        let stream = TcpStream::connect(addr).map_err(unavailable)?;
        stream.set_read_timeout(Some(timeout)).map_err(unavailable)?;
        stream.set_write_timeout(Some(timeout)).map_err(unavailable)?;
        let mut conn = Connection {
            reader: BufReader::new(stream.try_clone().map_err(unavailable)?),
            writer: stream,
            next_id: 1,
        };
        let line = conn.roundtrip(r#"{"op":"health"}"#)?;
        let health: Health =
            serde_json::from_str(&line).map_err(|e| EmbedError::Protocol(format!("bad health reply: {e}")))?;
        if health.dim == 0 {
            return Err(EmbedError::Protocol("server reports dimension 0".into()));
        }
        Ok(ExternalEmbedder {
            conn: Mutex::new(conn),
            health,
        })
    }

    pub fn health(&self) -> &Health {
        &self.health
    }
}

impl Embedder for ExternalEmbedder {
    fn dim(&self) -> usize {
        self.health.dim
    }

    fn single_flight(&self) -> bool {
        true
    }

    fn embed(&self, unit: &str, sentence: &str) -> Result<Vec<f64>, EmbedError> {
        let mut conn = self.conn.lock().unwrap_or_else(|p| p.into_inner());
        let id = conn.next_id.to_string();
        conn.next_id += 1;
        let request = serde_json::to_string(&EmbedRequest {
            id: id.clone(),
            unit,
            sentence,
        })
        .map_err(|e| EmbedError::Protocol(e.to_string()))?;
        let line = conn.roundtrip(&request)?;
        let response: EmbedResponse =
            serde_json::from_str(&line).map_err(|e| EmbedError::Protocol(format!("bad reply: {e}")))?;
        if response.id.as_deref() != Some(id.as_str()) {
            return Err(EmbedError::Protocol(format!(
                "reply id {:?} does not match request id {id}",
                response.id
            )));
        }
        match (response.vector, response.error) {
            (_, Some(code)) => Err(EmbedError::Protocol(format!("server error `{code}`"))),
            (Some(v), None) if v.len() != self.health.dim => Err(EmbedError::Dimension {
                expected: self.health.dim,
                got: v.len(),
            }),
            (Some(v), None) if v.iter().any(|x| !x.is_finite()) => Err(EmbedError::NonFinite),
            (Some(v), None) => Ok(v),
            (None, None) => Err(EmbedError::Protocol("reply has neither vector nor error".into())),
        }
    }
}
