#![allow(dead_code)]

use std::io::{BufRead, BufReader, Write};
use std::net::{SocketAddr, TcpListener};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use xel_core::rank::{BuiltinEmbedder, Embedder};

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn corpus(name: &str) -> String {
    fixtures().join("corpus").join(name).display().to_string()
}

pub fn xel<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xel"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Build the fixture corpus index into `dir` and return its path.
pub fn corpus_index(dir: &Path) -> String {
    let index = dir.join("om.tsv").display().to_string();
    let out = xel(&[
        "build-index",
        "--dump",
        &corpus("om.dump"),
        "--lang",
        "om",
        "--rules",
        &corpus("rules.txt"),
        "--out",
        &index,
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    index
}

/// Flags for linking the fixture corpus with every provider wired up.
pub fn link_flags(index: &str) -> Vec<String> {
    [
        "--index",
        index,
        "--dataset",
        &corpus("dataset.jsonl"),
        "--rules",
        &corpus("rules.txt"),
        "--search-fixture",
        &corpus("search.json"),
        "--geo-fixture",
        &corpus("geo.json"),
        "--summaries",
        &corpus("summaries.json"),
        "--pivot-langs",
        "am",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

/// A protocol-conformant embedding server backed by the builtin embedder,
/// serving one connection.
pub fn spawn_embed_server() -> SocketAddr {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    std::thread::spawn(move || {
        let (stream, _) = listener.accept().unwrap();
        let mut writer = stream.try_clone().unwrap();
        let inner = BuiltinEmbedder;
        for line in BufReader::new(stream).lines() {
            let Ok(line) = line else { break };
            let req: serde_json::Value = serde_json::from_str(&line).unwrap();
            let reply = if req.get("op").is_some() {
                serde_json::json!({"dim": inner.dim(), "model": "builtin-trigram"})
            } else {
                let v = inner
                    .embed(req["unit"].as_str().unwrap(), req["sentence"].as_str().unwrap())
                    .unwrap();
                serde_json::json!({"id": req["id"], "vector": v})
            };
            if writeln!(writer, "{reply}").is_err() {
                break;
            }
        }
    });
    addr
}
