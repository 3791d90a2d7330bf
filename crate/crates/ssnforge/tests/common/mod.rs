#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::process::{Child, Command, Stdio};
use std::thread;

pub const BIN: &str = env!("CARGO_BIN_EXE_ssnforge");
pub const TYPE_JSON: &str = include_str!("../../../../fixtures/weatherstation.json");
pub const INSTANCE_JSON: &str = include_str!("../../../../fixtures/demo-weatherstation.json");
pub const OBSERVES_QUERY: &str = include_str!("../../../../fixtures/observes-air-temperature.rq");

pub fn fixture_path(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

/// A server process on an ephemeral port, killed on drop.
pub struct Server {
    child: Child,
    pub base: String,
}

impl Server {
    pub fn start(data_dir: &Path) -> Server {
        let mut child = Command::new(BIN)
            .args(["--data-dir", data_dir.to_str().unwrap(), "serve", "--port", "0"])
            .env_remove("SSNFORGE_PORT")
            .env_remove("SSNFORGE_BASE_IRI")
            .stdout(Stdio::null())
            .stderr(Stdio::piped())
            .spawn()
            .expect("server starts");
        let mut stderr = BufReader::new(child.stderr.take().unwrap());
        let mut line = String::new();
        let base = loop {
            line.clear();
            if stderr.read_line(&mut line).unwrap() == 0 {
                break None;
            }
            if let Some(addr) = line.trim().strip_prefix("listening on ") {
                break Some(addr.to_owned());
            }
        };
        let Some(base) = base else {
            let _ = child.wait();
            panic!("server exited before listening");
        };
        thread::spawn(move || {
            let mut sink = String::new();
            let _ = stderr.read_to_string(&mut sink);
        });
        Server { child, base }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.base)
    }

    /// Hard kill, as a crash would.
    pub fn kill(mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub struct Reply {
    pub status: u16,
    pub content_type: String,
    pub body: String,
}

impl Reply {
    pub fn json(&self) -> serde_json::Value {
        serde_json::from_str(&self.body).unwrap_or_else(|e| panic!("{e}: {}", self.body))
    }
}

fn agent() -> ureq::Agent {
    ureq::Agent::config_builder()
        .http_status_as_error(false)
        .build()
        .into()
}

fn finish(resp: Result<ureq::http::Response<ureq::Body>, ureq::Error>) -> Reply {
    let mut resp = resp.expect("request completes");
    let content_type = resp
        .headers()
        .get("content-type")
        .and_then(|v| v.to_str().ok())
        .unwrap_or("")
        .to_owned();
    Reply {
        status: resp.status().as_u16(),
        content_type,
        body: resp.body_mut().read_to_string().unwrap_or_default(),
    }
}

pub fn get(url: &str, accept: &str) -> Reply {
    finish(agent().get(url).header("Accept", accept).call())
}

pub fn send(method: &str, url: &str, content_type: &str, body: &str) -> Reply {
    let agent = agent();
    let resp = match method {
        "POST" => agent.post(url).header("Content-Type", content_type).send(body),
        "PUT" => agent.put(url).header("Content-Type", content_type).send(body),
        "DELETE" => agent.delete(url).call(),
        other => panic!("unsupported method {other}"),
    };
    finish(resp)
}

/// IRIs bound to `?s` in a query response.
pub fn subjects(reply: &Reply) -> Vec<String> {
    reply.json()["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["s"]["value"].as_str().unwrap().to_owned())
        .collect()
}

/// Runs the CLI binary; returns (exit code, stdout, stderr).
pub fn cli(data_dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(BIN)
        .arg("--data-dir")
        .arg(data_dir)
        .args(args)
        .env_remove("SSNFORGE_BASE_IRI")
        .output()
        .expect("cli runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

/// Current bytes of both store files (None when absent).
pub fn store_bytes(dir: &Path) -> (Option<Vec<u8>>, Option<Vec<u8>>) {
    (
        std::fs::read(dir.join("store.nq")).ok(),
        std::fs::read(dir.join("index.json")).ok(),
    )
}
