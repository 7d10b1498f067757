#![allow(dead_code)]

use std::io::{BufRead, BufReader, Read, Write};
use std::net::{SocketAddr, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::sync::mpsc;
use std::sync::{Arc, Mutex};
use std::time::Duration;

pub const BIN: &str = env!("CARGO_BIN_EXE_csre4soc");

pub fn example_catalog_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data/example_catalog.json")
}

pub fn csre4soc(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("CSRE4SOC_CATALOG")
        .env_remove("CSRE4SOC_STORE")
        .env_remove("CSRE4SOC_LISTEN")
        .env("RUST_LOG", "info")
        .output()
        .unwrap()
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

pub fn answers(company: &str, ts: &str, ids: &[&str]) -> String {
    serde_json::json!({"company_id": company, "timestamp": ts, "implemented": ids}).to_string()
}

/// A running `csre4soc serve`, killed on drop.
pub struct Server {
    pub child: Child,
    pub addr: SocketAddr,
    pub stderr: Arc<Mutex<String>>,
}

impl Server {
    pub fn start(command: &mut Command) -> Result<Server, (Option<i32>, String)> {
        let mut child = command
            .stderr(Stdio::piped())
            .stdout(Stdio::null())
            .env("RUST_LOG", "info")
            .spawn()
            .unwrap();
        let stderr = child.stderr.take().unwrap();
        let log = Arc::new(Mutex::new(String::new()));
        let (tx, rx) = mpsc::channel();
        let sink = log.clone();
        std::thread::spawn(move || {
            for line in BufReader::new(stderr).lines().map_while(Result::ok) {
                if let Some(rest) = line.split("listening on ").nth(1) {
                    let _ = tx.send(rest.trim().parse::<SocketAddr>().unwrap());
                }
                sink.lock().unwrap().push_str(&line);
                sink.lock().unwrap().push('\n');
            }
        });
        match rx.recv_timeout(Duration::from_secs(20)) {
            Ok(addr) => Ok(Server {
                child,
                addr,
                stderr: log,
            }),
            Err(_) => {
                let status = child.wait().unwrap();
                std::thread::sleep(Duration::from_millis(50));
                let text = log.lock().unwrap().clone();
                Err((status.code(), text))
            }
        }
    }

    pub fn serve(catalog: &Path, store: &Path) -> Server {
        Server::start(Command::new(BIN).args([
            "serve",
            "--catalog",
            catalog.to_str().unwrap(),
            "--store",
            store.to_str().unwrap(),
            "--listen",
            "127.0.0.1:0",
        ]))
        .unwrap_or_else(|(code, log)| panic!("server failed ({code:?}): {log}"))
    }

    pub fn request(&self, method: &str, path: &str, body: Option<&str>) -> (u16, String) {
        http(self.addr, method, path, body)
    }

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

/// Minimal HTTP/1.1 client: one request per connection.
pub fn http(addr: SocketAddr, method: &str, path: &str, body: Option<&str>) -> (u16, String) {
    let mut stream = TcpStream::connect(addr).unwrap();
    stream.set_read_timeout(Some(Duration::from_secs(10))).unwrap();
    let body = body.unwrap_or("");
    write!(
        stream,
        "{method} {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\nContent-Type: application/json\r\nContent-Length: {}\r\n\r\n{body}",
        body.len()
    )
    .unwrap();
    let mut raw = String::new();
    stream.read_to_string(&mut raw).unwrap();
    let (head, payload) = raw.split_once("\r\n\r\n").unwrap();
    let status = head.split_whitespace().nth(1).unwrap().parse().unwrap();
    let chunked = head.to_ascii_lowercase().contains("transfer-encoding: chunked");
    (status, if chunked { dechunk(payload) } else { payload.to_string() })
}

fn dechunk(mut s: &str) -> String {
    let mut out = String::new();
    loop {
        let (size, rest) = s.split_once("\r\n").unwrap();
        let n = usize::from_str_radix(size.trim(), 16).unwrap();
        if n == 0 {
            return out;
        }
        out.push_str(&rest[..n]);
        s = &rest[n + 2..];
    }
}
