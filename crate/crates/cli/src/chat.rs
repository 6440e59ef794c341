//! Terminal chat loop shared by the in-process and HTTP backends.

use crate::{data_err, Failure};
use serde_json::{json, Value};
use shelftalk_core::orchestrator::{Assistant, AssistantError, DataPaths};
use std::io::{BufRead, Write};

const HELP: &str = "commands: /scan CODE, /confirm, /cancel, /help, /quit; anything else is sent to the assistant";

trait Backend {
    fn scan(&mut self, code: &str) -> Result<Value, String>;
    fn chat(&mut self, text: &str) -> Result<Value, String>;
    fn confirm(&mut self) -> Result<Value, String>;
    fn cancel(&mut self) -> Result<Value, String>;
}

struct Local {
    assistant: Assistant,
    session: String,
}

fn to_value<T: serde::Serialize>(r: Result<T, AssistantError>) -> Result<Value, String> {
    r.map(|v| serde_json::to_value(v).expect("reply serializes"))
        .map_err(|e| e.to_string())
}

impl Backend for Local {
    fn scan(&mut self, code: &str) -> Result<Value, String> {
        to_value(self.assistant.scan_barcode(&self.session, code))
    }

    fn chat(&mut self, text: &str) -> Result<Value, String> {
        to_value(self.assistant.handle_message(&self.session, text))
    }

    fn confirm(&mut self) -> Result<Value, String> {
        to_value(self.assistant.confirm_purchase(&self.session))
    }

    fn cancel(&mut self) -> Result<Value, String> {
        to_value(
            self.assistant
                .cancel_purchase(&self.session)
                .map(|()| json!({"state": "idle"})),
        )
    }
}

struct Remote {
    client: reqwest::blocking::Client,
    base: String,
    session: String,
}

impl Remote {
    fn connect(base: &str) -> Result<Self, String> {
        let client = reqwest::blocking::Client::new();
        let base = base.trim_end_matches('/').to_string();
        let created = post(&client, &format!("{base}/api/session"), &json!({}))?;
        let session = created["session_id"]
            .as_str()
            .ok_or("server did not return a session id")?
            .to_string();
        Ok(Self { client, base, session })
    }

    fn call(&self, path: &str, mut body: Value) -> Result<Value, String> {
        body["session_id"] = Value::String(self.session.clone());
        post(&self.client, &format!("{}{path}", self.base), &body)
    }
}

fn post(client: &reqwest::blocking::Client, url: &str, body: &Value) -> Result<Value, String> {
    let resp = client
        .post(url)
        .json(body)
        .send()
        .map_err(|e| format!("request failed: {e}"))?;
    let ok = resp.status().is_success();
    let value: Value = resp.json().map_err(|e| format!("bad response: {e}"))?;
    if ok {
        Ok(value)
    } else {
        Err(value["message"].as_str().unwrap_or("request failed").to_string())
    }
}

impl Backend for Remote {
    fn scan(&mut self, code: &str) -> Result<Value, String> {
        self.call("/api/scan", json!({ "barcode": code }))
    }

    fn chat(&mut self, text: &str) -> Result<Value, String> {
        self.call("/api/chat", json!({ "text": text }))
    }

    fn confirm(&mut self) -> Result<Value, String> {
        self.call("/api/purchase/confirm", json!({}))
    }

    fn cancel(&mut self) -> Result<Value, String> {
        self.call("/api/purchase/cancel", json!({}))
    }
}

pub fn run_local(paths: &DataPaths, input: impl BufRead, output: impl Write) -> Result<(), Failure> {
    let assistant = Assistant::load(paths).map_err(data_err)?;
    let session = assistant.create_session(Vec::new());
    run(&mut Local { assistant, session }, input, output)
}

pub fn run_remote(base: &str, input: impl BufRead, output: impl Write) -> Result<(), Failure> {
    let mut remote =
        Remote::connect(base).map_err(|e| Failure::Data(format!("cannot start a session at {base}: {e}")))?;
    run(&mut remote, input, output)
}

fn run(backend: &mut dyn Backend, input: impl BufRead, mut out: impl Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| data_err(format!("terminal I/O failed: {e}"));
    writeln!(out, "{HELP}").map_err(io)?;
    for line in input.lines() {
        let line = line.map_err(io)?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let result = match line.split_once(' ').map_or((line, ""), |(c, rest)| (c, rest.trim())) {
            ("/quit" | "/exit", _) => break,
            ("/help", _) => {
                writeln!(out, "{HELP}").map_err(io)?;
                continue;
            }
            ("/scan", "") => Err("usage: /scan CODE".to_string()),
            ("/scan", code) => backend.scan(code),
            ("/confirm", _) => backend.confirm(),
            ("/cancel", _) => backend.cancel(),
            (cmd, _) if cmd.starts_with('/') => Err(format!("unknown command {cmd}")),
            _ => backend.chat(line),
        };
        match result {
            Ok(v) => writeln!(out, "{}", render(&v)).map_err(io)?,
            Err(e) => writeln!(out, "error: {e}").map_err(io)?,
        }
    }
    Ok(())
}

/// Human-readable rendering of any reply the API produces.
fn render(v: &Value) -> String {
    let mut lines = Vec::new();
    if let Some(reply) = v["reply"].as_str() {
        match v["intent"].as_str() {
            Some(intent) => lines.push(format!("[{intent}] {reply}")),
            None => lines.push(reply.to_string()),
        }
    }
    let payload = &v["payload"];
    match payload["kind"].as_str() {
        Some("spec_answer") => lines.push(format!(
            "  {}: {} (score {:.3})",
            payload["spec"]["name"].as_str().unwrap_or("?"),
            payload["spec"]["value"].as_str().unwrap_or("?"),
            payload["score"].as_f64().unwrap_or(0.0)
        )),
        Some("recommendations") => {
            for item in payload["items"].as_array().into_iter().flatten() {
                lines.push(format!(
                    "  - {} {} ({:.2})",
                    item["product"]["name"].as_str().unwrap_or("?"),
                    item["product"]["price_display"].as_str().unwrap_or(""),
                    item["score"].as_f64().unwrap_or(0.0)
                ));
            }
        }
        Some("purchase_quote") => lines.push("  type /confirm to buy or /cancel to stop".to_string()),
        _ => {}
    }
    if v.get("timestamp").is_some() {
        lines.push(format!(
            "Purchased {} for ${:.2}.",
            v["product_name"].as_str().unwrap_or("?"),
            v["final_price_cents"].as_u64().unwrap_or(0) as f64 / 100.0
        ));
    }
    if let Some(state) = v["state"].as_str() {
        lines.push(format!("Purchase state: {state}"));
    }
    if lines.is_empty() {
        lines.push(v.to_string());
    }
    lines.join("\n")
}
