//! Content-addressed result cache with atomic writes.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::commands::{self, Output, Source};
use crate::{Command, Global};

const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

fn cache_key(source: &Source, global: &Global, command: &Command) -> String {
    let mut h = Sha256::new();
    h.update(TOOL_VERSION);
    h.update([0]);
    h.update(source.identity());
    h.update([0]);
    let config = commands::resolved_config(source, global);
    h.update(format!(
        "{config:?}|{:?}|{}|{command:?}",
        global.format, global.sequential
    ));
    h.finalize().iter().fold(String::new(), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

fn load(path: &Path, key: &str) -> Option<Output> {
    let v: Value = serde_json::from_str(&fs::read_to_string(path).ok()?).ok()?;
    if v["key"] != key || v["tool_version"] != TOOL_VERSION {
        return None;
    }
    let files = v["files"]
        .as_object()?
        .iter()
        .map(|(k, body)| Some((k.clone(), body.as_str()?.to_string())))
        .collect::<Option<_>>()?;
    Some(Output {
        stdout: v["value"].as_str()?.to_string(),
        files,
        code: u8::try_from(v["code"].as_u64()?).ok()?,
    })
}

fn store(dir: &Path, key: &str, out: &Output) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let entry = json!({
        "key": key,
        "tool_version": TOOL_VERSION,
        "value": out.stdout,
        "files": out.files,
        "code": out.code,
    });
    let tmp = dir.join(format!(".{key}.{}.tmp", std::process::id()));
    fs::write(&tmp, serde_json::to_string(&entry)?)?;
    fs::rename(&tmp, dir.join(format!("{key}.json")))
}

pub fn run_cached(global: &Global, command: &Command) -> Result<Output, String> {
    let source = Source::resolve(commands::pres_arg(command))?;
    let Some(dir) = &global.cache_dir else {
        return commands::run(&source, global, command);
    };
    let key = cache_key(&source, global, command);
    if let Some(hit) = load(&dir.join(format!("{key}.json")), &key) {
        return Ok(hit);
    }
    let out = commands::run(&source, global, command)?;
    // A failed cache write never changes the result.
    if let Err(e) = store(dir, &key, &out) {
        eprintln!("warning: cache write failed: {e}");
    }
    Ok(out)
}
