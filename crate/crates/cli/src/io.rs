//! Input decoding, provenance records and output.

use std::cell::RefCell;
use std::io::{Read, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use bellcut::inequalities::LinearInequality;
use bellcut::mappings::AnyVector;
use bellcut::{Error, Result, Scalar};
use serde_json::{json, Map, Value};

/// Settings shared by every subcommand.
pub struct Context {
    pub argv: Vec<String>,
    pub timestamp: bool,
    pub force: bool,
    pub pretty: bool,
    notes: RefCell<Map<String, Value>>,
    out: RefCell<Box<dyn Write>>,
}

impl Context {
    pub fn new(argv: Vec<String>, timestamp: bool, force: bool, pretty: bool, out: Box<dyn Write>) -> Self {
        Context { argv, timestamp, force, pretty, notes: RefCell::new(Map::new()), out: RefCell::new(out) }
    }

    /// Writes one line and flushes, so streams appear as they are produced.
    pub fn line(&self, s: &str) -> Result<()> {
        let mut out = self.out.borrow_mut();
        match writeln!(out, "{s}").and_then(|_| out.flush()) {
            Ok(()) => Ok(()),
            // The reader went away, as with `| head`; nothing is left to do.
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
            Err(e) => Err(Error::Invalid(format!("cannot write output: {e}"))),
        }
    }

    /// Adds a key to every provenance record emitted afterwards.
    pub fn note(&self, key: &str, value: Value) {
        self.notes.borrow_mut().insert(key.to_string(), value);
    }

    /// Records a guard that `--force` overrode.
    pub fn forced(&self, reason: String) {
        self.note("forced", Value::String(reason));
    }

    pub fn provenance(&self, command: &str) -> Value {
        let mut p = Map::new();
        p.insert("tool".into(), json!("bellcut"));
        p.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        p.insert("command".into(), json!(command));
        p.insert("args".into(), json!(self.argv));
        if self.timestamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            p.insert("timestamp".into(), json!(secs));
        }
        for (k, v) in self.notes.borrow().iter() {
            p.insert(k.clone(), v.clone());
        }
        Value::Object(p)
    }

    /// Prints one result object with its provenance attached.
    pub fn emit(&self, command: &str, mut value: Value) -> Result<()> {
        if let Value::Object(m) = &mut value {
            m.insert("provenance".into(), self.provenance(command));
        }
        self.line(&value.to_string())
    }

    /// Prints one stream item without provenance; the header carries it.
    pub fn item(&self, value: &Value) -> Result<()> {
        self.line(&value.to_string())
    }

    /// Prints the header line of a JSON-lines stream.
    pub fn emit_header(&self, command: &str, stream: &str, extra: Value) -> Result<()> {
        let mut m = match extra {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        m.insert("stream".into(), json!(stream));
        m.insert("provenance".into(), self.provenance(command));
        self.line(&Value::Object(m).to_string())
    }

    /// Prints an inequality, in bracket layout under `--pretty`.
    pub fn emit_inequality(&self, command: &str, q: &LinearInequality, extra: Value) -> Result<()> {
        if self.pretty {
            return self.line(q.pretty().trim_end());
        }
        let mut v = q.to_json();
        if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
            m.extend(e);
        }
        self.emit(command, v)
    }
}

/// Reads a file, or standard input for `None` and `-`.
pub fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) if p != Path::new("-") => {
            std::fs::read_to_string(p).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Error::Invalid(format!("cannot read standard input: {e}")))?;
            Ok(s)
        }
    }
}

/// JSON values from a single document, an array, or a JSON-lines stream.
/// Stream header lines are skipped.
pub fn json_values(text: &str) -> Result<Vec<Value>> {
    let mut out = Vec::new();
    for v in serde_json::Deserializer::from_str(text).into_iter::<Value>() {
        let v = v.map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
        match v {
            Value::Array(items) => out.extend(items),
            Value::Object(ref m) if m.contains_key("stream") => {}
            other => out.push(other),
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("no JSON input".into()));
    }
    Ok(out)
}

pub fn inequalities(text: &str) -> Result<Vec<LinearInequality>> {
    json_values(text)?
        .iter()
        .map(|v| match v.get("representative") {
            Some(r) => LinearInequality::from_json(r),
            None => LinearInequality::from_json(v),
        })
        .collect()
}

pub fn vectors<T: Scalar>(text: &str) -> Result<Vec<AnyVector<T>>> {
    json_values(text)?.iter().map(AnyVector::from_json).collect()
}

/// Parses `m,n`.
pub fn pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected m,n, got {s:?}"))?;
    let num = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((num(a)?, num(b)?))
}
