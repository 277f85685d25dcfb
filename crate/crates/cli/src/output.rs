//! JSON and CSV writers. Every float is printed as `%.17g`.

use std::io::{self, Write};
use std::path::Path;

use qwalk::text::fmt_g17;
use qwalk::CMatrix;
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};
use serde_json::{json, Value};

use crate::CliError;

struct G17;

impl Formatter for G17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_g17(value).as_bytes())
    }
}

/// One-line JSON with a trailing newline.
pub fn to_json(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = Serializer::with_formatter(&mut buf, G17);
    value
        .serialize(&mut ser)
        .expect("serializing a Value into memory");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// `{"re": [[…]], "im": [[…]]}`
pub fn matrix_json(m: &CMatrix) -> Value {
    let part = |f: fn(&num_complex::Complex64) -> f64| -> Vec<Vec<f64>> {
        (0..m.rows())
            .map(|i| m.row(i).iter().map(f).collect())
            .collect()
    };
    json!({ "re": part(|z| z.re), "im": part(|z| z.im) })
}

/// Column names `prefix_i_j_re, prefix_i_j_im` in row-major order.
pub fn matrix_columns(prefix: &str, n: usize) -> Vec<String> {
    let mut cols = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for j in 0..n {
            cols.push(format!("{prefix}_{i}_{j}_re"));
            cols.push(format!("{prefix}_{i}_{j}_im"));
        }
    }
    cols
}

pub fn matrix_cells(m: &CMatrix) -> Vec<String> {
    m.as_slice()
        .iter()
        .flat_map(|z| [fmt_g17(z.re), fmt_g17(z.im)])
        .collect()
}

/// Run configuration as ordered key/value pairs.
pub type Config = Vec<(&'static str, Value)>;

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if !(n.is_i64() || n.is_u64()) => fmt_g17(x),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// `# qwalk <command> key=value …`; values containing spaces are quoted.
pub fn config_comment(command: &str, fields: &[(&'static str, Value)]) -> String {
    let mut line = format!("# qwalk {command}");
    for (k, v) in fields {
        let v = plain(v);
        if v.contains(char::is_whitespace) || v.is_empty() {
            line.push_str(&format!(" {k}={v:?}"));
        } else {
            line.push_str(&format!(" {k}={v}"));
        }
    }
    line
}

pub fn config_json(fields: &[(&'static str, Value)]) -> Value {
    Value::Object(
        fields
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
    )
}

/// CSV with a config comment line, a header and data rows.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(command: &str, fields: &[(&'static str, Value)], header: &[String]) -> Self {
        let mut text = config_comment(command, fields);
        text.push('\n');
        text.push_str(&header.join(","));
        text.push('\n');
        Self { text }
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: &[S]) {
        let cells: Vec<&str> = cells.iter().map(AsRef::as_ref).collect();
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}
