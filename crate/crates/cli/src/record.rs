//! Output records and the three output formats.

use std::io::{self, Write};

use rug::Float;
use serde_json::Value;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    /// A decimal already rounded to the digits worth printing.
    Num(String),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(s) | Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            // arbitrary_precision keeps every printed digit.
            Cell::Num(s) => serde_json::from_str(s).unwrap_or_else(|_| Value::String(s.clone())),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            Cell::Int(_) => "int",
            Cell::Num(_) => "num",
            Cell::Text(_) => "text",
            Cell::Bool(_) => "bool",
            Cell::Empty => "empty",
        }
    }

    fn from_tagged(tag: &str, s: &str) -> Option<Cell> {
        Some(match tag {
            "int" => Cell::Int(s.parse().ok()?),
            "num" => Cell::Num(s.to_string()),
            "text" => Cell::Text(s.to_string()),
            "bool" => Cell::Bool(s.parse().ok()?),
            "empty" => Cell::Empty,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Record {
    pub fields: Vec<(String, Cell)>,
}

impl Record {
    pub fn push(&mut self, name: &str, cell: Cell) -> &mut Self {
        self.fields.push((name.to_string(), cell));
        self
    }

    pub fn set(&mut self, name: &str, cell: Cell) {
        match self.fields.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = cell,
            None => self.fields.push((name.to_string(), cell)),
        }
    }

    pub fn get(&self, name: &str) -> Option<&Cell> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, c)| c)
    }

    /// Cache form: `[[name, tag, text], …]`.
    pub fn to_cache_json(&self) -> Value {
        Value::Array(
            self.fields
                .iter()
                .map(|(n, c)| Value::Array(vec![n.clone().into(), c.tag().into(), c.text().into()]))
                .collect(),
        )
    }

    pub fn from_cache_json(v: &Value) -> Option<Record> {
        let mut rec = Record::default();
        for f in v.as_array()? {
            let f = f.as_array()?;
            let [n, t, s] = f.as_slice() else { return None };
            rec.push(n.as_str()?, Cell::from_tagged(t.as_str()?, s.as_str()?)?);
        }
        Some(rec)
    }
}

/// `x` rounded to `digits` significant decimal digits. Plain notation for
/// moderate exponents, scientific otherwise.
pub fn fmt_sig(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let n = digits.max(1) as usize;
    let (neg, ds, exp) = x.to_sign_string_exp(10, Some(n));
    let exp = exp.unwrap_or(0) as i64;
    let sign = if neg { "-" } else { "" };
    let body = if (1..=21).contains(&exp) {
        let e = exp as usize;
        if e >= ds.len() {
            format!("{ds}{}", "0".repeat(e - ds.len()))
        } else {
            format!("{}.{}", &ds[..e], &ds[e..])
        }
    } else if (-5..=0).contains(&exp) {
        format!("0.{}{ds}", "0".repeat((-exp) as usize))
    } else if ds.len() == 1 {
        format!("{ds}e{}", exp - 1)
    } else {
        format!("{}.{}e{}", &ds[..1], &ds[1..], exp - 1)
    };
    format!("{sign}{body}")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

/// Receives records as they are produced. CSV is streamed; JSON and the
/// aligned text table are written at [`Sink::finish`].
pub struct Sink<W: Write> {
    format: Format,
    out: W,
    header: Option<Vec<String>>,
    held: Vec<Record>,
}

impl<W: Write> Sink<W> {
    pub fn new(format: Format, out: W) -> Self {
        Sink { format, out, header: None, held: Vec::new() }
    }

    pub fn emit(&mut self, rec: &Record) -> io::Result<()> {
        if self.format != Format::Csv {
            self.held.push(rec.clone());
            return Ok(());
        }
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        if self.header.is_none() {
            let names: Vec<String> = rec.fields.iter().map(|(n, _)| n.clone()).collect();
            w.write_record(&names)?;
            self.header = Some(names);
        }
        w.write_record(rec.fields.iter().map(|(_, c)| c.text()))?;
        let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
        self.out.write_all(&bytes)?;
        self.out.flush()
    }

    pub fn finish(mut self) -> io::Result<()> {
        match self.format {
            Format::Csv => Ok(()),
            Format::Json => {
                let arr: Vec<Value> = self
                    .held
                    .iter()
                    .map(|r| Value::Object(r.fields.iter().map(|(n, c)| (n.clone(), c.to_json())).collect()))
                    .collect();
                serde_json::to_writer_pretty(&mut self.out, &arr)?;
                writeln!(self.out)
            }
            Format::Text => {
                let Some(first) = self.held.first() else { return Ok(()) };
                let names: Vec<&str> = first.fields.iter().map(|(n, _)| n.as_str()).collect();
                let rows: Vec<Vec<String>> =
                    self.held.iter().map(|r| r.fields.iter().map(|(_, c)| c.text()).collect()).collect();
                let mut width: Vec<usize> = names.iter().map(|n| n.len()).collect();
                for row in &rows {
                    for (w, c) in width.iter_mut().zip(row) {
                        *w = (*w).max(c.len());
                    }
                }
                let line = |cells: Vec<&str>| {
                    let padded: Vec<String> = cells.iter().zip(&width).map(|(c, w)| format!("{c:<w$}")).collect();
                    padded.join("  ").trim_end().to_string()
                };
                writeln!(self.out, "{}", line(names.clone()))?;
                for row in &rows {
                    writeln!(self.out, "{}", line(row.iter().map(String::as_str).collect()))?;
                }
                Ok(())
            }
        }
    }
}
