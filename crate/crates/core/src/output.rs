//! Machine-readable records for the command-line tool.
//!
//! Numbers are always decimal strings. A printed value carries an `err` that
//! covers both the enclosure radius and the rounding of the printed digits.

use crate::error::{Error, Result};
use crate::moments::Sqrt2Rational;
use crate::numerics::decimal::{digits_for_bits, format_mag, format_rational};
use crate::numerics::{Ball, CBall, Mag};
use num_rational::BigRational;
use num_traits::Signed;
use serde_json::{json, Map, Value};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// Decimal midpoint at `bits` bits and an error bound including rounding.
pub fn ball_strings(b: &Ball, bits: u32) -> (String, String) {
    let digits = digits_for_bits(bits);
    let mid = b.mid_rational();
    let s = format_rational(&mid, digits);
    let printed = crate::numerics::decimal::parse_rational(&s).unwrap_or_else(|_| mid.clone());
    let round = (&printed - &mid).abs();
    let err = b.rad().add(&mag_of(&round));
    (s, format_mag(&err))
}

fn mag_of(q: &BigRational) -> Mag {
    Ball::from_rational(q, 64).abs_upper()
}

pub fn q_string(q: &BigRational) -> String {
    if q.denom() == &1.into() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// One output row: ordered string fields.
#[derive(Debug, Clone, Default)]
pub struct Row(pub Vec<(String, String)>);

impl Row {
    pub fn new() -> Self {
        Row(Vec::new())
    }

    pub fn set(mut self, k: &str, v: impl ToString) -> Self {
        self.0.push((k.to_string(), v.to_string()));
        self
    }

    pub fn real(self, k: &str, b: &Ball, bits: u32) -> Self {
        let (v, e) = ball_strings(b, bits);
        self.set(k, v).set(&format!("{k}_err"), e)
    }

    /// Real part only when the imaginary part is exactly zero.
    pub fn complex(self, k: &str, z: &CBall, bits: u32) -> Self {
        if z.is_real() {
            return self.real(k, &z.re, bits);
        }
        let (re, e1) = ball_strings(&z.re, bits);
        let (im, e2) = ball_strings(&z.im, bits);
        self.set(&format!("{k}_re"), re)
            .set(&format!("{k}_im"), im)
            .set(&format!("{k}_err"), format!("{e1}/{e2}"))
    }

    pub fn exact(self, v: &Sqrt2Rational) -> Self {
        self.set("exact_a", q_string(&v.a)).set("exact_b", q_string(&v.b))
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        for (k, v) in &self.0 {
            m.insert(k.clone(), Value::String(v.clone()));
        }
        Value::Object(m)
    }
}

/// A command's output.
#[derive(Debug, Clone)]
pub struct Record {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub precision_bits: u32,
    pub rows: Vec<Row>,
}

impl Record {
    pub fn new(command: &str, precision_bits: u32) -> Self {
        Record {
            command: command.to_string(),
            params: Vec::new(),
            precision_bits,
            rows: Vec::new(),
        }
    }

    pub fn param(mut self, k: &str, v: impl ToString) -> Self {
        self.params.push((k.to_string(), v.to_string()));
        self
    }

    pub fn row(mut self, r: Row) -> Self {
        self.rows.push(r);
        self
    }

    pub fn to_json(&self) -> Value {
        let mut params = Map::new();
        for (k, v) in &self.params {
            params.insert(k.clone(), Value::String(v.clone()));
        }
        json!({
            "command": self.command,
            "params": params,
            "precision_bits": self.precision_bits,
            "results": self.rows.iter().map(Row::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn write(&self, fmt: Format, out: &mut dyn Write) -> Result<()> {
        match fmt {
            Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&self.to_json()).map_err(io)?)?,
            Format::Csv => {
                let mut keys: Vec<String> = self.params.iter().map(|(k, _)| k.clone()).collect();
                for r in &self.rows {
                    for (k, _) in &r.0 {
                        if !keys.contains(k) {
                            keys.push(k.clone());
                        }
                    }
                }
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&keys).map_err(io)?;
                for r in &self.rows {
                    let rec: Vec<&str> = keys
                        .iter()
                        .map(|k| {
                            self.params
                                .iter()
                                .chain(&r.0)
                                .find(|(kk, _)| kk == k)
                                .map_or("", |(_, v)| v.as_str())
                        })
                        .collect();
                    w.write_record(&rec).map_err(io)?;
                }
                w.flush()?;
            }
            Format::Text => {
                let ps: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                writeln!(out, "# {} {} (prec {} bits)", self.command, ps.join(" "), self.precision_bits)?;
                for r in &self.rows {
                    let fs: Vec<String> = r.0.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    writeln!(out, "{}", fs.join("  "))?;
                }
            }
        }
        Ok(())
    }
}

fn io(e: impl std::fmt::Display) -> Error {
    Error::Io(e.to_string())
}

/// Error object in the requested format.
pub fn write_error(e: &Error, fmt: Format, out: &mut dyn Write) -> std::io::Result<()> {
    match fmt {
        Format::Json => {
            let v = json!({"error": {"kind": e.kind(), "message": e.to_string(), "exit_code": e.exit_code()}});
            writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap_or_default())
        }
        Format::Csv => {
            writeln!(out, "error_kind,message,exit_code")?;
            writeln!(out, "{},\"{}\",{}", e.kind(), e.to_string().replace('"', "\"\""), e.exit_code())
        }
        Format::Text => writeln!(out, "error [{}]: {}", e.kind(), e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::decimal::parse_decimal;
    use crate::numerics::elementary as el;

    #[test]
    fn printed_value_round_trips_within_err() {
        let pi = el::pi(256);
        let (s, e) = ball_strings(&pi, 128);
        let back = parse_decimal(&s, 256).unwrap();
        let err = parse_decimal(&e, 64).unwrap();
        assert!((&back - &pi).abs_upper().log2() <= err.to_f64().log2());
        assert!(s.starts_with("3.14159265358979323846"));
        assert!(err.to_f64() < 1e-38);
    }

    #[test]
    fn formats() {
        let rec = Record::new("m0", 64)
            .param("N", 4)
            .row(Row::new().real("value", &Ball::frac(1, 4, 64), 64).exact(&Sqrt2Rational::rational(BigRational::new(1.into(), 4.into()))));
        let mut buf = Vec::new();
        rec.write(Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["results"][0]["value"], "0.25");
        assert_eq!(v["results"][0]["exact_a"], "1/4");
        assert_eq!(v["params"]["N"], "4");
        let mut buf = Vec::new();
        rec.write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "N,value,value_err,exact_a,exact_b");
        assert!(text.lines().nth(1).unwrap().starts_with("4,0.25,"));
        let mut buf = Vec::new();
        write_error(&Error::Domain("x".into()), Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["error"]["exit_code"], 3);
    }
}
