use std::fmt::Write as _;

use clap::ValueEnum;
use fracdisc::Complex64;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Human-readable report
    Report,
    /// Comma-separated table
    Csv,
    /// Structured JSON document
    Json,
}

/// Everything a command produces; the caller picks one rendering.
#[derive(Debug, Clone)]
pub struct Output {
    pub report: String,
    pub csv: String,
    pub json: Value,
    pub exit: i32,
    pub warnings: Vec<String>,
}

impl Output {
    pub fn new(report: Report, csv: Csv, json: Value) -> Self {
        Self {
            report: report.finish(),
            csv: csv.finish(),
            json,
            exit: 0,
            warnings: Vec::new(),
        }
    }

    pub fn with_exit(mut self, code: i32) -> Self {
        self.exit = code;
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Report => self.report.clone(),
            Format::Csv => self.csv.clone(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
                s.push('\n');
                s
            }
        }
    }
}

/// Real numbers with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn cx(z: Complex64) -> String {
    format!("({}, {})", num(z.re), num(z.im))
}

pub fn cx_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

#[derive(Debug, Default)]
pub struct Report {
    text: String,
}

impl Report {
    pub fn new(title: &str) -> Self {
        let mut r = Self::default();
        r.text.push_str(title);
        r.text.push('\n');
        r
    }

    pub fn line(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let _ = writeln!(self.text, "  {key}: {value}");
        self
    }

    pub fn real(&mut self, key: &str, value: f64) -> &mut Self {
        self.line(key, num(value))
    }

    pub fn complex(&mut self, key: &str, value: Complex64) -> &mut Self {
        self.line(key, cx(value))
    }

    pub fn section(&mut self, title: &str) -> &mut Self {
        let _ = writeln!(self.text, "{title}");
        self
    }

    pub fn raw(&mut self, text: &str) -> &mut Self {
        self.text.push_str(text);
        self
    }

    pub fn finish(self) -> String {
        self.text
    }
}

#[derive(Debug)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: header.join(",") + "\n",
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.text.push_str(&cells.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// CSV cells for a complex value: real part, imaginary part.
pub fn cx_cells(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}
