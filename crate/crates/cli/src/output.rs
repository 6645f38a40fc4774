// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Tabular output in CSV or JSON.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use entwalk::metrics::LogBase;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            // 17 significant digits round-trip every f64.
            Cell::Num(x) => format!("{x:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// In JSON, gather rows sharing a `step` into one object of column arrays.
    pub group_by_step: bool,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
            group_by_step: false,
        }
    }

    pub fn grouped(mut self) -> Self {
        self.group_by_step = true;
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json_rows(&self) -> Vec<Value> {
        let step_col = self.columns.iter().position(|c| *c == "step");
        match step_col {
            Some(s) if self.group_by_step => {
                let mut groups: Vec<(Cell, Map<String, Value>)> = Vec::new();
                for row in &self.rows {
                    if groups.last().map(|g| &g.0) != Some(&row[s]) {
                        let mut m = Map::new();
                        m.insert("step".into(), row[s].json());
                        for (i, c) in self.columns.iter().enumerate() {
                            if i != s {
                                m.insert((*c).into(), Value::Array(Vec::new()));
                            }
                        }
                        groups.push((row[s].clone(), m));
                    }
                    let m = &mut groups.last_mut().expect("group just pushed").1;
                    for (i, c) in self.columns.iter().enumerate() {
                        if i != s {
                            if let Some(Value::Array(a)) = m.get_mut(*c) {
                                a.push(row[i].json());
                            }
                        }
                    }
                }
                groups.into_iter().map(|(_, m)| Value::Object(m)).collect()
            }
            _ => self
                .rows
                .iter()
                .map(|row| {
                    let m: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| ((*c).to_string(), v.json()))
                        .collect();
                    Value::Object(m)
                })
                .collect(),
        }
    }
}

/// Writes tables into one directory with shared header metadata.
#[derive(Debug, Clone)]
pub struct Emitter {
    pub dir: PathBuf,
    pub format: Format,
    pub log_base: LogBase,
    pub timestamp: bool,
    /// Extra `key=value` metadata written with every table.
    pub metadata: Vec<(String, String)>,
}

impl Emitter {
    fn header(&self) -> Vec<(String, String)> {
        let mut h = Vec::new();
        if self.timestamp {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            h.push(("generated_at_unix".to_string(), secs.to_string()));
        }
        h.push(("entropy_unit".to_string(), self.log_base.unit().to_string()));
        h.extend(self.metadata.iter().cloned());
        h
    }

    /// Writes `<dir>/<stem>.<ext>` and returns its path.
    pub fn write(&self, stem: &str, table: &Table) -> io::Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let path = self.dir.join(format!("{stem}.{}", self.format.extension()));
        let header = self.header();
        let body = match self.format {
            Format::Csv => {
                let comments: Vec<String> = header.iter().map(|(k, v)| format!("{k}={v}")).collect();
                table.to_csv(&comments)
            }
            Format::Json => {
                let mut doc = Map::new();
                for (k, v) in header {
                    doc.insert(k, Value::from(v));
                }
                doc.insert(
                    "columns".into(),
                    Value::Array(table.columns.iter().map(|c| Value::from(*c)).collect()),
                );
                doc.insert("rows".into(), Value::Array(table.json_rows()));
                let mut s = serde_json::to_string_pretty(&Value::Object(doc)).map_err(io::Error::other)?;
                s.push('\n');
                s
            }
        };
        write_atomically(&path, body.as_bytes())?;
        Ok(path)
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["step", "position", "probability"]).grouped();
        t.push(vec![0usize.into(), 0i64.into(), 1.0.into()]);
        t.push(vec![1usize.into(), (-1i64).into(), 0.5.into()]);
        t.push(vec![1usize.into(), 1i64.into(), 0.5.into()]);
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv(&["entropy_unit=nats".into()]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# entropy_unit=nats");
        assert_eq!(lines[1], "step,position,probability");
        assert_eq!(lines[2], "0,0,1.0000000000000000e0");
        assert_eq!(lines[4], "1,1,5.0000000000000000e-1");
    }

    #[test]
    fn json_groups_by_step() {
        let rows = sample().json_rows();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1]["position"], serde_json::json!([-1, 1]));
        assert_eq!(rows[1]["probability"], serde_json::json!([0.5, 0.5]));
    }

    #[test]
    fn seventeen_digits_round_trip() {
        let x = 0.1f64 + 0.2;
        let s = Cell::Num(x).csv();
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(Cell::Empty.csv(), "");
        assert_eq!(Cell::Num(f64::NAN).json(), Value::Null);
    }
}
