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

//! Parsers for the value syntaxes accepted on the command line.

use std::ops::RangeInclusive;

use entwalk::MAX_QUBITS;
use num_complex::Complex64;

/// Coin amplitudes given as `re+imj` items separated by commas.
#[derive(Debug, Clone, PartialEq)]
pub struct Amplitudes(pub Vec<Complex64>);

fn parse_real(s: &str, whole: &str) -> Result<f64, String> {
    s.parse::<f64>()
        .map_err(|_| format!("cannot read `{s}` in amplitude `{whole}`"))
}

/// Parses one complex number: `0.5`, `-0.5j`, `j`, `0.3-0.4j`, `1e-3+2E-2j`.
pub fn parse_complex(item: &str) -> Result<Complex64, String> {
    let s: String = item.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty amplitude".into());
    }
    let Some(body) = s.strip_suffix(['j', 'J']) else {
        return Ok(Complex64::new(parse_real(&s, item)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_real(other, item)?,
    };
    Ok(Complex64::new(parse_real(re, item)?, im))
}

pub fn parse_amplitudes(s: &str) -> Result<Amplitudes, String> {
    s.split(',').map(parse_complex).collect::<Result<_, _>>().map(Amplitudes)
}

/// `a..b` (inclusive) or a single `n`, each within `1..=MAX_QUBITS`.
pub fn parse_qubit_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let read = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("`{t}` is not a qubit count"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (read(a)?, read(b.trim_start_matches('='))?),
        None => {
            let n = read(s)?;
            (n, n)
        }
    };
    if lo == 0 || hi > MAX_QUBITS || lo > hi {
        return Err(format!("qubit range must satisfy 1 <= a <= b <= {MAX_QUBITS}, got {s}"));
    }
    Ok(lo..=hi)
}

pub fn parse_qubits(s: &str) -> Result<usize, String> {
    let r = parse_qubit_range(s)?;
    if r.start() != r.end() {
        return Err("a single qubit count is expected here".into());
    }
    Ok(*r.start())
}

pub fn parse_threshold(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(format!("threshold must be finite and nonnegative, got {s}"));
    }
    Ok(t)
}

pub fn parse_probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(format!("probability must lie in [0, 1], got {s}"));
    }
    Ok(p)
}
