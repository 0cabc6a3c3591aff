//! Instance files.
//!
//! JSON form: `{"n": 6, "weights": [[0, 1, "1/2", ...], ...]}` with a full
//! symmetric matrix whose entries are integers or `"p/q"` strings.
//! Text form: first token `n`, then the `n(n-1)/2` upper-triangle entries
//! row by row, separated by any whitespace.

use std::fs;
use std::path::Path;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{self, Rational};

fn entry_to_rational(value: &Value) -> Result<Rational> {
    match value {
        Value::Number(num) => match num.as_i64() {
            Some(i) => Ok(rational::int(i)),
            None => rational::parse(&num.to_string()),
        },
        Value::String(s) => rational::parse(s),
        other => Err(Error::Parse(format!("weight entry {other} is not a number or \"p/q\" string"))),
    }
}

fn entry_to_json(value: &Rational) -> Value {
    if value.is_integer() {
        if let Ok(i) = value.numer().to_string().parse::<i64>() {
            return json!(i);
        }
    }
    json!(rational::to_compact(value))
}

/// Parses the JSON instance form.
pub fn parse_json(text: &str) -> Result<Instance> {
    let doc: Value =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let n = doc
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing or non-integer field \"n\"".into()))? as usize;
    let rows = doc
        .get("weights")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing array field \"weights\"".into()))?;
    if rows.len() != n {
        return Err(Error::Parse(format!(
            "\"weights\" has {} rows but n = {n}",
            rows.len()
        )));
    }
    let mut matrix = Vec::with_capacity(n);
    for (u, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Parse(format!("row {u} is not an array")))?;
        matrix.push(row.iter().map(entry_to_rational).collect::<Result<Vec<_>>>()?);
    }
    Instance::new(matrix)
}

/// Parses the upper-triangle text form.
pub fn parse_text(text: &str) -> Result<Instance> {
    let mut tokens = text.split_whitespace();
    let n: usize = tokens
        .next()
        .ok_or_else(|| Error::Parse("empty instance file".into()))?
        .parse()
        .map_err(|_| Error::Parse("first token must be the vertex count".into()))?;
    let mut rows = vec![vec![Rational::zero(); n]; n];
    for u in 0..n {
        for v in (u + 1)..n {
            let token = tokens.next().ok_or_else(|| {
                Error::Parse(format!("expected {} weights, ran out at ({u},{v})", n * (n.saturating_sub(1)) / 2))
            })?;
            let w = rational::parse(token)?;
            rows[u][v] = w.clone();
            rows[v][u] = w;
        }
    }
    if let Some(extra) = tokens.next() {
        return Err(Error::Parse(format!("unexpected trailing token {extra:?}")));
    }
    Instance::new(rows)
}

/// Parses either form, picking JSON when the text starts with `{`.
pub fn parse_instance(text: &str) -> Result<Instance> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_text(text)
    }
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

/// JSON document for an instance; integral weights are written as numbers.
pub fn to_json(instance: &Instance) -> Value {
    let weights: Vec<Vec<Value>> = instance
        .rows()
        .iter()
        .map(|row| row.iter().map(entry_to_json).collect())
        .collect();
    json!({ "n": instance.n(), "weights": weights })
}

pub fn save_instance(path: impl AsRef<Path>, instance: &Instance) -> Result<()> {
    let path = path.as_ref();
    let text = serde_json::to_string_pretty(&to_json(instance))
        .map_err(|e| Error::Internal(format!("serializing instance: {e}")))?;
    fs::write(path, text + "\n").map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn counterexample_json_loads() {
        let text = r#"{"n": 6, "weights": [
            [0,1,0,0,0,0],[1,0,0,0,0,0],[0,0,0,1,0,0],
            [0,0,1,0,0,0],[0,0,0,0,0,1],[0,0,0,0,1,0]]}"#;
        let g = parse_instance(text).unwrap();
        assert_eq!(g, Instance::counterexample());
        assert_eq!(g.total_weight(), int(3));
    }

    #[test]
    fn text_form_and_fractions() {
        let g = parse_instance("3\n1/2 2/4\n3").unwrap();
        assert_eq!(g.weight(0, 1), &ratio(1, 2));
        assert_eq!(g.weight(0, 2), &ratio(1, 2));
        assert_eq!(g.weight(2, 1), &int(3));
    }

    #[test]
    fn zero_instance_is_valid() {
        assert!(parse_instance("3\n0 0 0").is_ok());
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(parse_instance("4\n0 0 0 0 0 0"), Err(Error::InvalidInstance(_))));
        assert!(matches!(parse_instance("3\n0 0"), Err(Error::Parse(_))));
        assert!(matches!(parse_instance("3\n0 0 x"), Err(Error::Parse(_))));
        assert!(matches!(parse_instance("{\"n\": 3}"), Err(Error::Parse(_))));
        let asym = r#"{"n":3,"weights":[[0,1,0],[2,0,0],[0,0,0]]}"#;
        assert!(matches!(parse_instance(asym), Err(Error::InvalidInstance(_))));
        let neg = r#"{"n":3,"weights":[[0,-1,0],[-1,0,0],[0,0,0]]}"#;
        assert!(matches!(parse_instance(neg), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn round_trip_is_exact() {
        let g = Instance::from_fn(6, |u, v| ratio((u * 7 + v) as i64, (v + 2) as i64)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        save_instance(&path, &g).unwrap();
        let first = fs::read_to_string(&path).unwrap();
        let back = load_instance(&path).unwrap();
        assert_eq!(back, g);
        save_instance(&path, &back).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), first);
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(load_instance("/nonexistent/x.json"), Err(Error::Io { .. })));
    }
}
