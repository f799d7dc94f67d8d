//! The JSON instance format: `{"A": [["p/q", ...], ...], "b": ["p/q", ...]}`.
//!
//! Entries are rational strings; JSON integers are accepted as a
//! convenience. Decimal literals are refused unless `tolerate_floats` is
//! set, in which case they are read as the exact decimal they spell.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::polytope::{Matrix, PolytopeInstance};
use crate::rat::{parse_rat, parse_rat_lenient, Rat};

#[derive(Debug, Clone)]
pub struct ParsedInstance {
    pub instance: PolytopeInstance,
    /// One line per entry converted from a decimal literal.
    pub warnings: Vec<String>,
}

fn entry(v: &Value, at: &str, tolerate_floats: bool, warnings: &mut Vec<String>) -> Result<Rat> {
    let text = match v {
        Value::String(s) => s.trim().to_string(),
        Value::Number(num) if num.is_i64() || num.is_u64() => num.to_string(),
        Value::Number(num) => {
            if !tolerate_floats {
                return Err(Error::InvalidInstance(format!(
                    "{at}: floating-point number {num}; write it as an exact rational string such as \"1/10\" \
                     (or pass --tolerate-floats)"
                )));
            }
            num.to_string()
        }
        other => return Err(Error::InvalidInstance(format!("{at}: expected a rational string, found {other}"))),
    };
    if tolerate_floats {
        let (r, converted) = parse_rat_lenient(&text).map_err(|e| Error::InvalidInstance(format!("{at}: {e}")))?;
        if converted {
            warnings.push(format!("{at}: decimal {text} read as exact rational {r}"));
        }
        Ok(r)
    } else {
        parse_rat(&text).map_err(|e| Error::InvalidInstance(format!("{at}: {e}")))
    }
}

fn array<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::InvalidInstance(format!("{at}: expected an array")))
}

pub fn parse_instance(text: &str, tolerate_floats: bool) -> Result<ParsedInstance> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::InvalidInstance(format!("not valid JSON: {e}")))?;
    let obj = doc.as_object().ok_or_else(|| Error::InvalidInstance("top level must be an object".into()))?;
    let a_val = obj.get("A").ok_or_else(|| Error::InvalidInstance("missing field \"A\"".into()))?;
    let b_val = obj.get("b").ok_or_else(|| Error::InvalidInstance("missing field \"b\"".into()))?;

    let mut warnings = Vec::new();
    let mut a: Matrix = Vec::new();
    for (i, row) in array(a_val, "A")?.iter().enumerate() {
        let row = array(row, &format!("A[{i}]"))?;
        let parsed = row
            .iter()
            .enumerate()
            .map(|(j, v)| entry(v, &format!("A[{i}][{j}]"), tolerate_floats, &mut warnings))
            .collect::<Result<Vec<_>>>()?;
        a.push(parsed);
    }
    let b = array(b_val, "b")?
        .iter()
        .enumerate()
        .map(|(i, v)| entry(v, &format!("b[{i}]"), tolerate_floats, &mut warnings))
        .collect::<Result<Vec<_>>>()?;
    Ok(ParsedInstance { instance: PolytopeInstance::new(a, b)?, warnings })
}

/// Serializes with one matrix row per line.
pub fn to_json(inst: &PolytopeInstance) -> String {
    let strings = |r: &[Rat]| Value::Array(r.iter().map(|x| Value::String(x.to_string())).collect());
    let rows: Vec<String> = inst.a().iter().map(|r| format!("    {}", strings(r))).collect();
    format!("{{\n  \"A\": [\n{}\n  ],\n  \"b\": {}\n}}\n", rows.join(",\n"), strings(inst.b()))
}
