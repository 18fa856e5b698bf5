//! Flat `name = value` parameter files.
//!
//! One assignment per line, `#` starts a comment. Values are numbers,
//! booleans, comma-separated number lists or bare strings. A file maps onto
//! a JSON object, so any serde type with matching field names can be read
//! from it; unknown keys are ignored by the target type.

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

/// Parses key-value text into a JSON object, preserving key order.
pub fn parse(text: &str) -> Result<Map<String, Value>> {
    let mut map = Map::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: format!("expected `name = value`, got `{line}`"),
        })?;
        let key = key.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("bad key `{key}`"),
            });
        }
        if map.contains_key(key) {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("duplicate key `{key}`"),
            });
        }
        let value = parse_value(value.trim()).map_err(|message| Error::Parse {
            line: i + 1,
            message,
        })?;
        map.insert(key.to_string(), value);
    }
    Ok(map)
}

fn parse_value(s: &str) -> std::result::Result<Value, String> {
    if s.is_empty() {
        return Err("missing value".into());
    }
    if s.contains(',') {
        return s
            .split(',')
            .map(|t| parse_scalar(t.trim()))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(Value::Array);
    }
    parse_scalar(s)
}

fn parse_scalar(s: &str) -> std::result::Result<Value, String> {
    match s {
        "" => return Err("empty list element".into()),
        "true" => return Ok(Value::Bool(true)),
        "false" => return Ok(Value::Bool(false)),
        _ => {}
    }
    if let Ok(i) = s.parse::<i64>() {
        return Ok(Value::Number(i.into()));
    }
    if let Ok(x) = s.parse::<f64>() {
        return Number::from_f64(x)
            .map(Value::Number)
            .ok_or_else(|| format!("non-finite number `{s}`"));
    }
    Ok(Value::String(s.to_string()))
}

/// Reads a typed value from key-value text.
pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<T> {
    from_map(&parse(text)?)
}

pub fn from_map<T: DeserializeOwned>(map: &Map<String, Value>) -> Result<T> {
    Ok(serde_json::from_value(Value::Object(map.clone()))?)
}

/// Writes a flat struct as key-value text. Nested objects are rejected.
pub fn to_string<T: Serialize>(value: &T) -> Result<String> {
    let Value::Object(map) = serde_json::to_value(value)? else {
        return Err(Error::invalid("value", "only flat structs can be written as key-value text"));
    };
    let mut out = String::new();
    for (k, v) in &map {
        let text = match v {
            Value::Null => continue,
            Value::Array(items) => items
                .iter()
                .map(scalar_text)
                .collect::<Result<Vec<_>>>()?
                .join(", "),
            other => scalar_text(other)?,
        };
        out.push_str(&format!("{k} = {text}\n"));
    }
    Ok(out)
}

fn scalar_text(v: &Value) -> Result<String> {
    match v {
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        Value::String(s) if !s.contains(['#', ',', '\n']) => Ok(s.clone()),
        _ => Err(Error::invalid("value", format!("cannot write `{v}` as a key-value scalar"))),
    }
}
