//! Output rendering shared by the subcommands.

use serde_json::{Map, Value};

use crate::args::Format;

/// `%.17g`-style formatting: 17 significant digits, trailing zeros removed.
/// Every finite double survives a round trip through this text.
pub fn fmt17(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Renders a flat record as a JSON object or as `key,value` CSV rows. Arrays
/// become `key_0`, `key_1`, ... in CSV.
pub fn render_record(record: &Map<String, Value>, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(record).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut out = String::from("key,value\n");
            for (k, v) in record {
                flatten_csv(&mut out, k, v);
            }
            out
        }
    }
}

fn flatten_csv(out: &mut String, key: &str, v: &Value) {
    match v {
        Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                flatten_csv(out, &format!("{key}_{i}"), item);
            }
        }
        Value::Object(map) => {
            for (k, item) in map {
                flatten_csv(out, &format!("{key}.{k}"), item);
            }
        }
        Value::Number(n) => {
            let text = n.as_f64().map_or_else(|| n.to_string(), fmt17);
            out.push_str(&format!("{key},{text}\n"));
        }
        Value::Null => out.push_str(&format!("{key},\n")),
        Value::Bool(b) => out.push_str(&format!("{key},{b}\n")),
        Value::String(s) => out.push_str(&format!("{key},{s}\n")),
    }
}
