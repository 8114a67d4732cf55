//! Report serialization: JSON with numbers rounded to 10 significant digits
//! so repeated runs with identical inputs are byte-identical.

use serde_json::Value;
use std::path::Path;

/// Round to 10 significant digits via decimal scientific formatting.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.9e}").parse().unwrap_or(x)
}

/// Walk a JSON value, rounding every number.
pub fn round_numbers(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    if let Some(rounded) = serde_json::Number::from_f64(round_sig(f)) {
                        *value = Value::Number(rounded);
                    }
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

/// Serialize with sorted keys and rounded numbers.
pub fn render_report(mut value: Value) -> String {
    round_numbers(&mut value);
    let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
    text.push('\n');
    text
}

pub fn write_report(path: &Path, value: Value) -> std::io::Result<()> {
    std::fs::write(path, render_report(value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn rounding_is_ten_significant_digits() {
        assert_eq!(round_sig(std::f64::consts::PI), 3.141592654);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(-12345.678901234), -12345.67890);
        assert_eq!(round_sig(1e-300), 1e-300);
    }

    #[test]
    fn render_is_stable() {
        let v = json!({"b": 1.00000000001, "a": [2.123456789012345, "x"]});
        let r1 = render_report(v.clone());
        let r2 = render_report(v);
        assert_eq!(r1, r2);
        assert!(r1.contains("2.123456789"));
    }
}
