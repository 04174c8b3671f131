//! Fixed-format JSON: field order follows struct order and every float is
//! printed with 17 significant digits.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// A float serialized as `d.dddddddddddddddde±x`, or `null` when not finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F(pub f64);

impl Serialize for F {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            RawValue::from_string(format!("{:.16e}", self.0))
                .map_err(serde::ser::Error::custom)?
                .serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

pub fn floats(v: &[f64]) -> Vec<F> {
    v.iter().map(|&x| F(x)).collect()
}

pub fn to_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(to_string(&F(0.5)), "5.0000000000000000e-1\n");
        assert_eq!(to_string(&F(f64::INFINITY)), "null\n");
        let x = 0.1 + 0.2;
        let back: f64 = to_string(&F(x)).trim().parse().unwrap();
        assert_eq!(back.to_bits(), x.to_bits());
    }
}
