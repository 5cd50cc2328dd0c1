//! Float formatting for rule files: every real is written with 17
//! significant digits so that files round-trip bit-exactly and are
//! byte-stable across runs.

use serde::ser::{Error as _, SerializeSeq};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// Formats a finite float with 17 significant digits.
pub fn format_f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Wrapper that serializes as a 17-digit JSON number.
#[derive(Debug, Clone, Copy)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(S::Error::custom(format!("non-finite value {}", self.0)));
        }
        let raw = RawValue::from_string(format_f17(self.0)).map_err(S::Error::custom)?;
        raw.serialize(s)
    }
}

pub mod f17 {
    use super::*;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        F17(*x).serialize(s)
    }
}

pub mod f17_opt {
    use super::*;

    /// Non-finite values are written as `null`.
    pub fn serialize<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) if v.is_finite() => F17(*v).serialize(s),
            _ => s.serialize_none(),
        }
    }
}

pub mod f17_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&x| F17(x)))
    }
}

pub mod f17_mat {
    use super::*;

    pub fn serialize<S: Serializer>(rows: &[Vec<f64>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(rows.len()))?;
        for row in rows {
            let wrapped: Vec<F17> = row.iter().map(|&x| F17(x)).collect();
            seq.serialize_element(&wrapped)?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for &x in &[0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0, -0.0, std::f64::consts::PI] {
            let text = serde_json::to_string(&F17(x)).unwrap();
            let back: f64 = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{text}");
        }
        assert_eq!(serde_json::to_string(&F17(0.5)).unwrap(), "5.0000000000000000e-1");
    }

    #[test]
    fn non_finite_is_rejected() {
        assert!(serde_json::to_string(&F17(f64::NAN)).is_err());
    }
}
