//! Deterministic numeric formatting for machine-readable output.

use serde::Serialize;

/// Format a float with 17 significant digits, enough to round-trip any f64.
pub fn g17(x: f64) -> String {
    // normalize -0.0 so equal values always print identically
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

struct G17Formatter;

impl serde_json::ser::Formatter for G17Formatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        writer.write_all(g17(value).as_bytes())
    }
}

/// Serialize to a JSON string with [`g17`] float formatting, so identical
/// inputs always produce byte-identical documents.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17Formatter);
    value
        .serialize(&mut ser)
        .expect("in-memory JSON serialization cannot fail");
    String::from_utf8(out).expect("serializer emits UTF-8")
}
