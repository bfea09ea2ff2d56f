//! Deterministic JSON rendering. Every float is written as `{:.16e}`,
//! i.e. 17 significant digits, which round-trips `f64` exactly, so the
//! same config always produces byte-identical output.

use std::io;

use serde::Serialize;

struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

/// Serializes `value` to a single JSON line.
pub(crate) fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .expect("reports contain only finite numbers and strings");
    buf.push(b'\n');
    String::from_utf8(buf).expect("the serializer emits UTF-8")
}
