//! JSON output with every real number written to 17 significant digits.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

use crate::error::Result;

/// Wraps a formatter so that `f32`/`f64` values are printed as `d.dddde±x`
/// with 16 digits after the point. Non-finite values become `null` upstream.
pub struct Sig17<F>(pub F);

macro_rules! forward {
    ($($name:ident),*) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
                self.0.$name(w)
            }
        )*
    };
}

impl<F: Formatter> Formatter for Sig17<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{:.16e}", value as f64)
    }

    forward!(begin_array, end_array, begin_object, end_object, end_array_value, end_object_value, begin_object_value);

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
}

pub fn to_writer_pretty<W: Write, S: Serialize + ?Sized>(writer: W, value: &S) -> Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(writer, Sig17(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    Ok(())
}

pub fn to_string_pretty<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut buf = Vec::new();
    to_writer_pretty(&mut buf, value)?;
    Ok(String::from_utf8(buf).expect("serializer emits UTF-8"))
}

pub fn to_string<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17(CompactFormatter));
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serializer emits UTF-8"))
}
