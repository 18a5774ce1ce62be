//! NPY v1.0 reader and writer for dense float matrices.
//!
//! Reads little-endian `<f4`/`<f8` arrays in C order with one or two
//! dimensions; a 1-D array of length n becomes an n×1 matrix. Always writes
//! `<f8`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sim2real_gauge_core::Matrix;

const MAGIC: &[u8; 6] = b"\x93NUMPY";
/// Magic, two version bytes and the u16 header length.
const PREAMBLE_LEN: usize = 10;
const ALIGN: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum NpyError {
    #[error("bad magic: file does not start with \\x93NUMPY")]
    BadMagic,
    #[error("unsupported NPY version {major}.{minor} (only 1.0 is read)")]
    UnsupportedVersion { major: u8, minor: u8 },
    #[error("header field 'fortran_order' is True; only C-order arrays are supported")]
    FortranOrder,
    #[error("header field 'descr' is {0:?}; expected '<f4' or '<f8'")]
    UnsupportedDtype(String),
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("header field 'shape' is {0:?}; only 1-D and 2-D arrays are supported")]
    UnsupportedShape(Vec<usize>),
    #[error("truncated payload: shape needs {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("payload has {extra} bytes beyond the declared shape")]
    TrailingBytes { extra: usize },
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("refusing to write an empty {rows}x{cols} matrix")]
    EmptyMatrix { rows: usize, cols: usize },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    InFile { path: PathBuf, source: Box<NpyError> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dtype {
    F4,
    F8,
}

impl Dtype {
    fn width(self) -> usize {
        match self {
            Dtype::F4 => 4,
            Dtype::F8 => 8,
        }
    }
}

#[derive(Debug, PartialEq)]
struct Header {
    dtype: Dtype,
    rows: usize,
    cols: usize,
}

/// Reads an NPY file into a matrix.
pub fn read_npy(path: impl AsRef<Path>) -> Result<Matrix, NpyError> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| NpyError::Io { path: path.to_owned(), source })?;
    parse_npy(&bytes).map_err(|e| NpyError::InFile { path: path.to_owned(), source: Box::new(e) })
}

/// Writes `m` as an NPY v1.0 `<f8` file.
pub fn write_npy(m: &Matrix, path: impl AsRef<Path>) -> Result<(), NpyError> {
    let path = path.as_ref();
    let bytes = encode_npy(m)?;
    fs::write(path, bytes).map_err(|source| NpyError::Io { path: path.to_owned(), source })
}

/// Parses an in-memory NPY image.
pub fn parse_npy(bytes: &[u8]) -> Result<Matrix, NpyError> {
    if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
        return Err(NpyError::BadMagic);
    }
    if bytes.len() < PREAMBLE_LEN {
        return Err(NpyError::BadHeader("file ends inside the preamble".into()));
    }
    let (major, minor) = (bytes[6], bytes[7]);
    if (major, minor) != (1, 0) {
        return Err(NpyError::UnsupportedVersion { major, minor });
    }
    let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let data_start = PREAMBLE_LEN + header_len;
    let header_bytes = bytes
        .get(PREAMBLE_LEN..data_start)
        .ok_or_else(|| NpyError::BadHeader(format!("header length {header_len} runs past end of file")))?;
    let text = std::str::from_utf8(header_bytes).map_err(|_| NpyError::BadHeader("header is not ASCII".into()))?;
    let header = parse_header(text)?;

    let payload = &bytes[data_start..];
    let count = header.rows * header.cols;
    let expected = count * header.dtype.width();
    if payload.len() < expected {
        return Err(NpyError::Truncated { expected, actual: payload.len() });
    }
    if payload.len() > expected {
        return Err(NpyError::TrailingBytes { extra: payload.len() - expected });
    }
    let data: Vec<f64> = match header.dtype {
        Dtype::F8 => payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect(),
        Dtype::F4 => payload.chunks_exact(4).map(|c| f64::from(f32::from_le_bytes(c.try_into().unwrap()))).collect(),
    };
    if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
        let cols = header.cols.max(1);
        return Err(NpyError::NonFinite { row: pos / cols, col: pos % cols });
    }
    Ok(Matrix::new(header.rows, header.cols, data).expect("length and finiteness checked above"))
}

/// Serializes `m` as NPY v1.0 with a 64-byte aligned preamble.
pub fn encode_npy(m: &Matrix) -> Result<Vec<u8>, NpyError> {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Err(NpyError::EmptyMatrix { rows, cols });
    }
    let mut header = format!("{{'descr': '<f8', 'fortran_order': False, 'shape': ({rows}, {cols}), }}");
    let unpadded = PREAMBLE_LEN + header.len() + 1;
    header.push_str(&" ".repeat((ALIGN - unpadded % ALIGN) % ALIGN));
    header.push('\n');

    let mut out = Vec::with_capacity(PREAMBLE_LEN + header.len() + 8 * rows * cols);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&[1, 0]);
    out.extend_from_slice(&(header.len() as u16).to_le_bytes());
    out.extend_from_slice(header.as_bytes());
    for v in m.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

// Header dictionary: a Python literal such as
// {'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }

#[derive(Debug, PartialEq)]
enum Value {
    Str(String),
    Bool(bool),
    Tuple(Vec<usize>),
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), NpyError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(NpyError::BadHeader(format!("expected '{}' at offset {}", c as char, self.pos)))
        }
    }

    fn string(&mut self) -> Result<String, NpyError> {
        let quote = match self.peek() {
            Some(q @ (b'\'' | b'"')) => q,
            _ => return Err(NpyError::BadHeader(format!("expected a quoted string at offset {}", self.pos))),
        };
        let start = self.pos + 1;
        let end = self.s[start..]
            .iter()
            .position(|&b| b == quote)
            .ok_or_else(|| NpyError::BadHeader("unterminated string".into()))?;
        self.pos = start + end + 1;
        Ok(String::from_utf8_lossy(&self.s[start..start + end]).into_owned())
    }

    fn word(&mut self) -> &'a [u8] {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        &self.s[start..self.pos]
    }

    fn value(&mut self) -> Result<Value, NpyError> {
        match self.peek() {
            Some(b'\'' | b'"') => self.string().map(Value::Str),
            Some(b'(') => {
                self.pos += 1;
                let mut dims = Vec::new();
                while !self.eat(b')') {
                    let word = self.word();
                    let text = std::str::from_utf8(word).unwrap_or("");
                    let dim = text
                        .trim_end_matches('L')
                        .parse()
                        .map_err(|_| NpyError::BadHeader(format!("shape entry {text:?} is not a non-negative integer")))?;
                    dims.push(dim);
                    if !self.eat(b',') {
                        self.expect(b')')?;
                        break;
                    }
                }
                Ok(Value::Tuple(dims))
            }
            _ => match self.word() {
                b"True" => Ok(Value::Bool(true)),
                b"False" => Ok(Value::Bool(false)),
                other => Err(NpyError::BadHeader(format!("unexpected value {:?}", String::from_utf8_lossy(other)))),
            },
        }
    }
}

fn parse_header(text: &str) -> Result<Header, NpyError> {
    let mut cur = Cursor { s: text.as_bytes(), pos: 0 };
    cur.expect(b'{')?;
    let (mut descr, mut fortran, mut shape) = (None, None, None);
    while !cur.eat(b'}') {
        let key = cur.string()?;
        cur.expect(b':')?;
        let value = cur.value()?;
        match (key.as_str(), value) {
            ("descr", Value::Str(s)) => descr = Some(s),
            ("fortran_order", Value::Bool(b)) => fortran = Some(b),
            ("shape", Value::Tuple(t)) => shape = Some(t),
            (k @ ("descr" | "fortran_order" | "shape"), v) => {
                return Err(NpyError::BadHeader(format!("header field '{k}' has the wrong type: {v:?}")));
            }
            (k, _) => return Err(NpyError::BadHeader(format!("unknown header field '{k}'"))),
        }
        if !cur.eat(b',') {
            cur.expect(b'}')?;
            break;
        }
    }
    if cur.peek().is_some_and(|c| c != b'\n') {
        return Err(NpyError::BadHeader("unexpected text after header dictionary".into()));
    }

    let missing = |k: &str| NpyError::BadHeader(format!("header field '{k}' is missing"));
    let descr = descr.ok_or_else(|| missing("descr"))?;
    let dtype = match descr.as_str() {
        "<f8" => Dtype::F8,
        "<f4" => Dtype::F4,
        _ => return Err(NpyError::UnsupportedDtype(descr)),
    };
    if fortran.ok_or_else(|| missing("fortran_order"))? {
        return Err(NpyError::FortranOrder);
    }
    let (rows, cols) = match shape.ok_or_else(|| missing("shape"))?.as_slice() {
        [n] => (*n, 1),
        [r, c] => (*r, *c),
        other => return Err(NpyError::UnsupportedShape(other.to_vec())),
    };
    Ok(Header { dtype, rows, cols })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(header: &str, payload: &[u8]) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        out.extend_from_slice(&[1, 0]);
        out.extend_from_slice(&(header.len() as u16).to_le_bytes());
        out.extend_from_slice(header.as_bytes());
        out.extend_from_slice(payload);
        out
    }

    fn f8(values: &[f64]) -> Vec<u8> {
        values.iter().flat_map(|v| v.to_le_bytes()).collect()
    }

    #[test]
    fn reads_two_by_three_f8() {
        let bytes = raw("{'descr': '<f8', 'fortran_order': False, 'shape': (2, 3), }\n", &f8(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]));
        let m = parse_npy(&bytes).unwrap();
        assert_eq!(m, Matrix::from_rows(&[[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]).unwrap());
    }

    #[test]
    fn reads_one_dimensional_f4_as_column() {
        let bytes = raw("{'descr': '<f4', 'fortran_order': False, 'shape': (4,), }\n", &[0u8; 16]);
        assert_eq!(parse_npy(&bytes).unwrap(), Matrix::zeros(4, 1));
    }

    #[test]
    fn widens_f4_exactly() {
        let payload: Vec<u8> = [0.1f32, -2.5].iter().flat_map(|v| v.to_le_bytes()).collect();
        let bytes = raw("{'descr':'<f4','fortran_order':False,'shape':(1,2)}", &payload);
        assert_eq!(parse_npy(&bytes).unwrap().as_slice(), &[f64::from(0.1f32), -2.5]);
    }

    #[test]
    fn key_order_and_quotes_are_free() {
        let bytes = raw("{\"shape\": (1, 1), \"fortran_order\": False, \"descr\": \"<f8\"}  \n", &f8(&[3.0]));
        assert_eq!(parse_npy(&bytes).unwrap().get(0, 0), 3.0);
    }

    #[test]
    fn one_by_one_payload_is_eight_bytes() {
        let bytes = encode_npy(&Matrix::from_rows(&[[7.0]]).unwrap()).unwrap();
        let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
        assert_eq!((PREAMBLE_LEN + header_len) % 64, 0);
        assert_eq!(&bytes[PREAMBLE_LEN + header_len..], &7.0f64.to_le_bytes());
        assert_eq!(bytes[PREAMBLE_LEN + header_len - 1], b'\n');
    }

    #[test]
    fn rejects_empty_write() {
        assert!(matches!(encode_npy(&Matrix::zeros(0, 3)), Err(NpyError::EmptyMatrix { rows: 0, cols: 3 })));
    }

    #[test]
    fn distinct_errors() {
        let good = "{'descr': '<f8', 'fortran_order': False, 'shape': (1, 1), }\n";
        assert!(matches!(parse_npy(b"\x93NUMPZ\x01\x00"), Err(NpyError::BadMagic)));

        let mut v2 = raw(good, &f8(&[1.0]));
        v2[6] = 2;
        assert!(matches!(parse_npy(&v2), Err(NpyError::UnsupportedVersion { major: 2, minor: 0 })));

        let fortran = raw("{'descr': '<f8', 'fortran_order': True, 'shape': (1, 1), }\n", &f8(&[1.0]));
        assert!(matches!(parse_npy(&fortran), Err(NpyError::FortranOrder)));

        let int = raw("{'descr': '<i8', 'fortran_order': False, 'shape': (1, 1), }\n", &f8(&[1.0]));
        assert!(matches!(parse_npy(&int), Err(NpyError::UnsupportedDtype(d)) if d == "<i8"));

        let big = raw("{'descr': '>f8', 'fortran_order': False, 'shape': (1, 1), }\n", &f8(&[1.0]));
        assert!(matches!(parse_npy(&big), Err(NpyError::UnsupportedDtype(_))));

        let cube = raw("{'descr': '<f8', 'fortran_order': False, 'shape': (1, 1, 1), }\n", &f8(&[1.0]));
        assert!(matches!(parse_npy(&cube), Err(NpyError::UnsupportedShape(s)) if s == vec![1, 1, 1]));

        let short = raw("{'descr': '<f8', 'fortran_order': False, 'shape': (2, 1), }\n", &f8(&[1.0]));
        assert!(matches!(parse_npy(&short), Err(NpyError::Truncated { expected: 16, actual: 8 })));

        let long = raw(good, &f8(&[1.0, 2.0]));
        assert!(matches!(parse_npy(&long), Err(NpyError::TrailingBytes { extra: 8 })));

        let nan = raw(good, &f8(&[f64::NAN]));
        assert!(matches!(parse_npy(&nan), Err(NpyError::NonFinite { row: 0, col: 0 })));

        let missing = raw("{'descr': '<f8', 'shape': (1, 1), }\n", &f8(&[1.0]));
        assert!(matches!(parse_npy(&missing), Err(NpyError::BadHeader(m)) if m.contains("fortran_order")));

        let mut overrun = raw(good, &[]);
        overrun[8] = 0xff;
        assert!(matches!(parse_npy(&overrun), Err(NpyError::BadHeader(_))));
    }

    #[test]
    fn io_errors_name_the_path() {
        let err = read_npy("/definitely/not/here.npy").unwrap_err();
        assert!(err.to_string().starts_with("/definitely/not/here.npy"));
    }
}
