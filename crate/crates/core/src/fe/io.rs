use std::io::{BufRead, Read, Write};

use crate::error::{invalid, Result};

fn io_err(e: std::io::Error) -> crate::Error {
    invalid(format!("i/o error: {e}"))
}

/// Writes `index,value` lines with a header.
pub fn write_vector_csv(mut w: impl Write, values: &[f64]) -> Result<()> {
    writeln!(w, "index,value").map_err(io_err)?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{i},{v:e}").map_err(io_err)?;
    }
    Ok(())
}

pub fn read_vector_csv(r: impl BufRead) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (n, line) in r.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let line = line.trim();
        if line.is_empty() || (n == 0 && line.starts_with("index")) {
            continue;
        }
        let (idx, val) = line
            .split_once(',')
            .ok_or_else(|| invalid(format!("line {}: expected index,value", n + 1)))?;
        let idx: usize = idx.trim().parse().map_err(|_| invalid(format!("line {}: bad index", n + 1)))?;
        if idx != out.len() {
            return Err(invalid(format!("line {}: index {idx} out of sequence", n + 1)));
        }
        out.push(val.trim().parse().map_err(|_| invalid(format!("line {}: bad value", n + 1)))?);
    }
    Ok(out)
}

/// Little-endian `u64` length followed by `f64` values.
pub fn write_vector_binary(mut w: impl Write, values: &[f64]) -> Result<()> {
    w.write_all(&(values.len() as u64).to_le_bytes()).map_err(io_err)?;
    for v in values {
        w.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    Ok(())
}

pub fn read_vector_binary(mut r: impl Read) -> Result<Vec<f64>> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf).map_err(io_err)?;
    let n = u64::from_le_bytes(buf) as usize;
    let mut out = Vec::with_capacity(n.min(1 << 24));
    for _ in 0..n {
        r.read_exact(&mut buf).map_err(io_err)?;
        out.push(f64::from_le_bytes(buf));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let v = vec![1.0, -2.5e-300, 1.2345678901234567, 0.0];
        let mut csv = Vec::new();
        write_vector_csv(&mut csv, &v).unwrap();
        assert_eq!(read_vector_csv(csv.as_slice()).unwrap(), v);
        let mut bin = Vec::new();
        write_vector_binary(&mut bin, &v).unwrap();
        assert_eq!(bin.len(), 8 * 5);
        assert_eq!(read_vector_binary(bin.as_slice()).unwrap(), v);
        assert!(read_vector_csv("index,value\n1,2.0\n".as_bytes()).is_err());
        assert!(read_vector_binary(&bin[..20]).is_err());
    }
}
