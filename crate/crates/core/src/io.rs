//! File formats: Matrix Market operators with a JSON header, and binary
//! state vectors with a JSON sidecar.

use std::io::{BufRead, Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisIndex, StateVector};
use crate::error::{Error, Result};
use crate::hamiltonian::OperatorMatrix;

/// Metadata stored next to an exported operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorHeader {
    pub circuit: String,
    pub circuit_hash: String,
    pub num_qubits: usize,
    pub num_steps: usize,
    pub lambda: f64,
    pub energy_scale: f64,
    pub dim: usize,
    pub nnz: usize,
}

/// Coordinate format, complex, both triangles, 1-based indices.
pub fn write_matrix_market(h: &OperatorMatrix, mut w: impl Write) -> Result<()> {
    writeln!(w, "%%MatrixMarket matrix coordinate complex general")?;
    writeln!(w, "% Hermitian operator, both triangles stored, energies in units of E")?;
    writeln!(w, "{} {} {}", h.dim(), h.dim(), h.nnz())?;
    for (r, c, v) in h.iter() {
        writeln!(w, "{} {} {:.16e} {:.16e}", r + 1, c + 1, v.re, v.im)?;
    }
    Ok(())
}

fn mm_error(message: impl Into<String>) -> Error {
    Error::Format {
        what: "matrix market",
        message: message.into(),
    }
}

pub fn read_matrix_market(r: impl BufRead) -> Result<OperatorMatrix> {
    let mut lines = r.lines();
    let banner = lines.next().ok_or_else(|| mm_error("empty file"))??;
    let banner_lc = banner.to_ascii_lowercase();
    if !banner_lc.starts_with("%%matrixmarket matrix coordinate") {
        return Err(mm_error(format!("unsupported banner '{banner}'")));
    }
    let complex = banner_lc.contains(" complex");
    if !banner_lc.ends_with(" general") {
        return Err(mm_error("only the general symmetry qualifier is supported"));
    }
    let mut size = None;
    let mut triplets = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        let lineno = k + 2;
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(mm_error(format!("line {lineno}: expected 'rows cols nnz'")));
                }
                let p: Vec<usize> = fields
                    .iter()
                    .map(|f| f.parse().map_err(|_| mm_error(format!("line {lineno}: bad integer '{f}'"))))
                    .collect::<Result<_>>()?;
                if p[0] != p[1] {
                    return Err(mm_error(format!("line {lineno}: operator must be square")));
                }
                size = Some((p[0], p[2]));
            }
            Some((n, _)) => {
                let want = if complex { 4 } else { 3 };
                if fields.len() != want {
                    return Err(mm_error(format!("line {lineno}: expected {want} fields")));
                }
                let idx = |f: &str| -> Result<usize> {
                    let i: usize = f
                        .parse()
                        .map_err(|_| mm_error(format!("line {lineno}: bad index '{f}'")))?;
                    if i == 0 || i > n {
                        return Err(mm_error(format!("line {lineno}: index {i} outside 1..={n}")));
                    }
                    Ok(i - 1)
                };
                let num = |f: &str| -> Result<f64> {
                    f.parse()
                        .map_err(|_| mm_error(format!("line {lineno}: bad number '{f}'")))
                };
                let re = num(fields[2])?;
                let im = if complex { num(fields[3])? } else { 0.0 };
                triplets.push((idx(fields[0])?, idx(fields[1])?, Complex64::new(re, im)));
            }
        }
    }
    let (n, nnz) = size.ok_or_else(|| mm_error("missing size line"))?;
    if triplets.len() != nnz {
        return Err(mm_error(format!("expected {nnz} entries, found {}", triplets.len())));
    }
    Ok(OperatorMatrix::from_triplets(n, triplets))
}

/// Leading bytes of a binary state file.
pub const STATE_MAGIC: [u8; 8] = *b"GSQCSTV1";
const FLAG_NORMALIZED: u32 = 1;

/// 32-byte header (magic, M, N, flags, reserved, D) then `D` little-endian
/// `(re, im)` pairs of f64.
pub fn write_state(state: &StateVector, mut w: impl Write) -> Result<()> {
    let b = &state.basis;
    w.write_all(&STATE_MAGIC)?;
    w.write_all(&(b.num_qubits() as u32).to_le_bytes())?;
    w.write_all(&(b.num_steps() as u32).to_le_bytes())?;
    let flags = if state.normalized { FLAG_NORMALIZED } else { 0 };
    w.write_all(&flags.to_le_bytes())?;
    w.write_all(&0u32.to_le_bytes())?;
    w.write_all(&(b.dim() as u64).to_le_bytes())?;
    for a in &state.amplitudes {
        w.write_all(&a.re.to_le_bytes())?;
        w.write_all(&a.im.to_le_bytes())?;
    }
    Ok(())
}

fn state_error(message: impl Into<String>) -> Error {
    Error::Format {
        what: "state vector",
        message: message.into(),
    }
}

/// Inverse of [`write_state`]. `raw_norm` is not stored in the binary; it is
/// set to 1 for normalized states and to the measured norm otherwise.
pub fn read_state(mut r: impl Read) -> Result<StateVector> {
    let mut header = [0u8; 32];
    r.read_exact(&mut header)
        .map_err(|_| state_error("truncated header"))?;
    if header[..8] != STATE_MAGIC {
        return Err(state_error("bad magic"));
    }
    let u32_at = |o: usize| u32::from_le_bytes(header[o..o + 4].try_into().unwrap());
    let m = u32_at(8) as usize;
    let n = u32_at(12) as usize;
    let flags = u32_at(16);
    let dim = u64::from_le_bytes(header[24..32].try_into().unwrap()) as usize;
    let basis = BasisIndex::new(m, n)?;
    if basis.dim() != dim {
        return Err(state_error(format!(
            "header dimension {dim} does not match M={m}, N={n}"
        )));
    }
    let mut bytes = vec![0u8; dim * 16];
    r.read_exact(&mut bytes)
        .map_err(|_| state_error("truncated amplitude data"))?;
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(state_error("trailing bytes after amplitudes"));
    }
    let amplitudes: Vec<Complex64> = bytes
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    let normalized = flags & FLAG_NORMALIZED != 0;
    let mut state = StateVector {
        amplitudes,
        basis,
        normalized,
        raw_norm: 1.0,
    };
    if !normalized {
        state.raw_norm = state.norm();
    }
    Ok(state)
}

/// JSON metadata accompanying a binary state file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSidecar {
    pub num_qubits: usize,
    pub num_steps: usize,
    pub dim: usize,
    pub normalized: bool,
    pub raw_norm: f64,
    pub lambda: Option<f64>,
    pub circuit_hash: Option<String>,
    pub layout: String,
}

impl StateSidecar {
    pub fn new(state: &StateVector, lambda: Option<f64>, circuit_hash: Option<String>) -> Self {
        Self {
            num_qubits: state.basis.num_qubits(),
            num_steps: state.basis.num_steps(),
            dim: state.basis.dim(),
            normalized: state.normalized,
            raw_norm: state.raw_norm,
            lambda,
            circuit_hash,
            layout: "qubit 0 most significant; local index 2*row + spin".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{ground_state, Lambda};
    use crate::catalog;
    use crate::hamiltonian::build_hamiltonian;

    #[test]
    fn matrix_market_round_trip() {
        let c = catalog::bell();
        let b = BasisIndex::for_circuit(&c).unwrap();
        let h = build_hamiltonian(&c, Lambda::new(0.3).unwrap(), &b).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&h, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate complex general\n"));
        assert!(text.contains(&format!("\n36 36 {}\n", h.nnz())));
        let back = read_matrix_market(buf.as_slice()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn matrix_market_rejects_bad_input() {
        let bad = "%%MatrixMarket matrix coordinate complex general\n2 2 1\n3 1 1.0 0.0\n";
        assert!(read_matrix_market(bad.as_bytes()).is_err());
        let short = "%%MatrixMarket matrix coordinate complex general\n2 2 2\n1 1 1.0 0.0\n";
        assert!(read_matrix_market(short.as_bytes()).is_err());
    }

    #[test]
    fn state_round_trip() {
        let c = catalog::bell();
        let b = BasisIndex::for_circuit(&c).unwrap();
        let s = ground_state(&c, Lambda::new(0.8).unwrap(), &b).unwrap();
        let mut buf = Vec::new();
        write_state(&s, &mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 16 * b.dim());
        assert_eq!(&buf[..8], b"GSQCSTV1");
        let back = read_state(buf.as_slice()).unwrap();
        assert_eq!(back.amplitudes, s.amplitudes);
        assert!(back.normalized);
        buf.truncate(40);
        assert!(read_state(buf.as_slice()).is_err());
    }
}
