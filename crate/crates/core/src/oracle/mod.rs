//! Independent discretisations used to cross-check the closed-form results:
//! a flux-form finite-difference Sturm–Liouville operator in 1-D and a
//! Fourier–Galerkin section of the gradient compression on `(0,1)^d`.

pub mod fd;
pub mod galerkin;

use std::io::{self, Write};

pub use fd::{assemble_fd_1d, FDOperator1D};
pub use galerkin::{assemble_galerkin, galerkin_spectrum, GalerkinCoefficient, GalerkinProjection};

/// Writes a sparse matrix as a `rows cols nnz` header followed by one
/// zero-based `i j value` line per stored entry.
pub fn write_triplets<W: Write>(
    out: &mut W,
    rows: usize,
    cols: usize,
    entries: &[(usize, usize, f64)],
) -> io::Result<()> {
    writeln!(out, "{rows} {cols} {}", entries.len())?;
    for (i, j, v) in entries {
        writeln!(out, "{i} {j} {v:.17e}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triplet_format() {
        let mut buf = Vec::new();
        write_triplets(&mut buf, 2, 2, &[(0, 0, 1.0), (1, 0, -0.5)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "2 2 2");
        let parts: Vec<&str> = lines[2].split(' ').collect();
        assert_eq!(parts[..2], ["1", "0"]);
        assert_eq!(parts[2].parse::<f64>().unwrap(), -0.5);
    }
}
