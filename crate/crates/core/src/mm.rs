//! Matrix Market coordinate I/O for the skew operand and both factors, plus
//! the pivot list file. One parser handles every variant.
//!
//! The skew operand uses symmetry `skew-symmetric` with only strictly-lower
//! entries listed; T reuses the same layout restricted to its subdiagonal;
//! L is written as `general` with the unit diagonal omitted. Values carry 17
//! significant digits so round-trips are bit exact. Indices are 1-based.

use crate::error::{Error, Result};
use crate::matrix::{DenseSkewMatrix, SkewTridiagonal, UnitLowerTriangular};
use crate::perm::PermutationVector;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmSymmetry {
    General,
    SkewSymmetric,
}

struct MmBody {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, f64)>, // 0-based
}

fn parse_coordinate(path: &Path, want: MmSymmetry) -> Result<MmBody> {
    let file = std::fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();

    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty file".into()))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() < 5 || fields[0] != "%%MatrixMarket" || fields[1] != "matrix" {
        return Err(Error::Parse("malformed MatrixMarket header".into()));
    }
    if fields[2] != "coordinate" {
        return Err(Error::Parse(format!(
            "unsupported format {:?}, expected coordinate",
            fields[2]
        )));
    }
    if fields[3] != "real" {
        return Err(Error::Parse(format!(
            "unsupported field {:?}, expected real",
            fields[3]
        )));
    }
    let sym = match fields[4] {
        "general" => MmSymmetry::General,
        "skew-symmetric" => MmSymmetry::SkewSymmetric,
        other => {
            return Err(Error::Parse(format!("unsupported symmetry {other:?}")));
        }
    };
    if sym != want {
        return Err(Error::Parse(format!(
            "expected symmetry {:?}, found {:?}",
            match want {
                MmSymmetry::General => "general",
                MmSymmetry::SkewSymmetric => "skew-symmetric",
            },
            fields[4]
        )));
    }

    // skip comments, read the size line
    let mut size_line = None;
    for line in lines.by_ref() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        size_line = Some(line);
        break;
    }
    let size_line = size_line.ok_or_else(|| Error::Parse("missing size line".into()))?;
    let dims: Vec<&str> = size_line.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(Error::Parse("size line must be `rows cols nnz`".into()));
    }
    let rows: usize = dims[0]
        .parse()
        .map_err(|_| Error::Parse("bad row count".into()))?;
    let cols: usize = dims[1]
        .parse()
        .map_err(|_| Error::Parse("bad col count".into()))?;
    let nnz: usize = dims[2]
        .parse()
        .map_err(|_| Error::Parse("bad nnz count".into()))?;

    let mut entries = Vec::with_capacity(nnz);
    for line in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = trimmed.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("bad entry line {trimmed:?}")));
        }
        let i: usize = parts[0]
            .parse()
            .map_err(|_| Error::Parse("bad row index".into()))?;
        let j: usize = parts[1]
            .parse()
            .map_err(|_| Error::Parse("bad col index".into()))?;
        let v: f64 = parts[2]
            .parse()
            .map_err(|_| Error::Parse("bad value".into()))?;
        if i < 1 || j < 1 || i > rows || j > cols {
            return Err(Error::Parse(format!("index ({i}, {j}) out of range")));
        }
        entries.push((i - 1, j - 1, v));
    }
    if entries.len() != nnz {
        return Err(Error::Parse(format!(
            "expected {nnz} entries, found {}",
            entries.len()
        )));
    }
    Ok(MmBody {
        rows,
        cols,
        entries,
    })
}

/// Read a skew-symmetric matrix: coordinate, real, skew-symmetric, strictly
/// lower entries only.
pub fn read_matrix_market(path: &Path) -> Result<DenseSkewMatrix> {
    let body = parse_coordinate(path, MmSymmetry::SkewSymmetric)?;
    if body.rows != body.cols {
        return Err(Error::Parse("skew matrix must be square".into()));
    }
    let mut entries = Vec::with_capacity(body.entries.len());
    for (i, j, v) in body.entries {
        if i == j {
            return Err(Error::Parse(format!(
                "diagonal entry at ({}, {}) in a skew-symmetric file",
                i + 1,
                j + 1
            )));
        }
        if i < j {
            return Err(Error::Parse(format!(
                "upper-triangle entry at ({}, {}) in a skew-symmetric file",
                i + 1,
                j + 1
            )));
        }
        entries.push((i, j, v));
    }
    crate::matrix::skew_from_strict_lower(body.rows, &entries)
}

fn write_coordinate(
    path: &Path,
    sym: &str,
    rows: usize,
    cols: usize,
    entries: &[(usize, usize, f64)],
) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "%%MatrixMarket matrix coordinate real {sym}")?;
    writeln!(out, "{rows} {cols} {}", entries.len())?;
    for &(i, j, v) in entries {
        writeln!(out, "{} {} {:.16e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

/// Write a skew-symmetric matrix: nonzero strictly-lower entries only.
pub fn write_matrix_market(x: &DenseSkewMatrix, path: &Path) -> Result<()> {
    let m = x.order();
    let mut entries = Vec::new();
    for j in 0..m {
        for i in (j + 1)..m {
            let v = x.get(i, j);
            if v != 0.0 {
                entries.push((i, j, v));
            }
        }
    }
    write_coordinate(path, "skew-symmetric", m, m, &entries)
}

/// Write the factor L as `general` coordinate, unit diagonal omitted.
pub fn write_l(l: &UnitLowerTriangular, path: &Path) -> Result<()> {
    let m = l.order();
    let mut entries = Vec::new();
    for j in 0..m {
        for i in (j + 1)..m {
            let v = l.get(i, j);
            if v != 0.0 {
                entries.push((i, j, v));
            }
        }
    }
    write_coordinate(path, "general", m, m, &entries)
}

/// Read the factor L from a `general` coordinate file of strictly-lower
/// entries.
pub fn read_l(path: &Path) -> Result<UnitLowerTriangular> {
    let body = parse_coordinate(path, MmSymmetry::General)?;
    if body.rows != body.cols {
        return Err(Error::Parse("L must be square".into()));
    }
    let mut l = UnitLowerTriangular::identity(body.rows);
    for (i, j, v) in body.entries {
        if i <= j {
            return Err(Error::Parse(format!(
                "entry at ({}, {}) is not strictly lower",
                i + 1,
                j + 1
            )));
        }
        l.set(i, j, v)?;
    }
    Ok(l)
}

/// Write the factor T: skew-symmetric coordinate with subdiagonal entries.
pub fn write_t(t: &SkewTridiagonal, path: &Path) -> Result<()> {
    let m = t.order();
    let mut entries = Vec::new();
    for (k, &v) in t.sub.iter().enumerate() {
        if v != 0.0 {
            entries.push((k + 1, k, v));
        }
    }
    write_coordinate(path, "skew-symmetric", m, m, &entries)
}

/// Read the factor T from a skew-symmetric coordinate file; every entry must
/// sit on the first subdiagonal.
pub fn read_t(path: &Path) -> Result<SkewTridiagonal> {
    let body = parse_coordinate(path, MmSymmetry::SkewSymmetric)?;
    if body.rows != body.cols {
        return Err(Error::Parse("T must be square".into()));
    }
    let mut t = SkewTridiagonal::zero(body.rows);
    for (i, j, v) in body.entries {
        if i != j + 1 {
            return Err(Error::Parse(format!(
                "entry at ({}, {}) is off the subdiagonal",
                i + 1,
                j + 1
            )));
        }
        t.sub[j] = v;
    }
    Ok(t)
}

/// Write a pivot sequence as whitespace-separated 0-based integers.
pub fn write_pivots(p: &PermutationVector, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    let text: Vec<String> = p.pivots().iter().map(|pi| pi.to_string()).collect();
    writeln!(out, "{}", text.join(" "))?;
    Ok(())
}

/// Read a pivot sequence for a factorization of order `m` (window m - 1).
pub fn read_pivots(path: &Path, m: usize) -> Result<PermutationVector> {
    let text = std::fs::read_to_string(path)?;
    let mut pivots = Vec::new();
    for tok in text.split_whitespace() {
        let pi: usize = tok
            .parse()
            .map_err(|_| Error::Parse(format!("bad pivot {tok:?}")))?;
        pivots.push(pi);
    }
    if pivots.len() != m.saturating_sub(1) {
        return Err(Error::Parse(format!(
            "expected {} pivots, found {}",
            m.saturating_sub(1),
            pivots.len()
        )));
    }
    PermutationVector::new(pivots, m.saturating_sub(1))
}
