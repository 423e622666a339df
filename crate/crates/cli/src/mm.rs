//! Matrix Market coordinate files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use sparse_core::SymmetricSparse;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    Symmetric,
    General,
}

fn header(line: &str) -> Result<Symmetry> {
    let words: Vec<String> = line
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    let bad = |what: &str| CliError::parse(1, format!("unsupported header: {what}"));
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(CliError::parse(
            1,
            "expected '%%MatrixMarket matrix ...' header",
        ));
    }
    if words[2] != "coordinate" {
        return Err(bad(&words[2]));
    }
    if words[3] != "real" && words[3] != "integer" {
        return Err(bad(&words[3]));
    }
    match words[4].as_str() {
        "symmetric" => Ok(Symmetry::Symmetric),
        "general" => Ok(Symmetry::General),
        other => Err(bad(other)),
    }
}

/// Parses a square coordinate matrix. Symmetric files may list either
/// triangle; general files must contain both halves with equal values.
pub fn parse_matrix_market(text: &str) -> Result<SymmetricSparse> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let symmetry = match lines.next() {
        Some((_, l)) => header(l)?,
        None => return Err(CliError::parse(1, "empty file")),
    };
    let mut body = lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('%'));

    let (size_line, size) = body
        .next()
        .ok_or_else(|| CliError::parse(text.lines().count().max(1), "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|w| w.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| CliError::parse(size_line, format!("bad size line: {e}")))?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(CliError::parse(
            size_line,
            "size line needs rows, cols and nnz",
        ));
    };
    if rows != cols {
        return Err(CliError::parse(
            size_line,
            format!("matrix is {rows} x {cols}, not square"),
        ));
    }
    let n = rows;

    let mut entries: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut last_line = size_line;
    for (line, text) in body {
        last_line = line;
        if entries.len() == nnz {
            return Err(CliError::parse(line, format!("more than {nnz} entries")));
        }
        let mut it = text.split_whitespace();
        let mut index = |what: &str| -> Result<usize> {
            let w = it
                .next()
                .ok_or_else(|| CliError::parse(line, format!("missing {what}")))?;
            let k: usize = w
                .parse()
                .map_err(|_| CliError::parse(line, format!("bad {what} '{w}'")))?;
            if k == 0 || k > n {
                return Err(CliError::parse(line, format!("{what} {k} outside 1..={n}")));
            }
            Ok(k - 1)
        };
        let (mut i, mut j) = (index("row")?, index("column")?);
        let w = it
            .next()
            .ok_or_else(|| CliError::parse(line, "missing value"))?;
        let v: f64 = w
            .parse()
            .map_err(|_| CliError::parse(line, format!("bad value '{w}'")))?;
        if !v.is_finite() {
            return Err(CliError::parse(line, format!("non-finite value '{w}'")));
        }
        if it.next().is_some() {
            return Err(CliError::parse(line, "trailing fields"));
        }
        if symmetry == Symmetry::Symmetric && i < j {
            std::mem::swap(&mut i, &mut j);
        }
        if entries.insert((i, j), v).is_some() {
            return Err(CliError::parse(
                line,
                format!("duplicate entry ({}, {})", i + 1, j + 1),
            ));
        }
    }
    if entries.len() != nnz {
        return Err(CliError::parse(
            last_line,
            format!("expected {nnz} entries, found {}", entries.len()),
        ));
    }

    let mut upper = Vec::new();
    for (&(i, j), &v) in &entries {
        match symmetry {
            Symmetry::Symmetric => upper.push((j, i, v)),
            Symmetry::General if i == j => upper.push((i, j, v)),
            Symmetry::General => {
                let mirror = entries.get(&(j, i)).copied().unwrap_or(0.0);
                if mirror != v {
                    return Err(CliError::AsymmetricInput {
                        row: i + 1,
                        col: j + 1,
                    });
                }
                if i < j {
                    upper.push((i, j, v));
                }
            }
        }
    }
    Ok(SymmetricSparse::from_triplets(n, &upper)?)
}

pub fn read_matrix_market(path: &Path) -> Result<SymmetricSparse> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_matrix_market(&text)
}

/// Symmetric coordinate format, lower triangle, 17 significant digits.
pub fn format_matrix_market(a: &SymmetricSparse) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate real symmetric\n");
    let _ = writeln!(out, "{} {} {}", a.n(), a.n(), a.nnz_upper());
    let mut lower: Vec<(usize, usize, f64)> =
        a.entries().iter().map(|&(r, c, v)| (c, r, v)).collect();
    lower.sort_by_key(|&(r, c, _)| (c, r));
    for (r, c, v) in lower {
        let _ = writeln!(out, "{} {} {:.16e}", r + 1, c + 1, v);
    }
    out
}

pub fn write_matrix_market(a: &SymmetricSparse, path: &Path) -> Result<()> {
    std::fs::write(path, format_matrix_market(a)).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_small_symmetric_file() {
        let a = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real symmetric\n% comment\n2 2 3\n1 1 2\n2 1 -1\n2 2 2\n",
        )
        .unwrap();
        assert_eq!(a.to_dense(), vec![2.0, -1.0, -1.0, 2.0]);
    }

    #[test]
    fn empty_entry_list_is_zero_matrix() {
        let a = parse_matrix_market("%%MatrixMarket matrix coordinate real symmetric\n3 3 0\n")
            .unwrap();
        assert_eq!(a.n(), 3);
        assert_eq!(a.nnz_upper(), 0);
    }

    #[test]
    fn malformed_input_reports_line() {
        let bad_header = parse_matrix_market("%%MatrixMarket matrix array real general\n1 1\n1\n");
        assert!(matches!(bad_header, Err(CliError::Parse { line: 1, .. })));
        let bad_entry = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2\n3 1 1\n",
        );
        assert!(matches!(bad_entry, Err(CliError::Parse { line: 4, .. })));
        let short =
            parse_matrix_market("%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 2\n");
        assert!(matches!(short, Err(CliError::Parse { line: 3, .. })));
    }

    #[test]
    fn general_files_must_be_symmetric() {
        let ok = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real general\n2 2 4\n1 1 2\n1 2 -1\n2 1 -1\n2 2 2\n",
        )
        .unwrap();
        assert_eq!(ok.to_dense(), vec![2.0, -1.0, -1.0, 2.0]);
        let bad = parse_matrix_market(
            "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 2\n1 2 -1\n2 2 2\n",
        );
        assert!(matches!(
            bad,
            Err(CliError::AsymmetricInput { row: 1, col: 2 })
        ));
    }

    #[test]
    fn write_then_read_is_exact() {
        let a = SymmetricSparse::from_triplets(
            3,
            &[
                (0, 0, 0.1 + 0.2),
                (0, 2, -1.0 / 3.0),
                (1, 1, 1e-300),
                (2, 2, 7.0),
            ],
        )
        .unwrap();
        let b = parse_matrix_market(&format_matrix_market(&a)).unwrap();
        assert_eq!(a.entries(), b.entries());
    }
}
