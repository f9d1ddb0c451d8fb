//! TOML input documents.
//!
//! Operator:
//!
//! ```toml
//! name = "KdV"
//! ell = 1
//! entries = [["D^3 + 2*u1*D + u1'"]]
//! ```
//!
//! `name` and `description` are accepted and ignored.
//!
//! Matrix: `matrix = [[1, 0], ["1/2", 3]]`.
//!
//! Polyvector field, one of `entries` (an operator, degree 1), `functional = "..."`,
//! `vector = ["...", ...]`, or `degree = k` with a `[components]` table whose keys are
//! one-based index tuples such as `"1,2"` and whose values are polynomials in
//! `l0, ..., lk`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Deserialize;
use varpois::expr::{parse_expr_in, parse_lambda_poly, parse_op_poly};
use varpois::{DiffPoly, Error, LocalFunctional, MatDiffOp, PolyVector, QMatrix, Rational};

use crate::Failure;

#[derive(Debug, Deserialize)]
struct Document {
    ell: Option<usize>,
    entries: Option<Vec<Vec<String>>>,
    matrix: Option<Vec<Vec<toml::Value>>>,
    functional: Option<String>,
    vector: Option<Vec<String>>,
    degree: Option<i32>,
    components: Option<BTreeMap<String, String>>,
}

fn read(path: &Path) -> Result<Document, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn in_file(path: &Path, e: Error) -> Failure {
    Failure::input(format!("{}: {e}", path.display()))
}

fn operator_from(path: &Path, ell: Option<usize>, rows: &[Vec<String>]) -> Result<MatDiffOp, Failure> {
    let n = rows.len();
    if let Some(ell) = ell {
        if ell != n {
            return Err(Failure::input(format!("{}: ell = {ell} but the matrix has {n} rows", path.display())));
        }
    }
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Failure::input(format!("{}: operator matrix must be square and nonempty", path.display())));
    }
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|e| parse_op_poly(e, Some(n))).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| in_file(path, e))?;
    MatDiffOp::from_rows(parsed).map_err(|e| in_file(path, e))
}

pub fn load_operator(path: &Path) -> Result<MatDiffOp, Failure> {
    let doc = read(path)?;
    let rows = doc
        .entries
        .ok_or_else(|| Failure::input(format!("{}: missing `entries`", path.display())))?;
    operator_from(path, doc.ell, &rows)
}

fn scalar(path: &Path, v: &toml::Value) -> Result<Rational, Failure> {
    let text = match v {
        toml::Value::Integer(i) => i.to_string(),
        toml::Value::String(s) => s.clone(),
        other => return Err(Failure::input(format!("{}: not a rational number: {other}", path.display()))),
    };
    let p = varpois::expr::parse_expr(&text).map_err(|e| in_file(path, e))?;
    p.as_constant()
        .ok_or_else(|| Failure::input(format!("{}: not a rational number: {text}", path.display())))
}

pub fn load_matrix(path: &Path) -> Result<QMatrix, Failure> {
    let doc = read(path)?;
    let rows = doc
        .matrix
        .ok_or_else(|| Failure::input(format!("{}: missing `matrix`", path.display())))?;
    let n = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != n) {
        return Err(Failure::input(format!("{}: ragged matrix", path.display())));
    }
    let parsed = rows
        .iter()
        .map(|r| r.iter().map(|v| scalar(path, v)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QMatrix::from_rows(parsed))
}

fn parse_tuple(path: &Path, key: &str, ell: usize) -> Result<Vec<usize>, Failure> {
    key.split(',')
        .map(|s| match s.trim().parse::<usize>() {
            Ok(i) if (1..=ell).contains(&i) => Ok(i - 1),
            _ => Err(Failure::input(format!("{}: bad index tuple `{key}`", path.display()))),
        })
        .collect()
}

pub fn load_polyvector(path: &Path) -> Result<PolyVector, Failure> {
    let doc = read(path)?;
    if let Some(rows) = &doc.entries {
        let op = operator_from(path, doc.ell, rows)?;
        return PolyVector::from_operator(&op).map_err(|e| in_file(path, e));
    }
    if let Some(v) = &doc.vector {
        let p = v
            .iter()
            .map(|e| parse_expr_in(e, v.len()))
            .collect::<Result<Vec<DiffPoly>, _>>()
            .map_err(|e| in_file(path, e))?;
        return Ok(PolyVector::from_vector(&p));
    }
    let ell = doc
        .ell
        .ok_or_else(|| Failure::input(format!("{}: missing `ell`", path.display())))?;
    if let Some(f) = &doc.functional {
        let p = parse_expr_in(f, ell).map_err(|e| in_file(path, e))?;
        return Ok(PolyVector::from_functional(ell, &LocalFunctional::new(p)));
    }
    let degree = doc
        .degree
        .ok_or_else(|| Failure::input(format!("{}: expected `entries`, `vector`, `functional` or `degree`", path.display())))?;
    if degree < 1 {
        return Err(Failure::input(format!("{}: use `functional` or `vector` below degree 1", path.display())));
    }
    let mut raw = Vec::new();
    for (key, text) in doc.components.unwrap_or_default() {
        let t = parse_tuple(path, &key, ell)?;
        if t.len() != (degree + 1) as usize {
            return Err(Failure::input(format!("{}: tuple `{key}` needs {} indices", path.display(), degree + 1)));
        }
        let p = parse_lambda_poly(&text, (degree + 1) as usize, Some(ell)).map_err(|e| in_file(path, e))?;
        raw.push((t, p));
    }
    let p = PolyVector::from_raw(ell, degree, raw);
    if !p.is_skewsymmetric() {
        return Err(Failure::input(format!("{}: components are not skewsymmetric", path.display())));
    }
    Ok(p)
}
