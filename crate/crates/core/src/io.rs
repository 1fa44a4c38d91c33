//! Interchange formats: the tensor text format for lattice arrays and the
//! JSON partition format with optional per-rectangle coefficients.
//!
//! Floats are written with Rust's shortest round-trip formatting, so files
//! parse back to the exact bit pattern and identical inputs always produce
//! identical bytes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Family, LatticeArray, Partition, Rect};
use crate::polyfit::FitResult;

/// Renders a lattice array: a `dims:` header line, then the values in
/// row-major order, one lattice row per line.
pub fn write_tensor(arr: &LatticeArray) -> String {
    let dims: Vec<String> = arr.dims().iter().map(|n| n.to_string()).collect();
    let mut out = format!("dims: {}\n", dims.join(" "));
    let row_len = *arr.dims().last().expect("nonempty dims");
    for chunk in arr.values().chunks(row_len) {
        let line: Vec<String> = chunk.iter().map(|v| format!("{v}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Parses the tensor text format: first line `dims: n1 n2 ... nd`, then
/// `N = n1 * ... * nd` whitespace-separated reals.
pub fn read_tensor(text: &str) -> Result<LatticeArray> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))?;
    let rest = header
        .strip_prefix("dims:")
        .ok_or_else(|| Error::Parse(format!("first line must start with 'dims:', got {header:?}")))?;
    let dims: Vec<usize> = rest
        .split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad dimension {tok:?} in header")))
        })
        .collect::<Result<_>>()?;
    if dims.is_empty() || dims.iter().any(|&n| n == 0) {
        return Err(Error::Parse(format!("dims must be positive, got {dims:?}")));
    }
    let expected: usize = dims.iter().product();
    let mut values = Vec::with_capacity(expected);
    for (lineno, line) in lines.enumerate() {
        for tok in line.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| {
                Error::Parse(format!("bad value {tok:?} on line {}", lineno + 2))
            })?;
            values.push(v);
        }
    }
    if values.len() != expected {
        return Err(Error::Parse(format!(
            "expected {expected} values for dims {dims:?}, found {}",
            values.len()
        )));
    }
    LatticeArray::new(dims, values)
}

#[derive(Serialize, Deserialize)]
struct RectJson {
    lo: Vec<usize>,
    hi: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeffs: Option<Vec<f64>>,
}

/// Partition as a JSON array of `{lo, hi}` objects, with per-rectangle
/// `coeffs` when supplied (aligned with the partition's rectangle order).
pub fn write_partition_json(p: &Partition, coeffs: Option<&[Vec<f64>]>) -> Result<String> {
    if let Some(c) = coeffs {
        if c.len() != p.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficient vectors for {} rectangles",
                c.len(),
                p.len()
            )));
        }
    }
    let objs: Vec<RectJson> = p
        .rects()
        .iter()
        .enumerate()
        .map(|(i, r)| RectJson {
            lo: r.lo().to_vec(),
            hi: r.hi().to_vec(),
            coeffs: coeffs.map(|c| c[i].clone()),
        })
        .collect();
    serde_json::to_string_pretty(&objs).map_err(|e| Error::Parse(e.to_string()))
}

/// Fitted-model convenience: the partition with its coefficient vectors.
pub fn write_fit_json(fit: &FitResult) -> Result<String> {
    write_partition_json(&fit.partition, Some(&fit.coeffs))
}

/// Parses the partition JSON against a root rectangle, returning the
/// validated partition and any coefficient vectors present.
pub fn read_partition_json(
    text: &str,
    root: Rect,
    family: Family,
) -> Result<(Partition, Vec<Option<Vec<f64>>>)> {
    let objs: Vec<RectJson> =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut rects = Vec::with_capacity(objs.len());
    let mut coeffs = Vec::with_capacity(objs.len());
    for o in objs {
        rects.push(Rect::new(o.lo, o.hi)?);
        coeffs.push(o.coeffs);
    }
    let p = Partition::new(root, rects, family)?;
    Ok((p, coeffs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tensor_round_trip() {
        let arr = LatticeArray::new(
            vec![2, 3],
            vec![0.1, -2.0, 3.5e-7, 4.0, 1.0 / 3.0, -0.0],
        )
        .unwrap();
        let text = write_tensor(&arr);
        assert!(text.starts_with("dims: 2 3\n"));
        let back = read_tensor(&text).unwrap();
        assert_eq!(back.dims(), arr.dims());
        assert_eq!(back.values(), arr.values());
    }

    #[test]
    fn tensor_parse_diagnostics() {
        assert!(matches!(read_tensor(""), Err(Error::Parse(_))));
        assert!(matches!(read_tensor("shape: 2 2\n1 2 3 4"), Err(Error::Parse(_))));
        assert!(matches!(read_tensor("dims: 2 2\n1 2 3"), Err(Error::Parse(_))));
        assert!(matches!(read_tensor("dims: 2 2\n1 2 3 x"), Err(Error::Parse(_))));
        assert!(matches!(read_tensor("dims: 0\n"), Err(Error::Parse(_))));
    }

    #[test]
    fn partition_json_round_trip() {
        let root = Rect::full(&[4, 4]);
        let (l, r) = root.dyadic_split(1).unwrap();
        let p = Partition::new(root.clone(), vec![l, r], Family::Rdp).unwrap();
        let coeffs = vec![vec![1.5], vec![-0.25]];
        let text = write_partition_json(&p, Some(&coeffs)).unwrap();
        let (back, back_coeffs) = read_partition_json(&text, root, Family::Rdp).unwrap();
        assert_eq!(back.rects(), p.rects());
        assert_eq!(back_coeffs[0].as_deref(), Some(&coeffs[0][..]));
        assert_eq!(back_coeffs[1].as_deref(), Some(&coeffs[1][..]));
    }
}
