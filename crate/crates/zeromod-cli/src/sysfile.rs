//! System files: the JSON schema plus an exact rational mirror kept when
//! every entry is an integer, an integral float, or a "p/q" string.

use std::path::Path;

use num_complex::Complex64;
use polyoracle::{parse_rat, Rat, RatMatrix, RationalStateSpace};
use zeromod::matrix::Matrix;
use zeromod::StateSpace;

pub struct SystemFile {
    pub ss: StateSpace,
    pub rational: Option<RationalStateSpace>,
}

pub enum LoadError {
    Parse(String),
}

impl LoadError {
    pub fn message(&self) -> &str {
        match self {
            LoadError::Parse(m) => m,
        }
    }
}

fn parse_entry(v: &serde_json::Value) -> Result<(Complex64, Option<Rat>), String> {
    match v {
        serde_json::Value::Number(n) => {
            let x = n.as_f64().ok_or("entry is not a finite number")?;
            if !x.is_finite() {
                return Err("NaN/Inf entries are rejected".into());
            }
            let rat = if x.fract() == 0.0 && x.abs() < 9.0e15 {
                Some(polyoracle::rat_int(x as i64))
            } else {
                None
            };
            Ok((Complex64::new(x, 0.0), rat))
        }
        serde_json::Value::String(s) => {
            let r = parse_rat(s).ok_or_else(|| format!("cannot parse rational {s:?}"))?;
            let x = polyoracle::rat_to_f64(&r);
            if !x.is_finite() {
                return Err(format!("rational {s:?} overflows binary64"));
            }
            Ok((Complex64::new(x, 0.0), Some(r)))
        }
        serde_json::Value::Array(items) if items.len() == 2 => {
            let re = items[0].as_f64().ok_or("bad real part")?;
            let im = items[1].as_f64().ok_or("bad imaginary part")?;
            if !re.is_finite() || !im.is_finite() {
                return Err("NaN/Inf entries are rejected".into());
            }
            let rat = if im == 0.0 && re.fract() == 0.0 && re.abs() < 9.0e15 {
                Some(polyoracle::rat_int(re as i64))
            } else {
                None
            };
            Ok((Complex64::new(re, im), rat))
        }
        other => Err(format!("bad entry {other}")),
    }
}

fn parse_block(
    v: &serde_json::Value,
    name: &str,
) -> Result<(Matrix, Option<Vec<Vec<Rat>>>), String> {
    let rows = v
        .get(name)
        .and_then(|b| b.as_array())
        .ok_or_else(|| format!("missing matrix {name:?}"))?;
    let mut float_rows: Vec<Vec<Complex64>> = Vec::new();
    let mut rat_rows: Option<Vec<Vec<Rat>>> = Some(Vec::new());
    let width = rows
        .first()
        .and_then(|r| r.as_array())
        .map(|r| r.len())
        .unwrap_or(0);
    for row in rows {
        let row = row
            .as_array()
            .ok_or_else(|| format!("{name}: row is not an array"))?;
        if row.len() != width {
            return Err(format!("{name}: ragged rows"));
        }
        let mut frow = Vec::new();
        let mut rrow = Vec::new();
        for e in row {
            let (z, r) = parse_entry(e).map_err(|m| format!("{name}: {m}"))?;
            frow.push(z);
            match (&mut rat_rows, r) {
                (Some(_), Some(rat)) => rrow.push(rat),
                _ => rat_rows = None,
            }
        }
        float_rows.push(frow);
        if let Some(acc) = &mut rat_rows {
            acc.push(rrow);
        }
    }
    Ok((Matrix::from_rows(&float_rows), rat_rows))
}

pub fn load(path: &Path) -> Result<SystemFile, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| LoadError::Parse(format!("cannot read {}: {e}", path.display())))?;
    let v: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| LoadError::Parse(format!("bad JSON: {e}")))?;
    let (a, ra) = parse_block(&v, "A").map_err(LoadError::Parse)?;
    let (b, rb) = parse_block(&v, "B").map_err(LoadError::Parse)?;
    let (c, rc) = parse_block(&v, "C").map_err(LoadError::Parse)?;
    let (d, rd) = parse_block(&v, "D").map_err(LoadError::Parse)?;
    let ss = zeromod::ss::assemble_system(a, b, c, d).map_err(|e| LoadError::Parse(e.to_string()))?;

    let rational = match (ra, rb, rc, rd) {
        (Some(ra), Some(rb), Some(rc), Some(rd)) => {
            let to_mat = |rows: Vec<Vec<Rat>>, nr: usize, nc: usize| {
                if rows.is_empty() || rows[0].is_empty() {
                    RatMatrix::zeros(nr, nc)
                } else {
                    RatMatrix::from_rows(rows)
                }
            };
            RationalStateSpace::new(
                to_mat(ra, ss.order(), ss.order()),
                to_mat(rb, ss.order(), ss.inputs()),
                to_mat(rc, ss.outputs(), ss.order()),
                to_mat(rd, ss.outputs(), ss.inputs()),
            )
        }
        _ => None,
    };
    Ok(SystemFile { ss, rational })
}
