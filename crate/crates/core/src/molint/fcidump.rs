//! FCIDUMP reader and writer. Integrals on disk are chemists' `(ij|kl)` with
//! 1-based indices; in memory they are physicists' `<ik|jl>`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use super::integral_set::IntegralSet;
use crate::error::{Error, Result};
use crate::tensor::Tensor4;

fn parse_value(tok: &str) -> Option<f64> {
    tok.replace(['D', 'd'], "E").parse().ok()
}

fn parse_header(text: &str) -> Result<BTreeMap<String, Vec<String>>> {
    let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut current: Option<String> = None;
    let cleaned = text.replace("&FCI", " ").replace("&fci", " ");
    for raw in cleaned.split([',', ' ', '\t', '\n', '\r']) {
        let tok = raw.trim();
        if tok.is_empty() {
            continue;
        }
        if let Some((key, value)) = tok.split_once('=') {
            let key = key.trim().to_ascii_uppercase();
            let entry = map.entry(key.clone()).or_default();
            if !value.trim().is_empty() {
                entry.push(value.trim().to_string());
            }
            current = Some(key);
        } else if let Some(key) = &current {
            map.get_mut(key).unwrap().push(tok.to_string());
        } else {
            return Err(Error::Fcidump(format!("unexpected header token '{tok}'")));
        }
    }
    Ok(map)
}

fn header_int(map: &BTreeMap<String, Vec<String>>, key: &str) -> Result<i64> {
    let v = map.get(key).and_then(|v| v.first()).ok_or_else(|| Error::Fcidump(format!("missing {key}")))?;
    v.parse().map_err(|_| Error::Fcidump(format!("{key} is not an integer: '{v}'")))
}

/// Parses FCIDUMP text. The header ends at `&END` or a line containing `/`.
pub fn parse_fcidump(text: &str) -> Result<IntegralSet> {
    let mut header = String::new();
    let mut body_start = None;
    for (k, line) in text.lines().enumerate() {
        let t = line.trim();
        let upper = t.to_ascii_uppercase();
        if upper.starts_with("&END") || t == "/" {
            body_start = Some(k + 1);
            break;
        }
        if let Some(idx) = upper.find("&END") {
            header.push_str(&t[..idx]);
            body_start = Some(k + 1);
            break;
        }
        header.push_str(t);
        header.push('\n');
    }
    let body_start = body_start.ok_or_else(|| Error::Fcidump("header not terminated by &END".into()))?;
    let map = parse_header(&header)?;
    let norb = header_int(&map, "NORB")?;
    let nelec = header_int(&map, "NELEC")?;
    let ms2 = map.get("MS2").and_then(|v| v.first()).map(|v| v.parse::<i64>().unwrap_or(0)).unwrap_or(0);
    if norb <= 0 {
        return Err(Error::Fcidump(format!("NORB = {norb}")));
    }
    if nelec < 0 || nelec % 2 != 0 {
        return Err(Error::Fcidump(format!("NELEC = {nelec} must be even (closed shell)")));
    }
    if ms2 != 0 {
        return Err(Error::Fcidump(format!("MS2 = {ms2}, only closed-shell dumps are supported")));
    }
    let n = norb as usize;
    let mut h = DMatrix::zeros(n, n);
    let mut chem = Tensor4::zeros(n);
    let mut core = 0.0;
    let mut eps = vec![0.0; n];
    let mut have_eps = false;
    for (k, line) in text.lines().enumerate().skip(body_start) {
        let line_no = k + 1;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 5 {
            return Err(Error::Parse { line: line_no, msg: format!("expected 'value i j k l', got '{t}'") });
        }
        let v = parse_value(fields[0])
            .ok_or_else(|| Error::Parse { line: line_no, msg: format!("bad value '{}'", fields[0]) })?;
        let mut idx = [0usize; 4];
        for c in 0..4 {
            let i: i64 = fields[c + 1]
                .parse()
                .map_err(|_| Error::Parse { line: line_no, msg: format!("bad index '{}'", fields[c + 1]) })?;
            if i < 0 || i > norb {
                return Err(Error::Fcidump(format!("index {i} out of range 0..={norb} at line {line_no}")));
            }
            idx[c] = i as usize;
        }
        match idx {
            [0, 0, 0, 0] => core = v,
            [i, 0, 0, 0] => {
                eps[i - 1] = v;
                have_eps = true;
            }
            [i, j, 0, 0] if i > 0 && j > 0 => {
                h[(i - 1, j - 1)] = v;
                h[(j - 1, i - 1)] = v;
            }
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                chem.set_chemist_8fold(i - 1, j - 1, k - 1, l - 1, v);
            }
            _ => return Err(Error::Fcidump(format!("malformed index pattern {idx:?} at line {line_no}"))),
        }
    }
    let mut set = IntegralSet::new(h, chem.swap_inner(), core, nelec as usize)?;
    if have_eps {
        set = set.with_orbital_energies(eps)?;
    }
    Ok(set)
}

pub fn read_fcidump(path: impl AsRef<Path>) -> Result<IntegralSet> {
    parse_fcidump(&std::fs::read_to_string(path)?)
}

// Fortran-style exponent with explicit sign and two digits, e.g. 5.0000000000000000E-01
fn fmt_value(v: f64) -> String {
    let s = format!("{v:.16e}");
    let (mant, exp) = s.split_once('e').unwrap();
    let e: i32 = exp.parse().unwrap();
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mant}E{sign}{:02}", e.abs())
}

/// Formats an integral set as FCIDUMP text. Every symmetry-unique entry is
/// written, including exact zeros of the one-body part, so a reread is exact.
pub fn format_fcidump(set: &IntegralSet) -> String {
    let n = set.n_orb();
    let mut out = String::new();
    let orbsym = vec!["1"; n].join(",");
    writeln!(out, "&FCI NORB={n},NELEC={},MS2=0,", set.n_electrons).unwrap();
    writeln!(out, "  ORBSYM={orbsym},").unwrap();
    writeln!(out, "  ISYM=1,").unwrap();
    writeln!(out, "&END").unwrap();
    let line = |out: &mut String, v: f64, i: usize, j: usize, k: usize, l: usize| {
        writeln!(out, "{:>24} {i:>4} {j:>4} {k:>4} {l:>4}", fmt_value(v)).unwrap();
    };
    // (ij|kl) with i>=j, k>=l, ij>=kl
    for i in 0..n {
        for j in 0..=i {
            let ij = i * (i + 1) / 2 + j;
            for k in 0..n {
                for l in 0..=k {
                    let kl = k * (k + 1) / 2 + l;
                    if kl > ij {
                        continue;
                    }
                    let v = set.g.get(i, k, j, l);
                    if v != 0.0 {
                        line(&mut out, v, i + 1, j + 1, k + 1, l + 1);
                    }
                }
            }
        }
    }
    for i in 0..n {
        for j in 0..=i {
            line(&mut out, set.h[(i, j)], i + 1, j + 1, 0, 0);
        }
    }
    if let Some(eps) = &set.orbital_energies {
        for (i, e) in eps.iter().enumerate() {
            line(&mut out, *e, i + 1, 0, 0, 0);
        }
    }
    line(&mut out, set.core_energy, 0, 0, 0, 0);
    out
}

pub fn write_fcidump(set: &IntegralSet, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_fcidump(set))?;
    Ok(())
}
