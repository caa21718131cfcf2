//! Parsers for list and range arguments.

use std::str::FromStr;

use qzcpd::cpd::Method;

/// `a:b` (inclusive, step 1), `a:b:step`, or a comma list, of integers.
pub fn usize_list(s: &str) -> Result<Vec<usize>, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let int = |p: &str| p.parse::<usize>().map_err(|e| format!("`{p}`: {e}"));
    match parts.as_slice() {
        [single] => single.split(',').map(|p| int(p.trim())).collect(),
        [a, b] | [a, b, _] => {
            let (a, b) = (int(a)?, int(b)?);
            let step = if parts.len() == 3 { int(parts[2])? } else { 1 };
            if step == 0 || a > b {
                return Err(format!("empty range `{s}`"));
            }
            Ok((a..=b).step_by(step).collect())
        }
        _ => Err(format!("cannot parse range `{s}`")),
    }
}

fn snr(p: &str) -> Result<f64, String> {
    let p = p.trim();
    let v = match p.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => f64::INFINITY,
        _ => p.parse::<f64>().map_err(|e| format!("`{p}`: {e}"))?,
    };
    if v.is_nan() || v == f64::NEG_INFINITY {
        return Err(format!("invalid SNR `{p}`"));
    }
    Ok(v)
}

/// `a:b:step` (inclusive) or a comma list of dB values; `inf` means noiseless.
pub fn snr_list(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [single] => single.split(',').map(snr).collect(),
        [a, b, step] => {
            let (a, b, step) = (snr(a)?, snr(b)?, snr(step)?);
            if !(step > 0.0) || !a.is_finite() || !b.is_finite() || a > b {
                return Err(format!("empty or unbounded range `{s}`"));
            }
            let n = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| a + i as f64 * step).collect())
        }
        _ => Err(format!("expected a list or START:STOP:STEP, got `{s}`")),
    }
}

pub fn method_list(s: &str) -> Result<Vec<Method>, String> {
    let methods = s.split(',').map(Method::from_str).collect::<Result<Vec<_>, _>>()?;
    if methods.is_empty() {
        return Err("no methods given".into());
    }
    Ok(methods)
}

/// Extents as `40`, `40,40,30` or `40x40x30`. A single extent is repeated
/// `order` times.
pub fn dims(s: &str, order: usize) -> Result<Vec<usize>, String> {
    let dims = s
        .split([',', 'x'])
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    match dims.len() {
        1 => Ok(vec![dims[0]; order]),
        n if n == order => Ok(dims),
        n => Err(format!("{n} extents given for a tensor of order {order}")),
    }
}
