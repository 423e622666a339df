use crate::error::{Result, StretchError};

/// Relative slack below `n - 1` tolerated as rounding.
const STRETCH_TOLERANCE: f64 = 1e-9;

/// Bounds on `pld(L_G)` from `pld(L_H)` and `st = st_H(G)`, valid when
/// `L_H <= L_G`:
/// `pld_H + ln(st - n + 2) <= pld_G <= pld_H + (n - 1) ln(st / (n - 1))`.
pub fn pld_bounds_from_stretch(pld_h: f64, st: f64, n: usize) -> Result<(f64, f64)> {
    if n <= 1 {
        return Ok((pld_h, pld_h));
    }
    let m = (n - 1) as f64;
    if !(st >= m * (1.0 - STRETCH_TOLERANCE)) {
        return Err(StretchError::StretchBelowMinimum { st, minimum: m });
    }
    let st = st.max(m);
    let lower = pld_h + (st - m + 1.0).ln();
    let upper = pld_h + m * (st / m).ln();
    Ok((lower, upper.max(lower)))
}
