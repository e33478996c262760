//! Exact integer parsing that also takes scientific notation (`1e14`, `2.5e3`).

pub fn parse_u128(s: &str) -> Result<u128, String> {
    let t = s.trim().replace('_', "");
    let bad = || format!("`{s}` is not a non-negative integer");
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: u32 = t[i + 1..]
                .strip_prefix('+')
                .unwrap_or(&t[i + 1..])
                .parse()
                .map_err(|_| bad())?;
            (&t[..i], e)
        }
        None => (&t[..], 0),
    };
    let (int, frac) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b.trim_end_matches('0')),
        None => (mantissa, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let scale = exp
        .checked_sub(frac.len() as u32)
        .ok_or_else(|| format!("`{s}` is not an integer"))?;
    let digits = format!("{int}{frac}");
    let base: u128 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| format!("`{s}` is too large"))?
    };
    10u128
        .checked_pow(scale)
        .and_then(|m| base.checked_mul(m))
        .ok_or_else(|| format!("`{s}` is too large"))
}

pub fn parse_u64(s: &str) -> Result<u64, String> {
    parse_u128(s)?
        .try_into()
        .map_err(|_| format!("`{s}` does not fit in 64 bits"))
}

pub fn parse_usize(s: &str) -> Result<usize, String> {
    parse_u128(s)?
        .try_into()
        .map_err(|_| format!("`{s}` is too large"))
}

pub fn parse_u16(s: &str) -> Result<u16, String> {
    parse_u128(s)?
        .try_into()
        .map_err(|_| format!("`{s}` does not fit in 16 bits"))
}
