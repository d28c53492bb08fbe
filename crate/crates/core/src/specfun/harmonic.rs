use super::SpecfunError;

fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c · (n − i) is divisible by (i + 1) after the multiplication
        c = c.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(c)
}

fn check_dimension(d: u32) -> Result<(), SpecfunError> {
    if d < 3 {
        return Err(SpecfunError::Dimension { d });
    }
    Ok(())
}

/// Dimension d_l of the space of degree-l spherical harmonics on S^{d−1}.
pub fn harmonic_dim(d: u32, l: u32) -> Result<u64, SpecfunError> {
    check_dimension(d)?;
    let (d64, l64) = (u64::from(d), u64::from(l));
    let overflow = SpecfunError::Overflow { d, l };
    let head = binomial(l64 + d64 - 1, l64).ok_or(overflow.clone())?;
    let tail = if l >= 2 {
        binomial(l64 + d64 - 3, l64 - 2).ok_or(overflow.clone())?
    } else {
        0
    };
    u64::try_from(head - tail).map_err(|_| overflow)
}

/// κ(L) = Σ_{l ≤ L} d_l.
pub fn cumulative_harmonic_dim(d: u32, big_l: u32) -> Result<u64, SpecfunError> {
    let mut total: u64 = 0;
    for l in 0..=big_l {
        total = total
            .checked_add(harmonic_dim(d, l)?)
            .ok_or(SpecfunError::Overflow { d, l })?;
    }
    Ok(total)
}
