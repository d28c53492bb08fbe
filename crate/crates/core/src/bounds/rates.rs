use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::kernelmodel::{RegularityClass, RegularityTag};
use crate::scalar::ExactField;

use super::BoundsError;

/// δ rows of the tabulated H1 rates.
pub const TABLE_DELTAS: [i64; 5] = [4, 5, 6, 7, 8];
/// β columns in tenths: 0, 0.1, …, 0.9.
pub const TABLE_BETAS: [i64; 10] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9];

/// Exponent h with |λ_i(T_n) − λ_i| ≲ n^h at i = n^β under H1(δ, s).
///
/// s = 0 gives h = β(−δ + ½) − ½. For s ≥ 1 the row of B(i, n) is chosen by comparing β with
/// ((δ−1)/δ)/(2s+1) and 1/(2s), and h = β·(exponent of i in that row) − ½.
pub fn rate_exponent_exact<F: ExactField>(delta: F, s: u32, beta: F) -> F {
    let one = F::int(1);
    let half = one.clone() / F::int(2);
    let s_f = F::int(i64::from(s));
    let i_exponent = if s == 0 {
        half.clone() - delta
    } else {
        let ratio = (delta.clone() - one.clone()) / delta.clone();
        let first = ratio.clone() / F::int(2 * i64::from(s) + 1);
        let second = one.clone() / F::int(2 * i64::from(s));
        let s_half = s_f.clone() + half.clone();
        if beta <= first {
            delta.clone() / (delta.clone() - one.clone()) * s_half - delta
        } else if beta <= second {
            one - delta + ratio * s_half
        } else {
            s_f + one - delta
        }
    };
    beta * i_exponent - half
}

/// Floating-point rate exponent for an H1 class. Inputs are snapped to nine decimals and the
/// formula is evaluated in rationals, so decimal grids print without rounding noise.
pub fn rate_exponent(reg: RegularityClass, beta: f64) -> Result<f64, BoundsError> {
    Ok(exact_cell(reg, beta)?.to_f64().expect("finite ratio"))
}

fn exact_cell(reg: RegularityClass, beta: f64) -> Result<Ratio<i128>, BoundsError> {
    if reg.tag != RegularityTag::H1 {
        return Err(BoundsError::Constraint(format!(
            "rate exponents are polynomial in n only under H1, got {:?}",
            reg.tag
        )));
    }
    reg.validate()?;
    if !(0.0..1.0).contains(&beta) {
        return Err(BoundsError::Constraint(format!("0 ≤ β < 1 violated: β = {beta}")));
    }
    Ok(rate_exponent_exact(decimal(reg.delta)?, reg.s, decimal(beta)?))
}

fn decimal(x: f64) -> Result<Ratio<i128>, BoundsError> {
    const SCALE: f64 = 1e9;
    let scaled = (x * SCALE).round();
    if !scaled.is_finite() || scaled.abs() > 1e27 {
        return Err(BoundsError::Constraint(format!("{x} is out of range for exact rates")));
    }
    Ok(Ratio::new(scaled as i128, SCALE as i128))
}

/// One entry of a rate table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateCell {
    pub delta: f64,
    pub s: u32,
    pub beta: f64,
    pub h: f64,
    /// h as a reduced fraction.
    pub exact: String,
}

/// Rate exponents for every (class, β) pair, row-major over the classes.
pub fn rate_table(classes: &[RegularityClass], betas: &[f64]) -> Result<Vec<Vec<RateCell>>, BoundsError> {
    classes
        .iter()
        .map(|c| {
            betas
                .iter()
                .map(|&beta| {
                    let h = exact_cell(*c, beta)?;
                    Ok(RateCell {
                        delta: c.delta,
                        s: c.s,
                        beta,
                        h: h.to_f64().expect("finite ratio"),
                        exact: h.to_string(),
                    })
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    /// The published s = 0 table, in hundredths.
    const TABLE: [[i64; 10]; 5] = [
        [-50, -85, -120, -155, -190, -225, -260, -295, -330, -365],
        [-50, -95, -140, -185, -230, -275, -320, -365, -410, -455],
        [-50, -105, -160, -215, -270, -325, -380, -435, -490, -545],
        [-50, -115, -180, -245, -310, -375, -440, -505, -570, -635],
        [-50, -125, -200, -275, -350, -425, -500, -575, -650, -725],
    ];

    #[test]
    fn reproduces_all_fifty_cells_exactly() {
        for (row, &delta) in TABLE_DELTAS.iter().enumerate() {
            for (col, &tenths) in TABLE_BETAS.iter().enumerate() {
                let h = rate_exponent_exact(Rational::from_integer(delta), 0, r(tenths, 10));
                assert_eq!(h, r(TABLE[row][col], 100), "δ = {delta}, β = {tenths}/10");
            }
        }
    }

    #[test]
    fn float_wrapper() {
        let c = |delta| RegularityClass { tag: RegularityTag::H1, delta, s: 0 };
        assert_eq!(rate_exponent(c(4.0), 0.5).unwrap(), -2.25);
        assert_eq!(rate_exponent(c(8.0), 0.9).unwrap(), -7.25);
        assert_eq!(rate_exponent(c(6.0), 0.0).unwrap(), -0.5);
        assert_eq!(rate_exponent(c(5.0), 0.4).unwrap(), -2.3);
        let h2 = RegularityClass { tag: RegularityTag::H2, delta: 1.0, s: 0 };
        assert!(rate_exponent(h2, 0.5).is_err());
        assert!(rate_exponent(c(4.0), 1.0).is_err());
    }

    #[test]
    fn s_one_rows_follow_the_rate_formulas() {
        // δ = 4, s = 1: breakpoints β = 1/4 and 1/2
        let d = Rational::from_integer(4);
        assert_eq!(rate_exponent_exact(d, 1, r(1, 10)), r(-7, 10));
        // second row: −δ + 1 + (3/4)(3/2) = −15/8
        assert_eq!(rate_exponent_exact(d, 1, r(3, 10)), r(3, 10) * r(-15, 8) - r(1, 2));
        // third row: −δ + s + 1 = −2
        assert_eq!(rate_exponent_exact(d, 1, r(6, 10)), r(-17, 10));
        // the float type goes through the same code
        assert!((rate_exponent_exact(4.0f64, 1, 0.1) + 0.7).abs() < 1e-15);
    }

    #[test]
    fn table_cells_carry_fractions() {
        let classes: Vec<RegularityClass> = TABLE_DELTAS
            .iter()
            .map(|&d| RegularityClass { tag: RegularityTag::H1, delta: d as f64, s: 0 })
            .collect();
        let betas: Vec<f64> = TABLE_BETAS.iter().map(|&t| t as f64 / 10.0).collect();
        let t = rate_table(&classes, &betas).unwrap();
        assert_eq!(t.len(), 5);
        assert!(t.iter().all(|row| row[0].h == -0.5));
        assert_eq!(t[0][5].exact, "-9/4");
        assert_eq!(t[1][4].h, -2.3);
    }
}
