//! Unit-suffixed quantity strings such as `"10 T"`, `"150 MHz"` or
//! `"0.44e24 cm^-3"`.
//!
//! A quantity is a decimal number, whitespace, and a unit from the table of its
//! dimension. Power-of-ten prefixes are applied to the decimal exponent before
//! the number is parsed, so `"0.44e24 cm^-3"` yields exactly the same `f64` as
//! the literal `0.44e30`. Units that carry a non-decimal factor (2π for
//! gyromagnetic ratios in Hz/T, e/h for energies quoted as frequencies) are
//! applied as one final multiplication.

use std::f64::consts::PI;
use std::fmt;

use crate::constants::{ELEMENTARY_CHARGE, PLANCK};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    MagneticField,
    Temperature,
    /// Ordinary frequency, Hz. Energies are accepted and divided by h.
    Frequency,
    Time,
    NumberDensity,
    Area,
    /// Events per second.
    Rate,
    /// rad s⁻¹ T⁻¹.
    GyromagneticRatio,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Dimension::MagneticField => "magnetic field",
            Dimension::Temperature => "temperature",
            Dimension::Frequency => "frequency",
            Dimension::Time => "time",
            Dimension::NumberDensity => "number density",
            Dimension::Area => "area",
            Dimension::Rate => "rate",
            Dimension::GyromagneticRatio => "gyromagnetic ratio",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy)]
struct UnitDef {
    symbol: &'static str,
    exponent: i32,
    factor: Option<f64>,
}

const fn unit(symbol: &'static str, exponent: i32) -> UnitDef {
    UnitDef {
        symbol,
        exponent,
        factor: None,
    }
}

const fn scaled(symbol: &'static str, exponent: i32, factor: f64) -> UnitDef {
    UnitDef {
        symbol,
        exponent,
        factor: Some(factor),
    }
}

const EV_TO_HZ: f64 = ELEMENTARY_CHARGE / PLANCK;

fn table(dim: Dimension) -> &'static [UnitDef] {
    const MAGNETIC: &[UnitDef] = &[unit("T", 0), unit("mT", -3), unit("G", -4)];
    const TEMPERATURE: &[UnitDef] = &[unit("K", 0), unit("mK", -3)];
    const FREQUENCY: &[UnitDef] = &[
        unit("Hz", 0),
        unit("kHz", 3),
        unit("MHz", 6),
        unit("GHz", 9),
        unit("THz", 12),
        scaled("eV", 0, EV_TO_HZ),
        scaled("meV", -3, EV_TO_HZ),
        scaled("ueV", -6, EV_TO_HZ),
        scaled("µeV", -6, EV_TO_HZ),
    ];
    const TIME: &[UnitDef] = &[
        unit("s", 0),
        unit("ms", -3),
        unit("us", -6),
        unit("µs", -6),
        unit("ns", -9),
        unit("ps", -12),
        scaled("min", 0, 60.0),
        scaled("h", 0, 3600.0),
    ];
    const DENSITY: &[UnitDef] = &[unit("m^-3", 0), unit("cm^-3", 6)];
    const AREA: &[UnitDef] = &[unit("m^2", 0), unit("cm^2", -4), unit("nm^2", -18)];
    const RATE: &[UnitDef] = &[
        unit("/s", 0),
        unit("s^-1", 0),
        unit("Hz", 0),
        unit("kHz", 3),
        unit("MHz", 6),
    ];
    const GYRO: &[UnitDef] = &[
        unit("rad/s/T", 0),
        scaled("Hz/T", 0, 2.0 * PI),
        scaled("kHz/T", 3, 2.0 * PI),
        scaled("MHz/T", 6, 2.0 * PI),
    ];
    match dim {
        Dimension::MagneticField => MAGNETIC,
        Dimension::Temperature => TEMPERATURE,
        Dimension::Frequency => FREQUENCY,
        Dimension::Time => TIME,
        Dimension::NumberDensity => DENSITY,
        Dimension::Area => AREA,
        Dimension::Rate => RATE,
        Dimension::GyromagneticRatio => GYRO,
    }
}

/// Accepted unit symbols for a dimension.
pub fn units_for(dim: Dimension) -> Vec<&'static str> {
    table(dim).iter().map(|u| u.symbol).collect()
}

/// Shifts the decimal exponent of a float literal by `shift` and parses it.
fn parse_shifted(number: &str, shift: i32) -> Option<f64> {
    let (mantissa, exponent) = match number.find(['e', 'E']) {
        Some(i) => (&number[..i], number[i + 1..].parse::<i32>().ok()?),
        None => (number, 0),
    };
    if mantissa.is_empty()
        || !mantissa
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '+' | '-'))
    {
        return None;
    }
    format!("{mantissa}e{}", exponent.checked_add(shift)?).parse().ok()
}

/// Parses `"<number> <unit>"` into the SI value for `dim`. `key` only labels errors.
pub fn parse_quantity(key: &str, text: &str, dim: Dimension) -> Result<f64> {
    let err = |reason: String| Error::Unit {
        key: key.to_string(),
        reason,
    };
    let text = text.trim();
    let (number, symbol) = text.split_once(char::is_whitespace).ok_or_else(|| {
        err(format!(
            "`{text}` has no unit; expected `<number> <unit>` with unit one of {:?}",
            units_for(dim)
        ))
    })?;
    let symbol = symbol.trim();
    let def = table(dim).iter().find(|u| u.symbol == symbol).ok_or_else(|| {
        err(format!(
            "unknown {dim} unit `{symbol}`; expected one of {:?}",
            units_for(dim)
        ))
    })?;
    let value = parse_shifted(number, def.exponent).ok_or_else(|| err(format!("`{number}` is not a number")))?;
    let value = def.factor.map_or(value, |f| value * f);
    if !value.is_finite() {
        return Err(err(format!("`{text}` is not finite")));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exact_decimal_scaling() {
        assert_eq!(
            parse_quantity("psi0_sq", "0.44e24 cm^-3", Dimension::NumberDensity).unwrap(),
            0.44e30
        );
        assert_eq!(parse_quantity("x", "4e-11 cm^2", Dimension::Area).unwrap(), 4e-15);
        assert_eq!(parse_quantity("x", "150 MHz", Dimension::Frequency).unwrap(), 150e6);
        assert_eq!(parse_quantity("x", "300 ns", Dimension::Time).unwrap(), 300e-9);
        assert_eq!(parse_quantity("x", "2 ms", Dimension::Time).unwrap(), 2e-3);
        assert_eq!(parse_quantity("x", "10 T", Dimension::MagneticField).unwrap(), 10.0);
        assert_eq!(parse_quantity("x", "  4 K ", Dimension::Temperature).unwrap(), 4.0);
        assert_eq!(parse_quantity("x", "1.5E2 mK", Dimension::Temperature).unwrap(), 0.15);
    }

    #[test]
    fn non_decimal_factors() {
        let gamma = parse_quantity("gamma_n", "17.235 MHz/T", Dimension::GyromagneticRatio).unwrap();
        assert_eq!(gamma, 17.235e6 * 2.0 * PI);
        let hz = parse_quantity("x", "1.2 meV", Dimension::Frequency).unwrap();
        assert!((hz / 290.2e9 - 1.0).abs() < 1e-3, "{hz}");
        assert_eq!(parse_quantity("x", "30 s", Dimension::Time).unwrap(), 30.0);
        assert_eq!(parse_quantity("x", "5 h", Dimension::Time).unwrap(), 18000.0);
    }

    #[test]
    fn rejects_missing_or_foreign_units() {
        assert!(parse_quantity("b_field", "10", Dimension::MagneticField).is_err());
        assert!(parse_quantity("b_field", "10 K", Dimension::MagneticField).is_err());
        assert!(parse_quantity("linewidth", "150 rad/s", Dimension::Frequency).is_err());
        assert!(parse_quantity("x", "ten T", Dimension::MagneticField).is_err());
        assert!(parse_quantity("x", "1e400 T", Dimension::MagneticField).is_err());
        let msg = parse_quantity("b_field", "10", Dimension::MagneticField)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("b_field"), "{msg}");
    }

    proptest! {
        #[test]
        fn prefix_matches_literal(mantissa in 1u32..100_000, exp in -20i32..20) {
            let text = format!("{mantissa}e{exp} MHz");
            let parsed = parse_quantity("x", &text, Dimension::Frequency).unwrap();
            let literal: f64 = format!("{mantissa}e{}", exp + 6).parse().unwrap();
            prop_assert_eq!(parsed, literal);
        }
    }
}
