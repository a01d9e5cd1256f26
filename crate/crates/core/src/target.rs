//! Target detection rate `α`, kept exact so that `⌈α n⌉` has no rounding error.

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::strategies::Rational;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Alpha {
    value: f64,
    exact: Rational,
}

impl Alpha {
    /// Reads `value` as the decimal it prints as, so `0.1` is exactly `1/10`.
    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidAlpha(value.to_string()));
        }
        let exact = decimal_ratio(&value.to_string())
            .or_else(|| Rational::approximate_float(value))
            .ok_or_else(|| Error::InvalidAlpha(value.to_string()))?;
        Ok(Alpha { value, exact })
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidAlpha(format!("{num}/{den}")));
        }
        let exact = Rational::new(num, den);
        if exact < Rational::zero() || exact > Rational::from_integer(1) {
            return Err(Error::InvalidAlpha(format!("{num}/{den}")));
        }
        Ok(Alpha {
            value: exact.to_f64().unwrap_or(f64::NAN),
            exact,
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Rational {
        self.exact
    }

    /// `⌈α·n⌉`.
    pub fn ceil_times(&self, n: usize) -> usize {
        let x = self.exact * Rational::from_integer(n as i64);
        Integer::div_ceil(x.numer(), x.denom()) as usize
    }
}

impl Serialize for Alpha {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value)
    }
}

fn decimal_ratio(text: &str) -> Option<Rational> {
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 17 || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let den = 10i64.checked_pow(frac.len() as u32)?;
    let num = format!("{int}{frac}").parse::<i64>().ok()?;
    Some(Rational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ceilings_are_exact() {
        assert_eq!(Alpha::new(0.75).unwrap().ceil_times(4), 3);
        assert_eq!(Alpha::new(0.75).unwrap().ceil_times(3), 3);
        assert_eq!(Alpha::new(0.1).unwrap().ceil_times(10), 1);
        assert_eq!(Alpha::new(0.7).unwrap().ceil_times(10), 7);
        assert_eq!(Alpha::new(0.0).unwrap().ceil_times(7), 0);
        assert_eq!(Alpha::new(1.0).unwrap().ceil_times(7), 7);
        assert_eq!(Alpha::new(0.00001).unwrap().exact(), Rational::new(1, 100_000));
        assert_eq!(Alpha::from_ratio(2, 3).unwrap().ceil_times(6), 4);
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(Alpha::new(1.5).is_err());
        assert!(Alpha::new(-0.1).is_err());
        assert!(Alpha::new(f64::NAN).is_err());
        assert!(Alpha::from_ratio(3, 2).is_err());
    }
}
