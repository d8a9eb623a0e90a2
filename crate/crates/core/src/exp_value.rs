//! Exact values of the form `2^e * m`, used for witnesses far too large to
//! write out as numerals (for instance `2^(2^x * y)`).

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

/// Largest number of bits an [`ExpValue`] is allowed to expand to.
pub const DEFAULT_EXPANSION_BITS: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpValueError {
    #[error("value needs more than {limit} bits to expand")]
    TooLarge { limit: u64 },
    #[error("cannot parse exponential value `{0}`")]
    Parse(String),
}

/// An exact natural number, possibly given symbolically as a power of two or
/// a product.
#[derive(Clone, Debug)]
pub enum ExpValue {
    Num(BigUint),
    Pow2(BigUint),
    Prod(Vec<ExpValue>),
}

/// Canonical form `2^exponent * odd`. Zero is represented as `(0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub exponent: BigUint,
    pub odd: BigUint,
}

impl NormalForm {
    pub fn zero() -> Self {
        NormalForm { exponent: BigUint::zero(), odd: BigUint::zero() }
    }

    pub fn one() -> Self {
        NormalForm { exponent: BigUint::zero(), odd: BigUint::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.odd.is_zero()
    }

    pub fn from_biguint(n: &BigUint) -> Self {
        match n.trailing_zeros() {
            None => NormalForm::zero(),
            Some(tz) => NormalForm { exponent: BigUint::from(tz), odd: n >> tz },
        }
    }

    /// Upper bound on the bit length of the value, or `None` when the bit
    /// length itself does not fit in a `u64`.
    pub fn bit_len(&self) -> Option<u64> {
        if self.is_zero() {
            return Some(0);
        }
        self.exponent.to_u64()?.checked_add(self.odd.bits())
    }

    pub fn mul(&self, other: &NormalForm) -> NormalForm {
        if self.is_zero() || other.is_zero() {
            return NormalForm::zero();
        }
        NormalForm { exponent: &self.exponent + &other.exponent, odd: &self.odd * &other.odd }
    }

    pub fn to_biguint(&self, max_bits: u64) -> Result<BigUint, ExpValueError> {
        if self.is_zero() {
            return Ok(BigUint::zero());
        }
        match self.bit_len() {
            Some(bits) if bits <= max_bits => {
                let shift = self.exponent.to_u64().expect("bounded by bit_len");
                Ok(&self.odd << shift)
            }
            _ => Err(ExpValueError::TooLarge { limit: max_bits }),
        }
    }

    pub fn to_u64(&self) -> Option<u64> {
        if self.bit_len()? > 64 {
            return None;
        }
        self.to_biguint(64).ok()?.to_u64()
    }
}

impl ExpValue {
    pub fn num(n: u64) -> Self {
        ExpValue::Num(BigUint::from(n))
    }

    pub fn pow2(e: u64) -> Self {
        ExpValue::Pow2(BigUint::from(e))
    }

    /// `2^e * m`.
    pub fn scaled(e: impl Into<BigUint>, m: impl Into<BigUint>) -> Self {
        ExpValue::Prod(vec![ExpValue::Pow2(e.into()), ExpValue::Num(m.into())])
    }

    pub fn normal_form(&self) -> NormalForm {
        match self {
            ExpValue::Num(n) => NormalForm::from_biguint(n),
            ExpValue::Pow2(e) => NormalForm { exponent: e.clone(), odd: BigUint::one() },
            ExpValue::Prod(factors) => factors
                .iter()
                .fold(NormalForm::one(), |acc, f| acc.mul(&f.normal_form())),
        }
    }

    pub fn mul(&self, other: &ExpValue) -> ExpValue {
        let mut factors = Vec::new();
        for v in [self, other] {
            match v {
                ExpValue::Prod(fs) => factors.extend(fs.iter().cloned()),
                _ => factors.push(v.clone()),
            }
        }
        ExpValue::Prod(factors)
    }

    /// `self ^ exponent`, exact. Powers of two stay symbolic; anything with a
    /// nontrivial odd part is expanded and must fit in `max_bits`.
    pub fn pow(&self, exponent: &ExpValue, max_bits: u64) -> Result<ExpValue, ExpValueError> {
        let base = self.normal_form();
        let k = exponent.normal_form();
        if k.is_zero() {
            return Ok(ExpValue::num(1));
        }
        if base.is_zero() {
            return Ok(ExpValue::num(0));
        }
        // (2^e)^(2^s * t) = 2^(e * t * 2^s)
        let shift = k.exponent.to_u64().filter(|&s| s <= max_bits);
        let Some(shift) = shift else {
            return Err(ExpValueError::TooLarge { limit: max_bits });
        };
        if base.odd.is_one() {
            let e = (&base.exponent * &k.odd) << shift;
            return Ok(ExpValue::Pow2(e));
        }
        let k_full = k.to_biguint(64).map_err(|_| ExpValueError::TooLarge { limit: max_bits })?;
        let k_small = k_full.to_u32().ok_or(ExpValueError::TooLarge { limit: max_bits })?;
        let bits = base.bit_len().unwrap_or(u64::MAX).saturating_mul(k_small as u64);
        if bits > max_bits {
            return Err(ExpValueError::TooLarge { limit: max_bits });
        }
        Ok(ExpValue::Prod(vec![
            ExpValue::Pow2(&base.exponent * k_small),
            ExpValue::Num(base.odd.pow(k_small)),
        ]))
    }

    pub fn to_biguint(&self, max_bits: u64) -> Result<BigUint, ExpValueError> {
        self.normal_form().to_biguint(max_bits)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.normal_form().to_u64()
    }
}

impl From<u64> for ExpValue {
    fn from(n: u64) -> Self {
        ExpValue::num(n)
    }
}

impl From<BigUint> for ExpValue {
    fn from(n: BigUint) -> Self {
        ExpValue::Num(n)
    }
}

impl PartialEq for ExpValue {
    fn eq(&self, other: &Self) -> bool {
        self.normal_form() == other.normal_form()
    }
}

impl Eq for ExpValue {}

impl Hash for ExpValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.normal_form().hash(state);
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() || self.exponent.is_zero() {
            write!(f, "{}", self.odd)
        } else if self.odd.is_one() {
            write!(f, "2^{}", self.exponent)
        } else {
            write!(f, "2^{}*{}", self.exponent, self.odd)
        }
    }
}

impl fmt::Display for ExpValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExpValue::Num(n) => write!(f, "{n}"),
            ExpValue::Pow2(e) => write!(f, "2^{e}"),
            ExpValue::Prod(_) => {
                let nf = self.normal_form();
                match nf.to_u64() {
                    Some(n) => write!(f, "{n}"),
                    None => write!(f, "{nf}"),
                }
            }
        }
    }
}

impl FromStr for ExpValue {
    type Err = ExpValueError;

    /// Accepts `n`, `2^e` and `2^e*m`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || ExpValueError::Parse(s.to_string());
        let dec = |t: &str| -> Result<BigUint, ExpValueError> {
            let t = t.trim();
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            t.parse::<BigUint>().map_err(|_| err())
        };
        match s.strip_prefix("2^") {
            None => Ok(ExpValue::Num(dec(s)?)),
            Some(rest) => match rest.split_once('*') {
                None => Ok(ExpValue::Pow2(dec(rest)?)),
                Some((e, m)) => Ok(ExpValue::Prod(vec![
                    ExpValue::Pow2(dec(e)?),
                    ExpValue::Num(dec(m)?),
                ])),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normal_form_strips_twos() {
        let v = ExpValue::num(96);
        assert_eq!(v.normal_form(), NormalForm { exponent: 5u32.into(), odd: 3u32.into() });
        assert_eq!(ExpValue::scaled(5u32, 3u32), v);
        assert_eq!(ExpValue::scaled(3u32, 12u32), v);
    }

    #[test]
    fn pow_of_power_of_two_stays_symbolic() {
        let b = ExpValue::pow2(7);
        let a = ExpValue::pow2(10);
        let c = b.pow(&a, DEFAULT_EXPANSION_BITS).unwrap();
        assert_eq!(c, ExpValue::pow2(7168));
        assert_eq!(c.to_string(), "2^7168");
    }

    #[test]
    fn pow_with_odd_base_expands() {
        let c = ExpValue::num(3).pow(&ExpValue::num(4), 64).unwrap();
        assert_eq!(c.to_u64(), Some(81));
        let c = ExpValue::num(12).pow(&ExpValue::num(2), 64).unwrap();
        assert_eq!(c.to_u64(), Some(144));
        assert!(ExpValue::num(3).pow(&ExpValue::pow2(40), 64).is_err());
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(ExpValue::scaled(6u32, 24u32).to_string(), "1536");
        assert_eq!(ExpValue::scaled(70u32, 24u32).to_string(), "2^73*3");
        assert_eq!("2^9*3".parse::<ExpValue>().unwrap(), ExpValue::num(1536));
        assert_eq!("2^40".parse::<ExpValue>().unwrap(), ExpValue::pow2(40));
        assert!("2^x".parse::<ExpValue>().is_err());
        assert!("".parse::<ExpValue>().is_err());
        assert!("-3".parse::<ExpValue>().is_err());
    }

    #[test]
    fn zero_is_absorbing() {
        let z = ExpValue::num(0).mul(&ExpValue::pow2(5));
        assert_eq!(z, ExpValue::num(0));
        assert_eq!(z.to_string(), "0");
    }

    proptest! {
        #[test]
        fn num_round_trips_through_decimal(n in any::<u128>()) {
            let v = ExpValue::Num(BigUint::from(n));
            let back: ExpValue = v.to_string().parse().unwrap();
            prop_assert_eq!(back.to_biguint(128).unwrap(), BigUint::from(n));
        }

        #[test]
        fn normal_form_equality_matches_numeric(
            e1 in 0u32..10, m1 in 1u32..1024, e2 in 0u32..10, m2 in 1u32..1024,
        ) {
            let a = ExpValue::scaled(e1, m1);
            let b = ExpValue::scaled(e2, m2);
            let na = (1u64 << e1) * m1 as u64;
            let nb = (1u64 << e2) * m2 as u64;
            prop_assert_eq!(a == b, na == nb);
            prop_assert_eq!(a.to_u64(), Some(na));
        }
    }
}
