//! Exact rational coordinates.

use crate::error::CoreError;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational number used for every grid coordinate.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parse `"a"` or `"a/b"`.
pub fn parse_q(s: &str) -> Result<Q, CoreError> {
    let s = s.trim();
    let bad = || CoreError::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        None => s.parse::<BigInt>().map(Q::from_integer).map_err(|_| bad()),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
    }
}

/// Canonical `"num/den"` form with a positive denominator.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Largest `g > 0` such that every value is an integer multiple of `g`; `None` if all are zero.
pub fn rational_gcd<'a>(values: impl IntoIterator<Item = &'a Q>) -> Option<Q> {
    let mut acc: Option<Q> = None;
    for v in values {
        if v.is_zero() {
            continue;
        }
        let v = v.abs();
        acc = Some(match acc {
            None => v,
            Some(a) => {
                let num = a.numer() * v.denom();
                let num2 = v.numer() * a.denom();
                let den = a.denom() * v.denom();
                Q::new(num.gcd(&num2), den)
            }
        });
    }
    acc
}

/// `floor(x / w) * w` for `w > 0`.
pub fn floor_to(x: &Q, w: &Q) -> Q {
    (x / w).floor() * w
}

/// `ceil(x / w) * w` for `w > 0`.
pub fn ceil_to(x: &Q, w: &Q) -> Q {
    (x / w).ceil() * w
}

pub fn is_multiple_of(x: &Q, w: &Q) -> bool {
    (x / w).is_integer()
}

pub fn half() -> Q {
    qr(1, 2)
}

pub fn one() -> Q {
    Q::one()
}
