//! Exact rational scalars and their `p/q` text form.
//!
//! Every scalar in the crate is an arbitrary-precision rational. The wire
//! form is the string `"p/q"` with `q > 0` and the fraction fully reduced;
//! the parser additionally accepts a bare integer `"p"` and unreduced
//! fractions, normalizing on the way in.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::Result;

/// Parse `p/q` (or a bare integer `p`) into a reduced rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let bad = |detail: &str| Error::Parse {
        what: "rational",
        detail: format!("{detail} in {text:?}"),
    };
    let text = text.trim();
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let numer: BigInt = numer
        .parse()
        .map_err(|_| bad("numerator is not an integer"))?;
    let denom: BigInt = match denom {
        Some(d) => d
            .parse()
            .map_err(|_| bad("denominator is not an integer"))?,
        None => BigInt::from(1),
    };
    if !denom.is_positive() {
        return Err(bad("denominator must be positive"));
    }
    Ok(BigRational::new(numer, denom))
}

/// Format a rational as `p/q`, always spelling out the denominator.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// The positive part `max(r, 0)`.
pub fn pos(r: &BigRational) -> BigRational {
    if r.is_positive() {
        r.clone()
    } else {
        BigRational::zero()
    }
}

/// Exact `max` of two rationals by value.
pub fn max(a: &BigRational, b: &BigRational) -> BigRational {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}
