use core::f64::consts::{PI, SQRT_2};

use crate::{Error, Result};

fn check(x: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&x) {
        return Err(Error::OutsideSupport { index: 0, value: x });
    }
    Ok(())
}

/// `(x/4 - sqrt 2) sin(2 pi x + pi)` on `[0, 2]`.
pub fn one_d_hf(x: f64) -> Result<f64> {
    check(x)?;
    Ok((x / 4.0 - SQRT_2) * libm::sin(2.0 * PI * x + PI))
}

/// `sin(2 pi x)` on `[0, 2]`.
pub fn one_d_lf(x: f64) -> Result<f64> {
    check(x)?;
    Ok(libm::sin(2.0 * PI * x))
}
