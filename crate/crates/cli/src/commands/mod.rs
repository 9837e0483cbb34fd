pub mod bivariate;
pub mod collapse;
pub mod credit;
pub mod quantiles;
pub mod simulate;
pub mod verify;

use crate::error::CliError;

pub(crate) fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), CliError> {
    if cond {
        Ok(())
    } else {
        Err(CliError::Param(msg()))
    }
}

/// `n + 1` evenly spaced points on `[a, b]`.
pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}
