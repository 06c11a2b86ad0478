//! TEPS arithmetic, generic over the float type.

use num_traits::{Float, FromPrimitive, ToPrimitive};

use crate::error::{Error, Result};

/// Traversed edges per second.
pub fn teps<T: Float + FromPrimitive>(edges: u64, seconds: T) -> Result<T> {
    if seconds.is_nan() || seconds <= T::zero() {
        return Err(Error::NonPositiveDuration(seconds.to_f64().unwrap_or(f64::NAN)));
    }
    let m = T::from_u64(edges).ok_or_else(|| Error::InvalidParams(format!("{edges} edges")))?;
    Ok(m / seconds)
}

/// `k / sum(1 / v_i)` over strictly positive values.
pub fn harmonic_mean<T: Float + FromPrimitive>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut inv = T::zero();
    for &v in values {
        if v.is_nan() || v <= T::zero() {
            return Err(Error::InvalidParams(format!(
                "harmonic mean needs positive values, got {}",
                v.to_f64().unwrap_or(f64::NAN)
            )));
        }
        inv = inv + v.recip();
    }
    Ok(count::<T>(values.len()) / inv)
}

pub fn arithmetic_mean<T: Float + FromPrimitive>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sum = values.iter().fold(T::zero(), |a, &v| a + v);
    Ok(sum / count::<T>(values.len()))
}

fn count<T: FromPrimitive>(n: usize) -> T {
    T::from_usize(n).expect("count representable in float type")
}

/// Summary of one run set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary<T> {
    pub runs: usize,
    pub harmonic_mean: T,
    pub arithmetic_mean: T,
    pub min: T,
    pub max: T,
}

impl<T: Float + FromPrimitive> Summary<T> {
    /// Summary of strictly positive samples.
    pub fn of(values: &[T]) -> Result<Summary<T>> {
        let harmonic_mean = harmonic_mean(values)?;
        Ok(Summary {
            runs: values.len(),
            harmonic_mean,
            arithmetic_mean: arithmetic_mean(values)?,
            min: values.iter().copied().fold(T::infinity(), T::min),
            max: values.iter().copied().fold(T::neg_infinity(), T::max),
        })
    }
}

impl<T: ToPrimitive + Copy> Summary<T> {
    pub fn to_f64(&self) -> Summary<f64> {
        let f = |x: T| x.to_f64().unwrap_or(f64::NAN);
        Summary {
            runs: self.runs,
            harmonic_mean: f(self.harmonic_mean),
            arithmetic_mean: f(self.arithmetic_mean),
            min: f(self.min),
            max: f(self.max),
        }
    }
}
