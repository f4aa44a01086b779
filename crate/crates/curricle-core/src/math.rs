//! Thin wrappers over `libm` so the crate keeps a single software float
//! path in every build, independent of platform intrinsics.

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn pow(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// Rounds half away from zero.
pub(crate) fn round(x: f64) -> f64 {
    libm::round(x)
}
