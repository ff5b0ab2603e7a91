//! Tabulated critical values.

use super::{CriticalValues, Deterministic};
use crate::scalar::Scalar;

// MacKinnon (2010), "Critical Values for Cointegration Tests", Queen's
// Economics Department Working Paper 1227, Table 2, single-series case.
// Each row is (tau_inf, b1, b2, b3) for cv(N) = tau_inf + b1/N + b2/N^2 + b3/N^3.
const TAU_C: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];
const TAU_CT: [[f64; 4]; 3] = [
    [-3.95877, -9.0531, -28.428, -134.155],
    [-3.41049, -4.3904, -9.036, -45.374],
    [-3.12705, -2.5856, -3.925, -22.380],
];

// Kwiatkowski, Phillips, Schmidt and Shin (1992), J. Econometrics 54, Table 1.
const KPSS_LEVEL: [f64; 3] = [0.739, 0.463, 0.347];
const KPSS_TREND: [f64; 3] = [0.216, 0.146, 0.119];

/// Finite-sample Dickey-Fuller tau critical values (1%, 5%, 10%) for a
/// regression with `nobs` observations. Shared by ADF and Phillips-Perron.
pub fn dickey_fuller<T: Scalar>(deterministic: Deterministic, nobs: usize) -> CriticalValues<T> {
    let table = match deterministic {
        Deterministic::ConstantOnly => &TAU_C,
        Deterministic::ConstantAndTrend => &TAU_CT,
    };
    let n = nobs as f64;
    let cv = |r: &[f64; 4]| T::lit(r[0] + r[1] / n + r[2] / (n * n) + r[3] / (n * n * n));
    CriticalValues {
        one: cv(&table[0]),
        five: cv(&table[1]),
        ten: cv(&table[2]),
    }
}

/// Asymptotic KPSS critical values (1%, 5%, 10%).
pub fn kpss<T: Scalar>(deterministic: Deterministic) -> CriticalValues<T> {
    let t = match deterministic {
        Deterministic::ConstantOnly => KPSS_LEVEL,
        Deterministic::ConstantAndTrend => KPSS_TREND,
    };
    CriticalValues {
        one: T::lit(t[0]),
        five: T::lit(t[1]),
        ten: T::lit(t[2]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn large_sample_limits() {
        let cv: CriticalValues<f64> = dickey_fuller(Deterministic::ConstantOnly, 1_000_000);
        assert!((cv.five - -2.86154).abs() < 1e-5);
        let cv: CriticalValues<f64> = dickey_fuller(Deterministic::ConstantAndTrend, 1_000_000);
        assert!((cv.one - -3.95877).abs() < 1e-4);
    }

    #[test]
    fn small_sample_values_are_more_negative() {
        let small: CriticalValues<f64> = dickey_fuller(Deterministic::ConstantOnly, 50);
        let big: CriticalValues<f64> = dickey_fuller(Deterministic::ConstantOnly, 5000);
        assert!(small.five < big.five);
        // classic Fuller table value at n=50 is about -2.93
        assert!((small.five - -2.92).abs() < 0.02);
    }
}
