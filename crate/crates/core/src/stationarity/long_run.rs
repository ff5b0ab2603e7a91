use crate::scalar::Scalar;

fn autocovariance<T: Scalar>(u: &[T], lag: usize) -> T {
    let n = T::from_usize_lossy(u.len());
    u[lag..].iter().zip(u).map(|(&a, &b)| a * b).sum::<T>() / n
}

/// Newey-West (1994) automatic bandwidth for the Bartlett kernel.
///
/// Pilot lag `floor(4 (n/100)^(2/9))`, then
/// `floor(1.1447 (s1/s0)^(2/3) n^(1/3))` capped at `n - 1`.
pub fn newey_west_bandwidth<T: Scalar>(u: &[T]) -> usize {
    let n = u.len();
    if n < 2 {
        return 0;
    }
    let nf = n as f64;
    let pilot = ((4.0 * (nf / 100.0).powf(2.0 / 9.0)).floor() as usize).min(n - 1);
    let mut s0 = autocovariance(u, 0).as_f64();
    let mut s1 = 0.0;
    for j in 1..=pilot {
        let g = autocovariance(u, j).as_f64();
        s0 += 2.0 * g;
        s1 += 2.0 * j as f64 * g;
    }
    if !(s0 > 0.0) {
        return 0;
    }
    let gamma = 1.1447 * ((s1 / s0).powi(2)).powf(1.0 / 3.0);
    let bw = (gamma * nf.powf(1.0 / 3.0)).floor();
    if !bw.is_finite() {
        return 0;
    }
    (bw as usize).min(n - 1)
}

/// Bartlett-weighted long-run variance `g0 + 2 sum_j (1 - j/(b+1)) g_j`.
pub fn bartlett_long_run_variance<T: Scalar>(u: &[T], bandwidth: usize) -> T {
    let mut lrv = autocovariance(u, 0);
    let b1 = T::from_usize_lossy(bandwidth + 1);
    for j in 1..=bandwidth.min(u.len().saturating_sub(1)) {
        let w = T::one() - T::from_usize_lossy(j) / b1;
        lrv = lrv + T::lit(2.0) * w * autocovariance(u, j);
    }
    lrv
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_bandwidth_is_plain_variance() {
        let u = [1.0, -1.0, 2.0, -2.0];
        assert_eq!(bartlett_long_run_variance(&u, 0), 2.5);
    }

    #[test]
    fn bandwidth_one_hand_computed() {
        // g0 = 2.5, g1 = (-1 - 2 - 4)/4 = -1.75, weight 1/2
        let u = [1.0, -1.0, 2.0, -2.0];
        assert!((bartlett_long_run_variance::<f64>(&u, 1) - (2.5 - 1.75)).abs() < 1e-15);
    }

    #[test]
    fn persistent_series_gets_wider_bandwidth() {
        let alternating: Vec<f64> = (0..400).map(|i| ((i * 7919) % 13) as f64 - 6.0).collect();
        let smooth: Vec<f64> = (0..400).map(|i| (i as f64 / 40.0).sin()).collect();
        assert!(newey_west_bandwidth(&smooth) > newey_west_bandwidth(&alternating));
        assert_eq!(newey_west_bandwidth(&[0.0; 50]), 0);
    }
}
