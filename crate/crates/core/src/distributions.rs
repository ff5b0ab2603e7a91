//! Tail probabilities for the F and Student t reference distributions, both
//! expressed through the regularized incomplete beta function.

use statrs::function::beta::beta_reg;

/// Upper tail `P(F > x)` for `F(d1, d2)`.
pub fn f_survival(x: f64, d1: f64, d2: f64) -> f64 {
    if !(x > 0.0) {
        return 1.0;
    }
    if x.is_infinite() {
        return 0.0;
    }
    beta_reg(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * x)).clamp(0.0, 1.0)
}

/// Two-sided `P(|T| > |t|)` for Student t with `df` degrees of freedom.
pub fn t_two_sided(t: f64, df: f64) -> f64 {
    if t == 0.0 || t.is_nan() {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    beta_reg(df / 2.0, 0.5, df / (df + t * t)).clamp(0.0, 1.0)
}
