//! Noncentral t distribution: CDF by a dual series of incomplete beta
//! factors with rigorous tail truncation, and quantiles by bracketed
//! bisection on the CDF.

use crate::error::{Error, Result};
use crate::real::Real;

use super::special::{betainc_reg, ln_beta, norm_cdf};

const MAX_SERIES_TERMS: usize = 5000;
const MAX_BISECT_ITERS: usize = 300;

/// CDF of the noncentral t distribution with `nu > 0` degrees of freedom and
/// noncentrality `delta`, evaluated at `x`. Absolute accuracy is near 1e-13
/// in `f64` over the operating range.
///
/// The series interleaves two chains of regularized incomplete beta values,
/// each advanced by closed-form decrements; truncation stops once the
/// unconsumed Poisson-like weight mass (known exactly in both chains) times
/// the current beta factor is negligible.
pub fn nct_cdf<T: Real>(x: T, delta: T, nu: T) -> Result<T> {
    if !(nu > T::zero()) || !nu.is_finite() {
        return Err(Error::InvalidParameter {
            name: "nu",
            message: format!("degrees of freedom must be positive and finite, got {nu}"),
        });
    }
    if !delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta",
            message: "noncentrality must be finite".into(),
        });
    }
    if x.is_nan() {
        return Err(Error::InvalidParameter {
            name: "x",
            message: "evaluation point must not be NaN".into(),
        });
    }
    if x == T::infinity() {
        return Ok(T::one());
    }
    if x == T::neg_infinity() {
        return Ok(T::zero());
    }
    if x < T::zero() {
        // Symmetry: P(T_delta <= x) = 1 - P(T_{-delta} <= -x).
        return Ok(T::one() - nct_cdf(-x, -delta, nu)?);
    }

    let half = T::from64(0.5);
    let one = T::one();
    let phi_md = norm_cdf(-delta);
    if x == T::zero() {
        return Ok(phi_md);
    }

    let y = x * x / (nu + x * x);
    let h = delta * delta * half;
    let b = nu * half;

    // Beta-factor chains at a = 1/2 and a = 1, advanced by
    // I_y(a+1, b) = I_y(a, b) - T(a) with T(a) = y^a (1-y)^b / (a B(a, b)).
    let mut ip = betainc_reg(half, b, y)?;
    let mut iq = betainc_reg(one, b, y)?;
    let mut tp = (half * y.ln() + b * (-y).ln_1p() - half.ln() - ln_beta(half, b)).exp();
    let mut tq = (y.ln() + b * (-y).ln_1p() - ln_beta(one, b)).exp();

    // Weight chains: p_j = e^-h h^j / j!, q_j carries the noncentrality sign.
    let mut p = (-h).exp();
    let mut q = (-h).exp() * delta * T::from64(std::f64::consts::FRAC_2_PI.sqrt());
    let q_total = one - (phi_md + phi_md); // erf(delta / sqrt(2))

    let tol = T::from64(1e-13).max(T::epsilon() * T::from64(8.0));
    let mut s = T::zero();
    let mut sum_p = T::zero();
    let mut sum_q = T::zero();
    let mut converged = false;

    for j in 0..MAX_SERIES_TERMS {
        s += p * ip + q * iq;
        sum_p += p;
        sum_q += q;
        // The chains' total weights are exactly 1 and erf(delta/sqrt 2);
        // every remaining beta factor is at most the current ip.
        let tail = (one - sum_p).max(T::zero()) + (q_total - sum_q).abs();
        if tail * ip * half <= tol {
            converged = true;
            break;
        }
        let jf = T::from64(j as f64);
        ip = (ip - tp).max(T::zero());
        tp *= y * (jf + half + b) / (jf + half + one);
        iq = (iq - tq).max(T::zero());
        tq *= y * (jf + one + b) / (jf + T::from64(2.0));
        p *= h / (jf + one);
        q *= h / (jf + T::from64(1.5));
    }
    if !converged {
        return Err(Error::NoConvergence {
            what: "noncentral t series",
            limit: MAX_SERIES_TERMS,
        });
    }
    Ok((phi_md + half * s).max(T::zero()).min(one))
}

/// Quantile of the noncentral t distribution: the `u`-th root of the CDF,
/// found by expanding a bracket around the noncentrality and bisecting.
/// Accurate to about 1e-10 in absolute terms.
pub fn nct_quantile<T: Real>(u: T, delta: T, nu: T) -> Result<T> {
    if !(u > T::zero()) || !(u < T::one()) {
        return Err(Error::InvalidParameter {
            name: "u",
            message: format!("quantile level must lie strictly in (0, 1), got {u}"),
        });
    }
    let two = T::from64(2.0);
    let spread = if nu > two {
        (nu / (nu - two)).sqrt()
    } else {
        T::from64(3.0)
    };
    let width = T::from64(20.0) * spread.max(T::one());

    let mut lo = delta - width;
    let mut hi = delta + width;
    let mut step = width;
    for _ in 0..200 {
        if nct_cdf(lo, delta, nu)? < u {
            break;
        }
        step = step + step;
        lo -= step;
    }
    let mut step = width;
    for _ in 0..200 {
        if nct_cdf(hi, delta, nu)? >= u {
            break;
        }
        step = step + step;
        hi += step;
    }
    if !(nct_cdf(lo, delta, nu)? < u && nct_cdf(hi, delta, nu)? >= u) {
        return Err(Error::NoConvergence {
            what: "noncentral t quantile bracketing",
            limit: 200,
        });
    }

    let tol = T::from64(1e-11).max(T::epsilon() * T::from64(8.0));
    for _ in 0..MAX_BISECT_ITERS {
        let mid = (lo + hi) * T::from64(0.5);
        if nct_cdf(mid, delta, nu)? < u {
            lo = mid;
        } else {
            hi = mid;
        }
        let scale = T::one().max(lo.abs()).max(hi.abs());
        if hi - lo <= tol * scale {
            break;
        }
    }
    Ok((lo + hi) * T::from64(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_abs(got: f64, want: f64, tol: f64) {
        assert!(
            (got - want).abs() <= tol,
            "got {got:.15}, want {want:.15}, err {:.2e}",
            (got - want).abs()
        );
    }

    #[test]
    fn cdf_reference_values() {
        // Reference values computed with an independent high-precision
        // implementation.
        let cases: [(f64, f64, f64, f64); 12] = [
            (2.7540, 10.0, 2.213707297724792, 0.65505076080246),
            (2.7540, 10.0, 2.2137, 0.65505306861244),
            (0.0, 5.0, 2.5, 0.00620966532578),
            (2.5, 5.0, 2.5, 0.45641019602416),
            (-1.0, 5.0, 2.5, 0.00046033075745),
            (5.0, 5.0, 2.5, 0.89437488713110),
            (1.0, 1.0, 1.0, 0.42202003039263),
            (0.5, 3.0, -2.0, 0.99219969892356),
            (-3.0, 7.0, -1.5, 0.13589019579426),
            (12.0, 2.0, 6.0, 0.77610147272143),
            (2.0, 50.0, 2.0, 0.49604734373340),
            (0.3, 1.0, 0.0, 0.59277357907774),
        ];
        for (x, nu, delta, want) in cases {
            let got = nct_cdf(x, delta, nu).unwrap();
            assert_abs(got, want, 1e-11);
        }
    }

    #[test]
    fn cdf_zero_noncentrality_is_central_t() {
        // Central t(1) is Cauchy: F(x) = 1/2 + atan(x)/pi.
        for x in [-3.0f64, -0.7, 0.0, 0.3, 2.0, 10.0] {
            let want = 0.5 + x.atan() / std::f64::consts::PI;
            assert_abs(nct_cdf(x, 0.0, 1.0).unwrap(), want, 1e-11);
        }
    }

    #[test]
    fn cdf_is_monotone_and_bounded() {
        let mut prev = 0.0;
        for i in 0..200 {
            let x = -10.0 + i as f64 * 0.1;
            let c = nct_cdf(x, 2.5, 5.0).unwrap();
            assert!((0.0..=1.0).contains(&c));
            assert!(c + 1e-13 >= prev, "cdf decreased at x={x}");
            prev = c;
        }
    }

    #[test]
    fn cdf_symmetry_identity() {
        for &(x, delta, nu) in &[(1.3f64, 2.0, 7.0), (0.4, -1.0, 3.0), (2.2, 0.5, 12.0)] {
            let lhs = nct_cdf(x, delta, nu).unwrap();
            let rhs = 1.0 - nct_cdf(-x, -delta, nu).unwrap();
            assert_abs(lhs, rhs, 1e-13);
        }
    }

    #[test]
    fn cdf_infinite_arguments() {
        assert_eq!(nct_cdf(f64::INFINITY, 2.5, 5.0).unwrap(), 1.0);
        assert_eq!(nct_cdf(f64::NEG_INFINITY, 2.5, 5.0).unwrap(), 0.0);
        assert!(nct_cdf(f64::NAN, 2.5, 5.0).is_err());
        assert!(nct_cdf(1.0, 2.5, 0.0).is_err());
        assert!(nct_cdf(1.0, 2.5, -1.0).is_err());
    }

    #[test]
    fn quantile_reference_values() {
        let cases: [(f64, f64, f64, f64); 7] = [
            (0.5, 10.0, 2.0, 2.053691151118),
            (0.05, 5.0, 2.5, 0.840209906409),
            (0.95, 5.0, 2.5, 6.165132484502),
            (0.005, 5.0, 2.5, -0.080516260247),
            (0.5, 1.0, 1.0, 1.320213099388),
            (0.99, 3.0, -2.0, 0.380482830990),
            (0.33, 10.0, 2.2137073, 1.786578668135),
        ];
        for (u, nu, delta, want) in cases {
            let got = nct_quantile(u, delta, nu).unwrap();
            assert_abs(got, want, 1e-8);
        }
    }

    #[test]
    fn quantile_round_trips_through_cdf() {
        for &u in &[0.001f64, 0.05, 0.3, 0.5, 0.77, 0.99] {
            let t = nct_quantile(u, 2.5, 5.0).unwrap();
            assert_abs(nct_cdf(t, 2.5, 5.0).unwrap(), u, 1e-9);
        }
    }

    #[test]
    fn quantile_rejects_boundary_levels() {
        assert!(nct_quantile(0.0, 2.5, 5.0).is_err());
        assert!(nct_quantile(1.0, 2.5, 5.0).is_err());
        assert!(nct_quantile(-0.2, 2.5, 5.0).is_err());
    }
}
