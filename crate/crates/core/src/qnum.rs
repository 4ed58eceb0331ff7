//! Deformation-parameter arithmetic.
//!
//! The deformed integer is `{j} = sinh(j t)`. Everything downstream uses the
//! normalized bracket `[j] = sinh(j t) / sinh(t)`, which tends to `j` as
//! `t -> 0`. The classical point `t = 0` is a separate branch and never
//! evaluates a `0/0` ratio.

use crate::error::{domain, Error, Result};

/// Deformation parameter `t >= 0`; `t = 0` is the classical limit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct QParam(f64);

impl QParam {
    pub const CLASSICAL: QParam = QParam(0.0);

    pub fn new(t: f64) -> Result<Self> {
        if t.is_finite() && t >= 0.0 {
            // normalizes -0.0
            Ok(QParam(t + 0.0))
        } else {
            Err(Error::InvalidDeformation(t))
        }
    }

    /// Parameter from the multiplicative convention `qdef = e^t`.
    pub fn from_qdef(qdef: f64) -> Result<Self> {
        if !(qdef.is_finite() && qdef > 0.0) {
            return Err(Error::InvalidDeformation(qdef));
        }
        QParam::new(libm::log(qdef))
    }

    #[inline]
    pub fn t(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_classical(self) -> bool {
        self.0 == 0.0
    }

    /// `[n]` evaluated at a real argument; used for `[h]` with `h` an
    /// eigenvalue of a Cartan generator.
    pub fn bracket_real(self, x: f64) -> f64 {
        if self.is_classical() {
            x
        } else {
            libm::sinh(x * self.0) / libm::sinh(self.0)
        }
    }
}

/// `sinh(j t)`; returns `j` at `t = 0`.
pub fn raw_bracket(j: i64, t: QParam) -> f64 {
    if t.is_classical() {
        j as f64
    } else {
        libm::sinh(j as f64 * t.t())
    }
}

/// `sinh(j t) / sinh(t)`; returns `j` at `t = 0`.
pub fn norm_bracket(j: i64, t: QParam) -> f64 {
    if t.is_classical() {
        j as f64
    } else {
        libm::sinh(j as f64 * t.t()) / libm::sinh(t.t())
    }
}

/// `[lo][lo+1]...[hi]`, the empty product being 1.
pub fn bracket_product(lo: i64, hi: i64, t: QParam) -> f64 {
    (lo..=hi).map(|j| norm_bracket(j, t)).product()
}

/// `[n]! / ([k]! [n-k]!)`.
pub fn qbinomial(n: i64, k: i64, t: QParam) -> f64 {
    if k < 0 || k > n {
        return 0.0;
    }
    bracket_product(n - k + 1, n, t) / bracket_product(1, k, t)
}

/// Canonical `sl2` lowering element `(X^-)_{j+1, j} = sqrt([j+1][P-j])` of the
/// irreducible string with highest index `P`.
pub fn a1_element(top: u32, j: u32, t: QParam) -> Result<f64> {
    if j >= top {
        return Err(domain(alloc::format!(
            "sl2 depth {j} out of range for string of index {top}"
        )));
    }
    let (top, j) = (top as i64, j as i64);
    Ok(libm::sqrt(norm_bracket(j + 1, t) * norm_bracket(top - j, t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(t: f64) -> QParam {
        QParam::new(t).unwrap()
    }

    #[test]
    fn bracket_examples() {
        assert_eq!(raw_bracket(0, q(0.7)), 0.0);
        assert_eq!(raw_bracket(1, QParam::CLASSICAL), 1.0);
        // sinh(2 ln 2) / sinh(ln 2) = (15/8) / (3/4)
        let ln2 = core::f64::consts::LN_2;
        assert!((norm_bracket(2, q(ln2)) - 2.5).abs() < 1e-15);
        assert_eq!(norm_bracket(1, q(0.4)), 1.0);
        assert_eq!(norm_bracket(3, QParam::CLASSICAL), 3.0);
        let expected = libm::sinh(1.5) / libm::sinh(0.5);
        assert!((norm_bracket(3, q(0.5)) - expected).abs() < 1e-15);
        assert!((norm_bracket(3, q(0.5)) - 4.086).abs() < 1e-3);
    }

    #[test]
    fn a1_examples() {
        assert_eq!(a1_element(1, 0, QParam::CLASSICAL).unwrap(), 1.0);
        assert!((a1_element(2, 0, QParam::CLASSICAL).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let ln2 = core::f64::consts::LN_2;
        assert!((a1_element(2, 0, q(ln2)).unwrap() - 2.5f64.sqrt()).abs() < 1e-15);
        assert!(a1_element(2, 2, q(0.1)).is_err());
        assert!(a1_element(0, 0, q(0.1)).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(QParam::new(-1e-3).is_err());
        assert!(QParam::new(f64::NAN).is_err());
        assert!(QParam::new(f64::INFINITY).is_err());
        assert!(QParam::from_qdef(0.5).is_err());
        assert!((QParam::from_qdef(2.0).unwrap().t() - core::f64::consts::LN_2).abs() < 1e-15);
        assert!(QParam::new(-0.0).unwrap().is_classical());
    }

    #[test]
    fn small_t_limit() {
        let t = q(1e-6);
        for j in 1..=20i64 {
            let err = (norm_bracket(j, t) - j as f64).abs();
            assert!(err < 1e-6 * (j * j) as f64, "j={j} err={err}");
        }
    }

    #[test]
    fn qbinomial_classical_matches_integers() {
        assert_eq!(qbinomial(5, 2, QParam::CLASSICAL), 10.0);
        assert_eq!(qbinomial(5, 0, QParam::CLASSICAL), 1.0);
        assert_eq!(qbinomial(3, 4, QParam::CLASSICAL), 0.0);
    }

    proptest! {
        #[test]
        fn raw_bracket_is_odd(j in -40i64..40, t in 0.0f64..2.0) {
            let t = q(t);
            prop_assert_eq!(raw_bracket(-j, t), -raw_bracket(j, t));
        }

        #[test]
        fn a1_strings_are_palindromic(top in 1u32..30, j in 0u32..30, t in 0.0f64..1.5) {
            prop_assume!(j < top);
            let t = q(t);
            let a = a1_element(top, j, t).unwrap();
            let b = a1_element(top, top - 1 - j, t).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
    }
}
