//! `P{T_1 < T_2}` for two groups by four integral representations.
//!
//! With `lambda = p2/p1 >= 1` (otherwise the groups are swapped and the
//! complement returned):
//!
//! * `Stieltjes`: `-int_0^1 F(x) dG(x)` with `F = (1 - x^p1)^M1`,
//!   `G = (1 - x^p2)^M2`, integrated in the variable `w = G(x)`:
//!   `int_0^1 (1 - (1 - w^(1/M2))^(1/lambda))^M1 dw`.
//! * `Power`: `lambda M2 int_0^1 x^(lambda-1) (1-x)^M1 (1-x^lambda)^(M2-1) dx`.
//! * `Root`: `M2 int_0^1 (1 - x^(1/lambda))^M1 (1-x)^(M2-1) dx`.
//! * `Exponential`: `p2 M2 int_0^inf e^(-p2 t) (1-e^(-p1 t))^M1 (1-e^(-p2 t))^(M2-1) dt`.
//!
//! All powers are formed as `exp(k * ln_1p(-y))` to keep `1 - y` accurate
//! for small `y`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::GroupMixture;
use crate::quadrature::{integrate, integrate_semi_infinite, Estimate, QuadratureSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntegralForm {
    Stieltjes,
    Power,
    Root,
    Exponential,
}

impl IntegralForm {
    pub const ALL: [IntegralForm; 4] =
        [IntegralForm::Stieltjes, IntegralForm::Power, IntegralForm::Root, IntegralForm::Exponential];

    pub fn name(&self) -> &'static str {
        match self {
            IntegralForm::Stieltjes => "stieltjes",
            IntegralForm::Power => "power",
            IntegralForm::Root => "root",
            IntegralForm::Exponential => "exponential",
        }
    }
}

impl fmt::Display for IntegralForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IntegralForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IntegralForm::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown integral form {s:?} (stieltjes|power|root|exponential)")))
    }
}

/// `(1 - y)^k` for `0 <= y <= 1`.
fn pow_one_minus(y: f64, k: f64) -> f64 {
    if k == 0.0 {
        1.0
    } else {
        (k * (-y).ln_1p()).exp()
    }
}

/// `P{T_1 < T_2}` by quadrature of the chosen representation.
pub fn p_t1_before_t2_integral(m: &GroupMixture, form: IntegralForm, s: &QuadratureSettings) -> Result<Estimate> {
    if m.len() != 2 {
        return Err(Error::Domain(format!("integral forms need exactly 2 groups, got {}", m.len())));
    }
    let p = m.probs_f64();
    if p[1] < p[0] {
        let swapped = p_t1_before_t2_integral(&m.reversed(), form, s)?;
        return Ok(Estimate { value: 1.0 - swapped.value, error: swapped.error });
    }
    let counts = m.counts();
    let (m1, m2) = (counts[0] as f64, counts[1] as f64);
    let (p1, p2) = (p[0], p[1]);
    let lambda = p2 / p1;
    match form {
        IntegralForm::Stieltjes => integrate(
            |w: f64| {
                // 1 - w^(1/M2), accurate near w = 1
                let rest = -(w.ln() / m2).exp_m1();
                let inner = -(rest.ln() / lambda).exp_m1();
                (m1 * inner.ln()).exp()
            },
            0.0,
            1.0,
            s,
        ),
        IntegralForm::Power => {
            let est = integrate(
                |x: f64| {
                    ((lambda - 1.0) * x.ln()).exp() * pow_one_minus(x, m1) * pow_one_minus(x.powf(lambda), m2 - 1.0)
                },
                0.0,
                1.0,
                s,
            )?;
            Ok(scale(est, lambda * m2))
        }
        IntegralForm::Root => {
            let est = integrate(
                |x: f64| pow_one_minus(x.powf(1.0 / lambda), m1) * pow_one_minus(x, m2 - 1.0),
                0.0,
                1.0,
                s,
            )?;
            Ok(scale(est, m2))
        }
        IntegralForm::Exponential => {
            let factor = p2 * m2;
            let inner = QuadratureSettings { abs_tol: s.abs_tol / factor.max(1.0), ..*s };
            let est = integrate_semi_infinite(
                |t: f64| {
                    (-p2 * t).exp() * pow_one_minus((-p1 * t).exp(), m1) * pow_one_minus((-p2 * t).exp(), m2 - 1.0)
                },
                // integrand <= e^(-p2 t)
                |t: f64| (-p2 * t).exp() / p2,
                1.0 / p2,
                &inner,
            )?;
            Ok(scale(est, factor))
        }
    }
}

fn scale(e: Estimate, factor: f64) -> Estimate {
    Estimate { value: e.value * factor, error: e.error * factor }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mixture(groups: &[(u64, i64, i64)]) -> GroupMixture {
        GroupMixture::from_fractions(groups).unwrap()
    }

    #[test]
    fn symmetric_and_race() {
        let s = QuadratureSettings::default();
        for form in IntegralForm::ALL {
            let v = p_t1_before_t2_integral(&mixture(&[(1, 1, 2), (1, 1, 2)]), form, &s).unwrap();
            assert!((v.value - 0.5).abs() < 1e-10, "{form}: {}", v.value);
            let v = p_t1_before_t2_integral(&mixture(&[(1, 1, 3), (1, 2, 3)]), form, &s).unwrap();
            assert!((v.value - 1.0 / 3.0).abs() < 1e-10, "{form}: {}", v.value);
            // lambda < 1 goes through the swap
            let v = p_t1_before_t2_integral(&mixture(&[(1, 2, 3), (1, 1, 3)]), form, &s).unwrap();
            assert!((v.value - 2.0 / 3.0).abs() < 1e-10, "{form}: {}", v.value);
        }
    }

    #[test]
    fn two_by_one_matches_lattice_value() {
        let s = QuadratureSettings::default();
        let m = mixture(&[(2, 1, 4), (1, 1, 2)]);
        for form in IntegralForm::ALL {
            let v = p_t1_before_t2_integral(&m, form, &s).unwrap();
            assert!((v.value - 1.0 / 6.0).abs() < 1e-10, "{form}: {}", v.value);
        }
    }

    #[test]
    fn form_names_roundtrip() {
        for form in IntegralForm::ALL {
            assert_eq!(form.name().parse::<IntegralForm>().unwrap(), form);
        }
        assert!("trapezoid".parse::<IntegralForm>().is_err());
    }

    #[test]
    fn rejects_other_group_counts() {
        let m = mixture(&[(1, 1, 3), (1, 1, 3), (1, 1, 3)]);
        assert!(p_t1_before_t2_integral(&m, IntegralForm::Root, &QuadratureSettings::default()).is_err());
    }
}
