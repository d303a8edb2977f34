use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// The causal kernel of `∂_t^{−α} δ`: `scale · t^{α−1} / Γ(α)` for `t > 0`, zero otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracKernel {
    #[serde(with = "rational_string")]
    pub alpha: BigRational,
    pub scale: f64,
}

/// `1/Γ(x)`, extended by zero at the non-positive integers.
pub fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        return 0.0;
    }
    if x.fract() == 0.0 && x <= 171.0 {
        return 1.0 / (1..x as u32).map(f64::from).product::<f64>();
    }
    let mut x = x;
    let mut factor = 1.0;
    while x <= 0.0 {
        factor *= x;
        x += 1.0;
    }
    factor / gamma(x)
}

impl FracKernel {
    pub fn new(alpha: BigRational, scale: f64) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::InvalidInput(format!("kernel order must be positive, got {alpha}")));
        }
        Ok(Self { alpha, scale })
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha.to_f64().unwrap_or(f64::NAN)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.derivative(0, t)
    }

    /// `d^j/dt^j` of the kernel for `t > 0`: `scale · t^{α−1−j} / Γ(α−j)`.
    pub fn derivative(&self, j: u32, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let e = self.alpha_f64() - 1.0 - j as f64;
        self.scale * t.powf(e) * recip_gamma(e + 1.0)
    }
}

/// `t^{α−1}/Γ(α)` for `t > 0`, zero for `t ≤ 0`.
pub fn frac_delta_kernel(alpha: &BigRational, t: f64) -> Result<f64> {
    Ok(FracKernel::new(alpha.clone(), 1.0)?.eval(t))
}

pub(crate) mod rational_string {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::symbol::Coeff;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&Coeff::real(r.clone()).to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        Coeff::parse_rational(&text).ok_or_else(|| serde::de::Error::custom(format!("bad rational {text:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::Coeff;
    use std::f64::consts::PI;

    fn q(s: &str) -> BigRational {
        Coeff::parse_rational(s).unwrap()
    }

    #[test]
    fn half_order_kernel() {
        for t in [1e-3, 0.1, 1.0, 7.5] {
            let v = frac_delta_kernel(&q("1/2"), t).unwrap();
            assert!((v - 1.0 / (PI * t).sqrt()).abs() <= 1e-14 * v);
        }
    }

    #[test]
    fn heaviside_and_three_halves() {
        assert_eq!(frac_delta_kernel(&q("1"), 0.3).unwrap(), 1.0);
        assert_eq!(frac_delta_kernel(&q("1"), -0.3).unwrap(), 0.0);
        assert_eq!(frac_delta_kernel(&q("1/2"), 0.0).unwrap(), 0.0);
        let t = 0.7;
        let v = frac_delta_kernel(&q("3/2"), t).unwrap();
        assert!((v - 2.0 * (t / PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_positive_order() {
        assert!(frac_delta_kernel(&q("0"), 1.0).is_err());
        assert!(frac_delta_kernel(&q("-1/2"), 1.0).is_err());
    }

    #[test]
    fn three_halves_is_integral_of_half() {
        // Oracle: ∫₀ᵗ τ^{-1/2}/√π dτ via σ = √τ substitution and composite Simpson.
        let t = 1.3_f64;
        let n = 2000;
        let h = t.sqrt() / n as f64;
        let f = |_s: f64| 2.0 / PI.sqrt();
        let mut acc = f(0.0) + f(t.sqrt());
        for i in 1..n {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        let integral = acc * h / 3.0;
        let v = frac_delta_kernel(&q("3/2"), t).unwrap();
        assert!((integral - v).abs() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let k = FracKernel::new(q("1/2"), -0.8).unwrap();
        let t = 0.6;
        let h = 1e-5;
        let fd = (k.eval(t + h) - k.eval(t - h)) / (2.0 * h);
        assert!((fd - k.derivative(1, t)).abs() < 1e-7);
        let fd2 = (k.derivative(1, t + h) - k.derivative(1, t - h)) / (2.0 * h);
        assert!((fd2 - k.derivative(2, t)).abs() < 1e-6);
        // integer order: derivative of the Heaviside kernel vanishes for t > 0
        let heav = FracKernel::new(q("1"), 1.0).unwrap();
        assert_eq!(heav.derivative(1, 0.4), 0.0);
    }

    #[test]
    fn recip_gamma_values() {
        assert!((recip_gamma(-0.5) + 1.0 / (2.0 * PI.sqrt())).abs() < 1e-14);
        assert_eq!(recip_gamma(-2.0), 0.0);
        assert!((recip_gamma(3.0) - 0.5).abs() < 1e-15);
    }
}
