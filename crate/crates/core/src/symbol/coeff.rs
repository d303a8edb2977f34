//! Exact Gaussian-rational coefficients `re + i·im` with `re, im ∈ Q`.
//!
//! Real operators carry a zero imaginary part; the imaginary unit is only
//! needed for Schrödinger-type operators.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coeff {
    pub re: BigRational,
    pub im: BigRational,
}

impl Coeff {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::real(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Self::real(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn i() -> Self {
        Self { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Self { re: &self.re / &n, im: -(&self.im / &n) }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64().unwrap_or(f64::NAN), self.im.to_f64().unwrap_or(f64::NAN))
    }

    /// Exact conversion of a finite `f64` (its binary value) into a rational.
    pub fn from_f64_exact(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(Self::real)
    }

    /// Parses `"3"`, `"-1/2"`, `"0.25"`, `"1e-3"` into an exact rational.
    pub fn parse_rational(text: &str) -> Option<BigRational> {
        let text = text.trim();
        if let Some((n, d)) = text.split_once('/') {
            let n = Self::parse_rational(n)?;
            let d = Self::parse_rational(d)?;
            if d.is_zero() {
                return None;
            }
            return Some(n / d);
        }
        let (neg, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.strip_prefix('+').unwrap_or(text)),
        };
        let (mantissa, exponent) = match body.find(['e', 'E']) {
            Some(p) => (&body[..p], body[p + 1..].parse::<i32>().ok()?),
            None => (body, 0),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
        let scale = exponent - frac_part.len() as i32;
        let ten = BigInt::from(10);
        let value = if scale >= 0 {
            BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
        } else {
            BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
        };
        Some(if neg { -value } else { value })
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Coeff {
    /// Real: `3`, `-1/2`. Imaginary: `2i`, `-i`. Mixed: `(1/2+3i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return fmt_rational(&self.re, f);
        }
        let write_im = |f: &mut fmt::Formatter<'_>, im: &BigRational| -> fmt::Result {
            if im.is_one() {
                write!(f, "i")
            } else if (-im).is_one() {
                write!(f, "-i")
            } else {
                fmt_rational(im, f)?;
                write!(f, "i")
            }
        };
        if self.re.is_zero() {
            return write_im(f, &self.im);
        }
        write!(f, "(")?;
        fmt_rational(&self.re, f)?;
        if self.im.is_positive() {
            write!(f, "+")?;
        }
        write_im(f, &self.im)?;
        write!(f, ")")
    }
}

impl Add for &Coeff {
    type Output = Coeff;
    fn add(self, o: &Coeff) -> Coeff {
        Coeff { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &Coeff {
    type Output = Coeff;
    fn sub(self, o: &Coeff) -> Coeff {
        Coeff { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &Coeff {
    type Output = Coeff;
    fn mul(self, o: &Coeff) -> Coeff {
        Coeff {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl Div for &Coeff {
    type Output = Coeff;
    fn div(self, o: &Coeff) -> Coeff {
        self * &o.recip()
    }
}

impl Neg for &Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        Coeff { re: -self.re.clone(), im: -self.im.clone() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Coeff {
            type Output = Coeff;
            fn $m(self, o: Coeff) -> Coeff {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for Coeff {
    type Output = Coeff;
    fn neg(self) -> Coeff {
        -&self
    }
}
