use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use rug::Float;

/// A complex number as a pair of working-precision reals.
#[derive(Debug, Clone, PartialEq)]
pub struct XComplex {
    pub re: Float,
    pub im: Float,
}

impl XComplex {
    pub fn new(re: Float, im: Float) -> Self {
        Self { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        Self { re: Float::new(bits), im: Float::new(bits) }
    }

    pub fn one(bits: u32) -> Self {
        Self { re: Float::with_val(bits, 1), im: Float::new(bits) }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        Self { re, im }
    }

    /// i^n, exact by case analysis on n mod 4.
    pub fn i_pow(n: u32, bits: u32) -> Self {
        let (re, im) = match n % 4 {
            0 => (1, 0),
            1 => (0, 1),
            2 => (-1, 0),
            _ => (0, -1),
        };
        Self { re: Float::with_val(bits, re), im: Float::with_val(bits, im) }
    }

    /// e^{iθ}.
    pub fn cis(theta: &Float) -> Self {
        let (s, c) = theta.clone().sin_cos(Float::new(theta.prec()));
        Self { re: c, im: s }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale(&self, k: &Float) -> Self {
        let bits = self.prec();
        Self {
            re: Float::with_val(bits, &self.re * k),
            im: Float::with_val(bits, &self.im * k),
        }
    }

    pub fn exp(&self) -> Self {
        let m = Float::with_val(self.prec(), self.re.exp_ref());
        Self::cis(&self.im).scale(&m)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl Add for &XComplex {
    type Output = XComplex;
    fn add(self, rhs: &XComplex) -> XComplex {
        let bits = self.prec();
        XComplex {
            re: Float::with_val(bits, &self.re + &rhs.re),
            im: Float::with_val(bits, &self.im + &rhs.im),
        }
    }
}

impl Sub for &XComplex {
    type Output = XComplex;
    fn sub(self, rhs: &XComplex) -> XComplex {
        let bits = self.prec();
        XComplex {
            re: Float::with_val(bits, &self.re - &rhs.re),
            im: Float::with_val(bits, &self.im - &rhs.im),
        }
    }
}

impl Mul for &XComplex {
    type Output = XComplex;
    fn mul(self, rhs: &XComplex) -> XComplex {
        let bits = self.prec();
        let rr = Float::with_val(bits, &self.re * &rhs.re);
        let ii = Float::with_val(bits, &self.im * &rhs.im);
        let ri = Float::with_val(bits, &self.re * &rhs.im);
        let ir = Float::with_val(bits, &self.im * &rhs.re);
        XComplex { re: rr - ii, im: ri + ir }
    }
}

impl Neg for XComplex {
    type Output = XComplex;
    fn neg(self) -> XComplex {
        XComplex { re: -self.re, im: -self.im }
    }
}

impl AddAssign<&XComplex> for XComplex {
    fn add_assign(&mut self, rhs: &XComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}
