use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::arith::gcd;

/// An exact element of `mu_infinity ∪ {0}`: either zero or `e(num/den)`
/// with `0 <= num < den` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnitValue {
    Zero,
    Root { num: u64, den: u64 },
}

impl UnitValue {
    pub const ONE: UnitValue = UnitValue::Root { num: 0, den: 1 };

    /// `e(num/den)`, reduced.
    pub fn root(num: u64, den: u64) -> Self {
        assert!(den > 0, "root of unity with zero denominator");
        let num = num % den;
        let g = gcd(num, den);
        UnitValue::Root {
            num: num / g,
            den: den / g,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, UnitValue::Zero)
    }

    pub fn is_one(&self) -> bool {
        *self == Self::ONE
    }

    /// Multiplicative order of a nonzero value (`None` for zero).
    pub fn order(&self) -> Option<u64> {
        match *self {
            UnitValue::Zero => None,
            UnitValue::Root { den, .. } => Some(den),
        }
    }

    /// Rotation `num/den` in `[0,1)`.
    pub fn rotation(&self) -> Option<(u64, u64)> {
        match *self {
            UnitValue::Zero => None,
            UnitValue::Root { num, den } => Some((num, den)),
        }
    }

    /// Signed argument in rotation units, in `(-1/2, 1/2]`.
    pub fn arg(&self) -> Option<f64> {
        self.rotation().map(|(num, den)| {
            if 2 * num > den {
                -((den - num) as f64) / den as f64
            } else {
                num as f64 / den as f64
            }
        })
    }

    /// Numerator over a given denominator (which must be a multiple of `den`).
    pub fn numerator_over(&self, denominator: u64) -> Option<u64> {
        self.rotation().map(|(num, den)| {
            debug_assert_eq!(denominator % den, 0);
            num * (denominator / den)
        })
    }

    pub fn conj(&self) -> Self {
        match *self {
            UnitValue::Zero => UnitValue::Zero,
            UnitValue::Root { num, den } => UnitValue::root(den - num, den),
        }
    }

    pub fn pow(&self, k: u64) -> Self {
        match *self {
            UnitValue::Zero if k == 0 => Self::ONE,
            UnitValue::Zero => UnitValue::Zero,
            UnitValue::Root { num, den } => {
                UnitValue::root(((num as u128 * k as u128) % den as u128) as u64, den)
            }
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        match *self {
            UnitValue::Zero => Complex64::new(0.0, 0.0),
            UnitValue::Root { num, den } => root_complex(num, den),
        }
    }
}

/// `e(num/den)` as a floating complex number, using the symmetry of the
/// unit circle so that `root(den - num)` is exactly the conjugate of `root(num)`.
pub fn root_complex(num: u64, den: u64) -> Complex64 {
    let num = num % den;
    if num == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let (k, conj) = if 2 * num > den {
        (den - num, true)
    } else {
        (num, false)
    };
    let (s, c) = match (4 * k).cmp(&den) {
        std::cmp::Ordering::Equal => (1.0, 0.0),
        _ if 2 * k == den => (0.0, -1.0),
        _ => (std::f64::consts::TAU * k as f64 / den as f64).sin_cos(),
    };
    Complex64::new(c, if conj { -s } else { s })
}

/// Table of `e(a/den)` for `0 <= a < den` with exact conjugate symmetry.
pub fn root_table(den: u64) -> Vec<Complex64> {
    let den = den.max(1);
    let mut t = vec![Complex64::new(0.0, 0.0); den as usize];
    for a in 0..=den / 2 {
        let z = root_complex(a, den);
        t[a as usize] = z;
        if a != 0 {
            t[(den - a) as usize] = z.conj();
        }
    }
    t
}

impl Mul for UnitValue {
    type Output = UnitValue;

    fn mul(self, rhs: UnitValue) -> UnitValue {
        match (self, rhs) {
            (UnitValue::Root { num: a, den: b }, UnitValue::Root { num: c, den: d }) => {
                let den = b / gcd(b, d) * d;
                let n =
                    (a as u128 * (den / b) as u128 + c as u128 * (den / d) as u128) % den as u128;
                UnitValue::root(n as u64, den)
            }
            _ => UnitValue::Zero,
        }
    }
}

impl fmt::Display for UnitValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            UnitValue::Zero => write!(f, "0"),
            UnitValue::Root { num: 0, .. } => write!(f, "1"),
            UnitValue::Root { num, den } => write!(f, "e({num}/{den})"),
        }
    }
}

impl Serialize for UnitValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
