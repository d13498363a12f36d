//! Exact fractions over `i128`.
//!
//! Every operation is overflow-checked. An overflow panics with a message
//! naming the operation; nothing is ever rounded.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

/// A reduced fraction `num/den` with `den > 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

#[cold]
fn overflow(op: &str) -> ! {
    panic!("rational overflow in {op}")
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Builds `num/den` in lowest terms. Panics if `den == 0`.
    pub fn new(num: i128, den: i128) -> Rational {
        assert!(den != 0, "zero denominator");
        let g = gcd(num, den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = n.checked_neg().unwrap_or_else(|| overflow("new"));
            d = d.checked_neg().unwrap_or_else(|| overflow("new"));
        }
        Rational { num: n, den: d }
    }

    pub const fn int(n: i128) -> Rational {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn signum(&self) -> i32 {
        self.num.signum() as i32
    }

    pub fn abs(&self) -> Rational {
        if self.num < 0 {
            -*self
        } else {
            *self
        }
    }

    pub fn floor(&self) -> Rational {
        Rational::int(self.num.div_euclid(self.den))
    }

    pub fn ceil(&self) -> Rational {
        let f = self.num.div_euclid(self.den);
        if f * self.den == self.num {
            Rational::int(f)
        } else {
            Rational::int(f + 1)
        }
    }

    pub fn recip(&self) -> Rational {
        Rational::new(self.den, self.num)
    }

    /// Lossy conversion for display and plotting only.
    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn checked_add(self, o: Rational) -> Option<Rational> {
        let g = gcd(self.den, o.den);
        let a = self.num.checked_mul(o.den / g)?;
        let b = o.num.checked_mul(self.den / g)?;
        let d = (self.den / g).checked_mul(o.den)?;
        Some(Rational::new(a.checked_add(b)?, d))
    }

    pub fn checked_mul(self, o: Rational) -> Option<Rational> {
        let g1 = gcd(self.num, o.den).max(1);
        let g2 = gcd(o.num, self.den).max(1);
        let n = (self.num / g1).checked_mul(o.num / g2)?;
        let d = (self.den / g2).checked_mul(o.den / g1)?;
        Some(Rational::new(n, d))
    }

    pub fn min(self, o: Rational) -> Rational {
        if o < self {
            o
        } else {
            self
        }
    }

    pub fn max(self, o: Rational) -> Rational {
        if o > self {
            o
        } else {
            self
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::int(n as i128)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::int(n as i128)
    }
}

impl From<usize> for Rational {
    fn from(n: usize) -> Self {
        Rational::int(n as i128)
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, o: Rational) -> Rational {
        self.checked_add(o).unwrap_or_else(|| overflow("add"))
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, o: Rational) -> Rational {
        self + (-o)
    }
}

impl Mul for Rational {
    type Output = Rational;
    fn mul(self, o: Rational) -> Rational {
        self.checked_mul(o).unwrap_or_else(|| overflow("mul"))
    }
}

impl Div for Rational {
    type Output = Rational;
    fn div(self, o: Rational) -> Rational {
        assert!(!o.is_zero(), "division by zero");
        self * o.recip()
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: self.num.checked_neg().unwrap_or_else(|| overflow("neg")),
            den: self.den,
        }
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, o: Rational) {
        *self = *self + o;
    }
}

impl SubAssign for Rational {
    fn sub_assign(&mut self, o: Rational) {
        *self = *self - o;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::ZERO, |a, b| a + *b)
    }
}

impl Ord for Rational {
    fn cmp(&self, o: &Rational) -> Ordering {
        if self.den == o.den {
            return self.num.cmp(&o.num);
        }
        match (self.num.checked_mul(o.den), o.num.checked_mul(self.den)) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => {
                // compare integer parts first, then the fractional remainders
                let (fa, fb) = (self.num.div_euclid(self.den), o.num.div_euclid(o.den));
                if fa != fb {
                    return fa.cmp(&fb);
                }
                let ra = Rational::new(self.num.rem_euclid(self.den), self.den);
                let rb = Rational::new(o.num.rem_euclid(o.den), o.den);
                if ra.is_zero() || rb.is_zero() {
                    return ra.num.cmp(&rb.num);
                }
                rb.recip().cmp(&ra.recip())
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, o: &Rational) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{0}`")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `p`, `p/q` and plain decimals such as `6.5`.
    fn from_str(s: &str) -> Result<Rational, ParseRationalError> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: i128 = p.trim().parse().map_err(|_| err())?;
            let q: i128 = q.trim().parse().map_err(|_| err())?;
            if q == 0 {
                return Err(err());
            }
            return Ok(Rational::new(p, q));
        }
        if let Some((ip, fp)) = t.split_once('.') {
            if fp.is_empty() || !fp.bytes().all(|b| b.is_ascii_digit()) || fp.len() > 30 {
                return Err(err());
            }
            let neg = ip.starts_with('-');
            let ipv: i128 = if ip.is_empty() || ip == "-" || ip == "+" {
                0
            } else {
                ip.parse().map_err(|_| err())?
            };
            let scale = 10i128.checked_pow(fp.len() as u32).ok_or_else(err)?;
            let fpv: i128 = fp.parse().map_err(|_| err())?;
            let whole = Rational::int(ipv.abs()) + Rational::new(fpv, scale);
            return Ok(if neg { -whole } else { whole });
        }
        let p: i128 = t.parse().map_err(|_| err())?;
        Ok(Rational::int(p))
    }
}

/// Shorthand for `Rational::new`.
pub fn q(num: i128, den: i128) -> Rational {
    Rational::new(num, den)
}

/// Shorthand for an integer rational.
pub fn r(n: i128) -> Rational {
    Rational::int(n)
}
