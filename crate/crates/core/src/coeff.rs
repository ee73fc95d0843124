//! Exact scalars in ℚ(i).

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// A Gaussian rational `re + im·i`. Both parts are kept in lowest terms by `BigRational`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct CRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRational { re, im }
    }

    pub fn zero() -> Self {
        CRational {
            re: BigRational::zero(),
            im: BigRational::zero(),
        }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn i() -> Self {
        CRational {
            re: BigRational::zero(),
            im: BigRational::one(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        CRational {
            re: BigRational::from_integer(BigInt::from(n)),
            im: BigRational::zero(),
        }
    }

    pub fn from_frac(p: i64, q: i64) -> Self {
        assert!(q != 0, "zero denominator");
        CRational {
            re: BigRational::new(BigInt::from(p), BigInt::from(q)),
            im: BigRational::zero(),
        }
    }

    pub fn from_parts(re: (i64, i64), im: (i64, i64)) -> Self {
        CRational {
            re: BigRational::new(BigInt::from(re.0), BigInt::from(re.1)),
            im: BigRational::new(BigInt::from(im.0), BigInt::from(im.1)),
        }
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
        CRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.im.is_zero() {
            return Some(CRational {
                re: self.re.recip(),
                im: BigRational::zero(),
            });
        }
        let n = &self.re * &self.re + &self.im * &self.im;
        Some(CRational {
            re: &self.re / &n,
            im: -(&self.im / &n),
        })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = CRational::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale_int(&self, n: i64) -> Self {
        let k = BigRational::from_integer(BigInt::from(n));
        CRational {
            re: &self.re * &k,
            im: &self.im * &k,
        }
    }
}

fn fmt_rat(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for CRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*i", fmt_rat(&self.re), fmt_rat(&self.im))
    }
}

impl fmt::Debug for CRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_rat(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    match s.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(p, q))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

impl FromStr for CRational {
    type Err = Error;

    /// Accepts `p/q+r/s*i`, `p/q-r/s*i`, `p/q`, `p`, `r/s*i`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(body) = s.strip_suffix("*i") {
            // split at the last sign that is not at position 0 and not after another sign
            let bytes = body.as_bytes();
            let mut split = None;
            for k in (1..bytes.len()).rev() {
                let c = bytes[k];
                if (c == b'+' || c == b'-') && bytes[k - 1] != b'+' && bytes[k - 1] != b'-' {
                    split = Some(k);
                    break;
                }
            }
            match split {
                Some(k) => {
                    let re = parse_rat(&body[..k])?;
                    let im_str = &body[k..];
                    let im_str = im_str.strip_prefix('+').unwrap_or(im_str);
                    let im = parse_rat(im_str)?;
                    Ok(CRational { re, im })
                }
                None => Ok(CRational {
                    re: BigRational::zero(),
                    im: parse_rat(body)?,
                }),
            }
        } else {
            Ok(CRational {
                re: parse_rat(s)?,
                im: BigRational::zero(),
            })
        }
    }
}

impl<'a> Add<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn add(self, o: &CRational) -> CRational {
        CRational {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }
}

impl<'a> Sub<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn sub(self, o: &CRational) -> CRational {
        CRational {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }
}

impl<'a> Mul<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn mul(self, o: &CRational) -> CRational {
        if self.im.is_zero() && o.im.is_zero() {
            return CRational {
                re: &self.re * &o.re,
                im: BigRational::zero(),
            };
        }
        CRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a CRational> for &'a CRational {
    type Output = CRational;
    fn div(self, o: &CRational) -> CRational {
        self * &o.inv().expect("division by zero")
    }
}

impl Add for CRational {
    type Output = CRational;
    fn add(self, o: CRational) -> CRational {
        &self + &o
    }
}

impl Sub for CRational {
    type Output = CRational;
    fn sub(self, o: CRational) -> CRational {
        &self - &o
    }
}

impl Mul for CRational {
    type Output = CRational;
    fn mul(self, o: CRational) -> CRational {
        &self * &o
    }
}

impl Div for CRational {
    type Output = CRational;
    fn div(self, o: CRational) -> CRational {
        &self / &o
    }
}

impl Neg for CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        CRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &CRational {
    type Output = CRational;
    fn neg(self) -> CRational {
        CRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

impl AddAssign<&CRational> for CRational {
    fn add_assign(&mut self, o: &CRational) {
        self.re += &o.re;
        if !o.im.is_zero() {
            self.im += &o.im;
        }
    }
}

impl SubAssign<&CRational> for CRational {
    fn sub_assign(&mut self, o: &CRational) {
        self.re -= &o.re;
        if !o.im.is_zero() {
            self.im -= &o.im;
        }
    }
}

impl From<i64> for CRational {
    fn from(n: i64) -> Self {
        CRational::from_int(n)
    }
}

impl CRational {
    /// Sign of the real part, used only for pretty output.
    pub fn re_is_negative(&self) -> bool {
        self.re.is_negative()
    }
}
