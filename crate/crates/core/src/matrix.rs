//! Small square matrices over exact scalars and over truncated series.

use crate::coeff::CRational;
use crate::error::{Error, Result};
use crate::hseries::HSeries;
use crate::profile::Profile;

/// Dense n×n matrix of scalars.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ScalarMatrix {
    pub n: usize,
    pub e: Vec<CRational>,
}

impl ScalarMatrix {
    pub fn zero(n: usize) -> Self {
        ScalarMatrix {
            n,
            e: vec![CRational::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.e[i * n + i] = CRational::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<CRational>]) -> Self {
        let n = rows.len();
        ScalarMatrix {
            n,
            e: rows.iter().flat_map(|r| r.iter().cloned()).collect(),
        }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        let n = rows.len();
        ScalarMatrix {
            n,
            e: rows
                .iter()
                .flat_map(|r| r.iter().map(|&v| CRational::from_int(v)))
                .collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &CRational {
        &self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CRational) {
        self.e[i * self.n + j] = v;
    }

    pub fn mul(&self, o: &ScalarMatrix) -> ScalarMatrix {
        let n = self.n;
        let mut r = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = CRational::zero();
                for k in 0..n {
                    acc += &(self.get(i, k) * o.get(k, j));
                }
                r.set(i, j, acc);
            }
        }
        r
    }

    pub fn add(&self, o: &ScalarMatrix) -> ScalarMatrix {
        ScalarMatrix {
            n: self.n,
            e: self.e.iter().zip(&o.e).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, c: &CRational) -> ScalarMatrix {
        ScalarMatrix {
            n: self.n,
            e: self.e.iter().map(|a| a * c).collect(),
        }
    }

    pub fn transpose(&self) -> ScalarMatrix {
        let mut r = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                r.set(i, j, self.get(j, i).clone());
            }
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(CRational::is_zero)
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Option<ScalarMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if piv != col {
                for j in 0..n {
                    a.e.swap(piv * n + j, col * n + j);
                    inv.e.swap(piv * n + j, col * n + j);
                }
            }
            let d = a.get(col, col).inv()?;
            for j in 0..n {
                let v = a.get(col, j) * &d;
                a.set(col, j, v);
                let v = inv.get(col, j) * &d;
                inv.set(col, j, v);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for j in 0..n {
                    let v = a.get(r, j) - &(&f * a.get(col, j));
                    a.set(r, j, v);
                    let v = inv.get(r, j) - &(&f * inv.get(col, j));
                    inv.set(r, j, v);
                }
            }
        }
        Some(inv)
    }
}

/// Dense n×n matrix of [`HSeries`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesMatrix {
    pub profile: Profile,
    pub n: usize,
    pub e: Vec<HSeries>,
}

impl SeriesMatrix {
    pub fn zero(p: &Profile, n: usize) -> Self {
        SeriesMatrix {
            profile: *p,
            n,
            e: vec![HSeries::zero(p); n * n],
        }
    }

    pub fn identity(p: &Profile, n: usize) -> Self {
        let mut m = Self::zero(p, n);
        for i in 0..n {
            m.e[i * n + i] = HSeries::one(p);
        }
        m
    }

    pub fn from_scalar(p: &Profile, s: &ScalarMatrix) -> Self {
        SeriesMatrix {
            profile: *p,
            n: s.n,
            e: s.e
                .iter()
                .map(|c| HSeries::constant(p, c.clone()))
                .collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &HSeries {
        &self.e[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: HSeries) {
        self.e[i * self.n + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.e.iter().all(HSeries::is_zero)
    }

    pub fn mul(&self, o: &SeriesMatrix) -> SeriesMatrix {
        let n = self.n;
        let mut r = Self::zero(&self.profile, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = HSeries::zero(&self.profile);
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &(a * b);
                }
                r.set(i, j, acc);
            }
        }
        r
    }

    pub fn add(&self, o: &SeriesMatrix) -> SeriesMatrix {
        SeriesMatrix {
            profile: self.profile,
            n: self.n,
            e: self.e.iter().zip(&o.e).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &SeriesMatrix) -> SeriesMatrix {
        SeriesMatrix {
            profile: self.profile,
            n: self.n,
            e: self.e.iter().zip(&o.e).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &CRational) -> SeriesMatrix {
        SeriesMatrix {
            profile: self.profile,
            n: self.n,
            e: self.e.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn scale_series(&self, s: &HSeries) -> SeriesMatrix {
        SeriesMatrix {
            profile: self.profile,
            n: self.n,
            e: self.e.iter().map(|a| a * s).collect(),
        }
    }

    pub fn map<F: Fn(&HSeries) -> HSeries>(&self, f: F) -> SeriesMatrix {
        SeriesMatrix {
            profile: self.profile,
            n: self.n,
            e: self.e.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> SeriesMatrix {
        let mut r = Self::zero(&self.profile, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                r.set(i, j, self.get(j, i).clone());
            }
        }
        r
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == &-self.get(j, i)))
    }

    /// Coefficient matrix at ℏ = 0, x = 0.
    pub fn constant_part(&self) -> ScalarMatrix {
        ScalarMatrix {
            n: self.n,
            e: self.e.iter().map(HSeries::constant_term).collect(),
        }
    }

    pub fn reduce(&self, p: &Profile) -> SeriesMatrix {
        SeriesMatrix {
            profile: *p,
            n: self.n,
            e: self.e.iter().map(|a| a.reduce(p)).collect(),
        }
    }

    /// Inverse via the constant part and a Neumann series.
    pub fn inverse(&self) -> Result<SeriesMatrix> {
        let c = self.constant_part().inverse().ok_or(Error::NonInvertible)?;
        let cinv = SeriesMatrix::from_scalar(&self.profile, &c);
        // self = C (1 - U) with U = 1 - C⁻¹ self
        let one = SeriesMatrix::identity(&self.profile, self.n);
        let u = one.sub(&cinv.mul(self));
        let mut acc = one.clone();
        let mut pw = one;
        loop {
            pw = pw.mul(&u);
            if pw.is_zero() {
                break;
            }
            acc = acc.add(&pw);
        }
        Ok(acc.mul(&cinv))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_inverse() {
        let m = ScalarMatrix::from_ints(&[&[0, 1, 2], &[-1, 0, 3], &[1, 1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), ScalarMatrix::identity(3));
        assert!(ScalarMatrix::from_ints(&[&[1, 2], &[2, 4]])
            .inverse()
            .is_none());
    }

    #[test]
    fn series_inverse() {
        let p = Profile::desk();
        let j = SeriesMatrix::from_scalar(&p, &ScalarMatrix::from_ints(&[&[0, 1], &[-1, 0]]));
        let m = j.add(
            &SeriesMatrix::identity(&p, 2)
                .scale_series(&(&HSeries::hbar_pow(&p, 1) + &HSeries::x(&p, 0))),
        );
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), SeriesMatrix::identity(&p, 2));
        assert_eq!(inv.mul(&m), SeriesMatrix::identity(&p, 2));
    }
}
