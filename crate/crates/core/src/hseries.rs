//! Polynomials in the base variables and truncated ℏ-series of them.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::coeff::CRational;
use crate::error::{Error, Result};
use crate::mono::Exps;
use crate::profile::Profile;

/// Sparse polynomial in x₁..x_d; no stored zeros.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct TruncPoly {
    pub terms: BTreeMap<Exps, CRational>,
}

impl TruncPoly {
    pub fn zero() -> Self {
        TruncPoly::default()
    }

    pub fn constant(c: CRational) -> Self {
        let mut p = TruncPoly::zero();
        p.add_term(Exps::ZERO, &c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: Exps, c: &CRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn constant_term(&self) -> CRational {
        self.terms
            .get(&Exps::ZERO)
            .cloned()
            .unwrap_or_else(CRational::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.degree()).max()
    }

    pub fn scale(&self, c: &CRational) -> TruncPoly {
        if c.is_zero() {
            return TruncPoly::zero();
        }
        TruncPoly {
            terms: self.terms.iter().map(|(e, v)| (*e, v * c)).collect(),
        }
    }

    pub fn add(&self, o: &TruncPoly) -> TruncPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, c);
        }
        r
    }

    pub fn sub(&self, o: &TruncPoly) -> TruncPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, &-c);
        }
        r
    }

    /// Product keeping total degree ≤ `bound`.
    pub fn mul_trunc(&self, o: &TruncPoly, bound: u32) -> TruncPoly {
        let mut r = TruncPoly::zero();
        for (e1, c1) in &self.terms {
            let d1 = e1.degree();
            for (e2, c2) in &o.terms {
                if d1 + e2.degree() <= bound {
                    r.add_term(e1.add(e2), &(c1 * c2));
                }
            }
        }
        r
    }

    pub fn deriv(&self, i: usize) -> TruncPoly {
        let mut r = TruncPoly::zero();
        for (e, c) in &self.terms {
            if let Some(f) = e.dec(i) {
                r.add_term(f, &c.scale_int(e.get(i) as i64));
            }
        }
        r
    }

    pub fn truncate(&self, bound: u32) -> TruncPoly {
        TruncPoly {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() <= bound)
                .map(|(e, c)| (*e, c.clone()))
                .collect(),
        }
    }
}

/// Element of 𝒪[[ℏ]] truncated by a [`Profile`]: `ℏ^k x^a` kept iff `k ≤ N`, `|a| ≤ Dx`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HSeries {
    profile: Profile,
    coeffs: BTreeMap<u32, TruncPoly>,
}

impl HSeries {
    pub fn zero(p: &Profile) -> Self {
        HSeries {
            profile: *p,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(p: &Profile) -> Self {
        Self::constant(p, CRational::one())
    }

    pub fn constant(p: &Profile, c: CRational) -> Self {
        let mut s = Self::zero(p);
        s.add_term(0, Exps::ZERO, &c);
        s
    }

    pub fn from_int(p: &Profile, n: i64) -> Self {
        Self::constant(p, CRational::from_int(n))
    }

    pub fn monomial(p: &Profile, k: u32, e: Exps, c: CRational) -> Self {
        let mut s = Self::zero(p);
        s.add_term(k, e, &c);
        s
    }

    /// ℏ^k
    pub fn hbar_pow(p: &Profile, k: u32) -> Self {
        Self::monomial(p, k, Exps::ZERO, CRational::one())
    }

    /// x_i (0-based).
    pub fn x(p: &Profile, i: usize) -> Self {
        Self::monomial(p, 0, Exps::unit(i), CRational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, Exps, CRational)>>(p: &Profile, it: I) -> Self {
        let mut s = Self::zero(p);
        for (k, e, c) in it {
            s.add_term(k, e, &c);
        }
        s
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn coeffs(&self) -> &BTreeMap<u32, TruncPoly> {
        &self.coeffs
    }

    /// Coefficient of ℏ^k.
    pub fn coeff(&self, k: u32) -> TruncPoly {
        self.coeffs.get(&k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.values().map(|p| p.terms.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn fits(&self, k: u32, e: &Exps) -> bool {
        k <= self.profile.hbar_order && e.degree() <= self.profile.x_degree
    }

    /// Adds `c ℏ^k x^e` unless it lies outside the profile.
    pub fn add_term(&mut self, k: u32, e: Exps, c: &CRational) {
        if c.is_zero() || !self.fits(k, &e) {
            return;
        }
        let p = self.coeffs.entry(k).or_default();
        p.add_term(e, c);
        if p.is_zero() {
            self.coeffs.remove(&k);
        }
    }

    /// Terms in canonical order (ℏ-power, then x lex).
    pub fn terms(&self) -> impl Iterator<Item = (u32, &Exps, &CRational)> {
        self.coeffs
            .iter()
            .flat_map(|(k, p)| p.terms.iter().map(move |(e, c)| (*k, e, c)))
    }

    pub fn get(&self, k: u32, e: &Exps) -> CRational {
        self.coeffs
            .get(&k)
            .and_then(|p| p.terms.get(e))
            .cloned()
            .unwrap_or_else(CRational::zero)
    }

    /// ℏ⁰x⁰ coefficient.
    pub fn constant_term(&self) -> CRational {
        self.get(0, &Exps::ZERO)
    }

    /// True if the only term (if any) is ℏ⁰x⁰.
    pub fn is_scalar(&self) -> bool {
        self.terms().all(|(k, e, _)| k == 0 && e.is_zero())
    }

    /// Constant in x (any ℏ-dependence allowed).
    pub fn is_x_constant(&self) -> bool {
        self.terms().all(|(_, e, _)| e.is_zero())
    }

    pub fn hbar_valuation(&self) -> Option<u32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_x_degree(&self) -> Option<u32> {
        self.terms().map(|(_, e, _)| e.degree()).max()
    }

    pub fn scale(&self, c: &CRational) -> HSeries {
        if c.is_zero() {
            return HSeries::zero(&self.profile);
        }
        HSeries {
            profile: self.profile,
            coeffs: self.coeffs.iter().map(|(k, p)| (*k, p.scale(c))).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> HSeries {
        self.scale(&CRational::from_int(n))
    }

    /// Multiplication by ℏ^j.
    pub fn shift_hbar(&self, j: u32) -> HSeries {
        let mut r = HSeries::zero(&self.profile);
        for (k, e, c) in self.terms() {
            r.add_term(k + j, *e, c);
        }
        r
    }

    /// Exact division by ℏ^j.
    pub fn div_hbar(&self, j: u32) -> Result<HSeries> {
        if let Some(v) = self.hbar_valuation() {
            if v < j {
                return Err(Error::NonDivisible(j));
            }
        }
        let mut r = HSeries::zero(&self.profile);
        for (k, e, c) in self.terms() {
            r.add_term(k - j, *e, c);
        }
        Ok(r)
    }

    pub fn deriv(&self, i: usize) -> HSeries {
        let mut r = HSeries::zero(&self.profile);
        for (k, p) in &self.coeffs {
            let d = p.deriv(i);
            if !d.is_zero() {
                r.coeffs.insert(*k, d);
            }
        }
        r
    }

    /// ∂^α
    pub fn deriv_multi(&self, alpha: &Exps) -> HSeries {
        let mut r = self.clone();
        for i in 0..self.profile.dim {
            for _ in 0..alpha.get(i) {
                r = r.deriv(i);
                if r.is_zero() {
                    return r;
                }
            }
        }
        r
    }

    /// Projection onto a (smaller) profile.
    pub fn reduce(&self, p: &Profile) -> HSeries {
        let mut r = HSeries::zero(p);
        for (k, e, c) in self.terms() {
            r.add_term(k, *e, c);
        }
        r
    }

    /// Keeps terms of ℏ-order `≤ n`.
    pub fn truncate_hbar(&self, n: u32) -> HSeries {
        HSeries {
            profile: self.profile,
            coeffs: self
                .coeffs
                .range(..=n)
                .map(|(k, p)| (*k, p.clone()))
                .collect(),
        }
    }

    /// Keeps terms of x-degree `≤ d`.
    pub fn truncate_x(&self, d: u32) -> HSeries {
        let mut r = HSeries::zero(&self.profile);
        for (k, e, c) in self.terms() {
            if e.degree() <= d {
                r.add_term(k, *e, c);
            }
        }
        r
    }

    /// Value at x = 0 as an ℏ-series.
    pub fn at_origin(&self) -> HSeries {
        let mut r = HSeries::zero(&self.profile);
        for (k, e, c) in self.terms() {
            if e.is_zero() {
                r.add_term(k, *e, c);
            }
        }
        r
    }

    /// Neumann inverse: requires a nonzero ℏ⁰x⁰ coefficient.
    pub fn series_invert(&self) -> Result<HSeries> {
        let c0 = self.constant_term();
        let c0inv = c0.inv().ok_or(Error::NonInvertible)?;
        // s = c0 (1 - u), u = 1 - s/c0; s^{-1} = c0^{-1} Σ u^n
        let one = HSeries::one(&self.profile);
        let u = &one - &self.scale(&c0inv);
        let mut acc = one.clone();
        let mut pw = one;
        loop {
            pw = &pw * &u;
            if pw.is_zero() {
                break;
            }
            acc = &acc + &pw;
        }
        Ok(acc.scale(&c0inv))
    }

    /// Substitute x ↦ M x (linear change of variables, `m[i][j]` the coefficient of x_j in the new x_i).
    pub fn substitute_linear(&self, m: &[Vec<CRational>]) -> HSeries {
        let p = self.profile;
        let lin: Vec<HSeries> = (0..p.dim)
            .map(|i| {
                let mut s = HSeries::zero(&p);
                for j in 0..p.dim {
                    s.add_term(0, Exps::unit(j), &m[i][j]);
                }
                s
            })
            .collect();
        let mut r = HSeries::zero(&p);
        for (k, e, c) in self.terms() {
            let mut t = HSeries::monomial(&p, k, Exps::ZERO, c.clone());
            for i in 0..p.dim {
                for _ in 0..e.get(i) {
                    t = &t * &lin[i];
                }
            }
            r = &r + &t;
        }
        r
    }

    fn check(&self, o: &HSeries) {
        assert_eq!(self.profile, o.profile, "profile mismatch");
    }
}

impl<'a> Add<&'a HSeries> for &'a HSeries {
    type Output = HSeries;
    fn add(self, o: &HSeries) -> HSeries {
        self.check(o);
        let mut r = self.clone();
        for (k, e, c) in o.terms() {
            r.add_term(k, *e, c);
        }
        r
    }
}

impl<'a> Sub<&'a HSeries> for &'a HSeries {
    type Output = HSeries;
    fn sub(self, o: &HSeries) -> HSeries {
        self.check(o);
        let mut r = self.clone();
        for (k, e, c) in o.terms() {
            r.add_term(k, *e, &-c);
        }
        r
    }
}

impl<'a> Mul<&'a HSeries> for &'a HSeries {
    type Output = HSeries;
    fn mul(self, o: &HSeries) -> HSeries {
        self.check(o);
        let p = self.profile;
        let mut r = HSeries::zero(&p);
        for (k1, p1) in &self.coeffs {
            for (k2, p2) in &o.coeffs {
                let k = k1 + k2;
                if k > p.hbar_order {
                    break;
                }
                let prod = p1.mul_trunc(p2, p.x_degree);
                if prod.is_zero() {
                    continue;
                }
                let slot = r.coeffs.entry(k).or_default();
                *slot = slot.add(&prod);
                if slot.is_zero() {
                    r.coeffs.remove(&k);
                }
            }
        }
        r
    }
}

impl Neg for &HSeries {
    type Output = HSeries;
    fn neg(self) -> HSeries {
        self.scale(&CRational::from_int(-1))
    }
}

impl Add for HSeries {
    type Output = HSeries;
    fn add(self, o: HSeries) -> HSeries {
        &self + &o
    }
}

impl Sub for HSeries {
    type Output = HSeries;
    fn sub(self, o: HSeries) -> HSeries {
        &self - &o
    }
}

impl Mul for HSeries {
    type Output = HSeries;
    fn mul(self, o: HSeries) -> HSeries {
        &self * &o
    }
}

impl Neg for HSeries {
    type Output = HSeries;
    fn neg(self) -> HSeries {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Profile {
        Profile::desk()
    }

    #[test]
    fn invert_geometric() {
        let p = p();
        let b = CRational::from_frac(3, 2);
        let s = &HSeries::one(&p) - &HSeries::hbar_pow(&p, 1).scale(&b);
        let inv = s.series_invert().unwrap();
        // oracle: 1 + bℏ + … + b^Nℏ^N by repeated multiplication of b
        let mut expect = HSeries::zero(&p);
        let mut bk = CRational::one();
        for k in 0..=p.hbar_order {
            expect.add_term(k, Exps::ZERO, &bk);
            bk = &bk * &b;
        }
        assert_eq!(inv, expect);
        assert_eq!(&s * &inv, HSeries::one(&p));
    }

    #[test]
    fn invert_trivial_cases() {
        let p = p();
        assert_eq!(HSeries::one(&p).series_invert().unwrap(), HSeries::one(&p));
        let hx = &HSeries::hbar_pow(&p, 1) * &HSeries::x(&p, 0);
        assert_eq!(hx.series_invert(), Err(Error::NonInvertible));
    }

    #[test]
    fn reduce_examples() {
        let p = p();
        assert!(HSeries::hbar_pow(&p, p.hbar_order + 1).is_zero());
        let p1 = p.with_hbar(1);
        let a = &HSeries::one(&p) + &HSeries::hbar_pow(&p, 1);
        let sq = (&a * &a).reduce(&p1);
        let expect = &HSeries::one(&p1) + &HSeries::hbar_pow(&p1, 1).scale_int(2);
        assert_eq!(sq, expect);
        assert_eq!(sq.reduce(&p1), sq);
    }

    #[test]
    fn division_by_hbar() {
        let p = p();
        let a = &HSeries::hbar_pow(&p, 2) * &HSeries::x(&p, 1);
        assert_eq!(a.div_hbar(2).unwrap(), HSeries::x(&p, 1));
        assert_eq!(a.div_hbar(3), Err(Error::NonDivisible(3)));
    }

    #[test]
    fn invert_with_x_dependence() {
        let p = p();
        let s = &HSeries::from_int(&p, 2) + &(&HSeries::x(&p, 0) + &HSeries::hbar_pow(&p, 1));
        let inv = s.series_invert().unwrap();
        assert_eq!(&s * &inv, HSeries::one(&p));
    }
}
