//! Sections of Ω•(U, 𝒮M)[[ℏ]] on a chart: polynomials in x, y, Grassmann dx, and ℏ.
//!
//! Terms `ℏ^k x^a y^b dx^S` are kept iff `k ≤ N` and `2k + |a| + |b| + |S| ≤ Dy`. Every
//! operation of the Weyl calculus (fiber products, ∇, δ, δ⁻¹, σ, normalizer substitutions)
//! is non-decreasing in this weight, so the quotient is exact.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use crate::coeff::CRational;
use crate::error::{Error, Result};
use crate::hseries::HSeries;
use crate::mono::{Exps, GSet};
use crate::profile::Profile;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct WMono {
    pub k: u32,
    pub x: Exps,
    pub y: Exps,
    pub dx: GSet,
}

impl WMono {
    pub fn weight(&self) -> u32 {
        2 * self.k + self.x.degree() + self.y.degree() + self.dx.len()
    }

    /// 2k + |y| + |dx|
    pub fn filtration(&self) -> u32 {
        2 * self.k + self.y.degree() + self.dx.len()
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeylElement {
    profile: Profile,
    terms: BTreeMap<WMono, CRational>,
}

impl WeylElement {
    pub fn zero(p: &Profile) -> Self {
        WeylElement {
            profile: *p,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(p: &Profile) -> Self {
        Self::constant(p, CRational::one())
    }

    pub fn constant(p: &Profile, c: CRational) -> Self {
        Self::monomial(p, 0, Exps::ZERO, Exps::ZERO, GSet::EMPTY, c)
    }

    pub fn monomial(p: &Profile, k: u32, x: Exps, y: Exps, dx: GSet, c: CRational) -> Self {
        let mut w = Self::zero(p);
        w.add_term(WMono { k, x, y, dx }, &c);
        w
    }

    pub fn y(p: &Profile, i: usize) -> Self {
        Self::monomial(
            p,
            0,
            Exps::ZERO,
            Exps::unit(i),
            GSet::EMPTY,
            CRational::one(),
        )
    }

    pub fn dx(p: &Profile, i: usize) -> Self {
        Self::monomial(
            p,
            0,
            Exps::ZERO,
            Exps::ZERO,
            GSet::single(i),
            CRational::one(),
        )
    }

    pub fn hbar_pow(p: &Profile, k: u32) -> Self {
        Self::monomial(p, k, Exps::ZERO, Exps::ZERO, GSet::EMPTY, CRational::one())
    }

    /// Embeds a base series as a 0-form constant along the fibers.
    pub fn from_hseries(p: &Profile, s: &HSeries) -> Self {
        let mut w = Self::zero(p);
        for (k, e, c) in s.terms() {
            w.add_term(
                WMono {
                    k,
                    x: *e,
                    y: Exps::ZERO,
                    dx: GSet::EMPTY,
                },
                c,
            );
        }
        w
    }

    pub fn from_terms<I: IntoIterator<Item = (WMono, CRational)>>(p: &Profile, it: I) -> Self {
        let mut w = Self::zero(p);
        for (m, c) in it {
            w.add_term(m, &c);
        }
        w
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn terms(&self) -> &BTreeMap<WMono, CRational> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn fits(&self, m: &WMono) -> bool {
        m.k <= self.profile.hbar_order && m.weight() <= self.profile.weyl_bound()
    }

    pub fn add_term(&mut self, m: WMono, c: &CRational) {
        if c.is_zero() || !self.fits(&m) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn get(&self, m: &WMono) -> CRational {
        self.terms.get(m).cloned().unwrap_or_else(CRational::zero)
    }

    /// min over terms of 2k + |y| + |dx|.
    pub fn filtration_degree(&self) -> Result<u32> {
        self.terms
            .keys()
            .map(|m| m.filtration())
            .min()
            .ok_or(Error::ZeroElement)
    }

    pub fn hbar_valuation(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.k).min()
    }

    /// Common dx-degree, if homogeneous (zero counts as degree 0).
    pub fn dx_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.dx.len());
        match it.next() {
            None => Some(0),
            Some(d) => it.all(|e| e == d).then_some(d),
        }
    }

    pub fn dx_part(&self, q: u32) -> WeylElement {
        self.filter(|m| m.dx.len() == q)
    }

    pub fn filter<F: Fn(&WMono) -> bool>(&self, f: F) -> WeylElement {
        WeylElement {
            profile: self.profile,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| f(m))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn map_terms<F: Fn(&WMono, &CRational) -> Option<(WMono, CRational)>>(
        &self,
        f: F,
    ) -> WeylElement {
        let mut r = WeylElement::zero(&self.profile);
        for (m, c) in &self.terms {
            if let Some((m2, c2)) = f(m, c) {
                r.add_term(m2, &c2);
            }
        }
        r
    }

    pub fn scale(&self, c: &CRational) -> WeylElement {
        if c.is_zero() {
            return WeylElement::zero(&self.profile);
        }
        WeylElement {
            profile: self.profile,
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
        }
    }

    pub fn scale_int(&self, n: i64) -> WeylElement {
        self.scale(&CRational::from_int(n))
    }

    pub fn shift_hbar(&self, j: u32) -> WeylElement {
        self.map_terms(|m, c| Some((WMono { k: m.k + j, ..*m }, c.clone())))
    }

    pub fn div_hbar(&self, j: u32) -> Result<WeylElement> {
        if self.terms.keys().any(|m| m.k < j) {
            return Err(Error::NonDivisible(j));
        }
        Ok(self.map_terms(|m, c| Some((WMono { k: m.k - j, ..*m }, c.clone()))))
    }

    pub fn reduce(&self, p: &Profile) -> WeylElement {
        WeylElement::from_terms(p, self.terms.iter().map(|(m, c)| (*m, c.clone())))
    }

    /// Keeps terms of ℏ-order `< n`.
    pub fn mod_hbar(&self, n: u32) -> WeylElement {
        self.filter(|m| m.k < n)
    }

    pub fn deriv_x(&self, i: usize) -> WeylElement {
        self.map_terms(|m, c| {
            m.x.dec(i)
                .map(|x| (WMono { x, ..*m }, c.scale_int(m.x.get(i) as i64)))
        })
    }

    pub fn deriv_y(&self, i: usize) -> WeylElement {
        self.map_terms(|m, c| {
            m.y.dec(i)
                .map(|y| (WMono { y, ..*m }, c.scale_int(m.y.get(i) as i64)))
        })
    }

    pub fn deriv_y_multi(&self, alpha: &Exps) -> WeylElement {
        let mut r = self.clone();
        for i in 0..self.profile.dim {
            for _ in 0..alpha.get(i) {
                r = r.deriv_y(i);
            }
        }
        r
    }

    /// Left derivative ∂/∂(dx^i).
    pub fn deriv_dx(&self, i: usize) -> WeylElement {
        self.map_terms(|m, c| {
            if !m.dx.contains(i) {
                return None;
            }
            let sign = m.dx.count_below(i) % 2 == 1;
            Some((
                WMono {
                    dx: m.dx.without(i),
                    ..*m
                },
                if sign { -c } else { c.clone() },
            ))
        })
    }

    /// Multiplication by y^i.
    pub fn mul_y(&self, i: usize) -> WeylElement {
        self.map_terms(|m, c| {
            Some((
                WMono {
                    y: m.y.inc(i),
                    ..*m
                },
                c.clone(),
            ))
        })
    }

    /// Left multiplication by dx^i.
    pub fn dx_wedge(&self, i: usize) -> WeylElement {
        self.map_terms(|m, c| {
            let (dx, neg) = GSet::single(i).wedge(&m.dx)?;
            Some((WMono { dx, ..*m }, if neg { -c } else { c.clone() }))
        })
    }

    /// Product with a base series (even, so no signs).
    pub fn mul_hseries(&self, s: &HSeries) -> WeylElement {
        self * &WeylElement::from_hseries(&self.profile, s)
    }

    /// σ: y = dx = 0, landing in the base series ring of the same profile.
    pub fn sigma(&self) -> HSeries {
        let mut r = HSeries::zero(&self.profile);
        for (m, c) in &self.terms {
            if m.y.is_zero() && m.dx.is_empty() {
                r.add_term(m.k, m.x, c);
            }
        }
        r
    }

    /// δ = dx^i ∂/∂y^i.
    pub fn delta(&self) -> WeylElement {
        let mut r = WeylElement::zero(&self.profile);
        for i in 0..self.profile.dim {
            r = &r + &self.deriv_y(i).dx_wedge(i);
        }
        r
    }

    /// δ⁻¹: on y^p dx^q with q > 0, (1/(p+q)) y^k ∂/∂dx^k; zero when q = 0.
    pub fn delta_inv(&self) -> WeylElement {
        let mut r = WeylElement::zero(&self.profile);
        for (m, c) in &self.terms {
            let q = m.dx.len();
            if q == 0 {
                continue;
            }
            let p = m.y.degree();
            let f = c * &CRational::from_frac(1, (p + q) as i64);
            for kx in m.dx.indices() {
                let sign = m.dx.count_below(kx) % 2 == 1;
                let nm = WMono {
                    y: m.y.inc(kx),
                    dx: m.dx.without(kx),
                    ..*m
                };
                r.add_term(nm, &if sign { -&f } else { f.clone() });
            }
        }
        r
    }

    /// Substitutes y ↦ M y with `m[i]` the image of y^i (each a linear form in y with
    /// Weyl coefficients of dx-degree 0).
    pub fn substitute_y(&self, m: &[WeylElement]) -> WeylElement {
        let p = self.profile;
        let mut cache: BTreeMap<Exps, WeylElement> = BTreeMap::new();
        let mut r = WeylElement::zero(&p);
        for (mono, c) in &self.terms {
            let ypow = cache
                .entry(mono.y)
                .or_insert_with(|| {
                    let mut t = WeylElement::one(&p);
                    for i in 0..p.dim {
                        for _ in 0..mono.y.get(i) {
                            t = &t * &m[i];
                        }
                    }
                    t
                })
                .clone();
            let rest = WeylElement::monomial(&p, mono.k, mono.x, Exps::ZERO, mono.dx, c.clone());
            r = &r + &(&ypow * &rest);
        }
        r
    }

    fn check(&self, o: &WeylElement) {
        assert_eq!(self.profile, o.profile, "profile mismatch");
    }
}

impl<'a> Add<&'a WeylElement> for &'a WeylElement {
    type Output = WeylElement;
    fn add(self, o: &WeylElement) -> WeylElement {
        self.check(o);
        let (big, small) = if self.terms.len() >= o.terms.len() {
            (self, o)
        } else {
            (o, self)
        };
        let mut r = big.clone();
        for (m, c) in &small.terms {
            r.add_term(*m, c);
        }
        r
    }
}

impl<'a> Sub<&'a WeylElement> for &'a WeylElement {
    type Output = WeylElement;
    fn sub(self, o: &WeylElement) -> WeylElement {
        self.check(o);
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(*m, &-c);
        }
        r
    }
}

/// Plain graded-commutative product (no fiber deformation).
impl<'a> Mul<&'a WeylElement> for &'a WeylElement {
    type Output = WeylElement;
    fn mul(self, o: &WeylElement) -> WeylElement {
        self.check(o);
        let bound = self.profile.weyl_bound();
        let mut r = WeylElement::zero(&self.profile);
        for (m1, c1) in &self.terms {
            let w1 = m1.weight();
            for (m2, c2) in &o.terms {
                if w1 + m2.weight() > bound {
                    continue;
                }
                let Some((dx, neg)) = m1.dx.wedge(&m2.dx) else {
                    continue;
                };
                let m = WMono {
                    k: m1.k + m2.k,
                    x: m1.x.add(&m2.x),
                    y: m1.y.add(&m2.y),
                    dx,
                };
                let c = c1 * c2;
                r.add_term(m, &if neg { -c } else { c });
            }
        }
        r
    }
}

impl Neg for &WeylElement {
    type Output = WeylElement;
    fn neg(self) -> WeylElement {
        self.scale_int(-1)
    }
}

impl Add for WeylElement {
    type Output = WeylElement;
    fn add(self, o: WeylElement) -> WeylElement {
        &self + &o
    }
}

impl Sub for WeylElement {
    type Output = WeylElement;
    fn sub(self, o: WeylElement) -> WeylElement {
        &self - &o
    }
}

impl Mul for WeylElement {
    type Output = WeylElement;
    fn mul(self, o: WeylElement) -> WeylElement {
        &self * &o
    }
}

impl Neg for WeylElement {
    type Output = WeylElement;
    fn neg(self) -> WeylElement {
        -&self
    }
}
