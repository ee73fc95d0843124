//! Formal differential equations in t over ℏ-adic modules: `(V[t])[[ℏ]]` solved by Picard iteration.

use crate::coeff::CRational;
use crate::error::{Error, Result};
use crate::hochschild::{DiffAlgebra, PolyDiffOp};
use crate::hseries::HSeries;
use crate::matrix::SeriesMatrix;
use crate::polyvector::Multi;
use crate::weyl::WeylElement;

/// A truncated ℏ-adic module element.
pub trait Carrier: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn plus(&self, o: &Self) -> Self;
    fn scaled(&self, c: &CRational) -> Self;
    fn is_null(&self) -> bool;
    fn hbar_val(&self) -> Option<u32>;
    fn hbar_order(&self) -> u32;

    fn minus(&self, o: &Self) -> Self {
        self.plus(&o.scaled(&CRational::from_int(-1)))
    }
}

impl Carrier for HSeries {
    fn zero_like(&self) -> Self {
        HSeries::zero(self.profile())
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn scaled(&self, c: &CRational) -> Self {
        self.scale(c)
    }
    fn is_null(&self) -> bool {
        self.is_zero()
    }
    fn hbar_val(&self) -> Option<u32> {
        self.hbar_valuation()
    }
    fn hbar_order(&self) -> u32 {
        self.profile().hbar_order
    }
}

impl Carrier for WeylElement {
    fn zero_like(&self) -> Self {
        WeylElement::zero(self.profile())
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn scaled(&self, c: &CRational) -> Self {
        self.scale(c)
    }
    fn is_null(&self) -> bool {
        self.is_zero()
    }
    fn hbar_val(&self) -> Option<u32> {
        self.hbar_valuation()
    }
    fn hbar_order(&self) -> u32 {
        self.profile().hbar_order
    }
}

impl<K: Clone + PartialEq + std::fmt::Debug> Carrier for Multi<K> {
    fn zero_like(&self) -> Self {
        Multi::zero(self.profile())
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn scaled(&self, c: &CRational) -> Self {
        self.scale(c)
    }
    fn is_null(&self) -> bool {
        self.is_zero()
    }
    fn hbar_val(&self) -> Option<u32> {
        self.hbar_valuation()
    }
    fn hbar_order(&self) -> u32 {
        self.profile().hbar_order
    }
}

impl<C: DiffAlgebra> Carrier for PolyDiffOp<C> {
    fn zero_like(&self) -> Self {
        PolyDiffOp::zero(self.profile(), self.arity())
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn scaled(&self, c: &CRational) -> Self {
        self.scale(c)
    }
    fn is_null(&self) -> bool {
        self.is_zero()
    }
    fn hbar_val(&self) -> Option<u32> {
        self.hbar_valuation()
    }
    fn hbar_order(&self) -> u32 {
        self.profile().hbar_order
    }
}

impl Carrier for SeriesMatrix {
    fn zero_like(&self) -> Self {
        SeriesMatrix::zero(&self.profile, self.n)
    }
    fn plus(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn scaled(&self, c: &CRational) -> Self {
        self.scale(c)
    }
    fn is_null(&self) -> bool {
        self.is_zero()
    }
    fn hbar_val(&self) -> Option<u32> {
        self.e.iter().filter_map(HSeries::hbar_valuation).min()
    }
    fn hbar_order(&self) -> u32 {
        self.profile.hbar_order
    }
}

/// Polynomial in t with carrier coefficients; `coeffs[n]` multiplies tⁿ.
#[derive(Clone, PartialEq, Debug)]
pub struct TPoly<V: Carrier> {
    zero: V,
    coeffs: Vec<V>,
}

impl<V: Carrier> TPoly<V> {
    pub fn zero(template: &V) -> Self {
        TPoly {
            zero: template.zero_like(),
            coeffs: vec![],
        }
    }

    pub fn constant(v: &V) -> Self {
        Self::from_coeffs(v, vec![v.clone()])
    }

    pub fn from_coeffs(template: &V, coeffs: Vec<V>) -> Self {
        let mut r = TPoly {
            zero: template.zero_like(),
            coeffs,
        };
        r.trim();
        r
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Carrier::is_null) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[V] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> V {
        self.coeffs
            .get(n)
            .cloned()
            .unwrap_or_else(|| self.zero.clone())
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn template(&self) -> &V {
        &self.zero
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i).plus(&o.coeff(i))).collect();
        Self::from_coeffs(&self.zero, c)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| self.coeff(i).minus(&o.coeff(i))).collect();
        Self::from_coeffs(&self.zero, c)
    }

    pub fn scale(&self, c: &CRational) -> Self {
        Self::from_coeffs(
            &self.zero,
            self.coeffs.iter().map(|v| v.scaled(c)).collect(),
        )
    }

    /// Coefficientwise linear map.
    pub fn map<W: Carrier, F: Fn(&V) -> W>(&self, template: &W, f: F) -> TPoly<W> {
        TPoly::from_coeffs(template, self.coeffs.iter().map(f).collect())
    }

    /// Bilinear extension: `Σ t^{n+m} f(a_n, b_m)`.
    pub fn bilinear<W: Carrier, U: Carrier, F: Fn(&V, &W) -> U>(
        &self,
        o: &TPoly<W>,
        template: &U,
        f: F,
    ) -> TPoly<U> {
        let mut out: Vec<U> = vec![template.zero_like(); self.coeffs.len() + o.coeffs.len()];
        for (n, a) in self.coeffs.iter().enumerate() {
            for (m, b) in o.coeffs.iter().enumerate() {
                out[n + m] = out[n + m].plus(&f(a, b));
            }
        }
        TPoly::from_coeffs(template, out)
    }

    pub fn deriv(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, v)| v.scaled(&CRational::from_int(n as i64)))
            .collect();
        Self::from_coeffs(&self.zero, c)
    }

    /// `∫₀^t`.
    pub fn integrate(&self) -> Self {
        let mut c = vec![self.zero.clone()];
        for (n, v) in self.coeffs.iter().enumerate() {
            c.push(v.scaled(&CRational::from_frac(1, n as i64 + 1)));
        }
        Self::from_coeffs(&self.zero, c)
    }

    pub fn eval(&self, t: &CRational) -> V {
        // Horner
        let mut acc = self.zero.clone();
        for v in self.coeffs.iter().rev() {
            acc = acc.scaled(t).plus(v);
        }
        acc
    }

    /// Substitutes t ↦ s·t.
    pub fn rescale(&self, s: &CRational) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, v)| v.scaled(&s.pow(n as u32)))
            .collect();
        Self::from_coeffs(&self.zero, c)
    }

    pub fn hbar_val(&self) -> Option<u32> {
        self.coeffs.iter().filter_map(Carrier::hbar_val).min()
    }
}

type OpFn<'a, V> = Box<dyn Fn(&V) -> V + 'a>;

/// t-dependent linear operator `D(t) = Σ tⁿ Dₙ`.
pub struct TOperator<'a, V> {
    parts: Vec<OpFn<'a, V>>,
}

impl<'a, V: Carrier> TOperator<'a, V> {
    pub fn zero() -> Self {
        TOperator { parts: vec![] }
    }

    pub fn constant<F: Fn(&V) -> V + 'a>(f: F) -> Self {
        TOperator {
            parts: vec![Box::new(f)],
        }
    }

    pub fn from_parts(parts: Vec<OpFn<'a, V>>) -> Self {
        TOperator { parts }
    }

    /// Applies `D(t)` to `v(t)`, checking that every part raises the ℏ-order.
    pub fn apply(&self, v: &TPoly<V>) -> Result<TPoly<V>> {
        let mut out: Vec<V> = vec![v.template().clone(); self.parts.len() + v.coeffs().len()];
        for (n, d) in self.parts.iter().enumerate() {
            for (m, x) in v.coeffs().iter().enumerate() {
                let y = d(x);
                if let (Some(a), Some(b)) = (x.hbar_val(), y.hbar_val()) {
                    if b < a + 1 {
                        return Err(Error::ZerothOrderViolation);
                    }
                }
                out[n + m] = out[n + m].plus(&y);
            }
        }
        Ok(TPoly::from_coeffs(v.template(), out))
    }
}

/// Solves `v' = w + D v`, `v(0) = v₀` by the contracting iteration `v ↦ v₀ + ∫(w + D v)`.
pub fn solve_linear<V: Carrier>(w: &TPoly<V>, d: &TOperator<V>, v0: &V) -> Result<TPoly<V>> {
    solve_linear_from(w, d, v0, TPoly::constant(v0))
}

/// Same fixed point, started from an arbitrary first iterate.
pub fn solve_linear_from<V: Carrier>(
    w: &TPoly<V>,
    d: &TOperator<V>,
    v0: &V,
    start: TPoly<V>,
) -> Result<TPoly<V>> {
    if w.coeffs().iter().any(|c| c.hbar_val() == Some(0)) {
        return Err(Error::ZerothOrderViolation);
    }
    let init = TPoly::constant(v0);
    solve_fixed_point(&init, start, |v| Ok(w.add(&d.apply(v)?)))
}

/// Solves `v = v_init + ∫ rhs(v)` where `rhs` raises the ℏ-adic order of differences.
pub fn solve_fixed_point<V: Carrier, F>(
    v_init: &TPoly<V>,
    start: TPoly<V>,
    rhs: F,
) -> Result<TPoly<V>>
where
    F: Fn(&TPoly<V>) -> Result<TPoly<V>>,
{
    let guard = v_init.template().hbar_order() as usize + 3;
    let mut v = start;
    for _ in 0..guard {
        let next = v_init.add(&rhs(&v)?.integrate());
        if next == v {
            return Ok(v);
        }
        v = next;
    }
    Err(Error::NoConvergence(guard))
}

/// `v' − w − D v` together with `v(0) − v₀`.
pub fn linear_residual<V: Carrier>(
    v: &TPoly<V>,
    w: &TPoly<V>,
    d: &TOperator<V>,
    v0: &V,
) -> Result<(TPoly<V>, V)> {
    let r = v.deriv().sub(&w.add(&d.apply(v)?));
    Ok((r, v.eval(&CRational::zero()).minus(v0)))
}

/// `f(t) = e^{t d₀} h₀ g(t)` with d₀ a scalar.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpSolution {
    pub d0: CRational,
    pub h0: HSeries,
    pub g: TPoly<HSeries>,
}

impl ExpSolution {
    /// After cancelling e^{t d₀}: `h₀ g' − D(h₀ g)`, zero iff f solves `f' = (d₀ + D) f`.
    pub fn residual(&self, d: &TOperator<HSeries>) -> Result<TPoly<HSeries>> {
        let f = self.g.map(&self.h0, |c| &self.h0 * c);
        Ok(f.deriv().sub(&d.apply(&f)?))
    }

    /// The ℏ-expansion of f at a given t, with e^{t d₀} kept symbolic.
    pub fn reduced_value(&self, t: &CRational) -> HSeries {
        &self.h0 * &self.g.eval(t)
    }
}

/// Solves `f' = (d₀ + D(t)) f`, `f(0) = h`, via the ansatz `f = e^{t d₀} h₀ g`.
pub fn solve_exp_prefactor(
    d0: &HSeries,
    d: &TOperator<HSeries>,
    h: &HSeries,
) -> Result<ExpSolution> {
    if !d0.is_scalar() {
        return Err(Error::NonConstantZerothOrder);
    }
    let p = *h.profile();
    let h0 = HSeries::from_terms(&p, h.coeff(0).terms.iter().map(|(e, c)| (0, *e, c.clone())));
    if h0.constant_term().is_zero() {
        return Err(Error::NonInvertibleInitialCondition);
    }
    let h0_inv = h0.series_invert()?;
    let g0 = &h0_inv * h;
    // g' = h₀⁻¹ D(h₀ g)
    let dt = TOperatorConj {
        d,
        h0: &h0,
        h0_inv: &h0_inv,
    };
    let w = TPoly::zero(h);
    let init = TPoly::constant(&g0);
    let g = solve_fixed_point(&init, init.clone(), |v| Ok(w.add(&dt.apply(v)?)))?;
    Ok(ExpSolution {
        d0: d0.constant_term(),
        h0,
        g,
    })
}

struct TOperatorConj<'a, 'b> {
    d: &'a TOperator<'b, HSeries>,
    h0: &'a HSeries,
    h0_inv: &'a HSeries,
}

impl TOperatorConj<'_, '_> {
    fn apply(&self, g: &TPoly<HSeries>) -> Result<TPoly<HSeries>> {
        let f = g.map(self.h0, |c| self.h0 * c);
        Ok(self.d.apply(&f)?.map(self.h0, |c| self.h0_inv * c))
    }
}

/// `Exp_⋆(t d)` and its ⋆-inverse, with the scalar ℏ⁰ part of d kept as a symbolic prefactor.
#[derive(Clone, Debug, PartialEq)]
pub struct StarExp {
    pub d0: CRational,
    /// `f = e^{t d₀} g`
    pub g: TPoly<HSeries>,
    /// `f⁻¹ = e^{−t d₀} g_inv`
    pub g_inv: TPoly<HSeries>,
}

impl StarExp {
    /// `f ⋆ f⁻¹ − 1` (the exponential prefactors cancel).
    pub fn inverse_residual<F: Fn(&HSeries, &HSeries) -> HSeries>(
        &self,
        star: F,
    ) -> TPoly<HSeries> {
        let one = HSeries::one(self.g.template().profile());
        let a = self.g.bilinear(&self.g_inv, &one, &star);
        let b = self.g_inv.bilinear(&self.g, &one, &star);
        let c = TPoly::constant(&one);
        a.sub(&c).add(&b.sub(&c))
    }
}

/// Solves `f' = d ⋆ f`, `f(0) = 1`, and `(f⁻¹)' = −f⁻¹ ⋆ d` for time-independent d.
pub fn star_exponential<F: Fn(&HSeries, &HSeries) -> HSeries>(
    d: &HSeries,
    star: F,
) -> Result<StarExp> {
    let p = *d.profile();
    let d0 = HSeries::from_terms(&p, d.coeff(0).terms.iter().map(|(e, c)| (0, *e, c.clone())));
    if !d0.is_scalar() {
        return Err(Error::NonConstantZerothOrder);
    }
    let dp = d - &d0;
    let star_exponential_t = |left: bool| -> Result<TPoly<HSeries>> {
        let one = HSeries::one(&p);
        let init = TPoly::constant(&one);
        solve_fixed_point(&init, init.clone(), |v| {
            Ok(v.map(&one, |c| if left { star(&dp, c) } else { -star(c, &dp) }))
        })
    };
    Ok(StarExp {
        d0: d0.constant_term(),
        g: star_exponential_t(true)?,
        g_inv: star_exponential_t(false)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mono::Exps;
    use crate::profile::Profile;

    #[test]
    fn trivial_solutions() {
        let p = Profile::desk();
        let h = HSeries::hbar_pow(&p, 1);
        let w = TPoly::constant(&h);
        let v = solve_linear(&w, &TOperator::zero(), &HSeries::zero(&p)).unwrap();
        assert_eq!(
            v,
            TPoly::from_coeffs(&h, vec![HSeries::zero(&p), h.clone()])
        );
        let x = HSeries::x(&p, 0);
        let v = solve_linear(&TPoly::zero(&x), &TOperator::zero(), &x).unwrap();
        assert_eq!(v, TPoly::constant(&x));
    }

    #[test]
    fn exponential_oracle() {
        let p = Profile::desk();
        let one = HSeries::one(&p);
        let hb = HSeries::hbar_pow(&p, 1);
        let d = TOperator::constant(|v: &HSeries| v * &hb);
        let v = solve_linear(&TPoly::zero(&one), &d, &one).unwrap();
        // Σ (tℏ)^k / k!
        let mut fact = 1i64;
        let mut coeffs = vec![];
        for k in 0..=p.hbar_order {
            if k > 0 {
                fact *= k as i64;
            }
            coeffs.push(HSeries::monomial(
                &p,
                k,
                Exps::ZERO,
                CRational::from_frac(1, fact),
            ));
        }
        assert_eq!(v, TPoly::from_coeffs(&one, coeffs));
    }

    #[test]
    fn zeroth_order_rejected() {
        let p = Profile::desk();
        let one = HSeries::one(&p);
        let d = TOperator::constant(|v: &HSeries| v.clone());
        assert_eq!(
            solve_linear(&TPoly::zero(&one), &d, &one),
            Err(Error::ZerothOrderViolation)
        );
        assert_eq!(
            solve_linear(&TPoly::constant(&one), &TOperator::zero(), &one),
            Err(Error::ZerothOrderViolation)
        );
    }

    #[test]
    fn prefactor_cases() {
        let p = Profile::desk();
        let one = HSeries::one(&p);
        let sol = solve_exp_prefactor(&HSeries::from_int(&p, 3), &TOperator::zero(), &one).unwrap();
        assert_eq!(sol.g, TPoly::constant(&one));
        assert!(matches!(
            solve_exp_prefactor(&HSeries::x(&p, 0), &TOperator::zero(), &one),
            Err(Error::NonConstantZerothOrder)
        ));
        assert!(matches!(
            solve_exp_prefactor(&one, &TOperator::zero(), &HSeries::hbar_pow(&p, 1)),
            Err(Error::NonInvertibleInitialCondition)
        ));
        // D = ℏx₁: g = Σ (tℏx₁)^k/k!
        let hx = &HSeries::hbar_pow(&p, 1) * &HSeries::x(&p, 0);
        let d = TOperator::constant(|v: &HSeries| v * &hx);
        let sol = solve_exp_prefactor(&HSeries::from_int(&p, 2), &d, &one).unwrap();
        let mut expect = vec![];
        let mut pw = one.clone();
        let mut fact = 1i64;
        for k in 0..=p.hbar_order as i64 {
            if k > 0 {
                fact *= k;
                pw = &pw * &hx;
            }
            expect.push(pw.scale(&CRational::from_frac(1, fact)));
        }
        assert_eq!(sol.g, TPoly::from_coeffs(&one, expect));
        assert!(sol.residual(&d).unwrap().is_zero());
    }
}
