//! Polydifferential cochains, the Hochschild coboundary and the Gerstenhaber bracket.
//!
//! A cochain of arity k is a finite sum `Σ c · ∂^{α₁}a₁ ⋯ ∂^{α_k}a_k` stored as a map from the
//! slot multi-indices (α₁,…,α_k) to the coefficient. The coefficient ring is generic: base
//! series (derivatives in x) or Weyl elements (derivatives in the fiber variables y).

use std::collections::BTreeMap;
use std::fmt::Debug;

use crate::coeff::CRational;
use crate::error::{Error, Result};
use crate::hseries::HSeries;
use crate::mono::{Exps, MAX_DIM};
use crate::profile::Profile;
use crate::text::{format_hseries, format_weyl};
use crate::weyl::WeylElement;

/// Graded-commutative coefficient ring with commuting derivations `diff(i)`.
pub trait DiffAlgebra: Clone + PartialEq + Debug {
    fn zero_of(p: &Profile) -> Self;
    fn one_of(p: &Profile) -> Self;
    fn prof(&self) -> &Profile;
    fn is_zero_elem(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn scaled(&self, c: &CRational) -> Self;
    fn diff(&self, i: usize) -> Self;
    fn hbar_val(&self) -> Option<u32>;
    fn reduced(&self, p: &Profile) -> Self;
    fn render(&self) -> String;
}

impl DiffAlgebra for HSeries {
    fn zero_of(p: &Profile) -> Self {
        HSeries::zero(p)
    }
    fn one_of(p: &Profile) -> Self {
        HSeries::one(p)
    }
    fn prof(&self) -> &Profile {
        self.profile()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn scaled(&self, c: &CRational) -> Self {
        self.scale(c)
    }
    fn diff(&self, i: usize) -> Self {
        self.deriv(i)
    }
    fn hbar_val(&self) -> Option<u32> {
        self.hbar_valuation()
    }
    fn reduced(&self, p: &Profile) -> Self {
        self.reduce(p)
    }
    fn render(&self) -> String {
        format_hseries(self)
    }
}

/// Fiber cochains: derivatives act on y.
impl DiffAlgebra for WeylElement {
    fn zero_of(p: &Profile) -> Self {
        WeylElement::zero(p)
    }
    fn one_of(p: &Profile) -> Self {
        WeylElement::one(p)
    }
    fn prof(&self) -> &Profile {
        self.profile()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn scaled(&self, c: &CRational) -> Self {
        self.scale(c)
    }
    fn diff(&self, i: usize) -> Self {
        self.deriv_y(i)
    }
    fn hbar_val(&self) -> Option<u32> {
        self.hbar_valuation()
    }
    fn reduced(&self, p: &Profile) -> Self {
        self.reduce(p)
    }
    fn render(&self) -> String {
        format_weyl(self)
    }
}

fn deriv_multi<C: DiffAlgebra>(c: &C, alpha: &Exps, dim: usize) -> C {
    let mut r = c.clone();
    for i in 0..dim {
        for _ in 0..alpha.get(i) {
            if r.is_zero_elem() {
                return r;
            }
            r = r.diff(i);
        }
    }
    r
}

/// All ways to write α = γ₀ + ⋯ + γ_{m-1}, with the multinomial weight α!/(γ₀!⋯γ_{m-1}!).
pub fn splits(alpha: &Exps, m: usize, dim: usize) -> Vec<(Vec<Exps>, u64)> {
    // per-dimension compositions, then product
    let mut out: Vec<(Vec<Exps>, u64)> = vec![(vec![Exps::ZERO; m], 1)];
    for i in 0..dim {
        let n = alpha.get(i);
        let comps = compositions(n, m);
        let mut next = Vec::with_capacity(out.len() * comps.len());
        for (parts, w) in &out {
            for c in &comps {
                let mut np = parts.clone();
                let mut mult = factorial(n as u64);
                for (j, &cj) in c.iter().enumerate() {
                    let mut e = np[j].0;
                    e[i] = cj;
                    np[j] = Exps(e);
                    mult /= factorial(cj as u64);
                }
                next.push((np, w * mult));
            }
        }
        out = next;
    }
    out
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn compositions(n: u8, m: usize) -> Vec<Vec<u8>> {
    if m == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    if m == 1 {
        return vec![vec![n]];
    }
    let mut out = vec![];
    for first in 0..=n {
        for mut rest in compositions(n - first, m - 1) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

/// Polydifferential operator of fixed arity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PolyDiffOp<C: DiffAlgebra = HSeries> {
    profile: Profile,
    arity: usize,
    terms: BTreeMap<Vec<Exps>, C>,
}

impl<C: DiffAlgebra> PolyDiffOp<C> {
    pub fn zero(p: &Profile, arity: usize) -> Self {
        PolyDiffOp {
            profile: *p,
            arity,
            terms: BTreeMap::new(),
        }
    }

    /// The arity-0 cochain given by an element.
    pub fn element(c: &C) -> Self {
        let mut r = Self::zero(c.prof(), 0);
        r.add_term(vec![], c);
        r
    }

    /// Identity operator (arity 1, no derivative).
    pub fn identity(p: &Profile) -> Self {
        let mut r = Self::zero(p, 1);
        r.add_term(vec![Exps::ZERO], &C::one_of(p));
        r
    }

    /// Pointwise product μ₀ (arity 2, no derivatives).
    pub fn pointwise(p: &Profile) -> Self {
        let mut r = Self::zero(p, 2);
        r.add_term(vec![Exps::ZERO, Exps::ZERO], &C::one_of(p));
        r
    }

    /// `c · ∂^α` (arity 1).
    pub fn derivation(alpha: Exps, c: &C) -> Self {
        let mut r = Self::zero(c.prof(), 1);
        r.add_term(vec![alpha], c);
        r
    }

    pub fn from_terms<I: IntoIterator<Item = (Vec<Exps>, C)>>(
        p: &Profile,
        arity: usize,
        it: I,
    ) -> Self {
        let mut r = Self::zero(p, arity);
        for (k, c) in it {
            r.add_term(k, &c);
        }
        r
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Gerstenhaber degree (arity − 1).
    pub fn degree(&self) -> i64 {
        self.arity as i64 - 1
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Exps>, C> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, idx: Vec<Exps>, c: &C) {
        assert_eq!(idx.len(), self.arity, "slot count");
        if c.is_zero_elem() {
            return;
        }
        match self.terms.get_mut(&idx) {
            Some(v) => {
                *v = v.plus(c);
                if v.is_zero_elem() {
                    self.terms.remove(&idx);
                }
            }
            None => {
                self.terms.insert(idx, c.clone());
            }
        }
    }

    pub fn get(&self, idx: &[Exps]) -> C {
        self.terms
            .get(idx)
            .cloned()
            .unwrap_or_else(|| C::zero_of(&self.profile))
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.arity, o.arity, "arity");
        let mut r = self.clone();
        for (k, c) in &o.terms {
            r.add_term(k.clone(), c);
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&CRational::from_int(-1)))
    }

    pub fn scale(&self, c: &CRational) -> Self {
        let mut r = Self::zero(&self.profile, self.arity);
        for (k, v) in &self.terms {
            r.add_term(k.clone(), &v.scaled(c));
        }
        r
    }

    /// Left multiplication of every coefficient.
    pub fn mul_coeff(&self, f: &C) -> Self {
        let mut r = Self::zero(&self.profile, self.arity);
        for (k, v) in &self.terms {
            r.add_term(k.clone(), &f.times(v));
        }
        r
    }

    pub fn map_coeffs<F: Fn(&C) -> C>(&self, f: F) -> Self {
        let mut r = Self::zero(&self.profile, self.arity);
        for (k, v) in &self.terms {
            r.add_term(k.clone(), &f(v));
        }
        r
    }

    pub fn hbar_valuation(&self) -> Option<u32> {
        self.terms.values().filter_map(|c| c.hbar_val()).min()
    }

    pub fn reduce(&self, p: &Profile) -> Self {
        let mut r = Self::zero(p, self.arity);
        for (k, v) in &self.terms {
            r.add_term(k.clone(), &v.reduced(p));
        }
        r
    }

    /// Highest derivative order in any slot.
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .flat_map(|k| k.iter().map(Exps::degree))
            .max()
            .unwrap_or(0)
    }

    /// Every term differentiates every slot at least once.
    pub fn is_normalized(&self) -> bool {
        self.terms.keys().all(|k| k.iter().all(|e| !e.is_zero()))
    }

    /// Drops terms with an undifferentiated slot.
    pub fn normalized(&self) -> Self {
        let mut r = Self::zero(&self.profile, self.arity);
        for (k, v) in &self.terms {
            if k.iter().all(|e| !e.is_zero()) {
                r.add_term(k.clone(), v);
            }
        }
        r
    }

    pub fn apply(&self, args: &[C]) -> Result<C> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        let dim = self.profile.dim;
        let mut cache: Vec<BTreeMap<Exps, C>> = vec![BTreeMap::new(); self.arity];
        let mut acc = C::zero_of(&self.profile);
        for (idx, c) in &self.terms {
            let mut t = c.clone();
            for (s, a) in idx.iter().enumerate() {
                if t.is_zero_elem() {
                    break;
                }
                let d = cache[s]
                    .entry(*a)
                    .or_insert_with(|| deriv_multi(&args[s], a, dim))
                    .clone();
                t = t.times(&d);
            }
            acc = acc.plus(&t);
        }
        Ok(acc)
    }

    /// Insertion `Q₁ ∘_i Q₂`: `Q₁(a₀,…,Q₂(a_i,…,a_{i+k₂}),…)`.
    pub fn compose(&self, i: usize, q2: &Self) -> Self {
        assert!(i < self.arity, "slot out of range");
        let dim = self.profile.dim;
        let m = q2.arity;
        let arity = self.arity + m - 1;
        let mut r = Self::zero(&self.profile, arity);
        let mut split_cache: BTreeMap<Exps, Vec<(Vec<Exps>, u64)>> = BTreeMap::new();
        let mut dcache: BTreeMap<(Vec<Exps>, Exps), C> = BTreeMap::new();
        for (a, c1) in &self.terms {
            let sp = split_cache
                .entry(a[i])
                .or_insert_with(|| splits(&a[i], m + 1, dim))
                .clone();
            for (b, c2) in &q2.terms {
                for (parts, w) in &sp {
                    let dc2 = dcache
                        .entry((b.clone(), parts[0]))
                        .or_insert_with(|| deriv_multi(c2, &parts[0], dim))
                        .clone();
                    if dc2.is_zero_elem() {
                        continue;
                    }
                    let mut idx = Vec::with_capacity(arity);
                    idx.extend_from_slice(&a[..i]);
                    for t in 0..m {
                        idx.push(b[t].add(&parts[t + 1]));
                    }
                    idx.extend_from_slice(&a[i + 1..]);
                    let coeff = c1.times(&dc2).scaled(&CRational::from_int(*w as i64));
                    r.add_term(idx, &coeff);
                }
            }
        }
        r
    }

    /// Eq. of the Hochschild coboundary with `a·b` replaced by the arity-2 operator `prod`.
    pub fn hoch_coboundary(&self, prod: &Self) -> Self {
        assert_eq!(prod.arity, 2, "product must have arity 2");
        let k = self.arity;
        // a₀·P(a₁..a_k)
        let mut r = prod.compose(1, self);
        // Σ (−1)^{i+1} P(.., a_i a_{i+1}, ..)
        for i in 0..k {
            let t = self.compose(i, prod);
            r = if i % 2 == 0 { r.sub(&t) } else { r.add(&t) };
        }
        // (−1)^{k+1} P(a₀..a_{k−1})·a_k
        let t = prod.compose(0, self);
        if k.is_multiple_of(2) {
            r.sub(&t)
        } else {
            r.add(&t)
        }
    }

    /// Gerstenhaber bracket with the sign (−1)^{(i+k₁)k₂}, Q_j of arity k_j + 1.
    pub fn gerstenhaber(&self, q2: &Self) -> Self {
        let ins = |a: &Self, b: &Self| -> Self {
            let ka = a.arity as i64 - 1;
            let kb = b.arity as i64 - 1;
            let mut r = Self::zero(&a.profile, (a.arity + b.arity).saturating_sub(1));
            if a.arity == 0 {
                return r;
            }
            for i in 0..a.arity {
                let t = a.compose(i, b);
                let e = (i as i64 + ka) * kb;
                r = if e.rem_euclid(2) == 0 {
                    r.add(&t)
                } else {
                    r.sub(&t)
                };
            }
            r
        };
        let k1 = self.arity as i64 - 1;
        let k2 = q2.arity as i64 - 1;
        let a = ins(self, q2);
        let b = ins(q2, self);
        if self.arity == 0 && q2.arity == 0 {
            return Self::zero(&self.profile, 0);
        }
        if (k1 * k2).rem_euclid(2) == 0 {
            a.sub(&b)
        } else {
            a.add(&b)
        }
    }

    /// Records `(coefficient, per-slot multi-index)` in the text grammar.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let d = self.profile.dim;
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let slots: Vec<String> = k.iter().map(|e| e.fmt_dim(d)).collect();
                format!("D[{}]({})", slots.join(","), c.render())
            })
            .collect();
        parts.join(" ; ")
    }
}

/// Recovers an arity-k operator from its values on monomials: for |α_s| ≤ `order`,
/// c_α(x) = (1/α!) L((y−x)^{α₁},…,(y−x)^{α_k})|_{y=x}.
pub fn interpolate<F>(p: &Profile, arity: usize, order: u32, eval: F) -> Result<PolyDiffOp<HSeries>>
where
    F: Fn(&[HSeries]) -> Result<HSeries>,
{
    let dim = p.dim;
    let idx_all = Exps::up_to_degree(dim, order);
    // values on monomials x^γ
    let mut values: BTreeMap<Vec<Exps>, HSeries> = BTreeMap::new();
    let tuples = cartesian(&idx_all, arity);
    let mono = |e: &Exps| HSeries::monomial(p, 0, *e, CRational::one());
    for t in &tuples {
        let args: Vec<HSeries> = t.iter().map(mono).collect();
        values.insert(t.clone(), eval(&args)?);
    }
    let mut r = PolyDiffOp::zero(p, arity);
    for alpha in &tuples {
        // Σ_{γ ≤ α} Π binom(α_s, γ_s) (−x)^{α_s−γ_s} L(x^{γ})
        let mut acc = HSeries::zero(p);
        let subs: Vec<Vec<Exps>> = alpha.iter().map(|a| a.sub_indices(dim)).collect();
        for gamma in cartesian_lists(&subs) {
            let mut w = CRational::one();
            let mut pow = Exps::ZERO;
            let mut sign = 0u32;
            for (a, g) in alpha.iter().zip(&gamma) {
                let rest = a.checked_sub(g).expect("sub index");
                w = &w * &CRational::from_int(crate::mono::multi_binom(a, g) as i64);
                pow = pow.add(&rest);
                sign += rest.degree();
            }
            if sign % 2 == 1 {
                w = -w;
            }
            let v = &values[&gamma];
            acc = &acc + &(&HSeries::monomial(p, 0, pow, w) * v);
        }
        let fact: u64 = alpha.iter().map(Exps::factorial).product();
        r.add_term(
            alpha.clone(),
            &acc.scale(&CRational::from_frac(1, fact as i64)),
        );
    }
    Ok(r)
}

fn cartesian(items: &[Exps], k: usize) -> Vec<Vec<Exps>> {
    let lists: Vec<Vec<Exps>> = vec![items.to_vec(); k];
    cartesian_lists(&lists)
}

fn cartesian_lists(lists: &[Vec<Exps>]) -> Vec<Vec<Exps>> {
    let mut out: Vec<Vec<Exps>> = vec![vec![]];
    for l in lists {
        let mut next = Vec::with_capacity(out.len() * l.len());
        for o in &out {
            for e in l {
                let mut v = o.clone();
                v.push(*e);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[allow(dead_code)]
const _: () = assert!(MAX_DIM <= 8);

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Profile {
        Profile::desk()
    }

    fn d(i: usize) -> Exps {
        Exps::unit(i)
    }

    #[test]
    fn coboundary_examples() {
        let p = p();
        let mu = PolyDiffOp::<HSeries>::pointwise(&p);
        let one = HSeries::one(&p);
        let d1 = PolyDiffOp::derivation(d(0), &one);
        assert!(d1.hoch_coboundary(&mu).is_zero());
        let d11 = PolyDiffOp::derivation(Exps::from_slice(&[2, 0]), &one);
        let expect = PolyDiffOp::from_terms(&p, 2, [(vec![d(0), d(0)], one.scale_int(-2))]);
        assert_eq!(d11.hoch_coboundary(&mu), expect);
        let f = PolyDiffOp::element(&HSeries::x(&p, 0));
        assert!(f.hoch_coboundary(&mu).is_zero());
    }

    #[test]
    fn gerstenhaber_examples() {
        let p = p();
        let one = HSeries::one(&p);
        let f = PolyDiffOp::element(&HSeries::x(&p, 0));
        let g = PolyDiffOp::element(&HSeries::x(&p, 1));
        assert!(f.gerstenhaber(&g).is_zero());
        let d1 = PolyDiffOp::derivation(d(0), &one);
        let d2 = PolyDiffOp::derivation(d(1), &one);
        assert!(d1.gerstenhaber(&d2).is_zero());
        // [X, f] = X(f) for a vector field and a function
        let x = PolyDiffOp::derivation(d(0), &HSeries::x(&p, 1));
        let h = PolyDiffOp::element(&(&HSeries::x(&p, 0) * &HSeries::x(&p, 0)));
        let xf = x.gerstenhaber(&h);
        assert_eq!(
            xf,
            PolyDiffOp::element(&(&HSeries::x(&p, 0) * &HSeries::x(&p, 1)).scale_int(2))
        );
    }

    #[test]
    fn apply_examples() {
        let p = p();
        let op = PolyDiffOp::from_terms(&p, 2, [(vec![d(0), d(1)], HSeries::one(&p))]);
        assert_eq!(
            op.apply(&[HSeries::x(&p, 0), HSeries::x(&p, 1)]).unwrap(),
            HSeries::one(&p)
        );
        assert_eq!(
            op.apply(&[HSeries::one(&p), HSeries::x(&p, 1)]).unwrap(),
            HSeries::zero(&p)
        );
        assert_eq!(
            op.apply(&[HSeries::one(&p)]),
            Err(Error::ArityMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn interpolation_recovers_operator() {
        let p = p().with_x(3);
        let op = PolyDiffOp::from_terms(
            &p,
            2,
            [
                (vec![d(0), d(1)], HSeries::x(&p, 0)),
                (
                    vec![Exps::from_slice(&[0, 2]), d(0)],
                    HSeries::hbar_pow(&p, 1),
                ),
                (vec![Exps::ZERO, Exps::ZERO], HSeries::one(&p)),
            ],
        );
        let rec = interpolate(&p, 2, 2, |a| op.apply(a)).unwrap();
        assert_eq!(rec, op);
    }

    #[test]
    fn splits_weights() {
        let a = Exps::from_slice(&[2, 1]);
        let s = splits(&a, 2, 2);
        let total: u64 = s.iter().map(|(_, w)| w).sum();
        // Σ multinomials = 2^{|α|}
        assert_eq!(total, 8);
    }
}
