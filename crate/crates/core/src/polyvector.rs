//! Polyvector fields and differential forms with coefficients in 𝒪[[ℏ]].
//!
//! Both are stored as Grassmann polynomials: a k-vector is `Σ_{I sorted} c_I ξ_{i1}⋯ξ_{ik}`
//! (ξ_i standing for ∂_i), a k-form is `Σ_I c_I dx^{i1}∧⋯∧dx^{ik}`. For a bivector this means
//! `π = Σ_{i<j} π^{ij} ∂_i∧∂_j` and `π(df, dg) = π^{ij} ∂_i f ∂_j g` with π^{ij} = −π^{ji}.
//!
//! Contractions act on the first slot: `(i_ξ π)^j = ξ_i π^{ij}` and `(i_X B)_j = X^i B_{ij}`.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;
use std::ops::{Add, Neg, Sub};

use crate::coeff::CRational;
use crate::hseries::HSeries;
use crate::matrix::SeriesMatrix;
use crate::mono::GSet;
use crate::profile::Profile;
use crate::text::format_hseries;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Vect;
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Form;

/// Grassmann polynomial with [`HSeries`] coefficients; `K` tags vectors vs forms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Multi<K> {
    profile: Profile,
    comps: BTreeMap<GSet, HSeries>,
    _k: PhantomData<K>,
}

pub type PolyVectorField = Multi<Vect>;
pub type DiffForm = Multi<Form>;

impl<K> Multi<K> {
    pub fn zero(p: &Profile) -> Self {
        Multi {
            profile: *p,
            comps: BTreeMap::new(),
            _k: PhantomData,
        }
    }

    pub fn function(f: &HSeries) -> Self {
        Self::component(GSet::EMPTY, f.clone())
    }

    pub fn component(s: GSet, c: HSeries) -> Self {
        let mut m = Self::zero(c.profile());
        m.add_comp(s, &c);
        m
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn comps(&self) -> &BTreeMap<GSet, HSeries> {
        &self.comps
    }

    pub fn get(&self, s: GSet) -> HSeries {
        self.comps
            .get(&s)
            .cloned()
            .unwrap_or_else(|| HSeries::zero(&self.profile))
    }

    /// Coefficient of the sorted generator product on `ix` (0-based), with the
    /// antisymmetric sign for unsorted `ix`.
    pub fn coeff(&self, ix: &[usize]) -> HSeries {
        let mut set = GSet::EMPTY;
        let mut neg = false;
        for &i in ix {
            match set.wedge(&GSet::single(i)) {
                Some((s, n)) => {
                    set = s;
                    neg ^= n;
                }
                None => return HSeries::zero(&self.profile),
            }
        }
        let c = self.get(set);
        if neg {
            -&c
        } else {
            c
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn add_comp(&mut self, s: GSet, c: &HSeries) {
        if c.is_zero() || s.indices().iter().any(|&i| i >= self.profile.dim) {
            return;
        }
        let e = self
            .comps
            .entry(s)
            .or_insert_with(|| HSeries::zero(&self.profile));
        *e = &*e + c;
        if e.is_zero() {
            self.comps.remove(&s);
        }
    }

    /// Common degree, if homogeneous (zero counts as 0).
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.comps.keys().map(|s| s.len());
        match it.next() {
            None => Some(0),
            Some(d) => it.all(|e| e == d).then_some(d),
        }
    }

    pub fn part(&self, k: u32) -> Self {
        Multi {
            profile: self.profile,
            comps: self
                .comps
                .iter()
                .filter(|(s, _)| s.len() == k)
                .map(|(s, c)| (*s, c.clone()))
                .collect(),
            _k: PhantomData,
        }
    }

    pub fn map<F: Fn(&HSeries) -> HSeries>(&self, f: F) -> Self {
        let mut r = Self::zero(&self.profile);
        for (s, c) in &self.comps {
            r.add_comp(*s, &f(c));
        }
        r
    }

    pub fn scale(&self, c: &CRational) -> Self {
        self.map(|s| s.scale(c))
    }

    pub fn scale_series(&self, f: &HSeries) -> Self {
        self.map(|s| s * f)
    }

    pub fn deriv_x(&self, i: usize) -> Self {
        self.map(|s| s.deriv(i))
    }

    pub fn reduce(&self, p: &Profile) -> Self {
        let mut r = Self::zero(p);
        for (s, c) in &self.comps {
            r.add_comp(*s, &c.reduce(p));
        }
        r
    }

    pub fn hbar_valuation(&self) -> Option<u32> {
        self.comps
            .values()
            .filter_map(HSeries::hbar_valuation)
            .min()
    }

    pub fn shift_hbar(&self, j: u32) -> Self {
        self.map(|s| s.shift_hbar(j))
    }

    /// Grassmann product.
    pub fn wedge(&self, o: &Self) -> Self {
        let mut r = Self::zero(&self.profile);
        for (s1, c1) in &self.comps {
            for (s2, c2) in &o.comps {
                if let Some((s, neg)) = s1.wedge(s2) {
                    let c = c1 * c2;
                    r.add_comp(s, &if neg { -&c } else { c });
                }
            }
        }
        r
    }

    /// Left derivative ∂^L/∂θ_i.
    pub fn left_deriv(&self, i: usize) -> Self {
        let mut r = Self::zero(&self.profile);
        for (s, c) in &self.comps {
            if s.contains(i) {
                let neg = s.count_below(i) % 2 == 1;
                r.add_comp(s.without(i), &if neg { -c } else { c.clone() });
            }
        }
        r
    }

    /// Right derivative ∂^R/∂θ_i.
    pub fn right_deriv(&self, i: usize) -> Self {
        let mut r = Self::zero(&self.profile);
        for (s, c) in &self.comps {
            if s.contains(i) {
                let neg = s.count_above(i) % 2 == 1;
                r.add_comp(s.without(i), &if neg { -c } else { c.clone() });
            }
        }
        r
    }

    /// The degree-1 generator θ_i.
    pub fn generator(p: &Profile, i: usize) -> Self {
        Self::component(GSet::single(i), HSeries::one(p))
    }

    /// Σ_i c_i θ_i.
    pub fn linear(comps: &[HSeries]) -> Self {
        let p = *comps[0].profile();
        let mut r = Self::zero(&p);
        for (i, c) in comps.iter().enumerate() {
            r.add_comp(GSet::single(i), c);
        }
        r
    }

    /// Components of a degree-1 element.
    pub fn linear_comps(&self) -> Vec<HSeries> {
        (0..self.profile.dim)
            .map(|i| self.get(GSet::single(i)))
            .collect()
    }

    /// Σ_{i<j} m_{ij} θ_i θ_j for an antisymmetric matrix.
    pub fn from_matrix(m: &SeriesMatrix) -> Self {
        let mut r = Self::zero(&m.profile);
        for i in 0..m.n {
            for j in i + 1..m.n {
                r.add_comp(GSet::from_indices(&[i, j]), m.get(i, j));
            }
        }
        r
    }

    /// Antisymmetric coefficient matrix of the degree-2 part.
    pub fn to_matrix(&self) -> SeriesMatrix {
        let d = self.profile.dim;
        let mut m = SeriesMatrix::zero(&self.profile, d);
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    m.set(i, j, self.coeff(&[i, j]));
                }
            }
        }
        m
    }

    pub fn fmt_with(&self, tag: &str) -> String {
        if self.comps.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .comps
            .iter()
            .map(|(s, c)| format!("{tag}({})[{}]", s.fmt_one_based(), format_hseries(c)))
            .collect();
        parts.join(" ; ")
    }
}

impl<'a, K: Clone> Add<&'a Multi<K>> for &'a Multi<K> {
    type Output = Multi<K>;
    fn add(self, o: &Multi<K>) -> Multi<K> {
        let mut r = self.clone();
        for (s, c) in &o.comps {
            r.add_comp(*s, c);
        }
        r
    }
}

impl<'a, K: Clone> Sub<&'a Multi<K>> for &'a Multi<K> {
    type Output = Multi<K>;
    fn sub(self, o: &Multi<K>) -> Multi<K> {
        let mut r = self.clone();
        for (s, c) in &o.comps {
            r.add_comp(*s, &-c);
        }
        r
    }
}

impl<K: Clone> Neg for &Multi<K> {
    type Output = Multi<K>;
    fn neg(self) -> Multi<K> {
        self.scale(&CRational::from_int(-1))
    }
}

impl<K: Clone> Add for Multi<K> {
    type Output = Multi<K>;
    fn add(self, o: Multi<K>) -> Multi<K> {
        &self + &o
    }
}

impl<K: Clone> Sub for Multi<K> {
    type Output = Multi<K>;
    fn sub(self, o: Multi<K>) -> Multi<K> {
        &self - &o
    }
}

impl fmt::Display for PolyVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with("∂"))
    }
}

impl fmt::Display for DiffForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.fmt_with("dx"))
    }
}

impl PolyVectorField {
    /// Schouten–Nijenhuis bracket:
    /// `[P,Q] = Σ_i (∂^R P/∂ξ_i)(∂_i Q) − (∂_i P)(∂^L Q/∂ξ_i)`.
    pub fn schouten(&self, q: &PolyVectorField) -> PolyVectorField {
        let mut r = PolyVectorField::zero(&self.profile);
        for i in 0..self.profile.dim {
            let a = self.right_deriv(i);
            if !a.is_zero() {
                r = &r + &a.wedge(&q.deriv_x(i));
            }
            let b = q.left_deriv(i);
            if !b.is_zero() {
                r = &r - &self.deriv_x(i).wedge(&b);
            }
        }
        r
    }

    /// Interior product with a 1-form into the first slot: `Σ_i ξ_i ∂^L/∂ξ_i`.
    pub fn contract(&self, xi: &DiffForm) -> PolyVectorField {
        let mut r = PolyVectorField::zero(&self.profile);
        for (i, c) in xi.linear_comps().iter().enumerate() {
            if !c.is_zero() {
                r = &r + &self.left_deriv(i).scale_series(c);
            }
        }
        r
    }

    /// Evaluation on 1-forms: `P(α₁,…,α_k) = i_{α_k}⋯i_{α₁}P`, degree-k part only.
    pub fn evaluate(&self, forms: &[DiffForm]) -> HSeries {
        let mut cur = self.part(forms.len() as u32);
        for a in forms {
            cur = cur.contract(a);
        }
        cur.get(GSet::EMPTY)
    }

    /// Evaluation on differentials of functions.
    pub fn evaluate_on(&self, fs: &[&HSeries]) -> HSeries {
        let forms: Vec<DiffForm> = fs.iter().map(|f| DiffForm::function(f).de_rham()).collect();
        self.evaluate(&forms)
    }

    /// A vector field acting on a function.
    pub fn apply_to(&self, f: &HSeries) -> HSeries {
        let mut r = HSeries::zero(&self.profile);
        for i in 0..self.profile.dim {
            let c = self.get(GSet::single(i));
            if !c.is_zero() {
                r = &r + &(&c * &f.deriv(i));
            }
        }
        r
    }

    /// Bracket {f,g}_π = π(df, dg).
    pub fn poisson(&self, f: &HSeries, g: &HSeries) -> HSeries {
        self.evaluate_on(&[f, g])
    }

    /// Lie derivative along a vector field: `L_X P = [X, P]`.
    pub fn lie(&self, x: &PolyVectorField) -> PolyVectorField {
        x.schouten(self)
    }
}

impl DiffForm {
    /// Exterior derivative.
    pub fn de_rham(&self) -> DiffForm {
        let mut r = DiffForm::zero(&self.profile);
        for (s, c) in &self.comps {
            for j in 0..self.profile.dim {
                if s.contains(j) {
                    continue;
                }
                let dc = c.deriv(j);
                if dc.is_zero() {
                    continue;
                }
                let (t, neg) = GSet::single(j).wedge(s).expect("disjoint");
                r.add_comp(t, &if neg { -&dc } else { dc });
            }
        }
        r
    }

    /// Interior product with a vector field into the first slot.
    pub fn interior(&self, x: &PolyVectorField) -> DiffForm {
        let mut r = DiffForm::zero(&self.profile);
        for (i, c) in x.linear_comps().iter().enumerate() {
            if !c.is_zero() {
                r = &r + &self.left_deriv(i).scale_series(c);
            }
        }
        r
    }

    /// Cartan formula `L_X = i_X d + d i_X`.
    pub fn lie(&self, x: &PolyVectorField) -> DiffForm {
        &self.de_rham().interior(x) + &self.interior(x).de_rham()
    }

    /// 1-form paired with a vector field.
    pub fn pair(&self, x: &PolyVectorField) -> HSeries {
        self.part(1).interior(x).get(GSet::EMPTY)
    }

    /// θ = Σ_{i<j} B_{ij} x^i dx^j for a form with constant coefficients.
    pub fn canonical_primitive(&self) -> DiffForm {
        let p = self.profile;
        let mut r = DiffForm::zero(&p);
        for i in 0..p.dim {
            for j in i + 1..p.dim {
                let b = self.coeff(&[i, j]);
                r.add_comp(GSet::single(j), &(&b * &HSeries::x(&p, i)));
            }
        }
        r
    }
}

/// π♯ extended multiplicatively: on a k-form Σ η_I dx^{i1}∧⋯ ↦ Σ η_I π♯(dx^{i1})∧⋯.
pub fn pi_sharp(pi: &PolyVectorField, eta: &DiffForm) -> PolyVectorField {
    let p = *pi.profile();
    let images: Vec<PolyVectorField> = (0..p.dim)
        .map(|i| pi.contract(&DiffForm::generator(&p, i)))
        .collect();
    let mut r = PolyVectorField::zero(&p);
    for (s, c) in eta.comps() {
        let mut t = PolyVectorField::function(c);
        for i in s.indices() {
            t = t.wedge(&images[i]);
        }
        r = &r + &t;
    }
    r
}

/// B♯(X) = i_X B.
pub fn b_sharp(b: &DiffForm, x: &PolyVectorField) -> DiffForm {
    b.interior(x)
}

/// Jac_π(f,g,h) = {f,{g,h}} + {g,{h,f}} + {h,{f,g}}.
pub fn jacobiator(pi: &PolyVectorField, f: &HSeries, g: &HSeries, h: &HSeries) -> HSeries {
    let a = pi.poisson(f, &pi.poisson(g, h));
    let b = pi.poisson(g, &pi.poisson(h, f));
    let c = pi.poisson(h, &pi.poisson(f, g));
    &(&a + &b) + &c
}

/// A section (X, ξ) of TM ⊕ T*M.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GenSection {
    pub vec: PolyVectorField,
    pub form: DiffForm,
}

impl GenSection {
    pub fn new(vec: PolyVectorField, form: DiffForm) -> Self {
        GenSection { vec, form }
    }

    pub fn zero(p: &Profile) -> Self {
        GenSection {
            vec: PolyVectorField::zero(p),
            form: DiffForm::zero(p),
        }
    }

    /// (π♯df, df)
    pub fn graph_of(pi: &PolyVectorField, f: &HSeries) -> Self {
        let df = DiffForm::function(f).de_rham();
        GenSection {
            vec: pi.contract(&df),
            form: df,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.vec.is_zero() && self.form.is_zero()
    }

    pub fn sub(&self, o: &GenSection) -> GenSection {
        GenSection {
            vec: &self.vec - &o.vec,
            form: &self.form - &o.form,
        }
    }
}

/// ⟨(X,ξ),(Y,η)⟩ = η(X) + ξ(Y).
pub fn pairing(a: &GenSection, b: &GenSection) -> HSeries {
    &b.form.pair(&a.vec) + &a.form.pair(&b.vec)
}

/// ⟦(X,ξ),(Y,η)⟧ = ([X,Y], L_X η − i_Y dξ).
pub fn courant(a: &GenSection, b: &GenSection) -> GenSection {
    let v = a.vec.schouten(&b.vec);
    let f = &b.form.lie(&a.vec) - &a.form.de_rham().interior(&b.vec);
    GenSection { vec: v, form: f }
}

/// λ_B(X, ξ) = (X, ξ + i_X B).
pub fn b_transform(b: &DiffForm, e: &GenSection) -> GenSection {
    GenSection {
        vec: e.vec.clone(),
        form: &e.form + &b.interior(&e.vec),
    }
}

/// Defect ⟦λ_B e₁, λ_B e₂⟧ − λ_B⟦e₁, e₂⟧.
pub fn courant_defect(b: &DiffForm, e1: &GenSection, e2: &GenSection) -> GenSection {
    courant(&b_transform(b, e1), &b_transform(b, e2)).sub(&b_transform(b, &courant(e1, e2)))
}

/// Searches pairs of coordinate sections (∂_i, 0), (∂_j, 0) for a nonzero Courant defect.
pub fn courant_witness(b: &DiffForm) -> Option<(GenSection, GenSection, GenSection)> {
    let p = *b.profile();
    for i in 0..p.dim {
        for j in 0..p.dim {
            let e1 = GenSection::new(PolyVectorField::generator(&p, i), DiffForm::zero(&p));
            let e2 = GenSection::new(PolyVectorField::generator(&p, j), DiffForm::zero(&p));
            let d = courant_defect(b, &e1, &e2);
            if !d.is_zero() {
                return Some((e1, e2, d));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mono::Exps;

    fn p() -> Profile {
        Profile::desk()
    }

    fn hbar_j(p: &Profile) -> PolyVectorField {
        PolyVectorField::component(GSet::from_indices(&[0, 1]), HSeries::hbar_pow(p, 1))
    }

    #[test]
    fn schouten_generators() {
        let p = p();
        let pi = hbar_j(&p);
        let x1 = HSeries::x(&p, 0);
        let br = pi.schouten(&PolyVectorField::function(&x1));
        let sharp = pi_sharp(&pi, &DiffForm::generator(&p, 0));
        assert_eq!(
            sharp,
            PolyVectorField::component(GSet::single(1), HSeries::hbar_pow(&p, 1))
        );
        assert_eq!(br, -&sharp);

        let x = PolyVectorField::generator(&p, 0);
        let f = &x1 * &x1;
        assert_eq!(
            x.schouten(&PolyVectorField::function(&f)),
            PolyVectorField::function(&x1.scale_int(2))
        );
        assert!(pi.schouten(&pi).is_zero());
    }

    #[test]
    fn sharp_is_multiplicative() {
        let p = p();
        let pi = PolyVectorField::component(
            GSet::from_indices(&[0, 1]),
            &HSeries::hbar_pow(&p, 1) * &(&HSeries::one(&p) + &HSeries::x(&p, 0)),
        );
        let two = DiffForm::component(GSet::from_indices(&[0, 1]), HSeries::one(&p));
        let lhs = pi_sharp(&pi, &two);
        let rhs = pi_sharp(&pi, &DiffForm::generator(&p, 0))
            .wedge(&pi_sharp(&pi, &DiffForm::generator(&p, 1)));
        assert_eq!(lhs, rhs);
        assert!(pi_sharp(&pi, &DiffForm::zero(&p)).is_zero());
    }

    #[test]
    fn de_rham_examples() {
        let p = p();
        let a = DiffForm::component(GSet::single(1), HSeries::x(&p, 0));
        assert_eq!(
            a.de_rham(),
            DiffForm::component(GSet::from_indices(&[0, 1]), HSeries::one(&p))
        );
        assert!(a.de_rham().de_rham().is_zero());
        let top = DiffForm::component(GSet::from_indices(&[0, 1]), HSeries::x(&p, 0));
        assert!(top.de_rham().is_zero());
    }

    #[test]
    fn jacobiator_brute_force() {
        let p = p();
        // π = ℏ x₁ ∂₁∧∂₂; {f,g} = ℏ x₁ (f₁g₂ − f₂g₁)
        let pi = PolyVectorField::component(
            GSet::from_indices(&[0, 1]),
            HSeries::monomial(&p, 1, Exps::unit(0), CRational::one()),
        );
        let (x1, x2) = (HSeries::x(&p, 0), HSeries::x(&p, 1));
        let h = &x1 * &x2;
        // brute force: {x2,{x1,x2}}: {x1,x2} = ℏx1, {x2,ℏx1} = −ℏ²x1; {x1x2, x1} ... computed by hand below
        let br = |f: &HSeries, g: &HSeries| {
            let w = HSeries::monomial(&p, 1, Exps::unit(0), CRational::one());
            &w * &(&(&f.deriv(0) * &g.deriv(1)) - &(&f.deriv(1) * &g.deriv(0)))
        };
        let oracle = &(&br(&x1, &br(&x2, &h)) + &br(&h, &br(&x1, &x2))) + &br(&x2, &br(&h, &x1));
        assert_eq!(jacobiator(&pi, &x1, &x2, &h), oracle);
        // 2D bivectors are Poisson
        assert!(oracle.is_zero());
    }

    #[test]
    fn courant_basics() {
        let p = p();
        let d1 = PolyVectorField::generator(&p, 0);
        let d2 = PolyVectorField::generator(&p, 1);
        let e1 = GenSection::new(d1.clone(), DiffForm::zero(&p));
        let e2 = GenSection::new(PolyVectorField::zero(&p), DiffForm::generator(&p, 0));
        assert_eq!(pairing(&e1, &e2), HSeries::one(&p));
        let c = courant(&e1, &GenSection::new(d2, DiffForm::zero(&p)));
        assert!(c.is_zero());
        let b0 = DiffForm::zero(&p);
        assert_eq!(b_transform(&b0, &e1), e1);
    }

    #[test]
    fn non_closed_b_has_witness() {
        let p = p().with_dim(3);
        let b = DiffForm::component(GSet::from_indices(&[0, 1]), HSeries::x(&p, 2));
        assert!(!b.de_rham().is_zero());
        assert!(courant_witness(&b).is_some());
        let closed = DiffForm::component(GSet::from_indices(&[0, 1]), HSeries::x(&p, 0));
        assert!(closed.de_rham().is_zero());
        assert!(courant_witness(&closed).is_none());
    }
}
