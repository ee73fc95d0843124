//! Maurer–Cartan calculus in filtered DGLAs: residuals, gauge action, Campbell–Hausdorff,
//! twisting and finite L∞ morphisms.

use std::collections::HashMap;
use std::rc::Rc;

use crate::coeff::CRational;
use crate::error::{Error, Result};
use crate::hochschild::PolyDiffOp;
use crate::hseries::HSeries;
use crate::ode::Carrier;
use crate::polyvector::PolyVectorField;
use crate::profile::Profile;

/// Iteration guard for the filtration-convergent series.
pub const SERIES_GUARD: usize = 64;

type Unary<V> = Rc<dyn Fn(&V) -> V>;
type Binary<V> = Rc<dyn Fn(&V, &V) -> V>;

/// A filtered DGLA given by its differential, bracket, degree and filtration functions.
#[derive(Clone)]
pub struct MCContext<V> {
    d: Unary<V>,
    bracket: Binary<V>,
    degree: Rc<dyn Fn(&V) -> Option<i64>>,
    filt: Rc<dyn Fn(&V) -> Option<u32>>,
}

impl<V: Carrier + 'static> MCContext<V> {
    pub fn new(
        d: impl Fn(&V) -> V + 'static,
        bracket: impl Fn(&V, &V) -> V + 'static,
        degree: impl Fn(&V) -> Option<i64> + 'static,
        filt: impl Fn(&V) -> Option<u32> + 'static,
    ) -> Self {
        MCContext {
            d: Rc::new(d),
            bracket: Rc::new(bracket),
            degree: Rc::new(degree),
            filt: Rc::new(filt),
        }
    }

    pub fn d(&self, a: &V) -> V {
        (self.d)(a)
    }

    pub fn bracket(&self, a: &V, b: &V) -> V {
        (self.bracket)(a, b)
    }

    pub fn degree(&self, a: &V) -> Option<i64> {
        (self.degree)(a)
    }

    /// Filtration degree, `None` for zero.
    pub fn filt(&self, a: &V) -> Option<u32> {
        (self.filt)(a)
    }

    fn require_filt(&self, a: &V) -> Result<()> {
        match self.filt(a) {
            Some(0) => Err(Error::FiltrationViolation(
                "element has filtration degree 0".into(),
            )),
            _ => Ok(()),
        }
    }

    /// `dα + ½[α,α]`.
    pub fn mc_residual(&self, alpha: &V) -> Result<V> {
        self.require_filt(alpha)?;
        Ok(self.d(alpha).plus(
            &self
                .bracket(alpha, alpha)
                .scaled(&CRational::from_frac(1, 2)),
        ))
    }

    /// `α^{exp ξ} = exp([·,ξ])α + ((exp([·,ξ]) − 1)/[·,ξ]) dξ`.
    pub fn gauge_action(&self, alpha: &V, xi: &V) -> Result<V> {
        self.require_filt(xi)?;
        let ad = |v: &V| self.bracket(v, xi);
        let mut acc = alpha.clone();
        let mut term = alpha.clone();
        let mut n = 0i64;
        loop {
            n += 1;
            term = ad(&term).scaled(&CRational::from_frac(1, n));
            if term.is_null() {
                break;
            }
            acc = acc.plus(&term);
            if n as usize > SERIES_GUARD {
                return Err(Error::NonTermination("gauge action series".into()));
            }
        }
        // Σ adᵏ dξ / (k+1)!, `term` holding adᵏ dξ / k!
        let mut term = self.d(xi);
        let mut k = 0i64;
        while !term.is_null() {
            acc = acc.plus(&term.scaled(&CRational::from_frac(1, k + 1)));
            k += 1;
            term = ad(&term).scaled(&CRational::from_frac(1, k));
            if k as usize > SERIES_GUARD {
                return Err(Error::NonTermination("gauge action series".into()));
            }
        }
        Ok(acc)
    }

    /// `log(e^ξ e^η)` by the Dynkin series on right-nested brackets.
    pub fn campbell_hausdorff(&self, xi: &V, eta: &V) -> Result<V> {
        self.require_filt(xi)?;
        self.require_filt(eta)?;
        let gens = [xi, eta];
        // words as bit vectors, letter 0 = ξ, 1 = η; memo nested brackets keyed by (len, bits)
        let mut memo: HashMap<(usize, u64), V> = HashMap::new();
        let mut live: Vec<u64> = vec![0, 1];
        for (i, g) in gens.iter().enumerate() {
            memo.insert((1, i as u64), (*g).clone());
        }
        let mut acc = xi.plus(eta);
        let mut len = 1usize;
        loop {
            len += 1;
            if len > SERIES_GUARD {
                return Err(Error::NonTermination("Campbell–Hausdorff series".into()));
            }
            let mut next = vec![];
            for &w in &live {
                let inner = memo[&(len - 1, w)].clone();
                for (letter, g) in gens.iter().enumerate() {
                    // [g, inner]
                    let v = self.bracket(g, &inner);
                    if v.is_null() {
                        continue;
                    }
                    let word = ((letter as u64) << (len - 1)) | w;
                    let c = dynkin_coeff(word, len);
                    if !c.is_zero() {
                        acc = acc.plus(&v.scaled(&c));
                    }
                    memo.insert((len, word), v);
                    next.push(word);
                }
            }
            if next.is_empty() {
                return Ok(acc);
            }
            live = next;
        }
    }

    /// Same bracket, differential `d + [α,·]`.
    pub fn twist(&self, alpha: &V) -> MCContext<V> {
        let d = self.d.clone();
        let br = self.bracket.clone();
        let a = alpha.clone();
        MCContext {
            d: Rc::new(move |v: &V| d(v).plus(&br(&a, v))),
            bracket: self.bracket.clone(),
            degree: self.degree.clone(),
            filt: self.filt.clone(),
        }
    }

    /// `d[a,b] − [da,b] − (−1)^{|a|}[a,db]`.
    pub fn leibniz_defect(&self, a: &V, b: &V) -> V {
        let lhs = self.d(&self.bracket(a, b));
        let t1 = self.bracket(&self.d(a), b);
        let t2 = self.bracket(a, &self.d(b));
        let sign = if self.degree(a).unwrap_or(0).rem_euclid(2) == 0 {
            1
        } else {
            -1
        };
        lhs.minus(&t1).minus(&t2.scaled(&CRational::from_int(sign)))
    }

    /// `[a,[b,c]] − [[a,b],c] − (−1)^{|a||b|}[b,[a,c]]`.
    pub fn jacobi_defect(&self, a: &V, b: &V, c: &V) -> V {
        let da = self.degree(a).unwrap_or(0);
        let db = self.degree(b).unwrap_or(0);
        let sign = if (da * db).rem_euclid(2) == 0 { 1 } else { -1 };
        let l = self.bracket(a, &self.bracket(b, c));
        let r1 = self.bracket(&self.bracket(a, b), c);
        let r2 = self.bracket(b, &self.bracket(a, c));
        l.minus(&r1).minus(&r2.scaled(&CRational::from_int(sign)))
    }
}

/// Coefficient of the right-nested word `w` (length `len`, first letter in the high bit) in
/// `log(e^X e^Y)`: Σ over block decompositions X^{r₁}Y^{s₁}⋯ of (−1)^{n−1}/(n·len·Π rᵢ!sᵢ!).
fn dynkin_coeff(word: u64, len: usize) -> CRational {
    let letters: Vec<u8> = (0..len).rev().map(|i| ((word >> i) & 1) as u8).collect();
    // dp over (position, blocks used) -> Σ 1/Π r!s!
    let mut dp: Vec<HashMap<usize, CRational>> = vec![HashMap::new(); len + 1];
    dp[0].insert(0, CRational::one());
    for start in 0..len {
        let cur: Vec<(usize, CRational)> = dp[start].iter().map(|(k, v)| (*k, v.clone())).collect();
        if cur.is_empty() {
            continue;
        }
        // a block is a run X^r Y^s starting at `start`
        let (mut r, mut sy) = (0, 0);
        for end in start + 1..=len {
            if letters[end - 1] == 0 {
                if sy > 0 {
                    break;
                }
                r += 1;
            } else {
                sy += 1;
            }
            add_block(&mut dp, &cur, end, r, sy);
        }
    }
    let mut total = CRational::zero();
    for (n, v) in &dp[len] {
        let sign = if n % 2 == 1 { 1 } else { -1 };
        total += &(v * &CRational::from_frac(sign, (*n * len) as i64));
    }
    total
}

fn add_block(
    dp: &mut [HashMap<usize, CRational>],
    cur: &[(usize, CRational)],
    end: usize,
    r: usize,
    s: usize,
) {
    let w = CRational::from_frac(1, (fact(r) * fact(s)) as i64);
    for (k, v) in cur {
        let e = dp[end].entry(k + 1).or_insert_with(CRational::zero);
        *e += &(v * &w);
    }
}

fn fact(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// `(𝒳^{•+1}[[ℏ]], 0, [·,·]_SN)` filtered by ℏ-order.
pub fn polyvector_dgla(p: &Profile) -> MCContext<PolyVectorField> {
    let p = *p;
    MCContext::new(
        move |_v: &PolyVectorField| PolyVectorField::zero(&p),
        |a: &PolyVectorField, b: &PolyVectorField| a.schouten(b),
        |a: &PolyVectorField| a.degree().map(|k| k as i64 - 1),
        |a: &PolyVectorField| a.hbar_valuation(),
    )
}

/// `(C^{•+1}[[ℏ]], ∂^Hoch, [·,·]_G)` filtered by ℏ-order.
pub fn hochschild_dgla(p: &Profile) -> MCContext<PolyDiffOp<HSeries>> {
    let mu = PolyDiffOp::<HSeries>::pointwise(p);
    MCContext::new(
        move |v: &PolyDiffOp<HSeries>| v.hoch_coboundary(&mu),
        |a: &PolyDiffOp<HSeries>, b: &PolyDiffOp<HSeries>| a.gerstenhaber(b),
        |a: &PolyDiffOp<HSeries>| Some(a.degree()),
        |a: &PolyDiffOp<HSeries>| a.hbar_valuation(),
    )
}

type StructureMap<V, W> = Rc<dyn Fn(&[V]) -> W>;

/// Finite L∞ morphism `F₁,…,F_M`; maps beyond the cutoff are zero.
#[derive(Clone)]
pub struct LInfMorphism<V, W> {
    maps: Vec<StructureMap<V, W>>,
    target_zero: W,
}

impl<V: Carrier + 'static, W: Carrier + 'static> LInfMorphism<V, W> {
    /// `maps[n-1]` is F_n.
    pub fn new(maps: Vec<StructureMap<V, W>>, target_zero: W) -> Self {
        LInfMorphism { maps, target_zero }
    }

    pub fn cutoff(&self) -> usize {
        self.maps.len()
    }

    pub fn apply(&self, n: usize, args: &[V]) -> W {
        match self.maps.get(n.wrapping_sub(1)) {
            Some(f) if n >= 1 => f(args),
            _ => self.target_zero.clone(),
        }
    }

    /// `Σ 1/n! F_n(α,…,α)`.
    pub fn push(&self, alpha: &V, ctx: &MCContext<V>) -> Result<W> {
        ctx.require_filt(alpha)?;
        let mut acc = self.target_zero.clone();
        let mut fact = 1i64;
        for n in 1..=self.cutoff() {
            fact *= n as i64;
            let args = vec![alpha.clone(); n];
            acc = acc.plus(&self.apply(n, &args).scaled(&CRational::from_frac(1, fact)));
        }
        Ok(acc)
    }

    /// `F^α_n(γ…) = Σ_k 1/k! F_{k+n}(α,…,α,γ…)`.
    pub fn twist(&self, alpha: &V, ctx: &MCContext<V>) -> Result<LInfMorphism<V, W>> {
        ctx.require_filt(alpha)?;
        let mut maps: Vec<StructureMap<V, W>> = vec![];
        for n in 1..=self.cutoff() {
            let me = self.clone();
            let a = alpha.clone();
            maps.push(Rc::new(move |gs: &[V]| {
                let mut acc = me.target_zero.clone();
                let mut fact = 1i64;
                for k in 0..=(me.cutoff() - n) {
                    if k > 0 {
                        fact *= k as i64;
                    }
                    let mut args = vec![a.clone(); k];
                    args.extend_from_slice(gs);
                    acc = acc.plus(
                        &me.apply(k + n, &args)
                            .scaled(&CRational::from_frac(1, fact)),
                    );
                }
                acc
            }));
        }
        Ok(LInfMorphism {
            maps,
            target_zero: self.target_zero.clone(),
        })
    }

    /// Left minus right side of the homotopy relation between F₁ and F₂.
    pub fn quadratic_defect(&self, src: &MCContext<V>, dst: &MCContext<W>, g1: &V, g2: &V) -> W {
        let f2 = |a: &V, b: &V| self.apply(2, &[a.clone(), b.clone()]);
        let sign = if src.degree(g1).unwrap_or(0).rem_euclid(2) == 0 {
            1
        } else {
            -1
        };
        let lhs = dst
            .d(&f2(g1, g2))
            .plus(&f2(&src.d(g1), g2))
            .plus(&f2(g1, &src.d(g2)).scaled(&CRational::from_int(sign)));
        let f1 = |a: &V| self.apply(1, std::slice::from_ref(a));
        let rhs = f1(&src.bracket(g1, g2)).minus(&dst.bracket(&f1(g1), &f1(g2)));
        lhs.minus(&rhs)
    }

    /// `F^α₁(dγ + [α,γ]) − (d + [β,·]) F^α₁(γ)` with β the pushed element.
    pub fn twisted_intertwining_defect(
        &self,
        src: &MCContext<V>,
        dst: &MCContext<W>,
        alpha: &V,
        gamma: &V,
    ) -> Result<W> {
        let beta = self.push(alpha, src)?;
        let tw = self.twist(alpha, src)?;
        let src_a = src.twist(alpha);
        let dst_b = dst.twist(&beta);
        let lhs = tw.apply(1, &[src_a.d(gamma)]);
        let rhs = dst_b.d(&tw.apply(1, std::slice::from_ref(gamma)));
        Ok(lhs.minus(&rhs))
    }
}

/// The formality map restricted to constant bivectors: F_n(γ₁,…,γ_n) = Π_k γ_k^{ij} ∂_i⊗∂_j.
pub fn constant_bivector_formality(
    p: &Profile,
    cutoff: usize,
) -> LInfMorphism<PolyVectorField, PolyDiffOp<HSeries>> {
    let p = *p;
    let mut maps: Vec<StructureMap<PolyVectorField, PolyDiffOp<HSeries>>> = vec![];
    for _ in 0..cutoff {
        maps.push(Rc::new(move |gs: &[PolyVectorField]| {
            let mut acc =
                PolyDiffOp::from_terms(&p, 2, [(vec![Default::default(); 2], HSeries::one(&p))]);
            for g in gs {
                acc = crate::star::bidiff_symbol_mul(&acc, &crate::star::bivector_symbol(g));
            }
            acc
        }));
    }
    LInfMorphism::new(maps, PolyDiffOp::zero(&p, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::SeriesMatrix;
    use crate::mono::GSet;

    #[test]
    fn dynkin_word_coefficients() {
        // XY and YX together give ½[X,Y]
        assert_eq!(dynkin_coeff(0b01, 2), CRational::from_frac(1, 4));
        assert_eq!(dynkin_coeff(0b10, 2), CRational::from_frac(-1, 4));
    }

    fn mat_exp(m: &SeriesMatrix) -> SeriesMatrix {
        let mut acc = SeriesMatrix::identity(&m.profile, m.n);
        let mut term = acc.clone();
        for k in 1..20 {
            term = term.mul(m).scale(&CRational::from_frac(1, k));
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term);
        }
        acc
    }

    fn mat_log(m: &SeriesMatrix) -> SeriesMatrix {
        let u = m.sub(&SeriesMatrix::identity(&m.profile, m.n));
        let mut acc = SeriesMatrix::zero(&m.profile, m.n);
        let mut pw = SeriesMatrix::identity(&m.profile, m.n);
        for k in 1..20i64 {
            pw = pw.mul(&u);
            if pw.is_zero() {
                break;
            }
            let c = CRational::from_frac(if k % 2 == 1 { 1 } else { -1 }, k);
            acc = acc.add(&pw.scale(&c));
        }
        acc
    }

    #[test]
    fn campbell_hausdorff_matrix_oracle() {
        let p = Profile::desk();
        let ctx = MCContext::new(
            |m: &SeriesMatrix| m.zero_like(),
            |a: &SeriesMatrix, b: &SeriesMatrix| a.mul(b).sub(&b.mul(a)),
            |_m: &SeriesMatrix| Some(0),
            |m: &SeriesMatrix| m.hbar_val(),
        );
        let h = HSeries::hbar_pow(&p, 1);
        let s = |v: i64| h.scale_int(v);
        let mut x = SeriesMatrix::zero(&p, 3);
        let mut y = SeriesMatrix::zero(&p, 3);
        x.set(0, 1, s(1));
        x.set(1, 2, s(2));
        x.set(2, 0, s(-1));
        x.set(0, 0, s(3));
        y.set(1, 0, s(1));
        y.set(2, 2, s(-2));
        y.set(0, 2, s(5));
        let ch = ctx.campbell_hausdorff(&x, &y).unwrap();
        assert_eq!(ch, mat_log(&mat_exp(&x).mul(&mat_exp(&y))));
    }

    #[test]
    fn trivial_cases() {
        let p = Profile::desk();
        let ctx = polyvector_dgla(&p);
        let z = PolyVectorField::zero(&p);
        assert!(ctx.mc_residual(&z).unwrap().is_zero());
        let pi = PolyVectorField::component(GSet::from_indices(&[0, 1]), HSeries::hbar_pow(&p, 1));
        assert!(ctx.mc_residual(&pi).unwrap().is_zero());
        assert_eq!(ctx.gauge_action(&pi, &z).unwrap(), pi);
        let xi = PolyVectorField::component(GSet::single(0), HSeries::hbar_pow(&p, 1));
        assert_eq!(ctx.campbell_hausdorff(&xi, &z).unwrap(), xi);
        let unfiltered = PolyVectorField::component(GSet::from_indices(&[0, 1]), HSeries::one(&p));
        assert!(matches!(
            ctx.mc_residual(&unfiltered),
            Err(Error::FiltrationViolation(_))
        ));
    }
}
