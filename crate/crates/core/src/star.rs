//! Star products on a chart: Moyal products for constant ℏ-dependent Poisson matrices,
//! equivalences, the fiberwise normalizer, the B-field flow and constant transition cocycles.
//!
//! Exponent convention: `f ⋆ g = μ₀ ∘ exp(Πⁱʲ ∂ᵢ⊗∂ⱼ)(f⊗g)` with no factor ½, so
//! `[xⁱ, xʲ]_⋆ = 2Πⁱʲ`.

use std::fmt;

use crate::coeff::CRational;
use crate::error::{Error, Result};
use crate::gauge;
use crate::hochschild::{interpolate, DiffAlgebra, PolyDiffOp};
use crate::hseries::HSeries;
use crate::matrix::{ScalarMatrix, SeriesMatrix};
use crate::mono::Exps;
use crate::ode::{solve_linear, star_exponential, TOperator, TPoly};
use crate::polyvector::{pi_sharp, DiffForm, PolyVectorField};
use crate::profile::Profile;
use crate::weyl::WeylElement;

/// An antisymmetric matrix of x-constant ℏ-series with vanishing ℏ⁰ part.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstPoissonMatrix {
    m: SeriesMatrix,
}

impl ConstPoissonMatrix {
    pub fn new(m: SeriesMatrix) -> Result<Self> {
        if !m.is_antisymmetric() {
            return Err(Error::NotAntisymmetric);
        }
        if m.e.iter().any(|c| !c.is_x_constant()) {
            return Err(Error::Validation(
                "Poisson matrix entries must be constant in x".into(),
            ));
        }
        if m.e.iter().any(|c| !c.coeff(0).is_zero()) {
            return Err(Error::NotFormal);
        }
        Ok(ConstPoissonMatrix { m })
    }

    pub fn from_bivector(pi: &PolyVectorField) -> Result<Self> {
        Self::new(pi.to_matrix())
    }

    /// `ℏ J` scaled by a series, J the standard symplectic matrix on the first two coordinates.
    pub fn standard(p: &Profile, c: &HSeries) -> Result<Self> {
        let mut m = SeriesMatrix::zero(p, p.dim);
        m.set(0, 1, c.clone());
        m.set(1, 0, -c);
        Self::new(m)
    }

    pub fn matrix(&self) -> &SeriesMatrix {
        &self.m
    }

    pub fn profile(&self) -> &Profile {
        &self.m.profile
    }

    /// Scalar matrix of the ℏᵏ coefficients.
    pub fn coeff_matrix(&self, k: u32) -> ScalarMatrix {
        ScalarMatrix {
            n: self.m.n,
            e: self.m.e.iter().map(|c| c.get(k, &Exps::ZERO)).collect(),
        }
    }

    pub fn to_bivector(&self) -> PolyVectorField {
        PolyVectorField::from_matrix(&self.m)
    }
}

/// `Σ_{i≠j} γⁱʲ ∂ᵢ⊗∂ⱼ` for a bivector γ.
pub fn bivector_symbol(g: &PolyVectorField) -> PolyDiffOp<HSeries> {
    let p = *g.profile();
    let mut r = PolyDiffOp::zero(&p, 2);
    for i in 0..p.dim {
        for j in 0..p.dim {
            if i != j {
                r.add_term(vec![Exps::unit(i), Exps::unit(j)], &g.coeff(&[i, j]));
            }
        }
    }
    r
}

/// Product of commuting constant-coefficient bidifferential symbols.
pub fn bidiff_symbol_mul<C: DiffAlgebra>(a: &PolyDiffOp<C>, b: &PolyDiffOp<C>) -> PolyDiffOp<C> {
    let mut r = PolyDiffOp::zero(a.profile(), 2);
    for (ka, ca) in a.terms() {
        for (kb, cb) in b.terms() {
            let c = ca.times(cb);
            if !c.is_zero_elem() {
                r.add_term(vec![ka[0].add(&kb[0]), ka[1].add(&kb[1])], &c);
            }
        }
    }
    r
}

/// `exp(symbol) − 1`, dropping slot orders above `bound` (they vanish on the profile).
pub fn exp_bidiff<C: DiffAlgebra>(sym: &PolyDiffOp<C>, bound: u32) -> PolyDiffOp<C> {
    let p = *sym.profile();
    let mut acc = PolyDiffOp::zero(&p, 2);
    let mut term = PolyDiffOp::from_terms(&p, 2, [(vec![Exps::ZERO; 2], C::one_of(&p))]);
    let mut n = 0i64;
    loop {
        n += 1;
        term = bidiff_symbol_mul(&term, sym).scale(&CRational::from_frac(1, n));
        term = PolyDiffOp::from_terms(
            &p,
            2,
            term.terms()
                .iter()
                .filter(|(k, _)| k.iter().all(|e| e.degree() <= bound))
                .map(|(k, c)| (k.clone(), c.clone())),
        );
        if term.is_zero() {
            return acc;
        }
        acc = acc.add(&term);
    }
}

/// `f * g = fg + Π(f,g)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StarProduct {
    bidiff: PolyDiffOp<HSeries>,
}

impl StarProduct {
    pub fn from_bidiff(bidiff: PolyDiffOp<HSeries>) -> Result<Self> {
        if bidiff.arity() != 2 {
            return Err(Error::ArityMismatch {
                expected: 2,
                got: bidiff.arity(),
            });
        }
        if bidiff.hbar_valuation() == Some(0) {
            return Err(Error::FiltrationViolation("Π must vanish at ℏ⁰".into()));
        }
        Ok(StarProduct { bidiff })
    }

    pub fn pointwise(p: &Profile) -> Self {
        StarProduct {
            bidiff: PolyDiffOp::zero(p, 2),
        }
    }

    pub fn moyal(pi: &ConstPoissonMatrix) -> Self {
        let p = *pi.profile();
        let sym = bivector_symbol(&pi.to_bivector());
        StarProduct {
            bidiff: exp_bidiff(&sym, p.x_degree),
        }
    }

    pub fn profile(&self) -> &Profile {
        self.bidiff.profile()
    }

    pub fn bidiff(&self) -> &PolyDiffOp<HSeries> {
        &self.bidiff
    }

    /// μ₀ + Π.
    pub fn full_op(&self) -> PolyDiffOp<HSeries> {
        PolyDiffOp::pointwise(self.profile()).add(&self.bidiff)
    }

    pub fn mul(&self, f: &HSeries, g: &HSeries) -> HSeries {
        &(f * g) + &self.bidiff.apply(&[f.clone(), g.clone()]).expect("arity 2")
    }

    /// `(f*g)*h − f*(g*h)`.
    pub fn assoc_residual(&self, f: &HSeries, g: &HSeries, h: &HSeries) -> HSeries {
        &self.mul(&self.mul(f, g), h) - &self.mul(f, &self.mul(g, h))
    }

    /// `∂Π + ½[Π,Π]_G`; evaluated on (f,g,h) it equals minus [`Self::assoc_residual`].
    /// Terms of total order above Dx are dropped: they only see triples the profile cannot
    /// multiply exactly.
    pub fn mc_residual(&self) -> PolyDiffOp<HSeries> {
        let p = *self.profile();
        let mu = PolyDiffOp::pointwise(&p);
        let half = CRational::from_frac(1, 2);
        let r = self
            .bidiff
            .hoch_coboundary(&mu)
            .add(&self.bidiff.gerstenhaber(&self.bidiff).scale(&half));
        PolyDiffOp::from_terms(
            &p,
            3,
            r.terms()
                .iter()
                .filter(|(k, _)| k.iter().map(|e| e.degree()).sum::<u32>() <= p.x_degree)
                .map(|(k, c)| (k.clone(), c.clone())),
        )
    }

    /// `f*1 − f` plus `1*f − f`.
    pub fn unit_defect(&self, f: &HSeries) -> HSeries {
        let one = HSeries::one(self.profile());
        &(&self.mul(f, &one) - f) + &(&self.mul(&one, f) - f)
    }

    /// Associativity residuals on all monomial triples of total degree ≤ `deg`; returns the
    /// first nonzero residual found, if any.
    pub fn assoc_scan(&self, deg: u32) -> Option<(Exps, Exps, Exps, HSeries)> {
        let p = *self.profile();
        let monos = Exps::up_to_degree(p.dim, deg);
        for a in &monos {
            for b in &monos {
                if a.degree() + b.degree() > deg {
                    continue;
                }
                for c in &monos {
                    if a.degree() + b.degree() + c.degree() > deg {
                        continue;
                    }
                    let m = |e: &Exps| HSeries::monomial(&p, 0, *e, CRational::one());
                    let r = self.assoc_residual(&m(a), &m(b), &m(c));
                    if !r.is_zero() {
                        return Some((*a, *b, *c, r));
                    }
                }
            }
        }
        None
    }
}

/// `id + ℏT₁ + ℏ²T₂ + ⋯`.
#[derive(Clone, Debug, PartialEq)]
pub struct Equivalence {
    op: PolyDiffOp<HSeries>,
}

impl Equivalence {
    pub fn identity(p: &Profile) -> Self {
        Equivalence {
            op: PolyDiffOp::identity(p),
        }
    }

    pub fn from_op(op: PolyDiffOp<HSeries>) -> Result<Self> {
        if op.arity() != 1 {
            return Err(Error::ArityMismatch {
                expected: 1,
                got: op.arity(),
            });
        }
        let rest = op.sub(&PolyDiffOp::identity(op.profile()));
        if rest.hbar_valuation() == Some(0) {
            return Err(Error::Validation(
                "equivalence must be the identity at ℏ⁰".into(),
            ));
        }
        Ok(Equivalence { op })
    }

    /// `T f = f(M x)` for an x-constant matrix `M ≡ 1 mod ℏ`.
    pub fn linear_substitution(m: &SeriesMatrix) -> Result<Self> {
        let p = m.profile;
        let d = p.dim;
        let one = SeriesMatrix::identity(&p, d);
        let delta = m.sub(&one);
        if delta
            .e
            .iter()
            .any(|c| !c.coeff(0).is_zero() || !c.is_x_constant())
        {
            return Err(Error::Validation(
                "substitution matrix must be x-constant and ≡ 1 mod ℏ".into(),
            ));
        }
        // f(x + Δx) = Σ_α (Δx)^α/α! ∂^α f
        let shifts: Vec<HSeries> = (0..d)
            .map(|i| {
                let mut s = HSeries::zero(&p);
                for j in 0..d {
                    s = &s + &(delta.get(i, j) * &HSeries::x(&p, j));
                }
                s
            })
            .collect();
        let mut op = PolyDiffOp::zero(&p, 1);
        for alpha in Exps::up_to_degree(d, p.x_degree) {
            let mut c = HSeries::one(&p);
            for (i, s) in shifts.iter().enumerate() {
                for _ in 0..alpha.get(i) {
                    c = &c * s;
                }
            }
            op.add_term(
                vec![alpha],
                &c.scale(&CRational::from_frac(1, alpha.factorial() as i64)),
            );
        }
        Ok(Equivalence { op })
    }

    pub fn op(&self) -> &PolyDiffOp<HSeries> {
        &self.op
    }

    pub fn apply(&self, f: &HSeries) -> HSeries {
        self.op.apply(std::slice::from_ref(f)).expect("arity 1")
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &Equivalence) -> Equivalence {
        Equivalence {
            op: self.op.compose(0, &o.op),
        }
    }

    /// Neumann inverse `Σ (−S)ᵏ` with `T = 1 + S`.
    pub fn inverse(&self) -> Equivalence {
        let p = *self.op.profile();
        let id = PolyDiffOp::identity(&p);
        let s = self.op.sub(&id).scale(&CRational::from_int(-1));
        let mut acc = id.clone();
        let mut pw = id;
        loop {
            pw = pw.compose(0, &s);
            if pw.is_zero() {
                return Equivalence { op: acc };
            }
            acc = acc.add(&pw);
        }
    }
}

/// `f *' g = T⁻¹(Tf * Tg)`, re-interpolated as a bidifferential operator of slot order ≤ Dx.
pub fn conjugate(t: &Equivalence, s: &StarProduct) -> Result<StarProduct> {
    let p = *s.profile();
    let tinv = t.inverse();
    let full = interpolate(&p, 2, p.x_degree, |a| {
        Ok(tinv.apply(&s.mul(&t.apply(&a[0]), &t.apply(&a[1]))))
    })?;
    StarProduct::from_bidiff(full.sub(&PolyDiffOp::pointwise(&p)))
}

/// Weyl-fiber Moyal bidifferential `exp(πⁱʲ ∂_{yⁱ}⊗∂_{yʲ}) − 1` with x-dependent entries allowed.
pub fn fiber_moyal_op(pi: &SeriesMatrix) -> PolyDiffOp<WeylElement> {
    let p = pi.profile;
    let mut sym = PolyDiffOp::zero(&p, 2);
    for i in 0..p.dim {
        for j in 0..p.dim {
            let c = pi.get(i, j);
            if i != j && !c.is_zero() {
                sym.add_term(
                    vec![Exps::unit(i), Exps::unit(j)],
                    &WeylElement::from_hseries(&p, c),
                );
            }
        }
    }
    exp_bidiff(&sym, p.y_degree)
}

/// Applies a fiber product `a b + op(a,b)`.
pub fn fiber_mul(op: &PolyDiffOp<WeylElement>, a: &WeylElement, b: &WeylElement) -> WeylElement {
    &(a * b) + &op.apply(&[a.clone(), b.clone()]).expect("arity 2")
}

/// `P = exp(χ)` with χ linear in y, intertwining the full fiber Moyal product with the
/// one built from ℏπ₁ alone: `P(a) ⋄_F P(b) = P(a ⋄ b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalizer {
    /// Stage generators χ_m (the m-th stage is `exp(ℏ^{m−1} χ_m)`).
    pub stages: Vec<(u32, ScalarMatrix)>,
    /// `P f = f(M y)`.
    pub m: SeriesMatrix,
    pub m_inv: SeriesMatrix,
}

fn series_exp(a: &SeriesMatrix) -> SeriesMatrix {
    let mut acc = SeriesMatrix::identity(&a.profile, a.n);
    let mut term = acc.clone();
    let mut k = 0i64;
    loop {
        k += 1;
        term = term.mul(a).scale(&CRational::from_frac(1, k));
        if term.is_zero() {
            return acc;
        }
        acc = acc.add(&term);
    }
}

pub fn moyal_normalizer(pi: &ConstPoissonMatrix) -> Result<Normalizer> {
    let p = *pi.profile();
    let pi1 = pi.coeff_matrix(1);
    let pi1_inv = pi1.inverse().ok_or(Error::DegeneratePi1)?;
    let mut cur = pi.matrix().clone();
    let mut m = SeriesMatrix::identity(&p, p.dim);
    let mut stages = vec![];
    let half = CRational::from_frac(1, 2);
    for stage in 2..=p.hbar_order {
        let pim = ScalarMatrix {
            n: p.dim,
            e: cur.e.iter().map(|c| c.get(stage, &Exps::ZERO)).collect(),
        };
        if pim.is_zero() {
            continue;
        }
        let chi = pim.mul(&pi1_inv).scale(&half);
        let gen =
            SeriesMatrix::from_scalar(&p, &chi).scale_series(&HSeries::hbar_pow(&p, stage - 1));
        let e = series_exp(&gen);
        let einv = e.inverse()?;
        cur = einv.mul(&cur).mul(&einv.transpose());
        m = m.mul(&e);
        stages.push((stage, chi));
    }
    let target = SeriesMatrix::from_scalar(&p, &pi1).scale_series(&HSeries::hbar_pow(&p, 1));
    if cur != target {
        return Err(Error::CheckFailed("normalizer did not reach ℏπ₁".into()));
    }
    // the ℏᴺ coefficient of M would need π_{N+1}
    let top = p.hbar_order.saturating_sub(1);
    let m = m.map(|c| c.truncate_hbar(top));
    let m_inv = m.inverse()?.map(|c| c.truncate_hbar(top));
    Ok(Normalizer { stages, m, m_inv })
}

impl Normalizer {
    fn images(&self, mat: &SeriesMatrix) -> Vec<WeylElement> {
        let p = mat.profile;
        (0..p.dim)
            .map(|i| {
                let mut s = WeylElement::zero(&p);
                for j in 0..p.dim {
                    let c = mat.get(i, j);
                    if !c.is_zero() {
                        s = &s + &WeylElement::y(&p, j).mul_hseries(c);
                    }
                }
                s
            })
            .collect()
    }

    pub fn apply_weyl(&self, a: &WeylElement) -> WeylElement {
        a.substitute_y(&self.images(&self.m))
    }

    pub fn apply_weyl_inv(&self, a: &WeylElement) -> WeylElement {
        a.substitute_y(&self.images(&self.m_inv))
    }

    /// The same substitution acting on base functions.
    pub fn base_equivalence(&self) -> Result<Equivalence> {
        Equivalence::linear_substitution(&self.m)
    }
}

/// `P(a) ⋄_F P(b) − P(a ⋄ b)`.
pub fn normalizer_residual(
    pi: &ConstPoissonMatrix,
    nz: &Normalizer,
    a: &WeylElement,
    b: &WeylElement,
) -> WeylElement {
    let p = *pi.profile();
    let full = fiber_moyal_op(pi.matrix());
    let pi1 =
        SeriesMatrix::from_scalar(&p, &pi.coeff_matrix(1)).scale_series(&HSeries::hbar_pow(&p, 1));
    let f = fiber_moyal_op(&pi1);
    &fiber_mul(&f, &nz.apply_weyl(a), &nz.apply_weyl(b)) - &nz.apply_weyl(&fiber_mul(&full, a, b))
}

/// The B-field flow `T^t` and the endpoint product.
#[derive(Clone, Debug)]
pub struct BFieldEquivalence {
    pub flow: TPoly<PolyDiffOp<HSeries>>,
    pub t1: Equivalence,
    pub target: ConstPoissonMatrix,
    pub product: StarProduct,
}

fn vector_field_op(v: &PolyVectorField) -> PolyDiffOp<HSeries> {
    let p = *v.profile();
    let mut r = PolyDiffOp::zero(&p, 1);
    for (i, c) in v.linear_comps().iter().enumerate() {
        r.add_term(vec![Exps::unit(i)], c);
    }
    r
}

/// Solves `d/dt T^t = T^t ∘ V^t` with `V^t = −𝔞(tB,π)♯(θ)`, θ the canonical primitive of B.
pub fn bfield_equivalence(pi: &ConstPoissonMatrix, b: &DiffForm) -> Result<BFieldEquivalence> {
    let p = *pi.profile();
    if b.comps().values().any(|c| !c.is_x_constant()) {
        return Err(Error::Validation(
            "B must have constant coefficients".into(),
        ));
    }
    gauge::check_closed(b)?;
    let theta = b.canonical_primitive();
    let pib = pi.to_bivector();
    let flow = gauge::gauge_flow(b, &pib)?;
    let vs: Vec<PolyDiffOp<HSeries>> = flow
        .coeffs()
        .iter()
        .map(|pt| vector_field_op(&pi_sharp(pt, &theta).scale(&CRational::from_int(-1))))
        .collect();
    let parts: Vec<Box<dyn Fn(&PolyDiffOp<HSeries>) -> PolyDiffOp<HSeries>>> = vs
        .iter()
        .map(|v| {
            let v = v.clone();
            Box::new(move |t: &PolyDiffOp<HSeries>| t.compose(0, &v))
                as Box<dyn Fn(&PolyDiffOp<HSeries>) -> PolyDiffOp<HSeries>>
        })
        .collect();
    let d = TOperator::from_parts(parts);
    let id = PolyDiffOp::identity(&p);
    let t = solve_linear(&TPoly::zero(&id), &d, &id)?;
    let t1 = Equivalence::from_op(t.eval(&CRational::one()))?;
    let target = ConstPoissonMatrix::from_bivector(&flow.eval(&CRational::one()))?;
    let product = StarProduct::moyal(&target);
    Ok(BFieldEquivalence {
        flow: t,
        t1,
        target,
        product,
    })
}

impl BFieldEquivalence {
    /// `T(f *₁ g) − T f * T g` on all monomial pairs of total degree ≤ Dx; the first nonzero value.
    pub fn intertwining_residual(&self, base: &StarProduct) -> Option<HSeries> {
        let p = *base.profile();
        let monos = Exps::up_to_degree(p.dim, p.x_degree);
        for a in &monos {
            for b in &monos {
                if a.degree() + b.degree() > p.x_degree {
                    continue;
                }
                let f = HSeries::monomial(&p, 0, *a, CRational::one());
                let g = HSeries::monomial(&p, 0, *b, CRational::one());
                let lhs = self.t1.apply(&self.product.mul(&f, &g));
                let rhs = base.mul(&self.t1.apply(&f), &self.t1.apply(&g));
                let r = &lhs - &rhs;
                if !r.is_zero() {
                    return Some(r);
                }
            }
        }
        None
    }
}

/// `q + n·2πi`, with 2πi kept symbolic.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicScalar {
    pub q: CRational,
    pub n: i64,
}

impl SymbolicScalar {
    pub fn rational(q: CRational) -> Self {
        SymbolicScalar { q, n: 0 }
    }

    pub fn add(&self, o: &SymbolicScalar) -> SymbolicScalar {
        SymbolicScalar {
            q: &self.q + &o.q,
            n: self.n + o.n,
        }
    }

    pub fn neg(&self) -> SymbolicScalar {
        SymbolicScalar {
            q: -&self.q,
            n: -self.n,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero() && self.n == 0
    }
}

impl fmt::Display for SymbolicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*2πi", self.q, self.n)
    }
}

/// `e^{t c} g(t)`, c symbolic.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionFunction {
    pub exponent: SymbolicScalar,
    pub g: TPoly<HSeries>,
}

impl TransitionFunction {
    fn star(&self, o: &TransitionFunction, s: &StarProduct) -> TransitionFunction {
        let one = HSeries::one(s.profile());
        TransitionFunction {
            exponent: self.exponent.add(&o.exponent),
            g: self.g.bilinear(&o.g, &one, |a, b| s.mul(a, b)),
        }
    }

    /// e^{t·2πi n} with `n` returned when the rational exponent and the ℏ-corrections vanish.
    pub fn as_pure_phase(&self) -> Option<i64> {
        let one = TPoly::constant(&HSeries::one(self.g.template().profile()));
        (self.exponent.q.is_zero() && self.g == one).then_some(self.exponent.n)
    }

    pub fn is_one(&self) -> bool {
        self.as_pure_phase() == Some(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionReport {
    pub g: [[TransitionFunction; 3]; 3],
    pub diagonal_ok: bool,
    pub inverse_ok: bool,
    /// `n` with `G₁₂ * G₂₃ * G₃₁ = e^{2πi n t}`.
    pub triple_phase: Option<i64>,
}

/// Constant cocycle on a 3-set cover: `c[0] = c₁₂, c[1] = c₂₃, c[2] = c₃₁`, each an x-constant
/// series at ℏ⁰ plus a declared multiple of 2πi.
pub fn transition_demo(star: &StarProduct, c: &[(HSeries, i64); 3]) -> Result<TransitionReport> {
    let p = *star.profile();
    let mut sc = vec![];
    for (s, n) in c {
        if !s.is_scalar() {
            return Err(Error::NonConstantCocycle);
        }
        sc.push(SymbolicScalar {
            q: s.constant_term(),
            n: *n,
        });
    }
    let mut cm: Vec<Vec<SymbolicScalar>> =
        vec![vec![SymbolicScalar::rational(CRational::zero()); 3]; 3];
    cm[0][1] = sc[0].clone();
    cm[1][2] = sc[1].clone();
    cm[2][0] = sc[2].clone();
    cm[1][0] = sc[0].neg();
    cm[2][1] = sc[1].neg();
    cm[0][2] = sc[2].neg();
    let build = |e: &SymbolicScalar| -> Result<TransitionFunction> {
        let se = star_exponential(&HSeries::constant(&p, e.q.clone()), |a, b| star.mul(a, b))?;
        Ok(TransitionFunction {
            exponent: e.clone(),
            g: se.g,
        })
    };
    let mut g: Vec<Vec<TransitionFunction>> = vec![];
    for row in &cm {
        g.push(row.iter().map(build).collect::<Result<Vec<_>>>()?);
    }
    let diagonal_ok = (0..3).all(|a| g[a][a].is_one());
    let inverse_ok = (0..3).all(|a| (0..3).all(|b| g[a][b].star(&g[b][a], star).is_one()));
    let triple = g[0][1].star(&g[1][2], star).star(&g[2][0], star);
    let arr = |r: &Vec<TransitionFunction>| [r[0].clone(), r[1].clone(), r[2].clone()];
    Ok(TransitionReport {
        g: [arr(&g[0]), arr(&g[1]), arr(&g[2])],
        diagonal_ok,
        inverse_ok,
        triple_phase: triple.as_pure_phase(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mono::GSet;

    fn hj(p: &Profile) -> ConstPoissonMatrix {
        ConstPoissonMatrix::standard(p, &HSeries::hbar_pow(p, 1)).unwrap()
    }

    #[test]
    fn moyal_commutator() {
        let p = Profile::desk();
        let s = StarProduct::moyal(&hj(&p));
        let x1 = HSeries::x(&p, 0);
        let x2 = HSeries::x(&p, 1);
        let c = &s.mul(&x1, &x2) - &s.mul(&x2, &x1);
        assert_eq!(c, HSeries::hbar_pow(&p, 1).scale_int(2));
        let zero = StarProduct::moyal(&ConstPoissonMatrix::new(SeriesMatrix::zero(&p, 2)).unwrap());
        assert_eq!(zero, StarProduct::pointwise(&p));
    }

    #[test]
    fn assoc_and_mc() {
        let p = Profile::desk();
        let s = StarProduct::moyal(&hj(&p));
        let f = &HSeries::x(&p, 0) * &HSeries::x(&p, 0);
        let g = HSeries::x(&p, 1);
        let h = &HSeries::x(&p, 0) * &HSeries::x(&p, 1);
        assert!(s.assoc_residual(&f, &g, &h).is_zero());
        assert!(s.mc_residual().is_zero());
        // symmetric Π: not associative; the MC residual evaluates to minus the associator
        let mut op = PolyDiffOp::zero(&p, 2);
        op.add_term(
            vec![Exps::unit(0), Exps::unit(0)],
            &HSeries::hbar_pow(&p, 1),
        );
        let bad = StarProduct::from_bidiff(op).unwrap();
        let x1 = HSeries::x(&p, 0);
        let sq = &x1 * &x1;
        let r = bad.assoc_residual(&sq, &x1, &x1);
        assert!(!r.is_zero());
        let mc = bad
            .mc_residual()
            .apply(&[sq.clone(), x1.clone(), x1.clone()])
            .unwrap();
        assert_eq!(mc, -&r);
    }

    #[test]
    fn errors() {
        let p = Profile::desk();
        let mut m = SeriesMatrix::zero(&p, 2);
        m.set(0, 1, HSeries::hbar_pow(&p, 1));
        assert_eq!(ConstPoissonMatrix::new(m), Err(Error::NotAntisymmetric));
        let deg = ConstPoissonMatrix::standard(&p, &HSeries::hbar_pow(&p, 2)).unwrap();
        assert_eq!(moyal_normalizer(&deg), Err(Error::DegeneratePi1));
    }

    #[test]
    fn normalizer_euler_scaling() {
        let p = Profile::desk();
        let h = HSeries::hbar_pow(&p, 1);
        let pi = ConstPoissonMatrix::standard(&p, &(&h + &HSeries::hbar_pow(&p, 2))).unwrap();
        let nz = moyal_normalizer(&pi).unwrap();
        assert_eq!(nz.stages[0].0, 2);
        assert_eq!(
            nz.stages[0].1,
            ScalarMatrix::identity(2).scale(&CRational::from_frac(1, 2))
        );
        // M = √(1+ℏ)·1 by the binomial series
        let mut sqrt = HSeries::zero(&p);
        let mut c = CRational::one();
        for k in 0..p.hbar_order {
            sqrt.add_term(k, Exps::ZERO, &c);
            c = &(&c * &(&CRational::from_frac(1, 2) - &CRational::from_int(k as i64)))
                * &CRational::from_frac(1, k as i64 + 1);
        }
        assert_eq!(nz.m, SeriesMatrix::identity(&p, 2).scale_series(&sqrt));
        let y = |i| WeylElement::y(&p, i);
        assert!(normalizer_residual(&pi, &nz, &y(0), &y(1)).is_zero());
        let id = moyal_normalizer(&hj(&p)).unwrap();
        assert_eq!(id.m, SeriesMatrix::identity(&p, 2));
    }

    #[test]
    fn conjugation_recovers_target() {
        let p = Profile::desk();
        let h = HSeries::hbar_pow(&p, 1);
        let pi = ConstPoissonMatrix::standard(&p, &(&h + &HSeries::hbar_pow(&p, 2))).unwrap();
        let nz = moyal_normalizer(&pi).unwrap();
        // P intertwines Moyal(π) into Moyal(ℏπ₁): conjugating the latter by P gives the former
        let t = nz.base_equivalence().unwrap();
        let c = conjugate(&t, &StarProduct::moyal(&hj(&p))).unwrap();
        assert_eq!(c, StarProduct::moyal(&pi));
        assert_eq!(conjugate(&Equivalence::identity(&p), &c).unwrap(), c);
        let back = conjugate(&t.inverse(), &c).unwrap();
        assert_eq!(back, StarProduct::moyal(&hj(&p)));
    }

    #[test]
    fn bfield_constant() {
        let p = Profile::desk();
        let pi = hj(&p);
        let base = StarProduct::moyal(&pi);
        let b = DiffForm::component(GSet::from_indices(&[0, 1]), HSeries::from_int(&p, 2));
        let eq = bfield_equivalence(&pi, &b).unwrap();
        assert_eq!(eq.intertwining_residual(&base), None);
        let zero = bfield_equivalence(&pi, &DiffForm::zero(&p)).unwrap();
        assert_eq!(zero.t1, Equivalence::identity(&p));
        assert_eq!(zero.product, base);
    }

    #[test]
    fn transition_cases() {
        let p = Profile::desk();
        let s = StarProduct::moyal(&hj(&p));
        let c = |v: i64, n: i64| (HSeries::from_int(&p, v), n);
        let r = transition_demo(&s, &[c(1, 0), c(1, 0), c(-2, 0)]).unwrap();
        assert!(r.diagonal_ok && r.inverse_ok);
        assert_eq!(r.triple_phase, Some(0));
        let r = transition_demo(&s, &[c(1, 1), c(0, 0), c(-1, 0)]).unwrap();
        assert_eq!(r.triple_phase, Some(1));
        assert_eq!(
            transition_demo(&s, &[(HSeries::x(&p, 0), 0), c(0, 0), c(0, 0)]),
            Err(Error::NonConstantCocycle)
        );
    }
}
