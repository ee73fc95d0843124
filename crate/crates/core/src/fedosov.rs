//! Weyl-bundle engine on a chart: δ-calculus, fiber products, compatible connections and
//! their curvature, the quantum and classical recursions for r, flat lifts, the modified and
//! original star products and the class residual.
//!
//! Conventions: `a ⋄ b = a exp(πⁱʲ ∂⃖_{yⁱ} ∂⃗_{yʲ}) b`, `{a,b} = 2πⁱʲ ∂_{yⁱ}a ∂_{yʲ}b` (the first
//! order of the graded ⋄-commutator) and `ω = (2π)⁻¹`, so that `δ = (1/ℏ)[dxⁱ Ωᵢⱼ yʲ, ·]` with
//! `Ω = ℏω`. Only Ω, a genuine series, is stored; identities carrying `ω` are multiplied by ℏ.
//!
//! A bracket divided by ℏ lowers the Weyl weight by two, so it is evaluated with two extra
//! units of weight before dividing. States are solved one unit above the requested bound,
//! which is what a lift at the requested bound needs.

use serde::Serialize;

use crate::coeff::CRational;
use crate::error::{Error, Result};
use crate::hochschild::{interpolate, PolyDiffOp};
use crate::hseries::HSeries;
use crate::matrix::SeriesMatrix;
use crate::mono::{multi_binom, Exps};
use crate::profile::Profile;
use crate::star::{fiber_moyal_op, fiber_mul, moyal_normalizer, ConstPoissonMatrix, Normalizer};
use crate::text::format_weyl;
use crate::weyl::WeylElement;

/// `(δa, δ⁻¹a, σa)`.
pub fn delta_calculus(a: &WeylElement) -> (WeylElement, WeylElement, HSeries) {
    (a.delta(), a.delta_inv(), a.sigma())
}

/// `a − σa − δδ⁻¹a − δ⁻¹δa`.
pub fn hodge_residual(a: &WeylElement) -> WeylElement {
    let s = WeylElement::from_hseries(a.profile(), &a.sigma());
    &(&(a - &s) - &a.delta_inv().delta()) - &a.delta().delta_inv()
}

/// `Σ dxⁱ ∂_{xⁱ}`.
pub fn de_rham(a: &WeylElement) -> WeylElement {
    let mut r = WeylElement::zero(a.profile());
    for i in 0..a.profile().dim {
        r = &r + &a.deriv_x(i).dx_wedge(i);
    }
    r
}

/// `Σ vᵏ ∂_{yᵏ} a` for a fiber vector field with form coefficients.
pub fn act(v: &[WeylElement], a: &WeylElement) -> WeylElement {
    let mut r = WeylElement::zero(a.profile());
    for (k, vk) in v.iter().enumerate() {
        if vk.is_zero() {
            continue;
        }
        let d = a.deriv_y(k);
        if !d.is_zero() {
            r = &r + &(vk * &d);
        }
    }
    r
}

fn reprofile(m: &SeriesMatrix, p: &Profile) -> SeriesMatrix {
    SeriesMatrix {
        profile: *p,
        n: m.n,
        e: m.e.iter().map(|c| c.reduce(p)).collect(),
    }
}

fn widened(p: &Profile, extra: u32) -> Profile {
    p.with_y(p.y_degree + extra)
}

/// Keeps the part of a base series visible to Weyl elements: `2k + |x| ≤ Dy`.
pub fn weyl_visible(f: &HSeries, p: &Profile) -> HSeries {
    let mut r = HSeries::zero(p);
    for (k, e, c) in f.terms() {
        if 2 * k + e.degree() <= p.y_degree {
            r.add_term(k, *e, c);
        }
    }
    r
}

fn dx_parts(a: &WeylElement) -> Vec<(u32, WeylElement)> {
    (0..=a.profile().dim as u32)
        .map(|q| (q, a.dx_part(q)))
        .filter(|(_, x)| !x.is_zero())
        .collect()
}

/// `⋄` for a fiberwise Poisson matrix (entries may depend on x and ℏ).
#[derive(Clone, Debug, PartialEq)]
pub struct FiberProduct {
    pi: SeriesMatrix,
    op: PolyDiffOp<WeylElement>,
    wide: PolyDiffOp<WeylElement>,
}

impl FiberProduct {
    pub fn new(pi: &SeriesMatrix) -> Result<Self> {
        if !pi.is_antisymmetric() {
            return Err(Error::NotAntisymmetric);
        }
        let w = widened(&pi.profile, 2);
        Ok(FiberProduct {
            pi: pi.clone(),
            op: fiber_moyal_op(pi),
            wide: fiber_moyal_op(&reprofile(pi, &w)),
        })
    }

    pub fn profile(&self) -> &Profile {
        &self.pi.profile
    }

    pub fn pi(&self) -> &SeriesMatrix {
        &self.pi
    }

    pub fn mul(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        fiber_mul(&self.op, a, b)
    }

    fn comm_with(op: &PolyDiffOp<WeylElement>, a: &WeylElement, b: &WeylElement) -> WeylElement {
        let mut r = WeylElement::zero(op.profile());
        for (q, aq) in dx_parts(a) {
            for (s, bs) in dx_parts(b) {
                let ab = fiber_mul(op, &aq, &bs);
                let ba = fiber_mul(op, &bs, &aq);
                r = &r + &(if q * s % 2 == 1 { &ab + &ba } else { &ab - &ba });
            }
        }
        r
    }

    /// Graded commutator `a⋄b − (−1)^{|a||b|} b⋄a`.
    pub fn commutator(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        Self::comm_with(&self.op, a, b)
    }

    /// `(1/ℏ)[a,b]`.
    pub fn hbar_commutator(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        let w = *self.wide.profile();
        let c = Self::comm_with(&self.wide, &a.reduce(&w), &b.reduce(&w));
        Ok(c.div_hbar(1)?.reduce(self.profile()))
    }

    fn poisson_at(&self, p: &Profile, a: &WeylElement, b: &WeylElement) -> WeylElement {
        let mut r = WeylElement::zero(p);
        for i in 0..p.dim {
            let da = a.deriv_y(i);
            if da.is_zero() {
                continue;
            }
            for j in 0..p.dim {
                let c = self.pi.get(i, j);
                if c.is_zero() {
                    continue;
                }
                let db = b.deriv_y(j);
                if db.is_zero() {
                    continue;
                }
                let cw = WeylElement::from_hseries(p, &c.reduce(p)).scale_int(2);
                r = &r + &(&(&cw * &da) * &db);
            }
        }
        r
    }

    /// `{a,b} = 2πⁱʲ ∂ᵢa ∂ⱼb`.
    pub fn poisson(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        self.poisson_at(self.profile(), a, b)
    }

    /// `(1/ℏ){a,b}`.
    pub fn hbar_poisson(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        let w = *self.wide.profile();
        let c = self.poisson_at(&w, &a.reduce(&w), &b.reduce(&w));
        Ok(c.div_hbar(1)?.reduce(self.profile()))
    }
}

/// `(a ⋄_m b, {a,b}, a ⋄_F b)` with ⋄_F built from ℏπ₁ alone.
pub fn fiber_products(
    a: &WeylElement,
    b: &WeylElement,
    pi: &SeriesMatrix,
) -> Result<(WeylElement, WeylElement, WeylElement)> {
    let m = FiberProduct::new(pi)?;
    let f = FiberProduct::new(&leading_part(pi))?;
    Ok((m.mul(a, b), m.poisson(a, b), f.mul(a, b)))
}

fn leading_part(pi: &SeriesMatrix) -> SeriesMatrix {
    pi.map(|c| {
        let mut r = HSeries::zero(c.profile());
        for (k, e, v) in c.terms() {
            if k == 1 {
                r.add_term(1, *e, v);
            }
        }
        r
    })
}

/// Torsion-free connection `∇ = dxⁱ∂_{xⁱ} − dxⁱ Γᵏᵢⱼ yʲ ∂_{yᵏ}` with ℏ-dependent symbols, and an
/// optional tail `A = dxᵏ Aʲ_{k i₁…i_p} y^{i₁}…y^{i_p} ∂_{yʲ}` (p ≥ 2) for the geometric differential.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionData {
    profile: Profile,
    gamma: Vec<HSeries>,
    a_tail: Option<Vec<WeylElement>>,
}

impl ConnectionData {
    /// `gamma[(k·d + i)·d + j] = Γᵏᵢⱼ`.
    pub fn new(p: &Profile, gamma: Vec<HSeries>) -> Result<Self> {
        let d = p.dim;
        if gamma.len() != d * d * d {
            return Err(Error::Validation(format!(
                "expected {} Christoffel symbols, got {}",
                d * d * d,
                gamma.len()
            )));
        }
        for k in 0..d {
            for i in 0..d {
                for j in i + 1..d {
                    if gamma[(k * d + i) * d + j] != gamma[(k * d + j) * d + i] {
                        return Err(Error::Validation(format!(
                            "connection has torsion: Γ^{}_{}{} ≠ Γ^{}_{}{}",
                            k + 1,
                            i + 1,
                            j + 1,
                            k + 1,
                            j + 1,
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(ConnectionData {
            profile: *p,
            gamma,
            a_tail: None,
        })
    }

    pub fn flat(p: &Profile) -> Self {
        ConnectionData {
            profile: *p,
            gamma: vec![HSeries::zero(p); p.dim.pow(3)],
            a_tail: None,
        }
    }

    /// `Γᵏᵢⱼ = (π/ℏ)ᵏᵐ S_{mij}` for a totally symmetric `s[(m·d + i)·d + j]`; compatible with π
    /// whenever π is x-constant.
    pub fn from_symmetric(pi: &SeriesMatrix, s: &[HSeries]) -> Result<Self> {
        let p = pi.profile;
        let d = p.dim;
        if s.len() != d * d * d {
            return Err(Error::Validation(format!(
                "expected {} tensor components, got {}",
                d * d * d,
                s.len()
            )));
        }
        for m in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let v = &s[(m * d + i) * d + j];
                    if v != &s[(i * d + m) * d + j] || v != &s[(m * d + j) * d + i] {
                        return Err(Error::Validation("tensor is not totally symmetric".into()));
                    }
                }
            }
        }
        let mut q = Vec::with_capacity(d * d);
        for c in &pi.e {
            q.push(c.div_hbar(1).map_err(|_| Error::NotFormal)?);
        }
        let mut gamma = vec![HSeries::zero(&p); d * d * d];
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = HSeries::zero(&p);
                    for m in 0..d {
                        acc = &acc + &(&q[k * d + m] * &s[(m * d + i) * d + j]);
                    }
                    gamma[(k * d + i) * d + j] = acc;
                }
            }
        }
        Self::new(&p, gamma)
    }

    pub fn with_tail(mut self, a: Vec<WeylElement>) -> Result<Self> {
        if a.len() != self.profile.dim {
            return Err(Error::Validation(
                "tail needs one component per fiber coordinate".into(),
            ));
        }
        for c in &a {
            if c.terms()
                .keys()
                .any(|m| m.y.degree() < 2 || m.dx.len() != 1)
            {
                return Err(Error::Validation(
                    "tail must have y-degree ≥ 2 and dx-degree 1".into(),
                ));
            }
        }
        self.a_tail = Some(a);
        Ok(self)
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &HSeries {
        let d = self.profile.dim;
        &self.gamma[(k * d + i) * d + j]
    }

    pub fn a_tail(&self) -> Option<&[WeylElement]> {
        self.a_tail.as_deref()
    }

    /// `θᵏ = −dxⁱ Γᵏᵢⱼ yʲ` on the given Weyl profile.
    pub fn theta(&self, p: &Profile) -> Vec<WeylElement> {
        let d = p.dim;
        (0..d)
            .map(|k| {
                let mut t = WeylElement::zero(p);
                for i in 0..d {
                    for j in 0..d {
                        let g = self.gamma(k, i, j);
                        if !g.is_zero() {
                            t = &t - &WeylElement::from_hseries(p, g).mul_y(j).dx_wedge(i);
                        }
                    }
                }
                t
            })
            .collect()
    }

    pub fn nabla(&self, p: &Profile) -> Nabla {
        Nabla {
            theta: self.theta(p),
        }
    }
}

/// ∇ on a fixed Weyl profile.
#[derive(Clone, Debug, PartialEq)]
pub struct Nabla {
    theta: Vec<WeylElement>,
}

impl Nabla {
    pub fn apply(&self, a: &WeylElement) -> WeylElement {
        &de_rham(a) + &act(&self.theta, a)
    }

    pub fn theta(&self) -> &[WeylElement] {
        &self.theta
    }
}

/// `ℏω = (2π/ℏ)⁻¹`, truncated to ℏ^{N−1}.
pub fn omega_shifted(pi: &SeriesMatrix) -> Result<SeriesMatrix> {
    if !pi.is_antisymmetric() {
        return Err(Error::NotAntisymmetric);
    }
    let mut q = pi.clone();
    for c in q.e.iter_mut() {
        *c = c.div_hbar(1).map_err(|_| Error::NotFormal)?.scale_int(2);
    }
    if q.constant_part().inverse().is_none() {
        return Err(Error::DegenerateOmega);
    }
    let n = pi.profile.hbar_order.saturating_sub(1);
    Ok(q.inverse()?.map(|c| c.truncate_hbar(n)))
}

/// `Σ dxⁱ Ωᵢⱼ yʲ`.
pub fn omega_one_form(omega: &SeriesMatrix, p: &Profile) -> WeylElement {
    let mut r = WeylElement::zero(p);
    for i in 0..p.dim {
        for j in 0..p.dim {
            let c = omega.get(i, j);
            if !c.is_zero() {
                r = &r + &WeylElement::from_hseries(p, c).mul_y(j).dx_wedge(i);
            }
        }
    }
    r
}

/// `Σ_{i<j} Ωᵢⱼ dxⁱdxʲ`.
pub fn omega_two_form(omega: &SeriesMatrix, p: &Profile) -> WeylElement {
    let mut r = WeylElement::zero(p);
    for i in 0..p.dim {
        for j in i + 1..p.dim {
            let c = omega.get(i, j);
            if !c.is_zero() {
                r = &r + &WeylElement::from_hseries(p, c).dx_wedge(j).dx_wedge(i);
            }
        }
    }
    r
}

/// `∇{yⁱ,yʲ} − {∇yⁱ,yʲ} − {yⁱ,∇yʲ}`; the first nonzero one, if any.
pub fn compatibility_residual(
    nabla: &Nabla,
    fiber: &FiberProduct,
) -> Option<(usize, usize, WeylElement)> {
    let p = *fiber.profile();
    for i in 0..p.dim {
        for j in 0..p.dim {
            let yi = WeylElement::y(&p, i);
            let yj = WeylElement::y(&p, j);
            let lhs = nabla.apply(&fiber.poisson(&yi, &yj));
            let rhs =
                &fiber.poisson(&nabla.apply(&yi), &yj) + &fiber.poisson(&yi, &nabla.apply(&yj));
            let r = &lhs - &rhs;
            if !r.is_zero() {
                return Some((i, j, r));
            }
        }
    }
    None
}

/// The Weyl curvature `R` with `∇² = (1/ℏ)[R,·]`, i.e. `R = −½ Ω_{km} yᵏ ∇²(yᵐ)`.
pub fn curvature(nabla: &Nabla, fiber: &FiberProduct, omega: &SeriesMatrix) -> Result<WeylElement> {
    if let Some((i, j, r)) = compatibility_residual(nabla, fiber) {
        return Err(Error::IncompatibleConnection(format!(
            "∇ does not preserve {{y{},y{}}}: residual {}",
            i + 1,
            j + 1,
            format_weyl(&r)
        )));
    }
    let p = *fiber.profile();
    let half = CRational::from_frac(-1, 2);
    let mut r = WeylElement::zero(&p);
    for m in 0..p.dim {
        let ym = WeylElement::y(&p, m);
        let n = nabla.apply(&nabla.apply(&ym));
        if n.is_zero() {
            continue;
        }
        for k in 0..p.dim {
            let c = omega.get(k, m);
            if !c.is_zero() {
                r = &r + &(&WeylElement::from_hseries(&p, c).mul_y(k) * &n).scale(&half);
            }
        }
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Quantum,
    Classical,
}

fn iteration_guard(p: &Profile) -> usize {
    (p.y_degree + 2 * p.hbar_order + 2) as usize
}

/// Iterates `x ↦ step(x)` from `start` to a fixed point.
fn fixed_point<F: Fn(&WeylElement) -> Result<WeylElement>>(
    start: WeylElement,
    guard: usize,
    step: F,
) -> Result<(WeylElement, usize)> {
    let mut cur = start;
    for it in 1..=guard {
        let next = step(&cur)?;
        if next == cur {
            return Ok((cur, it));
        }
        cur = next;
    }
    Err(Error::NoConvergence(guard))
}

/// Converged r (or r^cl) with everything needed to use it.
#[derive(Clone, Debug)]
pub struct FedosovState {
    pub mode: Mode,
    profile: Profile,
    fiber: FiberProduct,
    nabla: Nabla,
    omega: SeriesMatrix,
    curvature: WeylElement,
    r: WeylElement,
    b: WeylElement,
    pub iterations: usize,
}

/// Solves `r = δ⁻¹R + δ⁻¹(∇r + (1/2ℏ)[r,r])` (quantum) or its Poisson-bracket analogue.
pub fn fedosov_recursion(
    conn: &ConnectionData,
    pi: &SeriesMatrix,
    mode: Mode,
) -> Result<FedosovState> {
    let p = pi.profile;
    if (p.y_degree + 3) / 2 > p.hbar_order {
        return Err(Error::Validation(format!(
            "Weyl weight bound {} needs π to order ℏ^{}, profile stops at ℏ^{}",
            p.y_degree,
            (p.y_degree + 3) / 2,
            p.hbar_order
        )));
    }
    let sp = widened(&p, 1);
    let omega = reprofile(&omega_shifted(pi)?, &sp);
    let fiber = FiberProduct::new(&reprofile(pi, &sp))?;
    let nabla = conn.nabla(&sp);
    let curv = curvature(&nabla, &fiber, &omega)?;
    let base = curv.delta_inv();
    let half = CRational::from_frac(1, 2);
    let (r, iterations) = fixed_point(WeylElement::zero(&sp), iteration_guard(&sp), |r| {
        let br = match mode {
            Mode::Quantum => fiber.hbar_commutator(r, r)?,
            Mode::Classical => fiber.hbar_poisson(r, r)?,
        };
        Ok(&base + &(&nabla.apply(r) + &br.scale(&half)).delta_inv())
    })?;
    let b = &r - &omega_one_form(&omega, &sp);
    Ok(FedosovState {
        mode,
        profile: p,
        fiber,
        nabla,
        omega,
        curvature: curv,
        r,
        b,
        iterations,
    })
}

impl FedosovState {
    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// Profile the state is solved on (one extra unit of weight).
    pub fn solve_profile(&self) -> &Profile {
        self.fiber.profile()
    }

    pub fn fiber(&self) -> &FiberProduct {
        &self.fiber
    }

    pub fn nabla(&self) -> &Nabla {
        &self.nabla
    }

    pub fn omega_shifted(&self) -> SeriesMatrix {
        reprofile(&self.omega, &self.profile)
    }

    pub fn curvature(&self) -> WeylElement {
        self.curvature.reduce(&self.profile)
    }

    pub fn r(&self) -> WeylElement {
        self.r.reduce(&self.profile)
    }

    pub fn b(&self) -> WeylElement {
        self.b.reduce(&self.profile)
    }

    fn hbar_bracket(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
        match self.mode {
            Mode::Quantum => self.fiber.hbar_commutator(a, b),
            Mode::Classical => self.fiber.hbar_poisson(a, b),
        }
    }

    /// `R + ∇r − δr + (1/2ℏ)[r,r]`.
    pub fn certificate(&self) -> Result<WeylElement> {
        let half = CRational::from_frac(1, 2);
        let t = &(&self.curvature + &self.nabla.apply(&self.r)) - &self.r.delta();
        Ok((&t + &self.hbar_bracket(&self.r, &self.r)?.scale(&half)).reduce(&self.profile))
    }

    /// ℏ times `(1/ℏ)R + (1/ℏ)∇b + (1/2ℏ²)[b,b] + ω`.
    pub fn class_residual(&self) -> Result<WeylElement> {
        let sp = *self.solve_profile();
        let half = CRational::from_frac(1, 2);
        let t = &self.curvature + &self.nabla.apply(&self.b);
        let t = &t + &self.hbar_bracket(&self.b, &self.b)?.scale(&half);
        Ok((&t + &omega_two_form(&self.omega, &sp)).reduce(&self.profile))
    }

    /// `D = ∇ − δ + (1/ℏ)[r,·]` (Emmrich–Weinstein in classical mode), on the solve profile.
    pub fn differential(&self, a: &WeylElement) -> Result<WeylElement> {
        let a = a.reduce(self.solve_profile());
        Ok(&(&self.nabla.apply(&a) - &a.delta()) + &self.hbar_bracket(&self.r, &a)?)
    }

    /// `D(D a)` on the requested profile.
    pub fn flatness_residual(&self, a: &WeylElement) -> Result<WeylElement> {
        Ok(self
            .differential(&self.differential(a)?)?
            .reduce(&self.profile))
    }

    fn lift_solve(&self, f: &HSeries) -> Result<WeylElement> {
        let sp = *self.solve_profile();
        let f0 = WeylElement::from_hseries(&sp, f);
        let (t, _) = fixed_point(f0.clone(), iteration_guard(&sp), |t| {
            Ok(&f0 + &(&self.nabla.apply(t) + &self.hbar_bracket(&self.r, t)?).delta_inv())
        })?;
        Ok(t)
    }

    /// The flat section `τ(f) = f + δ⁻¹(∇τ + (1/ℏ)[r,τ])`.
    pub fn lift(&self, f: &HSeries) -> Result<WeylElement> {
        Ok(self.lift_solve(f)?.reduce(&self.profile))
    }

    /// `σ(τf ⋄ τg)`, the part visible at the requested weight bound.
    pub fn star(&self, f: &HSeries, g: &HSeries) -> Result<HSeries> {
        Ok(self.star_table(&[f.clone(), g.clone()])?[0][1].clone())
    }

    /// All products `fᵢ * fⱼ`, lifting each argument once.
    pub fn star_table(&self, fs: &[HSeries]) -> Result<Vec<Vec<HSeries>>> {
        if self.mode != Mode::Quantum {
            return Err(Error::Validation(
                "star product needs a quantum-mode state".into(),
            ));
        }
        let lifts = fs
            .iter()
            .map(|f| self.lift_solve(f))
            .collect::<Result<Vec<_>>>()?;
        Ok(product_table(&self.fiber, &lifts, &self.profile))
    }

    /// `(r − other.r)`, both solved on the same data.
    pub fn difference(&self, other: &FedosovState) -> WeylElement {
        &self.r() - &other.r()
    }

    /// The original construction: normalizer P, ⋄_F, ∇₀ = P∇P⁻¹ and D^F = ∇₀ + (1/ℏ)[P(b),·]_F.
    pub fn original(&self) -> Result<OriginalFedosov> {
        if self.mode != Mode::Quantum {
            return Err(Error::Validation(
                "original construction needs a quantum-mode state".into(),
            ));
        }
        let sp = *self.solve_profile();
        let cp = ConstPoissonMatrix::new(self.fiber.pi().clone())?;
        let normalizer = moyal_normalizer(&cp)?;
        let fiber = FiberProduct::new(&leading_part(self.fiber.pi()))?;
        let pb = normalizer.apply_weyl(&self.b);
        let pr = normalizer.apply_weyl(&self.curvature);
        Ok(OriginalFedosov {
            profile: self.profile,
            normalizer,
            fiber,
            nabla: self.nabla.clone(),
            omega: self.omega.clone(),
            pb,
            pr,
            sp,
        })
    }
}

fn product_table(fiber: &FiberProduct, lifts: &[WeylElement], p: &Profile) -> Vec<Vec<HSeries>> {
    lifts
        .iter()
        .map(|a| {
            lifts
                .iter()
                .map(|b| weyl_visible(&fiber.mul(a, b).sigma().reduce(p), p))
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct OriginalFedosov {
    profile: Profile,
    pub normalizer: Normalizer,
    fiber: FiberProduct,
    nabla: Nabla,
    omega: SeriesMatrix,
    pb: WeylElement,
    pr: WeylElement,
    sp: Profile,
}

impl OriginalFedosov {
    pub fn fiber(&self) -> &FiberProduct {
        &self.fiber
    }

    /// P(b) on the requested profile.
    pub fn pb(&self) -> WeylElement {
        self.pb.reduce(&self.profile)
    }

    pub fn nabla0(&self, a: &WeylElement) -> WeylElement {
        self.normalizer
            .apply_weyl(&self.nabla.apply(&self.normalizer.apply_weyl_inv(a)))
    }

    pub fn differential(&self, a: &WeylElement) -> Result<WeylElement> {
        let a = a.reduce(&self.sp);
        Ok(&self.nabla0(&a) + &self.fiber.hbar_commutator(&self.pb, &a)?)
    }

    fn lift_solve(&self, f: &HSeries) -> Result<WeylElement> {
        let f0 = WeylElement::from_hseries(&self.sp, f);
        let (t, _) = fixed_point(f0.clone(), iteration_guard(&self.sp), |t| {
            Ok(&f0 + &(&self.differential(t)? + &t.delta()).delta_inv())
        })?;
        Ok(t)
    }

    /// `τ^F(f) = f + δ⁻¹((D^F + δ) τ^F)`.
    pub fn lift(&self, f: &HSeries) -> Result<WeylElement> {
        Ok(self.lift_solve(f)?.reduce(&self.profile))
    }

    /// `σ(τ^F f ⋄_F τ^F g)`.
    pub fn star(&self, f: &HSeries, g: &HSeries) -> Result<HSeries> {
        Ok(self.star_table(&[f.clone(), g.clone()])?[0][1].clone())
    }

    pub fn star_table(&self, fs: &[HSeries]) -> Result<Vec<Vec<HSeries>>> {
        let lifts = fs
            .iter()
            .map(|f| self.lift_solve(f))
            .collect::<Result<Vec<_>>>()?;
        Ok(product_table(&self.fiber, &lifts, &self.profile))
    }

    /// ℏ times `(1/ℏ)P(R) + (1/ℏ)∇₀P(b) + (1/2ℏ²)[P(b),P(b)]_F + ω`.
    pub fn class_residual(&self) -> Result<WeylElement> {
        let half = CRational::from_frac(1, 2);
        let t = &self.pr + &self.nabla0(&self.pb);
        let t = &t + &self.fiber.hbar_commutator(&self.pb, &self.pb)?.scale(&half);
        Ok((&t + &omega_two_form(&self.omega, &self.sp)).reduce(&self.profile))
    }

    /// `P(τ^m f) − τ^F f`.
    pub fn bridge_residual(&self, state: &FedosovState, f: &HSeries) -> Result<WeylElement> {
        let pm = self.normalizer.apply_weyl(&state.lift_solve(f)?);
        Ok((&pm - &self.lift_solve(f)?).reduce(&self.profile))
    }
}

/// `D = d + U − δ` with `U = θ + A` flat, on a fixed profile.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricDifferential {
    profile: Profile,
    theta: Vec<WeylElement>,
    a: Vec<WeylElement>,
    u: Vec<WeylElement>,
}

/// Builds the geometric differential; without a supplied tail, A solves
/// `A = δ⁻¹(dU + U(U))`, which makes `D² = 0`.
pub fn geometric_differential(conn: &ConnectionData, p: &Profile) -> Result<GeometricDifferential> {
    let theta = conn.theta(p);
    let d = p.dim;
    let a = match conn.a_tail() {
        Some(a) => a.iter().map(|c| c.reduce(p)).collect(),
        None => {
            let mut a = vec![WeylElement::zero(p); d];
            let guard = iteration_guard(p);
            let mut done = false;
            for _ in 0..guard {
                let u: Vec<WeylElement> = theta.iter().zip(&a).map(|(t, x)| t + x).collect();
                let next: Vec<WeylElement> = u
                    .iter()
                    .map(|uk| (&de_rham(uk) + &act(&u, uk)).delta_inv())
                    .collect();
                if next == a {
                    done = true;
                    break;
                }
                a = next;
            }
            if !done {
                return Err(Error::NoConvergence(guard));
            }
            a
        }
    };
    let u = theta.iter().zip(&a).map(|(t, x)| t + x).collect();
    Ok(GeometricDifferential {
        profile: *p,
        theta,
        a,
        u,
    })
}

impl GeometricDifferential {
    pub fn tail(&self) -> &[WeylElement] {
        &self.a
    }

    pub fn theta(&self) -> &[WeylElement] {
        &self.theta
    }

    pub fn apply(&self, x: &WeylElement) -> WeylElement {
        &(&de_rham(x) + &act(&self.u, x)) - &x.delta()
    }

    /// `D²(yᵏ)` for each k; all zero iff D is flat.
    pub fn flatness_residual(&self) -> Vec<WeylElement> {
        (0..self.profile.dim)
            .map(|k| self.apply(&self.apply(&WeylElement::y(&self.profile, k))))
            .collect()
    }

    /// `τ(f) = f + δ⁻¹(∇τ + A·τ)`.
    pub fn lift(&self, f: &HSeries) -> Result<WeylElement> {
        let f0 = WeylElement::from_hseries(&self.profile, f);
        let (t, _) = fixed_point(f0.clone(), iteration_guard(&self.profile), |t| {
            Ok(&f0 + &(&de_rham(t) + &act(&self.u, t)).delta_inv())
        })?;
        Ok(t)
    }

    /// Lie derivative of a cochain along `d + U`.
    fn cochain_lie(&self, q: &PolyDiffOp<WeylElement>) -> PolyDiffOp<WeylElement> {
        let p = self.profile;
        let dim = p.dim;
        let mut r = PolyDiffOp::zero(&p, q.arity());
        for (idx, c) in q.terms() {
            r.add_term(idx.clone(), &(&de_rham(c) + &act(&self.u, c)));
            for (s, alpha) in idx.iter().enumerate() {
                for gamma in alpha.sub_indices(dim) {
                    if gamma.is_zero() {
                        continue;
                    }
                    let rest = alpha.checked_sub(&gamma).expect("sub index");
                    let w = multi_binom(alpha, &gamma) as i64;
                    for k in 0..dim {
                        let du = self.u[k].deriv_y_multi(&gamma);
                        if du.is_zero() {
                            continue;
                        }
                        let mut nidx = idx.clone();
                        nidx[s] = rest.inc(k);
                        r.add_term(nidx, &(c * &du).scale_int(-w));
                    }
                }
            }
        }
        r
    }

    /// `L_D q`.
    pub fn cochain_differential(&self, q: &PolyDiffOp<WeylElement>) -> PolyDiffOp<WeylElement> {
        self.cochain_lie(q).sub(&q.map_coeffs(|c| c.delta()))
    }

    /// `ϱ(P) = P + δ⁻¹(∇ϱ + [A,ϱ])` for P with y-independent 0-form coefficients.
    pub fn cochain_lift(&self, q: &PolyDiffOp<WeylElement>) -> Result<PolyDiffOp<WeylElement>> {
        if q.terms()
            .values()
            .any(|c| c.terms().keys().any(|m| !m.y.is_zero() || !m.dx.is_empty()))
        {
            return Err(Error::NotDeltaFlat);
        }
        let q = q.map_coeffs(|c| c.reduce(&self.profile));
        let guard = iteration_guard(&self.profile);
        let mut cur = q.clone();
        for _ in 0..guard {
            let next = q.add(&self.cochain_lie(&cur).map_coeffs(|c| c.delta_inv()));
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
        Err(Error::NoConvergence(guard))
    }

    /// `ν(P)(f₀,…) = P(τf₀,…)|_{y=0}`.
    pub fn nu(&self, q: &PolyDiffOp<WeylElement>, args: &[HSeries]) -> Result<HSeries> {
        let lifts = args
            .iter()
            .map(|f| self.lift(f))
            .collect::<Result<Vec<_>>>()?;
        Ok(q.apply(&lifts)?.sigma())
    }

    /// `f ↦ σ(∂^α_y τ f)` as a differential operator.
    fn jet_op(&self, alpha: &Exps) -> Result<PolyDiffOp<HSeries>> {
        interpolate(&self.profile, 1, alpha.degree(), |a| {
            Ok(self.lift(&a[0])?.deriv_y_multi(alpha).sigma())
        })
    }

    /// Inverse of ν on cochains with y-independent coefficients, by triangular elimination.
    pub fn nu_inverse(&self, op: &PolyDiffOp<HSeries>) -> Result<PolyDiffOp<WeylElement>> {
        let p = self.profile;
        let mut jets: std::collections::BTreeMap<Exps, PolyDiffOp<HSeries>> = Default::default();
        let mut residual = op.clone();
        let mut out = PolyDiffOp::zero(&p, op.arity());
        let total = |idx: &Vec<Exps>| idx.iter().map(Exps::degree).sum::<u32>();
        let guard = op.terms().len() * 64 + 64;
        for _ in 0..guard {
            let Some((idx, c)) = residual
                .terms()
                .iter()
                .max_by_key(|(i, _)| total(i))
                .map(|(i, c)| (i.clone(), c.clone()))
            else {
                return Ok(out);
            };
            out.add_term(idx.clone(), &WeylElement::from_hseries(&p, &c));
            // c · ⊗ₛ jet(αₛ)
            let mut prod = PolyDiffOp::from_terms(&p, 0, [(vec![], c.clone())]);
            for a in &idx {
                if !jets.contains_key(a) {
                    jets.insert(*a, self.jet_op(a)?);
                }
                let j = &jets[a];
                let mut next = PolyDiffOp::zero(&p, prod.arity() + 1);
                for (pi, pc) in prod.terms() {
                    for (ji, jc) in j.terms() {
                        let mut ni = pi.clone();
                        ni.push(ji[0]);
                        next.add_term(ni, &(pc * jc));
                    }
                }
                prod = next;
            }
            residual = residual.sub(&prod);
        }
        Err(Error::NoConvergence(guard))
    }
}

/// `(∇, π)` test data: a compatible connection and an x-constant formal Poisson matrix on ℝ².
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub conn: ConnectionData,
    pub pi: SeriesMatrix,
}

fn sym_tensor(p: &Profile, entries: &[([usize; 3], HSeries)]) -> Vec<HSeries> {
    let d = p.dim;
    let mut s = vec![HSeries::zero(p); d * d * d];
    for (ix, v) in entries {
        let mut perms = vec![
            [ix[0], ix[1], ix[2]],
            [ix[0], ix[2], ix[1]],
            [ix[1], ix[0], ix[2]],
        ];
        perms.extend([
            [ix[1], ix[2], ix[0]],
            [ix[2], ix[0], ix[1]],
            [ix[2], ix[1], ix[0]],
        ]);
        perms.sort();
        perms.dedup();
        for q in perms {
            s[(q[0] * d + q[1]) * d + q[2]] = v.clone();
        }
    }
    s
}

fn j_matrix(p: &Profile, c: &HSeries) -> SeriesMatrix {
    let mut m = SeriesMatrix::zero(p, 2);
    m.set(0, 1, c.clone());
    m.set(1, 0, -c);
    m
}

/// Γ = 0, π = ℏJ.
pub fn flat_fixture(p: &Profile) -> Fixture {
    let p = p.with_dim(2);
    Fixture {
        name: "flat",
        conn: ConnectionData::flat(&p),
        pi: j_matrix(&p, &HSeries::hbar_pow(&p, 1)),
    }
}

/// π = ℏJ, S₁₁₁ = x₂, S₁₁₂ = 1, S₂₂₂ = x₁.
pub fn fixture_a(p: &Profile) -> Fixture {
    let p = p.with_dim(2);
    let pi = j_matrix(&p, &HSeries::hbar_pow(&p, 1));
    let s = sym_tensor(
        &p,
        &[
            ([0, 0, 0], HSeries::x(&p, 1)),
            ([0, 0, 1], HSeries::one(&p)),
            ([1, 1, 1], HSeries::x(&p, 0)),
        ],
    );
    Fixture {
        name: "jets-a",
        conn: ConnectionData::from_symmetric(&pi, &s).expect("fixture"),
        pi,
    }
}

/// π = (ℏ + ℏ²)J, S₁₁₂ = 1 + ℏx₁, S₁₂₂ = x₂ − ℏ.
pub fn fixture_b(p: &Profile) -> Fixture {
    let p = p.with_dim(2);
    let h = HSeries::hbar_pow(&p, 1);
    let pi = j_matrix(&p, &(&h + &HSeries::hbar_pow(&p, 2)));
    let s112 = &HSeries::one(&p) + &(&h * &HSeries::x(&p, 0));
    let s122 = &HSeries::x(&p, 1) - &h;
    let s = sym_tensor(&p, &[([0, 0, 1], s112), ([0, 1, 1], s122)]);
    Fixture {
        name: "jets-b",
        conn: ConnectionData::from_symmetric(&pi, &s).expect("fixture"),
        pi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mono::GSet;

    fn p() -> Profile {
        Profile::desk()
    }

    fn mono(p: &Profile, k: u32, x: [u8; 2], y: [u8; 2], dx: &[usize], c: i64) -> WeylElement {
        let mut xe = Exps::ZERO;
        let mut ye = Exps::ZERO;
        for i in 0..2 {
            for _ in 0..x[i] {
                xe = xe.inc(i);
            }
            for _ in 0..y[i] {
                ye = ye.inc(i);
            }
        }
        WeylElement::monomial(p, k, xe, ye, GSet::from_indices(dx), CRational::from_int(c))
    }

    #[test]
    fn delta_inverse_and_hodge() {
        let p = p();
        let a = mono(&p, 0, [0, 0], [1, 0], &[1], 1);
        let (_, di, s) = delta_calculus(&a);
        assert_eq!(
            di,
            mono(&p, 0, [0, 0], [1, 1], &[], 1).scale(&CRational::from_frac(1, 2))
        );
        assert!(s.is_zero());
        assert!(hodge_residual(&a).is_zero());
        let mixed =
            &(&a + &mono(&p, 1, [1, 0], [0, 2], &[0, 1], 3)) + &mono(&p, 0, [2, 0], [0, 0], &[], 5);
        assert!(hodge_residual(&mixed).is_zero());
        assert!(mixed.delta_inv().delta_inv().is_zero());
    }

    #[test]
    fn fiber_product_basics() {
        let p = p();
        let fx = flat_fixture(&p);
        let f = FiberProduct::new(&fx.pi).unwrap();
        let y1 = WeylElement::y(&p, 0);
        let y2 = WeylElement::y(&p, 1);
        let c = f.commutator(&y1, &y2);
        assert_eq!(c, WeylElement::hbar_pow(&p, 1).scale_int(2));
        assert_eq!(f.poisson(&y1, &y2), c);
        // δ is inner
        let omega = omega_shifted(&fx.pi).unwrap();
        let e = omega_one_form(&omega, &p);
        let a = &mono(&p, 0, [1, 0], [2, 1], &[], 1) + &mono(&p, 1, [0, 0], [0, 1], &[0], 2);
        assert_eq!(f.hbar_commutator(&e, &a).unwrap(), a.delta());
        let mut bad = SeriesMatrix::zero(&p, 2);
        bad.set(0, 1, HSeries::hbar_pow(&p, 1));
        assert_eq!(FiberProduct::new(&bad), Err(Error::NotAntisymmetric));
    }

    #[test]
    fn curvature_matches_riemann_formula() {
        let p = p();
        for fx in [fixture_a(&p), fixture_b(&p)] {
            let fiber = FiberProduct::new(&fx.pi).unwrap();
            let nabla = fx.conn.nabla(&p);
            let omega = omega_shifted(&fx.pi).unwrap();
            let r = curvature(&nabla, &fiber, &omega).unwrap();
            // Rᵐ_{ij,l} = ∂ᵢΓᵐⱼₗ − ∂ⱼΓᵐᵢₗ + ΓᵐᵢₐΓᵃⱼₗ − ΓᵐⱼₐΓᵃᵢₗ and ∇²yᵐ = −½ dxⁱdxʲ Rᵐ_{ij,l} yˡ
            let g = |k, i, j| fx.conn.gamma(k, i, j).clone();
            let mut expect = WeylElement::zero(&p);
            for i in 0..2 {
                for j in 0..2 {
                    for k in 0..2 {
                        for l in 0..2 {
                            let mut rr = HSeries::zero(&p);
                            for m in 0..2 {
                                let mut t = &g(m, j, l).deriv(i) - &g(m, i, l).deriv(j);
                                for a in 0..2 {
                                    t = &t
                                        + &(&(&g(m, i, a) * &g(a, j, l))
                                            - &(&g(m, j, a) * &g(a, i, l)));
                                }
                                rr = &rr + &(omega.get(k, m) * &t);
                            }
                            // R = ¼ dxⁱdxʲ Ω_{km} Rᵐ_{ij,l} yᵏyˡ, summed over all i, j
                            let term = WeylElement::from_hseries(&p, &rr)
                                .mul_y(k)
                                .mul_y(l)
                                .dx_wedge(j)
                                .dx_wedge(i);
                            expect = &expect + &term.scale(&CRational::from_frac(1, 4));
                        }
                    }
                }
            }
            // ∇² = (1/ℏ)[R,·] on test elements; the bracket lowers weight by one, so R is taken wider
            let wp = p.with_y(p.y_degree + 1);
            let fw = FiberProduct::new(&reprofile(&fx.pi, &wp)).unwrap();
            let rw = curvature(&fx.conn.nabla(&wp), &fw, &reprofile(&omega, &wp)).unwrap();
            for a in [
                WeylElement::y(&p, 0),
                mono(&p, 0, [1, 0], [1, 1], &[], 1),
                mono(&p, 0, [0, 0], [2, 0], &[1], 1),
            ] {
                let lhs = nabla.apply(&nabla.apply(&a));
                assert_eq!(
                    lhs,
                    fw.hbar_commutator(&rw, &a.reduce(&wp)).unwrap().reduce(&p),
                    "{}",
                    fx.name
                );
            }
            assert_eq!(r, expect, "{}", fx.name);
        }
        let flat = flat_fixture(&p);
        let fiber = FiberProduct::new(&flat.pi).unwrap();
        let r = curvature(
            &flat.conn.nabla(&p),
            &fiber,
            &omega_shifted(&flat.pi).unwrap(),
        )
        .unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn incompatible_connection_rejected() {
        let p = p();
        let fx = flat_fixture(&p);
        let mut gamma = vec![HSeries::zero(&p); 8];
        gamma[0] = HSeries::one(&p);
        let conn = ConnectionData::new(&p, gamma).unwrap();
        let fiber = FiberProduct::new(&fx.pi).unwrap();
        let omega = omega_shifted(&fx.pi).unwrap();
        assert!(matches!(
            curvature(&conn.nabla(&p), &fiber, &omega),
            Err(Error::IncompatibleConnection(_))
        ));
        let mut tors = vec![HSeries::zero(&p); 8];
        tors[1] = HSeries::one(&p);
        assert!(matches!(
            ConnectionData::new(&p, tors),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn flat_fixture_is_moyal() {
        let p = p();
        let fx = flat_fixture(&p);
        let st = fedosov_recursion(&fx.conn, &fx.pi, Mode::Quantum).unwrap();
        assert!(st.r().is_zero());
        assert!(st.class_residual().unwrap().is_zero());
        let x1 = HSeries::x(&p, 0);
        let x2 = HSeries::x(&p, 1);
        // Taylor shift
        let f = &(&x1 * &x1) * &x2;
        let t = st.lift(&f).unwrap();
        let shift =
            |i: usize| &WeylElement::from_hseries(&p, &HSeries::x(&p, i)) + &WeylElement::y(&p, i);
        assert_eq!(t, &(&shift(0) * &shift(0)) * &shift(1));
        assert_eq!(
            st.star(&x1, &x2).unwrap(),
            &(&x1 * &x2) + &HSeries::hbar_pow(&p, 1)
        );
        let one = HSeries::one(&p);
        assert_eq!(st.star(&f, &one).unwrap(), f);
    }

    #[test]
    fn geometric_lifts() {
        let p = p();
        // Γ¹₁₁ = 1 is flat, so no tail is needed
        let mut gamma = vec![HSeries::zero(&p); 8];
        gamma[0] = HSeries::one(&p);
        let conn = ConnectionData::new(&p, gamma).unwrap();
        let gd = geometric_differential(&conn, &p).unwrap();
        assert!(gd.tail().iter().all(WeylElement::is_zero));
        assert!(gd.flatness_residual().iter().all(WeylElement::is_zero));
        let f = &HSeries::x(&p, 0) * &HSeries::x(&p, 1);
        let t = gd.lift(&f).unwrap();
        assert_eq!(t.sigma(), f);
        assert!(gd.apply(&t).is_zero());
        // a perturbation in higher y-degree is not flat
        let bumped = &t + &mono(&p, 0, [0, 0], [2, 0], &[], 1);
        assert!(!gd.apply(&bumped).is_zero());
        // curved connection: the tail makes D flat
        let fx = fixture_a(&p);
        let gd = geometric_differential(&fx.conn, &p).unwrap();
        assert!(gd.tail().iter().any(|a| !a.is_zero()));
        assert!(gd.flatness_residual().iter().all(WeylElement::is_zero));
        let t = gd.lift(&HSeries::x(&p, 1)).unwrap();
        assert!(gd.apply(&t).is_zero());
    }

    #[test]
    fn cochain_lift_flat_and_round_trip() {
        let p = p();
        let flat = geometric_differential(&ConnectionData::flat(&p), &p).unwrap();
        let mut q = PolyDiffOp::zero(&p, 2);
        q.add_term(vec![Exps::unit(0), Exps::unit(1)], &WeylElement::one(&p));
        assert_eq!(flat.cochain_lift(&q).unwrap(), q);
        let mut gamma = vec![HSeries::zero(&p); 8];
        gamma[0] = HSeries::one(&p);
        let gd = geometric_differential(&ConnectionData::new(&p, gamma).unwrap(), &p).unwrap();
        let rho = gd.cochain_lift(&q).unwrap();
        assert!(gd.cochain_differential(&rho).is_zero());
        let bad = PolyDiffOp::from_terms(&p, 1, [(vec![Exps::unit(0)], WeylElement::y(&p, 0))]);
        assert_eq!(gd.cochain_lift(&bad), Err(Error::NotDeltaFlat));
        // ν ∘ ν⁻¹ on an arity-1 operator
        let mut op = PolyDiffOp::zero(&p, 1);
        op.add_term(vec![Exps::unit(0).inc(0)], &HSeries::x(&p, 1));
        op.add_term(vec![Exps::unit(1)], &HSeries::one(&p));
        let inv = gd.nu_inverse(&op).unwrap();
        for e in Exps::up_to_degree(2, 3) {
            let f = HSeries::monomial(&p, 0, e, CRational::one());
            assert_eq!(
                gd.nu(&inv, std::slice::from_ref(&f)).unwrap(),
                op.apply(&[f]).unwrap()
            );
        }
    }

    fn monomials(p: &Profile, deg: u32) -> Vec<HSeries> {
        Exps::up_to_degree(2, deg)
            .into_iter()
            .map(|e| HSeries::monomial(p, 0, e, CRational::one()))
            .collect()
    }

    #[test]
    fn nontrivial_fixtures() {
        let p = p();
        for fx in [fixture_a(&p), fixture_b(&p)] {
            let st = fedosov_recursion(&fx.conn, &fx.pi, Mode::Quantum).unwrap();
            assert!(st.certificate().unwrap().is_zero(), "{}", fx.name);
            assert!(st.class_residual().unwrap().is_zero(), "{}", fx.name);
            let cl = fedosov_recursion(&fx.conn, &fx.pi, Mode::Classical).unwrap();
            assert!(cl.certificate().unwrap().is_zero(), "{}", fx.name);
            let diff = st.difference(&cl);
            assert!(diff.hbar_valuation().unwrap() >= 2, "{}", fx.name);
            assert!(!diff.is_zero(), "{}", fx.name);
            let x1 = HSeries::x(&p, 0);
            let t = st.lift(&x1).unwrap();
            assert!(st
                .differential(&t)
                .unwrap()
                .reduce(&p)
                .filter(|m| m.filtration() + m.x.degree() + m.dx.len() <= p.y_degree)
                .is_zero());
            let orig = st.original().unwrap();
            assert!(orig.class_residual().unwrap().is_zero(), "{}", fx.name);
            let ms = monomials(&p, 3);
            for f in &ms {
                assert!(
                    orig.bridge_residual(&st, f).unwrap().is_zero(),
                    "{}",
                    fx.name
                );
            }
            assert_eq!(
                st.star_table(&ms).unwrap(),
                orig.star_table(&ms).unwrap(),
                "{}",
                fx.name
            );
        }
    }
}
