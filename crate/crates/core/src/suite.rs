//! The built-in verification matrix. Each suite returns a [`Section`] of residual checks;
//! randomized suites use fixed seeds so reports are reproducible.

use std::time::Instant;

use crate::coeff::CRational;
use crate::dgla::polyvector_dgla;
use crate::error::Result;
use crate::fedosov::{self, fedosov_recursion, weyl_visible, Fixture, Mode};
use crate::gauge::{gauge_transform, gauge_transform_ode};
use crate::hseries::HSeries;
use crate::matrix::SeriesMatrix;
use crate::mono::{Exps, GSet};
use crate::ode::{
    linear_residual, solve_exp_prefactor, solve_linear, star_exponential, TOperator, TPoly,
};
use crate::polyvector::{
    b_transform, courant, courant_defect, courant_witness, jacobiator, pairing, pi_sharp, DiffForm,
    GenSection, PolyVectorField,
};
use crate::profile::Profile;
use crate::random::Gen;
use crate::report::{Check, Report, Section};
use crate::star::{
    bfield_equivalence, moyal_normalizer, normalizer_residual, transition_demo, ConstPoissonMatrix,
    StarProduct,
};
use crate::weyl::WeylElement;

/// Profile used for the stability comparison: N=8, Dy=8, other bounds unchanged.
pub fn wide_profile(p: &Profile) -> Profile {
    p.with_hbar(8).with_y(8)
}

fn monomial(p: &Profile, e: Exps) -> HSeries {
    HSeries::monomial(p, 0, e, CRational::one())
}

fn monomials(p: &Profile, deg: u32) -> Vec<HSeries> {
    Exps::up_to_degree(p.dim, deg)
        .into_iter()
        .map(|e| monomial(p, e))
        .collect()
}

/// Runs `f`, recording the elapsed time; an error becomes a failed check.
pub fn timed(name: &str, p: &Profile, f: impl FnOnce(&mut Section) -> Result<()>) -> Section {
    let t0 = Instant::now();
    let mut s = Section::new(name, p);
    if let Err(e) = f(&mut s) {
        s.check(Check::holds("error", false, || e.to_string()));
    }
    s.elapsed = t0.elapsed();
    s
}

/// All associators on monomial triples of total degree ≤ `deg`.
pub fn associators(star: &StarProduct, deg: u32) -> Vec<HSeries> {
    let p = *star.profile();
    let ms = Exps::up_to_degree(p.dim, deg);
    let mut out = vec![];
    for a in &ms {
        for b in &ms {
            for c in &ms {
                if a.degree() + b.degree() + c.degree() <= deg {
                    let r = star.assoc_residual(
                        &monomial(&p, *a),
                        &monomial(&p, *b),
                        &monomial(&p, *c),
                    );
                    if !r.is_zero() {
                        out.push(r);
                    }
                }
            }
        }
    }
    out
}

/// `Π = (ℏ + ℏ³) J` on ℝ².
pub fn moyal_fixture(p: &Profile) -> Result<ConstPoissonMatrix> {
    let p = p.with_dim(2);
    ConstPoissonMatrix::standard(&p, &(&HSeries::hbar_pow(&p, 1) + &HSeries::hbar_pow(&p, 3)))
}

pub fn moyal_checks(s: &mut Section, pi: &ConstPoissonMatrix, deg: u32) {
    let star = StarProduct::moyal(pi);
    s.check(Check::zero("assoc_residual", &associators(&star, deg)));
    s.check(Check::zero("mc_residual", &star.mc_residual()));
    let units: Vec<HSeries> = monomials(pi.profile(), deg)
        .iter()
        .map(|f| star.unit_defect(f))
        .collect();
    s.check(Check::zero("unit_defect", &units));
}

/// 1. Moyal associativity and Maurer–Cartan residual.
pub fn moyal_suite(p: &Profile) -> Section {
    timed("moyal", p, |s| {
        let pi = moyal_fixture(p)?;
        moyal_checks(s, &pi, 4.min(p.x_degree));
        Ok(())
    })
}

fn polyvector_instances(s: &mut Section, p: &Profile, gen: &mut Gen, n: usize) {
    let d = p.dim;
    // a wide x-box keeps every intermediate product exact
    let g = p.with_x(8);
    let (mut jac1, mut jac2, mut chain, mut integ, mut pair) =
        (vec![], vec![], vec![], vec![], vec![]);
    let (mut prop_v, mut prop_f) = (vec![], vec![]);
    for _ in 0..n {
        let pi = gen.bivector(&g, 1);
        let (f, gg, h) = (
            gen.function(&g, 2),
            gen.function(&g, 2),
            gen.function(&g, 2),
        );
        let jac = jacobiator(&pi, &f, &gg, &h);
        let half_sn = pi
            .schouten(&pi)
            .evaluate_on(&[&f, &gg, &h])
            .scale(&CRational::from_frac(1, 2));
        let dpi2 = pi
            .schouten(&pi.schouten(&PolyVectorField::function(&f)))
            .evaluate_on(&[&gg, &h]);
        jac1.push(&half_sn - &jac);
        jac2.push(&dpi2 - &jac);
        let ig = pairing(
            &courant(
                &GenSection::graph_of(&pi, &f),
                &GenSection::graph_of(&pi, &gg),
            ),
            &GenSection::graph_of(&pi, &h),
        );
        integ.push(&ig - &jac);

        let poi = gen.poisson(&g, 1);
        let eta = gen.one_form(&g, 2);
        chain.push(&pi_sharp(&poi, &eta.de_rham()) + &poi.schouten(&pi_sharp(&poi, &eta)));

        let b = gen.closed_two_form(&g, 1);
        let e1 = GenSection::new(gen.vector_field(&g, 1), gen.one_form(&g, 1));
        let e2 = GenSection::new(gen.vector_field(&g, 1), gen.one_form(&g, 1));
        pair.push(&pairing(&b_transform(&b, &e1), &b_transform(&b, &e2)) - &pairing(&e1, &e2));
        let cd = courant_defect(&b, &e1, &e2);
        prop_v.push(cd.vec);
        prop_f.push(cd.form);
    }
    let tag = format!("r{d}");
    s.check(Check::zero(
        format!("{tag}.half_schouten_minus_jacobiator"),
        &jac1,
    ));
    s.check(Check::zero(
        format!("{tag}.dpi_squared_minus_jacobiator"),
        &jac2,
    ));
    s.check(Check::zero(format!("{tag}.chain"), &chain));
    s.check(Check::zero(format!("{tag}.integrability"), &integ));
    s.check(Check::zero(format!("{tag}.b_transform_pairing"), &pair));
    s.check(Check::zero(
        format!("{tag}.closed_b_courant.vector"),
        &prop_v,
    ));
    s.check(Check::zero(format!("{tag}.closed_b_courant.form"), &prop_f));
}

/// `x₃ dx₁∧dx₂` on ℝ³: not closed, and λ_B breaks the Courant bracket on coordinate fields.
pub fn non_closed_witness(p: &Profile) -> Option<DiffForm> {
    let p = p.with_dim(3);
    let b = DiffForm::component(GSet::from_indices(&[0, 1]), HSeries::x(&p, 2));
    courant_witness(&b).map(|(_, _, d)| d.form)
}

/// 2. Polyvector identity suite on ℝ² and ℝ³.
pub fn polyvector_suite(p: &Profile, n: usize) -> Section {
    timed("polyvector", p, |s| {
        let mut gen = Gen::new(0x5eed_0002);
        polyvector_instances(s, &p.with_dim(2), &mut gen, n);
        polyvector_instances(s, &p.with_dim(3), &mut gen, n);
        s.check(Check::nonzero(
            "r3.non_closed_b_courant",
            &non_closed_witness(p),
        ));
        Ok(())
    })
}

/// Random (closed B, B', formal Poisson π) triples, half on ℝ², half on ℝ³.
pub fn gauge_instances(
    p: &Profile,
    n: usize,
    seed: u64,
) -> Vec<(DiffForm, DiffForm, PolyVectorField)> {
    let mut gen = Gen::new(seed);
    (0..n)
        .map(|i| {
            let q = p.with_dim(if i % 2 == 0 { 2 } else { 3 });
            (
                gen.closed_two_form(&q, 1),
                gen.closed_two_form(&q, 0),
                gen.poisson(&q, 1),
            )
        })
        .collect()
}

/// `𝔞(B,π)` on a profile with one more x-order, so its Schouten square is exact on `p`.
pub fn gauge_outputs(
    p: &Profile,
    inst: &[(DiffForm, DiffForm, PolyVectorField)],
) -> Result<Vec<[PolyVectorField; 4]>> {
    inst.iter()
        .map(|(b, b2, pi)| {
            let q = p.with_dim(pi.profile().dim);
            let g = q.with_x(q.x_degree + 1);
            let (b, b2, pi) = (b.reduce(&g), b2.reduce(&g), pi.reduce(&g));
            let a = gauge_transform(&b, &pi)?;
            let ode = gauge_transform_ode(&b, &pi)?;
            let jac = a.schouten(&a);
            let group = &gauge_transform(&(&b + &b2), &pi)?
                - &gauge_transform(&b, &gauge_transform(&b2, &pi)?)?;
            Ok([
                a.reduce(&q),
                (&ode - &a).reduce(&q),
                jac.reduce(&q),
                group.reduce(&q),
            ])
        })
        .collect()
}

/// 3. Neumann closed form vs ODE, Jacobi preservation, group law.
pub fn gauge_suite(p: &Profile, n: usize) -> Section {
    timed("gauge", p, |s| {
        gauge_checks(s, p, &gauge_instances(p, n, GAUGE_SEED))
    })
}

pub const GAUGE_SEED: u64 = 0x5eed_0003;

pub fn gauge_checks(
    s: &mut Section,
    p: &Profile,
    inst: &[(DiffForm, DiffForm, PolyVectorField)],
) -> Result<()> {
    let out = gauge_outputs(p, inst)?;
    s.check(Check::zero(
        "neumann_vs_ode",
        &out.iter().map(|o| o[1].clone()).collect::<Vec<_>>(),
    ));
    s.check(Check::zero(
        "jacobi_residual",
        &out.iter().map(|o| o[2].clone()).collect::<Vec<_>>(),
    ));
    s.check(Check::zero(
        "group_action_residual",
        &out.iter().map(|o| o[3].clone()).collect::<Vec<_>>(),
    ));
    Ok(())
}

/// `P(a ⋄ b) − P(a) ⋄_F P(b)` on all pairs of fiber monomials of y-degree ≤ Dy.
pub fn normalizer_checks(s: &mut Section, pi: &ConstPoissonMatrix) -> Result<()> {
    let p = *pi.profile();
    let nz = moyal_normalizer(pi)?;
    let ys: Vec<WeylElement> = Exps::up_to_degree(p.dim, p.y_degree)
        .into_iter()
        .map(|e| WeylElement::monomial(&p, 0, Exps::ZERO, e, GSet::EMPTY, CRational::one()))
        .collect();
    let mut res = vec![];
    for a in &ys {
        for b in &ys {
            let r = normalizer_residual(pi, &nz, a, b);
            if !r.is_zero() {
                res.push(r);
            }
        }
    }
    s.check(Check::zero("normalizer_residual", &res));
    Ok(())
}

/// 4. Normalizer on random constant π.
pub fn normalizer_suite(p: &Profile, n: usize) -> Section {
    timed("normalizer", p, |s| {
        let q = p.with_dim(2);
        let mut gen = Gen::new(0x5eed_0004);
        for i in 0..n {
            let pi = ConstPoissonMatrix::new(gen.const_poisson_matrix(&q))?;
            let mut sub = Section::new("", q);
            normalizer_checks(&mut sub, &pi)?;
            for c in sub.checks {
                s.check(Check {
                    name: format!("instance{i}.{}", c.name),
                    ..c
                });
            }
        }
        Ok(())
    })
}

/// `(1 + πB)⁻¹π` by 2×2 series-matrix inversion.
pub fn gauge_matrix_oracle(pi: &SeriesMatrix, b: &SeriesMatrix) -> Result<SeriesMatrix> {
    let one = SeriesMatrix::identity(&pi.profile, pi.n);
    Ok(one.add(&pi.mul(b)).inverse()?.mul(pi))
}

pub fn bfield_checks(
    s: &mut Section,
    pi: &ConstPoissonMatrix,
    b: &DiffForm,
    label: &str,
) -> Result<()> {
    let eq = bfield_equivalence(pi, b)?;
    let base = StarProduct::moyal(pi);
    s.check(Check::zero(
        format!("{label}intertwining_residual"),
        &eq.intertwining_residual(&base),
    ));
    let oracle = gauge_matrix_oracle(pi.matrix(), &b.to_matrix())?;
    let diff: Vec<HSeries> = eq
        .target
        .matrix()
        .e
        .iter()
        .zip(&oracle.e)
        .map(|(a, o)| a - o)
        .collect();
    s.check(Check::zero(
        format!("{label}target_vs_matrix_oracle"),
        &diff,
    ));
    Ok(())
}

pub const BFIELD_VALUES: [(i64, i64); 5] = [(1, 1), (-2, 1), (1, 2), (3, 1), (-1, 3)];

/// 5. B-field equivalence for π = ℏJ and five constant B.
pub fn bfield_suite(p: &Profile) -> Section {
    timed("bfield-equivalence", p, |s| {
        let q = p.with_dim(2);
        let pi = ConstPoissonMatrix::standard(&q, &HSeries::hbar_pow(&q, 1))?;
        for (a, d) in BFIELD_VALUES {
            let b = DiffForm::component(
                GSet::from_indices(&[0, 1]),
                HSeries::constant(&q, CRational::from_frac(a, d)),
            );
            bfield_checks(s, &pi, &b, &format!("b={a}/{d}."))?;
        }
        Ok(())
    })
}

/// Everything the Fedosov suite and the stability comparison look at.
#[derive(Clone, Debug, PartialEq)]
pub struct FedosovSnapshot {
    pub r: WeylElement,
    pub b: WeylElement,
    pub certificate: WeylElement,
    pub class_residual: WeylElement,
    pub r_minus_rcl: WeylElement,
    pub star_table: Vec<Vec<HSeries>>,
}

pub fn fedosov_snapshot(fx: &Fixture, sample_deg: u32) -> Result<FedosovSnapshot> {
    let st = fedosov_recursion(&fx.conn, &fx.pi, Mode::Quantum)?;
    let cl = fedosov_recursion(&fx.conn, &fx.pi, Mode::Classical)?;
    let ms = monomials(st.profile(), sample_deg);
    Ok(FedosovSnapshot {
        r: st.r(),
        b: st.b(),
        certificate: st.certificate()?,
        class_residual: st.class_residual()?,
        r_minus_rcl: st.difference(&cl),
        star_table: st.star_table(&ms)?,
    })
}

impl FedosovSnapshot {
    pub fn reduce(&self, p: &Profile) -> FedosovSnapshot {
        let w = |a: &WeylElement| a.reduce(p);
        FedosovSnapshot {
            r: w(&self.r),
            b: w(&self.b),
            certificate: w(&self.certificate),
            class_residual: w(&self.class_residual),
            r_minus_rcl: w(&self.r_minus_rcl),
            star_table: self
                .star_table
                .iter()
                .map(|row| row.iter().map(|s| weyl_visible(&s.reduce(p), p)).collect())
                .collect(),
        }
    }
}

/// Flat fixture: r = 0, τ is the Taylor shift, the product is Moyal.
pub fn flat_fedosov_checks(s: &mut Section, p: &Profile, sample_deg: u32) -> Result<()> {
    let fx = fedosov::flat_fixture(p);
    let q = fx.pi.profile;
    let st = fedosov_recursion(&fx.conn, &fx.pi, Mode::Quantum)?;
    s.check(Check::zero("flat.r", &st.r()));
    s.check(Check::zero("flat.class_residual", &st.class_residual()?));
    let shift: Vec<WeylElement> = (0..2)
        .map(|i| &WeylElement::from_hseries(&q, &HSeries::x(&q, i)) + &WeylElement::y(&q, i))
        .collect();
    let mut taylor = vec![];
    for e in Exps::up_to_degree(2, sample_deg) {
        let mut t = WeylElement::one(&q);
        for (i, sh) in shift.iter().enumerate() {
            for _ in 0..e.get(i) {
                t = &t * sh;
            }
        }
        taylor.push(&st.lift(&monomial(&q, e))? - &t);
    }
    s.check(Check::zero("flat.lift_minus_taylor_shift", &taylor));
    let moyal = StarProduct::moyal(&ConstPoissonMatrix::new(fx.pi.clone())?);
    let ms = monomials(&q, sample_deg);
    let table = st.star_table(&ms)?;
    let mut diff = vec![];
    for (i, f) in ms.iter().enumerate() {
        for (j, g) in ms.iter().enumerate() {
            diff.push(&table[i][j] - &weyl_visible(&moyal.mul(f, g), &q));
        }
    }
    s.check(Check::zero("flat.star_minus_moyal", &diff));
    Ok(())
}

/// Certificate, class residual, r − r^cl and *_F = *_m for one fixture.
pub fn fedosov_fixture_checks(
    s: &mut Section,
    fx: &Fixture,
    sample_deg: u32,
) -> Result<WeylElement> {
    let st = fedosov_recursion(&fx.conn, &fx.pi, Mode::Quantum)?;
    let cl = fedosov_recursion(&fx.conn, &fx.pi, Mode::Classical)?;
    let n = fx.name;
    s.check(Check::zero(format!("{n}.certificate"), &st.certificate()?));
    s.check(Check::zero(
        format!("{n}.classical_certificate"),
        &cl.certificate()?,
    ));
    s.check(Check::zero(
        format!("{n}.class_residual"),
        &st.class_residual()?,
    ));
    let diff = st.difference(&cl);
    s.check(Check::zero(
        format!("{n}.r_minus_rcl_below_hbar2"),
        &diff.filter(|m| m.k < 2),
    ));
    let orig = st.original()?;
    s.check(Check::zero(
        format!("{n}.original_class_residual"),
        &orig.class_residual()?,
    ));
    let ms = monomials(st.profile(), sample_deg);
    let bridge = ms
        .iter()
        .map(|f| orig.bridge_residual(&st, f))
        .collect::<Result<Vec<_>>>()?;
    s.check(Check::zero(format!("{n}.normalizer_bridge"), &bridge));
    let tm = st.star_table(&ms)?;
    let tf = orig.star_table(&ms)?;
    let d: Vec<HSeries> = tm
        .iter()
        .flatten()
        .zip(tf.iter().flatten())
        .map(|(a, b)| a - b)
        .collect();
    s.check(Check::zero(format!("{n}.star_f_minus_star_m"), &d));
    Ok(diff.filter(|m| m.k == 2))
}

/// 6. Fedosov engine.
pub fn fedosov_suite(p: &Profile) -> Section {
    timed("fedosov", p, |s| {
        flat_fedosov_checks(s, p, 3)?;
        let mut witness = vec![];
        for fx in [fedosov::fixture_a(p), fedosov::fixture_b(p)] {
            witness.push(fedosov_fixture_checks(s, &fx, 3)?);
        }
        s.check(Check::nonzero("r_minus_rcl_at_hbar2", &witness));
        Ok(())
    })
}

/// 7. Formal ODE contracts and the star-exponential inverse law.
pub fn ode_suite(p: &Profile, n: usize) -> Section {
    timed("ode", p, |s| ode_checks(s, p, n, 0x5eed_0007))
}

pub fn ode_checks(s: &mut Section, p: &Profile, n: usize, seed: u64) -> Result<()> {
    let q = p.with_dim(2);
    let mut gen = Gen::new(seed);
    let (mut lin, mut init, mut expo, mut inv) = (vec![], vec![], vec![], vec![]);
    let moyal = StarProduct::moyal(&ConstPoissonMatrix::standard(
        &q,
        &HSeries::hbar_pow(&q, 1),
    )?);
    for i in 0..n {
        let c0 = gen.series(&q, 2, 1, 2, 1);
        let c1 = gen.series(&q, 2, 1, 2, 1);
        let d = TOperator::from_parts(vec![
            Box::new(move |v: &HSeries| v * &c0) as Box<dyn Fn(&HSeries) -> HSeries>,
            Box::new(move |v: &HSeries| v * &c1),
        ]);
        if i % 2 == 0 {
            let w = TPoly::from_coeffs(
                &HSeries::zero(&q),
                vec![gen.series(&q, 2, 1, 3, 1), gen.series(&q, 2, 1, 3, 1)],
            );
            let v0 = gen.series(&q, 3, 0, 2, 2);
            let v = solve_linear(&w, &d, &v0)?;
            let (r, r0) = linear_residual(&v, &w, &d, &v0)?;
            lin.push(r);
            init.push(r0);
        } else {
            let d0 = HSeries::constant(&q, gen.rational());
            let h = &HSeries::constant(&q, gen.nonzero_rational()) + &gen.series(&q, 2, 1, 2, 1);
            let sol = solve_exp_prefactor(&d0, &d, &h)?;
            expo.push(sol.residual(&d)?);
            init.push(&sol.reduced_value(&CRational::zero()) - &h);
        }
        // d₀ + ℏ(affine) + ℏ² scalar
        let lin_part = &HSeries::constant(&q, gen.rational())
            + &(&HSeries::x(&q, 0).scale(&gen.rational())
                + &HSeries::x(&q, 1).scale(&gen.rational()));
        let dd = &(&HSeries::constant(&q, gen.rational())
            + &(&HSeries::hbar_pow(&q, 1) * &lin_part))
            + &HSeries::hbar_pow(&q, 2).scale(&gen.rational());
        let se = star_exponential(&dd, |a, b| moyal.mul(a, b))?;
        inv.push(se.inverse_residual(|a, b| moyal.mul(a, b)));
    }
    s.check(Check::zero("linear_residual", &lin));
    s.check(Check::zero("initial_value_residual", &init));
    s.check(Check::zero("exp_prefactor_residual", &expo));
    s.check(Check::zero("star_exp_inverse_residual", &inv));
    Ok(())
}

/// 8. DGLA suite in the polyvector DGLA.
pub fn dgla_suite(p: &Profile, n: usize) -> Section {
    timed("dgla-suite", p, |s| dgla_checks(s, p, n, 0x5eed_0008))
}

pub fn dgla_checks(s: &mut Section, p: &Profile, n: usize, seed: u64) -> Result<()> {
    let mut gen = Gen::new(seed);
    let (mut right, mut mc, mut mc0) = (vec![], vec![], vec![]);
    for i in 0..n {
        let q = p.with_dim(if i % 2 == 0 { 2 } else { 3 });
        let ctx = polyvector_dgla(&q);
        let alpha = gen.poisson(&q, 1);
        let xi = gen.vector_field(&q, 1);
        let eta = gen.vector_field(&q, 1);
        mc0.push(ctx.mc_residual(&alpha)?);
        let lhs = ctx.gauge_action(&ctx.gauge_action(&alpha, &xi)?, &eta)?;
        let rhs = ctx.gauge_action(&alpha, &ctx.campbell_hausdorff(&xi, &eta)?)?;
        right.push(&lhs - &rhs);
        mc.push(ctx.mc_residual(&ctx.gauge_action(&alpha, &xi)?)?);
    }
    s.check(Check::zero("input_mc_residual", &mc0));
    s.check(Check::zero("action_is_right", &right));
    s.check(Check::zero("gauge_preserves_mc", &mc));
    Ok(())
}

pub fn transition_checks(
    s: &mut Section,
    star: &StarProduct,
    c: &[(HSeries, i64); 3],
    label: &str,
) -> Result<()> {
    let rep = transition_demo(star, c)?;
    let n: i64 = c.iter().map(|x| x.1).sum();
    s.check(Check::holds(
        format!("{label}diagonal_is_one"),
        rep.diagonal_ok,
        || "G_aa ≠ 1".into(),
    ));
    s.check(Check::holds(
        format!("{label}inverse_law"),
        rep.inverse_ok,
        || "G_ab * G_ba ≠ 1".into(),
    ));
    s.check(Check::holds(
        format!("{label}triple_phase"),
        rep.triple_phase == Some(n),
        || format!("expected e^(2πi·{n}·t), got {:?}", rep.triple_phase),
    ));
    s.value(
        format!("{label}triple_product"),
        match rep.triple_phase {
            Some(k) => format!("exp(2πi·{k}·t)"),
            None => "not a pure phase".into(),
        },
    );
    Ok(())
}

/// 9. Transition demo with n = 0 and n = 1.
pub fn transition_suite(p: &Profile) -> Section {
    timed("transition-demo", p, |s| {
        let q = p.with_dim(2);
        let star = StarProduct::moyal(&ConstPoissonMatrix::standard(
            &q,
            &HSeries::hbar_pow(&q, 1),
        )?);
        let c = |v: i64| HSeries::from_int(&q, v);
        transition_checks(s, &star, &[(c(1), 0), (c(1), 0), (c(-2), 0)], "n=0.")?;
        transition_checks(s, &star, &[(c(1), 1), (c(1), 0), (c(-2), 0)], "n=1.")?;
        let zero = [(c(0), 0), (c(0), 0), (c(0), 0)];
        let rep = transition_demo(&star, &zero)?;
        let all_one = rep.g.iter().flatten().all(|g| g.is_one());
        s.check(Check::holds("zero_cocycle_all_one", all_one, || {
            "some G ≠ 1".into()
        }));
        Ok(())
    })
}

/// 10. Criteria 1, 3, 6 recomputed on the wide profile and reduced.
pub fn stability_suite(p: &Profile, gauge_n: usize) -> Section {
    timed("profile-stability", p, |s| {
        let w = wide_profile(p);
        let q = p.with_dim(2);
        let mq = moyal_fixture(&q)?;
        let mw = moyal_fixture(&w)?;
        let (a, b) = (StarProduct::moyal(&mq), StarProduct::moyal(&mw));
        s.check(Check::zero(
            "moyal.bidiff",
            &b.bidiff().reduce(&q).sub(a.bidiff()),
        ));
        s.check(Check::zero(
            "moyal.assoc_residual_wide",
            &associators(&b, 4.min(w.x_degree)),
        ));

        let inst = gauge_instances(p, gauge_n, GAUGE_SEED);
        let lifted: Vec<_> = inst
            .iter()
            .map(|(b, b2, pi)| {
                let ww = w.with_dim(pi.profile().dim);
                (b.reduce(&ww), b2.reduce(&ww), pi.reduce(&ww))
            })
            .collect();
        let small = gauge_outputs(p, &inst)?;
        let big = gauge_outputs(&w, &lifted)?;
        let mut diffs = vec![];
        for (sm, bg) in small.iter().zip(&big) {
            let qq = *sm[0].profile();
            for k in 0..4 {
                diffs.push(&bg[k].reduce(&qq) - &sm[k]);
            }
        }
        s.check(Check::zero("gauge.outputs", &diffs));

        for (fs, fw) in [
            (fedosov::fixture_a(p), fedosov::fixture_a(&w)),
            (fedosov::fixture_b(p), fedosov::fixture_b(&w)),
        ] {
            let small = fedosov_snapshot(&fs, 3)?;
            let big = fedosov_snapshot(&fw, 3)?.reduce(&fs.pi.profile);
            let n = fs.name;
            s.check(Check::zero(format!("{n}.r"), &(&big.r - &small.r)));
            s.check(Check::zero(format!("{n}.b"), &(&big.b - &small.b)));
            s.check(Check::zero(
                format!("{n}.certificate"),
                &(&big.certificate - &small.certificate),
            ));
            s.check(Check::zero(
                format!("{n}.class_residual"),
                &(&big.class_residual - &small.class_residual),
            ));
            s.check(Check::zero(
                format!("{n}.r_minus_rcl"),
                &(&big.r_minus_rcl - &small.r_minus_rcl),
            ));
            let d: Vec<HSeries> = big
                .star_table
                .iter()
                .flatten()
                .zip(small.star_table.iter().flatten())
                .map(|(x, y)| x - y)
                .collect();
            s.check(Check::zero(format!("{n}.star_table"), &d));
        }
        Ok(())
    })
}

/// The ten suites at their specified sizes, run on parallel threads; the report keeps suite order.
pub fn selftest(p: &Profile) -> Report {
    let p = *p;
    let jobs: Vec<Box<dyn FnOnce() -> Section + Send>> = vec![
        Box::new(move || moyal_suite(&p)),
        Box::new(move || polyvector_suite(&p, 100)),
        Box::new(move || gauge_suite(&p, 50)),
        Box::new(move || normalizer_suite(&p, 10)),
        Box::new(move || bfield_suite(&p)),
        Box::new(move || fedosov_suite(&p)),
        Box::new(move || ode_suite(&p, 50)),
        Box::new(move || dgla_suite(&p, 25)),
        Box::new(move || transition_suite(&p)),
        Box::new(move || stability_suite(&p, 50)),
    ];
    let sections = std::thread::scope(|sc| {
        let handles: Vec<_> = jobs
            .into_iter()
            .map(|job| {
                std::thread::Builder::new()
                    .stack_size(64 << 20)
                    .spawn_scoped(sc, job)
                    .expect("spawn suite thread")
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("suite thread panicked"))
            .collect()
    });
    Report { sections }
}

/// Short human summary, one line per suite.
pub fn summary_table(r: &Report) -> String {
    let mut out = String::new();
    for s in &r.sections {
        let failed = s.checks.iter().filter(|c| !c.passed()).count();
        out.push_str(&format!(
            "{:<20} {:>3} checks  {:>3} failed  {}\n",
            s.name,
            s.checks.len(),
            failed,
            if failed == 0 { "PASS" } else { "FAIL" }
        ));
    }
    out
}
