//! B-field action on formal Poisson structures and the symplectic dictionary π ↔ ω.
//!
//! Conventions: `π♯(dxⁱ) = πⁱʲ∂ⱼ`, `B♯(X) = i_X B`, so on coefficient matrices
//! `𝔞(B,π) = (1 + πB)⁻¹π` and the 2-form of `𝔞(B,π)` is `ω(π) + B`.

use crate::coeff::CRational;
use crate::error::{Error, Result};
use crate::matrix::SeriesMatrix;
use crate::mono::GSet;
use crate::ode::{solve_fixed_point, TPoly};
use crate::polyvector::{b_sharp, pi_sharp, DiffForm, PolyVectorField};
use crate::text::format_hseries;

pub fn check_closed(b: &DiffForm) -> Result<()> {
    let db = b.de_rham();
    match db.comps().iter().next() {
        None => Ok(()),
        Some((s, c)) => Err(Error::NotClosed(format!(
            "dB has component dx({}) = {}",
            s.fmt_one_based(),
            format_hseries(c)
        ))),
    }
}

pub fn check_formal(pi: &PolyVectorField) -> Result<()> {
    if pi.comps().values().any(|c| !c.coeff(0).is_zero()) {
        return Err(Error::NotFormal);
    }
    Ok(())
}

/// `i_{η} π` evaluated as the 1-form → vector field map on a coframe element.
fn sharp_image(pi: &PolyVectorField, eta: &DiffForm) -> PolyVectorField {
    pi.contract(eta)
}

/// Coefficient of tⁿ in `𝔞(tB,π)♯(dxⁱ) = π♯(Σₙ (−t)ⁿ (B♯π♯)ⁿ dxⁱ)`, for all i and n ≤ N.
fn neumann_rows(b: &DiffForm, pi: &PolyVectorField) -> Vec<Vec<PolyVectorField>> {
    let p = *pi.profile();
    let mut by_power: Vec<Vec<PolyVectorField>> = vec![];
    let mut cur: Vec<DiffForm> = (0..p.dim).map(|i| DiffForm::generator(&p, i)).collect();
    for n in 0..=p.hbar_order + 1 {
        let imgs: Vec<PolyVectorField> = cur.iter().map(|e| sharp_image(pi, e)).collect();
        if imgs.iter().all(PolyVectorField::is_zero) {
            break;
        }
        let sign = if n % 2 == 0 { 1 } else { -1 };
        by_power.push(
            imgs.iter()
                .map(|v| v.scale(&CRational::from_int(sign)))
                .collect(),
        );
        cur = imgs.iter().map(|v| b_sharp(b, v)).collect();
    }
    by_power
}

/// Assembles a bivector from the images of the coframe, asserting skewness.
fn bivector_from_rows(rows: &[PolyVectorField]) -> Result<PolyVectorField> {
    let p = *rows[0].profile();
    let mut r = PolyVectorField::zero(&p);
    for i in 0..p.dim {
        let ci = rows[i].linear_comps();
        if !ci[i].is_zero() {
            return Err(Error::Validation(
                "sharp map has a diagonal component".into(),
            ));
        }
        for j in i + 1..p.dim {
            let cj = rows[j].linear_comps();
            if ci[j] != -&cj[i] {
                return Err(Error::Validation("sharp map is not skew".into()));
            }
            r.add_comp(GSet::from_indices(&[i, j]), &ci[j]);
        }
    }
    Ok(r)
}

/// `𝔞(tB, π)` as a polynomial in t at each ℏ-order.
pub fn gauge_flow(b: &DiffForm, pi: &PolyVectorField) -> Result<TPoly<PolyVectorField>> {
    check_closed(b)?;
    check_formal(pi)?;
    let coeffs = neumann_rows(b, pi)
        .iter()
        .map(|rows| bivector_from_rows(rows))
        .collect::<Result<Vec<_>>>()?;
    Ok(TPoly::from_coeffs(pi, coeffs))
}

/// `𝔞(B,π)`, the bivector with `𝔞♯ = π♯ ∘ (id + B♯π♯)⁻¹`.
pub fn gauge_transform(b: &DiffForm, pi: &PolyVectorField) -> Result<PolyVectorField> {
    Ok(gauge_flow(b, pi)?.eval(&CRational::one()))
}

/// `Σ_{i<j} B_{ij} (π_a♯dxⁱ) ∧ (π_b♯dxʲ)`; equals `π♯(B)` when π_a = π_b.
fn sharp_pair(pa: &PolyVectorField, pb: &PolyVectorField, b: &DiffForm) -> PolyVectorField {
    let p = *pa.profile();
    let ia: Vec<PolyVectorField> = (0..p.dim)
        .map(|i| pa.contract(&DiffForm::generator(&p, i)))
        .collect();
    let ib: Vec<PolyVectorField> = (0..p.dim)
        .map(|i| pb.contract(&DiffForm::generator(&p, i)))
        .collect();
    let mut r = PolyVectorField::zero(&p);
    for (s, c) in b.comps() {
        let ix = s.indices();
        if ix.len() != 2 {
            continue;
        }
        r = &r + &ia[ix[0]].wedge(&ib[ix[1]]).scale_series(c);
    }
    r
}

/// Solves `dπ_t/dt = π_t♯(B)`, `π₀ = π`, and returns π₁.
pub fn gauge_transform_ode(b: &DiffForm, pi: &PolyVectorField) -> Result<PolyVectorField> {
    Ok(gauge_transform_ode_flow(b, pi)?.eval(&CRational::one()))
}

pub fn gauge_transform_ode_flow(
    b: &DiffForm,
    pi: &PolyVectorField,
) -> Result<TPoly<PolyVectorField>> {
    check_closed(b)?;
    check_formal(pi)?;
    let init = TPoly::constant(pi);
    solve_fixed_point(&init, init.clone(), |v| {
        Ok(v.bilinear(v, pi, |x, y| sharp_pair(x, y, b)))
    })
}

/// Residual of `d/dt π_t = [π_t, v_t]` with `π_t = 𝔞(t dθ, π)` and `v_t = −π_t♯(θ)`.
pub fn exact_equivalence_residual(
    theta: &DiffForm,
    pi: &PolyVectorField,
) -> Result<TPoly<PolyVectorField>> {
    let b = theta.de_rham();
    let flow = gauge_flow(&b, pi)?;
    let v = flow.map(pi, |x| pi_sharp(x, theta).scale(&CRational::from_int(-1)));
    let rhs = flow.bilinear(&v, pi, |a, b| a.schouten(b));
    Ok(flow.deriv().sub(&rhs))
}

/// The symplectic series ω = π⁻¹, stored shifted: `ℏω = (π/ℏ)⁻¹`, a matrix of ℏ-series.
#[derive(Clone, Debug, PartialEq)]
pub struct OmegaSeries {
    pub shifted: SeriesMatrix,
}

impl OmegaSeries {
    /// ℏω as a 2-form; the coefficient of ℏ^{j+1} is ω_j.
    pub fn shifted_form(&self) -> DiffForm {
        DiffForm::from_matrix(&self.shifted)
    }

    /// Whether every ω_j is closed.
    pub fn is_closed(&self) -> bool {
        self.shifted_form().de_rham().is_zero()
    }
}

/// `ℏω = (π/ℏ)⁻¹`; the top ℏ-order is dropped since it depends on π beyond the profile.
pub fn omega_from_pi(pi: &PolyVectorField) -> Result<OmegaSeries> {
    check_formal(pi)?;
    let p = *pi.profile();
    let q = pi.to_matrix().map(|c| c.div_hbar(1).expect("formal"));
    if q.constant_part().inverse().is_none() {
        return Err(Error::DegeneratePi1);
    }
    let inv = q.inverse()?;
    let n = p.hbar_order;
    Ok(OmegaSeries {
        shifted: inv.map(|c| c.truncate_hbar(n.saturating_sub(1))),
    })
}

/// Inverse of [`omega_from_pi`]: `π = ℏ (ℏω)⁻¹`.
pub fn pi_from_omega(omega: &OmegaSeries) -> Result<PolyVectorField> {
    let f = omega.shifted_form();
    check_closed(&f)?;
    let m = &omega.shifted;
    if m.constant_part().inverse().is_none() {
        return Err(Error::DegenerateOmega);
    }
    let inv = m.inverse()?;
    Ok(PolyVectorField::from_matrix(&inv.map(|c| c.shift_hbar(1))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hseries::HSeries;
    use crate::mono::Exps;
    use crate::profile::Profile;

    fn j_bivector(_p: &Profile, c: &HSeries) -> PolyVectorField {
        PolyVectorField::component(GSet::from_indices(&[0, 1]), c.clone())
    }

    #[test]
    fn two_by_two_oracle() {
        let p = Profile::desk();
        let b = CRational::from_int(3);
        let pi = j_bivector(&p, &HSeries::hbar_pow(&p, 1));
        let bf = DiffForm::component(
            GSet::from_indices(&[0, 1]),
            HSeries::constant(&p, b.clone()),
        );
        // πB = ℏ b J·J = −bℏ, so 𝔞 = ℏ/(1 − bℏ) J
        let mut expect = HSeries::zero(&p);
        for k in 1..=p.hbar_order {
            expect.add_term(k, Exps::ZERO, &b.pow(k - 1));
        }
        let a = gauge_transform(&bf, &pi).unwrap();
        assert_eq!(a, j_bivector(&p, &expect));
        assert_eq!(gauge_transform_ode(&bf, &pi).unwrap(), a);
        assert_eq!(gauge_transform(&DiffForm::zero(&p), &pi).unwrap(), pi);
    }

    #[test]
    fn errors() {
        let p = Profile::desk().with_dim(3);
        let pi = j_bivector(&p, &HSeries::hbar_pow(&p, 1));
        let not_closed = DiffForm::component(GSet::from_indices(&[0, 1]), HSeries::x(&p, 2));
        assert!(matches!(
            gauge_transform(&not_closed, &pi),
            Err(Error::NotClosed(_))
        ));
        let classical = j_bivector(&p, &HSeries::one(&p));
        assert_eq!(
            gauge_transform(&DiffForm::zero(&p), &classical),
            Err(Error::NotFormal)
        );
    }

    #[test]
    fn omega_dictionary() {
        let p = Profile::desk();
        let h = HSeries::hbar_pow(&p, 1);
        // π = (ℏ + αℏ³) J
        let alpha = CRational::from_int(2);
        let c = &h + &HSeries::monomial(&p, 3, Exps::ZERO, alpha.clone());
        let pi = j_bivector(&p, &c);
        let om = omega_from_pi(&pi).unwrap();
        // (1 + αℏ²)⁻¹ on the J⁻¹ = −J entry, i.e. ω¹² = −(1 − αℏ² + α²ℏ⁴ …)
        let mut geo = HSeries::zero(&p);
        let mut k = 0;
        while 2 * k < p.hbar_order {
            geo.add_term(2 * k, Exps::ZERO, &(-alpha.clone()).pow(k));
            k += 1;
        }
        assert_eq!(om.shifted.get(0, 1), &-&geo);
        assert!(om.is_closed());
        assert_eq!(pi_from_omega(&om).unwrap(), pi);
        let degenerate = j_bivector(&p, &HSeries::hbar_pow(&p, 2));
        assert_eq!(omega_from_pi(&degenerate), Err(Error::DegeneratePi1));
    }
}
