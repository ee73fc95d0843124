//! Seeded generators for randomized identity checks. Coefficients are small rationals and
//! x-degrees stay low, so products of a few of them fit the profile without truncation.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::CRational;
use crate::hseries::HSeries;
use crate::matrix::SeriesMatrix;
use crate::mono::{Exps, GSet};
use crate::polyvector::{DiffForm, PolyVectorField};
use crate::profile::Profile;

pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Gen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    pub fn nonzero_int(&mut self, bound: i64) -> i64 {
        loop {
            let n = self.int(-bound, bound);
            if n != 0 {
                return n;
            }
        }
    }

    /// `a/b` with |a| ≤ 3, 1 ≤ b ≤ 3; occasionally with an imaginary part.
    pub fn rational(&mut self) -> CRational {
        let re = CRational::from_frac(self.int(-3, 3), self.int(1, 3));
        if self.rng.gen_bool(0.15) {
            &re + &(&CRational::i() * &CRational::from_frac(self.int(-2, 2), self.int(1, 2)))
        } else {
            re
        }
    }

    pub fn nonzero_rational(&mut self) -> CRational {
        loop {
            let c = self.rational();
            if !c.is_zero() {
                return c;
            }
        }
    }

    pub fn exps(&mut self, dim: usize, max_deg: u32) -> Exps {
        let all = Exps::up_to_degree(dim, max_deg);
        *all.choose(&mut self.rng).expect("nonempty")
    }

    /// `terms` random monomials (merged when they collide) with ℏ-power in `k_lo..=k_hi` and
    /// x-degree ≤ `x_deg`.
    pub fn series(
        &mut self,
        p: &Profile,
        terms: usize,
        k_lo: u32,
        k_hi: u32,
        x_deg: u32,
    ) -> HSeries {
        let mut s = HSeries::zero(p);
        for _ in 0..terms {
            let k = self.rng.gen_range(k_lo..=k_hi.max(k_lo));
            let e = self.exps(p.dim, x_deg);
            let c = self.nonzero_rational();
            s.add_term(k, e, &c);
        }
        s
    }

    /// A function `Σ c x^a` with x-degree ≤ `x_deg`.
    pub fn function(&mut self, p: &Profile, x_deg: u32) -> HSeries {
        self.series(p, 3, 0, 0, x_deg)
    }

    pub fn scalar_series(&mut self, p: &Profile, k_lo: u32, k_hi: u32) -> HSeries {
        self.series(p, 3, k_lo, k_hi, 0)
    }

    /// A bivector in ℏ𝒳² with coefficients of x-degree ≤ `x_deg`.
    pub fn bivector(&mut self, p: &Profile, x_deg: u32) -> PolyVectorField {
        let mut r = PolyVectorField::zero(p);
        for s in GSet::of_size(p.dim, 2) {
            if self.rng.gen_bool(0.8) {
                let c = self.series(p, 3, 1, 2, x_deg);
                r.add_comp(s, &c);
            }
        }
        r
    }

    /// A formal Poisson structure: on ℝ² any bivector; on ℝ³ either `Σ ℏᵏ fₖ ∂₁∧∂₂` or
    /// `φ(|x|²)·ℏ(x₃∂₁∧∂₂ + x₁∂₂∧∂₃ + x₂∂₃∧∂₁)`.
    pub fn poisson(&mut self, p: &Profile, x_deg: u32) -> PolyVectorField {
        match p.dim {
            2 => {
                let c = self.series(p, 3, 1, 3, x_deg);
                PolyVectorField::component(GSet::from_indices(&[0, 1]), c)
            }
            3 => {
                if self.rng.gen_bool(0.5) {
                    let c = self.series(p, 3, 1, 3, x_deg);
                    PolyVectorField::component(GSet::from_indices(&[0, 1]), c)
                } else {
                    let r2 = &(&(&HSeries::x(p, 0) * &HSeries::x(p, 0))
                        + &(&HSeries::x(p, 1) * &HSeries::x(p, 1)))
                        + &(&HSeries::x(p, 2) * &HSeries::x(p, 2));
                    let phi = &HSeries::constant(p, self.nonzero_rational())
                        + &(&r2 * &self.scalar_series(p, 0, 2));
                    let h = HSeries::hbar_pow(p, 1);
                    let mut lp = PolyVectorField::zero(p);
                    lp.add_comp(GSet::from_indices(&[0, 1]), &(&h * &HSeries::x(p, 2)));
                    lp.add_comp(GSet::from_indices(&[1, 2]), &(&h * &HSeries::x(p, 0)));
                    lp.add_comp(GSet::from_indices(&[0, 2]), &-&(&h * &HSeries::x(p, 1)));
                    lp.scale_series(&phi)
                }
            }
            _ => self.bivector(p, 0),
        }
    }

    /// A vector field in ℏ𝒳¹.
    pub fn vector_field(&mut self, p: &Profile, x_deg: u32) -> PolyVectorField {
        let mut r = PolyVectorField::zero(p);
        for i in 0..p.dim {
            let c = self.series(p, 2, 1, 2, x_deg);
            r.add_comp(GSet::single(i), &c);
        }
        r
    }

    pub fn one_form(&mut self, p: &Profile, x_deg: u32) -> DiffForm {
        let mut r = DiffForm::zero(p);
        for i in 0..p.dim {
            let c = self.series(p, 2, 0, 2, x_deg);
            r.add_comp(GSet::single(i), &c);
        }
        r
    }

    /// `dθ` for a random 1-form θ.
    pub fn closed_two_form(&mut self, p: &Profile, x_deg: u32) -> DiffForm {
        self.one_form(p, x_deg + 1).de_rham()
    }

    pub fn constant_two_form(&mut self, p: &Profile) -> DiffForm {
        let mut r = DiffForm::zero(p);
        for s in GSet::of_size(p.dim, 2) {
            r.add_comp(s, &HSeries::constant(p, self.rational()));
        }
        r
    }

    /// `Σ cₖ ℏᵏ J`-type constant antisymmetric matrix with invertible ℏ¹ part.
    pub fn const_poisson_matrix(&mut self, p: &Profile) -> SeriesMatrix {
        let d = p.dim;
        loop {
            let mut m = SeriesMatrix::zero(p, d);
            for i in 0..d {
                for j in i + 1..d {
                    let mut s = HSeries::zero(p);
                    for k in 1..=p.hbar_order.min(4) {
                        if k == 1 || self.rng.gen_bool(0.6) {
                            s.add_term(k, Exps::ZERO, &self.rational());
                        }
                    }
                    m.set(j, i, -&s);
                    m.set(i, j, s);
                }
            }
            let pi1 = m.map(|c| {
                c.div_hbar(1)
                    .map(|q| q.truncate_hbar(0))
                    .unwrap_or_else(|_| HSeries::zero(p))
            });
            if pi1.constant_part().inverse().is_some() {
                return m;
            }
        }
    }

    pub fn bool(&mut self, prob: f64) -> bool {
        self.rng.gen_bool(prob)
    }
}
