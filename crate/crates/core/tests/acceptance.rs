//! Acceptance matrix: one PASS/FAIL line per criterion.

use std::process::ExitCode;

use star_forge::coeff::CRational;
use star_forge::report::Section;
use star_forge::star::{ConstPoissonMatrix, StarProduct};
use star_forge::suite;
use star_forge::{Exps, HSeries, Profile};

fn show(s: &Section) {
    for c in &s.checks {
        if !c.passed() {
            eprintln!("    {} -> {}", s.name, c.line());
        }
    }
}

fn main() -> ExitCode {
    let p = Profile::desk();
    let mut all = true;
    let mut report = |n: usize, title: &str, ok: bool, secs: f64| {
        all &= ok;
        println!(
            "criterion {n:>2} {}: {title} ({secs:.1}s)",
            if ok { "PASS" } else { "FAIL" }
        );
    };
    let run = |s: Section| {
        show(&s);
        let ok = s.passed();
        (ok, s.elapsed.as_secs_f64())
    };

    // 1: plus the commutator oracle [x₁,x₂] = 2(ℏ + ℏ³)
    let (ok, t) = run(suite::moyal_suite(&p));
    let star = StarProduct::moyal(&suite::moyal_fixture(&p).unwrap());
    let (x1, x2) = (HSeries::x(&p, 0), HSeries::x(&p, 1));
    let comm = &star.mul(&x1, &x2) - &star.mul(&x2, &x1);
    let oracle = HSeries::from_terms(
        &p,
        [
            (1, Exps::ZERO, CRational::from_int(2)),
            (3, Exps::ZERO, CRational::from_int(2)),
        ],
    );
    report(
        1,
        "Moyal associativity and MC residual",
        ok && comm == oracle,
        t,
    );

    let (ok, t) = run(suite::polyvector_suite(&p, 100));
    report(2, "polyvector identity suite on R2 and R3", ok, t);

    let (ok, t) = run(suite::gauge_suite(&p, 50));
    report(3, "gauge transform vs ODE, Jacobi, group law", ok, t);

    let (ok, t) = run(suite::normalizer_suite(&p, 10));
    report(4, "Moyal normalizer", ok, t);

    // 5: plus the scalar closed form 𝔞 = ℏ/(1 − bℏ)·J
    let (ok, t) = run(suite::bfield_suite(&p));
    let mut closed_ok = true;
    for (a, d) in suite::BFIELD_VALUES {
        let b = CRational::from_frac(a, d);
        let pi = ConstPoissonMatrix::standard(&p, &HSeries::hbar_pow(&p, 1)).unwrap();
        let bm = star_forge::polyvector::DiffForm::component(
            star_forge::GSet::from_indices(&[0, 1]),
            HSeries::constant(&p, b.clone()),
        );
        let eq = star_forge::star::bfield_equivalence(&pi, &bm).unwrap();
        let mut expect = HSeries::zero(&p);
        for k in 1..=p.hbar_order {
            expect.add_term(k, Exps::ZERO, &b.pow(k - 1));
        }
        closed_ok &= eq.target.matrix().get(0, 1) == &expect;
    }
    report(5, "B-field equivalence", ok && closed_ok, t);

    let (ok, t) = run(suite::fedosov_suite(&p));
    report(6, "Fedosov engine", ok, t);

    let (ok, t) = run(suite::ode_suite(&p, 50));
    report(7, "formal ODE suite", ok, t);

    let (ok, t) = run(suite::dgla_suite(&p, 25));
    report(8, "DGLA suite", ok, t);

    let (ok, t) = run(suite::transition_suite(&p));
    report(9, "transition demo", ok, t);

    let (ok, t) = run(suite::stability_suite(&p, 50));
    report(10, "profile stability", ok, t);

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
