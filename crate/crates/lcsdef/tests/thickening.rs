use lcsdef::forms::DifferentialForm;
use lcsdef::gen::{random_scalar, ScalarSpec};
use lcsdef::lcps::Model;
use lcsdef::models;
use lcsdef::ring::{CoordinateRoster, FourierScalar, PiPolynomial, Shape};
use lcsdef::syntax::parse_form;
use lcsdef::thickening::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_splitting(rng: &mut ChaCha8Rng, sh: Shape) -> Splitting {
    let spec = ScalarSpec::new((1u32 << sh.torus()) - 1).terms(1).max_freq(1);
    let r = (0..sh.transverse)
        .map(|_| (0..sh.leaf).map(|_| if rng.gen_bool(0.6) { random_scalar(rng, sh, spec) } else { FourierScalar::zero(sh) }).collect())
        .collect();
    Splitting::new(sh, r).unwrap()
}

fn random_nvf(rng: &mut ChaCha8Rng, sh: Shape, degree: usize) -> NormalValuedForm {
    let spec = ScalarSpec::new((1u32 << sh.torus()) - 1).terms(1).max_freq(1);
    let mut b = NormalValuedForm::zero(sh, degree);
    for mask in (0u32..(1 << sh.transverse)).filter(|m| m.count_ones() as usize == degree) {
        for beta in 0..sh.leaf {
            if rng.gen_bool(0.5) {
                b.add_term(mask, beta, &random_scalar(rng, sh, spec));
            }
        }
    }
    b
}

fn two_torus_model(b_coeff: i64) -> Model {
    let roster = CoordinateRoster::standard(2, 2, false);
    let sh = roster.shape();
    let w = DifferentialForm::from_indices(FourierScalar::one(sh), &[0, 1]);
    let b = if b_coeff == 0 { DifferentialForm::zero(sh, 1) } else { DifferentialForm::from_indices(FourierScalar::int(sh, b_coeff), &[0]) };
    Model::new(roster, w, b, 1).unwrap()
}

fn four_one_model() -> Model {
    let roster = CoordinateRoster::standard(4, 1, false);
    let w = parse_form("dy1^dy2 + dy3^dy4", &roster).unwrap();
    Model::new(roster.clone(), w, DifferentialForm::zero(roster.shape(), 1), 2).unwrap()
}

/// `−2 Σ_{i<j} p_β F_{ij}^β dy^i∧dy^j`: the literal coordinate formula carries the curvature term with the opposite sign.
fn curvature_sign_gap(m: &Model, p: &Splitting) -> DifferentialForm {
    let sh = m.shape().thickened();
    let f = transverse_curvature(p);
    let mut out = DifferentialForm::zero(sh, 2);
    for i in 0..sh.transverse {
        for j in i + 1..sh.transverse {
            for beta in 0..sh.leaf {
                let c = &FourierScalar::fiber_var(sh, sh.torus() + beta) * &f.f(i, j, beta).embed(sh);
                out = &out + &DifferentialForm::from_indices(c.scale_int(-2), &[i, j]);
            }
        }
    }
    out
}

#[test]
fn zambon_thickening_is_canonical() {
    let m = models::zambon();
    let th = thicken(&m, &m.splitting_or_flat()).unwrap();
    let r = th.roster().clone();
    assert_eq!(*th.omega(), parse_form("dy1^dy2 + dq1^dp1 + dq2^dp2", &r).unwrap());
    let theta = build_theta_g(&m, &Splitting::flat(m.shape())).unwrap();
    assert_eq!(theta, parse_form("p1*dq1 + p2*dq2", &r).unwrap());
    assert!(theta.zero_section().is_zero());
}

#[test]
fn theta_for_a_single_splitting_entry() {
    let m = models::zambon();
    let sh = m.shape();
    let mut r = vec![vec![FourierScalar::zero(sh); 2]; 2];
    r[0][0] = FourierScalar::sin_coord(sh, 2);
    let th = build_theta_g(&m, &Splitting::new(sh, r).unwrap()).unwrap();
    let roster = m.roster().thickened();
    assert_eq!(th, parse_form("p1*dq1 + p2*dq2 - p1*sin(2*pi*q1)*dy1", &roster).unwrap());
}

#[test]
fn thickened_forms_are_twisted_closed_and_change_by_exact_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut count = 0;
    for trial in 0..24 {
        let m = match trial % 3 {
            0 => two_torus_model(0),
            1 => two_torus_model(2),
            _ => four_one_model(),
        };
        let sh = m.shape();
        let p0 = random_splitting(&mut rng, sh);
        let p1 = random_splitting(&mut rng, sh);
        let w = build_omega_u(&m, &p1).unwrap();
        let b = m.b().embed(sh.thickened());
        assert!(w.twisted_derivative(&b).unwrap().is_zero(), "trial {trial}");
        assert!(splitting_change_residual(&m, &p0, &p1).unwrap().is_zero(), "trial {trial}");
        assert!(splitting_change_residual(&m, &p0, &p0).unwrap().is_zero());
        assert_eq!(omega_u_discrepancy(&m, &p1).unwrap(), curvature_sign_gap(&m, &p1), "coordinate expression, trial {trial}");
        assert!(lifted_basis_pairings(&m, &p1).unwrap().iter().all(FourierScalar::is_zero), "trial {trial}");
        count += 1;
    }
    assert!(count >= 20);
}

#[test]
fn curvature_definitions_agree_and_are_tensorial() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let sh = Shape::new(3, 2, 0);
    for _ in 0..20 {
        let p = random_splitting(&mut rng, sh);
        assert_eq!(transverse_curvature(&p), curvature_by_bracket(&p));
        let spec = ScalarSpec::new(0b11111).terms(1);
        let (f, g) = (random_scalar(&mut rng, sh, spec), random_scalar(&mut rng, sh, spec));
        let resc = curvature_rescaled(&p, 0, 2, &f, &g);
        let fc = transverse_curvature(&p);
        for (beta, v) in resc.iter().enumerate() {
            assert_eq!(*v, &(&f * &g) * &fc.f(0, 2, beta));
        }
    }
    let flat = Splitting::flat(sh);
    assert!(transverse_curvature(&flat).is_zero());
    let constant = Splitting::new(sh, vec![vec![FourierScalar::int(sh, 2), FourierScalar::zero(sh)]; 3]).unwrap();
    assert!(transverse_curvature(&constant).is_zero());
}

#[test]
fn bianchi_and_square_of_the_differential() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sh = Shape::new(3, 2, 0);
    for _ in 0..20 {
        let p = random_splitting(&mut rng, sh);
        let f = transverse_curvature(&p).0;
        assert!(pi_differential(&f, &p).is_zero());
        let b = random_nvf(&mut rng, sh, 1);
        let dd = pi_differential(&pi_differential(&b, &p), &p);
        assert_eq!(dd, pi_bracket(&f, &b));
    }
}

#[test]
fn transformation_law_for_the_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sh = Shape::new(3, 2, 0);
    for _ in 0..20 {
        let p0 = random_splitting(&mut rng, sh);
        let p1 = random_splitting(&mut rng, sh);
        let b = p1.difference(&p0);
        let f0 = transverse_curvature(&p0).0;
        let f1 = transverse_curvature(&p1).0;
        let rhs = &(&f0 + &pi_differential(&b, &p0)) + &pi_bracket(&b, &b).scale(&PiPolynomial::ratio(1, 2));
        assert_eq!(f1, rhs);
    }
}

#[test]
fn bracket_matches_the_permutation_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sh = Shape::new(3, 2, 0);
    for _ in 0..20 {
        let b = random_nvf(&mut rng, sh, 1);
        let c = random_nvf(&mut rng, sh, 1);
        let br = pi_bracket(&b, &c);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let perm = pi_bracket_by_permutations(&b, &c, &[i, j]);
            for (beta, v) in perm.iter().enumerate() {
                assert_eq!(*v, br.eval(&[i, j], beta));
            }
        }
    }
    // q-independent degree-one coefficients commute
    let mut b = NormalValuedForm::zero(sh, 1);
    b.add_term(1, 0, &FourierScalar::sin_coord(sh, 0));
    b.add_term(2, 1, &FourierScalar::cos_coord(sh, 1));
    assert!(pi_bracket(&b, &b).is_zero());
}
