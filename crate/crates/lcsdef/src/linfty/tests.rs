use super::*;
use crate::gen::{random_leaf_form, ScalarSpec};
use crate::models;
use crate::ring::PiPolynomial;
use crate::syntax::parse_form;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rnd(ctx: &AlgebroidContext, rng: &mut ChaCha8Rng, deg: usize) -> DifferentialForm {
    let sh = ctx.shape();
    let spec = ScalarSpec::new((1u32 << sh.torus()) - 1).terms(1);
    random_leaf_form(rng, sh, deg, spec, 1)
}

#[test]
fn zambon_kuranishi_value() {
    let ctx = AlgebroidContext::new(&models::zambon()).unwrap();
    let g = models::zambon_gamma1(ctx.shape());
    let half = m2(&g, &g, &ctx).unwrap().scale(&PiPolynomial::ratio(1, 2));
    let expect = parse_form("-4*pi^2*cos(2*pi*y1)*cos(2*pi*y2)*dq1^dq2", ctx.model().roster()).unwrap();
    assert_eq!(half, expect);
    assert!(m1(&g, &ctx).unwrap().is_zero());
}

#[test]
fn covariant_derivative_examples() {
    let ctx = AlgebroidContext::new(&models::zambon()).unwrap();
    let r = ctx.model().roster().clone();
    let cd = covariant_derivative(&models::zambon_gamma1(ctx.shape()), &ctx).unwrap();
    assert_eq!(cd.transverse[0], parse_form("2*pi*cos(2*pi*y1)*dq1", &r).unwrap());
    assert_eq!(cd.transverse[1], parse_form("2*pi*cos(2*pi*y2)*dq2", &r).unwrap());
    let tw = AlgebroidContext::new(&models::twisted_leaf(2, 1, 1)).unwrap();
    let one = DifferentialForm::scalar(FourierScalar::one(tw.shape()));
    let cd = covariant_derivative(&one, &tw).unwrap();
    assert_eq!(cd.leaf[0], DifferentialForm::scalar(FourierScalar::constant(tw.shape(), PiPolynomial::int(2).shift(1))));
    assert!(cd.leaf[1].is_zero());
}

#[test]
fn derived_brackets_reproduce_formulas() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for model in [models::zambon(), models::curved(), models::twisted_leaf(2, 1, 3), models::transverse_lee(2), models::curved_two_leaf(true)] {
        let ctx = AlgebroidContext::new(&model).unwrap();
        for d1 in 0..=2usize {
            let x = rnd(&ctx, &mut rng, d1);
            assert_eq!(m1(&x, &ctx).unwrap(), m1_by_skew(&x, &ctx).unwrap());
            assert_eq!(m1(&x, &ctx).unwrap(), m_derived(std::slice::from_ref(&x), &ctx).unwrap());
            for d2 in 0..=2usize {
                let y = rnd(&ctx, &mut rng, d2);
                assert_eq!(m2(&x, &y, &ctx).unwrap(), m_derived(&[x.clone(), y.clone()], &ctx).unwrap());
            }
        }
    }
}

#[test]
fn relations_hold_through_arity_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for model in [models::zambon(), models::curved(), models::twisted_leaf(2, 1, 3), models::curved_two_leaf(true)] {
        let ctx = AlgebroidContext::new(&model).unwrap();
        for n in 1..=4usize {
            let xs: Vec<_> = (0..n).map(|i| rnd(&ctx, &mut rng, [1, 0, 1, 2][i])).collect();
            assert!(linfty_relation_residual(&xs, &ctx).unwrap().is_zero(), "arity {n}");
        }
    }
}

#[test]
fn flat_models_have_no_higher_brackets() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let ctx = AlgebroidContext::new(&models::zambon()).unwrap();
    let xs: Vec<_> = (0..3).map(|_| rnd(&ctx, &mut rng, 1)).collect();
    assert!(m_higher(&xs, &ctx).unwrap().is_zero());
}

#[test]
fn longhand_oracle_matches_on_one_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for model in [models::curved_two_leaf(false), models::curved_two_leaf(true)] {
        let ctx = AlgebroidContext::new(&model).unwrap();
        for l in 3..=4 {
            let xs: Vec<_> = (0..l).map(|_| rnd(&ctx, &mut rng, 1)).collect();
            assert_eq!(m_higher(&xs, &ctx).unwrap(), m_higher_longhand(&xs, &ctx).unwrap());
        }
        let same = rnd(&ctx, &mut rng, 1);
        let xs = vec![same.clone(), same.clone(), same];
        assert_eq!(m_higher(&xs, &ctx).unwrap(), m_higher_longhand(&xs, &ctx).unwrap());
    }
}

#[test]
fn superfn_bracket_is_graded_antisymmetric_and_jacobi() {
    let sh = Shape::new(1, 1, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let spec = ScalarSpec::new(0b11).terms(1).fiber_degree(1);
    let mk = |rng: &mut ChaCha8Rng, mask: u32, w: i32| {
        let mut s = SuperFn::zero(sh, w);
        s.add_term(mask, &crate::gen::random_scalar(rng, sh, spec));
        s
    };
    let a = mk(&mut rng, 0b0011, 0);
    let b = mk(&mut rng, 0b0100, 1);
    let c = mk(&mut rng, 0b1010, -1);
    let sgn = |x: u32, y: u32| if ((x as i64 - 1) * (y as i64 - 1)).rem_euclid(2) == 0 { -1 } else { 1 };
    assert_eq!(a.bracket(&b), b.bracket(&a).scale_int(sgn(2, 1)));
    assert_eq!(a.bracket(&c), c.bracket(&a).scale_int(sgn(2, 2)));
    // [a,[b,c]] = [[a,b],c] + (−1)^{(|a|−1)(|b|−1)} [b,[a,c]]
    let lhs = a.bracket(&b.bracket(&c));
    let rhs = a.bracket(&b).bracket(&c).add(&b.bracket(&a.bracket(&c)).scale_int(1));
    assert_eq!(lhs, rhs);
}
