//! One line per acceptance criterion, each with its size and wall-clock budget.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use lcsdef::bulk::{bulk_order2_obstruction, BulkOrder2};
use lcsdef::forms::DifferentialForm;
use lcsdef::gen::{random_leaf_form, random_scalar, ScalarSpec};
use lcsdef::lcps::Model;
use lcsdef::linfty::{linfty_relation_residual, AlgebroidContext};
use lcsdef::master::{
    coisotropic_algebraic, coisotropic_power, coordinate_master_residual, first_nonzero_order, graph_coisotropy_residual, grid_charts,
    random_chart, SectionJet,
};
use lcsdef::mc::{self, gauge_shift, kuranishi, leaf_cohomology_dims, leaf_cohomology_dims_brute, mc_solve, McOutcome};
use lcsdef::models;
use lcsdef::ring::{CoordinateRoster, FourierScalar, PiPolynomial, Shape};
use lcsdef::syntax::parse_form;
use lcsdef::thickening::{
    build_omega_u, pi_bracket, pi_bracket_by_permutations, pi_differential, splitting_change_residual, transverse_curvature, NormalValuedForm,
    Splitting,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn torus_spec(sh: Shape) -> ScalarSpec {
    ScalarSpec::new((1u32 << sh.torus()) - 1).terms(2).max_freq(1)
}

fn closed_gamma(m: &Model, ctx: &AlgebroidContext, rng: &mut ChaCha8Rng) -> DifferentialForm {
    let sh = m.shape();
    let f = random_scalar(rng, sh, torus_spec(sh));
    let mut g = gauge_shift(&DifferentialForm::zero(sh, 1), &f, ctx.bbar()).unwrap();
    let ty = ScalarSpec::new((1u32 << sh.transverse) - 1).terms(1).max_freq(1);
    for beta in 0..sh.leaf {
        if sh.transverse > 0 {
            g = &g + &DifferentialForm::from_indices(random_scalar(rng, sh, ty), &[sh.transverse + beta]);
        }
    }
    g
}

fn c1_zambon_bracket() -> Verdict {
    let m = models::zambon();
    let ctx = AlgebroidContext::new(&m).map_err(|e| e.to_string())?;
    let k = kuranishi(&models::zambon_gamma1(m.shape()), &ctx).map_err(|e| e.to_string())?;
    let expected = parse_form("-4*pi^2*cos(2*pi*y1)*cos(2*pi*y2)*dq1^dq2", m.roster()).unwrap();
    ensure(k.half_m2 == expected, format!("got {}", k.half_m2.to_pretty(m.roster())))?;
    Ok(format!("½m₂(Γ₁,Γ₁) = {}", k.half_m2.to_pretty(m.roster())))
}

fn c2_zambon_obstruction() -> Verdict {
    let m = models::zambon();
    let ctx = AlgebroidContext::new(&m).map_err(|e| e.to_string())?;
    let g = models::zambon_gamma1(m.shape());
    let cert = match mc_solve(&g, 3, &ctx).map_err(|e| e.to_string())? {
        McOutcome::Obstructed { certificate, .. } => certificate,
        McOutcome::Solved { .. } => return Err("mc_solve did not obstruct".into()),
    };
    ensure(cert.order == 2, format!("obstructed at order {}", cert.order))?;
    ensure(mc::verify_certificate(&cert, ctx.bbar()).map_err(|e| e.to_string())?, "certificate does not verify")?;
    let bulk = bulk_order2_obstruction(&g, &m).map_err(|e| e.to_string())?;
    let BulkOrder2::Obstructed(bc) = bulk else { return Err("bulk order 2 solvable".into()) };
    ensure(mc::verify_certificate(&bc, ctx.bbar()).map_err(|e| e.to_string())?, "bulk certificate does not verify")?;
    Ok(format!("mc_solve and bulk both certify order 2, modes {:?}", cert.modes))
}

fn c3_grassmann() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let (mut total, mut coiso) = (0usize, 0usize);
    for n in 0..=4 {
        for k in 0..=n {
            for _ in 0..1000 {
                let c = random_chart(&mut rng, n, k);
                let (a, p) = (coisotropic_algebraic(&c).map_err(|e| e.to_string())?, coisotropic_power(&c).map_err(|e| e.to_string())?);
                ensure(a == p, format!("disagreement at n={n} k={k}: {c:?}"))?;
                total += 1;
                coiso += usize::from(a);
            }
        }
    }
    let mut grid = 0usize;
    for n in 0..=2 {
        for k in 0..=n {
            for c in grid_charts(n, k) {
                let (a, p) = (coisotropic_algebraic(&c).map_err(|e| e.to_string())?, coisotropic_power(&c).map_err(|e| e.to_string())?);
                ensure(a == p, format!("grid disagreement at n={n} k={k}: {c:?}"))?;
                grid += 1;
            }
        }
    }
    Ok(format!("{total} random charts ({coiso} coisotropic) and {grid} grid charts agree"))
}

fn c4_relations() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(401);
    let mut count = 0;
    for (name, m) in [("zambon", models::zambon()), ("curved", models::curved_two_leaf(false)), ("constant b̄", models::twisted_leaf(2, 1, 2))] {
        let ctx = AlgebroidContext::new(&m).map_err(|e| e.to_string())?;
        if name == "constant b̄" {
            ensure(!ctx.bbar().is_zero(), "b̄ vanishes")?;
        }
        let sh = m.shape();
        for n in 1..=4usize {
            for t in 0..50 {
                let xs: Vec<DifferentialForm> = (0..n)
                    .map(|_| {
                        let d = rng.gen_range(0..=sh.leaf.min(2));
                        random_leaf_form(&mut rng, sh, d, torus_spec(sh), 2)
                    })
                    .collect();
                let r = linfty_relation_residual(&xs, &ctx).map_err(|e| e.to_string())?;
                ensure(r.is_zero(), format!("{name}: arity {n}, tuple {t}"))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} tuples, arities 1-4, three models"))
}

fn random_splitting(rng: &mut ChaCha8Rng, sh: Shape) -> Splitting {
    let spec = ScalarSpec::new((1u32 << sh.torus()) - 1).terms(1).max_freq(1);
    let r = (0..sh.transverse)
        .map(|_| (0..sh.leaf).map(|_| if rng.gen_bool(0.6) { random_scalar(rng, sh, spec) } else { FourierScalar::zero(sh) }).collect())
        .collect();
    Splitting::new(sh, r).unwrap()
}

fn base_model(transverse: usize, leaf: usize, omega: &str, b: &str, k: usize) -> Model {
    let roster = CoordinateRoster::standard(transverse, leaf, false);
    let w = parse_form(omega, &roster).unwrap();
    let b = parse_form(b, &roster).unwrap();
    let b = if b.degree() == 0 { DifferentialForm::zero(roster.shape(), 1) } else { b };
    Model::new(roster, w, b, k).unwrap()
}

fn c5_thickening() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    let ms = [
        base_model(2, 2, "dy1^dy2", "0", 1),
        base_model(2, 2, "dy1^dy2", "2*dy1", 1),
        base_model(4, 1, "dy1^dy2 + dy3^dy4", "0", 2),
        base_model(2, 1, "dy1^dy2", "dy2", 1),
    ];
    let mut count = 0;
    for t in 0..24 {
        let m = &ms[t % ms.len()];
        let sh = m.shape();
        let (p0, p1) = (random_splitting(&mut rng, sh), random_splitting(&mut rng, sh));
        let w = build_omega_u(m, &p1).map_err(|e| e.to_string())?;
        let b = m.b().embed(sh.thickened());
        ensure(w.twisted_derivative(&b).map_err(|e| e.to_string())?.is_zero(), format!("d^b ω_U ≠ 0 in triple {t}"))?;
        ensure(splitting_change_residual(m, &p0, &p1).map_err(|e| e.to_string())?.is_zero(), format!("splitting change in triple {t}"))?;
        count += 1;
    }
    Ok(format!("{count} (model, Π₀, Π) triples"))
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

fn c6_curvature() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(601);
    let sh = Shape::new(3, 2, 0);
    let half = PiPolynomial::ratio(1, 2);
    for t in 0..24 {
        let (p0, p1) = (random_splitting(&mut rng, sh), random_splitting(&mut rng, sh));
        let f0 = transverse_curvature(&p0).0;
        ensure(pi_differential(&f0, &p0).is_zero(), format!("Bianchi, pair {t}"))?;
        let b = random_nvf(&mut rng, sh, 1);
        ensure(pi_differential(&pi_differential(&b, &p0), &p0) == pi_bracket(&f0, &b), format!("(d^Π)² ≠ [F,·], pair {t}"))?;
        let diff = p1.difference(&p0);
        let law = &(&f0 + &pi_differential(&diff, &p0)) + &pi_bracket(&diff, &diff).scale(&half);
        ensure(transverse_curvature(&p1).0 == law, format!("transformation law, pair {t}"))?;
        let c = random_nvf(&mut rng, sh, 1);
        let br = pi_bracket(&b, &c);
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            for (beta, v) in pi_bracket_by_permutations(&b, &c, &[i, j]).iter().enumerate() {
                ensure(*v == br.eval(&[i, j], beta), format!("bracket vs permutations, pair {t}"))?;
            }
        }
    }
    Ok("24 pairs: Bianchi, (d^Π)²B = [F,B], F_Π = F_Π₀ + d^Π₀B + ½[B,B], permutation bracket".into())
}

fn c7_master() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(701);
    let mut count = 0;
    let mut first = [0usize; 5];
    for m in [models::zambon(), models::curved(), models::curved_two_leaf(false)] {
        let ctx = AlgebroidContext::new(&m).map_err(|e| e.to_string())?;
        let sh = m.shape();
        for t in 0..8 {
            let jet = if t % 2 == 0 {
                SectionJet::new((0..3).map(|_| random_leaf_form(&mut rng, sh, 1, torus_spec(sh), 2)).collect())
            } else {
                match mc_solve(&closed_gamma(&m, &ctx, &mut rng), 3, &ctx).map_err(|e| e.to_string())? {
                    McOutcome::Solved { series, .. } | McOutcome::Obstructed { series, .. } => series.jet(),
                }
            };
            let g = graph_coisotropy_residual(&jet, &m, 3).map_err(|e| e.to_string())?;
            let c = coordinate_master_residual(&jet, &ctx, 3).map_err(|e| e.to_string())?;
            for n in 0..=3 {
                ensure(first_nonzero_order(&g[..=n]) == first_nonzero_order(&c[..=n]), format!("section {count} disagrees at ε^{n}"))?;
            }
            first[first_nonzero_order(&g).unwrap_or(4)] += 1;
            count += 1;
        }
    }
    ensure(first[4] > 0 && first[1] > 0, format!("degenerate sample {first:?}"))?;
    Ok(format!("{count} sections, first nonzero order histogram {first:?}"))
}

fn c8_twisted() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(801);
    let mut count = 0;
    for (m, num, den) in [(1, 1, 3), (2, 1, 3), (2, 3, 5), (3, 1, 2)] {
        let model = models::twisted_leaf(m, num, den);
        let ctx = AlgebroidContext::new(&model).map_err(|e| e.to_string())?;
        let sh = model.shape();
        for _ in 0..3 {
            let f = random_scalar(&mut rng, sh, torus_spec(sh));
            let g = gauge_shift(&DifferentialForm::zero(sh, 1), &f, ctx.bbar()).map_err(|e| e.to_string())?;
            ensure(g.leafwise_twisted_derivative(ctx.bbar()).unwrap().is_zero(), "Γ₁ not closed")?;
            match mc_solve(&g, 4, &ctx).map_err(|e| e.to_string())? {
                McOutcome::Solved { series, residuals_vanish } => {
                    ensure(residuals_vanish, "mc_solve residual flag")?;
                    for n in 1..=4 {
                        ensure(mc::mc_residual_order(n, &series, &ctx).map_err(|e| e.to_string())?.is_zero(), format!("residual at order {n}"))?;
                    }
                }
                McOutcome::Obstructed { certificate, .. } => return Err(format!("obstructed at order {}", certificate.order)),
            }
            count += 1;
        }
    }
    Ok(format!("{count} closed Γ₁ solved through order 4"))
}

fn c9_cohomology() -> Verdict {
    let mut checked = 0;
    for m in 1..=3usize {
        let binom: Vec<usize> = (0..=m).map(|j| (0..j).fold(1, |a, i| a * (m - i) / (i + 1))).collect();
        let zero = vec![PiPolynomial::zero(); m];
        let mut lee = zero.clone();
        lee[0] = PiPolynomial::ratio(2, 3).shift(1);
        for t in 1..=2 {
            let (d0, d1) = (leaf_cohomology_dims(&zero, t), leaf_cohomology_dims(&lee, t));
            ensure(d0 == binom, format!("m={m} t={t}: {d0:?}"))?;
            ensure(d1 == vec![0; m + 1], format!("m={m} t={t} twisted: {d1:?}"))?;
            if m + t as usize <= 4 {
                ensure(leaf_cohomology_dims_brute(&zero, t) == binom, format!("brute force m={m} t={t}"))?;
                ensure(leaf_cohomology_dims_brute(&lee, t) == vec![0; m + 1], format!("brute force twisted m={m} t={t}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("m ≤ 3, truncations 1-2; {checked} cases against the brute-force complex"))
}

fn c10_gauge() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    let mut verdicts = [0usize; 2];
    for m in [models::zambon(), models::curved_two_leaf(false)] {
        let ctx = AlgebroidContext::new(&m).map_err(|e| e.to_string())?;
        let sh = m.shape();
        for t in 0..12 {
            let g = if t % 3 == 0 { models::zambon_gamma1(sh) } else { closed_gamma(&m, &ctx, &mut rng) };
            let f = random_scalar(&mut rng, sh, torus_spec(sh));
            let a = kuranishi(&g, &ctx).map_err(|e| e.to_string())?.class_vanishes();
            let b = kuranishi(&gauge_shift(&g, &f, ctx.bbar()).unwrap(), &ctx).map_err(|e| e.to_string())?.class_vanishes();
            ensure(a == b, format!("verdict changed under gauge, pair {t}"))?;
            verdicts[usize::from(a)] += 1;
        }
    }
    ensure(verdicts[0] > 0 && verdicts[1] > 0, format!("only one verdict seen {verdicts:?}"))?;
    Ok(format!("24 (Γ₁, f) pairs, verdicts obstructed/unobstructed = {}/{}", verdicts[0], verdicts[1]))
}

/// The criteria share one core, so they run one at a time for honest timings.
static SERIAL: Mutex<()> = Mutex::new(());

fn run(name: &str, f: fn() -> Verdict, budget: u64) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let verdict = f();
    let took = start.elapsed();
    let line = match &verdict {
        Ok(d) if took <= Duration::from_secs(budget) => format!("[PASS] criterion {name}: {d}"),
        Ok(d) => format!("[FAIL] criterion {name}: {d}; over budget"),
        Err(e) => format!("[FAIL] criterion {name}: {e}"),
    };
    println!("{line} ({:.2} s, budget {budget} s)", took.as_secs_f64());
    assert!(line.starts_with("[PASS]"), "{line}");
}

#[test]
fn criterion_01_zambon_bracket_is_exact() {
    run("1 zambon bracket", c1_zambon_bracket, 5);
}

#[test]
fn criterion_02_order_two_obstruction_certificates() {
    run("2 order-2 obstruction certificates", c2_zambon_obstruction, 10);
}

#[test]
fn criterion_03_coisotropy_predicates_agree() {
    run("3 coisotropy predicates agree", c3_grassmann, 60);
}

#[test]
fn criterion_04_linfty_relations_vanish() {
    run("4 L∞ relations", c4_relations, 300);
}

#[test]
fn criterion_05_thickening_closed_and_splitting_independent() {
    run("5 thickening closed and splitting independent", c5_thickening, 60);
}

#[test]
fn criterion_06_curvature_identities() {
    run("6 curvature identities", c6_curvature, 60);
}

#[test]
fn criterion_07_master_residuals_co_vanish() {
    run("7 master residuals co-vanish", c7_master, 120);
}

#[test]
fn criterion_08_twisted_leaves_solve_to_order_four() {
    run("8 twisted leaves solve to order 4", c8_twisted, 60);
}

#[test]
fn criterion_09_leafwise_cohomology_dimensions() {
    run("9 leafwise cohomology dimensions", c9_cohomology, 60);
}

#[test]
fn criterion_10_kuranishi_gauge_invariance() {
    run("10 Kuranishi gauge invariance", c10_gauge, 60);
}
