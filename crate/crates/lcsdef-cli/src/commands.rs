//! One function per subcommand; each returns a [`Report`].

use std::path::Path;

use lcsdef::bulk::{self, BulkError, BulkOrder2, DeformationDims};
use lcsdef::forms::DifferentialForm;
use lcsdef::gen::{random_leaf_form, ScalarSpec};
use lcsdef::lcps::{validate_structure, Model};
use lcsdef::linfty::{linfty_relation_residual, AlgebroidContext, LinftyError};
use lcsdef::master::{coisotropic_algebraic, coisotropic_power, coordinate_master_residual, graph_coisotropy_residual, random_chart, MasterError};
use lcsdef::mc::{self, CohomologySolveResult, McError, McOutcome};
use lcsdef::ring::RingError;
use lcsdef::syntax::parse_form_of_degree;
use lcsdef::thickening::thicken as thicken_model;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::modelfile::{print_model, Doc, FileError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    File(#[from] FileError),
    #[error("in --gamma1: {0}")]
    Gamma(RingError),
    #[error(transparent)]
    Linfty(#[from] LinftyError),
    #[error(transparent)]
    Master(#[from] MasterError),
    #[error(transparent)]
    Mc(#[from] McError),
    #[error(transparent)]
    Bulk(#[from] BulkError),
    #[error("unsupported model: {0}")]
    Model(#[from] lcsdef::lcps::ModelError),
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

pub struct Check {
    name: String,
    pass: bool,
    detail: String,
}

pub struct Report {
    command: String,
    checks: Vec<Check>,
    notes: Vec<String>,
    data: Value,
}

impl Report {
    fn new(command: &str) -> Self {
        Report { command: command.to_string(), checks: Vec::new(), notes: Vec::new(), data: json!({}) }
    }

    fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, detail: detail.into() });
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn render(&self) -> String {
        let mut out = format!("lcsdef {}\n", self.command);
        for n in &self.notes {
            out.push_str(&format!("  {n}\n"));
        }
        for c in &self.checks {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                out.push_str(&format!("[{tag}] {}\n", c.name));
            } else {
                out.push_str(&format!("[{tag}] {}: {}\n", c.name, c.detail));
            }
        }
        out.push_str(if self.ok() { "status: ok\n" } else { "status: failed\n" });
        out
    }

    pub fn to_json(&self) -> Value {
        let checks: Vec<Value> = self.checks.iter().map(|c| json!({"name": c.name, "pass": c.pass, "detail": c.detail})).collect();
        json!({"command": self.command, "ok": self.ok(), "checks": checks, "notes": self.notes, "data": self.data})
    }
}

fn load_model(path: &Path) -> Result<Model, CliError> {
    Ok(Doc::read(path)?.model()?)
}

fn gamma(src: &str, m: &Model) -> Result<DifferentialForm, CliError> {
    parse_form_of_degree(src, m.roster(), 1).map_err(CliError::Gamma)
}

pub fn check(path: &Path) -> Result<Report, CliError> {
    let m = load_model(path)?;
    let r = validate_structure(&m);
    let mut rep = Report::new("check");
    rep.check("structure", r.is_lcs || r.is_lcps_rank_2k, if r.is_lcs { "l.c.s." } else if r.is_lcps_rank_2k { "l.c.p-s." } else { "neither" });
    rep.check("transverse invariance", r.transverse_invariance_ok, "");
    for (what, witness) in &r.failures {
        rep.note(format!("{what}: {witness}"));
    }
    rep.data = json!({
        "is_lcs": r.is_lcs,
        "is_lcps_rank_2k": r.is_lcps_rank_2k,
        "transverse_invariance_ok": r.transverse_invariance_ok,
        "failures": r.failures.iter().map(|(a, b)| json!({"failure": a, "witness": b})).collect::<Vec<_>>(),
    });
    Ok(rep)
}

pub fn thicken(path: &Path, out: Option<&Path>) -> Result<Report, CliError> {
    let m = load_model(path)?;
    let th = thicken_model(&m, &m.splitting_or_flat())?;
    let text = print_model(&th);
    let mut rep = Report::new("thicken");
    match out {
        Some(p) => {
            std::fs::write(p, &text).map_err(|source| CliError::Write { path: p.display().to_string(), source })?;
            rep.note(format!("wrote {}", p.display()));
        }
        None => rep.note(text.trim_end().replace('\n', "\n  ")),
    }
    let b = th.b();
    let closed = th.omega().twisted_derivative(b).map_err(MasterError::from)?.is_zero();
    rep.check("twisted closed", closed, th.omega().to_pretty(th.roster()));
    let n = th.shape().total() / 2;
    let top = th.omega().form_power(n as u32).map_err(MasterError::from)?;
    let pf = top.coefficient((1u32 << th.shape().total()) - 1).at_zero_fiber();
    let nondeg = pf.as_constant().is_some_and(|c| !c.is_zero());
    rep.check("nondegenerate along the zero section", nondeg, format!("top coefficient at p = 0: {}", pf.to_text(th.roster())));
    rep.data = json!({"model": text});
    Ok(rep)
}

pub fn linfty_check(path: &Path, arity: usize, trials: usize, seed: u64) -> Result<Report, CliError> {
    if !(1..=4).contains(&arity) {
        return Err(CliError::Usage("--arity must be between 1 and 4".into()));
    }
    let m = load_model(path)?;
    let ctx = AlgebroidContext::new(&m)?;
    let sh = m.shape();
    let spec = ScalarSpec::new((1u32 << sh.torus()) - 1).terms(2).max_freq(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = Report::new("linfty-check");
    let mut rows = Vec::new();
    for n in 1..=arity {
        let mut zero = 0;
        for _ in 0..trials {
            let xs: Vec<DifferentialForm> = (0..n)
                .map(|_| {
                    let deg = rng.gen_range(0..=sh.leaf.min(2));
                    random_leaf_form(&mut rng, sh, deg, spec, 2)
                })
                .collect();
            if linfty_relation_residual(&xs, &ctx)?.is_zero() {
                zero += 1;
            }
        }
        rep.check(format!("relation arity {n}"), zero == trials, format!("{zero}/{trials} vanish"));
        rows.push(json!({"arity": n, "vanishing": zero, "trials": trials}));
    }
    rep.data = json!({"seed": seed, "relations": rows});
    Ok(rep)
}

pub fn master_residual(model: &Path, section: &Path, order: usize) -> Result<Report, CliError> {
    let m = load_model(model)?;
    let s = Doc::read(section)?.section(m.roster())?;
    let ctx = AlgebroidContext::new(&m)?;
    let g = graph_coisotropy_residual(&s.jet(), &m, order)?;
    let c = coordinate_master_residual(&s.jet(), &ctx, order)?;
    let r = m.roster();
    let mut rep = Report::new("master-residual");
    let mut rows = Vec::new();
    for n in 0..=order {
        let (gz, cz) = (g[n].is_zero(), c[n].is_zero());
        rep.check(format!("order {n} co-vanishing"), gz == cz, format!("graph {}, coordinate {}", zero_word(gz), zero_word(cz)));
        rows.push(json!({"order": n, "graph": g[n].to_text(r), "coordinate": c[n].to_text(r)}));
    }
    rep.data = json!({"orders": rows});
    Ok(rep)
}

fn zero_word(z: bool) -> &'static str {
    if z {
        "zero"
    } else {
        "nonzero"
    }
}

pub fn grassmann_fuzz(n: usize, k: usize, trials: usize, seed: u64) -> Result<Report, CliError> {
    if 2 * k > 2 * n || k > n {
        return Err(CliError::Usage("need 0 ≤ k ≤ n".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agree = 0;
    let mut coiso = 0;
    for _ in 0..trials {
        let chart = random_chart(&mut rng, n, k);
        let a = coisotropic_algebraic(&chart)?;
        let p = coisotropic_power(&chart)?;
        agree += usize::from(a == p);
        coiso += usize::from(a);
    }
    let mut rep = Report::new("grassmann-fuzz");
    rep.note(format!("{coiso} of {trials} charts coisotropic"));
    rep.check("predicates", agree == trials, format!("agreement {agree}/{trials}"));
    rep.data = json!({"n": n, "k": k, "seed": seed, "trials": trials, "agreement": agree, "coisotropic": coiso});
    Ok(rep)
}

pub fn mc_solve(model: &Path, g1: &str, order: usize) -> Result<Report, CliError> {
    let m = load_model(model)?;
    let g = gamma(g1, &m)?;
    let ctx = AlgebroidContext::new(&m)?;
    let r = m.roster();
    let mut rep = Report::new("mc-solve");
    match mc::mc_solve(&g, order, &ctx)? {
        McOutcome::Solved { series, residuals_vanish } => {
            let terms: Vec<Value> = series.terms.iter().enumerate().map(|(i, t)| json!({"order": i + 1, "gamma": t.to_text(r)})).collect();
            for (i, t) in series.terms.iter().enumerate() {
                rep.note(format!("Γ{} = {}", i + 1, t.to_pretty(r)));
            }
            rep.check(format!("solved through order {order}"), true, "");
            rep.check("Maurer–Cartan residual", residuals_vanish, if residuals_vanish { "vanishes" } else { "nonzero" });
            rep.data = json!({"status": "solved", "series": terms, "residuals_vanish": residuals_vanish});
        }
        McOutcome::Obstructed { certificate, .. } => {
            let sound = mc::verify_certificate(&certificate, ctx.bbar())?;
            rep.note(format!("obstructed at order {}", certificate.order));
            rep.note(format!("witness: {}", certificate.harmonic_witness.to_pretty(r)));
            rep.check("certificate", sound, format!("order {}", certificate.order));
            rep.data = json!({
                "status": "obstructed",
                "order": certificate.order,
                "residual": certificate.residual.to_text(r),
                "witness": certificate.harmonic_witness.to_text(r),
                "modes": certificate.modes,
            });
        }
    }
    Ok(rep)
}

pub fn kuranishi(model: &Path, g1: &str) -> Result<Report, CliError> {
    let m = load_model(model)?;
    let g = gamma(g1, &m)?;
    let ctx = AlgebroidContext::new(&m)?;
    let r = m.roster();
    let k = mc::kuranishi(&g, &ctx)?;
    let mut rep = Report::new("kuranishi");
    rep.note(format!("m2(Γ1,Γ1) = {}", k.m2.to_pretty(r)));
    rep.note(format!("½ m2(Γ1,Γ1) = {}", k.half_m2.to_pretty(r)));
    let verdict = if k.class_vanishes() { "class vanishes" } else { "class nonzero: obstructed at order 2" };
    rep.note(verdict);
    let sound = match &k.class {
        CohomologySolveResult::Solved(x) => x.leafwise_twisted_derivative(ctx.bbar()).map_err(MasterError::from)? == k.half_m2,
        CohomologySolveResult::Obstructed(c) => mc::verify_certificate(c, ctx.bbar())?,
    };
    rep.check("verdict re-verified", sound, verdict);
    rep.data = json!({"m2": k.m2.to_text(r), "half_m2": k.half_m2.to_text(r), "class_vanishes": k.class_vanishes()});
    Ok(rep)
}

fn dims_json(d: &DeformationDims) -> Value {
    json!({
        "truncation": d.truncation,
        "twisted": d.twisted,
        "ideal": d.ideal,
        "omega_class_nonzero": d.omega_class_nonzero,
        "omega_class_nonzero_ideal": d.omega_class_nonzero_ideal,
        "ker_l": d.ker_l,
        "lcs_deformations": d.lcs_deformations,
        "lcps_deformations": d.lcps_deformations,
    })
}

pub fn def_dims(model: &Path, truncation: i32) -> Result<Report, CliError> {
    let m = load_model(model)?;
    let d = bulk::deformation_space_dims(&m, truncation)?;
    let mut rep = Report::new("def-dims");
    rep.note(format!("frequency truncation {truncation}"));
    rep.note(format!("H_b^j: {:?}", d.twisted));
    rep.note(format!("H_b^j of the leaf-vanishing ideal: {:?}", d.ideal));
    rep.note(format!("dim ker L = {}", d.ker_l));
    rep.note(format!("l.c.s. deformations: {}", d.lcs_deformations));
    rep.note(format!("l.c.p-s. deformations: {}", d.lcps_deformations));
    rep.check("computed", true, "");
    rep.data = dims_json(&d);
    Ok(rep)
}

pub fn bulk_check(model: &Path, series: &Path, order: usize) -> Result<Report, CliError> {
    let m = load_model(model)?;
    let s = Doc::read(series)?.series(&m)?;
    let res = bulk::bulk_order_residuals(&s, &m, order)?;
    let direct = bulk::bulk_direct_residuals(&s, &m, order)?;
    let r = m.roster();
    let mut rep = Report::new("bulk-check");
    let mut rows = Vec::new();
    for (x, (power, conformal, graph)) in res.iter().zip(&direct) {
        let two_route = x.power == *power && x.conformal == *conformal && x.graph == *graph;
        rep.check(format!("order {}", x.order), x.vanishes(), "");
        rep.check(format!("order {} two-route agreement", x.order), two_route, "");
        rows.push(json!({
            "order": x.order,
            "power": x.power.to_text(r),
            "lee_closed": x.lee_closed.to_text(r),
            "conformal": x.conformal.to_text(r),
            "graph": x.graph.to_text(r),
        }));
    }
    rep.data = json!({"orders": rows});
    Ok(rep)
}

pub fn zambon() -> Result<Report, CliError> {
    let s = bulk::zambon_scenario()?;
    let m = lcsdef::models::zambon();
    let r = m.roster();
    let mut rep = Report::new("zambon");
    rep.note(format!("½ m2(Γ1,Γ1) = {}", s.kuranishi_rhs.to_pretty(r)));
    rep.note(format!("mc_solve obstructed at order {}: witness {}", s.mc_certificate.order, s.mc_certificate.harmonic_witness.to_pretty(r)));
    rep.note(format!("bulk obstruction at order t^{}: witness {}", s.bulk_certificate.order, s.bulk_certificate.harmonic_witness.to_pretty(r)));
    for (name, pass, detail) in &s.steps {
        rep.check(name.clone(), *pass, detail.clone());
    }
    let bulk_obstructed = matches!(bulk::bulk_order2_obstruction(&lcsdef::models::zambon_gamma1(m.shape()), &m)?, BulkOrder2::Obstructed(_));
    rep.check("bulk obstructed", bulk_obstructed, "");
    rep.data = json!({
        "kuranishi_half_m2": s.kuranishi_rhs.to_text(r),
        "mc_order": s.mc_certificate.order,
        "mc_witness": s.mc_certificate.harmonic_witness.to_text(r),
        "bulk_order": s.bulk_certificate.order,
        "bulk_witness": s.bulk_certificate.harmonic_witness.to_text(r),
    });
    Ok(rep)
}
