use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{
    apply_curvature, einstein_curvature_blocks, einstein_residual, holomorphic_model, rng_for, CheckResult, Comparison, SampleSet, Suite,
    VerifyConfig,
};
use crate::bundle::{canonical_form, lift_blocks, metric_full, PhasePoint};
use crate::connection::{
    adapted_connection_at, conn_coeffs_expanded, conn_coeffs_generic, curvature_blocks, curvature_fd_oracle,
    gamma_and_diffs, koszul_oracle, metric_compatibility_residual, nabla_j_residual, ricci_blocks, ricci_closed_forms,
    ricci_coefficients, ricci_terms, torsion_residual,
};
use crate::error::{Error, Result};
use crate::fd;
use crate::nijenhuis::{
    integrability_verdict, j_coord, nijenhuis_analytic, nijenhuis_oracle_components,
};
use crate::profile::{
    closed_form_vw, einstein_u, integrability_scalar, ode_relative_residual, ode_residual, v_from_u, w_from_uv,
    EinsteinParams, LiftProfile, UProfile, VRule,
};
use crate::spaceform::SpaceForm;
use crate::tensor::{Matrix, Tensor4, Vector};

/// Fraction of `A^2` kept between difference-oracle samples and the tube wall.
pub const ORACLE_TUBE_MARGIN: f64 = 0.1;

struct Acc {
    max: f64,
    min: f64,
    sum: f64,
    count: usize,
    nan: bool,
    skipped: usize,
}

impl Acc {
    fn new() -> Self {
        Self { max: f64::NEG_INFINITY, min: f64::INFINITY, sum: 0.0, count: 0, nan: false, skipped: 0 }
    }

    fn push(&mut self, x: f64) {
        if x.is_nan() {
            self.nan = true;
        }
        self.max = self.max.max(x);
        self.min = self.min.min(x);
        self.sum += x;
        self.count += 1;
    }

    /// Records `f`'s value; points outside the admissible domain are skipped.
    fn record(&mut self, r: Result<f64>) -> Result<()> {
        match r {
            Ok(x) => self.push(x),
            Err(e) if skippable(&e) => self.skipped += 1,
            Err(e) => return Err(e),
        }
        Ok(())
    }
}

fn skippable(e: &Error) -> bool {
    matches!(
        e,
        Error::Inadmissible { .. } | Error::Singular { .. } | Error::OutsideTube { .. } | Error::UseGeneric | Error::NotPositiveDefinite
    )
}

struct Check {
    suite: Suite,
    name: &'static str,
    statement: &'static str,
    tolerance: f64,
    comparison: Comparison,
}

fn finish(c: Check, acc: &Acc, mut notes: Vec<String>) -> CheckResult {
    let statistic = match c.comparison {
        Comparison::Below => acc.max,
        Comparison::Above => acc.min,
    };
    let ok = !acc.nan
        && acc.count > 0
        && match c.comparison {
            Comparison::Below => statistic < c.tolerance,
            Comparison::Above => statistic > c.tolerance,
        };
    if acc.skipped > 0 {
        notes.push(format!("{} evaluations skipped outside the admissible domain", acc.skipped));
    }
    if acc.count == 0 {
        notes.push("no admissible evaluations".to_string());
    }
    if acc.nan {
        notes.push("non-finite residual encountered".to_string());
    }
    CheckResult {
        suite: c.suite,
        name: c.name.to_string(),
        statement: c.statement.to_string(),
        max_residual: if acc.count == 0 { f64::NAN } else { statistic },
        mean_residual: if acc.count == 0 { f64::NAN } else { acc.sum / acc.count as f64 },
        tolerance: c.tolerance,
        comparison: c.comparison,
        samples: acc.count,
        passed: ok,
        notes,
    }
}

struct Ctx<'a> {
    cfg: &'a VerifyConfig,
    base: &'a SpaceForm,
    params: &'a EinsteinParams,
    einstein: LiftProfile,
    samples: &'a SampleSet,
}

impl Ctx<'_> {
    fn points(&self) -> &[PhasePoint] {
        &self.samples.points
    }

    /// First `k` samples far enough from the tube wall for difference oracles.
    fn oracle_set(&self, k: usize) -> Vec<(&PhasePoint, f64)> {
        let (a, c) = (self.params.a, self.c());
        self.samples
            .points
            .iter()
            .zip(self.samples.t.iter().copied())
            .filter(|&(_, t)| a * a - 2.0 * c * t >= ORACLE_TUBE_MARGIN * a * a)
            .take(k)
            .collect()
    }

    fn oracle_points(&self) -> Vec<&PhasePoint> {
        self.oracle_set(self.cfg.oracle_points).into_iter().map(|(p, _)| p).collect()
    }

    fn curvature_oracle_points(&self) -> Vec<&PhasePoint> {
        self.oracle_set(self.cfg.curvature_oracle_points).into_iter().map(|(p, _)| p).collect()
    }

    fn oracle_notes(&self) -> Vec<String> {
        if self.c() > 0.0 {
            vec![format!("difference oracles use samples with A^2 - 2ct >= {ORACLE_TUBE_MARGIN} A^2")]
        } else {
            Vec::new()
        }
    }

    fn rng(&self, suite: Suite) -> ChaCha8Rng {
        rng_for(self.cfg.sample.seed, 1 + suite as u64)
    }

    fn c(&self) -> f64 {
        self.base.curvature()
    }

    /// Upper end of the profile-level `t` grid.
    fn grid_bound(&self) -> f64 {
        if self.c() > 0.0 {
            0.9 * self.params.t_max()
        } else {
            100.0
        }
    }

    fn grid(&self) -> Vec<f64> {
        let m = self.cfg.grid_points;
        let b = self.grid_bound();
        (0..m).map(|k| b * k as f64 / (m - 1) as f64).collect()
    }
}

fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> Vector {
    Vector::from_fn(m, |_, _| rng.random_range(-1.0..=1.0))
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

pub fn run_suite(
    suite: Suite,
    cfg: &VerifyConfig,
    base: &SpaceForm,
    params: &EinsteinParams,
    samples: &SampleSet,
) -> Result<Vec<CheckResult>> {
    let ctx = Ctx { cfg, base, params, einstein: LiftProfile::einstein(params), samples };
    match suite {
        Suite::AlmostKaehler => almost_kaehler(&ctx),
        Suite::Integrability => integrability(&ctx),
        Suite::Connection => connection(&ctx),
        Suite::Ricci => ricci(&ctx),
        Suite::Einstein => einstein(&ctx),
        Suite::Holomorphic => holomorphic(&ctx),
        Suite::Ode => ode(&ctx),
    }
}

fn random_profile(rng: &mut ChaCha8Rng, ctx: &Ctx<'_>) -> LiftProfile {
    let c = ctx.c();
    match rng.random_range(0..3u8) {
        0 => ctx.einstein,
        1 => LiftProfile::new(
            UProfile::Linear { a0: rng.random_range(0.5..2.0), a1: rng.random_range(0.0..1.0) },
            VRule::Constant(rng.random_range(0.0..0.5)),
            c,
        ),
        _ => LiftProfile::new(
            UProfile::Sqrt { a: rng.random_range(0.5..2.0), b: rng.random_range(0.0..2.0) },
            VRule::Constant(rng.random_range(0.0..0.5)),
            c,
        ),
    }
}

/// `φ` in coordinates, `M J` with `M` the coordinate metric.
fn phi_coord(base: &SpaceForm, profile: &LiftProfile, x: &[f64]) -> Result<Matrix> {
    let pt = PhasePoint::from_coords(x)?;
    Ok(metric_full(base, profile, &pt)? * j_coord(base, profile, x)?)
}

fn almost_kaehler(ctx: &Ctx<'_>) -> Result<Vec<CheckResult>> {
    let s = Suite::AlmostKaehler;
    let tol = &ctx.cfg.tolerances;
    let n = ctx.base.dim();
    let mut rng = ctx.rng(s);
    let (mut herm, mut jj, mut canon, mut indep, mut closed) = (Acc::new(), Acc::new(), Acc::new(), Acc::new(), Acc::new());
    let omega = canonical_form(n);
    for (idx, pt) in ctx.points().iter().enumerate() {
        let prof = random_profile(&mut rng, ctx);
        let other = random_profile(&mut rng, ctx);
        let x = random_vector(&mut rng, 2 * n);
        let y = random_vector(&mut rng, 2 * n);
        let blocks = match lift_blocks(ctx.base, &prof, pt) {
            Ok(b) => b,
            Err(e) if skippable(&e) => {
                herm.skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let g = blocks.adapted_metric();
        let j = blocks.j_adapted();
        let ip = |a: &Vector, b: &Vector| a.dot(&(&g * b));
        let (jx, jy) = (&j * &x, &j * &y);
        herm.push((ip(&jx, &jy) - ip(&x, &y)).abs() / libm::sqrt(ip(&x, &x) * ip(&y, &y)));
        let jmax = j.abs().max();
        jj.push((&j * &j + Matrix::identity(2 * n, 2 * n)).abs().max() / (jmax * jmax).max(1.0));

        let coords = pt.coords();
        let m = metric_full(ctx.base, &prof, pt)?;
        let jc = j_coord(ctx.base, &prof, &coords)?;
        canon.push((&m * &jc - &omega).abs().max() / (m.abs().max() * jc.abs().max()).max(1.0));
        indep.record(phi_coord(ctx.base, &other, &coords).map(|phi2| (phi2 - &m * &jc).abs().max()))?;

        if idx < ctx.cfg.oracle_points {
            let field = |y: &[f64]| -> Result<Vec<f64>> { Ok(phi_coord(ctx.base, &prof, y)?.as_slice().to_vec()) };
            let dim = 2 * n;
            let mut d = Vec::with_capacity(dim);
            for a in 0..dim {
                d.push(fd::partial(&field, &coords, a, ctx.cfg.fd_step)?);
            }
            let mut worst = 0.0f64;
            for a in 0..dim {
                for b in 0..dim {
                    for c in 0..dim {
                        // column-major: φ_bc at b + dim * c
                        let v = d[a][b + dim * c] + d[b][c + dim * a] + d[c][a + dim * b];
                        worst = worst.max(v.abs());
                    }
                }
            }
            closed.push(worst);
        }
    }
    Ok(vec![
        finish(
            Check { suite: s, name: "hermitian_compatibility", statement: "G(JX, JY) = G(X, Y) for random vectors and random admissible profiles (relative)", tolerance: tol.hermitian, comparison: Comparison::Below },
            &herm,
            vec![],
        ),
        finish(
            Check { suite: s, name: "j_squared", statement: "J^2 = -I (relative to |J|^2)", tolerance: tol.hermitian, comparison: Comparison::Below },
            &jj,
            vec![],
        ),
        finish(
            Check { suite: s, name: "fundamental_form_canonical", statement: "phi(X, Y) = G(X, JY) has the constant matrix of dp ^ dq in coordinates", tolerance: tol.hermitian, comparison: Comparison::Below },
            &canon,
            vec![],
        ),
        finish(
            Check { suite: s, name: "fundamental_form_profile_independent", statement: "phi is the same for two unrelated admissible profiles at each point", tolerance: tol.hermitian, comparison: Comparison::Below },
            &indep,
            vec![],
        ),
        finish(
            Check { suite: s, name: "fundamental_form_closed", statement: "d phi = 0 by central differences of the coordinate components", tolerance: tol.closedness, comparison: Comparison::Below },
            &closed,
            vec!["difference noise floor of order 1e-11".to_string()],
        ),
    ])
}

fn integrability(ctx: &Ctx<'_>) -> Result<Vec<CheckResult>> {
    let s = Suite::Integrability;
    let tol = &ctx.cfg.tolerances;
    let c = ctx.c();
    let h = ctx.cfg.fd_step;
    let shifted = |dv: f64| LiftProfile::new(ctx.einstein.u, VRule::Shifted(dv), c);
    let witness_profile = shifted(0.05);

    let (mut closed, mut scalar, mut agree, mut witness, mut zero) = (Acc::new(), Acc::new(), Acc::new(), Acc::new(), Acc::new());
    for pt in ctx.points() {
        closed.record(nijenhuis_analytic(ctx.base, &ctx.einstein, pt).map(|e| e.max_abs))?;
        scalar.record(lift_blocks(ctx.base, &ctx.einstein, pt).map(|b| {
            (integrability_scalar(&b.values.u, b.values.v.f, b.t) - c).abs()
        }))?;
        let origin = PhasePoint::new(pt.q.clone(), vec![0.0; pt.dim()])?;
        zero.record(nijenhuis_analytic(ctx.base, &witness_profile, &origin).map(|e| e.max_abs))?;
    }
    let t_hi = ctx.samples.t_range.1;
    let mut witness_points = 0usize;
    for (pt, t) in ctx.oracle_set(ctx.cfg.oracle_points) {
        for prof in [&ctx.einstein, &witness_profile] {
            let r = nijenhuis_analytic(ctx.base, prof, pt).and_then(|an| {
                let or = nijenhuis_oracle_components(ctx.base, prof, pt, h)?;
                Ok((an.max_abs_diff(&or).max(or.off_block), or.max_abs))
            });
            match r {
                Ok((d, mag)) => {
                    agree.push(d);
                    if core::ptr::eq(prof, &witness_profile) && t >= 0.25 * t_hi {
                        witness.push(mag);
                        witness_points += 1;
                    }
                }
                Err(e) if skippable(&e) => agree.skipped += 1,
                Err(e) => return Err(e),
            }
        }
    }
    let mut flips = Acc::new();
    let mut notes = Vec::new();
    let base_verdict = integrability_verdict(ctx.base, &ctx.einstein, ctx.points(), tol.nijenhuis);
    if let Ok(v) = &base_verdict {
        notes.push(format!("unperturbed verdict: integrable = {}", v.integrable));
    }
    for dv in [0.05, -0.05] {
        let r = integrability_verdict(ctx.base, &shifted(dv), ctx.points(), tol.nijenhuis);
        flips.record(r.map(|v| v.max_abs))?;
        if base_verdict.as_ref().map(|v| !v.integrable).unwrap_or(true) {
            flips.nan = true;
        }
    }
    Ok(vec![
        finish(
            Check { suite: s, name: "nijenhuis_closed_form", statement: "closed-form Nijenhuis components vanish for the integrable v on a space form", tolerance: tol.nijenhuis, comparison: Comparison::Below },
            &closed,
            vec![],
        ),
        finish(
            Check { suite: s, name: "integrability_scalar", statement: "v(2tu' - u) + uu' = c", tolerance: tol.scalar_identity, comparison: Comparison::Below },
            &scalar,
            vec![],
        ),
        finish(
            Check { suite: s, name: "nijenhuis_zero_section", statement: "all Nijenhuis components vanish at p = 0 for any profile", tolerance: tol.nijenhuis, comparison: Comparison::Below },
            &zero,
            vec![],
        ),
        finish(
            Check { suite: s, name: "nijenhuis_oracle_agreement", statement: "closed-form Nijenhuis components equal [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y] by differences, integrable and perturbed v", tolerance: tol.finite_difference, comparison: Comparison::Below },
            &agree,
            ctx.oracle_notes(),
        ),
        finish(
            Check { suite: s, name: "nonintegrability_witness", statement: "with v shifted by 0.05 the difference-evaluated Nijenhuis tensor is nonzero (smallest magnitude reported)", tolerance: tol.witness, comparison: Comparison::Above },
            &witness,
            [vec![format!("{witness_points} points with t >= {:.3}", 0.25 * t_hi)], ctx.oracle_notes()].concat(),
        ),
        finish(
            Check { suite: s, name: "perturbed_verdict_flips", statement: "the integrability verdict turns false when v is shifted by +0.05 or -0.05 (smallest max-norm reported)", tolerance: tol.nijenhuis, comparison: Comparison::Above },
            &flips,
            notes,
        ),
    ])
}

fn connection_profiles(ctx: &Ctx<'_>) -> [(&'static str, LiftProfile); 3] {
    let c = ctx.c();
    [
        ("einstein", ctx.einstein),
        ("u = 2 + t, integrable v", LiftProfile::integrable(UProfile::Linear { a0: 2.0, a1: 1.0 }, c)),
        ("u = 1 + t/2, v = 0.1", LiftProfile::new(UProfile::Linear { a0: 1.0, a1: 0.5 }, VRule::Constant(0.1), c)),
    ]
}

fn connection(ctx: &Ctx<'_>) -> Result<Vec<CheckResult>> {
    let s = Suite::Connection;
    let tol = &ctx.cfg.tolerances;
    let h = ctx.cfg.fd_step;
    let profiles = connection_profiles(ctx);
    let (mut koszul, mut expanded, mut torsion, mut compat, mut nabla_j, mut curv, mut anti) =
        (Acc::new(), Acc::new(), Acc::new(), Acc::new(), Acc::new(), Acc::new(), Acc::new());
    for (_, prof) in &profiles {
        for pt in ctx.points() {
            expanded.record(conn_coeffs_expanded(ctx.base, prof, pt).and_then(|e| {
                let g = conn_coeffs_generic(ctx.base, prof, pt)?;
                Ok(rel(e.max_abs_diff(&g), g.max_abs()))
            }))?;
            anti.record(curvature_blocks(ctx.base, prof, pt).map(|k| k.antisymmetry_defect()))?;
        }
        for pt in ctx.oracle_points() {
            koszul.record(koszul_oracle(ctx.base, prof, pt, h).and_then(|table| {
                let an = adapted_connection_at(ctx.base, prof, pt)?;
                Ok(rel(table.max_abs_diff(&an), an.max_abs()))
            }))?;
            torsion.record(torsion_residual(ctx.base, prof, pt, h))?;
            compat.record(metric_compatibility_residual(ctx.base, prof, pt, h))?;
            if prof.is_integrable() {
                nabla_j.record(nabla_j_residual(ctx.base, prof, pt, h))?;
            }
        }
    }
    let non_einstein = &profiles[2].1;
    for pt in ctx.curvature_oracle_points() {
        curv.record(curvature_blocks(ctx.base, non_einstein, pt).and_then(|k| {
            let full = k.full();
            let oracle = curvature_fd_oracle(ctx.base, non_einstein, pt, 1e-4, h)?;
            Ok(rel(oracle.max_abs_diff(&full), full.max_abs()))
        }))?;
    }
    let names: Vec<String> = profiles.iter().map(|(n, _)| n.to_string()).collect();
    let profile_note = format!("profiles: {}", names.join("; "));
    Ok(vec![
        finish(
            Check { suite: s, name: "koszul_agreement", statement: "Q, P, S and the base symbols reproduce the connection of the coordinate metric obtained by differences (relative)", tolerance: tol.finite_difference, comparison: Comparison::Below },
            &koszul,
            [vec![profile_note.clone()], ctx.oracle_notes()].concat(),
        ),
        finish(
            Check { suite: s, name: "expanded_forms", statement: "expanded Q, P, S in terms of u, v, w equal the generic forms (relative)", tolerance: tol.expanded_forms, comparison: Comparison::Below },
            &expanded,
            vec![profile_note.clone()],
        ),
        finish(
            Check { suite: s, name: "torsion_free", statement: "nabla_X Y - nabla_Y X = [X, Y] on adapted basis fields", tolerance: tol.finite_difference, comparison: Comparison::Below },
            &torsion,
            ctx.oracle_notes(),
        ),
        finish(
            Check { suite: s, name: "metric_compatibility", statement: "X(G(Y, Z)) = G(nabla_X Y, Z) + G(Y, nabla_X Z) on adapted basis fields", tolerance: tol.finite_difference, comparison: Comparison::Below },
            &compat,
            ctx.oracle_notes(),
        ),
        finish(
            Check { suite: s, name: "nabla_j", statement: "nabla J = 0 for integrable profiles", tolerance: tol.finite_difference, comparison: Comparison::Below },
            &nabla_j,
            ctx.oracle_notes(),
        ),
        finish(
            Check { suite: s, name: "curvature_oracle", statement: "curvature blocks equal nested differences of the coordinate connection, non-Einstein profile (relative)", tolerance: tol.curvature_oracle, comparison: Comparison::Below },
            &curv,
            [vec![format!("profile: {}", profiles[2].0)], ctx.oracle_notes()].concat(),
        ),
        finish(
            Check { suite: s, name: "curvature_antisymmetry", statement: "PPP, PPQ, QQP, QQQ are antisymmetric in their argument pair", tolerance: tol.antisymmetry, comparison: Comparison::Below },
            &anti,
            vec![],
        ),
    ])
}

fn ricci_profiles(ctx: &Ctx<'_>) -> [(&'static str, LiftProfile); 3] {
    let c = ctx.c();
    [
        ("u = 2 + t", LiftProfile::integrable(UProfile::Linear { a0: 2.0, a1: 1.0 }, c)),
        ("u = 1 + sqrt(1 + t)", LiftProfile::integrable(UProfile::Sqrt { a: 1.0, b: 1.0 }, c)),
        ("u = 1.5 + 0.7 t", LiftProfile::integrable(UProfile::Linear { a0: 1.5, a1: 0.7 }, c)),
    ]
}

fn ricci(ctx: &Ctx<'_>) -> Result<Vec<CheckResult>> {
    let s = Suite::Ricci;
    let tol = &ctx.cfg.tolerances;
    let (mut closed, mut terms, mut cross, mut sym, mut fact) = (Acc::new(), Acc::new(), Acc::new(), Acc::new(), Acc::new());
    let mut term_max: Vec<(&'static str, f64)> = Vec::new();
    for (_, prof) in ricci_profiles(ctx) {
        for pt in ctx.points().iter().take(10) {
            closed.record(ricci_blocks(ctx.base, &prof, pt).and_then(|tr| {
                let cl = ricci_closed_forms(ctx.base, &prof, pt)?;
                let scale = tr.qq.abs().max().max(tr.pp.abs().max());
                Ok(rel((&tr.qq - &cl.qq).abs().max().max((&tr.pp - &cl.pp).abs().max()), scale))
            }))?;
            match ricci_terms(ctx.base, &prof, pt) {
                Ok(list) => {
                    for t in list {
                        let e = t.relative_error();
                        terms.push(e);
                        match term_max.iter_mut().find(|(n, _)| *n == t.name) {
                            Some(entry) => entry.1 = entry.1.max(e),
                            None => term_max.push((t.name, e)),
                        }
                    }
                }
                Err(e) if skippable(&e) || matches!(e, Error::InvalidParameter(_)) => terms.skipped += 1,
                Err(e) => return Err(e),
            }
            fact.record(gamma_and_diffs(ctx.base, &prof, pt).map(|g| {
                let scale = g.diff_qq.abs().max().max(g.diff_pp.abs().max());
                rel(g.factorization_defect(), scale)
            }))?;
        }
        for pt in ctx.points() {
            let r = ricci_blocks(ctx.base, &prof, pt);
            cross.record(r.as_ref().map(|r| r.cross_max()).map_err(Clone::clone))?;
            sym.record(r.map(|r| r.symmetry_defect()))?;
        }
    }
    let names: Vec<&str> = ricci_profiles(ctx).iter().map(|(n, _)| *n).collect();
    let profile_note = format!("profiles: {}", names.join("; "));
    let term_notes: Vec<String> =
        term_max.iter().map(|(n, e)| format!("{n}: max relative error {e:.3e}")).collect();
    Ok(vec![
        finish(
            Check { suite: s, name: "ricci_closed_forms", statement: "trace of the curvature equals the closed forms in a, alpha, beta (relative)", tolerance: tol.ricci_closed_forms, comparison: Comparison::Below },
            &closed,
            vec![profile_note.clone()],
        ),
        finish(
            Check { suite: s, name: "ricci_terms", statement: "each scalar coefficient recovered from the trace matches its polynomial (relative)", tolerance: tol.ricci_closed_forms, comparison: Comparison::Below },
            &terms,
            term_notes,
        ),
        finish(
            Check { suite: s, name: "ricci_cross_block", statement: "Ric(delta_j, d^k) = Ric(d^j, delta_k) = 0", tolerance: tol.cross_block, comparison: Comparison::Below },
            &cross,
            vec![],
        ),
        finish(
            Check { suite: s, name: "ricci_symmetry", statement: "the trace-route Ricci tensor is symmetric", tolerance: tol.cross_block, comparison: Comparison::Below },
            &sym,
            vec![],
        ),
        finish(
            Check { suite: s, name: "gamma_factorization", statement: "Ric - a/(2u(u-2tu')^2)(G, H) equals its gamma-factored form (relative)", tolerance: tol.ricci_closed_forms, comparison: Comparison::Below },
            &fact,
            vec![profile_note],
        ),
    ])
}

fn einstein(ctx: &Ctx<'_>) -> Result<Vec<CheckResult>> {
    let s = Suite::Einstein;
    let tol = &ctx.cfg.tolerances;
    let lam = ctx.params.lambda();
    let c = ctx.c();
    let n = ctx.base.dim();
    let (mut cond, mut cross, mut closed, mut oracle, mut tube) = (Acc::new(), Acc::new(), Acc::new(), Acc::new(), Acc::new());
    for pt in ctx.points() {
        let b = lift_blocks(ctx.base, &ctx.einstein, pt)?;
        let r = ricci_blocks(ctx.base, &ctx.einstein, pt)?;
        cond.push(einstein_residual(ctx.base, &ctx.einstein, lam, pt)?);
        cross.push(r.cross_max());
        closed.record(ricci_closed_forms(ctx.base, &ctx.einstein, pt).map(|cl| {
            ((&cl.qq - &b.gb * lam).abs().max() / b.gb.abs().max()).max((&cl.pp - &b.hb * lam).abs().max() / b.hb.abs().max())
        }))?;
        if c > 0.0 {
            // |p|^2 = 2t against A^2 / c
            tube.push(2.0 * b.t * c / (ctx.params.a * ctx.params.a));
        }
    }
    for pt in ctx.curvature_oracle_points() {
        let k = curvature_fd_oracle(ctx.base, &ctx.einstein, pt, 1e-4, ctx.cfg.fd_step)?;
        let g = lift_blocks(ctx.base, &ctx.einstein, pt)?.adapted_metric();
        let dim = 2 * n;
        let ric = Matrix::from_fn(dim, dim, |b, cc| (0..dim).map(|a| k[(a, cc, a, b)]).sum());
        oracle.push((ric - &g * lam).abs().max() / g.abs().max());
    }

    let grid = ctx.grid();
    let mut gam = Acc::new();
    for &t in &grid {
        gam.record(einstein_u(ctx.params, t).map(|u| ricci_coefficients(n, c, t, &u).gamma.abs()))?;
    }
    let b_off = if c != 0.0 { -c } else { 1.0 };
    let off = UProfile::Sqrt { a: ctx.params.a, b: b_off };
    let mut gam_off = Acc::new();
    for &t in grid.iter().skip(1) {
        gam_off.record(off.derivatives(t).map(|u| ricci_coefficients(n, c, t, &u).gamma.abs()))?;
    }

    let doubled = EinsteinParams::new(2.0 * ctx.params.a, c, n)?;
    let mut scaling = Acc::new();
    scaling.push((doubled.lambda() - lam / 2.0).abs().max((doubled.holomorphic_curvature() - ctx.params.holomorphic_curvature() / 2.0).abs()));

    let mut tube_notes = Vec::new();
    let tube_check = if c > 0.0 {
        tube_notes.push(format!(
            "t sampled in [{}, {}), tube bound t < {}",
            ctx.samples.t_range.0,
            ctx.samples.t_range.1,
            ctx.params.t_max()
        ));
        if ctx.samples.clipped {
            tube_notes.push("t range clipped to the tube".to_string());
        }
        Some(finish(
            Check { suite: s, name: "tube_respected", statement: "every sample satisfies |p|^2 < A^2/c (ratio reported)", tolerance: 1.0, comparison: Comparison::Below },
            &tube,
            tube_notes,
        ))
    } else {
        None
    };

    let mut out = vec![
        finish(
            Check { suite: s, name: "einstein_condition", statement: "Ric = ((n+1)c/A) G on both blocks, relative to |G|", tolerance: tol.einstein, comparison: Comparison::Below },
            &cond,
            vec![format!("lambda = {lam}")],
        ),
        finish(
            Check { suite: s, name: "einstein_cross_block", statement: "mixed Ricci blocks vanish on the Einstein profile", tolerance: tol.cross_block, comparison: Comparison::Below },
            &cross,
            vec![],
        ),
        finish(
            Check { suite: s, name: "einstein_closed_form_ricci", statement: "closed-form Ricci blocks equal ((n+1)c/A)(G, H) (relative)", tolerance: tol.einstein, comparison: Comparison::Below },
            &closed,
            vec![],
        ),
        finish(
            Check { suite: s, name: "einstein_oracle_route", statement: "Ricci trace of the nested-difference curvature equals ((n+1)c/A) G (relative)", tolerance: tol.einstein_oracle, comparison: Comparison::Below },
            &oracle,
            ctx.oracle_notes(),
        ),
    ];
    out.extend(tube_check);
    out.push(finish(
        Check { suite: s, name: "gamma_vanishes", statement: "gamma = 0 along the t grid for u = A + sqrt(A^2 - 2ct)", tolerance: tol.gamma, comparison: Comparison::Below },
        &gam,
        vec![format!("grid [0, {}] with {} points", ctx.grid_bound(), grid.len())],
    ));
    out.push(finish(
        Check { suite: s, name: "gamma_nonzero_off_exponent", statement: "gamma != 0 for u = A + sqrt(A^2 + Bt) with B != -2c (smallest |gamma| for t > 0)", tolerance: tol.gamma, comparison: Comparison::Above },
        &gam_off,
        vec![format!("B = {b_off}")],
    ));
    out.push(finish(
        Check { suite: s, name: "scaling_law", statement: "doubling A halves lambda and the holomorphic curvature", tolerance: tol.scalar_identity, comparison: Comparison::Below },
        &scaling,
        vec![],
    ));
    Ok(out)
}

fn holomorphic(ctx: &Ctx<'_>) -> Result<Vec<CheckResult>> {
    let s = Suite::Holomorphic;
    let tol = &ctx.cfg.tolerances;
    let k_expected = ctx.params.holomorphic_curvature();
    let n = ctx.base.dim();
    let mut rng = ctx.rng(s);
    let (mut blocks_acc, mut model, mut value) = (Acc::new(), Acc::new(), Acc::new());
    let mut values = Vec::new();
    let mut block_max = [0.0f64; 6];
    let mut names = [""; 6];
    for pt in ctx.points() {
        let b = lift_blocks(ctx.base, &ctx.einstein, pt)?;
        let k = curvature_blocks(ctx.base, &ctx.einstein, pt)?;
        let expected = einstein_curvature_blocks(ctx.c(), ctx.params.a, &b.gb, &b.hb);
        let scale = k.full().max_abs();
        for (idx, ((name, got), (_, want))) in k.named().into_iter().zip(expected.named()).enumerate() {
            let d = rel(got.max_abs_diff(want), scale);
            block_max[idx] = block_max[idx].max(d);
            names[idx] = name;
        }
        blocks_acc.push(rel(k.max_abs_diff(&expected), scale));

        let full: Tensor4 = k.full();
        let g = b.adapted_metric();
        let j = b.j_adapted();
        let (x, y, z) = (random_vector(&mut rng, 2 * n), random_vector(&mut rng, 2 * n), random_vector(&mut rng, 2 * n));
        let got = apply_curvature(&full, &x, &y, &z);
        let want = holomorphic_model(k_expected, &g, &j, &x, &y, &z);
        model.push(rel((&got - &want).abs().max(), want.abs().max()));

        let mut u = random_vector(&mut rng, 2 * n);
        u /= libm::sqrt(u.dot(&(&g * &u)));
        let ju = &j * &u;
        let kv = apply_curvature(&full, &u, &ju, &ju);
        let h = kv.dot(&(&g * &u));
        value.push(h);
        values.push(h);
    }
    let (mut dev, mut spread) = (Acc::new(), Acc::new());
    for &h in &values {
        dev.push((h - k_expected).abs());
        spread.push(h - value.min);
    }
    let block_notes: Vec<String> = names.iter().zip(block_max).map(|(n, m)| format!("{n}: {m:.3e}")).collect();
    Ok(vec![
        finish(
            Check { suite: s, name: "holomorphic_blocks", statement: "the six curvature blocks equal their constant-holomorphic-curvature closed forms with c/2A (relative)", tolerance: tol.holomorphic_blocks, comparison: Comparison::Below },
            &blocks_acc,
            block_notes,
        ),
        finish(
            Check { suite: s, name: "holomorphic_model", statement: "K(X, Y)Z equals the complex space form model with k = 2c/A on random triples (relative)", tolerance: tol.holomorphic_blocks, comparison: Comparison::Below },
            &model,
            vec![],
        ),
        finish(
            Check { suite: s, name: "holomorphic_sectional_curvature", statement: "G(K(X, JX)JX, X) / G(X, X)^2 = 2c/A for random X", tolerance: tol.holomorphic_value, comparison: Comparison::Below },
            &dev,
            vec![format!("k = {k_expected}")],
        ),
        finish(
            Check { suite: s, name: "holomorphic_spread", statement: "spread of the measured holomorphic sectional curvature, each value minus the smallest", tolerance: tol.holomorphic_value, comparison: Comparison::Below },
            &spread,
            vec![],
        ),
    ])
}

fn ode(ctx: &Ctx<'_>) -> Result<Vec<CheckResult>> {
    let s = Suite::Ode;
    let tol = &ctx.cfg.tolerances;
    let c = ctx.c();
    let a = ctx.params.a;
    let grid = ctx.grid();
    let (mut eins, mut sing, mut family, mut vw, mut pos) = (Acc::new(), Acc::new(), Acc::new(), Acc::new(), Acc::new());
    let off = UProfile::Sqrt { a, b: if c != 0.0 { -c } else { 1.0 } };
    for &t in &grid {
        eins.record(einstein_u(ctx.params, t).map(|u| ode_relative_residual(&u, t).abs()))?;
        for u in [UProfile::Constant { a }, UProfile::Linear { a0: 0.0, a1: a }] {
            sing.push(ode_residual(&u.derivatives(t)?, t).abs());
        }
        family.record(off.derivatives(t).map(|u| ode_relative_residual(&u, t).abs()))?;
        vw.record(einstein_u(ctx.params, t).and_then(|u| {
            let v = v_from_u(&u, c, t)?;
            let w = w_from_uv(u.u, v, t)?;
            let (vc, wc) = closed_form_vw(ctx.params, t)?;
            Ok(((vc - v).abs() / v.abs().max(1e-300)).max((wc - w).abs() / w.abs().max(1e-300)))
        }))?;
        pos.record(einstein_u(ctx.params, t).and_then(|u| {
            let v = v_from_u(&u, c, t)?;
            let lhs = u.u + 2.0 * t * v;
            let rhs = 2.0 * (a * a - 2.0 * c * t) / a;
            if !(lhs > 0.0) {
                return Ok(f64::INFINITY);
            }
            Ok((lhs - rhs).abs() / rhs)
        }))?;
    }
    let flat_note = if c == 0.0 { vec!["c = 0: v = w = 0 identically, relative error taken against 1e-300".to_string()] } else { vec![] };
    Ok(vec![
        finish(
            Check { suite: s, name: "ode_einstein_profile", statement: "u^2 u'' - 2t u'^3 + 2u u'^2 = 0 for u = A + sqrt(A^2 - 2ct) (relative)", tolerance: tol.ode, comparison: Comparison::Below },
            &eins,
            vec![format!("grid [0, {}] with {} points", ctx.grid_bound(), grid.len())],
        ),
        finish(
            Check { suite: s, name: "ode_singular_solutions", statement: "u = A and u = At solve the same equation exactly", tolerance: tol.ode, comparison: Comparison::Below },
            &sing,
            vec!["singular solutions are checked here only and used by no other suite".to_string()],
        ),
        finish(
            Check { suite: s, name: "ode_sqrt_family", statement: "u = A + sqrt(A^2 + Bt) with B != -2c also solves the equation (relative)", tolerance: tol.ode, comparison: Comparison::Below },
            &family,
            vec![],
        ),
        finish(
            Check { suite: s, name: "closed_form_vw", statement: "closed forms of v and w equal the composition of the integrability relation and the inverse-entry relation (relative)", tolerance: tol.scalar_identity, comparison: Comparison::Below },
            &vw,
            flat_note,
        ),
        finish(
            Check { suite: s, name: "positivity_identity", statement: "u + 2tv = 2(A^2 - 2ct)/A > 0 along the grid (relative)", tolerance: tol.scalar_identity, comparison: Comparison::Below },
            &pos,
            vec![],
        ),
    ])
}
