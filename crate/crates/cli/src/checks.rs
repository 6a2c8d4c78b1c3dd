//! Named checks on a document and their reports.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use prismalab_core::breuil::{boundary_phi, is_breuil_module, kisin_to_breuil, residual_module, unramified_realization, BreuilModule};
use prismalab_core::cyclo::{h2_torsion_report, ideal_j_mingens, ker_phi_minus_d, sharpness_report, CycloInstance};
use prismalab_core::decomposition::{check_split_compat, split_breuil, split_fl, split_phi_module, verify_split, Split, SplitChecks};
use prismalab_core::etale::etale_fixed_points;
use prismalab_core::fl::{fl_criterion, fl_to_breuil, is_fl_module};
use prismalab_core::phi_modules::{
    annihilator_alpha, annihilator_p_exponents, boundary_structure_check, check_module_ann_inclusion, height_check,
    twist_u_torsion_iso, u_torsion, zp_shape, PhiModule, ZpShape,
};
use prismalab_core::suites::{DEFAULT_SEED, ETALE_T_MAX, REALIZATION_T_MAX};
use prismalab_core::{Error, Result};

use crate::doc::{CheckDecl, Document, ModuleKind};
use crate::model;

/// Command-line overrides; `None` falls back to the document, then defaults.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub seed: Option<u64>,
    pub n_trunc: Option<usize>,
    pub dp_degree: Option<usize>,
    pub bound: Option<usize>,
    pub slack: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub check: String,
    pub passed: bool,
    pub report: Value,
    pub note: Option<String>,
}

impl Outcome {
    fn new(check: &str, passed: bool, report: Value) -> Outcome {
        Outcome { check: check.to_string(), passed, report, note: None }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({ "check": self.check, "status": if self.passed { "pass" } else { "fail" } });
        if let Some(n) = &self.note {
            v["note"] = json!(n);
        }
        v["report"] = self.report.clone();
        v
    }
}

/// Check names accepted for each module kind; `boundary_phi` works for all.
pub fn checks_for(kind: ModuleKind) -> &'static [&'static str] {
    match kind {
        ModuleKind::Phi => {
            &["well_defined", "length", "u_torsion", "alpha", "ann_inclusion", "boundary", "zp_shape", "split", "twist"]
        }
        ModuleKind::Kisin => &["well_defined", "height", "breuil", "split_breuil"],
        ModuleKind::Breuil => &["breuil", "split_breuil"],
        ModuleKind::Fl => &["fl", "fl_criterion", "split_fl", "split_compat", "breuil"],
        ModuleKind::Etale => &["fixed_points", "residual"],
        ModuleKind::Cyclo => &["sharpness", "h2", "kernel", "ideal_j"],
    }
}

struct Ctx<'a> {
    doc: &'a Document,
    params: &'a BTreeMap<String, u64>,
    opts: &'a Options,
}

impl Ctx<'_> {
    fn param(&self, key: &str) -> Option<u64> {
        self.params.get(key).copied()
    }

    fn usize_param(&self, key: &str) -> Result<usize> {
        self.param(key)
            .map(|v| v as usize)
            .ok_or_else(|| Error::Dimension(format!("check needs parameter '{key}'")))
    }

    fn seed(&self) -> u64 {
        self.opts.seed.or(self.param("seed")).unwrap_or(DEFAULT_SEED)
    }

    fn n_trunc(&self) -> Option<usize> {
        self.opts.n_trunc.or(self.param("N").map(|v| v as usize))
    }

    fn cyclo(&self) -> Result<CycloInstance> {
        let r = &self.doc.ring;
        if r.m != 1 {
            return Err(Error::BadRing("the cyclotomic instance lives over Z_p (m = 1)".into()));
        }
        let bound = self.opts.bound.or(self.param("bound").map(|v| v as usize)).or(self.doc.module.bound);
        let dd = self.opts.dp_degree.or(self.param("D").map(|v| v as usize)).or(self.doc.module.dp_degree);
        let mut inst = CycloInstance::new(r.p, r.n, bound, dd)?;
        inst.slack = self.opts.slack;
        Ok(inst)
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn split_value(s: &Split, checks: &SplitChecks) -> Value {
    json!({ "total": s.total, "mult": s.mult, "nilp": s.nilp, "checks": to_value(checks) })
}

/// Runs one named check.
pub fn run_check(doc: &Document, decl: &CheckDecl, opts: &Options) -> Result<Outcome> {
    let name = decl.name.as_str();
    let kind = doc.module.kind;
    if name != "boundary_phi" && !checks_for(kind).contains(&name) {
        return Err(Error::UnknownCheck(format!("{name} (module kind {})", kind.name())));
    }
    let cx = Ctx { doc, params: &decl.params, opts };
    if name == "boundary_phi" {
        let e = cx.param("e").unwrap_or(1) as usize;
        let b = boundary_phi(doc.ring.p, e)?;
        return Ok(Outcome::new(name, b.matches, to_value(&b)));
    }
    if kind != ModuleKind::Cyclo && doc.module.g == 0 {
        let mut o = Outcome::new(name, true, json!({ "g": 0 }));
        o.note = Some("vacuous pass: the module is zero".into());
        return Ok(o);
    }
    match kind {
        ModuleKind::Phi => phi_check(&cx, name, &model::phi_module(doc, cx.n_trunc())?),
        ModuleKind::Kisin => {
            let k = model::kisin_module(doc, cx.n_trunc())?;
            match name {
                "well_defined" => Ok(Outcome::new(name, true, json!({ "g": k.module.g, "h": k.h }))),
                "height" => {
                    let ok = height_check(&k)?;
                    Ok(Outcome::new(name, ok, json!({ "h": k.h, "e": k.eis.e, "height_ok": ok })))
                }
                _ => {
                    let b = kisin_to_breuil(&k.module, k.h, &k.eis, doc.module.dz)?;
                    breuil_check(&cx, name, &b)
                }
            }
        }
        ModuleKind::Breuil => breuil_check(&cx, name, &model::breuil_module(doc)?),
        ModuleKind::Fl => {
            let m = model::fl_module(doc)?;
            let seed = cx.seed();
            match name {
                "fl" => {
                    let r = is_fl_module(&m);
                    Ok(Outcome::new(name, r.passes(), to_value(&r)))
                }
                "fl_criterion" => {
                    let direct = is_fl_module(&m);
                    let crit = fl_criterion(&m, doc.module.dz)?;
                    let agree = crit == direct.passes();
                    Ok(Outcome::new(name, agree, json!({ "fl": direct.passes(), "criterion": crit, "agree": agree })))
                }
                "split_fl" => {
                    let s = split_fl(&m, seed)?;
                    let checks = verify_split(&s.fin, &s.split, seed);
                    let ok = checks.all() && s.fil1_trivial;
                    let mut v = split_value(&s.split, &checks);
                    v["fil1_trivial"] = json!(s.fil1_trivial);
                    Ok(Outcome::new(name, ok, v))
                }
                "split_compat" => {
                    let ok = check_split_compat(&m, doc.module.dz, seed)?;
                    Ok(Outcome::new(name, ok, json!({ "compatible": ok })))
                }
                _ => breuil_check(&cx, name, &fl_to_breuil(&m, doc.module.dz)?),
            }
        }
        ModuleKind::Etale => {
            let v = model::etale_module(doc)?;
            match name {
                "fixed_points" => {
                    let t = cx.param("t").unwrap_or(ETALE_T_MAX as u64) as usize;
                    match etale_fixed_points(&v, t) {
                        Ok(fp) => Ok(Outcome::new(name, true, to_value(&fp))),
                        Err(Error::BoundTooSmall(t)) => {
                            Ok(Outcome::new(name, false, json!({ "t_max": t, "dim": v.dim_fp(), "reached": false })))
                        }
                        Err(e) => Err(e),
                    }
                }
                _ => {
                    let e = cx.param("e").unwrap_or(1) as usize;
                    let w = model::witt(doc)?;
                    let eis = match &doc.module.eis {
                        Some(l) => model::eisenstein(doc, &w, l)?,
                        None => model::default_eisenstein(&w, e)?,
                    };
                    let res = residual_module(&v, &eis, doc.module.dz)?;
                    let rep = is_breuil_module(&res.breuil);
                    let (len, tor) = res.tor_lengths();
                    let mut out = json!({ "e": res.e, "h": res.h, "breuil": to_value(&rep), "length": len, "tor_length": tor });
                    let mut ok = len == tor;
                    if res.e > 1 {
                        let zero_phi = res.breuil.phi_fil.iter().all(|x| x.iter().all(|&c| c == 0));
                        ok &= zero_phi;
                        out["phi_h_zero"] = json!(zero_phi);
                    } else {
                        ok &= rep.passes() && rep.connection == Some(true);
                        let t = cx.param("t").unwrap_or(REALIZATION_T_MAX as u64) as usize;
                        let fp = unramified_realization(&res, t)?;
                        ok &= fp.dim == v.dim_fp();
                        out["realization_dim"] = json!(fp.dim);
                        out["realization_t"] = json!(fp.t);
                        out["expected_dim"] = json!(v.dim_fp());
                    }
                    Ok(Outcome::new(name, ok, out))
                }
            }
        }
        ModuleKind::Cyclo => {
            let inst = cx.cyclo()?;
            cyclo_check(&cx, name, &inst)
        }
    }
}

fn phi_check(cx: &Ctx, name: &str, m: &PhiModule) -> Result<Outcome> {
    let out = |passed, v| Ok(Outcome::new(name, passed, v));
    match name {
        "well_defined" => out(true, json!({ "g": m.g, "free_rank": m.free_rank })),
        "length" => {
            let view = m.finite_view()?;
            out(true, json!({ "kill": view.kill, "length": view.fin.length() }))
        }
        "u_torsion" => {
            let t = u_torsion(m)?;
            let len = if t.g == 0 { 0 } else { t.length()? };
            out(true, json!({ "generators": t.g, "length": len }))
        }
        "alpha" => {
            let alpha = annihilator_alpha(m)?;
            let ex = annihilator_p_exponents(m)?;
            out(true, json!({ "alpha": alpha, "beta": ex.beta, "gamma": ex.gamma }))
        }
        "ann_inclusion" => {
            let r = check_module_ann_inclusion(m, cx.usize_param("e")?, cx.usize_param("i")?)?;
            out(r.holds, to_value(&r))
        }
        "boundary" => {
            let r = boundary_structure_check(m, cx.usize_param("e")?, cx.usize_param("i")?)?;
            out(r.passes, to_value(&r))
        }
        "zp_shape" => match zp_shape(m)? {
            ZpShape::Exponents(ex) => out(true, json!({ "shape": true, "exponents": ex })),
            ZpShape::Refuted { j, truncation, witness } => {
                out(false, json!({ "shape": false, "j": j, "truncation": truncation, "witness": witness }))
            }
        },
        "split" => {
            let seed = cx.seed();
            let s = split_phi_module(m, seed)?;
            let checks = verify_split(&s.fin, &s.split, seed);
            out(checks.all(), split_value(&s.split, &checks))
        }
        _ => {
            let r = twist_u_torsion_iso(m)?;
            out(r.is_iso, to_value(&r))
        }
    }
}

fn breuil_check(cx: &Ctx, name: &str, b: &BreuilModule) -> Result<Outcome> {
    if name == "breuil" {
        let r = is_breuil_module(b);
        let mut v = to_value(&r);
        v["length"] = json!(b.length());
        return Ok(Outcome::new(name, r.passes(), v));
    }
    let seed = cx.seed();
    let s = split_breuil(b, seed)?;
    let checks = verify_split(&s.fin, &s.split, seed);
    let mut v = split_value(&s.split, &checks);
    v["fil_standard"] = json!(s.fil_standard);
    Ok(Outcome::new(name, checks.all() && s.fil_standard, v))
}

fn cyclo_check(cx: &Ctx, name: &str, inst: &CycloInstance) -> Result<Outcome> {
    match name {
        "sharpness" => {
            let row = &sharpness_report(&[(inst.p, inst.n)])?[0];
            let v = json!({
                "p": row.p, "n": row.n, "e": row.e, "i": row.i, "alpha": row.alpha,
                "bound": format!("{}/{}", row.bound_num, row.bound_den), "equal": row.equal,
            });
            Ok(Outcome::new(name, row.equal, v))
        }
        "h2" => {
            let r = h2_torsion_report(inst)?;
            Ok(Outcome::new(name, r.passes, to_value(&r)))
        }
        "kernel" => {
            let m = cx.param("m").map_or(inst.n, |v| v as u32);
            let r = ker_phi_minus_d(inst, m)?;
            Ok(Outcome::new(name, r.cyclic && r.closed, to_value(&r)))
        }
        _ => {
            let r = ideal_j_mingens(inst)?;
            Ok(Outcome::new(name, true, to_value(&r)))
        }
    }
}

/// The report of `example cyclo`: kernels for every `m <= n`, the `H^2`
/// torsion report, the ideal `J` and the sharpness row.
pub fn cyclo_example(p: u64, n: u32, opts: &Options) -> Result<Outcome> {
    let doc = Document {
        ring: crate::doc::RingDesc { p, n, m: 1, f: None },
        module: crate::doc::ModuleDecl { kind: ModuleKind::Cyclo, ..Default::default() },
        phi: Vec::new(),
        psi: Vec::new(),
        fil: Vec::new(),
        checks: Vec::new(),
    };
    let params = BTreeMap::new();
    let cx = Ctx { doc: &doc, params: &params, opts };
    let inst = cx.cyclo()?;
    let mut passed = true;
    let mut kernels = Vec::new();
    for m in 1..=n {
        let r = ker_phi_minus_d(&inst, m)?;
        passed &= r.cyclic && r.closed;
        kernels.push(to_value(&r));
    }
    let h2 = cyclo_check(&cx, "h2", &inst)?;
    let j = cyclo_check(&cx, "ideal_j", &inst)?;
    let sharp = cyclo_check(&cx, "sharpness", &inst)?;
    passed &= h2.passed && sharp.passed;
    let instance = json!({
        "p": p, "n": n, "e": inst.e, "d": inst.d.coeffs, "bound": inst.bound, "D": inst.dp_degree,
        "factorization": inst.factorization_holds(),
        "d_is_u_power_mod_p": inst.d_is_u_power_mod_p(),
        "frobenius_congruence": inst.frobenius_congruence(),
        "bound_certified": inst.bound_is_certified(),
    });
    passed &= inst.factorization_holds() && inst.d_is_u_power_mod_p() && inst.frobenius_congruence();
    let v = json!({
        "instance": instance, "kernels": kernels, "h2": h2.report, "ideal_j": j.report, "sharpness": sharp.report,
    });
    Ok(Outcome::new("example_cyclo", passed, v))
}

/// Runs the requested check, or every `[check]` entry of the document.
pub fn run_document(doc: &Document, only: Option<&str>, opts: &Options) -> Result<Vec<Outcome>> {
    let decls: Vec<CheckDecl> = match only {
        Some(name) => {
            let params = doc.checks.iter().find(|c| c.name == name).map(|c| c.params.clone()).unwrap_or_default();
            vec![CheckDecl { name: name.to_string(), params }]
        }
        None => doc.checks.clone(),
    };
    if decls.is_empty() {
        return Err(Error::UnknownCheck("no check requested".into()));
    }
    decls.iter().map(|d| run_check(doc, d, opts)).collect()
}
