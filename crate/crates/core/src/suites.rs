//! Seeded random instances and the built-in check suites.
//!
//! Every case draws from its own `ChaCha8Rng` seeded by `(seed, index)`, so
//! reports are identical across runs and thread schedules.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::breuil::{boundary_phi, is_breuil_module, residual_module, unramified_realization};
use crate::cyclo::{h2_torsion_report, ideal_j_mingens, ker_phi_minus_d, sharpness_report, CycloInstance, SHARPNESS_INSTANCES};
use crate::decomposition::{change_basis, split_phi_module, verify_split};
use crate::error::{Error, Result};
use crate::etale::{etale_fixed_points, EtalePhiModule};
use crate::fl::{fl_criterion, is_fl_module, FLModule};
use crate::linalg::RowSpan;
use crate::phi_modules::{zp_shape, PhiModule, Poly, ZpShape};
use crate::series::EisensteinPoly;
use crate::witt::{Witt, WittRing};

pub const DEFAULT_SEED: u64 = 7;

/// Extension degree bound for the étale fixed-point suite.
pub const ETALE_T_MAX: usize = 6;

/// `GL_2(F_5)` has elements of order 24.
pub const REALIZATION_T_MAX: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub label: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub seed: Option<u64>,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn pass_count(&self) -> usize {
        self.cases.iter().filter(|c| c.passed).count()
    }
}

pub fn case_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ index as u64)
}

/// `f(0), ..., f(count - 1)` computed on scoped threads, in order.
pub fn par_map<T: Send, F: Fn(usize) -> T + Sync>(count: usize, f: F) -> Vec<T> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(count.max(1));
    let mut out: Vec<Option<T>> = (0..count).map(|_| None).collect();
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = (0..threads)
            .map(|t| s.spawn(move || (t..count).step_by(threads).map(|i| (i, f(i))).collect::<Vec<_>>()))
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("suite worker panicked") {
                out[i] = Some(v);
            }
        }
    });
    out.into_iter().map(|v| v.expect("every case ran")).collect()
}

fn case<T: std::fmt::Debug>(label: String, r: Result<(bool, T)>) -> CaseResult {
    match r {
        Ok((passed, detail)) => CaseResult { label, passed, detail: format!("{detail:?}") },
        Err(e) => CaseResult { label, passed: false, detail: format!("error: {e}") },
    }
}

fn random_poly<R: Rng + ?Sized>(w: &Witt, len: usize, rng: &mut R) -> Poly {
    (0..len).flat_map(|_| w.random(rng)).collect()
}

fn shift(p: &Poly, k: usize, m: usize) -> Poly {
    let mut out = vec![0u64; k * m];
    out.extend_from_slice(p);
    out
}

/// A u-finite module over `𝔖_1 = F_q[[u]]` of rank at most 3: diagonal
/// relations `u^(b_j)`, a random Frobenius made well defined, and with
/// probability one half a random unipotent change of generators.
pub fn random_phi_module<R: Rng + ?Sized>(rng: &mut R) -> Result<PhiModule> {
    let (p, m) = *[(2u64, 1usize), (3, 1), (5, 1), (2, 2)].choose(rng).expect("nonempty");
    let w = WittRing::default_for(p, 1, m)?;
    let g = rng.gen_range(1..=3);
    let b: Vec<usize> = (0..g).map(|_| rng.gen_range(1..=5)).collect();
    let relations: Vec<Vec<Poly>> = (0..g)
        .map(|j| (0..g).map(|i| if i == j { shift(&w.one(), b[j], m) } else { Vec::new() }).collect())
        .collect();
    let phi: Vec<Vec<Poly>> = (0..g)
        .map(|j| {
            (0..g)
                .map(|i| {
                    let f = match rng.gen_range(0..4) {
                        0 => Vec::new(),
                        1 => w.random(rng),
                        _ => random_poly(&w, b[i], rng),
                    };
                    shift(&f, b[i].saturating_sub(p as usize * b[j]), m)
                })
                .collect()
        })
        .collect();
    let base = PhiModule::new(w.clone(), g, 0, relations, phi)?;
    if rng.gen_bool(0.5) {
        let pm: Vec<Vec<Poly>> = (0..g)
            .map(|j| (0..g).map(|i| if i == j { w.one() } else if i > j { random_poly(&w, 2, rng) } else { Vec::new() }).collect())
            .collect();
        change_basis(&base, &pm)
    } else {
        Ok(base)
    }
}

pub fn split_suite(seed: u64, count: usize) -> SuiteReport {
    let cases = par_map(count, |k| {
        let mut rng = case_rng(seed, k);
        let r = random_phi_module(&mut rng).and_then(|m| {
            let sp = split_phi_module(&m, seed ^ k as u64)?;
            let checks = verify_split(&sp.fin, &sp.split, seed.wrapping_add(k as u64));
            Ok((checks.all(), (m.p(), m.w.m, m.g, sp.split.mult, sp.split.nilp, checks)))
        });
        case(format!("split #{k}"), r)
    });
    SuiteReport { name: "split".into(), seed: Some(seed), cases }
}

/// Integer polynomial arithmetic over `Z/p^n` (residue field `F_p`).
mod ipoly {
    use crate::zpn::Zpn;

    pub fn add(z: &Zpn, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; a.len().max(b.len())];
        for (k, o) in out.iter_mut().enumerate() {
            *o = z.add(a.get(k).copied().unwrap_or(0), b.get(k).copied().unwrap_or(0));
        }
        out
    }

    pub fn mul(z: &Zpn, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = z.mul_add(out[i + j], x, y);
            }
        }
        out
    }

    pub fn phi(a: &[u64], p: usize) -> Vec<u64> {
        let mut out = vec![0u64; if a.is_empty() { 0 } else { (a.len() - 1) * p + 1 }];
        for (k, &c) in a.iter().enumerate() {
            out[k * p] = c;
        }
        out
    }

    pub fn mat_mul(z: &Zpn, a: &[Vec<Vec<u64>>], b: &[Vec<Vec<u64>>]) -> Vec<Vec<Vec<u64>>> {
        let inner = b.len();
        let cols = b.first().map_or(0, |r| r.len());
        a.iter()
            .map(|row| {
                (0..cols)
                    .map(|j| (0..inner).fold(Vec::new(), |acc, k| add(z, &acc, &mul(z, &row[k], &b[k][j]))))
                    .collect()
            })
            .collect()
    }
}

/// An instance for the `Z_p`-shape check: `⊕ S_n/p^(a_i)` (`a_i = n` free)
/// under a random change of generators and relations, or with a planted
/// u-torsion summand. Returns the module and the hidden sorted exponents.
pub fn random_zp_instance<R: Rng + ?Sized>(rng: &mut R, planted: bool) -> Result<(PhiModule, Option<Vec<u32>>)> {
    let p = *[2u64, 3, 5].choose(rng).expect("nonempty");
    let n = rng.gen_range(1..=3u32);
    let w = WittRing::default_for(p, n, 1)?;
    let z = w.z;
    let g = rng.gen_range(1..=3usize);
    let exps: Vec<u32> = (0..g).map(|_| rng.gen_range(1..=n)).collect();
    let unit = |i: usize, c: Vec<u64>| -> Vec<Vec<u64>> { (0..g).map(|k| if k == i { c.clone() } else { Vec::new() }).collect() };
    let mut rels: Vec<Vec<Vec<u64>>> =
        exps.iter().enumerate().filter(|(_, &a)| a < n).map(|(i, &a)| unit(i, vec![z.p_pow(a)])).collect();
    if planted {
        let i = rng.gen_range(0..g);
        let b = rng.gen_range(1..=3usize);
        let mut ub = vec![0u64; b + 1];
        ub[b] = 1;
        if exps[i] > 1 && rng.gen_bool(0.5) {
            // p^c e_i is nonzero and killed by u^b.
            let c = rng.gen_range(0..exps[i]);
            ub[b] = z.p_pow(c);
        }
        rels.push(unit(i, ub));
    }
    // Elementary operations f = P e with inverse computed alongside.
    let ident = |g: usize| -> Vec<Vec<Vec<u64>>> { (0..g).map(|i| (0..g).map(|k| if i == k { vec![1] } else { Vec::new() }).collect()).collect() };
    let mut pm = ident(g);
    let mut pinv = ident(g);
    if g > 1 {
        for _ in 0..rng.gen_range(1..=3) {
            let (i, j) = (rng.gen_range(0..g), rng.gen_range(0..g));
            if i == j {
                continue;
            }
            let c: Vec<u64> = (0..2).map(|_| rng.gen_range(0..z.q)).collect();
            let neg: Vec<u64> = c.iter().map(|&x| z.neg(x)).collect();
            let mut el = ident(g);
            el[i][j] = c;
            let mut el_inv = ident(g);
            el_inv[i][j] = neg;
            pm = ipoly::mat_mul(&z, &el, &pm);
            pinv = ipoly::mat_mul(&z, &pinv, &el_inv);
        }
    }
    let s = loop {
        let s = rng.gen_range(1..z.q.max(2));
        if z.is_unit(s) {
            break s;
        }
    };
    let mut rels = ipoly::mat_mul(&z, &rels, &pinv);
    for r in rels.iter_mut() {
        for c in r.iter_mut() {
            *c = c.iter().map(|&x| z.mul(x, s)).collect();
        }
    }
    if rels.len() > 1 && rng.gen_bool(0.5) {
        let extra = (0..g).map(|k| ipoly::add(&z, &rels[0][k], &ipoly::mul(&z, &[1, 1], &rels[1][k]))).collect();
        rels.push(extra);
    }
    let phi_p: Vec<Vec<Vec<u64>>> = pm.iter().map(|r| r.iter().map(|c| ipoly::phi(c, p as usize)).collect()).collect();
    let phi = ipoly::mat_mul(&z, &phi_p, &pinv);
    let module = PhiModule::new(w, g, 0, rels, phi)?;
    let mut hidden = exps;
    hidden.sort_unstable();
    Ok((module, if planted { None } else { Some(hidden) }))
}

pub fn zp_suite(seed: u64, shapes: usize, planted: usize) -> SuiteReport {
    let cases = par_map(shapes + planted, |k| {
        let mut rng = case_rng(seed, k);
        let plant = k >= shapes;
        let r = random_zp_instance(&mut rng, plant).and_then(|(m, hidden)| {
            let got = zp_shape(&m)?;
            let ok = match (&got, &hidden) {
                (ZpShape::Exponents(e), Some(h)) => e == h,
                (ZpShape::Refuted { .. }, None) => true,
                _ => false,
            };
            Ok((ok, (hidden, got)))
        });
        case(format!("{} #{k}", if plant { "planted" } else { "shape" }), r)
    });
    SuiteReport { name: "zp".into(), seed: Some(seed), cases }
}

/// A filtered candidate over `W_1 = F_p`: a random basis `v_k` with levels
/// `l_k <= h`, `phi_(l_k)(v_k) = w_k` and `phi_i(v_k) = 0` for `i < l_k`.
/// The `w_k` are sometimes forced into a proper subspace.
pub fn random_fl_candidate<R: Rng + ?Sized>(rng: &mut R, p: u64) -> Result<FLModule> {
    let w = WittRing::default_for(p, 1, 1)?;
    let z = w.z;
    let g = rng.gen_range(1..=3usize);
    let h = rng.gen_range(0..p as usize);
    let basis = loop {
        let rows: Vec<Vec<u64>> = (0..g).map(|_| (0..g).map(|_| rng.gen_range(0..p)).collect()).collect();
        if RowSpan::from_rows(z, g, rows.clone()).len() == g {
            break rows;
        }
    };
    let levels: Vec<usize> = (0..g).map(|_| rng.gen_range(0..=h)).collect();
    let deficient = rng.gen_bool(0.5);
    let anchor: Vec<u64> = (0..g).map(|_| rng.gen_range(0..p)).collect();
    let targets: Vec<Vec<u64>> = (0..g)
        .map(|_| {
            if deficient {
                let c = rng.gen_range(0..p);
                anchor.iter().map(|&x| z.mul(x, c)).collect()
            } else {
                (0..g).map(|_| rng.gen_range(0..p)).collect()
            }
        })
        .collect();
    let zero = vec![0u64; g];
    let mut fil = vec![Vec::new(); h + 1];
    let mut phis = vec![Vec::new(); h + 1];
    let mut comp = vec![Vec::new(); h + 1];
    for i in 0..=h {
        for k in 0..g {
            if levels[k] >= i {
                fil[i].push(basis[k].clone());
                phis[i].push(if levels[k] == i { targets[k].clone() } else { zero.clone() });
            }
            if levels[k] == i {
                comp[i].push(basis[k].clone());
            }
        }
        if fil[i].len() >= 2 && rng.gen_bool(0.3) {
            let s: Vec<u64> = fil[i][0].iter().zip(&fil[i][1]).map(|(&a, &b)| z.add(a, b)).collect();
            let t: Vec<u64> = phis[i][0].iter().zip(&phis[i][1]).map(|(&a, &b)| z.add(a, b)).collect();
            fil[i].push(s);
            phis[i].push(t);
        }
    }
    FLModule::new(w, vec![1; g], h, fil, phis, comp)
}

pub fn fl_suite(seed: u64, count: usize) -> SuiteReport {
    let cases = par_map(count, |k| {
        let mut rng = case_rng(seed, k);
        let p = if k % 2 == 0 { 3 } else { 5 };
        let r = random_fl_candidate(&mut rng, p).and_then(|m| {
            let direct = is_fl_module(&m).passes();
            let via = fl_criterion(&m, None)?;
            Ok((direct == via, (p, m.g(), m.h, direct, via)))
        });
        case(format!("fl #{k}"), r)
    });
    SuiteReport { name: "fl".into(), seed: Some(seed), cases }
}

/// An étale module over `F_q`, `q <= 4`, of dimension at most 3.
pub fn random_etale<R: Rng + ?Sized>(rng: &mut R) -> Result<EtalePhiModule> {
    let (p, m) = *[(2u64, 1usize), (3, 1), (2, 2)].choose(rng).expect("nonempty");
    let w = WittRing::default_for(p, 1, m)?;
    let d = rng.gen_range(1..=3usize);
    loop {
        let a = (0..d).map(|_| (0..d).map(|_| w.random(rng)).collect()).collect();
        match EtalePhiModule::new(w.clone(), a) {
            Err(Error::NotAUnit) => continue,
            other => return other,
        }
    }
}

pub fn etale_suite(seed: u64, count: usize) -> SuiteReport {
    let cases = par_map(count, |k| {
        let mut rng = case_rng(seed, k);
        let r = random_etale(&mut rng).and_then(|v| {
            match etale_fixed_points(&v, ETALE_T_MAX) {
                Ok(fp) => Ok((true, (v.p(), v.w.m, v.d, Some(fp.t), fp.dims))),
                Err(Error::BoundTooSmall(_)) => {
                    let t = etale_fixed_points(&v, 8 * ETALE_T_MAX).ok().map(|f| f.t);
                    Ok((false, (v.p(), v.w.m, v.d, t, Vec::new())))
                }
                Err(e) => Err(e),
            }
        });
        case(format!("etale #{k}"), r)
    });
    SuiteReport { name: "etale".into(), seed: Some(seed), cases }
}

pub fn cyclo_suite() -> SuiteReport {
    let mut cases = Vec::new();
    match sharpness_report(&SHARPNESS_INSTANCES) {
        Ok(rows) => cases.extend(rows.into_iter().map(|r| CaseResult {
            label: format!("sharpness ({},{})", r.p, r.n),
            passed: r.equal && r.alpha == r.p.pow(r.n - 1) as usize,
            detail: format!("alpha = {}, bound = {}/{}", r.alpha, r.bound_num, r.bound_den),
        })),
        Err(e) => cases.push(CaseResult { label: "sharpness".into(), passed: false, detail: e.to_string() }),
    }
    let more = par_map(SHARPNESS_INSTANCES.len(), |k| {
        let (p, n) = SHARPNESS_INSTANCES[k];
        let inst = CycloInstance::new(p, n, None, None);
        let mut out = Vec::new();
        for m in 1..=n {
            let r = inst.clone().and_then(|i| ker_phi_minus_d(&i, m)).map(|k| (k.cyclic && k.closed, k.generators));
            out.push(case(format!("kernel ({p},{n}) m={m}"), r));
        }
        let r = inst.clone().and_then(|i| h2_torsion_report(&i)).map(|h| (h.passes, h));
        out.push(case(format!("h2 ({p},{n})"), r));
        if (p, n) != (5, 1) {
            let r = inst.and_then(|i| ideal_j_mingens(&i)).map(|j| (if (p, n) == (2, 1) { j.mu == 1 } else { j.mu >= 2 }, j));
            out.push(case(format!("ideal J ({p},{n})"), r));
        }
        out
    });
    cases.extend(more.into_iter().flatten());
    SuiteReport { name: "cyclo".into(), seed: None, cases }
}

/// Residual modules for `e = 1` and the `phi_h = 0` branch for `e > 1`.
pub fn residual_suite(seed: u64) -> SuiteReport {
    let mut cases = Vec::new();
    let mut rng = case_rng(seed, 0);
    for p in [3u64, 5] {
        for d in 1..=2usize {
            let r = (|| {
                let w = WittRing::default_for(p, 1, 1)?;
                let a: Vec<Vec<Vec<u64>>> = loop {
                    let a: Vec<Vec<Vec<u64>>> = (0..d).map(|_| (0..d).map(|_| w.random(&mut rng)).collect()).collect();
                    if EtalePhiModule::new(w.clone(), a.clone()).is_ok() {
                        break a;
                    }
                };
                let v = EtalePhiModule::new(w.clone(), a)?;
                let eis = EisensteinPoly::explicit_ints(p, w.f.clone(), vec![p, 1])?;
                let res = residual_module(&v, &eis, None)?;
                let rep = is_breuil_module(&res.breuil);
                let real = unramified_realization(&res, REALIZATION_T_MAX)?;
                let ok = rep.passes() && rep.connection == Some(true) && real.dim == v.dim_fp();
                Ok((ok, (rep.failure, real.dim)))
            })();
            cases.push(case(format!("residual p={p} d={d} e=1"), r));
        }
    }
    for (p, e) in [(3u64, 2usize), (5, 2), (5, 4)] {
        let r = (|| {
            let w = WittRing::default_for(p, 1, 1)?;
            let v = EtalePhiModule::new(w.clone(), vec![vec![w.one()]])?;
            let mut coeffs = vec![0u64; e + 1];
            coeffs[0] = p;
            coeffs[e] = 1;
            let eis = EisensteinPoly::explicit_ints(p, w.f.clone(), coeffs)?;
            let res = residual_module(&v, &eis, None)?;
            let zero_phi = res.breuil.phi_fil.iter().all(|x| x.iter().all(|&c| c == 0));
            let (a, b) = res.tor_lengths();
            Ok((zero_phi && a == b, (res.h, a, b)))
        })();
        cases.push(case(format!("residual p={p} e={e}"), r));
    }
    SuiteReport { name: "residual".into(), seed: Some(seed), cases }
}

pub fn boundary_suite() -> SuiteReport {
    let mut cases = Vec::new();
    for p in [2u64, 3, 5] {
        for e in (1..p as usize).filter(|e| (p as usize - 1) % e == 0) {
            cases.push(case(format!("boundary p={p} e={e}"), boundary_phi(p, e).map(|b| (b.matches, b.i))));
        }
    }
    SuiteReport { name: "boundary".into(), seed: None, cases }
}

pub const SUITE_NAMES: [&str; 7] = ["cyclo", "split", "zp", "fl", "etale", "residual", "boundary"];

/// Runs the suites selected by `filter` (`all` or a suite name).
pub fn run_suites(filter: &str, seed: u64) -> Result<Vec<SuiteReport>> {
    let names: Vec<&str> = if filter == "all" {
        SUITE_NAMES.to_vec()
    } else if SUITE_NAMES.contains(&filter) {
        vec![filter]
    } else {
        return Err(Error::UnknownCheck(filter.to_string()));
    };
    Ok(names
        .into_iter()
        .map(|name| match name {
            "cyclo" => cyclo_suite(),
            "split" => split_suite(seed, 50),
            "zp" => zp_suite(seed, 30, 10),
            "fl" => fl_suite(seed, 20),
            "etale" => etale_suite(seed, 20),
            "residual" => residual_suite(seed),
            _ => boundary_suite(),
        })
        .collect())
}
