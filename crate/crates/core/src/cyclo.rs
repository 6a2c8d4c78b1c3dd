//! The cyclotomic family: `E = d(u)` the minimal polynomial of `ζ_(p^n) - 1`,
//! `q_n = (u+1)^(p^n) - 1 = d · ((u+1)^(p^(n-1)) - 1)`.
//!
//! Computations here: the kernel of `f -> phi(f) - d f` on bounded-degree
//! polynomials, the torsion module `𝔖/((u+1)^(p^(n-1)) - 1, p^n)` with
//! `phi = 1` and its annihilator exponent, and the minimal number of
//! generators of `J = {x ∈ S : p^n | x q_n}`.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmod::FinPhi;
use crate::linalg::{combine, RowSpan, Tracked};
use crate::phi_modules::{
    annihilator_alpha, boundary_structure_check, check_ann_inclusion, u_torsion, AnnInclusion, BoundaryReport,
    PhiModule,
};
use crate::series::{shifted_cyclotomic_int, EisensteinPoly};
use crate::trunc::TruncRing;
use crate::witt::WittRing;
use crate::zpn::Zpn;

#[derive(Clone, Debug)]
pub struct CycloInstance {
    pub p: u64,
    pub n: u32,
    pub d: EisensteinPoly,
    pub e: usize,
    /// Integer coefficients of `q_n`.
    pub q_n: Vec<u64>,
    /// Integer coefficients of `(u+1)^(p^(n-1)) - 1`.
    pub g: Vec<u64>,
    /// Degree bound for the kernel computation.
    pub bound: usize,
    /// Divided-power degree for `J`.
    pub dp_degree: usize,
    /// Extra p-adic digits carried when computing `J`.
    pub slack: u32,
}

fn ceil_div(a: usize, b: usize) -> usize {
    a.div_ceil(b)
}

impl CycloInstance {
    pub fn new(p: u64, n: u32, bound: Option<usize>, dp_degree: Option<usize>) -> Result<Self> {
        let w = WittRing::default_for(p, n.max(1), 1)?;
        let d = EisensteinPoly::cyclotomic(&w, n)?;
        let e = d.e;
        let pn = p.pow(n);
        let q_n = shifted_cyclotomic_int(pn);
        let g = shifted_cyclotomic_int(pn / p);
        let pm1 = (p - 1) as usize;
        let bound = bound.unwrap_or_else(|| ceil_div(4 * e, pm1).max(e + 2 * ceil_div(e, pm1)));
        let dp_degree = dp_degree.unwrap_or(2 * pn as usize * e);
        let inst = CycloInstance { p, n, d, e, q_n, g, bound, dp_degree, slack: 0 };
        if !inst.factorization_holds() {
            return Err(Error::Inconsistent);
        }
        Ok(inst)
    }

    /// `d · ((u+1)^(p^(n-1)) - 1) = q_n` over the integers.
    pub fn factorization_holds(&self) -> bool {
        let d: Vec<i128> = self.d.coeffs.iter().map(|&c| c as i128).collect();
        let mut prod = vec![0i128; d.len() + self.g.len() - 1];
        for (i, &a) in d.iter().enumerate() {
            for (j, &b) in self.g.iter().enumerate() {
                prod[i + j] += a * b as i128;
            }
        }
        prod.len() == self.q_n.len() && prod.iter().zip(&self.q_n).all(|(&a, &b)| a == b as i128)
    }

    /// `d ≡ u^e` mod `p`.
    pub fn d_is_u_power_mod_p(&self) -> bool {
        self.d.coeffs.iter().enumerate().all(|(k, &c)| c % self.p == u64::from(k == self.e))
    }

    /// `(u+1)^(p^n) ≡ (u^p + 1)^(p^(n-1))` mod `p^n`.
    pub fn frobenius_congruence(&self) -> bool {
        let q = self.p.pow(self.n);
        let lhs = &self.q_n;
        let inner = shifted_cyclotomic_int(self.p.pow(self.n - 1));
        let mut rhs = vec![0u64; lhs.len()];
        for (k, &c) in inner.iter().enumerate() {
            rhs[k * self.p as usize] = c;
        }
        lhs.iter().zip(&rhs).all(|(&a, &b)| a % q == b % q)
    }

    /// `bound >= 4e/(p-1)`.
    pub fn bound_is_certified(&self) -> bool {
        self.bound * (self.p as usize - 1) >= 4 * self.e
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub p: u64,
    pub n: u32,
    pub m: u32,
    pub bound: usize,
    /// Howell generators of the kernel over `Z/p^m`, low degree first.
    pub generators: Vec<Vec<u64>>,
    /// `(u+1)^(p^(n-1)) - 1` mod `p^m`.
    pub expected: Vec<u64>,
    /// The kernel is `Z/p^m` times `expected`.
    pub cyclic: bool,
    /// `phi(g) - d g = 0` mod `p^m` for the expected generator.
    pub closed: bool,
}

fn poly_phi_minus_d(z: &Zpn, p: usize, d: &[u64], f: &[u64], ncols: usize) -> Vec<u64> {
    let mut out = vec![0u64; ncols];
    for (k, &c) in f.iter().enumerate() {
        if c == 0 {
            continue;
        }
        out[p * k] = z.add(out[p * k], c);
        for (j, &dj) in d.iter().enumerate() {
            out[k + j] = z.sub(out[k + j], z.mul(c, dj % z.q));
        }
    }
    out
}

/// Kernel of `f -> phi(f) - d f` on polynomials of degree `<= bound` over `Z/p^m`.
pub fn ker_phi_minus_d(inst: &CycloInstance, m: u32) -> Result<KernelReport> {
    if m == 0 || m > inst.n {
        return Err(Error::Dimension(format!("need 1 <= m <= n, got m = {m}")));
    }
    if !inst.bound_is_certified() {
        return Err(Error::BoundTooSmall(inst.bound));
    }
    let z = Zpn::new(inst.p, m)?;
    let b = inst.bound;
    let p = inst.p as usize;
    let ncols = (p * b).max(b + inst.e) + 1;
    let rows: Vec<Vec<u64>> = (0..=b)
        .map(|k| {
            let mut f = vec![0u64; b + 1];
            f[k] = 1;
            poly_phi_minus_d(&z, p, &inst.d.coeffs, &f, ncols)
        })
        .collect();
    let ker = RowSpan::from_rows(z, b + 1, Tracked::new(z, ncols, &rows).kernel());
    let band = (b + 1).saturating_sub(inst.e)..=b;
    let generators = ker.howell_form();
    if generators.iter().any(|r| band.clone().any(|k| r[k] != 0)) {
        return Err(Error::BoundaryContamination);
    }
    let mut expected = vec![0u64; b + 1];
    for (k, &c) in inst.g.iter().enumerate() {
        if k > b {
            return Err(Error::BoundTooSmall(b));
        }
        expected[k] = c % z.q;
    }
    let target = RowSpan::from_rows(z, b + 1, [expected.clone()]);
    let cyclic = ker.same_span(&target) && ker.len() == m as usize;
    let closed = poly_phi_minus_d(&z, p, &inst.d.coeffs, &expected, ncols).iter().all(|&c| c == 0);
    Ok(KernelReport { p: inst.p, n: inst.n, m, bound: b, generators, expected, cyclic, closed })
}

/// `𝔖_n / ((u+1)^(p^(n-1)) - 1) · g` with `phi(g) = g`.
pub fn h2_module(inst: &CycloInstance) -> Result<PhiModule> {
    let w = WittRing::default_for(inst.p, inst.n, 1)?;
    PhiModule::cyclic(w, vec![inst.g.clone()], vec![1])
}

/// `log_p` of `{x ∈ A/B : phi(x) = x}`.
pub fn fixed_length(fin: &FinPhi) -> usize {
    let amb = &fin.amb;
    let z = amb.z();
    let basis = fin.a.rows();
    let nb = basis.len();
    let mut gens: Vec<Vec<u64>> = basis.iter().map(|x| amb.sub(&fin.phi(x), x)).collect();
    gens.extend(fin.b.rows());
    let tr = Tracked::new(z, amb.dim(), &gens);
    let mut fixed = fin.b.clone();
    for c in tr.kernel() {
        fixed.insert(combine(&z, amb.dim(), &c[..nb], &basis));
    }
    fixed.len() - fin.b.len()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct H2Report {
    pub p: u64,
    pub n: u32,
    pub e: usize,
    pub i: usize,
    pub length: usize,
    pub u_torsion_is_whole: bool,
    pub alpha: usize,
    pub expected_alpha: usize,
    pub inclusion: AnnInclusion,
    pub boundary: Option<BoundaryReport>,
    /// `F_p`-dimension of the Frobenius fixed points of the module mod `p`.
    pub fixed_dim_mod_p: usize,
    /// `alpha = e(i-1)/(p-1)`.
    pub sharp: bool,
    pub passes: bool,
}

pub fn h2_torsion_report(inst: &CycloInstance) -> Result<H2Report> {
    let i = 2;
    let m = h2_module(inst)?;
    let length = m.length()?;
    let tors = u_torsion(&m)?;
    let u_torsion_is_whole = tors.length()? == length;
    let alpha = annihilator_alpha(&m)?;
    let expected_alpha = inst.p.pow(inst.n - 1) as usize;
    let inclusion = check_ann_inclusion(alpha, inst.e, i, inst.p);
    let boundary = if inst.n == 1 { Some(boundary_structure_check(&m, inst.e, i)?) } else { None };
    let fixed_dim_mod_p = fixed_length(&m.reduce_mod_p_pow(1)?.finite_view()?.fin);
    let sharp = alpha * (inst.p as usize - 1) == inst.e * (i - 1);
    let passes = u_torsion_is_whole
        && alpha == expected_alpha
        && inclusion.holds
        && boundary.as_ref().is_none_or(|b| b.passes)
        && fixed_dim_mod_p == 1
        && sharp;
    Ok(H2Report {
        p: inst.p,
        n: inst.n,
        e: inst.e,
        i,
        length,
        u_torsion_is_whole,
        alpha,
        expected_alpha,
        inclusion,
        boundary,
        fixed_dim_mod_p,
        sharp,
        passes,
    })
}

/// `dim_k J / (m J + J ∩ T)` in `S / (p^(2n), T_len)`, where `T` is spanned by
/// the basis elements of degree at least `cut`.
fn ideal_j_mu_at(inst: &CycloInstance, len: usize, cut: usize) -> Result<usize> {
    let w = WittRing::default_for(inst.p, 2 * inst.n + inst.slack, 1)?;
    let r = TruncRing::divided_power(w, inst.e, len)?;
    let z = *r.z();
    let dim = r.dim();
    let q = r.from_poly(&inst.q_n.iter().map(|&c| c % z.q).collect::<Vec<_>>());
    let pn = z.p_pow(inst.n);
    let mut gens: Vec<Vec<u64>> = (0..dim).map(|k| r.mul(&r.basis(k), &q)).collect();
    gens.extend((0..dim).map(|k| r.scale_int(&r.basis(k), pn)));
    let tr = Tracked::new(z, dim, &gens);
    let j = RowSpan::from_rows(z, dim, tr.kernel().into_iter().map(|c| c[..dim].to_vec()));
    let j_rows = j.rows();
    let tail: Vec<Vec<u64>> = (cut..len).map(|k| r.basis(k)).collect();
    let mut mj = RowSpan::from_rows(z, dim, tail.iter().cloned());
    let mut jt = mj.clone();
    jt.extend(j_rows.iter().cloned());
    for x in &j_rows {
        mj.insert(r.scale_int(x, z.p % z.q));
        for k in 1..len {
            mj.insert(r.mul_basis(x, k));
        }
    }
    Ok(jt.len() - mj.len())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealJReport {
    pub p: u64,
    pub n: u32,
    pub dp_degree: usize,
    pub mu: usize,
    pub mu_refined: usize,
}

/// Minimal number of generators of `J`, certified stable under `D -> D + e`.
pub fn ideal_j_mingens(inst: &CycloInstance) -> Result<IdealJReport> {
    let d = inst.dp_degree;
    let need = 2 * inst.p.pow(inst.n) as usize * inst.e;
    if d < need {
        return Err(Error::BoundTooSmall(d));
    }
    let mu = ideal_j_mu_at(inst, d, d / 2)?;
    let mu_refined = ideal_j_mu_at(inst, d + inst.e, (d + inst.e) / 2)?;
    if mu != mu_refined {
        return Err(Error::Unstable(format!("mu changes from {mu} to {mu_refined} under D -> D + e")));
    }
    Ok(IdealJReport { p: inst.p, n: inst.n, dp_degree: d, mu, mu_refined })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRow {
    pub p: u64,
    pub n: u32,
    pub e: usize,
    pub i: usize,
    pub alpha: usize,
    /// `e(i-1)/(p-1)` as a fraction.
    pub bound_num: usize,
    pub bound_den: usize,
    pub equal: bool,
    pub millis: f64,
}

pub fn sharpness_report(instances: &[(u64, u32)]) -> Result<Vec<SharpnessRow>> {
    instances
        .iter()
        .map(|&(p, n)| {
            let start = Instant::now();
            let inst = CycloInstance::new(p, n, None, None)?;
            let rep = h2_torsion_report(&inst)?;
            let (num, den) = (inst.e * (rep.i - 1), p as usize - 1);
            Ok(SharpnessRow {
                p,
                n,
                e: inst.e,
                i: rep.i,
                alpha: rep.alpha,
                bound_num: num,
                bound_den: den,
                equal: rep.alpha * den == num,
                millis: start.elapsed().as_secs_f64() * 1e3,
            })
        })
        .collect()
}

/// The instances of the sharpness table.
pub const SHARPNESS_INSTANCES: [(u64, u32); 4] = [(2, 1), (3, 1), (5, 1), (2, 2)];
