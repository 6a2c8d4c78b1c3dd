//! Frobenius modules over `S_n = W_n[[u]]` given by finite presentations,
//! and the structural checks on them: u-torsion, annihilators, the boundary
//! case, `Z_p`-shape, height and the twist of the u-torsion.
//!
//! A module is `S_n^g / (relations)` with `phi(e_j) = sum_i phi[j][i] e_i`.
//! The first `free_rank` generators carry no relations. Every computation
//! on a u-finite module happens in `W_n[u]/u^N` after a kill certificate
//! `u^b M = 0` has been established.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmod::{Ambient, FinPhi};
use crate::linalg::{elementary_divisors, RowSpan, Tracked};
use crate::series::EisensteinPoly;
use crate::trunc::{Trunc, TruncRing};
use crate::witt::Witt;

/// Polynomial in `u` with flat Witt coefficients, low degree first.
pub type Poly = Vec<u64>;

#[derive(Clone, Debug)]
pub struct PhiModule {
    pub w: Witt,
    pub g: usize,
    pub free_rank: usize,
    /// `relations[j][i]`: coefficient of `e_i` in relation `j`.
    pub relations: Vec<Vec<Poly>>,
    /// `phi[j][i]`: coefficient of `e_i` in `phi(e_j)`.
    pub phi: Vec<Vec<Poly>>,
}

/// A u-finite module realized inside `W_n[u]/u^N`.
#[derive(Clone, Debug)]
pub struct FiniteView {
    pub fin: FinPhi,
    /// Minimal `b` with `u^b M = 0`.
    pub kill: usize,
}

fn poly_is_zero(p: &[u64]) -> bool {
    p.iter().all(|&x| x == 0)
}

fn poly_degree(p: &[u64], m: usize) -> usize {
    (0..p.len() / m).rev().find(|&k| p[k * m..(k + 1) * m].iter().any(|&x| x != 0)).unwrap_or(0)
}

/// `phi` from `W_n[u]/u^N` into `W_n[u]/u^N'` for `N' <= p N`.
pub fn phi_into(dst: &TruncRing, s: &[u64]) -> Vec<u64> {
    let mut x = s.to_vec();
    x.resize(dst.dim(), 0);
    x.truncate(dst.dim());
    dst.phi(&x)
}

impl PhiModule {
    pub fn new(w: Witt, g: usize, free_rank: usize, relations: Vec<Vec<Poly>>, phi: Vec<Vec<Poly>>) -> Result<Self> {
        if free_rank > g || phi.len() != g {
            return Err(Error::Dimension(format!("expected {g} Frobenius images, got {}", phi.len())));
        }
        let m = w.m;
        for row in relations.iter().chain(phi.iter()) {
            if row.len() != g || row.iter().any(|c| c.len() % m != 0) {
                return Err(Error::Dimension("coefficient vector has the wrong shape".into()));
            }
        }
        for (j, r) in relations.iter().enumerate() {
            if r[..free_rank].iter().any(|c| !poly_is_zero(c)) {
                return Err(Error::Dimension(format!("relation {j} involves a free generator")));
            }
        }
        let z = w.z;
        let relations =
            relations.into_iter().map(|r| r.into_iter().map(|c| c.iter().map(|&x| z.reduce(x)).collect()).collect()).collect();
        let phi = phi.into_iter().map(|r| r.into_iter().map(|c| c.iter().map(|&x| z.reduce(x)).collect()).collect()).collect();
        Ok(PhiModule { w, g, free_rank, relations, phi })
    }

    /// Rank-one module `S_n / (rels)` with `phi(e) = phi_e`.
    pub fn cyclic(w: Witt, rels: Vec<Poly>, phi_e: Poly) -> Result<Self> {
        PhiModule::new(w, 1, 0, rels.into_iter().map(|r| vec![r]).collect(), vec![vec![phi_e]])
    }

    /// Free module of rank `g` with Frobenius matrix `phi`.
    pub fn free(w: Witt, phi: Vec<Vec<Poly>>) -> Result<Self> {
        let g = phi.len();
        PhiModule::new(w, g, g, Vec::new(), phi)
    }

    pub fn zero(w: Witt) -> Self {
        PhiModule { w, g: 0, free_rank: 0, relations: Vec::new(), phi: Vec::new() }
    }

    /// Direct sum, with free generators of both summands first.
    pub fn direct_sum(&self, other: &PhiModule) -> Result<PhiModule> {
        let (g1, g2) = (self.g, other.g);
        let (f1, f2) = (self.free_rank, other.free_rank);
        // New order: free of self, free of other, torsion of self, torsion of other.
        let pos1 = |i: usize| if i < f1 { i } else { f1 + f2 + (i - f1) };
        let pos2 = |i: usize| if i < f2 { f1 + i } else { f1 + f2 + (g1 - f1) + (i - f2) };
        let g = g1 + g2;
        let embed = |row: &[Poly], pos: &dyn Fn(usize) -> usize| {
            let mut out = vec![Vec::new(); g];
            for (i, c) in row.iter().enumerate() {
                out[pos(i)] = c.clone();
            }
            out
        };
        let mut relations = Vec::new();
        relations.extend(self.relations.iter().map(|r| embed(r, &pos1)));
        relations.extend(other.relations.iter().map(|r| embed(r, &pos2)));
        let mut phi = vec![Vec::new(); g];
        for (j, r) in self.phi.iter().enumerate() {
            phi[pos1(j)] = embed(r, &pos1);
        }
        for (j, r) in other.phi.iter().enumerate() {
            phi[pos2(j)] = embed(r, &pos2);
        }
        PhiModule::new(self.w.clone(), g, f1 + f2, relations, phi)
    }

    pub fn p(&self) -> u64 {
        self.w.z.p
    }

    pub fn n(&self) -> u32 {
        self.w.z.n
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn max_degree(&self) -> usize {
        let m = self.w.m;
        self.relations.iter().chain(self.phi.iter()).flatten().map(|c| poly_degree(c, m)).max().unwrap_or(0)
    }

    pub fn ambient(&self, len: usize) -> Ambient {
        Ambient::new(TruncRing::series(self.w.clone(), len.max(1)), self.g)
    }

    fn vec_of(&self, amb: &Ambient, row: &[Poly]) -> Vec<u64> {
        let blocks: Vec<Vec<u64>> = row.iter().map(|c| amb.ring.from_poly(c)).collect();
        amb.from_blocks(&blocks)
    }

    /// Relations as vectors of `amb`, reduced to its precision.
    pub fn relation_vecs(&self, amb: &Ambient) -> Vec<Vec<u64>> {
        let z = amb.z();
        self.relations
            .iter()
            .map(|r| {
                let rr: Vec<Poly> = r.iter().map(|c| c.iter().map(|&x| z.reduce(x)).collect()).collect();
                self.vec_of(amb, &rr)
            })
            .collect()
    }

    pub fn image_vecs(&self, amb: &Ambient) -> Vec<Vec<u64>> {
        let z = amb.z();
        self.phi
            .iter()
            .map(|r| {
                let rr: Vec<Poly> = r.iter().map(|c| c.iter().map(|&x| z.reduce(x)).collect()).collect();
                self.vec_of(amb, &rr)
            })
            .collect()
    }

    pub fn rel_span(&self, amb: &Ambient) -> RowSpan {
        amb.span(&self.relation_vecs(amb))
    }

    /// `phi(relation_j)` lies in the relation span for every `j`.
    pub fn check_phi(&self, amb: &Ambient) -> Result<()> {
        let span = self.rel_span(amb);
        let images = self.image_vecs(amb);
        for (j, r) in self.relation_vecs(amb).iter().enumerate() {
            if !span.contains(&amb.phi_vec(r, &images)) {
                return Err(Error::IllFormedPhi(j));
            }
        }
        Ok(())
    }

    /// Minimal `b` with `u^b M = 0`, certified inside `W_n[u]/u^N0` for
    /// `N0 = 4 max(p, deg + 1)`; `u^b e_k` in the relations plus `u^N0`
    /// with `b < N0` forces `u^b M = 0` by Nakayama.
    pub fn kill_exponent(&self) -> Result<usize> {
        if !self.is_finite() {
            return Err(Error::PrecisionTooLow("module has a free part".into()));
        }
        let n0 = 4 * (self.p() as usize).max(self.max_degree() + 1);
        let amb = self.ambient(n0);
        let span = self.rel_span(&amb);
        let killed = |b: usize| (0..self.g).all(|k| span.contains(&amb.elem_at(&amb.ring.u_pow(b), k)));
        if !killed(n0 - 1) {
            return Err(Error::PrecisionTooLow(format!("no u^b with b < {n0} kills the module")));
        }
        let (mut lo, mut hi) = (0usize, n0 - 1);
        if killed(0) {
            return Ok(0);
        }
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if killed(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// The module as a finite subquotient in `W_n[u]/u^max(b,1)`.
    pub fn finite_view(&self) -> Result<FiniteView> {
        let b = self.kill_exponent()?;
        let amb = self.ambient(b.max(1));
        self.check_phi(&amb)?;
        let rel = self.rel_span(&amb);
        let gens = (0..self.g).map(|i| amb.unit(i)).collect();
        let images = self.image_vecs(&amb);
        let p = self.p() as usize;
        let mut t = 0usize;
        while p.pow(t as u32) < b {
            t += 1;
        }
        Ok(FiniteView { fin: FinPhi::new(amb, gens, rel, images, t), kill: b })
    }

    /// `log_p |M|` for a u-finite module.
    pub fn length(&self) -> Result<usize> {
        Ok(self.finite_view()?.fin.length())
    }

    /// Same generators with relations and Frobenius reduced modulo `p^k`.
    pub fn reduce_mod_p_pow(&self, k: u32) -> Result<PhiModule> {
        let w = self.w.with_precision(k.min(self.n()))?;
        PhiModule::new(w, self.g, self.free_rank, self.relations.clone(), self.phi.clone())
    }
}

/// The u-power torsion submodule. For a module with a free part the
/// torsion generators must span a Frobenius-stable summand.
pub fn u_torsion(m: &PhiModule) -> Result<PhiModule> {
    if m.is_finite() {
        m.check_phi(&m.ambient(4 * (m.p() as usize).max(m.max_degree() + 1)))?;
        return Ok(m.clone());
    }
    let f = m.free_rank;
    for (j, row) in m.phi.iter().enumerate().skip(f) {
        if row[..f].iter().any(|c| !poly_is_zero(c)) {
            return Err(Error::IllFormedPhi(j));
        }
    }
    let relations = m.relations.iter().map(|r| r[f..].to_vec()).collect();
    let phi = m.phi[f..].iter().map(|r| r[f..].to_vec()).collect();
    let t = PhiModule::new(m.w.clone(), m.g - f, 0, relations, phi)?;
    if t.g > 0 {
        t.kill_exponent()?;
    }
    Ok(t)
}

/// Generators of `Ann(M)` inside `W_n[u]/u^(b+1)` for `u^b M = 0`.
fn ann_generators(m: &PhiModule, b: usize) -> (Trunc, Vec<Vec<u64>>) {
    let amb = m.ambient(b + 1);
    let r = amb.ring.clone();
    let g = m.g;
    let ad = amb.dim();
    let rel = m.relation_vecs(&amb);
    let rel_rows = amb.span(&rel).rows();
    // s -> (s e_0, ..., s e_{g-1}) modulo the relations in every block.
    let mut gens = Vec::new();
    let mut scalars = Vec::new();
    for k in 0..r.len {
        for t in 0..r.m() {
            let s = r.monomial(&crate::dp::pow_gen(&r.w, t), k);
            let mut v = Vec::with_capacity(g * ad);
            for i in 0..g {
                v.extend(amb.elem_at(&s, i));
            }
            gens.push(v);
            scalars.push(s);
        }
    }
    for blk in 0..g {
        for row in &rel_rows {
            let mut v = vec![0u64; g * ad];
            v[blk * ad..(blk + 1) * ad].copy_from_slice(row);
            gens.push(v);
        }
    }
    let tr = Tracked::new(amb.z(), g * ad, &gens);
    let ns = scalars.len();
    let ann = tr
        .kernel()
        .iter()
        .map(|c| {
            let mut s = r.zero();
            for (ci, sc) in c[..ns].iter().zip(&scalars) {
                if *ci != 0 {
                    s = r.add(&s, &r.scale_int(sc, *ci));
                }
            }
            s
        })
        .collect();
    (r, ann)
}

/// Minimal `alpha` with `Ann(M) + (p) = (u^alpha, p)`.
pub fn annihilator_alpha(m: &PhiModule) -> Result<usize> {
    let b = m.kill_exponent()?;
    if b == 0 {
        return Ok(0);
    }
    let (r, ann) = ann_generators(m, b);
    let alpha = ann.iter().filter_map(|s| r.order_mod_p(s)).min().unwrap_or(b);
    Ok(alpha.min(b))
}

/// p-exponents of the annihilator of a u-finite module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnExponents {
    /// Smallest `beta` with `p^beta` in `Ann(M)`.
    pub beta: u32,
    /// `Ann(M) + (u) = (u, p^gamma)`.
    pub gamma: u32,
}

pub fn annihilator_p_exponents(m: &PhiModule) -> Result<AnnExponents> {
    let b = m.kill_exponent()?;
    if b == 0 {
        return Ok(AnnExponents { beta: 0, gamma: 0 });
    }
    let amb = m.ambient(b);
    let rel = m.rel_span(&amb);
    let z = amb.z();
    let beta = (0..=m.n())
        .find(|&k| (0..m.g).all(|i| rel.contains(&amb.scale_int(&amb.unit(i), z.p_pow(k)))))
        .unwrap_or(m.n());
    let (r, ann) = ann_generators(m, b);
    let wr = &r.w;
    let gamma = ann
        .iter()
        .map(|s| r.coeff(s, 0))
        .filter(|c| c.iter().any(|&x| x != 0))
        .map(|c| wr.val(c))
        .min()
        .unwrap_or(m.n());
    Ok(AnnExponents { beta, gamma })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnInclusion {
    pub alpha: usize,
    pub lhs: usize,
    pub rhs: usize,
    pub holds: bool,
}

/// Whether `u^(e(i-1)) Ann(M) ⊆ phi(Ann(M)) S` holds at the level of
/// u-adic valuations: `e(i-1) + alpha >= p alpha`.
pub fn check_ann_inclusion(alpha: usize, e: usize, i: usize, p: u64) -> AnnInclusion {
    let lhs = e * i.saturating_sub(1) + alpha;
    let rhs = p as usize * alpha;
    AnnInclusion { alpha, lhs, rhs, holds: lhs >= rhs }
}

/// `check_ann_inclusion` for the annihilator of a module.
pub fn check_module_ann_inclusion(m: &PhiModule, e: usize, i: usize) -> Result<AnnInclusion> {
    Ok(check_ann_inclusion(annihilator_alpha(m)?, e, i, m.p()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryReport {
    /// `M` is killed by `p` and by `u`.
    pub killed_by_p_and_u: bool,
    /// `phi` is bijective on `M`.
    pub phi_bijective: bool,
    pub passes: bool,
}

/// At the boundary `e(i-1) = p-1`, the module is a `k`-vector space with
/// bijective Frobenius.
pub fn boundary_structure_check(m: &PhiModule, e: usize, i: usize) -> Result<BoundaryReport> {
    let p = m.p() as usize;
    if e * i.saturating_sub(1) != p - 1 {
        return Err(Error::BadRamification(format!("e(i-1) = {} differs from p-1 = {}", e * i.saturating_sub(1), p - 1)));
    }
    let view = m.finite_view()?;
    let fin = &view.fin;
    let by_p = (0..m.g).all(|k| fin.b.contains(&fin.amb.scale_int(&fin.amb.unit(k), p as u64 % fin.amb.z().q)));
    let killed = view.kill <= 1 && by_p;
    let phi_bijective = fin.bijective();
    Ok(BoundaryReport { killed_by_p_and_u: killed, phi_bijective, passes: killed && phi_bijective })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZpShape {
    /// `M = ⊕ S/p^(a_i)`, exponents sorted ascending.
    Exponents(Vec<u32>),
    /// `M/p^j` has u-torsion; `witness` is a vector of `(W_j[u]/u^T)^g`.
    Refuted { j: u32, truncation: usize, witness: Vec<u64> },
}

/// A vector of `M/(p^j, u^t)` killed by `u` but outside `u^(t-1) M`, if any.
pub fn u_torsion_witness(m: &PhiModule, j: u32, t: usize) -> Result<Option<Vec<u64>>> {
    let mj = m.reduce_mod_p_pow(j)?;
    let amb = mj.ambient(t);
    let rel = mj.rel_span(&amb);
    let rel_rows = rel.rows();
    let basis = amb.coordinate_basis();
    let u = amb.ring.u_pow(1);
    let mut gens: Vec<Vec<u64>> = basis.iter().map(|v| amb.mul_elem(&u, v)).collect();
    gens.extend(rel_rows.iter().cloned());
    let tr = Tracked::new(amb.z(), amb.dim(), &gens);
    let mut top = rel.clone();
    let ut = amb.ring.u_pow(t - 1);
    for i in 0..m.g {
        top.extend(amb.multiples_from(&amb.elem_at(&ut, i), 0));
    }
    let nb = basis.len();
    for c in tr.kernel() {
        let x = crate::linalg::combine(&amb.z(), amb.dim(), &c[..nb], &basis);
        if !top.contains(&x) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// Exponents of `M/uM` as a `W_n`-module, from the Smith form of the
/// relations at `u = 0`.
pub fn constant_exponents(m: &PhiModule) -> Result<Vec<u32>> {
    let w = &m.w;
    let mm = w.m;
    let n = m.n();
    let mut rows = Vec::new();
    for r in &m.relations {
        for t in 0..mm {
            let xt = crate::dp::pow_gen(w, t);
            let mut row = Vec::with_capacity(m.g * mm);
            for c in r {
                let c0: Vec<u64> = if c.len() >= mm { c[..mm].to_vec() } else { w.zero() };
                row.extend(w.mul(&c0, &xt));
            }
            rows.push(row);
        }
    }
    let divs = elementary_divisors(w.z, &rows, m.g * mm);
    let mut exps: Vec<u32> = divs.iter().map(|&v| v).filter(|&v| v > 0).collect();
    exps.extend(std::iter::repeat(n).take(m.g * mm - divs.len()));
    exps.sort_unstable();
    // Each W/p^a contributes m copies of Z/p^a.
    let mut out = Vec::new();
    let mut i = 0;
    while i < exps.len() {
        let v = exps[i];
        let c = exps[i..].iter().take_while(|&&x| x == v).count();
        if c % mm != 0 {
            return Err(Error::Inconsistent);
        }
        out.extend(std::iter::repeat(v).take(c / mm));
        i += c;
    }
    Ok(out)
}

/// `log_p |M/(p^j, u^t)|`.
pub fn truncated_length(m: &PhiModule, j: u32, t: usize) -> Result<usize> {
    let mj = m.reduce_mod_p_pow(j)?;
    let amb = mj.ambient(t);
    Ok(amb.whole().len() - mj.rel_span(&amb).len())
}

/// Decides whether `M` is a sum of `S/p^(a_i)`. Each `M/p^j` is tested for
/// u-torsion at truncations `T` and `2T`; the exponents read off `M/uM` are
/// then certified against the lengths of `M/(p^j, u^T)`.
pub fn zp_shape(m: &PhiModule) -> Result<ZpShape> {
    let t0 = 4 * (m.p() as usize).max(m.max_degree() + 1);
    for j in 1..=m.n() {
        for t in [t0, 2 * t0] {
            if let Some(witness) = u_torsion_witness(m, j, t)? {
                return Ok(ZpShape::Refuted { j, truncation: t, witness });
            }
        }
    }
    let exps = constant_exponents(m)?;
    let mm = m.w.m;
    for j in 1..=m.n() {
        let expect: usize = exps.iter().map(|&a| a.min(j) as usize).sum::<usize>() * t0 * mm;
        if truncated_length(m, j, t0)? != expect {
            return Err(Error::Inconsistent);
        }
    }
    Ok(ZpShape::Exponents(exps))
}

/// A Frobenius module together with `psi : M -> phi^* M`,
/// `psi(e_j) = sum_i psi[j][i] (1 ⊗ e_i)`.
#[derive(Clone, Debug)]
pub struct KisinModule {
    pub module: PhiModule,
    pub eis: EisensteinPoly,
    pub h: usize,
    pub psi: Vec<Vec<Poly>>,
}

fn matrix_vec(amb: &Ambient, rows: &[Vec<Poly>]) -> Vec<Vec<u64>> {
    rows.iter()
        .map(|r| {
            let blocks: Vec<Vec<u64>> = r.iter().map(|c| amb.ring.from_poly(c)).collect();
            amb.from_blocks(&blocks)
        })
        .collect()
}

/// `sum_i a_ji x_i` for a matrix given by rows of vectors.
fn compose(amb: &Ambient, a: &[Vec<u64>], x: &[Vec<u64>]) -> Vec<Vec<u64>> {
    a.iter()
        .map(|row| {
            let mut out = amb.zero();
            for (i, xi) in x.iter().enumerate() {
                let c = amb.block(row, i);
                if c.iter().any(|&v| v != 0) {
                    out = amb.add(&out, &amb.mul_elem(c, xi));
                }
            }
            out
        })
        .collect()
}

/// `psi o (1 ⊗ phi) = E^h` on `phi^* M` and `(1 ⊗ phi) o psi = E^h` on `M`.
pub fn height_check(k: &KisinModule) -> Result<bool> {
    let m = &k.module;
    let g = m.g;
    if k.psi.len() != g || k.psi.iter().any(|r| r.len() != g) {
        return Err(Error::Dimension("psi has the wrong shape".into()));
    }
    let p = m.p() as usize;
    let (len_m, len_pm) = if m.is_finite() {
        let b = m.kill_exponent()?;
        (b.max(1), (p * b).max(1))
    } else if !m.relations.is_empty() {
        return Err(Error::Dimension("height check needs a free or u-finite module".into()));
    } else {
        let mut dmax = m.max_degree();
        for r in &k.psi {
            for c in r {
                dmax = dmax.max(poly_degree(c, m.w.m));
            }
        }
        let l = 2 * dmax + k.eis.e * k.h + 2;
        (l, l)
    };
    let eh = |amb: &Ambient| {
        let e = amb.ring.from_poly(&k.eis.coeffs_in(&m.w));
        amb.ring.pow(&e, k.h as u64)
    };
    // (1 ⊗ phi) o psi on M.
    let amb = m.ambient(len_m);
    let rel = m.rel_span(&amb);
    let phi_rows = matrix_vec(&amb, &m.phi);
    let psi_rows = matrix_vec(&amb, &k.psi);
    let e_h = eh(&amb);
    for (j, v) in compose(&amb, &psi_rows, &phi_rows).iter().enumerate() {
        let d = amb.sub(v, &amb.elem_at(&e_h, j));
        if !rel.contains(&d) {
            return Ok(false);
        }
    }
    // psi o (1 ⊗ phi) on phi^* M.
    let amb2 = m.ambient(len_pm);
    let prel: Vec<Vec<u64>> = m.relation_vecs(&m.ambient(len_m)).iter().map(|r| twist_vec(&amb, &amb2, r)).collect();
    let prel = amb2.span(&prel);
    let phi2 = matrix_vec(&amb2, &m.phi);
    let psi2 = matrix_vec(&amb2, &k.psi);
    let e_h2 = eh(&amb2);
    for (j, v) in compose(&amb2, &phi2, &psi2).iter().enumerate() {
        let d = amb2.sub(v, &amb2.elem_at(&e_h2, j));
        if !prel.contains(&d) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `sum s_k e_k -> sum phi(s_k) (1 ⊗ e_k)` from `src` into `dst`.
pub fn twist_vec(src: &Ambient, dst: &Ambient, v: &[u64]) -> Vec<u64> {
    let blocks: Vec<Vec<u64>> = (0..src.d).map(|i| phi_into(&dst.ring, src.block(v, i))).collect();
    dst.from_blocks(&blocks)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistReport {
    /// `log_p |M[u]|`.
    pub len_source: usize,
    /// `log_p |(phi^* M)[u]|`.
    pub len_target: usize,
    /// `log_p` of the image of `M[u]`.
    pub len_image: usize,
    pub is_iso: bool,
}

/// Kernel of `u` on `R^g / rel`, as a span containing `rel`.
fn u_kernel(amb: &Ambient, rel: &RowSpan) -> RowSpan {
    let basis = amb.coordinate_basis();
    let u = amb.ring.u_pow(1);
    let mut gens: Vec<Vec<u64>> = basis.iter().map(|v| amb.mul_elem(&u, v)).collect();
    gens.extend(rel.rows());
    let tr = Tracked::new(amb.z(), amb.dim(), &gens);
    let nb = basis.len();
    let mut out = rel.clone();
    for c in tr.kernel() {
        out.insert(crate::linalg::combine(&amb.z(), amb.dim(), &c[..nb], &basis));
    }
    out
}

/// `M[u] -> (phi^* M)[u]`, `sum s_k e_k -> sum phi(s_k) u^(p-1) (1 ⊗ e_k)`.
pub fn twist_u_torsion_iso(m: &PhiModule) -> Result<TwistReport> {
    let t = u_torsion(m)?;
    if t.g == 0 {
        return Ok(TwistReport { len_source: 0, len_target: 0, len_image: 0, is_iso: true });
    }
    let b = t.kill_exponent()?;
    let p = t.p() as usize;
    let amb = t.ambient(b.max(1));
    let amb2 = t.ambient((p * b).max(1));
    let rel = t.rel_span(&amb);
    let prel_vecs: Vec<Vec<u64>> = t.relation_vecs(&amb).iter().map(|r| twist_vec(&amb, &amb2, r)).collect();
    let prel = amb2.span(&prel_vecs);
    let src = u_kernel(&amb, &rel);
    let tgt = u_kernel(&amb2, &prel);
    let up = amb2.ring.u_pow(p - 1);
    let mut img = prel.clone();
    for x in src.rows() {
        img.insert(amb2.mul_elem(&up, &twist_vec(&amb, &amb2, &x)));
    }
    let len_source = src.len() - rel.len();
    let len_target = tgt.len() - prel.len();
    let len_image = img.len() - prel.len();
    Ok(TwistReport {
        len_source,
        len_target,
        len_image,
        is_iso: len_source == len_image && len_image == len_target && tgt.contains_span(&img),
    })
}

/// `W_n[u]/u^len` over the module's Witt ring.
pub fn series_ring(w: &Witt, len: usize) -> Trunc {
    TruncRing::series(w.clone(), len)
}
