//! Conversion of a parsed document into the core module types.

use prismalab_core::breuil::BreuilModule;
use prismalab_core::etale::EtalePhiModule;
use prismalab_core::fl::FLModule;
use prismalab_core::fmod::Ambient;
use prismalab_core::phi_modules::{KisinModule, PhiModule, Poly};
use prismalab_core::s1::S1Ring;
use prismalab_core::series::EisensteinPoly;
use prismalab_core::trunc::TruncRing;
use prismalab_core::witt::{Witt, WittRing};
use prismalab_core::{Error, Result};

use crate::doc::{Document, FilRow, Literal, ModuleKind};

pub fn witt(doc: &Document) -> Result<Witt> {
    let r = &doc.ring;
    match &r.f {
        Some(f) => {
            if f.len() != r.m + 1 {
                return Err(Error::BadRing(format!("f has degree {} but m = {}", f.len().saturating_sub(1), r.m)));
            }
            WittRing::new(r.p, r.n, f.clone())
        }
        None => WittRing::default_for(r.p, r.n, r.m),
    }
}

fn witt_coeff(w: &WittRing, c: &[i64]) -> Result<Vec<u64>> {
    if c.len() > w.m {
        return Err(Error::Dimension(format!("Witt coefficient has {} entries, m = {}", c.len(), w.m)));
    }
    let mut out: Vec<u64> = c.iter().map(|&x| w.z.from_i64(x)).collect();
    out.resize(w.m, 0);
    Ok(out)
}

/// A polynomial in `u` with flat Witt coefficients.
pub fn poly(w: &WittRing, lit: &Literal) -> Result<Poly> {
    let m = w.m;
    let deg = lit.terms().iter().map(|t| t.exp).max().unwrap_or(0);
    let mut out = vec![0u64; (deg + 1) * m];
    for t in lit.terms() {
        if t.dp {
            return Err(Error::BadRing(format!("divided power u^{}/dp({}) in a series literal", t.exp, t.exp)));
        }
        out[t.exp * m..(t.exp + 1) * m].copy_from_slice(&witt_coeff(w, &t.coeff)?);
    }
    Ok(out)
}

/// A constant Witt vector; `u` is not allowed.
pub fn constant(w: &WittRing, lit: &Literal) -> Result<Vec<u64>> {
    if lit.terms().iter().any(|t| t.exp > 0) {
        return Err(Error::BadRing(format!("expected a constant, got '{lit}'")));
    }
    match lit.terms().first() {
        Some(t) => witt_coeff(w, &t.coeff),
        None => Ok(w.zero()),
    }
}

/// An element of a truncated ring; `u^k/dp(k)` is the basis element `b_k`.
pub fn ring_elem(r: &TruncRing, lit: &Literal) -> Result<Vec<u64>> {
    let w = &r.w;
    let mut out = r.zero();
    for t in lit.terms() {
        let c = witt_coeff(w, &t.coeff)?;
        let x = if t.dp { r.monomial(&c, t.exp) } else { r.scale_witt(&r.u_pow(t.exp), &c) };
        out = r.add(&out, &x);
    }
    Ok(out)
}

fn vec_in(amb: &Ambient, row: &[Literal]) -> Result<Vec<u64>> {
    let blocks = row.iter().map(|l| ring_elem(&amb.ring, l)).collect::<Result<Vec<_>>>()?;
    Ok(amb.from_blocks(&blocks))
}

fn matrix(w: &WittRing, rows: &[Vec<Literal>]) -> Result<Vec<Vec<Poly>>> {
    rows.iter().map(|r| r.iter().map(|l| poly(w, l)).collect()).collect()
}

/// Integer lifts of `E`, with negative coefficients taken modulo `p^(n+2)`.
pub fn eisenstein(doc: &Document, w: &WittRing, lit: &Literal) -> Result<EisensteinPoly> {
    let p = doc.ring.p;
    let modulus = p
        .checked_pow(doc.ring.n + 2)
        .and_then(|v| i64::try_from(v).ok())
        .ok_or_else(|| Error::BadRing("p^(n+2) does not fit in 64 bits".into()))?;
    let m = w.m;
    let deg = lit.terms().iter().map(|t| t.exp).max().unwrap_or(0);
    let mut coeffs = vec![0u64; (deg + 1) * m];
    for t in lit.terms() {
        if t.dp || t.coeff.len() > m {
            return Err(Error::NotEisenstein(format!("bad term in '{lit}'")));
        }
        for (k, &c) in t.coeff.iter().enumerate() {
            coeffs[t.exp * m + k] = if c < 0 { c.rem_euclid(modulus) as u64 } else { c as u64 };
        }
    }
    EisensteinPoly::explicit_ints(p, w.f.clone(), coeffs)
}

/// `u^e + p`.
pub fn default_eisenstein(w: &WittRing, e: usize) -> Result<EisensteinPoly> {
    let m = w.m;
    let mut coeffs = vec![0u64; (e + 1) * m];
    coeffs[0] = w.z.p;
    coeffs[e * m] = 1;
    EisensteinPoly::explicit_ints(w.z.p, w.f.clone(), coeffs)
}

fn need<T: Copy>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::Dimension(format!("module needs '{what}'")))
}

fn rows_exact(rows: &[Vec<Literal>], g: usize, block: &str) -> Result<()> {
    if rows.len() != g {
        return Err(Error::Dimension(format!("[{block}] has {} rows, expected g = {g}", rows.len())));
    }
    Ok(())
}

/// The Frobenius module of a `phi` or `kisin` document, checked to be
/// well defined inside `W_n[u]/u^N`.
pub fn phi_module(doc: &Document, n_trunc: Option<usize>) -> Result<PhiModule> {
    let w = witt(doc)?;
    let md = &doc.module;
    rows_exact(&doc.phi, md.g, "phi")?;
    let m = PhiModule::new(w.clone(), md.g, md.free, matrix(&w, &md.relations)?, matrix(&w, &doc.phi)?)?;
    let n0 = n_trunc.unwrap_or(4 * (m.p() as usize).max(m.max_degree() + 1));
    m.check_phi(&m.ambient(n0.max(1)))?;
    Ok(m)
}

pub fn kisin_module(doc: &Document, n_trunc: Option<usize>) -> Result<KisinModule> {
    let module = phi_module(doc, n_trunc)?;
    let w = module.w.clone();
    let eis = eisenstein(doc, &w, doc.module.eis.as_ref().ok_or_else(|| Error::Dimension("module needs 'E'".into()))?)?;
    rows_exact(&doc.psi, doc.module.g, "psi")?;
    let psi = matrix(&w, &doc.psi)?;
    Ok(KisinModule { module, eis, h: need(doc.module.h, "h")?, psi })
}

pub fn breuil_module(doc: &Document) -> Result<BreuilModule> {
    let w = witt(doc)?;
    let md = &doc.module;
    let eis = eisenstein(doc, &w, md.eis.as_ref().ok_or_else(|| Error::Dimension("module needs 'E'".into()))?)?;
    let s1 = match md.dz {
        Some(dz) => S1Ring::new(&w, &eis, dz)?,
        None => S1Ring::with_default_dz(&w, &eis)?,
    };
    let amb = Ambient::new(s1.ring().clone(), md.g);
    let relations = md.relations.iter().map(|r| vec_in(&amb, r)).collect::<Result<Vec<_>>>()?;
    let (mut gens, mut images, mut nabla) = (Vec::new(), Vec::new(), Vec::new());
    for row in &doc.fil {
        match row {
            FilRow::Top { gen, image } => {
                gens.push(vec_in(&amb, gen)?);
                images.push(vec_in(&amb, image)?);
            }
            FilRow::Nabla { image } => nabla.push(vec_in(&amb, image)?),
            _ => return Err(Error::Dimension("Breuil modules take 'x -> y' and 'nabla:' rows".into())),
        }
    }
    let nabla = if nabla.is_empty() { None } else { Some(nabla) };
    BreuilModule::new(s1, md.g, need(md.h, "h")?, relations, gens, images, nabla)
}

pub fn fl_module(doc: &Document) -> Result<FLModule> {
    let w = witt(doc)?;
    let md = &doc.module;
    let h = need(md.h, "h")?;
    let exps = md.exps.clone().unwrap_or_else(|| vec![w.z.n; md.g]);
    if exps.len() != md.g {
        return Err(Error::Dimension(format!("exps has {} entries, expected g = {}", exps.len(), md.g)));
    }
    let flat = |row: &[Literal]| -> Result<Vec<u64>> {
        let mut v = Vec::with_capacity(md.g * w.m);
        for l in row {
            v.extend(constant(&w, l)?);
        }
        Ok(v)
    };
    let mut fil = vec![Vec::new(); h + 1];
    let mut phis = vec![Vec::new(); h + 1];
    let mut comps = vec![Vec::new(); h + 1];
    for row in &doc.fil {
        match row {
            FilRow::Level { level, gen, image } if *level <= h => {
                fil[*level].push(flat(gen)?);
                phis[*level].push(flat(image)?);
            }
            FilRow::Complement { level, gen } if *level <= h => comps[*level].push(flat(gen)?),
            FilRow::Level { level, .. } | FilRow::Complement { level, .. } => {
                return Err(Error::Dimension(format!("filtration level {level} exceeds h = {h}")))
            }
            _ => return Err(Error::Dimension("FL modules take 'fil i:' and 'comp i:' rows".into())),
        }
    }
    FLModule::new(w, exps, h, fil, phis, comps)
}

pub fn etale_module(doc: &Document) -> Result<EtalePhiModule> {
    let w = witt(doc)?;
    rows_exact(&doc.phi, doc.module.g, "phi")?;
    let a = doc
        .phi
        .iter()
        .map(|r| r.iter().map(|l| constant(&w, l)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    EtalePhiModule::new(w, a)
}

pub fn kind_needs_module(kind: ModuleKind) -> bool {
    kind != ModuleKind::Cyclo
}
