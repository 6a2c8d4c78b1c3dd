//! `S_1 = S/p` truncated at `D = e p^(Dz+1)`, which kills the classes
//! `z_i = gamma_{p^i}(E)` for `i > Dz`.
//!
//! Modulo p the filtration `Fil^i S_1` is spanned by `b_k` with `k >= e i`,
//! and the divided Frobenius has a closed form on the basis: writing
//! `k = a + e t` with `a < e`, `phi_i(b_k) = u^(pa) c1^t / unit(t!)` when
//! `t - v_p(t!) = i`, and `0` otherwise.

use crate::dp::DpRing;
use crate::error::{Error, Result};
use crate::series::EisensteinPoly;
use crate::trunc::Trunc;
use crate::witt::{Witt, WittRing};
use crate::zpn::{factorial_unit, val_factorial};

#[derive(Clone, Debug)]
pub struct S1Ring {
    pub dp: DpRing,
    pub dz: u32,
    pub c1: Vec<u64>,
    pub c1_inv: Vec<u64>,
    c1_pows: Vec<Vec<u64>>,
}

/// Largest `Dz <= 3` with `e p^(Dz+1) <= 100`, and at least 1.
pub fn default_dz(p: u64, e: usize) -> u32 {
    let mut dz = 1;
    for cand in 1..=3u32 {
        if (e as u64).saturating_mul(p.saturating_pow(cand + 1)) <= 100 {
            dz = cand;
        }
    }
    dz
}

impl S1Ring {
    pub fn new(w: &WittRing, eis: &EisensteinPoly, dz: u32) -> Result<S1Ring> {
        let w1: Witt = w.with_precision(1)?;
        let p = w1.z.p;
        let len = eis.e * p.pow(dz + 1) as usize;
        let dp = DpRing::new(w1, eis.clone(), len)?;
        let c1 = dp.c1();
        let c1_inv = dp.ring.inv(&c1)?;
        let mut c1_pows = vec![dp.ring.one()];
        for t in 1..=(p as usize) {
            let next = dp.ring.mul(&c1_pows[t - 1], &c1);
            c1_pows.push(next);
        }
        Ok(S1Ring { dp, dz, c1, c1_inv, c1_pows })
    }

    pub fn with_default_dz(w: &WittRing, eis: &EisensteinPoly) -> Result<S1Ring> {
        S1Ring::new(w, eis, default_dz(w.z.p, eis.e))
    }

    /// Same datum with `Dz + 1`.
    pub fn refined(&self) -> Result<S1Ring> {
        S1Ring::new(&self.dp.ring.w, &self.dp.eis, self.dz + 1)
    }

    pub fn ring(&self) -> &Trunc {
        &self.dp.ring
    }

    pub fn p(&self) -> u64 {
        self.dp.ring.z().p
    }

    pub fn e(&self) -> usize {
        self.dp.eis.e
    }

    pub fn len(&self) -> usize {
        self.dp.ring.len
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// First basis index of `Fil^i S_1`.
    pub fn fil_start(&self, i: usize) -> usize {
        self.e() * i
    }

    pub fn in_fil(&self, x: &[u64], i: usize) -> bool {
        let m = self.dp.ring.m();
        let s = (self.fil_start(i) * m).min(x.len());
        x[..s].iter().all(|&c| c == 0)
    }

    /// `phi_i(b_k)` for `k >= e i`.
    pub fn phi_div_basis(&self, k: usize, i: usize) -> Result<Vec<u64>> {
        let r = &self.dp.ring;
        let (e, p) = (self.e(), self.p());
        let (a, t) = (k % e, k / e);
        if t < i {
            return Err(Error::NotInFiltration(i));
        }
        if i as u64 >= p {
            return Err(Error::NotInFiltration(i));
        }
        if t as u64 - val_factorial(p, t as u64) != i as u64 {
            return Ok(r.zero());
        }
        let unit = factorial_unit(r.z(), t as u64);
        let inv = r.z().inv(unit)?;
        let c1t = if t < self.c1_pows.len() { self.c1_pows[t].clone() } else { r.pow(&self.c1, t as u64) };
        let v = r.mul(&r.u_pow(p as usize * a), &c1t);
        Ok(r.scale_int(&v, inv))
    }

    /// `phi_i` on `Fil^i S_1` (sigma-semilinear).
    pub fn phi_div(&self, x: &[u64], i: usize) -> Result<Vec<u64>> {
        if !self.in_fil(x, i) {
            return Err(Error::NotInFiltration(i));
        }
        let r = &self.dp.ring;
        let m = r.m();
        let mut out = r.zero();
        for k in self.fil_start(i)..r.len {
            let c = &x[k * m..(k + 1) * m];
            if c.iter().all(|&v| v == 0) {
                continue;
            }
            let img = self.phi_div_basis(k, i)?;
            if r.is_zero(&img) {
                continue;
            }
            out = r.add(&out, &r.scale_witt(&img, &r.w.sigma(c)));
        }
        Ok(out)
    }

    /// Indices `k` of a minimal set of ideal generators `b_k` of `Fil^i S_1`.
    pub fn fil_ideal_gens(&self, i: usize) -> Vec<usize> {
        let r = &self.dp.ring;
        let mut span = crate::linalg::RowSpan::new(*r.z(), r.dim());
        let mut out = Vec::new();
        for k in self.fil_start(i)..r.len {
            let bk = r.basis(k);
            if span.contains(&bk) {
                continue;
            }
            out.push(k);
            for l in 0..r.len {
                for t in 0..r.m() {
                    let s = r.monomial(&crate::dp::pow_gen(&r.w, t), l);
                    span.insert(r.mul(&s, &bk));
                }
            }
        }
        out
    }

    /// `c1^(-h)`.
    pub fn c1_inv_pow(&self, h: usize) -> Vec<u64> {
        self.dp.ring.pow(&self.c1_inv, h as u64)
    }

    pub fn c1_pow(&self, h: usize) -> Vec<u64> {
        self.dp.ring.pow(&self.c1, h as u64)
    }

    /// `E^h` modulo p, i.e. `u^(eh)`.
    pub fn e_pow(&self, h: usize) -> Vec<u64> {
        self.dp.ring.u_pow(self.e() * h)
    }

    /// Smallest `l` with `phi^l` killing every `b_k`, `k >= 1`.
    pub fn augmentation_nilpotency(&self) -> usize {
        let r = &self.dp.ring;
        let mut l = 1usize;
        loop {
            let dead = (1..r.len).all(|k| r.is_zero(&r.phi_pow(&r.basis(k), l)));
            if dead {
                return l;
            }
            l += 1;
        }
    }

    /// Dimension over `F_p` of `u^j S_1`.
    pub fn dim_u_multiple(&self, j: usize) -> usize {
        let r = &self.dp.ring;
        let uj = r.u_pow(j);
        let rows = (0..r.len).flat_map(|k| (0..r.m()).map(move |t| (k, t)));
        let mut span = crate::linalg::RowSpan::new(*r.z(), r.dim());
        for (k, t) in rows {
            let x = r.monomial(&crate::dp::pow_gen(&r.w, t), k);
            span.insert(r.mul(&uj, &x));
        }
        span.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dz_defaults() {
        assert_eq!(default_dz(3, 1), 3);
        assert_eq!(default_dz(5, 1), 1);
        assert_eq!(default_dz(3, 2), 2);
        assert_eq!(default_dz(7, 6), 1);
    }

    #[test]
    fn fil_ideal_generators() {
        let w = WittRing::default_for(3, 1, 1).unwrap();
        let eis = EisensteinPoly::explicit_ints(3, vec![0, 1], vec![3, 1]).unwrap();
        let s = S1Ring::new(&w, &eis, 3).unwrap();
        assert_eq!(s.fil_ideal_gens(1), vec![1, 3, 9, 27]);
    }

    #[test]
    fn phi_zero_is_ring_phi() {
        let w = WittRing::default_for(3, 3, 1).unwrap();
        let eis = EisensteinPoly::cyclotomic(&w, 1).unwrap();
        let s = S1Ring::new(&w, &eis, 1).unwrap();
        let r = s.ring();
        for k in 0..s.len() {
            assert_eq!(s.phi_div(&r.basis(k), 0).unwrap(), r.phi(&r.basis(k)), "k={k}");
        }
    }
}
