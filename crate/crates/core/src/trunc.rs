//! Truncated coefficient rings with a Frobenius, free over `W_n` on a basis
//! `b_0, ..., b_{len-1}` with `b_k b_l = c(k, l) b_{k+l}`:
//!
//! * `Series`: `b_k = u^k`, the ring `W_n[u]/u^len`.
//! * `DividedPower { e }`: `b_k = u^k / e(k)!` with `e(k) = floor(k / e)`, the
//!   divided-power ring modulo the span of `b_k` for `k >= len`.
//!
//! Elements are flat `Vec<u64>` of length `len * m`, index `k * m + t`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::witt::Witt;
use crate::zpn::{factorial_ratio, factorial_unit, val_factorial, Zpn};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Series,
    DividedPower { e: usize },
}

#[derive(Debug)]
pub struct TruncRing {
    pub w: Witt,
    pub kind: Kind,
    pub len: usize,
    /// `c(k, l)` for `k + l < len`, row-major `len x len`; empty for series.
    table: Vec<u64>,
    /// `phi(b_k) = phi_coef[k] * b_{pk}`.
    phi_coef: Vec<u64>,
}

pub type Trunc = Arc<TruncRing>;

impl TruncRing {
    pub fn series(w: Witt, len: usize) -> Trunc {
        let phi_coef = vec![1 % w.z.q; len];
        Arc::new(TruncRing { w, kind: Kind::Series, len, table: Vec::new(), phi_coef })
    }

    pub fn divided_power(w: Witt, e: usize, len: usize) -> Result<Trunc> {
        if e == 0 {
            return Err(Error::BadRamification("e must be positive".into()));
        }
        let z = w.z;
        let ef = |k: usize| (k / e) as u64;
        let mut table = vec![0u64; len * len];
        for k in 0..len {
            for l in 0..(len - k) {
                table[k * len + l] = factorial_ratio(&z, ef(k + l), ef(k), ef(l));
            }
        }
        let p = z.p as usize;
        let phi_coef = (0..len)
            .map(|k| {
                let (a, b) = (ef(p * k), ef(k));
                factorial_ratio(&z, a, b, 0)
            })
            .collect();
        Ok(Arc::new(TruncRing { w, kind: Kind::DividedPower { e }, len, table, phi_coef }))
    }

    /// Same kind and length over another precision of the same Witt ring.
    pub fn with_witt(&self, w: Witt) -> Result<Trunc> {
        match self.kind {
            Kind::Series => Ok(TruncRing::series(w, self.len)),
            Kind::DividedPower { e } => TruncRing::divided_power(w, e, self.len),
        }
    }

    pub fn with_len(&self, len: usize) -> Result<Trunc> {
        match self.kind {
            Kind::Series => Ok(TruncRing::series(self.w.clone(), len)),
            Kind::DividedPower { e } => TruncRing::divided_power(self.w.clone(), e, len),
        }
    }

    #[inline]
    pub fn z(&self) -> &Zpn {
        &self.w.z
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.w.m
    }

    /// Number of `Z/p^n` coordinates.
    #[inline]
    pub fn dim(&self) -> usize {
        self.len * self.w.m
    }

    #[inline]
    pub fn c(&self, k: usize, l: usize) -> u64 {
        match self.kind {
            Kind::Series => 1,
            Kind::DividedPower { .. } => self.table[k * self.len + l],
        }
    }

    pub fn e(&self) -> usize {
        match self.kind {
            Kind::Series => 1,
            Kind::DividedPower { e } => e,
        }
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.dim()]
    }

    pub fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        if self.len > 0 {
            v[0] = 1 % self.z().q;
        }
        v
    }

    pub fn basis(&self, k: usize) -> Vec<u64> {
        let mut v = self.zero();
        if k < self.len {
            v[k * self.m()] = 1 % self.z().q;
        }
        v
    }

    /// `w * b_k` for a Witt element `w`.
    pub fn monomial(&self, w: &[u64], k: usize) -> Vec<u64> {
        let mut v = self.zero();
        if k < self.len {
            let m = self.m();
            v[k * m..(k + 1) * m].copy_from_slice(w);
        }
        v
    }

    pub fn from_witt(&self, w: &[u64]) -> Vec<u64> {
        self.monomial(w, 0)
    }

    pub fn coeff<'a>(&self, a: &'a [u64], k: usize) -> &'a [u64] {
        let m = self.m();
        &a[k * m..(k + 1) * m]
    }

    /// `u^i` expressed in the basis.
    pub fn u_pow(&self, i: usize) -> Vec<u64> {
        let mut v = self.zero();
        if i < self.len {
            let z = self.z();
            let c = match self.kind {
                Kind::Series => 1 % z.q,
                Kind::DividedPower { e } => factorial_ratio(z, (i / e) as u64, 0, 0),
            };
            v[i * self.m()] = c;
        }
        v
    }

    /// Image of a polynomial `sum a_i u^i` (flat Witt coefficients).
    pub fn from_poly(&self, coeffs: &[u64]) -> Vec<u64> {
        let m = self.m();
        let mut v = self.zero();
        for i in 0..(coeffs.len() / m).min(self.len) {
            let ui = self.u_pow(i);
            let c = ui[i * m];
            if c == 0 {
                continue;
            }
            for t in 0..m {
                v[i * m + t] = self.z().mul(coeffs[i * m + t], c);
            }
        }
        v
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&x| x == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let z = self.z();
        a.iter().zip(b).map(|(&x, &y)| z.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let z = self.z();
        a.iter().zip(b).map(|(&x, &y)| z.sub(x, y)).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        let z = self.z();
        a.iter().map(|&x| z.neg(x)).collect()
    }

    pub fn scale_int(&self, a: &[u64], c: u64) -> Vec<u64> {
        let z = self.z();
        a.iter().map(|&x| z.mul(x, c)).collect()
    }

    /// Multiplication by a Witt scalar.
    pub fn scale_witt(&self, a: &[u64], w: &[u64]) -> Vec<u64> {
        let m = self.m();
        if m == 1 {
            return self.scale_int(a, w[0]);
        }
        let mut out = Vec::with_capacity(a.len());
        for k in 0..self.len {
            out.extend(self.w.mul(&a[k * m..(k + 1) * m], w));
        }
        out
    }

    /// `b_j * a`.
    pub fn mul_basis(&self, a: &[u64], j: usize) -> Vec<u64> {
        let m = self.m();
        let mut out = self.zero();
        if j >= self.len {
            return out;
        }
        let z = self.z();
        for l in 0..(self.len - j) {
            let c = self.c(j, l);
            if c == 0 {
                continue;
            }
            for t in 0..m {
                out[(j + l) * m + t] = z.mul(a[l * m + t], c);
            }
        }
        out
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let m = self.m();
        let len = self.len;
        let z = self.z();
        let mut out = self.zero();
        if m == 1 {
            let q = z.q as u128;
            let mut acc = vec![0u128; len];
            for k in 0..len {
                let ak = a[k];
                if ak == 0 {
                    continue;
                }
                for l in 0..(len - k) {
                    let bl = b[l];
                    if bl == 0 {
                        continue;
                    }
                    let c = self.c(k, l);
                    if c == 0 {
                        continue;
                    }
                    let t = (ak as u128 * bl as u128 % q) * c as u128;
                    acc[k + l] = (acc[k + l] + t) % q;
                }
            }
            for (o, x) in out.iter_mut().zip(acc) {
                *o = x as u64;
            }
            return out;
        }
        for k in 0..len {
            let ak = &a[k * m..(k + 1) * m];
            if ak.iter().all(|&x| x == 0) {
                continue;
            }
            for l in 0..(len - k) {
                let bl = &b[l * m..(l + 1) * m];
                let c = self.c(k, l);
                if c == 0 || bl.iter().all(|&x| x == 0) {
                    continue;
                }
                let prod = self.w.scale(&self.w.mul(ak, bl), c);
                for t in 0..m {
                    out[(k + l) * m + t] = z.add(out[(k + l) * m + t], prod[t]);
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut r = self.one();
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(&b, &b);
            }
        }
        r
    }

    /// Frobenius: `sigma` on coefficients and `b_k -> phi_coef(k) b_{pk}`.
    pub fn phi(&self, a: &[u64]) -> Vec<u64> {
        let m = self.m();
        let p = self.z().p as usize;
        let mut out = self.zero();
        for k in 0..self.len {
            let pk = p * k;
            if pk >= self.len {
                break;
            }
            let ak = &a[k * m..(k + 1) * m];
            if ak.iter().all(|&x| x == 0) || self.phi_coef[k] == 0 {
                continue;
            }
            let s = self.w.scale(&self.w.sigma(ak), self.phi_coef[k]);
            out[pk * m..(pk + 1) * m].copy_from_slice(&s);
        }
        out
    }

    pub fn phi_pow(&self, a: &[u64], t: usize) -> Vec<u64> {
        let mut r = a.to_vec();
        for _ in 0..t {
            r = self.phi(&r);
        }
        r
    }

    pub fn phi_coef(&self, k: usize) -> u64 {
        self.phi_coef[k]
    }

    pub fn is_unit(&self, a: &[u64]) -> bool {
        self.len > 0 && self.w.is_unit(&a[..self.m()])
    }

    pub fn inv(&self, a: &[u64]) -> Result<Vec<u64>> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit);
        }
        let w0 = self.w.inv(&a[..self.m()])?;
        let mut x = self.from_witt(&w0);
        let two = self.scale_int(&self.one(), 2 % self.z().q);
        // a*x - 1 lies in the augmentation ideal, which is nilpotent.
        let mut steps = 1usize;
        while steps < 2 * self.len + 2 {
            let ax = self.mul(a, &x);
            if ax == self.one() {
                return Ok(x);
            }
            x = self.mul(&x, &self.sub(&two, &ax));
            steps *= 2;
        }
        let ax = self.mul(a, &x);
        if ax == self.one() {
            Ok(x)
        } else {
            Err(Error::NotAUnit)
        }
    }

    /// Smallest `k` with a nonzero coefficient.
    pub fn order(&self, a: &[u64]) -> Option<usize> {
        let m = self.m();
        (0..self.len).find(|&k| a[k * m..(k + 1) * m].iter().any(|&x| x != 0))
    }

    /// Smallest `k` whose coefficient is nonzero modulo `p`.
    pub fn order_mod_p(&self, a: &[u64]) -> Option<usize> {
        let m = self.m();
        let p = self.z().p;
        (0..self.len).find(|&k| a[k * m..(k + 1) * m].iter().any(|&x| x % p != 0))
    }

    /// `d/du`: `b_k -> k b_{k-1}` for series; for divided powers
    /// `b_k -> k b_{k-1}` if `e` does not divide `k` and `e b_{k-1}` otherwise.
    pub fn derivative(&self, a: &[u64]) -> Vec<u64> {
        let m = self.m();
        let z = self.z();
        let mut out = self.zero();
        for k in 1..self.len {
            let c = match self.kind {
                Kind::Series => k as u64,
                Kind::DividedPower { e } => {
                    if k % e == 0 {
                        e as u64
                    } else {
                        k as u64
                    }
                }
            } % z.q;
            for t in 0..m {
                out[(k - 1) * m + t] = z.mul(a[k * m + t], c);
            }
        }
        out
    }

    /// Reduction modulo `p^k` (lifted back to `[0, p^k)`).
    pub fn reduce_mod_p_pow(&self, a: &[u64], k: u32) -> Vec<u64> {
        let pk = self.z().p.pow(k);
        a.iter().map(|&x| x % pk).collect()
    }

    /// Coefficientwise exact division by `p^i`, landing in `target`.
    pub fn divide_p_pow(&self, a: &[u64], i: u32, target: &TruncRing) -> Result<Vec<u64>> {
        let z = self.z();
        if i > z.n {
            return Err(Error::InsufficientPrecision { have: z.n, need: i });
        }
        if target.z().n + i > z.n {
            return Err(Error::InsufficientPrecision { have: z.n, need: target.z().n + i });
        }
        let mut out = Vec::with_capacity(a.len());
        for &x in a {
            out.push(z.div_p_pow(x, i)? % target.z().q);
        }
        Ok(out)
    }

    /// Integer `e(k)!` modulo `p^n` for divided powers; 1 for series.
    pub fn basis_factorial(&self, k: usize) -> u64 {
        match self.kind {
            Kind::Series => 1 % self.z().q,
            Kind::DividedPower { e } => factorial_ratio(self.z(), (k / e) as u64, 0, 0),
        }
    }
}

/// `p^k / k!` modulo `p^n` (an integer for every `k`).
pub fn p_pow_over_factorial(z: &Zpn, k: u64) -> u64 {
    let v = val_factorial(z.p, k);
    if k - v >= z.n as u64 {
        return 0;
    }
    let unit = factorial_unit(z, k);
    z.mul(z.p.pow((k - v) as u32) % z.q, z.inv(unit).expect("unit"))
}
