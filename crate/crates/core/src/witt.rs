//! The unramified coefficient ring `W_n(F_{p^m}) = (Z/p^n)[x]/(f)` with its
//! Frobenius lift `sigma`.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zpn::Zpn;

/// An element of `W_n(F_{p^m})`: `m` coefficients over `Z/p^n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WittElem(pub Vec<u64>);

/// Ring descriptor; shared behind an `Arc`.
#[derive(Debug, PartialEq, Eq)]
pub struct WittRing {
    pub z: Zpn,
    pub m: usize,
    /// Monic defining polynomial, low degree first, length `m + 1`.
    pub f: Vec<u64>,
    /// `sigma(x)^j` for `j < m`, flattened row-major.
    sigma_pows: Vec<u64>,
}

pub type Witt = Arc<WittRing>;

mod fp {
    //! Dense polynomials over `F_p`, low degree first.

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn inv(a: u64, p: u64) -> u64 {
        let mut r = 1;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    }

    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = trim(a.to_vec());
        let b = trim(b.to_vec());
        let db = b.len() - 1;
        let li = inv(b[db], p);
        while a.len() > db {
            let da = a.len() - 1;
            let c = a[da] * li % p;
            for j in 0..=db {
                a[da - db + j] = (a[da - db + j] + p * p - c * b[j] % p) % p;
            }
            a = trim(a);
        }
        a
    }

    pub fn mulmod(a: &[u64], b: &[u64], f: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x * y) % p;
            }
        }
        rem(&r, f, p)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// `x^(p^j) mod f` for `j = 1..=jmax`.
    pub fn frobenius_powers(f: &[u64], p: u64, jmax: usize) -> Vec<Vec<u64>> {
        let mut out = Vec::with_capacity(jmax);
        let mut cur = rem(&[0, 1], f, p);
        for _ in 0..jmax {
            let base = cur.clone();
            let mut acc = vec![1u64];
            let mut e = p;
            let mut b = base;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mulmod(&acc, &b, f, p);
                }
                b = mulmod(&b, &b, f, p);
                e >>= 1;
            }
            cur = acc;
            out.push(cur.clone());
        }
        out
    }

    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let f = trim(f.to_vec());
        let m = f.len() - 1;
        if m <= 1 {
            return m == 1;
        }
        let pows = frobenius_powers(&f, p, m - 1);
        for xp in pows {
            let mut g = xp.clone();
            if g.len() < 2 {
                g.resize(2, 0);
            }
            g[1] = (g[1] + p - 1) % p;
            let d = gcd(&f, &g, p);
            if d.len() > 1 {
                return false;
            }
        }
        true
    }
}

impl WittRing {
    /// Builds `W_n(F_{p^m})` from a monic lift `f` of an irreducible polynomial mod p.
    pub fn new(p: u64, n: u32, f: Vec<u64>) -> Result<Witt> {
        let z = Zpn::new(p, n)?;
        if f.len() < 2 {
            return Err(Error::BadRing("defining polynomial must have degree >= 1".into()));
        }
        let f: Vec<u64> = f.iter().map(|&c| c % z.q).collect();
        if *f.last().unwrap() != 1 {
            return Err(Error::BadRing("defining polynomial must be monic".into()));
        }
        let fmodp: Vec<u64> = f.iter().map(|&c| c % p).collect();
        if !fp::is_irreducible(&fmodp, p) {
            return Err(Error::NotIrreducible);
        }
        let m = f.len() - 1;
        let mut ring = WittRing { z, m, f, sigma_pows: Vec::new() };
        ring.sigma_pows = ring.compute_sigma_pows()?;
        Ok(Arc::new(ring))
    }

    /// Uses the lexicographically smallest monic irreducible `f` with coefficients in `[0, p)`.
    pub fn default_for(p: u64, n: u32, m: usize) -> Result<Witt> {
        Zpn::new(p, n)?;
        if m == 0 {
            return Err(Error::BadRing("residue degree must be at least 1".into()));
        }
        let f = default_poly(p, m);
        WittRing::new(p, n, f)
    }

    /// Same integer defining polynomial at another precision.
    pub fn with_precision(&self, n: u32) -> Result<Witt> {
        WittRing::new(self.z.p, n, self.f.clone())
    }

    pub fn p(&self) -> u64 {
        self.z.p
    }

    pub fn n(&self) -> u32 {
        self.z.n
    }

    /// Size of the residue field.
    pub fn residue_size(&self) -> u64 {
        self.z.p.pow(self.m as u32)
    }

    fn compute_sigma_pows(&self) -> Result<Vec<u64>> {
        let m = self.m;
        let x = self.gen_raw();
        // Newton iteration for the root of f congruent to x^p mod p.
        let mut y = self.pow(&x, self.z.p);
        let df: Vec<u64> = (1..=m).map(|j| self.z.mul(self.f[j], j as u64 % self.z.q)).collect();
        for _ in 0..(self.z.n as usize + 1) {
            let fy = self.eval_poly(&self.f, &y);
            if fy.iter().all(|&c| c == 0) {
                break;
            }
            let dfy = self.eval_poly(&df, &y);
            let inv = self.inv(&dfy).map_err(|_| Error::NonSeparable)?;
            let corr = self.mul(&fy, &inv);
            y = self.sub(&y, &corr);
        }
        if self.eval_poly(&self.f, &y).iter().any(|&c| c != 0) {
            return Err(Error::NonSeparable);
        }
        let mut out = Vec::with_capacity(m * m);
        let mut cur = self.one_raw();
        for _ in 0..m {
            out.extend_from_slice(&cur);
            cur = self.mul(&cur, &y);
        }
        Ok(out)
    }

    fn eval_poly(&self, coeffs: &[u64], y: &[u64]) -> Vec<u64> {
        let mut acc = vec![0u64; self.m];
        for &c in coeffs.iter().rev() {
            acc = self.mul(&acc, y);
            acc[0] = self.z.add(acc[0], c);
        }
        acc
    }

    fn gen_raw(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.m];
        if self.m == 1 {
            v[0] = self.z.neg(self.f[0]);
        } else {
            v[1] = 1;
        }
        v
    }

    fn one_raw(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.m];
        v[0] = 1 % self.z.q;
        v
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0u64; self.m]
    }

    pub fn one(&self) -> Vec<u64> {
        self.one_raw()
    }

    /// The class of `x` (the chosen root of `f`).
    pub fn gen(&self) -> Vec<u64> {
        self.gen_raw()
    }

    pub fn from_int(&self, c: i64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = self.z.from_i64(c);
        v
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.z.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| self.z.sub(x, y)).collect()
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&x| self.z.neg(x)).collect()
    }

    pub fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        a.iter().map(|&x| self.z.mul(x, c)).collect()
    }

    /// `acc += a * b` in place.
    pub fn mul_acc(&self, acc: &mut [u64], a: &[u64], b: &[u64]) {
        let m = self.m;
        if m == 1 {
            acc[0] = self.z.mul_add(acc[0], a[0], b[0]);
            return;
        }
        let prod = self.mul(a, b);
        for t in 0..m {
            acc[t] = self.z.add(acc[t], prod[t]);
        }
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let m = self.m;
        let z = &self.z;
        if m == 1 {
            return vec![z.mul(a[0], b[0])];
        }
        let mut r = vec![0u128; 2 * m - 1];
        let q = z.q as u128;
        for i in 0..m {
            if a[i] == 0 {
                continue;
            }
            for j in 0..m {
                r[i + j] = (r[i + j] + a[i] as u128 * b[j] as u128) % q;
            }
        }
        let mut r: Vec<u64> = r.into_iter().map(|c| c as u64).collect();
        for d in (m..2 * m - 1).rev() {
            let c = r[d];
            if c == 0 {
                continue;
            }
            r[d] = 0;
            for j in 0..m {
                r[d - m + j] = z.sub(r[d - m + j], z.mul(c, self.f[j]));
            }
        }
        r.truncate(m);
        r
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut r = self.one_raw();
        let mut b = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    /// Unit iff nonzero modulo p.
    pub fn is_unit(&self, a: &[u64]) -> bool {
        a.iter().any(|&c| c % self.z.p != 0)
    }

    /// p-adic valuation (`n` for zero).
    pub fn val(&self, a: &[u64]) -> u32 {
        a.iter().map(|&c| self.z.val(c)).min().unwrap_or(self.z.n)
    }

    pub fn inv(&self, a: &[u64]) -> Result<Vec<u64>> {
        if !self.is_unit(a) {
            return Err(Error::NotAUnit);
        }
        if self.m == 1 {
            return Ok(vec![self.z.inv(a[0])?]);
        }
        let qf = self.residue_size();
        let mut zz = self.pow(a, qf - 2);
        let two = self.from_int(2);
        for _ in 0..64 {
            let az = self.mul(a, &zz);
            if az == self.one_raw() {
                return Ok(zz);
            }
            zz = self.mul(&zz, &self.sub(&two, &az));
        }
        Err(Error::NotAUnit)
    }

    /// Frobenius lift: `sum a_j x^j -> sum a_j sigma(x)^j`.
    pub fn sigma(&self, a: &[u64]) -> Vec<u64> {
        let m = self.m;
        if m == 1 {
            return a.to_vec();
        }
        let mut r = vec![0u64; m];
        for j in 0..m {
            if a[j] == 0 {
                continue;
            }
            let row = &self.sigma_pows[j * m..(j + 1) * m];
            for t in 0..m {
                r[t] = self.z.mul_add(r[t], a[j], row[t]);
            }
        }
        r
    }

    pub fn sigma_pow(&self, a: &[u64], k: usize) -> Vec<u64> {
        let mut r = a.to_vec();
        for _ in 0..(k % self.m) {
            r = self.sigma(&r);
        }
        r
    }

    /// `sigma(x)` as an element.
    pub fn sigma_gen(&self) -> Vec<u64> {
        if self.m == 1 {
            return self.gen_raw();
        }
        self.sigma_pows[self.m..2 * self.m].to_vec()
    }

    /// Reduces an element of a higher-precision ring with the same `f`.
    pub fn reduce_from(&self, a: &[u64]) -> Vec<u64> {
        a.iter().map(|&c| c % self.z.q).collect()
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        (0..self.m).map(|_| rng.gen_range(0..self.z.q)).collect()
    }

    /// Every element, in lexicographic coefficient order. Only for small rings.
    pub fn elements(&self) -> Vec<Vec<u64>> {
        let q = self.z.q;
        let total = q.pow(self.m as u32);
        (0..total)
            .map(|mut idx| {
                (0..self.m)
                    .map(|_| {
                        let c = idx % q;
                        idx /= q;
                        c
                    })
                    .collect()
            })
            .collect()
    }

    pub fn elem(&self, a: Vec<u64>) -> WittElem {
        WittElem(self.reduce_from(&a))
    }
}

/// Smallest monic irreducible polynomial of degree `m` over `F_p`.
pub fn default_poly(p: u64, m: usize) -> Vec<u64> {
    if m == 1 {
        return vec![0, 1];
    }
    let total = p.pow(m as u32);
    for idx in 0..total {
        // Base-p digits of idx, constant term varying fastest.
        let mut g: Vec<u64> = Vec::with_capacity(m + 1);
        let mut t = idx;
        for _ in 0..m {
            g.push(t % p);
            t /= p;
        }
        g.push(1);
        if g[0] != 0 && fp::is_irreducible(&g, p) {
            return g;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

pub fn is_irreducible_mod_p(f: &[u64], p: u64) -> bool {
    fp::is_irreducible(&f.iter().map(|&c| c % p).collect::<Vec<_>>(), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_on_w2_f4() {
        let r = WittRing::new(2, 2, vec![1, 1, 1]).unwrap();
        assert_eq!(r.sigma(&[0, 1]), vec![3, 3]);
    }

    #[test]
    fn sigma_identity_for_prime_field() {
        let r = WittRing::default_for(5, 3, 1).unwrap();
        for c in 0..125 {
            assert_eq!(r.sigma(&[c]), vec![c]);
        }
    }

    #[test]
    fn rejects_reducible() {
        assert_eq!(WittRing::new(2, 1, vec![1, 0, 1]), Err(Error::NotIrreducible));
        assert!(WittRing::new(3, 1, vec![1, 0, 1]).is_ok());
    }

    #[test]
    fn default_polys() {
        assert_eq!(default_poly(2, 2), vec![1, 1, 1]);
        assert_eq!(default_poly(3, 2), vec![1, 0, 1]);
        assert_eq!(default_poly(2, 3), vec![1, 1, 0, 1]);
    }

    #[test]
    fn inverses() {
        let r = WittRing::default_for(3, 2, 1).unwrap();
        assert_eq!(r.inv(&[4]).unwrap(), vec![7]);
        let r = WittRing::default_for(2, 3, 2).unwrap();
        for a in r.elements() {
            match r.inv(&a) {
                Ok(b) => assert_eq!(r.mul(&a, &b), r.one()),
                Err(e) => {
                    assert_eq!(e, Error::NotAUnit);
                    assert!(!r.is_unit(&a));
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        const RINGS: [(u64, u32, usize); 5] = [(2, 3, 2), (3, 2, 3), (5, 2, 1), (2, 4, 3), (7, 2, 2)];

        proptest! {
            #[test]
            fn ring_axioms(k in 0..RINGS.len(), seed in any::<u64>()) {
                let (p, n, m) = RINGS[k];
                let r = WittRing::default_for(p, n, m).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (a, b, c) = (r.random(&mut rng), r.random(&mut rng), r.random(&mut rng));
                prop_assert_eq!(r.mul(&r.mul(&a, &b), &c), r.mul(&a, &r.mul(&b, &c)));
                prop_assert_eq!(r.mul(&a, &b), r.mul(&b, &a));
                prop_assert_eq!(r.mul(&a, &r.add(&b, &c)), r.add(&r.mul(&a, &b), &r.mul(&a, &c)));
                prop_assert_eq!(r.sub(&r.add(&a, &b), &b), a.clone());
                prop_assert_eq!(r.mul(&a, &r.one()), a);
            }

            #[test]
            fn sigma_is_a_ring_automorphism_of_order_m(k in 0..RINGS.len(), seed in any::<u64>()) {
                let (p, n, m) = RINGS[k];
                let r = WittRing::default_for(p, n, m).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (a, b) = (r.random(&mut rng), r.random(&mut rng));
                prop_assert_eq!(r.sigma(&r.mul(&a, &b)), r.mul(&r.sigma(&a), &r.sigma(&b)));
                prop_assert_eq!(r.sigma(&r.add(&a, &b)), r.add(&r.sigma(&a), &r.sigma(&b)));
                prop_assert_eq!(r.sigma_pow(&a, m), a);
            }
        }
    }
}
