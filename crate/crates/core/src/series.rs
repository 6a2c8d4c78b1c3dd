//! Elements of `W_n[[u]]` at finite u-precision, the Frobenius `u -> u^p`,
//! and Eisenstein polynomials.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::witt::{Witt, WittRing};

/// An element of `W_n[u]/(u^N)`, or an exact polynomial of degree `< N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    pub w: Witt,
    /// u-precision `N`.
    pub prec: usize,
    /// Flat coefficients, length `prec * m`.
    pub coeffs: Vec<u64>,
    /// Known to be a true polynomial (no hidden higher terms).
    pub exact: bool,
}

impl Series {
    pub fn zero(w: &Witt, prec: usize, exact: bool) -> Series {
        Series { w: w.clone(), prec, coeffs: vec![0; prec * w.m], exact }
    }

    /// Exact polynomial from flat coefficients; fails if its degree is `>= prec`.
    pub fn exact(w: &Witt, coeffs: &[u64], prec: usize) -> Result<Series> {
        let m = w.m;
        let mut s = Series::zero(w, prec, true);
        for (i, &c) in coeffs.iter().enumerate() {
            let c = c % w.z.q;
            if c == 0 {
                continue;
            }
            if i / m >= prec {
                return Err(Error::PrecisionLoss { degree: i / m, prec });
            }
            s.coeffs[i] = c;
        }
        Ok(s)
    }

    /// Truncation of a polynomial to precision `prec`.
    pub fn truncated(w: &Witt, coeffs: &[u64], prec: usize) -> Series {
        let mut s = Series::zero(w, prec, false);
        let n = coeffs.len().min(prec * w.m);
        for i in 0..n {
            s.coeffs[i] = coeffs[i] % w.z.q;
        }
        s
    }

    pub fn from_int_poly(w: &Witt, ints: &[i64], prec: usize) -> Result<Series> {
        let m = w.m;
        let mut flat = vec![0u64; ints.len() * m];
        for (i, &c) in ints.iter().enumerate() {
            flat[i * m] = w.z.from_i64(c);
        }
        Series::exact(w, &flat, prec)
    }

    pub fn monomial(w: &Witt, c: &[u64], k: usize, prec: usize) -> Result<Series> {
        let mut flat = vec![0u64; (k + 1) * w.m];
        flat[k * w.m..].copy_from_slice(c);
        Series::exact(w, &flat, prec)
    }

    pub fn random<R: Rng + ?Sized>(w: &Witt, deg: usize, prec: usize, rng: &mut R) -> Series {
        let mut flat = vec![0u64; (deg + 1) * w.m];
        for c in flat.iter_mut() {
            *c = rng.gen_range(0..w.z.q);
        }
        Series::exact(w, &flat, prec.max(deg + 1)).expect("fits")
    }

    pub fn coeff(&self, k: usize) -> &[u64] {
        &self.coeffs[k * self.w.m..(k + 1) * self.w.m]
    }

    /// Degree of the stored part; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        let m = self.w.m;
        (0..self.prec).rev().find(|&k| self.coeffs[k * m..(k + 1) * m].iter().any(|&c| c != 0))
    }

    /// Lowest u-degree with nonzero coefficient.
    pub fn u_valuation(&self) -> Option<usize> {
        let m = self.w.m;
        (0..self.prec).find(|&k| self.coeffs[k * m..(k + 1) * m].iter().any(|&c| c != 0))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn combine_prec(&self, other: &Series) -> (usize, bool) {
        match (self.exact, other.exact) {
            (true, true) => (self.prec.max(other.prec), true),
            (true, false) => (other.prec, false),
            (false, true) => (self.prec, false),
            (false, false) => (self.prec.min(other.prec), false),
        }
    }

    fn check_ring(&self, other: &Series) -> Result<()> {
        if self.w != other.w {
            return Err(Error::BadRing("series over different coefficient rings".into()));
        }
        Ok(())
    }

    fn resized(&self, prec: usize) -> Vec<u64> {
        let mut c = self.coeffs.clone();
        c.resize(prec * self.w.m, 0);
        c
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_ring(other)?;
        let (prec, exact) = self.combine_prec(other);
        let (a, b) = (self.resized(prec), other.resized(prec));
        let z = &self.w.z;
        let coeffs = a.iter().zip(&b).map(|(&x, &y)| z.add(x, y)).collect();
        Ok(Series { w: self.w.clone(), prec, coeffs, exact })
    }

    pub fn neg(&self) -> Series {
        let z = &self.w.z;
        Series { coeffs: self.coeffs.iter().map(|&x| z.neg(x)).collect(), ..self.clone() }
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &[u64]) -> Series {
        let m = self.w.m;
        let mut out = self.clone();
        for k in 0..self.prec {
            let v = self.w.mul(&self.coeffs[k * m..(k + 1) * m], c);
            out.coeffs[k * m..(k + 1) * m].copy_from_slice(&v);
        }
        out
    }

    /// Product; raises `PrecisionLoss` if two exact factors overflow the precision.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_ring(other)?;
        let (prec, exact) = self.combine_prec(other);
        if exact {
            if let (Some(da), Some(db)) = (self.degree(), other.degree()) {
                if da + db >= prec {
                    return Err(Error::PrecisionLoss { degree: da + db, prec });
                }
            }
        }
        let m = self.w.m;
        let mut out = Series::zero(&self.w, prec, exact);
        let da = self.degree();
        let db = other.degree();
        let (Some(da), Some(db)) = (da, db) else { return Ok(out) };
        for i in 0..=da {
            let ai = self.coeff(i);
            if ai.iter().all(|&c| c == 0) {
                continue;
            }
            for j in 0..=db {
                if i + j >= prec {
                    break;
                }
                let bj = other.coeff(j);
                self.w.mul_acc(&mut out.coeffs[(i + j) * m..(i + j + 1) * m], ai, bj);
            }
        }
        Ok(out)
    }

    /// Frobenius with output precision `min(p * N, bound)` for inexact input
    /// and `bound` for exact input.
    pub fn phi_to(&self, bound: usize) -> Result<Series> {
        let p = self.w.z.p as usize;
        let m = self.w.m;
        let prec = if self.exact { bound } else { (p * self.prec).min(bound) };
        if self.exact {
            if let Some(d) = self.degree() {
                if p * d >= prec {
                    return Err(Error::PrecisionLoss { degree: p * d, prec });
                }
            }
        }
        let mut out = Series::zero(&self.w, prec, self.exact);
        for k in 0..self.prec {
            if p * k >= prec {
                break;
            }
            let s = self.w.sigma(self.coeff(k));
            out.coeffs[p * k * m..(p * k + 1) * m].copy_from_slice(&s);
        }
        Ok(out)
    }

    /// Frobenius keeping the element's own precision bound.
    pub fn phi(&self) -> Result<Series> {
        self.phi_to(self.prec)
    }

    pub fn with_prec(&self, prec: usize) -> Result<Series> {
        if self.exact {
            Series::exact(&self.w, &self.coeffs, prec)
        } else if prec <= self.prec {
            Ok(Series::truncated(&self.w, &self.coeffs, prec))
        } else {
            Err(Error::PrecisionLoss { degree: prec, prec: self.prec })
        }
    }

    /// Exact division by `p^i`, landing in `W_{n-i}`.
    pub fn divide_p_pow(&self, i: u32) -> Result<Series> {
        let n = self.w.z.n;
        if i >= n {
            return Err(Error::InsufficientPrecision { have: n, need: i + 1 });
        }
        let w2 = self.w.with_precision(n - i)?;
        let pk = self.w.z.p.pow(i);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            if c % pk != 0 {
                return Err(Error::NotDivisible);
            }
            coeffs.push(c / pk);
        }
        Ok(Series { w: w2, prec: self.prec, coeffs, exact: self.exact })
    }

    /// Exact division by a monic polynomial with zero remainder.
    pub fn divide_exact_by(&self, divisor: &Series) -> Result<Series> {
        self.check_ring(divisor)?;
        if !self.exact || !divisor.exact {
            return Err(Error::NotDivisible);
        }
        let (q, r) = poly_divmod(&self.w, &self.coeffs, &divisor.coeffs)?;
        if r.iter().any(|&c| c != 0) {
            return Err(Error::NotDivisible);
        }
        Series::exact(&self.w, &q, self.prec)
    }

    /// The same element read in another precision of the coefficient ring.
    pub fn change_witt(&self, w: &Witt) -> Series {
        Series { w: w.clone(), prec: self.prec, coeffs: w.reduce_from(&self.coeffs), exact: self.exact }
    }
}

/// Division with remainder by a monic polynomial (flat coefficients).
pub fn poly_divmod(w: &WittRing, a: &[u64], b: &[u64]) -> Result<(Vec<u64>, Vec<u64>)> {
    let m = w.m;
    let db = (0..b.len() / m)
        .rev()
        .find(|&k| b[k * m..(k + 1) * m].iter().any(|&c| c != 0))
        .ok_or(Error::NotDivisible)?;
    if b[db * m..(db + 1) * m] != w.one()[..] {
        return Err(Error::NotDivisible);
    }
    let mut r = a.to_vec();
    let na = r.len() / m;
    if na <= db {
        return Ok((vec![0; m], r));
    }
    let mut q = vec![0u64; (na - db) * m];
    for k in (db..na).rev() {
        let c = r[k * m..(k + 1) * m].to_vec();
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        q[(k - db) * m..(k - db + 1) * m].copy_from_slice(&c);
        for j in 0..=db {
            let prod = w.mul(&c, &b[j * m..(j + 1) * m]);
            let idx = (k - db + j) * m;
            for t in 0..m {
                r[idx + t] = w.z.sub(r[idx + t], prod[t]);
            }
        }
    }
    Ok((q, r))
}

/// A monic Eisenstein polynomial with fixed integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EisensteinPoly {
    pub p: u64,
    /// Defining polynomial of the residue field extension.
    pub f: Vec<u64>,
    pub e: usize,
    /// Integer coefficient vectors, flat `(e + 1) * m`, low degree first.
    pub coeffs: Vec<u64>,
}

impl EisensteinPoly {
    pub fn m(&self) -> usize {
        self.f.len() - 1
    }

    /// `((u+1)^(p^n) - 1) / ((u+1)^(p^(n-1)) - 1)`, computed by exact division.
    pub fn cyclotomic(w: &Witt, n: u32) -> Result<EisensteinPoly> {
        if n == 0 {
            return Err(Error::NotEisenstein("cyclotomic level must be at least 1".into()));
        }
        let p = w.z.p;
        let big = p
            .checked_pow(n)
            .filter(|&v| v <= 60)
            .ok_or_else(|| Error::NotEisenstein("cyclotomic degree too large".into()))?;
        let num = shifted_cyclotomic_int(big);
        let den = shifted_cyclotomic_int(big / p);
        let d = int_poly_div_exact(&num, &den)?;
        let m = w.m;
        let mut coeffs = vec![0u64; d.len() * m];
        for (i, &c) in d.iter().enumerate() {
            coeffs[i * m] = c;
        }
        EisensteinPoly::explicit_ints(p, w.f.clone(), coeffs)
    }

    /// Validates the Eisenstein conditions on integer coefficients.
    pub fn explicit_ints(p: u64, f: Vec<u64>, coeffs: Vec<u64>) -> Result<EisensteinPoly> {
        let m = f.len() - 1;
        if coeffs.len() % m != 0 || coeffs.len() < 2 * m {
            return Err(Error::NotEisenstein("degree must be at least 1".into()));
        }
        let mut coeffs = coeffs;
        while coeffs.len() > m && coeffs[coeffs.len() - m..].iter().all(|&c| c == 0) {
            coeffs.truncate(coeffs.len() - m);
        }
        let e = coeffs.len() / m - 1;
        if e == 0 {
            return Err(Error::NotEisenstein("degree must be at least 1".into()));
        }
        let lead = &coeffs[e * m..];
        if lead[0] != 1 || lead[1..].iter().any(|&c| c != 0) {
            return Err(Error::NotEisenstein("leading coefficient must be 1".into()));
        }
        if coeffs[..e * m].iter().any(|&c| c % p != 0) {
            return Err(Error::NotEisenstein("lower coefficients must be divisible by p".into()));
        }
        if coeffs[..m].iter().all(|&c| (c / p) % p == 0) {
            return Err(Error::NotEisenstein("constant term must be p times a unit".into()));
        }
        Ok(EisensteinPoly { p, f, e, coeffs })
    }

    /// From residues in a ring of precision at least 2.
    pub fn explicit(w: &Witt, coeffs: &[u64]) -> Result<EisensteinPoly> {
        if w.z.n < 2 {
            return Err(Error::NotEisenstein("need p-adic precision at least 2 to validate".into()));
        }
        EisensteinPoly::explicit_ints(w.z.p, w.f.clone(), coeffs.iter().map(|&c| c % w.z.q).collect())
    }

    /// `E` reduced into `w` (flat coefficients, length `(e + 1) * m`).
    pub fn coeffs_in(&self, w: &WittRing) -> Vec<u64> {
        w.reduce_from(&self.coeffs)
    }

    /// `A = (E - u^e) / p` reduced into `w` (length `e * m`).
    pub fn a_coeffs_in(&self, w: &WittRing) -> Vec<u64> {
        let m = self.m();
        self.coeffs[..self.e * m].iter().map(|&c| (c / self.p) % w.z.q).collect()
    }

    /// `a0` with `E(0) = a0 p`.
    pub fn a0_in(&self, w: &WittRing) -> Vec<u64> {
        self.a_coeffs_in(w)[..self.m()].to_vec()
    }

    pub fn as_series(&self, w: &Witt, prec: usize) -> Result<Series> {
        Series::exact(w, &self.coeffs_in(w), prec)
    }
}

/// Integer coefficients of `(u+1)^k - 1`.
pub fn shifted_cyclotomic_int(k: u64) -> Vec<u64> {
    let mut row = vec![1u64];
    for _ in 0..k {
        let mut next = vec![1u64; row.len() + 1];
        for i in 1..row.len() {
            next[i] = row[i - 1] + row[i];
        }
        row = next;
    }
    row[0] = 0;
    row
}

/// Exact division of integer polynomials by a monic divisor.
pub fn int_poly_div_exact(a: &[u64], b: &[u64]) -> Result<Vec<u64>> {
    let mut r: Vec<i128> = a.iter().map(|&x| x as i128).collect();
    let bi: Vec<i128> = b.iter().map(|&x| x as i128).collect();
    let db = bi.len() - 1;
    if bi[db] != 1 || r.len() <= db {
        return Err(Error::NotDivisible);
    }
    let mut q = vec![0i128; r.len() - db];
    for k in (db..r.len()).rev() {
        let c = r[k];
        q[k - db] = c;
        for j in 0..=db {
            r[k - db + j] -= c * bi[j];
        }
    }
    // Leading zero terms of the divisor make the low part of b zero here.
    if r.iter().any(|&x| x != 0) || q.iter().any(|&x| x < 0) {
        return Err(Error::NotDivisible);
    }
    Ok(q.into_iter().map(|x| x as u64).collect())
}
