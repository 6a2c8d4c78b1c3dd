//! The divided-power ring `S` at finite precision: divided powers of `E`,
//! the unit `c1 = phi(E)/p`, the filtration and divided Frobenii.

use crate::error::{Error, Result};
use crate::linalg::RowSpan;
use crate::series::EisensteinPoly;
use crate::trunc::{p_pow_over_factorial, Trunc, TruncRing};
use crate::witt::Witt;

/// `S / (p^n, T_D)` together with its Eisenstein datum.
#[derive(Clone, Debug)]
pub struct DpRing {
    pub ring: Trunc,
    pub eis: EisensteinPoly,
}

/// An element of a `DpRing`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DpElem {
    pub coords: Vec<u64>,
}

impl DpRing {
    pub fn new(w: Witt, eis: EisensteinPoly, len: usize) -> Result<Self> {
        if w.z.p != eis.p || w.f != eis.f {
            return Err(Error::BadRing("Eisenstein datum over a different ring".into()));
        }
        let ring = TruncRing::divided_power(w, eis.e, len)?;
        Ok(DpRing { ring, eis })
    }

    pub fn with_precision(&self, n: u32) -> Result<DpRing> {
        DpRing::new(self.ring.w.with_precision(n)?, self.eis.clone(), self.ring.len)
    }

    pub fn e(&self) -> usize {
        self.eis.e
    }

    pub fn w(&self) -> &Witt {
        &self.ring.w
    }

    /// `E` as an element.
    pub fn e_elem(&self) -> Vec<u64> {
        self.ring.from_poly(&self.eis.coeffs_in(&self.ring.w))
    }

    /// `A = (E - u^e)/p` as an element.
    pub fn a_elem(&self) -> Vec<u64> {
        self.ring.from_poly(&self.eis.a_coeffs_in(&self.ring.w))
    }

    /// `gamma_j(E) = sum_k [p^k / k!] A^k b_{e(j-k)}`.
    pub fn gamma_e(&self, j: usize) -> Vec<u64> {
        let r = &self.ring;
        let e = self.e();
        let a = self.a_elem();
        let mut out = r.zero();
        let mut ak = r.one();
        for k in 0..=j {
            let coef = p_pow_over_factorial(r.z(), k as u64);
            if coef != 0 {
                let idx = e * (j - k);
                if idx < r.len {
                    let term = r.scale_int(&r.mul_basis(&ak, idx), coef);
                    out = r.add(&out, &term);
                }
            }
            ak = r.mul(&ak, &a);
        }
        out
    }

    /// `c1 = (p-1)! b_{ep} + phi(A)`.
    pub fn c1(&self) -> Vec<u64> {
        let r = &self.ring;
        let p = r.z().p;
        let fact = crate::zpn::factorial_ratio(r.z(), p - 1, 0, 0);
        let lead = r.scale_int(&r.basis(self.e() * p as usize), fact);
        r.add(&lead, &r.phi(&self.a_elem()))
    }

    /// `Z/p^n`-span of `Fil^i`: the ideal generated by `gamma_j(E)`, `j >= i`.
    pub fn fil_span(&self, i: usize) -> RowSpan {
        let r = &self.ring;
        let mut span = RowSpan::new(*r.z(), r.dim());
        let jmax = (r.len + self.e() - 1) / self.e() + 1;
        for j in i..=jmax.max(i) {
            let g = self.gamma_e(j);
            if r.is_zero(&g) {
                continue;
            }
            for t in 0..r.m() {
                let gt = r.scale_witt(&g, &pow_gen(&r.w, t));
                for k in 0..r.len {
                    span.insert(r.mul_basis(&gt, k));
                }
            }
        }
        span
    }

    /// `phi_i(x) = phi(x) / p^i` for `x` in `Fil^i`, landing at precision `n - i`.
    pub fn phi_div(&self, x: &DpElem, i: usize) -> Result<(DpRing, DpElem)> {
        let n = self.ring.z().n;
        if i as u32 >= n {
            return Err(Error::InsufficientPrecision { have: n, need: i as u32 + 1 });
        }
        if !self.fil_span(i).contains(&x.coords) {
            return Err(Error::NotInFiltration(i));
        }
        let target = self.with_precision(n - i as u32)?;
        let phx = self.ring.phi(&x.coords);
        let coords = self.ring.divide_p_pow(&phx, i as u32, &target.ring)?;
        Ok((target, DpElem { coords }))
    }

    pub fn elem(&self, coords: Vec<u64>) -> DpElem {
        DpElem { coords }
    }

    /// Exact division by `p^i` into precision `n - i`.
    pub fn divide_p_pow(&self, x: &DpElem, i: u32) -> Result<(DpRing, DpElem)> {
        let n = self.ring.z().n;
        if i >= n {
            return Err(Error::InsufficientPrecision { have: n, need: i + 1 });
        }
        let target = self.with_precision(n - i)?;
        let coords = self.ring.divide_p_pow(&x.coords, i, &target.ring)?;
        Ok((target, DpElem { coords }))
    }

    /// Exact division by `E`: some `y` with `E y = x`.
    pub fn divide_by_e(&self, x: &DpElem) -> Result<DpElem> {
        let r = &self.ring;
        let e = self.e_elem();
        let rows: Vec<Vec<u64>> = (0..r.len)
            .flat_map(|k| (0..r.m()).map(move |t| (k, t)))
            .map(|(k, t)| {
                let xt = pow_gen(&r.w, t);
                r.mul(&e, &r.monomial(&xt, k))
            })
            .collect();
        let tr = crate::linalg::Tracked::new(*r.z(), r.dim(), &rows);
        let c = tr.express(&x.coords).ok_or(Error::NotDivisible)?;
        Ok(DpElem { coords: c })
    }
}

/// `x^t` in the Witt ring.
pub fn pow_gen(w: &crate::witt::WittRing, t: usize) -> Vec<u64> {
    if w.m > 1 && t < w.m {
        let mut v = w.zero();
        v[t] = 1;
        return v;
    }
    w.pow(&w.gen(), t as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::WittRing;

    #[test]
    fn gamma_of_e_times_factorial_is_power() {
        let w = WittRing::default_for(3, 4, 1).unwrap();
        let eis = EisensteinPoly::cyclotomic(&w, 1).unwrap();
        let s = DpRing::new(w, eis, 30).unwrap();
        let r = &s.ring;
        let e = s.e_elem();
        let e3 = r.mul(&r.mul(&e, &e), &e);
        assert_eq!(r.scale_int(&s.gamma_e(3), 6), e3);
        assert_eq!(s.gamma_e(1), e);
    }

    #[test]
    fn c1_times_p_is_phi_of_e() {
        let w = WittRing::default_for(2, 5, 1).unwrap();
        let eis = EisensteinPoly::cyclotomic(&w, 2).unwrap();
        let s = DpRing::new(w, eis, 24).unwrap();
        let r = &s.ring;
        assert_eq!(r.scale_int(&s.c1(), 2), r.phi(&s.e_elem()));
        assert!(r.is_unit(&s.c1()));
    }
}
