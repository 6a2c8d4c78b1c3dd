//! Étale Frobenius modules over a finite field `F_q` and their fixed points
//! after extending scalars to `F_(p^t)`.
//!
//! `V` is viewed as an `F_p`-space of dimension `m d` with the linear map
//! `Phi_p` induced by `phi`; fixed points of `Phi_p ⊗ Frob` on
//! `V ⊗ F_(p^t)` form an `F_p`-space of dimension at most `m d`, and the
//! full dimension is reached for `t` large.

use serde::{Deserialize, Serialize};

use crate::dp::pow_gen;
use crate::error::{Error, Result};
use crate::linalg::{left_kernel, RowSpan};
use crate::witt::{Witt, WittRing};

#[derive(Clone, Debug)]
pub struct EtalePhiModule {
    pub w: Witt,
    pub d: usize,
    /// `a[j][i]`: coefficient of `e_i` in `phi(e_j)`.
    pub a: Vec<Vec<Vec<u64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPoints {
    /// Smallest extension degree reaching full dimension.
    pub t: usize,
    pub dim: usize,
    /// Fixed-space dimension for `t = 1, 2, ...`.
    pub dims: Vec<usize>,
    /// `F_p`-basis of the fixed space in coordinates `(c, s) -> c t + s`.
    pub basis: Vec<Vec<u64>>,
}

impl EtalePhiModule {
    pub fn new(w: Witt, a: Vec<Vec<Vec<u64>>>) -> Result<Self> {
        if w.z.n != 1 {
            return Err(Error::BadRing("étale modules live over a finite field".into()));
        }
        let d = a.len();
        if a.iter().any(|r| r.len() != d || r.iter().any(|c| c.len() != w.m)) {
            return Err(Error::Dimension("Frobenius matrix has the wrong shape".into()));
        }
        let m = EtalePhiModule { w, d, a };
        let rank = RowSpan::from_rows(m.w.z, m.dim_fp(), m.phi_fp_rows()).len();
        if rank != m.dim_fp() {
            return Err(Error::NotAUnit);
        }
        Ok(m)
    }

    pub fn p(&self) -> u64 {
        self.w.z.p
    }

    /// `m d`.
    pub fn dim_fp(&self) -> usize {
        self.d * self.w.m
    }

    /// Row `j m + t` is `phi(x^t e_j)` in `F_p`-coordinates `i m + s`.
    pub fn phi_fp_rows(&self) -> Vec<Vec<u64>> {
        let w = &self.w;
        let mm = w.m;
        let mut rows = Vec::with_capacity(self.dim_fp());
        for j in 0..self.d {
            for t in 0..mm {
                let s = w.sigma(&pow_gen(w, t));
                let mut row = Vec::with_capacity(self.dim_fp());
                for i in 0..self.d {
                    row.extend(w.mul(&s, &self.a[j][i]));
                }
                rows.push(row);
            }
        }
        rows
    }

    /// Matrix of `Phi_p ⊗ Frob - 1` on `V ⊗ F_(p^t)` over `F_p`, by rows.
    fn level_rows(&self, lvl: &WittRing) -> Vec<Vec<u64>> {
        let md = self.dim_fp();
        let t = lvl.m;
        let phi = self.phi_fp_rows();
        let mut rows = Vec::with_capacity(md * t);
        for c in 0..md {
            for s in 0..t {
                let fr = lvl.sigma(&pow_gen(lvl, s));
                let mut row = vec![0u64; md * t];
                for c2 in 0..md {
                    let k = phi[c][c2];
                    for s2 in 0..t {
                        row[c2 * t + s2] = lvl.z.mul(k, fr[s2]);
                    }
                }
                let idx = c * t + s;
                row[idx] = lvl.z.sub(row[idx], 1);
                rows.push(row);
            }
        }
        rows
    }

    /// `F_p`-basis of `(V ⊗ F_(p^t))^(phi = 1)`.
    pub fn fixed_space(&self, t: usize) -> Result<Vec<Vec<u64>>> {
        let lvl = WittRing::default_for(self.p(), 1, t)?;
        let rows = self.level_rows(&lvl);
        let ker = left_kernel(lvl.z, self.dim_fp() * t, &rows);
        let span = RowSpan::from_rows(lvl.z, self.dim_fp() * t, ker);
        Ok(span.howell_form())
    }
}

/// Smallest `t <= t_max` with fixed space of dimension `m d`.
pub fn etale_fixed_points(m: &EtalePhiModule, t_max: usize) -> Result<FixedPoints> {
    let target = m.dim_fp();
    let mut dims = Vec::new();
    for t in 1..=t_max {
        let basis = m.fixed_space(t)?;
        dims.push(basis.len());
        if basis.len() == target {
            return Ok(FixedPoints { t, dim: target, dims, basis });
        }
    }
    Err(Error::BoundTooSmall(t_max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_module() {
        let w = WittRing::default_for(5, 1, 1).unwrap();
        let m = EtalePhiModule::new(w, vec![vec![vec![1]]]).unwrap();
        let fp = etale_fixed_points(&m, 6).unwrap();
        assert_eq!((fp.t, fp.dim), (1, 1));
    }

    #[test]
    fn rank_two_over_f2() {
        let w = WittRing::default_for(2, 1, 1).unwrap();
        let m = EtalePhiModule::new(w, vec![vec![vec![0], vec![1]], vec![vec![1], vec![1]]]).unwrap();
        let fp = etale_fixed_points(&m, 4).unwrap();
        assert_eq!(fp.dim, 2);
        assert!(fp.t <= 4);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let w = WittRing::default_for(3, 1, 1).unwrap();
        assert!(EtalePhiModule::new(w, vec![vec![vec![1], vec![1]], vec![vec![1], vec![1]]]).is_err());
    }
}
