//! Finite Frobenius modules as subquotients `A/B` of a free module `R^d`
//! over a truncated ring, reduced to `Z/p^n`-linear algebra.
//!
//! Coordinates of `R^d` are indexed by `(gen * len + k) * m + t`, where
//! `b_k x^t e_gen` runs over a `Z/p^n`-basis.

use rand::Rng;

use crate::dp::pow_gen;
use crate::linalg::{RowSpan, Tracked};
use crate::trunc::Trunc;
use crate::zpn::Zpn;

#[derive(Clone, Debug)]
pub struct Ambient {
    pub ring: Trunc,
    pub d: usize,
}

impl Ambient {
    pub fn new(ring: Trunc, d: usize) -> Self {
        Ambient { ring, d }
    }

    pub fn z(&self) -> Zpn {
        *self.ring.z()
    }

    pub fn dim(&self) -> usize {
        self.d * self.ring.dim()
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.dim()]
    }

    pub fn block<'a>(&self, v: &'a [u64], i: usize) -> &'a [u64] {
        let rd = self.ring.dim();
        &v[i * rd..(i + 1) * rd]
    }

    pub fn from_blocks(&self, blocks: &[Vec<u64>]) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.dim());
        for b in blocks {
            out.extend_from_slice(b);
        }
        out
    }

    /// `s * e_i`.
    pub fn elem_at(&self, s: &[u64], i: usize) -> Vec<u64> {
        let rd = self.ring.dim();
        let mut v = self.zero();
        v[i * rd..(i + 1) * rd].copy_from_slice(s);
        v
    }

    pub fn unit(&self, i: usize) -> Vec<u64> {
        self.elem_at(&self.ring.one(), i)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let z = self.z();
        a.iter().zip(b).map(|(&x, &y)| z.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let z = self.z();
        a.iter().zip(b).map(|(&x, &y)| z.sub(x, y)).collect()
    }

    pub fn scale_int(&self, a: &[u64], c: u64) -> Vec<u64> {
        let z = self.z();
        a.iter().map(|&x| z.mul(x, c)).collect()
    }

    /// `s * v` for a ring element `s`.
    pub fn mul_elem(&self, s: &[u64], v: &[u64]) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.dim());
        for i in 0..self.d {
            out.extend(self.ring.mul(s, self.block(v, i)));
        }
        out
    }

    /// `b_k x^t v`.
    pub fn basis_mul(&self, v: &[u64], k: usize, t: usize) -> Vec<u64> {
        let r = &self.ring;
        let xt = pow_gen(&r.w, t);
        let mut out = Vec::with_capacity(self.dim());
        for i in 0..self.d {
            let blk = self.block(v, i);
            let blk = if t == 0 { blk.to_vec() } else { r.scale_witt(blk, &xt) };
            out.extend(r.mul_basis(&blk, k));
        }
        out
    }

    /// All `b_k x^t v` with `k >= kmin`.
    pub fn multiples_from(&self, v: &[u64], kmin: usize) -> Vec<Vec<u64>> {
        let r = &self.ring;
        let mut out = Vec::new();
        for t in 0..r.m() {
            let xt = pow_gen(&r.w, t);
            let vt: Vec<u64> = if t == 0 {
                v.to_vec()
            } else {
                let mut o = Vec::with_capacity(self.dim());
                for i in 0..self.d {
                    o.extend(r.scale_witt(self.block(v, i), &xt));
                }
                o
            };
            for k in kmin..r.len {
                let mut o = Vec::with_capacity(self.dim());
                for i in 0..self.d {
                    o.extend(r.mul_basis(self.block(&vt, i), k));
                }
                if o.iter().any(|&x| x != 0) {
                    out.push(o);
                }
            }
        }
        out
    }

    /// `Z/p^n`-basis vectors `b_k x^t e_i`.
    pub fn coordinate_basis(&self) -> Vec<Vec<u64>> {
        (0..self.d).flat_map(|i| self.multiples_from(&self.unit(i), 0)).collect()
    }

    /// `R`-span of `gens`.
    pub fn span(&self, gens: &[Vec<u64>]) -> RowSpan {
        let mut s = RowSpan::new(self.z(), self.dim());
        for g in gens {
            s.extend(self.multiples_from(g, 0));
        }
        s
    }

    /// Span of `I_+ * gens` where `I_+` is spanned by `b_k`, `k >= 1`.
    pub fn aug_span(&self, gens: &[Vec<u64>]) -> RowSpan {
        let mut s = RowSpan::new(self.z(), self.dim());
        for g in gens {
            s.extend(self.multiples_from(g, 1));
        }
        s
    }

    pub fn whole(&self) -> RowSpan {
        self.span(&(0..self.d).map(|i| self.unit(i)).collect::<Vec<_>>())
    }

    /// `sum_i phi(v_i) * images_i`.
    pub fn phi_vec(&self, v: &[u64], images: &[Vec<u64>]) -> Vec<u64> {
        let mut out = self.zero();
        for i in 0..self.d {
            let blk = self.block(v, i);
            if blk.iter().all(|&x| x == 0) {
                continue;
            }
            let ph = self.ring.phi(blk);
            out = self.add(&out, &self.mul_elem(&ph, &images[i]));
        }
        out
    }

    /// The `b_0` components, as a vector in `W^d` (flat, length `d * m`).
    pub fn constant_part(&self, v: &[u64]) -> Vec<u64> {
        let m = self.ring.m();
        (0..self.d).flat_map(|i| self.block(v, i)[..m].to_vec()).collect()
    }
}

pub fn union(a: &RowSpan, b: &RowSpan) -> RowSpan {
    let mut s = a.clone();
    s.extend(b.rows());
    s
}

/// A subquotient `A/B` of `R^d` stable under the Frobenius given by the
/// images of the basis vectors.
#[derive(Clone, Debug)]
pub struct FinPhi {
    pub amb: Ambient,
    /// `R`-generators of `A`.
    pub a_gens: Vec<Vec<u64>>,
    pub a: RowSpan,
    pub b: RowSpan,
    pub images: Vec<Vec<u64>>,
    /// `phi^t (I_+ A) ⊆ B` for `t = nil_steps`.
    pub nil_steps: usize,
}

impl FinPhi {
    pub fn new(amb: Ambient, a_gens: Vec<Vec<u64>>, b: RowSpan, images: Vec<Vec<u64>>, nil_steps: usize) -> Self {
        let mut a = amb.span(&a_gens);
        a.extend(b.rows());
        FinPhi { amb, a_gens, a, b, images, nil_steps }
    }

    /// Same ambient and Frobenius with another pair `A' ⊇ B'`.
    pub fn sub(&self, a_gens: Vec<Vec<u64>>, b: RowSpan) -> FinPhi {
        FinPhi::new(self.amb.clone(), a_gens, b, self.images.clone(), self.nil_steps)
    }

    pub fn phi(&self, v: &[u64]) -> Vec<u64> {
        self.amb.phi_vec(v, &self.images)
    }

    pub fn phi_pow(&self, v: &[u64], t: usize) -> Vec<u64> {
        let mut r = v.to_vec();
        for _ in 0..t {
            r = self.phi(&r);
        }
        r
    }

    /// `log_p |A/B|`.
    pub fn length(&self) -> usize {
        self.a.len() - self.b.len()
    }

    /// `I_+ A + B`.
    pub fn aug_b(&self) -> RowSpan {
        let mut s = self.amb.aug_span(&self.a_gens);
        s.extend(self.b.rows());
        s
    }

    /// Span of `phi(X) + base`.
    pub fn phi_image(&self, x: &RowSpan, base: &RowSpan) -> RowSpan {
        let mut s = base.clone();
        for r in x.rows() {
            s.insert(self.phi(&r));
        }
        s
    }

    /// Whether `phi` preserves both `A` and `B`.
    pub fn is_stable(&self) -> bool {
        self.a.rows().iter().all(|r| self.a.contains(&self.phi(r)))
            && self.b.rows().iter().all(|r| self.b.contains(&self.phi(r)))
    }

    /// Stable image of `phi` on `A / (I_+ A + B)`, as a span containing `I_+ A + B`.
    pub fn fitting_image(&self) -> RowSpan {
        let base = self.aug_b();
        let mut cur = union(&self.a, &base);
        loop {
            let next = self.phi_image(&cur, &base);
            if next.len() == cur.len() {
                return next;
            }
            cur = next;
        }
    }

    /// Whether `phi` is bijective on `A / (I_+ A + B)`.
    pub fn bijective_mod_aug(&self) -> bool {
        let base = self.aug_b();
        let full = union(&self.a, &base);
        self.phi_image(&full, &base).len() == full.len()
    }

    /// Whether `phi` is nilpotent on `A / (I_+ A + B)`.
    pub fn nilpotent_mod_aug(&self) -> bool {
        self.fitting_image().len() == self.aug_b().len()
    }

    /// Whether `phi` is bijective on `A/B` (surjective suffices for finite length).
    pub fn bijective(&self) -> bool {
        self.phi_image(&self.a, &self.b).len() == self.a.len()
    }

    /// Canonical basis of the multiplicative part of `A / (I_+ A + B)`: pivot
    /// rows of the stable image not in `I_+ A + B`, in normal form.
    pub fn mult_basis(&self) -> Vec<Vec<u64>> {
        let base = self.aug_b();
        let img = self.fitting_image();
        let mut out = Vec::new();
        let mut acc = base.clone();
        for r in img.howell_form() {
            let nf = base.reduce(&r);
            if nf.iter().any(|&x| x != 0) && acc.insert(nf.clone()) {
                out.push(nf);
            }
        }
        out
    }

    /// Section `[x]` of each multiplicative basis vector, computed as
    /// `phi^t(lift)` with `phi^t(lift) = x` modulo `I_+ A + B`; the lift is
    /// randomized by an element of `I_+ A + B`.
    pub fn section<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<Vec<u64>> {
        let basis = self.mult_basis();
        if basis.is_empty() {
            return Vec::new();
        }
        let t = self.nil_steps.max(1);
        let base = self.aug_b();
        let img = self.fitting_image();
        let img_rows = img.rows();
        let mut gens: Vec<Vec<u64>> = img_rows.iter().map(|r| self.phi_pow(r, t)).collect();
        let base_rows = base.rows();
        gens.extend(base_rows.iter().cloned());
        let tracked = Tracked::new(self.amb.z(), self.amb.dim(), &gens);
        let z = self.amb.z();
        basis
            .iter()
            .map(|x| {
                let c = tracked.express(x).expect("phi^t is onto the multiplicative part");
                let mut y = self.amb.zero();
                for (ci, r) in c.iter().zip(&img_rows) {
                    if *ci != 0 {
                        y = self.amb.add(&y, &self.amb.scale_int(r, *ci));
                    }
                }
                for r in &base_rows {
                    let k = rng.gen_range(0..z.q);
                    if k != 0 {
                        y = self.amb.add(&y, &self.amb.scale_int(r, k));
                    }
                }
                self.b.reduce(&self.phi_pow(&y, t))
            })
            .collect()
    }
}
