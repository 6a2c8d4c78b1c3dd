//! Row spans over `Z/p^n` kept in Howell form, plus tracked solves, kernels
//! and elementary divisors.
//!
//! Every pivot is normalized to `p^v`. When a pivot of valuation `v > 0` is
//! placed, its multiple by `p^(n-v)` is inserted as well; this keeps the
//! Howell property, so greedy reduction decides membership.

use crate::zpn::Zpn;

#[derive(Clone, Debug)]
pub struct RowSpan {
    pub z: Zpn,
    pub ncols: usize,
    slots: Vec<Option<Vec<u64>>>,
    pvals: Vec<u32>,
}

#[inline]
fn first_nonzero(r: &[u64], from: usize) -> Option<usize> {
    r[from..].iter().position(|&x| x != 0).map(|i| i + from)
}

/// `r[j] -= k * piv[j]` for `j >= from`.
#[inline]
fn axpy_neg(z: &Zpn, r: &mut [u64], k: u64, piv: &[u64], from: usize) {
    if k == 0 {
        return;
    }
    let q = z.q;
    let nk = q - (k % q);
    if q < (1u64 << 31) {
        for (x, &y) in r[from..].iter_mut().zip(&piv[from..]) {
            if y != 0 {
                *x = (*x + nk * y) % q;
            }
        }
    } else {
        for (x, &y) in r[from..].iter_mut().zip(&piv[from..]) {
            if y != 0 {
                *x = z.mul_add(*x, nk, y);
            }
        }
    }
}

#[inline]
fn scale_from(z: &Zpn, r: &mut [u64], k: u64, from: usize) {
    for x in r[from..].iter_mut() {
        *x = z.mul(*x, k);
    }
}

impl RowSpan {
    pub fn new(z: Zpn, ncols: usize) -> Self {
        RowSpan { z, ncols, slots: vec![None; ncols], pvals: vec![0; ncols] }
    }

    pub fn from_rows<I: IntoIterator<Item = Vec<u64>>>(z: Zpn, ncols: usize, rows: I) -> Self {
        let mut s = RowSpan::new(z, ncols);
        for r in rows {
            s.insert(r);
        }
        s
    }

    /// Adds a row to the span; returns whether the span grew.
    pub fn insert(&mut self, row: Vec<u64>) -> bool {
        debug_assert_eq!(row.len(), self.ncols);
        let z = self.z;
        let mut grew = false;
        let mut stack = vec![(row, 0usize)];
        while let Some((mut r, start)) = stack.pop() {
            let mut from = start;
            while let Some(c) = first_nonzero(&r, from) {
                let v = z.val(r[c]);
                match &self.slots[c] {
                    Some(piv) if v >= self.pvals[c] => {
                        let k = r[c] / z.p.pow(self.pvals[c]);
                        axpy_neg(&z, &mut r, k, piv, c);
                        debug_assert_eq!(r[c], 0);
                        from = c + 1;
                    }
                    _ => {
                        let (_, unit) = z.split(r[c]);
                        let ui = z.inv(unit).expect("unit");
                        scale_from(&z, &mut r, ui, c);
                        if v > 0 {
                            let mut extra = r.clone();
                            scale_from(&z, &mut extra, z.p.pow(z.n - v), c);
                            stack.push((extra, c + 1));
                        }
                        if let Some(old) = self.slots[c].take() {
                            stack.push((old, c));
                        }
                        self.slots[c] = Some(r);
                        self.pvals[c] = v;
                        grew = true;
                        break;
                    }
                }
            }
        }
        grew
    }

    pub fn extend<I: IntoIterator<Item = Vec<u64>>>(&mut self, rows: I) {
        for r in rows {
            self.insert(r);
        }
    }

    /// Greedy normal form modulo the span; zero iff `v` is in the span.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let z = self.z;
        let mut r = v.to_vec();
        let mut from = 0;
        while let Some(c) = first_nonzero(&r, from) {
            if let Some(piv) = &self.slots[c] {
                let k = r[c] / z.p.pow(self.pvals[c]);
                axpy_neg(&z, &mut r, k, piv, c);
            }
            from = c + 1;
        }
        r
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        let z = self.z;
        let mut r = v.to_vec();
        let mut from = 0;
        while let Some(c) = first_nonzero(&r, from) {
            match &self.slots[c] {
                Some(piv) if z.val(r[c]) >= self.pvals[c] => {
                    let k = r[c] / z.p.pow(self.pvals[c]);
                    axpy_neg(&z, &mut r, k, piv, c);
                }
                _ => return false,
            }
            from = c + 1;
        }
        true
    }

    /// `log_p` of the number of elements of the span.
    pub fn len(&self) -> usize {
        self.slots
            .iter()
            .zip(&self.pvals)
            .filter(|(s, _)| s.is_some())
            .map(|(_, &v)| (self.z.n - v) as usize)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.iter().all(|s| s.is_none())
    }

    /// Number of pivot rows.
    pub fn num_pivots(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    /// Pivot rows with their pivot column and valuation, left to right.
    pub fn pivots(&self) -> impl Iterator<Item = (usize, u32, &Vec<u64>)> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(move |(c, s)| s.as_ref().map(|r| (c, self.pvals[c], r)))
    }

    pub fn rows(&self) -> Vec<Vec<u64>> {
        self.pivots().map(|(_, _, r)| r.clone()).collect()
    }

    pub fn contains_span(&self, other: &RowSpan) -> bool {
        other.pivots().all(|(_, _, r)| self.contains(r))
    }

    pub fn same_span(&self, other: &RowSpan) -> bool {
        self.len() == other.len() && self.contains_span(other)
    }

    /// Canonical Howell matrix: entries above each pivot reduced modulo the pivot.
    pub fn howell_form(&self) -> Vec<Vec<u64>> {
        let z = self.z;
        let mut rows: Vec<(usize, Vec<u64>)> =
            self.pivots().map(|(c, _, r)| (c, r.clone())).collect();
        for j in 0..rows.len() {
            let (c, piv) = (rows[j].0, rows[j].1.clone());
            let pp = z.p.pow(self.pvals[c]);
            for (_, r) in rows.iter_mut().take(j) {
                let k = r[c] / pp;
                axpy_neg(&z, r, k, &piv, c);
            }
        }
        rows.into_iter().map(|(_, r)| r).collect()
    }
}

/// Linear combinations of a fixed generating list: solves and relation kernels.
#[derive(Clone, Debug)]
pub struct Tracked {
    span: RowSpan,
    pub nmain: usize,
    pub ngens: usize,
}

impl Tracked {
    pub fn new(z: Zpn, nmain: usize, gens: &[Vec<u64>]) -> Self {
        let k = gens.len();
        let mut span = RowSpan::new(z, nmain + k);
        for (i, g) in gens.iter().enumerate() {
            let mut row = Vec::with_capacity(nmain + k);
            row.extend_from_slice(g);
            row.resize(nmain + k, 0);
            row[nmain + i] = 1 % z.q;
            span.insert(row);
        }
        Tracked { span, nmain, ngens: k }
    }

    /// Coefficients `c` with `sum c_i gens_i = v`, if any.
    pub fn express(&self, v: &[u64]) -> Option<Vec<u64>> {
        let z = self.span.z;
        let mut r = v.to_vec();
        r.resize(self.nmain + self.ngens, 0);
        let mut from = 0;
        while let Some(c) = first_nonzero(&r[..self.nmain], from) {
            match &self.span.slots[c] {
                Some(piv) if z.val(r[c]) >= self.span.pvals[c] => {
                    let k = r[c] / z.p.pow(self.span.pvals[c]);
                    axpy_neg(&z, &mut r, k, piv, c);
                }
                _ => return None,
            }
            from = c + 1;
        }
        Some(r[self.nmain..].iter().map(|&x| z.neg(x)).collect())
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.express(v).is_some()
    }

    /// Generators of `{c : sum c_i gens_i = 0}`.
    pub fn kernel(&self) -> Vec<Vec<u64>> {
        self.span
            .pivots()
            .filter(|(c, _, _)| *c >= self.nmain)
            .map(|(_, _, r)| r[self.nmain..].to_vec())
            .collect()
    }

    /// The span of the generators alone.
    pub fn image(&self) -> RowSpan {
        RowSpan::from_rows(
            self.span.z,
            self.nmain,
            self.span.pivots().filter(|(c, _, _)| *c < self.nmain).map(|(_, _, r)| r[..self.nmain].to_vec()),
        )
    }
}

/// Span of pairs `(x, f(x))` for a map `f` given on generators; evaluates
/// `f` on the span of the `x` and exposes the defect `f(0)`.
#[derive(Clone, Debug)]
pub struct GraphSpan {
    pub dim: usize,
    span: RowSpan,
}

impl GraphSpan {
    pub fn new(z: Zpn, dim: usize) -> Self {
        GraphSpan { dim, span: RowSpan::new(z, 2 * dim) }
    }

    pub fn insert(&mut self, x: &[u64], img: &[u64]) {
        let mut row = Vec::with_capacity(2 * self.dim);
        row.extend_from_slice(x);
        row.extend_from_slice(img);
        self.span.insert(row);
    }

    /// The span of the inserted `x`.
    pub fn domain(&self) -> RowSpan {
        RowSpan::from_rows(
            self.span.z,
            self.dim,
            self.span.pivots().filter(|(c, _, _)| *c < self.dim).map(|(_, _, r)| r[..self.dim].to_vec()),
        )
    }

    /// The span of the inserted images.
    pub fn image(&self) -> RowSpan {
        RowSpan::from_rows(self.span.z, self.dim, self.span.rows().into_iter().map(|r| r[self.dim..].to_vec()))
    }

    /// Images of zero: `f` is well defined modulo their span.
    pub fn defects(&self) -> Vec<Vec<u64>> {
        self.span.pivots().filter(|(c, _, _)| *c >= self.dim).map(|(_, _, r)| r[self.dim..].to_vec()).collect()
    }

    /// `f(x)` modulo the defects, if `x` lies in the domain.
    pub fn eval(&self, x: &[u64]) -> Option<Vec<u64>> {
        let mut row = x.to_vec();
        row.resize(2 * self.dim, 0);
        let r = self.span.reduce(&row);
        if r[..self.dim].iter().any(|&v| v != 0) {
            return None;
        }
        let z = self.span.z;
        Some(r[self.dim..].iter().map(|&v| z.neg(v)).collect())
    }
}

/// `a ∩ b`.
pub fn intersect(a: &RowSpan, b: &RowSpan) -> RowSpan {
    let ra = a.rows();
    let mut gens = ra.clone();
    gens.extend(b.rows());
    let tr = Tracked::new(a.z, a.ncols, &gens);
    let na = ra.len();
    RowSpan::from_rows(a.z, a.ncols, tr.kernel().into_iter().map(|c| combine(&a.z, a.ncols, &c[..na], &ra)))
}

/// Generators of the left kernel `{c : sum c_i rows_i = 0}`.
pub fn left_kernel(z: Zpn, ncols: usize, rows: &[Vec<u64>]) -> Vec<Vec<u64>> {
    Tracked::new(z, ncols, rows).kernel()
}

/// `sum c_i rows_i`.
pub fn combine(z: &Zpn, ncols: usize, coeffs: &[u64], rows: &[Vec<u64>]) -> Vec<u64> {
    let mut out = vec![0u64; ncols];
    for (&c, r) in coeffs.iter().zip(rows) {
        if c == 0 {
            continue;
        }
        for (o, &x) in out.iter_mut().zip(r) {
            *o = z.mul_add(*o, c, x);
        }
    }
    out
}

/// Valuations `v` of the nonzero elementary divisors `p^v` (`v < n`), sorted.
pub fn elementary_divisors(z: Zpn, rows: &[Vec<u64>], ncols: usize) -> Vec<u32> {
    let mut a: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
    let nr = a.len();
    let mut out = Vec::new();
    let mut k = 0;
    while k < nr.min(ncols) {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(k) {
            for (j, &x) in row.iter().enumerate().skip(k) {
                if x != 0 {
                    let v = z.val(x);
                    if best.map_or(true, |b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, bi, bj)) = best else { break };
        a.swap(k, bi);
        for row in a.iter_mut() {
            row.swap(k, bj);
        }
        let (_, unit) = z.split(a[k][k]);
        let ui = z.inv(unit).expect("unit");
        scale_from(&z, &mut a[k], ui, 0);
        let pv = z.p.pow(v);
        let piv = a[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != k && row[k] != 0 {
                let c = row[k] / pv;
                axpy_neg(&z, row, c, &piv, 0);
            }
        }
        // Column elimination only touches row k.
        for j in (k + 1)..ncols {
            a[k][j] = 0;
        }
        out.push(v);
        k += 1;
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_howell() {
        let z = Zpn::new(3, 2).unwrap();
        let rows: Vec<Vec<u64>> = (0..3).map(|i| (0..3).map(|j| (i == j) as u64).collect()).collect();
        let s = RowSpan::from_rows(z, 3, rows.clone());
        assert_eq!(s.howell_form(), rows);
    }

    #[test]
    fn two_does_not_generate_one() {
        let z = Zpn::new(2, 2).unwrap();
        let s = RowSpan::from_rows(z, 1, vec![vec![2]]);
        assert_eq!(s.howell_form(), vec![vec![2]]);
        assert!(!s.contains(&[1]));
        assert!(s.contains(&[2]));
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn howell_property_needs_extra_rows() {
        // [2, 1] over Z/4: 2*[2,1] = [0,2] lies in the span.
        let z = Zpn::new(2, 2).unwrap();
        let s = RowSpan::from_rows(z, 2, vec![vec![2, 1]]);
        assert!(s.contains(&[0, 2]));
        assert!(!s.contains(&[0, 1]));
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn kernel_of_p() {
        let z = Zpn::new(3, 2).unwrap();
        let k = left_kernel(z, 1, &[vec![3]]);
        let s = RowSpan::from_rows(z, 1, k);
        assert!(s.contains(&[3]));
        assert!(!s.contains(&[1]));
    }

    #[test]
    fn smith_divisors() {
        let z = Zpn::new(2, 3).unwrap();
        assert_eq!(elementary_divisors(z, &[vec![2, 0], vec![0, 4]], 2), vec![1, 2]);
        assert_eq!(elementary_divisors(z, &[vec![2, 4], vec![6, 4]], 2), vec![1]);
        assert_eq!(elementary_divisors(z, &[vec![2, 4], vec![6, 2]], 2), vec![1, 1]);
        assert_eq!(elementary_divisors(z, &[vec![0, 0]], 2), Vec::<u32>::new());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use std::collections::HashSet;

        /// Every `Z/q`-combination of `rows`.
        fn brute_span(rows: &[Vec<u64>], q: u64) -> HashSet<Vec<u64>> {
            let ncols = rows[0].len();
            let mut out = HashSet::new();
            let mut coef = vec![0u64; rows.len()];
            loop {
                let v: Vec<u64> = (0..ncols).map(|j| rows.iter().zip(&coef).map(|(r, &c)| r[j] * c).sum::<u64>() % q).collect();
                out.insert(v);
                let mut i = 0;
                while i < coef.len() {
                    coef[i] += 1;
                    if coef[i] < q {
                        break;
                    }
                    coef[i] = 0;
                    i += 1;
                }
                if i == coef.len() {
                    return out;
                }
            }
        }

        fn check(p: u64, n: u32, rows: Vec<Vec<u64>>, probes: Vec<Vec<u64>>) -> Result<(), TestCaseError> {
            let z = Zpn::new(p, n).unwrap();
            let q = z.q;
            let ncols = rows[0].len();
            let s = RowSpan::from_rows(z, ncols, rows.clone());
            let span = brute_span(&rows, q);
            prop_assert_eq!(p.pow(s.len() as u32), span.len() as u64);
            for v in &probes {
                prop_assert_eq!(s.contains(v), span.contains(v));
            }
            let h = RowSpan::from_rows(z, ncols, s.howell_form());
            prop_assert!(h.same_span(&s));
            prop_assert_eq!(h.howell_form(), s.howell_form());
            Ok(())
        }

        proptest! {
            #[test]
            fn span_over_z8(rows in prop::collection::vec(prop::collection::vec(0u64..8, 4), 4),
                            probes in prop::collection::vec(prop::collection::vec(0u64..8, 4), 8)) {
                check(2, 3, rows, probes)?;
            }

            #[test]
            fn span_over_z9(rows in prop::collection::vec(prop::collection::vec(0u64..9, 5), 3),
                            probes in prop::collection::vec(prop::collection::vec(0u64..9, 5), 8)) {
                check(3, 2, rows, probes)?;
            }
        }
    }
}
