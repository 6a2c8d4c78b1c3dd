//! Fontaine-Laffaille modules over `W_n` and the functor to Breuil modules.
//!
//! `M = ⊕ W_n/p^(a_j)` carries a decreasing filtration given by generators
//! of each `Fil^i` (`0 <= i <= h`), witnesses `C_i` with
//! `Fil^i = C_i ⊕ Fil^(i+1)`, and the divided Frobenii `phi_i` on the
//! generators of `Fil^i`.

use serde::{Deserialize, Serialize};

use crate::breuil::{is_breuil_module, standard_fil_gens, BreuilModule};
use crate::dp::pow_gen;
use crate::error::{Error, Result};
use crate::fmod::{union, Ambient, FinPhi};
use crate::linalg::{GraphSpan, RowSpan};
use crate::s1::S1Ring;
use crate::series::EisensteinPoly;
use crate::trunc::TruncRing;
use crate::witt::Witt;

#[derive(Clone, Debug)]
pub struct FLModule {
    pub w: Witt,
    /// `M = ⊕_j W_n / p^(exps[j])`.
    pub exps: Vec<u32>,
    pub h: usize,
    /// `fil[i]`: generators of `Fil^i`, vectors of length `g m`.
    pub fil: Vec<Vec<Vec<u64>>>,
    /// `phis[i][k] = phi_i(fil[i][k])`.
    pub phis: Vec<Vec<Vec<u64>>>,
    /// `complements[i]`: generators of `C_i`.
    pub complements: Vec<Vec<Vec<u64>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlReport {
    pub well_defined: bool,
    /// Decreasing filtration with the stated direct-summand witnesses.
    pub axiom1: bool,
    /// `phi_i = p phi_(i+1)` on `Fil^(i+1)`.
    pub axiom2: bool,
    /// `sum_i phi_i(Fil^i) = M`.
    pub axiom3: bool,
    pub failure: Option<String>,
}

impl FlReport {
    pub fn passes(&self) -> bool {
        self.failure.is_none()
    }
}

impl FLModule {
    pub fn new(
        w: Witt,
        exps: Vec<u32>,
        h: usize,
        fil: Vec<Vec<Vec<u64>>>,
        phis: Vec<Vec<Vec<u64>>>,
        complements: Vec<Vec<Vec<u64>>>,
    ) -> Result<Self> {
        let dim = exps.len() * w.m;
        let n = w.z.n;
        if exps.iter().any(|&a| a == 0 || a > n) {
            return Err(Error::Dimension("exponents must lie in 1..=n".into()));
        }
        if fil.len() != h + 1 || phis.len() != h + 1 || complements.len() != h + 1 {
            return Err(Error::Dimension("filtration must have h + 1 steps".into()));
        }
        for i in 0..=h {
            if fil[i].len() != phis[i].len() {
                return Err(Error::Dimension(format!("Fil^{i} and phi_{i} differ in length")));
            }
            let all = fil[i].iter().chain(&phis[i]).chain(&complements[i]);
            if all.clone().any(|v| v.len() != dim) {
                return Err(Error::Dimension("vector of the wrong length".into()));
            }
        }
        Ok(FLModule { w, exps, h, fil, phis, complements })
    }

    pub fn g(&self) -> usize {
        self.exps.len()
    }

    pub fn p(&self) -> u64 {
        self.w.z.p
    }

    /// `W_n^g` as a module over `W_n[u]/u`.
    pub fn ambient(&self) -> Ambient {
        Ambient::new(TruncRing::series(self.w.clone(), 1), self.g())
    }

    pub fn rel_span(&self, amb: &Ambient) -> RowSpan {
        let z = amb.z();
        let rels: Vec<Vec<u64>> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &a)| a < z.n)
            .map(|(j, &a)| amb.scale_int(&amb.unit(j), z.p_pow(a)))
            .collect();
        amb.span(&rels)
    }

    /// Graph of `phi_i` on `Fil^i`, with relations sent to zero.
    pub fn graph(&self, amb: &Ambient, rel: &RowSpan, i: usize) -> GraphSpan {
        let w = &self.w;
        let mut gr = GraphSpan::new(amb.z(), amb.dim());
        for (f, img) in self.fil[i].iter().zip(&self.phis[i]) {
            for t in 0..w.m {
                let xt = pow_gen(w, t);
                let sx = amb.ring.from_witt(&w.sigma(&xt));
                gr.insert(&amb.basis_mul(f, 0, t), &amb.mul_elem(&sx, img));
            }
        }
        let zero = amb.zero();
        for r in rel.rows() {
            gr.insert(&r, &zero);
        }
        gr
    }

    /// `phi_0(e_j)` for every basis vector.
    pub fn phi0_images(&self) -> Result<Vec<Vec<u64>>> {
        let amb = self.ambient();
        let rel = self.rel_span(&amb);
        let gr = self.graph(&amb, &rel, 0);
        (0..self.g())
            .map(|j| gr.eval(&amb.unit(j)).map(|v| rel.reduce(&v)).ok_or_else(|| Error::NotFL("Fil^0 is not M".into())))
            .collect()
    }

    /// `(M, phi_0)` as a finite subquotient.
    pub fn fin(&self) -> Result<FinPhi> {
        let amb = self.ambient();
        let rel = self.rel_span(&amb);
        let images = self.phi0_images()?;
        let gens = (0..self.g()).map(|j| amb.unit(j)).collect();
        Ok(FinPhi::new(amb, gens, rel, images, 0))
    }
}

pub fn is_fl_module(m: &FLModule) -> FlReport {
    let amb = m.ambient();
    let rel = m.rel_span(&amb);
    let h = m.h;
    let graphs: Vec<GraphSpan> = (0..=h).map(|i| m.graph(&amb, &rel, i)).collect();
    let well_defined = graphs.iter().all(|g| g.defects().iter().all(|v| rel.contains(v)));
    let fil: Vec<RowSpan> = (0..=h).map(|i| union(&amb.span(&m.fil[i]), &rel)).collect();
    let whole = amb.whole();
    let zero = rel.clone();
    let next = |i: usize| if i < h { &fil[i + 1] } else { &zero };
    let axiom1 = fil[0].same_span(&whole)
        && (0..=h).all(|i| {
            let c = union(&amb.span(&m.complements[i]), &rel);
            let nx = next(i);
            fil[i].contains_span(nx)
                && fil[i].contains_span(&c)
                && union(&c, nx).same_span(&fil[i])
                && (c.len() - rel.len()) + (nx.len() - rel.len()) == fil[i].len() - rel.len()
        });
    let p = m.p() % amb.z().q;
    let axiom2 = well_defined
        && (0..h).all(|i| {
            m.fil[i + 1].iter().all(|f| {
                (0..m.w.m).all(|t| {
                    let x = amb.basis_mul(f, 0, t);
                    match (graphs[i].eval(&x), graphs[i + 1].eval(&x)) {
                        (Some(a), Some(b)) => rel.contains(&amb.sub(&a, &amb.scale_int(&b, p))),
                        _ => false,
                    }
                })
            })
        });
    let mut img = rel.clone();
    for g in &graphs {
        img.extend(g.image().rows());
    }
    let axiom3 = img.same_span(&whole);
    let failure = if !well_defined {
        Some("phi_i is not well defined".to_string())
    } else if !axiom1 {
        Some("axiom 1: filtration and direct-summand witnesses".to_string())
    } else if !axiom2 {
        Some("axiom 2: phi_i = p phi_(i+1) on Fil^(i+1)".to_string())
    } else if !axiom3 {
        Some("axiom 3: sum of phi_i(Fil^i) is not M".to_string())
    } else {
        None
    };
    FlReport { well_defined, axiom1, axiom2, axiom3, failure }
}

/// `E = u + p` over the residue field of the module.
pub fn unramified_eisenstein(w: &Witt) -> Result<EisensteinPoly> {
    let mut coeffs = vec![0u64; 2 * w.m];
    coeffs[0] = w.z.p;
    coeffs[w.m] = 1;
    EisensteinPoly::explicit_ints(w.z.p, w.f.clone(), coeffs)
}

/// `S_1 ⊗ M` with `Fil^h = sum_j Fil^j S ⊗ Fil^(h-j) M`,
/// `phi_h = sum_j phi_j ⊗ phi_(h-j)` and `nabla = d/du ⊗ 1`.
pub fn fl_to_breuil(m: &FLModule, dz: Option<u32>) -> Result<BreuilModule> {
    if m.w.z.n != 1 {
        return Err(Error::NotKilledByP);
    }
    let eis = unramified_eisenstein(&m.w)?;
    let s1 = match dz {
        Some(dz) => S1Ring::new(&m.w, &eis, dz)?,
        None => S1Ring::with_default_dz(&m.w, &eis)?,
    };
    let g = m.g();
    let h = m.h;
    let amb = Ambient::new(s1.ring().clone(), g);
    let r = amb.ring.clone();
    let mm = m.w.m;
    let embed = |v: &[u64]| -> Vec<u64> {
        let blocks: Vec<Vec<u64>> = (0..g).map(|j| r.from_witt(&v[j * mm..(j + 1) * mm])).collect();
        amb.from_blocks(&blocks)
    };
    let phi0: Vec<Vec<u64>> = m.phi0_images()?.iter().map(|v| embed(v)).collect();
    let (mut gens, mut imgs) = standard_fil_gens(&s1, &amb, h, &phi0)?;
    for j in 0..h {
        let uj = r.u_pow(j);
        let cj = s1.c1_pow(j);
        for (f, img) in m.fil[h - j].iter().zip(&m.phis[h - j]) {
            gens.push(amb.mul_elem(&uj, &embed(f)));
            imgs.push(amb.mul_elem(&cj, &embed(img)));
        }
    }
    let nabla = Some(vec![amb.zero(); g]);
    BreuilModule::new(s1, g, h, Vec::new(), gens, imgs, nabla)
}

/// Whether `phi_h(Fil^h)` generates `fl_to_breuil(M)`.
pub fn fl_criterion(m: &FLModule, dz: Option<u32>) -> Result<bool> {
    Ok(is_breuil_module(&fl_to_breuil(m, dz)?).generates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::WittRing;

    /// Rank one over `W_n` with `Fil^i = M` for `i <= top` and the given `phi_top`.
    fn rank_one(p: u64, n: u32, h: usize, top: usize, phi_top: u64) -> FLModule {
        let w = WittRing::default_for(p, n, 1).unwrap();
        let e = vec![1u64];
        let mut fil = vec![Vec::new(); h + 1];
        let mut phis = vec![Vec::new(); h + 1];
        let mut comp = vec![Vec::new(); h + 1];
        for i in 0..=top {
            fil[i] = vec![e.clone()];
            phis[i] = vec![vec![w.z.mul(phi_top, w.z.p_pow((top - i) as u32))]];
        }
        comp[top] = vec![e];
        FLModule::new(w, vec![n], h, fil, phis, comp).unwrap()
    }

    #[test]
    fn multiplicative_rank_one() {
        let m = rank_one(3, 1, 1, 0, 1);
        assert!(is_fl_module(&m).passes());
        assert!(fl_criterion(&m, Some(1)).unwrap());
        let b = fl_to_breuil(&m, Some(1)).unwrap();
        assert!(is_breuil_module(&b).passes(), "{:?}", is_breuil_module(&b));
    }

    #[test]
    fn zero_top_phi_fails_axiom_three() {
        let m = rank_one(3, 1, 1, 1, 0);
        let rep = is_fl_module(&m);
        assert!(!rep.axiom3 && !rep.passes());
        assert!(!fl_criterion(&m, Some(1)).unwrap());
    }

    #[test]
    fn tate_twist_shape() {
        let m = rank_one(5, 1, 2, 2, 1);
        assert!(is_fl_module(&m).passes());
        let b = fl_to_breuil(&m, Some(1)).unwrap();
        assert!(b.filtered().fil.contains(&b.amb.unit(0)));
        assert!(is_breuil_module(&b).passes(), "{:?}", is_breuil_module(&b));
    }

    #[test]
    fn w2_with_fil1_equal_to_pm() {
        // Fil^1 = pM, phi_0 = sigma, phi_1(p) = 1 as forced by axiom 2.
        let w = WittRing::default_for(3, 2, 1).unwrap();
        let m = FLModule::new(
            w,
            vec![2],
            1,
            vec![vec![vec![1]], vec![vec![3]]],
            vec![vec![vec![1]], vec![vec![1]]],
            vec![vec![vec![1]], vec![vec![3]]],
        )
        .unwrap();
        let rep = is_fl_module(&m);
        assert!(rep.axiom3);
        // p * (p e) = 0 but phi_1(p * p e) = p, so phi_1 is not well defined.
        assert!(!rep.well_defined && !rep.passes());
    }
}
