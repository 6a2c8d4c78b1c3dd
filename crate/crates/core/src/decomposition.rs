//! Multiplicative/nilpotent decomposition of finite Frobenius modules.
//!
//! The multiplicative part is the span of the canonical section
//! `x -> [x]` of the stable image of `phi` on `M / I_+ M`; the section is
//! `phi^t` of any lift of `phi^(-t)(x)` once `phi^t` kills `I_+ M`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::breuil::{fil_of_mult_is_standard, BreuilModule};
use crate::error::{Error, Result};
use crate::fl::{fl_to_breuil, is_fl_module, FLModule};
use crate::fmod::{union, FinPhi};
use crate::linalg::{intersect, RowSpan, Tracked};
use crate::phi_modules::{PhiModule, Poly};
use crate::trunc::TruncRing;

/// `M = M_mult ⊕ M_nilp` for a subquotient `A/B`.
#[derive(Clone, Debug)]
pub struct Split {
    /// `log_p |A/B|`, `log_p |M_mult|`, `log_p |M_nilp|`.
    pub total: usize,
    pub mult: usize,
    pub nilp: usize,
    /// `[x]` for the canonical basis of the multiplicative part of `M/I_+M`.
    pub section: Vec<Vec<u64>>,
    /// `M_mult + B`.
    pub mult_span: RowSpan,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitChecks {
    /// `M_mult` has the length predicted by its presentation.
    pub lengths: bool,
    /// `M_mult / I_+ M_mult` maps isomorphically onto `(M / I_+ M)^mult`.
    pub reduction_iso: bool,
    pub phi_stable: bool,
    pub mult_bijective: bool,
    pub quotient_nilpotent: bool,
    pub idempotent: bool,
    /// Same section from independently randomized lifts.
    pub unique: bool,
}

impl SplitChecks {
    pub fn all(&self) -> bool {
        self.lengths
            && self.reduction_iso
            && self.phi_stable
            && self.mult_bijective
            && self.quotient_nilpotent
            && self.idempotent
            && self.unique
    }
}

pub fn split_fin(fin: &FinPhi, seed: u64) -> Split {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let section = fin.section(&mut rng);
    let mult_span = union(&fin.amb.span(&section), &fin.b);
    let total = fin.length();
    let mult = mult_span.len() - fin.b.len();
    Split { total, mult, nilp: total - mult, section, mult_span }
}

/// `log_p` of the image of `R^r -> A/B`, `c -> sum c_k s_k`, computed as
/// `|R^r| / |kernel|`.
fn presented_length(fin: &FinPhi, section: &[Vec<u64>]) -> usize {
    let amb = &fin.amb;
    let ring = &amb.ring;
    let mut gens = Vec::new();
    for s in section {
        for t in 0..ring.m() {
            for k in 0..ring.len {
                gens.push(amb.basis_mul(s, k, t));
            }
        }
    }
    let nfree = gens.len();
    gens.extend(fin.b.rows());
    let tr = Tracked::new(amb.z(), amb.dim(), &gens);
    let ker = RowSpan::from_rows(amb.z(), nfree, tr.kernel().into_iter().map(|c| c[..nfree].to_vec()));
    nfree * amb.z().n as usize - ker.len()
}

pub fn verify_split(fin: &FinPhi, split: &Split, seed: u64) -> SplitChecks {
    let amb = &fin.amb;
    let ms = &split.mult_span;
    let lengths = fin.a.contains_span(ms)
        && presented_length(fin, &split.section) == split.mult
        && split.mult + split.nilp == split.total;
    let base = fin.aug_b();
    let img = fin.fitting_image();
    let aug_ms = union(&amb.aug_span(&split.section), &fin.b);
    let reduction_iso = union(ms, &base).same_span(&img) && ms.len() - aug_ms.len() == img.len() - base.len();
    let phi_stable = split.section.iter().all(|s| ms.contains(&fin.phi(s)));
    let mult_fin = fin.sub(split.section.clone(), fin.b.clone());
    let quot_fin = fin.sub(fin.a_gens.clone(), ms.clone());
    let mult_bijective = mult_fin.bijective_mod_aug();
    let quotient_nilpotent = quot_fin.nilpotent_mod_aug();
    let again = split_fin(&mult_fin, seed ^ 0x5eed);
    let quot = split_fin(&quot_fin, seed ^ 0xface);
    let idempotent = again.mult_span.same_span(ms) && quot.mult == 0;
    let other = split_fin(fin, seed.wrapping_add(0x9e37_79b9));
    let unique = other.section == split.section;
    SplitChecks { lengths, reduction_iso, phi_stable, mult_bijective, quotient_nilpotent, idempotent, unique }
}

/// Section vectors `[x]` in the ambient of the module's finite view.
pub fn mult_section(m: &PhiModule, seed: u64) -> Result<Vec<Vec<u64>>> {
    Ok(split_fin(&m.finite_view()?.fin, seed).section)
}

#[derive(Clone, Debug)]
pub struct PhiSplit {
    pub fin: FinPhi,
    pub split: Split,
}

pub fn split_phi_module(m: &PhiModule, seed: u64) -> Result<PhiSplit> {
    let fin = m.finite_view()?.fin;
    let split = split_fin(&fin, seed);
    Ok(PhiSplit { fin, split })
}

#[derive(Clone, Debug)]
pub struct BreuilSplit {
    pub fin: FinPhi,
    pub split: Split,
    /// `Fil^h M ∩ M_mult = Fil^h S · M_mult`.
    pub fil_standard: bool,
}

pub fn split_breuil(b: &BreuilModule, seed: u64) -> Result<BreuilSplit> {
    let fin = b.fin()?;
    let split = split_fin(&fin, seed);
    let fil_standard = fil_of_mult_is_standard(b, &b.filtered(), &split.section);
    Ok(BreuilSplit { fin, split, fil_standard })
}

#[derive(Clone, Debug)]
pub struct FlSplit {
    pub fin: FinPhi,
    pub split: Split,
    /// `Fil^1 M ∩ M^m = 0`.
    pub fil1_trivial: bool,
}

/// `M = M^m ⊕ M^n` for the Frobenius `phi_0` of a Fontaine-Laffaille module.
pub fn split_fl(m: &FLModule, seed: u64) -> Result<FlSplit> {
    if let Some(why) = is_fl_module(m).failure {
        return Err(Error::NotFL(why));
    }
    let fin = m.fin()?;
    let split = split_fin(&fin, seed);
    let fil1_trivial = m.h == 0 || {
        let amb = &fin.amb;
        let fil1 = union(&amb.span(&m.fil[1]), &fin.b);
        fin.b.contains_span(&intersect(&fil1, &split.mult_span))
    };
    Ok(FlSplit { fin, split, fil1_trivial })
}

/// `S_1 ⊗ M^m` agrees with the multiplicative part of `fl_to_breuil(M)`.
pub fn check_split_compat(m: &FLModule, dz: Option<u32>, seed: u64) -> Result<bool> {
    let fl = split_fl(m, seed)?;
    let b = fl_to_breuil(m, dz)?;
    let bs = split_breuil(&b, seed ^ 1)?;
    let amb = &b.amb;
    let g = m.g();
    let mm = m.w.m;
    let lifted: Vec<Vec<u64>> = fl
        .split
        .section
        .iter()
        .map(|v| {
            let blocks: Vec<Vec<u64>> = (0..g).map(|j| amb.ring.from_witt(&v[j * mm..(j + 1) * mm])).collect();
            amb.from_blocks(&blocks)
        })
        .collect();
    let lhs = union(&amb.span(&lifted), &b.rel_span());
    Ok(lhs.same_span(&bs.split.mult_span))
}

/// Inverse of a square matrix over `W_n[u]/u^N` (rows of ring elements).
pub fn mat_inv(ring: &TruncRing, a: &[Vec<Vec<u64>>]) -> Result<Vec<Vec<Vec<u64>>>> {
    let g = a.len();
    let mut m: Vec<Vec<Vec<u64>>> = a.to_vec();
    let mut inv: Vec<Vec<Vec<u64>>> =
        (0..g).map(|i| (0..g).map(|j| if i == j { ring.one() } else { ring.zero() }).collect()).collect();
    for c in 0..g {
        let r = (c..g).find(|&r| ring.is_unit(&m[r][c])).ok_or(Error::NotAUnit)?;
        m.swap(c, r);
        inv.swap(c, r);
        let piv = ring.inv(&m[c][c])?;
        for j in 0..g {
            m[c][j] = ring.mul(&m[c][j], &piv);
            inv[c][j] = ring.mul(&inv[c][j], &piv);
        }
        for r in 0..g {
            if r == c || ring.is_zero(&m[r][c]) {
                continue;
            }
            let f = m[r][c].clone();
            for j in 0..g {
                let t = ring.mul(&f, &m[c][j]);
                m[r][j] = ring.sub(&m[r][j], &t);
                let t = ring.mul(&f, &inv[c][j]);
                inv[r][j] = ring.sub(&inv[r][j], &t);
            }
        }
    }
    Ok(inv)
}

/// The same u-finite module presented on generators `f_j = sum_k p[j][k] e_k`.
pub fn change_basis(m: &PhiModule, p: &[Vec<Poly>]) -> Result<PhiModule> {
    let b = m.kill_exponent()?.max(1);
    let ring = TruncRing::series(m.w.clone(), b);
    let g = m.g;
    let pm: Vec<Vec<Vec<u64>>> = p.iter().map(|r| r.iter().map(|c| ring.from_poly(c)).collect()).collect();
    let pinv = mat_inv(&ring, &pm)?;
    let rows_in_f = |row: &[Vec<u64>]| -> Vec<Poly> {
        // sum_k row_k e_k with e_k = sum_j pinv[k][j] f_j.
        (0..g)
            .map(|j| {
                let mut acc = ring.zero();
                for k in 0..g {
                    acc = ring.add(&acc, &ring.mul(&row[k], &pinv[k][j]));
                }
                acc
            })
            .collect()
    };
    let mut relations: Vec<Vec<Poly>> = m
        .relations
        .iter()
        .map(|r| rows_in_f(&r.iter().map(|c| ring.from_poly(c)).collect::<Vec<_>>()))
        .collect();
    for j in 0..g {
        let mut r = vec![Vec::new(); g];
        let mut ub = vec![0u64; (b + 1) * m.w.m];
        ub[b * m.w.m] = 1;
        r[j] = ub;
        relations.push(r);
    }
    let phi_e: Vec<Vec<Vec<u64>>> = m.phi.iter().map(|r| r.iter().map(|c| ring.from_poly(c)).collect()).collect();
    let phi = (0..g)
        .map(|j| {
            // phi(f_j) = sum_k phi(p[j][k]) phi(e_k).
            let mut acc = vec![ring.zero(); g];
            for k in 0..g {
                let c = ring.phi(&pm[j][k]);
                for i in 0..g {
                    acc[i] = ring.add(&acc[i], &ring.mul(&c, &phi_e[k][i]));
                }
            }
            rows_in_f(&acc)
        })
        .collect();
    PhiModule::new(m.w.clone(), g, 0, relations, phi)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Functoriality {
    pub scalar: bool,
    pub basis_change: bool,
    pub direct_sum: bool,
}

/// Compatibility of the splitting with multiplication by a unit, with a
/// change of basis `p`, and with direct sums against `other`.
pub fn check_functoriality(m: &PhiModule, p: &[Vec<Poly>], other: &PhiModule, seed: u64) -> Result<Functoriality> {
    let base = split_phi_module(m, seed)?;
    let amb = &base.fin.amb;
    let unit = (m.p() + 1) % amb.z().q;
    let scalar = base.split.section.iter().all(|s| base.split.mult_span.contains(&amb.scale_int(s, unit)));

    let moved = change_basis(m, p)?;
    let ms = split_phi_module(&moved, seed ^ 1)?;
    let ring = &amb.ring;
    let pm: Vec<Vec<Vec<u64>>> = p.iter().map(|r| r.iter().map(|c| ring.from_poly(c)).collect()).collect();
    let famb = &ms.fin.amb;
    let mut images = Vec::new();
    for v in &ms.split.section {
        let mut out = amb.zero();
        for j in 0..m.g {
            let cj = famb.block(v, j);
            for k in 0..m.g {
                let c = ring.mul(cj, &pm[j][k]);
                out = amb.add(&out, &amb.elem_at(&c, k));
            }
        }
        images.push(out);
    }
    let mapped = union(&amb.span(&images), &base.fin.b);
    let basis_change = mapped.same_span(&base.split.mult_span);

    let sum = m.direct_sum(other)?;
    let ss = split_phi_module(&sum, seed ^ 2)?;
    let so = split_phi_module(other, seed ^ 3)?;
    let direct_sum = ss.split.mult == base.split.mult + so.split.mult && ss.split.nilp == base.split.nilp + so.split.nilp;
    Ok(Functoriality { scalar, basis_change, direct_sum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witt::WittRing;

    fn poly(ints: &[u64]) -> Poly {
        ints.to_vec()
    }

    fn mono(k: usize) -> Poly {
        let mut v = vec![0; k + 1];
        v[k] = 1;
        v
    }

    #[test]
    fn section_of_unipotent_example() {
        let w = WittRing::default_for(2, 1, 1).unwrap();
        let m = PhiModule::new(
            w,
            2,
            0,
            vec![vec![mono(9), vec![]], vec![vec![], mono(9)]],
            vec![vec![poly(&[1]), mono(1)], vec![vec![], mono(1)]],
        )
        .unwrap();
        let sp = split_phi_module(&m, 3).unwrap();
        assert_eq!(sp.split.section.len(), 1);
        let amb = &sp.fin.amb;
        let mut f = vec![0u64; 9];
        for k in [1, 3, 7] {
            f[k] = 1;
        }
        let expect = amb.from_blocks(&[amb.ring.one(), f]);
        assert_eq!(sp.split.section[0], expect);
        assert!(verify_split(&sp.fin, &sp.split, 3).all());
    }

    #[test]
    fn diagonal_one_u() {
        let w = WittRing::default_for(3, 1, 1).unwrap();
        let m = PhiModule::new(
            w,
            2,
            0,
            vec![vec![mono(4), vec![]], vec![vec![], mono(4)]],
            vec![vec![poly(&[1]), vec![]], vec![vec![], mono(1)]],
        )
        .unwrap();
        let sp = split_phi_module(&m, 1).unwrap();
        assert_eq!((sp.split.mult, sp.split.nilp), (4, 4));
        let amb = &sp.fin.amb;
        assert!(sp.split.mult_span.same_span(&amb.span(&[amb.unit(0)])));
        assert!(verify_split(&sp.fin, &sp.split, 1).all());
    }

    #[test]
    fn nilpotent_mod_u_has_empty_section() {
        let w = WittRing::default_for(2, 2, 1).unwrap();
        let m = PhiModule::cyclic(w, vec![mono(3)], mono(1)).unwrap();
        let sp = split_phi_module(&m, 0).unwrap();
        assert!(sp.split.section.is_empty());
        assert_eq!(sp.split.nilp, 6);
    }

    #[test]
    fn inverse_matrix() {
        let w = WittRing::default_for(3, 2, 1).unwrap();
        let r = TruncRing::series(w, 4);
        let a = vec![vec![r.from_poly(&[1, 1]), r.from_poly(&[0, 2])], vec![r.from_poly(&[3]), r.from_poly(&[2, 0, 1])]];
        let inv = mat_inv(&r, &a).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = r.zero();
                for k in 0..2 {
                    acc = r.add(&acc, &r.mul(&a[i][k], &inv[k][j]));
                }
                assert_eq!(acc, if i == j { r.one() } else { r.zero() });
            }
        }
    }

    #[test]
    fn functoriality_of_a_mixed_module() {
        let w = WittRing::default_for(2, 1, 1).unwrap();
        let m = PhiModule::new(
            w.clone(),
            2,
            0,
            vec![vec![mono(5), vec![]], vec![vec![], mono(5)]],
            vec![vec![poly(&[1]), mono(1)], vec![mono(2), mono(1)]],
        )
        .unwrap();
        let other = PhiModule::cyclic(w, vec![mono(2)], poly(&[1])).unwrap();
        let p = vec![vec![poly(&[1, 1]), mono(1)], vec![poly(&[0, 1]), poly(&[1])]];
        let f = check_functoriality(&m, &p, &other, 5).unwrap();
        assert!(f.scalar && f.basis_change && f.direct_sum, "{f:?}");
    }

    fn eis_u_plus_p(p: u64) -> crate::series::EisensteinPoly {
        crate::series::EisensteinPoly::explicit_ints(p, vec![0, 1], vec![p, 1]).unwrap()
    }

    fn kisin_breuil(phi: Vec<Vec<Poly>>) -> BreuilModule {
        let w = WittRing::default_for(3, 1, 1).unwrap();
        let k = PhiModule::free(w, phi).unwrap();
        crate::breuil::kisin_to_breuil(&k, 1, &eis_u_plus_p(3), Some(1)).unwrap()
    }

    #[test]
    fn breuil_splits() {
        let mult = split_breuil(&kisin_breuil(vec![vec![poly(&[1])]]), 1).unwrap();
        assert_eq!(mult.split.nilp, 0);
        assert!(mult.fil_standard && verify_split(&mult.fin, &mult.split, 1).all());
        let nilp = split_breuil(&kisin_breuil(vec![vec![mono(1)]]), 2).unwrap();
        assert_eq!(nilp.split.mult, 0);
        assert!(nilp.split.section.is_empty() && verify_split(&nilp.fin, &nilp.split, 2).all());
        let sum = split_breuil(&kisin_breuil(vec![vec![poly(&[1]), vec![]], vec![vec![], mono(1)]]), 3).unwrap();
        assert_eq!((sum.split.mult, sum.split.nilp), (mult.split.total, nilp.split.total));
        assert!(sum.fil_standard && verify_split(&sum.fin, &sum.split, 3).all());
    }

    /// Rank `g` over `W_1` with `h = 1`, `Fil^1` spanned by the listed basis
    /// vectors, `phi_1 = id` there and `phi_0 = id` on the others.
    fn fl_diag(p: u64, g: usize, fil1: &[usize]) -> FLModule {
        let w = WittRing::default_for(p, 1, 1).unwrap();
        let unit = |j: usize| {
            let mut v = vec![0u64; g];
            v[j] = 1;
            v
        };
        let zero = vec![0u64; g];
        let all: Vec<Vec<u64>> = (0..g).map(unit).collect();
        let f1: Vec<Vec<u64>> = fil1.iter().map(|&j| unit(j)).collect();
        let phi0: Vec<Vec<u64>> = (0..g).map(|j| if fil1.contains(&j) { zero.clone() } else { unit(j) }).collect();
        let c0: Vec<Vec<u64>> = (0..g).filter(|j| !fil1.contains(j)).map(unit).collect();
        FLModule::new(w, vec![1; g], 1, vec![all, f1.clone()], vec![phi0, f1.clone()], vec![c0, f1]).unwrap()
    }

    #[test]
    fn fl_splits() {
        let triv = split_fl(&fl_diag(3, 1, &[]), 0).unwrap();
        assert!(triv.fil1_trivial && triv.split.mult == 1 && triv.split.nilp == 0);
        let twist = split_fl(&fl_diag(3, 1, &[0]), 0).unwrap();
        assert_eq!(twist.split.mult, 0);
        let sum = split_fl(&fl_diag(5, 3, &[1]), 0).unwrap();
        assert_eq!((sum.split.mult, sum.split.nilp), (2, 1));
        assert!(sum.fil1_trivial && verify_split(&sum.fin, &sum.split, 0).all());
    }

    #[test]
    fn fl_and_breuil_splits_agree() {
        assert!(check_split_compat(&fl_diag(3, 1, &[]), Some(1), 4).unwrap());
        assert!(check_split_compat(&fl_diag(3, 1, &[0]), Some(1), 4).unwrap());
        let mixed = fl_diag(3, 2, &[1]);
        assert!(check_split_compat(&mixed, Some(1), 4).unwrap());
        let b = fl_to_breuil(&mixed, Some(1)).unwrap();
        let bs = split_breuil(&b, 4).unwrap();
        assert_eq!(bs.split.section.len(), 1);
    }

    mod props {
        use crate::suites::{case_rng, random_phi_module};
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn split_is_deterministic_and_checks_pass(seed in any::<u64>(), k in 0usize..64) {
                let m = random_phi_module(&mut case_rng(seed, k)).unwrap();
                let a = split_phi_module(&m, seed).unwrap();
                let b = split_phi_module(&m, seed).unwrap();
                prop_assert_eq!(&a.split.section, &b.split.section);
                prop_assert_eq!(a.split.mult + a.split.nilp, a.split.total);
                prop_assert!(verify_split(&a.fin, &a.split, seed.wrapping_add(1)).all());
            }
        }
    }
}
