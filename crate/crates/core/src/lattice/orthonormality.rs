//! Trace orthogonality of the shortest ribbon operators.
//!
//! For shortest ribbons `ρ₁, ρ₂` the operators `F^{R,C;u,v}` satisfy
//! `Tr(F₁† F₂) / Tr(1) = |R|/(|Z(C)||G|)` when all labels and the ribbon
//! agree and `0` otherwise, except that the vacuum operators on any two
//! ribbons are both `(1/6)·1`, so their cross ratio is `1/36`. Each shortest ribbon carries `|G|² = 36`
//! operators.
//!
//! Traces are evaluated exactly on the union of the ribbons' edges: every
//! operator is a sum of monomials, so `Tr(F₁†F₂) = Σ_x ⟨F₁x|F₂x⟩` over the
//! local basis.

use std::collections::BTreeMap;

use super::ribbon::anyon_ribbon_terms;
use super::state::set;
use super::{Lattice, LatticeError, Ribbon, RibbonDirection, Site};
use crate::algebra::{Anyon, ANYONS, C64};

/// `F^{R,C;u,v}_ρ` with its labels.
#[derive(Clone, Debug)]
pub struct RibbonOperator {
    pub ribbon: Ribbon,
    pub anyon: Anyon,
    pub u: usize,
    pub v: usize,
}

impl RibbonOperator {
    fn image(&self, key: u64) -> BTreeMap<u64, C64> {
        let mut out = BTreeMap::new();
        for (h, g, c) in anyon_ribbon_terms(self.anyon, self.u, self.v).expect("valid labels") {
            if let Some(k) = self.ribbon.act_packed(key, h.index() as u8, g.index() as u8) {
                *out.entry(k).or_insert(C64::default()) += c;
            }
        }
        out
    }
}

/// All `F^{R,C;u,v}` on one ribbon.
pub fn shortest_ribbon_operators(ribbon: &Ribbon) -> Vec<RibbonOperator> {
    let mut out = Vec::new();
    for anyon in ANYONS {
        for u in 0..anyon.dim() {
            for v in 0..anyon.dim() {
                out.push(RibbonOperator { ribbon: ribbon.clone(), anyon, u, v });
            }
        }
    }
    out
}

/// The two ways a horizontal and a vertical shortest ribbon can share an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OverlapPattern {
    /// Both ribbons start at the same site; they share its top edge (`T` of
    /// `ρ_h`, `L` of `ρ_v`).
    I,
    /// `ρ_v` ends where `ρ_h` ends; they share the vertical edge below that
    /// site (`L` of `ρ_h`, `T` of `ρ_v`).
    II,
}

impl OverlapPattern {
    /// `(lattice, ρ_h, ρ_v)` realizing the pattern on a 2×2 lattice.
    pub fn ribbons(self) -> Result<(Lattice, Ribbon, Ribbon), LatticeError> {
        let lat = Lattice::new(2, 2)?;
        let (rh, rv) = match self {
            OverlapPattern::I => (
                Ribbon::shortest(&lat, Site::new(0, 1), RibbonDirection::Horizontal)?,
                Ribbon::shortest(&lat, Site::new(0, 1), RibbonDirection::Vertical)?,
            ),
            OverlapPattern::II => (
                Ribbon::shortest(&lat, Site::new(0, 0), RibbonDirection::Horizontal)?,
                Ribbon::shortest(&lat, Site::new(1, 1), RibbonDirection::Vertical)?,
            ),
        };
        Ok((lat, rh, rv))
    }
}

#[derive(Clone, Debug)]
pub struct OrthonormalityReport {
    pub pattern: OverlapPattern,
    pub shared_edges: usize,
    pub operators_per_ribbon: [usize; 2],
    /// Largest deviation of `Tr(F†F')/Tr(1)` from the expected value for
    /// pairs on the same ribbon.
    pub same_ribbon_residual: f64,
    /// Largest deviation for pairs on different ribbons.
    pub cross_ribbon_residual: f64,
    /// Trace ratio of `F^{D}` with itself (expected `1/12`).
    pub d_self_ratio: f64,
    pub pairs_checked: usize,
}

impl OrthonormalityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.operators_per_ribbon == [36, 36]
            && self.same_ribbon_residual < tol
            && self.cross_ribbon_residual < tol
    }
}

/// Checks every trace identity for the ribbon pair of `pattern`.
pub fn verify_orthonormality(pattern: OverlapPattern) -> Result<OrthonormalityReport, LatticeError> {
    let (_, rh, rv) = pattern.ribbons()?;
    let mut support: Vec<usize> = rh.edges().into_iter().chain(rv.edges()).collect();
    support.sort_unstable();
    support.dedup();
    let shared = rh.edges().len() + rv.edges().len() - support.len();
    let local_dim = 6usize.pow(support.len() as u32);
    let keys: Vec<u64> = (0..local_dim)
        .map(|mut i| {
            support.iter().fold(0u64, |k, &e| {
                let g = (i % 6) as u8;
                i /= 6;
                set(k, e, g)
            })
        })
        .collect();

    let ops: Vec<(usize, RibbonOperator)> = shortest_ribbon_operators(&rh)
        .into_iter()
        .map(|o| (0, o))
        .chain(shortest_ribbon_operators(&rv).into_iter().map(|o| (1, o)))
        .collect();
    let images: Vec<Vec<BTreeMap<u64, C64>>> =
        ops.iter().map(|(_, o)| keys.iter().map(|&k| o.image(k)).collect()).collect();

    let mut report = OrthonormalityReport {
        pattern,
        shared_edges: shared,
        operators_per_ribbon: [
            ops.iter().filter(|(r, _)| *r == 0).count(),
            ops.iter().filter(|(r, _)| *r == 1).count(),
        ],
        same_ribbon_residual: 0.0,
        cross_ribbon_residual: 0.0,
        d_self_ratio: f64::NAN,
        pairs_checked: 0,
    };
    for (i, (ri, oi)) in ops.iter().enumerate() {
        for (j, (rj, oj)) in ops.iter().enumerate() {
            let tr: C64 = images[i]
                .iter()
                .zip(&images[j])
                .map(|(a, b)| a.iter().filter_map(|(k, x)| b.get(k).map(|y| x.conj() * y)).sum::<C64>())
                .sum();
            let ratio = tr / local_dim as f64;
            let expected = if ri == rj {
                if oi.anyon == oj.anyon && oi.u == oj.u && oi.v == oj.v {
                    let a = oi.anyon;
                    a.irrep().dim() as f64 / (a.class().centralizer().len() as f64 * 6.0)
                } else {
                    0.0
                }
            } else if oi.anyon == Anyon::A && oj.anyon == Anyon::A {
                // Both vacuum operators are (1/6)·1.
                1.0 / 36.0
            } else {
                0.0
            };
            let dev = (ratio - C64::new(expected, 0.0)).norm();
            if ri == rj {
                report.same_ribbon_residual = report.same_ribbon_residual.max(dev);
                if i == j && oi.anyon == Anyon::D && *ri == 0 && report.d_self_ratio.is_nan() {
                    report.d_self_ratio = ratio.re;
                }
            } else {
                report.cross_ribbon_residual = report.cross_ribbon_residual.max(dev);
            }
            report.pairs_checked += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_overlap_patterns_are_orthonormal() {
        for pattern in [OverlapPattern::I, OverlapPattern::II] {
            let rep = verify_orthonormality(pattern).unwrap();
            assert_eq!(rep.shared_edges, 1);
            assert_eq!(rep.operators_per_ribbon, [36, 36]);
            assert!(rep.passes(1e-9), "{rep:?}");
            assert!((rep.d_self_ratio - 1.0 / 12.0).abs() < 1e-12);
            assert_eq!(rep.pairs_checked, 72 * 72);
        }
    }
}
