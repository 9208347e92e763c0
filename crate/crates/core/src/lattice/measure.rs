//! Single-site anyon-type projectors `K^{R,C}_s` and the all-site
//! measurement `M_K`.
//!
//! `K^{R,C}_s = (|R|/|Z(C)|) Σ_{n ∈ Z(C), c ∈ C} χ̄_R(n) A^{τ_c n τ̄_c}_v B^c_p`.
//! On a configuration with flux `c` at `p`, only the `c` term survives, and
//! `A^{τ_c n τ̄_c}_v` preserves that flux.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;

use super::state::vertex_act;
use super::{Lattice, LatticeError, LatticeState, Site};
use crate::algebra::{Anyon, GroupElement, ANYONS, C64};

/// Terms `(flux c, vertex element τ_c n τ̄_c, coefficient)` of `K^{R,C}`.
pub fn k_projector_coefficients(anyon: Anyon) -> Vec<(GroupElement, GroupElement, C64)> {
    let class = anyon.class();
    let irrep = anyon.irrep();
    let pref = irrep.dim() as f64 / class.centralizer().len() as f64;
    let mut out = Vec::new();
    for &c in class.members() {
        let tau = class.tau(c);
        for &n in class.centralizer() {
            let chi = irrep.character(n).expect("centralizer element").conj();
            out.push((c, tau * n * tau.inv(), chi * pref));
        }
    }
    out
}

/// Anyon label at every site.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AnyonConfiguration {
    width: usize,
    height: usize,
    anyons: Vec<Anyon>,
}

impl AnyonConfiguration {
    /// All-vacuum configuration.
    pub fn vacuum(lattice: &Lattice) -> Self {
        Self::new(lattice.width(), lattice.height())
    }

    /// All-vacuum configuration on a `width × height` site grid of any size
    /// (no lattice state is needed).
    pub fn new(width: usize, height: usize) -> Self {
        AnyonConfiguration { width, height, anyons: vec![Anyon::A; width * height] }
    }

    pub fn get(&self, s: Site) -> Anyon {
        self.anyons[s.y * self.width + s.x]
    }

    pub fn set(&mut self, s: Site, a: Anyon) {
        self.anyons[s.y * self.width + s.x] = a;
    }

    pub fn is_vacuum(&self) -> bool {
        self.anyons.iter().all(|&a| a == Anyon::A)
    }

    /// Sites carrying a non-trivial anyon, in row-major order.
    pub fn nontrivial(&self) -> Vec<(Site, Anyon)> {
        (0..self.height)
            .flat_map(|y| (0..self.width).map(move |x| Site::new(x, y)))
            .map(|s| (s, self.get(s)))
            .filter(|&(_, a)| a != Anyon::A)
            .collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

impl fmt::Display for AnyonConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for y in 0..self.height {
            let row: Vec<String> = (0..self.width).map(|x| self.get(Site::new(x, y)).to_string()).collect();
            if y > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

impl LatticeState {
    /// Applies `K^{R,C}_s` (without renormalizing).
    pub fn apply_k(&mut self, s: Site, anyon: Anyon) {
        let coeffs: Vec<(u8, u8, C64)> = k_projector_coefficients(anyon)
            .into_iter()
            .map(|(c, k, z)| (c.index() as u8, k.index() as u8, z))
            .collect();
        let lattice = self.lattice.clone();
        let v = lattice.vertex_index(s.vertex());
        self.map_linear(|key, out| {
            let flux = LatticeState::flux_packed(&lattice, key, s);
            for &(c, k, z) in &coeffs {
                if c == flux {
                    out.push((vertex_act(&lattice, key, v, k), z));
                }
            }
        });
    }

    /// Outcome probabilities of `{K^{R,C}_s}` at one site.
    pub fn site_distribution(&self, s: Site) -> Result<BTreeMap<Anyon, f64>, LatticeError> {
        self.lattice.check_site(s)?;
        let total = self.norm_sqr();
        if total < 1e-300 {
            return Err(LatticeError::ZeroNorm);
        }
        let mut out = BTreeMap::new();
        for a in ANYONS {
            let mut p = self.clone();
            p.apply_k(s, a);
            let w = p.norm_sqr() / total;
            if w > 1e-15 {
                out.insert(a, w);
            }
        }
        Ok(out)
    }

    /// Projects onto `K^{R,C}_s` and renormalizes; returns the probability.
    pub fn project_site(&mut self, s: Site, anyon: Anyon) -> Result<f64, LatticeError> {
        self.lattice.check_site(s)?;
        let before = self.norm_sqr();
        self.apply_k(s, anyon);
        let p = self.norm_sqr() / before;
        self.normalize()?;
        Ok(p)
    }

    /// Samples the anyon type at one site and projects onto it.
    pub fn measure_site<R: Rng + ?Sized>(&mut self, s: Site, rng: &mut R) -> Result<(Anyon, f64), LatticeError> {
        let dist = self.site_distribution(s)?;
        let total: f64 = dist.values().sum();
        let normalized: BTreeMap<Anyon, f64> = dist.iter().map(|(&a, &p)| (a, p / total)).collect();
        let a = crate::fusion_sim::sample(&normalized, rng);
        let p = self.project_site(s, a)?;
        Ok((a, p))
    }

    /// `M_K`: measures every site in row-major order (the projectors at
    /// different sites commute).
    pub fn measure_mk<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<AnyonConfiguration, LatticeError> {
        let mut config = AnyonConfiguration::vacuum(&self.lattice);
        let sites: Vec<Site> = self.lattice.sites().collect();
        for s in sites {
            let (a, _) = self.measure_site(s, rng)?;
            config.set(s, a);
        }
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Representation, Ribbon, RibbonDirection};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_single_plaquette(seed: u64) -> LatticeState {
        let lat = Lattice::new(1, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms = (0..6usize.pow(4)).map(|mut i| {
            let c: Vec<GroupElement> = (0..4)
                .map(|_| {
                    let g = GroupElement::from_index(i % 6);
                    i /= 6;
                    g
                })
                .collect();
            (c, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        });
        LatticeState::from_terms(&lat, terms).unwrap()
    }

    #[test]
    fn k_projectors_are_complete_and_orthogonal() {
        let psi = random_single_plaquette(1);
        let s = Site::new(0, 0);
        let mut sum = psi.clone();
        sum.scale(C64::default());
        for a in ANYONS {
            let mut ka = psi.clone();
            ka.apply_k(s, a);
            for (c, z) in ka.stored_terms() {
                let key = crate::lattice::state::pack(&c);
                *sum.terms.entry(key).or_default() += z;
            }
            for b in ANYONS {
                let mut kbka = ka.clone();
                kbka.apply_k(s, b);
                let expected = if a == b { ka.clone() } else {
                    let mut z = ka.clone();
                    z.scale(C64::default());
                    z
                };
                assert!(kbka.distance(&expected).unwrap() < 1e-10, "K_{b} K_{a}: {} vs {}", kbka.distance(&expected).unwrap(), ka.norm());
            }
        }
        assert!(sum.distance(&psi).unwrap() < 1e-10);
    }

    #[test]
    fn ground_state_is_all_vacuum_and_unchanged() {
        let lat = Lattice::new(3, 1).unwrap();
        let g = LatticeState::ground_state(&lat).unwrap();
        let mut s = g.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let config = s.measure_mk(&mut rng).unwrap();
        assert!(config.is_vacuum());
        assert!(s.distance(&g).unwrap() < 1e-10);
        for site in lat.sites() {
            let d = g.site_distribution(site).unwrap();
            assert!((d[&Anyon::A] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn chargeon_ribbon_gives_c_at_both_ends() {
        let lat = Lattice::new(2, 1).unwrap();
        for repr in [Representation::Plain, Representation::BoundaryGaugeFixed] {
            let mut s = LatticeState::ground_state_with(&lat, repr).unwrap();
            let r = Ribbon::shortest(&lat, Site::new(0, 0), RibbonDirection::Horizontal).unwrap();
            s.apply_anyon_ribbon(&r, Anyon::C, 0, 1).unwrap();
            for site in lat.sites() {
                let d = s.site_distribution(site).unwrap();
                assert!((d[&Anyon::C] - 1.0).abs() < 1e-12, "{repr:?} {site}: {d:?}");
            }
        }
    }

    #[test]
    fn configuration_display_is_a_letter_grid() {
        let lat = Lattice::new(2, 2).unwrap();
        let mut c = AnyonConfiguration::vacuum(&lat);
        c.set(Site::new(1, 1), Anyon::G);
        assert_eq!(c.to_string(), "A A\nA G");
        assert_eq!(c.nontrivial(), vec![(Site::new(1, 1), Anyon::G)]);
    }
}
