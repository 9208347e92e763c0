//! Modular data of D(S3): fusion multiplicities, quantum dimensions, F- and
//! R-symbols, consistency checks, and the interferometry amplitudes used by
//! the remote-measurement protocols.
//!
//! Conventions. `[F^{abc}_d]_{ef}` maps the left-associated basis
//! `((ab)_e c)_d` to the right-associated one: `|((ab)_e c)_d⟩ = Σ_f F_{ef} |(a(bc)_f)_d⟩`.
//! `R^{ab}_c` is the eigenvalue of the counterclockwise exchange of `a` and `b`
//! in channel `c`, so `R^{ab}_c R^{ba}_c = θ_c / (θ_a θ_b)`.

mod oracle;

pub use oracle::{derive_gauge_invariants, OracleMismatch, OracleReport};

use std::sync::OnceLock;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::algebra::{derive_fusion_rules, Anyon, FusionRules, C64, ANYONS};

const EMBEDDED_TABLE: &str = include_str!("../../data/ds3_fr.txt");

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CategoryError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing {kind} entry for labels {labels}")]
    MissingEntry { kind: char, labels: String },
    #[error("fusion multiplicity {n} > 1 for {a} × {b} → {c}")]
    Multiplicity { a: Anyon, b: Anyon, c: Anyon, n: u8 },
    #[error("label {0} is not part of this category")]
    UnknownLabel(Anyon),
    #[error("labels {0} are not admissible")]
    Inadmissible(String),
}

fn key6(a: Anyon, b: Anyon, c: Anyon, d: Anyon, e: Anyon, f: Anyon) -> usize {
    [a, b, c, d, e, f]
        .iter()
        .fold(0, |acc, x| acc * 8 + x.index())
}

fn key3(a: Anyon, b: Anyon, c: Anyon) -> usize {
    (a.index() * 8 + b.index()) * 8 + c.index()
}

/// Fusion data `N`, `d`, `F`, `R` over a subset of the D(S3) labels.
#[derive(Clone, Debug)]
pub struct CategoryData {
    labels: Vec<Anyon>,
    fusion: FusionRules,
    f: Vec<C64>,
    f_present: Vec<bool>,
    r: Vec<C64>,
    r_present: Vec<bool>,
}

/// Residuals from [`CategoryData::verify_consistency`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConsistencyReport {
    pub pentagon: f64,
    pub hexagon: f64,
    pub unitarity: f64,
    pub pentagon_equations: usize,
    pub hexagon_equations: usize,
}

impl ConsistencyReport {
    pub fn passes(&self) -> bool {
        self.pentagon < 1e-9 && self.hexagon < 1e-9 && self.unitarity < 1e-9
    }
}

/// The two U-model subspaces and the full fusion space `V^{DDDD}_G`.
pub const U_BASIS: [(Anyon, Anyon); 3] = [(Anyon::A, Anyon::G), (Anyon::G, Anyon::G), (Anyon::G, Anyon::A)];
pub const U_PERP_1: [(Anyon, Anyon); 3] = [(Anyon::F, Anyon::C), (Anyon::H, Anyon::F), (Anyon::C, Anyon::H)];
pub const U_PERP_2: [(Anyon, Anyon); 3] = [(Anyon::C, Anyon::F), (Anyon::F, Anyon::H), (Anyon::H, Anyon::C)];

/// The nine `|xy⟩` labels spanning `V^{DDDD}_G`, ordered U, U⊥₁, U⊥₂.
pub fn vdddd_basis() -> Vec<(Anyon, Anyon)> {
    U_BASIS
        .iter()
        .chain(U_PERP_1.iter())
        .chain(U_PERP_2.iter())
        .copied()
        .collect()
}

impl CategoryData {
    /// The embedded D(S3) table.
    pub fn ds3() -> &'static CategoryData {
        static DATA: OnceLock<CategoryData> = OnceLock::new();
        DATA.get_or_init(|| {
            CategoryData::parse(EMBEDDED_TABLE, &ANYONS, derive_fusion_rules())
                .expect("embedded D(S3) table is well formed")
        })
    }

    /// Parses `F a b c d e f re im` and `R a b c re im` records restricted to
    /// `labels`; `#` starts a comment. Records mentioning other labels are ignored.
    pub fn parse(text: &str, labels: &[Anyon], fusion: FusionRules) -> Result<Self, CategoryError> {
        for &a in labels {
            for &b in labels {
                for &c in labels {
                    let n = fusion.n(a, b, c);
                    if n > 1 {
                        return Err(CategoryError::Multiplicity { a, b, c, n });
                    }
                }
            }
        }
        let mut data = CategoryData {
            labels: labels.to_vec(),
            fusion,
            f: vec![C64::default(); 8usize.pow(6)],
            f_present: vec![false; 8usize.pow(6)],
            r: vec![C64::default(); 512],
            r_present: vec![false; 512],
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| CategoryError::Parse { line: lineno + 1, msg: msg.to_string() };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let nlabels = match fields[0] {
                "F" => 6,
                "R" => 3,
                other => return Err(err(&format!("unknown record kind {other:?}"))),
            };
            if fields.len() != 1 + nlabels + 2 {
                return Err(err("wrong field count"));
            }
            let mut ls = Vec::with_capacity(nlabels);
            for s in &fields[1..=nlabels] {
                ls.push(Anyon::from_letter(s).map_err(|e| err(&e.to_string()))?);
            }
            let re: f64 = fields[nlabels + 1].parse().map_err(|_| err("bad real part"))?;
            let im: f64 = fields[nlabels + 2].parse().map_err(|_| err("bad imaginary part"))?;
            if !ls.iter().all(|l| labels.contains(l)) {
                continue;
            }
            let z = C64::new(re, im);
            if nlabels == 6 {
                let (a, b, c, d, e, f) = (ls[0], ls[1], ls[2], ls[3], ls[4], ls[5]);
                let admissible = data.fusion.allowed(a, b, e)
                    && data.fusion.allowed(e, c, d)
                    && data.fusion.allowed(b, c, f)
                    && data.fusion.allowed(a, f, d);
                if !admissible {
                    return Err(err("F record with inadmissible labels"));
                }
                let k = key6(a, b, c, d, e, f);
                data.f[k] = z;
                data.f_present[k] = true;
            } else {
                let (a, b, c) = (ls[0], ls[1], ls[2]);
                if !data.fusion.allowed(a, b, c) {
                    return Err(err("R record with inadmissible labels"));
                }
                data.r[key3(a, b, c)] = z;
                data.r_present[key3(a, b, c)] = true;
            }
        }
        data.check_complete()?;
        Ok(data)
    }

    fn check_complete(&self) -> Result<(), CategoryError> {
        for &a in &self.labels {
            for &b in &self.labels {
                for &c in &self.labels {
                    if self.n(a, b, c) == 1 && !self.r_present[key3(a, b, c)] {
                        return Err(CategoryError::MissingEntry { kind: 'R', labels: format!("{a}{b}{c}") });
                    }
                    for &d in &self.labels {
                        let es = self.left_channels(a, b, c, d);
                        let fs = self.right_channels(a, b, c, d);
                        if es.is_empty() {
                            continue;
                        }
                        let any = es
                            .iter()
                            .any(|&e| fs.iter().any(|&f| self.f_present[key6(a, b, c, d, e, f)]));
                        if !any {
                            return Err(CategoryError::MissingEntry {
                                kind: 'F',
                                labels: format!("{a}{b}{c}{d}"),
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn labels(&self) -> &[Anyon] {
        &self.labels
    }

    pub fn fusion(&self) -> &FusionRules {
        &self.fusion
    }

    pub fn n(&self, a: Anyon, b: Anyon, c: Anyon) -> u8 {
        if self.has(a) && self.has(b) && self.has(c) {
            self.fusion.n(a, b, c)
        } else {
            0
        }
    }

    pub fn allowed(&self, a: Anyon, b: Anyon, c: Anyon) -> bool {
        self.n(a, b, c) > 0
    }

    fn has(&self, a: Anyon) -> bool {
        self.labels.contains(&a)
    }

    pub fn d(&self, a: Anyon) -> f64 {
        a.qdim()
    }

    /// Channels of `a × b` inside the label set.
    pub fn products(&self, a: Anyon, b: Anyon) -> Vec<Anyon> {
        self.labels.iter().copied().filter(|&c| self.allowed(a, b, c)).collect()
    }

    /// Admissible `e` in `((ab)_e c)_d`.
    pub fn left_channels(&self, a: Anyon, b: Anyon, c: Anyon, d: Anyon) -> Vec<Anyon> {
        self.labels
            .iter()
            .copied()
            .filter(|&e| self.allowed(a, b, e) && self.allowed(e, c, d))
            .collect()
    }

    /// Admissible `f` in `(a(bc)_f)_d`.
    pub fn right_channels(&self, a: Anyon, b: Anyon, c: Anyon, d: Anyon) -> Vec<Anyon> {
        self.labels
            .iter()
            .copied()
            .filter(|&f| self.allowed(b, c, f) && self.allowed(a, f, d))
            .collect()
    }

    /// `[F^{abc}_d]_{ef}`, zero when inadmissible.
    pub fn f(&self, a: Anyon, b: Anyon, c: Anyon, d: Anyon, e: Anyon, f: Anyon) -> C64 {
        self.f[key6(a, b, c, d, e, f)]
    }

    /// `[(F^{abc}_d)^{-1}]_{fe} = conj([F^{abc}_d]_{ef})` by unitarity.
    pub fn f_inv(&self, a: Anyon, b: Anyon, c: Anyon, d: Anyon, f: Anyon, e: Anyon) -> C64 {
        self.f(a, b, c, d, e, f).conj()
    }

    /// The matrix `F^{abc}_d` with its row (`e`) and column (`f`) labels.
    pub fn f_matrix(&self, a: Anyon, b: Anyon, c: Anyon, d: Anyon) -> (Vec<Anyon>, Vec<Anyon>, DMatrix<C64>) {
        let es = self.left_channels(a, b, c, d);
        let fs = self.right_channels(a, b, c, d);
        let m = DMatrix::from_fn(es.len(), fs.len(), |i, j| self.f(a, b, c, d, es[i], fs[j]));
        (es, fs, m)
    }

    /// `R^{ab}_c`, zero when inadmissible.
    pub fn r(&self, a: Anyon, b: Anyon, c: Anyon) -> C64 {
        self.r[key3(a, b, c)]
    }

    /// Full braid `R^{ba}_c R^{ab}_c`.
    pub fn monodromy(&self, a: Anyon, b: Anyon, c: Anyon) -> C64 {
        self.r(b, a, c) * self.r(a, b, c)
    }

    /// Topological spin from the ribbon identity `θ_a = (1/d_a) Σ_c d_c R^{aa}_c`.
    pub fn spin(&self, a: Anyon) -> C64 {
        self.products(a, a)
            .into_iter()
            .map(|c| self.r(a, a, c) * self.d(c))
            .sum::<C64>()
            / self.d(a)
    }

    /// Pentagon, both hexagons and unitarity of every `F^{abc}_d`.
    pub fn verify_consistency(&self) -> Result<ConsistencyReport, CategoryError> {
        self.check_complete()?;
        let ls = &self.labels;
        let mut unitarity: f64 = 0.0;
        for &a in ls {
            for &b in ls {
                for &c in ls {
                    for &d in ls {
                        let (es, fs, m) = self.f_matrix(a, b, c, d);
                        if es.is_empty() {
                            continue;
                        }
                        if es.len() != fs.len() {
                            unitarity = f64::INFINITY;
                            continue;
                        }
                        let dev = &m * m.adjoint() - DMatrix::identity(es.len(), es.len());
                        unitarity = unitarity.max(dev.iter().map(|z| z.norm()).fold(0.0, f64::max));
                    }
                }
            }
        }

        // [F^{fcd}_e]_{gl} [F^{abl}_e]_{fk} = Σ_h [F^{abc}_g]_{fh} [F^{ahd}_e]_{gk} [F^{bcd}_k]_{hl}
        let mut pentagon: f64 = 0.0;
        let mut pentagon_equations = 0;
        for &a in ls {
            for &b in ls {
                for &c in ls {
                    for &d in ls {
                        for f in self.products(a, b) {
                            for g in self.products(f, c) {
                                for e in self.products(g, d) {
                                    for l in self.products(c, d) {
                                        if !self.allowed(f, l, e) {
                                            continue;
                                        }
                                        for k in self.products(b, l) {
                                            if !self.allowed(a, k, e) {
                                                continue;
                                            }
                                            let lhs = self.f(f, c, d, e, g, l) * self.f(a, b, l, e, f, k);
                                            let rhs: C64 = self
                                                .products(b, c)
                                                .into_iter()
                                                .map(|h| {
                                                    self.f(a, b, c, g, f, h)
                                                        * self.f(a, h, d, e, g, k)
                                                        * self.f(b, c, d, k, h, l)
                                                })
                                                .sum();
                                            pentagon = pentagon.max((lhs - rhs).norm());
                                            pentagon_equations += 1;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }

        // R^{ca}_e [F^{acb}_d]_{eg} R^{cb}_g = Σ_f [F^{cab}_d]_{ef} R^{cf}_d [F^{abc}_d]_{fg},
        // and the same with every R^{xy} replaced by (R^{yx})^{-1}.
        let mut hexagon: f64 = 0.0;
        let mut hexagon_equations = 0;
        for &a in ls {
            for &b in ls {
                for &c in ls {
                    for &d in ls {
                        for e in self.products(c, a) {
                            if !self.allowed(e, b, d) {
                                continue;
                            }
                            for g in self.products(c, b) {
                                if !self.allowed(a, g, d) {
                                    continue;
                                }
                                for inverse in [false, true] {
                                    let rr = |x: Anyon, y: Anyon, z: Anyon| {
                                        if inverse {
                                            self.r(y, x, z).inv()
                                        } else {
                                            self.r(x, y, z)
                                        }
                                    };
                                    let lhs = rr(c, a, e) * self.f(a, c, b, d, e, g) * rr(c, b, g);
                                    let rhs: C64 = self
                                        .right_channels(c, a, b, d)
                                        .into_iter()
                                        .map(|f| self.f(c, a, b, d, e, f) * rr(c, f, d) * self.f(a, b, c, d, f, g))
                                        .sum();
                                    hexagon = hexagon.max((lhs - rhs).norm());
                                    hexagon_equations += 1;
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(ConsistencyReport {
            pentagon,
            hexagon,
            unitarity,
            pentagon_equations,
            hexagon_equations,
        })
    }

    /// `N^γ_{αβ} d_γ / (d_α d_β)`.
    pub fn fusion_probability(&self, alpha: Anyon, beta: Anyon, gamma: Anyon) -> f64 {
        self.n(alpha, beta, gamma) as f64 * self.d(gamma) / (self.d(alpha) * self.d(beta))
    }

    /// `I_{x;z,w} = Σ_{w'} N^{w'}_{zx} √(d_{w'}/(d_z d_x)) R^{xz}_{w'} R^{zx}_{w'} [F^{zxx}_z]_{w'w}`:
    /// amplitude for a `z` pair encircling a charge `x` to fuse into `w`.
    pub fn interferometry_amplitude(&self, x: Anyon, z: Anyon, w: Anyon) -> C64 {
        self.products(z, x)
            .into_iter()
            .map(|wp| {
                (self.d(wp) / (self.d(z) * self.d(x))).sqrt() * self.monodromy(z, x, wp) * self.f(z, x, x, z, wp, w)
            })
            .sum()
    }

    /// `I^U_{(x,y);H,w} = I_{x;H,w} [F^{wxy}_G]_{xG}` for `|xy⟩ ∈ V^{DDDD}_G`.
    pub fn u_measurement_amplitude(&self, x: Anyon, y: Anyon, w: Anyon) -> Result<C64, CategoryError> {
        if !vdddd_basis().contains(&(x, y)) {
            return Err(CategoryError::Inadmissible(format!("|{x}{y}⟩ is not a basis state of V^DDDD_G")));
        }
        let i = self.interferometry_amplitude(x, Anyon::H, w);
        let xp = if self.allowed(w, x, x) { x } else { return Ok(C64::default()) };
        Ok(i * self.f(w, x, y, Anyon::G, xp, Anyon::G))
    }

    /// `I_{z,(a,b,c),w}`: the factor picked up when an `a` pair nucleated next
    /// to one `z` line encircles it and fuses into `b`, the `z` pair fuses into
    /// `c`, and `b × c → w`:
    ///
    /// `Σ_{b',c'} N^{c'}_{az} N^z_{b'c'} √(d_{b'} d_c / d_a) d_{c'}/(d_z d_a) M^{az}_{c'}
    ///  [F^{aac}_w]_{bb'} [F^{cb'c'}_z]_{az} conj([F^{b'wz}_{c'}]_{az})`
    ///
    /// with `M` the monodromy. The last factor enters through an inverse
    /// F-move, which is what makes a vacuum insertion (`a = A`) give exactly 1
    /// in every gauge. The value is independent of the encircled charge but is
    /// in general not unimodular.
    pub fn local_error_phase(&self, z: Anyon, a: Anyon, b: Anyon, c: Anyon, w: Anyon) -> Result<C64, CategoryError> {
        if !(self.allowed(a, a, b) && self.allowed(z, z, c) && self.allowed(b, c, w)) {
            return Err(CategoryError::Inadmissible(format!("z={z} a={a} b={b} c={c} w={w}")));
        }
        let mut total = C64::default();
        for &bp in &self.labels {
            for cp in self.products(a, z) {
                if !self.allowed(bp, cp, z) {
                    continue;
                }
                let pref = (self.d(bp) * self.d(c) / self.d(a)).sqrt() * self.d(cp) / (self.d(z) * self.d(a));
                total += pref
                    * self.monodromy(a, z, cp)
                    * self.f(a, a, c, w, b, bp)
                    * self.f(c, bp, cp, z, a, z)
                    * self.f(bp, w, z, cp, a, z).conj();
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::omega;
    use Anyon::*;

    fn cat() -> &'static CategoryData {
        CategoryData::ds3()
    }

    fn close(a: C64, b: C64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn embedded_table_is_consistent() {
        let rep = cat().verify_consistency().unwrap();
        assert!(rep.passes(), "{rep:?}");
        assert!(rep.pentagon_equations > 1000 && rep.hexagon_equations > 100);
    }

    #[test]
    fn conjugated_r_phase_breaks_hexagon() {
        let text = EMBEDDED_TABLE.replace("R B D E -0.5 -0.8660254037844384", "R B D E -0.5 0.8660254037844384");
        assert_ne!(text, EMBEDDED_TABLE);
        let data = CategoryData::parse(&text, &ANYONS, derive_fusion_rules()).unwrap();
        assert!(data.verify_consistency().unwrap().hexagon > 0.1);
    }

    #[test]
    fn trivial_category_has_zero_residuals() {
        let data = CategoryData::parse(EMBEDDED_TABLE, &[A], derive_fusion_rules()).unwrap();
        let rep = data.verify_consistency().unwrap();
        assert_eq!((rep.pentagon, rep.hexagon, rep.unitarity), (0.0, 0.0, 0.0));
    }

    #[test]
    fn missing_entry_is_named() {
        let text: String = EMBEDDED_TABLE
            .lines()
            .filter(|l| !l.starts_with("R C C B"))
            .map(|l| format!("{l}\n"))
            .collect();
        let err = CategoryData::parse(&text, &ANYONS, derive_fusion_rules()).unwrap_err();
        assert_eq!(err, CategoryError::MissingEntry { kind: 'R', labels: "CCB".into() });
    }

    #[test]
    fn multiplicity_above_one_is_rejected() {
        let mut n = [[[0u8; 8]; 8]; 8];
        n[0][0][0] = 2;
        let err = CategoryData::parse("", &[A], FusionRules::from_table(n)).unwrap_err();
        assert!(matches!(err, CategoryError::Multiplicity { .. }));
    }

    #[test]
    fn fusion_probabilities() {
        let c = cat();
        assert!((c.fusion_probability(C, C, A) - 0.25).abs() < 1e-15);
        assert!((c.fusion_probability(C, C, C) - 0.5).abs() < 1e-15);
        assert!((c.fusion_probability(D, D, A) - 1.0 / 9.0).abs() < 1e-15);
        assert!((c.fusion_probability(D, D, C) - 2.0 / 9.0).abs() < 1e-15);
        for x in ANYONS {
            assert_eq!(c.fusion_probability(A, x, x), 1.0);
        }
    }

    #[test]
    fn printed_f_and_r_entries() {
        let c = cat();
        let s = 0.5f64.sqrt();
        let (es, fs, m) = c.f_matrix(G, G, G, G);
        assert_eq!((es.clone(), fs.clone()), (vec![A, B, G], vec![A, B, G]));
        let expect = [[0.5, 0.5, s], [0.5, 0.5, -s], [s, -s, 0.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!(close(m[(i, j)], C64::new(expect[i][j], 0.0)), "F^GGG_G[{i}{j}]");
            }
        }
        assert!(close(c.f(G, D, D, G, D, G), C64::new(s, 0.0)));
        assert!(close(c.f(G, D, D, G, E, G), C64::new(-s, 0.0)));
        assert!(close(c.f(B, D, D, G, E, G), C64::new(1.0, 0.0)));
        assert!(close(c.f(B, G, A, G, G, G), C64::new(1.0, 0.0)));
        assert!(close(c.f(B, G, G, G, G, G), C64::new(-1.0, 0.0)));
        assert!(close(c.f(B, B, G, G, A, G), C64::new(1.0, 0.0)));
        assert!(close(c.r(B, B, A) * c.r(B, B, A), C64::new(1.0, 0.0)));
        assert!(close(c.monodromy(B, G, G), C64::new(1.0, 0.0)));
    }

    #[test]
    fn spins_from_r_symbols() {
        for a in ANYONS {
            assert!(close(cat().spin(a), a.spin()), "{a}");
        }
    }

    #[test]
    fn vacuum_entries_are_trivial() {
        let c = cat();
        for a in ANYONS {
            for b in ANYONS {
                for x in c.products(a, b) {
                    assert!(close(c.r(A, a, a), C64::new(1.0, 0.0)));
                    assert!(close(c.f(A, a, b, x, a, x), C64::new(1.0, 0.0)));
                    assert!(close(c.f(a, A, b, x, a, b), C64::new(1.0, 0.0)));
                    assert!(close(c.f(a, b, A, x, x, b), C64::new(1.0, 0.0)));
                }
            }
        }
    }

    #[test]
    fn printed_interferometry_amplitudes() {
        let c = cat();
        let w = omega();
        let h = 3f64.sqrt() / 2.0;
        let cases = [
            (A, D, A, C64::new(1.0, 0.0)),
            (B, D, A, C64::new(-1.0, 0.0)),
            (G, D, G, w * w),
            (A, H, A, C64::new(1.0, 0.0)),
            (B, H, A, C64::new(1.0, 0.0)),
            (G, H, A, C64::new(1.0, 0.0)),
            (D, H, H, w * w),
            (E, H, H, -w * w),
            (C, H, A, C64::new(-0.5, 0.0)),
            (F, H, A, C64::new(-0.5, 0.0)),
            (H, H, A, C64::new(-0.5, 0.0)),
            (C, H, B, C64::new(0.0, -h)),
            (H, H, B, C64::new(0.0, -h)),
            (F, H, B, C64::new(0.0, h)),
        ];
        for (x, z, wl, v) in cases {
            assert!(close(c.interferometry_amplitude(x, z, wl), v), "I_{{{x};{z},{wl}}}");
        }
    }

    #[test]
    fn interferometry_completeness() {
        let c = cat();
        for x in ANYONS {
            for z in ANYONS {
                let s: f64 = ANYONS.iter().map(|&w| c.interferometry_amplitude(x, z, w).norm_sqr()).sum();
                assert!((s - 1.0).abs() < 1e-12, "x={x} z={z}: {s}");
            }
        }
    }

    #[test]
    fn u_amplitudes() {
        let c = cat();
        let h = 3f64.sqrt() / 2.0;
        for (x, y) in U_BASIS {
            assert!(close(c.u_measurement_amplitude(x, y, A).unwrap(), C64::new(1.0, 0.0)));
            assert!(close(c.u_measurement_amplitude(x, y, B).unwrap(), C64::default()));
        }
        for (x, y) in U_PERP_1 {
            assert!(close(c.u_measurement_amplitude(x, y, A).unwrap(), C64::new(-0.5, 0.0)));
            assert!(close(c.u_measurement_amplitude(x, y, B).unwrap(), C64::new(0.0, -h)));
        }
        for (x, y) in U_PERP_2 {
            assert!(close(c.u_measurement_amplitude(x, y, A).unwrap(), C64::new(-0.5, 0.0)));
            assert!(close(c.u_measurement_amplitude(x, y, B).unwrap(), C64::new(0.0, h)));
        }
        assert!(c.u_measurement_amplitude(A, A, A).is_err());
    }

    #[test]
    fn local_error_with_vacuum_pair_is_trivial() {
        let c = cat();
        for z in ANYONS {
            for cc in c.products(z, z) {
                let v = c.local_error_phase(z, A, A, cc, cc).unwrap();
                assert!(close(v, C64::new(1.0, 0.0)), "z={z} c={cc}: {v}");
            }
        }
        assert!(c.local_error_phase(D, A, B, A, A).is_err());
    }

    #[test]
    fn local_error_factor_is_bounded_but_not_unimodular() {
        let c = cat();
        let mut below_one = 0;
        for z in ANYONS {
            for a in ANYONS {
                for b in c.products(a, a) {
                    for cc in c.products(z, z) {
                        for w in c.products(b, cc) {
                            let v = c.local_error_phase(z, a, b, cc, w).unwrap().norm();
                            assert!(v <= 1.0 + 1e-12, "z={z} a={a} b={b} c={cc} w={w}: {v}");
                            if v < 1.0 - 1e-9 {
                                below_one += 1;
                            }
                        }
                    }
                }
            }
        }
        assert!(below_one > 0);
    }
}
