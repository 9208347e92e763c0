//! S3 group arithmetic, irreps of S3 and of its centralizers, and the
//! representation theory of the Drinfeld double D(S3).
//!
//! Group elements are written `μ^k σ^l` with `k ∈ Z3`, `l ∈ Z2` and the
//! semidirect relation `σ μ σ = μ̄`. The eight irreps of D(S3) are the anyons
//! `A`–`H`, each a pair (centralizer irrep `R`, conjugacy class `C`).

use std::fmt;
use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Order of S3.
pub const GROUP_ORDER: usize = 6;

/// `ω = e^{2πi/3}`.
pub fn omega() -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)
}

/// `ω^k` for an integer exponent.
pub fn omega_pow(k: i64) -> C64 {
    match k.rem_euclid(3) {
        0 => C64::new(1.0, 0.0),
        1 => omega(),
        _ => omega().conj(),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("basis element ({c}, {j}) is not in the irrep of anyon {anyon}")]
    BasisNotInIrrep { anyon: Anyon, c: GroupElement, j: usize },
    #[error("unknown anyon letter {0:?}")]
    UnknownAnyon(String),
    #[error("group element {g} is outside the domain of irrep {irrep:?}")]
    OutsideDomain { irrep: CentralizerIrrep, g: GroupElement },
}

/// `μ^k σ^l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    k: u8,
    l: u8,
}

impl GroupElement {
    pub const E: GroupElement = GroupElement { k: 0, l: 0 };
    pub const MU: GroupElement = GroupElement { k: 1, l: 0 };
    pub const MU2: GroupElement = GroupElement { k: 2, l: 0 };
    pub const SIGMA: GroupElement = GroupElement { k: 0, l: 1 };
    pub const MU_SIGMA: GroupElement = GroupElement { k: 1, l: 1 };
    pub const MU2_SIGMA: GroupElement = GroupElement { k: 2, l: 1 };

    /// Builds `μ^k σ^l`, reducing the exponents.
    pub fn new(k: i64, l: i64) -> Self {
        GroupElement {
            k: k.rem_euclid(3) as u8,
            l: l.rem_euclid(2) as u8,
        }
    }

    pub fn k(self) -> u8 {
        self.k
    }

    pub fn l(self) -> u8 {
        self.l
    }

    /// Dense index `k + 3l` in `0..6`.
    pub fn index(self) -> usize {
        self.k as usize + 3 * self.l as usize
    }

    pub fn from_index(i: usize) -> Self {
        assert!(i < GROUP_ORDER, "group index {i} out of range");
        GroupElement {
            k: (i % 3) as u8,
            l: (i / 3) as u8,
        }
    }

    pub fn all() -> [GroupElement; 6] {
        [
            Self::E,
            Self::MU,
            Self::MU2,
            Self::SIGMA,
            Self::MU_SIGMA,
            Self::MU2_SIGMA,
        ]
    }

    pub fn inv(self) -> Self {
        if self.l == 0 {
            GroupElement::new(-(self.k as i64), 0)
        } else {
            self
        }
    }

    /// `g · self · ḡ`.
    pub fn conj_by(self, g: GroupElement) -> Self {
        g * self * g.inv()
    }

    pub fn is_identity(self) -> bool {
        self == Self::E
    }

    pub fn commutes_with(self, other: GroupElement) -> bool {
        self * other == other * self
    }

    pub fn class(self) -> ClassId {
        match (self.k, self.l) {
            (0, 0) => ClassId::C1,
            (_, 1) => ClassId::C2,
            _ => ClassId::C3,
        }
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;
    fn mul(self, b: GroupElement) -> GroupElement {
        let kb = if self.l == 0 { b.k as i64 } else { -(b.k as i64) };
        GroupElement::new(self.k as i64 + kb, (self.l + b.l) as i64)
    }
}

/// `μ^{k_a + (−1)^{l_a} k_b} σ^{l_a + l_b}`.
pub fn multiply(a: GroupElement, b: GroupElement) -> GroupElement {
    a * b
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match (self.k, self.l) {
            (0, 0) => "e",
            (1, 0) => "μ",
            (2, 0) => "μ²",
            (0, 1) => "σ",
            (1, 1) => "μσ",
            _ => "μ²σ",
        };
        f.write_str(s)
    }
}

/// Conjugacy classes of S3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassId {
    /// `{e}`
    C1,
    /// `{σ, μσ, μ²σ}`
    C2,
    /// `{μ, μ²}`
    C3,
}

/// Members, representative, `τ_c` table and centralizer of one class.
#[derive(Clone, Debug)]
pub struct ConjugacyData {
    pub id: ClassId,
    pub members: &'static [GroupElement],
    pub representative: GroupElement,
    /// `taus[i]` satisfies `taus[i] · rep · taus[i]⁻¹ = members[i]`.
    pub taus: &'static [GroupElement],
    pub centralizer: &'static [GroupElement],
}

use GroupElement as G;

const C1_MEMBERS: [GroupElement; 1] = [G::E];
const C1_TAUS: [GroupElement; 1] = [G::E];
const C1_CENT: [GroupElement; 6] = [G::E, G::MU, G::MU2, G::SIGMA, G::MU_SIGMA, G::MU2_SIGMA];
const C2_MEMBERS: [GroupElement; 3] = [G::SIGMA, G::MU_SIGMA, G::MU2_SIGMA];
const C2_TAUS: [GroupElement; 3] = [G::E, G::MU2, G::MU];
const C2_CENT: [GroupElement; 2] = [G::E, G::SIGMA];
const C3_MEMBERS: [GroupElement; 2] = [G::MU, G::MU2];
const C3_TAUS: [GroupElement; 2] = [G::E, G::SIGMA];
const C3_CENT: [GroupElement; 3] = [G::E, G::MU, G::MU2];

impl ClassId {
    pub fn all() -> [ClassId; 3] {
        [ClassId::C1, ClassId::C2, ClassId::C3]
    }

    pub fn data(self) -> ConjugacyData {
        match self {
            ClassId::C1 => ConjugacyData {
                id: self,
                members: &C1_MEMBERS,
                representative: G::E,
                taus: &C1_TAUS,
                centralizer: &C1_CENT,
            },
            ClassId::C2 => ConjugacyData {
                id: self,
                members: &C2_MEMBERS,
                representative: G::SIGMA,
                taus: &C2_TAUS,
                centralizer: &C2_CENT,
            },
            ClassId::C3 => ConjugacyData {
                id: self,
                members: &C3_MEMBERS,
                representative: G::MU,
                taus: &C3_TAUS,
                centralizer: &C3_CENT,
            },
        }
    }

    pub fn members(self) -> &'static [GroupElement] {
        match self {
            ClassId::C1 => &C1_MEMBERS,
            ClassId::C2 => &C2_MEMBERS,
            ClassId::C3 => &C3_MEMBERS,
        }
    }

    pub fn centralizer(self) -> &'static [GroupElement] {
        match self {
            ClassId::C1 => &C1_CENT,
            ClassId::C2 => &C2_CENT,
            ClassId::C3 => &C3_CENT,
        }
    }

    pub fn size(self) -> usize {
        self.members().len()
    }

    /// Position of `c` inside the member list, if it belongs to the class.
    pub fn position(self, c: GroupElement) -> Option<usize> {
        self.members().iter().position(|&m| m == c)
    }

    /// `τ_c` for a member `c`.
    pub fn tau(self, c: GroupElement) -> GroupElement {
        let i = self
            .position(c)
            .unwrap_or_else(|| panic!("{c} is not in class {self:?}"));
        match self {
            ClassId::C1 => C1_TAUS[i],
            ClassId::C2 => C2_TAUS[i],
            ClassId::C3 => C3_TAUS[i],
        }
    }
}

/// Irreps of S3 and of the centralizers `Z2 = {e, σ}` and `Z3 = {e, μ, μ²}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CentralizerIrrep {
    S3Plus,
    S3Minus,
    S3Two,
    Z2Plus,
    Z2Minus,
    Z3One,
    Z3Omega,
    Z3OmegaBar,
}

impl CentralizerIrrep {
    pub fn dim(self) -> usize {
        if self == CentralizerIrrep::S3Two {
            2
        } else {
            1
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CentralizerIrrep::S3Plus | CentralizerIrrep::Z2Plus => "[+]",
            CentralizerIrrep::S3Minus | CentralizerIrrep::Z2Minus => "[−]",
            CentralizerIrrep::S3Two => "[2]",
            CentralizerIrrep::Z3One => "[1]",
            CentralizerIrrep::Z3Omega => "[ω]",
            CentralizerIrrep::Z3OmegaBar => "[ω̄]",
        }
    }

    /// Group the irrep is defined on.
    pub fn domain(self) -> &'static [GroupElement] {
        match self {
            CentralizerIrrep::S3Plus | CentralizerIrrep::S3Minus | CentralizerIrrep::S3Two => &C1_CENT,
            CentralizerIrrep::Z2Plus | CentralizerIrrep::Z2Minus => &C2_CENT,
            _ => &C3_CENT,
        }
    }

    /// Unitary matrix `Γ(g)`.
    pub fn matrix(self, g: GroupElement) -> Result<DMatrix<C64>, AlgebraError> {
        if !self.domain().contains(&g) {
            return Err(AlgebraError::OutsideDomain { irrep: self, g });
        }
        let one = C64::new(1.0, 0.0);
        let scalar = |z: C64| DMatrix::from_element(1, 1, z);
        Ok(match self {
            CentralizerIrrep::S3Plus | CentralizerIrrep::Z2Plus | CentralizerIrrep::Z3One => scalar(one),
            CentralizerIrrep::S3Minus | CentralizerIrrep::Z2Minus => {
                scalar(if g.l() == 1 { -one } else { one })
            }
            CentralizerIrrep::Z3Omega => scalar(omega_pow(g.k() as i64)),
            CentralizerIrrep::Z3OmegaBar => scalar(omega_pow(-(g.k() as i64))),
            CentralizerIrrep::S3Two => {
                let k = g.k() as i64;
                let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    omega_pow(k),
                    omega_pow(-k),
                ]));
                if g.l() == 1 {
                    let x = DMatrix::from_row_slice(2, 2, &[C64::default(), one, one, C64::default()]);
                    diag * x
                } else {
                    diag
                }
            }
        })
    }

    pub fn character(self, g: GroupElement) -> Result<C64, AlgebraError> {
        Ok(self.matrix(g)?.trace())
    }
}

/// The eight anyons of D(S3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Anyon {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

pub const ANYONS: [Anyon; 8] = [
    Anyon::A,
    Anyon::B,
    Anyon::C,
    Anyon::D,
    Anyon::E,
    Anyon::F,
    Anyon::G,
    Anyon::H,
];

/// Index `(c, j)` of a basis vector of an irrep of D(S3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndex {
    pub c: GroupElement,
    pub j: usize,
}

impl Anyon {
    pub fn all() -> [Anyon; 8] {
        ANYONS
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Anyon {
        ANYONS[i]
    }

    pub fn letter(self) -> char {
        (b'A' + self as u8) as char
    }

    pub fn from_letter(s: &str) -> Result<Anyon, AlgebraError> {
        match s.trim() {
            "A" => Ok(Anyon::A),
            "B" => Ok(Anyon::B),
            "C" => Ok(Anyon::C),
            "D" => Ok(Anyon::D),
            "E" => Ok(Anyon::E),
            "F" => Ok(Anyon::F),
            "G" => Ok(Anyon::G),
            "H" => Ok(Anyon::H),
            other => Err(AlgebraError::UnknownAnyon(other.to_string())),
        }
    }

    pub fn irrep(self) -> CentralizerIrrep {
        use CentralizerIrrep::*;
        match self {
            Anyon::A => S3Plus,
            Anyon::B => S3Minus,
            Anyon::C => S3Two,
            Anyon::D => Z2Plus,
            Anyon::E => Z2Minus,
            Anyon::F => Z3One,
            Anyon::G => Z3Omega,
            Anyon::H => Z3OmegaBar,
        }
    }

    pub fn class(self) -> ClassId {
        match self {
            Anyon::A | Anyon::B | Anyon::C => ClassId::C1,
            Anyon::D | Anyon::E => ClassId::C2,
            _ => ClassId::C3,
        }
    }

    /// Anyon with the given irrep/class pair.
    pub fn from_pair(irrep: CentralizerIrrep, class: ClassId) -> Option<Anyon> {
        ANYONS.into_iter().find(|a| a.irrep() == irrep && a.class() == class)
    }

    /// `d = |R||C|`.
    pub fn dim(self) -> usize {
        self.irrep().dim() * self.class().size()
    }

    /// Quantum dimension as a float.
    pub fn qdim(self) -> f64 {
        self.dim() as f64
    }

    /// Every anyon of D(S3) is its own antiparticle.
    pub fn dual(self) -> Anyon {
        self
    }

    /// Topological spin `θ = χ_R(g_C) / |R|`.
    pub fn spin(self) -> C64 {
        let rep = self.class().data().representative;
        self.irrep().character(rep).expect("representative lies in centralizer")
            / self.irrep().dim() as f64
    }

    pub fn basis(self) -> Vec<BasisIndex> {
        let dr = self.irrep().dim();
        self.class()
            .members()
            .iter()
            .flat_map(|&c| (0..dr).map(move |j| BasisIndex { c, j }))
            .collect()
    }

    /// Position of a basis index inside the irrep vector.
    pub fn basis_position(self, b: BasisIndex) -> Option<usize> {
        let dr = self.irrep().dim();
        if b.j >= dr {
            return None;
        }
        self.class().position(b.c).map(|ci| ci * dr + b.j)
    }

    /// Action of `δ_h g` on the basis vector `|c, j⟩`:
    /// `g|c,j⟩ = |gcḡ⟩ Σ_i Γ^R_{ij}(τ̄_{gcḡ} g τ_c)|i⟩`, then `δ_h` projects onto `h`.
    pub fn double_action(
        self,
        h: GroupElement,
        g: GroupElement,
        b: BasisIndex,
    ) -> Result<Vec<(BasisIndex, C64)>, AlgebraError> {
        if self.basis_position(b).is_none() {
            return Err(AlgebraError::BasisNotInIrrep { anyon: self, c: b.c, j: b.j });
        }
        let class = self.class();
        let gc = b.c.conj_by(g);
        if gc != h {
            return Ok(Vec::new());
        }
        let n = class.tau(gc).inv() * g * class.tau(b.c);
        let gamma = self.irrep().matrix(n)?;
        Ok((0..self.irrep().dim())
            .filter(|&i| gamma[(i, b.j)].norm() > 0.0)
            .map(|i| (BasisIndex { c: gc, j: i }, gamma[(i, b.j)]))
            .collect())
    }

    /// Dense matrix of `δ_h g` on the irrep.
    pub fn action_matrix(self, h: GroupElement, g: GroupElement) -> DMatrix<C64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for b in self.basis() {
            let col = self.basis_position(b).unwrap();
            for (out, z) in self.double_action(h, g, b).expect("basis from irrep") {
                m[(self.basis_position(out).unwrap(), col)] += z;
            }
        }
        m
    }

    /// Matrix of `g = Σ_h δ_h g`.
    pub fn group_matrix(self, g: GroupElement) -> DMatrix<C64> {
        GroupElement::all()
            .into_iter()
            .map(|h| self.action_matrix(h, g))
            .fold(DMatrix::zeros(self.dim(), self.dim()), |acc, m| acc + m)
    }

    /// Character `Tr(δ_h g)`.
    pub fn character(self, h: GroupElement, g: GroupElement) -> C64 {
        self.action_matrix(h, g).trace()
    }
}

impl fmt::Display for Anyon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Action of `δ_h g` on `V_a ⊗ V_b` through `Δ(δ_h g) = Σ_{h2 h1 = h} δ_{h1} g ⊗ δ_{h2} g`.
pub fn tensor_action_matrix(a: Anyon, b: Anyon, h: GroupElement, g: GroupElement) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(a.dim() * b.dim(), a.dim() * b.dim());
    for h1 in GroupElement::all() {
        let h2 = h * h1.inv();
        m += a.action_matrix(h1, g).kronecker(&b.action_matrix(h2, g));
    }
    m
}

/// Permutation `V_a ⊗ V_b → V_b ⊗ V_a`.
pub fn swap_matrix(da: usize, db: usize) -> DMatrix<C64> {
    let mut p = DMatrix::zeros(da * db, da * db);
    for i in 0..da {
        for j in 0..db {
            p[(j * da + i, i * db + j)] = C64::new(1.0, 0.0);
        }
    }
    p
}

/// Braiding `V_a ⊗ V_b → V_b ⊗ V_a` given by the universal R-matrix
/// `Σ_g g ⊗ δ_g` followed by the flip.
pub fn braiding_matrix(a: Anyon, b: Anyon) -> DMatrix<C64> {
    let mut r = DMatrix::zeros(a.dim() * b.dim(), a.dim() * b.dim());
    for g in GroupElement::all() {
        r += a.group_matrix(g).kronecker(&b.action_matrix(g, GroupElement::E));
    }
    swap_matrix(a.dim(), b.dim()) * r
}

/// Fusion multiplicities `N^c_{ab}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionRules {
    n: [[[u8; 8]; 8]; 8],
}

impl FusionRules {
    pub fn n(&self, a: Anyon, b: Anyon, c: Anyon) -> u8 {
        self.n[a.index()][b.index()][c.index()]
    }

    pub fn allowed(&self, a: Anyon, b: Anyon, c: Anyon) -> bool {
        self.n(a, b, c) > 0
    }

    /// Fusion channels of `a × b` in letter order.
    pub fn products(&self, a: Anyon, b: Anyon) -> Vec<Anyon> {
        ANYONS.into_iter().filter(|&c| self.allowed(a, b, c)).collect()
    }

    pub fn from_table(n: [[[u8; 8]; 8]; 8]) -> Self {
        FusionRules { n }
    }
}

/// Decomposes every tensor product `a ⊗ b` by character projection:
/// `N^c_{ab} = (1/|G|) Σ_{hg = gh} χ_c(δ_h g)* χ_{a⊗b}(δ_h g)`.
pub fn derive_fusion_rules() -> FusionRules {
    let pairs: Vec<(GroupElement, GroupElement)> = GroupElement::all()
        .into_iter()
        .flat_map(|h| GroupElement::all().into_iter().map(move |g| (h, g)))
        .filter(|(h, g)| h.commutes_with(*g))
        .collect();
    let mut chars = [[C64::default(); 36]; 8];
    for a in ANYONS {
        for &(h, g) in &pairs {
            chars[a.index()][h.index() * 6 + g.index()] = a.character(h, g);
        }
    }
    let mut n = [[[0u8; 8]; 8]; 8];
    for a in ANYONS {
        for b in ANYONS {
            for c in ANYONS {
                let mut acc = C64::default();
                for &(h, g) in &pairs {
                    let mut chi_ab = C64::default();
                    for h1 in GroupElement::all() {
                        let h2 = h * h1.inv();
                        chi_ab += chars[a.index()][h1.index() * 6 + g.index()]
                            * chars[b.index()][h2.index() * 6 + g.index()];
                    }
                    acc += chars[c.index()][h.index() * 6 + g.index()].conj() * chi_ab;
                }
                let m = acc.re / GROUP_ORDER as f64;
                n[a.index()][b.index()][c.index()] = m.round() as u8;
            }
        }
    }
    FusionRules { n }
}
