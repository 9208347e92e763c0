//! Qudit CSS codes over `F_2` and `F_3`: validation, logical operators,
//! codewords, distances and single-error decoding.

use std::collections::BTreeMap;

use super::field::{self, all_vectors, dot, kernel, span_elements, weight, Echelon};
use super::ConcatError;
use crate::algebra::{omega_pow, C64};

/// Largest length for which distances are computed by exhaustive search.
pub const EXHAUSTIVE_LENGTH: usize = 9;
/// Largest number of terms in a codeword superposition.
pub const MAX_CODEWORD_TERMS: usize = 1 << 20;

/// Reads a parity-check matrix: one row per line, entries separated by
/// white space. Blank lines and lines starting with `#` are skipped.
/// Entries may be written in `(−p, p)`; negative values are reduced mod `p`.
pub fn parse_matrix(text: &str, p: u8) -> Result<Vec<Vec<u8>>, ConcatError> {
    check_prime(p)?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                let v: i64 = tok
                    .parse()
                    .map_err(|_| ConcatError::Parse { line: i + 1, message: format!("`{tok}` is not an integer") })?;
                if v.abs() >= p as i64 {
                    return Err(ConcatError::Parse { line: i + 1, message: format!("{v} is not an element of F_{p}") });
                }
                Ok(v.rem_euclid(p as i64) as u8)
            })
            .collect::<Result<Vec<u8>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Writes a matrix in the format read by [`parse_matrix`].
pub fn format_matrix(rows: &[Vec<u8>]) -> String {
    rows.iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ") + "\n")
        .collect()
}

fn check_prime(p: u8) -> Result<(), ConcatError> {
    if p == 2 || p == 3 {
        Ok(())
    } else {
        Err(ConcatError::InvalidPrime(p))
    }
}

/// A CSS code `CSS(X, H_X; Z, H_Z)` on `n` qudits of prime dimension `p`.
///
/// Rows of `H_X` are `X`-type stabilizers `X^h`, rows of `H_Z` are `Z`-type
/// stabilizers `Z^h`. Codewords are uniform superpositions over cosets
/// `x + 𝓗_X` with `x ∈ 𝓗_Z^⊥`.
#[derive(Clone, Debug)]
pub struct QuditCSSCode {
    p: u8,
    n: usize,
    hx: Vec<Vec<u8>>,
    hz: Vec<Vec<u8>>,
    x_space: Echelon,
    z_space: Echelon,
    logical_x: Vec<Vec<u8>>,
    logical_z: Vec<Vec<u8>>,
    claimed_distance: Option<usize>,
}

impl QuditCSSCode {
    /// Validates the matrices (entries in `F_p`, rows of length `n`,
    /// `H_X H_Z^T = 0`, at least one logical qudit) and derives logical
    /// operators.
    pub fn new(p: u8, n: usize, hx: Vec<Vec<u8>>, hz: Vec<Vec<u8>>) -> Result<Self, ConcatError> {
        check_prime(p)?;
        for (name, m) in [("H_X", &hx), ("H_Z", &hz)] {
            for (i, r) in m.iter().enumerate() {
                if r.len() != n {
                    return Err(ConcatError::RowLength { matrix: name, row: i, expected: n, found: r.len() });
                }
                if let Some(&v) = r.iter().find(|&&v| v >= p) {
                    return Err(ConcatError::EntryOutOfField { value: v, p });
                }
            }
        }
        for (i, x) in hx.iter().enumerate() {
            for (j, z) in hz.iter().enumerate() {
                if dot(x, z, p) != 0 {
                    return Err(ConcatError::NotOrthogonal { x_row: i, z_row: j });
                }
            }
        }
        let x_space = Echelon::new(p, n, &hx);
        let z_space = Echelon::new(p, n, &hz);
        if x_space.rank() + z_space.rank() >= n {
            return Err(ConcatError::NoLogicalQudits { n, rank_x: x_space.rank(), rank_z: z_space.rank() });
        }
        let mut code = QuditCSSCode {
            p,
            n,
            hx,
            hz,
            x_space,
            z_space,
            logical_x: Vec::new(),
            logical_z: Vec::new(),
            claimed_distance: None,
        };
        let xs = complement(&kernel(p, n, &code.hz), &code.x_space);
        code.set_logical_x(xs)?;
        Ok(code)
    }

    /// Reads `H_X` and `H_Z` with [`parse_matrix`].
    pub fn from_text(p: u8, n: usize, hx: &str, hz: &str) -> Result<Self, ConcatError> {
        Self::new(p, n, parse_matrix(hx, p)?, parse_matrix(hz, p)?)
    }

    /// Shor-type code on `r` blocks of `r` qudits: `Z`-type checks between
    /// neighbours inside a block, `X`-type checks on pairs of neighbouring
    /// blocks. The logical `X` representative is the all-ones vector when it
    /// is not a stabilizer (odd `r`), otherwise the first block.
    fn shor_type(p: u8, r: usize) -> Result<Self, ConcatError> {
        if r == 0 {
            return Err(ConcatError::IncompatibleCodes("a Shor code needs at least one block".into()));
        }
        let n = r * r;
        let mut hz = Vec::new();
        for b in 0..r {
            for i in 0..r - 1 {
                let mut row = vec![0u8; n];
                row[b * r + i] = 1;
                row[b * r + i + 1] = p - 1;
                hz.push(row);
            }
        }
        let hx: Vec<Vec<u8>> = (0..r - 1)
            .map(|b| (0..n).map(|j| u8::from(j / r == b || j / r == b + 1)).collect())
            .collect();
        let code = Self::new(p, n, hx, hz)?;
        let ones = vec![1u8; n];
        let x = if code.x_space.contains(&ones) { (0..n).map(|j| u8::from(j < r)).collect() } else { ones };
        code.with_logical_x(vec![x])?.with_claimed_distance(r)
    }

    /// The `[[r², 1, r]]` qubit Shor code (`r = 3`: the nine-qubit code).
    pub fn shor(r: usize) -> Result<Self, ConcatError> {
        Self::shor_type(2, r)
    }

    /// The `[[r², 1, r]]` qutrit analog of the Shor code: `Z`-type rows
    /// `(1, −1)` inside each block, `X`-type rows of `2r` ones.
    pub fn qutrit_shor(r: usize) -> Result<Self, ConcatError> {
        Self::shor_type(3, r)
    }

    /// The `[[n, 1, 1]]` qutrit repetition code: `Z`-type rows
    /// `e_i − e_{i+1}`, no `X`-type rows, `|β̂⟩_L = |β̂…β̂⟩`.
    pub fn qutrit_repetition(n: usize) -> Result<Self, ConcatError> {
        let hz = (0..n.saturating_sub(1))
            .map(|i| (0..n).map(|j| if j == i { 1 } else if j == i + 1 { 2 } else { 0 }).collect())
            .collect();
        Self::new(3, n, Vec::new(), hz)?.with_logical_x(vec![vec![1; n]])?.with_claimed_distance(1)
    }

    /// The `[[n, 1, 1]]` qubit code with `X`-type checks on neighbours and
    /// no `Z`-type checks (the phase-flip repetition code).
    pub fn qubit_phase_repetition(n: usize) -> Result<Self, ConcatError> {
        let hx = (0..n.saturating_sub(1)).map(|i| (0..n).map(|j| u8::from(j == i || j == i + 1)).collect()).collect();
        Self::new(2, n, hx, Vec::new())?.with_logical_x(vec![vec![1; n]])?.with_claimed_distance(1)
    }

    /// Replaces the logical `X` representatives (`k` vectors of `𝓗_Z^⊥`,
    /// independent modulo `𝓗_X`); logical `Z` representatives are re-paired
    /// so that `x_i · z_j = δ_ij`.
    pub fn with_logical_x(mut self, xs: Vec<Vec<u8>>) -> Result<Self, ConcatError> {
        self.set_logical_x(xs)?;
        Ok(self)
    }

    fn set_logical_x(&mut self, xs: Vec<Vec<u8>>) -> Result<(), ConcatError> {
        let (p, n) = (self.p, self.n);
        let k = self.k();
        if xs.len() != k {
            return Err(ConcatError::InvalidLogical(format!("expected {k} logical representatives, got {}", xs.len())));
        }
        let mut span = self.x_space.clone();
        for x in &xs {
            if x.len() != n || x.iter().any(|&v| v >= p) {
                return Err(ConcatError::InvalidLogical(format!("{x:?} is not a vector of F_{p}^{n}")));
            }
            if self.hz.iter().any(|h| dot(h, x, p) != 0) {
                return Err(ConcatError::InvalidLogical(format!("{x:?} violates a Z-type check")));
            }
            if !span.insert(x) {
                return Err(ConcatError::InvalidLogical(format!("{x:?} is dependent modulo the X-type stabilizers")));
            }
        }
        let z0 = complement(&kernel(p, n, &self.hx), &self.z_space);
        let m: Vec<Vec<u8>> = xs.iter().map(|x| z0.iter().map(|z| dot(x, z, p)).collect()).collect();
        let minv = field::invert(p, &m).ok_or_else(|| {
            ConcatError::InvalidLogical("logical X and Z representatives do not pair non-degenerately".into())
        })?;
        let zs = (0..k)
            .map(|j| {
                let mut z = vec![0u8; n];
                for (l, zl) in z0.iter().enumerate() {
                    field::axpy(&mut z, minv[l][j], zl, p);
                }
                z
            })
            .collect();
        self.logical_x = xs;
        self.logical_z = zs;
        Ok(())
    }

    /// Records a claimed distance; for `n ≤ 9` it must equal the exhaustive
    /// minimum weight.
    pub fn with_claimed_distance(mut self, d: usize) -> Result<Self, ConcatError> {
        if let Some(actual) = self.exhaustive_distance() {
            if actual != d {
                return Err(ConcatError::DistanceMismatch { claimed: d, actual });
            }
        }
        self.claimed_distance = Some(d);
        Ok(self)
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of logical qudits `n − rank H_X − rank H_Z`.
    pub fn k(&self) -> usize {
        self.n - self.x_space.rank() - self.z_space.rank()
    }

    pub fn hx(&self) -> &[Vec<u8>] {
        &self.hx
    }

    pub fn hz(&self) -> &[Vec<u8>] {
        &self.hz
    }

    pub fn rank_x(&self) -> usize {
        self.x_space.rank()
    }

    pub fn rank_z(&self) -> usize {
        self.z_space.rank()
    }

    pub fn logical_x(&self) -> &[Vec<u8>] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[Vec<u8>] {
        &self.logical_z
    }

    pub fn claimed_distance(&self) -> Option<usize> {
        self.claimed_distance
    }

    /// Whether `v` lies in the row space of `H_X`.
    pub fn in_x_stabilizers(&self, v: &[u8]) -> bool {
        self.x_space.contains(v)
    }

    /// Whether `v` lies in `𝓗_Z^⊥`.
    pub fn passes_z_checks(&self, v: &[u8]) -> bool {
        self.hz.iter().all(|h| dot(h, v, self.p) == 0)
    }

    /// Minimum weights `(d_X, d_Z)` of non-trivial logical operators:
    /// `d_X` over `𝓗_Z^⊥ \ 𝓗_X` (undetected `X`-type errors), `d_Z` over
    /// `𝓗_X^⊥ \ 𝓗_Z`. Exhaustive, so only for `n ≤ 9`.
    pub fn exhaustive_distances(&self) -> Option<(usize, usize)> {
        if self.n > EXHAUSTIVE_LENGTH {
            return None;
        }
        let (mut dx, mut dz) = (usize::MAX, usize::MAX);
        for v in all_vectors(self.p, self.n) {
            let w = weight(&v);
            if w == 0 {
                continue;
            }
            if w < dx && self.passes_z_checks(&v) && !self.x_space.contains(&v) {
                dx = w;
            }
            if w < dz && self.hx.iter().all(|h| dot(h, &v, self.p) == 0) && !self.z_space.contains(&v) {
                dz = w;
            }
        }
        Some((dx, dz))
    }

    fn exhaustive_distance(&self) -> Option<usize> {
        self.exhaustive_distances().map(|(a, b)| a.min(b))
    }

    /// Exhaustive distance for `n ≤ 9`, otherwise the claimed distance.
    pub fn distance(&self) -> Option<usize> {
        self.exhaustive_distance().or(self.claimed_distance)
    }

    /// Coset representative `Σ a_i x_i` of a logical value.
    pub fn logical_representative(&self, logical: &[u8]) -> Result<Vec<u8>, ConcatError> {
        if logical.len() != self.k() || logical.iter().any(|&a| a >= self.p) {
            return Err(ConcatError::InvalidLogical(format!(
                "{logical:?} is not a logical value in F_{}^{}",
                self.p,
                self.k()
            )));
        }
        let mut x = vec![0u8; self.n];
        for (&a, xi) in logical.iter().zip(&self.logical_x) {
            field::axpy(&mut x, a, xi, self.p);
        }
        Ok(x)
    }

    /// Elements of `𝓗_X`.
    pub fn x_stabilizer_group(&self) -> Result<Vec<Vec<u8>>, ConcatError> {
        let terms = (self.p as usize).checked_pow(self.rank_x() as u32).unwrap_or(usize::MAX);
        if terms > MAX_CODEWORD_TERMS {
            return Err(ConcatError::ResourceLimit(format!("𝓗_X has {terms} elements")));
        }
        Ok(span_elements(self.p, self.n, self.x_space.basis()))
    }

    /// `|x + 𝓗_X⟩ = |𝓗_X|^{-1/2} Σ_{y ∈ 𝓗_X} |x + y⟩` for the logical value
    /// `logical ∈ F_p^k`.
    pub fn codeword(&self, logical: &[u8]) -> Result<CodeState, ConcatError> {
        let x = self.logical_representative(logical)?;
        let group = self.x_stabilizer_group()?;
        let a = C64::new(1.0 / (group.len() as f64).sqrt(), 0.0);
        let amps = group.iter().map(|y| (field::add(&x, y, self.p), a)).collect();
        Ok(CodeState { p: self.p, n: self.n, amps })
    }

    /// All `p^k` logical basis states, in lexicographic order of the value.
    pub fn codewords(&self) -> Result<Vec<(Vec<u8>, CodeState)>, ConcatError> {
        all_vectors(self.p, self.k()).map(|a| Ok((a.clone(), self.codeword(&a)?))).collect()
    }

    /// Largest deviation `‖S ψ − ψ‖∞` over all stabilizer generators `S`.
    pub fn stabilizer_deviation(&self, state: &CodeState) -> f64 {
        let mut worst: f64 = 0.0;
        for h in &self.hx {
            let shifted = state.shifted(h);
            worst = worst.max(state.max_difference(&shifted));
        }
        for h in &self.hz {
            let phased = state.phased(h);
            worst = worst.max(state.max_difference(&phased));
        }
        worst
    }

    /// Squared norm of the projection of a state onto the code space.
    pub fn code_space_weight(&self, state: &CodeState) -> Result<f64, ConcatError> {
        Ok(self.codewords()?.iter().map(|(_, c)| c.inner(state).norm_sqr()).sum())
    }

    /// Single-error lookup decoder.
    pub fn decoder(&self) -> Decoder {
        Decoder::new(self)
    }
}

/// Basis of a complement of `sub` inside `span(vectors)`.
fn complement(vectors: &[Vec<u8>], sub: &Echelon) -> Vec<Vec<u8>> {
    let mut span = sub.clone();
    vectors.iter().filter(|v| span.insert(v)).cloned().collect()
}

/// State of `n` qudits as a sparse amplitude map over `F_p^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct CodeState {
    p: u8,
    n: usize,
    amps: BTreeMap<Vec<u8>, C64>,
}

impl CodeState {
    pub fn from_amplitudes(p: u8, n: usize, amps: BTreeMap<Vec<u8>, C64>) -> Result<Self, ConcatError> {
        check_prime(p)?;
        if let Some(k) = amps.keys().find(|k| k.len() != n || k.iter().any(|&v| v >= p)) {
            return Err(ConcatError::InvalidLogical(format!("{k:?} is not a basis string of F_{p}^{n}")));
        }
        Ok(CodeState { p, n, amps })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &BTreeMap<Vec<u8>, C64> {
        &self.amps
    }

    pub fn amplitude(&self, basis: &[u8]) -> C64 {
        self.amps.get(basis).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &CodeState) -> C64 {
        self.amps.iter().map(|(k, a)| a.conj() * other.amplitude(k)).sum()
    }

    /// Largest amplitude difference.
    pub fn max_difference(&self, other: &CodeState) -> f64 {
        self.amps
            .keys()
            .chain(other.amps.keys())
            .map(|k| (self.amplitude(k) - other.amplitude(k)).norm())
            .fold(0.0, f64::max)
    }

    /// Applies `X^h`: `|k⟩ ↦ |k + h⟩`.
    pub fn shifted(&self, h: &[u8]) -> CodeState {
        let amps = self.amps.iter().map(|(k, &a)| (field::add(k, h, self.p), a)).collect();
        CodeState { p: self.p, n: self.n, amps }
    }

    /// Applies `Z^h`: `|k⟩ ↦ ζ^{h·k} |k⟩` with `ζ = −1` (qubits) or `ω`.
    pub fn phased(&self, h: &[u8]) -> CodeState {
        let amps = self.amps.iter().map(|(k, &a)| (k.clone(), a * root_of_unity(self.p, dot(h, k, self.p)))).collect();
        CodeState { p: self.p, n: self.n, amps }
    }

    /// Applies `|k⟩ ↦ |f(k)⟩` for a permutation `f` of the basis.
    pub fn mapped(&self, f: impl Fn(&[u8]) -> Vec<u8>) -> CodeState {
        let amps = self.amps.iter().map(|(k, &a)| (f(k), a)).collect();
        CodeState { p: self.p, n: self.n, amps }
    }

    /// Dense amplitudes, first qudit most significant (`p^n ≤ 2^20`).
    pub fn to_dense(&self) -> Result<Vec<C64>, ConcatError> {
        let dim = (self.p as usize).checked_pow(self.n as u32).filter(|&d| d <= 1 << 20).ok_or_else(|| {
            ConcatError::ResourceLimit(format!("dense vector of {} qudits of dimension {}", self.n, self.p))
        })?;
        let mut v = vec![C64::default(); dim];
        for (k, &a) in &self.amps {
            v[k.iter().fold(0usize, |acc, &d| acc * self.p as usize + d as usize)] = a;
        }
        Ok(v)
    }
}

/// `ζ^e` for the primitive `p`-th root of unity.
pub(crate) fn root_of_unity(p: u8, e: u8) -> C64 {
    if p == 2 {
        C64::new(if e.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0)
    } else {
        omega_pow(e as i64)
    }
}

/// A single-qudit error `X^x Z^z` on one site (applied as `Z` first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SitePauli {
    pub site: usize,
    pub x: u8,
    pub z: u8,
}

/// Lookup decoder for single-site errors.
///
/// `Z`-type checks see `X^e` errors through the syndrome `H_Z e`; `X`-type
/// checks see `Z^f` errors through the eigenvalue exponents `−H_X f`
/// (`X^h Z^f = ζ^{−h·f} Z^f X^h`). Each table maps a syndrome to the
/// first single-site error (by site, then power) producing it; the zero
/// syndrome means no correction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoder {
    p: u8,
    hx: Vec<Vec<u8>>,
    hz: Vec<Vec<u8>>,
    x_errors: BTreeMap<Vec<u8>, (usize, u8)>,
    z_errors: BTreeMap<Vec<u8>, (usize, u8)>,
}

impl Decoder {
    fn new(code: &QuditCSSCode) -> Self {
        let (p, n) = (code.p, code.n);
        let mut d = Decoder {
            p,
            hx: code.hx.clone(),
            hz: code.hz.clone(),
            x_errors: BTreeMap::new(),
            z_errors: BTreeMap::new(),
        };
        for site in 0..n {
            for c in 1..p {
                let mut e = vec![0u8; n];
                e[site] = c;
                let sx = d.syndrome_of_x_error(&e);
                if sx.iter().any(|&s| s != 0) {
                    d.x_errors.entry(sx).or_insert((site, c));
                }
                let sz = d.syndrome_of_z_error(&e);
                if sz.iter().any(|&s| s != 0) {
                    d.z_errors.entry(sz).or_insert((site, c));
                }
            }
        }
        d
    }

    /// `H_Z e`.
    pub fn syndrome_of_x_error(&self, e: &[u8]) -> Vec<u8> {
        self.hz.iter().map(|h| dot(h, e, self.p)).collect()
    }

    /// `−H_X f`.
    pub fn syndrome_of_z_error(&self, f: &[u8]) -> Vec<u8> {
        self.hx.iter().map(|h| (self.p - dot(h, f, self.p)) % self.p).collect()
    }

    /// Decoded `X`-type error for a `Z`-check syndrome: `Some(None)` for
    /// the zero syndrome, `None` when no single-site error explains it.
    pub fn x_error(&self, syndrome: &[u8]) -> Option<Option<(usize, u8)>> {
        if syndrome.iter().all(|&s| s == 0) {
            Some(None)
        } else {
            self.x_errors.get(syndrome).map(|&e| Some(e))
        }
    }

    /// Decoded `Z`-type error for an `X`-check syndrome.
    pub fn z_error(&self, syndrome: &[u8]) -> Option<Option<(usize, u8)>> {
        if syndrome.iter().all(|&s| s == 0) {
            Some(None)
        } else {
            self.z_errors.get(syndrome).map(|&e| Some(e))
        }
    }

    /// Non-zero `Z`-check syndromes with their decoded `X`-type errors.
    pub fn x_table(&self) -> &BTreeMap<Vec<u8>, (usize, u8)> {
        &self.x_errors
    }

    /// Non-zero `X`-check syndromes with their decoded `Z`-type errors.
    pub fn z_table(&self) -> &BTreeMap<Vec<u8>, (usize, u8)> {
        &self.z_errors
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_negative_entries_and_comments() {
        let m = parse_matrix("# H_Z\n1 -1 0\n\n0 1 -1\n", 3).unwrap();
        assert_eq!(m, vec![vec![1, 2, 0], vec![0, 1, 2]]);
        assert!(parse_matrix("1 3", 3).is_err());
        assert!(parse_matrix("1 a", 3).is_err());
        assert_eq!(parse_matrix(&format_matrix(&m), 3).unwrap(), m);
    }

    #[test]
    fn non_orthogonal_matrices_are_rejected() {
        let e = QuditCSSCode::new(3, 3, vec![vec![1, 1, 0]], vec![vec![1, 0, 0]]).unwrap_err();
        assert!(matches!(e, ConcatError::NotOrthogonal { x_row: 0, z_row: 0 }));
    }

    #[test]
    fn full_rank_checks_leave_no_logical_qudit() {
        let e = QuditCSSCode::new(2, 2, vec![vec![1, 1]], vec![vec![1, 1]]).unwrap_err();
        assert!(matches!(e, ConcatError::NoLogicalQudits { .. }));
    }

    #[test]
    fn wrong_claimed_distance_is_rejected() {
        let e = QuditCSSCode::qutrit_repetition(3).unwrap().with_claimed_distance(3).unwrap_err();
        assert!(matches!(e, ConcatError::DistanceMismatch { claimed: 3, actual: 1 }));
    }

    #[test]
    fn logical_operators_pair_to_the_identity() {
        for code in [QuditCSSCode::shor(3).unwrap(), QuditCSSCode::qutrit_shor(3).unwrap()] {
            let p = code.p();
            assert_eq!(dot(&code.logical_x()[0], &code.logical_z()[0], p), 1);
            assert!(code.hx().iter().all(|h| dot(h, &code.logical_z()[0], p) == 0));
        }
    }
}
