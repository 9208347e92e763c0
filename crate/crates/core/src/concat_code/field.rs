//! Linear algebra over the prime fields `F_2` and `F_3`.
//!
//! Vectors are `Vec<u8>` with entries in `0..p`.

/// Multiplicative inverse in `F_p` (`a ≠ 0`, `p ∈ {2, 3}`): every non-zero
/// element of these fields is its own inverse.
pub(crate) fn inv(a: u8, _p: u8) -> u8 {
    debug_assert!(a != 0);
    a
}

pub(crate) fn dot(a: &[u8], b: &[u8], p: u8) -> u8 {
    (a.iter().zip(b).map(|(&x, &y)| x as u32 * y as u32).sum::<u32>() % p as u32) as u8
}

/// `a + c·b` entrywise.
pub(crate) fn axpy(a: &mut [u8], c: u8, b: &[u8], p: u8) {
    for (x, &y) in a.iter_mut().zip(b) {
        *x = ((*x as u32 + c as u32 * y as u32) % p as u32) as u8;
    }
}

pub(crate) fn scale(a: &[u8], c: u8, p: u8) -> Vec<u8> {
    a.iter().map(|&x| ((x as u32 * c as u32) % p as u32) as u8).collect()
}

pub(crate) fn add(a: &[u8], b: &[u8], p: u8) -> Vec<u8> {
    a.iter().zip(b).map(|(&x, &y)| (x + y) % p).collect()
}

/// Schur (componentwise) product.
pub(crate) fn schur(a: &[u8], b: &[u8], p: u8) -> Vec<u8> {
    a.iter().zip(b).map(|(&x, &y)| ((x as u32 * y as u32) % p as u32) as u8).collect()
}

pub(crate) fn weight(a: &[u8]) -> usize {
    a.iter().filter(|&&x| x != 0).count()
}

/// Row space in reduced echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Echelon {
    p: u8,
    rows: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub(crate) fn new(p: u8, n: usize, rows: &[Vec<u8>]) -> Self {
        let mut e = Echelon { p, rows: Vec::new(), pivots: Vec::new() };
        for r in rows {
            debug_assert_eq!(r.len(), n);
            e.insert(r);
        }
        e
    }

    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn basis(&self) -> &[Vec<u8>] {
        &self.rows
    }

    /// `v` minus its projection onto the pivot columns.
    pub(crate) fn reduce(&self, v: &[u8]) -> Vec<u8> {
        let mut v = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if v[c] != 0 {
                let f = (self.p - v[c]) % self.p;
                axpy(&mut v, f, row, self.p);
            }
        }
        v
    }

    pub(crate) fn contains(&self, v: &[u8]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` to the space; returns whether the rank grew.
    pub(crate) fn insert(&mut self, v: &[u8]) -> bool {
        let mut r = self.reduce(v);
        let Some(c) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let s = inv(r[c], self.p);
        r = scale(&r, s, self.p);
        for (row, _) in self.rows.iter_mut().zip(&self.pivots) {
            if row[c] != 0 {
                let f = (self.p - row[c]) % self.p;
                axpy(row, f, &r, self.p);
            }
        }
        let at = self.pivots.partition_point(|&q| q < c);
        self.rows.insert(at, r);
        self.pivots.insert(at, c);
        true
    }
}

/// Basis of `{v : r·v = 0 for every row r}`.
pub(crate) fn kernel(p: u8, n: usize, rows: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let e = Echelon::new(p, n, rows);
    let free: Vec<usize> = (0..n).filter(|c| !e.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u8; n];
            v[f] = 1;
            for (row, &c) in e.rows.iter().zip(&e.pivots) {
                v[c] = (p - row[f]) % p;
            }
            v
        })
        .collect()
}

/// All `p^r` elements of the span of `basis` (which must be independent
/// for the elements to be distinct), in lexicographic coefficient order.
pub(crate) fn span_elements(p: u8, n: usize, basis: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let mut out = vec![vec![0u8; n]];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for v in &out {
            for c in 0..p {
                let mut w = v.clone();
                axpy(&mut w, c, b, p);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Inverse of a square matrix over `F_p`, or `None` if singular.
pub(crate) fn invert(p: u8, m: &[Vec<u8>]) -> Option<Vec<Vec<u8>>> {
    let k = m.len();
    let mut a: Vec<Vec<u8>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..k).map(|j| u8::from(i == j)));
            row
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).find(|&r| a[r][col] != 0)?;
        a.swap(col, piv);
        let s = inv(a[col][col], p);
        a[col] = scale(&a[col], s, p);
        for r in 0..k {
            if r != col && a[r][col] != 0 {
                let f = (p - a[r][col]) % p;
                let pivot_row = a[col].clone();
                axpy(&mut a[r], f, &pivot_row, p);
            }
        }
    }
    Some(a.into_iter().map(|r| r[k..].to_vec()).collect())
}

/// Every vector of `F_p^n` as a digit vector (first entry most
/// significant).
pub(crate) fn all_vectors(p: u8, n: usize) -> impl Iterator<Item = Vec<u8>> {
    let total = (p as usize).pow(n as u32);
    (0..total).map(move |mut x| {
        let mut v = vec![0u8; n];
        for slot in v.iter_mut().rev() {
            *slot = (x % p as usize) as u8;
            x /= p as usize;
        }
        v
    })
}
