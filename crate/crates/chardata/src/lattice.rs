//! Exact integer-lattice kernel.
//!
//! Lattices here are integer row spans of vectors in `Z^m`, kept in a unique
//! canonical form: row-style Hermite echelon with positive pivots and the
//! entries above each pivot reduced into `[0, pivot)`. A [`SaturatedLattice`]
//! is additionally a direct summand of `Z^m`; these are exactly the lattices
//! that correspond to subtori of `T^m`.
//!
//! Convention, used everywhere: a [`UnimodularMap`] with matrix `M` acts on a
//! row vector `v` as `v * M`. This matches the usual weight-vector notation
//! `T<a, b>` for circle subgroups.
//!
//! All arithmetic is arbitrary precision; determinants of user input are not
//! assumed to fit a machine word.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

/// Arbitrary-precision integer used throughout the crate.
pub type Int = BigInt;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("ambient rank mismatch: expected {expected}, found {found}")]
    AmbientMismatch { expected: usize, found: usize },
    #[error("generators span an unsaturated lattice (saturation index {index})")]
    NotSaturated { index: BigUint },
    #[error("vector is not contained in the target lattice")]
    NotContained,
    #[error("matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has determinant {det}, expected +1 or -1")]
    NotUnimodular { det: Int },
}

/// A vector in `Z^m`; the ambient rank is the number of entries.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVec(Vec<Int>);

impl IntVec {
    pub fn new(entries: Vec<Int>) -> Self {
        IntVec(entries)
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        IntVec(entries.iter().map(|&e| Int::from(e)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        IntVec(vec![Int::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Int] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|e| e.is_zero())
    }

    /// gcd of the entries (0 for the zero vector).
    pub fn content(&self) -> BigUint {
        let mut g = BigUint::zero();
        for e in &self.0 {
            g = g.gcd(&e.magnitude().clone());
        }
        g
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }
}

impl fmt::Debug for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.0
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

impl fmt::Display for IntVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}]",
            self.0
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        )
    }
}

/// A raw spanning set: rows in `Z^m` before canonicalization. May be empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    ambient: usize,
    rows: Vec<IntVec>,
}

impl GeneratorSet {
    pub fn new(ambient: usize, rows: Vec<IntVec>) -> Result<Self, LatticeError> {
        for row in &rows {
            if row.dim() != ambient {
                return Err(LatticeError::AmbientMismatch {
                    expected: ambient,
                    found: row.dim(),
                });
            }
        }
        Ok(GeneratorSet { ambient, rows })
    }

    pub fn from_i64(ambient: usize, rows: &[&[i64]]) -> Self {
        GeneratorSet::new(ambient, rows.iter().map(|r| IntVec::from_i64(r)).collect())
            .expect("row length mismatch")
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rows(&self) -> &[IntVec] {
        &self.rows
    }
}

// ---------------------------------------------------------------------------
// Matrix helpers (row-major Vec<Vec<Int>>).

fn rows_to_mat(rows: &[IntVec]) -> Vec<Vec<Int>> {
    rows.iter().map(|r| r.entries().to_vec()).collect()
}

/// In-place row Hermite echelon form. Returns the rank; rows beyond it are
/// zero. Pivots positive, entries above each pivot reduced into [0, pivot).
fn hermite_echelon(mat: &mut [Vec<Int>], cols: usize) -> usize {
    let mut r = 0;
    for col in 0..cols {
        if r == mat.len() {
            break;
        }
        // gcd-descend until at most one row below r has a nonzero entry here
        loop {
            let mut pivot: Option<usize> = None;
            for i in r..mat.len() {
                if !mat[i][col].is_zero() {
                    let better = match pivot {
                        None => true,
                        Some(p) => mat[i][col].magnitude() < mat[p][col].magnitude(),
                    };
                    if better {
                        pivot = Some(i);
                    }
                }
            }
            let Some(p) = pivot else { break };
            mat.swap(r, p);
            let mut dirty = false;
            for i in r + 1..mat.len() {
                if !mat[i][col].is_zero() {
                    let q = mat[i][col].div_floor(&mat[r][col]);
                    for j in col..cols {
                        let t = &mat[i][j] - &q * &mat[r][j];
                        mat[i][j] = t;
                    }
                    if !mat[i][col].is_zero() {
                        dirty = true;
                    }
                }
            }
            if !dirty {
                break;
            }
        }
        if mat[r][col].is_zero() {
            continue;
        }
        if mat[r][col].is_negative() {
            for j in col..cols {
                let t = -&mat[r][j];
                mat[r][j] = t;
            }
        }
        // reduce entries above the pivot into [0, pivot)
        let pivot_row = mat[r].clone();
        for i in 0..r {
            if !mat[i][col].is_zero() {
                let q = mat[i][col].div_floor(&pivot_row[col]);
                if !q.is_zero() {
                    for j in col..cols {
                        let t = &mat[i][j] - &q * &pivot_row[j];
                        mat[i][j] = t;
                    }
                }
            }
        }
        r += 1;
    }
    r
}

/// Smith normal form restricted to what the kernel needs: the diagonal
/// invariants of `mat` and, when `want_winv`, the matrix `W = V^-1` for the
/// accumulated column transform `V` (so the row span of the input equals the
/// span of `d_i * W_i`).
fn smith_diagonal(
    mat: &[Vec<Int>],
    cols: usize,
    want_winv: bool,
) -> (Vec<Int>, Option<Vec<Vec<Int>>>) {
    let mut b: Vec<Vec<Int>> = mat.to_vec();
    let rows = b.len();
    let mut w = if want_winv {
        let mut id = vec![vec![Int::zero(); cols]; cols];
        for (i, row) in id.iter_mut().enumerate() {
            row[i] = Int::one();
        }
        Some(id)
    } else {
        None
    };

    let bound = rows.min(cols);
    let mut diag = Vec::new();
    for t in 0..bound {
        // locate the smallest nonzero entry in the trailing block
        let mut found: Option<(usize, usize)>;
        loop {
            found = None;
            for i in t..rows {
                for j in t..cols {
                    if !b[i][j].is_zero() {
                        let better = match found {
                            None => true,
                            Some((fi, fj)) => b[i][j].magnitude() < b[fi][fj].magnitude(),
                        };
                        if better {
                            found = Some((i, j));
                        }
                    }
                }
            }
            let Some((pi, pj)) = found else { break };
            b.swap(t, pi);
            if pj != t {
                for row in b.iter_mut() {
                    row.swap(t, pj);
                }
                if let Some(w) = w.as_mut() {
                    w.swap(t, pj); // inverse of a swap is the swap
                }
            }
            // clear column t below the pivot (row ops, W untouched)
            for i in t + 1..rows {
                if !b[i][t].is_zero() {
                    let q = b[i][t].div_floor(&b[t][t]);
                    if !q.is_zero() {
                        for j in t..cols {
                            let v = &b[i][j] - &q * &b[t][j];
                            b[i][j] = v;
                        }
                    }
                }
            }
            // clear row t beyond the pivot (column ops, W updated)
            for j in t + 1..cols {
                if !b[t][j].is_zero() {
                    let q = b[t][j].div_floor(&b[t][t]);
                    if !q.is_zero() {
                        for row in b.iter_mut() {
                            let v = &row[j] - &q * &row[t];
                            row[j] = v;
                        }
                        if let Some(w) = w.as_mut() {
                            // (I - q E_{tj})^-1 = I + q E_{tj}: row t += q * row j
                            let (head, tail) = w.split_at_mut(j);
                            let add: Vec<Int> = tail[0].iter().map(|x| &q * x).collect();
                            for (a, x) in head[t].iter_mut().zip(add) {
                                *a += x;
                            }
                        }
                    }
                }
            }
            let col_clear = (t + 1..rows).all(|i| b[i][t].is_zero());
            let row_clear = (t + 1..cols).all(|j| b[t][j].is_zero());
            if col_clear && row_clear {
                // enforce divisibility of the remaining block by the pivot
                let mut offender = None;
                'scan: for i in t + 1..rows {
                    for j in t + 1..cols {
                        if !(&b[i][j] % &b[t][t]).is_zero() {
                            offender = Some(j);
                            break 'scan;
                        }
                    }
                }
                match offender {
                    Some(j) => {
                        // column t += column j; inverse subtracts row t from row j of W
                        for row in b.iter_mut() {
                            let v = &row[t] + &row[j];
                            row[t] = v;
                        }
                        if let Some(w) = w.as_mut() {
                            let sub: Vec<Int> = w[t].clone();
                            for (a, x) in w[j].iter_mut().zip(sub) {
                                *a -= x;
                            }
                        }
                    }
                    None => break,
                }
            }
        }
        if found.is_none() && b[t][t].is_zero() {
            break;
        }
        if b[t][t].is_negative() {
            for row in b.iter_mut() {
                let v = -&row[t];
                row[t] = v;
            }
            if let Some(w) = w.as_mut() {
                for x in w[t].iter_mut() {
                    let v = -&*x;
                    *x = v;
                }
            }
        }
        diag.push(b[t][t].clone());
    }
    (diag, w)
}

/// Fraction-free (Bareiss) determinant of a square matrix.
fn det_bareiss(mut a: Vec<Vec<Int>>) -> Int {
    let n = a.len();
    if n == 0 {
        return Int::one();
    }
    let mut sign = Int::one();
    let mut prev = Int::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            let swap = (k + 1..n).find(|&i| !a[i][k].is_zero());
            match swap {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return Int::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = Int::zero();
        }
        prev = a[k][k].clone();
    }
    &a[n - 1][n - 1] * sign
}

// ---------------------------------------------------------------------------

/// Unique echelon basis of the integer row span of `g`, plus its rank.
/// Two generator sets spanning the same lattice yield identical output.
pub fn canonicalize(g: &GeneratorSet) -> (Vec<IntVec>, usize) {
    let mut mat = rows_to_mat(g.rows());
    let rank = hermite_echelon(&mut mat, g.ambient_rank());
    mat.truncate(rank);
    (mat.into_iter().map(IntVec::new).collect(), rank)
}

/// Invariant factors `d_1 | d_2 | ...` of the matrix with rows `g`, zeros
/// omitted.
pub fn smith_invariants(g: &GeneratorSet) -> Vec<BigUint> {
    let mat = rows_to_mat(g.rows());
    let (diag, _) = smith_diagonal(&mat, g.ambient_rank(), false);
    diag.into_iter().map(|d| d.magnitude().clone()).collect()
}

/// Order of the quotient `ambient / span(g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientOrder {
    Finite(BigUint),
    Infinite,
}

impl fmt::Display for QuotientOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuotientOrder::Finite(n) => write!(f, "{n}"),
            QuotientOrder::Infinite => write!(f, "infinite"),
        }
    }
}

/// A saturated sublattice of `Z^m` in canonical echelon basis: the
/// combinatorial stand-in for a subtorus of `T^m`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SaturatedLattice {
    ambient: usize,
    basis: Vec<IntVec>,
}

impl SaturatedLattice {
    /// The zero lattice (the trivial subtorus).
    pub fn zero(ambient: usize) -> Self {
        SaturatedLattice {
            ambient,
            basis: Vec::new(),
        }
    }

    /// All of `Z^m` (the full torus).
    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![Int::zero(); ambient];
                v[i] = Int::one();
                IntVec::new(v)
            })
            .collect();
        SaturatedLattice { ambient, basis }
    }

    /// Smallest saturated sublattice containing `span(g)`, together with the
    /// index `[saturation : span]` (1 iff the span was already saturated).
    pub fn saturation(g: &GeneratorSet) -> (Self, BigUint) {
        let m = g.ambient_rank();
        let mat = rows_to_mat(g.rows());
        let (diag, winv) = smith_diagonal(&mat, m, true);
        let w = winv.expect("transform requested");
        let rank = diag.len();
        let mut index = BigUint::one();
        for d in &diag {
            index *= d.magnitude();
        }
        let gens: Vec<IntVec> = w.into_iter().take(rank).map(IntVec::new).collect();
        let g2 = GeneratorSet::new(m, gens).expect("rows of W have ambient length");
        let (basis, r2) = canonicalize(&g2);
        debug_assert_eq!(r2, rank);
        (SaturatedLattice { ambient: m, basis }, index)
    }

    /// Canonical lattice spanned by `g`, rejecting unsaturated spans.
    pub fn from_generators(g: &GeneratorSet) -> Result<Self, LatticeError> {
        let (lat, index) = SaturatedLattice::saturation(g);
        if index.is_one() {
            Ok(lat)
        } else {
            Err(LatticeError::NotSaturated { index })
        }
    }

    pub fn from_i64(ambient: usize, rows: &[&[i64]]) -> Result<Self, LatticeError> {
        SaturatedLattice::from_generators(&GeneratorSet::from_i64(ambient, rows))
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[IntVec] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    /// Integer coordinates of `v` in the canonical basis, or `None` when `v`
    /// is not a member. Back-substitution along the echelon staircase.
    pub fn coordinates_of(&self, v: &IntVec) -> Option<IntVec> {
        if v.dim() != self.ambient {
            return None;
        }
        let mut rest = v.entries().to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let col = row
                .entries()
                .iter()
                .position(|e| !e.is_zero())
                .expect("basis rows nonzero");
            let (q, r) = rest[col].div_rem(&row.entries()[col]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for (x, b) in rest.iter_mut().zip(row.entries()) {
                    *x -= &q * b;
                }
            }
            coords.push(q);
        }
        if rest.iter().all(|e| e.is_zero()) {
            Some(IntVec::new(coords))
        } else {
            None
        }
    }

    pub fn contains_vector(&self, v: &IntVec) -> Result<bool, LatticeError> {
        if v.dim() != self.ambient {
            return Err(LatticeError::AmbientMismatch {
                expected: self.ambient,
                found: v.dim(),
            });
        }
        Ok(self.coordinates_of(v).is_some())
    }

    /// True iff every basis row of `other` lies in the span of `self`.
    pub fn contains(&self, other: &SaturatedLattice) -> Result<bool, LatticeError> {
        if other.ambient != self.ambient {
            return Err(LatticeError::AmbientMismatch {
                expected: self.ambient,
                found: other.ambient,
            });
        }
        Ok(other
            .basis
            .iter()
            .all(|row| self.coordinates_of(row).is_some()))
    }

    /// Coordinates of `sub`'s basis in `self`'s canonical basis: a generator
    /// set in `Z^rank(self)`. Errors when `sub` is not contained in `self`.
    pub fn express(&self, sub: &SaturatedLattice) -> Result<GeneratorSet, LatticeError> {
        if sub.ambient != self.ambient {
            return Err(LatticeError::AmbientMismatch {
                expected: self.ambient,
                found: sub.ambient,
            });
        }
        let mut rows = Vec::with_capacity(sub.basis.len());
        for row in &sub.basis {
            rows.push(self.coordinates_of(row).ok_or(LatticeError::NotContained)?);
        }
        GeneratorSet::new(self.rank(), rows)
    }
}

impl fmt::Debug for SaturatedLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "span{{{}}} in Z^{}",
            self.basis
                .iter()
                .map(|r| format!("{r:?}"))
                .collect::<Vec<_>>()
                .join(", "),
            self.ambient
        )
    }
}

/// Order of `ambient / span(g)`: the product of the invariant factors of `g`
/// expressed in a basis of `ambient` when the ranks agree, `Infinite` on a
/// rank deficit. Errors when `span(g)` is not contained in `ambient`.
pub fn quotient_order(
    g: &GeneratorSet,
    ambient: &SaturatedLattice,
) -> Result<QuotientOrder, LatticeError> {
    if g.ambient_rank() != ambient.ambient_rank() {
        return Err(LatticeError::AmbientMismatch {
            expected: ambient.ambient_rank(),
            found: g.ambient_rank(),
        });
    }
    let mut rows = Vec::with_capacity(g.rows().len());
    for row in g.rows() {
        rows.push(
            ambient
                .coordinates_of(row)
                .ok_or(LatticeError::NotContained)?,
        );
    }
    let coords = GeneratorSet::new(ambient.rank(), rows)?;
    let invariants = smith_invariants(&coords);
    if invariants.len() < ambient.rank() {
        return Ok(QuotientOrder::Infinite);
    }
    let mut order = BigUint::one();
    for d in invariants {
        order *= d;
    }
    Ok(QuotientOrder::Finite(order))
}

/// An element of `GL(m, Z)`, acting on row vectors by `v -> v * matrix`.
/// Models a torus automorphism `T^m -> T^m` through its weight action.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UnimodularMap {
    m: usize,
    matrix: Vec<Vec<Int>>,
}

impl UnimodularMap {
    pub fn new(matrix: Vec<Vec<Int>>) -> Result<Self, LatticeError> {
        let m = matrix.len();
        for row in &matrix {
            if row.len() != m {
                return Err(LatticeError::NotSquare {
                    rows: m,
                    cols: row.len(),
                });
            }
        }
        let det = det_bareiss(matrix.clone());
        if det.magnitude().is_one() {
            Ok(UnimodularMap { m, matrix })
        } else {
            Err(LatticeError::NotUnimodular { det })
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self, LatticeError> {
        UnimodularMap::new(
            rows.iter()
                .map(|r| r.iter().map(|&e| Int::from(e)).collect())
                .collect(),
        )
    }

    pub fn identity(m: usize) -> Self {
        let mut matrix = vec![vec![Int::zero(); m]; m];
        for (i, row) in matrix.iter_mut().enumerate() {
            row[i] = Int::one();
        }
        UnimodularMap { m, matrix }
    }

    /// Adds `c` times coordinate `i` to coordinate `j` of every image vector.
    pub fn elementary_add(m: usize, i: usize, j: usize, c: Int) -> Self {
        assert!(i < m && j < m && i != j);
        let mut e = UnimodularMap::identity(m);
        e.matrix[i][j] = c;
        e
    }

    pub fn elementary_swap(m: usize, i: usize, j: usize) -> Self {
        assert!(i < m && j < m);
        let mut e = UnimodularMap::identity(m);
        e.matrix.swap(i, j);
        e
    }

    pub fn elementary_negate(m: usize, i: usize) -> Self {
        assert!(i < m);
        let mut e = UnimodularMap::identity(m);
        e.matrix[i][i] = -Int::one();
        e
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &[Vec<Int>] {
        &self.matrix
    }

    pub fn is_identity(&self) -> bool {
        *self == UnimodularMap::identity(self.m)
    }

    pub fn det(&self) -> Int {
        det_bareiss(self.matrix.clone())
    }

    /// `v * matrix` for a row vector `v`.
    pub fn apply(&self, v: &IntVec) -> IntVec {
        assert_eq!(v.dim(), self.m, "vector dimension mismatch");
        let out = (0..self.m)
            .map(|j| {
                let mut acc = Int::zero();
                for (k, e) in v.entries().iter().enumerate() {
                    acc += e * &self.matrix[k][j];
                }
                acc
            })
            .collect();
        IntVec::new(out)
    }

    /// Canonical form of `{ v * matrix : v in lat }`. Rank and saturation are
    /// preserved since the matrix is a unit.
    pub fn apply_lattice(&self, lat: &SaturatedLattice) -> Result<SaturatedLattice, LatticeError> {
        if lat.ambient_rank() != self.m {
            return Err(LatticeError::AmbientMismatch {
                expected: self.m,
                found: lat.ambient_rank(),
            });
        }
        let rows = lat.basis().iter().map(|v| self.apply(v)).collect();
        let g = GeneratorSet::new(self.m, rows)?;
        let (lat, index) = SaturatedLattice::saturation(&g);
        debug_assert!(index.is_one());
        Ok(lat)
    }

    /// Composite map: apply `self` first, then `other`.
    pub fn then(&self, other: &UnimodularMap) -> UnimodularMap {
        assert_eq!(self.m, other.m);
        let m = self.m;
        let mut matrix = vec![vec![Int::zero(); m]; m];
        for i in 0..m {
            for j in 0..m {
                let mut acc = Int::zero();
                for k in 0..m {
                    acc += &self.matrix[i][k] * &other.matrix[k][j];
                }
                matrix[i][j] = acc;
            }
        }
        UnimodularMap { m, matrix }
    }

    /// Exact inverse; integral because the determinant is a unit.
    pub fn inverse(&self) -> UnimodularMap {
        let m = self.m;
        if m == 0 {
            return UnimodularMap::identity(0);
        }
        use num_rational::BigRational;
        let mut aug: Vec<Vec<BigRational>> = self
            .matrix
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r: Vec<BigRational> =
                    row.iter().map(|e| BigRational::from(e.clone())).collect();
                for j in 0..m {
                    r.push(BigRational::from(Int::from((i == j) as i64)));
                }
                r
            })
            .collect();
        for col in 0..m {
            let pivot = (col..m)
                .find(|&i| !aug[i][col].is_zero())
                .expect("unimodular matrix is invertible");
            aug.swap(col, pivot);
            let p = aug[col][col].clone();
            for x in aug[col].iter_mut() {
                *x /= &p;
            }
            for i in 0..m {
                if i != col && !aug[i][col].is_zero() {
                    let f = aug[i][col].clone();
                    let row = aug[col].clone();
                    for (x, y) in aug[i].iter_mut().zip(row) {
                        *x -= &f * y;
                    }
                }
            }
        }
        let matrix = aug
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .skip(m)
                    .map(|x| {
                        debug_assert!(x.is_integer());
                        x.to_integer()
                    })
                    .collect()
            })
            .collect();
        UnimodularMap { m, matrix }
    }
}
