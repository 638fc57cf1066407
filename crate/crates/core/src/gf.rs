//! Exact linear algebra over prime fields GF(p).
//!
//! Vectors are row vectors and matrices act on the right: the matrix `M` of a
//! map sends `v` to `vM`, and row `i` of `M` is the image of the standard
//! basis vector `e_i`. Composition "apply `a`, then `b`" is the product `a * b`.
//!
//! Subspaces are stored by their reduced row echelon basis, so two subspaces
//! are equal exactly when their structs compare equal.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest admissible modulus.
pub const MAX_PRIME: u32 = 13;

/// A row vector over GF(p), one entry per coordinate, each in `0..p`.
pub type Row = Vec<u8>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Field {
    p: u8,
}

impl Field {
    pub fn new(p: u32) -> Result<Field> {
        let prime = p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d));
        if !prime || p > MAX_PRIME {
            return Err(Error::Config(format!(
                "modulus {p} is not a prime in [2, {MAX_PRIME}]"
            )));
        }
        Ok(Field { p: p as u8 })
    }

    pub fn p(self) -> u8 {
        self.p
    }

    pub fn order(self) -> usize {
        self.p as usize
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.p as u16 - b as u16) % self.p as u16) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.p as u16) as u8
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u8) -> Option<u8> {
        let a = a % self.p;
        if a == 0 {
            return None;
        }
        // Fermat: a^(p-2)
        let mut acc = 1u8;
        for _ in 0..self.p - 2 {
            acc = self.mul(acc, a);
        }
        Some(acc)
    }

    pub fn scalar(self, value: u32) -> Scalar {
        Scalar {
            value: (value % self.p as u32) as u8,
            field: self,
        }
    }

    pub fn add_vec(self, a: &[u8], b: &[u8]) -> Row {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    pub fn sub_vec(self, a: &[u8], b: &[u8]) -> Row {
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }

    pub fn scale_vec(self, c: u8, a: &[u8]) -> Row {
        a.iter().map(|&x| self.mul(c, x)).collect()
    }

    /// `y += c * x`
    pub fn axpy(self, y: &mut [u8], c: u8, x: &[u8]) {
        if c == 0 {
            return;
        }
        for (yi, &xi) in y.iter_mut().zip(x) {
            *yi = self.add(*yi, self.mul(c, xi));
        }
    }

    /// Every vector of GF(p)^n in lexicographic order of coordinates.
    pub fn vectors(self, n: usize) -> impl Iterator<Item = Row> {
        let p = self.p;
        let total = (p as u64).pow(n as u32);
        (0..total).map(move |mut idx| {
            let mut v = vec![0u8; n];
            for slot in v.iter_mut().rev() {
                *slot = (idx % p as u64) as u8;
                idx /= p as u64;
            }
            v
        })
    }

    /// `e_i` of GF(p)^n (0-based).
    pub fn unit_vector(self, n: usize, i: usize) -> Row {
        let mut v = vec![0u8; n];
        v[i] = 1;
        v
    }
}

/// An element of GF(p).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    value: u8,
    field: Field,
}

impl Scalar {
    pub fn value(self) -> u8 {
        self.value
    }

    pub fn field(self) -> Field {
        self.field
    }

    pub fn inv(self) -> Option<Scalar> {
        self.field.inv(self.value).map(|value| Scalar {
            value,
            field: self.field,
        })
    }

    fn check(self, other: Scalar) {
        assert_eq!(self.field, other.field, "scalars from different fields");
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        self.check(rhs);
        Scalar {
            value: self.field.add(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self.check(rhs);
        Scalar {
            value: self.field.sub(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self.check(rhs);
        Scalar {
            value: self.field.mul(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}

/// Gauss-Jordan elimination of a list of rows, tracking the row operations.
///
/// `reduced = transform * input`; the first `pivots.len()` rows of `reduced`
/// are the RREF basis of the row space, and the remaining rows of `transform`
/// span the left null space of the input.
struct Elimination {
    reduced: Vec<Row>,
    transform: Vec<Row>,
    pivots: Vec<usize>,
}

impl Elimination {
    fn run(field: Field, rows: &[Row], ncols: usize, track: bool) -> Elimination {
        let m = rows.len();
        let mut a: Vec<Row> = rows.to_vec();
        let mut t: Vec<Row> = if track {
            (0..m).map(|i| field.unit_vector(m, i)).collect()
        } else {
            Vec::new()
        };
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..ncols {
            if rank == m {
                break;
            }
            let Some(pr) = (rank..m).find(|&i| a[i][col] != 0) else {
                continue;
            };
            a.swap(rank, pr);
            if track {
                t.swap(rank, pr);
            }
            let inv = field.inv(a[rank][col]).expect("nonzero pivot");
            a[rank] = field.scale_vec(inv, &a[rank]);
            if track {
                t[rank] = field.scale_vec(inv, &t[rank]);
            }
            let prow = a[rank].clone();
            let trow = if track { t[rank].clone() } else { Vec::new() };
            for i in 0..m {
                if i != rank && a[i][col] != 0 {
                    let c = field.neg(a[i][col]);
                    field.axpy(&mut a[i], c, &prow);
                    if track {
                        field.axpy(&mut t[i], c, &trow);
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        Elimination {
            reduced: a,
            transform: t,
            pivots,
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// A square matrix over GF(p), acting on row vectors from the right.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat {
    field: Field,
    n: usize,
    data: Vec<u8>,
}

impl Mat {
    pub fn identity(field: Field, n: usize) -> Mat {
        let mut data = vec![0u8; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Mat { field, n, data }
    }

    pub fn zero(field: Field, n: usize) -> Mat {
        Mat {
            field,
            n,
            data: vec![0u8; n * n],
        }
    }

    pub fn from_rows<R: AsRef<[u8]>>(field: Field, rows: &[R]) -> Result<Mat> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::Config(format!(
                    "matrix row has length {}, expected {n}",
                    row.len()
                )));
            }
            if let Some(&bad) = row.iter().find(|&&x| x >= field.p()) {
                return Err(Error::Config(format!(
                    "entry {bad} is out of range for GF({})",
                    field.p()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Mat { field, n, data })
    }

    /// Builds a matrix from its row-major entries; values are reduced mod p.
    pub fn from_flat(field: Field, n: usize, entries: &[u8]) -> Result<Mat> {
        if entries.len() != n * n {
            return Err(Error::Config(format!(
                "expected {} entries, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(Mat {
            field,
            n,
            data: entries.iter().map(|&x| x % field.p()).collect(),
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Row> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// `vM`
    pub fn apply(&self, v: &[u8]) -> Row {
        let mut out = vec![0u8; self.n];
        for (i, &c) in v.iter().enumerate() {
            self.field.axpy(&mut out, c, self.row(i));
        }
        out
    }

    /// Composition "apply `self`, then `other`".
    pub fn try_mul(&self, other: &Mat) -> Result<Mat> {
        if self.field != other.field || self.n != other.n {
            return Err(Error::Config(format!(
                "cannot multiply {}x{} over GF({}) by {}x{} over GF({})",
                self.n,
                self.n,
                self.field.p(),
                other.n,
                other.n,
                other.field.p()
            )));
        }
        let n = self.n;
        let p = self.field.p() as u32;
        let mut data = vec![0u8; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u32;
                for k in 0..n {
                    acc += self.data[i * n + k] as u32 * other.data[k * n + j] as u32;
                }
                data[i * n + j] = (acc % p) as u8;
            }
        }
        Ok(Mat {
            field: self.field,
            n,
            data,
        })
    }

    pub fn image(&self) -> Subspace {
        Subspace::span(self.field, self.n, &self.rows())
    }

    pub fn kernel(&self) -> Subspace {
        let elim = Elimination::run(self.field, &self.rows(), self.n, true);
        let null_rows = &elim.transform[elim.rank()..];
        Subspace::span(self.field, self.n, null_rows)
    }

    pub fn rank(&self) -> usize {
        Elimination::run(self.field, &self.rows(), self.n, false).rank()
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    pub fn inverse(&self) -> Option<Mat> {
        let elim = Elimination::run(self.field, &self.rows(), self.n, true);
        if elim.rank() < self.n {
            return None;
        }
        Some(Mat::from_rows(self.field, &elim.transform).expect("square transform"))
    }

    /// The matrix sending `basis[i]` to `images[i]` for every `i`.
    pub fn from_basis_images(field: Field, basis: &[Row], images: &[Row]) -> Result<Mat> {
        let n = basis.len();
        if images.len() != n {
            return Err(Error::Precondition(format!(
                "{} basis vectors but {} images",
                n,
                images.len()
            )));
        }
        let b = Mat::from_rows(field, basis)?;
        let b_inv = b
            .inverse()
            .ok_or_else(|| Error::Precondition("domain vectors are not a basis".into()))?;
        let c = Mat::from_rows(field, images)?;
        b_inv.try_mul(&c)
    }

    /// The lexicographically least `v` with `vM = target`.
    pub fn preimage(&self, target: &[u8]) -> Result<Row> {
        let elim = Elimination::run(self.field, &self.rows(), self.n, true);
        let f = self.field;
        let mut v = vec![0u8; self.n];
        let mut reached = vec![0u8; self.n];
        for (i, &col) in elim.pivots.iter().enumerate() {
            let c = target[col];
            f.axpy(&mut v, c, &elim.transform[i]);
            f.axpy(&mut reached, c, &elim.reduced[i]);
        }
        if reached != target {
            return Err(Error::NoPreimage);
        }
        // Solutions form v + ker; zeroing the kernel's pivot coordinates gives
        // the lexicographic minimum of that coset.
        let kernel = Subspace::span(f, self.n, &elim.transform[elim.rank()..]);
        for (row, &col) in kernel.basis.iter().zip(kernel.pivots().iter()) {
            let c = f.neg(v[col]);
            f.axpy(&mut v, c, row);
        }
        Ok(v)
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        self.try_mul(rhs).expect("matrix shapes agree")
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat/GF({}){}", self.field.p, self)
    }
}

/// Matrix multiplication with an explicit shape check.
pub fn mat_mul(a: &Mat, b: &Mat) -> Result<Mat> {
    a.try_mul(b)
}

/// A subspace of GF(p)^n, held as its reduced row echelon basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    field: Field,
    n: usize,
    basis: Vec<Row>,
}

impl Subspace {
    /// Span of `rows`, in canonical form.
    pub fn span<R: AsRef<[u8]>>(field: Field, n: usize, rows: &[R]) -> Subspace {
        let rows: Vec<Row> = rows
            .iter()
            .map(|r| {
                let r = r.as_ref();
                assert_eq!(r.len(), n, "row length must equal the ambient dimension");
                r.iter().map(|&x| x % field.p()).collect()
            })
            .collect();
        let mut elim = Elimination::run(field, &rows, n, false);
        let rank = elim.rank();
        elim.reduced.truncate(rank);
        Subspace {
            field,
            n,
            basis: elim.reduced,
        }
    }

    pub fn zero(field: Field, n: usize) -> Subspace {
        Subspace {
            field,
            n,
            basis: Vec::new(),
        }
    }

    pub fn full(field: Field, n: usize) -> Subspace {
        Subspace {
            field,
            n,
            basis: (0..n).map(|i| field.unit_vector(n, i)).collect(),
        }
    }

    /// `<e_1, ..., e_k>`
    pub fn coordinate(field: Field, n: usize, k: usize) -> Subspace {
        Subspace {
            field,
            n,
            basis: (0..k).map(|i| field.unit_vector(n, i)).collect(),
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Row] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).expect("nonzero basis row"))
            .collect()
    }

    /// Coordinates of `v` in the canonical basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[u8]) -> Option<Row> {
        let coords: Row = self.pivots().iter().map(|&c| v[c]).collect();
        let mut back = vec![0u8; self.n];
        for (row, &c) in self.basis.iter().zip(&coords) {
            self.field.axpy(&mut back, c, row);
        }
        (back == v).then_some(coords)
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let rows: Vec<Row> = self.basis.iter().chain(&other.basis).cloned().collect();
        Subspace::span(self.field, self.n, &rows)
    }

    pub fn intersection_dim(&self, other: &Subspace) -> usize {
        self.dim() + other.dim() - self.sum(other).dim()
    }

    /// `self ∩ other = {0}` and `self + other = V`.
    pub fn is_complement_of(&self, other: &Subspace) -> bool {
        self.dim() + other.dim() == self.n && self.sum(other).dim() == self.n
    }

    /// The subspace `{vM : v ∈ self}`.
    pub fn image_under(&self, m: &Mat) -> Subspace {
        let rows: Vec<Row> = self.basis.iter().map(|v| m.apply(v)).collect();
        Subspace::span(self.field, self.n, &rows)
    }

    /// All vectors of the subspace, in lexicographic order.
    pub fn vectors(&self) -> impl Iterator<Item = Row> + '_ {
        // Lex order of a member equals lex order of its coordinate tuple,
        // because coordinates sit at strictly increasing pivot columns.
        self.field.vectors(self.dim()).map(move |coords| {
            let mut v = vec![0u8; self.n];
            for (row, &c) in self.basis.iter().zip(&coords) {
                self.field.axpy(&mut v, c, row);
            }
            v
        })
    }

    pub fn complements(&self) -> Vec<Subspace> {
        enumerate_complements(self)
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, row) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "(")?;
            for (j, x) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        write!(f, ">")
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace/GF({})^{}{}", self.field.p, self.n, self)
    }
}

pub fn rref_canonical<R: AsRef<[u8]>>(field: Field, n: usize, rows: &[R]) -> Subspace {
    Subspace::span(field, n, rows)
}

/// Vectors to append to `partial` so the union is a basis of `within`.
///
/// Candidates are the vectors of `within` taken in lexicographic order; each
/// one independent of what has been collected so far is kept.
pub fn extend_basis(partial: &[Row], within: &Subspace) -> Result<Vec<Row>> {
    let field = within.field;
    let n = within.n;
    if let Some(v) = partial.iter().find(|v| v.len() != n || !within.contains(v)) {
        return Err(Error::Precondition(format!(
            "vector {v:?} does not lie in {within}"
        )));
    }
    let mut current = Subspace::span(field, n, partial);
    if current.dim() != partial.len() {
        return Err(Error::Precondition(
            "partial basis is linearly dependent".into(),
        ));
    }
    let mut added = Vec::new();
    if current.dim() == within.dim() {
        return Ok(added);
    }
    for v in within.vectors() {
        if !current.contains(&v) {
            current = current.sum(&Subspace::span(field, n, std::slice::from_ref(&v)));
            added.push(v);
            if current.dim() == within.dim() {
                break;
            }
        }
    }
    Ok(added)
}

/// Splits `v` as `x + y` with `x ∈ a` and `y ∈ b`, where `a ⊕ b = V`.
pub fn split_direct_sum(v: &[u8], a: &Subspace, b: &Subspace) -> Result<(Row, Row)> {
    if !a.is_complement_of(b) {
        return Err(Error::Precondition(format!("{a} and {b} are not complementary")));
    }
    let field = a.field;
    let basis: Vec<Row> = a.basis.iter().chain(&b.basis).cloned().collect();
    let coords = Mat::from_rows(field, &basis)?
        .preimage(v)
        .map_err(|_| Error::Internal("direct sum does not cover the vector".into()))?;
    let mut x = vec![0u8; a.n];
    for (row, &c) in a.basis.iter().zip(&coords) {
        field.axpy(&mut x, c, row);
    }
    let y = field.sub_vec(v, &x);
    Ok((x, y))
}

/// Every complement of `u`, built by translating a fixed complement basis
/// `w_1, ..., w_{n-k}` by each tuple `(u'_1, ..., u'_{n-k})` of vectors of `u`.
pub fn enumerate_complements(u: &Subspace) -> Vec<Subspace> {
    let field = u.field;
    let n = u.n;
    let w = extend_basis(&u.basis, &Subspace::full(field, n)).expect("canonical basis is independent");
    let u_vectors: Vec<Row> = u.vectors().collect();
    let m = w.len();
    let base = u_vectors.len();
    let total = base.pow(m as u32);
    let mut out = Vec::with_capacity(total);
    for mut idx in 0..total {
        let mut rows = Vec::with_capacity(m);
        let mut picks = vec![0usize; m];
        for slot in picks.iter_mut().rev() {
            *slot = idx % base;
            idx /= base;
        }
        for (wi, &pick) in w.iter().zip(&picks) {
            rows.push(field.add_vec(wi, &u_vectors[pick]));
        }
        out.push(Subspace::span(field, n, &rows));
    }
    out
}

/// `|GL_k(p)| = prod_{i<k} (p^k - p^i)`, saturating at `u128::MAX`.
pub fn gl_order(p: u32, k: usize) -> u128 {
    let q = p as u128;
    let top = q.checked_pow(k as u32);
    (0..k as u32)
        .map(|i| match top {
            Some(t) => t - q.pow(i),
            None => u128::MAX,
        })
        .fold(1u128, u128::saturating_mul)
}

/// `p^e`, saturating at `u128::MAX`.
pub fn saturating_power(p: u32, e: usize) -> u128 {
    u32::try_from(e).map_or(u128::MAX, |e| (p as u128).saturating_pow(e))
}
