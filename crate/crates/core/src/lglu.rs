//! The semigroup of linear maps on `V = GF(p)^n` that restrict to an
//! automorphism of a fixed subspace `U`.
//!
//! Members are graded by `codim(a) = dim(Va / U)`. The constructive
//! factorizations in this module build their witnesses from adapted bases
//! (`ker a ⊕ T ⊕ U = V`, where `T` maps onto a complement of `U` in `Va`),
//! with every free basis choice made by [`extend_basis`] so that outputs are
//! reproducible.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{extend_basis, gl_order, saturating_power, split_direct_sum, Field, Mat, Row, Subspace};
use crate::semigroup::{
    rank_search_cost, ElementSet, Partition, RankSearch, SemigroupTable,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    field: Field,
    n: usize,
    u: Subspace,
}

/// A member of the semigroup together with its codimension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    mat: Mat,
    codim: usize,
}

impl Element {
    pub fn mat(&self) -> &Mat {
        &self.mat
    }

    pub fn into_mat(self) -> Mat {
        self.mat
    }

    pub fn codim(&self) -> usize {
        self.codim
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.mat.fmt(f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    L,
    R,
    H,
    D,
    J,
}

impl Relation {
    pub const ALL: [Relation; 5] = [Relation::L, Relation::R, Relation::H, Relation::D, Relation::J];

    pub fn name(self) -> &'static str {
        match self {
            Relation::L => "L",
            Relation::R => "R",
            Relation::H => "H",
            Relation::D => "D",
            Relation::J => "J",
        }
    }
}

/// Subgroups of the unit group attached to `U` and a complement `W`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubgroupKind {
    /// Units fixing `U` pointwise.
    FixU,
    /// Units fixing `W` pointwise.
    FixW(Subspace),
    /// Elements of `Fix(U)` mapping `W` onto itself.
    GW(Subspace),
    /// Elements of `Fix(U)` sending each `w ∈ W` into `w + U`.
    NW(Subspace),
}

impl SubgroupKind {
    pub fn complement(&self) -> Option<&Subspace> {
        match self {
            SubgroupKind::FixU => None,
            SubgroupKind::FixW(w) | SubgroupKind::GW(w) | SubgroupKind::NW(w) => Some(w),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SubgroupKind::FixU => "Fix(U)",
            SubgroupKind::FixW(_) => "Fix(W)",
            SubgroupKind::GW(_) => "G(W)",
            SubgroupKind::NW(_) => "N(W)",
        }
    }
}

impl Instance {
    /// `U = <e_1, ..., e_r>`.
    pub fn new(p: u32, n: usize, r: usize) -> Result<Instance> {
        let field = Field::new(p)?;
        if r >= n {
            return Err(Error::Config(format!(
                "dim U = {r} must be smaller than dim V = {n}"
            )));
        }
        Ok(Instance {
            field,
            n,
            u: Subspace::coordinate(field, n, r),
        })
    }

    /// `U` spanned by `u_rows`, which must be linearly independent.
    pub fn with_basis(p: u32, n: usize, u_rows: &[Row]) -> Result<Instance> {
        let field = Field::new(p)?;
        if let Some(row) = u_rows.iter().find(|r| r.len() != n) {
            return Err(Error::Config(format!(
                "basis row {row:?} has length {}, expected {n}",
                row.len()
            )));
        }
        if u_rows.iter().flatten().any(|&x| x >= field.p()) {
            return Err(Error::Config(format!("basis entry out of range for GF({p})")));
        }
        let u = Subspace::span(field, n, u_rows);
        if u.dim() != u_rows.len() {
            return Err(Error::Config("basis rows of U are linearly dependent".into()));
        }
        Instance::from_subspace(u)
    }

    pub fn from_subspace(u: Subspace) -> Result<Instance> {
        if u.dim() >= u.ambient_dim() {
            return Err(Error::Config(format!(
                "dim U = {} must be smaller than dim V = {}",
                u.dim(),
                u.ambient_dim()
            )));
        }
        Ok(Instance {
            field: u.field(),
            n: u.ambient_dim(),
            u,
        })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn p(&self) -> u32 {
        self.field.p() as u32
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.u.dim()
    }

    pub fn u(&self) -> &Subspace {
        &self.u
    }

    /// `dim(V/U) = n - r`, the codimension of a unit.
    pub fn top(&self) -> usize {
        self.n - self.r()
    }

    /// `|GL_r(p)| * p^(n(n-r))`. This and the other counts saturate at `u128::MAX`.
    pub fn order(&self) -> u128 {
        gl_order(self.p(), self.r()).saturating_mul(saturating_power(self.p(), self.n * self.top()))
    }

    /// `|GL_r(p)| * |GL_(n-r)(p)| * p^(r(n-r))`
    pub fn unit_order(&self) -> u128 {
        gl_order(self.p(), self.r())
            .saturating_mul(gl_order(self.p(), self.top()))
            .saturating_mul(self.complement_count())
    }

    /// `p^(r(n-r))`, the number of complements of `U`.
    pub fn complement_count(&self) -> u128 {
        saturating_power(self.p(), self.r() * self.top())
    }

    pub fn is_member(&self, m: &Mat) -> bool {
        m.field() == self.field && m.n() == self.n && self.u.image_under(m) == self.u
    }

    pub fn element(&self, m: Mat) -> Result<Element> {
        if !self.is_member(&m) {
            return Err(Error::Precondition(format!("{m} does not map U onto U")));
        }
        let codim = m.rank() - self.r();
        Ok(Element { mat: m, codim })
    }

    pub fn element_from_rows(&self, rows: &[Row]) -> Result<Element> {
        self.element(Mat::from_rows(self.field, rows)?)
    }

    pub fn identity(&self) -> Element {
        Element {
            mat: Mat::identity(self.field, self.n),
            codim: self.top(),
        }
    }

    pub fn codim(&self, a: &Element) -> usize {
        a.codim
    }

    pub fn compose(&self, a: &Element, b: &Element) -> Element {
        let mat = &a.mat * &b.mat;
        let codim = mat.rank() - self.r();
        Element { mat, codim }
    }

    pub fn is_unit(&self, a: &Element) -> bool {
        a.codim == self.top()
    }

    /// Default complement of `U`: the lexicographic extension of its basis.
    pub fn default_complement(&self) -> Subspace {
        let w = extend_basis(self.u.basis(), &Subspace::full(self.field, self.n))
            .expect("canonical basis is independent");
        Subspace::span(self.field, self.n, &w)
    }

    /// Counts members by testing all `p^(n²)` matrices, if there are at most `limit`.
    pub fn count_members_brute_force(&self, limit: u128) -> Option<u128> {
        let total = (self.p() as u128).checked_pow((self.n * self.n) as u32)?;
        if total > limit {
            return None;
        }
        let count = self
            .field
            .vectors(self.n * self.n)
            .filter(|entries| {
                let m = Mat::from_flat(self.field, self.n, entries).expect("square");
                self.is_member(&m)
            })
            .count();
        Some(count as u128)
    }

    /// All members, in increasing matrix order, with their Cayley table.
    ///
    /// Members are built directly: on the basis `(u_1..u_r, w_1..w_(n-r))`,
    /// `U` goes to `U` by an invertible matrix and each `w_j` goes anywhere.
    pub fn enumerate(&self, cap: usize) -> Result<Enumerated> {
        let predicted = self.order();
        if predicted > cap as u128 {
            return Err(Error::Capacity {
                what: "enumeration",
                needed: predicted,
                cap: cap as u128,
            });
        }
        let f = self.field;
        let r = self.r();
        let w = extend_basis(self.u.basis(), &Subspace::full(f, self.n))?;
        let basis: Vec<Row> = self.u.basis().iter().chain(&w).cloned().collect();
        let basis_inv = Mat::from_rows(f, &basis)?
            .inverse()
            .ok_or_else(|| Error::Internal("adapted basis is singular".into()))?;

        let gl_r: Vec<Vec<Row>> = f
            .vectors(r * r)
            .map(|flat| flat.chunks(r.max(1)).take(r).map(<[u8]>::to_vec).collect::<Vec<Row>>())
            .filter(|rows: &Vec<Row>| Subspace::span(f, r, rows).dim() == r)
            .collect();
        let free: Vec<Row> = f.vectors(self.n * self.top()).collect();

        let mut mats = Vec::with_capacity(predicted as usize);
        for g in &gl_r {
            let u_images: Vec<Row> = g
                .iter()
                .map(|coeffs| {
                    let mut v = vec![0u8; self.n];
                    for (c, ub) in coeffs.iter().zip(self.u.basis()) {
                        f.axpy(&mut v, *c, ub);
                    }
                    v
                })
                .collect();
            for rest in &free {
                let mut images = u_images.clone();
                images.extend(rest.chunks(self.n).map(<[u8]>::to_vec));
                let c = Mat::from_rows(f, &images)?;
                mats.push(&basis_inv * &c);
            }
        }
        mats.sort();
        Enumerated::from_members(self.clone(), mats)
    }

    /// `(ker a) ∪ (basis of U)` extended lexicographically to a basis of `V`.
    fn transversal(&self, a: &Mat) -> Result<(Vec<Row>, Vec<Row>)> {
        let ker = a.kernel().basis().to_vec();
        let mut partial = ker.clone();
        partial.extend(self.u.basis().iter().cloned());
        let t = extend_basis(&partial, &Subspace::full(self.field, self.n))?;
        Ok((ker, t))
    }

    fn complete(&self, partial: &[Row]) -> Result<Vec<Row>> {
        extend_basis(partial, &Subspace::full(self.field, self.n))
    }

    fn build(&self, basis: &[Row], images: &[Row]) -> Result<Element> {
        let m = Mat::from_basis_images(self.field, basis, images)?;
        self.element(m)
            .map_err(|e| Error::Internal(format!("constructed map is not a member: {e}")))
    }

    fn apply_all(rows: &[Row], m: &Mat) -> Vec<Row> {
        rows.iter().map(|v| m.apply(v)).collect()
    }

    fn check_member(&self, a: &Element) -> Result<()> {
        if self.is_member(&a.mat) {
            Ok(())
        } else {
            Err(Error::Precondition(format!("{a} is not a member")))
        }
    }

    /// `γ` with `Vγ = Va` and `ker γ = ker b`, so that `a L γ R b`.
    pub fn dclass_witness(&self, a: &Element, b: &Element) -> Result<Element> {
        self.check_member(a)?;
        self.check_member(b)?;
        if a.codim != b.codim {
            return Err(Error::Precondition(format!(
                "codimensions differ ({} vs {})",
                a.codim, b.codim
            )));
        }
        let (ker_b, t_b) = self.transversal(&b.mat)?;
        let (_, t_a) = self.transversal(&a.mat)?;
        let u = self.u.basis();
        let zero = vec![0u8; self.n];

        let mut domain = ker_b.clone();
        domain.extend(t_b.iter().cloned());
        domain.extend(u.iter().cloned());
        let mut images = vec![zero; ker_b.len()];
        images.extend(Self::apply_all(&t_a, &a.mat));
        images.extend(Self::apply_all(u, &a.mat));
        self.build(&domain, &images)
    }

    /// `(λ, μ)` with `a = λ b μ`; exists iff `codim(a) ≤ codim(b)`.
    pub fn factor_through(&self, a: &Element, b: &Element) -> Result<(Element, Element)> {
        self.check_member(a)?;
        self.check_member(b)?;
        if a.codim > b.codim {
            return Err(Error::Infeasible(format!(
                "codim {} exceeds codim {}, so a is not in the ideal generated by b",
                a.codim, b.codim
            )));
        }
        let u = self.u.basis();
        let zero = vec![0u8; self.n];
        let (ker_a, t_a) = self.transversal(&a.mat)?;
        let (_, t_b) = self.transversal(&b.mat)?;
        let t_b_used = &t_b[..t_a.len()];

        // λ: ker a -> 0, t_a[i] -> t_b[i], U fixed pointwise
        let mut domain = ker_a.clone();
        domain.extend(t_a.iter().cloned());
        domain.extend(u.iter().cloned());
        let mut images = vec![zero.clone(); ker_a.len()];
        images.extend(t_b_used.iter().cloned());
        images.extend(u.iter().cloned());
        let lambda = self.build(&domain, &images)?;

        // μ: t_b[i]b -> t_a[i]a, u b -> u a, a complement of those -> 0
        let tb_img = Self::apply_all(t_b_used, &b.mat);
        let ub_img = Self::apply_all(u, &b.mat);
        let mut partial = tb_img.clone();
        partial.extend(ub_img.iter().cloned());
        let rest = self.complete(&partial)?;
        let mut domain = partial;
        domain.extend(rest.iter().cloned());
        let mut images = Self::apply_all(&t_a, &a.mat);
        images.extend(Self::apply_all(u, &a.mat));
        images.extend(std::iter::repeat_n(zero, rest.len()));
        let mu = self.build(&domain, &images)?;
        Ok((lambda, mu))
    }

    /// `β` with `aβa = a` and `βaβ = β`.
    pub fn regular_witness(&self, a: &Element) -> Result<Element> {
        self.check_member(a)?;
        if self.compose(a, a) == *a {
            return Ok(a.clone());
        }
        let u = self.u.basis();
        let (_, t) = self.transversal(&a.mat)?;
        let t_img = Self::apply_all(&t, &a.mat);
        let u_img = Self::apply_all(u, &a.mat);
        let mut domain = t_img;
        domain.extend(u_img);
        let rest = self.complete(&domain)?;
        domain.extend(rest.iter().cloned());
        let mut images = t.clone();
        images.extend(u.iter().cloned());
        images.extend(std::iter::repeat_n(vec![0u8; self.n], rest.len()));
        let beta = self.build(&domain, &images)?;
        let aba = self.compose(&self.compose(a, &beta), a);
        if aba != *a {
            return Err(Error::Internal(format!("regular witness for {a} does not recompose")));
        }
        Ok(beta)
    }

    /// `(λ, μ)`, both of codimension `k + 1`, with `λμ = a` where `k = codim(a) ≤ n - r - 2`.
    pub fn raise_factor(&self, a: &Element) -> Result<(Element, Element)> {
        self.check_member(a)?;
        let k = a.codim;
        if k + 2 > self.top() {
            return Err(Error::Precondition(format!(
                "codim {k} leaves a kernel of dimension {} < 2",
                self.top() - k
            )));
        }
        let u = self.u.basis();
        let zero = vec![0u8; self.n];
        let (ker, t) = self.transversal(&a.mat)?;
        let t_img = Self::apply_all(&t, &a.mat);
        let u_img = Self::apply_all(u, &a.mat);
        let mut partial = t_img.clone();
        partial.extend(u.iter().cloned());
        let w = self.complete(&partial)?;
        debug_assert_eq!(w.len(), ker.len());

        // λ: t_i -> t_i a, first kernel vector -> w_1, other kernel vectors -> 0
        let mut domain = t.clone();
        domain.extend(ker.iter().cloned());
        domain.extend(u.iter().cloned());
        let mut images = t_img.clone();
        images.push(w[0].clone());
        images.extend(std::iter::repeat_n(zero.clone(), ker.len() - 1));
        images.extend(u_img);
        let lambda = self.build(&domain, &images)?;

        // μ: fixes t_i a and U, kills w_1 and w_3.., keeps w_2
        let mut domain = t_img.clone();
        domain.extend(w.iter().cloned());
        domain.extend(u.iter().cloned());
        let mut images = t_img;
        images.push(zero.clone());
        images.push(w[1].clone());
        images.extend(std::iter::repeat_n(zero, w.len() - 2));
        images.extend(u.iter().cloned());
        let mu = self.build(&domain, &images)?;
        Ok((lambda, mu))
    }

    /// Units `(λ, μ)` with `λ a μ = target`, both of codimension `n - r - 1`.
    pub fn sandwich_factor(&self, target: &Element, a: &Element) -> Result<(Element, Element)> {
        self.check_member(a)?;
        self.check_member(target)?;
        let want = self.top() - 1;
        if a.codim != want || target.codim != want {
            return Err(Error::Precondition(format!(
                "both elements must have codim {want} (got {} and {})",
                a.codim, target.codim
            )));
        }
        let u = self.u.basis();
        let (ker_a, t_a) = self.transversal(&a.mat)?;
        let (ker_b, t_b) = self.transversal(&target.mat)?;

        // λ: t_b[i] -> t_a[i], ker target -> ker a, U fixed
        let mut domain = t_b.clone();
        domain.extend(ker_b.iter().cloned());
        domain.extend(u.iter().cloned());
        let mut images = t_a.clone();
        images.extend(ker_a.iter().cloned());
        images.extend(u.iter().cloned());
        let lambda = self.build(&domain, &images)?;

        // μ: t_a[i]a -> t_b[i]target, w -> w', u a -> u target
        let ta_img = Self::apply_all(&t_a, &a.mat);
        let tb_img = Self::apply_all(&t_b, &target.mat);
        let mut pa = ta_img.clone();
        pa.extend(u.iter().cloned());
        let w = self.complete(&pa)?;
        let mut pb = tb_img.clone();
        pb.extend(u.iter().cloned());
        let w_prime = self.complete(&pb)?;
        let mut domain = ta_img;
        domain.extend(w);
        domain.extend(Self::apply_all(u, &a.mat));
        let mut images = tb_img;
        images.extend(w_prime);
        images.extend(Self::apply_all(u, &target.mat));
        let mu = self.build(&domain, &images)?;
        Ok((lambda, mu))
    }

    /// `a` is idempotent iff it fixes every vector of its image.
    pub fn idempotent_char(&self, a: &Element) -> bool {
        a.mat
            .image()
            .basis()
            .iter()
            .all(|v| a.mat.apply(v) == *v)
    }

    fn check_complement(&self, w: &Subspace) -> Result<()> {
        if self.r() == 0 {
            return Err(Error::Precondition(
                "unit-group decompositions need dim U >= 1".into(),
            ));
        }
        if w.field() != self.field || w.ambient_dim() != self.n || !w.is_complement_of(&self.u) {
            return Err(Error::Precondition(format!("{w} is not a complement of {}", self.u)));
        }
        Ok(())
    }

    fn fixes_pointwise(m: &Mat, s: &Subspace) -> bool {
        s.basis().iter().all(|v| m.apply(v) == *v)
    }

    /// Membership of `a` in the requested subgroup of the unit group.
    pub fn in_subgroup(&self, kind: &SubgroupKind, a: &Element) -> Result<bool> {
        if let Some(w) = kind.complement() {
            self.check_complement(w)?;
        } else if self.r() == 0 {
            return Err(Error::Precondition(
                "unit-group decompositions need dim U >= 1".into(),
            ));
        }
        if !self.is_member(&a.mat) || !self.is_unit(a) {
            return Ok(false);
        }
        let m = &a.mat;
        let fix_u = Self::fixes_pointwise(m, &self.u);
        Ok(match kind {
            SubgroupKind::FixU => fix_u,
            SubgroupKind::FixW(w) => Self::fixes_pointwise(m, w),
            SubgroupKind::GW(w) => fix_u && w.image_under(m) == *w,
            SubgroupKind::NW(w) => {
                fix_u
                    && w.basis().iter().all(|v| {
                        self.u
                            .contains(&self.field.sub_vec(&m.apply(v), v))
                    })
            }
        })
    }

    /// `a = a' a''` with `a' ∈ Fix(W)` and `a'' ∈ Fix(U)`.
    pub fn decompose_unit(&self, a: &Element, w: &Subspace) -> Result<(Element, Element)> {
        self.check_complement(w)?;
        self.check_member(a)?;
        if !self.is_unit(a) {
            return Err(Error::Precondition(format!("{a} is not invertible")));
        }
        let u = self.u.basis();
        let wb = w.basis();
        let u_img = Self::apply_all(u, &a.mat);

        let mut domain = wb.to_vec();
        domain.extend(u.iter().cloned());
        let mut images = wb.to_vec();
        images.extend(u_img.iter().cloned());
        let first = self.build(&domain, &images)?;

        let mut domain = wb.to_vec();
        domain.extend(u_img.iter().cloned());
        let mut images = Self::apply_all(wb, &a.mat);
        images.extend(u_img);
        let second = self.build(&domain, &images)?;
        Ok((first, second))
    }

    /// `a = b g` with `b ∈ G(W)` and `g ∈ N(W)`, for `a ∈ Fix(U)`.
    pub fn decompose_fix_u(&self, a: &Element, w: &Subspace) -> Result<(Element, Element)> {
        self.check_complement(w)?;
        if !self.in_subgroup(&SubgroupKind::FixU, a)? {
            return Err(Error::Precondition(format!("{a} is not in Fix(U)")));
        }
        let u = self.u.basis();
        let wb = w.basis();
        let moved = w.image_under(&a.mat);
        // w_i + u'_i: the unique vector of Wa in the coset w_i + U
        let mut translates = Vec::with_capacity(wb.len());
        for wi in wb {
            let (x, _) = split_direct_sum(wi, &moved, &self.u)?;
            translates.push(x);
        }
        let sources = translates
            .iter()
            .map(|x| a.mat.preimage(x))
            .collect::<Result<Vec<Row>>>()?;

        let mut domain = sources;
        domain.extend(u.iter().cloned());
        let mut images = wb.to_vec();
        images.extend(u.iter().cloned());
        let b = self.build(&domain, &images)?;

        let mut domain = wb.to_vec();
        domain.extend(u.iter().cloned());
        let mut images = translates;
        images.extend(u.iter().cloned());
        let g = self.build(&domain, &images)?;
        Ok((b, g))
    }

    /// Coordinates of `a` restricted to the invariant subspace `s`, as a square matrix.
    fn restriction(&self, a: &Mat, s: &Subspace) -> Result<Mat> {
        let rows = s
            .basis()
            .iter()
            .map(|v| {
                s.coordinates(&a.apply(v))
                    .ok_or_else(|| Error::Internal(format!("{s} is not invariant under {a}")))
            })
            .collect::<Result<Vec<Row>>>()?;
        Mat::from_rows(self.field, &rows)
    }

    /// The translate tuple `(u'_1, ..., u'_(n-r))` of an `N(W)` element, in `U` coordinates.
    fn translate_tuple(&self, a: &Mat, w: &Subspace) -> Result<Row> {
        let mut out = Vec::with_capacity(self.r() * self.top());
        for v in w.basis() {
            let d = self.field.sub_vec(&a.apply(v), v);
            let c = self
                .u
                .coordinates(&d)
                .ok_or_else(|| Error::Internal(format!("{a} does not translate {v:?} into U")))?;
            out.extend(c);
        }
        Ok(out)
    }
}

/// Green's relation test via images, kernels and codimension.
pub fn green_char(a: &Element, b: &Element, rel: Relation) -> bool {
    match rel {
        Relation::L => a.mat.image() == b.mat.image(),
        Relation::R => a.mat.kernel() == b.mat.kernel(),
        Relation::H => a.mat.image() == b.mat.image() && a.mat.kernel() == b.mat.kernel(),
        Relation::D | Relation::J => a.codim == b.codim,
    }
}

/// The enumerated semigroup with per-element images, kernels and codimensions.
#[derive(Clone, Debug)]
pub struct Enumerated {
    inst: Instance,
    table: SemigroupTable<Mat>,
    codim: Vec<usize>,
    image_id: Vec<usize>,
    kernel_id: Vec<usize>,
}

/// Outcome of checking a subgroup isomorphism on its full multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoCheck {
    pub domain_order: usize,
    pub codomain_order: u128,
    pub pairs_checked: usize,
}

/// Ranks computed by exhaustive search, `None` where the search was not run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RankReport {
    pub unit_group: Option<usize>,
    /// `rank(units) + 1`
    pub via_identity: Option<usize>,
    pub exhaustive: Option<usize>,
}

/// Work bound for rank searches, in subset visits times table size.
pub const DEFAULT_RANK_BUDGET: u128 = 50_000_000;

impl Enumerated {
    fn from_members(inst: Instance, mats: Vec<Mat>) -> Result<Enumerated> {
        let table = SemigroupTable::from_elements(mats, |a, b| a * b)?;
        let r = inst.r();
        let mut codim = Vec::with_capacity(table.len());
        let mut image_id = Vec::with_capacity(table.len());
        let mut kernel_id = Vec::with_capacity(table.len());
        let mut images = std::collections::HashMap::new();
        let mut kernels = std::collections::HashMap::new();
        for m in table.elements() {
            let im = m.image();
            codim.push(im.dim() - r);
            let next = images.len();
            image_id.push(*images.entry(im).or_insert(next));
            let next = kernels.len();
            kernel_id.push(*kernels.entry(m.kernel()).or_insert(next));
        }
        Ok(Enumerated {
            inst,
            table,
            codim,
            image_id,
            kernel_id,
        })
    }

    pub fn instance(&self) -> &Instance {
        &self.inst
    }

    pub fn table(&self) -> &SemigroupTable<Mat> {
        &self.table
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn element(&self, i: usize) -> Element {
        Element {
            mat: self.table.element(i).clone(),
            codim: self.codim[i],
        }
    }

    pub fn index_of(&self, m: &Mat) -> Option<usize> {
        self.table.index_of(m)
    }

    pub fn codim(&self, i: usize) -> usize {
        self.codim[i]
    }

    pub fn identity_index(&self) -> usize {
        self.table.identity().expect("identity is a member")
    }

    /// `J(k)`: members of codimension `k`, for `0 ≤ k ≤ n - r`.
    pub fn j_class(&self, k: usize) -> Result<ElementSet> {
        if k > self.inst.top() {
            return Err(Error::Precondition(format!(
                "k = {k} outside 0..={}",
                self.inst.top()
            )));
        }
        Ok(self.by_codim(|c| c == k))
    }

    /// `Q(k)`: members of codimension below `k`, for `1 ≤ k ≤ n - r`.
    pub fn q_ideal(&self, k: usize) -> Result<ElementSet> {
        if k == 0 || k > self.inst.top() {
            return Err(Error::Precondition(format!(
                "k = {k} outside 1..={}",
                self.inst.top()
            )));
        }
        Ok(self.by_codim(|c| c < k))
    }

    fn by_codim(&self, keep: impl Fn(usize) -> bool) -> ElementSet {
        let mut s = self.table.empty_set();
        for (i, &c) in self.codim.iter().enumerate() {
            if keep(c) {
                s.insert(i);
            }
        }
        s
    }

    pub fn units(&self) -> Vec<usize> {
        self.by_codim(|c| c == self.inst.top()).ones().collect()
    }

    pub fn unit_table(&self) -> Result<SemigroupTable<Mat>> {
        self.table.subtable(&self.units())
    }

    /// Green's relation test on indices.
    pub fn green_char(&self, a: usize, b: usize, rel: Relation) -> bool {
        match rel {
            Relation::L => self.image_id[a] == self.image_id[b],
            Relation::R => self.kernel_id[a] == self.kernel_id[b],
            Relation::H => {
                self.image_id[a] == self.image_id[b] && self.kernel_id[a] == self.kernel_id[b]
            }
            Relation::D | Relation::J => self.codim[a] == self.codim[b],
        }
    }

    /// The partition induced by the characterization of `rel`.
    pub fn green_char_partition(&self, rel: Relation) -> Partition {
        let n = self.len();
        match rel {
            Relation::L => Partition::from_keys(self.image_id.iter().copied()),
            Relation::R => Partition::from_keys(self.kernel_id.iter().copied()),
            Relation::H => Partition::from_keys((0..n).map(|i| (self.image_id[i], self.kernel_id[i]))),
            Relation::D | Relation::J => Partition::from_keys(self.codim.iter().copied()),
        }
    }

    /// Idempotents whose image is `U`.
    pub fn minimal_idempotents_char(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.codim[i] == 0 && self.inst.idempotent_char(&self.element(i)))
            .collect()
    }

    /// `J(n-r) ∪ {least element of J(n-r-1)}`.
    pub fn generating_set(&self) -> Vec<usize> {
        let top = self.inst.top();
        let mut gens = self.units();
        let extra = (0..self.len())
            .find(|&i| self.codim[i] + 1 == top)
            .expect("J(n-r-1) is nonempty");
        gens.push(extra);
        gens
    }

    pub fn special_subgroup(&self, kind: &SubgroupKind) -> Result<Vec<usize>> {
        let mut members = Vec::new();
        for i in self.units() {
            if self.inst.in_subgroup(kind, &self.element(i))? {
                members.push(i);
            }
        }
        let id = self.identity_index();
        if !members.contains(&id) {
            return Err(Error::Internal(format!("{} misses the identity", kind.name())));
        }
        let mut set = self.table.empty_set();
        set.extend(members.iter().copied());
        for &a in &members {
            for &b in &members {
                if !set.contains(self.table.mul(a, b)) {
                    return Err(Error::Internal(format!("{} is not closed", kind.name())));
                }
            }
        }
        Ok(members)
    }

    /// Builds the isomorphism attached to `kind` and checks it on every pair.
    ///
    /// `Fix(W) → GL(U)` and `G(W) → GL(W)` restrict; `N(W) → U^(n-r)` reads off
    /// the translate tuple and must turn products into sums.
    pub fn subgroup_iso_check(&self, kind: &SubgroupKind) -> Result<IsoCheck> {
        let members = self.special_subgroup(kind)?;
        let inst = &self.inst;
        let p = inst.p();
        let f = inst.field;
        let fail = |what: String| Error::Internal(format!("{}: {what}", kind.name()));
        match kind {
            SubgroupKind::FixU => Err(Error::Precondition(
                "no isomorphism is attached to Fix(U)".into(),
            )),
            SubgroupKind::FixW(_) | SubgroupKind::GW(_) => {
                let (space, dim) = match kind {
                    SubgroupKind::FixW(_) => (inst.u.clone(), inst.r()),
                    SubgroupKind::GW(w) => (w.clone(), inst.top()),
                    _ => unreachable!(),
                };
                let images = members
                    .iter()
                    .map(|&i| inst.restriction(self.table.element(i), &space))
                    .collect::<Result<Vec<Mat>>>()?;
                if images.iter().any(|m| !m.is_invertible()) {
                    return Err(fail("restriction is not invertible".into()));
                }
                let distinct: std::collections::HashSet<&Mat> = images.iter().collect();
                let codomain_order = gl_order(p, dim);
                if distinct.len() != members.len() || distinct.len() as u128 != codomain_order {
                    return Err(fail(format!(
                        "{} elements map onto {} of {codomain_order} matrices",
                        members.len(),
                        distinct.len()
                    )));
                }
                let pos: std::collections::HashMap<usize, usize> =
                    members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
                for (x, &a) in members.iter().enumerate() {
                    for (y, &b) in members.iter().enumerate() {
                        let ab = pos[&self.table.mul(a, b)];
                        if images[ab] != &images[x] * &images[y] {
                            return Err(fail("restriction is not multiplicative".into()));
                        }
                    }
                }
                Ok(IsoCheck {
                    domain_order: members.len(),
                    codomain_order,
                    pairs_checked: members.len() * members.len(),
                })
            }
            SubgroupKind::NW(w) => {
                let tuples = members
                    .iter()
                    .map(|&i| inst.translate_tuple(self.table.element(i), w))
                    .collect::<Result<Vec<Row>>>()?;
                let distinct: std::collections::HashSet<&Row> = tuples.iter().collect();
                let codomain_order = inst.complement_count();
                if distinct.len() != members.len() || distinct.len() as u128 != codomain_order {
                    return Err(fail("translate tuples are not a bijection".into()));
                }
                let pos: std::collections::HashMap<usize, usize> =
                    members.iter().enumerate().map(|(k, &i)| (i, k)).collect();
                for (x, &a) in members.iter().enumerate() {
                    for (y, &b) in members.iter().enumerate() {
                        let ab = pos[&self.table.mul(a, b)];
                        if tuples[ab] != f.add_vec(&tuples[x], &tuples[y]) {
                            return Err(fail("translate tuples are not additive".into()));
                        }
                    }
                }
                Ok(IsoCheck {
                    domain_order: members.len(),
                    codomain_order,
                    pairs_checked: members.len() * members.len(),
                })
            }
        }
    }

    /// `rank(units)` by search, plus the full-semigroup rank when affordable.
    pub fn rank_value(&self, cap: usize, budget: u128) -> Result<RankReport> {
        let mut report = RankReport::default();
        let units = self.unit_table()?;
        let all_units: Vec<usize> = (0..units.len()).collect();
        if rank_search_cost(units.len(), cap) * units.len() as u128 <= budget {
            if let RankSearch::Found { size, .. } = crate::semigroup::rank_search(&units, &all_units, cap) {
                report.unit_group = Some(size);
                report.via_identity = Some(size + 1);
            }
        }
        let all: Vec<usize> = (0..self.len()).collect();
        let full_cap = cap + 1;
        if rank_search_cost(self.len(), full_cap) * self.len() as u128 <= budget {
            if let RankSearch::Found { size, .. } =
                crate::semigroup::rank_search(&self.table, &all, full_cap)
            {
                report.exhaustive = Some(size);
            }
        }
        Ok(report)
    }
}

/// Which of the two non-normality counterexamples to rebuild.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NonNormalCase {
    /// `n = 3, r = 2`: `Fix(W)` is not normal in the unit group.
    FixWInUnits,
    /// `n = 3, r = 1`: `G(W)` is not normal in `Fix(U)`.
    GWInFixU,
}

#[derive(Clone, Debug)]
pub struct NonNormalityReport {
    pub case: NonNormalCase,
    pub p: u32,
    pub alpha: Mat,
    pub beta: Mat,
    /// `α β α⁻¹`
    pub conjugate: Mat,
    pub w: Subspace,
    pub conjugated_w: Subspace,
    pub w_images: Vec<Row>,
    pub expected_w_images: Vec<Row>,
    pub conjugate_in_subgroup: bool,
}

impl NonNormalityReport {
    pub fn reproduced(&self) -> bool {
        self.w_images == self.expected_w_images
            && self.conjugated_w != self.w
            && !self.conjugate_in_subgroup
    }
}

/// Rebuilds a counterexample to normality over GF(p), with `u_i = e_i` and
/// the complement spanned by the remaining standard vectors.
pub fn nonnormality_example(p: u32, case: NonNormalCase) -> Result<NonNormalityReport> {
    let r = match case {
        NonNormalCase::FixWInUnits => 2,
        NonNormalCase::GWInFixU => 1,
    };
    let inst = Instance::new(p, 3, r)?;
    let f = inst.field;
    let e = |i: usize| f.unit_vector(3, i);
    let add = |a: &Row, b: &Row| f.add_vec(a, b);
    let sub = |a: &Row, b: &Row| f.sub_vec(a, b);
    let w = inst.default_complement();
    let basis = [e(0), e(1), e(2)];

    let (alpha_img, beta_img, expected, kind, outer) = match case {
        NonNormalCase::FixWInUnits => {
            let (u1, u2, w0) = (e(0), e(1), e(2));
            // α: w -> w + u1; β: u1 <-> u2
            let alpha = vec![u1.clone(), u2.clone(), add(&w0, &u1)];
            let beta = vec![u2.clone(), u1.clone(), w0.clone()];
            let expected = vec![add(&sub(&w0, &u1), &u2)];
            (alpha, beta, expected, SubgroupKind::FixW(w.clone()), None)
        }
        NonNormalCase::GWInFixU => {
            let (u, w1, w2) = (e(0), e(1), e(2));
            // α: w1 -> w1 + u; β: w1 <-> w2
            let alpha = vec![u.clone(), add(&w1, &u), w2.clone()];
            let beta = vec![u.clone(), w2.clone(), w1.clone()];
            let expected = vec![add(&w2, &u), sub(&w1, &u)];
            (alpha, beta, expected, SubgroupKind::GW(w.clone()), Some(SubgroupKind::FixU))
        }
    };
    let alpha = inst.element(Mat::from_basis_images(f, &basis, &alpha_img)?)?;
    let beta = inst.element(Mat::from_basis_images(f, &basis, &beta_img)?)?;
    let outer_ok = match &outer {
        Some(k) => inst.in_subgroup(k, &alpha)?,
        None => inst.is_unit(&alpha),
    };
    if !outer_ok || !inst.in_subgroup(&kind, &beta)? {
        return Err(Error::Internal("counterexample maps are not in the stated groups".into()));
    }
    let alpha_inv = inst.element(
        alpha
            .mat()
            .inverse()
            .ok_or_else(|| Error::Internal("α is singular".into()))?,
    )?;
    let conj = inst.compose(&inst.compose(&alpha, &beta), &alpha_inv);
    let w_images: Vec<Row> = w.basis().iter().map(|v| conj.mat().apply(v)).collect();
    let conjugated_w = w.image_under(conj.mat());
    let conjugate_in_subgroup = inst.in_subgroup(&kind, &conj)?;
    Ok(NonNormalityReport {
        case,
        p,
        alpha: alpha.into_mat(),
        beta: beta.into_mat(),
        conjugate: conj.into_mat(),
        w,
        conjugated_w,
        w_images,
        expected_w_images: expected,
        conjugate_in_subgroup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(p: u32, n: usize, r: usize) -> Instance {
        Instance::new(p, n, r).unwrap()
    }

    fn el(i: &Instance, rows: &[&[u8]]) -> Element {
        let rows: Vec<Row> = rows.iter().map(|r| r.to_vec()).collect();
        i.element_from_rows(&rows).unwrap()
    }

    #[test]
    fn instance_validation() {
        assert!(matches!(Instance::new(2, 2, 2), Err(Error::Config(_))));
        assert!(matches!(Instance::new(6, 2, 1), Err(Error::Config(_))));
        assert!(Instance::with_basis(2, 3, &[vec![1, 1, 0], vec![1, 1, 0]]).is_err());
        let i = Instance::with_basis(2, 3, &[vec![1, 1, 0]]).unwrap();
        assert_eq!(i.r(), 1);
    }

    #[test]
    fn membership_examples() {
        let i = inst(2, 2, 1);
        assert!(i.is_member(&Mat::identity(i.field(), 2)));
        let m = Mat::from_rows(i.field(), &[vec![1, 0], vec![1, 1]]).unwrap();
        assert!(i.is_member(&m));
        let m = Mat::from_rows(i.field(), &[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(!i.is_member(&m));
        assert!(!i.is_member(&Mat::zero(i.field(), 2)));
    }

    #[test]
    fn codim_examples() {
        let i = inst(2, 3, 1);
        assert_eq!(i.identity().codim(), 2);
        let a = el(&i, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 0]]);
        assert_eq!(a.codim(), 1);
    }

    #[test]
    fn r_zero_is_all_of_l_v() {
        let i = inst(2, 2, 0);
        assert_eq!(i.order(), 16);
        assert_eq!(i.enumerate(100).unwrap().len(), 16);
    }

    #[test]
    fn enumeration_cap() {
        let i = inst(2, 5, 1);
        match i.enumerate(4096) {
            Err(Error::Capacity { needed, .. }) => assert_eq!(needed, 1 << 20),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn j_classes_of_221() {
        let e = inst(2, 2, 1).enumerate(100).unwrap();
        assert_eq!(e.j_class(0).unwrap().count_ones(..), 2);
        assert_eq!(e.j_class(1).unwrap().count_ones(..), 2);
        assert_eq!(e.q_ideal(1).unwrap(), e.j_class(0).unwrap());
        assert!(e.j_class(2).is_err());
        assert!(e.q_ideal(0).is_err());
        assert!(e.q_ideal(2).is_err());
    }

    #[test]
    fn green_char_examples() {
        let i = inst(2, 2, 1);
        let a = el(&i, &[&[1, 0], &[0, 0]]);
        let b = el(&i, &[&[1, 0], &[1, 0]]);
        assert!(green_char(&a, &b, Relation::L));
        assert!(!green_char(&a, &b, Relation::R));
        assert!(green_char(&a, &b, Relation::D));
        for rel in Relation::ALL {
            assert!(green_char(&a, &a, rel));
        }
    }

    #[test]
    fn dclass_witness_221() {
        let i = inst(2, 2, 1);
        let a = el(&i, &[&[1, 0], &[0, 0]]);
        let b = el(&i, &[&[1, 0], &[1, 0]]);
        let g = i.dclass_witness(&a, &b).unwrap();
        assert_eq!(g, b);
        assert_eq!(i.dclass_witness(&a, &a).unwrap(), a);
        assert!(matches!(
            i.dclass_witness(&a, &i.identity()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn factor_through_221() {
        let i = inst(2, 2, 1);
        let a = el(&i, &[&[1, 0], &[0, 0]]);
        let id = i.identity();
        let (l, m) = i.factor_through(&a, &id).unwrap();
        assert_eq!(i.compose(&i.compose(&l, &id), &m), a);
        assert!(matches!(i.factor_through(&id, &a), Err(Error::Infeasible(_))));
    }

    #[test]
    fn regular_witness_special_cases() {
        let i = inst(2, 2, 1);
        let unit = el(&i, &[&[1, 0], &[1, 1]]);
        let b = i.regular_witness(&unit).unwrap();
        assert_eq!(b.mat(), &unit.mat().inverse().unwrap());
        let idem = el(&i, &[&[1, 0], &[1, 0]]);
        assert_eq!(i.regular_witness(&idem).unwrap(), idem);
    }

    #[test]
    fn raise_factor_preconditions() {
        let i = inst(2, 2, 1);
        let a = el(&i, &[&[1, 0], &[0, 0]]);
        assert!(matches!(i.raise_factor(&a), Err(Error::Precondition(_))));
        let i = inst(2, 3, 1);
        let a = el(&i, &[&[1, 0, 0], &[0, 0, 0], &[0, 0, 0]]);
        let (l, m) = i.raise_factor(&a).unwrap();
        assert_eq!((l.codim(), m.codim()), (1, 1));
        assert_eq!(i.compose(&l, &m), a);
    }

    #[test]
    fn sandwich_factor_221() {
        let i = inst(2, 2, 1);
        let a = el(&i, &[&[1, 0], &[0, 0]]);
        let b = el(&i, &[&[1, 0], &[1, 0]]);
        let (l, m) = i.sandwich_factor(&b, &a).unwrap();
        assert!(i.is_unit(&l) && i.is_unit(&m));
        assert_eq!(i.compose(&i.compose(&l, &a), &m), b);
        assert!(i.sandwich_factor(&b, &i.identity()).is_err());
    }

    #[test]
    fn idempotent_char_examples() {
        let i = inst(2, 2, 1);
        assert!(i.idempotent_char(&i.identity()));
        assert!(i.idempotent_char(&el(&i, &[&[1, 0], &[1, 0]])));
        assert!(!i.idempotent_char(&el(&i, &[&[1, 0], &[1, 1]])));
    }

    #[test]
    fn special_subgroups_221() {
        let i = inst(2, 2, 1);
        let e = i.enumerate(100).unwrap();
        let w = Subspace::span(i.field(), 2, &[vec![0u8, 1]]);
        let fix_w = e.special_subgroup(&SubgroupKind::FixW(w.clone())).unwrap();
        assert_eq!(fix_w, vec![e.identity_index()]);
        let nw = e.special_subgroup(&SubgroupKind::NW(w.clone())).unwrap();
        let shear = Mat::from_rows(i.field(), &[vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(nw.len(), 2);
        assert!(nw.contains(&e.index_of(&shear).unwrap()));
        let not_complement = i.u().clone();
        assert!(e.special_subgroup(&SubgroupKind::GW(not_complement)).is_err());
    }

    #[test]
    fn decompose_fix_u_221() {
        let i = inst(2, 2, 1);
        let w = Subspace::span(i.field(), 2, &[vec![0u8, 1]]);
        let a = el(&i, &[&[1, 0], &[1, 1]]);
        let (b, g) = i.decompose_fix_u(&a, &w).unwrap();
        assert_eq!(b, i.identity());
        assert_eq!(g, a);
        let (b, g) = i.decompose_fix_u(&i.identity(), &w).unwrap();
        assert_eq!((b, g), (i.identity(), i.identity()));
    }

    #[test]
    fn decompose_unit_232() {
        let i = inst(2, 3, 2);
        let w = Subspace::span(i.field(), 3, &[vec![0u8, 0, 1]]);
        // u1 -> u2, u2 -> u1, e3 -> e3 + u1
        let a = el(&i, &[&[0, 1, 0], &[1, 0, 0], &[1, 0, 1]]);
        let (first, second) = i.decompose_unit(&a, &w).unwrap();
        assert_eq!(first.mat().rows(), vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]);
        assert!(i.in_subgroup(&SubgroupKind::FixW(w.clone()), &first).unwrap());
        assert!(i.in_subgroup(&SubgroupKind::FixU, &second).unwrap());
        assert_eq!(i.compose(&first, &second), a);
        let inv = i.element(first.mat().inverse().unwrap()).unwrap();
        assert_eq!(i.compose(&inv, &a), second);
        let (x, y) = i.decompose_unit(&i.identity(), &w).unwrap();
        assert_eq!((x, y), (i.identity(), i.identity()));
    }

    #[test]
    fn subgroup_machinery_rejects_r_zero() {
        let i = inst(2, 2, 0);
        let w = Subspace::full(i.field(), 2);
        assert!(matches!(
            i.decompose_unit(&i.identity(), &w),
            Err(Error::Precondition(_))
        ));
        assert!(i.in_subgroup(&SubgroupKind::FixU, &i.identity()).is_err());
    }

    #[test]
    fn nonnormality_gf3() {
        let rep = nonnormality_example(3, NonNormalCase::FixWInUnits).unwrap();
        assert_eq!(rep.w_images, vec![vec![2, 1, 1]]);
        assert!(rep.reproduced());
        let rep = nonnormality_example(3, NonNormalCase::GWInFixU).unwrap();
        assert_eq!(rep.w_images, vec![vec![1, 0, 1], vec![2, 1, 0]]);
        assert!(rep.reproduced());
    }

    #[test]
    fn nonnormality_gf2() {
        let rep = nonnormality_example(2, NonNormalCase::FixWInUnits).unwrap();
        assert_eq!(rep.w_images, vec![vec![1, 1, 1]]);
        assert!(rep.reproduced());
        assert!(nonnormality_example(2, NonNormalCase::GWInFixU).unwrap().reproduced());
    }
}
