//! Isomorphisms between two instances over the same field.
//!
//! Two instances are isomorphic exactly when some linear isomorphism
//! `φ: V₁ → V₂` carries `U₁` onto `U₂`; conjugation `a ↦ φ⁻¹ a φ` then
//! transports one semigroup onto the other.

use crate::error::{Error, Result};
use crate::gf::{extend_basis, Mat, Row, Subspace};
use crate::lglu::{Element, Enumerated, Instance};

#[derive(Clone, Debug)]
pub struct IsoWitness {
    pub source: Instance,
    pub target: Instance,
    pub phi: Mat,
    pub phi_inv: Mat,
    /// Index bijection between the enumerated tables, when both were built.
    pub psi: Option<Vec<usize>>,
}

/// Returns a witness iff `dim V` and `dim U` agree.
///
/// `φ` sends an adapted basis `(w_1.., u_1..)` of `V₁` onto the adapted
/// basis of `V₂`, each complement part chosen by lexicographic extension.
pub fn decide_isomorphic(i1: &Instance, i2: &Instance) -> Result<Option<IsoWitness>> {
    if i1.p() != i2.p() {
        return Err(Error::Unsupported(format!(
            "instances over GF({}) and GF({})",
            i1.p(),
            i2.p()
        )));
    }
    if i1.n() != i2.n() || i1.r() != i2.r() {
        return Ok(None);
    }
    let adapted = |i: &Instance| -> Result<Vec<Row>> {
        let w = extend_basis(i.u().basis(), &Subspace::full(i.field(), i.n()))?;
        Ok(w.into_iter().chain(i.u().basis().iter().cloned()).collect())
    };
    let b1 = adapted(i1)?;
    let b2 = adapted(i2)?;
    let phi = Mat::from_basis_images(i1.field(), &b1, &b2)?;
    let phi_inv = phi
        .inverse()
        .ok_or_else(|| Error::Internal("φ is singular".into()))?;
    if i1.u().image_under(&phi) != *i2.u() {
        return Err(Error::Internal("φ does not carry U₁ onto U₂".into()));
    }
    Ok(Some(IsoWitness {
        source: i1.clone(),
        target: i2.clone(),
        phi,
        phi_inv,
        psi: None,
    }))
}

/// `a ↦ φ⁻¹ a φ`
pub fn transport(w: &IsoWitness, a: &Element) -> Result<Element> {
    if !w.source.is_member(a.mat()) {
        return Err(Error::Precondition(format!("{a} is not a member of the source")));
    }
    let m = &(&w.phi_inv * a.mat()) * &w.phi;
    w.target.element(m)
}

impl IsoWitness {
    /// Fills in `psi` and checks it is a bijective homomorphism on all pairs.
    pub fn attach_tables(&mut self, t1: &Enumerated, t2: &Enumerated) -> Result<()> {
        if t1.instance() != &self.source || t2.instance() != &self.target {
            return Err(Error::Precondition("tables do not match the witness".into()));
        }
        let mut psi = Vec::with_capacity(t1.len());
        for i in 0..t1.len() {
            let image = transport(self, &t1.element(i))?;
            let j = t2
                .index_of(image.mat())
                .ok_or_else(|| Error::Internal("transported element is missing".into()))?;
            psi.push(j);
        }
        let mut hit = vec![false; t2.len()];
        for &j in &psi {
            if std::mem::replace(&mut hit[j], true) {
                return Err(Error::Internal("transport is not injective".into()));
            }
        }
        if t1.len() != t2.len() {
            return Err(Error::Internal("transport is not surjective".into()));
        }
        let (s1, s2) = (t1.table(), t2.table());
        for a in 0..t1.len() {
            for b in 0..t1.len() {
                if psi[s1.mul(a, b)] != s2.mul(psi[a], psi[b]) {
                    return Err(Error::Internal(format!(
                        "transport is not multiplicative on ({a}, {b})"
                    )));
                }
            }
        }
        self.psi = Some(psi);
        Ok(())
    }
}

/// Invariants shared by isomorphic instances.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct IsoInvariants {
    pub order: usize,
    pub j_class_sizes: Vec<usize>,
    pub minimal_idempotents: usize,
}

pub fn invariants(e: &Enumerated) -> IsoInvariants {
    let j_class_sizes = (0..=e.instance().top())
        .map(|k| e.j_class(k).map(|s| s.count_ones(..)).unwrap_or(0))
        .collect();
    IsoInvariants {
        order: e.len(),
        j_class_sizes,
        minimal_idempotents: e.minimal_idempotents_char().len(),
    }
}
