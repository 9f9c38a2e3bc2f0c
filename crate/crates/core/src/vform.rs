//! Vector-valued `(0,q)`-forms: the differential graded Lie algebra that
//! carries Beltrami differentials, and the twisted differentials built from
//! a degree-one element.
//!
//! A term is `beta ^ X_k` with `beta` an antiholomorphic basis monomial
//! (stored as a [`Mask`] over the same bits as [`Form`]) and `X_k` a frame
//! vector, `k` 0-based internally.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::form::{bidegree, contract_mask, mask_display, mask_from_indices, wedge_masks, Form, Mask};
use crate::jet::{same_ring, Direction, Jet, JetRing};
use crate::model::ComplexModel;
use crate::scalar::GaussianRational;

/// All `(anti mask, k)` pairs of degree `q`, in ascending order.
pub fn vform_basis(dim: usize, q: usize) -> Vec<(Mask, usize)> {
    let mut out = Vec::new();
    for m in crate::form::masks_of_bidegree(dim, 0, q) {
        for k in 0..dim {
            out.push((m, k));
        }
    }
    out
}

#[derive(Clone)]
pub struct VForm {
    dim: usize,
    ring: Arc<JetRing>,
    terms: BTreeMap<(Mask, usize), Jet>,
}

impl PartialEq for VForm {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for VForm {}

impl VForm {
    pub fn zero(dim: usize, ring: &Arc<JetRing>) -> Self {
        VForm { dim, ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn monomial(dim: usize, mask: Mask, k: usize, coeff: Jet) -> Self {
        let mut v = VForm::zero(dim, coeff.ring());
        v.add_term(mask, k, &coeff);
        v
    }

    pub fn basis(dim: usize, ring: &Arc<JetRing>, mask: Mask, k: usize) -> Self {
        Self::monomial(dim, mask, k, Jet::one(ring))
    }

    /// `bar omega^J (x) X_k` for 1-based `J` in any order and 1-based `k`.
    pub fn from_indices(dim: usize, ring: &Arc<JetRing>, anti: &[usize], k: usize) -> Result<Self> {
        if k == 0 || k > dim {
            return Err(Error::Schema(format!("vector index {k} out of range 1..={dim}")));
        }
        Ok(match mask_from_indices(dim, &[], anti)? {
            None => VForm::zero(dim, ring),
            Some((mask, positive)) => {
                let one = Jet::one(ring);
                VForm::monomial(dim, mask, k - 1, if positive { one } else { one.neg() })
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ring(&self) -> &Arc<JetRing> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<(Mask, usize), Jet> {
        &self.terms
    }

    pub fn coeff(&self, mask: Mask, k: usize) -> Jet {
        self.terms.get(&(mask, k)).cloned().unwrap_or_else(|| Jet::zero(&self.ring))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mask: Mask, k: usize, coeff: &Jet) {
        debug_assert_eq!(bidegree(self.dim, mask).0, 0, "vector forms have no holomorphic factors");
        debug_assert!(k < self.dim);
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&(mask, k)) {
            Some(c) => {
                c.add_assign_unchecked(coeff);
                if c.is_zero() {
                    self.terms.remove(&(mask, k));
                }
            }
            None => {
                self.terms.insert((mask, k), coeff.clone());
            }
        }
    }

    fn add_signed(&mut self, mask: Mask, k: usize, coeff: Jet, positive: bool) {
        self.add_term(mask, k, &if positive { coeff } else { coeff.neg() });
    }

    pub(crate) fn check(&self, other_dim: usize, other_ring: &Arc<JetRing>) -> Result<()> {
        if self.dim != other_dim {
            return Err(Error::DimensionMismatch(self.dim, other_dim));
        }
        if !same_ring(&self.ring, other_ring) {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &VForm) -> Result<VForm> {
        self.check(other.dim, &other.ring)?;
        let mut out = self.clone();
        for ((m, k), c) in &other.terms {
            out.add_term(*m, *k, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &VForm) -> Result<VForm> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> VForm {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, s: &GaussianRational) -> VForm {
        self.map_coeffs(|c| c.scale(s))
    }

    pub fn mul_jet(&self, j: &Jet) -> Result<VForm> {
        if !same_ring(&self.ring, j.ring()) {
            return Err(Error::RingMismatch);
        }
        Ok(self.map_coeffs(|c| c.mul_unchecked(j)))
    }

    pub fn map_coeffs(&self, f: impl Fn(&Jet) -> Jet) -> VForm {
        let mut out = VForm::zero(self.dim, &self.ring);
        for ((m, k), c) in &self.terms {
            out.add_term(*m, *k, &f(c));
        }
        out
    }

    pub fn try_map_ring(&self, ring: &Arc<JetRing>, f: impl Fn(&Jet) -> Result<Jet>) -> Result<VForm> {
        let mut out = VForm::zero(self.dim, ring);
        for ((m, k), c) in &self.terms {
            out.add_term(*m, *k, &f(c)?);
        }
        Ok(out)
    }

    /// Form degree `q` if homogeneous; zero has none.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|(m, _)| m.count_ones() as usize);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    /// Coefficientwise parameter derivative.
    pub fn derive(&self, u: &Direction) -> Result<VForm> {
        self.try_map_ring(&self.ring.clone(), |c| c.derive(u))
    }

    /// Part whose coefficients are homogeneous of jet degree `d`.
    pub fn jet_homogeneous(&self, d: u32) -> VForm {
        self.map_coeffs(|c| c.homogeneous(d))
    }

    pub fn drop_above(&self, d: u32) -> VForm {
        self.map_coeffs(|c| c.drop_above(d))
    }

    /// Lowest jet degree among coefficients.
    pub fn min_jet_degree(&self) -> Option<u32> {
        self.terms.values().filter_map(Jet::min_degree).min()
    }

    pub fn max_jet_degree(&self) -> Option<u32> {
        self.terms.values().filter_map(Jet::max_degree).max()
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|((m, k), c)| format!("({})*{}@X{}", c.display(), mask_display(self.dim, *m), k + 1))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl std::fmt::Debug for VForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.display())
    }
}

impl ComplexModel {
    fn check_vform(&self, v: &VForm) -> Result<()> {
        if v.dim() != self.dim() {
            return Err(Error::DimensionMismatch(self.dim(), v.dim()));
        }
        Ok(())
    }

    /// `delbar(beta (x) X_k) = delbar beta (x) X_k + (-1)^q beta ^ delbar X_k`
    /// with `delbar X_k = sum_a bar omega^a (x) pr^{1,0}[bar X_a, X_k]`.
    pub fn vf_delbar(&self, v: &VForm) -> Result<VForm> {
        self.check_vform(v)?;
        let m = self.dim();
        let mut out = VForm::zero(m, v.ring());
        for ((mask, k), c) in v.terms() {
            let q = mask.count_ones() as usize;
            for (m2, s) in self.basis_d(*mask) {
                if bidegree(m, *m2) == (0, q + 1) {
                    out.add_term(*m2, *k, &c.scale(s));
                }
            }
            for a in 0..m {
                let Some((m2, positive)) = wedge_masks(*mask, 1 << (m + a)) else { continue };
                let positive = positive == (q % 2 == 0);
                for (j, s) in self.bracket_10(m + a, *k) {
                    out.add_signed(m2, j, c.scale(&s), positive);
                }
            }
        }
        Ok(out)
    }

    /// `del` of an antiholomorphic basis monomial, as `(mask, coeff)`.
    fn del_anti(&self, mask: Mask) -> Vec<(Mask, GaussianRational)> {
        let q = mask.count_ones() as usize;
        self.basis_d(mask).iter().filter(|(m2, _)| bidegree(self.dim(), *m2) == (1, q)).cloned().collect()
    }

    /// The bracket of vector forms,
    /// `[beta X, gamma Y] = beta^gamma [X,Y]^{1,0} + beta^(i_X del gamma) Y
    ///  - (-1)^{qr} gamma^(i_Y del beta) X`.
    pub fn vf_bracket(&self, a: &VForm, b: &VForm) -> Result<VForm> {
        self.check_vform(a)?;
        a.check(b.dim(), b.ring())?;
        let m = self.dim();
        let mut out = VForm::zero(m, a.ring());
        for ((ma, x), ca) in a.terms() {
            let q = ma.count_ones();
            let del_a = self.del_anti(*ma);
            for ((mb, y), cb) in b.terms() {
                let r = mb.count_ones();
                let c = ca.mul_unchecked(cb);
                if c.is_zero() {
                    continue;
                }
                if let Some((mab, positive)) = wedge_masks(*ma, *mb) {
                    for (z, s) in self.bracket_10(*x, *y) {
                        out.add_signed(mab, z, c.scale(&s), positive);
                    }
                }
                for (dm, s) in self.del_anti(*mb) {
                    let Some((rest, s1)) = contract_mask(*x as u32, dm) else { continue };
                    let Some((full, s2)) = wedge_masks(*ma, rest) else { continue };
                    out.add_signed(full, *y, c.scale(&s), s1 == s2);
                }
                let outer_positive = (q * r) % 2 == 1;
                for (dm, s) in &del_a {
                    let Some((rest, s1)) = contract_mask(*y as u32, *dm) else { continue };
                    let Some((full, s2)) = wedge_masks(*mb, rest) else { continue };
                    out.add_signed(full, *x, c.scale(s), (s1 == s2) == outer_positive);
                }
            }
        }
        Ok(out)
    }

    /// `(beta (x) X) ⌞ eta = beta ^ i_X eta`.
    pub fn vf_contract(&self, v: &VForm, eta: &Form) -> Result<Form> {
        self.check_vform(v)?;
        self.check_form(eta)?;
        v.check(eta.dim(), eta.ring())?;
        let mut out = Form::zero(self.dim(), v.ring());
        for ((mb, k), cb) in v.terms() {
            for (me, ce) in eta.terms() {
                let Some((rest, s1)) = contract_mask(*k as u32, *me) else { continue };
                let Some((full, s2)) = wedge_masks(*mb, rest) else { continue };
                let c = cb.mul_unchecked(ce);
                out.add_term(full, &if s1 == s2 { c } else { c.neg() });
            }
        }
        Ok(out)
    }

    /// Checks that `phi` is a degree-one vector form without constant term.
    pub fn check_beltrami(&self, phi: &VForm) -> Result<()> {
        self.check_vform(phi)?;
        for (m, _) in phi.terms().keys() {
            let q = m.count_ones() as usize;
            if q != 1 {
                return Err(Error::DegreeMismatch { expected: 1, found: q });
            }
        }
        if phi.terms().values().any(|c| !c.constant_term().is_zero()) {
            return Err(Error::NonzeroConstantTerm);
        }
        Ok(())
    }

    /// `delbar eta - phi ⌞ del eta + del(phi ⌞ eta)`, applied to each
    /// bidegree component of `eta`.
    pub fn twisted_delbar_form(&self, phi: &VForm, eta: &Form) -> Result<Form> {
        self.check_beltrami(phi)?;
        let a = self.delbar_any(eta);
        let b = self.vf_contract(phi, &self.del_any(eta))?;
        let c = self.del_any(&self.vf_contract(phi, eta)?);
        a.sub(&b)?.add(&c)
    }

    /// `delbar psi - [phi, psi]`.
    pub fn twisted_delbar_vform(&self, phi: &VForm, psi: &VForm) -> Result<VForm> {
        self.check_beltrami(phi)?;
        self.vf_delbar(psi)?.sub(&self.vf_bracket(phi, psi)?)
    }
}
