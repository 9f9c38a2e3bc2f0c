//! Invariant differential forms with jet coefficients.
//!
//! A basis monomial over `m` holomorphic generators is a bitmask over `2m`
//! generators: bit `g < m` is `omega^{g+1}`, bit `m + j` is `bar omega^{j+1}`.
//! The canonical spelling of a monomial wedges its generators in ascending
//! bit order, so holomorphic factors come first, each block ascending.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{same_ring, Jet, JetRing};
use crate::scalar::GaussianRational;

pub type Mask = u32;

/// Sign and product of two basis monomials, `None` if they share a factor.
pub fn wedge_masks(a: Mask, b: Mask) -> Option<(Mask, bool)> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let y = rest.trailing_zeros();
        swaps += (a >> y).count_ones();
        rest &= rest - 1;
    }
    Some((a | b, swaps % 2 == 0))
}

/// Interior product of the basis vector dual to generator `g` with a basis
/// monomial: `(mask without g, sign)`.
pub fn contract_mask(g: u32, mask: Mask) -> Option<(Mask, bool)> {
    if mask & (1 << g) == 0 {
        return None;
    }
    let before = (mask & ((1 << g) - 1)).count_ones();
    Some((mask & !(1 << g), before % 2 == 0))
}

pub fn holo_part(dim: usize, mask: Mask) -> Mask {
    mask & ((1 << dim) - 1)
}

pub fn anti_part(dim: usize, mask: Mask) -> Mask {
    mask >> dim
}

/// Bidegree `(p, q)` of a basis monomial.
pub fn bidegree(dim: usize, mask: Mask) -> (usize, usize) {
    (holo_part(dim, mask).count_ones() as usize, anti_part(dim, mask).count_ones() as usize)
}

/// Builds the mask of `omega^I ^ bar omega^J` from 1-based index lists in
/// any order, with the sign of sorting them. `None` on a repeated index.
pub fn mask_from_indices(dim: usize, holo: &[usize], anti: &[usize]) -> Result<Option<(Mask, bool)>> {
    let mut mask = 0;
    let mut positive = true;
    for (&i, is_anti) in holo.iter().map(|i| (i, false)).chain(anti.iter().map(|i| (i, true))) {
        if i == 0 || i > dim {
            return Err(Error::Schema(format!("form index {i} out of range 1..={dim}")));
        }
        let g = if is_anti { dim + i - 1 } else { i - 1 };
        match wedge_masks(mask, 1 << g) {
            None => return Ok(None),
            Some((m, s)) => {
                mask = m;
                positive ^= !s;
            }
        }
    }
    Ok(Some((mask, positive)))
}

/// 1-based holomorphic and antiholomorphic index lists of a mask.
pub fn mask_indices(dim: usize, mask: Mask) -> (Vec<usize>, Vec<usize>) {
    let holo = (0..dim).filter(|g| mask & (1 << g) != 0).map(|g| g + 1).collect();
    let anti = (0..dim).filter(|j| mask & (1 << (dim + j)) != 0).map(|j| j + 1).collect();
    (holo, anti)
}

/// All masks of bidegree `(p, q)` in ascending order.
pub fn masks_of_bidegree(dim: usize, p: usize, q: usize) -> Vec<Mask> {
    (0..(1u32 << (2 * dim))).filter(|&m| bidegree(dim, m) == (p, q)).collect()
}

/// Human-readable spelling such as `w1^w2^~w3`.
pub fn mask_display(dim: usize, mask: Mask) -> String {
    if mask == 0 {
        return "1".into();
    }
    let (holo, anti) = mask_indices(dim, mask);
    holo.iter()
        .map(|i| format!("w{i}"))
        .chain(anti.iter().map(|j| format!("~w{j}")))
        .collect::<Vec<_>>()
        .join("^")
}

#[derive(Clone)]
pub struct Form {
    dim: usize,
    ring: Arc<JetRing>,
    terms: BTreeMap<Mask, Jet>,
}

impl PartialEq for Form {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Form {}

impl Form {
    pub fn zero(dim: usize, ring: &Arc<JetRing>) -> Self {
        Form { dim, ring: ring.clone(), terms: BTreeMap::new() }
    }

    /// The basis monomial with coefficient one.
    pub fn basis(dim: usize, ring: &Arc<JetRing>, mask: Mask) -> Self {
        Self::monomial(dim, mask, Jet::one(ring))
    }

    pub fn monomial(dim: usize, mask: Mask, coeff: Jet) -> Self {
        let mut f = Form::zero(dim, coeff.ring());
        f.add_term(mask, &coeff);
        f
    }

    /// `omega^I ^ bar omega^J` for 1-based index lists.
    pub fn from_indices(dim: usize, ring: &Arc<JetRing>, holo: &[usize], anti: &[usize]) -> Result<Self> {
        Ok(match mask_from_indices(dim, holo, anti)? {
            None => Form::zero(dim, ring),
            Some((mask, positive)) => {
                let one = Jet::one(ring);
                Form::monomial(dim, mask, if positive { one } else { one.neg() })
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ring(&self) -> &Arc<JetRing> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Mask, Jet> {
        &self.terms
    }

    pub fn coeff(&self, mask: Mask) -> Jet {
        self.terms.get(&mask).cloned().unwrap_or_else(|| Jet::zero(&self.ring))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, mask: Mask, coeff: &Jet) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&mask) {
            Some(c) => {
                c.add_assign_unchecked(coeff);
                if c.is_zero() {
                    self.terms.remove(&mask);
                }
            }
            None => {
                self.terms.insert(mask, coeff.clone());
            }
        }
    }

    /// Adds `s * coeff` on a basis monomial for a scalar `s`.
    pub(crate) fn add_scaled_term(&mut self, mask: Mask, coeff: &Jet, s: &GaussianRational) {
        if !s.is_zero() {
            self.add_term(mask, &coeff.scale(s));
        }
    }

    pub(crate) fn check(&self, other: &Form) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        if !same_ring(&self.ring, &other.ring) {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Form {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, s: &GaussianRational) -> Form {
        self.map_coeffs(|c| c.scale(s))
    }

    pub fn mul_jet(&self, j: &Jet) -> Result<Form> {
        if !same_ring(&self.ring, j.ring()) {
            return Err(Error::RingMismatch);
        }
        Ok(self.map_coeffs(|c| c.mul_unchecked(j)))
    }

    /// Applies a coefficientwise map that stays in the same ring.
    pub fn map_coeffs(&self, f: impl Fn(&Jet) -> Jet) -> Form {
        let mut out = Form::zero(self.dim, &self.ring);
        for (m, c) in &self.terms {
            out.add_term(*m, &f(c));
        }
        out
    }

    /// Applies a coefficientwise map into another ring.
    pub fn try_map_ring(&self, ring: &Arc<JetRing>, f: impl Fn(&Jet) -> Result<Jet>) -> Result<Form> {
        let mut out = Form::zero(self.dim, ring);
        for (m, c) in &self.terms {
            out.add_term(*m, &f(c)?);
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.check(other)?;
        let mut out = Form::zero(self.dim, &self.ring);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                if let Some((m, positive)) = wedge_masks(*a, *b) {
                    let c = ca.mul_unchecked(cb);
                    out.add_term(m, &if positive { c } else { c.neg() });
                }
            }
        }
        Ok(out)
    }

    /// `Some((p, q))` if every term has that bidegree; zero has none.
    pub fn bidegree(&self) -> Option<(usize, usize)> {
        let mut it = self.terms.keys().map(|&m| bidegree(self.dim, m));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// Total degree if homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.count_ones() as usize);
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    pub fn project(&self, p: usize, q: usize) -> Form {
        Form {
            dim: self.dim,
            ring: self.ring.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| bidegree(self.dim, **m) == (p, q))
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Complex conjugation: swaps holomorphic and antiholomorphic factors
    /// and conjugates coefficients.
    pub fn conj(&self) -> Form {
        let mut out = Form::zero(self.dim, &self.ring);
        for (m, c) in &self.terms {
            let (h, a) = (holo_part(self.dim, *m), anti_part(self.dim, *m));
            let swapped = a | (h << self.dim);
            // reordering bar(omega^I) ^ bar(bar omega^J) = omega^J ^ bar omega^I
            let sign = (h.count_ones() * a.count_ones()) % 2 == 0;
            let cj = c.conj();
            out.add_term(swapped, &if sign { cj } else { cj.neg() });
        }
        out
    }

    /// Interior product with the holomorphic frame vector `X_k` (1-based).
    pub fn contract(&self, k: usize) -> Form {
        let mut out = Form::zero(self.dim, &self.ring);
        for (m, c) in &self.terms {
            if let Some((rest, positive)) = contract_mask((k - 1) as u32, *m) {
                out.add_term(rest, &if positive { c.clone() } else { c.neg() });
            }
        }
        out
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(m, c)| format!("({})*{}", c.display(), mask_display(self.dim, *m)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl std::fmt::Debug for Form {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.display())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring() -> Arc<JetRing> {
        JetRing::new(["t1"], 2).unwrap()
    }

    fn w(holo: &[usize], anti: &[usize]) -> Form {
        Form::from_indices(3, &ring(), holo, anti).unwrap()
    }

    #[test]
    fn wedge_examples() {
        assert_eq!(w(&[1], &[]).wedge(&w(&[2], &[])).unwrap(), w(&[2], &[]).wedge(&w(&[1], &[])).unwrap().neg());
        assert!(w(&[1], &[]).wedge(&w(&[1], &[])).unwrap().is_zero());
        let r = ring();
        let t1 = Jet::var(&r, 0);
        let lhs = w(&[], &[1]).mul_jet(&t1).unwrap().wedge(&w(&[2], &[])).unwrap();
        assert_eq!(lhs, w(&[2], &[1]).mul_jet(&t1).unwrap().neg());
    }

    #[test]
    fn index_construction_sorts_with_sign() {
        assert_eq!(w(&[2, 1], &[]), w(&[1, 2], &[]).neg());
        assert!(w(&[1, 1], &[]).is_zero());
        assert!(Form::from_indices(3, &ring(), &[4], &[]).is_err());
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(w(&[1], &[]).conj(), w(&[], &[1]));
        let i = GaussianRational::i();
        let a = w(&[1], &[2]).scale(&i);
        // conj(i w1 ^ ~w2) = -i ~w1 ^ w2 = i w2 ^ ~w1
        assert_eq!(a.conj(), w(&[2], &[1]).scale(&i));
    }

    #[test]
    fn contraction_examples() {
        assert_eq!(w(&[1, 2], &[]).contract(1), w(&[2], &[]));
        assert!(w(&[1, 2], &[]).contract(3).is_zero());
        assert!(w(&[2], &[1]).contract(1).is_zero());
        // ~w3 ^ w1 = -w1 ^ ~w3, so i_X1 gives -~w3
        let f = w(&[], &[3]).wedge(&w(&[1], &[])).unwrap();
        assert_eq!(f.contract(1), w(&[], &[3]).neg());
    }

    fn arb_form() -> impl Strategy<Value = Form> {
        proptest::collection::vec((0u32..64, -3i64..4, -2i64..3), 0..5).prop_map(|terms| {
            let r = ring();
            let mut f = Form::zero(3, &r);
            for (m, a, b) in terms {
                let c = Jet::constant(&r, GaussianRational::from_parts((a, 1), (b, 1)));
                let c = if a > 0 { c.mul_unchecked(&Jet::var(&r, 0)) } else { c };
                f.add_term(m, &c);
            }
            f
        })
    }

    proptest! {
        #[test]
        fn conj_is_involutive(f in arb_form()) {
            prop_assert_eq!(f.conj().conj(), f);
        }

        #[test]
        fn conj_is_multiplicative(a in arb_form(), b in arb_form()) {
            prop_assert_eq!(a.wedge(&b).unwrap().conj(), a.conj().wedge(&b.conj()).unwrap());
        }

        #[test]
        fn contraction_is_odd_derivation(m1 in 0u32..64, m2 in 0u32..64, k in 1usize..4) {
            let r = ring();
            let (a, b) = (Form::basis(3, &r, m1), Form::basis(3, &r, m2));
            let lhs = a.wedge(&b).unwrap().contract(k);
            let sign = if m1.count_ones() % 2 == 0 { GaussianRational::one() } else { -GaussianRational::one() };
            let rhs = a.contract(k).wedge(&b).unwrap().add(&a.wedge(&b.contract(k)).unwrap().scale(&sign)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn wedge_is_graded_commutative(m1 in 0u32..64, m2 in 0u32..64) {
            let r = ring();
            let (a, b) = (Form::basis(3, &r, m1), Form::basis(3, &r, m2));
            let odd = (m1.count_ones() * m2.count_ones()) % 2 == 1;
            let ba = b.wedge(&a).unwrap();
            prop_assert_eq!(a.wedge(&b).unwrap(), if odd { ba.neg() } else { ba });
        }
    }
}
