//! Order-by-order extension of cohomology classes along a Beltrami series
//! and the obstructions to extending them.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cohomology::{ArtinianComplex, Cochain, CohomologyBasis, Kind};
use crate::deform::active_variables;
use crate::error::{Error, Result};
use crate::frame::{DeformedFrame, RhoConvention};
use crate::jet::{Direction, Jet, JetRing, Monomial};
use crate::linalg::Membership;
use crate::model::ComplexModel;
use crate::scalar::GaussianRational;
use crate::vform::VForm;

/// Central class of one monomial coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialClass {
    pub monomial: Monomial,
    pub coords: Vec<GaussianRational>,
}

/// Result of extending a central class along `phi`.
#[derive(Debug, Clone)]
pub struct ExtensionResult {
    pub kind: Kind,
    pub target_order: u32,
    /// Largest `k` with twisted defect zero mod `m^{k+1}`.
    pub achieved_order: u32,
    /// `alpha_0 + ... + alpha_k` over the ring of `phi`.
    pub representative: Cochain,
    /// Nonzero per-monomial classes at the first obstructed order.
    pub obstructed: Vec<MonomialClass>,
}

impl ExtensionResult {
    pub fn complete(&self) -> bool {
        self.achieved_order >= self.target_order
    }

    pub fn obstructed_order(&self) -> Option<u32> {
        (!self.complete()).then_some(self.achieved_order + 1)
    }
}

fn scaled_by_monomial(x: &Cochain, mu: &Monomial) -> Cochain {
    let ring = x.ring().clone();
    let m = Jet::monomial(&ring, mu.clone(), GaussianRational::one());
    x.map_coeffs(|c| c.mul_unchecked(&m))
}

fn phi_to_order(phi: &VForm, r: u32) -> Result<VForm> {
    let ring = phi.ring().with_order(r);
    phi.try_map_ring(&ring, |c| c.truncate(r))
}

fn cochain_to_order(x: &Cochain, r: u32) -> Result<Cochain> {
    let ring = x.ring().with_order(r);
    x.try_map_ring(&ring, |c| c.truncate(r))
}

fn require_mc(model: &ComplexModel, phi: &VForm, n: u32) -> Result<()> {
    model.check_beltrami(phi)?;
    if n > phi.ring().order() {
        return Err(Error::OrderTooLarge { requested: n, available: phi.ring().order() });
    }
    if !model.mc_defect(phi)?.drop_above(n).is_zero() {
        return Err(Error::MaurerCartanViolated(n));
    }
    Ok(())
}

/// Extends the closed constant cochain `alpha0` to a twisted-closed jet
/// cochain, one order at a time, with pivot-canonical corrections.
pub fn extend_class(model: &ComplexModel, phi: &VForm, alpha0: &Cochain, target: u32) -> Result<ExtensionResult> {
    require_mc(model, phi, target)?;
    let ring = phi.ring().clone();
    let kind = cochain_kind(model, alpha0)?;
    if alpha0.terms().iter().any(|(_, c)| c.terms().keys().any(|m| m.degree() != 0)) {
        return Err(Error::DegreeMismatch { expected: 0, found: alpha0.min_jet_degree().unwrap_or(0) as usize });
    }
    let mut alpha = alpha0.to_ring(&ring)?;
    if !model.delbar_cochain(&alpha)?.is_zero() {
        return Err(Error::NotClosed);
    }
    let here = CohomologyBasis::new(model, kind)?;
    let next = CohomologyBasis::new(model, kind.next())?;
    let mut result = ExtensionResult { kind, target_order: target, achieved_order: 0, representative: alpha.clone(), obstructed: Vec::new() };
    for k in 1..=target {
        let defect = model.twisted_delbar(phi, &alpha)?;
        if !defect.drop_above(k - 1).is_zero() {
            return Err(Error::Internal(format!("twisted defect below order {k} after extension")));
        }
        let defect = defect.jet_homogeneous(k);
        let mut correction = Cochain::zero(kind, model.dim(), &ring);
        for mu in defect.monomials() {
            let target_vec = next.vector(&defect.coefficient_of(&mu))?;
            let neg: crate::linalg::SparseVec = target_vec.into_iter().map(|(i, c)| (i, -c)).collect();
            match next.solve_incoming(&neg) {
                Membership::Solution(y) => {
                    let y = here.cochain_of(&y, &ring);
                    correction = correction.add(&scaled_by_monomial(&y, &mu))?;
                }
                Membership::Residue(_) => {
                    let coords = next.coordinates_at(&defect, &mu)?;
                    result.obstructed.push(MonomialClass { monomial: mu, coords });
                }
            }
        }
        if !result.obstructed.is_empty() {
            break;
        }
        alpha = alpha.add(&correction)?;
        result.achieved_order = k;
        result.representative = alpha.clone();
    }
    Ok(result)
}

fn cochain_kind(model: &ComplexModel, x: &Cochain) -> Result<Kind> {
    let dim = model.dim();
    let mut kinds = x.terms().into_iter().map(|((mask, _), _)| {
        let q = crate::form::anti_part(dim, mask).count_ones() as usize;
        match x {
            Cochain::Form(_) => Kind::Form { p: crate::form::holo_part(dim, mask).count_ones() as usize, q },
            Cochain::VForm(_) => Kind::Tangent { q },
        }
    });
    let Some(first) = kinds.next() else {
        return Err(Error::KindMismatch("cannot infer the degree of a zero cochain".into()));
    };
    if kinds.any(|k| k != first) {
        return Err(Error::NotHomogeneous);
    }
    Ok(first)
}

/// Which relative `del` enters the form obstruction formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelativeDel {
    /// `rho^{-1} del_t rho` for a normalization of `rho`.
    Conjugated(RhoConvention),
    /// The central `del`, applied coefficientwise.
    Central,
}

impl Default for RelativeDel {
    fn default() -> Self {
        RelativeDel::Conjugated(RhoConvention::GeneratorSubstitution)
    }
}

impl RelativeDel {
    pub fn name(self) -> &'static str {
        match self {
            RelativeDel::Conjugated(c) => c.name(),
            RelativeDel::Central => "central",
        }
    }
}

/// One obstruction computation for a direction at order `n`.
#[derive(Debug, Clone)]
pub struct ObstructionEntry {
    pub order: u32,
    pub direction: Direction,
    /// The formula-side cochain over the ring of order `n - 1`.
    pub formula: Cochain,
    /// `d_u` of the degree-`n` twisted defect, over the ring of order `n - 1`.
    pub direct: Cochain,
    /// Nonzero central classes of `direct`, per degree-`(n-1)` monomial.
    pub central: Vec<MonomialClass>,
    /// Coordinates of `direct` in the twisted cohomology of order `n - 1`.
    pub twisted_coords: Vec<GaussianRational>,
    /// Central classes all vanish.
    pub vanishes: bool,
    /// The twisted class of `direct` vanishes.
    pub twisted_vanishes: bool,
    /// The formula cochain is twisted-closed mod `m^n`.
    pub formula_closed: bool,
    /// Formula and direct cochains differ by a twisted coboundary.
    pub agreement: bool,
}

/// Computes obstructions of an extended class, caching the twisted
/// complexes between directions.
pub struct ObstructionEngine<'a> {
    model: &'a ComplexModel,
    phi: VForm,
    del: RelativeDel,
    artinian: BTreeMap<(Kind, u32, Vec<usize>), Arc<ArtinianComplex>>,
    central: BTreeMap<Kind, Arc<CohomologyBasis>>,
    frames: BTreeMap<u32, Arc<DeformedFrame<'a>>>,
}

impl<'a> ObstructionEngine<'a> {
    pub fn new(model: &'a ComplexModel, phi: &VForm, del: RelativeDel) -> Result<Self> {
        model.check_beltrami(phi)?;
        Ok(ObstructionEngine { model, phi: phi.clone(), del, artinian: BTreeMap::new(), central: BTreeMap::new(), frames: BTreeMap::new() })
    }

    pub fn relative_del(&self) -> RelativeDel {
        self.del
    }

    fn central(&mut self, kind: Kind) -> Result<Arc<CohomologyBasis>> {
        if let Some(b) = self.central.get(&kind) {
            return Ok(b.clone());
        }
        let b = Arc::new(CohomologyBasis::new(self.model, kind)?);
        self.central.insert(kind, b.clone());
        Ok(b)
    }

    fn artinian(&mut self, kind: Kind, r: u32, vars: Vec<usize>) -> Result<Arc<ArtinianComplex>> {
        let key = (kind, r, vars);
        if let Some(a) = self.artinian.get(&key) {
            return Ok(a.clone());
        }
        let phi_r = phi_to_order(&self.phi, r)?;
        let a = Arc::new(ArtinianComplex::new(self.model, &phi_r, kind, r, &key.2)?);
        self.artinian.insert(key, a.clone());
        Ok(a)
    }

    fn frame(&mut self, r: u32) -> Result<Arc<DeformedFrame<'a>>> {
        if let Some(f) = self.frames.get(&r) {
            return Ok(f.clone());
        }
        let f = Arc::new(DeformedFrame::build(self.model, &phi_to_order(&self.phi, r)?)?);
        self.frames.insert(r, f.clone());
        Ok(f)
    }

    /// The Kodaira-Spencer representative of order `n`: `d_u phi` truncated
    /// to order `n - 1`.
    pub fn kappa(&self, u: &Direction, n: u32) -> Result<VForm> {
        check_order(n, &self.phi)?;
        phi_to_order(&self.phi.derive(u)?, n - 1)
    }

    /// `d_u` of the degree-`n` twisted defect of `alpha` truncated to order
    /// `n - 1`; requires the defect to vanish below degree `n`.
    pub fn direct(&self, alpha: &Cochain, u: &Direction, n: u32) -> Result<Cochain> {
        check_order(n, &self.phi)?;
        let phi_n = phi_to_order(&self.phi, n)?;
        let alpha_n = cochain_to_order(&alpha.drop_above(n - 1), n)?;
        let defect = self.model.twisted_delbar(&phi_n, &alpha_n)?;
        if !defect.drop_above(n - 1).is_zero() {
            return Err(Error::KindMismatch(format!("class is not extended to order {}", n - 1)));
        }
        let ring_r = phi_n.ring().with_order(n - 1);
        defect.jet_homogeneous(n).try_map_ring(&ring_r, |c| c.derive(u)?.to_ring(&ring_r))
    }

    /// `del(kappa ⌞ alpha) - kappa ⌞ del alpha` with the configured relative
    /// `del`, over the ring of order `n - 1`.
    pub fn formula_form(&mut self, alpha: &Cochain, u: &Direction, n: u32) -> Result<Cochain> {
        check_order(n, &self.phi)?;
        let Cochain::Form(alpha) = alpha else {
            return Err(Error::KindMismatch("form obstruction formula needs a form class".into()));
        };
        let r = n - 1;
        let kappa = self.kappa(u, n)?;
        let alpha = cochain_to_order(&Cochain::Form(alpha.clone()), r)?;
        let alpha = alpha.as_form().expect("form");
        let frame = match self.del {
            RelativeDel::Conjugated(_) => Some(self.frame(r)?),
            RelativeDel::Central => None,
        };
        let del = |x: &crate::form::Form| -> Result<crate::form::Form> {
            match (&frame, self.del) {
                (Some(f), RelativeDel::Conjugated(c)) => f.conjugated_del_form(x, c),
                _ => Ok(self.model.del_any(x)),
            }
        };
        let a = del(&self.model.vf_contract(&kappa, alpha)?)?;
        let b = self.model.vf_contract(&kappa, &del(alpha)?)?;
        Ok(Cochain::Form(a.sub(&b)?))
    }

    /// `[kappa, alpha]` over the ring of order `n - 1`.
    pub fn formula_tangent(&self, alpha: &Cochain, u: &Direction, n: u32) -> Result<Cochain> {
        check_order(n, &self.phi)?;
        let Cochain::VForm(alpha) = alpha else {
            return Err(Error::KindMismatch("bracket obstruction formula needs a tangent class".into()));
        };
        let kappa = self.kappa(u, n)?;
        let alpha = cochain_to_order(&Cochain::VForm(alpha.clone()), n - 1)?;
        Ok(Cochain::VForm(self.model.vf_bracket(&kappa, alpha.as_vform().expect("vform"))?))
    }

    /// The obstruction to extending `ext` from order `n - 1` to `n` in
    /// direction `u`, with formula-vs-direct comparison.
    pub fn entry(&mut self, ext: &ExtensionResult, u: &Direction, n: u32) -> Result<ObstructionEntry> {
        check_order(n, &self.phi)?;
        if ext.achieved_order + 1 < n {
            return Err(Error::KindMismatch(format!(
                "class reaches order {}, obstruction at order {n} needs order {}",
                ext.achieved_order,
                n - 1
            )));
        }
        let alpha = ext.representative.drop_above(n - 1);
        let direct = self.direct(&alpha, u, n)?;
        let formula = match ext.kind {
            Kind::Form { .. } => self.formula_form(&alpha, u, n)?,
            Kind::Tangent { .. } => self.formula_tangent(&alpha, u, n)?,
        };
        let target = ext.kind.next();
        let central = self.central(target)?;
        let mut classes = Vec::new();
        for mu in direct.monomials() {
            let coords = central.coordinates_at(&direct, &mu)?;
            if coords.iter().any(|c| !c.is_zero()) {
                classes.push(MonomialClass { monomial: mu, coords });
            }
        }
        let r = n - 1;
        let phi_r = Cochain::VForm(phi_to_order(&self.phi, r)?);
        let alpha_r = cochain_to_order(&alpha, r)?;
        let vars = active_variables([&phi_r, &alpha_r, &direct, &formula]);
        let art = self.artinian(target, r, vars)?;
        let twisted_coords = art.coordinates(&direct)?;
        let formula_closed = art.is_closed(&formula)?;
        let agreement = formula_closed && art.is_exact(&formula.sub(&direct)?)?;
        Ok(ObstructionEntry {
            order: n,
            direction: u.clone(),
            vanishes: classes.is_empty(),
            twisted_vanishes: twisted_coords.iter().all(GaussianRational::is_zero),
            formula,
            direct,
            central: classes,
            twisted_coords,
            formula_closed,
            agreement,
        })
    }
}

fn check_order(n: u32, phi: &VForm) -> Result<()> {
    if n == 0 || n > phi.ring().order() {
        return Err(Error::OrderTooLarge { requested: n, available: phi.ring().order() });
    }
    Ok(())
}

/// Coordinate directions `d/dt_k` for each holomorphic parameter.
pub fn coordinate_directions(ring: &Arc<JetRing>) -> Vec<Direction> {
    (0..ring.num_params()).map(|k| Direction::coordinate(ring, k)).collect::<Result<Vec<_>>>().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iwasawa() -> ComplexModel {
        ComplexModel::from_json(
            r#"{"name":"iwasawa","dim":3,"params":["t11","t12","t21","t22","t31","t32"],"order":3,
                "structure":{"3":[{"coeff":"-1","holo":[1,2],"anti":[]}]}}"#,
        )
        .unwrap()
    }

    fn phi(m: &ComplexModel, var: &str, anti: usize, k: usize) -> VForm {
        let r = m.ring();
        VForm::from_indices(3, &r, &[anti], k).unwrap().mul_jet(&Jet::var_named(&r, var).unwrap()).unwrap()
    }

    fn omega3(m: &ComplexModel) -> Cochain {
        let r = m.ring();
        Cochain::Form(crate::form::Form::from_indices(3, &r, &[3], &[]).unwrap())
    }

    #[test]
    fn omega3_extends_along_t31() {
        let m = iwasawa();
        let ext = extend_class(&m, &phi(&m, "t31", 1, 3), &omega3(&m), 3).unwrap();
        assert!(ext.complete());
        assert_eq!(ext.representative, omega3(&m));
    }

    #[test]
    fn omega3_obstructed_along_t11() {
        let m = iwasawa();
        let p = phi(&m, "t11", 1, 1);
        let ext = extend_class(&m, &p, &omega3(&m), 3).unwrap();
        assert_eq!(ext.achieved_order, 0);
        assert_eq!(ext.obstructed.len(), 1);
        let mut eng = ObstructionEngine::new(&m, &p, RelativeDel::default()).unwrap();
        let u = Direction::named(&m.ring(), "t11").unwrap();
        let e = eng.entry(&ext, &u, 1).unwrap();
        assert!(!e.vanishes && e.agreement);
        let r0 = m.ring().with_order(0);
        // bar w1 ^ w2 = -(w2 ^ bar w1) in canonical order
        let expect = crate::form::Form::from_indices(3, &r0, &[2], &[1]).unwrap().neg();
        assert_eq!(e.formula, Cochain::Form(expect));
        let u = Direction::named(&m.ring(), "t31").unwrap();
        let e = eng.entry(&ext, &u, 1).unwrap();
        assert!(e.vanishes && e.agreement);
    }

    #[test]
    fn zero_phi_extends_trivially() {
        let m = iwasawa();
        let p = VForm::zero(3, &m.ring());
        let ext = extend_class(&m, &p, &omega3(&m), 3).unwrap();
        assert!(ext.complete());
        let mut eng = ObstructionEngine::new(&m, &p, RelativeDel::default()).unwrap();
        for u in coordinate_directions(&m.ring()) {
            let e = eng.entry(&ext, &u, 2).unwrap();
            assert!(e.direct.is_zero() && e.formula.is_zero() && e.agreement);
        }
    }

    #[test]
    fn worked_bracket_is_exact() {
        let m = iwasawa();
        let p = phi(&m, "t11", 1, 2);
        let r = m.ring();
        let alpha = Cochain::VForm(VForm::from_indices(3, &r, &[2], 1).unwrap());
        let ext = extend_class(&m, &p, &alpha, 1).unwrap();
        let mut eng = ObstructionEngine::new(&m, &p, RelativeDel::default()).unwrap();
        let u = Direction::named(&r, "t11").unwrap();
        let f = eng.formula_tangent(&alpha, &u, 1).unwrap();
        let r0 = r.with_order(0);
        let expect = VForm::from_indices(3, &r0, &[1, 2], 3).unwrap().neg();
        assert_eq!(f, Cochain::VForm(expect));
        let e = eng.entry(&ext, &u, 1).unwrap();
        assert!(e.vanishes && e.agreement);
    }
}
