//! Beltrami differentials: the Maurer-Cartan defect, order-by-order
//! Maurer-Cartan solving and Kodaira-Spencer classes.

use std::collections::BTreeSet;

use crate::cohomology::{ArtinianComplex, Cochain, CohomologyBasis, Kind};
use crate::error::{Error, Result};
use crate::frame::{DeformedFrame, RhoConvention};
use crate::jet::{Direction, Jet, Monomial};
use crate::linalg::Membership;
use crate::model::ComplexModel;
use crate::scalar::GaussianRational;
use crate::vform::VForm;

/// A Beltrami differential with jet coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeltramiSeries {
    pub phi: VForm,
    /// Restricts coefficients to monomials in the parameters only.
    pub holomorphic: bool,
}

impl BeltramiSeries {
    pub fn new(model: &ComplexModel, phi: VForm, holomorphic: bool) -> Result<Self> {
        model.check_beltrami(&phi)?;
        if holomorphic && !phi.terms().values().all(Jet::is_holomorphic) {
            return Err(Error::Schema("holomorphic series has conjugate-parameter monomials".into()));
        }
        Ok(BeltramiSeries { phi, holomorphic })
    }

    pub fn order(&self) -> u32 {
        self.phi.ring().order()
    }
}

impl ComplexModel {
    /// `delbar phi - 1/2 [phi, phi]`.
    pub fn mc_defect(&self, phi: &VForm) -> Result<VForm> {
        let half = GaussianRational::from_ratio(1, 2);
        self.vf_delbar(phi)?.sub(&self.vf_bracket(phi, phi)?.scale(&half))
    }

    pub fn satisfies_mc(&self, phi: &VForm) -> Result<bool> {
        Ok(self.mc_defect(phi)?.is_zero())
    }
}

/// A nonzero Maurer-Cartan obstruction at one monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McObstruction {
    pub order: u32,
    pub monomial: Monomial,
    /// Coordinates in the central `H^2` of the tangent complex.
    pub coords: Vec<GaussianRational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McSolveReport {
    /// Highest order through which the series solves Maurer-Cartan.
    pub solved_order: u32,
    pub target_order: u32,
    /// Last order that contributed a nonzero correction.
    pub last_nonzero_order: u32,
    pub obstructions: Vec<McObstruction>,
}

impl McSolveReport {
    pub fn complete(&self) -> bool {
        self.obstructions.is_empty()
    }
}

/// Kuranishi recursion from a first-order term. At each order `k` the
/// correction `phi_k` solves `delbar phi_k = 1/2 sum_{i+j=k} [phi_i, phi_j]`
/// monomial by monomial with pivot-canonical preimages.
pub fn mc_solve(model: &ComplexModel, phi1: &VForm, order: u32) -> Result<(BeltramiSeries, McSolveReport)> {
    model.check_beltrami(phi1)?;
    if phi1.terms().values().any(|c| c.terms().keys().any(|m| m.degree() != 1)) {
        return Err(Error::Schema("first-order term must be linear in the parameters".into()));
    }
    if !model.vf_delbar(phi1)?.is_zero() {
        return Err(Error::NotClosed);
    }
    let holomorphic = phi1.terms().values().all(Jet::is_holomorphic);
    let ring = phi1.ring().with_order(order.max(1));
    let mut phi = phi1.try_map_ring(&ring, |c| c.to_ring(&ring))?;
    let dim = model.dim();
    let c1 = Kind::Tangent { q: 1 }.basis(dim);
    let h2 = CohomologyBasis::new(model, Kind::Tangent { q: 2 })?;
    let delbar = h2.incoming().echelon();
    let half = GaussianRational::from_ratio(1, 2);
    let mut report = McSolveReport { solved_order: order.min(1), target_order: order, last_nonzero_order: 1, obstructions: Vec::new() };
    if phi.is_zero() {
        report.last_nonzero_order = 0;
        report.solved_order = order;
        return Ok((BeltramiSeries::new(model, phi, holomorphic)?, report));
    }
    for k in 2..=order {
        let rhs = Cochain::VForm(model.vf_bracket(&phi, &phi)?.scale(&half).jet_homogeneous(k));
        let mut correction = VForm::zero(dim, &ring);
        for mu in rhs.monomials() {
            let target = h2.vector(&rhs.coefficient_of(&mu))?;
            match delbar.solve(&target) {
                Membership::Solution(x) => {
                    for (i, c) in x {
                        let (mask, vk) = c1[i];
                        correction.add_term(mask, vk, &Jet::monomial(&ring, mu.clone(), c));
                    }
                }
                Membership::Residue(_) => {
                    let coords = h2.coordinates_at(&rhs, &mu)?;
                    report.obstructions.push(McObstruction { order: k, monomial: mu, coords });
                }
            }
        }
        if !report.obstructions.is_empty() {
            break;
        }
        if !correction.is_zero() {
            report.last_nonzero_order = k;
        }
        phi = phi.add(&correction)?;
        report.solved_order = k;
    }
    let defect = model.mc_defect(&phi)?.drop_above(report.solved_order);
    if !defect.is_zero() {
        return Err(Error::Internal(format!("Maurer-Cartan solver left a defect: {defect:?}")));
    }
    Ok((BeltramiSeries::new(model, phi, holomorphic)?, report))
}

/// A Kodaira-Spencer class of a given order.
#[derive(Debug, Clone)]
pub struct KsClass {
    pub order: u32,
    pub direction: Direction,
    /// `d_u phi` truncated to order `order - 1`, in that ring.
    pub representative: VForm,
    /// Coordinates in the twisted `H^1` over the Artinian ring of order
    /// `order - 1`.
    pub twisted_coords: Vec<GaussianRational>,
    /// Coordinates of the constant part in the central `H^1(T)`.
    pub central_coords: Vec<GaussianRational>,
}

impl KsClass {
    pub fn is_zero(&self) -> bool {
        self.twisted_coords.iter().all(GaussianRational::is_zero)
    }
}

/// The active variables of a set of cochains.
pub fn active_variables<'a>(items: impl IntoIterator<Item = &'a Cochain>) -> Vec<usize> {
    let mut vars = BTreeSet::new();
    for x in items {
        vars.extend(x.variables());
    }
    vars.into_iter().collect()
}

/// The order-`m` Kodaira-Spencer class of `phi` in direction `u`.
pub fn kodaira_spencer(model: &ComplexModel, phi: &VForm, u: &Direction, m: u32) -> Result<KsClass> {
    model.check_beltrami(phi)?;
    let n = phi.ring().order();
    if m == 0 || m > n {
        return Err(Error::OrderTooLarge { requested: m, available: n });
    }
    if !model.mc_defect(phi)?.drop_above(m).is_zero() {
        return Err(Error::MaurerCartanViolated(m));
    }
    let r = m - 1;
    let ring_r = phi.ring().with_order(r);
    let phi_r = phi.try_map_ring(&ring_r, |c| c.truncate(r))?;
    let rep = phi.derive(u)?.try_map_ring(&ring_r, |c| c.truncate(r))?;
    if !model.twisted_delbar_vform(&phi_r, &rep)?.is_zero() {
        return Err(Error::Internal("Kodaira-Spencer representative is not twisted-closed".into()));
    }
    let rep_c = Cochain::VForm(rep.clone());
    let phi_c = Cochain::VForm(phi_r.clone());
    let vars = active_variables([&rep_c, &phi_c]);
    let art = ArtinianComplex::new(model, &phi_r, Kind::Tangent { q: 1 }, r, &vars)?;
    let twisted_coords = art.coordinates(&rep_c)?;
    let central = CohomologyBasis::new(model, Kind::Tangent { q: 1 })?;
    let central_coords = central.coordinates(&rep_c)?;
    Ok(KsClass { order: m, direction: u.clone(), representative: rep, twisted_coords, central_coords })
}

/// `twisted_delbar_vform(phi, d_u phi)`; zero by the Maurer-Cartan equation.
pub fn derivative_defect(model: &ComplexModel, phi: &VForm, u: &Direction) -> Result<VForm> {
    model.twisted_delbar_vform(phi, &phi.derive(u)?)
}

/// Agreement of `rho^{-1} delbar_t rho` with the twisted differentials for
/// one normalization of `rho`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConventionReport {
    pub convention: RhoConvention,
    pub order: u32,
    /// Largest `k <= order` with agreement mod `m^{k+1}` on all basis forms.
    pub forms_agreement: u32,
    pub vforms_agreement: u32,
    /// Basis elements that disagree below the requested order, with the
    /// jet degree of the first discrepancy.
    pub mismatches: Vec<(String, u32)>,
}

impl ConventionReport {
    pub fn agreement(&self) -> u32 {
        self.forms_agreement.min(self.vforms_agreement)
    }
}

/// Compares the frame-conjugated `delbar_t` with the twisted differentials
/// on every basis form and basis vector form, modulo `m^{order+1}`.
pub fn verify_conjugation_identity(
    model: &ComplexModel,
    phi: &VForm,
    order: u32,
    convention: RhoConvention,
) -> Result<ConventionReport> {
    let n = phi.ring().order();
    if order > n {
        return Err(Error::OrderTooLarge { requested: order, available: n });
    }
    if !model.mc_defect(phi)?.drop_above(order).is_zero() {
        return Err(Error::MaurerCartanViolated(order));
    }
    let frame = DeformedFrame::build(model, phi)?;
    let dim = model.dim();
    let ring = phi.ring();
    let agreement = |diff: &Cochain| -> u32 {
        match diff.drop_above(order).min_jet_degree() {
            None => order,
            Some(d) => d.saturating_sub(1),
        }
    };
    let mut report =
        ConventionReport { convention, order, forms_agreement: order, vforms_agreement: order, mismatches: Vec::new() };
    for mask in 0..model.basis_size() as u32 {
        let x = crate::form::Form::basis(dim, ring, mask);
        let lhs = frame.conjugated_delbar_form(&x, convention)?;
        let rhs = model.twisted_delbar_form(phi, &x)?;
        let a = agreement(&Cochain::Form(lhs.sub(&rhs)?));
        if a < order {
            report.mismatches.push((crate::form::mask_display(dim, mask), a + 1));
        }
        report.forms_agreement = report.forms_agreement.min(a);
    }
    for q in 0..=dim {
        for (mask, k) in crate::vform::vform_basis(dim, q) {
            let x = VForm::basis(dim, ring, mask, k);
            let lhs = frame.conjugated_delbar_vform(&x, convention)?;
            let rhs = model.twisted_delbar_vform(phi, &x)?;
            let a = agreement(&Cochain::VForm(lhs.sub(&rhs)?));
            if a < order {
                report.mismatches.push((format!("{}@X{}", crate::form::mask_display(dim, mask), k + 1), a + 1));
            }
            report.vforms_agreement = report.vforms_agreement.min(a);
        }
    }
    Ok(report)
}
