//! JSON term encodings for forms, vector forms and Beltrami series.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cohomology::Cochain;
use crate::error::{Error, Result};
use crate::form::{mask_from_indices, mask_indices, Form};
use crate::jet::{Jet, JetRing, Monomial};
use crate::model::ComplexModel;
use crate::scalar::GaussianRational;
use crate::vform::VForm;

/// `coeff * mono * omega^holo ^ bar omega^anti`, indices 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormTerm {
    pub coeff: GaussianRational,
    #[serde(default)]
    pub mono: BTreeMap<String, u32>,
    #[serde(default)]
    pub holo: Vec<usize>,
    #[serde(default)]
    pub anti: Vec<usize>,
}

/// `coeff * mono * bar omega^anti (x) X_vec`, indices 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VFormTerm {
    pub coeff: GaussianRational,
    #[serde(default)]
    pub mono: BTreeMap<String, u32>,
    #[serde(default)]
    pub anti: Vec<usize>,
    pub vec: usize,
}

fn term_jet(ring: &Arc<JetRing>, coeff: &GaussianRational, mono: &BTreeMap<String, u32>) -> Result<Jet> {
    Ok(Jet::monomial(ring, Monomial::from_named(ring, mono)?, coeff.clone()))
}

pub fn form_from_terms(dim: usize, ring: &Arc<JetRing>, terms: &[FormTerm]) -> Result<Form> {
    let mut out = Form::zero(dim, ring);
    for t in terms {
        let Some((mask, positive)) = mask_from_indices(dim, &t.holo, &t.anti)? else { continue };
        let c = term_jet(ring, &t.coeff, &t.mono)?;
        out.add_term(mask, &if positive { c } else { c.neg() });
    }
    Ok(out)
}

/// Terms in canonical order: basis mask, then monomial order.
pub fn form_to_terms(f: &Form) -> Vec<FormTerm> {
    let ring = f.ring();
    let mut out = Vec::new();
    for (mask, c) in f.terms() {
        let (holo, anti) = mask_indices(f.dim(), *mask);
        for (mono, a) in c.terms() {
            out.push(FormTerm { coeff: a.clone(), mono: mono.named(ring), holo: holo.clone(), anti: anti.clone() });
        }
    }
    out
}

pub fn vform_from_terms(dim: usize, ring: &Arc<JetRing>, terms: &[VFormTerm]) -> Result<VForm> {
    let mut out = VForm::zero(dim, ring);
    for t in terms {
        let basis = VForm::from_indices(dim, ring, &t.anti, t.vec)?;
        out = out.add(&basis.mul_jet(&term_jet(ring, &t.coeff, &t.mono)?)?)?;
    }
    Ok(out)
}

pub fn vform_to_terms(v: &VForm) -> Vec<VFormTerm> {
    let ring = v.ring();
    let mut out = Vec::new();
    for ((mask, k), c) in v.terms() {
        let (_, anti) = mask_indices(v.dim(), *mask);
        for (mono, a) in c.terms() {
            out.push(VFormTerm { coeff: a.clone(), mono: mono.named(ring), anti: anti.clone(), vec: k + 1 });
        }
    }
    out
}

/// Either encoding, as a JSON value.
pub fn cochain_to_json(x: &Cochain) -> serde_json::Value {
    match x {
        Cochain::Form(f) => serde_json::to_value(form_to_terms(f)),
        Cochain::VForm(v) => serde_json::to_value(vform_to_terms(v)),
    }
    .expect("terms serialize")
}

/// A Beltrami series document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationDocument {
    pub params: Vec<String>,
    pub order: u32,
    #[serde(default)]
    pub holomorphic: bool,
    pub phi: Vec<VFormTerm>,
}

/// First-order input for the Maurer-Cartan solver. Parameters and order
/// default to those of the model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FirstOrderDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    pub phi1: Vec<VFormTerm>,
}

impl DeformationDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    /// The series over the ring given by the document's parameters, with
    /// `order` overriding the document order when given.
    pub fn beltrami(&self, model: &ComplexModel, order: Option<u32>) -> Result<VForm> {
        let ring = JetRing::new(self.params.iter().cloned(), order.unwrap_or(self.order))?;
        let phi = vform_from_terms(model.dim(), &ring, &self.phi)?;
        if self.holomorphic && !phi.terms().values().all(Jet::is_holomorphic) {
            return Err(Error::Schema("holomorphic series contains conjugate parameters".into()));
        }
        model.check_beltrami(&phi)?;
        Ok(phi)
    }

    pub fn from_beltrami(phi: &VForm, holomorphic: bool) -> Self {
        DeformationDocument {
            params: phi.ring().params().to_vec(),
            order: phi.ring().order(),
            holomorphic,
            phi: vform_to_terms(phi),
        }
    }
}

impl FirstOrderDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn phi1(&self, model: &ComplexModel, order: Option<u32>) -> Result<VForm> {
        let params = self.params.clone().unwrap_or_else(|| model.params().to_vec());
        let ring = JetRing::new(params, order.or(self.order).unwrap_or(model.order()))?;
        vform_from_terms(model.dim(), &ring, &self.phi1)
    }
}
