//! Dolbeault cohomology of the invariant model, at the central fiber and
//! over Artinian jet rings.
//!
//! Cochains are either forms of a fixed bidegree `(p, q)` or tangent-valued
//! `(0, q)`-forms. Both are handled through [`Cochain`], whose coefficients
//! are addressed by a basis key `(mask, k)` (`k = 0` for forms).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::form::{mask_display, masks_of_bidegree, Form, Mask};
use crate::jet::{Jet, JetRing, Monomial};
use crate::linalg::{Echelon, Matrix, Membership, SparseVec};
use crate::model::ComplexModel;
use crate::scalar::GaussianRational;
use crate::vform::{vform_basis, VForm};

pub type Key = (Mask, usize);

/// Which complex a cochain lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Form { p: usize, q: usize },
    Tangent { q: usize },
}

impl Kind {
    pub fn q(self) -> usize {
        match self {
            Kind::Form { q, .. } | Kind::Tangent { q } => q,
        }
    }

    pub fn with_q(self, q: usize) -> Kind {
        match self {
            Kind::Form { p, .. } => Kind::Form { p, q },
            Kind::Tangent { .. } => Kind::Tangent { q },
        }
    }

    pub fn next(self) -> Kind {
        self.with_q(self.q() + 1)
    }

    pub fn prev(self) -> Option<Kind> {
        self.q().checked_sub(1).map(|q| self.with_q(q))
    }

    /// Basis keys in ascending order; empty when out of range.
    pub fn basis(self, dim: usize) -> Vec<Key> {
        match self {
            Kind::Form { p, q } if p <= dim && q <= dim => masks_of_bidegree(dim, p, q).into_iter().map(|m| (m, 0)).collect(),
            Kind::Tangent { q } if q <= dim => vform_basis(dim, q),
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Form { p, q } => write!(f, "A^{{{p},{q}}}"),
            Kind::Tangent { q } => write!(f, "A^{{0,{q}}}(T)"),
        }
    }
}

pub fn key_display(kind: Kind, dim: usize, key: Key) -> String {
    match kind {
        Kind::Form { .. } => mask_display(dim, key.0),
        Kind::Tangent { .. } => format!("{}@X{}", mask_display(dim, key.0), key.1 + 1),
    }
}

#[derive(Clone, PartialEq, Eq)]
pub enum Cochain {
    Form(Form),
    VForm(VForm),
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cochain::Form(x) => write!(f, "{x:?}"),
            Cochain::VForm(x) => write!(f, "{x:?}"),
        }
    }
}

impl Cochain {
    pub fn zero(kind: Kind, dim: usize, ring: &Arc<JetRing>) -> Self {
        match kind {
            Kind::Form { .. } => Cochain::Form(Form::zero(dim, ring)),
            Kind::Tangent { .. } => Cochain::VForm(VForm::zero(dim, ring)),
        }
    }

    pub fn from_key(kind: Kind, dim: usize, key: Key, coeff: Jet) -> Self {
        match kind {
            Kind::Form { .. } => Cochain::Form(Form::monomial(dim, key.0, coeff)),
            Kind::Tangent { .. } => Cochain::VForm(VForm::monomial(dim, key.0, key.1, coeff)),
        }
    }

    pub fn ring(&self) -> &Arc<JetRing> {
        match self {
            Cochain::Form(x) => x.ring(),
            Cochain::VForm(x) => x.ring(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Cochain::Form(x) => x.dim(),
            Cochain::VForm(x) => x.dim(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Cochain::Form(x) => x.is_zero(),
            Cochain::VForm(x) => x.is_zero(),
        }
    }

    pub fn terms(&self) -> Vec<(Key, &Jet)> {
        match self {
            Cochain::Form(x) => x.terms().iter().map(|(m, c)| ((*m, 0), c)).collect(),
            Cochain::VForm(x) => x.terms().iter().map(|(k, c)| (*k, c)).collect(),
        }
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        match (self, other) {
            (Cochain::Form(a), Cochain::Form(b)) => Ok(Cochain::Form(a.add(b)?)),
            (Cochain::VForm(a), Cochain::VForm(b)) => Ok(Cochain::VForm(a.add(b)?)),
            _ => Err(Error::KindMismatch("cannot add a form and a vector form".into())),
        }
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Cochain {
        self.map_coeffs(Jet::neg)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Jet) -> Jet) -> Cochain {
        match self {
            Cochain::Form(x) => Cochain::Form(x.map_coeffs(f)),
            Cochain::VForm(x) => Cochain::VForm(x.map_coeffs(f)),
        }
    }

    pub fn try_map_ring(&self, ring: &Arc<JetRing>, f: impl Fn(&Jet) -> Result<Jet>) -> Result<Cochain> {
        Ok(match self {
            Cochain::Form(x) => Cochain::Form(x.try_map_ring(ring, f)?),
            Cochain::VForm(x) => Cochain::VForm(x.try_map_ring(ring, f)?),
        })
    }

    /// Reinterprets the coefficients in another ring with the same
    /// parameters (dropping terms above its order).
    pub fn to_ring(&self, ring: &Arc<JetRing>) -> Result<Cochain> {
        self.try_map_ring(ring, |c| c.to_ring(ring))
    }

    pub fn drop_above(&self, d: u32) -> Cochain {
        self.map_coeffs(|c| c.drop_above(d))
    }

    pub fn jet_homogeneous(&self, d: u32) -> Cochain {
        self.map_coeffs(|c| c.homogeneous(d))
    }

    pub fn min_jet_degree(&self) -> Option<u32> {
        self.terms().iter().filter_map(|(_, c)| c.min_degree()).min()
    }

    /// Coefficient of monomial `mu` as a scalar vector over basis keys.
    pub fn coefficient_of(&self, mu: &Monomial) -> BTreeMap<Key, GaussianRational> {
        self.terms().into_iter().map(|(k, c)| (k, c.coeff(mu))).filter(|(_, c)| !c.is_zero()).collect()
    }

    /// All monomials occurring in some coefficient.
    pub fn monomials(&self) -> BTreeSet<Monomial> {
        self.terms().into_iter().flat_map(|(_, c)| c.terms().keys().cloned().collect::<Vec<_>>()).collect()
    }

    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms().into_iter().flat_map(|(_, c)| c.variables()).collect()
    }

    pub fn as_form(&self) -> Option<&Form> {
        match self {
            Cochain::Form(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_vform(&self) -> Option<&VForm> {
        match self {
            Cochain::VForm(x) => Some(x),
            _ => None,
        }
    }

    pub fn display(&self) -> String {
        format!("{self:?}")
    }
}

impl ComplexModel {
    /// The central-fiber `delbar` on a cochain.
    pub fn delbar_cochain(&self, x: &Cochain) -> Result<Cochain> {
        Ok(match x {
            Cochain::Form(f) => {
                self.check_form(f)?;
                Cochain::Form(self.delbar_any(f))
            }
            Cochain::VForm(v) => Cochain::VForm(self.vf_delbar(v)?),
        })
    }

    /// The twisted differential for a Beltrami differential `phi`.
    pub fn twisted_delbar(&self, phi: &VForm, x: &Cochain) -> Result<Cochain> {
        Ok(match x {
            Cochain::Form(f) => Cochain::Form(self.twisted_delbar_form(phi, f)?),
            Cochain::VForm(v) => Cochain::VForm(self.twisted_delbar_vform(phi, v)?),
        })
    }
}

/// Basis positions of a kind.
#[derive(Debug, Clone)]
struct Indexer {
    keys: Vec<Key>,
    index: BTreeMap<Key, usize>,
}

impl Indexer {
    fn new(keys: Vec<Key>) -> Self {
        let index = keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        Indexer { keys, index }
    }

    fn vector(&self, coeffs: &BTreeMap<Key, GaussianRational>) -> Result<SparseVec> {
        coeffs
            .iter()
            .map(|(k, c)| {
                self.index.get(k).map(|i| (*i, c.clone())).ok_or_else(|| Error::KindMismatch(format!("basis key {k:?} outside the complex")))
            })
            .collect()
    }
}

/// Scalar matrix of the central `delbar` from `kind` to its successor.
fn central_matrix(model: &ComplexModel, kind: Kind) -> Result<Matrix> {
    let dim = model.dim();
    let src = kind.basis(dim);
    let dst = Indexer::new(kind.next().basis(dim));
    let ring = JetRing::new(["t"], 0)?;
    let cols = src
        .iter()
        .map(|key| {
            let x = Cochain::from_key(kind, dim, *key, Jet::one(&ring));
            let y = model.delbar_cochain(&x)?;
            dst.vector(&y.coefficient_of(&Monomial::one(ring.num_vars())))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_columns(dst.keys.len(), cols))
}

/// Cohomology of a finite complex `C^{q-1} -> C^q -> C^{q+1}` with chosen
/// class representatives.
#[derive(Debug, Clone)]
struct Quotient {
    incoming_image: Vec<SparseVec>,
    representatives: Vec<SparseVec>,
    /// Echelon form of the incoming differential, for exactness tests.
    incoming: Echelon,
    /// `[image basis | representatives]`, for class coordinates.
    coords: Echelon,
    nrows: usize,
}

impl Quotient {
    fn new(outgoing: &Matrix, incoming: &Matrix, nrows: usize) -> Self {
        let out_e = outgoing.echelon();
        let in_e = incoming.echelon();
        let image: Vec<SparseVec> = in_e.pivots().iter().map(|&p| incoming.column(p).clone()).collect();
        let kernel = out_e.kernel_basis();
        let all: Vec<SparseVec> = image.iter().cloned().chain(kernel.iter().cloned()).collect();
        let greedy = Matrix::from_columns(nrows, all).echelon();
        let reps: Vec<SparseVec> =
            greedy.pivots().iter().filter(|&&p| p >= image.len()).map(|&p| kernel[p - image.len()].clone()).collect();
        let span: Vec<SparseVec> = image.iter().cloned().chain(reps.iter().cloned()).collect();
        let coords = Matrix::from_columns(nrows, span).echelon();
        Quotient { incoming_image: image, representatives: reps, incoming: in_e, coords, nrows }
    }

    /// Class coordinates of a closed vector.
    fn coordinates(&self, z: &SparseVec) -> Result<Vec<GaussianRational>> {
        debug_assert!(z.keys().all(|&i| i < self.nrows));
        match self.coords.solve(z) {
            Membership::Solution(x) => {
                let off = self.incoming_image.len();
                Ok((0..self.representatives.len()).map(|i| x.get(&(off + i)).cloned().unwrap_or_default()).collect())
            }
            Membership::Residue(_) => Err(Error::Internal("cochain is not closed".into())),
        }
    }
}

/// Central-fiber cohomology `H^q` of one complex with class representatives.
#[derive(Debug, Clone)]
pub struct CohomologyBasis {
    kind: Kind,
    dim: usize,
    basis: Indexer,
    outgoing: Matrix,
    incoming: Matrix,
    quotient: Quotient,
}

impl CohomologyBasis {
    pub fn new(model: &ComplexModel, kind: Kind) -> Result<Self> {
        let dim = model.dim();
        let basis = Indexer::new(kind.basis(dim));
        let outgoing = central_matrix(model, kind)?;
        let incoming = match kind.prev() {
            Some(prev) => central_matrix(model, prev)?,
            None => Matrix::zeros(basis.keys.len(), 0),
        };
        let quotient = Quotient::new(&outgoing, &incoming, basis.keys.len());
        Ok(CohomologyBasis { kind, dim, basis, outgoing, incoming, quotient })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn h(&self) -> usize {
        self.quotient.representatives.len()
    }

    pub fn basis_keys(&self) -> &[Key] {
        &self.basis.keys
    }

    pub fn outgoing(&self) -> &Matrix {
        &self.outgoing
    }

    pub fn incoming(&self) -> &Matrix {
        &self.incoming
    }

    pub fn kernel_dim(&self) -> usize {
        self.basis.keys.len() - self.outgoing.rank()
    }

    pub fn image_dim(&self) -> usize {
        self.quotient.incoming_image.len()
    }

    /// Scalar cochain of a class representative, in the given ring.
    pub fn representative(&self, i: usize, ring: &Arc<JetRing>) -> Result<Cochain> {
        let v = self.quotient.representatives.get(i).ok_or(Error::SelectorOutOfRange(i))?;
        Ok(self.cochain_of(v, ring))
    }

    pub fn representatives(&self, ring: &Arc<JetRing>) -> Vec<Cochain> {
        self.quotient.representatives.iter().map(|v| self.cochain_of(v, ring)).collect()
    }

    pub fn cochain_of(&self, v: &SparseVec, ring: &Arc<JetRing>) -> Cochain {
        let mut out = Cochain::zero(self.kind, self.dim, ring);
        for (i, c) in v {
            let term = Cochain::from_key(self.kind, self.dim, self.basis.keys[*i], Jet::constant(ring, c.clone()));
            out = out.add(&term).expect("same kind");
        }
        out
    }

    pub fn vector(&self, coeffs: &BTreeMap<Key, GaussianRational>) -> Result<SparseVec> {
        self.basis.vector(coeffs)
    }

    /// Class coordinates of the scalar part of `x` at monomial `mu`.
    pub fn coordinates_at(&self, x: &Cochain, mu: &Monomial) -> Result<Vec<GaussianRational>> {
        let z = self.vector(&x.coefficient_of(mu))?;
        if !self.outgoing.mul_vec(&z).is_empty() {
            return Err(Error::Internal(format!("{} cochain is not delbar-closed", self.kind)));
        }
        self.quotient.coordinates(&z)
    }

    /// Class coordinates of the constant part of `x`.
    pub fn coordinates(&self, x: &Cochain) -> Result<Vec<GaussianRational>> {
        self.coordinates_at(x, &Monomial::one(x.ring().num_vars()))
    }

    /// Solves `delbar y = v` for a scalar target, pivot-canonically.
    pub fn solve_incoming(&self, v: &SparseVec) -> Membership {
        self.quotient.incoming.solve(v)
    }
}

/// Twisted complex over the Artinian ring `C[vars]/m^{r+1}` restricted to
/// a set of active variables.
pub struct ArtinianComplex {
    kind: Kind,
    dim: usize,
    ring: Arc<JetRing>,
    monomials: Vec<Monomial>,
    basis: Indexer,
    quotient: Quotient,
    outgoing: Matrix,
}

impl ArtinianComplex {
    /// `phi` is truncated to order `r`; `vars` are the active variables.
    pub fn new(model: &ComplexModel, phi: &VForm, kind: Kind, r: u32, vars: &[usize]) -> Result<Self> {
        let ring = phi.ring().with_order(r);
        let phi_r = phi.try_map_ring(&ring, |c| c.truncate(r))?;
        let dim = model.dim();
        let monomials = ring.monomials_up_to(vars, r);
        let mono_index: BTreeMap<Monomial, usize> = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let build = |k: Kind| -> Result<(Indexer, Matrix)> {
            let src = k.basis(dim);
            let dst = k.next().basis(dim);
            let dst_index: BTreeMap<Key, usize> = dst.iter().enumerate().map(|(i, key)| (*key, i)).collect();
            let mut cols = Vec::with_capacity(monomials.len() * src.len());
            let images = src
                .iter()
                .map(|key| model.twisted_delbar(&phi_r, &Cochain::from_key(k, dim, *key, Jet::one(&ring))))
                .collect::<Result<Vec<_>>>()?;
            for mu in &monomials {
                for img in &images {
                    let mut col = SparseVec::new();
                    for (key, c) in img.terms() {
                        for (nu, a) in c.terms() {
                            if mu.degree() + nu.degree() > r {
                                continue;
                            }
                            let Some(&mi) = mono_index.get(&mu.mul(nu)) else {
                                return Err(Error::Internal("twisted differential leaves the active variables".into()));
                            };
                            col.insert(mi * dst.len() + dst_index[&key], a.clone());
                        }
                    }
                    cols.push(col);
                }
            }
            let keys = monomials.iter().flat_map(|_| src.iter().copied()).collect();
            Ok((Indexer::new(keys), Matrix::from_columns(monomials.len() * dst.len(), cols)))
        };
        let (basis, outgoing) = build(kind)?;
        let incoming = match kind.prev() {
            Some(prev) => build(prev)?.1,
            None => Matrix::zeros(basis.keys.len(), 0),
        };
        let quotient = Quotient::new(&outgoing, &incoming, basis.keys.len());
        Ok(ArtinianComplex { kind, dim, ring, monomials, basis, quotient, outgoing })
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn ring(&self) -> &Arc<JetRing> {
        &self.ring
    }

    pub fn h(&self) -> usize {
        self.quotient.representatives.len()
    }

    fn vector(&self, x: &Cochain) -> Result<SparseVec> {
        let per = self.basis.keys.len() / self.monomials.len().max(1);
        let local: BTreeMap<Key, usize> = self.basis.keys[..per].iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let mut v = SparseVec::new();
        for (key, c) in x.terms() {
            for (mu, a) in c.terms() {
                if mu.degree() > self.ring.order() {
                    continue;
                }
                let mi = self
                    .monomials
                    .binary_search(mu)
                    .map_err(|_| Error::Internal("cochain uses an inactive variable".into()))?;
                let ki = local.get(&key).ok_or_else(|| Error::KindMismatch(format!("basis key {key:?} outside {}", self.kind)))?;
                v.insert(mi * per + ki, a.clone());
            }
        }
        Ok(v)
    }

    pub fn is_closed(&self, x: &Cochain) -> Result<bool> {
        Ok(self.outgoing.mul_vec(&self.vector(x)?).is_empty())
    }

    /// Class coordinates of a twisted-closed cochain (terms above the ring
    /// order are ignored).
    pub fn coordinates(&self, x: &Cochain) -> Result<Vec<GaussianRational>> {
        let z = self.vector(x)?;
        if !self.outgoing.mul_vec(&z).is_empty() {
            return Err(Error::Internal(format!("cochain is not twisted-closed in {}", self.kind)));
        }
        self.quotient.coordinates(&z)
    }

    /// True if `x` is a twisted coboundary.
    pub fn is_exact(&self, x: &Cochain) -> Result<bool> {
        Ok(self.quotient.incoming.solve(&self.vector(x)?).is_member())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}
