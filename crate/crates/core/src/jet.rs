//! Truncated power series in deformation parameters and their conjugates.
//!
//! A [`JetRing`] with parameters `t_1..t_s` has `2s` variables: the
//! parameters themselves followed by their formal conjugates (written
//! `~t_k`). Conjugation swaps each pair. A jet is an exact polynomial whose
//! terms of total degree above the ring order are discarded on every
//! product, i.e. an element of `C[t, ~t] / m^{n+1}`.
//!
//! A ring built with [`JetRing::polynomial`] never truncates; it is used
//! where genuine polynomial arithmetic (and exact division) is needed.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::GaussianRational;

/// Prefix marking the conjugate of a parameter in variable names.
pub const CONJ_PREFIX: char = '~';

const UNBOUNDED: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JetRing {
    params: Vec<String>,
    order: u32,
}

impl JetRing {
    pub fn new<S: Into<String>>(params: impl IntoIterator<Item = S>, order: u32) -> Result<Arc<Self>> {
        let params: Vec<String> = params.into_iter().map(Into::into).collect();
        if params.is_empty() {
            return Err(Error::Schema("a jet ring needs at least one parameter".into()));
        }
        let mut seen = BTreeSet::new();
        for p in &params {
            let ok = !p.is_empty()
                && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
                && !p.starts_with(|c: char| c.is_ascii_digit());
            if !ok {
                return Err(Error::Schema(format!("invalid parameter name {p:?}")));
            }
            if !seen.insert(p.as_str()) {
                return Err(Error::Schema(format!("duplicate parameter name {p:?}")));
            }
        }
        if order == UNBOUNDED {
            return Err(Error::Schema("order out of range".into()));
        }
        Ok(Arc::new(JetRing { params, order }))
    }

    /// Untruncated polynomial ring over the same variables.
    pub fn polynomial(&self) -> Arc<Self> {
        Arc::new(JetRing { params: self.params.clone(), order: UNBOUNDED })
    }

    /// Same variables, different truncation order.
    pub fn with_order(&self, order: u32) -> Arc<Self> {
        Arc::new(JetRing { params: self.params.clone(), order })
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn num_vars(&self) -> usize {
        2 * self.params.len()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn is_polynomial(&self) -> bool {
        self.order == UNBOUNDED
    }

    /// Conjugation partner of variable `v`; a fixed-point-free involution.
    pub fn conj_var(&self, v: usize) -> usize {
        let s = self.params.len();
        if v < s {
            v + s
        } else {
            v - s
        }
    }

    pub fn is_conj_var(&self, v: usize) -> bool {
        v >= self.params.len()
    }

    pub fn var_name(&self, v: usize) -> String {
        let s = self.params.len();
        if v < s {
            self.params[v].clone()
        } else {
            format!("{CONJ_PREFIX}{}", self.params[v - s])
        }
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        let (conj, base) = match name.strip_prefix(CONJ_PREFIX) {
            Some(b) => (true, b),
            None => (false, name),
        };
        let k = self
            .params
            .iter()
            .position(|p| p == base)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(if conj { k + self.params.len() } else { k })
    }

    /// All monomials of total degree exactly `deg` in the given variables,
    /// in ascending monomial order.
    pub fn monomials_of_degree(&self, vars: &[usize], deg: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u16; self.num_vars()];
        fn rec(vars: &[usize], left: u32, exps: &mut Vec<u16>, out: &mut Vec<Monomial>) {
            match vars.split_first() {
                None => {
                    if left == 0 {
                        out.push(Monomial::from_exps(exps.clone()));
                    }
                }
                Some((&v, rest)) => {
                    for e in (0..=left).rev() {
                        exps[v] = e as u16;
                        rec(rest, left - e, exps, out);
                    }
                    exps[v] = 0;
                }
            }
        }
        rec(vars, deg, &mut exps, &mut out);
        out.sort();
        out
    }

    /// All monomials of degree `<= max_deg`, sorted.
    pub fn monomials_up_to(&self, vars: &[usize], max_deg: u32) -> Vec<Monomial> {
        (0..=max_deg).flat_map(|d| self.monomials_of_degree(vars, d)).collect()
    }
}

pub(crate) fn same_ring(a: &Arc<JetRing>, b: &Arc<JetRing>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Exponent vector over all `2s` variables.
///
/// Ordered by total degree first, then so that earlier variables come first
/// within a degree (`t1 < t2 < ...`). This is a graded monomial order, which
/// polynomial division relies on.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    degree: u32,
    exps: Box<[u16]>,
}

impl Monomial {
    pub fn one(num_vars: usize) -> Self {
        Monomial { degree: 0, exps: vec![0; num_vars].into_boxed_slice() }
    }

    pub fn from_exps(exps: Vec<u16>) -> Self {
        let degree = exps.iter().map(|&e| e as u32).sum();
        Monomial { degree, exps: exps.into_boxed_slice() }
    }

    pub fn var(num_vars: usize, v: usize) -> Self {
        let mut exps = vec![0; num_vars];
        exps[v] = 1;
        Self::from_exps(exps)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exps(&self) -> &[u16] {
        &self.exps
    }

    pub fn exp(&self, v: usize) -> u16 {
        self.exps[v]
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps: Vec<u16> = self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a + b).collect();
        Monomial { degree: self.degree + other.degree, exps: exps.into_boxed_slice() }
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = Vec::with_capacity(self.exps.len());
        for (a, b) in self.exps.iter().zip(other.exps.iter()) {
            exps.push(a.checked_sub(*b)?);
        }
        Some(Monomial { degree: self.degree - other.degree, exps: exps.into_boxed_slice() })
    }

    pub fn lower(&self, v: usize) -> Option<Monomial> {
        if self.exps[v] == 0 {
            return None;
        }
        let mut exps = self.exps.to_vec();
        exps[v] -= 1;
        Some(Monomial { degree: self.degree - 1, exps: exps.into_boxed_slice() })
    }

    pub fn conj(&self, ring: &JetRing) -> Monomial {
        let n = self.exps.len();
        let exps: Vec<u16> = (0..n).map(|v| self.exps[ring.conj_var(v)]).collect();
        Monomial { degree: self.degree, exps: exps.into_boxed_slice() }
    }

    pub fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(v, _)| v)
    }

    /// Exponents keyed by variable name, zero exponents omitted.
    pub fn named(&self, ring: &JetRing) -> BTreeMap<String, u32> {
        self.variables().map(|v| (ring.var_name(v), self.exps[v] as u32)).collect()
    }

    pub fn from_named(ring: &JetRing, named: &BTreeMap<String, u32>) -> Result<Monomial> {
        let mut exps = vec![0u16; ring.num_vars()];
        for (name, &e) in named {
            let v = ring.var_index(name)?;
            exps[v] = u16::try_from(e).map_err(|_| Error::Schema(format!("exponent {e} too large")))?;
        }
        Ok(Monomial::from_exps(exps))
    }

    pub fn display(&self, ring: &JetRing) -> String {
        if self.degree == 0 {
            return "1".into();
        }
        self.variables()
            .map(|v| {
                let e = self.exps[v];
                if e == 1 {
                    ring.var_name(v)
                } else {
                    format!("{}^{}", ring.var_name(v), e)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree.cmp(&other.degree).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

/// Element of a [`JetRing`]. No zero coefficients are stored and every
/// monomial has degree at most the ring order.
#[derive(Clone)]
pub struct Jet {
    ring: Arc<JetRing>,
    terms: BTreeMap<Monomial, GaussianRational>,
}

impl PartialEq for Jet {
    fn eq(&self, other: &Self) -> bool {
        same_ring(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for Jet {}

impl Jet {
    pub fn zero(ring: &Arc<JetRing>) -> Self {
        Jet { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<JetRing>, c: GaussianRational) -> Self {
        Self::monomial(ring, Monomial::one(ring.num_vars()), c)
    }

    pub fn one(ring: &Arc<JetRing>) -> Self {
        Self::constant(ring, GaussianRational::one())
    }

    pub fn var(ring: &Arc<JetRing>, v: usize) -> Self {
        Self::monomial(ring, Monomial::var(ring.num_vars(), v), GaussianRational::one())
    }

    pub fn var_named(ring: &Arc<JetRing>, name: &str) -> Result<Self> {
        Ok(Self::var(ring, ring.var_index(name)?))
    }

    pub fn monomial(ring: &Arc<JetRing>, mono: Monomial, c: GaussianRational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() && mono.degree() <= ring.order() {
            terms.insert(mono, c);
        }
        Jet { ring: ring.clone(), terms }
    }

    pub fn from_terms(
        ring: &Arc<JetRing>,
        terms: impl IntoIterator<Item = (Monomial, GaussianRational)>,
    ) -> Self {
        let mut out = Jet::zero(ring);
        for (m, c) in terms {
            out.add_term(m, &c);
        }
        out
    }

    pub fn ring(&self) -> &Arc<JetRing> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, GaussianRational> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, GaussianRational> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_term(&self) -> GaussianRational {
        self.terms
            .iter()
            .next()
            .filter(|(m, _)| m.degree() == 0)
            .map(|(_, c)| c.clone())
            .unwrap_or_default()
    }

    pub fn coeff(&self, m: &Monomial) -> GaussianRational {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Lowest total degree present, `None` for zero.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    pub fn leading(&self) -> Option<(&Monomial, &GaussianRational)> {
        self.terms.iter().next_back()
    }

    /// Adds `c * m`, dropping it if `m` exceeds the ring order.
    pub fn add_term(&mut self, m: Monomial, c: &GaussianRational) {
        if c.is_zero() || m.degree() > self.ring.order() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_ring(&self, other: &Jet) -> Result<()> {
        if same_ring(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet> {
        self.check_ring(other)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    pub fn try_mul(&self, other: &Jet) -> Result<Jet> {
        self.check_ring(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_assign_unchecked(&mut self, other: &Jet) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub(crate) fn sub_assign_unchecked(&mut self, other: &Jet) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), &-c);
        }
    }

    pub(crate) fn mul_unchecked(&self, other: &Jet) -> Jet {
        let order = self.ring.order();
        let mut out = Jet::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if ma.degree() + mb.degree() > order {
                    // terms are sorted by degree, the rest of `other` is higher still
                    break;
                }
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &GaussianRational) -> Jet {
        if c.is_zero() {
            return Jet::zero(&self.ring);
        }
        Jet {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn neg(&self) -> Jet {
        Jet {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), -a)).collect(),
        }
    }

    /// Multiplies by a monomial, truncating.
    pub fn shift(&self, m: &Monomial) -> Jet {
        let mut out = Jet::zero(&self.ring);
        for (mm, c) in &self.terms {
            out.add_term(mm.mul(m), c);
        }
        out
    }

    /// Formal derivation `sum_v c_v d/dv`.
    pub fn derive(&self, u: &Direction) -> Result<Jet> {
        if u.num_vars() != self.ring.num_vars() {
            return Err(Error::RingMismatch);
        }
        let mut out = Jet::zero(&self.ring);
        for (v, cv) in u.coeffs() {
            for (m, c) in &self.terms {
                if let Some(lower) = m.lower(*v) {
                    let k = GaussianRational::from_integer(m.exp(*v) as i64);
                    out.add_term(lower, &(&(c * &k) * cv));
                }
            }
        }
        Ok(out)
    }

    /// The quotient map onto the order-`m` ring.
    pub fn truncate(&self, m: u32) -> Result<Jet> {
        if m > self.ring.order() {
            return Err(Error::OrderTooLarge { requested: m, available: self.ring.order() });
        }
        let ring = self.ring.with_order(m);
        Ok(Jet {
            ring,
            terms: self.terms.iter().filter(|(k, _)| k.degree() <= m).map(|(k, c)| (k.clone(), c.clone())).collect(),
        })
    }

    /// Drops terms of degree `> m` but stays in the same ring.
    pub fn drop_above(&self, m: u32) -> Jet {
        Jet {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(k, _)| k.degree() <= m).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }

    /// Homogeneous component of degree `d`.
    pub fn homogeneous(&self, d: u32) -> Jet {
        Jet {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(k, _)| k.degree() == d).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }

    /// Reinterprets the same terms in another ring over the same variables.
    pub fn to_ring(&self, ring: &Arc<JetRing>) -> Result<Jet> {
        if ring.params() != self.ring.params() {
            return Err(Error::RingMismatch);
        }
        let mut out = Jet::zero(ring);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn conj(&self) -> Jet {
        Jet {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.conj(&self.ring), c.conj())).collect(),
        }
    }

    /// Variables that occur with nonzero exponent.
    pub fn variables(&self) -> BTreeSet<usize> {
        self.terms.keys().flat_map(|m| m.variables().collect::<Vec<_>>()).collect()
    }

    pub fn is_holomorphic(&self) -> bool {
        self.variables().iter().all(|&v| !self.ring.is_conj_var(v))
    }

    /// Exact evaluation. The point must assign every variable; unless
    /// `allow_inconsistent`, values at `~t_k` must be the conjugates of the
    /// values at `t_k`. Variables assigned only through their partner are
    /// filled in by conjugation.
    pub fn eval(&self, point: &Point, allow_inconsistent: bool) -> Result<GaussianRational> {
        let values = point.resolve(&self.ring, allow_inconsistent)?;
        Ok(self.eval_resolved(&values))
    }

    pub(crate) fn eval_resolved(&self, values: &[GaussianRational]) -> GaussianRational {
        let mut acc = GaussianRational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for v in m.variables() {
                for _ in 0..m.exp(v) {
                    term = &term * &values[v];
                }
            }
            acc += &term;
        }
        acc
    }

    /// Multiplicative inverse of a unit (nonzero constant term) via the
    /// truncated geometric series.
    pub fn inverse(&self) -> Result<Jet> {
        let c0 = self.constant_term();
        let c0_inv = c0.inv().map_err(|_| Error::NotAUnit)?;
        // self = c0 (1 + x), x without constant term
        let mut x = self.scale(&c0_inv);
        x.add_term(Monomial::one(self.ring.num_vars()), &-GaussianRational::one());
        if x.is_zero() {
            return Ok(Jet::constant(&self.ring, c0_inv));
        }
        if self.ring.is_polynomial() {
            return Err(Error::NotAUnit);
        }
        let neg_x = x.neg();
        let mut sum = Jet::one(&self.ring);
        let mut power = Jet::one(&self.ring);
        for _ in 0..self.ring.order() {
            power = power.mul_unchecked(&neg_x);
            if power.is_zero() {
                break;
            }
            sum.add_assign_unchecked(&power);
        }
        Ok(sum.scale(&c0_inv))
    }

    /// Exact polynomial division; fails unless `divisor` divides `self`.
    /// Only meaningful in a polynomial ring.
    pub fn exact_div(&self, divisor: &Jet) -> Result<Jet> {
        self.check_ring(divisor)?;
        let (dm, dc) = divisor.leading().ok_or(Error::DivisionByZero)?;
        let dc_inv = dc.inv()?;
        let mut rem = self.clone();
        let mut quot = Jet::zero(&self.ring);
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.div(dm).ok_or(Error::InexactDivision)?;
            let c = rc * &dc_inv;
            let step = divisor.shift(&m).scale(&c);
            rem.sub_assign_unchecked(&step);
            quot.add_term(m, &c);
        }
        Ok(quot)
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let coeff = c.to_string();
            let coeff = if c.re != num_traits::Zero::zero() && c.im != num_traits::Zero::zero() {
                format!("({coeff})")
            } else {
                coeff
            };
            let piece = if m.degree() == 0 {
                coeff
            } else if c.is_one() {
                m.display(&self.ring)
            } else if (-c).is_one() {
                format!("-{}", m.display(&self.ring))
            } else {
                format!("{coeff}*{}", m.display(&self.ring))
            };
            if k > 0 && !piece.starts_with('-') {
                s.push('+');
            }
            s.push_str(&piece);
        }
        s
    }
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display())
    }
}

/// A tangent vector `sum_v c_v d/dv` on the base, over all `2s` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Direction {
    num_vars: usize,
    coeffs: BTreeMap<usize, GaussianRational>,
}

impl Direction {
    pub fn new(ring: &JetRing, coeffs: impl IntoIterator<Item = (usize, GaussianRational)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (v, c) in coeffs {
            if v >= ring.num_vars() {
                return Err(Error::UnknownVariable(format!("#{v}")));
            }
            if !c.is_zero() {
                map.insert(v, c);
            }
        }
        if map.is_empty() {
            return Err(Error::Schema("a direction needs a nonzero coefficient".into()));
        }
        Ok(Direction { num_vars: ring.num_vars(), coeffs: map })
    }

    /// Coordinate direction `d/dv`.
    pub fn coordinate(ring: &JetRing, v: usize) -> Result<Self> {
        Self::new(ring, [(v, GaussianRational::one())])
    }

    pub fn named(ring: &JetRing, name: &str) -> Result<Self> {
        Self::coordinate(ring, ring.var_index(name)?)
    }

    /// Parses `t11`, `t11=2`, or a comma-separated list such as
    /// `t11=1/2,~t12=i`.
    pub fn parse(ring: &JetRing, spec: &str) -> Result<Self> {
        let mut coeffs = Vec::new();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, c) = match part.split_once('=') {
                Some((n, c)) => (n.trim(), c.trim().parse()?),
                None => (part, GaussianRational::one()),
            };
            coeffs.push((ring.var_index(name)?, c));
        }
        Self::new(ring, coeffs)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, GaussianRational> {
        &self.coeffs
    }

    pub fn display(&self, ring: &JetRing) -> String {
        self.coeffs
            .iter()
            .map(|(v, c)| {
                if c.is_one() {
                    ring.var_name(*v)
                } else {
                    format!("{}={}", ring.var_name(*v), c)
                }
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    /// `a*self + b*other`; fails when the result is zero.
    pub fn combine(&self, a: &GaussianRational, other: &Direction, b: &GaussianRational) -> Result<Direction> {
        let mut map: BTreeMap<usize, GaussianRational> = BTreeMap::new();
        for (v, c) in &self.coeffs {
            *map.entry(*v).or_default() += &(c * a);
        }
        for (v, c) in &other.coeffs {
            *map.entry(*v).or_default() += &(c * b);
        }
        map.retain(|_, c| !c.is_zero());
        if map.is_empty() {
            return Err(Error::Schema("a direction needs a nonzero coefficient".into()));
        }
        Ok(Direction { num_vars: self.num_vars, coeffs: map })
    }
}

/// Assignment of values to variables, keyed by name.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Point {
    pub values: BTreeMap<String, GaussianRational>,
}

impl Point {
    pub fn new() -> Self {
        Self::default()
    }

    /// A conjugation-consistent point from parameter values only.
    pub fn from_params(ring: &JetRing, values: &[GaussianRational]) -> Self {
        let mut p = Point::new();
        for (k, c) in values.iter().enumerate() {
            p.values.insert(ring.var_name(k), c.clone());
            p.values.insert(ring.var_name(ring.conj_var(k)), c.conj());
        }
        p
    }

    pub fn set(mut self, name: &str, c: GaussianRational) -> Self {
        self.values.insert(name.to_string(), c);
        self
    }

    /// `name=value` pairs joined by commas, in name order.
    pub fn display(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
    }

    /// Values indexed by variable, checking coverage and consistency.
    pub fn resolve(&self, ring: &JetRing, allow_inconsistent: bool) -> Result<Vec<GaussianRational>> {
        for name in self.values.keys() {
            ring.var_index(name)?;
        }
        let mut out = Vec::with_capacity(ring.num_vars());
        for v in 0..ring.num_vars() {
            let name = ring.var_name(v);
            let partner = ring.var_name(ring.conj_var(v));
            let value = match (self.values.get(&name), self.values.get(&partner)) {
                (Some(a), Some(b)) => {
                    if !allow_inconsistent && *a != b.conj() {
                        return Err(Error::InconsistentConjugation(name));
                    }
                    a.clone()
                }
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.conj(),
                _ => return Err(Error::MissingVariable(name)),
            };
            out.push(value);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(order: u32) -> Arc<JetRing> {
        JetRing::new(["t1", "t2"], order).unwrap()
    }

    fn g(s: &str) -> GaussianRational {
        s.parse().unwrap()
    }

    fn t(r: &Arc<JetRing>, name: &str) -> Jet {
        Jet::var_named(r, name).unwrap()
    }

    fn c(r: &Arc<JetRing>, s: &str) -> Jet {
        Jet::constant(r, g(s))
    }

    fn add(a: &Jet, b: &Jet) -> Jet {
        a.try_add(b).unwrap()
    }

    fn mul(a: &Jet, b: &Jet) -> Jet {
        a.try_mul(b).unwrap()
    }

    #[test]
    fn geometric_series_truncates_to_one() {
        let r = ring(2);
        let t1 = t(&r, "t1");
        let a = add(&Jet::one(&r), &t1);
        let b = add(&add(&Jet::one(&r), &t1.neg()), &mul(&t1, &t1));
        assert_eq!(mul(&a, &b), Jet::one(&r));
    }

    #[test]
    fn square_vanishes_in_first_order_ring() {
        let r = ring(1);
        let t1 = t(&r, "t1");
        assert!(mul(&t1, &t1).is_zero());
    }

    #[test]
    fn mixed_square_expands() {
        let r = ring(2);
        let tt = mul(&t(&r, "t1"), &t(&r, "~t1"));
        let a = add(&Jet::one(&r), &tt);
        assert_eq!(mul(&a, &a), add(&Jet::one(&r), &tt.scale(&g("2"))));
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let a = Jet::one(&ring(2));
        let b = Jet::one(&ring(3));
        assert_eq!(a.try_mul(&b), Err(Error::RingMismatch));
    }

    #[test]
    fn derivative_examples() {
        let r = ring(3);
        let (t1, t2) = (t(&r, "t1"), t(&r, "t2"));
        let x = mul(&mul(&t1, &t1), &t2);
        let d1 = Direction::named(&r, "t1").unwrap();
        assert_eq!(x.derive(&d1).unwrap(), mul(&t1, &t2).scale(&g("2")));
        let d2 = Direction::named(&r, "t2").unwrap();
        assert!(t1.derive(&d2).unwrap().is_zero());
        let both = Direction::parse(&r, "t1,~t1").unwrap();
        assert_eq!(add(&t1, &t(&r, "~t1")).derive(&both).unwrap(), c(&r, "2"));
    }

    #[test]
    fn unknown_variable_in_direction() {
        let r = ring(2);
        assert!(matches!(Direction::parse(&r, "t9"), Err(Error::UnknownVariable(_))));
    }

    #[test]
    fn truncation_examples() {
        let r = ring(3);
        let t1 = t(&r, "t1");
        let x = add(&add(&Jet::one(&r), &t1), &mul(&t1, &t1));
        let y = x.truncate(1).unwrap();
        assert_eq!(y.ring().order(), 1);
        assert_eq!(y.to_ring(&r).unwrap(), add(&Jet::one(&r), &t1));
        assert_eq!(x.truncate(3).unwrap(), x);
        let t2 = t(&r, "t2");
        let z = add(&mul(&t1, &t(&r, "~t2")), &mul(&mul(&t2, &t2), &t2));
        assert_eq!(z.truncate(2).unwrap().to_ring(&r).unwrap(), mul(&t1, &t(&r, "~t2")));
        assert!(matches!(x.truncate(4), Err(Error::OrderTooLarge { .. })));
    }

    #[test]
    fn conjugation_examples() {
        let r = ring(2);
        let x = t(&r, "t1").scale(&g("i"));
        assert_eq!(x.conj(), t(&r, "~t1").scale(&g("-i")));
        let s = mul(&t(&r, "t1"), &t(&r, "~t1"));
        assert_eq!(s.conj(), s);
    }

    #[test]
    fn evaluation_examples() {
        let r = ring(2);
        let a = add(&Jet::one(&r), &mul(&t(&r, "t1"), &t(&r, "~t1")));
        let p = Point::from_params(&r, &[g("1/2"), g("0")]);
        assert_eq!(a.eval(&p, false).unwrap(), g("5/4"));
        let zero = Point::from_params(&r, &[g("0"), g("0")]);
        assert_eq!(a.eval(&zero, false).unwrap(), g("1"));
        let b = add(&t(&r, "t1"), &t(&r, "~t1").neg());
        let p = Point::new().set("t1", g("i")).set("t2", g("0"));
        assert_eq!(b.eval(&p, false).unwrap(), g("2*i"));
    }

    #[test]
    fn evaluation_errors() {
        let r = ring(2);
        let a = t(&r, "t1");
        let missing = Point::new().set("t1", g("1"));
        assert!(matches!(a.eval(&missing, false), Err(Error::MissingVariable(_))));
        let bad = Point::new().set("t1", g("i")).set("~t1", g("i")).set("t2", g("0"));
        assert!(matches!(a.eval(&bad, false), Err(Error::InconsistentConjugation(_))));
        assert_eq!(a.eval(&bad, true).unwrap(), g("i"));
    }

    #[test]
    fn unit_inverse() {
        let r = ring(3);
        let a = add(&c(&r, "2"), &mul(&t(&r, "t1"), &t(&r, "~t2")));
        assert_eq!(mul(&a, &a.inverse().unwrap()), Jet::one(&r));
        assert_eq!(t(&r, "t1").inverse(), Err(Error::NotAUnit));
    }

    #[test]
    fn polynomial_exact_division() {
        let p = ring(2).polynomial();
        let (t1, t2) = (t(&p, "t1"), t(&p, "t2"));
        let a = add(&t1, &t2);
        let b = add(&t1, &t2.neg());
        let prod = mul(&a, &b);
        assert_eq!(prod.exact_div(&a).unwrap(), b);
        assert_eq!(add(&prod, &Jet::one(&p)).exact_div(&a), Err(Error::InexactDivision));
    }

    #[test]
    fn monomial_enumeration() {
        let r = ring(3);
        let all: Vec<usize> = (0..4).collect();
        assert_eq!(r.monomials_of_degree(&all, 2).len(), 10);
        assert_eq!(r.monomials_up_to(&all, 2).len(), 15);
    }

    fn arb_jet(order: u32) -> impl Strategy<Value = Jet> {
        proptest::collection::vec(((0u16..3, 0u16..3, 0u16..2, 0u16..2), -4i64..5, -3i64..4), 0..6).prop_map(
            move |terms| {
                let r = JetRing::new(["t1", "t2"], order).unwrap();
                Jet::from_terms(
                    &r,
                    terms.into_iter().map(|((a, b, c, d), re, im)| {
                        (Monomial::from_exps(vec![a, b, c, d]), GaussianRational::from_parts((re, 1), (im, 2)))
                    }),
                )
            },
        )
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_jet(3), b in arb_jet(3), c in arb_jet(3)) {
            prop_assert_eq!(mul(&mul(&a, &b), &c), mul(&a, &mul(&b, &c)));
            prop_assert_eq!(mul(&a, &add(&b, &c)), add(&mul(&a, &b), &mul(&a, &c)));
            prop_assert_eq!(mul(&a, &b), mul(&b, &a));
        }

        #[test]
        fn truncation_is_a_ring_map(a in arb_jet(4), b in arb_jet(4), m in 0u32..4) {
            let lhs = mul(&a, &b).truncate(m).unwrap();
            let rhs = mul(&a.truncate(m).unwrap(), &b.truncate(m).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn leibniz(a in arb_jet(3), b in arb_jet(3), v in 0usize..4) {
            let r = a.ring().clone();
            let u = Direction::coordinate(&r, v).unwrap();
            let n1 = r.order() - 1;
            let lhs = mul(&a, &b).derive(&u).unwrap().drop_above(n1);
            let rhs = add(&mul(&a.derive(&u).unwrap(), &b), &mul(&a, &b.derive(&u).unwrap())).drop_above(n1);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn conjugation_is_an_involutive_ring_map(a in arb_jet(3), b in arb_jet(3)) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            prop_assert_eq!(mul(&a, &b).conj(), mul(&a.conj(), &b.conj()));
        }
    }
}
