//! Pseudo-random Beltrami series for property sweeps.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use defcohom::cohomology::{CohomologyBasis, Kind};
use defcohom::deform::mc_solve;
use defcohom::vform::vform_basis;
use defcohom::{ComplexModel, GaussianRational, Jet, Monomial, VForm};

fn small(rng: &mut ChaCha8Rng) -> GaussianRational {
    GaussianRational::from_parts((rng.gen_range(-3..=3), rng.gen_range(1..=3)), (rng.gen_range(-2..=2), 1))
}

/// Half Maurer-Cartan by construction (solved from closed first-order
/// data), half arbitrary.
pub fn random_series(model: &ComplexModel, rng: &mut ChaCha8Rng, k: usize) -> VForm {
    let order = rng.gen_range(1..=3);
    let ring = model.ring_with_order(order);
    let nv = ring.num_vars();
    if k % 2 == 0 {
        let basis = CohomologyBasis::new(model, Kind::Tangent { q: 1 }).unwrap();
        let mut phi1 = VForm::zero(model.dim(), &ring);
        for rep in basis.representatives(&ring) {
            let v = rng.gen_range(0..ring.num_params());
            let c = Jet::monomial(&ring, Monomial::var(nv, v), small(rng));
            phi1 = phi1.add(&rep.as_vform().unwrap().mul_jet(&c).unwrap()).unwrap();
        }
        let (s, report) = mc_solve(model, &phi1, order).unwrap();
        let r = ring.with_order(report.solved_order.max(1));
        return s.phi.try_map_ring(&r, |c| c.to_ring(&r)).unwrap();
    }
    let mut phi = VForm::zero(model.dim(), &ring);
    for _ in 0..rng.gen_range(1..=4) {
        let cells = vform_basis(model.dim(), 1);
        let (mask, vec) = cells[rng.gen_range(0..cells.len())];
        let mut mono = Monomial::var(nv, rng.gen_range(0..nv));
        if order > 1 && rng.gen_bool(0.3) {
            mono = mono.mul(&Monomial::var(nv, rng.gen_range(0..nv)));
        }
        phi.add_term(mask, vec, &Jet::monomial(&ring, mono, small(rng)));
    }
    phi
}

/// A Maurer-Cartan series that is an exact polynomial solution, so it can
/// be evaluated at numeric points: first-order data from random closed
/// classes, solved until the recursion terminates.
pub fn exact_series(model: &ComplexModel, rng: &mut ChaCha8Rng) -> VForm {
    let basis = CohomologyBasis::new(model, Kind::Tangent { q: 1 }).unwrap();
    loop {
        let ring = model.ring_with_order(4);
        let nv = ring.num_vars();
        let mut phi1 = VForm::zero(model.dim(), &ring);
        for rep in basis.representatives(&ring) {
            if rng.gen_bool(0.3) {
                continue;
            }
            let v = rng.gen_range(0..ring.num_params());
            let c = Jet::monomial(&ring, Monomial::var(nv, v), small(rng));
            phi1 = phi1.add(&rep.as_vform().unwrap().mul_jet(&c).unwrap()).unwrap();
        }
        let (s, report) = mc_solve(model, &phi1, 4).unwrap();
        let poly = ring.polynomial();
        let exact = s.phi.try_map_ring(&poly, |c| c.to_ring(&poly)).unwrap();
        if report.complete() && model.mc_defect(&exact).unwrap().is_zero() {
            return s.phi;
        }
    }
}
