//! Dolbeault numbers from raw structure constants by dense elimination,
//! sharing nothing with the engine beyond scalar arithmetic.

use std::collections::BTreeMap;

use defcohom::model::ModelDocument;
use defcohom::GaussianRational as Q;

pub struct Oracle {
    m: usize,
    dgen: Vec<BTreeMap<u32, Q>>,
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

fn wedge(a: u32, b: u32) -> Option<(u32, bool)> {
    if a & b != 0 {
        return None;
    }
    let swaps: usize = bits(b).map(|j| bits(a).filter(|&i| i > j).count()).sum();
    Some((a | b, swaps % 2 == 0))
}

impl Oracle {
    pub fn new(doc: &ModelDocument) -> Self {
        let m = doc.dim;
        let mut dgen = vec![BTreeMap::new(); 2 * m];
        for (k, terms) in &doc.structure {
            let k: usize = k.parse::<usize>().unwrap() - 1;
            for t in terms {
                for bar in [false, true] {
                    let (holo, anti) = if bar { (&t.anti, &t.holo) } else { (&t.holo, &t.anti) };
                    let coeff = if bar { t.coeff.conj() } else { t.coeff.clone() };
                    let mut mask = 0u32;
                    let mut positive = true;
                    for g in holo.iter().map(|i| i - 1).chain(anti.iter().map(|i| m + i - 1)) {
                        let (next, s) = wedge(mask, 1 << g).unwrap();
                        mask = next;
                        positive ^= !s;
                    }
                    let target = if bar { m + k } else { k };
                    let e = dgen[target].entry(mask).or_insert_with(Q::zero);
                    *e += &coeff.signed(positive);
                }
            }
        }
        Oracle { m, dgen }
    }

    fn bidegree(&self, mask: u32) -> (usize, usize) {
        let low = (1u32 << self.m) - 1;
        ((mask & low).count_ones() as usize, (mask >> self.m).count_ones() as usize)
    }

    fn d(&self, mask: u32) -> BTreeMap<u32, Q> {
        let mut out: BTreeMap<u32, Q> = BTreeMap::new();
        for (j, g) in bits(mask).enumerate() {
            let left = mask & ((1 << g) - 1);
            let right = mask & !((1 << (g + 1)) - 1);
            for (dm, c) in &self.dgen[g] {
                let Some((lm, s1)) = wedge(left, *dm) else { continue };
                let Some((full, s2)) = wedge(lm, right) else { continue };
                let e = out.entry(full).or_insert_with(Q::zero);
                *e += &c.clone().signed(s1 == s2 && j % 2 == 0 || s1 != s2 && j % 2 == 1);
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn forms(&self, p: usize, q: usize) -> Vec<u32> {
        (0..1u32 << (2 * self.m)).filter(|&x| self.bidegree(x) == (p, q)).collect()
    }

    /// Rank of delbar from `A^{p,q}` to `A^{p,q+1}`.
    fn delbar_rank(&self, p: usize, q: usize) -> usize {
        if q >= self.m {
            return 0;
        }
        let cols = self.forms(p, q + 1);
        let rows: Vec<Vec<Q>> = self
            .forms(p, q)
            .into_iter()
            .map(|x| {
                let dx = self.d(x);
                cols.iter().map(|c| dx.get(c).cloned().unwrap_or_else(Q::zero)).collect()
            })
            .collect();
        rank(rows)
    }

    pub fn h(&self, p: usize, q: usize) -> usize {
        let incoming = if q == 0 { 0 } else { self.delbar_rank(p, q - 1) };
        self.forms(p, q).len() - self.delbar_rank(p, q) - incoming
    }

    /// `d^2` on every basis form, as a sanity check on the oracle itself.
    pub fn d_squared_vanishes(&self) -> bool {
        (0..1u32 << (2 * self.m)).all(|x| {
            let mut acc: BTreeMap<u32, Q> = BTreeMap::new();
            for (y, c) in self.d(x) {
                for (z, e) in self.d(y) {
                    *acc.entry(z).or_insert_with(Q::zero) += &(&c * &e);
                }
            }
            acc.values().all(Q::is_zero)
        })
    }
}

pub fn rank(mut rows: Vec<Vec<Q>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].inv().unwrap();
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = &rows[i][c] * &inv;
            for j in c..ncols {
                let sub = &f * &rows[r][j];
                rows[i][j] -= &sub;
            }
        }
        r += 1;
    }
    r
}
