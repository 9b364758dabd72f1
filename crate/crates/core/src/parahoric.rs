//! Parahoric subalgebras `1_J · H · 1_J` for facet types `J ⊆ S_aff`, their
//! centers `z_m = Θ(r_m) · 1_J`, and the twisted Satake transform
//! characterized by `Θ(Ṡ(h)) · 1_J = h`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::sync::Arc;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::affweyl::ExtWeylElt;
use crate::bernstein::GroupAlgElt;
use crate::error::{Error, Result};
use crate::hecke::{HeckeAlgebra, HeckeElt};
use crate::ringcore::LaurentPoly;
use crate::rootdatum::LatticeElt;

/// A facet type: a subset `J` of `S_aff` generating a finite group `W_J`.
#[derive(Clone, Debug)]
pub struct FacetType {
    pub j: Vec<usize>,
    /// `W_J`, sorted by (length, element).
    pub elements: Vec<ExtWeylElt>,
    /// `1_J = Σ_{w ∈ W_J} i_w`.
    pub one_k: HeckeElt,
    /// `P_J = Σ_{w ∈ W_J} q_w`.
    pub poincare: LaurentPoly,
}

impl FacetType {
    pub fn label(&self) -> String {
        let v: Vec<String> = self.j.iter().map(|s| s.to_string()).collect();
        format!("{{{}}}", v.join(","))
    }
}

/// One row of a Satake table: `h_x = Σ_m s_{x,m} z_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatakeRow {
    pub x: LatticeElt,
    /// Entries in the order of [`crate::rootdatum::Datum::saturation_predecessors`].
    pub entries: Vec<(LatticeElt, LaurentPoly)>,
    pub diag_one: bool,
    /// Every entry is a polynomial in `q` taking positive values at every
    /// prime power.
    pub positive: bool,
    /// Every entry has nonnegative coefficients as a Laurent polynomial.
    pub nonneg_coeffs: bool,
    /// Entries are nonzero exactly on the saturation predecessors of `x`.
    pub triangular: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatakeTable {
    pub datum: String,
    pub facet: Vec<usize>,
    pub rows: Vec<SatakeRow>,
}

impl SatakeTable {
    pub fn all_checks_pass(&self) -> bool {
        self.rows.iter().all(|r| r.diag_one && r.positive && r.triangular)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "datum": self.datum,
            "facet": self.facet,
            "rows": self.rows.iter().map(|r| json!({
                "x": r.x.to_string(),
                "entries": r.entries.iter().map(|(m, c)| json!({"m": m.to_string(), "coeff": c.to_json()})).collect::<Vec<_>>(),
                "checks": {
                    "diag_one": r.diag_one,
                    "positive": r.positive,
                    "nonneg_coeffs": r.nonneg_coeffs,
                    "triangular": r.triangular,
                },
            })).collect::<Vec<_>>(),
        })
    }

    /// Columns `x,m,coeff` and, when `q` is given, `value` at that prime power.
    pub fn to_csv(&self, q: Option<u64>) -> Result<String> {
        let mut out = String::from(if q.is_some() { "x,m,coeff,value\n" } else { "x,m,coeff\n" });
        for r in &self.rows {
            for (m, c) in &r.entries {
                out.push_str(&format!("\"{}\",\"{}\",\"{}\"", r.x, m, c));
                if let Some(q) = q {
                    out.push_str(&format!(",{}", c.eval_q(q)?));
                }
                out.push('\n');
            }
        }
        Ok(out)
    }

    pub fn pretty(&self) -> String {
        let mut out = format!("Satake table for {} on facet {:?}\n", self.datum, self.facet);
        for r in &self.rows {
            out.push_str(&format!("x = [{}]\n", r.x));
            for (m, c) in &r.entries {
                out.push_str(&format!("    m = [{}]: {}\n", m, c));
            }
            out.push_str(&format!(
                "    diag_one={} positive={} nonneg_coeffs={} triangular={}\n",
                r.diag_one, r.positive, r.nonneg_coeffs, r.triangular
            ));
        }
        out
    }
}

/// A polynomial in `q` with positive value at every prime power.
pub fn is_positive_count(c: &LaurentPoly) -> bool {
    c.is_even() && c.min_exp().is_none_or(|e| e >= 0) && c.positive_at_prime_powers()
}

impl HeckeAlgebra {
    /// Builds `W_J`, `1_J` and `P_J`; verifies `1_J · 1_J = P_J · 1_J`.
    pub fn facet(&self, j: &[usize]) -> Result<FacetType> {
        let d = &self.datum;
        let g = d.num_generators();
        let mut js: Vec<usize> = j.to_vec();
        js.sort_unstable();
        js.dedup();
        let label = format!("{js:?}");
        if js.iter().any(|&s| s >= g) {
            return Err(Error::Parse(format!("facet {label} names a generator outside S_aff")));
        }
        for c in 0..d.num_components() {
            if d.component_generators(c).iter().all(|s| js.contains(s)) {
                return Err(Error::InfiniteFacetGroup(label));
            }
        }
        let mut seen: HashSet<ExtWeylElt> = HashSet::new();
        seen.insert(d.identity());
        let mut queue = vec![d.identity()];
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head].clone();
            head += 1;
            for &s in &js {
                let y = d.gen_right(&x, s);
                if seen.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        let mut elements = queue;
        elements.sort_by_key(|w| self.sort_key(w));
        let mut one_k = HeckeElt::zero();
        let mut poincare = LaurentPoly::zero();
        for w in &elements {
            one_k.add_term(w.clone(), &LaurentPoly::one());
            poincare += &self.q_w(w);
        }
        let f = FacetType { j: js, elements, one_k, poincare };
        if self.im_mul(&f.one_k, &f.one_k) != f.one_k.scale(&f.poincare) {
            return Err(Error::CentralityFailure(format!("1_J is not a quasi-idempotent for J = {label}")));
        }
        Ok(f)
    }

    /// The facet of the special vertex: `J` = the finite simple reflections.
    pub fn special_facet(&self) -> FacetType {
        let d = &self.datum;
        let j: Vec<usize> = (0..d.n).map(|i| d.finite_generator_index(i)).collect();
        self.facet(&j).expect("W₀ is finite")
    }

    /// Every facet type with `W_J` finite, sorted by (size, indices).
    pub fn all_facets(&self) -> Vec<FacetType> {
        let g = self.datum.num_generators();
        let mut out = Vec::new();
        for mask in 0u32..(1 << g) {
            let j: Vec<usize> = (0..g).filter(|&s| mask & (1 << s) != 0).collect();
            if let Ok(f) = self.facet(&j) {
                out.push(f);
            }
        }
        out.sort_by(|a, b| a.j.len().cmp(&b.j.len()).then_with(|| a.j.cmp(&b.j)));
        out
    }

    /// `Σ i_w` over the double coset `W_J · y · W_J`.
    pub fn double_coset_sum(&self, f: &FacetType, y: &ExtWeylElt) -> HeckeElt {
        let d = &self.datum;
        let mut set: BTreeSet<ExtWeylElt> = BTreeSet::new();
        for u in &f.elements {
            let uy = d.compose(u, y);
            for v in &f.elements {
                set.insert(d.compose(&uy, v));
            }
        }
        HeckeElt { coeffs: set.into_iter().map(|w| (w, LaurentPoly::one())).collect() }
    }

    /// `h_x = Σ i_w` over `W_J t_x W_J` for antidominant `x`.
    pub fn kelt(&self, f: &FacetType, x: &LatticeElt) -> Result<HeckeElt> {
        if !self.datum.is_antidominant(x) {
            return Err(Error::NotAntidominant(x.to_string()));
        }
        Ok(self.double_coset_sum(f, &self.datum.translation(x)))
    }

    /// `a · 1_J = 1_J · a = P_J · a`.
    pub fn is_biinvariant(&self, f: &FacetType, a: &HeckeElt) -> bool {
        let pa = a.scale(&f.poincare);
        self.im_mul(a, &f.one_k) == pa && self.im_mul(&f.one_k, a) == pa
    }

    /// Product in `H_J`: `P_J⁻¹ · a · b` for bi-invariant `a`, `b`.
    pub fn parahoric_mul(&self, f: &FacetType, a: &HeckeElt, b: &HeckeElt) -> Result<HeckeElt> {
        if !self.is_biinvariant(f, a) || !self.is_biinvariant(f, b) {
            return Err(Error::NotBiinvariant);
        }
        Ok(self.im_mul(a, b).exact_div(&f.poincare)?)
    }

    /// Coordinates of a bi-invariant element over double-coset sums, keyed by
    /// the minimal `(length, word)` representative of each double coset.
    pub fn expand_in_double_cosets(&self, f: &FacetType, h: &HeckeElt) -> Result<Vec<(ExtWeylElt, LaurentPoly)>> {
        let mut res = h.clone();
        let mut out = Vec::new();
        while let Some(w) = res.coeffs.keys().min_by_key(|w| self.sort_key(w)).cloned() {
            let c = res.coeff(&w);
            let dc = self.double_coset_sum(f, &w);
            for (y, _) in &dc.coeffs {
                if res.coeff(y) != c {
                    return Err(Error::NotBiinvariant);
                }
            }
            res.add_scaled(&dc, &-&c);
            out.push((w, c));
        }
        Ok(out)
    }

    /// `z_m = Θ(r_m) · 1_J`, checked against `1_J · Θ(r_m)`.
    pub fn center_elt(&self, f: &FacetType, m: &LatticeElt) -> Result<Arc<HeckeElt>> {
        let key = (f.j.clone(), m.clone());
        if let Some(z) = self.center_memo.read().unwrap().get(&key) {
            return Ok(z.clone());
        }
        let r = self.datum.orbit_sum_r(m)?;
        let th = self.theta_of(&r);
        let z = self.im_mul(&th, &f.one_k);
        if z != self.im_mul(&f.one_k, &th) {
            return Err(Error::CentralityFailure(format!(
                "Θ(r_m) does not commute with 1_J for m = {m}, J = {}",
                f.label()
            )));
        }
        let z = Arc::new(z);
        self.center_memo.write().unwrap().insert(key, z.clone());
        Ok(z)
    }

    /// Antidominant candidates for `z = Σ s_m z_m`: every saturation
    /// predecessor of the antidominant representative of a translation part
    /// occurring in `z`.
    pub fn central_candidates(&self, z: &HeckeElt) -> Result<Vec<LatticeElt>> {
        let d = &self.datum;
        let mut tops: BTreeSet<LatticeElt> = BTreeSet::new();
        for w in z.coeffs.keys() {
            tops.insert(d.antidominant_rep(&w.lambda));
        }
        let mut all: BTreeSet<LatticeElt> = BTreeSet::new();
        for t in &tops {
            all.extend(d.saturation_predecessors(t)?);
        }
        Ok(all.into_iter().collect())
    }

    /// Solves `z = Σ_m s_m z_m` over the given candidates by triangular
    /// elimination. Each step picks a remaining candidate owning a support
    /// element `κ` no other remaining candidate touches, with unit
    /// coefficient there; the coefficient of `z` at `κ` then fixes `s_m`.
    pub fn solve_central(
        &self,
        f: &FacetType,
        z: &HeckeElt,
        candidates: &[LatticeElt],
    ) -> Result<BTreeMap<LatticeElt, LaurentPoly>> {
        let d = &self.datum;
        let mut order: Vec<LatticeElt> = candidates.to_vec();
        order.sort_by(|a, b| d.height(b).cmp(&d.height(a)).then_with(|| a.cmp(b)));
        order.dedup();
        let zs: Vec<Arc<HeckeElt>> = order.iter().map(|m| self.center_elt(f, m)).collect::<Result<_>>()?;
        let mut owners: HashMap<&ExtWeylElt, usize> = HashMap::new();
        for z in &zs {
            for w in z.coeffs.keys() {
                *owners.entry(w).or_default() += 1;
            }
        }
        let mut alive = vec![true; order.len()];
        let mut res = z.clone();
        let mut out = BTreeMap::new();
        for _ in 0..order.len() {
            let mut pick = None;
            'cand: for (k, m) in order.iter().enumerate() {
                if !alive[k] {
                    continue;
                }
                let lead = d.translation(m);
                let zk = &zs[k];
                let good = |w: &ExtWeylElt| owners.get(w) == Some(&1) && zk.coeff(w).is_unit();
                if good(&lead) {
                    pick = Some((k, lead));
                    break 'cand;
                }
                let mut keys: Vec<&ExtWeylElt> = zk.coeffs.keys().collect();
                keys.sort_by_key(|w| self.sort_key(w));
                if let Some(w) = keys.into_iter().find(|w| good(w)) {
                    pick = Some((k, w.clone()));
                    break 'cand;
                }
            }
            let Some((k, kappa)) = pick else {
                return Err(Error::SolveInconsistent("no candidate owns a free pivot".into()));
            };
            let s = res.coeff(&kappa).exact_div(&zs[k].coeff(&kappa))?;
            if !s.is_zero() {
                res.add_scaled(&zs[k], &-&s);
                out.insert(order[k].clone(), s);
            }
            alive[k] = false;
            for w in zs[k].coeffs.keys() {
                if let Some(c) = owners.get_mut(w) {
                    *c -= 1;
                }
            }
        }
        if !res.is_zero() {
            return Err(Error::SolveInconsistent(format!(
                "residual with {} terms remains, e.g. at {}",
                res.len(),
                d.format_elt(res.coeffs.keys().next().unwrap())
            )));
        }
        Ok(out)
    }

    /// `Σ s_m r_m` from solver coefficients.
    pub fn orbit_combination(&self, coeffs: &BTreeMap<LatticeElt, LaurentPoly>) -> Result<GroupAlgElt> {
        let mut r = GroupAlgElt::zero();
        for (m, c) in coeffs {
            r.add_scaled(&self.datum.orbit_sum_r(m)?, c);
        }
        Ok(r)
    }

    /// `Ṡ_J(z)`: the unique `r` in the span of the `r_m` with
    /// `Θ(r) · 1_J = z`. Centrality is checked against `sample`.
    pub fn satake_general(&self, f: &FacetType, z: &HeckeElt, sample: &[HeckeElt]) -> Result<GroupAlgElt> {
        for h in sample {
            if self.im_mul(z, h) != self.im_mul(h, z) {
                return Err(Error::NotCentral(format!("fails to commute with a sample element of H_{}", f.label())));
            }
        }
        let cands = self.central_candidates(z)?;
        let coeffs = self.solve_central(f, z, &cands)?;
        self.orbit_combination(&coeffs)
    }

    /// Transform of a bi-invariant element of the special facet algebra.
    pub fn satake_transform(&self, f: &FacetType, h: &HeckeElt) -> Result<GroupAlgElt> {
        self.satake_general(f, h, &[])
    }

    /// `h_x = Σ_{m ≼ x} s_{x,m} z_m` for the special facet.
    pub fn satake_row(&self, f: &FacetType, x: &LatticeElt) -> Result<SatakeRow> {
        let d = &self.datum;
        let preds = d.saturation_predecessors(x)?;
        let hx = self.kelt(f, x)?;
        let cands = self.central_candidates(&hx)?;
        let coeffs = self.solve_central(f, &hx, &cands)?;
        let pred_set: BTreeSet<&LatticeElt> = preds.iter().collect();
        let triangular = coeffs.keys().all(|m| pred_set.contains(m)) && preds.iter().all(|m| coeffs.contains_key(m));
        let mut entries: Vec<(LatticeElt, LaurentPoly)> =
            preds.iter().filter_map(|m| coeffs.get(m).map(|c| (m.clone(), c.clone()))).collect();
        entries.extend(coeffs.iter().filter(|(m, _)| !pred_set.contains(m)).map(|(m, c)| (m.clone(), c.clone())));
        let diag_one = coeffs.get(x).is_some_and(|c| c.is_one());
        let positive = coeffs.values().all(is_positive_count);
        let nonneg_coeffs = coeffs.values().all(|c| c.has_nonnegative_coeffs());
        Ok(SatakeRow { x: x.clone(), entries, diag_one, positive, nonneg_coeffs, triangular })
    }

    /// Satake rows for the special facet, computed in parallel.
    pub fn satake_table(&self, xs: &[LatticeElt]) -> Result<SatakeTable> {
        let f = self.special_facet();
        for x in xs {
            if !self.datum.is_antidominant(x) {
                return Err(Error::NotAntidominant(x.to_string()));
            }
        }
        let rows: Vec<SatakeRow> = xs.par_iter().map(|x| self.satake_row(&f, x)).collect::<Result<_>>()?;
        Ok(SatakeTable { datum: self.datum.name().to_string(), facet: f.j.clone(), rows })
    }

    /// Like [`HeckeAlgebra::satake_table`] but a positivity failure is a hard
    /// error carrying the serialized row.
    pub fn satake_table_strict(&self, xs: &[LatticeElt]) -> Result<SatakeTable> {
        let t = self.satake_table(xs)?;
        if let Some(r) = t.rows.iter().find(|r| !r.positive) {
            let single = SatakeTable { datum: t.datum.clone(), facet: t.facet.clone(), rows: vec![r.clone()] };
            return Err(Error::NegativeCoefficient(single.to_json().to_string()));
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alg(text: &str) -> HeckeAlgebra {
        HeckeAlgebra::from_json_str(text).unwrap()
    }

    fn a1() -> HeckeAlgebra {
        alg(include_str!("../data/a1.json"))
    }

    #[test]
    fn facet_anchors() {
        let h = a1();
        let d = &h.datum;
        let empty = h.facet(&[]).unwrap();
        assert_eq!(empty.one_k, h.one());
        assert_eq!(empty.poincare, LaurentPoly::one());
        let k = h.facet(&[1]).unwrap();
        assert_eq!(k.one_k, h.one().add(&h.gen(1)));
        assert_eq!(k.poincare, LaurentPoly::from_terms(vec![(0, 1.into()), (2, 1.into())]));
        assert!(matches!(h.facet(&[0, 1]), Err(Error::InfiniteFacetGroup(_))));
        assert_eq!(h.kelt(&k, &d.zero()).unwrap(), k.one_k);
    }

    #[test]
    fn kelt_a1() {
        let h = a1();
        let d = &h.datum;
        let k = h.special_facet();
        let x = d.from_free(&[-1]);
        let hx = h.kelt(&k, &x).unwrap();
        let mut expect = HeckeElt::zero();
        for w in [
            d.translation(&x),
            d.generator(0),
            d.product_of_word(&[1, 0, 1]),
            d.translation(&d.from_free(&[1])),
        ] {
            expect.add_term(w, &LaurentPoly::one());
        }
        assert_eq!(hx, expect);
        assert_eq!(h.kelt(&h.facet(&[]).unwrap(), &x).unwrap(), h.basis(&d.translation(&x)));
        assert_eq!(h.parahoric_mul(&k, &k.one_k, &hx).unwrap(), hx);
        assert_eq!(h.parahoric_mul(&k, &k.one_k, &k.one_k).unwrap(), k.one_k);
    }

    #[test]
    fn a1_satake_row() {
        let h = a1();
        let d = &h.datum;
        let t = h.satake_table(&[d.zero(), d.from_free(&[-1]), d.from_free(&[-2])]).unwrap();
        assert!(t.all_checks_pass(), "{}", t.pretty());
        let row = &t.rows[1];
        assert_eq!(row.entries[0], (d.from_free(&[-1]), LaurentPoly::one()));
        assert_eq!(row.entries[1], (d.zero(), LaurentPoly::q_pow_minus_one(1)));
        assert!(!row.nonneg_coeffs);
    }

    #[test]
    fn center_a1_empty_facet() {
        let h = a1();
        let d = &h.datum;
        let f = h.facet(&[]).unwrap();
        let m = d.from_free(&[-1]);
        let z = h.center_elt(&f, &m).unwrap();
        let expect = h.basis(&d.translation(&m)).add(&h.theta(&d.from_free(&[1])).scale(&LaurentPoly::q_pow(2)));
        assert_eq!(*z, expect);
        assert_eq!(h.im_mul(&z, &h.gen(1)), h.im_mul(&h.gen(1), &z));
        assert_eq!(*h.center_elt(&f, &d.zero()).unwrap(), h.one());
    }

    #[test]
    fn structure_constants_a1() {
        let h = a1();
        let d = &h.datum;
        let k = h.special_facet();
        let hx = h.kelt(&k, &d.from_free(&[-1])).unwrap();
        let p = h.parahoric_mul(&k, &hx, &hx).unwrap();
        let exp = h.expand_in_double_cosets(&k, &p).unwrap();
        let mut rebuilt = HeckeElt::zero();
        for (w, c) in &exp {
            rebuilt.add_scaled(&h.double_coset_sum(&k, w), c);
        }
        assert_eq!(rebuilt, p);
        let reps: Vec<LatticeElt> = exp.iter().map(|(w, _)| d.antidominant_rep(&w.lambda)).collect();
        assert_eq!(reps.len(), 3);
    }

    #[test]
    fn general_satake_recovers_orbit_sums() {
        let h = alg(include_str!("../data/a2.json"));
        let d = &h.datum;
        let k = h.special_facet();
        let m = d.from_free(&[-2, -1]);
        let z = h.center_elt(&k, &m).unwrap();
        let sample = vec![h.kelt(&k, &d.from_free(&[-1, -1])).unwrap()];
        assert_eq!(h.satake_general(&k, &z, &sample).unwrap(), d.orbit_sum_r(&m).unwrap());
        let not_central = h.kelt(&h.facet(&[]).unwrap(), &m).unwrap();
        assert!(h.satake_general(&k, &h.gen(1), &[not_central]).is_err());
    }
}
