//! Property suites run by `verify`. Every check is exact; random samples come
//! from a fixed-seed generator so reports are reproducible.

use std::collections::BTreeMap;
use std::sync::Arc;

use parahecke::hecke::push_elt;
use parahecke::parahoric::is_positive_count;
use parahecke::{Datum, Error, ExtWeylElt, GroupAlgElt, HeckeAlgebra, HeckeElt, LatticeElt, LaurentPoly};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub const BRAID_WORDS: usize = 500;
pub const MAX_WORD: usize = 8;
pub const INVERSE_LEN: usize = 5;
pub const LENGTH_BALL: usize = 6;
pub const LENGTH_HEIGHT: i64 = 3;
pub const THETA_HEIGHT: i64 = 3;
pub const ROUNDTRIP_SAMPLES: usize = 200;
pub const ROUNDTRIP_LEN: usize = 5;
pub const SMALL_HEIGHT: i64 = 2;
pub const SATAKE_HEIGHT: i64 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Presentation,
    Bern,
    Center,
    Satake,
    Compat,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["presentation", "bern", "center", "satake", "compat", "all"];

    pub fn parse(s: &str) -> Option<Suite> {
        Some(match s {
            "presentation" => Suite::Presentation,
            "bern" => Suite::Bern,
            "center" => Suite::Center,
            "satake" => Suite::Satake,
            "compat" => Suite::Compat,
            "all" => Suite::All,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        Suite::NAMES[self as usize]
    }

    pub fn run(self, h: &HeckeAlgebra) -> Vec<Check> {
        match self {
            Suite::Presentation => {
                let mut v = presentation_checks(h);
                v.extend(length_checks(h));
                v
            }
            Suite::Bern => bern_checks(h),
            Suite::Center => center_checks(h),
            Suite::Satake => satake_checks(h),
            Suite::Compat => compat_checks(h),
            Suite::All => [Suite::Presentation, Suite::Bern, Suite::Center, Suite::Satake, Suite::Compat]
                .iter()
                .flat_map(|s| s.run(h))
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub cases: usize,
    pub skipped: Option<String>,
    pub counterexample: Option<Value>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({"name": self.name, "passed": self.passed(), "cases": self.cases});
        if let Some(s) = &self.skipped {
            v["skipped"] = json!(s);
        }
        if let Some(c) = &self.counterexample {
            v["counterexample"] = c.clone();
        }
        v
    }
}

struct Tally {
    check: Check,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally { check: Check { name: name.to_string(), cases: 0, skipped: None, counterexample: None } }
    }

    fn case(&mut self, ok: bool, ce: impl FnOnce() -> Value) {
        self.check.cases += 1;
        if !ok && self.check.counterexample.is_none() {
            self.check.counterexample = Some(ce());
        }
    }

    fn result<T>(&mut self, r: parahecke::Result<T>, input: impl FnOnce() -> Value) -> Option<T> {
        match r {
            Ok(t) => Some(t),
            Err(e) => {
                self.case(false, || json!({"input": input(), "error": e.to_string()}));
                None
            }
        }
    }

    fn skip(mut self, why: String) -> Check {
        self.check.skipped = Some(why);
        self.check
    }

    fn done(self) -> Check {
        self.check
    }
}

fn rng_for(d: &Datum, salt: u64) -> ChaCha8Rng {
    let mut seed = 0x9e37_79b9_7f4a_7c15u64 ^ salt;
    for b in d.name().bytes() {
        seed = seed.rotate_left(7) ^ u64::from(b);
    }
    ChaCha8Rng::seed_from_u64(seed)
}

fn lat(m: &LatticeElt) -> Value {
    json!(m.to_string())
}

fn elt(d: &Datum, w: &ExtWeylElt) -> Value {
    json!(d.format_elt(w))
}

/// The identity, the generators of `Ω` and their inverses.
pub fn omega_sample(d: &Datum) -> Vec<ExtWeylElt> {
    let mut v = vec![d.identity()];
    for o in &d.omega_generators {
        v.push(o.clone());
        v.push(d.inverse(o));
    }
    v.sort();
    v.dedup();
    v
}

/// All elements of `W_aff · Ω_sample` of length at most `n`, with lengths.
pub fn extended_ball(d: &Datum, n: usize) -> Vec<(ExtWeylElt, usize)> {
    let ball = d.affine_ball(n);
    let mut out = Vec::new();
    for om in omega_sample(d) {
        for (w, l) in &ball {
            out.push((d.compose(w, &om), *l));
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Every lattice element whose antidominant representative has height ≤ `h`.
pub fn lattice_ball(d: &Datum, h: i64) -> Vec<LatticeElt> {
    let mut out: Vec<LatticeElt> = d.antidominant_up_to_height(h).iter().flat_map(|m| d.orbit(m)).collect();
    out.sort();
    out.dedup();
    out
}

fn word_product(h: &HeckeAlgebra, word: &[usize]) -> HeckeElt {
    word.iter().fold(h.one(), |acc, &s| h.mul_gen_right(&acc, s))
}

fn word_product_left(h: &HeckeAlgebra, word: &[usize]) -> HeckeElt {
    word.iter().rev().fold(h.one(), |acc, &s| h.mul_gen_left(s, &acc))
}

fn random_elt(h: &HeckeAlgebra, pool: &[(ExtWeylElt, usize)], rng: &mut ChaCha8Rng) -> HeckeElt {
    let mut x = HeckeElt::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let (w, _) = pool.choose(rng).unwrap();
        let c = LaurentPoly::monomial(rng.gen_range(-3..=3), 2 * rng.gen_range(-1..=1));
        x.add_term(w.clone(), &c);
    }
    if x.is_zero() {
        x = h.one();
    }
    x
}

pub fn presentation_checks(h: &HeckeAlgebra) -> Vec<Check> {
    let d = &h.datum;
    let g = d.num_generators();
    let mut rng = rng_for(d, 1);
    let pairs: Vec<(usize, usize, usize)> = (0..g)
        .flat_map(|s| (0..g).map(move |t| (s, t)))
        .filter(|&(s, t)| s != t && d.coxeter[s][t] != 0 && d.coxeter[s][t] as usize <= MAX_WORD)
        .map(|(s, t)| (s, t, d.coxeter[s][t] as usize))
        .collect();

    let mut braid = Tally::new("braid_invariance");
    let mut assoc = Tally::new("left_right_products_agree");
    let mut matsumoto = Tally::new("reduced_words_give_basis");
    for _ in 0..BRAID_WORDS {
        let (w1, w2) = match pairs.choose(&mut rng) {
            Some(&(s, t, m)) => {
                let extra = rng.gen_range(0..=MAX_WORD - m);
                let mut base: Vec<usize> = (0..extra).map(|_| rng.gen_range(0..g)).collect();
                let at = rng.gen_range(0..=base.len());
                let a: Vec<usize> = (0..m).map(|k| if k % 2 == 0 { s } else { t }).collect();
                let b: Vec<usize> = (0..m).map(|k| if k % 2 == 0 { t } else { s }).collect();
                let mut w2 = base.clone();
                base.splice(at..at, a);
                w2.splice(at..at, b);
                (base, w2)
            }
            None => {
                let n = rng.gen_range(0..=MAX_WORD);
                let w: Vec<usize> = (0..n).map(|_| rng.gen_range(0..g)).collect();
                (w.clone(), w)
            }
        };
        let p1 = word_product(h, &w1);
        let p2 = word_product(h, &w2);
        braid.case(p1 == p2, || json!({"word": w1, "moved": w2}));
        assoc.case(p1 == word_product_left(h, &w1), || json!({"word": w1}));
        let bytes: Vec<u8> = w1.iter().map(|&s| s as u8).collect();
        let w = d.product_of_word(&bytes);
        if d.length(&w) == w1.len() {
            matsumoto.case(p1 == h.basis(&w), || json!({"word": w1}));
        }
    }
    if pairs.is_empty() {
        braid.check.skipped = Some("no finite braid relations among generators".into());
    }

    let mut quad = Tally::new("quadratic_relation");
    for s in 0..g {
        let lhs = h.im_mul(&h.gen(s), &h.gen(s));
        let qs = h.q_s(s);
        let rhs = h.gen(s).scale(&(&qs - &LaurentPoly::one())).add(&h.one().scale(&qs));
        quad.case(lhs == rhs, || json!({"generator": s}));
    }

    let mut inv = Tally::new("inverse_basis");
    for (w, _) in extended_ball(d, INVERSE_LEN) {
        let x = h.inverse_basis(&w);
        let ok = h.im_mul(&h.basis(&w), &x) == h.one() && h.im_mul(&x, &h.basis(&w)) == h.one();
        inv.case(ok, || json!({"w": elt(d, &w)}));
    }

    let pool = extended_ball(d, 3);
    let mut invol = Tally::new("vee_antiinvolution");
    let mut degree = Tally::new("degree_homomorphism");
    for _ in 0..100 {
        let a = random_elt(h, &pool, &mut rng);
        let b = random_elt(h, &pool, &mut rng);
        let ab = h.im_mul(&a, &b);
        let ok = h.vee(&h.vee(&a)) == a && h.vee(&ab) == h.im_mul(&h.vee(&b), &h.vee(&a));
        invol.case(ok, || json!({"a": h.to_json(&a), "b": h.to_json(&b)}));
        degree.case(h.degree(&ab) == &h.degree(&a) * &h.degree(&b), || json!({"a": h.to_json(&a), "b": h.to_json(&b)}));
    }
    vec![braid.done(), assoc.done(), matsumoto.done(), quad.done(), inv.done(), invol.done(), degree.done()]
}

pub fn length_checks(h: &HeckeAlgebra) -> Vec<Check> {
    let d = &h.datum;
    let mut wall = Tally::new("length_wall_count_vs_reduced_word");
    for (w, l) in extended_ball(d, LENGTH_BALL) {
        let (word, om) = d.reduced_word(&w);
        let rebuilt = d.compose(&d.product_of_word(&word), &om);
        let ok = d.length(&w) == l && word.len() == l && rebuilt == w && d.length(&om) == 0;
        wall.case(ok, || json!({"w": elt(d, &w), "bfs_length": l, "wall_length": d.length(&w)}));
    }

    let anti = d.antidominant_up_to_height(LENGTH_HEIGHT);
    let len_t = |m: &LatticeElt| d.length(&d.translation(m));
    let mut add = Tally::new("length_antidominant_additive");
    for a in &anti {
        for b in &anti {
            let ok = len_t(&d.add(a, b)) == len_t(a) + len_t(b);
            add.case(ok, || json!({"m1": lat(a), "m2": lat(b)}));
        }
    }
    let mut split = Tally::new("length_translation_times_finite");
    let mut conj = Tally::new("length_conjugation_invariant");
    for m in &anti {
        let tm = d.translation(m);
        let tneg = d.translation(&d.neg(m));
        for u in 0..d.w0_order() as u16 {
            let w = d.finite_elt(u);
            let ok = d.length(&d.compose(&tm, &w)) == d.length(&tm) + d.length(&w)
                && d.length(&d.compose(&w, &tneg)) == d.length(&w) + d.length(&tneg);
            split.case(ok, || json!({"m": lat(m), "u": elt(d, &w)}));
            let um = d.act_finite(u, m);
            conj.case(len_t(&um) == len_t(m), || json!({"m": lat(m), "u": elt(d, &w)}));
        }
    }
    vec![wall.done(), add.done(), split.done(), conj.done()]
}

pub fn bern_checks(h: &HeckeAlgebra) -> Vec<Check> {
    let d = &h.datum;
    let mut rng = rng_for(d, 2);

    let ball = lattice_ball(d, THETA_HEIGHT);
    let mut mult = Tally::new("theta_multiplicative");
    for (k, a) in ball.iter().enumerate() {
        for b in &ball[k..] {
            let ta = h.theta(a);
            let tb = h.theta(b);
            let ab = h.im_mul(&ta, &tb);
            let ok = ab == *h.theta(&d.add(a, b)) && ab == h.im_mul(&tb, &ta);
            mult.case(ok, || json!({"m1": lat(a), "m2": lat(b)}));
        }
    }

    let pool = extended_ball(d, ROUNDTRIP_LEN);
    let mut trip = Tally::new("change_basis_roundtrip");
    for _ in 0..ROUNDTRIP_SAMPLES {
        let x = random_elt(h, &pool, &mut rng);
        if let Some(b) = trip.result(h.im_to_bern(&x), || h.to_json(&x)) {
            trip.case(h.bern_to_im(&b) == x, || h.to_json(&x));
        }
    }

    let small = lattice_ball(d, SMALL_HEIGHT);
    let w0 = d.finite_elt(d.longest);
    let iw0 = h.basis(&w0);
    let iw0_inv = h.inverse_basis(&w0);
    let mut vee = Tally::new("vee_conjugates_theta");
    for m in &small {
        let lhs = h.vee(&h.theta(m));
        let mm = d.act_finite(d.longest, &d.neg(m));
        let rhs = h.im_mul(&h.im_mul(&iw0_inv, &h.theta(&mm)), &iw0);
        vee.case(lhs == rhs, || json!({"m": lat(m)}));
    }

    let mut rel = Tally::new("bernstein_relation");
    let mut skipped = None;
    'outer: for m in &small {
        for i in 0..d.n {
            match h.bernstein_relation_check(m, i) {
                Ok(ok) => rel.case(ok, || json!({"m": lat(m), "simple": i})),
                Err(Error::UnsupportedParameters) => {
                    skipped = Some("UnsupportedParameters: needs equal parameters and a simply-laced datum".to_string());
                    break 'outer;
                }
                Err(e) => rel.case(false, || json!({"m": lat(m), "simple": i, "error": e.to_string()})),
            }
        }
    }
    let rel = match skipped {
        Some(why) => rel.skip(why),
        None => rel.done(),
    };

    let mut inv = Tally::new("orbit_sums_dot_invariant");
    for m in d.antidominant_up_to_height(THETA_HEIGHT) {
        if let Some(r) = inv.result(d.orbit_sum_r(&m), || lat(&m)) {
            for u in 0..d.w0_order() as u16 {
                inv.case(d.dot_act(u, &r) == r, || json!({"m": lat(&m), "u": u}));
            }
        }
    }
    vec![mult.done(), trip.done(), vee.done(), rel, inv.done()]
}

pub fn center_checks(h: &HeckeAlgebra) -> Vec<Check> {
    let d = &h.datum;
    let anti = d.antidominant_up_to_height(SMALL_HEIGHT);
    let mut comm = Tally::new("center_commutes_with_double_cosets");
    let mut basis = Tally::new("center_products_expand_uniquely");
    let mut closure = Tally::new("parahoric_products_biinvariant");
    for f in h.all_facets() {
        let fj = json!(f.j);
        let kelts: Vec<(LatticeElt, HeckeElt)> =
            anti.iter().filter_map(|x| h.kelt(&f, x).ok().map(|k| (x.clone(), k))).collect();
        let mut zs: BTreeMap<LatticeElt, Arc<HeckeElt>> = BTreeMap::new();
        for m in &anti {
            let Some(z) = comm.result(h.center_elt(&f, m), || json!({"facet": fj, "m": lat(m)})) else { continue };
            for (x, k) in &kelts {
                comm.case(h.im_mul(&z, k) == h.im_mul(k, &z), || json!({"facet": fj, "m": lat(m), "x": lat(x)}));
            }
            zs.insert(m.clone(), z);
        }
        let zl: Vec<(&LatticeElt, &Arc<HeckeElt>)> = zs.iter().collect();
        for (k, (m1, z1)) in zl.iter().enumerate() {
            for (m2, z2) in &zl[k..] {
                let input = || json!({"facet": fj, "m1": lat(m1), "m2": lat(m2)});
                let Some(p) = basis.result(h.parahoric_mul(&f, z1, z2), input) else { continue };
                let Some(c) = basis.result(h.central_candidates(&p), input) else { continue };
                let Some(coeffs) = basis.result(h.solve_central(&f, &p, &c), input) else { continue };
                let r1 = d.orbit_sum_r(m1).unwrap();
                let r2 = d.orbit_sum_r(m2).unwrap();
                let ok = h.orbit_combination(&coeffs).map(|r| r == r1.mul(&r2, d)).unwrap_or(false);
                basis.case(ok, input);
            }
        }
        for (k, (x, hx)) in kelts.iter().enumerate() {
            for (y, hy) in &kelts[k..] {
                let input = || json!({"facet": fj, "x": lat(x), "y": lat(y)});
                let Some(p) = closure.result(h.parahoric_mul(&f, hx, hy), input) else { continue };
                let ok = h.is_biinvariant(&f, &p) && h.expand_in_double_cosets(&f, &p).is_ok();
                closure.case(ok, input);
            }
        }
    }
    vec![comm.done(), basis.done(), closure.done()]
}

/// `Σ_m s_{x,m} r_m` for a table row.
pub fn row_transform(d: &Datum, entries: &[(LatticeElt, LaurentPoly)]) -> parahecke::Result<GroupAlgElt> {
    let mut r = GroupAlgElt::zero();
    for (m, c) in entries {
        r.add_scaled(&d.orbit_sum_r(m)?, c);
    }
    Ok(r)
}

pub fn satake_checks(h: &HeckeAlgebra) -> Vec<Check> {
    let d = &h.datum;
    let xs = d.antidominant_up_to_height(SATAKE_HEIGHT);
    let mut diag = Tally::new("satake_unit_diagonal");
    let mut tri = Tally::new("satake_support_is_saturation_predecessors");
    let mut pos = Tally::new("satake_entries_positive_at_prime_powers");
    let mut nonneg = Tally::new("satake_entries_nonnegative_coefficients");
    let mut shifted = Tally::new("satake_entries_nonnegative_in_powers_of_q_minus_one");
    let mut mini = Tally::new("satake_minuscule_rows_singleton");
    let mut inv = Tally::new("satake_transform_dot_invariant");
    let mut mult = Tally::new("satake_multiplicative");
    let table = match h.satake_table(&xs) {
        Ok(t) => t,
        Err(e) => {
            diag.case(false, || json!({"error": e.to_string()}));
            return vec![diag.done()];
        }
    };
    let mut transforms = Vec::new();
    for row in &table.rows {
        let x = &row.x;
        let dump = || json!({"x": lat(x), "entries": row.entries.iter().map(|(m, c)| json!([m.to_string(), c.to_string()])).collect::<Vec<_>>()});
        diag.case(row.diag_one, dump);
        tri.case(row.triangular, dump);
        for (m, c) in &row.entries {
            pos.case(is_positive_count(c), || json!({"x": lat(x), "m": lat(m), "entry": c.to_string()}));
            nonneg.case(c.has_nonnegative_coeffs(), || json!({"x": lat(x), "m": lat(m), "entry": c.to_string()}));
            shifted.case(c.nonnegative_in_q_minus_one(), || json!({"x": lat(x), "m": lat(m), "entry": c.to_string()}));
        }
        if d.saturation_predecessors(x).map(|p| p.len() == 1).unwrap_or(false) {
            mini.case(row.entries.len() == 1 && row.entries[0].1.is_one(), dump);
        }
        let t = row_transform(d, &row.entries).unwrap();
        for u in 0..d.w0_order() as u16 {
            inv.case(d.dot_act(u, &t) == t, || json!({"x": lat(x), "u": u}));
        }
        transforms.push(t);
    }
    let f = h.special_facet();
    let kelts: Vec<HeckeElt> = xs.iter().map(|x| h.kelt(&f, x).unwrap()).collect();
    for i in 0..xs.len() {
        for j in i..xs.len() {
            let input = || json!({"x": lat(&xs[i]), "y": lat(&xs[j])});
            let Some(p) = mult.result(h.parahoric_mul(&f, &kelts[i], &kelts[j]), input) else { continue };
            let Some(tp) = mult.result(h.satake_transform(&f, &p), input) else { continue };
            mult.case(tp == transforms[i].mul(&transforms[j], d), input);
        }
    }
    vec![diag.done(), tri.done(), pos.done(), nonneg.done(), shifted.done(), mini.done(), inv.done(), mult.done()]
}

pub fn compat_checks(h: &HeckeAlgebra) -> Vec<Check> {
    let d = &h.datum;
    let anti = d.antidominant_up_to_height(SMALL_HEIGHT);
    let facets = h.all_facets();
    let mut diagram = Tally::new("bernstein_satake_diagram_commutes");
    let mut general = Tally::new("satake_general_inverts_center");
    for m in &anti {
        let r = d.orbit_sum_r(m).unwrap();
        let z = h.theta_of(&r);
        for small in &facets {
            let zs = h.im_mul(&z, &small.one_k);
            let input = || json!({"facet": small.j, "m": lat(m)});
            if let Some(s) = general.result(h.satake_general(small, &zs, &[]), input) {
                general.case(s == r, input);
            }
            for big in facets.iter().filter(|b| small.j.iter().all(|s| b.j.contains(s))) {
                let input = || json!({"small": small.j, "big": big.j, "m": lat(m)});
                let Some(zb) = diagram.result(h.parahoric_mul(small, &zs, &big.one_k), input) else { continue };
                let Some(s) = diagram.result(h.satake_general(big, &zb, &[]), input) else { continue };
                diagram.case(s == r && h.theta_of(&s) == z, input);
            }
        }
    }
    let mut checks = vec![diagram.done(), general.done()];
    checks.extend(pushforward_checks(h));
    checks
}

/// Pushforward to the quotient by the full torsion subgroup.
pub fn pushforward_checks(h: &HeckeAlgebra) -> Vec<Check> {
    let d = &h.datum;
    let center = Tally::new("pushforward_intertwines_center");
    let rows = Tally::new("pushforward_reproduces_satake_rows");
    if d.torsion.is_empty() {
        return vec![center.skip("datum has no torsion".into()), rows.skip("datum has no torsion".into())];
    }
    let (mut center, mut rows) = (center, rows);
    let qd = match d.quotient(&d.torsion) {
        Ok(q) => q,
        Err(e) => {
            center.case(false, || json!({"error": e.to_string()}));
            return vec![center.done(), rows.done()];
        }
    };
    let target = HeckeAlgebra::new(Arc::new(qd));
    let td = &target.datum;
    let push_lat = |m: &LatticeElt| push_elt(td, &d.translation(m)).lambda;
    let anti = d.antidominant_up_to_height(SMALL_HEIGHT);
    for (f, tf) in h.all_facets().iter().zip(target.all_facets().iter()) {
        for m in &anti {
            let input = || json!({"facet": f.j, "m": lat(m)});
            let Some(z) = center.result(h.center_elt(f, m), input) else { continue };
            let Some(tz) = center.result(target.center_elt(tf, &push_lat(m)), input) else { continue };
            center.case(f.j == tf.j && h.pushforward_quotient(&z, &target) == *tz, input);
        }
    }
    let xs = d.antidominant_up_to_height(SATAKE_HEIGHT);
    let f = h.special_facet();
    let tf = target.special_facet();
    for x in &xs {
        let input = || json!({"x": lat(x)});
        let Some(row) = rows.result(h.satake_row(&f, x), input) else { continue };
        let Some(trow) = rows.result(target.satake_row(&tf, &push_lat(x)), input) else { continue };
        let mut pushed: BTreeMap<LatticeElt, LaurentPoly> = BTreeMap::new();
        for (m, c) in &row.entries {
            let e = pushed.entry(push_lat(m)).or_insert_with(LaurentPoly::zero);
            *e += c;
        }
        pushed.retain(|_, c| !c.is_zero());
        let expect: BTreeMap<LatticeElt, LaurentPoly> = trow.entries.into_iter().collect();
        rows.case(pushed == expect, input);
    }
    vec![center.done(), rows.done()]
}

/// One datum's report for a suite.
pub fn report_json(suite: Suite, h: &HeckeAlgebra, checks: &[Check]) -> Value {
    json!({
        "suite": suite.name(),
        "datum": h.datum.name(),
        "passed": checks.iter().all(Check::passed),
        "checks": checks.iter().map(Check::to_json).collect::<Vec<_>>(),
    })
}
