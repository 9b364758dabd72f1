//! Bernstein elements `Θ_m`, the twisted dot-action of `W₀` on the group
//! algebra `R = Z[v^{±1}][Λ]`, orbit sums `r_m`, and the change of basis
//! between `{i_w}` and `{Θ_m · i_w}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hecke::{HeckeAlgebra, HeckeElt};
use crate::ringcore::LaurentPoly;
use crate::rootdatum::{Datum, LatticeElt};

/// An element of the group algebra `R = Z[v^{±1}][Λ]`.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct GroupAlgElt {
    pub coeffs: BTreeMap<LatticeElt, LaurentPoly>,
}

impl GroupAlgElt {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(m: LatticeElt, c: LaurentPoly) -> Self {
        let mut r = Self::zero();
        r.add_term(m, &c);
        r
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, m: &LatticeElt) -> LaurentPoly {
        self.coeffs.get(m).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, m: LatticeElt, c: &LaurentPoly) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(m.clone()).or_default();
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&m);
        }
    }

    pub fn add_scaled(&mut self, other: &GroupAlgElt, c: &LaurentPoly) {
        for (m, x) in &other.coeffs {
            self.add_term(m.clone(), &(x * c));
        }
    }

    pub fn mul(&self, other: &GroupAlgElt, d: &Datum) -> GroupAlgElt {
        let mut out = GroupAlgElt::zero();
        for (a, x) in &self.coeffs {
            for (b, y) in &other.coeffs {
                out.add_term(d.add(a, b), &(x * y));
            }
        }
        out
    }

    /// Sorted by `(E(m), m)`.
    pub fn to_json(&self, d: &Datum) -> Value {
        let mut v: Vec<_> = self.coeffs.iter().collect();
        v.sort_by(|a, b| d.exponent_e(a.0).cmp(&d.exponent_e(b.0)).then_with(|| a.0.cmp(b.0)));
        Value::Array(
            v.into_iter()
                .map(|(m, c)| json!({"lattice": m.to_string(), "coeff": c.to_json()}))
                .collect(),
        )
    }

    pub fn pretty(&self, d: &Datum) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut v: Vec<_> = self.coeffs.iter().collect();
        v.sort_by(|a, b| d.exponent_e(a.0).cmp(&d.exponent_e(b.0)).then_with(|| a.0.cmp(b.0)));
        v.into_iter()
            .map(|(m, c)| format!("({c})·e[{m}]"))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Coordinates in the basis `{Θ_m · i_w : m ∈ Λ, w ∈ W₀}`.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct BernsteinElt {
    pub coeffs: BTreeMap<(LatticeElt, u16), LaurentPoly>,
}

impl BernsteinElt {
    pub fn add_term(&mut self, m: LatticeElt, w: u16, c: &LaurentPoly) {
        if c.is_zero() {
            return;
        }
        let key = (m, w);
        let e = self.coeffs.entry(key.clone()).or_default();
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    /// `[{lattice, finite_weyl, coeff}]` ordered by `(E(m), m, word)`.
    pub fn to_json(&self, d: &Datum) -> Value {
        let mut v: Vec<_> = self.coeffs.iter().collect();
        v.sort_by(|a, b| {
            d.exponent_e(&a.0 .0)
                .cmp(&d.exponent_e(&b.0 .0))
                .then_with(|| a.0 .0.cmp(&b.0 .0))
                .then_with(|| d.w0[a.0 .1 as usize].word.cmp(&d.w0[b.0 .1 as usize].word))
        });
        let c = d.num_components();
        Value::Array(
            v.into_iter()
                .map(|((m, w), x)| {
                    let word: Vec<usize> = d.w0[*w as usize].word.iter().map(|&i| c + i as usize).collect();
                    json!({"lattice": m.to_string(), "finite_weyl": word, "coeff": x.to_json()})
                })
                .collect(),
        )
    }
}

impl Datum {
    /// `ẇ(r)`: on basis elements `ẇ(m) = v^{E(m) - E(w m)} · (w m)`.
    pub fn dot_act(&self, u: u16, r: &GroupAlgElt) -> GroupAlgElt {
        let mut out = GroupAlgElt::zero();
        for (m, c) in &r.coeffs {
            let wm = self.act_finite(u, m);
            let k = self.exponent_e(m) - self.exponent_e(&wm);
            out.add_term(wm, &c.shift(k as i32));
        }
        out
    }

    /// `r_m = Σ_{w ∈ W₀/W_m} ẇ(m)` for antidominant `m`.
    pub fn orbit_sum_r(&self, m: &LatticeElt) -> Result<GroupAlgElt> {
        if !self.is_antidominant(m) {
            return Err(Error::NotAntidominant(m.to_string()));
        }
        let e = self.exponent_e(m);
        let mut out = GroupAlgElt::zero();
        for wm in self.orbit(m) {
            let k = e - self.exponent_e(&wm);
            out.add_term(wm, &LaurentPoly::monomial(1, k as i32));
        }
        Ok(out)
    }
}

/// Which sides of the cleared Bernstein relation to compare; see
/// [`HeckeAlgebra::bernstein_relation_sides`].
pub struct RelationSides {
    pub lhs: HeckeElt,
    pub rhs: HeckeElt,
}

impl HeckeAlgebra {
    /// `Θ_m = i_{t_{m+m∘}} · (i_{t_{m∘}})⁻¹` with the canonical shift `m∘`.
    pub fn theta(&self, m: &LatticeElt) -> Arc<HeckeElt> {
        if let Some(h) = self.theta_memo.read().unwrap().get(m) {
            return h.clone();
        }
        let shift = self.datum.canonical_shift(m);
        let h = Arc::new(self.theta_with_shift(m, &shift));
        self.theta_memo.write().unwrap().insert(m.clone(), h.clone());
        h
    }

    /// `Θ_m` computed from an explicit antidominant shift.
    pub fn theta_with_shift(&self, m: &LatticeElt, shift: &LatticeElt) -> HeckeElt {
        let d = &self.datum;
        let total = d.add(m, shift);
        assert!(d.is_antidominant(&total) && d.is_antidominant(shift), "shift must make m antidominant");
        if shift.is_zero() {
            return self.basis(&d.translation(&total));
        }
        let inv = self.inverse_basis(&d.translation(shift));
        self.mul_basis_left(&d.translation(&total), &inv)
    }

    /// `Θ(r) = Σ c_m Θ_m`.
    pub fn theta_of(&self, r: &GroupAlgElt) -> HeckeElt {
        let mut out = HeckeElt::zero();
        for (m, c) in &r.coeffs {
            out.add_scaled(&self.theta(m), c);
        }
        out
    }

    /// `Σ c_{m,w} Θ_m · i_w`.
    pub fn bern_to_im(&self, b: &BernsteinElt) -> HeckeElt {
        let d = &self.datum;
        let mut out = HeckeElt::zero();
        for ((m, w), c) in &b.coeffs {
            let p = self.mul_basis_right(&self.theta(m), &d.finite_elt(*w));
            out.add_scaled(&p, c);
        }
        out
    }

    /// Triangular elimination: repeatedly clears the residual term of
    /// greatest `(length, word)` using `Θ_{m_x} · i_{w_x}`, whose coefficient
    /// at `x = t_{m_x} w_x` must be a unit monomial.
    pub fn im_to_bern(&self, h: &HeckeElt) -> Result<BernsteinElt> {
        let d = &self.datum;
        let mut res = h.clone();
        let mut out = BernsteinElt::default();
        let mut steps = 0usize;
        while !res.is_zero() {
            steps += 1;
            if steps > 1_000_000 {
                return Err(Error::NonUnitDiagonal("elimination did not terminate".into()));
            }
            let x = res
                .coeffs
                .keys()
                .map(|w| {
                    let (len, word, om) = self.sort_key(w);
                    (std::cmp::Reverse(len), word, om, w.clone())
                })
                .min()
                .map(|t| t.3)
                .expect("nonempty residual");
            let p = self.mul_basis_right(&self.theta(&x.lambda), &d.finite_elt(x.u));
            let diag = p.coeff(&x);
            if !diag.is_unit() {
                return Err(Error::NonUnitDiagonal(d.format_elt(&x)));
            }
            let c = res.coeff(&x).exact_div(&diag)?;
            out.add_term(x.lambda.clone(), x.u, &c);
            res.add_scaled(&p, &-&c);
        }
        Ok(out)
    }

    /// `Θ_{ṡ(m)}` for the finite simple `i`: `v^{E(m) - E(s m)} Θ_{s m}`.
    pub fn theta_dot(&self, u: u16, m: &LatticeElt) -> HeckeElt {
        self.theta_of(&self.datum.dot_act(u, &GroupAlgElt::monomial(m.clone(), LaurentPoly::one())))
    }

    /// Both sides of the Bernstein relation with denominators cleared:
    ///
    /// ```text
    /// (Θ_m (i_s + 1) - (i_s + 1) Θ_{ṡm}) (1 - θ) = (Θ_m - Θ_{ṡm}) (q - θ)
    /// ```
    ///
    /// where `θ = v^{-E(α∨)} Θ_{α∨} = q Θ_{α∨}` is the normalized Bernstein
    /// element of the simple coroot, so that `𝒢(α) = (q - θ)/(1 - θ)`. With
    /// antidominant `Θ_m = i_{t_m}` the coroot enters with a positive sign.
    pub fn bernstein_relation_sides(&self, m: &LatticeElt, i: usize) -> RelationSides {
        let d = &self.datum;
        let s = d.finite_generator_index(i);
        let su = d.simple_reflection(i);
        let q = LaurentPoly::q();
        let one = self.one();
        let is1 = self.gen(s).add(&one);
        let th_m = self.theta(m);
        let th_sm = self.theta_dot(su, m);
        let x = self.im_mul(&th_m, &is1).sub(&self.im_mul(&is1, &th_sm));
        let diff = th_m.sub(&th_sm);
        let coroot = d.from_free(&d.coroots[i]);
        let theta_norm = self.theta(&coroot).scale(&q);
        let lhs = self.im_mul(&x, &one.sub(&theta_norm));
        let rhs = self.im_mul(&diff, &one.scale(&q).sub(&theta_norm));
        RelationSides { lhs, rhs }
    }

    /// Checks the equal-parameter Bernstein relation for `m` and the finite
    /// simple reflection `i`.
    pub fn bernstein_relation_check(&self, m: &LatticeElt, i: usize) -> Result<bool> {
        if !self.datum.equal_parameters || !self.datum.simply_laced {
            return Err(Error::UnsupportedParameters);
        }
        let sides = self.bernstein_relation_sides(m, i);
        Ok(sides.lhs == sides.rhs)
    }

    /// The memoized `Θ_m` table as JSON, for persistence.
    pub fn export_theta_cache(&self) -> Value {
        let memo = self.theta_memo.read().unwrap();
        let mut keys: Vec<&LatticeElt> = memo.keys().collect();
        keys.sort();
        Value::Array(
            keys.into_iter()
                .map(|m| json!({"m": m.to_string(), "theta": self.to_json(&memo[m])}))
                .collect(),
        )
    }

    /// Loads entries written by [`HeckeAlgebra::export_theta_cache`].
    pub fn import_theta_cache(&self, v: &Value) -> Result<usize> {
        let bad = || Error::Parse("malformed theta cache".into());
        let mut n = 0;
        for e in v.as_array().ok_or_else(bad)? {
            let m = self.datum.parse_lattice(e.get("m").and_then(Value::as_str).ok_or_else(bad)?)?;
            let h = self.from_json(e.get("theta").ok_or_else(bad)?)?;
            self.theta_memo.write().unwrap().insert(m, Arc::new(h));
            n += 1;
        }
        Ok(n)
    }
}
