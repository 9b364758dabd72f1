//! The Iwahori–Hecke algebra in its Iwahori–Matsumoto basis `{i_w}`.
//!
//! Products reduce to the two rules
//!
//! ```text
//! i_w · i_s = i_{ws}                          if ℓ(ws) > ℓ(w)
//!           = q_s · i_{ws} + (q_s - 1) · i_w  otherwise
//! ```
//!
//! and `i_w · i_ω = i_{wω}` for `ℓ(ω) = 0`, together with their mirror images.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use serde_json::{json, Value};

use crate::affweyl::ExtWeylElt;
use crate::error::{Error, Result};
use crate::ringcore::LaurentPoly;
use crate::rootdatum::{Datum, DatumConfig, LatticeElt};

/// A finite `Z[v, v^-1]`-combination of basis elements `i_w`.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct HeckeElt {
    pub coeffs: BTreeMap<ExtWeylElt, LaurentPoly>,
}

impl HeckeElt {
    pub fn zero() -> Self {
        HeckeElt::default()
    }

    pub fn basis(w: ExtWeylElt) -> Self {
        Self::term(w, LaurentPoly::one())
    }

    pub fn term(w: ExtWeylElt, c: LaurentPoly) -> Self {
        let mut h = Self::zero();
        h.add_term(w, &c);
        h
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, w: &ExtWeylElt) -> LaurentPoly {
        self.coeffs.get(w).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, w: ExtWeylElt, c: &LaurentPoly) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(w) {
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

    pub fn add_scaled(&mut self, other: &HeckeElt, c: &LaurentPoly) {
        if c.is_zero() {
            return;
        }
        for (w, x) in &other.coeffs {
            self.add_term(w.clone(), &(x * c));
        }
    }

    pub fn add(&self, other: &HeckeElt) -> HeckeElt {
        let mut out = self.clone();
        out.add_scaled(other, &LaurentPoly::one());
        out
    }

    pub fn sub(&self, other: &HeckeElt) -> HeckeElt {
        let mut out = self.clone();
        out.add_scaled(other, &LaurentPoly::constant(-1));
        out
    }

    pub fn scale(&self, c: &LaurentPoly) -> HeckeElt {
        let mut out = HeckeElt::zero();
        out.add_scaled(self, c);
        out
    }

    /// Divides every coefficient exactly.
    pub fn exact_div(&self, c: &LaurentPoly) -> Result<HeckeElt> {
        let mut out = HeckeElt::zero();
        for (w, x) in &self.coeffs {
            out.coeffs.insert(w.clone(), x.exact_div(c)?);
        }
        Ok(out)
    }
}

type WordEntry = Arc<(Vec<u8>, ExtWeylElt)>;

/// The Hecke algebra of a datum, with a memo of reduced words.
pub struct HeckeAlgebra {
    pub datum: Arc<Datum>,
    words: RwLock<HashMap<ExtWeylElt, WordEntry>>,
    pub(crate) theta_memo: RwLock<HashMap<LatticeElt, Arc<HeckeElt>>>,
    pub(crate) center_memo: RwLock<HashMap<(Vec<usize>, LatticeElt), Arc<HeckeElt>>>,
}

impl HeckeAlgebra {
    pub fn new(datum: Arc<Datum>) -> Self {
        HeckeAlgebra {
            datum,
            words: RwLock::new(HashMap::new()),
            theta_memo: RwLock::new(HashMap::new()),
            center_memo: RwLock::new(HashMap::new()),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(Self::new(Arc::new(Datum::from_json_str(text)?)))
    }

    /// Memoized [`Datum::reduced_word`].
    pub fn word(&self, x: &ExtWeylElt) -> WordEntry {
        if let Some(e) = self.words.read().unwrap().get(x) {
            return e.clone();
        }
        let e = Arc::new(self.datum.reduced_word(x));
        self.words.write().unwrap().insert(x.clone(), e.clone());
        e
    }

    pub fn length(&self, x: &ExtWeylElt) -> usize {
        self.word(x).0.len()
    }

    /// `L(x)`, the weighted length.
    pub fn weight(&self, x: &ExtWeylElt) -> u32 {
        self.datum.word_weight(&self.word(x).0)
    }

    pub fn q_s(&self, s: usize) -> LaurentPoly {
        LaurentPoly::q_pow(self.datum.params[s] as i32)
    }

    /// `q_w = v^{2 L(w)}`.
    pub fn q_w(&self, x: &ExtWeylElt) -> LaurentPoly {
        LaurentPoly::q_pow(self.weight(x) as i32)
    }

    pub fn one(&self) -> HeckeElt {
        HeckeElt::basis(self.datum.identity())
    }

    pub fn basis(&self, x: &ExtWeylElt) -> HeckeElt {
        HeckeElt::basis(x.clone())
    }

    pub fn gen(&self, s: usize) -> HeckeElt {
        HeckeElt::basis(self.datum.generator(s))
    }

    /// `h · i_s`.
    pub fn mul_gen_right(&self, h: &HeckeElt, s: usize) -> HeckeElt {
        let d = &self.datum;
        let qs = self.q_s(s);
        let qs1 = &qs - &LaurentPoly::one();
        let mut out = HeckeElt::zero();
        for (w, c) in &h.coeffs {
            let ws = d.gen_right(w, s);
            if d.is_right_descent(w, s) {
                out.add_term(ws, &(c * &qs));
                out.add_term(w.clone(), &(c * &qs1));
            } else {
                out.add_term(ws, c);
            }
        }
        out
    }

    /// `i_s · h`.
    pub fn mul_gen_left(&self, s: usize, h: &HeckeElt) -> HeckeElt {
        let d = &self.datum;
        let qs = self.q_s(s);
        let qs1 = &qs - &LaurentPoly::one();
        let mut out = HeckeElt::zero();
        for (w, c) in &h.coeffs {
            let sw = d.gen_left(s, w);
            if d.is_left_descent(s, w) {
                out.add_term(sw, &(c * &qs));
                out.add_term(w.clone(), &(c * &qs1));
            } else {
                out.add_term(sw, c);
            }
        }
        out
    }

    fn shift_right(&self, h: &HeckeElt, om: &ExtWeylElt) -> HeckeElt {
        if *om == self.datum.identity() {
            return h.clone();
        }
        HeckeElt {
            coeffs: h.coeffs.iter().map(|(w, c)| (self.datum.compose(w, om), c.clone())).collect(),
        }
    }

    fn shift_left(&self, om: &ExtWeylElt, h: &HeckeElt) -> HeckeElt {
        if *om == self.datum.identity() {
            return h.clone();
        }
        HeckeElt {
            coeffs: h.coeffs.iter().map(|(w, c)| (self.datum.compose(om, w), c.clone())).collect(),
        }
    }

    /// `h · i_y` by the right cascade over a reduced word of `y`.
    pub fn mul_basis_right(&self, h: &HeckeElt, y: &ExtWeylElt) -> HeckeElt {
        let e = self.word(y);
        let mut acc = h.clone();
        for &s in &e.0 {
            acc = self.mul_gen_right(&acc, s as usize);
        }
        self.shift_right(&acc, &e.1)
    }

    /// `i_x · h` by the left cascade.
    pub fn mul_basis_left(&self, x: &ExtWeylElt, h: &HeckeElt) -> HeckeElt {
        let e = self.word(x);
        let mut acc = self.shift_left(&e.1, h);
        for &s in e.0.iter().rev() {
            acc = self.mul_gen_left(s as usize, &acc);
        }
        acc
    }

    /// The product in the IM basis, decomposing whichever factor has the
    /// smaller total word length.
    pub fn im_mul(&self, a: &HeckeElt, b: &HeckeElt) -> HeckeElt {
        if a.is_zero() || b.is_zero() {
            return HeckeElt::zero();
        }
        let cost = |h: &HeckeElt| -> usize { h.coeffs.keys().map(|w| self.length(w) + 1).sum() };
        let mut out = HeckeElt::zero();
        if a.len() * cost(b) <= b.len() * cost(a) {
            for (y, c) in &b.coeffs {
                out.add_scaled(&self.mul_basis_right(a, y), c);
            }
        } else {
            for (x, c) in &a.coeffs {
                out.add_scaled(&self.mul_basis_left(x, b), c);
            }
        }
        out
    }

    /// `((i_w)⁻¹, star)` with `star = (i_{sₖ} - q + 1)⋯(i_{s₁} - q + 1)` over the
    /// stored word `s₁⋯sₖ` and `(i_w)⁻¹ = q_w⁻¹ · i_{ω⁻¹} · star`.
    pub fn im_invert_basis(&self, w: &ExtWeylElt) -> (HeckeElt, HeckeElt) {
        let e = self.word(w);
        let mut star = self.one();
        for &s in e.0.iter().rev() {
            let s = s as usize;
            let shift = &LaurentPoly::one() - &self.q_s(s);
            let mut next = self.mul_gen_right(&star, s);
            next.add_scaled(&star, &shift);
            star = next;
        }
        let om_inv = self.datum.inverse(&e.1);
        let qinv = LaurentPoly::q_pow(-(self.datum.word_weight(&e.0) as i32));
        let inverse = self.shift_left(&om_inv, &star).scale(&qinv);
        (inverse, star)
    }

    pub fn inverse_basis(&self, w: &ExtWeylElt) -> HeckeElt {
        self.im_invert_basis(w).0
    }

    /// `i_w ↦ i_{w⁻¹}`.
    pub fn vee(&self, h: &HeckeElt) -> HeckeElt {
        HeckeElt {
            coeffs: h.coeffs.iter().map(|(w, c)| (self.datum.inverse(w), c.clone())).collect(),
        }
    }

    /// `i_w ↦ q_w`.
    pub fn degree(&self, h: &HeckeElt) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (w, c) in &h.coeffs {
            out += &(c * &self.q_w(w));
        }
        out
    }

    /// Image in the algebra of a torsion quotient (see [`Datum::quotient`]),
    /// summing coefficients of merged basis elements.
    pub fn pushforward_quotient(&self, h: &HeckeElt, target: &HeckeAlgebra) -> HeckeElt {
        let mut out = HeckeElt::zero();
        for (w, c) in &h.coeffs {
            out.add_term(push_elt(&target.datum, w), c);
        }
        out
    }

    /// Sort key `(length, reduced word, ω)` for deterministic output.
    pub fn sort_key(&self, w: &ExtWeylElt) -> (usize, Vec<u8>, ExtWeylElt) {
        let e = self.word(w);
        (e.0.len(), e.0.clone(), e.1.clone())
    }

    pub fn sorted_terms<'a>(&self, h: &'a HeckeElt) -> Vec<(&'a ExtWeylElt, &'a LaurentPoly)> {
        let mut v: Vec<_> = h.coeffs.iter().map(|(w, c)| (self.sort_key(w), w, c)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v.into_iter().map(|(_, w, c)| (w, c)).collect()
    }

    /// `[{element, coeff}]` ordered by (length, lexicographic word).
    pub fn to_json(&self, h: &HeckeElt) -> Value {
        Value::Array(
            self.sorted_terms(h)
                .into_iter()
                .map(|(w, c)| json!({"element": self.datum.format_elt(w), "coeff": c.to_json()}))
                .collect(),
        )
    }

    pub fn from_json(&self, v: &Value) -> Result<HeckeElt> {
        let bad = || Error::Parse("malformed Hecke element JSON".into());
        let mut h = HeckeElt::zero();
        for t in v.as_array().ok_or_else(bad)? {
            let w = self.datum.parse_elt(t.get("element").and_then(Value::as_str).ok_or_else(bad)?)?;
            let c = LaurentPoly::from_json(t.get("coeff").ok_or_else(bad)?).ok_or_else(bad)?;
            h.add_term(w, &c);
        }
        Ok(h)
    }

    /// `c₁·i_{w₁} + c₂·i_{w₂} + …` in (length, word) order.
    pub fn pretty(&self, h: &HeckeElt) -> String {
        if h.is_zero() {
            return "0".into();
        }
        self.sorted_terms(h)
            .into_iter()
            .map(|(w, c)| format!("({})·i{{{}}}", c, self.datum.format_elt(w)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// Reduces the torsion residues of `w` into the target datum.
pub fn push_elt(target: &Datum, w: &ExtWeylElt) -> ExtWeylElt {
    let tors: Vec<u32> = target
        .torsion
        .iter()
        .zip(&w.lambda.tors)
        .map(|(&n, &res)| res % n)
        .collect();
    ExtWeylElt { lambda: target.lattice(&w.lambda.free, &tors), u: w.u }
}

impl Datum {
    /// The datum with torsion `⊕ Z/n_i` replaced by `⊕ Z/(n_i / k_i)`.
    /// Factors that become trivial are dropped; they must be trailing.
    pub fn quotient(&self, kill: &[u32]) -> Result<Datum> {
        if kill.len() != self.torsion.len() {
            return Err(Error::SubgroupInvalid(format!(
                "expected {} subgroup orders, got {}",
                self.torsion.len(),
                kill.len()
            )));
        }
        let mut inv = Vec::new();
        for (&n, &k) in self.torsion.iter().zip(kill) {
            if k == 0 || n % k != 0 {
                return Err(Error::SubgroupInvalid(format!("order {k} does not divide {n}")));
            }
            inv.push(n / k);
        }
        if let Some(p) = inv.iter().position(|&x| x == 1) {
            if inv[p..].iter().any(|&x| x != 1) {
                return Err(Error::SubgroupInvalid(
                    "a fully killed factor must not precede a surviving one".into(),
                ));
            }
            inv.truncate(p);
        }
        let r = self.r;
        let cfg = DatumConfig {
            name: if inv.len() == self.torsion.len() && inv == self.torsion {
                self.config.name.clone()
            } else {
                format!("{}/{:?}", self.config.name, kill)
            },
            description: self.config.description.clone(),
            free_rank: r,
            torsion_invariants: inv,
            simple_coroots: self.config.simple_coroots.clone(),
            simple_roots: self.config.simple_roots.clone(),
            finite_generators: self
                .config
                .finite_generators
                .iter()
                .map(|m| m[..r].iter().map(|row| row[..r].to_vec()).collect())
                .collect(),
            affine_parameters: self.config.affine_parameters.clone(),
            component_highest_roots: self.config.component_highest_roots.clone(),
        };
        Datum::new(cfg)
    }
}
