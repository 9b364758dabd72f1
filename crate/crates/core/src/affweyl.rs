//! The extended affine Weyl group `W̃ = Λ ⋊ W₀ = W_aff ⋊ Ω`.
//!
//! Elements are pairs `(λ, u)` acting on points by `p ↦ λ + u(p)`. The base
//! alcove lies in the positive chamber with a vertex at the origin, so its
//! walls are `⟨p, α_i⟩ = 0` for the finite simples and `⟨p, θ⟩ = 1` for the
//! affine generator `s₀ = (θ∨, s_θ)` of each component.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rootdatum::{Datum, LatticeElt};

/// `t_λ · u` with `u` an index into the enumerated finite Weyl group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ExtWeylElt {
    pub lambda: LatticeElt,
    pub u: u16,
}

impl Datum {
    pub fn identity(&self) -> ExtWeylElt {
        ExtWeylElt { lambda: self.zero(), u: 0 }
    }

    pub fn translation(&self, m: &LatticeElt) -> ExtWeylElt {
        ExtWeylElt { lambda: m.clone(), u: 0 }
    }

    pub fn finite_elt(&self, u: u16) -> ExtWeylElt {
        ExtWeylElt { lambda: self.zero(), u }
    }

    /// Realization of generator `s` of `S_aff` (affine ones first).
    pub fn generator(&self, s: usize) -> ExtWeylElt {
        let c = self.num_components();
        if s < c {
            let (coroot, u) = &self.affine_gens[s];
            ExtWeylElt { lambda: self.from_free(coroot), u: *u }
        } else {
            self.finite_elt(self.simple_reflection(s - c))
        }
    }

    /// `(λ, u)(μ, w) = (λ + u(μ), uw)`.
    pub fn compose(&self, x: &ExtWeylElt, y: &ExtWeylElt) -> ExtWeylElt {
        ExtWeylElt {
            lambda: self.add(&x.lambda, &self.act_finite(x.u, &y.lambda)),
            u: self.w0_mul(x.u, y.u),
        }
    }

    /// `(λ, u)⁻¹ = (-u⁻¹(λ), u⁻¹)`.
    pub fn inverse(&self, x: &ExtWeylElt) -> ExtWeylElt {
        let ui = self.w0_inv(x.u);
        ExtWeylElt { lambda: self.neg(&self.act_finite(ui, &x.lambda)), u: ui }
    }

    pub fn gen_left(&self, s: usize, x: &ExtWeylElt) -> ExtWeylElt {
        self.compose(&self.generator(s), x)
    }

    pub fn gen_right(&self, x: &ExtWeylElt, s: usize) -> ExtWeylElt {
        self.compose(x, &self.generator(s))
    }

    pub fn product_of_word(&self, word: &[u8]) -> ExtWeylElt {
        word.iter()
            .fold(self.identity(), |acc, &s| self.gen_right(&acc, s as usize))
    }

    /// Number of affine root hyperplanes separating the base alcove from its
    /// image: `Σ_{β>0} |⟨λ,β⟩|` or `|⟨λ,β⟩ - 1|` according to the sign of `u⁻¹β`.
    pub fn length(&self, x: &ExtWeylElt) -> usize {
        let ui = self.w0_inv(x.u);
        let mut total = 0i64;
        for b in 0..self.num_pos {
            let p = self.pair_root(&x.lambda, b);
            total += if self.is_positive_root(self.root_image(ui, b)) {
                p.abs()
            } else {
                (p - 1).abs()
            };
        }
        total as usize
    }

    /// Whether `ℓ(s x) < ℓ(x)`: the wall of `s` separates `x·A` from `A`.
    pub fn is_left_descent(&self, s: usize, x: &ExtWeylElt) -> bool {
        let c = self.num_components();
        let ui = self.w0_inv(x.u);
        if s < c {
            let b = self.highest_root_index(s);
            let p = self.pair_root(&x.lambda, b);
            p >= 2 || (p == 1 && self.is_positive_root(self.root_image(ui, b)))
        } else {
            let i = s - c;
            let p = self.pair_simple(&x.lambda, i);
            let b = self.simple_root_index(i);
            p < 0 || (p == 0 && !self.is_positive_root(self.root_image(ui, b)))
        }
    }

    pub fn is_right_descent(&self, x: &ExtWeylElt, s: usize) -> bool {
        self.is_left_descent(s, &self.inverse(x))
    }

    pub(crate) fn highest_root_index(&self, comp: usize) -> usize {
        self.highest_root_idx[comp]
    }

    /// Greedy left-descent decomposition `x = s_{i₁} ⋯ s_{iₖ} · ω` with
    /// `ℓ(ω) = 0`, taking the lowest-index descent at each step.
    pub fn reduced_word(&self, x: &ExtWeylElt) -> (Vec<u8>, ExtWeylElt) {
        let g = self.num_generators();
        let mut word = Vec::new();
        let mut cur = x.clone();
        while let Some(s) = (0..g).find(|&s| self.is_left_descent(s, &cur)) {
            word.push(s as u8);
            cur = self.gen_left(s, &cur);
        }
        (word, cur)
    }

    /// The length-zero part `ω` of `x = w·ω`, `w ∈ W_aff`.
    pub fn omega_part(&self, x: &ExtWeylElt) -> ExtWeylElt {
        self.reduced_word(x).1
    }

    /// `Σ L(s)` over a word.
    pub fn word_weight(&self, word: &[u8]) -> u32 {
        word.iter().map(|&s| self.params[s as usize]).sum()
    }

    /// `(ℓ(x), L(x))`.
    pub fn lengths(&self, x: &ExtWeylElt) -> (usize, u32) {
        let (word, _) = self.reduced_word(x);
        (word.len(), self.word_weight(&word))
    }

    /// Bruhat order within a fibre of `W̃ → Ω`; elements of different
    /// fibres are incomparable.
    pub fn bruhat_le(&self, x: &ExtWeylElt, y: &ExtWeylElt) -> bool {
        let (wx, ox) = self.reduced_word(x);
        let (wy, oy) = self.reduced_word(y);
        if ox != oy || wx.len() > wy.len() {
            return false;
        }
        self.bruhat_rec(x, y)
    }

    fn bruhat_rec(&self, x: &ExtWeylElt, y: &ExtWeylElt) -> bool {
        let g = self.num_generators();
        let Some(s) = (0..g).find(|&s| self.is_left_descent(s, y)) else {
            return x == y;
        };
        let sy = self.gen_left(s, y);
        if self.is_left_descent(s, x) {
            self.bruhat_rec(&self.gen_left(s, x), &sy)
        } else {
            self.bruhat_rec(x, &sy)
        }
    }

    /// Every element of `W_aff` of length at most `max_len`, by breadth-first
    /// search. Returns `(element, length)` pairs sorted by length then word.
    pub fn affine_ball(&self, max_len: usize) -> Vec<(ExtWeylElt, usize)> {
        let g = self.num_generators();
        let mut seen = std::collections::HashMap::new();
        seen.insert(self.identity(), 0usize);
        let mut layer = vec![self.identity()];
        let mut out = vec![(self.identity(), 0)];
        for len in 1..=max_len {
            let mut next = Vec::new();
            for x in &layer {
                for s in 0..g {
                    let y = self.gen_right(x, s);
                    if !seen.contains_key(&y) {
                        seen.insert(y.clone(), len);
                        next.push(y.clone());
                        out.push((y, len));
                    }
                }
            }
            layer = next;
        }
        out
    }

    // ---- textual form ---------------------------------------------------

    /// `t[λ;τ]·w[word]` with the word in `S_aff` indices.
    pub fn format_elt(&self, x: &ExtWeylElt) -> String {
        let mut s = String::new();
        write!(s, "t[{}]·w[", x.lambda).unwrap();
        let c = self.num_components();
        let word: Vec<String> = self.w0[x.u as usize]
            .word
            .iter()
            .map(|&i| (c + i as usize).to_string())
            .collect();
        s.push_str(&word.join(","));
        s.push(']');
        s
    }

    /// Parses `t[..]`, `w[..]`, or both joined by `·`, `*` or `.`.
    pub fn parse_elt(&self, text: &str) -> Result<ExtWeylElt> {
        let err = |m: &str| Error::Parse(format!("{m} in element {text:?}"));
        let mut rest = text.trim();
        let mut lambda = self.zero();
        let mut u_part = self.identity();
        let mut seen_any = false;
        if let Some(r) = rest.strip_prefix("t[") {
            let end = r.find(']').ok_or_else(|| err("unclosed t["))?;
            lambda = self.parse_lattice(&r[..end])?;
            rest = r[end + 1..].trim_start();
            seen_any = true;
            if let Some(r) = rest
                .strip_prefix('·')
                .or_else(|| rest.strip_prefix('*'))
                .or_else(|| rest.strip_prefix('.'))
            {
                rest = r.trim_start();
            } else if !rest.is_empty() {
                return Err(err("expected a separator after t[..]"));
            }
        }
        if let Some(r) = rest.strip_prefix("w[") {
            let end = r.find(']').ok_or_else(|| err("unclosed w["))?;
            let inner = r[..end].trim();
            let g = self.num_generators();
            if !inner.is_empty() {
                for tok in inner.split(',') {
                    let s: usize = tok.trim().parse().map_err(|_| err("bad generator index"))?;
                    if s >= g {
                        return Err(err("generator index out of range"));
                    }
                    u_part = self.gen_right(&u_part, s);
                }
            }
            rest = r[end + 1..].trim();
            seen_any = true;
        }
        if !rest.is_empty() || !seen_any {
            return Err(err("unexpected input"));
        }
        Ok(self.compose(&self.translation(&lambda), &u_part))
    }

    /// `a,b;r` with the torsion residues after an optional semicolon.
    pub fn parse_lattice(&self, text: &str) -> Result<LatticeElt> {
        let err = |m: &str| Error::Parse(format!("{m} in lattice element {text:?}"));
        let (free_s, tors_s) = match text.split_once(';') {
            Some((a, b)) => (a, Some(b)),
            None => (text, None),
        };
        let free: Vec<i64> = if free_s.trim().is_empty() {
            Vec::new()
        } else {
            free_s
                .split(',')
                .map(|t| t.trim().parse::<i64>().map_err(|_| err("bad integer")))
                .collect::<Result<_>>()?
        };
        if free.len() != self.r {
            return Err(err(&format!("expected {} free coordinates", self.r)));
        }
        let tors: Vec<i64> = match tors_s {
            Some(t) if !t.trim().is_empty() => t
                .split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| err("bad residue")))
                .collect::<Result<_>>()?,
            _ => Vec::new(),
        };
        if tors.len() > self.torsion.len() || (tors_s.is_some() && tors.len() != self.torsion.len()) {
            return Err(err(&format!("expected {} torsion residues", self.torsion.len())));
        }
        let tors: Vec<u32> = tors
            .iter()
            .zip(&self.torsion)
            .map(|(&x, &n)| x.rem_euclid(n as i64) as u32)
            .collect();
        Ok(self.lattice(&free, &tors))
    }
}
