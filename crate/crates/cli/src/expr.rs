//! Element expressions: linear combinations of products of scalars and group
//! elements.
//!
//! ```text
//! expr    := ['-'] term (('+' | '-') term)*
//! term    := factor (('·' | '*' | '.') factor)*
//! factor  := INT | 'q' ['^' INT] | 'v' ['^' INT] | 'e'
//!          | 't[' lattice ']' | 's' INT | 'w[' INT (',' INT)* ']'
//! lattice := INT (',' INT)* [';' INT (',' INT)*]
//! ```
//!
//! Factors multiply left to right in the Hecke algebra, so `q*t[-1]*s1` is
//! `q · i_{t_{-1}} · i_{s1}` and `s1*s1` expands by the quadratic relation.

use parahecke::{Datum, Error, ExtWeylElt, HeckeAlgebra, HeckeElt, LatticeElt, LaurentPoly, Result};

enum Factor {
    Scalar(LaurentPoly),
    Group(ExtWeylElt),
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
    d: &'a Datum,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in {:?}", self.pos, self.text))
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.rest().chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let r = self.rest();
        let mut len = 0;
        if r.starts_with('-') || r.starts_with('+') {
            len = 1;
        }
        len += r[len..].bytes().take_while(|b| b.is_ascii_digit()).count();
        let tok = &r[..len];
        let n = tok.parse::<i64>().map_err(|_| self.err("expected an integer"))?;
        self.pos += len;
        Ok(n)
    }

    fn bracket(&mut self) -> Result<&'a str> {
        let r = self.rest();
        let end = r.find(']').ok_or_else(|| self.err("unclosed '['"))?;
        self.pos += end + 1;
        Ok(&r[..end])
    }

    fn power(&mut self) -> Result<i32> {
        if self.eat("^") {
            let k = self.int()?;
            i32::try_from(k).map_err(|_| self.err("exponent out of range"))
        } else {
            Ok(1)
        }
    }

    fn factor(&mut self) -> Result<Factor> {
        self.skip_ws();
        let r = self.rest();
        if r.starts_with("t[") {
            self.pos += 2;
            let inner = self.bracket()?;
            let lam = self.d.parse_lattice(inner)?;
            return Ok(Factor::Group(self.d.translation(&lam)));
        }
        if r.starts_with("w[") {
            self.pos += 2;
            let inner = self.bracket()?;
            return Ok(Factor::Group(self.d.parse_elt(&format!("w[{inner}]"))?));
        }
        if r.starts_with('s') {
            self.pos += 1;
            let s = self.int()?;
            let g = self.d.num_generators();
            if s < 0 || s as usize >= g {
                return Err(self.err(&format!("generator index must lie in 0..{g}")));
            }
            return Ok(Factor::Group(self.d.generator(s as usize)));
        }
        if r.starts_with('q') {
            self.pos += 1;
            let k = self.power()?;
            return Ok(Factor::Scalar(LaurentPoly::q_pow(k)));
        }
        if r.starts_with('v') {
            self.pos += 1;
            let k = self.power()?;
            return Ok(Factor::Scalar(LaurentPoly::monomial(1, k)));
        }
        if r.starts_with('e') && !r[1..].starts_with(|c: char| c.is_alphanumeric()) {
            self.pos += 1;
            return Ok(Factor::Group(self.d.identity()));
        }
        if r.starts_with(|c: char| c.is_ascii_digit()) {
            let n = self.int()?;
            return Ok(Factor::Scalar(LaurentPoly::constant(n)));
        }
        Err(self.err("expected a factor (integer, q, v, e, t[..], s<i>, w[..])"))
    }

    fn term(&mut self, h: &HeckeAlgebra) -> Result<HeckeElt> {
        let mut acc = h.one();
        loop {
            match self.factor()? {
                Factor::Scalar(c) => acc = acc.scale(&c),
                Factor::Group(g) => acc = h.mul_basis_right(&acc, &g),
            }
            if !(self.eat("·") || self.eat("*") || self.eat(".")) {
                break;
            }
        }
        Ok(acc)
    }
}

/// Parses a Hecke algebra element.
pub fn parse_hecke(h: &HeckeAlgebra, text: &str) -> Result<HeckeElt> {
    let mut p = Parser { text, pos: 0, d: &h.datum };
    let mut out = HeckeElt::zero();
    let mut sign = if p.eat("-") { -1 } else { 1 };
    loop {
        let t = p.term(h)?;
        out = if sign > 0 { out.add(&t) } else { out.sub(&t) };
        if p.eat("+") {
            sign = 1;
        } else if p.eat("-") {
            sign = -1;
        } else {
            break;
        }
    }
    p.skip_ws();
    if !p.rest().is_empty() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

/// Parses a single group element: a product of group factors only.
pub fn parse_group_elt(d: &Datum, text: &str) -> Result<ExtWeylElt> {
    let mut p = Parser { text, pos: 0, d };
    let mut acc = d.identity();
    loop {
        match p.factor()? {
            Factor::Group(g) => acc = d.compose(&acc, &g),
            Factor::Scalar(_) => return Err(p.err("expected a group element, found a scalar")),
        }
        if !(p.eat("·") || p.eat("*") || p.eat(".")) {
            break;
        }
    }
    p.skip_ws();
    if !p.rest().is_empty() {
        return Err(p.err("trailing input"));
    }
    Ok(acc)
}

/// A lattice element written either bare (`-1,0;1`) or as `t[..]`.
pub fn parse_lattice_arg(d: &Datum, text: &str) -> Result<LatticeElt> {
    let t = text.trim();
    match t.strip_prefix("t[").and_then(|r| r.strip_suffix(']')) {
        Some(inner) => d.parse_lattice(inner),
        None => d.parse_lattice(t),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1() -> HeckeAlgebra {
        HeckeAlgebra::from_json_str(parahecke::bundled::bundled("a1").unwrap()).unwrap()
    }

    #[test]
    fn scalars_and_generators() {
        let h = a1();
        let x = parse_hecke(&h, "q^2*s1 - 3 + v^-2*s0").unwrap();
        let mut expect = h.gen(1).scale(&LaurentPoly::q_pow(2));
        expect = expect.sub(&h.one().scale(&LaurentPoly::constant(3)));
        expect = expect.add(&h.gen(0).scale(&LaurentPoly::q_pow(-1)));
        assert_eq!(x, expect);
    }

    #[test]
    fn products_compose() {
        let h = a1();
        let d = &h.datum;
        assert_eq!(parse_group_elt(d, "s1·s0").unwrap(), d.translation(&d.from_free(&[-1])));
        assert_eq!(parse_hecke(&h, "s1*s1").unwrap(), parse_hecke(&h, "q*e + q*s1 - s1").unwrap());
        assert_eq!(parse_lattice_arg(d, "t[-2]").unwrap(), d.from_free(&[-2]));
    }

    #[test]
    fn errors_name_the_offset() {
        let h = a1();
        let e = parse_hecke(&h, "s1 + x").unwrap_err().to_string();
        assert!(e.contains("offset"), "{e}");
        assert!(parse_hecke(&h, "s7").is_err());
        assert!(parse_group_elt(&h.datum, "q*s1").is_err());
    }
}
