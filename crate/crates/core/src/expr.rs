//! Parser for polynomial expressions: sums of products of powers of the
//! ring's variables, the constants `0` and `1`, and the field generator `z`
//! for coefficient fields beyond GF(2). This is the inverse of the canonical
//! `Display` form of `LaurentPoly`, and the CLI's input syntax for custom
//! system parameters.

use crate::field::FieldElem;
use crate::ring::{LaurentPoly, Ring, RingError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ExprError {
    pub pos: usize,
    pub msg: String,
}

impl ExprError {
    fn new(pos: usize, msg: impl Into<String>) -> Self {
        ExprError { pos, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Plus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '-' | '0'..='9' => {
                let start = i;
                if c == '-' {
                    i += 1;
                    if i >= bytes.len() || !(bytes[i] as char).is_ascii_digit() {
                        return Err(ExprError::new(start, "expected digits after '-'"));
                    }
                }
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                let lit = &text[start..i];
                let v: i64 = lit
                    .parse()
                    .map_err(|_| ExprError::new(start, format!("integer {lit} out of range")))?;
                out.push((start, Tok::Int(v)));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => return Err(ExprError::new(i, format!("unexpected character {c:?}"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    ring: &'a Ring,
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(usize, Tok)> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.peek().map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn ring_err(&self, at: usize, e: RingError) -> ExprError {
        ExprError::new(at, e.to_string())
    }

    fn expr(&mut self) -> Result<LaurentPoly, ExprError> {
        let mut acc = self.term()?;
        while matches!(self.peek(), Some((_, Tok::Plus))) {
            let (at, _) = self.bump().unwrap();
            let rhs = self.term()?;
            acc = acc.add(&rhs).map_err(|e| self.ring_err(at, e))?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<LaurentPoly, ExprError> {
        let mut acc = self.factor()?;
        while matches!(self.peek(), Some((_, Tok::Star))) {
            let (at, _) = self.bump().unwrap();
            let rhs = self.factor()?;
            acc = acc.mul(&rhs).map_err(|e| self.ring_err(at, e))?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LaurentPoly, ExprError> {
        let base_at = self.here();
        let base = self.primary()?;
        if !matches!(self.peek(), Some((_, Tok::Caret))) {
            return Ok(base);
        }
        self.bump();
        let (at, tok) = self
            .bump()
            .ok_or_else(|| ExprError::new(self.end, "expected exponent after '^'"))?;
        let e = match tok {
            Tok::Int(v) => v,
            _ => return Err(ExprError::new(at, "expected integer exponent")),
        };
        if e.unsigned_abs() > i32::MAX as u64 {
            return Err(ExprError::new(at, "exponent exceeds the +/-2^31 resource bound"));
        }
        if e >= 0 {
            base.pow(e as u32).map_err(|err| self.ring_err(base_at, err))
        } else {
            let inv = base.inv_unit().map_err(|err| self.ring_err(base_at, err))?;
            inv.pow(e.unsigned_abs() as u32)
                .map_err(|err| self.ring_err(base_at, err))
        }
    }

    fn primary(&mut self) -> Result<LaurentPoly, ExprError> {
        let (at, tok) = self
            .bump()
            .ok_or_else(|| ExprError::new(self.end, "expected a value"))?;
        match tok {
            Tok::Int(0) => Ok(LaurentPoly::zero(self.ring)),
            Tok::Int(1) => Ok(LaurentPoly::one(self.ring)),
            Tok::Int(v) => Err(ExprError::new(
                at,
                format!("literal {v} is not a characteristic-2 constant (use 0 or 1)"),
            )),
            Tok::Ident(name) if name == "z" => {
                let k = self.ring.field_log();
                if k < 2 {
                    return Err(ExprError::new(
                        at,
                        "field generator z needs a coefficient field beyond GF(2)",
                    ));
                }
                LaurentPoly::constant(self.ring, FieldElem::gen(k))
                    .map_err(|e| self.ring_err(at, e))
            }
            Tok::Ident(name) => {
                let idx = self.ring.var_index(&name).ok_or_else(|| {
                    ExprError::new(at, format!("unknown variable {name} in ring {}", self.ring))
                })?;
                LaurentPoly::var(self.ring, idx).map_err(|e| self.ring_err(at, e))
            }
            Tok::LParen => {
                let inner = self.expr()?;
                match self.bump() {
                    Some((_, Tok::RParen)) => Ok(inner),
                    Some((p, _)) => Err(ExprError::new(p, "expected ')'")),
                    None => Err(ExprError::new(self.end, "unclosed '('")),
                }
            }
            _ => Err(ExprError::new(at, "expected a variable, constant, or '('")),
        }
    }
}

/// Parses `text` as an element of `ring`.
pub fn parse_expression(ring: &Ring, text: &str) -> Result<LaurentPoly, ExprError> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(ExprError::new(0, "empty expression"));
    }
    let mut p = Parser { ring, toks, pos: 0, end: text.len() };
    let value = p.expr()?;
    if let Some((at, _)) = p.peek() {
        return Err(ExprError::new(*at, "trailing input after expression"));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::consts::{f4_ring, f5_ring, p_elem, q_elem, universal_ring, v_factor};
    use crate::ring::Monomial;
    use proptest::prelude::*;

    #[test]
    fn parses_standard_constants() {
        let r = universal_ring();
        let p = parse_expression(
            r,
            "T1*T2*T3 + T1*T2^-1*T3^-1 + T1^-1*T2*T3^-1 + T1^-1*T2^-1*T3",
        )
        .unwrap();
        assert_eq!(&p, p_elem());
        let q = parse_expression(
            r,
            "T0^2+T0^-2+T1^2+T1^-2+T2^2+T2^-2+T3^2+T3^-2",
        )
        .unwrap();
        assert_eq!(&q, q_elem());
    }

    #[test]
    fn display_round_trips() {
        for poly in [p_elem(), q_elem(), v_factor()] {
            let text = poly.to_string();
            let back = parse_expression(universal_ring(), &text).unwrap();
            assert_eq!(&back, poly);
        }
    }

    #[test]
    fn field_constants_parse() {
        let r = f4_ring();
        let z = parse_expression(r, "z").unwrap();
        let z2 = parse_expression(r, "z^2").unwrap();
        let one = parse_expression(r, "1").unwrap();
        assert_eq!(z2, z.mul(&z).unwrap());
        assert_eq!(z2.add(&z).unwrap(), one, "z^2 + z = 1 in GF(4)");
        // z^-1 = z^2.
        assert_eq!(parse_expression(r, "z^-1").unwrap(), z2);
    }

    #[test]
    fn error_positions_point_at_the_problem() {
        let r = f5_ring();
        let e = parse_expression(r, "h + w").unwrap_err();
        assert_eq!(e.pos, 4);
        let e = parse_expression(r, "h^-1").unwrap_err();
        assert_eq!(e.pos, 0, "h is not invertible");
        let e = parse_expression(r, "2*h").unwrap_err();
        assert_eq!(e.pos, 0);
        let e = parse_expression(r, "h t").unwrap_err();
        assert_eq!(e.pos, 2);
        let e = parse_expression(r, "(h+t").unwrap_err();
        assert_eq!(e.pos, 4);
        let e = parse_expression(f4_ring(), "z^99999999999999999999").unwrap_err();
        assert_eq!(e.pos, 2);
    }

    #[test]
    fn parenthesized_coefficients() {
        let r4 = f4_ring();
        let p = parse_expression(r4, "(z+1)").unwrap();
        assert_eq!(p.to_string(), "(z+1)");
        assert_eq!(parse_expression(r4, &p.to_string()).unwrap(), p);
        let rt = crate::consts::t_ring();
        let p = parse_expression(rt, "(T+T^-1)^2").unwrap();
        assert_eq!(p.to_string(), "T^2+T^-2");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn random_polys_round_trip(
            raw in prop::collection::vec(
                (prop::collection::vec(-3i32..4, 4), prop::bool::ANY),
                0..8,
            )
        ) {
            let r = universal_ring();
            let poly = LaurentPoly::from_terms(
                r,
                raw.into_iter().map(|(e, on)| {
                    (Monomial(e), crate::field::FieldElem::new(1, on as u32).unwrap())
                }),
            ).unwrap();
            let back = parse_expression(r, &poly.to_string()).unwrap();
            prop_assert_eq!(back, poly);
        }
    }
}
