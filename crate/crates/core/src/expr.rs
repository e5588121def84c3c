//! Parser for form arguments.
//!
//! Accepts either the canonical JSON term list
//! (`[{"exp":[a,b,c],"coeff":[n,d]}, ...]`), a JSON object `{"weight":k,"poly":[...]}`,
//! or an arithmetic expression in `E2`, `E4`, `E6`, `Delta`, `phi` and
//! rationals, e.g. `1/3*(E2*E4 - E6)` or `E2^2 - E4`.

use crate::qm::{QmPolynomial, WeightedForm};
use crate::rational::Rational;
use num_bigint::BigInt;

pub fn parse_polynomial(input: &str) -> Result<QmPolynomial, String> {
    let s = input.trim();
    if s.starts_with('[') {
        return serde_json::from_str(s).map_err(|e| format!("bad polynomial JSON: {e}"));
    }
    if s.starts_with('{') {
        let f: WeightedForm = serde_json::from_str(s).map_err(|e| format!("bad form JSON: {e}"))?;
        return Ok(f.into_poly());
    }
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    let out = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(format!("unexpected input at offset {}: {:?}", p.pos, &s[p.pos..]));
    }
    Ok(out)
}

/// Parses a form; `weight` is required only for the zero polynomial.
pub fn parse_form(input: &str, weight: Option<u32>) -> Result<WeightedForm, String> {
    let poly = parse_polynomial(input)?;
    match weight {
        Some(k) => WeightedForm::new(poly, k).map_err(|e| e.to_string()),
        None => WeightedForm::from_poly(poly).map_err(|e| e.to_string()),
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<QmPolynomial, String> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.product()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.product()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<QmPolynomial, String> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc * self.power()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    let c = as_constant(&d).ok_or("division only by nonzero rationals")?;
                    acc = acc.scale(&c.recip());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<QmPolynomial, String> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let n = self.integer()?;
            let n: u32 = n.try_into().map_err(|_| "exponent too large".to_string())?;
            return Ok(base.pow(n));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, String> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format!("expected integer at offset {start}"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(digits.parse().unwrap())
    }

    fn atom(&mut self) -> Result<QmPolynomial, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(format!("expected ')' at offset {}", self.pos));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(QmPolynomial::constant(Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match name {
                    "E2" => Ok(QmPolynomial::e2()),
                    "E4" => Ok(QmPolynomial::e4()),
                    "E6" => Ok(QmPolynomial::e6()),
                    "Delta" => Ok(QmPolynomial::delta()),
                    "phi" => Ok(QmPolynomial::phi()),
                    _ => Err(format!("unknown symbol {name:?}")),
                }
            }
            Some(c) => Err(format!("unexpected {:?} at offset {}", c as char, self.pos)),
            None => Err("unexpected end of input".into()),
        }
    }
}

fn as_constant(p: &QmPolynomial) -> Option<Rational> {
    if p.is_zero() {
        return None;
    }
    if p.num_terms() == 1 {
        let c = p.coeff(&[0, 0, 0]);
        if c != Rational::from_integer(0.into()) {
            return Some(c);
        }
    }
    None
}
