//! Ordinals below ε₀ in Cantor normal form.
//!
//! An [`Ordinal`] is a finite sum `ω^e₁·c₁ + … + ω^eₖ·cₖ` with strictly
//! decreasing exponents (themselves ordinals) and positive coefficients.
//! Exponent nesting is finite by construction, so every value is below ε₀.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Errors produced by ordinal parsing and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("coefficient 0 at position {position}")]
    ZeroCoefficient { position: usize },
    #[error("{0} is not a limit ordinal")]
    NotLimit(Ordinal),
    #[error("invalid Cantor normal form: {0}")]
    NotCanonical(String),
    #[error("{target} is not below {limit}")]
    NotBelow { target: Ordinal, limit: Ordinal },
}

/// Zero, successor or limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrdinalKind {
    Zero,
    Successor,
    Limit,
}

// Field order matters: the derived `Ord` compares exponent first, then
// coefficient, which together with the lexicographic order on `Vec` is
// exactly the Cantor-normal-form comparison.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Term {
    exponent: Ordinal,
    coefficient: u64,
}

/// An ordinal below ε₀ in Cantor normal form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Ordinal {
    terms: Vec<Term>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_nat(1)
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::one())
    }

    pub fn from_nat(n: u64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        Self {
            terms: vec![Term {
                exponent: Self::zero(),
                coefficient: n,
            }],
        }
    }

    /// `ω^exponent`.
    pub fn omega_pow(exponent: Ordinal) -> Self {
        Self::monomial(exponent, 1)
    }

    /// `ω^exponent · coefficient`; zero when `coefficient` is zero.
    pub fn monomial(exponent: Ordinal, coefficient: u64) -> Self {
        if coefficient == 0 {
            return Self::zero();
        }
        Self {
            terms: vec![Term { exponent, coefficient }],
        }
    }

    /// Builds an ordinal from `(exponent, coefficient)` pairs that must
    /// already be in Cantor normal form.
    pub fn from_terms(terms: Vec<(Ordinal, u64)>) -> Result<Self, OrdinalError> {
        for pair in terms.windows(2) {
            if pair[0].0 <= pair[1].0 {
                return Err(OrdinalError::NotCanonical(
                    "exponents must be strictly decreasing".into(),
                ));
            }
        }
        if terms.iter().any(|(_, c)| *c == 0) {
            return Err(OrdinalError::NotCanonical("coefficient 0".into()));
        }
        Ok(Self {
            terms: terms
                .into_iter()
                .map(|(exponent, coefficient)| Term { exponent, coefficient })
                .collect(),
        })
    }

    /// The `(exponent, coefficient)` pairs, highest exponent first.
    pub fn terms(&self) -> impl Iterator<Item = (&Ordinal, u64)> + '_ {
        self.terms.iter().map(|t| (&t.exponent, t.coefficient))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn kind(&self) -> OrdinalKind {
        match self.terms.last() {
            None => OrdinalKind::Zero,
            Some(t) if t.exponent.is_zero() => OrdinalKind::Successor,
            Some(_) => OrdinalKind::Limit,
        }
    }

    pub fn is_limit(&self) -> bool {
        self.kind() == OrdinalKind::Limit
    }

    pub fn is_successor(&self) -> bool {
        self.kind() == OrdinalKind::Successor
    }

    /// The value as a natural number, if finite.
    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [t] if t.exponent.is_zero() => Some(t.coefficient),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    pub fn leading_exponent(&self) -> Option<&Ordinal> {
        self.terms.first().map(|t| &t.exponent)
    }

    /// Ordinal sum `self + other` (absorbing on the left).
    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some(head) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .take_while(|t| t.exponent >= head.exponent)
            .cloned()
            .collect();
        let mut rest = other.terms.iter();
        if let Some(last) = terms.last_mut() {
            if last.exponent == head.exponent {
                last.coefficient = last
                    .coefficient
                    .checked_add(head.coefficient)
                    .expect("ordinal coefficient overflow");
                rest.next();
            }
        }
        terms.extend(rest.cloned());
        Ordinal { terms }
    }

    pub fn successor(&self) -> Ordinal {
        self.add(&Ordinal::one())
    }

    /// The immediate predecessor of a successor ordinal.
    pub fn predecessor(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has a last term");
        if last.coefficient == 1 {
            terms.pop();
        } else {
            last.coefficient -= 1;
        }
        Some(Ordinal { terms })
    }

    /// The `n`-th element of the standard fundamental sequence of a limit:
    /// `(β + ω^(γ+1))[n] = β + ω^γ·n` and `(β + ω^γ)[n] = β + ω^(γ[n])`
    /// for limit `γ`.
    pub fn fundamental(&self, n: u64) -> Result<Ordinal, OrdinalError> {
        if !self.is_limit() {
            return Err(OrdinalError::NotLimit(self.clone()));
        }
        let mut prefix = self.terms.clone();
        let last = prefix.pop().expect("limit has a last term");
        if last.coefficient > 1 {
            prefix.push(Term {
                exponent: last.exponent.clone(),
                coefficient: last.coefficient - 1,
            });
        }
        let prefix = Ordinal { terms: prefix };
        let tail = match last.exponent.predecessor() {
            Some(e) => Ordinal::monomial(e, n),
            None => Ordinal::omega_pow(last.exponent.fundamental(n)?),
        };
        Ok(prefix.add(&tail))
    }

    /// Least `n` with `self[n] >= target`, for a limit `self` and
    /// `target < self`.
    pub fn fundamental_index_at_least(&self, target: &Ordinal) -> Result<u64, OrdinalError> {
        if !self.is_limit() {
            return Err(OrdinalError::NotLimit(self.clone()));
        }
        if target >= self {
            return Err(OrdinalError::NotBelow {
                target: target.clone(),
                limit: self.clone(),
            });
        }
        if self.fundamental(0)? >= *target {
            return Ok(0);
        }
        // Exponential probe, then bisect; the sequence is increasing.
        let mut lo = 0u64;
        let mut hi = 1u64;
        while self.fundamental(hi)? < *target {
            lo = hi;
            hi = hi.checked_mul(2).expect("fundamental index overflow");
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.fundamental(mid)? >= *target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }
}

impl std::ops::Add<&Ordinal> for &Ordinal {
    type Output = Ordinal;

    fn add(self, rhs: &Ordinal) -> Ordinal {
        Ordinal::add(self, rhs)
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::from_nat(n)
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            match t.exponent.as_nat() {
                Some(0) => write!(f, "{}", t.coefficient)?,
                Some(1) => f.write_str("w")?,
                Some(d) if d < 10 => write!(f, "w^{d}")?,
                _ => write!(f, "w^({})", t.exponent)?,
            }
            if !t.exponent.is_zero() && t.coefficient != 1 {
                write!(f, "*{}", t.coefficient)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Ordinal {
    type Err = OrdinalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parser = Parser {
            input: s.as_bytes(),
            pos: 0,
        };
        let value = parser.ordinal()?;
        if parser.pos != parser.input.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(value)
    }
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<u8> {
        self.input.get(self.pos).copied()
    }

    fn error(&self, message: &str) -> OrdinalError {
        OrdinalError::Syntax {
            position: self.pos,
            message: message.to_string(),
        }
    }

    fn expect(&mut self, byte: u8) -> Result<(), OrdinalError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", byte as char)))
        }
    }

    fn ordinal(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut value = self.term()?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            let next = self.term()?;
            value = value.add(&next);
        }
        Ok(value)
    }

    fn term(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(b'w') => {
                self.pos += 1;
                let exponent = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.exponent()?
                } else {
                    Ordinal::one()
                };
                let coefficient = if self.peek() == Some(b'*') {
                    self.pos += 1;
                    let at = self.pos;
                    let c = self.nat()?;
                    if c == 0 {
                        return Err(OrdinalError::ZeroCoefficient { position: at });
                    }
                    c
                } else {
                    1
                };
                Ok(Ordinal::monomial(exponent, coefficient))
            }
            Some(b'0'..=b'9') => Ok(Ordinal::from_nat(self.nat()?)),
            _ => Err(self.error("expected 'w' or a natural number")),
        }
    }

    fn exponent(&mut self) -> Result<Ordinal, OrdinalError> {
        match self.peek() {
            Some(d @ b'0'..=b'9') => {
                self.pos += 1;
                Ok(Ordinal::from_nat(u64::from(d - b'0')))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.ordinal()?;
                self.expect(b')')?;
                Ok(e)
            }
            _ => Err(self.error("expected a digit or '(' after '^'")),
        }
    }

    fn nat(&mut self) -> Result<u64, OrdinalError> {
        let start = self.pos;
        match self.peek() {
            Some(b'0') => {
                self.pos += 1;
                if matches!(self.peek(), Some(b'0'..=b'9')) {
                    return Err(self.error("leading zero"));
                }
                return Ok(0);
            }
            Some(b'1'..=b'9') => {}
            _ => return Err(self.error("expected a natural number")),
        }
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.input[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| OrdinalError::Syntax {
                position: start,
                message: "natural number out of range".into(),
            })
    }
}

impl Serialize for Ordinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ordinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct OrdinalVisitor;

        impl Visitor<'_> for OrdinalVisitor {
            type Value = Ordinal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an ordinal expression or a natural number")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Ordinal, E> {
                Ok(Ordinal::from_nat(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Ordinal, E> {
                u64::try_from(v)
                    .map(Ordinal::from_nat)
                    .map_err(|_| E::custom("negative ordinal"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Ordinal, E> {
                v.parse().map_err(E::custom)
            }
        }

        deserializer.deserialize_any(OrdinalVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cmp::Ordering;

    fn ord(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    #[test]
    fn parses_examples() {
        assert_eq!(ord("0"), Ordinal::zero());
        let w2_3 = ord("w*2+3");
        assert_eq!(
            w2_3,
            Ordinal::from_terms(vec![(Ordinal::one(), 2), (Ordinal::zero(), 3)]).unwrap()
        );
        assert_eq!(w2_3.to_string(), "w*2+3");
        let big = ord("w^(w+1)+w^2*5");
        assert_eq!(big.to_string(), "w^(w+1)+w^2*5");
        assert_eq!(big.leading_exponent(), Some(&ord("w+1")));
    }

    #[test]
    fn parse_normalizes_non_canonical_sums() {
        assert_eq!(ord("3+w"), Ordinal::omega());
        assert_eq!(ord("w^1*2").to_string(), "w*2");
        assert_eq!(ord("w^0*4").to_string(), "4");
        assert_eq!(ord("w^(12)").to_string(), "w^(12)");
        assert_eq!(ord("w+w").to_string(), "w*2");
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            "w*0".parse::<Ordinal>(),
            Err(OrdinalError::ZeroCoefficient { position: 2 })
        );
        assert!(matches!(
            "w^".parse::<Ordinal>(),
            Err(OrdinalError::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            "w+".parse::<Ordinal>(),
            Err(OrdinalError::Syntax { position: 2, .. })
        ));
        assert!(matches!(
            "w^(2".parse::<Ordinal>(),
            Err(OrdinalError::Syntax { position: 4, .. })
        ));
        assert!("007".parse::<Ordinal>().is_err());
        assert!("".parse::<Ordinal>().is_err());
        assert!("w^10".parse::<Ordinal>().is_err());
    }

    #[test]
    fn comparison_examples() {
        assert_eq!(ord("w").cmp(&ord("w*2")), Ordering::Less);
        assert_eq!(ord("w^2").cmp(&ord("w*5+7")), Ordering::Greater);
        let a = ord("w^(w)+3");
        assert_eq!(a.cmp(&a.clone()), Ordering::Equal);
        assert!(ord("w+1") > ord("w"));
        assert!(ord("w^(w+1)") > ord("w^(w)*9"));
    }

    #[test]
    fn addition_examples() {
        assert_eq!(&Ordinal::from_nat(3) + &Ordinal::omega(), Ordinal::omega());
        assert_eq!(&Ordinal::omega() + &Ordinal::from_nat(3), ord("w+3"));
        assert_eq!(&ord("w^2+w*3+1") + &ord("w*2+5"), ord("w^2+w*5+5"));
        assert_eq!(ord("w*2").kind(), OrdinalKind::Limit);
        assert_eq!(ord("w+1").kind(), OrdinalKind::Successor);
        assert_eq!(Ordinal::zero().kind(), OrdinalKind::Zero);
        assert_eq!(ord("w*2+3").successor(), ord("w*2+4"));
        assert_eq!(ord("w+1").predecessor(), Some(ord("w")));
        assert_eq!(ord("w").predecessor(), None);
    }

    #[test]
    fn fundamental_sequence_examples() {
        assert_eq!(ord("w").fundamental(3).unwrap(), ord("3"));
        assert_eq!(ord("w^2").fundamental(2).unwrap(), ord("w*2"));
        assert_eq!(ord("w^(w)").fundamental(2).unwrap(), ord("w^2"));
        assert_eq!(ord("w*2").fundamental(5).unwrap(), ord("w+5"));
        assert_eq!(ord("w^(w+1)").fundamental(2).unwrap(), ord("w^(w)*2"));
        assert_eq!(ord("w+1").fundamental(0), Err(OrdinalError::NotLimit(ord("w+1"))));
        assert!(Ordinal::zero().fundamental(1).is_err());
    }

    #[test]
    fn fundamental_index_search() {
        let w2 = ord("w*2");
        assert_eq!(w2.fundamental_index_at_least(&ord("5")).unwrap(), 0);
        assert_eq!(w2.fundamental_index_at_least(&ord("w+5")).unwrap(), 5);
        let w = Ordinal::omega();
        assert_eq!(w.fundamental_index_at_least(&ord("1000000")).unwrap(), 1_000_000);
        let ww = ord("w^(w)");
        assert_eq!(ww.fundamental_index_at_least(&ord("w^3+1")).unwrap(), 4);
    }

    #[test]
    fn serde_uses_canonical_strings() {
        let v: Vec<Ordinal> = serde_json::from_str(r#"["w*2+1", 5]"#).unwrap();
        assert_eq!(v, vec![ord("w*2+1"), ord("5")]);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"["w*2+1","5"]"#);
    }
}
