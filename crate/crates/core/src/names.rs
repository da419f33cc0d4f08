//! Quantity-name grammar shared by scenario files, the HTTP API and CLI output.
//!
//! ```text
//! name       := derivative | level
//! derivative := "d" order "(" symbol "|" symbol ("," symbol)* ")"   // order in 1..=3, one symbol per order
//! level      := symbol ("|" tag)?                                  // tag: conditioning state, e.g. E_max
//! symbol     := ident ("-" ident)?                                 // a-b: difference of two quantities
//! ident      := [A-Za-z][A-Za-z0-9_]*
//! ```
//!
//! Repeated variables denote higher order (`d2(I_gs|I_f,I_f)`). Mixed partials
//! are assumed symmetric, so the canonical form sorts the variables. Known
//! symbols are matched case-insensitively and rewritten in their canonical case.

use std::fmt;

use crate::error::{ErrorKind, ValidationError};
use crate::scenario::Field;

/// Symbols that are not scenario fields but are known to the engine.
const EXTRA_SYMBOLS: &[&str] = &[
    "I_g", "I_gs", "P_rp", "P_ra", "t_m", "I_d", "I_fs", "I_is", "A", "F", "R_sn", "R_ss", "V_m", "V_p", "S_h", "S_c",
    "M_mys", "M_cm", "M_ays", "Phi", "Omega",
];

/// Conditioning tags used by the conditional levels of the condition system.
pub const TAGS: &[&str] = &["E_max", "F_max", "F_dev"];

pub const MAX_ORDER: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unparseable derivative name `{input}`: {reason}")]
pub struct NameError {
    pub input: String,
    pub reason: String,
}

impl NameError {
    fn new(input: &str, reason: impl Into<String>) -> Self {
        Self {
            input: input.to_string(),
            reason: reason.into(),
        }
    }

    pub fn at(&self, path: &str) -> ValidationError {
        ValidationError::new(path, ErrorKind::DerivativeName, self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Plain(String),
    Difference(String, String),
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic()) && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn canonical_ident(s: &str) -> String {
    if let Some(f) = Field::from_symbol(s) {
        return f.symbol().to_string();
    }
    EXTRA_SYMBOLS
        .iter()
        .find(|k| k.eq_ignore_ascii_case(s))
        .map(|k| k.to_string())
        .unwrap_or_else(|| s.to_string())
}

impl Symbol {
    pub fn parse(input: &str) -> Result<Symbol, NameError> {
        let s = input.trim();
        match s.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (a.trim(), b.trim());
                if !is_ident(a) || !is_ident(b) {
                    return Err(NameError::new(input, "symbols must be identifiers"));
                }
                Ok(Symbol::Difference(canonical_ident(a), canonical_ident(b)))
            }
            None if is_ident(s) => Ok(Symbol::Plain(canonical_ident(s))),
            None => Err(NameError::new(input, "symbols must be identifiers")),
        }
    }

    pub fn plain(name: &str) -> Symbol {
        Symbol::Plain(canonical_ident(name))
    }

    pub fn field(&self) -> Option<Field> {
        match self {
            Symbol::Plain(name) => Field::from_symbol(name),
            Symbol::Difference(..) => None,
        }
    }

    pub fn is(&self, name: &str) -> bool {
        matches!(self, Symbol::Plain(n) if n == name)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::Plain(s) => f.write_str(s),
            Symbol::Difference(a, b) => write!(f, "{a}-{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DerivativeName {
    pub quantity: Symbol,
    /// Differentiation variables, sorted; length is the order.
    pub wrt: Vec<Symbol>,
}

impl DerivativeName {
    pub fn new(quantity: Symbol, mut wrt: Vec<Symbol>) -> Result<Self, NameError> {
        if wrt.is_empty() || wrt.len() > MAX_ORDER {
            return Err(NameError::new(
                &format!("d{}({quantity}|..)", wrt.len()),
                "order must be 1, 2 or 3",
            ));
        }
        wrt.sort();
        Ok(Self { quantity, wrt })
    }

    pub fn order(&self) -> usize {
        self.wrt.len()
    }

    /// Distinct variables with their multiplicity, in canonical order.
    pub fn grouped(&self) -> Vec<(&Symbol, usize)> {
        let mut out: Vec<(&Symbol, usize)> = Vec::new();
        for s in &self.wrt {
            match out.last_mut() {
                Some((last, n)) if *last == s => *n += 1,
                _ => out.push((s, 1)),
            }
        }
        out
    }

    /// Internal derivatives are the ones the engine computes itself: the
    /// quantity is one of the profit formulas and every variable is a
    /// bank-level scenario field.
    pub fn is_internal(&self) -> bool {
        (self.quantity.is("I_g") || self.quantity.is("I_gs"))
            && self
                .wrt
                .iter()
                .all(|s| s.field().is_some_and(|f| !f.is_economy_volume()))
    }
}

impl fmt::Display for DerivativeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d{}({}|", self.order(), self.quantity)?;
        for (i, s) in self.wrt.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantityName {
    Level { symbol: Symbol, given: Option<String> },
    Derivative(DerivativeName),
}

impl QuantityName {
    pub fn parse(input: &str) -> Result<QuantityName, NameError> {
        let s = input.trim();
        if s.is_empty() {
            return Err(NameError::new(input, "empty name"));
        }
        if s.contains('(') || s.contains(')') {
            return Self::parse_derivative(input, s).map(QuantityName::Derivative);
        }
        let (sym, given) = match s.split_once('|') {
            Some((sym, tag)) => {
                let tag = tag.trim();
                if !is_ident(tag) {
                    return Err(NameError::new(input, "conditioning tag must be an identifier"));
                }
                let tag = TAGS
                    .iter()
                    .find(|t| t.eq_ignore_ascii_case(tag))
                    .map(|t| t.to_string())
                    .unwrap_or_else(|| tag.to_string());
                (sym, Some(tag))
            }
            None => (s, None),
        };
        let symbol = Symbol::parse(sym).map_err(|e| NameError::new(input, e.reason))?;
        Ok(QuantityName::Level { symbol, given })
    }

    fn parse_derivative(input: &str, s: &str) -> Result<DerivativeName, NameError> {
        let err = |reason: &str| NameError::new(input, reason);
        let open = s.find('(').ok_or_else(|| err("missing `(`"))?;
        if !s.ends_with(')') {
            return Err(err("missing closing `)`"));
        }
        let head = &s[..open];
        let order: usize = head
            .strip_prefix('d')
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| err("expected d1, d2 or d3 before `(`"))?;
        if !(1..=MAX_ORDER).contains(&order) {
            return Err(err("order must be 1, 2 or 3"));
        }
        let body = &s[open + 1..s.len() - 1];
        let (q, vars) = body
            .split_once('|')
            .ok_or_else(|| err("expected `|` between quantity and variables"))?;
        let quantity = Symbol::parse(q).map_err(|e| err(&e.reason))?;
        let wrt = vars
            .split(',')
            .map(Symbol::parse)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| err(&e.reason))?;
        if wrt.len() != order {
            return Err(err(&format!(
                "order {order} needs exactly {order} variable(s), found {}",
                wrt.len()
            )));
        }
        DerivativeName::new(quantity, wrt)
    }

    pub fn as_derivative(&self) -> Option<&DerivativeName> {
        match self {
            QuantityName::Derivative(d) => Some(d),
            QuantityName::Level { .. } => None,
        }
    }

    /// Whether a caller may supply this name in an exogenous map. Scenario
    /// fields, the computed profits and internal derivatives are refused.
    pub fn check_suppliable(&self) -> Result<(), String> {
        match self {
            QuantityName::Derivative(d) if d.is_internal() => {
                Err(format!("`{self}` is computed from the scenario and cannot be supplied"))
            }
            QuantityName::Level { symbol, given: None } => {
                if symbol.field().is_some() || symbol.is("I_g") || symbol.is("I_gs") {
                    Err(format!("`{self}` is a scenario quantity and cannot be supplied"))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for QuantityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantityName::Level { symbol, given: None } => write!(f, "{symbol}"),
            QuantityName::Level {
                symbol,
                given: Some(tag),
            } => write!(f, "{symbol}|{tag}"),
            QuantityName::Derivative(d) => write!(f, "{d}"),
        }
    }
}

impl std::str::FromStr for QuantityName {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QuantityName::parse(s)
    }
}
