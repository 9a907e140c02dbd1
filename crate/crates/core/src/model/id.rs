//! Identifier newtypes.
//!
//! Element identifiers order "naturally": runs of digits compare by numeric
//! value, so `H2 < H10` and `DR101.2 < DR101.10`. Ties between spellings
//! that are numerically equal (`L01` vs `L1`) fall back to byte order, which
//! keeps the ordering total and consistent with `Eq`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid {what} `{value}`: {reason}")]
pub struct InvalidId {
    pub what: &'static str,
    pub value: String,
    pub reason: &'static str,
}

/// Compare two identifiers with digit runs treated as numbers.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let mut xs = Chunks(a.as_bytes());
    let mut ys = Chunks(b.as_bytes());
    loop {
        match (xs.next(), ys.next()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) => {
                let ord = match (x.first().unwrap().is_ascii_digit(), y.first().unwrap().is_ascii_digit()) {
                    (true, true) => cmp_digits(x, y),
                    (true, false) => Ordering::Less,
                    (false, true) => Ordering::Greater,
                    (false, false) => x.cmp(y),
                };
                if ord != Ordering::Equal {
                    return ord;
                }
            }
        }
    }
}

fn cmp_digits(x: &[u8], y: &[u8]) -> Ordering {
    let trim = |s: &[u8]| -> usize { s.iter().take_while(|&&c| c == b'0').count() };
    let (x, y) = (&x[trim(x)..], &y[trim(y)..]);
    x.len().cmp(&y.len()).then_with(|| x.cmp(y))
}

/// Splits a byte string into maximal digit / non-digit runs.
struct Chunks<'a>(&'a [u8]);

impl<'a> Iterator for Chunks<'a> {
    type Item = &'a [u8];

    fn next(&mut self) -> Option<&'a [u8]> {
        let first = *self.0.first()?;
        let digit = first.is_ascii_digit();
        let len = self
            .0
            .iter()
            .position(|c| c.is_ascii_digit() != digit)
            .unwrap_or(self.0.len());
        let (head, tail) = self.0.split_at(len);
        self.0 = tail;
        Some(head)
    }
}

macro_rules! id_newtype {
    ($(#[$meta:meta])* $name:ident, $what:literal, $check:path) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash)]
        pub struct $name(String);

        impl $name {
            pub fn new(value: impl Into<String>) -> Result<Self, InvalidId> {
                let value = value.into();
                match $check(&value) {
                    Ok(()) => Ok(Self(value)),
                    Err(reason) => Err(InvalidId { what: $what, value, reason }),
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }

            /// Unchecked key for map lookups; an invalid string matches nothing.
            #[allow(dead_code)]
            pub(crate) fn key(s: &str) -> Self {
                Self(s.to_string())
            }
        }

        impl Ord for $name {
            fn cmp(&self, other: &Self) -> Ordering {
                natural_cmp(&self.0, &other.0)
            }
        }

        impl PartialOrd for $name {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl FromStr for $name {
            type Err = InvalidId;

            fn from_str(s: &str) -> Result<Self, InvalidId> {
                Self::new(s)
            }
        }

        impl AsRef<str> for $name {
            fn as_ref(&self) -> &str {
                &self.0
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(&self.0)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                Self::new(s).map_err(serde::de::Error::custom)
            }
        }
    };
}

fn check_element_id(s: &str) -> Result<(), &'static str> {
    if s.is_empty() {
        return Err("empty");
    }
    for part in s.split('.') {
        if part.is_empty() {
            return Err("empty dot-separated segment");
        }
        if !part.bytes().all(|c| c.is_ascii_alphanumeric()) {
            return Err("only letters, digits and dots are allowed");
        }
    }
    Ok(())
}

fn check_label(s: &str) -> Result<(), &'static str> {
    let mut bytes = s.bytes();
    match bytes.next() {
        None => return Err("empty"),
        Some(c) if !c.is_ascii_alphanumeric() => return Err("must start with a letter or digit"),
        _ => {}
    }
    if bytes.all(|c| c.is_ascii_alphanumeric() || matches!(c, b'_' | b'.' | b'-')) {
        Ok(())
    } else {
        Err("only letters, digits, `_`, `.` and `-` are allowed")
    }
}

fn check_ident(s: &str) -> Result<(), &'static str> {
    let mut bytes = s.bytes();
    match bytes.next() {
        None => return Err("empty"),
        Some(c) if !c.is_ascii_lowercase() => return Err("must start with a lowercase letter"),
        _ => {}
    }
    if bytes.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == b'_') {
        Ok(())
    } else {
        Err("only lowercase letters, digits and `_` are allowed")
    }
}

id_newtype!(
    /// Identifier of a case element, e.g. `L1`, `UAIA101`, `DR101.1`.
    ElementId,
    "element id",
    check_element_id
);

id_newtype!(
    /// Identifier of a checklist question.
    QuestionId,
    "question id",
    check_label
);

id_newtype!(
    /// Identifier of a goal-graph node.
    GoalId,
    "goal id",
    check_label
);

id_newtype!(
    /// Lowercase name of a principle or a principle segment.
    Ident,
    "identifier",
    check_ident
);
