use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Longest component accepted by the codec (one length byte).
pub const MAX_COMPONENT_LEN: usize = 255;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("name must start with '/'")]
    MissingLeadingSlash,
    #[error("name must have at least one component")]
    Empty,
    #[error("empty component at position {0}")]
    EmptyComponent(usize),
    #[error("component at position {0} exceeds {MAX_COMPONENT_LEN} bytes")]
    ComponentTooLong(usize),
    #[error("malformed percent-escape at byte {0}")]
    BadEscape(usize),
}

/// Hierarchical content name: an ordered, non-empty list of non-empty byte
/// components.
///
/// Ordering is component-wise lexicographic, which keeps every name directly
/// after its prefixes in a `BTreeMap`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name {
    components: Vec<Vec<u8>>,
}

impl Name {
    pub fn from_components<I, C>(components: I) -> Result<Self, NameError>
    where
        I: IntoIterator<Item = C>,
        C: Into<Vec<u8>>,
    {
        let components: Vec<Vec<u8>> = components.into_iter().map(Into::into).collect();
        if components.is_empty() {
            return Err(NameError::Empty);
        }
        for (i, c) in components.iter().enumerate() {
            if c.is_empty() {
                return Err(NameError::EmptyComponent(i));
            }
            if c.len() > MAX_COMPONENT_LEN {
                return Err(NameError::ComponentTooLong(i));
            }
        }
        Ok(Self { components })
    }

    pub fn parse_uri(text: &str) -> Result<Self, NameError> {
        let rest = text.strip_prefix('/').ok_or(NameError::MissingLeadingSlash)?;
        if rest.is_empty() {
            return Err(NameError::Empty);
        }
        let mut components = Vec::new();
        let mut offset = 1;
        for (i, raw) in rest.split('/').enumerate() {
            if raw.is_empty() {
                return Err(NameError::EmptyComponent(i));
            }
            let decoded = percent_decode(raw.as_bytes(), offset)?;
            if decoded.len() > MAX_COMPONENT_LEN {
                return Err(NameError::ComponentTooLong(i));
            }
            components.push(decoded);
            offset += raw.len() + 1;
        }
        Ok(Self { components })
    }

    pub fn to_uri(&self) -> String {
        let mut out = String::new();
        for c in &self.components {
            out.push('/');
            percent_encode_into(c, &mut out);
        }
        out
    }

    pub fn components(&self) -> &[Vec<u8>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    /// Always false; present for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component_str(&self, i: usize) -> Option<&str> {
        self.components.get(i).and_then(|c| std::str::from_utf8(c).ok())
    }

    pub fn first_is(&self, component: &str) -> bool {
        self.components.first().map(Vec::as_slice) == Some(component.as_bytes())
    }

    /// True iff `self` is an initial segment of `other` (a name is a prefix of
    /// itself).
    pub fn is_prefix_of(&self, other: &Name) -> bool {
        self.len() <= other.len()
            && self.components.iter().zip(&other.components).all(|(a, b)| a == b)
    }

    /// The first `len` components; `None` for `len == 0` or `len > self.len()`.
    pub fn prefix(&self, len: usize) -> Option<Name> {
        if len == 0 || len > self.len() {
            return None;
        }
        Some(Name {
            components: self.components[..len].to_vec(),
        })
    }

    pub fn append(mut self, component: impl Into<Vec<u8>>) -> Result<Self, NameError> {
        let c = component.into();
        let at = self.components.len();
        if c.is_empty() {
            return Err(NameError::EmptyComponent(at));
        }
        if c.len() > MAX_COMPONENT_LEN {
            return Err(NameError::ComponentTooLong(at));
        }
        self.components.push(c);
        Ok(self)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_uri())
    }
}

impl FromStr for Name {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Name::parse_uri(s)
    }
}

// Unreserved characters pass through; everything else (including '/' and '%')
// is escaped so any byte string survives the round-trip.
fn is_unreserved(b: u8) -> bool {
    b.is_ascii_alphanumeric() || matches!(b, b'-' | b'.' | b'_' | b'~')
}

fn percent_encode_into(bytes: &[u8], out: &mut String) {
    for &b in bytes {
        if is_unreserved(b) {
            out.push(b as char);
        } else {
            out.push('%');
            out.push_str(&format!("{b:02X}"));
        }
    }
}

fn percent_decode(raw: &[u8], offset: usize) -> Result<Vec<u8>, NameError> {
    let mut out = Vec::with_capacity(raw.len());
    let mut i = 0;
    while i < raw.len() {
        if raw[i] == b'%' {
            let hex = raw.get(i + 1..i + 3).ok_or(NameError::BadEscape(offset + i))?;
            let hex = std::str::from_utf8(hex).map_err(|_| NameError::BadEscape(offset + i))?;
            let v = u8::from_str_radix(hex, 16).map_err(|_| NameError::BadEscape(offset + i))?;
            out.push(v);
            i += 3;
        } else {
            out.push(raw[i]);
            i += 1;
        }
    }
    Ok(out)
}
