use std::fmt;
use std::str::FromStr;

/// A height value: a natural number or infinity.
///
/// The derived order puts every finite value below `Inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtValue {
    Fin(u64),
    Inf,
}

impl ExtValue {
    pub const ZERO: ExtValue = ExtValue::Fin(0);

    pub fn is_inf(self) -> bool {
        matches!(self, ExtValue::Inf)
    }

    pub fn is_finite(self) -> bool {
        !self.is_inf()
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ExtValue::Fin(v) => Some(v),
            ExtValue::Inf => None,
        }
    }

    /// Adds a signed shift. Infinity absorbs every shift; a finite result
    /// below zero yields `None`.
    pub fn checked_shift(self, delta: i64) -> Option<ExtValue> {
        match self {
            ExtValue::Inf => Some(ExtValue::Inf),
            ExtValue::Fin(v) => {
                let shifted = i128::from(v) + i128::from(delta);
                u64::try_from(shifted).ok().map(ExtValue::Fin)
            }
        }
    }
}

impl From<u64> for ExtValue {
    fn from(v: u64) -> Self {
        ExtValue::Fin(v)
    }
}

impl fmt::Display for ExtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtValue::Fin(v) => write!(f, "{v}"),
            ExtValue::Inf => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "inf" {
            return Ok(ExtValue::Inf);
        }
        s.parse::<u64>()
            .map(ExtValue::Fin)
            .map_err(|_| format!("expected a non-negative integer or `inf`, found `{s}`"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_puts_inf_on_top() {
        assert!(ExtValue::Fin(u64::MAX) < ExtValue::Inf);
        assert!(ExtValue::Fin(3) < ExtValue::Fin(4));
        assert_eq!(ExtValue::Inf.max(ExtValue::Fin(7)), ExtValue::Inf);
        assert_eq!(ExtValue::Inf.min(ExtValue::Fin(7)), ExtValue::Fin(7));
    }

    #[test]
    fn shifts() {
        assert_eq!(ExtValue::Inf.checked_shift(-40), Some(ExtValue::Inf));
        assert_eq!(ExtValue::Fin(2).checked_shift(3), Some(ExtValue::Fin(5)));
        assert_eq!(ExtValue::Fin(2).checked_shift(-2), Some(ExtValue::ZERO));
        assert_eq!(ExtValue::Fin(2).checked_shift(-3), None);
    }

    #[test]
    fn text() {
        assert_eq!("inf".parse::<ExtValue>().unwrap(), ExtValue::Inf);
        assert_eq!(" 12 ".parse::<ExtValue>().unwrap(), ExtValue::Fin(12));
        assert!("-1".parse::<ExtValue>().is_err());
        assert_eq!(ExtValue::Inf.to_string(), "inf");
    }
}
