//! Instances: a group descriptor plus free-form string metadata, stored as
//! the descriptor's JSON object with an optional `"meta"` member.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::groups::GroupDescriptor;
use crate::typelat::Characteristic;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub descriptor: GroupDescriptor,
    pub meta: BTreeMap<String, String>,
}

impl Instance {
    pub fn new(descriptor: GroupDescriptor) -> Self {
        Instance {
            descriptor,
            meta: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.meta.insert(key.into(), value.to_string());
        self
    }
}

#[derive(Deserialize)]
struct MetaOnly {
    #[serde(default)]
    meta: BTreeMap<String, String>,
}

fn line_and_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, column)
}

/// Errors raised below a tagged enum arrive without a position. For those,
/// the first characteristic literal that fails to parse is located in the
/// source text.
fn located(text: &str, e: serde_json::Error) -> Error {
    if e.line() > 0 {
        return Error::Parse {
            line: e.line(),
            column: e.column(),
            reason: e.to_string(),
        };
    }
    for (start, _) in text.match_indices("\"char(") {
        let body = &text[start + 1..];
        let Some(end) = body.find('"') else { break };
        if let Err(Error::Parse { column, reason, .. }) = body[..end].parse::<Characteristic>() {
            let (line, col) = line_and_column(text, start + column);
            return Error::Parse { line, column: col, reason };
        }
    }
    Error::Parse {
        line: 1,
        column: 1,
        reason: e.to_string(),
    }
}

/// Parses and validates one instance.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let descriptor: GroupDescriptor = serde_json::from_str(text).map_err(|e| located(text, e))?;
    let MetaOnly { meta } = serde_json::from_str(text).map_err(|e| located(text, e))?;
    let descriptor = descriptor.validated()?;
    Ok(Instance { descriptor, meta })
}

pub fn instance_value(instance: &Instance) -> Value {
    let mut value = serde_json::to_value(&instance.descriptor).expect("descriptors serialize");
    if !instance.meta.is_empty() {
        if let Value::Object(map) = &mut value {
            map.insert(
                "meta".into(),
                serde_json::to_value(&instance.meta).expect("string maps serialize"),
            );
        }
    }
    value
}

/// One line of JSON.
pub fn print_instance(instance: &Instance) -> String {
    instance_value(instance).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typelat::TypeHandle;

    #[test]
    fn parses_rank1() {
        let i = parse_instance(r#"{"kind":"rank1","type":"char(left=0, right=0;)"}"#).unwrap();
        assert_eq!(i.descriptor, GroupDescriptor::rank1(TypeHandle::zero()));
        assert!(i.meta.is_empty());
    }

    #[test]
    fn meta_round_trips() {
        let i = Instance::new(GroupDescriptor::rank1("char(left=inf, right=0;)".parse().unwrap()))
            .with_meta("index", 4)
            .with_meta("seed", 7);
        let text = print_instance(&i);
        assert!(text.contains(r#""meta":{"index":"4","seed":"7"}"#));
        assert_eq!(parse_instance(&text).unwrap(), i);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_instance("{\"kind\":\"rank1\",\n \"type\":\"char(left=x, right=0;)\"}").unwrap_err();
        match e {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 20)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_instance(r#"{"kind":"torus"}"#), Err(Error::Parse { .. })));
    }

    #[test]
    fn invalid_descriptors_surface_violations() {
        let text = r#"{"kind":"indec","rank":1,"it":"char(left=0, right=0;)","divisible":{"left":false,"right":false,"exc":{}},"label":"H"}"#;
        assert!(matches!(parse_instance(text), Err(Error::Invalid(_))));
    }
}
