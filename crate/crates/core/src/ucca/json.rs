use super::{UccaError, UccaPassage};

/// Deterministic key-sorted JSON for a passage (ids canonicalized first).
pub fn serialize_json(p: &UccaPassage) -> String {
    let value = serde_json::to_value(p.canonicalize()).expect("passage is always serializable");
    let mut s = serde_json::to_string_pretty(&value).expect("value is always serializable");
    s.push('\n');
    s
}

pub fn parse_json(input: &str) -> Result<UccaPassage, UccaError> {
    let p: UccaPassage = serde_json::from_str(input).map_err(|e| UccaError::Malformed(e.to_string()))?;
    for (id, u) in &p.units {
        if &u.id != id {
            return Err(UccaError::Malformed(format!("unit key {id} holds unit {}", u.id)));
        }
    }
    Ok(p)
}
