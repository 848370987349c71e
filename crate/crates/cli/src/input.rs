use std::io::Read;
use std::path::Path;

use ksquare::biunitary::PermMatrix;
use ksquare::perm::Perm;
use ksquare::Error;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

/// `{"k": 3, "generators": [[2,1,3], [2,3,1]]}`, one-indexed.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupInput {
    pub k: usize,
    pub generators: Vec<Perm>,
}

impl GroupInput {
    pub fn validate(&self) -> Result<(), Error> {
        if self.k == 0 {
            return Err(Error::Input("k must be positive".into()));
        }
        if let Some(g) = self.generators.iter().find(|g| g.len() != self.k) {
            return Err(Error::Input(format!("generator of degree {} given for k = {}", g.len(), self.k)));
        }
        Ok(())
    }
}

/// Either input kind accepted by `ladder`.
pub enum LadderInput {
    Group(GroupInput),
    Biunitary(PermMatrix),
}

pub fn read_text(path: Option<&Path>) -> Result<String, Error> {
    let mut text = String::new();
    match path {
        Some(p) if p != Path::new("-") => {
            text = std::fs::read_to_string(p).map_err(|e| Error::Input(format!("{}: {e}", p.display())))?
        }
        _ => {
            std::io::stdin().read_to_string(&mut text).map_err(|e| Error::Input(format!("stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn json_error(e: serde_json::Error) -> Error {
    if e.is_io() || e.line() == 0 {
        Error::Input(e.to_string())
    } else {
        Error::Input(format!("malformed JSON at line {}, column {}: {e}", e.line(), e.column()))
    }
}

/// A single object or an array of them; the flag is true for arrays.
pub fn parse_items<T: DeserializeOwned>(text: &str) -> Result<(Vec<T>, bool), Error> {
    let value: Value = serde_json::from_str(text).map_err(json_error)?;
    match value {
        Value::Array(items) => {
            let parsed = items
                .into_iter()
                .enumerate()
                .map(|(i, v)| serde_json::from_value(v).map_err(|e| Error::Input(format!("item {}: {e}", i + 1))))
                .collect::<Result<Vec<T>, Error>>()?;
            Ok((parsed, true))
        }
        _ => Ok((vec![serde_json::from_str(text).map_err(json_error)?], false)),
    }
}

pub fn parse_ladder_items(text: &str) -> Result<(Vec<LadderInput>, bool), Error> {
    let value: Value = serde_json::from_str(text).map_err(json_error)?;
    let (items, batch) = match value {
        Value::Array(items) => (items, true),
        v => (vec![v], false),
    };
    let parsed = items
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let wrap = |e: serde_json::Error| Error::Input(format!("item {}: {e}", i + 1));
            if v.get("generators").is_some() {
                let g: GroupInput = serde_json::from_value(v).map_err(wrap)?;
                g.validate()?;
                Ok(LadderInput::Group(g))
            } else {
                serde_json::from_value(v).map(LadderInput::Biunitary).map_err(wrap)
            }
        })
        .collect::<Result<Vec<_>, Error>>()?;
    Ok((parsed, batch))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_items::<PermMatrix>("{\n  \"p\": 1,\n  \"k\": 1\n  \"images\": []\n}").unwrap_err();
        let Error::Input(msg) = err else { panic!() };
        assert!(msg.contains("line 4"), "{msg}");
    }

    #[test]
    fn single_and_batch() {
        let one = r#"{"p":1,"k":1,"images":[[1,1]]}"#;
        let (v, batch) = parse_items::<PermMatrix>(one).unwrap();
        assert_eq!((v.len(), batch), (1, false));
        let (v, batch) = parse_items::<PermMatrix>(&format!("[{one},{one}]")).unwrap();
        assert_eq!((v.len(), batch), (2, true));
    }

    #[test]
    fn group_degree_is_checked() {
        let g: GroupInput = serde_json::from_str(r#"{"k":3,"generators":[[2,1]]}"#).unwrap();
        assert!(g.validate().is_err());
    }
}
