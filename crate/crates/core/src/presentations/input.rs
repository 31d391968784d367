//! The `shiftspace-v1` JSON input schema.

use serde::{Deserialize, Serialize};

use super::{Alphabet, Edge, Presentation, PresentationError, PresentationKind, Word};

pub const FORMAT_TAG: &str = "shiftspace-v1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPresentation {
    pub format: String,
    pub kind: String,
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forbidden: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertices: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<RawEdge>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawEdge {
    pub from: usize,
    pub to: usize,
    pub label: String,
}

impl RawPresentation {
    pub fn validate(&self) -> Result<Presentation, PresentationError> {
        if self.format != FORMAT_TAG {
            return Err(PresentationError::UnknownFormat(self.format.clone()));
        }
        let alphabet = Alphabet::new(self.alphabet.iter().cloned())?;
        let present = [
            ("matrix", self.matrix.is_some()),
            ("forbidden", self.forbidden.is_some()),
            ("vertices", self.vertices.is_some()),
            ("edges", self.edges.is_some()),
        ];
        let required: &[&'static str] = match self.kind.as_str() {
            "sft" => &["matrix"],
            "forbidden_words" => &["forbidden"],
            "labeled_graph" => &["vertices", "edges"],
            other => return Err(PresentationError::UnknownKind(other.to_string())),
        };
        for (field, is_present) in present {
            let wanted = required.contains(&field);
            if wanted && !is_present {
                return Err(PresentationError::MissingField {
                    kind: self.kind.clone(),
                    field,
                });
            }
            if !wanted && is_present {
                return Err(PresentationError::UnexpectedField {
                    kind: self.kind.clone(),
                    field,
                });
            }
        }

        match self.kind.as_str() {
            "sft" => {
                let raw = self.matrix.as_ref().unwrap();
                let mut matrix = Vec::with_capacity(raw.len());
                for (i, row) in raw.iter().enumerate() {
                    let mut out = Vec::with_capacity(row.len());
                    for (j, &x) in row.iter().enumerate() {
                        if x != 0 && x != 1 {
                            return Err(PresentationError::NonBinaryEntry { row: i, col: j, value: x });
                        }
                        out.push(x as u8);
                    }
                    matrix.push(out);
                }
                Presentation::sft(alphabet, matrix)
            }
            "forbidden_words" => {
                let words = self
                    .forbidden
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(|w| alphabet.parse_word(w))
                    .collect::<Result<Vec<_>, _>>()?;
                Presentation::forbidden_words(alphabet, words)
            }
            _ => {
                let edges = self
                    .edges
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(|e| {
                        let symbol = alphabet
                            .index_of(&e.label)
                            .ok_or_else(|| PresentationError::UnknownSymbol(e.label.clone()))?;
                        Ok(Edge {
                            from: e.from,
                            to: e.to,
                            symbol,
                        })
                    })
                    .collect::<Result<Vec<_>, PresentationError>>()?;
                Presentation::labeled_graph(alphabet, self.vertices.unwrap(), edges)
            }
        }
    }
}

pub(super) fn to_raw(p: &Presentation) -> RawPresentation {
    let alphabet = p.alphabet();
    let mut raw = RawPresentation {
        format: FORMAT_TAG.to_string(),
        kind: p.kind().tag().to_string(),
        alphabet: alphabet.symbols().to_vec(),
        matrix: None,
        forbidden: None,
        vertices: None,
        edges: None,
    };
    match p.kind() {
        PresentationKind::SftMatrix(m) => {
            raw.matrix = Some(m.iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect());
        }
        PresentationKind::ForbiddenWords(words) => {
            raw.forbidden = Some(words.iter().map(|w: &Word| alphabet.format_word(w)).collect());
        }
        PresentationKind::LabeledGraph(g) => {
            raw.vertices = Some(g.vertex_count());
            raw.edges = Some(
                g.edges()
                    .iter()
                    .map(|e| RawEdge {
                        from: e.from,
                        to: e.to,
                        label: alphabet.name(e.symbol).to_string(),
                    })
                    .collect(),
            );
        }
    }
    raw
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_kind() {
        let sft = r#"{"format":"shiftspace-v1","kind":"sft","alphabet":["0","1"],"matrix":[[1,1],[1,0]]}"#;
        let p = Presentation::from_json(sft).unwrap();
        assert_eq!(p.kind().tag(), "sft");

        let fw = r#"{"format":"shiftspace-v1","kind":"forbidden_words","alphabet":["0","1"],"forbidden":["11"]}"#;
        let q = Presentation::from_json(fw).unwrap();
        assert_eq!(p.graph(), q.graph());

        let lg = r#"{"format":"shiftspace-v1","kind":"labeled_graph","alphabet":["0","1"],"vertices":2,
            "edges":[{"from":0,"to":0,"label":"0"},{"from":0,"to":1,"label":"1"},{"from":1,"to":0,"label":"1"}]}"#;
        let r = Presentation::from_json(lg).unwrap();
        assert_eq!(r.graph().vertex_count(), 2);
    }

    #[test]
    fn rejects_fields_of_other_kinds() {
        let text = r#"{"format":"shiftspace-v1","kind":"sft","alphabet":["0"],"matrix":[[1]],"forbidden":["0"]}"#;
        assert!(matches!(
            Presentation::from_json(text),
            Err(PresentationError::UnexpectedField { field: "forbidden", .. })
        ));
        let text = r#"{"format":"shiftspace-v1","kind":"labeled_graph","alphabet":["0"],"vertices":1}"#;
        assert!(matches!(
            Presentation::from_json(text),
            Err(PresentationError::MissingField { field: "edges", .. })
        ));
    }

    #[test]
    fn rejects_unknown_fields_and_format() {
        let text = r#"{"format":"shiftspace-v1","kind":"sft","alphabet":["0"],"matrix":[[1]],"extra":1}"#;
        assert!(matches!(Presentation::from_json(text), Err(PresentationError::Json(_))));
        let text = r#"{"format":"shiftspace-v2","kind":"sft","alphabet":["0"],"matrix":[[1]]}"#;
        assert!(matches!(Presentation::from_json(text), Err(PresentationError::UnknownFormat(_))));
    }

    #[test]
    fn raw_round_trip() {
        let text = r#"{"format":"shiftspace-v1","kind":"forbidden_words","alphabet":["a","b"],"forbidden":["ab","bb"]}"#;
        let p = Presentation::from_json(text).unwrap();
        let again = p.to_raw().validate().unwrap();
        assert_eq!(p, again);
    }
}
