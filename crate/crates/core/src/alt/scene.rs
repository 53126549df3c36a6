//! Scene-evocation heuristics over supersenses, parts of speech and word lists.

use serde::{Deserialize, Serialize};

use crate::conllulex::Token;
use crate::lexicons::{LexiconSet, RelationalKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SceneClass {
    SceneP,
    SceneS,
    Nonscene,
    Relational,
}

impl SceneClass {
    pub fn is_scene(self) -> bool {
        self != SceneClass::Nonscene
    }
}

const PROCESS_NOUNS: [&str; 4] = ["n.act", "n.event", "n.phenomenon", "n.process"];
const STATE_NOUNS: [&str; 3] = ["n.state", "n.attribute", "n.feeling"];

/// First matching heuristic wins. `t` carries the supersense of its lexical
/// expression.
pub fn classify_scene_evoking(t: &Token, lex: &LexiconSet) -> SceneClass {
    let ss = t.ss.as_deref().unwrap_or("").to_lowercase();
    let noun = t.upos == "NOUN";
    if noun && PROCESS_NOUNS.contains(&ss.as_str()) {
        return SceneClass::SceneP;
    }
    if noun && STATE_NOUNS.contains(&ss.as_str()) {
        return SceneClass::SceneS;
    }
    if t.upos == "PROPN" {
        return SceneClass::Nonscene;
    }
    if noun && ss == "n.person" && lex.is_relational_noun(&t.lemma, Some(&ss)) {
        return SceneClass::Relational;
    }
    if t.upos == "AUX" && ss == "v.stative" {
        return SceneClass::Nonscene;
    }
    if ss == "v.change" && lex.is_aspectual(&t.lemma) {
        return SceneClass::Nonscene;
    }
    match t.upos.as_str() {
        "VERB" => SceneClass::SceneP,
        _ => SceneClass::Nonscene,
    }
}

/// Kinship terms evoke states, occupations processes.
pub fn relational_is_state(t: &Token, lex: &LexiconSet) -> bool {
    lex.relational_kind(&t.lemma, t.ss.as_deref()) == Some(RelationalKind::State)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(lemma: &str, upos: &str, ss: Option<&str>) -> Token {
        let line = format!(
            "1\t{lemma}\t{lemma}\t{upos}\t_\t_\t0\troot\t_\t_\t_\t_\t_\t{}\t_\t_\t_\t_\t_",
            ss.unwrap_or("_")
        );
        crate::conllulex::parse_str(&format!("# sent_id = s\n{line}\n"), true)
            .unwrap()
            .sentences[0]
            .tokens[0]
            .clone()
    }

    #[test]
    fn cascade() {
        let lex = LexiconSet::builtin();
        assert_eq!(
            classify_scene_evoking(&tok("Mulberry", "PROPN", Some("n.GROUP")), &lex),
            SceneClass::Nonscene
        );
        assert_eq!(
            classify_scene_evoking(&tok("become", "VERB", Some("v.change")), &lex),
            SceneClass::Nonscene
        );
        assert_eq!(
            classify_scene_evoking(&tok("eat", "VERB", Some("v.consumption")), &lex),
            SceneClass::SceneP
        );
        assert_eq!(
            classify_scene_evoking(&tok("party", "NOUN", Some("n.EVENT")), &lex),
            SceneClass::SceneP
        );
        assert_eq!(
            classify_scene_evoking(&tok("anger", "NOUN", Some("n.FEELING")), &lex),
            SceneClass::SceneS
        );
        assert_eq!(
            classify_scene_evoking(&tok("teacher", "NOUN", Some("n.PERSON")), &lex),
            SceneClass::Relational
        );
        assert_eq!(
            classify_scene_evoking(&tok("be", "AUX", Some("v.stative")), &lex),
            SceneClass::Nonscene
        );
        assert_eq!(
            classify_scene_evoking(&tok("table", "NOUN", Some("n.ARTIFACT")), &lex),
            SceneClass::Nonscene
        );
        assert!(relational_is_state(&tok("father", "NOUN", Some("n.PERSON")), &lex));
    }
}
