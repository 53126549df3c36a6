use std::fs;
use std::path::Path;

use ucca_convert::alt::{convert_alt, convert_alt_mode, train_majority_mapping, AltMode, MajorityMapping};
use ucca_convert::conllulex::{parse_str, Sentence};
use ucca_convert::rule::convert;
use ucca_convert::ucca::{bracket_string, validate, Category};
use ucca_convert::LexiconSet;

fn sentence(name: &str) -> Sentence {
    let text = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)).unwrap();
    parse_str(&text, true).unwrap().sentences.remove(0)
}

fn mini_corpus() -> MajorityMapping {
    let lex = LexiconSet::builtin();
    let pairs: Vec<_> = ["fig2.conllulex", "running_example.conllulex"]
        .iter()
        .map(|n| {
            let s = sentence(n);
            let p = convert(&s, &lex).unwrap();
            (s, p)
        })
        .collect();
    train_majority_mapping(&pairs)
}

#[test]
fn determiner_maps_to_function_word() {
    let m = mini_corpus();
    assert_eq!(m.lookup("det"), Some(Category::F));
    assert_eq!(m.lookup("case"), Some(Category::R));
}

#[test]
fn second_example_keeps_relator_and_function_word() {
    let lex = LexiconSet::builtin();
    let p = convert_alt(&sentence("fig2.conllulex"), &mini_corpus(), &lex);
    assert!(validate(&p).is_empty());
    let b = bracket_string(&p);
    assert!(b.contains("[R of]") && b.contains("[F aa]"), "{b}");
}

#[test]
fn empty_mapping_still_validates() {
    let lex = LexiconSet::builtin();
    for name in ["fig2.conllulex", "running_example.conllulex"] {
        for mode in [AltMode::Full, AltMode::SyntaxOnly] {
            let p = convert_alt_mode(&sentence(name), &MajorityMapping::default(), &lex, mode);
            assert!(validate(&p).is_empty(), "{name} {mode:?}: {:?}", validate(&p));
        }
    }
}
