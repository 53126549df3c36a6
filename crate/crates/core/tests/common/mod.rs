//! Seeded generators for fuzz sentences and random passages.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ucca_convert::conllulex::{MweRef, Sentence, Token};
use ucca_convert::ucca::{Category, CategorySet, Terminal, UccaPassage};

const WORDS: &[(&str, &str, &str)] = &[
    ("the", "DET", "DET"),
    ("this", "DET", "DET"),
    ("all", "DET", "DET"),
    ("be", "AUX", "AUX"),
    ("be", "VERB", "V"),
    ("have", "VERB", "V"),
    ("have", "AUX", "AUX"),
    ("can", "AUX", "AUX"),
    ("will", "AUX", "AUX"),
    ("go", "VERB", "V"),
    ("start", "VERB", "V"),
    ("become", "VERB", "V"),
    ("pay", "VERB", "V"),
    ("eat", "VERB", "V"),
    ("thank", "VERB", "V"),
    ("food", "NOUN", "N"),
    ("party", "NOUN", "N"),
    ("father", "NOUN", "N"),
    ("teacher", "NOUN", "N"),
    ("morning", "NOUN", "N"),
    ("plenty", "NOUN", "N"),
    ("record", "NOUN", "N"),
    ("Mulberry", "PROPN", "PROPN"),
    ("great", "ADJ", "ADJ"),
    ("many", "ADJ", "ADJ"),
    ("there", "PRON", "PRON"),
    ("there", "ADV", "ADV"),
    ("here", "ADV", "ADV"),
    ("not", "PART", "ADV"),
    ("well", "ADV", "ADV"),
    ("also", "ADV", "ADV"),
    ("about", "ADV", "ADV"),
    ("to", "PART", "INF"),
    ("to", "ADP", "P"),
    ("of", "ADP", "P"),
    ("that", "SCONJ", "P"),
    ("because", "SCONJ", "P"),
    ("who", "PRON", "PRON"),
    ("and", "CCONJ", "CCONJ"),
    ("but", "CCONJ", "CCONJ"),
    ("their", "PRON", "PRON.POSS"),
    ("'s", "PART", "POSS"),
    ("I", "PRON", "PRON"),
    ("30", "NUM", "NUM"),
    ("hey", "INTJ", "DISC"),
    (".", "PUNCT", "PUNCT"),
    (",", "PUNCT", "PUNCT"),
];

const DEPRELS: &[&str] = &[
    "nsubj",
    "nsubj:pass",
    "obj",
    "iobj",
    "obl",
    "obl:tmod",
    "advmod",
    "amod",
    "nummod",
    "det",
    "case",
    "mark",
    "cc",
    "conj",
    "aux",
    "aux:pass",
    "cop",
    "compound",
    "compound:prt",
    "nmod",
    "nmod:poss",
    "acl",
    "acl:relcl",
    "advcl",
    "xcomp",
    "ccomp",
    "parataxis",
    "appos",
    "vocative",
    "discourse",
    "expl",
    "punct",
    "flat",
    "fixed",
    "dep",
    "csubj",
];

const SUPERSENSES: &[&str] = &[
    "n.act",
    "n.event",
    "n.phenomenon",
    "n.process",
    "n.state",
    "n.attribute",
    "n.feeling",
    "n.person",
    "n.group",
    "n.time",
    "n.quantity",
    "n.artifact",
    "n.food",
    "v.stative",
    "v.change",
    "v.motion",
    "v.social",
    "v.cognition",
    "v.communication",
];

const ADPOSITION_SS: &[&str] = &[
    "p.possessor",
    "p.gestalt",
    "p.whole",
    "p.socialrel",
    "p.orgrole",
    "p.purpose",
    "p.approximator",
    "p.locus",
    "p.time",
    "`i",
];

const MWE_LEXCATS: &[&str] = &[
    "V.LVC.full",
    "V.LVC.cause",
    "V.VID",
    "V.IAV",
    "V.VPC.full",
    "N",
    "P",
    "PP",
    "ADV",
    "DISC",
];

fn token(id: usize, form: &str, lemma: &str, upos: &str) -> Token {
    Token {
        id,
        form: form.into(),
        lemma: lemma.into(),
        upos: upos.into(),
        xpos: "_".into(),
        deps: "_".into(),
        misc: "_".into(),
        ..Token::default()
    }
}

/// A random well-formed sentence of `n` tokens: a random tree, random
/// relations and lexical annotation, and occasional (possibly gappy) MWEs.
pub fn fuzz_sentence(seed: u64, n: usize) -> Sentence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tokens: Vec<Token> = (1..=n)
        .map(|i| {
            let &(lemma, upos, lexcat) = WORDS.choose(&mut rng).unwrap();
            let mut t = token(i, lemma, lemma, upos);
            t.lexcat = Some(lexcat.to_string());
            if upos == "PUNCT" {
                t.deprel = "punct".into();
            } else {
                t.deprel = DEPRELS.choose(&mut rng).unwrap().to_string();
                if rng.gen_bool(0.6) {
                    if matches!(upos, "ADP" | "SCONJ" | "PART") || (lexcat == "PRON.POSS" && rng.gen_bool(0.8)) {
                        t.ss = Some(ADPOSITION_SS.choose(&mut rng).unwrap().to_string());
                        if rng.gen_bool(0.5) {
                            t.ss2 = Some(ADPOSITION_SS.choose(&mut rng).unwrap().to_string());
                        }
                    } else {
                        t.ss = Some(SUPERSENSES.choose(&mut rng).unwrap().to_string());
                    }
                }
            }
            t
        })
        .collect();

    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(&mut rng);
    for (k, &id) in order.iter().enumerate() {
        if k == 0 {
            tokens[id - 1].head = 0;
            tokens[id - 1].deprel = "root".into();
        } else {
            tokens[id - 1].head = order[rng.gen_range(0..k)];
        }
    }

    // Strong MWEs over free tokens; usually contiguous, sometimes gappy.
    let mut free: BTreeSet<usize> = (1..=n).collect();
    let mut group = 1;
    for _ in 0..rng.gen_range(0..=2) {
        let len = rng.gen_range(2..=3);
        let members: Vec<usize> = if rng.gen_bool(0.7) {
            let start = rng.gen_range(1..=n);
            (start..start + len).collect()
        } else {
            let mut pool: Vec<usize> = free.iter().copied().collect();
            pool.shuffle(&mut rng);
            let mut m: Vec<usize> = pool.into_iter().take(len).collect();
            m.sort();
            m
        };
        if members.len() < 2 || members.iter().any(|m| !free.contains(m)) {
            continue;
        }
        let lexcat = MWE_LEXCATS.choose(&mut rng).unwrap().to_string();
        let ss = if lexcat.starts_with('V') {
            Some(SUPERSENSES[13 + rng.gen_range(0..6)].to_string())
        } else {
            None
        };
        for (pos, &m) in members.iter().enumerate() {
            free.remove(&m);
            let t = &mut tokens[m - 1];
            t.smwe = Some(MweRef {
                group,
                position: pos as u32 + 1,
            });
            if pos == 0 {
                t.lexcat = Some(lexcat.clone());
                t.ss = ss.clone();
                t.ss2 = None;
            } else {
                t.lexcat = None;
                t.ss = None;
                t.ss2 = None;
            }
        }
        group += 1;
    }
    if rng.gen_bool(0.2) && free.len() >= 2 {
        let members: Vec<usize> = free.iter().copied().take(2).collect();
        for (pos, &m) in members.iter().enumerate() {
            tokens[m - 1].wmwe = Some(MweRef {
                group: 1,
                position: pos as u32 + 1,
            });
        }
    }
    for t in &mut tokens {
        if t.ss2.is_some() && !t.ss.as_deref().is_some_and(|s| s.starts_with("p.")) {
            t.ss2 = None;
        }
    }
    let s = Sentence::new(format!("fuzz-{seed}"), tokens);
    debug_assert!(s.check().is_empty(), "{:?}", s.check());
    s
}

/// A random valid passage over `n` terminals with `punct_every`-th terminals
/// marked as punctuation (0 for none). Remote edges always point at leaves.
pub fn random_passage(seed: u64, id: &str, n: usize, remote_rate: f64) -> UccaPassage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let terminals = (1..=n)
        .map(|i| Terminal {
            text: format!("w{i}"),
            punct: rng.gen_bool(0.1),
        })
        .collect();
    let mut p = UccaPassage::new(id, terminals);
    let inner = rng.gen_range(0..=n.max(1));
    // Internal nodes 0..inner with parent index < own index; -1 is the root.
    let mut parent_of: Vec<Option<usize>> = Vec::new();
    for k in 0..inner {
        parent_of.push(if k == 0 || rng.gen_bool(0.3) {
            None
        } else {
            Some(rng.gen_range(0..k))
        });
    }
    let mut leaf_parent: Vec<Option<usize>> = Vec::new();
    for _ in 0..n {
        leaf_parent.push(if inner == 0 || rng.gen_bool(0.15) {
            None
        } else {
            Some(rng.gen_range(0..inner))
        });
    }
    // Keep only internal nodes with some leaf below them.
    let mut alive = vec![false; inner];
    for lp in leaf_parent.iter().flatten() {
        let mut cur = Some(*lp);
        while let Some(c) = cur {
            if alive[c] {
                break;
            }
            alive[c] = true;
            cur = parent_of[c];
        }
    }
    let cats = |rng: &mut ChaCha8Rng| {
        let mut c = CategorySet::single(*Category::ALL.choose(rng).unwrap());
        if rng.gen_bool(0.15) {
            c.insert(*Category::ALL.choose(rng).unwrap());
        }
        c
    };
    let name = |k: usize| format!("1.{}", k + 2);
    for k in 0..inner {
        if !alive[k] {
            continue;
        }
        p.add_unit(name(k), BTreeSet::new());
        let parent = parent_of[k].map_or("1.1".to_string(), name);
        let c = cats(&mut rng);
        p.add_edge(&parent, &name(k), c, false);
    }
    let mut leaves = Vec::new();
    for (t, lp) in leaf_parent.iter().enumerate() {
        let id = format!("0.{}", t + 1);
        p.add_unit(id.clone(), [t + 1].into_iter().collect());
        let parent = lp.map_or("1.1".to_string(), name);
        let c = cats(&mut rng);
        p.add_edge(&parent, &id, c, false);
        leaves.push((id, parent));
    }
    let internal: Vec<String> = (0..inner).filter(|&k| alive[k]).map(name).collect();
    for u in &internal {
        if rng.gen_bool(remote_rate) {
            let (leaf, lp) = leaves.choose(&mut rng).unwrap();
            if lp != u {
                let mut c = cats(&mut rng);
                c.remove(Category::U);
                if !c.is_empty() {
                    p.add_edge(u, leaf, c, true);
                }
            }
        }
    }
    p
}
