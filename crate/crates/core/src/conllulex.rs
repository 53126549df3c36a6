//! CoNLL-U-Lex (STREUSLE 4.x, 19 columns) reading, writing and lexical grouping.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::BufRead;

use thiserror::Error;

pub const COLUMNS: usize = 19;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConlluLexError {
    #[error("line {line}: expected {COLUMNS} columns, found {found}")]
    ColumnCount { line: usize, found: usize },
    #[error("line {line}: bad integer `{value}` in {field}")]
    BadInteger {
        line: usize,
        field: &'static str,
        value: String,
    },
    #[error("line {line}: bad MWE value `{value}`")]
    BadMwe { line: usize, value: String },
    #[error("sentence `{sent_id}`: {message}")]
    Sentence { sent_id: String, message: String },
    #[error("MWE group {group} in sentence `{sent_id}` has inconsistent positions")]
    MweGroup { sent_id: String, group: String },
    #[error("duplicate sent_id `{0}`")]
    DuplicateSentId(String),
    #[error("io: {0}")]
    Io(String),
}

/// Membership in a strong or weak MWE: `group:position`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MweRef {
    pub group: u32,
    pub position: u32,
}

impl fmt::Display for MweRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.group, self.position)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Token {
    pub id: usize,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: Vec<(String, String)>,
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: String,
    pub smwe: Option<MweRef>,
    pub lexcat: Option<String>,
    pub lexlemma: Option<String>,
    pub ss: Option<String>,
    pub ss2: Option<String>,
    pub wmwe: Option<MweRef>,
    pub wcat: Option<String>,
    pub wlemma: Option<String>,
    pub lextag: Option<String>,
}

impl Token {
    /// Relation without its subtype (`nmod:poss` → `nmod`).
    pub fn base_deprel(&self) -> &str {
        self.deprel.split(':').next().unwrap_or("")
    }

    pub fn lemma_lc(&self) -> String {
        self.lemma.to_lowercase()
    }

    pub fn feat(&self, key: &str) -> Option<&str> {
        self.feats.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn is_punct(&self) -> bool {
        self.upos == "PUNCT"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Strength {
    Strong,
    Weak,
    Single,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexExpr {
    pub tokens: Vec<usize>,
    pub strength: Strength,
    pub lexcat: String,
    pub ss: Option<String>,
    pub ss2: Option<String>,
}

impl LexExpr {
    pub fn is_strong(&self) -> bool {
        self.strength != Strength::Weak
    }
}

/// Row that is not a syntactic word (`1-2` range or `1.1` empty node), kept verbatim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtraRow {
    /// Number of syntactic tokens preceding the row.
    pub after: usize,
    pub line: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Sentence {
    pub sent_id: String,
    pub text: String,
    /// All `#` lines in input order, without the leading `# `.
    pub comments: Vec<String>,
    pub tokens: Vec<Token>,
    pub extra_rows: Vec<ExtraRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub doc_id: String,
    pub sentences: Vec<Sentence>,
    pub warnings: Vec<String>,
}

impl Sentence {
    /// Builds a sentence with `sent_id` and `text` metadata lines.
    pub fn new(sent_id: impl Into<String>, tokens: Vec<Token>) -> Self {
        let sent_id = sent_id.into();
        let text = tokens.iter().map(|t| t.form.as_str()).collect::<Vec<_>>().join(" ");
        Sentence {
            comments: vec![format!("sent_id = {sent_id}"), format!("text = {text}")],
            sent_id,
            text,
            tokens,
            extra_rows: Vec::new(),
        }
    }

    pub fn token(&self, id: usize) -> Option<&Token> {
        id.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn root(&self) -> Option<usize> {
        self.tokens.iter().find(|t| t.head == 0).map(|t| t.id)
    }

    pub fn children(&self, head: usize) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(move |t| t.head == head)
    }

    /// Invariant violations, one message each.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        let n = self.tokens.len();
        for (i, t) in self.tokens.iter().enumerate() {
            if t.id != i + 1 {
                out.push(format!("token ids not contiguous at position {}", i + 1));
            }
            if t.head > n {
                out.push(format!("token {} has head {} outside sentence", t.id, t.head));
            }
            if t.head == t.id {
                out.push(format!("token {} heads itself", t.id));
            }
            if t.ss2.is_some() && !t.ss.as_deref().is_some_and(|s| s.starts_with("p.")) {
                out.push(format!("token {} has ss2 without a p.* ss", t.id));
            }
        }
        if n > 0 {
            let roots = self.tokens.iter().filter(|t| t.head == 0).count();
            if roots != 1 {
                out.push(format!("{roots} root tokens"));
            }
            if roots == 1 && self.has_cycle() {
                out.push("dependency cycle".to_string());
            }
        }
        for (what, get) in [
            ("smwe", (|t: &Token| t.smwe) as fn(&Token) -> Option<MweRef>),
            ("wmwe", |t: &Token| t.wmwe),
        ] {
            let mut seen: HashSet<(u32, u32)> = HashSet::new();
            for t in &self.tokens {
                if let Some(m) = get(t) {
                    if m.position == 0 {
                        out.push(format!("token {} has {what} position 0", t.id));
                    } else if m.position > 1 && !seen.contains(&(m.group, m.position - 1)) {
                        out.push(format!("token {} has dangling {what} position {}", t.id, m));
                    }
                    if !seen.insert((m.group, m.position)) {
                        out.push(format!("token {} repeats {what} {}", t.id, m));
                    }
                }
            }
        }
        out
    }

    fn has_cycle(&self) -> bool {
        let n = self.tokens.len();
        for t in &self.tokens {
            let mut cur = t.head;
            let mut steps = 0;
            while cur != 0 {
                if cur > n || steps > n {
                    return true;
                }
                cur = self.tokens[cur - 1].head;
                steps += 1;
            }
        }
        false
    }
}

fn opt(s: &str) -> Option<String> {
    (s != "_").then(|| s.to_string())
}

/// Supersense labels are stored lowercase (`n.EVENT` → `n.event`).
pub fn normalize_supersense(s: &str) -> String {
    s.to_lowercase()
}

fn opt_ss(s: &str) -> Option<String> {
    (s != "_").then(|| normalize_supersense(s))
}

fn show(o: &Option<String>) -> &str {
    o.as_deref().unwrap_or("_")
}

fn parse_mwe(s: &str, line: usize) -> Result<Option<MweRef>, ConlluLexError> {
    if s == "_" {
        return Ok(None);
    }
    let bad = || ConlluLexError::BadMwe {
        line,
        value: s.to_string(),
    };
    let (g, p) = s.split_once(':').ok_or_else(bad)?;
    Ok(Some(MweRef {
        group: g.parse().map_err(|_| bad())?,
        position: p.parse().map_err(|_| bad())?,
    }))
}

fn parse_feats(s: &str) -> Vec<(String, String)> {
    if s == "_" {
        return Vec::new();
    }
    s.split('|')
        .map(|kv| match kv.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => (kv.to_string(), String::new()),
        })
        .collect()
}

fn write_feats(f: &[(String, String)]) -> String {
    if f.is_empty() {
        return "_".into();
    }
    f.iter()
        .map(|(k, v)| if v.is_empty() { k.clone() } else { format!("{k}={v}") })
        .collect::<Vec<_>>()
        .join("|")
}

fn parse_token(cols: &[&str], line: usize) -> Result<Token, ConlluLexError> {
    let int = |field: &'static str, v: &str| {
        v.parse::<usize>().map_err(|_| ConlluLexError::BadInteger {
            line,
            field,
            value: v.to_string(),
        })
    };
    Ok(Token {
        id: int("ID", cols[0])?,
        form: cols[1].to_string(),
        lemma: cols[2].to_string(),
        upos: cols[3].to_string(),
        xpos: cols[4].to_string(),
        feats: parse_feats(cols[5]),
        head: int("HEAD", cols[6])?,
        deprel: cols[7].to_string(),
        deps: cols[8].to_string(),
        misc: cols[9].to_string(),
        smwe: parse_mwe(cols[10], line)?,
        lexcat: opt(cols[11]),
        lexlemma: opt(cols[12]),
        ss: opt_ss(cols[13]),
        ss2: opt_ss(cols[14]),
        wmwe: parse_mwe(cols[15], line)?,
        wcat: opt(cols[16]),
        wlemma: opt(cols[17]),
        lextag: opt(cols[18]),
    })
}

fn mwe_col(m: &Option<MweRef>) -> String {
    m.map(|m| m.to_string()).unwrap_or_else(|| "_".into())
}

pub fn write_token(t: &Token) -> String {
    [
        t.id.to_string(),
        t.form.clone(),
        t.lemma.clone(),
        t.upos.clone(),
        t.xpos.clone(),
        write_feats(&t.feats),
        t.head.to_string(),
        t.deprel.clone(),
        t.deps.clone(),
        t.misc.clone(),
        mwe_col(&t.smwe),
        show(&t.lexcat).to_string(),
        show(&t.lexlemma).to_string(),
        show(&t.ss).to_string(),
        show(&t.ss2).to_string(),
        mwe_col(&t.wmwe),
        show(&t.wcat).to_string(),
        show(&t.wlemma).to_string(),
        show(&t.lextag).to_string(),
    ]
    .join("\t")
}

struct Builder {
    strict: bool,
    doc: Document,
    ids: HashSet<String>,
    current: Sentence,
    started: bool,
}

impl Builder {
    fn problem(&mut self, e: ConlluLexError) -> Result<(), ConlluLexError> {
        if self.strict {
            Err(e)
        } else {
            self.doc.warnings.push(e.to_string());
            Ok(())
        }
    }

    fn finish_sentence(&mut self) -> Result<(), ConlluLexError> {
        if !self.started {
            return Ok(());
        }
        let mut s = std::mem::take(&mut self.current);
        self.started = false;
        if s.sent_id.is_empty() {
            s.sent_id = format!("{}", self.doc.sentences.len() + 1);
        }
        for message in s.check() {
            self.problem(ConlluLexError::Sentence {
                sent_id: s.sent_id.clone(),
                message,
            })?;
        }
        if !self.ids.insert(s.sent_id.clone()) {
            self.problem(ConlluLexError::DuplicateSentId(s.sent_id.clone()))?;
        }
        if self.doc.doc_id.is_empty() {
            if let Some((prefix, _)) = s.sent_id.rsplit_once('-') {
                self.doc.doc_id = prefix.to_string();
            }
        }
        self.doc.sentences.push(s);
        Ok(())
    }

    fn line(&mut self, lineno: usize, raw: &str) -> Result<(), ConlluLexError> {
        let line = raw.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            return self.finish_sentence();
        }
        self.started = true;
        if let Some(c) = line.strip_prefix('#') {
            let c = c.strip_prefix(' ').unwrap_or(c);
            if let Some((k, v)) = c.split_once('=') {
                match k.trim() {
                    "sent_id" => self.current.sent_id = v.trim().to_string(),
                    "text" => self.current.text = v.trim().to_string(),
                    "newdoc id" if self.doc.doc_id.is_empty() => self.doc.doc_id = v.trim().to_string(),
                    _ => {}
                }
            }
            self.current.comments.push(c.to_string());
            return Ok(());
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != COLUMNS {
            return self.problem(ConlluLexError::ColumnCount {
                line: lineno,
                found: cols.len(),
            });
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            self.current.extra_rows.push(ExtraRow {
                after: self.current.tokens.len(),
                line: line.to_string(),
            });
            return Ok(());
        }
        match parse_token(&cols, lineno) {
            Ok(t) => {
                self.current.tokens.push(t);
                Ok(())
            }
            Err(e) => self.problem(e),
        }
    }
}

/// Reads a CoNLL-U-Lex document. In lenient mode malformed rows are dropped and
/// every problem is recorded in `Document::warnings`.
pub fn parse_document<R: BufRead>(input: R, strict: bool) -> Result<Document, ConlluLexError> {
    let mut b = Builder {
        strict,
        doc: Document::default(),
        ids: HashSet::new(),
        current: Sentence::default(),
        started: false,
    };
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| ConlluLexError::Io(e.to_string()))?;
        b.line(i + 1, &line)?;
    }
    b.finish_sentence()?;
    Ok(b.doc)
}

pub fn parse_str(input: &str, strict: bool) -> Result<Document, ConlluLexError> {
    parse_document(input.as_bytes(), strict)
}

pub fn write_sentence(s: &Sentence, out: &mut String) {
    for c in &s.comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    let mut extras = s.extra_rows.iter().peekable();
    for (i, t) in s.tokens.iter().enumerate() {
        while let Some(x) = extras.next_if(|x| x.after <= i) {
            out.push_str(&x.line);
            out.push('\n');
        }
        out.push_str(&write_token(t));
        out.push('\n');
    }
    for x in extras {
        out.push_str(&x.line);
        out.push('\n');
    }
    out.push('\n');
}

pub fn write_document(doc: &Document) -> String {
    let mut out = String::new();
    for s in &doc.sentences {
        write_sentence(s, &mut out);
    }
    out
}

/// Strong expressions (MWE groups and single tokens) ordered by first token,
/// followed by weak expressions.
pub fn group_lexical_expressions(s: &Sentence) -> Result<Vec<LexExpr>, ConlluLexError> {
    let mut out = Vec::new();
    let mut strong: BTreeMap<u32, Vec<&Token>> = BTreeMap::new();
    for t in &s.tokens {
        match t.smwe {
            Some(m) => strong.entry(m.group).or_default().push(t),
            None => out.push(LexExpr {
                tokens: vec![t.id],
                strength: Strength::Single,
                lexcat: t.lexcat.clone().unwrap_or_else(|| t.upos.clone()),
                ss: t.ss.clone(),
                ss2: t.ss2.clone(),
            }),
        }
    }
    let check = |group: u32, toks: &[&Token], pos: fn(&Token) -> u32| {
        let ok = toks.len() >= 2 && toks.iter().enumerate().all(|(i, t)| pos(t) as usize == i + 1);
        if ok {
            Ok(())
        } else {
            Err(ConlluLexError::MweGroup {
                sent_id: s.sent_id.clone(),
                group: group.to_string(),
            })
        }
    };
    for (g, toks) in &strong {
        check(*g, toks, |t| t.smwe.map_or(0, |m| m.position))?;
        let first = toks[0];
        out.push(LexExpr {
            tokens: toks.iter().map(|t| t.id).collect(),
            strength: Strength::Strong,
            lexcat: first.lexcat.clone().unwrap_or_default(),
            ss: first.ss.clone(),
            ss2: first.ss2.clone(),
        });
    }
    out.sort_by_key(|e| e.tokens[0]);
    let mut weak: BTreeMap<u32, Vec<&Token>> = BTreeMap::new();
    for t in &s.tokens {
        if let Some(m) = t.wmwe {
            weak.entry(m.group).or_default().push(t);
        }
    }
    let mut weak_out = Vec::new();
    for (g, toks) in &weak {
        check(*g, toks, |t| t.wmwe.map_or(0, |m| m.position))?;
        weak_out.push(LexExpr {
            tokens: toks.iter().map(|t| t.id).collect(),
            strength: Strength::Weak,
            lexcat: toks[0].wcat.clone().unwrap_or_default(),
            ss: None,
            ss2: None,
        });
    }
    weak_out.sort_by_key(|e| e.tokens[0]);
    out.extend(weak_out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2: &str = "# sent_id = reviews-001325-0003
# text = Blue cross has no record of aa reversal.
1\tBlue\tBlue\tPROPN\tNNP\tNumber=Sing\t2\tcompound\t_\t_\t1:1\tPROPN\tBlue Cross\tn.GROUP\t_\t_\t_\t_\tB-PROPN-n.GROUP
2\tcross\tCross\tPROPN\tNNP\tNumber=Sing\t3\tnsubj\t_\t_\t1:2\t_\t_\t_\t_\t_\t_\t_\tI_
3\thas\thave\tVERB\tVBZ\tMood=Ind|Number=Sing|Person=3|Tense=Pres|VerbForm=Fin\t0\troot\t_\t_\t_\tV\thave\tv.stative\t_\t_\t_\t_\tO-V-v.stative
4\tno\tno\tDET\tDT\t_\t5\tdet\t_\t_\t_\tDET\tno\t_\t_\t_\t_\t_\tO-DET
5\trecord\trecord\tNOUN\tNN\tNumber=Sing\t3\tobj\t_\t_\t_\tN\trecord\tn.COMMUNICATION\t_\t_\t_\t_\tO-N-n.COMMUNICATION
6\tof\tof\tADP\tIN\t_\t8\tcase\t_\t_\t_\tP\tof\tp.Topic\tp.Topic\t_\t_\t_\tO-P-p.Topic
7\taa\ta\tDET\tDT\t_\t8\tdet\t_\t_\t_\tDET\ta\t_\t_\t_\t_\t_\tO-DET
8\treversal\treversal\tNOUN\tNN\tNumber=Sing\t5\tnmod\t_\tSpaceAfter=No\t_\tN\treversal\tn.EVENT\t_\t_\t_\t_\tO-N-n.EVENT
9\t.\t.\tPUNCT\t.\t_\t3\tpunct\t_\t_\t_\tPUNCT\t.\t_\t_\t_\t_\t_\tO-PUNCT
";

    #[test]
    fn supersense_lowercased() {
        let d = parse_str(FIG2, true).unwrap();
        assert_eq!(d.sentences[0].tokens[7].ss.as_deref(), Some("n.event"));
        assert_eq!(d.doc_id, "reviews-001325");
    }

    #[test]
    fn empty_input() {
        assert!(parse_str("", true).unwrap().sentences.is_empty());
    }

    #[test]
    fn absent_supersense_written_as_underscore() {
        let d = parse_str(FIG2, true).unwrap();
        let row = write_token(&d.sentences[0].tokens[3]);
        assert_eq!(row.split('\t').nth(13), Some("_"));
    }

    #[test]
    fn minimal_sentence_rows() {
        let mk = |id, form: &str, head| Token {
            id,
            form: form.into(),
            lemma: form.into(),
            upos: "X".into(),
            xpos: "_".into(),
            head,
            deprel: if head == 0 { "root".into() } else { "dep".into() },
            deps: "_".into(),
            misc: "_".into(),
            ..Default::default()
        };
        let doc = Document {
            doc_id: "d".into(),
            sentences: vec![Sentence::new("d-1", vec![mk(1, "a", 0), mk(2, "b", 1)])],
            warnings: vec![],
        };
        let s = write_document(&doc);
        let data: Vec<_> = s.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data.len(), 3);
        assert_eq!(data[2], "");
    }

    #[test]
    fn strict_errors_and_lenient_warnings() {
        let bad = "1\ta\ta\tX\t_\t_\tzero\troot\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\n";
        assert!(matches!(parse_str(bad, true), Err(ConlluLexError::BadInteger { .. })));
        let d = parse_str(bad, false).unwrap();
        assert_eq!(d.warnings.len(), 1);
        let short = "1\ta\n";
        assert!(matches!(
            parse_str(short, true),
            Err(ConlluLexError::ColumnCount { found: 2, .. })
        ));
        let dangling = "1\ta\ta\tX\t_\t_\t0\troot\t_\t_\t3:2\t_\t_\t_\t_\t_\t_\t_\t_\n";
        assert!(parse_str(dangling, true).is_err());
        assert!(!parse_str(dangling, false).unwrap().warnings.is_empty());
    }

    #[test]
    fn fig2_round_trip_is_byte_identical() {
        let d = parse_str(FIG2, true).unwrap();
        let expected = FIG2
            .replace("\tn.GROUP\t", "\tn.group\t")
            .replace("n.COMMUNICATION\t", "n.communication\t")
            .replace("n.EVENT\t", "n.event\t")
            .replace("p.Topic\tp.Topic", "p.topic\tp.topic")
            + "\n";
        assert_eq!(write_document(&d), expected);
        assert_eq!(parse_str(&write_document(&d), true).unwrap(), d);
    }

    #[test]
    fn multiword_ranges_preserved() {
        let input = "# sent_id = x-1\n1-2\twon't\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\t_\n1\two\twill\tAUX\tMD\t_\t0\troot\t_\t_\t_\tAUX\twill\t_\t_\t_\t_\t_\tO-AUX\n2\tn't\tnot\tPART\tRB\t_\t1\tadvmod\t_\t_\t_\tADV\tnot\t_\t_\t_\t_\t_\tO-ADV\n\n";
        let d = parse_str(input, true).unwrap();
        assert_eq!(d.sentences[0].tokens.len(), 2);
        assert_eq!(write_document(&d), input);
    }

    fn grouped(rows: &[(&str, Option<(u32, u32)>)]) -> Sentence {
        let toks = rows
            .iter()
            .enumerate()
            .map(|(i, (f, m))| Token {
                id: i + 1,
                form: f.to_string(),
                lemma: f.to_string(),
                head: if i == 0 { 0 } else { 1 },
                smwe: m.map(|(group, position)| MweRef { group, position }),
                lexcat: Some("N".into()),
                ..Default::default()
            })
            .collect();
        Sentence::new("g", toks)
    }

    #[test]
    fn grouping() {
        let s = grouped(&[("air", Some((1, 1))), ("conditioning", Some((1, 2)))]);
        let g = group_lexical_expressions(&s).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].tokens, vec![1, 2]);
        assert_eq!(g[0].strength, Strength::Strong);

        let s = grouped(&[("a", None), ("b", None), ("c", None)]);
        assert_eq!(group_lexical_expressions(&s).unwrap().len(), 3);

        let s = grouped(&[("cut", Some((1, 1))), ("it", None), ("short", Some((1, 2)))]);
        let g = group_lexical_expressions(&s).unwrap();
        assert_eq!(g[0].tokens, vec![1, 3]);
        assert_eq!(g[1].tokens, vec![2]);

        let s = grouped(&[("x", Some((4, 1))), ("y", Some((4, 3)))]);
        assert_eq!(
            group_lexical_expressions(&s).unwrap_err(),
            ConlluLexError::MweGroup {
                sent_id: "g".into(),
                group: "4".into()
            }
        );
    }
}
