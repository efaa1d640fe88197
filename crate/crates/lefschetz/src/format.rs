//! Line-oriented text formats: curve dictionaries, words, lifted words,
//! move scripts, matrices, and move certificates.
//!
//! Every format ignores blank lines and `#` comments, reports errors with
//! one-based line numbers, and round-trips through its serializer
//! byte-stably. Word hashes bind the exact serialized form.

use sha2::{Digest, Sha256};

use crate::cover::{CoverClass, CurveDictionary, CurveId, CurveLift, OrientedCurve, Sign};
use crate::homology::{HClass, MCMatrix};
use crate::words::{Base, Fiber, Letter, Move, MoveCertificate, PairOrder, Word};
use crate::{Error, Result};

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Strip comment and split into tokens; `None` when the line carries none.
fn tokens(line: &str) -> Option<Vec<&str>> {
    let body = line.split('#').next().unwrap_or("").trim();
    if body.is_empty() {
        None
    } else {
        Some(body.split_whitespace().collect())
    }
}

fn parse_i64(tok: &str, line: usize) -> Result<i64> {
    tok.parse::<i64>()
        .map_err(|_| perr(line, format!("expected an integer, found `{tok}`")))
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse::<usize>()
        .map_err(|_| perr(line, format!("expected a position, found `{tok}`")))
}

fn parse_theta(tok: &str, line: usize) -> Result<Sign> {
    match tok {
        "+" => Ok(Sign::Plus),
        "-" => Ok(Sign::Minus),
        _ => Err(perr(line, format!("expected `+` or `-`, found `{tok}`"))),
    }
}

fn parse_exponent(tok: &str, line: usize) -> Result<Sign> {
    match tok {
        "+1" => Ok(Sign::Plus),
        "-1" => Ok(Sign::Minus),
        _ => Err(perr(line, format!("expected `+1` or `-1`, found `{tok}`"))),
    }
}

fn parse_base(tok: &str, line: usize) -> Result<Base> {
    match tok {
        "D2" => Ok(Base::Disk),
        "S2" => Ok(Base::Sphere),
        _ => Err(perr(line, format!("expected `D2` or `S2`, found `{tok}`"))),
    }
}

fn exp_str(s: Sign) -> &'static str {
    match s {
        Sign::Plus => "+1",
        Sign::Minus => "-1",
    }
}

// ---------------------------------------------------------------------------
// Curve files

/// Parse a curve dictionary:
///
/// ```text
/// surface N <g>
/// curve <id> lift <2k integers>     # coefficients in order a1 b1 ... ak bk
/// curve <id> null <tag>             # null-homologous curve, tracked symbolically
/// disjoint <id> <id>
/// ```
pub fn parse_curve_file(src: &str) -> Result<CurveDictionary> {
    let mut dict: Option<CurveDictionary> = None;
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let Some(toks) = tokens(raw) else { continue };
        match toks[0] {
            "surface" => {
                if dict.is_some() {
                    return Err(perr(line, "duplicate surface line"));
                }
                if toks.len() != 3 || toks[1] != "N" {
                    return Err(perr(line, "expected `surface N <g>`"));
                }
                let g = parse_i64(toks[2], line)?;
                if g < 1 {
                    return Err(perr(line, "genus must be >= 1"));
                }
                dict = Some(CurveDictionary::new(g as u32).map_err(|e| e.at_line(line))?);
            }
            "curve" => {
                let dict = dict
                    .as_mut()
                    .ok_or_else(|| perr(line, "`curve` before `surface`"))?;
                if toks.len() < 3 {
                    return Err(perr(
                        line,
                        "expected `curve <id> lift <ints>` or `curve <id> null <tag>`",
                    ));
                }
                let id = CurveId::new(toks[1]).map_err(|e| e.at_line(line))?;
                match toks[2] {
                    "lift" => {
                        let coeffs = toks[3..]
                            .iter()
                            .map(|t| parse_i64(t, line))
                            .collect::<Result<Vec<_>>>()?;
                        dict.register(id, HClass::new(coeffs))
                            .map_err(|e| e.at_line(line))?;
                    }
                    "null" => {
                        if toks.len() != 4 {
                            return Err(perr(line, "expected `curve <id> null <tag>`"));
                        }
                        dict.register_null(id, toks[3])
                            .map_err(|e| e.at_line(line))?;
                    }
                    other => {
                        return Err(perr(
                            line,
                            format!("expected `lift` or `null`, found `{other}`"),
                        ))
                    }
                }
            }
            "disjoint" => {
                let dict = dict
                    .as_mut()
                    .ok_or_else(|| perr(line, "`disjoint` before `surface`"))?;
                if toks.len() != 3 {
                    return Err(perr(line, "expected `disjoint <id> <id>`"));
                }
                let a = CurveId::new(toks[1]).map_err(|e| e.at_line(line))?;
                let b = CurveId::new(toks[2]).map_err(|e| e.at_line(line))?;
                dict.declare_disjoint(&a, &b).map_err(|e| e.at_line(line))?;
            }
            other => return Err(perr(line, format!("unknown directive `{other}`"))),
        }
    }
    dict.ok_or_else(|| perr(src.lines().count().max(1), "missing `surface N <g>` line"))
}

pub fn serialize_curve_file(dict: &CurveDictionary) -> String {
    let mut out = format!("surface N {}\n", dict.genus());
    for curve in dict.curves() {
        match curve.lift() {
            CurveLift::Class(g) => {
                out.push_str(&format!("curve {} lift {}\n", curve.id(), g));
            }
            CurveLift::Null { tag } => {
                out.push_str(&format!("curve {} null {}\n", curve.id(), tag));
            }
        }
    }
    for (a, b) in dict.disjoint_pairs() {
        out.push_str(&format!("disjoint {a} {b}\n"));
    }
    out
}

// ---------------------------------------------------------------------------
// Word files

/// Parse a word over the dictionary's fiber:
///
/// ```text
/// surface N <g>          # optional, checked against the dictionary
/// base D2 | S2
/// letter <curve-id> <+|-> <+1|-1>
/// ```
pub fn parse_word_file(src: &str, dict: &CurveDictionary) -> Result<Word> {
    let mut base: Option<Base> = None;
    let mut letters: Vec<Letter> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let Some(toks) = tokens(raw) else { continue };
        match toks[0] {
            "surface" => {
                if base.is_some() || !letters.is_empty() {
                    return Err(perr(line, "`surface` must come first"));
                }
                if toks.len() != 3 || toks[1] != "N" {
                    return Err(perr(line, "expected `surface N <g>`"));
                }
                let g = parse_i64(toks[2], line)?;
                if g != dict.genus() as i64 {
                    return Err(perr(
                        line,
                        format!(
                            "word is over N{g} but the dictionary describes N{}",
                            dict.genus()
                        ),
                    ));
                }
            }
            "base" => {
                if base.is_some() {
                    return Err(perr(line, "duplicate base line"));
                }
                if toks.len() != 2 {
                    return Err(perr(line, "expected `base D2` or `base S2`"));
                }
                base = Some(parse_base(toks[1], line)?);
            }
            "letter" => {
                if base.is_none() {
                    return Err(perr(line, "`letter` before `base`"));
                }
                if toks.len() != 4 {
                    return Err(perr(line, "expected `letter <curve-id> <+|-> <+1|-1>`"));
                }
                let id = CurveId::new(toks[1]).map_err(|e| e.at_line(line))?;
                dict.get(&id).map_err(|e| e.at_line(line))?;
                let theta = parse_theta(toks[2], line)?;
                let exponent = parse_exponent(toks[3], line)?;
                letters.push(Letter::Dict {
                    curve: OrientedCurve::new(id, theta),
                    exponent,
                });
            }
            other => return Err(perr(line, format!("unknown directive `{other}`"))),
        }
    }
    let base = base.ok_or_else(|| perr(src.lines().count().max(1), "missing `base` line"))?;
    let word = Word::new(
        Fiber::NonOrientable {
            genus: dict.genus(),
        },
        base,
        letters,
    )?;
    word.validate(dict)?;
    Ok(word)
}

/// Parse a lifted (achiral) word, which is self-contained:
///
/// ```text
/// surface O <k>
/// base D2 | S2
/// letter lift <2k integers> <+1|-1>
/// letter null <tag> <+|-> <+1|-1>
/// ```
pub fn parse_achiral_word_file(src: &str) -> Result<Word> {
    let mut genus: Option<u32> = None;
    let mut base: Option<Base> = None;
    let mut letters: Vec<Letter> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let Some(toks) = tokens(raw) else { continue };
        match toks[0] {
            "surface" => {
                if genus.is_some() {
                    return Err(perr(line, "duplicate surface line"));
                }
                if toks.len() != 3 || toks[1] != "O" {
                    return Err(perr(line, "expected `surface O <k>`"));
                }
                let k = parse_i64(toks[2], line)?;
                if k < 0 {
                    return Err(perr(line, "cover genus must be >= 0"));
                }
                genus = Some(k as u32);
            }
            "base" => {
                if genus.is_none() {
                    return Err(perr(line, "`base` before `surface O <k>`"));
                }
                if base.is_some() {
                    return Err(perr(line, "duplicate base line"));
                }
                if toks.len() != 2 {
                    return Err(perr(line, "expected `base D2` or `base S2`"));
                }
                base = Some(parse_base(toks[1], line)?);
            }
            "letter" => {
                let k = genus.ok_or_else(|| perr(line, "`letter` before `surface O <k>`"))?;
                if base.is_none() {
                    return Err(perr(line, "`letter` before `base`"));
                }
                if toks.len() < 2 {
                    return Err(perr(line, "incomplete letter"));
                }
                let letter = parse_cover_letter(&toks[1..], 2 * k as usize, line)?;
                letters.push(letter);
            }
            other => return Err(perr(line, format!("unknown directive `{other}`"))),
        }
    }
    let genus =
        genus.ok_or_else(|| perr(src.lines().count().max(1), "missing `surface O <k>` line"))?;
    let base = base.ok_or_else(|| perr(src.lines().count().max(1), "missing `base` line"))?;
    Word::new(Fiber::Orientable { genus }, base, letters)
}

fn parse_cover_letter(toks: &[&str], rank: usize, line: usize) -> Result<Letter> {
    match toks[0] {
        "lift" => {
            if toks.len() != rank + 2 {
                return Err(perr(
                    line,
                    format!(
                        "expected `lift <{rank} integers> <+1|-1>`, found {} tokens",
                        toks.len() - 1
                    ),
                ));
            }
            let coeffs = toks[1..=rank]
                .iter()
                .map(|t| parse_i64(t, line))
                .collect::<Result<Vec<_>>>()?;
            let exponent = parse_exponent(toks[rank + 1], line)?;
            let class = HClass::new(coeffs);
            if class.is_zero() {
                return Err(perr(
                    line,
                    "zero cover class; use `null <tag> <side>` instead",
                ));
            }
            Ok(Letter::Cover {
                class: CoverClass::Class(class),
                exponent,
            })
        }
        "null" => {
            if toks.len() != 4 {
                return Err(perr(line, "expected `null <tag> <+|-> <+1|-1>`"));
            }
            let side = parse_theta(toks[2], line)?;
            let exponent = parse_exponent(toks[3], line)?;
            Ok(Letter::Cover {
                class: CoverClass::Null {
                    tag: toks[1].to_string(),
                    side,
                },
                exponent,
            })
        }
        other => Err(perr(
            line,
            format!("expected `lift` or `null`, found `{other}`"),
        )),
    }
}

/// Parse a word of either kind, dispatching on the surface header.
pub fn parse_any_word(src: &str, dict: Option<&CurveDictionary>) -> Result<Word> {
    let oriented = src
        .lines()
        .filter_map(tokens)
        .next()
        .map(|t| t.len() >= 2 && t[0] == "surface" && t[1] == "O")
        .unwrap_or(false);
    if oriented {
        parse_achiral_word_file(src)
    } else {
        let dict =
            dict.ok_or_else(|| perr(1, "word over a non-orientable fiber needs a dictionary"))?;
        parse_word_file(src, dict)
    }
}

fn letter_body(letter: &Letter) -> String {
    match letter {
        Letter::Dict { curve, exponent } => {
            format!("{} {} {}", curve.curve, curve.theta, exp_str(*exponent))
        }
        Letter::Cover { class, exponent } => match class {
            CoverClass::Class(g) => format!("lift {} {}", g, exp_str(*exponent)),
            CoverClass::Null { tag, side } => format!("null {tag} {side} {}", exp_str(*exponent)),
        },
    }
}

pub fn serialize_word(word: &Word) -> String {
    let mut out = String::new();
    match word.fiber() {
        Fiber::NonOrientable { genus } => out.push_str(&format!("surface N {genus}\n")),
        Fiber::Orientable { genus } => out.push_str(&format!("surface O {genus}\n")),
    }
    out.push_str(&format!("base {}\n", word.base()));
    for l in word.letters() {
        out.push_str(&format!("letter {}\n", letter_body(l)));
    }
    out
}

/// Hash binding the exact serialized word.
pub fn word_hash(word: &Word) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serialize_word(word).as_bytes());
    let digest = hasher.finalize();
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

// ---------------------------------------------------------------------------
// Matrix files

/// Parse a matrix file: `matrix <n>` followed by `n` rows of `n` integers.
pub fn parse_matrix_file(src: &str) -> Result<MCMatrix> {
    let mut n: Option<usize> = None;
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let Some(toks) = tokens(raw) else { continue };
        match n {
            None => {
                if toks.len() != 2 || toks[0] != "matrix" {
                    return Err(perr(line, "expected `matrix <n>`"));
                }
                n = Some(parse_usize(toks[1], line)?);
            }
            Some(n) => {
                if rows.len() == n {
                    return Err(perr(line, "more rows than declared"));
                }
                if toks.len() != n {
                    return Err(perr(
                        line,
                        format!("expected {n} integers, found {}", toks.len()),
                    ));
                }
                rows.push(
                    toks.iter()
                        .map(|t| parse_i64(t, line))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
        }
    }
    let n = n.ok_or_else(|| perr(src.lines().count().max(1), "missing `matrix <n>` line"))?;
    if rows.len() != n {
        return Err(perr(
            src.lines().count().max(1),
            format!("expected {n} rows, found {}", rows.len()),
        ));
    }
    MCMatrix::from_rows(rows)
}

pub fn serialize_matrix_file(m: &MCMatrix) -> String {
    let mut out = format!("matrix {}\n", m.rank());
    for r in 0..m.rank() {
        let row: Vec<String> = (0..m.rank()).map(|c| m.get(r, c).to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

// ---------------------------------------------------------------------------
// Move scripts and certificates

/// A parsed move line. Conjugations may reference a matrix file, resolved by
/// the caller, or carry the matrix inline.
#[derive(Clone, Debug, PartialEq)]
pub enum MoveSpec {
    Concrete(Move),
    ConjFile(String),
}

/// Parse a move script: one move per line.
///
/// ```text
/// insert <pos> <curve-id> <+|-> [<+1|-1>] <left|right>
/// insert <pos> lift <2k integers> <+1|-1> <left|right>
/// insert <pos> null <tag> <+|-> <+1|-1> <left|right>
/// delete <pos>
/// commute <pos>
/// flip <pos>
/// conj <matrix-file>
/// conj [ <n*n integers> ]
/// ```
pub fn parse_move_script(src: &str) -> Result<Vec<MoveSpec>> {
    let mut moves = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let Some(toks) = tokens(raw) else { continue };
        moves.push(parse_move_line(&toks, line)?);
    }
    Ok(moves)
}

fn parse_move_line(toks: &[&str], line: usize) -> Result<MoveSpec> {
    match toks[0] {
        "insert" => {
            if toks.len() < 4 {
                return Err(perr(line, "expected `insert <pos> <letter> <left|right>`"));
            }
            let pos = parse_usize(toks[1], line)?;
            let order = match *toks.last().expect("nonempty") {
                "left" => PairOrder::InverseFirst,
                "right" => PairOrder::InverseLast,
                other => {
                    return Err(perr(
                        line,
                        format!("expected `left` or `right`, found `{other}`"),
                    ))
                }
            };
            let body = &toks[2..toks.len() - 1];
            let letter = match body[0] {
                "lift" | "null" => {
                    // rank inferred from the token count: lift takes all
                    // integers between the keyword and the exponent.
                    if body[0] == "lift" {
                        if body.len() < 3 {
                            return Err(perr(line, "expected `lift <ints> <+1|-1>`"));
                        }
                        parse_cover_letter(body, body.len() - 2, line)?
                    } else {
                        parse_cover_letter(body, 0, line)?
                    }
                }
                id => {
                    let id = CurveId::new(id).map_err(|e| e.at_line(line))?;
                    let theta = parse_theta(
                        body.get(1)
                            .ok_or_else(|| perr(line, "missing orientation tag"))?,
                        line,
                    )?;
                    let exponent = match body.get(2) {
                        Some(t) => parse_exponent(t, line)?,
                        None => Sign::Plus,
                    };
                    Letter::Dict {
                        curve: OrientedCurve::new(id, theta),
                        exponent,
                    }
                }
            };
            Ok(MoveSpec::Concrete(Move::InsertPair { pos, letter, order }))
        }
        "delete" => {
            if toks.len() != 2 {
                return Err(perr(line, "expected `delete <pos>`"));
            }
            Ok(MoveSpec::Concrete(Move::DeletePair {
                pos: parse_usize(toks[1], line)?,
            }))
        }
        "commute" => {
            if toks.len() != 2 {
                return Err(perr(line, "expected `commute <pos>`"));
            }
            Ok(MoveSpec::Concrete(Move::Commute {
                pos: parse_usize(toks[1], line)?,
            }))
        }
        "flip" => {
            if toks.len() != 2 {
                return Err(perr(line, "expected `flip <pos>`"));
            }
            Ok(MoveSpec::Concrete(Move::ThetaFlip {
                pos: parse_usize(toks[1], line)?,
            }))
        }
        "conj" => {
            if toks.len() == 2 && toks[1] != "[" {
                return Ok(MoveSpec::ConjFile(toks[1].to_string()));
            }
            if toks.len() >= 3 && toks[1] == "[" && *toks.last().expect("nonempty") == "]" {
                let ints = toks[2..toks.len() - 1]
                    .iter()
                    .map(|t| parse_i64(t, line))
                    .collect::<Result<Vec<_>>>()?;
                let n = (ints.len() as f64).sqrt() as usize;
                if n * n != ints.len() {
                    return Err(perr(
                        line,
                        format!("{} entries do not form a square matrix", ints.len()),
                    ));
                }
                let rows = (0..n).map(|r| ints[r * n..(r + 1) * n].to_vec()).collect();
                return Ok(MoveSpec::Concrete(Move::ConjugateAll {
                    matrix: MCMatrix::from_rows(rows)?,
                }));
            }
            Err(perr(
                line,
                "expected `conj <matrix-file>` or `conj [ <ints> ]`",
            ))
        }
        other => Err(perr(line, format!("unknown move `{other}`"))),
    }
}

/// Resolve file-referencing conjugations through a loader.
pub fn resolve_moves(
    specs: Vec<MoveSpec>,
    mut load_matrix: impl FnMut(&str) -> Result<MCMatrix>,
) -> Result<Vec<Move>> {
    specs
        .into_iter()
        .map(|spec| match spec {
            MoveSpec::Concrete(mv) => Ok(mv),
            MoveSpec::ConjFile(path) => Ok(Move::ConjugateAll {
                matrix: load_matrix(&path)?,
            }),
        })
        .collect()
}

pub fn serialize_move(mv: &Move) -> String {
    match mv {
        Move::InsertPair { pos, letter, order } => {
            let ord = match order {
                PairOrder::InverseFirst => "left",
                PairOrder::InverseLast => "right",
            };
            format!("insert {pos} {} {ord}", letter_body(letter))
        }
        Move::DeletePair { pos } => format!("delete {pos}"),
        Move::Commute { pos } => format!("commute {pos}"),
        Move::ThetaFlip { pos } => format!("flip {pos}"),
        Move::ConjugateAll { matrix } => {
            let n = matrix.rank();
            let ints: Vec<String> = (0..n * n)
                .map(|i| matrix.get(i / n, i % n).to_string())
                .collect();
            format!("conj [ {} ]", ints.join(" "))
        }
    }
}

/// A parsed certificate: start/end hashes plus the move script.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateSpec {
    pub start: String,
    pub end: String,
    pub moves: Vec<MoveSpec>,
}

/// Parse a certificate:
///
/// ```text
/// start sha256:<hex>
/// end sha256:<hex>
/// <move lines>
/// ```
pub fn parse_certificate(src: &str) -> Result<CertificateSpec> {
    let mut start: Option<String> = None;
    let mut end: Option<String> = None;
    let mut moves = Vec::new();
    for (idx, raw) in src.lines().enumerate() {
        let line = idx + 1;
        let Some(toks) = tokens(raw) else { continue };
        match toks[0] {
            "start" => {
                if start.is_some() {
                    return Err(perr(line, "duplicate start line"));
                }
                if toks.len() != 2 {
                    return Err(perr(line, "expected `start sha256:<hex>`"));
                }
                start = Some(toks[1].to_string());
            }
            "end" => {
                if end.is_some() {
                    return Err(perr(line, "duplicate end line"));
                }
                if toks.len() != 2 {
                    return Err(perr(line, "expected `end sha256:<hex>`"));
                }
                end = Some(toks[1].to_string());
            }
            _ => {
                if start.is_none() || end.is_none() {
                    return Err(perr(line, "moves must follow the start and end lines"));
                }
                moves.push(parse_move_line(&toks, line)?);
            }
        }
    }
    let last = src.lines().count().max(1);
    Ok(CertificateSpec {
        start: start.ok_or_else(|| perr(last, "missing start line"))?,
        end: end.ok_or_else(|| perr(last, "missing end line"))?,
        moves,
    })
}

pub fn serialize_certificate(cert: &MoveCertificate) -> String {
    let mut out = format!("start {}\nend {}\n", cert.start, cert.end);
    for mv in &cert.moves {
        out.push_str(&serialize_move(mv));
        out.push('\n');
    }
    out
}
