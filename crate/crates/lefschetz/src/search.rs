//! Certificate search: bidirectional breadth-first exploration of the move
//! graph, quick non-equivalence through move-invariant quantities, replay of
//! certificates, and the scripted chains that realize a base-word move as a
//! sequence of cover-word moves.
//!
//! Verdicts are one-sided evidence: `Equivalent` always carries a replaying
//! certificate, `Distinguished` carries invariant values that differ under
//! exact integer comparison, and `Inconclusive` is an honest third answer
//! when the budget runs out.

use std::collections::{BTreeMap, BTreeSet};

use crate::cover::{CoverClass, CurveDictionary};
use crate::format::word_hash;
use crate::homology::MCMatrix;
use crate::words::{
    inverse_moves, Base, Letter, Move, MoveCertificate, MoveKind, PairOrder, Word, WordKey,
};
use crate::{Error, Result};

/// Limits and move-set configuration of one search.
#[derive(Clone, Debug)]
pub struct SearchConfig {
    /// Combined depth of the two frontiers, an upper bound on certificate
    /// length before bridging flips.
    pub max_depth: usize,
    /// Pair insertions allowed along one branch.
    pub max_insert_letters: usize,
    pub allowed_moves: BTreeSet<MoveKind>,
    /// Conjugators for simultaneous conjugation; the infinite move family is
    /// restricted to this finite pool.
    pub conjugator_pool: Vec<MCMatrix>,
    /// Maximum stored nodes across both frontiers.
    pub node_budget: usize,
    /// Restrict insertions to the two scripted positions instead of general
    /// ones.
    pub strict_positions: bool,
}

impl SearchConfig {
    pub fn all_moves() -> BTreeSet<MoveKind> {
        [
            MoveKind::Insert,
            MoveKind::Delete,
            MoveKind::Commute,
            MoveKind::Flip,
            MoveKind::Conjugate,
        ]
        .into_iter()
        .collect()
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_depth: 4,
            max_insert_letters: 4,
            allowed_moves: Self::all_moves(),
            conjugator_pool: Vec::new(),
            node_budget: 100_000,
            strict_positions: false,
        }
    }
}

/// A move-invariant quantity whose values differ between the two words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub invariant: String,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SearchOutcome {
    Equivalent(MoveCertificate),
    Distinguished(Witness),
    Inconclusive { nodes: usize, reason: String },
}

/// Compare the move-invariant quantities of two words: characteristic
/// polynomial of the total monodromy, the closure flag over the sphere, and
/// the trace. Returns the first that differs.
///
/// A fiber or base mismatch is itself a distinguishing witness.
pub fn quick_distinguish(w1: &Word, w2: &Word, dict: &CurveDictionary) -> Result<Option<Witness>> {
    if w1.fiber() != w2.fiber() {
        return Ok(Some(Witness {
            invariant: "fiber".into(),
            left: w1.fiber().to_string(),
            right: w2.fiber().to_string(),
        }));
    }
    if w1.base() != w2.base() {
        return Ok(Some(Witness {
            invariant: "base".into(),
            left: w1.base().to_string(),
            right: w2.base().to_string(),
        }));
    }
    let m1 = w1.monodromy(dict)?;
    let m2 = w2.monodromy(dict)?;
    let p1 = m1.char_poly();
    let p2 = m2.char_poly();
    if p1 != p2 {
        let render = |p: &[num_bigint::BigInt]| {
            p.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        return Ok(Some(Witness {
            invariant: "char_poly".into(),
            left: render(&p1),
            right: render(&p2),
        }));
    }
    if w1.base() == Base::Sphere {
        let c1 = m1.is_identity();
        let c2 = m2.is_identity();
        if c1 != c2 {
            return Ok(Some(Witness {
                invariant: "s2_closure".into(),
                left: c1.to_string(),
                right: c2.to_string(),
            }));
        }
    }
    if m1.trace() != m2.trace() {
        return Ok(Some(Witness {
            invariant: "trace".into(),
            left: m1.trace().to_string(),
            right: m2.trace().to_string(),
        }));
    }
    Ok(None)
}

struct Node {
    word: Word,
    parent: Option<usize>,
    via: Option<Move>,
    inserts: usize,
}

struct Side {
    nodes: Vec<Node>,
    visited: BTreeMap<WordKey, usize>,
    frontier: Vec<usize>,
    depth: usize,
}

impl Side {
    fn new(root: Word, key: WordKey) -> Side {
        let mut visited = BTreeMap::new();
        visited.insert(key, 0);
        Side {
            nodes: vec![Node {
                word: root,
                parent: None,
                via: None,
                inserts: 0,
            }],
            visited,
            frontier: vec![0],
            depth: 0,
        }
    }

    fn path_from_root(&self, mut idx: usize) -> Vec<usize> {
        let mut chain = vec![idx];
        while let Some(p) = self.nodes[idx].parent {
            chain.push(p);
            idx = p;
        }
        chain.reverse();
        chain
    }
}

/// Decide Hurwitz equivalence by bidirectional breadth-first search over the
/// configured move set, deduplicating on canonical word keys.
///
/// Deterministic: expansion, deduplication, and the choice of meeting node
/// (lexicographically least canonical key) depend only on the inputs.
pub fn bfs_equivalent(
    w1: &Word,
    w2: &Word,
    cfg: &SearchConfig,
    dict: &mut CurveDictionary,
) -> Result<SearchOutcome> {
    if cfg.node_budget == 0 || cfg.max_insert_letters == 0 {
        return Err(Error::WordShape("search budgets must be positive".into()));
    }
    if let Some(witness) = quick_distinguish(w1, w2, dict)? {
        return Ok(SearchOutcome::Distinguished(witness));
    }
    for m in &cfg.conjugator_pool {
        if !m.is_symplectic() {
            return Err(Error::NotSymplectic);
        }
        if !w1.fiber().is_orientable() && !m.commutes_with(&dict.deck())? {
            return Err(Error::NotALift);
        }
    }

    // Insertion alphabet: letters present in either word, closed under
    // inversion.
    let mut alphabet: BTreeSet<Letter> = BTreeSet::new();
    for l in w1.letters().iter().chain(w2.letters()) {
        alphabet.insert(l.clone());
        alphabet.insert(l.inverse());
    }
    let alphabet: Vec<Letter> = alphabet.into_iter().collect();

    let mut forward = Side::new(w1.clone(), w1.canonical_key(dict)?);
    let mut backward = Side::new(w2.clone(), w2.canonical_key(dict)?);
    let mut nodes_total = 2usize;

    // Depth-zero meeting: equal keys bridge by orientation flips alone.
    if let Some(key) = forward.visited.keys().next() {
        if backward.visited.contains_key(key) {
            if let Some(cert) = try_certificate(&forward, 0, &backward, 0, w1, w2, cfg, dict)? {
                return Ok(SearchOutcome::Equivalent(cert));
            }
        }
    }

    while forward.depth + backward.depth < cfg.max_depth {
        // Alternate by depth so both sides advance: a certificate that
        // splits as (a, b) with a + b <= max_depth is then always covered
        // when the move set is closed under inversion, and starvation of
        // one side cannot eat the combined budget.
        let expand_forward = if forward.frontier.is_empty() {
            false
        } else if backward.frontier.is_empty() {
            true
        } else if forward.depth != backward.depth {
            forward.depth < backward.depth
        } else {
            forward.frontier.len() <= backward.frontier.len()
        };
        let (side, other, side_is_forward) = if expand_forward {
            (&mut forward, &backward, true)
        } else {
            (&mut backward, &forward, false)
        };
        if side.frontier.is_empty() {
            // Both frontiers exhausted: the restricted move graph is fully
            // explored without a meeting.
            return Ok(SearchOutcome::Inconclusive {
                nodes: nodes_total,
                reason: "move graph exhausted without a meeting".into(),
            });
        }

        let mut new_frontier: Vec<(WordKey, usize)> = Vec::new();
        let mut meetings: BTreeSet<WordKey> = BTreeSet::new();
        for &idx in &side.frontier.clone() {
            let moves = enumerate_moves(
                &side.nodes[idx].word,
                &alphabet,
                cfg,
                side.nodes[idx].inserts,
                dict,
            );
            for mv in moves {
                let child = match side.nodes[idx].word.apply_move(&mv, dict) {
                    Ok(w) => w,
                    Err(_) => continue,
                };
                let key = child.canonical_key(dict)?;
                if side.visited.contains_key(&key) {
                    continue;
                }
                if nodes_total >= cfg.node_budget {
                    return Ok(SearchOutcome::Inconclusive {
                        nodes: nodes_total,
                        reason: "node budget exhausted".into(),
                    });
                }
                let inserts =
                    side.nodes[idx].inserts + usize::from(matches!(mv, Move::InsertPair { .. }));
                let child_idx = side.nodes.len();
                side.nodes.push(Node {
                    word: child,
                    parent: Some(idx),
                    via: Some(mv),
                    inserts,
                });
                side.visited.insert(key.clone(), child_idx);
                nodes_total += 1;
                if other.visited.contains_key(&key) {
                    meetings.insert(key.clone());
                }
                new_frontier.push((key, child_idx));
            }
        }
        new_frontier.sort();
        side.frontier = new_frontier.into_iter().map(|(_, i)| i).collect();
        side.depth += 1;

        for key in meetings {
            let (fwd_idx, bwd_idx) = if side_is_forward {
                (side.visited[&key], other.visited[&key])
            } else {
                (other.visited[&key], side.visited[&key])
            };
            let (fwd_ref, bwd_ref): (&Side, &Side) = if side_is_forward {
                (side, other)
            } else {
                (other, side)
            };
            if let Some(cert) =
                try_certificate(fwd_ref, fwd_idx, bwd_ref, bwd_idx, w1, w2, cfg, dict)?
            {
                return Ok(SearchOutcome::Equivalent(cert));
            }
        }
    }

    Ok(SearchOutcome::Inconclusive {
        nodes: nodes_total,
        reason: "depth budget exhausted".into(),
    })
}

/// Deterministic move enumeration for one node.
fn enumerate_moves(
    word: &Word,
    alphabet: &[Letter],
    cfg: &SearchConfig,
    inserts_used: usize,
    dict: &CurveDictionary,
) -> Vec<Move> {
    let mut out = Vec::new();
    let len = word.len();
    if cfg.allowed_moves.contains(&MoveKind::Delete) {
        for pos in 0..len.saturating_sub(1) {
            if word.letters()[pos].is_inverse_of(&word.letters()[pos + 1]) {
                out.push(Move::DeletePair { pos });
            }
        }
    }
    if cfg.allowed_moves.contains(&MoveKind::Commute) {
        for pos in 0..len.saturating_sub(1) {
            if word.can_commute(pos, dict) {
                out.push(Move::Commute { pos });
            }
        }
    }
    if cfg.allowed_moves.contains(&MoveKind::Insert) && inserts_used < cfg.max_insert_letters {
        if cfg.strict_positions {
            for i in 0..len.saturating_sub(1) {
                out.push(Move::InsertPair {
                    pos: i + 2,
                    letter: word.letters()[i].clone(),
                    order: PairOrder::InverseFirst,
                });
                out.push(Move::InsertPair {
                    pos: i,
                    letter: word.letters()[i + 1].clone(),
                    order: PairOrder::InverseLast,
                });
            }
        } else {
            // The alphabet is closed under inversion, so inserting with the
            // inverse letter first never reaches a new word.
            for pos in 0..=len {
                for letter in alphabet {
                    out.push(Move::InsertPair {
                        pos,
                        letter: letter.clone(),
                        order: PairOrder::InverseLast,
                    });
                }
            }
        }
    }
    if cfg.allowed_moves.contains(&MoveKind::Conjugate) {
        for m in &cfg.conjugator_pool {
            out.push(Move::ConjugateAll { matrix: m.clone() });
        }
    }
    // Orientation flips preserve the canonical key, so expanding them would
    // only produce self-loops.
    out
}

/// Flip sequence turning `from` into exactly `to`; fails when the words
/// differ by anything other than the orientation rewrite of single letters.
fn bridge_moves(from: &Word, to: &Word, cfg: &SearchConfig) -> Option<Vec<Move>> {
    if from.len() != to.len() {
        return None;
    }
    let mut moves = Vec::new();
    for (pos, (a, b)) in from.letters().iter().zip(to.letters()).enumerate() {
        if a == b {
            continue;
        }
        match a.flipped() {
            Ok(f) if f == *b => moves.push(Move::ThetaFlip { pos }),
            _ => return None,
        }
    }
    if !moves.is_empty() && !cfg.allowed_moves.contains(&MoveKind::Flip) {
        return None;
    }
    Some(moves)
}

#[allow(clippy::too_many_arguments)]
fn try_certificate(
    forward: &Side,
    fwd_idx: usize,
    backward: &Side,
    bwd_idx: usize,
    w1: &Word,
    w2: &Word,
    cfg: &SearchConfig,
    dict: &mut CurveDictionary,
) -> Result<Option<MoveCertificate>> {
    let m1 = &forward.nodes[fwd_idx].word;
    let m2 = &backward.nodes[bwd_idx].word;
    let Some(bridge) = bridge_moves(m1, m2, cfg) else {
        // Same canonical key but raw forms differ by more than flips (or
        // flips are disallowed): not a usable meeting, keep searching.
        return Ok(None);
    };
    let mut moves: Vec<Move> = Vec::new();
    let fwd_chain = forward.path_from_root(fwd_idx);
    for pair in fwd_chain.windows(2) {
        moves.push(
            forward.nodes[pair[1]]
                .via
                .clone()
                .expect("non-root has a move"),
        );
    }
    moves.extend(bridge);
    let bwd_chain = backward.path_from_root(bwd_idx);
    for pair in bwd_chain.windows(2).rev() {
        let parent_word = &backward.nodes[pair[0]].word;
        let via = backward.nodes[pair[1]]
            .via
            .as_ref()
            .expect("non-root has a move");
        moves.extend(inverse_moves(via, parent_word)?);
    }
    // Soundness gate: the assembled certificate must replay exactly.
    let mut word = w1.clone();
    for mv in &moves {
        word = word.apply_move(mv, dict)?;
    }
    if word != *w2 {
        return Ok(None);
    }
    Ok(Some(MoveCertificate {
        start: word_hash(w1),
        end: word_hash(w2),
        moves,
    }))
}

/// Apply a certificate to a word, validating the start hash, every move, and
/// the end hash. Fails loudly with the one-based step index of the first
/// illegal move.
pub fn replay(cert: &MoveCertificate, start: &Word, dict: &mut CurveDictionary) -> Result<Word> {
    let found = word_hash(start);
    if cert.start != found {
        return Err(Error::StartHashMismatch {
            expected: cert.start.clone(),
            found,
        });
    }
    let mut word = start.clone();
    for (i, mv) in cert.moves.iter().enumerate() {
        word = word.apply_move(mv, dict).map_err(|e| Error::ReplayStep {
            step: i + 1,
            source: Box::new(e),
        })?;
    }
    let end = word_hash(&word);
    if cert.end != end {
        return Err(Error::EndHashMismatch {
            expected: cert.end.clone(),
            found: end,
        });
    }
    Ok(word)
}

fn certificate_from_moves(
    start: &Word,
    moves: Vec<Move>,
    dict: &mut CurveDictionary,
) -> Result<MoveCertificate> {
    let mut word = start.clone();
    for (i, mv) in moves.iter().enumerate() {
        word = word.apply_move(mv, dict).map_err(|e| Error::ReplayStep {
            step: i + 1,
            source: Box::new(e),
        })?;
    }
    Ok(MoveCertificate {
        start: word_hash(start),
        end: word_hash(&word),
        moves,
    })
}

/// Check that positions `2i .. 2i+1` of a lifted word carry one twist pair:
/// exponents `+1, -1` with deck-exchanged classes.
fn check_lift_pair_shape(word: &Word, pair: usize) -> Result<()> {
    let p = 2 * pair;
    if p + 1 >= word.len() {
        return Err(Error::OutOfBounds {
            pos: p,
            len: word.len(),
        });
    }
    let (
        Letter::Cover {
            class: c0,
            exponent: e0,
        },
        Letter::Cover {
            class: c1,
            exponent: e1,
        },
    ) = (&word.letters()[p], &word.letters()[p + 1])
    else {
        return Err(Error::WordShape(
            "lifted word must consist of cover letters".into(),
        ));
    };
    if *e0 != crate::cover::Sign::Plus || *e1 != crate::cover::Sign::Minus {
        return Err(Error::WordShape(format!(
            "letters {p}, {} do not form a positive twist pair",
            p + 1
        )));
    }
    let deck = crate::homology::deck_involution(word.fiber().cover_genus());
    let matched = match (c0, c1) {
        (CoverClass::Class(x), CoverClass::Class(y)) => deck.apply(x)?.same_unoriented(y),
        (CoverClass::Null { tag: t0, side: s0 }, CoverClass::Null { tag: t1, side: s1 }) => {
            t0 == t1 && *s0 != *s1
        }
        _ => false,
    };
    if !matched {
        return Err(Error::WordShape(format!(
            "letters {p}, {} are not deck images of each other",
            p + 1
        )));
    }
    Ok(())
}

/// Scripted chain of cover-word moves carrying the lift of a positive word
/// to the lift of the same word with a cancelling pair of letter `i`
/// inserted after letter `i + 1`: two pair insertions walked into place and
/// back out, with commutations of deck-exchanged twists in between.
pub fn lifted_trailing_pair_chain(
    lifted: &Word,
    i: usize,
    dict: &mut CurveDictionary,
) -> Result<MoveCertificate> {
    if !lifted.fiber().is_orientable() {
        return Err(Error::WordShape("chain operates on lifted words".into()));
    }
    check_lift_pair_shape(lifted, i)?;
    check_lift_pair_shape(lifted, i + 1)?;
    let p = 2 * i;
    let twist = lifted.letters()[p].clone();
    let companion = lifted.letters()[p + 1].clone();
    let moves = vec![
        Move::Commute { pos: p },
        Move::InsertPair {
            pos: p + 3,
            letter: twist.clone(),
            order: PairOrder::InverseFirst,
        },
        Move::InsertPair {
            pos: p + 6,
            letter: twist,
            order: PairOrder::InverseFirst,
        },
        Move::DeletePair { pos: p + 3 },
        Move::Commute { pos: p },
        Move::InsertPair {
            pos: p + 3,
            letter: companion.clone(),
            order: PairOrder::InverseFirst,
        },
        Move::InsertPair {
            pos: p + 6,
            letter: companion,
            order: PairOrder::InverseFirst,
        },
        Move::DeletePair { pos: p + 3 },
        Move::Commute { pos: p + 5 },
        Move::Commute { pos: p + 6 },
    ];
    certificate_from_moves(lifted, moves, dict)
}

/// Scripted chain carrying the lift of a positive word to the lift of the
/// same word with a cancelling pair of letter `i + 1` inserted before letter
/// `i`: the two insertions land directly in lift shape.
pub fn lifted_leading_pair_chain(
    lifted: &Word,
    i: usize,
    dict: &mut CurveDictionary,
) -> Result<MoveCertificate> {
    if !lifted.fiber().is_orientable() {
        return Err(Error::WordShape("chain operates on lifted words".into()));
    }
    check_lift_pair_shape(lifted, i)?;
    check_lift_pair_shape(lifted, i + 1)?;
    let p = 2 * i;
    let next_twist = lifted.letters()[p + 2].clone();
    let next_companion = lifted.letters()[p + 3].clone();
    let moves = vec![
        Move::InsertPair {
            pos: p,
            letter: next_twist,
            order: PairOrder::InverseLast,
        },
        Move::InsertPair {
            pos: p + 1,
            letter: next_companion,
            order: PairOrder::InverseLast,
        },
    ];
    certificate_from_moves(lifted, moves, dict)
}

/// Simultaneous conjugation of a lifted word as a one-move certificate.
pub fn lifted_conjugation_chain(
    lifted: &Word,
    conjugator: &MCMatrix,
    dict: &mut CurveDictionary,
) -> Result<MoveCertificate> {
    if !lifted.fiber().is_orientable() {
        return Err(Error::WordShape("chain operates on lifted words".into()));
    }
    certificate_from_moves(
        lifted,
        vec![Move::ConjugateAll {
            matrix: conjugator.clone(),
        }],
        dict,
    )
}
