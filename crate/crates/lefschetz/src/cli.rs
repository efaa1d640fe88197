//! Command-line front end: load curve and word files, run lifts, invariants,
//! normalization, move scripts, equivalence search, and certificate replay.
//!
//! All outputs are deterministic given inputs and seeds. Exit codes: 0 ok,
//! 2 parse error, 3 invariant violation, 4 unsupported hypothesis,
//! 5 search inconclusive.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cover::{standard_dictionary, CurveDictionary, OrientedCurve, Sign};
use crate::format;
use crate::homology::MCMatrix;
use crate::invariants::summarize;
use crate::lifting::lift_word;
use crate::search::{bfs_equivalent, replay, SearchConfig, SearchOutcome};
use crate::words::{Base, Fiber, Letter, Move, MoveKind, Word};
use crate::{Error, Result};

/// Loaded input state shared by the commands.
pub struct Session {
    pub dict: CurveDictionary,
    pub words: BTreeMap<String, Word>,
}

impl Session {
    /// Load a dictionary and word files; every word is validated against the
    /// dictionary before any command runs.
    pub fn load(dict_path: &Path, word_paths: &[PathBuf]) -> Result<Session> {
        let dict = format::parse_curve_file(&std::fs::read_to_string(dict_path)?)?;
        let mut words = BTreeMap::new();
        for path in word_paths {
            let src = std::fs::read_to_string(path)?;
            let word = format::parse_any_word(&src, Some(&dict))?;
            word.validate(&dict)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            words.insert(name, word);
        }
        Ok(Session { dict, words })
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "lefschetz",
    version,
    about = "Monodromy factorizations of non-orientable Lefschetz fibrations: lifts, invariants, and Hurwitz-move certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug)]
pub struct SearchOpts {
    /// Combined search depth across both frontiers.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
    /// Node budget across both frontiers.
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    /// Comma-separated move kinds: insert,delete,commute,flip,conj.
    #[arg(long)]
    pub moves: Option<String>,
    /// Matrix files forming the conjugator pool.
    #[arg(long = "conjugators")]
    pub conjugators: Vec<PathBuf>,
    /// Restrict insertions to the scripted positions.
    #[arg(long = "strict-positions", default_value_t = false)]
    pub strict_positions: bool,
    /// Pair insertions allowed along one branch.
    #[arg(long = "max-inserts", default_value_t = 4)]
    pub max_inserts: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and check curve and word files.
    Validate {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long = "word")]
        words: Vec<PathBuf>,
    },
    /// Lift a word to the achiral factorization on the orientation double
    /// cover.
    Lift {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        word: PathBuf,
    },
    /// Print the invariant summary of a word.
    Invariants {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        word: PathBuf,
    },
    /// Rewrite a word so every exponent is +1.
    Normalize {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        word: PathBuf,
    },
    /// Apply a move script to a word.
    Apply {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        word: PathBuf,
        #[arg(long)]
        script: PathBuf,
    },
    /// Search for a Hurwitz-equivalence certificate between two words.
    Search {
        #[arg(long)]
        dict: PathBuf,
        /// Exactly two word files.
        #[arg(long = "word", num_args = 1, required = true)]
        words: Vec<PathBuf>,
        #[command(flatten)]
        opts: SearchOpts,
    },
    /// Replay a certificate against a start word.
    Replay {
        #[arg(long)]
        dict: PathBuf,
        #[arg(long)]
        word: PathBuf,
        #[arg(long)]
        cert: PathBuf,
    },
    /// Generate a seeded random positive word (or the standard dictionary).
    Gen {
        #[arg(long)]
        seed: u64,
        /// Curve file to draw letters from; defaults to the standard
        /// dictionary for --genus.
        #[arg(long)]
        dict: Option<PathBuf>,
        /// Fiber genus for the standard dictionary.
        #[arg(long)]
        genus: Option<u32>,
        /// Number of letters.
        #[arg(long, default_value_t = 6)]
        length: usize,
        #[arg(long, default_value = "D2")]
        base: String,
        /// Print the dictionary instead of a word.
        #[arg(long = "emit-dict", default_value_t = false)]
        emit_dict: bool,
    },
}

/// Deterministic positive word over the dictionary's curves.
pub fn gen_word(dict: &CurveDictionary, seed: u64, length: usize, base: Base) -> Result<Word> {
    let ids: Vec<_> = dict.curves().map(|c| c.id().clone()).collect();
    if ids.is_empty() {
        return Err(Error::WordShape(
            "dictionary has no curves to sample".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = (0..length)
        .map(|_| {
            let id = ids[rng.gen_range(0..ids.len())].clone();
            let theta = if rng.gen_bool(0.5) {
                Sign::Plus
            } else {
                Sign::Minus
            };
            Letter::Dict {
                curve: OrientedCurve::new(id, theta),
                exponent: Sign::Plus,
            }
        })
        .collect();
    Word::new(
        Fiber::NonOrientable {
            genus: dict.genus(),
        },
        base,
        letters,
    )
}

fn parse_move_kinds(csv: &str) -> Result<std::collections::BTreeSet<MoveKind>> {
    let mut kinds = std::collections::BTreeSet::new();
    for part in csv.split(',') {
        let kind = match part.trim() {
            "insert" => MoveKind::Insert,
            "delete" => MoveKind::Delete,
            "commute" => MoveKind::Commute,
            "flip" => MoveKind::Flip,
            "conj" => MoveKind::Conjugate,
            other => {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("unknown move kind `{other}` in --moves"),
                })
            }
        };
        kinds.insert(kind);
    }
    Ok(kinds)
}

fn load_matrix(path: &Path) -> Result<MCMatrix> {
    format::parse_matrix_file(&std::fs::read_to_string(path)?)
}

fn parse_base_arg(s: &str) -> Result<Base> {
    match s {
        "D2" => Ok(Base::Disk),
        "S2" => Ok(Base::Sphere),
        other => Err(Error::Parse {
            line: 0,
            msg: format!("unknown base `{other}`"),
        }),
    }
}

/// Execute a command, returning the stdout payload.
pub fn execute(command: Command) -> Result<(String, i32)> {
    match command {
        Command::Validate { dict, words } => {
            let session = Session::load(&dict, &words)?;
            let mut out = format!(
                "dict: ok (N{}, {} curves, {} disjoint pairs)\n",
                session.dict.genus(),
                session.dict.curves().count(),
                session.dict.disjoint_pairs().count()
            );
            for warning in session.dict.warnings() {
                out.push_str(&format!("warning: {warning}\n"));
            }
            for (name, word) in &session.words {
                out.push_str(&format!(
                    "word {name}: ok ({} letters, base {})\n",
                    word.len(),
                    word.base()
                ));
            }
            Ok((out, 0))
        }
        Command::Lift { dict, word } => {
            let session = Session::load(&dict, std::slice::from_ref(&word))?;
            let w = session.words.values().next().expect("one word loaded");
            let lifted = lift_word(w, &session.dict)?;
            Ok((format::serialize_word(&lifted), 0))
        }
        Command::Invariants { dict, word } => {
            let session = Session::load(&dict, std::slice::from_ref(&word))?;
            let w = session.words.values().next().expect("one word loaded");
            let summary = summarize(w, &session.dict)?;
            Ok((summary.to_string(), 0))
        }
        Command::Normalize { dict, word } => {
            let session = Session::load(&dict, std::slice::from_ref(&word))?;
            let w = session.words.values().next().expect("one word loaded");
            Ok((format::serialize_word(&w.normalize_positive()?), 0))
        }
        Command::Apply { dict, word, script } => {
            let mut session = Session::load(&dict, std::slice::from_ref(&word))?;
            let w = session
                .words
                .values()
                .next()
                .expect("one word loaded")
                .clone();
            let specs = format::parse_move_script(&std::fs::read_to_string(&script)?)?;
            let moves: Vec<Move> = format::resolve_moves(specs, |p| load_matrix(Path::new(p)))?;
            let mut current = w;
            for (i, mv) in moves.iter().enumerate() {
                current =
                    current
                        .apply_move(mv, &mut session.dict)
                        .map_err(|e| Error::ReplayStep {
                            step: i + 1,
                            source: Box::new(e),
                        })?;
            }
            Ok((format::serialize_word(&current), 0))
        }
        Command::Search { dict, words, opts } => {
            if words.len() != 2 {
                return Err(Error::Parse {
                    line: 0,
                    msg: format!("search needs exactly two --word files, got {}", words.len()),
                });
            }
            let mut session = Session::load(&dict, &[])?;
            let load_word = |path: &Path, dict: &CurveDictionary| -> Result<Word> {
                let word = format::parse_any_word(&std::fs::read_to_string(path)?, Some(dict))?;
                word.validate(dict)?;
                Ok(word)
            };
            let w1 = load_word(&words[0], &session.dict)?;
            let w2 = load_word(&words[1], &session.dict)?;
            let mut cfg = SearchConfig {
                max_depth: opts.depth,
                node_budget: opts.budget,
                strict_positions: opts.strict_positions,
                max_insert_letters: opts.max_inserts,
                ..SearchConfig::default()
            };
            if let Some(csv) = &opts.moves {
                cfg.allowed_moves = parse_move_kinds(csv)?;
            }
            for path in &opts.conjugators {
                cfg.conjugator_pool.push(load_matrix(path)?);
            }
            match bfs_equivalent(&w1, &w2, &cfg, &mut session.dict)? {
                SearchOutcome::Equivalent(cert) => Ok((format::serialize_certificate(&cert), 0)),
                SearchOutcome::Distinguished(witness) => Ok((
                    format!(
                        "distinguished {}\nleft {}\nright {}\n",
                        witness.invariant, witness.left, witness.right
                    ),
                    0,
                )),
                SearchOutcome::Inconclusive { nodes, reason } => {
                    Ok((format!("inconclusive nodes={nodes} reason={reason}\n"), 5))
                }
            }
        }
        Command::Replay { dict, word, cert } => {
            let mut session = Session::load(&dict, std::slice::from_ref(&word))?;
            let w = session
                .words
                .values()
                .next()
                .expect("one word loaded")
                .clone();
            let spec = format::parse_certificate(&std::fs::read_to_string(&cert)?)?;
            let moves = format::resolve_moves(spec.moves, |p| load_matrix(Path::new(p)))?;
            let certificate = crate::words::MoveCertificate {
                start: spec.start,
                end: spec.end,
                moves,
            };
            let end = replay(&certificate, &w, &mut session.dict)?;
            Ok((format::serialize_word(&end), 0))
        }
        Command::Gen {
            seed,
            dict,
            genus,
            length,
            base,
            emit_dict,
        } => {
            let dictionary = match (&dict, genus) {
                (Some(path), _) => format::parse_curve_file(&std::fs::read_to_string(path)?)?,
                (None, Some(g)) => standard_dictionary(g)?,
                (None, None) => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: "gen needs --dict or --genus".into(),
                    })
                }
            };
            if emit_dict {
                return Ok((format::serialize_curve_file(&dictionary), 0));
            }
            let base = parse_base_arg(&base)?;
            let word = gen_word(&dictionary, seed, length, base)?;
            Ok((format::serialize_word(&word), 0))
        }
    }
}

/// Exit code for an error, following the documented convention.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } => 2,
        Error::GenusTooSmall(_) => 4,
        Error::Located { source, .. } => exit_code(source),
        Error::Io(_) => 1,
        _ => 3,
    }
}

/// Run a parsed command line; prints output and returns the process exit
/// code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli.command) {
        Ok((out, code)) => {
            print!("{out}");
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
