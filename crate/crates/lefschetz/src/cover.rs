//! Curve dictionary for the non-orientable fiber `N_g`.
//!
//! A two-sided simple closed curve on `N_g` has two disjoint lifts to the
//! orientation double cover `Σ_{g-1}`, exchanged by the deck involution and
//! sitting in antipodal position. The dictionary stores one lift class per
//! curve (sign-canonicalized); the orientation tag of a tubular neighborhood
//! selects which lift is "the" lift. Homology is a sound but incomplete curve
//! model: equality here means equality of canonical lift data, not isotopy.
//!
//! Geometric disjointness cannot be recovered from the pairing (orthogonality
//! is necessary, not sufficient), so commutation of twists requires an
//! explicitly declared disjoint pair; the dictionary verifies the necessary
//! pairing condition and trusts the declaration for the rest.

use std::collections::{BTreeMap, BTreeSet};

use crate::homology::{deck_involution, pairing, HClass, Lattice, MCMatrix};
use crate::{Error, Result};

/// An orientation or exponent sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn unit(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

/// Symbolic name of a dictionary curve.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveId(String);

impl CurveId {
    pub fn new(s: impl Into<String>) -> Result<CurveId> {
        let s = s.into();
        if s.is_empty() || s.contains(char::is_whitespace) || s.contains('#') {
            return Err(Error::Parse {
                line: 0,
                msg: format!(
                    "invalid curve id `{s}`: must be a nonempty token without whitespace or '#'"
                ),
            });
        }
        // Reserved keywords of the letter grammar.
        if s == "lift" || s == "null" {
            return Err(Error::Parse {
                line: 0,
                msg: format!("curve id `{s}` is reserved"),
            });
        }
        Ok(CurveId(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for CurveId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Stored lift data of a two-sided curve: an honest homology class, or a
/// symbolic marker for a null-homologous curve (whose twist is invisible to
/// homology but must not crash the pipeline).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CurveLift {
    Class(HClass),
    Null { tag: String },
}

/// One lift of a curve, as referenced by letters of a cover word. For a
/// null-homologous curve the two lifts are distinguished only by a side tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CoverClass {
    Class(HClass),
    Null { tag: String, side: Sign },
}

impl CoverClass {
    /// The deck image of this lift: the other member of the pair.
    pub fn antipode(&self, deck: &MCMatrix) -> Result<CoverClass> {
        match self {
            CoverClass::Class(g) => Ok(CoverClass::Class(deck.apply(g)?)),
            CoverClass::Null { tag, side } => Ok(CoverClass::Null {
                tag: tag.clone(),
                side: side.flip(),
            }),
        }
    }
}

/// A two-sided simple closed curve on `N_g`, stored as a lift class `γ` whose
/// companion lift is `Jγ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoSidedCurve {
    id: CurveId,
    lift: CurveLift,
    display: Option<String>,
}

impl TwoSidedCurve {
    pub fn id(&self) -> &CurveId {
        &self.id
    }

    pub fn lift(&self) -> &CurveLift {
        &self.lift
    }

    pub fn display(&self) -> Option<&str> {
        self.display.as_deref()
    }

    /// The lift selected by an orientation tag: `γ` for `+`, `Jγ` for `-`.
    pub fn selected_lift(&self, theta: Sign, deck: &MCMatrix) -> Result<CoverClass> {
        let plus = match &self.lift {
            CurveLift::Class(g) => CoverClass::Class(g.clone()),
            CurveLift::Null { tag } => CoverClass::Null {
                tag: tag.clone(),
                side: Sign::Plus,
            },
        };
        match theta {
            Sign::Plus => Ok(plus),
            Sign::Minus => plus.antipode(deck),
        }
    }

    /// True when the two lifts agree up to sign (`Jγ = ±γ`), in which case
    /// the lifted letter pair acts trivially on homology.
    pub fn is_self_antipodal(&self, deck: &MCMatrix) -> Result<bool> {
        match &self.lift {
            CurveLift::Class(g) => Ok(deck.apply(g)?.same_unoriented(g)),
            CurveLift::Null { .. } => Ok(false),
        }
    }
}

/// A curve together with a chosen orientation of its tubular neighborhood.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedCurve {
    pub curve: CurveId,
    pub theta: Sign,
}

impl OrientedCurve {
    pub fn new(curve: CurveId, theta: Sign) -> Self {
        OrientedCurve { curve, theta }
    }
}

/// The curve dictionary of a fiber `N_g`: named two-sided curves with their
/// lift classes on the genus-`(g-1)` cover, plus declared disjointness.
#[derive(Clone, Debug)]
pub struct CurveDictionary {
    genus: u32,
    curves: BTreeMap<CurveId, TwoSidedCurve>,
    disjoint: BTreeSet<(CurveId, CurveId)>,
    warnings: Vec<String>,
}

impl CurveDictionary {
    /// Empty dictionary for the fiber `N_g`, `g >= 1`.
    pub fn new(genus: u32) -> Result<CurveDictionary> {
        if genus < 1 {
            return Err(Error::WordShape("non-orientable genus must be >= 1".into()));
        }
        Ok(CurveDictionary {
            genus,
            curves: BTreeMap::new(),
            disjoint: BTreeSet::new(),
            warnings: Vec::new(),
        })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// Genus of the cover surface, `k = g - 1`.
    pub fn cover_genus(&self) -> usize {
        self.genus as usize - 1
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.cover_genus())
    }

    pub fn rank(&self) -> usize {
        2 * self.cover_genus()
    }

    /// Homology action of the deck transformation of the cover.
    pub fn deck(&self) -> MCMatrix {
        deck_involution(self.cover_genus())
    }

    pub fn curves(&self) -> impl Iterator<Item = &TwoSidedCurve> {
        self.curves.values()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn get(&self, id: &CurveId) -> Result<&TwoSidedCurve> {
        self.curves
            .get(id)
            .ok_or_else(|| Error::UnknownCurve(id.to_string()))
    }

    pub fn contains(&self, id: &CurveId) -> bool {
        self.curves.contains_key(id)
    }

    /// Register a curve by its lift class. The class must be primitive and
    /// disjoint from its deck image at the pairing level; it is stored
    /// sign-canonicalized. Self-antipodal classes are allowed with a warning.
    pub fn register(&mut self, id: CurveId, class: HClass) -> Result<&TwoSidedCurve> {
        if self.curves.contains_key(&id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        if class.rank() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "lift class of rank {} on a rank-{} lattice",
                class.rank(),
                self.rank()
            )));
        }
        if !class.is_primitive() {
            return Err(Error::NonPrimitive);
        }
        let canonical = class.canonical();
        let deck = self.deck();
        let image = deck.apply(&canonical)?;
        let p = pairing(&canonical, &image)?;
        if p != 0 {
            return Err(Error::LiftPairIntersects(p));
        }
        if image.same_unoriented(&canonical) {
            self.warnings.push(format!(
                "curve `{id}`: lift equals its deck image up to sign; the lifted twist pair acts trivially on homology"
            ));
        }
        let curve = TwoSidedCurve {
            id: id.clone(),
            lift: CurveLift::Class(canonical),
            display: None,
        };
        Ok(self.curves.entry(id).or_insert(curve))
    }

    /// Register a null-homologous two-sided curve under an opaque tag. Its
    /// twists act trivially on homology and are tracked symbolically.
    pub fn register_null(&mut self, id: CurveId, tag: impl Into<String>) -> Result<&TwoSidedCurve> {
        if self.curves.contains_key(&id) {
            return Err(Error::DuplicateId(id.to_string()));
        }
        let curve = TwoSidedCurve {
            id: id.clone(),
            lift: CurveLift::Null { tag: tag.into() },
            display: None,
        };
        Ok(self.curves.entry(id).or_insert(curve))
    }

    pub fn set_display(&mut self, id: &CurveId, text: impl Into<String>) -> Result<()> {
        let curve = self
            .curves
            .get_mut(id)
            .ok_or_else(|| Error::UnknownCurve(id.to_string()))?;
        curve.display = Some(text.into());
        Ok(())
    }

    fn ordered_pair(a: &CurveId, b: &CurveId) -> (CurveId, CurveId) {
        if a <= b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        }
    }

    /// Declare two distinct curves geometrically disjoint. Verifies the
    /// necessary condition that every lift of one pairs to zero with every
    /// lift of the other.
    pub fn declare_disjoint(&mut self, a: &CurveId, b: &CurveId) -> Result<()> {
        if a == b {
            return Err(Error::SelfDisjoint(a.to_string()));
        }
        let ca = self.get(a)?.clone();
        let cb = self.get(b)?.clone();
        if let (CurveLift::Class(ga), CurveLift::Class(gb)) = (&ca.lift, &cb.lift) {
            let deck = self.deck();
            let jgb = deck.apply(gb)?;
            for other in [gb, &jgb] {
                let p = pairing(ga, other)?;
                if p != 0 {
                    return Err(Error::DisjointPairingNonzero(
                        a.to_string(),
                        b.to_string(),
                        p,
                    ));
                }
            }
        }
        self.disjoint.insert(Self::ordered_pair(a, b));
        Ok(())
    }

    pub fn is_declared_disjoint(&self, a: &CurveId, b: &CurveId) -> bool {
        a != b && self.disjoint.contains(&Self::ordered_pair(a, b))
    }

    pub fn disjoint_pairs(&self) -> impl Iterator<Item = &(CurveId, CurveId)> {
        self.disjoint.iter()
    }

    /// The ordered lift pair of an oriented curve: `(γ, Jγ)` for `θ = +`,
    /// `(Jγ, γ)` for `θ = -`.
    pub fn lift_pair(&self, oc: &OrientedCurve) -> Result<(CoverClass, CoverClass)> {
        let deck = self.deck();
        let curve = self.get(&oc.curve)?;
        let selected = curve.selected_lift(oc.theta, &deck)?;
        let companion = selected.antipode(&deck)?;
        Ok((selected, companion))
    }

    fn find_ids_by_class(&self, canonical: &HClass) -> Vec<&CurveId> {
        self.curves
            .values()
            .filter(|c| matches!(&c.lift, CurveLift::Class(g) if g == canonical))
            .map(|c| c.id())
            .collect()
    }

    /// Image of an oriented curve under a mapping class of `N_g`, given by
    /// the homology action `m` of its orientation-preserving lift.
    ///
    /// `m` must be symplectic and commute with the deck involution — the
    /// homology-level test for being a lift. The image curve reuses an
    /// existing dictionary entry when one carries the image class, and is
    /// otherwise registered under a deterministic auto-generated id. The
    /// orientation tag of the result is chosen so that the selected lift is
    /// the `m`-image of the input's selected lift.
    pub fn push_forward(&mut self, m: &MCMatrix, oc: &OrientedCurve) -> Result<OrientedCurve> {
        if m.rank() != self.rank() {
            return Err(Error::DimensionMismatch(format!(
                "rank-{} matrix on a rank-{} lattice",
                m.rank(),
                self.rank()
            )));
        }
        if !m.is_symplectic() {
            return Err(Error::NotSymplectic);
        }
        let deck = self.deck();
        if !m.commutes_with(&deck)? {
            return Err(Error::NotALift);
        }
        let curve = self.get(&oc.curve)?.clone();
        let selected = match &curve.lift {
            // Null-homologous curves are tracked symbolically only; their
            // image under any lift shadow stays the same symbol.
            CurveLift::Null { .. } => return Ok(oc.clone()),
            CurveLift::Class(g) => match oc.theta {
                Sign::Plus => g.clone(),
                Sign::Minus => deck.apply(g)?,
            },
        };
        let image = m.apply(&selected)?;
        let image_companion = deck.apply(&image)?;
        let canon_image = image.canonical();
        let canon_companion = image_companion.canonical();

        // Prefer the input curve itself, then the least existing id carrying
        // either class of the image pair, then a fresh auto-named entry whose
        // stored class is the canonical representative of the whole orbit
        // {±image, ±J image}.
        let mut candidates: Vec<CurveId> = Vec::new();
        for class in [&canon_image, &canon_companion] {
            for id in self.find_ids_by_class(class) {
                if !candidates.contains(id) {
                    candidates.push(id.clone());
                }
            }
        }
        let target = if candidates.contains(&oc.curve) {
            oc.curve.clone()
        } else if let Some(least) = candidates.iter().min() {
            least.clone()
        } else {
            let orbit = std::cmp::min(canon_image.clone(), canon_companion.clone());
            let name: String = orbit.coeffs().iter().map(|c| format!("_{c}")).collect();
            let id = CurveId::new(format!("auto{name}"))?;
            if !self.curves.contains_key(&id) {
                self.register(id.clone(), orbit)?;
            }
            id
        };
        let stored = match &self.get(&target)?.lift {
            CurveLift::Class(g) => g.clone(),
            CurveLift::Null { .. } => unreachable!("image of a class is a class"),
        };
        let theta = if stored.same_unoriented(&image) {
            Sign::Plus
        } else {
            debug_assert!(deck.apply(&stored)?.same_unoriented(&image));
            Sign::Minus
        };
        Ok(OrientedCurve::new(target, theta))
    }
}

/// A ready-made dictionary for `N_g`: one curve per deck-orbit of the
/// standard basis classes — `a<i>` carrying `a_i` (deck image `a_{k+1-i}`)
/// and `b<i>` carrying `b_i`, for `i <= (k+1)/2` — plus every disjointness
/// declaration that passes the pairing check.
///
/// Registering both members of an orbit would store the same geometric
/// curve under two ids (the orientation tag already selects the lift), so
/// only one representative is kept. For odd `k` the middle `a`- and
/// `b`-curves are self-antipodal and register with the usual warning.
pub fn standard_dictionary(genus: u32) -> Result<CurveDictionary> {
    let mut dict = CurveDictionary::new(genus)?;
    let k = dict.cover_genus();
    let lat = dict.lattice();
    for i in 1..=k {
        if i > k + 1 - i {
            break;
        }
        dict.register(CurveId::new(format!("a{i}"))?, lat.basis_a(i))?;
        dict.register(CurveId::new(format!("b{i}"))?, lat.basis_b(i))?;
    }
    let ids: Vec<CurveId> = dict.curves().map(|c| c.id().clone()).collect();
    for (idx, a) in ids.iter().enumerate() {
        for b in ids.iter().skip(idx + 1) {
            match dict.declare_disjoint(a, b) {
                Ok(()) | Err(Error::DisjointPairingNonzero(_, _, _)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(dict)
}
