//! Robot state, light classes, local frames and the opaque snapshot rule.

use std::collections::HashSet;
use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::geom::{blocks, Point, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LightClass {
    Oblot,
    Fsta,
    Fcom,
    Lumi,
}

impl LightClass {
    pub const ALL: [LightClass; 4] = [LightClass::Oblot, LightClass::Fsta, LightClass::Fcom, LightClass::Lumi];

    /// The robot reads its own light.
    pub fn internal(self) -> bool {
        matches!(self, LightClass::Fsta | LightClass::Lumi)
    }

    /// Other robots read the light.
    pub fn external(self) -> bool {
        matches!(self, LightClass::Fcom | LightClass::Lumi)
    }

    /// Position in the diamond OBLOT < {FSTA, FCOM} < LUMI.
    pub fn leq(self, other: LightClass) -> bool {
        use LightClass::*;
        match (self, other) {
            (a, b) if a == b => true,
            (Oblot, _) | (_, Lumi) => true,
            _ => false,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LightClass::Oblot => "OBLOT",
            LightClass::Fsta => "FSTA",
            LightClass::Fcom => "FCOM",
            LightClass::Lumi => "LUMI",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SyncMode {
    Fsync,
    Ssync,
    Async,
}

impl SyncMode {
    pub const ALL: [SyncMode; 3] = [SyncMode::Fsync, SyncMode::Ssync, SyncMode::Async];

    /// A < S < F.
    pub fn leq(self, other: SyncMode) -> bool {
        self.rank() <= other.rank()
    }

    fn rank(self) -> u8 {
        match self {
            SyncMode::Async => 0,
            SyncMode::Ssync => 1,
            SyncMode::Fsync => 2,
        }
    }

    pub fn letter(self) -> char {
        match self {
            SyncMode::Fsync => 'F',
            SyncMode::Ssync => 'S',
            SyncMode::Async => 'A',
        }
    }

    pub fn is_round_based(self) -> bool {
        !matches!(self, SyncMode::Async)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("unknown model '{0}' (expected e.g. 'lumi,async' or 'LUMI^A')")]
    UnknownModel(String),
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModelId {
    pub light: LightClass,
    pub sync: SyncMode,
}

impl ModelId {
    pub const fn new(light: LightClass, sync: SyncMode) -> Self {
        ModelId { light, sync }
    }

    pub fn all() -> Vec<ModelId> {
        let mut v = Vec::with_capacity(12);
        for light in LightClass::ALL {
            for sync in SyncMode::ALL {
                v.push(ModelId { light, sync });
            }
        }
        v
    }

    /// Product order of the light diamond and the synchrony chain.
    pub fn structural_leq(self, other: ModelId) -> bool {
        self.light.leq(other.light) && self.sync.leq(other.sync)
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.light.as_str(), self.sync.letter())
    }
}

impl FromStr for ModelId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let (l, y) = lower
            .split_once([',', '^', '-', ':'])
            .ok_or_else(|| ModelError::UnknownModel(s.into()))?;
        let light = match l.trim() {
            "oblot" => LightClass::Oblot,
            "fsta" => LightClass::Fsta,
            "fcom" => LightClass::Fcom,
            "lumi" => LightClass::Lumi,
            _ => return Err(ModelError::UnknownModel(s.into())),
        };
        let sync = match y.trim() {
            "f" | "fsync" => SyncMode::Fsync,
            "s" | "ssync" => SyncMode::Ssync,
            "a" | "async" => SyncMode::Async,
            _ => return Err(ModelError::UnknownModel(s.into())),
        };
        Ok(ModelId { light, sync })
    }
}

impl Serialize for ModelId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ModelId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A light color. Palettes are small static sets; names read from files are
/// interned so the type stays `Copy`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Color(&'static str);

static INTERNED: OnceLock<Mutex<HashSet<&'static str>>> = OnceLock::new();

impl Color {
    pub const OFF: Color = Color("off");

    pub const fn new(name: &'static str) -> Self {
        Color(name)
    }

    pub fn intern(name: &str) -> Self {
        let set = INTERNED.get_or_init(|| Mutex::new(HashSet::new()));
        let mut set = set.lock().expect("color table poisoned");
        if let Some(&s) = set.get(name) {
            return Color(s);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        set.insert(leaked);
        Color(leaked)
    }

    pub fn as_str(self) -> &'static str {
        self.0
    }
}

impl fmt::Debug for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

impl Serialize for Color {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.0)
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Color::intern(&s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Robot {
    #[serde(flatten)]
    pub pos: Point,
    pub color: Color,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub robots: Vec<Robot>,
}

impl Configuration {
    pub fn from_points(points: &[Point]) -> Self {
        Configuration { robots: points.iter().map(|&pos| Robot { pos, color: Color::OFF }).collect() }
    }

    pub fn len(&self) -> usize {
        self.robots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.robots.is_empty()
    }

    pub fn positions(&self) -> Vec<Point> {
        self.robots.iter().map(|r| r.pos).collect()
    }

    pub fn colors(&self) -> Vec<Color> {
        self.robots.iter().map(|r| r.color).collect()
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        diameter(&self.positions())
    }
}

pub fn diameter(points: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            d = d.max(p.dist(*q));
        }
    }
    d
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityViolation {
    pub pairs: Vec<(usize, usize)>,
}

/// Reports every pair of robots sharing a location.
pub fn validate_configuration(points: &[Point], tol: Tolerance) -> Result<(), MultiplicityViolation> {
    let eps = tol.scaled(diameter(points));
    let mut pairs = Vec::new();
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            if points[i].dist(points[j]) <= eps {
                pairs.push((i, j));
            }
        }
    }
    if pairs.is_empty() {
        Ok(())
    } else {
        Err(MultiplicityViolation { pairs })
    }
}

/// Per-activation coordinate system of the observing robot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalFrame {
    pub rotation: f64,
    pub reflect: bool,
    pub scale: f64,
    pub origin: Point,
}

impl LocalFrame {
    pub fn identity(origin: Point) -> Self {
        LocalFrame { rotation: 0.0, reflect: false, scale: 1.0, origin }
    }

    pub fn new(rotation: f64, reflect: bool, scale: f64, origin: Point) -> Result<Self, ModelError> {
        if !(scale > 0.0 && scale.is_finite()) || !rotation.is_finite() {
            return Err(ModelError::InvalidFrame(format!("rotation {rotation}, scale {scale}")));
        }
        Ok(LocalFrame { rotation, reflect, scale, origin })
    }

    /// Rotation uniform in [0, 2π), fair reflection coin, scale log-uniform in [0.1, 10].
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, origin: Point) -> Self {
        let rotation = rng.gen_range(0.0..TAU);
        let reflect = rng.gen_bool(0.5);
        let scale = 10f64.powf(rng.gen_range(-1.0..=1.0));
        LocalFrame { rotation, reflect, scale, origin }
    }

    pub fn to_local(&self, p: Point) -> Point {
        let mut v = p - self.origin;
        if self.reflect {
            v.y = -v.y;
        }
        v.rotated(self.rotation) * self.scale
    }

    pub fn to_global(&self, q: Point) -> Point {
        let mut v = (q * (1.0 / self.scale)).rotated(-self.rotation);
        if self.reflect {
            v.y = -v.y;
        }
        self.origin + v
    }
}

/// A visible robot: its position in the observer's frame and, when the
/// model exposes external lights, its color.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Seen {
    pub pos: Point,
    pub color: Option<Color>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub visible: Vec<Seen>,
    pub own_internal: Option<Color>,
    pub transparent_mode: bool,
}

impl Snapshot {
    pub fn positions(&self) -> Vec<Point> {
        self.visible.iter().map(|s| s.pos).collect()
    }

    pub fn count_color(&self, c: Color) -> usize {
        self.visible.iter().filter(|s| s.color == Some(c)).count()
    }

    pub fn colors(&self) -> Vec<Color> {
        self.visible.iter().filter_map(|s| s.color).collect()
    }

    /// Entries sorted by position, so rules that iterate the snapshot never
    /// depend on the presentation order.
    pub fn canonical(&self) -> Vec<Seen> {
        let mut v = self.visible.clone();
        v.sort_by(|a, b| a.pos.x.total_cmp(&b.pos.x).then(a.pos.y.total_cmp(&b.pos.y)));
        v
    }
}

/// Indices of the robots the observer can see at the given positions.
pub fn visible_set(positions: &[Point], observer: usize, transparent: bool, tol: Tolerance) -> Vec<usize> {
    let o = positions[observer];
    (0..positions.len())
        .filter(|&j| j != observer)
        .filter(|&j| {
            transparent
                || !(0..positions.len())
                    .any(|k| k != observer && k != j && blocks(o, positions[j], positions[k], tol))
        })
        .collect()
}

/// Builds the observer's view. `colors[i]` is robot i's current light.
#[allow(clippy::too_many_arguments)]
pub fn take_snapshot<R: Rng + ?Sized>(
    positions: &[Point],
    colors: &[Color],
    observer: usize,
    frame: &LocalFrame,
    model: ModelId,
    transparent: bool,
    tol: Tolerance,
    rng: &mut R,
) -> Snapshot {
    let ids = visible_set(positions, observer, transparent, tol);
    snapshot_of(positions, colors, observer, &ids, frame, model, transparent, rng)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn snapshot_of<R: Rng + ?Sized>(
    positions: &[Point],
    colors: &[Color],
    observer: usize,
    ids: &[usize],
    frame: &LocalFrame,
    model: ModelId,
    transparent: bool,
    rng: &mut R,
) -> Snapshot {
    let external = model.light.external();
    let mut visible: Vec<Seen> = ids
        .iter()
        .map(|&j| Seen { pos: frame.to_local(positions[j]), color: external.then_some(colors[j]) })
        .collect();
    visible.shuffle(rng);
    Snapshot {
        visible,
        own_internal: model.light.internal().then_some(colors[observer]),
        transparent_mode: transparent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn line_of_four() {
        let pts: Vec<Point> = (0..4).map(|i| Point::new(i as f64, 0.0)).collect();
        assert_eq!(visible_set(&pts, 0, false, tol()), vec![1]);
        assert_eq!(visible_set(&pts, 1, false, tol()), vec![0, 2]);
        assert_eq!(visible_set(&pts, 0, true, tol()), vec![1, 2, 3]);
    }

    #[test]
    fn triangle_sees_all() {
        let pts = [Point::new(0.0, 0.0), Point::new(3.0, 0.1), Point::new(1.0, 2.0)];
        for i in 0..3 {
            assert_eq!(visible_set(&pts, i, false, tol()).len(), 2);
        }
    }

    #[test]
    fn frame_examples() {
        let f = LocalFrame::identity(Point::new(1.0, 1.0));
        assert_eq!(f.to_local(Point::new(2.0, 1.0)), Point::new(1.0, 0.0));
        let f = LocalFrame::new(PI / 2.0, false, 2.0, Point::new(1.0, 1.0)).unwrap();
        assert!(f.to_local(Point::new(2.0, 1.0)).dist(Point::new(0.0, 2.0)) < 1e-15);
        let f = LocalFrame::identity(Point::ORIGIN);
        assert_eq!(f.to_global(Point::new(3.0, 4.0)), Point::new(3.0, 4.0));
        let f = LocalFrame::new(0.0, false, 2.0, Point::new(1.0, 1.0)).unwrap();
        assert_eq!(f.to_global(Point::new(2.0, 0.0)), Point::new(2.0, 1.0));
        assert!(LocalFrame::new(0.0, false, 0.0, Point::ORIGIN).is_err());
    }

    #[test]
    fn frame_origin_maps_back_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let o = Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
            let f = LocalFrame::sample(&mut rng, o);
            assert_eq!(f.to_global(Point::ORIGIN), o);
        }
    }

    #[test]
    fn snapshot_light_rules() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        let s = Color::new("s");
        let colors = [s, Color::OFF, Color::OFF];
        let f = LocalFrame::identity(pts[0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let m = |l| ModelId::new(l, SyncMode::Async);

        let snap = take_snapshot(&pts, &colors, 0, &f, m(LightClass::Fcom), false, tol(), &mut rng);
        assert_eq!(snap.own_internal, None);
        assert_eq!(snap.count_color(s), 0);
        assert!(snap.visible.iter().all(|v| v.color.is_some()));

        let snap = take_snapshot(&pts, &colors, 0, &f, m(LightClass::Fsta), false, tol(), &mut rng);
        assert_eq!(snap.own_internal, Some(s));
        assert!(snap.visible.iter().all(|v| v.color.is_none()));

        let snap = take_snapshot(&pts, &colors, 0, &f, m(LightClass::Oblot), false, tol(), &mut rng);
        assert_eq!(snap.own_internal, None);
        assert!(snap.visible.iter().all(|v| v.color.is_none()));

        let snap = take_snapshot(&pts, &colors, 1, &f, m(LightClass::Lumi), false, tol(), &mut rng);
        assert_eq!(snap.own_internal, Some(Color::OFF));
        assert_eq!(snap.count_color(s), 1);
    }

    #[test]
    fn multiplicity() {
        assert!(validate_configuration(&[Point::new(0.0, 0.0), Point::new(1.0, 0.0)], tol()).is_ok());
        let v = validate_configuration(&[Point::new(0.0, 0.0), Point::new(0.0, 0.0)], tol()).unwrap_err();
        assert_eq!(v.pairs, vec![(0, 1)]);
        assert!(validate_configuration(&[Point::new(0.0, 0.0), Point::new(0.5e-9, 0.0)], tol()).is_err());
    }

    #[test]
    fn model_parsing_and_order() {
        assert_eq!(ModelId::all().len(), 12);
        let m: ModelId = "lumi,async".parse().unwrap();
        assert_eq!(m, ModelId::new(LightClass::Lumi, SyncMode::Async));
        assert_eq!(m.to_string(), "LUMI^A");
        assert_eq!("OBLOT^F".parse::<ModelId>().unwrap().to_string(), "OBLOT^F");
        assert!("nope,async".parse::<ModelId>().is_err());
        let fsta_f = ModelId::new(LightClass::Fsta, SyncMode::Fsync);
        let fcom_f = ModelId::new(LightClass::Fcom, SyncMode::Fsync);
        assert!(!fsta_f.structural_leq(fcom_f) && !fcom_f.structural_leq(fsta_f));
        assert!(ModelId::new(LightClass::Oblot, SyncMode::Async).structural_leq(ModelId::new(LightClass::Lumi, SyncMode::Fsync)));
    }

    #[test]
    fn color_interning() {
        let a = Color::intern("moving0");
        let b = Color::intern("moving0");
        assert_eq!(a, b);
        assert_eq!(a.as_str(), "moving0");
        assert_eq!(Color::intern("off"), Color::OFF);
    }
}
