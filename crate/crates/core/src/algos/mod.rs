//! Robot algorithms, addressed by registry name. Each one is a pure function
//! of the snapshot; the observer always sits at the local origin.

use crate::engine::Algorithm;
use crate::geom::{Point, Tolerance};
use crate::model::{Color, LightClass, ModelId, Seen, Snapshot, SyncMode};
use crate::problems::ProblemKind;

pub mod ash;
pub mod fff;
pub mod ls;
pub mod nwc;
pub mod pse;
pub mod spi;
pub mod trt;

/// Registry entry.
#[derive(Clone, Copy)]
pub struct AlgoInfo {
    pub name: &'static str,
    pub problem: ProblemKind,
    /// Weakest model the algorithm is claimed to solve its problem in.
    pub weakest: ModelId,
    /// Needs transparent visibility.
    pub transparent: bool,
    /// Deliberately deficient variant, only used to exhibit failures.
    pub naive: bool,
    pub build: fn() -> Box<dyn Algorithm>,
}

impl AlgoInfo {
    /// Compatible with every model at least as strong as the weakest one.
    /// Naive variants accept any model that can run them.
    pub fn compatible(&self, model: ModelId) -> bool {
        if self.naive {
            let algo = (self.build)();
            return model.light != LightClass::Oblot || algo.palette().len() == 1;
        }
        self.weakest.structural_leq(model)
    }
}

const fn m(light: LightClass, sync: SyncMode) -> ModelId {
    ModelId::new(light, sync)
}

macro_rules! entry {
    ($name:expr, $problem:ident, $light:ident, $sync:ident, $transparent:expr, $naive:expr, $ty:expr) => {
        AlgoInfo {
            name: $name,
            problem: ProblemKind::$problem,
            weakest: m(LightClass::$light, SyncMode::$sync),
            transparent: $transparent,
            naive: $naive,
            build: || Box::new($ty),
        }
    };
}

pub static REGISTRY: &[AlgoInfo] = &[
    entry!("trt_fsta", TriangleRoundTrip, Fsta, Async, false, false, trt::TrtFsta),
    entry!("trt_fcom", TriangleRoundTrip, Fcom, Async, false, false, trt::TrtFcom),
    entry!("fff_fsta", FlipFlopFlip, Fsta, Async, false, false, fff::FffFsta),
    entry!("fff_fcom_fsync", FlipFlopFlip, Fcom, Fsync, false, false, fff::FffFcomFsync),
    entry!("nwc_fcom", Newcomer, Fcom, Async, false, false, nwc::NwcFcom),
    entry!("spi_oblot_fsync", Spinning, Oblot, Fsync, false, false, spi::SpiOblotFsync),
    entry!("spi_lumi_async", Spinning, Lumi, Async, false, false, spi::SpiLumiAsync),
    entry!("ash_oblot_fsync", AngleShift, Oblot, Fsync, false, false, ash::AshOblotFsync),
    entry!("pse_oblot_sync", Pseudo, Oblot, Ssync, false, false, pse::PseOblotSync { name: "pse_oblot_sync" }),
    entry!("pse_fcom_async", Pseudo, Fcom, Async, false, false, pse::PseFcomAsync),
    entry!("ls_oblot_transparent", LineStretch, Oblot, Async, true, false, ls::LsOblotTransparent),
    entry!("fff_memoryless", FlipFlopFlip, Oblot, Fsync, false, true, fff::FffMemoryless::default()),
    entry!("pse_internal_only", Pseudo, Fsta, Async, false, true, pse::PseOblotSync { name: "pse_internal_only" }),
];

pub fn lookup(name: &str) -> Option<&'static AlgoInfo> {
    REGISTRY.iter().find(|a| a.name == name)
}

/// Positive algorithms, in registry order.
pub fn positive() -> impl Iterator<Item = &'static AlgoInfo> {
    REGISTRY.iter().filter(|a| !a.naive)
}

/// Equality slack used by algorithms when reading geometric relations off a
/// snapshot: looser than the monitors' tolerance so round-off through random
/// frames never flips a decision.
pub(crate) const SLACK: f64 = 1e3;

pub(crate) fn approx(a: f64, b: f64, scale: f64, tol: Tolerance) -> bool {
    (a - b).abs() <= SLACK * tol.scaled(scale)
}

/// Largest distance between any two of the points, the observer included.
pub(crate) fn extent(seen: &[Seen]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, s) in seen.iter().enumerate() {
        d = d.max(s.pos.norm());
        for t in &seen[i + 1..] {
            d = d.max(s.pos.dist(t.pos));
        }
    }
    d
}

/// Positions of the visible robots followed by the observer's own (origin).
pub(crate) fn with_self(seen: &[Seen]) -> Vec<Point> {
    seen.iter().map(|s| s.pos).chain(std::iter::once(Point::ORIGIN)).collect()
}

/// Visible colors, deduplicated and sorted by name.
pub(crate) fn color_set(snap: &Snapshot) -> Vec<Color> {
    let mut v = snap.colors();
    v.sort_by_key(|c| c.as_str());
    v.dedup();
    v
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_unique_and_palettes_start_with_initial() {
        let mut names: Vec<&str> = REGISTRY.iter().map(|a| a.name).collect();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), REGISTRY.len());
        for info in REGISTRY {
            let algo = (info.build)();
            assert_eq!(algo.name(), info.name);
            assert!(!algo.palette().is_empty());
            if info.weakest.light == LightClass::Oblot {
                assert_eq!(algo.palette().len(), 1, "{} is OBLOT but has several colors", info.name);
            }
        }
        assert_eq!(positive().count(), 11);
    }

    #[test]
    fn compatibility_follows_structural_order() {
        let ash = lookup("ash_oblot_fsync").unwrap();
        assert!(ash.compatible("lumi,fsync".parse().unwrap()));
        assert!(!ash.compatible("lumi,ssync".parse().unwrap()));
        let fff = lookup("fff_fcom_fsync").unwrap();
        assert!(!fff.compatible("fsta,fsync".parse().unwrap()));
    }
}
