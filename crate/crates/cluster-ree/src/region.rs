//! Region taxonomy of genuinely entangled cluster-diagonal states.
//!
//! A violated inequality half is classified through the quad of block
//! parameters playing the roles of `(p0, p3, p4, p7)`; the second half uses
//! `(p1, p2, p5, p6)` in the same roles. Boundary points where the defining
//! inequality is strict in the table are assigned to the closed,
//! biseparable-side or lower-layer region.

use crate::criteria;
use crate::error::{Error, Result};
use crate::state::{block_params, BlockParams, FVector};

/// Tolerance for declaring a quad unphysical; sums of at most 16 entries
/// carry rounding well below this.
const PHYS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Region {
    APrime,
    ADoublePrime,
    ATriplePrime,
    B,
    C1,
    C2,
    D1Prime,
    D1DoublePrime,
    D2,
    Biseparable,
}

impl Region {
    /// All regions that certify genuine multipartite entanglement.
    pub const ENTANGLED: [Region; 7] = [
        Region::APrime,
        Region::ADoublePrime,
        Region::ATriplePrime,
        Region::B,
        Region::C1,
        Region::C2,
        Region::D1Prime,
    ];

    pub fn is_entangled(self) -> bool {
        !matches!(
            self,
            Region::D1DoublePrime | Region::D2 | Region::Biseparable
        )
    }

    /// Partner region under the exchange `(p0, p4) <-> (p3, p7)`; defined
    /// for the entangled regions only.
    pub fn symmetric_pair(self) -> Option<Region> {
        match self {
            Region::APrime => Some(Region::APrime),
            Region::ADoublePrime => Some(Region::B),
            Region::B => Some(Region::ADoublePrime),
            Region::ATriplePrime => Some(Region::C1),
            Region::C1 => Some(Region::ATriplePrime),
            Region::D1Prime => Some(Region::C2),
            Region::C2 => Some(Region::D1Prime),
            _ => None,
        }
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Region::APrime => "A'",
            Region::ADoublePrime => "A''",
            Region::ATriplePrime => "A'''",
            Region::B => "B",
            Region::C1 => "C1",
            Region::C2 => "C2",
            Region::D1Prime => "D1'",
            Region::D1DoublePrime => "D1''",
            Region::D2 => "D2",
            Region::Biseparable => "Biseparable",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Region {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "A'" => Ok(Region::APrime),
            "A''" => Ok(Region::ADoublePrime),
            "A'''" => Ok(Region::ATriplePrime),
            "B" => Ok(Region::B),
            "C1" => Ok(Region::C1),
            "C2" => Ok(Region::C2),
            "D1'" => Ok(Region::D1Prime),
            "D1''" => Ok(Region::D1DoublePrime),
            "D2" => Ok(Region::D2),
            "Biseparable" => Ok(Region::Biseparable),
            other => Err(format!(
                "unknown region {other:?}; expected one of A', A'', A''', B, C1, C2, D1', D1'', D2, Biseparable"
            )),
        }
    }
}

/// Which inequality half drove a classification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Half {
    First,
    Second,
}

impl std::fmt::Display for Half {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Half::First => "first",
            Half::Second => "second",
        })
    }
}

/// Final classification of a state. `half` is `None` exactly for the
/// biseparable outcomes (regions D1'', D2, or the generic label).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionLabel {
    pub region: Region,
    pub half: Option<Half>,
}

impl RegionLabel {
    pub fn is_entangled(&self) -> bool {
        self.region.is_entangled()
    }
}

/// Four block parameters in the roles of `(p0, p3, p4, p7)`.
///
/// For a second-half classification the same roles are played by
/// `(p1, p2, p5, p6)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quad {
    pub p0: f64,
    pub p3: f64,
    pub p4: f64,
    pub p7: f64,
}

impl Quad {
    pub fn new(p0: f64, p3: f64, p4: f64, p7: f64) -> Self {
        Quad { p0, p3, p4, p7 }
    }

    pub fn sum(&self) -> f64 {
        self.p0 + self.p3 + self.p4 + self.p7
    }
}

/// Extracts the quad of the given half from block parameters.
pub fn quad_of(p: &BlockParams, half: Half) -> Quad {
    match half {
        Half::First => Quad::new(p.p[0], p.p[3], p.p[4], p.p[7]),
        Half::Second => Quad::new(p.p[1], p.p[2], p.p[5], p.p[6]),
    }
}

/// Border values dividing the A/B and A'/A'' layers, plus the residual roof.
///
/// Both thresholds are `+inf` when `p0 + p3 = 0`; no entangled state reaches
/// that corner, the sentinel only keeps grid emission total.
#[derive(Clone, Copy, Debug)]
pub struct Thresholds {
    pub p_ab: f64,
    pub p_a1a2: f64,
    pub roof: f64,
}

impl Thresholds {
    pub fn from_pair(p0: f64, p3: f64) -> Self {
        let s = p0 + p3;
        let (p_ab, p_a1a2) = if s > 0.0 {
            ((1.0 - s) * p3 / s, (1.0 - s) * p0 / s)
        } else {
            (f64::INFINITY, f64::INFINITY)
        };
        Thresholds {
            p_ab,
            p_a1a2,
            roof: 1.0 - s,
        }
    }

    pub fn from_quad(q: &Quad) -> Self {
        let mut t = Self::from_pair(q.p0, q.p3);
        t.roof = 1.0 - q.p0 - q.p3 - q.p7;
        t
    }
}

/// Classifies one quad into its table region.
///
/// Errors with [`Error::InvalidQuad`] when the residual caps `p4 <= 3 p0`,
/// `p7 <= 3 p3` or the normalization `sum <= 1` fail.
pub fn classify_quad(quad: Quad) -> Result<Region> {
    let Quad { p0, p3, p4, p7 } = quad;
    let invalid = |reason| Error::InvalidQuad {
        p0,
        p3,
        p4,
        p7,
        reason,
    };
    if p0 < 0.0 || p3 < 0.0 || p4 < 0.0 || p7 < 0.0 {
        return Err(invalid("negative parameter"));
    }
    if quad.sum() > 1.0 + PHYS_TOL {
        return Err(invalid("parameters sum above 1"));
    }
    if p4 > 3.0 * p0 + PHYS_TOL {
        return Err(invalid("p4 exceeds 3*p0"));
    }
    if p7 > 3.0 * p3 + PHYS_TOL {
        return Err(invalid("p7 exceeds 3*p3"));
    }
    let th = Thresholds::from_pair(p0, p3);
    // The branch margins are written exactly as in the reduced criteria so
    // that classification and criteria flags agree bit-for-bit.
    Ok(if p0 + p3 - 0.5 > 0.0 {
        if p7 <= th.p_ab {
            if p4 <= th.p_a1a2 {
                Region::APrime
            } else if p4 < p0 {
                Region::ADoublePrime
            } else {
                Region::ATriplePrime
            }
        } else if p7 < p3 {
            Region::B
        } else {
            Region::C1
        }
    } else if 2.0 * p0 + p3 + p7 - 1.0 > 0.0 {
        Region::C2
    } else if p7 >= p3 {
        Region::D2
    } else if 2.0 * p3 + p0 + p4 - 1.0 > 0.0 {
        Region::D1Prime
    } else {
        Region::D1DoublePrime
    })
}

/// Classifies a state, checking the first inequality half before the second.
///
/// A state is genuinely entangled iff the returned region is entangled; for
/// fully biseparable states the finer D-label of the first half is recorded
/// with `half = None`.
pub fn classify(f: &FVector, eps: f64) -> Result<RegionLabel> {
    let p = block_params(f);
    let report = criteria::reduced_criteria(&p, eps)?;
    // A violated half always lands in an entangled quad region except on
    // knife edges a rounding width from a border; those fall through to the
    // biseparable labels, matching the closed-boundary tie rules.
    if report.first_half() {
        let region = classify_quad(quad_of(&p, Half::First))?;
        if region.is_entangled() {
            return Ok(RegionLabel {
                region,
                half: Some(Half::First),
            });
        }
    }
    if report.second_half() {
        let region = classify_quad(quad_of(&p, Half::Second))?;
        if region.is_entangled() {
            return Ok(RegionLabel {
                region,
                half: Some(Half::Second),
            });
        }
    }
    let region = match classify_quad(quad_of(&p, Half::First))? {
        r @ (Region::D1DoublePrime | Region::D2) => r,
        // Reachable only with eps > 0, when a margin sits inside the slack.
        _ => Region::Biseparable,
    };
    Ok(RegionLabel { region, half: None })
}

/// Label of one grid cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CellLabel {
    Region(Region),
    Unphysical,
}

impl std::fmt::Display for CellLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CellLabel::Region(r) => write!(f, "{r}"),
            CellLabel::Unphysical => f.write_str("unphysical"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridCell {
    pub x: f64,
    pub y: f64,
    pub label: CellLabel,
}

/// Analytic border polyline, sampled at the grid resolution.
#[derive(Clone, Debug)]
pub struct Boundary {
    pub name: &'static str,
    pub points: Vec<(f64, f64)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GridView {
    /// Axes `(p3, p7)` at fixed `p4`.
    P3P7,
    /// Axes `(p3, p4)` at fixed `p7`.
    P3P4,
}

impl GridView {
    pub fn axis_names(self) -> (&'static str, &'static str) {
        match self {
            GridView::P3P7 => ("p3", "p7"),
            GridView::P3P4 => ("p3", "p4"),
        }
    }
}

/// Region map over one plane of the parameter space.
#[derive(Clone, Debug)]
pub struct RegionGrid {
    pub view: GridView,
    pub p0: f64,
    /// Value held fixed: `p4` for the `(p3, p7)` view, `p7` for `(p3, p4)`.
    pub fixed: f64,
    pub axis_max: f64,
    pub resolution: usize,
    pub cells: Vec<GridCell>,
    pub boundaries: Vec<Boundary>,
    /// Meeting point of the `p7 = p_AB` curve and the `p7 = p3` line.
    pub pab_diag_intersection: Option<f64>,
}

/// Labels cells at the centers of a `resolution x resolution` grid.
///
/// Without `p4_slice` the view is `(p3, p7)` with `p4 = 0`; with
/// `p4_slice = Some(v)` it is the layer view `(p3, p4)` at `p7 = v`.
pub fn region_grid(
    p0: f64,
    axis_max: f64,
    resolution: usize,
    p4_slice: Option<f64>,
) -> Result<RegionGrid> {
    if resolution < 2 {
        return Err(Error::DomainError {
            value: resolution as f64,
            domain: "resolution >= 2",
        });
    }
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::DomainError {
            value: p0,
            domain: "p0 in [0, 1]",
        });
    }
    if !(axis_max > 0.0 && axis_max <= 1.0) {
        return Err(Error::DomainError {
            value: axis_max,
            domain: "axis_max in (0, 1]",
        });
    }
    let view = if p4_slice.is_some() {
        GridView::P3P4
    } else {
        GridView::P3P7
    };
    let fixed = p4_slice.unwrap_or(0.0);
    let step = axis_max / resolution as f64;
    let cells = crate::exec::batch_map_range(resolution * resolution, |k| {
        let i = k / resolution;
        let j = k % resolution;
        let x = (j as f64 + 0.5) * step;
        let y = (i as f64 + 0.5) * step;
        let quad = match view {
            GridView::P3P7 => Quad::new(p0, x, fixed, y),
            GridView::P3P4 => Quad::new(p0, x, y, fixed),
        };
        let label = match classify_quad(quad) {
            Ok(r) => CellLabel::Region(r),
            Err(_) => CellLabel::Unphysical,
        };
        GridCell { x, y, label }
    });
    let boundaries = grid_boundaries(view, p0, axis_max, resolution);
    let pab_diag_intersection = (view == GridView::P3P7 && p0 < 0.5)
        .then(|| (1.0 - 2.0 * p0) / 2.0)
        .filter(|x| *x <= axis_max);
    Ok(RegionGrid {
        view,
        p0,
        fixed,
        axis_max,
        resolution,
        cells,
        boundaries,
        pab_diag_intersection,
    })
}

fn sampled_curve(
    name: &'static str,
    axis_max: f64,
    resolution: usize,
    f: impl Fn(f64) -> f64,
) -> Option<Boundary> {
    let points: Vec<(f64, f64)> = (0..=resolution)
        .map(|k| {
            let x = k as f64 * axis_max / resolution as f64;
            (x, f(x))
        })
        .filter(|&(_, y)| (0.0..=axis_max).contains(&y) && y.is_finite())
        .collect();
    (points.len() >= 2).then_some(Boundary { name, points })
}

fn grid_boundaries(view: GridView, p0: f64, axis_max: f64, resolution: usize) -> Vec<Boundary> {
    let mut out = Vec::new();
    let vline = 0.5 - p0;
    if (0.0..=axis_max).contains(&vline) {
        out.push(Boundary {
            name: "p0+p3=1/2",
            points: vec![(vline, 0.0), (vline, axis_max)],
        });
    }
    match view {
        GridView::P3P7 => {
            out.extend(sampled_curve("p7=p_AB", axis_max, resolution, |x| {
                Thresholds::from_pair(p0, x).p_ab
            }));
            out.push(Boundary {
                name: "p7=p3",
                points: vec![(0.0, 0.0), (axis_max, axis_max)],
            });
            out.extend(sampled_curve("2p0+p3+p7=1", axis_max, resolution, |x| {
                1.0 - 2.0 * p0 - x
            }));
        }
        GridView::P3P4 => {
            out.extend(sampled_curve("p4=p_A'A''", axis_max, resolution, |x| {
                Thresholds::from_pair(p0, x).p_a1a2
            }));
            if (0.0..=axis_max).contains(&p0) {
                out.push(Boundary {
                    name: "p4=p0",
                    points: vec![(0.0, p0), (axis_max, p0)],
                });
            }
            out.extend(sampled_curve("p4=1-p0-2p3", axis_max, resolution, |x| {
                1.0 - p0 - 2.0 * x
            }));
        }
    }
    out
}

/// One lattice point of the biseparable-set border scan.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfacePoint {
    pub l3: f64,
    pub l7: f64,
    pub l4: f64,
    pub label: SurfaceLabel,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceLabel {
    Interior,
    Infeasible,
    /// Names of the active border surfaces; `{I, II}` renders as the
    /// intersection line III and `{I, IV}` as line V.
    On(Vec<&'static str>),
}

impl std::fmt::Display for SurfaceLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfaceLabel::Interior => f.write_str("interior"),
            SurfaceLabel::Infeasible => f.write_str("infeasible"),
            SurfaceLabel::On(names) => {
                let mut names = names.clone();
                let replace = |names: &mut Vec<&'static str>, pair: [&str; 2], line: &'static str| {
                    if pair.iter().all(|p| names.contains(p)) {
                        names.retain(|n| !pair.contains(n));
                        names.insert(0, line);
                    }
                };
                replace(&mut names, ["I", "II"], "III");
                replace(&mut names, ["I", "IV"], "V");
                f.write_str(&names.join("+"))
            }
        }
    }
}

/// Scans the unit cube over `(l3, l7, l4)` at fixed `l0`, marking which of
/// the six border constraints of the biseparable polytope are active.
pub fn bisep_surface(l0: f64, resolution: usize) -> Result<Vec<SurfacePoint>> {
    if !(0.0..=1.0).contains(&l0) {
        return Err(Error::DomainError {
            value: l0,
            domain: "l0 in [0, 1]",
        });
    }
    if resolution < 2 {
        return Err(Error::DomainError {
            value: resolution as f64,
            domain: "resolution >= 2",
        });
    }
    const ACTIVE_TOL: f64 = 1e-9;
    let n = resolution + 1;
    Ok(crate::exec::batch_map_range(n * n * n, |idx| {
        let i = idx / (n * n);
        let j = (idx / n) % n;
        let k = idx % n;
        let l3 = i as f64 / resolution as f64;
        let l7 = j as f64 / resolution as f64;
        let l4 = k as f64 / resolution as f64;
        let constraints: [(&'static str, f64); 6] = [
            ("I", l0 + l3 - 0.5),
            ("II", 2.0 * l0 + l3 + l7 - 1.0),
            ("IV", l0 + 2.0 * l3 + l4 - 1.0),
            ("VI", l0 + l3 + l4 + l7 - 1.0),
            ("VII", l4 - 3.0 * l0),
            ("l7=3l3", l7 - 3.0 * l3),
        ];
        let label = if constraints.iter().any(|&(_, c)| c > ACTIVE_TOL) {
            SurfaceLabel::Infeasible
        } else {
            let active: Vec<&'static str> = constraints
                .iter()
                .filter_map(|&(name, c)| (c.abs() <= ACTIVE_TOL).then_some(name))
                .collect();
            if active.is_empty() {
                SurfaceLabel::Interior
            } else {
                SurfaceLabel::On(active)
            }
        };
        SurfacePoint { l3, l7, l4, label }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{index, realize_quad, sample_random, validate, BiasTarget, FVector};

    #[test]
    fn quad_examples() {
        assert_eq!(
            classify_quad(Quad::new(1.0, 0.0, 0.0, 0.0)).unwrap(),
            Region::APrime
        );
        // p_AB = 0.25*0.35/0.65 ~ 0.1346 < 0.2 < 0.25.
        assert_eq!(
            classify_quad(Quad::new(0.4, 0.25, 0.15, 0.2)).unwrap(),
            Region::B
        );
        // p_AB ~ 0.2455 >= 0.1, p4 = 0.3 >= p0 = 0.25.
        assert_eq!(
            classify_quad(Quad::new(0.25, 0.3, 0.3, 0.1)).unwrap(),
            Region::ATriplePrime
        );
        let th = Thresholds::from_pair(0.4, 0.25);
        assert!((th.p_ab - 0.25 * 0.35 / 0.65).abs() < 1e-15);
        assert!((th.p_a1a2 - 0.4 * 0.35 / 0.65).abs() < 1e-15);
    }

    #[test]
    fn quad_boundary_tie_rules() {
        // p0 + p3 = 1/2 exactly: not v5-violated, lower branch.
        assert_eq!(
            classify_quad(Quad::new(0.45, 0.05, 0.0, 0.1)).unwrap(),
            Region::C2
        );
        // p7 = p_AB exactly goes to the A side.
        let th = Thresholds::from_pair(0.4, 0.25);
        assert_eq!(
            classify_quad(Quad::new(0.4, 0.25, 0.0, th.p_ab)).unwrap(),
            Region::APrime
        );
        // p7 = p3 goes to C1.
        assert_eq!(
            classify_quad(Quad::new(0.4, 0.25, 0.0, 0.25)).unwrap(),
            Region::C1
        );
        // p4 = p0 goes to A'''.
        assert_eq!(
            classify_quad(Quad::new(0.3, 0.25, 0.3, 0.0)).unwrap(),
            Region::ATriplePrime
        );
        // C2/D2 border stays biseparable-side.
        assert_eq!(
            classify_quad(Quad::new(0.3, 0.1, 0.0, 0.3)).unwrap(),
            Region::D2
        );
        // D1'/D1'' border stays biseparable-side.
        assert_eq!(
            classify_quad(Quad::new(0.3, 0.1, 0.5, 0.05)).unwrap(),
            Region::D1DoublePrime
        );
    }

    #[test]
    fn quad_rejects_unphysical() {
        assert!(classify_quad(Quad::new(0.1, 0.1, 0.5, 0.1)).is_err());
        assert!(classify_quad(Quad::new(0.3, 0.05, 0.0, 0.2)).is_err());
        assert!(classify_quad(Quad::new(0.5, 0.4, 0.2, 0.1)).is_err());
    }

    #[test]
    fn classify_uniform_is_biseparable_d2() {
        let label = classify(&FVector::uniform(), 0.0).unwrap();
        assert_eq!(label.region, Region::D2);
        assert_eq!(label.half, None);
        assert!(!label.is_entangled());
    }

    #[test]
    fn classify_d1_prime_example() {
        // Block (0,0) holds {0.2, 0.2, 0.2, 0}: p0 = 0.2, p4 = 0.4.
        let mut raw = [0.0; 16];
        raw[index(0, 0, 0, 0)] = 0.2;
        raw[index(0, 0, 1, 0)] = 0.2;
        raw[index(0, 1, 0, 0)] = 0.2;
        raw[index(1, 0, 0, 1)] = 0.25;
        raw[index(1, 0, 1, 1)] = 0.05;
        raw[index(0, 0, 0, 1)] = 0.05;
        raw[index(1, 0, 0, 0)] = 0.05;
        let f = validate(&raw).unwrap();
        let label = classify(&f, 0.0).unwrap();
        assert_eq!(label.region, Region::D1Prime);
        assert_eq!(label.half, Some(Half::First));
        assert!(label.is_entangled());
    }

    #[test]
    fn classify_second_half_example() {
        let f = realize_quad(Quad::new(0.4, 0.25, 0.15, 0.2), Half::Second).unwrap();
        let label = classify(&f, 0.0).unwrap();
        assert_eq!(label.region, Region::B);
        assert_eq!(label.half, Some(Half::Second));
    }

    #[test]
    fn classification_consistent_with_criteria_flags() {
        use Region::*;
        // Guaranteed flags per region (first half): v5, v6, v7.
        let guaranteed = |r: Region| -> [bool; 3] {
            match r {
                APrime => [true, false, false],
                ADoublePrime | ATriplePrime => [true, false, true],
                B | C1 => [true, true, false],
                C2 => [false, true, false],
                D1Prime => [false, false, true],
                _ => [false, false, false],
            }
        };
        let starred = |r: Region| -> [bool; 3] {
            match r {
                APrime => [false, true, true],
                ADoublePrime => [false, true, false],
                B => [false, false, true],
                ATriplePrime | C1 | C2 | D1Prime => [false, false, false],
                _ => [false, false, false],
            }
        };
        let mut seen = std::collections::HashSet::new();
        for (i, region) in Region::ENTANGLED.iter().cycle().take(700).enumerate() {
            let f = sample_random(
                1000 + i as u64,
                Some(&BiasTarget {
                    region: *region,
                    half: Half::First,
                }),
            )
            .unwrap();
            let label = classify(&f, 0.0).unwrap();
            assert_eq!(label.region, *region);
            let report = criteria::reduced_criteria(&block_params(&f), 0.0).unwrap();
            let g = guaranteed(*region);
            let s = starred(*region);
            for k in 0..3 {
                if g[k] {
                    assert!(report.violated[k], "{region} must violate {}", k + 5);
                }
                if !g[k] && !s[k] {
                    assert!(!report.violated[k], "{region} must preserve {}", k + 5);
                }
                if s[k] && report.violated[k] {
                    seen.insert((*region, k));
                }
                if s[k] && !report.violated[k] {
                    seen.insert((*region, 100 + k));
                }
            }
        }
        // Every starred entry of the table is witnessed in both directions.
        for (region, k) in [
            (APrime, 1),
            (APrime, 2),
            (ADoublePrime, 1),
            (B, 2),
        ] {
            assert!(seen.contains(&(region, k)), "{region} starred {k} on");
            assert!(seen.contains(&(region, 100 + k)), "{region} starred {k} off");
        }
    }

    #[test]
    fn slack_tolerance_downgrades_marginal_violations() {
        // v5 margin is 0.05 here; a larger eps leaves no flag set and the
        // first-half quad is no D region, so the generic label applies.
        let f = realize_quad(Quad::new(0.3, 0.25, 0.0, 0.1), Half::First).unwrap();
        assert!(classify(&f, 0.0).unwrap().is_entangled());
        let label = classify(&f, 0.1).unwrap();
        assert_eq!(label.region, Region::Biseparable);
        assert_eq!(label.half, None);
    }

    #[test]
    fn every_valid_quad_classifies() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let mut count = 0;
        while count < 100_000 {
            let p0: f64 = rng.random_range(0.0..1.0);
            let p3: f64 = rng.random_range(0.0..(1.0 - p0));
            let p4: f64 = rng.random_range(0.0..=(3.0 * p0).min(1.0 - p0 - p3));
            let p7: f64 = rng.random_range(0.0..=(3.0 * p3).min(1.0 - p0 - p3 - p4));
            classify_quad(Quad::new(p0, p3, p4, p7)).expect("valid quad must classify");
            count += 1;
        }
    }

    #[test]
    fn grid_intersection_algebra() {
        let grid = region_grid(0.3, 0.7, 64, None).unwrap();
        let x = grid.pab_diag_intersection.unwrap();
        assert!((x - 0.2).abs() < 1e-12);
        let th = Thresholds::from_pair(0.3, x);
        assert!((th.p_ab - x).abs() < 1e-12);
    }

    #[test]
    fn grid_at_p0_06_has_no_d_regions() {
        let grid = region_grid(0.6, 0.4, 80, None).unwrap();
        for cell in &grid.cells {
            if let CellLabel::Region(r) = cell.label {
                assert!(
                    matches!(
                        r,
                        Region::APrime
                            | Region::ADoublePrime
                            | Region::ATriplePrime
                            | Region::B
                            | Region::C1
                    ),
                    "unexpected {r} at ({}, {})",
                    cell.x,
                    cell.y
                );
            }
        }
        assert!(grid.pab_diag_intersection.is_none());
    }

    #[test]
    fn grid_p4_view_carries_layer_boundaries() {
        let grid = region_grid(0.3, 0.7, 32, Some(0.0)).unwrap();
        assert_eq!(grid.view, GridView::P3P4);
        let names: Vec<&str> = grid.boundaries.iter().map(|b| b.name).collect();
        assert!(names.contains(&"p4=1-p0-2p3"));
        assert!(names.contains(&"p4=p_A'A''"));
        assert!(names.contains(&"p4=p0"));
        // Both D1 layers appear in the slice.
        let labels: std::collections::HashSet<String> = grid
            .cells
            .iter()
            .map(|c| c.label.to_string())
            .collect();
        assert!(labels.contains("D1'"));
        assert!(labels.contains("D1''"));
    }

    #[test]
    fn surface_examples() {
        let pts = bisep_surface(0.2, 20).unwrap();
        let find = |l3: f64, l7: f64, l4: f64| -> &SurfacePoint {
            pts.iter()
                .find(|p| {
                    (p.l3 - l3).abs() < 1e-12 && (p.l7 - l7).abs() < 1e-12 && (p.l4 - l4).abs() < 1e-12
                })
                .unwrap()
        };
        assert_eq!(find(0.3, 0.0, 0.0).label.to_string(), "I");
        assert_eq!(find(0.3, 0.3, 0.0).label.to_string(), "III");
        // At (0.1, 0.05, 0.6) surface IV is active too (0.2 + 0.2 + 0.6 = 1).
        assert!(find(0.1, 0.05, 0.6).label.to_string().contains("VII"));
        assert_eq!(find(0.05, 0.05, 0.6).label.to_string(), "VII");
        assert_eq!(find(0.1, 0.05, 0.0).label.to_string(), "interior");
        assert_eq!(find(0.4, 0.0, 0.0).label.to_string(), "infeasible");
    }

    #[test]
    fn symmetry_pairing_on_sampled_states() {
        for (i, region) in Region::ENTANGLED.iter().cycle().take(70).enumerate() {
            let f = sample_random(
                5000 + i as u64,
                Some(&BiasTarget {
                    region: *region,
                    half: Half::First,
                }),
            )
            .unwrap();
            let g = crate::state::exchange_symmetry(&f);
            let lf = classify(&f, 0.0).unwrap();
            let lg = classify(&g, 0.0).unwrap();
            assert_eq!(lg.region, lf.region.symmetric_pair().unwrap());
            assert_eq!(lf.half, lg.half);
        }
    }
}
