use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{config, Error, Result};
use crate::grw::{build_frames, GraphHypersurface, Grid, HeightFamily, Orientation, WarpedProduct};
use crate::square::{box_exponential_audit, phi_from_curvature, BoxAuditParams};
use crate::symfunc::{gauss_curvature_data, Spectrum};

/// Named graph presets for the audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditFamily {
    Slices,
    Bowls,
    Bumps,
    Ramps,
    Caps,
    Trig,
    /// Slices, bowls, bumps and ramps in rotation.
    Mixed,
}

impl AuditFamily {
    pub const ALL: [AuditFamily; 7] = [
        AuditFamily::Slices,
        AuditFamily::Bowls,
        AuditFamily::Bumps,
        AuditFamily::Ramps,
        AuditFamily::Caps,
        AuditFamily::Trig,
        AuditFamily::Mixed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AuditFamily::Slices => "slices",
            AuditFamily::Bowls => "bowls",
            AuditFamily::Bumps => "bumps",
            AuditFamily::Ramps => "ramps",
            AuditFamily::Caps => "caps",
            AuditFamily::Trig => "trig",
            AuditFamily::Mixed => "mixed",
        }
    }
}

impl fmt::Display for AuditFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AuditFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| config(format!("unknown family {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    pub family: AuditFamily,
    pub r: usize,
    /// Defaults to the sample's reference level.
    pub t0: Option<f64>,
    pub beta: f64,
    /// Default: 0.9 × the smallest `|H_{r-1}|` of the sample.
    pub c1: Option<f64>,
    /// Default: 1.1 × the largest `|H_{r-1}|` of the sample.
    pub c2: Option<f64>,
    /// Default: alternate by sample, caps always opposite.
    pub orientation: Option<Orientation>,
    pub seed: u64,
    pub samples: usize,
    pub nodes: usize,
}

impl AuditConfig {
    pub fn new(family: AuditFamily) -> Self {
        Self {
            family,
            r: 1,
            t0: None,
            beta: 2.0,
            c1: None,
            c2: None,
            orientation: None,
            seed: 0,
            samples: 100,
            nodes: 24,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.r) {
            return Err(config(format!("audits run on surfaces, r = {} must be 1 or 2", self.r)));
        }
        if self.samples == 0 || self.nodes < 8 {
            return Err(config("need at least one sample and 8 nodes per axis"));
        }
        if !(self.beta > 1.0) {
            return Err(config(format!("β = {} must exceed 1", self.beta)));
        }
        Ok(())
    }
}

/// One generated graph: height family, reference level, half-width of the
/// square domain and orientation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SamplePreset {
    pub height: HeightFamily,
    pub level: f64,
    pub half_width: f64,
    pub orientation: Orientation,
}

fn preset(family: AuditFamily, i: usize, rng: &mut ChaCha8Rng, orientation: Option<Orientation>) -> SamplePreset {
    let alternate = if i % 2 == 0 { Orientation::Same } else { Orientation::Opposite };
    let level = rng.random_range(-1.0..0.0);
    let (height, half_width, default_o) = match family {
        AuditFamily::Slices => (HeightFamily::Slice { t0: level }, 0.5, alternate),
        AuditFamily::Bowls => (
            HeightFamily::Bowl {
                t0: level,
                curvature: rng.random_range(0.05..0.5),
            },
            0.5,
            alternate,
        ),
        AuditFamily::Bumps => (
            HeightFamily::Bump {
                t0: level,
                amplitude: rng.random_range(-0.3..0.3),
                width: rng.random_range(0.3..0.8),
                center: vec![rng.random_range(-0.2..0.2), rng.random_range(-0.2..0.2)],
            },
            0.5,
            alternate,
        ),
        AuditFamily::Ramps => (
            HeightFamily::Ramp {
                t0: level,
                slope: rng.random_range(-0.6..0.6),
                axis: rng.random_range(0..2),
            },
            0.5,
            alternate,
        ),
        AuditFamily::Caps => {
            let curvature = rng.random_range(0.55..0.9);
            let half_width = 0.25;
            // Apex raised so the corners sit on the reference level.
            let apex = level + curvature * 2.0 * half_width * half_width;
            (HeightFamily::Cap { t0: apex, curvature }, half_width, Orientation::Opposite)
        }
        AuditFamily::Trig => (
            HeightFamily::RandomTrig {
                t0: level,
                amplitude: rng.random_range(0.05..0.3),
                modes: 4,
                seed: rng.random(),
            },
            0.5,
            alternate,
        ),
        AuditFamily::Mixed => {
            let sub = [AuditFamily::Slices, AuditFamily::Bowls, AuditFamily::Bumps, AuditFamily::Ramps][i % 4];
            return preset(sub, i / 4, rng, orientation);
        }
    };
    SamplePreset {
        height,
        level,
        half_width,
        orientation: orientation.unwrap_or(default_o),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignPattern {
    Zero,
    Positive,
    Negative,
    Mixed,
}

/// Hypothesis flags and key-inequality outcome for one sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditVerdict {
    pub sample: usize,
    pub family: String,
    pub orientation: Orientation,
    pub t0: f64,
    pub c1: f64,
    pub c2: f64,
    pub rejected: Option<String>,
    pub nodes: usize,
    pub over_slice: bool,
    pub hr_sign: SignPattern,
    pub c_bounds: bool,
    pub nonnegative_sectional: bool,
    /// `R < n(n-1)` everywhere, reported for `r = 2`.
    pub scalar_below_model: Option<bool>,
    pub elliptic_point: bool,
    pub audited_nodes: usize,
    pub key_failures: usize,
    pub key_holds: bool,
    /// Nodes where `R < n(n-1)` and `H_2 > 0` disagree.
    pub scalar_mismatches: usize,
    pub completeness: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub config: AuditConfig,
    pub verdicts: Vec<AuditVerdict>,
    pub rejected: usize,
    pub audited_samples: usize,
    pub audited_nodes: usize,
    pub key_failures: usize,
    pub scalar_mismatches: usize,
    pub passed: bool,
}

/// `|H_2|` below which the scalar-curvature equivalence is not tested.
const H2_ZERO: f64 = 1e-12;

fn sign_pattern(values: &[f64], zero: impl Fn(usize) -> bool) -> SignPattern {
    let zeros = (0..values.len()).filter(|&i| zero(i)).count();
    if zeros == values.len() {
        return SignPattern::Zero;
    }
    let pos = values.iter().enumerate().all(|(i, &v)| v > 0.0 && !zero(i));
    let neg = values.iter().enumerate().all(|(i, &v)| v < 0.0 && !zero(i));
    match (pos, neg) {
        (true, _) => SignPattern::Positive,
        (_, true) => SignPattern::Negative,
        _ => SignPattern::Mixed,
    }
}

fn audit_sample(cfg: &AuditConfig, i: usize, p: &SamplePreset) -> Result<AuditVerdict> {
    let n = 2;
    let amb = WarpedProduct::steady_state(n)?;
    let grid = Grid::cube(n, -p.half_width, p.half_width, cfg.nodes)?;
    let graph = GraphHypersurface::from_family(amb, grid, &p.height)?;
    let t0 = cfg.t0.unwrap_or(p.level);
    let mut v = AuditVerdict {
        sample: i,
        family: cfg.family.name().into(),
        orientation: p.orientation,
        t0,
        c1: f64::NAN,
        c2: f64::NAN,
        rejected: None,
        nodes: 0,
        over_slice: false,
        hr_sign: SignPattern::Mixed,
        c_bounds: false,
        nonnegative_sectional: false,
        scalar_below_model: None,
        elliptic_point: false,
        audited_nodes: 0,
        key_failures: 0,
        key_holds: true,
        scalar_mismatches: 0,
        completeness: "unauditable",
    };
    let frames = match build_frames(&graph, p.orientation) {
        Ok(f) => f,
        Err(e @ Error::Geometry { .. }) => {
            v.rejected = Some(e.to_string());
            return Ok(v);
        }
        Err(e) => return Err(e),
    };
    let r = cfg.r;
    let hm: Vec<f64> = frames.nodes.iter().map(|f| f.invariants.h[r - 1].abs()).collect();
    let lo = hm.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = hm.iter().copied().fold(0.0, f64::max);
    let c2 = cfg.c2.unwrap_or(1.1 * hi);
    let c1 = cfg.c1.unwrap_or((0.9 * lo).max(1e-12 * hi.max(1.0)).min(c2));
    v.c1 = c1;
    v.c2 = c2;

    let phi = phi_from_curvature(&frames, r)?;
    let audit = box_exponential_audit(&frames, &phi, BoxAuditParams::new(t0, c1, c2, cfg.beta))?;
    let hr: Vec<f64> = frames.nodes.iter().map(|f| f.invariants.h[r]).collect();
    let majorant: Vec<f64> = frames
        .nodes
        .iter()
        .map(|f| {
            let abs: Vec<f64> = f.principal.iter().map(|l| l.abs()).collect();
            crate::symfunc::elementary_symmetric(&abs)[r] / crate::symfunc::binomial(n, r) as f64
        })
        .collect();

    let nn1 = (n * (n - 1)) as f64;
    let mut mismatches = 0;
    let mut below_model = true;
    for f in &frames.nodes {
        let g = gauss_curvature_data(&Spectrum::new(f.principal.clone())?, 1.0)?;
        let h2 = f.invariants.h[2];
        let below = g.scalar_curvature < nn1;
        below_model &= below;
        if h2.abs() > H2_ZERO && below != (h2 > 0.0) {
            mismatches += 1;
        }
    }

    v.nodes = frames.nodes.len();
    v.over_slice = audit.nodes.iter().all(|n| n.hypotheses.over_slice);
    v.hr_sign = sign_pattern(&hr, |k| hr[k].abs() <= crate::square::ZERO_TOL * majorant[k].max(1.0));
    v.c_bounds = hm.iter().all(|h| (c1..=c2).contains(h));
    v.nonnegative_sectional = audit.nodes.iter().all(|n| n.hypotheses.nonnegative_sectional);
    v.scalar_below_model = (r == 2).then_some(below_model);
    v.elliptic_point = phi.eligibility.elliptic_point;
    v.audited_nodes = audit.audited;
    v.key_failures = audit.failures;
    v.key_holds = audit.failures == 0;
    v.scalar_mismatches = mismatches;
    Ok(v)
}

/// Builds every sample of the family, evaluates the hypothesis flags and
/// audits the key inequality where they all hold.
pub fn run_audit(cfg: &AuditConfig) -> Result<AuditReport> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let presets: Vec<SamplePreset> = (0..cfg.samples)
        .map(|i| preset(cfg.family, i, &mut rng, cfg.orientation))
        .collect();
    let verdicts = presets
        .par_iter()
        .enumerate()
        .map(|(i, p)| audit_sample(cfg, i, p))
        .collect::<Result<Vec<_>>>()?;
    let key_failures = verdicts.iter().map(|v| v.key_failures).sum();
    let scalar_mismatches = verdicts.iter().map(|v| v.scalar_mismatches).sum();
    Ok(AuditReport {
        config: cfg.clone(),
        rejected: verdicts.iter().filter(|v| v.rejected.is_some()).count(),
        audited_samples: verdicts.iter().filter(|v| v.audited_nodes > 0).count(),
        audited_nodes: verdicts.iter().map(|v| v.audited_nodes).sum(),
        passed: key_failures == 0 && scalar_mismatches == 0,
        key_failures,
        scalar_mismatches,
        verdicts,
    })
}
