//! Parametrised integration paths and continuous branch tracking.
//!
//! Every path is parametrised by `s ∈ (0, 1)`. The integrator hands the
//! path both `s` and `1 − s`, and the path reports `t`, `1 − t` and `dt/ds`
//! with the small one of `t`, `1 − t` computed free of cancellation near
//! the endpoints.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use crate::error::{Error, Result};
use crate::quad::{integrate_unit, QuadOutcome, QuadratureSpec};
use crate::C64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourKind {
    /// Circle through `t = 1` around the origin, positive sense.
    LoopAroundZeroFromOne,
    /// Image of the previous loop under `t ↦ 1 − t`: through `0`, around `1`.
    LoopAroundOneFromZero,
    /// The line `Re r = c0`, traversed upwards.
    VerticalLine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourPath {
    kind: ContourKind,
    c0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathPoint {
    pub t: C64,
    pub one_minus_t: C64,
    pub dt_ds: C64,
}

fn check_c0(c0: f64) -> Result<()> {
    if !(c0 > 0.0 && c0 < 1.0) {
        return Err(Error::domain(format!("contour abscissa c0 must lie in (0, 1), got {c0}")));
    }
    Ok(())
}

impl ContourPath {
    /// Circle centred at `1 − 1/(2c0)` with radius `1/(2c0)`: starts and ends
    /// at `t = 1` and winds once around the origin.
    pub fn loop_around_zero(c0: f64) -> Result<Self> {
        check_c0(c0)?;
        Ok(Self { kind: ContourKind::LoopAroundZeroFromOne, c0 })
    }

    pub fn loop_around_one(c0: f64) -> Result<Self> {
        check_c0(c0)?;
        Ok(Self { kind: ContourKind::LoopAroundOneFromZero, c0 })
    }

    pub fn vertical_line(c0: f64) -> Result<Self> {
        check_c0(c0)?;
        Ok(Self { kind: ContourKind::VerticalLine, c0 })
    }

    pub fn kind(&self) -> ContourKind {
        self.kind
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn radius(&self) -> f64 {
        0.5 / self.c0
    }

    /// Centre of the circle; `None` for the line.
    pub fn center(&self) -> Option<C64> {
        let r = self.radius();
        match self.kind {
            ContourKind::LoopAroundZeroFromOne => Some(C64::new(1.0 - r, 0.0)),
            ContourKind::LoopAroundOneFromZero => Some(C64::new(r, 0.0)),
            ContourKind::VerticalLine => None,
        }
    }

    pub fn point(&self, s: f64, sc: f64) -> PathPoint {
        match self.kind {
            ContourKind::VerticalLine => {
                // y = tan(π(s − ½)), evaluated from the nearer endpoint
                let (y, sin_small) = if s <= 0.5 {
                    let a = PI * s;
                    (-a.cos() / a.sin(), a.sin())
                } else {
                    let a = PI * sc;
                    (a.cos() / a.sin(), a.sin())
                };
                let t = C64::new(self.c0, y);
                PathPoint {
                    t,
                    one_minus_t: C64::new(1.0 - self.c0, -y),
                    dt_ds: C64::new(0.0, PI / (sin_small * sin_small)),
                }
            }
            kind => {
                let r = self.radius();
                let psi = if s <= 0.5 { TAU * s } else { -TAU * sc };
                let half = 0.5 * psi;
                // u = R(1 − e^{iψ}) without cancellation for small ψ
                let u = C64::new(2.0 * half.sin().powi(2), -psi.sin()) * r;
                let rot = C64::new(psi.cos(), psi.sin());
                let du = C64::new(0.0, -TAU * r) * rot;
                if kind == ContourKind::LoopAroundZeroFromOne {
                    PathPoint { t: 1.0 - u, one_minus_t: u, dt_ds: -du }
                } else {
                    PathPoint { t: u, one_minus_t: 1.0 - u, dt_ds: du }
                }
            }
        }
    }

    /// Winding number about `p` by discrete argument summation over `nodes`
    /// samples, closing the path through its endpoints.
    pub fn winding_number_about(&self, p: C64, nodes: usize) -> f64 {
        let mut total = 0.0;
        let mut prev: Option<C64> = None;
        let start_end = match self.kind {
            ContourKind::LoopAroundZeroFromOne => C64::new(1.0, 0.0),
            ContourKind::LoopAroundOneFromZero => C64::new(0.0, 0.0),
            ContourKind::VerticalLine => return 0.0,
        };
        let mut pts = vec![start_end];
        for k in 1..nodes {
            let s = k as f64 / nodes as f64;
            pts.push(self.point(s, 1.0 - s).t);
        }
        pts.push(start_end);
        for q in pts {
            let v = q - p;
            if let Some(pv) = prev {
                total += (v / pv).arg();
            }
            prev = Some(v);
        }
        total / TAU
    }

    /// `∫ f(t) dt` along the path; `f` receives the path point and `s`.
    pub fn integrate<F>(&self, quad: &QuadratureSpec, mut f: F) -> Result<QuadOutcome>
    where
        F: FnMut(&PathPoint, f64) -> Result<C64>,
    {
        integrate_unit(quad, |s, sc| {
            let p = self.point(s, sc);
            let v = f(&p, s)?;
            // a vanishing integrand stays zero even where dt/ds overflows
            if v == C64::new(0.0, 0.0) { Ok(v) } else { Ok(v * p.dt_ds) }
        })
    }
}

const TRACK_EDGE: f64 = 1e-9;
const TRACK_GRID: usize = 256;
const TRACK_MAX_DEPTH: u32 = 40;

/// Continuous logarithm of a factor `g(s)` along a path.
///
/// A reference grid in `s` carries the unwrapped argument; it is refined
/// until consecutive arguments differ by less than π/4. The argument at
/// any other `s` is the nearest grid value plus the principal argument of
/// the ratio to it. The start of the grid takes the principal value.
#[derive(Debug, Clone)]
pub struct BranchTracker {
    s: Vec<f64>,
    value: Vec<C64>,
    arg: Vec<f64>,
}

impl BranchTracker {
    pub fn new<G>(factor: G) -> Result<Self>
    where
        G: Fn(f64, f64) -> C64,
    {
        let eval = |s: f64| factor(s, 1.0 - s);
        let mut s_out = Vec::with_capacity(TRACK_GRID * 2);
        let mut v_out = Vec::with_capacity(TRACK_GRID * 2);
        let mut a_out = Vec::with_capacity(TRACK_GRID * 2);

        let first = eval(TRACK_EDGE);
        s_out.push(TRACK_EDGE);
        v_out.push(first);
        a_out.push(first.arg());

        let span = 1.0 - 2.0 * TRACK_EDGE;
        for j in 1..TRACK_GRID {
            let s_next = TRACK_EDGE + span * j as f64 / (TRACK_GRID - 1) as f64;
            // refine (s_prev, s_next] depth-first until each jump < π/4
            let mut stack = vec![(s_next, 0u32)];
            while let Some(&(target, depth)) = stack.last() {
                let s_prev = *s_out.last().unwrap();
                let v_prev = *v_out.last().unwrap();
                let v = eval(target);
                let jump = (v / v_prev).arg();
                if jump.abs() < FRAC_PI_4 {
                    stack.pop();
                    s_out.push(target);
                    v_out.push(v);
                    a_out.push(a_out.last().unwrap() + jump);
                } else if depth >= TRACK_MAX_DEPTH {
                    return Err(Error::BranchDiscontinuity { at: target, jump });
                } else {
                    stack.push((0.5 * (s_prev + target), depth + 1));
                }
            }
        }
        Ok(Self { s: s_out, value: v_out, arg: a_out })
    }

    fn nearest(&self, s: f64) -> usize {
        match self.s.binary_search_by(|probe| probe.total_cmp(&s)) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.s.len() => self.s.len() - 1,
            Err(i) => {
                if s - self.s[i - 1] <= self.s[i] - s {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    /// Continuous argument of `value = g(s)`.
    pub fn arg(&self, s: f64, value: C64) -> f64 {
        let i = self.nearest(s);
        self.arg[i] + (value / self.value[i]).arg()
    }

    /// Branch-tracked logarithm of `value = g(s)`.
    pub fn ln(&self, s: f64, value: C64) -> C64 {
        C64::new(value.norm().ln(), self.arg(s, value))
    }

    /// Net change of the argument across the whole path.
    pub fn total_change(&self) -> f64 {
        self.arg.last().unwrap() - self.arg[0]
    }

    pub fn start_arg(&self) -> f64 {
        self.arg[0]
    }

    pub fn grid_len(&self) -> usize {
        self.s.len()
    }
}
