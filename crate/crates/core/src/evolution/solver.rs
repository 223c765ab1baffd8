use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::evolution::flux::FluxSpec;
use crate::geometry::{BoundaryCurve, BubbleSystem, Point};
use crate::numeric::condition_estimate_1norm;

/// Condition-estimate ceiling above which a solve is reported as unusable.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Exact ∫ ln|p - z| ds over the segment a -> b.
///
/// Written in segment coordinates t (arc parameter along the segment) and h
/// (signed offset of p from the segment line), the antiderivative of
/// ln sqrt(t^2 + h^2) must be continuous in t, so it uses atan(t/h) rather
/// than atan2(t, h): the latter jumps by 2 pi across t = 0 when h < 0.
/// The h = 0 case (p on the segment line, including the panel's own
/// midpoint) is the improper-but-convergent integral t ln|t| - t.
fn segment_log_integral(a: Point, b: Point, p: Point) -> f64 {
    let d = b - a;
    let l = d.norm();
    if l == 0.0 {
        return 0.0;
    }
    let r0 = a - p;
    let t0 = r0.dot(d) / l;
    let t1 = t0 + l;
    let h = r0.cross(d) / l;
    let anti = |t: f64| {
        let s = t * t + h * h;
        if s == 0.0 {
            0.0
        } else {
            let ang = if h == 0.0 { 0.0 } else { (t / h).atan() };
            0.5 * (t * s.ln() - 2.0 * t + 2.0 * h * ang)
        }
    };
    anti(t1) - anti(t0)
}

/// Flat panel taken from one polygon edge.
struct Panel {
    a: Point,
    b: Point,
    mid: Point,
    len: f64,
    bubble: usize,
}

fn collect_panels(system: &BubbleSystem) -> Vec<Panel> {
    let mut panels = Vec::new();
    for (bi, bubble) in system.bubbles.iter().enumerate() {
        let pts = bubble.curve.points();
        let n = pts.len();
        for k in 0..n {
            let a = pts[k];
            let b = pts[(k + 1) % n];
            panels.push(Panel {
                a,
                b,
                mid: (a + b) * 0.5,
                len: (b - a).norm(),
                bubble: bi,
            });
        }
    }
    panels
}

/// Solved suction field on a frozen bubble geometry.
///
/// The potential is represented as Phi(p) = -(1/2pi) sum_k psi_k
/// ∫_k ln|p - z| ds + c_inf, where psi_k is the normal derivative of Phi
/// into the bubble on panel k (positive psi shrinks the bubble). In free
/// mode the boundary constants are 0 and c_inf is solved for; in regulated
/// mode c_inf is gauged to 0 and the per-bubble constants are solved for.
#[derive(Debug, Clone)]
pub struct FieldSolution {
    labels: Vec<u32>,
    curves: Vec<BoundaryCurve>,
    /// Per bubble, per panel: d Phi / d nu with nu pointing into the bubble.
    panel_psi: Vec<Vec<f64>>,
    /// Boundary potential constant of each bubble.
    pub constants: Vec<f64>,
    /// O(1) additive constant of the far-field expansion.
    pub far_constant: f64,
    /// Realized flux through each boundary (prescribed in regulated mode,
    /// emergent in free mode; sums to the total suction rate).
    pub fluxes: Vec<f64>,
    /// 1-norm condition estimate of the collocation matrix.
    pub condition: f64,
}

impl FieldSolution {
    pub fn n_bubbles(&self) -> usize {
        self.curves.len()
    }

    pub fn label(&self, i: usize) -> u32 {
        self.labels[i]
    }

    /// Outward normal velocity at each vertex of bubble i (negative values
    /// move the boundary into the bubble, i.e. shrink it). A vertex is
    /// shared by two panels; its value is their mean.
    pub fn normal_velocity(&self, i: usize) -> Vec<f64> {
        let psi = &self.panel_psi[i];
        let n = psi.len();
        (0..n)
            .map(|v| -(psi[(v + n - 1) % n] + psi[v]) * 0.5)
            .collect()
    }

    /// Flux density (normal derivative into the bubble) per panel of bubble i.
    pub fn panel_flux_density(&self, i: usize) -> &[f64] {
        &self.panel_psi[i]
    }

    /// Largest boundary speed anywhere in the system; drives the step bound.
    pub fn max_speed(&self) -> f64 {
        self.panel_psi
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    /// Driving potential at an arbitrary point. Inside bubble i the
    /// potential is extended by its boundary constant; in the fluid the
    /// single-layer sum is evaluated with exact per-panel integrals, so the
    /// value stays accurate arbitrarily close to the boundary.
    pub fn phi_at(&self, p: Point) -> f64 {
        for (i, c) in self.curves.iter().enumerate() {
            if c.contains(p) {
                return self.constants[i];
            }
        }
        let mut acc = 0.0;
        for (i, c) in self.curves.iter().enumerate() {
            let pts = c.points();
            let n = pts.len();
            for k in 0..n {
                let a = pts[k];
                let b = pts[(k + 1) % n];
                acc += self.panel_psi[i][k] * segment_log_integral(a, b, p);
            }
        }
        -acc / (2.0 * PI) + self.far_constant
    }
}

/// Solve the exterior suction field on the current geometry.
///
/// The potential is harmonic in the fluid, behaves as
/// -(q_total/2pi) ln r + O(1) far away, and satisfies the boundary
/// conditions of the chosen mode: a shared constant 0 on every component
/// (free), or prescribed per-bubble fluxes with unknown per-bubble constants
/// (regulated, exactly two bubbles). Collocation is at panel midpoints with
/// piecewise-constant densities and exact panel integrals; the augmented
/// system (densities + constants) is solved densely and gated on a condition
/// estimate.
pub fn solve_field(system: &BubbleSystem, flux: &FluxSpec) -> Result<FieldSolution> {
    system.validate()?;
    flux.validate()?;
    let nb = system.bubbles.len();
    if flux.is_regulated() && nb != 2 {
        return Err(Error::validation(format!(
            "regulated mode requires exactly two bubbles, got {nb}"
        )));
    }

    // quadrature degrades when another boundary sits closer than about a
    // panel length; report the geometry as touching rather than return junk
    if nb > 1 {
        let spacing = system
            .bubbles
            .iter()
            .map(|b| b.curve.mean_spacing())
            .fold(f64::INFINITY, f64::min);
        let gap = system.pairwise_clearance();
        if gap < 0.5 * spacing {
            return Err(Error::validation(format!(
                "bubbles are touching: clearance {gap:.3e} below half the panel spacing {spacing:.3e}"
            )));
        }
    }

    let panels = collect_panels(system);
    let n = panels.len();
    let extra = if flux.is_regulated() { nb } else { 1 };
    let dim = n + extra;

    let mut a = DMatrix::<f64>::zeros(dim, dim);
    let mut rhs = nalgebra::DVector::<f64>::zeros(dim);

    // collocation rows: potential value at each panel midpoint
    for (j, pj) in panels.iter().enumerate() {
        for (k, pk) in panels.iter().enumerate() {
            a[(j, k)] = segment_log_integral(pk.a, pk.b, pj.mid) / (2.0 * PI);
        }
        match flux {
            // -S[psi](mid) + c_inf = 0  =>  sum M psi - c_inf = 0
            FluxSpec::Free { .. } => a[(j, n)] = -1.0,
            // -S[psi](mid) = Phi_i  =>  sum M psi + Phi_i = 0
            FluxSpec::Regulated { .. } => a[(j, n + pj.bubble)] = 1.0,
        }
    }

    // flux closure rows
    match *flux {
        FluxSpec::Free { q } => {
            for (k, pk) in panels.iter().enumerate() {
                a[(n, k)] = pk.len;
            }
            rhs[n] = q;
        }
        FluxSpec::Regulated { q1, q2 } => {
            for (k, pk) in panels.iter().enumerate() {
                a[(n + pk.bubble, k)] = pk.len;
            }
            rhs[n] = q1;
            rhs[n + 1] = q2;
        }
    }

    let lu = a.clone().lu();
    let condition = condition_estimate_1norm(&a, &lu);
    if !condition.is_finite() || condition > CONDITION_LIMIT {
        return Err(Error::IllConditioned {
            cond: condition,
            n: dim,
        });
    }
    let sol = lu
        .solve(&rhs)
        .ok_or_else(|| Error::numerical("field collocation matrix is singular"))?;

    let mut panel_psi: Vec<Vec<f64>> = system
        .bubbles
        .iter()
        .map(|b| Vec::with_capacity(b.curve.len()))
        .collect();
    for (k, pk) in panels.iter().enumerate() {
        panel_psi[pk.bubble].push(sol[k]);
    }

    let mut fluxes = vec![0.0; nb];
    for (k, pk) in panels.iter().enumerate() {
        fluxes[pk.bubble] += pk.len * sol[k];
    }

    let (constants, far_constant) = match flux {
        FluxSpec::Free { .. } => (vec![0.0; nb], sol[n]),
        FluxSpec::Regulated { .. } => ((0..nb).map(|i| sol[n + i]).collect(), 0.0),
    };

    Ok(FieldSolution {
        labels: system.bubbles.iter().map(|b| b.label).collect(),
        curves: system.bubbles.iter().map(|b| b.curve.clone()).collect(),
        panel_psi,
        constants,
        far_constant,
        fluxes,
        condition,
    })
}
