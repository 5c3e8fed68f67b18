//! Ricci–DeTurck flow by the method of lines: conservative linear part plus
//! pointwise nonlinear remainder, Heun (RK2) in time, frozen-kernel
//! modulation, and the diagnostics measured along a run.

pub mod diagnostics;
pub mod fits;
pub mod init;

pub use diagnostics::{Diagnostics, Sample};
pub use fits::{decay_fit, meanvalue_check, monotonicity_report, smoothing_fit, Fit, MeanValueRow, Monotonicity};
pub use init::InitialData;

use crate::error::{Error, Result};
use crate::geometry::TensorField;
use crate::operators::grid::Discretization;
use crate::spectral::{assemble, eigen};

/// `g(t) − g0` with its kernel projection.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub h: TensorField,
    pub h0: TensorField,
    pub dt_last: f64,
    pub step_count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Converged,
    ExitedBall,
    ReachedTMax,
    BlewUp,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Converged => "converged",
            Classification::ExitedBall => "exited_ball",
            Classification::ReachedTMax => "reached_t_max",
            Classification::BlewUp => "blew_up",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExitData {
    pub reason: String,
    pub t: f64,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub class: Classification,
    pub state: FlowState,
    pub exit: Option<ExitData>,
    /// `(‖Ric(g)‖_∞, ‖V(g, g0)‖_∞)` at convergence.
    pub gauge: Option<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowParams {
    pub t_max: f64,
    pub delta_ball: f64,
    pub tol_conv: f64,
    pub safety: f64,
    /// First diagnostic time; later samples follow `t0·ratio^k`.
    pub t0: f64,
    pub ratio: f64,
    pub max_steps: usize,
    /// Extra times at which the full field is stored.
    pub snapshot_times: Vec<f64>,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            t_max: 10.0,
            delta_ball: 0.1,
            tol_conv: 1e-8,
            safety: 0.9,
            t0: 1e-2,
            ratio: 1.3,
            max_steps: 5_000_000,
            snapshot_times: Vec::new(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub h: TensorField,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub outcome: RunOutcome,
    pub diagnostics: Diagnostics,
    pub snapshots: Vec<Snapshot>,
}

/// Stepper on a fixed discretization with a frozen kernel basis.
#[derive(Clone, Debug)]
pub struct Flow {
    disc: Discretization,
    kernel: Vec<TensorField>,
    /// Largest eigenvalue of `−L` on the reduced space (Heun stability).
    lambda_max: f64,
    /// `Φ − L` at `h = 0`; subtracted so that `g0` is stationary bitwise.
    n0: Vec<f64>,
    /// Rayleigh quotients `⟨−L e, e⟩` of the kernel fields. The discrete
    /// kernel eigenvalue is an O(Δr²) artifact (slightly negative on
    /// Eguchi–Hanson); the right-hand side deflates it to exactly zero.
    kernel_shift: Vec<f64>,
}

impl Flow {
    /// `kernel` must be orthonormal in the weighted inner product.
    pub fn new(disc: Discretization, kernel: Vec<TensorField>) -> Result<Self> {
        let a = assemble(&disc, true)?;
        let dinv: Vec<f64> = a.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
        let sym = a.k.scaled(&dinv);
        let (top, _) = eigen::lanczos_max(|x| sym.matvec(x), a.dofs(), &[], crate::spectral::SEED);
        let n0 = disc.nonlinear_values(&vec![0.0; disc.grid().len() * disc.blocks()])?;
        let ip = |u: &TensorField, v: &TensorField| disc.stiffness().inner_product(u.values(), v.values());
        let kernel_shift = kernel.iter().map(|e| -ip(e, &disc.lichnerowicz(e)) / ip(e, e)).collect();
        Ok(Self { disc, kernel, lambda_max: 1.02 * top.max(0.0), n0, kernel_shift })
    }

    pub fn disc(&self) -> &Discretization {
        &self.disc
    }
    pub fn kernel(&self) -> &[TensorField] {
        &self.kernel
    }
    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    pub fn inner(&self, u: &TensorField, v: &TensorField) -> f64 {
        self.disc.stiffness().inner_product(u.values(), v.values())
    }

    pub fn l2(&self, u: &TensorField) -> f64 {
        self.inner(u, u).sqrt()
    }

    /// Right-hand side `∂_t h = L_{g0} h + (Φ(g0 + h) − L_{g0} h)`.
    pub fn rhs(&self, h: &TensorField) -> Result<TensorField> {
        self.disc.check_metric(h)?;
        let lin = self.disc.lichnerowicz(h);
        let nl = self.disc.nonlinear_values(h.values())?;
        let nb = self.disc.blocks();
        let last = self.disc.grid().len() - 1;
        let mut out = lin.into_values();
        for (k, v) in out.iter_mut().enumerate() {
            if k / nb < last {
                *v += nl[k] - self.n0[k];
            }
        }
        for (e, &lam) in self.kernel.iter().zip(&self.kernel_shift) {
            let c = lam * self.inner(h, e);
            out.iter_mut().zip(e.values()).for_each(|(v, x)| *v += c * x);
        }
        Ok(self.disc.tensor(out))
    }

    /// Largest eigenvalue of `(g0 + h)⁻¹` relative to `g0`.
    fn max_symbol(&self, h: &TensorField) -> Result<f64> {
        let mut m: f64 = 0.0;
        for i in 0..self.disc.grid().len() {
            for &x in h.node(i) {
                if !(1.0 + x > 0.0) {
                    return Err(Error::NotPositiveDefinite { node: i, r: self.disc.grid().r(i) });
                }
                m = m.max(1.0 / (1.0 + x));
            }
        }
        Ok(m)
    }

    /// `safety · min_i f(r_i)²Δr_i² / (2 · max symbol of g⁻¹)`.
    pub fn cfl_dt(&self, h: &TensorField, safety: f64) -> Result<f64> {
        if !(safety > 0.0 && safety <= 1.0) {
            return Err(Error::InvalidInput(format!("safety must lie in (0, 1], got {safety}")));
        }
        let grid = self.disc.grid();
        let mut m = f64::INFINITY;
        for i in 0..grid.len() - 1 {
            let f = self.disc.g0().coeffs(0.5 * (grid.r(i) + grid.r(i + 1))).f;
            let d = grid.spacing(i);
            let v = if f.is_finite() && f > 0.0 { f * f * d * d } else { d * d };
            m = m.min(v);
        }
        Ok(safety * m / (2.0 * self.max_symbol(h)?))
    }

    /// Step actually taken: [`Self::cfl_dt`] capped by the Heun stability
    /// limit `2/λ_max(−L)` (scaled by the symbol).
    pub fn stable_dt(&self, h: &TensorField, safety: f64) -> Result<f64> {
        let cfl = self.cfl_dt(h, safety)?;
        if self.lambda_max > 0.0 {
            Ok(cfl.min(safety * 2.0 / (self.lambda_max * self.max_symbol(h)?)))
        } else {
            Ok(cfl)
        }
    }

    /// `(h0, h − h0)` with `h0 = Σ⟨h, e_i⟩e_i`.
    pub fn project_kernel(&self, h: &TensorField) -> (TensorField, TensorField) {
        let mut h0 = self.disc.zeros();
        if h.blocks() != h0.blocks() {
            return (h0, h.clone());
        }
        for e in &self.kernel {
            h0 = h0.axpy(self.inner(h, e), e);
        }
        let perp = h.axpy(-1.0, &h0);
        (h0, perp)
    }

    fn constrain(&self, h: &mut TensorField) {
        let nb = h.blocks();
        let last = self.disc.grid().len() - 1;
        for b in 0..nb {
            h.set(last, b, 0.0);
        }
        self.disc.stiffness().enforce_inner(h.values_mut());
    }

    /// One Heun step.
    pub fn step(&self, s: &FlowState, dt: f64) -> Result<FlowState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidInput(format!("step size must be positive, got {dt}")));
        }
        let k1 = self.rhs(&s.h)?;
        let mut mid = s.h.axpy(dt, &k1);
        self.constrain(&mut mid);
        let k2 = self.rhs(&mid)?;
        let mut h = s.h.axpy(0.5 * dt, &k1).axpy(0.5 * dt, &k2);
        self.constrain(&mut h);
        self.disc.check_metric(&h)?;
        let (h0, _) = self.project_kernel(&h);
        Ok(FlowState { t: s.t + dt, h, h0, dt_last: dt, step_count: s.step_count + 1 })
    }

    pub fn initial_state(&self, h: TensorField) -> FlowState {
        let (h0, _) = self.project_kernel(&h);
        FlowState { t: 0.0, h, h0, dt_last: 0.0, step_count: 0 }
    }

    fn sup(&self, h: &TensorField) -> f64 {
        h.pointwise_norm().into_iter().fold(0.0, f64::max)
    }

    fn gauge(&self, h: &TensorField) -> Result<(f64, f64)> {
        Ok((self.disc.ricci(h)?.max_abs(), self.disc.deturck_vector(h)?.max_abs()))
    }

    /// Evolves `init` until convergence, ball exit, blow-up or `t_max`.
    pub fn run(&self, init: TensorField, p: &FlowParams) -> Result<Run> {
        if !(p.t_max > 0.0 && p.t0 > 0.0 && p.ratio > 1.0 && p.delta_ball > 0.0 && p.tol_conv > 0.0) {
            return Err(Error::InvalidInput("flow parameters must be positive (ratio > 1)".into()));
        }
        if self.sup(&init) >= p.delta_ball {
            return Err(Error::InvalidInput(format!("initial data leaves the ball: ‖h‖_∞ = {:e}", self.sup(&init))));
        }
        self.disc.check_metric(&init)?;
        let mut samples = Vec::new();
        let mut t = p.t0;
        while t < p.t_max * (1.0 - 1e-12) {
            samples.push(t);
            t *= p.ratio;
        }
        samples.push(p.t_max);
        let mut events: Vec<f64> = samples.iter().chain(&p.snapshot_times).copied().filter(|&x| x > 0.0 && x <= p.t_max).collect();
        events.sort_by(f64::total_cmp);
        events.dedup();
        let is_sample = |t: f64| samples.contains(&t);
        let is_snap = |t: f64| p.snapshot_times.contains(&t);

        let mut diag = Diagnostics::default();
        let mut snaps = Vec::new();
        let mut s = self.initial_state(init);
        diag.push(self.sample(&s)?);
        if p.snapshot_times.contains(&0.0) {
            snaps.push(Snapshot { t: 0.0, h: s.h.clone() });
        }
        let finish = |class, s: FlowState, exit, gauge, diag, snaps| {
            Ok(Run { outcome: RunOutcome { class, state: s, exit, gauge }, diagnostics: diag, snapshots: snaps })
        };
        if let Some(g) = self.converged(&s, p)? {
            return finish(Classification::Converged, s, None, Some(g), diag, snaps);
        }
        let mut next = 0;
        while next < events.len() {
            let target = events[next];
            let dt = match self.stable_dt(&s.h, p.safety) {
                Ok(dt) => dt.min(target - s.t),
                Err(e) => return finish(Classification::BlewUp, s.clone(), Some(exit_data(&e, s.t)), None, diag, snaps),
            };
            let landed = dt >= target - s.t;
            let prev = s.t;
            s = match self.step(&s, dt) {
                Ok(n) => n,
                Err(e) => return finish(Classification::BlewUp, s.clone(), Some(exit_data(&e, prev)), None, diag, snaps),
            };
            if landed {
                s.t = target;
            }
            let sup = self.sup(&s.h);
            if sup >= p.delta_ball {
                diag.push(self.sample(&s)?);
                let exit = ExitData { reason: "‖h‖_∞ reached δ_ball".into(), t: s.t, value: sup };
                return finish(Classification::ExitedBall, s, Some(exit), None, diag, snaps);
            }
            if s.step_count >= p.max_steps {
                let exit = ExitData { reason: "step budget exhausted".into(), t: s.t, value: s.step_count as f64 };
                return finish(Classification::ReachedTMax, s, Some(exit), None, diag, snaps);
            }
            if landed {
                next += 1;
                if is_snap(target) {
                    snaps.push(Snapshot { t: target, h: s.h.clone() });
                }
                if is_sample(target) {
                    diag.push(self.sample(&s)?);
                }
            }
            if landed || s.step_count.is_multiple_of(32) {
                if let Some(g) = self.converged(&s, p)? {
                    if !landed || !is_sample(target) {
                        diag.push(self.sample(&s)?);
                    }
                    return finish(Classification::Converged, s, None, Some(g), diag, snaps);
                }
            }
        }
        let exit = ExitData { reason: "t_max".into(), t: s.t, value: s.t };
        finish(Classification::ReachedTMax, s, Some(exit), None, diag, snaps)
    }

    fn converged(&self, s: &FlowState, p: &FlowParams) -> Result<Option<(f64, f64)>> {
        let f = match self.rhs(&s.h) {
            Ok(f) => f,
            Err(_) => return Ok(None),
        };
        if self.l2(&f) > p.tol_conv {
            return Ok(None);
        }
        let g = self.gauge(&s.h)?;
        Ok(if g.0 <= p.tol_conv { Some(g) } else { None })
    }
}

fn exit_data(e: &Error, t: f64) -> ExitData {
    ExitData { reason: e.to_string(), t, value: f64::NAN }
}
