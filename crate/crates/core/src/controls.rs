//! Piecewise-linear control signals on a uniform grid, admissible-set
//! projection, genome encoding for the genetic algorithm, and the
//! regularization evaluators.

use serde::{Deserialize, Serialize};

use crate::{error::Error, Result};

/// Box bounds of the admissible control set:
/// `|u| <= u_max`, `0 <= n_j <= n_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlBounds {
    pub u_max: f64,
    pub n_max: f64,
}

impl ControlBounds {
    pub fn new(u_max: f64, n_max: f64) -> Result<Self> {
        let b = Self { u_max, n_max };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.u_max <= 0.0 || self.n_max <= 0.0 {
            return Err(Error::domain(format!(
                "control bounds must be positive: u_max = {}, n_max = {}",
                self.u_max, self.n_max
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn clamp_u(&self, u: f64) -> f64 {
        u.clamp(-self.u_max, self.u_max)
    }

    #[inline]
    pub fn clamp_n(&self, n: f64) -> f64 {
        n.clamp(0.0, self.n_max)
    }

    /// Componentwise projection of a control value onto the box.
    #[inline]
    pub fn project(&self, c: [f64; 3]) -> [f64; 3] {
        [self.clamp_u(c[0]), self.clamp_n(c[1]), self.clamp_n(c[2])]
    }
}

/// The control triple `c = (u, n_1, n_2)` as piecewise-linear functions of
/// time.
///
/// Samples live on a uniform grid over `[0, window]`; for the standard
/// representation `window == horizon`. The front-loaded class used with the
/// free-horizon steering problem samples the coherent control on a shorter
/// window and evaluates every component to zero on `(window, horizon]`;
/// its incoherent samples are identically zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlSet {
    horizon: f64,
    window: f64,
    u: Vec<f64>,
    n1: Vec<f64>,
    n2: Vec<f64>,
    bounds: ControlBounds,
}

impl ControlSet {
    /// All-zero controls on `m` subintervals over `[0, horizon]`.
    pub fn zeros(m: usize, horizon: f64, bounds: ControlBounds) -> Result<Self> {
        Self::from_samples(
            vec![0.0; m + 1],
            vec![0.0; m + 1],
            vec![0.0; m + 1],
            horizon,
            bounds,
        )
    }

    /// Constant controls `(u, n_1, n_2)`.
    pub fn constant(values: [f64; 3], m: usize, horizon: f64, bounds: ControlBounds) -> Result<Self> {
        Self::from_samples(
            vec![values[0]; m + 1],
            vec![values[1]; m + 1],
            vec![values[2]; m + 1],
            horizon,
            bounds,
        )
    }

    /// Sample a time function at the grid nodes, projecting onto the box.
    pub fn from_fn(
        m: usize,
        horizon: f64,
        bounds: ControlBounds,
        f: impl Fn(f64) -> [f64; 3],
    ) -> Result<Self> {
        let dt = horizon / m as f64;
        let mut u = Vec::with_capacity(m + 1);
        let mut n1 = Vec::with_capacity(m + 1);
        let mut n2 = Vec::with_capacity(m + 1);
        for s in 0..=m {
            let c = bounds.project(f(s as f64 * dt));
            u.push(c[0]);
            n1.push(c[1]);
            n2.push(c[2]);
        }
        Self::from_samples(u, n1, n2, horizon, bounds)
    }

    /// Validate and wrap nodal samples; rejects out-of-bound values.
    pub fn from_samples(
        u: Vec<f64>,
        n1: Vec<f64>,
        n2: Vec<f64>,
        horizon: f64,
        bounds: ControlBounds,
    ) -> Result<Self> {
        bounds.validate()?;
        if u.len() < 2 || u.len() != n1.len() || u.len() != n2.len() {
            return Err(Error::domain(format!(
                "sample sequences must have equal length >= 2, got {}/{}/{}",
                u.len(),
                n1.len(),
                n2.len()
            )));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::domain(format!("horizon must be positive, got {horizon}")));
        }
        let tol = 1e-12;
        let ok = u.iter().all(|&x| x.is_finite() && x.abs() <= bounds.u_max + tol)
            && n1.iter().chain(n2.iter()).all(|&x| {
                x.is_finite() && (-tol..=bounds.n_max + tol).contains(&x)
            });
        if !ok {
            return Err(Error::domain("control samples violate the box bounds".to_string()));
        }
        Ok(Self {
            horizon,
            window: horizon,
            u,
            n1,
            n2,
            bounds,
        })
    }

    /// Componentwise clamp of raw sample sequences onto the admissible box.
    pub fn project_box(
        u: Vec<f64>,
        n1: Vec<f64>,
        n2: Vec<f64>,
        horizon: f64,
        bounds: ControlBounds,
    ) -> Result<Self> {
        if u.len() < 2 || u.len() != n1.len() || u.len() != n2.len() {
            return Err(Error::domain(format!(
                "sample sequences must have equal length >= 2, got {}/{}/{}",
                u.len(),
                n1.len(),
                n2.len()
            )));
        }
        let u = u.into_iter().map(|x| bounds.clamp_u(x)).collect();
        let n1 = n1.into_iter().map(|x| bounds.clamp_n(x)).collect();
        let n2 = n2.into_iter().map(|x| bounds.clamp_n(x)).collect();
        Self::from_samples(u, n1, n2, horizon, bounds)
    }

    /// Front-loaded coherent control: piecewise linear on `[0, window]`,
    /// zero on `(window, horizon]`, incoherent controls identically zero.
    pub fn windowed_coherent(
        u: Vec<f64>,
        window: f64,
        horizon: f64,
        bounds: ControlBounds,
    ) -> Result<Self> {
        if !(window > 0.0 && window <= horizon) {
            return Err(Error::domain(format!(
                "window must satisfy 0 < window <= horizon, got {window} / {horizon}"
            )));
        }
        let len = u.len();
        let mut set = Self::from_samples(u, vec![0.0; len], vec![0.0; len], horizon, bounds)?;
        set.window = window;
        Ok(set)
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    /// Number of grid subintervals `M` (nodes minus one).
    pub fn subintervals(&self) -> usize {
        self.u.len() - 1
    }

    /// Grid step of the sampled span.
    pub fn dt(&self) -> f64 {
        self.window / self.subintervals() as f64
    }

    pub fn bounds(&self) -> ControlBounds {
        self.bounds
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn n1(&self) -> &[f64] {
        &self.n1
    }

    pub fn n2(&self) -> &[f64] {
        &self.n2
    }

    /// Nodal samples of one component (0 = u, 1 = n1, 2 = n2).
    pub fn component(&self, i: usize) -> &[f64] {
        match i {
            0 => &self.u,
            1 => &self.n1,
            _ => &self.n2,
        }
    }

    /// Grid node times over the sampled span.
    pub fn node_times(&self) -> impl Iterator<Item = f64> + '_ {
        let dt = self.dt();
        (0..self.u.len()).map(move |s| s as f64 * dt)
    }

    /// Evaluate the control triple at a time in `[0, horizon]` by linear
    /// interpolation; exact at grid nodes; zero beyond the sampled window.
    pub fn value_at(&self, t: f64) -> [f64; 3] {
        let t = t.clamp(0.0, self.horizon);
        if t > self.window {
            return [0.0, 0.0, 0.0];
        }
        let m = self.subintervals();
        let idx = t / self.window * m as f64;
        let near = idx.round();
        if (idx - near).abs() < 1e-9 {
            let s = (near as usize).min(m);
            return [self.u[s], self.n1[s], self.n2[s]];
        }
        let s = (idx.floor() as usize).min(m - 1);
        let w = idx - s as f64;
        let lerp = |a: f64, b: f64| a + w * (b - a);
        [
            lerp(self.u[s], self.u[s + 1]),
            lerp(self.n1[s], self.n1[s + 1]),
            lerp(self.n2[s], self.n2[s + 1]),
        ]
    }

    /// Serialize as CSV rows `t,u,n1,n2` with a header.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("t,u,n1,n2\n");
        for (s, t) in self.node_times().enumerate() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                t, self.u[s], self.n1[s], self.n2[s]
            ));
        }
        out
    }

    /// Parse CSV rows `t,u,n1,n2` (uniform grid required).
    pub fn from_csv_str(s: &str, bounds: ControlBounds) -> Result<Self> {
        let mut times = Vec::new();
        let mut u = Vec::new();
        let mut n1 = Vec::new();
        let mut n2 = Vec::new();
        for (i, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with('t')) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::domain(format!("CSV row {i} must have 4 fields")));
            }
            let parse = |f: &str| -> Result<f64> {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::domain(format!("CSV row {i}: {e}")))
            };
            times.push(parse(fields[0])?);
            u.push(parse(fields[1])?);
            n1.push(parse(fields[2])?);
            n2.push(parse(fields[3])?);
        }
        if times.len() < 2 {
            return Err(Error::domain("control CSV needs at least two rows".to_string()));
        }
        let horizon = *times.last().unwrap();
        let dt = horizon / (times.len() - 1) as f64;
        for (s, &t) in times.iter().enumerate() {
            if (t - s as f64 * dt).abs() > 1e-9 * horizon.max(1.0) {
                return Err(Error::domain("control CSV grid is not uniform".to_string()));
            }
        }
        Self::from_samples(u, n1, n2, horizon, bounds)
    }
}

/// Genome layout for the finite-dimensional (genetic) optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ControlLayout {
    /// All three controls sampled on `m` subintervals over a fixed horizon:
    /// genome `(u^0..u^M, n1^0..n1^M, n2^0..n2^M)` of length `3(M+1)`.
    Full { m: usize, horizon: f64 },
    /// Coherent control sampled on `m` subintervals over
    /// `[0, window_fraction * T]`, zero afterwards, incoherent controls
    /// zero, and the horizon `T` itself appended as the last gene:
    /// genome length `M + 2`.
    CoherentWindow {
        m: usize,
        window_fraction: f64,
        horizon_range: (f64, f64),
    },
}

impl ControlLayout {
    pub fn genome_len(&self) -> usize {
        match self {
            ControlLayout::Full { m, .. } => 3 * (m + 1),
            ControlLayout::CoherentWindow { m, .. } => m + 2,
        }
    }

    /// Per-gene lower/upper bounds.
    pub fn genome_bounds(&self, bounds: &ControlBounds) -> (Vec<f64>, Vec<f64>) {
        match self {
            ControlLayout::Full { m, .. } => {
                let nodes = m + 1;
                let mut lo = vec![-bounds.u_max; nodes];
                let mut hi = vec![bounds.u_max; nodes];
                lo.extend(std::iter::repeat(0.0).take(2 * nodes));
                hi.extend(std::iter::repeat(bounds.n_max).take(2 * nodes));
                (lo, hi)
            }
            ControlLayout::CoherentWindow { m, horizon_range, .. } => {
                let mut lo = vec![-bounds.u_max; m + 1];
                let mut hi = vec![bounds.u_max; m + 1];
                lo.push(horizon_range.0);
                hi.push(horizon_range.1);
                (lo, hi)
            }
        }
    }

    /// Genome of an existing control set (inverse of [`Self::decode`]).
    pub fn encode(&self, c: &ControlSet) -> Vec<f64> {
        match self {
            ControlLayout::Full { .. } => {
                let mut a = Vec::with_capacity(3 * c.u.len());
                a.extend_from_slice(&c.u);
                a.extend_from_slice(&c.n1);
                a.extend_from_slice(&c.n2);
                a
            }
            ControlLayout::CoherentWindow { .. } => {
                let mut a = c.u.clone();
                a.push(c.horizon);
                a
            }
        }
    }

    /// Build the control set a genome describes, clamping every gene to its
    /// bounds.
    pub fn decode(&self, genome: &[f64], bounds: ControlBounds) -> Result<ControlSet> {
        if genome.len() != self.genome_len() {
            return Err(Error::domain(format!(
                "genome length {} does not match layout ({} expected)",
                genome.len(),
                self.genome_len()
            )));
        }
        match self {
            ControlLayout::Full { m, horizon } => {
                let nodes = m + 1;
                ControlSet::project_box(
                    genome[..nodes].to_vec(),
                    genome[nodes..2 * nodes].to_vec(),
                    genome[2 * nodes..].to_vec(),
                    *horizon,
                    bounds,
                )
            }
            ControlLayout::CoherentWindow {
                m,
                window_fraction,
                horizon_range,
            } => {
                let nodes = m + 1;
                let horizon = genome[nodes].clamp(horizon_range.0, horizon_range.1);
                let u = genome[..nodes].iter().map(|&x| bounds.clamp_u(x)).collect();
                ControlSet::windowed_coherent(u, window_fraction * horizon, horizon, bounds)
            }
        }
    }
}

/// Mode of the control regularization carried by an objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RegularizationMode {
    #[default]
    None,
    /// `int_0^T (gamma_u u^2 + gamma_n (n1 + n2)) dt` (gradient methods).
    Integral,
    /// `gamma_u max_s |u^s| + gamma_n (max_s n1^s + max_s n2^s)`.
    SupNorm,
    /// `gamma_u max_s |u^s| + gamma_n sum_j max(max_s(|dn_j| - delta_j), 0)`.
    JumpPenalty,
}

/// Regularization coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegularizationSpec {
    pub gamma_u: f64,
    pub gamma_n: f64,
    /// Largest allowed nodal jumps of the incoherent controls
    /// (jump-penalty mode only).
    pub delta_n: [f64; 2],
    pub mode: RegularizationMode,
}

impl Default for RegularizationSpec {
    fn default() -> Self {
        Self {
            gamma_u: 0.0,
            gamma_n: 0.0,
            delta_n: [1.0, 1.0],
            mode: RegularizationMode::None,
        }
    }
}

impl RegularizationSpec {
    pub fn integral(gamma_u: f64, gamma_n: f64) -> Self {
        Self {
            gamma_u,
            gamma_n,
            mode: RegularizationMode::Integral,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.gamma_u < 0.0 || self.gamma_n < 0.0 {
            return Err(Error::domain("regularization coefficients must be >= 0".to_string()));
        }
        if self.delta_n.iter().any(|&d| d <= 0.0) {
            return Err(Error::domain("allowed jumps delta_n must be positive".to_string()));
        }
        Ok(())
    }

    /// Coefficients seen by the gradient: zero unless integral mode.
    pub(crate) fn integral_gammas(&self) -> (f64, f64) {
        match self.mode {
            RegularizationMode::Integral => (self.gamma_u, self.gamma_n),
            _ => (0.0, 0.0),
        }
    }
}

/// `int_0^T (gamma_u u^2(t) + gamma_n (n1(t) + n2(t))) dt` by the
/// trapezoidal rule on the control grid refined to `steps` subintervals.
pub fn regularization_integral(c: &ControlSet, spec: &RegularizationSpec, steps: usize) -> f64 {
    if spec.gamma_u == 0.0 && spec.gamma_n == 0.0 {
        return 0.0;
    }
    let steps = steps.max(c.subintervals());
    let h = c.horizon() / steps as f64;
    let integrand = |t: f64| {
        let [u, n1, n2] = c.value_at(t);
        spec.gamma_u * u * u + spec.gamma_n * (n1 + n2)
    };
    let mut acc = 0.5 * (integrand(0.0) + integrand(c.horizon()));
    for i in 1..steps {
        acc += integrand(i as f64 * h);
    }
    acc * h
}

/// `gamma_u max_s |u^s| + gamma_n (max_s n1^s + max_s n2^s)`.
pub fn regularization_supnorm(c: &ControlSet, spec: &RegularizationSpec) -> f64 {
    let max_abs = |xs: &[f64]| xs.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let max = |xs: &[f64]| xs.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    spec.gamma_u * max_abs(c.u()) + spec.gamma_n * (max(c.n1()) + max(c.n2()))
}

/// `gamma_u max_s |u^s|
///  + gamma_n sum_j max(max_s(|n_j^{s+1} - n_j^s| - delta_n^j), 0)`.
pub fn regularization_jumps(c: &ControlSet, spec: &RegularizationSpec) -> f64 {
    let max_abs = |xs: &[f64]| xs.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let mut penalty = 0.0;
    for (j, n) in [c.n1(), c.n2()].into_iter().enumerate() {
        let worst = n
            .windows(2)
            .map(|w| (w[1] - w[0]).abs() - spec.delta_n[j])
            .fold(f64::NEG_INFINITY, f64::max);
        penalty += worst.max(0.0);
    }
    spec.gamma_u * max_abs(c.u()) + spec.gamma_n * penalty
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn bounds() -> ControlBounds {
        ControlBounds::new(30.0, 10.0).unwrap()
    }

    #[test]
    fn projection_clamps_componentwise() {
        let b = bounds();
        let c = ControlSet::project_box(
            vec![35.0, -40.0, 1.0],
            vec![-0.2, 5.0, 12.0],
            vec![0.0, 0.0, 0.0],
            1.0,
            b,
        )
        .unwrap();
        assert_eq!(c.u(), &[30.0, -30.0, 1.0]);
        assert_eq!(c.n1(), &[0.0, 5.0, 10.0]);
    }

    #[test]
    fn projection_is_idempotent_and_nonexpansive() {
        let b = bounds();
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..500 {
            let n: usize = rng.gen_range(2..8);
            let raw: Vec<f64> = (0..n).map(|_| 80.0 * (rng.gen::<f64>() - 0.5)).collect();
            let raw2: Vec<f64> = (0..n).map(|_| 80.0 * (rng.gen::<f64>() - 0.5)).collect();
            let zero = vec![0.0; n];
            let pa =
                ControlSet::project_box(raw.clone(), zero.clone(), zero.clone(), 1.0, b).unwrap();
            let pb =
                ControlSet::project_box(raw2.clone(), zero.clone(), zero.clone(), 1.0, b).unwrap();
            let pp = ControlSet::project_box(pa.u().to_vec(), zero.clone(), zero.clone(), 1.0, b)
                .unwrap();
            assert_eq!(pa.u(), pp.u());
            let lhs = pa
                .u()
                .iter()
                .zip(pb.u())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max);
            let rhs = raw
                .iter()
                .zip(&raw2)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max);
            assert!(lhs <= rhs + 1e-12);
        }
    }

    #[test]
    fn interpolation_is_exact_at_nodes() {
        let b = bounds();
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let m = 13;
        let u: Vec<f64> = (0..=m).map(|_| 20.0 * (rng.gen::<f64>() - 0.5)).collect();
        let n1: Vec<f64> = (0..=m).map(|_| 10.0 * rng.gen::<f64>()).collect();
        let n2: Vec<f64> = (0..=m).map(|_| 10.0 * rng.gen::<f64>()).collect();
        let c = ControlSet::from_samples(u.clone(), n1.clone(), n2.clone(), 5.0, b).unwrap();
        for (s, t) in c.node_times().enumerate() {
            let v = c.value_at(t);
            assert_eq!(v[0], u[s]);
            assert_eq!(v[1], n1[s]);
            assert_eq!(v[2], n2[s]);
        }
        // midpoint of a linear segment
        let v = c.value_at(c.dt() * 0.5);
        assert!((v[0] - 0.5 * (u[0] + u[1])).abs() < 1e-12);
    }

    #[test]
    fn genome_round_trip_full_layout() {
        let b = ControlBounds::new(4.0, 4.0).unwrap();
        let layout = ControlLayout::Full { m: 10, horizon: 5.0 };
        assert_eq!(layout.genome_len(), 33);

        let zero = ControlSet::zeros(10, 5.0, b).unwrap();
        assert!(layout.encode(&zero).iter().all(|&x| x == 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..100 {
            let genome: Vec<f64> = (0..33)
                .map(|i| {
                    if i < 11 {
                        8.0 * (rng.gen::<f64>() - 0.5)
                    } else {
                        4.0 * rng.gen::<f64>()
                    }
                })
                .collect();
            let c = layout.decode(&genome, b).unwrap();
            let back = layout.encode(&c);
            assert_eq!(genome, back);
            let c2 = layout.decode(&back, b).unwrap();
            assert_eq!(c, c2);
        }
        assert!(layout.decode(&[0.0; 10], b).is_err());
    }

    #[test]
    fn genome_layout_coherent_window() {
        let b = ControlBounds::new(4.0, 4.0).unwrap();
        let layout = ControlLayout::CoherentWindow {
            m: 20,
            window_fraction: 0.3,
            horizon_range: (38.0, 40.0),
        };
        assert_eq!(layout.genome_len(), 22);
        let mut genome = vec![1.0; 21];
        genome.push(39.0);
        let c = layout.decode(&genome, b).unwrap();
        assert_eq!(c.horizon(), 39.0);
        assert!((c.window() - 0.3 * 39.0).abs() < 1e-12);
        assert_eq!(c.value_at(5.0)[0], 1.0);
        assert_eq!(c.value_at(20.0), [0.0, 0.0, 0.0]);
        assert_eq!(c.n1(), vec![0.0; 21].as_slice());
        assert_eq!(layout.encode(&c), genome);

        // decode clamps both the genes and the horizon
        let mut wild = vec![9.0; 21];
        wild.push(55.0);
        let c = layout.decode(&wild, b).unwrap();
        assert_eq!(c.horizon(), 40.0);
        assert!(c.u().iter().all(|&x| x == 4.0));
    }

    #[test]
    fn integral_regularization_reference_values() {
        let b = bounds();
        let zero = ControlSet::zeros(8, 5.0, b).unwrap();
        let spec = RegularizationSpec::integral(1.0, 1.0);
        assert_eq!(regularization_integral(&zero, &spec, 1000), 0.0);

        let unit_u = ControlSet::constant([1.0, 0.0, 0.0], 8, 5.0, b).unwrap();
        let spec = RegularizationSpec::integral(1.0, 0.0);
        assert!((regularization_integral(&unit_u, &spec, 1000) - 5.0).abs() < 1e-12);

        let any = ControlSet::constant([2.0, 1.0, 3.0], 8, 5.0, b).unwrap();
        let spec = RegularizationSpec::integral(0.0, 0.0);
        assert_eq!(regularization_integral(&any, &spec, 1000), 0.0);
    }

    #[test]
    fn supnorm_and_jump_regularization() {
        let b = ControlBounds::new(4.0, 4.0).unwrap();
        let spec = RegularizationSpec {
            gamma_u: 0.0,
            gamma_n: 0.01,
            delta_n: [1.0, 1.0],
            mode: RegularizationMode::JumpPenalty,
        };
        let mut n1 = vec![0.0; 11];
        n1[1] = 2.0;
        let c = ControlSet::from_samples(vec![0.0; 11], n1, vec![0.0; 11], 5.0, b).unwrap();
        assert!((regularization_jumps(&c, &spec) - 0.01).abs() < 1e-15);

        // all jumps within the allowed band contribute nothing
        let gentle = ControlSet::from_fn(10, 5.0, b, |t| [0.0, 0.1 * t, 0.0]).unwrap();
        assert_eq!(regularization_jumps(&gentle, &spec), 0.0);

        let spec = RegularizationSpec {
            gamma_u: 0.1,
            gamma_n: 0.0,
            delta_n: [1.0, 1.0],
            mode: RegularizationMode::SupNorm,
        };
        let zero_u = ControlSet::constant([0.0, 2.0, 1.0], 10, 5.0, b).unwrap();
        assert_eq!(regularization_supnorm(&zero_u, &spec), 0.0);
        let c = ControlSet::constant([3.0, 2.0, 1.0], 10, 5.0, b).unwrap();
        assert!((regularization_supnorm(&c, &spec) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn csv_round_trip() {
        let b = bounds();
        let c = ControlSet::from_fn(7, 3.0, b, |t| [t.sin(), 0.5 * t, 1.0]).unwrap();
        let csv = c.to_csv_string();
        let back = ControlSet::from_csv_str(&csv, b).unwrap();
        assert!((back.horizon() - 3.0).abs() < 1e-12);
        for (a, b) in c.u().iter().zip(back.u()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip_keeps_grid_samples_and_bounds() {
        let b = bounds();
        let c = ControlSet::from_fn(9, 4.0, b, |t| [2.0 * t.cos(), t, 0.5]).unwrap();
        let json = serde_json::to_string(&c).unwrap();
        let back: ControlSet = serde_json::from_str(&json).unwrap();
        assert_eq!(c, back);
        assert_eq!(back.bounds(), b);
    }

    #[test]
    fn out_of_bound_samples_are_rejected() {
        let b = ControlBounds::new(4.0, 4.0).unwrap();
        assert!(ControlSet::from_samples(vec![5.0, 0.0], vec![0.0; 2], vec![0.0; 2], 1.0, b).is_err());
        assert!(ControlSet::from_samples(vec![0.0; 2], vec![-0.5, 0.0], vec![0.0; 2], 1.0, b).is_err());
        assert!(ControlBounds::new(-1.0, 4.0).is_err());
    }
}
