//! Discretized curves in the control manifold.

use std::f64::consts::TAU;

use super::HolonomyError;

/// An ordered list of parameter samples. Consecutive samples are joined by
/// straight segments in parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterPath {
    samples: Vec<Vec<f64>>,
    closed: bool,
    /// Sample indices of segment boundaries (for example jump locations).
    markers: Vec<usize>,
    label: String,
}

impl ParameterPath {
    pub fn new(samples: Vec<Vec<f64>>, closed: bool) -> Result<Self, HolonomyError> {
        if samples.len() < 2 {
            return Err(HolonomyError::Domain("a path needs at least two samples".into()));
        }
        let d = samples[0].len();
        if samples.iter().any(|s| s.len() != d) {
            return Err(HolonomyError::Domain("path samples have inconsistent dimension".into()));
        }
        if samples.iter().flatten().any(|x| !x.is_finite()) {
            return Err(HolonomyError::Domain("path samples must be finite".into()));
        }
        if closed && samples.first() != samples.last() {
            return Err(HolonomyError::Domain(
                "closed path must end exactly at its first sample".into(),
            ));
        }
        Ok(Self {
            samples,
            closed,
            markers: Vec::new(),
            label: String::new(),
        })
    }

    /// Samples `curve(u)` at `steps + 1` points, `u_k = reparam(k / steps)`.
    pub fn from_curve(
        curve: impl Fn(f64) -> Vec<f64>,
        reparam: impl Fn(f64) -> f64,
        steps: usize,
        closed: bool,
    ) -> Result<Self, HolonomyError> {
        let mut samples: Vec<Vec<f64>> = (0..=steps).map(|k| curve(reparam(k as f64 / steps as f64))).collect();
        if closed {
            samples[steps] = samples[0].clone();
        }
        Self::new(samples, closed)
    }

    /// Sphere latitude at polar angle `theta`, azimuth `phi0 -> phi1`.
    /// Open in chart coordinates even when it closes on the sphere.
    pub fn latitude(theta: f64, phi0: f64, phi1: f64, steps: usize) -> Result<Self, HolonomyError> {
        let path = Self::from_curve(|u| vec![theta, phi0 + (phi1 - phi0) * u], |u| u, steps, false)?;
        Ok(path.with_label(format!("latitude(theta={theta})")))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_markers(mut self, markers: Vec<usize>) -> Result<Self, HolonomyError> {
        if markers.windows(2).any(|w| w[0] >= w[1]) {
            return Err(HolonomyError::Domain("markers must be strictly increasing".into()));
        }
        if markers.last().is_some_and(|&m| m >= self.samples.len()) {
            return Err(HolonomyError::Range("marker beyond the last sample".into()));
        }
        self.markers = markers;
        Ok(self)
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn markers(&self) -> &[usize] {
        &self.markers
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.samples[0].len()
    }

    /// Midpoint and displacement of segment `k` (samples `k -> k+1`).
    pub fn segment(&self, k: usize) -> (Vec<f64>, Vec<f64>) {
        let (a, b) = (&self.samples[k], &self.samples[k + 1]);
        let mid = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
        let delta = a.iter().zip(b).map(|(x, y)| y - x).collect();
        (mid, delta)
    }

    /// Piecewise-linear point at `u in [0, 1]`, uniform in sample index.
    pub fn point_at(&self, u: f64) -> Vec<f64> {
        let segs = self.segment_count() as f64;
        let x = (u.clamp(0.0, 1.0) * segs).min(segs);
        let k = (x.floor() as usize).min(self.segment_count() - 1);
        let w = x - k as f64;
        let (a, b) = (&self.samples[k], &self.samples[k + 1]);
        a.iter().zip(b).map(|(p, q)| p + w * (q - p)).collect()
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        let n = samples.len();
        let markers = self.markers.iter().rev().map(|&m| n - 1 - m).collect();
        Self {
            samples,
            closed: self.closed,
            markers,
            label: format!("reverse({})", self.label),
        }
    }

    /// `self` followed by `next`; `next` must start where `self` ends.
    pub fn concat(&self, next: &Self) -> Result<Self, HolonomyError> {
        if self.samples.last() != next.samples.first() {
            return Err(HolonomyError::Domain("concatenated paths do not meet".into()));
        }
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&next.samples[1..]);
        let closed = samples.first() == samples.last();
        Ok(Self {
            samples,
            closed,
            markers: Vec::new(),
            label: format!("{}+{}", self.label, next.label),
        })
    }

    /// Sub-path over samples `start..=end`.
    pub fn slice(&self, start: usize, end: usize) -> Result<Self, HolonomyError> {
        if start >= end || end >= self.samples.len() {
            return Err(HolonomyError::Range(format!(
                "slice {start}..={end} of a {}-sample path",
                self.len()
            )));
        }
        Self::new(self.samples[start..=end].to_vec(), false)
    }
}

/// A sphere gate loop: down the meridian `phi = 0`, once around the
/// latitude `theta`, back up the meridian `phi = 2 pi`, then across the pole
/// to the starting chart point. Only the latitude leg carries geometric phase.
#[derive(Debug, Clone)]
pub struct SphereLoop {
    pub path: ParameterPath,
    pub theta: f64,
    /// Sample indices where the latitude leg starts and ends.
    pub latitude_start: usize,
    pub latitude_end: usize,
}

impl SphereLoop {
    pub fn new(theta: f64, latitude_steps: usize, meridian_steps: usize) -> Result<Self, HolonomyError> {
        if latitude_steps == 0 || meridian_steps == 0 {
            return Err(HolonomyError::Domain(
                "sphere loop needs at least one step per leg".into(),
            ));
        }
        let m = meridian_steps as f64;
        let mut samples = Vec::new();
        for k in 0..meridian_steps {
            samples.push(vec![theta * k as f64 / m, 0.0]);
        }
        let latitude_start = samples.len();
        for k in 0..latitude_steps {
            samples.push(vec![theta, TAU * k as f64 / latitude_steps as f64]);
        }
        let latitude_end = samples.len();
        for k in 0..meridian_steps {
            samples.push(vec![theta * (1.0 - k as f64 / m), TAU]);
        }
        for k in 0..=meridian_steps {
            samples.push(vec![0.0, TAU * (1.0 - k as f64 / m)]);
        }
        let path = ParameterPath::new(samples, true)?.with_label(format!("sphere-loop(theta={theta})"));
        Ok(Self {
            path,
            theta,
            latitude_start,
            latitude_end,
        })
    }

    /// Sample index at fraction `f in [0, 1]` of the latitude leg.
    pub fn latitude_index(&self, f: f64) -> usize {
        let steps = (self.latitude_end - self.latitude_start) as f64;
        self.latitude_start + (f.clamp(0.0, 1.0) * steps).round() as usize
    }
}
