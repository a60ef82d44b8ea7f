//! Ridgelet units and finite ridgelet expansions.
//!
//! A unit with direction `u`, scale `a > 0` and shift `b` evaluates
//! `a^{-1/2} eta((x . u_hat - b) / a)` where `u_hat = u / |u|` and `eta` is
//! the mother ridgelet. The scale is stored as `log_scale = ln a` so that
//! unconstrained gradient steps keep it positive.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// Directions with a norm below this are rejected at evaluation time.
pub const MIN_DIRECTION_NORM: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MotherRidgelet {
    /// `t exp(-t^2 / 2)`
    #[default]
    GaussianDerivative,
    Tanh,
    Sine,
}

impl MotherRidgelet {
    pub fn eval(self, t: f64) -> f64 {
        match self {
            MotherRidgelet::GaussianDerivative => t * (-0.5 * t * t).exp(),
            MotherRidgelet::Tanh => t.tanh(),
            MotherRidgelet::Sine => t.sin(),
        }
    }

    pub fn derivative(self, t: f64) -> f64 {
        match self {
            MotherRidgelet::GaussianDerivative => (1.0 - t * t) * (-0.5 * t * t).exp(),
            MotherRidgelet::Tanh => {
                let th = t.tanh();
                1.0 - th * th
            }
            MotherRidgelet::Sine => t.cos(),
        }
    }
}

/// Partial derivatives of a single unit's output.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitGrad {
    pub direction: Vec<f64>,
    pub log_scale: f64,
    pub shift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeletUnit {
    pub direction: Vec<f64>,
    pub log_scale: f64,
    pub shift: f64,
}

struct Projection {
    norm: f64,
    /// `x . u_hat`
    proj: f64,
    inv_sqrt_scale: f64,
    scale: f64,
    t: f64,
}

impl RidgeletUnit {
    pub fn new(direction: Vec<f64>, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid(format!("ridgelet scale must be positive, got {scale}")));
        }
        Ok(RidgeletUnit {
            direction,
            log_scale: scale.ln(),
            shift,
        })
    }

    pub fn scale(&self) -> f64 {
        self.log_scale.exp()
    }

    pub fn input_dim(&self) -> usize {
        self.direction.len()
    }

    fn project(&self, x: &[f64]) -> Result<Projection> {
        check_len("ridgelet input", self.direction.len(), x.len())?;
        let norm = self.direction.iter().map(|u| u * u).sum::<f64>().sqrt();
        if norm.is_nan() || norm < MIN_DIRECTION_NORM {
            return Err(Error::DegenerateDirection(norm));
        }
        let dot: f64 = self.direction.iter().zip(x).map(|(u, x)| u * x).sum();
        let proj = dot / norm;
        let scale = self.log_scale.exp();
        Ok(Projection {
            norm,
            proj,
            inv_sqrt_scale: (-0.5 * self.log_scale).exp(),
            scale,
            t: (proj - self.shift) / scale,
        })
    }

    /// `a^{-1/2} eta((x . u_hat - b) / a)`
    pub fn eval(&self, mother: MotherRidgelet, x: &[f64]) -> Result<f64> {
        let p = self.project(x)?;
        Ok(p.inv_sqrt_scale * mother.eval(p.t))
    }

    pub fn eval_with_grad(&self, mother: MotherRidgelet, x: &[f64]) -> Result<(f64, UnitGrad)> {
        let p = self.project(x)?;
        let value = p.inv_sqrt_scale * mother.eval(p.t);
        let deta = mother.derivative(p.t);
        // dt/d(log a) = -t, d(a^{-1/2})/d(log a) = -a^{-1/2} / 2
        let d_log_scale = -0.5 * value - p.inv_sqrt_scale * deta * p.t;
        let d_t = p.inv_sqrt_scale * deta / p.scale;
        let d_shift = -d_t;
        // d(x . u/|u|)/du = (x - proj u_hat) / |u|
        let direction = self
            .direction
            .iter()
            .zip(x)
            .map(|(u, xi)| d_t * (xi - p.proj * u / p.norm) / p.norm)
            .collect();
        Ok((
            value,
            UnitGrad {
                direction,
                log_scale: d_log_scale,
                shift: d_shift,
            },
        ))
    }

    fn param_count(&self) -> usize {
        self.direction.len() + 2
    }
}

/// `J` ridgelet units sharing a mother ridgelet and input dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeletLayer {
    mother: MotherRidgelet,
    input_dim: usize,
    units: Vec<RidgeletUnit>,
}

impl RidgeletLayer {
    pub fn new(mother: MotherRidgelet, units: Vec<RidgeletUnit>) -> Result<Self> {
        let first = units
            .first()
            .ok_or_else(|| Error::invalid("a ridgelet layer needs at least one unit"))?;
        let input_dim = first.input_dim();
        if input_dim == 0 {
            return Err(Error::invalid("ridgelet input dimension must be positive"));
        }
        for unit in &units {
            check_len("ridgelet unit direction", input_dim, unit.input_dim())?;
        }
        Ok(RidgeletLayer {
            mother,
            input_dim,
            units,
        })
    }

    /// Random layer: directions uniform on the unit sphere, unit scale,
    /// shifts uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(
        input_dim: usize,
        num_units: usize,
        mother: MotherRidgelet,
        rng: &mut R,
    ) -> Result<Self> {
        if input_dim == 0 || num_units == 0 {
            return Err(Error::invalid("ridgelet layer dimensions must be positive"));
        }
        let shift_dist = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
        let units = (0..num_units)
            .map(|_| {
                let direction = random_unit_vector(input_dim, rng);
                RidgeletUnit {
                    direction,
                    log_scale: 0.0,
                    shift: shift_dist.sample(rng),
                }
            })
            .collect();
        Self::new(mother, units)
    }

    pub fn mother(&self) -> MotherRidgelet {
        self.mother
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn num_units(&self) -> usize {
        self.units.len()
    }

    pub fn units(&self) -> &[RidgeletUnit] {
        &self.units
    }

    pub fn units_mut(&mut self) -> &mut [RidgeletUnit] {
        &mut self.units
    }

    /// Unweighted unit outputs `(eta_1(x), ..., eta_J(x))`.
    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("ridgelet input", self.input_dim, x.len())?;
        self.units.iter().map(|u| u.eval(self.mother, x)).collect()
    }

    pub fn features_with_grad(&self, x: &[f64]) -> Result<(Vec<f64>, Vec<UnitGrad>)> {
        check_len("ridgelet input", self.input_dim, x.len())?;
        self.units
            .iter()
            .map(|u| u.eval_with_grad(self.mother, x))
            .collect::<Result<Vec<_>>>()
            .map(|v| v.into_iter().unzip())
    }

    /// Finite expansion `g_J(x) = sum_i c_i eta_i(x)`.
    pub fn expansion(&self, weights: &[f64], x: &[f64]) -> Result<f64> {
        check_len("ridgelet weights", self.units.len(), weights.len())?;
        let feats = self.features(x)?;
        Ok(weights.iter().zip(&feats).map(|(c, f)| c * f).sum())
    }

    pub fn param_count(&self) -> usize {
        self.units.iter().map(RidgeletUnit::param_count).sum()
    }

    /// Appends `[direction.., log_scale, shift]` for every unit.
    pub fn write_params(&self, out: &mut Vec<f64>) {
        for u in &self.units {
            out.extend_from_slice(&u.direction);
            out.push(u.log_scale);
            out.push(u.shift);
        }
    }

    /// Inverse of [`RidgeletLayer::write_params`]; returns the number of values consumed.
    pub fn read_params(&mut self, src: &[f64]) -> usize {
        let mut k = 0;
        for u in &mut self.units {
            let d = u.direction.len();
            u.direction.copy_from_slice(&src[k..k + d]);
            u.log_scale = src[k + d];
            u.shift = src[k + d + 1];
            k += d + 2;
        }
        k
    }

    /// Adds `sum_i upstream_i * d eta_i` into `out`, laid out as in `write_params`.
    pub fn accumulate_grad(&self, grads: &[UnitGrad], upstream: &[f64], out: &mut [f64]) {
        let mut k = 0;
        for (g, &w) in grads.iter().zip(upstream) {
            for (o, d) in out[k..].iter_mut().zip(&g.direction) {
                *o += w * d;
            }
            let d = g.direction.len();
            out[k + d] += w * g.log_scale;
            out[k + d + 1] += w * g.shift;
            k += d + 2;
        }
    }
}

fn random_unit_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng as _;

    use super::*;
    use crate::seeded_rng;

    fn e1(dim: usize) -> Vec<f64> {
        let mut v = vec![0.0; dim];
        v[0] = 1.0;
        v
    }

    #[test]
    fn mother_values() {
        let gd = MotherRidgelet::GaussianDerivative;
        assert_eq!(gd.eval(0.0), 0.0);
        assert_abs_diff_eq!(gd.eval(1.0), (-0.5f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(gd.eval(1.0), 0.60653, epsilon = 1e-5);
        assert_eq!(MotherRidgelet::Tanh.eval(0.0), 0.0);
        assert_eq!(MotherRidgelet::Sine.eval(0.0), 0.0);
    }

    #[test]
    fn unit_values() {
        let gd = MotherRidgelet::GaussianDerivative;
        let unit = RidgeletUnit::new(e1(3), 1.0, 0.0).unwrap();
        assert_eq!(unit.eval(gd, &[0.0; 3]).unwrap(), 0.0);
        let unit = RidgeletUnit::new(e1(3), 4.0, 0.0).unwrap();
        let v = unit.eval(gd, &[4.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(v, 0.5 * (-0.5f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn unit_errors() {
        let gd = MotherRidgelet::GaussianDerivative;
        let unit = RidgeletUnit::new(e1(3), 1.0, 0.0).unwrap();
        assert!(matches!(unit.eval(gd, &[0.0; 2]), Err(Error::Shape { .. })));
        let flat = RidgeletUnit::new(vec![0.0; 3], 1.0, 0.0).unwrap();
        assert!(matches!(flat.eval(gd, &[1.0; 3]), Err(Error::DegenerateDirection(_))));
        assert!(RidgeletUnit::new(e1(2), 0.0, 0.0).is_err());
        assert!(RidgeletUnit::new(e1(2), -1.0, 0.0).is_err());
    }

    #[test]
    fn feature_at_shift_is_zero() {
        let mut rng = seeded_rng(3);
        let layer = RidgeletLayer::random(4, 3, MotherRidgelet::GaussianDerivative, &mut rng).unwrap();
        let u = &layer.units()[0];
        let x: Vec<f64> = u.direction.iter().map(|d| d * u.shift).collect();
        assert_abs_diff_eq!(layer.features(&x).unwrap()[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn expansion_edge_cases() {
        let mut rng = seeded_rng(5);
        let layer = RidgeletLayer::random(8, 5, MotherRidgelet::Tanh, &mut rng).unwrap();
        let x = [0.3, -0.1, 0.8, 0.2, 0.0, 1.0, -0.5, 0.4];
        assert_eq!(layer.expansion(&[0.0; 5], &x).unwrap(), 0.0);
        assert!(matches!(layer.expansion(&[1.0; 4], &x), Err(Error::Shape { .. })));

        let single = RidgeletLayer::new(MotherRidgelet::Tanh, vec![layer.units()[2].clone()]).unwrap();
        let v = single.units()[0].eval(MotherRidgelet::Tanh, &x).unwrap();
        assert_eq!(single.expansion(&[1.7], &x).unwrap(), 1.7 * v);
    }

    #[test]
    fn wide_layer_features_are_finite() {
        let mut rng = seeded_rng(11);
        let layer = RidgeletLayer::random(8, 32, MotherRidgelet::GaussianDerivative, &mut rng).unwrap();
        for _ in 0..50 {
            let x: Vec<f64> = (0..8).map(|_| rng.random_range(-5.0..5.0)).collect();
            let f = layer.features(&x).unwrap();
            assert_eq!(f.len(), 32);
            assert!(f.iter().all(|v| v.is_finite()));
        }
    }

    #[test]
    fn layer_rejects_empty_and_ragged() {
        assert!(RidgeletLayer::new(MotherRidgelet::Tanh, vec![]).is_err());
        let units = vec![
            RidgeletUnit::new(e1(2), 1.0, 0.0).unwrap(),
            RidgeletUnit::new(e1(3), 1.0, 0.0).unwrap(),
        ];
        assert!(RidgeletLayer::new(MotherRidgelet::Tanh, units).is_err());
    }

    #[test]
    fn params_round_trip() {
        let mut rng = seeded_rng(2);
        let layer = RidgeletLayer::random(3, 4, MotherRidgelet::Sine, &mut rng).unwrap();
        let mut flat = Vec::new();
        layer.write_params(&mut flat);
        assert_eq!(flat.len(), layer.param_count());
        let mut other = RidgeletLayer::random(3, 4, MotherRidgelet::Sine, &mut rng).unwrap();
        assert_eq!(other.read_params(&flat), flat.len());
        assert_eq!(other, layer);
    }

    #[test]
    fn unit_grad_matches_central_differences() {
        let mut rng = seeded_rng(9);
        for mother in [
            MotherRidgelet::GaussianDerivative,
            MotherRidgelet::Tanh,
            MotherRidgelet::Sine,
        ] {
            let layer = RidgeletLayer::random(4, 1, mother, &mut rng).unwrap();
            let mut unit = layer.units()[0].clone();
            unit.log_scale = 0.3;
            unit.direction[1] *= 1.7;
            let x = [0.4, -0.2, 0.9, 0.1];
            let (_, g) = unit.eval_with_grad(mother, &x).unwrap();
            let h = 1e-6;
            let (mut p, mut m) = (unit.clone(), unit.clone());
            p.shift += h;
            m.shift -= h;
            let fd = (p.eval(mother, &x).unwrap() - m.eval(mother, &x).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(g.shift, fd, epsilon = 1e-8);
            let (mut p, mut m) = (unit.clone(), unit.clone());
            p.log_scale += h;
            m.log_scale -= h;
            let fd = (p.eval(mother, &x).unwrap() - m.eval(mother, &x).unwrap()) / (2.0 * h);
            assert_abs_diff_eq!(g.log_scale, fd, epsilon = 1e-8);
            for i in 0..4 {
                let (mut p, mut m) = (unit.clone(), unit.clone());
                p.direction[i] += h;
                m.direction[i] -= h;
                let fd = (p.eval(mother, &x).unwrap() - m.eval(mother, &x).unwrap()) / (2.0 * h);
                assert_abs_diff_eq!(g.direction[i], fd, epsilon = 1e-8);
            }
        }
    }

    proptest! {
        #[test]
        fn direction_scaling_invariance(
            dir in proptest::collection::vec(-3.0f64..3.0, 4),
            x in proptest::collection::vec(-3.0f64..3.0, 4),
            log_scale in -1.0f64..1.0,
            shift in -1.0f64..1.0,
        ) {
            prop_assume!(dir.iter().map(|d| d * d).sum::<f64>() > 1e-6);
            let unit = RidgeletUnit { direction: dir.clone(), log_scale, shift };
            let doubled = RidgeletUnit {
                direction: dir.iter().map(|d| 2.0 * d).collect(),
                log_scale,
                shift,
            };
            let gd = MotherRidgelet::GaussianDerivative;
            let a = unit.eval(gd, &x).unwrap();
            let b = doubled.eval(gd, &x).unwrap();
            prop_assert!((a - b).abs() <= 1e-12);
        }

        #[test]
        fn expansion_is_linear_in_weights(
            seed in 0u64..1000,
            c1 in proptest::collection::vec(-2.0f64..2.0, 6),
            c2 in proptest::collection::vec(-2.0f64..2.0, 6),
        ) {
            let mut rng = seeded_rng(seed);
            let layer = RidgeletLayer::random(3, 6, MotherRidgelet::GaussianDerivative, &mut rng).unwrap();
            let x = [0.2, 0.7, -0.4];
            let sum: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| a + b).collect();
            let lhs = layer.expansion(&sum, &x).unwrap();
            let rhs = layer.expansion(&c1, &x).unwrap() + layer.expansion(&c2, &x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10);
        }

        #[test]
        fn gaussian_derivative_is_bounded(t in -1e3f64..1e3) {
            let bound = (-0.5f64).exp();
            prop_assert!(MotherRidgelet::GaussianDerivative.eval(t).abs() <= bound + 1e-15);
        }
    }
}
