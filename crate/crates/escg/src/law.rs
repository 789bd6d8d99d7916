//! Scalar 2D conservation laws with their entropy machinery.
//!
//! Every built-in law uses the quadratic entropy eta(u) = u^2/2, so the
//! entropy variable is the identity, V = u. Entropy fluxes are normalized to
//! g(0) = 0, which makes the constant g(0).n term of the boundary estimate
//! vanish and reduces the admissible penalty to the plain clamp.
//!
//! The rotation law carries the spatially varying advection field
//! a(x, y) = 2 pi (y, -x): divergence-free, tangent to the unit circle, and
//! one full (clockwise) revolution takes exactly t = 1.

use crate::{Error, Result};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Law {
    /// u_t + a u_x + b u_y = 0 with constant speed (a, b).
    Advection { a: f64, b: f64 },
    /// u_t + div(a(x,y) u) = 0 with a(x,y) = 2 pi (y, -x).
    Rotation,
    /// u_t + (u^2/2)_x + (u^2/2)_y = 0.
    Burgers,
    /// u_t + (cos u)_x + u_y = 0.
    CosFlux,
}

impl Law {
    /// Parse a law name: `advection(a,b)`, `rotation`, `burgers2d`, `cosflux`.
    pub fn by_name(name: &str) -> Result<Law> {
        let s = name.trim();
        let lower = s.to_ascii_lowercase();
        if let Some(rest) = lower.strip_prefix("advection") {
            let inner = rest
                .trim()
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| {
                    Error::Config(format!("advection law needs speeds, e.g. advection(1,0): got '{s}'"))
                })?;
            let mut parts = inner.split(',');
            let mut speed = [0.0f64; 2];
            for v in speed.iter_mut() {
                *v = parts
                    .next()
                    .ok_or_else(|| Error::Config("advection needs two speeds".into()))?
                    .trim()
                    .parse()
                    .map_err(|_| Error::Config(format!("bad advection speed in '{s}'")))?;
            }
            if parts.next().is_some() {
                return Err(Error::Config("advection takes exactly two speeds".into()));
            }
            return Ok(Law::Advection {
                a: speed[0],
                b: speed[1],
            });
        }
        match lower.as_str() {
            "rotation" => Ok(Law::Rotation),
            "burgers2d" => Ok(Law::Burgers),
            "cosflux" => Ok(Law::CosFlux),
            other => Err(Error::Config(format!("unknown conservation law '{other}'"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Law::Advection { a, b } => format!("advection({a},{b})"),
            Law::Rotation => "rotation".into(),
            Law::Burgers => "burgers2d".into(),
            Law::CosFlux => "cosflux".into(),
        }
    }

    /// Advection field of the rotation law.
    pub fn rotation_field(x: [f64; 2]) -> [f64; 2] {
        [TWO_PI * x[1], -TWO_PI * x[0]]
    }

    /// Flux f(u) at position x (position only matters for `Rotation`).
    pub fn flux(&self, u: f64, x: [f64; 2]) -> [f64; 2] {
        match self {
            Law::Advection { a, b } => [a * u, b * u],
            Law::Rotation => {
                let a = Self::rotation_field(x);
                [a[0] * u, a[1] * u]
            }
            Law::Burgers => [0.5 * u * u, 0.5 * u * u],
            Law::CosFlux => [u.cos(), u],
        }
    }

    /// Componentwise flux Jacobian f'(u).
    pub fn jacobian(&self, u: f64, x: [f64; 2]) -> [f64; 2] {
        match self {
            Law::Advection { a, b } => [*a, *b],
            Law::Rotation => Self::rotation_field(x),
            Law::Burgers => [u, u],
            Law::CosFlux => [-u.sin(), 1.0],
        }
    }

    /// Convex entropy eta(u) = u^2/2 for every built-in law.
    pub fn entropy(&self, u: f64) -> f64 {
        0.5 * u * u
    }

    /// Entropy variable V = eta'(u) = u.
    pub fn entropy_var(&self, u: f64) -> f64 {
        u
    }

    /// Inverse of the entropy-variable map.
    pub fn state_from_entropy_var(&self, v: f64) -> f64 {
        v
    }

    /// Entropy flux g with g(0) = 0 and g_j' = V f_j'.
    pub fn entropy_flux(&self, u: f64, x: [f64; 2]) -> [f64; 2] {
        match self {
            Law::Advection { a, b } => [0.5 * a * u * u, 0.5 * b * u * u],
            Law::Rotation => {
                let a = Self::rotation_field(x);
                [0.5 * a[0] * u * u, 0.5 * a[1] * u * u]
            }
            Law::Burgers => [u * u * u / 3.0, u * u * u / 3.0],
            Law::CosFlux => [u * u.cos() - u.sin(), 0.5 * u * u],
        }
    }

    /// Flux potential Theta with Theta_j' = f_j and g = V f - Theta.
    pub fn flux_potential(&self, u: f64, x: [f64; 2]) -> [f64; 2] {
        match self {
            Law::Advection { a, b } => [0.5 * a * u * u, 0.5 * b * u * u],
            Law::Rotation => {
                let a = Self::rotation_field(x);
                [0.5 * a[0] * u * u, 0.5 * a[1] * u * u]
            }
            Law::Burgers => [u * u * u / 6.0, u * u * u / 6.0],
            Law::CosFlux => [u.sin(), 0.5 * u * u],
        }
    }

    pub fn normal_flux(&self, u: f64, x: [f64; 2], n: [f64; 2]) -> f64 {
        debug_assert!(((n[0] * n[0] + n[1] * n[1]).sqrt() - 1.0).abs() < 1e-12);
        let f = self.flux(u, x);
        f[0] * n[0] + f[1] * n[1]
    }

    pub fn normal_entropy_flux(&self, u: f64, x: [f64; 2], n: [f64; 2]) -> f64 {
        debug_assert!(((n[0] * n[0] + n[1] * n[1]).sqrt() - 1.0).abs() < 1e-12);
        let g = self.entropy_flux(u, x);
        g[0] * n[0] + g[1] * n[1]
    }

    /// Euclidean norm of f'(u) at x; the wave speed used for CFL control.
    pub fn wave_speed(&self, u: f64, x: [f64; 2]) -> f64 {
        let j = self.jacobian(u, x);
        (j[0] * j[0] + j[1] * j[1]).sqrt()
    }

    /// All built-in laws, for parametrized test suites.
    pub fn builtins() -> Vec<Law> {
        vec![
            Law::Advection { a: 1.0, b: 0.0 },
            Law::Rotation,
            Law::Burgers,
            Law::CosFlux,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Fourth-order central difference, good to ~1e-12 for these fluxes.
    fn diff4(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let h = 1e-3;
        (-f(x + 2.0 * h) + 8.0 * f(x + h) - 8.0 * f(x - h) + f(x - 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn entropy_flux_compatibility_on_all_builtins() {
        // g_j'(u) = eta'(u) f_j'(u) at 200 sampled states.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        for law in Law::builtins() {
            for _ in 0..200 {
                let u: f64 = rng.gen_range(-2.0..2.0);
                let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let jac = law.jacobian(u, x);
                for j in 0..2 {
                    let dg = diff4(|w| law.entropy_flux(w, x)[j], u);
                    let lhs = law.entropy_var(u) * jac[j];
                    assert!(
                        (dg - lhs).abs() < 1e-10,
                        "{} component {j} at u={u}: {dg} vs {lhs}",
                        law.name()
                    );
                }
            }
        }
    }

    #[test]
    fn flux_potential_identities() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for law in Law::builtins() {
            for _ in 0..100 {
                let v: f64 = rng.gen_range(-2.0..2.0);
                let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let u = law.state_from_entropy_var(v);
                let f = law.flux(u, x);
                let g = law.entropy_flux(u, x);
                let theta = law.flux_potential(u, x);
                for j in 0..2 {
                    // g = V f - Theta
                    assert!((g[j] - (v * f[j] - theta[j])).abs() < 1e-10, "{}", law.name());
                    // Theta' = f by central differences
                    let h = 1e-6;
                    let dtheta = (law.flux_potential(u + h, x)[j]
                        - law.flux_potential(u - h, x)[j])
                        / (2.0 * h);
                    assert!((dtheta - f[j]).abs() < 1e-8, "{}", law.name());
                }
            }
        }
    }

    #[test]
    fn entropy_is_convex_and_round_trips() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        for law in Law::builtins() {
            for _ in 0..50 {
                let u: f64 = rng.gen_range(-3.0..3.0);
                let h = 1e-4;
                let second =
                    (law.entropy(u + h) - 2.0 * law.entropy(u) + law.entropy(u - h)) / (h * h);
                assert!(second > 0.0);
                let v = law.entropy_var(u);
                assert_eq!(law.entropy_var(law.state_from_entropy_var(v)), v);
            }
        }
    }

    #[test]
    fn entropy_flux_vanishes_at_zero() {
        for law in Law::builtins() {
            let g = law.entropy_flux(0.0, [0.3, -0.4]);
            assert_eq!(g, [0.0, 0.0], "{}", law.name());
        }
    }

    #[test]
    fn burgers_entropy_pair_values() {
        let law = Law::Burgers;
        assert_eq!(law.flux(2.0, [0.0, 0.0]), [2.0, 2.0]);
        assert_eq!(law.jacobian(2.0, [0.0, 0.0]), [2.0, 2.0]);
        assert_eq!(law.entropy(2.0), 2.0);
        let g = law.entropy_flux(2.0, [0.0, 0.0]);
        assert!((g[0] - 8.0 / 3.0).abs() < 1e-15 && (g[1] - 8.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn advection_flux_and_entropy_variable() {
        let law = Law::by_name("advection(1,0)").unwrap();
        assert_eq!(law.flux(0.7, [0.0, 0.0]), [0.7, 0.0]);
        assert_eq!(law.entropy_var(0.7), 0.7);
    }

    #[test]
    fn cosflux_compatibility_at_a_point() {
        let law = Law::CosFlux;
        let u = 0.7f64;
        let h = 1e-6;
        let x = [0.0, 0.0];
        let fd = (law.entropy_flux(u + h, x)[0] - law.entropy_flux(u - h, x)[0]) / (2.0 * h);
        assert!((fd - (-u * u.sin())).abs() < 1e-8);
    }

    #[test]
    fn normal_flux_examples() {
        let b = Law::Burgers;
        assert!((b.normal_flux(1.0, [0.0; 2], [1.0, 0.0]) - 0.5).abs() < 1e-15);
        assert!((b.normal_entropy_flux(1.0, [0.0; 2], [1.0, 0.0]) - 1.0 / 3.0).abs() < 1e-15);
        let c = Law::CosFlux;
        let u = std::f64::consts::FRAC_PI_2;
        assert!((c.normal_flux(u, [0.0; 2], [0.0, 1.0]) - u).abs() < 1e-15);
        let a = Law::Advection { a: 0.3, b: -0.4 };
        assert!((a.normal_flux(0.0, [0.0; 2], [0.6, 0.8]) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn rotation_field_is_divergence_free_and_tangent_to_the_circle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..100 {
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let x = [th.cos(), th.sin()];
            let a = Law::rotation_field(x);
            assert!((a[0] * x[0] + a[1] * x[1]).abs() < 1e-12);
            // divergence by finite differences
            let h = 1e-5;
            let div = (Law::rotation_field([x[0] + h, x[1]])[0]
                - Law::rotation_field([x[0] - h, x[1]])[0])
                / (2.0 * h)
                + (Law::rotation_field([x[0], x[1] + h])[1]
                    - Law::rotation_field([x[0], x[1] - h])[1])
                    / (2.0 * h);
            assert!(div.abs() < 1e-9);
        }
    }

    #[test]
    fn wave_speed_examples() {
        assert!((Law::Burgers.wave_speed(2.0, [0.0; 2]) - 2.0 * 2.0f64.sqrt()).abs() < 1e-14);
        assert!((Law::CosFlux.wave_speed(0.0, [0.0; 2]) - 1.0).abs() < 1e-15);
        assert!((Law::Advection { a: 1.0, b: 0.0 }.wave_speed(9.9, [0.0; 2]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn law_names_parse_and_reject() {
        assert_eq!(Law::by_name("burgers2d").unwrap(), Law::Burgers);
        assert_eq!(Law::by_name("rotation").unwrap(), Law::Rotation);
        assert_eq!(
            Law::by_name("advection(2.0, -1.5)").unwrap(),
            Law::Advection { a: 2.0, b: -1.5 }
        );
        assert!(Law::by_name("euler").is_err());
        assert!(Law::by_name("advection").is_err());
        assert!(Law::by_name("advection(1)").is_err());
    }
}
