//! Quadrature rules for the reference triangle and the unit segment.
//!
//! Triangle rules are symmetric Gauss-type tables with positive weights for
//! orders 1-6 and a collapsed (Duffy) Gauss-Legendre tensor rule for orders
//! 7-8. Segment rules are Gauss-Legendre on [0,1] with nodes computed by
//! Newton iteration, so no tabulated abscissae are needed.
//!
//! Weights follow the reference measure: triangle weights sum to 1/2, segment
//! weights to 1. Points are stored in barycentric coordinates for triangles.

use crate::{Error, Result};

/// Quadrature rule on the reference triangle, points in barycentric form.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    /// Weights summing to the reference area 1/2.
    pub weights: Vec<f64>,
    /// Total polynomial degree integrated exactly.
    pub degree: usize,
}

/// Quadrature rule on the unit segment [0,1].
#[derive(Debug, Clone)]
pub struct SegmentRule {
    pub points: Vec<f64>,
    /// Weights summing to 1.
    pub weights: Vec<f64>,
    pub degree: usize,
}

impl TriangleRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Integrate a function given in barycentric coordinates over the
    /// reference triangle.
    pub fn integrate(&self, mut f: impl FnMut([f64; 3]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }
}

impl SegmentRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(t, w)| w * f(*t))
            .sum()
    }
}

const MAX_ORDER: usize = 8;

fn check_order(order: usize) -> Result<()> {
    if order < 1 || order > MAX_ORDER {
        return Err(Error::Config(format!(
            "quadrature order {order} unsupported (valid range 1..={MAX_ORDER})"
        )));
    }
    Ok(())
}

/// Symmetric rule on the reference triangle exact for total degree `order`.
pub fn triangle_rule(order: usize) -> Result<TriangleRule> {
    check_order(order)?;
    let rule = match order {
        1 => centroid_rule(),
        2 => orbit_rule(2, &[(Orbit::Three(1.0 / 6.0), 1.0 / 3.0)]),
        3 | 4 => orbit_rule(
            4,
            &[
                (Orbit::Three(0.445948490915965), 0.223381589678011),
                (Orbit::Three(0.091576213509771), 0.109951743655322),
            ],
        ),
        5 => orbit_rule(
            5,
            &[
                (Orbit::Centroid, 0.225),
                (Orbit::Three(0.470142064105115), 0.132394152788506),
                (Orbit::Three(0.101286507323456), 0.125939180544827),
            ],
        ),
        6 => orbit_rule(
            6,
            &[
                (Orbit::Three(0.249286745170910), 0.116786275726379),
                (Orbit::Three(0.063089014491502), 0.050844906370207),
                (
                    Orbit::Six(0.310352451033785, 0.053145049844816),
                    0.082851075618374,
                ),
            ],
        ),
        7 | 8 => duffy_rule(5, 8),
        _ => unreachable!(),
    };
    Ok(rule)
}

/// Minimal-point symmetric rule of the given (odd) degree, used for the
/// deliberately under-integrated mass matrix. These classical tables have
/// fewer points than dim P^p, which is what makes the reduced mass matrix
/// defective; the degree-3 and degree-7 rules carry a negative centroid
/// weight.
pub fn reduced_triangle_rule(order: usize) -> Result<TriangleRule> {
    match order {
        1 => Ok(centroid_rule()),
        3 => Ok(orbit_rule(
            3,
            &[
                (Orbit::Centroid, -27.0 / 48.0),
                (Orbit::Three(0.2), 25.0 / 48.0),
            ],
        )),
        5 => triangle_rule(5),
        7 => Ok(orbit_rule(
            7,
            &[
                (Orbit::Centroid, -0.149570044467670),
                (Orbit::Three(0.260345966079038), 0.175615257433204),
                (Orbit::Three(0.065130102902216), 0.053347235608839),
                (
                    Orbit::Six(0.312865496004875, 0.048690315425316),
                    0.077113760890257,
                ),
            ],
        )),
        _ => Err(Error::Config(format!(
            "no reduced triangle rule of order {order} (supported: 1, 3, 5, 7)"
        ))),
    }
}

/// Gauss-Legendre rule on [0,1] exact for degree `order`.
pub fn segment_rule(order: usize) -> Result<SegmentRule> {
    check_order(order)?;
    Ok(gauss_legendre_unit(order / 2 + 1))
}

/// Gauss-Legendre rule on [0,1] with `n` points (exact degree 2n-1).
/// Nodes from Newton iteration on P_n; accurate to machine precision.
pub fn gauss_legendre_unit(n: usize) -> SegmentRule {
    assert!(n >= 1);
    let mut points = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev-based initial guess on [-1,1].
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        points.push(0.5 * (x + 1.0));
        weights.push(0.5 * w);
    }
    SegmentRule {
        points,
        weights,
        degree: 2 * n - 1,
    }
}

/// Value and derivative of the Legendre polynomial P_n at x via the
/// three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Collapsed-coordinate tensor rule: maps an n_xi x n_eta Gauss-Legendre grid
/// on the unit square onto the triangle via (x,y) = (xi(1-eta), eta), picking
/// up the Jacobian (1-eta). Exact for total degree d when n_xi >= (d+1)/2 and
/// n_eta >= (d+2)/2; all weights positive.
pub fn duffy_rule(n: usize, degree: usize) -> TriangleRule {
    duffy_rule_nm(n, n, degree)
}

/// Duffy rule with separate point counts per direction. A monomial x^a y^b
/// maps to degree a in xi and a+b+1 in eta, so the rule is exact for total
/// degree d iff 2 n_xi - 1 >= d and 2 n_eta - 1 >= d + 1.
pub fn duffy_rule_nm(n_xi: usize, n_eta: usize, degree: usize) -> TriangleRule {
    let gx = gauss_legendre_unit(n_xi);
    let gy = gauss_legendre_unit(n_eta);
    let mut points = Vec::with_capacity(n_xi * n_eta);
    let mut weights = Vec::with_capacity(n_xi * n_eta);
    for (xi, wx) in gx.points.iter().zip(&gx.weights) {
        for (eta, wy) in gy.points.iter().zip(&gy.weights) {
            let x = xi * (1.0 - eta);
            let y = *eta;
            points.push([1.0 - x - y, x, y]);
            weights.push(wx * wy * (1.0 - eta));
        }
    }
    TriangleRule {
        points,
        weights,
        degree,
    }
}

enum Orbit {
    Centroid,
    /// Permutations of (1-2a, a, a).
    Three(f64),
    /// Permutations of (1-a-b, a, b) with a != b.
    Six(f64, f64),
}

fn centroid_rule() -> TriangleRule {
    TriangleRule {
        points: vec![[1.0 / 3.0; 3]],
        weights: vec![0.5],
        degree: 1,
    }
}

/// Expand symmetric orbits into explicit points. Orbit weights are given per
/// point, normalized so all weights over the triangle sum to 1; they are
/// scaled by the reference area 1/2 here.
fn orbit_rule(degree: usize, orbits: &[(Orbit, f64)]) -> TriangleRule {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    for (orbit, w) in orbits {
        let w = 0.5 * w;
        match *orbit {
            Orbit::Centroid => {
                points.push([1.0 / 3.0; 3]);
                weights.push(w);
            }
            Orbit::Three(a) => {
                let c = 1.0 - 2.0 * a;
                for perm in [[c, a, a], [a, c, a], [a, a, c]] {
                    points.push(perm);
                    weights.push(w);
                }
            }
            Orbit::Six(a, b) => {
                let c = 1.0 - a - b;
                for perm in [
                    [c, a, b],
                    [c, b, a],
                    [a, c, b],
                    [b, c, a],
                    [a, b, c],
                    [b, a, c],
                ] {
                    points.push(perm);
                    weights.push(w);
                }
            }
        }
    }
    TriangleRule {
        points,
        weights,
        degree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact moment of a barycentric monomial over the reference triangle
    /// (area 1/2): integral of l1^a l2^b l3^c = a! b! c! / (a+b+c+2)!.
    fn bary_moment(a: usize, b: usize, c: usize) -> f64 {
        fn fact(n: usize) -> f64 {
            (1..=n).map(|k| k as f64).product()
        }
        fact(a) * fact(b) * fact(c) / fact(a + b + c + 2)
    }

    fn check_exactness(rule: &TriangleRule, degree: usize, tol: f64) {
        for a in 0..=degree {
            for b in 0..=(degree - a) {
                for c in 0..=(degree - a - b) {
                    if a + b + c > degree {
                        continue;
                    }
                    let q = rule.integrate(|l| l[0].powi(a as i32) * l[1].powi(b as i32) * l[2].powi(c as i32));
                    let exact = bary_moment(a, b, c);
                    assert!(
                        (q - exact).abs() <= tol,
                        "moment l^({a},{b},{c}) off by {:e} for degree-{degree} rule",
                        (q - exact).abs()
                    );
                }
            }
        }
    }

    #[test]
    fn triangle_rules_hit_their_moments() {
        for order in 1..=8 {
            let rule = triangle_rule(order).unwrap();
            assert!(rule.degree >= order);
            check_exactness(&rule, rule.degree, 1e-13);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 0.5).abs() < 1e-13, "weights of order {order}");
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for p in &rule.points {
                assert!((p[0] + p[1] + p[2] - 1.0).abs() < 1e-14);
                assert!(p.iter().all(|&l| l >= 0.0));
            }
        }
    }

    #[test]
    fn reduced_rules_are_exact_at_their_degree_and_not_above() {
        for order in [1usize, 3, 5, 7] {
            let rule = reduced_triangle_rule(order).unwrap();
            check_exactness(&rule, order, 1e-13);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 0.5).abs() < 1e-13);
            // Some monomial of degree order+1 must be misintegrated.
            let d = order + 1;
            let mut worst = 0.0f64;
            for a in 0..=d {
                for b in 0..=(d - a) {
                    let c = d - a - b;
                    let q = rule.integrate(|l| {
                        l[0].powi(a as i32) * l[1].powi(b as i32) * l[2].powi(c as i32)
                    });
                    worst = worst.max((q - bary_moment(a, b, c)).abs());
                }
            }
            assert!(worst > 1e-10, "order-{order} reduced rule is too exact");
        }
    }

    #[test]
    fn reduced_rule_point_counts_stay_minimal() {
        assert_eq!(reduced_triangle_rule(1).unwrap().len(), 1);
        assert_eq!(reduced_triangle_rule(3).unwrap().len(), 4);
        assert_eq!(reduced_triangle_rule(5).unwrap().len(), 7);
        assert_eq!(reduced_triangle_rule(7).unwrap().len(), 13);
    }

    #[test]
    fn unit_area_and_named_moments() {
        // triangle_rule(1): integral of 1 = 1/2.
        let r1 = triangle_rule(1).unwrap();
        assert!((r1.integrate(|_| 1.0) - 0.5).abs() < 1e-15);
        // triangle_rule(5): integral of x^2 y^3 with x = l2, y = l3 is
        // 2! 3! / 7! = 1/420.
        let r5 = triangle_rule(5).unwrap();
        let q = r5.integrate(|l| l[1] * l[1] * l[2] * l[2] * l[2]);
        assert!((q - 1.0 / 420.0).abs() < 1e-14);
    }

    #[test]
    fn segment_rules_integrate_monomials() {
        for order in 1..=8 {
            let rule = segment_rule(order).unwrap();
            for k in 0..=rule.degree {
                let q = rule.integrate(|t| t.powi(k as i32));
                let exact = 1.0 / (k as f64 + 1.0);
                assert!((q - exact).abs() < 1e-14, "t^{k} with order {order}");
            }
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 1.0).abs() < 1e-14);
        }
        // segment_rule(5) on [0,1]: integral of t^5 = 1/6.
        let r5 = segment_rule(5).unwrap();
        assert!((r5.integrate(|t| t.powi(5)) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn high_point_gauss_legendre_is_accurate() {
        // 20-point rule against a closed-form integral of a smooth function.
        let g = gauss_legendre_unit(20);
        let q = g.integrate(|t| (3.0 * t).cos());
        assert!((q - (3.0f64).sin() / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_orders() {
        assert!(triangle_rule(0).is_err());
        assert!(triangle_rule(9).is_err());
        assert!(segment_rule(0).is_err());
        assert!(reduced_triangle_rule(4).is_err());
    }

    #[test]
    fn duffy_rule_matches_table_rules() {
        let duffy = duffy_rule(4, 6);
        check_exactness(&duffy, 6, 1e-14);
        // asymmetric point counts: exact through degree 7, not degree 8
        let nm = duffy_rule_nm(4, 5, 7);
        check_exactness(&nm, 7, 1e-14);
        let q = nm.integrate(|l| l[1].powi(8));
        assert!((q - bary_moment(0, 8, 0)).abs() > 1e-10);
    }
}
