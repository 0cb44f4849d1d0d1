//! Euclidean geometry on the boundary hyperplane `R^d`, `d <= 3`: volumes of
//! box-ball intersections and the fraction of a centered sphere that falls
//! inside an off-center ball.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::Quadrature;

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

// int_0^x sqrt(r^2 - s^2) ds for |x| <= r
fn half_chord_integral(x: f64, r: f64) -> f64 {
    let x = x.clamp(-r, r);
    0.5 * (x * (r * r - x * x).max(0.0).sqrt() + r * r * (x / r).clamp(-1.0, 1.0).asin())
}

// int_{-r}^{u} sqrt(r^2 - s^2) ds
fn chord_from_left(u: f64, r: f64) -> f64 {
    half_chord_integral(u, r) + 0.25 * PI * r * r
}

/// Area of the disk of radius `r` centered at the origin intersected with the
/// quadrant `{x <= a, y <= b}`.
fn disk_quadrant(a: f64, b: f64, r: f64) -> f64 {
    if r <= 0.0 || b <= -r || a <= -r {
        return 0.0;
    }
    let a = a.min(r);
    if b >= r {
        return 2.0 * chord_from_left(a, r);
    }
    let xs = (r * r - b * b).sqrt();
    if b >= 0.0 {
        // height h + min(b, h): 2h outside (-xs, xs), h + b inside
        let full = chord_from_left(a, r);
        let outer_left = chord_from_left(a.min(-xs), r);
        let outer_right = if a > xs {
            chord_from_left(a, r) - chord_from_left(xs, r)
        } else {
            0.0
        };
        let inner_len = (a.min(xs) + xs).max(0.0);
        full + outer_left + outer_right + b * inner_len
    } else {
        // height max(0, h - |b|), nonzero only inside (-xs, xs)
        let hi = a.clamp(-xs, xs);
        chord_from_left(hi, r) - chord_from_left(-xs, r) - b.abs() * (hi + xs)
    }
}

/// Area of `[lo0, hi0] x [lo1, hi1]` intersected with the disk of radius `r`
/// centered at the origin.
pub fn rect_disk_area(lo: [f64; 2], hi: [f64; 2], r: f64) -> f64 {
    let v = disk_quadrant(hi[0], hi[1], r) - disk_quadrant(lo[0], hi[1], r) - disk_quadrant(hi[0], lo[1], r)
        + disk_quadrant(lo[0], lo[1], r);
    v.max(0.0)
}

/// Volume of the box `[lo, hi]` intersected with the closed ball `B_r(center)`
/// in `R^d`, `d <= 3`.
pub fn box_ball_volume(lo: &[f64], hi: &[f64], center: &[f64], r: f64, quad: &Quadrature) -> Result<f64> {
    let d = lo.len();
    if r <= 0.0 {
        return Ok(0.0);
    }
    let l: Vec<f64> = lo.iter().zip(center).map(|(a, c)| a - c).collect();
    let h: Vec<f64> = hi.iter().zip(center).map(|(a, c)| a - c).collect();
    match d {
        1 => Ok((h[0].min(r) - l[0].max(-r)).max(0.0)),
        2 => Ok(rect_disk_area([l[0], l[1]], [h[0], h[1]], r)),
        3 => {
            let z0 = l[2].max(-r);
            let z1 = h[2].min(r);
            if z1 <= z0 {
                return Ok(0.0);
            }
            let mut breaks = vec![z0, z1, 0.0_f64.clamp(z0, z1)];
            // slices change shape where the slice radius crosses an edge or corner distance
            let xs = [l[0], h[0]];
            let ys = [l[1], h[1]];
            let mut kinks: Vec<f64> = xs.iter().chain(ys.iter()).map(|v| v.abs()).collect();
            for x in xs {
                for y in ys {
                    kinks.push((x * x + y * y).sqrt());
                }
            }
            for k in kinks {
                if k < r {
                    let z = (r * r - k * k).sqrt();
                    breaks.extend([z, -z].into_iter().filter(|v| *v > z0 && *v < z1));
                }
            }
            let est = quad.integrate_pieces(
                |z| {
                    let rz = (r * r - z * z).max(0.0).sqrt();
                    rect_disk_area([l[0], l[1]], [h[0], h[1]], rz)
                },
                &breaks,
            )?;
            Ok(est.value.max(0.0))
        }
        _ => Err(Error::Dimension {
            operation: "box-ball volume",
            n: d as u32 + 1,
        }),
    }
}

/// Radii `rho` at which `rho -> vol(box ∩ B_rho(center))` is not smooth.
pub fn box_kink_radii(lo: &[f64], hi: &[f64], center: &[f64]) -> Vec<f64> {
    let d = lo.len();
    let mut out = Vec::new();
    // every subset of coordinates, with each coordinate at either face
    for mask in 1u32..(1 << d) {
        let coords: Vec<usize> = (0..d).filter(|i| mask & (1 << i) != 0).collect();
        for choice in 0u32..(1 << coords.len()) {
            let mut s = 0.0;
            for (k, &i) in coords.iter().enumerate() {
                let face = if choice & (1 << k) != 0 { hi[i] } else { lo[i] };
                s += (face - center[i]).powi(2);
            }
            out.push(s.sqrt());
        }
    }
    out.retain(|r| *r > 0.0);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Distance from `center` to the box (zero if inside) and to its farthest corner.
pub fn box_distance_range(lo: &[f64], hi: &[f64], center: &[f64]) -> (f64, f64) {
    let mut near = 0.0;
    let mut far = 0.0;
    for i in 0..lo.len() {
        let c = center[i];
        let gap = if c < lo[i] {
            lo[i] - c
        } else if c > hi[i] {
            c - hi[i]
        } else {
            0.0
        };
        near += gap * gap;
        far += (lo[i] - c).abs().max((hi[i] - c).abs()).powi(2);
    }
    (near.sqrt(), far.sqrt())
}

/// Fraction of the sphere `|xi| = r` in `R^d` lying in the closed ball of radius
/// `rho` around a point at distance `dist` from the origin.
pub fn shell_fraction(d: usize, r: f64, dist: f64, rho: f64) -> Result<f64> {
    if dist == 0.0 || r == 0.0 {
        return Ok(if r <= rho + dist { 1.0 } else { 0.0 });
    }
    if r + dist <= rho {
        return Ok(1.0);
    }
    if (r - dist).abs() > rho {
        return Ok(0.0);
    }
    let cos = ((r * r + dist * dist - rho * rho) / (2.0 * r * dist)).clamp(-1.0, 1.0);
    match d {
        1 => {
            let inside = [r - dist, r + dist].iter().filter(|v| v.abs() <= rho).count();
            Ok(inside as f64 / 2.0)
        }
        2 => Ok(cos.acos() / PI),
        3 => Ok(0.5 * (1.0 - cos)),
        _ => Err(Error::Dimension {
            operation: "off-center radial ball mass",
            n: d as u32 + 1,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn disk_area_pieces() {
        let r = 1.3;
        let full = rect_disk_area([-2.0, -2.0], [2.0, 2.0], r);
        assert_relative_eq!(full, PI * r * r, max_relative = 1e-14);
        let quarter = rect_disk_area([0.0, 0.0], [2.0, 2.0], r);
        assert_relative_eq!(quarter, PI * r * r / 4.0, max_relative = 1e-14);
        // square inscribed in the disk
        let s = r / 2f64.sqrt();
        assert_relative_eq!(rect_disk_area([-s, -s], [s, s], r), 2.0 * r * r, max_relative = 1e-13);
    }

    #[test]
    fn disk_area_matches_brute_force() {
        let (lo, hi, r) = ([-0.3, 0.2], [0.9, 1.4], 1.0);
        let n = 2000;
        let mut count = 0usize;
        for i in 0..n {
            for j in 0..n {
                let x = lo[0] + (hi[0] - lo[0]) * (i as f64 + 0.5) / n as f64;
                let y = lo[1] + (hi[1] - lo[1]) * (j as f64 + 0.5) / n as f64;
                if x * x + y * y <= r * r {
                    count += 1;
                }
            }
        }
        let brute = count as f64 / (n * n) as f64 * (hi[0] - lo[0]) * (hi[1] - lo[1]);
        assert_relative_eq!(rect_disk_area(lo, hi, r), brute, max_relative = 2e-3);
    }

    #[test]
    fn ball_volume_in_three_dimensions() {
        let q = Quadrature::default();
        let v = box_ball_volume(&[-2.0; 3], &[2.0; 3], &[0.0; 3], 1.0, &q).unwrap();
        assert_relative_eq!(v, 4.0 * PI / 3.0, max_relative = 1e-10);
        let octant = box_ball_volume(&[0.0; 3], &[5.0; 3], &[0.0; 3], 2.0, &q).unwrap();
        assert_relative_eq!(octant, 4.0 * PI / 3.0, max_relative = 1e-10);
        let shifted = box_ball_volume(&[0.0; 3], &[1.0; 3], &[0.5; 3], 10.0, &q).unwrap();
        assert_relative_eq!(shifted, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn shell_fractions() {
        assert_eq!(shell_fraction(2, 0.5, 0.0, 1.0).unwrap(), 1.0);
        assert_relative_eq!(shell_fraction(2, 1.0, 1.0, 2f64.sqrt()).unwrap(), 0.5, max_relative = 1e-14);
        assert_relative_eq!(shell_fraction(3, 1.0, 1.0, 2f64.sqrt()).unwrap(), 0.5, max_relative = 1e-14);
        assert_eq!(shell_fraction(1, 1.0, 0.5, 0.6).unwrap(), 0.5);
        assert!(shell_fraction(4, 1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn kink_radii_of_unit_square() {
        let k = box_kink_radii(&[0.0, 0.0], &[1.0, 1.0], &[0.0, 0.0]);
        assert_eq!(k.len(), 2);
        assert_relative_eq!(k[1], 2f64.sqrt());
        assert_eq!(box_distance_range(&[1.0, 1.0], &[2.0, 2.0], &[0.0, 0.0]).0, 2f64.sqrt());
    }
}
