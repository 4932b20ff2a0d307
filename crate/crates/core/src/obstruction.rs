//! Dimension lower bounds for regular maps from the sign class of the
//! covering: powers of w₁ over Z/2 and of its Bockstein over Z.

use rayon::prelude::*;
use serde::Serialize;

use crate::cochain::{cup_power, is_coboundary, Cochain};
use crate::complex::SimplicialComplex;
use crate::covering::{build_config_rips, w1, RipsParams};
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, Tolerance};
use crate::persistence::Ring;

/// Largest `t <= t_max` with `w₁^t` not a coboundary on `k`; 0 when `w₁`
/// itself is one.
pub fn sw_power_max_t(k: &SimplicialComplex, w1: &Cochain, t_max: usize) -> usize {
    let w1 = w1.reduce_mod2();
    let mut best = 0;
    for t in 1..=t_max {
        let Some(dim) = k.dim() else { break };
        if t > dim {
            break;
        }
        let power = match cup_power(&w1, t, k) {
            Ok(p) => p,
            Err(_) => break,
        };
        match is_coboundary(&power, k) {
            Ok(cert) if !cert.is_coboundary => best = t,
            _ => {}
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bockstein {
    pub c1: Cochain,
    pub nonzero: bool,
}

/// `c₁ = δ(w̃₁)/2` for the 0/1 integral lift `w̃₁` of `w₁`.
pub fn bockstein_c1(k: &SimplicialComplex, w1: &Cochain, multiplicity: usize) -> Result<Bockstein> {
    if multiplicity != 2 {
        return Err(Error::NotK2(multiplicity));
    }
    let lifted = w1.reduce_mod2().lift_to_integers();
    let d = lifted.coboundary(k);
    let odd: Vec<usize> = d
        .support()
        .filter(|(_, v)| v % 2 != 0)
        .flat_map(|(s, _)| s.clone())
        .collect();
    if !odd.is_empty() {
        return Err(Error::OddCoboundary(odd));
    }
    let halves = d
        .support()
        .map(|(s, v)| (s.clone(), v / 2))
        .collect::<Vec<_>>();
    let c1 = Cochain::from_values(2, Ring::Z, w1.scale, halves)?;
    let nonzero = !is_coboundary(&c1, k)?.is_coboundary;
    Ok(Bockstein { c1, nonzero })
}

/// Largest `t <= t_max` with `c₁^t` not an integral coboundary on `k`.
pub fn chern_power_max_t(k: &SimplicialComplex, c1: &Cochain, t_max: usize) -> Result<usize> {
    let mut best = 0;
    let dim = k.dim().unwrap_or(0);
    for t in 1..=t_max {
        if 2 * t > dim {
            break;
        }
        let power = cup_power(c1, t, k)?;
        if !is_coboundary(&power, k)?.is_coboundary {
            best = t;
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScaleRecord {
    pub r_prime: f64,
    pub scale: f64,
    pub vertices: usize,
    pub simplices: usize,
    pub w1_nonzero: bool,
    /// Largest nonvanishing power of w₁ (reported for every k).
    pub w1_power_t: usize,
    pub t_real: Option<usize>,
    pub t_complex: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub k: usize,
    pub r: f64,
    pub delta: f64,
    pub r_grid: Vec<f64>,
    pub t_max: usize,
    pub per_scale: Vec<ScaleRecord>,
    pub n_lb_real: Option<usize>,
    pub n_lb_complex: Option<usize>,
    pub dual_class_bound_available: bool,
    pub excluded_triangles: usize,
    /// Answer on the discrete quotient `Conf_k(X, r)/Σ_k`, where every
    /// positive-degree class vanishes.
    pub discrete_model_t: usize,
    pub warnings: Vec<String>,
}

/// Evaluates the classes on the configuration-Rips model at every scale
/// `r + r'` and aggregates the bounds `N >= sup t + k`.
pub fn obstruction_report(
    x: &FiniteMetricSpace,
    k: usize,
    r: f64,
    delta: f64,
    r_grid: &[f64],
    t_max: usize,
    budget: u64,
    tol: Tolerance,
) -> Result<ObstructionReport> {
    let bound_available = k <= 2;
    let mut report = ObstructionReport {
        k,
        r,
        delta,
        r_grid: r_grid.to_vec(),
        t_max,
        per_scale: Vec::new(),
        n_lb_real: bound_available.then_some(k),
        n_lb_complex: bound_available.then_some(k),
        dual_class_bound_available: bound_available,
        excluded_triangles: 0,
        discrete_model_t: 0,
        warnings: Vec::new(),
    };
    if !bound_available {
        report.warnings.push(format!(
            "k = {k}: only w1 is computed; the dual-class bound is unavailable"
        ));
    }
    if r_grid.is_empty() {
        report
            .warnings
            .push("empty radius grid: bound defaults to N >= k".into());
        return Ok(report);
    }
    let scales: Vec<f64> = r_grid.iter().map(|rp| r + rp).collect();
    let dim_cap = if k == 2 { 2 * t_max + 1 } else { t_max + 1 };
    let (model, g) = build_config_rips(
        x,
        k,
        delta,
        &scales,
        RipsParams {
            dim_cap: dim_cap.max(2),
            budget,
            tol,
        },
    )?;
    report.excluded_triangles = model.excluded_triangles.len();
    if report.excluded_triangles > 0 {
        report.warnings.push(format!(
            "{} triangles violated the cocycle condition and were excluded",
            report.excluded_triangles
        ));
    }
    let w = w1(&g);
    let records = r_grid
        .par_iter()
        .zip(&scales)
        .map(|(&rp, &s)| -> Result<ScaleRecord> {
            let snap = model.snapshot(s, tol);
            let cocycle = w.to_cochain(&model, s, tol);
            let w1_nonzero = snap.count(1) > 0 && !is_coboundary(&cocycle, &snap)?.is_coboundary;
            let w1_power_t = sw_power_max_t(&snap, &cocycle, t_max);
            let t_complex = if k == 2 {
                let b = bockstein_c1(&snap, &cocycle, 2)?;
                Some(if b.nonzero {
                    chern_power_max_t(&snap, &b.c1, t_max)?
                } else {
                    0
                })
            } else if k == 1 {
                Some(0)
            } else {
                None
            };
            Ok(ScaleRecord {
                r_prime: rp,
                scale: s,
                vertices: snap.count(0),
                simplices: snap.total_count(),
                w1_nonzero,
                w1_power_t,
                t_real: bound_available.then_some(w1_power_t),
                t_complex,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if bound_available {
        report.n_lb_real = Some(records.iter().filter_map(|r| r.t_real).max().unwrap_or(0) + k);
        report.n_lb_complex = Some(
            records
                .iter()
                .filter_map(|r| r.t_complex)
                .max()
                .unwrap_or(0)
                + k,
        );
    }
    report.per_scale = records;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::sample_circle;

    fn rp2() -> SimplicialComplex {
        let tris = [
            [0, 1, 2],
            [0, 2, 3],
            [0, 3, 4],
            [0, 4, 5],
            [0, 1, 5],
            [1, 2, 4],
            [2, 3, 5],
            [1, 3, 4],
            [2, 4, 5],
            [1, 3, 5],
        ];
        SimplicialComplex::from_simplices(tris.iter().map(|t| t.to_vec()))
    }

    fn rp2_generator(k: &SimplicialComplex) -> Cochain {
        crate::cochain::cohomology_basis_z2(k, 1).remove(0)
    }

    #[test]
    fn rp2_powers() {
        let k = rp2();
        let a = rp2_generator(&k);
        assert_eq!(sw_power_max_t(&k, &a, 4), 2);
        let b = bockstein_c1(&k, &a, 2).unwrap();
        assert!(b.nonzero);
        assert!(is_coboundary(&b.c1.scaled(2), &k).unwrap().is_coboundary);
    }

    #[test]
    fn zero_class() {
        let k = rp2();
        let z = Cochain::zero(1, Ring::Z2, None);
        assert_eq!(sw_power_max_t(&k, &z, 3), 0);
        let b = bockstein_c1(&k, &z, 2).unwrap();
        assert!(b.c1.is_zero() && !b.nonzero);
        assert!(matches!(bockstein_c1(&k, &z, 3), Err(Error::NotK2(3))));
    }

    #[test]
    fn two_point_space() {
        let x = FiniteMetricSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 5.0], vec![5.0, 0.0]],
        )
        .unwrap();
        let rep = obstruction_report(&x, 2, 1.0, 1.0, &[0.0], 2, 1_000_000, Tolerance::default())
            .unwrap();
        assert_eq!(rep.per_scale[0].vertices, 1);
        assert_eq!(rep.n_lb_real, Some(2));
    }

    #[test]
    fn empty_grid_warns() {
        let x = sample_circle(6, 6.0).unwrap();
        let rep =
            obstruction_report(&x, 2, 1.0, 1.0, &[], 2, 1_000_000, Tolerance::default()).unwrap();
        assert_eq!(rep.n_lb_real, Some(2));
        assert!(!rep.warnings.is_empty());
    }

    #[test]
    fn twelve_circle_bound() {
        let x = sample_circle(12, 12.0).unwrap();
        let rep = obstruction_report(
            &x,
            2,
            1.0,
            1.0,
            &[0.0, 1.0],
            2,
            1_000_000,
            Tolerance::default(),
        )
        .unwrap();
        assert_eq!(rep.per_scale[0].t_real, Some(1));
        assert_eq!(rep.per_scale[0].t_complex, Some(0));
        assert_eq!(rep.n_lb_real, Some(3));
        assert_eq!(rep.excluded_triangles, 0);
    }

    #[test]
    fn k3_is_partial() {
        let x = sample_circle(9, 9.0).unwrap();
        let rep = obstruction_report(&x, 3, 1.0, 1.0, &[0.0], 1, 1_000_000, Tolerance::default())
            .unwrap();
        assert_eq!(rep.n_lb_real, None);
        assert!(!rep.dual_class_bound_available);
        assert!(rep.per_scale[0].t_real.is_none());
    }
}
