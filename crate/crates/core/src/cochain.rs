//! Simplicial cochains over Z/2 and Z: coboundary, Alexander–Whitney cup
//! product, restriction, and coboundary membership with certificates.

use std::collections::BTreeMap;

use crate::complex::{faces, Simplex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::linalg::smith::solve_integer;
use crate::linalg::z2::{bitset_from, Z2Matrix};
use crate::persistence::{coboundary_matrix, Ring};

/// A cochain on oriented simplices (vertex order = increasing index).
///
/// `scale` records the radius of the snapshot the cochain lives on, when it
/// comes from a filtration.
#[derive(Clone, Debug, PartialEq)]
pub struct Cochain {
    pub degree: usize,
    pub ring: Ring,
    pub scale: Option<f64>,
    values: BTreeMap<Simplex, i64>,
}

impl Cochain {
    pub fn zero(degree: usize, ring: Ring, scale: Option<f64>) -> Self {
        Cochain {
            degree,
            ring,
            scale,
            values: BTreeMap::new(),
        }
    }

    pub fn from_values<I>(degree: usize, ring: Ring, scale: Option<f64>, values: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Simplex, i64)>,
    {
        let mut c = Cochain::zero(degree, ring, scale);
        for (mut s, v) in values {
            s.sort_unstable();
            if s.len() != degree + 1 {
                return Err(Error::InvalidArgument(format!(
                    "simplex {s:?} does not have degree {degree}"
                )));
            }
            c.add_at(s, v);
        }
        Ok(c)
    }

    fn normalize(&self, v: i64) -> i64 {
        match self.ring {
            Ring::Z2 => v.rem_euclid(2),
            Ring::Z => v,
        }
    }

    fn add_at(&mut self, s: Simplex, v: i64) {
        let cur = self.values.get(&s).copied().unwrap_or(0);
        let new = self.normalize(cur + v);
        if new == 0 {
            self.values.remove(&s);
        } else {
            self.values.insert(s, new);
        }
    }

    pub fn get(&self, s: &[usize]) -> i64 {
        self.values.get(s).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = (&Simplex, i64)> {
        self.values.iter().map(|(s, &v)| (s, v))
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn with_scale(mut self, scale: Option<f64>) -> Self {
        self.scale = scale;
        self
    }

    fn check_compatible(&self, other: &Cochain) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        match (self.scale, other.scale) {
            (Some(a), Some(b)) if a != b => Err(Error::ScaleMismatch(a, b)),
            _ => Ok(()),
        }
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::InvalidArgument("degree mismatch in sum".into()));
        }
        let mut out = self.clone();
        for (s, v) in other.support() {
            out.add_at(s.clone(), v);
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: i64) -> Cochain {
        let mut out = Cochain::zero(self.degree, self.ring, self.scale);
        for (s, v) in self.support() {
            out.add_at(s.clone(), v * factor);
        }
        out
    }

    /// Reinterprets a Z/2 cochain as an integral 0/1 cochain.
    pub fn lift_to_integers(&self) -> Cochain {
        Cochain {
            ring: Ring::Z,
            ..self.clone()
        }
    }

    pub fn reduce_mod2(&self) -> Cochain {
        let mut out = Cochain::zero(self.degree, Ring::Z2, self.scale);
        for (s, v) in self.support() {
            out.add_at(s.clone(), v);
        }
        out
    }

    /// Restriction to the simplices of `k`.
    pub fn restrict(&self, k: &SimplicialComplex, scale: Option<f64>) -> Cochain {
        Cochain {
            degree: self.degree,
            ring: self.ring,
            scale,
            values: self
                .values
                .iter()
                .filter(|(s, _)| k.contains(s))
                .map(|(s, &v)| (s.clone(), v))
                .collect(),
        }
    }

    /// `(δc)(v_0..v_{p+1}) = Σ (-1)^i c(v_0..v̂_i..v_{p+1})`.
    pub fn coboundary(&self, k: &SimplicialComplex) -> Cochain {
        let mut out = Cochain::zero(self.degree + 1, self.ring, self.scale);
        for s in k.simplices(self.degree + 1) {
            let mut acc = 0i64;
            for (i, f) in faces(s).enumerate() {
                let v = self.get(&f);
                acc += if i % 2 == 0 { v } else { -v };
            }
            out.add_at(s.clone(), acc);
        }
        out
    }

    pub fn is_cocycle(&self, k: &SimplicialComplex) -> bool {
        self.coboundary(k).is_zero()
    }

    pub fn to_dense(&self, k: &SimplicialComplex) -> Vec<i64> {
        k.simplices(self.degree)
            .iter()
            .map(|s| self.get(s))
            .collect()
    }

    pub fn from_dense(
        k: &SimplicialComplex,
        degree: usize,
        ring: Ring,
        scale: Option<f64>,
        values: &[i64],
    ) -> Cochain {
        let mut c = Cochain::zero(degree, ring, scale);
        for (s, &v) in k.simplices(degree).iter().zip(values) {
            c.add_at(s.clone(), v);
        }
        c
    }
}

/// `(a⌣b)(v_0..v_{p+q}) = a(v_0..v_p) · b(v_p..v_{p+q})`.
pub fn cup_product(a: &Cochain, b: &Cochain, k: &SimplicialComplex) -> Result<Cochain> {
    a.check_compatible(b)?;
    let (p, q) = (a.degree, b.degree);
    let mut out = Cochain::zero(p + q, a.ring, a.scale.or(b.scale));
    if a.is_zero() || b.is_zero() {
        return Ok(out);
    }
    for s in k.simplices(p + q) {
        let front = a.get(&s[..=p]);
        if front == 0 {
            continue;
        }
        let back = b.get(&s[p..]);
        if back != 0 {
            out.add_at(s.clone(), front * back);
        }
    }
    Ok(out)
}

/// `a⌣a⌣...⌣a` (`t >= 1` factors).
pub fn cup_power(a: &Cochain, t: usize, k: &SimplicialComplex) -> Result<Cochain> {
    assert!(t >= 1, "cup power needs at least one factor");
    let mut acc = a.clone();
    for _ in 1..t {
        acc = cup_product(&acc, a, k)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoboundaryCertificate {
    pub is_coboundary: bool,
    /// `x` with `δx = z`, when it exists.
    pub primitive: Option<Cochain>,
}

/// Decides whether the cocycle `z` is a coboundary on `k`, returning a
/// primitive when it is.
pub fn is_coboundary(z: &Cochain, k: &SimplicialComplex) -> Result<CoboundaryCertificate> {
    if !z.is_cocycle(k) {
        return Err(Error::NotACocycle(z.degree));
    }
    let restricted = z.restrict(k, z.scale);
    if restricted != *z {
        return Err(Error::InvalidArgument(
            "cochain is supported outside the complex".into(),
        ));
    }
    if z.degree == 0 {
        let zero = z.is_zero();
        return Ok(CoboundaryCertificate {
            is_coboundary: zero,
            primitive: zero.then(|| z.clone()),
        });
    }
    let q = z.degree;
    let primitive = match z.ring {
        Ring::Z2 => {
            let rows: Vec<Vec<usize>> = k
                .coboundary_rows(q - 1)
                .into_iter()
                .map(|r| r.into_iter().map(|(j, _)| j).collect())
                .collect();
            let m = Z2Matrix::from_sparse_rows(k.count(q - 1), &rows);
            let dense = z.to_dense(k);
            let b = bitset_from(
                k.count(q),
                dense
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0)
                    .map(|(i, _)| i),
            );
            m.solve(&b).map(|x| {
                let vals: Vec<i64> = (0..k.count(q - 1))
                    .map(|i| i64::from(x.contains(i)))
                    .collect();
                Cochain::from_dense(k, q - 1, Ring::Z2, z.scale, &vals)
            })
        }
        Ring::Z => {
            let m = coboundary_matrix(k, q - 1);
            solve_integer(&m, &z.to_dense(k))?
                .map(|x| Cochain::from_dense(k, q - 1, Ring::Z, z.scale, &x))
        }
    };
    Ok(CoboundaryCertificate {
        is_coboundary: primitive.is_some(),
        primitive,
    })
}

/// Representative cocycles of a basis of `H^q(k; Z/2)`.
pub fn cohomology_basis_z2(k: &SimplicialComplex, q: usize) -> Vec<Cochain> {
    let up_rows: Vec<Vec<usize>> = k
        .coboundary_rows(q)
        .into_iter()
        .map(|r| r.into_iter().map(|(j, _)| j).collect())
        .collect();
    let up = Z2Matrix::from_sparse_rows(k.count(q), &up_rows);
    let cocycles = up.kernel_basis();
    let picked = if q == 0 {
        (0..cocycles.len()).collect()
    } else {
        let down_rows: Vec<Vec<usize>> = k
            .coboundary_rows(q - 1)
            .into_iter()
            .map(|r| r.into_iter().map(|(j, _)| j).collect())
            .collect();
        let down = Z2Matrix::from_sparse_rows(k.count(q - 1), &down_rows);
        down.independent_modulo_image(&cocycles)
    };
    picked
        .into_iter()
        .map(|i| {
            let vals: Vec<i64> = (0..k.count(q))
                .map(|s| i64::from(cocycles[i].contains(s)))
                .collect();
            Cochain::from_dense(k, q, Ring::Z2, None, &vals)
        })
        .collect()
}
