//! Null-coordinate grids and dense per-node storage.
//!
//! Null coordinates `(u, v)` relate to Lorentz isothermal coordinates
//! `(t, x)` by `u = t + x`, `v = -t + x`, so `t = (u - v)/2` and
//! `x = (u + v)/2`.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Rectangular grid in null coordinates. Node `(i, j)` sits at
/// `(u0 + i*du, v0 + j*dv)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullGrid {
    pub u0: f64,
    pub v0: f64,
    pub du: f64,
    pub dv: f64,
    pub nu: usize,
    pub nv: usize,
}

impl NullGrid {
    pub fn new(u0: f64, v0: f64, du: f64, dv: f64, nu: usize, nv: usize) -> Result<Self> {
        if nu < 3 || nv < 3 {
            return Err(Error::GridTooSmall {
                need: 3,
                got: nu.min(nv),
            });
        }
        if !(du > 0.0) || !(dv > 0.0) {
            return Err(Error::Config(format!(
                "grid steps must be positive, got du={du}, dv={dv}"
            )));
        }
        Ok(NullGrid {
            u0,
            v0,
            du,
            dv,
            nu,
            nv,
        })
    }

    /// Grid covering `[u0, u0+u_extent] x [v0, v0+v_extent]` with the given
    /// node counts.
    pub fn from_extent(
        u0: f64,
        v0: f64,
        u_extent: f64,
        v_extent: f64,
        nu: usize,
        nv: usize,
    ) -> Result<Self> {
        if nu < 3 || nv < 3 {
            return Err(Error::GridTooSmall {
                need: 3,
                got: nu.min(nv),
            });
        }
        Self::new(
            u0,
            v0,
            u_extent / (nu - 1) as f64,
            v_extent / (nv - 1) as f64,
            nu,
            nv,
        )
    }

    pub fn u(&self, i: usize) -> f64 {
        self.u0 + i as f64 * self.du
    }

    pub fn v(&self, j: usize) -> f64 {
        self.v0 + j as f64 * self.dv
    }

    /// Same domain, steps halved, node counts `n -> 2n - 1`. Every node of
    /// `self` is a node of the refined grid.
    pub fn refined(&self) -> NullGrid {
        NullGrid {
            u0: self.u0,
            v0: self.v0,
            du: self.du / 2.0,
            dv: self.dv / 2.0,
            nu: 2 * self.nu - 1,
            nv: 2 * self.nv - 1,
        }
    }
}

/// Dense row-major `nu x nv` array indexed by `(i, j)` with `i` along `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2<T> {
    pub nu: usize,
    pub nv: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid2<T> {
    pub fn filled(nu: usize, nv: usize, value: T) -> Self {
        Grid2 {
            nu,
            nv,
            data: vec![value; nu * nv],
        }
    }
}

impl<T> Grid2<T> {
    pub fn from_fn(nu: usize, nv: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(nu * nv);
        for i in 0..nu {
            for j in 0..nv {
                data.push(f(i, j));
            }
        }
        Grid2 { nu, nv, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.nv + j]
    }

    #[inline]
    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.nv + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: T) {
        self.data[i * self.nv + j] = value;
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Grid2<U> {
        Grid2 {
            nu: self.nu,
            nv: self.nv,
            data: self.data.iter().map(&mut f).collect(),
        }
    }

    pub fn zip_map<U, V>(&self, other: &Grid2<U>, mut f: impl FnMut(&T, &U) -> V) -> Grid2<V> {
        assert_eq!((self.nu, self.nv), (other.nu, other.nv));
        Grid2 {
            nu: self.nu,
            nv: self.nv,
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| f(a, b))
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    /// Iterate `(i, j, &value)` over all nodes.
    pub fn enumerate(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        let nv = self.nv;
        self.data
            .iter()
            .enumerate()
            .map(move |(k, t)| (k / nv, k % nv, t))
    }
}

impl Grid2<f64> {
    /// Sup norm over nodes at least `margin` away from every edge.
    pub fn sup_interior(&self, margin: usize) -> f64 {
        let mut sup: f64 = 0.0;
        for i in margin..self.nu.saturating_sub(margin) {
            for j in margin..self.nv.saturating_sub(margin) {
                sup = sup.max(self.get(i, j).abs());
            }
        }
        sup
    }

    /// Discrete L2 norm (RMS) over the same interior region.
    pub fn l2_interior(&self, margin: usize) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for i in margin..self.nu.saturating_sub(margin) {
            for j in margin..self.nv.saturating_sub(margin) {
                let x = self.get(i, j);
                sum += x * x;
                count += 1;
            }
        }
        if count == 0 {
            0.0
        } else {
            (sum / count as f64).sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_coordinate_conventions() {
        let g = NullGrid::from_extent(0.0, 0.0, 1.0, 2.0, 5, 9).unwrap();
        assert_eq!(g.u(4), 1.0);
        assert_eq!(g.v(8), 2.0);
        // t = (u - v)/2, x = (u + v)/2 is consistent: u = t + x, v = -t + x.
        let (u, v) = (g.u(3), g.v(5));
        let (t, x) = ((u - v) / 2.0, (u + v) / 2.0);
        assert_eq!(t + x, u);
        assert_eq!(-t + x, v);
    }

    #[test]
    fn refinement_nests() {
        let g = NullGrid::from_extent(0.0, 0.0, 1.0, 1.0, 9, 9).unwrap();
        let f = g.refined();
        assert_eq!(f.nu, 17);
        assert_eq!(f.u(16), g.u(8));
        assert_eq!(f.u(2), g.u(1));
    }

    #[test]
    fn rejects_tiny_grids() {
        assert!(NullGrid::new(0.0, 0.0, 0.1, 0.1, 2, 5).is_err());
    }
}
