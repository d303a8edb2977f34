//! Periodic grids, spectral transforms, spatial operator application and quadrature.
//!
//! A periodic box of side `length` stands in for `R^d`. Wavenumbers are
//! `k_m = 2πm/length`, `m ∈ [−n/2, n/2)`, stored in FFT order.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::DiffOp;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub dim: usize,
    pub n: usize,
    pub length: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, length: f64) -> Result<Self> {
        if dim != 1 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!("points per axis must be a power of two >= 8, got {n}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidInput(format!("domain length must be positive, got {length}")));
        }
        Ok(Self { dim, n, length })
    }

    pub fn periodic_1d(n: usize) -> Result<Self> {
        Self::new(1, n, 2.0 * PI)
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// `dx^d`, the quadrature weight of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn axis_indices(&self, flat: usize) -> [usize; 3] {
        let n = self.n;
        match self.dim {
            1 => [flat, 0, 0],
            _ => [flat / (n * n), (flat / n) % n, flat % n],
        }
    }

    /// Physical coordinates of grid point `flat`.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let idx = self.axis_indices(flat);
        (0..self.dim).map(|ax| idx[ax] as f64 * self.dx()).collect()
    }

    pub fn wavenumber_1d(&self, m: usize) -> f64 {
        let n = self.n as isize;
        let signed = if (m as isize) < n / 2 { m as isize } else { m as isize - n };
        2.0 * PI * signed as f64 / self.length
    }

    /// Wavevector of spectral index `flat` (length = `dim`).
    pub fn wavevector(&self, flat: usize) -> Vec<f64> {
        let idx = self.axis_indices(flat);
        (0..self.dim).map(|ax| self.wavenumber_1d(idx[ax])).collect()
    }

    pub fn wavevectors(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.wavevector(i)).collect()
    }

    /// Cells within `margin` of the box boundary along any axis.
    pub fn in_margin(&self, flat: usize, margin: usize) -> bool {
        let idx = self.axis_indices(flat);
        (0..self.dim).any(|ax| idx[ax] < margin || idx[ax] + margin >= self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Physical,
    Spectral,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<Complex64>,
    pub space: Space,
    /// Real-valued in physical space.
    pub real: bool,
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();
    let mut cache = PLANS.get_or_init(|| Mutex::new(HashMap::new())).lock().expect("fft plan cache poisoned");
    cache
        .entry((n, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) }
        })
        .clone()
}

fn fft_nd(grid: &Grid, data: &mut [Complex64], inverse: bool) {
    let n = grid.n;
    let fft = plan(n, inverse);
    if grid.dim == 1 {
        fft.process(data);
    } else {
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for stride in [n * n, n, 1] {
            for base in 0..n * n * n {
                // first element of each line along this axis
                let along = (base / stride) % n;
                if along != 0 {
                    continue;
                }
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[base + j * stride];
                }
                fft.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }
    if inverse {
        let scale = 1.0 / grid.len() as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: grid.clone(), values: vec![Complex64::new(0.0, 0.0); grid.len()], space: Space::Physical, real: true }
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| Complex64::new(f(&grid.point(i)), 0.0)).collect();
        Self { grid: grid.clone(), values, space: Space::Physical, real: true }
    }

    pub fn from_complex_fn(grid: &Grid, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..grid.len()).map(|i| f(&grid.point(i))).collect();
        Self { grid: grid.clone(), values, space: Space::Physical, real: false }
    }

    pub fn from_spectrum(grid: &Grid, values: Vec<Complex64>, real: bool) -> Self {
        assert_eq!(values.len(), grid.len());
        Self { grid: grid.clone(), values, space: Space::Spectral, real }
    }

    /// Isotropic Gaussian `amplitude · exp(−|x − c|²/(2σ²))`, centred in the box when `center` is `None`.
    pub fn gaussian(grid: &Grid, center: Option<&[f64]>, sigma: f64, amplitude: f64) -> Self {
        let mid = vec![grid.length / 2.0; grid.dim];
        let c = center.map(|c| c.to_vec()).unwrap_or(mid);
        Self::from_fn(grid, |x| {
            let r2: f64 = x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum();
            amplitude * (-r2 / (2.0 * sigma * sigma)).exp()
        })
    }

    pub fn to_spectral(&self) -> Self {
        match self.space {
            Space::Spectral => self.clone(),
            Space::Physical => {
                let mut values = self.values.clone();
                fft_nd(&self.grid, &mut values, false);
                Self { grid: self.grid.clone(), values, space: Space::Spectral, real: self.real }
            }
        }
    }

    pub fn to_physical(&self) -> Self {
        match self.space {
            Space::Physical => self.clone(),
            Space::Spectral => {
                let mut values = self.values.clone();
                fft_nd(&self.grid, &mut values, true);
                let mut out = Self { grid: self.grid.clone(), values, space: Space::Physical, real: self.real };
                if out.real {
                    out.truncate_imaginary();
                }
                out
            }
        }
    }

    /// Drops an imaginary residue of at most `1e−12` relative; larger residues mark the field complex.
    fn truncate_imaginary(&mut self) {
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let resid = self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
        if resid <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            self.values.iter_mut().for_each(|v| v.im = 0.0);
        } else {
            self.real = false;
        }
    }

    pub fn re(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out.real = self.real && c.im == 0.0;
        out
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.grid != o.grid {
            return Err(Error::GridMismatch);
        }
        let (a, b) = if self.space == o.space {
            (self.clone(), o.clone())
        } else {
            (self.to_physical(), o.to_physical())
        };
        let values = a.values.iter().zip(&b.values).map(|(x, y)| x + y).collect();
        Ok(Self { grid: a.grid, values, space: a.space, real: a.real && b.real })
    }

    pub fn max_abs(&self) -> f64 {
        self.to_physical().values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Applies a time-free operator by multiplying each mode with its symbol.
pub fn apply_spatial(op: &DiffOp, f: &Field) -> Result<Field> {
    if !op.is_time_free() {
        return Err(Error::TimeDerivativeInSpatialOp);
    }
    if op.dim() != f.grid.dim {
        return Err(Error::DimensionMismatch(op.dim(), f.grid.dim));
    }
    let spec = f.to_spectral();
    let values = spec
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v * op.spatial_symbol(&f.grid.wavevector(i)))
        .collect();
    let out = Field { grid: f.grid.clone(), values, space: Space::Spectral, real: f.real && op.is_real() };
    Ok(match f.space {
        Space::Physical => out.to_physical(),
        Space::Spectral => out,
    })
}

/// `dx^d · Σ values` (real part); exact trapezoid on the periodic grid.
pub fn integrate(f: &Field) -> Result<f64> {
    if f.space != Space::Physical {
        return Err(Error::NotPhysical);
    }
    Ok(f.grid.cell_volume() * f.values.iter().map(|v| v.re).sum::<f64>())
}

pub fn l2_norm(f: &Field) -> f64 {
    let p = f.to_physical();
    (p.grid.cell_volume() * p.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
}

/// `√(dx^d Σ |f − g|²)`.
pub fn l2_distance(f: &Field, g: &Field) -> Result<f64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    let (a, b) = (f.to_physical(), g.to_physical());
    let s: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - y).norm_sqr()).sum();
    Ok((a.grid.cell_volume() * s).sqrt())
}

/// 1D CSV with header `x,value` (plus `value_im` for complex fields).
pub fn write_csv_1d(f: &Field, path: &Path) -> Result<()> {
    if f.grid.dim != 1 {
        return Err(Error::InvalidInput("CSV export is for 1D fields".into()));
    }
    let p = f.to_physical();
    let mut w = BufWriter::new(File::create(path)?);
    if p.real {
        writeln!(w, "x,value")?;
    } else {
        writeln!(w, "x,value,value_im")?;
    }
    for (i, v) in p.values.iter().enumerate() {
        let x = p.grid.point(i)[0];
        if p.real {
            writeln!(w, "{x:.16e},{:.16e}", v.re)?;
        } else {
            writeln!(w, "{x:.16e},{:.16e},{:.16e}", v.re, v.im)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Raw little-endian binary: 16-byte header `(dim: u64, n: u64)` followed by the
/// real parts as `f64` in row-major order.
pub fn write_binary(f: &Field, path: &Path) -> Result<()> {
    let p = f.to_physical();
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&(p.grid.dim as u64).to_le_bytes())?;
    w.write_all(&(p.grid.n as u64).to_le_bytes())?;
    for v in &p.values {
        w.write_all(&v.re.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_binary(path: &Path, length: f64) -> Result<Field> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 16 {
        return Err(Error::Io("truncated field header".into()));
    }
    let word = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().expect("8-byte slice"));
    let grid = Grid::new(word(0) as usize, word(8) as usize, length)?;
    if bytes.len() != 16 + 8 * grid.len() {
        return Err(Error::Io(format!("expected {} values", grid.len())));
    }
    let values = bytes[16..]
        .chunks_exact(8)
        .map(|c| Complex64::new(f64::from_le_bytes(c.try_into().expect("8-byte chunk")), 0.0))
        .collect();
    Ok(Field { grid, values, space: Space::Physical, real: true })
}
