use std::collections::VecDeque;

use ndarray::{Array2, Zip};

use super::stencil::{discrete_hessian_det, fill_ghosts, Operators};
use super::{BandedCholesky, Grid, GridField, SolverError};
use crate::families::NumericFamily;

fn check_finite(a: &Array2<f64>, t: f64) -> Result<(), SolverError> {
    if a.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(SolverError::NonFinite { t })
    }
}

fn with_interior(base: &GridField, interior: Array2<f64>) -> GridField {
    let mut out = base.clone();
    out.interior_mut().assign(&interior);
    out
}

/// Classical four-stage Runge-Kutta step; ghosts are refilled at each stage time.
pub fn step_rk4(
    field: &GridField,
    dt: f64,
    family: &NumericFamily,
    t: f64,
    ops: Operators,
) -> Result<GridField, SolverError> {
    let u0 = field.interior().to_owned();
    let mut stage = field.clone();
    let k1 = ops.rhs(&mut stage, family, t)?;
    check_finite(&k1, t)?;
    let mut stage = with_interior(field, &u0 + &(&k1 * (0.5 * dt)));
    let k2 = ops.rhs(&mut stage, family, t + 0.5 * dt)?;
    check_finite(&k2, t)?;
    let mut stage = with_interior(field, &u0 + &(&k2 * (0.5 * dt)));
    let k3 = ops.rhs(&mut stage, family, t + 0.5 * dt)?;
    check_finite(&k3, t)?;
    let mut stage = with_interior(field, &u0 + &(&k3 * dt));
    let k4 = ops.rhs(&mut stage, family, t + dt)?;
    check_finite(&k4, t)?;
    let mut next = u0;
    Zip::from(&mut next)
        .and(&k1)
        .and(&k2)
        .and(&k3)
        .and(&k4)
        .for_each(|u, &a, &b, &c, &d| *u += dt / 6.0 * (a + 2.0 * b + 2.0 * c + d));
    check_finite(&next, t + dt)?;
    let mut out = with_interior(field, next);
    fill_ghosts(&mut out, family, t + dt)?;
    Ok(out)
}

/// Second-order IMEX Runge-Kutta (ARS(2,2,2)): the Hessian determinant is
/// explicit and the biharmonic implicit.
///
/// Each implicit stage is solved in delta form `(I + g dt M) d = g dt L(R)`,
/// where `M` is the interior block of the biharmonic and `L(R)` the full
/// discrete `-bilaplacian` of the explicit predictor `R` with ghosts at the
/// stage time. Factorizations are cached by step size.
#[derive(Debug, Clone)]
pub struct ImexStepper {
    grid: Grid,
    ops: Operators,
    p: usize,
    band: Vec<f64>,
    cache: VecDeque<(u64, BandedCholesky)>,
    capacity: usize,
}

const GAMMA: f64 = 1.0 - std::f64::consts::FRAC_1_SQRT_2;

impl ImexStepper {
    pub fn new(grid: Grid, ops: Operators) -> Self {
        let (p, band) = ops.matrix(&grid);
        Self {
            grid,
            ops,
            p,
            band,
            cache: VecDeque::new(),
            capacity: 8,
        }
    }

    fn factor(&mut self, dt: f64) -> Result<&BandedCholesky, SolverError> {
        let key = dt.to_bits();
        if let Some(pos) = self.cache.iter().position(|(k, _)| *k == key) {
            return Ok(&self.cache[pos].1);
        }
        let c = GAMMA * dt;
        let w = self.p + 1;
        let mut band: Vec<f64> = self.band.iter().map(|v| c * v).collect();
        for k in 0..self.grid.interior_len() {
            band[k * w + self.p] += 1.0;
        }
        let chol = BandedCholesky::factor(self.grid.interior_len(), self.p, band)?;
        if self.cache.len() == self.capacity {
            self.cache.pop_front();
        }
        self.cache.push_back((key, chol));
        Ok(&self.cache.back().expect("just pushed").1)
    }

    /// Implicit stage: returns `R + d` with ghosts filled at `ts`.
    fn implicit(
        &mut self,
        mut predictor: GridField,
        family: &NumericFamily,
        ts: f64,
        dt: f64,
    ) -> Result<GridField, SolverError> {
        fill_ghosts(&mut predictor, family, ts)?;
        let l = self.ops.biharmonic(&predictor);
        let scale = -GAMMA * dt;
        let mut d: Vec<f64> = l.iter().map(|v| scale * v).collect();
        self.factor(dt)?.solve_in_place(&mut d);
        let d = Array2::from_shape_vec((self.grid.nx, self.grid.ny), d).expect("interior shape");
        let mut out = predictor;
        out.interior_mut().zip_mut_with(&d, |u, v| *u += v);
        check_finite(&out.interior().to_owned(), ts)?;
        Ok(out)
    }

    pub fn step(
        &mut self,
        field: &GridField,
        dt: f64,
        family: &NumericFamily,
        t: f64,
    ) -> Result<GridField, SolverError> {
        let delta = 1.0 - 1.0 / (2.0 * GAMMA);
        let mut u0 = field.clone();
        fill_ghosts(&mut u0, family, t)?;
        let n1 = discrete_hessian_det(&u0);
        check_finite(&n1, t)?;

        let base = u0.interior().to_owned();
        let r2 = with_interior(&u0, &base + &(&n1 * (GAMMA * dt)));
        let u2 = self.implicit(r2, family, t + GAMMA * dt, dt)?;
        let k2 = self.ops.biharmonic(&u2).mapv(|v| -v);
        let n2 = discrete_hessian_det(&u2);
        check_finite(&n2, t)?;

        let mut r3 = base;
        Zip::from(&mut r3)
            .and(&n1)
            .and(&n2)
            .and(&k2)
            .for_each(|u, &a, &b, &k| *u += dt * (delta * a + (1.0 - delta) * b + (1.0 - GAMMA) * k));
        let r3 = with_interior(&u0, r3);
        self.implicit(r3, family, t + dt, dt)
    }
}

/// One IMEX step with a fresh factorization; prefer [`ImexStepper`] in loops.
pub fn step_imex(
    field: &GridField,
    dt: f64,
    family: &NumericFamily,
    t: f64,
    ops: Operators,
) -> Result<GridField, SolverError> {
    ImexStepper::new(field.grid, ops).step(field, dt, family, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::SolutionFamily;
    use crate::polyalg::{int, rat};

    fn max_err(field: &GridField, family: &NumericFamily, t: f64) -> f64 {
        let g = field.grid;
        field
            .interior()
            .indexed_iter()
            .map(|((i, j), &v)| (v - family.evaluate(g.x(i + 2), g.y(j + 2), t).unwrap()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_field_stays_zero() {
        let fam = SolutionFamily::square(int(0)).numeric();
        let g = Grid::unit_square(7).unwrap();
        let f = GridField::zeros(g, 0.0);
        let a = step_rk4(&f, 1e-6, &fam, 0.0, Operators::default()).unwrap();
        assert!(a.values.iter().all(|&v| v == 0.0));
        let b = step_imex(&f, 1e-3, &fam, 0.0, Operators::default()).unwrap();
        assert!(b.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn affine_field_is_unchanged() {
        let fam = SolutionFamily::affine_plane(rat(1, 3), int(2), rat(-1, 7)).numeric();
        let g = Grid::unit_square(9).unwrap();
        let f = GridField::from_family(g, &fam, 0.0).unwrap();
        let a = step_rk4(&f, 1e-6, &fam, 0.0, Operators::default()).unwrap();
        let b = step_imex(&f, 1e-3, &fam, 0.0, Operators::default()).unwrap();
        for out in [a, b] {
            for (x, y) in f.values.iter().zip(out.values.iter()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rk4_local_error_drops_sixteenfold() {
        // Coarse grid on a wide box keeps h^4 large enough for the explicit scheme.
        let fam = SolutionFamily::square(int(1)).numeric();
        let g = Grid::new(5, 5, (0.0, 0.0), (10.0, 10.0)).unwrap();
        let f = GridField::from_family(g, &fam, 0.0).unwrap();
        let e1 = max_err(
            &step_rk4(&f, 0.01, &fam, 0.0, Operators::default()).unwrap(),
            &fam,
            0.01,
        );
        let e2 = max_err(
            &step_rk4(&f, 0.005, &fam, 0.0, Operators::default()).unwrap(),
            &fam,
            0.005,
        );
        assert!(e1 / e2 >= 16.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn imex_is_second_order_in_time() {
        // Stiff regime: the local error drops only fourfold per halving
        // (stage order 1), the global error is second order.
        let fam = SolutionFamily::square(int(1)).numeric();
        let g = Grid::unit_square(15).unwrap();
        let global = |steps: usize| {
            let dt = 0.01 / steps as f64;
            let mut s = ImexStepper::new(g, Operators::default());
            let mut f = GridField::from_family(g, &fam, 0.0).unwrap();
            for i in 0..steps {
                f = s.step(&f, dt, &fam, i as f64 * dt).unwrap();
            }
            max_err(&f, &fam, 0.01)
        };
        let (e1, e2, e3) = (global(20), global(40), global(80));
        assert!(e1 / e2 > 3.5 && e2 / e3 > 3.5, "{e1} {e2} {e3}");
    }

    #[test]
    fn factorizations_are_reused() {
        let fam = SolutionFamily::square(int(1)).numeric();
        let g = Grid::unit_square(7).unwrap();
        let f = GridField::from_family(g, &fam, 0.0).unwrap();
        let mut s = ImexStepper::new(g, Operators::default());
        let a = s.step(&f, 1e-3, &fam, 0.0).unwrap();
        let b = s.step(&f, 1e-3, &fam, 0.0).unwrap();
        assert_eq!(a, b);
        assert_eq!(s.cache.len(), 1);
    }
}
