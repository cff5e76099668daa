//! Interface states and numerical fluxes along one storage-indexed line.

use super::{Diagnostics, LineGeometry, SchemeError, SchemeOptions, SchemeVariant};
use crate::aiweno::{interpolate_all, interpolate_faces};
use crate::lcd::{eigendecompose, to_characteristic, CharBasis, LcdError};
use crate::mesh::GHOST_WIDTH;
use crate::quadrature::{RunningIntegrals, FIRST_INTEGRAL};
use crate::systems::{BalanceLaw, Geom};
use crate::vars::Vars;

/// Everything known about one interface after reconstruction.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct InterfaceState {
    pub minus: Vars,
    pub plus: Vars,
    pub hat_minus: Vars,
    pub hat_plus: Vars,
    pub geom_minus: Geom,
    pub geom_plus: Geom,
    pub geom_hat: Geom,
    pub k_minus: Vars,
    pub k_plus: Vars,
    pub speed_minus: f64,
    pub speed_plus: f64,
    pub fv_flux: Vars,
}

/// Reconstruction of one line. Face `k` is the left face of cell `k`;
/// only faces in `first_face..=last_face` are populated.
#[derive(Clone, Debug)]
pub struct LineStates {
    pub faces: Vec<InterfaceState>,
    pub first_face: usize,
    pub last_face: usize,
    pub equilibrium: Vec<Vars>,
    pub integrals: RunningIntegrals,
}

#[derive(Clone, Copy, Debug, Default)]
struct CellRecon {
    left: Vars,
    right: Vars,
    e_left: Vars,
    e_right: Vars,
    e_quarter: [Vars; 2],
    u_quarter: [Vars; 2],
    rest_left: Vars,
    rest_right: Vars,
    g_left: Geom,
    g_right: Geom,
}

struct Line<'a> {
    model: &'a dyn BalanceLaw,
    opts: &'a SchemeOptions,
    u: &'a [Vars],
    geom: &'a LineGeometry,
    e: Vec<Vars>,
    rest: Vec<Vars>,
    ints: RunningIntegrals,
    dim: usize,
}

fn stencil<T: Copy>(v: &[T], i: usize) -> [T; 5] {
    [v[i - 2], v[i - 1], v[i], v[i + 1], v[i + 2]]
}

fn basis_for(
    model: &dyn BalanceLaw,
    variant: SchemeVariant,
    u: &Vars,
    g: &Geom,
    diag: &mut Diagnostics,
) -> CharBasis {
    let dim = model.dim();
    let found = match variant {
        SchemeVariant::PlainEquilibrium => return CharBasis::identity(dim),
        SchemeVariant::LcdEquilibrium => model.char_basis(u, g),
        SchemeVariant::LcdConservative | SchemeVariant::LcdEquilibriumViaA => {
            eigendecompose(&model.quasilinear_matrix(u, g))
        }
    };
    match found {
        Ok(b) => b,
        Err(LcdError::HyperbolicityLost { .. }) => {
            diag.hyperbolicity_fallbacks += 1;
            CharBasis::identity(dim)
        }
        Err(LcdError::Numerical(_)) => {
            diag.basis_failures += 1;
            CharBasis::identity(dim)
        }
    }
}

/// Values at the four in-cell offsets, interpolated in the given basis.
fn interpolate_in_basis(
    basis: &CharBasis,
    st: &[Vars; 5],
    dim: usize,
    index: usize,
) -> Result<[Vars; 4], SchemeError> {
    if st.iter().any(|v| !v.is_finite()) {
        return Err(SchemeError::NonFinite {
            stage: "interpolation",
            index,
        });
    }
    let w = to_characteristic(basis, st);
    let mut out = [Vars::ZERO; 4];
    for c in 0..dim {
        let vals = interpolate_all(&[w[0][c], w[1][c], w[2][c], w[3][c], w[4][c]]);
        for (o, v) in vals.iter().enumerate() {
            out[o][c] = *v;
        }
    }
    Ok(out.map(|v| basis.q.mul_vec(&v)))
}

fn componentwise(st: &[Vars; 5], dim: usize, index: usize) -> Result<[Vars; 4], SchemeError> {
    interpolate_in_basis(&CharBasis::identity(dim), st, dim, index)
}

impl<'a> Line<'a> {
    fn recover(
        &self,
        e: &Vars,
        g: &Geom,
        integral: f64,
        reference: &Vars,
        index: usize,
        diag: &mut Diagnostics,
    ) -> Result<Vars, SchemeError> {
        let u = match self.model.recover(e, g, integral, reference) {
            Ok(u) => u,
            Err(err) => match err.fallback() {
                Some(f) => {
                    diag.recovery_fallbacks += 1;
                    f
                }
                None => {
                    return Err(SchemeError::Recovery {
                        stage: "interface recovery",
                        index,
                        source: err,
                    })
                }
            },
        };
        Ok(self.admissible_or(u, g, reference, diag))
    }

    fn admissible_or(&self, u: Vars, g: &Geom, backup: &Vars, diag: &mut Diagnostics) -> Vars {
        if self.model.check_state(&u, g).is_ok() {
            u
        } else {
            diag.state_fallbacks += 1;
            *backup
        }
    }

    fn face_geometry(&self, i: usize) -> (Geom, Geom) {
        let cells = &self.geom.cells;
        let slopes = interpolate_faces(&stencil(cells, i).map(|g| g.slope));
        let values = match &self.geom.faces {
            Some(f) => [f[i], f[i + 1]],
            None => interpolate_faces(&stencil(cells, i).map(|g| g.value)),
        };
        (Geom::new(values[0], slopes[0]), Geom::new(values[1], slopes[1]))
    }

    fn reconstruct(&self, i: usize, diag: &mut Diagnostics) -> Result<CellRecon, SchemeError> {
        let model = self.model;
        let ui = self.u[i];
        let gi = self.geom.cells[i];
        let (g_left, g_right) = self.face_geometry(i);
        let first_order = self.opts.first_order;
        let mut r = CellRecon {
            g_left,
            g_right,
            u_quarter: [ui; 2],
            e_quarter: [self.e[i]; 2],
            ..CellRecon::default()
        };
        let basis = if first_order {
            CharBasis::identity(self.dim)
        } else {
            basis_for(model, self.opts.variant, &ui, &gi, diag)
        };
        if self.opts.variant == SchemeVariant::LcdConservative {
            let v = if first_order {
                [self.rest[i]; 4]
            } else {
                interpolate_in_basis(&basis, &stencil(&self.rest, i), self.dim, i)?
            };
            r.rest_left = v[0];
            r.rest_right = v[3];
            r.left = self.admissible_or(model.from_rest_variables(&v[0], &g_left), &g_left, &ui, diag);
            r.right = self.admissible_or(model.from_rest_variables(&v[3], &g_right), &g_right, &ui, diag);
            r.e_left = model.equilibrium(&r.left, &g_left, self.ints.face[i]);
            r.e_right = model.equilibrium(&r.right, &g_right, self.ints.face[i + 1]);
            if model.needs_quarter_states() && !first_order {
                let gq = interpolate_all(&stencil(&self.geom.cells, i).map(|g| g.value));
                for (s, o) in [(0usize, 1usize), (1, 2)] {
                    let g = Geom::new(gq[o], gi.slope);
                    r.u_quarter[s] = self.admissible_or(model.from_rest_variables(&v[o], &g), &g, &ui, diag);
                }
                let eq = componentwise(&stencil(&self.e, i), self.dim, i)?;
                r.e_quarter = [eq[1], eq[2]];
            }
        } else {
            let e_off = if first_order {
                [self.e[i]; 4]
            } else {
                interpolate_in_basis(&basis, &stencil(&self.e, i), self.dim, i)?
            };
            r.e_left = e_off[0];
            r.e_right = e_off[3];
            r.e_quarter = [e_off[1], e_off[2]];
            r.left = self.recover(&e_off[0], &g_left, self.ints.face[i], &ui, i, diag)?;
            r.right = self.recover(&e_off[3], &g_right, self.ints.face[i + 1], &ui, i, diag)?;
            if model.needs_quarter_states() && !first_order {
                let uq = componentwise(&stencil(self.u, i), self.dim, i)?;
                for (s, o) in [(0usize, 1usize), (1, 2)] {
                    r.u_quarter[s] = self.admissible_or(uq[o], &gi, &ui, diag);
                }
            }
        }
        Ok(r)
    }
}

/// Central-upwind flux from one-sided global fluxes and hatted states.
pub fn central_upwind(
    k_minus: &Vars,
    k_plus: &Vars,
    hat_minus: &Vars,
    hat_plus: &Vars,
    a_plus: f64,
    a_minus: f64,
    diffusion_scale: f64,
) -> Vars {
    let span = a_plus - a_minus;
    if span < 1e-10 {
        return (*k_minus + *k_plus) * 0.5;
    }
    (*k_minus * a_plus - *k_plus * a_minus) * (1.0 / span)
        + (*hat_plus - *hat_minus) * (diffusion_scale * a_plus * a_minus / span)
}

/// Fourth- and sixth-order correction from five consecutive interface fluxes.
pub fn correction_terms(k: &[Vars; 5]) -> Vars {
    let second = (k[1] * 16.0 + k[3] * 16.0 - k[0] - k[4] - k[2] * 30.0) * (1.0 / 12.0);
    let fourth = k[0] + k[4] - (k[1] + k[3]) * 4.0 + k[2] * 6.0;
    second * (-1.0 / 24.0) + fourth * (7.0 / 5760.0)
}

pub fn aweno_flux(k: &[Vars; 5]) -> Vars {
    k[2] + correction_terms(k)
}

/// Reconstructs all interfaces on a ghost-filled line.
pub fn build_line(
    model: &dyn BalanceLaw,
    opts: &SchemeOptions,
    dx: f64,
    u: &[Vars],
    geom: &LineGeometry,
    diag: &mut Diagnostics,
) -> Result<LineStates, SchemeError> {
    let len = u.len();
    if geom.len() != len || geom.faces.as_ref().is_some_and(|f| f.len() != len + 1) {
        return Err(SchemeError::Setup(format!(
            "geometry has {} cells for a line of {len}",
            geom.len()
        )));
    }
    if len < 2 * GHOST_WIDTH + 1 {
        return Err(SchemeError::Setup(format!("line of {len} cells is too short")));
    }
    for (i, ui) in u.iter().enumerate() {
        model.check_state(ui, &geom.cells[i]).map_err(|source| SchemeError::State {
            stage: "cell average",
            index: i,
            source,
        })?;
    }
    let (elo, ehi, ints) = if model.has_integrand() {
        let f: Vec<f64> = u.iter().zip(&geom.cells).map(|(v, g)| model.integrand(v, g)).collect();
        if let Some(i) = f.iter().position(|v| !v.is_finite()) {
            return Err(SchemeError::NonFinite { stage: "integrand", index: i });
        }
        (FIRST_INTEGRAL, len - 3, RunningIntegrals::from_integrand(&f, dx))
    } else {
        (0, len - 1, RunningIntegrals::zero(len))
    };
    let mut e = vec![Vars::ZERO; len];
    for i in elo..=ehi {
        e[i] = model.equilibrium(&u[i], &geom.cells[i], ints.center[i]);
    }
    let rest = if opts.variant == SchemeVariant::LcdConservative {
        u.iter().zip(&geom.cells).map(|(v, g)| model.rest_variables(v, g)).collect()
    } else {
        Vec::new()
    };
    let line = Line {
        model,
        opts,
        u,
        geom,
        e,
        rest,
        ints,
        dim: model.dim(),
    };

    let (clo, chi) = (elo + 2, ehi - 2);
    let mut recon = vec![CellRecon::default(); len];
    for i in clo..=chi {
        recon[i] = line.reconstruct(i, diag)?;
    }

    let (first, last) = (clo + 1, chi);
    let mut faces = vec![InterfaceState::default(); len + 1];
    let exact = geom.faces.is_some();
    for k in first..=last {
        let (l, r) = (&recon[k - 1], &recon[k]);
        let st = &mut faces[k];
        st.minus = l.right;
        st.plus = r.left;
        st.geom_minus = l.g_right;
        st.geom_plus = r.g_left;
        if exact {
            st.geom_hat = l.g_right;
            st.hat_minus = l.right;
            st.hat_plus = r.left;
        } else {
            let gh = Geom::new(
                0.5 * (l.g_right.value + r.g_left.value),
                0.5 * (l.g_right.slope + r.g_left.slope),
            );
            st.geom_hat = gh;
            if opts.variant == SchemeVariant::LcdConservative {
                st.hat_minus = line.admissible_or(model.from_rest_variables(&l.rest_right, &gh), &gh, &l.right, diag);
                st.hat_plus = line.admissible_or(model.from_rest_variables(&r.rest_left, &gh), &gh, &r.left, diag);
            } else {
                st.hat_minus = line.recover(&l.e_right, &gh, line.ints.face[k], &l.right, k, diag)?;
                st.hat_plus = line.recover(&r.e_left, &gh, line.ints.face[k], &r.left, k, diag)?;
            }
        }
        let speed = |v: &Vars, g: &Geom| {
            model.speeds(v, g).map_err(|source| SchemeError::State {
                stage: "wave speeds",
                index: k,
                source,
            })
        };
        let (ml, mh) = speed(&st.minus, &st.geom_minus)?;
        let (pl, ph) = speed(&st.plus, &st.geom_plus)?;
        st.speed_plus = mh.max(ph).max(0.0);
        st.speed_minus = ml.min(pl).min(0.0);
    }

    // Global flux: anchored at the first face, advanced by interface jumps
    // and cell increments.
    let mut k_minus = model.flux(&faces[first].minus, &faces[first].geom_minus);
    for k in first..=last {
        let st = &mut faces[k];
        st.k_minus = k_minus;
        st.k_plus = k_minus + model.flux(&st.hat_plus, &st.geom_hat)
            - model.flux(&st.hat_minus, &st.geom_hat)
            - model.path_term(&st.hat_minus, &st.hat_plus);
        st.fv_flux = central_upwind(
            &st.k_minus,
            &st.k_plus,
            &st.hat_minus,
            &st.hat_plus,
            st.speed_plus,
            st.speed_minus,
            opts.diffusion_scale,
        );
        if !st.fv_flux.is_finite() {
            return Err(SchemeError::NonFinite { stage: "interface flux", index: k });
        }
        if k < last {
            let c = &recon[k];
            let u_nodes = [c.left, c.u_quarter[0], u[k], c.u_quarter[1], c.right];
            let e_nodes = [c.e_left, c.e_quarter[0], line.e[k], c.e_quarter[1], c.e_right];
            let jump = model.flux(&c.right, &c.g_right) - model.flux(&c.left, &c.g_left);
            k_minus = st.k_plus + model.cell_increment(&u_nodes, &e_nodes, &jump);
        }
    }

    Ok(LineStates {
        faces,
        first_face: first,
        last_face: last,
        equilibrium: line.e,
        integrals: line.ints,
    })
}

/// High-order fluxes at the `n_cells + 1` interior faces of a ghost-filled
/// line, in left-to-right order.
pub fn line_fluxes(
    model: &dyn BalanceLaw,
    opts: &SchemeOptions,
    dx: f64,
    u: &[Vars],
    geom: &LineGeometry,
    diag: &mut Diagnostics,
) -> Result<Vec<Vars>, SchemeError> {
    let states = build_line(model, opts, dx, u, geom, diag)?;
    let g = GHOST_WIDTH;
    let n = u.len() - 2 * g;
    let fv = |k: usize| states.faces[k.clamp(states.first_face, states.last_face)].fv_flux;
    Ok((g..=g + n)
        .map(|k| {
            if opts.corrections {
                aweno_flux(&[fv(k - 2), fv(k - 1), fv(k), fv(k + 1), fv(k + 2)])
            } else {
                fv(k)
            }
        })
        .collect())
}
