//! Acceptance suite. Every test writes one `PASS`/`FAIL` line straight to
//! stdout, so the lines show up even when output capture is on.

use std::f64::consts::PI;
use std::io::Write;

use eqlcd::aiweno::{interpolate, Offset};
use eqlcd::harness::{build_example, run_example, ExampleRequest, Solver};
use eqlcd::lcd::{eigendecompose, LcdError, Matrix};
use eqlcd::mesh::GHOST_WIDTH;
use eqlcd::quadrature::{advance_center, advance_interface, boole, seed_integral};
use eqlcd::scheme::SchemeVariant;
use eqlcd::systems::{BalanceLaw, Euler1D, EulerSweep2D, Geom, Nozzle, ShallowWater, TwoLayer};
use eqlcd::time::ssp_rk3_step;
use eqlcd::Vars;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const SCHEME1: SchemeVariant = SchemeVariant::LcdEquilibrium;
const SCHEME2: SchemeVariant = SchemeVariant::PlainEquilibrium;
const SCHEME3: SchemeVariant = SchemeVariant::LcdConservative;

fn report(id: u8, title: &str, pass: bool, detail: &str) {
    let line = format!(
        "acceptance [{id:>2}] {:<4} {title}: {detail}\n",
        if pass { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(pass, "{}", line.trim_end());
}

fn cell_geometry(solver: &Solver) -> Vec<Geom> {
    match solver {
        Solver::OneD(p) => p.geometry.cells[GHOST_WIDTH..GHOST_WIDTH + p.grid.n_cells].to_vec(),
        Solver::TwoD(_) => panic!("one-dimensional run expected"),
    }
}

/// Largest density deviation of an unperturbed nozzle run, and the largest
/// steady density.
fn nozzle_deviation(example: u8, scheme: SchemeVariant) -> (f64, f64) {
    let result = run_example(&ExampleRequest::new(example, scheme).unperturbed()).unwrap();
    let geom = cell_geometry(&result.run.solver);
    let steady = result.run.steady.as_ref().unwrap();
    let mut dev: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for ((u, s), g) in result.run.state.iter().zip(steady).zip(&geom) {
        dev = dev.max(((u[0] - s[0]) / g.value).abs());
        peak = peak.max(s[0] / g.value);
    }
    (dev, peak)
}

#[test]
fn c01_nozzle_steady_states_are_preserved() {
    let mut pass = true;
    let mut detail = Vec::new();
    for example in [1u8, 2] {
        for scheme in [SCHEME1, SCHEME2] {
            let (dev, peak) = nozzle_deviation(example, scheme);
            let ok = dev <= 1e-11 * peak && dev.is_finite();
            pass &= ok;
            detail.push(format!("ex{example}/s{} {dev:.2e} (bound {:.2e})", scheme.label(), 1e-11 * peak));
        }
    }
    report(1, "nozzle well-balancing", pass, &detail.join(", "));
}

#[test]
fn c02_two_layer_steady_state_is_preserved() {
    let result = run_example(&ExampleRequest::new(5, SCHEME1).unperturbed()).unwrap();
    let dev = result.run.difference().iter().map(Vars::max_abs).fold(0.0, f64::max);
    report(
        2,
        "two-layer well-balancing over a bottom jump",
        dev <= 1e-11 && dev.is_finite(),
        &format!("linf {dev:.2e} at t = {}", result.outcome.summary.time),
    );
}

#[test]
fn c03_hydrostatic_gas_is_preserved() {
    let mut req = ExampleRequest::new(8, SCHEME1).unperturbed();
    req.overrides.nx = Some(40);
    let result = run_example(&req).unwrap();
    let dev = result.run.difference().iter().map(Vars::max_abs).fold(0.0, f64::max);
    report(
        3,
        "2-D hydrostatic well-balancing on 40x40",
        dev <= 1e-10 && dev.is_finite(),
        &format!("linf {dev:.2e}, {} steps", result.outcome.summary.steps),
    );
}

/// `(max |q - 4.42|, spread of E, |E|)` after the relaxation phase.
fn relaxed_flatness(scheme: SchemeVariant) -> (f64, f64, f64) {
    let mut run = build_example(&ExampleRequest::new(4, scheme).unperturbed()).unwrap();
    run.advance().unwrap();
    let e = run.equilibrium_field().unwrap().unwrap();
    let q_err = run.state.iter().map(|u| (u[1] - 4.42).abs()).fold(0.0, f64::max);
    let hi = e.iter().map(|v| v[1]).fold(f64::MIN, f64::max);
    let lo = e.iter().map(|v| v[1]).fold(f64::MAX, f64::min);
    (q_err, hi - lo, hi.abs().max(lo.abs()))
}

#[test]
fn c04_moving_water_relaxes_to_flat_equilibria() {
    let mut pass = true;
    let mut detail = Vec::new();
    for scheme in [SCHEME1, SCHEME2] {
        let (q_err, spread, scale) = relaxed_flatness(scheme);
        let ok = q_err <= 1e-6 && spread <= 1e-6 * scale;
        pass &= ok;
        detail.push(format!("s{} |q-4.42| {q_err:.2e}, E spread {spread:.2e}", scheme.label()));
    }
    let (_, spread, scale) = relaxed_flatness(SCHEME3);
    let ok = spread >= 1e-3 * scale;
    pass &= ok;
    detail.push(format!("s3 E spread {spread:.2e} (needs >= {:.2e})", 1e-3 * scale));
    report(4, "moving-water relaxation", pass, &detail.join(", "));
}

/// Oscillation counts observed when the suite was first run; a change in
/// either direction means the scheme output changed.
const PINNED_OSCILLATIONS: [(u8, usize, usize); 4] = [(1, 14, 28), (3, 11, 38), (5, 56, 84), (6, 24, 84)];

#[test]
fn c05_characteristic_decomposition_reduces_oscillations() {
    let mut pass = true;
    let mut detail = Vec::new();
    for (example, pinned1, pinned2) in PINNED_OSCILLATIONS {
        let count = |scheme| {
            let mut req = ExampleRequest::new(example, scheme);
            if example == 3 {
                req.overrides.nx = Some(100);
            }
            run_example(&req).unwrap().metrics.oscillations()
        };
        let (c1, c2) = (count(SCHEME1), count(SCHEME2));
        let ok = c1 < c2 && c1 == pinned1 && c2 == pinned2;
        pass &= ok;
        detail.push(format!("ex{example} {c1} vs {c2}"));
    }
    report(5, "oscillation ordering, scheme 1 below scheme 2", pass, &detail.join(", "));
}

#[test]
fn c06_interpolation_is_fifth_order() {
    let mut errs = Vec::new();
    for n in [16usize, 32, 64, 128] {
        let dx = 2.0 * PI / n as f64;
        let mut e: f64 = 0.0;
        for j in 0..n {
            let x = j as f64 * dx;
            let f = [-2.0, -1.0, 0.0, 1.0, 2.0].map(|k: f64| (x + k * dx).sin());
            for s in Offset::ALL {
                let v = interpolate(&f, s).unwrap();
                e = e.max((v - (x + s.value() * dx).sin()).abs());
            }
        }
        errs.push(e);
    }
    let factors: Vec<f64> = errs.windows(2).map(|w| w[0] / w[1]).collect();
    let pass = factors.iter().all(|r| (25.0..=40.0).contains(r));
    report(6, "Ai-WENO-Z error decay on sin(x)", pass, &format!("factors {factors:.2?}"));
}

#[test]
fn c07_quadrature_is_exact_for_quartics() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let c: [f64; 5] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        let p = |x: f64| c[0] + x * (c[1] + x * (c[2] + x * (c[3] + x * c[4])));
        let prim = |x: f64| x * (c[0] + x * (c[1] / 2.0 + x * (c[2] / 3.0 + x * (c[3] / 4.0 + x * c[4] / 5.0))));
        let a = rng.gen_range(-1.0..1.0);
        let dx = rng.gen_range(0.05..0.5);
        let nodes = |lo: f64, h: f64| [0.0, 0.25, 0.5, 0.75, 1.0].map(|t| p(lo + t * h));
        let scale = (0..=40)
            .map(|k| p(a - dx + k as f64 * dx / 20.0).abs())
            .fold(0.0_f64, f64::max)
            * dx;
        // Left half of the cell [a - dx/2, a + dx/2] from its five samples.
        let half = seed_integral(dx, nodes(a - 0.5 * dx, dx));
        worst = worst.max((half - (prim(a) - prim(a - 0.5 * dx))).abs() / scale);
        // One center-ladder step over [a - dx, a].
        let step = advance_center(0.0, dx, nodes(a - dx, dx));
        worst = worst.max((step - (prim(a) - prim(a - dx))).abs() / scale);
        // One face-ladder step over [a - dx/2, a + dx/2].
        let step = advance_interface(0.0, dx, nodes(a - 0.5 * dx, dx));
        worst = worst.max((step - (prim(a + 0.5 * dx) - prim(a - 0.5 * dx))).abs() / scale);
    }
    let sums_exact = seed_integral(1.0, [1.0; 5]) == 0.5 && boole(1.0, [1.0; 5]) == 1.0 && boole(0.25, [1.0; 5]) == 0.25;
    report(
        7,
        "quadrature exactness",
        worst <= 1e-13 && sums_exact,
        &format!("worst relative error {worst:.2e}, weight sums exact: {sums_exact}"),
    );
}

fn random_sign(rng: &mut StdRng) -> f64 {
    if rng.gen_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

/// Speed ratio bounded away from the sonic or critical value, where the
/// two roots merge and recovery is ill-conditioned.
fn regime(rng: &mut StdRng) -> f64 {
    random_sign(rng)
        * if rng.gen_bool(0.5) {
            rng.gen_range(0.0..0.8)
        } else {
            rng.gen_range(1.25..3.0)
        }
}

struct Sample {
    state: Vars,
    geom: Geom,
    integral: f64,
}

fn nozzle_sample(m: &Nozzle, rng: &mut StdRng) -> Sample {
    let sigma = rng.gen_range(0.3..2.0);
    let rho = rng.gen_range(0.2..5.0);
    let vel = regime(rng) * m.sound_speed(rho);
    Sample {
        state: Vars::from_slice(&[sigma * rho, sigma * rho * vel]),
        geom: Geom::new(sigma, rng.gen_range(-1.0..1.0)),
        integral: 0.0,
    }
}

fn sw_sample(m: &ShallowWater, rng: &mut StdRng) -> Sample {
    let h = rng.gen_range(0.1..5.0);
    let vel = regime(rng) * (m.g * h).sqrt();
    Sample {
        state: Vars::from_slice(&[h, h * vel]),
        geom: Geom::flat(rng.gen_range(-1.0..1.0)),
        integral: rng.gen_range(-1.0..1.0),
    }
}

/// Eigenvalues of `c` when they are all real, from nalgebra's Schur route.
fn real_spectrum(c: &Matrix) -> Option<Vec<f64>> {
    let d = c.dim;
    let eig = nalgebra::DMatrix::from_fn(d, d, |r, k| c.a[r][k]).complex_eigenvalues();
    let scale = 1.0 + c.max_abs();
    eig.iter().all(|z| z.im.abs() <= 1e-8 * scale).then(|| eig.iter().map(|z| z.re).collect())
}

/// Real spectrum with eigenvalues separated by `1e-3 (1 + |C|)`. Nearly
/// coincident pairs sit next to defective matrices, where no eigenvector
/// basis reproduces `C` to the target.
fn strictly_hyperbolic(c: &Matrix) -> bool {
    let Some(mut eig) = real_spectrum(c) else {
        return false;
    };
    eig.sort_by(f64::total_cmp);
    eig.windows(2).all(|w| w[1] - w[0] >= 1e-3 * (1.0 + c.max_abs()))
}

/// Two-layer state with a real spectrum and no characteristic speed near
/// zero, the internal analogue of staying away from critical flow.
fn two_layer_sample(m: &TwoLayer, rng: &mut StdRng) -> Sample {
    loop {
        let h1 = rng.gen_range(0.3..2.0);
        let h2 = rng.gen_range(0.3..2.0);
        let u1 = rng.gen_range(-1.0..1.0);
        let u2 = u1 + rng.gen_range(-0.2..0.2);
        let state = Vars::from_slice(&[h1, h1 * u1, h2, h2 * u2]);
        let geom = Geom::flat(rng.gen_range(-2.0..0.0));
        if let Some(eig) = real_spectrum(&m.c_matrix(&state, &geom)) {
            let top = eig.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            if eig.iter().all(|v| v.abs() >= 0.05 * top) {
                return Sample { state, geom, integral: 0.0 };
            }
        }
    }
}

fn euler_sample(m: &Euler1D, rng: &mut StdRng) -> Sample {
    let rho = rng.gen_range(0.2..5.0);
    let p = rng.gen_range(0.2..5.0);
    let vel = regime(rng) * (m.gamma * p / rho).sqrt();
    let geom = Geom::new(rng.gen_range(-1.0..1.0), 1.0);
    Sample {
        state: m.conserved(rho, vel, p, &geom),
        geom,
        integral: rng.gen_range(-1.0..1.0),
    }
}

fn euler2d_sample(m: &EulerSweep2D, rng: &mut StdRng) -> Sample {
    let rho = rng.gen_range(0.2..5.0);
    let p = rng.gen_range(0.2..5.0);
    let c = (m.gamma * p / rho).sqrt();
    let geom = Geom::new(rng.gen_range(-1.0..1.0), 1.0);
    Sample {
        state: m.conserved(rho, regime(rng) * c, rng.gen_range(-1.0..1.0) * c, p, &geom),
        geom,
        integral: rng.gen_range(-1.0..1.0),
    }
}

type Sampler = Box<dyn Fn(&mut StdRng) -> Sample>;

fn systems() -> Vec<(Box<dyn BalanceLaw>, Sampler)> {
    let nozzle = Nozzle::default();
    let sw = ShallowWater::new(9.812, 0.15);
    let two = TwoLayer::default();
    let euler = Euler1D::default();
    let euler2 = EulerSweep2D::default();
    vec![
        (Box::new(nozzle.clone()), Box::new(move |r: &mut StdRng| nozzle_sample(&nozzle, r))),
        (Box::new(sw.clone()), Box::new(move |r: &mut StdRng| sw_sample(&sw, r))),
        (Box::new(two.clone()), Box::new(move |r: &mut StdRng| two_layer_sample(&two, r))),
        (Box::new(euler.clone()), Box::new(move |r: &mut StdRng| euler_sample(&euler, r))),
        (Box::new(euler2.clone()), Box::new(move |r: &mut StdRng| euler2d_sample(&euler2, r))),
    ]
}

#[test]
fn c08_recovery_round_trips() {
    let mut rng = StdRng::seed_from_u64(8);
    let mut pass = true;
    let mut detail = Vec::new();
    for (model, sample) in systems() {
        let mut failures = 0;
        let mut worst: f64 = 0.0;
        for _ in 0..10_000 {
            let s = sample(&mut rng);
            let e = model.equilibrium(&s.state, &s.geom, s.integral);
            // Start from a nearby state so the solve does real work.
            let reference = s.state * rng.gen_range(0.98..1.02);
            match model.recover(&e, &s.geom, s.integral, &reference) {
                Ok(back) => {
                    let err = (back - s.state).max_abs() / s.state.max_abs();
                    worst = worst.max(err);
                    if err > 1e-12 {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
        }
        pass &= failures == 0;
        detail.push(format!("{} {failures} failures (worst {worst:.1e})", model.name()));
    }
    report(8, "equilibrium recovery round trips, 1e4 per system", pass, &detail.join(", "));
}

fn rebuild_error(c: &Matrix) -> Result<f64, LcdError> {
    let basis = eigendecompose(c)?;
    let d = c.dim;
    let mut worst: f64 = 0.0;
    for r in 0..d {
        for col in 0..d {
            let v: f64 = (0..d)
                .map(|k| basis.q.a[r][k] * basis.eigenvalues[k] * basis.q_inv.a[k][col])
                .sum();
            worst = worst.max((v - c.a[r][col]).abs());
        }
    }
    Ok(worst / (1.0 + c.max_abs()))
}

#[test]
fn c09_eigendecomposition_reconstructs_matrices() {
    let mut rng = StdRng::seed_from_u64(9);
    let mut pass = true;
    let mut detail = Vec::new();
    for (model, sample) in systems() {
        let mut worst: f64 = 0.0;
        let mut failures = 0;
        let mut rejected = 0;
        let mut accepted = 0;
        while accepted < 1000 {
            let s = sample(&mut rng);
            let c = model.c_matrix(&s.state, &s.geom);
            if !strictly_hyperbolic(&c) {
                rejected += 1;
                continue;
            }
            accepted += 1;
            match rebuild_error(&c) {
                Ok(e) => worst = worst.max(e),
                Err(_) => failures += 1,
            }
        }
        pass &= worst <= 1e-10 && failures == 0;
        detail.push(format!("{} {worst:.1e} ({failures} errors, {rejected} non-strict draws skipped)", model.name()));
    }
    let two = TwoLayer::default();
    let lost = matches!(
        eigendecompose(&two.c_matrix(&Vars::from_slice(&[1.0, 3.0, 1.0, -3.0]), &Geom::flat(0.0))),
        Err(LcdError::HyperbolicityLost { .. })
    );
    pass &= lost;
    detail.push(format!("complex two-layer spectrum rejected: {lost}"));
    report(9, "eigendecomposition", pass, &detail.join(", "));
}

#[test]
fn c10_riemann_problems_stay_admissible() {
    let mut pass = true;
    let mut detail = Vec::new();
    let cases: [(u8, Option<usize>, &[usize]); 4] = [(3, Some(100), &[0]), (3, Some(1000), &[0]), (6, None, &[0, 2]), (7, None, &[0])];
    for (example, nx, positive) in cases {
        let mut req = ExampleRequest::new(example, SCHEME1);
        req.overrides.nx = nx;
        let label = format!("ex{example}/{}", nx.map(|n| n.to_string()).unwrap_or_else(|| "default".into()));
        match run_example(&req) {
            Ok(result) => {
                let finite = result.run.state.iter().all(Vars::is_finite);
                let geom = cell_geometry(&result.run.solver);
                let min = result
                    .run
                    .state
                    .iter()
                    .flat_map(|u| positive.iter().map(move |&k| u[k]))
                    .fold(f64::MAX, f64::min);
                let model_ok = match &result.run.solver {
                    Solver::OneD(p) => result.run.state.iter().zip(&geom).all(|(u, g)| p.model.check_state(u, g).is_ok()),
                    Solver::TwoD(_) => false,
                };
                let ok = finite && min > 0.0 && model_ok;
                pass &= ok;
                detail.push(format!("{label} min {min:.3e} at t = {}", result.outcome.summary.time));
            }
            Err(e) => {
                pass = false;
                detail.push(format!("{label} failed: {e}"));
            }
        }
    }
    report(10, "Riemann problems stay finite and positive", pass, &detail.join(", "));
}

#[test]
fn c11_rk3_is_third_order() {
    let error = |steps: usize| {
        let dt = 2.0 / steps as f64;
        let mut u = vec![1.0_f64];
        for n in 0..steps {
            let t0 = n as f64 * dt;
            // Time enters through the stage times t0, t0 + dt, t0 + dt/2.
            let mut stage = 0;
            u = ssp_rk3_step::<f64, (), _>(&u, dt, |v| {
                let t = t0 + [0.0, dt, 0.5 * dt][stage];
                stage += 1;
                Ok(vec![v[0] * t.cos()])
            })
            .unwrap();
        }
        (u[0] - 2f64.sin().exp()).abs()
    };
    let errs: Vec<f64> = [20, 40, 80, 160].map(error).to_vec();
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let pass = orders.iter().all(|p| *p >= 2.9);
    report(11, "SSP-RK3 temporal order", pass, &format!("orders {orders:.3?}"));
}
