use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::checks::CheckConfig;
use super::*;

fn params(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
}

fn base(name: &str, description: &str, operator: &str, n: usize, dim: usize, t_max: f64, samples: usize) -> CaseConfig {
    CaseConfig {
        name: name.into(),
        description: description.into(),
        operator: operator.into(),
        params: BTreeMap::new(),
        grid: GridConfig { n, length: 2.0 * PI, dim },
        time: TimeConfig { t_max, samples },
        source: SourceConfig::default(),
        densities: Vec::new(),
        checks: Vec::new(),
        solver: SolverConfig::default(),
        fractional: None,
    }
}

fn gauss(sigma: f64, amplitude: f64) -> ProfileConfig {
    ProfileConfig::gaussian(sigma, amplitude)
}

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn conserved(d: &str, tol: f64) -> CheckConfig {
    CheckConfig::Conserved { density: d.into(), tol: Some(tol) }
}

fn zero(d: &str, tol: f64) -> CheckConfig {
    CheckConfig::IdenticallyZero { density: d.into(), tol: Some(tol) }
}

fn monotone(d: &str) -> CheckConfig {
    CheckConfig::MonotoneDecreasing { density: d.into(), tol: Some(1e-10) }
}

fn stationary(ds: &[&str]) -> Vec<CheckConfig> {
    ds.iter().map(|d| CheckConfig::Stationary { density: d.to_string(), tol: Some(1e-8) }).collect()
}

fn advection() -> CaseConfig {
    let mut c = base(
        "advection",
        "Linear advection u_t + v u_x = 0 from a Gaussian. v = 1, n = 256 and horizon 4 are registry choices.",
        "dt + v dx",
        256,
        1,
        4.0,
        40,
    );
    c.params = params(&[("v", "1")]);
    c.source.ics = vec![gauss(0.3, 1.0)];
    c.densities = strings(&["trivial", "mass", "time_reversal", "higher:2:time_reversal", "higher:3:time_reversal", "higher:2:mass", "P:dt", "normal"]);
    c.checks = vec![
        conserved("trivial", 1e-8),
        conserved("mass", 1e-8),
        conserved("time_reversal", 1e-8),
        conserved("higher:2:time_reversal", 1e-8),
        conserved("higher:3:time_reversal", 1e-8),
        zero("higher:2:mass", 1e-12),
    ];
    c.checks.extend(stationary(&["trivial", "time_reversal", "P:dt", "normal"]));
    c.checks.push(CheckConfig::CombinedStationary {
        densities: ["trivial".into(), "P:dt".into()],
        weights: ["2".into(), "-3".into()],
        tol: Some(1e-8),
    });
    c
}

fn advection_3d() -> CaseConfig {
    let mut c = base(
        "advection-3d",
        "Advection along the diagonal on a periodic cube. n = 32³ and horizon 1 are registry choices.",
        "dt + v (dx + dy + dz)",
        32,
        3,
        1.0,
        10,
    );
    c.params = params(&[("v", "1")]);
    c.source.ics = vec![gauss(0.5, 1.0)];
    c.densities = strings(&["trivial", "mass"]);
    c.checks = vec![conserved("trivial", 1e-8), conserved("mass", 1e-8)];
    c.checks.extend(stationary(&["trivial"]));
    c.solver.stationarity = StationarityConfig { dt: 1e-2, ..StationarityConfig::default() };
    c
}

fn diffusion() -> CaseConfig {
    let mut c = base(
        "diffusion",
        "Heat equation u_t = D u_xx. D = 1/10 and horizon 2 are registry choices.",
        "dt - D lap",
        256,
        1,
        2.0,
        20,
    );
    c.params = params(&[("D", "1/10")]);
    c.source.ics = vec![gauss(0.3, 1.0)];
    c.densities = strings(&["trivial", "mass", "normal", "time_reversal"]);
    c.checks = vec![conserved("mass", 1e-10), monotone("trivial"), zero("normal", 1e-12), zero("time_reversal", 1e-12)];
    c.checks.extend(stationary(&["trivial", "normal", "time_reversal"]));
    c
}

fn airy() -> CaseConfig {
    let mut c = base(
        "airy",
        "Airy equation u_t + u_xxx = 0. n = 512 and horizon 1 are registry choices.",
        "dt + dx^3",
        512,
        1,
        1.0,
        20,
    );
    c.source.ics = vec![gauss(0.3, 1.0)];
    c.densities = strings(&["mass", "time_reversal", "quad:dt", "trivial"]);
    c.checks = vec![
        conserved("mass", 1e-10),
        conserved("time_reversal", 1e-8),
        CheckConfig::OnShell { density: "time_reversal".into(), reference: "quad:dt".into(), factor: "2".into(), tol: Some(1e-10) },
        CheckConfig::AiryInvariants { n_max: 2 },
    ];
    c.checks.extend(stationary(&["time_reversal", "trivial"]));
    c
}

fn beam() -> CaseConfig {
    let mut c = base(
        "beam",
        "Beam-type equation u_t + u_xxxx = 0. Horizon 1 is a registry choice.",
        "dt + dx^4",
        256,
        1,
        1.0,
        20,
    );
    c.source.ics = vec![gauss(0.3, 1.0)];
    c.densities = strings(&["mass", "normal", "trivial"]);
    c.checks = vec![conserved("mass", 1e-10), zero("normal", 1e-12), monotone("trivial")];
    c.checks.extend(stationary(&["trivial", "normal"]));
    c
}

fn telegraph() -> CaseConfig {
    let mut c = base(
        "telegraph",
        "Telegraph equation u_tt + d0 u_t = u_xx. d0 = 1/2 is a registry choice; samples are 1e-3 apart for the rate identity.",
        "dt^2 + d0 dt - lap",
        256,
        1,
        4.0,
        4000,
    );
    c.params = params(&[("d0", "1/2")]);
    c.source.ics = vec![gauss(0.3, 1.0), gauss(0.3, 0.5)];
    c.densities = strings(&["energy", "dalembert", "trivial"]);
    c.checks = vec![monotone("energy"), CheckConfig::RateIdentity { param: "d0".into(), tol: Some(1e-4) }];
    c.checks.extend(stationary(&["dalembert", "trivial"]));
    c
}

fn shear_wave() -> CaseConfig {
    let mut c = base(
        "shear-wave",
        "Shear wave (dt^2 - c0^2 dt lap) u = ψ δ'. The solution obeys u_t = c0^2 u_xx for t > 0. c0 = 1.",
        "dt^2 - c0^2 dt lap",
        256,
        1,
        1.0,
        20,
    );
    c.params = params(&[("c0", "1")]);
    c.source.impulses = vec![ImpulseConfig { profile: gauss(0.3, 1.0), order: 1 }];
    c.densities = strings(&["mass", "trivial"]);
    c.checks = vec![CheckConfig::Residual { operator: "dt - c0^2 lap".into(), tol: Some(1e-10) }, conserved("mass", 1e-10)];
    c.checks.extend(stationary(&["trivial"]));
    c
}

fn nsw() -> CaseConfig {
    let mut c = base(
        "nsw",
        "Third-order viscous wave equation tau0 u_ttt + u_tt = Δu + tau1 Δu_t. tau0 = 1/2 and tau1 = 1/4 are registry choices. \
         The order-6 normal equation takes u3 = (−u2 + Δu0 + tau1 Δu1)/tau0 and its analogues for u4, u5.",
        "tau0 dt^3 + dt^2 - lap - tau1 dt lap",
        256,
        1,
        1.0,
        10,
    );
    c.params = params(&[("tau0", "1/2"), ("tau1", "1/4")]);
    c.source.ics = vec![
        gauss(0.3, 1.0),
        gauss(0.3, 0.5),
        ProfileConfig { apply: Some("lap".into()), ..gauss(0.3, 1.0) },
    ];
    c.densities = strings(&["normal", "trivial"]);
    c.checks = vec![CheckConfig::NormalEquivalence { tol: Some(1e-8) }];
    c.checks.extend(stationary(&["trivial", "normal"]));
    c
}

fn wave_delta_trick() -> CaseConfig {
    let mut c = base(
        "wave-delta-trick",
        "Wave equation driven by φ δ'' and by its reduction φ_xx δ. Horizon 2 is a registry choice.",
        "dt^2 - lap",
        256,
        1,
        2.0,
        20,
    );
    c.source.impulses = vec![ImpulseConfig { profile: gauss(0.3, 1.0), order: 2 }];
    c.densities = strings(&["energy", "dalembert"]);
    c.checks = vec![CheckConfig::DeltaTrick { tol: Some(1e-12) }, conserved("energy", 1e-8)];
    c.checks.extend(stationary(&["dalembert"]));
    c
}

fn fractional_half() -> CaseConfig {
    let mut c = base(
        "fractional-half",
        "Half-order equation ∂^(1/2) u + v u_x = φ ∂^(-1/2) δ, solved as u_t − v² u_xx = φ δ − (v φ_x) t^(-1/2)/√π. \
         v = 1/2, n = 64 and horizon 1 are registry choices.",
        "dt - v^2 dx^2",
        64,
        1,
        1.0,
        10,
    );
    c.params = params(&[("v", "1/2")]);
    c.source.ics = vec![gauss(0.3, 1.0)];
    c.fractional = Some(FractionalConfig { b: "v dx".into() });
    c.densities = strings(&["mass", "trivial"]);
    c.checks = vec![conserved("mass", 1e-6), CheckConfig::FractionalOracle { gl_dt: 1e-4, tol: Some(1e-4) }];
    c.checks.extend(stationary(&["trivial"]));
    c
}

fn schrodinger() -> CaseConfig {
    let mut c = base(
        "schrodinger",
        "Free Schrödinger equation i u_t + u_xx/2 = i φ δ, so u(0+) = φ. Horizon 1 is a registry choice.",
        "i dt + 1/2 dx^2",
        256,
        1,
        1.0,
        20,
    );
    c.source.ics = vec![gauss(0.3, 1.0)];
    c.densities = strings(&["probability"]);
    c.checks = vec![conserved("probability", 1e-10)];
    c.checks.extend(stationary(&["probability"]));
    c
}

/// The eleven builtin case configs, in listing order.
pub fn builtin_configs() -> Vec<CaseConfig> {
    vec![
        advection(),
        advection_3d(),
        diffusion(),
        airy(),
        beam(),
        telegraph(),
        shear_wave(),
        nsw(),
        wave_delta_trick(),
        fractional_half(),
        schrodinger(),
    ]
}
