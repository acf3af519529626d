//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::time::{Duration, Instant};

use magnomech::figures::{self, baseline, fig2c_params, FIG5_COUPLINGS};
use magnomech::floquet::floquet_nsd;
use magnomech::steadystate::{lyapunov_residual, quadrature_model};
use magnomech::{
    nsd_components, nsd_zero_freq, optimize_gplus, steady_covariance, symplectic_eigenvalues,
    Objective, ParamField, SystemParams,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn optimized_db(p: &SystemParams<f64>) -> f64 {
    optimize_gplus(p, Objective::RwaNsd, 0.0, FRAC_PI_2)
        .unwrap()
        .squeezing_db()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

fn timed(limit: Duration, elapsed: Duration) -> (bool, String) {
    (
        elapsed < limit,
        format!("{:.2}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs()),
    )
}

fn closed_form_vs_general() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws: Vec<_> = (0..1000).map(|_| common::stable_draw(&mut rng)).collect();
    let start = Instant::now();
    let worst = draws
        .iter()
        .map(|p| {
            rel(
                nsd_zero_freq(p).s_total,
                nsd_components(p, 0.0, FRAC_PI_2).s_total,
            )
        })
        .fold(0.0, f64::max);
    let (fast, time) = timed(Duration::from_secs(1), start.elapsed());
    outcome(
        worst < 1e-10 && fast,
        format!("worst rel diff {worst:.2e} over 1000 draws, {time}"),
    )
}

fn decoupled_cavity() -> Outcome {
    let mut worst = 0.0f64;
    for t in [0.0, 0.01, 3.0] {
        let p = baseline()
            .with(ParamField::G, 0.0)
            .and_then(|p| p.with(ParamField::GPlus, 0.6 * p.g_minus))
            .and_then(|p| p.with(ParamField::Temperature, t))
            .unwrap();
        let floor = p.thermal().n_a + 0.5;
        for w in [-TAU * 7e6, -TAU * 1e5, 0.0, TAU * 2e6, TAU * 40e6] {
            for phi in [0.0, 0.7, FRAC_PI_2, 2.5] {
                worst = worst.max(rel(nsd_components(&p, w, phi).s_total, floor));
            }
            for l in 0..=3 {
                worst = worst.max(rel(
                    floquet_nsd(&p, w, FRAC_PI_2, l).unwrap().s_total,
                    floor,
                ));
            }
        }
    }
    outcome(
        worst <= 1e-12,
        format!("worst rel deviation from N_a + 1/2: {worst:.2e}"),
    )
}

fn passivity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let p = common::stable_draw(&mut rng);
        let mut raw = *p.raw();
        raw.g_plus = 0.0;
        raw.temperature = 0.0;
        let p = raw.validate().unwrap();
        worst = worst.max((nsd_zero_freq(&p).s_total - 0.5).abs());
        worst = worst.max((nsd_components(&p, 0.0, FRAC_PI_2).s_total - 0.5).abs());
    }
    outcome(
        worst <= 1e-10,
        format!("max |s_total(0) - 1/2| = {worst:.2e} over 200 draws"),
    )
}

fn peak(name: &str, p: SystemParams<f64>, target: f64) -> Outcome {
    let start = Instant::now();
    let db = optimized_db(&p);
    let (fast, time) = timed(Duration::from_secs(5), start.elapsed());
    outcome(
        (db - target).abs() <= 1.0 && fast,
        format!("{name}: optimized squeezing {db:.2} dB (target {target} +/- 1), {time}"),
    )
}

fn temperature_robustness() -> Outcome {
    let start = Instant::now();
    let at = |t: f64| optimized_db(&baseline().with(ParamField::Temperature, t).unwrap());
    let (d4, d8) = (at(4.0), at(8.0));
    let (fast, time) = timed(Duration::from_secs(30), start.elapsed());
    outcome(
        d4 > 0.0 && d8 <= 0.0 && fast,
        format!("S(4 K) = {d4:.2} dB, S(8 K) = {d8:.2} dB, {time}"),
    )
}

fn fig4_points() -> Outcome {
    let p = fig2c_params().with(ParamField::KappaA, TAU * 3e6).unwrap();
    let wide = optimized_db(&p);
    let damped = optimized_db(&fig2c_params().with(ParamField::GammaB, TAU * 1e6).unwrap());
    // Informational: the same point with γ_b = 10⁴ rad/s instead of 2π·10⁴ rad/s.
    let alt = optimized_db(&p.with(ParamField::GammaB, 1e4).unwrap());
    outcome(
        wide > 11.0 && damped > 0.0,
        format!(
            "kappa_a/2pi = 3 MHz: {wide:.2} dB (need > 11); gamma_b/2pi = 1 MHz: {damped:.2} dB (need > 0); \
             [info] gamma_b = 1e4 rad/s: {alt:.2} dB"
        ),
    )
}

fn fig3_weak_coupling() -> Outcome {
    let start = Instant::now();
    let table = figures::fig3().unwrap();
    let (fast, time) = timed(Duration::from_secs(120), start.elapsed());
    let gm = table.numbers("g_minus_hz").unwrap();
    let db = table.numbers("squeezing_db").unwrap();
    let best = gm
        .iter()
        .zip(&db)
        .filter(|(g, _)| (g.unwrap() - 0.1e6).abs() < 1.0)
        .filter_map(|(_, d)| *d)
        .fold(f64::NEG_INFINITY, f64::max);
    let failures = db.iter().filter(|d| d.is_none()).count();
    outcome(
        best > 0.0 && fast && failures == 0,
        format!("best S at G-/2pi = 0.1 MHz: {best:.2} dB, {failures} failed points, 100x100 grid in {time}"),
    )
}

fn fig5_agreement() -> Outcome {
    let start = Instant::now();
    let mut dev = Vec::new();
    let mut l_spread = 0.0f64;
    for (name, c) in ["fig5a", "fig5b", "fig5c"].into_iter().zip(FIG5_COUPLINGS) {
        let tables = figures::fig5(name, c).unwrap();
        let l1 = tables[0].numbers("nsd_floquet_l1").unwrap();
        let l2 = tables[0].numbers("nsd_floquet_l2").unwrap();
        for (a, b) in l1.iter().zip(&l2) {
            l_spread = l_spread.max(rel(b.unwrap(), a.unwrap()));
        }
        let rwa = tables[1].numbers("nsd_rwa").unwrap()[0].unwrap();
        let fl = tables[1].numbers("nsd_floquet_l1").unwrap()[0].unwrap();
        dev.push((fl - rwa).abs() / rwa);
    }
    let (fast, time) = timed(Duration::from_secs(60), start.elapsed());
    let pass = dev[0] < 0.05 && dev[1] < 0.05 && dev[2] > 0.2 && l_spread < 1e-3 && fast;
    outcome(
        pass,
        format!(
            "|F-RWA|/RWA at RWA optimum: {:.2e}, {:.2e}, {:.2e} (g = 0.05, 0.1, 0.5 w_b); max |S(l=2)-S(l=1)|/S(l=1) = {l_spread:.1e}; {time}",
            dev[0], dev[1], dev[2]
        ),
    )
}

fn lyapunov_physicality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut worst_res, mut min_nu) = (0.0f64, f64::INFINITY);
    for _ in 0..100 {
        let p = common::stable_draw(&mut rng);
        let m = quadrature_model(&p);
        let s = steady_covariance(&p).unwrap();
        worst_res = worst_res.max(lyapunov_residual(&m.a_prime, &m.d_prime, &s.v));
        min_nu = min_nu.min(symplectic_eigenvalues(&s.v)[0]);
    }
    outcome(
        worst_res < 1e-10 && min_nu >= 0.5 - 1e-9,
        format!("max residual {worst_res:.2e}, min symplectic eigenvalue {min_nu:.12}"),
    )
}

fn fig_a_trends() -> Outcome {
    let optima = figures::fig_a().unwrap().pop().unwrap();
    let col = |name: &str| -> Vec<f64> {
        optima
            .numbers(name)
            .unwrap()
            .into_iter()
            .map(Option::unwrap)
            .collect()
    };
    let (mech, cav, out) = (
        col("g_plus_ratio_opt_mech"),
        col("g_plus_ratio_opt_cavity"),
        col("g_plus_ratio_opt_output"),
    );
    let nonincreasing = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0]);
    let nondecreasing = |v: &[f64]| v.windows(2).all(|w| w[1] >= w[0]);
    let fmt = |v: &[f64]| {
        v.iter()
            .map(|r| format!("1-{:.3e}", 1.0 - r))
            .collect::<Vec<_>>()
            .join(", ")
    };
    outcome(
        nonincreasing(&mech) && nondecreasing(&cav) && nondecreasing(&out),
        format!(
            "T = 10 mK, 100 mK, 1 K: mech [{}], cavity [{}], output [{}]",
            fmt(&mech),
            fmt(&cav),
            fmt(&out)
        ),
    )
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut notes = Vec::new();
    let mut pass = true;

    let mut phi_ok = 0;
    for _ in 0..200 {
        let p = common::stable_draw(&mut rng);
        let w = rng.gen_range(-TAU * 5e6..TAU * 5e6);
        let phi = rng.gen_range(0.0..PI);
        let at = |x| nsd_components(&p, w, x).s_b;
        let best = at(FRAC_PI_2);
        let strict = p.g_plus > 0.0 && (phi - FRAC_PI_2).abs() > 1e-3;
        if best <= at(phi) * (1.0 + 1e-12) && (!strict || best < at(phi)) {
            phi_ok += 1;
        }
    }
    pass &= phi_ok == 200;
    notes.push(format!("phi-optimality {phi_ok}/200"));

    let mut even_worst = 0.0f64;
    for _ in 0..200 {
        let p = common::stable_draw(&mut rng);
        let w = rng.gen_range(0.0..TAU * 20e6);
        let phi = rng.gen_range(0.0..PI);
        even_worst = even_worst.max(rel(
            nsd_components(&p, w, phi).s_total,
            nsd_components(&p, -w, phi).s_total,
        ));
    }
    pass &= even_worst < 1e-12;
    notes.push(format!("evenness worst {even_worst:.1e}"));

    let mut mono_ok = 0;
    for _ in 0..200 {
        let p = common::stable_draw(&mut rng);
        let w = rng.gen_range(-TAU * 5e6..TAU * 5e6);
        let phi = rng.gen_range(0.0..PI);
        let (t1, t2) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
        let (lo, hi) = (f64::min(t1, t2), f64::max(t1, t2));
        let s = |t| nsd_components(&p.with(ParamField::Temperature, t).unwrap(), w, phi).s_total;
        if s(lo) <= s(hi) {
            mono_ok += 1;
        }
    }
    pass &= mono_ok == 200;
    notes.push(format!("T-monotonicity {mono_ok}/200"));

    let mut det_ok = 0;
    for _ in 0..100 {
        let p = common::stable_draw(&mut rng);
        let a = optimize_gplus(&p, Objective::RwaNsd, 0.0, FRAC_PI_2).unwrap();
        let b = optimize_gplus(&p, Objective::RwaNsd, 0.0, FRAC_PI_2).unwrap();
        if a == b && a.value.to_bits() == b.value.to_bits() {
            det_ok += 1;
        }
    }
    pass &= det_ok == 100;
    notes.push(format!("optimizer determinism {det_ok}/100"));

    outcome(pass, notes.join(", "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("closed form vs general RWA", closed_form_vs_general),
        ("decoupled cavity", decoupled_cavity),
        ("passivity", passivity),
        ("fig2b peak", || {
            peak("gamma_b/2pi = 100 Hz", baseline(), 16.0)
        }),
        ("fig2c peak", || {
            peak("gamma_b/2pi = 10 kHz", fig2c_params(), 12.0)
        }),
        ("temperature robustness", temperature_robustness),
        ("fig4 point checks", fig4_points),
        ("fig3 weak coupling", fig3_weak_coupling),
        ("fig5 floquet agreement", fig5_agreement),
        ("lyapunov residual and physicality", lyapunov_physicality),
        ("figA trends", fig_a_trends),
        ("property suite", property_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let r = run();
        if !r.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<36} {}  {}",
            i + 1,
            name,
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
