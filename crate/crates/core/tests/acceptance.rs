//! Acceptance criteria 1-8. Runs as a plain binary so that the verdict line
//! of every criterion is always printed.
//!
//! Outcomes: PASS, FAIL, XFAIL (failure that matches a documented defect in
//! the reference data), XPASS (documented defect did not reproduce). The
//! process fails only when an outcome differs from its recorded expectation.

use std::process::ExitCode;
use std::time::Instant;

use radaim_core::aim::{find_eigenvalues, AimOptions};
use radaim_core::oracle::{lowest_eigenvalues, solve_levels, TridiagonalSystem};
use radaim_core::potential::{relative_difference as rel, GridSpec, KratzerReading, Potential, PotentialModel};
use radaim_core::special::{self, laguerre_poly, LaguerreSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Outcome {
    Pass,
    Fail,
}

struct Verdict {
    outcome: Outcome,
    detail: String,
    /// Outcome recorded in advance when it is not PASS, with the reason.
    expected: Option<(Outcome, &'static str)>,
}

fn verdict(ok: bool, detail: String) -> Verdict {
    Verdict { outcome: if ok { Outcome::Pass } else { Outcome::Fail }, detail, expected: None }
}

fn models() -> [PotentialModel; 4] {
    [
        Potential::Mie { v0: 1.0, a: 1.0 },
        Potential::Kratzer { de: 5.0, re: 1.0 },
        Potential::Coulomb { coupling: 1.0 },
        Potential::Pseudoharmonic { v0: 1.0, r0: 1.0 },
    ]
    .map(|p| PotentialModel::natural(p).unwrap())
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}

/// Largest relative gap between oracle and closed form over n <= 2, l <= 2.
fn oracle_gap(model: &PotentialModel, reading: KratzerReading) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for l in 0..=2 {
        let e = solve_levels(model, l, 3).map_err(|e| format!("{} l={l}: {e}", model.name()))?;
        for (n, got) in e.iter().enumerate() {
            worst = worst.max(rel(*got, model.closed_form_energy_with(n, l, reading)));
        }
    }
    Ok(worst)
}

fn criterion_1() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for m in models() {
        match oracle_gap(&m, KratzerReading::Adopted) {
            Ok(g) => {
                ok &= g <= 1e-5;
                parts.push(format!("{} {g:.1e}", m.name()));
            }
            Err(e) => {
                ok = false;
                parts.push(e);
            }
        }
    }
    verdict(ok, format!("oracle vs closed form, n,l <= 2, tol 1e-5: {}", parts.join(", ")))
}

fn criterion_2() -> Verdict {
    let opts = AimOptions::default();
    let mut parts = Vec::new();
    let mut ok = true;
    for m in models() {
        let mut worst = 0.0f64;
        let mut k_used = 0;
        for l in 0..=2 {
            match find_eigenvalues(&m, l, 3, m.default_bracket(l, 3), &opts) {
                Ok(r) => {
                    for (n, rep) in r.iter().enumerate() {
                        worst = worst.max(rel(rep.energy, m.closed_form_energy(n, l)));
                        k_used = k_used.max(rep.iterations_used);
                    }
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!("{} l={l}: {e}", m.name()));
                }
            }
        }
        ok &= worst <= 1e-7 && k_used <= 60;
        parts.push(format!("{} {worst:.1e} (k={k_used})", m.name()));
    }
    verdict(ok, format!("AIM vs closed form, n,l <= 2, tol 1e-7: {}", parts.join(", ")))
}

fn criterion_3() -> Verdict {
    let c = &models()[2];
    let mut worst = 0.0f64;
    for n in 0..=6usize {
        for l in 0..=6usize {
            let m = (n + l + 1) as f64;
            worst = worst.max(rel(c.closed_form_energy(n, l), -1.0 / (2.0 * m * m)));
        }
    }
    let mut degeneracy = 0.0f64;
    for total in 0..=5usize {
        let e = c.closed_form_energy(total, 0);
        for l in 0..=total {
            degeneracy = degeneracy.max(rel(c.closed_form_energy(total - l, l), e));
        }
    }
    verdict(
        worst <= 1e-14 && degeneracy <= 1e-14,
        format!("Coulomb -1/(2(n+l+1)^2): max rel {worst:.1e}; degeneracy spread {degeneracy:.1e}"),
    )
}

/// Coefficients in ρ of a fixture polynomial at a given γ.
type Fixture = fn(f64) -> Vec<f64>;

fn mie_fixtures() -> [(&'static str, Fixture); 3] {
    [
        ("f1", |g| vec![2.0 + 2.0 * g, -1.0]),
        ("f2", |g| vec![6.0 + 4.0 * g * g + 10.0 * g, -g - 6.0, 1.0]),
        ("f3", |g| {
            vec![
                24.0 + 52.0 * g + 36.0 * g * g + 8.0 * g.powi(3),
                -36.0 - 42.0 * g - 12.0 * g * g,
                12.0 + 6.0 * g,
                -1.0,
            ]
        }),
    ]
}

fn pseudoharmonic_fixtures() -> [(&'static str, Fixture); 3] {
    [
        ("f1", |g| vec![3.0 + 4.0 * g, -2.0]),
        ("f2", |g| vec![15.0 + 32.0 * g + 16.0 * g * g, -16.0 * g - 20.0, 1.0]),
        ("f3", |g| {
            vec![
                105.0 + 284.0 * g + 240.0 * g * g + 64.0 * g.powi(3),
                -288.0 * g - 96.0 * g * g - 210.0,
                84.0 + 48.0 * g,
                -8.0,
            ]
        }),
    ]
}

/// Worst relative coefficient mismatch between `fixture` and the best
/// single-scalar multiple of `L_n^{(w(γ))}`, over the γ instantiations.
fn fixture_mismatch(n: usize, fixture: Fixture, w_of: impl Fn(f64) -> f64) -> f64 {
    let gammas = [0.0, (5f64.sqrt() - 1.0) / 2.0, 2.0];
    max_of(gammas.iter().map(|&g| {
        let p = fixture(g);
        let q = laguerre_poly(LaguerreSpec::new(n, w_of(g)).unwrap()).coeffs().to_vec();
        if p.len() != q.len() {
            return f64::INFINITY;
        }
        let s = p.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>() / q.iter().map(|b| b * b).sum::<f64>();
        let scale = max_of(p.iter().map(|x| x.abs()));
        max_of(p.iter().zip(&q).map(|(a, b)| (a - s * b).abs())) / scale
    }))
}

fn criterion_4() -> Verdict {
    let tol = 1e-10;
    let mut failed = Vec::new();
    let mut parts = Vec::new();
    for (n, (name, f)) in mie_fixtures().into_iter().enumerate() {
        let d = fixture_mismatch(n + 1, f, |g| 2.0 * g + 1.0);
        parts.push(format!("mie {name} {d:.1e}"));
        if d > tol {
            failed.push(format!("mie {name}"));
        }
    }
    for (n, (name, f)) in pseudoharmonic_fixtures().into_iter().enumerate() {
        let d = fixture_mismatch(n + 1, f, |g| 2.0 * g + 0.5);
        let status = match (name, d <= tol) {
            ("f1", true) => "ok",
            ("f1", false) => {
                failed.push("pseudoharmonic f1".into());
                "FAIL"
            }
            (_, false) => "XFAIL",
            (_, true) => "XPASS",
        };
        parts.push(format!("pseudoharmonic {name} {d:.1e} {status}"));
    }
    // Mie f2 with the linear coefficient -(4γ+6) instead of -(γ+6).
    let corrected = fixture_mismatch(2, |g| vec![6.0 + 4.0 * g * g + 10.0 * g, -4.0 * g - 6.0, 1.0], |g| 2.0 * g + 1.0);
    parts.push(format!("mie f2 with -4γρ {corrected:.1e}"));
    Verdict {
        outcome: if failed.is_empty() { Outcome::Pass } else { Outcome::Fail },
        detail: format!(
            "fixtures vs scaled Laguerre, gamma in {{0, 0.618, 2}}, tol 1e-10: {}; failing: [{}]",
            parts.join(", "),
            failed.join(", ")
        ),
        expected: Some((
            Outcome::Fail,
            "Mie f2 fixture carries -γρ where every scalar multiple of L2^(2γ+1) has -4γρ; matches only at γ=0",
        )),
    }
}

fn criterion_5() -> Verdict {
    let mut ok = true;
    let mut worst_norm = 0.0f64;
    let mut worst_res = 0.0f64;
    let (mut lo_ratio, mut hi_ratio) = (f64::INFINITY, 0.0f64);
    let mut issues = Vec::new();
    for m in models() {
        for n in 0..=2 {
            for l in 0..=1 {
                let w = match m.radial_wavefunction_auto(n, l) {
                    Ok(w) => w,
                    Err(e) => {
                        ok = false;
                        issues.push(format!("{} ({n},{l}): {e}", m.name()));
                        continue;
                    }
                };
                let h = w.step().unwrap();
                let r2: Vec<f64> = w.values.iter().zip(&w.r_grid).map(|(v, r)| v * v * r * r).collect();
                let norm = special::simpson(&r2, h);
                let fine_grid = GridSpec {
                    r_min: w.r_grid[0],
                    r_max: *w.r_grid.last().unwrap(),
                    points: 2 * w.r_grid.len() - 1,
                }
                .grid();
                let fine = m.radial_wavefunction(n, l, &fine_grid).unwrap();
                let ratio = w.residual_l2 / fine.residual_l2;
                worst_norm = worst_norm.max((norm - 1.0).abs());
                worst_res = worst_res.max(w.residual_l2);
                lo_ratio = lo_ratio.min(ratio);
                hi_ratio = hi_ratio.max(ratio);
                if w.node_count != n {
                    ok = false;
                    issues.push(format!("{} ({n},{l}) has {} nodes", m.name(), w.node_count));
                }
            }
        }
    }
    ok &= worst_norm <= 1e-8 && worst_res <= 1e-5 && lo_ratio >= 3.5 && hi_ratio <= 4.5;
    verdict(
        ok,
        format!(
            "24 wavefunctions: nodes {}; max |norm-1| {worst_norm:.1e}; max residual {worst_res:.1e}; \
             halving ratio in [{lo_ratio:.2}, {hi_ratio:.2}]{}",
            if issues.is_empty() { "ok" } else { "mismatch" },
            if issues.is_empty() { String::new() } else { format!("; {}", issues.join("; ")) }
        ),
    )
}

fn criterion_6() -> Verdict {
    let mut ok = true;
    let mut rho_spread = 0.0f64;
    let mut rescale_spread = 0.0f64;
    let mut issues = Vec::new();
    for m in models() {
        for l in 0..=1 {
            let (c, _) = m.seed_coefficients(l, m.closed_form_energy(0, l)).unwrap();
            let base = c.max(1.0);
            let bracket = m.default_bracket(l, 3);
            let mut runs = Vec::new();
            for rho0 in [base / 2.0, base, 2.0 * base] {
                let o = AimOptions { rho0: Some(rho0), ..AimOptions::default() };
                match find_eigenvalues(&m, l, 3, bracket, &o) {
                    Ok(r) => runs.push(r.iter().map(|x| x.energy).collect::<Vec<_>>()),
                    Err(e) => {
                        ok = false;
                        issues.push(format!("{} l={l} rho0={rho0}: {e}", m.name()));
                    }
                }
            }
            for a in &runs {
                for b in &runs {
                    rho_spread = rho_spread.max(max_of(a.iter().zip(b).map(|(x, y)| (x - y).abs())));
                }
            }
            let low_k = AimOptions { k_max: 12, ..AimOptions::default() };
            let scaled = find_eigenvalues(&m, l, 3, bracket, &low_k);
            let raw = find_eigenvalues(&m, l, 3, bracket, &AimOptions { rescale: false, ..low_k });
            match (scaled, raw) {
                (Ok(a), Ok(b)) => {
                    rescale_spread =
                        rescale_spread.max(max_of(a.iter().zip(&b).map(|(x, y)| (x.energy - y.energy).abs())))
                }
                (a, b) => {
                    ok = false;
                    issues.push(format!("{} l={l} rescale run: {:?} / {:?}", m.name(), a.err(), b.err()));
                }
            }
        }
    }
    ok &= rho_spread <= 1e-7 && rescale_spread <= 1e-10;
    verdict(
        ok,
        format!(
            "rho0 in {{m/2, m, 2m}}: max spread {rho_spread:.1e} (tol 1e-7); rescaling on/off at k <= 12: \
             {rescale_spread:.1e} (tol 1e-10){}",
            if issues.is_empty() { String::new() } else { format!("; {}", issues.join("; ")) }
        ),
    )
}

/// Eigenvalues of a small symmetric tridiagonal matrix from sign changes of
/// its Leibniz-expanded characteristic polynomial.
fn brute_force_spectrum(s: &TridiagonalSystem) -> Vec<f64> {
    let n = s.dim();
    let entry = |i: usize, j: usize| -> f64 {
        if i == j {
            s.diag[i]
        } else if i + 1 == j {
            s.offdiag[i]
        } else if j + 1 == i {
            s.offdiag[j]
        } else {
            0.0
        }
    };
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for k in 0..n {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..=p.len()).map(move |pos| {
                    let mut q = p.clone();
                    q.insert(pos, k);
                    q
                })
            })
            .collect();
    }
    let det = |x: f64| -> f64 {
        perms
            .iter()
            .map(|p| {
                let inv = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
                let sign = if inv % 2 == 0 { 1.0 } else { -1.0 };
                sign * (0..n).map(|i| entry(i, p[i]) - if i == p[i] { x } else { 0.0 }).product::<f64>()
            })
            .sum()
    };
    let (lo, hi) = s.gershgorin();
    let steps = 20000;
    let mut roots = Vec::new();
    let mut prev = (lo - 1e-3, det(lo - 1e-3));
    for i in 1..=steps {
        let x = lo - 1e-3 + (hi - lo + 2e-3) * i as f64 / steps as f64;
        let fx = det(x);
        if fx.signum() != prev.1.signum() {
            let (mut a, mut b) = (prev.0, x);
            for _ in 0..100 {
                let m = 0.5 * (a + b);
                if det(m).signum() == prev.1.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev = (x, fx);
    }
    roots
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut brute_gap = 0.0f64;
    let mut ok = true;
    for _ in 0..20 {
        let d: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
        let e: Vec<f64> =
            (0..4).map(|_| rng.random_range(0.2..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
        let s = TridiagonalSystem::new(d, e).unwrap();
        let brute = brute_force_spectrum(&s);
        let ev = lowest_eigenvalues(&s, 5).unwrap();
        ok &= brute.len() == 5;
        brute_gap = brute_gap.max(max_of(ev.iter().zip(&brute).map(|(a, b)| (a - b).abs())));
    }
    let n = 100;
    let lap = TridiagonalSystem::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
    let ev = lowest_eigenvalues(&lap, n).unwrap();
    let lap_gap = max_of(ev.iter().enumerate().map(|(k, v)| {
        (v - (2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos())).abs()
    }));
    ok &= brute_gap <= 1e-10 && lap_gap <= 1e-12;
    verdict(
        ok,
        format!("20 random 5x5 vs Leibniz root scan: {brute_gap:.1e} (tol 1e-10); Laplacian N={n}: {lap_gap:.1e} (tol 1e-12)"),
    )
}

fn criterion_8() -> Verdict {
    let k = &models()[1];
    let adopted = oracle_gap(k, KratzerReading::Adopted);
    let literal = oracle_gap(k, KratzerReading::Literal);
    match (adopted, literal) {
        (Ok(a), Ok(l)) => verdict(
            a <= 1e-5 && l > 0.1,
            format!("Kratzer adopted reading max rel {a:.1e} (must be <= 1e-5); literal reading {l:.2} (must be > 0.1)"),
        ),
        (a, l) => verdict(false, format!("oracle error: {:?} / {:?}", a.err(), l.err())),
    }
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("closed form vs oracle", criterion_1),
        ("AIM reproduces closed forms", criterion_2),
        ("Coulomb exactness", criterion_3),
        ("eigenfunction fixtures", criterion_4),
        ("wavefunction validity", criterion_5),
        ("AIM robustness", criterion_6),
        ("tridiagonal solver", criterion_7),
        ("Kratzer reading", criterion_8),
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let v = run();
        let secs = t.elapsed().as_secs_f64();
        let expected = v.expected.map_or(Outcome::Pass, |e| e.0);
        let tag = match v.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
        };
        println!("criterion {} {tag} [{name}] ({secs:.1}s) {}", i + 1, v.detail);
        if let Some((_, why)) = v.expected {
            println!("    known defect: {why}");
        }
        if v.outcome == Outcome::Pass {
            passed += 1;
        }
        if v.outcome != expected {
            unexpected += 1;
            println!("    UNEXPECTED: expected {expected:?}");
        }
    }
    println!("acceptance: {passed}/8 pass, {unexpected} unexpected outcome(s)");
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
