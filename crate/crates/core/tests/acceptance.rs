//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::f64::consts::PI;
use std::process::Command;
use std::time::Instant;

use qubit_geometry::channel::{self, AffineChannel, CP_TOL};
use qubit_geometry::dynamics::{self, CouplingSpec};
use qubit_geometry::matkit::RealMatrix3;
use qubit_geometry::netsim;
use qubit_geometry::qkd::{self, Protocol};
use qubit_geometry::tetra::{self, EtaVector, CORNERS, MEMBERSHIP_TOL, VERTICES};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cp_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(1);
    let mut inside = 0;
    for _ in 0..10_000 {
        let eta = common::cube_point(&mut rng);
        let member = tetra::in_d(&eta, MEMBERSHIP_TOL);
        let weights = tetra::pauli_weights(&eta).0.iter().all(|&p| p >= -CP_TOL);
        let choi = channel::choi(&AffineChannel::diagonal(eta)).min_eigenvalue() >= -CP_TOL;
        ensure(member == weights && weights == choi, || {
            format!("disagreement at {eta}: tetra {member}, weights {weights}, choi {choi}")
        })?;
        inside += member as usize;
    }
    let elapsed = start.elapsed().as_secs_f64();
    ensure(elapsed < 10.0, || format!("took {elapsed:.2} s"))?;
    Ok(format!("10000 samples agree ({inside} CP), {elapsed:.3} s"))
}

fn best_cp_numbers() -> Outcome {
    let third = 1.0 / 3.0;
    let cases = [
        (tetra::project_to_d(&EtaVector::UNIVERSAL_NOT), EtaVector::new(-third, -third, -third)),
        (tetra::project_to_d(&EtaVector::new(1.0, 1.0, 0.0)), EtaVector::new(2.0 / 3.0, 2.0 / 3.0, third)),
        (
            tetra::project_constrained(&EtaVector::new(1.0, 1.0, 0.0), [None, None, Some(0.0)])
                .map_err(|e| e.to_string())?,
            EtaVector::new(0.5, 0.5, 0.0),
        ),
    ];
    let mut worst: f64 = 0.0;
    for (got, want) in cases {
        let err = got.max_abs_diff(&want);
        ensure(err <= 1e-12, || format!("got {got}, want {want}"))?;
        worst = worst.max(err);
    }
    Ok(format!("max deviation {worst:e}"))
}

fn projection_oracle() -> Outcome {
    let mut rng = common::rng(3);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = common::point_outside_d(&mut rng);
        let closed = tetra::project_to_d(&p);
        let grid = common::grid_projection(&p, 1e-3);
        let d = closed.dist(&grid);
        ensure(d <= 2e-3, || format!("{p}: closed form {closed}, grid {grid}"))?;
        worst = worst.max(d);
    }
    Ok(format!("100 exterior points, max distance {worst:.2e}"))
}

fn canonical_form() -> Outcome {
    let mut rng = common::rng(4);
    let mut mats: Vec<RealMatrix3> = (0..1000).map(|_| common::random_contraction(&mut rng)).collect();
    mats.push(RealMatrix3::from_diagonal(EtaVector::TRANSPOSE.0));
    mats.push(RealMatrix3::from_diagonal(EtaVector::UNIVERSAL_NOT.0));
    let negative = mats.iter().filter(|m| m.det() < 0.0).count();
    ensure(negative >= 100, || format!("only {negative} matrices with det < 0"))?;
    let mut worst: f64 = 0.0;
    for a in &mats {
        let cf = channel::canonical_form(&AffineChannel::unital(*a)).map_err(|e| e.to_string())?;
        let err = cf.reconstruct().max_abs_diff(a);
        ensure(err <= 1e-10, || format!("reconstruction error {err:e} for {:?}", a.0))?;
        ensure(cf.q.is_rotation(1e-10) && cf.r.is_rotation(1e-10), || "Q or R not a rotation".into())?;
        worst = worst.max(err);
    }
    Ok(format!("{} matrices ({negative} with det < 0), max error {worst:.2e}", mats.len()))
}

fn dynamics_checks() -> Outcome {
    let mut rng = common::rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let spec = common::random_coupling(&mut rng);
        let t = rand::Rng::random_range(&mut rng, 0.0..2.0 * PI);
        let err = dynamics::eta_of_t(&spec, t).max_abs_diff(&common::eta_from_full_evolution(&spec, t));
        ensure(err <= 1e-8, || format!("closed form off by {err:e} at t={t}"))?;
        worst = worst.max(err);
    }

    let third = 1.0 / 3.0;
    let equal = CouplingSpec::from_squared([third; 3]).map_err(|e| e.to_string())?;
    let landmarks = [
        (equal, PI / 2.0, EtaVector::new(-third, -third, -third)),
        (equal, PI / 3.0, EtaVector::new(0.0, 0.0, 0.0)),
        (equal, 2.0 * PI / 3.0, EtaVector::new(0.0, 0.0, 0.0)),
        (CouplingSpec::new([1.0, 0.0, 0.0]).unwrap(), PI / 2.0, EtaVector::ROT_X),
        (CouplingSpec::new([0.0, 1.0, 0.0]).unwrap(), PI / 2.0, EtaVector::ROT_Y),
        (CouplingSpec::new([0.0, 0.0, 1.0]).unwrap(), PI / 2.0, EtaVector::ROT_Z),
    ];
    for (spec, t, want) in landmarks {
        let got = dynamics::eta_of_t(&spec, t);
        ensure(got.max_abs_diff(&want) <= 1e-12, || format!("landmark t={t}: got {got}, want {want}"))?;
        let full = common::eta_from_full_evolution(&spec, t);
        ensure(full.max_abs_diff(&want) <= 1e-8, || format!("full evolution landmark t={t}: {full}"))?;
    }

    let mut worst_design: f64 = 0.0;
    for _ in 0..1000 {
        let target = common::point_in_d(&mut rng);
        let (spec, t) = dynamics::design_coupling(&target).map_err(|e| e.to_string())?;
        ensure((0.0..=PI / 2.0).contains(&t), || format!("t={t} outside [0, π/2]"))?;
        let err = dynamics::eta_of_t(&spec, t).max_abs_diff(&target);
        ensure(err <= 1e-10, || format!("design roundtrip off by {err:e} for {target}"))?;
        worst_design = worst_design.max(err);
    }
    Ok(format!("oracle max {worst:.2e}, 6 landmarks, design max {worst_design:.2e}"))
}

fn network_simulation() -> Outcome {
    let mut rng = common::rng(6);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let ch = common::random_unital_cp(&mut rng);
        let spec = netsim::compile(&ch).map_err(|e| e.to_string())?;
        let induced = netsim::induced_channel(&spec).map_err(|e| e.to_string())?;
        let d = channel::choi(&induced).distance(&channel::choi(&ch));
        ensure(d <= 1e-10, || format!("Choi distance {d:e}"))?;
        worst = worst.max(d);
    }

    let n = 100_000u64;
    let depol = netsim::compile(&AffineChannel::diagonal(EtaVector::new(0.0, 0.0, 0.0))).map_err(|e| e.to_string())?;
    let rho0 = channel::basis_state(2, 0);
    let run = netsim::run_sampled(&depol, &rho0, n, 20_240_601).map_err(|e| e.to_string())?;
    let td = run.estimate.trace_distance(&channel::DensityMatrix::maximally_mixed());
    let bound = 5.0 / (n as f64).sqrt();
    ensure(td < bound, || format!("sampled trace distance {td:e} >= {bound:e}"))?;
    Ok(format!("1000 channels, max Choi distance {worst:.2e}; sampled error {td:.2e} < {bound:.2e}"))
}

fn qkd_checks() -> Outcome {
    let mut worst: f64 = 0.0;
    for d in [0.05, 0.1, 0.15, 0.25] {
        for p in [Protocol::FourState, Protocol::SixState] {
            let closed = qkd::optimal_attack(p, d).map_err(|e| e.to_string())?.eta;
            let grid = qkd::brute_force_optimum(p, d, 1e-3).map_err(|e| e.to_string())?;
            let err = closed.max_abs_diff(&grid);
            ensure(err <= 1e-3, || format!("{p} d_max={d}: closed {closed}, grid {grid}"))?;
            worst = worst.max(err);
        }
    }

    let mut rng = common::rng(7);
    let mut worst_dilation: f64 = 0.0;
    for k in 0..1000 {
        let p = if k % 2 == 0 { Protocol::FourState } else { Protocol::SixState };
        let eta = loop {
            let a = rand::Rng::random_range(&mut rng, -1.0..=1.0);
            let b = rand::Rng::random_range(&mut rng, -1.0..=1.0);
            let e = match p {
                Protocol::FourState => EtaVector::new(a, b, a),
                Protocol::SixState => EtaVector::new(a, a, a),
            };
            if tetra::in_d(&e, 0.0) {
                break e;
            }
        };
        let dil = qkd::probe_overlaps_dilation(&eta).map_err(|e| e.to_string())?.overlap;
        let err = (dil - qkd::overlap(p, &eta).map_err(|e| e.to_string())?).abs();
        ensure(err <= 1e-12, || format!("dilation off by {err:e} at {eta}"))?;
        worst_dilation = worst_dilation.max(err);
    }

    let four = qkd::optimal_attack(Protocol::FourState, 0.25).map_err(|e| e.to_string())?.p_c;
    let six = qkd::optimal_attack(Protocol::SixState, 0.25).map_err(|e| e.to_string())?.p_c;
    let want_four = 0.5 + 0.5 * (11.0f64 / 12.0).sqrt();
    let want_six = 0.5 + 0.5 * (2.0f64 / 3.0).sqrt();
    ensure((four - want_four).abs() <= 1e-12, || format!("four-state p_c {four}"))?;
    ensure((six - want_six).abs() <= 1e-12, || format!("six-state p_c {six}"))?;
    Ok(format!(
        "grid max {worst:.1e}, dilation max {worst_dilation:.1e}, p_c {four:.5} / {six:.5}"
    ))
}

fn sw_checks() -> Outcome {
    let mut rng = common::rng(8);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let eta = common::cube_point(&mut rng);
        let sw = tetra::sw_decompose(&eta).map_err(|e| e.to_string())?;
        let err = sw.reconstruct().max_abs_diff(&eta);
        ensure(err <= 1e-12, || format!("reconstruction off by {err:e} at {eta}"))?;
        ensure(tetra::in_d(&sw.cp1, MEMBERSHIP_TOL), || format!("cp1 {} outside D", sw.cp1))?;
        ensure(VERTICES.contains(&sw.cp2), || format!("cp2 {} not a vertex", sw.cp2))?;
        ensure((0.0..=1.0).contains(&sw.p), || format!("p = {}", sw.p))?;
        worst = worst.max(err);
    }
    let mut images = Vec::new();
    for corner in CORNERS {
        let sw = tetra::sw_decompose(&corner).map_err(|e| e.to_string())?;
        ensure(tetra::compose(&sw.cp2, &EtaVector::TRANSPOSE) == corner, || format!("corner {corner}"))?;
        images.push(tetra::compose(&corner, &EtaVector::TRANSPOSE));
    }
    ensure(VERTICES.iter().all(|v| images.contains(v)), || "corners do not map onto the vertices".into())?;
    Ok(format!("10000 points, max error {worst:.1e}; corner identities exact"))
}

fn cli_goldens() -> Outcome {
    let golden = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");
    let cases: [(&[&str], &str); 3] = [
        (&["check", "--eta", "-1", "-1", "-1"], "check_universal_not.json"),
        (&["project", "--eta", "-1", "-1", "-1"], "project_universal_not.json"),
        (&["qkd", "--protocol", "four-state", "--dmax", "0.25"], "qkd_four_state_d025.json"),
    ];
    for (args, file) in cases {
        let out = Command::new(env!("CARGO_BIN_EXE_qgeom")).args(args).output().map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("{args:?} exited with {}", out.status))?;
        let want = std::fs::read(format!("{golden}/{file}")).map_err(|e| format!("{file}: {e}"))?;
        ensure(out.stdout == want, || {
            format!("{args:?}: got {:?}, want {:?}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&want))
        })?;
    }
    Ok("3 invocations byte-identical".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("CP equivalence", cp_equivalence),
        ("best CP approximations", best_cp_numbers),
        ("projection oracle", projection_oracle),
        ("canonical form", canonical_form),
        ("dynamics", dynamics_checks),
        ("network simulation", network_simulation),
        ("QKD", qkd_checks),
        ("decomposition", sw_checks),
        ("CLI goldens", cli_goldens),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
