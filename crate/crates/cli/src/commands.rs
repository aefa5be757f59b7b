//! One function per subcommand: compute, then emit a JSON record (and CSV
//! grids when an output directory is given).

use crate::args::{BifurcateArgs, DirectionArg, FindArg, FrontArgs, ReducedArgs, ShootArgs, ShootFlags, SimulateArgs, SpectrumArgs, VerifyArgs, WaveArgs};
use crate::config::RunConfig;
use crate::output::{complex, row, state, Output};
use crate::CliError;
use modfront_core::acceptance::{self, CriterionResult};
use modfront_core::bifurcation::{continue_branch, find_hopf, find_torus_bifurcation, origin_spectrum_scan, BifurcationPoint, BranchPoint};
use modfront_core::dynamics::{shoot_scenario, HeteroclinicResult, ShootDirection, ShootOptions};
use modfront_core::front::{reconstruct, HeteroclinicData};
use modfront_core::model::{classify_and_validate, front_speed, Scenario, ScenarioTag};
use modfront_core::pdesim::{front_initial_data, measure_front_speed, measure_phase_speed, observe, FrontProbe, FrontRun, Stepper};
use modfront_core::reduced::{build, build_s1, build_s4, Form, ReducedVectorField};
use modfront_core::spectrum::{central_partition, Family, PartitionOptions};
use modfront_core::wave::{leading_order, refine_fixed_point, wave_profile, GalerkinResidual, WaveSolution};
use modfront_core::ModelParams;
use serde_json::{json, Value};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Coordinate names of a reduced form, in state order.
pub fn coordinate_names(form: Form) -> &'static [&'static str] {
    match form {
        Form::S1Complex => &["A_re", "A_im"],
        Form::S1Radius => &["r"],
        Form::S2 => &["A_re", "A_im", "At_re", "At_im"],
        Form::S3Complex => &["A_re", "A_im", "B1"],
        Form::S3Polar => &["r", "B1"],
        Form::S4Full | Form::S4Fast => &["r", "phi", "B1"],
        Form::S4Slow => &["r", "phi"],
        Form::S5 => &["A_re", "A_im", "At_re", "At_im", "B1"],
    }
}

fn config_value(rc: &RunConfig) -> Value {
    serde_json::to_value(rc).expect("configuration serializes")
}

fn checked_scenario(rc: &RunConfig, command: &str, tol: f64) -> Result<(ModelParams, Scenario), CliError> {
    let s = rc.require_scenario(command)?;
    s.check(&rc.params, tol)?;
    Ok((rc.params, s))
}

fn wave_value(w: &WaveSolution) -> Value {
    json!({
        "A_star": w.a_star,
        "A_star_squared": w.a_star * w.a_star,
        "omega0_star": w.omega0_star,
        "cp": w.cp,
        "h2_u": complex(w.h2_u),
        "h2_v": complex(w.h2_v),
        "B": w.b,
        "epsilon": w.epsilon,
    })
}

/// `spectrum`: central set and hyperbolic gap of the spatial spectrum.
pub fn spectrum(rc: &RunConfig, args: &SpectrumArgs, out: &Output) -> Result<(), CliError> {
    let p = rc.params;
    let s = rc.require_scenario("spectrum")?;
    s.check(&p, args.scenario_tol)?;
    let c = front_speed(&p, &s)?;
    // The scenario is re-derived from the speed at onset as a consistency check.
    let onset = match s.tag {
        ScenarioTag::I => c,
        ScenarioTag::II | ScenarioTag::V => 3.0 * p.cu,
        ScenarioTag::III | ScenarioTag::IV => -p.cv,
    };
    let derived = classify_and_validate(&p, onset, args.scenario_tol)?;
    let wave_cp = if p.b + p.alpha0 > 0.0 { p.cu + p.epsilon * p.epsilon * leading_order(&p)?.omega0_star } else { p.cu };
    let cp = args.cp.unwrap_or(wave_cp);
    let defaults = PartitionOptions::for_scenario(s.tag, p.epsilon);
    let opts = PartitionOptions {
        n_max: args.n_max,
        gap_tol: args.gap_tol.unwrap_or(defaults.gap_tol),
        min_gap: args.min_gap,
        expected: Some(s.tag),
    };
    let rep = central_partition(&p, c, cp, &opts)?;
    let rows: Vec<String> = rep
        .per_n
        .iter()
        .flat_map(|(n, b)| {
            let sh = b.sh.iter().map(move |z| (0.0, *n, *z));
            let con = b.con.iter().map(move |z| (1.0, *n, *z));
            sh.chain(con)
        })
        .map(|(fam, n, z)| row(&[n as f64, fam, z.re, z.im]))
        .collect();
    let file = out.write_csv("spectrum", &["n", "family", "re", "im"], &rows)?;
    let central: Vec<Value> = rep
        .central
        .iter()
        .map(|e| {
            json!({
                "n": e.n,
                "family": match e.family { Family::Sh => "swift_hohenberg", Family::Con => "conservation" },
                "value": complex(e.value),
                "multiplicity": e.multiplicity,
            })
        })
        .collect();
    out.emit_json(
        "spectrum",
        &json!({
            "command": "spectrum",
            "config": config_value(rc),
            "scenario_from_speed": derived.to_string(),
            "c": c,
            "cp": cp,
            "n_max": rep.n_max,
            "gap_tol": rep.gap_tol,
            "min_gap": opts.min_gap,
            "hyperbolic_gap": rep.hyperbolic_gap,
            "central_count": rep.central_count(),
            "central": central,
            "csv_family_codes": { "swift_hohenberg": 0, "conservation": 1 },
            "csv": file,
        }),
    )
}

/// `wave`: leading-order (and optionally refined) traveling wave.
pub fn wave(rc: &RunConfig, args: &WaveArgs, out: &Output) -> Result<(), CliError> {
    let p = rc.params;
    let lead = leading_order(&p)?;
    let mut record = json!({
        "command": "wave",
        "config": config_value(rc),
    });
    let mut profile_sol = lead;
    if args.refine {
        if !(p.epsilon > 0.0) {
            return Err(modfront_core::Error::InvalidParameter("--refine needs epsilon > 0".into()).into());
        }
        let g = GalerkinResidual::new(p, args.modes)?;
        let r = refine_fixed_point(&g, (lead.a_star, lead.omega0_star), args.newton_tol)?;
        profile_sol = WaveSolution { a_star: r.a, omega0_star: r.omega0, cp: p.cu + p.epsilon * p.epsilon * r.omega0, ..lead };
        record["refined"] = json!({
            "A": r.a,
            "omega0": r.omega0,
            "cp": profile_sol.cp,
            "residual": r.residual,
            "iterations": r.iterations,
            "modes": args.modes,
            "newton_tol": args.newton_tol,
        });
    }
    let m = args.p_points.max(2);
    let grid: Vec<f64> = (0..m).map(|j| 2.0 * std::f64::consts::PI * j as f64 / m as f64).collect();
    let rows: Vec<String> = wave_profile(&profile_sol, &grid).iter().map(|s| row(&[s.p, s.u, s.v])).collect();
    record["csv"] = json!(out.write_csv("wave_profile", &["p", "u", "v"], &rows)?);
    for (k, v) in wave_value(&lead).as_object().expect("object") {
        record[k] = v.clone();
    }
    out.emit_json("wave", &record)
}

fn opt_complex(z: Option<modfront_core::Complex64>) -> Value {
    z.map_or(Value::Null, complex)
}

fn field_value(f: &ReducedVectorField) -> Value {
    let k = &f.coeffs;
    let names = coordinate_names(f.form);
    json!({
        "form": format!("{:?}", f.form),
        "coordinates": names,
        "scenario": k.scenario.to_string(),
        "c": k.c,
        "c0": k.c0,
        "omega0": k.omega0,
        "invading_amplitude": k.invading_amplitude,
        "kappa": complex(k.kappa),
        "k_eff": complex(k.k_eff),
        "denominator": k.denominator,
        "linear": complex(k.linear),
        "cubic": complex(k.cubic),
        "damping": opt_complex(k.damping),
        "delta": opt_complex(k.delta),
        "delta_plus": opt_complex(k.delta_plus),
        "delta_minus": opt_complex(k.delta_minus),
        "a_cub": opt_complex(k.a_cub),
        "coupling": opt_complex(k.coupling),
        "b1_decay": k.b1_decay,
        "b1_source": k.b1_source,
        "gamma2_0": k.gamma2_0,
        "invading": state(names, &f.invading),
        "invading_residual": f.invading_residual(),
    })
}

/// `reduced`: coefficient table of the scenario's reduced field.
pub fn reduced(rc: &RunConfig, args: &ReducedArgs, out: &Output) -> Result<(), CliError> {
    let (p, s) = checked_scenario(rc, "reduced", args.scenario_tol)?;
    let field = build(&p, &s)?;
    let mut record = json!({
        "command": "reduced",
        "config": config_value(rc),
        "field": field_value(&field),
    });
    if s.tag == ScenarioTag::IV {
        let sys = build_s4(&p, s.c0, s.gamma2_0)?;
        record["slow"] = field_value(&sys.slow);
        record["fast"] = field_value(&sys.fast);
        record["slow_linearization_at_pf"] = json!(sys.slow_linearization_at_pf(&p));
        record["critical_manifold_at_invading"] = json!(sys.critical_manifold(field.a_star()));
    }
    out.emit_json("reduced", &record)
}

fn shoot_options(f: &ShootFlags) -> ShootOptions {
    ShootOptions {
        offset: f.offset,
        t_max: f.t_max,
        tol: f.tol,
        direction: f.direction.map(|d| match d {
            DirectionArg::Forward => ShootDirection::Forward,
            DirectionArg::Backward => ShootDirection::Backward,
        }),
        ..ShootOptions::default()
    }
}

fn shot_value(field: &ReducedVectorField, shot: &HeteroclinicResult) -> Value {
    let names = coordinate_names(field.form);
    let d = &shot.diagnostics;
    json!({
        "form": format!("{:?}", field.form),
        "coordinates": names,
        "source": state(names, &shot.source),
        "a_star": field.a_star(),
        "offset": shot.offset,
        "classification": format!("{:?}", shot.target_class),
        "final_distance": d.final_distance,
        "eigenvalue": complex(d.eigenvalue),
        "direction": format!("{:?}", d.direction),
        "t_end": d.t_end,
        "opposite_classification": d.opposite.map(|o| format!("{o:?}")),
        "section": d.section.as_ref().map(|s| json!({
            "returns": s.returns,
            "spread": s.spread,
            "period_multiple": s.period_multiple,
            "envelope_min": s.envelope.0,
            "envelope_max": s.envelope.1,
        })),
        "final_state": state(names, shot.trajectory.last()),
        "accepted_steps": shot.trajectory.times.len(),
    })
}

/// `shoot`: heteroclinic shooting with trajectory CSV and classification JSON.
pub fn shoot(rc: &RunConfig, args: &ShootArgs, out: &Output) -> Result<(), CliError> {
    let (p, s) = checked_scenario(rc, "shoot", args.shoot.scenario_tol)?;
    let (field, shot) = shoot_scenario(&p, &s, &shoot_options(&args.shoot))?;
    let names = coordinate_names(field.form);
    let (times, states) = shot.trajectory.resample(args.samples.max(2));
    let rows: Vec<String> = times
        .iter()
        .zip(&states)
        .map(|(t, x)| {
            let mut v = vec![*t];
            v.extend_from_slice(x);
            row(&v)
        })
        .collect();
    let mut header = vec!["t"];
    header.extend_from_slice(names);
    let file = out.write_csv("trajectory", &header, &rows)?;
    let mut record = json!({ "command": "shoot", "config": config_value(rc), "csv": file });
    for (k, v) in shot_value(&field, &shot).as_object().expect("object") {
        record[k] = v.clone();
    }
    out.emit_json("shoot", &record)
}

fn point_value(b: &BifurcationPoint) -> Value {
    json!({
        "kind": format!("{:?}", b.kind),
        "c0": b.c0,
        "certificate": complex(b.certificate),
        "certificate_modulus": b.certificate.norm(),
        "transversality": b.transversality,
    })
}

fn branch_rows(branch: &[BranchPoint]) -> (Vec<String>, usize) {
    let k = branch.iter().map(|b| b.floquet.nontrivial.len()).max().unwrap_or(0);
    let rows = branch
        .iter()
        .map(|b| {
            let mut v = vec![b.orbit.c0, b.orbit.period, b.orbit.amplitude, b.floquet.trivial.norm()];
            v.extend(b.floquet.nontrivial.iter().map(|m| m.norm()));
            v.resize(4 + k, f64::NAN);
            row(&v)
        })
        .collect();
    (rows, k)
}

/// `bifurcate`: origin-spectrum scan, Hopf point, periodic branch and torus point.
pub fn bifurcate(rc: &RunConfig, args: &BifurcateArgs, out: &Output) -> Result<(), CliError> {
    let p = rc.params;
    let s = rc.require_scenario("bifurcate")?;
    if !matches!(s.tag, ScenarioTag::II | ScenarioTag::V) {
        return Err(modfront_core::Error::InvalidParameter(format!("bifurcate applies to Scenarios II and V, not {}", s.tag)).into());
    }
    let tag = s.tag;
    let mut record = json!({ "command": "bifurcate", "config": config_value(rc) });

    let scan = origin_spectrum_scan(&p, tag, (args.scan_min, args.scan_max), args.scan_points)?;
    let rows: Vec<String> = scan
        .iter()
        .map(|o| {
            let mut v = vec![o.c0];
            v.extend(o.eigenvalues.iter().flat_map(|z| [z.re, z.im]));
            row(&v)
        })
        .collect();
    let n_ev = scan.first().map_or(0, |o| o.eigenvalues.len());
    let header_owned: Vec<String> = std::iter::once("c0".to_string())
        .chain((1..=n_ev).flat_map(|i| [format!("lambda{i}_re"), format!("lambda{i}_im")]))
        .collect();
    let header: Vec<&str> = header_owned.iter().map(String::as_str).collect();
    record["origin_spectrum_csv"] = json!(out.write_csv("origin_spectrum", &header, &rows)?);

    let hopf = find_hopf(&p, tag, (args.hopf_bracket[0], args.hopf_bracket[1]))?;
    if matches!(args.find, FindArg::Hopf | FindArg::All) {
        record["hopf"] = point_value(&hopf);
    }
    if matches!(args.find, FindArg::Torus | FindArg::All) {
        let torus = find_torus_bifurcation(&p, tag, (args.torus_bracket[0], args.torus_bracket[1]))?;
        record["torus"] = point_value(&torus);
        let start = hopf.c0 - args.branch_start_offset;
        let end = args.torus_bracket[0].min(args.torus_bracket[1]);
        let branch = continue_branch(&p, tag, start, end, args.branch_step)?;
        let (rows, k) = branch_rows(&branch);
        let header_owned: Vec<String> = ["c0", "period", "amplitude", "mu_trivial_abs"]
            .iter()
            .map(|s| s.to_string())
            .chain((1..=k).map(|i| format!("mu{i}_abs")))
            .collect();
        let header: Vec<&str> = header_owned.iter().map(String::as_str).collect();
        record["branch_csv"] = json!(out.write_csv("branch", &header, &rows)?);
        record["branch"] = json!({
            "points": branch.len(),
            "c0_start": start,
            "c0_end": branch.last().map(|b| b.orbit.c0),
            "max_liouville_error": branch.iter().map(|b| b.floquet.liouville_error).fold(0.0, f64::max),
            "max_orbit_residual": branch.iter().map(|b| b.orbit.residual).fold(0.0, f64::max),
        });
    }
    out.emit_json("bifurcate", &record)
}

/// `front`: reconstructed modulating front on a (ξ, p) grid, optionally a physical snapshot.
pub fn front(rc: &RunConfig, args: &FrontArgs, out: &Output) -> Result<(), CliError> {
    let (p, s) = checked_scenario(rc, "front", args.shoot.scenario_tol)?;
    let (field, shot) = shoot_scenario(&p, &s, &shoot_options(&args.shoot))?;
    let data = HeteroclinicData::from_shooting(&field, &shot, args.xi_points.max(2))?;
    let prof = reconstruct(&field, &data, &p, args.p_points)?;
    let mut rows = Vec::with_capacity(prof.xi_grid.len() * prof.p_grid.len());
    for (i, xi) in prof.xi_grid.iter().enumerate() {
        for (j, ph) in prof.p_grid.iter().enumerate() {
            rows.push(row(&[*xi, *ph, prof.u[i][j], prof.v[i][j]]));
        }
    }
    let file = out.write_csv("front", &["xi", "p", "u", "v"], &rows)?;
    let last = prof.xi_grid.len() - 1;
    let mut record = json!({
        "command": "front",
        "config": config_value(rc),
        "scenario": s.tag.to_string(),
        "c": prof.c,
        "cp": prof.cp,
        "epsilon": prof.epsilon,
        "xi_min": prof.xi_grid[0],
        "xi_max": prof.xi_grid[last],
        "xi_points": prof.xi_grid.len(),
        "p_points": prof.p_grid.len(),
        "classification": format!("{:?}", shot.target_class),
        "ends": {
            "first": { "xi": prof.xi_grid[0], "u_first_harmonic": prof.u_first_harmonic(0), "v_mean": prof.v_mean(0) },
            "last": { "xi": prof.xi_grid[last], "u_first_harmonic": prof.u_first_harmonic(last), "v_mean": prof.v_mean(last) },
        },
        "csv": file,
    });
    if let Some(t) = args.snapshot {
        let (lo, hi) = (prof.xi_grid[0] + prof.c * t, prof.xi_grid[last] + prof.c * t);
        let m = args.x_points.max(2);
        let pad = 1e-9 * (hi - lo);
        let x: Vec<f64> = (0..m).map(|i| lo + pad + (hi - lo - 2.0 * pad) * i as f64 / (m - 1) as f64).collect();
        let samples = prof.physical_snapshot(t, &x)?;
        let rows: Vec<String> = samples.iter().map(|q| row(&[q.x, q.u, q.v])).collect();
        record["snapshot"] = json!({
            "t": t,
            "x_min": x[0],
            "x_max": x[m - 1],
            "points": m,
            "u_max": samples.iter().map(|q| q.u.abs()).fold(0.0, f64::max),
            "csv": out.write_csv("snapshot", &["x", "u", "v"], &rows)?,
        });
    }
    out.emit_json("front", &record)
}

/// `simulate`: direct simulation from Scenario I front data with speed measurements.
pub fn simulate(rc: &RunConfig, args: &SimulateArgs, out: &Output) -> Result<(), CliError> {
    let p = rc.params;
    let s = rc.require_scenario("simulate")?;
    let c = match (s.tag, s.c) {
        (ScenarioTag::I, Some(c)) => c,
        _ => {
            return Err(modfront_core::Error::InvalidParameter("simulate starts from Scenario I front data: pass --c (and --scenario I)".into()).into())
        }
    };
    s.check(&p, modfront_core::model::DEFAULT_SCENARIO_TOL)?;
    let run = FrontRun {
        n: args.n,
        l: args.l.unwrap_or(FrontRun::default().l),
        dt: args.dt,
        t_end: args.t_end,
        sample_every: args.sample_every,
        fit_window: args.fit_window,
        front_fraction: args.front_fraction,
        ..FrontRun::default()
    };
    if !(run.dt > 0.0 && run.t_end > 0.0 && run.sample_every > 0.0) {
        return Err(modfront_core::Error::InvalidParameter("dt, t_end and sample-every must be positive".into()).into());
    }
    let mut st = front_initial_data(&p, c, &run)?;
    let probe = FrontProbe::around(run.front_fraction * run.l);
    let mut stepper = Stepper::new(&p, run.n, run.l, run.dt)?;
    let per_sample = (run.sample_every / run.dt).round().max(1.0) as usize;
    let sample_dt = per_sample as f64 * run.dt;
    let n_samples = (run.t_end / sample_dt).round() as usize;
    let stride = if args.snapshot_every > 0.0 { (args.snapshot_every / sample_dt).round().max(1.0) as usize } else { 0 };
    let mean0 = st.mean_v();
    let mut drift: f64 = 0.0;
    let mut history = vec![st.clone()];
    let mut observations = vec![observe(&st, &probe)?];
    let mut snapshots = Vec::new();
    let mut snap = |i: usize, st: &modfront_core::pdesim::PdeState| -> Result<(), CliError> {
        if !out.has_dir() || stride == 0 || i % stride != 0 {
            return Ok(());
        }
        let x = st.x();
        let rows: Vec<String> = (0..st.n).map(|j| row(&[x[j], st.u[j], st.v[j]])).collect();
        let file = out.write_csv(&format!("snapshot_{i:06}"), &["x", "u", "v"], &rows)?;
        snapshots.push(json!({ "t": st.t, "csv": file }));
        Ok(())
    };
    snap(0, &st)?;
    for i in 1..=n_samples {
        stepper.advance(&mut st, per_sample)?;
        drift = drift.max((st.mean_v() - mean0).abs());
        observations.push(observe(&st, &probe)?);
        history.push(st.clone());
        snap(i, &st)?;
    }
    let t_end = st.t;
    let fit: Vec<_> = history.into_iter().filter(|h| h.t >= t_end - run.fit_window - 1e-9).collect();
    let front_speed = measure_front_speed(&fit, &probe)?;
    let phase_speed = measure_phase_speed(&fit, &probe)?;
    let s1 = build_s1(&p, c)?;
    let rows: Vec<String> = observations.iter().map(|o| row(&[o.t, o.front_position, o.plateau, o.phase, o.mean_v])).collect();
    let obs_file = out.write_csv("observations", &["t", "front_position", "plateau", "phase", "mean_v"], &rows)?;
    out.emit_json(
        "simulate",
        &json!({
            "command": "simulate",
            "config": config_value(rc),
            "run": {
                "N": run.n, "L": run.l, "dt": run.dt, "t_end": run.t_end,
                "sample_every": run.sample_every, "snapshot_every": args.snapshot_every,
                "fit_window": run.fit_window, "front_fraction": run.front_fraction,
            },
            "c": c,
            "cp_predicted": p.cu + p.epsilon * p.epsilon * s1.coeffs.omega0,
            "front_speed": front_speed,
            "phase_speed": phase_speed,
            "plateau_predicted": 2.0 * p.epsilon * s1.a_star(),
            "plateau": observations.last().map(|o| o.plateau),
            "mean_v_drift": drift,
            "observations_csv": obs_file,
            "snapshots": snapshots,
        }),
    )
}

/// `verify`: runs the acceptance criteria on up to `jobs` threads and prints the table.
pub fn verify(args: &VerifyArgs, jobs: usize, out: &Output) -> Result<(), CliError> {
    let all = acceptance::criteria();
    let selected: Vec<_> = all.into_iter().filter(|c| args.only.is_empty() || args.only.contains(&c.0)).collect();
    if selected.is_empty() {
        return Err(CliError::Usage("--only selects no criterion (valid numbers are 1-12)".into()));
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<CriterionResult>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, selected.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(c) = selected.get(i) else { break };
                let r = acceptance::run(c);
                results.lock().expect("no worker panics while holding the lock").push(r);
            });
        }
    });
    let mut results = results.into_inner().expect("workers finished");
    results.sort_by_key(|r| r.id);
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| r.id.to_string()).collect();
    println!("{}/{} criteria passed", results.len() - failed.len(), results.len());
    if out.has_dir() {
        let list: Vec<Value> = results
            .iter()
            .map(|r| json!({ "id": r.id, "name": r.name, "passed": r.passed, "summary": r.summary }))
            .collect();
        let text = crate::output::to_json_text(&json!({ "command": "verify", "criteria": list }));
        let dir_file = out.write_raw("verify.json", &text)?;
        debug_assert!(dir_file.is_some());
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::AcceptanceFailed(failed.join(",")))
    }
}
