//! Acceptance suite. One PASS/FAIL line per criterion on stdout, progress
//! on stderr. Desk-scale datasets and sweeps are cached under the cargo
//! target tmpdir; set `ACCEPTANCE_FRESH=1` to rebuild them.
//!
//! Run with `cargo test --release -p auxetikit --test acceptance`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use auxetikit::dataset::{generate_with_progress, Dataset, GenerateOptions, GENERATOR_VERSION};
use auxetikit::elasticity::base_stiffness;
use auxetikit::fft::{
    centered_index, effective_stiffness_perturbation, effective_stiffness_sensitivity, solve_equilibrium,
    EquilibriumOperator, LinearOperator, MacroStrain, Microstructure, Scheme, Spectral, SpectralField, TensorField2,
    STRAIN_METRIC,
};
use auxetikit::forest::{fit_forest, train_with_split, Forest, Hyperparams, Surrogate, Target};
use auxetikit::inverse::{brute_force, InverseOptions, InverseTarget};
use auxetikit::sweep::{median_inversions, run_sweep, size_study, study_sizes, sweep_homogenize_options};
use auxetikit::sweep::{Evaluator, SweepSpec, SweepTable, DESK_FACTOR};
use auxetikit::{
    homogenize, par, BaseMaterial, HomogenizeOptions, Method, PixelGrid, Regime, UnitCellSpec, VoidShape, VoigtMatrix3,
};
use nalgebra::{DMatrix, DVector, Matrix2, Matrix2x1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const DESK_N: usize = 128;
const DESK_ROWS: usize = 3000;
const DATA_SEED: u64 = 0;

struct Outcome {
    name: &'static str,
    pass: bool,
}

fn report(name: &'static str, pass: bool, detail: String) -> Outcome {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    Outcome { name, pass }
}

fn progress(msg: impl AsRef<str>) {
    eprintln!("  .. {}", msg.as_ref());
}

fn cache_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-cache");
    std::fs::create_dir_all(&dir).expect("cache dir");
    dir
}

fn fresh() -> bool {
    std::env::var("ACCEPTANCE_FRESH").is_ok_and(|v| v == "1")
}

fn material(e: f64, nu: f64) -> BaseMaterial {
    BaseMaterial::new(e, nu).unwrap()
}

fn rel_max_diff(a: &VoigtMatrix3, b: &VoigtMatrix3) -> f64 {
    let mut m = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            m = m.max((a[(i, j)] - b[(i, j)]).abs());
        }
    }
    m / b.max_abs()
}

fn solid_cell_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let m = material(rng.gen_range(1.0..5000.0), rng.gen_range(0.0..0.49));
        let (c, _) = homogenize(&UnitCellSpec::solid(m), &HomogenizeOptions::with_n(64)).unwrap();
        worst = worst.max(rel_max_diff(&c.full, &base_stiffness(&m, Regime::PlaneStrain).unwrap()));
    }
    let t = start.elapsed().as_secs_f64();
    report(
        "solid-cell oracle",
        worst <= 1e-8 && t < 1.0,
        format!("max rel err {worst:.2e} (tol 1e-8), {t:.3} s for 10 runs (limit 1 s)"),
    )
}

/// Series/parallel laminate with layer normal `e1`: `sigma_11`, `sigma_12`
/// are continuous, `eps_22` is uniform.
fn laminate_oracle(phases: &[(f64, VoigtMatrix3)]) -> VoigtMatrix3 {
    let blocks = |c: &VoigtMatrix3| {
        let a = Matrix2::new(c[(0, 0)], c[(0, 2)], c[(2, 0)], c[(2, 2)]);
        let b = Matrix2x1::new(c[(0, 1)], c[(2, 1)]);
        let bt = nalgebra::Matrix1x2::new(c[(1, 0)], c[(1, 2)]);
        (a, b, bt, c[(1, 1)])
    };
    let mut a_inv = Matrix2::zeros();
    let mut a_inv_b = Matrix2x1::zeros();
    let mut bt_a_inv = nalgebra::Matrix1x2::zeros();
    let mut d_schur = 0.0;
    for (f, c) in phases {
        let (a, b, bt, d) = blocks(c);
        let ai = a.try_inverse().unwrap();
        a_inv += ai * *f;
        a_inv_b += ai * b * *f;
        bt_a_inv += bt * ai * *f;
        d_schur += (d - (bt * ai * b)[(0, 0)]) * f;
    }
    let a_star = a_inv.try_inverse().unwrap();
    let b_star = a_star * a_inv_b;
    let bt_star = bt_a_inv * a_star;
    let d_star = d_schur + (bt_a_inv * a_star * a_inv_b)[(0, 0)];
    let mut out = VoigtMatrix3::ZERO;
    let (n0, n1) = (0usize, 2usize);
    out[(n0, n0)] = a_star[(0, 0)];
    out[(n0, n1)] = a_star[(0, 1)];
    out[(n1, n0)] = a_star[(1, 0)];
    out[(n1, n1)] = a_star[(1, 1)];
    out[(n0, 1)] = b_star[(0, 0)];
    out[(n1, 1)] = b_star[(1, 0)];
    out[(1, n0)] = bt_star[(0, 0)];
    out[(1, n1)] = bt_star[(0, 1)];
    out[(1, 1)] = d_star;
    out
}

fn laminate() -> Outcome {
    let n = 64;
    let c_a = base_stiffness(&material(1.0, 0.3), Regime::PlaneStrain).unwrap();
    let c_b = base_stiffness(&material(0.1, 0.2), Regime::PlaneStrain).unwrap();
    // 24 of 64 rows are phase B: stripes normal to x1
    let stripe = 24;
    let phase: Vec<u8> = (0..n * n).map(|p| u8::from(p / n < stripe)).collect();
    let micro = Microstructure::new(n, phase, vec![c_a, c_b]).unwrap();
    let sp = Spectral::new(n, 1.0, Scheme::Rotated).unwrap();
    let fb = stripe as f64 / n as f64;
    let exact = laminate_oracle(&[(1.0 - fb, c_a), (fb, c_b)]);
    let mut worst = 0.0f64;
    for method in [Method::Sensitivity, Method::Perturbation] {
        let (c, _) = match method {
            Method::Sensitivity => effective_stiffness_sensitivity(&sp, &micro, 1e-10, 2000),
            Method::Perturbation => effective_stiffness_perturbation(&sp, &micro, 1e-10, 2000),
        }
        .unwrap();
        worst = worst.max(rel_max_diff(&c.full, &exact));
    }
    report(
        "laminate oracle",
        worst <= 1e-6,
        format!("max rel err {worst:.2e} vs analytic laminate (tol 1e-6), both methods"),
    )
}

fn method_equivalence() -> Outcome {
    let tol = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let sp = Spectral::new(64, 1.0, Scheme::Rotated).unwrap();
    let mut worst = 0.0f64;
    let mut errors = Vec::new();
    for shape in VoidShape::ALL {
        for _ in 0..20 {
            let (d, big_d) = loop {
                let (a, b): (f64, f64) = (rng.gen(), rng.gen());
                if a + b < 1.0 {
                    break (a, b);
                }
            };
            let nu = rng.gen_range(0.2..0.4);
            let spec = UnitCellSpec::new(shape, d, big_d, material(1.0, nu)).unwrap();
            let run = |method| {
                let opts = HomogenizeOptions {
                    n: 64,
                    tol,
                    method,
                    ..HomogenizeOptions::default()
                };
                auxetikit::fft::homogenize_with(&sp, &spec, &opts)
            };
            match (run(Method::Perturbation), run(Method::Sensitivity)) {
                (Ok((a, _)), Ok((b, _))) => {
                    let norm = b.full.frobenius();
                    let mut diff = 0.0f64;
                    for i in 0..3 {
                        for j in 0..3 {
                            diff = diff.max((a.full[(i, j)] - b.full[(i, j)]).abs());
                        }
                    }
                    if norm > 0.0 {
                        worst = worst.max(diff / (tol * norm));
                    }
                }
                (a, b) => errors.push(format!(
                    "{shape} ({d:.3}, {big_d:.3}): {:?} / {:?}",
                    a.err().map(|e| e.to_string()),
                    b.err().map(|e| e.to_string())
                )),
            }
        }
    }
    report(
        "method equivalence",
        worst <= 10.0 && errors.is_empty(),
        format!(
            "max |C_pert - C_sens| = {worst:.2} tol ||C|| (limit 10) over 80 specs{}",
            if errors.is_empty() {
                String::new()
            } else {
                format!("; failures: {}", errors.join("; "))
            }
        ),
    )
}

/// Metric-weighted dense matrix of a linear map given by its action.
fn dense(dim: usize, mut f: impl FnMut(&[f64], &mut [f64])) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    let mut e = vec![0.0; dim];
    let mut y = vec![0.0; dim];
    for k in 0..dim {
        e[k] = 1.0;
        f(&e, &mut y);
        m.set_column(k, &DVector::from_column_slice(&y));
        e[k] = 0.0;
    }
    m
}

fn dense_oracle() -> Outcome {
    let n = 8;
    let np = n * n;
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let sp = Spectral::new(n, 1.0, Scheme::Rotated).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let mut ind = vec![true; np];
        ind[rng.gen_range(0..np)] = false;
        let grid = PixelGrid::from_indicator(n, ind).unwrap();
        let d = base_stiffness(&material(1.0, rng.gen_range(0.1..0.45)), Regime::PlaneStrain).unwrap();
        let micro = Microstructure::from_grid(&grid, d, 0.0);
        let mut op = EquilibriumOperator::new(&sp, &micro);
        let a = dense(3 * np, |x, y| op.apply(x, y));
        let p = dense(3 * np, |x, y| op.project(x, y));
        let pinv = (&a * &p).svd(true, true).pseudo_inverse(1e-10).unwrap();
        for kl in 0..3 {
            let load = MacroStrain::unit(kl);
            let b = DVector::from_vec(op.rhs(&load));
            let x_dense = &p * (&pinv * &b);
            let (x, report) = solve_equilibrium(&sp, &micro, &load, 1e-13, 5000).unwrap();
            assert!(report.converged, "{report:?}");
            let scale = x_dense.amax().max(1.0);
            let diff = x
                .as_slice()
                .iter()
                .zip(x_dense.iter())
                .fold(0.0f64, |m, (u, v)| m.max((u - v).abs()));
            worst = worst.max(diff / scale);
        }
    }
    report(
        "dense oracle",
        worst <= 1e-8,
        format!("max |x_minres - x_dense| = {worst:.2e} (tol 1e-8) on 5 grids x 3 loads"),
    )
}

fn orthotropy() -> Outcome {
    let levels = [0.05, 0.15, 0.25, 0.35, 0.45];
    let opts = HomogenizeOptions::with_n(64);
    let sp = opts.spectral().unwrap();
    let (mut shear, mut diag) = (0.0f64, 0.0f64);
    for shape in VoidShape::ALL {
        for d in levels {
            for big_d in levels {
                let spec = UnitCellSpec::new(shape, d, big_d, material(1.0, 0.3)).unwrap();
                let (c, _) = auxetikit::fft::homogenize_with(&sp, &spec, &opts).unwrap();
                let m = &c.full;
                let norm = m.frobenius();
                for (i, j) in [(0, 2), (1, 2), (2, 0), (2, 1)] {
                    shear = shear.max(m[(i, j)].abs() / norm);
                }
                diag = diag.max((m[(0, 0)] - m[(1, 1)]).abs() / norm);
            }
        }
    }
    report(
        "orthotropy",
        shear <= 1e-6 && diag <= 1e-4,
        format!("max |C13|,|C23| = {shear:.2e} ||C|| (tol 1e-6), max |C11-C22| = {diag:.2e} ||C|| (tol 1e-4), 100 specs"),
    )
}

fn e_linearity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let opts = HomogenizeOptions::with_n(64);
    let sp = opts.spectral().unwrap();
    let mut worst = 0.0f64;
    for k in 0..10 {
        let shape = VoidShape::ALL[k % 4];
        let d = rng.gen_range(0.0..0.5);
        let big_d = rng.gen_range(0.0..0.49);
        let nu = rng.gen_range(0.2..0.4);
        let e = rng.gen_range(10.0..5000.0);
        let one = UnitCellSpec::new(shape, d, big_d, material(1.0, nu)).unwrap();
        let scaled = UnitCellSpec::new(shape, d, big_d, material(e, nu)).unwrap();
        let (c1, _) = auxetikit::fft::homogenize_with(&sp, &one, &opts).unwrap();
        let (ce, _) = auxetikit::fft::homogenize_with(&sp, &scaled, &opts).unwrap();
        worst = worst.max(rel_max_diff(&ce.full, &c1.full.scale(e)));
    }
    report(
        "E-linearity",
        worst <= 1e-10,
        format!("max rel |C(E) - E C(1)| = {worst:.2e} (tol 1e-10), 10 specs"),
    )
}

fn projector() -> Outcome {
    let n = 16;
    let np = n * n;
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let sp = Spectral::new(n, 1.0, Scheme::Rotated).unwrap();
    let random = |rng: &mut ChaCha8Rng| {
        TensorField2::from_fn(n, |_, _| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])
    };

    let f = sp.forward(&random(&mut rng));
    let p1 = sp.apply_projection(&f);
    let idem = sp.apply_projection(&p1).max_abs_diff(&p1) / p1.max_abs();

    // strain of a random periodic displacement
    let u = TensorField2::from_fn(n, |_, _| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0]);
    let uh = sp.forward(&u);
    let fg = sp.frequencies();
    let mut eps = SpectralField::zeros(n);
    for k1 in 0..n {
        for k2 in 0..n {
            let (n1, n2) = (centered_index(k1, n), centered_index(k2, n));
            if fg.is_masked(n1, n2) {
                continue;
            }
            let g = fg.xi_rot(n1, n2);
            let [u1, u2, _] = uh.get(k1, k2);
            eps.set(k1, k2, [g[0] * u1, g[1] * u2, g[0] * u2 + g[1] * u1]);
        }
    }
    let fixed = sp.apply_projection(&eps).max_abs_diff(&eps) / eps.max_abs();

    // adjointness of the symmetric operator P D P in the energy product
    let mut ind = vec![true; np];
    for _ in 0..60 {
        ind[rng.gen_range(0..np)] = false;
    }
    let grid = PixelGrid::from_indicator(n, ind).unwrap();
    let micro = Microstructure::from_grid(&grid, base_stiffness(&material(1.0, 0.3), Regime::PlaneStrain).unwrap(), 0.0);
    let mut op = EquilibriumOperator::new(&sp, &micro);
    let (x, y) = (random(&mut rng), random(&mut rng));
    let (mut ax, mut ay) = (vec![0.0; 3 * np], vec![0.0; 3 * np]);
    op.apply_symmetric(x.as_slice(), &mut ax);
    op.apply_symmetric(y.as_slice(), &mut ay);
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        (0..3)
            .map(|c| STRAIN_METRIC[c] * (0..np).map(|p| a[c * np + p] * b[c * np + p]).sum::<f64>())
            .sum()
    };
    let lhs = dot(&ax, y.as_slice());
    let rhs = dot(x.as_slice(), &ay);
    let adj = (lhs - rhs).abs() / lhs.abs().max(rhs.abs());

    report(
        "projector properties",
        idem <= 1e-10 && fixed <= 1e-10 && adj <= 1e-10,
        format!("idempotence {idem:.1e}, compatible fixed point {fixed:.1e}, adjointness {adj:.1e} (tol 1e-10)"),
    )
}

fn desk_dataset(shape: VoidShape) -> Dataset {
    let path = cache_dir().join(format!("{shape}_n{DESK_N}_rows{DESK_ROWS}_seed{DATA_SEED}.csv"));
    if !fresh() {
        if let Ok(ds) = Dataset::read_expecting(&path, shape) {
            if ds.meta.generator_version == GENERATOR_VERSION {
                progress(format!("{shape}: cached dataset {}", path.display()));
                return ds;
            }
        }
    }
    let start = Instant::now();
    let opts = GenerateOptions::new(shape, DESK_ROWS, DESK_N, DATA_SEED);
    let report = generate_with_progress(&opts, |done| {
        if done % 250 == 0 {
            progress(format!("{shape}: {done}/{DESK_ROWS} samples, {:.0} s", start.elapsed().as_secs_f64()));
        }
    })
    .unwrap();
    report.dataset.write(&path).unwrap();
    report.dataset
}

#[derive(Serialize, Deserialize)]
struct CachedSweep {
    elapsed_s: f64,
    table: SweepTable,
}

fn onset_sweep(shape: VoidShape) -> CachedSweep {
    let path = cache_dir().join(format!("sweep_{shape}_n{DESK_N}_{}.json", GENERATOR_VERSION));
    if !fresh() {
        if let Some(c) = std::fs::read_to_string(&path)
            .ok()
            .and_then(|t| serde_json::from_str::<CachedSweep>(&t).ok())
        {
            progress(format!("{shape}: cached sweep {}", path.display()));
            return c;
        }
    }
    let spec = SweepSpec::new(shape, Evaluator::Fft);
    let start = Instant::now();
    let table = par::with_workers(1, || run_sweep(&spec, &sweep_homogenize_options(DESK_N, 1e-6), None)).unwrap();
    let c = CachedSweep {
        elapsed_s: start.elapsed().as_secs_f64(),
        table,
    };
    progress(format!("{shape}: sweep took {:.0} s", c.elapsed_s));
    if let Ok(text) = serde_json::to_string(&c) {
        let _ = std::fs::write(&path, text);
    }
    c
}

fn paper_onset(shape: VoidShape) -> f64 {
    match shape {
        VoidShape::Rectangular => 0.42,
        VoidShape::Diamond => 0.46,
        VoidShape::Oval => 0.45,
        VoidShape::Peanut => 0.44,
    }
}

fn onset(sweeps: &BTreeMap<VoidShape, CachedSweep>) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let mut total = 0.0;
    for (shape, s) in sweeps {
        total += s.elapsed_s;
        let expected = paper_onset(*shape);
        match s.table.onset(Evaluator::Fft) {
            Ok(v) => {
                let ok = (v - expected).abs() <= 0.03 + 1e-9;
                pass &= ok;
                parts.push(format!("{shape} {v:.2} (paper {expected:.2}){}", if ok { "" } else { " OUT" }));
            }
            Err(_) => {
                pass = false;
                parts.push(format!("{shape} none in [0.05, 0.90] (paper {expected:.2}) OUT"));
            }
        }
    }
    pass &= total <= 1800.0;
    report(
        "auxeticity onset",
        pass,
        format!("{}; band +-0.03; sweeps {total:.0} s single-threaded (limit 1800 s)", parts.join(", ")),
    )
}

fn surrogate_accuracy(datasets: &BTreeMap<VoidShape, Dataset>) -> (Outcome, Option<Surrogate>) {
    let hp = Hyperparams::default();
    let mut worst = f64::INFINITY;
    let mut parts = Vec::new();
    let mut rect = Vec::new();
    for (shape, ds) in datasets {
        let mut scores = Vec::new();
        for t in Target::ALL {
            let (model, rep) = train_with_split(ds, t, &hp, DATA_SEED).unwrap();
            worst = worst.min(rep.r2_test);
            scores.push(format!("{t} {:.4}", rep.r2_test));
            if *shape == VoidShape::Rectangular {
                rect.push(model);
            }
        }
        parts.push(format!("{shape} [{}]", scores.join(" ")));
    }
    let rect = <[Forest; 3]>::try_from(rect).ok().map(|m| Surrogate::new(m).unwrap());
    (
        report(
            "surrogate accuracy",
            worst >= 0.99,
            format!("min R2_test {worst:.4} (limit 0.99); {}", parts.join(", ")),
        ),
        rect,
    )
}

fn size_monotonicity(datasets: &BTreeMap<VoidShape, Dataset>, sweeps: &BTreeMap<VoidShape, CachedSweep>) -> Outcome {
    let sizes = study_sizes(DESK_FACTOR);
    let hp = Hyperparams::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for (shape, ds) in datasets {
        let subsets: Vec<Dataset> = sizes.iter().map(|&n| ds.prefix(n)).collect();
        let rows = size_study(&subsets, &sweeps[shape].table, Target::C11, &hp).unwrap();
        let inversions = median_inversions(&rows);
        pass &= inversions <= 1;
        let medians: Vec<String> = rows.iter().map(|r| format!("{:.3}", r.stats.median)).collect();
        parts.push(format!("{shape} [{}] inversions {inversions}", medians.join(" ")));
    }
    report(
        "dataset-size monotonicity",
        pass,
        format!("median C11 rel err at {sizes:?} rows: {} (at most 1 inversion)", parts.join(", ")),
    )
}

fn inverse_round_trip(rect: &Surrogate) -> Outcome {
    let e = 3500.0;
    let nu = 0.36;
    let m = material(e, nu);
    let target = InverseTarget::from_stress(Some(400.0), Some(-200.0), None, &m).unwrap();
    let search = |count| {
        brute_force(rect, &target, nu, &InverseOptions {
            eval_count: count,
            ..InverseOptions::default()
        })
        .unwrap()
    };
    let coarse = search(10_000);
    let start = Instant::now();
    let fine = search(20_000);
    let wall = start.elapsed().as_secs_f64();
    let spec = UnitCellSpec::new(VoidShape::Rectangular, fine.d_rel, fine.big_d_rel, m).unwrap();
    let (c, _) = homogenize(&spec, &HomogenizeOptions::with_n(DESK_N)).unwrap();
    let e11 = (c.c11 - 400.0).abs() / 400.0;
    let e12 = (c.c12 + 200.0).abs() / 200.0;
    let drift = (fine.d_rel - coarse.d_rel).abs().max((fine.big_d_rel - coarse.big_d_rel).abs());
    report(
        "inverse round trip",
        e11 <= 0.05 && e12 <= 0.05 && drift <= 0.01 && wall <= 5.0,
        format!(
            "(d, D) = ({:.4}, {:.4}); FFT C11 {:.1} ({:.2}%), C12 {:.1} ({:.2}%) (limit 5%); 10k->20k drift {drift:.4} (limit 0.01); {wall:.3} s (limit 5 s)",
            fine.d_rel,
            fine.big_d_rel,
            c.c11,
            100.0 * e11,
            c.c12,
            100.0 * e12
        ),
    )
}

fn determinism() -> Outcome {
    let run = |workers: usize| {
        par::with_workers(workers, || {
            let opts = GenerateOptions::new(VoidShape::Oval, 48, 64, 77);
            let ds = auxetikit::dataset::generate(&opts).unwrap().dataset;
            let mut csv = Vec::new();
            ds.write_to(&mut csv).unwrap();
            let hp = Hyperparams {
                n_trees: 25,
                seed: 5,
                ..Hyperparams::default()
            };
            let models = Target::ALL.map(|t| fit_forest(&ds, t, &hp).unwrap());
            let json: Vec<String> = models.iter().map(|m| m.to_json().unwrap()).collect();
            let s = Surrogate::new(models).unwrap();
            let target = InverseTarget::normalized(Some(0.3), Some(0.05), None).unwrap();
            let inv = brute_force(&s, &target, 0.3, &InverseOptions::default()).unwrap();
            (csv, json, inv)
        })
    };
    let (a, b) = (run(1), run(8));
    let same_csv = a.0 == b.0;
    let same_models = a.1 == b.1;
    let same_inverse = a.2.same_outcome(&b.2);
    report(
        "determinism",
        same_csv && same_models && same_inverse,
        format!(
            "workers 1 vs 8: dataset bytes {}, model JSON {}, inverse result {}",
            if same_csv { "identical" } else { "DIFFER" },
            if same_models { "identical" } else { "DIFFER" },
            if same_inverse { "identical (timing excluded)" } else { "DIFFER" }
        ),
    )
}

fn main() {
    // libtest-style flags from `cargo test` are ignored
    let start = Instant::now();
    let mut outcomes = vec![
        solid_cell_oracle(),
        laminate(),
        method_equivalence(),
        dense_oracle(),
        orthotropy(),
        e_linearity(),
    ];

    let sweeps: BTreeMap<VoidShape, CachedSweep> = VoidShape::ALL.iter().map(|&s| (s, onset_sweep(s))).collect();
    outcomes.push(onset(&sweeps));

    let datasets: BTreeMap<VoidShape, Dataset> = VoidShape::ALL.iter().map(|&s| (s, desk_dataset(s))).collect();
    let (accuracy, rect) = surrogate_accuracy(&datasets);
    outcomes.push(accuracy);
    outcomes.push(size_monotonicity(&datasets, &sweeps));
    outcomes.push(match rect {
        Some(r) => inverse_round_trip(&r),
        None => report("inverse round trip", false, "rect models missing".into()),
    });
    outcomes.push(projector());
    outcomes.push(determinism());

    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.pass).map(|o| o.name).collect();
    println!(
        "{} of {} criteria passed in {:.0} s{}",
        outcomes.len() - failed.len(),
        outcomes.len(),
        start.elapsed().as_secs_f64(),
        if failed.is_empty() {
            String::new()
        } else {
            format!("; failing: {}", failed.join(", "))
        }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
