//! Acceptance gate: one line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use rand::Rng;
use sbd::cli::{self, exit};
use sbd::format::BlockSpecFile;
use sbd::grouprep::{
    d8_cayley_table, multiplicities_in_regular, regular_representation, regular_representation_with, RegularConvention,
    D8_ELEMENTS,
};
use sbd::linalg::{kron, projector_distance, unitarity_residual, unvec, vec};
use sbd::solver::DEFAULT_TOLERANCE;
use sbd::{
    assemble_transfer_matrix, block_kernel, builtin_example_d8, kernel_basis, BlockSpec, ComplexDenseMatrix, Error,
    GeneratorSet, KernelStrategy, SolveOptions,
};

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn d8_golden() -> Outcome {
    let ex = builtin_example_d8();
    let start = Instant::now();
    let res =
        assemble_transfer_matrix(&ex.generators, &ex.blocks, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    ensure(
        res.kernel_dims == [1, 1, 1, 1, 2],
        format!("kernel dims {:?}", res.kernel_dims),
    )?;
    let unitarity = unitarity_residual(&res.s).unwrap();
    ensure(unitarity < 1e-10, format!("|S^H S - I| = {unitarity:.2e}"))?;
    ensure(res.max_residual < 1e-10, format!("residual {:.2e}", res.max_residual))?;
    ensure(elapsed.as_secs_f64() < 1.0, format!("took {elapsed:?}"))?;
    Ok(format!(
        "dims {:?}, unitarity {unitarity:.1e}, residual {:.1e}, {:.1} ms",
        res.kernel_dims,
        res.max_residual,
        elapsed.as_secs_f64() * 1e3
    ))
}

fn reference_agreement() -> Outcome {
    let ex = builtin_example_d8();
    let res =
        assemble_transfer_matrix(&ex.generators, &ex.blocks, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let mut worst_overlap = 0.0f64;
    for j in 0..4 {
        let ours = res.s.column(j);
        let theirs = ex.reference_s.column(j);
        let overlap: f64 = ours
            .iter()
            .zip(theirs)
            .map(|(x, y)| x.conj() * y)
            .sum::<sbd::Complex64>()
            .norm();
        worst_overlap = worst_overlap.max((1.0 - overlap).abs());
        ensure(overlap > 1.0 - 1e-10, format!("column {j}: overlap {overlap}"))?;
    }
    let dist = projector_distance(&res.s.columns(4, 4), &ex.reference_s.columns(4, 4)).map_err(|e| e.to_string())?;
    ensure(dist < 1e-10, format!("family 5 projector distance {dist:.2e}"))?;
    Ok(format!(
        "max |1 - overlap| {worst_overlap:.1e}, family-5 projector distance {dist:.1e}"
    ))
}

fn kernel_structure() -> Outcome {
    let ex = builtin_example_d8();
    let mut worst_prop = 0.0f64;
    let mut worst_cross = 0.0f64;
    for (b, fam) in ex.blocks.families().iter().enumerate() {
        let k = block_kernel(&ex.generators, fam, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
        let ws: Vec<ComplexDenseMatrix> = k.iter().map(|w| unvec(w, 8).unwrap()).collect();
        for w in &ws {
            let g = &w.dagger() * w;
            let d = fam.dim();
            let scale = (0..d).map(|i| g.get(i, i)).sum::<sbd::Complex64>() / d as f64;
            let dev = (&g - &ComplexDenseMatrix::identity(d).scale(scale)).max_norm();
            worst_prop = worst_prop.max(dev);
            ensure(
                dev < 1e-10,
                format!("family {}: W^H W deviates from a multiple of I by {dev:.2e}", b + 1),
            )?;
        }
        if b == 4 {
            for (p, wp) in ws.iter().enumerate() {
                for wq in &ws[p + 1..] {
                    let cross = (&wp.dagger() * wq).max_norm();
                    worst_cross = worst_cross.max(cross);
                    ensure(cross < 1e-10, format!("family 5: |W_p^H W_q| = {cross:.2e}"))?;
                }
            }
        }
    }
    Ok(format!(
        "proportionality {worst_prop:.1e}, cross terms {worst_cross:.1e}"
    ))
}

struct Instance {
    name: String,
    gens: GeneratorSet,
    spec: BlockSpec,
    dims: Vec<usize>,
}

fn suite() -> Vec<Instance> {
    let ex = builtin_example_d8();
    let mut out = vec![Instance {
        name: "d8".into(),
        gens: ex.generators.clone(),
        spec: ex.blocks.clone(),
        dims: vec![1, 1, 1, 1, 2],
    }];
    let mut r = rng(2024);
    for k in 0..100 {
        let u0 = random_unitary(&mut r, 8);
        out.push(Instance {
            name: format!("d8 scramble {k}"),
            gens: scramble(&ex.blocks, &["a", "b"], &u0),
            spec: ex.blocks.clone(),
            dims: vec![1, 1, 1, 1, 2],
        });
    }
    let z4 = z4_blocks();
    for k in 0..100 {
        let u0 = random_unitary(&mut r, 4);
        out.push(Instance {
            name: format!("z4 scramble {k}"),
            gens: scramble(&z4, &["a"], &u0),
            spec: z4.clone(),
            dims: vec![1, 1, 1, 1],
        });
    }
    out
}

fn scramble_suite(instances: &[Instance]) -> Outcome {
    let mut worst = 0.0f64;
    let mut runs = 0;
    for inst in instances.iter().filter(|i| i.name.contains("scramble")) {
        let res = assemble_transfer_matrix(&inst.gens, &inst.spec, &SolveOptions::default())
            .map_err(|e| format!("{}: {e}", inst.name))?;
        ensure(
            res.kernel_dims == inst.dims,
            format!("{}: dims {:?}", inst.name, res.kernel_dims),
        )?;
        ensure(
            res.max_residual < 1e-9,
            format!("{}: residual {:.2e}", inst.name, res.max_residual),
        )?;
        worst = worst.max(res.max_residual);
        runs += 1;
    }
    Ok(format!("{runs} runs, worst residual {worst:.1e}"))
}

fn strategy_equivalence(instances: &[Instance]) -> Outcome {
    let mut worst = 0.0f64;
    for inst in instances {
        for (b, fam) in inst.spec.families().iter().enumerate() {
            let tol = DEFAULT_TOLERANCE;
            let a = kernel_basis(&inst.gens, fam, tol, KernelStrategy::Stacked).map_err(|e| e.to_string())?;
            let c = kernel_basis(&inst.gens, fam, tol, KernelStrategy::Incremental).map_err(|e| e.to_string())?;
            ensure(
                a.len() == c.len(),
                format!("{} family {}: {} vs {} vectors", inst.name, b + 1, a.len(), c.len()),
            )?;
            let d = span_distance(&a, &c);
            worst = worst.max(d);
            ensure(
                d < 1e-10,
                format!("{} family {}: projector distance {d:.2e}", inst.name, b + 1),
            )?;
        }
    }
    Ok(format!(
        "{} instances, worst projector distance {worst:.1e}",
        instances.len()
    ))
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("sbd").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8_lossy(&err).into_owned())
}

fn error_paths() -> Outcome {
    let ex = builtin_example_d8();

    // q_5 = 3 on the 2D family: the kernel only has two directions
    let fam = ex.blocks.family(4).with_multiplicity(3).unwrap();
    match block_kernel(&ex.generators, &fam, DEFAULT_TOLERANCE) {
        Err(
            e @ Error::KernelDimensionMismatch {
                observed: 2,
                expected: 3,
                ..
            },
        ) => ensure(e.exit_code() == exit::KERNEL_DIMENSION, "kernel mismatch exit code")?,
        other => return Err(format!("q5 = 3: {other:?}")),
    }

    let mut bad = ex.generators.matrices().to_vec();
    bad[0].set(0, 0, c(2.0, 0.0));
    let bad = GeneratorSet::new(ex.generators.labels().to_vec(), bad).unwrap();
    match assemble_transfer_matrix(&bad, &ex.blocks, &SolveOptions::default()) {
        Err(e @ Error::NonUnitaryInput { .. }) => ensure(e.exit_code() == exit::NON_UNITARY, "non-unitary exit code")?,
        other => return Err(format!("non-unitary generator: {other:?}")),
    }

    let short = BlockSpec::new(ex.blocks.families()[1..].to_vec()).unwrap();
    match assemble_transfer_matrix(&ex.generators, &short, &SolveOptions::default()) {
        Err(e @ Error::SpecDimensionError { expected: 8, found: 7 }) => {
            ensure(e.exit_code() == exit::SPEC_MISMATCH, "spec mismatch exit code")?
        }
        other => return Err(format!("sum q d != D: {other:?}")),
    }

    // the same three through the command line
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    cli::cmd_example("d8", dir.path()).map_err(|e| e.to_string())?;
    let (gens, blocks) = (p("d8_generators.json"), p("d8_blocks.json"));
    let file = BlockSpecFile::read(dir.path().join("d8_blocks.json").as_path()).map_err(|e| e.to_string())?;

    // keeping Σ q d = 8 requires dropping two 1D families alongside q_5 = 3
    let mut q3 = file.clone();
    q3.families.drain(0..2);
    q3.families[2].multiplicity = 3;
    q3.write(dir.path().join("q3.json").as_path())
        .map_err(|e| e.to_string())?;
    let (code, err) = run_cli(&["solve", &gens, &p("q3.json"), "--out", &p("s.json")]);
    ensure(
        code == exit::KERNEL_DIMENSION && err.contains("kernel has dimension 2"),
        format!("cli q5 = 3: exit {code}, {err}"),
    )?;

    let mut q3_only = file.clone();
    q3_only.families[4].multiplicity = 3;
    q3_only
        .write(dir.path().join("q3_only.json").as_path())
        .map_err(|e| e.to_string())?;
    let (code, err) = run_cli(&["solve", &gens, &p("q3_only.json"), "--out", &p("s.json")]);
    ensure(
        code == exit::SPEC_MISMATCH,
        format!("cli sum q d = 10: exit {code}, {err}"),
    )?;

    let mut g =
        sbd::format::MatrixSetFile::read(dir.path().join("d8_generators.json").as_path()).map_err(|e| e.to_string())?;
    g.generators[0].matrix[0][0] = [2.0, 0.0];
    g.write(dir.path().join("bad.json").as_path())
        .map_err(|e| e.to_string())?;
    let (code, err) = run_cli(&["solve", &p("bad.json"), &blocks, "--out", &p("s.json")]);
    ensure(
        code == exit::NON_UNITARY,
        format!("cli non-unitary: exit {code}, {err}"),
    )?;

    Ok(format!(
        "KernelDimensionMismatch -> {}, NonUnitaryInput -> {}, SpecDimensionError -> {}",
        exit::KERNEL_DIMENSION,
        exit::NON_UNITARY,
        exit::SPEC_MISMATCH
    ))
}

fn linalg_identities() -> Outcome {
    let mut r = rng(99);
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let (a, b, k, l) = (
            r.random_range(1..5),
            r.random_range(1..5),
            r.random_range(1..5),
            r.random_range(1..5),
        );
        let x = random_matrix(&mut r, a, b);
        let y = random_matrix(&mut r, b, k);
        let lhs = vec(&(&x * &y));
        let via_x = kron(&ComplexDenseMatrix::identity(k), &x).mul_vec(&vec(&y)).unwrap();
        let via_y = kron(&y.transpose(), &ComplexDenseMatrix::identity(a))
            .mul_vec(&vec(&x))
            .unwrap();
        for (p, (q, s)) in lhs.as_slice().iter().zip(via_x.as_slice().iter().zip(via_y.as_slice())) {
            worst = worst.max((p - q).norm()).max((p - s).norm());
        }

        let cm = random_matrix(&mut r, b, l);
        let d = random_matrix(&mut r, k, a);
        let mixed = (&(&kron(&x, &y) * &kron(&cm, &d)) - &kron(&(&x * &cm), &(&y * &d))).max_norm();
        worst = worst.max(mixed);
        ensure(worst <= 1e-12, format!("trial {trial}: deviation {worst:.2e}"))?;

        ensure(
            unvec(&vec(&x), a).unwrap() == x,
            format!("trial {trial}: vec/unvec round trip"),
        )?;
    }
    Ok(format!("1000 trials, worst deviation {worst:.1e}, round trips exact"))
}

fn grouprep_checks() -> Outcome {
    let table = d8_cayley_table();
    let rep = regular_representation(&table, &["a", "b"]).map_err(|e| e.to_string())?;
    let (ga, gb) = d8_reference_generators();
    ensure(
        rep.matrix(0) == &ga && rep.matrix(1) == &gb,
        "a, b images differ from the reference matrices",
    )?;

    let q = multiplicities_in_regular(&builtin_example_d8().characters).map_err(|e| e.to_string())?;
    ensure(q == [1, 1, 1, 1, 2], format!("multiplicities {q:?}"))?;

    let failing = homomorphism_failures(&table, RegularConvention::default(), false);
    let reversed = homomorphism_failures(&table, RegularConvention::default(), true);
    let column = homomorphism_failures(&table, RegularConvention::Column, false);
    ensure(
        failing.is_empty(),
        format!(
            "M(g)M(h) != M(gh) for {}/64 pairs (first: g={}, h={}); M(g)M(h) = M(hg) fails {}/64; \
             the transposed layout fails {}/64 but does not reproduce the reference matrices",
            failing.len(),
            failing[0].0,
            failing[0].1,
            reversed.len(),
            column.len()
        ),
    )?;
    Ok("generator images match, 64/64 pairs homomorphic, multiplicities (1,1,1,1,2)".into())
}

/// Pairs on which `M(g)M(h) = M(gh)` (or `M(hg)` when `reversed`) does not hold.
fn homomorphism_failures(
    table: &sbd::CayleyTable,
    conv: RegularConvention,
    reversed: bool,
) -> Vec<(&'static str, &'static str)> {
    let all = regular_representation_with(table, &D8_ELEMENTS, conv).unwrap();
    let mut out = Vec::new();
    for (g, gl) in D8_ELEMENTS.iter().enumerate() {
        for (h, hl) in D8_ELEMENTS.iter().enumerate() {
            let gh = if reversed {
                table.product(h, g)
            } else {
                table.product(g, h)
            };
            if all.matrix(g) * all.matrix(h) != *all.matrix(gh) {
                out.push((*gl, *hl));
            }
        }
    }
    out
}

fn main() -> ExitCode {
    let instances = suite();
    let criteria: Vec<Criterion> = vec![
        ("1 d8 golden", Box::new(d8_golden)),
        ("2 reference S agreement", Box::new(reference_agreement)),
        ("3 kernel structure", Box::new(kernel_structure)),
        ("4 scramble suite", Box::new(|| scramble_suite(&instances))),
        ("5 strategy equivalence", Box::new(|| strategy_equivalence(&instances))),
        ("6 error paths", Box::new(error_paths)),
        ("7 linalg identities", Box::new(linalg_identities)),
        ("8 grouprep", Box::new(grouprep_checks)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
