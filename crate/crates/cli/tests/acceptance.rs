//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use entsym::coding::{
    blahut_arimoto, capacity_weakly_symmetric, dense_coding, entanglement_assisted_capacity_report, teleportation,
    verify_scheme, ClassicalChannel,
};
use entsym::cpmaps::{choi_witness, cp_condition_operator, is_channel, ChannelMap};
use entsym::frobenius::check_star_cohomomorphism;
use entsym::groups::{
    twisted_group_algebra, weyl_cocycle, Cocycle2, FiniteAbelianGroup, GradedAlgebra, Subgroup,
};
use entsym::sample::{random_covariant_channel, random_kraus_map, random_weakly_symmetric};
use entsym::symmetry::{
    coboundary_caveat, entanglement_invertibility, equivalence_functor_check, naturality_check,
    transform_with_pairs, EntangledPair, UptInstance,
};
use entsym::{check_algebra, matrix_algebra, multimatrix_algebra, tensor_product, DenseMatrix, FrobeniusAlgebra, Tolerance, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn tol(eps: f64) -> Tolerance {
    Tolerance::new(eps).unwrap()
}

fn untwisted(orders: &[usize]) -> GradedAlgebra {
    let g = FiniteAbelianGroup::new(orders.to_vec()).unwrap();
    twisted_group_algebra(&Subgroup::whole(&g), &Cocycle2::trivial(&g)).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Block lists with nondecreasing sizes and `Σ n² ≤ max`.
fn block_lists(max: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        let start = prefix.last().copied().unwrap_or(1);
        for n in start.. {
            if used + n * n > max {
                break;
            }
            prefix.push(n);
            out.push(prefix.clone());
            go(prefix, used + n * n, max, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 0, max, &mut out);
    out
}

fn constructor_suite() -> Outcome {
    let mut algebras: Vec<(String, FrobeniusAlgebra)> = Vec::new();
    for d in 1..=4 {
        algebras.push((format!("M{d}"), matrix_algebra(d).unwrap()));
    }
    for blocks in block_lists(12) {
        algebras.push((format!("multimatrix {blocks:?}"), multimatrix_algebra(&blocks).unwrap()));
    }
    let mut graded: Vec<(String, Subgroup, Cocycle2)> = Vec::new();
    for orders in [
        vec![2],
        vec![3],
        vec![4],
        vec![5],
        vec![6],
        vec![8],
        vec![12],
        vec![16],
        vec![2, 2],
        vec![2, 3],
        vec![2, 4],
        vec![2, 2, 2],
        vec![2, 8],
        vec![2, 2, 2, 2],
        vec![3, 3],
        vec![4, 4],
    ] {
        let g = FiniteAbelianGroup::new(orders.clone()).unwrap();
        graded.push((format!("A({orders:?}, 1)"), Subgroup::whole(&g), Cocycle2::trivial(&g)));
    }
    for d in [2, 3, 4] {
        let psi = weyl_cocycle(d).unwrap();
        let g = psi.group().clone();
        let mut subgroups = vec![
            ("whole", Subgroup::whole(&g)),
            ("<(1,0)>", Subgroup::generated(&g, &[vec![1, 0]]).unwrap()),
            ("<(1,1)>", Subgroup::generated(&g, &[vec![1, 1]]).unwrap()),
        ];
        if d == 4 {
            subgroups.push(("<(2,0),(0,2)>", Subgroup::generated(&g, &[vec![2, 0], vec![0, 2]]).unwrap()));
        }
        for (label, l) in subgroups {
            graded.push((format!("A({label} in Z{d}xZ{d}, weyl)"), l.clone(), psi.clone()));
            graded.push((format!("A({label} in Z{d}xZ{d}, 1)"), l, Cocycle2::trivial(&g)));
        }
    }
    for (label, l, phi) in &graded {
        algebras.push((label.clone(), (**twisted_group_algebra(l, phi).unwrap().algebra()).clone()));
    }
    let m2 = matrix_algebra(2).unwrap();
    let weyl2 = twisted_group_algebra(&Subgroup::whole(weyl_cocycle(2).unwrap().group()), &weyl_cocycle(2).unwrap())
        .unwrap()
        .algebra()
        .as_ref()
        .clone();
    let pairs = [
        ("M2 x M2", m2.clone(), m2.clone()),
        ("M2 x C2", m2.clone(), multimatrix_algebra(&[1, 1]).unwrap()),
        ("[1,2] x M2", multimatrix_algebra(&[1, 2]).unwrap(), m2.clone()),
        ("M3 x C2", matrix_algebra(3).unwrap(), multimatrix_algebra(&[1, 1]).unwrap()),
        ("A(Z2xZ2,1) x M2", untwisted(&[2, 2]).algebra().as_ref().clone(), m2.clone()),
        ("A(Z2xZ2,weyl) x A(Z3,1)", weyl2, untwisted(&[3]).algebra().as_ref().clone()),
    ];
    for (label, a, b) in pairs {
        algebras.push((format!("tensor {label}"), tensor_product(&a, &b).unwrap()));
    }
    let mut worst = (0.0f64, String::new());
    for (label, a) in &algebras {
        let r = check_algebra(a).max_ssfa_residual();
        if r > worst.0 {
            worst = (r, label.clone());
        }
    }
    ensure(worst.0 <= 1e-10, || format!("{} has residual {:e}", worst.1, worst.0))?;
    Ok(format!("{} algebras, worst residual {:.1e}", algebras.len(), worst.0))
}

fn special_trace() -> Outcome {
    let mut worst_special = f64::INFINITY;
    for d in [2usize, 3] {
        let a = matrix_algebra(d).unwrap();
        let norm: f64 = a.unit().iter().map(|z| z.norm_sqr()).sum();
        ensure((norm - (d * d) as f64).abs() <= 1e-12, || format!("M{d}: u†u = {norm}"))?;
        for lambda in [0.5f64, 2.0] {
            // trace scaled by λ: counit times λ, multiplication divided by λ
            let b = a.rescaled(1.0 / lambda.sqrt(), lambda.sqrt());
            let r = check_algebra(&b);
            ensure(r.assoc <= 1e-10 && r.unital <= 1e-10 && r.frobenius <= 1e-10, || {
                format!("M{d}, λ={lambda}: rescaling should stay Frobenius, {r:?}")
            })?;
            ensure(r.special >= 0.2, || format!("M{d}, λ={lambda}: speciality residual {}", r.special))?;
            worst_special = worst_special.min(r.special);
        }
    }
    Ok(format!("u†u = 4, 9; smallest rescaled speciality residual {worst_special:.3}"))
}

fn cp_calibration() -> Outcome {
    const SHAPES: &[&[usize]] = &[&[1], &[2], &[3], &[1, 1], &[1, 2], &[2, 1], &[1, 1, 1], &[1, 1, 2], &[2, 2], &[1, 1, 1, 1]];
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut decisive, mut negative) = (0, 0);
    let trials = 480;
    for trial in 0..trials {
        let s = SHAPES[rng.gen_range(0..SHAPES.len())];
        let t = SHAPES[rng.gen_range(0..SHAPES.len())];
        let rank = rng.gen_range(1..3);
        let negative_terms = if trial % 2 == 0 { 0 } else { rng.gen_range(1..3) };
        let f = random_kraus_map(
            Arc::new(multimatrix_algebra(s).unwrap()),
            Arc::new(multimatrix_algebra(t).unwrap()),
            rank,
            negative_terms,
            &mut rng,
        )
        .unwrap();
        let frob = cp_condition_operator(&f).unwrap().min_eigenvalue;
        let (choi, _, _) = choi_witness(&f).unwrap();
        if frob.abs() > 1e-8 && choi.abs() > 1e-8 {
            decisive += 1;
            negative += usize::from(choi < 0.0);
            ensure((frob > 0.0) == (choi > 0.0), || {
                format!("trial {trial}: {s:?} -> {t:?}, operator {frob:e} vs Choi {choi:e}")
            })?;
        }
    }
    ensure(decisive >= 200, || format!("only {decisive} decisive cases"))?;
    Ok(format!("{trials} maps, {decisive} decisive ({negative} not CP), all verdicts agree"))
}

fn encoder_decoder_instances() -> Outcome {
    let mut worst = 0.0f64;
    for d in [2, 3, 4] {
        let a = untwisted(&[d, d]);
        let pair = EntangledPair::new(&a, &UptInstance::clock_shift(d).unwrap()).unwrap();
        for m in [&pair.u, &pair.v] {
            let r = check_star_cohomomorphism(m.matrix(), m.source(), m.target()).unwrap();
            worst = worst.max(r.max());
        }
        let (r1, r2) = entanglement_invertibility(&pair).unwrap();
        worst = worst.max(r1).max(r2);
        ensure(worst <= 1e-9, || format!("d={d}: residual {worst:e}"))?;
    }
    Ok(format!("d = 2, 3, 4, worst residual {worst:.1e}"))
}

fn teleport_dense() -> Outcome {
    let mut worst = 0.0f64;
    for d in [2, 3] {
        for (label, s) in [("teleportation", teleportation(d).unwrap()), ("dense coding", dense_coding(d).unwrap())] {
            let r = verify_scheme(&s).unwrap();
            ensure(r <= 1e-9, || format!("{label} d={d}: residual {r:e}"))?;
            worst = worst.max(r);
        }
    }
    Ok(format!("d = 2, 3 both directions, worst residual {worst:.1e}"))
}

fn transformation() -> Outcome {
    let t9 = tol(1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = [0.0f64; 3];
    for d in [2, 3] {
        let a = untwisted(&[d, d]);
        let upt = UptInstance::clock_shift(d).unwrap();
        let pair = EntangledPair::new(&a, &upt).unwrap();
        for k in 0..20 {
            let f = random_covariant_channel(&a, &mut rng).unwrap();
            let g = random_covariant_channel(&a, &mut rng).unwrap();
            let t = transform_with_pairs(&f, &pair, &pair, &t9).map_err(|e| format!("d={d} #{k}: {e}"))?;
            ensure(t.off_diagonal <= 1e-10, || format!("d={d} #{k}: off-diagonal {:e}", t.off_diagonal))?;
            ensure(is_channel(&t.map, &tol(1e-10)).unwrap().channel, || format!("d={d} #{k}: image is not a channel"))?;
            let (nu, nv) = naturality_check(&f, &t.map, &pair, &pair).unwrap();
            let (rc, ri) = equivalence_functor_check(&f, &g, [&a, &a, &a], upt.cocycle(), &t9).unwrap();
            ensure(nu.max(nv) <= 1e-9, || format!("d={d} #{k}: naturality {:e}", nu.max(nv)))?;
            ensure(rc.max(ri) <= 1e-9, || format!("d={d} #{k}: functoriality {:e}", rc.max(ri)))?;
            worst[0] = worst[0].max(t.off_diagonal);
            worst[1] = worst[1].max(nu.max(nv));
            worst[2] = worst[2].max(rc.max(ri));
        }
    }
    Ok(format!(
        "40 channels, off-diagonal {:.1e}, naturality {:.1e}, functoriality {:.1e}",
        worst[0], worst[1], worst[2]
    ))
}

fn caveat() -> Outcome {
    let t = tol(1e-10);
    let g = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
    let l1 = Subgroup::generated(&g, &[vec![1, 1]]).unwrap();
    let a1 = twisted_group_algebra(&l1, &Cocycle2::trivial(&g)).unwrap();
    let a2 = untwisted(&[2, 2]);
    let s = 1.0 / 2f64.sqrt();
    let mut m = DenseMatrix::zeros(4, 2);
    m[(0, 0)] = C64::new(s, 0.0);
    m[(3, 1)] = C64::new(s, 0.0);
    let f = ChannelMap::new(a1.algebra().clone(), a2.algebra().clone(), m).unwrap();
    let roots = [C64::new(1., 0.), C64::new(0., 1.), C64::new(-1., 0.), C64::new(0., -1.)];
    for code in 0..256usize {
        let phi: Vec<C64> = (0..4).map(|k| roots[(code >> (2 * k)) & 3]).collect();
        let psi = Cocycle2::coboundary(&g, &phi).unwrap();
        let r = coboundary_caveat(&f, &a1, &a2, &psi, &t).unwrap();
        if r.difference >= 0.05 && r.original.channel && r.image_report.channel {
            let shown: Vec<String> = phi.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
            return Ok(format!("phase [{}] gives difference {:.4}", shown.join(", "), r.difference));
        }
    }
    Err("no coboundary separates the image from the original".into())
}

fn capacity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for k in 0..50 {
        let outputs = rng.gen_range(2..=8);
        let repeats = rng.gen_range(1..=2);
        let c = random_weakly_symmetric(outputs, repeats, &mut rng).unwrap();
        let closed = capacity_weakly_symmetric(&c).unwrap();
        let ba = blahut_arimoto(&c, 10_000, 1e-12).capacity;
        ensure((closed - ba).abs() <= 1e-5, || format!("channel {k}: {closed} vs {ba}"))?;
        worst = worst.max((closed - ba).abs());
    }
    let bsc = capacity_weakly_symmetric(&ClassicalChannel::binary_symmetric(0.5).unwrap()).unwrap();
    ensure(bsc.abs() <= 1e-9, || format!("BSC(0.5) capacity {bsc}"))?;
    let id4 = capacity_weakly_symmetric(&ClassicalChannel::identity(4).unwrap()).unwrap();
    ensure((id4 - 2.0).abs() <= 1e-9, || format!("identity on 4 capacity {id4}"))?;
    let a = untwisted(&[2, 2]);
    let id = ChannelMap::identity(a.algebra().clone());
    let report = entanglement_assisted_capacity_report(&id, &a, &a, &UptInstance::clock_shift(2).unwrap(), &tol(1e-9))
        .map_err(|e| e.to_string())?;
    ensure((report.image_entanglement_assisted_bits - 2.0).abs() <= 1e-9 && report.certificate, || {
        format!("C_E report {report:?}")
    })?;
    Ok(format!(
        "50 channels within {worst:.1e}; BSC(0.5) = {bsc}, id4 = {id4}, C_E = {}",
        report.image_entanglement_assisted_bits
    ))
}

fn cli_determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_entsym"))
            .args(["demo", "teleport-d2", "--format", "json", "--seed", "17"])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success() && b.status.success(), || format!("exit codes {:?} {:?}", a.status, b.status))?;
    ensure(a.stdout == b.stdout, || "reports differ between runs".into())?;
    let text = String::from_utf8_lossy(&a.stdout);
    ensure(text.contains("\"seed\": 17"), || "seed missing from report".into())?;
    Ok(format!("two runs, {} identical bytes", a.stdout.len()))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("1 Frobenius constructor suite", Duration::from_secs(5), constructor_suite),
        ("2 special-trace uniqueness", Duration::from_secs(1), special_trace),
        ("3 CP calibration", Duration::from_secs(30), cp_calibration),
        ("4 encoder/decoder instances", Duration::from_secs(20), encoder_decoder_instances),
        ("5 teleportation and dense coding", Duration::from_secs(5), teleport_dense),
        ("6 transformation correctness", Duration::from_secs(30), transformation),
        ("7 coboundary caveat", Duration::from_secs(2), caveat),
        ("8 capacity", Duration::from_secs(60), capacity),
        ("9 CLI determinism", Duration::from_secs(5), cli_determinism),
    ];
    let mut failures = 0;
    for (name, budget, f) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= budget => (true, d),
            Ok(d) => (false, format!("{d}; over time budget {budget:?}")),
            Err(e) => (false, e),
        };
        failures += usize::from(!ok);
        println!(
            "{} criterion {name}: {detail} [{:.2} s]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
