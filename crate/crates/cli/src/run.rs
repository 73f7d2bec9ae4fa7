//! Executes object checks and tasks against a resolved scene.

use std::sync::Arc;

use entsym::coding::{
    blahut_arimoto, capacity_weakly_symmetric, dense_coding, entanglement_assisted_capacity_report,
    is_weakly_symmetric, teleportation, verify_scheme, ClassicalChannel, CodingScheme,
};
use entsym::cpmaps::{is_channel, ChannelMap};
use entsym::frobenius::check_star_cohomomorphism;
use entsym::groups::{fourier_matrix, is_covariant, Cocycle2, GradedAlgebra};
use entsym::sample::random_covariant_channel;
use entsym::symmetry::{
    coboundary_caveat, coding_scheme_equations, entanglement_invertibility, equivalence_functor_check,
    naturality_check, transform_channel, transform_with_pairs, EntangledPair, TransformedChannel,
    UptInstance,
};
use entsym::{check_algebra, Tolerance};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::report::{matrix_json, Check, Item};
use crate::scene::{AlgebraEntry, ChannelEntry, TaskDecl, World};

/// Tolerance for Blahut–Arimoto against the closed form; the iteration stops at a 1e-12 gap.
const BA_AGREEMENT: f64 = 1e-6;
const BA_ITERATIONS: usize = 10_000;
const BA_GAP: f64 = 1e-12;

type Fallible<T> = std::result::Result<T, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// One item per declared cocycle, representation, algebra and channel.
pub fn check_objects(w: &World, tol: &Tolerance) -> Vec<Item> {
    let eps = tol.epsilon;
    let mut items = Vec::new();
    for c in &w.cocycles {
        let mut item = Item::new("cocycle", &c.name);
        match &c.value.report {
            Ok(r) => {
                item.residual("unit_modulus", r.unit_modulus, eps);
                item.residual("cocycle_identity", r.cocycle_identity, eps);
            }
            Err(e) => item.fail(e.clone()),
        }
        items.push(item);
    }
    for r in &w.representations {
        let mut item = Item::new("representation", &r.name);
        match &r.value.rep {
            Ok(rep) => {
                item.residual("projective_relation", rep.residual(), eps);
                item.value("degree", rep.degree() as f64);
            }
            Err(e) => item.fail(e.clone()),
        }
        items.push(item);
    }
    for a in &w.algebras {
        let mut item = Item::new("algebra", &a.name);
        let alg = a.value.algebra();
        let r = check_algebra(alg);
        item.residual("associative", r.assoc, eps);
        item.residual("unital", r.unital, eps);
        item.residual("frobenius", r.frobenius, eps);
        item.residual("special", r.special, eps);
        item.residual("symmetric", r.symmetric, eps);
        item.residual("standard", r.standard, eps);
        item.value("dim", alg.dim() as f64);
        item.value("commutativity_defect", r.commutative);
        items.push(item);
    }
    for c in &w.channels {
        let mut item = Item::new("channel", &c.name);
        match &c.value {
            ChannelEntry::Quantum { map, .. } => match is_channel(map, tol) {
                Ok(r) => item.channel("", &r, eps),
                Err(e) => item.fail(e.to_string()),
            },
            ChannelEntry::Classical { rows } => {
                let cols = rows[0].len();
                let sum_dev = (0..cols)
                    .map(|x| (rows.iter().map(|r| r[x]).sum::<f64>() - 1.0).abs())
                    .fold(0.0, f64::max);
                let min = rows.iter().flatten().copied().fold(f64::INFINITY, f64::min);
                item.residual("column_sum", sum_dev, eps);
                item.check(Check::at_least("min_entry", min, -eps));
            }
        }
        items.push(item);
    }
    items
}

pub fn run_task(w: &World, task: &TaskDecl, tol: &Tolerance, rng: &mut ChaCha8Rng) -> Item {
    let (kind, name) = describe(task);
    let mut item = Item::new(kind, name);
    if let Err(e) = execute(w, task, tol, rng, &mut item) {
        item.fail(e);
    }
    item
}

fn describe(task: &TaskDecl) -> (&'static str, String) {
    match task {
        TaskDecl::Teleportation { d } => ("teleportation", format!("d={d}")),
        TaskDecl::DenseCoding { d } => ("dense_coding", format!("d={d}")),
        TaskDecl::EntangledPair { algebra, representation } => {
            ("entangled_pair", format!("{algebra} via {representation}"))
        }
        TaskDecl::Transform {
            channel,
            cocycle,
            representation,
        } => {
            let by = cocycle.as_ref().or(representation.as_ref()).map_or("", String::as_str);
            ("transform", format!("{channel} by {by}"))
        }
        TaskDecl::CodingSchemes { channel, representation } => {
            ("coding_schemes", format!("{channel} via {representation}"))
        }
        TaskDecl::Capacity { channel, representation } => match representation {
            Some(r) => ("capacity", format!("{channel} via {r}")),
            None => ("capacity", channel.clone()),
        },
        TaskDecl::RandomTransforms {
            algebra,
            representation,
            count,
        } => ("random_transforms", format!("{count} on {algebra} via {representation}")),
        TaskDecl::Functoriality { first, second, cocycle } => {
            ("functoriality", format!("{second} after {first} by {cocycle}"))
        }
        TaskDecl::CoboundaryCaveat { channel, cocycle } => ("coboundary_caveat", format!("{channel} by {cocycle}")),
    }
}

fn graded<'a>(w: &'a World, name: &str) -> Fallible<&'a GradedAlgebra> {
    match w.algebra(name) {
        Some(AlgebraEntry::Graded(g)) => Ok(g),
        _ => Err(format!("'{name}' is not a group algebra")),
    }
}

fn graded_channel<'a>(w: &'a World, name: &str) -> Fallible<(&'a ChannelMap, &'a GradedAlgebra, &'a GradedAlgebra)> {
    match w.channel(name) {
        Some(ChannelEntry::Quantum { map, source, target }) => Ok((map, graded(w, source)?, graded(w, target)?)),
        _ => Err(format!("'{name}' is not a channel between group algebras")),
    }
}

fn cocycle<'a>(w: &'a World, name: &str) -> Fallible<&'a Cocycle2> {
    w.cocycle(name)
        .and_then(|c| c.cocycle.as_ref())
        .ok_or_else(|| format!("cocycle '{name}' is invalid"))
}

fn upt(w: &World, rep: &str) -> Fallible<UptInstance> {
    let entry = w.representation(rep).ok_or_else(|| format!("unknown representation '{rep}'"))?;
    let rep = entry.rep.clone().map_err(|e| format!("representation is invalid: {e}"))?;
    Ok(UptInstance::new(rep))
}

/// Pairs for source and target, shared when the algebras coincide.
fn pairs(a1: &GradedAlgebra, a2: &GradedAlgebra, upt: &UptInstance) -> Fallible<(EntangledPair, EntangledPair)> {
    let p1 = EntangledPair::new(a1, upt).map_err(err)?;
    let p2 = if Arc::ptr_eq(a1.algebra(), a2.algebra()) {
        p1.clone()
    } else {
        EntangledPair::new(a2, upt).map_err(err)?
    };
    Ok((p1, p2))
}

fn graded_json(a: &GradedAlgebra) -> serde_json::Value {
    let g = a.group();
    let els = a.grading();
    let phases = entsym::DenseMatrix::from_fn(els.len(), els.len(), |i, j| a.cocycle().value(els[i], els[j]));
    json!({
        "dim": a.dim(),
        "group": g.orders(),
        "grading": els.iter().map(|&x| g.element(x)).collect::<Vec<_>>(),
        "cocycle": matrix_json(&phases),
    })
}

fn transformed_json(t: &TransformedChannel) -> serde_json::Value {
    json!({
        "source": graded_json(&t.source),
        "target": graded_json(&t.target),
        "f_mu": matrix_json(t.f_mu()),
        "stochastic": t
            .stochastic
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|z| z.re).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

fn scheme_checks(item: &mut Item, s: &CodingScheme, tol: &Tolerance) -> Fallible<()> {
    item.residual("scheme", verify_scheme(s).map_err(err)?, tol.epsilon);
    let reports = s.channel_reports(tol).map_err(err)?;
    for (prefix, r) in ["encoder_", "channel_", "decoder_", "target_"].iter().zip(&reports) {
        item.channel(prefix, r, tol.epsilon);
    }
    Ok(())
}

fn classical_capacity(item: &mut Item, c: &ClassicalChannel) {
    let ba = blahut_arimoto(c, BA_ITERATIONS, BA_GAP);
    item.check(Check::at_most("blahut_arimoto_gap", ba.upper_bound - ba.capacity, BA_GAP));
    if is_weakly_symmetric(c) {
        let cap = capacity_weakly_symmetric(c).expect("checked weakly symmetric");
        item.check(Check::at_most("blahut_arimoto_agreement", (cap - ba.capacity).abs(), BA_AGREEMENT));
        item.value("capacity_bits", cap);
    }
    item.value("blahut_arimoto_bits", ba.capacity);
    item.value("blahut_arimoto_iterations", ba.iterations as f64);
    item.value("weakly_symmetric", if is_weakly_symmetric(c) { 1.0 } else { 0.0 });
}

fn execute(w: &World, task: &TaskDecl, tol: &Tolerance, rng: &mut ChaCha8Rng, item: &mut Item) -> Fallible<()> {
    let eps = tol.epsilon;
    match task {
        TaskDecl::Teleportation { d } => scheme_checks(item, &teleportation(*d).map_err(err)?, tol),
        TaskDecl::DenseCoding { d } => scheme_checks(item, &dense_coding(*d).map_err(err)?, tol),
        TaskDecl::EntangledPair { algebra, representation } => {
            let a = graded(w, algebra)?;
            let pair = EntangledPair::new(a, &upt(w, representation)?).map_err(err)?;
            for (label, m) in [("u", &pair.u), ("v", &pair.v)] {
                let r = check_star_cohomomorphism(m.matrix(), m.source(), m.target()).map_err(err)?;
                item.residual(&format!("{label}_comultiplicative"), r.multiplicative, eps);
                item.residual(&format!("{label}_counital"), r.unit, eps);
                item.residual(&format!("{label}_involutive"), r.involutive, eps);
            }
            let (r1, r2) = entanglement_invertibility(&pair).map_err(err)?;
            item.residual("v_undoes_u", r1, eps);
            item.residual("u_undoes_v", r2, eps);
            item.value("resource_dim", pair.resource_dim as f64);
            Ok(())
        }
        TaskDecl::Transform {
            channel,
            cocycle: psi,
            representation,
        } => {
            let (f, a1, a2) = graded_channel(w, channel)?;
            let cov = is_covariant(f.matrix(), a1, a2).map_err(err)?;
            item.residual("covariance", cov, eps);
            let t = match (psi, representation) {
                (Some(p), _) => transform_channel(f, a1, a2, cocycle(w, p)?, tol).map_err(err)?,
                (None, Some(r)) => {
                    let (p1, p2) = pairs(a1, a2, &upt(w, r)?)?;
                    let t = transform_with_pairs(f, &p1, &p2, tol).map_err(err)?;
                    let (nu, nv) = naturality_check(f, &t.map, &p1, &p2).map_err(err)?;
                    item.residual("naturality_u", nu, eps);
                    item.residual("naturality_v", nv, eps);
                    t
                }
                (None, None) => return Err("transform needs a cocycle or a representation".into()),
            };
            item.residual("off_diagonal", t.off_diagonal, eps);
            item.channel("transformed_", &is_channel(&t.map, tol).map_err(err)?, eps);
            item.output = Some(transformed_json(&t));
            Ok(())
        }
        TaskDecl::CodingSchemes { channel, representation } => {
            let (f, a1, a2) = graded_channel(w, channel)?;
            let (p1, p2) = pairs(a1, a2, &upt(w, representation)?)?;
            let t = transform_with_pairs(f, &p1, &p2, tol).map_err(err)?;
            let (forward, backward) = coding_scheme_equations(f, &t.map, &p1, &p2).map_err(err)?;
            item.residual("scheme_original_from_transformed", forward, eps);
            item.residual("scheme_transformed_from_original", backward, eps);
            Ok(())
        }
        TaskDecl::Capacity { channel, representation } => match (w.channel(channel), representation) {
            (Some(ChannelEntry::Classical { .. }), _) => {
                let c = w.channel(channel).expect("present").classical()?;
                classical_capacity(item, &c);
                Ok(())
            }
            (_, Some(r)) => {
                let (f, a1, a2) = graded_channel(w, channel)?;
                let rep = upt(w, r)?;
                let report = entanglement_assisted_capacity_report(f, a1, a2, &rep, tol).map_err(err)?;
                item.check(Check::at_most(
                    "blahut_arimoto_agreement",
                    (report.capacity_bits - report.blahut_arimoto_bits).abs(),
                    BA_AGREEMENT,
                ));
                item.residual("scheme_original_from_transformed", report.coding_residuals[0], eps);
                item.residual("scheme_transformed_from_original", report.coding_residuals[1], eps);
                item.residual("naturality_u", report.naturality_residuals[0], eps);
                item.residual("naturality_v", report.naturality_residuals[1], eps);
                item.check(Check::at_least("certificate", f64::from(u8::from(report.certificate)), 1.0));
                item.value("capacity_bits", report.capacity_bits);
                item.value("blahut_arimoto_bits", report.blahut_arimoto_bits);
                item.value("entanglement_assisted_bits", report.entanglement_assisted_bits);
                item.value("image_entanglement_assisted_bits", report.image_entanglement_assisted_bits);
                item.value(
                    "image_quantum_entanglement_assisted_qubits",
                    report.image_quantum_entanglement_assisted_qubits,
                );
                Ok(())
            }
            (_, None) => {
                let (f, a1, a2) = graded_channel(w, channel)?;
                if !a1.is_untwisted() || !a2.is_untwisted() {
                    return Err("capacity needs untwisted group algebras".into());
                }
                let cov = is_covariant(f.matrix(), a1, a2).map_err(err)?;
                item.residual("covariance", cov, eps);
                if !tol.accepts(cov) {
                    return Err(format!("channel is not covariant (residual {cov:e})"));
                }
                let mu1 = fourier_matrix(a1.subgroup());
                let mu2 = fourier_matrix(a2.subgroup());
                let m = mu2.dagger().matmul(f.matrix()).and_then(|x| x.matmul(&mu1)).map_err(err)?;
                let c = ClassicalChannel::from_matrix(&m, 1e-9).map_err(err)?;
                classical_capacity(item, &c);
                Ok(())
            }
        },
        TaskDecl::RandomTransforms {
            algebra,
            representation,
            count,
        } => {
            let a = graded(w, algebra)?;
            let rep = upt(w, representation)?;
            let pair = EntangledPair::new(a, &rep).map_err(err)?;
            let mut worst = [0.0f64; 5];
            let mut non_channels = 0usize;
            for _ in 0..*count {
                let f = random_covariant_channel(a, rng).map_err(err)?;
                let g = random_covariant_channel(a, rng).map_err(err)?;
                let t = transform_with_pairs(&f, &pair, &pair, tol).map_err(err)?;
                let (nu, nv) = naturality_check(&f, &t.map, &pair, &pair).map_err(err)?;
                let (c1, c2) = coding_scheme_equations(&f, &t.map, &pair, &pair).map_err(err)?;
                let (fc, fi) = equivalence_functor_check(&f, &g, [a, a, a], rep.cocycle(), tol).map_err(err)?;
                let r = is_channel(&t.map, tol).map_err(err)?;
                non_channels += usize::from(!r.channel);
                for (slot, v) in worst.iter_mut().zip([t.off_diagonal, nu.max(nv), c1.max(c2), fc.max(fi), r.counit_residual]) {
                    *slot = slot.max(v);
                }
            }
            item.residual("max_off_diagonal", worst[0], eps);
            item.residual("max_naturality", worst[1], eps);
            item.residual("max_coding_scheme", worst[2], eps);
            item.residual("max_functoriality", worst[3], eps);
            item.residual("max_transformed_counit", worst[4], eps);
            item.check(Check::at_most("transformed_non_channels", non_channels as f64, 0.0));
            item.value("samples", *count as f64);
            Ok(())
        }
        TaskDecl::Functoriality { first, second, cocycle: psi } => {
            let (f, a1, a2) = graded_channel(w, first)?;
            let (g, b2, a3) = graded_channel(w, second)?;
            if !Arc::ptr_eq(a2.algebra(), b2.algebra()) {
                return Err(format!("'{second}' does not start where '{first}' ends"));
            }
            let (rc, ri) = equivalence_functor_check(f, g, [a1, a2, a3], cocycle(w, psi)?, tol).map_err(err)?;
            item.residual("composition", rc, eps);
            item.residual("identity", ri, eps);
            Ok(())
        }
        TaskDecl::CoboundaryCaveat { channel, cocycle: psi } => {
            let (f, a1, a2) = graded_channel(w, channel)?;
            let r = coboundary_caveat(f, a1, a2, cocycle(w, psi)?, tol).map_err(err)?;
            item.channel("original_", &r.original, eps);
            item.channel("image_", &r.image_report, eps);
            item.value("difference", r.difference);
            item.output = Some(json!({ "image": matrix_json(r.image.matrix()) }));
            Ok(())
        }
    }
}
