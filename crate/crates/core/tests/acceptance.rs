//! Acceptance suite: one line per criterion, nonzero exit status on any
//! failure or time-limit overrun.  Run with `cargo test --test acceptance`.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qdeform::abgroup::{
    add_coboundary, coboundary, cohomologous, AdditiveCocycle, BilinearCocycle, Character, FreeAbGroup, GrpElt, MVec, OneCochain,
};
use qdeform::cleft::{
    aug_pair_to_extension, augmented_round_trip, canonical_section, coinvariants_check, compare_deformation, pair_equivalent,
    pullback_cocycle_check, verify_pair_witness, whitehead_reduce, AugPairSM, CleftObject, PairEquivalence, PairSigmaMu,
    SectionCocycle,
};
use qdeform::datum::{LetterSpec, ParamMap, YDDatum};
use qdeform::freealg::{assemble, flavor_tails, serre_relations, Element, Flavor, Mono, Presentation};
use qdeform::hopf::{cocycle_identity_check, group_samples, sample_basis, verify_hopf, CheckReport, CocycleSide, Side};
use qdeform::uq::{self, build_borel, build_uq, gr_compare, resolve, sigma_of_u, LambdaMode, UMat, UqData, UqInput};
use qdeform::{Coeff, Scalar};

type Outcome = Result<String, String>;

fn data(name: &str) -> UqData {
    resolve(&UqInput::preset(name).expect("preset")).expect("valid preset")
}

fn report_outcome(label: &str, rep: &CheckReport) -> Result<usize, String> {
    if rep.all_pass() {
        Ok(rep.checked())
    } else {
        let f = &rep.failures[0];
        Err(format!("{label}: {} failures, first {} on {} (residual {})", rep.failures.len(), f.identity, f.element, f.residual))
    }
}

// ---------------------------------------------------------------------------
// 1. Diamond lemma
// ---------------------------------------------------------------------------

/// Three letters in three blocks with generic braiding and parameters not
/// restricted to Ξ.
fn three_block_datum() -> Arc<YDDatum> {
    // exponents c[a][b] with χ_b(e_a) = q^{c[a][b]}; off-diagonal antisymmetric
    let c = [[2, 1, 3], [-1, 4, 5], [-3, -5, 6]];
    let letters = (0..3)
        .map(|a| LetterSpec {
            label: ["k", "j", "i"][a].into(),
            block: a,
            g: GrpElt::unit(3, a),
            chi: Character::new((0..3).map(|r| Scalar::q_pow(c[r][a])).collect()),
        })
        .collect();
    Arc::new(YDDatum::new(FreeAbGroup::new(3), letters, None).expect("datum"))
}

fn criterion1() -> Outcome {
    let u = data("A2");
    let b = build_uq(&u, LambdaMode::Standard).map_err(|e| e.to_string())?;
    let d = b.datum.clone();
    let tails = flavor_tails(&d, Flavor::Hlambda, None, &b.lambda, &ParamMap::new());
    let raw = assemble(d.clone(), Flavor::Hlambda, None, &tails, &b.serre).map_err(|e| e.to_string())?;
    let rep = raw.check_overlaps(4);
    let bad: Vec<_> = rep.failures().collect();
    if !bad.is_empty() {
        return Err(format!("{} unresolved critical pairs, first {:?}", bad.len(), bad[0].word));
    }
    let npairs = rep.pairs.len();

    // Raw discrepancy of x_i x_j x_k with central group elements.
    let d3 = three_block_datum();
    let (i, j, k) = (2usize, 1usize, 0usize);
    let lam: ParamMap<Scalar> = [
        ((i, j), Scalar::from_rat(BigRational::new(BigInt::from(1), BigInt::from(2)))),
        ((i, k), Scalar::q()),
        ((j, k), Scalar::q().add(&Scalar::one())),
    ]
    .into_iter()
    .collect();
    let tails = flavor_tails(&d3, Flavor::Alambda, None, &lam, &ParamMap::new());
    let p = assemble(d3.clone(), Flavor::Alambda, None, &tails, &[]).map_err(|e| e.to_string())?.with_central_group();
    let rep3 = p.check_overlaps(3);
    let pair = rep3
        .pairs
        .iter()
        .find(|c| c.word.as_slice() == [i as u8, j as u8, k as u8])
        .ok_or("x_i x_j x_k overlap missing")?;
    let q = |a: usize, b: usize| d3.q(a, b).clone();
    let gsum = |a: usize, b: usize| d3.g[a].add(&d3.g[b]);
    let mut expected = Element::zero();
    expected.add_term(
        Mono::new(&[i as u8], gsum(j, k)),
        q(i, j).mul(&q(i, k)).mul(&lam[&(j, k)]).sub(&lam[&(j, k)]),
    );
    expected.add_term(Mono::new(&[j as u8], gsum(i, k)), q(i, j).mul(&lam[&(i, k)]).sub(&q(j, k).mul(&lam[&(i, k)])));
    expected.add_term(Mono::new(&[k as u8], gsum(i, j)), lam[&(i, j)].sub(&q(i, k).mul(&q(j, k)).mul(&lam[&(i, j)])));
    if pair.discrepancy != expected {
        return Err(format!(
            "raw discrepancy {} differs from {}",
            pair.discrepancy.fmt_with(&d3),
            expected.fmt_with(&d3)
        ));
    }
    if expected.is_zero() {
        return Err("generic raw discrepancy unexpectedly vanishes".into());
    }
    Ok(format!("{npairs} critical pairs resolve; raw x_i x_j x_k discrepancy matches ({} terms)", expected.len()))
}

// ---------------------------------------------------------------------------
// 2. PBW / Hilbert
// ---------------------------------------------------------------------------

type Q = BigRational;

fn rq(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn qpow(q: &Q, e: i64) -> Q {
    if e >= 0 {
        num_traits::pow(q.clone(), e as usize)
    } else {
        Q::one() / num_traits::pow(q.clone(), (-e) as usize)
    }
}

/// Symmetric q-binomial at a rational value.
fn qbinom(nn: i64, r: i64, t: &Q) -> Q {
    let br = |m: i64| (qpow(t, m) - qpow(t, -m)) / (t.clone() - Q::one() / t.clone());
    let mut num = Q::one();
    let mut den = Q::one();
    for s in 0..r {
        num *= br(nn - s);
        den *= br(s + 1);
    }
    num / den
}

/// Rank of a set of dense rational rows.
fn dense_rank(mut rows: Vec<Vec<Q>>) -> usize {
    let mut rank = 0;
    let ncols = rows.first().map_or(0, Vec::len);
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone() / pivot.clone();
                for c in col..ncols {
                    let v = rows[rank][c].clone() * f.clone();
                    rows[r][c] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dimensions of the degree components of `k⟨x_1, .., x_n⟩ / (quantum Serre)`
/// at rational `q`, by spanning the ideal with `u · S · v`.
fn serre_quotient_dims(a: &[Vec<i64>], dsym: &[i64], q: &Q, max_len: usize) -> Vec<usize> {
    let n = a.len();
    // Quantum Serre elements Σ_r (−1)^r [N r]_{q_i} x_i^{N−r} x_j x_i^r, N = 1 − a_ij.
    let mut serre: Vec<BTreeMap<Vec<usize>, Q>> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let nn = 1 - a[i][j];
            let mut el = BTreeMap::new();
            for r in 0..=nn {
                let sign = if r % 2 == 0 { Q::one() } else { -Q::one() };
                let coef = sign * qbinom(nn, r, &qpow(q, dsym[i]));
                let mut w = vec![i; (nn - r) as usize];
                w.push(j);
                w.extend(std::iter::repeat(i).take(r as usize));
                el.insert(w, coef);
            }
            serre.push(el);
        }
    }
    let words = |len: usize| -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..len {
            out = out.into_iter().flat_map(|w: Vec<usize>| (0..n).map(move |l| [w.clone(), vec![l]].concat())).collect();
        }
        out
    };
    let mut dims = Vec::new();
    for len in 0..=max_len {
        let basis = words(len);
        let index: BTreeMap<Vec<usize>, usize> = basis.iter().cloned().enumerate().map(|(k, w)| (w, k)).collect();
        let mut rows = Vec::new();
        for s in &serre {
            let slen = s.keys().next().unwrap().len();
            if slen > len {
                continue;
            }
            for pre in 0..=len - slen {
                for u in words(pre) {
                    for v in words(len - slen - pre) {
                        let mut row = vec![Q::zero(); basis.len()];
                        for (w, c) in s {
                            let full = [u.clone(), w.clone(), v.clone()].concat();
                            row[index[&full]] += c.clone();
                        }
                        rows.push(row);
                    }
                }
            }
        }
        dims.push(basis.len() - dense_rank(rows));
    }
    dims
}

fn criterion2() -> Outcome {
    let u = data("A2");
    let b = build_borel(&u).map_err(|e| e.to_string())?;
    let ranks = b.presentation.hilbert_ranks(6);
    let paper = vec![1, 2, 4, 6, 9, 12, 16];
    if ranks != paper {
        return Err(format!("B_q(sl3) ranks {ranks:?}"));
    }
    let oracle = serre_quotient_dims(&u.gcm.a, &u.gcm.d, &rq(3), 6);
    if oracle != ranks {
        return Err(format!("linear-algebra oracle gives {oracle:?}, engine {ranks:?}"));
    }
    let sl2 = build_uq(&data("A1"), LambdaMode::Standard).map_err(|e| e.to_string())?;
    let r2 = sl2.presentation.hilbert_ranks(6);
    if r2 != vec![1, 2, 3, 4, 5, 6, 7] {
        return Err(format!("U_q(sl2) ranks {r2:?}"));
    }
    let mut checked = 0;
    for name in ["A1", "A2"] {
        let g = gr_compare(&data(name), 4).map_err(|e| e.to_string())?;
        if !g.pass() {
            return Err(format!("gr_compare {name}: {:?} vs {:?}, {:?}", g.ranks_graded, g.ranks_filtered, g.mismatches.first()));
        }
        checked += g.products_checked;
    }
    Ok(format!("B_q(sl3) ranks {ranks:?} match oracle; U_q(sl2) {r2:?}; gr_compare zero residual on {checked} products"))
}

// ---------------------------------------------------------------------------
// 3. Hopf axioms
// ---------------------------------------------------------------------------

fn criterion3() -> Outcome {
    let mut total = 0;
    for name in ["A1", "A2"] {
        for mode in [LambdaMode::Zero, LambdaMode::Standard] {
            let b = build_uq(&data(name), mode).map_err(|e| e.to_string())?;
            let rep = verify_hopf(&b.presentation, 4).map_err(|e| e.to_string())?;
            for id in ["coassociativity", "counit-left", "counit-right", "antipode-left", "antipode-right", "coproduct-multiplicative"] {
                if !rep.counts.get(id).is_some_and(|(p, _)| *p > 0) {
                    return Err(format!("{name} {mode:?}: identity {id} was not exercised"));
                }
            }
            total += report_outcome(&format!("{name} {mode:?}"), &rep)?;
        }
    }
    Ok(format!("{total} identity instances pass for H0 and Hλ of A1, A2 at D = 4"))
}

// ---------------------------------------------------------------------------
// 4. Cocycle deformation
// ---------------------------------------------------------------------------

fn a_lambda(u: &UqData) -> Result<(Arc<Presentation<Scalar>>, Arc<Presentation<Scalar>>, Arc<Presentation<Scalar>>), String> {
    let h0 = build_uq(u, LambdaMode::Zero).map_err(|e| e.to_string())?;
    let hl = build_uq(u, LambdaMode::Standard).map_err(|e| e.to_string())?;
    let tails = flavor_tails(&hl.datum, Flavor::Alambda, None, &hl.lambda, &ParamMap::new());
    let al = assemble(hl.datum.clone(), Flavor::Alambda, None, &tails, &hl.serre).map_err(|e| e.to_string())?;
    if !al.check_overlaps(5).is_confluent() {
        return Err("A(λ) rules are not confluent".into());
    }
    Ok((h0.presentation, hl.presentation, Arc::new(al)))
}

fn criterion4() -> Outcome {
    let mut total = 0;
    for (name, dd) in [("A1", 4), ("A2", 3)] {
        let (h0, hl, al) = a_lambda(&data(name))?;
        let rep = compare_deformation(&h0, &hl, &al, dd, 1).map_err(|e| e.to_string())?;
        total += report_outcome(name, &rep)?;
    }
    Ok(format!("0 mismatches over {total} structure constants (A1 D=4, A2 D=3, both directions)"))
}

// ---------------------------------------------------------------------------
// 5. Cleft axioms
// ---------------------------------------------------------------------------

fn cleft_battery<C: Coeff>(c: CleftObject<C>, side: CocycleSide, d_coinv: usize, e_box: i32, d_triple: usize) -> Result<usize, String> {
    let c = Arc::new(c);
    let m = c.hopf.rank();
    let monos = sample_basis(&c.hopf, d_coinv, &group_samples(m));
    let mut rep = c.colinearity_check(&monos);
    rep.merge(c.invertibility_check(&monos).map_err(|e| e.to_string())?);
    let co = coinvariants_check(&c, d_coinv, e_box).map_err(|e| e.to_string())?;
    if !co.pass {
        return Err(format!("coinvariants ({}) fail: {:?}", co.method, co.witness));
    }
    let sc = SectionCocycle::new(c.clone(), side);
    let rule = sc.as_rule();
    let triples = sample_basis(&c.hopf, d_triple, &[GrpElt::zero(m), GrpElt::unit(m, 0)]);
    rep.merge(cocycle_identity_check(&c.hopf, &rule, side, &triples, d_triple).map_err(|e| e.to_string())?);
    report_outcome("cleft", &rep)
}

fn criterion5() -> Outcome {
    let u = data("A2");
    let (h0, hl, al) = a_lambda(&u)?;
    let mut total = cleft_battery(canonical_section(hl.clone(), al, Side::Right, 1), CocycleSide::Right, 4, 2, 3)?;

    let umat: UMat = [((0, 1), Scalar::from_int(-1))].into_iter().collect();
    let sigma = sigma_of_u(2, &umat);
    if sigma.is_trivial() {
        return Err("σ is trivial".into());
    }
    let d = h0.datum().clone();
    let n = 2;
    let mu: ParamMap<Scalar> = [((uq::plus(n, 0), uq::minus(0)), Scalar::one()), ((uq::plus(n, 1), uq::minus(1)), Scalar::q())]
        .into_iter()
        .collect();
    let params = qdeform::freealg::Params { lambda: ParamMap::new(), sigma: Some(sigma.clone()), mu: mu.clone() };
    let serre = serre_relations(&d).map_err(|e| e.to_string())?;
    let asm = qdeform::freealg::build_presentation(d.clone(), Flavor::Asigmamu, &params, &serre).map_err(|e| e.to_string())?;
    if !asm.check_overlaps(5).is_confluent() {
        return Err("A(σ, μ) rules are not confluent".into());
    }
    total += cleft_battery(canonical_section(h0.clone(), Arc::new(asm), Side::Left, 1), CocycleSide::Left, 4, 2, 3)?;

    let aq = uq::build_aq(&u, &umat, &[((0, 0), Scalar::one()), ((1, 1), Scalar::q())].into_iter().collect())
        .map_err(|e| e.to_string())?;
    total += cleft_battery(canonical_section(hl, aq.alg.clone(), Side::Left, 1), CocycleSide::Left, 4, 1, 3)?;
    Ok(format!("{total} checks pass for A(λ), A(σ,μ) and A_q(u,μ) (u_12 = −1, μ diagonal) on A2"))
}

// ---------------------------------------------------------------------------
// 6. Classification for sl2
// ---------------------------------------------------------------------------

fn criterion6() -> Outcome {
    let u = data("A1");
    let d = uq::uq_datum(&u).map_err(|e| e.to_string())?;
    let pair = |mu: Scalar| PairSigmaMu {
        sigma: BilinearCocycle::trivial(1),
        mu: if mu.is_zero() { ParamMap::new() } else { [((1, 0), mu)].into_iter().collect() },
    };
    let s = |x: &str| x.parse::<Scalar>().unwrap();
    // (μ, μ′, expected): μ′/μ a square of ℚ(q)^× by inspection.
    let list = [
        ("1", "q^2", true),
        ("1", "q", false),
        ("1", "4", true),
        ("1", "2", false),
        ("q", "q^3", true),
        ("1", "(1+q)^2", true),
        ("1", "1+q^2", false),
        ("2", "8", true),
        ("0", "1", false),
        ("0", "0", true),
    ];
    let mut witnessed = 0;
    for (a, b, want) in list {
        let (p, p2) = (pair(s(a)), pair(s(b)));
        let got = pair_equivalent(&d, &p, &p2);
        if got.is_equivalent() != want {
            return Err(format!("({a}, {b}): expected {want}, got {got:?}"));
        }
        if let PairEquivalence::Equivalent(eta) = got {
            let w = eta.eval(&GrpElt::unit(1, 0));
            let lhs = s(a).mul(&w).mul(&w);
            if lhs != s(b) || !verify_pair_witness(&d, &p, &p2, &eta) {
                return Err(format!("({a}, {b}): witness {w} does not verify"));
            }
            witnessed += 1;
        }
    }
    // Distinct u on A2 are separated by the skew invariant.
    let u2 = data("A2");
    let d2 = uq::uq_datum(&u2).map_err(|e| e.to_string())?;
    let us = [Scalar::one(), Scalar::from_int(-1), Scalar::q(), Scalar::q_pow(2)];
    for (x, ux) in us.iter().enumerate() {
        for (y, uy) in us.iter().enumerate() {
            let px = PairSigmaMu { sigma: sigma_of_u(2, &[((0, 1), ux.clone())].into_iter().collect()), mu: ParamMap::new() };
            let py = PairSigmaMu { sigma: sigma_of_u(2, &[((0, 1), uy.clone())].into_iter().collect()), mu: ParamMap::new() };
            if pair_equivalent(&d2, &px, &py).is_equivalent() != (x == y) {
                return Err(format!("u = {ux} vs u = {uy} misclassified"));
            }
        }
    }
    Ok(format!("10 sl2 pairs decided correctly ({witnessed} witnesses verified); 4 values of u separated on A2"))
}

// ---------------------------------------------------------------------------
// 7. Augmented theory
// ---------------------------------------------------------------------------

fn random_mvec(rng: &mut ChaCha8Rng) -> MVec {
    MVec((0..2).map(|_| Scalar::from_rat(BigRational::new(BigInt::from(rng.gen_range(-4..=4)), BigInt::from(rng.gen_range(1..=3))))).collect())
}

fn criterion7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dim = 2;
    let mut checks = 0;
    for (name, count) in [("A1", 20usize), ("A2", 20usize)] {
        let u = data(name);
        let b = build_uq(&u, LambdaMode::Standard).map_err(|e| e.to_string())?;
        let d = b.datum.clone();
        let rank = d.rank();
        for sample in 0..count {
            let mut s = AdditiveCocycle::zero(rank, dim);
            for i in 0..rank {
                for j in i..rank {
                    let v = random_mvec(&mut rng);
                    s.matrix[i][j] = v.clone();
                    s.matrix[j][i] = v;
                }
            }
            let m: ParamMap<MVec> = qdeform::datum::xi(&d).into_iter().map(|k| (k, random_mvec(&mut rng))).collect();
            let ap = AugPairSM { s, m };
            let c = aug_pair_to_extension(&d, &b.lambda, &ap, dim, &b.serre).map_err(|e| format!("{name} #{sample}: {e}"))?;
            let c = Arc::new(c);
            let monos = sample_basis(&c.hopf, 3, &group_samples(rank));
            let mut rep = c.colinearity_check(&monos);
            rep.merge(c.invertibility_check(&monos).map_err(|e| e.to_string())?);
            rep.merge(c.augmentation_check(&monos).map_err(|e| e.to_string())?);
            let co = coinvariants_check(&c, 3, 1).map_err(|e| e.to_string())?;
            if !co.pass {
                return Err(format!("{name} #{sample}: coinvariants fail {:?}", co.witness));
            }
            let zero = GrpElt::zero(rank);
            let e1 = GrpElt::unit(rank, 0);
            rep.merge(augmented_round_trip(&c, 3, &[zero.clone(), e1], &[zero]).map_err(|e| e.to_string())?);
            checks += report_outcome(&format!("{name} #{sample}"), &rep)?;
        }
        // Pullback form of the correspondence for λ = 0, m = 0.
        let h0 = build_uq(&u, LambdaMode::Zero).map_err(|e| e.to_string())?;
        let mut s = AdditiveCocycle::zero(rank, dim);
        for i in 0..rank {
            for j in 0..rank {
                s.matrix[i][j] = random_mvec(&mut rng);
            }
        }
        let ap = AugPairSM { s: s.clone(), m: ParamMap::new() };
        let c = Arc::new(aug_pair_to_extension(&h0.datum, &ParamMap::new(), &ap, dim, &h0.serre).map_err(|e| e.to_string())?);
        let rep = pullback_cocycle_check(&c, &s, 3, &group_samples(rank)).map_err(|e| e.to_string())?;
        checks += report_outcome(&format!("{name} pullback"), &rep)?;
    }
    Ok(format!("20 seeded (s, m) each on A1 and A2 over M = Q^2 give valid extensions; round trip holds ({checks} checks)"))
}

// ---------------------------------------------------------------------------
// 8. Quantum Whitehead
// ---------------------------------------------------------------------------

fn criterion8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let dim = 2;
    for name in ["A1", "A2", "A3"] {
        let u = data(name);
        let d = uq::uq_datum(&u).map_err(|e| e.to_string())?;
        let lambda = uq::standard_lambda(&u);
        for sample in 0..20 {
            let ap = uq::random_aug_pair(&d, dim, &mut rng);
            let t = whitehead_reduce(&d, &lambda, &ap, dim).map_err(|e| format!("{name} #{sample}: {e}"))?;
            // Independent verification: s + ∂t = 0 and m_{i,-i} = 2 λ_{i,-i} t(g_i).
            if !ap.s.add(&add_coboundary(&t)).is_zero() {
                return Err(format!("{name} #{sample}: s + ∂t ≠ 0"));
            }
            for (&(i, j), m) in &ap.m {
                let lam = &lambda[&(i, j)];
                let shift = t.eval(&d.g[i]).add(&t.eval(&d.g[j])).scale(lam);
                if !m.sub(&shift).is_zero() {
                    return Err(format!("{name} #{sample}: m not reduced at ({i}, {j})"));
                }
            }
        }
    }
    Ok("60 samples on A1, A2, A3 reduced to (0, 0) with verified witnesses".into())
}

// ---------------------------------------------------------------------------
// 9. Group cohomology
// ---------------------------------------------------------------------------

fn random_unit(rng: &mut ChaCha8Rng) -> Scalar {
    let base = [Scalar::from_int(2), Scalar::from_int(-3), Scalar::q(), Scalar::q().add(&Scalar::one())][rng.gen_range(0..4)].clone();
    base.upow(rng.gen_range(-2..=2))
}

fn criterion9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m = 3;
    let mut equal = 0;
    for sample in 0..50 {
        let sigma = BilinearCocycle::from_matrix((0..m).map(|_| (0..m).map(|_| random_unit(&mut rng)).collect()).collect());
        let sigma2 = if sample % 2 == 0 {
            let eta = OneCochain {
                linear: (0..m).map(|_| random_unit(&mut rng)).collect(),
                symmetric: {
                    let mut s = vec![vec![Scalar::one(); m]; m];
                    for i in 0..m {
                        for j in i..m {
                            let v = random_unit(&mut rng);
                            s[i][j] = v.clone();
                            s[j][i] = v;
                        }
                    }
                    s
                },
            };
            sigma.mul(&coboundary(&eta))
        } else {
            let mut mat = sigma.matrix.clone();
            let (i, j) = (rng.gen_range(0..m), rng.gen_range(0..m));
            mat[i][j] = mat[i][j].mul(&random_unit(&mut rng));
            BilinearCocycle::from_matrix(mat)
        };
        // Skew invariants straight from the matrices.
        let skew = |s: &BilinearCocycle| -> Vec<Scalar> {
            let mut v = Vec::new();
            for i in 0..m {
                for j in i + 1..m {
                    v.push(s.matrix[j][i].div(&s.matrix[i][j]).unwrap());
                }
            }
            v
        };
        let same = skew(&sigma) == skew(&sigma2);
        match cohomologous(&sigma, &sigma2) {
            Ok(eta) => {
                if !same || sigma.mul(&coboundary(&eta)) != sigma2 {
                    return Err(format!("sample {sample}: witness fails or invariants differ"));
                }
                equal += 1;
            }
            Err(_) if same => return Err(format!("sample {sample}: equal invariants but declared inequivalent")),
            Err(_) => {}
        }
    }
    let h2 = uq::additive_h2_dim(3, 1);
    if h2 != 3 {
        return Err(format!("H^2(Z^3, Q) parameter count {h2}"));
    }
    Ok(format!("50 cocycles: {equal} cohomologous pairs with verified witnesses; dim H^2(Z^3, Q) = {h2}"))
}

fn main() -> ExitCode {
    type Crit = fn() -> Outcome;
    let criteria: [(&str, Crit, u64); 9] = [
        ("1 diamond lemma", criterion1, 30),
        ("2 PBW / Hilbert series", criterion2, 120),
        ("3 Hopf axioms", criterion3, 120),
        ("4 cocycle deformation", criterion4, 300),
        ("5 cleft-object axioms", criterion5, 300),
        ("6 classification (sl2)", criterion6, 60),
        ("7 augmented theory", criterion7, 300),
        ("8 quantum Whitehead", criterion8, 300),
        ("9 group cohomology", criterion9, 60),
    ];
    let only: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (name, f, limit) in criteria {
        if only.as_ref().is_some_and(|o| !name.starts_with(o.as_str())) {
            continue;
        }
        let start = Instant::now();
        let res = f();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(limit);
        let (status, msg) = match (&res, over) {
            (Ok(m), false) => ("PASS", m.clone()),
            (Ok(m), true) => ("FAIL", format!("{m}; exceeded {limit} s")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("[{status}] criterion {name} ({:.1} s, limit {limit} s): {msg}", elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
