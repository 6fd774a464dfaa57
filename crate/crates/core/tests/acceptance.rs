//! The acceptance suite: one test per criterion, each printing its own
//! pass line. Run with `cargo test --test acceptance -- --nocapture` to
//! see the lines; every threshold is pinned in code.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use infsemi_core::algebra::{
    canonical_expand, canonical_expand_positions, pi_eval, Algebra, CompletenessClass, FinAlgebra,
    IndexBlock, IndexedSeq, KeySpec,
};
use infsemi_core::audit::{
    audit_suite, check_axiom, eval_grouped, replay_witness, suite_passes, AxiomId, GroupedWord,
    Relation, Verdict, Witness, WordExpr,
};
use infsemi_core::constructions::{
    adjoin_identity, completed_grouped, completed_sum, direct_product, endpoints_algebra,
    inflationary_algebra, left_projection, omega_completion, powerset_concat, powerset_lift,
    quotient_by_map, regroup_series, series_sum, CompletedSum, MonotonePoset, SeriesGrouping,
    SeriesSeq,
};
use infsemi_core::limits::{
    check_nmax, inflim_strings, n_failure_witness, replay_string_n_failure, string_inflim,
    FiniteMeetSemilattice, PeriodicSeq, PumpedFamily,
};
use infsemi_core::ordinal::{ord_sum_seq, Ordinal};
use infsemi_core::pseq::PiecewiseSeq;
use infsemi_core::theorems::{
    abe_statement_check, abeba_hypothesis_gap, commutative_complete_algebras,
    find_binary_absorber, krob_omega, verify_abeba, verify_notut,
};
use infsemi_core::word::{concat_seq, parse_word, word_eq, EqVerdict, ScatteredTerm, WordTerm};

use num_bigint::BigInt;
use num_rational::BigRational;

fn rat(s: &str) -> BigRational {
    let parts: Vec<&str> = s.split('/').collect();
    match parts.as_slice() {
        [w] => BigRational::from_integer(w.parse::<BigInt>().unwrap()),
        [p, q] => BigRational::new(p.parse().unwrap(), q.parse().unwrap()),
        _ => panic!("bad rational {}", s),
    }
}

fn random_ordinal(rng: &mut ChaCha8Rng) -> Ordinal {
    let terms = rng.gen_range(0..4usize);
    let mut acc = Ordinal::zero();
    let mut exps: Vec<u64> = (0..terms).map(|_| rng.gen_range(0..5u64)).collect();
    exps.sort_unstable_by(|a, b| b.cmp(a));
    exps.dedup();
    for e in exps {
        let c = rng.gen_range(1..9u64);
        acc = acc.add(&Ordinal::monomial(Ordinal::from(e), c.into()));
    }
    acc
}

fn z2() -> FinAlgebra {
    FinAlgebra::from_entries(
        vec!["0".into(), "1".into()],
        &[
            (("0", "0"), "0"),
            (("0", "1"), "1"),
            (("1", "0"), "1"),
            (("1", "1"), "0"),
        ],
        &[],
        None,
        None,
        None,
        CompletenessClass::LtOmega,
    )
    .unwrap()
}

fn max_alg() -> FinAlgebra {
    FinAlgebra::from_entries(
        vec!["0".into(), "1".into()],
        &[
            (("0", "0"), "0"),
            (("0", "1"), "1"),
            (("1", "0"), "1"),
            (("1", "1"), "1"),
        ],
        &[("0", "0"), ("1", "1")],
        None,
        None,
        None,
        CompletenessClass::CompleteOnEncodable,
    )
    .unwrap()
}

fn classical(ids: &[&str], table: impl Fn(usize, usize) -> usize) -> FinAlgebra {
    let n = ids.len();
    let names: Vec<String> = ids.iter().map(|s| s.to_string()).collect();
    let mut bin = vec![None; n * n];
    for a in 0..n {
        for b in 0..n {
            bin[a * n + b] = Some(table(a, b));
        }
    }
    FinAlgebra::new(
        names,
        bin,
        vec![None; n],
        None,
        None,
        None,
        CompletenessClass::LtOmega,
    )
    .unwrap()
}

/// Criterion: 10^3 random CNF triples below w^w satisfy associativity of
/// + and *, left distributivity, and infinitary right-distributivity,
/// with exact equality, in under 5 seconds.
#[test]
fn acceptance_01_ordinal_laws() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1001);
    for _ in 0..1000 {
        let a = random_ordinal(&mut rng);
        let b = random_ordinal(&mut rng);
        let c = random_ordinal(&mut rng);
        assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        // infinitary right-distributivity over a random run presentation
        let runs: Vec<(Ordinal, Ordinal)> = (0..rng.gen_range(1..4usize))
            .map(|_| {
                let mut len = random_ordinal(&mut rng);
                if len.is_zero() {
                    len = Ordinal::one();
                }
                (len, random_ordinal(&mut rng))
            })
            .collect();
        let seq = PiecewiseSeq::new(runs).unwrap();
        let lhs = a.mul(&ord_sum_seq(&seq));
        let rhs = ord_sum_seq(&seq.map(|v| a.mul(v)));
        assert_eq!(lhs, rhs);
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "ordinal laws took {:?}",
        elapsed
    );
    println!("ACCEPT ordinal-laws: PASS ({:?})", elapsed);
}

/// Criterion: 500 random word presentations x 5 regroupings each give
/// concat_seq invariance with word_eq = Equal on the < w^2 fragment,
/// zero failures.
#[test]
fn acceptance_02_word_regrouping() {
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    let letters = ["a", "b", "c"];
    let lengths: [Ordinal; 4] = [
        Ordinal::one(),
        Ordinal::from(2),
        Ordinal::from(3),
        Ordinal::omega(),
    ];
    let mut failures = 0;
    for _ in 0..500 {
        let runs: Vec<(Ordinal, WordTerm)> = (0..rng.gen_range(1..5usize))
            .map(|_| {
                let len = lengths[rng.gen_range(0..lengths.len())].clone();
                let k = rng.gen_range(1..3usize);
                let w = WordTerm::concat(
                    (0..k)
                        .map(|_| WordTerm::letter(letters[rng.gen_range(0..3)]))
                        .collect(),
                );
                (len, w)
            })
            .collect();
        let seq = PiecewiseSeq::new(runs).unwrap();
        let direct = concat_seq(&seq);
        for _ in 0..5 {
            // random consecutive regrouping of the runs
            let runs = seq.runs();
            let mut groups: Vec<Vec<(Ordinal, WordTerm)>> = vec![vec![runs[0].clone()]];
            for run in &runs[1..] {
                if rng.gen_bool(0.5) {
                    groups.push(vec![run.clone()]);
                } else {
                    groups.last_mut().unwrap().push(run.clone());
                }
            }
            let outer: Vec<(Ordinal, WordTerm)> = groups
                .iter()
                .map(|g| {
                    (
                        Ordinal::one(),
                        concat_seq(&PiecewiseSeq::new(g.clone()).unwrap()),
                    )
                })
                .collect();
            let grouped = concat_seq(&PiecewiseSeq::new(outer).unwrap());
            if word_eq(&direct, &grouped) != EqVerdict::Equal {
                failures += 1;
            }
        }
    }
    assert_eq!(failures, 0, "{} regrouping failures", failures);
    println!("ACCEPT word-regrouping: PASS (500 x 5 instances)");
}

/// Criterion: every total ω-power extension of the Z2 group fails the
/// regrouping law with a replayable witness (exhaustive over both values
/// of 1^ω), and the Ω-completion passes the full audit suite at budget
/// 10^4.
#[test]
fn acceptance_03_z2_impossibility() {
    // exhaustive: all four total omega tables; the essential case split is
    // the value of 1^ω (the 0^ω entry never rescues the witness)
    let mut essential_cases = std::collections::BTreeSet::new();
    for code in 0..4u32 {
        let om0 = ["0", "1"][(code & 1) as usize];
        let om1 = ["0", "1"][((code >> 1) & 1) as usize];
        essential_cases.insert(om1);
        let alg = FinAlgebra::from_entries(
            vec!["0".into(), "1".into()],
            &[
                (("0", "0"), "0"),
                (("0", "1"), "1"),
                (("1", "0"), "1"),
                (("1", "1"), "0"),
            ],
            &[("0", om0), ("1", om1)],
            None,
            None,
            None,
            CompletenessClass::CompleteOnEncodable,
        )
        .unwrap();
        // the canonical witness: 1^ω against 1 · 1^ω
        let one_omega = parse_word("1^(w)").unwrap().into_term();
        let witness = Witness {
            lhs: WordExpr::Plain(one_omega.clone()),
            rhs: WordExpr::Grouped(GroupedWord {
                inners: vec![ScatteredTerm::letter("1"), one_omega.clone()],
                outer: ScatteredTerm::concat(vec![
                    ScatteredTerm::letter("0"),
                    ScatteredTerm::letter("1"),
                ]),
            }),
            lhs_out: Some(om1.to_string()),
            rhs_out: Some(if om1 == "0" { "1" } else { "0" }.to_string()),
            relation: Relation::Agree,
            note: None,
        };
        replay_witness(&alg, &witness).expect("canonical witness replays");
        // and the auditor finds a violation on its own
        let report = check_axiom(&alg, &AxiomId::NPart, 2000, 17).unwrap();
        assert_eq!(report.verdict, Verdict::Fail, "omega table {:?}", code);
        replay_witness(&alg, &report.witness.unwrap()).expect("auditor witness replays");
    }
    assert_eq!(essential_cases.len(), 2);
    // conversely, the Ω-completion passes the full suite at 10^4
    let completed = omega_completion(&z2(), 2000, 23).expect("Z2 satisfies narr");
    let reports = audit_suite(&completed, 10_000, 23);
    assert!(suite_passes(&reports), "{:?}", reports);
    println!("ACCEPT z2-impossibility: PASS (4 tables, completion suite at 10^4)");
}

/// Criterion: every commutative complete-on-encodable algebra of carrier
/// size ≤ 3 built from total tables that passes the audit has a verified
/// two-sided absorbing element via the cycling ω-word; zero exceptions.
#[test]
fn acceptance_04_krob_desk_scale() {
    let algs = commutative_complete_algebras(3, 150, 31);
    assert!(algs.len() >= 20, "expected a rich family, got {}", algs.len());
    for alg in &algs {
        let omega = krob_omega(alg, 150, 31).unwrap_or_else(|e| {
            panic!("krob failed on {:?}: {}", alg.ids(), e);
        });
        // verified two-sided: the returned element really absorbs
        let absorber = find_binary_absorber(alg).expect("absorber exists");
        assert_eq!(omega, absorber);
    }
    println!(
        "ACCEPT krob-desk-scale: PASS ({} commutative complete algebras)",
        algs.len()
    );
}

/// Criterion: first-letter projections and endpoint algebras on carriers
/// of size ≤ 4 pass the full audit suite yet have no two-sided fully
/// absorbing element.
#[test]
fn acceptance_05_noncommutative_contrast() {
    let mut checked = 0;
    // left projections on 2..=4 elements, every choice of s0
    for n in 2..=4usize {
        let elems: Vec<String> = (0..n).map(|i| format!("x{}", i)).collect();
        for s0 in &elems {
            let lp = left_projection(&elems, s0).unwrap();
            let reports = audit_suite(&lp, 300, 41);
            assert!(suite_passes(&reports), "{:?}", reports);
            assert_eq!(find_binary_absorber(&lp), None, "left projection absorbed");
            let table = lp.to_table();
            let reports = audit_suite(&table, 300, 41);
            assert!(suite_passes(&reports), "{:?}", reports);
            checked += 1;
        }
    }
    // rectangular bands (l, r) * (l', r') = (l, r'): 1x2, 2x1, 2x2
    for (rows, cols) in [(1usize, 2usize), (2, 1), (2, 2)] {
        let ids: Vec<String> = (0..rows * cols)
            .map(|i| format!("r{}c{}", i / cols, i % cols))
            .collect();
        let band = classical(&ids.iter().map(|s| s.as_str()).collect::<Vec<_>>(), |a, b| {
            (a / cols) * cols + (b % cols)
        });
        for s0 in 0..ids.len() {
            for s1 in 0..ids.len() {
                let ep = endpoints_algebra(&band, &ids[s0], &ids[s1]).unwrap();
                let reports = audit_suite(&ep, 250, 43);
                assert!(suite_passes(&reports), "{:?}", reports);
                if ids.len() > 1 {
                    assert_eq!(find_binary_absorber(&ep), None, "band absorbed");
                }
                checked += 1;
            }
        }
    }
    println!(
        "ACCEPT noncommutative-contrast: PASS ({} instances, no absorbers)",
        checked
    );
}

/// Builds the construction-instance zoo used by the proposition checks.
fn construction_zoo() -> Vec<(String, FinAlgebra)> {
    let mut out: Vec<(String, FinAlgebra)> = Vec::new();
    let mut push = |name: &str, alg: FinAlgebra| out.push((name.to_string(), alg));

    let z2 = z2();
    let max2 = max_alg();
    let left0 = classical(&["a", "b"], |a, _| a);
    let min3 = classical(&["0", "1", "2"], |a, b| a.min(b));
    let z3 = classical(&["0", "1", "2"], |a, b| (a + b) % 3);

    let c_z2 = omega_completion(&z2, 300, 7).unwrap();
    let c_left = omega_completion(&left0, 300, 7).unwrap();
    let c_min3 = omega_completion(&min3, 300, 7).unwrap();
    let c_z3 = omega_completion(&z3, 300, 7).unwrap();

    push("completion(Z2)", c_z2.clone());
    push("completion(left-zero-2)", c_left.clone());
    push("completion(min-3)", c_min3.clone());
    push("completion(Z3)", c_z3);
    push("max-2", max2.clone());
    push("adjoin(completion(Z2))", adjoin_identity(&c_z2));
    push("adjoin(max-2)", adjoin_identity(&max2));
    push("adjoin(completion(min-3))", adjoin_identity(&c_min3));
    push("completion(adjoin(Z2))", {
        omega_completion(&adjoin_identity(&z2), 300, 7).unwrap()
    });
    push("powerset(Z2)", powerset_concat(&z2, false).unwrap());
    push("powerset(left-zero-2)", powerset_concat(&left0, false).unwrap());
    push(
        "powerset-nonempty(Z2)",
        powerset_concat(&z2, true).unwrap(),
    );
    push("lift(max-2)", powerset_lift(&max2, 300, 7).unwrap());
    push("lift(completion(Z2))", powerset_lift(&c_z2, 300, 7).unwrap());
    push("product(max,max)", direct_product(&[&max2, &max2]).unwrap());
    push(
        "product(completion(Z2),max)",
        direct_product(&[&c_z2, &max2]).unwrap(),
    );
    push("left-table-3", {
        let elems: Vec<String> = vec!["a".into(), "b".into(), "s".into()];
        left_projection(&elems, "s").unwrap().to_table()
    });
    push("endpoints-band-4", {
        let ids: Vec<&str> = vec!["r0c0", "r0c1", "r1c0", "r1c1"];
        let band = classical(&ids, |a, b| (a / 2) * 2 + (b % 2));
        endpoints_algebra(&band, "r0c0", "r1c1").unwrap().to_table()
    });
    push(
        "inflationary(chain-2)",
        inflationary_algebra(&MonotonePoset::chain(&["0", "1"])).unwrap(),
    );
    push(
        "inflationary(chain-3)",
        inflationary_algebra(&MonotonePoset::chain(&["0", "1", "2"])).unwrap(),
    );
    push("quotient(max-2, collapse)", {
        let phi: BTreeMap<String, String> = [("0", "p"), ("1", "p")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        quotient_by_map(&max2, &phi, &[], 200, 7).unwrap()
    })
    ;
    out
}

/// Criterion: the inverse-pair and no-right-inverse propositions pass on
/// at least 20 distinct audit-passing construction instances, and the
/// two-element absorbing configuration is classified as missing exactly
/// the `be = b` hypothesis.
#[test]
fn acceptance_06_abeba_notut() {
    let zoo = construction_zoo();
    assert!(zoo.len() >= 20, "only {} instances", zoo.len());
    let mut passing = 0;
    for (name, alg) in &zoo {
        let reports = audit_suite(alg, 250, 47);
        assert!(suite_passes(&reports), "{} failed audits: {:?}", name, reports);
        passing += 1;
        let abeba = verify_abeba(alg);
        assert_eq!(abeba.verdict, Verdict::Pass, "{}: {}", name, abeba);
        let notut = verify_notut(alg);
        assert_eq!(notut.verdict, Verdict::Pass, "{}: {}", name, notut);
        let abe = abe_statement_check(alg, 150, 47);
        assert!(
            abe.note.as_deref().unwrap_or("").starts_with("not exhibited"),
            "{}: {:?}",
            name,
            abe.note
        );
    }
    // the two-element configuration: e fully absorbing, b idempotent
    let cfg = FinAlgebra::from_entries(
        vec!["b".into(), "e".into()],
        &[
            (("b", "b"), "b"),
            (("b", "e"), "e"),
            (("e", "b"), "e"),
            (("e", "e"), "e"),
        ],
        &[("b", "b"), ("e", "e")],
        None,
        None,
        None,
        CompletenessClass::CompleteOnEncodable,
    )
    .unwrap();
    assert_eq!(abeba_hypothesis_gap(&cfg, "e", "b", "e"), Some("be = b"));
    assert_eq!(verify_abeba(&cfg).verdict, Verdict::Pass);
    println!(
        "ACCEPT abeba-notut: PASS ({} audit-passing instances)",
        passing
    );
}

/// Criterion: canonical expansion is labeling-invariant, exhaustively
/// over all orderings of ≤ 5 labeled positions on 5 algebras.
#[test]
fn acceptance_07_canonical_expand_labeling() {
    let algs: Vec<(String, FinAlgebra)> = vec![
        ("max-2".into(), max_alg()),
        ("completion(Z2)".into(), omega_completion(&z2(), 300, 7).unwrap()),
        ("left-table".into(), {
            let elems: Vec<String> = vec!["a".into(), "b".into(), "s".into()];
            left_projection(&elems, "s").unwrap().to_table()
        }),
        ("endpoints-band".into(), {
            let ids: Vec<&str> = vec!["r0c0", "r0c1", "r1c0", "r1c1"];
            let band = classical(&ids, |a, b| (a / 2) * 2 + (b % 2));
            endpoints_algebra(&band, "r0c0", "r1c1").unwrap().to_table()
        }),
        (
            "inflationary(chain-2)".into(),
            inflationary_algebra(&MonotonePoset::chain(&["0", "1"])).unwrap(),
        ),
    ];
    let labels = ["p", "q", "r", "s", "t"];
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    let mut orderings = 0;
    for (name, alg) in &algs {
        let carrier = alg.ids().to_vec();
        for n in 1..=5usize {
            // letters for each labeled position
            let letters: Vec<String> = (0..n)
                .map(|_| carrier[rng.gen_range(0..carrier.len())].clone())
                .collect();
            let positions: Vec<(String, String)> = (0..n)
                .map(|i| (labels[i].to_string(), letters[i].clone()))
                .collect();
            for perm in permutations(n) {
                orderings += 1;
                let order: Vec<String> =
                    perm.iter().map(|&i| labels[i].to_string()).collect();
                let via_expand = canonical_expand_positions(alg, &positions, &order);
                // the oracle: the word with letters in declared order
                let word = WordTerm::concat(
                    perm.iter()
                        .map(|&i| WordTerm::letter(letters[i].clone()))
                        .collect(),
                );
                let direct = pi_eval(alg, &word).ok();
                assert_eq!(
                    via_expand.ok(),
                    direct,
                    "{}: ordering {:?}",
                    name,
                    perm
                );
                // relabeling invariance: same order through different keys
                // and renamed labels
                let blocks: Vec<IndexBlock> = perm
                    .iter()
                    .enumerate()
                    .map(|(rank, &i)| IndexBlock {
                        label: format!("pos{}", i),
                        keys: KeySpec::List(vec![Ordinal::from(10 + 7 * rank as u64)]),
                        letter: letters[i].clone(),
                    })
                    .collect();
                let relabeled = canonical_expand(alg, &IndexedSeq { blocks });
                assert_eq!(relabeled.ok(), direct, "{}: relabeled {:?}", name, perm);
            }
        }
    }
    // the evens-then-odds presentation of ω matches the natural one
    let alg = max_alg();
    let interleaved = IndexedSeq {
        blocks: vec![
            IndexBlock {
                label: "evens".into(),
                keys: KeySpec::Stride { start: 0, step: 2 },
                letter: "0".into(),
            },
            IndexBlock {
                label: "odds".into(),
                keys: KeySpec::Stride { start: 1, step: 2 },
                letter: "1".into(),
            },
        ],
    };
    let natural = pi_eval(&alg, &parse_word("(0.1)^(w)").unwrap()).unwrap();
    assert_eq!(canonical_expand(&alg, &interleaved).unwrap(), natural);
    println!(
        "ACCEPT canonical-expand: PASS ({} orderings on 5 algebras)",
        orderings
    );
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 1 {
        return vec![vec![0]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for slot in 0..=p.len() {
            let mut q = p.clone();
            q.insert(slot, n - 1);
            out.push(q);
        }
    }
    out
}

/// Criterion: the [1] + geometric(1, 1/2) series sums to exactly 3; 10^3
/// random convergent inputs keep their exact sum under random
/// regroupings; the alternating series is undefined and its completion
/// assigns it Ω consistently.
#[test]
fn acceptance_08_series() {
    let s = SeriesSeq::geometric(vec![rat("1")], rat("1"), rat("1/2"));
    assert_eq!(series_sum(&s).unwrap(), rat("3"));

    let mut rng = ChaCha8Rng::seed_from_u64(8008);
    for _ in 0..1000 {
        // random convergent series: |ratio| < 1 over small rationals
        let prefix: Vec<BigRational> = (0..rng.gen_range(0..4usize))
            .map(|_| {
                BigRational::new(
                    rng.gen_range(-9i64..10).into(),
                    rng.gen_range(1i64..7).into(),
                )
            })
            .collect();
        let first = BigRational::new(
            rng.gen_range(-9i64..10).into(),
            rng.gen_range(1i64..7).into(),
        );
        let num = rng.gen_range(-4i64..5);
        let den = rng.gen_range((num.abs() + 1)..(num.abs() + 7));
        let ratio = BigRational::new(num.into(), den.into());
        let series = SeriesSeq::geometric(prefix, first, ratio);
        assert!(series.is_convergent());
        let direct = series_sum(&series).expect("convergent");
        let grouping = SeriesGrouping {
            head_groups: (0..rng.gen_range(0..3usize))
                .map(|_| rng.gen_range(1..4usize))
                .collect(),
            tail_block: rng.gen_range(1..5usize),
        };
        let regrouped = regroup_series(&series, &grouping).expect("valid grouping");
        assert_eq!(series_sum(&regrouped).expect("still convergent"), direct);
    }

    // the alternating series is undefined, and the completion of the
    // finitary fragment sends it (and each of its regroupings) to Ω
    let alt = SeriesSeq::geometric(vec![], rat("1"), rat("-1"));
    assert_eq!(series_sum(&alt), None);
    assert_eq!(completed_sum(&alt), CompletedSum::Omega);
    let mut rng = ChaCha8Rng::seed_from_u64(8009);
    for _ in 0..200 {
        let grouping = SeriesGrouping {
            head_groups: (0..rng.gen_range(0..3usize))
                .map(|_| rng.gen_range(1..4usize))
                .collect(),
            tail_block: rng.gen_range(1..5usize),
        };
        assert_eq!(
            completed_grouped(&alt, &grouping).unwrap(),
            CompletedSum::Omega
        );
        // finite presentations agree along both routes as exact rationals
        // (a grouping only applies when its head fits the sequence)
        let fin = SeriesSeq::finite(vec![rat("1"), rat("-1"), rat("2"), rat("5/3")]);
        if let Some(grouped) = completed_grouped(&fin, &grouping) {
            assert_eq!(grouped, completed_sum(&fin));
        }
    }
    println!("ACCEPT series: PASS (sum=3 exact, 10^3 regroupings, completion consistent)");
}

/// Criterion: the two string-limit examples reproduce exactly, the
/// pair-grouping failure replays, and the lattice limit passes (Nmax) at
/// budget 10^3 while the full regrouping law fails with a witness.
#[test]
fn acceptance_09_inflim() {
    // `abcc, ababcc, abababcc, ...` has limit (ab)^ω
    let fam = PumpedFamily {
        u: String::new(),
        v: "ab".into(),
        w: "cc".into(),
    };
    assert_eq!(
        string_inflim(&fam),
        parse_word("(a.b)^(w)").unwrap().normalize()
    );
    // the alternating family has the empty limit
    let alternating = PeriodicSeq {
        prefix: vec![],
        period: vec!["a".to_string(), "b".to_string()],
    };
    assert_eq!(inflim_strings(&alternating), "");
    // the pair-grouping witness replays
    let w = n_failure_witness();
    assert_eq!(w.direct, "");
    assert_eq!(w.grouped, "b");
    replay_string_n_failure(&w).unwrap();
    // lattice-side: (Nmax) holds at 10^3, the full law fails with a
    // replayable witness
    let q = FiniteMeetSemilattice::flat("bot", &["a", "b"]);
    let (nmax, nfull) = check_nmax(&q, 1000, 99);
    assert_ne!(nmax.verdict, Verdict::Fail, "{}", nmax);
    assert!(nmax.tested >= 500);
    assert_eq!(nfull.verdict, Verdict::Fail, "{}", nfull);
    let witness = nfull.witness.unwrap();
    witness.replay(&q).unwrap();
    println!("ACCEPT inflim: PASS (string examples, witness replay, Nmax at 10^3)");
}

/// Criterion: adjoining the identity and completing commute, exhaustively
/// on classical seed algebras of size ≤ 3: both orders agree on every
/// audited product.
#[test]
fn acceptance_10_composition_order() {
    let seeds: Vec<(String, FinAlgebra)> = vec![
        ("trivial-1".into(), classical(&["a"], |_, _| 0)),
        ("Z2".into(), z2()),
        ("left-zero-2".into(), classical(&["a", "b"], |a, _| a)),
        ("right-zero-2".into(), classical(&["a", "b"], |_, b| b)),
        ("min-3".into(), classical(&["0", "1", "2"], |a, b| a.min(b))),
        ("Z3".into(), classical(&["0", "1", "2"], |a, b| (a + b) % 3)),
        ("band-3".into(), classical(&["0", "1", "2"], |a, _| a)),
    ];
    for (name, seed) in &seeds {
        let a = adjoin_identity(&omega_completion(seed, 400, 51).unwrap());
        let b = omega_completion(&adjoin_identity(seed), 400, 51).unwrap();
        // identical carriers up to order
        let mut ids_a = a.ids().to_vec();
        let mut ids_b = b.ids().to_vec();
        ids_a.sort();
        ids_b.sort();
        assert_eq!(ids_a, ids_b, "{}", name);
        // all binary and unary table entries agree by id
        for x in &ids_a {
            for y in &ids_a {
                assert_eq!(
                    a.bin_by_id(x, y),
                    b.bin_by_id(x, y),
                    "{}: bin({},{})",
                    name,
                    x,
                    y
                );
            }
            let xa = a.idx(x).unwrap();
            let xb = b.idx(x).unwrap();
            assert_eq!(
                a.omega_idx(xa).map(|v| a.id(v)),
                b.omega_idx(xb).map(|v| b.id(v)),
                "{}: omega({})",
                name,
                x
            );
            assert_eq!(
                a.omega_star_idx(xa).unwrap().map(|v| a.id(v)),
                b.omega_star_idx(xb).unwrap().map(|v| b.id(v)),
                "{}: omega_star({})",
                name,
                x
            );
        }
        assert_eq!(
            a.empty_product_idx().map(|e| a.id(e)),
            b.empty_product_idx().map(|e| b.id(e)),
            "{}",
            name
        );
        // audited products agree on generated words too
        let gen = infsemi_core::audit::WordGen::for_algebra(&a);
        let mut rng = ChaCha8Rng::seed_from_u64(5151);
        for _ in 0..300 {
            let w = gen.gen(&mut rng, 3);
            assert_eq!(a.eval(&w).ok(), b.eval(&w).ok(), "{}: word {}", name, w);
        }
        // both orders yield a complete algebra with a complete identity
        let reports = audit_suite(&a, 300, 53);
        assert!(suite_passes(&reports), "{}: {:?}", name, reports);
        let e = a.empty_product_id().unwrap();
        let id_rep = check_axiom(&a, &AxiomId::Id(e), 300, 53).unwrap();
        assert!(!id_rep.failed(), "{}: {}", name, id_rep);
    }
    println!(
        "ACCEPT composition-order: PASS ({} seed algebras, both orders agree)",
        seeds.len()
    );
}

/// Extra guard used by several criteria: grouped evaluation and witnesses
/// stay coherent through the public API.
#[test]
fn acceptance_support_grouped_eval_consistency() {
    let alg = omega_completion(&z2(), 300, 7).unwrap();
    let gen = infsemi_core::audit::WordGen::for_algebra(&alg);
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for _ in 0..200 {
        let w = gen.gen(&mut rng, 3);
        if let Some(g) = infsemi_core::audit::random_regroup(&w, &mut rng) {
            let direct = alg.eval(&w).ok();
            let grouped = eval_grouped(&alg, &g).unwrap();
            assert_eq!(direct, grouped, "word {}", w);
        }
    }
}
