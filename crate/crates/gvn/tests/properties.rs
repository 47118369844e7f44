//! Property-based laws over randomized programs: text round-trips, lattice
//! laws for the partition meet and both SED joins, the ordering between the
//! join variants, the semantic contract of the all-pairs join, and the
//! fixpoint engine's independence from worklist order. The per-property case
//! counts add up to well over a thousand runs.

use gvn::analyses::{AlgoKind, Toolkit};
use gvn::dataflow::{TieBreak, MAX_VISITS};
use gvn::generator::{generate, GenConfig};
use gvn::harness::{has_loops, relation_subset};
use gvn::join::{join_modified, join_original, JoinStats};
use gvn::program::Program;
use gvn::sed::Sed;
use gvn::term::Term;
use proptest::prelude::*;
use std::collections::BTreeSet;

/// Random programs by way of a generator seed plus randomized shape limits,
/// so shrinking walks toward small seeds and small shapes.
fn arb_program(allow_loops: bool) -> impl Strategy<Value = Program> {
    (
        any::<u64>(),
        2usize..=8,  // variables
        1usize..=12, // assignments
        0usize..=3,  // branch/loop constructs
        1usize..=3,  // operators per right-hand side
    )
        .prop_map(
            move |(seed, max_vars, max_stmts, max_joins, max_rhs_size)| {
                generate(
                    seed,
                    &GenConfig {
                        max_vars,
                        max_stmts,
                        max_joins,
                        allow_loops,
                        max_rhs_size,
                    },
                )
            },
        )
}

fn toolkit(program: &Program) -> Toolkit {
    Toolkit::from_program(program.clone(), None).expect("generated programs analyze")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn program_text_round_trips(program in arb_program(true)) {
        let reparsed = Program::parse(&program.to_string()).expect("printed form parses");
        prop_assert_eq!(reparsed, program);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn meet_is_idempotent_commutative_and_associative(program in arb_program(true)) {
        let toolkit = toolkit(&program);
        let mut run = toolkit.run(AlgoKind::Kildall).unwrap();
        let partitions: Vec<_> = toolkit
            .cfg()
            .all_points()
            .into_iter()
            .map(|p| run.partition_at(p).unwrap())
            .collect();
        for p in &partitions {
            prop_assert_eq!(&p.meet(p), p, "idempotence");
        }
        for w in partitions.windows(2) {
            prop_assert_eq!(w[0].meet(&w[1]), w[1].meet(&w[0]), "commutativity");
        }
        for w in partitions.windows(3) {
            prop_assert_eq!(
                w[0].meet(&w[1]).meet(&w[2]),
                w[0].meet(&w[1].meet(&w[2])),
                "associativity"
            );
        }
    }

    #[test]
    fn joins_are_idempotent_and_commutative_up_to_isomorphism(
        program in arb_program(true),
    ) {
        let toolkit = toolkit(&program);
        type Join = fn(&Sed, &Sed, usize) -> (Sed, JoinStats);
        let variants: [(AlgoKind, Join); 2] = [
            (AlgoKind::SedOriginal, join_original),
            (AlgoKind::SedModified, join_modified),
        ];
        for (algo, join) in variants {
            let mut run = toolkit.run(algo).unwrap();
            let states: Vec<Sed> = toolkit
                .cfg()
                .all_points()
                .into_iter()
                .map(|p| run.sed_at(p).unwrap())
                .collect();
            for g in &states {
                prop_assert!(
                    join(g, g, g.node_count() + 1).0.bisim_eq(g),
                    "{algo} join idempotence"
                );
            }
            for w in states.windows(2) {
                let budget = w[0].node_count().max(w[1].node_count()) + 1;
                let ab = join(&w[0], &w[1], budget).0;
                let ba = join(&w[1], &w[0], budget).0;
                prop_assert!(ab.bisim_eq(&ba), "{algo} join commutativity");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn per_variable_join_never_detects_more_than_all_pairs(
        program in arb_program(true),
    ) {
        let toolkit = toolkit(&program);
        let mut original = toolkit.run(AlgoKind::SedOriginal).unwrap();
        let mut modified = toolkit.run(AlgoKind::SedModified).unwrap();
        for point in toolkit.cfg().all_points() {
            let weaker = original.relation_at(point);
            let stronger = modified.relation_at(point);
            prop_assert!(
                relation_subset(&weaker, &stronger),
                "at {}: {weaker:?} ⊄ {stronger:?}",
                toolkit.cfg().describe_point(point)
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    /// The all-pairs join detects exactly the equivalences common to both
    /// inputs: it is the meet of the represented relations.
    #[test]
    fn all_pairs_join_keeps_exactly_the_common_equivalences(
        program in arb_program(false),
        pick_a in any::<u64>(),
        pick_b in any::<u64>(),
    ) {
        let toolkit = toolkit(&program);
        let mut run = toolkit.run(AlgoKind::SedModified).unwrap();
        let points = toolkit.cfg().all_points();
        let g1 = run.sed_at(points[pick_a as usize % points.len()]).unwrap();
        let g2 = run.sed_at(points[pick_b as usize % points.len()]).unwrap();
        let budget = g1.node_count() + g2.node_count() + 2;
        let joined = join_modified(&g1, &g2, budget).0;

        let bound = toolkit.universe().bound;
        // A bounded sample of terms either input represents, plus one term
        // no state represents.
        let mut candidates: BTreeSet<Term> = g1
            .term_classes(bound)
            .into_iter()
            .chain(g2.term_classes(bound))
            .flatten()
            .collect();
        candidates.insert(Term::var("unassigned_probe"));
        let candidates: Vec<Term> = candidates.into_iter().take(40).collect();
        for t1 in &candidates {
            for t2 in &candidates {
                prop_assert_eq!(
                    joined.equiv(t1, t2, bound),
                    g1.equiv(t1, t2, bound) && g2.equiv(t1, t2, bound),
                    "join must relate {} and {} iff both inputs do",
                    t1,
                    t2
                );
            }
        }
    }

    #[test]
    fn fixpoint_states_do_not_depend_on_worklist_order(
        program in arb_program(true),
        tie_seed in any::<u64>(),
    ) {
        let toolkit = toolkit(&program);
        for algo in AlgoKind::ALL {
            let mut by_rpo = toolkit.run_with(algo, TieBreak::Rpo).unwrap();
            let mut seeded = toolkit.run_with(algo, TieBreak::Seeded(tie_seed)).unwrap();
            for point in toolkit.cfg().all_points() {
                if algo == AlgoKind::Kildall {
                    prop_assert_eq!(
                        by_rpo.partition_at(point).unwrap(),
                        seeded.partition_at(point).unwrap()
                    );
                } else {
                    prop_assert!(by_rpo
                        .sed_at(point)
                        .unwrap()
                        .bisim_eq(&seeded.sed_at(point).unwrap()));
                }
            }
        }
    }

    #[test]
    fn looped_fixpoints_converge_within_the_visit_cap(
        program in arb_program(true),
    ) {
        prop_assume!(has_loops(&program));
        let toolkit = toolkit(&program);
        for algo in AlgoKind::ALL {
            let run = toolkit.run(algo).unwrap();
            prop_assert!(
                run.iterations() <= MAX_VISITS,
                "{algo} visited {} blocks",
                run.iterations()
            );
        }
    }
}
