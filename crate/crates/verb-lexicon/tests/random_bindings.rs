//! Every class template must come out valid and walk its signature no
//! matter what labels are bound into it.

use fm_core::validate;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use verb_lexicon::{theme_walk, Lexicon, RoleBinding};

// Deliberately hostile label material: quotes, escapes, placeholder
// syntax, unicode, and whitespace.
const FRAGMENTS: &[&str] = &[
    "book", "Nora", "the old \"manuscript\"", "tab\there", "line\nbreak", "back\\slash",
    "${agent}", "${", "}", "naïve idée", "мир", "空", "  padded  ", "a", "",
];

fn random_label(rng: &mut ChaCha8Rng, salt: usize) -> String {
    let mut label = String::new();
    for _ in 0..rng.random_range(1..4) {
        label.push_str(FRAGMENTS[rng.random_range(0..FRAGMENTS.len())]);
        label.push(' ');
    }
    // The salt keeps labels of one binding distinct from each other, so
    // walks filtered by thing label stay unambiguous.
    label.push_str(&salt.to_string());
    label
}

#[test]
fn every_class_survives_arbitrary_labels() {
    let lexicon = Lexicon::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for class in lexicon.class_names() {
        let def = lexicon.class(class, None).unwrap();
        for round in 0..120 {
            let binding: RoleBinding = def
                .roles
                .iter()
                .enumerate()
                .map(|(i, role)| (role.clone(), random_label(&mut rng, i)))
                .collect();
            let schema = lexicon
                .instantiate(class, &binding)
                .unwrap_or_else(|e| panic!("{class} round {round}: {e}"));
            assert!(
                validate(&schema).is_empty(),
                "{class} round {round} produced an invalid schema"
            );
            let walk = theme_walk(&schema, &binding["theme"]).unwrap();
            assert_eq!(
                walk,
                lexicon.signature(class).unwrap(),
                "{class} round {round} walk diverged"
            );
        }
    }
}

#[test]
fn variants_survive_arbitrary_labels() {
    let lexicon = Lexicon::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for (class, variant) in [("Advice", "to"), ("Advice", "against")] {
        let def = lexicon.class(class, Some(variant)).unwrap();
        for round in 0..120 {
            let binding: RoleBinding = def
                .roles
                .iter()
                .enumerate()
                .map(|(i, role)| (role.clone(), random_label(&mut rng, i)))
                .collect();
            let schema = lexicon
                .instantiate_variant(class, variant, &binding)
                .unwrap_or_else(|e| panic!("{class} ({variant}) round {round}: {e}"));
            assert!(validate(&schema).is_empty());
        }
    }
}

#[test]
fn activity_shape_survives_arbitrary_agents() {
    let lexicon = Lexicon::bundled();
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for round in 0..120 {
        let binding: RoleBinding =
            [("agent".to_string(), random_label(&mut rng, 0))].into();
        let schema = lexicon.instantiate_verb("walk", &binding).unwrap();
        assert!(validate(&schema).is_empty(), "round {round}");
        assert_eq!(
            theme_walk(&schema, "walk").unwrap(),
            [fm_core::StageKind::Receive, fm_core::StageKind::Process]
        );
    }
}
