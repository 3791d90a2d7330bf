mod support;

use proptest::prelude::*;
use ssnforge_core::metadata::{generate_metadata, parse_metadata, render, MetadataConfig};
use ssnforge_core::ontology::Namespaces;

use support::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn parse_inverts_render(entries in metadata_entries()) {
        let mut config = MetadataConfig::new();
        for (k, v) in entries {
            config.push(k, v).unwrap();
        }
        let text = render(&config);
        prop_assert!(text.ends_with('\n'));
        prop_assert_eq!(parse_metadata(&text).unwrap(), config);
    }

    #[test]
    fn bindings_yield_two_keys_each((t, i) in type_and_instance()) {
        let ns = Namespaces::default();
        let config = generate_metadata(&i, &t, &ns).unwrap();
        let field_keys: Vec<&str> = config.keys().filter(|k| k.contains('.')).collect();
        let expected: Vec<String> = i
            .bindings
            .iter()
            .flat_map(|b| [format!("{}.propertyName", b.xgsn_field), format!("{}.unit", b.xgsn_field)])
            .collect();
        prop_assert_eq!(field_keys, expected);
        prop_assert_eq!(config.get("author").is_some(), i.owner.is_some());
        prop_assert_eq!(config.get("description").is_some(), i.description.is_some());

        let text = render(&config);
        prop_assert_eq!(&render(&generate_metadata(&i, &t, &ns).unwrap()), &text);
        prop_assert_eq!(parse_metadata(&text).unwrap(), config);
    }
}
